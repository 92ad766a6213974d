//! Exact evaluators for the bilinear character sums over square roots and
//! reciprocals, the full-window double character sum with its hard
//! inequality, reciprocal sums over irreducibles, and character sums over
//! irreducible / square-free / monic polynomial families.

use crate::error::{Error, Result};
use crate::field::{Elem, ResidueField, Weight};
use crate::gf::{enumerate_irreducibles, enumerate_monic, enumerate_squarefree_monic};
use num_complex::Complex64;

/// Relative float slack allowed on the exact full-window inequality.
pub const VINOGRADOV_SLACK: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct BilinearResult {
    pub value: Complex64,
    pub abs: f64,
    /// l1(alpha) * l1(beta).
    pub trivial_bound: f64,
    /// Instantiated bound expression with all q^{o(.)} factors dropped.
    pub main_term: f64,
    /// abs / main_term (0 when both vanish).
    pub ratio: f64,
    /// Dense window iteration skips pairs with a non-invertible coordinate
    /// in the reciprocal sum; the count is recorded rather than hidden.
    pub skipped_zero_pairs: u64,
}

fn finish(
    value: Complex64,
    trivial_bound: f64,
    main_term: f64,
    skipped_zero_pairs: u64,
) -> BilinearResult {
    let abs = value.norm();
    let ratio = if main_term > 0.0 {
        abs / main_term
    } else if abs == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    BilinearResult {
        value,
        abs,
        trivial_bound,
        main_term,
        ratio,
        skipped_zero_pairs,
    }
}

fn check_pair_budget(m: usize, n: usize, q: u64, budget: u64) -> Result<()> {
    let needed = (q as u128).pow(m as u32) * (q as u128).pow(n as u32);
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    Ok(())
}

fn qpow(q: u64, exponent: f64) -> f64 {
    (q as f64).powf(exponent)
}

/// W(alpha, beta; m, n) = sum_{f ~ m} sum_{g ~ n} alpha_f beta_g
/// sum_{h^2 = f g} psi_c(h), evaluated with the square-root table.
pub fn bilinear_sqrt(
    ctx: &ResidueField,
    alpha: &Weight,
    beta: &Weight,
    c: Elem,
    budget: u64,
) -> Result<BilinearResult> {
    let (m, n) = (alpha.window(), beta.window());
    ctx.window_test(Elem::ZERO, m)?;
    ctx.window_test(Elem::ZERO, n)?;
    check_pair_budget(m, n, ctx.q(), budget)?;
    let mut value = Complex64::new(0.0, 0.0);
    for f in ctx.window(m)? {
        let af = alpha.get(f);
        if af.re == 0.0 && af.im == 0.0 {
            continue;
        }
        for g in ctx.window(n)? {
            let bg = beta.get(g);
            if bg.re == 0.0 && bg.im == 0.0 {
                continue;
            }
            let inner: Complex64 = ctx
                .square_roots(ctx.mul(f, g))
                .iter()
                .map(|h| ctx.additive_char(c, h))
                .sum();
            value += af * bg * inner;
        }
    }
    let r = ctx.r() as f64;
    let (mf, nf) = (m as f64, n as f64);
    let main_term = alpha.l2()
        * beta.l1().powf(0.75)
        * beta.linf().powf(0.25)
        * qpow(ctx.q(), r / 8.0 + 5.0 * mf / 16.0 + nf / 16.0)
        * (qpow(ctx.q(), mf / 8.0 - r / 16.0) + 1.0)
        * (qpow(ctx.q(), nf / 8.0 - r / 16.0) + 1.0);
    Ok(finish(value, alpha.l1() * beta.l1(), main_term, 0))
}

/// W(alpha, beta; m, n) = sum alpha_f beta_g psi_c(f^{-1} g^{-1}) over the
/// invertible window pairs; skipped zero-coordinate pairs are counted.
///
/// The second error factor of the instantiated bound is read with n in
/// place of the repeated m of the stated form, which is the reading
/// consistent with the m <-> n symmetry of the sum.
pub fn bilinear_inv(
    ctx: &ResidueField,
    alpha: &Weight,
    beta: &Weight,
    c: Elem,
    budget: u64,
) -> Result<BilinearResult> {
    let (m, n) = (alpha.window(), beta.window());
    ctx.window_test(Elem::ZERO, m)?;
    ctx.window_test(Elem::ZERO, n)?;
    check_pair_budget(m, n, ctx.q(), budget)?;
    let mut value = Complex64::new(0.0, 0.0);
    let (wm, wn) = (ctx.window_size(m), ctx.window_size(n));
    let skipped = wm + wn - 1;
    let inv_g: Vec<Elem> = (1..wn)
        .map(|enc| ctx.inv(Elem::from_index(enc as usize)).expect("nonzero"))
        .collect();
    for fenc in 1..wm {
        let f = Elem::from_index(fenc as usize);
        let af = alpha.get(f);
        if af.re == 0.0 && af.im == 0.0 {
            continue;
        }
        let fi = ctx.inv(f)?;
        for (genc, &gi) in inv_g.iter().enumerate() {
            let bg = beta.get(Elem::from_index(genc + 1));
            if bg.re == 0.0 && bg.im == 0.0 {
                continue;
            }
            value += af * bg * ctx.additive_char(c, ctx.mul(fi, gi));
        }
    }
    let r = ctx.r() as f64;
    let (mf, nf) = (m as f64, n as f64);
    let main_term = alpha.linf()
        * beta.linf()
        * qpow(ctx.q(), r / 8.0 + 3.0 * mf / 4.0 + 3.0 * nf / 4.0)
        * (qpow(ctx.q(), 3.0 * mf / 16.0 - r / 16.0) + 1.0)
        * (qpow(ctx.q(), 3.0 * nf / 16.0 - r / 16.0) + 1.0);
    Ok(finish(value, alpha.l1() * beta.l1(), main_term, skipped))
}

/// Full-window double sum S = sum_{f, g ~ r} alpha_f beta_g psi_c(fg) with
/// the exact inequality |S| <= q^{r/2} l2(alpha) l2(beta). The inequality
/// carries no asymptotic factor, so any violation beyond float slack is a
/// hard error.
pub fn vinogradov_sum(
    ctx: &ResidueField,
    alpha: &Weight,
    beta: &Weight,
    c: Elem,
) -> Result<BilinearResult> {
    let r = ctx.r();
    if alpha.window() != r {
        return Err(Error::WeightWindowMismatch {
            window: alpha.window(),
            required: r,
        });
    }
    if beta.window() != r {
        return Err(Error::WeightWindowMismatch {
            window: beta.window(),
            required: r,
        });
    }
    let mut value = Complex64::new(0.0, 0.0);
    for f in ctx.elements() {
        let af = alpha.get(f);
        if af.re == 0.0 && af.im == 0.0 {
            continue;
        }
        let mut inner = Complex64::new(0.0, 0.0);
        for g in ctx.elements() {
            let bg = beta.get(g);
            if bg.re == 0.0 && bg.im == 0.0 {
                continue;
            }
            inner += bg * ctx.additive_char(c, ctx.mul(f, g));
        }
        value += af * inner;
    }
    let bound = qpow(ctx.q(), r as f64 / 2.0) * alpha.l2() * beta.l2();
    let abs = value.norm();
    if abs > bound * (1.0 + VINOGRADOV_SLACK) {
        return Err(Error::BoundViolated { lhs: abs, bound });
    }
    Ok(finish(value, alpha.l1() * beta.l1(), bound, 0))
}

/// The exponent B(r, n): 3n/2 + r/8 below n = r/3, and 15n/8 from there on.
/// The two branches agree at the boundary.
pub fn b_exponent(r: usize, n: usize) -> f64 {
    let (rf, nf) = (r as f64, n as f64);
    if 3 * n < r {
        1.5 * nf + rf / 8.0
    } else {
        1.875 * nf
    }
}

fn check_embedding_degree(n: usize, r: usize) -> Result<()> {
    if n == 0 || n >= r {
        return Err(Error::BadParameter {
            name: "n",
            detail: format!("need 1 <= n < r = {r}, got {n}"),
        });
    }
    Ok(())
}

/// sum over pairs of monic irreducibles of degree n of
/// psi_c(l1^{-1} l2^{-1}); main term q^{B(r, n)}.
pub fn irreducible_reciprocal_sum(ctx: &ResidueField, n: usize, c: Elem) -> Result<BilinearResult> {
    check_embedding_degree(n, ctx.r())?;
    let invs: Vec<Elem> = irreducibles_embedded(ctx, n)?
        .into_iter()
        .map(|l| ctx.inv(l).expect("irreducible is nonzero"))
        .collect();
    let mut value = Complex64::new(0.0, 0.0);
    for &a in &invs {
        for &b in &invs {
            value += ctx.additive_char(c, ctx.mul(a, b));
        }
    }
    let count = invs.len() as f64;
    let main_term = qpow(ctx.q(), b_exponent(ctx.r(), n));
    Ok(finish(value, count * count, main_term, 0))
}

/// Monic irreducibles of degree n embedded as residues (n < r, so the
/// embedding is the plain encoding).
pub fn irreducibles_embedded(ctx: &ResidueField, n: usize) -> Result<Vec<Elem>> {
    check_embedding_degree(n, ctx.r())?;
    enumerate_irreducibles(ctx.fq(), n)?
        .map(|f| ctx.elem(f.encoding() as u64))
        .collect()
}

/// Which polynomial family a character sum runs over. The degree-n monic
/// family appears under two readings (all monic, or the irreducible
/// subset); square-free monic is the inclusion-exclusion family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolySet {
    Irreducible,
    SquarefreeMonic,
    AllMonic,
}

impl PolySet {
    pub fn parse(s: &str) -> Result<PolySet> {
        match s {
            "irreducible" => Ok(PolySet::Irreducible),
            "squarefree" => Ok(PolySet::SquarefreeMonic),
            "monic" => Ok(PolySet::AllMonic),
            other => Err(Error::BadParameter {
                name: "set",
                detail: format!("unknown set '{other}' (irreducible|squarefree|monic)"),
            }),
        }
    }
}

impl std::fmt::Display for PolySet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PolySet::Irreducible => write!(f, "irreducible"),
            PolySet::SquarefreeMonic => write!(f, "squarefree"),
            PolySet::AllMonic => write!(f, "monic"),
        }
    }
}

/// sum_{f in set, deg f = n} chi(f) with chi the multiplicative character of
/// the given index, polynomials embedded directly as residues.
pub fn charsum(ctx: &ResidueField, set: PolySet, n: usize, chi_index: u64) -> Result<Complex64> {
    check_embedding_degree(n, ctx.r())?;
    let fq = ctx.fq();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut add = |enc: u128| -> Result<()> {
        let x = ctx.elem(enc as u64)?;
        sum += ctx.mult_char(chi_index, x)?;
        Ok(())
    };
    match set {
        PolySet::Irreducible => {
            for f in enumerate_irreducibles(fq, n)? {
                add(f.encoding())?;
            }
        }
        PolySet::SquarefreeMonic => {
            for f in enumerate_squarefree_monic(fq, n)? {
                add(f.encoding())?;
            }
        }
        PolySet::AllMonic => {
            for f in enumerate_monic(fq, n) {
                add(f.encoding())?;
            }
        }
    }
    Ok(sum)
}

/// Main term for charsum rows: q^{n/2} over irreducibles and monic,
/// n q^{n/2} over the square-free family.
pub fn charsum_main_term(q: u64, set: PolySet, n: usize) -> f64 {
    let base = qpow(q, n as f64 / 2.0);
    match set {
        PolySet::SquarefreeMonic => n as f64 * base,
        _ => base,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_context_default;
    use crate::gf::{smallest_irreducible, FqSpec};
    use num_bigint::BigUint;

    fn ctx(q: u64, r: usize) -> ResidueField {
        let fq = FqSpec::prime(q).unwrap();
        let modulus = smallest_irreducible(&fq, r).unwrap();
        build_context_default(&fq, &modulus).unwrap()
    }

    const BUDGET: u64 = 1_000_000_000;

    #[test]
    fn sqrt_singletons() {
        let ctx = ctx(3, 3);
        let c = Elem::ONE;
        let one = Complex64::new(1.0, 0.0);
        // f0 g0 a nonzero square with roots +-h0: value = 2 Re psi(h0).
        let g = ctx.generator();
        let f0 = ctx.mul(g, g);
        let g0 = ctx.mul(ctx.mul(g, g), ctx.mul(g, g));
        let alpha = Weight::delta(3, 3, f0, one);
        let beta = Weight::delta(3, 3, g0, one);
        let res = bilinear_sqrt(&ctx, &alpha, &beta, c, BUDGET).unwrap();
        let prod = ctx.mul(f0, g0);
        let h0 = ctx.square_roots(prod).iter().next().unwrap();
        let expect = 2.0 * ctx.additive_char(c, h0).re;
        assert!((res.value.re - expect).abs() < 1e-12);
        assert!(res.value.im.abs() < 1e-12);

        // f0 g0 = 0: unique root h = 0, value 1.
        let beta0 = Weight::delta(3, 3, Elem::ZERO, one);
        let res = bilinear_sqrt(&ctx, &alpha, &beta0, c, BUDGET).unwrap();
        assert!((res.value - one).norm() < 1e-12);

        // f0 g0 a non-square: empty inner sum.
        let beta_ns = Weight::delta(3, 3, ctx.mul(g, ctx.inv(f0).unwrap()), one);
        let res = bilinear_sqrt(&ctx, &alpha, &beta_ns, c, BUDGET).unwrap();
        assert!(res.value.norm() < 1e-12);
    }

    #[test]
    fn inv_singleton_and_hand_sum() {
        let ctx = ctx(3, 3);
        let c = Elem::ONE;
        let one = Complex64::new(1.0, 0.0);
        let f0 = ctx.elem(5).unwrap();
        let g0 = ctx.elem(7).unwrap();
        let alpha = Weight::delta(3, 3, f0, one);
        let beta = Weight::delta(3, 3, g0, one);
        let res = bilinear_inv(&ctx, &alpha, &beta, c, BUDGET).unwrap();
        assert!((res.abs - 1.0).abs() < 1e-12);
        let expect = ctx.additive_char(c, ctx.mul(ctx.inv(f0).unwrap(), ctx.inv(g0).unwrap()));
        assert!((res.value - expect).norm() < 1e-12);

        // m = n = 1, alpha = beta = 1: the 4-term sum over (F_3^*)^2.
        let a1 = Weight::indicator(3, 1);
        let res = bilinear_inv(&ctx, &a1, &a1, c, BUDGET).unwrap();
        let mut hand = Complex64::new(0.0, 0.0);
        for u in 1..3u64 {
            for v in 1..3u64 {
                let iu = ctx.inv(ctx.elem(u).unwrap()).unwrap();
                let iv = ctx.inv(ctx.elem(v).unwrap()).unwrap();
                hand += ctx.additive_char(c, ctx.mul(iu, iv));
            }
        }
        assert!((res.value - hand).norm() < 1e-12);
        assert_eq!(res.skipped_zero_pairs, 5); // 3 + 3 - 1
        assert!(res.abs <= res.trivial_bound * (1.0 + 1e-6));
    }

    #[test]
    fn vinogradov_indicator_value() {
        // alpha = beta = 1_r: S = q^r by row-by-row orthogonality.
        let ctx = ctx(3, 3);
        let w = Weight::indicator(3, 3);
        let res = vinogradov_sum(&ctx, &w, &w, Elem::ONE).unwrap();
        assert!((res.value.re - 27.0).abs() < 1e-8);
        assert!(res.value.im.abs() < 1e-8);
        assert!(res.abs <= res.main_term * (1.0 + VINOGRADOV_SLACK));
    }

    #[test]
    fn vinogradov_random_pairs_hold() {
        let ctx = ctx(3, 3);
        for seed in 0..25 {
            let alpha = Weight::random(3, 3, 1000 + seed);
            let beta = Weight::random(3, 3, 2000 + seed);
            vinogradov_sum(&ctx, &alpha, &beta, Elem::ONE).unwrap();
        }
        let short = Weight::indicator(3, 2);
        assert!(vinogradov_sum(&ctx, &short, &short, Elem::ONE).is_err());
    }

    #[test]
    fn conjugate_twist_symmetry() {
        // psi_{-c} = conj(psi_c): for real weights the value at -c is the
        // conjugate of the value at c; for complex weights the conjugation
        // applies to the weights as well.
        let ctx = ctx(3, 3);
        let c = ctx.elem(4).unwrap();
        let real = Weight::indicator(3, 2);
        let at_c = bilinear_inv(&ctx, &real, &real, c, BUDGET).unwrap();
        let at_neg = bilinear_inv(&ctx, &real, &real, ctx.neg(c), BUDGET).unwrap();
        assert!((at_c.value - at_neg.value.conj()).norm() < 1e-12);

        let alpha = Weight::random(3, 2, 11);
        let beta = Weight::random(3, 2, 12);
        let (ac, bc) = (alpha.conj(), beta.conj());
        let neg_c = ctx.neg(c);

        let at_c = bilinear_sqrt(&ctx, &alpha, &beta, c, BUDGET).unwrap();
        let conj_side = bilinear_sqrt(&ctx, &ac, &bc, neg_c, BUDGET).unwrap();
        assert!((at_c.value - conj_side.value.conj()).norm() < 1e-12, "sqrt");

        let at_c = bilinear_inv(&ctx, &alpha, &beta, c, BUDGET).unwrap();
        let conj_side = bilinear_inv(&ctx, &ac, &bc, neg_c, BUDGET).unwrap();
        assert!((at_c.value - conj_side.value.conj()).norm() < 1e-12, "inv");
    }

    #[test]
    fn b_exponent_branches_agree_at_boundary() {
        for r in [3usize, 6, 9, 12] {
            let n = r / 3;
            let low = 1.5 * n as f64 + r as f64 / 8.0;
            let high = 1.875 * n as f64;
            assert!((low - high).abs() < 1e-12, "r = {r}");
            assert_eq!(b_exponent(r, n), high);
        }
    }

    #[test]
    fn irreducible_reciprocal_matches_direct() {
        let ctx = ctx(3, 4);
        let c = Elem::ONE;
        let res = irreducible_reciprocal_sum(&ctx, 2, c).unwrap();
        // pi_2 = 3 irreducibles; direct 9-term evaluation.
        let ls = irreducibles_embedded(&ctx, 2).unwrap();
        assert_eq!(ls.len(), 3);
        let mut direct = Complex64::new(0.0, 0.0);
        for &l1 in &ls {
            for &l2 in &ls {
                let prod = ctx.mul(ctx.inv(l1).unwrap(), ctx.inv(l2).unwrap());
                direct += ctx.additive_char(c, prod);
            }
        }
        assert!((res.value - direct).norm() < 1e-12);
        assert!(res.abs <= 9.0 + 1e-9);
        assert!(irreducible_reciprocal_sum(&ctx, 4, c).is_err());
    }

    #[test]
    fn charsum_principal_values() {
        let ctx = ctx(3, 4);
        let pi2 = charsum(&ctx, PolySet::Irreducible, 2, 0).unwrap();
        assert!((pi2.re - 3.0).abs() < 1e-12);
        let sf = charsum(&ctx, PolySet::SquarefreeMonic, 2, 0).unwrap();
        assert!((sf.re - 6.0).abs() < 1e-12); // q^2 - q = 6
        let monic = charsum(&ctx, PolySet::AllMonic, 3, 0).unwrap();
        assert!((monic.re - 27.0).abs() < 1e-12);
        assert_eq!(
            crate::gf::count_irreducibles(ctx.fq(), 2).unwrap(),
            BigUint::from(3u32)
        );
    }

    #[test]
    fn nonsquare_beta_support_empties_inner_sums() {
        // With beta supported only on non-squares, every inner sum over
        // h^2 = f g with f, g both... here f ranges over squares times
        // nonsquare stays nonsquare, so only f = 0 contributes.
        let ctx = ctx(3, 3);
        let c = Elem::ONE;
        let mut values = vec![Complex64::new(0.0, 0.0); 27];
        for x in ctx.elements() {
            if x != Elem::ZERO && !ctx.is_square(x) && x.encoding() < 27 {
                values[x.index()] = Complex64::new(1.0, 0.0);
            }
        }
        let beta = Weight::from_values(3, 3, values).unwrap();
        let alpha = Weight::indicator(3, 3);
        let res = bilinear_sqrt(&ctx, &alpha, &beta, c, BUDGET).unwrap();
        // Triple-loop direct evaluation.
        let mut direct = Complex64::new(0.0, 0.0);
        for f in ctx.elements() {
            for g in ctx.elements() {
                let bg = beta.get(g);
                if bg.norm() == 0.0 {
                    continue;
                }
                for h in ctx.elements() {
                    if ctx.mul(h, h) == ctx.mul(f, g) {
                        direct += bg * ctx.additive_char(c, h);
                    }
                }
            }
        }
        assert!((res.value - direct).norm() < 1e-9);
    }
}
