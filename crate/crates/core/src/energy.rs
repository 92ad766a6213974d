//! Exact evaluators for additive energies of square roots and reciprocals,
//! their representation counters, and the character-sum spectrum whose
//! fourth moment ties back to the square-root energy.
//!
//! The square-root energy of a weight supported on the window m is driven by
//! the correlation sums Q_lambda: the histogram here runs over sums
//! s = u + v (matching the quadruple definition), which coincides with the
//! difference form because the root set {u : u^2 ~ m} is closed under
//! negation. Both forms are cross-checked in the tests.

use crate::error::{Error, Result};
use crate::field::{Elem, Histogram, ResidueField, Weight};
use num_bigint::BigUint;
use num_complex::Complex64;
use std::time::{Duration, Instant};

/// Default guard on enumerated pairs (histogram paths).
pub const DEFAULT_PAIR_BUDGET: u64 = 1_000_000_000;
/// Default guard on enumerated triples (brute-force oracles).
pub const DEFAULT_ORACLE_BUDGET: u64 = 1_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnergyMethod {
    Histogram,
    BruteForce,
}

impl std::fmt::Display for EnergyMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EnergyMethod::Histogram => write!(f, "histogram"),
            EnergyMethod::BruteForce => write!(f, "brute_force"),
        }
    }
}

#[derive(Clone, Debug)]
pub enum EnergyValue {
    /// Exact integer path (indicator-style weights).
    Count(BigUint),
    /// Weighted path; real up to float rounding, with the residual imaginary
    /// part carried for inspection.
    Weighted(Complex64),
}

impl EnergyValue {
    pub fn to_display_string(&self) -> String {
        match self {
            EnergyValue::Count(c) => c.to_string(),
            EnergyValue::Weighted(w) => format!("{:.12e}{:+.3e}i", w.re, w.im),
        }
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            EnergyValue::Count(c) => biguint_to_f64(c),
            EnergyValue::Weighted(w) => w.re,
        }
    }
}

pub fn biguint_to_f64(v: &BigUint) -> f64 {
    v.to_string().parse().unwrap_or(f64::INFINITY)
}

#[derive(Clone, Debug)]
pub struct EnergyResult {
    pub value: EnergyValue,
    pub method: EnergyMethod,
    pub q: u64,
    pub r: usize,
    pub m: usize,
    pub elapsed: Duration,
    /// True when the enumeration skipped 0 (reciprocal sums run over the
    /// invertible window elements only).
    pub zero_excluded: bool,
}

/// The root set {u in F_{q^r} : u^2 ~ m}, ascending encoding order. Closed
/// under negation.
pub fn root_set(ctx: &ResidueField, m: usize) -> Result<Vec<Elem>> {
    let mut out: Vec<Elem> = ctx
        .window(m)?
        .flat_map(|s| ctx.square_roots(s).iter())
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// Q_lambda(beta) = sum_{u - v = lambda} beta_{u^2} conj(beta_{v^2}).
/// Real up to float rounding by the u -> -v pairing.
pub fn q_lambda(ctx: &ResidueField, beta: &Weight, lambda: Elem) -> Result<Complex64> {
    let roots = root_set(ctx, beta.window())?;
    let mut sum = Complex64::new(0.0, 0.0);
    for &u in &roots {
        let v = ctx.sub(u, lambda);
        let bv = beta.get(ctx.mul(v, v));
        if bv.re == 0.0 && bv.im == 0.0 {
            continue;
        }
        sum += beta.get(ctx.mul(u, u)) * bv.conj();
    }
    Ok(sum)
}

/// All correlation sums at once, indexed by the sum s = u + v. By the
/// negation symmetry of the root set this vector equals lambda -> Q_lambda.
pub fn correlation_sums(
    ctx: &ResidueField,
    beta: &Weight,
    pair_budget: u64,
) -> Result<Vec<Complex64>> {
    let roots = root_set(ctx, beta.window())?;
    check_pairs(roots.len(), pair_budget)?;
    let values: Vec<Complex64> = roots.iter().map(|&u| beta.get(ctx.mul(u, u))).collect();
    let mut sums = vec![Complex64::new(0.0, 0.0); ctx.size() as usize];
    for (i, &u) in roots.iter().enumerate() {
        let bu = values[i];
        if bu.re == 0.0 && bu.im == 0.0 {
            continue;
        }
        for (j, &v) in roots.iter().enumerate() {
            let bv = values[j];
            if bv.re == 0.0 && bv.im == 0.0 {
                continue;
            }
            sums[ctx.add(u, v).index()] += bu * bv.conj();
        }
    }
    Ok(sums)
}

fn check_pairs(n: usize, budget: u64) -> Result<()> {
    let needed = (n as u128) * (n as u128);
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    Ok(())
}

/// Integer pair histogram over sums of root-set elements restricted to a
/// binary weight's support. The histogram's total mass is the squared
/// support size (the Parseval mass identity).
pub fn binary_sum_histogram(
    ctx: &ResidueField,
    beta: &Weight,
    pair_budget: u64,
) -> Result<Histogram> {
    let roots = root_set(ctx, beta.window())?;
    let support: Vec<Elem> = roots
        .into_iter()
        .filter(|&u| beta.get(ctx.mul(u, u)).re == 1.0)
        .collect();
    check_pairs(support.len(), pair_budget)?;
    let mut hist = Histogram::new(ctx.size());
    for &u in &support {
        for &v in &support {
            hist.incr(ctx.add(u, v));
        }
    }
    Ok(hist)
}

/// The square-root energy E(beta) = sum_lambda Q_lambda(beta)^2. Binary
/// weights take the exact integer path (the quadruple count of the
/// definition); general weights take the complex path.
pub fn energy_sqrt(ctx: &ResidueField, beta: &Weight, pair_budget: u64) -> Result<EnergyResult> {
    let start = Instant::now();
    let value = if beta.is_binary() {
        let hist = binary_sum_histogram(ctx, beta, pair_budget)?;
        EnergyValue::Count(hist.sum_of_squares())
    } else {
        let sums = correlation_sums(ctx, beta, pair_budget)?;
        let total: Complex64 = sums.iter().map(|s| s * s).sum();
        EnergyValue::Weighted(total)
    };
    Ok(EnergyResult {
        value,
        method: EnergyMethod::Histogram,
        q: ctx.q(),
        r: ctx.r(),
        m: beta.window(),
        elapsed: start.elapsed(),
        zero_excluded: false,
    })
}

/// Ground-truth oracle: the literal quadruple count of E(1_m), by
/// enumerating (u, v, x) over the root set and testing y = u + v - x for
/// membership.
pub fn energy_sqrt_bruteforce(
    ctx: &ResidueField,
    m: usize,
    oracle_budget: u64,
) -> Result<EnergyResult> {
    let start = Instant::now();
    let roots = root_set(ctx, m)?;
    let needed = (roots.len() as u128).pow(3);
    if needed > oracle_budget as u128 {
        return Err(Error::OracleTooLarge {
            needed,
            budget: oracle_budget,
        });
    }
    let mut member = vec![false; ctx.size() as usize];
    for &u in &roots {
        member[u.index()] = true;
    }
    let mut count: u64 = 0;
    for &u in &roots {
        for &v in &roots {
            let s = ctx.add(u, v);
            for &x in &roots {
                if member[ctx.sub(s, x).index()] {
                    count += 1;
                }
            }
        }
    }
    Ok(EnergyResult {
        value: EnergyValue::Count(BigUint::from(count)),
        method: EnergyMethod::BruteForce,
        q: ctx.q(),
        r: ctx.r(),
        m,
        elapsed: start.elapsed(),
        zero_excluded: false,
    })
}

/// I_F(a, m): ordered pairs of invertible window elements with
/// u^{-1} + v^{-1} = a. The window's zero element is excluded (every other
/// window element is invertible).
pub fn inv_rep_count(ctx: &ResidueField, a: Elem, m: usize) -> Result<BigUint> {
    ctx.window_test(Elem::ZERO, m)?; // validates m
    let mut count: u64 = 0;
    let bound = ctx.window_size(m);
    for enc in 1..bound {
        let u = ctx.elem(enc)?;
        let w = ctx.sub(a, ctx.inv(u)?);
        if w == Elem::ZERO {
            continue;
        }
        let v = ctx.inv(w)?;
        if v.encoding() < bound {
            count += 1;
        }
    }
    Ok(BigUint::from(count))
}

/// Histogram of reciprocal pair sums a = u^{-1} + v^{-1} over the invertible
/// window.
pub fn inv_histogram(ctx: &ResidueField, m: usize, pair_budget: u64) -> Result<Histogram> {
    ctx.window_test(Elem::ZERO, m)?;
    let bound = ctx.window_size(m);
    let nonzero = (bound - 1) as usize;
    check_pairs(nonzero, pair_budget)?;
    let invs: Vec<Elem> = (1..bound)
        .map(|enc| ctx.inv(Elem::from_index(enc as usize)).expect("nonzero"))
        .collect();
    let mut hist = Histogram::new(ctx.size());
    for &iu in &invs {
        for &iv in &invs {
            hist.incr(ctx.add(iu, iv));
        }
    }
    Ok(hist)
}

/// The reciprocal energy E(m) = sum_a I_F(a, m)^2, exactly.
pub fn energy_inv(ctx: &ResidueField, m: usize, pair_budget: u64) -> Result<EnergyResult> {
    let start = Instant::now();
    let hist = inv_histogram(ctx, m, pair_budget)?;
    Ok(EnergyResult {
        value: EnergyValue::Count(hist.sum_of_squares()),
        method: EnergyMethod::Histogram,
        q: ctx.q(),
        r: ctx.r(),
        m,
        elapsed: start.elapsed(),
        zero_excluded: true,
    })
}

/// The spectrum A_lambda = sum_{t^2 ~ m} psi_c(t lambda), for all lambda.
pub fn a_lambda_spectrum(ctx: &ResidueField, m: usize, c: Elem) -> Result<Vec<Complex64>> {
    let roots = root_set(ctx, m)?;
    let twisted: Vec<Elem> = roots.iter().map(|&t| ctx.mul(c, t)).collect();
    let mut out = Vec::with_capacity(ctx.size() as usize);
    for lambda in ctx.elements() {
        let mut sum = Complex64::new(0.0, 0.0);
        for &ct in &twisted {
            sum += ctx.psi(ctx.mul(ct, lambda));
        }
        out.push(sum);
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct FourthMoment {
    /// sum_lambda |A_lambda|^4 (float path).
    pub spectrum_side: f64,
    /// q^r * E(1_m) (exact integer path).
    pub energy_side: BigUint,
    pub relative_error: f64,
}

/// Checks the fourth-moment identity sum |A_lambda|^4 = q^r E(1_m).
pub fn fourth_moment_check(
    ctx: &ResidueField,
    m: usize,
    c: Elem,
    budget: u64,
) -> Result<FourthMoment> {
    let spectrum = a_lambda_spectrum(ctx, m, c)?;
    let lhs: f64 = spectrum.iter().map(|a| a.norm_sqr() * a.norm_sqr()).sum();
    let energy = energy_sqrt(ctx, &Weight::indicator(ctx.q(), m), budget)?;
    let EnergyValue::Count(e) = energy.value else {
        unreachable!("indicator weights take the integer path");
    };
    let rhs = e * BigUint::from(ctx.size());
    let rhs_f = biguint_to_f64(&rhs);
    let relative_error = if rhs_f == 0.0 {
        lhs.abs()
    } else {
        (lhs - rhs_f).abs() / rhs_f
    };
    Ok(FourthMoment {
        spectrum_side: lhs,
        energy_side: rhs,
        relative_error,
    })
}

/// Number of window points on a quadratic graph:
/// #{(u, v) : P(u) = v, u ~ m, v ~ m} for P of degree exactly 2 given by
/// coefficients (c0, c1, c2).
pub fn count_quadratic_image(ctx: &ResidueField, coeffs: [Elem; 3], m: usize) -> Result<BigUint> {
    if coeffs[2] == Elem::ZERO {
        return Err(Error::WrongDegree {
            expected: 2,
            got: if coeffs[1] == Elem::ZERO { "<=1" } else { "1" }.into(),
        });
    }
    let bound = ctx.window_size(m);
    ctx.window_test(Elem::ZERO, m)?;
    let mut count: u64 = 0;
    for enc in 0..bound {
        let u = Elem::from_index(enc as usize);
        let v = ctx.add(
            ctx.mul(ctx.add(ctx.mul(coeffs[2], u), coeffs[1]), u),
            coeffs[0],
        );
        if v.encoding() < bound {
            count += 1;
        }
    }
    Ok(BigUint::from(count))
}

/// Number of window points on the hyperbola uv = a, a != 0.
pub fn count_hyperbola(ctx: &ResidueField, a: Elem, m: usize) -> Result<BigUint> {
    if a == Elem::ZERO {
        return Err(Error::ZeroClass);
    }
    ctx.window_test(Elem::ZERO, m)?;
    let bound = ctx.window_size(m);
    let mut count: u64 = 0;
    for enc in 1..bound {
        let u = Elem::from_index(enc as usize);
        let v = ctx.mul(a, ctx.inv(u)?);
        if v.encoding() < bound {
            count += 1;
        }
    }
    Ok(BigUint::from(count))
}
