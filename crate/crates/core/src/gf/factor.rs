use super::Poly;
use crate::error::{Error, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Canonical factorization: `unit * prod l_i^{e_i}` with the monic
/// irreducible factors pairwise distinct and sorted by (degree, encoding).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    fq: std::sync::Arc<super::FqSpec>,
    pub unit: u64,
    pub factors: Vec<(Poly, u32)>,
}

impl Factorization {
    /// Reconstructs the factored polynomial exactly.
    pub fn product(&self) -> Poly {
        let mut acc = Poly::constant(&self.fq, self.unit);
        for (f, e) in &self.factors {
            for _ in 0..*e {
                acc = acc.mul(f);
            }
        }
        acc
    }

    pub fn distinct_count(&self) -> usize {
        self.factors.len()
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|(_, e)| *e == 1)
    }

    /// Maximum degree among irreducible factors (0 for a unit).
    pub fn smoothness_degree(&self) -> usize {
        self.factors
            .iter()
            .map(|(f, _)| f.degree().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl Poly {
    /// X^{q^d} mod f, by d applications of the q-power Frobenius.
    fn frobenius_power(&self, d: usize) -> Result<Poly> {
        let q = self.fq().q() as u128;
        let mut g = Poly::x(self.fq()).rem(self)?;
        for _ in 0..d {
            g = g.pow_mod(q, self)?;
        }
        Ok(g)
    }

    /// Deterministic irreducibility test (Rabin): f of degree n is
    /// irreducible iff X^{q^n} = X mod f and gcd(X^{q^{n/t}} - X, f) = 1 for
    /// every prime t | n.
    pub fn is_irreducible(&self) -> Result<bool> {
        let n = match self.degree() {
            None | Some(0) => return Err(Error::DegreeTooSmall),
            Some(n) => n,
        };
        if n == 1 {
            return Ok(true);
        }
        let f = self.make_monic();
        let x = Poly::x(f.fq());
        for t in prime_divisors(n) {
            let h = f.frobenius_power(n / t)?;
            if f.gcd(&h.sub(&x)).degree() != Some(0) {
                return Ok(false);
            }
        }
        let h = f.frobenius_power(n)?;
        Ok(h.sub(&x).rem(&f)?.is_zero())
    }

    /// True iff no irreducible square divides f: gcd(f, f') has degree 0.
    /// The f' = 0 case (p-th powers) falls out since gcd(f, 0) = f.
    pub fn is_squarefree(&self) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::CannotFactorZero);
        }
        let f = self.make_monic();
        Ok(f.gcd(&f.derivative()).degree() == Some(0))
    }

    /// Maximum degree among irreducible factors; constants give 0, so
    /// "k-smooth" stays monotone under multiplication.
    pub fn smoothness_degree(&self) -> Result<usize> {
        if self.is_zero() {
            return Err(Error::CannotFactorZero);
        }
        if self.degree() == Some(0) {
            return Ok(0);
        }
        Ok(self.factor()?.smoothness_degree())
    }

    /// Polynomial Moebius function: (-1)^k on square-free products of k
    /// distinct irreducibles, 0 otherwise; units give 1.
    pub fn mobius_q(&self) -> Result<i8> {
        if self.is_zero() {
            return Err(Error::CannotFactorZero);
        }
        if !self.is_squarefree()? {
            return Ok(0);
        }
        let fact = self.factor()?;
        Ok(if fact.distinct_count() % 2 == 0 {
            1
        } else {
            -1
        })
    }

    /// Canonical factorization via square-free decomposition, then
    /// distinct-degree and equal-degree splitting. Equal-degree splitting
    /// draws from a generator seeded by the input encoding, so output is
    /// deterministic per call.
    pub fn factor(&self) -> Result<Factorization> {
        if self.is_zero() {
            return Err(Error::CannotFactorZero);
        }
        let unit = self.leading();
        let monic = self.make_monic();
        let mut factors: Vec<(Poly, u32)> = Vec::new();
        if monic.degree() > Some(0) {
            let enc = monic.encoding();
            let seed = (enc as u64) ^ ((enc >> 64) as u64) ^ 0x9e37_79b9_7f4a_7c15;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for (part, mult) in squarefree_decomposition(&monic)? {
                for (prod, d) in distinct_degree_split(&part)? {
                    for irr in equal_degree_split(&prod, d, &mut rng)? {
                        factors.push((irr, mult));
                    }
                }
            }
        }
        factors.sort_by(|(a, _), (b, _)| {
            a.degree()
                .cmp(&b.degree())
                .then_with(|| a.encoding().cmp(&b.encoding()))
        });
        Ok(Factorization {
            fq: self.fq().clone(),
            unit,
            factors,
        })
    }
}

/// p-th root of a polynomial in F_q[X^p]: drop to every p-th coefficient and
/// take p-th roots of coefficients (a^{p^{e-1}} over F_{p^e}).
fn pth_root(f: &Poly) -> Poly {
    let fq = f.fq();
    let p = fq.p() as usize;
    let root_exp = fq.q() / fq.p(); // p^{e-1}
    let coeffs: Vec<u64> = f
        .coeffs()
        .iter()
        .step_by(p)
        .map(|&c| fq.pow(c, root_exp))
        .collect();
    Poly::from_coeffs(fq, coeffs)
}

/// Splits monic f into pairwise coprime square-free parts with their
/// multiplicities: f = prod part_i^{mult_i}.
fn squarefree_decomposition(f: &Poly) -> Result<Vec<(Poly, u32)>> {
    let mut out = Vec::new();
    decompose_into(f, 1, &mut out)?;
    Ok(out)
}

fn decompose_into(f: &Poly, mult: u32, out: &mut Vec<(Poly, u32)>) -> Result<()> {
    if f.degree() == Some(0) {
        return Ok(());
    }
    let p = f.fq().p() as u32;
    let deriv = f.derivative();
    if deriv.is_zero() {
        return decompose_into(&pth_root(f), mult * p, out);
    }
    let mut c = f.gcd(&deriv);
    let mut w = f.div_rem(&c)?.0;
    let mut i = 1u32;
    while w.degree() != Some(0) {
        let y = w.gcd(&c);
        let z = w.div_rem(&y)?.0;
        if z.degree() > Some(0) {
            out.push((z, mult * i));
        }
        c = c.div_rem(&y)?.0;
        w = y;
        i += 1;
    }
    if c.degree() > Some(0) {
        decompose_into(&pth_root(&c), mult * p, out)?;
    }
    Ok(())
}

/// Distinct-degree split of a monic square-free polynomial: returns
/// (product of irreducible factors of degree d, d) pairs.
fn distinct_degree_split(f: &Poly) -> Result<Vec<(Poly, usize)>> {
    let q = f.fq().q() as u128;
    let x = Poly::x(f.fq());
    let mut out = Vec::new();
    let mut g = f.clone();
    let mut h = x.rem(&g)?;
    let mut d = 0usize;
    while g.degree() > Some(2 * d + 1) {
        d += 1;
        h = h.pow_mod(q, &g)?;
        let part = g.gcd(&h.sub(&x));
        if part.degree() > Some(0) {
            out.push((part.clone(), d));
            g = g.div_rem(&part)?.0;
            h = h.rem(&g)?;
        }
    }
    if g.degree() > Some(0) {
        let d = g.degree().unwrap();
        out.push((g, d));
    }
    Ok(out)
}

/// Cantor-Zassenhaus equal-degree splitting of a monic square-free product
/// of irreducibles all of degree d.
fn equal_degree_split(f: &Poly, d: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Poly>> {
    let deg = f.degree().unwrap_or(0);
    if deg == d {
        return Ok(vec![f.clone()]);
    }
    let fq = f.fq();
    let q = fq.q() as u128;
    let qd = q.checked_pow(d as u32).ok_or_else(|| Error::BadParameter {
        name: "degree",
        detail: "q^d overflows the splitting exponent".into(),
    })?;
    loop {
        let coeffs: Vec<u64> = (0..deg).map(|_| rng.gen_range(0..fq.q())).collect();
        let a = Poly::from_coeffs(fq, coeffs);
        if a.degree().is_none() {
            continue;
        }
        let g0 = f.gcd(&a);
        let candidate = if g0.degree() > Some(0) && g0.degree() < f.degree() {
            g0
        } else if fq.p() != 2 {
            let b = a.pow_mod((qd - 1) / 2, f)?;
            f.gcd(&b.sub(&Poly::one(fq)))
        } else {
            // Char 2: split on the Artin-Schreier trace map over F_{2^{d e}}.
            let m = d as u32 * fq.e();
            let mut t = a.rem(f)?;
            let mut power = a.rem(f)?;
            for _ in 1..m {
                power = power.mul(&power).rem(f)?;
                t = t.add(&power);
            }
            f.gcd(&t)
        };
        if candidate.degree() > Some(0) && candidate.degree() < f.degree() {
            let rest = f.div_rem(&candidate)?.0;
            let mut out = equal_degree_split(&candidate, d, rng)?;
            out.extend(equal_degree_split(&rest, d, rng)?);
            return Ok(out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FqSpec;

    fn f3() -> std::sync::Arc<FqSpec> {
        FqSpec::prime(3).unwrap()
    }

    #[test]
    fn irreducible_examples() {
        let fq = f3();
        assert!(Poly::parse(&fq, "1,0,1").unwrap().is_irreducible().unwrap());
        assert!(!Poly::parse(&fq, "2,0,1").unwrap().is_irreducible().unwrap());
        assert!(Poly::x(&fq).is_irreducible().unwrap());
        assert!(matches!(
            Poly::one(&fq).is_irreducible(),
            Err(Error::DegreeTooSmall)
        ));
    }

    #[test]
    fn factor_examples() {
        let fq = f3();
        // X^2 + 2X + 1 = (X+1)^2
        let f = Poly::parse(&fq, "1,2,1").unwrap();
        let fact = f.factor().unwrap();
        assert_eq!(fact.unit, 1);
        assert_eq!(fact.factors, vec![(Poly::parse(&fq, "1,1").unwrap(), 2)]);
        // X^2 + X = X(X+1)
        let f = Poly::parse(&fq, "0,1,1").unwrap();
        let fact = f.factor().unwrap();
        assert_eq!(
            fact.factors,
            vec![(Poly::x(&fq), 1), (Poly::parse(&fq, "1,1").unwrap(), 1)]
        );
        assert!(matches!(
            Poly::zero(&fq).factor(),
            Err(Error::CannotFactorZero)
        ));
    }

    #[test]
    fn squarefree_examples() {
        let fq = f3();
        assert!(Poly::parse(&fq, "0,1,1").unwrap().is_squarefree().unwrap());
        assert!(!Poly::monomial(&fq, 1, 2).is_squarefree().unwrap());
        // X^3 has zero derivative; gcd(f, 0) = f rejects it.
        assert!(!Poly::monomial(&fq, 1, 3).is_squarefree().unwrap());
        assert!(Poly::constant(&fq, 2).is_squarefree().unwrap());
    }

    #[test]
    fn smoothness_examples() {
        let fq = f3();
        let x = Poly::x(&fq);
        let x1 = Poly::parse(&fq, "1,1").unwrap();
        assert_eq!(x.mul(&x1).smoothness_degree().unwrap(), 1);
        let quad = Poly::parse(&fq, "1,0,1").unwrap();
        assert_eq!(quad.smoothness_degree().unwrap(), 2);
        assert_eq!(quad.mul(&x).smoothness_degree().unwrap(), 2);
        assert_eq!(Poly::constant(&fq, 2).smoothness_degree().unwrap(), 0);
    }

    #[test]
    fn mobius_examples() {
        let fq = f3();
        assert_eq!(Poly::one(&fq).mobius_q().unwrap(), 1);
        assert_eq!(Poly::monomial(&fq, 1, 2).mobius_q().unwrap(), 0);
        let x_x1 = Poly::x(&fq).mul(&Poly::parse(&fq, "1,1").unwrap());
        assert_eq!(x_x1.mobius_q().unwrap(), 1);
        assert_eq!(Poly::x(&fq).mobius_q().unwrap(), -1);
    }

    #[test]
    fn factor_roundtrip_f9() {
        let f9 = FqSpec::new(3, 2).unwrap();
        // A few fixed encodings of degree <= 5 over F_9.
        for enc in [50u128, 777, 4099, 30_000, 59_047] {
            let f = Poly::from_encoding(&f9, enc);
            if f.is_zero() {
                continue;
            }
            let fact = f.factor().unwrap();
            assert_eq!(fact.product(), f, "roundtrip failed for enc {enc}");
            for (l, _) in &fact.factors {
                assert!(l.is_monic());
                assert!(l.is_irreducible().unwrap());
            }
        }
    }

    #[test]
    fn factor_pth_power_over_extension_field() {
        // (X + g)^9 over F_9: the derivative vanishes twice, so both
        // p-th-root layers run, with coefficient roots a^{p^{e-1}}.
        let f9 = FqSpec::new(3, 2).unwrap();
        let lin = Poly::parse(&f9, "3,1").unwrap();
        let mut f = Poly::one(&f9);
        for _ in 0..9 {
            f = f.mul(&lin);
        }
        let fact = f.factor().unwrap();
        assert_eq!(fact.factors, vec![(lin, 9)]);
        assert_eq!(fact.product(), f);
    }

    #[test]
    fn factor_char2_trace_split() {
        let f2 = FqSpec::prime(2).unwrap();
        // X(X+1)(X^2+X+1): exercises the Artin-Schreier splitting path
        let f = Poly::x(&f2)
            .mul(&Poly::parse(&f2, "1,1").unwrap())
            .mul(&Poly::parse(&f2, "1,1,1").unwrap());
        let fact = f.factor().unwrap();
        assert_eq!(fact.product(), f);
        assert_eq!(fact.factors.len(), 3);
    }
}
