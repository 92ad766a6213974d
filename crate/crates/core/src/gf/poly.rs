use super::FqSpec;
use crate::error::{Error, Result};
use std::fmt;
use std::sync::Arc;

/// A polynomial over F_q: exact coefficient sequence, lowest degree first,
/// no trailing zeros. The zero polynomial has an empty coefficient vector
/// and degree `None`.
///
/// Canonical encoding: the mixed-radix integer `sum c_i q^i` (low degree
/// least significant), which fixes the enumeration order used everywhere.
#[derive(Clone)]
pub struct Poly {
    fq: Arc<FqSpec>,
    coeffs: Vec<u64>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.fq.same_field(&other.fq) && self.coeffs == other.coeffs
    }
}
impl Eq for Poly {}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{self}]")
    }
}

/// Text format: comma-separated coefficient encodings, ascending degree
/// ("1,2,0,1" = 1 + 2X + X^3). The zero polynomial prints as "0".
impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl Poly {
    pub fn from_coeffs(fq: &Arc<FqSpec>, mut coeffs: Vec<u64>) -> Poly {
        debug_assert!(coeffs.iter().all(|&c| c < fq.q()));
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly {
            fq: Arc::clone(fq),
            coeffs,
        }
    }

    pub fn zero(fq: &Arc<FqSpec>) -> Poly {
        Poly {
            fq: Arc::clone(fq),
            coeffs: Vec::new(),
        }
    }

    pub fn one(fq: &Arc<FqSpec>) -> Poly {
        Poly::constant(fq, 1)
    }

    pub fn constant(fq: &Arc<FqSpec>, c: u64) -> Poly {
        Poly::from_coeffs(fq, vec![c])
    }

    /// The monomial X.
    pub fn x(fq: &Arc<FqSpec>) -> Poly {
        Poly::from_coeffs(fq, vec![0, 1])
    }

    pub fn monomial(fq: &Arc<FqSpec>, c: u64, degree: usize) -> Poly {
        if c == 0 {
            return Poly::zero(fq);
        }
        let mut coeffs = vec![0; degree + 1];
        coeffs[degree] = c;
        Poly::from_coeffs(fq, coeffs)
    }

    /// Monic polynomial of the given degree whose lower-degree coefficient
    /// block is the mixed-radix expansion of `lower` (base q).
    pub fn monic_from_lower(fq: &Arc<FqSpec>, degree: usize, mut lower: u128) -> Poly {
        let q = fq.q() as u128;
        let mut coeffs = vec![0u64; degree + 1];
        for c in coeffs.iter_mut().take(degree) {
            *c = (lower % q) as u64;
            lower /= q;
        }
        debug_assert_eq!(lower, 0, "lower block exceeds q^degree");
        coeffs[degree] = 1;
        Poly::from_coeffs(fq, coeffs)
    }

    pub fn parse(fq: &Arc<FqSpec>, text: &str) -> Result<Poly> {
        let mut coeffs = Vec::new();
        for part in text.split(',') {
            let c: u64 = part.trim().parse().map_err(|_| Error::BadPolyText {
                text: text.into(),
                detail: format!("'{part}' is not an integer"),
            })?;
            if c >= fq.q() {
                return Err(Error::BadPolyText {
                    text: text.into(),
                    detail: format!("coefficient {c} not in [0, {})", fq.q()),
                });
            }
            coeffs.push(c);
        }
        Ok(Poly::from_coeffs(fq, coeffs))
    }

    pub fn fq(&self) -> &Arc<FqSpec> {
        &self.fq
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    /// `None` is the degree of the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn leading(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1
    }

    pub fn make_monic(&self) -> Poly {
        let lead = self.leading();
        if lead == 0 || lead == 1 {
            return self.clone();
        }
        let inv = self.fq.inv(lead).expect("nonzero leading coefficient");
        self.scalar_mul(inv)
    }

    /// Canonical mixed-radix encoding `sum c_i q^i`.
    pub fn encoding(&self) -> u128 {
        let q = self.fq.q() as u128;
        let mut acc = 0u128;
        for &c in self.coeffs.iter().rev() {
            acc = acc
                .checked_mul(q)
                .and_then(|a| a.checked_add(c as u128))
                .expect("polynomial encoding overflows u128");
        }
        acc
    }

    pub fn from_encoding(fq: &Arc<FqSpec>, mut enc: u128) -> Poly {
        let q = fq.q() as u128;
        let mut coeffs = Vec::new();
        while enc > 0 {
            coeffs.push((enc % q) as u64);
            enc /= q;
        }
        Poly::from_coeffs(fq, coeffs)
    }

    fn check_field(&self, other: &Poly) {
        assert!(
            self.fq.same_field(&other.fq),
            "mixed coefficient fields in polynomial operation"
        );
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.check_field(other);
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.fq.add(self.coeff(i), other.coeff(i)));
        }
        Poly::from_coeffs(&self.fq, out)
    }

    pub fn neg(&self) -> Poly {
        let out = self.coeffs.iter().map(|&c| self.fq.neg(c)).collect();
        Poly::from_coeffs(&self.fq, out)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scalar_mul(&self, s: u64) -> Poly {
        let out = self.coeffs.iter().map(|&c| self.fq.mul(c, s)).collect();
        Poly::from_coeffs(&self.fq, out)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        self.check_field(other);
        if self.is_zero() || other.is_zero() {
            return Poly::zero(&self.fq);
        }
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = self.fq.add(out[i + j], self.fq.mul(a, b));
            }
        }
        Poly::from_coeffs(&self.fq, out)
    }

    /// Euclidean division: returns (quotient, remainder) with
    /// deg remainder < deg divisor.
    pub fn div_rem(&self, divisor: &Poly) -> Result<(Poly, Poly)> {
        self.check_field(divisor);
        if divisor.is_zero() {
            return Err(Error::ZeroDivisor);
        }
        let d = divisor.coeffs.len() - 1;
        if self.coeffs.len() <= d {
            return Ok((Poly::zero(&self.fq), self.clone()));
        }
        let lead_inv = self.fq.inv(divisor.leading())?;
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u64; self.coeffs.len() - d];
        for i in (d..rem.len()).rev() {
            let c = rem[i];
            if c == 0 {
                continue;
            }
            let factor = self.fq.mul(c, lead_inv);
            quot[i - d] = factor;
            for (j, &m) in divisor.coeffs.iter().enumerate() {
                let idx = i - d + j;
                rem[idx] = self.fq.sub(rem[idx], self.fq.mul(factor, m));
            }
            debug_assert_eq!(rem[i], 0);
        }
        rem.truncate(d);
        Ok((
            Poly::from_coeffs(&self.fq, quot),
            Poly::from_coeffs(&self.fq, rem),
        ))
    }

    pub fn rem(&self, divisor: &Poly) -> Result<Poly> {
        Ok(self.div_rem(divisor)?.1)
    }

    /// Monic greatest common divisor; gcd(f, 0) is the monic associate of f.
    pub fn gcd(&self, other: &Poly) -> Poly {
        self.check_field(other);
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.make_monic()
    }

    /// Formal derivative in characteristic p.
    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero(&self.fq);
        }
        let p = self.fq.p();
        let out = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| self.fq.mul(c, (i as u64) % p))
            .collect();
        Poly::from_coeffs(&self.fq, out)
    }

    pub fn eval(&self, x: u64) -> u64 {
        let mut acc = 0u64;
        for &c in self.coeffs.iter().rev() {
            acc = self.fq.add(self.fq.mul(acc, x), c);
        }
        acc
    }

    /// self^exp mod modulus, square-and-multiply.
    pub fn pow_mod(&self, mut exp: u128, modulus: &Poly) -> Result<Poly> {
        let mut base = self.rem(modulus)?;
        let mut acc = Poly::one(&self.fq).rem(modulus)?;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base).rem(modulus)?;
            }
            base = base.mul(&base).rem(modulus)?;
            exp >>= 1;
        }
        Ok(acc)
    }

    /// Left shift by `k`: multiply by X^k.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![0u64; k];
        coeffs.extend_from_slice(&self.coeffs);
        Poly::from_coeffs(&self.fq, coeffs)
    }
}
