use crate::error::{Error, Result};
use std::fmt;
use std::sync::Arc;

/// Largest q = p^e for which the e > 1 multiplication table is built.
const EXTENSION_TABLE_CAP: u64 = 4096;

/// The coefficient field F_q, q = p^e.
///
/// Elements are integer encodings in `[0, q)`: the base-p digits of the
/// encoding are the coordinates over F_p (lowest power of the generator Y
/// least significant). For e = 1 arithmetic is plain modular arithmetic; for
/// e > 1 it runs on precomputed tables over F_p\[Y\]/(base_modulus).
pub struct FqSpec {
    p: u64,
    e: u32,
    q: u64,
    /// Monic degree-e modulus over F_p (empty for e = 1).
    base_modulus: Vec<u64>,
    mul_table: Vec<u32>,
    inv_table: Vec<u32>,
}

impl fmt::Debug for FqSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FqSpec(q = {}^{})", self.p, self.e)
    }
}

impl PartialEq for FqSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.e == other.e && self.base_modulus == other.base_modulus
    }
}
impl Eq for FqSpec {}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl FqSpec {
    /// Builds F_{p^e}. For e > 1 the base modulus is the monic irreducible of
    /// degree e over F_p with the smallest encoding, so encodings are
    /// deterministic across runs.
    pub fn new(p: u64, e: u32) -> Result<Arc<FqSpec>> {
        if e > 1 {
            let prime = FqSpec::new(p, 1)?;
            let base = super::smallest_irreducible(&prime, e as usize)?;
            FqSpec::with_base_modulus(p, e, base.coeffs())
        } else {
            FqSpec::with_base_modulus(p, 1, &[])
        }
    }

    /// Shorthand for a prime field F_p.
    pub fn prime(p: u64) -> Result<Arc<FqSpec>> {
        FqSpec::new(p, 1)
    }

    /// Builds F_{p^e} on an explicit base modulus (coefficients over F_p,
    /// ascending degree, monic of degree e). Irreducibility is verified.
    pub fn with_base_modulus(p: u64, e: u32, base_modulus: &[u64]) -> Result<Arc<FqSpec>> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if e == 0 {
            return Err(Error::BadParameter {
                name: "e",
                detail: "need e >= 1".into(),
            });
        }
        if e == 1 {
            if p > (1 << 31) {
                return Err(Error::BadParameter {
                    name: "p",
                    detail: format!("prime {p} too large"),
                });
            }
            return Ok(Arc::new(FqSpec {
                p,
                e: 1,
                q: p,
                base_modulus: Vec::new(),
                mul_table: Vec::new(),
                inv_table: Vec::new(),
            }));
        }

        let q = p.checked_pow(e).ok_or(Error::BadParameter {
            name: "e",
            detail: "p^e overflows".into(),
        })?;
        if q > EXTENSION_TABLE_CAP {
            return Err(Error::FieldTooLarge {
                size: q as u128,
                budget: EXTENSION_TABLE_CAP,
            });
        }
        if base_modulus.len() != e as usize + 1
            || base_modulus[e as usize] != 1
            || base_modulus.iter().any(|&c| c >= p)
        {
            return Err(Error::BadParameter {
                name: "base_modulus",
                detail: "need a monic degree-e coefficient vector over F_p".into(),
            });
        }
        {
            let prime = FqSpec::new(p, 1)?;
            let base = super::Poly::from_coeffs(&prime, base_modulus.to_vec());
            if !base.is_irreducible()? {
                return Err(Error::ModulusNotIrreducible);
            }
        }

        let mut spec = FqSpec {
            p,
            e,
            q,
            base_modulus: base_modulus.to_vec(),
            mul_table: Vec::new(),
            inv_table: Vec::new(),
        };
        spec.build_tables();
        Ok(Arc::new(spec))
    }

    fn build_tables(&mut self) {
        let q = self.q as usize;
        let e = self.e as usize;
        let p = self.p;
        let mut mul = vec![0u32; q * q];
        // Digit-vector product reduced mod the base modulus over F_p.
        let mut prod = vec![0u64; 2 * e];
        for a in 0..q as u64 {
            let da = self.digits(a);
            for b in a..q as u64 {
                let db = self.digits(b);
                prod.iter_mut().for_each(|c| *c = 0);
                for (i, &ca) in da.iter().enumerate() {
                    if ca == 0 {
                        continue;
                    }
                    for (j, &cb) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + ca * cb) % p;
                    }
                }
                for k in (e..2 * e).rev() {
                    let c = prod[k];
                    if c == 0 {
                        continue;
                    }
                    prod[k] = 0;
                    for (j, &m) in self.base_modulus[..e].iter().enumerate() {
                        // prod -= c * m * Y^{k-e+j}
                        let idx = k - e + j;
                        prod[idx] = (prod[idx] + p - (c * m) % p) % p;
                    }
                }
                let enc = self.undigits(&prod[..e]);
                mul[a as usize * q + b as usize] = enc as u32;
                mul[b as usize * q + a as usize] = enc as u32;
            }
        }
        let mut inv = vec![0u32; q];
        for a in 1..q {
            if inv[a] != 0 {
                continue;
            }
            for b in 1..q {
                if mul[a * q + b] == 1 {
                    inv[a] = b as u32;
                    inv[b] = a as u32;
                    break;
                }
            }
        }
        self.mul_table = mul;
        self.inv_table = inv;
    }

    fn digits(&self, mut a: u64) -> Vec<u64> {
        let mut out = vec![0u64; self.e as usize];
        for d in out.iter_mut() {
            *d = a % self.p;
            a /= self.p;
        }
        out
    }

    fn undigits(&self, digits: &[u64]) -> u64 {
        let mut acc = 0u64;
        for &d in digits.iter().rev() {
            acc = acc * self.p + d;
        }
        acc
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn e(&self) -> u32 {
        self.e
    }
    pub fn q(&self) -> u64 {
        self.q
    }
    /// Base modulus coefficients over F_p (empty for e = 1).
    pub fn base_modulus(&self) -> &[u64] {
        &self.base_modulus
    }
    pub fn is_odd(&self) -> bool {
        self.p != 2
    }

    /// Coordinates of `a` over F_p, lowest power first; inverse of
    /// [`FqSpec::encode`].
    pub fn decode(&self, a: u64) -> Vec<u64> {
        debug_assert!(a < self.q);
        self.digits(a)
    }

    pub fn encode(&self, coords: &[u64]) -> u64 {
        debug_assert!(coords.len() <= self.e as usize);
        debug_assert!(coords.iter().all(|&c| c < self.p));
        let mut acc = 0u64;
        for &d in coords.iter().rev() {
            acc = acc * self.p + d;
        }
        acc
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        if self.e == 1 {
            let s = a + b;
            if s >= self.p {
                s - self.p
            } else {
                s
            }
        } else {
            // Digit-wise over F_p; no carries between digits.
            let (mut x, mut y) = (a, b);
            let mut acc = 0u64;
            let mut place = 1u64;
            while x > 0 || y > 0 {
                let s = (x % self.p + y % self.p) % self.p;
                acc += s * place;
                place *= self.p;
                x /= self.p;
                y /= self.p;
            }
            acc
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if self.e == 1 {
            if a == 0 {
                0
            } else {
                self.p - a
            }
        } else {
            let mut x = a;
            let mut acc = 0u64;
            let mut place = 1u64;
            while x > 0 {
                let d = x % self.p;
                if d != 0 {
                    acc += (self.p - d) * place;
                }
                place *= self.p;
                x /= self.p;
            }
            acc
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if self.e == 1 {
            a * b % self.p
        } else {
            self.mul_table[(a * self.q + b) as usize] as u64
        }
    }

    pub fn inv(&self, a: u64) -> Result<u64> {
        if a == 0 {
            return Err(Error::ZeroDivisor);
        }
        if self.e == 1 {
            Ok(self.pow(a, self.p - 2))
        } else {
            Ok(self.inv_table[a as usize] as u64)
        }
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Trace down to the prime field: Tr_{F_q/F_p}(a), returned as an
    /// encoding in `[0, p)`.
    pub fn trace_to_prime(&self, a: u64) -> u64 {
        if self.e == 1 {
            return a;
        }
        let mut acc = 0u64;
        let mut frob = a;
        for _ in 0..self.e {
            acc = self.add(acc, frob);
            frob = self.pow(frob, self.p);
        }
        debug_assert!(acc < self.p, "trace must land in the prime subfield");
        acc
    }

    /// Shared-field check used by polynomial operations.
    pub fn same_field(&self, other: &FqSpec) -> bool {
        self == other
    }
}
