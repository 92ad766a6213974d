//! Exact arithmetic for polynomials over F_q, q = p^e.
//!
//! Elements of F_q are encoded as integers in `[0, q)` via base-p digit
//! expansion of their coordinate sequence over F_p, so encodings round-trip
//! with decodings and fix a canonical element order. For e > 1 the field is
//! realized as F_p\[Y\]/(base_modulus) with the base modulus the monic
//! irreducible of degree e with the smallest encoding.

mod factor;
mod fq;
mod poly;

pub use factor::Factorization;
pub use fq::FqSpec;
pub use poly::Poly;

use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint};
use std::sync::Arc;

/// Number of monic irreducibles of degree `n` over F_q, by the Gauss/Moebius
/// formula `(1/n) * sum_{d | n} mu(d) q^{n/d}`, in exact big-integer
/// arithmetic.
pub fn count_irreducibles(fq: &FqSpec, n: usize) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::BadParameter {
            name: "n",
            detail: "need n >= 1".into(),
        });
    }
    let q = BigInt::from(fq.q());
    let mut total = BigInt::from(0u32);
    for d in 1..=n {
        if !n.is_multiple_of(d) {
            continue;
        }
        let mu = integer_mobius(d as u64);
        if mu == 0 {
            continue;
        }
        total += BigInt::from(mu) * q.pow((n / d) as u32);
    }
    let n_big = BigInt::from(n as u64);
    let quot = &total / &n_big;
    debug_assert!(
        &total - &quot * &n_big == BigInt::from(0u32),
        "Gauss formula must divide evenly"
    );
    quot.try_into().map_err(|_| Error::BadParameter {
        name: "n",
        detail: "negative irreducible count".into(),
    })
}

/// Classical Moebius function on integers (trial division; n is tiny here).
fn integer_mobius(mut n: u64) -> i64 {
    let mut k = 0;
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            n /= d;
            if n.is_multiple_of(d) {
                return 0;
            }
            k += 1;
        }
        d += 1;
    }
    if n > 1 {
        k += 1;
    }
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

/// All monic polynomials of degree exactly `n`, in canonical encoding order.
pub fn enumerate_monic(fq: &Arc<FqSpec>, n: usize) -> impl Iterator<Item = Poly> + '_ {
    let count = (fq.q() as u128).pow(n as u32);
    let fq = Arc::clone(fq);
    (0..count).map(move |lower| Poly::monic_from_lower(&fq, n, lower))
}

/// All monic irreducibles of degree exactly `n` (the set P_n), canonical order.
pub fn enumerate_irreducibles(
    fq: &Arc<FqSpec>,
    n: usize,
) -> Result<impl Iterator<Item = Poly> + '_> {
    if n == 0 {
        return Err(Error::BadParameter {
            name: "n",
            detail: "need n >= 1".into(),
        });
    }
    Ok(enumerate_monic(fq, n).filter(|f| f.is_irreducible().unwrap_or(false)))
}

/// All monic square-free polynomials of degree exactly `n` (the set S_n),
/// canonical order.
pub fn enumerate_squarefree_monic(
    fq: &Arc<FqSpec>,
    n: usize,
) -> Result<impl Iterator<Item = Poly> + '_> {
    if n == 0 {
        return Err(Error::BadParameter {
            name: "n",
            detail: "need n >= 1".into(),
        });
    }
    Ok(enumerate_monic(fq, n).filter(|f| f.is_squarefree().unwrap_or(false)))
}

/// Smallest-encoding monic irreducible of degree `n` over F_q.
pub fn smallest_irreducible(fq: &Arc<FqSpec>, n: usize) -> Result<Poly> {
    enumerate_irreducibles(fq, n)?
        .next()
        .ok_or(Error::ModulusNotIrreducible)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_mobius_small() {
        let expected = [
            (1, 1),
            (2, -1),
            (3, -1),
            (4, 0),
            (5, -1),
            (6, 1),
            (12, 0),
            (30, -1),
        ];
        for (n, mu) in expected {
            assert_eq!(integer_mobius(n), mu, "mu({n})");
        }
    }

    #[test]
    fn gauss_formula_examples() {
        let f3 = FqSpec::new(3, 1).unwrap();
        assert_eq!(count_irreducibles(&f3, 1).unwrap(), BigUint::from(3u32));
        assert_eq!(count_irreducibles(&f3, 2).unwrap(), BigUint::from(3u32));
        assert_eq!(count_irreducibles(&f3, 3).unwrap(), BigUint::from(8u32));
        assert_eq!(count_irreducibles(&f3, 4).unwrap(), BigUint::from(18u32));
    }
}
