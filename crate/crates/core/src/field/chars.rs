use super::{Elem, ResidueField};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_complex::Complex64;

impl ResidueField {
    /// Canonical additive character psi(x) = e_p(lift(Tr_{F_{q^r}/F_p}(x))).
    pub fn psi(&self, x: Elem) -> Complex64 {
        self.psi_root(self.trace_to_prime(x))
    }

    /// Twisted additive character psi_c(x) = psi(c x). With c = 0 this is
    /// the trivial character; every nontrivial character arises from a
    /// nonzero twist.
    pub fn additive_char(&self, c: Elem, x: Elem) -> Complex64 {
        self.psi(self.mul(c, x))
    }

    /// Multiplicative character of index `i`:
    /// chi_i(x) = e((i * log x) / (q^r - 1)) for x != 0, and 0 at x = 0
    /// (characters vanish off the unit group, including the principal
    /// character chi_0).
    pub fn mult_char(&self, index: u64, x: Elem) -> Result<Complex64> {
        let order = self.size() - 1;
        if index >= order {
            return Err(Error::CharIndexOutOfRange { index, order });
        }
        let Some(l) = self.log(x) else {
            return Ok(Complex64::new(0.0, 0.0));
        };
        let k = (index as u128 * l as u128 % order as u128) as u64;
        Ok(Complex64::from_polar(
            1.0,
            2.0 * std::f64::consts::PI * k as f64 / order as f64,
        ))
    }

    /// Quadratic character: x^{(q^r-1)/2} as +-1 for x != 0, 0 at x = 0.
    /// Needs odd q.
    pub fn quadratic_char(&self, x: Elem) -> Result<i8> {
        if !self.fq().is_odd() {
            return Err(Error::EvenCharacteristic);
        }
        match self.log(x) {
            None => Ok(0),
            Some(l) => Ok(if l % 2 == 0 { 1 } else { -1 }),
        }
    }

    /// Window-indicator character sum over the dual-basis span
    /// H = span{omega_h, ..., omega_{r-1}}: evaluates sum_{b in H} psi(b u)
    /// and rounds to the exact integer it provably is: q^{r-h} when u ~ h
    /// and 0 otherwise.
    pub fn dual_basis_indicator(&self, u: Elem, h: usize) -> Result<BigInt> {
        if h == 0 || h > self.r() {
            return Err(Error::WindowOutOfRange { m: h, r: self.r() });
        }
        let q = self.q();
        let span = self.dual_basis()[h..].to_vec();
        let combos = q.pow(span.len() as u32);
        let mut sum = Complex64::new(0.0, 0.0);
        for idx in 0..combos {
            let mut b = Elem::ZERO;
            let mut rest = idx;
            for &w in &span {
                let digit = rest % q;
                rest /= q;
                if digit != 0 {
                    b = self.add(b, self.mul(w, Elem::from_index(digit as usize)));
                }
            }
            sum += self.psi(self.mul(b, u));
        }
        let rounded = sum.re.round();
        let residue = (sum.re - rounded).abs().max(sum.im.abs());
        assert!(
            residue < 1e-6,
            "window-indicator sum {sum} is not integral (residue {residue:e})"
        );
        Ok(BigInt::from(rounded as i64))
    }
}
