use super::Elem;
use crate::error::{Error, Result};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Name of the seeded weight generator, recorded in report metadata.
pub const WEIGHT_GENERATOR: &str = "chacha8";

/// A complex weight sequence supported on a degree window: values indexed by
/// element encoding below q^m. Everything outside the window weighs 0.
#[derive(Clone, Debug)]
pub struct Weight {
    window: usize,
    values: Vec<Complex64>,
}

impl Weight {
    pub fn from_values(q: u64, window: usize, values: Vec<Complex64>) -> Result<Weight> {
        let expect = q.pow(window as u32) as usize;
        if values.len() != expect {
            return Err(Error::BadParameter {
                name: "weights",
                detail: format!("need q^m = {expect} values, got {}", values.len()),
            });
        }
        Ok(Weight { window, values })
    }

    /// The characteristic function 1_m of the window.
    pub fn indicator(q: u64, window: usize) -> Weight {
        Weight {
            window,
            values: vec![Complex64::new(1.0, 0.0); q.pow(window as u32) as usize],
        }
    }

    /// A single unit mass at one element.
    pub fn delta(q: u64, window: usize, at: Elem, value: Complex64) -> Weight {
        let mut values = vec![Complex64::new(0.0, 0.0); q.pow(window as u32) as usize];
        values[at.index()] = value;
        Weight { window, values }
    }

    /// Seeded random weights: independent real and imaginary components
    /// uniform on [-1, 1], drawn in encoding order from ChaCha8.
    pub fn random(q: u64, window: usize, seed: u64) -> Weight {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = q.pow(window as u32) as usize;
        let values = (0..n)
            .map(|_| {
                let re = rng.gen_range(-1.0..=1.0);
                let im = rng.gen_range(-1.0..=1.0);
                Complex64::new(re, im)
            })
            .collect();
        Weight { window, values }
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Weight of an element; 0 outside the window.
    #[inline]
    pub fn get(&self, x: Elem) -> Complex64 {
        self.values
            .get(x.index())
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// True when every value is exactly 0 or 1, so exact integer counting
    /// applies.
    pub fn is_binary(&self) -> bool {
        self.values
            .iter()
            .all(|v| v.im == 0.0 && (v.re == 0.0 || v.re == 1.0))
    }

    pub fn l1(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).sum()
    }

    pub fn l2(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn linf(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn conj(&self) -> Weight {
        Weight {
            window: self.window,
            values: self.values.iter().map(|v| v.conj()).collect(),
        }
    }
}
