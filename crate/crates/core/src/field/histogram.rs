use super::Elem;
use num_bigint::BigUint;

/// Exact counting table keyed by element encoding. Cell counts stay within
/// u64 because every enumeration that feeds a histogram is budget-guarded
/// far below 2^63 tuples; aggregates are returned as big integers.
#[derive(Clone, Debug)]
pub struct Histogram {
    counts: Vec<u64>,
}

impl Histogram {
    pub fn new(size: u64) -> Histogram {
        Histogram {
            counts: vec![0; size as usize],
        }
    }

    #[inline]
    pub fn incr(&mut self, key: Elem) {
        self.counts[key.index()] += 1;
    }

    pub fn add(&mut self, key: Elem, by: u64) {
        self.counts[key.index()] += by;
    }

    pub fn get(&self, key: Elem) -> u64 {
        self.counts[key.index()]
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Total mass: the number of enumerated tuples.
    pub fn total(&self) -> BigUint {
        self.counts
            .iter()
            .fold(BigUint::from(0u32), |acc, &c| acc + c)
    }

    pub fn sum_of_squares(&self) -> BigUint {
        self.counts.iter().fold(BigUint::from(0u32), |acc, &c| {
            acc + BigUint::from(c) * BigUint::from(c)
        })
    }

    /// Key-ordered merge, so parallel per-task histograms combine
    /// deterministically.
    pub fn merge(&mut self, other: &Histogram) {
        assert_eq!(self.counts.len(), other.counts.len());
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts.iter().enumerate().map(|(i, &c)| (i as u64, c))
    }
}
