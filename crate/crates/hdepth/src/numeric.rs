//! Small numeric helpers: tolerances, compensated summation, and the
//! lexicographic point order used for deterministic tie-breaking.

use std::cmp::Ordering;

use nalgebra::DVector;

/// Absolute band inside which a signed offset is treated as zero (a point
/// counts as lying on a hyperplane). Also used when merging coincident
/// hyperplanes and slab boundaries.
pub const ZERO_BAND: f64 = 1e-12;

/// Relative tolerance for comparing depths, residuals, and coordinates
/// produced by different evaluation paths.
pub const REL_TOL: f64 = 1e-9;

/// Neumaier-compensated accumulator. Addition order still matters for the
/// last bits, so callers must feed terms in a fixed order to stay
/// reproducible; the compensation just keeps long sums accurate.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Sums an iterator with compensation, in iteration order.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut acc = CompensatedSum::new();
    for x in terms {
        acc.add(x);
    }
    acc.value()
}

/// Lexicographic order on coordinate vectors. All inputs are finite, so
/// `partial_cmp` cannot fail.
pub fn lex_cmp(a: &DVector<f64>, b: &DVector<f64>) -> Ordering {
    debug_assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(b.iter()) {
        match x.partial_cmp(y).expect("finite coordinates") {
            Ordering::Equal => continue,
            ord => return ord,
        }
    }
    Ordering::Equal
}

/// `true` when `a` and `b` agree to `REL_TOL`, relative to their magnitude.
pub fn nearly_equal(a: f64, b: f64) -> bool {
    (a - b).abs() <= REL_TOL * (1.0 + a.abs().max(b.abs()))
}

/// Binomial coefficient as an exact `u64`; panics on overflow, which is out
/// of range for the desk-scale inputs this crate targets.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc
            .checked_mul(n - i)
            .expect("binomial overflow")
            / (i + 1);
    }
    acc
}
