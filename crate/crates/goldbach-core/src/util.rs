//! Shared numeric plumbing: compensated summation, exact float products,
//! and deterministic parallel folds.

use num_complex::Complex64;
use rayon::prelude::*;

/// Kahan-Babuska-Neumaier compensated accumulator.
///
/// The running compensation keeps the absolute error of the final sum at
/// a few ulps of the largest partial sum, independent of the number of
/// terms. Every multi-term float sum in this crate goes through one of
/// these rather than a bare `+=`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// Fold another accumulator in, preserving both compensations.
    pub fn merge(&mut self, other: Kahan) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Componentwise compensated accumulator for complex sums.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanComplex {
    re: Kahan,
    im: Kahan,
}

impl KahanComplex {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn merge(&mut self, other: KahanComplex) {
        self.re.merge(other.re);
        self.im.merge(other.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Exact product split: returns (hi, lo) with hi + lo == a*b exactly.
/// hi is the rounded product; lo is the residual recovered by a fused
/// multiply-add.
#[inline]
pub fn two_product(a: f64, b: f64) -> (f64, f64) {
    let hi = a * b;
    let lo = a.mul_add(b, -hi);
    (hi, lo)
}

/// Serialize a float with 17 significant digits; round-trips every
/// finite f64 exactly, so emitted tables are stable byte-for-byte.
pub fn fmt_float(x: f64) -> String {
    format!("{:.16e}", x)
}

/// Split `0..n` into fixed-size chunks, map each chunk (possibly in
/// parallel), and return the per-chunk results in chunk order.
///
/// The chunk boundaries depend only on `n` and `chunk`, and the caller
/// folds the returned vector sequentially, so results are bit-identical
/// for any thread count.
pub fn par_chunk_map<T, F>(n: usize, chunk: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(std::ops::Range<usize>) -> T + Sync,
{
    assert!(chunk > 0);
    let starts: Vec<usize> = (0..n).step_by(chunk).collect();
    starts
        .into_par_iter()
        .map(|s| f(s..(s + chunk).min(n)))
        .collect()
}
