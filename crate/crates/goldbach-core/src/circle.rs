//! The discrete circle method. Averaging S1*S2*S3*e(-Nk/M) over the
//! M-th roots of unity reconstructs the weighted representation count
//! exactly (not approximately) as soon as M > y + U, because every
//! frequency p1+p2+p3-N the triple product can produce lies strictly
//! inside (-M, M], and the root-of-unity average kills all of them
//! except zero.
//!
//! Two evaluation routes are kept deliberately separate: an FFT route
//! that computes each window sum at all grid points at once, and a
//! per-point direct route used as its oracle. The split into arc
//! families, the main-term comparison, the exact combinatorial
//! identity for the completion sum, and the discrete Parseval identity
//! all live here too.

use crate::arcs::{Classification, Dissection};
use crate::arith::RationalPoint;
use crate::count::Params;
use crate::error::{Error, Result};
use crate::expsum::{prime_sum, UnitPoint};
use crate::primes::{window_for_with_cap, PrimeWindow, WindowRole, DEFAULT_SIEVE_CAP};
use crate::singular::singular_truncated;
use crate::util::{par_chunk_map, Kahan, KahanComplex};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use std::f64::consts::TAU;

/// Largest accepted grid size; three complex arrays of this length is
/// about 400 MB, the desk-scale memory ceiling.
pub const MAX_GRID: u64 = 1 << 23;

/// The evaluation grid: the M points k/M, k = 0..M-1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridSpec {
    pub m: u64,
}

impl GridSpec {
    pub fn new(m: u64) -> GridSpec {
        GridSpec { m }
    }

    /// Smallest power of two exceeding 2(y + U): twice the exactness
    /// threshold, and a fast FFT length.
    pub fn for_params(p: &Params) -> GridSpec {
        GridSpec {
            m: (2 * (p.y() + p.u()) + 1).next_power_of_two(),
        }
    }

    fn validate(&self, p: &Params) -> Result<()> {
        let min = p.y() + p.u() + 1;
        if self.m < min {
            return Err(Error::GridTooSmall { m: self.m, min });
        }
        if self.m > MAX_GRID {
            return Err(Error::InvalidParams(format!(
                "grid size {} exceeds the desk-scale ceiling {MAX_GRID}",
                self.m
            )));
        }
        Ok(())
    }
}

/// All three prime windows of a parameter triple.
fn windows(p: &Params, cap: u64) -> Result<[PrimeWindow; 3]> {
    Ok([
        window_for_with_cap(WindowRole::Main, p.n(), p.y(), p.u(), cap)?,
        window_for_with_cap(WindowRole::Dyadic, p.n(), p.y(), p.u(), cap)?,
        window_for_with_cap(WindowRole::Restricted, p.n(), p.y(), p.u(), cap)?,
    ])
}

/// Window sums at every grid point by one length-M transform: the
/// window collapses to a weight vector indexed by p mod M, and the
/// unnormalized inverse DFT evaluates n -> sum of w[n] e(nk/M) at all
/// k simultaneously.
fn grid_values_fft(w: &PrimeWindow, m: u64) -> Vec<Complex64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); m as usize];
    for i in 0..w.len() {
        buf[(w.prime(i) % m) as usize].re += w.weight(i);
    }
    FftPlanner::new()
        .plan_fft_inverse(m as usize)
        .process(&mut buf);
    buf
}

/// Window sums at every grid point by direct per-point evaluation:
/// the oracle for the FFT route. Each point carries its exact
/// rational tag k/M, so the phases are exact.
fn grid_values_direct(w: &PrimeWindow, m: u64) -> Vec<Complex64> {
    (0..m)
        .map(|k| {
            let center = RationalPoint::reduce(k as i64, m).expect("m >= 1");
            prime_sum(w, &UnitPoint::near(center, 0.0))
        })
        .collect()
}

/// e(-N k / M) with the angle reduced exactly in integers first.
#[inline]
fn twist(n_mod_m: u64, k: u64, m: u64) -> Complex64 {
    let r = (n_mod_m as u128 * k as u128 % m as u128) as u64;
    let (s, c) = (-TAU * (r as f64 / m as f64)).sin_cos();
    Complex64::new(c, s)
}

/// Shared final stage: average the twisted triple product over the
/// grid, check the imaginary part is compatible with a real result,
/// return the real part.
fn averaged_triple(
    s1: &[Complex64],
    s2: &[Complex64],
    s3: &[Complex64],
    n: u64,
    m: u64,
) -> Result<f64> {
    let n_mod = n % m;
    let partials = par_chunk_map(m as usize, 1 << 14, |range| {
        let mut acc = KahanComplex::new();
        for k in range {
            let prod = s1[k] * s2[k] * s3[k] * twist(n_mod, k as u64, m);
            acc.add(prod);
        }
        acc.value()
    });
    let mut total = KahanComplex::new();
    for p in partials {
        total.add(p);
    }
    let v = total.value() / m as f64;
    if v.im.abs() > 1e-6 * (1.0 + v.re.abs()) {
        return Err(Error::Consistency(format!(
            "discrete circle average should be real, got imaginary part {:e}",
            v.im
        )));
    }
    Ok(v.re)
}

/// The weighted representation count R(N,y,U) recovered from the
/// exponential-sum product over the grid (FFT route).
pub fn discrete_circle(p: &Params, g: GridSpec) -> Result<f64> {
    discrete_circle_with_cap(p, g, DEFAULT_SIEVE_CAP)
}

pub fn discrete_circle_with_cap(p: &Params, g: GridSpec, cap: u64) -> Result<f64> {
    g.validate(p)?;
    let [w1, w2, w3] = windows(p, cap)?;
    let s1 = grid_values_fft(&w1, g.m);
    let s2 = grid_values_fft(&w2, g.m);
    let s3 = grid_values_fft(&w3, g.m);
    averaged_triple(&s1, &s2, &s3, p.n(), g.m)
}

/// Same value by the direct per-point route; the oracle for
/// [`discrete_circle`]. Costs O(M * window sizes).
pub fn discrete_circle_direct(p: &Params, g: GridSpec) -> Result<f64> {
    g.validate(p)?;
    let [w1, w2, w3] = windows(p, DEFAULT_SIEVE_CAP)?;
    let s1 = grid_values_direct(&w1, g.m);
    let s2 = grid_values_direct(&w2, g.m);
    let s3 = grid_values_direct(&w3, g.m);
    averaged_triple(&s1, &s2, &s3, p.n(), g.m)
}

/// The circle average split by arc family.
#[derive(Clone, Copy, Debug)]
pub struct SplitResult {
    pub total: f64,
    pub major: f64,
    pub minor: f64,
}

/// Split the discrete average into the contributions of grid points
/// lying on major arcs and the rest. Each k/M is classified as an
/// exact rational, so boundary points cannot wobble between families.
/// total = major + minor holds to rounding because the two parts are
/// accumulated from disjoint grid subsets.
pub fn split_r(p: &Params, d: &Dissection, g: GridSpec) -> Result<SplitResult> {
    g.validate(p)?;
    let [w1, w2, w3] = windows(p, DEFAULT_SIEVE_CAP)?;
    let s1 = grid_values_fft(&w1, g.m);
    let s2 = grid_values_fft(&w2, g.m);
    let s3 = grid_values_fft(&w3, g.m);
    let n_mod = p.n() % g.m;
    let m = g.m;
    let partials = par_chunk_map(m as usize, 1 << 12, |range| {
        let mut major = KahanComplex::new();
        let mut minor = KahanComplex::new();
        for k in range {
            let prod = s1[k] * s2[k] * s3[k] * twist(n_mod, k as u64, m);
            match d.classify_point(k as i128, m as i128) {
                Classification::Major(_) => major.add(prod),
                Classification::Minor => minor.add(prod),
            }
        }
        (major.value(), minor.value())
    });
    let mut major = KahanComplex::new();
    let mut minor = KahanComplex::new();
    for (ma, mi) in partials {
        major.add(ma);
        minor.add(mi);
    }
    let major = major.value() / m as f64;
    let minor = minor.value() / m as f64;
    let total = major + minor;
    if total.im.abs() > 1e-6 * (1.0 + total.re.abs()) {
        return Err(Error::Consistency(format!(
            "split circle average should be real, got imaginary part {:e}",
            total.im
        )));
    }
    Ok(SplitResult {
        total: total.re,
        major: major.re,
        minor: minor.re,
    })
}

/// The completion sum over the main window: each prime p1 is weighted
/// by the exact number of integer pairs (n2, n3) with y < n2 <= 2y,
/// 1 <= n3 <= U and n2 + n3 = N - p1, which is
///
///   max(0, min(U, N - y - p1 - 1)),
///
/// and twisted by e((p1 - N) a/q). (For N - y - p1 >= U + 1 the count
/// is U; below that the n2 window, open at y, admits one pair fewer
/// than the plain min(U, N - y - p1) would suggest.)
pub fn completion_sum(center: &RationalPoint, p: &Params) -> Result<Complex64> {
    let w1 = window_for_with_cap(WindowRole::Main, p.n(), p.y(), p.u(), DEFAULT_SIEVE_CAP)?;
    let (a, q) = (center.numer(), center.denom());
    let n_mod = p.n() % q;
    let mut acc = KahanComplex::new();
    for i in 0..w1.len() {
        let p1 = w1.prime(i);
        let slack = p.n() - p.y() - p1; // in [0, y): window order guarantees it
        let pairs = slack.saturating_sub(1).min(p.u());
        if pairs == 0 {
            continue;
        }
        let r = ((p1 % q + q - n_mod) % q) as u128 * a as u128 % q as u128;
        let angle = TAU * (r as f64 / q as f64);
        let (s, c) = angle.sin_cos();
        acc.add(w1.weight(i) * pairs as f64 * Complex64::new(c, s));
    }
    Ok(acc.value())
}

/// Truncated main term: singular_truncated(N, cutoff) * U * y.
pub fn major_main_term(p: &Params, cutoff: f64) -> f64 {
    singular_truncated(p.n(), cutoff).value * (p.u() as f64 * p.y() as f64)
}

#[derive(Clone, Copy, Debug)]
pub struct ParsevalReport {
    /// (1/M) sum over k of |S(k/M)|^2.
    pub lhs: f64,
    /// Sum over window primes of ln^2 p.
    pub rhs: f64,
    pub ok: bool,
}

/// Discrete Parseval identity for a window sum: with M > h no two
/// window primes collide modulo M, so the grid energy equals the
/// weight energy exactly. ok = agreement within 1e-8 relative.
pub fn parseval_check(w: &PrimeWindow, m: u64) -> Result<ParsevalReport> {
    if m <= w.h() {
        return Err(Error::GridTooSmall { m, min: w.h() + 1 });
    }
    if m > MAX_GRID {
        return Err(Error::InvalidParams(format!(
            "grid size {m} exceeds the desk-scale ceiling {MAX_GRID}"
        )));
    }
    let values = grid_values_fft(w, m);
    let mut energy = Kahan::new();
    for v in &values {
        energy.add(v.norm_sqr());
    }
    let lhs = energy.value() / m as f64;
    let mut rhs_acc = Kahan::new();
    for i in 0..w.len() {
        let lw = w.weight(i);
        rhs_acc.add(lw * lw);
    }
    let rhs = rhs_acc.value();
    let ok = (lhs - rhs).abs() <= 1e-8 * rhs;
    Ok(ParsevalReport { lhs, rhs, ok })
}

#[derive(Clone, Copy, Debug)]
pub struct MinorArcSample {
    pub center: RationalPoint,
    pub max_abs: f64,
    /// max_abs / ((sqrt(qU) + U/sqrt(q) + U^{4/5}) ln^3 U).
    pub shape_ratio: f64,
}

#[derive(Clone, Debug)]
pub struct MinorSupScan {
    pub max_abs: f64,
    /// Largest shape_ratio over all arcs: how the observed sup
    /// compares to the Weyl-type envelope (constant unknown, so this
    /// is diagnostic, not a pass/fail bound).
    pub weyl_shape: f64,
    pub arcs: Vec<MinorArcSample>,
}

/// Sample the restricted-prime window sum on random points of each
/// covering arc and report how the observed sup behaves against the
/// square-root-cancellation envelope. Deterministic for a fixed seed:
/// arc i draws from stream i of a counter-based generator, so thread
/// scheduling cannot reorder its samples.
pub fn minor_sup_scan(u: u64, d: &Dissection, samples: u64, seed: u64) -> Result<MinorSupScan> {
    if samples == 0 {
        return Err(Error::InvalidParams("need at least one sample".into()));
    }
    let w = crate::primes::make_window(u, u)?;
    let lnu3 = (u as f64).ln().powi(3);
    let uf = u as f64;
    let arcs: Vec<MinorArcSample> = d
        .minor_cover
        .iter()
        .enumerate()
        .map(|(i, arc)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let radius = arc.radius.to_f64();
            let mut max_abs = 0.0f64;
            for _ in 0..samples {
                let offset = rng.gen_range(-1.0..=1.0) * radius;
                let v = prime_sum(&w, &UnitPoint::near(arc.center, offset)).norm();
                max_abs = max_abs.max(v);
            }
            let q = arc.center.denom() as f64;
            let envelope = ((q * uf).sqrt() + uf / q.sqrt() + uf.powf(0.8)) * lnu3;
            MinorArcSample {
                center: arc.center,
                max_abs,
                shape_ratio: max_abs / envelope,
            }
        })
        .collect();
    let max_abs = arcs.iter().map(|a| a.max_abs).fold(0.0, f64::max);
    let weyl_shape = arcs.iter().map(|a| a.shape_ratio).fold(0.0, f64::max);
    Ok(MinorSupScan {
        max_abs,
        weyl_shape,
        arcs,
    })
}
