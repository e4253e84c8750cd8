//! Desk-scale experiments against the asymptotic predictions: main-term
//! ratios swept over parameter grids, the density-exponent bound for the
//! restricted prime, and Goldbach gap scans.
//!
//! Parameter rules (`Rule`) are small formula tags parsed from strings
//! like `N/3`, `y^0.6`, `log^4`, `paper-regime(7/3,0.1)`, or `grh(0.1)`;
//! every rule evaluates to an integer by truncation.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::count::{count_reps, ratio_of, Params};
use crate::error::{Error, Result};
use crate::singular::singular_euler;
use crate::util::{fmt_float, par_chunk_map};

/// Euler-product cutoff used for main terms; the tail bound at this
/// cutoff is below 1e-9 for every N in range.
pub const SINGULAR_CUTOFF: u64 = 200_000;

/// Largest admissible right endpoint for a gap scan; the even-Goldbach
/// bitmap and the prime bitset stay under ~25 MB combined.
pub const GAP_SCAN_CAP: u64 = 1 << 27;

/// Largest number of odd N a single gap scan may report on.
pub const MAX_GAP_ROWS: u64 = 4_000_000;

/// Fixed CSV header for ratio sweeps.
pub const SWEEP_CSV_HEADER: &str = "N,y,U,unweighted,weighted,main_term,ratio,weighted_ratio,ms";

/// Zero-density exponent pair (A, epsilon) controlling how small the
/// restricted prime may be taken.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityParams {
    a: f64,
    epsilon: f64,
}

impl DensityParams {
    /// Requires A >= 2 and epsilon > 0, both finite.
    pub fn new(a: f64, epsilon: f64) -> Result<DensityParams> {
        if !a.is_finite() || a < 2.0 {
            return Err(Error::InvalidParams(format!(
                "density exponent A must be a finite real >= 2, got {a}"
            )));
        }
        if !epsilon.is_finite() || epsilon <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "epsilon must be a finite real > 0, got {epsilon}"
            )));
        }
        Ok(DensityParams { a, epsilon })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

/// Exponent (1 - 1/A)(1 - 2/A) in the restricted-prime cap.
pub fn u_bound_exponent(dp: &DensityParams) -> f64 {
    (1.0 - 1.0 / dp.a) * (1.0 - 2.0 / dp.a)
}

/// Cap for the restricted prime under density exponent A:
/// N^{(1-1/A)(1-2/A)} * exp((ln N)^{2/3+epsilon}).
pub fn u_bound(n: u64, dp: &DensityParams) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidParams(format!(
            "u_bound needs N >= 3, got {n}"
        )));
    }
    let nf = n as f64;
    let ln_n = nf.ln();
    Ok(nf.powf(u_bound_exponent(dp)) * ln_n.powf(2.0 / 3.0 + dp.epsilon).exp())
}

/// Arc parameters P = (ln N)^{c1} and Q = U / (ln N)^{c2}. The exponents
/// are free subject to 8 < c1 < c2; the defaults are c1 = 9, c2 = 10.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArcPreset {
    c1: f64,
    c2: f64,
}

impl Default for ArcPreset {
    fn default() -> Self {
        ArcPreset { c1: 9.0, c2: 10.0 }
    }
}

impl ArcPreset {
    pub fn new(c1: f64, c2: f64) -> Result<ArcPreset> {
        if !c1.is_finite() || !c2.is_finite() || c1 <= 8.0 || c2 <= c1 {
            return Err(Error::InvalidParams(format!(
                "arc exponents need 8 < c1 < c2, got c1={c1}, c2={c2}"
            )));
        }
        Ok(ArcPreset { c1, c2 })
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    /// Major-arc denominator cutoff P = (ln N)^{c1}.
    pub fn major_cutoff(&self, n: u64) -> f64 {
        (n as f64).ln().powf(self.c1)
    }

    /// Dissection order Q = U / (ln N)^{c2}.
    pub fn dissection_order(&self, n: u64, u: u64) -> f64 {
        u as f64 / (n as f64).ln().powf(self.c2)
    }
}

/// Formula tag mapping N (and optionally y) to an integer parameter.
#[derive(Clone, Debug, PartialEq)]
pub enum Rule {
    /// floor(N/k).
    FractionOfN { k: u64 },
    /// floor(y/k); only valid where y is already fixed.
    FractionOfY { k: u64 },
    /// floor(N^theta).
    PowerOfN { theta: f64 },
    /// floor(y^theta); only valid where y is already fixed.
    PowerOfY { theta: f64 },
    /// floor((ln N)^k).
    LogPower { k: f64 },
    /// floor of the density-regime cap u_bound(N, (A, epsilon)).
    PaperRegime { a: f64, epsilon: f64 },
    /// floor(sqrt(N) * (ln N)^{2+epsilon}). The source statement leaves
    /// the argument of the log implicit; this preset takes it to be N.
    GrhEndpoint { epsilon: f64 },
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::FractionOfN { k } => write!(f, "N/{k}"),
            Rule::FractionOfY { k } => write!(f, "y/{k}"),
            Rule::PowerOfN { theta } => write!(f, "N^{theta}"),
            Rule::PowerOfY { theta } => write!(f, "y^{theta}"),
            Rule::LogPower { k } => write!(f, "log^{k}"),
            Rule::PaperRegime { a, epsilon } => write!(f, "paper-regime({a},{epsilon})"),
            Rule::GrhEndpoint { epsilon } => write!(f, "grh({epsilon})"),
        }
    }
}

fn parse_positive_f64(s: &str, what: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::InvalidParams(format!("cannot parse {what} from {s:?}")))?;
    if !v.is_finite() || v <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "{what} must be a finite positive real, got {s:?}"
        )));
    }
    Ok(v)
}

/// Parse a real that may be written as a fraction, e.g. "7/3".
fn parse_real_or_fraction(s: &str) -> Result<f64> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n = parse_positive_f64(num, "fraction numerator")?;
        let d = parse_positive_f64(den, "fraction denominator")?;
        return Ok(n / d);
    }
    parse_positive_f64(s, "real parameter")
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Rule> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("paper-regime(") {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| Error::InvalidParams(format!("unterminated rule {s:?}")))?;
            let (a_str, eps_str) = inner.split_once(',').ok_or_else(|| {
                Error::InvalidParams(format!("paper-regime needs (A,epsilon), got {s:?}"))
            })?;
            let a = parse_real_or_fraction(a_str)?;
            let epsilon = parse_positive_f64(eps_str, "epsilon")?;
            let dp = DensityParams::new(a, epsilon)?;
            return Ok(Rule::PaperRegime {
                a: dp.a(),
                epsilon: dp.epsilon(),
            });
        }
        if let Some(rest) = s.strip_prefix("grh(") {
            let inner = rest
                .strip_suffix(')')
                .ok_or_else(|| Error::InvalidParams(format!("unterminated rule {s:?}")))?;
            let epsilon = parse_positive_f64(inner, "epsilon")?;
            return Ok(Rule::GrhEndpoint { epsilon });
        }
        if let Some(rest) = s.strip_prefix("log^") {
            let k = parse_positive_f64(rest, "log exponent")?;
            return Ok(Rule::LogPower { k });
        }
        for (prefix, frac, pow) in [
            ("N/", true, false),
            ("y/", true, false),
            ("N^", false, true),
            ("y^", false, true),
        ] {
            if let Some(rest) = s.strip_prefix(prefix) {
                let of_n = prefix.starts_with('N');
                if frac {
                    let k: u64 = rest.trim().parse().map_err(|_| {
                        Error::InvalidParams(format!("cannot parse divisor from {s:?}"))
                    })?;
                    if k == 0 {
                        return Err(Error::InvalidParams("divisor must be >= 1".into()));
                    }
                    return Ok(if of_n {
                        Rule::FractionOfN { k }
                    } else {
                        Rule::FractionOfY { k }
                    });
                }
                if pow {
                    let theta = parse_positive_f64(rest, "exponent")?;
                    return Ok(if of_n {
                        Rule::PowerOfN { theta }
                    } else {
                        Rule::PowerOfY { theta }
                    });
                }
            }
        }
        Err(Error::InvalidParams(format!(
            "unrecognized rule {s:?}; expected one of N/k, y/k, N^t, y^t, log^k, \
             paper-regime(A,eps), grh(eps)"
        )))
    }
}

impl Rule {
    /// Evaluate at N, with y supplied where the rule references it.
    pub fn eval(&self, n: u64, y: Option<u64>) -> Result<u64> {
        if n == 0 {
            return Err(Error::InvalidParams("rule evaluation needs N >= 1".into()));
        }
        let need_y = |y: Option<u64>| {
            y.ok_or_else(|| {
                Error::InvalidParams(format!("rule {self} references y, which is not fixed here"))
            })
        };
        let nf = n as f64;
        let val = match self {
            Rule::FractionOfN { k } => return Ok(n / k),
            Rule::FractionOfY { k } => return Ok(need_y(y)? / k),
            Rule::PowerOfN { theta } => nf.powf(*theta),
            Rule::PowerOfY { theta } => (need_y(y)? as f64).powf(*theta),
            Rule::LogPower { k } => nf.ln().powf(*k),
            Rule::PaperRegime { a, epsilon } => u_bound(n, &DensityParams::new(*a, *epsilon)?)?,
            Rule::GrhEndpoint { epsilon } => nf.sqrt() * nf.ln().powf(2.0 + epsilon),
        };
        if !val.is_finite() || val >= u64::MAX as f64 {
            return Err(Error::InvalidParams(format!(
                "rule {self} overflows at N = {n}"
            )));
        }
        Ok(val.floor() as u64)
    }
}

/// Main term S(N) * U * y / (ln U * ln y * ln N), with the singular
/// series taken from the Euler product at `SINGULAR_CUTOFF`. Exactly 0
/// for even N.
pub fn main_term(p: &Params) -> Result<f64> {
    let (n, y, u) = (p.n(), p.y(), p.u());
    if u < 3 || y < 3 || n < 3 {
        return Err(Error::DegenerateLog { n, y, u });
    }
    let s = singular_euler(n, SINGULAR_CUTOFF)?;
    debug_assert!(matches!(s.tail_bound, Some(t) if t < 1e-9));
    let logs = (u as f64).ln() * (y as f64).ln() * (n as f64).ln();
    Ok(s.value * u as f64 * y as f64 / logs)
}

/// Unweighted count divided by the main term; errors when the main term
/// vanishes (even N).
pub fn asymptotic_ratio(p: &Params) -> Result<f64> {
    let mt = main_term(p)?;
    if mt <= 0.0 {
        return Err(Error::ZeroMainTerm { n: p.n() });
    }
    let rep = count_reps(p)?;
    Ok(rep.unweighted as f64 / mt)
}

/// Sweep configuration: an ascending grid of odd N plus rules fixing
/// y and U per grid point.
#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub n_grid: Vec<u64>,
    pub y_rule: Rule,
    pub u_rule: Rule,
    /// When set, `ratio_sweep` also writes the CSV table to this path.
    pub output: Option<std::path::PathBuf>,
    /// Fill the ms column with wall-clock timings. Off by default so
    /// repeated runs stay byte-identical.
    pub timing: bool,
}

impl SweepConfig {
    pub fn new(n_grid: Vec<u64>, y_rule: Rule, u_rule: Rule) -> Result<SweepConfig> {
        for w in n_grid.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidParams(format!(
                    "N grid must be strictly ascending, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        if let Some(n) = n_grid.iter().find(|n| *n % 2 == 0) {
            return Err(Error::InvalidParams(format!("N grid must be odd, got {n}")));
        }
        Ok(SweepConfig {
            n_grid,
            y_rule,
            u_rule,
            output: None,
            timing: false,
        })
    }
}

/// One completed sweep row. `weighted_ratio` is NaN when the count is
/// zero (the diagnostic ratio is undefined there, but the row is data).
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub n: u64,
    pub y: u64,
    pub u: u64,
    pub unweighted: u64,
    pub weighted: f64,
    pub main_term: f64,
    pub ratio: f64,
    pub weighted_ratio: f64,
    pub ms: u64,
}

/// Grid entry whose pipeline failed; the sweep records it and moves on.
#[derive(Clone, Debug)]
pub struct SkippedEntry {
    pub n: u64,
    pub reason: String,
}

#[derive(Clone, Debug, Default)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub skipped: Vec<SkippedEntry>,
}

impl SweepReport {
    /// CSV table with the fixed header; rows in grid order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(SWEEP_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                r.n,
                r.y,
                r.u,
                r.unweighted,
                fmt_float(r.weighted),
                fmt_float(r.main_term),
                fmt_float(r.ratio),
                fmt_float(r.weighted_ratio),
                r.ms,
            ));
        }
        out
    }
}

fn sweep_row(n: u64, cfg: &SweepConfig) -> std::result::Result<SweepRow, String> {
    let start = Instant::now();
    let err = |e: Error| e.to_string();
    let y = cfg.y_rule.eval(n, None).map_err(err)?;
    let u = cfg.u_rule.eval(n, Some(y)).map_err(err)?;
    let p = Params::new(n, y, u).map_err(err)?;
    let mt = main_term(&p).map_err(err)?;
    if mt <= 0.0 {
        return Err(err(Error::ZeroMainTerm { n }));
    }
    let rep = count_reps(&p).map_err(err)?;
    let weighted_ratio = ratio_of(&rep).unwrap_or(f64::NAN);
    Ok(SweepRow {
        n,
        y,
        u,
        unweighted: rep.unweighted,
        weighted: rep.weighted,
        main_term: mt,
        ratio: rep.unweighted as f64 / mt,
        weighted_ratio,
        ms: if cfg.timing {
            start.elapsed().as_millis() as u64
        } else {
            0
        },
    })
}

/// Run the full pipeline at every grid point. Rows parallelize across
/// the grid and are reported in grid order; failed entries land in
/// `skipped` and the sweep continues.
pub fn ratio_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    let probe = SweepConfig::new(cfg.n_grid.clone(), cfg.y_rule.clone(), cfg.u_rule.clone())?;
    drop(probe);
    let results = par_chunk_map(cfg.n_grid.len(), 1, |range| {
        let n = cfg.n_grid[range.start];
        (n, sweep_row(n, cfg))
    });
    let mut report = SweepReport::default();
    for (n, res) in results {
        match res {
            Ok(row) => report.rows.push(row),
            Err(reason) => report.skipped.push(SkippedEntry { n, reason }),
        }
    }
    if let Some(path) = &cfg.output {
        std::fs::write(path, report.to_csv())?;
    }
    Ok(report)
}

/// Plain bitset; bit i set means membership of i.
struct Bits {
    words: Vec<u64>,
}

impl Bits {
    fn zeros(len: usize) -> Bits {
        Bits {
            words: vec![0; len.div_ceil(64)],
        }
    }

    fn ones(len: usize) -> Bits {
        Bits {
            words: vec![!0u64; len.div_ceil(64)],
        }
    }

    #[inline]
    fn set(&mut self, i: usize) {
        self.words[i >> 6] |= 1 << (i & 63);
    }

    #[inline]
    fn clear(&mut self, i: usize) {
        self.words[i >> 6] &= !(1 << (i & 63));
    }

    #[inline]
    fn get(&self, i: usize) -> bool {
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }
}

fn prime_bits(limit: u64) -> Bits {
    let n = limit as usize;
    let mut b = Bits::ones(n + 1);
    b.clear(0);
    if n >= 1 {
        b.clear(1);
    }
    let mut p = 2usize;
    while p * p <= n {
        if b.get(p) {
            let mut m = p * p;
            while m <= n {
                b.clear(m);
                m += p;
            }
        }
        p += 1;
    }
    b
}

/// Bitmap over even n <= limit (bit n/2) marking sums of two primes.
/// Built in one pass: for each even n, scan small primes p ascending and
/// stop at the first prime n - p; a full fallback scan keeps the map
/// exact if the small list is ever exhausted.
fn goldbach_bits(limit: u64, is_prime: &Bits) -> Bits {
    let small: Vec<u64> = crate::primes::simple_sieve(limit.min(10_000));
    let mut g = Bits::zeros((limit / 2 + 1) as usize);
    let mut n = 4u64;
    while n <= limit {
        let mut hit = false;
        for &p in &small {
            if p + 2 > n {
                break;
            }
            if is_prime.get((n - p) as usize) {
                hit = true;
                break;
            }
        }
        if !hit && n > 2 * *small.last().unwrap_or(&0) {
            let mut q = 3u64;
            while 2 * q <= n {
                if is_prime.get(q as usize) && is_prime.get((n - q) as usize) {
                    hit = true;
                    break;
                }
                q += 2;
            }
        }
        if hit {
            g.set((n / 2) as usize);
        }
        n += 2;
    }
    g
}

/// Minimal prime p3 with n - p3 a sum of two primes, for odd n. The
/// p3 = 2 case needs odd n - 2 = 2 + (n - 4), i.e. n - 4 prime; every
/// larger candidate leaves an even difference answered by the bitmap.
fn minimal_p3(n: u64, is_prime: &Bits, gold: &Bits) -> Option<u64> {
    if n >= 6 && is_prime.get((n - 4) as usize) {
        return Some(2);
    }
    let mut p3 = 3u64;
    while p3 + 4 <= n {
        if is_prime.get(p3 as usize) && gold.get(((n - p3) / 2) as usize) {
            return Some(p3);
        }
        p3 += 2;
    }
    None
}

#[derive(Clone, Debug)]
pub struct GapRow {
    pub n: u64,
    pub min_p3: u64,
}

#[derive(Clone, Debug)]
pub struct GapScanReport {
    /// Normalized odd endpoints actually scanned.
    pub n_lo: u64,
    pub n_hi: u64,
    pub rows: Vec<GapRow>,
    pub max_min_p3: u64,
    /// The N attaining max_min_p3.
    pub argmax_n: u64,
    /// N whose minimal p3 exceeds the rule's cap.
    pub violations: Vec<u64>,
    /// N with no three-prime representation at all (never expected).
    pub unrepresented: Vec<u64>,
}

/// Scan odd N in [n_lo, n_hi] for the minimal restricted prime p3 and
/// flag N where it exceeds `u_rule(N)`. Even endpoints are moved inward
/// to the nearest odd integer.
pub fn gap_scan(n_lo: u64, n_hi: u64, u_rule: &Rule) -> Result<GapScanReport> {
    if n_hi > GAP_SCAN_CAP {
        return Err(Error::SieveLimit {
            lo: n_lo,
            hi: n_hi,
            cap: GAP_SCAN_CAP,
        });
    }
    let lo = if n_lo % 2 == 0 { n_lo + 1 } else { n_lo };
    let hi = if n_hi % 2 == 0 {
        n_hi.saturating_sub(1)
    } else {
        n_hi
    };
    if lo < 7 {
        return Err(Error::InvalidParams(format!(
            "gap scan starts at N = 7, the smallest odd sum of three primes; got {n_lo}"
        )));
    }
    if lo > hi {
        return Err(Error::InvalidParams(format!(
            "empty gap-scan range [{n_lo}, {n_hi}]"
        )));
    }
    let span = (hi - lo) / 2 + 1;
    if span > MAX_GAP_ROWS {
        return Err(Error::InvalidParams(format!(
            "gap scan covers {span} odd N, above the cap {MAX_GAP_ROWS}; narrow the window"
        )));
    }
    let is_prime = prime_bits(hi);
    let gold = goldbach_bits(hi, &is_prime);
    let mut report = GapScanReport {
        n_lo: lo,
        n_hi: hi,
        rows: Vec::with_capacity(span as usize),
        max_min_p3: 0,
        argmax_n: 0,
        violations: Vec::new(),
        unrepresented: Vec::new(),
    };
    let mut n = lo;
    while n <= hi {
        match minimal_p3(n, &is_prime, &gold) {
            Some(p3) => {
                if p3 > report.max_min_p3 {
                    report.max_min_p3 = p3;
                    report.argmax_n = n;
                }
                if p3 > u_rule.eval(n, None)? {
                    report.violations.push(n);
                }
                report.rows.push(GapRow { n, min_p3: p3 });
            }
            None => report.unrepresented.push(n),
        }
        n += 2;
    }
    Ok(report)
}
