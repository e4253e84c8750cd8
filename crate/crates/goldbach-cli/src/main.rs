//! `goldbach`: command-line frontend for the ternary-Goldbach numerics
//! laboratory. Every subcommand prints machine-readable records (JSON
//! lines or CSV with a fixed header) or a loose human format; repeated
//! runs with the same flags and seed are byte-identical.

mod emit;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use emit::{render, Format, Rec, Val};
use goldbach_core::arcs::build_dissection;
use goldbach_core::arith::RationalPoint;
use goldbach_core::circle::{
    discrete_circle_with_cap, major_main_term, minor_sup_scan, split_r, GridSpec,
};
use goldbach_core::count::{count_reps_with, CountOptions, Params};
use goldbach_core::expsum::{prime_sum, UnitPoint};
use goldbach_core::primes::{
    make_window_with_cap, read_cache, sieve_range_with, write_cache, DEFAULT_SEGMENT_LEN,
    DEFAULT_SIEVE_CAP,
};
use goldbach_core::singular::{
    singular_euler, singular_truncated, truncation_decay_scan, MAX_SERIES_CUTOFF,
};
use goldbach_core::verify::{gap_scan, ratio_sweep, Rule, SweepConfig, SWEEP_CSV_HEADER};

#[derive(Parser)]
#[command(
    name = "goldbach",
    version,
    about = "Numerics laboratory for ternary Goldbach representations with a restricted small prime"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Seed for sampling commands; fixed seed means fixed output.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads (default: machine parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Hard cap on sieve endpoints.
    #[arg(long, global = true, env = "GOLDBACH_SIEVE_CAP")]
    sieve_cap: Option<u64>,

    /// Binary prime-cache file used by `primes`.
    #[arg(long, global = true, env = "GOLDBACH_SIEVE_CACHE")]
    sieve_cache: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum RouteArg {
    Series,
    Euler,
    Both,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sieve primes in the half-open range (lo, hi].
    Primes {
        #[arg(long)]
        lo: u64,
        #[arg(long)]
        hi: u64,
        /// Print only the summary record.
        #[arg(long)]
        count_only: bool,
    },
    /// Prime exponential sum S(x, h, a/q + beta) over the window (x-h, x].
    Expsum {
        #[arg(long)]
        x: u64,
        #[arg(long)]
        h: u64,
        /// Numerator of the rational center (reduced mod q on output).
        #[arg(long, default_value_t = 1)]
        a: i64,
        #[arg(long, default_value_t = 1)]
        q: u64,
        /// Real offset from the center.
        #[arg(long, default_value_t = 0.0)]
        beta: f64,
    },
    /// Major-arc dissection with denominator cutoff P and order Q.
    Arcs {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: u64,
    },
    /// Singular series by truncated series, Euler product, or both.
    Singular {
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value_t = RouteArg::Euler)]
        route: RouteArg,
        #[arg(long, default_value_t = 200_000.0)]
        cutoff: f64,
        /// Truncation cutoffs to scan, with an Euler reference and a
        /// fitted log-log decay slope.
        #[arg(long, value_delimiter = ',')]
        scan: Option<Vec<f64>>,
    },
    /// Count representations N = p1 + p2 + p3 on the standard windows.
    Count {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        y: u64,
        #[arg(long)]
        u: u64,
        /// Include the triple list in JSON output.
        #[arg(long)]
        emit_triples: bool,
    },
    /// Discrete circle-method average; optional major/minor split.
    Circle {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        y: u64,
        #[arg(long)]
        u: u64,
        /// Grid modulus (default: smallest admissible power of two).
        #[arg(long)]
        m: Option<u64>,
        /// Major-arc denominator cutoff P; enables the split.
        #[arg(long, requires = "q")]
        p: Option<f64>,
        /// Dissection order Q.
        #[arg(long, requires = "p")]
        q: Option<u64>,
        /// Sample the restricted window on the minor cover (needs --p/--q).
        #[arg(long, requires = "p")]
        minor_samples: Option<u64>,
    },
    /// Full pipeline (count, main term, ratios) over a grid of odd N.
    ///
    /// Config file: plain `key = value` lines; keys are n_grid
    /// (comma-separated ascending odd integers), y_rule, u_rule, output
    /// (CSV path), timing (on/off). Rules look like N/3, y/2, N^0.6,
    /// y^0.6, log^4, paper-regime(7/3,0.1), grh(0.1). Flags override
    /// file values; unknown keys are an error.
    RatioSweep {
        /// Key-value config file.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Comma-separated ascending odd N.
        #[arg(long, value_delimiter = ',')]
        n_grid: Option<Vec<u64>>,
        #[arg(long)]
        y_rule: Option<String>,
        #[arg(long)]
        u_rule: Option<String>,
        /// Also write the CSV table here.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Fill the ms column with wall-clock timings (breaks
        /// byte-for-byte reproducibility).
        #[arg(long)]
        timing: bool,
    },
    /// Minimal restricted prime p3 for every odd N in [lo, hi].
    GapScan {
        #[arg(long)]
        lo: u64,
        #[arg(long)]
        hi: u64,
        /// Cap rule that flags violations.
        #[arg(long, default_value = "log^4")]
        u_rule: String,
        /// Include per-N rows in JSON output (CSV always has them).
        #[arg(long)]
        rows: bool,
    },
}

enum CliError {
    Usage(String),
    Compute(String),
}

impl From<goldbach_core::Error> for CliError {
    fn from(e: goldbach_core::Error) -> CliError {
        CliError::Compute(e.to_string())
    }
}

type CliResult = Result<String, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global();
    }
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> CliResult {
    let cap = cli.sieve_cap.unwrap_or(DEFAULT_SIEVE_CAP);
    match &cli.cmd {
        Cmd::Primes { lo, hi, count_only } => cmd_primes(cli, cap, *lo, *hi, *count_only),
        Cmd::Expsum { x, h, a, q, beta } => cmd_expsum(cli, cap, *x, *h, *a, *q, *beta),
        Cmd::Arcs { p, q } => cmd_arcs(cli, *p, *q),
        Cmd::Singular {
            n,
            route,
            cutoff,
            scan,
        } => cmd_singular(cli, *n, *route, *cutoff, scan.as_deref()),
        Cmd::Count {
            n,
            y,
            u,
            emit_triples,
        } => cmd_count(cli, cap, *n, *y, *u, *emit_triples),
        Cmd::Circle {
            n,
            y,
            u,
            m,
            p,
            q,
            minor_samples,
        } => cmd_circle(cli, cap, *n, *y, *u, *m, *p, *q, *minor_samples),
        Cmd::RatioSweep {
            config,
            n_grid,
            y_rule,
            u_rule,
            output,
            timing,
        } => cmd_ratio_sweep(
            cli,
            config.as_deref(),
            n_grid.as_deref(),
            y_rule.as_deref(),
            u_rule.as_deref(),
            output.clone(),
            *timing,
        ),
        Cmd::GapScan {
            lo,
            hi,
            u_rule,
            rows,
        } => cmd_gap_scan(cli, *lo, *hi, u_rule, *rows),
    }
}

fn cmd_primes(cli: &Cli, cap: u64, lo: u64, hi: u64, count_only: bool) -> CliResult {
    let primes = match &cli.sieve_cache {
        Some(path) => match read_cache(path) {
            Ok((clo, chi, cached)) if clo == lo && chi == hi => cached,
            _ => {
                let fresh = sieve_range_with(lo, hi, cap, DEFAULT_SEGMENT_LEN)?;
                write_cache(path, lo, hi, &fresh)?;
                fresh
            }
        },
        None => sieve_range_with(lo, hi, cap, DEFAULT_SEGMENT_LEN)?,
    };
    let table: Vec<Rec> = if count_only {
        Vec::new()
    } else {
        primes
            .iter()
            .map(|&p| Rec(vec![("p", Val::U(p))]))
            .collect()
    };
    let summary = vec![Rec(vec![
        ("lo", Val::U(lo)),
        ("hi", Val::U(hi)),
        ("count", Val::U(primes.len() as u64)),
    ])];
    Ok(render(cli.format, "p", &table, &summary))
}

fn cmd_expsum(cli: &Cli, cap: u64, x: u64, h: u64, a: i64, q: u64, beta: f64) -> CliResult {
    let center = RationalPoint::reduce(a, q).map_err(|e| CliError::Usage(e.to_string()))?;
    let w = make_window_with_cap(x, h, cap)?;
    let z = prime_sum(&w, &UnitPoint::near(center, beta));
    let rec = Rec(vec![
        ("x", Val::U(x)),
        ("h", Val::U(h)),
        ("a", Val::U(center.numer())),
        ("q", Val::U(center.denom())),
        ("beta", Val::F(beta)),
        ("re", Val::F(z.re)),
        ("im", Val::F(z.im)),
    ]);
    Ok(render(cli.format, "x,h,a,q,beta,re,im", &[rec], &[]))
}

fn cmd_arcs(cli: &Cli, p: f64, q: u64) -> CliResult {
    let d = build_dissection(p, q)?;
    let table: Vec<Rec> = d
        .major
        .iter()
        .map(|arc| {
            Rec(vec![
                ("a", Val::U(arc.center.numer())),
                ("q", Val::U(arc.center.denom())),
                ("radius_num", Val::I(arc.radius.numer() as i64)),
                ("radius_den", Val::I(arc.radius.denom() as i64)),
            ])
        })
        .collect();
    let report = d.check_disjoint();
    let summary = vec![Rec(vec![
        ("arcs", Val::U(d.major.len() as u64)),
        ("disjoint", Val::B(report.disjoint)),
    ])];
    Ok(render(
        cli.format,
        "a,q,radius_num,radius_den",
        &table,
        &summary,
    ))
}

fn singular_rec(n: u64, route: &str, cutoff: f64, value: f64, tail: Option<f64>) -> Rec {
    Rec(vec![
        ("N", Val::U(n)),
        ("route", Val::S(route.into())),
        ("cutoff", Val::F(cutoff)),
        ("value", Val::F(value)),
        ("tail_bound", tail.map_or(Val::Null, Val::F)),
    ])
}

fn cmd_singular(
    cli: &Cli,
    n: u64,
    route: RouteArg,
    cutoff: f64,
    scan: Option<&[f64]>,
) -> CliResult {
    let check_series_cutoff = |c: f64| {
        if !(1.0..=MAX_SERIES_CUTOFF).contains(&c) {
            return Err(CliError::Usage(format!(
                "series cutoff must lie in [1, {MAX_SERIES_CUTOFF}], got {c}"
            )));
        }
        Ok(())
    };
    if let Some(cutoffs) = scan {
        for &c in cutoffs {
            check_series_cutoff(c)?;
        }
        let decay = truncation_decay_scan(n, cutoffs)?;
        let mut table = Vec::new();
        for &c in cutoffs {
            let sv = singular_truncated(n, c);
            table.push(singular_rec(n, "series", sv.cutoff, sv.value, None));
        }
        let r = &decay.reference;
        table.push(singular_rec(n, "euler", r.cutoff, r.value, r.tail_bound));
        let summary = vec![Rec(vec![("N", Val::U(n)), ("slope", Val::F(decay.slope))])];
        return Ok(render(
            cli.format,
            "N,route,cutoff,value,tail_bound",
            &table,
            &summary,
        ));
    }
    let mut table = Vec::new();
    if matches!(route, RouteArg::Series | RouteArg::Both) {
        check_series_cutoff(cutoff)?;
        let sv = singular_truncated(n, cutoff);
        table.push(singular_rec(n, "series", sv.cutoff, sv.value, None));
    }
    if matches!(route, RouteArg::Euler | RouteArg::Both) {
        let sv = singular_euler(n, cutoff as u64)?;
        table.push(singular_rec(n, "euler", sv.cutoff, sv.value, sv.tail_bound));
    }
    Ok(render(
        cli.format,
        "N,route,cutoff,value,tail_bound",
        &table,
        &[],
    ))
}

fn cmd_count(cli: &Cli, cap: u64, n: u64, y: u64, u: u64, emit_triples: bool) -> CliResult {
    let p = Params::new(n, y, u)?;
    let opts = CountOptions {
        keep_triples: emit_triples,
        sieve_cap: cap,
        ..CountOptions::default()
    };
    let rep = count_reps_with(&p, &opts)?;
    let mut fields = vec![
        ("N", Val::U(n)),
        ("y", Val::U(y)),
        ("U", Val::U(u)),
        ("unweighted", Val::U(rep.unweighted)),
        ("weighted", Val::F(rep.weighted)),
    ];
    if emit_triples {
        fields.push((
            "triples",
            match rep.triples {
                Some(ts) => Val::Triples(ts),
                None => Val::Null,
            },
        ));
    }
    Ok(render(
        cli.format,
        "N,y,U,unweighted,weighted",
        &[Rec(fields)],
        &[],
    ))
}

#[allow(clippy::too_many_arguments)]
fn cmd_circle(
    cli: &Cli,
    cap: u64,
    n: u64,
    y: u64,
    u: u64,
    m: Option<u64>,
    p_cut: Option<f64>,
    q_ord: Option<u64>,
    minor_samples: Option<u64>,
) -> CliResult {
    let params = Params::new(n, y, u)?;
    let g = m
        .map(GridSpec::new)
        .unwrap_or_else(|| GridSpec::for_params(&params));
    let mut summary = Vec::new();
    let rec = match (p_cut, q_ord) {
        (Some(p), Some(q)) => {
            let d = build_dissection(p, q)?;
            let split = split_r(&params, &d, g)?;
            if let Some(samples) = minor_samples {
                let scan = minor_sup_scan(u, &d, samples, cli.seed)?;
                summary.push(Rec(vec![
                    ("minor_sup", Val::F(scan.max_abs)),
                    ("weyl_shape", Val::F(scan.weyl_shape)),
                    ("sampled_arcs", Val::U(scan.arcs.len() as u64)),
                ]));
            }
            Rec(vec![
                ("total", Val::F(split.total)),
                ("major", Val::F(split.major)),
                ("minor", Val::F(split.minor)),
                ("main_term", Val::F(major_main_term(&params, p))),
                ("M", Val::U(g.m)),
            ])
        }
        _ => {
            let total = discrete_circle_with_cap(&params, g, cap)?;
            Rec(vec![
                ("total", Val::F(total)),
                ("major", Val::Null),
                ("minor", Val::Null),
                ("main_term", Val::Null),
                ("M", Val::U(g.m)),
            ])
        }
    };
    Ok(render(
        cli.format,
        "total,major,minor,main_term,M",
        &[rec],
        &summary,
    ))
}

#[derive(Default)]
struct FileConfig {
    n_grid: Option<Vec<u64>>,
    y_rule: Option<String>,
    u_rule: Option<String>,
    output: Option<PathBuf>,
    timing: Option<bool>,
}

fn parse_config_file(text: &str) -> Result<FileConfig, String> {
    let mut cfg = FileConfig::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = i + 1;
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {lineno}: expected `key = value`, got {line:?}"))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "n_grid" => {
                let grid: Result<Vec<u64>, _> =
                    value.split(',').map(|s| s.trim().parse::<u64>()).collect();
                cfg.n_grid = Some(grid.map_err(|e| format!("line {lineno}: bad n_grid: {e}"))?);
            }
            "y_rule" => cfg.y_rule = Some(value.to_string()),
            "u_rule" => cfg.u_rule = Some(value.to_string()),
            "output" => cfg.output = Some(PathBuf::from(value)),
            "timing" => {
                cfg.timing = Some(match value {
                    "on" | "true" => true,
                    "off" | "false" => false,
                    other => {
                        return Err(format!(
                            "line {lineno}: timing must be on/off/true/false, got {other:?}"
                        ))
                    }
                });
            }
            other => return Err(format!("line {lineno}: unknown key {other:?}")),
        }
    }
    Ok(cfg)
}

fn parse_rule(s: &str) -> Result<Rule, CliError> {
    s.parse::<Rule>()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn cmd_ratio_sweep(
    cli: &Cli,
    config: Option<&std::path::Path>,
    n_grid: Option<&[u64]>,
    y_rule: Option<&str>,
    u_rule: Option<&str>,
    output: Option<PathBuf>,
    timing: bool,
) -> CliResult {
    let file = match config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
            parse_config_file(&text)
                .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };
    let grid = n_grid
        .map(|g| g.to_vec())
        .or(file.n_grid)
        .ok_or_else(|| CliError::Usage("no N grid: pass --n-grid or a config file".into()))?;
    let y_rule = parse_rule(
        y_rule
            .or(file.y_rule.as_deref())
            .ok_or_else(|| CliError::Usage("no y rule: pass --y-rule or a config file".into()))?,
    )?;
    let u_rule = parse_rule(
        u_rule
            .or(file.u_rule.as_deref())
            .ok_or_else(|| CliError::Usage("no U rule: pass --u-rule or a config file".into()))?,
    )?;
    let mut cfg =
        SweepConfig::new(grid, y_rule, u_rule).map_err(|e| CliError::Usage(e.to_string()))?;
    cfg.output = output.or(file.output);
    cfg.timing = timing || file.timing.unwrap_or(false);
    let report = ratio_sweep(&cfg)?;
    if cli.format == Format::Csv {
        return Ok(report.to_csv());
    }
    let table: Vec<Rec> = report
        .rows
        .iter()
        .map(|r| {
            Rec(vec![
                ("N", Val::U(r.n)),
                ("y", Val::U(r.y)),
                ("U", Val::U(r.u)),
                ("unweighted", Val::U(r.unweighted)),
                ("weighted", Val::F(r.weighted)),
                ("main_term", Val::F(r.main_term)),
                ("ratio", Val::F(r.ratio)),
                ("weighted_ratio", Val::F(r.weighted_ratio)),
                ("ms", Val::U(r.ms)),
            ])
        })
        .collect();
    let mut summary: Vec<Rec> = report
        .skipped
        .iter()
        .map(|s| {
            Rec(vec![
                ("skipped_N", Val::U(s.n)),
                ("reason", Val::S(s.reason.clone())),
            ])
        })
        .collect();
    summary.push(Rec(vec![
        ("rows", Val::U(report.rows.len() as u64)),
        ("skipped", Val::U(report.skipped.len() as u64)),
    ]));
    Ok(render(cli.format, SWEEP_CSV_HEADER, &table, &summary))
}

fn cmd_gap_scan(cli: &Cli, lo: u64, hi: u64, u_rule: &str, rows: bool) -> CliResult {
    let rule = parse_rule(u_rule)?;
    let report = gap_scan(lo, hi, &rule)?;
    let table: Vec<Rec> = if rows || cli.format == Format::Csv {
        report
            .rows
            .iter()
            .map(|r| Rec(vec![("N", Val::U(r.n)), ("min_p3", Val::U(r.min_p3))]))
            .collect()
    } else {
        Vec::new()
    };
    let summary = vec![Rec(vec![
        ("n_lo", Val::U(report.n_lo)),
        ("n_hi", Val::U(report.n_hi)),
        ("count", Val::U(report.rows.len() as u64)),
        ("max_min_p3", Val::U(report.max_min_p3)),
        ("argmax_n", Val::U(report.argmax_n)),
        ("violations", Val::ListU(report.violations.clone())),
        ("unrepresented", Val::ListU(report.unrepresented.clone())),
    ])];
    Ok(render(cli.format, "N,min_p3", &table, &summary))
}
