use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use alphacf::automaton::build_automaton;
use alphacf::dynamics::{boundaries_of, by_excess_expansion, orbit, periodic_char_seq, rcf_digits, synchronize, SyncStatus, MAX_ITER};
use alphacf::export::{self, exact_json, SvgStyle};
use alphacf::natext::{measure_bracket, omega_decomposition, DEFAULT_DEPTH};
use alphacf::simulation::{mc_entropy, simulate_domain, McConfig, Precision};
use alphacf::words::{interval_data, tau, theta, THETA_WORD_CAP};
use alphacf::{hiprec, Error, ExactNumber, Word};
use astro_float::RoundingMode;
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

#[derive(Parser)]
#[command(name = "alphacf", version, about = "Alpha-continued fractions and their natural extensions")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Output format (defaults depend on the command).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for parallel commands (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
    Svg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Alpha,
    Rcf,
    Excess,
}

#[derive(Subcommand)]
enum Cmd {
    /// Digits and orbit points of x.
    Expand {
        #[arg(long, default_value = "1")]
        alpha: String,
        /// Starting point; may use `a` for alpha, e.g. `a-1`.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[arg(long, value_enum, default_value = "alpha")]
        mode: Mode,
    },
    /// Synchronization status of alpha.
    Sync {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = MAX_ITER)]
        max_iter: usize,
    },
    /// Certified bracket of the natural-extension measure.
    Measure {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Entropy bracket from the measure bracket.
    Entropy {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Monte-Carlo entropy estimate (not certified).
    Mc {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 10_000_000)]
        n: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Use plain f64 orbits instead of double-double.
        #[arg(long)]
        f64: bool,
    },
    /// Rectangle decomposition of the natural-extension domain.
    Domain {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        /// Orbit truncation for undecided alpha.
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
        /// Node budget of the enumeration.
        #[arg(long, default_value_t = 200_000)]
        budget: usize,
    },
    /// Point cloud of the natural extension.
    Cloud {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Measure and entropy brackets on a grid of alpha values.
    Scan {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        /// Number of grid intervals; `steps + 1` values are computed.
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Synchronization interval of a word.
    Interval {
        #[arg(long, allow_hyphen_values = true)]
        word: String,
    },
    /// Limit of the folding iteration from a word.
    Tau {
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        #[arg(long, default_value_t = 1e-15)]
        tol: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global();
    }
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_budget() {
        3
    } else {
        2
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), Error> {
    match &cli.out {
        Some(p) => fs::write(p, text).map_err(|e| Error::Domain(format!("cannot write {}: {}", p.display(), e))),
        None => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn emit_json(cli: &Cli, v: &serde_json::Value) -> Result<(), Error> {
    emit(cli, &format!("{}\n", serde_json::to_string_pretty(v).expect("json")))
}

fn parse_alpha(s: &str) -> Result<ExactNumber, Error> {
    let a = ExactNumber::parse(s)?;
    if a.signum() <= 0 || a > ExactNumber::one() {
        return Err(Error::Domain(format!("alpha = {} not in (0,1]", a)));
    }
    Ok(a)
}

fn run(cli: &Cli) -> Result<ExitCode, Error> {
    match &cli.cmd {
        Cmd::Expand { alpha, x, n, mode } => cmd_expand(cli, alpha, x, *n, *mode)?,
        Cmd::Sync { alpha, max_iter } => {
            let a = parse_alpha(alpha)?;
            emit_json(cli, &export::sync_json(&synchronize(&a, *max_iter)?))?;
        }
        Cmd::Measure { alpha, tol } | Cmd::Entropy { alpha, tol } => {
            let a = parse_alpha(alpha)?;
            let b = measure_bracket(&a, *tol)?;
            emit_json(cli, &export::measure_json(&b))?;
        }
        Cmd::Mc { alpha, n, seed, f64 } => {
            let a = parse_alpha(alpha)?.to_f64();
            let precision = if *f64 { Precision::F64 } else { Precision::DoubleDouble };
            let cfg = McConfig { iterations: *n, seed: *seed, precision, ..McConfig::default() };
            let est = mc_entropy(a, &cfg)?;
            emit_json(cli, &export::mc_json(a, &est, &cfg))?;
        }
        Cmd::Domain { alpha, tol, depth, budget } => {
            let a = parse_alpha(alpha)?;
            let sync = synchronize(&a, MAX_ITER)?;
            let aut = build_automaton(&a, &sync, *depth)?;
            let d = omega_decomposition(&aut, *tol, *budget)?;
            if !d.converged {
                eprintln!("note: frontier mass above {} after {} nodes", tol, d.nodes);
            }
            match cli.format.unwrap_or(Format::Csv) {
                Format::Svg => {
                    let b: Vec<f64> = boundaries_of(&sync, *depth).iter().map(|x| x.to_f64()).collect();
                    emit(cli, &export::domain_svg(&d, &b, &SvgStyle::default()))?;
                }
                Format::Json => emit_json(
                    cli,
                    &json!({
                        "alpha": exact_json(&a),
                        "mu_lo": hiprec::to_fixed(&d.mu_lo, 30, RoundingMode::Down),
                        "mu_hi": hiprec::to_fixed(&d.mu_hi, 30, RoundingMode::Up),
                        "rectangles": d.rectangles.len(),
                        "certified": d.certified,
                        "converged": d.converged,
                    }),
                )?,
                _ => emit(cli, &export::domain_csv(&d))?,
            }
        }
        Cmd::Cloud { alpha, n, steps, seed } => {
            let a = parse_alpha(alpha)?.to_f64();
            let pts = simulate_domain(a, *n, *steps, *seed)?;
            emit(cli, &export::cloud_csv(&pts))?;
        }
        Cmd::Scan { from, to, steps, tol } => return cmd_scan(cli, from, to, *steps, *tol),
        Cmd::Interval { word } => {
            let v = Word::parse(word)?;
            let data = interval_data(&v)?;
            emit_json(
                cli,
                &json!({
                    "v": v.to_string(),
                    "v_hat": data.vhat.to_string(),
                    "zeta": exact_json(&data.zeta),
                    "eta": exact_json(&data.eta),
                    "chi": exact_json(&data.chi),
                    "len_diff": data.len_diff,
                    "theta": theta(&v)?.to_string(),
                }),
            )?;
        }
        Cmd::Tau { word, tol } => {
            let v = Word::parse(word)?;
            let t = tau(&v, *tol, THETA_WORD_CAP)?;
            let rcf: Vec<String> = rcf_digits(&t.zeta, 40)?.iter().map(|d| d.to_string()).collect();
            emit_json(
                cli,
                &json!({
                    "word": v.to_string(),
                    "tau": hiprec::to_decimal_string(&t.value, 30),
                    "iterations": t.iterations,
                    "witness_length": t.witness.len(),
                    "rcf": rcf.join(" "),
                }),
            )?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_expand(cli: &Cli, alpha: &str, x: &str, n: usize, mode: Mode) -> Result<(), Error> {
    let json_out = cli.format == Some(Format::Json);
    match mode {
        Mode::Alpha | Mode::Rcf => {
            let a = if mode == Mode::Rcf { ExactNumber::one() } else { parse_alpha(alpha)? };
            let x = ExactNumber::parse_with(x, Some(&a))?;
            let steps = orbit(&a, &x, n)?;
            let letters: String = steps.iter().map(|s| s.letter.to_string()).collect();
            if json_out {
                let pts: Vec<_> = steps.iter().map(|s| exact_json(&s.next)).collect();
                emit_json(cli, &json!({ "alpha": exact_json(&a), "x": exact_json(&x), "letters": letters, "points": pts }))
            } else {
                let mut s = format!("{}\n", letters);
                for (i, st) in steps.iter().enumerate() {
                    s.push_str(&format!("T^{} = {}  ({})\n", i + 1, st.next.to_exact_string(), st.next.to_decimal(20)));
                }
                emit(cli, &s)
            }
        }
        Mode::Excess => {
            let x = ExactNumber::parse(x)?;
            let w = by_excess_expansion(&x, MAX_ITER)?;
            let cs = periodic_char_seq(&w)?;
            let pre = Word(w.pre.clone()).to_string();
            let period = Word(w.period.clone()).to_string();
            if json_out {
                emit_json(cli, &json!({ "x": exact_json(&x), "preperiod": pre, "period": period, "char_pre": cs.pre, "char_period": cs.period }))
            } else {
                emit(cli, &format!("{} period {}\n", pre, period))
            }
        }
    }
}

struct ScanRow {
    alpha: ExactNumber,
    status: String,
    v: String,
    mu: Option<(String, String, String, String)>,
    certified: bool,
    perturbed: bool,
    budget: bool,
}

fn scan_point(alpha: ExactNumber, delta: &ExactNumber, tol: f64) -> ScanRow {
    let mut alpha = alpha;
    let mut perturbed = false;
    let mut sync = synchronize(&alpha, MAX_ITER);
    // endpoints of synchronization intervals move into the interval on their left
    if let Ok(SyncStatus::NonSynchronizing { right_endpoint_of: Some(_), .. }) = sync.as_ref().map(|s| &s.status) {
        alpha = &alpha - delta;
        perturbed = true;
        sync = synchronize(&alpha, MAX_ITER);
    }
    let (status, v) = match &sync {
        Ok(s) => (
            s.status_name().to_string(),
            match &s.status {
                SyncStatus::Synchronizing { v, .. } => v.to_string(),
                _ => String::new(),
            },
        ),
        Err(e) => (format!("error: {}", e), String::new()),
    };
    let (mu, certified, budget) = match measure_bracket(&alpha, tol) {
        Ok(b) => {
            let down = |x| hiprec::to_fixed(x, 20, RoundingMode::Down);
            let up = |x| hiprec::to_fixed(x, 20, RoundingMode::Up);
            (Some((down(&b.lo), up(&b.hi), down(&b.h_lo), up(&b.h_hi))), b.certified, false)
        }
        Err(e) => (None, false, e.is_budget()),
    };
    ScanRow { alpha, status, v, mu, certified, perturbed, budget }
}

fn cmd_scan(cli: &Cli, from: &str, to: &str, steps: usize, tol: f64) -> Result<ExitCode, Error> {
    let a = parse_alpha(from)?;
    let b = parse_alpha(to)?;
    if steps == 0 || b < a {
        return Err(Error::Domain("need from <= to and steps >= 1".into()));
    }
    let step = (&b - &a).checked_div(&ExactNumber::from_int(steps as i64))?;
    let delta = step.checked_mul(&ExactNumber::from_ratio(1, 1000))?;
    let grid: Vec<ExactNumber> = (0..=steps)
        .map(|i| &a + &step.checked_mul(&ExactNumber::from_int(i as i64)).expect("same field"))
        .collect();
    let rows: Vec<ScanRow> = grid.into_par_iter().map(|x| scan_point(x, &delta, tol)).collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Domain(format!("csv: {}", e));
    w.write_record([
        "alpha", "alpha_decimal", "status", "v", "mu_lo", "mu_hi", "h_lo", "h_hi", "certified", "perturbed",
    ])
    .map_err(io)?;
    for r in &rows {
        let (ml, mh, hl, hh) = r.mu.clone().unwrap_or_default();
        w.write_record([
            r.alpha.to_exact_string(),
            r.alpha.to_decimal(30),
            r.status.clone(),
            r.v.clone(),
            ml,
            mh,
            hl,
            hh,
            r.certified.to_string(),
            r.perturbed.to_string(),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Domain(format!("csv: {}", e)))?;
    emit(cli, &String::from_utf8(bytes).expect("utf8"))?;
    if rows.iter().any(|r| r.budget) {
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}
