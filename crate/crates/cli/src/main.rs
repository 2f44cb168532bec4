//! Batch driver for channel classification, threshold bisection, simplex
//! profile scans and conjecture sweeps. All output is deterministic for a
//! fixed argument list: same seed, same bytes.

use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use choi_channels::channel::{channel_from_json, depolarizing};
use choi_channels::classify::{
    binding_value, classify_ppt_inducing, conjecture_value, depolarizing_threshold,
    distillation_prohibiting_refute, entanglement_binding_certify,
    entanglement_breaking_test, one_sided_ppt_inducing, ppt_inducing_sufficient, Verdict,
};
use choi_channels::entangle::{
    depolarizing_pair, restricted_min_pt_eig, schmidt_restricted_worst_case, SeesawConfig,
};
use choi_channels::{BipartiteDims, Channel, Error};

#[derive(Parser)]
#[command(name = "choi", about = "Choi-picture channel classification toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify a channel: PPT-inducing, distillation-prohibiting,
    /// entanglement-breaking, entanglement-binding.
    Classify(ClassifyArgs),
    /// Bisect the PPT-inducing threshold of the depolarizing pair.
    Threshold(ThresholdArgs),
    /// Scan worst-case output PT eigenvalue over a q interval.
    Sweep(SweepArgs),
    /// Scan the Schmidt-weight simplex at fixed (d, q).
    Profile(ProfileArgs),
    /// Compare measured thresholds against the closed-form candidate.
    Conjecture(ConjectureArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    /// Single depolarizing channel Phi_q on dimension d.
    Depolarizing,
    /// Local pair Phi_q x Phi_q on d x d.
    Depolarizing2,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct CommonArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Restarts per heuristic search.
    #[arg(long)]
    restarts: Option<usize>,
    /// Convergence tolerance of the see-saw searches.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

impl CommonArgs {
    fn config(&self, default_restarts: usize) -> SeesawConfig {
        SeesawConfig {
            restarts: self.restarts.unwrap_or(default_restarts),
            max_iters: 500,
            tol: self.tol,
            seed: self.seed,
        }
    }
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long, value_enum, conflicts_with = "file")]
    family: Option<Family>,
    /// Channel JSON file (kraus or choi form).
    #[arg(long)]
    file: Option<std::path::PathBuf>,
    /// Local dimension (family) or A-side dimension of the cut (file).
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    q: Option<f64>,
    /// Test Phi x Id with an ancilla of the same dimension (exact).
    #[arg(long)]
    one_sided: bool,
    /// Accept channels that are not trace preserving.
    #[arg(long)]
    allow_non_tp: bool,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct ThresholdArgs {
    #[arg(long)]
    d: usize,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 3)]
    d: usize,
    #[arg(long)]
    qmin: f64,
    #[arg(long)]
    qmax: f64,
    #[arg(long)]
    steps: usize,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct ProfileArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    q: f64,
    /// Simplex grid subdivisions per axis.
    #[arg(long, default_value_t = 20)]
    steps: usize,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct ConjectureArgs {
    #[arg(long, default_value_t = 4)]
    dmax: usize,
    #[command(flatten)]
    common: CommonArgs,
}

/// Positional formatting with 9 significant digits; reruns must diff clean.
fn fmt9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    let dec = (8 - mag).max(0) as usize;
    let s = format!("{x:.dec$}");
    // strip a trailing "-0.000000000" artifact
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn round9(x: f64) -> f64 {
    fmt9(x).parse().unwrap_or(x)
}

fn to_pretty(doc: &serde_json::Value) -> String {
    serde_json::to_string_pretty(doc).expect("json serialization") + "\n"
}

fn emit(common: &CommonArgs, text: &str) -> Result<(), Error> {
    match &common.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn exit_code_for(err: &Error) -> ExitCode {
    match err {
        Error::Parse(_) | Error::Io(_) | Error::DimensionMismatch(_) => ExitCode::from(2),
        Error::NotCompletelyPositive { .. }
        | Error::NotTracePreserving(_)
        | Error::OutsideCpRange { .. }
        | Error::Precondition(_)
        | Error::MissingKraus
        | Error::NotAState(_)
        | Error::NotHermitian { .. }
        | Error::SeparabilityUndecidable(_) => ExitCode::from(3),
        Error::NoConvergence(_) => ExitCode::from(4),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Classify(a) => cmd_classify(&a),
        Cmd::Threshold(a) => cmd_threshold(&a),
        Cmd::Sweep(a) => cmd_sweep(&a),
        Cmd::Profile(a) => cmd_profile(&a),
        Cmd::Conjecture(a) => cmd_conjecture(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn load_channel(args: &ClassifyArgs) -> Result<(Channel, Option<BipartiteDims>), Error> {
    match (&args.family, &args.file) {
        (Some(fam), None) => {
            let d = args.d.ok_or_else(|| Error::Parse("--d is required with --family".into()))?;
            let q = args.q.ok_or_else(|| Error::Parse("--q is required with --family".into()))?;
            match fam {
                Family::Depolarizing => Ok((depolarizing(d, q)?, None)),
                Family::Depolarizing2 => {
                    Ok((depolarizing_pair(d, q)?, Some(BipartiteDims::new(d, d))))
                }
            }
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)?;
            let ch = channel_from_json(&text, args.allow_non_tp)?;
            let cut = match args.d {
                Some(da) => {
                    if ch.d() % da != 0 {
                        return Err(Error::DimensionMismatch(format!(
                            "--d {da} does not divide channel dimension {}",
                            ch.d()
                        )));
                    }
                    Some(BipartiteDims::new(da, ch.d() / da))
                }
                None => {
                    let s = (ch.d() as f64).sqrt().round() as usize;
                    (s * s == ch.d() && s > 1).then(|| BipartiteDims::new(s, s))
                }
            };
            Ok((ch, cut))
        }
        _ => Err(Error::Parse("provide exactly one of --family or --file".into())),
    }
}

fn cmd_classify(args: &ClassifyArgs) -> Result<(), Error> {
    let (ch, cut) = load_channel(args)?;
    let cfg = args.common.config(16);

    let mut rows: Vec<(&str, Verdict)> = Vec::new();
    if args.one_sided {
        rows.push(("ppt_inducing_one_sided", one_sided_ppt_inducing(&ch, ch.d())?));
    } else if let Some(cut) = cut {
        rows.push(("ppt_inducing", classify_ppt_inducing(&ch, cut, &cfg)?));
        rows.push((
            "distillation_prohibiting",
            distillation_prohibiting_refute(&ch, cut, &cfg)?,
        ));
    }
    rows.push(("entanglement_breaking", entanglement_breaking_test(&ch)?));
    rows.push(("entanglement_binding", entanglement_binding_certify(&ch, &cfg)?));

    let text = match args.common.format {
        Format::Csv => {
            let mut s = String::from("class,tag,method,margin\n");
            for (class, v) in &rows {
                let margin = v.margin.map(fmt9).unwrap_or_default();
                let _ = writeln!(s, "{class},{},{},{margin}", v.tag.as_str(), v.method);
            }
            s
        }
        Format::Json => {
            let verdicts: serde_json::Map<String, serde_json::Value> = rows
                .iter()
                .map(|(class, v)| (class.to_string(), v.to_json()))
                .collect();
            let doc = serde_json::json!({
                "dimension": ch.d(),
                "cut": cut.map(|c| [c.da, c.db]),
                "seed": args.common.seed,
                "verdicts": verdicts,
            });
            to_pretty(&doc)
        }
    };
    emit(&args.common, &text)
}

const THRESHOLD_HEADER: &str =
    "d,q_star,q_low,q_high,conjecture,binding,restricted_min,unrestricted_min";

fn cmd_threshold(args: &ThresholdArgs) -> Result<(), Error> {
    let cfg = args.common.config(8);
    let r = depolarizing_threshold(args.d, &cfg)?;
    let text = match args.common.format {
        Format::Csv => format!(
            "{THRESHOLD_HEADER}\n{},{},{},{},{},{},{},{}\n",
            r.d,
            fmt9(r.q_star),
            fmt9(r.bracket.0),
            fmt9(r.bracket.1),
            fmt9(r.conjecture_value),
            fmt9(r.binding_value),
            fmt9(r.restricted_min),
            fmt9(r.unrestricted_min),
        ),
        Format::Json => {
            let doc = serde_json::json!({
                "d": r.d,
                "q_star": round9(r.q_star),
                "q_low": round9(r.bracket.0),
                "q_high": round9(r.bracket.1),
                "conjecture": round9(r.conjecture_value),
                "binding": round9(r.binding_value),
                "restricted_min": round9(r.restricted_min),
                "unrestricted_min": round9(r.unrestricted_min),
            });
            to_pretty(&doc)
        }
    };
    emit(&args.common, &text)
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), Error> {
    let d = args.d;
    let lo = -1.0 / (d * d - 1) as f64;
    if args.qmin >= args.qmax || args.qmin < lo - 1e-12 || args.qmax > 1.0 + 1e-12 {
        return Err(Error::Precondition(format!(
            "need {lo} <= qmin < qmax <= 1, got [{}, {}]",
            args.qmin, args.qmax
        )));
    }
    if args.steps < 2 {
        return Err(Error::Precondition("sweep needs at least 2 steps".into()));
    }

    let mut rows = Vec::with_capacity(args.steps);
    for i in 0..args.steps {
        let q = args.qmin + (args.qmax - args.qmin) * i as f64 / (args.steps - 1) as f64;
        let (value, _) = schmidt_restricted_worst_case(d, q)?;
        let verdict = if value < -1e-9 {
            "refuted"
        } else {
            let pair = depolarizing_pair(d, q)?;
            match ppt_inducing_sufficient(&pair, BipartiteDims::new(d, d))?.tag {
                choi_channels::VerdictTag::Certified => "certified",
                _ => "likely",
            }
        };
        rows.push((q, value, verdict));
    }

    let text = match args.common.format {
        Format::Csv => {
            let mut s = String::from("q,worst_min_pt_eig,verdict\n");
            for (q, v, tag) in &rows {
                let _ = writeln!(s, "{},{},{tag}", fmt9(*q), fmt9(*v));
            }
            s
        }
        Format::Json => {
            let items: Vec<serde_json::Value> = rows
                .iter()
                .map(|(q, v, tag)| {
                    serde_json::json!({
                        "q": round9(*q),
                        "worst_min_pt_eig": round9(*v),
                        "verdict": tag,
                    })
                })
                .collect();
            let doc = serde_json::json!({ "d": d, "rows": items });
            to_pretty(&doc)
        }
    };
    emit(&args.common, &text)
}

fn cmd_profile(args: &ProfileArgs) -> Result<(), Error> {
    let d = args.d;
    let q = args.q;
    // grid over the probability simplex, then the refined minimizer
    let mut grid: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut comp = vec![0usize; d];
    enumerate_simplex(d, args.steps, 0, args.steps, &mut comp, &mut |lam| {
        grid.push((lam.to_vec(), restricted_min_pt_eig(d, q, lam)));
    });
    let (min_value, argmin) = schmidt_restricted_worst_case(d, q)?;

    let text = match args.common.format {
        Format::Csv => {
            let mut s = String::new();
            for i in 1..=d {
                let _ = write!(s, "lambda_{i},");
            }
            s.push_str("min_pt_eig,kind\n");
            for (lam, v) in &grid {
                for l in lam {
                    let _ = write!(s, "{},", fmt9(*l));
                }
                let _ = writeln!(s, "{},grid", fmt9(*v));
            }
            for l in &argmin {
                let _ = write!(s, "{},", fmt9(*l));
            }
            let _ = writeln!(s, "{},argmin", fmt9(min_value));
            s
        }
        Format::Json => {
            let items: Vec<serde_json::Value> = grid
                .iter()
                .map(|(lam, v)| {
                    serde_json::json!({
                        "lambda": lam.iter().map(|l| round9(*l)).collect::<Vec<_>>(),
                        "min_pt_eig": round9(*v),
                    })
                })
                .collect();
            let doc = serde_json::json!({
                "d": d,
                "q": q,
                "grid": items,
                "argmin": {
                    "lambda": argmin.iter().map(|l| round9(*l)).collect::<Vec<_>>(),
                    "min_pt_eig": round9(min_value),
                },
            });
            to_pretty(&doc)
        }
    };
    emit(&args.common, &text)
}

fn enumerate_simplex(
    d: usize,
    steps: usize,
    idx: usize,
    remaining: usize,
    comp: &mut Vec<usize>,
    f: &mut dyn FnMut(&[f64]),
) {
    if idx == d - 1 {
        comp[idx] = remaining;
        let lam: Vec<f64> = comp.iter().map(|&c| c as f64 / steps as f64).collect();
        f(&lam);
        return;
    }
    for c in 0..=remaining {
        comp[idx] = c;
        enumerate_simplex(d, steps, idx + 1, remaining - c, comp, f);
    }
}

const CONJECTURE_TOL: f64 = 1e-3;

fn cmd_conjecture(args: &ConjectureArgs) -> Result<(), Error> {
    if !(2..=5).contains(&args.dmax) {
        return Err(Error::Precondition(format!(
            "conjecture sweep supports 2 <= dmax <= 5, got {}",
            args.dmax
        )));
    }
    let cfg = args.common.config(4);
    let mut rows = Vec::new();
    for d in 2..=args.dmax {
        let r = depolarizing_threshold(d, &cfg)?;
        let conj = conjecture_value(d);
        let diff = r.q_star - conj;
        // measured strictly below the candidate would falsify sufficiency
        let violation = diff < -CONJECTURE_TOL;
        rows.push((d, r.q_star, conj, diff, violation));
    }

    let text = match args.common.format {
        Format::Csv => {
            let mut s = String::from("d,measured_q_star,conjecture_value,difference,violation\n");
            for (d, m, c, diff, viol) in &rows {
                let _ = writeln!(s, "{d},{},{},{},{viol}", fmt9(*m), fmt9(*c), fmt9(*diff));
            }
            s
        }
        Format::Json => {
            let items: Vec<serde_json::Value> = rows
                .iter()
                .map(|(d, m, c, diff, viol)| {
                    serde_json::json!({
                        "d": d,
                        "measured_q_star": round9(*m),
                        "conjecture_value": round9(*c),
                        "difference": round9(*diff),
                        "violation": viol,
                        "binding_value": round9(binding_value(*d)),
                    })
                })
                .collect();
            let doc = serde_json::json!({ "rows": items });
            to_pretty(&doc)
        }
    };
    emit(&args.common, &text)
}
