//! `qclone`: classify, reduce, verify and sweep subsets of an
//! encrypted-cloning storage register.

mod report;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use qclone::analytic::AlignedDescriptor;
use qclone::classify::{classify_subset, DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_TOL, WITNESS_TOL};
use qclone::pauli::{random_states, PureState};
use qclone::protocol::{oracle_reduced, parse_labels, RegisterSubset};
use qclone::sweep::{analytic_state, run_sweep, SubsetFamily, SweepConfig, SweepReport};
use qclone::Dim;
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "qclone",
    version,
    about = "Leakage classification for qudit encrypted cloning"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Family {
    Aligned,
    All,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Method {
    Oracle,
    Analytic,
}

#[derive(clap::Args)]
struct Target {
    /// Qudit dimension.
    #[arg(short, long)]
    d: u32,
    /// Number of signal/noise pairs.
    #[arg(short, long)]
    n: usize,
    /// Comma-separated qudit labels, e.g. `S1,S2,N3`.
    #[arg(short, long)]
    subset: String,
}

#[derive(clap::Args)]
struct Sampling {
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = WITNESS_TOL)]
    witness: f64,
}

#[derive(clap::Args)]
struct Outputs {
    /// Write the JSON report here (`-` for stdout).
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Write the CSV report here (`-` for stdout).
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Classify one subset from the access rules and the gcd criterion.
    Classify {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        json: bool,
    },
    /// Print the reduced state of one subset.
    Reduce {
        #[command(flatten)]
        target: Target,
        /// Input amplitudes as `re:im` pairs separated by commas (normalized
        /// automatically). Defaults to a seeded random state.
        #[arg(long)]
        psi: Option<String>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Method::Oracle)]
        method: Method,
        #[arg(long)]
        json: bool,
    },
    /// Check the classification and closed form of one subset against the oracle.
    Verify {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        outputs: Outputs,
    },
    /// Run the classifier against the oracle over a grid.
    Sweep {
        /// Dimensions: `2-6`, `2,3,5` or `4`.
        #[arg(long, default_value = "2-6")]
        dims: String,
        /// Pair counts, same syntax as `--dims`.
        #[arg(long, default_value = "1-3")]
        pairs: String,
        #[arg(long, value_enum, default_value_t = Family::Aligned)]
        family: Family,
        /// Explicit subsets separated by `;` (overrides `--family`).
        #[arg(long)]
        subsets: Option<String>,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        outputs: Outputs,
        /// Suppress the table on stdout.
        #[arg(long)]
        quiet: bool,
    },
}

/// `a-b` (empty when `a > b`), `a,b,c` or a single value.
fn parse_range(s: &str) -> Result<Vec<u64>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    if let Some((lo, hi)) = s.split_once('-') {
        let lo: u64 = lo
            .trim()
            .parse()
            .with_context(|| format!("bad range {s:?}"))?;
        let hi: u64 = hi
            .trim()
            .parse()
            .with_context(|| format!("bad range {s:?}"))?;
        return Ok((lo..=hi).collect());
    }
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<u64>()
                .with_context(|| format!("bad value {v:?}"))
        })
        .collect()
}

fn parse_psi(d: Dim, text: &str) -> Result<PureState> {
    let amps = text
        .split(',')
        .map(|pair| {
            let (re, im) = pair.split_once(':').unwrap_or((pair, "0"));
            Ok(Complex64::new(re.trim().parse()?, im.trim().parse()?))
        })
        .collect::<Result<Vec<_>>>()
        .context("amplitudes must look like `re:im,re:im,...`")?;
    Ok(PureState::normalized(d, amps)?)
}

fn open_output(path: &PathBuf) -> Result<Box<dyn Write>> {
    if path.as_os_str() == "-" {
        Ok(Box::new(io::stdout()))
    } else {
        let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
        Ok(Box::new(BufWriter::new(f)))
    }
}

fn emit(report: &SweepReport, outputs: &Outputs, table: bool) -> Result<()> {
    let to_stdout = |p: &Option<PathBuf>| p.as_ref().is_some_and(|p| p.as_os_str() == "-");
    if table && !to_stdout(&outputs.json) && !to_stdout(&outputs.csv) {
        report::write_table(&mut io::stdout().lock(), report)?;
    }
    if let Some(path) = &outputs.json {
        let mut w = open_output(path)?;
        report::write_json(&mut w, report)?;
        w.flush()?;
    }
    if let Some(path) = &outputs.csv {
        report::write_csv(open_output(path)?, report)?;
    }
    Ok(())
}

fn sweep_config(sampling: &Sampling) -> SweepConfig {
    SweepConfig {
        samples: sampling.samples,
        seed: sampling.seed,
        tol: sampling.tol,
        witness: sampling.witness,
        ..SweepConfig::default()
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Classify { target, json } => {
            let d = Dim::new(target.d)?;
            let subset = RegisterSubset::parse(target.n, &target.subset)?;
            let c = classify_subset(d, &subset);
            let leak: Vec<_> = c.leak.iter().map(|t| t.record()).collect();
            let mut out = io::stdout().lock();
            if json {
                let v = json!({
                    "d": target.d,
                    "n": target.n,
                    "subset": subset.to_string(),
                    "p": c.aligned.map(|a| a.p),
                    "q": c.aligned.map(|a| a.q),
                    "g": c.g,
                    "verdict": c.verdict,
                    "authorized": c.authorized,
                    "maximally_mixed": c.maximally_mixed,
                    "leak_terms": leak,
                });
                writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
            } else {
                writeln!(out, "subset      {subset} (d={}, n={})", target.d, target.n)?;
                writeln!(out, "verdict     {}", c.verdict)?;
                writeln!(out, "authorized  {}", c.authorized)?;
                if let Some(AlignedDescriptor { p, q, .. }) = c.aligned {
                    writeln!(out, "aligned     p={p} q={q} g={}", c.g.unwrap_or(0))?;
                }
                if c.verdict == qclone::classify::Verdict::CompletelyUninformative {
                    writeln!(out, "max mixed   {}", c.maximally_mixed)?;
                }
                for t in &c.leak {
                    writeln!(out,
                        "leak        <X^{a} Z^{b}> via {} on signals, {} on noises, phase e^(i*pi*{r}/{d})",
                        t.signal_word,
                        t.noise_word,
                        a = t.a,
                        b = t.b,
                        r = t.coefficient.exponent(),
                        d = target.d
                    )?;
                }
            }
            Ok(true)
        }
        Command::Reduce {
            target,
            psi,
            seed,
            method,
            json,
        } => {
            let d = Dim::new(target.d)?;
            let requested = parse_labels(&target.subset)?;
            let subset = RegisterSubset::from_qudits(target.n, &requested)?;
            let psi = match psi {
                Some(text) => parse_psi(d, &text)?,
                None => random_states(d, 1, seed).remove(0),
            };
            let state = match method {
                Method::Oracle => oracle_reduced(&psi, target.n, &subset)?,
                Method::Analytic => match analytic_state(&psi, &subset) {
                    Some(s) => s?,
                    None => bail!(
                        "{subset} is authorized; no closed form is available, use --method oracle"
                    ),
                },
            };
            let state = state.permuted(&requested)?;
            let mut out = io::stdout().lock();
            if json {
                let v = json!({
                    "d": target.d,
                    "n": target.n,
                    "labels": state.labels.iter().map(ToString::to_string).collect::<Vec<_>>(),
                    "dim": state.dim(),
                    "entries": state.flat_entries(),
                    "diagnostics": state.diagnostics(),
                });
                writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
            } else {
                let labels: Vec<String> = state.labels.iter().map(ToString::to_string).collect();
                writeln!(
                    out,
                    "reduced state on [{}] ({}x{})",
                    labels.join(", "),
                    state.dim(),
                    state.dim()
                )?;
                for i in 0..state.dim() {
                    let row: Vec<String> = (0..state.dim())
                        .map(|j| {
                            let z = state.matrix[(i, j)];
                            format!("{:+.6}{:+.6}i", z.re, z.im)
                        })
                        .collect();
                    writeln!(out, "  {}", row.join("  "))?;
                }
                let diag = state.diagnostics();
                writeln!(
                    out,
                    "hermiticity {:.1e}, trace error {:.1e}, min eigenvalue {:.3e}, purity {:.6}",
                    diag.hermiticity_error,
                    diag.trace_error,
                    diag.min_eigenvalue,
                    state.purity()
                )?;
            }
            Ok(true)
        }
        Command::Verify {
            target,
            sampling,
            outputs,
        } => {
            let cfg = SweepConfig {
                dims: vec![target.d],
                pairs: vec![target.n],
                family: SubsetFamily::Named(vec![target.subset.clone()]),
                ..sweep_config(&sampling)
            };
            let report = run_sweep(&cfg)?;
            emit(&report, &outputs, true)?;
            Ok(report.all_agree())
        }
        Command::Sweep {
            dims,
            pairs,
            family,
            subsets,
            sampling,
            outputs,
            quiet,
        } => {
            let dims = parse_range(&dims)?.into_iter().map(|v| v as u32).collect();
            let pairs = parse_range(&pairs)?
                .into_iter()
                .map(|v| v as usize)
                .collect();
            let family = match (subsets, family) {
                (Some(list), _) => SubsetFamily::Named(
                    list.split(';')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(String::from)
                        .collect(),
                ),
                (None, Family::Aligned) => SubsetFamily::Aligned,
                (None, Family::All) => SubsetFamily::All,
            };
            let cfg = SweepConfig {
                dims,
                pairs,
                family,
                ..sweep_config(&sampling)
            };
            let report = run_sweep(&cfg)?;
            emit(&report, &outputs, !quiet)?;
            Ok(report.all_agree())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("analytic and numeric results disagree");
            ExitCode::from(1)
        }
        Err(e)
            if e.downcast_ref::<io::Error>()
                .is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe) =>
        {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
