//! Command-line front end: analyze single polytopes or corpora, query the
//! ray minimum, and minimize the reduced norm of a configuration.

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use kstab_core::analyzer::{analyze, AnalyzerConfig, InvariantReport};
use kstab_core::filtration::ToricFiltration;
use kstab_core::jnorm;
use kstab_core::model::ToricFanoModel;
use kstab_core::pl::PlConvexFunction;
use kstab_core::rational::{format_ratio, parse_ratio_str, rat_int, Int, Ratio};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

const EXIT_OK: u8 = 0;
const EXIT_INPUT_ERROR: u8 = 1;
const EXIT_UNDETERMINED: u8 = 2;

#[derive(Parser)]
#[command(
    name = "kstab",
    about = "Exact stability invariants of toric Fano polytopes",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct AnalyzeOpts {
    /// Cap of the doubling schedule for limit quantities.
    #[arg(long = "m-cap", default_value_t = 40)]
    m_cap: u32,
    /// Tolerance for audited quantities ("0.05", "1/20", ...).
    #[arg(long, default_value = "0.05")]
    tol: String,
    /// Sample count for the semistability audit.
    #[arg(long, default_value_t = 32)]
    samples: usize,
    /// Seed salt for the deterministic sample streams.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze one polytope file and emit the full report.
    Analyze {
        /// Input polytope JSON: {"dim": n, "vertices": [[..], ..]}.
        polytope: PathBuf,
        #[command(flatten)]
        opts: AnalyzeOpts,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Analyze every *.json polytope in a directory.
    Batch {
        dir: PathBuf,
        /// Worker threads (defaults to the rayon heuristic).
        #[arg(long)]
        jobs: Option<usize>,
        /// Write a one-line-per-model summary table.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write the report array here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        opts: AnalyzeOpts,
    },
    /// Print the minimal ray ratio of a polytope.
    Delta { polytope: PathBuf },
    /// Minimize the reduced norm of the configuration given by PL pieces.
    Jnorm {
        polytope: PathBuf,
        /// Affine pieces JSON: [{"gradient": [..], "constant": c}, ..].
        #[arg(long)]
        pl: PathBuf,
    },
}

fn parse_tolerance(s: &str) -> anyhow::Result<Ratio> {
    let s = s.trim();
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let int_part = if int_part.is_empty() { "0" } else { int_part };
        let whole: Int = int_part
            .parse()
            .map_err(|_| anyhow!("bad tolerance {s:?}"))?;
        let digits = frac_part.len() as u32;
        let frac: Int = if frac_part.is_empty() {
            Int::from(0)
        } else {
            frac_part.parse().map_err(|_| anyhow!("bad tolerance {s:?}"))?
        };
        let scale = Int::from(10u32).pow(digits);
        return Ok(Ratio::new(whole * &scale + frac, scale));
    }
    Ok(parse_ratio_str(s)?)
}

fn load_model(path: &Path) -> anyhow::Result<Arc<ToricFanoModel>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", path.display()))?;
    let mut model = ToricFanoModel::from_json(&value)
        .with_context(|| format!("validating {}", path.display()))?;
    if model.name().is_none() {
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("anonymous")
            .to_string();
        let polytope = model.polytope().clone();
        model = ToricFanoModel::new(polytope, Some(stem))?;
    }
    Ok(Arc::new(model))
}

fn analyzer_config(opts: &AnalyzeOpts) -> anyhow::Result<AnalyzerConfig> {
    Ok(AnalyzerConfig {
        m_cap: opts.m_cap,
        tol: parse_tolerance(&opts.tol)?,
        samples: opts.samples,
        seed: opts.seed,
        verbosity: 1,
    })
}

fn write_or_print(out: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("writing {}", path.display()))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn csv_summary(reports: &[InvariantReport]) -> String {
    let mut out = String::from(
        "name,dim,vol,bc,delta_toric,futaki_vanishes,g_uniformly_k_stable,uniformly_k_stable,toric_k_semistable\n",
    );
    for r in reports {
        let verdict = |v: &kstab_core::VerdictState| serde_plain(v).to_string();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.name,
            r.dim,
            r.volume,
            r.barycenter.join(" "),
            r.delta_toric,
            r.verdicts.futaki_vanishes,
            verdict(&r.verdicts.g_uniformly_k_stable),
            verdict(&r.verdicts.uniformly_k_stable),
            verdict(&r.verdicts.toric_k_semistable),
        ));
    }
    out
}

fn serde_plain(v: &kstab_core::VerdictState) -> &'static str {
    match v {
        kstab_core::VerdictState::True => "true",
        kstab_core::VerdictState::False => "false",
        kstab_core::VerdictState::Undetermined => "undetermined",
    }
}

fn run() -> anyhow::Result<u8> {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze { polytope, opts, out } => {
            let model = load_model(&polytope)?;
            let config = analyzer_config(&opts)?;
            let report = analyze(&model, &config)?;
            write_or_print(&out, &report.to_json())?;
            Ok(if report.exit_is_undetermined() {
                EXIT_UNDETERMINED
            } else {
                EXIT_OK
            })
        }
        Command::Batch {
            dir,
            jobs,
            csv,
            out,
            opts,
        } => {
            let config = analyzer_config(&opts)?;
            let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir)
                .with_context(|| format!("reading {}", dir.display()))?
                .filter_map(|e| e.ok())
                .map(|e| e.path())
                .filter(|p| p.extension().is_some_and(|e| e == "json"))
                .collect();
            paths.sort();
            if paths.is_empty() {
                bail!("no *.json polytopes under {}", dir.display());
            }
            let models = paths
                .iter()
                .map(|p| load_model(p))
                .collect::<anyhow::Result<Vec<_>>>()?;
            let run_batch = || -> Vec<anyhow::Result<InvariantReport>> {
                use rayon::prelude::*;
                models
                    .par_iter()
                    .map(|m| Ok(analyze(m, &config)?))
                    .collect()
            };
            let results = match jobs {
                Some(n) => rayon::ThreadPoolBuilder::new()
                    .num_threads(n.max(1))
                    .build()
                    .context("building worker pool")?
                    .install(run_batch),
                None => run_batch(),
            };
            let mut reports = results.into_iter().collect::<anyhow::Result<Vec<_>>>()?;
            reports.sort_by(|a, b| a.name.cmp(&b.name));
            let json = serde_json::to_string_pretty(&reports)?;
            write_or_print(&out, &json)?;
            if let Some(csv_path) = csv {
                std::fs::write(&csv_path, csv_summary(&reports))
                    .with_context(|| format!("writing {}", csv_path.display()))?;
            }
            Ok(if reports.iter().any(|r| r.exit_is_undetermined()) {
                EXIT_UNDETERMINED
            } else {
                EXIT_OK
            })
        }
        Command::Delta { polytope } => {
            let model = load_model(&polytope)?;
            let (delta, ray) = model.delta_toric()?;
            let payload = serde_json::json!({
                "name": model.name().unwrap_or("anonymous"),
                "delta_toric": format_ratio(&delta),
                "ray": ray.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "strictly_below_one": delta < rat_int(1),
            });
            println!("{}", serde_json::to_string_pretty(&payload)?);
            Ok(EXIT_OK)
        }
        Command::Jnorm { polytope, pl } => {
            let model = load_model(&polytope)?;
            let text = std::fs::read_to_string(&pl)
                .with_context(|| format!("reading {}", pl.display()))?;
            let value: serde_json::Value = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", pl.display()))?;
            let pieces = PlConvexFunction::pieces_from_json(&value, model.dim())?;
            let filt = ToricFiltration::from_pieces(Arc::clone(&model), pieces)?;
            let sol = jnorm::jnat(&filt)?;
            let cert = jnorm::properness_certificate(&filt)?;
            let payload = serde_json::json!({
                "name": model.name().unwrap_or("anonymous"),
                "jna": format_ratio(&filt.jna()?),
                "reduced_min": format_ratio(&sol.min),
                "argmin": sol.argmin.to_strings(),
                "optimal_face_free_coords": sol.free_coords,
                "is_product": filt.is_product(),
                "properness": {
                    "theta": format_ratio(&cert.theta),
                    "c1": format_ratio(&cert.c1),
                    "c2": format_ratio(&cert.c2),
                },
            });
            println!("{}", serde_json::to_string_pretty(&payload)?);
            Ok(EXIT_OK)
        }
    }
}


fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_INPUT_ERROR)
        }
    }
}
