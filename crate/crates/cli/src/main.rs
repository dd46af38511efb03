//! `nodaltree`: generate trees, decompose their operators, draw nodal
//! domains and run the verification checks.
//!
//! Exit codes: 0 on success, 1 when a check fails, 2 on usage or input
//! errors.

mod config;

use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use nodaltree::io::{self, TreeDocument};
use nodaltree::verify::{run_batch, verify_instance, CorpusSpec, Tolerances, Verdict};
use nodaltree::{
    assemble, decompose, default_tau_gap, generate_instance, multiplicity_groups, nodal_domains, Potential,
    SchrodingerOperator, TreeKind, WeightedTree, DEFAULT_EPS_Z,
};

use config::{parse_potential, parse_weights, BatchOverrides, BatchPlan, RunConfig, Source, EPS_RES};

#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Parser)]
#[command(
    name = "nodaltree",
    version,
    about = "Nodal domains and interlacing on weighted trees"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a generated tree and potential.
    Generate {
        #[command(flatten)]
        source: SourceArgs,
        /// json or dot.
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Eigenvalues, eigenvectors and certificates of the operator.
    Spectrum {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        tol: TolArgs,
        /// json or text.
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Also write the operator matrix as text to this file.
        #[arg(long, value_name = "FILE")]
        matrix: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Sign graphs, zeros and nodal domains of one eigenvector.
    Nodal {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        tol: TolArgs,
        /// One-based eigenvalue index.
        #[arg(long)]
        index: usize,
        /// json or dot.
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run every check on one instance.
    Verify {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        tol: TolArgs,
        /// json or text.
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run every check over a seeded corpus and summarize.
    Batch {
        #[arg(long, default_value = "random")]
        generate: TreeKind,
        #[arg(long, default_value_t = 4)]
        n_min: usize,
        #[arg(long, default_value_t = 12)]
        n_max: usize,
        #[arg(long, default_value = "uniform:0.5:2")]
        weights: String,
        #[arg(long, default_value = "uniform:-1:1")]
        potential: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        /// Worker threads; the output does not depend on this.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        tol: TolArgs,
        /// Random vectors drawn in each degenerate eigenspace.
        #[arg(long, default_value_t = 16)]
        remix_samples: usize,
        /// JSON file whose keys override the flags above.
        #[arg(long, value_name = "FILE")]
        config: Option<PathBuf>,
        /// text or json.
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Dot => "dot",
            Format::Text => "text",
        }
    }

    fn require(self, allowed: &[Format], command: &str) -> Result<(), UsageError> {
        if allowed.contains(&self) {
            Ok(())
        } else {
            let names: Vec<_> = allowed.iter().map(|f| f.name()).collect();
            Err(UsageError(format!("{command} supports --format {}", names.join("|"))))
        }
    }
}

#[derive(Args)]
struct SourceArgs {
    /// Generator: path, star, caterpillar or random.
    #[arg(long, conflicts_with = "input")]
    generate: Option<TreeKind>,
    #[arg(long)]
    n: Option<usize>,
    /// unit or uniform:a:b.
    #[arg(long, default_value = "unit")]
    weights: String,
    /// zero or uniform:a:b.
    #[arg(long, default_value = "zero")]
    potential: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Tree file in JSON or DOT.
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct TolArgs {
    /// Relative zero threshold for vertex values.
    #[arg(long, default_value_t = DEFAULT_EPS_Z)]
    eps_z: f64,
    /// Eigenvalue gap below which eigenvalues are grouped.
    #[arg(long)]
    tau_gap: Option<f64>,
}

#[derive(Args)]
struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
}

impl OutputArgs {
    fn emit(&self, mut text: String) -> Result<(), UsageError> {
        if !text.ends_with('\n') {
            text.push('\n');
        }
        match &self.output {
            Some(path) => {
                fs::write(path, text).map_err(|e| UsageError(format!("cannot write {}: {e}", path.display())))
            }
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn load(source: &SourceArgs) -> Result<(WeightedTree, Potential, Source), UsageError> {
    if let Some(path) = &source.input {
        let text = fs::read_to_string(path).map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
        let (tree, potential) = io::parse(&text).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
        return Ok((
            tree,
            potential,
            Source::Input {
                path: path.display().to_string(),
            },
        ));
    }
    let kind = source
        .generate
        .ok_or_else(|| UsageError("one of --generate or --input is required".into()))?;
    let n = source.n.ok_or_else(|| UsageError("--generate needs --n".into()))?;
    let weights = parse_weights(&source.weights)?;
    let potential_law = parse_potential(&source.potential)?;
    let (tree, potential) =
        generate_instance(kind, n, weights, potential_law, source.seed).map_err(|e| UsageError(e.to_string()))?;
    Ok((
        tree,
        potential,
        Source::Generate {
            kind,
            n,
            weights: weights.to_string(),
            potential: potential_law.to_string(),
        },
    ))
}

fn config(command: &'static str, source: Source, seed: u64, tol: Option<&TolArgs>, format: Format) -> RunConfig {
    RunConfig {
        command,
        source,
        seed,
        eps_z: tol.map_or(DEFAULT_EPS_Z, |t| t.eps_z),
        tau_gap: tol.and_then(|t| t.tau_gap),
        eps_res: EPS_RES,
        format: format.name(),
        eigen_index: None,
        count: None,
        jobs: None,
        remix_samples: None,
    }
}

fn operator(tree: WeightedTree, potential: &Potential) -> Result<SchrodingerOperator, UsageError> {
    assemble(tree, potential).map_err(|e| UsageError(e.to_string()))
}

fn pretty(value: &serde_json::Value) -> String {
    serde_json::to_string_pretty(value).expect("json values always serialize")
}

fn run(cli: Cli) -> Result<ExitCode, UsageError> {
    match cli.command {
        Command::Generate { source, format, out } => {
            format.require(&[Format::Json, Format::Dot], "generate")?;
            let (tree, potential, src) = load(&source)?;
            let cfg = config("generate", src, source.seed, None, format);
            let text = match format {
                Format::Dot => format!("// config: {}\n{}", cfg.to_json_line(), io::to_dot(&tree, &potential)),
                _ => {
                    let mut doc =
                        serde_json::to_value(TreeDocument::new(&tree, &potential)).expect("documents serialize");
                    doc["config"] = cfg.to_json_value();
                    pretty(&doc)
                }
            };
            out.emit(text)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Spectrum {
            source,
            tol,
            format,
            matrix,
            out,
        } => {
            format.require(&[Format::Json, Format::Text], "spectrum")?;
            let (tree, potential, src) = load(&source)?;
            let cfg = config("spectrum", src, source.seed, Some(&tol), format);
            cfg.check()?;
            let op = operator(tree, &potential)?;
            if let Some(path) = matrix {
                fs::write(&path, op.matrix().to_text())
                    .map_err(|e| UsageError(format!("cannot write {}: {e}", path.display())))?;
            }
            let spectrum = match decompose(&op) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e}");
                    return Ok(ExitCode::FAILURE);
                }
            };
            let tau = tol
                .tau_gap
                .unwrap_or_else(|| default_tau_gap(spectrum.frobenius_norm()));
            let groups = multiplicity_groups(&spectrum, tau);
            let text = match format {
                Format::Text => {
                    let mut s = format!("# config: {}\n", cfg.to_json_line());
                    for v in spectrum.eigenvalues() {
                        s += &format!("{v:?}\n");
                    }
                    s
                }
                _ => pretty(&json!({ "config": cfg, "spectrum": spectrum, "multiplicity": groups })),
            };
            out.emit(text)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Nodal {
            source,
            tol,
            index,
            format,
            out,
        } => {
            format.require(&[Format::Json, Format::Dot], "nodal")?;
            let (tree, potential, src) = load(&source)?;
            let mut cfg = config("nodal", src, source.seed, Some(&tol), format);
            cfg.eigen_index = Some(index);
            cfg.check()?;
            let n = tree.vertex_count();
            if !(1..=n).contains(&index) {
                return Err(UsageError(format!("--index must lie in 1..={n}, got {index}")));
            }
            let op = operator(tree, &potential)?;
            let spectrum = match decompose(&op) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e}");
                    return Ok(ExitCode::FAILURE);
                }
            };
            let d = nodal_domains(op.tree(), spectrum.eigenvector(index - 1), tol.eps_z)
                .map_err(|e| UsageError(e.to_string()))?
                .with_eigen_index(index);
            let text = match format {
                Format::Dot => format!("// config: {}\n{}", cfg.to_json_line(), d.to_dot(op.tree())),
                _ => pretty(&json!({ "config": cfg, "eigenvalue": spectrum.eigenvalue(index - 1), "nodal": d })),
            };
            out.emit(text)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Verify {
            source,
            tol,
            format,
            out,
        } => {
            format.require(&[Format::Json, Format::Text], "verify")?;
            let (tree, potential, src) = load(&source)?;
            let cfg = config("verify", src, source.seed, Some(&tol), format);
            cfg.check()?;
            let n = tree.vertex_count();
            let op = operator(tree, &potential)?;
            let tolerances = Tolerances {
                eps_z: tol.eps_z,
                tau_gap: tol.tau_gap,
                ..Tolerances::default()
            };
            let v = verify_instance(&op, &tolerances, source.seed).map_err(|e| UsageError(e.to_string()))?;
            let verdict = v.verdict();
            let text = match format {
                Format::Text => {
                    let mut s = format!(
                        "# config: {}\nvertices {n}  spectrum {}\n",
                        cfg.to_json_line(),
                        if v.spectrum_simple { "simple" } else { "not simple" }
                    );
                    for c in &v.checks {
                        s += &format!("{:<22}{}\n", c.check, c.verdict.as_str());
                    }
                    s += &format!("{:<22}{}\n", "overall", verdict.as_str());
                    s
                }
                _ => pretty(&json!({
                    "config": cfg,
                    "n": n,
                    "spectrum_simple": v.spectrum_simple,
                    "verdict": verdict,
                    "metrics": v.metrics,
                    "checks": v.checks,
                })),
            };
            out.emit(text)?;
            Ok(if verdict == Verdict::Fail {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            })
        }

        Command::Batch {
            generate,
            n_min,
            n_max,
            weights,
            potential,
            seed,
            count,
            jobs,
            tol,
            remix_samples,
            config: config_path,
            format,
            out,
        } => {
            format.require(&[Format::Text, Format::Json], "batch")?;
            let overrides = match &config_path {
                Some(path) => {
                    let text = fs::read_to_string(path)
                        .map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
                    serde_json::from_str::<BatchOverrides>(&text)
                        .map_err(|e| UsageError(format!("{}: {e}", path.display())))?
                }
                None => BatchOverrides::default(),
            };
            let weights = parse_weights(overrides.weights.as_deref().unwrap_or(&weights))?;
            let potential = parse_potential(overrides.potential.as_deref().unwrap_or(&potential))?;
            let plan = BatchPlan {
                corpus: CorpusSpec {
                    kind: overrides.generate.unwrap_or(generate),
                    n_min: overrides.n_min.unwrap_or(n_min),
                    n_max: overrides.n_max.unwrap_or(n_max),
                    weights,
                    potential,
                },
                seed: overrides.seed.unwrap_or(seed),
                count: overrides.count.unwrap_or(count),
                jobs: overrides.jobs.unwrap_or(jobs),
                tolerances: Tolerances {
                    eps_z: overrides.eps_z.unwrap_or(tol.eps_z),
                    tau_gap: overrides.tau_gap.or(tol.tau_gap),
                    remix_samples: overrides.remix_samples.unwrap_or(remix_samples),
                    ..Tolerances::default()
                },
            };
            let cfg = RunConfig {
                command: "batch",
                source: Source::Corpus {
                    kind: plan.corpus.kind,
                    n_min: plan.corpus.n_min,
                    n_max: plan.corpus.n_max,
                    weights: weights.to_string(),
                    potential: potential.to_string(),
                },
                seed: plan.seed,
                eps_z: plan.tolerances.eps_z,
                tau_gap: plan.tolerances.tau_gap,
                eps_res: EPS_RES,
                format: format.name(),
                eigen_index: None,
                count: Some(plan.count),
                jobs: Some(plan.jobs),
                remix_samples: Some(plan.tolerances.remix_samples),
            };
            cfg.check()?;
            if plan.corpus.n_min < 2 || plan.corpus.n_max < plan.corpus.n_min {
                return Err(UsageError(format!(
                    "need 2 <= --n-min <= --n-max, got {} and {}",
                    plan.corpus.n_min, plan.corpus.n_max
                )));
            }
            let summary = run_batch(&plan.corpus, plan.seed, plan.count, &plan.tolerances, plan.jobs)
                .map_err(|e| UsageError(e.to_string()))?;
            let text = match format {
                Format::Json => pretty(&json!({ "config": cfg, "summary": summary })),
                _ => format!("# config: {}\n{}", cfg.to_json_line(), summary.to_text()),
            };
            out.emit(text)?;
            Ok(if summary.has_failures() {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
