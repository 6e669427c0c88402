use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use outfn::cancellation::{certify, lemma1_constants, CertifyConfig};
use outfn::oracle::{exact_norm, BallIndex, Norm};
use outfn::report::{
    cmd_oracle_build, cmd_tau, cmd_upg, cmd_verify, round_floats, AutInput, ExperimentConfig, Outcome, EXIT_PASS,
    EXIT_VIOLATION,
};
use outfn::upg::FilteredGraphMap;
use outfn::{Automorphism, CyclicWord, ReducedWord};

#[derive(Parser)]
#[command(name = "outfn", version, about = "Translation lengths in Out(F_n)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed for randomized suites.
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for report files.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// An automorphism as a JSON file or as comma-separated images.
#[derive(Args, Clone, Default)]
struct AutArg {
    /// JSON file `{"rank": n, "images": [...]}`.
    #[arg(long = "aut")]
    files: Vec<PathBuf>,
    /// Images of the generators, e.g. `ab,b`. Repeatable.
    #[arg(long = "images")]
    images: Vec<String>,
}

impl AutArg {
    fn inputs(&self) -> Result<Vec<AutInput>> {
        let mut out: Vec<AutInput> = self.files.iter().map(|f| AutInput::File { file: f.clone() }).collect();
        for spec in &self.images {
            let images: Vec<&str> = spec.split(',').map(str::trim).collect();
            out.push(AutInput::Inline(json!({ "rank": images.len(), "images": images })));
        }
        Ok(out)
    }

    fn load_one(&self) -> Result<Automorphism> {
        let inputs = self.inputs()?;
        if inputs.len() != 1 {
            bail!("expected exactly one automorphism (use --aut FILE or --images IMAGES)");
        }
        Ok(inputs[0].load(Path::new("."))?)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Reduce a word and report its statistics.
    Word {
        word: String,
        #[arg(long, default_value_t = 2)]
        rank: usize,
    },
    /// Inspect an automorphism.
    Aut {
        #[command(flatten)]
        aut: AutArg,
        /// Also apply the automorphism to this word.
        #[arg(long)]
        apply: Option<String>,
    },
    /// Bounded-cancellation constants.
    Bcc {
        #[arg(long, default_value_t = 2)]
        rank: usize,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        /// Certify the cyclic constant on sampled words.
        #[arg(long)]
        certify: bool,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Bracket the translation length of each input.
    Tau {
        #[command(flatten)]
        aut: AutArg,
        #[command(flatten)]
        common: Common,
    },
    /// Run the verification suites, or re-check a certificate.
    Verify {
        #[command(flatten)]
        aut: AutArg,
        #[arg(long)]
        certificate: Option<PathBuf>,
        /// Override the cyclic cancellation constant.
        #[arg(long)]
        constant: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Filtered graph maps.
    Upg {
        #[command(subcommand)]
        action: UpgAction,
    },
    /// Balls in Out(F_n).
    Oracle {
        #[command(subcommand)]
        action: OracleAction,
    },
}

#[derive(Subcommand)]
enum UpgAction {
    /// Check the filtration and splitting conditions.
    Validate { fixture: PathBuf },
    /// Print [[f^k(path)]].
    Iterate {
        fixture: PathBuf,
        /// Edge names separated by spaces or commas; `~E1` is the reverse.
        #[arg(long)]
        path: String,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Search for a closed path with linearly growing alpha.
    Witness {
        fixture: PathBuf,
        #[arg(long, default_value_t = 50)]
        iterations: usize,
    },
    /// Validation, witness and closed-form table.
    Report {
        fixture: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand)]
enum OracleAction {
    /// Enumerate a ball and optionally save a snapshot.
    Build {
        #[arg(long, default_value_t = 2)]
        rank: usize,
        #[arg(long, default_value_t = 5)]
        radius: usize,
        #[arg(long, default_value_t = 10_000_000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        workers: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Exact word norm from a snapshot, or from a fresh ball.
    Norm {
        #[command(flatten)]
        aut: AutArg,
        #[arg(long)]
        ball: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        radius: usize,
    },
}

fn base_config(common: &Common) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(p) => ExperimentConfig::from_file(p).with_context(|| format!("reading {}", p.display()))?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(o) = &common.out {
        cfg.out_dir = Some(o.clone());
    }
    Ok(cfg)
}

fn with_inputs(cfg: &mut ExperimentConfig, aut: &AutArg) -> Result<()> {
    let extra = aut.inputs()?;
    if !extra.is_empty() {
        let rank = extra[0].load(Path::new("."))?.rank();
        if cfg.automorphisms.is_empty() {
            cfg.rank = rank;
        }
        cfg.automorphisms.extend(extra);
    }
    cfg.validate()?;
    Ok(())
}

fn print(mut v: Value) {
    round_floats(&mut v);
    // a closed pipe (e.g. `| head`) is not an error
    let _ = writeln!(std::io::stdout().lock(), "{}", serde_json::to_string_pretty(&v).expect("json"));
}

fn emit(out: Outcome) -> i32 {
    print(out.report);
    for f in &out.files {
        eprintln!("wrote {}", f.display());
    }
    out.exit_code
}

fn load_map(path: &Path) -> Result<FilteredGraphMap> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(FilteredGraphMap::from_json(&text)?)
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Word { word, rank } => {
            let w = ReducedWord::parse(rank, &word)?;
            let c = CyclicWord::of(&w);
            print(json!({
                "reduced": w,
                "length": w.len(),
                "alpha": w.alpha(),
                "necklace": c.to_string(),
                "cyclic_length": c.len(),
                "alpha_tilde": c.alpha_tilde(),
            }));
            Ok(EXIT_PASS)
        }
        Command::Aut { aut, apply } => {
            let phi = aut.load_one()?;
            let mut v = json!({
                "automorphism": phi,
                "decomposition": phi.nielsen_decompose()?.0.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
                "inverse": phi.inverse()?,
                "outer_canonical": phi.outer_canonical()?,
                "abelianization": phi.abelianization_matrix().rows(),
            });
            if let Some(w) = apply {
                let w = ReducedWord::parse(phi.rank(), &w)?;
                v["apply"] = json!(phi.apply(&w)?);
            }
            print(v);
            Ok(EXIT_PASS)
        }
        Command::Bcc {
            rank,
            depth,
            certify: do_certify,
            samples,
            common,
        } => {
            let mut report = lemma1_constants(rank, depth)?;
            if do_certify {
                let cfg = CertifyConfig {
                    samples,
                    seed: common.seed.unwrap_or(0),
                    ..CertifyConfig::default()
                };
                certify(&mut report, &cfg)?;
            }
            print(serde_json::to_value(&report)?);
            Ok(EXIT_PASS)
        }
        Command::Tau { aut, common } => {
            let mut cfg = base_config(&common)?;
            with_inputs(&mut cfg, &aut)?;
            if cfg.automorphisms.is_empty() {
                bail!("no automorphisms given");
            }
            Ok(emit(cmd_tau(&cfg)?))
        }
        Command::Verify {
            aut,
            certificate,
            constant,
            samples,
            common,
        } => {
            let mut cfg = base_config(&common)?;
            with_inputs(&mut cfg, &aut)?;
            if certificate.is_some() {
                cfg.certificate = certificate;
            }
            if constant.is_some() {
                cfg.constant_override = constant;
            }
            if let Some(s) = samples {
                cfg.samples = s;
            }
            Ok(emit(cmd_verify(&cfg)?))
        }
        Command::Upg { action } => match action {
            UpgAction::Validate { fixture } => {
                let r = load_map(&fixture)?.validate_upg_rep();
                let code = if r.valid { EXIT_PASS } else { EXIT_VIOLATION };
                print(serde_json::to_value(&r)?);
                Ok(code)
            }
            UpgAction::Iterate { fixture, path, k } => {
                let map = load_map(&fixture)?;
                let names: Vec<&str> = path.split([' ', ',']).filter(|s| !s.is_empty()).collect();
                let p = map.path(&names)?;
                let img = map.iterate_path(&p, k)?;
                print(json!({
                    "k": k,
                    "path": map.path_names(&img),
                    "length": img.len(),
                    "alpha": img.alpha(),
                }));
                Ok(EXIT_PASS)
            }
            UpgAction::Witness { fixture, iterations } => {
                let map = load_map(&fixture)?;
                match map.find_witness(iterations) {
                    Ok(w) => {
                        let mut v = serde_json::to_value(&w)?;
                        v["sigma_names"] = json!(map.path_names(&w.sigma));
                        print(v);
                        Ok(EXIT_PASS)
                    }
                    Err(e) => {
                        print(json!({ "error": e.to_string() }));
                        Ok(outfn::report::EXIT_INCONCLUSIVE)
                    }
                }
            }
            UpgAction::Report { fixture, common } => {
                let mut cfg = base_config(&common)?;
                cfg.upg_fixture = Some(fixture);
                cfg.base_dir = PathBuf::from(".");
                Ok(emit(cmd_upg(&cfg)?))
            }
        },
        Command::Oracle { action } => match action {
            OracleAction::Build {
                rank,
                radius,
                budget,
                workers,
                common,
            } => {
                let mut cfg = base_config(&common)?;
                cfg.rank = rank;
                cfg.oracle_radius = radius;
                cfg.node_budget = budget;
                cfg.workers = workers;
                cfg.validate()?;
                Ok(emit(cmd_oracle_build(&cfg)?.0))
            }
            OracleAction::Norm { aut, ball, radius } => {
                let phi = aut.load_one()?;
                let index = match ball {
                    Some(p) => BallIndex::load(&p)?,
                    None => outfn::oracle::build_ball(phi.rank(), radius, 10_000_000, 0)?,
                };
                let norm = exact_norm(&index, &phi)?;
                print(json!({
                    "radius": index.radius(),
                    "norm": match norm { Norm::Known(d) => json!(d), Norm::Unknown => json!("unknown") },
                }));
                Ok(EXIT_PASS)
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_VIOLATION as u8)
        }
    }
}
