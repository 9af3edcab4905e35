//! `qsat2`: generate, analyze and count random product-constraint 2-QSAT
//! instances, print closed-form predictions and run parameter sweeps.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use qsat_core::counting::{value_from_decomposition, RankBackendConfig};
use qsat_core::error::CountError;
use qsat_core::graph::ComponentClass;
use qsat_core::instance::{
    generate_instance, Conditioning, FactorDistribution, GenSpec, GraphSpec, Instance, Model,
    DEFAULT_RESAMPLE_BUDGET,
};
use qsat_core::stats::{thresholds, xi};
use qsat_core::structure::{decouple, frustration_certificate, Certificate, DEFAULT_CUTOFF_FACTOR};
use qsat_core::sweep::{run_sweep, write_csv, SweepConfig};

#[derive(Parser)]
#[command(
    name = "qsat2",
    version,
    about = "Random 2-QSAT with product constraints"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Er,
    Lat2,
    Lat3,
}

#[derive(Clone, Copy, ValueEnum)]
enum CondArg {
    Any,
    Ff,
}

#[derive(Subcommand)]
enum Command {
    /// Sample an instance and write it in the QSAT2 text format.
    Gen {
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long = "L")]
        side: Option<u32>,
        #[arg(long)]
        m: Option<u64>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        f: Option<usize>,
        /// `uniform` or a comma-separated list such as `1/2,1/4,1/4`.
        #[arg(long, default_value = "uniform")]
        q: String,
        #[arg(long, value_enum, default_value = "any")]
        cond: CondArg,
        #[arg(long, default_value_t = DEFAULT_RESAMPLE_BUDGET)]
        budget: u32,
        #[arg(long)]
        seed: u64,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Satisfiability, frozen qubits and component structure of an instance.
    Analyze {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CUTOFF_FACTOR)]
        cutoff_c: f64,
    },
    /// Exact ground-space dimension of an instance.
    Count {
        file: PathBuf,
        #[arg(long, default_value_t = qsat_core::counting::DEFAULT_MAX_COMPONENT_QUBITS)]
        max_component: usize,
        /// Use exact rational elimination instead of modular ranks.
        #[arg(long)]
        exact: bool,
    },
    /// Distribution functionals and phase thresholds.
    Predict {
        #[arg(long)]
        f: Option<usize>,
        #[arg(long, default_value = "uniform")]
        q: String,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, value_enum, default_value = "er")]
        model: ModelArg,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long = "L")]
        side: Option<u32>,
        #[arg(long)]
        p: Option<f64>,
    },
    /// Tree-vertex fraction ξ(ρ) of a random graph with edge density ρ.
    Xi {
        #[arg(allow_negative_numbers = true)]
        rho: f64,
    },
    /// Monte Carlo sweep described by a TOML file, written as CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
    },
}

/// An error with its process exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

const USAGE: u8 = 2;
const PARSE: u8 = 3;
const CAP: u8 = 4;

trait Code<T> {
    fn code(self, code: u8) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Code<T> for Result<T, E> {
    fn code(self, code: u8) -> Result<T, Failure> {
        self.map_err(|e| Failure {
            code,
            error: e.into(),
        })
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Failure { code: 1, error }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Gen {
            model,
            n,
            side,
            m,
            p,
            f,
            q,
            cond,
            budget,
            seed,
            out,
        } => {
            let graph = match model {
                ModelArg::Er => GraphSpec::Er {
                    n: n.ok_or_else(|| anyhow!("--model er needs --n"))
                        .code(USAGE)?,
                    m: m.ok_or_else(|| anyhow!("--model er needs --m"))
                        .code(USAGE)?,
                },
                ModelArg::Lat2 | ModelArg::Lat3 => GraphSpec::Lattice {
                    dim: if matches!(model, ModelArg::Lat2) {
                        2
                    } else {
                        3
                    },
                    side: side
                        .ok_or_else(|| anyhow!("lattice models need --L"))
                        .code(USAGE)?,
                    p: p.ok_or_else(|| anyhow!("lattice models need --p"))
                        .code(USAGE)?,
                },
            };
            let dist = FactorDistribution::from_spec(f, &q).code(USAGE)?;
            let conditioning = match cond {
                CondArg::Any => Conditioning::Any,
                CondArg::Ff => Conditioning::FrustrationFree,
            };
            let spec = GenSpec {
                graph,
                dist,
                conditioning,
                budget,
            };
            let inst = generate_instance(&spec, seed).code(USAGE)?;
            match out {
                Some(path) => fs::write(&path, inst.to_string())
                    .with_context(|| format!("writing {}", path.display()))?,
                None => print!("{inst}"),
            }
            Ok(())
        }
        Command::Analyze { file, cutoff_c } => analyze(&read_instance(&file)?, cutoff_c),
        Command::Count {
            file,
            max_component,
            exact,
        } => {
            let inst = read_instance(&file)?;
            let base = if exact {
                RankBackendConfig::exact()
            } else {
                RankBackendConfig::default()
            };
            count(&inst, &base.with_cap(max_component))
        }
        Command::Predict {
            f,
            q,
            gamma,
            model,
            n,
            side,
            p,
        } => {
            let dist = FactorDistribution::from_spec(f, &q).code(USAGE)?;
            let (model, n) = match model {
                ModelArg::Er => (Model::Er, n.unwrap_or(0) as u64),
                ModelArg::Lat2 | ModelArg::Lat3 => {
                    let dim = if matches!(model, ModelArg::Lat2) {
                        2
                    } else {
                        3
                    };
                    let side = side
                        .ok_or_else(|| anyhow!("lattice models need --L"))
                        .code(USAGE)?;
                    (Model::Lattice { dim, side }, (side as u64).pow(dim as u32))
                }
            };
            let report = thresholds(&dist, model, n, gamma, p).code(USAGE)?;
            print!("{report}");
            Ok(())
        }
        Command::Xi { rho } => {
            println!("{}", xi(rho).code(USAGE)?);
            Ok(())
        }
        Command::Sweep {
            config,
            out,
            threads,
        } => {
            let text = fs::read_to_string(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            let cfg = SweepConfig::from_toml(&text).code(USAGE)?;
            let threads = threads
                .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let records = run_sweep(&cfg, threads).code(USAGE)?;
            let file =
                fs::File::create(&out).with_context(|| format!("creating {}", out.display()))?;
            write_csv(&cfg, &records, BufWriter::new(file))
                .with_context(|| format!("writing {}", out.display()))?;
            Ok(())
        }
    }
}

fn read_instance(path: &Path) -> Result<Instance, Failure> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.parse::<Instance>()
        .with_context(|| format!("parsing {}", path.display()))
        .code(PARSE)
}

fn analyze(inst: &Instance, cutoff_c: f64) -> Result<(), Failure> {
    let d = decouple(inst, cutoff_c);
    let mut out = io::stdout().lock();
    let w = |e: io::Error| Failure::from(anyhow::Error::from(e));
    let comps = &d.components;
    writeln!(
        out,
        "n {}\nm {}\nf {}",
        inst.n(),
        inst.graph().m(),
        inst.f()
    )
    .map_err(w)?;
    writeln!(out, "components {}", comps.components.len()).map_err(w)?;
    writeln!(out, "max_component {}", comps.max_size()).map_err(w)?;
    for class in [
        ComponentClass::Tree,
        ComponentClass::Unicyclic,
        ComponentClass::Multicyclic,
    ] {
        writeln!(out, "{} {}", class.as_str(), comps.count_class(class)).map_err(w)?;
    }
    match &d.frozen {
        None => {
            writeln!(out, "satisfiable no").map_err(w)?;
            match frustration_certificate(inst) {
                Some(Certificate::Loops { vertex, sets }) => {
                    let opts: Vec<String> = sets
                        .iter()
                        .map(|s| format!("{{{},{}}}", s.options.0 + 1, s.options.1 + 1))
                        .collect();
                    writeln!(
                        out,
                        "certificate loops at {}: {}",
                        vertex + 1,
                        opts.join(" ")
                    )
                    .map_err(w)?;
                }
                Some(Certificate::Implication(l)) => {
                    let sign = if l.positive { "" } else { "not " };
                    writeln!(
                        out,
                        "certificate implication {sign}x[{},{}] forces its negation",
                        l.vertex + 1,
                        l.factor + 1
                    )
                    .map_err(w)?;
                }
                None => unreachable!("decouple and satisfiable disagree"),
            }
        }
        Some(s) => {
            writeln!(out, "satisfiable yes").map_err(w)?;
            writeln!(out, "frozen {}", s.fixed.count()).map_err(w)?;
            writeln!(out, "frozen_core {}", s.subgraph.core().len()).map_err(w)?;
            writeln!(out, "residual_max {}", s.residual.max_size()).map_err(w)?;
        }
    }
    writeln!(out, "cutoff {}", d.cutoff).map_err(w)?;
    writeln!(out, "label {}", d.label.as_str()).map_err(w)?;
    for (i, c) in comps.components.iter().enumerate() {
        writeln!(
            out,
            "COMP {i} {} {} {}",
            c.vertices.len(),
            c.edge_count,
            c.class.as_str()
        )
        .map_err(w)?;
    }
    if let Some(s) = &d.frozen {
        for (v, h) in s.fixed.iter() {
            writeln!(out, "FROZEN {} {}", v + 1, h + 1).map_err(w)?;
        }
    }
    Ok(())
}

fn count(inst: &Instance, cfg: &RankBackendConfig) -> Result<(), Failure> {
    let d = decouple(inst, DEFAULT_CUTOFF_FACTOR);
    let v = match value_from_decomposition(inst, &d, cfg) {
        Ok(v) => v,
        Err(e @ CountError::ComponentTooLarge { .. }) => return Err(e).code(CAP),
        Err(e) => return Err(e).code(USAGE),
    };
    if v.frustrated {
        println!("VALUE 0 FRUSTRATED");
        return Ok(());
    }
    let mut out = io::stdout().lock();
    for c in &v.components {
        writeln!(out, "C {} {} {}", c.id, c.size, c.value).context("writing output")?;
    }
    writeln!(out, "VALUE {}", v.value).context("writing output")?;
    Ok(())
}
