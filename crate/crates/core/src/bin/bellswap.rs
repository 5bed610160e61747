use std::f64::consts::LN_2;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bellswap::experiments::{self, BackendChoice, ExperimentOutput, Units};
use bellswap::{Error, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

/// Entanglement swapping by post-selected Bell measurements on doubled
/// free-fermion states.
#[derive(Parser, Debug)]
#[command(name = "bellswap", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Simulation backend; the default picks the oracle when 2L <= 16.
    #[arg(long, global = true, value_enum)]
    backend: Option<BackendArg>,
    /// Output directory for CSV files and the manifest.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Units for entropies printed to the terminal.
    #[arg(long, global = true, value_enum, default_value_t = UnitsArg::Nats)]
    units: UnitsArg,
    /// JSON manifest whose parameters override the flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BackendArg {
    Auto,
    Oracle,
    Gaussian,
    Both,
}

impl From<BackendArg> for BackendChoice {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Auto => BackendChoice::Auto,
            BackendArg::Oracle => BackendChoice::Oracle,
            BackendArg::Gaussian => BackendChoice::Gaussian,
            BackendArg::Both => BackendChoice::Both,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum UnitsArg {
    Nats,
    Log2,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FillingArg {
    Half,
    OffHalf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TheoremStateArg {
    Random,
    AppendixBFixture,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StateArg {
    Critical,
    Random,
}

impl From<StateArg> for experiments::StateKind {
    fn from(s: StateArg) -> Self {
        match s {
            StateArg::Critical => experiments::StateKind::Critical,
            StateArg::Random => experiments::StateKind::Random,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Uniform |+> outcomes on every half-size rung set of random states.
    TheoremCheck {
        #[arg(long, value_delimiter = ',')]
        ls: Option<Vec<usize>>,
        #[arg(long)]
        states: Option<usize>,
        #[arg(long, value_enum)]
        filling: Option<FillingArg>,
        #[arg(long, value_enum)]
        state: Option<TheoremStateArg>,
    },
    /// Entropy of the unmeasured region against system size or measured rungs.
    EeSweep {
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long, value_enum)]
        state: Option<StateArg>,
        #[arg(long, value_delimiter = ',')]
        ls: Option<Vec<usize>>,
        /// System size for right mode.
        #[arg(long)]
        l: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        n_ms: Option<Vec<usize>>,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Partial measurement with imperfect Bell projectors.
    ImperfectBell {
        #[arg(long)]
        l: Option<usize>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        epsilons: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        n_ms: Option<Vec<usize>>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, value_enum)]
        state: Option<StateArg>,
    },
    /// Chain ground state measured against a copy with shifted mass.
    ImperfectCopy {
        #[arg(long)]
        m0: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        ls: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        dms: Option<Vec<f64>>,
    },
    /// Half-system outcome probability of the massive chain against L².
    ProbScaling {
        #[arg(long, value_delimiter = ',')]
        m0s: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        ls: Option<Vec<usize>>,
    },
    /// Plücker relation residuals and post-measurement amplitude structure.
    PluckerVerify {
        #[arg(long)]
        matrices: Option<usize>,
        /// Fixed matrix shape, e.g. 2x5.
        #[arg(long)]
        shape: Option<String>,
        #[arg(long)]
        inject_sign_fault: bool,
        #[arg(long)]
        wavefunction_instances: Option<usize>,
    },
    /// Gaussian post-measurement correlations against the Fock-space oracle.
    OracleCompare {
        #[arg(long, value_delimiter = ',')]
        ls: Option<Vec<usize>>,
        #[arg(long)]
        states: Option<usize>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        epsilons: Option<Vec<f64>>,
    },
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn load_config(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// Flags first, then the config file on top.
fn finalize<P: Serialize + DeserializeOwned>(params: P, config: Option<&Value>) -> Result<P> {
    match config {
        Some(c) => experiments::apply_config(&params, c),
        None => Ok(params),
    }
}

/// Pull seed and backend back out of the final parameters for the manifest.
fn identity<P: Serialize>(params: &P, global: &Global) -> (u64, BackendChoice) {
    let v = serde_json::to_value(params).unwrap_or(Value::Null);
    let seed = v.get("seed").and_then(Value::as_u64).unwrap_or(global.seed.unwrap_or(0));
    let backend = v
        .get("backend")
        .and_then(|b| serde_json::from_value(b.clone()).ok())
        .unwrap_or_else(|| global.backend.map_or(BackendChoice::Auto, Into::into));
    (seed, backend)
}

fn run(cli: &Cli) -> Result<(ExperimentOutput, Vec<PathBuf>)> {
    let config = cli.global.config.as_deref().map(load_config).transpose()?;
    let config = config.as_ref();
    let g = &cli.global;
    let backend = g.backend.map(BackendChoice::from);

    macro_rules! finish {
        ($params:expr, $run:path) => {{
            let params = finalize($params, config)?;
            let out = $run(&params)?;
            let (seed, backend) = identity(&params, g);
            let written = experiments::write_outputs(&g.out, &out, &params, seed, backend)?;
            Ok((out, written))
        }};
    }

    match &cli.command {
        Command::TheoremCheck { ls, states, filling, state } => {
            let mut p = experiments::TheoremParams::default();
            set(&mut p.ls, ls.clone());
            set(&mut p.states, *states);
            set(&mut p.seed, g.seed);
            set(&mut p.backend, backend);
            set(
                &mut p.filling,
                filling.map(|f| match f {
                    FillingArg::Half => experiments::Filling::Half,
                    FillingArg::OffHalf => experiments::Filling::OffHalf,
                }),
            );
            set(
                &mut p.state,
                state.map(|s| match s {
                    TheoremStateArg::Random => experiments::TheoremState::Random,
                    TheoremStateArg::AppendixBFixture => experiments::TheoremState::AppendixBFixture,
                }),
            );
            finish!(p, experiments::theorem_check)
        }
        Command::EeSweep { mode, state, ls, l, n_ms, trials } => {
            let mut p = experiments::EeSweepParams::default();
            set(
                &mut p.mode,
                mode.map(|m| match m {
                    ModeArg::Left => experiments::SweepMode::Left,
                    ModeArg::Right => experiments::SweepMode::Right,
                }),
            );
            set(&mut p.state, state.map(Into::into));
            set(&mut p.ls, ls.clone());
            set(&mut p.l, *l);
            set(&mut p.n_ms, n_ms.clone());
            set(&mut p.trials, *trials);
            set(&mut p.seed, g.seed);
            set(&mut p.backend, backend);
            finish!(p, experiments::ee_sweep)
        }
        Command::ImperfectBell { l, epsilons, n_ms, trials, state } => {
            let mut p = experiments::ImperfectBellParams::default();
            set(&mut p.l, *l);
            set(&mut p.epsilons, epsilons.clone());
            set(&mut p.n_ms, n_ms.clone());
            set(&mut p.trials, *trials);
            set(&mut p.state, state.map(Into::into));
            set(&mut p.seed, g.seed);
            set(&mut p.backend, backend);
            finish!(p, experiments::imperfect_bell)
        }
        Command::ImperfectCopy { m0, ls, dms } => {
            let mut p = experiments::ImperfectCopyParams::default();
            set(&mut p.m0, *m0);
            set(&mut p.ls, ls.clone());
            set(&mut p.dms, dms.clone());
            set(&mut p.seed, g.seed);
            set(&mut p.backend, backend);
            finish!(p, experiments::imperfect_copy)
        }
        Command::ProbScaling { m0s, ls } => {
            let mut p = experiments::ProbScalingParams::default();
            set(&mut p.m0s, m0s.clone());
            set(&mut p.ls, ls.clone());
            set(&mut p.seed, g.seed);
            finish!(p, experiments::prob_scaling)
        }
        Command::PluckerVerify {
            matrices,
            shape,
            inject_sign_fault,
            wavefunction_instances,
        } => {
            let mut p = experiments::PluckerParams::default();
            set(&mut p.matrices, *matrices);
            p.shape = shape.clone().or(p.shape);
            p.inject_sign_fault |= inject_sign_fault;
            set(&mut p.wavefunction_instances, *wavefunction_instances);
            set(&mut p.seed, g.seed);
            finish!(p, experiments::plucker_verify)
        }
        Command::OracleCompare { ls, states, epsilons } => {
            let mut p = experiments::OracleCompareParams::default();
            set(&mut p.ls, ls.clone());
            set(&mut p.states, *states);
            set(&mut p.epsilons, epsilons.clone());
            set(&mut p.seed, g.seed);
            finish!(p, experiments::oracle_compare)
        }
    }
}

/// Per-row entropies in the requested units, for tables that carry one.
fn entropy_lines(out: &ExperimentOutput, units: Units) -> Vec<String> {
    let mut lines = Vec::new();
    for t in &out.tables {
        let (col, scale) = match (t.column("entropy_nats"), t.column("entropy_log2_units")) {
            (Some(c), _) => (c, 1.0),
            (None, Some(c)) => (c, LN_2),
            _ => continue,
        };
        for row in &t.rows {
            let Ok(s) = row[col].parse::<f64>() else { continue };
            let key: Vec<String> = t.header.iter().zip(row).take(2).map(|(h, v)| format!("{h} = {}", short(v))).collect();
            lines.push(format!("  {}: S(A_R) = {:.10} {}", key.join(", "), units.convert(s * scale).max(0.0), units.label()));
        }
    }
    lines
}

fn short(v: &str) -> String {
    v.parse::<f64>().map_or_else(|_| v.to_string(), |x| format!("{x}"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let units = match cli.global.units {
        UnitsArg::Nats => Units::Nats,
        UnitsArg::Log2 => Units::Log2,
    };
    match run(&cli) {
        Ok((out, written)) => {
            for line in &out.summary {
                println!("[{}] {line}", out.experiment);
            }
            for line in entropy_lines(&out, units) {
                println!("{line}");
            }
            for f in &out.failures {
                eprintln!("[{}] FAIL {}: {}", out.experiment, f.check, f.detail);
            }
            for p in &written {
                println!("[{}] wrote {}", out.experiment, p.display());
            }
            if out.passed() {
                println!("[{}] PASS", out.experiment);
                ExitCode::SUCCESS
            } else {
                println!("[{}] FAIL ({} failed checks)", out.experiment, out.failures.len());
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("bellswap: {e}");
            ExitCode::from(2)
        }
    }
}
