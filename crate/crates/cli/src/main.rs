use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use seqeffects::criteria::{cross_validate, search_criterion2_gap, verify_criteria, GapProtocol};
use seqeffects::matcore::MAX_DIM;
use seqeffects::quantum::{random_commuting_povm_pair, random_density, random_effect, random_povm, random_pvm};
use seqeffects::seqprod::{sample_sequential, verify_axioms, verify_phase_calculus, SuiteReport};
use seqeffects::{PhaseFamily, Tolerances};
use seqeffects_cli::instance::split_reference;
use seqeffects_cli::{InstanceError, InstanceFile};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "seqeffects", version, about = "Sequential products and non-disturbance checks for POVMs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Exponent parameter of f(t) = xi0 * t^(1/2 + i c).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    c: f64,
    /// Phase angle of xi0 in radians.
    #[arg(long = "xi0-arg", default_value_t = 0.0, allow_negative_numbers = true)]
    xi0_arg: f64,
    /// Relative matrix-equality tolerance.
    #[arg(long = "tol-mat-eq")]
    tol_mat_eq: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, default_value_t = 3)]
    dim: usize,
    /// Write JSON here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance file.
    Gen {
        kind: GenKind,
        /// Outcomes of the (first) POVM.
        #[arg(long, default_value_t = 2)]
        m: usize,
        /// Outcomes of the second POVM of a pair.
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Number of projections in a PVM.
        #[arg(long, default_value_t = 2)]
        parts: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate criteria (I)-(III) and their characterizations for X, Y.
    Check {
        /// `path` or `path#name` of X.
        x: String,
        /// `path` or `path#name` of Y.
        y: String,
        /// Also evaluate criterion (II) at this state.
        #[arg(long)]
        state: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Run the randomized property suites.
    Verify {
        #[command(flatten)]
        common: Common,
    },
    /// Sample "measure X, then Y" outcomes in a state.
    Simulate {
        x: String,
        y: String,
        state: String,
        #[command(flatten)]
        common: Common,
    },
    /// Search for incompatible pairs that leave Y statistics undisturbed.
    Search {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Effect,
    Density,
    Povm,
    CommutingPair,
    Pvm,
}

enum Failure {
    Assertion(String),
    Input(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Assertion(_) => 1,
            Failure::Input(_) => 2,
            Failure::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Assertion(m) | Failure::Input(m) | Failure::Io(m) => m,
        }
    }
}

impl From<InstanceError> for Failure {
    fn from(e: InstanceError) -> Self {
        match e {
            InstanceError::Io(m) => Failure::Io(m),
            InstanceError::Invalid(m) => Failure::Input(m),
        }
    }
}

impl From<seqeffects::Error> for Failure {
    fn from(e: seqeffects::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

#[derive(Serialize)]
struct RunConfig {
    family: PhaseFamily,
    xi0_arg: f64,
    tolerances: Tolerances,
    gap: GapProtocol,
    seed: u64,
    trials: Option<u64>,
    dim: usize,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    command: &'a str,
    config: RunConfig,
    report: T,
}

impl Common {
    fn family(&self) -> Result<PhaseFamily, Failure> {
        if !self.c.is_finite() || !self.xi0_arg.is_finite() {
            return Err(Failure::Input("--c and --xi0-arg must be finite".into()));
        }
        Ok(PhaseFamily::new(self.c, self.xi0_arg))
    }

    fn tolerances(&self) -> Result<Tolerances, Failure> {
        let tol = match self.tol_mat_eq {
            Some(t) => Tolerances::default().with_mat_eq(t),
            None => Tolerances::default(),
        };
        if tol.is_valid() {
            Ok(tol)
        } else {
            Err(Failure::Input("--tol-mat-eq must be positive and finite".into()))
        }
    }

    fn check_dim(&self) -> Result<(), Failure> {
        if (1..=MAX_DIM).contains(&self.dim) {
            Ok(())
        } else {
            Err(Failure::Input(format!("--dim must lie in 1..={MAX_DIM}")))
        }
    }

    fn config(&self, trials: Option<u64>) -> Result<RunConfig, Failure> {
        Ok(RunConfig {
            family: self.family()?,
            xi0_arg: self.xi0_arg,
            tolerances: self.tolerances()?,
            gap: GapProtocol::default(),
            seed: self.seed,
            trials,
            dim: self.dim,
        })
    }

    fn emit<T: Serialize>(&self, command: &str, config: RunConfig, report: T) -> Result<(), Failure> {
        let text = serde_json::to_string_pretty(&Envelope {
            command,
            config,
            report,
        })
        .expect("reports serialize");
        write_output(self.out.as_deref(), &text)
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, format!("{text}\n")).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = io::stdout().lock();
            writeln!(stdout, "{text}")
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Io(format!("standard output: {e}")))
        }
    }
}

fn load_povm(reference: &str, tol: &Tolerances) -> Result<seqeffects::Povm, Failure> {
    let (path, name) = split_reference(reference);
    Ok(InstanceFile::read(Path::new(path), tol)?.povm(name, tol)?)
}

fn load_state(reference: &str, tol: &Tolerances) -> Result<seqeffects::DensityOperator, Failure> {
    let (path, name) = split_reference(reference);
    Ok(InstanceFile::read(Path::new(path), tol)?.state(name, tol)?)
}

fn gen(kind: GenKind, m: usize, n: usize, parts: usize, common: &Common) -> Result<(), Failure> {
    common.check_dim()?;
    let (dim, seed) = (common.dim, common.seed);
    let file = InstanceFile::new(dim);
    let file = match kind {
        GenKind::Effect => file.with_effect("E", &random_effect(dim, seed)?),
        GenKind::Density => file.with_state("W", &random_density(dim, seed)?),
        GenKind::Povm => file.with_povm("X", &random_povm(dim, m, seed)?),
        GenKind::Pvm => file.with_povm("X", &random_pvm(dim, parts, seed)?),
        GenKind::CommutingPair => {
            let (x, y) = random_commuting_povm_pair(dim, m, n, seed)?;
            file.with_povm("X", &x).with_povm("Y", &y)
        }
    };
    file.validate(&common.tolerances()?)?;
    write_output(common.out.as_deref(), &file.to_json())
}

fn check(x: &str, y: &str, state: Option<&str>, common: &Common) -> Result<(), Failure> {
    let tol = common.tolerances()?;
    let fam = common.family()?;
    let x = load_povm(x, &tol)?;
    let y = load_povm(y, &tol)?;
    let w = state.map(|s| load_state(s, &tol)).transpose()?;
    let gap = GapProtocol::default();
    let report = cross_validate(&fam, &x, &y, w.as_ref(), &tol, &gap)?;
    let mut config = common.config(None)?;
    config.dim = x.dim();
    let violations = report.violations.clone();
    common.emit("check", config, report)?;
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Failure::Assertion(violations.join("; ")))
    }
}

#[derive(Serialize)]
struct VerifyReport {
    passed: bool,
    suites: Vec<SuiteReport>,
}

fn verify(common: &Common) -> Result<(), Failure> {
    common.check_dim()?;
    let fam = common.family()?;
    let trials = common.trials.unwrap_or(200);
    let suites = vec![
        verify_axioms(&fam, common.dim, trials, common.seed),
        verify_phase_calculus(&fam, common.dim, trials, common.seed),
        verify_criteria(&fam, common.dim, trials, common.seed),
    ];
    let passed = suites.iter().all(SuiteReport::passed);
    common.emit("verify", common.config(Some(trials))?, VerifyReport { passed, suites })?;
    if passed {
        Ok(())
    } else {
        Err(Failure::Assertion("a suite property exceeded its threshold".into()))
    }
}

#[derive(Serialize)]
struct SimulationReport {
    counts: Vec<Vec<u64>>,
    exact: Vec<Vec<f64>>,
    total: u64,
    z_scores: Vec<Vec<f64>>,
    max_abs_z: f64,
}

const Z_LIMIT: f64 = 5.0;

fn simulate(x: &str, y: &str, state: &str, common: &Common) -> Result<(), Failure> {
    let tol = common.tolerances()?;
    let fam = common.family()?;
    let x = load_povm(x, &tol)?;
    let y = load_povm(y, &tol)?;
    let w = load_state(state, &tol)?;
    let trials = common.trials.unwrap_or(10_000);
    let table = sample_sequential(&fam, &w, &x, &y, trials, common.seed)?;
    let max_abs_z = table.max_abs_z();
    let report = SimulationReport {
        z_scores: table.z_scores(),
        counts: table.counts,
        exact: table.exact,
        total: table.total,
        max_abs_z,
    };
    let mut config = common.config(Some(trials))?;
    config.dim = w.dim();
    common.emit("simulate", config, report)?;
    if max_abs_z > Z_LIMIT {
        Err(Failure::Assertion(format!("max |z| = {max_abs_z:.2} exceeds {Z_LIMIT}")))
    } else {
        Ok(())
    }
}

fn search(common: &Common) -> Result<(), Failure> {
    let fam = common.family()?;
    let trials = common.trials.unwrap_or(100);
    let findings = search_criterion2_gap(&fam, common.dim, trials, common.seed)?;
    common.emit("search", common.config(Some(trials))?, findings)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Gen {
            kind,
            m,
            n,
            parts,
            common,
        } => gen(*kind, *m, *n, *parts, common),
        Command::Check { x, y, state, common } => check(x, y, state.as_deref(), common),
        Command::Verify { common } => verify(common),
        Command::Simulate { x, y, state, common } => simulate(x, y, state, common),
        Command::Search { common } => search(common),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("seqeffects: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
