use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use skewcirc::optimizer::{infallible, UNITARY_TARGET_TOL};
use skewcirc::spectral::{dft_matrix, phase_diagonal};
use skewcirc::{
    build_g, expm_pade, frobenius_distance, g_spectrum, loss_antisym, minimize, nearest_unitary,
    random_antisym, verify_spectrum, warm_start, AntisymLoss, AntisymMatrix, ComplexDense, LossMode,
    MatrixFamily, OptConfig, OptTrace, ParamVector, UnitaryLoss, C64,
};

use crate::error::{exit, CliError, CliResult};
use crate::experiment::{self, ExperimentSpec, CSV_HEADER, DEFAULT_INSTANCES};
use crate::io;

pub const RESIDUAL_TOL: f64 = 1e-10;
pub const UNITARITY_TOL: f64 = 1e-12;
pub const FACTORIZATION_TOL: f64 = 1e-12;
pub const EXPM_TOL: f64 = 1e-8;
pub const VERIFY_MAX_QUBITS: usize = 6;

/// Unitary inputs further than this (in `||U^dagger U - I||_F`) are rejected
/// rather than projected onto the nearest unitary.
pub const PROJECTION_TOL: f64 = 0.1;

#[derive(Debug, Parser)]
#[command(name = "skewcirc", version, about = "Circuits for exponentials of real antisymmetric matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the closed-form spectrum of the uniform matrix G.
    Verify {
        #[arg(long, short = 'n')]
        n_qubits: usize,
        /// Constant diagonal g.
        #[arg(long, short = 'g', default_value_t = 0.0, allow_negative_numbers = true)]
        diag_shift: f64,
    },
    /// Fit the circuit to one matrix read from a file.
    Approximate(ApproximateArgs),
    /// Batch runs over random targets; writes a loss CSV and one SVG per qubit count.
    Experiment(ExperimentArgs),
    /// Write a random antisymmetric matrix file.
    Gen {
        #[arg(long, short = 'n')]
        n_qubits: usize,
        #[arg(long, default_value = "UNIFORM_REAL")]
        family: MatrixFamily,
        /// Zero probability for PM1_SPARSE.
        #[arg(long)]
        sparsity: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short = 'o')]
        out: PathBuf,
    },
    /// Print the warm-start parameters and their loss against G.
    Warmstart {
        #[arg(long, short = 'n')]
        n_qubits: usize,
        /// Also write the parameters to this file.
        #[arg(long, short = 'o')]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct OptArgs {
    #[arg(long, default_value_t = 500)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 3)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Final loss at or below this counts as converged.
    #[arg(long, default_value_t = 0.05)]
    pub threshold: f64,
}

impl OptArgs {
    pub fn config(&self) -> OptConfig {
        OptConfig {
            max_iters: self.max_iter,
            max_restarts: self.restarts,
            seed: self.seed,
            success_threshold: self.threshold,
            ..OptConfig::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ApproximateArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub opt: OptArgs,
    /// Input is a unitary (`re,im` entries); fit U(theta) to it directly.
    #[arg(long)]
    pub unitary: bool,
    /// Use the fidelity loss. Antisymmetric inputs are exponentiated first.
    #[arg(long)]
    pub fidelity: bool,
    /// Start from the closed-form parameters for G instead of a random draw.
    #[arg(long)]
    pub warm_start: bool,
    /// Directory for trace.csv and params.txt.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ExperimentArgs {
    /// Comma-separated qubit counts in 2..=7.
    #[arg(long, short = 'n', value_delimiter = ',', required = true)]
    pub n_qubits: Vec<usize>,
    #[arg(long, default_value = "UNIFORM_REAL")]
    pub family: MatrixFamily,
    #[arg(long)]
    pub sparsity: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_INSTANCES)]
    pub instances: usize,
    #[command(flatten)]
    pub opt: OptArgs,
    #[arg(long)]
    pub out_dir: PathBuf,
}

pub fn run(cli: Cli) -> CliResult<u8> {
    match cli.command {
        Command::Verify {
            n_qubits,
            diag_shift,
        } => {
            let report = verify(n_qubits, diag_shift)?;
            print!("{}", report.text);
            Ok(if report.passed { exit::SUCCESS } else { exit::NOT_CONVERGED })
        }
        Command::Approximate(args) => approximate(&args),
        Command::Experiment(args) => run_experiment_cmd(&args),
        Command::Gen {
            n_qubits,
            family,
            sparsity,
            seed,
            out,
        } => {
            let family = with_sparsity(family, sparsity)?;
            gen(n_qubits, family, seed, &out)?;
            println!("wrote {}", out.display());
            Ok(exit::SUCCESS)
        }
        Command::Warmstart { n_qubits, out } => {
            let p = warm_start(n_qubits)?;
            let target = AntisymMatrix::from_upper(1 << n_qubits, |_, _| 1.0);
            print!("{}", io::format_params(&p));
            println!("loss vs G: {:e}", loss_antisym(&p, &target)?);
            if let Some(out) = out {
                io::write_params(&out, &p)?;
            }
            Ok(exit::SUCCESS)
        }
    }
}

fn with_sparsity(family: MatrixFamily, sparsity: Option<f64>) -> CliResult<MatrixFamily> {
    match (family, sparsity) {
        (f, None) => Ok(f),
        (MatrixFamily::Pm1Sparse { .. }, Some(s)) => Ok(MatrixFamily::pm1_sparse(s)?),
        (f, Some(_)) => Err(CliError::Usage(format!("--sparsity does not apply to {f}"))),
    }
}

pub struct VerifyReport {
    pub eigenvalues: Vec<C64>,
    pub max_residual: f64,
    pub unitarity: f64,
    pub factorization: f64,
    pub expm_gap: f64,
    pub passed: bool,
    pub text: String,
}

pub fn verify(n_qubits: usize, diag_shift: f64) -> CliResult<VerifyReport> {
    if !(1..=VERIFY_MAX_QUBITS).contains(&n_qubits) {
        return Err(CliError::Usage(format!(
            "n_qubits must be in 1..={VERIFY_MAX_QUBITS}, got {n_qubits}"
        )));
    }
    if !diag_shift.is_finite() {
        return Err(CliError::Usage("diagonal shift must be finite".into()));
    }
    let spec = g_spectrum(n_qubits, diag_shift)?;
    let max_residual = verify_spectrum(&spec)?;
    let v = &spec.eigenvector_matrix;
    let unitarity = v.unitarity_defect();
    let dim = spec.dim;
    let df = ComplexDense::from_diag(&phase_diagonal(dim)).matmul(&dft_matrix(dim))?;
    let factorization = frobenius_distance(v, &df)?;
    let expm_gap = frobenius_distance(&spec.exp_reconstruction(), &expm_pade(&build_g(n_qubits, diag_shift)?)?)?;

    let checks = [
        ("max eigen-residual", max_residual, RESIDUAL_TOL),
        ("||V^dagger V - I||_F", unitarity, UNITARITY_TOL),
        ("||V - D F||_F", factorization, FACTORIZATION_TOL),
        ("||V e^L V^dagger - expm(G)||_F", expm_gap, EXPM_TOL),
    ];
    let passed = checks.iter().all(|(_, v, tol)| *v <= *tol);

    let mut text = format!("N = {dim}, g = {diag_shift}\neigenvalues:\n");
    for (k, z) in spec.eigenvalues.iter().enumerate() {
        let _ = writeln!(text, "  {k:>3}: {} {} {}i", z.re, if z.im < 0.0 { '-' } else { '+' }, z.im.abs());
    }
    for (name, value, tol) in checks {
        let status = if value <= tol { "ok" } else { "FAIL" };
        let _ = writeln!(text, "{name:<32} {value:.3e} (tol {tol:.0e}) {status}");
    }
    Ok(VerifyReport {
        eigenvalues: spec.eigenvalues.clone(),
        max_residual,
        unitarity,
        factorization,
        expm_gap,
        passed,
        text,
    })
}

/// Loads a unitary target, projecting rounded inputs onto the nearest unitary.
pub fn load_unitary(path: &std::path::Path) -> CliResult<ComplexDense> {
    let u = io::read_complex(path)?;
    let defect = u.unitarity_defect();
    if defect <= UNITARY_TARGET_TOL {
        return Ok(u);
    }
    if defect > PROJECTION_TOL {
        return Err(CliError::Validation(format!(
            "{}: matrix is not unitary (||U^dagger U - I||_F = {defect:.3e})",
            path.display()
        )));
    }
    eprintln!(
        "note: input deviates from unitarity by {defect:.3e}; using the nearest unitary"
    );
    Ok(nearest_unitary(&u)?)
}

type BoxedLoss = Box<dyn Fn(&ParamVector) -> f64 + Sync>;

pub struct ApproximateOutcome {
    pub trace: OptTrace,
    pub n_qubits: usize,
}

pub fn approximate_run(args: &ApproximateArgs) -> CliResult<ApproximateOutcome> {
    let cfg = args.opt.config();
    cfg.validate()?;
    let (n_qubits, loss): (usize, BoxedLoss) = if args.unitary {
        let u = load_unitary(&args.input)?;
        let mode = if args.fidelity { LossMode::Fidelity } else { LossMode::Frobenius };
        let l = UnitaryLoss::new(&u, mode)?;
        (l.n_qubits(), Box::new(infallible(move |p| l.eval(p))))
    } else {
        let a = io::read_antisym(&args.input)?;
        if args.fidelity {
            let u = expm_pade(&a.to_complex())?;
            let l = UnitaryLoss::new(&u, LossMode::Fidelity)?;
            (l.n_qubits(), Box::new(infallible(move |p| l.eval(p))))
        } else {
            let l = AntisymLoss::new(&a)?;
            (l.n_qubits(), Box::new(infallible(move |p| l.eval(p))))
        }
    };
    let init = if args.warm_start {
        warm_start(n_qubits)?
    } else {
        ParamVector::random_init(n_qubits, cfg.seed)?
    };
    let mut trace = minimize(loss, &init, &cfg)?;
    trace.run_id = "approximate".into();
    Ok(ApproximateOutcome { trace, n_qubits })
}

pub fn trace_csv(trace: &OptTrace, n_qubits: usize, family: &str, seed: u64) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for (restart, run) in trace.runs.iter().enumerate() {
        for (iteration, loss) in run.losses.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{n_qubits},{family},{seed},{restart},{iteration},{loss:e}",
                trace.run_id
            );
        }
    }
    out
}

fn approximate(args: &ApproximateArgs) -> CliResult<u8> {
    let ApproximateOutcome { trace, n_qubits } = approximate_run(args)?;
    fs::create_dir_all(&args.out_dir).map_err(|e| CliError::io(&args.out_dir, e))?;
    let csv_path = args.out_dir.join("trace.csv");
    let family = if args.unitary { "UNITARY" } else { "INPUT" };
    fs::write(&csv_path, trace_csv(&trace, n_qubits, family, args.opt.seed))
        .map_err(|e| CliError::io(&csv_path, e))?;
    let params_path = args.out_dir.join("params.txt");
    io::write_params(&params_path, &trace.final_params)?;

    println!("initial loss: {:e}", trace.initial_loss());
    println!("final loss: {:e}", trace.final_loss());
    println!(
        "iterations: {} (restart {} of {})",
        trace.losses.len() - 1,
        trace.best_restart,
        trace.restarts_used
    );
    println!("converged: {}", trace.converged);
    println!("wrote {} and {}", csv_path.display(), params_path.display());
    Ok(if trace.converged { exit::SUCCESS } else { exit::NOT_CONVERGED })
}

pub fn experiment_spec(args: &ExperimentArgs) -> CliResult<ExperimentSpec> {
    Ok(ExperimentSpec {
        n_qubits_list: args.n_qubits.clone(),
        family: with_sparsity(args.family, args.sparsity)?,
        instances: args.instances,
        base_seed: args.opt.seed,
        opt: args.opt.config(),
        out_dir: args.out_dir.clone(),
    })
}

fn run_experiment_cmd(args: &ExperimentArgs) -> CliResult<u8> {
    let spec = experiment_spec(args)?;
    let results = experiment::run_experiment(&spec)?;
    let written = experiment::write_artifacts(&spec.out_dir, &results)?;
    let mut ns: Vec<usize> = results.iter().map(|r| r.n_qubits).collect();
    ns.dedup();
    for n in ns {
        let mut finals: Vec<f64> = results
            .iter()
            .filter(|r| r.n_qubits == n)
            .map(|r| r.final_loss())
            .collect();
        let hits = finals.iter().filter(|l| **l <= spec.opt.success_threshold).count();
        finals.sort_by(f64::total_cmp);
        println!(
            "n_q = {n}: {hits}/{} runs at or below {}, median final loss {:e}",
            finals.len(),
            spec.opt.success_threshold,
            finals[finals.len() / 2]
        );
    }
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(exit::SUCCESS)
}

pub fn gen(n_qubits: usize, family: MatrixFamily, seed: u64, out: &std::path::Path) -> CliResult<()> {
    let a = random_antisym(n_qubits, family, seed)?;
    io::write_antisym(out, &a)
}
