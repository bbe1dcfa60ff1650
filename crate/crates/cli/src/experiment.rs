//! Batch optimization over random target families.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use skewcirc::optimizer::infallible;
use skewcirc::{minimize, random_antisym, AntisymLoss, MatrixFamily, OptConfig, OptTrace, ParamVector};

use crate::error::{CliError, CliResult};
use crate::svg::{loss_chart, Series};

pub const CSV_HEADER: &str = "run_id,n_q,family,seed,restart,iteration,loss";
pub const MIN_QUBITS: usize = 2;
pub const MAX_QUBITS: usize = 7;
pub const DEFAULT_INSTANCES: usize = 30;

/// Mixed into the matrix seed to obtain the optimizer seed of an instance.
pub const OPT_SEED_MASK: u64 = 0xA5A5_A5A5_A5A5_A5A5;

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub n_qubits_list: Vec<usize>,
    pub family: MatrixFamily,
    pub instances: usize,
    pub base_seed: u64,
    pub opt: OptConfig,
    pub out_dir: PathBuf,
}

impl ExperimentSpec {
    pub fn validate(&self) -> CliResult<()> {
        if self.n_qubits_list.is_empty() {
            return Err(CliError::Usage("at least one qubit count is required".into()));
        }
        if let Some(n) = self
            .n_qubits_list
            .iter()
            .find(|n| !(MIN_QUBITS..=MAX_QUBITS).contains(*n))
        {
            return Err(CliError::Usage(format!(
                "qubit count {n} outside {MIN_QUBITS}..={MAX_QUBITS}"
            )));
        }
        if self.instances == 0 {
            return Err(CliError::Usage("instances must be at least 1".into()));
        }
        self.opt.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct InstanceResult {
    pub run_id: String,
    pub n_qubits: usize,
    pub family: MatrixFamily,
    /// Seed of the target matrix; the optimizer uses `seed ^ OPT_SEED_MASK`.
    pub seed: u64,
    pub trace: OptTrace,
}

impl InstanceResult {
    pub fn initial_loss(&self) -> f64 {
        self.trace.runs[0].losses[0]
    }

    pub fn final_loss(&self) -> f64 {
        self.trace.final_loss()
    }
}

pub fn run_id(n_qubits: usize, family: MatrixFamily, index: usize) -> String {
    format!("n{n_qubits}-{}-{index:04}", family.tag())
}

/// Optimizes one instance: target seed `base_seed + index`, random start from the optimizer seed.
pub fn run_instance(
    n_qubits: usize,
    family: MatrixFamily,
    base_seed: u64,
    index: usize,
    opt: &OptConfig,
) -> CliResult<InstanceResult> {
    let seed = base_seed.wrapping_add(index as u64);
    let target = random_antisym(n_qubits, family, seed)?;
    let loss = AntisymLoss::new(&target)?;
    let cfg = OptConfig {
        seed: seed ^ OPT_SEED_MASK,
        ..opt.clone()
    };
    let init = ParamVector::random_init(n_qubits, cfg.seed)?;
    let mut trace = minimize(infallible(|p| loss.eval(p)), &init, &cfg)?;
    let id = run_id(n_qubits, family, index);
    trace.run_id = id.clone();
    Ok(InstanceResult {
        run_id: id,
        n_qubits,
        family,
        seed,
        trace,
    })
}

/// Runs every instance, in parallel, returning results sorted by run id.
pub fn run_experiment(spec: &ExperimentSpec) -> CliResult<Vec<InstanceResult>> {
    spec.validate()?;
    let mut ns = spec.n_qubits_list.clone();
    ns.sort_unstable();
    ns.dedup();
    let jobs: Vec<(usize, usize)> = ns
        .iter()
        .flat_map(|&n| (0..spec.instances).map(move |i| (n, i)))
        .collect();
    let mut results = jobs
        .par_iter()
        .map(|&(n, i)| run_instance(n, spec.family, spec.base_seed, i, &spec.opt))
        .collect::<CliResult<Vec<_>>>()?;
    results.sort_by(|a, b| a.run_id.cmp(&b.run_id));
    Ok(results)
}

/// Every restart of every instance, ordered by run id, restart, iteration.
pub fn to_csv(results: &[InstanceResult]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in results {
        for (restart, run) in r.trace.runs.iter().enumerate() {
            for (iteration, loss) in run.losses.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{restart},{iteration},{loss:e}",
                    r.run_id,
                    r.n_qubits,
                    r.family.tag(),
                    r.seed
                );
            }
        }
    }
    out
}

/// One chart per qubit count, overlaying the selected run of each instance.
pub fn charts(results: &[InstanceResult]) -> Vec<(usize, String)> {
    let mut ns: Vec<usize> = results.iter().map(|r| r.n_qubits).collect();
    ns.dedup();
    ns.into_iter()
        .map(|n| {
            let series: Vec<Series> = results
                .iter()
                .filter(|r| r.n_qubits == n)
                .map(|r| Series {
                    label: &r.run_id,
                    values: &r.trace.losses,
                })
                .collect();
            let family = results.first().map(|r| r.family.tag()).unwrap_or("");
            (n, loss_chart(&format!("{family}, n_q = {n}"), &series))
        })
        .collect()
}

pub const CSV_NAME: &str = "losses.csv";

pub fn chart_name(n_qubits: usize) -> String {
    format!("loss_nq{n_qubits}.svg")
}

/// Writes `losses.csv` and one `loss_nq{n}.svg` per qubit count into `out_dir`.
pub fn write_artifacts(out_dir: &Path, results: &[InstanceResult]) -> CliResult<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let mut written = Vec::new();
    let csv = out_dir.join(CSV_NAME);
    fs::write(&csv, to_csv(results)).map_err(|e| CliError::io(&csv, e))?;
    written.push(csv);
    for (n, svg) in charts(results) {
        let path = out_dir.join(chart_name(n));
        fs::write(&path, svg).map_err(|e| CliError::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
