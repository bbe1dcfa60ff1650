//! Loss functions and a limited-memory BFGS minimizer driven by central
//! finite differences, with seeded random restarts.

use std::time::Instant;

use rayon::prelude::*;

use crate::circuit::{assemble_u, reconstruct_generator, ParamVector};
use crate::dense::{frobenius_distance, AntisymMatrix, ComplexDense};
use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::spectral::qubits_for_dim;

/// Unitarity tolerance for targets of [`UnitaryLoss`].
pub const UNITARY_TARGET_TOL: f64 = 1e-8;

const LBFGS_MEMORY: usize = 10;
const ARMIJO_C1: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;

#[derive(Debug, Clone, PartialEq)]
pub struct OptConfig {
    pub max_iters: usize,
    pub grad_step: f64,
    /// Absolute loss change below which a run stops.
    pub loss_tol: f64,
    pub max_restarts: usize,
    pub success_threshold: f64,
    pub seed: u64,
}

impl Default for OptConfig {
    fn default() -> Self {
        Self {
            max_iters: 500,
            grad_step: 1e-6,
            loss_tol: 1e-9,
            max_restarts: 3,
            success_threshold: 0.05,
            seed: 0,
        }
    }
}

impl OptConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be positive".into()));
        }
        if !(self.grad_step > 0.0 && self.grad_step.is_finite()) {
            return Err(Error::Config("grad_step must be positive".into()));
        }
        if self.loss_tol.is_nan() || self.loss_tol < 0.0 {
            return Err(Error::Config("loss_tol must be non-negative".into()));
        }
        if self.success_threshold.is_nan() || self.success_threshold < 0.0 {
            return Err(Error::Config("success_threshold must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    MaxIters,
    LossTolerance,
    /// No descent step could be found; the iterate is at numerical precision.
    Stalled,
    Stationary,
}

/// One optimization run from one starting point.
#[derive(Debug, Clone, PartialEq)]
pub struct RunHistory {
    /// Loss at the start point followed by the loss after every accepted step.
    pub losses: Vec<f64>,
    pub final_point: Vec<f64>,
    pub stop: StopReason,
}

impl RunHistory {
    pub fn final_loss(&self) -> f64 {
        *self.losses.last().expect("history is never empty")
    }
}

#[derive(Debug, Clone)]
pub struct OptTrace {
    pub run_id: String,
    /// Losses of the selected (best) restart.
    pub losses: Vec<f64>,
    pub final_params: ParamVector,
    /// Restarts performed beyond the first run.
    pub restarts_used: usize,
    pub best_restart: usize,
    /// Loss history of every run, indexed by restart.
    pub runs: Vec<RunHistory>,
    pub converged: bool,
    pub wall_time: f64,
}

impl OptTrace {
    pub fn final_loss(&self) -> f64 {
        *self.losses.last().expect("losses are never empty")
    }

    pub fn initial_loss(&self) -> f64 {
        self.losses[0]
    }
}

/// `||A - Ã||_F` against a fixed antisymmetric target.
#[derive(Debug, Clone)]
pub struct AntisymLoss {
    target: ComplexDense,
    n_qubits: usize,
}

impl AntisymLoss {
    pub fn new(target: &AntisymMatrix) -> Result<Self> {
        Ok(Self {
            n_qubits: qubits_for_dim(target.dim())?,
            target: target.to_complex(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn eval(&self, params: &ParamVector) -> Result<f64> {
        frobenius_distance(&self.target, &reconstruct_generator(params))
    }
}

pub fn loss_antisym(params: &ParamVector, target: &AntisymMatrix) -> Result<f64> {
    AntisymLoss::new(target)?.eval(params)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossMode {
    /// `||U_A - U(theta)||_F`
    Frobenius,
    /// `1 - |tr(U_A^† U(theta))| / N`
    Fidelity,
}

#[derive(Debug, Clone)]
pub struct UnitaryLoss {
    target: ComplexDense,
    target_adjoint: ComplexDense,
    mode: LossMode,
    n_qubits: usize,
}

impl UnitaryLoss {
    pub fn new(target: &ComplexDense, mode: LossMode) -> Result<Self> {
        let n_qubits = qubits_for_dim(target.dim())?;
        let deviation = target.unitarity_defect();
        if deviation > UNITARY_TARGET_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self {
            target: target.clone(),
            target_adjoint: target.adjoint(),
            mode,
            n_qubits,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn eval(&self, params: &ParamVector) -> Result<f64> {
        let u = assemble_u(params);
        match self.mode {
            LossMode::Frobenius => frobenius_distance(&self.target, &u),
            LossMode::Fidelity => {
                if u.dim() != self.target.dim() {
                    return Err(Error::DimensionMismatch {
                        left: self.target.dim(),
                        right: u.dim(),
                    });
                }
                Ok(1.0 - trace_of_product(&self.target_adjoint, &u).norm() / u.dim() as f64)
            }
        }
    }
}

/// `tr(a b)` without forming the product.
fn trace_of_product(a: &ComplexDense, b: &ComplexDense) -> crate::C64 {
    let n = a.dim();
    (0..n)
        .map(|i| (0..n).map(|k| a[(i, k)] * b[(k, i)]).sum::<crate::C64>())
        .sum()
}

pub fn loss_unitary(params: &ParamVector, target_u: &ComplexDense, mode: LossMode) -> Result<f64> {
    UnitaryLoss::new(target_u, mode)?.eval(params)
}

/// Central differences `(f(x + h e_i) - f(x - h e_i)) / 2h`, components evaluated in parallel.
pub fn finite_diff_grad<F>(f: &F, x: &[f64], step: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    (0..x.len())
        .into_par_iter()
        .map(|i| {
            let mut xp = x.to_vec();
            xp[i] += step;
            let fp = f(&xp);
            xp[i] = x[i] - step;
            let fm = f(&xp);
            (fp - fm) / (2.0 * step)
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn checked<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64]) -> Result<f64> {
    let v = f(x);
    if v.is_nan() {
        return Err(Error::NanLoss { point: x.to_vec() });
    }
    Ok(v)
}

/// One L-BFGS run with Armijo backtracking.
pub fn lbfgs_run<F>(f: &F, x0: &[f64], cfg: &OptConfig) -> Result<RunHistory>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let mut x = x0.to_vec();
    let mut fx = checked(f, &x)?;
    let mut g = finite_diff_grad(f, &x, cfg.grad_step);
    if g.iter().any(|v| v.is_nan()) {
        return Err(Error::NanLoss { point: x });
    }
    let mut losses = vec![fx];
    let mut mem: Vec<(Vec<f64>, Vec<f64>, f64)> = Vec::with_capacity(LBFGS_MEMORY);
    let mut stop = StopReason::MaxIters;

    let mut iter = 0;
    while iter < cfg.max_iters {
        let gnorm = dot(&g, &g).sqrt();
        if gnorm == 0.0 || !gnorm.is_finite() {
            stop = StopReason::Stationary;
            break;
        }

        let mut d = two_loop(&g, &mem);
        let mut slope = dot(&g, &d);
        if mem.is_empty() || slope >= 0.0 {
            mem.clear();
            d = g.iter().map(|v| -v).collect();
            slope = -gnorm * gnorm;
        }
        let first_alpha = if mem.is_empty() { (1.0 / gnorm).min(1.0) } else { 1.0 };

        let mut alpha = first_alpha;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let trial: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + alpha * di).collect();
            let ft = checked(f, &trial)?;
            if ft <= fx + ARMIJO_C1 * alpha * slope && ft < fx {
                accepted = Some((trial, ft));
                break;
            }
            alpha *= 0.5;
        }

        let Some((x_new, f_new)) = accepted else {
            if !mem.is_empty() {
                // quasi-Newton direction failed; retry once along the gradient
                mem.clear();
                continue;
            }
            stop = StopReason::Stalled;
            break;
        };

        let g_new = finite_diff_grad(f, &x_new, cfg.grad_step);
        if g_new.iter().any(|v| v.is_nan()) {
            return Err(Error::NanLoss { point: x_new });
        }
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() && sy > 0.0 {
            if mem.len() == LBFGS_MEMORY {
                mem.remove(0);
            }
            mem.push((s, y, 1.0 / sy));
        }

        let change = fx - f_new;
        x = x_new;
        fx = f_new;
        g = g_new;
        losses.push(fx);
        iter += 1;

        if change < cfg.loss_tol {
            stop = StopReason::LossTolerance;
            break;
        }
    }

    Ok(RunHistory {
        losses,
        final_point: x,
        stop,
    })
}

/// Returns `-H g` for the inverse-Hessian estimate held in `mem`.
fn two_loop(g: &[f64], mem: &[(Vec<f64>, Vec<f64>, f64)]) -> Vec<f64> {
    let mut q: Vec<f64> = g.to_vec();
    let mut alphas = Vec::with_capacity(mem.len());
    for (s, y, rho) in mem.iter().rev() {
        let a = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= a * yi;
        }
        alphas.push(a);
    }
    if let Some((s, y, _)) = mem.last() {
        let gamma = dot(s, y) / dot(y, y);
        for qi in &mut q {
            *qi *= gamma;
        }
    }
    for ((s, y, rho), a) in mem.iter().zip(alphas.into_iter().rev()) {
        let b = rho * dot(y, &q);
        for (qi, si) in q.iter_mut().zip(s) {
            *qi += (a - b) * si;
        }
    }
    q.iter().map(|v| -v).collect()
}

/// Runs from `x0`, then restarts from `sample(rng)` while the best loss exceeds
/// the success threshold. The restart stream is seeded with `cfg.seed` and its
/// first draw is discarded, so restart `r` uses draw `r` of that stream.
pub fn minimize_flat<F, S>(
    f: &F,
    x0: &[f64],
    cfg: &OptConfig,
    mut sample: S,
) -> Result<(Vec<RunHistory>, usize)>
where
    F: Fn(&[f64]) -> f64 + Sync,
    S: FnMut(&mut Rng) -> Vec<f64>,
{
    cfg.validate()?;
    let mut rng = Rng::new(cfg.seed);
    let _ = sample(&mut rng);

    let mut runs = vec![lbfgs_run(f, x0, cfg)?];
    let mut best = 0;
    while runs[best].final_loss() > cfg.success_threshold && runs.len() <= cfg.max_restarts {
        let start = sample(&mut rng);
        let run = lbfgs_run(f, &start, cfg)?;
        if run.final_loss() < runs[best].final_loss() {
            best = runs.len();
        }
        runs.push(run);
    }
    Ok((runs, best))
}

/// Minimizes `loss` over circuit parameters starting from `initial`.
///
/// Λ parameters are clamped out of the cotangent singularity band before each
/// evaluation. Restart points are drawn with [`ParamVector::random`].
pub fn minimize<L>(loss: L, initial: &ParamVector, cfg: &OptConfig) -> Result<OptTrace>
where
    L: Fn(&ParamVector) -> f64 + Sync,
{
    let start = Instant::now();
    let n = initial.n_qubits();
    let flat_loss = |x: &[f64]| match ParamVector::from_flat_clamped(n, x) {
        Ok(p) => loss(&p),
        Err(_) => f64::NAN,
    };
    let (runs, best) = minimize_flat(&flat_loss, &initial.flatten(), cfg, |rng| {
        ParamVector::random(n, rng)
            .expect("qubit count already validated")
            .flatten()
    })?;
    let chosen = &runs[best];
    let final_params = ParamVector::from_flat_clamped(n, &chosen.final_point)?;
    let final_loss = chosen.final_loss();
    Ok(OptTrace {
        run_id: String::new(),
        losses: chosen.losses.clone(),
        final_params,
        restarts_used: runs.len() - 1,
        best_restart: best,
        converged: final_loss <= cfg.success_threshold,
        runs,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// Adapts a fallible loss to the `f64`-returning form the minimizer expects; errors become NaN.
pub fn infallible<'a, F>(f: F) -> impl Fn(&ParamVector) -> f64 + Sync + 'a
where
    F: Fn(&ParamVector) -> Result<f64> + Sync + 'a,
{
    move |p| f(p).unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::warm_start;
    use crate::spectral::build_g;
    use std::f64::consts::PI;

    fn g_antisym(n: usize) -> AntisymMatrix {
        AntisymMatrix::from_upper(1 << n, |_, _| 1.0)
    }

    #[test]
    fn gradient_of_constant_is_zero() {
        let g = finite_diff_grad(&|_: &[f64]| 3.5, &[0.1, 0.2, 0.3], 1e-6);
        assert_eq!(g, vec![0.0; 3]);
    }

    #[test]
    fn gradient_of_quadratic() {
        let g = finite_diff_grad(&|x: &[f64]| x[0] * x[0], &[0.3], 1e-6);
        assert!((g[0] - 0.6).abs() < 1e-6);
    }

    #[test]
    fn quadratic_sanity() {
        let f = |x: &[f64]| (x[0] - 1.7).powi(2);
        let cfg = OptConfig::default();
        let (runs, best) = minimize_flat(&f, &[-3.0], &cfg, |r| vec![r.uniform(-5.0, 5.0)]).unwrap();
        let run = &runs[best];
        assert!((run.final_point[0] - 1.7).abs() < 1e-8, "{:?}", run.final_point);
        assert!(run.losses.len() - 1 <= 20);
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let cfg = OptConfig {
            max_iters: 2000,
            loss_tol: 0.0,
            ..Default::default()
        };
        let run = lbfgs_run(&f, &[-1.2, 1.0], &cfg).unwrap();
        assert!(run.final_loss() < 1e-8, "{}", run.final_loss());
    }

    #[test]
    fn nan_loss_aborts_with_point() {
        let f = |x: &[f64]| if x[0] > 0.5 { f64::NAN } else { -x[0] };
        let err = lbfgs_run(&f, &[0.0], &OptConfig::default()).unwrap_err();
        assert!(matches!(err, Error::NanLoss { .. }));
    }

    #[test]
    fn antisym_loss_examples() {
        let g4 = g_antisym(2);
        let warm = warm_start(2).unwrap();
        assert!(loss_antisym(&warm, &g4).unwrap() <= 1e-6);
        let ident = ParamVector::block_identity(2).unwrap();
        let l = loss_antisym(&ident, &g4).unwrap();
        assert!((l - 12f64.sqrt()).abs() < 1e-12);
        assert!((l - 3.4641).abs() < 1e-4);
        // pi - theta negates every cotangent, so Ã = -G
        let mut flat = warm.flatten();
        let k = flat.len();
        for t in &mut flat[k - 2..] {
            *t = PI - *t;
        }
        let neg = ParamVector::from_flat(2, &flat).unwrap();
        let l = loss_antisym(&neg, &g4).unwrap();
        assert!((l - 2.0 * 12f64.sqrt()).abs() < 1e-12);
        assert!(loss_antisym(&warm, &g_antisym(3)).is_err());
    }

    #[test]
    fn unitary_loss_examples() {
        let p = ParamVector::random_init(2, 8).unwrap();
        let u = assemble_u(&p);
        for mode in [LossMode::Frobenius, LossMode::Fidelity] {
            assert!(loss_unitary(&p, &u, mode).unwrap().abs() < 1e-12);
        }
        for alpha in [PI / 3.0, 1.0] {
            let phased = u.scale(crate::C64::from_polar(1.0, alpha));
            assert!(loss_unitary(&p, &phased, LossMode::Fidelity).unwrap().abs() < 1e-12);
        }
        // identity circuit vs -I
        let ident = ParamVector::block_identity(2).unwrap();
        let minus_i = ComplexDense::identity(4).scale(crate::C64::new(-1.0, 0.0));
        assert!((loss_unitary(&ident, &minus_i, LossMode::Frobenius).unwrap() - 4.0).abs() < 1e-12);
        // |tr(-I)|/N = 1, so fidelity loss is 0
        assert!(loss_unitary(&ident, &minus_i, LossMode::Fidelity).unwrap().abs() < 1e-12);
        let bad = ComplexDense::from_real(4, &[1.0; 16]).unwrap();
        assert!(matches!(
            UnitaryLoss::new(&bad, LossMode::Fidelity),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn descent_direction_property() {
        let target = AntisymMatrix::from_upper(4, |i, j| ((i * 5 + j * 3) % 7) as f64 / 7.0 - 0.4);
        let loss = AntisymLoss::new(&target).unwrap();
        let mut rng = Rng::new(21);
        for _ in 0..10 {
            let p = ParamVector::random(2, &mut rng).unwrap();
            let f = |x: &[f64]| loss.eval(&ParamVector::from_flat_clamped(2, x).unwrap()).unwrap();
            let x = p.flatten();
            let g = finite_diff_grad(&f, &x, 1e-6);
            let gn = dot(&g, &g).sqrt();
            let moved: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - 1e-4 * b / gn).collect();
            assert!(f(&moved) <= f(&x) + 1e-10);
        }
    }

    #[test]
    fn warm_start_converges_immediately() {
        let g4 = g_antisym(2);
        let loss = AntisymLoss::new(&g4).unwrap();
        let trace = minimize(infallible(|p| loss.eval(p)), &warm_start(2).unwrap(), &OptConfig::default()).unwrap();
        assert!(trace.converged);
        assert!(trace.losses.len() - 1 <= 5);
        assert!(trace.final_loss() <= 1e-6);
        assert_eq!(trace.restarts_used, 0);
    }

    #[test]
    fn trace_is_monotone_and_deterministic() {
        let target = AntisymMatrix::from_upper(4, |i, j| ((i * 3 + j) % 5) as f64 / 5.0 - 0.5);
        let loss = AntisymLoss::new(&target).unwrap();
        let cfg = OptConfig {
            max_iters: 60,
            seed: 3,
            ..Default::default()
        };
        let init = ParamVector::random_init(2, 3).unwrap();
        let a = minimize(infallible(|p| loss.eval(p)), &init, &cfg).unwrap();
        let b = minimize(infallible(|p| loss.eval(p)), &init, &cfg).unwrap();
        for run in &a.runs {
            assert!(run.losses.windows(2).all(|w| w[1] <= w[0]));
        }
        assert_eq!(a.runs, b.runs);
        assert_eq!(a.final_params, b.final_params);
    }

    #[test]
    fn representable_target_from_random_seeds() {
        for n in 1..=2 {
            let g = build_g(n, 0.0).unwrap();
            let target = AntisymMatrix::from_upper(g.dim(), |_, _| 1.0);
            let loss = AntisymLoss::new(&target).unwrap();
            let cfg = OptConfig {
                max_restarts: 0,
                ..Default::default()
            };
            let hits = (0..10)
                .filter(|&seed| {
                    let init = ParamVector::random_init(n, seed).unwrap();
                    let t = minimize(infallible(|p| loss.eval(p)), &init, &OptConfig { seed, ..cfg.clone() }).unwrap();
                    t.final_loss() <= 1e-4
                })
                .count();
            assert!(hits >= 8, "n={n}: {hits}/10");
        }
    }
}
