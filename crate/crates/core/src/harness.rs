//! The coupled four-system experiment: two drives, two controlled
//! responses, one shared GL time grid, plus convergence metrics.

use crate::chen::{chen_rhs, Control3, State3, SystemParams};
use crate::controller::{
    aggregate_controls, allocate, error_state, feedback, gain_matrix, AllocationCase, ErrorState,
    HybridScheme,
};
use crate::solver::{
    gl_step, integrate, FractionalOrder, GlCoeffs, MemoryPolicy, SolverError, Trajectory,
};
use thiserror::Error;

/// Errors from configuration validation or metric computation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error("step size must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("t_end = {t_end} must be finite and at least one step h = {h}")]
    InvalidHorizon { t_end: f64, h: f64 },
    #[error("system parameters must be finite (a = {a}, b = {b}, c = {c})")]
    NonFiniteParams { a: f64, b: f64, c: f64 },
    #[error("initial state {which} must be finite")]
    NonFiniteInitialState { which: &'static str },
    #[error("lambda must be finite, got {0}")]
    NonFiniteLambda(f64),
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTol(f64),
    #[error("error series has {series} samples but the grid has {grid}")]
    LengthMismatch { series: usize, grid: usize },
    #[error("error series is empty")]
    EmptySeries,
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Full description of one synchronization run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub params: SystemParams,
    pub order: FractionalOrder,
    pub h: f64,
    pub t_end: f64,
    pub scheme: HybridScheme,
    pub lambda: f64,
    pub case: AllocationCase,
    pub memory: MemoryPolicy,
    pub x0: State3,
    pub y0: State3,
    pub z0: State3,
    pub w0: State3,
    pub controls_enabled: bool,
    /// Settle tolerance for the convergence metrics.
    pub tol: f64,
}

impl Default for SimConfig {
    /// The reference experiment: q = 0.95, h = 0.005, 10 s, λ = 1,
    /// (complete, anti, projective×5), equal split, full memory.
    fn default() -> Self {
        Self {
            params: SystemParams::default(),
            order: FractionalOrder::new(0.95).expect("0.95 is a valid order"),
            h: 0.005,
            t_end: 10.0,
            scheme: HybridScheme::default(),
            lambda: 1.0,
            case: AllocationCase::SplitEqually,
            memory: MemoryPolicy::Full,
            x0: State3([-10.0, 0.001, 37.0]),
            y0: State3([37.0, -5.0, 0.0]),
            z0: State3([10.0, -5.0, 15.0]),
            w0: State3([-5.0, 0.5, 25.0]),
            controls_enabled: true,
            tol: 1e-2,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(HarnessError::InvalidStep(self.h));
        }
        if !(self.t_end.is_finite() && self.t_end >= self.h) {
            return Err(HarnessError::InvalidHorizon {
                t_end: self.t_end,
                h: self.h,
            });
        }
        if !self.params.is_finite() {
            return Err(HarnessError::NonFiniteParams {
                a: self.params.a,
                b: self.params.b,
                c: self.params.c,
            });
        }
        for (which, s) in [
            ("x0", &self.x0),
            ("y0", &self.y0),
            ("z0", &self.z0),
            ("w0", &self.w0),
        ] {
            if !s.is_finite() {
                return Err(HarnessError::NonFiniteInitialState { which });
            }
        }
        if !self.lambda.is_finite() {
            return Err(HarnessError::NonFiniteLambda(self.lambda));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(HarnessError::InvalidTol(self.tol));
        }
        Ok(())
    }

    /// Number of steps: the grid holds this plus the initial sample.
    pub fn steps(&self) -> usize {
        (self.t_end / self.h).floor() as usize
    }
}

/// Settle behavior of the error series against a tolerance band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceMetrics {
    /// Per component: the earliest grid time from which |e_i| stays inside
    /// the band through the end of the series; `None` if it never does.
    pub settle_time: [Option<f64>; 3],
    /// Per settled component: the largest |e_i| at or after the settle time.
    pub max_error_after_settle: [Option<f64>; 3],
    /// True when every component settles.
    pub converged: bool,
}

/// Scans each component backward for its last tolerance violation. A
/// non-finite sample counts as a violation (`!(|e| < tol)`), so truncated
/// divergent tails can never masquerade as settled.
#[allow(clippy::neg_cmp_op_on_partial_ord)] // the negated form is the NaN-safe one
pub fn convergence_metrics(
    errors: &[ErrorState],
    grid: &[f64],
    tol: f64,
) -> Result<ConvergenceMetrics, HarnessError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(HarnessError::InvalidTol(tol));
    }
    if errors.is_empty() {
        return Err(HarnessError::EmptySeries);
    }
    if errors.len() != grid.len() {
        return Err(HarnessError::LengthMismatch {
            series: errors.len(),
            grid: grid.len(),
        });
    }

    let n = errors.len();
    let mut settle_time = [None; 3];
    let mut max_after = [None; 3];
    for i in 0..3 {
        let mut settle_idx = Some(0);
        for k in (0..n).rev() {
            if !(errors[k].0[i].abs() < tol) {
                settle_idx = if k + 1 < n { Some(k + 1) } else { None };
                break;
            }
        }
        settle_time[i] = settle_idx.map(|k| grid[k]);
        max_after[i] = settle_idx.map(|k| {
            errors[k..]
                .iter()
                .fold(0.0f64, |acc, e| acc.max(e.0[i].abs()))
        });
    }
    let converged = settle_time.iter().all(|t| t.is_some());
    Ok(ConvergenceMetrics {
        settle_time,
        max_error_after_settle: max_after,
        converged,
    })
}

/// Everything one run produces. All series share one length; a divergent
/// run is truncated to the last finite sample and `diverged` holds the
/// step index whose states were no longer representable.
#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub t: Vec<f64>,
    pub x: Vec<State3>,
    pub y: Vec<State3>,
    pub z: Vec<State3>,
    pub w: Vec<State3>,
    /// Per sample: (uz_1, uz_2, uz_3, uw_1, uw_2, uw_3) computed from that
    /// sample's states; the step from t_k to t_{k+1} applies row k.
    pub controls: Vec<[f64; 6]>,
    pub errors: Vec<ErrorState>,
    pub metrics: ConvergenceMetrics,
    pub diverged: Option<usize>,
}

fn state_of(v: &[f64]) -> State3 {
    State3([v[0], v[1], v[2]])
}

/// Runs the coupled experiment. Drives are never controlled; responses
/// receive the allocated controls computed from the previous step's states
/// (explicit scheme, controls held over each step). A non-finite state
/// flags divergence and truncates — it is a result, not an error.
pub fn run_sync(cfg: &SimConfig) -> Result<SimResult, HarnessError> {
    cfg.validate()?;
    let n = cfg.steps();
    let table = GlCoeffs::new(cfg.order, n);
    let p = cfg.params;
    let spec = gain_matrix(&p, cfg.lambda);
    let scheme = cfg.scheme;

    let field = |s: &[f64], _t: f64, u: &[f64]| -> Vec<f64> {
        chen_rhs(State3([s[0], s[1], s[2]]), &p, Control3([u[0], u[1], u[2]]))
            .0
            .to_vec()
    };

    let controls_for = |x: &[f64], y: &[f64], z: &[f64], w: &[f64], e: &ErrorState| -> [f64; 6] {
        if !cfg.controls_enabled {
            return [0.0; 6];
        }
        let v = feedback(e, &spec);
        let u = aggregate_controls(
            state_of(x),
            state_of(y),
            state_of(z),
            state_of(w),
            v,
            &p,
            &scheme,
        );
        let (uz, uw) = allocate(u, cfg.case);
        [uz.0[0], uz.0[1], uz.0[2], uw.0[0], uw.0[1], uw.0[2]]
    };

    let mut xs: Vec<Vec<f64>> = vec![cfg.x0.0.to_vec()];
    let mut ys: Vec<Vec<f64>> = vec![cfg.y0.0.to_vec()];
    let mut zs: Vec<Vec<f64>> = vec![cfg.z0.0.to_vec()];
    let mut ws: Vec<Vec<f64>> = vec![cfg.w0.0.to_vec()];
    let mut errors = Vec::with_capacity(n + 1);
    let mut controls = Vec::with_capacity(n + 1);
    let mut diverged = None;

    let e0 = error_state(cfg.x0, cfg.y0, cfg.z0, cfg.w0, &scheme);
    errors.push(e0);
    controls.push(controls_for(&xs[0], &ys[0], &zs[0], &ws[0], &e0));

    let zero = [0.0; 3];
    for k in 1..=n {
        let t_k = k as f64 * cfg.h;
        let prev = controls[k - 1];
        let uz = [prev[0], prev[1], prev[2]];
        let uw = [prev[3], prev[4], prev[5]];

        let nx = gl_step(field, &xs, t_k, cfg.h, &table, cfg.memory, &zero)?;
        let ny = gl_step(field, &ys, t_k, cfg.h, &table, cfg.memory, &zero)?;
        let nz = gl_step(field, &zs, t_k, cfg.h, &table, cfg.memory, &uz)?;
        let nw = gl_step(field, &ws, t_k, cfg.h, &table, cfg.memory, &uw)?;

        let finite = [&nx, &ny, &nz, &nw]
            .iter()
            .all(|s| s.iter().all(|v| v.is_finite()));
        if !finite {
            diverged = Some(k);
            break;
        }

        let e = error_state(
            state_of(&nx),
            state_of(&ny),
            state_of(&nz),
            state_of(&nw),
            &scheme,
        );
        let u = controls_for(&nx, &ny, &nz, &nw, &e);
        xs.push(nx);
        ys.push(ny);
        zs.push(nz);
        ws.push(nw);
        errors.push(e);
        controls.push(u);
    }

    let t: Vec<f64> = (0..xs.len()).map(|k| k as f64 * cfg.h).collect();
    let metrics = convergence_metrics(&errors, &t, cfg.tol)?;
    let to_states = |v: Vec<Vec<f64>>| -> Vec<State3> { v.iter().map(|s| state_of(s)).collect() };
    Ok(SimResult {
        t,
        x: to_states(xs),
        y: to_states(ys),
        z: to_states(zs),
        w: to_states(ws),
        controls,
        errors,
        metrics,
        diverged,
    })
}

/// Integrates a single uncontrolled system — the phase-portrait runner.
pub fn run_attractor(
    params: &SystemParams,
    order: FractionalOrder,
    y0: State3,
    h: f64,
    t_end: f64,
) -> Result<Trajectory, SolverError> {
    let p = *params;
    integrate(
        move |s: &[f64], _t: f64, u: &[f64]| {
            chen_rhs(State3([s[0], s[1], s[2]]), &p, Control3([u[0], u[1], u[2]]))
                .0
                .to_vec()
        },
        &y0.0,
        t_end,
        h,
        order,
        MemoryPolicy::Full,
        |_k, _s| vec![0.0; 3],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn errs(values: &[[f64; 3]]) -> Vec<ErrorState> {
        values.iter().map(|&v| ErrorState(v)).collect()
    }

    fn grid(n: usize, h: f64) -> Vec<f64> {
        (0..n).map(|k| k as f64 * h).collect()
    }

    #[test]
    fn metrics_constant_zero_settles_immediately() {
        let e = errs(&[[0.0; 3]; 5]);
        let m = convergence_metrics(&e, &grid(5, 0.1), 1e-3).unwrap();
        assert_eq!(m.settle_time, [Some(0.0); 3]);
        assert_eq!(m.max_error_after_settle, [Some(0.0); 3]);
        assert!(m.converged);
    }

    #[test]
    fn metrics_settle_after_last_violation() {
        // |e| = 1, 0.5, 1e-4, 1e-5 on t = 0, h, 2h, 3h with tol 1e-3:
        // last violation at index 1 ⇒ settle at t = 2h.
        let h = 0.25;
        let e = errs(&[[1.0; 3], [0.5; 3], [1e-4; 3], [1e-5; 3]]);
        let m = convergence_metrics(&e, &grid(4, h), 1e-3).unwrap();
        assert_eq!(m.settle_time, [Some(2.0 * h); 3]);
        assert_eq!(m.max_error_after_settle, [Some(1e-4); 3]);
        assert!(m.converged);
    }

    #[test]
    fn metrics_growing_series_never_settles() {
        let e = errs(&[[0.1; 3], [0.2; 3], [0.4; 3], [0.8; 3]]);
        let m = convergence_metrics(&e, &grid(4, 0.1), 1e-3).unwrap();
        assert_eq!(m.settle_time, [None; 3]);
        assert_eq!(m.max_error_after_settle, [None; 3]);
        assert!(!m.converged);
    }

    #[test]
    fn metrics_per_component_independence() {
        let e = errs(&[[1.0, 0.0, 1.0], [0.0, 0.0, 1.0]]);
        let m = convergence_metrics(&e, &grid(2, 0.5), 1e-3).unwrap();
        assert_eq!(m.settle_time, [Some(0.5), Some(0.0), None]);
        assert!(!m.converged);
    }

    #[test]
    fn metrics_negative_values_use_magnitude() {
        let e = errs(&[[-1.0; 3], [-1e-6; 3]]);
        let m = convergence_metrics(&e, &grid(2, 0.5), 1e-3).unwrap();
        assert_eq!(m.settle_time, [Some(0.5); 3]);
    }

    #[test]
    fn metrics_nonfinite_counts_as_violation() {
        let e = errs(&[[0.0; 3], [f64::NAN, f64::INFINITY, 0.0]]);
        let m = convergence_metrics(&e, &grid(2, 0.5), 1e-3).unwrap();
        assert_eq!(m.settle_time, [None, None, Some(0.0)]);
        assert!(!m.converged);
    }

    #[test]
    fn metrics_input_validation() {
        let e = errs(&[[0.0; 3]]);
        assert!(matches!(
            convergence_metrics(&e, &grid(2, 0.1), 1e-3),
            Err(HarnessError::LengthMismatch { series: 1, grid: 2 })
        ));
        assert!(matches!(
            convergence_metrics(&[], &[], 1e-3),
            Err(HarnessError::EmptySeries)
        ));
        for tol in [0.0, -1.0, f64::NAN] {
            assert!(matches!(
                convergence_metrics(&e, &grid(1, 0.1), tol),
                Err(HarnessError::InvalidTol(_))
            ));
        }
    }

    #[test]
    fn config_defaults_are_the_reference_experiment() {
        let cfg = SimConfig::default();
        assert_eq!(cfg.params, SystemParams::default());
        assert_eq!(cfg.order.value(), 0.95);
        assert_eq!(cfg.h, 0.005);
        assert_eq!(cfg.t_end, 10.0);
        assert_eq!(cfg.lambda, 1.0);
        assert_eq!(cfg.case, AllocationCase::SplitEqually);
        assert_eq!(cfg.memory, MemoryPolicy::Full);
        assert!(cfg.controls_enabled);
        assert_eq!(cfg.tol, 1e-2);
        assert_eq!(cfg.steps(), 2000);
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn config_validation_rejections() {
        let cfg = SimConfig {
            h: 0.0,
            ..Default::default()
        };
        assert!(matches!(cfg.validate(), Err(HarnessError::InvalidStep(_))));

        let cfg = SimConfig {
            t_end: 0.001,
            ..Default::default()
        };
        assert!(matches!(
            cfg.validate(),
            Err(HarnessError::InvalidHorizon { .. })
        ));

        let mut cfg = SimConfig::default();
        cfg.params.a = f64::NAN;
        assert!(matches!(
            cfg.validate(),
            Err(HarnessError::NonFiniteParams { .. })
        ));

        let cfg = SimConfig {
            y0: State3([f64::INFINITY, 0.0, 0.0]),
            ..Default::default()
        };
        assert!(matches!(
            cfg.validate(),
            Err(HarnessError::NonFiniteInitialState { which: "y0" })
        ));

        let cfg = SimConfig {
            lambda: f64::NAN,
            ..Default::default()
        };
        assert!(matches!(
            cfg.validate(),
            Err(HarnessError::NonFiniteLambda(_))
        ));

        let cfg = SimConfig {
            tol: 0.0,
            ..Default::default()
        };
        assert!(matches!(cfg.validate(), Err(HarnessError::InvalidTol(_))));
    }

    #[test]
    fn origin_equilibrium_stays_at_zero() {
        let cfg = SimConfig {
            x0: State3::ZERO,
            y0: State3::ZERO,
            z0: State3::ZERO,
            w0: State3::ZERO,
            t_end: 0.05,
            ..SimConfig::default()
        };
        let r = run_sync(&cfg).unwrap();
        assert_eq!(r.t.len(), 11);
        assert!(r.diverged.is_none());
        for k in 0..r.t.len() {
            assert_eq!(r.errors[k].0, [0.0; 3], "k = {k}");
            assert_eq!(r.controls[k], [0.0; 6], "k = {k}");
            assert_eq!(r.x[k], State3::ZERO);
            assert_eq!(r.w[k], State3::ZERO);
        }
        assert_eq!(r.metrics.settle_time, [Some(0.0); 3]);
        assert!(r.metrics.converged);
    }
}
