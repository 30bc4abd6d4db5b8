//! Hybrid error map, active-control synthesis, allocation, and the
//! fractional stability check for the four-system scheme.
//!
//! Two drive systems x, y and two controlled response systems z, w are
//! combined per component through
//!
//! ```text
//! e_i = (x_i + y_i) − γ_i · (z_i + w_i)
//! ```
//!
//! where γ_i is +1 (complete synchronization of the sums), −1
//! (anti-synchronization), or a projective scale. The aggregate controls
//! U_i = uz_i + uw_i are chosen so the coupled error dynamics collapse to
//! the diagonal linear system D^q e = (A + C)·e, with A the open-loop
//! coefficient matrix of the error and C the feedback gain.

use crate::chen::{chen_rhs, Control3, State3, SystemParams};
use crate::mat3::Mat3;
use crate::solver::FractionalOrder;
use num_complex::Complex64;
use thiserror::Error;

/// Errors constructing a hybrid scheme.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SchemeError {
    #[error("projective scale must be nonzero when any component is projective")]
    ZeroProjectiveScale,
    #[error("scheme scale must be finite, got {0}")]
    NonFiniteScale(f64),
}

/// Per-component synchronization regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyncMode {
    Complete,
    Anti,
    Projective,
}

/// A per-component mode assignment plus the shared projective scale.
///
/// Valid by construction: the scale is finite, and nonzero whenever any
/// component is projective (the gain divides by it).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridScheme {
    modes: [SyncMode; 3],
    scale: f64,
}

impl HybridScheme {
    pub fn new(modes: [SyncMode; 3], scale: f64) -> Result<Self, SchemeError> {
        if !scale.is_finite() {
            return Err(SchemeError::NonFiniteScale(scale));
        }
        if modes.contains(&SyncMode::Projective) && scale == 0.0 {
            return Err(SchemeError::ZeroProjectiveScale);
        }
        Ok(Self { modes, scale })
    }

    pub fn modes(&self) -> [SyncMode; 3] {
        self.modes
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Response-sum gain γ_i for component i (0-based): +1 complete,
    /// −1 anti, the scale for projective.
    pub fn gain(&self, i: usize) -> f64 {
        match self.modes[i] {
            SyncMode::Complete => 1.0,
            SyncMode::Anti => -1.0,
            SyncMode::Projective => self.scale,
        }
    }
}

impl Default for HybridScheme {
    /// The reference configuration: (complete, anti, projective) with
    /// scale 5.
    fn default() -> Self {
        Self {
            modes: [SyncMode::Complete, SyncMode::Anti, SyncMode::Projective],
            scale: 5.0,
        }
    }
}

/// The three-component synchronization error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorState(pub [f64; 3]);

impl ErrorState {
    pub const ZERO: ErrorState = ErrorState([0.0; 3]);

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

/// e_i = (x_i + y_i) − γ_i (z_i + w_i).
pub fn error_state(
    x: State3,
    y: State3,
    z: State3,
    w: State3,
    scheme: &HybridScheme,
) -> ErrorState {
    let mut e = [0.0; 3];
    for (i, out) in e.iter_mut().enumerate() {
        *out = (x.0[i] + y.0[i]) - scheme.gain(i) * (z.0[i] + w.0[i]);
    }
    ErrorState(e)
}

/// Open-loop error coefficient matrix
/// A = [[−a, −a, 0], [a+c, c, 0], [0, 0, −b]].
pub fn open_loop_matrix(p: &SystemParams) -> Mat3 {
    Mat3([[-p.a, -p.a, 0.0], [p.a + p.c, p.c, 0.0], [0.0, 0.0, -p.b]])
}

/// The synthesized gain: λ, the open-loop matrix A, the feedback gain C,
/// and their sum, which is diagonal by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainSpec {
    lambda: f64,
    open_loop: Mat3,
    gain: Mat3,
    closed_loop: Mat3,
}

/// Builds C = [[c−λ, a, 0], [−(a+c), −(c+λ), 0], [0, 0, b−λ]], chosen so
/// A + C = diag(c − a − λ, −λ, −λ). The off-diagonal cancellations are
/// X + (−X), hence exactly zero in floating point for every (a, b, c, λ).
pub fn gain_matrix(p: &SystemParams, lambda: f64) -> GainSpec {
    let open_loop = open_loop_matrix(p);
    let gain = Mat3([
        [p.c - lambda, p.a, 0.0],
        [-(p.a + p.c), -(p.c + lambda), 0.0],
        [0.0, 0.0, p.b - lambda],
    ]);
    let closed_loop = open_loop.add(&gain);
    GainSpec {
        lambda,
        open_loop,
        gain,
        closed_loop,
    }
}

impl GainSpec {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn open_loop(&self) -> &Mat3 {
        &self.open_loop
    }

    pub fn gain(&self) -> &Mat3 {
        &self.gain
    }

    pub fn closed_loop(&self) -> &Mat3 {
        &self.closed_loop
    }

    /// Closed-loop eigenvalues (c − a − λ, −λ, −λ), read off the diagonal.
    pub fn closed_loop_eigenvalues(&self) -> [f64; 3] {
        self.closed_loop.diagonal()
    }
}

/// Feedback term V = C·e.
pub fn feedback(e: &ErrorState, spec: &GainSpec) -> [f64; 3] {
    spec.gain().mul_vec(e.0)
}

/// Aggregate controls U = (U_1, U_2, U_3), U_i = uz_i + uw_i, chosen so
/// the coupled error dynamics become D^q e = (A + C)·e:
///
/// ```text
/// γ_i U_i = F_i(x) + F_i(y) − γ_i (F_i(z) + F_i(w)) − [A e]_i − V_i
/// ```
///
/// expanded here into closed forms (D_i = x_i + y_i, R_i = z_i + w_i):
///
/// ```text
/// U_1 = [ 2a·D_2 − a(γ_1 + γ_2)·R_2 − V_1 ] / γ_1
/// U_2 = [ −2a·D_1 + ((a+c)γ_1 − (c−a)γ_2)·R_1
///         − (x_1 x_3 + y_1 y_3) + γ_2 (z_1 z_3 + w_1 w_3) − V_2 ] / γ_2
/// U_3 = [ x_1 x_2 + y_1 y_2 − γ_3 (z_1 z_2 + w_1 w_2) − V_3 ] / γ_3
/// ```
pub fn aggregate_controls(
    x: State3,
    y: State3,
    z: State3,
    w: State3,
    v: [f64; 3],
    p: &SystemParams,
    scheme: &HybridScheme,
) -> [f64; 3] {
    let g1 = scheme.gain(0);
    let g2 = scheme.gain(1);
    let g3 = scheme.gain(2);
    let d1 = x.0[0] + y.0[0];
    let d2 = x.0[1] + y.0[1];
    let r1 = z.0[0] + w.0[0];
    let r2 = z.0[1] + w.0[1];

    let u1 = (2.0 * p.a * d2 - p.a * (g1 + g2) * r2 - v[0]) / g1;
    let u2 = (-2.0 * p.a * d1 + ((p.a + p.c) * g1 - (p.c - p.a) * g2) * r1
        - (x.0[0] * x.0[2] + y.0[0] * y.0[2])
        + g2 * (z.0[0] * z.0[2] + w.0[0] * w.0[2])
        - v[1])
        / g2;
    let u3 =
        (x.0[0] * x.0[1] + y.0[0] * y.0[1] - g3 * (z.0[0] * z.0[1] + w.0[0] * w.0[1]) - v[2]) / g3;
    [u1, u2, u3]
}

/// How the aggregate control is split across the two response systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AllocationCase {
    /// uz = uw = U/2. Halving is exact, so uz + uw == U bitwise.
    SplitEqually,
    /// uz = U, uw = 0.
    FirstResponseOnly,
}

/// Splits the aggregate into the two response controls.
pub fn allocate(aggregate: [f64; 3], case: AllocationCase) -> (Control3, Control3) {
    match case {
        AllocationCase::SplitEqually => {
            let half = aggregate.map(|u| u / 2.0);
            (Control3(half), Control3(half))
        }
        AllocationCase::FirstResponseOnly => (Control3(aggregate), Control3::ZERO),
    }
}

/// Instantaneous error derivative assembled from the four field
/// evaluations:
///
/// ```text
/// D^q e_i = F_i(x) + F_i(y) − γ_i · (F_i(z) + F_i(w) + (uz_i + uw_i))
/// ```
///
/// The response controls enter through their per-component *sum*, so any
/// two allocations with equal aggregates produce bit-identical results.
#[allow(clippy::too_many_arguments)] // mirrors the four-system + two-control structure
pub fn error_rhs_coupled(
    x: State3,
    y: State3,
    z: State3,
    w: State3,
    uz: Control3,
    uw: Control3,
    p: &SystemParams,
    scheme: &HybridScheme,
) -> [f64; 3] {
    let fx = chen_rhs(x, p, Control3::ZERO);
    let fy = chen_rhs(y, p, Control3::ZERO);
    let fz = chen_rhs(z, p, Control3::ZERO);
    let fw = chen_rhs(w, p, Control3::ZERO);
    let mut out = [0.0; 3];
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = (fx.0[i] + fy.0[i]) - scheme.gain(i) * ((fz.0[i] + fw.0[i]) + (uz.0[i] + uw.0[i]));
    }
    out
}

/// Per-eigenvalue fractional stability verdicts.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    /// The sector boundary qπ/2.
    pub threshold: f64,
    /// Whether each eigenvalue satisfies |arg λ| > qπ/2.
    pub per_eigenvalue: Vec<bool>,
    /// Conjunction of the per-eigenvalue verdicts.
    pub stable: bool,
}

/// Checks the fractional Routh–Hurwitz sector condition |arg λ| > qπ/2
/// for each eigenvalue. The inequality is strict; λ = 0 has no argument
/// and fails. Arguments use the (−π, π] convention, so a negative real
/// eigenvalue scores |arg| = π and passes for every q ≤ 1.
pub fn stability_check(eigenvalues: &[Complex64], order: FractionalOrder) -> StabilityReport {
    let threshold = order.value() * std::f64::consts::FRAC_PI_2;
    let per_eigenvalue: Vec<bool> = eigenvalues
        .iter()
        .map(|ev| {
            if ev.re == 0.0 && ev.im == 0.0 {
                false
            } else {
                ev.arg().abs() > threshold
            }
        })
        .collect();
    let stable = !per_eigenvalue.is_empty() && per_eigenvalue.iter().all(|&ok| ok);
    StabilityReport {
        threshold,
        per_eigenvalue,
        stable,
    }
}
