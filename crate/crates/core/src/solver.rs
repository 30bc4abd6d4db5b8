//! Fixed-step Grünwald–Letnikov solver for controlled fractional systems.
//!
//! The discretization advances
//!
//! ```text
//! y_k = f(y_{k-1}, t_{k-1}, u) · h^q − Σ_{j=1..m} c_j · y_{k-j}
//! ```
//!
//! with binomial weights c_j = (−1)^j · C(q, j) generated by the recursion
//! c_0 = 1, c_j = (1 − (1+q)/j) · c_{j-1}. The vector field is evaluated at
//! the previous accepted state (explicit form). The memory depth m is the
//! whole history, or a fixed window under the short-memory principle.

use thiserror::Error;

/// Errors from coefficient-table construction, stepping, or integration.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    /// The commensurate order must satisfy 0 < q ≤ 1.
    #[error("invalid fractional order {0}: must satisfy 0 < q <= 1")]
    InvalidOrder(f64),
    /// The step size must be positive and finite.
    #[error("invalid step size {0}: must be positive and finite")]
    InvalidStep(f64),
    /// Integration needs room for at least one step.
    #[error("invalid horizon: t_end = {t_end} must be finite and at least one step h = {h}")]
    InvalidHorizon { t_end: f64, h: f64 },
    /// A step needs at least the initial state in the history.
    #[error("state history is empty; seed it with the initial state")]
    EmptyHistory,
    /// All states, controls, and field outputs must share one dimension.
    #[error("dimension mismatch: {what} has length {got}, expected {expected}")]
    DimensionMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },
    /// The coefficient table must cover the requested memory depth.
    #[error("coefficient table holds {have} entries but the step needs {need}")]
    TableTooShort { have: usize, need: usize },
    /// A state stopped being representable; the step index is 1-based on the grid.
    #[error("non-finite state at step {step} (t = {t})")]
    NonFinite { step: usize, t: f64 },
}

/// Commensurate derivative order, validated to 0 < q ≤ 1.
///
/// q = 1 makes the scheme collapse to explicit Euler (c_1 = −1, all later
/// coefficients exactly zero).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    /// Rejects NaN and anything outside (0, 1].
    pub fn new(q: f64) -> Result<Self, SolverError> {
        if q > 0.0 && q <= 1.0 {
            Ok(Self(q))
        } else {
            Err(SolverError::InvalidOrder(q))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// How far back the memory sum reaches at step k.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MemoryPolicy {
    /// Sum over the entire history (m = k).
    Full,
    /// Short-memory principle: only the most recent `window` states enter
    /// the sum (m = min(k, window)).
    Truncated(std::num::NonZeroUsize),
}

impl MemoryPolicy {
    /// Memory depth m used at a step with k states of history.
    pub fn depth(self, k: usize) -> usize {
        match self {
            MemoryPolicy::Full => k,
            MemoryPolicy::Truncated(window) => k.min(window.get()),
        }
    }
}

/// Binomial coefficient table c_0..c_N for one fractional order.
///
/// Invariants for 0 < q < 1: c_0 = 1, every later coefficient is negative,
/// and |c_j| is non-increasing. For q = 1 the table is [1, −1, 0, 0, …].
#[derive(Debug, Clone, PartialEq)]
pub struct GlCoeffs {
    order: FractionalOrder,
    coeffs: Vec<f64>,
}

impl GlCoeffs {
    /// Generates c_0..c_n by the recursion c_j = (1 − (1+q)/j) · c_{j-1}.
    pub fn new(order: FractionalOrder, n: usize) -> Self {
        let q = order.value();
        let mut coeffs = Vec::with_capacity(n + 1);
        coeffs.push(1.0);
        for j in 1..=n {
            let factor = 1.0 - (1.0 + q) / j as f64;
            coeffs.push(factor * coeffs[j - 1]);
        }
        Self { order, coeffs }
    }

    pub fn order(&self) -> FractionalOrder {
        self.order
    }

    /// The coefficients; index j holds c_j. Never empty (c_0 is always present).
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// One explicit GL step given `history` = [y_0, …, y_{k-1}] and the control
/// held over the step; `t_k` is the time being stepped *to*, so the field is
/// evaluated at t_k − h. Returns y_k.
///
/// The memory sum runs j = 1..=m in that fixed order, so results are
/// bit-reproducible.
pub fn gl_step<F>(
    f: F,
    history: &[Vec<f64>],
    t_k: f64,
    h: f64,
    table: &GlCoeffs,
    policy: MemoryPolicy,
    control: &[f64],
) -> Result<Vec<f64>, SolverError>
where
    F: Fn(&[f64], f64, &[f64]) -> Vec<f64>,
{
    if !(h > 0.0 && h.is_finite()) {
        return Err(SolverError::InvalidStep(h));
    }
    let k = history.len();
    if k == 0 {
        return Err(SolverError::EmptyHistory);
    }
    let dim = history[0].len();
    for state in history {
        if state.len() != dim {
            return Err(SolverError::DimensionMismatch {
                what: "history state",
                got: state.len(),
                expected: dim,
            });
        }
    }
    if control.len() != dim {
        return Err(SolverError::DimensionMismatch {
            what: "control vector",
            got: control.len(),
            expected: dim,
        });
    }
    let m = policy.depth(k);
    if table.len() < m + 1 {
        return Err(SolverError::TableTooShort {
            have: table.len(),
            need: m + 1,
        });
    }

    let prev = &history[k - 1];
    let rhs = f(prev, t_k - h, control);
    if rhs.len() != dim {
        return Err(SolverError::DimensionMismatch {
            what: "field output",
            got: rhs.len(),
            expected: dim,
        });
    }

    let hq = h.powf(table.order().value());
    let c = table.coeffs();
    let mut next = Vec::with_capacity(dim);
    for i in 0..dim {
        let mut memory = 0.0;
        for j in 1..=m {
            memory += c[j] * history[k - j][i];
        }
        next.push(rhs[i] * hq - memory);
    }
    Ok(next)
}

/// A sampled solution: `t[k]` and `states[k]` move together, `t[k] = k · h`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

/// Integrates D^q y = f(y, t, u) from y(0) = y0 over the uniform grid
/// t_k = k·h, k = 0..floor(t_end/h). The control provider is called once
/// per step with (k, y_{k-1}) and its output is held over that step.
///
/// The coefficient table is built once, sized for the final step. A
/// non-finite state aborts with [`SolverError::NonFinite`] naming the step.
pub fn integrate<F, C>(
    f: F,
    y0: &[f64],
    t_end: f64,
    h: f64,
    order: FractionalOrder,
    policy: MemoryPolicy,
    mut control: C,
) -> Result<Trajectory, SolverError>
where
    F: Fn(&[f64], f64, &[f64]) -> Vec<f64>,
    C: FnMut(usize, &[f64]) -> Vec<f64>,
{
    if !(h > 0.0 && h.is_finite()) {
        return Err(SolverError::InvalidStep(h));
    }
    if !(t_end.is_finite() && t_end >= h) {
        return Err(SolverError::InvalidHorizon { t_end, h });
    }
    let n = (t_end / h).floor() as usize;
    let table = GlCoeffs::new(order, n);

    let mut t = Vec::with_capacity(n + 1);
    let mut states = Vec::with_capacity(n + 1);
    t.push(0.0);
    states.push(y0.to_vec());

    for k in 1..=n {
        let t_k = k as f64 * h;
        let u = control(k, states.last().expect("history is non-empty"));
        let next = gl_step(&f, &states, t_k, h, &table, policy, &u)?;
        if next.iter().any(|v| !v.is_finite()) {
            return Err(SolverError::NonFinite { step: k, t: t_k });
        }
        t.push(t_k);
        states.push(next);
    }
    Ok(Trajectory { t, states })
}
