//! The Chen vector field with additive control inputs.
//!
//! All four systems in the synchronization experiment share this field;
//! drives receive zero control, responses receive the allocated inputs.

/// Chen system parameters. The triple (35, 3, 28) is the chaotic regime
/// used throughout and is the default.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            a: 35.0,
            b: 3.0,
            c: 28.0,
        }
    }
}

impl SystemParams {
    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite() && self.c.is_finite()
    }
}

/// One three-component state vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State3(pub [f64; 3]);

impl State3 {
    pub const ZERO: State3 = State3([0.0; 3]);

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl From<[f64; 3]> for State3 {
    fn from(v: [f64; 3]) -> Self {
        State3(v)
    }
}

/// Additive control inputs for one system; identically zero on drives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Control3(pub [f64; 3]);

impl Control3 {
    pub const ZERO: Control3 = Control3([0.0; 3]);
}

impl From<[f64; 3]> for Control3 {
    fn from(v: [f64; 3]) -> Self {
        Control3(v)
    }
}

/// Evaluates the controlled Chen field
///
/// ```text
/// ds1 = a·(s2 − s1)              + u1
/// ds2 = (c − a)·s1 − s1·s3 + c·s2 + u2
/// ds3 = s1·s2 − b·s3             + u3
/// ```
///
/// The controls enter purely additively, so at the origin the response to a
/// control is the control itself, exactly.
pub fn chen_rhs(s: State3, p: &SystemParams, u: Control3) -> State3 {
    let [s1, s2, s3] = s.0;
    let [u1, u2, u3] = u.0;
    State3([
        p.a * (s2 - s1) + u1,
        (p.c - p.a) * s1 - s1 * s3 + p.c * s2 + u2,
        s1 * s2 - p.b * s3 + u3,
    ])
}
