//! Human-readable run report: configuration echo, closed-loop
//! eigenvalues, the stability verdict, divergence, and convergence
//! metrics.
//!
//! Configuration values echo with shortest-round-trip formatting; metric
//! values use the same 9-significant-digit format as the CSV, so the
//! report and the serialized series state the same numbers.

use crate::config::{case_name, memory_name, mode_name};
use crate::series::format_number;
use fracsync_core::controller::{gain_matrix, stability_check, StabilityReport};
use fracsync_core::harness::{ConvergenceMetrics, SimConfig, SimResult};
use fracsync_core::solver::FractionalOrder;
use fracsync_core::Complex64;
use std::fmt;
use std::path::PathBuf;

/// Eigenvalues and verdicts, formatted one line per eigenvalue plus the
/// overall conclusion.
pub fn format_stability(eigenvalues: &[f64], order: FractionalOrder) -> (StabilityReport, String) {
    let complex: Vec<Complex64> = eigenvalues
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .collect();
    let report = stability_check(&complex, order);
    let mut out = String::new();
    out.push_str(&format!(
        "stability check (|arg λ| > qπ/2, q = {}):\n",
        order.value()
    ));
    for (v, ok) in eigenvalues.iter().zip(&report.per_eigenvalue) {
        out.push_str(&format!(
            "  λ = {}: {}\n",
            v,
            if *ok { "pass" } else { "FAIL" }
        ));
    }
    out.push_str(&format!(
        "verdict: {}\n",
        if report.stable {
            "stable"
        } else {
            "not stable"
        }
    ));
    (report, out)
}

/// Everything the sync subcommand prints after a run.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub config: SimConfig,
    pub eigenvalues: [f64; 3],
    pub stability: StabilityReport,
    pub metrics: ConvergenceMetrics,
    pub diverged: Option<usize>,
    pub output: Option<PathBuf>,
}

impl RunReport {
    pub fn new(cfg: &SimConfig, result: &SimResult, output: Option<PathBuf>) -> Self {
        let spec = gain_matrix(&cfg.params, cfg.lambda);
        let eigenvalues = spec.closed_loop_eigenvalues();
        let complex: Vec<Complex64> = eigenvalues
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        let stability = stability_check(&complex, cfg.order);
        Self {
            config: cfg.clone(),
            eigenvalues,
            stability,
            metrics: result.metrics,
            diverged: result.diverged,
            output,
        }
    }
}

fn metric_triplet(values: &[Option<f64>; 3]) -> String {
    let one = |v: &Option<f64>| match v {
        Some(x) => format_number(*x),
        None => "none".to_string(),
    };
    format!(
        "e1 = {}, e2 = {}, e3 = {}",
        one(&values[0]),
        one(&values[1]),
        one(&values[2])
    )
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cfg = &self.config;
        let modes = cfg.scheme.modes();
        writeln!(f, "configuration:")?;
        writeln!(
            f,
            "  a = {}, b = {}, c = {}",
            cfg.params.a, cfg.params.b, cfg.params.c
        )?;
        writeln!(
            f,
            "  order = {}, step = {}, t_end = {}, memory = {}",
            cfg.order.value(),
            cfg.h,
            cfg.t_end,
            memory_name(cfg.memory)
        )?;
        writeln!(
            f,
            "  modes = {}, {}, {}; scale = {}; lambda = {}",
            mode_name(modes[0]),
            mode_name(modes[1]),
            mode_name(modes[2]),
            cfg.scheme.scale(),
            cfg.lambda
        )?;
        writeln!(
            f,
            "  case = {}; controls = {}; tol = {}",
            case_name(cfg.case),
            if cfg.controls_enabled { "on" } else { "off" },
            cfg.tol
        )?;
        for (name, s) in [
            ("x0", cfg.x0),
            ("y0", cfg.y0),
            ("z0", cfg.z0),
            ("w0", cfg.w0),
        ] {
            writeln!(f, "  {name} = {}, {}, {}", s.0[0], s.0[1], s.0[2])?;
        }
        writeln!(
            f,
            "closed-loop eigenvalues: {}, {}, {}",
            self.eigenvalues[0], self.eigenvalues[1], self.eigenvalues[2]
        )?;
        let verdicts: Vec<&str> = self
            .stability
            .per_eigenvalue
            .iter()
            .map(|ok| if *ok { "pass" } else { "FAIL" })
            .collect();
        writeln!(
            f,
            "stability (|arg λ| > qπ/2): {} -> {}",
            verdicts.join(", "),
            if self.stability.stable {
                "stable"
            } else {
                "not stable"
            }
        )?;
        if let Some(k) = self.diverged {
            writeln!(
                f,
                "diverged: at step {k} (t = {}); series truncated to the last finite sample",
                format_number(k as f64 * cfg.h)
            )?;
        }
        writeln!(
            f,
            "settle times: {}",
            metric_triplet(&self.metrics.settle_time)
        )?;
        writeln!(
            f,
            "max |e| after settle: {}",
            metric_triplet(&self.metrics.max_error_after_settle)
        )?;
        writeln!(f, "converged: {}", self.metrics.converged)?;
        if let Some(path) = &self.output {
            writeln!(f, "series written to: {}", path.display())?;
        }
        Ok(())
    }
}
