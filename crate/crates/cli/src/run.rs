//! Subcommand definitions and dispatch.
//!
//! Exit codes: 0 success, 1 configuration or I/O error, 2 divergent run,
//! 3 stability gate failed under `--require-stable`.

use crate::config::{parse_case, parse_memory, resolve, ConfigError, Overrides, Preset};
use crate::report::{format_stability, RunReport};
use crate::series::{write_series, write_trajectory};
use clap::{Args, Parser, Subcommand};
use fracsync_core::controller::gain_matrix;
use fracsync_core::harness::{run_attractor, run_sync};
use fracsync_core::solver::SolverError;
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_DIVERGED: i32 = 2;
pub const EXIT_UNSTABLE: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "fracsync",
    version,
    about = "Hybrid synchronization of coupled fractional-order Chen systems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by the simulation subcommands. Flags override config
/// file values, which override defaults.
#[derive(Args, Debug, Default)]
pub struct CommonOpts {
    /// Configuration file of `key = value` lines.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Preset deltas: case1, case2, uncontrolled, attractor.
    #[arg(long, value_name = "NAME")]
    pub preset: Option<String>,
    /// Fractional order q in (0, 1].
    #[arg(long)]
    pub order: Option<f64>,
    /// Step size h.
    #[arg(long)]
    pub step: Option<f64>,
    /// Simulation horizon in seconds.
    #[arg(long = "t-end")]
    pub t_end: Option<f64>,
    /// Feedback design parameter λ.
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Projective scale.
    #[arg(long, allow_negative_numbers = true)]
    pub scale: Option<f64>,
    /// Control allocation: split | first.
    #[arg(long)]
    pub case: Option<String>,
    /// Memory policy: full | <window>.
    #[arg(long)]
    pub memory: Option<String>,
    /// Settle tolerance for convergence metrics.
    #[arg(long)]
    pub tol: Option<f64>,
}

impl CommonOpts {
    fn overrides(&self) -> Result<Overrides, ConfigError> {
        Ok(Overrides {
            order: self.order,
            step: self.step,
            t_end: self.t_end,
            lambda: self.lambda,
            scale: self.scale,
            case: self
                .case
                .as_deref()
                .map(|v| {
                    parse_case(v).map_err(|reason| ConfigError::BadFlag {
                        flag: "--case",
                        reason,
                    })
                })
                .transpose()?,
            memory: self
                .memory
                .as_deref()
                .map(|v| {
                    parse_memory(v).map_err(|reason| ConfigError::BadFlag {
                        flag: "--memory",
                        reason,
                    })
                })
                .transpose()?,
            tol: self.tol,
        })
    }

    fn preset(&self) -> Result<Option<Preset>, ConfigError> {
        self.preset.as_deref().map(Preset::from_name).transpose()
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print or write the GL coefficient table c_0..c_count.
    Coeffs {
        /// Fractional order q in (0, 1].
        #[arg(long, default_value_t = 0.95)]
        order: f64,
        /// Highest coefficient index to emit.
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Write CSV here instead of stdout.
        #[arg(long, value_name = "PATH")]
        output: Option<PathBuf>,
    },
    /// Integrate one uncontrolled system and write its trajectory.
    Attractor {
        #[command(flatten)]
        common: CommonOpts,
        /// Output CSV path.
        #[arg(long, value_name = "PATH", default_value = "attractor.csv")]
        output: PathBuf,
    },
    /// Run the coupled synchronization experiment.
    Sync {
        #[command(flatten)]
        common: CommonOpts,
        /// Output CSV path.
        #[arg(long, value_name = "PATH", default_value = "sync.csv")]
        output: PathBuf,
        /// Refuse to run (exit 3) if the closed loop fails the
        /// fractional stability check.
        #[arg(long = "require-stable")]
        require_stable: bool,
    },
    /// Print closed-loop eigenvalues and the stability verdict.
    Stability {
        #[command(flatten)]
        common: CommonOpts,
        /// Exit 3 when the check fails.
        #[arg(long = "require-stable")]
        require_stable: bool,
    },
}

/// Runs one parsed invocation and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            EXIT_CONFIG
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, Box<dyn std::error::Error>> {
    match cli.command {
        Command::Coeffs {
            order,
            count,
            output,
        } => coeffs(order, count, output),
        Command::Attractor { common, output } => attractor(common, output),
        Command::Sync {
            common,
            output,
            require_stable,
        } => sync(common, output, require_stable),
        Command::Stability {
            common,
            require_stable,
        } => stability(common, require_stable),
    }
}

fn coeffs(
    order: f64,
    count: usize,
    output: Option<PathBuf>,
) -> Result<i32, Box<dyn std::error::Error>> {
    use crate::series::format_number;
    let order = fracsync_core::solver::FractionalOrder::new(order)?;
    let table = fracsync_core::solver::GlCoeffs::new(order, count);
    let mut text = String::from("j,c\n");
    for (j, c) in table.coeffs().iter().enumerate() {
        text.push_str(&format!("{j},{}\n", format_number(*c)));
    }
    match output {
        Some(path) => {
            std::fs::write(&path, &text)
                .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            println!("coefficient table written to: {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(EXIT_OK)
}

fn attractor(common: CommonOpts, output: PathBuf) -> Result<i32, Box<dyn std::error::Error>> {
    // The bare subcommand behaves like the attractor preset (controls are
    // irrelevant here, but the 20 s window applies); an explicit preset
    // or flag still wins.
    let preset = match common.preset()? {
        Some(p) => Some(p),
        None => Some(Preset::Attractor),
    };
    let cfg = resolve(common.config.as_deref(), preset, &common.overrides()?)?;
    match run_attractor(&cfg.params, cfg.order, cfg.x0, cfg.h, cfg.t_end) {
        Ok(traj) => {
            write_trajectory(&traj, &output)?;
            println!(
                "trajectory written to: {} ({} samples)",
                output.display(),
                traj.t.len()
            );
            Ok(EXIT_OK)
        }
        Err(SolverError::NonFinite { step, t }) => {
            eprintln!("run diverged: non-finite state at step {step} (t = {t}); no output written");
            Ok(EXIT_DIVERGED)
        }
        Err(other) => Err(other.into()),
    }
}

fn sync(
    common: CommonOpts,
    output: PathBuf,
    require_stable: bool,
) -> Result<i32, Box<dyn std::error::Error>> {
    let cfg = resolve(
        common.config.as_deref(),
        common.preset()?,
        &common.overrides()?,
    )?;
    if cfg.lambda <= 0.0 {
        eprintln!(
            "warning: lambda = {} gives closed-loop rates that do not all decay; \
             synchronization is not expected",
            cfg.lambda
        );
    }
    let spec = gain_matrix(&cfg.params, cfg.lambda);
    let (stab, stab_text) = format_stability(&spec.closed_loop_eigenvalues(), cfg.order);
    if require_stable && !stab.stable {
        print!("{stab_text}");
        eprintln!("stability gate failed; refusing to run (--require-stable)");
        return Ok(EXIT_UNSTABLE);
    }

    let result = run_sync(&cfg)?;
    write_series(&result, &output)?;
    let report = RunReport::new(&cfg, &result, Some(output));
    print!("{report}");
    if result.diverged.is_some() {
        Ok(EXIT_DIVERGED)
    } else {
        Ok(EXIT_OK)
    }
}

fn stability(common: CommonOpts, require_stable: bool) -> Result<i32, Box<dyn std::error::Error>> {
    let cfg = resolve(
        common.config.as_deref(),
        common.preset()?,
        &common.overrides()?,
    )?;
    let spec = gain_matrix(&cfg.params, cfg.lambda);
    let eigs = spec.closed_loop_eigenvalues();
    let (stab, text) = format_stability(&eigs, cfg.order);
    print!(
        "closed-loop eigenvalues: {}, {}, {}\n{text}",
        eigs[0], eigs[1], eigs[2]
    );
    if require_stable && !stab.stable {
        Ok(EXIT_UNSTABLE)
    } else {
        Ok(EXIT_OK)
    }
}
