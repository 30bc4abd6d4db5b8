//! `key = value` configuration files, presets, and flag overrides.
//!
//! A config file is plain lines of `key = value`; blank lines, `#`
//! comments, and `[section]` headers are ignored. Every key has a
//! default, so an empty file is the reference experiment. Resolution
//! order: file, then preset deltas, then individual flags.

use fracsync_core::chen::State3;
use fracsync_core::controller::{AllocationCase, HybridScheme, SchemeError, SyncMode};
use fracsync_core::harness::{HarnessError, SimConfig};
use fracsync_core::solver::{FractionalOrder, MemoryPolicy};
use std::fmt::Write as _;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: expected 'key = value', got '{text}'")]
    Malformed { line: usize, text: String },
    #[error("line {line}: unknown key '{key}'")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: invalid value for '{key}': {reason}")]
    InvalidValue {
        line: usize,
        key: String,
        reason: String,
    },
    #[error("unknown preset '{0}' (expected case1, case2, uncontrolled, or attractor)")]
    UnknownPreset(String),
    #[error("invalid {flag}: {reason}")]
    BadFlag { flag: &'static str, reason: String },
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Invalid(#[from] HarnessError),
}

pub fn mode_name(mode: SyncMode) -> &'static str {
    match mode {
        SyncMode::Complete => "complete",
        SyncMode::Anti => "anti",
        SyncMode::Projective => "projective",
    }
}

pub fn parse_mode(value: &str) -> Result<SyncMode, String> {
    match value {
        "complete" => Ok(SyncMode::Complete),
        "anti" => Ok(SyncMode::Anti),
        "projective" => Ok(SyncMode::Projective),
        other => Err(format!(
            "'{other}' is not a mode (expected complete, anti, or projective)"
        )),
    }
}

pub fn case_name(case: AllocationCase) -> &'static str {
    match case {
        AllocationCase::SplitEqually => "split",
        AllocationCase::FirstResponseOnly => "first",
    }
}

pub fn parse_case(value: &str) -> Result<AllocationCase, String> {
    match value {
        "split" => Ok(AllocationCase::SplitEqually),
        "first" => Ok(AllocationCase::FirstResponseOnly),
        other => Err(format!("'{other}' is not a case (expected split or first)")),
    }
}

pub fn memory_name(memory: MemoryPolicy) -> String {
    match memory {
        MemoryPolicy::Full => "full".to_string(),
        MemoryPolicy::Truncated(window) => window.to_string(),
    }
}

pub fn parse_memory(value: &str) -> Result<MemoryPolicy, String> {
    if value == "full" {
        return Ok(MemoryPolicy::Full);
    }
    let window: usize = value
        .parse()
        .map_err(|_| format!("'{value}' is not 'full' or a positive integer window"))?;
    NonZeroUsize::new(window)
        .map(MemoryPolicy::Truncated)
        .ok_or_else(|| "memory window must be at least 1".to_string())
}

fn parse_real(line: usize, key: &str, value: &str) -> Result<f64, ConfigError> {
    value.parse().map_err(|_| ConfigError::InvalidValue {
        line,
        key: key.to_string(),
        reason: format!("'{value}' is not a number"),
    })
}

fn parse_state(line: usize, key: &str, value: &str) -> Result<State3, ConfigError> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(ConfigError::InvalidValue {
            line,
            key: key.to_string(),
            reason: format!("expected three comma-separated reals, got {}", parts.len()),
        });
    }
    let mut out = [0.0; 3];
    for (slot, part) in out.iter_mut().zip(&parts) {
        *slot = parse_real(line, key, part)?;
    }
    Ok(State3(out))
}

/// Parses a config source. Unknown keys, malformed lines, unparsable
/// values, and constraint violations are all errors; the result is a
/// fully validated configuration.
pub fn parse_config(text: &str) -> Result<SimConfig, ConfigError> {
    let defaults = SimConfig::default();
    let mut cfg = defaults.clone();
    let mut modes = defaults.scheme.modes();
    let mut scale = defaults.scheme.scale();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') || (t.starts_with('[') && t.ends_with(']')) {
            continue;
        }
        let Some((key, value)) = t.split_once('=') else {
            return Err(ConfigError::Malformed {
                line,
                text: t.to_string(),
            });
        };
        let key = key.trim();
        let value = value.trim();
        match key {
            "a" => cfg.params.a = parse_real(line, key, value)?,
            "b" => cfg.params.b = parse_real(line, key, value)?,
            "c" => cfg.params.c = parse_real(line, key, value)?,
            "order" => {
                let q = parse_real(line, key, value)?;
                cfg.order = FractionalOrder::new(q).map_err(|e| ConfigError::InvalidValue {
                    line,
                    key: key.to_string(),
                    reason: e.to_string(),
                })?;
            }
            "step" => cfg.h = parse_real(line, key, value)?,
            "t_end" => cfg.t_end = parse_real(line, key, value)?,
            "lambda" => cfg.lambda = parse_real(line, key, value)?,
            "scale" => scale = parse_real(line, key, value)?,
            "mode1" | "mode2" | "mode3" => {
                let i = (key.as_bytes()[4] - b'1') as usize;
                modes[i] = parse_mode(value).map_err(|reason| ConfigError::InvalidValue {
                    line,
                    key: key.to_string(),
                    reason,
                })?;
            }
            "case" => {
                cfg.case = parse_case(value).map_err(|reason| ConfigError::InvalidValue {
                    line,
                    key: key.to_string(),
                    reason,
                })?;
            }
            "memory" => {
                cfg.memory = parse_memory(value).map_err(|reason| ConfigError::InvalidValue {
                    line,
                    key: key.to_string(),
                    reason,
                })?;
            }
            "controls" => {
                cfg.controls_enabled = match value {
                    "on" => true,
                    "off" => false,
                    other => {
                        return Err(ConfigError::InvalidValue {
                            line,
                            key: key.to_string(),
                            reason: format!("'{other}' is not on/off"),
                        })
                    }
                };
            }
            "x0" => cfg.x0 = parse_state(line, key, value)?,
            "y0" => cfg.y0 = parse_state(line, key, value)?,
            "z0" => cfg.z0 = parse_state(line, key, value)?,
            "w0" => cfg.w0 = parse_state(line, key, value)?,
            "tol" => cfg.tol = parse_real(line, key, value)?,
            other => {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: other.to_string(),
                })
            }
        }
    }

    cfg.scheme = HybridScheme::new(modes, scale)?;
    cfg.validate()?;
    Ok(cfg)
}

/// Renders a configuration back to the same `key = value` format, using
/// shortest-round-trip number formatting. `parse_config(render_config(c))`
/// reproduces `c` exactly.
pub fn render_config(cfg: &SimConfig) -> String {
    let state = |s: &State3| format!("{}, {}, {}", s.0[0], s.0[1], s.0[2]);
    let mut out = String::new();
    let _ = writeln!(out, "a = {}", cfg.params.a);
    let _ = writeln!(out, "b = {}", cfg.params.b);
    let _ = writeln!(out, "c = {}", cfg.params.c);
    let _ = writeln!(out, "order = {}", cfg.order.value());
    let _ = writeln!(out, "step = {}", cfg.h);
    let _ = writeln!(out, "t_end = {}", cfg.t_end);
    let _ = writeln!(out, "lambda = {}", cfg.lambda);
    let _ = writeln!(out, "scale = {}", cfg.scheme.scale());
    let modes = cfg.scheme.modes();
    let _ = writeln!(out, "mode1 = {}", mode_name(modes[0]));
    let _ = writeln!(out, "mode2 = {}", mode_name(modes[1]));
    let _ = writeln!(out, "mode3 = {}", mode_name(modes[2]));
    let _ = writeln!(out, "case = {}", case_name(cfg.case));
    let _ = writeln!(out, "memory = {}", memory_name(cfg.memory));
    let _ = writeln!(
        out,
        "controls = {}",
        if cfg.controls_enabled { "on" } else { "off" }
    );
    let _ = writeln!(out, "x0 = {}", state(&cfg.x0));
    let _ = writeln!(out, "y0 = {}", state(&cfg.y0));
    let _ = writeln!(out, "z0 = {}", state(&cfg.z0));
    let _ = writeln!(out, "w0 = {}", state(&cfg.w0));
    let _ = writeln!(out, "tol = {}", cfg.tol);
    out
}

/// Named experiment variants, applied as deltas on top of the resolved
/// base configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Equal-split allocation (the default case).
    Case1,
    /// First-response-only allocation.
    Case2,
    /// Controls disabled: the no-synchronization baseline.
    Uncontrolled,
    /// Single-system phase portrait: controls off, 20 s window.
    Attractor,
}

impl Preset {
    pub fn from_name(name: &str) -> Result<Self, ConfigError> {
        match name {
            "case1" => Ok(Preset::Case1),
            "case2" => Ok(Preset::Case2),
            "uncontrolled" => Ok(Preset::Uncontrolled),
            "attractor" => Ok(Preset::Attractor),
            other => Err(ConfigError::UnknownPreset(other.to_string())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::Case1 => "case1",
            Preset::Case2 => "case2",
            Preset::Uncontrolled => "uncontrolled",
            Preset::Attractor => "attractor",
        }
    }

    pub fn apply(self, cfg: &mut SimConfig) {
        match self {
            Preset::Case1 => cfg.case = AllocationCase::SplitEqually,
            Preset::Case2 => cfg.case = AllocationCase::FirstResponseOnly,
            Preset::Uncontrolled => cfg.controls_enabled = false,
            Preset::Attractor => {
                cfg.controls_enabled = false;
                cfg.t_end = 20.0;
            }
        }
    }
}

/// Per-flag overrides; `None` leaves the underlying value alone.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub order: Option<f64>,
    pub step: Option<f64>,
    pub t_end: Option<f64>,
    pub lambda: Option<f64>,
    pub scale: Option<f64>,
    pub case: Option<AllocationCase>,
    pub memory: Option<MemoryPolicy>,
    pub tol: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut SimConfig) -> Result<(), ConfigError> {
        if let Some(q) = self.order {
            cfg.order = FractionalOrder::new(q).map_err(|e| ConfigError::BadFlag {
                flag: "--order",
                reason: e.to_string(),
            })?;
        }
        if let Some(h) = self.step {
            cfg.h = h;
        }
        if let Some(t_end) = self.t_end {
            cfg.t_end = t_end;
        }
        if let Some(lambda) = self.lambda {
            cfg.lambda = lambda;
        }
        if let Some(scale) = self.scale {
            cfg.scheme = HybridScheme::new(cfg.scheme.modes(), scale)?;
        }
        if let Some(case) = self.case {
            cfg.case = case;
        }
        if let Some(memory) = self.memory {
            cfg.memory = memory;
        }
        if let Some(tol) = self.tol {
            cfg.tol = tol;
        }
        Ok(())
    }
}

/// Full resolution chain: optional file, then optional preset, then flag
/// overrides, then validation.
pub fn resolve(
    config_path: Option<&Path>,
    preset: Option<Preset>,
    overrides: &Overrides,
) -> Result<SimConfig, ConfigError> {
    let mut cfg = match config_path {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
                path: path.to_path_buf(),
                source,
            })?;
            parse_config(&text)?
        }
        None => SimConfig::default(),
    };
    if let Some(preset) = preset {
        preset.apply(&mut cfg);
    }
    overrides.apply(&mut cfg)?;
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use fracsync_core::chen::SystemParams;

    #[test]
    fn empty_source_is_the_default_experiment() {
        assert_eq!(parse_config("").unwrap(), SimConfig::default());
    }

    #[test]
    fn comments_blanks_and_sections_are_ignored() {
        let cfg = parse_config("# a comment\n\n[system]\nlambda = 2\n").unwrap();
        assert_eq!(cfg.lambda, 2.0);
        assert_eq!(cfg.params, SystemParams::default());
    }

    #[test]
    fn single_override_leaves_the_rest_at_defaults() {
        let cfg = parse_config("lambda = 2.5\n").unwrap();
        let expected = SimConfig {
            lambda: 2.5,
            ..Default::default()
        };
        assert_eq!(cfg, expected);
    }

    #[test]
    fn all_keys_round_trip_through_render() {
        let source = "\
a = 36\nb = 3.5\nc = 27\norder = 0.9\nstep = 0.01\nt_end = 5\nlambda = 2\nscale = 4\n\
mode1 = anti\nmode2 = projective\nmode3 = complete\ncase = first\nmemory = 200\ncontrols = off\n\
x0 = 1, 2, 3\ny0 = -1, -2, -3\nz0 = 0.5, 0, 0\nw0 = 0, 0.25, 0\ntol = 0.001\n";
        let cfg = parse_config(source).unwrap();
        let rendered = render_config(&cfg);
        let reparsed = parse_config(&rendered).unwrap();
        assert_eq!(cfg, reparsed);
        assert_eq!(rendered, render_config(&reparsed));
    }

    #[test]
    fn unknown_key_is_named_with_its_line() {
        let err = parse_config("a = 35\nbogus = 1\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2"), "{msg}");
        assert!(msg.contains("bogus"), "{msg}");
    }

    #[test]
    fn malformed_line_is_reported_with_number() {
        let err = parse_config("a = 35\nnot a pair\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn unparsable_number_names_key_and_line() {
        let err = parse_config("\n\nstep = fast\n").unwrap_err();
        let msg = err.to_string();
        assert!(
            msg.contains("line 3") && msg.contains("step") && msg.contains("fast"),
            "{msg}"
        );
    }

    #[test]
    fn order_outside_unit_interval_is_rejected() {
        let err = parse_config("order = 1.5\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("order") && msg.contains("1.5"), "{msg}");
    }

    #[test]
    fn state_vectors_need_three_components() {
        for bad in ["x0 = 1, 2", "x0 = 1, 2, 3, 4", "x0 = 1, two, 3"] {
            let err = parse_config(bad).unwrap_err();
            assert!(err.to_string().contains("x0"), "{bad}: {err}");
        }
    }

    #[test]
    fn memory_accepts_full_or_positive_window() {
        assert_eq!(
            parse_config("memory = full\n").unwrap().memory,
            MemoryPolicy::Full
        );
        assert_eq!(
            parse_config("memory = 250\n").unwrap().memory,
            MemoryPolicy::Truncated(NonZeroUsize::new(250).unwrap())
        );
        assert!(parse_config("memory = 0\n").is_err());
        assert!(parse_config("memory = some\n").is_err());
    }

    #[test]
    fn controls_accepts_on_off_only() {
        assert!(!parse_config("controls = off\n").unwrap().controls_enabled);
        assert!(parse_config("controls = yes\n").is_err());
    }

    #[test]
    fn zero_scale_with_projective_mode_is_a_constraint_error() {
        let err = parse_config("scale = 0\n").unwrap_err();
        assert!(matches!(
            err,
            ConfigError::Scheme(SchemeError::ZeroProjectiveScale)
        ));
        // All-complete modes don't use the scale, so zero is fine there.
        assert!(
            parse_config("scale = 0\nmode1 = complete\nmode2 = complete\nmode3 = complete\n")
                .is_ok()
        );
    }

    #[test]
    fn constraint_violations_name_the_constraint() {
        let err = parse_config("step = -0.005\n").unwrap_err();
        assert!(err.to_string().contains("positive"), "{err}");
        let err = parse_config("t_end = 0.001\n").unwrap_err();
        assert!(err.to_string().contains("at least one step"), "{err}");
        let err = parse_config("tol = 0\n").unwrap_err();
        assert!(err.to_string().contains("positive"), "{err}");
    }

    #[test]
    fn presets_apply_expected_deltas() {
        let mut cfg = SimConfig::default();
        Preset::Case2.apply(&mut cfg);
        assert_eq!(cfg.case, AllocationCase::FirstResponseOnly);

        let mut cfg = SimConfig::default();
        Preset::Uncontrolled.apply(&mut cfg);
        assert!(!cfg.controls_enabled);
        assert_eq!(cfg.t_end, 10.0);

        let mut cfg = SimConfig::default();
        Preset::Attractor.apply(&mut cfg);
        assert!(!cfg.controls_enabled);
        assert_eq!(cfg.t_end, 20.0);

        assert_eq!(Preset::from_name("case1").unwrap(), Preset::Case1);
        assert!(matches!(
            Preset::from_name("case3"),
            Err(ConfigError::UnknownPreset(_))
        ));
    }

    #[test]
    fn flags_override_file_values() {
        let cfg = parse_config("lambda = 2\ncase = split\n").unwrap();
        let mut cfg2 = cfg.clone();
        let ov = Overrides {
            lambda: Some(7.0),
            case: Some(AllocationCase::FirstResponseOnly),
            ..Overrides::default()
        };
        ov.apply(&mut cfg2).unwrap();
        assert_eq!(cfg2.lambda, 7.0);
        assert_eq!(cfg2.case, AllocationCase::FirstResponseOnly);
        assert_eq!(cfg2.h, cfg.h);
    }

    #[test]
    fn scale_override_revalidates_the_scheme() {
        let mut cfg = SimConfig::default();
        let ov = Overrides {
            scale: Some(0.0),
            ..Overrides::default()
        };
        assert!(matches!(
            ov.apply(&mut cfg),
            Err(ConfigError::Scheme(SchemeError::ZeroProjectiveScale))
        ));
    }

    #[test]
    fn resolve_chain_orders_file_preset_flags() {
        use std::io::Write;
        let dir = std::env::temp_dir().join("fracsync-config-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("chain.cfg");
        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(f, "lambda = 2").unwrap();
        writeln!(f, "case = first").unwrap();
        drop(f);

        // Preset flips the case back; the flag then wins on lambda.
        let cfg = resolve(
            Some(&path),
            Some(Preset::Case1),
            &Overrides {
                lambda: Some(9.0),
                ..Overrides::default()
            },
        )
        .unwrap();
        assert_eq!(cfg.case, AllocationCase::SplitEqually);
        assert_eq!(cfg.lambda, 9.0);
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn resolve_missing_file_is_an_io_error() {
        let err = resolve(
            Some(Path::new("/nonexistent/nowhere.cfg")),
            None,
            &Overrides::default(),
        )
        .unwrap_err();
        assert!(matches!(err, ConfigError::Io { .. }));
    }
}
