//! CSV serialization of run results with byte-stable number formatting.
//!
//! Numbers are written with 9 significant digits, as plain decimal or
//! scientific notation — whichever is shorter, plain winning ties — so
//! identical runs always serialize to identical bytes. Non-finite values
//! appear as `NaN`/`inf`/`-inf` and parse back, keeping truncated
//! divergent rows round-trippable.

use fracsync_core::controller::ErrorState;
use fracsync_core::harness::SimResult;
use fracsync_core::solver::Trajectory;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Column order of the synchronization series.
pub const SERIES_HEADER: &str = "t,x1,x2,x3,y1,y2,y3,z1,z2,z3,w1,w2,w3,u1,u2,u3,u4,u5,u6,e1,e2,e3";

/// Column order of a single-system trajectory.
pub const TRAJECTORY_HEADER: &str = "t,x1,x2,x3";

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("bad header: expected '{expected}', found '{found}'")]
    BadHeader { expected: String, found: String },
    #[error("line {line}: {reason}")]
    BadRow { line: usize, reason: String },
}

/// Formats one value with 9 significant digits: plain decimal or
/// scientific, whichever is shorter (ties go to plain). Zero of either
/// sign is `0`; non-finite values are `NaN`, `inf`, `-inf`.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "NaN".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }

    let magnitude = x.abs();
    // `{:.8e}` renders the correctly rounded 9-significant-digit value as
    // d.dddddddd e±E; both output shapes are rebuilt from those digits.
    let raw = format!("{magnitude:.8e}");
    let (mantissa, exp) = raw
        .split_once('e')
        .expect("LowerExp always contains an exponent");
    let exponent: i32 = exp.parse().expect("exponent is an integer");
    let digits: String = {
        let trimmed = mantissa.trim_end_matches('0').trim_end_matches('.');
        trimmed.chars().filter(|c| *c != '.').collect()
    };

    let sci = {
        let trimmed = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{trimmed}e{exponent}")
    };
    let plain = if exponent >= 0 {
        let int_len = exponent as usize + 1;
        if digits.len() <= int_len {
            let zeros = "0".repeat(int_len - digits.len());
            format!("{digits}{zeros}")
        } else {
            format!("{}.{}", &digits[..int_len], &digits[int_len..])
        }
    } else {
        let zeros = "0".repeat((-exponent) as usize - 1);
        format!("0.{zeros}{digits}")
    };

    let body = if plain.len() <= sci.len() { plain } else { sci };
    if x < 0.0 {
        format!("-{body}")
    } else {
        body
    }
}

fn atomic_write(dest: &Path, contents: &str) -> Result<(), SeriesError> {
    let mut tmp_name = dest.as_os_str().to_os_string();
    tmp_name.push(".tmp");
    let tmp = PathBuf::from(tmp_name);
    let finish = |source: std::io::Error| {
        let _ = std::fs::remove_file(&tmp);
        SeriesError::Write {
            path: dest.to_path_buf(),
            source,
        }
    };
    std::fs::write(&tmp, contents).map_err(finish)?;
    std::fs::rename(&tmp, dest).map_err(finish)
}

/// Writes the full synchronization series. The write is atomic
/// (temp file + rename), so a crash never leaves a half-written file at
/// the destination. A divergent run gains a trailing
/// `# diverged at k=<step>` comment.
pub fn write_series(result: &SimResult, dest: &Path) -> Result<(), SeriesError> {
    let mut out = String::with_capacity(64 * (result.t.len() + 2));
    out.push_str(SERIES_HEADER);
    out.push('\n');
    for k in 0..result.t.len() {
        let mut row = Vec::with_capacity(22);
        row.push(format_number(result.t[k]));
        for system in [&result.x, &result.y, &result.z, &result.w] {
            for v in system[k].0 {
                row.push(format_number(v));
            }
        }
        for v in result.controls[k] {
            row.push(format_number(v));
        }
        for v in result.errors[k].0 {
            row.push(format_number(v));
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    if let Some(k) = result.diverged {
        let _ = writeln!(out, "# diverged at k={k}");
    }
    atomic_write(dest, &out)
}

/// Writes a single-system trajectory (`t,x1,x2,x3`), atomically.
pub fn write_trajectory(traj: &Trajectory, dest: &Path) -> Result<(), SeriesError> {
    let mut out = String::with_capacity(32 * (traj.t.len() + 2));
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for (t, s) in traj.t.iter().zip(&traj.states) {
        let mut row = vec![format_number(*t)];
        row.extend(s.iter().map(|v| format_number(*v)));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    atomic_write(dest, &out)
}

/// A parsed synchronization series.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedSeries {
    /// One entry per sample, in [`SERIES_HEADER`] column order.
    pub rows: Vec<[f64; 22]>,
    /// Step index from a `# diverged at k=…` trailer, if present.
    pub diverged: Option<usize>,
}

impl ParsedSeries {
    pub fn grid(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r[0]).collect()
    }

    pub fn errors(&self) -> Vec<ErrorState> {
        self.rows
            .iter()
            .map(|r| ErrorState([r[19], r[20], r[21]]))
            .collect()
    }
}

/// Parses text produced by [`write_series`]. The header is mandatory;
/// `#` comment lines are skipped except the divergence trailer, which is
/// decoded.
pub fn read_series(text: &str) -> Result<ParsedSeries, SeriesError> {
    let mut rows = Vec::new();
    let mut diverged = None;
    let mut saw_header = false;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let t = raw.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(comment) = t.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(k) = comment.strip_prefix("diverged at k=") {
                diverged = Some(k.trim().parse().map_err(|_| SeriesError::BadRow {
                    line,
                    reason: format!("bad divergence step '{k}'"),
                })?);
            }
            continue;
        }
        if !saw_header {
            if t != SERIES_HEADER {
                return Err(SeriesError::BadHeader {
                    expected: SERIES_HEADER.to_string(),
                    found: t.to_string(),
                });
            }
            saw_header = true;
            continue;
        }
        let fields: Vec<&str> = t.split(',').collect();
        if fields.len() != 22 {
            return Err(SeriesError::BadRow {
                line,
                reason: format!("expected 22 fields, got {}", fields.len()),
            });
        }
        let mut row = [0.0; 22];
        for (slot, field) in row.iter_mut().zip(&fields) {
            *slot = field.trim().parse().map_err(|_| SeriesError::BadRow {
                line,
                reason: format!("'{field}' is not a number"),
            })?;
        }
        rows.push(row);
    }
    if !saw_header {
        return Err(SeriesError::BadHeader {
            expected: SERIES_HEADER.to_string(),
            found: String::new(),
        });
    }
    Ok(ParsedSeries { rows, diverged })
}
