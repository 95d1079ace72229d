//! Flat `section.key = value` configuration files.
//!
//! ```text
//! # polar chart, free particle
//! curve.kind = point
//! curve.psi_max = 2*pi
//! state.r = 1.4142135623730951
//! ```
//!
//! Numbers may be written as products and quotients of literals and `pi`
//! (`pi/4`, `-2*pi`, `0.5`).

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

pub const KNOWN_KEYS: &[&str] = &[
    "curve.kind",
    "curve.a",
    "curve.k",
    "curve.file",
    "curve.psi_min",
    "curve.psi_max",
    "potential.kind",
    "potential.k",
    "potential.psi_c",
    "potential.file",
    "potential.test_ramp_k",
    "problem.m",
    "problem.energy",
    "integrator.rtol",
    "integrator.atol",
    "integrator.h_max",
    "run.out_dir",
    "run.t_max",
    "run.psi_ref",
    "run.direction",
    "run.threshold",
    "run.frame",
    "run.svg",
    "grid.r_min",
    "grid.r_max",
    "grid.nr",
    "grid.psi_min",
    "grid.psi_max",
    "grid.npsi",
    "point.r",
    "point.psi",
    "point.x1",
    "point.x2",
    "point.psi_lo",
    "point.psi_hi",
    "free.psi0",
    "free.levels",
    "free.samples",
    "free.psi_min",
    "free.psi_max",
    "separate.psi_start",
    "separate.f_start",
    "separate.f_prime",
    "separate.sigma",
    "separate.psi_min",
    "separate.psi_max",
    "state.r",
    "state.psi",
    "state.p_r",
    "state.p_psi",
    "state.x1",
    "state.x2",
    "state.p1",
    "state.p2",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    /// 1-based line, when the problem is tied to one.
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            message: message.into(),
        }
    }

    pub fn general(message: impl Into<String>) -> Self {
        Self {
            line: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(n) => write!(f, "line {n}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    value: String,
    line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    entries: BTreeMap<String, Entry>,
    base_dir: PathBuf,
}

impl RunConfig {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let Some((key, value)) = body.split_once('=') else {
                return Err(ConfigError::at(line, format!("expected 'key = value', found '{body}'")));
            };
            let (key, value) = (key.trim(), value.trim());
            if !KNOWN_KEYS.contains(&key) {
                return Err(ConfigError::at(line, format!("unknown key '{key}'")));
            }
            if value.is_empty() {
                return Err(ConfigError::at(line, format!("'{key}' has no value")));
            }
            let entry = Entry {
                value: value.to_string(),
                line,
            };
            if let Some(prev) = entries.insert(key.to_string(), entry) {
                return Err(ConfigError::at(
                    line,
                    format!("'{key}' already set on line {}", prev.line),
                ));
            }
        }
        Ok(Self {
            entries,
            base_dir: base_dir.to_path_buf(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::general(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, base)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn str(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        let Some(e) = self.entries.get(key) else {
            return Ok(None);
        };
        parse_number(&e.value)
            .map(Some)
            .ok_or_else(|| ConfigError::at(e.line, format!("'{key}': '{}' is not a finite number", e.value)))
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        Ok(self.f64(key)?.unwrap_or(default))
    }

    pub fn require_f64(&self, key: &str) -> Result<f64, ConfigError> {
        self.f64(key)?
            .ok_or_else(|| ConfigError::general(format!("missing required key '{key}'")))
    }

    pub fn positive(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        let v = self.f64_or(key, default)?;
        if v <= 0.0 {
            return Err(self.invalid(key, "must be positive"));
        }
        Ok(v)
    }

    pub fn count(&self, key: &str, default: usize) -> Result<usize, ConfigError> {
        let Some(e) = self.entries.get(key) else {
            return Ok(default);
        };
        e.value
            .parse::<usize>()
            .map_err(|_| ConfigError::at(e.line, format!("'{key}': '{}' is not a count", e.value)))
    }

    pub fn flag(&self, key: &str) -> Result<bool, ConfigError> {
        match self.entries.get(key) {
            None => Ok(false),
            Some(e) => match e.value.as_str() {
                "true" | "yes" | "1" => Ok(true),
                "false" | "no" | "0" => Ok(false),
                other => Err(ConfigError::at(e.line, format!("'{key}': '{other}' is not a boolean"))),
            },
        }
    }

    pub fn list(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        let Some(e) = self.entries.get(key) else {
            return Ok(None);
        };
        e.value
            .split(',')
            .map(|s| {
                parse_number(s.trim())
                    .ok_or_else(|| ConfigError::at(e.line, format!("'{key}': '{}' is not a number", s.trim())))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }

    /// Path value resolved against the directory of the config file.
    /// Directory that relative paths in the file are resolved against.
    pub fn base_dir(&self) -> &Path {
        &self.base_dir
    }

    pub fn path(&self, key: &str) -> Option<PathBuf> {
        self.str(key).map(|v| {
            let p = Path::new(v);
            if p.is_absolute() {
                p.to_path_buf()
            } else {
                self.base_dir.join(p)
            }
        })
    }

    pub fn invalid(&self, key: &str, why: &str) -> ConfigError {
        let line = self.entries.get(key).map(|e| e.line);
        ConfigError {
            line,
            message: format!("'{key}' {why}"),
        }
    }
}

/// Literal, `pi`, or a chain of them joined by `*` and `/`.
pub fn parse_number(text: &str) -> Option<f64> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    let mut value = 1.0;
    let mut op = '*';
    let mut rest = text;
    loop {
        let end = rest.find(['*', '/']).unwrap_or(rest.len());
        let factor = factor_value(rest[..end].trim())?;
        value = if op == '*' { value * factor } else { value / factor };
        if end == rest.len() {
            break;
        }
        op = rest.as_bytes()[end] as char;
        rest = &rest[end + 1..];
    }
    value.is_finite().then_some(value)
}

fn factor_value(s: &str) -> Option<f64> {
    let (sign, body) = match s.strip_prefix('-') {
        Some(b) => (-1.0, b.trim()),
        None => (1.0, s.strip_prefix('+').unwrap_or(s).trim()),
    };
    if body.eq_ignore_ascii_case("pi") {
        return Some(sign * PI);
    }
    if body.is_empty() || body.starts_with(['-', '+']) {
        return None;
    }
    body.parse::<f64>().ok().map(|v| sign * v)
}
