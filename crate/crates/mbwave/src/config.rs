//! Plain key-value configuration files and small CSV readers.
//!
//! A config file is a sequence of `key = value` lines. Blank lines and
//! lines starting with `#` are ignored; inline `#` comments are not
//! supported (values may contain `#`). Keys are case-sensitive and may not
//! repeat. All parse errors carry the file path and line number.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::boundary::{BoundaryCurve, Family};
use crate::error::{Error, Result};

/// Parsed key-value settings with source locations.
#[derive(Debug, Clone)]
pub struct Settings {
    path: String,
    entries: BTreeMap<String, (String, usize)>,
}

impl Settings {
    /// Parses settings from text; `path` labels error messages.
    pub fn parse(path: &str, text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let Some((key, value)) = trimmed.split_once('=') else {
                return Err(Error::Config {
                    path: path.into(),
                    line,
                    msg: format!("expected `key = value`, got `{trimmed}`"),
                });
            };
            let key = key.trim();
            let value = value.trim();
            if key.is_empty() {
                return Err(Error::Config {
                    path: path.into(),
                    line,
                    msg: "empty key".into(),
                });
            }
            if let Some((_, prev)) = entries.insert(key.to_string(), (value.to_string(), line)) {
                return Err(Error::Config {
                    path: path.into(),
                    line,
                    msg: format!("duplicate key `{key}` (first set on line {prev})"),
                });
            }
        }
        Ok(Settings {
            path: path.into(),
            entries,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let shown = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
            path: shown.clone(),
            line: 0,
            msg: format!("cannot read file: {e}"),
        })?;
        Settings::parse(&shown, &text)
    }

    pub fn path(&self) -> &str {
        &self.path
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| Error::Config {
            path: self.path.clone(),
            line: 0,
            msg: format!("missing required key `{key}`"),
        })
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((v, line)) => v.parse::<f64>().map(Some).map_err(|_| Error::Config {
                path: self.path.clone(),
                line: *line,
                msg: format!("key `{key}`: `{v}` is not a number"),
            }),
        }
    }

    pub fn get_usize(&self, key: &str) -> Result<Option<usize>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((v, line)) => v.parse::<usize>().map(Some).map_err(|_| Error::Config {
                path: self.path.clone(),
                line: *line,
                msg: format!("key `{key}`: `{v}` is not a non-negative integer"),
            }),
        }
    }

    pub fn get_u64(&self, key: &str) -> Result<Option<u64>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((v, line)) => v.parse::<u64>().map(Some).map_err(|_| Error::Config {
                path: self.path.clone(),
                line: *line,
                msg: format!("key `{key}`: `{v}` is not a non-negative integer"),
            }),
        }
    }

    /// Rejects keys outside `allowed`, pointing at the offending line.
    pub fn check_known(&self, allowed: &[&str]) -> Result<()> {
        for (key, (_, line)) in &self.entries {
            if !allowed.contains(&key.as_str()) {
                return Err(Error::Config {
                    path: self.path.clone(),
                    line: *line,
                    msg: format!("unknown key `{key}` (expected one of: {})", allowed.join(", ")),
                });
            }
        }
        Ok(())
    }

    /// Resolves a path value relative to this file's directory.
    pub fn resolve(&self, value: &str) -> PathBuf {
        let p = Path::new(value);
        if p.is_absolute() {
            return p.into();
        }
        match Path::new(&self.path).parent() {
            Some(dir) if !dir.as_os_str().is_empty() => dir.join(p),
            _ => p.into(),
        }
    }
}

/// Builds a boundary curve from settings.
///
/// Keys: `family` (linear|parabolic|hyperbolic|shrinking|custom), `epsilon`
/// (required except for custom), `samples` (CSV path with columns t,s;
/// custom only, resolved relative to the config file).
pub fn curve_from_settings(settings: &Settings) -> Result<BoundaryCurve> {
    settings.check_known(&["family", "epsilon", "samples"])?;
    let family: Family = settings.require("family")?.parse()?;
    let epsilon = settings.get_f64("epsilon")?;
    let bad = |msg: String| Error::Config {
        path: settings.path().into(),
        line: 0,
        msg,
    };
    match family {
        Family::Custom => {
            let samples = settings.require("samples")?;
            let path = settings.resolve(samples);
            let cols = read_csv_columns(&path, 2)?;
            let mut it = cols.into_iter();
            BoundaryCurve::from_samples(it.next().unwrap(), it.next().unwrap())
        }
        _ => {
            let eps =
                epsilon.ok_or_else(|| bad(format!("family `{family}` needs `epsilon`")))?;
            match family {
                Family::Linear => BoundaryCurve::linear(eps),
                Family::Parabolic => BoundaryCurve::parabolic(eps),
                Family::Hyperbolic => BoundaryCurve::hyperbolic(eps),
                Family::Shrinking => BoundaryCurve::shrinking(eps),
                Family::Custom => unreachable!(),
            }
        }
    }
}

/// Reads a numeric CSV file with exactly `want` columns.
///
/// A first line that does not parse as numbers is treated as a header.
/// Returns the data in column order.
pub fn read_csv_columns(path: &Path, want: usize) -> Result<Vec<Vec<f64>>> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
        path: shown.clone(),
        line: 0,
        msg: format!("cannot read file: {e}"),
    })?;
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); want];
    let mut rows = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        let parsed: Option<Vec<f64>> = fields.iter().map(|f| f.parse().ok()).collect();
        match parsed {
            None if rows == 0 => continue, // header
            None => {
                return Err(Error::Config {
                    path: shown,
                    line,
                    msg: format!("non-numeric field in `{trimmed}`"),
                })
            }
            Some(values) => {
                if values.len() != want {
                    return Err(Error::Config {
                        path: shown,
                        line,
                        msg: format!("expected {want} columns, got {}", values.len()),
                    });
                }
                for (col, v) in cols.iter_mut().zip(values) {
                    col.push(v);
                }
                rows += 1;
            }
        }
    }
    if rows == 0 {
        return Err(Error::Config {
            path: shown,
            line: 0,
            msg: "no data rows".into(),
        });
    }
    Ok(cols)
}
