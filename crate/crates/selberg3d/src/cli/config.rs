//! Run configuration: a TOML file with sections, overridden by flags.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::CliError;

/// Report format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupConfig {
    pub d: Option<u32>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bounds {
    /// Entry height for element and class enumeration.
    pub height: Option<i64>,
    pub norm_bound: Option<f64>,
    pub x_max: Option<f64>,
    /// Height of the coset bottom rows in Eisenstein sums.
    pub coset_height: Option<i64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

/// A grid entry: a number or a string such as `"2+1i"` or `"pi/3"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridValue {
    Number(f64),
    Text(String),
}

impl GridValue {
    fn as_text(&self) -> String {
        match self {
            Self::Number(x) => x.to_string(),
            Self::Text(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default)]
    pub s: Vec<GridValue>,
    #[serde(default)]
    pub t: Vec<GridValue>,
    #[serde(default)]
    pub x: Vec<GridValue>,
}

/// Contents of a configuration file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Subcommand path such as `"zeta partial"`, used by `run`.
    pub command: Option<String>,
    #[serde(default)]
    pub group: GroupConfig,
    /// Character names joined by `+`, or a path to a representation file.
    pub rep: Option<String>,
    #[serde(default)]
    pub bounds: Bounds,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub grid: GridConfig,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        let cfg: Self = toml::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load_optional(path: Option<&Path>) -> Result<Self, CliError> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        for (k, v) in &self.tolerances {
            check_tol(k, *v)?;
        }
        let b = &self.bounds;
        if let Some(h) = b.height {
            check_height("height", h)?;
        }
        if let Some(h) = b.coset_height {
            check_height("coset_height", h)?;
        }
        if let Some(n) = b.norm_bound {
            check_positive("norm_bound", n)?;
        }
        if let Some(x) = b.x_max {
            check_nonnegative("x_max", x)?;
        }
        Ok(())
    }

    pub fn d(&self, flag: Option<u32>) -> u32 {
        flag.or(self.group.d).unwrap_or(1)
    }

    pub fn rep(&self, flag: Option<&str>) -> String {
        flag.map(str::to_string).or_else(|| self.rep.clone()).unwrap_or_else(|| "trivial".into())
    }

    pub fn height(&self, flag: Option<i64>, default: i64) -> Result<i64, CliError> {
        let h = flag.or(self.bounds.height).unwrap_or(default);
        check_height("height", h)?;
        Ok(h)
    }

    pub fn coset_height(&self, flag: Option<i64>, default: i64) -> Result<i64, CliError> {
        let h = flag.or(self.bounds.coset_height).unwrap_or(default);
        check_height("coset_height", h)?;
        Ok(h)
    }

    pub fn norm_bound(&self, flag: Option<f64>, default: f64) -> Result<f64, CliError> {
        let n = flag.or(self.bounds.norm_bound).unwrap_or(default);
        check_positive("norm_bound", n)?;
        Ok(n)
    }

    pub fn x_max(&self, flag: Option<f64>, default: f64) -> Result<f64, CliError> {
        let x = flag.or(self.bounds.x_max).unwrap_or(default);
        check_nonnegative("x_max", x)?;
        Ok(x)
    }

    /// A named tolerance: the flag, then the file, then the default.
    pub fn tol(&self, name: &str, flag: Option<f64>, default: f64) -> Result<f64, CliError> {
        let t = flag.or_else(|| self.tolerances.get(name).copied()).unwrap_or(default);
        check_tol(name, t)?;
        Ok(t)
    }

    pub fn output(&self, flag: Option<&Path>) -> Option<PathBuf> {
        flag.map(Path::to_path_buf).or_else(|| self.output.path.clone())
    }

    pub fn format(&self, flag: Option<Format>) -> Format {
        flag.or(self.output.format).unwrap_or_default()
    }

    /// Complex grid from flags, else the file's `grid.s`, else the default.
    pub fn s_grid(&self, flag: &[String], default: &[f64]) -> Result<Vec<Complex64>, CliError> {
        if !flag.is_empty() {
            return flag.iter().map(|s| parse_complex(s)).collect();
        }
        if !self.grid.s.is_empty() {
            return self.grid.s.iter().map(|v| parse_complex(&v.as_text())).collect();
        }
        Ok(default.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Real grid named `t` or `x`.
    pub fn real_grid(&self, name: &str, flag: &[String], default: &[f64]) -> Result<Vec<f64>, CliError> {
        if !flag.is_empty() {
            return flag.iter().map(|s| parse_real(s)).collect();
        }
        let from_file = match name {
            "t" => &self.grid.t,
            "x" => &self.grid.x,
            _ => return Err(config_err(format!("no grid named {name}"))),
        };
        if !from_file.is_empty() {
            return from_file.iter().map(|v| parse_real(&v.as_text())).collect();
        }
        Ok(default.to_vec())
    }
}

fn check_tol(name: &str, t: f64) -> Result<(), CliError> {
    if !(t > 0.0 && t < 1.0) {
        return Err(config_err(format!("tolerance {name} = {t} must lie in (0, 1)")));
    }
    Ok(())
}

fn check_height(name: &str, h: i64) -> Result<(), CliError> {
    if h < 1 {
        return Err(config_err(format!("{name} must be at least 1, got {h}")));
    }
    Ok(())
}

fn check_positive(name: &str, x: f64) -> Result<(), CliError> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(config_err(format!("{name} must be positive, got {x}")));
    }
    Ok(())
}

fn check_nonnegative(name: &str, x: f64) -> Result<(), CliError> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(config_err(format!("{name} must be non-negative, got {x}")));
    }
    Ok(())
}

/// Reals with an optional `pi` factor: `1.5`, `pi`, `pi/3`, `2pi/3`, `-0.5`.
pub fn parse_real(text: &str) -> Result<f64, CliError> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
    let bad = || config_err(format!("cannot parse {text:?} as a real number"));
    if let Ok(x) = t.parse::<f64>() {
        return Ok(x);
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n, d.parse::<f64>().map_err(|_| bad())?),
        None => (t.as_str(), 1.0),
    };
    let coef = match num.strip_suffix("pi").or_else(|| num.strip_suffix('π')) {
        Some("") => 1.0,
        Some("-") => -1.0,
        Some(c) => c.trim_end_matches('*').parse::<f64>().map_err(|_| bad())?,
        None => num.parse::<f64>().map_err(|_| bad())?,
    };
    let x = if num.ends_with("pi") || num.ends_with('π') { coef * PI } else { coef };
    Ok(x / den)
}

/// Complex numbers `a`, `bi`, `a+bi`, `a-bi`, `i`, plus `rho = e^{iπ/3}`.
pub fn parse_complex(text: &str) -> Result<Complex64, CliError> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
    let bad = || config_err(format!("cannot parse {text:?} as a complex number"));
    if t == "rho" {
        return Ok(Complex64::from_polar(1.0, PI / 3.0));
    }
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return Ok(Complex64::new(t.parse::<f64>().map_err(|_| bad())?, 0.0));
    };
    // split at the last sign that is not part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && bytes[k - 1] != b'e');
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(Complex64::new(re.parse::<f64>().map_err(|_| bad())?, im))
}
