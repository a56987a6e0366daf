//! Run configuration: defaults, an optional flat `key = value` file, and
//! command-line overrides (flags win).
//!
//! Recognized keys: `command`, `L`, `alpha`, `alpha_grid`, `T_grid`,
//! `jprime`, `out`, `tol`. Blank lines and `#` comments are ignored.
//!
//! ```text
//! # sweep used for the gap curves
//! L = 4,6,8,10,12
//! alpha_grid = 0:1:101
//! out = gap.csv
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};

/// Uniform grid `min:max:steps` including both endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Grid {
    pub fn new(min: f64, max: f64, steps: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) || min >= max {
            return Err(Error::Config(format!("grid needs finite min < max, got {min}:{max}")));
        }
        if steps < 2 {
            return Err(Error::Config(format!("grid needs at least 2 steps, got {steps}")));
        }
        Ok(Self { min, max, steps })
    }

    pub fn points(&self) -> Vec<f64> {
        let span = self.max - self.min;
        let last = self.steps - 1;
        (0..self.steps)
            .map(|k| {
                if k == last {
                    self.max
                } else {
                    self.min + span * k as f64 / last as f64
                }
            })
            .collect()
    }

    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.steps - 1) as f64
    }
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let [min, max, steps] = parts.as_slice() else {
            return Err(Error::Config(format!("grid must look like min:max:steps, got {s:?}")));
        };
        let num = |x: &str| {
            x.parse::<f64>()
                .map_err(|_| Error::Config(format!("bad number {x:?} in grid {s:?}")))
        };
        let steps = steps
            .parse::<usize>()
            .map_err(|_| Error::Config(format!("bad step count {steps:?} in grid {s:?}")))?;
        Grid::new(num(min)?, num(max)?, steps)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.min, self.max, self.steps)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Option<String>,
    pub sites: Vec<usize>,
    /// Explicit alternation values; used by commands that take a short
    /// list rather than a grid.
    pub alphas: Option<Vec<f64>>,
    pub alpha_grid: Grid,
    pub t_grid: Grid,
    pub j_prime: f64,
    pub out: Option<PathBuf>,
    /// Root-finding tolerance, both on the abscissa and on the residual.
    pub tol: f64,
    /// Bracket width for the gap-minimum refinement.
    pub min_tol: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: None,
            sites: vec![12],
            alphas: None,
            alpha_grid: Grid {
                min: 0.0,
                max: 1.0,
                steps: 101,
            },
            t_grid: Grid {
                min: 0.01,
                max: 3.0,
                steps: 150,
            },
            j_prime: 1.0,
            out: None,
            tol: 1e-6,
            min_tol: 1e-4,
        }
    }
}

/// Overrides as parsed from flags; `None` keeps the current value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub sites: Option<Vec<usize>>,
    pub alphas: Option<Vec<f64>>,
    pub alpha_grid: Option<Grid>,
    pub t_grid: Option<Grid>,
    pub j_prime: Option<f64>,
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
}

pub fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| {
            v.parse::<T>()
                .map_err(|_| Error::Config(format!("bad value {v:?} for {key}")))
        })
        .collect()
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = Self::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!("line {}: expected key = value", lineno + 1)));
            };
            self.set(key.trim(), value.trim().trim_matches('"'))?;
        }
        Ok(())
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let number = |v: &str| {
            v.parse::<f64>()
                .map_err(|_| Error::Config(format!("bad number {v:?} for {key}")))
        };
        match key {
            "command" => self.command = Some(value.to_string()),
            "L" => self.sites = parse_list(key, value)?,
            "alpha" => self.alphas = Some(parse_list(key, value)?),
            "alpha_grid" => self.alpha_grid = value.parse()?,
            "T_grid" => self.t_grid = value.parse()?,
            "jprime" => self.j_prime = number(value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "tol" => self.tol = number(value)?,
            other => return Err(Error::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    pub fn apply(&mut self, o: Overrides) {
        if let Some(v) = o.sites {
            self.sites = v;
        }
        if let Some(v) = o.alphas {
            self.alphas = Some(v);
        }
        if let Some(v) = o.alpha_grid {
            self.alpha_grid = v;
        }
        if let Some(v) = o.t_grid {
            self.t_grid = v;
        }
        if let Some(v) = o.j_prime {
            self.j_prime = v;
        }
        if let Some(v) = o.out {
            self.out = Some(v);
        }
        if let Some(v) = o.tol {
            self.tol = v;
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites.is_empty() {
            return Err(Error::Config("L list is empty".into()));
        }
        if matches!(&self.alphas, Some(a) if a.is_empty()) {
            return Err(Error::Config("alpha list is empty".into()));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::Config(format!("tol must be positive, got {}", self.tol)));
        }
        if self.alpha_grid.min < 0.0 || self.alpha_grid.max > 1.0 {
            return Err(Error::Config(format!("alpha grid {} leaves [0, 1]", self.alpha_grid)));
        }
        if self.t_grid.min < 0.0 {
            return Err(Error::Config(format!("T grid {} has negative temperatures", self.t_grid)));
        }
        Grid::new(self.alpha_grid.min, self.alpha_grid.max, self.alpha_grid.steps)?;
        Grid::new(self.t_grid.min, self.t_grid.max, self.t_grid.steps)?;
        Ok(())
    }
}
