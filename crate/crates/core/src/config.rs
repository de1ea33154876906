//! Experiment configuration in a `key = value` text format.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::MAX_DIM;
use crate::selector::PrimeSelector;
use crate::semigroup::MAX_MARKING_BOUND;
use crate::zeta::delta_ladder;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub selector: String,
    /// Generation bound `X`.
    pub x: u64,
    /// Half-length of the interval `(−T, T)`.
    pub t: f64,
    /// Basis size.
    pub m: usize,
    /// Cutoff of the frame-operator sum.
    pub n: u64,
    pub deltas: Vec<f64>,
    pub qs: Vec<f64>,
    pub out: PathBuf,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            selector: "all".into(),
            x: 1_000_000,
            t: 1.0,
            m: 65,
            n: 1_000_000,
            deltas: delta_ladder(),
            qs: vec![1.0, 2.0],
            out: PathBuf::from("."),
            seed: 20_240_917,
        }
    }
}

const KEYS: [&str; 9] = ["selector", "X", "T", "M", "N", "deltas", "q", "out", "seed"];

fn list(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::input(format!("invalid value `{v}` for `{key}`")))
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    if v.is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|x| parse_num(key, x.trim())).collect()
}

impl ExperimentConfig {
    /// Parses `key = value` lines; `#` starts a comment. Missing keys keep
    /// their defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::input(format!("line {}: expected `key = value`", lineno + 1)))?;
            c.set(key.trim(), value.trim())?;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "selector" => self.selector = v.to_string(),
            "X" => self.x = parse_num(key, v)?,
            "T" => self.t = parse_num(key, v)?,
            "M" => self.m = parse_num(key, v)?,
            "N" => self.n = parse_num(key, v)?,
            "deltas" => self.deltas = parse_list(key, v)?,
            "q" => self.qs = parse_list(key, v)?,
            "out" => self.out = PathBuf::from(v),
            "seed" => self.seed = parse_num(key, v)?,
            _ => return Err(Error::input(format!("unknown key `{key}` (expected one of {})", KEYS.join(", ")))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        PrimeSelector::parse(&self.selector)?;
        if self.x < 2 || self.x > MAX_MARKING_BOUND {
            return Err(Error::input(format!("X must lie in [2, {MAX_MARKING_BOUND}], got {}", self.x)));
        }
        if !(self.t.is_finite() && self.t > 0.0) {
            return Err(Error::input(format!("T must be positive, got {}", self.t)));
        }
        if self.m.is_multiple_of(2) || self.m > MAX_DIM {
            return Err(Error::input(format!("M must be odd and at most {MAX_DIM}, got {}", self.m)));
        }
        if self.n < 1 || self.n > self.x {
            return Err(Error::input(format!("N must lie in [1, X], got {}", self.n)));
        }
        if self.deltas.is_empty() || self.deltas.iter().any(|&d| !(d > 0.0 && d < 1.0)) {
            return Err(Error::input("deltas must be a non-empty list in (0,1)"));
        }
        if self.qs.is_empty() || self.qs.iter().any(|&q| !(q >= 1.0 && q.is_finite())) {
            return Err(Error::input("q must be a non-empty list of values >= 1"));
        }
        if self.out.as_os_str().is_empty() || self.out.to_str().is_some_and(|s| s.contains(['#', '\n'])) {
            return Err(Error::input("out must be a path without `#` or newlines"));
        }
        if self.selector.contains(['#', '\n']) {
            return Err(Error::input("selector must not contain `#` or newlines"));
        }
        Ok(())
    }
}

impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "selector = {}", self.selector)?;
        writeln!(f, "X = {}", self.x)?;
        writeln!(f, "T = {}", self.t)?;
        writeln!(f, "M = {}", self.m)?;
        writeln!(f, "N = {}", self.n)?;
        writeln!(f, "deltas = {}", list(&self.deltas))?;
        writeln!(f, "q = {}", list(&self.qs))?;
        writeln!(f, "out = {}", self.out.display())?;
        writeln!(f, "seed = {}", self.seed)
    }
}

impl FromStr for ExperimentConfig {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}
