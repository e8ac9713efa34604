//! Run parameters, read from `key=value` lines.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{is_prime, DEFAULT_M_MAX};
use crate::series::{DEFAULT_K_MAX, DEFAULT_PRECISION};
use crate::skew::DEFAULT_FACTOR_BOUND;

pub const DEFAULT_HULL_DEGREE: usize = 2;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    pub p: u32,
    pub s: u32,
    pub m_max: usize,
    pub precision: i64,
    pub k_max: u32,
    /// Largest degree factored or enumerated.
    pub degree_bound: usize,
    pub hull_degree: usize,
    pub seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            p: 2,
            s: 1,
            m_max: DEFAULT_M_MAX,
            precision: DEFAULT_PRECISION,
            k_max: DEFAULT_K_MAX,
            degree_bound: DEFAULT_FACTOR_BOUND,
            hull_degree: DEFAULT_HULL_DEGREE,
            seed: 0,
        }
    }
}

impl Config {
    /// Applies `key=value` lines over the current values. Keys are `p`, `s`,
    /// `mmax`, `precision`, `kmax`, `degbound`, `hulldeg` and `seed`; blank
    /// lines and `#` comments are skipped.
    pub fn apply_text(&mut self, src: &str) -> Result<()> {
        for (n, raw) in src.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidConfig(format!("line {}: expected key=value", n + 1)))?;
            self.set(key.trim(), value.trim())
                .map_err(|e| Error::InvalidConfig(format!("line {}: {e}", n + 1)))?;
        }
        self.validate()
    }

    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> std::result::Result<T, String> {
            v.parse().map_err(|_| format!("bad value '{v}' for {key}"))
        }
        match key {
            "p" => self.p = num(key, value)?,
            "s" => self.s = num(key, value)?,
            "mmax" => self.m_max = num(key, value)?,
            "precision" => self.precision = num(key, value)?,
            "kmax" => self.k_max = num(key, value)?,
            "degbound" => self.degree_bound = num(key, value)?,
            "hulldeg" => self.hull_degree = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            _ => return Err(format!("unknown key '{key}'")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !is_prime(self.p) {
            return Err(Error::NotPrime(self.p));
        }
        let positive = [
            ("s", self.s as i64),
            ("mmax", self.m_max as i64),
            ("precision", self.precision),
            ("kmax", self.k_max as i64),
            ("degbound", self.degree_bound as i64),
            ("hulldeg", self.hull_degree as i64),
        ];
        for (k, v) in positive {
            if v <= 0 {
                return Err(Error::InvalidConfig(format!("{k} must be positive")));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p={}", self.p)?;
        writeln!(f, "s={}", self.s)?;
        writeln!(f, "mmax={}", self.m_max)?;
        writeln!(f, "precision={}", self.precision)?;
        writeln!(f, "kmax={}", self.k_max)?;
        writeln!(f, "degbound={}", self.degree_bound)?;
        writeln!(f, "hulldeg={}", self.hull_degree)?;
        write!(f, "seed={}", self.seed)
    }
}
