use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Residual form of the curvature loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurvatureLoss {
    /// `e_i^2 / (|F_i| + epsilon)^2`.
    Normalized,
    /// `e_i^2`.
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BatchPairs {
    All,
    Count(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub tau: f64,
    pub epsilon: f64,
    pub gamma: f64,
    pub ell_plus: f64,
    pub delta: f64,
    pub lambda_rot: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_pairs: BatchPairs,
    pub seed: u64,
    pub radial_init: (f64, f64),
    pub curvature_loss: CurvatureLoss,
    /// Divide edge Forman values by the larger endpoint degree.
    pub normalize_forman: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            tau: 0.1,
            epsilon: 1.0,
            gamma: 1.0,
            ell_plus: 10.0,
            delta: 10.0,
            lambda_rot: 1.0,
            learning_rate: 0.05,
            epochs: 3000,
            batch_pairs: BatchPairs::All,
            seed: 0,
            radial_init: (0.1, 1.0),
            curvature_loss: CurvatureLoss::Normalized,
            normalize_forman: false,
        }
    }
}

/// Keys accepted by [`TrainConfig::set`], in canonical order.
pub const KEYS: &[&str] = &[
    "tau",
    "epsilon",
    "gamma",
    "ell_plus",
    "delta",
    "lambda_rot",
    "learning_rate",
    "epochs",
    "batch_pairs",
    "seed",
    "radial_init",
    "curvature_loss",
    "normalize_forman",
];

fn bad(key: &str, value: &str) -> Error {
    Error::parse(0, format!("invalid value {value:?} for {key}"))
}

fn real(key: &str, value: &str) -> Result<f64> {
    value.parse::<f64>().map_err(|_| bad(key, value))
}

impl TrainConfig {
    /// Parses flat `key = value` lines on top of the defaults. Blank lines
    /// and lines starting with `#` are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::parse(idx + 1, format!("expected key=value, got {line:?}"))
            })?;
            cfg.set(k.trim(), v.trim()).map_err(|e| match e {
                Error::Parse { msg, .. } => Error::parse(idx + 1, msg),
                other => other,
            })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sets one key from its textual value. Does not validate ranges.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "tau" => self.tau = real(key, value)?,
            "epsilon" => self.epsilon = real(key, value)?,
            "gamma" => self.gamma = real(key, value)?,
            "ell_plus" => self.ell_plus = real(key, value)?,
            "delta" => self.delta = real(key, value)?,
            "lambda_rot" => self.lambda_rot = real(key, value)?,
            "learning_rate" => self.learning_rate = real(key, value)?,
            "epochs" => self.epochs = value.parse().map_err(|_| bad(key, value))?,
            "batch_pairs" => {
                self.batch_pairs = if value == "all" {
                    BatchPairs::All
                } else {
                    BatchPairs::Count(value.parse().map_err(|_| bad(key, value))?)
                }
            }
            "seed" => self.seed = value.parse().map_err(|_| bad(key, value))?,
            "radial_init" => {
                let (lo, hi) = value.split_once(',').ok_or_else(|| bad(key, value))?;
                self.radial_init = (real(key, lo.trim())?, real(key, hi.trim())?);
            }
            "curvature_loss" => {
                self.curvature_loss = match value {
                    "normalized" => CurvatureLoss::Normalized,
                    "raw" => CurvatureLoss::Raw,
                    _ => return Err(bad(key, value)),
                }
            }
            "normalize_forman" => {
                self.normalize_forman = value.parse().map_err(|_| bad(key, value))?
            }
            _ => return Err(Error::parse(0, format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("epsilon", self.epsilon),
            ("gamma", self.gamma),
            ("ell_plus", self.ell_plus),
            ("delta", self.delta),
            ("lambda_rot", self.lambda_rot),
            ("learning_rate", self.learning_rate),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.tau >= 0.0) || !self.tau.is_finite() {
            return Err(Error::Domain(format!(
                "tau must be nonnegative, got {}",
                self.tau
            )));
        }
        if self.epochs == 0 {
            return Err(Error::Domain("epochs must be at least 1".into()));
        }
        if self.batch_pairs == BatchPairs::Count(0) {
            return Err(Error::Domain("batch_pairs must be positive".into()));
        }
        let (lo, hi) = self.radial_init;
        if !(0.0 <= lo && lo < hi) || !hi.is_finite() {
            return Err(Error::Domain(format!(
                "radial_init must satisfy 0 <= lo < hi, got ({lo}, {hi})"
            )));
        }
        Ok(())
    }

    /// Canonical `key = value` rendering; parsing it gives back `self`.
    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        let batch = match self.batch_pairs {
            BatchPairs::All => "all".to_string(),
            BatchPairs::Count(k) => k.to_string(),
        };
        let loss = match self.curvature_loss {
            CurvatureLoss::Normalized => "normalized",
            CurvatureLoss::Raw => "raw",
        };
        let _ = writeln!(s, "tau = {:?}", self.tau);
        let _ = writeln!(s, "epsilon = {:?}", self.epsilon);
        let _ = writeln!(s, "gamma = {:?}", self.gamma);
        let _ = writeln!(s, "ell_plus = {:?}", self.ell_plus);
        let _ = writeln!(s, "delta = {:?}", self.delta);
        let _ = writeln!(s, "lambda_rot = {:?}", self.lambda_rot);
        let _ = writeln!(s, "learning_rate = {:?}", self.learning_rate);
        let _ = writeln!(s, "epochs = {}", self.epochs);
        let _ = writeln!(s, "batch_pairs = {batch}");
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(
            s,
            "radial_init = {:?},{:?}",
            self.radial_init.0, self.radial_init.1
        );
        let _ = writeln!(s, "curvature_loss = {loss}");
        let _ = writeln!(s, "normalize_forman = {}", self.normalize_forman);
        s
    }

    /// SHA-256 of [`Self::to_kv`], lowercase hex.
    pub fn digest(&self) -> String {
        let hash = Sha256::digest(self.to_kv().as_bytes());
        hash.iter().fold(String::with_capacity(64), |mut acc, b| {
            let _ = write!(acc, "{b:02x}");
            acc
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = TrainConfig::default();
        assert_eq!(TrainConfig::parse(&cfg.to_kv()).unwrap(), cfg);
        assert_eq!(cfg.digest().len(), 64);
    }

    #[test]
    fn parses_overrides() {
        let cfg = TrainConfig::parse(
            "# comment\ntau = 0\nbatch_pairs=128\nradial_init = 0.2, 0.5\ncurvature_loss = raw\nseed=7\n",
        )
        .unwrap();
        assert_eq!(cfg.tau, 0.0);
        assert_eq!(cfg.batch_pairs, BatchPairs::Count(128));
        assert_eq!(cfg.radial_init, (0.2, 0.5));
        assert_eq!(cfg.curvature_loss, CurvatureLoss::Raw);
        assert_eq!(cfg.seed, 7);
        assert_ne!(cfg.digest(), TrainConfig::default().digest());
    }

    #[test]
    fn reports_line_numbers() {
        match TrainConfig::parse("tau = 1\nepochs = many\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(TrainConfig::parse("bogus = 1").is_err());
        assert!(TrainConfig::parse("no equals sign").is_err());
    }

    #[test]
    fn validates_ranges() {
        assert!(TrainConfig::parse("epochs = 0").is_err());
        assert!(TrainConfig::parse("epsilon = 0").is_err());
        assert!(TrainConfig::parse("tau = -1").is_err());
        assert!(TrainConfig::parse("radial_init = 1, 0.5").is_err());
    }
}
