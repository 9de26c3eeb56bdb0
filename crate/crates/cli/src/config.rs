//! Run configuration and the flat `key=value` config-file format.

use std::path::PathBuf;

use ptnlse_core::Family;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected key=value")]
    MissingEquals { line: usize },

    #[error("line {line}: empty key")]
    EmptyKey { line: usize },

    #[error("line {line}: duplicate key '{key}'")]
    DuplicateKey { line: usize, key: String },

    #[error("unknown key '{0}'")]
    UnknownKey(String),

    #[error("invalid value '{value}' for {key}: {reason}")]
    InvalidValue {
        key: String,
        value: String,
        reason: String,
    },

    #[error("missing required setting: {0}")]
    Missing(&'static str),
}

/// Keys accepted by config files, sweep files and (as `--key`) the command line.
pub const KEYS: [&str; 15] = [
    "family",
    "A",
    "B",
    "alpha",
    "g",
    "mu",
    "half_width",
    "n_points",
    "interval",
    "dt",
    "t_final",
    "stride",
    "quadrant",
    "output",
    "csv",
];

/// Splits config text into `(key, value)` pairs in file order. `#` starts a
/// comment; blank lines are skipped; keys and values are trimmed.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out: Vec<(String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or(ConfigError::MissingEquals { line })?;
        let key = key.trim();
        if key.is_empty() {
            return Err(ConfigError::EmptyKey { line });
        }
        if out.iter().any(|(k, _)| k == key) {
            return Err(ConfigError::DuplicateKey {
                line,
                key: key.to_owned(),
            });
        }
        out.push((key.to_owned(), value.trim().to_owned()));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub family: Option<Family>,
    /// Well depth; `None` selects the family reference value.
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub alpha: f64,
    pub g: f64,
    pub mu: f64,
    pub half_width: Option<f64>,
    pub n_points: Option<usize>,
    pub interval: Option<(f64, f64)>,
    pub dt: f64,
    pub t_final: f64,
    pub stride: usize,
    pub quadrant: ptnlse_core::Quadrant,
    pub output: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            family: None,
            a: None,
            b: None,
            alpha: 1.0,
            g: 1.0,
            mu: 0.0,
            half_width: None,
            n_points: None,
            interval: None,
            dt: 1e-3,
            t_final: 10.0,
            stride: 100,
            quadrant: ptnlse_core::Quadrant::RealPositive,
            output: None,
            csv: None,
        }
    }
}

fn invalid(key: &str, value: &str, reason: impl ToString) -> ConfigError {
    ConfigError::InvalidValue {
        key: key.to_owned(),
        value: value.to_owned(),
        reason: reason.to_string(),
    }
}

fn real(key: &str, value: &str) -> Result<f64, ConfigError> {
    let v: f64 = value.parse().map_err(|e| invalid(key, value, e))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(key, value, "not finite"))
    }
}

fn positive(key: &str, value: &str) -> Result<f64, ConfigError> {
    let v = real(key, value)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(invalid(key, value, "must be positive"))
    }
}

/// `lo:hi` or `lo,hi`.
pub fn parse_interval(value: &str) -> Result<(f64, f64), ConfigError> {
    let (lo, hi) = value
        .split_once(':')
        .or_else(|| value.split_once(','))
        .ok_or_else(|| invalid("interval", value, "expected lo:hi"))?;
    let lo = real("interval", lo.trim())?;
    let hi = real("interval", hi.trim())?;
    if lo < hi {
        Ok((lo, hi))
    } else {
        Err(invalid(
            "interval",
            value,
            "lower bound must be below upper bound",
        ))
    }
}

pub fn parse_family(value: &str) -> Result<Family, ConfigError> {
    value
        .trim()
        .parse()
        .map_err(|e| invalid("family", value, e))
}

pub fn parse_quadrant(value: &str) -> Result<ptnlse_core::Quadrant, ConfigError> {
    use ptnlse_core::Quadrant::*;
    match value.trim() {
        "real+" | "+1" => Ok(RealPositive),
        "real-" | "-1" => Ok(RealNegative),
        "imag+" | "+i" => Ok(ImagPositive),
        "imag-" | "-i" => Ok(ImagNegative),
        _ => Err(invalid(
            "quadrant",
            value,
            "expected real+, real-, imag+ or imag-",
        )),
    }
}

impl RunConfig {
    /// Sets one key from its textual value.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "family" => self.family = Some(parse_family(value)?),
            "A" => self.a = Some(real(key, value)?),
            "B" => self.b = Some(real(key, value)?),
            "alpha" => self.alpha = positive(key, value)?,
            "g" => self.g = real(key, value)?,
            "mu" => self.mu = real(key, value)?,
            "half_width" => self.half_width = Some(positive(key, value)?),
            "n_points" => self.n_points = Some(value.parse().map_err(|e| invalid(key, value, e))?),
            "interval" => self.interval = Some(parse_interval(value)?),
            "dt" => self.dt = positive(key, value)?,
            "t_final" => self.t_final = positive(key, value)?,
            "stride" => {
                let s: usize = value.parse().map_err(|e| invalid(key, value, e))?;
                if s == 0 {
                    return Err(invalid(key, value, "must be at least 1"));
                }
                self.stride = s;
            }
            "quadrant" => self.quadrant = parse_quadrant(value)?,
            "output" => self.output = Some(PathBuf::from(value)),
            "csv" => self.csv = Some(PathBuf::from(value)),
            _ => return Err(ConfigError::UnknownKey(key.to_owned())),
        }
        Ok(())
    }

    pub fn apply_all(&mut self, pairs: &[(String, String)]) -> Result<(), ConfigError> {
        pairs.iter().try_for_each(|(k, v)| self.apply(k, v))
    }

    pub fn family(&self) -> Result<Family, ConfigError> {
        self.family.ok_or(ConfigError::Missing("family"))
    }

    /// `(A, B)` with family reference values filling unset entries:
    /// `(1, 1)` for the phase-locked family, `(4, 3)` otherwise.
    pub fn depth_and_gain(&self) -> Result<(f64, f64), ConfigError> {
        let (a0, b0) = if self.family()? == Family::PhaseLocked {
            (1.0, 1.0)
        } else {
            (4.0, 3.0)
        };
        Ok((self.a.unwrap_or(a0), self.b.unwrap_or(b0)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn comments_and_blanks() {
        let text = "# header\nfamily = scarf2-hyp  # trailing\n\n  A=4\nB = 3\n";
        let pairs = parse_config(text).unwrap();
        assert_eq!(
            pairs,
            vec![
                ("family".to_string(), "scarf2-hyp".to_string()),
                ("A".to_string(), "4".to_string()),
                ("B".to_string(), "3".to_string())
            ]
        );
    }

    #[test]
    fn malformed_lines() {
        assert_eq!(
            parse_config("A 4"),
            Err(ConfigError::MissingEquals { line: 1 })
        );
        assert_eq!(parse_config("\n=4"), Err(ConfigError::EmptyKey { line: 2 }));
        assert!(matches!(
            parse_config("A=1\nA=2"),
            Err(ConfigError::DuplicateKey { line: 2, .. })
        ));
    }

    #[test]
    fn apply_values() {
        let mut c = RunConfig::default();
        c.apply_all(&parse_config("family=rm-hyp\nalpha=2\ninterval=-1:2\nn_points=512").unwrap())
            .unwrap();
        assert_eq!(c.family, Some(Family::RmHyp));
        assert_eq!(c.alpha, 2.0);
        assert_eq!(c.interval, Some((-1.0, 2.0)));
        assert_eq!(c.n_points, Some(512));
        assert_eq!(c.depth_and_gain().unwrap(), (4.0, 3.0));
        assert!(matches!(
            c.apply("dt", "0"),
            Err(ConfigError::InvalidValue { .. })
        ));
        assert!(matches!(
            c.apply("alpha", "nan"),
            Err(ConfigError::InvalidValue { .. })
        ));
        assert!(matches!(
            c.apply("interval", "2:1"),
            Err(ConfigError::InvalidValue { .. })
        ));
        assert_eq!(
            c.apply("nosuch", "1"),
            Err(ConfigError::UnknownKey("nosuch".into()))
        );
    }

    #[test]
    fn phase_locked_reference() {
        let mut c = RunConfig::default();
        c.apply("family", "phase-locked").unwrap();
        assert_eq!(c.depth_and_gain().unwrap(), (1.0, 1.0));
        assert_eq!(
            RunConfig::default().depth_and_gain(),
            Err(ConfigError::Missing("family"))
        );
    }

    #[test]
    fn every_key_is_accepted() {
        let sample = |k: &str| match k {
            "family" => "csc-cot",
            "interval" => "0.1:3",
            "quadrant" => "imag-",
            "n_points" | "stride" => "64",
            "output" | "csv" => "out.txt",
            _ => "0.5",
        };
        for k in KEYS {
            RunConfig::default().apply(k, sample(k)).unwrap();
        }
    }

    proptest! {
        #[test]
        fn parser_never_panics(s in "\\PC*") {
            let _ = parse_config(&s);
        }

        #[test]
        fn rendered_pairs_round_trip(
            pairs in proptest::collection::btree_map("[a-z_]{1,8}", "[a-z0-9.:-]{0,10}", 0..6)
        ) {
            let text: String = pairs.iter().map(|(k, v)| format!("{k} = {v} # note\n")).collect();
            let parsed = parse_config(&text).unwrap();
            let expected: Vec<(String, String)> = pairs.into_iter().collect();
            prop_assert_eq!(parsed, expected);
        }
    }
}
