//! Sweep files: one `key = values` line per axis, where `values` is a
//! comma list (`1, 2.5, 4`) or an inclusive range `start:stop:count`.
//! Points are the Cartesian product, last axis varying fastest.

use serde::ser::{Serialize, SerializeMap, Serializer};
use thiserror::Error;

use crate::config::{parse_config, ConfigError, RunConfig, KEYS};

/// Upper bound on the number of points a sweep file may expand to.
pub const MAX_POINTS: usize = 1_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum SweepError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("axis '{key}': {reason}")]
    BadAxis { key: String, reason: String },

    #[error("sweep expands to more than {MAX_POINTS} points")]
    TooManyPoints,

    #[error("sweep file defines no axes")]
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub key: String,
    pub values: Vec<String>,
}

fn bad(key: &str, reason: impl ToString) -> SweepError {
    SweepError::BadAxis {
        key: key.to_owned(),
        reason: reason.to_string(),
    }
}

fn expand_range(key: &str, spec: &str) -> Result<Vec<String>, SweepError> {
    let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
    let [start, stop, count] = parts[..] else {
        return Err(bad(key, "range must be start:stop:count"));
    };
    let start: f64 = start.parse().map_err(|e| bad(key, format!("start: {e}")))?;
    let stop: f64 = stop.parse().map_err(|e| bad(key, format!("stop: {e}")))?;
    let count: usize = count.parse().map_err(|e| bad(key, format!("count: {e}")))?;
    if !(start.is_finite() && stop.is_finite()) {
        return Err(bad(key, "range bounds must be finite"));
    }
    if count == 0 || count > MAX_POINTS {
        return Err(bad(
            key,
            format!("count must be between 1 and {MAX_POINTS}"),
        ));
    }
    if count == 1 {
        return Ok(vec![start.to_string()]);
    }
    let step = (stop - start) / (count - 1) as f64;
    Ok((0..count)
        .map(|i| {
            if i == count - 1 {
                stop
            } else {
                start + step * i as f64
            }
        })
        .map(|v| v.to_string())
        .collect())
}

/// Parses a sweep file into its axes, in file order.
pub fn parse_sweep(text: &str) -> Result<Vec<Axis>, SweepError> {
    let pairs = parse_config(text)?;
    if pairs.is_empty() {
        return Err(SweepError::Empty);
    }
    let mut axes = Vec::with_capacity(pairs.len());
    let mut total: usize = 1;
    for (key, spec) in pairs {
        if !KEYS.contains(&key.as_str()) || matches!(key.as_str(), "output" | "csv") {
            return Err(ConfigError::UnknownKey(key).into());
        }
        // interval values use ':' themselves, so they are only ever listed
        let values = if key != "interval" && spec.contains(':') {
            expand_range(&key, &spec)?
        } else {
            let v: Vec<String> = spec.split(',').map(|s| s.trim().to_owned()).collect();
            if v.iter().any(String::is_empty) {
                return Err(bad(&key, "empty list entry"));
            }
            v
        };
        total = total
            .checked_mul(values.len())
            .filter(|t| *t <= MAX_POINTS)
            .ok_or(SweepError::TooManyPoints)?;
        axes.push(Axis { key, values });
    }
    Ok(axes)
}

/// Number of points in the product of `axes`.
pub fn point_count(axes: &[Axis]) -> usize {
    axes.iter().map(|a| a.values.len()).product()
}

/// One sweep point: the swept `(key, value)` settings in axis order.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(pub Vec<(String, String)>);

impl Point {
    pub fn config(&self, base: &RunConfig) -> Result<RunConfig, ConfigError> {
        let mut c = base.clone();
        c.apply_all(&self.0)?;
        Ok(c)
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            match v.parse::<f64>() {
                Ok(x) if x.is_finite() => m.serialize_entry(k, &x)?,
                _ => m.serialize_entry(k, v)?,
            }
        }
        m.end()
    }
}

/// The `i`-th point of the product (row-major, last axis fastest).
pub fn point(axes: &[Axis], mut i: usize) -> Point {
    let mut settings = vec![(String::new(), String::new()); axes.len()];
    for (slot, axis) in settings.iter_mut().zip(axes).rev() {
        let n = axis.values.len();
        *slot = (axis.key.clone(), axis.values[i % n].clone());
        i /= n;
    }
    Point(settings)
}

pub fn points(axes: &[Axis]) -> Vec<Point> {
    (0..point_count(axes)).map(|i| point(axes, i)).collect()
}
