//! Deterministic report emission: JSON with 17 significant digits and CSV dumps.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{CompactFormatter, Formatter};

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::propagate::EvolutionResult;

/// Compact JSON formatter writing every float as `d.ddddddddddddddddde±x`.
/// Non-finite floats become `null` (serde_json handles that before us).
#[derive(Debug, Clone, Copy, Default)]
pub struct FixedPrecision;

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

impl Formatter for FixedPrecision {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        CompactFormatter.begin_array(w)
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedPrecision);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::InvalidParameter(format!("serialization failed: {e}")))?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

fn csv_num(v: f64) -> String {
    if v.is_finite() {
        fmt_f64(v)
    } else {
        "nan".to_string()
    }
}

/// Columns `x, re_psi, im_psi, re_V, im_V, re_residual, im_residual`;
/// masked samples are written as `nan`.
pub fn write_field_csv<W: Write>(
    mut w: W,
    psi: &ComplexField,
    potential: &ComplexField,
    residual: &ComplexField,
) -> Result<()> {
    if psi.grid() != potential.grid() || psi.grid() != residual.grid() {
        return Err(Error::GridMismatch);
    }
    let io = |e: io::Error| Error::InvalidParameter(format!("write failed: {e}"));
    writeln!(w, "x,re_psi,im_psi,re_V,im_V,re_residual,im_residual").map_err(io)?;
    let pick = |f: &ComplexField, j: usize| {
        if f.is_valid(j) {
            (f.values()[j].re, f.values()[j].im)
        } else {
            (f64::NAN, f64::NAN)
        }
    };
    for j in 0..psi.grid().len() {
        let (pr, pi) = pick(psi, j);
        let (vr, vi) = pick(potential, j);
        let (rr, ri) = pick(residual, j);
        let row = [psi.grid().x(j), pr, pi, vr, vi, rr, ri]
            .map(csv_num)
            .join(",");
        writeln!(w, "{row}").map_err(io)?;
    }
    Ok(())
}

/// Columns `t, norm, fidelity, energy`.
pub fn write_evolution_csv<W: Write>(mut w: W, result: &EvolutionResult) -> Result<()> {
    let io = |e: io::Error| Error::InvalidParameter(format!("write failed: {e}"));
    writeln!(w, "t,norm,fidelity,energy").map_err(io)?;
    for i in 0..result.len() {
        let row = [
            result.times[i],
            result.norm_series[i],
            result.fidelity_series[i],
            result.energy_series[i],
        ]
        .map(csv_num)
        .join(",");
        writeln!(w, "{row}").map_err(io)?;
    }
    Ok(())
}
