//! CSV and key-value writers for spectra, profiles and curves.
//!
//! Every CSV starts with a `# schema=1` comment line followed by a header.
//! Floats are printed with Rust's shortest round-trip formatting, so equal
//! inputs give byte-identical files.

use std::io::{BufRead, Write};

use num_complex::Complex64;

use crate::analytic::RadialProfile;
use crate::error::{argument, Result};
use crate::stats::{CorrelationCurve, Provenance, Spectrum};

pub const SCHEMA_LINE: &str = "# schema=1";

fn sweep_of(s: &Spectrum) -> u64 {
    match s.provenance {
        Provenance::McSampled { sweep, .. } => sweep,
        Provenance::QmapDiagonalized { member, .. } => member,
        Provenance::Synthetic { .. } => 0,
    }
}

/// One row per eigenvalue: `config_id,sweep,re,im`.
pub fn write_spectra_csv(mut w: impl Write, spectra: &[Spectrum]) -> Result<()> {
    writeln!(w, "{SCHEMA_LINE}")?;
    writeln!(w, "config_id,sweep,re,im")?;
    for (id, s) in spectra.iter().enumerate() {
        let sweep = sweep_of(s);
        for z in &s.eigenvalues {
            writeln!(w, "{id},{sweep},{},{}", z.re, z.im)?;
        }
    }
    Ok(())
}

/// Reads the output of [`write_spectra_csv`] back as eigenvalue lists in
/// `config_id` order.
pub fn read_spectra_csv(r: impl BufRead) -> Result<Vec<Vec<Complex64>>> {
    let mut out: Vec<Vec<Complex64>> = Vec::new();
    let mut header_seen = false;
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !header_seen {
            if line != "config_id,sweep,re,im" {
                return Err(argument(format!("line {}: unexpected header {line:?}", lineno + 1)));
            }
            header_seen = true;
            continue;
        }
        let bad = || argument(format!("line {}: malformed row {line:?}", lineno + 1));
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(bad());
        }
        let id: usize = fields[0].parse().map_err(|_| bad())?;
        let re: f64 = fields[2].parse().map_err(|_| bad())?;
        let im: f64 = fields[3].parse().map_err(|_| bad())?;
        if id >= out.len() {
            out.resize_with(id + 1, Vec::new);
        }
        out[id].push(Complex64::new(re, im));
    }
    Ok(out)
}

/// `key = value` lines in the given order.
pub fn write_metadata(mut w: impl Write, entries: &[(String, String)]) -> Result<()> {
    for (k, v) in entries {
        if k.contains('=') || k.contains('\n') || v.contains('\n') {
            return Err(argument(format!("metadata entry {k:?} cannot be written on one line")));
        }
        writeln!(w, "{k} = {v}")?;
    }
    Ok(())
}

/// Radial density as `r,R1`.
pub fn write_profile_csv(mut w: impl Write, profile: &RadialProfile) -> Result<()> {
    writeln!(w, "{SCHEMA_LINE}")?;
    writeln!(w, "r,R1")?;
    for (r, d) in profile.radii.iter().zip(&profile.density) {
        writeln!(w, "{r},{d}")?;
    }
    Ok(())
}

/// Wall point masses as `radius,mass`.
pub fn write_point_masses_csv(mut w: impl Write, profile: &RadialProfile) -> Result<()> {
    writeln!(w, "{SCHEMA_LINE}")?;
    writeln!(w, "radius,mass")?;
    for m in &profile.point_masses {
        writeln!(w, "{},{}", m.radius, m.mass)?;
    }
    Ok(())
}

/// Histogram curve as `s_left,s_right,value,count`.
pub fn write_curve_csv(mut w: impl Write, curve: &CorrelationCurve) -> Result<()> {
    writeln!(w, "{SCHEMA_LINE}")?;
    writeln!(w, "s_left,s_right,value,count")?;
    for (i, (v, c)) in curve.values.iter().zip(&curve.counts).enumerate() {
        writeln!(w, "{},{},{v},{c}", curve.edges[i], curve.edges[i + 1])?;
    }
    Ok(())
}

/// Sampled analytic curve as two named columns.
pub fn write_series_csv(mut w: impl Write, columns: (&str, &str), points: &[(f64, f64)]) -> Result<()> {
    writeln!(w, "{SCHEMA_LINE}")?;
    writeln!(w, "{},{}", columns.0, columns.1)?;
    for (x, y) in points {
        writeln!(w, "{x},{y}")?;
    }
    Ok(())
}
