//! CSV readers and writers for profiles, fields and decompositions.
//!
//! Floats are written with Rust's shortest round-trip representation so that
//! every file parses back to the same bits.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::projections::WienerDecomposition;
use crate::spectral::{SpaceField, SpectralProfile, DEFAULT_ZERO_EXCLUSION};

/// Relative tolerance on the frequency spacing accepted by [`read_profile`].
pub const SPACING_TOLERANCE: f64 = 1e-9;

#[inline]
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

fn parse_f64(field: Option<&str>, line: usize, name: &str) -> Result<f64> {
    let raw = field.ok_or_else(|| Error::Csv { line, msg: format!("missing column `{name}`") })?;
    raw.trim().parse::<f64>().map_err(|_| Error::Csv {
        line,
        msg: format!("cannot parse `{raw}` as a number in column `{name}`"),
    })
}

fn rows(reader: impl Read, header: &[&str]) -> Result<Vec<(usize, Vec<f64>)>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let head = rdr.headers().map_err(|e| Error::Csv { line: 1, msg: e.to_string() })?;
    let got: Vec<&str> = head.iter().collect();
    if got.len() < header.len() || got[..header.len()] != *header {
        return Err(Error::Csv {
            line: 1,
            msg: format!("expected header `{}`, got `{}`", header.join(","), got.join(",")),
        });
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Csv {
            line: e.position().map_or(0, |p| p.line() as usize),
            msg: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let vals = header
            .iter()
            .enumerate()
            .map(|(i, name)| parse_f64(rec.get(i), line, name))
            .collect::<Result<Vec<_>>>()?;
        out.push((line, vals));
    }
    Ok(out)
}

/// Parses `xi,re,im` data with the default zero-exclusion radius.
pub fn parse_profile(reader: impl Read) -> Result<SpectralProfile> {
    parse_profile_with_exclusion(reader, DEFAULT_ZERO_EXCLUSION)
}

pub fn parse_profile_with_exclusion(reader: impl Read, zero_exclusion: f64) -> Result<SpectralProfile> {
    let rows = rows(reader, &["xi", "re", "im"])?;
    if rows.len() < 2 {
        return Err(Error::Csv { line: 1, msg: "profile needs at least two rows".into() });
    }
    let xi0 = rows[0].1[0];
    let step = (rows[rows.len() - 1].1[0] - xi0) / (rows.len() - 1) as f64;
    if !(step > 0.0) {
        return Err(Error::Csv { line: rows[1].0, msg: "xi must be strictly increasing".into() });
    }
    let mut amps = Vec::with_capacity(rows.len());
    for (j, (line, v)) in rows.iter().enumerate() {
        if j > 0 {
            let d = v[0] - rows[j - 1].1[0];
            if (d - step).abs() > SPACING_TOLERANCE * step {
                return Err(Error::Csv {
                    line: *line,
                    msg: format!("non-uniform xi spacing {d} (expected {step})"),
                });
            }
        }
        amps.push(Complex64::new(v[1], v[2]));
    }
    SpectralProfile::with_zero_exclusion(xi0, step, amps, zero_exclusion)
}

pub fn read_profile(path: &Path) -> Result<SpectralProfile> {
    parse_profile(File::open(path)?)
}

pub fn write_profile_to(p: &SpectralProfile, mut w: impl Write) -> Result<()> {
    writeln!(w, "xi,re,im")?;
    for (j, a) in p.amplitudes().iter().enumerate() {
        writeln!(w, "{},{},{}", fmt_f64(p.xi(j)), fmt_f64(a.re), fmt_f64(a.im))?;
    }
    Ok(())
}

pub fn write_profile(p: &SpectralProfile, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_profile_to(p, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn write_field_to(u: &SpaceField, mut w: impl Write) -> Result<()> {
    writeln!(w, "x,re,im,abs")?;
    for (j, v) in u.values().iter().enumerate() {
        writeln!(
            w,
            "{},{},{},{}",
            fmt_f64(u.x(j)),
            fmt_f64(v.re),
            fmt_f64(v.im),
            fmt_f64(v.norm())
        )?;
    }
    Ok(())
}

pub fn write_field(u: &SpaceField, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_field_to(u, &mut w)?;
    w.flush()?;
    Ok(())
}

/// Reads `x,re,im,abs` back; the `abs` column is ignored.
pub fn parse_field(reader: impl Read) -> Result<SpaceField> {
    let rows = rows(reader, &["x", "re", "im"])?;
    if rows.is_empty() {
        return Err(Error::Csv { line: 1, msg: "field has no rows".into() });
    }
    let x0 = rows[0].1[0];
    let step = if rows.len() > 1 {
        (rows[rows.len() - 1].1[0] - x0) / (rows.len() - 1) as f64
    } else {
        1.0
    };
    SpaceField::new(x0, step, rows.iter().map(|(_, v)| Complex64::new(v[1], v[2])).collect())
}

/// Writes one profile CSV per window, named `<stem>_k<k>.csv` next to `base`.
pub fn write_decomposition(d: &WienerDecomposition, base: &Path) -> Result<Vec<PathBuf>> {
    let stem = base
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("decomposition")
        .to_owned();
    let dir = base.parent().unwrap_or(Path::new(""));
    let mut paths = Vec::new();
    for (k, piece) in d.iter() {
        let path = dir.join(format!("{stem}_k{k}.csv"));
        write_profile(piece, &path)?;
        paths.push(path);
    }
    Ok(paths)
}
