//! CSV emission and ingestion.
//!
//! All numbers are written with 17 significant digits so that every file
//! round-trips through `f64` parsing bit-exactly.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use hmch::dynamics::DiagnosticsRecord;
use hmch::field::wavenumber;
use hmch::{PeriodicField, Spectrum};

/// Serialize with 17 significant digits (round-trip safe for `f64`).
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Field dump: header `x,u`, one row per grid point.
pub fn write_field_csv(path: &Path, u: &PeriodicField) -> io::Result<()> {
    let mut out = String::from("x,u\n");
    for (i, &v) in u.samples().iter().enumerate() {
        let _ = writeln!(out, "{},{}", fmt_f64(u.grid_point(i)), fmt_f64(v));
    }
    std::fs::write(path, out)
}

/// Spectrum dump: header `k,re,im`, rows in FFT storage order with signed `k`.
pub fn write_spectrum_csv(path: &Path, spec: &Spectrum) -> io::Result<()> {
    let n = spec.grid_size();
    let mut out = String::from("k,re,im\n");
    for (i, c) in spec.coeffs_fft_order().iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{}",
            wavenumber(i, n),
            fmt_f64(c.re),
            fmt_f64(c.im)
        );
    }
    std::fs::write(path, out)
}

/// Diagnostics dump: `t,mu,E1,sup_u,sup_ux,H4,dissipation`.
pub fn write_diagnostics_csv(path: &Path, records: &[DiagnosticsRecord]) -> io::Result<()> {
    let mut out = String::from("t,mu,E1,sup_u,sup_ux,H4,dissipation\n");
    for d in records {
        let h4 = d
            .hs_norms
            .iter()
            .find(|(s, _)| *s == 4.0)
            .map(|(_, v)| *v)
            .unwrap_or(f64::NAN);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt_f64(d.t),
            fmt_f64(d.mu),
            fmt_f64(d.e1),
            fmt_f64(d.sup_u),
            fmt_f64(d.sup_ux),
            fmt_f64(h4),
            fmt_f64(d.dissipation_accum)
        );
    }
    std::fs::write(path, out)
}

/// Snapshot file name for sample time `t`: `u_t<time with 6 decimals>.csv`.
pub fn snapshot_path(dir: &Path, t: f64) -> PathBuf {
    dir.join(format!("u_t{t:.6}.csv"))
}

/// Read a field dump produced by [`write_field_csv`] (or any `x,u` CSV).
pub fn read_field_csv(path: &Path) -> Result<PeriodicField, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == "x,u" => {}
        other => {
            return Err(format!(
                "{}: expected header `x,u`, got {:?}",
                path.display(),
                other.unwrap_or("")
            ))
        }
    }
    let mut samples = Vec::new();
    for (row, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (_, u) = line
            .split_once(',')
            .ok_or_else(|| format!("{}: row {}: expected `x,u`", path.display(), row + 1))?;
        let v: f64 = u
            .trim()
            .parse()
            .map_err(|_| format!("{}: row {}: bad number `{u}`", path.display(), row + 1))?;
        samples.push(v);
    }
    PeriodicField::new(samples).map_err(|e| format!("{}: {e}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_round_trips_bit_exactly() {
        let u = PeriodicField::from_fn(64, |x| (2.0 * std::f64::consts::PI * x).sin() / 3.0)
            .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u.csv");
        write_field_csv(&path, &u).unwrap();
        let back = read_field_csv(&path).unwrap();
        assert_eq!(u.samples(), back.samples());
    }

    #[test]
    fn snapshot_names_have_six_decimals() {
        let p = snapshot_path(Path::new("out"), 0.25);
        assert_eq!(p.file_name().unwrap(), "u_t0.250000.csv");
    }

    #[test]
    fn malformed_input_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "x,u\n0.0,abc\n").unwrap();
        assert!(read_field_csv(&path).unwrap_err().contains("bad number"));
        std::fs::write(&path, "wrong,header\n").unwrap();
        assert!(read_field_csv(&path).unwrap_err().contains("header"));
    }
}
