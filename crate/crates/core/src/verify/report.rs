use std::io::Write;
use std::path::{Path, PathBuf};

use super::experiment::RateReport;
use crate::error::{Error, Result};

pub const CSV_COLUMNS: [&str; 13] = [
    "scale_param",
    "t",
    "method",
    "theta",
    "p_hat",
    "std_error",
    "samples",
    "speed",
    "empirical_rate",
    "theoretical_rate",
    "relative_error",
    "status",
    "message",
];

/// 17 significant digits, `.` decimal separator.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

/// Writes the report rows as CSV.
pub fn write_rows<W: Write>(report: &RateReport, out: W) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in &report.rows {
        w.write_record([
            format_float(r.scale_param),
            format_float(r.t),
            r.method.clone(),
            format_float(r.theta),
            opt(r.p_hat),
            opt(r.std_error),
            r.samples.to_string(),
            format_float(r.speed),
            opt(r.empirical_rate),
            opt(r.theoretical_rate),
            opt(r.relative_error),
            r.status.name().to_string(),
            r.message.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Path of the JSON metadata written next to a CSV report.
pub fn metadata_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

/// Writes rows to `csv_path` and metadata to the `.json` sidecar.
pub fn write_report(report: &RateReport, csv_path: &Path) -> Result<()> {
    let file = std::fs::File::create(csv_path).map_err(|e| Error::io(csv_path, e))?;
    write_rows(report, std::io::BufWriter::new(file)).map_err(|e| Error::io(csv_path, e))?;
    let meta = metadata_path(csv_path);
    let json = serde_json::to_string_pretty(&report.metadata).expect("metadata serializes");
    std::fs::write(&meta, json + "\n").map_err(|e| Error::io(&meta, e))
}

/// `t,rate` table.
pub fn write_rate_table<W: Write>(rows: &[(f64, f64)], out: W) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "rate"])?;
    for &(t, rate) in rows {
        w.write_record([format_float(t), format_float(rate)])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_is_fixed() {
        assert_eq!(format_float(1.0), "1.0000000000000000e0");
        assert_eq!(format_float(std::f64::consts::SQRT_2), "1.4142135623730951e0");
        assert_eq!(format_float(-0.25), "-2.5000000000000000e-1");
        assert_eq!(format_float(f64::NAN), "NaN");
        let x = 0.1 + 0.2;
        assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn rate_table_layout() {
        let mut buf = Vec::new();
        write_rate_table(&[(1.0, 0.5)], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "t,rate\n1.0000000000000000e0,5.0000000000000000e-1\n");
    }
}
