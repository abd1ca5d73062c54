//! CSV and JSON writers plus the matching readers used for round trips.
//!
//! CSV files start with one `# manifest: {json}` line, then a header row.
//! Floats are written with 17 significant digits.

use std::io::{BufRead, BufReader, Read};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::manifest::RunManifest;

pub const MANIFEST_PREFIX: &str = "# manifest: ";

/// 17 significant digits, scientific notation.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// A CSV table: header plus string cells already formatted.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

pub fn write_csv(manifest: &RunManifest, table: &Table) -> Result<Vec<u8>, String> {
    let mut buf = Vec::new();
    let json = serde_json::to_string(manifest).map_err(|e| e.to_string())?;
    buf.extend_from_slice(MANIFEST_PREFIX.as_bytes());
    buf.extend_from_slice(json.as_bytes());
    buf.push(b'\n');
    let mut w = csv::Writer::from_writer(buf);
    w.write_record(&table.header).map_err(|e| e.to_string())?;
    for row in &table.rows {
        w.write_record(row).map_err(|e| e.to_string())?;
    }
    w.into_inner().map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    manifest: &'a RunManifest,
    results: &'a T,
}

pub fn write_json<T: Serialize>(manifest: &RunManifest, results: &T) -> Result<Vec<u8>, String> {
    let mut buf = serde_json::to_vec_pretty(&Envelope { manifest, results }).map_err(|e| e.to_string())?;
    buf.push(b'\n');
    Ok(buf)
}

/// Parsed JSON output file.
#[derive(Debug, serde::Deserialize)]
pub struct JsonDocument<T> {
    pub manifest: RunManifest,
    pub results: T,
}

pub fn read_json<T: DeserializeOwned>(bytes: &[u8]) -> Result<JsonDocument<T>, String> {
    serde_json::from_slice(bytes).map_err(|e| e.to_string())
}

/// Parses a CSV output file into its manifest and typed rows.
pub fn read_csv<T: DeserializeOwned, R: Read>(reader: R) -> Result<(RunManifest, Vec<T>), String> {
    let mut reader = BufReader::new(reader);
    let mut first = String::new();
    reader.read_line(&mut first).map_err(|e| e.to_string())?;
    let json = first
        .trim_end()
        .strip_prefix(MANIFEST_PREFIX)
        .ok_or_else(|| "missing manifest line".to_string())?;
    let manifest: RunManifest = serde_json::from_str(json).map_err(|e| e.to_string())?;
    let mut rdr = csv::Reader::from_reader(reader);
    let rows = rdr
        .deserialize()
        .collect::<Result<Vec<T>, _>>()
        .map_err(|e| e.to_string())?;
    Ok((manifest, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0, f64::MIN_POSITIVE] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);
        }
        assert_eq!(fmt_opt(None), "");
    }
}
