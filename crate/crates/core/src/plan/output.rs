use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use num_rational::BigRational;

use crate::topography::Classification;
use crate::weight::{ratio_string, ratio_to_f64};

/// A CSV table with a header row.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Table with columns `series, depth, rational, float`.
    pub fn series() -> Self {
        Self::new(&["series", "depth", "rational", "float"])
    }

    /// Appends `values[j]` as depth `j` of `name`.
    pub fn push_series(&mut self, name: &str, values: &[BigRational]) {
        for (j, v) in values.iter().enumerate() {
            self.rows.push(vec![name.to_string(), j.to_string(), ratio_string(v), float(v)]);
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> io::Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Shortest decimal that round-trips to the nearest double.
pub(crate) fn float(r: &BigRational) -> String {
    format!("{}", ratio_to_f64(r))
}

/// What a task produces: a JSON document, a CSV table and, for `classify`,
/// the summary row.
#[derive(Debug, Clone)]
pub struct TaskOutput {
    pub json: serde_json::Value,
    pub table: Table,
    pub classification: Option<Classification>,
}

impl TaskOutput {
    /// Writes `<prefix>.json` and `<prefix>.csv`; parent directories must exist.
    pub fn write(&self, prefix: &Path) -> io::Result<Vec<PathBuf>> {
        let json_path = with_suffix(prefix, "json");
        let csv_path = with_suffix(prefix, "csv");
        let mut text = serde_json::to_string_pretty(&self.json)?;
        text.push('\n');
        fs::write(&json_path, text).map_err(|e| annotate(e, &json_path))?;
        fs::write(&csv_path, self.table.to_csv()?).map_err(|e| annotate(e, &csv_path))?;
        Ok(vec![json_path, csv_path])
    }
}

fn with_suffix(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn annotate(e: io::Error, path: &Path) -> io::Error {
    io::Error::new(e.kind(), format!("{}: {e}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::{parse_ratio, ratio};
    use num_traits::Signed;

    #[test]
    fn floats_are_nearest_doubles() {
        let mut t = Table::series();
        let values: Vec<BigRational> = (1..40).map(|i| ratio(i * 7919 % 1000 + 1, i * 31 + 3)).collect();
        t.push_series("v", &values);
        for (row, v) in t.rows.iter().zip(&values) {
            assert_eq!(parse_ratio(&row[2]).unwrap(), *v);
            let f: f64 = row[3].parse().unwrap();
            // within one unit in the last place of the exact value
            let ulp = f64::from_bits(f.to_bits() + 1) - f;
            let exact = BigRational::from_float(f).unwrap();
            assert!((exact - v).abs() <= BigRational::from_float(ulp).unwrap());
        }
        let csv = t.to_csv().unwrap();
        assert!(csv.starts_with("series,depth,rational,float\n"));
    }
}
