//! Delimited spoken-letter feature tables: 617 reals then a label per row.
//!
//! Labels may be letters or the 1-based numeric codes (`1` or `1.` for `A`)
//! used by the original distribution. A first row with no numeric field is a header.

use std::path::Path;

use super::{read_file, DatasetBundle, SourceFile};
use crate::encoders::Features;
use crate::error::{Error, Result};

pub const ISOLET_FEATURES: usize = 617;

fn label_name(raw: &str) -> Option<String> {
    if let Ok(code) = raw.parse::<f64>() {
        let c = code.round();
        if (c - code).abs() < 1e-9 && (1.0..=26.0).contains(&c) {
            return Some(char::from(b'A' + c as u8 - 1).to_string());
        }
        return None;
    }
    (!raw.is_empty()).then(|| raw.to_uppercase())
}

pub fn ingest_isolet(path: &Path) -> Result<DatasetBundle> {
    let raw = read_file(path)?;
    let source = SourceFile::from_bytes(path, &raw);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(raw.as_slice());
    let row_error = |row: usize, message: String| Error::Row {
        path: path.to_path_buf(),
        row,
        message,
    };
    let mut features = Vec::new();
    let mut names = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| row_error(row, e.to_string()))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        if i == 0 && record.iter().all(|f| f.parse::<f64>().is_err()) {
            continue;
        }
        if record.len() != ISOLET_FEATURES + 1 {
            return Err(row_error(
                row,
                format!("expected {} columns, found {}", ISOLET_FEATURES + 1, record.len()),
            ));
        }
        let values = record
            .iter()
            .take(ISOLET_FEATURES)
            .enumerate()
            .map(|(j, f)| {
                f.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| row_error(row, format!("column {}: cannot parse {f:?}", j + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        let label = &record[ISOLET_FEATURES];
        names.push(label_name(label).ok_or_else(|| row_error(row, format!("bad label {label:?}")))?);
        features.push(Features::Real(values));
    }
    if features.is_empty() {
        return Err(Error::Format {
            path: path.to_path_buf(),
            message: "no data rows".into(),
        });
    }
    DatasetBundle::from_named("isolet", features, &names, vec![source])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(label: &str, cols: usize, v: f64) -> String {
        let mut s: Vec<String> = (0..cols).map(|j| format!("{}", v + j as f64 * 0.001)).collect();
        s.push(label.to_string());
        s.join(", ")
    }

    fn write(text: &str) -> (tempfile::TempDir, std::path::PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("isolet.data");
        std::fs::write(&p, text).unwrap();
        (dir, p)
    }

    #[test]
    fn accepts_numeric_and_letter_labels() {
        let text = [row("1.", 617, 0.1), row("26", 617, -0.2), row("c", 617, 0.0)].join("\n");
        let (_d, p) = write(&text);
        let b = ingest_isolet(&p).unwrap();
        assert_eq!(b.label_names, vec!["A", "C", "Z"]);
        assert_eq!(b.labels, vec![0, 2, 1]);
        match &b.features[1] {
            Features::Real(v) => assert_eq!(v.len(), 617),
            other => panic!("{other:?}"),
        }
        let (ood_free, ood) = b.split_holdout(&["Z".to_string()]).unwrap();
        assert_eq!(ood_free.label_names, vec!["A", "C"]);
        assert_eq!(ood.len(), 1);
    }

    #[test]
    fn header_row_is_skipped() {
        let mut header: Vec<String> = (0..617).map(|j| format!("f{j}")).collect();
        header.push("class".into());
        let text = format!("{}\n{}\n", header.join(","), row("B", 617, 1.0));
        let (_d, p) = write(&text);
        assert_eq!(ingest_isolet(&p).unwrap().len(), 1);
    }

    #[test]
    fn rejects_wrong_width_with_row_index() {
        let text = [row("A", 617, 0.1), row("B", 616, 0.1)].join("\n");
        let (_d, p) = write(&text);
        match ingest_isolet(&p) {
            Err(Error::Row { row, .. }) => assert_eq!(row, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_unparseable_values() {
        let mut bad = row("A", 617, 0.1);
        bad = bad.replacen("0.1,", "oops,", 1);
        let (_d, p) = write(&bad);
        let err = ingest_isolet(&p).unwrap_err().to_string();
        assert!(err.contains("row 1") && err.contains("oops"), "{err}");
        let (_d, p) = write(&row("99", 617, 0.1));
        assert!(ingest_isolet(&p).is_err());
    }
}
