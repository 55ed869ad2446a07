//! CSV and JSON file handling. Matrices are one row per line, vectors one
//! value per line; no header; numbers printed with `%.17g` so a value read
//! back is bit-identical.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use l1min::bench::format_g17;
use l1min::DenseMatrix;
use serde::Serialize;

use crate::CliError;

/// Environment variable naming the directory for outputs without `--out`.
pub const OUT_DIR_VAR: &str = "L1MIN_OUT_DIR";

/// `explicit` if given, else `default_name` inside `$L1MIN_OUT_DIR` (or the
/// current directory).
pub fn output_path(explicit: Option<&Path>, default_name: &str) -> PathBuf {
    match explicit {
        Some(p) => p.to_path_buf(),
        None => match std::env::var_os(OUT_DIR_VAR) {
            Some(dir) if !dir.is_empty() => PathBuf::from(dir).join(default_name),
            _ => PathBuf::from(default_name),
        },
    }
}

fn read_rows(path: &Path) -> Result<Vec<Vec<f64>>, CliError> {
    let file = fs::File::open(path).map_err(|e| CliError::usage(format!("cannot open {}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(file);
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        let row = record
            .iter()
            .enumerate()
            .map(|(col, field)| {
                field.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
                    CliError::usage(format!(
                        "{} line {}, column {}: '{field}' is not a finite number",
                        path.display(),
                        line + 1,
                        col + 1
                    ))
                })
            })
            .collect::<Result<Vec<f64>, _>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::usage(format!("{} is empty", path.display())));
    }
    Ok(rows)
}

pub fn read_matrix(path: &Path) -> Result<DenseMatrix, CliError> {
    let rows = read_rows(path)?;
    let width = rows[0].len();
    if let Some(i) = rows.iter().position(|r| r.len() != width) {
        return Err(CliError::usage(format!(
            "{} line {}: expected {width} values like line 1, found {}",
            path.display(),
            i + 1,
            rows[i].len()
        )));
    }
    DenseMatrix::from_rows(&rows).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

pub fn read_vector(path: &Path) -> Result<Vec<f64>, CliError> {
    let rows = read_rows(path)?;
    if let Some(i) = rows.iter().position(|r| r.len() != 1) {
        return Err(CliError::usage(format!(
            "{} line {}: a vector file holds one value per line, found {}",
            path.display(),
            i + 1,
            rows[i].len()
        )));
    }
    Ok(rows.into_iter().map(|r| r[0]).collect())
}

fn create(path: &Path) -> Result<BufWriter<fs::File>, CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    fs::File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path, e))
}

/// Opens `path` for writing, runs `body`, and flushes.
pub fn write_with(path: &Path, body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<(), CliError> {
    let mut w = create(path)?;
    body(&mut w).and_then(|_| w.flush()).map_err(|e| CliError::io(path, e))
}

pub fn write_matrix(path: &Path, m: &DenseMatrix) -> Result<(), CliError> {
    write_with(path, |w| {
        for i in 0..m.rows() {
            let line: Vec<String> = m.row(i).iter().map(|&v| format_g17(v)).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    })
}

pub fn write_vector(path: &Path, v: &[f64]) -> Result<(), CliError> {
    write_with(path, |w| v.iter().try_for_each(|&x| writeln!(w, "{}", format_g17(x))))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    write_with(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value).map_err(std::io::Error::other)?;
        writeln!(w)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn any_finite_matrix_round_trips(
            rows in 1usize..5,
            values in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO, 20),
        ) {
            let cols = values.len() / rows;
            let m = DenseMatrix::new(rows, cols, values[..rows * cols].to_vec()).unwrap();
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("m.csv");
            write_matrix(&path, &m).unwrap();
            let back = read_matrix(&path).unwrap();
            prop_assert_eq!(back.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                m.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>());
        }
    }

    #[test]
    fn matrix_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let m = DenseMatrix::from_rows(&[vec![0.1, -1.0 / 3.0], vec![1e-300, 2.5e17]]).unwrap();
        write_matrix(&path, &m).unwrap();
        assert_eq!(
            std::fs::read_to_string(&path).unwrap(),
            "0.10000000000000001,-0.33333333333333331\n1e-300,2.5e+17\n"
        );
        assert_eq!(read_matrix(&path).unwrap(), m);
    }

    #[test]
    fn ragged_and_bad_rows_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "1,2\n3\n").unwrap();
        let err = read_matrix(&path).unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        std::fs::write(&path, "1\nabc\n").unwrap();
        assert!(read_vector(&path).unwrap_err().to_string().contains("'abc'"));
        std::fs::write(&path, "1,2\n").unwrap();
        assert!(read_vector(&path).is_err());
        std::fs::write(&path, "").unwrap();
        assert!(read_vector(&path).unwrap_err().to_string().contains("empty"));
    }
}
