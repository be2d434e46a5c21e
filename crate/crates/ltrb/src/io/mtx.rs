//! Matrix Market `coordinate` and `array` files with real entries.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use ltrb_core::linalg::{CsrMatrix, DenseMatrix};

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    General,
    Symmetric,
}

/// Writes a sparse matrix; with `Symmetric` only the lower triangle is stored.
pub fn write_coordinate(path: &Path, a: &CsrMatrix, symmetry: Symmetry) -> Result<()> {
    let io = CliError::io(path);
    let mut w = BufWriter::new(File::create(path).map_err(CliError::io(path))?);
    let kind = match symmetry {
        Symmetry::General => "general",
        Symmetry::Symmetric => "symmetric",
    };
    let entries: Vec<(usize, usize, f64)> =
        a.triplets().filter(|&(i, j, _)| symmetry == Symmetry::General || j <= i).collect();
    (|| {
        writeln!(w, "%%MatrixMarket matrix coordinate real {kind}")?;
        writeln!(w, "{} {} {}", a.nrows(), a.ncols(), entries.len())?;
        for (i, j, v) in entries {
            writeln!(w, "{} {} {:e}", i + 1, j + 1, v)?;
        }
        w.flush()
    })()
    .map_err(io)
}

/// Writes a dense matrix in column-major `array` layout.
pub fn write_array(path: &Path, a: &DenseMatrix) -> Result<()> {
    let io = CliError::io(path);
    let mut w = BufWriter::new(File::create(path).map_err(CliError::io(path))?);
    (|| {
        writeln!(w, "%%MatrixMarket matrix array real general")?;
        writeln!(w, "{} {}", a.nrows(), a.ncols())?;
        for v in a.as_slice() {
            writeln!(w, "{v:e}")?;
        }
        w.flush()
    })()
    .map_err(io)
}

struct Reader<'a> {
    path: &'a Path,
    lines: std::iter::Enumerate<std::io::Lines<BufReader<File>>>,
}

impl<'a> Reader<'a> {
    fn open(path: &'a Path) -> Result<Self> {
        let f = File::open(path).map_err(CliError::io(path))?;
        Ok(Self { path, lines: BufReader::new(f).lines().enumerate() })
    }

    fn err(&self, line: usize, msg: impl Into<String>) -> CliError {
        CliError::Format { path: self.path.to_path_buf(), line, msg: msg.into() }
    }

    /// Next line that is not a `%` comment or blank, with its 1-based number.
    fn next_data(&mut self) -> Result<Option<(usize, String)>> {
        for (idx, line) in self.lines.by_ref() {
            let line = line.map_err(CliError::io(self.path))?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('%') {
                continue;
            }
            return Ok(Some((idx + 1, t.to_string())));
        }
        Ok(None)
    }

    fn header(&mut self) -> Result<Vec<String>> {
        match self.lines.next() {
            Some((_, Ok(line))) => {
                let fields: Vec<String> = line.split_whitespace().map(str::to_ascii_lowercase).collect();
                if fields.len() != 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" || fields[3] != "real" {
                    return Err(self.err(1, format!("unsupported Matrix Market header `{line}`")));
                }
                Ok(fields)
            }
            Some((_, Err(e))) => Err(CliError::Io { path: self.path.to_path_buf(), source: e }),
            None => Err(self.err(1, "empty file")),
        }
    }

    fn numbers<T: std::str::FromStr>(&self, line: usize, text: &str, count: usize) -> Result<Vec<T>> {
        let v: Vec<T> = text
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| self.err(line, format!("cannot parse `{t}`"))))
            .collect::<Result<_>>()?;
        if v.len() != count {
            return Err(self.err(line, format!("expected {count} fields, found {}", v.len())));
        }
        Ok(v)
    }
}

pub fn read_coordinate(path: &Path) -> Result<CsrMatrix> {
    let mut r = Reader::open(path)?;
    let header = r.header()?;
    if header[2] != "coordinate" {
        return Err(r.err(1, "expected a coordinate matrix"));
    }
    let symmetric = match header[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(r.err(1, format!("unsupported symmetry `{other}`"))),
    };
    let (line, size) = r.next_data()?.ok_or_else(|| r.err(2, "missing size line"))?;
    let size: Vec<usize> = r.numbers(line, &size, 3)?;
    let (nrows, ncols, nnz) = (size[0], size[1], size[2]);
    let mut trip = Vec::with_capacity(if symmetric { 2 * nnz } else { nnz });
    for _ in 0..nnz {
        let (line, text) = r.next_data()?.ok_or_else(|| r.err(0, format!("expected {nnz} entries")))?;
        let f: Vec<&str> = text.split_whitespace().collect();
        if f.len() != 3 {
            return Err(r.err(line, "expected `i j value`"));
        }
        let i: usize = f[0].parse().map_err(|_| r.err(line, "bad row index"))?;
        let j: usize = f[1].parse().map_err(|_| r.err(line, "bad column index"))?;
        let v: f64 = f[2].parse().map_err(|_| r.err(line, "bad value"))?;
        if i == 0 || j == 0 || i > nrows || j > ncols {
            return Err(r.err(line, format!("index ({i}, {j}) out of range")));
        }
        trip.push((i - 1, j - 1, v));
        if symmetric && i != j {
            trip.push((j - 1, i - 1, v));
        }
    }
    if let Some((line, _)) = r.next_data()? {
        return Err(r.err(line, "trailing data after the declared entries"));
    }
    CsrMatrix::from_triplets(nrows, ncols, &trip).map_err(|e| r.err(0, e.to_string()))
}

pub fn read_array(path: &Path) -> Result<DenseMatrix> {
    let mut r = Reader::open(path)?;
    let header = r.header()?;
    if header[2] != "array" || header[4] != "general" {
        return Err(r.err(1, "expected a general array matrix"));
    }
    let (line, size) = r.next_data()?.ok_or_else(|| r.err(2, "missing size line"))?;
    let size: Vec<usize> = r.numbers(line, &size, 2)?;
    let n = size[0] * size[1];
    let mut data = Vec::with_capacity(n);
    for _ in 0..n {
        let (line, text) = r.next_data()?.ok_or_else(|| r.err(0, format!("expected {n} values")))?;
        data.push(r.numbers::<f64>(line, &text, 1)?[0]);
    }
    if let Some((line, _)) = r.next_data()? {
        return Err(r.err(line, "trailing data after the declared entries"));
    }
    DenseMatrix::from_column_major(size[0], size[1], data).map_err(|e| r.err(0, e.to_string()))
}
