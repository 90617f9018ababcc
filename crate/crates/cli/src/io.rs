//! Matrix input and output.
//!
//! Two input formats are accepted. Files whose first line starts with
//! `%%MatrixMarket` are parsed as Matrix Market (coordinate or array layout;
//! real, integer or complex fields; general, symmetric, hermitian or
//! skew-symmetric storage, expanded to a dense matrix). Anything else is read
//! as comma-separated rows of complex numbers such as `1.5-2i`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use seplam_core::{CMatrix, Complex64};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Layout {
    Coordinate,
    Array,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Field {
    Real,
    Integer,
    Complex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    Hermitian,
    SkewSymmetric,
}

impl Symmetry {
    /// Value stored at the mirrored position `(j, i)`.
    fn mirror(self, v: Complex64) -> Complex64 {
        match self {
            Symmetry::General | Symmetry::Symmetric => v,
            Symmetry::Hermitian => v.conj(),
            Symmetry::SkewSymmetric => -v,
        }
    }
}

struct Parser<'a> {
    path: &'a Path,
}

impl Parser<'_> {
    fn err(&self, line: usize, message: impl Into<String>) -> CliError {
        CliError::Parse { path: self.path.to_path_buf(), line, message: message.into() }
    }

    fn header(&self, line: &str) -> Result<(Layout, Field, Symmetry), CliError> {
        let words: Vec<String> = line.split_whitespace().map(str::to_ascii_lowercase).collect();
        if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
            return Err(self.err(1, "expected `%%MatrixMarket matrix <layout> <field> <symmetry>`"));
        }
        let layout = match words[2].as_str() {
            "coordinate" => Layout::Coordinate,
            "array" => Layout::Array,
            other => return Err(self.err(1, format!("unsupported layout `{other}`"))),
        };
        let field = match words[3].as_str() {
            "real" | "double" => Field::Real,
            "integer" => Field::Integer,
            "complex" => Field::Complex,
            other => return Err(self.err(1, format!("unsupported field `{other}`"))),
        };
        let symmetry = match words[4].as_str() {
            "general" => Symmetry::General,
            "symmetric" => Symmetry::Symmetric,
            "hermitian" => Symmetry::Hermitian,
            "skew-symmetric" => Symmetry::SkewSymmetric,
            other => return Err(self.err(1, format!("unsupported symmetry `{other}`"))),
        };
        Ok((layout, field, symmetry))
    }

    fn number(&self, line: usize, tok: &str) -> Result<f64, CliError> {
        let v: f64 = tok.parse().map_err(|_| self.err(line, format!("invalid number `{tok}`")))?;
        if !v.is_finite() {
            return Err(self.err(line, format!("non-finite value `{tok}`")));
        }
        Ok(v)
    }

    fn index(&self, line: usize, tok: &str, bound: usize) -> Result<usize, CliError> {
        let i: usize = tok.parse().map_err(|_| self.err(line, format!("invalid index `{tok}`")))?;
        if i == 0 || i > bound {
            return Err(self.err(line, format!("index {i} outside 1..={bound}")));
        }
        Ok(i - 1)
    }

    fn value(&self, line: usize, toks: &[&str], field: Field) -> Result<Complex64, CliError> {
        let want = if field == Field::Complex { 2 } else { 1 };
        if toks.len() != want {
            return Err(self.err(line, format!("expected {want} value token(s), found {}", toks.len())));
        }
        if field == Field::Integer {
            toks[0].parse::<i64>().map_err(|_| self.err(line, format!("invalid integer `{}`", toks[0])))?;
        }
        let re = self.number(line, toks[0])?;
        let im = if want == 2 { self.number(line, toks[1])? } else { 0.0 };
        Ok(Complex64::new(re, im))
    }

    fn matrix_market(&self, text: &str) -> Result<CMatrix, CliError> {
        let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l));
        let (_, first) = lines.next().ok_or_else(|| self.err(1, "empty file"))?;
        let (layout, field, symmetry) = self.header(first)?;
        if symmetry == Symmetry::Hermitian && field != Field::Complex && field != Field::Real {
            return Err(self.err(1, "hermitian storage needs a real or complex field"));
        }
        let mut data = lines.filter(|(_, l)| {
            let t = l.trim_start();
            !t.is_empty() && !t.starts_with('%')
        });

        let (size_line, size) = data.next().ok_or_else(|| self.err(1, "missing size line"))?;
        let dims: Vec<&str> = size.split_whitespace().collect();
        let want = if layout == Layout::Coordinate { 3 } else { 2 };
        if dims.len() != want {
            return Err(self.err(size_line, format!("size line needs {want} integers")));
        }
        let parse_dim = |t: &str| t.parse::<usize>().map_err(|_| self.err(size_line, format!("invalid size `{t}`")));
        let rows = parse_dim(dims[0])?;
        let cols = parse_dim(dims[1])?;
        if symmetry != Symmetry::General && rows != cols {
            return Err(self.err(size_line, "symmetric storage requires a square matrix"));
        }
        if rows != cols {
            return Err(CliError::NotSquare { path: self.path.to_path_buf(), rows, cols });
        }
        let mut m = CMatrix::from_fn(rows, cols, |_, _| Complex64::new(0.0, 0.0));
        let put = |i: usize, j: usize, v: Complex64, m: &mut CMatrix| {
            m.set(i, j, v);
            if i != j && symmetry != Symmetry::General {
                m.set(j, i, symmetry.mirror(v));
            }
        };

        match layout {
            Layout::Coordinate => {
                let nnz = parse_dim(dims[2])?;
                let mut seen = 0usize;
                for (ln, l) in data {
                    let toks: Vec<&str> = l.split_whitespace().collect();
                    if toks.len() < 3 {
                        return Err(self.err(ln, "expected `row col value`"));
                    }
                    if seen == nnz {
                        return Err(self.err(ln, format!("more than the declared {nnz} entries")));
                    }
                    let i = self.index(ln, toks[0], rows)?;
                    let j = self.index(ln, toks[1], cols)?;
                    if symmetry != Symmetry::General && j > i {
                        return Err(self.err(ln, "entry above the diagonal in symmetric storage"));
                    }
                    if symmetry == Symmetry::SkewSymmetric && i == j {
                        return Err(self.err(ln, "diagonal entry in skew-symmetric storage"));
                    }
                    let v = self.value(ln, &toks[2..], field)?;
                    // Repeated coordinates accumulate.
                    let v = m.get(i, j) + v;
                    put(i, j, v, &mut m);
                    seen += 1;
                }
                if seen != nnz {
                    return Err(self.err(size_line, format!("declared {nnz} entries, found {seen}")));
                }
            }
            Layout::Array => {
                // Column-major; symmetric storage lists the lower triangle only.
                let mut slots = Vec::new();
                for j in 0..cols {
                    let start = match symmetry {
                        Symmetry::General => 0,
                        Symmetry::SkewSymmetric => j + 1,
                        _ => j,
                    };
                    slots.extend((start..rows).map(|i| (i, j)));
                }
                let mut next = slots.iter();
                for (ln, l) in data {
                    let toks: Vec<&str> = l.split_whitespace().collect();
                    let &(i, j) = next.next().ok_or_else(|| self.err(ln, format!("more than the expected {} values", slots.len())))?;
                    let v = self.value(ln, &toks, field)?;
                    put(i, j, v, &mut m);
                }
                let remaining = next.count();
                if remaining > 0 {
                    return Err(self.err(size_line, format!("missing {remaining} of {} values", slots.len())));
                }
            }
        }
        Ok(m)
    }

    fn csv(&self, text: &str) -> Result<CMatrix, CliError> {
        let mut rows: Vec<Vec<Complex64>> = Vec::new();
        let mut row_lines = Vec::new();
        for (k, l) in text.lines().enumerate() {
            let ln = k + 1;
            let t = l.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let row = t
                .split(',')
                .map(|tok| parse_complex(tok.trim()).ok_or_else(|| self.err(ln, format!("invalid complex entry `{}`", tok.trim()))))
                .collect::<Result<Vec<_>, _>>()?;
            if let Some(first) = rows.first() {
                if row.len() != first.len() {
                    return Err(self.err(ln, format!("row has {} entries, expected {}", row.len(), first.len())));
                }
            }
            rows.push(row);
            row_lines.push(ln);
        }
        if rows.is_empty() {
            return Err(self.err(1, "no matrix rows"));
        }
        let (r, c) = (rows.len(), rows[0].len());
        if r != c {
            return Err(CliError::NotSquare { path: self.path.to_path_buf(), rows: r, cols: c });
        }
        Ok(CMatrix::from_fn(r, c, |i, j| rows[i][j]))
    }
}

/// Parses `a`, `bi`, `a+bi` or `a-bi` (also with `j`), e.g. `1e-3-2.5i`.
pub fn parse_complex(s: &str) -> Option<Complex64> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    let finite = |v: f64| v.is_finite().then_some(v);
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        return finite(s.parse().ok()?).map(|re| Complex64::new(re, 0.0));
    };
    // The imaginary part starts at the last sign that is not an exponent sign.
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (finite(body[..k].trim().parse().ok()?)?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im.trim() {
        "" | "+" => 1.0,
        "-" => -1.0,
        t => finite(t.parse().ok()?)?,
    };
    Some(Complex64::new(re, im))
}

/// Reads a dense square matrix from a Matrix Market or CSV file.
pub fn read_matrix(path: &Path) -> Result<CMatrix, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    parse_matrix(path, &text)
}

/// Parses file contents; `path` is used only in error messages.
pub fn parse_matrix(path: &Path, text: &str) -> Result<CMatrix, CliError> {
    let p = Parser { path };
    if text.trim_start().starts_with("%%MatrixMarket") {
        p.matrix_market(text)
    } else {
        p.csv(text)
    }
}

/// Array-layout Matrix Market text. The shortest round-trip representation
/// is used, so reading it back reproduces every entry exactly.
pub fn matrix_market_string(m: &CMatrix) -> String {
    let real = m.entries().iter().all(|z| z.im.to_bits() == 0);
    let field = if real { "real" } else { "complex" };
    let mut out = format!("%%MatrixMarket matrix array {field} general\n{} {}\n", m.rows(), m.cols());
    for j in 0..m.cols() {
        for i in 0..m.rows() {
            let z = m.get(i, j);
            if real {
                writeln!(out, "{:e}", z.re).expect("writing to a String");
            } else {
                writeln!(out, "{:e} {:e}", z.re, z.im).expect("writing to a String");
            }
        }
    }
    out
}

pub fn write_matrix_market(path: &Path, m: &CMatrix) -> Result<(), CliError> {
    fs::write(path, matrix_market_string(m)).map_err(|source| CliError::Io { path: PathBuf::from(path), source })
}
