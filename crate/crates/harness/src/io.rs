//! State-space model files: a JSON document with row-major `A`, `B`, `C`, `D`
//! arrays, or a directory of Matrix Market files `A.mtx` .. `D.mtx`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use morh2w_core::matdense::Mat;
use morh2w_core::statespace::StateSpace;
use serde::Deserialize;

use crate::error::{HarnessError, Result};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonModel {
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    b: Vec<Vec<f64>>,
    #[serde(rename = "C")]
    c: Vec<Vec<f64>>,
    #[serde(rename = "D", default)]
    d: Option<Vec<Vec<f64>>>,
}

/// Load a model from a JSON file or a Matrix Market directory.
///
/// Stability is not checked here; see [`stability_warning`].
pub fn load_statespace(path: &Path) -> Result<StateSpace> {
    if path.is_dir() {
        load_matrix_market_dir(path)
    } else {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        parse_json_model(&text, path)
    }
}

/// A warning line when the model is not asymptotically stable.
pub fn stability_warning(sys: &StateSpace) -> Option<String> {
    match sys.spectral_abscissa() {
        Ok(alpha) if alpha < 0.0 => None,
        Ok(alpha) => Some(format!("model is not asymptotically stable (spectral abscissa {alpha:.6e})")),
        Err(e) => Some(format!("stability could not be checked: {e}")),
    }
}

pub fn parse_json_model(text: &str, path: &Path) -> Result<StateSpace> {
    let model: JsonModel = serde_json::from_str(text).map_err(|e| HarnessError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let invalid = |msg: String| HarnessError::InvalidModel {
        path: path.to_path_buf(),
        source: morh2w_core::Error::DimensionMismatch(msg),
    };
    let n = model.a.len();
    let a = rows_to_mat(&model.a, "A").map_err(invalid)?;
    let b = rows_to_mat(&model.b, "B").map_err(invalid)?;
    let c = rows_to_mat(&model.c, "C").map_err(invalid)?;
    // Row-major arrays lose the inner width when there are no rows.
    let (m, p) = match &model.d {
        Some(d) if !d.is_empty() => (d[0].len(), d.len()),
        _ => (if n > 0 { b.ncols() } else { 0 }, c.nrows()),
    };
    let b = if n == 0 { Mat::zeros(0, m) } else { b };
    let c = if n == 0 { Mat::zeros(p, 0) } else { c };
    let d = match &model.d {
        Some(d) => rows_to_mat(d, "D").map_err(invalid)?,
        None => Mat::zeros(p, m),
    };
    StateSpace::new(a, b, c, d).map_err(|source| HarnessError::InvalidModel { path: path.to_path_buf(), source })
}

fn rows_to_mat(rows: &[Vec<f64>], name: &str) -> std::result::Result<Mat, String> {
    let ncols = rows.first().map_or(0, |r| r.len());
    if let Some(i) = rows.iter().position(|r| r.len() != ncols) {
        return Err(format!("{name} row {} has {} entries, expected {ncols}", i + 1, rows[i].len()));
    }
    Ok(Mat::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

/// JSON text of a model. Numbers use the shortest representation that
/// parses back to the same double, so a save/load cycle is exact.
pub fn model_to_json(sys: &StateSpace) -> String {
    let mut out = String::from("{\n");
    let names = [("A", sys.a()), ("B", sys.b()), ("C", sys.c()), ("D", sys.d())];
    for (k, (name, m)) in names.iter().enumerate() {
        let _ = write!(out, "  \"{name}\": {}", matrix_json(m, "  "));
        out.push_str(if k + 1 < names.len() { ",\n" } else { "\n" });
    }
    out.push_str("}\n");
    out
}

/// Row-major JSON array with one row per line.
pub fn matrix_json(m: &Mat, indent: &str) -> String {
    if m.nrows() == 0 {
        return "[]".into();
    }
    let rows: Vec<String> = (0..m.nrows())
        .map(|i| {
            let vals: Vec<String> = (0..m.ncols()).map(|j| json_number(m[(i, j)])).collect();
            format!("{indent}  [{}]", vals.join(", "))
        })
        .collect();
    format!("[\n{}\n{indent}]", rows.join(",\n"))
}

fn json_number(x: f64) -> String {
    serde_json::Number::from_f64(x).map_or_else(|| "null".into(), |n| n.to_string())
}

pub fn save_statespace(path: &Path, sys: &StateSpace) -> Result<()> {
    fs::write(path, model_to_json(sys)).map_err(|e| HarnessError::io(path, e))
}

/// Write `A.mtx` .. `D.mtx` in array format.
pub fn save_matrix_market_dir(dir: &Path, sys: &StateSpace) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    for (name, m) in [("A", sys.a()), ("B", sys.b()), ("C", sys.c()), ("D", sys.d())] {
        let mut text = format!("%%MatrixMarket matrix array real general\n{} {}\n", m.nrows(), m.ncols());
        for x in m.iter() {
            let _ = writeln!(text, "{x:e}");
        }
        let path = dir.join(format!("{name}.mtx"));
        fs::write(&path, text).map_err(|e| HarnessError::io(&path, e))?;
    }
    Ok(())
}

fn load_matrix_market_dir(dir: &Path) -> Result<StateSpace> {
    let read = |name: &str| -> Result<Option<Mat>> {
        let path = dir.join(format!("{name}.mtx"));
        if !path.exists() {
            return Ok(None);
        }
        let text = fs::read_to_string(&path).map_err(|e| HarnessError::io(&path, e))?;
        parse_matrix_market(&text, &path).map(Some)
    };
    let missing = |name: &str| HarnessError::io(&dir.join(format!("{name}.mtx")), std::io::ErrorKind::NotFound.into());
    let a = read("A")?.ok_or_else(|| missing("A"))?;
    let b = read("B")?.ok_or_else(|| missing("B"))?;
    let c = read("C")?.ok_or_else(|| missing("C"))?;
    let d = read("D")?.unwrap_or_else(|| Mat::zeros(c.nrows(), b.ncols()));
    StateSpace::new(a, b, c, d).map_err(|source| HarnessError::InvalidModel { path: dir.to_path_buf(), source })
}

#[derive(Clone, Copy, PartialEq)]
enum Symmetry {
    General,
    Symmetric,
    Skew,
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        match (ch.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

/// Parse one real Matrix Market matrix (coordinate or array format; general,
/// symmetric or skew-symmetric storage).
pub fn parse_matrix_market(text: &str, path: &Path) -> Result<Mat> {
    let err = |line: usize, column: usize, message: String| HarnessError::Parse {
        path: path.to_path_buf(),
        line,
        column,
        message,
    };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or_else(|| err(1, 1, "empty file".into()))?;
    let head = tokens(header);
    let words: Vec<String> = head.iter().map(|(_, t)| t.to_ascii_lowercase()).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(err(1, 1, "expected '%%MatrixMarket matrix <format> <field> <symmetry>'".into()));
    }
    let coordinate = match words[2].as_str() {
        "coordinate" => true,
        "array" => false,
        other => return Err(err(1, head[2].0, format!("unsupported format '{other}'"))),
    };
    if !matches!(words[3].as_str(), "real" | "double" | "integer") {
        return Err(err(1, head[3].0, format!("unsupported field '{}' (real matrices only)", words[3])));
    }
    let sym = match words[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::Skew,
        other => return Err(err(1, head[4].0, format!("unsupported symmetry '{other}'"))),
    };

    let mut body = lines.filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('%'));
    let (size_line, size_text) = body.next().ok_or_else(|| err(1, 1, "missing size line".into()))?;
    let size = tokens(size_text);
    let expect = if coordinate { 3 } else { 2 };
    if size.len() != expect {
        return Err(err(size_line, 1, format!("size line needs {expect} integers")));
    }
    let int = |(col, t): (usize, &str), line: usize| t.parse::<usize>().map_err(|_| err(line, col, format!("expected a nonnegative integer, got '{t}'")));
    let nr = int(size[0], size_line)?;
    let nc = int(size[1], size_line)?;
    if sym != Symmetry::General && nr != nc {
        return Err(err(size_line, 1, "symmetric storage needs a square matrix".into()));
    }
    let real = |(col, t): (usize, &str), line: usize| match t.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(err(line, col, format!("expected a finite real number, got '{t}'"))),
    };
    let mut m = Mat::zeros(nr, nc);
    let mirror = |m: &mut Mat, i: usize, j: usize, x: f64| match sym {
        Symmetry::Symmetric if i != j => m[(j, i)] = x,
        Symmetry::Skew => m[(j, i)] = -x,
        _ => {}
    };

    if coordinate {
        let nnz = int(size[2], size_line)?;
        let mut seen = std::collections::HashSet::new();
        let mut count = 0;
        for (ln, l) in body {
            let t = tokens(l);
            if t.len() != 3 {
                return Err(err(ln, 1, "coordinate entries need 'row col value'".into()));
            }
            let (i, j) = (int(t[0], ln)?, int(t[1], ln)?);
            if i == 0 || i > nr {
                return Err(err(ln, t[0].0, format!("row index {i} outside 1..={nr}")));
            }
            if j == 0 || j > nc {
                return Err(err(ln, t[1].0, format!("column index {j} outside 1..={nc}")));
            }
            if sym != Symmetry::General && j > i {
                return Err(err(ln, t[1].0, "symmetric storage lists the lower triangle only".into()));
            }
            if sym == Symmetry::Skew && i == j {
                return Err(err(ln, t[0].0, "skew-symmetric storage has no diagonal entries".into()));
            }
            if !seen.insert((i, j)) {
                return Err(err(ln, 1, format!("duplicate entry ({i}, {j})")));
            }
            let x = real(t[2], ln)?;
            m[(i - 1, j - 1)] = x;
            mirror(&mut m, i - 1, j - 1, x);
            count += 1;
        }
        if count != nnz {
            return Err(err(size_line, size[2].0, format!("declared {nnz} entries, found {count}")));
        }
    } else {
        // Column-major; symmetric kinds store the lower triangle only.
        let slots: Vec<(usize, usize)> = (0..nc)
            .flat_map(|j| (0..nr).map(move |i| (i, j)))
            .filter(|&(i, j)| match sym {
                Symmetry::General => true,
                Symmetry::Symmetric => i >= j,
                Symmetry::Skew => i > j,
            })
            .collect();
        let mut values = Vec::with_capacity(slots.len());
        let mut last_line = size_line;
        for (ln, l) in body {
            for tok in tokens(l) {
                if values.len() == slots.len() {
                    return Err(err(ln, tok.0, format!("more than the {} expected values", slots.len())));
                }
                values.push(real(tok, ln)?);
            }
            last_line = ln;
        }
        if values.len() != slots.len() {
            return Err(err(last_line, 1, format!("expected {} values, found {}", slots.len(), values.len())));
        }
        for (&(i, j), x) in slots.iter().zip(values) {
            m[(i, j)] = x;
            mirror(&mut m, i, j, x);
        }
    }
    Ok(m)
}
