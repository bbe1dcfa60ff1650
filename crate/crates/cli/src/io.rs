//! Text formats for matrices and circuit parameters.
//!
//! Matrix files: first line `N`, then `N` lines of `N` whitespace-separated
//! entries. Real entries are decimals; complex entries are `re,im`. Blank lines
//! and lines starting with `#` are ignored. Values are written with 17
//! significant digits so that reading a written file reproduces it bit-exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use skewcirc::{AntisymMatrix, ComplexDense, Error, ParamVector, C64};

use crate::error::{CliError, CliResult};

struct Lines<'a> {
    path: PathBuf,
    last: usize,
    inner: Box<dyn Iterator<Item = (usize, &'a str)> + 'a>,
}

impl<'a> Lines<'a> {
    fn new(path: &Path, text: &'a str) -> Self {
        let it: Box<dyn Iterator<Item = (usize, &'a str)>> = Box::new(
            text.lines()
                .enumerate()
                .map(|(i, l)| (i + 1, l.trim()))
                .filter(|(_, l)| !l.is_empty() && !l.starts_with('#')),
        );
        Self {
            path: path.to_path_buf(),
            last: text.lines().count(),
            inner: it,
        }
    }

    fn err(&self, line: usize, message: impl Into<String>) -> CliError {
        CliError::Parse {
            path: self.path.clone(),
            line,
            message: message.into(),
        }
    }

    fn next_line(&mut self, what: &str) -> CliResult<(usize, &'a str)> {
        let eof = self.last + 1;
        self.inner
            .next()
            .ok_or_else(|| self.err(eof, format!("unexpected end of file, expected {what}")))
    }

    fn finish(&mut self) -> CliResult<()> {
        if let Some((line, _)) = self.inner.next() {
            return Err(self.err(line, "trailing content"));
        }
        Ok(())
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn parse_f64(lines: &Lines, line: usize, token: &str) -> CliResult<f64> {
    let v: f64 = token
        .parse()
        .map_err(|_| lines.err(line, format!("'{token}' is not a number")))?;
    if !v.is_finite() {
        return Err(lines.err(line, format!("'{token}' is not finite")));
    }
    Ok(v)
}

/// Parses a matrix file into row-major entries using `entry` for each token.
fn parse_matrix<T>(
    path: &Path,
    text: &str,
    entry: impl Fn(&Lines, usize, &str) -> CliResult<T>,
) -> CliResult<(usize, Vec<T>)> {
    let mut lines = Lines::new(path, text);
    let (line, header) = lines.next_line("the dimension")?;
    let dim: usize = header
        .parse()
        .map_err(|_| lines.err(line, format!("'{header}' is not a dimension")))?;
    if dim == 0 {
        return Err(lines.err(line, "dimension must be positive"));
    }
    let mut data = Vec::with_capacity(dim * dim);
    for r in 0..dim {
        let (line, row) = lines.next_line(&format!("row {}", r + 1))?;
        let tokens: Vec<&str> = row.split_whitespace().collect();
        if tokens.len() != dim {
            return Err(lines.err(line, format!("expected {dim} entries, found {}", tokens.len())));
        }
        for t in tokens {
            data.push(entry(&lines, line, t)?);
        }
    }
    lines.finish()?;
    Ok((dim, data))
}

pub fn parse_real_matrix(path: &Path, text: &str) -> CliResult<(usize, Vec<f64>)> {
    parse_matrix(path, text, parse_f64)
}

pub fn parse_complex_matrix(path: &Path, text: &str) -> CliResult<ComplexDense> {
    let (dim, data) = parse_matrix(path, text, |lines, line, token| {
        let (re, im) = match token.split_once(',') {
            Some((re, im)) => (parse_f64(lines, line, re)?, parse_f64(lines, line, im)?),
            None => (parse_f64(lines, line, token)?, 0.0),
        };
        Ok(C64::new(re, im))
    })?;
    Ok(ComplexDense::new(dim, data)?)
}

/// Reads and validates an antisymmetric matrix, naming the first violating pair.
pub fn read_antisym(path: &Path) -> CliResult<AntisymMatrix> {
    let (dim, data) = parse_real_matrix(path, &read_text(path)?)?;
    AntisymMatrix::new(dim, data).map_err(|e| match e {
        Error::NotAntisymmetric {
            row,
            col,
            upper,
            lower,
        } => CliError::Validation(format!(
            "{}: matrix is not antisymmetric: a[{row}][{col}] = {upper} but a[{col}][{row}] = {lower}",
            path.display()
        )),
        other => other.into(),
    })
}

pub fn read_complex(path: &Path) -> CliResult<ComplexDense> {
    parse_complex_matrix(path, &read_text(path)?)
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn format_antisym(a: &AntisymMatrix) -> String {
    let n = a.dim();
    let mut out = format!("{n}\n");
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| format!("{:.16e}", a.get(i, j))).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn format_complex(u: &ComplexDense) -> String {
    let n = u.dim();
    let mut out = format!("{n}\n");
    for i in 0..n {
        let row: Vec<String> = u
            .row(i)
            .iter()
            .map(|z| format!("{:.16e},{:.16e}", z.re, z.im))
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn write_antisym(path: &Path, a: &AntisymMatrix) -> CliResult<()> {
    write_text(path, &format_antisym(a))
}

pub fn write_complex(path: &Path, u: &ComplexDense) -> CliResult<()> {
    write_text(path, &format_complex(u))
}

const PARAM_KEYS: [&str; 4] = ["theta_p", "theta_d", "theta_f", "theta_lambda"];

/// `key: v1 v2 ...` lines, one per block, after an `n_qubits:` line.
pub fn format_params(p: &ParamVector) -> String {
    let mut out = format!("n_qubits: {}\n", p.n_qubits());
    for (key, values) in PARAM_KEYS
        .iter()
        .zip([p.theta_p(), p.theta_d(), p.theta_f(), p.theta_lambda()])
    {
        let _ = write!(out, "{key}:");
        for v in values {
            let _ = write!(out, " {v:.16e}");
        }
        out.push('\n');
    }
    out
}

pub fn parse_params(path: &Path, text: &str) -> CliResult<ParamVector> {
    let mut lines = Lines::new(path, text);
    let mut field = |key: &str| -> CliResult<(usize, Vec<f64>)> {
        let (line, content) = lines.next_line(key)?;
        let rest = content
            .strip_prefix(key)
            .and_then(|r| r.strip_prefix(':'))
            .ok_or_else(|| lines.err(line, format!("expected '{key}:'")))?;
        let values = rest
            .split_whitespace()
            .map(|t| parse_f64(&lines, line, t))
            .collect::<CliResult<_>>()?;
        Ok((line, values))
    };
    let (line, n) = field("n_qubits")?;
    if n.len() != 1 || n[0].fract() != 0.0 || n[0] < 0.0 {
        return Err(CliError::Parse {
            path: path.to_path_buf(),
            line,
            message: "n_qubits must be one non-negative integer".into(),
        });
    }
    let mut blocks = Vec::new();
    for key in PARAM_KEYS {
        blocks.push(field(key)?.1);
    }
    lines.finish()?;
    let [p, d, f, l]: [Vec<f64>; 4] = blocks.try_into().expect("four blocks");
    Ok(ParamVector::new(n[0] as usize, p, d, f, l)?)
}

pub fn write_params(path: &Path, p: &ParamVector) -> CliResult<()> {
    write_text(path, &format_params(p))
}

pub fn read_params(path: &Path) -> CliResult<ParamVector> {
    parse_params(path, &read_text(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use skewcirc::{random_antisym, MatrixFamily};

    fn p() -> &'static Path {
        Path::new("m.txt")
    }

    #[test]
    fn antisym_round_trip_is_bit_exact() {
        let a = random_antisym(3, MatrixFamily::UniformReal, 17).unwrap();
        let (dim, data) = parse_real_matrix(p(), &format_antisym(&a)).unwrap();
        assert_eq!(AntisymMatrix::new(dim, data).unwrap(), a);
    }

    #[test]
    fn complex_round_trip_is_bit_exact() {
        let u = ComplexDense::from_fn(4, |i, j| C64::new(i as f64 / 3.0, -(j as f64) / 7.0));
        assert_eq!(parse_complex_matrix(p(), &format_complex(&u)).unwrap(), u);
    }

    #[test]
    fn params_round_trip_is_bit_exact() {
        let q = ParamVector::random_init(3, 4).unwrap();
        assert_eq!(parse_params(p(), &format_params(&q)).unwrap(), q);
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# header\n2\n\n0 1.5\n# mid\n-1.5 0\n";
        assert_eq!(parse_real_matrix(p(), text).unwrap(), (2, vec![0.0, 1.5, -1.5, 0.0]));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let line_of = |text: &str| match parse_real_matrix(p(), text) {
            Err(CliError::Parse { line, .. }) => line,
            other => panic!("{other:?}"),
        };
        assert_eq!(line_of("2\n0 1\n-1 x\n"), 3);
        assert_eq!(line_of("# c\n2\n0 1 2\n-1 0\n"), 3);
        assert_eq!(line_of("two\n"), 1);
        assert_eq!(line_of("2\n0 1\n"), 3);
        assert_eq!(line_of("2\n0 1\n-1 0\n5\n"), 4);
        assert_eq!(line_of("2\n0 nan\n-1 0\n"), 2);
    }

    #[test]
    fn complex_entries_accept_plain_reals() {
        let u = parse_complex_matrix(p(), "1\n0.5\n").unwrap();
        assert_eq!(u[(0, 0)], C64::new(0.5, 0.0));
    }
}
