//! File formats and command-line value syntax.
//!
//! * Matrices: JSON `{"n": N, "re": [...], "im": [...]}`, row-major.
//! * Grids: CSV with header `x,p,value`.
//! * Complex numbers: `re,im` (a bare `re` means im = 0). Inside a list of
//!   matrix entries each entry is `re:im`.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{CMatrix, MAX_HERMITE_INDEX};
use crate::su2::GroupElement;

/// Largest matrix dimension accepted when decoding.
pub const MAX_MATRIX_DIM: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub n: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::invalid("only square matrices are written"));
        }
        let n = m.nrows();
        let mut re = Vec::with_capacity(n * n);
        let mut im = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                re.push(m[(i, j)].re);
                im.push(m[(i, j)].im);
            }
        }
        Ok(MatrixJson { n, re, im })
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let n = self.n;
        if n > MAX_MATRIX_DIM {
            return Err(Error::invalid(format!("n = {n} exceeds {MAX_MATRIX_DIM}")));
        }
        if self.re.len() != n * n || self.im.len() != n * n {
            return Err(Error::invalid(format!(
                "expected {} entries in re and im, got {} and {}",
                n * n,
                self.re.len(),
                self.im.len()
            )));
        }
        Ok(CMatrix::from_fn(n, n, |i, j| Complex64::new(self.re[i * n + j], self.im[i * n + j])))
    }
}

pub fn matrix_to_json(m: &CMatrix) -> Result<String> {
    Ok(serde_json::to_string(&MatrixJson::from_matrix(m)?)?)
}

pub fn matrix_from_json(text: &str) -> Result<CMatrix> {
    let raw: MatrixJson = serde_json::from_str(text)?;
    raw.to_matrix()
}

/// Row-major `row,col,re,im` rows.
pub fn matrix_csv_string(m: &CMatrix) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["row", "col", "re", "im"]).map_err(csv_error)?;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let v = m[(i, j)];
            w.write_record([i.to_string(), j.to_string(), format_float(v.re), format_float(v.im)])
                .map_err(csv_error)?;
        }
    }
    let buf = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(buf).map_err(|e| Error::invalid(e.to_string()))
}

/// Hermite coefficients as a JSON array of `[re, im]` pairs.
pub fn parse_hermite_coeffs(text: &str) -> Result<Vec<Complex64>> {
    let raw: Vec<[f64; 2]> = serde_json::from_str(text)?;
    if raw.is_empty() {
        return Err(Error::invalid("at least one coefficient is required"));
    }
    if raw.len() > MAX_HERMITE_INDEX + 1 {
        return Err(Error::invalid(format!("at most {} coefficients are supported", MAX_HERMITE_INDEX + 1)));
    }
    Ok(raw.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
}

/// `1.0+0.5i`, `2.0-0.0i`.
pub fn format_complex(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{:?}{}{:?}i", z.re, sign, z.im.abs())
}

fn format_float(v: f64) -> String {
    // shortest representation that round-trips
    format!("{v:?}")
}

/// Writes `x,p,value` rows; an empty slice gives the header alone.
pub fn write_grid_csv<W: Write>(out: W, rows: &[(f64, f64, f64)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "p", "value"]).map_err(csv_error)?;
    for &(x, p, v) in rows {
        w.write_record([format_float(x), format_float(p), format_float(v)]).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn grid_csv_string(rows: &[(f64, f64, f64)]) -> Result<String> {
    let mut buf = Vec::new();
    write_grid_csv(&mut buf, rows)?;
    String::from_utf8(buf).map_err(|e| Error::invalid(e.to_string()))
}

pub fn read_grid_csv(text: &str) -> Result<Vec<(f64, f64, f64)>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let headers = r.headers().map_err(csv_error)?.clone();
    if headers.iter().collect::<Vec<_>>() != ["x", "p", "value"] {
        return Err(Error::parse(0, "header must be x,p,value"));
    }
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record.map_err(csv_error)?;
        let pos = record.position().map(|p| p.byte() as usize).unwrap_or(0);
        if record.len() != 3 {
            return Err(Error::parse(pos, format!("expected 3 fields, got {}", record.len())));
        }
        let mut vals = [0.0; 3];
        for (slot, field) in vals.iter_mut().zip(record.iter()) {
            *slot = field
                .trim()
                .parse()
                .map_err(|_| Error::parse(pos, format!("not a number: {field:?}")))?;
        }
        rows.push((vals[0], vals[1], vals[2]));
    }
    Ok(rows)
}

fn csv_error(e: csv::Error) -> Error {
    let pos = e.position().map(|p| p.byte() as usize).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::parse(pos, format!("{other:?}")),
    }
}

fn parse_f64(s: &str, offset: usize) -> Result<f64> {
    let t = s.trim();
    let v: f64 = t.parse().map_err(|_| Error::parse(offset, format!("not a number: {t:?}")))?;
    if !v.is_finite() {
        return Err(Error::parse(offset, "number must be finite"));
    }
    Ok(v)
}

fn parse_pair(s: &str, sep: char, offset: usize) -> Result<Complex64> {
    match s.split_once(sep) {
        Some((re, im)) => {
            if im.contains(sep) {
                return Err(Error::parse(offset + re.len() + 1, format!("too many '{sep}' separators")));
            }
            Ok(Complex64::new(parse_f64(re, offset)?, parse_f64(im, offset + re.len() + 1)?))
        }
        None => Ok(Complex64::new(parse_f64(s, offset)?, 0.0)),
    }
}

/// "re,im" or "re".
pub fn parse_complex(s: &str) -> Result<Complex64> {
    parse_pair(s, ',', 0)
}

/// Comma-separated entries, each "re:im" or "re".
pub fn parse_complex_list(s: &str) -> Result<Vec<Complex64>> {
    let mut out = Vec::new();
    let mut offset = 0;
    for part in s.split(',') {
        out.push(parse_pair(part, ':', offset)?);
        offset += part.len() + 1;
    }
    Ok(out)
}

/// "a,b,c,d" row-major with complex entries "re:im"; det must be 1.
pub fn parse_group_element(s: &str) -> Result<GroupElement> {
    let v = parse_complex_list(s)?;
    if v.len() != 4 {
        return Err(Error::parse(0, format!("expected 4 entries, got {}", v.len())));
    }
    GroupElement::classify([[v[0], v[1]], [v[2], v[3]]])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip() {
        let m = CMatrix::from_fn(3, 3, |i, j| Complex64::new(i as f64 * 0.1 + 1e-17, j as f64 / 3.0));
        let s = matrix_to_json(&m).unwrap();
        assert_eq!(matrix_from_json(&s).unwrap(), m);
        assert!(s.starts_with(r#"{"n":3,"re":["#));
        assert!(matrix_from_json(r#"{"n":2,"re":[1,2,3],"im":[0,0,0,0]}"#).is_err());
        assert!(matrix_from_json(r#"{"n":1,"re":[1],"im":[0],"x":1}"#).is_err());
        assert!(matrix_from_json(r#"{"n":99999,"re":[],"im":[]}"#).is_err());
        assert!(matrix_to_json(&CMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn matrix_csv_and_complex_format() {
        let m = CMatrix::from_fn(2, 2, |i, j| Complex64::new(i as f64, -(j as f64)));
        assert_eq!(matrix_csv_string(&m).unwrap(), "row,col,re,im\n0,0,0.0,-0.0\n0,1,0.0,-1.0\n1,0,1.0,-0.0\n1,1,1.0,-1.0\n");
        assert_eq!(format_complex(Complex64::new(1.0, 0.0)), "1.0+0.0i");
        assert_eq!(format_complex(Complex64::new(-0.5, -2.0)), "-0.5-2.0i");
    }

    #[test]
    fn hermite_coeff_files() {
        let v = parse_hermite_coeffs("[[1, 0], [0.5, -0.5]]").unwrap();
        assert_eq!(v, vec![Complex64::new(1.0, 0.0), Complex64::new(0.5, -0.5)]);
        assert!(parse_hermite_coeffs("[]").is_err());
        assert!(parse_hermite_coeffs("[[1]]").is_err());
        assert!(parse_hermite_coeffs("{}").is_err());
    }

    #[test]
    fn grid_csv() {
        assert_eq!(grid_csv_string(&[]).unwrap(), "x,p,value\n");
        let rows = vec![(0.1, -2.0, 1e-300), (3.0, 0.5, 0.25)];
        let s = grid_csv_string(&rows).unwrap();
        assert_eq!(s, "x,p,value\n0.1,-2.0,1e-300\n3.0,0.5,0.25\n");
        assert_eq!(read_grid_csv(&s).unwrap(), rows);
        assert!(read_grid_csv("a,b,c\n1,2,3\n").is_err());
        assert!(read_grid_csv("x,p,value\n1,2\n").is_err());
        assert!(read_grid_csv("x,p,value\n1,2,zz\n").is_err());
        assert!(read_grid_csv("").is_err());
    }

    #[test]
    fn complex_syntax() {
        assert_eq!(parse_complex("1,0").unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(parse_complex(" -0.5 , 2e-3").unwrap(), Complex64::new(-0.5, 2e-3));
        assert_eq!(parse_complex("3").unwrap(), Complex64::new(3.0, 0.0));
        assert!(matches!(parse_complex("1,2,3"), Err(Error::Parse { position: 2, .. })));
        assert!(matches!(parse_complex("1,x"), Err(Error::Parse { position: 2, .. })));
        assert!(parse_complex("nan").is_err());
        let v = parse_complex_list("1:0,0:2,3").unwrap();
        assert_eq!(v, vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0), Complex64::new(3.0, 0.0)]);
    }

    #[test]
    fn group_element_syntax() {
        let g = parse_group_element("0:1,0,0,0:-1").unwrap();
        assert_eq!(g.tag(), crate::su2::GroupTag::Su2);
        let g = parse_group_element("2,0,0,0.5").unwrap();
        assert_eq!(g.tag(), crate::su2::GroupTag::Sl2c);
        assert!(parse_group_element("1,1,1,1").is_err());
        assert!(parse_group_element("1,0,0").is_err());
    }
}
