//! Point sets and their CSV representation.
//!
//! A dataset CSV holds one point per row with `d` comma-separated decimal
//! columns. A first row that does not parse as numbers is treated as a header
//! and skipped.

use std::io::{Read, Write};
use std::path::Path;

use ndarray::{Array2, ArrayView1};

use crate::error::{invalid, Error, Result};

/// `n` points in `R^d`, stored row-major. Row `i` is point `x_i`; row order
/// is the identity of each point.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    points: Array2<f64>,
    ids: Option<Vec<String>>,
}

impl Dataset {
    pub fn new(points: Array2<f64>) -> Result<Self> {
        let (n, d) = points.dim();
        if n == 0 || d == 0 {
            return Err(Error::Empty);
        }
        check_finite(&points)?;
        Ok(Self {
            points: points.as_standard_layout().into_owned(),
            ids: None,
        })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Empty);
        }
        let d = rows[0].as_ref().len();
        let mut flat = Vec::with_capacity(n * d);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: format!("{d} columns"),
                    found: format!("{} columns in row {i}", row.len()),
                });
            }
            flat.extend_from_slice(row);
        }
        let points = Array2::from_shape_vec((n, d), flat).expect("shape checked above");
        Self::new(points)
    }

    /// One-dimensional dataset from scalar values.
    pub fn from_scalars(values: &[f64]) -> Result<Self> {
        let rows: Vec<[f64; 1]> = values.iter().map(|&v| [v]).collect();
        Self::from_rows(&rows)
    }

    pub fn with_ids(mut self, ids: Vec<String>) -> Result<Self> {
        if ids.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} ids", self.n()),
                found: format!("{} ids", ids.len()),
            });
        }
        self.ids = Some(ids);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.points.nrows()
    }

    pub fn d(&self) -> usize {
        self.points.ncols()
    }

    pub fn points(&self) -> &Array2<f64> {
        &self.points
    }

    pub fn point(&self, i: usize) -> ArrayView1<'_, f64> {
        self.points.row(i)
    }

    /// Row `i` as a contiguous slice.
    pub fn row(&self, i: usize) -> &[f64] {
        let d = self.d();
        &self.flat()[i * d..(i + 1) * d]
    }

    pub(crate) fn flat(&self) -> &[f64] {
        self.points.as_slice().expect("dataset is kept in standard layout")
    }

    pub fn ids(&self) -> Option<&[String]> {
        self.ids.as_deref()
    }

    /// `max(1, ‖X‖_F)`, the reference magnitude for absolute tolerances.
    pub fn scale(&self) -> f64 {
        let fro = self.flat().iter().map(|v| v * v).sum::<f64>().sqrt();
        fro.max(1.0)
    }

    pub fn max_pairwise_distance(&self) -> f64 {
        self.pairwise_distances().fold(0.0, f64::max)
    }

    /// Smallest distance over distinct indices; `0` when duplicates exist and
    /// `+inf` for a single point.
    pub fn min_pairwise_distance(&self) -> f64 {
        self.pairwise_distances().fold(f64::INFINITY, f64::min)
    }

    fn pairwise_distances(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.n();
        (0..n).flat_map(move |i| (0..i).map(move |j| dist(self.row(i), self.row(j))))
    }

    /// Arithmetic mean of all points.
    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.d()];
        for i in 0..self.n() {
            for (acc, v) in m.iter_mut().zip(self.row(i)) {
                *acc += v;
            }
        }
        let n = self.n() as f64;
        m.iter_mut().for_each(|v| *v /= n);
        m
    }

    /// Same points with `offset` added to each.
    pub fn translated(&self, offset: &[f64]) -> Result<Self> {
        if offset.len() != self.d() {
            return Err(Error::DimensionMismatch {
                expected: format!("offset of length {}", self.d()),
                found: format!("length {}", offset.len()),
            });
        }
        let mut points = self.points.clone();
        for mut row in points.rows_mut() {
            for (v, t) in row.iter_mut().zip(offset) {
                *v += t;
            }
        }
        Self::new(points)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !factor.is_finite() {
            return Err(invalid("factor", "must be finite"));
        }
        Self::new(&self.points * factor)
    }

    /// Concatenate the rows of `other` after these.
    pub fn appended(&self, other: &Dataset) -> Result<Self> {
        if other.d() != self.d() {
            return Err(Error::DimensionMismatch {
                expected: format!("d = {}", self.d()),
                found: format!("d = {}", other.d()),
            });
        }
        let points = ndarray::concatenate(ndarray::Axis(0), &[self.points.view(), other.points.view()])
            .expect("column counts checked");
        Self::new(points)
    }

    /// Parse dataset CSV text.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut flat = Vec::new();
        let mut d = None;
        let mut n = 0;
        for (idx, record) in rdr.records().enumerate() {
            let record = record?;
            let line = record.position().map_or(idx + 1, |p| p.line() as usize);
            if record.iter().all(|f| f.is_empty()) {
                continue;
            }
            let parsed: std::result::Result<Vec<f64>, _> =
                record.iter().map(|f| f.parse::<f64>()).collect();
            let values = match parsed {
                Ok(values) => values,
                Err(_) if n == 0 && d.is_none() && idx == 0 => {
                    // header row
                    continue;
                }
                Err(e) => {
                    return Err(Error::Parse {
                        line,
                        reason: format!("non-numeric field: {e}"),
                    })
                }
            };
            match d {
                None => d = Some(values.len()),
                Some(d) if d != values.len() => {
                    return Err(Error::Parse {
                        line,
                        reason: format!("expected {d} columns, found {}", values.len()),
                    })
                }
                Some(_) => {}
            }
            if let Some(col) = values.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { row: n, col });
            }
            flat.extend(values);
            n += 1;
        }
        let d = d.ok_or(Error::Empty)?;
        let points = Array2::from_shape_vec((n, d), flat).expect("row lengths checked");
        Self::new(points)
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        Self::from_csv_reader(text.as_bytes())
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_csv_reader(std::io::BufReader::new(file))
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        write_matrix_csv(writer, &self.points)
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv output is ascii")
    }
}

/// Format a double with 17 significant digits, enough to round-trip exactly.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Write a matrix as headerless CSV in the round-trip-exact number format.
pub fn write_matrix_csv<W: Write>(mut writer: W, m: &Array2<f64>) -> Result<()> {
    let mut line = String::new();
    for row in m.rows() {
        line.clear();
        for (c, v) in row.iter().enumerate() {
            if c > 0 {
                line.push(',');
            }
            line.push_str(&format_f64(*v));
        }
        line.push('\n');
        writer.write_all(line.as_bytes())?;
    }
    Ok(())
}

pub(crate) fn check_finite(m: &Array2<f64>) -> Result<()> {
    for ((row, col), v) in m.indexed_iter() {
        if !v.is_finite() {
            return Err(Error::NonFinite { row, col });
        }
    }
    Ok(())
}

#[inline]
pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist_sq(a, b).sqrt()
}

#[inline]
pub(crate) fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub(crate) fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_row_is_skipped() {
        let ds = Dataset::from_csv_str("x,y\n1,2\n3,4\n").unwrap();
        assert_eq!(ds.n(), 2);
        assert_eq!(ds.row(1), &[3.0, 4.0]);
    }

    #[test]
    fn headerless_csv() {
        let ds = Dataset::from_csv_str("1.5\n-2\n1e3\n").unwrap();
        assert_eq!((ds.n(), ds.d()), (3, 1));
        assert_eq!(ds.row(2), &[1000.0]);
    }

    #[test]
    fn ragged_rows_rejected() {
        let err = Dataset::from_csv_str("1,2\n3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn non_numeric_after_first_row_rejected() {
        assert!(matches!(
            Dataset::from_csv_str("1,2\na,b\n"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn non_finite_rejected() {
        assert!(matches!(
            Dataset::from_csv_str("1,2\nnan,3\n"),
            Err(Error::NonFinite { row: 1, col: 0 })
        ));
        assert!(matches!(
            Dataset::from_rows(&[[f64::INFINITY]]),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn empty_rejected() {
        assert!(matches!(Dataset::from_csv_str(""), Err(Error::Empty)));
        assert!(matches!(Dataset::from_csv_str("a,b\n"), Err(Error::Empty)));
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let ds = Dataset::from_rows(&[[0.1, 1.0 / 3.0], [-2.5e-300, 1e300]]).unwrap();
        let back = Dataset::from_csv_str(&ds.to_csv_string()).unwrap();
        assert_eq!(ds, back);
    }

    #[test]
    fn pairwise_distances() {
        let ds = Dataset::from_scalars(&[0.0, 1.0, 3.0]).unwrap();
        assert_eq!(ds.max_pairwise_distance(), 3.0);
        assert_eq!(ds.min_pairwise_distance(), 1.0);
        assert_eq!(ds.scale(), 10f64.sqrt());
    }
}
