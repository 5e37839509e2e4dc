//! Dense matrices over GF(q) with exact elimination.

use std::fmt;

use thiserror::Error;

use crate::gf::{Field, GfError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrices are defined over different fields")]
    FieldMismatch,
    #[error("matrix has no rows or no columns")]
    Empty,
    #[error("malformed matrix text: {0}")]
    Parse(String),
    #[error(transparent)]
    Gf(#[from] GfError),
}

/// Row-major dense matrix over a finite field.
#[derive(Clone, PartialEq, Eq)]
pub struct MatrixGF {
    rows: usize,
    cols: usize,
    data: Vec<u8>,
    field: Field,
}

impl MatrixGF {
    pub fn new(field: &Field, rows: usize, cols: usize, data: Vec<u8>) -> Result<Self, MatrixError> {
        if data.len() != rows * cols {
            return Err(MatrixError::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(&bad) = data.iter().find(|&&v| v as usize >= field.order()) {
            return Err(GfError::Parse(bad.to_string(), field.order()).into());
        }
        Ok(MatrixGF {
            rows,
            cols,
            data,
            field: field.clone(),
        })
    }

    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Self {
        MatrixGF {
            rows,
            cols,
            data: vec![0; rows * cols],
            field: field.clone(),
        }
    }

    pub fn identity(field: &Field, k: usize) -> Self {
        let mut m = Self::zeros(field, k, k);
        for i in 0..k {
            m.data[i * k + i] = 1;
        }
        m
    }

    pub fn from_rows(field: &Field, rows: &[Vec<u8>]) -> Result<Self, MatrixError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(MatrixError::Dimension("ragged rows".into()));
        }
        Self::new(field, rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u8) {
        debug_assert!((v as usize) < self.field.order());
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[u8]> {
        // chunks_exact panics on zero width
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn nonzero_rows(&self) -> usize {
        self.row_iter().filter(|r| r.iter().any(|&v| v != 0)).count()
    }

    fn check_same_shape(&self, other: &Self) -> Result<(), MatrixError> {
        if self.field != other.field {
            return Err(MatrixError::FieldMismatch);
        }
        if self.rows != other.rows || self.cols != other.cols {
            return Err(MatrixError::Dimension(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, MatrixError> {
        self.check_same_shape(other)?;
        let f = &self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(MatrixGF { data, ..self.clone() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, MatrixError> {
        self.check_same_shape(other)?;
        let f = &self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.sub(a, b)).collect();
        Ok(MatrixGF { data, ..self.clone() })
    }

    pub fn scale(&self, c: u8) -> Self {
        let data = self.data.iter().map(|&a| self.field.mul(c, a)).collect();
        MatrixGF { data, ..self.clone() }
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &Self) -> Result<Self, MatrixError> {
        if self.field != other.field {
            return Err(MatrixError::FieldMismatch);
        }
        if self.cols != other.rows {
            return Err(MatrixError::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = f.add(out.get(i, j), f.mul(a, other.get(l, j)));
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Rank by exact elimination.
    pub fn rank(&self) -> usize {
        let mut ech = RowEchelon::new(&self.field, self.cols);
        for r in self.row_iter() {
            ech.insert(r);
        }
        ech.dim()
    }

    /// Reduced row echelon form with zero rows dropped.
    ///
    /// Pivots are taken left to right; within a column the first row at or
    /// below the current pivot row with a nonzero entry is used.
    pub fn rref(&self) -> Self {
        let f = &self.field;
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            if rank == m.rows {
                break;
            }
            let Some(pivot) = (rank..m.rows).find(|&r| m.get(r, col) != 0) else {
                continue;
            };
            if pivot != rank {
                for j in 0..m.cols {
                    m.data.swap(pivot * m.cols + j, rank * m.cols + j);
                }
            }
            let inv = f.inv(m.get(rank, col)).unwrap();
            for j in col..m.cols {
                let v = f.mul(inv, m.get(rank, j));
                m.set(rank, j, v);
            }
            for r in 0..m.rows {
                let c = m.get(r, col);
                if r == rank || c == 0 {
                    continue;
                }
                for j in col..m.cols {
                    let v = f.sub(m.get(r, j), f.mul(c, m.get(rank, j)));
                    m.set(r, j, v);
                }
            }
            rank += 1;
        }
        m.data.truncate(rank * m.cols);
        m.rows = rank;
        m
    }

    /// Diagonal re-embedding: row i is moved i columns to the right, giving an
    /// `a x (a+b-1)` matrix.
    pub fn shift(&self) -> Result<Self, MatrixError> {
        if self.rows == 0 || self.cols == 0 {
            return Err(MatrixError::Empty);
        }
        let width = self.rows + self.cols - 1;
        let mut out = Self::zeros(&self.field, self.rows, width);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j + i, self.get(i, j));
            }
        }
        Ok(out)
    }

    /// Horizontal block concatenation `(B_1 | B_2 | ...)`.
    pub fn hconcat(blocks: &[&MatrixGF]) -> Result<Self, MatrixError> {
        let first = blocks.first().ok_or(MatrixError::Empty)?;
        let rows = first.rows;
        let field = &first.field;
        for b in blocks {
            if b.field != *field {
                return Err(MatrixError::FieldMismatch);
            }
            if b.rows != rows {
                return Err(MatrixError::Dimension(format!(
                    "hconcat of blocks with {} and {} rows",
                    rows, b.rows
                )));
            }
        }
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for b in blocks {
                data.extend_from_slice(b.row(i));
            }
        }
        Ok(MatrixGF {
            rows,
            cols,
            data,
            field: field.clone(),
        })
    }

    /// Vertical stacking of blocks with equal column counts.
    pub fn vstack(blocks: &[&MatrixGF]) -> Result<Self, MatrixError> {
        let first = blocks.first().ok_or(MatrixError::Empty)?;
        let cols = first.cols;
        let field = &first.field;
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            if b.field != *field {
                return Err(MatrixError::FieldMismatch);
            }
            if b.cols != cols {
                return Err(MatrixError::Dimension(format!(
                    "vstack of blocks with {} and {} columns",
                    cols, b.cols
                )));
            }
            data.extend_from_slice(&b.data);
            rows += b.rows;
        }
        Ok(MatrixGF {
            rows,
            cols,
            data,
            field: field.clone(),
        })
    }

    /// Appends `extra` zero columns on the right.
    pub fn pad_cols(&self, extra: usize) -> Self {
        let zero = Self::zeros(&self.field, self.rows, extra);
        if self.rows == 0 {
            return Self::zeros(&self.field, 0, self.cols + extra);
        }
        Self::hconcat(&[self, &zero]).expect("same row count and field")
    }

    /// One row per line, entries separated by single spaces.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in self.row_iter() {
            let line: Vec<String> = r.iter().map(|&v| self.field.encode(v)).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parses the format written by [`MatrixGF::to_text`]; `cols` is required
    /// so that an all-empty input still has a well-defined width.
    pub fn parse_rows<'a>(
        field: &Field,
        cols: usize,
        lines: impl IntoIterator<Item = &'a str>,
    ) -> Result<Self, MatrixError> {
        let mut data = Vec::new();
        let mut rows = 0;
        for line in lines {
            let entries: Vec<&str> = line.split_whitespace().collect();
            if entries.len() != cols {
                return Err(MatrixError::Parse(format!(
                    "expected {cols} entries, found {} in {line:?}",
                    entries.len()
                )));
            }
            for e in entries {
                data.push(field.decode(e)?);
            }
            rows += 1;
        }
        Self::new(field, rows, cols, data)
    }
}

impl fmt::Debug for MatrixGF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MatrixGF {}x{} over {:?}", self.rows, self.cols, self.field)?;
        f.write_str(&self.to_text())
    }
}

/// Incrementally maintained echelon basis of a row space.
///
/// Rows are kept sorted by pivot column, normalised to a leading one, with
/// zeros to the left of each pivot. Reducing a vector against them in pivot
/// order leaves it in the complement of the span, which makes insertion and
/// membership tests a single pass.
#[derive(Clone, Debug)]
pub struct RowEchelon {
    field: Field,
    cols: usize,
    rows: Vec<Vec<u8>>,
    pivots: Vec<usize>,
}

impl RowEchelon {
    pub fn new(field: &Field, cols: usize) -> Self {
        RowEchelon {
            field: field.clone(),
            cols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    fn reduce(&self, v: &mut [u8]) {
        let f = &self.field;
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = v[p];
            if c == 0 {
                continue;
            }
            for j in p..self.cols {
                if row[j] != 0 {
                    v[j] = f.sub(v[j], f.mul(c, row[j]));
                }
            }
        }
    }

    /// Adds `row` to the span; returns whether the dimension grew.
    pub fn insert(&mut self, row: &[u8]) -> bool {
        debug_assert_eq!(row.len(), self.cols);
        let mut v = row.to_vec();
        self.reduce(&mut v);
        let Some(p) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = self.field.inv(v[p]).unwrap();
        for x in &mut v[p..] {
            *x = self.field.mul(inv, *x);
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.rows.insert(at, v);
        true
    }

    pub fn insert_matrix(&mut self, m: &MatrixGF) {
        for r in m.row_iter() {
            self.insert(r);
        }
    }

    pub fn contains(&self, row: &[u8]) -> bool {
        let mut v = row.to_vec();
        self.reduce(&mut v);
        v.iter().all(|&x| x == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf2() -> Field {
        Field::new(2, 1).unwrap()
    }

    #[test]
    fn rank_examples() {
        let f = gf2();
        assert_eq!(MatrixGF::zeros(&f, 3, 4).rank(), 0);
        assert_eq!(MatrixGF::identity(&f, 5).rank(), 5);
        // E_0 = (I_2 | O), E_1 = (O | I_2) with k=2, width 3
        let e0 = MatrixGF::from_rows(&f, &[vec![1, 0, 0], vec![0, 1, 0]]).unwrap();
        let e1 = MatrixGF::from_rows(&f, &[vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        assert_eq!(MatrixGF::vstack(&[&e0, &e1]).unwrap().rank(), 3);
    }

    #[test]
    fn rref_examples() {
        let f = gf2();
        let i3 = MatrixGF::identity(&f, 3);
        assert_eq!(i3.rref(), i3);
        let m = MatrixGF::from_rows(&f, &[vec![0, 1, 1], vec![0, 1, 0]]).unwrap();
        let expect = MatrixGF::from_rows(&f, &[vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        assert_eq!(m.rref(), expect);
        let f3 = Field::new(3, 1).unwrap();
        let dup = MatrixGF::from_rows(&f3, &[vec![0, 2, 1], vec![0, 2, 1]]).unwrap();
        assert_eq!(dup.rref(), MatrixGF::from_rows(&f3, &[vec![0, 1, 2]]).unwrap());
    }

    #[test]
    fn shift_examples() {
        let f = Field::new(5, 1).unwrap();
        let a = MatrixGF::from_rows(&f, &[vec![1, 2], vec![3, 4]]).unwrap();
        let expect = MatrixGF::from_rows(&f, &[vec![1, 2, 0], vec![0, 3, 4]]).unwrap();
        assert_eq!(a.shift().unwrap(), expect);
        let row = MatrixGF::from_rows(&f, &[vec![4, 0, 1]]).unwrap();
        assert_eq!(row.shift().unwrap(), row);
        assert_eq!(
            MatrixGF::zeros(&f, 3, 2).shift().unwrap(),
            MatrixGF::zeros(&f, 3, 4)
        );
        assert_eq!(MatrixGF::zeros(&f, 0, 2).shift(), Err(MatrixError::Empty));
    }

    #[test]
    fn block_composition() {
        let f = gf2();
        let e0 = MatrixGF::hconcat(&[&MatrixGF::identity(&f, 2), &MatrixGF::zeros(&f, 2, 1)]).unwrap();
        assert_eq!(e0, MatrixGF::from_rows(&f, &[vec![1, 0, 0], vec![0, 1, 0]]).unwrap());
        assert_eq!(MatrixGF::vstack(&[&e0]).unwrap(), e0);
        let bad = MatrixGF::zeros(&f, 3, 1);
        assert!(matches!(
            MatrixGF::hconcat(&[&e0, &bad]),
            Err(MatrixError::Dimension(_))
        ));
        let other = MatrixGF::zeros(&Field::new(3, 1).unwrap(), 2, 1);
        assert_eq!(MatrixGF::hconcat(&[&e0, &other]), Err(MatrixError::FieldMismatch));
    }

    #[test]
    fn text_round_trip_gf4() {
        let f = Field::new(2, 2).unwrap();
        let m = MatrixGF::from_rows(&f, &[vec![0, 3, 2], vec![1, 0, 3]]).unwrap();
        let text = m.to_text();
        assert_eq!(text, "00 11 10\n01 00 11\n");
        assert_eq!(MatrixGF::parse_rows(&f, 3, text.lines()).unwrap(), m);
    }

    #[test]
    fn echelon_membership() {
        let f = gf2();
        let mut e = RowEchelon::new(&f, 4);
        assert!(e.insert(&[0, 1, 1, 0]));
        assert!(e.insert(&[1, 1, 0, 0]));
        assert!(!e.insert(&[1, 0, 1, 0]));
        assert!(e.contains(&[1, 0, 1, 0]));
        assert!(!e.contains(&[0, 0, 0, 1]));
        assert_eq!(e.dim(), 2);
    }
}
