//! Dense exact Gaussian elimination over a [`Field`].
//!
//! Rows are inserted one at a time into an echelon form, so kernels of tall
//! matrices (many constraints, few unknowns) never materialise the full
//! constraint matrix.

use crate::error::{Error, Result};
use crate::scalars::{Field, Scalar};

/// Reduced row echelon form built incrementally.
#[derive(Clone, Debug)]
pub struct Echelon {
    field: Field,
    cols: usize,
    /// Each row is normalised so its pivot entry is one; sorted by pivot.
    rows: Vec<(usize, Vec<Scalar>)>,
}

impl Echelon {
    pub fn new(field: Field, cols: usize) -> Echelon {
        Echelon { field, cols, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Reduces `row` against the current basis; returns the remainder.
    pub fn reduce(&self, mut row: Vec<Scalar>) -> Vec<Scalar> {
        for (pivot, basis) in &self.rows {
            let c = row[*pivot].clone();
            if c.is_zero() {
                continue;
            }
            for (x, b) in row.iter_mut().zip(basis).skip(*pivot) {
                if !b.is_zero() {
                    *x -= &(&c * b);
                }
            }
        }
        row
    }

    /// Inserts a row; returns `true` when it raised the rank.
    pub fn insert(&mut self, row: Vec<Scalar>) -> bool {
        assert_eq!(row.len(), self.cols, "row length mismatch");
        let mut row = self.reduce(row);
        let Some(pivot) = row.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = row[pivot].inv().expect("pivot is non-zero");
        for x in row.iter_mut().skip(pivot) {
            if !x.is_zero() {
                *x = &*x * &inv;
            }
        }
        // keep the form fully reduced
        for (_, basis) in self.rows.iter_mut() {
            let c = basis[pivot].clone();
            if c.is_zero() {
                continue;
            }
            for (x, r) in basis.iter_mut().zip(&row).skip(pivot) {
                if !r.is_zero() {
                    *x -= &(&c * r);
                }
            }
        }
        let at = self.rows.partition_point(|(p, _)| *p < pivot);
        self.rows.insert(at, (pivot, row));
        true
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.cols
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|(p, _)| *p).collect()
    }

    /// Basis of `{v : row . v = 0 for every inserted row}`.
    pub fn nullspace(&self) -> Vec<Vec<Scalar>> {
        let pivots = self.pivots();
        let mut free = vec![true; self.cols];
        for &p in &pivots {
            free[p] = false;
        }
        let mut out = Vec::new();
        for f in (0..self.cols).filter(|&c| free[c]) {
            let mut v = vec![self.field.zero(); self.cols];
            v[f] = self.field.one();
            for (p, row) in &self.rows {
                v[*p] = -&row[f];
            }
            out.push(v);
        }
        out
    }
}

/// Rank of a dense matrix given by rows.
pub fn rank(field: Field, cols: usize, rows: impl IntoIterator<Item = Vec<Scalar>>) -> usize {
    let mut e = Echelon::new(field, cols);
    for r in rows {
        if e.is_full() {
            break;
        }
        e.insert(r);
    }
    e.rank()
}

/// Kernel basis of the matrix with the given rows.
pub fn nullspace(
    field: Field,
    cols: usize,
    rows: impl IntoIterator<Item = Vec<Scalar>>,
) -> Vec<Vec<Scalar>> {
    let mut e = Echelon::new(field, cols);
    for r in rows {
        if e.is_full() {
            break;
        }
        e.insert(r);
    }
    e.nullspace()
}

/// Inverse of a square matrix.
pub fn inverse(field: Field, m: &[Vec<Scalar>]) -> Result<Vec<Vec<Scalar>>> {
    let n = m.len();
    let mut e = Echelon::new(field, 2 * n);
    for (i, row) in m.iter().enumerate() {
        let mut r = row.clone();
        r.extend((0..n).map(|j| if i == j { field.one() } else { field.zero() }));
        e.insert(r);
    }
    let rows = &e.rows;
    if rows.len() < n || rows.iter().take(n).enumerate().any(|(i, (p, _))| *p != i) {
        return Err(Error::DegenerateForm);
    }
    Ok(rows.iter().take(n).map(|(_, r)| r[n..].to_vec()).collect())
}

/// Solves `x . basis = target` for the coefficient vector `x`, where `basis`
/// is a list of vectors; `None` when `target` is outside their span.
#[derive(Clone, Debug)]
pub struct SpanSolver {
    field: Field,
    dim: usize,
    count: usize,
    echelon: Echelon,
}

impl SpanSolver {
    /// `vectors` must be linearly independent.
    pub fn new(field: Field, vectors: &[Vec<Scalar>]) -> Result<SpanSolver> {
        let dim = vectors.first().map_or(0, |v| v.len());
        let count = vectors.len();
        let mut echelon = Echelon::new(field, dim + count);
        for (i, v) in vectors.iter().enumerate() {
            let mut r = v.clone();
            r.extend((0..count).map(|j| if i == j { field.one() } else { field.zero() }));
            echelon.insert(r);
        }
        if echelon.rows.iter().filter(|(p, _)| *p < dim).count() != count {
            return Err(Error::Invalid("vectors are linearly dependent".into()));
        }
        Ok(SpanSolver { field, dim, count, echelon })
    }

    pub fn solve(&self, target: &[Scalar]) -> Option<Vec<Scalar>> {
        let mut r = target.to_vec();
        r.extend((0..self.count).map(|_| self.field.zero()));
        let r = self.echelon.reduce(r);
        if r[..self.dim].iter().any(|x| !x.is_zero()) {
            return None;
        }
        // target - sum x_i v_i = 0 in the first block; tail holds -x
        Some(r[self.dim..].iter().map(|x| -x).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(field: Field, rows: &[&[i64]]) -> Vec<Vec<Scalar>> {
        rows.iter().map(|r| r.iter().map(|&x| field.int(x)).collect()).collect()
    }

    #[test]
    fn rank_depends_on_characteristic() {
        let rows = [&[1, 2][..], &[3, 1][..]];
        assert_eq!(rank(Field::Rational, 2, m(Field::Rational, &rows)), 2);
        // det = -5
        assert_eq!(rank(Field::Prime(5), 2, m(Field::Prime(5), &rows)), 1);
    }

    #[test]
    fn nullspace_is_annihilated() {
        let f = Field::Prime(7);
        let a = m(f, &[&[1, 2, 3, 4], &[2, 4, 6, 2], &[0, 0, 0, 0]]);
        let ker = nullspace(f, 4, a.clone());
        assert_eq!(ker.len(), 2);
        for v in &ker {
            for row in &a {
                let dot = row.iter().zip(v).fold(f.zero(), |s, (x, y)| s + x * y);
                assert!(dot.is_zero());
            }
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let f = Field::Rational;
        let a = m(f, &[&[0, 1, 0], &[1, 0, 0], &[0, 0, 2]]);
        let inv = inverse(f, &a).unwrap();
        assert_eq!(inv[2][2], f.parse("1/2").unwrap());
        assert_eq!(inv[0][1], f.one());
        let sing = m(f, &[&[1, 1], &[1, 1]]);
        assert_eq!(inverse(f, &sing), Err(Error::DegenerateForm));
    }

    #[test]
    fn span_solver() {
        let f = Field::Rational;
        let basis = m(f, &[&[1, 0, 1], &[0, 1, 1]]);
        let s = SpanSolver::new(f, &basis).unwrap();
        let x = s.solve(&m(f, &[&[2, 3, 5]])[0]).unwrap();
        assert_eq!(x, vec![f.int(2), f.int(3)]);
        assert!(s.solve(&m(f, &[&[0, 0, 1]])[0]).is_none());
    }
}
