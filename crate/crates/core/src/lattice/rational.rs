//! Dense matrices over the rationals, used where exact division is needed.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{IVec, IntegerMatrix};
use crate::error::{Error, Result};

pub type Rational = BigRational;
pub type QVec = Vec<BigRational>;

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn to_qvec(v: &[BigInt]) -> QVec {
    v.iter().map(|x| BigRational::from_integer(x.clone())).collect()
}

pub fn qdot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Smallest positive integer `k` with `k * v` integral, together with `k * v`.
pub fn clear_denominators(v: &[BigRational]) -> (BigInt, IVec) {
    use num_integer::Integer;
    let k = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let scaled = v.iter().map(|x| (x * BigRational::from_integer(k.clone())).to_integer()).collect();
    (k, scaled)
}

/// Positive rational multiple of `v` that is a primitive integer vector.
pub fn primitive_from_rational(v: &[BigRational]) -> IVec {
    let (_, scaled) = clear_denominators(v);
    super::primitive(scaled)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<BigRational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![BigRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = BigRational::one();
        }
        m
    }

    pub fn from_int(m: &IntegerMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.entries().iter().map(|x| BigRational::from_integer(x.clone())).collect(),
        }
    }

    pub fn at(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut BigRational {
        &mut self.entries[i * self.cols + j]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *t.at_mut(j, i) = self.at(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let p = a * other.at(k, j);
                    *out.at_mut(i, j) += p;
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[BigRational]) -> QVec {
        assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|i| qdot(&self.entries[i * self.cols..(i + 1) * self.cols], v)).collect()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|x| x * c).collect() }
    }

    /// `v^T A w`
    pub fn bilinear(&self, v: &[BigRational], w: &[BigRational]) -> BigRational {
        qdot(v, &self.apply(w))
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch { context: "inverse", expected: self.rows, found: self.cols });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !a.at(i, k).is_zero()) else {
                return Err(Error::InvalidData("singular matrix".into()));
            };
            if p != k {
                for j in 0..n {
                    a.entries.swap(k * n + j, p * n + j);
                    inv.entries.swap(k * n + j, p * n + j);
                }
            }
            let pivot = a.at(k, k).clone();
            for j in 0..n {
                *a.at_mut(k, j) /= &pivot;
                *inv.at_mut(k, j) /= &pivot;
            }
            for i in 0..n {
                if i == k || a.at(i, k).is_zero() {
                    continue;
                }
                let f = a.at(i, k).clone();
                for j in 0..n {
                    let da = &f * a.at(k, j);
                    *a.at_mut(i, j) -= da;
                    let di = &f * inv.at(k, j);
                    *inv.at_mut(i, j) -= di;
                }
            }
        }
        Ok(inv)
    }

    /// Solves `A x = b` for square nonsingular `A`.
    pub fn solve(&self, b: &[BigRational]) -> Result<QVec> {
        Ok(self.inverse()?.apply(b))
    }

    pub fn to_integer(&self) -> Option<IntegerMatrix> {
        if self.entries.iter().any(|x| !x.is_integer()) {
            return None;
        }
        IntegerMatrix::from_entries(self.rows, self.cols, self.entries.iter().map(|x| x.to_integer()).collect()).ok()
    }

    /// Least common multiple of all entry denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        use num_integer::Integer;
        self.entries.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
    }
}

/// Solves `A x = b` in least-squares-free sense for a full-column-rank `A`
/// (rows >= cols) when `b` lies in the column space; returns `None` otherwise.
pub fn solve_in_span(columns: &[QVec], b: &[BigRational]) -> Option<QVec> {
    let n = columns.len();
    let m = b.len();
    // Augmented row reduction on [A | b].
    let mut rows: Vec<QVec> = (0..m)
        .map(|i| {
            let mut r: QVec = columns.iter().map(|c| c[i].clone()).collect();
            r.push(b[i].clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..m).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let pv = rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x /= &pv;
        }
        for i in 0..m {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                let pivot_row = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(pivot_row.iter()) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[n].is_zero()) {
        return None;
    }
    if pivots.len() < n {
        return None;
    }
    let mut x = vec![BigRational::zero(); n];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = rows[i][n].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_form() {
        let a = RatMatrix::from_int(&IntegerMatrix::from_i64(&[&[2, 1], &[1, 2]]));
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), RatMatrix::identity(2));
        assert_eq!(inv.at(0, 0), &rat(2, 3));
    }

    #[test]
    fn span_solve() {
        let cols = vec![to_qvec(&super::super::ivec(&[1, 0, 1])), to_qvec(&super::super::ivec(&[0, 1, 1]))];
        let x = solve_in_span(&cols, &to_qvec(&super::super::ivec(&[2, 3, 5]))).unwrap();
        assert_eq!(x, vec![rat(2, 1), rat(3, 1)]);
        assert!(solve_in_span(&cols, &to_qvec(&super::super::ivec(&[1, 1, 0]))).is_none());
    }
}
