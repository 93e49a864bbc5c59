//! Exact integer linear algebra: matrices, lattices, normal forms and group actions.
//!
//! Matrices act on column vectors. A matrix with `cols` columns is a map
//! `Z^cols -> Z^rows`; composition `A * B` applies `B` first.

mod group;
mod hnf;
pub mod rational;
mod snf;

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use group::{group_closure, AffineAction, AffineElement, GroupAction, DEFAULT_CLOSURE_BOUND};
pub use hnf::{lattice_basis, CosetReducer};
pub use snf::{cokernel_invariants, integer_kernel, is_injective, smith_normal_form, Cokernel, Smith};

/// Integer column vector.
pub type IVec = Vec<BigInt>;

pub fn ivec(values: &[i64]) -> IVec {
    values.iter().map(|&v| BigInt::from(v)).collect()
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn gcd_of(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

/// Divides out the content of `v`. The zero vector is returned unchanged.
pub fn primitive(mut v: IVec) -> IVec {
    let g = gcd_of(&v);
    if !g.is_zero() && !g.is_one() {
        for x in v.iter_mut() {
            *x /= &g;
        }
    }
    v
}

pub fn is_zero_vec(v: &[BigInt]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Exact integer matrix stored row-major.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch { context: "matrix entries", expected: rows * cols, found: entries.len() });
        }
        Ok(Self { rows, cols, entries })
    }

    /// Builds a matrix from rows; every row must have length `cols`.
    pub fn from_rows(rows: &[IVec], cols: usize) -> Result<Self> {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch { context: "matrix row", expected: cols, found: row.len() });
            }
            entries.extend(row.iter().cloned());
        }
        Ok(Self { rows: rows.len(), cols, entries })
    }

    /// Convenience constructor for tests and literals. Panics on ragged input.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows: Vec<IVec> = rows.iter().map(|r| ivec(r)).collect();
        Self::from_rows(&rows, cols).expect("ragged matrix literal")
    }

    /// Matrix whose columns are the given vectors of length `dim`.
    pub fn from_columns(columns: &[IVec], dim: usize) -> Result<Self> {
        Ok(Self::from_rows(columns, dim)?.transpose())
    }

    pub fn diagonal(values: &[BigInt]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = v.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vec(&self, i: usize) -> IVec {
        self.row(i).to_vec()
    }

    pub fn column(&self, j: usize) -> IVec {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<IVec> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn row_vecs(&self) -> Vec<IVec> {
        (0..self.rows).map(|i| self.row_vec(i)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn apply(&self, v: &[BigInt]) -> IVec {
        assert_eq!(v.len(), self.cols, "vector length does not match matrix columns");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { context: "matrix product", expected: self.cols, found: other.rows });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * &other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[target] += factor * row[source]
    pub fn add_row_multiple(&mut self, target: usize, source: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let delta = &self[(source, j)] * factor;
            self[(target, j)] += delta;
        }
    }

    /// col[target] += factor * col[source]
    pub fn add_col_multiple(&mut self, target: usize, source: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let delta = &self[(i, source)] * factor;
            self[(i, target)] += delta;
        }
    }

    pub fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -std::mem::take(&mut self[(i, j)]);
            self[(i, j)] = v;
        }
    }

    pub fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -std::mem::take(&mut self[(i, j)]);
            self[(i, j)] = v;
        }
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<BigInt> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                context: "determinant of non-square matrix",
                expected: self.rows,
                found: self.cols,
            });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if m[(k, k)].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !m[(i, k)].is_zero()) else {
                    return Ok(BigInt::zero());
                };
                m.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&m[(i, j)] * &m[(k, k)] - &m[(i, k)] * &m[(k, j)]) / &prev;
                    m[(i, j)] = v;
                }
            }
            prev = m[(k, k)].clone();
        }
        Ok(sign * &m[(n - 1, n - 1)])
    }

    pub fn rank(&self) -> usize {
        smith_normal_form(self).rank()
    }

    pub fn is_unimodular(&self) -> bool {
        self.is_square() && self.determinant().map(|d| d.abs().is_one()).unwrap_or(false)
    }

    /// Inverse of a unimodular matrix.
    pub fn unimodular_inverse(&self) -> Result<Self> {
        if !self.is_unimodular() {
            return Err(Error::NotUnimodular { name: "matrix".into() });
        }
        let inv = rational::RatMatrix::from_int(self).inverse()?;
        inv.to_integer().ok_or_else(|| Error::Internal("inverse of unimodular matrix is not integral".into()))
    }

    /// Leading principal minors `det(A[0..k, 0..k])` for `k = 1..=n`.
    pub fn leading_minors(&self) -> Vec<BigInt> {
        let n = self.rows.min(self.cols);
        (1..=n)
            .map(|k| {
                let sub: Vec<IVec> = (0..k).map(|i| self.row(i)[..k].to_vec()).collect();
                Self::from_rows(&sub, k).and_then(|m| m.determinant()).expect("square minor")
            })
            .collect()
    }

    /// Symmetric positive definiteness via Sylvester's criterion.
    /// Returns the 1-based index of the first non-positive leading minor on failure.
    pub fn positive_definite_witness(&self) -> std::result::Result<(), (usize, BigInt)> {
        for (k, m) in self.leading_minors().into_iter().enumerate() {
            if !m.is_positive() {
                return Err((k + 1, m));
            }
        }
        Ok(())
    }

    /// Block-diagonal sum `diag(self, other)`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out[(self.rows + i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        out
    }

    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        use num_traits::ToPrimitive;
        (0..self.rows).map(|i| self.row(i).iter().map(|x| x.to_i64()).collect()).collect()
    }
}

impl Index<(usize, usize)> for IntegerMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntegerMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.entries[i * self.cols + j]
    }
}

impl Mul for &IntegerMatrix {
    type Output = IntegerMatrix;
    fn mul(self, rhs: &IntegerMatrix) -> IntegerMatrix {
        self.checked_mul(rhs).expect("matrix dimensions agree")
    }
}

impl fmt::Debug for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, x) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LatticeLabel {
    X,
    Y,
    Xdual,
    M,
    N,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lattice {
    pub rank: usize,
    pub label: LatticeLabel,
}

impl Lattice {
    pub fn new(rank: usize, label: LatticeLabel) -> Self {
        Self { rank, label }
    }

    /// `M = X (+) Z` for a character lattice of the given toric rank.
    pub fn m(toric_rank: usize) -> Self {
        Self::new(toric_rank + 1, LatticeLabel::M)
    }

    /// `N = X^dual (+) Z`.
    pub fn n(toric_rank: usize) -> Self {
        Self::new(toric_rank + 1, LatticeLabel::N)
    }

    pub fn dual(&self) -> Self {
        let label = match self.label {
            LatticeLabel::X => LatticeLabel::Xdual,
            LatticeLabel::Xdual => LatticeLabel::X,
            LatticeLabel::M => LatticeLabel::N,
            LatticeLabel::N => LatticeLabel::M,
            LatticeLabel::Y => LatticeLabel::Y,
        };
        Self::new(self.rank, label)
    }
}

/// Residue characteristic and data of the tame extension `L/K`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundData {
    pub residue_char: u64,
    pub ramification_index: u64,
    pub uniformizer: String,
}

impl GroundData {
    pub fn new(residue_char: u64, ramification_index: u64, uniformizer: impl Into<String>) -> Result<Self> {
        if residue_char != 0 && !is_prime(residue_char) {
            return Err(Error::InvalidData(format!("residue characteristic {residue_char} is neither 0 nor prime")));
        }
        if ramification_index == 0 {
            return Err(Error::InvalidData("ramification index must be at least 1".into()));
        }
        Ok(Self { residue_char, ramification_index, uniformizer: uniformizer.into() })
    }

    pub fn with_residue_char(residue_char: u64) -> Result<Self> {
        Self::new(residue_char, 1, "pi")
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_small() {
        let a = IntegerMatrix::from_i64(&[&[2, 1], &[1, 2]]);
        assert_eq!(a.determinant().unwrap(), BigInt::from(3));
        let b = IntegerMatrix::from_i64(&[&[0, 1, 2], &[1, 0, 3], &[4, -3, 8]]);
        assert_eq!(b.determinant().unwrap(), BigInt::from(-2));
        assert_eq!(IntegerMatrix::zeros(0, 0).determinant().unwrap(), BigInt::one());
    }

    #[test]
    fn unimodular_inverse_roundtrip() {
        let a = IntegerMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        let inv = a.unimodular_inverse().unwrap();
        assert_eq!(&a * &inv, IntegerMatrix::identity(2));
        assert!(IntegerMatrix::from_i64(&[&[2]]).unimodular_inverse().is_err());
    }

    #[test]
    fn sylvester_reports_failing_minor() {
        let ok = IntegerMatrix::from_i64(&[&[2, 1], &[1, 2]]);
        assert!(ok.positive_definite_witness().is_ok());
        let bad = IntegerMatrix::from_i64(&[&[1, 2], &[2, 1]]);
        assert_eq!(bad.positive_definite_witness().unwrap_err().0, 2);
        let zero = IntegerMatrix::from_i64(&[&[0]]);
        assert_eq!(zero.positive_definite_witness().unwrap_err().0, 1);
    }

    #[test]
    fn ground_data_validation() {
        assert!(GroundData::with_residue_char(0).is_ok());
        assert!(GroundData::with_residue_char(7).is_ok());
        assert!(GroundData::with_residue_char(9).is_err());
        assert!(GroundData::new(2, 0, "pi").is_err());
    }
}
