use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::IVec;
use crate::error::{Error, Result};

fn sub_scaled(target: &mut IVec, source: &[BigInt], q: &BigInt) {
    for (t, s) in target.iter_mut().zip(source) {
        *t -= q * s;
    }
}

/// Canonical basis (row Hermite normal form) of the subgroup of `Z^dim`
/// spanned by `vectors`. Pivots are positive and entries above a pivot lie
/// in `[0, pivot)`.
pub fn lattice_basis(vectors: &[IVec], dim: usize) -> Vec<IVec> {
    let mut rows: Vec<IVec> = vectors.iter().filter(|v| v.iter().any(|x| !x.is_zero())).cloned().collect();
    debug_assert!(rows.iter().all(|r| r.len() == dim));
    let mut basis: Vec<IVec> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for col in 0..dim {
        // Euclid on the column among the remaining rows.
        loop {
            let nonzero: Vec<usize> = (0..rows.len()).filter(|&i| !rows[i][col].is_zero()).collect();
            if nonzero.len() <= 1 {
                break;
            }
            let p = *nonzero.iter().min_by_key(|&&i| rows[i][col].abs()).unwrap();
            let pivot_row = rows[p].clone();
            for &i in &nonzero {
                if i != p {
                    let q = rows[i][col].div_floor(&pivot_row[col]);
                    sub_scaled(&mut rows[i], &pivot_row, &q);
                }
            }
        }
        if let Some(i) = (0..rows.len()).find(|&i| !rows[i][col].is_zero()) {
            let mut row = rows.swap_remove(i);
            if row[col].is_negative() {
                row.iter_mut().for_each(|x| *x = -&*x);
            }
            basis.push(row);
            pivots.push(col);
        }
        rows.retain(|r| r.iter().any(|x| !x.is_zero()));
    }
    // Reduce entries above pivots.
    for k in 0..basis.len() {
        let col = pivots[k];
        let pivot_row = basis[k].clone();
        for i in 0..k {
            let q = basis[i][col].div_floor(&pivot_row[col]);
            if !q.is_zero() {
                sub_scaled(&mut basis[i], &pivot_row, &q);
            }
        }
    }
    basis
}

/// Canonical coset representatives for `Z^r / L`, `L` a full-rank sublattice.
#[derive(Clone, Debug)]
pub struct CosetReducer {
    basis: Vec<IVec>,
}

impl CosetReducer {
    pub fn new(generators: &[IVec], dim: usize) -> Result<Self> {
        let basis = lattice_basis(generators, dim);
        if basis.len() != dim {
            return Err(Error::InvalidData(format!("sublattice has rank {} but full rank {dim} is required", basis.len())));
        }
        Ok(Self { basis })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index(&self) -> BigInt {
        (0..self.dim()).map(|i| self.basis[i][i].clone()).product()
    }

    /// Unique representative of `x + L` with `0 <= x_i < h_ii`.
    pub fn reduce(&self, x: &[BigInt]) -> IVec {
        let mut x = x.to_vec();
        for (i, h) in self.basis.iter().enumerate() {
            let q = x[i].div_floor(&h[i]);
            if !q.is_zero() {
                sub_scaled(&mut x, h, &q);
            }
        }
        x
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        self.reduce(x).iter().all(Zero::is_zero)
    }

    /// All canonical representatives in lexicographic order.
    pub fn representatives(&self) -> Vec<IVec> {
        let mut out = vec![Vec::new()];
        for i in 0..self.dim() {
            let bound = &self.basis[i][i];
            let mut next = Vec::new();
            for prefix in &out {
                let mut k = BigInt::zero();
                while &k < bound {
                    let mut v: IVec = prefix.clone();
                    v.push(k.clone());
                    next.push(v);
                    k += 1;
                }
            }
            out = next;
        }
        out
    }
}
