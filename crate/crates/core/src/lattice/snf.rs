use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{IVec, IntegerMatrix};

/// Smith normal form `U * A * V = D` with `U`, `V` unimodular.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: IntegerMatrix,
    pub d: IntegerMatrix,
    pub v: IntegerMatrix,
}

impl Smith {
    /// Diagonal entries `d_1 | d_2 | ...` including trailing zeros up to `min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols())).map(|i| self.d[(i, i)].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }
}

fn smallest_in(d: &IntegerMatrix, cells: impl Iterator<Item = (usize, usize)>) -> Option<(usize, usize)> {
    let mut best: Option<((usize, usize), BigInt)> = None;
    for (i, j) in cells {
        let x = &d[(i, j)];
        if x.is_zero() {
            continue;
        }
        let a = x.abs();
        if best.as_ref().is_none_or(|(_, b)| a < *b) {
            best = Some(((i, j), a));
        }
    }
    best.map(|(pos, _)| pos)
}

/// Smith normal form over the integers. The pivot is always the entry of
/// smallest absolute value in the active block.
pub fn smith_normal_form(a: &IntegerMatrix) -> Smith {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = IntegerMatrix::identity(m);
    let mut v = IntegerMatrix::identity(n);

    for t in 0..m.min(n) {
        let block = (t..m).flat_map(|i| (t..n).map(move |j| (i, j)));
        let Some((pi, pj)) = smallest_in(&d, block) else {
            break;
        };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);

        loop {
            let mut clean = true;
            for i in t + 1..m {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = -(&d[(i, t)] / &d[(t, t)]);
                d.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                if !d[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = -(&d[(t, j)] / &d[(t, t)]);
                d.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                if !d[(t, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                let line = (t..m).map(|i| (i, t)).chain((t + 1..n).map(|j| (t, j)));
                let (pi, pj) = smallest_in(&d, line).expect("pivot is nonzero");
                d.swap_rows(t, pi);
                u.swap_rows(t, pi);
                d.swap_cols(t, pj);
                v.swap_cols(t, pj);
                continue;
            }
            // Enforce divisibility of the remaining block by the pivot.
            let pivot = d[(t, t)].clone();
            let offender = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d[(i, j)].is_multiple_of(&pivot)));
            match offender {
                Some(i) => {
                    d.add_row_multiple(t, i, &BigInt::one());
                    u.add_row_multiple(t, i, &BigInt::one());
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    Smith { u, d, v }
}

/// Structure of the cokernel `Z^rows / image(f)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cokernel {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl Cokernel {
    pub fn is_torsion_free(&self) -> bool {
        self.torsion.is_empty()
    }
}

pub fn cokernel_invariants(f: &IntegerMatrix) -> Cokernel {
    let smith = smith_normal_form(f);
    let diag = smith.diagonal();
    let rank = diag.iter().filter(|x| !x.is_zero()).count();
    Cokernel { free_rank: f.rows() - rank, torsion: diag.into_iter().filter(|x| !x.is_zero() && !x.is_one()).collect() }
}

pub fn is_injective(f: &IntegerMatrix) -> bool {
    smith_normal_form(f).rank() == f.cols()
}

/// Basis of the saturated lattice `{x in Z^cols : A x = 0}`.
pub fn integer_kernel(a: &IntegerMatrix) -> Vec<IVec> {
    let smith = smith_normal_form(a);
    let rank = smith.rank();
    (rank..a.cols()).map(|j| smith.v.column(j)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(a: &IntegerMatrix) -> Smith {
        let s = smith_normal_form(a);
        assert_eq!(&(&s.u * a) * &s.v, s.d);
        assert!(s.u.is_unimodular());
        assert!(s.v.is_unimodular());
        assert!(s.d.is_diagonal());
        let diag = s.diagonal();
        for w in diag.windows(2) {
            if !w[1].is_zero() {
                assert!(w[1].is_multiple_of(&w[0]));
            } else {
                assert!(w[1].is_zero());
            }
        }
        s
    }

    #[test]
    fn identity_is_fixed() {
        let s = check(&IntegerMatrix::identity(3));
        assert_eq!(s.d, IntegerMatrix::identity(3));
    }

    #[test]
    fn diag_two_three() {
        let s = check(&IntegerMatrix::from_i64(&[&[2, 0], &[0, 3]]));
        assert_eq!(s.d, IntegerMatrix::from_i64(&[&[1, 0], &[0, 6]]));
    }

    #[test]
    fn column_vector() {
        let s = check(&IntegerMatrix::from_i64(&[&[1], &[1]]));
        assert_eq!(s.d, IntegerMatrix::from_i64(&[&[1], &[0]]));
    }

    #[test]
    fn known_four_by_four() {
        let a = IntegerMatrix::from_i64(&[&[-6, 111, -36, 6], &[5, -672, 210, 74], &[0, -255, 81, 24], &[-7, 255, -81, -10]]);
        let s = check(&a);
        assert_eq!(s.diagonal(), super::super::ivec(&[1, 3, 21, 0]));
    }

    #[test]
    fn cokernels() {
        let c = cokernel_invariants(&IntegerMatrix::from_i64(&[&[1]]));
        assert_eq!(c, Cokernel { free_rank: 0, torsion: vec![] });
        let c = cokernel_invariants(&IntegerMatrix::from_i64(&[&[2]]));
        assert_eq!(c.torsion, super::super::ivec(&[2]));
        let c = cokernel_invariants(&IntegerMatrix::from_i64(&[&[0], &[1]]));
        assert_eq!(c, Cokernel { free_rank: 1, torsion: vec![] });
    }

    #[test]
    fn injectivity() {
        assert!(is_injective(&IntegerMatrix::identity(2)));
        assert!(!is_injective(&IntegerMatrix::from_i64(&[&[0]])));
        assert!(is_injective(&IntegerMatrix::from_i64(&[&[0], &[1]])));
    }

    #[test]
    fn kernel_is_saturated() {
        let a = IntegerMatrix::from_i64(&[&[2, 4, 6]]);
        let k = integer_kernel(&a);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(a.apply(v).iter().all(Zero::is_zero));
        }
        let m = IntegerMatrix::from_columns(&k, 3).unwrap();
        assert_eq!(cokernel_invariants(&m).torsion.len(), 0);
    }
}
