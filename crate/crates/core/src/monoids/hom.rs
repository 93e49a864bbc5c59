use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::hilbert::AffineMonoid;
use crate::error::{Error, Result};
use crate::lattice::rational::{solve_in_span, to_qvec, QVec};
use crate::lattice::{cokernel_invariants, is_injective, lattice_basis, Cokernel, IVec, IntegerMatrix};
use crate::polyhedra::{dual_cone, RationalCone};

/// A monoid homomorphism given by an integer matrix on the ambient lattices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonoidHom {
    pub source: AffineMonoid,
    pub target: AffineMonoid,
    /// `target_rank x source_rank`, acting on column vectors.
    pub matrix: IntegerMatrix,
    /// The induced map `source^gp -> target^gp` in the canonical bases of the group completions.
    pub gp_matrix: IntegerMatrix,
    /// Images of the source generators, each as coefficients over the target Hilbert basis.
    pub generator_images: Vec<Vec<BigInt>>,
}

fn group_coordinates(basis: &[IVec], v: &[BigInt]) -> Option<IVec> {
    let cols: Vec<QVec> = basis.iter().map(|b| to_qvec(b)).collect();
    let c = solve_in_span(&cols, &to_qvec(v))?;
    c.iter().all(|x| x.is_integer()).then(|| c.iter().map(|x| x.to_integer()).collect())
}

impl MonoidHom {
    pub fn new(source: AffineMonoid, target: AffineMonoid, matrix: IntegerMatrix) -> Result<Self> {
        let (sd, td) = (source.ambient().rank, target.ambient().rank);
        if matrix.rows() != td || matrix.cols() != sd {
            return Err(Error::DimensionMismatch { context: "monoid map", expected: td, found: matrix.rows() });
        }
        let mut generator_images = Vec::new();
        for h in source.hilbert_basis() {
            let image = matrix.apply(h);
            let c = target
                .decompose(&image)
                .ok_or_else(|| Error::InvalidData(format!("generator {h:?} is not mapped into the target monoid")))?;
            generator_images.push(c);
        }
        let src_basis = lattice_basis(source.hilbert_basis(), sd);
        let tgt_basis = lattice_basis(target.hilbert_basis(), td);
        let mut columns = Vec::new();
        for b in &src_basis {
            let c = group_coordinates(&tgt_basis, &matrix.apply(b))
                .ok_or_else(|| Error::Internal("image outside the target group".into()))?;
            columns.push(c);
        }
        let gp_matrix = if columns.is_empty() {
            IntegerMatrix::zeros(tgt_basis.len(), 0)
        } else {
            IntegerMatrix::from_columns(&columns, tgt_basis.len())?
        };
        Ok(Self { source, target, matrix, gp_matrix, generator_images })
    }
}

/// `f_sigma^dual: N -> sigma^dual n M`, `1 -> (0, ..., 0, 1)`.
pub fn f_sigma_dual(sigma: &RationalCone) -> Result<MonoidHom> {
    let d = sigma.ambient().rank;
    if sigma.rays().iter().any(|r| r[d - 1].is_negative()) {
        return Err(Error::NotInSupport("the height is negative on the cone".into()));
    }
    let target = AffineMonoid::new(dual_cone(sigma)?)?;
    let mut column = vec![BigInt::zero(); d];
    column[d - 1] = BigInt::from(1);
    let matrix = IntegerMatrix::from_columns(&[column], d)?;
    MonoidHom::new(AffineMonoid::free(1), target, matrix)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KatoVerdict {
    LogSmooth,
    FailsInjectivity,
    FailsTorsionFree(Vec<BigInt>),
}

impl KatoVerdict {
    pub fn is_log_smooth(&self) -> bool {
        matches!(self, KatoVerdict::LogSmooth)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KatoReport {
    pub verdict: KatoVerdict,
    pub gp_matrix: IntegerMatrix,
    pub cokernel: Cokernel,
}

/// Log smoothness of `f` over a discrete valuation base: `f^gp` injective
/// with torsion-free cokernel.
pub fn kato_log_smooth_check(f: &MonoidHom) -> KatoReport {
    kato_check_with(f, None)
}

/// As [`kato_log_smooth_check`], but with `Some(p)` accepts a kernel-free map
/// whose cokernel torsion has order invertible in characteristic `p`
/// (every order is invertible when `p = 0`).
pub fn kato_check_with(f: &MonoidHom, general: Option<u64>) -> KatoReport {
    let cokernel = cokernel_invariants(&f.gp_matrix);
    let verdict = if !is_injective(&f.gp_matrix) {
        KatoVerdict::FailsInjectivity
    } else if cokernel.is_torsion_free() {
        KatoVerdict::LogSmooth
    } else {
        let invertible = match general {
            Some(0) => true,
            Some(p) => cokernel.torsion.iter().all(|d| !(d % BigInt::from(p)).is_zero()),
            None => false,
        };
        if invertible {
            KatoVerdict::LogSmooth
        } else {
            KatoVerdict::FailsTorsionFree(cokernel.torsion.clone())
        }
    };
    KatoReport { verdict, gp_matrix: f.gp_matrix.clone(), cokernel }
}
