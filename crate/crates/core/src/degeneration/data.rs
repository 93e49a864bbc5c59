use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::rational::RatMatrix;
use crate::lattice::{group_closure, AffineAction, GroundData, GroupAction, IVec, IntegerMatrix, DEFAULT_CLOSURE_BOUND};

/// Combinatorial degeneration data in split normal form.
///
/// Matrices act on column vectors. `b[(i, j)] = b(y_i, x_j)`; `phi` and
/// `y_embedding` have the images of the `Y` basis as columns, in `X`
/// coordinates; `a[i] = a(y_i)`, on the integer scale where the default is
/// `b(y_i, phi(y_i))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegenerationData {
    pub rank: usize,
    pub b: IntegerMatrix,
    pub phi: IntegerMatrix,
    pub y_embedding: IntegerMatrix,
    pub a: Vec<BigInt>,
    pub group: GroupAction,
    pub ground: GroundData,
}

fn check_square(m: &IntegerMatrix, rank: usize, context: &'static str) -> Result<()> {
    if m.rows() != rank || m.cols() != rank {
        return Err(Error::DimensionMismatch {
            context,
            expected: rank,
            found: if m.rows() != rank { m.rows() } else { m.cols() },
        });
    }
    Ok(())
}

impl DegenerationData {
    pub fn new(
        b: IntegerMatrix,
        phi: Option<IntegerMatrix>,
        y_embedding: Option<IntegerMatrix>,
        a: Option<Vec<BigInt>>,
        group: GroupAction,
        ground: GroundData,
    ) -> Result<Self> {
        let rank = b.rows();
        check_square(&b, rank, "pairing b")?;
        let y_embedding = y_embedding.unwrap_or_else(|| IntegerMatrix::identity(rank));
        check_square(&y_embedding, rank, "Y embedding")?;
        let phi = phi.unwrap_or_else(|| y_embedding.clone());
        check_square(&phi, rank, "phi")?;
        if group.rank != rank {
            return Err(Error::DimensionMismatch { context: "group action", expected: rank, found: group.rank });
        }
        if group.residue_char != ground.residue_char {
            return Err(Error::InvalidData("group and ground data disagree on the residue characteristic".into()));
        }
        if rank > 0 && y_embedding.determinant()?.is_zero() {
            return Err(Error::InvalidData("Y embedding has determinant zero".into()));
        }
        let s = &b * &phi;
        if !s.is_symmetric() {
            return Err(Error::InvalidData("the form b(y, phi(y')) is not symmetric".into()));
        }
        if let Err((minor, value)) = s.positive_definite_witness() {
            return Err(Error::NotPositiveDefinite { minor, value: value.to_string() });
        }
        let a = match a {
            Some(a) if a.len() != rank => {
                return Err(Error::DimensionMismatch { context: "shift data a", expected: rank, found: a.len() });
            }
            Some(a) => a,
            None => (0..rank).map(|i| s[(i, i)].clone()).collect(),
        };
        let data = Self { rank, b, phi, y_embedding, a, group, ground };
        data.check_compatibility()?;
        Ok(data)
    }

    /// `Gamma` preserves `Y`, the pairing and `phi`.
    fn check_compatibility(&self) -> Result<()> {
        if self.rank == 0 {
            return Ok(());
        }
        let e = RatMatrix::from_int(&self.y_embedding);
        let e_inv = e.inverse()?;
        for (name, g) in &self.group.generators {
            let gy = e_inv
                .mul(&RatMatrix::from_int(g))
                .mul(&e)
                .to_integer()
                .ok_or_else(|| Error::InvalidData(format!("generator {name} does not preserve Y")))?;
            if &(&gy.transpose() * &self.b) * g != self.b {
                return Err(Error::InvalidData(format!("generator {name} does not preserve the pairing b")));
            }
            if &self.phi * &gy != g * &self.phi {
                return Err(Error::InvalidData(format!("generator {name} does not commute with phi")));
            }
        }
        group_closure(&self.group, DEFAULT_CLOSURE_BOUND)?;
        Ok(())
    }

    /// `S[(i, j)] = b(y_i, phi(y_j))`.
    pub fn pairing_form(&self) -> IntegerMatrix {
        &self.b * &self.phi
    }

    /// The positive definite form `Q` on `X^dual_R` transported from `S` through `y -> b(y, .)`.
    pub fn slice_form(&self) -> Result<RatMatrix> {
        if self.rank == 0 {
            return Ok(RatMatrix::zeros(0, 0));
        }
        let b_inv = RatMatrix::from_int(&self.b).inverse()?;
        Ok(b_inv.mul(&RatMatrix::from_int(&self.pairing_form())).mul(&b_inv.transpose()))
    }

    /// `b(y_i, .)` as vectors of `X^dual`.
    pub fn translations(&self) -> Vec<IVec> {
        (0..self.rank).map(|i| self.b.row_vec(i)).collect()
    }

    pub fn affine_action(&self) -> Result<AffineAction> {
        AffineAction::new(self.rank, self.translations(), &self.group)
    }

    /// The same data written in the basis `x'_j = sum_i u[(i, j)] x_i` of `X`.
    pub fn rebase(&self, u: &IntegerMatrix) -> Result<Self> {
        let u_inv = u.unimodular_inverse()?;
        let generators = self.group.generators.iter().map(|(name, g)| (name.clone(), &(&u_inv * g) * u)).collect();
        let group = GroupAction::new(self.rank, generators, Some(self.group.order), self.group.residue_char)?;
        Self::new(
            &self.b * u,
            Some(&u_inv * &self.phi),
            Some(&u_inv * &self.y_embedding),
            Some(self.a.clone()),
            group,
            self.ground.clone(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::rational::rat;

    fn ground() -> GroundData {
        GroundData::with_residue_char(5).unwrap()
    }

    #[test]
    fn tate_data() {
        let d = DegenerationData::new(IntegerMatrix::from_i64(&[&[3]]), None, None, None, GroupAction::trivial(1, 5), ground())
            .unwrap();
        assert_eq!(d.a, vec![BigInt::from(3)]);
        assert_eq!(d.slice_form().unwrap().entries, vec![rat(1, 3)]);
    }

    #[test]
    fn indefinite_form_is_rejected() {
        let err = DegenerationData::new(IntegerMatrix::from_i64(&[&[0]]), None, None, None, GroupAction::trivial(1, 5), ground());
        assert!(matches!(err, Err(Error::NotPositiveDefinite { minor: 1, .. })));
        let err = DegenerationData::new(
            IntegerMatrix::from_i64(&[&[1, 2], &[2, 1]]),
            None,
            None,
            None,
            GroupAction::trivial(2, 5),
            ground(),
        );
        assert!(matches!(err, Err(Error::NotPositiveDefinite { minor: 2, .. })));
    }

    #[test]
    fn rotation_must_preserve_pairing() {
        let rot = vec![("r".to_string(), IntegerMatrix::from_i64(&[&[0, -1], &[1, 0]]))];
        let g = GroupAction::new(2, rot, Some(4), 5).unwrap();
        assert!(DegenerationData::new(IntegerMatrix::identity(2), None, None, None, g.clone(), ground()).is_ok());
        let skew = IntegerMatrix::from_i64(&[&[2, 1], &[1, 2]]);
        assert!(DegenerationData::new(skew, None, None, None, g, ground()).is_err());
    }

    #[test]
    fn rebasing_keeps_the_form_on_y() {
        let d = DegenerationData::new(
            IntegerMatrix::from_i64(&[&[2, 1], &[1, 2]]),
            None,
            None,
            None,
            GroupAction::trivial(2, 0),
            GroundData::with_residue_char(0).unwrap(),
        )
        .unwrap();
        let u = IntegerMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        let e = d.rebase(&u).unwrap();
        assert_eq!(e.pairing_form(), d.pairing_form());
    }
}
