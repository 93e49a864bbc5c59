use std::collections::{BTreeSet, VecDeque};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::rational::{to_qvec, RatMatrix};
use super::{IVec, IntegerMatrix};
use crate::error::{Error, Result};

pub const DEFAULT_CLOSURE_BOUND: usize = 10_000;

/// A finite group acting on `X` through integer matrices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupAction {
    pub rank: usize,
    pub generators: Vec<(String, IntegerMatrix)>,
    pub order: usize,
    pub residue_char: u64,
}

impl GroupAction {
    pub fn trivial(rank: usize, residue_char: u64) -> Self {
        Self { rank, generators: Vec::new(), order: 1, residue_char }
    }

    /// Validates the generators and computes the order by closure when `order` is `None`.
    pub fn new(rank: usize, generators: Vec<(String, IntegerMatrix)>, order: Option<usize>, residue_char: u64) -> Result<Self> {
        for (name, g) in &generators {
            if g.rows() != rank || g.cols() != rank {
                return Err(Error::DimensionMismatch { context: "group generator", expected: rank, found: g.rows() });
            }
            if !g.is_unimodular() {
                return Err(Error::NotUnimodular { name: name.clone() });
            }
        }
        let mut action = Self { rank, generators, order: 0, residue_char };
        let elements = group_closure(&action, DEFAULT_CLOSURE_BOUND)?;
        match order {
            Some(declared) if declared != elements.len() => {
                return Err(Error::GroupOrder { declared, found: elements.len() });
            }
            _ => action.order = elements.len(),
        }
        Ok(action)
    }

    pub fn is_trivial(&self) -> bool {
        self.generators.iter().all(|(_, g)| *g == IntegerMatrix::identity(self.rank))
    }
}

/// All elements of the group generated by `action.generators`, sorted.
/// Fails when the closure exceeds `bound` elements.
pub fn group_closure(action: &GroupAction, bound: usize) -> Result<Vec<IntegerMatrix>> {
    let id = IntegerMatrix::identity(action.rank);
    let mut seen: BTreeSet<Vec<BigInt>> = BTreeSet::new();
    let mut elements = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert(id.entries().to_vec());
    elements.push(id.clone());
    queue.push_back(id);
    while let Some(x) = queue.pop_front() {
        for (_, g) in &action.generators {
            let y = g * &x;
            if seen.insert(y.entries().to_vec()) {
                if elements.len() >= bound {
                    return Err(Error::ClosureBound { bound });
                }
                elements.push(y.clone());
                queue.push_back(y);
            }
        }
    }
    elements.sort_by(|a, b| a.entries().cmp(b.entries()));
    Ok(elements)
}

/// Element `(y, gamma)` of `Y x| Gamma` acting on the slice `X^dual_R` by
/// `xi -> linear * xi + translation` and on `N` by `(xi, t) -> (linear xi + t translation, t)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffineElement {
    pub translation: IVec,
    pub linear: IntegerMatrix,
}

impl AffineElement {
    pub fn rank(&self) -> usize {
        self.translation.len()
    }

    pub fn identity(rank: usize) -> Self {
        Self { translation: vec![BigInt::from(0); rank], linear: IntegerMatrix::identity(rank) }
    }

    pub fn apply_ray(&self, ray: &[BigInt]) -> IVec {
        let r = self.rank();
        let height = &ray[r];
        let mut out = self.linear.apply(&ray[..r]);
        for (o, t) in out.iter_mut().zip(&self.translation) {
            *o += height * t;
        }
        out.push(height.clone());
        out
    }

    /// The action on `N` as an `(r+1) x (r+1)` matrix.
    pub fn n_matrix(&self) -> IntegerMatrix {
        let r = self.rank();
        let mut m = self.linear.direct_sum(&IntegerMatrix::identity(1));
        for i in 0..r {
            m[(i, r)] = self.translation[i].clone();
        }
        m
    }

    /// The contragredient action on `M`, preserving the pairing with `N`.
    pub fn m_matrix(&self) -> IntegerMatrix {
        self.n_matrix().unimodular_inverse().expect("affine element is invertible").transpose()
    }
}

/// The action of `Y x| Gamma` on `N_R`: `Y` through translations `b(y, .)` on the
/// height-one slice and `Gamma` through the contragredient of its action on `X`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AffineAction {
    pub rank: usize,
    /// `b(y_i, .)` as vectors of `X^dual`, one per basis vector of `Y`.
    pub translations: Vec<IVec>,
    /// Generators of `Gamma` acting on `X`.
    pub gamma: Vec<(String, IntegerMatrix)>,
    /// The same generators acting on `X^dual` (inverse transposes).
    pub gamma_dual: Vec<(String, IntegerMatrix)>,
    /// All elements of `Gamma` acting on `X^dual`.
    pub gamma_elements: Vec<IntegerMatrix>,
}

impl AffineAction {
    pub fn new(rank: usize, translations: Vec<IVec>, group: &GroupAction) -> Result<Self> {
        if translations.iter().any(|t| t.len() != rank) {
            return Err(Error::DimensionMismatch { context: "translation vector", expected: rank, found: 0 });
        }
        let gamma_dual = group
            .generators
            .iter()
            .map(|(name, g)| Ok((name.clone(), g.unimodular_inverse()?.transpose())))
            .collect::<Result<Vec<_>>>()?;
        let dual_group =
            GroupAction { rank, generators: gamma_dual.clone(), order: group.order, residue_char: group.residue_char };
        let gamma_elements = group_closure(&dual_group, DEFAULT_CLOSURE_BOUND)?;
        Ok(Self { rank, translations, gamma: group.generators.clone(), gamma_dual, gamma_elements })
    }

    /// Pure translation action of `Y` with trivial `Gamma`.
    pub fn translations_only(rank: usize, translations: Vec<IVec>) -> Result<Self> {
        Self::new(rank, translations, &GroupAction::trivial(rank, 0))
    }

    /// Generators of `Y x| Gamma`: first the `Y` basis, then the `Gamma` generators.
    pub fn generators(&self) -> Vec<(String, AffineElement)> {
        let mut gens = Vec::new();
        for (i, t) in self.translations.iter().enumerate() {
            gens.push((format!("y{i}"), AffineElement { translation: t.clone(), linear: IntegerMatrix::identity(self.rank) }));
        }
        for (name, g) in &self.gamma_dual {
            gens.push((name.clone(), AffineElement { translation: vec![BigInt::from(0); self.rank], linear: g.clone() }));
        }
        gens
    }

    pub fn translation_matrix(&self) -> Result<IntegerMatrix> {
        IntegerMatrix::from_columns(&self.translations, self.rank)
    }

    /// Coordinates `y` with `sum y_i b(y_i, .) = v`, if integral.
    pub fn y_coordinates(&self, v: &[BigInt]) -> Option<IVec> {
        if self.rank == 0 {
            return Some(Vec::new());
        }
        let m = RatMatrix::from_int(&self.translation_matrix().ok()?);
        let y = m.solve(&to_qvec(v)).ok()?;
        y.iter().all(|x| x.is_integer()).then(|| y.iter().map(|x| x.to_integer()).collect())
    }

    pub fn gamma_order(&self) -> usize {
        self.gamma_elements.len()
    }

    pub fn has_trivial_gamma(&self) -> bool {
        self.gamma_elements.len() == 1 && self.gamma_elements[0] == IntegerMatrix::identity(self.rank)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn action(gens: &[IntegerMatrix]) -> GroupAction {
        let rank = gens.first().map_or(1, |g| g.rows());
        GroupAction {
            rank,
            generators: gens.iter().enumerate().map(|(i, g)| (format!("g{i}"), g.clone())).collect(),
            order: 0,
            residue_char: 0,
        }
    }

    #[test]
    fn sign_group() {
        let els = group_closure(&action(&[IntegerMatrix::from_i64(&[&[-1]])]), 100).unwrap();
        assert_eq!(els, vec![IntegerMatrix::from_i64(&[&[-1]]), IntegerMatrix::from_i64(&[&[1]])]);
    }

    #[test]
    fn rotation_has_order_four() {
        let rot = IntegerMatrix::from_i64(&[&[0, -1], &[1, 0]]);
        let els = group_closure(&action(&[rot.clone()]), 100).unwrap();
        assert_eq!(els.len(), 4);
        // Independent check: powers of the rotation.
        let mut p = IntegerMatrix::identity(2);
        for _ in 0..4 {
            assert!(els.contains(&p));
            p = &rot * &p;
        }
        assert_eq!(p, IntegerMatrix::identity(2));
    }

    #[test]
    fn empty_generators_give_identity() {
        let els = group_closure(&GroupAction::trivial(3, 0), 10).unwrap();
        assert_eq!(els, vec![IntegerMatrix::identity(3)]);
    }

    #[test]
    fn infinite_group_hits_bound() {
        let shear = IntegerMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        assert!(matches!(group_closure(&action(&[shear]), 50), Err(Error::ClosureBound { .. })));
    }

    #[test]
    fn declared_order_is_checked() {
        let g = vec![("s".to_string(), IntegerMatrix::from_i64(&[&[-1]]))];
        assert!(GroupAction::new(1, g.clone(), Some(2), 3).is_ok());
        assert!(matches!(GroupAction::new(1, g, Some(3), 3), Err(Error::GroupOrder { .. })));
        let bad = vec![("d".to_string(), IntegerMatrix::from_i64(&[&[2]]))];
        assert!(matches!(GroupAction::new(1, bad, None, 0), Err(Error::NotUnimodular { .. })));
    }

    #[test]
    fn affine_element_matrices() {
        let e = AffineElement { translation: super::super::ivec(&[3]), linear: IntegerMatrix::from_i64(&[&[-1]]) };
        assert_eq!(e.apply_ray(&super::super::ivec(&[1, 2])), super::super::ivec(&[5, 2]));
        let n = e.n_matrix();
        let m = e.m_matrix();
        assert_eq!(&m.transpose() * &n, IntegerMatrix::identity(2));
    }
}
