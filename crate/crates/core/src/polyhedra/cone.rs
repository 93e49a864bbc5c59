use std::collections::{BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::dd::cone_generators;
use crate::error::{Error, Result};
use crate::lattice::rational::{primitive_from_rational, qdot, to_qvec, QVec};
use crate::lattice::{dot, integer_kernel, lattice_basis, primitive, smith_normal_form, IVec, IntegerMatrix, Lattice};

/// A rational polyhedral cone with both representations populated.
///
/// `rays` are the extreme rays of the cone modulo its lineality space and
/// `lineality` is a lattice basis of the lineality space; the generator list
/// used for duality is `rays` together with `+-lineality`. Likewise `facets`
/// are the facet normals and `equations` a lattice basis of the orthogonal
/// complement of the linear span.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RationalCone {
    ambient: Lattice,
    rays: Vec<IVec>,
    lineality: Vec<IVec>,
    facets: Vec<IVec>,
    equations: Vec<IVec>,
    dim: usize,
}

/// Saturated lattice basis of `span(vectors) n Z^dim`, in canonical form.
pub(crate) fn saturated_span(vectors: &[IVec], dim: usize) -> Vec<IVec> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let a = IntegerMatrix::from_rows(vectors, dim).expect("uniform vector length");
    let perp = integer_kernel(&a);
    if perp.is_empty() {
        return (0..dim).map(|i| (0..dim).map(|j| BigInt::from((i == j) as i64)).collect()).collect();
    }
    let p = IntegerMatrix::from_rows(&perp, dim).expect("uniform vector length");
    lattice_basis(&integer_kernel(&p), dim)
}

/// Orthogonal projection of `v` onto the complement of `span(basis)`, scaled to a primitive integer vector.
fn project_away(v: &[BigInt], basis: &[IVec]) -> IVec {
    if basis.is_empty() {
        return primitive(v.to_vec());
    }
    // Gram-Schmidt on the basis, then subtract components.
    let mut ortho: Vec<QVec> = Vec::new();
    for b in basis {
        let mut w = to_qvec(b);
        for o in &ortho {
            let c = qdot(&w, o) / qdot(o, o);
            for (x, y) in w.iter_mut().zip(o) {
                *x -= &c * y;
            }
        }
        if w.iter().any(|x| !x.is_zero()) {
            ortho.push(w);
        }
    }
    let mut w = to_qvec(v);
    for o in &ortho {
        let c = qdot(&w, o) / qdot(o, o);
        for (x, y) in w.iter_mut().zip(o) {
            *x -= &c * y;
        }
    }
    primitive_from_rational(&w)
}

fn negated(v: &[BigInt]) -> IVec {
    v.iter().map(|x| -x).collect()
}

impl RationalCone {
    /// The cone generated by `rays` (any finite generating set).
    pub fn from_rays(ambient: Lattice, rays: &[IVec]) -> Result<Self> {
        Self::check_lengths(ambient, rays)?;
        let dim = ambient.rank;
        let gens: Vec<IVec> = rays.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
        let dual = cone_generators(&gens, dim);
        let mut inequalities = dual.rays.clone();
        for l in &dual.lineality {
            inequalities.push(l.clone());
            inequalities.push(negated(l));
        }
        Self::from_inequalities(ambient, &inequalities)
    }

    /// The cone `{x : a.x >= 0 for all a in inequalities}`.
    pub fn from_inequalities(ambient: Lattice, inequalities: &[IVec]) -> Result<Self> {
        Self::check_lengths(ambient, inequalities)?;
        let dim = ambient.rank;
        let primal = cone_generators(inequalities, dim);
        let lineality = saturated_span(&primal.lineality, dim);
        let mut rays: Vec<IVec> = primal.rays.iter().map(|r| project_away(r, &lineality)).collect();
        rays.sort();
        rays.dedup();

        let mut gens = rays.clone();
        for l in &lineality {
            gens.push(l.clone());
            gens.push(negated(l));
        }
        let dual = cone_generators(&gens, dim);
        let equations = saturated_span(&dual.lineality, dim);
        let mut facets: Vec<IVec> = dual.rays.iter().map(|a| project_away(a, &equations)).collect();
        facets.sort();
        facets.dedup();
        let span_dim = dim - equations.len();
        Ok(Self { ambient, rays, lineality, facets, equations, dim: span_dim })
    }

    fn check_lengths(ambient: Lattice, vectors: &[IVec]) -> Result<()> {
        if let Some(v) = vectors.iter().find(|v| v.len() != ambient.rank) {
            return Err(Error::DimensionMismatch { context: "cone vector", expected: ambient.rank, found: v.len() });
        }
        Ok(())
    }

    pub fn zero(ambient: Lattice) -> Self {
        Self::from_rays(ambient, &[]).expect("zero cone")
    }

    pub fn ambient(&self) -> Lattice {
        self.ambient
    }

    /// Extreme rays (modulo lineality).
    pub fn extreme_rays(&self) -> &[IVec] {
        &self.rays
    }

    pub fn lineality(&self) -> &[IVec] {
        &self.lineality
    }

    /// Generating set: extreme rays followed by `+l, -l` for each lineality basis vector.
    pub fn rays(&self) -> Vec<IVec> {
        let mut out = self.rays.clone();
        for l in &self.lineality {
            out.push(l.clone());
            out.push(negated(l));
        }
        out
    }

    pub fn facets(&self) -> &[IVec] {
        &self.facets
    }

    pub fn equations(&self) -> &[IVec] {
        &self.equations
    }

    /// All inequalities: facets followed by `+e, -e` for each equation.
    pub fn inequalities(&self) -> Vec<IVec> {
        let mut out = self.facets.clone();
        for e in &self.equations {
            out.push(e.clone());
            out.push(negated(e));
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_strongly_convex(&self) -> bool {
        self.lineality.is_empty()
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        self.facets.iter().all(|a| !dot(a, x).is_negative()) && self.equations.iter().all(|e| dot(e, x).is_zero())
    }

    pub fn contains_rational(&self, x: &[BigRational]) -> bool {
        self.facets.iter().all(|a| !qdot(&to_qvec(a), x).is_negative())
            && self.equations.iter().all(|e| qdot(&to_qvec(e), x).is_zero())
    }

    /// Rays of each facet of a strongly convex cone, as index sets into `extreme_rays()`.
    fn facet_incidence(&self) -> Vec<BTreeSet<usize>> {
        self.facets.iter().map(|a| (0..self.rays.len()).filter(|&i| dot(a, &self.rays[i]).is_zero()).collect()).collect()
    }

    /// Ray index sets of all faces (including the empty set for `{0}` and the full set).
    pub fn face_ray_sets(&self) -> Vec<BTreeSet<usize>> {
        let incidence = self.facet_incidence();
        let full: BTreeSet<usize> = (0..self.rays.len()).collect();
        let mut seen: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
        let mut queue = VecDeque::new();
        seen.insert(full.clone());
        queue.push_back(full);
        while let Some(face) = queue.pop_front() {
            for f in &incidence {
                let sub: BTreeSet<usize> = face.intersection(f).copied().collect();
                if sub != face && seen.insert(sub.clone()) {
                    queue.push_back(sub);
                }
            }
        }
        if self.is_strongly_convex() {
            seen.insert(BTreeSet::new());
        }
        let mut out: Vec<BTreeSet<usize>> = seen.into_iter().collect();
        out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        out
    }

    /// All faces, from `{0}` up to the cone itself.
    pub fn faces(&self) -> Vec<RationalCone> {
        let mut faces: Vec<RationalCone> = self
            .face_ray_sets()
            .into_iter()
            .map(|set| {
                let rays: Vec<IVec> = set.iter().map(|&i| self.rays[i].clone()).collect();
                RationalCone::from_rays(self.ambient, &rays).expect("face rays have ambient length")
            })
            .collect();
        faces.sort_by(|a, b| a.dim.cmp(&b.dim).then_with(|| a.rays.cmp(&b.rays)));
        faces.dedup();
        faces
    }

    pub fn is_simplicial(&self) -> bool {
        self.is_strongly_convex() && self.rays.len() == self.dim
    }

    /// Rays extend to a basis of the ambient lattice.
    pub fn is_smooth(&self) -> bool {
        if !self.is_simplicial() {
            return false;
        }
        if self.rays.is_empty() {
            return true;
        }
        let m = IntegerMatrix::from_columns(&self.rays, self.ambient.rank).expect("ray lengths");
        smith_normal_form(&m).diagonal().iter().all(One::is_one)
    }

    /// Sum of the extreme rays: a relative interior point of a strongly convex cone.
    pub fn interior_point(&self) -> IVec {
        let mut sum = vec![BigInt::zero(); self.ambient.rank];
        for r in &self.rays {
            for (s, x) in sum.iter_mut().zip(r) {
                *s += x;
            }
        }
        sum
    }

    /// Image under a linear map given as a square matrix.
    pub fn map(&self, a: &IntegerMatrix) -> Result<Self> {
        let gens: Vec<IVec> = self.rays().iter().map(|r| a.apply(r)).collect();
        Self::from_rays(self.ambient, &gens)
    }

    /// Intersection with another cone in the same ambient lattice.
    pub fn intersect(&self, other: &Self) -> Result<Self> {
        let mut ineqs = self.inequalities();
        ineqs.extend(other.inequalities());
        Self::from_inequalities(self.ambient, &ineqs)
    }
}

/// `sigma^dual = {m : <m, n> >= 0 for all n in sigma}` in the dual lattice.
pub fn dual_cone(sigma: &RationalCone) -> Result<RationalCone> {
    RationalCone::from_inequalities(sigma.ambient().dual(), &sigma.rays())
}

pub fn faces(sigma: &RationalCone) -> Vec<RationalCone> {
    sigma.faces()
}

pub fn is_smooth_cone(sigma: &RationalCone) -> bool {
    sigma.is_smooth()
}

/// Least rational point of the ray's intersection with height one: `v / h`.
pub(crate) fn slice_point(ray: &[BigInt]) -> QVec {
    let r = ray.len() - 1;
    let h = &ray[r];
    ray[..r].iter().map(|x| BigRational::new(x.clone(), h.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{ivec, LatticeLabel};

    fn n(rank: usize) -> Lattice {
        Lattice::new(rank, LatticeLabel::N)
    }

    fn cone(rays: &[&[i64]]) -> RationalCone {
        let rays: Vec<IVec> = rays.iter().map(|r| ivec(r)).collect();
        RationalCone::from_rays(n(rays[0].len()), &rays).unwrap()
    }

    #[test]
    fn orthant_is_self_dual() {
        let c = cone(&[&[1, 0], &[0, 1]]);
        let d = dual_cone(&c).unwrap();
        assert_eq!(d.rays(), vec![ivec(&[0, 1]), ivec(&[1, 0])]);
        assert_eq!(d.ambient().label, LatticeLabel::M);
    }

    #[test]
    fn ray_dual_is_half_plane() {
        let d = dual_cone(&cone(&[&[0, 1]])).unwrap();
        let mut rays = d.rays();
        rays.sort();
        assert_eq!(rays, vec![ivec(&[-1, 0]), ivec(&[0, 1]), ivec(&[1, 0])]);
        assert_eq!(d.lineality(), &[ivec(&[1, 0])]);
    }

    #[test]
    fn dual_of_skew_cone() {
        let d = dual_cone(&cone(&[&[1, 0], &[1, 2]])).unwrap();
        assert_eq!(d.rays(), vec![ivec(&[0, 1]), ivec(&[2, -1])]);
        // Oracle: every dual ray is non-negative on both primal rays.
        for m in d.rays() {
            assert!(dot(&m, &ivec(&[1, 0])) >= BigInt::zero());
            assert!(dot(&m, &ivec(&[1, 2])) >= BigInt::zero());
        }
    }

    #[test]
    fn face_counts() {
        assert_eq!(cone(&[&[1, 1]]).faces().len(), 2);
        assert_eq!(cone(&[&[1, 0], &[0, 1]]).faces().len(), 4);
        let square = cone(&[&[0, 0, 1], &[1, 0, 1], &[0, 1, 1], &[1, 1, 1]]);
        let faces = square.faces();
        assert_eq!(faces.len(), 10);
        let by_dim: Vec<usize> = (0..=3).map(|d| faces.iter().filter(|f| f.dim() == d).count()).collect();
        assert_eq!(by_dim, vec![1, 4, 4, 1]);
    }

    #[test]
    fn faces_are_supported() {
        let square = cone(&[&[0, 0, 1], &[1, 0, 1], &[0, 1, 1], &[1, 1, 1]]);
        for f in square.faces() {
            for r in f.extreme_rays() {
                assert!(square.contains(r));
            }
            let tight: Vec<&IVec> =
                square.facets().iter().filter(|a| f.extreme_rays().iter().all(|r| dot(a, r).is_zero())).collect();
            // The face is cut out by its tight facets.
            let mut ineqs: Vec<IVec> = square.inequalities();
            for a in tight {
                ineqs.push(negated(a));
            }
            let cut = RationalCone::from_inequalities(square.ambient(), &ineqs).unwrap();
            assert_eq!(cut.extreme_rays(), f.extreme_rays());
        }
    }

    #[test]
    fn smoothness() {
        assert!(cone(&[&[1, 0], &[0, 1]]).is_smooth());
        assert!(!cone(&[&[1, 0], &[1, 2]]).is_smooth());
        assert!(!cone(&[&[0, 0, 1], &[1, 0, 1], &[0, 1, 1], &[1, 1, 1]]).is_smooth());
        assert!(cone(&[&[0, 1], &[1, 1]]).is_smooth());
    }

    #[test]
    fn redundant_generators_are_dropped() {
        let c = cone(&[&[1, 0], &[1, 1], &[0, 1], &[2, 2]]);
        assert_eq!(c.extreme_rays(), &[ivec(&[0, 1]), ivec(&[1, 0])]);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let err = RationalCone::from_rays(n(2), &[ivec(&[1, 0, 0])]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }
}
