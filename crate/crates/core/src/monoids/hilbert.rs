use std::collections::{BTreeSet, HashSet};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::rational::{solve_in_span, to_qvec, QVec, RatMatrix};
use crate::lattice::{dot, smith_normal_form, IVec, IntegerMatrix, Lattice};
use crate::polyhedra::{saturated_span, RationalCone};

/// The monoid of lattice points of a rational cone, with its minimal generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineMonoid {
    ambient: Lattice,
    defining_cone: RationalCone,
    /// Unit generators come first in `+u, -u` pairs, followed by the
    /// irreducible non-units in lexicographic order.
    hilbert_basis: Vec<IVec>,
    unit_rank: usize,
    grading: IVec,
}

fn unit_vector(dim: usize, i: usize) -> IVec {
    (0..dim).map(|j| BigInt::from((i == j) as i64)).collect()
}

fn coordinates(basis: &[IVec], v: &[BigInt]) -> Option<IVec> {
    let cols: Vec<QVec> = basis.iter().map(|b| to_qvec(b)).collect();
    let c = solve_in_span(&cols, &to_qvec(v))?;
    c.iter().all(|x| x.is_integer()).then(|| c.iter().map(|x| x.to_integer()).collect())
}

/// Splits the simplicial cones of a triangulation of a pointed cone with
/// extreme rays `rays`, by pulling the first ray of each face.
fn triangulate(rays: &[IVec], dim: usize) -> Result<Vec<Vec<usize>>> {
    let cone = RationalCone::from_rays(Lattice::new(dim, crate::lattice::LatticeLabel::M), rays)?;
    let order: Vec<usize> =
        cone.extreme_rays().iter().map(|r| rays.iter().position(|s| s == r).expect("extreme rays are the input rays")).collect();
    let faces: Vec<BTreeSet<usize>> =
        cone.face_ray_sets().into_iter().map(|set| set.into_iter().map(|i| order[i]).collect()).collect();
    let rank_of = |set: &BTreeSet<usize>| -> usize {
        if set.is_empty() {
            return 0;
        }
        let vs: Vec<IVec> = set.iter().map(|&i| rays[i].clone()).collect();
        IntegerMatrix::from_rows(&vs, dim).expect("ray lengths").rank()
    };
    let ranks: Vec<usize> = faces.iter().map(rank_of).collect();

    fn go(face: usize, faces: &[BTreeSet<usize>], ranks: &[usize], out: &mut Vec<Vec<usize>>, prefix: &mut Vec<usize>) {
        let set = &faces[face];
        if set.len() == ranks[face] {
            let mut simplex = prefix.clone();
            simplex.extend(set.iter().copied());
            out.push(simplex);
            return;
        }
        let apex = *set.iter().next().expect("nonempty face");
        for (g, sub) in faces.iter().enumerate() {
            if ranks[g] + 1 == ranks[face] && !sub.contains(&apex) && sub.is_subset(set) {
                prefix.push(apex);
                go(g, faces, ranks, out, prefix);
                prefix.pop();
            }
        }
    }
    let top = faces.iter().position(|f| f.len() == rays.len()).expect("full face present");
    let mut out = Vec::new();
    go(top, &faces, &ranks, &mut out, &mut Vec::new());
    Ok(out)
}

/// Nonzero lattice points `V frac(V^-1 x)` of the half-open fundamental parallelepiped.
fn parallelepiped_points(generators: &[IVec], dim: usize) -> Result<Vec<IVec>> {
    let v = IntegerMatrix::from_columns(generators, dim)?;
    let snf = smith_normal_form(&v);
    let u_inv = snf.u.unimodular_inverse()?;
    let v_inv = RatMatrix::from_int(&v).inverse()?;
    let vq = RatMatrix::from_int(&v);
    let diag = snf.diagonal();
    let mut out = Vec::new();
    let mut k: IVec = vec![BigInt::zero(); dim];
    loop {
        let x = u_inv.apply(&k);
        let lambda = v_inv.apply(&to_qvec(&x));
        let frac: QVec = lambda.iter().map(|l| l - l.floor()).collect();
        let p = vq.apply(&frac);
        if p.iter().any(|c| !c.is_zero()) {
            out.push(p.iter().map(|c| c.to_integer()).collect());
        }
        let mut i = 0;
        loop {
            if i == dim {
                return Ok(out);
            }
            k[i] += 1;
            if k[i] < diag[i] {
                break;
            }
            k[i] = BigInt::zero();
            i += 1;
        }
    }
}

/// Hilbert basis of a pointed full-dimensional cone in `Z^dim`.
fn pointed_hilbert_basis(cone: &RationalCone, dim: usize) -> Result<Vec<IVec>> {
    let rays = cone.extreme_rays().to_vec();
    if rays.is_empty() {
        return Ok(Vec::new());
    }
    let mut candidates: BTreeSet<IVec> = rays.iter().cloned().collect();
    for simplex in triangulate(&rays, dim)? {
        let gens: Vec<IVec> = simplex.iter().map(|&i| rays[i].clone()).collect();
        candidates.extend(parallelepiped_points(&gens, dim)?);
    }
    let candidates: Vec<IVec> = candidates.into_iter().collect();
    let minimal = candidates
        .iter()
        .filter(|h| {
            !candidates.iter().any(|g| {
                g != *h && {
                    let diff: IVec = h.iter().zip(g).map(|(a, b)| a - b).collect();
                    cone.contains(&diff)
                }
            })
        })
        .cloned()
        .collect();
    Ok(minimal)
}

impl AffineMonoid {
    /// The monoid `cone n M` with its Hilbert basis.
    pub fn new(cone: RationalCone) -> Result<Self> {
        let ambient = cone.ambient();
        let d = ambient.rank;
        let units = cone.lineality().to_vec();
        let span = saturated_span(&cone.rays(), d);
        let k = span.len();
        let u = units.len();

        let mut basis = Vec::new();
        for e in &units {
            basis.push(e.clone());
            basis.push(e.iter().map(|x| -x).collect());
        }
        if k > u {
            // Coordinates in the span, then a unimodular change taking the units to the first u axes.
            let to_span = |v: &IVec| coordinates(&span, v).ok_or_else(|| Error::Internal("vector outside its span".into()));
            let unit_coords = units.iter().map(to_span).collect::<Result<Vec<_>>>()?;
            let change = if u == 0 {
                IntegerMatrix::identity(k)
            } else {
                smith_normal_form(&IntegerMatrix::from_columns(&unit_coords, k)?).u
            };
            let back = change.unimodular_inverse()?;
            let quotient = |v: &IVec| -> Result<IVec> { Ok(change.apply(&to_span(v)?)[u..].to_vec()) };
            let images = cone.extreme_rays().iter().map(quotient).collect::<Result<Vec<_>>>()?;
            let qcone = RationalCone::from_rays(Lattice::new(k - u, ambient.label), &images)?;
            let mut lifts = Vec::new();
            for z in pointed_hilbert_basis(&qcone, k - u)? {
                let mut c = vec![BigInt::zero(); u];
                c.extend(z);
                let c = back.apply(&c);
                let mut x = vec![BigInt::zero(); d];
                for (ci, s) in c.iter().zip(&span) {
                    for (xj, sj) in x.iter_mut().zip(s) {
                        *xj += ci * sj;
                    }
                }
                lifts.push(x);
            }
            lifts.sort();
            basis.extend(lifts);
        }
        let mut grading = vec![BigInt::zero(); d];
        for a in cone.facets() {
            for (g, x) in grading.iter_mut().zip(a) {
                *g += x;
            }
        }
        Ok(Self { ambient, defining_cone: cone, hilbert_basis: basis, unit_rank: u, grading })
    }

    /// The free monoid `N^k`.
    pub fn free(rank: usize) -> Self {
        let ambient = Lattice::new(rank, crate::lattice::LatticeLabel::M);
        let gens: Vec<IVec> = (0..rank).map(|i| unit_vector(rank, i)).collect();
        let cone = RationalCone::from_rays(ambient, &gens).expect("orthant");
        Self { ambient, defining_cone: cone, hilbert_basis: gens, unit_rank: 0, grading: vec![BigInt::from(1); rank] }
    }

    pub fn ambient(&self) -> Lattice {
        self.ambient
    }

    pub fn defining_cone(&self) -> &RationalCone {
        &self.defining_cone
    }

    pub fn hilbert_basis(&self) -> &[IVec] {
        &self.hilbert_basis
    }

    pub fn unit_rank(&self) -> usize {
        self.unit_rank
    }

    /// Basis of the unit group (the `+u` members of the unit pairs).
    pub fn unit_basis(&self) -> Vec<IVec> {
        self.hilbert_basis[..2 * self.unit_rank].iter().step_by(2).cloned().collect()
    }

    /// Irreducible non-unit generators.
    pub fn non_units(&self) -> &[IVec] {
        &self.hilbert_basis[2 * self.unit_rank..]
    }

    /// A linear form positive on non-units and zero on units.
    pub fn grading(&self) -> &[BigInt] {
        &self.grading
    }

    pub fn contains(&self, m: &[BigInt]) -> bool {
        m.len() == self.ambient.rank && self.defining_cone.contains(m)
    }

    /// Coefficients `c >= 0` with `m = sum c_i h_i` over the Hilbert basis, if `m` is in the monoid.
    pub fn decompose(&self, m: &[BigInt]) -> Option<Vec<BigInt>> {
        if !self.contains(m) {
            return None;
        }
        let n = self.hilbert_basis.len();
        let offset = 2 * self.unit_rank;
        let units = self.unit_basis();
        let mut coeffs = vec![BigInt::zero(); n];
        let mut failed: HashSet<(IVec, usize)> = HashSet::new();

        fn go(
            monoid: &AffineMonoid,
            m: IVec,
            start: usize,
            offset: usize,
            units: &[IVec],
            coeffs: &mut [BigInt],
            failed: &mut HashSet<(IVec, usize)>,
        ) -> bool {
            if dot(&monoid.grading, &m).is_zero() {
                let Some(c) =
                    (if units.is_empty() { m.iter().all(Zero::is_zero).then(Vec::new) } else { coordinates(units, &m) })
                else {
                    return false;
                };
                for (i, x) in c.iter().enumerate() {
                    if x.is_negative() {
                        coeffs[2 * i + 1] += -x;
                    } else {
                        coeffs[2 * i] += x;
                    }
                }
                return true;
            }
            if failed.contains(&(m.clone(), start)) {
                return false;
            }
            for i in start..monoid.hilbert_basis.len() - offset {
                let h = &monoid.hilbert_basis[offset + i];
                let rest: IVec = m.iter().zip(h).map(|(a, b)| a - b).collect();
                if !monoid.defining_cone.contains(&rest) {
                    continue;
                }
                coeffs[offset + i] += 1;
                if go(monoid, rest, i, offset, units, coeffs, failed) {
                    return true;
                }
                coeffs[offset + i] -= 1;
            }
            failed.insert((m, start));
            false
        }

        go(self, m.to_vec(), 0, offset, &units, &mut coeffs, &mut failed).then_some(coeffs)
    }
}

/// Hilbert basis of `cone n M`: units split off as `+-` pairs, then the
/// irreducible non-units found by enumerating fundamental parallelepipeds of
/// a triangulation and discarding reducible candidates.
pub fn hilbert_basis(cone: &RationalCone) -> Result<AffineMonoid> {
    AffineMonoid::new(cone.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{ivec, LatticeLabel};

    fn m(rank: usize) -> Lattice {
        Lattice::new(rank, LatticeLabel::M)
    }

    fn basis(rays: &[&[i64]]) -> Vec<IVec> {
        let rays: Vec<IVec> = rays.iter().map(|r| ivec(r)).collect();
        let cone = RationalCone::from_rays(m(rays[0].len()), &rays).unwrap();
        let mut b = hilbert_basis(&cone).unwrap().hilbert_basis().to_vec();
        b.sort();
        b
    }

    #[test]
    fn quadrant() {
        assert_eq!(basis(&[&[1, 0], &[0, 1]]), vec![ivec(&[0, 1]), ivec(&[1, 0])]);
    }

    #[test]
    fn slanted_cone() {
        assert_eq!(basis(&[&[1, 0], &[1, 2]]), vec![ivec(&[1, 0]), ivec(&[1, 1]), ivec(&[1, 2])]);
    }

    #[test]
    fn half_plane_has_units() {
        let cone = RationalCone::from_inequalities(m(2), &[ivec(&[0, 1])]).unwrap();
        let mono = hilbert_basis(&cone).unwrap();
        assert_eq!(mono.unit_rank(), 1);
        let mut b = mono.hilbert_basis().to_vec();
        b.sort();
        assert_eq!(b, vec![ivec(&[-1, 0]), ivec(&[0, 1]), ivec(&[1, 0])]);
        let c = mono.decompose(&ivec(&[-3, 2])).unwrap();
        let total: IVec = (0..2).map(|k| mono.hilbert_basis().iter().zip(&c).map(|(h, x)| &h[k] * x).sum()).collect();
        assert_eq!(total, ivec(&[-3, 2]));
    }

    #[test]
    fn node_dual() {
        // Dual of cone((0,1),(1,1)).
        assert_eq!(basis(&[&[1, 0], &[-1, 1]]), vec![ivec(&[-1, 1]), ivec(&[1, 0])]);
    }

    #[test]
    fn square_pyramid_dual() {
        let sigma =
            RationalCone::from_rays(Lattice::n(2), &[ivec(&[0, 0, 1]), ivec(&[1, 0, 1]), ivec(&[0, 1, 1]), ivec(&[1, 1, 1])])
                .unwrap();
        let dual = crate::polyhedra::dual_cone(&sigma).unwrap();
        let mut b = hilbert_basis(&dual).unwrap().hilbert_basis().to_vec();
        b.sort();
        assert_eq!(b, vec![ivec(&[-1, 0, 1]), ivec(&[0, -1, 1]), ivec(&[0, 1, 0]), ivec(&[1, 0, 0])]);
    }

    #[test]
    fn lower_dimensional_cone() {
        // A ray in Z^3 through a non-primitive direction.
        assert_eq!(basis(&[&[2, 4, 0]]), vec![ivec(&[1, 2, 0])]);
    }

    #[test]
    fn three_dimensional_simplex_with_interior_points() {
        // Reeve-type tetrahedron cone: (1,0,0),(0,1,0),(1,1,3) has an interior point needing generation.
        let b = basis(&[&[1, 0, 0], &[0, 1, 0], &[1, 1, 3]]);
        assert!(b.contains(&ivec(&[1, 1, 1])));
        assert!(b.contains(&ivec(&[1, 1, 2])));
        assert_eq!(b.len(), 5);
    }

    #[test]
    fn free_monoid() {
        let f = AffineMonoid::free(2);
        assert_eq!(f.decompose(&ivec(&[2, 3])), Some(vec![BigInt::from(2), BigInt::from(3)]));
        assert_eq!(f.decompose(&ivec(&[-1, 3])), None);
    }
}
