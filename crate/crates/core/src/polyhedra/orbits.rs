use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::fan::{translate_rays, ConeDecomposition};
use crate::error::{Error, Result};
use crate::lattice::{AffineAction, AffineElement, CosetReducer, IVec};

pub const DEFAULT_MAX_ORBITS: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibilityWitness {
    pub generator: String,
    pub cone: Vec<IVec>,
    pub image: Vec<IVec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub stable: bool,
    pub orbit_count: Option<usize>,
    pub witnesses: Vec<AdmissibilityWitness>,
}

/// Checks that every generator of `Y x| Gamma` maps every cone of the
/// decomposition to a cone of the decomposition, and counts orbits of
/// nonzero cones when it does.
pub fn check_admissible(sigma: &ConeDecomposition, action: &AffineAction, max_orbits: usize) -> Result<AdmissibilityReport> {
    check_rank(sigma, action)?;
    let mut witnesses = Vec::new();
    for (name, g) in action.generators() {
        for c in sigma.cones() {
            let image: Vec<IVec> = c.extreme_rays().iter().map(|r| g.apply_ray(r)).collect();
            if sigma.locate(&image).is_none() {
                let mut image = image;
                image.sort();
                witnesses.push(AdmissibilityWitness { generator: name.clone(), cone: c.extreme_rays().to_vec(), image });
            }
        }
    }
    if !witnesses.is_empty() {
        return Ok(AdmissibilityReport { stable: false, orbit_count: None, witnesses });
    }
    let orbits = orbit_decomposition(sigma, action, max_orbits)?;
    Ok(AdmissibilityReport { stable: true, orbit_count: Some(orbits.orbits.len()), witnesses })
}

fn check_rank(sigma: &ConeDecomposition, action: &AffineAction) -> Result<()> {
    if sigma.rank() != action.rank {
        return Err(Error::DimensionMismatch { context: "group action", expected: sigma.rank(), found: action.rank });
    }
    Ok(())
}

/// One `Y x| Gamma` orbit of nonzero cones.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeOrbit {
    /// Dimension of the cones in the orbit.
    pub dim: usize,
    /// Lexicographically least ray list among the cones of the orbit lying over
    /// the fundamental domain of `b(Y)`.
    pub representative: Vec<IVec>,
    /// Index of the decomposition representative and the translation onto `representative`.
    pub class: usize,
    pub translation: IVec,
    /// Number of `b(Y)`-classes of cones in the orbit.
    pub classes_mod_y: usize,
    /// Elements of `Y x| Gamma` fixing `representative`.
    pub stabilizer: Vec<AffineElement>,
}

#[derive(Clone, Debug)]
pub struct OrbitDecomposition {
    pub orbits: Vec<ConeOrbit>,
    reducer: CosetReducer,
    element_orbit: HashMap<(usize, IVec), usize>,
}

impl OrbitDecomposition {
    /// Orbit containing the cone with these rays, if it belongs to the decomposition.
    pub fn locate(&self, sigma: &ConeDecomposition, rays: &[IVec]) -> Option<usize> {
        let face = sigma.locate(rays)?;
        let coords = integral_coordinates(sigma, &face.translation)?;
        self.element_orbit.get(&(face.cone, self.reducer.reduce(&coords))).copied()
    }

    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }
}

fn integral_coordinates(sigma: &ConeDecomposition, v: &[BigInt]) -> Option<IVec> {
    let c = sigma.periodicity().coordinates(v);
    c.iter().all(|x| x.is_integer()).then(|| c.iter().map(|x| x.to_integer()).collect())
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Orbits of `Y x| Gamma` on the nonzero cones, with representatives and
/// stabilizers. Requires `b(Y)` to lie in the period lattice of the
/// decomposition and the decomposition to be admissible.
pub fn orbit_decomposition(sigma: &ConeDecomposition, action: &AffineAction, max_orbits: usize) -> Result<OrbitDecomposition> {
    check_rank(sigma, action)?;
    let r = sigma.rank();
    let y_coords = action
        .translations
        .iter()
        .map(|t| integral_coordinates(sigma, t))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::InvalidData("the translations b(Y) do not lie in the period lattice".into()))?;
    let reducer = CosetReducer::new(&y_coords, r)?;
    let cosets = reducer.index().to_usize().filter(|&n| n.saturating_mul(sigma.cones().len()) <= max_orbits);
    let Some(cosets) = cosets else {
        return Err(Error::OrbitBound { limit: max_orbits });
    };
    let reps = reducer.representatives();
    debug_assert_eq!(reps.len(), cosets);
    let per = sigma.periodicity();

    let n_cones = sigma.cones().len();
    let id = |cone: usize, coset: usize| cone * cosets + coset;
    let coset_index: HashMap<IVec, usize> = reps.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
    let actual = |cone: usize, coset: usize| translate_rays(sigma.cones()[cone].extreme_rays(), &per.vector(&reps[coset]));

    let mut parent: Vec<usize> = (0..n_cones * cosets).collect();
    for (name, g) in &action.gamma_dual {
        let elt = AffineElement { translation: vec![BigInt::zero(); r], linear: g.clone() };
        for cone in 0..n_cones {
            for coset in 0..cosets {
                let image: Vec<IVec> = actual(cone, coset).iter().map(|ray| elt.apply_ray(ray)).collect();
                let face = sigma
                    .locate(&image)
                    .ok_or_else(|| Error::InvalidData(format!("generator {name} does not preserve the decomposition")))?;
                let coords = integral_coordinates(sigma, &face.translation).expect("canonical translations lie in P");
                let target = id(face.cone, coset_index[&reducer.reduce(&coords)]);
                let (a, b) = (find(&mut parent, id(cone, coset)), find(&mut parent, target));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }

    let mut members: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
    for cone in 0..n_cones {
        for coset in 0..cosets {
            let root = find(&mut parent, id(cone, coset));
            members.entry(root).or_default().push((cone, coset));
        }
    }

    let mut orbits = Vec::with_capacity(members.len());
    for group in members.values() {
        let (rays, cone, coset) = group
            .iter()
            .map(|&(cone, coset)| (actual(cone, coset), cone, coset))
            .min_by(|a, b| a.0.cmp(&b.0))
            .expect("orbit is nonempty");
        let shift = per.vector(&reps[coset]);
        let mut stabilizer = Vec::new();
        for gamma in &action.gamma_elements {
            let rotated: Vec<IVec> = rays
                .iter()
                .map(|ray| {
                    let mut v = gamma.apply(&ray[..r]);
                    v.push(ray[r].clone());
                    v
                })
                .collect();
            let Some(face) = sigma.locate(&rotated) else { continue };
            if face.cone != cone {
                continue;
            }
            // gamma(K) = rep + delta and K = rep + shift, so y acts by shift - delta.
            let diff: IVec = shift.iter().zip(&face.translation).map(|(a, b)| a - b).collect();
            if action.y_coordinates(&diff).is_some() {
                stabilizer.push(AffineElement { translation: diff, linear: gamma.clone() });
            }
        }
        orbits.push(ConeOrbit {
            dim: sigma.cones()[cone].dim(),
            representative: rays,
            class: cone,
            translation: shift,
            classes_mod_y: group.len(),
            stabilizer,
        });
    }
    orbits.sort_by(|a, b| a.dim.cmp(&b.dim).then_with(|| a.representative.cmp(&b.representative)));

    let mut element_orbit = HashMap::new();
    for (k, orbit) in orbits.iter().enumerate() {
        let root = find(
            &mut parent,
            id(orbit.class, coset_index[&reducer.reduce(&integral_coordinates(sigma, &orbit.translation).unwrap())]),
        );
        for &(cone, coset) in &members[&root] {
            element_orbit.insert((cone, reps[coset].clone()), k);
        }
    }
    Ok(OrbitDecomposition { orbits, reducer, element_orbit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{ivec, GroupAction, IntegerMatrix};

    fn tate_fan(n: i64) -> ConeDecomposition {
        let mut cones = Vec::new();
        for m in 0..n {
            cones.push(vec![ivec(&[m, 1])]);
            cones.push(vec![ivec(&[m, 1]), ivec(&[m + 1, 1])]);
        }
        ConeDecomposition::from_ray_lists(1, IntegerMatrix::from_i64(&[&[n]]), &cones).unwrap()
    }

    #[test]
    fn tate_orbits() {
        for n in 1..=5 {
            let act = AffineAction::translations_only(1, vec![ivec(&[n])]).unwrap();
            let report = check_admissible(&tate_fan(n), &act, DEFAULT_MAX_ORBITS).unwrap();
            assert!(report.stable);
            assert_eq!(report.orbit_count, Some(2 * n as usize));
        }
    }

    #[test]
    fn finer_period_than_y() {
        // Unit cells stored modulo Z, with Y acting by 3Z: three orbits of each kind.
        let fan = tate_fan(1);
        let act = AffineAction::translations_only(1, vec![ivec(&[3])]).unwrap();
        let orbits = orbit_decomposition(&fan, &act, DEFAULT_MAX_ORBITS).unwrap();
        assert_eq!(orbits.len(), 6);
        assert_eq!(orbits.locate(&fan, &[ivec(&[7, 1])]), orbits.locate(&fan, &[ivec(&[1, 1])]));
        assert_ne!(orbits.locate(&fan, &[ivec(&[7, 1])]), orbits.locate(&fan, &[ivec(&[2, 1])]));
    }

    #[test]
    fn sign_action_on_tate_curve() {
        // b = [2]: cells [0,1], [1,2] modulo 2Z; -1 swaps them, fixes 0, and fixes 1 up to translation by 2.
        let fan = tate_fan(2);
        let g = GroupAction::new(1, vec![("s".into(), IntegerMatrix::from_i64(&[&[-1]]))], Some(2), 3).unwrap();
        let act = AffineAction::new(1, vec![ivec(&[2])], &g).unwrap();
        let orbits = orbit_decomposition(&fan, &act, DEFAULT_MAX_ORBITS).unwrap();
        let dims: Vec<usize> = orbits.orbits.iter().map(|o| o.dim).collect();
        assert_eq!(dims, vec![1, 1, 2]);
        let sizes: Vec<usize> = orbits.orbits.iter().map(|o| o.stabilizer.len()).collect();
        assert_eq!(sizes, vec![2, 2, 1]);
        assert_eq!(orbits.orbits[1].stabilizer[0].translation, ivec(&[2]));
    }

    #[test]
    fn subdivided_cell_breaks_periodicity() {
        // Period 2Z with [0,1] subdivided at 1/2 but [1,2] not; b = [1] moves one onto the other.
        let cones = vec![
            vec![ivec(&[0, 1])],
            vec![ivec(&[1, 2])],
            vec![ivec(&[1, 1])],
            vec![ivec(&[0, 1]), ivec(&[1, 2])],
            vec![ivec(&[1, 2]), ivec(&[1, 1])],
            vec![ivec(&[1, 1]), ivec(&[2, 1])],
        ];
        let fan = ConeDecomposition::from_ray_lists(1, IntegerMatrix::from_i64(&[&[2]]), &cones).unwrap();
        let act = AffineAction::translations_only(1, vec![ivec(&[1])]).unwrap();
        let report = check_admissible(&fan, &act, DEFAULT_MAX_ORBITS).unwrap();
        assert!(!report.stable);
        assert!(!report.witnesses.is_empty());
        assert_eq!(report.witnesses[0].generator, "y0");
    }

    #[test]
    fn orbit_bound() {
        let act = AffineAction::translations_only(1, vec![ivec(&[1000])]).unwrap();
        assert!(matches!(orbit_decomposition(&tate_fan(1), &act, 100), Err(Error::OrbitBound { .. })));
    }
}
