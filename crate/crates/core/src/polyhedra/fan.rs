use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::cone::{slice_point, RationalCone};
use crate::error::{Error, Result};
use crate::lattice::rational::{to_qvec, QVec, RatMatrix};
use crate::lattice::{dot, IVec, IntegerMatrix, Lattice};

/// Periodic indexing of cones over a lattice `P` of translations of the slice.
#[derive(Clone, Debug)]
pub(crate) struct Periodicity {
    rank: usize,
    period: IntegerMatrix,
    inverse: RatMatrix,
}

impl Periodicity {
    pub fn new(period: &IntegerMatrix) -> Result<Self> {
        let rank = period.rows();
        if period.cols() != rank {
            return Err(Error::DimensionMismatch { context: "period lattice", expected: rank, found: period.cols() });
        }
        if rank > 0 && period.determinant()?.is_zero() {
            return Err(Error::InvalidData("period lattice is not of full rank".into()));
        }
        Ok(Self { rank, period: period.clone(), inverse: RatMatrix::from_int(period).inverse()? })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn period(&self) -> &IntegerMatrix {
        &self.period
    }

    /// Coordinates of `v` in the period basis.
    pub fn coordinates(&self, v: &[BigInt]) -> QVec {
        self.inverse.apply(&to_qvec(v))
    }

    pub fn vector(&self, coords: &[BigInt]) -> IVec {
        self.period.apply(coords)
    }

    /// Splits a nonzero cone (given by rays of positive height) as
    /// `canonical + mu` with `mu` in `P`, where the lexicographically least
    /// slice vertex of `canonical` lies in the fundamental parallelepiped.
    pub fn canonical(&self, rays: &[IVec]) -> (Vec<IVec>, IVec) {
        let least = rays.iter().map(|r| slice_point(r)).min().expect("nonzero cone has rays");
        let coords = self.inverse.apply(&least);
        let floors: IVec = coords.iter().map(|c| c.floor().to_integer()).collect();
        let mu = self.period.apply(&floors);
        let mut shifted: Vec<IVec> = rays.iter().map(|r| translate_ray(r, &mu, true)).collect();
        shifted.sort();
        (shifted, mu)
    }
}

/// `(v, h) -> (v + h mu, h)`, or `(v - h mu, h)` when `subtract` is set.
pub(crate) fn translate_ray(ray: &[BigInt], mu: &[BigInt], subtract: bool) -> IVec {
    let r = mu.len();
    let h = &ray[r];
    let mut out: IVec = ray[..r].iter().zip(mu).map(|(x, m)| if subtract { x - h * m } else { x + h * m }).collect();
    out.push(h.clone());
    out
}

pub(crate) fn translate_rays(rays: &[IVec], mu: &[BigInt]) -> Vec<IVec> {
    let mut out: Vec<IVec> = rays.iter().map(|r| translate_ray(r, mu, false)).collect();
    out.sort();
    out
}

/// Reference to `cones[cone] + translation`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FaceRef {
    pub cone: usize,
    pub translation: IVec,
}

/// A decomposition of `C` stored as representatives modulo a lattice `P` of
/// slice translations. The zero cone is implicit.
#[derive(Clone, Debug)]
pub struct ConeDecomposition {
    rank: usize,
    periodicity: Periodicity,
    cones: Vec<RationalCone>,
    /// Proper nonzero faces of each cone that were found among the representatives.
    face_relation: Vec<Vec<FaceRef>>,
    missing_faces: Vec<(usize, Vec<IVec>)>,
    central_ray_index: Option<usize>,
    index: HashMap<Vec<IVec>, usize>,
}

impl ConeDecomposition {
    /// `rank` is the rank of `X^dual`; cones live in `N = X^dual (+) Z`.
    pub fn new(rank: usize, period: IntegerMatrix, cones: Vec<RationalCone>) -> Result<Self> {
        let periodicity = Periodicity::new(&period)?;
        if periodicity.rank() != rank {
            return Err(Error::DimensionMismatch { context: "period lattice", expected: rank, found: periodicity.rank() });
        }
        let ambient = Lattice::n(rank);
        let mut canonical = Vec::with_capacity(cones.len());
        for cone in cones {
            if cone.ambient().rank != rank + 1 {
                return Err(Error::DimensionMismatch { context: "fan cone", expected: rank + 1, found: cone.ambient().rank });
            }
            if cone.dim() == 0 {
                continue;
            }
            if !cone.is_strongly_convex() || cone.extreme_rays().iter().any(|r| !r[rank].is_positive()) {
                // Kept as-is so that check_decomposition can report it.
                canonical.push(cone);
                continue;
            }
            let (rays, mu) = periodicity.canonical(cone.extreme_rays());
            canonical.push(if mu.iter().all(Zero::is_zero) { cone } else { RationalCone::from_rays(ambient, &rays)? });
        }
        canonical.sort_by(|a, b| a.dim().cmp(&b.dim()).then_with(|| a.extreme_rays().cmp(b.extreme_rays())));

        let mut index = HashMap::new();
        for (i, c) in canonical.iter().enumerate() {
            index.entry(c.extreme_rays().to_vec()).or_insert(i);
        }
        let mut face_relation = Vec::with_capacity(canonical.len());
        let mut missing_faces = Vec::new();
        for (i, c) in canonical.iter().enumerate() {
            let mut refs = Vec::new();
            if c.is_strongly_convex() && c.extreme_rays().iter().all(|r| r[rank].is_positive()) {
                for set in c.face_ray_sets() {
                    if set.is_empty() || set.len() == c.extreme_rays().len() {
                        continue;
                    }
                    let rays: Vec<IVec> = set.iter().map(|&k| c.extreme_rays()[k].clone()).collect();
                    let (key, mu) = periodicity.canonical(&rays);
                    match index.get(&key) {
                        Some(&j) => refs.push(FaceRef { cone: j, translation: mu }),
                        None => missing_faces.push((i, rays)),
                    }
                }
            }
            face_relation.push(refs);
        }
        let mut central = vec![BigInt::zero(); rank];
        central.push(BigInt::from(1));
        let (key, _) = periodicity.canonical(&[central]);
        let central_ray_index = index.get(&key).copied();
        Ok(Self { rank, periodicity, cones: canonical, face_relation, missing_faces, central_ray_index, index })
    }

    /// Builds the representatives from ray lists.
    pub fn from_ray_lists(rank: usize, period: IntegerMatrix, cones: &[Vec<IVec>]) -> Result<Self> {
        let ambient = Lattice::n(rank);
        let cones = cones.iter().map(|rays| RationalCone::from_rays(ambient, rays)).collect::<Result<Vec<_>>>()?;
        Self::new(rank, period, cones)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn ambient(&self) -> Lattice {
        Lattice::n(self.rank)
    }

    pub fn period(&self) -> &IntegerMatrix {
        self.periodicity.period()
    }

    pub(crate) fn periodicity(&self) -> &Periodicity {
        &self.periodicity
    }

    /// Nonzero representatives, sorted by dimension then rays.
    pub fn cones(&self) -> &[RationalCone] {
        &self.cones
    }

    pub fn face_relation(&self) -> &[Vec<FaceRef>] {
        &self.face_relation
    }

    pub fn central_ray_index(&self) -> Option<usize> {
        self.central_ray_index
    }

    /// Index of the representative equivalent to the cone with these rays, with the translation.
    pub fn locate(&self, rays: &[IVec]) -> Option<FaceRef> {
        if rays.is_empty() || rays.iter().any(|r| !r[self.rank].is_positive()) {
            return None;
        }
        let (key, mu) = self.periodicity.canonical(rays);
        self.index.get(&key).map(|&cone| FaceRef { cone, translation: mu })
    }

    /// Representatives that are not a proper face of another representative.
    pub fn maximal_cones(&self) -> Vec<usize> {
        let mut is_face = vec![false; self.cones.len()];
        for refs in &self.face_relation {
            for f in refs {
                is_face[f.cone] = true;
            }
        }
        (0..self.cones.len()).filter(|&i| !is_face[i]).collect()
    }

    /// Representatives of each cone dimension (1 = rays, ..., rank + 1 = maximal).
    pub fn count_by_dim(&self) -> Vec<usize> {
        let mut counts = vec![0; self.rank + 2];
        for c in &self.cones {
            counts[c.dim()] += 1;
        }
        counts
    }

    /// Returns a copy with one representative removed (for mutation tests).
    pub fn without_cone(&self, i: usize) -> Result<Self> {
        let mut cones = self.cones.clone();
        cones.remove(i);
        Self::new(self.rank, self.period().clone(), cones)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    NotStronglyConvex,
    OutsideSupport,
    DuplicateCone,
    MissingCentralRay,
    MissingFace,
    BadIntersection,
    LowerDimensionalMaximalCone,
    CoverageGap,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub message: String,
    /// Witness cones given by their rays.
    pub cones: Vec<Vec<IVec>>,
    /// Witness point on the height-one slice, as rational strings.
    pub point: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

#[derive(Clone, Copy, Debug)]
pub struct DecompositionOptions {
    /// Number of subdivisions per period vector for the coverage grid.
    pub grid_density: usize,
}

impl Default for DecompositionOptions {
    fn default() -> Self {
        Self { grid_density: 4 }
    }
}

fn qstrings(v: &[BigRational]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

fn slice_bbox(rays: &[IVec]) -> (QVec, QVec) {
    let pts: Vec<QVec> = rays.iter().map(|r| slice_point(r)).collect();
    let r = pts[0].len();
    let lo = (0..r).map(|k| pts.iter().map(|p| p[k].clone()).min().unwrap()).collect();
    let hi = (0..r).map(|k| pts.iter().map(|p| p[k].clone()).max().unwrap()).collect();
    (lo, hi)
}

/// Period translations `mu` with `lo <= mu <= hi` coordinatewise.
fn translations_in_box(per: &Periodicity, lo: &[BigRational], hi: &[BigRational]) -> Vec<IVec> {
    let r = per.rank();
    if r == 0 {
        return vec![Vec::new()];
    }
    // Bound period coordinates through the images of the box corners.
    let mut zlo: Vec<BigInt> = Vec::new();
    let mut zhi: Vec<BigInt> = Vec::new();
    for corner in 0..(1usize << r) {
        let p: QVec = (0..r).map(|k| if corner >> k & 1 == 1 { hi[k].clone() } else { lo[k].clone() }).collect();
        let c = per.inverse.apply(&p);
        for k in 0..r {
            let f = c[k].floor().to_integer();
            let g = c[k].ceil().to_integer();
            if zlo.len() < r {
                zlo.push(f);
                zhi.push(g);
            } else {
                if f < zlo[k] {
                    zlo[k] = f;
                }
                if g > zhi[k] {
                    zhi[k] = g;
                }
            }
        }
    }
    let mut out = Vec::new();
    let mut z = zlo.clone();
    loop {
        let mu = per.vector(&z);
        let inside = (0..r).all(|k| {
            let m = BigRational::from_integer(mu[k].clone());
            m >= lo[k] && m <= hi[k]
        });
        if inside {
            out.push(mu);
        }
        let mut k = 0;
        loop {
            if k == r {
                return out;
            }
            z[k] += 1;
            if z[k] <= zhi[k] {
                break;
            }
            z[k] = zlo[k].clone();
            k += 1;
        }
    }
}

/// Verifies the fan axioms on the representatives: strong convexity and
/// support in `C`, presence of the central ray, closure under faces, proper
/// pairwise intersections of maximal cones (against all overlapping period
/// translates) and coverage of the slice. Coverage is certified by checking
/// that every wall lies in exactly two maximal cells on opposite sides; a
/// grid over the fundamental parallelepiped of `P` supplies witness points.
pub fn check_decomposition(sigma: &ConeDecomposition, options: &DecompositionOptions) -> DecompositionReport {
    let mut violations = Vec::new();
    let r = sigma.rank;
    let per = &sigma.periodicity;
    let ambient = sigma.ambient();

    let mut sane = vec![true; sigma.cones.len()];
    for (i, c) in sigma.cones.iter().enumerate() {
        if !c.is_strongly_convex() {
            sane[i] = false;
            violations.push(Violation {
                kind: ViolationKind::NotStronglyConvex,
                message: format!("cone {i} contains a line"),
                cones: vec![c.rays()],
                point: None,
            });
        } else if c.extreme_rays().iter().any(|ray| !ray[r].is_positive()) {
            sane[i] = false;
            violations.push(Violation {
                kind: ViolationKind::OutsideSupport,
                message: format!("cone {i} has a ray of non-positive height"),
                cones: vec![c.rays()],
                point: None,
            });
        }
    }
    for w in 1..sigma.cones.len() {
        if sigma.cones[w].extreme_rays() == sigma.cones[w - 1].extreme_rays() {
            violations.push(Violation {
                kind: ViolationKind::DuplicateCone,
                message: format!("cones {} and {w} coincide modulo the period lattice", w - 1),
                cones: vec![sigma.cones[w].rays()],
                point: None,
            });
        }
    }
    if sigma.central_ray_index.is_none() {
        violations.push(Violation {
            kind: ViolationKind::MissingCentralRay,
            message: "the ray {0} x R_{>=0} is not a cone of the decomposition".into(),
            cones: Vec::new(),
            point: Some(vec!["0".into(); r]),
        });
    }
    for (i, rays) in &sigma.missing_faces {
        violations.push(Violation {
            kind: ViolationKind::MissingFace,
            message: format!("a face of cone {i} is not in the decomposition"),
            cones: vec![sigma.cones[*i].rays(), rays.clone()],
            point: None,
        });
    }

    let maximal: Vec<usize> = sigma.maximal_cones().into_iter().filter(|&i| sane[i]).collect();
    let boxes: HashMap<usize, (QVec, QVec)> = maximal.iter().map(|&i| (i, slice_bbox(sigma.cones[i].extreme_rays()))).collect();

    // Pairwise intersections.
    for (a, &i) in maximal.iter().enumerate() {
        for &j in &maximal[a..] {
            let (lo_i, hi_i) = &boxes[&i];
            let (lo_j, hi_j) = &boxes[&j];
            let lo: QVec = lo_i.iter().zip(hi_j).map(|(x, y)| x - y).collect();
            let hi: QVec = hi_i.iter().zip(lo_j).map(|(x, y)| x - y).collect();
            for mu in translations_in_box(per, &lo, &hi) {
                if i == j && mu.iter().all(Zero::is_zero) {
                    continue;
                }
                let ci = &sigma.cones[i];
                let moved = translate_rays(sigma.cones[j].extreme_rays(), &mu);
                let Ok(cj) = RationalCone::from_rays(ambient, &moved) else { continue };
                let Ok(meet) = ci.intersect(&cj) else { continue };
                let is_face_of = |c: &RationalCone| {
                    c.face_ray_sets().iter().any(|set| {
                        let mut rays: Vec<IVec> = set.iter().map(|&k| c.extreme_rays()[k].clone()).collect();
                        rays.sort();
                        rays == meet.extreme_rays()
                    })
                };
                if !(is_face_of(ci) && is_face_of(&cj)) {
                    violations.push(Violation {
                        kind: ViolationKind::BadIntersection,
                        message: format!("cones {i} and {j} (translated) meet in a non-face"),
                        cones: vec![ci.rays(), cj.rays()],
                        point: Some(qstrings(&slice_point(&meet.interior_point()))),
                    });
                }
            }
        }
    }

    // Coverage.
    let mut full = Vec::new();
    for &i in &maximal {
        if sigma.cones[i].dim() != r + 1 {
            violations.push(Violation {
                kind: ViolationKind::LowerDimensionalMaximalCone,
                message: format!("maximal cone {i} has dimension {} < {}", sigma.cones[i].dim(), r + 1),
                cones: vec![sigma.cones[i].rays()],
                point: None,
            });
        } else {
            full.push(i);
        }
    }
    if r > 0 {
        // Walls: cones of dimension r, with the maximal cells containing them.
        let mut sides: HashMap<usize, Vec<std::cmp::Ordering>> = HashMap::new();
        for &f in &full {
            for face in &sigma.face_relation[f] {
                let wall = &sigma.cones[face.cone];
                if wall.dim() != r {
                    continue;
                }
                // Neighbor is cones[f] - translation; measure on which side of the wall it lies.
                let eq = &wall.equations()[0];
                let interior = translate_ray(&sigma.cones[f].interior_point(), &face.translation, true);
                let side = dot(eq, &interior).cmp(&BigInt::zero());
                sides.entry(face.cone).or_default().push(side);
            }
        }
        for (w, wall) in sigma.cones.iter().enumerate() {
            if wall.dim() != r || !sane[w] {
                continue;
            }
            let s = sides.get(&w).cloned().unwrap_or_default();
            let opposite = s.len() == 2 && s[0] != s[1];
            if !opposite {
                let bary = slice_point(&wall.interior_point());
                violations.push(Violation {
                    kind: ViolationKind::CoverageGap,
                    message: format!("wall {w} borders {} maximal cell(s) instead of two on opposite sides", s.len()),
                    cones: vec![wall.rays()],
                    point: Some(qstrings(&bary)),
                });
            }
        }
    } else if full.is_empty() {
        violations.push(Violation {
            kind: ViolationKind::CoverageGap,
            message: "the slice point is not covered".into(),
            cones: Vec::new(),
            point: Some(Vec::new()),
        });
    }

    // Grid witnesses over the closed fundamental parallelepiped.
    let g = options.grid_density.max(1);
    if r > 0 && !full.is_empty() {
        let total = (g + 1).pow(r as u32);
        for idx in 0..total {
            let mut rem = idx;
            let coords: QVec = (0..r)
                .map(|_| {
                    let k = rem % (g + 1);
                    rem /= g + 1;
                    BigRational::new(BigInt::from(k), BigInt::from(g))
                })
                .collect();
            let pm = RatMatrix::from_int(per.period());
            let xi = pm.apply(&coords);
            let mut point = xi.clone();
            point.push(BigRational::from_integer(BigInt::from(1)));
            let covered = full.iter().any(|&i| {
                let (lo, hi) = &boxes[&i];
                let lo_t: QVec = xi.iter().zip(hi).map(|(x, h)| x - h).collect();
                let hi_t: QVec = xi.iter().zip(lo).map(|(x, l)| x - l).collect();
                translations_in_box(per, &lo_t, &hi_t).iter().any(|mu| {
                    let mut shifted = point.clone();
                    for k in 0..r {
                        shifted[k] -= BigRational::from_integer(mu[k].clone());
                    }
                    sigma.cones[i].contains_rational(&shifted)
                })
            });
            if !covered {
                violations.push(Violation {
                    kind: ViolationKind::CoverageGap,
                    message: "grid point of the fundamental domain is not covered".into(),
                    cones: Vec::new(),
                    point: Some(qstrings(&xi)),
                });
                break;
            }
        }
    }

    DecompositionReport { valid: violations.is_empty(), violations }
}
