use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::data::DegenerationData;
use super::delaunay::{lower_hull_star, DelaunayCells};
use crate::error::{Error, Result};
use crate::lattice::rational::{qdot, solve_in_span, to_qvec, QVec, RatMatrix};
use crate::lattice::{AffineAction, CosetReducer, IVec, IntegerMatrix};
use crate::polyhedra::{translate_rays, ConeDecomposition};

/// Affine form `xi -> form[..r] . xi + form[r]` of the polarization on one maximal cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolarizationForm {
    pub cone: usize,
    pub translation: IVec,
    pub form: QVec,
}

/// A piecewise affine function on the slice, twisted-periodic under `b(Y)`.
///
/// `values` are given on representatives of `X^dual / b(Y)`; elsewhere
/// `h(xi + b(y, .)) = h(xi) + twist(xi, y)` with
/// `twist(xi, y) = 2 <xi, phi(y)> + b(y, phi(y)) + sum y_i (a_i - b(y_i, phi(y_i)))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolarizationFunction {
    pub rank: usize,
    pub k: BigInt,
    pub pairing: IntegerMatrix,
    pub phi: IntegerMatrix,
    pub translations: Vec<IVec>,
    pub a: Vec<BigInt>,
    #[serde(with = "crate::serial::pairs")]
    pub values: BTreeMap<IVec, BigRational>,
    /// Forms on every maximal cone modulo `b(Y)`.
    pub forms: Vec<PolarizationForm>,
}

fn sub(a: &[BigInt], b: &[BigInt]) -> IVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Cosets of `b(Y)` in the period lattice of `sigma`, as period vectors.
fn period_cosets(sigma: &ConeDecomposition, translations: &[IVec]) -> Result<(CosetReducer, Vec<IVec>)> {
    let per = sigma.periodicity();
    let coords = translations
        .iter()
        .map(|t| {
            let c = per.coordinates(t);
            c.iter().all(|x| x.is_integer()).then(|| c.iter().map(|x| x.to_integer()).collect::<IVec>())
        })
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::InvalidData("the translations b(Y) do not lie in the period lattice".into()))?;
    let reducer = CosetReducer::new(&coords, sigma.rank())?;
    let reps = reducer.representatives().iter().map(|c| per.vector(c)).collect();
    Ok((reducer, reps))
}

fn affine_interpolation(points: &[IVec], values: &[BigRational]) -> Option<QVec> {
    let r = points[0].len();
    let mut columns: Vec<QVec> =
        (0..r).map(|k| points.iter().map(|p| BigRational::from_integer(p[k].clone())).collect()).collect();
    columns.push(vec![BigRational::one(); points.len()]);
    solve_in_span(&columns, values)
}

fn eval(form: &[BigRational], point: &[BigInt]) -> BigRational {
    let r = point.len();
    qdot(&form[..r], &to_qvec(point)) + &form[r]
}

impl PolarizationFunction {
    fn reducer(&self) -> Result<CosetReducer> {
        CosetReducer::new(&self.translations, self.rank)
    }

    fn y_coordinates(&self, v: &[BigInt]) -> Option<IVec> {
        if self.rank == 0 {
            return Some(Vec::new());
        }
        let m = RatMatrix::from_int(&IntegerMatrix::from_columns(&self.translations, self.rank).ok()?);
        let y = m.solve(&to_qvec(v)).ok()?;
        y.iter().all(|x| x.is_integer()).then(|| y.iter().map(|x| x.to_integer()).collect())
    }

    fn phi_y(&self, y: &[BigInt]) -> QVec {
        to_qvec(&self.phi.apply(y))
    }

    fn twist_constant(&self, y: &[BigInt]) -> BigRational {
        let sy = self.pairing.apply(y);
        let mut c: BigInt = y.iter().zip(&sy).map(|(a, b)| a * b).sum();
        for (i, yi) in y.iter().enumerate() {
            c += yi * (&self.a[i] - &self.pairing[(i, i)]);
        }
        BigRational::from_integer(c)
    }

    /// `h(xi + b(y, .)) - h(xi)`.
    pub fn twist(&self, xi: &[BigRational], y: &[BigInt]) -> BigRational {
        let two = BigRational::from_integer(BigInt::from(2));
        two * qdot(xi, &self.phi_y(y)) + self.twist_constant(y)
    }

    pub fn value_at(&self, v: &[BigInt]) -> Option<BigRational> {
        let reducer = self.reducer().ok()?;
        let base = reducer.reduce(v);
        let y = self.y_coordinates(&sub(v, &base))?;
        Some(self.values.get(&base)? + self.twist(&to_qvec(&base), &y))
    }

    /// Form on `cones[cone] + translation`, transported from the stored one by the twist.
    pub fn form_of(&self, sigma: &ConeDecomposition, cone: usize, translation: &[BigInt]) -> Option<QVec> {
        let (reducer, _) = period_cosets(sigma, &self.translations).ok()?;
        let per = sigma.periodicity();
        let coords: IVec = per.coordinates(translation).iter().map(|x| x.to_integer()).collect();
        let base = per.vector(&reducer.reduce(&coords));
        let stored = self.forms.iter().find(|f| f.cone == cone && f.translation == base)?;
        let tau = sub(translation, &base);
        let y = self.y_coordinates(&tau)?;
        let r = self.rank;
        let two = BigRational::from_integer(BigInt::from(2));
        let py = self.phi_y(&y);
        let tq = to_qvec(&tau);
        let mut out: QVec = stored.form[..r].iter().zip(&py).map(|(w, p)| w + &two * p).collect();
        out.push(&stored.form[r] - qdot(&stored.form[..r], &tq) - &two * qdot(&tq, &py) + self.twist_constant(&y));
        Some(out)
    }
}

/// The polarization `h = q + l` interpolated on the cells of `sigma`, after
/// checking that the lower hull of the lifted lattice has the Delaunay cells
/// as its linearity domains.
pub fn polarization_from_form(
    data: &DegenerationData,
    cells: &DelaunayCells,
    sigma: &ConeDecomposition,
) -> Result<PolarizationFunction> {
    let r = data.rank;
    let q = cells.form_matrix();
    let hull = lower_hull_star(&q)?;
    if hull != cells.star {
        return Err(Error::LinearityMismatch(format!(
            "{} lower hull cells through the origin against {} Delaunay cells",
            hull.len(),
            cells.star.len()
        )));
    }
    let translations = data.translations();
    let s = data.pairing_form();
    // l(b(y_i, .)) = a_i - b(y_i, phi(y_i)).
    let linear: QVec = if r == 0 {
        Vec::new()
    } else {
        let c: QVec = (0..r).map(|i| BigRational::from_integer(&data.a[i] - &s[(i, i)])).collect();
        RatMatrix::from_int(&data.b).inverse()?.apply(&c)
    };
    let mut h = PolarizationFunction {
        rank: r,
        k: BigInt::one(),
        pairing: s,
        phi: data.phi.clone(),
        translations: translations.clone(),
        a: data.a.clone(),
        values: BTreeMap::new(),
        forms: Vec::new(),
    };
    if r == 0 {
        h.values.insert(Vec::new(), BigRational::zero());
        return Ok(h);
    }
    let reducer = CosetReducer::new(&translations, r)?;
    for base in reducer.representatives() {
        let bq = to_qvec(&base);
        h.values.insert(base, q.bilinear(&bq, &bq) + qdot(&linear, &bq));
    }
    let (_, reps) = period_cosets(sigma, &translations)?;
    let mut k = BigInt::one();
    for i in sigma.maximal_cones() {
        for nu in &reps {
            let rays = translate_rays(sigma.cones()[i].extreme_rays(), nu);
            let points: Vec<IVec> = rays.iter().map(|ray| ray[..r].to_vec()).collect();
            let vals = points
                .iter()
                .map(|p| h.value_at(p).ok_or_else(|| Error::Internal("value outside the stored classes".into())))
                .collect::<Result<Vec<_>>>()?;
            let form = affine_interpolation(&points, &vals)
                .ok_or_else(|| Error::LinearityMismatch(format!("values on cell {points:?} are not affine")))?;
            for x in &form {
                k = k.lcm(x.denom());
            }
            h.forms.push(PolarizationForm { cone: i, translation: nu.clone(), form });
        }
    }
    h.k = k;
    Ok(h)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolarizationWitness {
    pub clause: String,
    pub cone: Vec<IVec>,
    pub wall: Option<Vec<IVec>>,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolarizationReport {
    pub passed: bool,
    /// `(clause, passed)` for piecewise linearity, integrality, strict convexity, twist equivariance, invariance.
    pub clauses: Vec<(String, bool)>,
    pub witnesses: Vec<PolarizationWitness>,
}

pub const CLAUSES: [&str; 5] = ["piecewise_linear", "integral", "strictly_convex", "twist_equivariant", "gamma_invariant"];

/// Verifies the polarization function clause by clause on representatives.
pub fn check_polarization(
    h: &PolarizationFunction,
    sigma: &ConeDecomposition,
    action: &AffineAction,
) -> Result<PolarizationReport> {
    let r = h.rank;
    let mut witnesses: Vec<PolarizationWitness> = Vec::new();
    let mut failed = [false; 5];
    let mut fail =
        |idx: usize, cone: Vec<IVec>, wall: Option<Vec<IVec>>, message: String, witnesses: &mut Vec<PolarizationWitness>| {
            failed[idx] = true;
            witnesses.push(PolarizationWitness { clause: CLAUSES[idx].into(), cone, wall, message });
        };
    if r == 0 {
        return Ok(PolarizationReport {
            passed: true,
            clauses: CLAUSES.iter().map(|c| (c.to_string(), true)).collect(),
            witnesses,
        });
    }
    let points_of = |rays: &[IVec]| -> Result<Vec<IVec>> {
        rays.iter()
            .map(|ray| {
                if !ray[r].is_one() {
                    return Err(Error::InvalidData("polarization requires integral slice vertices".into()));
                }
                Ok(ray[..r].to_vec())
            })
            .collect()
    };
    let (_, reps) = period_cosets(sigma, &h.translations)?;
    let maximal = sigma.maximal_cones();

    // (i) piecewise linearity and (ii) integrality.
    for f in &h.forms {
        let rays = translate_rays(sigma.cones()[f.cone].extreme_rays(), &f.translation);
        for (j, p) in points_of(&rays)?.iter().enumerate() {
            let value = h.value_at(p);
            if value.as_ref() != Some(&eval(&f.form, p)) {
                let wall = facet_through(&sigma.cones()[f.cone], j).map(|facet| translate_rays(&facet, &f.translation));
                fail(0, rays.clone(), wall, format!("form disagrees with the value at vertex {p:?}"), &mut witnesses);
                break;
            }
        }
        let kq = BigRational::from_integer(h.k.clone());
        if !h.k.is_positive_int() || f.form.iter().any(|x| !(x * &kq).is_integer()) {
            fail(1, rays, None, format!("k = {} does not clear the denominators", h.k), &mut witnesses);
        }
    }
    if maximal.iter().any(|&i| reps.iter().any(|nu| !h.forms.iter().any(|f| f.cone == i && &f.translation == nu))) {
        fail(0, Vec::new(), None, "a maximal cone has no stored form".into(), &mut witnesses);
    }

    // (iii) strict convexity across each wall.
    for &fi in &maximal {
        for face in &sigma.face_relation()[fi] {
            let wall_cone = &sigma.cones()[face.cone];
            if wall_cone.dim() != r {
                continue;
            }
            // The wall W = cones[face.cone] lies in cones[fi] - t; find its other neighbour.
            let neg_t: IVec = face.translation.iter().map(|x| -x).collect();
            for nu in &reps {
                let wall_rays = translate_rays(wall_cone.extreme_rays(), nu);
                let shift1: IVec = neg_t.iter().zip(nu).map(|(a, b)| a + b).collect();
                let n1 = translate_rays(sigma.cones()[fi].extreme_rays(), &shift1);
                let Some(other) = maximal
                    .iter()
                    .flat_map(|&g| sigma.face_relation()[g].iter().filter(move |f2| f2.cone == face.cone).map(move |f2| (g, f2)))
                    .map(|(g, f2)| {
                        let s: IVec = f2.translation.iter().zip(nu).map(|(a, b)| b - a).collect();
                        (g, s)
                    })
                    .find(|(g, s)| !(*g == fi && *s == shift1))
                else {
                    continue;
                };
                let n2 = translate_rays(sigma.cones()[other.0].extreme_rays(), &other.1);
                let (Some(a1), Some(a2)) = (h.form_of(sigma, fi, &shift1), h.form_of(sigma, other.0, &other.1)) else {
                    fail(2, n1.clone(), Some(wall_rays.clone()), "missing form on a neighbouring cell".into(), &mut witnesses);
                    continue;
                };
                for (near, far, cone) in [(&a1, &n2, &n1), (&a2, &n1, &n2)] {
                    let beyond = far.iter().find(|ray| !wall_rays.contains(ray)).expect("maximal cell has a vertex off the wall");
                    let p = &beyond[..r];
                    let value = h.value_at(p);
                    if value.as_ref().is_none_or(|v| *v <= eval(near, p)) {
                        fail(
                            2,
                            cone.clone(),
                            Some(wall_rays.clone()),
                            format!("no positive bend at vertex {p:?}"),
                            &mut witnesses,
                        );
                    }
                }
            }
        }
    }

    // (iv) twist equivariance on each maximal cell and generator of Y.
    let two = BigRational::from_integer(BigInt::from(2));
    for f in &h.forms {
        for (j, tau) in h.translations.iter().enumerate() {
            let shifted: IVec = f.translation.iter().zip(tau).map(|(a, b)| a + b).collect();
            let rays = translate_rays(sigma.cones()[f.cone].extreme_rays(), &shifted);
            let points = points_of(&rays)?;
            let vals: Option<Vec<BigRational>> = points.iter().map(|p| h.value_at(p)).collect();
            let moved = vals.and_then(|v| affine_interpolation(&points, &v));
            let mut y = vec![BigInt::zero(); r];
            y[j] = BigInt::one();
            let py = to_qvec(&h.phi.apply(&y));
            let tq = to_qvec(tau);
            let expected: Option<QVec> = Some({
                let mut e: QVec = f.form[..r].iter().zip(&py).map(|(w, p)| w + &two * p).collect();
                e.push(&f.form[r] - qdot(&f.form[..r], &tq) - &two * qdot(&tq, &py) + BigRational::from_integer(h.a[j].clone()));
                e
            });
            if moved != expected {
                fail(3, rays, None, format!("translation by y{j} does not change h by the twist"), &mut witnesses);
            }
        }
    }

    // (v) invariance under Gamma.
    for (name, g) in &action.gamma_dual {
        for base in h.values.keys() {
            let image = g.apply(base);
            if h.value_at(&image) != h.value_at(base) {
                fail(4, Vec::new(), None, format!("{name} changes the value at {base:?}"), &mut witnesses);
            }
        }
        for f in &h.forms {
            let rays = translate_rays(sigma.cones()[f.cone].extreme_rays(), &f.translation);
            let image: Vec<IVec> = rays
                .iter()
                .map(|ray| {
                    let mut v = g.apply(&ray[..r]);
                    v.push(ray[r].clone());
                    v
                })
                .collect();
            let Some(at) = sigma.locate(&image) else {
                fail(4, rays, None, format!("{name} does not preserve the decomposition"), &mut witnesses);
                continue;
            };
            let Some(img_form) = h.form_of(sigma, at.cone, &at.translation) else { continue };
            let points = points_of(&rays)?;
            if points.iter().any(|p| eval(&img_form, &g.apply(p)) != eval(&f.form, p)) {
                fail(4, rays, None, format!("{name} does not preserve the form"), &mut witnesses);
            }
        }
    }

    let clauses: Vec<(String, bool)> = CLAUSES.iter().zip(failed).map(|(c, f)| (c.to_string(), !f)).collect();
    Ok(PolarizationReport { passed: clauses.iter().all(|(_, ok)| *ok), clauses, witnesses })
}

/// Rays of a facet of `cone` containing its `j`-th extreme ray.
fn facet_through(cone: &crate::polyhedra::RationalCone, j: usize) -> Option<Vec<IVec>> {
    let n = cone.extreme_rays().len();
    let sets: Vec<_> = cone.face_ray_sets().into_iter().filter(|s| s.len() < n).collect();
    let facet = sets.iter().filter(|s| s.contains(&j)).find(|s| !sets.iter().any(|t| t.len() > s.len() && t.is_superset(s)))?;
    Some(facet.iter().map(|&k| cone.extreme_rays()[k].clone()).collect())
}

trait PositiveInt {
    fn is_positive_int(&self) -> bool;
}

impl PositiveInt for BigInt {
    fn is_positive_int(&self) -> bool {
        *self > BigInt::zero()
    }
}
