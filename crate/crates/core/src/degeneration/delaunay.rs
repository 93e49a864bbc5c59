use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::data::DegenerationData;
use crate::error::{Error, Result};
use crate::lattice::rational::{clear_denominators, qdot, rat, to_qvec, QVec, RatMatrix};
use crate::lattice::{IVec, IntegerMatrix, Lattice};
use crate::polyhedra::dd::cone_generators;
use crate::polyhedra::{ConeDecomposition, Periodicity, RationalCone};

/// Delaunay cells of `X^dual` for a positive definite form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DelaunayCells {
    pub rank: usize,
    /// The form on `X^dual_R`, row-major.
    pub form: Vec<BigRational>,
    /// Upper bound for the squared covering radius.
    pub covering_bound: BigRational,
    /// Maximal cells through the origin, as sorted vertex lists.
    pub star: Vec<Vec<IVec>>,
    /// Maximal cells modulo `X^dual`, each translated so that its least vertex is the origin.
    pub cells: Vec<Vec<IVec>>,
}

impl DelaunayCells {
    pub fn form_matrix(&self) -> RatMatrix {
        RatMatrix { rows: self.rank, cols: self.rank, entries: self.form.clone() }
    }
}

fn quad(g: &RatMatrix, v: &[BigRational]) -> BigRational {
    g.bilinear(v, v)
}

fn round(x: &BigRational) -> BigInt {
    (x + rat(1, 2)).floor().to_integer()
}

struct GramSchmidt {
    mu: Vec<QVec>,
    norms: QVec,
}

fn gram_schmidt(g: &RatMatrix, basis: &[QVec]) -> GramSchmidt {
    let n = basis.len();
    let mut stars: Vec<QVec> = Vec::with_capacity(n);
    let mut mu = vec![vec![BigRational::zero(); n]; n];
    let mut norms = Vec::with_capacity(n);
    for i in 0..n {
        let mut s = basis[i].clone();
        for j in 0..i {
            let m = g.bilinear(&basis[i], &stars[j]) / &norms[j];
            for (x, y) in s.iter_mut().zip(&stars[j]) {
                *x -= &m * y;
            }
            mu[i][j] = m;
        }
        norms.push(quad(g, &s));
        stars.push(s);
    }
    GramSchmidt { mu, norms }
}

/// LLL-reduced basis of `Z^r` for the form `g`, as the columns of a unimodular matrix.
fn lll(g: &RatMatrix) -> IntegerMatrix {
    let r = g.rows;
    let mut basis: Vec<IVec> = (0..r).map(|i| (0..r).map(|j| BigInt::from((i == j) as i64)).collect()).collect();
    let delta = rat(3, 4);
    let mut k = 1;
    while k < r {
        for j in (0..k).rev() {
            let gs = gram_schmidt(g, &basis.iter().map(|b| to_qvec(b)).collect::<Vec<_>>());
            let q = round(&gs.mu[k][j]);
            if !q.is_zero() {
                let bj = basis[j].clone();
                for (x, y) in basis[k].iter_mut().zip(&bj) {
                    *x -= &q * y;
                }
            }
        }
        let gs = gram_schmidt(g, &basis.iter().map(|b| to_qvec(b)).collect::<Vec<_>>());
        let m = &gs.mu[k][k - 1];
        if gs.norms[k] >= (&delta - m * m) * &gs.norms[k - 1] {
            k += 1;
        } else {
            basis.swap(k, k - 1);
            k = k.saturating_sub(1).max(1);
        }
    }
    IntegerMatrix::from_columns(&basis, r).expect("square basis")
}

fn floor_sqrt(x: &BigRational) -> BigInt {
    if !x.is_positive() {
        return BigInt::zero();
    }
    x.floor().to_integer().sqrt()
}

/// All `v in Z^r` with `g(v) <= bound`.
fn short_vectors(g: &RatMatrix, bound: &BigRational) -> Result<Vec<IVec>> {
    let r = g.rows;
    let inv = g.inverse()?;
    let limits: Vec<BigInt> = (0..r).map(|i| floor_sqrt(&(bound * inv.at(i, i)))).collect();
    let mut out = Vec::new();
    let mut v: IVec = limits.iter().map(|l| -l).collect();
    loop {
        if quad(g, &to_qvec(&v)) <= *bound {
            out.push(v.clone());
        }
        let mut i = 0;
        loop {
            if i == r {
                return Ok(out);
            }
            v[i] += 1;
            if v[i] <= limits[i] {
                break;
            }
            v[i] = -&limits[i];
            i += 1;
        }
    }
}

/// Reduced basis, the form in it and the covering radius bound `1/4 sum |b*_i|^2`.
fn reduce(q: &RatMatrix) -> (IntegerMatrix, RatMatrix, BigRational) {
    let u = lll(q);
    let uq = RatMatrix::from_int(&u);
    let g = uq.transpose().mul(q).mul(&uq);
    let id = RatMatrix::identity(q.rows);
    let unit: Vec<QVec> = id.entries.chunks(q.rows.max(1)).map(<[_]>::to_vec).collect();
    let gs = gram_schmidt(&g, &unit);
    let mu2 = gs.norms.iter().sum::<BigRational>() / BigRational::from_integer(BigInt::from(4));
    (u, g, mu2)
}

fn check_invariance(q: &RatMatrix, gamma_dual: &[IntegerMatrix]) -> Result<()> {
    for g in gamma_dual {
        let gq = RatMatrix::from_int(g);
        if gq.transpose().mul(q).mul(&gq) != *q {
            return Err(Error::FormNotInvariant);
        }
    }
    Ok(())
}

fn normalize(cells: &[Vec<IVec>]) -> Vec<Vec<IVec>> {
    let mut out: BTreeSet<Vec<IVec>> = BTreeSet::new();
    for cell in cells {
        let least = cell.iter().min().expect("nonempty cell").clone();
        let mut moved: Vec<IVec> = cell.iter().map(|v| v.iter().zip(&least).map(|(a, b)| a - b).collect()).collect();
        moved.sort();
        out.insert(moved);
    }
    out.into_iter().collect()
}

/// Delaunay cells of `Z^r` for the form `q`, checking invariance under `gamma_dual` first.
pub fn delaunay_cells(q: &RatMatrix, gamma_dual: &[IntegerMatrix]) -> Result<DelaunayCells> {
    let r = q.rows;
    if r == 0 {
        return Ok(DelaunayCells {
            rank: 0,
            form: Vec::new(),
            covering_bound: BigRational::zero(),
            star: Vec::new(),
            cells: Vec::new(),
        });
    }
    check_invariance(q, gamma_dual)?;
    let (u, g, mu2) = reduce(q);
    let four = BigRational::from_integer(BigInt::from(4));
    let short = short_vectors(&g, &(&four * &mu2))?;

    // Voronoi-relevant vectors: strict minima (up to sign) of their class modulo 2.
    let mut classes: BTreeMap<IVec, Vec<(BigRational, IVec)>> = BTreeMap::new();
    for v in &short {
        if v.iter().all(Zero::is_zero) {
            continue;
        }
        let key: IVec = v.iter().map(|x| x.mod_floor_two()).collect();
        classes.entry(key).or_default().push((quad(&g, &to_qvec(v)), v.clone()));
    }
    let mut inequalities = Vec::new();
    for members in classes.values() {
        let least = members.iter().map(|(n, _)| n).min().expect("nonempty class");
        let minimal: Vec<&IVec> = members.iter().filter(|(n, _)| n == least).map(|(_, v)| v).collect();
        if minimal.len() == 2 {
            for v in minimal {
                let vq = to_qvec(v);
                let gv = g.apply(&vq);
                let mut a: QVec = gv.iter().map(|x| -(x * BigRational::from_integer(BigInt::from(2)))).collect();
                a.push(quad(&g, &vq));
                inequalities.push(clear_denominators(&a).1);
            }
        }
    }
    let mut height = vec![BigInt::zero(); r];
    height.push(BigInt::one());
    inequalities.push(height);
    let dd = cone_generators(&inequalities, r + 1);
    if !dd.lineality.is_empty() {
        return Err(Error::Internal("Voronoi cell is unbounded".into()));
    }

    let mut star = Vec::new();
    for ray in dd.rays.iter().filter(|ray| ray[r].is_positive()) {
        let c: QVec = ray[..r].iter().map(|x| BigRational::new(x.clone(), ray[r].clone())).collect();
        let rho = quad(&g, &c);
        let mut cell: Vec<IVec> = short
            .iter()
            .filter(|v| {
                let d: QVec = to_qvec(v).iter().zip(&c).map(|(a, b)| a - b).collect();
                quad(&g, &d) == rho
            })
            .map(|v| u.apply(v))
            .collect();
        cell.sort();
        star.push(cell);
    }
    star.sort();
    let cells = normalize(&star);
    Ok(DelaunayCells { rank: r, form: q.entries.clone(), covering_bound: mu2, star, cells })
}

trait ModTwo {
    fn mod_floor_two(&self) -> BigInt;
}

impl ModTwo for BigInt {
    fn mod_floor_two(&self) -> BigInt {
        use num_integer::Integer;
        self.mod_floor(&BigInt::from(2))
    }
}

/// Delaunay cells of `X^dual` for the form transported from the degeneration data.
pub fn delaunay_decomposition(data: &DegenerationData) -> Result<DelaunayCells> {
    let action = data.affine_action()?;
    let gamma: Vec<IntegerMatrix> = action.gamma_dual.iter().map(|(_, g)| g.clone()).collect();
    delaunay_cells(&data.slice_form()?, &gamma)
}

/// Cells through the origin of the lower convex hull of `{(v, q(v))}`,
/// computed from the tangent cone of the lifted lattice at the origin.
pub fn lower_hull_star(q: &RatMatrix) -> Result<Vec<Vec<IVec>>> {
    let r = q.rows;
    if r == 0 {
        return Ok(Vec::new());
    }
    let (u, g, mu2) = reduce(q);
    let window = short_vectors(&g, &(BigRational::from_integer(BigInt::from(9)) * &mu2))?;
    let points: Vec<IVec> = window.into_iter().filter(|v| v.iter().any(|x| !x.is_zero())).collect();
    let mut gens = Vec::with_capacity(points.len() + 1);
    for v in &points {
        let mut lifted = to_qvec(v);
        lifted.push(quad(&g, &to_qvec(v)));
        gens.push(clear_denominators(&lifted).1);
    }
    let mut up = vec![BigInt::zero(); r];
    up.push(BigInt::one());
    gens.push(up);
    let cone = RationalCone::from_rays(Lattice::new(r + 1, crate::lattice::LatticeLabel::X), &gens)?;
    let g_inv = g.inverse()?;
    let mut star = Vec::new();
    for facet in cone.facets() {
        let az = &facet[r];
        if !az.is_positive() {
            continue;
        }
        // Tight points satisfy q(v) = -w.v / az, i.e. lie on the sphere through 0 centred at c.
        let w: QVec = facet[..r].iter().map(|x| BigRational::new(-x.clone(), az * BigInt::from(2))).collect();
        let c = g_inv.apply(&w);
        if quad(&g, &c) > mu2 {
            continue;
        }
        let normal = to_qvec(facet);
        let mut cell: Vec<IVec> = vec![vec![BigInt::zero(); r]];
        for v in &points {
            let mut lifted = to_qvec(v);
            lifted.push(quad(&g, &lifted));
            if qdot(&normal, &lifted).is_zero() {
                cell.push(v.clone());
            }
        }
        let mut cell: Vec<IVec> = cell.iter().map(|v| u.apply(v)).collect();
        cell.sort();
        star.push(cell);
    }
    star.sort();
    Ok(star)
}

/// The decomposition of `C` into cones over the cells and their faces, with period lattice `X^dual`.
pub fn cone_over_slice(cells: &DelaunayCells) -> Result<ConeDecomposition> {
    let r = cells.rank;
    let period = IntegerMatrix::identity(r);
    if r == 0 {
        return ConeDecomposition::from_ray_lists(0, period, &[vec![vec![BigInt::one()]]]);
    }
    let per = Periodicity::new(&period)?;
    let ambient = Lattice::n(r);
    let mut keys: BTreeSet<Vec<IVec>> = BTreeSet::new();
    for cell in &cells.cells {
        let rays: Vec<IVec> = cell
            .iter()
            .map(|v| {
                let mut x = v.clone();
                x.push(BigInt::one());
                x
            })
            .collect();
        let cone = RationalCone::from_rays(ambient, &rays)?;
        for set in cone.face_ray_sets() {
            if set.is_empty() {
                continue;
            }
            let face: Vec<IVec> = set.iter().map(|&k| cone.extreme_rays()[k].clone()).collect();
            keys.insert(per.canonical(&face).0);
        }
    }
    let lists: Vec<Vec<IVec>> = keys.into_iter().collect();
    ConeDecomposition::from_ray_lists(r, period, &lists)
}
