use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::hilbert::AffineMonoid;
use super::hom::f_sigma_dual;
use crate::error::{Error, Result};
use crate::lattice::{integer_kernel, lattice_basis, GroundData, IVec, IntegerMatrix};
use crate::polyhedra::RationalCone;

pub const DEFAULT_DEGREE_BOUND: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartVariable {
    pub name: String,
    pub vector: IVec,
}

/// `x^lhs = x^rhs`, exponents indexed by variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Binomial {
    pub lhs: Vec<u32>,
    pub rhs: Vec<u32>,
}

/// `O_L[sigma^dual n M] / (f^dual(1) - pi)` as generators and binomial relations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToricChartPresentation {
    /// Hilbert basis elements, followed by `t = (0, ..., 0, 1)` when that is not one of them.
    pub variables: Vec<ChartVariable>,
    pub binomial_relations: Vec<Binomial>,
    /// Exponents of the monomial `f^dual(1)`, set equal to the uniformizer.
    pub uniformizer_relation: Vec<u32>,
    pub uniformizer: String,
    pub degree_bound: usize,
    /// Whether the relations span the full lattice of relations among the variables.
    pub complete: bool,
}

fn variable_name(i: usize) -> String {
    let letters: Vec<char> = ('a'..='z').filter(|&c| c != 't').collect();
    match letters.get(i) {
        Some(c) => c.to_string(),
        None => format!("x{}", i - letters.len() + 1),
    }
}

fn monomial_string(names: &[String], exps: &[u32], extra: Option<(&str, u32)>) -> String {
    let mut parts: Vec<String> = names
        .iter()
        .zip(exps)
        .filter(|(_, &e)| e > 0)
        .map(|(n, &e)| if e == 1 { n.clone() } else { format!("{n}^{e}") })
        .collect();
    if let Some((u, e)) = extra {
        if e > 0 {
            parts.push(if e == 1 { u.to_string() } else { format!("{u}^{e}") });
        }
    }
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

impl ToricChartPresentation {
    pub fn names(&self) -> Vec<String> {
        self.variables.iter().map(|v| v.name.clone()).collect()
    }

    /// Relations as text, e.g. `a*b = t`.
    pub fn relation_strings(&self) -> Vec<String> {
        let names = self.names();
        self.binomial_relations
            .iter()
            .map(|b| format!("{} = {}", monomial_string(&names, &b.lhs, None), monomial_string(&names, &b.rhs, None)))
            .collect()
    }

    pub fn uniformizer_string(&self) -> String {
        format!("{} = {}", monomial_string(&self.names(), &self.uniformizer_relation, None), self.uniformizer)
    }

    /// Relations after eliminating the variable equal to the uniformizer.
    pub fn eliminated(&self) -> Vec<String> {
        let names = self.names();
        let Some(u) =
            self.uniformizer_relation.iter().position(|&e| e == 1).filter(|_| self.uniformizer_relation.iter().sum::<u32>() == 1)
        else {
            let mut out = self.relation_strings();
            out.push(self.uniformizer_string());
            return out;
        };
        let mut shown = names.clone();
        shown[u] = String::new();
        self.binomial_relations
            .iter()
            .map(|b| {
                let side = |e: &[u32]| {
                    let mut e = e.to_vec();
                    let k = std::mem::take(&mut e[u]);
                    monomial_string(&shown, &e, Some((&self.uniformizer, k)))
                };
                format!("{} = {}", side(&b.lhs), side(&b.rhs))
            })
            .collect()
    }

    pub fn vectors(&self) -> Vec<IVec> {
        self.variables.iter().map(|v| v.vector.clone()).collect()
    }
}

fn to_i64(v: &[BigInt]) -> Result<Vec<i64>> {
    v.iter().map(|x| x.to_i64().ok_or_else(|| Error::InvalidData("chart vector exceeds machine integers".into()))).collect()
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

/// Binomial generators of the relations among `vectors`, found by connecting
/// fibers of monomials of total degree at most `bound`, in increasing `grading`.
pub fn fiber_moves(vectors: &[IVec], grading: &[BigInt], bound: usize) -> Result<Vec<Binomial>> {
    let n = vectors.len();
    let d = grading.len();
    let vs: Vec<Vec<i64>> = vectors.iter().map(|v| to_i64(v)).collect::<Result<_>>()?;
    let g = to_i64(grading)?;

    let mut fibers: HashMap<Vec<i64>, Vec<Vec<u32>>> = HashMap::new();
    let mut exps = vec![0u32; n];
    let mut image = vec![0i64; d];
    fn enumerate(
        i: usize,
        left: usize,
        exps: &mut Vec<u32>,
        image: &mut Vec<i64>,
        vs: &[Vec<i64>],
        fibers: &mut HashMap<Vec<i64>, Vec<Vec<u32>>>,
    ) {
        if i == vs.len() {
            fibers.entry(image.clone()).or_default().push(exps.clone());
            return;
        }
        for k in 0..=left {
            exps[i] = k as u32;
            enumerate(i + 1, left - k, exps, image, vs, fibers);
            for (x, v) in image.iter_mut().zip(&vs[i]) {
                *x += v;
            }
        }
        for (x, v) in image.iter_mut().zip(&vs[i]) {
            *x -= v * (left as i64 + 1);
        }
        exps[i] = 0;
    }
    enumerate(0, bound, &mut exps, &mut image, &vs, &mut fibers);

    let degree = |m: &[i64]| -> i64 { m.iter().zip(&g).map(|(a, b)| a * b).sum() };
    let mut order: Vec<(&Vec<i64>, &Vec<Vec<u32>>)> = fibers.iter().filter(|(_, f)| f.len() > 1).collect();
    order.sort_by(|a, b| degree(a.0).cmp(&degree(b.0)).then_with(|| a.0.cmp(b.0)));

    let total = |e: &[u32]| e.iter().sum::<u32>();
    let mut moves: Vec<Binomial> = Vec::new();
    for (_, fiber) in order {
        let mut fiber = fiber.clone();
        fiber.sort_by(|a, b| total(a).cmp(&total(b)).then_with(|| a.cmp(b)));
        let position: HashMap<&Vec<u32>, usize> = fiber.iter().enumerate().map(|(i, e)| (e, i)).collect();
        let mut uf = UnionFind((0..fiber.len()).collect());
        for (i, e) in fiber.iter().enumerate() {
            for mv in &moves {
                for (from, to) in [(&mv.lhs, &mv.rhs), (&mv.rhs, &mv.lhs)] {
                    if e.iter().zip(from).all(|(a, b)| a >= b) {
                        let next: Vec<u32> = (0..n).map(|k| e[k] - from[k] + to[k]).collect();
                        if let Some(&j) = position.get(&next) {
                            uf.union(i, j);
                        }
                    }
                }
            }
        }
        // fiber[0] is the least element overall; join every other component to it.
        let mut joined = vec![false; fiber.len()];
        joined[uf.find(0)] = true;
        for i in 1..fiber.len() {
            let root = uf.find(i);
            if joined[root] {
                continue;
            }
            joined[root] = true;
            let common: Vec<u32> = (0..n).map(|k| fiber[i][k].min(fiber[0][k])).collect();
            let lhs = (0..n).map(|k| fiber[i][k] - common[k]).collect();
            let rhs = (0..n).map(|k| fiber[0][k] - common[k]).collect();
            moves.push(Binomial { lhs, rhs });
            uf.union(0, i);
        }
    }
    Ok(moves)
}

fn spans_kernel(vectors: &[IVec], moves: &[Binomial]) -> Result<bool> {
    let n = vectors.len();
    if n == 0 {
        return Ok(true);
    }
    let d = vectors[0].len();
    let h = IntegerMatrix::from_columns(vectors, d)?;
    let kernel = lattice_basis(&integer_kernel(&h), n);
    let diffs: Vec<IVec> =
        moves.iter().map(|b| b.lhs.iter().zip(&b.rhs).map(|(&x, &y)| BigInt::from(x as i64 - y as i64)).collect()).collect();
    Ok(lattice_basis(&diffs, n) == kernel)
}

/// Chart presentation of the monoid `sigma^dual n M` over `ground`.
pub fn chart_presentation(sigma: &RationalCone, ground: &GroundData, degree_bound: usize) -> Result<ToricChartPresentation> {
    let f = f_sigma_dual(sigma)?;
    chart_from_monoid(&f.target, &ground.uniformizer, degree_bound)
}

/// Sort key for chart variables: height, then the first nonzero slice coordinate, then lexicographic.
fn variable_key(v: &IVec) -> (BigInt, usize, IVec) {
    let d = v.len();
    let first = v[..d - 1].iter().position(|x| !x.is_zero()).unwrap_or(d);
    (v[d - 1].clone(), first, v.clone())
}

pub(crate) fn chart_from_monoid(monoid: &AffineMonoid, uniformizer: &str, degree_bound: usize) -> Result<ToricChartPresentation> {
    let d = monoid.ambient().rank;
    let mut vectors = monoid.hilbert_basis().to_vec();
    vectors.sort_by_key(variable_key);
    let mut names: Vec<String> = (0..vectors.len()).map(variable_name).collect();
    let mut t = vec![BigInt::zero(); d];
    t[d - 1] = BigInt::from(1);
    let u = match vectors.iter().position(|v| *v == t) {
        Some(i) => i,
        None => {
            vectors.push(t);
            names.push("t".into());
            vectors.len() - 1
        }
    };
    let moves = fiber_moves(&vectors, monoid.grading(), degree_bound)?;
    let complete = spans_kernel(&vectors, &moves)?;
    let mut uniformizer_relation = vec![0; vectors.len()];
    uniformizer_relation[u] = 1;
    Ok(ToricChartPresentation {
        variables: names.into_iter().zip(vectors).map(|(name, vector)| ChartVariable { name, vector }).collect(),
        binomial_relations: moves,
        uniformizer_relation,
        uniformizer: uniformizer.to_string(),
        degree_bound,
        complete,
    })
}
