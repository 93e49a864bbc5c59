//! Double description method over the integers.
//!
//! Computes generators (a lineality basis and extreme rays) of
//! `{x : a.x >= 0 for every inequality a}` by adding one inequality at a time.
//! Rays are combined fraction-free and kept primitive; adjacency is tested
//! combinatorially on the sets of tight inequalities.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::lattice::{dot, primitive, IVec};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub(crate) struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    pub fn with_capacity(bits: usize) -> Self {
        Self { words: vec![0; bits.div_ceil(64)] }
    }

    pub fn insert(&mut self, i: usize) {
        let w = i / 64;
        if w >= self.words.len() {
            self.words.resize(w + 1, 0);
        }
        self.words[w] |= 1 << (i % 64);
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Self { words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect() }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.words.iter().enumerate().all(|(i, w)| w & !other.words.get(i).copied().unwrap_or(0) == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

#[derive(Clone, Debug, Default)]
pub struct DoubleDescription {
    pub lineality: Vec<IVec>,
    pub rays: Vec<IVec>,
}

struct Ray {
    v: IVec,
    tight: BitSet,
}

fn combine(a: &BigInt, x: &[BigInt], b: &BigInt, y: &[BigInt]) -> IVec {
    primitive(x.iter().zip(y).map(|(p, q)| a * p - b * q).collect())
}

/// Generators of the cone `{x in R^dim : a.x >= 0}`.
pub fn cone_generators(inequalities: &[IVec], dim: usize) -> DoubleDescription {
    let n = inequalities.len();
    let mut lineality: Vec<IVec> = (0..dim).map(|i| (0..dim).map(|j| BigInt::from((i == j) as i64)).collect()).collect();
    let mut rays: Vec<Ray> = Vec::new();

    for (k, a) in inequalities.iter().enumerate() {
        debug_assert_eq!(a.len(), dim);
        if let Some(pos) = lineality.iter().position(|l| !dot(a, l).is_zero()) {
            let mut l0 = lineality.swap_remove(pos);
            let mut al0 = dot(a, &l0);
            if al0.is_negative() {
                l0.iter_mut().for_each(|x| *x = -&*x);
                al0 = -al0;
            }
            for l in lineality.iter_mut() {
                let al = dot(a, l);
                if !al.is_zero() {
                    *l = combine(&al0, l, &al, &l0);
                }
            }
            for r in rays.iter_mut() {
                let ar = dot(a, &r.v);
                if !ar.is_zero() {
                    r.v = combine(&al0, &r.v, &ar, &l0);
                }
                r.tight.insert(k);
            }
            let mut tight = BitSet::with_capacity(n);
            for j in 0..k {
                tight.insert(j);
            }
            rays.push(Ray { v: l0, tight });
            continue;
        }

        let values: Vec<BigInt> = rays.iter().map(|r| dot(a, &r.v)).collect();
        if values.iter().all(|v| !v.is_negative()) {
            for (r, v) in rays.iter_mut().zip(&values) {
                if v.is_zero() {
                    r.tight.insert(k);
                }
            }
            continue;
        }
        let needed = (dim - lineality.len()).saturating_sub(2);
        let plus: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_positive()).collect();
        let minus: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_negative()).collect();
        let mut created = Vec::new();
        for &p in &plus {
            for &m in &minus {
                let common = rays[p].tight.intersection(&rays[m].tight);
                if common.len() < needed {
                    continue;
                }
                let blocked = rays.iter().enumerate().any(|(i, r)| i != p && i != m && common.is_subset(&r.tight));
                if blocked {
                    continue;
                }
                let v = combine(&values[p], &rays[m].v, &values[m], &rays[p].v);
                let mut tight = common;
                tight.insert(k);
                created.push(Ray { v, tight });
            }
        }
        let mut next: Vec<Ray> = Vec::with_capacity(rays.len() + created.len());
        for (i, mut r) in rays.into_iter().enumerate() {
            if values[i].is_negative() {
                continue;
            }
            if values[i].is_zero() {
                r.tight.insert(k);
            }
            next.push(r);
        }
        next.extend(created);
        rays = next;
    }

    let mut out_rays: Vec<IVec> = rays.into_iter().map(|r| r.v).collect();
    out_rays.sort();
    out_rays.dedup();
    DoubleDescription { lineality, rays: out_rays }
}
