use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lattice::{dot, GroundData, IVec, IntegerMatrix, Lattice};
use crate::monoids::AffineMonoid;
use crate::polyhedra::{dual_cone, OrbitDecomposition, RationalCone};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitTameness {
    pub orbit: usize,
    pub dim: usize,
    pub representative: Vec<IVec>,
    pub stabilizer_order: usize,
    pub wild: bool,
    /// Whether every stabilizer element fixes the chart monoid modulo units.
    pub trivial_on_monoid: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TamenessReport {
    pub residue_char: u64,
    pub orbits: Vec<OrbitTameness>,
    /// Orbits whose stabilizer order is divisible by `p > 0`.
    pub wild_flags: Vec<usize>,
    /// Orbits whose stabilizer acts nontrivially on `sigma^dual n M` modulo units.
    pub very_tame_flags: Vec<usize>,
}

impl TamenessReport {
    pub fn is_tame(&self) -> bool {
        self.wild_flags.is_empty()
    }
}

/// Stabilizer orders of the cone orbits against the residue characteristic,
/// and the action of each stabilizer on its chart monoid.
pub fn tameness_diagnostics(orbits: &OrbitDecomposition, ground: &GroundData) -> Result<TamenessReport> {
    let p = ground.residue_char as usize;
    let mut rows = Vec::with_capacity(orbits.len());
    for (k, orbit) in orbits.orbits.iter().enumerate() {
        let order = orbit.stabilizer.len();
        let wild = p > 0 && order % p == 0;
        let trivial_on_monoid = if orbit.stabilizer.iter().all(|g| g.linear == IntegerMatrix::identity(g.rank())) {
            true
        } else {
            let r = orbit.representative[0].len() - 1;
            let cone = RationalCone::from_rays(Lattice::n(r), &orbit.representative)?;
            let monoid = AffineMonoid::new(dual_cone(&cone)?)?;
            orbit.stabilizer.iter().all(|g| {
                let m = g.m_matrix();
                monoid.hilbert_basis().iter().all(|h| {
                    let diff: IVec = m.apply(h).iter().zip(h).map(|(a, b)| a - b).collect();
                    orbit.representative.iter().all(|ray| dot(&diff, ray) == BigInt::zero())
                })
            })
        };
        rows.push(OrbitTameness {
            orbit: k,
            dim: orbit.dim,
            representative: orbit.representative.clone(),
            stabilizer_order: order,
            wild,
            trivial_on_monoid,
        });
    }
    Ok(TamenessReport {
        residue_char: ground.residue_char,
        wild_flags: rows.iter().filter(|o| o.wild).map(|o| o.orbit).collect(),
        very_tame_flags: rows.iter().filter(|o| !o.trivial_on_monoid).map(|o| o.orbit).collect(),
        orbits: rows,
    })
}
