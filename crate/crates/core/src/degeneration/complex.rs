use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::IVec;
use crate::polyhedra::{ConeDecomposition, OrbitDecomposition};

/// A cell of the dual complex: one orbit of cones meeting the open slice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualCell {
    /// Index into the orbit decomposition.
    pub orbit: usize,
    pub representative: Vec<IVec>,
    pub stabilizer_order: usize,
    /// Vertex cells (indices into `cells[0]`) of the rays of the representative.
    pub vertices: Vec<usize>,
}

/// Cell complex of the special fibre strata: `cells[d]` holds the orbits of
/// `(d+1)`-dimensional cones, so vertices are components and `d`-cells are
/// codimension-`d` strata.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualComplex {
    pub rank: usize,
    pub cells: Vec<Vec<DualCell>>,
    pub euler_characteristic: i64,
    /// Length of the cycle in toric rank one.
    pub cycle_length: Option<usize>,
}

impl DualComplex {
    pub fn counts(&self) -> Vec<usize> {
        self.cells.iter().map(Vec::len).collect()
    }

    pub fn vertices(&self) -> &[DualCell] {
        &self.cells[0]
    }

    /// Edges as pairs of vertex indices, loops included.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.cells
            .get(1)
            .map(|cells| cells.iter().map(|c| (c.vertices[0], *c.vertices.last().expect("edge has two rays"))).collect())
            .unwrap_or_default()
    }
}

/// Orbits of nonzero cones graded by dimension, with the incidences of their rays.
pub fn special_fiber_complex(sigma: &ConeDecomposition, orbits: &OrbitDecomposition) -> Result<DualComplex> {
    let r = sigma.rank();
    let mut cells: Vec<Vec<DualCell>> = vec![Vec::new(); r + 1];
    let mut vertex_of = vec![None; orbits.len()];
    for (k, orbit) in orbits.orbits.iter().enumerate() {
        if orbit.dim == 1 {
            let v = cells[0].len();
            vertex_of[k] = Some(v);
            cells[0].push(DualCell {
                orbit: k,
                representative: orbit.representative.clone(),
                stabilizer_order: orbit.stabilizer.len(),
                vertices: vec![v],
            });
        }
    }
    for (k, orbit) in orbits.orbits.iter().enumerate() {
        if orbit.dim < 2 {
            continue;
        }
        let mut vertices = Vec::with_capacity(orbit.representative.len());
        for ray in &orbit.representative {
            let o = orbits
                .locate(sigma, std::slice::from_ref(ray))
                .ok_or_else(|| Error::Internal(format!("ray {ray:?} is not in the decomposition")))?;
            vertices.push(vertex_of[o].ok_or_else(|| Error::Internal("ray orbit is not a vertex".into()))?);
        }
        cells[orbit.dim - 1].push(DualCell {
            orbit: k,
            representative: orbit.representative.clone(),
            stabilizer_order: orbit.stabilizer.len(),
            vertices,
        });
    }
    let euler_characteristic =
        cells.iter().enumerate().map(|(d, c)| if d % 2 == 0 { c.len() as i64 } else { -(c.len() as i64) }).sum();
    let cycle_length = (r == 1).then(|| cells[1].len());
    Ok(DualComplex { rank: r, cells, euler_characteristic, cycle_length })
}
