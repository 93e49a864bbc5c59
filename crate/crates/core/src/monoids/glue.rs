use serde::{Deserialize, Serialize};

use super::hilbert::AffineMonoid;
use crate::error::Result;
use crate::lattice::{dot, IVec};
use crate::polyhedra::{dual_cone, ConeDecomposition, RationalCone};

/// The localization `sigma^dual n M -> tau^dual n M` for a face `tau <= sigma`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartInclusion {
    /// Index of `sigma` among the decomposition representatives.
    pub cone: usize,
    /// Rays of the face `tau` (empty for the zero face).
    pub face: Vec<IVec>,
    /// Hilbert basis elements of `sigma^dual n M` that become units.
    pub inverted: Vec<IVec>,
    /// Whether `tau = sigma`, so that the map is the identity.
    pub identity: bool,
}

/// Hilbert basis elements of `sigma^dual n M` vanishing on `tau`, i.e. inverted on `Z(tau)`.
pub fn localization(sigma: &RationalCone, face: &[IVec]) -> Result<Vec<IVec>> {
    let monoid = AffineMonoid::new(dual_cone(sigma)?)?;
    Ok(monoid.hilbert_basis().iter().filter(|h| face.iter().all(|r| dot(h, r) == 0.into())).cloned().collect())
}

/// Every face inclusion `tau <= sigma` of the representatives, including the
/// zero face and `sigma` itself.
pub fn glue_report(sigma: &ConeDecomposition) -> Result<Vec<ChartInclusion>> {
    let mut out = Vec::new();
    for (i, cone) in sigma.cones().iter().enumerate() {
        let monoid = AffineMonoid::new(dual_cone(cone)?)?;
        for set in cone.face_ray_sets() {
            let face: Vec<IVec> = set.iter().map(|&k| cone.extreme_rays()[k].clone()).collect();
            let inverted =
                monoid.hilbert_basis().iter().filter(|h| face.iter().all(|r| dot(h, r) == 0.into())).cloned().collect();
            let identity = set.len() == cone.extreme_rays().len();
            out.push(ChartInclusion { cone: i, face, inverted, identity });
        }
    }
    Ok(out)
}
