//! Rational polyhedral cones, their duals and faces, and periodic cone
//! decompositions of `C = X^dual_R x R_{>0} u {0}` with admissibility checks.

mod cone;
pub mod dd;
mod fan;
mod orbits;

pub(crate) use cone::saturated_span;
pub use cone::{dual_cone, faces, is_smooth_cone, RationalCone};
pub use fan::{
    check_decomposition, ConeDecomposition, DecompositionOptions, DecompositionReport, FaceRef, Violation, ViolationKind,
};
pub(crate) use fan::{translate_rays, Periodicity};
pub use orbits::{
    check_admissible, orbit_decomposition, AdmissibilityReport, AdmissibilityWitness, ConeOrbit, OrbitDecomposition,
    DEFAULT_MAX_ORBITS,
};
