//! From degeneration data to a verified periodic decomposition, its charts,
//! the dual complex of the special fibre and tameness diagnostics.

mod complex;
mod data;
mod delaunay;
mod model;
mod polarization;
mod tameness;

pub use complex::{special_fiber_complex, DualCell, DualComplex};
pub use data::DegenerationData;
pub use delaunay::{cone_over_slice, delaunay_cells, delaunay_decomposition, lower_hull_star, DelaunayCells};
pub use model::{build_model, cone_chart, cone_charts, ConeChart, ModelOptions, ModelReport, Stage, StageFailure};
pub use polarization::{
    check_polarization, polarization_from_form, PolarizationForm, PolarizationFunction, PolarizationReport, PolarizationWitness,
};
pub use tameness::{tameness_diagnostics, OrbitTameness, TamenessReport};
