//! Affine monoids of lattice points in dual cones, the structure maps
//! `f_sigma^dual`, Kato's log smoothness test and toric chart presentations.

mod chart;
mod glue;
mod hilbert;
mod hom;

pub(crate) use chart::chart_from_monoid;
pub use chart::{chart_presentation, fiber_moves, Binomial, ChartVariable, ToricChartPresentation, DEFAULT_DEGREE_BOUND};
pub use glue::{glue_report, localization, ChartInclusion};
pub use hilbert::{hilbert_basis, AffineMonoid};
pub use hom::{f_sigma_dual, kato_check_with, kato_log_smooth_check, KatoReport, KatoVerdict, MonoidHom};
