use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::complex::{special_fiber_complex, DualComplex};
use super::data::DegenerationData;
use super::delaunay::{cone_over_slice, delaunay_decomposition, DelaunayCells};
use super::polarization::{check_polarization, polarization_from_form, PolarizationFunction, PolarizationReport};
use super::tameness::{tameness_diagnostics, TamenessReport};
use crate::error::{Error, Result};
use crate::lattice::{GroundData, IVec};
use crate::monoids::{
    chart_from_monoid, f_sigma_dual, kato_check_with, KatoReport, ToricChartPresentation, DEFAULT_DEGREE_BOUND,
};
use crate::polyhedra::{
    check_admissible, check_decomposition, is_smooth_cone, orbit_decomposition, AdmissibilityReport, ConeDecomposition,
    DecompositionOptions, DecompositionReport, OrbitDecomposition, RationalCone, DEFAULT_MAX_ORBITS,
};

/// Pipeline stages that can fail on valid input.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Delaunay,
    Decomposition,
    Polarization,
    Admissibility,
    Kato,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Delaunay => "delaunay",
            Stage::Decomposition => "decomposition",
            Stage::Polarization => "polarization",
            Stage::Admissibility => "admissibility",
            Stage::Kato => "kato",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageFailure {
    pub stage: Stage,
    pub message: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModelOptions {
    pub degree_bound: usize,
    pub grid_density: usize,
    pub max_orbits: usize,
    /// Accept cokernel torsion of order prime to the residue characteristic.
    pub general_kato: bool,
}

impl Default for ModelOptions {
    fn default() -> Self {
        Self {
            degree_bound: DEFAULT_DEGREE_BOUND,
            grid_density: DecompositionOptions::default().grid_density,
            max_orbits: DEFAULT_MAX_ORBITS,
            general_kato: false,
        }
    }
}

/// Chart and log smoothness verdict of one cone.
///
/// Inside a model the chart is computed on the decomposition representative
/// `rays` of the orbit; the orbit representative is `rays + translation`, an
/// isomorphic cone.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeChart {
    pub orbit: Option<usize>,
    pub translation: Option<IVec>,
    pub dim: usize,
    pub rays: Vec<IVec>,
    pub smooth_cone: bool,
    pub chart: ToricChartPresentation,
    pub kato: KatoReport,
}

pub fn cone_chart(cone: &RationalCone, ground: &GroundData, options: &ModelOptions) -> Result<ConeChart> {
    let f = f_sigma_dual(cone)?;
    let chart = chart_from_monoid(&f.target, &ground.uniformizer, options.degree_bound)?;
    let kato = kato_check_with(&f, options.general_kato.then_some(ground.residue_char));
    Ok(ConeChart {
        orbit: None,
        translation: None,
        dim: cone.dim(),
        rays: cone.extreme_rays().to_vec(),
        smooth_cone: is_smooth_cone(cone),
        chart,
        kato,
    })
}

/// Charts of a list of cones, computed in parallel in the current rayon pool.
pub fn cone_charts(cones: &[RationalCone], ground: &GroundData, options: &ModelOptions) -> Result<Vec<ConeChart>> {
    cones.par_iter().map(|c| cone_chart(c, ground, options)).collect()
}

#[derive(Clone, Debug)]
pub struct ModelReport {
    pub rank: usize,
    pub verified: bool,
    pub failure: Option<StageFailure>,
    pub cells: Option<DelaunayCells>,
    pub sigma: Option<ConeDecomposition>,
    pub decomposition: Option<DecompositionReport>,
    pub polarization: Option<PolarizationFunction>,
    pub polarization_report: Option<PolarizationReport>,
    pub admissibility: Option<AdmissibilityReport>,
    pub orbits: Option<OrbitDecomposition>,
    /// One chart per orbit of nonzero cones, in orbit order.
    pub charts: Vec<ConeChart>,
    pub dual_complex: Option<DualComplex>,
    pub tameness: Option<TamenessReport>,
}

impl ModelReport {
    fn new(rank: usize) -> Self {
        Self {
            rank,
            verified: false,
            failure: None,
            cells: None,
            sigma: None,
            decomposition: None,
            polarization: None,
            polarization_report: None,
            admissibility: None,
            orbits: None,
            charts: Vec::new(),
            dual_complex: None,
            tameness: None,
        }
    }

    fn fail(mut self, stage: Stage, message: impl Into<String>) -> Self {
        self.failure = Some(StageFailure { stage, message: message.into() });
        self
    }

    pub fn failed_at(&self) -> Option<Stage> {
        self.failure.as_ref().map(|f| f.stage)
    }
}

/// Runs the Delaunay cells, the cone over the slice, the polarization, the
/// admissibility and orbit computation, charts with log smoothness checks per
/// orbit, the dual complex and tameness diagnostics.
///
/// A stage that rejects the data stops the pipeline and is recorded in
/// `failure`; errors are reserved for invalid input and resource bounds.
pub fn build_model(data: &DegenerationData, options: &ModelOptions) -> Result<ModelReport> {
    let mut report = ModelReport::new(data.rank);
    let cells = match delaunay_decomposition(data) {
        Ok(c) => c,
        Err(e @ (Error::FormNotInvariant | Error::LinearityMismatch(_))) => {
            return Ok(report.fail(Stage::Delaunay, e.to_string()))
        }
        Err(e) => return Err(e),
    };
    let sigma = cone_over_slice(&cells)?;
    report.cells = Some(cells.clone());
    let decomposition = check_decomposition(&sigma, &DecompositionOptions { grid_density: options.grid_density });
    report.sigma = Some(sigma.clone());
    let valid = decomposition.valid;
    let first_violation = decomposition.violations.first().map(|v| v.message.clone());
    report.decomposition = Some(decomposition);
    if !valid {
        return Ok(report.fail(Stage::Decomposition, first_violation.unwrap_or_default()));
    }

    let h = match polarization_from_form(data, &cells, &sigma) {
        Ok(h) => h,
        Err(e @ Error::LinearityMismatch(_)) => return Ok(report.fail(Stage::Polarization, e.to_string())),
        Err(e) => return Err(e),
    };
    let action = data.affine_action()?;
    let polarization_report = check_polarization(&h, &sigma, &action)?;
    report.polarization = Some(h);
    let passed = polarization_report.passed;
    let message = polarization_report.witnesses.first().map(|w| format!("{}: {}", w.clause, w.message));
    report.polarization_report = Some(polarization_report);
    if !passed {
        return Ok(report.fail(Stage::Polarization, message.unwrap_or_default()));
    }

    let admissibility = match check_admissible(&sigma, &action, options.max_orbits) {
        Ok(a) => a,
        Err(e @ Error::OrbitBound { .. }) => return Ok(report.fail(Stage::Admissibility, e.to_string())),
        Err(e) => return Err(e),
    };
    let stable = admissibility.stable;
    let message = admissibility.witnesses.first().map(|w| format!("{} moves {:?} to {:?}", w.generator, w.cone, w.image));
    report.admissibility = Some(admissibility);
    if !stable {
        return Ok(report.fail(Stage::Admissibility, message.unwrap_or_default()));
    }
    let orbits = orbit_decomposition(&sigma, &action, options.max_orbits)?;

    let mut classes: Vec<usize> = orbits.orbits.iter().map(|o| o.class).collect();
    classes.sort_unstable();
    classes.dedup();
    let cones: Vec<RationalCone> = classes.iter().map(|&c| sigma.cones()[c].clone()).collect();
    let class_charts = cone_charts(&cones, &data.ground, options)?;
    let charts: Vec<ConeChart> = orbits
        .orbits
        .iter()
        .enumerate()
        .map(|(k, o)| {
            let mut c = class_charts[classes.binary_search(&o.class).expect("class was collected")].clone();
            c.orbit = Some(k);
            c.translation = Some(o.translation.clone());
            c
        })
        .collect();
    let bad = charts.iter().find(|c| !c.kato.verdict.is_log_smooth()).map(|c| format!("cone {:?}: {:?}", c.rays, c.kato.verdict));
    report.charts = charts;
    if let Some(message) = bad {
        report.orbits = Some(orbits);
        return Ok(report.fail(Stage::Kato, message));
    }

    report.dual_complex = Some(special_fiber_complex(&sigma, &orbits)?);
    report.tameness = Some(tameness_diagnostics(&orbits, &data.ground)?);
    report.orbits = Some(orbits);
    report.verified = true;
    Ok(report)
}
