//! The JSON report: a stable, documented view of the pipeline results.
//!
//! Integers are JSON numbers (decimal strings beyond 64 bits), rationals are
//! `"p/q"` strings and vectors are arrays. Absent stages are `null`.

use std::collections::BTreeMap;

use logfan_core::degeneration::{
    ConeChart, DegenerationData, DelaunayCells, DualComplex, ModelReport, PolarizationFunction, PolarizationReport,
    TamenessReport,
};
use logfan_core::lattice::IVec;
use logfan_core::monoids::KatoVerdict;
use logfan_core::polyhedra::{AdmissibilityReport, ConeDecomposition, DecompositionReport};
use logfan_core::serial::{int_rows, ints, rats, Int, Rat};
use serde::{Deserialize, Serialize};

use crate::config::SCHEMA_VERSION;

pub const VERIFIED: &str = "verified";
pub const FAILED: &str = "failed";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    /// `"verified"` or `"failed"`.
    pub overall: String,
    pub failed_at: Option<String>,
    pub failure: Option<String>,
    pub warnings: Vec<String>,
    pub legend: BTreeMap<String, String>,
    pub provenance: Provenance,
    pub model: ModelView,
}

impl Report {
    pub fn is_verified(&self) -> bool {
        self.overall == VERIFIED
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub input_sha256: String,
    pub version: String,
    pub seed: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelView {
    pub rank: usize,
    pub normal_form: Option<NormalForm>,
    pub delaunay: Option<DelaunayView>,
    pub decomposition: Option<DecompositionView>,
    pub polarization: Option<PolarizationView>,
    pub admissibility: Option<AdmissibilityView>,
    pub charts: Vec<ChartView>,
    pub dual_complex: Option<ComplexView>,
    pub tameness: Option<TamenessView>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalForm {
    pub b: Vec<Vec<Int>>,
    pub phi: Vec<Vec<Int>>,
    pub y_embedding: Vec<Vec<Int>>,
    pub a: Vec<Int>,
    /// `b(y_i, phi(y_j))`.
    pub pairing: Vec<Vec<Int>>,
    pub group_order: usize,
    pub residue_char: u64,
    pub ramification_index: u64,
    pub uniformizer: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DelaunayView {
    /// The form on `X^dual_R`, row-major.
    pub form: Vec<Rat>,
    pub covering_bound: Rat,
    /// Vertex lists of the cells up to translation by `X^dual`.
    pub cells: Vec<Vec<Vec<Int>>>,
    /// Cells containing the origin.
    pub star: Vec<Vec<Vec<Int>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationView {
    pub kind: String,
    pub message: String,
    pub cones: Vec<Vec<Vec<Int>>>,
    pub point: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionView {
    pub valid: bool,
    /// Period lattice basis as rows.
    pub period: Vec<Vec<Int>>,
    /// Number of representatives per cone dimension, index = dimension.
    pub counts_by_dim: Vec<usize>,
    /// Ray lists of the representatives modulo the period lattice.
    pub cones: Vec<Vec<Vec<Int>>>,
    pub violations: Vec<ViolationView>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolarizationView {
    pub k: Int,
    pub passed: bool,
    pub clauses: BTreeMap<String, bool>,
    pub witnesses: Vec<PolarizationWitnessView>,
    /// Values on representatives of `X^dual / b(Y)`.
    pub values: Vec<(Vec<Int>, Rat)>,
    /// Affine forms `(linear part, constant)` on maximal cones modulo `b(Y)`.
    pub forms: Vec<FormView>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolarizationWitnessView {
    pub clause: String,
    pub cone: Vec<Vec<Int>>,
    pub wall: Option<Vec<Vec<Int>>>,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormView {
    pub cone: Vec<Vec<Int>>,
    pub linear: Vec<Rat>,
    pub constant: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibilityView {
    pub stable: bool,
    pub orbit_count: Option<usize>,
    pub witnesses: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableView {
    pub name: String,
    pub vector: Vec<Int>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KatoView {
    /// `"log_smooth"`, `"fails_injectivity"` or `"fails_torsion_free"`.
    pub verdict: String,
    pub free_rank: usize,
    pub torsion: Vec<Int>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartView {
    pub orbit: Option<usize>,
    pub dim: usize,
    /// Rays of the cone the chart is computed on.
    pub rays: Vec<Vec<Int>>,
    /// Translation taking `rays` onto the orbit representative.
    pub translation: Option<Vec<Int>>,
    pub smooth_cone: bool,
    pub variables: Vec<VariableView>,
    pub relations: Vec<String>,
    pub uniformizer_relation: String,
    /// Relations after substituting the uniformizer.
    pub eliminated: Vec<String>,
    pub degree_bound: usize,
    pub complete: bool,
    pub kato: KatoView,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellView {
    pub orbit: usize,
    pub rays: Vec<Vec<Int>>,
    pub stabilizer_order: usize,
    pub vertices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexView {
    /// Number of cells per dimension, vertices first.
    pub counts: Vec<usize>,
    pub euler_characteristic: i64,
    pub cycle_length: Option<usize>,
    pub cells: Vec<Vec<CellView>>,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitTamenessView {
    pub orbit: usize,
    pub dim: usize,
    pub rays: Vec<Vec<Int>>,
    pub stabilizer_order: usize,
    pub wild: bool,
    pub trivial_on_monoid: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TamenessView {
    pub residue_char: u64,
    pub orbits: Vec<OrbitTamenessView>,
    pub wild_flags: Vec<usize>,
    pub very_tame_flags: Vec<usize>,
}

fn rays(v: &[IVec]) -> Vec<Vec<Int>> {
    int_rows(v)
}

pub fn normal_form(data: &DegenerationData) -> NormalForm {
    NormalForm {
        b: int_rows(&data.b.row_vecs()),
        phi: int_rows(&data.phi.row_vecs()),
        y_embedding: int_rows(&data.y_embedding.row_vecs()),
        a: ints(&data.a),
        pairing: int_rows(&data.pairing_form().row_vecs()),
        group_order: data.group.order,
        residue_char: data.ground.residue_char,
        ramification_index: data.ground.ramification_index,
        uniformizer: data.ground.uniformizer.clone(),
    }
}

pub fn delaunay_view(cells: &DelaunayCells) -> DelaunayView {
    DelaunayView {
        form: rats(&cells.form),
        covering_bound: Rat(cells.covering_bound.clone()),
        cells: cells.cells.iter().map(|c| rays(c)).collect(),
        star: cells.star.iter().map(|c| rays(c)).collect(),
    }
}

pub fn decomposition_view(sigma: &ConeDecomposition, report: &DecompositionReport) -> DecompositionView {
    DecompositionView {
        valid: report.valid,
        period: int_rows(&sigma.period().row_vecs()),
        counts_by_dim: sigma.count_by_dim(),
        cones: sigma.cones().iter().map(|c| rays(c.extreme_rays())).collect(),
        violations: report
            .violations
            .iter()
            .map(|v| ViolationView {
                kind: serde_json::to_value(v.kind).ok().and_then(|k| k.as_str().map(str::to_string)).unwrap_or_default(),
                message: v.message.clone(),
                cones: v.cones.iter().map(|c| rays(c)).collect(),
                point: v.point.clone(),
            })
            .collect(),
    }
}

pub fn polarization_view(sigma: &ConeDecomposition, h: &PolarizationFunction, report: &PolarizationReport) -> PolarizationView {
    let r = h.rank;
    PolarizationView {
        k: Int(h.k.clone()),
        passed: report.passed,
        clauses: report.clauses.iter().cloned().collect(),
        witnesses: report
            .witnesses
            .iter()
            .map(|w| PolarizationWitnessView {
                clause: w.clause.clone(),
                cone: rays(&w.cone),
                wall: w.wall.as_ref().map(|w| rays(w)),
                message: w.message.clone(),
            })
            .collect(),
        values: h.values.iter().map(|(p, v)| (ints(p), Rat(v.clone()))).collect(),
        forms: h
            .forms
            .iter()
            .map(|f| {
                let cone: Vec<IVec> = sigma.cones()[f.cone]
                    .extreme_rays()
                    .iter()
                    .map(|ray| {
                        let mut v: IVec = ray[..r].iter().zip(&f.translation).map(|(a, t)| a + &ray[r] * t).collect();
                        v.push(ray[r].clone());
                        v
                    })
                    .collect();
                FormView { cone: rays(&cone), linear: rats(&f.form[..r]), constant: Rat(f.form[r].clone()) }
            })
            .collect(),
    }
}

pub fn admissibility_view(report: &AdmissibilityReport) -> AdmissibilityView {
    AdmissibilityView {
        stable: report.stable,
        orbit_count: report.orbit_count,
        witnesses: report.witnesses.iter().map(|w| format!("{} maps {:?} to {:?}", w.generator, w.cone, w.image)).collect(),
    }
}

pub fn chart_view(c: &ConeChart) -> ChartView {
    let (verdict, torsion) = match &c.kato.verdict {
        KatoVerdict::LogSmooth => ("log_smooth", Vec::new()),
        KatoVerdict::FailsInjectivity => ("fails_injectivity", Vec::new()),
        KatoVerdict::FailsTorsionFree(t) => ("fails_torsion_free", ints(t)),
    };
    ChartView {
        orbit: c.orbit,
        dim: c.dim,
        rays: rays(&c.rays),
        translation: c.translation.as_ref().map(|t| ints(t)),
        smooth_cone: c.smooth_cone,
        variables: c.chart.variables.iter().map(|v| VariableView { name: v.name.clone(), vector: ints(&v.vector) }).collect(),
        relations: c.chart.relation_strings(),
        uniformizer_relation: c.chart.uniformizer_string(),
        eliminated: c.chart.eliminated(),
        degree_bound: c.chart.degree_bound,
        complete: c.chart.complete,
        kato: KatoView { verdict: verdict.into(), free_rank: c.kato.cokernel.free_rank, torsion },
    }
}

pub fn complex_view(d: &DualComplex) -> ComplexView {
    ComplexView {
        counts: d.counts(),
        euler_characteristic: d.euler_characteristic,
        cycle_length: d.cycle_length,
        cells: d
            .cells
            .iter()
            .map(|level| {
                level
                    .iter()
                    .map(|c| CellView {
                        orbit: c.orbit,
                        rays: rays(&c.representative),
                        stabilizer_order: c.stabilizer_order,
                        vertices: c.vertices.clone(),
                    })
                    .collect()
            })
            .collect(),
        edges: d.edges(),
    }
}

pub fn tameness_view(t: &TamenessReport) -> TamenessView {
    TamenessView {
        residue_char: t.residue_char,
        orbits: t
            .orbits
            .iter()
            .map(|o| OrbitTamenessView {
                orbit: o.orbit,
                dim: o.dim,
                rays: rays(&o.representative),
                stabilizer_order: o.stabilizer_order,
                wild: o.wild,
                trivial_on_monoid: o.trivial_on_monoid,
            })
            .collect(),
        wild_flags: t.wild_flags.clone(),
        very_tame_flags: t.very_tame_flags.clone(),
    }
}

pub fn model_view(data: &DegenerationData, m: &ModelReport) -> ModelView {
    ModelView {
        rank: m.rank,
        normal_form: Some(normal_form(data)),
        delaunay: m.cells.as_ref().map(delaunay_view),
        decomposition: m.sigma.as_ref().zip(m.decomposition.as_ref()).map(|(s, d)| decomposition_view(s, d)),
        polarization: m
            .sigma
            .as_ref()
            .zip(m.polarization.as_ref())
            .zip(m.polarization_report.as_ref())
            .map(|((s, h), r)| polarization_view(s, h, r)),
        admissibility: m.admissibility.as_ref().map(admissibility_view),
        charts: m.charts.iter().map(chart_view).collect(),
        dual_complex: m.dual_complex.as_ref().map(complex_view),
        tameness: m.tameness.as_ref().map(tameness_view),
    }
}

/// Advisory findings that do not affect the verdict.
pub fn warnings(model: &ModelView) -> Vec<String> {
    let mut out = Vec::new();
    if let Some(t) = &model.tameness {
        for &k in &t.wild_flags {
            let o = &t.orbits[k];
            out.push(format!(
                "wild stabilizer: orbit {k} has stabilizer order {} divisible by p = {}",
                o.stabilizer_order, t.residue_char
            ));
        }
        for &k in &t.very_tame_flags {
            out.push(format!(
                "very tame diagnostic: the stabilizer of orbit {k} acts nontrivially on its chart monoid modulo units"
            ));
        }
    }
    for c in &model.charts {
        if !c.complete {
            out.push(format!("chart of {:?}: moves up to degree {} do not generate all relations", c.rays, c.degree_bound));
        }
    }
    out
}

pub fn legend() -> BTreeMap<String, String> {
    [
        ("coordinates", "N = X^dual + Z with the height last; M = X + Z; rays are integer vectors of N"),
        ("normal_form", "split normal form: b[i][j] = b(y_i, x_j), phi and y_embedding have the images of the Y basis as columns, a on the integer scale with default b(y_i, phi(y_i))"),
        ("decomposition", "cone representatives modulo the period lattice, which contains b(Y)"),
        ("charts", "one chart per orbit of nonzero cones, computed on the decomposition representative; the orbit representative is rays + translation"),
        ("dual_complex", "vertices are orbits of rays (components of the special fibre), d-cells are orbits of (d+1)-dimensional cones (codimension d strata); the central ray is the vertex of the component through the origin"),
        ("wild_flags", "orbits whose stabilizer order is divisible by the residue characteristic; reported as warnings, not failures"),
        ("very_tame_flags", "orbits whose stabilizer acts nontrivially on the chart monoid modulo units; a combinatorial diagnostic only"),
        ("overall", "verified iff every stage ran and every check passed"),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v.to_string()))
    .collect()
}

pub fn new_report(command: &str, model: ModelView, failure: Option<(String, String)>, provenance: Provenance) -> Report {
    let warnings = warnings(&model);
    let (failed_at, failure) = match failure {
        Some((stage, message)) => (Some(stage), Some(message)),
        None => (None, None),
    };
    Report {
        schema_version: SCHEMA_VERSION,
        command: command.to_string(),
        overall: if failed_at.is_none() { VERIFIED } else { FAILED }.to_string(),
        failed_at,
        failure,
        warnings,
        legend: legend(),
        provenance,
        model,
    }
}

fn ray_text(r: &[Int]) -> String {
    format!("({})", r.iter().map(|x| x.0.to_string()).collect::<Vec<_>>().join(","))
}

/// The dual complex 1-skeleton with stabilizer orders as vertex labels.
pub fn to_dot(complex: &ComplexView) -> String {
    let mut out = String::from("graph dual_complex {\n");
    if let Some(vertices) = complex.cells.first() {
        for (i, v) in vertices.iter().enumerate() {
            let ray: Vec<String> = v.rays.iter().map(|r| ray_text(r)).collect();
            out.push_str(&format!("  v{i} [label=\"{}\", ray=\"{}\"];\n", v.stabilizer_order, ray.join(" ")));
        }
    }
    for (a, b) in &complex.edges {
        out.push_str(&format!("  v{a} -- v{b};\n"));
    }
    out.push_str("}\n");
    out
}
