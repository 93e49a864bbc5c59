//! Job configuration: JSON schema, parsing and validation.

use std::fmt;
use std::path::Path;

use logfan_core::degeneration::{DegenerationData, ModelOptions};
use logfan_core::lattice::{GroundData, GroupAction, IVec, IntegerMatrix};
use logfan_core::monoids::DEFAULT_DEGREE_BOUND;
use logfan_core::polyhedra::DEFAULT_MAX_ORBITS;
use logfan_core::serial::{from_ints, Int};
use logfan_core::Error as CoreError;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    pub rank: usize,
    /// `b[i][j] = b(y_i, x_j)`.
    pub b: Vec<Vec<Int>>,
    #[serde(default)]
    pub phi: Option<Vec<Vec<Int>>>,
    #[serde(default)]
    pub y_embedding: Option<Vec<Vec<Int>>>,
    #[serde(default)]
    pub a: Option<Vec<Int>>,
    pub group: GroupConfig,
    #[serde(default)]
    pub ground: Option<GroundConfig>,
    #[serde(default)]
    pub options: OptionsConfig,
    /// Explicit cone list for `check-kato`, rays in `X^dual + Z` coordinates.
    #[serde(default)]
    pub cones: Option<Vec<Vec<Vec<Int>>>>,
    /// Period lattice of the explicit cone list, basis vectors as rows.
    #[serde(default)]
    pub period: Option<Vec<Vec<Int>>>,
}

fn default_schema() -> u32 {
    SCHEMA_VERSION
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupConfig {
    #[serde(default)]
    pub generators: Vec<GeneratorConfig>,
    #[serde(default)]
    pub order: Option<usize>,
    pub residue_char: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GeneratorConfig {
    Matrix(Vec<Vec<Int>>),
    Named { name: String, matrix: Vec<Vec<Int>> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundConfig {
    #[serde(default = "one")]
    pub ramification_index: u64,
    #[serde(default = "pi")]
    pub uniformizer: String,
}

fn one() -> u64 {
    1
}

fn pi() -> String {
    "pi".into()
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsConfig {
    #[serde(default)]
    pub degree_bound: Option<usize>,
    #[serde(default)]
    pub grid_density: Option<usize>,
    #[serde(default)]
    pub jobs: Option<usize>,
    /// Accept cokernel torsion of order prime to the residue characteristic.
    #[serde(default)]
    pub general_kato: bool,
}

/// One problem found in a configuration, with the JSON path it concerns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemaError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() || self.path == "." {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{}", join(.0))]
    Invalid(Vec<SchemaError>),
}

fn join(errors: &[SchemaError]) -> String {
    errors.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

impl ConfigError {
    pub fn errors(&self) -> Vec<SchemaError> {
        match self {
            ConfigError::Io { path, source } => vec![SchemaError { path: path.clone(), message: source.to_string() }],
            ConfigError::Invalid(e) => e.clone(),
        }
    }
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(vec![SchemaError { path: path.into(), message: message.into() }])
}

/// A configuration that passed every check, with its degeneration data.
#[derive(Clone, Debug)]
pub struct ValidatedJob {
    pub config: JobConfig,
    pub data: DegenerationData,
    pub cones: Option<Vec<Vec<IVec>>>,
    pub period: IntegerMatrix,
    pub options: ModelOptions,
    pub jobs: Option<usize>,
}

pub fn parse_config_str(text: &str) -> Result<JobConfig, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        invalid(path, e.into_inner().to_string())
    })
}

/// Reads and validates a job configuration.
pub fn parse_config(path: &Path) -> Result<(ValidatedJob, Vec<u8>), ConfigError> {
    let bytes = std::fs::read(path).map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| invalid("", "configuration is not UTF-8"))?;
    let config = parse_config_str(&text)?;
    Ok((validate(config)?, bytes))
}

fn matrix(rows: &[Vec<Int>], path: &str, shape: (usize, usize), errors: &mut Vec<SchemaError>) -> Option<IntegerMatrix> {
    let mut ok = true;
    if rows.len() != shape.0 {
        errors.push(SchemaError { path: path.into(), message: format!("expected {} rows, found {}", shape.0, rows.len()) });
        ok = false;
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != shape.1 {
            errors.push(SchemaError {
                path: format!("{path}[{i}]"),
                message: format!("expected {} entries, found {}", shape.1, row.len()),
            });
            ok = false;
        }
    }
    ok.then(|| IntegerMatrix::from_rows(&rows.iter().map(|r| from_ints(r)).collect::<Vec<_>>(), shape.1).expect("shape checked"))
}

fn core_error(path: &str, e: CoreError) -> SchemaError {
    SchemaError { path: path.into(), message: e.to_string() }
}

/// Checks shapes, the residue characteristic, the group and the degeneration data.
pub fn validate(config: JobConfig) -> Result<ValidatedJob, ConfigError> {
    let mut errors = Vec::new();
    if config.schema_version != SCHEMA_VERSION {
        errors.push(SchemaError {
            path: "schema_version".into(),
            message: format!("unsupported schema version {} (expected {SCHEMA_VERSION})", config.schema_version),
        });
    }
    let r = config.rank;
    let b = matrix(&config.b, "b", (r, r), &mut errors);
    let phi = config.phi.as_ref().and_then(|m| matrix(m, "phi", (r, r), &mut errors));
    let y_embedding = config.y_embedding.as_ref().and_then(|m| matrix(m, "y_embedding", (r, r), &mut errors));
    if let Some(a) = &config.a {
        if a.len() != r {
            errors.push(SchemaError { path: "a".into(), message: format!("expected {r} entries, found {}", a.len()) });
        }
    }
    let p = config.group.residue_char;
    if p != 0 && !logfan_core::lattice::is_prime(p) {
        errors.push(SchemaError { path: "group.residue_char".into(), message: format!("{p} is neither 0 nor prime") });
    }
    let mut generators = Vec::new();
    for (i, g) in config.group.generators.iter().enumerate() {
        let (name, rows) = match g {
            GeneratorConfig::Matrix(m) => (format!("g{i}"), m),
            GeneratorConfig::Named { name, matrix } => (name.clone(), matrix),
        };
        if let Some(m) = matrix(rows, &format!("group.generators[{i}]"), (r, r), &mut errors) {
            if !m.is_unimodular() {
                errors.push(SchemaError {
                    path: format!("group.generators[{i}]"),
                    message: format!("generator {name} not unimodular"),
                });
            }
            generators.push((name, m));
        }
    }
    let cones = config.cones.as_ref().map(|cones| {
        cones
            .iter()
            .enumerate()
            .map(|(i, rays)| {
                if rays.is_empty() {
                    errors.push(SchemaError { path: format!("cones[{i}]"), message: "a cone needs at least one ray".into() });
                }
                rays.iter()
                    .enumerate()
                    .map(|(j, ray)| {
                        if ray.len() != r + 1 {
                            errors.push(SchemaError {
                                path: format!("cones[{i}][{j}]"),
                                message: format!("expected {} coordinates, found {}", r + 1, ray.len()),
                            });
                        }
                        from_ints(ray)
                    })
                    .collect::<Vec<IVec>>()
            })
            .collect::<Vec<_>>()
    });
    let period = match &config.period {
        Some(m) => matrix(m, "period", (r, r), &mut errors),
        None => Some(IntegerMatrix::identity(r)),
    };
    if let Some(0) = config.options.jobs {
        errors.push(SchemaError { path: "options.jobs".into(), message: "must be at least 1".into() });
    }
    if let Some(0) = config.options.grid_density {
        errors.push(SchemaError { path: "options.grid_density".into(), message: "must be at least 1".into() });
    }
    if !errors.is_empty() {
        return Err(ConfigError::Invalid(errors));
    }
    let (b, period) = (b.expect("checked"), period.expect("checked"));

    let group =
        GroupAction::new(r, generators, config.group.order, p).map_err(|e| invalid("group", core_error("group", e).message))?;
    let ground = config.ground.clone().unwrap_or(GroundConfig { ramification_index: 1, uniformizer: pi() });
    let ground =
        GroundData::new(p, ground.ramification_index, ground.uniformizer).map_err(|e| invalid("ground", e.to_string()))?;
    let a = config.a.as_ref().map(|a| from_ints(a));
    let data = DegenerationData::new(b, phi, y_embedding, a, group, ground).map_err(|e| {
        let path = match e {
            CoreError::NotPositiveDefinite { .. } => "b",
            _ => "",
        };
        invalid(path, e.to_string())
    })?;
    let options = ModelOptions {
        degree_bound: config.options.degree_bound.unwrap_or(DEFAULT_DEGREE_BOUND),
        grid_density: config.options.grid_density.unwrap_or(ModelOptions::default().grid_density),
        max_orbits: DEFAULT_MAX_ORBITS,
        general_kato: config.options.general_kato,
    };
    let jobs = config.options.jobs;
    Ok(ValidatedJob { config, data, cones, period, options, jobs })
}
