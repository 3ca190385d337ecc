//! Declarative scenarios: a correspondence, a representation, a disc point and
//! the checks to run on them, stored as JSON. Complex numbers are `[re, im]`.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraElement, MultiMatrixAlgebra, Representation};
use crate::corr::{CorrElement, Correspondence};
use crate::error::HardyError;
use crate::fock::FockPolynomial;
use crate::linalg::{c64, CMatrix, C64};
use crate::mutation::Mutation;
use crate::poisson::DiscPoint;
use crate::report::Report;
use crate::suite::{self, Check, Fixture, RunOptions};

pub const SCENARIO_VERSION: u32 = 1;

pub type Complex = [f64; 2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Block sizes of `M`.
    pub algebra: Vec<usize>,
    /// `mult[r][s]` copies of the bimodule `M_{n_r × n_s}` in `E`.
    pub correspondence: Vec<Vec<usize>>,
    /// Multiplicity of each block in `σ`.
    pub representation: Vec<usize>,
    pub truncation: usize,
    #[serde(default)]
    pub seed: u64,
    pub point: PointSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub polynomials: Vec<PolynomialSpec>,
    /// Level-one coordinates of `ξ` for the left point evaluation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left_point: Option<Vec<Complex>>,
    /// Blocks of the argument `a ∈ M` of the left point evaluation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left_argument: Option<Vec<Vec<Vec<Complex>>>>,
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tolerances: BTreeMap<Check, f64>,
    #[serde(default, skip_serializing_if = "is_default_mutation")]
    pub mutation: Mutation,
}

fn is_default_mutation(m: &Mutation) -> bool {
    *m == Mutation::None
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PointSpec {
    /// Rows index `E ⊗_σ H`, columns index `H`.
    Explicit { matrix: Vec<Vec<Complex>> },
    Random {
        target_norm: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolynomialSpec {
    /// One flat coordinate list per level, starting at level 0.
    Explicit { coefficients: Vec<Vec<Complex>> },
    Random {
        degree: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ScenarioError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid `{field}`: {message}")]
    Validation { field: String, message: String },
}

impl ScenarioError {
    fn field(field: &str, message: impl ToString) -> Self {
        ScenarioError::Validation { field: field.to_string(), message: message.to_string() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Parse { .. } => 3,
            ScenarioError::Validation { .. } => 2,
        }
    }
}

/// Everything a scenario resolves to.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub fixture: Fixture,
    pub checks: Vec<Check>,
    pub options: RunOptions,
}

/// CLI-level overrides applied on top of a scenario.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Overrides {
    pub truncation: Option<usize>,
    pub seed: Option<u64>,
    pub tolerance_scale: Option<f64>,
}

fn field(name: &str, message: impl ToString) -> ScenarioError {
    ScenarioError::field(name, message)
}

fn complex(c: &Complex) -> C64 {
    c64(c[0], c[1])
}

fn matrix(field: &str, rows: &[Vec<Complex>]) -> Result<CMatrix, ScenarioError> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(ScenarioError::field(field, "rows have different lengths"));
    }
    if rows.iter().flatten().flatten().any(|x| !x.is_finite()) {
        return Err(ScenarioError::field(field, "entries must be finite"));
    }
    Ok(CMatrix::from_fn(n, m, |i, j| complex(&rows[i][j])))
}

fn to_complex(x: C64) -> Complex {
    [x.re, x.im]
}

/// Rows of a dense matrix as `[re, im]` pairs.
pub fn matrix_rows(x: &CMatrix) -> Vec<Vec<Complex>> {
    (0..x.nrows()).map(|i| (0..x.ncols()).map(|j| to_complex(x[(i, j)])).collect()).collect()
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| ScenarioError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        if s.version != SCENARIO_VERSION {
            return Err(ScenarioError::field("version", format!("unsupported version {}, expected {SCENARIO_VERSION}", s.version)));
        }
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenarios serialize")
    }

    /// Builds the fixture, the ordered check list and run options.
    pub fn resolve(&self, overrides: &Overrides) -> Result<Resolved, ScenarioError> {
        let algebra = MultiMatrixAlgebra::new(self.algebra.clone()).map_err(|e| field("algebra", e))?;
        let corr = Correspondence::new(&algebra, self.correspondence.clone()).map_err(|e| field("correspondence", e))?;
        let rep = Representation::new(&algebra, self.representation.clone()).map_err(|e| field("representation", e))?;
        let truncation = overrides.truncation.unwrap_or(self.truncation);
        let seed = overrides.seed.unwrap_or(self.seed);
        let scale = overrides.tolerance_scale.unwrap_or(1.0);
        if !(scale.is_finite() && scale > 0.0) {
            return Err(field("tolerance_scale", "must be positive and finite"));
        }

        let eta = match &self.point {
            PointSpec::Explicit { matrix: rows } => {
                DiscPoint::new(&corr, &rep, matrix("point.matrix", rows)?).map_err(|e| field("point", e))?
            }
            PointSpec::Random { target_norm, seed: point_seed } => {
                DiscPoint::random(&corr, &rep, point_seed.unwrap_or(seed), *target_norm).map_err(|e| field("point", e))?
            }
        };

        let mut polynomials = Vec::with_capacity(self.polynomials.len());
        for (i, spec) in self.polynomials.iter().enumerate() {
            let name = format!("polynomials[{i}]");
            let poly = match spec {
                PolynomialSpec::Explicit { coefficients } => {
                    let coeffs = coefficients
                        .iter()
                        .enumerate()
                        .map(|(k, c)| {
                            let data: Vec<C64> = c.iter().map(complex).collect();
                            CorrElement::from_flat(&corr, k, &data)
                        })
                        .collect::<Result<Vec<_>, HardyError>>()
                        .map_err(|e| field(&name, e))?;
                    FockPolynomial::new(&corr, coeffs).map_err(|e| field(&name, e))?
                }
                PolynomialSpec::Random { degree, seed: poly_seed } => {
                    use rand::SeedableRng;
                    let s = poly_seed.unwrap_or_else(|| seed.wrapping_add(1000 + i as u64));
                    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(s);
                    FockPolynomial::random(&corr, *degree, &mut rng)
                }
            };
            polynomials.push(poly);
        }

        let left_point = match &self.left_point {
            None => None,
            Some(v) => {
                let data: Vec<C64> = v.iter().map(complex).collect();
                let xi = CorrElement::from_flat(&corr, 1, &data).map_err(|e| field("left_point", e))?;
                if xi.norm() >= 1.0 {
                    return Err(field("left_point", HardyError::NotInOpenBall { norm: xi.norm() }));
                }
                Some(xi)
            }
        };
        let left_argument = match &self.left_argument {
            None => None,
            Some(blocks) => {
                let blocks = blocks.iter().map(|b| matrix("left_argument", b)).collect::<Result<Vec<_>, _>>()?;
                Some(AlgebraElement::new(&algebra, blocks).map_err(|e| field("left_argument", e))?)
            }
        };

        for (check, tol) in &self.tolerances {
            if !(tol.is_finite() && *tol >= 0.0) {
                return Err(field(&format!("tolerances.{}", check.name()), "must be finite and nonnegative"));
            }
        }

        let label = self.name.clone().unwrap_or_else(|| "scenario".to_string());
        let mut fixture = Fixture::new(label, eta, truncation, seed);
        fixture.polynomials = polynomials;
        fixture.left_point = left_point;
        fixture.left_argument = left_argument;
        let options = RunOptions { tolerance_scale: scale, mutation: self.mutation, overrides: self.tolerances.clone() };
        Ok(Resolved { fixture, checks: self.checks.clone(), options })
    }
}

/// Runs the scenario's checks in declared order.
pub fn run_scenario(scenario: &Scenario, overrides: &Overrides) -> Result<Report, ScenarioError> {
    let start = Instant::now();
    let resolved = scenario.resolve(overrides)?;
    let mut report = suite::run_fixture(&resolved.fixture, &resolved.checks, &resolved.options);
    report.timings.total_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Status;

    const MINIMAL: &str = r#"{
        "version": 1,
        "algebra": [1],
        "correspondence": [[1]],
        "representation": [1],
        "truncation": 8,
        "point": {"kind": "explicit", "matrix": [[[0.5, 0.0]]]},
        "checks": ["telescoping"]
    }"#;

    #[test]
    fn minimal_scenario_passes() {
        let s = Scenario::parse(MINIMAL).unwrap();
        let r = run_scenario(&s, &Overrides::default()).unwrap();
        assert_eq!(r.checks.len(), 1);
        assert_eq!(r.checks[0].status, Status::Pass);
        assert!(r.checks[0].residual.unwrap() <= 1e-12);
    }

    #[test]
    fn round_trip_is_identity() {
        let s = Scenario::parse(MINIMAL).unwrap();
        let again = Scenario::parse(&s.to_json()).unwrap();
        assert_eq!(s, again);
        assert_eq!(again.to_json(), s.to_json());
    }

    #[test]
    fn norm_above_one_is_a_validation_error() {
        let text = MINIMAL.replace(r#"{"kind": "explicit", "matrix": [[[0.5, 0.0]]]}"#, r#"{"kind": "random", "target_norm": 1.2}"#);
        let s = Scenario::parse(&text).unwrap();
        let err = s.resolve(&Overrides::default()).unwrap_err();
        assert!(matches!(&err, ScenarioError::Validation { field, message } if field == "point" && message.contains("closed unit disc")));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = Scenario::parse("{\n  \"version\": 1,\n  oops }").unwrap_err();
        assert!(matches!(err, ScenarioError::Parse { line: 3, .. }), "{err:?}");
        assert_eq!(err.exit_code(), 3);
        assert!(matches!(Scenario::parse(r#"{"version": 1}"#), Err(ScenarioError::Parse { .. })));
    }

    #[test]
    fn dimension_mismatch_names_the_field() {
        let text = MINIMAL.replace("\"representation\": [1]", "\"representation\": [1, 1]");
        let err = Scenario::parse(&text).unwrap().resolve(&Overrides::default()).unwrap_err();
        assert!(matches!(&err, ScenarioError::Validation { field, .. } if field == "representation"));
    }

    #[test]
    fn overrides_apply() {
        let s = Scenario::parse(MINIMAL).unwrap();
        let o = Overrides { truncation: Some(2), seed: Some(9), tolerance_scale: Some(10.0) };
        let r = s.resolve(&o).unwrap();
        assert_eq!(r.fixture.truncation, 2);
        assert_eq!(r.fixture.seed, 9);
        assert!((r.options.tolerance(Check::Telescoping) - 1e-9).abs() < 1e-24);
    }
}
