//! JSON input and output formats.

use std::fmt;

use coxhom::solver::{CondRow, Failure, PathStatus, PointStatus, Solution, SolveConfig, SolveOutput};
use coxhom::startsys::StartSystem;
use coxhom::system::{LaurentPoly, SparseSystem, Term, C64};
use coxhom::toric::CoxData;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub exponent: Vec<i64>,
    pub coeff: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquationJson {
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StartJson {
    pub equations: Vec<EquationJson>,
    pub solutions: Vec<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub variables: Vec<String>,
    pub equations: Vec<EquationJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<StartJson>,
}

#[derive(Debug, PartialEq)]
pub enum InputError {
    /// Malformed JSON; `offset` is the byte offset of the problem.
    Json { offset: usize, line: usize, column: usize, message: String },
    Invalid(String),
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputError::Json { offset, line, column, message } => {
                write!(f, "malformed JSON at byte offset {offset} (line {line}, column {column}): {message}")
            }
            InputError::Invalid(m) => write!(f, "invalid system file: {m}"),
        }
    }
}

impl std::error::Error for InputError {}

/// Byte offset of a 1-based line and column as reported by serde_json.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let mut offset = 0;
    for (i, l) in text.split_inclusive('\n').enumerate() {
        if i + 1 == line {
            return (offset + column.saturating_sub(1)).min(text.len());
        }
        offset += l.len();
    }
    text.len()
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, InputError> {
    serde_json::from_str(text).map_err(|e| InputError::Json {
        offset: byte_offset(text, e.line(), e.column()),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn complex(c: [f64; 2]) -> C64 {
    C64::new(c[0], c[1])
}

fn pair(c: C64) -> [f64; 2] {
    [c.re, c.im]
}

fn equations_to_polys(equations: &[EquationJson], n: usize) -> Result<Vec<LaurentPoly>, InputError> {
    equations
        .iter()
        .enumerate()
        .map(|(i, eq)| {
            if eq.terms.is_empty() {
                return Err(InputError::Invalid(format!("equation {} has no terms", i + 1)));
            }
            let mut terms = Vec::with_capacity(eq.terms.len());
            for t in &eq.terms {
                if t.exponent.len() != n {
                    return Err(InputError::Invalid(format!(
                        "equation {}: exponent {:?} has length {}, expected {n}",
                        i + 1,
                        t.exponent,
                        t.exponent.len()
                    )));
                }
                if !t.coeff.iter().all(|v| v.is_finite()) {
                    return Err(InputError::Invalid(format!("equation {}: non-finite coefficient", i + 1)));
                }
                terms.push(Term { exponent: t.exponent.clone(), coeff: complex(t.coeff) });
            }
            Ok(LaurentPoly { terms })
        })
        .collect()
}

fn polys_to_equations(polys: &[LaurentPoly]) -> Vec<EquationJson> {
    polys
        .iter()
        .map(|p| EquationJson {
            terms: p.terms.iter().map(|t| TermJson { exponent: t.exponent.clone(), coeff: pair(t.coeff) }).collect(),
        })
        .collect()
}

impl SystemFile {
    pub fn parse(text: &str) -> Result<Self, InputError> {
        parse_json(text)
    }

    pub fn n(&self) -> usize {
        self.variables.len()
    }

    pub fn system(&self) -> Result<SparseSystem, InputError> {
        let n = self.n();
        if self.equations.len() != n {
            return Err(InputError::Invalid(format!("{} equations in {n} variables", self.equations.len())));
        }
        let polys = equations_to_polys(&self.equations, n)?;
        SparseSystem::new(n, polys).map_err(|e| InputError::Invalid(e.to_string()))
    }

    pub fn start_system(&self) -> Result<Option<StartSystem>, InputError> {
        let Some(start) = &self.start else { return Ok(None) };
        let n = self.n();
        if start.equations.len() != n {
            return Err(InputError::Invalid(format!("start block has {} equations, expected {n}", start.equations.len())));
        }
        let system = SparseSystem::new(n, equations_to_polys(&start.equations, n)?)
            .map_err(|e| InputError::Invalid(e.to_string()))?;
        let mut solutions = Vec::with_capacity(start.solutions.len());
        for (i, s) in start.solutions.iter().enumerate() {
            if s.len() != n {
                return Err(InputError::Invalid(format!("start solution {} has length {}, expected {n}", i + 1, s.len())));
            }
            solutions.push(s.iter().copied().map(complex).collect());
        }
        Ok(Some(StartSystem { system, solutions }))
    }

    pub fn from_system(variables: Vec<String>, system: &SparseSystem, start: Option<&StartSystem>) -> Self {
        SystemFile {
            variables,
            equations: polys_to_equations(&system.polys),
            start: start.map(|s| StartJson {
                equations: polys_to_equations(&s.system.polys),
                solutions: s.solutions.iter().map(|v| v.iter().copied().map(pair).collect()).collect(),
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub bkk: u64,
    pub k: usize,
    pub n: usize,
    /// Facet normals as the columns of an `n × k` matrix.
    #[serde(rename = "F")]
    pub f: Vec<Vec<i64>>,
    pub offsets: Vec<Vec<i64>>,
    pub orbit_degree_generic: u64,
    pub class_group: String,
    pub seed: u64,
    pub gamma: [f64; 2],
    pub config: SolveConfig,
    pub created_unix: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathJson {
    pub steps: usize,
    pub switches: usize,
    pub status: PathStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionJson {
    pub path_index: usize,
    pub cox: Vec<[f64; 2]>,
    /// 1-based indices of the nonzero Cox coordinates.
    pub stratum: Vec<usize>,
    pub status: PointStatus,
    pub face_rays: Vec<Vec<i64>>,
    pub torus: Option<Vec<[f64; 2]>>,
    pub residual: f64,
    pub singular: bool,
    pub condition: Option<f64>,
    pub path: PathJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailureJson {
    pub path_index: usize,
    pub reason: String,
    pub path: PathJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub header: Header,
    pub solutions: Vec<SolutionJson>,
    pub failures: Vec<FailureJson>,
}

fn solution_json(s: &Solution) -> SolutionJson {
    SolutionJson {
        path_index: s.index,
        cox: s.cox.iter().copied().map(pair).collect(),
        stratum: s.stratum.iter().map(|i| i + 1).collect(),
        status: s.status,
        face_rays: s.face_rays.clone(),
        torus: s.torus.as_ref().map(|t| t.iter().copied().map(pair).collect()),
        residual: s.residual,
        singular: s.singular,
        condition: s.condition.is_finite().then_some(s.condition),
        path: PathJson { steps: s.path.steps, switches: s.path.switches, status: s.path.status },
    }
}

fn failure_json(f: &Failure) -> FailureJson {
    FailureJson {
        path_index: f.index,
        reason: f.reason.clone(),
        path: PathJson { steps: f.path.steps, switches: f.path.switches, status: f.path.status },
    }
}

impl SolutionFile {
    pub fn new(cox: &CoxData, cfg: &SolveConfig, out: &SolveOutput, created_unix: u64) -> Self {
        SolutionFile {
            header: Header {
                bkk: cox.bkk,
                k: cox.k,
                n: cox.n,
                f: cox.f.to_rows_i64(),
                offsets: cox.offsets.clone(),
                orbit_degree_generic: cox.generic_orbit_degree,
                class_group: cox.class_group(),
                seed: cfg.seed,
                gamma: pair(out.gamma),
                config: cfg.clone(),
                created_unix,
            },
            solutions: out.solutions.iter().map(solution_json).collect(),
            failures: out.failures.iter().map(failure_json).collect(),
        }
    }
}

/// Condition log as CSV with header `path_id,tau,cond,step`.
pub fn condition_csv(rows: &[CondRow]) -> Result<Vec<u8>, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    if rows.is_empty() {
        w.write_record(["path_id", "tau", "cond", "step"])?;
    }
    w.into_inner().map_err(|e| csv::Error::from(e.into_error()))
}
