//! JSON input documents and analysis reports.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alpha::{analyze, AlphaReport, SearchConfig};
use crate::cm::{CmDatum, CmError, CmType, CosetSpace, Violation};
use crate::finite_level::SweepTable;
use crate::group::{FiniteGroup, GroupError};
use crate::torus::{classify, CharacterLabel, CharacterSystem, Classification, TorusError};

pub const TOOL_NAME: &str = "cmt";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupSpec {
    Abelian { invariants: Vec<u64> },
    Table { table: Vec<Vec<usize>> },
}

/// A group element by index, or by coordinates for abelian groups.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementRef {
    Index(usize),
    Tuple(Vec<u64>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSpec {
    /// Defaults to the trivial subgroup.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgroup: Option<Vec<ElementRef>>,
    /// Coset representatives.
    pub phi: Vec<ElementRef>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatumDocument {
    pub group: GroupSpec,
    pub conjugation: ElementRef,
    pub factors: Vec<FactorSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DocumentError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
    #[error("invalid datum: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Violations(Vec<Violation>),
}

impl DocumentError {
    fn at(path: impl Into<String>, e: impl ToString) -> Self {
        DocumentError::Invalid {
            path: path.into(),
            message: e.to_string(),
        }
    }
}

impl DatumDocument {
    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        serde_json::from_str(text).map_err(|e| DocumentError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn from_datum(datum: &CmDatum) -> Self {
        let group = datum.group();
        let element = |x: usize| match group.tuple_of(x) {
            Some(t) if t.len() > 1 => ElementRef::Tuple(t),
            _ => ElementRef::Index(x),
        };
        let group_spec = match group.invariants() {
            Some(inv) => GroupSpec::Abelian { invariants: inv.to_vec() },
            None => GroupSpec::Table { table: group.table_rows() },
        };
        let factors = datum
            .factors()
            .iter()
            .map(|t| FactorSpec {
                subgroup: (!t.space().has_trivial_subgroup())
                    .then(|| t.space().subgroup().iter().map(|&x| element(x)).collect()),
                phi: t.phi_elements().into_iter().map(element).collect(),
            })
            .collect();
        DatumDocument {
            group: group_spec,
            conjugation: element(datum.conj()),
            factors,
        }
    }

    /// Builds and validates the datum.
    pub fn to_datum(&self) -> Result<CmDatum, DocumentError> {
        let group = Arc::new(match &self.group {
            GroupSpec::Abelian { invariants } => FiniteGroup::abelian(invariants),
            GroupSpec::Table { table } => FiniteGroup::from_table(table.clone()),
        }
        .map_err(|e| DocumentError::at("group", e))?);
        let resolve = |path: String, r: &ElementRef| -> Result<usize, DocumentError> {
            match r {
                ElementRef::Index(i) if *i < group.order() => Ok(*i),
                ElementRef::Index(i) => Err(DocumentError::at(path, GroupError::ElementOutOfRange(*i))),
                ElementRef::Tuple(t) => group.element_from_tuple(t).map_err(|e| DocumentError::at(path, e)),
            }
        };
        let conj = resolve("conjugation".into(), &self.conjugation)?;
        if self.factors.is_empty() {
            return Err(DocumentError::at("factors", "at least one factor is required"));
        }
        let mut factors = Vec::with_capacity(self.factors.len());
        for (i, f) in self.factors.iter().enumerate() {
            let subgroup = match &f.subgroup {
                None => vec![0],
                Some(h) => h
                    .iter()
                    .enumerate()
                    .map(|(j, r)| resolve(format!("factors[{i}].subgroup[{j}]"), r))
                    .collect::<Result<_, _>>()?,
            };
            let space = CosetSpace::new(group.clone(), &subgroup).map_err(|e| match e {
                CmError::NotSubgroup(_) => DocumentError::at(format!("factors[{i}].subgroup"), "not a subgroup"),
                other => DocumentError::at(format!("factors[{i}].subgroup"), other),
            })?;
            let phi: Vec<usize> = f
                .phi
                .iter()
                .enumerate()
                .map(|(j, r)| resolve(format!("factors[{i}].phi[{j}]"), r))
                .collect::<Result<_, _>>()?;
            let t = CmType::from_elements(space, &phi).map_err(|e| DocumentError::at(format!("factors[{i}].phi"), e))?;
            factors.push(t);
        }
        let datum = CmDatum::new(group, conj, factors);
        let violations = datum.validate();
        if !violations.is_empty() {
            return Err(DocumentError::Violations(violations));
        }
        Ok(datum)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalyzeError {
    #[error(transparent)]
    Document(#[from] DocumentError),
    #[error(transparent)]
    Torus(#[from] TorusError),
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupSummary {
    pub label: String,
    pub order: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CharacterSection {
    pub labels: Vec<CharacterLabel>,
    /// Orbit matrix rows: `<χ_j, gμ>` for `g = 0, 1, ...`.
    pub orbit_matrix: Vec<Vec<i64>>,
    pub conj_pairing: Vec<usize>,
    pub weight: Vec<i64>,
    #[serde(serialize_with = "crate::json::bigint")]
    pub orbit_saturation_index: num_bigint::BigInt,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportDocument {
    pub tool: &'static str,
    pub version: &'static str,
    pub input: DatumDocument,
    pub group: GroupSummary,
    pub characters: CharacterSection,
    pub classification: Classification,
    pub analysis: AlphaReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub finite_level: Option<SweepTable>,
}

/// Validate, build the torus, classify, compute `α` and check bounds.
pub fn analyze_document(doc: &DatumDocument, cfg: SearchConfig) -> Result<ReportDocument, AnalyzeError> {
    let datum = doc.to_datum()?;
    let cs = CharacterSystem::build(&datum)?;
    Ok(report_for(doc.clone(), &cs, cfg))
}

pub fn report_for(input: DatumDocument, cs: &CharacterSystem, cfg: SearchConfig) -> ReportDocument {
    let group = cs.datum().group();
    let orbit = cs.orbit_matrix();
    let orbit_matrix = (0..orbit.rows())
        .map(|g| cs.characters().iter().map(|c| c[g]).collect())
        .collect();
    ReportDocument {
        tool: TOOL_NAME,
        version: TOOL_VERSION,
        input,
        group: GroupSummary {
            label: group.label().to_string(),
            order: group.order(),
        },
        characters: CharacterSection {
            labels: cs.labels().to_vec(),
            orbit_matrix,
            conj_pairing: cs.conj_pairing().to_vec(),
            weight: cs.weight(),
            orbit_saturation_index: cs.orbit_saturation_index().clone(),
        },
        classification: classify(cs),
        analysis: analyze(cs, cfg),
        finite_level: None,
    }
}

/// Pretty JSON with a trailing newline.
pub fn render_report<T: Serialize>(report: &T) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}
