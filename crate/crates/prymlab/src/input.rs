//! JSON input schemas and their conversion into validated domain objects.
//! Every permutation is written in 1-based disjoint-cycle notation such as
//! `"(1 2)(4 5 6)"`, with `"()"` for the identity.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coverings::{validate_covering, BranchPoint, CoveringData, CoveringError, HurwitzFilter};
use crate::graphs::{
    certify_prym, complete_graph_union, lattice_complement, lattice_graph, latin_square_graph,
    paley_graph, schlaefli_graph, GraphError, IntMatrix, PrymGraph,
};
use crate::permgroups::{PermError, PermGroup, Permutation};
use crate::prym::{build_triple, EigenvalueTag, PrymError, PrymTriple};
use crate::splitting::{SplitError, TowerBranchKind, TowerBranchPoint, TowerSpec};

#[derive(Debug, Error)]
pub enum InputError {
    #[error("JSON parse error: {0}")]
    Json(String),
    #[error("unknown graph kind {0:?}")]
    UnknownGraphKind(String),
    #[error("graph kind {kind} requires field {field}")]
    MissingGraphField { kind: String, field: &'static str },
    #[error("graph kind {kind} does not use field {field}")]
    UnusedGraphField { kind: String, field: &'static str },
    #[error("unknown eigenvalue tag {0:?}, expected \"plus\" or \"minus\"")]
    UnknownTag(String),
    #[error("branch point {label} has unknown kind {kind:?}, expected \"block\" or \"inner\"")]
    UnknownBranchKind { label: String, kind: String },
    #[error("unknown filter {0:?}, expected \"none\", \"transitive\" or \"generating\"")]
    UnknownFilter(String),
    #[error("branch point {label}: {source}")]
    BranchPerm { label: String, source: PermError },
    #[error("generator {index}: {source}")]
    Generator { index: usize, source: PermError },
    #[error("class representative {index}: {source}")]
    ClassRepresentative { index: usize, source: PermError },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Covering(#[from] CoveringError),
    #[error(transparent)]
    Prym(#[from] PrymError),
    #[error(transparent)]
    Split(#[from] SplitError),
}

/// Parses a JSON document into one of the spec types below. Error messages
/// carry the offending field and position as reported by the parser.
pub fn parse_spec<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, InputError> {
    serde_json::from_str(text).map_err(|e| InputError::Json(e.to_string()))
}

/// Graph selector: a named catalog construction or an explicit matrix.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_copies: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<Vec<i64>>>,
}

struct GraphFields<'a> {
    kind: &'a str,
    spec: &'a GraphSpec,
}

impl<'a> GraphFields<'a> {
    fn need_n(&self) -> Result<usize, InputError> {
        self.spec.n.ok_or(InputError::MissingGraphField {
            kind: self.kind.to_string(),
            field: "n",
        })
    }

    fn forbid(&self, used: &[&'static str]) -> Result<(), InputError> {
        let fields: [(&'static str, bool); 5] = [
            ("n", self.spec.n.is_some()),
            ("q", self.spec.q.is_some()),
            ("m_copies", self.spec.m_copies.is_some()),
            ("k", self.spec.k.is_some()),
            ("entries", self.spec.entries.is_some()),
        ];
        for (field, present) in fields {
            if present && !used.contains(&field) {
                return Err(InputError::UnusedGraphField {
                    kind: self.kind.to_string(),
                    field,
                });
            }
        }
        Ok(())
    }
}

/// Builds the graph selected by the spec. Explicit matrices come with no
/// automorphism generators, so downstream certification reports why it fails
/// instead of silently inventing a group.
pub fn build_graph(spec: &GraphSpec) -> Result<PrymGraph, InputError> {
    let fields = GraphFields { kind: spec.kind.as_str(), spec };
    match spec.kind.as_str() {
        "lattice" => {
            fields.forbid(&["n"])?;
            Ok(lattice_graph(fields.need_n()?)?)
        }
        "lattice_complement" => {
            fields.forbid(&["n"])?;
            Ok(lattice_complement(fields.need_n()?)?)
        }
        "latin_square" => {
            fields.forbid(&["n"])?;
            Ok(latin_square_graph(fields.need_n()?)?)
        }
        "schlaefli" => {
            fields.forbid(&[])?;
            Ok(schlaefli_graph())
        }
        "paley" => {
            fields.forbid(&["q"])?;
            let q = spec.q.ok_or(InputError::MissingGraphField {
                kind: spec.kind.clone(),
                field: "q",
            })?;
            Ok(paley_graph(q)?)
        }
        "complete_union" => {
            fields.forbid(&["m_copies", "k"])?;
            let m = spec.m_copies.ok_or(InputError::MissingGraphField {
                kind: spec.kind.clone(),
                field: "m_copies",
            })?;
            let k = spec.k.ok_or(InputError::MissingGraphField {
                kind: spec.kind.clone(),
                field: "k",
            })?;
            Ok(complete_graph_union(m, k)?)
        }
        "explicit" => {
            fields.forbid(&["entries"])?;
            let entries = spec.entries.clone().ok_or(InputError::MissingGraphField {
                kind: spec.kind.clone(),
                field: "entries",
            })?;
            let matrix = IntMatrix::from_rows(entries)?;
            let labels = (1..=matrix.size()).map(|i| format!("v{i}")).collect();
            Ok(PrymGraph {
                label: "explicit".to_string(),
                matrix,
                vertex_labels: labels,
                generators: Vec::new(),
            })
        }
        other => Err(InputError::UnknownGraphKind(other.to_string())),
    }
}

/// One branch point: a label and a cycle-notation permutation.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BranchPointSpec {
    pub label: String,
    pub perm: String,
}

/// Covering monodromy: degree and the ordered branch list.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CoveringSpecFile {
    pub degree: usize,
    pub branch_points: Vec<BranchPointSpec>,
}

/// Parses and validates a covering. Permutation errors cite the branch label.
pub fn build_covering(spec: &CoveringSpecFile) -> Result<CoveringData, InputError> {
    let mut branch = Vec::with_capacity(spec.branch_points.len());
    for bp in &spec.branch_points {
        let perm = Permutation::parse_cycles(&bp.perm, spec.degree)
            .map_err(|source| InputError::BranchPerm { label: bp.label.clone(), source })?;
        branch.push(BranchPoint::new(bp.label.clone(), perm));
    }
    Ok(validate_covering(spec.degree, branch)?)
}

/// Writes a covering back to its file form (used by the fixture cache).
pub fn covering_to_spec(covering: &CoveringData) -> CoveringSpecFile {
    CoveringSpecFile {
        degree: covering.degree(),
        branch_points: covering
            .branch_points()
            .iter()
            .map(|bp| BranchPointSpec { label: bp.label.clone(), perm: bp.perm.format_cycles() })
            .collect(),
    }
}

/// Triple selector: base graph, copy count, tracked eigenvalue, covering.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TripleSpecFile {
    pub matrix: GraphSpec,
    pub m: usize,
    pub r: String,
    pub covering: CoveringSpecFile,
}

pub fn parse_tag(text: &str) -> Result<EigenvalueTag, InputError> {
    match text {
        "plus" => Ok(EigenvalueTag::Plus),
        "minus" => Ok(EigenvalueTag::Minus),
        other => Err(InputError::UnknownTag(other.to_string())),
    }
}

/// Builds and fully validates the triple described by a spec file.
pub fn build_triple_from_spec(spec: &TripleSpecFile) -> Result<PrymTriple, InputError> {
    let graph = build_graph(&spec.matrix)?;
    let tag = parse_tag(&spec.r)?;
    let covering = build_covering(&spec.covering)?;
    let certificate = certify_prym(&graph.matrix, &graph.generators)?;
    Ok(build_triple(graph, certificate, spec.m, tag, covering)?)
}

/// One tower branch point: label, block/inner tag, composite permutation.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TowerBranchPointSpec {
    pub label: String,
    pub kind: String,
    pub perm: String,
}

/// Two-step tower: block size, block count, tagged branch list.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TowerSpecFile {
    pub d: usize,
    pub m: usize,
    pub branch_points: Vec<TowerBranchPointSpec>,
}

pub fn build_tower(spec: &TowerSpecFile) -> Result<TowerSpec, InputError> {
    let degree = spec.d * spec.m;
    let mut branch = Vec::with_capacity(spec.branch_points.len());
    for bp in &spec.branch_points {
        let kind = match bp.kind.as_str() {
            "block" => TowerBranchKind::Block,
            "inner" => TowerBranchKind::Inner,
            other => {
                return Err(InputError::UnknownBranchKind {
                    label: bp.label.clone(),
                    kind: other.to_string(),
                })
            }
        };
        let perm = Permutation::parse_cycles(&bp.perm, degree)
            .map_err(|source| InputError::BranchPerm { label: bp.label.clone(), source })?;
        branch.push(TowerBranchPoint::new(bp.label.clone(), kind, perm));
    }
    Ok(TowerSpec::new(spec.d, spec.m, branch)?)
}

/// Class-counting problem: ambient group generators, class representatives,
/// and the tuple filter.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct HurwitzSpecFile {
    pub degree: usize,
    pub generators: Vec<String>,
    pub classes: Vec<String>,
    #[serde(default)]
    pub filter: Option<String>,
}

#[derive(Clone, Debug)]
pub struct HurwitzProblem {
    pub group: PermGroup,
    pub classes: Vec<Permutation>,
    pub filter: HurwitzFilter,
}

pub fn build_hurwitz(spec: &HurwitzSpecFile) -> Result<HurwitzProblem, InputError> {
    let mut generators = Vec::with_capacity(spec.generators.len());
    for (index, text) in spec.generators.iter().enumerate() {
        let perm = Permutation::parse_cycles(text, spec.degree)
            .map_err(|source| InputError::Generator { index: index + 1, source })?;
        generators.push(perm);
    }
    let group = PermGroup::new(spec.degree, generators)?;
    let mut classes = Vec::with_capacity(spec.classes.len());
    for (index, text) in spec.classes.iter().enumerate() {
        let perm = Permutation::parse_cycles(text, spec.degree)
            .map_err(|source| InputError::ClassRepresentative { index: index + 1, source })?;
        classes.push(perm);
    }
    let filter = match spec.filter.as_deref() {
        None | Some("none") => HurwitzFilter::None,
        Some("transitive") => HurwitzFilter::Transitive,
        Some("generating") => HurwitzFilter::Generating,
        Some(other) => return Err(InputError::UnknownFilter(other.to_string())),
    };
    Ok(HurwitzProblem { group, classes, filter })
}
