//! JSON documents read and written by the command-line tool.
//!
//! Log-potentials are JSON numbers, with the string `"-inf"` standing for a
//! forbidden configuration.

use std::fmt;

use dyngibbs::inference::DEFAULT_VAR_CAP;
use dyngibbs::{
    EdgePotential, MrfInstance, Query, Spin, SpinDomain, UpdateBatch, UpdateRecord, VertexId,
    VertexPotential,
};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::FormatError;

/// One log-potential entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogPot(pub f64);

impl Serialize for LogPot {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0 == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for LogPot {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = LogPot;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or \"-inf\"")
            }
            fn visit_f64<E: de::Error>(self, x: f64) -> Result<LogPot, E> {
                Ok(LogPot(x))
            }
            fn visit_i64<E: de::Error>(self, x: i64) -> Result<LogPot, E> {
                Ok(LogPot(x as f64))
            }
            fn visit_u64<E: de::Error>(self, x: u64) -> Result<LogPot, E> {
                Ok(LogPot(x as f64))
            }
            fn visit_str<E: de::Error>(self, s: &str) -> Result<LogPot, E> {
                if s == "-inf" {
                    Ok(LogPot(f64::NEG_INFINITY))
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(s), &self))
                }
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexDoc {
    pub id: u64,
    pub phi: Vec<LogPot>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub u: u64,
    pub v: u64,
    pub phi: Vec<Vec<LogPot>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub q: usize,
    pub vertices: Vec<VertexDoc>,
    #[serde(default)]
    pub edges: Vec<EdgeDoc>,
}

fn invalid(field: impl Into<String>, e: impl fmt::Display) -> FormatError {
    FormatError::Invalid {
        field: field.into(),
        msg: e.to_string(),
    }
}

fn vertex_potential(field: &str, q: usize, phi: &[LogPot]) -> Result<VertexPotential, FormatError> {
    if phi.len() != q {
        return Err(FormatError::BadArity {
            field: field.to_string(),
            expected: q,
            got: phi.len(),
        });
    }
    VertexPotential::new(phi.iter().map(|p| p.0).collect()).map_err(|e| invalid(field, e))
}

fn edge_potential(
    field: &str,
    q: usize,
    (u, v): (u64, u64),
    phi: &[Vec<LogPot>],
) -> Result<EdgePotential, FormatError> {
    if phi.len() != q {
        return Err(FormatError::BadArity {
            field: field.to_string(),
            expected: q,
            got: phi.len(),
        });
    }
    for (r, row) in phi.iter().enumerate() {
        if row.len() != q {
            return Err(FormatError::BadArity {
                field: format!("{field}[{r}]"),
                expected: q,
                got: row.len(),
            });
        }
    }
    for a in 0..q {
        for b in 0..a {
            // Bitwise comparison so that -inf matches -inf.
            if phi[a][b].0.to_bits() != phi[b][a].0.to_bits() {
                return Err(FormatError::AsymmetricEdge { u, v });
            }
        }
    }
    EdgePotential::new(phi.iter().map(|r| r.iter().map(|p| p.0).collect()).collect())
        .map_err(|e| invalid(field, e))
}

pub fn instance_from_doc(doc: &InstanceDoc) -> Result<MrfInstance, FormatError> {
    let domain = SpinDomain::new(doc.q).map_err(|e| invalid("q", e))?;
    let q = doc.q;
    let vertices = doc
        .vertices
        .iter()
        .enumerate()
        .map(|(i, d)| Ok((VertexId(d.id), vertex_potential(&format!("vertices[{i}].phi"), q, &d.phi)?)))
        .collect::<Result<Vec<_>, FormatError>>()?;
    let edges = doc
        .edges
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let phi = edge_potential(&format!("edges[{i}].phi"), q, (d.u, d.v), &d.phi)?;
            Ok((VertexId(d.u), VertexId(d.v), phi))
        })
        .collect::<Result<Vec<_>, FormatError>>()?;
    MrfInstance::new(domain, vertices, edges).map_err(|e| invalid("instance", e))
}

fn pots(w: &[f64]) -> Vec<LogPot> {
    w.iter().map(|&x| LogPot(x)).collect()
}

fn matrix(p: &EdgePotential) -> Vec<Vec<LogPot>> {
    p.rows().iter().map(|r| pots(r)).collect()
}

pub fn instance_to_doc(inst: &MrfInstance) -> InstanceDoc {
    InstanceDoc {
        q: inst.q(),
        vertices: inst
            .vertices()
            .map(|(v, p)| VertexDoc {
                id: v.0,
                phi: pots(p.weights()),
            })
            .collect(),
        edges: inst
            .edges()
            .map(|(k, p)| {
                let (u, v) = k.endpoints();
                EdgeDoc {
                    u: u.0,
                    v: v.0,
                    phi: matrix(p),
                }
            })
            .collect(),
    }
}

pub fn parse_instance(text: &str) -> Result<MrfInstance, FormatError> {
    let doc: InstanceDoc = serde_json::from_str(text).map_err(|e| FormatError::json("instance", e))?;
    instance_from_doc(&doc)
}

pub fn serialize_instance(inst: &MrfInstance) -> String {
    let mut s = serde_json::to_string_pretty(&instance_to_doc(inst)).expect("instance serializes");
    s.push('\n');
    s
}

/// One edit in the update stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum OpDoc {
    SetVertexPhi { id: u64, phi: Vec<LogPot> },
    SetEdgePhi { u: u64, v: u64, phi: Vec<Vec<LogPot>> },
    AddVertex { id: u64, phi: Vec<LogPot> },
    DelVertex { id: u64 },
    AddEdge { u: u64, v: u64, phi: Vec<Vec<LogPot>> },
    DelEdge { u: u64, v: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchDoc {
    pub ops: Vec<OpDoc>,
}

fn record_from_op(field: &str, q: usize, op: &OpDoc) -> Result<UpdateRecord, FormatError> {
    Ok(match op {
        OpDoc::SetVertexPhi { id, phi } => {
            UpdateRecord::SetVertexPotential(VertexId(*id), vertex_potential(field, q, phi)?)
        }
        OpDoc::AddVertex { id, phi } => {
            UpdateRecord::AddVertex(VertexId(*id), vertex_potential(field, q, phi)?)
        }
        OpDoc::DelVertex { id } => UpdateRecord::DeleteVertex(VertexId(*id)),
        OpDoc::SetEdgePhi { u, v, phi } => UpdateRecord::SetEdgePotential(
            VertexId(*u),
            VertexId(*v),
            edge_potential(field, q, (*u, *v), phi)?,
        ),
        OpDoc::AddEdge { u, v, phi } => UpdateRecord::AddEdge(
            VertexId(*u),
            VertexId(*v),
            edge_potential(field, q, (*u, *v), phi)?,
        ),
        OpDoc::DelEdge { u, v } => UpdateRecord::DeleteEdge(VertexId(*u), VertexId(*v)),
    })
}

fn op_from_record(r: &UpdateRecord) -> OpDoc {
    match r {
        UpdateRecord::SetVertexPotential(v, p) => OpDoc::SetVertexPhi {
            id: v.0,
            phi: pots(p.weights()),
        },
        UpdateRecord::AddVertex(v, p) => OpDoc::AddVertex {
            id: v.0,
            phi: pots(p.weights()),
        },
        UpdateRecord::DeleteVertex(v) => OpDoc::DelVertex { id: v.0 },
        UpdateRecord::SetEdgePotential(u, v, p) => OpDoc::SetEdgePhi {
            u: u.0,
            v: v.0,
            phi: matrix(p),
        },
        UpdateRecord::AddEdge(u, v, p) => OpDoc::AddEdge {
            u: u.0,
            v: v.0,
            phi: matrix(p),
        },
        UpdateRecord::DeleteEdge(u, v) => OpDoc::DelEdge { u: u.0, v: v.0 },
    }
}

/// Parses a JSONL update stream (one batch per non-blank line) for spin
/// domain size `q`, without checking the batches against an instance.
pub fn parse_batches(text: &str, q: usize) -> Result<Vec<(usize, UpdateBatch)>, FormatError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let what = format!("update stream line {line_no}");
        let doc: BatchDoc = serde_json::from_str(line).map_err(|e| FormatError::json(&what, e))?;
        let records = doc
            .ops
            .iter()
            .enumerate()
            .map(|(j, op)| record_from_op(&format!("{what}, ops[{j}]"), q, op))
            .collect::<Result<Vec<_>, _>>()?;
        out.push((line_no, UpdateBatch::new(records)));
    }
    Ok(out)
}

/// Parses an update stream and checks that every batch applies cleanly to
/// the instance produced by the ones before it, starting from `base`.
pub fn parse_update_stream(text: &str, base: &MrfInstance) -> Result<Vec<UpdateBatch>, FormatError> {
    let batches = parse_batches(text, base.q())?;
    let mut inst = base.clone();
    let mut out = Vec::with_capacity(batches.len());
    for (line, b) in batches {
        inst = inst.apply(&b).map_err(|e| FormatError::InvalidBatch {
            line,
            msg: e.to_string(),
        })?;
        out.push(b);
    }
    Ok(out)
}

pub fn serialize_batch(batch: &UpdateBatch) -> String {
    let doc = BatchDoc {
        ops: batch.records().iter().map(op_from_record).collect(),
    };
    serde_json::to_string(&doc).expect("batch serializes")
}

pub fn serialize_update_stream(batches: &[UpdateBatch]) -> String {
    batches.iter().map(|b| serialize_batch(b) + "\n").collect()
}

/// One entry of a queries file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum QueryDoc {
    Marginal { a: Vec<u64> },
    Posterior { a: Vec<u64>, b: Vec<u64>, tau_b: Vec<Spin> },
    Map { a: Vec<u64>, b: Vec<u64> },
}

fn ids(v: &[u64]) -> Vec<VertexId> {
    v.iter().map(|&x| VertexId(x)).collect()
}

pub fn query_from_doc(doc: &QueryDoc) -> Result<Query, FormatError> {
    Ok(match doc {
        QueryDoc::Marginal { a } => Query::marginal(ids(a)),
        QueryDoc::Posterior { a, b, tau_b } => {
            if b.len() != tau_b.len() {
                return Err(FormatError::BadArity {
                    field: "tau_b".into(),
                    expected: b.len(),
                    got: tau_b.len(),
                });
            }
            Query::posterior(ids(a), ids(b).into_iter().zip(tau_b.iter().copied()).collect())
        }
        QueryDoc::Map { a, b } => Query::map(ids(a), ids(b)),
    })
}

pub fn query_to_doc(q: &Query) -> QueryDoc {
    let raw = |v: &[VertexId]| v.iter().map(|x| x.0).collect::<Vec<_>>();
    match q.kind {
        dyngibbs::QueryKind::Marginal => QueryDoc::Marginal { a: raw(&q.a) },
        dyngibbs::QueryKind::Posterior => QueryDoc::Posterior {
            a: raw(&q.a),
            b: raw(&q.b),
            tau_b: q.tau_b.clone(),
        },
        dyngibbs::QueryKind::Map => QueryDoc::Map {
            a: raw(&q.a),
            b: raw(&q.b),
        },
    }
}

/// Parses a JSON array of queries and validates each against `q` and the
/// default variable cap.
pub fn parse_queries(text: &str, q: usize) -> Result<Vec<Query>, FormatError> {
    let docs: Vec<QueryDoc> = serde_json::from_str(text).map_err(|e| FormatError::json("queries", e))?;
    docs.iter()
        .enumerate()
        .map(|(i, d)| {
            let query = query_from_doc(d)?;
            query
                .validate(q, DEFAULT_VAR_CAP)
                .map_err(|e| invalid(format!("queries[{i}]"), e))?;
            Ok(query)
        })
        .collect()
}
