use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::mrf::{Spin, VertexId};

/// Default limit on `|A|` and `|B|`.
pub const DEFAULT_VAR_CAP: usize = 3;
/// Largest accepted limit on `|A|` and `|B|`.
pub const HARD_VAR_CAP: usize = 8;
/// Largest accepted output dimension `q^|A|`.
pub const DIMENSION_CAP: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryKind {
    /// `mu_A(sigma_A)`.
    Marginal,
    /// `mu_A(sigma_A | tau_B)`.
    Posterior,
    /// `max over tau_B of mu_{A u B}(sigma_A, tau_B)`.
    Map,
}

/// An inference query over vertex set `A`, with conditioning set `B` for
/// posterior and MAP queries.
///
/// Output coordinates are indexed by `sum_j sigma(A[j]) * q^j`: the first
/// vertex of `A` is the least significant digit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub kind: QueryKind,
    pub a: Vec<VertexId>,
    pub b: Vec<VertexId>,
    /// Fixed assignment of `B` (posterior only).
    pub tau_b: Vec<Spin>,
}

impl Query {
    pub fn marginal(a: Vec<VertexId>) -> Self {
        Self {
            kind: QueryKind::Marginal,
            a,
            b: Vec::new(),
            tau_b: Vec::new(),
        }
    }

    pub fn posterior(a: Vec<VertexId>, b: Vec<(VertexId, Spin)>) -> Self {
        let (b, tau_b) = b.into_iter().unzip();
        Self {
            kind: QueryKind::Posterior,
            a,
            b,
            tau_b,
        }
    }

    pub fn map(a: Vec<VertexId>, b: Vec<VertexId>) -> Self {
        Self {
            kind: QueryKind::Map,
            a,
            b,
            tau_b: Vec::new(),
        }
    }

    /// Output dimension `q^|A|`.
    pub fn dimension(&self, q: usize) -> usize {
        q.pow(self.a.len() as u32)
    }

    /// Checks set sizes against `cap` (itself at most [`HARD_VAR_CAP`]),
    /// disjointness, duplicates, spin ranges and the dimension cap.
    pub fn validate(&self, q: usize, cap: usize) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidQuery(m));
        if cap > HARD_VAR_CAP {
            return bad(format!("variable cap {cap} exceeds {HARD_VAR_CAP}"));
        }
        if self.a.is_empty() {
            return bad("A is empty".into());
        }
        if self.a.len() > cap || self.b.len() > cap {
            return bad(format!("|A| and |B| must be at most {cap}"));
        }
        let a: BTreeSet<_> = self.a.iter().collect();
        let b: BTreeSet<_> = self.b.iter().collect();
        if a.len() != self.a.len() || b.len() != self.b.len() {
            return bad("duplicate vertex in A or B".into());
        }
        if a.intersection(&b).next().is_some() {
            return bad("A and B overlap".into());
        }
        match self.kind {
            QueryKind::Marginal if !self.b.is_empty() => {
                return bad("marginal query with a conditioning set".into())
            }
            QueryKind::Posterior if self.tau_b.len() != self.b.len() => {
                return bad("posterior query needs one spin per vertex of B".into())
            }
            QueryKind::Map if !self.tau_b.is_empty() => {
                return bad("MAP query takes no assignment of B".into())
            }
            _ => {}
        }
        if self.tau_b.iter().any(|&s| s >= q) {
            return bad(format!("spin out of range for q = {q}"));
        }
        let dim = (q as f64).powi(self.a.len() as i32);
        if dim > DIMENSION_CAP as f64 {
            return bad(format!("dimension {dim} exceeds {DIMENSION_CAP}"));
        }
        Ok(())
    }
}

/// `sum_j spins[j] * q^j`.
pub fn config_index(spins: &[Spin], q: usize) -> usize {
    spins.iter().rev().fold(0, |acc, &s| acc * q + s)
}

/// Inverse of [`config_index`] for `len` digits.
pub fn config_from_index(mut index: usize, q: usize, len: usize) -> Vec<Spin> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(index % q);
        index /= q;
    }
    out
}
