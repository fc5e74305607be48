use std::collections::BTreeMap;

use crate::mrf::{Spin, VertexId};

/// A sample: one spin per vertex of the current instance.
pub type Sample = BTreeMap<VertexId, Spin>;

/// One differing coordinate: vertex `vertex` of chain `chain` went from
/// `old` to `new`. `None` means unassigned on that side (vertex or chain
/// absent).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct DiffEntry {
    pub chain: usize,
    pub vertex: VertexId,
    pub old: Option<Spin>,
    pub new: Option<Spin>,
}

/// Change of a sample sequence: chain counts before and after, plus every
/// differing coordinate ordered by `(chain, vertex)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SampleDiff {
    pub chains_before: usize,
    pub chains_after: usize,
    pub entries: Vec<DiffEntry>,
}

impl SampleDiff {
    /// Number of differing coordinates.
    pub fn size(&self) -> usize {
        self.entries.len()
    }
}

/// Differences between two sample sequences. Chains present on one side
/// only contribute all their coordinates.
pub fn sample_diff(old: &[Sample], new: &[Sample]) -> SampleDiff {
    let empty = Sample::new();
    let mut entries = Vec::new();
    for i in 0..old.len().max(new.len()) {
        let a = old.get(i).unwrap_or(&empty);
        let b = new.get(i).unwrap_or(&empty);
        let mut ia = a.iter().peekable();
        let mut ib = b.iter().peekable();
        loop {
            let (vertex, o, n) = match (ia.peek(), ib.peek()) {
                (None, None) => break,
                (Some(&(&va, &x)), Some(&(&vb, &y))) if va == vb => {
                    ia.next();
                    ib.next();
                    (va, Some(x), Some(y))
                }
                (Some(&(&va, &x)), Some(&(&vb, _))) if va < vb => {
                    ia.next();
                    (va, Some(x), None)
                }
                (Some(&(&va, &x)), None) => {
                    ia.next();
                    (va, Some(x), None)
                }
                (_, Some(&(&vb, &y))) => {
                    ib.next();
                    (vb, None, Some(y))
                }
            };
            if o != n {
                entries.push(DiffEntry {
                    chain: i,
                    vertex,
                    old: o,
                    new: n,
                });
            }
        }
    }
    SampleDiff {
        chains_before: old.len(),
        chains_after: new.len(),
        entries,
    }
}
