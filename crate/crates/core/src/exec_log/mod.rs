//! Execution logs: an initial configuration plus the ordered transitions of
//! one Gibbs chain, supporting rank-indexed edits and per-vertex
//! predecessor/successor queries in `O(log^2 T)` expected time.

mod treap;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::mrf::{Spin, VertexId};
use treap::{Arena, NIL};

/// One Gibbs step: `vertex` was resampled to `spin`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Transition {
    pub vertex: VertexId,
    pub spin: Spin,
}

impl Transition {
    pub fn new(vertex: VertexId, spin: Spin) -> Self {
        Self { vertex, spin }
    }
}

#[derive(Debug, Clone)]
struct VertexEntry {
    id: VertexId,
    initial: Spin,
    root: u32,
}

/// Index of a vertex inside one log, stable until the vertex is removed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Slot(u32);

#[derive(Debug, Clone)]
pub struct ExecutionLog {
    arena: Arena,
    slots: Vec<VertexEntry>,
    free_slots: Vec<u32>,
    index: BTreeMap<VertexId, u32>,
}

impl Default for ExecutionLog {
    fn default() -> Self {
        Self::new(std::iter::empty())
    }
}

impl ExecutionLog {
    /// Empty log with initial state `initial`. Later duplicates overwrite
    /// earlier ones.
    pub fn new(initial: impl IntoIterator<Item = (VertexId, Spin)>) -> Self {
        let mut log = Self {
            arena: Arena::new(),
            slots: Vec::new(),
            free_slots: Vec::new(),
            index: BTreeMap::new(),
        };
        for (v, c) in initial {
            match log.index.get(&v) {
                Some(&s) => log.slots[s as usize].initial = c,
                None => {
                    log.new_slot(v, c);
                }
            }
        }
        log
    }

    /// Builds a log from an initial state and a transition sequence in
    /// linear time.
    pub fn from_transitions(
        initial: impl IntoIterator<Item = (VertexId, Spin)>,
        transitions: &[Transition],
    ) -> Result<Self> {
        let mut log = Self::new(initial);
        log.append_all(transitions)?;
        Ok(log)
    }

    fn new_slot(&mut self, v: VertexId, c: Spin) -> u32 {
        let entry = VertexEntry {
            id: v,
            initial: c,
            root: NIL,
        };
        let s = if let Some(s) = self.free_slots.pop() {
            self.slots[s as usize] = entry;
            s
        } else {
            self.slots.push(entry);
            self.slots.len() as u32 - 1
        };
        self.index.insert(v, s);
        s
    }

    #[inline]
    pub(crate) fn slot(&self, v: VertexId) -> Result<Slot> {
        self.index
            .get(&v)
            .map(|&s| Slot(s))
            .ok_or(Error::UnknownVertex(v))
    }

    /// Number of transitions `T`.
    #[inline]
    pub fn len(&self) -> usize {
        self.arena.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn num_vertices(&self) -> usize {
        self.index.len()
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.index.contains_key(&v)
    }

    /// Vertex ids in ascending order.
    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.index.keys().copied()
    }

    pub fn initial(&self, v: VertexId) -> Option<Spin> {
        self.index.get(&v).map(|&s| self.slots[s as usize].initial)
    }

    /// `X_0` in ascending vertex order.
    pub fn initial_state(&self) -> BTreeMap<VertexId, Spin> {
        self.index
            .iter()
            .map(|(&v, &s)| (v, self.slots[s as usize].initial))
            .collect()
    }

    /// Live transition nodes, for space accounting. Equals [`Self::len`].
    pub fn node_count(&self) -> usize {
        self.arena.live_nodes()
    }

    fn check_rank(&self, t: usize) -> Result<u32> {
        if t == 0 || t > self.len() {
            Err(Error::RankOutOfRange {
                rank: t,
                len: self.len(),
            })
        } else {
            Ok(t as u32)
        }
    }

    fn transition_of(&self, x: u32) -> Transition {
        let n = self.arena.node(x);
        Transition {
            vertex: self.slots[n.slot as usize].id,
            spin: n.spin as Spin,
        }
    }

    /// Transition at rank `t` (1-based).
    pub fn get(&self, t: usize) -> Result<Transition> {
        let t = self.check_rank(t)?;
        Ok(self.transition_of(self.arena.kth(t)))
    }

    /// Inserts `<v, c>` at rank `t in 1..=len+1`, shifting later ranks up.
    pub fn insert(&mut self, t: usize, v: VertexId, c: Spin) -> Result<()> {
        if t == 0 || t > self.len() + 1 {
            return Err(Error::RankOutOfRange {
                rank: t,
                len: self.len(),
            });
        }
        let Slot(s) = self.slot(v)?;
        let t = t as u32;
        let x = self.arena.alloc(s, c as u32);
        self.arena.global_insert(t, x);
        let root = self.slots[s as usize].root;
        let (a, b) = self.arena.vsplit_le(root, t - 1);
        let ax = self.arena.vmerge(a, x);
        self.slots[s as usize].root = self.arena.vmerge(ax, b);
        Ok(())
    }

    /// Removes the transition at rank `t`, shifting later ranks down.
    pub fn remove(&mut self, t: usize) -> Result<Transition> {
        let t = self.check_rank(t)?;
        let x = self.arena.kth(t);
        let tr = self.transition_of(x);
        let s = self.arena.node(x).slot as usize;
        let root = self.slots[s].root;
        let (a, b) = self.arena.vsplit_le(root, t - 1);
        let (mid, c) = self.arena.vsplit_le(b, t);
        debug_assert_eq!(mid, x);
        self.slots[s].root = self.arena.vmerge(a, c);
        self.arena.global_detach(x);
        self.arena.free_node(x);
        Ok(tr)
    }

    /// Sets the spin at rank `t`, returning the previous one.
    pub fn change(&mut self, t: usize, c: Spin) -> Result<Spin> {
        let t = self.check_rank(t)?;
        let x = self.arena.kth(t);
        let old = self.arena.node(x).spin as Spin;
        self.arena.set_spin(x, c as u32);
        Ok(old)
    }

    /// `X_t(v)`: the spin of `v` after the first `t` transitions. Ranks past
    /// the end clamp to `len`.
    #[inline]
    pub fn evaluate(&self, t: usize, v: VertexId) -> Result<Spin> {
        Ok(self.evaluate_slot(t, self.slot(v)?))
    }

    #[inline]
    pub(crate) fn evaluate_slot(&self, t: usize, Slot(s): Slot) -> Spin {
        let t = t.min(self.len()) as u32;
        let e = &self.slots[s as usize];
        match self.arena.vpred(e.root, t) {
            Some((x, _)) => self.arena.node(x).spin as Spin,
            None => e.initial,
        }
    }

    /// Smallest rank `i > t` whose transition touches `v`.
    #[inline]
    pub fn successor(&self, t: usize, v: VertexId) -> Result<Option<usize>> {
        Ok(self.successor_slot(t, self.slot(v)?))
    }

    #[inline]
    pub(crate) fn successor_slot(&self, t: usize, Slot(s): Slot) -> Option<usize> {
        let t = t.min(u32::MAX as usize) as u32;
        self.arena
            .vsucc(self.slots[s as usize].root, t)
            .map(|(_, r)| r as usize)
    }

    /// Largest rank `i <= t` whose transition touches `v`.
    pub fn predecessor(&self, t: usize, v: VertexId) -> Result<Option<usize>> {
        let Slot(s) = self.slot(v)?;
        let t = t.min(self.len()) as u32;
        Ok(self
            .arena
            .vpred(self.slots[s as usize].root, t)
            .map(|(_, r)| r as usize))
    }

    /// Number of transitions of `v`.
    pub fn vertex_len(&self, v: VertexId) -> Result<usize> {
        let Slot(s) = self.slot(v)?;
        Ok(self.arena.vlen(self.slots[s as usize].root))
    }

    /// Rank of the `j`-th (0-based) transition of `v`.
    pub fn vertex_kth(&self, v: VertexId, j: usize) -> Result<usize> {
        let Slot(s) = self.slot(v)?;
        let root = self.slots[s as usize].root;
        let len = self.arena.vlen(root);
        if j >= len {
            return Err(Error::RankOutOfRange { rank: j, len });
        }
        Ok(self.arena.rank(self.arena.vkth(root, j as u32)) as usize)
    }

    /// All ranks of `v`'s transitions, ascending.
    pub fn vertex_ranks(&self, v: VertexId) -> Result<Vec<usize>> {
        let Slot(s) = self.slot(v)?;
        let mut nodes = Vec::new();
        self.arena.vin_order(self.slots[s as usize].root, &mut nodes);
        Ok(nodes
            .into_iter()
            .map(|x| self.arena.rank(x) as usize)
            .collect())
    }

    pub fn add_vertex_initial(&mut self, v: VertexId, c: Spin) -> Result<()> {
        if self.index.contains_key(&v) {
            return Err(Error::DuplicateVertex(v));
        }
        self.new_slot(v, c);
        Ok(())
    }

    pub fn set_initial(&mut self, v: VertexId, c: Spin) -> Result<()> {
        let Slot(s) = self.slot(v)?;
        self.slots[s as usize].initial = c;
        Ok(())
    }

    /// Drops `v` from the initial state; `v` must have no transitions.
    pub fn remove_vertex(&mut self, v: VertexId) -> Result<()> {
        let Slot(s) = self.slot(v)?;
        if self.slots[s as usize].root != NIL {
            return Err(Error::VertexHasTransitions(v));
        }
        self.index.remove(&v);
        self.free_slots.push(s);
        Ok(())
    }

    /// Removes every transition of `v`, returning how many there were.
    pub fn remove_transitions_of(&mut self, v: VertexId) -> Result<usize> {
        let Slot(s) = self.slot(v)?;
        let mut nodes = Vec::new();
        self.arena.vin_order(self.slots[s as usize].root, &mut nodes);
        for &x in &nodes {
            self.arena.global_detach(x);
        }
        self.arena.free_nodes(&nodes);
        self.slots[s as usize].root = NIL;
        Ok(nodes.len())
    }

    /// Appends transitions after rank `len`, building the new nodes in linear
    /// time and merging them into the existing trees.
    pub fn append_all(&mut self, transitions: &[Transition]) -> Result<()> {
        if transitions.is_empty() {
            return Ok(());
        }
        let mut nodes = Vec::with_capacity(transitions.len());
        let mut per_slot: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for tr in transitions {
            let Slot(s) = self.slot(tr.vertex)?;
            let x = self.arena.alloc(s, tr.spin as u32);
            nodes.push(x);
            per_slot.entry(s).or_default().push(x);
        }
        let tree = self.arena.build_global(&nodes);
        self.arena.append_global(tree);
        for (s, seq) in per_slot {
            let sub = self.arena.build_vertex(&seq);
            let root = self.slots[s as usize].root;
            self.slots[s as usize].root = self.arena.vmerge(root, sub);
        }
        Ok(())
    }

    pub fn push(&mut self, v: VertexId, c: Spin) -> Result<()> {
        self.insert(self.len() + 1, v, c)
    }

    /// Keeps the first `m` transitions. Returns the vertices that lost
    /// transitions, ascending.
    pub fn truncate(&mut self, m: usize) -> Vec<VertexId> {
        if m >= self.len() {
            return Vec::new();
        }
        let cut = self.arena.cut_suffix(m as u32);
        let mut touched: Vec<u32> = cut.iter().map(|&x| self.arena.node(x).slot).collect();
        touched.sort_unstable();
        touched.dedup();
        let mut ids = Vec::with_capacity(touched.len());
        for s in touched {
            let root = self.slots[s as usize].root;
            self.slots[s as usize].root = self.arena.vdrop_dead(root);
            ids.push(self.slots[s as usize].id);
        }
        self.arena.free_nodes(&cut);
        ids.sort_unstable();
        ids
    }

    /// Transitions in rank order.
    pub fn transitions(&self) -> Vec<Transition> {
        let mut nodes = Vec::with_capacity(self.len());
        self.arena.in_order(self.arena.root, &mut nodes);
        nodes.into_iter().map(|x| self.transition_of(x)).collect()
    }

    /// `X_T`, computed from each vertex's last transition.
    pub fn final_state(&self) -> BTreeMap<VertexId, Spin> {
        self.index
            .iter()
            .map(|(&v, &s)| {
                let e = &self.slots[s as usize];
                let c = match self.arena.vlast(e.root) {
                    Some(x) => self.arena.node(x).spin as Spin,
                    None => e.initial,
                };
                (v, c)
            })
            .collect()
    }
}
