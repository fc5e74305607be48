//! Graph builders and the three standard models (Ising, hardcore, proper
//! coloring), with their closed-form high-temperature regimes.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::mrf::{EdgePotential, MrfInstance, Spin, SpinDomain, VertexId, VertexPotential};
use crate::rng::ChainRng;

/// A simple undirected graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    pub n: usize,
    pub edges: Vec<(u64, u64)>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<(u64, u64)>) -> Self {
        Self { n, edges }
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> {
        (0..self.n as u64).map(VertexId)
    }

    pub fn max_degree(&self) -> usize {
        let mut deg = vec![0usize; self.n];
        for &(u, v) in &self.edges {
            deg[u as usize] += 1;
            deg[v as usize] += 1;
        }
        deg.into_iter().max().unwrap_or(0)
    }
}

pub fn path_graph(n: usize) -> Graph {
    let edges = (1..n as u64).map(|i| (i - 1, i)).collect();
    Graph::new(n, edges)
}

pub fn cycle_graph(n: usize) -> Graph {
    let mut g = path_graph(n);
    if n >= 3 {
        g.edges.push((n as u64 - 1, 0));
    }
    g
}

pub fn complete_graph(n: usize) -> Graph {
    let n64 = n as u64;
    let edges = (0..n64)
        .flat_map(|u| (u + 1..n64).map(move |v| (u, v)))
        .collect();
    Graph::new(n, edges)
}

/// Center `0` joined to leaves `1..=leaves`.
pub fn star_graph(leaves: usize) -> Graph {
    Graph::new(leaves + 1, (1..=leaves as u64).map(|v| (0, v)).collect())
}

/// `side x side` torus (4-regular for `side >= 3`).
pub fn torus_graph(side: usize) -> Graph {
    let s = side as u64;
    let id = |r: u64, c: u64| r * s + c;
    let mut edges = BTreeSet::new();
    for r in 0..s {
        for c in 0..s {
            for (a, b) in [(id(r, c), id(r, (c + 1) % s)), (id(r, c), id((r + 1) % s, c))] {
                if a != b {
                    edges.insert((a.min(b), a.max(b)));
                }
            }
        }
    }
    Graph::new(side * side, edges.into_iter().collect())
}

/// Random simple graph with about `m` edges and maximum degree at most
/// `max_degree`, by rejection of proposals that would break either rule.
pub fn random_bounded_degree(n: usize, m: usize, max_degree: usize, rng: &mut ChainRng) -> Graph {
    let mut deg = vec![0usize; n];
    let mut edges = BTreeSet::new();
    if n < 2 {
        return Graph::new(n, vec![]);
    }
    let mut attempts = 0;
    while edges.len() < m && attempts < 20 * m + 100 {
        attempts += 1;
        let u = rng.below(n);
        let v = rng.below(n);
        if u == v || deg[u] >= max_degree || deg[v] >= max_degree {
            continue;
        }
        let key = (u.min(v) as u64, u.max(v) as u64);
        if edges.insert(key) {
            deg[u] += 1;
            deg[v] += 1;
        }
    }
    Graph::new(n, edges.into_iter().collect())
}

/// Random `d`-regular simple graph by the pairing model with restarts.
/// Requires `n * d` even and `d < n`.
pub fn random_regular(n: usize, d: usize, rng: &mut ChainRng) -> Result<Graph> {
    if d >= n || (n * d) % 2 == 1 {
        return Err(Error::InvalidParameter(format!(
            "no {d}-regular simple graph on {n} vertices"
        )));
    }
    // Pairing with rejection of loops and repeated edges one pair at a time
    // (close to uniform for fixed d); restarts only when stuck.
    'restart: for _ in 0..1_000 {
        let mut stubs: Vec<u64> = (0..n as u64)
            .flat_map(|v| std::iter::repeat_n(v, d))
            .collect();
        let mut edges = BTreeSet::new();
        while !stubs.is_empty() {
            let ok = |a: u64, b: u64, e: &BTreeSet<(u64, u64)>| a != b && !e.contains(&(a.min(b), a.max(b)));
            let mut pick = None;
            for _ in 0..64 {
                let (i, j) = (rng.below(stubs.len()), rng.below(stubs.len()));
                if i != j && ok(stubs[i], stubs[j], &edges) {
                    pick = Some((i, j));
                    break;
                }
            }
            if pick.is_none() {
                let valid: Vec<(usize, usize)> = (0..stubs.len())
                    .flat_map(|i| (i + 1..stubs.len()).map(move |j| (i, j)))
                    .filter(|&(i, j)| ok(stubs[i], stubs[j], &edges))
                    .collect();
                if valid.is_empty() {
                    continue 'restart;
                }
                pick = Some(valid[rng.below(valid.len())]);
            }
            let (i, j) = pick.expect("pair chosen");
            let (i, j) = (i.max(j), i.min(j));
            let a = stubs.swap_remove(i);
            let b = stubs.swap_remove(j);
            edges.insert((a.min(b), a.max(b)));
        }
        return Ok(Graph::new(n, edges.into_iter().collect()));
    }
    Err(Error::InvalidParameter(format!(
        "failed to sample a {d}-regular graph on {n} vertices"
    )))
}

/// Ising spin value of `c`: `0 -> -1`, `1 -> +1`.
#[inline]
pub fn ising_sign(c: Spin) -> f64 {
    if c == 0 {
        -1.0
    } else {
        1.0
    }
}

pub fn ising_vertex_potential(field: f64) -> VertexPotential {
    VertexPotential::new(vec![-field, field]).expect("finite field")
}

pub fn ising_edge_potential(beta: f64) -> EdgePotential {
    EdgePotential::from_fn(2, |a, b| beta * ising_sign(a) * ising_sign(b)).expect("symmetric")
}

/// Ising model with uniform coupling `beta` and field `field`:
/// `H(s) = beta * sum_{uv} s_u s_v + field * sum_v s_v`.
pub fn ising(g: &Graph, beta: f64, field: f64) -> Result<MrfInstance> {
    if !beta.is_finite() || !field.is_finite() {
        return Err(Error::InvalidParameter("Ising parameters must be finite".into()));
    }
    MrfInstance::new(
        SpinDomain::new(2)?,
        g.vertex_ids().map(|v| (v, ising_vertex_potential(field))),
        g.edges
            .iter()
            .map(|&(u, v)| (VertexId(u), VertexId(v), ising_edge_potential(beta))),
    )
}

pub fn ising_cycle(n: usize, beta: f64, field: f64) -> Result<MrfInstance> {
    ising(&cycle_graph(n), beta, field)
}

pub fn hardcore_vertex_potential(lambda: f64) -> VertexPotential {
    VertexPotential::new(vec![0.0, lambda.ln()]).expect("positive fugacity")
}

pub fn hardcore_edge_potential() -> EdgePotential {
    EdgePotential::from_fn(2, |a, b| {
        if a == 1 && b == 1 {
            f64::NEG_INFINITY
        } else {
            0.0
        }
    })
    .expect("symmetric")
}

/// Hardcore model: spin 1 = occupied, weight `lambda^{|occupied|}`, no two
/// adjacent occupied vertices.
pub fn hardcore(g: &Graph, lambda: f64) -> Result<MrfInstance> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("fugacity must be positive, got {lambda}")));
    }
    MrfInstance::new(
        SpinDomain::new(2)?,
        g.vertex_ids().map(|v| (v, hardcore_vertex_potential(lambda))),
        g.edges
            .iter()
            .map(|&(u, v)| (VertexId(u), VertexId(v), hardcore_edge_potential())),
    )
}

pub fn coloring_edge_potential(q: usize) -> EdgePotential {
    EdgePotential::from_fn(q, |a, b| if a == b { f64::NEG_INFINITY } else { 0.0 })
        .expect("symmetric")
}

/// Uniform distribution over proper `q`-colorings.
pub fn coloring(g: &Graph, q: usize) -> Result<MrfInstance> {
    MrfInstance::new(
        SpinDomain::new(q)?,
        g.vertex_ids().map(|v| (v, VertexPotential::zero(q))),
        g.edges
            .iter()
            .map(|&(u, v)| (VertexId(u), VertexId(v), coloring_edge_potential(q))),
    )
}

/// Table-style regime predicates. `delta` is the slack parameter of each
/// inequality; `delta = 0` gives the boundary of the regime.
pub fn ising_regime(beta: f64, max_degree: usize, delta: f64) -> bool {
    (-2.0 * beta.abs()).exp() >= 1.0 - (2.0 - delta) / (max_degree as f64 + 1.0)
}

pub fn hardcore_regime(lambda: f64, max_degree: usize, delta: f64) -> bool {
    max_degree <= 2 || lambda <= (2.0 - delta) / (max_degree as f64 - 2.0)
}

pub fn coloring_regime(q: usize, max_degree: usize, delta: f64) -> bool {
    q as f64 >= (2.0 + delta) * max_degree as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Ising,
    Hardcore,
    Coloring,
}

impl std::str::FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ising" => Ok(Model::Ising),
            "hardcore" => Ok(Model::Hardcore),
            "coloring" => Ok(Model::Coloring),
            other => Err(Error::InvalidParameter(format!("unknown model {other:?}"))),
        }
    }
}

/// Effective coupling `(phi00 + phi11 - phi01 - phi10) / 4` of a binary edge.
/// Any finite symmetric 2x2 table is an Ising interaction with this `beta`
/// plus vertex fields.
pub fn ising_beta(phi: &EdgePotential) -> f64 {
    (phi.get(0, 0) + phi.get(1, 1) - phi.get(0, 1) - phi.get(1, 0)) / 4.0
}

/// Largest `|beta|` over the edges, or `None` if `inst` is not a finite binary
/// model.
pub fn ising_max_beta(inst: &MrfInstance) -> Option<f64> {
    if inst.q() != 2 || inst.has_hard_constraints() {
        return None;
    }
    Some(inst.edges().map(|(_, p)| ising_beta(p).abs()).fold(0.0, f64::max))
}

/// Largest fugacity, or `None` if `inst` is not a hardcore model.
pub fn hardcore_max_lambda(inst: &MrfInstance) -> Option<f64> {
    if inst.q() != 2 {
        return None;
    }
    let edges_ok = inst.edges().all(|(_, p)| {
        p.get(1, 1) == f64::NEG_INFINITY && p.get(0, 0) == 0.0 && p.get(0, 1) == 0.0
    });
    if !edges_ok {
        return None;
    }
    let mut lambda: f64 = 0.0;
    for (_, phi) in inst.vertices() {
        let (a, b) = (phi.get(0), phi.get(1));
        if !a.is_finite() || !b.is_finite() {
            return None;
        }
        lambda = lambda.max((b - a).exp());
    }
    Some(lambda)
}

/// True if `inst` is the uniform proper-coloring model.
pub fn is_coloring(inst: &MrfInstance) -> bool {
    let q = inst.q();
    inst.edges().all(|(_, p)| {
        (0..q).all(|a| (0..q).all(|b| p.get(a, b) == if a == b { f64::NEG_INFINITY } else { 0.0 }))
    }) && inst
        .vertices()
        .all(|(_, phi)| phi.weights().iter().all(|&w| w == phi.get(0) && w.is_finite()))
}

/// Contraction rate used for the mixing length of a recognized model,
/// bounded above by 1.
///
/// * Ising: `1 - Delta tanh|beta|`, a lower bound on the Dobrushin gap.
/// * Coloring: `1 - Delta / (q - Delta)`, likewise.
/// * Hardcore: `(2 - lambda (Delta - 2)) / 96`, the path-coupling rate.
///
/// Fails with `RegimeViolation` if `inst` is not of the requested form or lies
/// outside its regime.
pub fn regime_delta(model: Model, inst: &MrfInstance) -> Result<f64> {
    let dmax = inst.max_degree();
    let delta = match model {
        Model::Ising => {
            let beta = ising_max_beta(inst)
                .ok_or_else(|| Error::RegimeViolation("instance is not an Ising model".into()))?;
            1.0 - dmax as f64 * beta.tanh()
        }
        Model::Coloring => {
            if !is_coloring(inst) {
                return Err(Error::RegimeViolation("instance is not a coloring model".into()));
            }
            let q = inst.q();
            if q <= dmax {
                0.0
            } else {
                1.0 - dmax as f64 / (q - dmax) as f64
            }
        }
        Model::Hardcore => {
            let lambda = hardcore_max_lambda(inst)
                .ok_or_else(|| Error::RegimeViolation("instance is not a hardcore model".into()))?;
            let slack = if dmax <= 2 {
                2.0
            } else {
                2.0 - lambda * (dmax as f64 - 2.0)
            };
            slack / 96.0
        }
    };
    if delta > 0.0 {
        Ok(delta.min(1.0))
    } else {
        Err(Error::RegimeViolation(format!(
            "{model:?} instance with max degree {dmax} has no positive contraction (delta = {delta})"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mrf::{dobrushin_check, DEFAULT_DEGREE_CAP};

    #[test]
    fn graph_shapes() {
        assert_eq!(path_graph(5).edges.len(), 4);
        assert_eq!(cycle_graph(5).edges.len(), 5);
        assert_eq!(complete_graph(4).edges.len(), 6);
        assert_eq!(star_graph(3).max_degree(), 3);
        let t = torus_graph(4);
        assert_eq!(t.edges.len(), 32);
        assert_eq!(t.max_degree(), 4);
    }

    #[test]
    fn random_graphs_respect_bounds() {
        let mut rng = ChainRng::new(3, 0);
        let g = random_bounded_degree(50, 80, 3, &mut rng);
        assert!(g.max_degree() <= 3);
        let r = random_regular(10, 3, &mut rng).unwrap();
        assert_eq!(r.edges.len(), 15);
        assert_eq!(r.max_degree(), 3);
        assert!(random_regular(5, 3, &mut rng).is_err());
    }

    #[test]
    fn beta_roundtrip() {
        assert!((ising_beta(&ising_edge_potential(-0.37)) + 0.37).abs() < 1e-15);
    }

    #[test]
    fn ising_regime_boundary_is_tanh() {
        // Delta tanh|beta| = 1 at the delta = 0 boundary.
        let d = 3;
        let beta = (1.0f64 / 3.0).atanh();
        assert!(ising_regime(beta - 1e-9, d, 0.0));
        assert!(!ising_regime(beta + 1e-9, d, 0.0));
    }

    #[test]
    fn regime_delta_rejects_wrong_model() {
        let inst = ising_cycle(4, 0.1, 0.0).unwrap();
        assert!(regime_delta(Model::Hardcore, &inst).is_err());
        assert!(regime_delta(Model::Coloring, &inst).is_err());
        let d = regime_delta(Model::Ising, &inst).unwrap();
        assert!((d - (1.0 - 2.0 * 0.1f64.tanh())).abs() < 1e-15);
    }

    #[test]
    fn ising_regime_delta_bounds_dobrushin_gap() {
        let inst = ising(&star_graph(4), 0.15, 0.2).unwrap();
        let closed = regime_delta(Model::Ising, &inst).unwrap();
        let exact = dobrushin_check(&inst, DEFAULT_DEGREE_CAP).unwrap().delta;
        assert!(closed <= exact + 1e-12);
    }

    #[test]
    fn hardcore_and_coloring_recognized() {
        let g = cycle_graph(5);
        let hc = hardcore(&g, 0.5).unwrap();
        assert!((hardcore_max_lambda(&hc).unwrap() - 0.5).abs() < 1e-15);
        assert!((regime_delta(Model::Hardcore, &hc).unwrap() - 2.0 / 96.0).abs() < 1e-15);
        let col = coloring(&g, 5).unwrap();
        assert!(is_coloring(&col));
        assert!((regime_delta(Model::Coloring, &col).unwrap() - (1.0 - 2.0 / 3.0)).abs() < 1e-15);
        let tight = coloring(&g, 2).unwrap();
        assert!(regime_delta(Model::Coloring, &tight).is_err());
    }
}
