use std::fmt;

use crate::error::{Error, Result};

/// Spin value in `0..q`.
pub type Spin = usize;

/// Opaque vertex identifier. Iteration over vertices is always by ascending id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u64);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u64> for VertexId {
    fn from(v: u64) -> Self {
        VertexId(v)
    }
}

/// Unordered vertex pair, stored with the smaller id first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeKey(VertexId, VertexId);

impl EdgeKey {
    pub fn new(u: VertexId, v: VertexId) -> Result<Self> {
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        Ok(if u < v { EdgeKey(u, v) } else { EdgeKey(v, u) })
    }

    pub fn endpoints(&self) -> (VertexId, VertexId) {
        (self.0, self.1)
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.0 == v || self.1 == v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpinDomain {
    q: usize,
}

impl SpinDomain {
    pub fn new(q: usize) -> Result<Self> {
        if q < 2 {
            return Err(Error::BadDomain(q));
        }
        Ok(Self { q })
    }

    pub fn q(&self) -> usize {
        self.q
    }
}

fn check_weight(w: f64) -> Result<()> {
    if w.is_nan() || w == f64::INFINITY {
        Err(Error::InvalidWeight)
    } else {
        Ok(())
    }
}

/// `|a - b|` on the extended reals where `-inf` is a point: equal sentinels
/// are distance 0, a finite value against `-inf` is infinitely far.
#[inline]
pub fn log_weight_distance(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else if a == f64::NEG_INFINITY || b == f64::NEG_INFINITY {
        f64::INFINITY
    } else {
        (a - b).abs()
    }
}

/// Log-weights `phi_v(c)` for each spin; `-inf` forbids the spin.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexPotential {
    weights: Vec<f64>,
}

impl VertexPotential {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::BadDomain(weights.len()));
        }
        for &w in &weights {
            check_weight(w)?;
        }
        Ok(Self { weights })
    }

    pub fn zero(q: usize) -> Self {
        Self {
            weights: vec![0.0; q],
        }
    }

    pub fn q(&self) -> usize {
        self.weights.len()
    }

    #[inline]
    pub fn get(&self, c: Spin) -> f64 {
        self.weights[c]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn l1_distance(&self, other: &Self) -> f64 {
        self.weights
            .iter()
            .zip(&other.weights)
            .map(|(&a, &b)| log_weight_distance(a, b))
            .sum()
    }

    pub fn is_finite(&self) -> bool {
        self.weights.iter().all(|w| w.is_finite())
    }
}

/// Symmetric `q x q` log-weight matrix `phi_e(a, b)`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgePotential {
    q: usize,
    weights: Vec<f64>,
}

impl EdgePotential {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let q = rows.len();
        if q < 2 {
            return Err(Error::BadDomain(q));
        }
        let mut weights = Vec::with_capacity(q * q);
        for row in rows {
            if row.len() != q {
                return Err(Error::BadArity {
                    expected: q,
                    got: row.len(),
                });
            }
            weights.extend(row);
        }
        Self::from_flat(q, weights)
    }

    pub fn from_fn(q: usize, mut f: impl FnMut(Spin, Spin) -> f64) -> Result<Self> {
        let mut weights = Vec::with_capacity(q * q);
        for a in 0..q {
            for b in 0..q {
                weights.push(f(a, b));
            }
        }
        Self::from_flat(q, weights)
    }

    fn from_flat(q: usize, weights: Vec<f64>) -> Result<Self> {
        if q < 2 {
            return Err(Error::BadDomain(q));
        }
        for &w in &weights {
            check_weight(w)?;
        }
        for a in 0..q {
            for b in (a + 1)..q {
                let x = weights[a * q + b];
                let y = weights[b * q + a];
                if x != y {
                    return Err(Error::AsymmetricEdge { a, b });
                }
            }
        }
        Ok(Self { q, weights })
    }

    pub fn zero(q: usize) -> Self {
        Self {
            q,
            weights: vec![0.0; q * q],
        }
    }

    pub fn q(&self) -> usize {
        self.q
    }

    #[inline]
    pub fn get(&self, a: Spin, b: Spin) -> f64 {
        self.weights[a * self.q + b]
    }

    /// Row `a` of the matrix: `phi_e(a, .)`.
    #[inline]
    pub fn row(&self, a: Spin) -> &[f64] {
        &self.weights[a * self.q..(a + 1) * self.q]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.weights.chunks(self.q).map(|r| r.to_vec()).collect()
    }

    pub fn l1_distance(&self, other: &Self) -> f64 {
        self.weights
            .iter()
            .zip(&other.weights)
            .map(|(&a, &b)| log_weight_distance(a, b))
            .sum()
    }

    pub fn is_finite(&self) -> bool {
        self.weights.iter().all(|w| w.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn asymmetric_edge_rejected() {
        let e = EdgePotential::new(vec![vec![0.0, 1.0], vec![0.5, 0.0]]);
        assert_eq!(e, Err(Error::AsymmetricEdge { a: 0, b: 1 }));
    }

    #[test]
    fn nan_rejected() {
        assert_eq!(
            VertexPotential::new(vec![0.0, f64::NAN]),
            Err(Error::InvalidWeight)
        );
        assert_eq!(
            VertexPotential::new(vec![0.0, f64::INFINITY]),
            Err(Error::InvalidWeight)
        );
    }

    #[test]
    fn distance_with_sentinel() {
        let ninf = f64::NEG_INFINITY;
        assert_eq!(log_weight_distance(ninf, ninf), 0.0);
        assert_eq!(log_weight_distance(ninf, 0.0), f64::INFINITY);
        let a = VertexPotential::new(vec![0.0, 0.0]).unwrap();
        let b = VertexPotential::new(vec![0.1, -0.1]).unwrap();
        assert!((a.l1_distance(&b) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn edge_key_normalizes() {
        let k = EdgeKey::new(VertexId(5), VertexId(2)).unwrap();
        assert_eq!(k.endpoints(), (VertexId(2), VertexId(5)));
        assert!(EdgeKey::new(VertexId(1), VertexId(1)).is_err());
    }
}
