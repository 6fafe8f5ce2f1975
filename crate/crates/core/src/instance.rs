//! Floating-point view of a hypergraph used by the SDP engine.

use serde::{Deserialize, Serialize};

use crate::error::HypergraphError;
use crate::hypergraph::{rational_to_f64, DirectedHypergraph, VertexSet};

/// Which vertex weights the solver works with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightMode {
    /// File-supplied `ω`.
    Sparsity,
    /// Weighted degrees, rescaled so the lightest vertex has weight 1.
    Expansion,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealEdge {
    pub tail: Vec<usize>,
    pub head: Vec<usize>,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverInstance {
    names: Vec<String>,
    omega: Vec<f64>,
    edges: Vec<RealEdge>,
    mode: WeightMode,
    /// Solver weights are `scale` times the defining weights.
    scale: f64,
}

impl SolverInstance {
    pub fn from_sparsity(graph: &DirectedHypergraph) -> Self {
        Self {
            names: graph.names().to_vec(),
            omega: graph.omega().iter().map(|&w| w as f64).collect(),
            edges: real_edges(graph),
            mode: WeightMode::Sparsity,
            scale: 1.0,
        }
    }

    /// Vertex weights become weighted degrees; fails if any vertex has degree 0.
    pub fn from_expansion(graph: &DirectedHypergraph) -> Result<Self, HypergraphError> {
        let degrees: Vec<f64> = graph
            .weighted_degrees()
            .iter()
            .map(rational_to_f64)
            .collect();
        let min = degrees.iter().copied().fold(f64::INFINITY, f64::min);
        if !(min > 0.0) {
            return Err(HypergraphError::UndefinedExpansion);
        }
        Ok(Self {
            names: graph.names().to_vec(),
            omega: degrees.iter().map(|d| d / min).collect(),
            edges: real_edges(graph),
            mode: WeightMode::Expansion,
            scale: 1.0 / min,
        })
    }

    /// Direct construction, mostly for tests and generators.
    pub fn new(omega: Vec<f64>, edges: Vec<RealEdge>) -> Self {
        Self {
            names: (0..omega.len()).map(|i| i.to_string()).collect(),
            omega,
            edges,
            mode: WeightMode::Sparsity,
            scale: 1.0,
        }
    }

    pub fn n(&self) -> usize {
        self.omega.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn edges(&self) -> &[RealEdge] {
        &self.edges
    }

    pub fn mode(&self) -> WeightMode {
        self.mode
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn omega_hat(&self) -> f64 {
        self.omega.iter().sum()
    }

    /// Skewness `max ω / min ω`.
    pub fn kappa(&self) -> f64 {
        let max = self.omega.iter().copied().fold(0.0, f64::max);
        let min = self.omega.iter().copied().fold(f64::INFINITY, f64::min);
        max / min
    }

    pub fn total_edge_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    pub fn weight_of(&self, set: &VertexSet) -> f64 {
        set.iter().map(|i| self.omega[i]).sum()
    }

    pub fn out_cut_weight(&self, set: &VertexSet) -> f64 {
        self.edges
            .iter()
            .filter(|e| {
                e.tail.iter().any(|&u| set.contains(u)) && e.head.iter().any(|&v| !set.contains(v))
            })
            .fold(0.0, |acc, e| acc + e.weight)
    }

    /// `None` unless `set` is a proper non-empty subset.
    pub fn sparsity(&self, set: &VertexSet) -> Option<f64> {
        if set.universe() != self.n() || !set.is_proper() {
            return None;
        }
        let inside = self.weight_of(set);
        let outside = self.omega_hat() - inside;
        Some(self.out_cut_weight(set) / (inside * outside))
    }

    /// Same instance with every edge reversed.
    pub fn reversed(&self) -> Self {
        Self {
            edges: self
                .edges
                .iter()
                .map(|e| RealEdge {
                    tail: e.head.clone(),
                    head: e.tail.clone(),
                    weight: e.weight,
                })
                .collect(),
            ..self.clone()
        }
    }
}

fn real_edges(graph: &DirectedHypergraph) -> Vec<RealEdge> {
    graph
        .edges()
        .iter()
        .map(|e| RealEdge {
            tail: e.tail().to_vec(),
            head: e.head().to_vec(),
            weight: rational_to_f64(e.weight()),
        })
        .collect()
}

/// A proper subset with its sparsity under the solver weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoundCut {
    pub members: Vec<usize>,
    pub sparsity: f64,
}

impl FoundCut {
    pub fn evaluate(instance: &SolverInstance, set: &VertexSet) -> Option<Self> {
        instance.sparsity(set).map(|sparsity| Self {
            members: set.to_vec(),
            sparsity,
        })
    }

    pub fn to_set(&self, universe: usize) -> VertexSet {
        VertexSet::from_indices(universe, self.members.iter().copied())
    }

    /// Keeps the sparser of two optional cuts, preferring `a` on ties.
    pub fn better(a: Option<Self>, b: Option<Self>) -> Option<Self> {
        match (a, b) {
            (Some(a), Some(b)) => Some(if b.sparsity < a.sparsity { b } else { a }),
            (a, None) => a,
            (None, b) => b,
        }
    }
}
