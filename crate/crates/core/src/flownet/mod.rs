//! Max-flow on the reduced digraph, hypergraph flows and their
//! decomposition into triangle terms plus a demand.

mod decompose;
mod dinic;

pub use decompose::{decompose, FlowDecomposition, FlowPath};
pub use dinic::FlowNetwork;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::FlowError;
use crate::hypergraph::VertexSet;
use crate::instance::SolverInstance;
use crate::sdpcore::{accumulate_a, GramState, Side, SymMatrix};

/// Max-flow instance: the reduced digraph of a hypergraph plus a source `s`
/// and a sink `t`.
///
/// Node layout: original vertices `0..n`, the gadget pair of edge `e` at
/// `n + 2e` and `n + 2e + 1`, then `s` and `t`. Core arcs carry `c_e = w_e/2`
/// and gadget links carry `𝔐 = max(n·Σ_e w_e, 2·(total terminal capacity))`,
/// so no link can ever lie in a minimum cut.
#[derive(Debug, Clone)]
pub struct FlowInstance {
    n: usize,
    network: FlowNetwork,
    core_arcs: Vec<usize>,
    tail_links: Vec<Vec<(usize, usize)>>,
    head_links: Vec<Vec<(usize, usize)>>,
    source_arcs: Vec<(usize, usize)>,
    sink_arcs: Vec<(usize, usize)>,
}

/// Outcome of [`FlowInstance::solve`].
#[derive(Debug, Clone)]
pub struct MaxFlow {
    pub value: f64,
    /// Original vertices on the source side of the residual cut.
    pub reachable: VertexSet,
    /// Total capacity of the source arcs.
    pub source_capacity: f64,
}

impl FlowInstance {
    /// `sources` and `sinks` list `(vertex, capacity)` pairs.
    pub fn new(
        instance: &SolverInstance,
        sources: &[(usize, f64)],
        sinks: &[(usize, f64)],
    ) -> Self {
        let n = instance.n();
        let m = instance.m();
        let terminal: f64 = sources.iter().chain(sinks).map(|&(_, c)| c).sum();
        let big = (n as f64 * instance.total_edge_weight()).max(2.0 * terminal);
        let (s, t) = (n + 2 * m, n + 2 * m + 1);
        let mut network = FlowNetwork::new(n + 2 * m + 2);
        let mut core_arcs = Vec::with_capacity(m);
        let mut tail_links = Vec::with_capacity(m);
        let mut head_links = Vec::with_capacity(m);
        for (k, e) in instance.edges().iter().enumerate() {
            let (gt, gh) = (n + 2 * k, n + 2 * k + 1);
            core_arcs.push(network.add_arc(gt, gh, e.weight / 2.0));
            tail_links.push(
                e.tail
                    .iter()
                    .map(|&u| (u, network.add_arc(u, gt, big)))
                    .collect(),
            );
            head_links.push(
                e.head
                    .iter()
                    .map(|&v| (v, network.add_arc(gh, v, big)))
                    .collect(),
            );
        }
        let source_arcs = sources
            .iter()
            .map(|&(v, c)| (v, network.add_arc(s, v, c)))
            .collect();
        let sink_arcs = sinks
            .iter()
            .map(|&(v, c)| (v, network.add_arc(v, t, c)))
            .collect();
        Self {
            n,
            network,
            core_arcs,
            tail_links,
            head_links,
            source_arcs,
            sink_arcs,
        }
    }

    pub fn source(&self) -> usize {
        self.network.node_count() - 2
    }

    pub fn sink(&self) -> usize {
        self.network.node_count() - 1
    }

    pub fn network(&self) -> &FlowNetwork {
        &self.network
    }

    pub fn solve(&mut self) -> MaxFlow {
        let (s, t) = (self.source(), self.sink());
        let value = self.network.max_flow(s, t);
        let side = self.network.residual_reachable(s);
        MaxFlow {
            value,
            reachable: VertexSet::from_members(side[..self.n].to_vec()),
            source_capacity: self
                .source_arcs
                .iter()
                .map(|&(_, a)| self.network.capacity(a))
                .sum(),
        }
    }

    /// Flow on each source arc, as `(vertex, flow)`.
    pub fn source_flows(&self) -> Vec<(usize, f64)> {
        self.source_arcs
            .iter()
            .map(|&(v, a)| (v, self.network.flow(a)))
            .collect()
    }

    pub fn sink_flows(&self) -> Vec<(usize, f64)> {
        self.sink_arcs
            .iter()
            .map(|&(v, a)| (v, self.network.flow(a)))
            .collect()
    }

    /// Splits each gadget's flow into tail-to-head pairs in proportion to
    /// inflow share times outflow share.
    pub fn lift_flow(&self) -> Result<FlowAssignment, FlowError> {
        let gadgets = self
            .core_arcs
            .iter()
            .enumerate()
            .map(|(e, &core)| GadgetFlow {
                core: self.network.flow(core),
                inflow: self.tail_links[e]
                    .iter()
                    .map(|&(u, a)| (u, self.network.flow(a)))
                    .collect(),
                outflow: self.head_links[e]
                    .iter()
                    .map(|&(v, a)| (v, self.network.flow(a)))
                    .collect(),
            });
        lift_gadget_flows(gadgets)
    }
}

/// Arc flows around one gadget pair.
#[derive(Debug, Clone, PartialEq)]
pub struct GadgetFlow {
    /// Flow on `v_e^tail → v_e^head`.
    pub core: f64,
    /// Flow on `u → v_e^tail`, per tail vertex.
    pub inflow: Vec<(usize, f64)>,
    /// Flow on `v_e^head → v`, per head vertex.
    pub outflow: Vec<(usize, f64)>,
}

/// `𝔣ᵉᵢⱼ = in_i · out_j / f_e`, gadget by gadget.
pub fn lift_gadget_flows(
    gadgets: impl IntoIterator<Item = GadgetFlow>,
) -> Result<FlowAssignment, FlowError> {
    let mut entries = Vec::new();
    for (edge, g) in gadgets.into_iter().enumerate() {
        let tol = 1e-9 * g.core.abs().max(1.0);
        let total_in: f64 = g.inflow.iter().map(|p| p.1).sum();
        let total_out: f64 = g.outflow.iter().map(|p| p.1).sum();
        for imbalance in [total_in - g.core, g.core - total_out] {
            if imbalance.abs() > tol {
                return Err(FlowError::Conservation { edge, imbalance });
            }
        }
        if g.core <= 0.0 {
            continue;
        }
        for &(i, fin) in &g.inflow {
            for &(j, fout) in &g.outflow {
                let value = fin * fout / g.core;
                if value > 0.0 {
                    entries.push(FlowEntry {
                        edge,
                        from: i,
                        to: j,
                        value,
                    });
                }
            }
        }
    }
    Ok(FlowAssignment { entries })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowEntry {
    pub edge: usize,
    pub from: usize,
    pub to: usize,
    pub value: f64,
}

/// Sparse hypergraph flow `(𝔣ᵉᵢⱼ)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FlowAssignment {
    pub entries: Vec<FlowEntry>,
}

impl FlowAssignment {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `Σ_e 𝔣ᵉᵢⱼ` per ordered pair, including self-pairs.
    pub fn pair_totals(&self) -> BTreeMap<(usize, usize), f64> {
        let mut totals = BTreeMap::new();
        for e in &self.entries {
            *totals.entry((e.from, e.to)).or_insert(0.0) += e.value;
        }
        totals
    }

    /// Per-edge totals `Σ_ij 𝔣ᵉᵢⱼ`.
    pub fn edge_totals(&self, m: usize) -> Vec<f64> {
        let mut totals = vec![0.0; m];
        for e in &self.entries {
            totals[e.edge] += e.value;
        }
        totals
    }

    /// Net outflow per vertex.
    pub fn net_outflow(&self, n: usize) -> Vec<f64> {
        let mut net = vec![0.0; n];
        for e in &self.entries {
            net[e.from] += e.value;
            net[e.to] -= e.value;
        }
        net
    }

    /// Checks that every entry sits on a real `(e, i ∈ T(e), j ∈ H(e))` slot,
    /// is non-negative, and that per-edge totals respect `c_e = w_e/2`.
    pub fn check_capacities(&self, instance: &SolverInstance) -> Result<(), String> {
        for f in &self.entries {
            let Some(e) = instance.edges().get(f.edge) else {
                return Err(format!("flow on unknown edge {}", f.edge));
            };
            if !e.tail.contains(&f.from) || !e.head.contains(&f.to) {
                return Err(format!(
                    "flow ({}, {}) is not a tail-head pair of edge {}",
                    f.from, f.to, f.edge
                ));
            }
            if !(f.value >= 0.0) {
                return Err(format!("negative flow {} on edge {}", f.value, f.edge));
            }
        }
        for (k, total) in self.edge_totals(instance.m()).into_iter().enumerate() {
            let cap = instance.edges()[k].weight / 2.0;
            if total > cap * (1.0 + 1e-9) + 1e-12 {
                return Err(format!("edge {k} carries {total}, capacity {cap}"));
            }
        }
        Ok(())
    }
}

/// `F = Σ_e Σ_ij 𝔣ᵉᵢⱼ A_ij`.
pub fn flow_matrix(flow: &FlowAssignment, side: Side, order: usize) -> SymMatrix {
    let mut f = SymMatrix::zeros(order);
    for e in &flow.entries {
        accumulate_a(&mut f, e.from, e.to, side, e.value);
    }
    f
}

/// `F • X = Σ 𝔣ᵉᵢⱼ d(i, j)`, straight from the vectors.
pub fn flow_form(flow: &FlowAssignment, gram: &GramState) -> f64 {
    flow.entries
        .iter()
        .map(|e| e.value * gram.distance(e.from, e.to))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DemandEntry {
    pub from: usize,
    pub to: usize,
    pub value: f64,
}

/// Sparse pairwise demand `(𝔡_ij)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DemandMatrix {
    pub entries: Vec<DemandEntry>,
}

impl DemandMatrix {
    pub fn from_pairs(pairs: &BTreeMap<(usize, usize), f64>) -> Self {
        Self {
            entries: pairs
                .iter()
                .filter(|(_, &v)| v != 0.0)
                .map(|(&(from, to), &value)| DemandEntry { from, to, value })
                .collect(),
        }
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|d| d.value).sum()
    }

    /// `D • X = Σ 𝔡_ij d(i, j)`.
    pub fn form(&self, gram: &GramState) -> f64 {
        self.entries
            .iter()
            .map(|d| d.value * gram.distance(d.from, d.to))
            .sum()
    }
}

/// `D = Σ 𝔡_ij A_ij`.
pub fn demand_matrix(demand: &DemandMatrix, side: Side, order: usize) -> SymMatrix {
    let mut d = SymMatrix::zeros(order);
    for e in &demand.entries {
        accumulate_a(&mut d, e.from, e.to, side, e.value);
    }
    d
}

/// `c_D · Σ 𝔡_ij`, an upper bound on `‖D‖`.
pub fn demand_norm_bound(demand: &DemandMatrix, c_d: f64) -> f64 {
    c_d * demand.total()
}

/// `F • X ≤ Σ_e c_e·d_e` with `d_e = max(0, max_{i∈T(e), j∈H(e)} d(i, j))`.
pub fn capacity_duality_check(
    flow: &FlowAssignment,
    instance: &SolverInstance,
    gram: &GramState,
) -> bool {
    let lhs = flow_form(flow, gram);
    let mut rhs = 0.0;
    let mut scale = 0.0;
    for e in instance.edges() {
        let mut d_e: f64 = 0.0;
        for &i in &e.tail {
            for &j in &e.head {
                d_e = d_e.max(gram.distance(i, j));
            }
        }
        rhs += e.weight / 2.0 * d_e;
        scale += e.weight / 2.0 * d_e.abs();
    }
    lhs <= rhs + 1e-10 * scale.max(1e-300)
}
