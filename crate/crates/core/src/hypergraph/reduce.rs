//! Reduction of a directed hypergraph to a directed normal graph.
//!
//! Each hyperedge `e` becomes a gadget pair `v_e^tail → v_e^head` carrying
//! `w_e`, fed by arcs `u → v_e^tail` (`u ∈ T(e)`) and draining through arcs
//! `v_e^head → v` (`v ∈ H(e)`) that carry the big weight `𝔐 = n·Σ_e w_e`.
//! Original vertices keep indices `0..n`; gadget vertices of edge `e` sit at
//! `n + 2e` (tail) and `n + 2e + 1` (head).

use super::{rational_from_u64, DirectedHypergraph, Rational, VertexSet};

pub fn gadget_tail(n: usize, edge: usize) -> usize {
    n + 2 * edge
}

pub fn gadget_head(n: usize, edge: usize) -> usize {
    n + 2 * edge + 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcKind {
    /// `v_e^tail → v_e^head`, weight `w_e`.
    Core { edge: usize },
    /// `u → v_e^tail`, weight `𝔐`.
    TailLink { edge: usize, vertex: usize },
    /// `v_e^head → v`, weight `𝔐`.
    HeadLink { edge: usize, vertex: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedArc {
    pub from: usize,
    pub to: usize,
    pub weight: Rational,
    pub kind: ArcKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedDigraph {
    original: usize,
    vertex_weights: Vec<u64>,
    arcs: Vec<ReducedArc>,
    big_weight: Rational,
    names: Vec<String>,
}

impl ReducedDigraph {
    pub fn vertex_count(&self) -> usize {
        self.vertex_weights.len()
    }

    /// Number of original vertices; they occupy indices `0..original_count()`.
    pub fn original_count(&self) -> usize {
        self.original
    }

    pub fn arcs(&self) -> &[ReducedArc] {
        &self.arcs
    }

    /// `𝔐`.
    pub fn big_weight(&self) -> &Rational {
        &self.big_weight
    }

    /// Gadget vertices carry weight zero.
    pub fn vertex_weights(&self) -> &[u64] {
        &self.vertex_weights
    }

    /// Display name of a vertex: original names, or `tail(e)` / `head(e)`.
    pub fn vertex_name(&self, v: usize) -> String {
        if v < self.original {
            self.names[v].clone()
        } else {
            let e = (v - self.original) / 2;
            if (v - self.original).is_multiple_of(2) {
                format!("tail({e})")
            } else {
                format!("head({e})")
            }
        }
    }

    pub fn weight_of(&self, set: &VertexSet) -> u64 {
        set.iter().map(|v| self.vertex_weights[v]).sum()
    }

    /// `w(∂̂⁺(T))`.
    pub fn out_cut_weight(&self, set: &VertexSet) -> Rational {
        self.arcs
            .iter()
            .filter(|a| set.contains(a.from) && !set.contains(a.to))
            .map(|a| a.weight.clone())
            .sum()
    }
}

pub fn reduce_to_digraph(graph: &DirectedHypergraph) -> ReducedDigraph {
    let n = graph.n();
    let m = graph.m();
    let big_weight = rational_from_u64(n as u64) * graph.total_edge_weight();
    let mut vertex_weights = graph.omega().to_vec();
    vertex_weights.resize(n + 2 * m, 0);

    let mut arcs = Vec::new();
    for (k, e) in graph.edges().iter().enumerate() {
        let (tail, head) = (gadget_tail(n, k), gadget_head(n, k));
        arcs.push(ReducedArc {
            from: tail,
            to: head,
            weight: e.weight().clone(),
            kind: ArcKind::Core { edge: k },
        });
        for &u in e.tail() {
            arcs.push(ReducedArc {
                from: u,
                to: tail,
                weight: big_weight.clone(),
                kind: ArcKind::TailLink { edge: k, vertex: u },
            });
        }
        for &v in e.head() {
            arcs.push(ReducedArc {
                from: head,
                to: v,
                weight: big_weight.clone(),
                kind: ArcKind::HeadLink { edge: k, vertex: v },
            });
        }
    }
    ReducedDigraph {
        original: n,
        vertex_weights,
        arcs,
        big_weight,
        names: graph.names().to_vec(),
    }
}

/// `Ŝ = S ∪ {v_e^tail : S ∩ T(e) ≠ ∅} ∪ {v_e^head : H(e) ⊆ S}`.
pub fn transform_subset(graph: &DirectedHypergraph, set: &VertexSet) -> VertexSet {
    let n = graph.n();
    let mut out = VertexSet::empty(n + 2 * graph.m());
    for v in set.iter() {
        out.insert(v);
    }
    for (k, e) in graph.edges().iter().enumerate() {
        if e.tail().iter().any(|&u| set.contains(u)) {
            out.insert(gadget_tail(n, k));
        }
        if e.head().iter().all(|&v| set.contains(v)) {
            out.insert(gadget_head(n, k));
        }
    }
    out
}

/// Result of mapping a reduced-digraph subset back to the hypergraph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Restriction {
    /// `T ∩ V`.
    pub subset: VertexSet,
    /// `w(∂̂⁺(T)) < 𝔐`: no big-weight arc leaves `T`.
    pub below_big_weight: bool,
    /// `w(∂⁺(T ∩ V)) = w(∂̂⁺(T))` actually holds.
    pub preserved: bool,
    pub reduced_cut: Rational,
    pub original_cut: Rational,
}

/// `T ↦ T ∩ V`.
///
/// When no big-weight arc leaves `T`, `w(∂⁺(T ∩ V)) ≤ w(∂̂⁺(T))`, with
/// equality unless `T` holds a gadget tail whose core arc it could drop.
/// Both flags are reported.
pub fn restrict_subset(
    graph: &DirectedHypergraph,
    reduced: &ReducedDigraph,
    set: &VertexSet,
) -> Restriction {
    let n = graph.n();
    let subset = VertexSet::from_indices(n, set.iter().filter(|&v| v < n));
    let reduced_cut = reduced.out_cut_weight(set);
    let original_cut = graph.out_cut_weight(&subset);
    Restriction {
        below_big_weight: &reduced_cut < reduced.big_weight(),
        preserved: reduced_cut == original_cut,
        subset,
        reduced_cut,
        original_cut,
    }
}
