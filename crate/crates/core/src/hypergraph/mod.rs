//! Directed hypergraphs with exact rational edge weights and κ-skewed
//! integer vertex weights.
//!
//! An edge `e = (T(e), H(e))` points from its tail set to its head set. The
//! out-going cut of `S` is every edge with a tail vertex inside `S` and a head
//! vertex outside it; the in-coming cut is the mirror image. Tail and head may
//! overlap.

mod dhg;
mod reduce;

pub use dhg::{format_rational, parse_dhg, parse_rational, to_dhg};
pub use reduce::{
    gadget_head, gadget_tail, reduce_to_digraph, restrict_subset, transform_subset, ArcKind,
    ReducedArc, ReducedDigraph, Restriction,
};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::HypergraphError;

/// Exact edge weights.
pub type Rational = BigRational;

pub fn rational_from_u64(value: u64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Lossy conversion used where exact values enter floating-point code.
pub fn rational_to_f64(value: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    value.to_f64().unwrap_or(f64::NAN)
}

/// A subset of a dense vertex range `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet {
    members: Vec<bool>,
}

impl VertexSet {
    pub fn empty(universe: usize) -> Self {
        Self {
            members: vec![false; universe],
        }
    }

    pub fn full(universe: usize) -> Self {
        Self {
            members: vec![true; universe],
        }
    }

    /// Panics if an index is outside `0..universe`.
    pub fn from_indices<I: IntoIterator<Item = usize>>(universe: usize, indices: I) -> Self {
        let mut set = Self::empty(universe);
        for i in indices {
            set.insert(i);
        }
        set
    }

    pub fn from_mask(universe: usize, mask: u64) -> Self {
        Self {
            members: (0..universe).map(|i| mask >> i & 1 == 1).collect(),
        }
    }

    pub fn from_members(members: Vec<bool>) -> Self {
        Self { members }
    }

    pub fn universe(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.get(i).copied().unwrap_or(false)
    }

    pub fn insert(&mut self, i: usize) {
        self.members[i] = true;
    }

    pub fn remove(&mut self, i: usize) {
        self.members[i] = false;
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.members.iter().any(|&b| b)
    }

    /// Non-empty and not the whole universe.
    pub fn is_proper(&self) -> bool {
        let k = self.len();
        k > 0 && k < self.universe()
    }

    pub fn complement(&self) -> Self {
        Self {
            members: self.members.iter().map(|&b| !b).collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn members(&self) -> &[bool] {
        &self.members
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hyperedge {
    tail: Vec<usize>,
    head: Vec<usize>,
    weight: Rational,
}

impl Hyperedge {
    /// Tail and head are sorted and deduplicated; emptiness is checked when the
    /// edge joins a hypergraph.
    pub fn new(tail: Vec<usize>, head: Vec<usize>, weight: Rational) -> Self {
        let normalize = |mut v: Vec<usize>| {
            v.sort_unstable();
            v.dedup();
            v
        };
        Self {
            tail: normalize(tail),
            head: normalize(head),
            weight,
        }
    }

    pub fn tail(&self) -> &[usize] {
        &self.tail
    }

    pub fn head(&self) -> &[usize] {
        &self.head
    }

    pub fn weight(&self) -> &Rational {
        &self.weight
    }

    pub fn size(&self) -> usize {
        self.tail.len() + self.head.len()
    }

    pub fn leaves(&self, set: &VertexSet) -> bool {
        self.tail.iter().any(|&u| set.contains(u)) && self.head.iter().any(|&v| !set.contains(v))
    }

    pub fn enters(&self, set: &VertexSet) -> bool {
        self.tail.iter().any(|&u| !set.contains(u)) && self.head.iter().any(|&v| set.contains(v))
    }
}

/// `w(∂⁺(S))`, `w(∂⁻(S))` and the expansions built from weighted degrees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expansion {
    pub plus: Rational,
    pub minus: Rational,
    pub phi: Rational,
}

/// A proper subset together with its exact sparsity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cut {
    pub subset: VertexSet,
    pub sparsity: Rational,
    /// `None` when the subset has zero weighted degree.
    pub phi_plus: Option<Rational>,
    pub phi_minus: Option<Rational>,
}

impl Cut {
    pub fn evaluate(
        graph: &DirectedHypergraph,
        subset: VertexSet,
    ) -> Result<Self, HypergraphError> {
        let sparsity = graph.sparsity(&subset)?;
        let (phi_plus, phi_minus) = match graph.expansion(&subset) {
            Ok(e) => (Some(e.plus), Some(e.minus)),
            Err(HypergraphError::UndefinedExpansion) => (None, None),
            Err(e) => return Err(e),
        };
        Ok(Self {
            subset,
            sparsity,
            phi_plus,
            phi_minus,
        })
    }
}

/// `H = (V, E, w)` with vertex weights `ω`.
///
/// Invariants: every tail and head is non-empty, `1 ≤ ω_i ≤ κ ≤ n`, and
/// `w_e ≥ 0`. Vertex `0` is the designated anchor vertex of the SDP.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedHypergraph {
    names: Vec<String>,
    omega: Vec<u64>,
    edges: Vec<Hyperedge>,
}

impl DirectedHypergraph {
    pub fn new(
        names: Vec<String>,
        omega: Vec<u64>,
        edges: Vec<Hyperedge>,
    ) -> Result<Self, HypergraphError> {
        let n = names.len();
        if n == 0 {
            return Err(HypergraphError::Empty);
        }
        if omega.len() != n {
            return Err(HypergraphError::VertexOutOfRange {
                index: omega.len(),
                n,
            });
        }
        let mut seen = std::collections::HashSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(HypergraphError::DuplicateVertex(name.clone()));
            }
        }
        for (name, &w) in names.iter().zip(&omega) {
            if w < 1 {
                return Err(HypergraphError::WeightTooSmall {
                    name: name.clone(),
                    weight: w,
                });
            }
        }
        let kappa = omega.iter().copied().max().unwrap_or(1);
        if kappa > n as u64 {
            return Err(HypergraphError::SkewTooLarge { kappa, n });
        }
        for (k, e) in edges.iter().enumerate() {
            if e.tail.is_empty() {
                return Err(HypergraphError::EmptySide {
                    edge: k,
                    side: "tail",
                });
            }
            if e.head.is_empty() {
                return Err(HypergraphError::EmptySide {
                    edge: k,
                    side: "head",
                });
            }
            if e.weight.is_negative() {
                return Err(HypergraphError::NegativeWeight { edge: k });
            }
            if let Some(&bad) = e.tail.iter().chain(&e.head).find(|&&v| v >= n) {
                return Err(HypergraphError::VertexOutOfRange { index: bad, n });
            }
        }
        Ok(Self {
            names,
            omega,
            edges,
        })
    }

    /// Vertices named `"0"`, `"1"`, … in index order.
    pub fn from_indexed(omega: Vec<u64>, edges: Vec<Hyperedge>) -> Result<Self, HypergraphError> {
        let names = (0..omega.len()).map(|i| i.to_string()).collect();
        Self::new(names, omega, edges)
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// `max_e (|T(e)| + |H(e)|)`, zero for an edgeless hypergraph.
    pub fn r(&self) -> usize {
        self.edges.iter().map(Hyperedge::size).max().unwrap_or(0)
    }

    pub fn kappa(&self) -> u64 {
        self.omega.iter().copied().max().unwrap_or(1)
    }

    /// `ω̂ = Σ_i ω_i`.
    pub fn omega_hat(&self) -> u64 {
        self.omega.iter().sum()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn omega(&self) -> &[u64] {
        &self.omega
    }

    pub fn edges(&self) -> &[Hyperedge] {
        &self.edges
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn weight_of(&self, set: &VertexSet) -> u64 {
        set.iter().map(|i| self.omega[i]).sum()
    }

    pub fn total_edge_weight(&self) -> Rational {
        self.edges.iter().map(|e| e.weight.clone()).sum()
    }

    pub fn out_cut(&self, set: &VertexSet) -> Vec<usize> {
        (0..self.m())
            .filter(|&k| self.edges[k].leaves(set))
            .collect()
    }

    pub fn out_cut_weight(&self, set: &VertexSet) -> Rational {
        self.edges
            .iter()
            .filter(|e| e.leaves(set))
            .map(|e| e.weight.clone())
            .sum()
    }

    pub fn in_cut_weight(&self, set: &VertexSet) -> Rational {
        self.edges
            .iter()
            .filter(|e| e.enters(set))
            .map(|e| e.weight.clone())
            .sum()
    }

    /// `ϑ(S) = w(∂⁺(S)) / (ω(S)·ω(V∖S))` for `∅ ≠ S ⊊ V`.
    pub fn sparsity(&self, set: &VertexSet) -> Result<Rational, HypergraphError> {
        self.check_proper(set)?;
        let inside = self.weight_of(set);
        let outside = self.omega_hat() - inside;
        Ok(self.out_cut_weight(set) / rational_from_u64(inside * outside))
    }

    /// `ω_u = Σ_{e: u ∈ T(e) ∪ H(e)} w_e`.
    pub fn weighted_degrees(&self) -> Vec<Rational> {
        let mut deg = vec![Rational::zero(); self.n()];
        for e in &self.edges {
            let mut touched: Vec<usize> = e.tail.iter().chain(&e.head).copied().collect();
            touched.sort_unstable();
            touched.dedup();
            for u in touched {
                deg[u] += &e.weight;
            }
        }
        deg
    }

    /// Expansion of `S`. File-supplied vertex weights are ignored here; the
    /// denominator is the weighted degree of `S`.
    pub fn expansion(&self, set: &VertexSet) -> Result<Expansion, HypergraphError> {
        self.check_proper(set)?;
        let degrees = self.weighted_degrees();
        let volume: Rational = set.iter().map(|i| degrees[i].clone()).sum();
        if volume.is_zero() {
            return Err(HypergraphError::UndefinedExpansion);
        }
        let plus = self.out_cut_weight(set) / &volume;
        let minus = self.in_cut_weight(set) / &volume;
        let phi = plus.clone().min(minus.clone());
        Ok(Expansion { plus, minus, phi })
    }

    /// Multiplies every edge weight by `factor`.
    pub fn scale_edge_weights(&self, factor: &Rational) -> Self {
        let edges = self
            .edges
            .iter()
            .map(|e| Hyperedge {
                tail: e.tail.clone(),
                head: e.head.clone(),
                weight: &e.weight * factor,
            })
            .collect();
        Self {
            names: self.names.clone(),
            omega: self.omega.clone(),
            edges,
        }
    }

    fn check_proper(&self, set: &VertexSet) -> Result<(), HypergraphError> {
        if set.universe() != self.n() {
            return Err(HypergraphError::VertexOutOfRange {
                index: set.universe(),
                n: self.n(),
            });
        }
        if !set.is_proper() {
            return Err(HypergraphError::ImproperSubset);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(p), BigInt::from(d))
    }

    fn single_edge() -> DirectedHypergraph {
        DirectedHypergraph::from_indexed(
            vec![1, 1],
            vec![Hyperedge::new(vec![0], vec![1], q(3, 1))],
        )
        .unwrap()
    }

    // vertices a=0, b=1, c=2; e = ({a,b},{c}), w = 2
    fn two_tail() -> DirectedHypergraph {
        DirectedHypergraph::from_indexed(
            vec![1, 1, 1],
            vec![Hyperedge::new(vec![0, 1], vec![2], q(2, 1))],
        )
        .unwrap()
    }

    #[test]
    fn sparsity_single_edge() {
        let h = single_edge();
        assert_eq!(
            h.sparsity(&VertexSet::from_indices(2, [0])).unwrap(),
            q(3, 1)
        );
        assert_eq!(
            h.sparsity(&VertexSet::from_indices(2, [1])).unwrap(),
            q(0, 1)
        );
    }

    #[test]
    fn sparsity_two_tail_by_enumeration() {
        let h = two_tail();
        assert_eq!(
            h.sparsity(&VertexSet::from_indices(3, [0])).unwrap(),
            q(1, 1)
        );
        // enumerate every proper subset against the definition
        for mask in 1u64..7 {
            let s = VertexSet::from_mask(3, mask);
            let crosses = (s.contains(0) || s.contains(1)) && !s.contains(2);
            let expected = if crosses {
                q(2, (s.len() * (3 - s.len())) as i64)
            } else {
                q(0, 1)
            };
            assert_eq!(h.sparsity(&s).unwrap(), expected, "mask {mask}");
        }
    }

    #[test]
    fn sparsity_rejects_improper() {
        let h = single_edge();
        assert_eq!(
            h.sparsity(&VertexSet::empty(2)),
            Err(HypergraphError::ImproperSubset)
        );
        assert_eq!(
            h.sparsity(&VertexSet::full(2)),
            Err(HypergraphError::ImproperSubset)
        );
    }

    #[test]
    fn expansion_examples() {
        let h = single_edge();
        let e = h.expansion(&VertexSet::from_indices(2, [0])).unwrap();
        assert_eq!((e.plus, e.minus, e.phi), (q(1, 1), q(0, 1), q(0, 1)));
        let e = h.expansion(&VertexSet::from_indices(2, [1])).unwrap();
        assert_eq!((e.plus, e.minus, e.phi), (q(0, 1), q(1, 1), q(0, 1)));

        let h = two_tail();
        let e = h.expansion(&VertexSet::from_indices(3, [2])).unwrap();
        assert_eq!((e.plus, e.minus, e.phi), (q(0, 1), q(1, 1), q(0, 1)));
    }

    #[test]
    fn expansion_undefined_on_isolated_vertex() {
        let h = DirectedHypergraph::from_indexed(
            vec![1, 1, 1],
            vec![Hyperedge::new(vec![0], vec![1], q(1, 1))],
        )
        .unwrap();
        assert_eq!(
            h.expansion(&VertexSet::from_indices(3, [2])),
            Err(HypergraphError::UndefinedExpansion)
        );
    }

    #[test]
    fn derived_quantities() {
        let h = DirectedHypergraph::from_indexed(
            vec![1, 3, 2],
            vec![
                Hyperedge::new(vec![0, 1], vec![2], q(1, 2)),
                Hyperedge::new(vec![2], vec![0, 1, 2], q(1, 1)),
            ],
        )
        .unwrap();
        assert_eq!(
            (h.n(), h.m(), h.r(), h.kappa(), h.omega_hat()),
            (3, 2, 4, 3, 6)
        );
    }

    #[test]
    fn validation() {
        let bad_head = DirectedHypergraph::from_indexed(
            vec![1, 1],
            vec![Hyperedge::new(vec![0], vec![], q(1, 1))],
        );
        assert!(matches!(
            bad_head,
            Err(HypergraphError::EmptySide { side: "head", .. })
        ));
        let skewed = DirectedHypergraph::from_indexed(vec![1, 3], vec![]);
        assert!(matches!(skewed, Err(HypergraphError::SkewTooLarge { .. })));
        let zero = DirectedHypergraph::from_indexed(vec![0, 1], vec![]);
        assert!(matches!(zero, Err(HypergraphError::WeightTooSmall { .. })));
        let neg = DirectedHypergraph::from_indexed(
            vec![1, 1],
            vec![Hyperedge::new(vec![0], vec![1], q(-1, 1))],
        );
        assert!(matches!(neg, Err(HypergraphError::NegativeWeight { .. })));
    }

    #[test]
    fn sparsity_scales_with_edge_weights() {
        let h = two_tail();
        let lambda = q(7, 3);
        let scaled = h.scale_edge_weights(&lambda);
        for mask in 1u64..7 {
            let s = VertexSet::from_mask(3, mask);
            assert_eq!(
                scaled.sparsity(&s).unwrap(),
                h.sparsity(&s).unwrap() * &lambda
            );
        }
    }
}
