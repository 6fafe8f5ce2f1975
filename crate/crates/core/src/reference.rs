//! Exact solvers by enumeration, and seeded instance generators.

use std::cmp::Ordering;

use num_traits::{ToPrimitive, Zero};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{HypergraphError, ReferenceError};
use crate::hypergraph::{rational_from_u64, DirectedHypergraph, Hyperedge, Rational, VertexSet};

/// Enumeration is refused above this many vertices.
pub const BRUTE_FORCE_LIMIT: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactCut {
    pub subset: VertexSet,
    pub value: Rational,
}

fn guard(n: usize) -> Result<(), ReferenceError> {
    if !(2..=BRUTE_FORCE_LIMIT).contains(&n) {
        return Err(ReferenceError::TooLarge {
            n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    Ok(())
}

/// Lexicographic order on sorted member lists.
fn lex_less(a: &VertexSet, b: &VertexSet) -> bool {
    a.to_vec() < b.to_vec()
}

fn edge_masks(graph: &DirectedHypergraph) -> Vec<(u64, u64)> {
    graph
        .edges()
        .iter()
        .map(|e| {
            let mask = |vs: &[usize]| vs.iter().fold(0u64, |m, &v| m | 1 << v);
            (mask(e.tail()), mask(e.head()))
        })
        .collect()
}

/// Edge weights over a common denominator, when everything fits in `u128`
/// with room for cross multiplication.
fn integer_weights(graph: &DirectedHypergraph) -> Option<(Vec<u128>, u128)> {
    let mut lcm = num_bigint::BigInt::from(1);
    for e in graph.edges() {
        let d = e.weight().denom();
        lcm = num_integer_lcm(&lcm, d);
    }
    let scaled: Option<Vec<u128>> = graph
        .edges()
        .iter()
        .map(|e| (e.weight().numer() * (&lcm / e.weight().denom())).to_u128())
        .collect();
    let scaled = scaled?;
    let total: u128 = scaled
        .iter()
        .try_fold(0u128, |acc, &w| acc.checked_add(w))?;
    (total < 1 << 80).then_some((scaled, lcm.to_u128()?))
}

fn num_integer_lcm(a: &num_bigint::BigInt, b: &num_bigint::BigInt) -> num_bigint::BigInt {
    let (mut x, mut y) = (a.clone(), b.clone());
    while !y.is_zero() {
        let r = &x % &y;
        x = y;
        y = r;
    }
    a / &x * b
}

/// Exact `min_S ϑ(S)` over all proper subsets. Ties go to the
/// lexicographically smallest subset.
pub fn brute_force_sparsest(graph: &DirectedHypergraph) -> Result<ExactCut, ReferenceError> {
    let n = graph.n();
    guard(n)?;
    let masks = edge_masks(graph);
    let omega = graph.omega();
    let full = (1u64 << n) - 1;
    let weight = |mask: u64| -> u64 {
        (0..n)
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| omega[i])
            .sum()
    };

    if let Some((w, lcm)) = integer_weights(graph) {
        // (numerator, denominator, mask) compared by cross multiplication
        let mut best: Option<(u128, u128, VertexSet)> = None;
        for mask in 1..full {
            let cut: u128 = masks
                .iter()
                .zip(&w)
                .filter(|((t, h), _)| t & mask != 0 && h & !mask & full != 0)
                .map(|(_, &we)| we)
                .sum();
            let denom = weight(mask) as u128 * weight(full & !mask) as u128;
            let set = VertexSet::from_mask(n, mask);
            let better = match &best {
                None => true,
                Some((bn, bd, bs)) => match (cut * bd).cmp(&(bn * denom)) {
                    Ordering::Less => true,
                    Ordering::Equal => lex_less(&set, bs),
                    Ordering::Greater => false,
                },
            };
            if better {
                best = Some((cut, denom, set));
            }
        }
        let (num, den, subset) = best.expect("n >= 2");
        let value = Rational::new(num.into(), (den * lcm).into());
        return Ok(ExactCut { subset, value });
    }

    let mut best: Option<ExactCut> = None;
    for mask in 1..full {
        let subset = VertexSet::from_mask(n, mask);
        let value = graph.sparsity(&subset)?;
        let better = match &best {
            None => true,
            Some(b) => value < b.value || (value == b.value && lex_less(&subset, &b.subset)),
        };
        if better {
            best = Some(ExactCut { subset, value });
        }
    }
    Ok(best.expect("n >= 2"))
}

/// Exact `φ_H = min φ(S)` over subsets whose weighted degree is at most half
/// the total. Subsets of zero degree are skipped.
pub fn brute_force_expansion(graph: &DirectedHypergraph) -> Result<ExactCut, ReferenceError> {
    let n = graph.n();
    guard(n)?;
    let degrees = graph.weighted_degrees();
    let total: Rational = degrees.iter().cloned().sum();
    let half = &total / rational_from_u64(2);
    let mut best: Option<ExactCut> = None;
    for mask in 1..(1u64 << n) - 1 {
        let subset = VertexSet::from_mask(n, mask);
        let volume: Rational = subset.iter().map(|i| degrees[i].clone()).sum();
        if volume.is_zero() || volume > half {
            continue;
        }
        let value = graph.expansion(&subset)?.phi;
        let better = match &best {
            None => true,
            Some(b) => value < b.value || (value == b.value && lex_less(&subset, &b.subset)),
        };
        if better {
            best = Some(ExactCut { subset, value });
        }
    }
    best.ok_or(ReferenceError::Hypergraph(
        HypergraphError::UndefinedExpansion,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Model {
    UniformRandom,
    /// A random set holding `balance` of the vertices; arcs leaving it weigh
    /// `crossing_w`, all others `inside_w`.
    PlantedCut {
        balance: f64,
        inside_w: u64,
        crossing_w: u64,
    },
    /// A directed spanning cycle, then reverse arcs and random hyperedges.
    ExpanderLike,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub n: usize,
    pub m: usize,
    pub r_max: usize,
    pub kappa: u64,
    /// Inclusive range of integer edge weights.
    pub weight_range: (u64, u64),
    pub model: Model,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn uniform(n: usize, m: usize, seed: u64) -> Self {
        Self {
            n,
            m,
            r_max: 3,
            kappa: 1,
            weight_range: (1, 4),
            model: Model::UniformRandom,
            seed,
        }
    }

    fn validate(&self) -> Result<(), ReferenceError> {
        let bad = |msg: &str| Err(ReferenceError::InfeasibleSpec(msg.into()));
        if self.n < 2 {
            return bad("n must be at least 2");
        }
        if self.r_max < 2 {
            return bad("r_max must be at least 2");
        }
        if self.kappa < 1 || self.kappa > self.n as u64 {
            return bad("kappa must lie in [1, n]");
        }
        if self.weight_range.0 > self.weight_range.1 {
            return bad("empty weight range");
        }
        match self.model {
            Model::PlantedCut {
                balance,
                inside_w,
                crossing_w,
            } => {
                if !(balance > 0.0 && balance < 1.0) {
                    return bad("balance must lie in (0, 1)");
                }
                if crossing_w >= inside_w {
                    return bad("crossing weight must be below the inside weight");
                }
            }
            Model::ExpanderLike if self.m < self.n => {
                return bad("expander-like instances need m >= n");
            }
            _ => {}
        }
        Ok(())
    }
}

/// The planted side of a planted-cut spec; `None` for other models.
pub fn planted_side(spec: &GeneratorSpec) -> Option<VertexSet> {
    let Model::PlantedCut { balance, .. } = spec.model else {
        return None;
    };
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(1);
    let size = ((balance * spec.n as f64).round() as usize).clamp(1, spec.n - 1);
    let mut order: Vec<usize> = (0..spec.n).collect();
    order.shuffle(&mut rng);
    Some(VertexSet::from_indices(
        spec.n,
        order[..size].iter().copied(),
    ))
}

/// Draws `k` distinct vertices and splits them into a non-empty tail and head.
fn random_edge(rng: &mut ChaCha8Rng, pool: &[usize], r_max: usize) -> (Vec<usize>, Vec<usize>) {
    let k = rng.random_range(2..=r_max.min(pool.len()));
    let mut chosen: Vec<usize> = pool.choose_multiple(rng, k).copied().collect();
    let t = rng.random_range(1..k);
    let head = chosen.split_off(t);
    chosen.sort_unstable();
    let mut head = head;
    head.sort_unstable();
    (chosen, head)
}

pub fn generate(spec: &GeneratorSpec) -> Result<DirectedHypergraph, ReferenceError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n;
    let omega: Vec<u64> = (0..n).map(|_| rng.random_range(1..=spec.kappa)).collect();
    let all: Vec<usize> = (0..n).collect();
    let mut edges = Vec::with_capacity(spec.m);
    let weight = |rng: &mut ChaCha8Rng| {
        rational_from_u64(rng.random_range(spec.weight_range.0..=spec.weight_range.1))
    };

    match &spec.model {
        Model::UniformRandom => {
            for _ in 0..spec.m {
                let (tail, head) = random_edge(&mut rng, &all, spec.r_max);
                let w = weight(&mut rng);
                edges.push(Hyperedge::new(tail, head, w));
            }
        }
        Model::PlantedCut {
            inside_w,
            crossing_w,
            ..
        } => {
            let side = planted_side(spec).expect("planted model");
            for _ in 0..spec.m {
                let (tail, head) = random_edge(&mut rng, &all, spec.r_max);
                let leaves = tail.iter().any(|&u| side.contains(u))
                    && head.iter().any(|&v| !side.contains(v));
                let w = if leaves { *crossing_w } else { *inside_w };
                edges.push(Hyperedge::new(tail, head, rational_from_u64(w)));
            }
        }
        Model::ExpanderLike => {
            for k in 0..n {
                let w = weight(&mut rng);
                edges.push(Hyperedge::new(vec![k], vec![(k + 1) % n], w));
            }
            for k in n..spec.m {
                let (tail, head) = if k % 2 == 0 {
                    // reverse arcs of the cycle
                    let a = ((k - n) / 2) % n;
                    (vec![(a + 1) % n], vec![a])
                } else {
                    random_edge(&mut rng, &all, spec.r_max)
                };
                let w = weight(&mut rng);
                edges.push(Hyperedge::new(tail, head, w));
            }
        }
    }
    Ok(DirectedHypergraph::from_indexed(omega, edges)?)
}
