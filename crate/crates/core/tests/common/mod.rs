#![allow(dead_code)]

use hyperspars::hypergraph::{DirectedHypergraph, Hyperedge, Rational};
use hyperspars::sdpcore::{GramState, Side};
use nalgebra::DMatrix;
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Edges with small rational weights; tail and head may overlap.
pub fn hypergraph(
    max_n: usize,
    max_m: usize,
    kappa: u64,
) -> impl Strategy<Value = DirectedHypergraph> {
    (2..=max_n, 1..=max_m).prop_flat_map(move |(n, m)| {
        let omega = prop::collection::vec(1..=kappa.min(n as u64), n);
        let edge = (
            prop::collection::btree_set(0..n, 1..=n.min(3)),
            prop::collection::btree_set(0..n, 1..=n.min(3)),
            1i64..=6,
            1i64..=3,
        );
        (omega, prop::collection::vec(edge, m)).prop_map(|(omega, edges)| {
            let edges = edges
                .into_iter()
                .map(|(t, h, p, q)| {
                    Hyperedge::new(
                        t.into_iter().collect(),
                        h.into_iter().collect(),
                        Rational::new(BigInt::from(p), BigInt::from(q)),
                    )
                })
                .collect();
            DirectedHypergraph::from_indexed(omega, edges).unwrap()
        })
    })
}

pub fn random_vectors(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, dim, |_, _| rng.random_range(-1.0..1.0))
}

pub fn random_gram(seed: u64, n: usize, side: Side) -> GramState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = rng.random_range(1..=n);
    GramState::from_vectors(random_vectors(&mut rng, n, dim), side)
}

pub fn sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
