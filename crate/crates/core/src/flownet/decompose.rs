use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{DemandMatrix, FlowAssignment, FlowEntry};
use crate::hypergraph::VertexSet;
use crate::sdpcore::{Side, SymMatrix, TriangleId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowPath {
    pub vertices: Vec<usize>,
    pub value: f64,
}

/// `F' = Σ_p f_p T_p + D`, where `F'` is the flow matrix of `acyclic`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowDecomposition {
    pub triangle_weights: BTreeMap<TriangleId, f64>,
    pub demand: DemandMatrix,
    /// Total pairwise flow removed while cancelling cycles (amount times
    /// cycle length, self-pairs included) plus any rounding residue.
    pub dropped_cycle_mass: f64,
    pub paths: Vec<FlowPath>,
    /// The input flow with the dropped mass removed; it never exceeds the
    /// input entrywise.
    pub acyclic: FlowAssignment,
}

impl FlowDecomposition {
    /// `Σ_p f_p T_p + D`.
    pub fn matrix(&self, side: Side, order: usize) -> SymMatrix {
        let mut m = super::demand_matrix(&self.demand, side, order);
        for (p, &f) in &self.triangle_weights {
            p.accumulate(&mut m, f);
        }
        m
    }
}

/// Path decomposition of a flow from `sources` to `sinks` on the pairwise
/// graph `g_ij = Σ_e 𝔣ᵉᵢⱼ`. Cycles are cancelled and dropped first. A path
/// `(i_0, …, i_k)` with value `f` adds `f` to the demand `(i_0, i_k)` and to
/// each triangle `⟨{i_0, i_{j+1}}; i_j⟩`, `1 ≤ j < k`.
pub fn decompose(
    flow: &FlowAssignment,
    n: usize,
    sources: &VertexSet,
    sinks: &VertexSet,
) -> FlowDecomposition {
    let original = flow.pair_totals();
    let scale = original.values().fold(0.0f64, |a, &v| a.max(v));
    let eps = 1e-14 * scale;

    let mut dropped = 0.0;
    let mut g = vec![vec![0.0; n]; n];
    for (&(i, j), &v) in &original {
        if i == j {
            dropped += v;
        } else {
            g[i][j] = v;
        }
    }
    dropped += cancel_cycles(&mut g, eps);

    let mut supply = vec![0.0; n];
    for (i, row) in g.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            supply[i] += v;
            supply[j] -= v;
        }
    }

    let mut paths = Vec::new();
    let mut used = vec![vec![0.0; n]; n];
    for start in 0..n {
        if !sources.contains(start) {
            continue;
        }
        while supply[start] > eps {
            let Some(path) = walk(&g, &supply, start, sinks, eps) else {
                break;
            };
            let bottleneck = path
                .windows(2)
                .map(|h| g[h[0]][h[1]])
                .fold(f64::INFINITY, f64::min);
            let end = *path.last().unwrap();
            let value = supply[start].min(-supply[end]).min(bottleneck);
            if !(value > 0.0) {
                break;
            }
            for h in path.windows(2) {
                g[h[0]][h[1]] -= value;
                used[h[0]][h[1]] += value;
            }
            supply[start] -= value;
            supply[end] += value;
            paths.push(FlowPath {
                vertices: path,
                value,
            });
        }
    }
    dropped += g.iter().flatten().filter(|&&v| v > 0.0).sum::<f64>();

    let mut triangle_weights = BTreeMap::new();
    let mut demand = BTreeMap::new();
    for p in &paths {
        let v = &p.vertices;
        let k = v.len() - 1;
        *demand.entry((v[0], v[k])).or_insert(0.0) += p.value;
        for j in 1..k {
            let t = TriangleId::new(v[0], v[j + 1], v[j]).expect("paths are simple");
            *triangle_weights.entry(t).or_insert(0.0) += p.value;
        }
    }

    let acyclic = FlowAssignment {
        entries: flow
            .entries
            .iter()
            .filter(|e| e.from != e.to)
            .filter_map(|e| {
                let total = original[&(e.from, e.to)];
                let kept = used[e.from][e.to];
                let value = e.value * (kept / total).min(1.0);
                (value > 0.0).then_some(FlowEntry { value, ..*e })
            })
            .collect(),
    };

    FlowDecomposition {
        triangle_weights,
        demand: DemandMatrix::from_pairs(&demand),
        dropped_cycle_mass: dropped,
        paths,
        acyclic,
    }
}

/// Repeatedly finds a cycle among arcs above `eps` and cancels its bottleneck.
/// Returns the removed mass (amount times length).
fn cancel_cycles(g: &mut [Vec<f64>], eps: f64) -> f64 {
    let n = g.len();
    let mut removed = 0.0;
    while let Some(cycle) = find_cycle(g, eps) {
        let len = cycle.len();
        let amount = (0..len)
            .map(|k| g[cycle[k]][cycle[(k + 1) % len]])
            .fold(f64::INFINITY, f64::min);
        for k in 0..len {
            let (a, b) = (cycle[k], cycle[(k + 1) % len]);
            g[a][b] -= amount;
            if g[a][b] <= eps {
                removed += g[a][b];
                g[a][b] = 0.0;
            }
        }
        removed += amount * len as f64;
    }
    debug_assert!(g.iter().all(|r| r.len() == n));
    removed
}

fn find_cycle(g: &[Vec<f64>], eps: f64) -> Option<Vec<usize>> {
    let n = g.len();
    // 0 unvisited, 1 on stack, 2 done
    let mut state = vec![0u8; n];
    let mut parent = vec![usize::MAX; n];
    for root in 0..n {
        if state[root] != 0 {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        state[root] = 1;
        while let Some(&mut (u, ref mut next)) = stack.last_mut() {
            if *next == n {
                state[u] = 2;
                stack.pop();
                continue;
            }
            let v = *next;
            *next += 1;
            if g[u][v] <= eps {
                continue;
            }
            match state[v] {
                0 => {
                    state[v] = 1;
                    parent[v] = u;
                    stack.push((v, 0));
                }
                1 => {
                    let mut cycle = vec![u];
                    let mut w = u;
                    while w != v {
                        w = parent[w];
                        cycle.push(w);
                    }
                    cycle.reverse();
                    return Some(cycle);
                }
                _ => {}
            }
        }
    }
    None
}

/// Follows positive arcs from `start` to the first vertex with negative
/// supply. The graph is acyclic here, so the walk is a simple path.
fn walk(
    g: &[Vec<f64>],
    supply: &[f64],
    start: usize,
    sinks: &VertexSet,
    eps: f64,
) -> Option<Vec<usize>> {
    let mut path = vec![start];
    let mut u = start;
    loop {
        if u != start && supply[u] < -eps && sinks.contains(u) {
            return Some(path);
        }
        let next = (0..g.len()).find(|&v| g[u][v] > eps)?;
        path.push(next);
        u = next;
        if path.len() > g.len() {
            return None;
        }
    }
}
