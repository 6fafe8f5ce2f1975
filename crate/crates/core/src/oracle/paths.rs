//! Search for a path whose rescaled squared hops undercut its chord.

/// Rescaled squared distances among a vertex subset, with optional
/// projections onto the current direction.
#[derive(Debug, Clone)]
pub struct HatFamily {
    pub members: Vec<usize>,
    /// `sq[a][b] = ‖v̂_a − v̂_b‖²`, indexed by position in `members`.
    pub sq: Vec<Vec<f64>>,
    pub proj: Option<Vec<f64>>,
}

/// `Σ hops − chord` for a path given by member positions.
pub fn path_violation(sq: &[Vec<f64>], path: &[usize]) -> f64 {
    let hops: f64 = path.windows(2).map(|h| sq[h[0]][h[1]]).sum();
    hops - sq[path[0]][path[path.len() - 1]]
}

/// Returns a path (as original vertex indices, at least three vertices)
/// with violation at most `-s`, or `None`.
///
/// Tries, in order: the most violated triple; greedy chains of stretched
/// short pairs along the direction; an exact hop-bounded shortest-path
/// search with repeated vertices shortcut. Every candidate is re-evaluated
/// directly before it is returned.
pub fn find_violated_path(
    family: &HatFamily,
    s: f64,
    stretch: Option<(f64, f64)>,
    hop_cap: usize,
) -> Option<Vec<usize>> {
    let accept = |p: Vec<usize>| {
        (p.len() >= 3 && path_violation(&family.sq, &p) <= -s)
            .then(|| p.iter().map(|&k| family.members[k]).collect())
    };
    if let Some(p) = best_triple(&family.sq) {
        if let Some(found) = accept(p) {
            return Some(found);
        }
    }
    if let (Some(proj), Some((gain, reach))) = (&family.proj, stretch) {
        for p in greedy_chains(&family.sq, proj, gain, reach) {
            if let Some(found) = accept(p) {
                return Some(found);
            }
        }
    }
    hop_bounded(
        &family.sq,
        s,
        hop_cap.min(family.members.len().saturating_sub(1)),
    )
    .and_then(accept)
}

fn best_triple(sq: &[Vec<f64>]) -> Option<Vec<usize>> {
    let k = sq.len();
    let mut best: Option<(f64, [usize; 3])> = None;
    for a in 0..k {
        for m in 0..k {
            if m == a {
                continue;
            }
            for b in 0..k {
                if b == a || b == m {
                    continue;
                }
                let v = sq[a][m] + sq[m][b] - sq[a][b];
                if best.is_none_or(|(bv, _)| v < bv) {
                    best = Some((v, [a, m, b]));
                }
            }
        }
    }
    best.map(|(_, p)| p.to_vec())
}

/// Pairs `(a, b)` that gain at least `gain` in projection while staying
/// within squared distance `reach` are matched greedily (each vertex at most
/// once as a tail and once as a head), then followed as chains. Every prefix
/// with at least two hops is a candidate.
fn greedy_chains(sq: &[Vec<f64>], proj: &[f64], gain: f64, reach: f64) -> Vec<Vec<usize>> {
    let k = sq.len();
    let mut pairs: Vec<(usize, usize)> = (0..k)
        .flat_map(|a| (0..k).map(move |b| (a, b)))
        .filter(|&(a, b)| a != b && proj[b] - proj[a] >= gain && sq[a][b] <= reach)
        .collect();
    pairs.sort_by(|&(a, b), &(c, d)| sq[a][b].total_cmp(&sq[c][d]));

    let mut next = vec![None; k];
    let mut has_pred = vec![false; k];
    for (a, b) in pairs {
        if next[a].is_none() && !has_pred[b] {
            next[a] = Some(b);
            has_pred[b] = true;
        }
    }
    let mut candidates = Vec::new();
    for start in (0..k).filter(|&v| !has_pred[v] && next[v].is_some()) {
        // projections strictly increase along a chain, so it cannot loop
        let mut chain = vec![start];
        let mut u = start;
        while let Some(v) = next[u] {
            chain.push(v);
            u = v;
            if chain.len() >= 3 {
                candidates.push(chain.clone());
            }
        }
    }
    candidates
}

/// Exact minimum of `Σ hops` over walks with at most `cap` hops between
/// every ordered pair, by Bellman–Ford rounds. A walk that violates by `s`
/// is shortcut to a simple path, which only lowers the hop sum.
fn hop_bounded(sq: &[Vec<f64>], s: f64, cap: usize) -> Option<Vec<usize>> {
    let k = sq.len();
    if cap < 2 {
        return None;
    }
    for start in 0..k {
        // dist[v] = shortest walk start → v using exactly `round` hops
        let mut dist: Vec<f64> = sq[start].clone();
        let mut parents: Vec<Vec<usize>> = vec![vec![start; k]];
        for _ in 2..=cap {
            let mut next = vec![f64::INFINITY; k];
            let mut parent = vec![usize::MAX; k];
            for v in 0..k {
                for u in 0..k {
                    if u != v && dist[u] + sq[u][v] < next[v] {
                        next[v] = dist[u] + sq[u][v];
                        parent[v] = u;
                    }
                }
            }
            dist = next;
            parents.push(parent);
            for end in (0..k).filter(|&e| e != start) {
                if dist[end] - sq[start][end] <= -s {
                    let walk = unwind(&parents, start, end);
                    let path = shortcut(&walk);
                    if path.len() >= 3 {
                        return Some(path);
                    }
                }
            }
        }
    }
    None
}

fn unwind(parents: &[Vec<usize>], start: usize, end: usize) -> Vec<usize> {
    let mut walk = vec![end];
    let mut v = end;
    for layer in parents.iter().rev() {
        v = layer[v];
        walk.push(v);
    }
    walk.reverse();
    debug_assert_eq!(walk[0], start);
    walk
}

/// Removes closed sub-walks so every vertex appears once.
fn shortcut(walk: &[usize]) -> Vec<usize> {
    let mut path: Vec<usize> = Vec::new();
    for &v in walk {
        if let Some(pos) = path.iter().position(|&u| u == v) {
            path.truncate(pos + 1);
        } else {
            path.push(v);
        }
    }
    path
}
