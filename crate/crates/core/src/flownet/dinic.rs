use std::collections::VecDeque;

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    residual: f64,
}

/// Directed network with `f64` capacities, solved by Dinic's algorithm with
/// capacity scaling.
///
/// Arc `k` is stored as the pair `2k` (forward) and `2k + 1` (reverse).
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    adjacency: Vec<Vec<usize>>,
    arcs: Vec<Arc>,
    capacity: Vec<f64>,
    tolerance: f64,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        Self {
            adjacency: vec![Vec::new(); nodes],
            arcs: Vec::new(),
            capacity: Vec::new(),
            tolerance: 0.0,
        }
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn arc_count(&self) -> usize {
        self.capacity.len()
    }

    /// Returns the arc id.
    pub fn add_arc(&mut self, from: usize, to: usize, capacity: f64) -> usize {
        assert!(capacity >= 0.0, "capacities are non-negative");
        let id = self.capacity.len();
        self.adjacency[from].push(2 * id);
        self.adjacency[to].push(2 * id + 1);
        self.arcs.push(Arc {
            to,
            residual: capacity,
        });
        self.arcs.push(Arc {
            to: from,
            residual: 0.0,
        });
        self.capacity.push(capacity);
        id
    }

    pub fn capacity(&self, arc: usize) -> f64 {
        self.capacity[arc]
    }

    pub fn flow(&self, arc: usize) -> f64 {
        self.arcs[2 * arc + 1].residual
    }

    /// `(from, to)` of arc `arc`.
    pub fn endpoints(&self, arc: usize) -> (usize, usize) {
        (self.arcs[2 * arc + 1].to, self.arcs[2 * arc].to)
    }

    /// Pushes a maximum `s`–`t` flow and returns its value.
    pub fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        if s == t {
            return 0.0;
        }
        let source_cap: f64 = self.adjacency[s]
            .iter()
            .filter(|&&a| a % 2 == 0)
            .map(|&a| self.capacity[a / 2])
            .sum();
        let largest = self
            .capacity
            .iter()
            .copied()
            .fold(0.0, f64::max)
            .min(source_cap);
        if !(largest > 0.0) {
            return 0.0;
        }
        self.tolerance = 1e-13 * source_cap;

        let mut total = 0.0;
        let mut delta = 2f64.powi(largest.log2().floor() as i32);
        loop {
            let threshold = delta.max(self.tolerance);
            total += self.dinic_phase(s, t, threshold);
            if delta <= self.tolerance {
                break;
            }
            delta /= 2.0;
        }
        total
    }

    fn dinic_phase(&mut self, s: usize, t: usize, threshold: f64) -> f64 {
        let mut total = 0.0;
        loop {
            let level = self.levels(s, threshold);
            if level[t] == usize::MAX {
                break;
            }
            let mut next = vec![0; self.node_count()];
            loop {
                let pushed = self.augment(s, t, f64::INFINITY, threshold, &level, &mut next);
                if pushed <= 0.0 {
                    break;
                }
                total += pushed;
            }
        }
        total
    }

    fn levels(&self, s: usize, threshold: f64) -> Vec<usize> {
        let mut level = vec![usize::MAX; self.node_count()];
        level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &a in &self.adjacency[u] {
                let arc = &self.arcs[a];
                if arc.residual >= threshold && level[arc.to] == usize::MAX {
                    level[arc.to] = level[u] + 1;
                    queue.push_back(arc.to);
                }
            }
        }
        level
    }

    fn augment(
        &mut self,
        u: usize,
        t: usize,
        limit: f64,
        threshold: f64,
        level: &[usize],
        next: &mut [usize],
    ) -> f64 {
        if u == t {
            return limit;
        }
        while next[u] < self.adjacency[u].len() {
            let a = self.adjacency[u][next[u]];
            let (to, residual) = (self.arcs[a].to, self.arcs[a].residual);
            if residual >= threshold && level[to] == level[u] + 1 {
                let pushed = self.augment(to, t, limit.min(residual), threshold, level, next);
                if pushed > 0.0 {
                    self.arcs[a].residual -= pushed;
                    self.arcs[a ^ 1].residual += pushed;
                    return pushed;
                }
            }
            next[u] += 1;
        }
        0.0
    }

    /// Nodes reachable from `s` through arcs with residual capacity above the
    /// solver tolerance. After `max_flow` this is the source side of a
    /// minimum cut.
    pub fn residual_reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.node_count()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &a in &self.adjacency[u] {
                let arc = &self.arcs[a];
                if arc.residual > self.tolerance && !seen[arc.to] {
                    seen[arc.to] = true;
                    stack.push(arc.to);
                }
            }
        }
        seen
    }

    /// Total capacity of arcs leaving `side`.
    pub fn cut_capacity(&self, side: &[bool]) -> f64 {
        (0..self.arc_count())
            .filter(|&k| {
                let (from, to) = self.endpoints(k);
                side[from] && !side[to]
            })
            .map(|k| self.capacity[k])
            .sum()
    }

    /// Largest `|inflow − outflow|` over nodes other than `s` and `t`.
    pub fn conservation_error(&self, s: usize, t: usize) -> f64 {
        let mut balance = vec![0.0; self.node_count()];
        for k in 0..self.arc_count() {
            let (from, to) = self.endpoints(k);
            balance[from] -= self.flow(k);
            balance[to] += self.flow(k);
        }
        balance
            .iter()
            .enumerate()
            .filter(|&(v, _)| v != s && v != t)
            .fold(0.0, |acc, (_, b)| acc.max(b.abs()))
    }
}
