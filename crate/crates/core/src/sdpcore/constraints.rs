use serde::{Deserialize, Serialize};

use super::SymMatrix;

/// Whether the designated vertex 0 belongs to the sought subset.
///
/// With `s = +1` for [`Side::ZeroIn`] and `s = −1` for [`Side::ZeroOut`] the
/// directed distance is
/// `d(i, j) = ‖v_i − v_j‖² − s·‖v_i − v_0‖² + s·‖v_j − v_0‖²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    ZeroIn,
    ZeroOut,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::ZeroIn => 1.0,
            Side::ZeroOut => -1.0,
        }
    }

    pub fn both() -> [Side; 2] {
        [Side::ZeroIn, Side::ZeroOut]
    }
}

/// Triangle `⟨{a, b}; m⟩` with `T • X = ‖v_a − v_m‖² + ‖v_m − v_b‖² − ‖v_a − v_b‖²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TriangleId {
    ends: [usize; 2],
    middle: usize,
}

impl TriangleId {
    /// `None` unless the three vertices are distinct.
    pub fn new(a: usize, b: usize, middle: usize) -> Option<Self> {
        if a == b || a == middle || b == middle {
            return None;
        }
        Some(Self {
            ends: [a.min(b), a.max(b)],
            middle,
        })
    }

    pub fn ends(&self) -> (usize, usize) {
        (self.ends[0], self.ends[1])
    }

    pub fn middle(&self) -> usize {
        self.middle
    }

    /// Re-validates after deserialization.
    pub fn is_valid(&self) -> bool {
        self.ends[0] < self.ends[1] && self.middle != self.ends[0] && self.middle != self.ends[1]
    }

    /// `T • X` from squared distances.
    pub fn form(&self, sq_dist: impl Fn(usize, usize) -> f64) -> f64 {
        let (a, b) = self.ends();
        sq_dist(a, self.middle) + sq_dist(self.middle, b) - sq_dist(a, b)
    }

    /// Adds `coef · T` into `target`.
    pub fn accumulate(&self, target: &mut SymMatrix, coef: f64) {
        let (a, b) = self.ends();
        target.add_pair_laplacian(a, self.middle, coef);
        target.add_pair_laplacian(self.middle, b, coef);
        target.add_pair_laplacian(a, b, -coef);
    }
}

/// Adds `coef · A_ij` into `target`.
pub fn accumulate_a(target: &mut SymMatrix, i: usize, j: usize, side: Side, coef: f64) {
    if i == j {
        return;
    }
    let s = side.sign();
    target.add_pair_laplacian(i, j, coef);
    target.add_pair_laplacian(i, 0, -s * coef);
    target.add_pair_laplacian(j, 0, s * coef);
}

/// `A_ij` with `A_ij • X = d(i, j)`.
pub fn mat_a(order: usize, i: usize, j: usize, side: Side) -> SymMatrix {
    let mut m = SymMatrix::zeros(order);
    accumulate_a(&mut m, i, j, side, 1.0);
    m
}

pub fn mat_t(order: usize, p: TriangleId) -> SymMatrix {
    let mut m = SymMatrix::zeros(order);
    p.accumulate(&mut m, 1.0);
    m
}

/// `K = ω̂·diag(ω) − ωωᵀ`, so `K • X = Σ_{i<j} ω_iω_j‖v_i − v_j‖²`.
pub fn mat_k(omega: &[f64]) -> SymMatrix {
    let total: f64 = omega.iter().sum();
    SymMatrix::from_fn(omega.len(), |i, j| {
        if i == j {
            total * omega[i] - omega[i] * omega[i]
        } else {
            -omega[i] * omega[j]
        }
    })
}
