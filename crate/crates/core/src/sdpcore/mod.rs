//! Dense symmetric matrices, the SDP constraint matrices and the Gram
//! embedding.
//!
//! Every constraint matrix is a signed sum of pair Laplacians `L(a, b)`, the
//! matrix with `L(a, b) • X = ‖v_a − v_b‖²`, so the all-ones vector lies in
//! the kernel of each of them by construction.

mod constraints;
mod gram;

pub use constraints::{accumulate_a, mat_a, mat_k, mat_t, Side, TriangleId};
pub use gram::{cholesky_embed, variance_form, GramState, Tolerances};

use nalgebra::{DMatrix, DVector};

/// Dense symmetric matrix. Mutators keep both triangles in sync.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    data: DMatrix<f64>,
}

impl SymMatrix {
    pub fn zeros(order: usize) -> Self {
        Self {
            data: DMatrix::zeros(order, order),
        }
    }

    pub fn identity(order: usize) -> Self {
        Self {
            data: DMatrix::identity(order, order),
        }
    }

    /// Symmetrizes `data` by averaging it with its transpose.
    pub fn from_matrix(data: DMatrix<f64>) -> Self {
        assert!(data.is_square(), "symmetric matrices are square");
        let t = data.transpose();
        Self {
            data: (data + t) * 0.5,
        }
    }

    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(order);
        for i in 0..order {
            for j in i..order {
                let v = f(i, j);
                m.data[(i, j)] = v;
                m.data[(j, i)] = v;
            }
        }
        m
    }

    pub fn order(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.data
    }

    /// Adds `coef · L(a, b)`. A no-op when `a == b`.
    pub fn add_pair_laplacian(&mut self, a: usize, b: usize, coef: f64) {
        if a == b {
            return;
        }
        self.data[(a, a)] += coef;
        self.data[(b, b)] += coef;
        self.data[(a, b)] -= coef;
        self.data[(b, a)] -= coef;
    }

    /// `self += coef · other`.
    pub fn add_scaled(&mut self, other: &SymMatrix, coef: f64) {
        self.data += &other.data * coef;
    }

    pub fn scaled(&self, coef: f64) -> Self {
        Self {
            data: &self.data * coef,
        }
    }

    /// Frobenius inner product `M • X = Σ_ij M_ij X_ij`.
    pub fn dot(&self, other: &SymMatrix) -> f64 {
        self.data.dot(&other.data)
    }

    pub fn trace(&self) -> f64 {
        self.data.trace()
    }

    pub fn mul_vec(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.data * x
    }

    /// `M𝟙`, for kernel checks.
    pub fn row_sums(&self) -> DVector<f64> {
        self.mul_vec(&DVector::from_element(self.order(), 1.0))
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        if self.order() == 0 {
            return Vec::new();
        }
        let mut values: Vec<f64> = self
            .data
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        values.sort_by(f64::total_cmp);
        values
    }

    /// `(eigenvalues, eigenvectors)` with eigenvectors as columns.
    pub fn eigen(&self) -> (DVector<f64>, DMatrix<f64>) {
        let eig = self.data.clone().symmetric_eigen();
        (eig.eigenvalues, eig.eigenvectors)
    }

    /// Applies `f` to the spectrum: `U · diag(f(λ)) · Uᵀ`.
    pub fn spectral_map(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let (values, vectors) = self.eigen();
        let mapped = DVector::from_iterator(values.len(), values.iter().map(|&l| f(l)));
        let scaled = &vectors * DMatrix::from_diagonal(&mapped);
        SymMatrix::from_matrix(scaled * vectors.transpose())
    }
}

impl std::ops::Add for &SymMatrix {
    type Output = SymMatrix;
    fn add(self, rhs: &SymMatrix) -> SymMatrix {
        SymMatrix {
            data: &self.data + &rhs.data,
        }
    }
}

impl std::ops::Sub for &SymMatrix {
    type Output = SymMatrix;
    fn sub(self, rhs: &SymMatrix) -> SymMatrix {
        SymMatrix {
            data: &self.data - &rhs.data,
        }
    }
}

/// `exp(M)` through the symmetric eigendecomposition.
pub fn mat_exp(m: &SymMatrix) -> SymMatrix {
    m.spectral_map(f64::exp)
}

/// `exp(M − λ_max(M)·I)`: the same matrix up to a positive factor, with the
/// largest eigenvalue mapped to 1 so nothing overflows.
pub fn mat_exp_normalized(m: &SymMatrix) -> SymMatrix {
    let top = max_eigenvalue(m);
    m.spectral_map(|l| (l - top).exp())
}

pub fn spectral_norm(m: &SymMatrix) -> f64 {
    let values = m.eigenvalues();
    match (values.first(), values.last()) {
        (Some(lo), Some(hi)) => lo.abs().max(hi.abs()),
        _ => 0.0,
    }
}

pub fn min_eigenvalue(m: &SymMatrix) -> f64 {
    m.eigenvalues().first().copied().unwrap_or(0.0)
}

pub fn max_eigenvalue(m: &SymMatrix) -> f64 {
    m.eigenvalues().last().copied().unwrap_or(0.0)
}
