use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{spectral_norm, Side, SymMatrix};
use crate::error::SdpError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Eigenvalues down to `−psd_rel·‖X‖` are clamped to zero.
    pub psd_rel: f64,
    pub chol: f64,
    /// Allowed deviation of `K • X` from 1.
    pub norm: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            psd_rel: 1e-8,
            chol: 1e-8,
            norm: 1e-6,
        }
    }
}

/// Vectors `v_i` (rows of an `n × d` matrix) whose Gram matrix is `X`.
///
/// Negative eigenvalues within tolerance are clamped before factoring.
pub fn cholesky_embed(x: &SymMatrix, tol: &Tolerances) -> Result<DMatrix<f64>, SdpError> {
    let n = x.order();
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let (values, vectors) = x.eigen();
    let threshold = tol.psd_rel * spectral_norm(x);
    if let Some(&worst) = values.iter().min_by(|a, b| a.total_cmp(b)) {
        if worst < -threshold {
            return Err(SdpError::NotPsd {
                eigenvalue: worst,
                tolerance: threshold,
            });
        }
    }
    let roots = DVector::from_iterator(n, values.iter().map(|&l| l.max(0.0).sqrt()));
    Ok(vectors * DMatrix::from_diagonal(&roots))
}

/// Primal candidate: `X` together with an embedding and the side flag.
#[derive(Debug, Clone, PartialEq)]
pub struct GramState {
    x: SymMatrix,
    vectors: DMatrix<f64>,
    side: Side,
}

impl GramState {
    pub fn from_matrix(x: SymMatrix, side: Side, tol: &Tolerances) -> Result<Self, SdpError> {
        let vectors = cholesky_embed(&x, tol)?;
        Ok(Self { x, vectors, side })
    }

    pub fn from_vectors(vectors: DMatrix<f64>, side: Side) -> Self {
        let x = SymMatrix::from_matrix(&vectors * vectors.transpose());
        Self { x, vectors, side }
    }

    pub fn x(&self) -> &SymMatrix {
        &self.x
    }

    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> DVector<f64> {
        self.vectors.row(i).transpose()
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn with_side(&self, side: Side) -> Self {
        Self {
            side,
            ..self.clone()
        }
    }

    pub fn n(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn dim(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn sq_dist(&self, i: usize, j: usize) -> f64 {
        (self.vectors.row(i) - self.vectors.row(j)).norm_squared()
    }

    /// `s·‖v_i − v_0‖²`, so that `d(i, j) = ‖v_i − v_j‖² − φ_i + φ_j`.
    pub fn potential(&self, i: usize) -> f64 {
        self.side.sign() * self.sq_dist(i, 0)
    }

    /// Directed distance `d(i, j) = A_ij • X`.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        self.sq_dist(i, j) - self.potential(i) + self.potential(j)
    }

    /// `K • X = ω̂ Σ ω_i‖v_i‖² − ‖Σ ω_i v_i‖²`.
    pub fn k_form(&self, omega: &[f64]) -> f64 {
        let total: f64 = omega.iter().sum();
        let mut centroid = DVector::zeros(self.dim());
        let mut weighted = 0.0;
        for (i, &w) in omega.iter().enumerate() {
            let v = self.vectors.row(i);
            weighted += w * v.norm_squared();
            centroid += v.transpose() * w;
        }
        total * weighted - centroid.norm_squared()
    }

    /// Rescales so that `K • X = 1`. `None` if `K • X` is not positive.
    pub fn normalized(&self, omega: &[f64]) -> Option<Self> {
        let k = self.k_form(omega);
        if !(k > 0.0) {
            return None;
        }
        Some(Self {
            x: self.x.scaled(1.0 / k),
            vectors: &self.vectors / k.sqrt(),
            side: self.side,
        })
    }

    /// Largest entry of `|V Vᵀ − X|`.
    pub fn reconstruction_error(&self) -> f64 {
        (&self.vectors * self.vectors.transpose() - self.x.as_matrix()).amax()
    }
}

/// `Σ δ_i u_i² − (Σ δ_i u_i)²`, the weighted variance of `u` under `δ`.
///
/// Requires `Σ u_i = 0`, `Σ u_i² = 1`, `δ_i > 0` and `Σ δ_i = 1`.
pub fn variance_form(u: &[f64], delta: &[f64]) -> Result<f64, SdpError> {
    const TOL: f64 = 1e-9;
    if u.len() != delta.len() {
        return Err(SdpError::Dimension {
            expected: u.len(),
            got: delta.len(),
        });
    }
    let sum: f64 = u.iter().sum();
    let sq: f64 = u.iter().map(|x| x * x).sum();
    let mass: f64 = delta.iter().sum();
    if sum.abs() > TOL {
        return Err(SdpError::VariancePrecondition(format!(
            "Σu = {sum:e}, expected 0"
        )));
    }
    if (sq - 1.0).abs() > TOL {
        return Err(SdpError::VariancePrecondition(format!(
            "Σu² = {sq}, expected 1"
        )));
    }
    if delta.iter().any(|&d| !(d > 0.0)) {
        return Err(SdpError::VariancePrecondition("δ must be positive".into()));
    }
    if (mass - 1.0).abs() > TOL {
        return Err(SdpError::VariancePrecondition(format!(
            "Σδ = {mass}, expected 1"
        )));
    }
    let mean: f64 = u.iter().zip(delta).map(|(x, d)| d * x).sum();
    let second: f64 = u.iter().zip(delta).map(|(x, d)| d * x * x).sum();
    Ok(second - mean * mean)
}
