//! The oracle: given `α > 0` and a normalized Gram state, return either a
//! sparse cut or a dual certificate of bounded width.
//!
//! Dispatch follows the ball test. If some ball of radius `1/(√8·ω̂)` holds
//! a quarter of the total weight the vectors are concentrated (case 1);
//! otherwise they are well spread (case 2).

mod case1;
mod case2;
mod paths;

pub use case1::case1;
pub use case2::{case2, direction_split, preprocess_wellspread, DirectionSplit, Preprocessed};
pub use paths::{find_violated_path, path_violation, HatFamily};

use std::f64::consts::LN_2;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::OracleError;
use crate::flownet::{decompose, flow_form, flow_matrix, FlowAssignment, FlowInstance};
use crate::hypergraph::VertexSet;
use crate::instance::{FoundCut, SolverInstance};
use crate::sdpcore::{mat_k, spectral_norm, GramState, Side, SymMatrix, TriangleId};

/// `ln x`, clamped below at `ln 2` so square-root factors stay positive.
pub fn ln_clamped(x: f64) -> f64 {
    x.ln().max(LN_2)
}

/// Every hidden constant of the oracle analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OracleConfig {
    /// A ball is concentrated when it holds this fraction of `ω̂`.
    pub c_ball: f64,
    /// Case 1 capacities are `cap_c1·γω̂ω_iα` (sources) and `cap_c1·ω̂ω_jα` (sinks).
    pub cap_c1: f64,
    /// Stretch of the direction split, in units of `1/√ω̂`.
    pub sigma: f64,
    /// Minimum weight fraction of each side of the direction split.
    pub c: f64,
    /// Fraction of good directions; informational.
    pub gamma_dir: f64,
    /// Required path violation in rescaled units.
    pub s: f64,
    pub c_path: f64,
    pub mu: f64,
    /// Case 2 capacity coefficient; defaults to `32·C/(9μsc)`.
    pub beta: Option<f64>,
    /// Directions tried in case 2; defaults to `8⌈log₂ n⌉`.
    pub n_dirs: Option<usize>,
    /// Case 1 cut ratio bound coefficient.
    pub c_a: f64,
    /// Case 2 cut ratio bound coefficient; defaults to `4β`.
    pub c_a2: Option<f64>,
    pub c_rho: f64,
    pub c_d: f64,
    pub c_t: f64,
    /// Allowed deviation of `K • X` from 1.
    pub norm_tolerance: f64,
    pub rng_seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            c_ball: 0.25,
            cap_c1: 8.0,
            sigma: 1.0 / 48.0,
            c: 1.0 / 128.0,
            gamma_dir: 1.0 / 32.0,
            s: 0.25,
            c_path: 4.0,
            mu: 1.0,
            beta: None,
            n_dirs: None,
            c_a: 96.0,
            c_a2: None,
            c_rho: 16.0,
            c_d: 8.0,
            c_t: 6.0,
            norm_tolerance: 1e-6,
            rng_seed: 0,
        }
    }
}

impl OracleConfig {
    pub fn beta(&self) -> f64 {
        self.beta
            .unwrap_or(32.0 * self.c_path / (9.0 * self.mu * self.s * self.c))
    }

    pub fn c_a2(&self) -> f64 {
        self.c_a2.unwrap_or(4.0 * self.beta())
    }

    /// Stretch parameter `η = 8/(9cβ)`.
    pub fn eta_stretch(&self) -> f64 {
        8.0 / (9.0 * self.c * self.beta())
    }

    pub fn n_dirs(&self, n: usize) -> usize {
        self.n_dirs
            .unwrap_or_else(|| 8 * (n.max(2) as f64).log2().ceil() as usize)
    }

    /// `⌈(2C/μ)·√ln ω̂⌉`.
    pub fn path_cap(&self, omega_hat: f64) -> usize {
        (2.0 * self.c_path / self.mu * ln_clamped(omega_hat).sqrt()).ceil() as usize
    }

    /// Width bound `ρ = c_ρ·α·ω̂²·√ln(κn)`.
    pub fn rho(&self, alpha: f64, instance: &SolverInstance) -> f64 {
        let kn = instance.kappa() * instance.n() as f64;
        self.c_rho * alpha * instance.omega_hat().powi(2) * ln_clamped(kn).sqrt()
    }

    pub fn ratio_bound(&self, case: CaseTag, alpha: f64, instance: &SolverInstance) -> f64 {
        match case {
            CaseTag::Case1A | CaseTag::Case1B => self.c_a * alpha,
            _ => {
                let kn = instance.kappa() * instance.n() as f64;
                self.c_a2() * ln_clamped(kn).sqrt() * alpha
            }
        }
    }
}

/// Which branch of the oracle produced an outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseTag {
    #[serde(rename = "1A")]
    Case1A,
    #[serde(rename = "1B")]
    Case1B,
    #[serde(rename = "2A")]
    Case2A,
    #[serde(rename = "2B")]
    Case2B,
    #[serde(rename = "2C")]
    Case2C,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    pub center: Option<usize>,
    pub flow_value: Option<f64>,
    pub reversed: bool,
    pub directions_tried: usize,
    /// Share of the routed flow on pairs with `‖v̂_i − v̂_j‖² ≤ η/√ln ω̂`.
    pub filtered_fraction: Option<f64>,
    pub dropped_cycle_mass: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriangleWeight {
    pub triangle: TriangleId,
    pub weight: f64,
}

/// Dual variables `(z, f_p, F)` with `F` given by a hypergraph flow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualCertificate {
    pub side: Side,
    pub z: f64,
    pub triangles: Vec<TriangleWeight>,
    pub flow: FlowAssignment,
    pub width: f64,
}

impl DualCertificate {
    pub fn f_matrix(&self, order: usize) -> SymMatrix {
        flow_matrix(&self.flow, self.side, order)
    }

    /// `Σ f_p T_p + zK − F`.
    pub fn residual(&self, omega: &[f64]) -> SymMatrix {
        let n = omega.len();
        let mut m = mat_k(omega).scaled(self.z);
        for t in &self.triangles {
            t.triangle.accumulate(&mut m, t.weight);
        }
        &m - &self.f_matrix(n)
    }

    /// `(Σ f_p T_p + zK) • X` and `F • X`.
    pub fn primal_sides(&self, gram: &GramState, omega: &[f64]) -> (f64, f64) {
        let tri: f64 = self
            .triangles
            .iter()
            .map(|t| t.weight * t.triangle.form(|a, b| gram.sq_dist(a, b)))
            .sum();
        (
            tri + self.z * gram.k_form(omega),
            flow_form(&self.flow, gram),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleOutcome {
    Cut {
        cut: FoundCut,
        bound: f64,
        case: CaseTag,
        diagnostics: Diagnostics,
    },
    Dual {
        certificate: DualCertificate,
        case: CaseTag,
        diagnostics: Diagnostics,
    },
}

impl OracleOutcome {
    pub fn case(&self) -> CaseTag {
        match self {
            OracleOutcome::Cut { case, .. } | OracleOutcome::Dual { case, .. } => *case,
        }
    }
}

/// `B(i, r) = {j : ‖v_i − v_j‖² ≤ r²}`.
pub fn ball(gram: &GramState, i: usize, radius: f64) -> VertexSet {
    let r2 = radius * radius;
    VertexSet::from_indices(
        gram.n(),
        (0..gram.n()).filter(|&j| gram.sq_dist(i, j) <= r2),
    )
}

/// Center of the heaviest ball of radius `radius`, with its weight. Ties go
/// to the smallest index.
pub(crate) fn heaviest_ball(gram: &GramState, omega: &[f64], radius: f64) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for i in 0..gram.n() {
        let w: f64 = ball(gram, i, radius).iter().map(|j| omega[j]).sum();
        if w > best.1 {
            best = (i, w);
        }
    }
    best
}

/// Whether case 1 applies, with its ball center.
pub fn concentrated_center(
    gram: &GramState,
    instance: &SolverInstance,
    cfg: &OracleConfig,
) -> Option<usize> {
    let omega_hat = instance.omega_hat();
    let (center, weight) = heaviest_ball(gram, instance.omega(), 1.0 / (8f64.sqrt() * omega_hat));
    (weight >= cfg.c_ball * omega_hat).then_some(center)
}

pub fn run_oracle(
    alpha: f64,
    gram: &GramState,
    instance: &SolverInstance,
    cfg: &OracleConfig,
    rng: &mut ChaCha8Rng,
) -> Result<OracleOutcome, OracleError> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(OracleError::NonPositiveAlpha(alpha));
    }
    let k = gram.k_form(instance.omega());
    if (k - 1.0).abs() > cfg.norm_tolerance {
        return Err(OracleError::NotNormalized(k));
    }
    let outcome = match concentrated_center(gram, instance, cfg) {
        Some(center) => case1(alpha, gram, instance, cfg, center)?,
        None => case2(alpha, gram, instance, cfg, rng)?,
    };
    validate(alpha, gram, instance, cfg, outcome)
}

/// Rejects cuts above their ratio bound and duals that fail the full check.
fn validate(
    alpha: f64,
    gram: &GramState,
    instance: &SolverInstance,
    cfg: &OracleConfig,
    outcome: OracleOutcome,
) -> Result<OracleOutcome, OracleError> {
    match &outcome {
        OracleOutcome::Cut { cut, bound, .. } => {
            if cut.sparsity > bound * (1.0 + 1e-9) {
                return Err(OracleError::BoundViolated {
                    sparsity: cut.sparsity,
                    bound: *bound,
                });
            }
        }
        OracleOutcome::Dual { certificate, .. } => {
            let rho = cfg.rho(alpha, instance);
            if certificate.width > rho {
                return Err(OracleError::WidthExceeded {
                    width: certificate.width,
                    rho,
                });
            }
            let check = certificate_check(certificate, alpha, gram, instance, rho);
            if let Some(failure) = check.failure {
                return Err(OracleError::CertificateSelfCheck(failure.to_string()));
            }
        }
    }
    Ok(outcome)
}

/// Evaluates a candidate cut; `None` if the set is not a proper subset.
pub(crate) fn cut_outcome(
    set: &VertexSet,
    alpha: f64,
    instance: &SolverInstance,
    cfg: &OracleConfig,
    case: CaseTag,
    diagnostics: Diagnostics,
) -> Result<OracleOutcome, OracleError> {
    let cut = FoundCut::evaluate(instance, set).ok_or_else(|| {
        OracleError::InconsistentState(format!("{case:?} produced an improper cut"))
    })?;
    Ok(OracleOutcome::Cut {
        cut,
        bound: cfg.ratio_bound(case, alpha, instance),
        case,
        diagnostics,
    })
}

/// Result of solving a flow instance and decomposing its flow.
pub(crate) struct RoutedFlow {
    pub certificate: DualCertificate,
    pub demand_form: f64,
    pub dropped_cycle_mass: f64,
}

/// Lifts, decomposes and packages a solved flow as a candidate dual with
/// `z = α`. `D • X` is returned for the caller's case split.
pub(crate) fn route(
    alpha: f64,
    flow: &FlowInstance,
    sources: &VertexSet,
    sinks: &VertexSet,
    gram: &GramState,
    instance: &SolverInstance,
) -> Result<RoutedFlow, OracleError> {
    let lifted = flow.lift_flow()?;
    let parts = decompose(&lifted, instance.n(), sources, sinks);
    let mut certificate = DualCertificate {
        side: gram.side(),
        z: alpha,
        triangles: parts
            .triangle_weights
            .iter()
            .map(|(&triangle, &weight)| TriangleWeight { triangle, weight })
            .collect(),
        flow: parts.acyclic,
        width: 0.0,
    };
    certificate.width = spectral_norm(&certificate.residual(instance.omega()));
    Ok(RoutedFlow {
        demand_form: parts.demand.form(gram),
        certificate,
        dropped_cycle_mass: parts.dropped_cycle_mass,
    })
}

/// The individual conditions a dual certificate must meet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Bullet {
    /// `z ≥ α`.
    DualValue,
    /// `f_p ≥ 0` on valid triangles.
    TriangleSign,
    /// `(Σ f_p T_p + zK) • X ≤ F • X`.
    PrimalInequality,
    /// `F` comes from a capacity-respecting hypergraph flow.
    FlowCapacity,
    /// `F𝟙 = 0`.
    Kernel,
    /// `‖Σ f_p T_p + zK − F‖ ≤ ρ`.
    Width,
}

impl std::fmt::Display for Bullet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Bullet::DualValue => "z >= alpha",
            Bullet::TriangleSign => "f_p >= 0",
            Bullet::PrimalInequality => "(sum f_p T_p + z K) . X <= F . X",
            Bullet::FlowCapacity => "F is a capacity-respecting flow",
            Bullet::Kernel => "F 1 = 0",
            Bullet::Width => "width <= rho",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckFailure {
    pub bullet: Bullet,
    pub detail: String,
}

impl std::fmt::Display for CheckFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.bullet, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateCheck {
    pub failure: Option<CheckFailure>,
    pub width: f64,
    /// `F • X − (Σ f_p T_p + zK) • X`.
    pub primal_slack: f64,
}

impl CertificateCheck {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Re-verifies every condition on a dual certificate, in a fixed order, and
/// reports the first one that fails. The width is recomputed, never trusted.
pub fn certificate_check(
    cert: &DualCertificate,
    alpha: f64,
    gram: &GramState,
    instance: &SolverInstance,
    rho: f64,
) -> CertificateCheck {
    let omega = instance.omega();
    let n = instance.n();
    let fail = |bullet, detail: String| Some(CheckFailure { bullet, detail });

    let residual = cert.residual(omega);
    let width = spectral_norm(&residual);
    let (lhs, rhs) = cert.primal_sides(gram, omega);
    let primal_slack = rhs - lhs;
    let f = cert.f_matrix(n);
    let kernel_defect = f.row_sums().amax() > 1e-9 * f.max_abs_entry().max(1.0);

    let failure = if !(cert.z >= alpha) {
        fail(
            Bullet::DualValue,
            format!("z = {} < alpha = {alpha}", cert.z),
        )
    } else if let Some(t) = cert
        .triangles
        .iter()
        .find(|t| !(t.weight >= 0.0) || !t.triangle.is_valid())
    {
        fail(
            Bullet::TriangleSign,
            format!("triangle {:?} has weight {}", t.triangle, t.weight),
        )
    } else if cert.triangles.iter().any(|t| {
        let (a, b) = t.triangle.ends();
        a >= n || b >= n || t.triangle.middle() >= n
    }) {
        fail(Bullet::TriangleSign, "triangle vertex out of range".into())
    } else if primal_slack < -(1e-7 + 1e-9 * lhs.abs().max(rhs.abs())) {
        fail(
            Bullet::PrimalInequality,
            format!("lhs {lhs} exceeds rhs {rhs}"),
        )
    } else if let Err(detail) = cert.flow.check_capacities(instance) {
        fail(Bullet::FlowCapacity, detail)
    } else if kernel_defect {
        fail(Bullet::Kernel, "F 1 is not zero".into())
    } else if width > rho * (1.0 + 1e-9) {
        fail(Bullet::Width, format!("width {width} exceeds rho {rho}"))
    } else {
        None
    };
    CertificateCheck {
        failure,
        width,
        primal_slack,
    }
}
