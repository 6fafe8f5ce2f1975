//! The primal-dual loop for a fixed `α`, the two-sided run over vertex 0,
//! and the geometric search over `α`.
//!
//! A run either returns a cut as soon as the oracle produces one, or
//! accumulates dual certificates `M^(t) = −(1/ρ)(Σ f_p T_p + zK − F)` and
//! feeds `W^(t+1) = exp(−η Σ M)` back as the next primal candidate. A lower
//! bound of `α/2` is claimed only when [`verify_run`] replays the stored
//! certificates and finds `λ_min(Z̄ + (α/2)K) ≥ −tol`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::hypergraph::VertexSet;
use crate::instance::{FoundCut, SolverInstance};
use crate::oracle::{
    certificate_check, run_oracle, CaseTag, CheckFailure, DualCertificate, OracleConfig,
    OracleOutcome,
};
use crate::sdpcore::{
    mat_exp_normalized, mat_k, min_eigenvalue, spectral_norm, GramState, Side, SymMatrix,
    Tolerances,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SidePolicy {
    Both,
    ZeroIn,
    ZeroOut,
}

impl SidePolicy {
    pub fn sides(self) -> Vec<Side> {
        match self {
            SidePolicy::Both => Side::both().to_vec(),
            SidePolicy::ZeroIn => vec![Side::ZeroIn],
            SidePolicy::ZeroOut => vec![Side::ZeroOut],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Iteration cap; the run uses `min(T_theory, t_cap)` iterations.
    pub t_cap: usize,
    pub eta_override: Option<f64>,
    pub alpha_lo: Option<f64>,
    pub alpha_hi: Option<f64>,
    pub search_ratio: f64,
    /// Extra probes at `lo/ratio^k`, tried only when the bracket search
    /// certified nothing.
    pub descent_probes: usize,
    pub side_policy: SidePolicy,
    pub oracle: OracleConfig,
    pub tolerances: Tolerances,
    /// Slack allowed on `λ_min(Z̄ + (α/2)K)`.
    pub certify_tolerance: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            t_cap: 5000,
            eta_override: None,
            alpha_lo: None,
            alpha_hi: None,
            search_ratio: 2.0,
            descent_probes: 4,
            side_policy: SidePolicy::Both,
            oracle: OracleConfig::default(),
            tolerances: Tolerances::default(),
            certify_tolerance: 1e-6,
        }
    }
}

/// `⌈16κ²ρ²n² ln n / (α²ω̂⁴)⌉`, saturating.
pub fn theoretical_iterations(instance: &SolverInstance, alpha: f64, rho: f64) -> u64 {
    let n = instance.n() as f64;
    let t = 16.0 * instance.kappa().powi(2) * rho * rho * n * n * n.ln().max(0.0)
        / (alpha * alpha * instance.omega_hat().powi(4));
    if t.is_finite() {
        (t.ceil() as u64).max(1)
    } else {
        u64::MAX
    }
}

/// The matrix weights state, shared by the solver loop and the replay check
/// so both see bit-identical primal candidates.
#[derive(Debug, Clone)]
pub struct MwState {
    omega: Vec<f64>,
    k: SymMatrix,
    eta: f64,
    /// `Σ_τ M^(τ)`.
    loss: SymMatrix,
    w: SymMatrix,
}

impl MwState {
    pub fn new(omega: &[f64], eta: f64) -> Self {
        let n = omega.len();
        Self {
            omega: omega.to_vec(),
            k: mat_k(omega),
            eta,
            loss: SymMatrix::zeros(n),
            w: SymMatrix::identity(n),
        }
    }

    pub fn k_dot_w(&self) -> f64 {
        self.k.dot(&self.w)
    }

    /// `X = PWP/(K • W)` with `P = I − 𝟙𝟙ᵀ/n`. Every constraint matrix kills
    /// `𝟙`, so the projection changes no form; it only removes the common
    /// component that comes to dominate `W` and would swamp the vector
    /// differences in rounding.
    pub fn primal(&self) -> SymMatrix {
        let n = self.w.order();
        let w = self.w.as_matrix();
        let row_means = w.row_sum().transpose() / n as f64;
        let total_mean = row_means.sum() / n as f64;
        let centered = SymMatrix::from_fn(n, |i, j| {
            w[(i, j)] - row_means[i] - row_means[j] + total_mean
        });
        centered.scaled(1.0 / self.k_dot_w())
    }

    /// Adds `M = −(1/ρ)·residual` and returns `‖M‖`.
    pub fn update(&mut self, certificate: &DualCertificate, rho: f64) -> f64 {
        let m = certificate.residual(&self.omega).scaled(-1.0 / rho);
        let norm = spectral_norm(&m);
        self.loss.add_scaled(&m, 1.0);
        // The loss kills 𝟙, so it commutes with J = 𝟙𝟙ᵀ/n and adding λJ only
        // rescales the 𝟙 component of the exponential. λ pushes that
        // component below every other one.
        let n = self.loss.order();
        let exponent = self.loss.scaled(-self.eta);
        let damp = -(self.eta * spectral_norm(&self.loss) + 40.0) / n as f64;
        let exponent = &exponent + &SymMatrix::from_fn(n, |_, _| damp);
        self.w = mat_exp_normalized(&exponent);
        norm
    }

    /// `λ_min(Z̄ + (α/2)K)` with `Z̄ = (ρ/T) Σ M`.
    pub fn certificate_eigenvalue(&self, alpha: f64, rho: f64, iterations: usize) -> f64 {
        let mut z = self.loss.scaled(rho / iterations.max(1) as f64);
        z.add_scaled(&self.k, alpha / 2.0);
        min_eigenvalue(&z)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub t: usize,
    pub case: Option<CaseTag>,
    pub width: Option<f64>,
    pub m_norm: Option<f64>,
    pub k_dot_w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RunOutcome {
    CutFound { cut: FoundCut },
    LowerBoundCertified { bound: f64 },
    Aborted { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub alpha: f64,
    pub side: Side,
    pub rho: f64,
    pub eta: f64,
    pub t_theory: u64,
    pub t_run: usize,
    pub transcript: Vec<IterationRecord>,
    pub outcome: RunOutcome,
    pub best_cut: Option<FoundCut>,
    /// Recomputed `λ_min(Z̄ + (α/2)K)` after the last iteration.
    pub min_eigenvalue: Option<f64>,
    /// Every dual certificate, in order; kept only on certified runs.
    pub certificates: Vec<DualCertificate>,
}

impl RunReport {
    pub fn certified(&self) -> bool {
        matches!(self.outcome, RunOutcome::LowerBoundCertified { .. })
    }

    /// What [`verify_run`] needs, if this run certified.
    pub fn certified_run(&self) -> Option<CertifiedRun> {
        self.certified().then(|| CertifiedRun {
            alpha: self.alpha,
            side: self.side,
            eta: self.eta,
            certificates: self.certificates.clone(),
        })
    }
}

/// The data a certified run is re-verified from: everything else is
/// recomputed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifiedRun {
    pub alpha: f64,
    pub side: Side,
    pub eta: f64,
    pub certificates: Vec<DualCertificate>,
}

/// Independent seed for each `(α, side)` run.
fn run_seed(seed: u64, alpha: f64, side: Side) -> u64 {
    let side_tag = match side {
        Side::ZeroIn => 0x9e37_79b9_7f4a_7c15,
        Side::ZeroOut => 0xc2b2_ae3d_27d4_eb4f,
    };
    seed ^ alpha.to_bits().rotate_left(17) ^ side_tag
}

pub fn run_algorithm1(
    instance: &SolverInstance,
    alpha: f64,
    side: Side,
    cfg: &SolverConfig,
) -> RunReport {
    let rho = cfg.oracle.rho(alpha, instance);
    let t_theory = theoretical_iterations(instance, alpha, rho);
    let t_run = (cfg.t_cap as u64).min(t_theory) as usize;
    let n = instance.n();
    let eta = cfg
        .eta_override
        .unwrap_or_else(|| ((n as f64).ln().max(f64::MIN_POSITIVE) / t_run.max(1) as f64).sqrt());
    let mut report = RunReport {
        alpha,
        side,
        rho,
        eta,
        t_theory,
        t_run,
        transcript: Vec::new(),
        outcome: RunOutcome::Aborted {
            reason: "no iterations".into(),
        },
        best_cut: None,
        min_eigenvalue: None,
        certificates: Vec::new(),
    };
    if !(alpha > 0.0) {
        report.outcome = RunOutcome::Aborted {
            reason: format!("alpha must be positive, got {alpha}"),
        };
        return report;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(run_seed(cfg.oracle.rng_seed, alpha, side));
    let mut mw = MwState::new(instance.omega(), eta);
    for t in 1..=t_run {
        let k_dot_w = mw.k_dot_w();
        let gram = match GramState::from_matrix(mw.primal(), side, &cfg.tolerances) {
            Ok(g) => g,
            Err(e) => return abort(report, format!("iteration {t}: {e}")),
        };
        let mut record = IterationRecord {
            t,
            case: None,
            width: None,
            m_norm: None,
            k_dot_w,
        };
        match run_oracle(alpha, &gram, instance, &cfg.oracle, &mut rng) {
            Err(e) => {
                report.transcript.push(record);
                return abort(report, format!("iteration {t}: {e}"));
            }
            Ok(OracleOutcome::Cut { cut, case, .. }) => {
                record.case = Some(case);
                report.transcript.push(record);
                report.best_cut = Some(cut.clone());
                report.outcome = RunOutcome::CutFound { cut };
                report.certificates.clear();
                return report;
            }
            Ok(OracleOutcome::Dual {
                certificate, case, ..
            }) => {
                record.case = Some(case);
                record.width = Some(certificate.width);
                let norm = mw.update(&certificate, rho);
                record.m_norm = Some(norm);
                report.transcript.push(record);
                report.certificates.push(certificate);
                if norm > 1.0 + 1e-6 {
                    return abort(report, format!("iteration {t}: |M| = {norm} exceeds 1"));
                }
            }
        }
    }

    let lambda = mw.certificate_eigenvalue(alpha, rho, t_run);
    report.min_eigenvalue = Some(lambda);
    if lambda >= -cfg.certify_tolerance {
        report.outcome = RunOutcome::LowerBoundCertified { bound: alpha / 2.0 };
    } else {
        report.certificates.clear();
        report.outcome = RunOutcome::Aborted {
            reason: format!(
                "after {t_run} iterations lambda_min(Z + (alpha/2) K) = {lambda:.3e} is negative"
            ),
        };
    }
    report
}

fn abort(mut report: RunReport, reason: String) -> RunReport {
    report.certificates.clear();
    report.outcome = RunOutcome::Aborted { reason };
    report
}

/// Outcome of replaying a certified run.
#[derive(Debug, Clone, PartialEq)]
pub struct Verification {
    pub min_eigenvalue: Option<f64>,
    /// Iteration (1-based) and the first failing condition.
    pub failure: Option<(usize, CheckFailure)>,
}

impl Verification {
    pub fn passed(&self, tolerance: f64) -> bool {
        self.failure.is_none() && self.min_eigenvalue.is_some_and(|l| l >= -tolerance)
    }
}

/// Recomputes every primal candidate from the certificates alone, checks
/// each certificate against it, then recomputes `λ_min(Z̄ + (α/2)K)`.
pub fn verify_run(
    instance: &SolverInstance,
    report: &CertifiedRun,
    cfg: &SolverConfig,
) -> Verification {
    let rho = cfg.oracle.rho(report.alpha, instance);
    let mut mw = MwState::new(instance.omega(), report.eta);
    let fail = |t: usize, failure: CheckFailure| Verification {
        min_eigenvalue: None,
        failure: Some((t, failure)),
    };
    if report.certificates.is_empty() {
        return fail(
            0,
            CheckFailure {
                bullet: crate::oracle::Bullet::DualValue,
                detail: "no certificates".into(),
            },
        );
    }
    for (k, cert) in report.certificates.iter().enumerate() {
        let t = k + 1;
        let gram = match GramState::from_matrix(mw.primal(), report.side, &cfg.tolerances) {
            Ok(g) => g,
            Err(e) => {
                return fail(
                    t,
                    CheckFailure {
                        bullet: crate::oracle::Bullet::PrimalInequality,
                        detail: e.to_string(),
                    },
                )
            }
        };
        if cert.side != report.side {
            return fail(
                t,
                CheckFailure {
                    bullet: crate::oracle::Bullet::PrimalInequality,
                    detail: "certificate side does not match the run".into(),
                },
            );
        }
        let check = certificate_check(cert, report.alpha, &gram, instance, rho);
        if let Some(failure) = check.failure {
            return fail(t, failure);
        }
        mw.update(cert, rho);
    }
    Verification {
        min_eigenvalue: Some(mw.certificate_eigenvalue(
            report.alpha,
            rho,
            report.certificates.len(),
        )),
        failure: None,
    }
}

/// Both sides at one `α`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub alpha: f64,
    pub runs: Vec<RunReport>,
    pub best_cut: Option<FoundCut>,
    /// `α/2` when every side certified.
    pub lower_bound: Option<f64>,
}

/// Runs every side of the policy, concurrently. The lower bound needs all
/// sides to certify; a cut from any side is kept.
pub fn run_both_sides(instance: &SolverInstance, alpha: f64, cfg: &SolverConfig) -> ProbeReport {
    let sides = cfg.side_policy.sides();
    let runs: Vec<RunReport> = std::thread::scope(|scope| {
        let handles: Vec<_> = sides
            .iter()
            .map(|&side| scope.spawn(move || run_algorithm1(instance, alpha, side, cfg)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("solver thread panicked"))
            .collect()
    });
    let best_cut = runs
        .iter()
        .fold(None, |acc, r| FoundCut::better(acc, r.best_cut.clone()));
    let lower_bound =
        (runs.len() == 2 && runs.iter().all(RunReport::certified)).then_some(alpha / 2.0);
    ProbeReport {
        alpha,
        runs,
        best_cut,
        lower_bound,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub alpha_lo: f64,
    pub alpha_hi: f64,
    pub best_cut: Option<FoundCut>,
    pub lower_bound: Option<f64>,
    /// `sparsity / lower_bound`.
    pub ratio: Option<f64>,
    pub probes: Vec<ProbeReport>,
}

/// Sparsest singleton-or-co-singleton cut.
pub fn best_singleton(instance: &SolverInstance) -> Option<FoundCut> {
    let n = instance.n();
    (0..n)
        .flat_map(|i| {
            let single = VertexSet::from_indices(n, [i]);
            [single.complement(), single]
        })
        .fold(None, |acc, s| {
            FoundCut::better(acc, FoundCut::evaluate(instance, &s))
        })
}

/// Default `[lo, hi]`: `lo = 4·w_min/ω̂²` over positive edge weights and
/// `hi = 4·ϑ(best singleton)`.
pub fn default_bracket(instance: &SolverInstance) -> Option<(f64, f64)> {
    let w_min = instance
        .edges()
        .iter()
        .map(|e| e.weight)
        .filter(|&w| w > 0.0)
        .fold(f64::INFINITY, f64::min);
    let hi = 4.0 * best_singleton(instance)?.sparsity;
    if !w_min.is_finite() || !(hi > 0.0) {
        return None;
    }
    Some((4.0 * w_min / instance.omega_hat().powi(2), hi))
}

/// Geometric search over `α`. A probe that finds a cut lowers `hi`; any
/// other probe raises `lo`. If nothing certified, up to `descent_probes`
/// further probes continue geometrically below the final `lo`. Only probes
/// certified on both sides contribute to the lower bound, and certificates
/// are kept only for the probe that supports it.
pub fn binary_search(instance: &SolverInstance, cfg: &SolverConfig) -> SearchReport {
    let singleton = best_singleton(instance);
    let bracket = default_bracket(instance);
    let (mut lo, mut hi) = match (cfg.alpha_lo, cfg.alpha_hi, bracket) {
        (Some(lo), Some(hi), _) => (lo, hi),
        (lo, hi, Some((dlo, dhi))) => (lo.unwrap_or(dlo), hi.unwrap_or(dhi)),
        (lo, hi, None) => (lo.unwrap_or(0.0), hi.unwrap_or(0.0)),
    };
    let mut report = SearchReport {
        alpha_lo: lo,
        alpha_hi: hi,
        best_cut: singleton,
        lower_bound: None,
        ratio: None,
        probes: Vec::new(),
    };
    let ratio = cfg.search_ratio.max(1.0 + 1e-9);
    if !(lo > 0.0 && hi > lo) {
        return report;
    }
    let mut supporting: Option<usize> = None;
    while hi / lo > ratio {
        let alpha = (lo * hi).sqrt();
        let probe = run_both_sides(instance, alpha, cfg);
        report.best_cut = FoundCut::better(report.best_cut.take(), probe.best_cut.clone());
        if probe.best_cut.is_some() {
            hi = alpha;
        } else {
            lo = alpha;
        }
        if let Some(bound) = probe.lower_bound {
            if report.lower_bound.is_none_or(|b| bound > b) {
                report.lower_bound = Some(bound);
                supporting = Some(report.probes.len());
            }
        }
        report.probes.push(probe);
    }
    let mut alpha = lo;
    for _ in 0..cfg.descent_probes {
        if report.lower_bound.is_some() {
            break;
        }
        alpha /= ratio;
        let probe = run_both_sides(instance, alpha, cfg);
        report.best_cut = FoundCut::better(report.best_cut.take(), probe.best_cut.clone());
        if let Some(bound) = probe.lower_bound {
            report.lower_bound = Some(bound);
            supporting = Some(report.probes.len());
        }
        report.probes.push(probe);
    }
    for (k, probe) in report.probes.iter_mut().enumerate() {
        if Some(k) != supporting {
            for run in &mut probe.runs {
                run.certificates.clear();
            }
        }
    }
    report.ratio = match (&report.best_cut, report.lower_bound) {
        (Some(cut), Some(lb)) if lb > 0.0 => Some(cut.sparsity / lb),
        _ => None,
    };
    report
}
