//! Well-spread vectors. A heavy ball of radius `3/ω̂` is rescaled to the unit
//! ball and projected on random directions until the two ends of the
//! projection are well separated. Flow is routed from the low-potential end
//! to the high-potential end; when it is neither small nor enough to pay
//! for `αK`, a violated triangle path certifies instead.

use std::cmp::Ordering;

use nalgebra::DVector;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{
    cut_outcome, find_violated_path, heaviest_ball, ln_clamped, route, CaseTag, Diagnostics,
    DualCertificate, HatFamily, OracleConfig, OracleOutcome, TriangleWeight,
};
use crate::error::OracleError;
use crate::flownet::{FlowAssignment, FlowInstance};
use crate::hypergraph::VertexSet;
use crate::instance::SolverInstance;
use crate::sdpcore::{mat_k, spectral_norm, GramState, TriangleId};

/// The heavy ball and its rescaling `v̂ = (ω̂/3)(v − v_{i0})`.
#[derive(Debug, Clone)]
pub struct Preprocessed {
    pub center: usize,
    pub set: VertexSet,
    /// `(ω̂/3)²`, the factor from squared distances to rescaled ones.
    pub scale_sq: f64,
}

impl Preprocessed {
    pub fn hat_sq(&self, gram: &GramState, i: usize, j: usize) -> f64 {
        self.scale_sq * gram.sq_dist(i, j)
    }

    /// `⟨v̂_i, u⟩`.
    pub fn projection(&self, gram: &GramState, i: usize, u: &DVector<f64>) -> f64 {
        let diff = gram.vectors().row(i) - gram.vectors().row(self.center);
        self.scale_sq.sqrt() * diff.dot(&u.transpose())
    }
}

pub fn preprocess_wellspread(
    gram: &GramState,
    instance: &SolverInstance,
) -> Result<Preprocessed, OracleError> {
    let omega_hat = instance.omega_hat();
    let (center, weight) = heaviest_ball(gram, instance.omega(), 3.0 / omega_hat);
    if weight < omega_hat / 2.0 {
        return Err(OracleError::InconsistentState(format!(
            "no ball of radius 3/w holds half the weight (best {weight})"
        )));
    }
    Ok(Preprocessed {
        center,
        set: super::ball(gram, center, 3.0 / omega_hat),
        scale_sq: (omega_hat / 3.0).powi(2),
    })
}

/// Two well separated, potential-ordered ends of a projection.
#[derive(Debug, Clone)]
pub struct DirectionSplit {
    /// Low-potential side, the flow sources.
    pub left: VertexSet,
    /// High-potential side, the flow sinks.
    pub right: VertexSet,
    /// Direction along which `right` lies beyond `left`.
    pub direction: DVector<f64>,
    pub flipped: bool,
}

/// Splits the rescaled ball along `u`. `None` when the two ends holding
/// weight `cω̂` each are closer than `σ/√ω̂` in projection.
pub fn direction_split(
    pre: &Preprocessed,
    gram: &GramState,
    instance: &SolverInstance,
    cfg: &OracleConfig,
    u: &DVector<f64>,
) -> Option<DirectionSplit> {
    let omega = instance.omega();
    let omega_hat = instance.omega_hat();
    let need = cfg.c * omega_hat;

    let mut order: Vec<(usize, f64)> = pre
        .set
        .iter()
        .map(|i| (i, pre.projection(gram, i, u)))
        .collect();
    order.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));

    let prefix_end = prefix_len(order.iter().map(|&(i, _)| omega[i]), need)?;
    let suffix_len = prefix_len(order.iter().rev().map(|&(i, _)| omega[i]), need)?;
    if prefix_end + suffix_len > order.len() {
        return None;
    }
    let l0 = &order[..prefix_end];
    let r0 = &order[order.len() - suffix_len..];
    if l0[l0.len() - 1].1 + cfg.sigma / omega_hat.sqrt() > r0[0].1 {
        return None;
    }

    let r = weighted_median(l0.iter().map(|&(i, _)| (gram.potential(i), omega[i])));
    let n = gram.n();
    let pick = |part: &[(usize, f64)], keep: &dyn Fn(f64) -> bool| {
        VertexSet::from_indices(
            n,
            part.iter()
                .map(|&(i, _)| i)
                .filter(|&i| keep(gram.potential(i))),
        )
    };
    let l_minus = pick(l0, &|p| p <= r);
    let l_plus = pick(l0, &|p| p >= r);
    let r_plus = pick(r0, &|p| p >= r);
    let r_minus = pick(r0, &|p| p < r);

    if instance.weight_of(&r_plus) >= instance.weight_of(&r_minus) {
        Some(DirectionSplit {
            left: l_minus,
            right: r_plus,
            direction: u.clone(),
            flipped: false,
        })
    } else {
        Some(DirectionSplit {
            left: r_minus,
            right: l_plus,
            direction: -u,
            flipped: true,
        })
    }
}

/// Length of the shortest prefix whose weight reaches `need`.
fn prefix_len(weights: impl Iterator<Item = f64>, need: f64) -> Option<usize> {
    let mut acc = 0.0;
    for (k, w) in weights.enumerate() {
        acc += w;
        if acc >= need {
            return Some(k + 1);
        }
    }
    None
}

/// Smallest value `r` with at least half the weight at or below it.
fn weighted_median(items: impl Iterator<Item = (f64, f64)>) -> f64 {
    let mut items: Vec<(f64, f64)> = items.collect();
    items.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
    let total: f64 = items.iter().map(|x| x.1).sum();
    let mut acc = 0.0;
    for &(v, w) in &items {
        acc += w;
        if acc >= total / 2.0 {
            return v;
        }
    }
    items.last().map_or(0.0, |x| x.0)
}

fn random_direction(dim: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    loop {
        let u = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = u.norm();
        if norm > 1e-12 {
            return u / norm;
        }
    }
}

pub fn case2(
    alpha: f64,
    gram: &GramState,
    instance: &SolverInstance,
    cfg: &OracleConfig,
    rng: &mut ChaCha8Rng,
) -> Result<OracleOutcome, OracleError> {
    let omega = instance.omega();
    let omega_hat = instance.omega_hat();
    let ln_w = ln_clamped(omega_hat);
    let beta = cfg.beta();
    let pre = preprocess_wellspread(gram, instance)?;
    let n_dirs = cfg.n_dirs(instance.n());

    let members = pre.set.to_vec();
    let sq: Vec<Vec<f64>> = members
        .iter()
        .map(|&a| members.iter().map(|&b| pre.hat_sq(gram, a, b)).collect())
        .collect();
    let short_pair = cfg.eta_stretch() / ln_w.sqrt();

    let mut split_found = false;
    for tried in 1..=n_dirs {
        let u = random_direction(gram.dim(), rng);
        let Some(split) = direction_split(&pre, gram, instance, cfg, &u) else {
            continue;
        };
        split_found = true;

        let cap = |i: usize| beta * omega_hat * ln_w.sqrt() * omega[i] * alpha;
        let sources: Vec<(usize, f64)> = split.left.iter().map(|i| (i, cap(i))).collect();
        let sinks: Vec<(usize, f64)> = split.right.iter().map(|j| (j, cap(j))).collect();
        let mut flow = FlowInstance::new(instance, &sources, &sinks);
        let result = flow.solve();
        let mut diagnostics = Diagnostics {
            center: Some(pre.center),
            flow_value: Some(result.value),
            reversed: split.flipped,
            directions_tried: tried,
            ..Diagnostics::default()
        };

        if result.value < cfg.c * beta * omega_hat.powi(2) / 4.0 * ln_w.sqrt() * alpha {
            return cut_outcome(
                &result.reachable,
                alpha,
                instance,
                cfg,
                CaseTag::Case2A,
                diagnostics,
            );
        }

        let routed = route(alpha, &flow, &split.left, &split.right, gram, instance)?;
        diagnostics.dropped_cycle_mass = routed.dropped_cycle_mass;
        if routed.demand_form >= alpha {
            return Ok(OracleOutcome::Dual {
                certificate: routed.certificate,
                case: CaseTag::Case2B,
                diagnostics,
            });
        }

        let pairs = routed.certificate.flow.pair_totals();
        let routed_total: f64 = pairs.values().sum();
        if routed_total > 0.0 {
            let short: f64 = pairs
                .iter()
                .filter(|(&(a, b), _)| pre.hat_sq(gram, a, b) <= short_pair)
                .map(|(_, v)| v)
                .sum();
            diagnostics.filtered_fraction = Some(short / routed_total);
        }

        let family = HatFamily {
            members: members.clone(),
            sq: sq.clone(),
            proj: Some(
                members
                    .iter()
                    .map(|&i| pre.projection(gram, i, &split.direction))
                    .collect(),
            ),
        };
        let stretch = Some((cfg.sigma / omega_hat.sqrt(), short_pair));
        if let Some(path) = find_violated_path(&family, cfg.s, stretch, cfg.path_cap(omega_hat)) {
            let certificate = path_certificate(alpha, &path, gram, instance, cfg);
            return Ok(OracleOutcome::Dual {
                certificate,
                case: CaseTag::Case2C,
                diagnostics,
            });
        }
    }
    if split_found {
        Err(OracleError::PathSearchExhausted(n_dirs))
    } else {
        Err(OracleError::DirectionSearchExhausted(n_dirs))
    }
}

/// `f_p = ω̂²α/(9s)` on each triangle of the path, `z = α`, `F = 0`.
fn path_certificate(
    alpha: f64,
    path: &[usize],
    gram: &GramState,
    instance: &SolverInstance,
    cfg: &OracleConfig,
) -> DualCertificate {
    let weight = instance.omega_hat().powi(2) * alpha / (9.0 * cfg.s);
    let triangles = (1..path.len() - 1)
        .map(|j| TriangleWeight {
            triangle: TriangleId::new(path[0], path[j + 1], path[j]).expect("paths are simple"),
            weight,
        })
        .collect();
    let mut certificate = DualCertificate {
        side: gram.side(),
        z: alpha,
        triangles,
        flow: FlowAssignment::default(),
        width: 0.0,
    };
    debug_assert_eq!(mat_k(instance.omega()).order(), gram.n());
    certificate.width = spectral_norm(&certificate.residual(instance.omega()));
    certificate
}
