//! Concentrated vectors: a small ball around `v_{i0}` holds a quarter of the
//! weight. Flow is routed between the ball and its complement, weighted so
//! that the side with the smaller potential sends.

use super::{ball, cut_outcome, route, CaseTag, Diagnostics, OracleConfig, OracleOutcome};
use crate::error::OracleError;
use crate::flownet::FlowInstance;
use crate::hypergraph::VertexSet;
use crate::instance::SolverInstance;
use crate::sdpcore::GramState;

pub fn case1(
    alpha: f64,
    gram: &GramState,
    instance: &SolverInstance,
    cfg: &OracleConfig,
    center: usize,
) -> Result<OracleOutcome, OracleError> {
    let omega = instance.omega();
    let omega_hat = instance.omega_hat();
    let left = ball(gram, center, 1.0 / (8f64.sqrt() * omega_hat));
    let right = left.complement();
    if right.is_empty() {
        return Err(OracleError::InconsistentState(
            "the concentrated ball holds every vertex although K . X = 1".into(),
        ));
    }
    let gamma = instance.weight_of(&right) / instance.weight_of(&left);

    let q_left: f64 = left
        .iter()
        .map(|i| gamma * omega[i] * gram.potential(i))
        .sum();
    let q_right: f64 = right.iter().map(|j| omega[j] * gram.potential(j)).sum();
    let reversed = q_left > q_right;

    let left_caps: Vec<(usize, f64)> = left
        .iter()
        .map(|i| (i, cfg.cap_c1 * gamma * omega_hat * omega[i] * alpha))
        .collect();
    let right_caps: Vec<(usize, f64)> = right
        .iter()
        .map(|j| (j, cfg.cap_c1 * omega_hat * omega[j] * alpha))
        .collect();
    let (sources, sinks, source_set, sink_set): (_, _, &VertexSet, &VertexSet) = if reversed {
        (right_caps, left_caps, &right, &left)
    } else {
        (left_caps, right_caps, &left, &right)
    };

    let mut flow = FlowInstance::new(instance, &sources, &sinks);
    let result = flow.solve();
    let mut diagnostics = Diagnostics {
        center: Some(center),
        flow_value: Some(result.value),
        reversed,
        ..Diagnostics::default()
    };

    if result.value < result.source_capacity * (1.0 - 1e-9) {
        return cut_outcome(
            &result.reachable,
            alpha,
            instance,
            cfg,
            CaseTag::Case1A,
            diagnostics,
        );
    }

    let routed = route(alpha, &flow, source_set, sink_set, gram, instance)?;
    diagnostics.dropped_cycle_mass = routed.dropped_cycle_mass;
    Ok(OracleOutcome::Dual {
        certificate: routed.certificate,
        case: CaseTag::Case1B,
        diagnostics,
    })
}
