//! Commands behind the `hyperspars` binary. Each returns its exit code and
//! writes to the given sink, so they can be driven from tests.

use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use hyperspars::driver::{
    binary_search, run_both_sides, verify_run, CertifiedRun, IterationRecord, ProbeReport,
    RunOutcome, SidePolicy, SolverConfig,
};
use hyperspars::hypergraph::{
    format_rational, parse_dhg, rational_to_f64, reduce_to_digraph, to_dhg, DirectedHypergraph,
    VertexSet,
};
use hyperspars::oracle::OracleConfig;
use hyperspars::reference::{
    brute_force_expansion, brute_force_sparsest, generate, GeneratorSpec, Model,
};
use hyperspars::sdpcore::Side;
use hyperspars::{SolverInstance, WeightMode};

/// Environment variable consulted when `--seed` is absent.
pub const SEED_ENV: &str = "HYPERSPARS_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NO_CUT: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;

pub fn read_input(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut text = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut text)?;
        Ok(text)
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

pub fn load_graph(path: &Path) -> Result<DirectedHypergraph> {
    let text = read_input(path)?;
    parse_dhg(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn solver_instance(graph: &DirectedHypergraph, mode: WeightMode) -> Result<SolverInstance> {
    Ok(match mode {
        WeightMode::Sparsity => SolverInstance::from_sparsity(graph),
        WeightMode::Expansion => SolverInstance::from_expansion(graph)?,
    })
}

/// Reads a partial `OracleConfig` as JSON; missing fields keep defaults.
pub fn load_constants(path: &Path) -> Result<OracleConfig> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing constants in {}", path.display()))
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct InstanceSummary {
    pub n: usize,
    pub m: usize,
    pub names: Vec<String>,
    pub mode: WeightMode,
    pub kappa: f64,
    pub omega_hat: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CutSummary {
    pub members: Vec<String>,
    pub indices: Vec<usize>,
    pub sparsity: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ExpansionSummary {
    /// `φ` of the lighter side of the reported cut, in weighted-degree units.
    pub phi: Option<f64>,
    /// Certified lower bound on `φ_H`.
    pub lower_bound: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TranscriptEntry {
    pub alpha: f64,
    pub side: Side,
    pub outcome: RunOutcome,
    pub t_theory: u64,
    pub t_run: usize,
    pub rho: f64,
    pub eta: f64,
    pub min_eigenvalue: Option<f64>,
    pub iterations: Vec<IterationRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Report {
    pub instance: InstanceSummary,
    pub config: SolverConfig,
    /// `cut-found` or `no-cut`.
    pub outcome: String,
    pub cut: Option<CutSummary>,
    pub sparsity: Option<f64>,
    pub lower_bound: Option<f64>,
    pub ratio: Option<f64>,
    pub expansion: Option<ExpansionSummary>,
    pub transcript: Vec<TranscriptEntry>,
    pub certificates: Vec<CertifiedRun>,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub mode: WeightMode,
    pub alpha: Option<f64>,
    pub no_search: bool,
    pub seed: u64,
    pub t_cap: Option<usize>,
    pub side: SidePolicy,
    pub constants: Option<OracleConfig>,
}

pub fn solve_config(opts: &SolveOptions) -> SolverConfig {
    let mut cfg = SolverConfig {
        side_policy: opts.side,
        oracle: opts.constants.clone().unwrap_or_default(),
        ..SolverConfig::default()
    };
    cfg.oracle.rng_seed = opts.seed;
    if let Some(t) = opts.t_cap {
        cfg.t_cap = t;
    }
    cfg
}

fn transcript(probes: &[ProbeReport]) -> (Vec<TranscriptEntry>, Vec<CertifiedRun>) {
    let mut entries = Vec::new();
    let mut certificates = Vec::new();
    for probe in probes {
        for run in &probe.runs {
            entries.push(TranscriptEntry {
                alpha: run.alpha,
                side: run.side,
                outcome: run.outcome.clone(),
                t_theory: run.t_theory,
                t_run: run.t_run,
                rho: run.rho,
                eta: run.eta,
                min_eigenvalue: run.min_eigenvalue,
                iterations: run.transcript.clone(),
            });
            if !run.certificates.is_empty() {
                certificates.extend(run.certified_run());
            }
        }
    }
    (entries, certificates)
}

/// Runs the solver and builds the report.
pub fn solve(graph: &DirectedHypergraph, opts: &SolveOptions) -> Result<Report> {
    let instance = solver_instance(graph, opts.mode)?;
    let cfg = solve_config(opts);
    let (best_cut, lower_bound, probes) = if opts.no_search {
        let alpha = opts
            .alpha
            .ok_or_else(|| anyhow!("--no-search needs --alpha"))?;
        if alpha.is_nan() || alpha <= 0.0 {
            bail!("--alpha must be positive");
        }
        let probe = run_both_sides(&instance, alpha, &cfg);
        (probe.best_cut.clone(), probe.lower_bound, vec![probe])
    } else {
        let mut search_cfg = cfg.clone();
        if let Some(alpha) = opts.alpha {
            search_cfg.alpha_hi = Some(alpha);
        }
        let report = binary_search(&instance, &search_cfg);
        (report.best_cut, report.lower_bound, report.probes)
    };
    let (transcript, certificates) = transcript(&probes);

    let cut = best_cut.as_ref().map(|c| CutSummary {
        members: c
            .members
            .iter()
            .map(|&i| graph.names()[i].clone())
            .collect(),
        indices: c.members.clone(),
        sparsity: c.sparsity,
    });
    let ratio = match (&best_cut, lower_bound) {
        (Some(c), Some(lb)) if lb > 0.0 => Some(c.sparsity / lb),
        _ => None,
    };
    let expansion = (opts.mode == WeightMode::Expansion)
        .then(|| expansion_summary(graph, &instance, &best_cut, lower_bound));

    Ok(Report {
        instance: InstanceSummary {
            n: instance.n(),
            m: instance.m(),
            names: graph.names().to_vec(),
            mode: opts.mode,
            kappa: instance.kappa(),
            omega_hat: instance.omega_hat(),
        },
        config: cfg,
        outcome: if best_cut.is_some() {
            "cut-found"
        } else {
            "no-cut"
        }
        .into(),
        sparsity: best_cut.as_ref().map(|c| c.sparsity),
        cut,
        lower_bound,
        ratio,
        expansion,
        transcript,
        certificates,
    })
}

/// The lighter side `S` of a cut satisfies `φ(S) ≥ scale·L·ω̂/2` for any
/// sparsity lower bound `L` in solver units, since `ω(S̄) ≥ ω̂/2`.
fn expansion_summary(
    graph: &DirectedHypergraph,
    instance: &SolverInstance,
    cut: &Option<hyperspars::FoundCut>,
    lower_bound: Option<f64>,
) -> ExpansionSummary {
    let phi = cut.as_ref().and_then(|c| {
        let set = c.to_set(graph.n());
        let lighter = if instance.weight_of(&set) <= instance.omega_hat() / 2.0 {
            set
        } else {
            set.complement()
        };
        graph
            .expansion(&lighter)
            .ok()
            .map(|e| rational_to_f64(&e.phi))
    });
    ExpansionSummary {
        phi,
        lower_bound: lower_bound.map(|l| instance.scale() * l * instance.omega_hat() / 2.0),
    }
}

pub fn cmd_solve(
    input: &Path,
    opts: &SolveOptions,
    json: bool,
    out: &mut impl Write,
) -> Result<i32> {
    let graph = load_graph(input)?;
    let report = solve(&graph, opts)?;
    if json {
        writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
    } else {
        write_solve_text(&report, out)?;
    }
    Ok(if report.cut.is_some() {
        EXIT_OK
    } else {
        EXIT_NO_CUT
    })
}

fn write_solve_text(report: &Report, out: &mut impl Write) -> Result<()> {
    let fmt = |v: Option<f64>| v.map_or_else(|| "none".to_string(), |x| format!("{x:.6}"));
    match &report.cut {
        Some(cut) => writeln!(out, "cut: {{{}}}", cut.members.join(", "))?,
        None => writeln!(out, "cut: none")?,
    }
    writeln!(out, "sparsity: {}", fmt(report.sparsity))?;
    writeln!(out, "lower bound: {}", fmt(report.lower_bound))?;
    writeln!(out, "ratio: {}", fmt(report.ratio))?;
    if let Some(e) = &report.expansion {
        writeln!(out, "expansion: {}", fmt(e.phi))?;
        writeln!(out, "expansion lower bound: {}", fmt(e.lower_bound))?;
    }
    for entry in &report.transcript {
        let outcome = match &entry.outcome {
            RunOutcome::CutFound { cut } => format!("cut {:.6}", cut.sparsity),
            RunOutcome::LowerBoundCertified { bound } => format!("certified {bound:.6}"),
            RunOutcome::Aborted { reason } => format!("aborted ({reason})"),
        };
        let side = match entry.side {
            Side::ZeroIn => "in ",
            Side::ZeroOut => "out",
        };
        writeln!(
            out,
            "  alpha {:.6} side {side} iterations {:>5}: {outcome}",
            entry.alpha,
            entry.iterations.len()
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ExactReport {
    pub sparsity: String,
    pub sparsity_value: f64,
    pub sparsity_cut: Vec<String>,
    pub expansion: Option<String>,
    pub expansion_value: Option<f64>,
    pub expansion_cut: Option<Vec<String>>,
    pub compare_ratio: Option<f64>,
}

pub fn exact(graph: &DirectedHypergraph, compare: Option<&Report>) -> Result<ExactReport> {
    let names = |s: &VertexSet| {
        s.iter()
            .map(|i| graph.names()[i].clone())
            .collect::<Vec<_>>()
    };
    let best = brute_force_sparsest(graph)?;
    let expansion = brute_force_expansion(graph).ok();
    let value = rational_to_f64(&best.value);
    let compare_ratio = compare.and_then(|r| r.sparsity).map(|s| {
        if value > 0.0 {
            s / value
        } else if s == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    });
    Ok(ExactReport {
        sparsity: format_rational(&best.value),
        sparsity_value: value,
        sparsity_cut: names(&best.subset),
        expansion: expansion.as_ref().map(|e| format_rational(&e.value)),
        expansion_value: expansion.as_ref().map(|e| rational_to_f64(&e.value)),
        expansion_cut: expansion.as_ref().map(|e| names(&e.subset)),
        compare_ratio,
    })
}

pub fn cmd_exact(
    input: &Path,
    compare: Option<&Path>,
    json: bool,
    out: &mut impl Write,
) -> Result<i32> {
    let graph = load_graph(input)?;
    let compare = compare
        .map(|p| -> Result<Report> { Ok(serde_json::from_str(&read_input(p)?)?) })
        .transpose()?;
    let report = exact(&graph, compare.as_ref())?;
    if json {
        writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
    } else {
        writeln!(
            out,
            "sparsity: {} {{{}}}",
            report.sparsity,
            report.sparsity_cut.join(", ")
        )?;
        match (&report.expansion, &report.expansion_cut) {
            (Some(v), Some(s)) => writeln!(out, "expansion: {v} {{{}}}", s.join(", "))?,
            _ => writeln!(out, "expansion: undefined")?,
        }
        if let Some(r) = report.compare_ratio {
            writeln!(out, "ratio: {r:.6}")?;
        }
    }
    Ok(EXIT_OK)
}

pub fn cmd_gen(spec: &GeneratorSpec, out: &mut impl Write) -> Result<i32> {
    let graph = generate(spec)?;
    write!(out, "{}", to_dhg(&graph))?;
    Ok(EXIT_OK)
}

pub fn cmd_reduce(input: &Path, out: &mut impl Write) -> Result<i32> {
    let graph = load_graph(input)?;
    let reduced = reduce_to_digraph(&graph);
    writeln!(
        out,
        "# {} vertices, {} arcs, big weight {}",
        reduced.vertex_count(),
        reduced.arcs().len(),
        format_rational(reduced.big_weight())
    )?;
    for arc in reduced.arcs() {
        writeln!(
            out,
            "a {} {} {}",
            reduced.vertex_name(arc.from),
            reduced.vertex_name(arc.to),
            format_rational(&arc.weight)
        )?;
    }
    Ok(EXIT_OK)
}

/// First failure found while re-verifying a report.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckError {
    pub run: usize,
    pub iteration: usize,
    pub bullet: String,
    pub detail: String,
}

impl std::fmt::Display for CheckError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "run {} iteration {}: {} ({})",
            self.run, self.iteration, self.bullet, self.detail
        )
    }
}

/// Re-verifies every stored certificate against the input and checks that
/// the claimed lower bound is backed by runs on both sides at `α = 2L`.
pub fn check_report(graph: &DirectedHypergraph, report: &Report) -> Result<Result<(), CheckError>> {
    let instance = solver_instance(graph, report.instance.mode)?;
    if instance.n() != report.instance.n || instance.m() != report.instance.m {
        bail!("report does not describe this instance");
    }
    for (k, run) in report.certificates.iter().enumerate() {
        let v = verify_run(&instance, run, &report.config);
        if let Some((iteration, failure)) = v.failure {
            return Ok(Err(CheckError {
                run: k,
                iteration,
                bullet: failure.bullet.to_string(),
                detail: failure.detail,
            }));
        }
        let lambda = v.min_eigenvalue.unwrap_or(f64::NEG_INFINITY);
        if lambda < -report.config.certify_tolerance {
            return Ok(Err(CheckError {
                run: k,
                iteration: run.certificates.len(),
                bullet: "lambda_min(Z + (alpha/2) K) >= 0".into(),
                detail: format!("lambda_min = {lambda:e}"),
            }));
        }
    }
    if let Some(lb) = report.lower_bound {
        let backed = |side: Side| {
            report
                .certificates
                .iter()
                .any(|r| r.side == side && r.alpha / 2.0 >= lb && !r.certificates.is_empty())
        };
        if !(backed(Side::ZeroIn) && backed(Side::ZeroOut)) {
            return Ok(Err(CheckError {
                run: report.certificates.len(),
                iteration: 0,
                bullet: "lower bound backed on both sides".into(),
                detail: format!("no certified pair of runs supports {lb}"),
            }));
        }
    }
    Ok(Ok(()))
}

pub fn cmd_check_cert(report_path: &Path, input: &Path, out: &mut impl Write) -> Result<i32> {
    let report: Report = serde_json::from_str(&read_input(report_path)?)
        .with_context(|| format!("parsing report {}", report_path.display()))?;
    let graph = load_graph(input)?;
    match check_report(&graph, &report)? {
        Ok(()) => {
            writeln!(
                out,
                "ok: {} certified runs verified",
                report.certificates.len()
            )?;
            Ok(EXIT_OK)
        }
        Err(e) => {
            writeln!(out, "failed: {e}")?;
            Ok(EXIT_CHECK_FAILED)
        }
    }
}

/// Generator model names accepted on the command line.
pub fn parse_model(name: &str, balance: f64, inside_w: u64, crossing_w: u64) -> Result<Model> {
    Ok(match name {
        "uniform" => Model::UniformRandom,
        "planted" => Model::PlantedCut {
            balance,
            inside_w,
            crossing_w,
        },
        "expander" => Model::ExpanderLike,
        other => bail!("unknown model {other:?}; expected uniform, planted or expander"),
    })
}
