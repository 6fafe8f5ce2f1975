use hyperspars::driver::{
    binary_search, run_algorithm1, run_both_sides, verify_run, RunOutcome, SidePolicy, SolverConfig,
};
use hyperspars::hypergraph::{parse_dhg, rational_to_f64};
use hyperspars::oracle::CaseTag;
use hyperspars::reference::{brute_force_sparsest, generate, planted_side, GeneratorSpec, Model};
use hyperspars::sdpcore::Side;
use hyperspars::SolverInstance;

/// A small instance on which both sides certify at the default constants.
fn certifying_instance() -> SolverInstance {
    let spec = GeneratorSpec {
        kappa: 3,
        ..GeneratorSpec::uniform(4, 8, 89)
    };
    SolverInstance::from_sparsity(&generate(&spec).unwrap())
}

#[test]
fn search_is_sound_and_within_tolerance_on_small_instances() {
    let cfg = SolverConfig {
        t_cap: 500,
        ..SolverConfig::default()
    };
    for seed in 0..12u64 {
        let n = 3 + (seed % 4) as usize;
        let model = if seed % 2 == 0 {
            Model::ExpanderLike
        } else {
            Model::UniformRandom
        };
        let h = generate(&GeneratorSpec {
            model,
            ..GeneratorSpec::uniform(n, n + 2, seed)
        })
        .unwrap();
        let exact = rational_to_f64(&brute_force_sparsest(&h).unwrap().value);
        let report = binary_search(&SolverInstance::from_sparsity(&h), &cfg);
        let cut = report.best_cut.expect("a cut is always reported");
        let recomputed = rational_to_f64(&h.sparsity(&cut.to_set(n)).unwrap());
        assert!((recomputed - cut.sparsity).abs() <= 1e-12 * recomputed.max(1.0));
        assert!(
            cut.sparsity >= exact - 1e-12,
            "seed {seed}: approximation beat the optimum"
        );
        if exact > 0.0 {
            assert!(
                cut.sparsity / exact <= 10.0,
                "seed {seed}: ratio {}",
                cut.sparsity / exact
            );
        }
        if let Some(lb) = report.lower_bound {
            assert!(exact >= lb, "seed {seed}: unsound bound {lb} > {exact}");
        }
    }
}

#[test]
fn certified_runs_replay_cleanly() {
    let inst = certifying_instance();
    let cfg = SolverConfig::default();
    let report = binary_search(&inst, &cfg);
    let lb = report.lower_bound.expect("this instance certifies");
    let supporting: Vec<_> = report
        .probes
        .iter()
        .flat_map(|p| &p.runs)
        .filter_map(|r| r.certified_run().filter(|c| !c.certificates.is_empty()))
        .collect();
    assert_eq!(supporting.len(), 2);
    for run in &supporting {
        assert_eq!(run.alpha / 2.0, lb);
        let v = verify_run(&inst, run, &cfg);
        assert!(v.passed(cfg.certify_tolerance), "{:?}", v.failure);
    }
    let sides: Vec<Side> = supporting.iter().map(|r| r.side).collect();
    assert!(sides.contains(&Side::ZeroIn) && sides.contains(&Side::ZeroOut));
}

#[test]
fn certified_runs_only_saw_duals() {
    let inst = certifying_instance();
    let cfg = SolverConfig::default();
    let alpha = binary_search(&inst, &cfg).lower_bound.unwrap() * 2.0;
    let run = run_algorithm1(&inst, alpha, Side::ZeroIn, &cfg);
    assert!(run.certified());
    assert_eq!(run.certificates.len(), run.t_run);
    assert!(run.transcript.iter().all(|r| matches!(
        r.case,
        Some(CaseTag::Case1B | CaseTag::Case2B | CaseTag::Case2C)
    )));
    assert!(run.min_eigenvalue.unwrap() >= -cfg.certify_tolerance);
}

#[test]
fn search_is_deterministic() {
    let h = generate(&GeneratorSpec::uniform(6, 9, 3)).unwrap();
    let inst = SolverInstance::from_sparsity(&h);
    let cfg = SolverConfig {
        t_cap: 200,
        ..SolverConfig::default()
    };
    assert_eq!(binary_search(&inst, &cfg), binary_search(&inst, &cfg));
}

#[test]
fn zero_out_side_finds_a_cut_avoiding_vertex_zero() {
    // {b, c} is the only cheap set and it excludes a.
    let h = parse_dhg(
        "dhg 4 8\nv a 1\nv b 1\nv c 1\nv d 1\n\
         e 4 T a H b\ne 4 T b H c\ne 4 T c H b\ne 4 T d H a\ne 4 T a H d\ne 4 T c H d\ne 4 T d H c\ne 1/8 T b H a\n",
    )
    .unwrap();
    let best = brute_force_sparsest(&h).unwrap();
    assert!(!best.subset.contains(0));
    let inst = SolverInstance::from_sparsity(&h);
    let alpha = 2.0 * rational_to_f64(&best.value);
    let cfg = SolverConfig {
        side_policy: SidePolicy::ZeroOut,
        ..SolverConfig::default()
    };
    let probe = run_both_sides(&inst, alpha, &cfg);
    assert_eq!(probe.runs.len(), 1);
    let RunOutcome::CutFound { cut } = &probe.runs[0].outcome else {
        panic!("expected a cut, got {:?}", probe.runs[0].outcome);
    };
    assert!(!cut.members.contains(&0));
}

#[test]
fn planted_cut_is_recovered() {
    let spec = GeneratorSpec {
        model: Model::PlantedCut {
            balance: 0.5,
            inside_w: 8,
            crossing_w: 1,
        },
        ..GeneratorSpec::uniform(8, 24, 11)
    };
    let h = generate(&spec).unwrap();
    let planted = planted_side(&spec).unwrap();
    let planted_value = rational_to_f64(&h.sparsity(&planted).unwrap());
    let report = binary_search(
        &SolverInstance::from_sparsity(&h),
        &SolverConfig {
            t_cap: 300,
            ..SolverConfig::default()
        },
    );
    assert!(report.best_cut.unwrap().sparsity <= planted_value * 10.0);
}
