use synchro_core::models::{Biped, BipedParams, Brusselator, BrusselatorParams};
use synchro_core::reach::PointOrbit;
use synchro_core::sync::DecompositionPlan;
use synchro_core::{
    decompose_periods, expansion_factor, proc1, reach_tube, HybridSystem, ProductBall, RadiusRule,
    SectionParallelogram, Sequential, StateVector, TubeOptions, VerificationConfig,
};

fn brusselator_sections() -> (SectionParallelogram, SectionParallelogram) {
    let s1 = SectionParallelogram::from_vertices(
        [[0.621884, 3.778615], [0.621888, 3.778615], [0.621906, 3.77865], [0.621903, 3.77865]],
        0,
        2,
        1,
        0,
    )
    .unwrap();
    let s2 = SectionParallelogram::from_vertices(
        [[0.485926, 4.077926], [0.485929, 4.077926], [0.485946, 4.077997], [0.485943, 4.077997]],
        0,
        2,
        1,
        0,
    )
    .unwrap();
    (s1, s2)
}

fn ball(c: [f64; 4], r: f64) -> ProductBall {
    ProductBall::shared(StateVector::new(c[..2].to_vec()).unwrap(), StateVector::new(c[2..].to_vec()).unwrap(), r)
        .unwrap()
}

#[test]
fn single_ball_lands_after_five_periods() {
    let sys = Brusselator::reduced(BrusselatorParams::default());
    let (s1, s2) = brusselator_sections();
    let cfg = VerificationConfig::new(2e-4, 34564, 5, 1e-4, 3.5e-8).unwrap();
    let r = proc1(&sys, &ball([0.622, 3.779, 0.486, 4.078], 3.5e-8), &s1, &s2, &cfg, &TubeOptions::default()).unwrap();
    assert!(r.contained);
    let c = r.image.joint_center(&sys);
    for (a, b) in c.iter().zip([0.62190185, 3.77864437, 0.48594267, 4.07798666]) {
        assert!((a - b).abs() <= 1e-4);
    }
    assert!((0.75e-6..=3e-6).contains(&r.image.radius()));
}

#[test]
fn brusselator_expansion_is_moderate() {
    let sys = Brusselator::reduced(BrusselatorParams::default());
    let cfg = VerificationConfig::new(2e-4, 34564, 1, 1e-4, 3.5e-8).unwrap();
    let trace = reach_tube(&sys, &ball([0.622, 3.779, 0.486, 4.078], 3.5e-8), 34564, &cfg, &TubeOptions::default()).unwrap();
    let e = expansion_factor(&trace, 34564).unwrap();
    assert!((1.6..=2.7).contains(&e), "{e}");
}

#[test]
fn compounded_radius_never_undercuts_variational() {
    let sys = Brusselator::reduced(BrusselatorParams::default());
    let cfg = VerificationConfig::new(2e-4, 3000, 1, 1e-3, 1e-7).unwrap();
    let b = ball([0.622, 3.779, 0.486, 4.078], 1e-7);
    let run = |rule| {
        reach_tube(&sys, &b, 12_000, &cfg, &TubeOptions { radius_rule: rule, record_stride: 500, ..TubeOptions::default() })
            .unwrap()
    };
    let (v, c) = (run(RadiusRule::Variational), run(RadiusRule::Compounded));
    for (a, b) in v.samples.iter().zip(&c.samples) {
        assert_eq!(a.step, b.step);
        assert!(b.ball.radius() >= a.ball.radius() * (1.0 - 1e-12), "step {}", a.step);
    }
}

#[test]
fn biped_walks_with_four_strikes_per_period() {
    let sys = Biped::new(BipedParams::default());
    let x0 = [0.067940, -0.083172, 0.27198, -0.242729];
    let mut orbit = PointOrbit::new(&sys, &x0, 2e-5);
    let mut counts = Vec::new();
    for k in 1..=3u64 {
        let before = orbit.jumps();
        orbit.advance_to(k * 776_440).unwrap();
        counts.push(orbit.jumps() - before);
    }
    assert_eq!(counts, [4, 4, 4]);
    // the gait is periodic: after a full period the state is back near x0
    let gap = orbit.state().iter().zip(&x0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(gap < 1e-2, "{gap}");
}

#[test]
fn tube_events_reset_onto_the_guard() {
    let sys = Biped::new(BipedParams::default());
    let jump = sys.jump().unwrap();
    let cfg = VerificationConfig::new(2e-5, 776_440, 1, 0.25, 1e-8).unwrap();
    let opts = TubeOptions { radius_rule: RadiusRule::Variational, ..TubeOptions::default() };
    let trace = reach_tube(&sys, &ball([0.067940, -0.083172, 0.27198, -0.242729], 1e-8), 776_440, &cfg, &opts).unwrap();
    assert_eq!(trace.events.len(), 4);
    for e in &trace.events {
        assert_eq!(jump.level(&e.post_state.joint_center(&sys)), 0.0);
        assert!(e.crossing_bracket.1 - e.crossing_bracket.0 <= 2e-5 * (1.0 + 1e-9));
        assert!(jump.admissible(&e.pre_state.joint_center(&sys)));
    }
    assert!(trace.samples.iter().filter(|s| s.event).count() >= 4);
}

#[test]
fn chain_stops_at_an_oversized_stage() {
    let sys = Brusselator::reduced(BrusselatorParams::default());
    let (s1, s2) = brusselator_sections();
    let cfg = VerificationConfig::new(2e-4, 34300, 3, 1e-3, 1e-7).unwrap();
    let plan = DecompositionPlan { stage_radius: 1e-7, budget: 50 };
    let chain = [Some((s1.clone(), s2.clone())), None, None, Some((s1, s2))];
    let report = decompose_periods(&sys, &chain, &cfg, &TubeOptions::default(), &plan, 1.8, &Sequential).unwrap();
    assert_eq!(report.stages.len(), 1);
    assert!(!report.success);
    assert!(report.stages[0].first_failure.as_deref().unwrap().contains("budget"));
}
