//! The subcommands, as library functions writing into an output directory.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::{json, Value};
use synchro_core::sync::{joint_phases, DecompositionPlan};
use synchro_core::{
    decompose_periods, expansion_factor, one_sided_lipschitz, reach_tube, verify_balls, verify_covering, Covering,
    HybridSystem, PairSelection, ProductBall, ReachTrace, SectionParallelogram, Zone,
};

use crate::error::{Error, Result};
use crate::exec::Threads;
use crate::plot::{Marker, Plot, CONTRACTIVE, EXPANSIVE, PALETTE, SECTION_FILL};
use crate::recipes::{recipe, Reference, CENTER_TOLERANCE, PHASE_TOLERANCE, RADIUS_FACTOR};
use crate::report::{num, write_checks, write_csv, write_json, write_text, Check, Metadata};
use crate::spec::{ExperimentSpec, SelectionName};

/// Command-line values that take precedence over the spec file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub workers: Option<usize>,
    pub seed: Option<u64>,
    pub lambda_stride: Option<u64>,
    pub record_stride: Option<u64>,
}

impl Overrides {
    pub fn apply(&self, spec: &mut ExperimentSpec) {
        if let Some(w) = self.workers {
            spec.workers = w;
        }
        if let Some(s) = self.seed {
            spec.seed = s;
        }
        if let Some(s) = self.lambda_stride {
            spec.tube.lambda_stride = s;
        }
        if let Some(s) = self.record_stride {
            spec.tube.record_stride = s;
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    /// All checks passed and every verified pair succeeded.
    pub passed: bool,
    pub files: Vec<PathBuf>,
    pub summary: Value,
    pub checks: Vec<Check>,
}

fn out_dir(out: &Path) -> Result<()> {
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))
}

/// Coordinate names of plane `i` for plot labels.
fn axis_names(model: &str, i: usize) -> [String; 2] {
    let k = i + 1;
    if model == "biped" {
        [format!("phi{k}"), format!("dphi{k}")]
    } else {
        [format!("u{k}"), format!("v{k}")]
    }
}

fn plane(s: &SectionParallelogram, ball: &ProductBall, i: usize) -> [f64; 2] {
    s.project(&ball.ball(i).center)
}

fn section_polygon(plot: &mut Plot, s: &SectionParallelogram) {
    plot.polygon(s.vertices().to_vec(), "black", SECTION_FILL);
}

fn write_svg(path: &Path, plot: &Plot) -> Result<PathBuf> {
    write_text(path, &plot.render())
}

fn initial_balls(spec: &ExperimentSpec) -> Result<Vec<ProductBall>> {
    let balls = spec.balls()?;
    if balls.is_empty() {
        return Err(Error::Usage(format!("spec `{}` lists no [[balls]]", spec.name)));
    }
    Ok(balls)
}

/// Sampled `μ₂` over each recorded ball.
fn sampled_lambdas(system: &dyn HybridSystem, trace: &ReachTrace, points: usize, seed: u64) -> Result<Vec<f64>> {
    trace
        .samples
        .iter()
        .map(|s| Ok(one_sided_lipschitz(system, &s.ball, points, seed)?.value))
        .collect()
}

fn zone_name(l: f64) -> &'static str {
    match Zone::of(l) {
        Zone::Contractive => "contractive",
        Zone::Expansive => "expansive",
    }
}

fn zone_color(l: f64) -> &'static str {
    match Zone::of(l) {
        Zone::Contractive => CONTRACTIVE,
        Zone::Expansive => EXPANSIVE,
    }
}

/// Tube simulation: one trace CSV per initial ball, orbit plots with λ
/// zones for the first one.
pub fn simulate(spec: &ExperimentSpec, out: &Path) -> Result<Outcome> {
    spec.validate()?;
    let steps = spec.simulate_steps();
    if steps == 0 {
        return Err(Error::Usage("simulate needs a positive number of steps".into()));
    }
    out_dir(out)?;
    let system = spec.system()?;
    let config = spec.verification_config()?;
    let options = spec.tube_options()?;
    let (s1, s2) = spec.sections()?;
    let meta = Metadata::of(spec);
    let balls = initial_balls(spec)?;
    let n = system.dim();
    let started = Instant::now();
    let mut files = Vec::new();
    let mut runs = Vec::new();
    for (b, ball) in balls.iter().enumerate() {
        let trace = reach_tube(system.as_ref(), ball, steps, &config, &options)?;
        let lambdas = sampled_lambdas(system.as_ref(), &trace, options.random_points, spec.seed)?;
        let mut header: Vec<String> = vec!["step".into(), "t".into()];
        header.extend((0..n).map(|i| format!("x{i}")));
        header.extend(["radius", "growth_rate", "lambda", "zone", "event"].map(String::from));
        let rows: Vec<Vec<String>> = trace
            .samples
            .iter()
            .zip(&lambdas)
            .map(|(s, &l)| {
                let mut row = vec![s.step.to_string(), num(s.t)];
                row.extend(s.ball.joint_center(system.as_ref()).iter().map(|&v| num(v)));
                row.extend([num(s.ball.radius()), num(s.lambda), num(l), zone_name(l).into(), s.event.to_string()]);
                row
            })
            .collect();
        let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
        files.push(write_csv(&out.join(format!("trace_{b}.csv")), &meta, &header_refs, &rows)?);

        let p = config.period_steps;
        let expansion = if steps >= p && ball.radius() > 0.0 { expansion_factor(&trace, p).ok() } else { None };
        let periods = steps / p;
        let events_per_period: Vec<usize> = (0..periods)
            .map(|k| trace.events.iter().filter(|e| e.step_index > k * p && e.step_index <= (k + 1) * p).count())
            .collect();
        if b == 0 {
            for (i, s) in [&s1, &s2].into_iter().enumerate() {
                let names = axis_names(&spec.model, i);
                let mut plot = Plot::new(&format!("{}: cyclic trajectory, plane {}", spec.model, i + 1), &names[0], &names[1]);
                let pts: Vec<[f64; 2]> = trace.samples.iter().map(|smp| plane(s, &smp.ball, i)).collect();
                let colors: Vec<&str> = lambdas.iter().map(|&l| zone_color(l)).collect();
                plot.colored_path(&pts, &colors, 1.5);
                section_polygon(&mut plot, s);
                plot.mark(s.centroid(), "black", Marker::Ring, 6.0);
                for e in &trace.events {
                    plot.mark(plane(s, &e.pre_state, i), "black", Marker::Cross, 4.0);
                }
                plot.legend("lambda < 0 (contractive)", CONTRACTIVE);
                plot.legend("lambda >= 0 (expansive)", EXPANSIVE);
                files.push(write_svg(&out.join(format!("orbit_plane{}.svg", i + 1)), &plot)?);
            }
        }
        let last = trace.last();
        runs.push(json!({
            "ball": b,
            "steps": steps,
            "expansion_one_period": expansion,
            "events": trace.events.len(),
            "events_per_period": events_per_period,
            "final_radius": last.ball.radius(),
            "final_center": last.ball.joint_center(system.as_ref()),
            "contractive_fraction": lambdas.iter().filter(|&&l| l < 0.0).count() as f64 / lambdas.len() as f64,
        }));
    }
    let summary = json!({
        "command": "simulate",
        "meta": meta,
        "runs": runs,
        "elapsed_seconds": started.elapsed().as_secs_f64(),
    });
    files.push(write_json(&out.join("summary.json"), &summary)?);
    Ok(Outcome { passed: true, files, summary, checks: Vec::new() })
}

/// One verified ball pair in table form.
#[derive(Debug, Clone, serde::Serialize)]
pub struct PairRow {
    pub pair: usize,
    pub j1: Option<usize>,
    pub j2: Option<usize>,
    pub initial_phases: [f64; 2],
    pub image_phases: [f64; 2],
    pub delta_initial: f64,
    pub delta_image: f64,
    /// `Δphase(image) + min(e₁/f₁, e₂/f₂)`.
    pub worst_case: f64,
    pub hit_step: Option<u64>,
    pub image_center: Vec<f64>,
    pub image_radius: f64,
    pub expansion: f64,
    pub contained: bool,
    pub success: bool,
    pub diagnostic: String,
}

const TABLE_HEADER: [&str; 15] = [
    "pair",
    "j1",
    "j2",
    "phase_initial_1",
    "phase_initial_2",
    "phase_image_1",
    "phase_image_2",
    "delta_initial",
    "delta_image",
    "worst_case",
    "hit_step",
    "image_radius",
    "expansion",
    "contained",
    "success",
];

fn table_rows(rows: &[PairRow]) -> Vec<Vec<String>> {
    let opt = |v: Option<usize>| v.map(|j| j.to_string()).unwrap_or_default();
    rows.iter()
        .map(|r| {
            vec![
                r.pair.to_string(),
                opt(r.j1),
                opt(r.j2),
                num(r.initial_phases[0]),
                num(r.initial_phases[1]),
                num(r.image_phases[0]),
                num(r.image_phases[1]),
                num(r.delta_initial),
                num(r.delta_image),
                num(r.worst_case),
                r.hit_step.map(|s| s.to_string()).unwrap_or_default(),
                num(r.image_radius),
                num(r.expansion),
                r.contained.to_string(),
                r.success.to_string(),
            ]
        })
        .collect()
}

fn pair_row(
    system: &dyn HybridSystem,
    s1: &SectionParallelogram,
    s2: &SectionParallelogram,
    pair: usize,
    js: Option<(usize, usize)>,
    ball: &ProductBall,
    result: &synchro_core::Result<synchro_core::VerificationResult>,
) -> PairRow {
    let x0 = ball.joint_center(system);
    let (p1, p2) = joint_phases(system, s1, s2, &x0);
    let thin = s1.thinness().min(s2.thinness());
    let mut row = PairRow {
        pair,
        j1: js.map(|j| j.0),
        j2: js.map(|j| j.1),
        initial_phases: [p1, p2],
        image_phases: [f64::NAN; 2],
        delta_initial: (p1 - p2).abs(),
        delta_image: f64::NAN,
        worst_case: f64::NAN,
        hit_step: None,
        image_center: Vec::new(),
        image_radius: f64::NAN,
        expansion: f64::NAN,
        contained: false,
        success: false,
        diagnostic: String::new(),
    };
    match result {
        Ok(v) => {
            row.image_phases = [v.phase1, v.phase2];
            row.delta_image = v.delta_phase;
            row.worst_case = v.delta_phase + thin;
            row.hit_step = v.hit_step;
            row.image_center = v.image.joint_center(system);
            row.image_radius = v.image.radius();
            row.expansion = v.expansion;
            row.contained = v.contained;
            row.success = v.success;
            row.diagnostic = v.diagnostic.clone().unwrap_or_default();
        }
        Err(e) => row.diagnostic = e.to_string(),
    }
    row
}

fn sync_plots(
    spec: &ExperimentSpec,
    out: &Path,
    sections: [&SectionParallelogram; 2],
    balls: &[ProductBall],
    rows: &[PairRow],
    system: &dyn HybridSystem,
) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    let m = system.subsystem_dim();
    for (i, s) in sections.into_iter().enumerate() {
        let names = axis_names(&spec.model, i);
        let title = format!("{}: initial balls (dots) and images (crosses), plane {}", spec.model, i + 1);
        let mut plot = Plot::new(&title, &names[0], &names[1]);
        section_polygon(&mut plot, s);
        for (j, (b, r)) in balls.iter().zip(rows).enumerate() {
            let color = PALETTE[j % PALETTE.len()];
            plot.mark(plane(s, b, i), color, Marker::Dot, 3.5);
            if r.image_center.len() == 2 * m {
                let sub = system.subsystem(i);
                let local: Vec<f64> = sub.iter().map(|&k| r.image_center[k]).collect();
                plot.mark(s.project(&local), color, Marker::Cross, 4.0);
            }
        }
        files.push(write_svg(&out.join(format!("sync_plane{}.svg", i + 1)), &plot)?);
    }
    Ok(files)
}

/// Runs the spec's verification: a period chain when `[decomposition]` is
/// present, a covering when `[covering]` is present, else the listed balls.
pub fn verify(spec: &ExperimentSpec, out: &Path) -> Result<Outcome> {
    spec.validate()?;
    out_dir(out)?;
    let system = spec.system()?;
    let config = spec.verification_config()?;
    let options = spec.tube_options()?;
    let (s1, s2) = spec.sections()?;
    let meta = Metadata::of(spec);
    let exec = Threads::new(spec.workers);
    let started = Instant::now();
    let mut files = Vec::new();

    if let Some(d) = &spec.decomposition {
        let r = d.stage_radius.unwrap_or_else(|| DecompositionPlan::safe_radius(&s1, &s2, d.expansion));
        let plan = DecompositionPlan { stage_radius: r, budget: d.budget };
        let mut chain = vec![None; config.k as usize + 1];
        chain[0] = Some((s1.clone(), s2.clone()));
        chain[config.k as usize] = Some((s1.clone(), s2.clone()));
        let report = decompose_periods(system.as_ref(), &chain, &config, &options, &plan, d.expansion, &exec)?;
        let rows: Vec<Vec<String>> = report
            .stages
            .iter()
            .map(|s| {
                vec![
                    s.stage.to_string(),
                    s.pairs.to_string(),
                    s.succeeded.to_string(),
                    num(s.estimate),
                    num(s.pairs as f64 / s.estimate),
                    num(s.radius),
                    num(s.max_expansion),
                    num(s.max_delta_phase),
                    s.success.to_string(),
                    s.first_failure.clone().unwrap_or_default(),
                ]
            })
            .collect();
        let header = [
            "stage",
            "pairs",
            "succeeded",
            "estimate",
            "count_ratio",
            "radius",
            "max_expansion",
            "max_delta_phase",
            "success",
            "first_failure",
        ];
        files.push(write_csv(&out.join("stages.csv"), &meta, &header, &rows)?);
        let stages: Vec<Value> = report
            .stages
            .iter()
            .map(|s| {
                json!({
                    "stage": s.stage,
                    "pairs": s.pairs,
                    "succeeded": s.succeeded,
                    "estimate": s.estimate,
                    "count_ratio": s.pairs as f64 / s.estimate,
                    "target": [s.target.0.vertices(), s.target.1.vertices()],
                    "success": s.success,
                    "first_failure": s.first_failure,
                })
            })
            .collect();
        let summary = json!({
            "command": "verify",
            "mode": "decomposition",
            "meta": meta,
            "stage_radius": r,
            "stages": stages,
            "success": report.success,
            "elapsed_seconds": started.elapsed().as_secs_f64(),
        });
        files.push(write_json(&out.join("summary.json"), &summary)?);
        return Ok(Outcome { passed: report.success, files, summary, checks: Vec::new() });
    }

    let (balls, rows, mode) = if let Some(c) = &spec.covering {
        let covering = Covering::of_sections(&s1, &s2, c.radius)?;
        let selection = match c.selection {
            SelectionName::All => PairSelection::All { budget: c.budget },
            SelectionName::Diagonal => PairSelection::Diagonal,
        };
        let report = verify_covering(system.as_ref(), &covering, &selection, &config, &options, &exec)?;
        let mut balls = Vec::new();
        let mut rows = Vec::new();
        for (i, o) in report.outcomes.iter().enumerate() {
            let b = covering.pair(o.j1, o.j2)?;
            rows.push(pair_row(system.as_ref(), &s1, &s2, i, Some((o.j1, o.j2)), &b, &o.result));
            balls.push(b);
        }
        (balls, rows, "covering")
    } else {
        let balls = initial_balls(spec)?;
        let results = verify_balls(system.as_ref(), &balls, &s1, &s2, &config, &options, &exec);
        let rows =
            balls.iter().zip(&results).enumerate().map(|(i, (b, r))| pair_row(system.as_ref(), &s1, &s2, i, None, b, r)).collect();
        (balls, rows, "balls")
    };
    files.push(write_csv(&out.join("table.csv"), &meta, &TABLE_HEADER, &table_rows(&rows))?);
    files.extend(sync_plots(spec, out, [&s1, &s2], &balls, &rows, system.as_ref())?);
    let passed = !rows.is_empty() && rows.iter().all(|r| r.success);
    let summary = json!({
        "command": "verify",
        "mode": mode,
        "meta": meta,
        "bound": config.epsilon + s1.thinness().min(s2.thinness()),
        "pairs": rows,
        "success": passed,
        "elapsed_seconds": started.elapsed().as_secs_f64(),
    });
    files.push(write_json(&out.join("summary.json"), &summary)?);
    Ok(Outcome { passed, files, summary, checks: Vec::new() })
}

/// Writes the lattice coverings of both sections.
pub fn cover(spec: &ExperimentSpec, out: &Path) -> Result<Outcome> {
    spec.validate()?;
    out_dir(out)?;
    let (s1, s2) = spec.sections()?;
    let meta = Metadata::of(spec);
    let (radius, expansion) = match (&spec.covering, &spec.decomposition) {
        (Some(c), d) => (c.radius, d.as_ref().map(|d| d.expansion)),
        (None, Some(d)) => {
            (d.stage_radius.unwrap_or_else(|| DecompositionPlan::safe_radius(&s1, &s2, d.expansion)), Some(d.expansion))
        }
        (None, None) => return Err(Error::Usage("cover needs a [covering] or [decomposition] table".into())),
    };
    let covering = Covering::of_sections(&s1, &s2, radius)?;
    let mut files = Vec::new();
    for (i, c) in [&covering.centers1, &covering.centers2].into_iter().enumerate() {
        let rows: Vec<Vec<String>> = c.iter().enumerate().map(|(j, p)| vec![j.to_string(), num(p[0]), num(p[1])]).collect();
        files.push(write_csv(&out.join(format!("covering{}.csv", i + 1)), &meta, &["index", "c0", "c1"], &rows)?);
    }
    let thin = |s: &SectionParallelogram| s.length() / s.width();
    let estimate = expansion.map(|e| thin(&s1) * thin(&s2) * e.powi(4));
    let summary = json!({
        "command": "cover",
        "meta": meta,
        "radius": radius,
        "counts": [covering.centers1.len(), covering.centers2.len()],
        "pairs": covering.pair_count(),
        "stage_estimate": estimate,
        "length_over_width": [thin(&s1), thin(&s2)],
    });
    files.push(write_json(&out.join("summary.json"), &summary)?);
    Ok(Outcome { passed: true, files, summary, checks: Vec::new() })
}

/// Samples λ over a ball of radius `r0` riding along the first center's
/// point orbit, every `lambda_stride` steps.
pub fn lambda_map(spec: &ExperimentSpec, out: &Path) -> Result<Outcome> {
    spec.validate()?;
    out_dir(out)?;
    let system = spec.system()?;
    let config = spec.verification_config()?;
    let options = spec.tube_options()?;
    let (s1, s2) = spec.sections()?;
    let meta = Metadata::of(spec);
    let ball = initial_balls(spec)?.remove(0);
    let steps = spec.simulate_steps();
    let stride = options.lambda_stride.max(1);
    let mut orbit = synchro_core::reach::PointOrbit::new(system.as_ref(), &ball.joint_center(system.as_ref()), config.tau);
    let mut rows = Vec::new();
    let mut pts: [Vec<[f64; 2]>; 2] = [Vec::new(), Vec::new()];
    let mut colors = Vec::new();
    let mut contractive = 0usize;
    loop {
        let x = orbit.state().to_vec();
        let region = ProductBall::from_joint(system.as_ref(), &x, config.r0)?;
        let l = one_sided_lipschitz(system.as_ref(), &region, options.random_points, spec.seed)?.value;
        if l < 0.0 {
            contractive += 1;
        }
        let mut row = vec![orbit.step_index().to_string(), num(orbit.step_index() as f64 * config.tau)];
        row.extend(x.iter().map(|&v| num(v)));
        row.extend([num(l), zone_name(l).to_string()]);
        rows.push(row);
        for (i, s) in [&s1, &s2].into_iter().enumerate() {
            pts[i].push(plane(s, &region, i));
        }
        colors.push(zone_color(l));
        if orbit.step_index() >= steps {
            break;
        }
        let next = (orbit.step_index() + stride).min(steps);
        orbit.advance_to(next)?;
    }
    let mut header: Vec<String> = vec!["step".into(), "t".into()];
    header.extend((0..system.dim()).map(|i| format!("x{i}")));
    header.extend(["lambda".into(), "zone".into()]);
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut files = vec![write_csv(&out.join("lambda.csv"), &meta, &header_refs, &rows)?];
    for (i, s) in [&s1, &s2].into_iter().enumerate() {
        let names = axis_names(&spec.model, i);
        let mut plot = Plot::new(&format!("{}: lambda zones, plane {}", spec.model, i + 1), &names[0], &names[1]);
        plot.colored_path(&pts[i], &colors, 2.0);
        section_polygon(&mut plot, s);
        plot.legend("lambda < 0 (contractive)", CONTRACTIVE);
        plot.legend("lambda >= 0 (expansive)", EXPANSIVE);
        files.push(write_svg(&out.join(format!("lambda_plane{}.svg", i + 1)), &plot)?);
    }
    let summary = json!({
        "command": "lambda-map",
        "meta": meta,
        "samples": rows.len(),
        "contractive_fraction": contractive as f64 / rows.len() as f64,
    });
    files.push(write_json(&out.join("summary.json"), &summary)?);
    Ok(Outcome { passed: true, files, summary, checks: Vec::new() })
}

pub const REPRODUCE_IDS: [&str; 7] = ["fig2", "fig3", "fig4", "fig5", "table1", "table2", "single-ball"];

fn table_checks(reference: &Reference, rows: &[PairRow]) -> Vec<Check> {
    let t = &reference.table;
    let mut checks = Vec::new();
    for (i, (r, want)) in rows.iter().zip(&t.rows).enumerate() {
        let p = i + 1;
        checks.push(Check::flag(format!("pair {p} contained"), r.contained, r.diagnostic.clone()));
        for c in 0..2 {
            checks.push(Check::close(format!("pair {p} image phase {}", c + 1), want.image_phases[c], r.image_phases[c], PHASE_TOLERANCE));
        }
        checks.push(Check::at_most(format!("pair {p} delta phase of image"), t.epsilon, r.delta_image));
        if let Some(w) = t.worst_case {
            checks.push(Check::at_most(format!("pair {p} worst-case phase gap"), w, r.worst_case));
        }
        for (c, (&e, &a)) in want.image.iter().zip(&r.image_center).enumerate() {
            checks.push(Check::close(format!("pair {p} image x{c}"), e, a, CENTER_TOLERANCE));
        }
    }
    checks
}

fn expansion_check(reference: &Reference, out: &Outcome) -> Check {
    let e = out.summary["runs"][0]["expansion_one_period"].as_f64().unwrap_or(f64::NAN);
    let [lo, hi] = reference.expansion_range;
    Check::within("expansion factor after one period", lo, hi, e)
}

fn single_ball_checks(reference: &Reference, rows: &[PairRow]) -> Vec<Check> {
    let sb = reference.single_ball.as_ref().expect("single-ball data");
    let r = &rows[0];
    let mut checks = vec![Check::flag("contained", r.contained, r.diagnostic.clone())];
    for (c, (&e, &a)) in sb.image.iter().zip(&r.image_center).enumerate() {
        checks.push(Check::close(format!("image x{c}"), e, a, CENTER_TOLERANCE));
    }
    checks.push(Check::at_most("delta phase of image centers", 1e-4, r.delta_image));
    checks.push(Check::within("image radius", sb.image_radius / RADIUS_FACTOR, sb.image_radius * RADIUS_FACTOR, r.image_radius));
    for c in 0..2 {
        checks.push(Check::close(format!("image phase {}", c + 1), sb.image_phases[c], r.image_phases[c], PHASE_TOLERANCE));
    }
    checks
}

fn rows_of(outcome: &Outcome) -> Vec<PairRow> {
    // rebuilt from the summary so the same code path serves files and checks
    outcome.summary["pairs"]
        .as_array()
        .map(|a| {
            a.iter()
                .map(|p| {
                    let f = |k: &str| p[k].as_f64().unwrap_or(f64::NAN);
                    let pair2 = |k: &str| [p[k][0].as_f64().unwrap_or(f64::NAN), p[k][1].as_f64().unwrap_or(f64::NAN)];
                    PairRow {
                        pair: p["pair"].as_u64().unwrap_or(0) as usize,
                        j1: p["j1"].as_u64().map(|v| v as usize),
                        j2: p["j2"].as_u64().map(|v| v as usize),
                        initial_phases: pair2("initial_phases"),
                        image_phases: pair2("image_phases"),
                        delta_initial: f("delta_initial"),
                        delta_image: f("delta_image"),
                        worst_case: f("worst_case"),
                        hit_step: p["hit_step"].as_u64(),
                        image_center: p["image_center"]
                            .as_array()
                            .map(|v| v.iter().filter_map(Value::as_f64).collect())
                            .unwrap_or_default(),
                        image_radius: f("image_radius"),
                        expansion: f("expansion"),
                        contained: p["contained"].as_bool().unwrap_or(false),
                        success: p["success"].as_bool().unwrap_or(false),
                        diagnostic: p["diagnostic"].as_str().unwrap_or("").to_string(),
                    }
                })
                .collect()
        })
        .unwrap_or_default()
}

/// Runs a canonical recipe with fixed parameters and compares the result
/// with the embedded reference values.
pub fn reproduce(id: &str, out: &Path, overrides: &Overrides) -> Result<Outcome> {
    let (recipe_name, simulate_only) = match id {
        "single-ball" => ("single-ball", false),
        "table1" | "fig3" => ("brusselator-10", false),
        "table2" | "fig5" => ("biped-10", false),
        "fig2" => ("single-ball", true),
        "fig4" => ("biped-10", true),
        other => {
            return Err(Error::Usage(format!("unknown id `{other}` (expected one of {})", REPRODUCE_IDS.join(", "))))
        }
    };
    let mut spec = recipe(recipe_name)?;
    overrides.apply(&mut spec);
    let reference = if spec.model == "biped" { Reference::biped() } else { Reference::brusselator() };
    let mut outcome;
    let checks = if simulate_only {
        spec.balls.truncate(1);
        outcome = simulate(&spec, out)?;
        vec![expansion_check(&reference, &outcome)]
    } else {
        outcome = verify(&spec, out)?;
        let rows = rows_of(&outcome);
        if id == "single-ball" {
            single_ball_checks(&reference, &rows)
        } else {
            table_checks(&reference, &rows)
        }
    };
    let meta = Metadata::of(&spec);
    outcome.files.push(write_checks(&out.join("diff.csv"), &meta, &checks)?);
    outcome.files.push(write_json(&out.join("diff.json"), &checks)?);
    outcome.passed = checks.iter().all(|c| c.pass);
    outcome.checks = checks;
    Ok(outcome)
}
