//! Recurrence-based synchronization checks: PROC1 on one product ball, its
//! lift to a covering of the section set, and the period-by-period chain.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::model::{HybridSystem, ProductBall, SectionParallelogram, StateVector, VerificationConfig};
use crate::reach::{PointOrbit, Tube, TubeOptions};

/// Runs independent jobs `0..n` and returns their results in index order.
pub trait Executor: Sync {
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync;
}

/// Runs everything on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync,
    {
        (0..n).map(f).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationResult {
    pub initial: ProductBall,
    /// First step in `[k·P, (k+1)·P)` with both balls inside their sections.
    pub hit_step: Option<u64>,
    pub contained: bool,
    /// Center phases at the hit step, or at the last step reached.
    pub phase1: f64,
    pub phase2: f64,
    pub delta_phase: f64,
    /// `ε + min(e₁/f₁, e₂/f₂)`.
    pub bound: f64,
    /// `r(hit) / r(0)`, 1 for a point initial set.
    pub expansion: f64,
    /// The tube ball at the hit step (or the last step reached).
    pub image: ProductBall,
    /// Contained and `delta_phase ≤ ε`.
    pub success: bool,
    pub diagnostic: Option<String>,
}

/// Proposition-style slack `ε + min(e₁/f₁, e₂/f₂)`.
pub fn phase_bound(s1: &SectionParallelogram, s2: &SectionParallelogram, epsilon: f64) -> f64 {
    epsilon + s1.thinness().min(s2.thinness())
}

/// Plane point of subsystem `i` of a joint state, in `s`'s plane order.
fn plane_point<S: HybridSystem + ?Sized>(system: &S, i: usize, s: &SectionParallelogram, x: &[f64]) -> [f64; 2] {
    let sub = system.subsystem(i);
    let [lo, hi] = s.axes();
    [x[sub[lo]], x[sub[hi]]]
}

fn subsystem_phase<S: HybridSystem + ?Sized>(system: &S, i: usize, s: &SectionParallelogram, x: &[f64]) -> f64 {
    let p = plane_point(system, i, s, x);
    let a = s.a();
    let b = s.b();
    let k = s.phase_local();
    (p[k] - a[k]) / (b[k] - a[k])
}

/// Center phases of a joint state with respect to `(s1, s2)`.
pub fn joint_phases<S: HybridSystem + ?Sized>(
    system: &S,
    s1: &SectionParallelogram,
    s2: &SectionParallelogram,
    x: &[f64],
) -> (f64, f64) {
    (subsystem_phase(system, 0, s1, x), subsystem_phase(system, 1, s2, x))
}

/// Both subsystem points of `x` lie in their sections with clearance `r`.
pub fn joint_contained<S: HybridSystem + ?Sized>(
    system: &S,
    s1: &SectionParallelogram,
    s2: &SectionParallelogram,
    x: &[f64],
    r: f64,
) -> bool {
    s1.contains_disk(plane_point(system, 0, s1, x), r) && s2.contains_disk(plane_point(system, 1, s2, x), r)
}

fn check_sections<S: HybridSystem + ?Sized>(
    system: &S,
    s1: &SectionParallelogram,
    s2: &SectionParallelogram,
) -> Result<()> {
    for s in [s1, s2] {
        if s.axes()[1] >= system.subsystem_dim() {
            return Err(Error::invalid(format!(
                "section axes {:?} exceed subsystem dimension {}",
                s.axes(),
                system.subsystem_dim()
            )));
        }
    }
    Ok(())
}

/// Searches the window `[k·P, (k+1)·P)` for the first step at which the tube
/// from `b0` has both balls inside `S1 × S2`, then compares center phases.
///
/// The initial radius must satisfy `r ≤ min(e₁, e₂)/2`. A tube that fails
/// numerically before the window ends yields `contained = false` with a
/// diagnostic rather than an error.
pub fn proc1<S: HybridSystem + ?Sized>(
    system: &S,
    b0: &ProductBall,
    s1: &SectionParallelogram,
    s2: &SectionParallelogram,
    config: &VerificationConfig,
    options: &TubeOptions,
) -> Result<VerificationResult> {
    proc1_in_window(system, b0, s1, s2, config, options, config.window())
}

fn proc1_in_window<S: HybridSystem + ?Sized>(
    system: &S,
    b0: &ProductBall,
    s1: &SectionParallelogram,
    s2: &SectionParallelogram,
    config: &VerificationConfig,
    options: &TubeOptions,
    (start, end): (u64, u64),
) -> Result<VerificationResult> {
    check_sections(system, s1, s2)?;
    let r0 = b0.radius();
    let limit = 0.5 * s1.width().min(s2.width());
    if r0 > limit {
        return Err(Error::invalid(format!("initial radius {r0:e} exceeds min(e1, e2)/2 = {limit:e}")));
    }
    let mut tube = Tube::new(system, b0, config, options)?;
    let bound = phase_bound(s1, s2, config.epsilon);
    let mut hit = None;
    let mut diagnostic = None;
    while tube.step_index() < end {
        let n = tube.step_index();
        if n >= start && joint_contained(system, s1, s2, tube.center(), tube.radius()) {
            hit = Some(n);
            break;
        }
        if let Err(e) = tube.step() {
            diagnostic = Some(e.to_string());
            break;
        }
    }
    if hit.is_none() && diagnostic.is_none() {
        diagnostic = Some(String::from("no containment step in the recurrence window"));
    }
    let (phase1, phase2) = joint_phases(system, s1, s2, tube.center());
    let delta_phase = (phase1 - phase2).abs();
    let contained = hit.is_some();
    let expansion = if r0 > 0.0 { tube.radius() / r0 } else { 1.0 };
    Ok(VerificationResult {
        initial: b0.clone(),
        hit_step: hit,
        contained,
        phase1,
        phase2,
        delta_phase,
        bound,
        expansion,
        image: tube.product_ball(),
        success: contained && delta_phase <= config.epsilon,
        diagnostic,
    })
}

/// PROC1 on a list of product balls, distributed over `exec`.
pub fn verify_balls<S, E>(
    system: &S,
    balls: &[ProductBall],
    s1: &SectionParallelogram,
    s2: &SectionParallelogram,
    config: &VerificationConfig,
    options: &TubeOptions,
    exec: &E,
) -> Vec<Result<VerificationResult>>
where
    S: HybridSystem + ?Sized,
    E: Executor,
{
    exec.map(balls.len(), |i| proc1(system, &balls[i], s1, s2, config, options))
}

/// Lattice of disk centers with radius `r` covering `s`, in plane order.
///
/// Centers sit on a lattice along the two edge directions whose cells have
/// circumradius `r`; the lattice is centered in `s` and listed row by row
/// (outer index along the side edge, inner index along the base edge).
pub fn cover_section(s: &SectionParallelogram, r: f64) -> Result<Vec<[f64; 2]>> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::invalid("covering radius must be > 0"));
    }
    if r >= s.diameter() {
        return Ok(vec![s.centroid()]);
    }
    let v = s.vertices();
    let u = [v[1][0] - v[0][0], v[1][1] - v[0][1]];
    let w = [v[3][0] - v[0][0], v[3][1] - v[0][1]];
    let lu = math::hypot(u[0], u[1]);
    let lw = math::hypot(w[0], w[1]);
    let uh = [u[0] / lu, u[1] / lu];
    let wh = [w[0] / lw, w[1] / lw];
    let cos = (uh[0] * wh[0] + uh[1] * wh[1]).abs();
    let spacing = r * math::sqrt(2.0) / math::sqrt(1.0 + cos);
    // extents of all four vertices in the (uh, wh) frame, so quadrilaterals
    // that are only nearly parallelograms are still covered
    let det = uh[0] * wh[1] - uh[1] * wh[0];
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in v {
        let q = [p[0] - v[0][0], p[1] - v[0][1]];
        let a = (q[0] * wh[1] - q[1] * wh[0]) / det;
        let b = (uh[0] * q[1] - uh[1] * q[0]) / det;
        lo = [lo[0].min(a), lo[1].min(b)];
        hi = [hi[0].max(a), hi[1].max(b)];
    }
    let count = |len: f64| libm::ceil(len / spacing + 0.5).max(1.0) as usize;
    let (nu, nw) = (count(hi[0] - lo[0]), count(hi[1] - lo[1]));
    let offset = |len: f64, n: usize| 0.5 * (len - (n as f64 - 1.0) * spacing);
    let (ou, ow) = (lo[0] + offset(hi[0] - lo[0], nu), lo[1] + offset(hi[1] - lo[1], nw));
    let mut out = Vec::with_capacity(nu * nw);
    for j in 0..nw {
        let b = ow + j as f64 * spacing;
        for i in 0..nu {
            let a = ou + i as f64 * spacing;
            let p = [v[0][0] + a * uh[0] + b * wh[0], v[0][1] + a * uh[1] + b * wh[1]];
            // drop centers whose disk misses the section entirely
            if s.edge_distances(p).iter().all(|&d| d >= -r) {
                out.push(p);
            }
        }
    }
    Ok(out)
}

/// Disk centers for both sections, expressed as subsystem states.
#[derive(Debug, Clone, PartialEq)]
pub struct Covering {
    pub centers1: Vec<Vec<f64>>,
    pub centers2: Vec<Vec<f64>>,
    pub radius: f64,
    pub s1: SectionParallelogram,
    pub s2: SectionParallelogram,
}

fn plane_to_state(s: &SectionParallelogram, p: [f64; 2]) -> Vec<f64> {
    let [lo, hi] = s.axes();
    let mut c = vec![0.0; hi + 1];
    c[lo] = p[0];
    c[hi] = p[1];
    c
}

impl Covering {
    /// Lattice covering of both sections. Requires the section plane to be
    /// the whole subsystem (two coordinates).
    pub fn of_sections(s1: &SectionParallelogram, s2: &SectionParallelogram, r: f64) -> Result<Self> {
        for s in [s1, s2] {
            if s.axes() != [0, 1] {
                return Err(Error::invalid("lattice coverings need two-coordinate subsystems"));
            }
        }
        let c1 = cover_section(s1, r)?.into_iter().map(|p| plane_to_state(s1, p)).collect();
        let c2 = cover_section(s2, r)?.into_iter().map(|p| plane_to_state(s2, p)).collect();
        Ok(Covering { centers1: c1, centers2: c2, radius: r, s1: s1.clone(), s2: s2.clone() })
    }

    pub fn pair_count(&self) -> usize {
        self.centers1.len() * self.centers2.len()
    }

    pub fn pair(&self, j1: usize, j2: usize) -> Result<ProductBall> {
        ProductBall::shared(
            StateVector::from_slice(&self.centers1[j1])?,
            StateVector::from_slice(&self.centers2[j2])?,
            self.radius,
        )
    }
}

/// Which `(j₁, j₂)` pairs of a covering to check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairSelection {
    /// The full product `J₁ × J₂`, refused when larger than `budget`.
    All { budget: usize },
    /// `(j, j)` for `j < min(|J₁|, |J₂|)`, as for hand-picked pairs.
    Diagonal,
    Indices(Vec<(usize, usize)>),
}

impl PairSelection {
    pub fn resolve(&self, covering: &Covering) -> Result<Vec<(usize, usize)>> {
        let (n1, n2) = (covering.centers1.len(), covering.centers2.len());
        match self {
            PairSelection::All { budget } => {
                if n1 * n2 > *budget {
                    return Err(Error::invalid(format!("{} pairs exceed the budget of {budget}", n1 * n2)));
                }
                Ok((0..n1).flat_map(|a| (0..n2).map(move |b| (a, b))).collect())
            }
            PairSelection::Diagonal => Ok((0..n1.min(n2)).map(|j| (j, j)).collect()),
            PairSelection::Indices(v) => {
                if let Some(&(a, b)) = v.iter().find(|&&(a, b)| a >= n1 || b >= n2) {
                    return Err(Error::invalid(format!("pair ({a}, {b}) is outside the covering")));
                }
                Ok(v.clone())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairOutcome {
    pub j1: usize,
    pub j2: usize,
    pub result: Result<VerificationResult>,
}

impl PairOutcome {
    pub fn succeeded(&self) -> bool {
        matches!(&self.result, Ok(r) if r.success)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoveringReport {
    pub outcomes: Vec<PairOutcome>,
    /// Phase bound granted to every point of the covered set on success.
    pub bound: f64,
    pub success: bool,
}

impl CoveringReport {
    pub fn max_delta_phase(&self) -> f64 {
        self.outcomes
            .iter()
            .filter_map(|o| o.result.as_ref().ok())
            .map(|r| r.delta_phase)
            .fold(0.0, f64::max)
    }
}

/// PROC1 on the selected pairs of a covering; success requires every pair.
pub fn verify_covering<S, E>(
    system: &S,
    covering: &Covering,
    selection: &PairSelection,
    config: &VerificationConfig,
    options: &TubeOptions,
    exec: &E,
) -> Result<CoveringReport>
where
    S: HybridSystem + ?Sized,
    E: Executor,
{
    let pairs = selection.resolve(covering)?;
    let (s1, s2) = (&covering.s1, &covering.s2);
    let outcomes = exec.map(pairs.len(), |i| {
        let (j1, j2) = pairs[i];
        let result = covering.pair(j1, j2).and_then(|b| proc1(system, &b, s1, s2, config, options));
        PairOutcome { j1, j2, result }
    });
    let success = !outcomes.is_empty() && outcomes.iter().all(PairOutcome::succeeded);
    Ok(CoveringReport { outcomes, bound: phase_bound(s1, s2, config.epsilon), success })
}

/// Settings of the period-by-period chain.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionPlan {
    /// Covering radius used at every stage.
    pub stage_radius: f64,
    /// Largest number of pairs per stage.
    pub budget: usize,
}

impl DecompositionPlan {
    /// Largest radius whose one-period image (grown by `expansion`) can
    /// still fit across the thinner of the two sections.
    pub fn safe_radius(s1: &SectionParallelogram, s2: &SectionParallelogram, expansion: f64) -> f64 {
        0.5 * s1.min_width().min(s2.min_width()) / expansion
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageReport {
    pub stage: usize,
    pub source: (SectionParallelogram, SectionParallelogram),
    pub target: (SectionParallelogram, SectionParallelogram),
    pub radius: f64,
    pub pairs: usize,
    pub succeeded: usize,
    /// `(ℓ₁/e₁)(ℓ₂/e₂)·E⁴` for the source sections.
    pub estimate: f64,
    /// Largest realized one-period radius growth.
    pub max_expansion: f64,
    pub max_delta_phase: f64,
    pub success: bool,
    pub first_failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    pub stages: Vec<StageReport>,
    pub success: bool,
}

type SectionPair = (SectionParallelogram, SectionParallelogram);

/// Proves `k`-period recurrence as `k` one-period reachability steps
/// between consecutive section pairs.
///
/// `chain` has `k + 1` entries; the first and last are the section set `S`
/// and must be given. Missing intermediate entries are built from the images
/// of the previous stage: every covering ball is followed for one period,
/// its center is taken at the step where it best straddles the diagonals of
/// `S`, and the target is the bounding parallelogram of those images in the
/// edge frame of `S`, inflated by the image radius.
///
/// The chain stops at the first stage that fails or whose covering exceeds
/// `plan.budget`; that stage is the last one reported.
pub fn decompose_periods<S, E>(
    system: &S,
    chain: &[Option<SectionPair>],
    config: &VerificationConfig,
    options: &TubeOptions,
    plan: &DecompositionPlan,
    expansion: f64,
    exec: &E,
) -> Result<ChainReport>
where
    S: HybridSystem + ?Sized,
    E: Executor,
{
    if chain.len() < 2 {
        return Err(Error::invalid("a chain needs at least two section pairs"));
    }
    let anchor = match (&chain[0], &chain[chain.len() - 1]) {
        (Some(first), Some(last)) if first == last => first.clone(),
        (Some(_), Some(_)) => return Err(Error::invalid("chain must start and end at the same section set")),
        _ => return Err(Error::invalid("first and last chain entries must be given")),
    };
    let stage_config = VerificationConfig { k: 1, ..*config };
    let window = stage_config.window();
    let mut current = anchor.clone();
    let mut stages = Vec::new();
    for stage in 0..chain.len() - 1 {
        let covering = Covering::of_sections(&current.0, &current.1, plan.stage_radius)?;
        let thin = |s: &SectionParallelogram| s.length() / s.width();
        let estimate = thin(&current.0) * thin(&current.1) * (expansion * expansion) * (expansion * expansion);
        if covering.pair_count() > plan.budget {
            stages.push(StageReport {
                stage,
                source: current.clone(),
                target: chain[stage + 1].clone().unwrap_or_else(|| current.clone()),
                radius: plan.stage_radius,
                pairs: covering.pair_count(),
                succeeded: 0,
                estimate,
                max_expansion: 0.0,
                max_delta_phase: 0.0,
                success: false,
                first_failure: Some(format!("{} pairs exceed the budget of {}", covering.pair_count(), plan.budget)),
            });
            break;
        }
        let pairs = PairSelection::All { budget: plan.budget }.resolve(&covering)?;
        let target = match &chain[stage + 1] {
            Some(t) => t.clone(),
            None => auto_target(system, &covering, &pairs, &anchor, &stage_config, options, exec)
                .map_err(|e| Error::StageFailed { stage, reason: e.to_string() })?,
        };
        let run = exec.map(pairs.len(), |i| {
            let (j1, j2) = pairs[i];
            covering.pair(j1, j2).and_then(|b| {
                proc1_in_window(system, &b, &target.0, &target.1, &stage_config, options, window)
            })
        });
        let mut succeeded = 0;
        let mut first_failure = None;
        let mut max_expansion: f64 = 0.0;
        let mut max_delta: f64 = 0.0;
        for (i, r) in run.iter().enumerate() {
            match r {
                Ok(v) if v.contained => {
                    succeeded += 1;
                    max_expansion = max_expansion.max(v.expansion);
                    max_delta = max_delta.max(v.delta_phase);
                }
                Ok(v) => {
                    if first_failure.is_none() {
                        let why = v.diagnostic.clone().unwrap_or_default();
                        first_failure = Some(format!("pair {:?}: {why}", pairs[i]));
                    }
                }
                Err(e) => {
                    if first_failure.is_none() {
                        first_failure = Some(format!("pair {:?}: {e}", pairs[i]));
                    }
                }
            }
        }
        let success = succeeded == pairs.len();
        stages.push(StageReport {
            stage,
            source: current.clone(),
            target: target.clone(),
            radius: plan.stage_radius,
            pairs: pairs.len(),
            succeeded,
            estimate,
            max_expansion,
            max_delta_phase: max_delta,
            success,
            first_failure,
        });
        current = target;
        if !success {
            break;
        }
    }
    let success = stages.len() == chain.len() - 1 && stages.iter().all(|s| s.success);
    Ok(ChainReport { stages, success })
}

/// Edge frame of a section: unit base direction, unit side direction and
/// the sine of the angle between them.
fn edge_frame(s: &SectionParallelogram) -> ([f64; 2], [f64; 2], f64) {
    let v = s.vertices();
    let e1 = [v[1][0] - v[0][0], v[1][1] - v[0][1]];
    let e2 = [v[3][0] - v[0][0], v[3][1] - v[0][1]];
    let unit = |e: [f64; 2]| {
        let l = math::hypot(e[0], e[1]);
        [e[0] / l, e[1] / l]
    };
    let (a, b) = (unit(e1), unit(e2));
    let bl = s.base_local();
    // the base edge is the one more aligned with the base axis
    let (u, w) = if a[bl].abs() >= b[bl].abs() { (a, b) } else { (b, a) };
    let sin = (u[0] * w[1] - u[1] * w[0]).abs();
    (u, w, sin)
}

/// Signed distance of `p` to the line through `s.a()` and `s.b()`.
fn diagonal_offset(s: &SectionParallelogram, p: [f64; 2]) -> f64 {
    let (a, b) = (s.a(), s.b());
    let d = [b[0] - a[0], b[1] - a[1]];
    let l = math::hypot(d[0], d[1]);
    (d[0] * (p[1] - a[1]) - d[1] * (p[0] - a[0])) / l
}

fn auto_target<S, E>(
    system: &S,
    covering: &Covering,
    pairs: &[(usize, usize)],
    anchor: &SectionPair,
    config: &VerificationConfig,
    options: &TubeOptions,
    exec: &E,
) -> Result<SectionPair>
where
    S: HybridSystem + ?Sized,
    E: Executor,
{
    let (start, end) = config.window();
    let images = exec.map(pairs.len(), |i| -> Result<(Vec<f64>, f64)> {
        let (j1, j2) = pairs[i];
        let b0 = covering.pair(j1, j2)?;
        let mut tube = Tube::new(system, &b0, config, options)?;
        let mut best: Option<(f64, Vec<f64>, f64)> = None;
        while tube.step_index() < end {
            if tube.step_index() >= start {
                let x = tube.center();
                let d1 = diagonal_offset(&anchor.0, plane_point(system, 0, &anchor.0, x)) / anchor.0.min_width();
                let d2 = diagonal_offset(&anchor.1, plane_point(system, 1, &anchor.1, x)) / anchor.1.min_width();
                let score = d1.abs().max(d2.abs());
                if best.as_ref().map_or(true, |b| score < b.0) {
                    best = Some((score, x.to_vec(), tube.radius()));
                } else if best.as_ref().is_some_and(|b| b.0 < 1.0 && score > b.0 + 8.0) {
                    // well past the section; the rest of the window is a full revolution away
                    break;
                }
            }
            tube.step()?;
        }
        let (_, x, r) = best.ok_or_else(|| Error::invalid("empty recurrence window"))?;
        Ok((x, r))
    });
    let images: Vec<(Vec<f64>, f64)> = images.into_iter().collect::<Result<_>>()?;
    let build = |i: usize, s: &SectionParallelogram| -> Result<SectionParallelogram> {
        let (u, w, sin) = edge_frame(s);
        let o = s.vertices()[0];
        let det = u[0] * w[1] - u[1] * w[0];
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for (x, r) in &images {
            let p = plane_point(system, i, s, x);
            let q = [p[0] - o[0], p[1] - o[1]];
            // affine coordinates of q in the (u, w) frame
            let al = (q[0] * w[1] - q[1] * w[0]) / det;
            let be = (u[0] * q[1] - u[1] * q[0]) / det;
            let pad = r / sin * (1.0 + 1e-9);
            lo = [lo[0].min(al - pad), lo[1].min(be - pad)];
            hi = [hi[0].max(al + pad), hi[1].max(be + pad)];
        }
        let at = |a: f64, b: f64| [o[0] + a * u[0] + b * w[0], o[1] + a * u[1] + b * w[1]];
        let v = [at(lo[0], lo[1]), at(hi[0], lo[1]), at(hi[0], hi[1]), at(lo[0], hi[1])];
        SectionParallelogram::from_vertices(v, 0, 2, s.phase_axis(), s.base_axis())
    };
    Ok((build(0, &anchor.0)?, build(1, &anchor.1)?))
}

/// Follows a point of the joint state space for `steps` steps and reports
/// whether it sits in `S1 × S2` at the final step.
pub fn point_lands<S: HybridSystem + ?Sized>(
    system: &S,
    x0: &[f64],
    steps: u64,
    tau: f64,
    s1: &SectionParallelogram,
    s2: &SectionParallelogram,
) -> Result<(bool, f64, f64)> {
    let mut orbit = PointOrbit::new(system, x0, tau);
    orbit.advance_to(steps)?;
    let x = orbit.state();
    let (p1, p2) = joint_phases(system, s1, s2, x);
    Ok((joint_contained(system, s1, s2, x, 0.0), p1, p2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::model::LinearSystem;

    fn slab() -> SectionParallelogram {
        SectionParallelogram::from_vertices([[0.0, 0.0], [0.1, 0.0], [0.6, 1.0], [0.5, 1.0]], 0, 2, 1, 0).unwrap()
    }

    #[test]
    fn unit_square_lattice_has_four_centers() {
        // e/f = 1 is not a section, so build the square's covering directly
        let v = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let s = SectionParallelogram::from_vertices(v, 0, 2, 1, 0);
        assert!(s.is_err());
        let s = SectionParallelogram::from_vertices([[0.0, 0.0], [0.999, 0.0], [0.999, 1.0], [0.0, 1.0]], 0, 2, 1, 0)
            .unwrap();
        let c = cover_section(&s, core::f64::consts::FRAC_1_SQRT_2).unwrap();
        assert_eq!(c.len(), 4);
    }

    #[test]
    fn large_radius_gives_centroid() {
        let s = slab();
        let c = cover_section(&s, 10.0).unwrap();
        assert_eq!(c, vec![s.centroid()]);
    }

    #[test]
    fn lattice_covers_slab() {
        let s = slab();
        let r = 0.03;
        let c = cover_section(&s, r).unwrap();
        let mut rng = crate::rng::SampleRng::seed(5);
        let mut hits = 0;
        while hits < 2000 {
            let p = [rng.range(0.0, 0.6), rng.range(0.0, 1.0)];
            if !s.contains_point(p) {
                continue;
            }
            hits += 1;
            let near = c.iter().any(|q| math::hypot(p[0] - q[0], p[1] - q[1]) <= r);
            assert!(near, "{p:?} uncovered");
        }
    }

    #[test]
    fn selection_budget_is_enforced() {
        let s = slab();
        let cov = Covering::of_sections(&s, &s, 0.05).unwrap();
        assert!(PairSelection::All { budget: 3 }.resolve(&cov).is_err());
        let d = PairSelection::Diagonal.resolve(&cov).unwrap();
        assert_eq!(d.len(), cov.centers1.len());
        assert!(PairSelection::Indices(vec![(0, 10_000)]).resolve(&cov).is_err());
    }

    #[test]
    fn proc1_rejects_oversized_ball() {
        let sys = LinearSystem::new(Matrix::zeros(4));
        let cfg = VerificationConfig::new(1e-3, 100, 1, 0.5, 0.0).unwrap();
        let s = slab();
        let b = ProductBall::shared(
            StateVector::new(vec![0.3, 0.5]).unwrap(),
            StateVector::new(vec![0.3, 0.5]).unwrap(),
            0.06,
        )
        .unwrap();
        assert!(proc1(&sys, &b, &s, &s, &cfg, &TubeOptions::default()).is_err());
    }

    #[test]
    fn proc1_misses_when_flow_leaves() {
        let drift = LinearSystem::new(Matrix::identity(4));
        let cfg = VerificationConfig::new(1e-2, 100, 1, 0.5, 0.0).unwrap();
        let s = slab();
        let b = ProductBall::shared(
            StateVector::new(vec![0.3, 0.5]).unwrap(),
            StateVector::new(vec![0.3, 0.5]).unwrap(),
            0.0,
        )
        .unwrap();
        let r = proc1(&drift, &b, &s, &s, &cfg, &TubeOptions::default()).unwrap();
        assert!(!r.contained && !r.success);
        assert!(r.diagnostic.is_some());
    }
}
