//! Symbolic Euler tubes: the joint center follows explicit Euler and a shared
//! radius bounds the distance of every trajectory started in the initial
//! product ball.
//!
//! Three radius rules are available. [`RadiusRule::LogNorm`] grows the radius
//! by `exp(max(λ, 0)·τ)` per step with `λ` the sampled logarithmic norm over
//! the current ball. [`RadiusRule::Variational`] carries the Jacobian `Φ` of
//! the discrete Euler map along the center and bounds each ball's radius by
//! the block norms of `Φ`, which tracks the actual growth of the enclosed set
//! and allows it to shrink again in contractive zones.
//! [`RadiusRule::Compounded`] is the variational bound restarted at every
//! period boundary, so the radius compounds the one-period growth factor.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hybrid::{crossing_of, jump_jacobian_with, reset_lipschitz, DiscreteEvent};
use crate::linalg::{block_spectral_norm, Matrix};
use crate::lognorm::{jacobian_into, FdWorkspace, LambdaSampler, DEFAULT_RANDOM_POINTS};
use crate::math;
use crate::model::{HybridSystem, ProductBall, StateVector, VerificationConfig};
use crate::rng::SampleRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum RadiusRule {
    /// `r ← r·exp(max(λ, 0)·τ)`, λ sampled over the current ball.
    LogNorm,
    /// Block norms of the linearized Euler map, times `1 + margin`.
    Variational,
    /// As `Variational`, with the linearization restarted from the current
    /// radius at every multiple of `period_steps`. Never tighter than
    /// `Variational`, because the block-norm bound is submultiplicative.
    #[default]
    Compounded,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TubeOptions {
    pub radius_rule: RadiusRule,
    /// Steps between λ re-estimates (log-norm rule only).
    pub lambda_stride: u64,
    /// Steps between recorded samples.
    pub record_stride: u64,
    /// Abort once the radius exceeds this value.
    pub radius_cap: f64,
    /// Random interior points in each λ estimate.
    pub random_points: usize,
    pub seed: u64,
    /// Add the Euler local truncation bound `τ²/2·‖J f‖` each step.
    pub local_error: bool,
    /// Maximum number of discrete events; `None` means `10·k`.
    pub max_events: Option<usize>,
    /// Relative safety margin of the variational rule.
    pub margin: f64,
}

impl Default for TubeOptions {
    fn default() -> Self {
        TubeOptions {
            radius_rule: RadiusRule::default(),
            lambda_stride: 1,
            record_stride: 100,
            radius_cap: 1.0,
            random_points: DEFAULT_RANDOM_POINTS,
            seed: 0,
            local_error: false,
            max_events: None,
            margin: 1e-3,
        }
    }
}

impl TubeOptions {
    pub fn validate(&self) -> Result<()> {
        if self.lambda_stride < 1 || self.record_stride < 1 {
            return Err(Error::invalid("lambda_stride and record_stride must be >= 1"));
        }
        if !(self.radius_cap > 0.0) {
            return Err(Error::invalid("radius_cap must be > 0"));
        }
        if !(self.margin >= 0.0) || !self.margin.is_finite() {
            return Err(Error::invalid("margin must be finite and >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceSample {
    pub step: u64,
    pub t: f64,
    pub ball: ProductBall,
    pub lambda: f64,
    /// A discrete jump happened during the step ending here.
    pub event: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReachTrace {
    pub samples: Vec<TraceSample>,
    pub events: Vec<DiscreteEvent>,
    pub config: VerificationConfig,
    pub options: TubeOptions,
}

impl ReachTrace {
    pub fn sample_at(&self, step: u64) -> Option<&TraceSample> {
        self.samples.binary_search_by_key(&step, |s| s.step).ok().map(|i| &self.samples[i])
    }

    pub fn last(&self) -> &TraceSample {
        self.samples.last().expect("trace has at least the initial sample")
    }
}

/// `c + τ·f(c)`.
pub fn euler_step<S: HybridSystem + ?Sized>(system: &S, c: &StateVector, tau: f64) -> Result<StateVector> {
    if !(tau > 0.0) {
        return Err(Error::invalid("tau must be > 0"));
    }
    let mut dx = vec![0.0; c.dim()];
    system.field(c, &mut dx);
    let next: Vec<f64> = c.iter().zip(&dx).map(|(x, d)| x + tau * d).collect();
    if next.iter().any(|v| !v.is_finite()) {
        return Err(Error::Divergence { step: 1 });
    }
    StateVector::new(next)
}

/// `r·exp(max(λ, 0)·τ)`.
pub fn radius_step(r: f64, lambda: f64, tau: f64) -> f64 {
    r * math::exp(lambda.max(0.0) * tau)
}

/// `r(P·τ) / r(0)` from a trace that records step `period_steps`.
pub fn expansion_factor(trace: &ReachTrace, period_steps: u64) -> Result<f64> {
    let r0 = trace.samples.first().map(|s| s.ball.radius()).unwrap_or(0.0);
    if r0 == 0.0 {
        return Err(Error::PointInitialSet);
    }
    let s = trace.sample_at(period_steps).ok_or(Error::MissingStep(period_steps))?;
    Ok(s.ball.radius() / r0)
}

/// Step-by-step tube engine used by [`reach_tube`] and the verifiers.
pub struct Tube<'a, S: HybridSystem + ?Sized> {
    system: &'a S,
    tau: f64,
    period: u64,
    options: TubeOptions,
    max_events: usize,
    step: u64,
    x: Vec<f64>,
    next: Vec<f64>,
    dx: Vec<f64>,
    r: f64,
    r0: [f64; 2],
    lambda: f64,
    growth: f64,
    prev_growth: f64,
    phi: Matrix,
    j: Matrix,
    tmp: Matrix,
    ws: FdWorkspace,
    sampler: LambdaSampler,
    rng: SampleRng,
    events: Vec<DiscreteEvent>,
    jumped: bool,
}

impl<'a, S: HybridSystem + ?Sized> Tube<'a, S> {
    pub fn new(system: &'a S, b0: &ProductBall, config: &VerificationConfig, options: &TubeOptions) -> Result<Self> {
        config.validate()?;
        options.validate()?;
        let n = system.dim();
        if b0.subsystem_dim() != system.subsystem_dim() || 2 * b0.subsystem_dim() != n {
            return Err(Error::invalid("initial ball does not match the system's subsystem layout"));
        }
        let x = b0.joint_center(system);
        let r0 = [b0.b1.radius, b0.b2.radius];
        let mut tube = Tube {
            system,
            tau: config.tau,
            period: config.period_steps,
            options: *options,
            max_events: options.max_events.unwrap_or(10 * config.k as usize),
            step: 0,
            next: vec![0.0; n],
            dx: vec![0.0; n],
            r: 0.0,
            r0,
            lambda: 0.0,
            growth: 1.0,
            prev_growth: 1.0,
            phi: Matrix::identity(n),
            j: Matrix::zeros(n),
            tmp: Matrix::zeros(n),
            ws: FdWorkspace::new(n),
            sampler: LambdaSampler::new(n, options.random_points),
            rng: SampleRng::seed(options.seed),
            events: Vec::new(),
            jumped: false,
            x,
        };
        tube.r = r0[0].max(r0[1]);
        if tube.options.radius_rule == RadiusRule::LogNorm {
            tube.estimate_lambda()?;
        }
        Ok(tube)
    }

    pub fn step_index(&self) -> u64 {
        self.step
    }

    pub fn time(&self) -> f64 {
        self.step as f64 * self.tau
    }

    /// Joint center in system coordinates.
    pub fn center(&self) -> &[f64] {
        &self.x
    }

    pub fn radius(&self) -> f64 {
        self.r
    }

    /// λ used for (log-norm rule) or realized by (variational rule) the
    /// latest step.
    pub fn lambda(&self) -> f64 {
        if self.options.radius_rule == RadiusRule::LogNorm {
            self.lambda
        } else if self.step == 0 {
            0.0
        } else {
            math::ln(self.growth / self.prev_growth) / self.tau
        }
    }

    pub fn events(&self) -> &[DiscreteEvent] {
        &self.events
    }

    pub fn into_events(self) -> Vec<DiscreteEvent> {
        self.events
    }

    /// Whether the last step contained a discrete jump.
    pub fn jumped(&self) -> bool {
        self.jumped
    }

    /// Linearized Euler map accumulated so far (variational rule).
    pub fn variational_matrix(&self) -> &Matrix {
        &self.phi
    }

    pub fn product_ball(&self) -> ProductBall {
        // the center is finite by construction
        ProductBall::from_joint(self.system, &self.x, self.r).expect("finite tube state")
    }

    fn estimate_lambda(&mut self) -> Result<()> {
        let est = self.sampler.sampled_sup(self.system, &self.x, self.r, self.r, &mut self.rng)?;
        self.lambda = est.value;
        Ok(())
    }

    fn variational_growth(&self) -> f64 {
        let s0 = self.system.subsystem(0);
        let s1 = self.system.subsystem(1);
        let w = if self.r0 == [0.0, 0.0] { [1.0, 1.0] } else { self.r0 };
        let scale = w[0].max(w[1]);
        let mut best: f64 = 0.0;
        for rows in [s0, s1] {
            let mut acc = 0.0;
            for (cols, wj) in [(s0, w[0]), (s1, w[1])] {
                if wj > 0.0 {
                    acc += block_spectral_norm(&self.phi, rows, cols).unwrap_or(f64::INFINITY) * wj;
                }
            }
            best = best.max(acc);
        }
        best / scale
    }

    /// Advances one Euler step.
    pub fn step(&mut self) -> Result<()> {
        let n = self.system.dim();
        let tau = self.tau;
        let target = self.step + 1;
        self.system.field(&self.x, &mut self.dx);
        for i in 0..n {
            self.next[i] = self.x[i] + tau * self.dx[i];
        }
        if self.next.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { step: target });
        }
        let variational = self.options.radius_rule != RadiusRule::LogNorm;
        if self.options.radius_rule == RadiusRule::Compounded && self.step > 0 && self.step % self.period == 0 {
            self.phi.set_identity();
            self.r0 = [self.r, self.r];
            self.growth = 1.0;
            self.prev_growth = 1.0;
        }
        if variational || self.options.local_error {
            jacobian_into(self.system, &self.x, &mut self.j, &mut self.ws)?;
        }
        if !variational && self.step % self.options.lambda_stride == 0 && self.step > 0 {
            self.estimate_lambda()?;
        }

        self.jumped = false;
        let crossing = match self.system.jump() {
            Some(jump) => crossing_of(jump, &self.x, &self.next).map(|c| (jump, c)),
            None => None,
        };

        let mut r_new = if variational { self.r } else { radius_step(self.r, self.lambda, tau) };
        let mut pending = None;
        if let Some((jump, c)) = crossing {
            if self.events.len() >= self.max_events {
                return Err(Error::ChatteringGuard { max_events: self.max_events });
            }
            let pre = ProductBall::from_joint(self.system, &c.point, self.r)?;
            if variational {
                let d: Vec<f64> = self.dx.iter().map(|v| v * tau).collect();
                let jj = jump_jacobian_with(jump, &self.x, &d, &self.j, c.theta, tau)?;
                jj.mul_into(&self.phi, &mut self.tmp);
                self.phi.copy_from(&self.tmp);
            } else {
                r_new *= reset_lipschitz(jump, &c.point)?;
            }
            jump.reset(&c.point, &mut self.next);
            if self.next.iter().any(|v| !v.is_finite()) {
                return Err(Error::ResetFailed { point: c.point });
            }
            self.jumped = true;
            let bracket = ((self.step as f64 + c.bracket.0) * tau, (self.step as f64 + c.bracket.1) * tau);
            pending = Some((c.theta, bracket, pre));
        } else if variational {
            // Φ ← (I + τJ)Φ
            self.j.mul_into(&self.phi, &mut self.tmp);
            for (p, t) in self.phi.as_mut_slice().iter_mut().zip(self.tmp.as_slice()) {
                *p += tau * t;
            }
        }

        if variational {
            let g = self.variational_growth();
            self.prev_growth = self.growth;
            self.growth = g;
            r_new = (1.0 + self.options.margin) * g * self.r0[0].max(self.r0[1]);
        }
        if self.options.local_error {
            let jf = self.j.mul_vec(&self.dx);
            r_new += 0.5 * tau * tau * math::norm2(&jf);
        }
        if !(r_new <= self.options.radius_cap) {
            return Err(Error::RadiusBlowUp { step: target, radius: r_new, cap: self.options.radius_cap });
        }
        core::mem::swap(&mut self.x, &mut self.next);
        self.r = r_new;
        self.step = target;
        if let Some((theta, crossing_bracket, pre_state)) = pending {
            let post_state = self.product_ball();
            self.events.push(DiscreteEvent { step_index: target, theta, crossing_bracket, pre_state, post_state });
        }
        Ok(())
    }
}

/// Point trajectory of the same discrete scheme the tube encloses: explicit
/// Euler steps, with the guard and reset applied exactly as for tube centers.
pub struct PointOrbit<'a, S: HybridSystem + ?Sized> {
    system: &'a S,
    tau: f64,
    step: u64,
    x: Vec<f64>,
    next: Vec<f64>,
    dx: Vec<f64>,
    jumps: usize,
}

impl<'a, S: HybridSystem + ?Sized> PointOrbit<'a, S> {
    pub fn new(system: &'a S, x0: &[f64], tau: f64) -> Self {
        let n = system.dim();
        PointOrbit { system, tau, step: 0, x: x0.to_vec(), next: vec![0.0; n], dx: vec![0.0; n], jumps: 0 }
    }

    pub fn state(&self) -> &[f64] {
        &self.x
    }

    pub fn step_index(&self) -> u64 {
        self.step
    }

    pub fn jumps(&self) -> usize {
        self.jumps
    }

    /// Advances one step; returns whether a reset was applied.
    pub fn step(&mut self) -> Result<bool> {
        self.system.field(&self.x, &mut self.dx);
        for i in 0..self.x.len() {
            self.next[i] = self.x[i] + self.tau * self.dx[i];
        }
        let mut jumped = false;
        if let Some(jump) = self.system.jump() {
            if let Some(c) = crossing_of(jump, &self.x, &self.next) {
                jump.reset(&c.point, &mut self.next);
                jumped = true;
                self.jumps += 1;
            }
        }
        self.step += 1;
        if self.next.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { step: self.step });
        }
        core::mem::swap(&mut self.x, &mut self.next);
        Ok(jumped)
    }

    pub fn advance_to(&mut self, step: u64) -> Result<()> {
        while self.step < step {
            self.step()?;
        }
        Ok(())
    }
}

/// Runs a tube for `steps` Euler steps and records samples at every
/// `record_stride`-th step, at every period boundary, after every discrete
/// event and at the final step.
pub fn reach_tube<S: HybridSystem + ?Sized>(
    system: &S,
    b0: &ProductBall,
    steps: u64,
    config: &VerificationConfig,
    options: &TubeOptions,
) -> Result<ReachTrace> {
    if steps < 1 {
        return Err(Error::invalid("steps must be >= 1"));
    }
    let mut tube = Tube::new(system, b0, config, options)?;
    let mut samples = Vec::with_capacity((steps / options.record_stride.max(1)) as usize + 2);
    let sample = |tube: &Tube<'_, S>| TraceSample {
        step: tube.step_index(),
        t: tube.time(),
        ball: tube.product_ball(),
        lambda: tube.lambda(),
        event: tube.jumped(),
    };
    samples.push(sample(&tube));
    for _ in 0..steps {
        tube.step()?;
        let s = tube.step_index();
        if s % options.record_stride == 0 || s % config.period_steps == 0 || s == steps || tube.jumped() {
            samples.push(sample(&tube));
        }
    }
    Ok(ReachTrace { samples, events: tube.into_events(), config: *config, options: *options })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::LinearSystem;

    fn decay() -> LinearSystem {
        LinearSystem::new(Matrix::from_rows(&[&[-1.0, 0.0], &[0.0, -1.0]]))
    }

    fn ball(c1: f64, c2: f64, r: f64) -> ProductBall {
        ProductBall::shared(StateVector::new(vec![c1]).unwrap(), StateVector::new(vec![c2]).unwrap(), r).unwrap()
    }

    #[test]
    fn euler_step_examples() {
        let c = StateVector::new(vec![1.0, 0.0]).unwrap();
        let next = euler_step(&decay(), &c, 0.1).unwrap();
        assert!((next[0] - 0.9).abs() < 1e-15);
        let zero = LinearSystem::new(Matrix::zeros(2));
        assert_eq!(euler_step(&zero, &c, 0.3).unwrap(), c);
    }

    #[test]
    fn radius_step_examples() {
        assert_eq!(radius_step(1.0, -5.0, 0.1), 1.0);
        assert_eq!(radius_step(1.0, 0.0, 0.1), 1.0);
        let tau = 2e-4;
        let r = radius_step(2e-8, core::f64::consts::LN_2 / tau, tau);
        assert!((r - 4e-8).abs() < 1e-20);
    }

    #[test]
    fn contraction_keeps_log_norm_radius() {
        let cfg = VerificationConfig::new(0.01, 50, 1, 0.0, 0.1).unwrap();
        let opts = TubeOptions { radius_rule: RadiusRule::LogNorm, record_stride: 10, ..Default::default() };
        let tr = reach_tube(&decay(), &ball(1.0, 2.0, 0.1), 100, &cfg, &opts).unwrap();
        assert!(tr.samples.iter().all(|s| s.ball.radius() == 0.1));
        assert!(tr.last().ball.b1.center[0] < 0.5);
        assert_eq!(expansion_factor(&tr, 50).unwrap(), 1.0);
    }

    #[test]
    fn variational_rule_on_linear_decay_shrinks() {
        let cfg = VerificationConfig::new(0.01, 50, 1, 0.0, 0.1).unwrap();
        let opts = TubeOptions { radius_rule: RadiusRule::Variational, margin: 0.0, ..Default::default() };
        let tr = reach_tube(&decay(), &ball(1.0, 2.0, 0.1), 100, &cfg, &opts).unwrap();
        let expect = 0.1 * 0.99f64.powi(100);
        assert!((tr.last().ball.radius() - expect).abs() < 1e-15);
    }

    /// Rotation followed by a strong contraction of one axis: the restarted
    /// bound loses the cancellation and stays above the plain variational one.
    fn shear() -> LinearSystem {
        LinearSystem::new(Matrix::from_rows(&[&[-3.0, 1.0], &[-1.0, 0.0]]))
    }

    #[test]
    fn compounded_dominates_variational() {
        let cfg = VerificationConfig::new(0.01, 40, 1, 0.0, 0.1).unwrap();
        let run = |rule| {
            let opts = TubeOptions { radius_rule: rule, record_stride: 1, ..Default::default() };
            reach_tube(&shear(), &ball(0.3, -0.2, 0.1), 200, &cfg, &opts).unwrap()
        };
        let (v, c) = (run(RadiusRule::Variational), run(RadiusRule::Compounded));
        for (a, b) in v.samples.iter().zip(&c.samples) {
            assert_eq!(a.ball.b1.center, b.ball.b1.center);
            assert!(b.ball.radius() >= a.ball.radius() * (1.0 - 1e-12), "step {}", a.step);
        }
        assert!(c.last().ball.radius() > v.last().ball.radius());
    }

    #[test]
    fn compounded_radius_restarts_at_period_boundaries() {
        let cfg = VerificationConfig::new(0.01, 10, 1, 0.0, 0.1).unwrap();
        let opts = TubeOptions { margin: 0.0, record_stride: 1, ..Default::default() };
        let tr = reach_tube(&decay(), &ball(1.0, 2.0, 0.1), 30, &cfg, &opts).unwrap();
        for k in 1..=3u64 {
            let r = tr.sample_at(10 * k).unwrap().ball.radius();
            assert!((r - 0.1 * 0.99f64.powi(10 * k as i32)).abs() < 1e-15);
        }
    }

    #[test]
    fn point_initial_set_has_no_factor() {
        let cfg = VerificationConfig::new(0.01, 5, 1, 0.0, 0.0).unwrap();
        let tr = reach_tube(&decay(), &ball(1.0, 2.0, 0.0), 10, &cfg, &TubeOptions::default()).unwrap();
        assert_eq!(expansion_factor(&tr, 5), Err(Error::PointInitialSet));
    }

    #[test]
    fn recording_includes_period_boundaries_and_final_step() {
        let cfg = VerificationConfig::new(0.01, 7, 1, 0.0, 0.1).unwrap();
        let opts = TubeOptions { record_stride: 5, ..Default::default() };
        let tr = reach_tube(&decay(), &ball(1.0, 2.0, 0.1), 16, &cfg, &opts).unwrap();
        let steps: Vec<u64> = tr.samples.iter().map(|s| s.step).collect();
        assert_eq!(steps, vec![0, 5, 7, 10, 14, 15, 16]);
    }

    #[test]
    fn steps_must_be_positive() {
        let cfg = VerificationConfig::new(0.01, 7, 1, 0.0, 0.1).unwrap();
        assert!(reach_tube(&decay(), &ball(1.0, 2.0, 0.1), 0, &cfg, &TubeOptions::default()).is_err());
    }

    #[test]
    fn radius_cap_aborts() {
        let grow = LinearSystem::new(Matrix::from_rows(&[&[5.0, 0.0], &[0.0, 5.0]]));
        let cfg = VerificationConfig::new(0.1, 10, 1, 0.0, 0.5).unwrap();
        let r = reach_tube(&grow, &ball(1.0, 1.0, 0.5), 100, &cfg, &TubeOptions::default());
        assert!(matches!(r, Err(Error::RadiusBlowUp { .. })));
    }
}
