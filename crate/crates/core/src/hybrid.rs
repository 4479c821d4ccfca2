//! Guard crossings and resets of a ball enclosure.
//!
//! Only the center trajectory is tested against the guard. When the center
//! crosses between two Euler steps the crossing point is located on the
//! linear interpolant, the reset is applied there and the rest of the step
//! is dropped: flow resumes from the reset state at the next step boundary.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::lognorm::{jacobian_into, FdWorkspace};
use crate::model::{fd_step, Ball, HybridSystem, Jump, ProductBall, StateVector, VerificationConfig};
use crate::reach::{reach_tube, ReachTrace, TubeOptions};

/// `|g|` at which the bisection stops.
pub const GUARD_TOLERANCE: f64 = 1e-12;
/// Multiplier applied to the reset's largest singular value.
pub const RESET_SAFETY: f64 = 1.1;

#[derive(Debug, Clone, PartialEq)]
pub struct Crossing {
    /// Fraction of the step at which the interpolated center meets the guard.
    pub theta: f64,
    /// Final bisection bracket `[θ_lo, θ_hi] ⊂ [0, 1]`.
    pub bracket: (f64, f64),
    pub point: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteEvent {
    pub step_index: u64,
    pub theta: f64,
    /// Time interval bracketing the crossing, width at most `τ`.
    pub crossing_bracket: (f64, f64),
    pub pre_state: ProductBall,
    pub post_state: ProductBall,
}

fn interpolate(a: &[f64], b: &[f64], theta: f64, out: &mut [f64]) {
    for ((o, x), y) in out.iter_mut().zip(a).zip(b) {
        *o = x + theta * (y - x);
    }
}

/// Locates a guard crossing between two consecutive Euler states.
///
/// A crossing requires a strict sign change of the level function (either
/// direction) and the side condition at the located point.
pub fn guard_crossing<S: HybridSystem + ?Sized>(system: &S, c_prev: &[f64], c_next: &[f64]) -> Option<Crossing> {
    let jump = system.jump()?;
    crossing_of(jump, c_prev, c_next)
}

pub(crate) fn crossing_of(jump: &dyn Jump, c_prev: &[f64], c_next: &[f64]) -> Option<Crossing> {
    let g0 = jump.level(c_prev);
    let g1 = jump.level(c_next);
    if !(g0 * g1 < 0.0) {
        return None;
    }
    let mut p = vec![0.0; c_prev.len()];
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut theta = 0.5;
    for _ in 0..200 {
        theta = 0.5 * (lo + hi);
        interpolate(c_prev, c_next, theta, &mut p);
        let g = jump.level(&p);
        if g.abs() <= GUARD_TOLERANCE {
            break;
        }
        if (g < 0.0) == (g0 < 0.0) {
            lo = theta;
        } else {
            hi = theta;
        }
        if hi - lo <= f64::EPSILON {
            break;
        }
    }
    interpolate(c_prev, c_next, theta, &mut p);
    if !jump.admissible(&p) {
        return None;
    }
    Some(Crossing { theta, bracket: (lo, hi), point: p })
}

/// Reset Jacobian at `x`, analytic when the model provides it.
pub fn reset_jacobian<S: HybridSystem + ?Sized>(system: &S, x: &[f64]) -> Result<Matrix> {
    let jump = system.jump().ok_or_else(|| Error::invalid("system has no reset"))?;
    Ok(reset_jacobian_of(jump, x))
}

pub(crate) fn reset_jacobian_of(jump: &dyn Jump, x: &[f64]) -> Matrix {
    let n = x.len();
    let mut dr = Matrix::zeros(n);
    if jump.reset_jacobian(x, &mut dr) {
        return dr;
    }
    let h = fd_step(x);
    let mut y = x.to_vec();
    let mut rp = vec![0.0; n];
    let mut rm = vec![0.0; n];
    for j in 0..n {
        y[j] = x[j] + h;
        jump.reset(&y, &mut rp);
        y[j] = x[j] - h;
        jump.reset(&y, &mut rm);
        y[j] = x[j];
        for i in 0..n {
            dr[(i, j)] = (rp[i] - rm[i]) / (2.0 * h);
        }
    }
    dr
}

/// Resets a ball on the full state: the center is mapped by the reset and
/// the radius is scaled by `1.1·σ_max(DR)` at the crossing point.
pub fn apply_reset<S: HybridSystem + ?Sized>(system: &S, ball: &Ball, crossing_point: &[f64]) -> Result<Ball> {
    let jump = system.jump().ok_or_else(|| Error::invalid("system has no reset"))?;
    let mut c = vec![0.0; crossing_point.len()];
    jump.reset(crossing_point, &mut c);
    if c.iter().any(|v| !v.is_finite()) {
        return Err(Error::ResetFailed { point: crossing_point.to_vec() });
    }
    let factor = reset_lipschitz(jump, crossing_point)?;
    Ball::new(StateVector::new(c)?, ball.radius * factor)
}

pub(crate) fn reset_lipschitz(jump: &dyn Jump, x: &[f64]) -> Result<f64> {
    let dr = reset_jacobian_of(jump, x);
    let s = dr.spectral_norm().ok_or_else(|| Error::EigenNonConvergent { point: x.to_vec() })?;
    if !s.is_finite() {
        return Err(Error::ResetFailed { point: x.to_vec() });
    }
    Ok(RESET_SAFETY * s)
}

/// Jacobian of the discrete jump `x ↦ R(x + θ(x)·τf(x))`, where `θ(x)` is
/// the interpolated crossing fraction:
///
/// `DR(x_c) · (I − d ∇gᵀ / (∇gᵀ d)) · (I + θτ J(x))`, with `d = τ f(x)`.
pub fn jump_jacobian<S: HybridSystem + ?Sized>(system: &S, x: &[f64], theta: f64, tau: f64) -> Result<Matrix> {
    let jump = system.jump().ok_or_else(|| Error::invalid("system has no guard"))?;
    let n = system.dim();
    let mut jx = Matrix::zeros(n);
    let mut ws = FdWorkspace::new(n);
    jacobian_into(system, x, &mut jx, &mut ws)?;
    let mut d = vec![0.0; n];
    system.field(x, &mut d);
    d.iter_mut().for_each(|v| *v *= tau);
    jump_jacobian_with(jump, x, &d, &jx, theta, tau)
}

pub(crate) fn jump_jacobian_with(
    jump: &dyn Jump,
    x: &[f64],
    d: &[f64],
    jx: &Matrix,
    theta: f64,
    tau: f64,
) -> Result<Matrix> {
    let n = x.len();
    let xc: Vec<f64> = x.iter().zip(d).map(|(a, b)| a + theta * b).collect();
    let mut grad = vec![0.0; n];
    jump.level_gradient(&xc, &mut grad);
    let gd: f64 = grad.iter().zip(d).map(|(a, b)| a * b).sum();
    if gd == 0.0 || !gd.is_finite() {
        return Err(Error::ResetFailed { point: xc });
    }
    // P = I − d ∇gᵀ / (∇gᵀ d)
    let mut p = Matrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            p[(i, j)] -= d[i] * grad[j] / gd;
        }
    }
    let mut flow = Matrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            flow[(i, j)] += theta * tau * jx[(i, j)];
        }
    }
    let dr = reset_jacobian_of(jump, &xc);
    let out = dr.mul(&p.mul(&flow));
    if !out.is_finite() {
        return Err(Error::ResetFailed { point: xc });
    }
    Ok(out)
}

/// Tube propagation with guard handling. The engine is shared with
/// [`reach_tube`]; for a system without a guard both are identical.
pub fn hybrid_reach_tube<S: HybridSystem + ?Sized>(
    system: &S,
    b0: &ProductBall,
    steps: u64,
    config: &VerificationConfig,
    options: &TubeOptions,
) -> Result<ReachTrace> {
    reach_tube(system, b0, steps, config, options)
}
