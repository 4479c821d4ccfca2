//! Local one-sided Lipschitz constant `λ` of a vector field, i.e. the
//! Euclidean logarithmic norm `μ₂(J) = λ_max((J + Jᵀ)/2)` of its Jacobian,
//! maximized over a finite sample of a ball region.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::{fd_step, HybridSystem, ProductBall};
use crate::rng::SampleRng;

/// Random interior points used by default on top of the deterministic ones.
pub const DEFAULT_RANDOM_POINTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LambdaMethod {
    CenterOnly,
    SampledSup,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaEstimate {
    pub value: f64,
    pub sample_count: usize,
    pub method: LambdaMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Zone {
    Contractive,
    Expansive,
}

impl Zone {
    /// `λ = 0` is counted as expansive so radii never shrink at a boundary.
    pub fn of(value: f64) -> Zone {
        if value < 0.0 {
            Zone::Contractive
        } else {
            Zone::Expansive
        }
    }
}

pub fn classify_zone(lambda: &LambdaEstimate) -> Zone {
    Zone::of(lambda.value)
}

/// Jacobian of `system` at `x`: the analytic one when available, otherwise
/// central differences.
pub fn jacobian<S: HybridSystem + ?Sized>(system: &S, x: &[f64]) -> Result<Matrix> {
    let mut j = Matrix::zeros(system.dim());
    let mut ws = FdWorkspace::new(system.dim());
    jacobian_into(system, x, &mut j, &mut ws)?;
    Ok(j)
}

/// Scratch buffers for finite-difference Jacobians.
#[derive(Debug, Clone)]
pub struct FdWorkspace {
    y: Vec<f64>,
    fp: Vec<f64>,
    fm: Vec<f64>,
}

impl FdWorkspace {
    pub fn new(n: usize) -> Self {
        FdWorkspace { y: vec![0.0; n], fp: vec![0.0; n], fm: vec![0.0; n] }
    }
}

pub fn jacobian_into<S: HybridSystem + ?Sized>(
    system: &S,
    x: &[f64],
    out: &mut Matrix,
    ws: &mut FdWorkspace,
) -> Result<()> {
    let n = system.dim();
    if x.len() != n {
        return Err(Error::invalid("state dimension does not match the system"));
    }
    if system.analytic_jacobian(x, out) {
        if !out.is_finite() {
            return Err(Error::FieldEvaluation { point: x.to_vec() });
        }
        return Ok(());
    }
    finite_difference_jacobian(system, x, out, ws)
}

/// Central differences with step `max(1e-6, 1e-6·‖x‖∞)`.
pub fn finite_difference_jacobian<S: HybridSystem + ?Sized>(
    system: &S,
    x: &[f64],
    out: &mut Matrix,
    ws: &mut FdWorkspace,
) -> Result<()> {
    let n = system.dim();
    let h = fd_step(x);
    ws.y.copy_from_slice(x);
    for j in 0..n {
        ws.y[j] = x[j] + h;
        system.field(&ws.y, &mut ws.fp);
        ws.y[j] = x[j] - h;
        system.field(&ws.y, &mut ws.fm);
        ws.y[j] = x[j];
        for i in 0..n {
            let d = (ws.fp[i] - ws.fm[i]) / (2.0 * h);
            if !d.is_finite() {
                return Err(Error::FieldEvaluation { point: x.to_vec() });
            }
            out[(i, j)] = d;
        }
    }
    Ok(())
}

/// `μ₂(J)`; `None` when the eigen-iteration fails.
pub fn log_norm(j: &Matrix) -> Option<f64> {
    j.log_norm2()
}

/// Sampled supremum of `μ₂(J(p))` over `region`.
///
/// Sample points are the joint center, `center ± r·e_k` for every coordinate
/// of each ball (the other ball held at its center) and `random_points`
/// points drawn uniformly from the product ball. The random draws come from
/// one seeded stream, so a larger count only appends points and the estimate
/// can only grow.
pub fn one_sided_lipschitz<S: HybridSystem + ?Sized>(
    system: &S,
    region: &ProductBall,
    random_points: usize,
    seed: u64,
) -> Result<LambdaEstimate> {
    let mut sampler = LambdaSampler::new(system.dim(), random_points);
    let center = region.joint_center(system);
    let mut rng = SampleRng::seed(seed);
    sampler.sampled_sup(system, &center, region.b1.radius, region.b2.radius, &mut rng)
}

/// `μ₂(J)` at the joint center only.
pub fn center_lipschitz<S: HybridSystem + ?Sized>(system: &S, region: &ProductBall) -> Result<LambdaEstimate> {
    let mut sampler = LambdaSampler::new(system.dim(), 0);
    let center = region.joint_center(system);
    sampler.center_only(system, &center)
}

/// Reusable buffers for repeated λ estimates inside a tube.
#[derive(Debug, Clone)]
pub struct LambdaSampler {
    random_points: usize,
    j: Matrix,
    ws: FdWorkspace,
    p: Vec<f64>,
    offset: Vec<f64>,
}

impl LambdaSampler {
    pub fn new(n: usize, random_points: usize) -> Self {
        LambdaSampler {
            random_points,
            j: Matrix::zeros(n),
            ws: FdWorkspace::new(n),
            p: vec![0.0; n],
            offset: vec![0.0; n],
        }
    }

    fn mu_at<S: HybridSystem + ?Sized>(&mut self, system: &S, use_p: bool, center: &[f64]) -> Result<f64> {
        let x: &[f64] = if use_p { &self.p } else { center };
        jacobian_into(system, x, &mut self.j, &mut self.ws)?;
        log_norm(&self.j).ok_or_else(|| Error::EigenNonConvergent { point: x.to_vec() })
    }

    pub fn center_only<S: HybridSystem + ?Sized>(&mut self, system: &S, center: &[f64]) -> Result<LambdaEstimate> {
        let value = self.mu_at(system, false, center)?;
        Ok(LambdaEstimate { value, sample_count: 1, method: LambdaMethod::CenterOnly })
    }

    /// Balls of radii `r1`, `r2` around the joint `center`.
    pub fn sampled_sup<S: HybridSystem + ?Sized>(
        &mut self,
        system: &S,
        center: &[f64],
        r1: f64,
        r2: f64,
        rng: &mut SampleRng,
    ) -> Result<LambdaEstimate> {
        let mut best = self.mu_at(system, false, center)?;
        let mut count = 1;
        for (sub, r) in [(system.subsystem(0), r1), (system.subsystem(1), r2)] {
            if r == 0.0 {
                continue;
            }
            for &i in sub {
                for s in [-1.0, 1.0] {
                    self.p.copy_from_slice(center);
                    self.p[i] += s * r;
                    best = best.max(self.mu_at(system, true, center)?);
                    count += 1;
                }
            }
        }
        let m = system.subsystem_dim();
        for _ in 0..self.random_points {
            self.p.copy_from_slice(center);
            for (sub, r) in [(system.subsystem(0), r1), (system.subsystem(1), r2)] {
                rng.in_ball(r, &mut self.offset[..m]);
                for (k, &i) in sub.iter().enumerate() {
                    self.p[i] += self.offset[k];
                }
            }
            best = best.max(self.mu_at(system, true, center)?);
            count += 1;
        }
        Ok(LambdaEstimate { value: best, sample_count: count, method: LambdaMethod::SampledSup })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{LinearSystem, StateVector};

    fn region(n: usize, c: f64, r: f64) -> (LinearSystem, ProductBall) {
        let mut a = Matrix::zeros(n);
        for i in 0..n {
            a[(i, i)] = -1.0;
        }
        let sys = LinearSystem::new(a);
        let half = n / 2;
        let pb = ProductBall::shared(
            StateVector::new(vec![c; half]).unwrap(),
            StateVector::new(vec![c; half]).unwrap(),
            r,
        )
        .unwrap();
        (sys, pb)
    }

    #[test]
    fn negative_identity_gives_minus_one() {
        for n in [2, 4, 6] {
            let (sys, pb) = region(n, 0.3, 0.1);
            let est = one_sided_lipschitz(&sys, &pb, 8, 1).unwrap();
            assert_eq!(est.value, -1.0);
            assert_eq!(est.sample_count, 1 + 2 * n + 8);
        }
    }

    #[test]
    fn rotation_gives_zero() {
        let sys = LinearSystem::new(Matrix::from_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]));
        let pb = ProductBall::shared(
            StateVector::new(vec![0.5]).unwrap(),
            StateVector::new(vec![0.2]).unwrap(),
            0.1,
        )
        .unwrap();
        let est = one_sided_lipschitz(&sys, &pb, 8, 3).unwrap();
        assert_eq!(est.value, 0.0);
        assert_eq!(classify_zone(&est), Zone::Expansive);
    }

    #[test]
    fn zones() {
        let e = |v| LambdaEstimate { value: v, sample_count: 1, method: LambdaMethod::CenterOnly };
        assert_eq!(classify_zone(&e(-0.5)), Zone::Contractive);
        assert_eq!(classify_zone(&e(0.0)), Zone::Expansive);
        assert_eq!(classify_zone(&e(1.95)), Zone::Expansive);
    }

    struct Cubic;
    impl HybridSystem for Cubic {
        fn name(&self) -> &str {
            "cubic"
        }
        fn dim(&self) -> usize {
            2
        }
        fn subsystem(&self, i: usize) -> &[usize] {
            if i == 0 {
                &[0]
            } else {
                &[1]
            }
        }
        fn field(&self, x: &[f64], dx: &mut [f64]) {
            dx[0] = x[0] * x[0] * x[1];
            dx[1] = -x[1] * x[1] * x[1] + x[0];
        }
    }

    #[test]
    fn finite_differences_on_polynomial() {
        let x = [0.7, -1.3];
        let j = jacobian(&Cubic, &x).unwrap();
        let expect = [[2.0 * x[0] * x[1], x[0] * x[0]], [1.0, -3.0 * x[1] * x[1]]];
        for i in 0..2 {
            for k in 0..2 {
                assert!((j[(i, k)] - expect[i][k]).abs() < 1e-8, "{i}{k}");
            }
        }
    }

    #[test]
    fn sampled_sup_dominates_center() {
        let pb = ProductBall::shared(
            StateVector::new(vec![0.7]).unwrap(),
            StateVector::new(vec![-1.3]).unwrap(),
            0.2,
        )
        .unwrap();
        let c = center_lipschitz(&Cubic, &pb).unwrap();
        let s = one_sided_lipschitz(&Cubic, &pb, 8, 9).unwrap();
        assert!(s.value >= c.value);
        assert_eq!(c.method, LambdaMethod::CenterOnly);
    }

    #[test]
    fn nan_field_is_reported() {
        struct Bad;
        impl HybridSystem for Bad {
            fn name(&self) -> &str {
                "bad"
            }
            fn dim(&self) -> usize {
                2
            }
            fn subsystem(&self, i: usize) -> &[usize] {
                if i == 0 {
                    &[0]
                } else {
                    &[1]
                }
            }
            fn field(&self, _x: &[f64], dx: &mut [f64]) {
                dx.fill(f64::NAN);
            }
        }
        assert!(matches!(jacobian(&Bad, &[0.0, 0.0]), Err(Error::FieldEvaluation { .. })));
    }
}
