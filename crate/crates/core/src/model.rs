//! Domain types shared by every stage: states, ball enclosures, section
//! parallelograms, the system interface and the verification parameters.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::ops::Deref;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::math;

/// Threshold on `e/f` below which a section counts as "thin".
pub const THIN_SECTION_RATIO: f64 = 0.05;

/// Ordered, finite real coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(Vec<f64>);

impl StateVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("state vector must have dimension >= 1"));
        }
        if let Some(i) = values.iter().position(|x| !x.is_finite()) {
            return Err(Error::invalid(format!("state coordinate {i} is not finite")));
        }
        Ok(StateVector(values))
    }

    pub fn from_slice(values: &[f64]) -> Result<Self> {
        Self::new(values.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for StateVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Closed Euclidean ball `{x : ‖x − center‖₂ ≤ radius}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center: StateVector,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: StateVector, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::invalid(format!("ball radius must be finite and >= 0, got {radius}")));
        }
        Ok(Ball { center, radius })
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        math::dist2(&self.center, x) <= self.radius
    }
}

/// `B1 × B2`, one ball per subsystem.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductBall {
    pub b1: Ball,
    pub b2: Ball,
    shared_radius: bool,
}

impl ProductBall {
    pub fn new(b1: Ball, b2: Ball) -> Result<Self> {
        if b1.center.dim() != b2.center.dim() {
            return Err(Error::invalid("product ball components must have equal dimension"));
        }
        Ok(ProductBall { b1, b2, shared_radius: false })
    }

    /// Both balls carry the same radius `r`.
    pub fn shared(c1: StateVector, c2: StateVector, r: f64) -> Result<Self> {
        let b1 = Ball::new(c1, r)?;
        let b2 = Ball::new(c2, r)?;
        let mut pb = Self::new(b1, b2)?;
        pb.shared_radius = true;
        Ok(pb)
    }

    /// Splits a joint state according to the system's subsystem layout.
    pub fn from_joint<S: HybridSystem + ?Sized>(system: &S, joint: &[f64], r: f64) -> Result<Self> {
        let c1 = system.subsystem(0).iter().map(|&i| joint[i]).collect();
        let c2 = system.subsystem(1).iter().map(|&i| joint[i]).collect();
        Self::shared(StateVector::new(c1)?, StateVector::new(c2)?, r)
    }

    pub fn is_shared_radius(&self) -> bool {
        self.shared_radius
    }

    pub fn subsystem_dim(&self) -> usize {
        self.b1.center.dim()
    }

    /// Largest of the two radii.
    pub fn radius(&self) -> f64 {
        self.b1.radius.max(self.b2.radius)
    }

    pub fn ball(&self, i: usize) -> &Ball {
        if i == 0 {
            &self.b1
        } else {
            &self.b2
        }
    }

    /// Reassembles the joint center `(c1, c2)` in system coordinates.
    pub fn joint_center<S: HybridSystem + ?Sized>(&self, system: &S) -> Vec<f64> {
        let mut x = alloc::vec![0.0; system.dim()];
        for (k, &i) in system.subsystem(0).iter().enumerate() {
            x[i] = self.b1.center[k];
        }
        for (k, &i) in system.subsystem(1).iter().enumerate() {
            x[i] = self.b2.center[k];
        }
        x
    }

    /// Membership of a joint state: each projection lies in its ball.
    pub fn contains_joint<S: HybridSystem + ?Sized>(&self, system: &S, x: &[f64]) -> bool {
        let d = |sub: &[usize], ball: &Ball| {
            let s: f64 = sub.iter().zip(ball.center.iter()).map(|(&i, c)| (x[i] - c) * (x[i] - c)).sum();
            math::sqrt(s) <= ball.radius
        };
        d(system.subsystem(0), &self.b1) && d(system.subsystem(1), &self.b2)
    }
}

/// A thin convex quadrilateral section `S_i` in the 2-D phase plane of one
/// subsystem, described by its main diagonal `a → b`, its base width `e`
/// and the coordinate used as ordinate for phases.
///
/// Points are given in *plane order*: `[x[lo], x[hi]]` where `lo < hi` are
/// the two subsystem coordinates `phase_axis` and `base_axis`.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionParallelogram {
    vertices: [[f64; 2]; 4],
    a: [f64; 2],
    b: [f64; 2],
    e: f64,
    phase_axis: usize,
    base_axis: usize,
}

impl SectionParallelogram {
    /// Reconstructs the parallelogram from `(a, b, e)`: the two base edges are
    /// parallel to `base_axis`, have length `e`, and are attached at `a` and
    /// `b` so that `a → b` is the long diagonal.
    pub fn from_diagonal(a: [f64; 2], b: [f64; 2], e: f64, phase_axis: usize, base_axis: usize) -> Result<Self> {
        check_axes(phase_axis, base_axis)?;
        if !(e > 0.0) || !e.is_finite() {
            return Err(Error::invalid("section base width e must be > 0"));
        }
        let bl = local_index(phase_axis, base_axis, base_axis);
        let sign = if b[bl] - a[bl] < 0.0 { -1.0 } else { 1.0 };
        let mut a2 = a;
        a2[bl] += sign * e;
        let mut b2 = b;
        b2[bl] -= sign * e;
        Self::build([a, a2, b, b2], a, b, e, phase_axis, base_axis)
    }

    /// Uses an explicit vertex list in cyclic order; `a_index` and
    /// `b_index` pick the opposite vertices forming the main diagonal. The
    /// base width is the length of the edge at `a` closest to `base_axis`.
    pub fn from_vertices(
        vertices: [[f64; 2]; 4],
        a_index: usize,
        b_index: usize,
        phase_axis: usize,
        base_axis: usize,
    ) -> Result<Self> {
        check_axes(phase_axis, base_axis)?;
        if a_index >= 4 || b_index != (a_index + 2) % 4 {
            return Err(Error::invalid("a and b must be opposite vertices of the section"));
        }
        let bl = local_index(phase_axis, base_axis, base_axis);
        let a = vertices[a_index];
        let e = [vertices[(a_index + 1) % 4], vertices[(a_index + 3) % 4]]
            .iter()
            .map(|v| {
                let d = [v[0] - a[0], v[1] - a[1]];
                let len = math::hypot(d[0], d[1]);
                (d[bl].abs() / len.max(f64::MIN_POSITIVE), len)
            })
            .fold((-1.0, 0.0), |best, cur| if cur.0 > best.0 { cur } else { best })
            .1;
        Self::build(vertices, a, vertices[b_index], e, phase_axis, base_axis)
    }

    fn build(
        vertices: [[f64; 2]; 4],
        a: [f64; 2],
        b: [f64; 2],
        e: f64,
        phase_axis: usize,
        base_axis: usize,
    ) -> Result<Self> {
        if vertices.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::invalid("section vertices must be finite"));
        }
        let area = signed_area(&vertices);
        let diam = vertices
            .iter()
            .flat_map(|p| vertices.iter().map(move |q| math::hypot(p[0] - q[0], p[1] - q[1])))
            .fold(0.0, f64::max);
        if area.abs() <= f64::EPSILON * diam * diam || diam == 0.0 {
            return Err(Error::DegenerateSection);
        }
        let mut vertices = vertices;
        if area < 0.0 {
            vertices.swap(1, 3);
        }
        if !is_convex(&vertices) {
            return Err(Error::invalid("section quadrilateral must be convex"));
        }
        let s = SectionParallelogram { vertices, a, b, e, phase_axis, base_axis };
        let f = s.height();
        if !(f > 0.0) {
            return Err(Error::invalid("section height |ord(b) - ord(a)| must be > 0"));
        }
        if s.thinness() >= 1.0 {
            return Err(Error::invalid(format!("section ratio e/f = {} must be < 1", s.thinness())));
        }
        Ok(s)
    }

    /// Counter-clockwise vertices in plane order.
    pub fn vertices(&self) -> &[[f64; 2]; 4] {
        &self.vertices
    }

    pub fn a(&self) -> [f64; 2] {
        self.a
    }

    pub fn b(&self) -> [f64; 2] {
        self.b
    }

    /// Base width `e`.
    pub fn width(&self) -> f64 {
        self.e
    }

    /// `f = |ord(b) − ord(a)|`.
    pub fn height(&self) -> f64 {
        let p = self.phase_local();
        (self.b[p] - self.a[p]).abs()
    }

    /// Length of the main diagonal `|b − a|`.
    pub fn length(&self) -> f64 {
        math::hypot(self.b[0] - self.a[0], self.b[1] - self.a[1])
    }

    /// `e / f`; the method assumes this is small.
    pub fn thinness(&self) -> f64 {
        self.e / self.height()
    }

    pub fn satisfies_thin_hypothesis(&self) -> bool {
        self.thinness() < THIN_SECTION_RATIO
    }

    pub fn phase_axis(&self) -> usize {
        self.phase_axis
    }

    pub fn base_axis(&self) -> usize {
        self.base_axis
    }

    /// The two subsystem coordinates spanning the plane, ascending.
    pub fn axes(&self) -> [usize; 2] {
        let lo = self.phase_axis.min(self.base_axis);
        [lo, self.phase_axis.max(self.base_axis)]
    }

    /// Position of the phase axis inside plane-order points.
    pub fn phase_local(&self) -> usize {
        local_index(self.phase_axis, self.base_axis, self.phase_axis)
    }

    pub fn base_local(&self) -> usize {
        1 - self.phase_local()
    }

    pub fn project(&self, x: &[f64]) -> [f64; 2] {
        let [lo, hi] = self.axes();
        [x[lo], x[hi]]
    }

    pub fn centroid(&self) -> [f64; 2] {
        let mut c = [0.0; 2];
        for v in &self.vertices {
            c[0] += 0.25 * v[0];
            c[1] += 0.25 * v[1];
        }
        c
    }

    /// Signed distances of `p` to the four edge lines, positive inside.
    pub fn edge_distances(&self, p: [f64; 2]) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (i, d) in out.iter_mut().enumerate() {
            let v0 = self.vertices[i];
            let v1 = self.vertices[(i + 1) % 4];
            let ex = v1[0] - v0[0];
            let ey = v1[1] - v0[1];
            let len = math::hypot(ex, ey);
            // inward normal of a CCW edge is (-ey, ex)
            *d = (-ey * (p[0] - v0[0]) + ex * (p[1] - v0[1])) / len;
        }
        out
    }

    /// Disk of radius `r` around the plane point `p` lies in the closed section.
    pub fn contains_disk(&self, p: [f64; 2], r: f64) -> bool {
        self.edge_distances(p).iter().all(|&d| d >= r)
    }

    pub fn contains_point(&self, p: [f64; 2]) -> bool {
        self.contains_disk(p, 0.0)
    }

    /// Smallest distance between opposite edges.
    pub fn min_width(&self) -> f64 {
        (0..4)
            .map(|i| {
                let opp = self.vertices[(i + 2) % 4];
                let opp2 = self.vertices[(i + 3) % 4];
                let d = self.edge_distances(opp)[i].max(self.edge_distances(opp2)[i]);
                d
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Sub-section between fractions `t0 < t1` of the way along the side
    /// edges, keeping the base edges' direction. `slice(0, 1)` is `self`.
    pub fn slice(&self, t0: f64, t1: f64) -> Result<Self> {
        if !(0.0 <= t0 && t0 < t1 && t1 <= 1.0) {
            return Err(Error::invalid("slice fractions must satisfy 0 <= t0 < t1 <= 1"));
        }
        let v = &self.vertices;
        let ia = v.iter().position(|p| *p == self.a).ok_or(Error::DegenerateSection)?;
        let bl = self.base_local();
        let align = |q: [f64; 2]| {
            let d = [q[0] - self.a[0], q[1] - self.a[1]];
            d[bl].abs() / math::hypot(d[0], d[1])
        };
        let (n1, n3) = (v[(ia + 1) % 4], v[(ia + 3) % 4]);
        let (nb, ns) = if align(n1) >= align(n3) { (n1, n3) } else { (n3, n1) };
        let lerp = |p: [f64; 2], q: [f64; 2], t: f64| [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])];
        let b = v[(ia + 2) % 4];
        let quad = [lerp(self.a, ns, t0), lerp(nb, b, t0), lerp(nb, b, t1), lerp(self.a, ns, t1)];
        Self::from_vertices(quad, 0, 2, self.phase_axis, self.base_axis)
    }

    /// Largest vertex-to-vertex distance.
    pub fn diameter(&self) -> f64 {
        let v = &self.vertices;
        let mut d: f64 = 0.0;
        for i in 0..4 {
            for j in (i + 1)..4 {
                d = d.max(math::hypot(v[i][0] - v[j][0], v[i][1] - v[j][1]));
            }
        }
        d
    }
}

fn check_axes(phase_axis: usize, base_axis: usize) -> Result<()> {
    if phase_axis == base_axis {
        return Err(Error::invalid("phase_axis and base_axis must differ"));
    }
    Ok(())
}

fn local_index(phase_axis: usize, base_axis: usize, axis: usize) -> usize {
    if axis == phase_axis.min(base_axis) {
        0
    } else {
        1
    }
}

fn signed_area(v: &[[f64; 2]; 4]) -> f64 {
    // shoelace on coordinates relative to the first vertex
    let o = v[0];
    let mut s = 0.0;
    for i in 0..4 {
        let p = v[i];
        let q = v[(i + 1) % 4];
        s += (p[0] - o[0]) * (q[1] - o[1]) - (q[0] - o[0]) * (p[1] - o[1]);
    }
    0.5 * s
}

fn is_convex(v: &[[f64; 2]; 4]) -> bool {
    (0..4).all(|i| {
        let p = v[i];
        let q = v[(i + 1) % 4];
        let r = v[(i + 2) % 4];
        (q[0] - p[0]) * (r[1] - q[1]) - (q[1] - p[1]) * (r[0] - q[0]) >= 0.0
    })
}

/// Whether the ball's projection (a disk of the same radius) lies inside `S`.
pub fn parallelogram_contains(s: &SectionParallelogram, ball: &Ball) -> Result<bool> {
    let [_, hi] = s.axes();
    if ball.center.dim() <= hi {
        return Err(Error::invalid(format!(
            "ball of dimension {} does not cover section axes {:?}",
            ball.center.dim(),
            s.axes()
        )));
    }
    Ok(s.contains_disk(s.project(&ball.center), ball.radius))
}

/// Linearized phase `(ord(x) − ord(a)) / (ord(b) − ord(a))`.
pub fn phase(s: &SectionParallelogram, x: &[f64]) -> f64 {
    let p = s.phase_local();
    let ord_a = s.a[p];
    let ord_b = s.b[p];
    (x[s.phase_axis] - ord_a) / (ord_b - ord_a)
}

/// Guard-and-reset pair of a hybrid system. A system with a guard always
/// has a reset, which is why both live on the same trait.
pub trait Jump: Sync {
    /// Zero-level function `g` whose sign change marks a crossing.
    fn level(&self, x: &[f64]) -> f64;

    /// Side condition that must hold at the crossing point.
    fn admissible(&self, x: &[f64]) -> bool;

    fn reset(&self, x: &[f64], out: &mut [f64]);

    /// Jacobian of the reset map; `false` means "not available" and a
    /// finite-difference approximation is used.
    fn reset_jacobian(&self, _x: &[f64], _out: &mut Matrix) -> bool {
        false
    }

    /// Gradient of `level`; defaults to central differences.
    fn level_gradient(&self, x: &[f64], out: &mut [f64]) {
        let mut y = x.to_vec();
        for i in 0..x.len() {
            let h = fd_step(x);
            y[i] = x[i] + h;
            let gp = self.level(&y);
            y[i] = x[i] - h;
            let gm = self.level(&y);
            y[i] = x[i];
            out[i] = (gp - gm) / (2.0 * h);
        }
    }

    /// The guard predicate on a state: on the zero level and admissible.
    fn holds(&self, x: &[f64]) -> bool {
        self.level(x).abs() <= 1e-12 && self.admissible(x)
    }
}

/// Finite-difference step `max(1e-6, 1e-6·‖x‖∞)`.
pub(crate) fn fd_step(x: &[f64]) -> f64 {
    let inf = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    (1e-6f64).max(1e-6 * inf)
}

/// A pair of coupled subsystems `ẋ = f(x)` on `ℝ^{2m}`, optionally with a
/// guard and reset.
pub trait HybridSystem: Sync {
    fn name(&self) -> &str;

    /// Full state dimension `2·m`.
    fn dim(&self) -> usize;

    /// State indices forming subsystem `i ∈ {0, 1}`.
    fn subsystem(&self, i: usize) -> &[usize];

    /// Indices (into the full state) of the 2-D phase plane of subsystem `i`.
    fn plane(&self, i: usize) -> [usize; 2] {
        let s = self.subsystem(i);
        [s[0], s[1]]
    }

    fn subsystem_dim(&self) -> usize {
        self.subsystem(0).len()
    }

    fn field(&self, x: &[f64], dx: &mut [f64]);

    /// Analytic Jacobian if the system provides one.
    fn analytic_jacobian(&self, _x: &[f64], _out: &mut Matrix) -> bool {
        false
    }

    fn jump(&self) -> Option<&dyn Jump> {
        None
    }
}

/// `ẋ = A·x`, handy for tests and calibration.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    a: Matrix,
    subsystems: [Vec<usize>; 2],
    name: String,
}

impl LinearSystem {
    /// Splits coordinates into two equal halves.
    pub fn new(a: Matrix) -> Self {
        let n = a.dim();
        let m = (n / 2).max(1);
        let first: Vec<usize> = (0..m.min(n)).collect();
        let second: Vec<usize> = if n >= 2 { (m..n).collect() } else { first.clone() };
        LinearSystem { a, subsystems: [first, second], name: String::from("linear") }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.a
    }
}

impl HybridSystem for LinearSystem {
    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        self.a.dim()
    }

    fn subsystem(&self, i: usize) -> &[usize] {
        &self.subsystems[i]
    }

    fn plane(&self, i: usize) -> [usize; 2] {
        let s = &self.subsystems[i];
        [s[0], *s.get(1).unwrap_or(&s[0])]
    }

    fn field(&self, x: &[f64], dx: &mut [f64]) {
        let n = self.a.dim();
        for (i, d) in dx.iter_mut().enumerate().take(n) {
            *d = self.a.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    fn analytic_jacobian(&self, _x: &[f64], out: &mut Matrix) -> bool {
        out.copy_from(&self.a);
        true
    }
}

/// Scalars that parameterize one verification run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerificationConfig {
    /// Euler time step.
    pub tau: f64,
    /// Euler steps per period, so `T = period_steps·τ`.
    pub period_steps: u64,
    /// Periods before recurrence is sought.
    pub k: u64,
    /// Tolerance on the center phase difference.
    pub epsilon: f64,
    /// Initial ball radius.
    pub r0: f64,
}

impl VerificationConfig {
    pub fn new(tau: f64, period_steps: u64, k: u64, epsilon: f64, r0: f64) -> Result<Self> {
        let c = VerificationConfig { tau, period_steps, k, epsilon, r0 };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return Err(Error::invalid("tau must be > 0"));
        }
        if self.period_steps < 1 {
            return Err(Error::invalid("period_steps must be >= 1"));
        }
        if self.k < 1 {
            return Err(Error::invalid("k must be >= 1"));
        }
        if !(self.epsilon >= 0.0) {
            return Err(Error::invalid("epsilon must be >= 0"));
        }
        if !(self.r0 >= 0.0) || !self.r0.is_finite() {
            return Err(Error::invalid("r0 must be >= 0"));
        }
        Ok(())
    }

    /// Period length `T` in time units.
    pub fn period(&self) -> f64 {
        self.period_steps as f64 * self.tau
    }

    /// Half-open step window `[k·P, (k+1)·P)` in which recurrence is sought.
    pub fn window(&self) -> (u64, u64) {
        (self.k * self.period_steps, (self.k + 1) * self.period_steps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn unit_square() -> SectionParallelogram {
        SectionParallelogram::from_diagonal([0.0, 0.0], [1.0, 1.0], 1.0 - 1e-9, 1, 0)
            .or_else(|_| SectionParallelogram::from_vertices([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]], 0, 2, 1, 0))
            .unwrap()
    }

    fn brusselator_s1() -> SectionParallelogram {
        SectionParallelogram::from_vertices(
            [[0.621884, 3.778615], [0.621888, 3.778615], [0.621906, 3.778650], [0.621903, 3.778650]],
            0,
            2,
            1,
            0,
        )
        .unwrap()
    }

    #[test]
    fn state_vector_rejects_nan_and_empty() {
        assert!(StateVector::new(vec![]).is_err());
        assert!(StateVector::new(vec![1.0, f64::NAN]).is_err());
        assert!(StateVector::new(vec![1.0, f64::INFINITY]).is_err());
        assert_eq!(StateVector::new(vec![1.0, 2.0]).unwrap().dim(), 2);
    }

    #[test]
    fn ball_rejects_negative_radius() {
        let c = StateVector::new(vec![0.0]).unwrap();
        assert!(Ball::new(c.clone(), -1.0).is_err());
        assert!(Ball::new(c, 0.0).is_ok());
    }

    #[test]
    fn centroid_with_zero_radius_is_contained() {
        let s = brusselator_s1();
        let c = s.centroid();
        let b = Ball::new(StateVector::new(vec![c[0], c[1]]).unwrap(), 0.0).unwrap();
        assert!(parallelogram_contains(&s, &b).unwrap());
    }

    #[test]
    fn vertex_ball_with_positive_radius_escapes() {
        let s = brusselator_s1();
        let a = s.a();
        let b = Ball::new(StateVector::new(vec![a[0], a[1]]).unwrap(), 1e-12).unwrap();
        assert!(!parallelogram_contains(&s, &b).unwrap());
    }

    #[test]
    fn brusselator_section_contains_small_ball() {
        let s = brusselator_s1();
        let b = Ball::new(StateVector::new(vec![0.6218950, 3.7786325]).unwrap(), 1e-7).unwrap();
        assert!(parallelogram_contains(&s, &b).unwrap());
    }

    #[test]
    fn degenerate_section_is_rejected() {
        let r = SectionParallelogram::from_vertices([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [3.0, 3.0]], 0, 2, 1, 0);
        assert_eq!(r.unwrap_err(), Error::DegenerateSection);
    }

    #[test]
    fn ball_must_cover_section_axes() {
        let s = SectionParallelogram::from_vertices([[0.0, 0.0], [0.1, 0.0], [1.1, 2.0], [1.0, 2.0]], 0, 2, 1, 0).unwrap();
        let b = Ball::new(StateVector::new(vec![0.5]).unwrap(), 0.0).unwrap();
        assert!(parallelogram_contains(&s, &b).is_err());
    }

    #[test]
    fn phase_endpoints_and_midpoint() {
        let s = brusselator_s1();
        let a = s.a();
        let b = s.b();
        assert_eq!(phase(&s, &a), 0.0);
        assert_eq!(phase(&s, &b), 1.0);
        let mid = [a[0], 0.5 * (a[1] + b[1])];
        assert!((phase(&s, &mid) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn brusselator_table_point_phase() {
        // first 10-pair center in plane x = 0.2
        let s = brusselator_s1();
        let p = phase(&s, &[0.621890, 3.778619]);
        assert!((p - 0.13).abs() <= 0.03, "phase {p}");
    }

    #[test]
    fn diagonal_construction_matches_vertex_list() {
        let from_v = SectionParallelogram::from_vertices(
            [[0.485926, 4.077926], [0.485929, 4.077926], [0.485946, 4.077997], [0.485943, 4.077997]],
            0,
            2,
            1,
            0,
        )
        .unwrap();
        let from_d = SectionParallelogram::from_diagonal(from_v.a(), from_v.b(), from_v.width(), 1, 0).unwrap();
        for (p, q) in from_v.vertices().iter().zip(from_d.vertices()) {
            assert!((p[0] - q[0]).abs() < 1e-9 && (p[1] - q[1]).abs() < 1e-9, "{p:?} vs {q:?}");
        }
    }

    #[test]
    fn thin_hypothesis_flag() {
        let s = brusselator_s1();
        assert!(s.thinness() < 0.2);
        let sq = unit_square();
        assert!(!sq.satisfies_thin_hypothesis());
    }

    #[test]
    fn config_validation() {
        assert!(VerificationConfig::new(0.0, 1, 1, 0.0, 0.0).is_err());
        assert!(VerificationConfig::new(0.1, 0, 1, 0.0, 0.0).is_err());
        assert!(VerificationConfig::new(0.1, 1, 0, 0.0, 0.0).is_err());
        assert!(VerificationConfig::new(0.1, 1, 1, -1.0, 0.0).is_err());
        let c = VerificationConfig::new(0.1, 10, 2, 0.0, 0.0).unwrap();
        assert_eq!(c.window(), (20, 30));
    }

    #[test]
    fn slices_shorten_the_section() {
        let s = brusselator_s1();
        let whole = s.slice(0.0, 1.0).unwrap();
        assert_eq!(whole.a(), s.a());
        assert_eq!(whole.b(), s.b());
        assert!((whole.width() - s.width()).abs() < 1e-18);
        let half = s.slice(0.25, 0.75).unwrap();
        assert!((half.height() - 0.5 * s.height()).abs() < 1e-9 * s.height());
        // the quadrilateral is not an exact parallelogram, so base widths
        // interpolate between the two original base edges
        let ratio = half.width() / s.width();
        assert!((0.5..2.0).contains(&ratio), "{ratio}");
        assert!(s.contains_point(half.centroid()));
        assert!(s.slice(0.5, 0.5).is_err());
    }
}
