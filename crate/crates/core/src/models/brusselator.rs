//! Brusselator reaction-diffusion line discretized at four interior sites
//! `y = 0.2, 0.4, 0.6, 0.8` with fixed boundary values.

use alloc::string::String;
use alloc::vec::Vec;

use crate::linalg::Matrix;
use crate::model::HybridSystem;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrusselatorParams {
    pub a: f64,
    pub b: f64,
    pub sigma: f64,
    /// Multiplier turning `sigma` into the coefficient of the discrete
    /// Laplacian `u_{i-1} − 2u_i + u_{i+1}`. The default reproduces the
    /// published orbit and section; `1.0` is the bare coefficient.
    pub laplacian_scale: f64,
    pub u_boundary: f64,
    pub v_boundary: f64,
    /// Use the symmetric 4-dim reduction (sites 1, 2 only).
    pub reduced: bool,
}

impl Default for BrusselatorParams {
    fn default() -> Self {
        BrusselatorParams {
            a: 1.0,
            b: 3.0,
            sigma: 1.0 / 40.0,
            laplacian_scale: 20.0,
            u_boundary: 1.0,
            v_boundary: 3.0,
            reduced: true,
        }
    }
}

impl BrusselatorParams {
    /// Coupling with the bare `sigma` coefficient.
    pub fn literal() -> Self {
        BrusselatorParams { laplacian_scale: 1.0, ..Self::default() }
    }

    pub fn coupling(&self) -> f64 {
        self.sigma * self.laplacian_scale
    }

    pub fn is_valid(&self) -> bool {
        [self.a, self.b, self.sigma, self.laplacian_scale, self.u_boundary, self.v_boundary]
            .iter()
            .all(|v| *v > 0.0 && v.is_finite())
    }
}

/// Full 8-dim state `(u1, v1, u2, v2, u3, v3, u4, v4)` or the reduced
/// `(u1, v1, u2, v2)` with `u3 = u2`, `u4 = u1` (and likewise for `v`).
#[derive(Debug, Clone)]
pub struct Brusselator {
    params: BrusselatorParams,
    subsystems: [Vec<usize>; 2],
    name: String,
}

impl Brusselator {
    pub fn new(params: BrusselatorParams) -> Self {
        let (subsystems, name) = if params.reduced {
            ([alloc::vec![0, 1], alloc::vec![2, 3]], "brusselator-reduced")
        } else {
            // plane y = 0.2 pairs with its mirror y = 0.8, plane 0.4 with 0.6
            ([alloc::vec![0, 1, 6, 7], alloc::vec![2, 3, 4, 5]], "brusselator")
        };
        Brusselator { params, subsystems, name: String::from(name) }
    }

    pub fn full(params: BrusselatorParams) -> Self {
        Self::new(BrusselatorParams { reduced: false, ..params })
    }

    pub fn reduced(params: BrusselatorParams) -> Self {
        Self::new(BrusselatorParams { reduced: true, ..params })
    }

    pub fn params(&self) -> &BrusselatorParams {
        &self.params
    }

    /// Initial profile `u = 1 + sin(2πy)`, `v = 3` at the interior sites.
    pub fn initial_profile(&self) -> Vec<f64> {
        let sites = if self.params.reduced { 2 } else { 4 };
        let mut x = Vec::with_capacity(2 * sites);
        for i in 1..=sites {
            let y = 0.2 * i as f64;
            x.push(1.0 + crate::math::sin(2.0 * core::f64::consts::PI * y));
            x.push(3.0);
        }
        x
    }

    /// Lifts a reduced state to the full one by mirror symmetry.
    pub fn lift(reduced: &[f64]) -> [f64; 8] {
        let [u1, v1, u2, v2] = [reduced[0], reduced[1], reduced[2], reduced[3]];
        [u1, v1, u2, v2, u2, v2, u1, v1]
    }

    #[inline]
    fn site(&self, l: (f64, f64), c: (f64, f64), r: (f64, f64)) -> (f64, f64) {
        let p = &self.params;
        let k = p.coupling();
        let (u, v) = c;
        let u2v = u * u * v;
        // neighbors summed first so mirrored sites round identically
        let du = p.a + u2v - (p.b + 1.0) * u + k * ((l.0 + r.0) - 2.0 * u);
        let dv = p.b * u - u2v + k * ((l.1 + r.1) - 2.0 * v);
        (du, dv)
    }

    /// Writes the 2x2 reaction block and couplings of one site into `j`.
    fn site_jacobian(&self, j: &mut Matrix, i: usize, u: f64, v: f64, left: Option<usize>, right: Option<usize>) {
        let p = &self.params;
        let k = p.coupling();
        let (iu, iv) = (2 * i, 2 * i + 1);
        j[(iu, iu)] += 2.0 * u * v - (p.b + 1.0) - 2.0 * k;
        j[(iu, iv)] += u * u;
        j[(iv, iu)] += p.b - 2.0 * u * v;
        j[(iv, iv)] += -u * u - 2.0 * k;
        for nb in [left, right].into_iter().flatten() {
            j[(iu, 2 * nb)] += k;
            j[(iv, 2 * nb + 1)] += k;
        }
    }
}

impl HybridSystem for Brusselator {
    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        if self.params.reduced {
            4
        } else {
            8
        }
    }

    fn subsystem(&self, i: usize) -> &[usize] {
        &self.subsystems[i]
    }

    fn field(&self, x: &[f64], dx: &mut [f64]) {
        let bnd = (self.params.u_boundary, self.params.v_boundary);
        let at = |i: usize| (x[2 * i], x[2 * i + 1]);
        if self.params.reduced {
            // mirrored neighbors: site 2's right neighbor is site 3 = site 2
            let (a, b) = self.site(bnd, at(0), at(1));
            let (c, d) = self.site(at(0), at(1), at(1));
            dx[..4].copy_from_slice(&[a, b, c, d]);
        } else {
            for i in 0..4 {
                let l = if i == 0 { bnd } else { at(i - 1) };
                let r = if i == 3 { bnd } else { at(i + 1) };
                let (du, dv) = self.site(l, at(i), r);
                dx[2 * i] = du;
                dx[2 * i + 1] = dv;
            }
        }
    }

    fn analytic_jacobian(&self, x: &[f64], out: &mut Matrix) -> bool {
        out.fill_zero();
        if self.params.reduced {
            let k = self.params.coupling();
            self.site_jacobian(out, 0, x[0], x[1], None, Some(1));
            self.site_jacobian(out, 1, x[2], x[3], Some(0), None);
            // the mirrored right neighbor of site 2 is site 2 itself
            out[(2, 2)] += k;
            out[(3, 3)] += k;
        } else {
            for i in 0..4 {
                let left = if i == 0 { None } else { Some(i - 1) };
                let right = if i == 3 { None } else { Some(i + 1) };
                self.site_jacobian(out, i, x[2 * i], x[2 * i + 1], left, right);
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lognorm::{finite_difference_jacobian, FdWorkspace};

    #[test]
    fn uniform_state_is_equilibrium() {
        for sys in [Brusselator::full(BrusselatorParams::default()), Brusselator::reduced(BrusselatorParams::literal())] {
            let n = sys.dim();
            let x: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { 3.0 }).collect();
            let mut dx = alloc::vec![1.0; n];
            sys.field(&x, &mut dx);
            assert!(dx.iter().all(|v| v.abs() <= 1e-12), "{dx:?}");
        }
    }

    #[test]
    fn perturbed_site_by_hand() {
        let mut x = [1.0, 3.0, 1.0, 3.0, 1.0, 3.0, 1.0, 3.0];
        x[0] = 2.0;
        let mut dx = [0.0; 8];
        Brusselator::full(BrusselatorParams::literal()).field(&x, &mut dx);
        // 1 + 4·3 − 4·2 + (1/40)(1 − 4 + 1)
        assert!((dx[0] - 4.95).abs() < 1e-12);
        Brusselator::full(BrusselatorParams::default()).field(&x, &mut dx);
        assert!((dx[0] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn jacobian_entry_at_equilibrium() {
        let sys = Brusselator::full(BrusselatorParams::default());
        let mut j = Matrix::zeros(8);
        sys.analytic_jacobian(&[1.0, 3.0, 1.0, 3.0, 1.0, 3.0, 1.0, 3.0], &mut j);
        assert_eq!(j[(0, 1)], 1.0);
    }

    #[test]
    fn analytic_jacobians_match_differences() {
        let x8 = [0.622, 3.779, 0.486, 4.078, 0.486, 4.078, 0.622, 3.779];
        for sys in [Brusselator::full(BrusselatorParams::default()), Brusselator::reduced(BrusselatorParams::default())] {
            let n = sys.dim();
            let x = &x8[..n];
            let mut ja = Matrix::zeros(n);
            let mut jf = Matrix::zeros(n);
            sys.analytic_jacobian(x, &mut ja);
            finite_difference_jacobian(&sys, x, &mut jf, &mut FdWorkspace::new(n)).unwrap();
            for i in 0..n {
                for k in 0..n {
                    let scale = ja[(i, k)].abs().max(1.0);
                    assert!((ja[(i, k)] - jf[(i, k)]).abs() <= 1e-5 * scale, "{} ({i},{k})", sys.name());
                }
            }
        }
    }

    #[test]
    fn initial_profile_value() {
        let sys = Brusselator::full(BrusselatorParams::default());
        let x = sys.initial_profile();
        assert_eq!(x[0], 1.0 + (0.4 * core::f64::consts::PI).sin());
    }
}
