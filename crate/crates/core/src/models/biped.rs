//! Passive compass-gait walker on a slope `γ`, with the foot-strike guard
//! `2φ₁ − φ₂ = 0, φ₂ < −δ` and the leg-exchange reset.

use crate::linalg::Matrix;
use crate::math::{cos, sin};
use crate::model::{HybridSystem, Jump};

/// Second component of the reset map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ResetForm {
    /// `φ̇₁' = φ̇₁·cos 2φ₁`, the angular-momentum form of the compass gait.
    #[default]
    CompassGait,
    /// `φ̇₁' = φ̇₁·sin 2φ₁`.
    Printed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BipedParams {
    pub gamma: f64,
    pub delta: f64,
    pub reset: ResetForm,
}

impl Default for BipedParams {
    fn default() -> Self {
        BipedParams { gamma: 0.009, delta: 0.1, reset: ResetForm::default() }
    }
}

/// State `(φ₁, φ̇₁, φ₂, φ̇₂)`: stance angle and the angle between the legs.
#[derive(Debug, Clone)]
pub struct Biped {
    params: BipedParams,
}

const SUB: [[usize; 2]; 2] = [[0, 1], [2, 3]];

impl Biped {
    pub fn new(params: BipedParams) -> Self {
        Biped { params }
    }

    pub fn params(&self) -> &BipedParams {
        &self.params
    }
}

impl HybridSystem for Biped {
    fn name(&self) -> &str {
        "biped"
    }

    fn dim(&self) -> usize {
        4
    }

    fn subsystem(&self, i: usize) -> &[usize] {
        &SUB[i]
    }

    fn field(&self, x: &[f64], dx: &mut [f64]) {
        let g = self.params.gamma;
        let s = sin(x[0] - g);
        let sp = sin(x[2]);
        dx[0] = x[1];
        dx[1] = s;
        dx[2] = x[3];
        dx[3] = s + x[1] * x[1] * sp - cos(x[0] - g) * sp;
    }

    fn analytic_jacobian(&self, x: &[f64], out: &mut Matrix) -> bool {
        let g = self.params.gamma;
        let (s, c) = (sin(x[0] - g), cos(x[0] - g));
        let (sp, cp) = (sin(x[2]), cos(x[2]));
        out.fill_zero();
        out[(0, 1)] = 1.0;
        out[(1, 0)] = c;
        out[(2, 3)] = 1.0;
        out[(3, 0)] = c + s * sp;
        out[(3, 1)] = 2.0 * x[1] * sp;
        out[(3, 2)] = x[1] * x[1] * cp - c * cp;
        true
    }

    fn jump(&self) -> Option<&dyn Jump> {
        Some(self)
    }
}

impl Jump for Biped {
    fn level(&self, x: &[f64]) -> f64 {
        2.0 * x[0] - x[2]
    }

    fn admissible(&self, x: &[f64]) -> bool {
        x[2] < -self.params.delta
    }

    fn level_gradient(&self, _x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&[2.0, 0.0, -1.0, 0.0]);
    }

    fn reset(&self, x: &[f64], out: &mut [f64]) {
        let c = cos(2.0 * x[0]);
        let second = match self.params.reset {
            ResetForm::CompassGait => x[1] * c,
            ResetForm::Printed => x[1] * sin(2.0 * x[0]),
        };
        out[0] = -x[0];
        out[1] = second;
        out[2] = -2.0 * x[0];
        out[3] = x[1] * c * (1.0 - c);
    }

    fn reset_jacobian(&self, x: &[f64], out: &mut Matrix) -> bool {
        let (s, c) = (sin(2.0 * x[0]), cos(2.0 * x[0]));
        out.fill_zero();
        out[(0, 0)] = -1.0;
        match self.params.reset {
            ResetForm::CompassGait => {
                out[(1, 0)] = -2.0 * x[1] * s;
                out[(1, 1)] = c;
            }
            ResetForm::Printed => {
                out[(1, 0)] = 2.0 * x[1] * c;
                out[(1, 1)] = s;
            }
        }
        out[(2, 0)] = -2.0;
        out[(3, 0)] = -2.0 * x[1] * s * (1.0 - 2.0 * c);
        out[(3, 1)] = c * (1.0 - c);
        true
    }
}
