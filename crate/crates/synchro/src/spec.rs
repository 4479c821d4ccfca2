//! Experiment files: a TOML description of one run.
//!
//! ```toml
//! name = "brusselator-10"
//! model = "brusselator-reduced"
//! seed = 0
//!
//! [config]
//! tau = 2e-4
//! period_steps = 34300
//! k = 5
//! epsilon = 1e-3
//! r0 = 3.5e-8
//!
//! [tube]
//! radius_rule = "compounded"
//!
//! [[sections]]
//! phase_axis = 1
//! base_axis = 0
//! vertices = [[0.621884, 3.778615], [0.621888, 3.778615], [0.621906, 3.778650], [0.621903, 3.778650]]
//! diagonal = [0, 2]
//!
//! [[sections]]
//! phase_axis = 1
//! base_axis = 0
//! a = [0.485926, 4.077926]
//! b = [0.485946, 4.077997]
//! e = 3e-6
//!
//! [[balls]]
//! center1 = [0.622, 3.779]
//! center2 = [0.486, 4.078]
//! ```
//!
//! Optional tables: `[covering]`, `[decomposition]` and `[simulate]`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use synchro_core::models::{self, Biped, BipedParams, ResetForm};
use synchro_core::{
    HybridSystem, ProductBall, RadiusRule, SectionParallelogram, StateVector, TubeOptions, VerificationConfig,
};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    pub model: String,
    /// Biped reset variant: `compass-gait` (default) or `printed`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub biped_reset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Worker threads; 0 means one per available core.
    #[serde(default)]
    pub workers: usize,
    #[serde(default)]
    pub seed: u64,
    pub config: ConfigSpec,
    #[serde(default)]
    pub tube: TubeSpec,
    pub sections: Vec<SectionSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub balls: Vec<BallSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub covering: Option<CoveringSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigSpec {
    pub tau: f64,
    pub period_steps: u64,
    pub k: u64,
    pub epsilon: f64,
    pub r0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleName {
    LogNorm,
    Variational,
    Compounded,
}

impl From<RuleName> for RadiusRule {
    fn from(r: RuleName) -> Self {
        match r {
            RuleName::LogNorm => RadiusRule::LogNorm,
            RuleName::Variational => RadiusRule::Variational,
            RuleName::Compounded => RadiusRule::Compounded,
        }
    }
}

impl From<RadiusRule> for RuleName {
    fn from(r: RadiusRule) -> Self {
        match r {
            RadiusRule::LogNorm => RuleName::LogNorm,
            RadiusRule::Variational => RuleName::Variational,
            RadiusRule::Compounded => RuleName::Compounded,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TubeSpec {
    pub radius_rule: RuleName,
    pub lambda_stride: u64,
    pub record_stride: u64,
    pub random_points: usize,
    pub margin: f64,
    pub radius_cap: f64,
    pub local_error: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_events: Option<usize>,
}

impl Default for TubeSpec {
    fn default() -> Self {
        let o = TubeOptions::default();
        TubeSpec {
            radius_rule: o.radius_rule.into(),
            lambda_stride: o.lambda_stride,
            record_stride: o.record_stride,
            random_points: o.random_points,
            margin: o.margin,
            radius_cap: o.radius_cap,
            local_error: o.local_error,
            max_events: o.max_events,
        }
    }
}

/// Either a vertex list with the indices of the main diagonal, or an
/// `(a, b, e)` triple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionSpec {
    pub phase_axis: usize,
    pub base_axis: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<[[f64; 2]; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagonal: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e: Option<f64>,
    /// Keep only the part between these fractions along the side edges.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slice: Option<[f64; 2]>,
}

impl SectionSpec {
    pub fn from_vertices(vertices: [[f64; 2]; 4], diagonal: [usize; 2], phase_axis: usize, base_axis: usize) -> Self {
        SectionSpec {
            phase_axis,
            base_axis,
            vertices: Some(vertices),
            diagonal: Some(diagonal),
            a: None,
            b: None,
            e: None,
            slice: None,
        }
    }

    pub fn build(&self, field: &str) -> Result<SectionParallelogram> {
        let bad = |e: synchro_core::Error| Error::field(field, e.to_string());
        let s = match (&self.vertices, &self.a, &self.b, &self.e) {
            (Some(v), None, None, None) => {
                let [ia, ib] = self.diagonal.unwrap_or([0, 2]);
                SectionParallelogram::from_vertices(*v, ia, ib, self.phase_axis, self.base_axis).map_err(bad)?
            }
            (None, Some(a), Some(b), Some(e)) => {
                if self.diagonal.is_some() {
                    return Err(Error::field(format!("{field}.diagonal"), "only meaningful with `vertices`"));
                }
                SectionParallelogram::from_diagonal(*a, *b, *e, self.phase_axis, self.base_axis).map_err(bad)?
            }
            _ => return Err(Error::field(field, "give either `vertices` or all of `a`, `b` and `e`")),
        };
        match self.slice {
            Some([t0, t1]) => s.slice(t0, t1).map_err(|e| Error::field(format!("{field}.slice"), e.to_string())),
            None => Ok(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallSpec {
    pub center1: Vec<f64>,
    pub center2: Vec<f64>,
    /// Defaults to `config.r0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
}

impl BallSpec {
    pub fn from_joint(x: &[f64; 4]) -> Self {
        BallSpec { center1: x[..2].to_vec(), center2: x[2..].to_vec(), radius: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionName {
    All,
    Diagonal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoveringSpec {
    pub radius: f64,
    #[serde(default = "default_selection")]
    pub selection: SelectionName,
    #[serde(default = "default_budget")]
    pub budget: usize,
}

fn default_selection() -> SelectionName {
    SelectionName::All
}

fn default_budget() -> usize {
    10_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompositionSpec {
    /// One-period growth factor used for the stage estimate and the
    /// default stage radius.
    pub expansion: f64,
    /// Defaults to the largest radius whose image still fits the sections.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage_radius: Option<f64>,
    #[serde(default = "default_budget")]
    pub budget: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSpec {
    /// Steps to simulate; exactly one of `steps` and `periods` is required.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub periods: Option<u64>,
}

impl ExperimentSpec {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let spec: ExperimentSpec =
            toml::from_str(text).map_err(|e| Error::Parse { path: origin.to_string(), message: e.to_string() })?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn to_toml(&self) -> String {
        // every field maps to a TOML value, so this cannot fail
        toml::to_string(self).expect("spec serializes to TOML")
    }

    /// Checks everything that can be checked without running anything.
    pub fn validate(&self) -> Result<()> {
        self.system()?;
        self.verification_config()?;
        self.tube_options()?;
        self.sections()?;
        self.balls()?;
        if let Some(c) = &self.covering {
            if !(c.radius > 0.0) {
                return Err(Error::field("covering.radius", "must be > 0"));
            }
        }
        if let Some(d) = &self.decomposition {
            if !(d.expansion >= 1.0) {
                return Err(Error::field("decomposition.expansion", "must be >= 1"));
            }
            if matches!(d.stage_radius, Some(r) if !(r > 0.0)) {
                return Err(Error::field("decomposition.stage_radius", "must be > 0"));
            }
        }
        // TOML integers are signed 64-bit
        if i64::try_from(self.seed).is_err() {
            return Err(Error::field("seed", "must be below 2^63"));
        }
        if let Some(s) = &self.simulate {
            match (s.steps, s.periods) {
                (Some(0), None) | (None, Some(0)) => {
                    return Err(Error::Usage("simulate needs a positive number of steps".into()))
                }
                (Some(_), None) | (None, Some(_)) => {}
                _ => return Err(Error::field("simulate", "give exactly one of `steps` and `periods`")),
            }
        }
        Ok(())
    }

    pub fn system(&self) -> Result<Box<dyn HybridSystem + Send>> {
        let reset = match self.biped_reset.as_deref() {
            None => None,
            Some("compass-gait") => Some(ResetForm::CompassGait),
            Some("printed") => Some(ResetForm::Printed),
            Some(other) => {
                return Err(Error::field("biped_reset", format!("unknown reset `{other}` (compass-gait, printed)")))
            }
        };
        match (self.model.as_str(), reset) {
            ("biped", Some(reset)) => Ok(Box::new(Biped::new(BipedParams { reset, ..BipedParams::default() }))),
            (_, Some(_)) => Err(Error::field("biped_reset", "only applies to the biped model")),
            (name, None) => models::by_name(name).map_err(|e| Error::field("model", e.to_string())),
        }
    }

    pub fn verification_config(&self) -> Result<VerificationConfig> {
        let c = &self.config;
        VerificationConfig::new(c.tau, c.period_steps, c.k, c.epsilon, c.r0)
            .map_err(|e| Error::field("config", e.to_string()))
    }

    pub fn tube_options(&self) -> Result<TubeOptions> {
        let t = &self.tube;
        let o = TubeOptions {
            radius_rule: t.radius_rule.into(),
            lambda_stride: t.lambda_stride,
            record_stride: t.record_stride,
            radius_cap: t.radius_cap,
            random_points: t.random_points,
            seed: self.seed,
            local_error: t.local_error,
            max_events: t.max_events,
            margin: t.margin,
        };
        o.validate().map_err(|e| Error::field("tube", e.to_string()))?;
        Ok(o)
    }

    pub fn sections(&self) -> Result<(SectionParallelogram, SectionParallelogram)> {
        if self.sections.len() != 2 {
            return Err(Error::field("sections", format!("expected 2 sections, found {}", self.sections.len())));
        }
        Ok((self.sections[0].build("sections[0]")?, self.sections[1].build("sections[1]")?))
    }

    pub fn balls(&self) -> Result<Vec<ProductBall>> {
        let m = self.system()?.subsystem_dim();
        self.balls
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let field = format!("balls[{i}]");
                if b.center1.len() != m || b.center2.len() != m {
                    return Err(Error::field(&field, format!("centers must have {m} coordinates")));
                }
                let r = b.radius.unwrap_or(self.config.r0);
                let c1 = StateVector::from_slice(&b.center1).map_err(|e| Error::field(&field, e.to_string()))?;
                let c2 = StateVector::from_slice(&b.center2).map_err(|e| Error::field(&field, e.to_string()))?;
                ProductBall::shared(c1, c2, r).map_err(|e| Error::field(&field, e.to_string()))
            })
            .collect()
    }

    /// Steps requested by `[simulate]`, or one period.
    pub fn simulate_steps(&self) -> u64 {
        match &self.simulate {
            Some(SimulateSpec { steps: Some(n), .. }) => *n,
            Some(SimulateSpec { periods: Some(p), .. }) => p * self.config.period_steps,
            _ => self.config.period_steps,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
name = "t"
model = "brusselator-reduced"
[config]
tau = 2e-4
period_steps = 100
k = 1
epsilon = 1e-3
r0 = 1e-8
[[sections]]
phase_axis = 1
base_axis = 0
vertices = [[0.621884, 3.778615], [0.621888, 3.778615], [0.621906, 3.778650], [0.621903, 3.778650]]
[[sections]]
phase_axis = 1
base_axis = 0
a = [0.485926, 4.077926]
b = [0.485946, 4.077997]
e = 3e-6
[[balls]]
center1 = [0.622, 3.779]
center2 = [0.486, 4.078]
"#;

    #[test]
    fn minimal_spec_parses_with_defaults() {
        let s = ExperimentSpec::parse(MINIMAL, "minimal").unwrap();
        assert_eq!(s.tube, TubeSpec::default());
        assert_eq!(s.balls().unwrap()[0].radius(), 1e-8);
        assert_eq!(s.simulate_steps(), 100);
    }

    #[test]
    fn round_trip() {
        let s = ExperimentSpec::parse(MINIMAL, "minimal").unwrap();
        let text = s.to_toml();
        let back = ExperimentSpec::parse(&text, "again").unwrap();
        assert_eq!(back, s);
        assert_eq!(back.to_toml(), text);
    }

    #[test]
    fn unknown_key_is_named_with_its_line() {
        let text = MINIMAL.replace("epsilon = 1e-3", "epsilon = 1e-3\nepsilom = 2");
        let err = ExperimentSpec::parse(&text, "typo.toml").unwrap_err().to_string();
        assert!(err.contains("epsilom"), "{err}");
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn degenerate_section_names_the_field() {
        let text = MINIMAL.replace("e = 3e-6", "e = 0.0");
        let err = ExperimentSpec::parse(&text, "bad").unwrap_err().to_string();
        assert!(err.contains("sections[1]"), "{err}");
    }

    #[test]
    fn zero_steps_is_a_usage_error() {
        let text = format!("{MINIMAL}\n[simulate]\nsteps = 0\n");
        assert!(matches!(ExperimentSpec::parse(&text, "z"), Err(Error::Usage(_))));
    }

    #[test]
    fn seed_must_fit_a_toml_integer() {
        let mut spec = ExperimentSpec::parse(MINIMAL, "m").unwrap();
        spec.seed = u64::MAX;
        assert!(spec.validate().unwrap_err().to_string().contains("seed"));
    }

    #[test]
    fn ambiguous_section_is_rejected() {
        let text = MINIMAL.replace("e = 3e-6", "e = 3e-6\ndiagonal = [0, 2]");
        let err = ExperimentSpec::parse(&text, "amb").unwrap_err().to_string();
        assert!(err.contains("sections[1].diagonal"), "{err}");
    }
}
