//! Built-in experiments and the reference values they are compared with.

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::spec::{
    BallSpec, ConfigSpec, DecompositionSpec, ExperimentSpec, RuleName, SectionSpec, SimulateSpec, TubeSpec,
};

const BRUSSELATOR: &str = include_str!("../data/brusselator.toml");
const BIPED: &str = include_str!("../data/biped.toml");

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Reference {
    pub model: String,
    pub tau: f64,
    /// Accepted one-period growth of the radius.
    pub expansion_range: [f64; 2],
    pub expansion: f64,
    pub sections: SectionsRef,
    #[serde(default)]
    pub single_ball: Option<SingleBallRef>,
    pub table: TableRef,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionsRef {
    pub phase_axis: usize,
    pub base_axis: usize,
    pub diagonal: [usize; 2],
    pub plane1: [[f64; 2]; 4],
    pub plane2: [[f64; 2]; 4],
    /// Reported `min(e₁/f₁, e₂/f₂)`.
    pub thinness: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingleBallRef {
    pub note: String,
    pub period_steps: u64,
    pub k: u64,
    pub radius: f64,
    pub initial: [f64; 4],
    pub image: [f64; 4],
    pub image_radius: f64,
    pub initial_phases: [f64; 2],
    pub image_phases: [f64; 2],
    pub delta_image: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableRef {
    pub note: String,
    pub period_steps: u64,
    pub k: u64,
    pub radius: f64,
    /// Hard bound on `Δphase` of the images.
    pub epsilon: f64,
    /// Bound on the phase gap of any point of a ball, when stated.
    #[serde(default)]
    pub worst_case: Option<f64>,
    pub rows: Vec<RowRef>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RowRef {
    pub initial: [f64; 4],
    pub image: [f64; 4],
    pub initial_phases: [f64; 2],
    pub image_phases: [f64; 2],
    pub delta_initial: f64,
    pub delta_image: f64,
}

impl Reference {
    pub fn brusselator() -> Reference {
        toml::from_str(BRUSSELATOR).expect("embedded Brusselator data parses")
    }

    pub fn biped() -> Reference {
        toml::from_str(BIPED).expect("embedded biped data parses")
    }

    pub fn section_specs(&self) -> Vec<SectionSpec> {
        let s = &self.sections;
        [s.plane1, s.plane2]
            .into_iter()
            .map(|v| SectionSpec::from_vertices(v, s.diagonal, s.phase_axis, s.base_axis))
            .collect()
    }
}

/// Absolute tolerance on image centers (printed precision).
pub const CENTER_TOLERANCE: f64 = 1e-4;
/// Tolerance on image phases.
pub const PHASE_TOLERANCE: f64 = 0.03;
/// Accepted factor between computed and reported radii.
pub const RADIUS_FACTOR: f64 = 2.0;

pub const RECIPE_NAMES: [&str; 4] = ["single-ball", "brusselator-10", "biped-10", "brusselator-chain"];

pub fn recipe(name: &str) -> Result<ExperimentSpec> {
    let spec = match name {
        "single-ball" => single_ball(),
        "brusselator-10" => brusselator_10(),
        "biped-10" => biped_10(),
        "brusselator-chain" => brusselator_chain(),
        other => {
            return Err(Error::Usage(format!("unknown recipe `{other}` (expected one of {})", RECIPE_NAMES.join(", "))))
        }
    };
    spec.validate()?;
    Ok(spec)
}

fn base(name: &str, r: &Reference, period_steps: u64, k: u64, epsilon: f64, r0: f64, rule: RuleName) -> ExperimentSpec {
    ExperimentSpec {
        name: name.to_string(),
        model: r.model.clone(),
        biped_reset: None,
        output: None,
        workers: 0,
        seed: 0,
        config: ConfigSpec { tau: r.tau, period_steps, k, epsilon, r0 },
        tube: TubeSpec { radius_rule: rule, ..TubeSpec::default() },
        sections: r.section_specs(),
        balls: Vec::new(),
        covering: None,
        decomposition: None,
        simulate: Some(SimulateSpec { steps: None, periods: Some(1) }),
    }
}

fn single_ball() -> ExperimentSpec {
    let r = Reference::brusselator();
    let sb = r.single_ball.clone().expect("single-ball data");
    let mut s = base("single-ball", &r, sb.period_steps, sb.k, 1e-4, sb.radius, RuleName::Compounded);
    s.balls = vec![BallSpec::from_joint(&sb.initial)];
    s
}

fn brusselator_10() -> ExperimentSpec {
    let r = Reference::brusselator();
    let t = &r.table;
    let mut s = base("brusselator-10", &r, t.period_steps, t.k, t.epsilon, t.radius, RuleName::Compounded);
    s.balls = t.rows.iter().map(|row| BallSpec::from_joint(&row.initial)).collect();
    s
}

/// Thirty compounded periods would grow the radius by `E³⁰`, so the biped
/// keeps the single variational bound over the whole run.
fn biped_10() -> ExperimentSpec {
    let r = Reference::biped();
    let t = &r.table;
    let mut s = base("biped-10", &r, t.period_steps, t.k, t.epsilon, t.radius, RuleName::Variational);
    s.balls = t.rows.iter().map(|row| BallSpec::from_joint(&row.initial)).collect();
    s
}

/// Five one-period stages on the middle strip `[0.425, 0.575]` of the
/// Brusselator sections (the narrowest strip keeping `e/f < 1`).
fn brusselator_chain() -> ExperimentSpec {
    let r = Reference::brusselator();
    let t = &r.table;
    let mut s = base("brusselator-chain", &r, t.period_steps, t.k, t.epsilon, t.radius, RuleName::Compounded);
    for sec in &mut s.sections {
        sec.slice = Some([0.425, 0.575]);
    }
    s.decomposition = Some(DecompositionSpec { expansion: 1.8, stage_radius: None, budget: 10_000 });
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_data_is_consistent() {
        for r in [Reference::brusselator(), Reference::biped()] {
            assert_eq!(r.table.rows.len(), 10);
            assert!(r.expansion_range[0] < r.expansion && r.expansion < r.expansion_range[1]);
            for row in &r.table.rows {
                let d = (row.initial_phases[0] - row.initial_phases[1]).abs();
                assert!((d - row.delta_initial).abs() < 0.011, "{row:?}");
            }
        }
    }

    #[test]
    fn every_recipe_validates() {
        for name in RECIPE_NAMES {
            let s = recipe(name).unwrap();
            assert_eq!(s.name, name);
        }
        assert!(recipe("nope").is_err());
    }

    #[test]
    fn recipes_match_the_shipped_spec_files() {
        for name in RECIPE_NAMES {
            let path = format!("{}/specs/{name}.toml", env!("CARGO_MANIFEST_DIR"));
            let file = ExperimentSpec::load(std::path::Path::new(&path)).unwrap();
            assert_eq!(file, recipe(name).unwrap(), "{name}");
        }
    }
}
