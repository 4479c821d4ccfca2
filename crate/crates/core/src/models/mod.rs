//! The two built-in case studies.

mod biped;
mod brusselator;

pub use biped::{Biped, BipedParams, ResetForm};
pub use brusselator::{Brusselator, BrusselatorParams};

use alloc::boxed::Box;

use crate::error::{Error, Result};
use crate::model::HybridSystem;

/// Model names accepted in experiment files.
pub const MODEL_NAMES: [&str; 3] = ["brusselator", "brusselator-reduced", "biped"];

/// Builds a model with default parameters from its name.
pub fn by_name(name: &str) -> Result<Box<dyn HybridSystem + Send>> {
    match name {
        "brusselator" => Ok(Box::new(Brusselator::full(BrusselatorParams::default()))),
        "brusselator-reduced" => Ok(Box::new(Brusselator::reduced(BrusselatorParams::default()))),
        "biped" => Ok(Box::new(Biped::new(BipedParams::default()))),
        other => Err(Error::invalid(alloc::format!(
            "unknown model `{other}` (expected one of {})",
            MODEL_NAMES.join(", ")
        ))),
    }
}
