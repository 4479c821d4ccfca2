use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("degenerate section")]
    DegenerateSection,
    #[error("field evaluation failed at {point:?}")]
    FieldEvaluation { point: alloc::vec::Vec<f64> },
    #[error("eigenvalue iteration did not converge at {point:?}")]
    EigenNonConvergent { point: alloc::vec::Vec<f64> },
    #[error("divergence at step {step}")]
    Divergence { step: u64 },
    #[error("radius blow-up at step {step}: r = {radius:e} exceeds cap {cap:e}")]
    RadiusBlowUp { step: u64, radius: f64, cap: f64 },
    #[error("non-finite reset output at {point:?}")]
    ResetFailed { point: alloc::vec::Vec<f64> },
    #[error("chattering guard: more than {max_events} discrete events")]
    ChatteringGuard { max_events: usize },
    #[error("undefined factor for point initial set")]
    PointInitialSet,
    #[error("trace does not record step {0}")]
    MissingStep(u64),
    #[error("stage {stage} failed: {reason}")]
    StageFailed { stage: usize, reason: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
