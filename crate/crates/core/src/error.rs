use std::fmt;

/// Where in the decoding pipeline a failure was detected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Repetition,
    Layer1,
    Message,
    Indicator,
    Expansion,
    Vt,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Repetition => "repetition",
            Stage::Layer1 => "layer-1",
            Stage::Message => "message",
            Stage::Indicator => "indicator search",
            Stage::Expansion => "candidate expansion",
            Stage::Vt => "vt",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("decode failure at {stage}: {reason}")]
    Decode { stage: Stage, reason: String },
    #[error("repetition decode failed: {0}")]
    Repetition(String),
    #[error("cell ({i},{j}) is a star cell")]
    StarAdjacency { i: usize, j: usize },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("oracle failure: {0}")]
    Oracle(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn decode(stage: Stage, reason: impl Into<String>) -> Self {
        Error::Decode { stage, reason: reason.into() }
    }

    /// Re-tags a failure with the pipeline stage it surfaced in.
    pub(crate) fn at(self, stage: Stage) -> Self {
        match self {
            Error::Decode { stage: inner, reason } => Error::Decode { stage, reason: format!("{inner}: {reason}") },
            Error::Repetition(reason) => Error::Decode { stage, reason },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
