use std::fmt;

/// Location of a node in the spatial discretization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeLocation {
    pub element: usize,
    pub node: usize,
    pub x: f64,
}

impl fmt::Display for NodeLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.node == usize::MAX {
            write!(f, "interface next to element {} (x = {})", self.element, self.x)
        } else {
            write!(f, "element {} node {} (x = {})", self.element, self.node, self.x)
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum BgkError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-realizable state rho = {rho}, T = {temperature}{}", fmt_location(.location))]
    Realizability {
        rho: f64,
        temperature: f64,
        location: Option<NodeLocation>,
    },

    #[error("cannot resolve boundary trace: {0}")]
    Boundary(String),

    #[error("step {step}, stage {stage}: {source}")]
    Stage {
        step: usize,
        stage: usize,
        #[source]
        source: Box<BgkError>,
    },

    #[error("case '{case}': {source}")]
    Case {
        case: String,
        #[source]
        source: Box<BgkError>,
    },

    #[error("mesh mismatch: {0}")]
    MeshMismatch(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn fmt_location(loc: &Option<NodeLocation>) -> String {
    match loc {
        Some(l) => format!(" at {l}"),
        None => String::new(),
    }
}

impl BgkError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        BgkError::InvalidArgument(msg.into())
    }

    /// Short machine-readable tag for the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            BgkError::InvalidArgument(_) => "invalid-argument",
            BgkError::Realizability { .. } => "realizability",
            BgkError::Boundary(_) => "boundary",
            BgkError::Stage { source, .. } | BgkError::Case { source, .. } => source.kind(),
            BgkError::MeshMismatch(_) => "mesh-mismatch",
            BgkError::Config(_) => "config",
            BgkError::Io(_) => "io",
        }
    }

    /// Attaches a node location to a realizability error that lacks one.
    pub(crate) fn at(self, location: NodeLocation) -> Self {
        match self {
            BgkError::Realizability {
                rho,
                temperature,
                location: None,
            } => BgkError::Realizability {
                rho,
                temperature,
                location: Some(location),
            },
            other => other,
        }
    }

    pub(crate) fn in_case(self, case: &str) -> Self {
        BgkError::Case {
            case: case.to_string(),
            source: Box::new(self),
        }
    }

    pub(crate) fn in_stage(self, step: usize, stage: usize) -> Self {
        match self {
            e @ BgkError::Stage { .. } => e,
            e => BgkError::Stage {
                step,
                stage,
                source: Box::new(e),
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, BgkError>;
