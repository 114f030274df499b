use std::fmt;

use polargeo::GeomError;

/// Process exit codes, one per failure category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Code {
    Ok = 0,
    Io = 1,
    Usage = 2,
    Parse = 3,
    Polarity = 4,
    WeylInvariance = 5,
    Realizability = 6,
    Equivariance = 7,
    Transversality = 8,
    Curvature = 9,
    Evenness = 10,
    Slice = 11,
    Metric = 12,
    Geometry = 13,
}

impl Code {
    pub fn name(self) -> &'static str {
        match self {
            Code::Ok => "ok",
            Code::Io => "io",
            Code::Usage => "usage",
            Code::Parse => "parse",
            Code::Polarity => "polarity",
            Code::WeylInvariance => "weyl_invariance",
            Code::Realizability => "realizability",
            Code::Equivariance => "equivariance",
            Code::Transversality => "transversality",
            Code::Curvature => "curvature",
            Code::Evenness => "evenness",
            Code::Slice => "slice",
            Code::Metric => "metric",
            Code::Geometry => "geometry",
        }
    }

    pub fn for_geom(e: &GeomError) -> Code {
        match e {
            GeomError::NotWeylInvariant { .. } => Code::WeylInvariance,
            GeomError::NotEven { .. } | GeomError::GraphExtraction(_) => Code::Evenness,
            GeomError::Unrealizable { .. } => Code::Realizability,
            GeomError::NotSkew { .. } | GeomError::NotSquare { .. } | GeomError::NonFinite => Code::Parse,
            GeomError::DimensionMismatch { .. } | GeomError::InvalidInput(_) => Code::Usage,
            _ => Code::Geometry,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: Code,
    pub message: String,
}

impl CliError {
    pub fn new(code: Code, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code.name(), self.message)
    }
}

impl From<GeomError> for CliError {
    fn from(e: GeomError) -> Self {
        CliError::new(Code::for_geom(&e), e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::new(Code::Io, e.to_string())
    }
}
