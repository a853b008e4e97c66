use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("Bessel order {order} is outside the supported range 0..={max}")]
    UnsupportedOrder { order: u32, max: u32 },

    #[error("quadrature on [{a}, {b}] did not converge: |estimate| {estimate:e}, error bound {error_bound:e}")]
    NonConvergence {
        a: f64,
        b: f64,
        estimate: f64,
        error_bound: f64,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("no interior maximum inside [{lo}, {hi}]")]
    Bracketing { lo: f64, hi: f64 },

    #[error("point {r:?} lies inside the far-field floor of {floor} wavelengths")]
    NearField { r: [f64; 3], floor: f64 },

    #[error("master-equation integration unstable: trace drift {drift:e} at t = {t}")]
    Integration { drift: f64, t: f64 },

    #[error("undefined quantity: {0}")]
    Undefined(&'static str),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn with_context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// Innermost error, skipping context layers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }

    /// `true` for failures that stem from numerics rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self.root(),
            Error::NonConvergence { .. } | Error::Integration { .. } | Error::Undefined(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
