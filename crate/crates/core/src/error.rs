use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function being evaluated.
    #[error("domain error in {function}: {detail}")]
    Domain {
        function: &'static str,
        detail: String,
    },

    /// A parameter set violates one of its invariants.
    #[error("invalid parameter `{field}`: {detail}")]
    InvalidParameter { field: &'static str, detail: String },

    /// A numerical procedure failed to reach its target accuracy or produced
    /// a nonfinite value. `component` names the quantity being computed.
    #[error("numerical failure in {component}: {detail}")]
    Numerical {
        component: String,
        detail: String,
        error_estimate: Option<f64>,
    },
}

impl Error {
    pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            function,
            detail: detail.into(),
        }
    }

    pub(crate) fn invalid(field: &'static str, detail: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            detail: detail.into(),
        }
    }

    pub(crate) fn numerical(component: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Numerical {
            component: component.into(),
            detail: detail.into(),
            error_estimate: None,
        }
    }

    /// Prefixes the component of a numerical error with `outer`, leaving other
    /// variants untouched.
    pub(crate) fn within(self, outer: &str) -> Self {
        match self {
            Error::Numerical {
                component,
                detail,
                error_estimate,
            } => Error::Numerical {
                component: format!("{outer} > {component}"),
                detail,
                error_estimate,
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
