use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dispersion: permittivity is singular at ω = 0 for {model}; use the zero-frequency limit")]
    OriginSingular { model: &'static str },

    #[error("kernel: point lies on the light cone (|β| = 1, κ₀ = 0)")]
    OnLightCone,

    #[error("kernel: Fresnel denominator vanishes (mode pole of a lossless model)")]
    ModePole,

    #[error("kernel: dispersion function D_q vanishes")]
    ZeroDispersion,

    #[error("{module}: series did not converge after {terms} terms (last relative change {last_rel:.3e})")]
    NoConverge {
        module: &'static str,
        terms: usize,
        last_rel: f64,
    },

    #[error("{module}: quadrature failed ({what}); estimated error {error:.3e} on value {value:.3e}")]
    QuadFail {
        module: &'static str,
        what: String,
        value: f64,
        error: f64,
    },

    #[error("{module}: finite-difference derivative did not stabilise (relative spread {spread:.3e})")]
    DerivativeNoise { module: &'static str, spread: f64 },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("at T = {temperature} K: {source}")]
    AtTemperature {
        temperature: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::NoConverge { .. }
            | Error::QuadFail { .. }
            | Error::DerivativeNoise { .. }
            | Error::ZeroDispersion
            | Error::ModePole
            | Error::OnLightCone => true,
            Error::AtTemperature { source, .. } => source.is_numerical(),
            _ => false,
        }
    }

    pub fn at_temperature(self, temperature: f64) -> Error {
        Error::AtTemperature {
            temperature,
            source: Box::new(self),
        }
    }
}
