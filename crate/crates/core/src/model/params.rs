use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical constants of the channel together with the combinations that
/// appear in every spectral and classical formula.
///
/// `alpha = sqrt(B^2 + omega^2)` is the modified Landau frequency,
/// `beta = omega^2 / alpha^2` the effective inverse mass along the channel and
/// `mu = B / alpha^2` the guiding-center offset per unit of `p_x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct ChannelParams {
    b: f64,
    omega: f64,
    alpha: f64,
    beta: f64,
    mu: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    #[serde(rename = "B")]
    b: f64,
    omega: f64,
}

impl TryFrom<RawParams> for ChannelParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        ChannelParams::new(raw.b, raw.omega)
    }
}

impl From<ChannelParams> for RawParams {
    fn from(p: ChannelParams) -> Self {
        RawParams {
            b: p.b,
            omega: p.omega,
        }
    }
}

impl ChannelParams {
    pub fn new(b: f64, omega: f64) -> Result<Self> {
        if !b.is_finite() || !omega.is_finite() {
            return Err(Error::invalid(format!(
                "B and omega must be finite (got B = {b}, omega = {omega})"
            )));
        }
        if omega <= 0.0 {
            return Err(Error::invalid(format!(
                "confinement strength omega must be positive (got {omega})"
            )));
        }
        if b < 0.0 {
            return Err(Error::invalid(format!(
                "B must be non-negative (got {b}); reflect x -> -x for the opposite orientation"
            )));
        }
        let alpha2 = b * b + omega * omega;
        Ok(ChannelParams {
            b,
            omega,
            alpha: alpha2.sqrt(),
            beta: omega * omega / alpha2,
            mu: b / alpha2,
        })
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Unperturbed fiber eigenvalue `alpha (2n+1) + beta p^2`, `p = m + theta`.
    pub fn landau_band(&self, n: usize, p: f64) -> f64 {
        self.alpha * (2 * n + 1) as f64 + self.beta * p * p
    }

    /// Same parameters after the length rescaling `x -> lambda x`, under which
    /// `B -> B / lambda^2` and `omega -> omega / lambda^2`.
    pub fn rescaled(&self, lambda: f64) -> Result<Self> {
        let s = lambda.powi(-2);
        ChannelParams::new(self.b * s, self.omega * s)
    }
}

pub fn derive_params(b: f64, omega: f64) -> Result<ChannelParams> {
    ChannelParams::new(b, omega)
}
