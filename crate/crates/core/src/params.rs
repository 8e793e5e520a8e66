//! Coupling constants of gamma-LQG and the exponents derived from them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `gamma = sqrt(8/3)`, the one value where the metric dimension is known.
pub const GAMMA_PURE_GRAVITY: f64 = 1.632_993_161_855_452;

/// `(gamma, d)` together with `xi = gamma/d` and `Q = 2/gamma + gamma/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    pub gamma: f64,
    /// Candidate fractal dimension of the metric.
    pub d: f64,
    pub xi: f64,
    pub q: f64,
    /// `1 - xi*Q`, the regular-variation exponent of the crossing median.
    pub exponent_one_minus_xiq: f64,
}

impl Parameters {
    /// `xi*(Q-2)`: the metric is Hölder continuous w.r.t. Euclidean for any
    /// smaller exponent.
    pub fn holder_lower_exponent(&self) -> f64 {
        self.xi * (self.q - 2.0)
    }

    /// `xi*(Q+2)`: distances are bounded below by `|u-v|^chi'` for any
    /// larger exponent.
    pub fn holder_upper_exponent(&self) -> f64 {
        self.xi * (self.q + 2.0)
    }

    /// Scale normalisation `c_r = r^{xi Q}`.
    pub fn scale_constant(&self, r: f64) -> f64 {
        r.powf(self.xi * self.q)
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma.is_finite() && gamma > 0.0 && gamma < 2.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "gamma",
            value: gamma,
            expected: "0 < gamma < 2",
        })
    }
}

/// Validates `(gamma, d)` and fills in the derived exponents.
///
/// Rejects `xi*Q > 1` outright, and also `xi*(Q+2) <= 1`, which would leave
/// no room for the Euclidean metric to be Hölder continuous w.r.t. the LFPP
/// metric.
pub fn derive_params(gamma: f64, d: f64) -> Result<Parameters> {
    check_gamma(gamma)?;
    if !(d.is_finite() && d > 2.0) {
        return Err(Error::Domain {
            name: "d",
            value: d,
            expected: "d > 2",
        });
    }
    let xi = gamma / d;
    let q = 2.0 / gamma + gamma / 2.0;
    let xi_q = xi * q;
    // Boundary case xi*Q = 1 is accepted; allow for the rounding in xi and q.
    if xi_q > 1.0 + 4.0 * f64::EPSILON {
        return Err(Error::Consistency {
            gamma,
            d,
            reason: format!("xi*Q = {xi_q} exceeds 1"),
        });
    }
    if xi * (q + 2.0) <= 1.0 {
        return Err(Error::Consistency {
            gamma,
            d,
            reason: format!("xi*(Q+2) = {} is not above 1", xi * (q + 2.0)),
        });
    }
    Ok(Parameters {
        gamma,
        d,
        xi,
        q,
        exponent_one_minus_xiq: (1.0 - xi_q).max(0.0),
    })
}

/// Watabiki's closed-form candidate `1 + g^2/4 + sqrt((4+g^2)^2 + 16 g^2)/4`.
pub fn watabiki_dimension(gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let g2 = gamma * gamma;
    Ok(1.0 + g2 / 4.0 + 0.25 * ((4.0 + g2).powi(2) + 16.0 * g2).sqrt())
}

/// How the CLI picks `d` for a given `gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DimensionPreset {
    /// `d = 4`, valid only at `gamma = sqrt(8/3)`.
    Known,
    Watabiki,
    Value(f64),
}

impl DimensionPreset {
    pub fn resolve(&self, gamma: f64) -> Result<f64> {
        match *self {
            DimensionPreset::Known => {
                if (gamma - GAMMA_PURE_GRAVITY).abs() < 1e-9 {
                    Ok(4.0)
                } else {
                    Err(Error::Domain {
                        name: "gamma",
                        value: gamma,
                        expected: "the known dimension preset requires gamma = sqrt(8/3)",
                    })
                }
            }
            DimensionPreset::Watabiki => watabiki_dimension(gamma),
            DimensionPreset::Value(d) => Ok(d),
        }
    }
}
