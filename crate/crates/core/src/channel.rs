//! Impulse responses of the two diffusion channels.
//!
//! Free diffusion uses the 2-D Green's function
//! `y = M exp(-x^2 / 4Dt) / (4 pi D t)` (molecules per m^2). Diffusion with
//! drift uses the Wiener form `y = M exp(-(x - vt)^2 / 4Dt) / sqrt(4 pi D t)`
//! (molecules per m). Both are kept as written; their units differ.
//!
//! Everything is SI: meters, seconds, m^2/s.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Which propagation law the channel follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelKind {
    FreeDiffusion,
    DriftDiffusion,
}

impl ChannelKind {
    pub fn name(self) -> &'static str {
        match self {
            ChannelKind::FreeDiffusion => "free diffusion",
            ChannelKind::DriftDiffusion => "diffusion with drift",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelModel<T> {
    FreeDiffusion,
    /// Constant flow towards the receiver, speed in m/s.
    DriftDiffusion {
        velocity: T,
    },
}

impl<T> ChannelModel<T> {
    pub fn kind(&self) -> ChannelKind {
        match self {
            ChannelModel::FreeDiffusion => ChannelKind::FreeDiffusion,
            ChannelModel::DriftDiffusion { .. } => ChannelKind::DriftDiffusion,
        }
    }
}

/// Channel law plus the physical parameters of one impulse transmission.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams<T> {
    model: ChannelModel<T>,
    molecules: T,
    diffusion_coeff: T,
    time: T,
}

fn positive<T: Scalar>(name: &'static str, value: T) -> Result<T> {
    if value.is_finite() && value > T::zero() {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value: value.as_f64(),
            reason: "must be positive and finite",
        })
    }
}

impl<T: Scalar> ChannelParams<T> {
    pub fn new(model: ChannelModel<T>, molecules: T, diffusion_coeff: T, time: T) -> Result<Self> {
        if let ChannelModel::DriftDiffusion { velocity } = model {
            if !(velocity.is_finite() && velocity >= T::zero()) {
                return Err(Error::InvalidParameter {
                    name: "drift_velocity",
                    value: velocity.as_f64(),
                    reason: "must be non-negative and finite",
                });
            }
        }
        Ok(Self {
            model,
            molecules: positive("molecules", molecules)?,
            diffusion_coeff: positive("diffusion_coeff", diffusion_coeff)?,
            time: positive("time", time)?,
        })
    }

    pub fn free_diffusion(molecules: T, diffusion_coeff: T, time: T) -> Result<Self> {
        Self::new(
            ChannelModel::FreeDiffusion,
            molecules,
            diffusion_coeff,
            time,
        )
    }

    pub fn drift_diffusion(molecules: T, diffusion_coeff: T, time: T, velocity: T) -> Result<Self> {
        Self::new(
            ChannelModel::DriftDiffusion { velocity },
            molecules,
            diffusion_coeff,
            time,
        )
    }

    /// Same channel with a different molecule count.
    pub fn with_molecules(&self, molecules: T) -> Result<Self> {
        Self::new(self.model, molecules, self.diffusion_coeff, self.time)
    }

    pub fn model(&self) -> ChannelModel<T> {
        self.model
    }

    pub fn kind(&self) -> ChannelKind {
        self.model.kind()
    }

    pub fn molecules(&self) -> T {
        self.molecules
    }

    pub fn diffusion_coeff(&self) -> T {
        self.diffusion_coeff
    }

    pub fn time(&self) -> T {
        self.time
    }

    /// `v t`, zero for free diffusion.
    pub fn drift_offset(&self) -> T {
        match self.model {
            ChannelModel::FreeDiffusion => T::zero(),
            ChannelModel::DriftDiffusion { velocity } => velocity * self.time,
        }
    }

    /// `4 D t`, the squared diffusion length.
    pub fn spread(&self) -> T {
        T::lit(4.0) * self.diffusion_coeff * self.time
    }

    /// Response where the exponent vanishes (`x = 0`, or `x = vt` with drift).
    pub fn peak_response(&self) -> T {
        let norm = T::PI() * self.spread();
        match self.model {
            ChannelModel::FreeDiffusion => self.molecules / norm,
            ChannelModel::DriftDiffusion { .. } => self.molecules / norm.sqrt(),
        }
    }

    pub fn ln_peak_response(&self) -> T {
        let ln_norm = (T::PI() * self.spread()).ln();
        match self.model {
            ChannelModel::FreeDiffusion => self.molecules.ln() - ln_norm,
            ChannelModel::DriftDiffusion { .. } => self.molecules.ln() - T::lit(0.5) * ln_norm,
        }
    }

    /// Exponent `(x - vt)^2 / 4Dt` of the response at distance `x`.
    fn attenuation(&self, x: T) -> Result<T> {
        if x < T::zero() || x.is_nan() {
            return Err(Error::Domain {
                name: "x",
                value: x.as_f64(),
                reason: "distance must be non-negative",
            });
        }
        let d = x - self.drift_offset();
        Ok(d * d / self.spread())
    }

    /// Received concentration at distance `x` for whichever model is
    /// configured.
    ///
    /// Falls back to `exp(ln peak - exponent)` once `exp(-exponent)` alone
    /// leaves the normal range.
    pub fn response(&self, x: T) -> Result<T> {
        let exponent = self.attenuation(x)?;
        let decay = (-exponent).exp();
        if decay.is_normal() {
            Ok(self.peak_response() * decay)
        } else {
            Ok((self.ln_peak_response() - exponent).exp())
        }
    }

    /// Natural log of [`response`](Self::response); never underflows.
    pub fn log_response(&self, x: T) -> Result<T> {
        Ok(self.ln_peak_response() - self.attenuation(x)?)
    }

    /// Squared displacement `z` with `response = y`:
    /// `z = -4Dt ln(y / peak)`. Zero exactly at the peak.
    pub fn response_inverse(&self, y: T) -> Result<T> {
        if !(y > T::zero()) {
            return Err(Error::Domain {
                name: "y",
                value: y.as_f64(),
                reason: "concentration must be positive",
            });
        }
        let ratio = y / self.peak_response();
        if ratio > T::one() {
            return Err(Error::Domain {
                name: "y",
                value: y.as_f64(),
                reason: "concentration exceeds the channel peak",
            });
        }
        Ok(-self.spread() * ratio.ln())
    }

    /// [`response_inverse`](Self::response_inverse) taking `ln y`.
    pub fn response_inverse_log(&self, ln_y: T) -> Result<T> {
        let gap = self.ln_peak_response() - ln_y;
        if gap.is_nan() || gap < T::zero() {
            return Err(Error::Domain {
                name: "ln_y",
                value: ln_y.as_f64(),
                reason: "concentration exceeds the channel peak",
            });
        }
        Ok(self.spread() * gap)
    }
}

fn expect_kind<T: Scalar>(params: &ChannelParams<T>, kind: ChannelKind) -> Result<()> {
    if params.kind() == kind {
        Ok(())
    } else {
        Err(Error::ModelMismatch {
            expected: kind.name(),
        })
    }
}

/// `M exp(-x^2 / 4Dt) / (4 pi D t)`.
pub fn free_diffusion_response<T: Scalar>(x: T, params: &ChannelParams<T>) -> Result<T> {
    expect_kind(params, ChannelKind::FreeDiffusion)?;
    params.response(x)
}

/// `M exp(-(x - vt)^2 / 4Dt) / sqrt(4 pi D t)`.
pub fn drift_diffusion_response<T: Scalar>(x: T, params: &ChannelParams<T>) -> Result<T> {
    expect_kind(params, ChannelKind::DriftDiffusion)?;
    params.response(x)
}

pub fn response_inverse<T: Scalar>(y: T, params: &ChannelParams<T>) -> Result<T> {
    params.response_inverse(y)
}
