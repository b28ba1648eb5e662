//! Reception success against a concentration threshold and the smallest
//! burst size that reaches a target success probability.

use rayon::prelude::*;

use crate::analytic::SignalDistribution;
use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::geometry::DiskRegion;
use crate::scalar::Scalar;

/// Upper end of the molecule-count search.
pub const MAX_MOLECULES: f64 = 4_294_967_296.0;
/// Relative width at which the bisection over `M` stops.
pub const MOLECULE_REL_TOL: f64 = 1e-4;

/// A symbol counts as received when the concentration reaches `threshold`
/// (same units as the channel response).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceptionRule<T> {
    threshold: T,
    target_probability: T,
}

impl<T: Scalar> ReceptionRule<T> {
    pub fn new(threshold: T, target_probability: T) -> Result<Self> {
        if !(threshold > T::zero() && threshold.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "threshold",
                value: threshold.as_f64(),
                reason: "must be positive and finite",
            });
        }
        if !(target_probability > T::zero() && target_probability < T::one()) {
            return Err(Error::InvalidParameter {
                name: "target_probability",
                value: target_probability.as_f64(),
                reason: "must lie strictly between 0 and 1",
            });
        }
        Ok(Self {
            threshold,
            target_probability,
        })
    }

    pub fn threshold(&self) -> T {
        self.threshold
    }

    pub fn target_probability(&self) -> T {
        self.target_probability
    }
}

/// `P(Y >= threshold)` from the quadrature CDF (two-branch density for
/// drift).
pub fn success_probability<T: Scalar>(
    rule: &ReceptionRule<T>,
    dist: &SignalDistribution<T>,
) -> Result<T> {
    Ok(dist.survival(rule.threshold)?.max(T::zero()).min(T::one()))
}

/// Smallest molecule count whose success probability reaches the rule's
/// target. The molecule count stored in `params` is ignored.
///
/// The bracket starts where the peak response equals the threshold (success
/// probability zero) and doubles up to [`MAX_MOLECULES`]; bisection then
/// narrows it to [`MOLECULE_REL_TOL`] and returns the upper end. Every step
/// is a power-of-two scaling or a midpoint, so scaling the threshold by a
/// power of two scales the answer exactly.
pub fn threshold_molecules<T: Scalar>(
    rule: &ReceptionRule<T>,
    params: &ChannelParams<T>,
    region: &DiskRegion<T>,
) -> Result<T> {
    let per_molecule = params.with_molecules(T::one())?;
    let probability = |m: T| -> Result<T> {
        let dist = SignalDistribution::new(per_molecule.with_molecules(m)?, *region)?;
        success_probability(rule, &dist)
    };
    let target = rule.target_probability;
    let ceiling = T::lit(MAX_MOLECULES);

    let peak_per_molecule = SignalDistribution::new(per_molecule, *region)?.support().1;
    let mut lo = rule.threshold / peak_per_molecule;
    let mut hi = lo + lo;
    let mut p_hi = probability(hi)?;
    while p_hi < target {
        if hi >= ceiling {
            return Err(Error::Unachievable {
                target: target.as_f64(),
                achieved: p_hi.as_f64(),
                molecules: hi.as_f64(),
            });
        }
        lo = hi;
        hi = hi + hi;
        p_hi = probability(hi)?;
    }

    let tol = T::lit(MOLECULE_REL_TOL);
    while hi - lo > tol * hi {
        let mid = T::lit(0.5) * (lo + hi);
        if probability(mid)? >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// [`threshold_molecules`] for each radius. Radii must be non-decreasing;
/// per-radius failures are reported in place and the sweep carries on.
pub fn radius_sweep<T: Scalar>(
    rule: &ReceptionRule<T>,
    params: &ChannelParams<T>,
    radii: &[T],
) -> Result<Vec<(T, Result<T>)>> {
    if radii.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::Precondition(
            "radius sweep needs ascending radii".into(),
        ));
    }
    Ok(radii
        .par_iter()
        .map(|&r| {
            let solved =
                DiskRegion::new(r).and_then(|region| threshold_molecules(rule, params, &region));
            (r, solved)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_validation() {
        assert!(ReceptionRule::new(0.0, 0.5).is_err());
        assert!(ReceptionRule::new(1.0, 0.0).is_err());
        assert!(ReceptionRule::new(1.0, 1.0).is_err());
        assert!(ReceptionRule::new(1.0, 0.9).is_ok());
    }

    #[test]
    fn trivial_thresholds() {
        let params = ChannelParams::<f64>::free_diffusion(50.0, 1e-9, 100.0).unwrap();
        let dist =
            SignalDistribution::new(params, DiskRegion::<f64>::new(1.2e-3).unwrap()).unwrap();
        let (lo, hi) = dist.support();
        let below = ReceptionRule::new(lo * 0.5, 0.9).unwrap();
        assert_eq!(success_probability(&below, &dist).unwrap(), 1.0);
        let above = ReceptionRule::new(hi * 1.5, 0.9).unwrap();
        assert_eq!(success_probability(&above, &dist).unwrap(), 0.0);
    }

    #[test]
    fn descending_radii_rejected() {
        let params = ChannelParams::<f64>::free_diffusion(1.0, 1e-9, 100.0).unwrap();
        let rule = ReceptionRule::new(1e4, 0.9).unwrap();
        assert!(matches!(
            radius_sweep(&rule, &params, &[1.5e-3, 1.1e-3]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn unreachable_target_reports_failure() {
        let params = ChannelParams::<f64>::free_diffusion(1.0, 1e-9, 100.0).unwrap();
        let rule = ReceptionRule::new(1e4, 0.999_999_9).unwrap();
        let err = threshold_molecules(&rule, &params, &DiskRegion::<f64>::new(3e-3).unwrap())
            .unwrap_err();
        assert!(matches!(err, Error::Unachievable { .. }), "{err:?}");
    }
}
