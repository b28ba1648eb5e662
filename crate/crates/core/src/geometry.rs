//! Two independent uniform points in a disk: sampling, the density of their
//! separation and power transforms of that separation.

use rand::Rng;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureOptions};
use crate::scalar::Scalar;

/// Circular deployment area, radius in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskRegion<T> {
    radius: T,
}

impl<T: Scalar> DiskRegion<T> {
    pub fn new(radius: T) -> Result<Self> {
        if !(radius.is_finite() && radius > T::zero()) {
            return Err(Error::InvalidParameter {
                name: "radius",
                value: radius.as_f64(),
                reason: "must be positive and finite",
            });
        }
        Ok(Self { radius })
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    /// Largest possible separation of two points in the disk.
    pub fn diameter(&self) -> T {
        self.radius + self.radius
    }

    /// `f_X(x) / x`, finite at `x = 0` where it equals `2 / r^2`.
    pub(crate) fn reduced_distance_density(&self, x: T) -> T {
        let r = self.radius;
        let q = x / self.diameter();
        if q < T::zero() || q > T::one() {
            return T::zero();
        }
        let two = T::lit(2.0);
        let pi = T::PI();
        let root = (T::one() - q * q).max(T::zero()).sqrt();
        two / (r * r) * (two / pi * q.acos() - x / (pi * r) * root)
    }
}

/// Separation of two nodes, `0 <= value <= 2r`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct DistanceSample<T>(T);

impl<T: Scalar> DistanceSample<T> {
    pub fn value(self) -> T {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarPoint<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> PlanarPoint<T> {
    pub fn norm(&self) -> T {
        self.x.hypot(self.y)
    }

    pub fn distance_to(&self, other: &Self) -> T {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Uniform point in the disk by inverse-CDF radial sampling (`r * sqrt(U)`).
///
/// Consumes exactly two uniforms per call.
pub fn sample_uniform_point<T: Scalar, R: Rng + ?Sized>(
    region: &DiskRegion<T>,
    rng: &mut R,
) -> PlanarPoint<T> {
    let u_angle: f64 = rng.random();
    let u_radius: f64 = rng.random();
    let theta = T::TAU() * T::lit(u_angle);
    let rho = region.radius * T::lit(u_radius).sqrt();
    PlanarPoint {
        x: rho * theta.cos(),
        y: rho * theta.sin(),
    }
}

/// Distance between two independent uniform points, clamped to `[0, 2r]`
/// against rounding in the polar-to-cartesian step.
pub fn sample_pair_distance<T: Scalar, R: Rng + ?Sized>(
    region: &DiskRegion<T>,
    rng: &mut R,
) -> DistanceSample<T> {
    let a = sample_uniform_point(region, rng);
    let b = sample_uniform_point(region, rng);
    DistanceSample(a.distance_to(&b).min(region.diameter()))
}

/// Density of the distance between two uniform points in the disk; zero
/// outside `[0, 2r]`.
pub fn distance_pdf<T: Scalar>(x: T, region: &DiskRegion<T>) -> T {
    if x < T::zero() || x > region.diameter() {
        return T::zero();
    }
    x * region.reduced_distance_density(x)
}

/// Density of `Z = X^beta`: `(1/beta) z^(1/beta - 1) f_X(z^(1/beta))` on
/// `[0, (2r)^beta]`, zero above.
///
/// Evaluated as `(1/beta) z^(2/beta - 1) (f_X(x)/x)` so `beta = 2` is finite at
/// `z = 0` (the value is `1 / r^2`). For `beta > 2` the density diverges at
/// the origin and `+inf` is returned there.
pub fn distance_power_pdf<T: Scalar>(z: T, beta: T, region: &DiskRegion<T>) -> Result<T> {
    if !(beta > T::zero() && beta.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "beta",
            value: beta.as_f64(),
            reason: "must be positive and finite",
        });
    }
    if z < T::zero() || z.is_nan() {
        return Err(Error::Domain {
            name: "z",
            value: z.as_f64(),
            reason: "power of a distance cannot be negative",
        });
    }
    let inv_beta = beta.recip();
    let x = z.powf(inv_beta);
    if x > region.diameter() {
        return Ok(T::zero());
    }
    let two = T::lit(2.0);
    let exponent = two * inv_beta - T::one();
    let factor = if z == T::zero() {
        if exponent > T::zero() {
            T::zero()
        } else if exponent == T::zero() {
            T::one()
        } else {
            return Ok(T::infinity());
        }
    } else {
        z.powf(exponent)
    };
    Ok(inv_beta * factor * region.reduced_distance_density(x))
}

/// `P(X <= x)` by adaptive quadrature of [`distance_pdf`].
pub fn distance_cdf<T: Scalar>(x: T, region: &DiskRegion<T>) -> Result<T> {
    if x <= T::zero() {
        return Ok(T::zero());
    }
    let d = region.diameter();
    if x >= d {
        return Ok(T::one());
    }
    let opts = QuadratureOptions::default();
    let mass = if x <= region.radius {
        integrate(|u| distance_pdf(u, region), T::zero(), x, &opts)?.value
    } else {
        T::one() - integrate(|u| distance_pdf(u, region), x, d, &opts)?.value
    };
    Ok(mass.max(T::zero()).min(T::one()))
}
