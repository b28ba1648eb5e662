//! Distribution of the received concentration `Y = y(X)` when the node
//! separation `X` follows the disk distance law.
//!
//! Densities are built by composing the transforms step by step: shift the
//! distance by the drift offset (`u = x - vt`), square it (`z = u^2`), then
//! push `z` through the inverted channel response, whose Jacobian is
//! `|dz/dy| = 4Dt / y`.
//!
//! Cumulative quantities are integrated in the reduced displacement
//! `w = |x - vt| / sqrt(4Dt)`, for which `ln y = ln peak - w^2`. The integrand
//! is `h_Y(y(w)) |dy/dw|`, evaluated without forming `y` itself, so supports
//! spanning thousands of e-folds (where `y_min` underflows) are integrated as
//! accurately as well-scaled ones.

use crate::channel::{ChannelKind, ChannelParams};
use crate::error::{Error, Result};
use crate::geometry::{distance_pdf, distance_power_pdf, DiskRegion};
use crate::quadrature::{integrate_with_breaks, QuadratureOptions};
use crate::scalar::Scalar;

/// Which solutions of `z = u^2` the drift density keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DriftBranches {
    /// Only `u = +sqrt(z)`: receivers at least `vt` away. Integrates to
    /// `P(X >= vt)`, not to one.
    PaperSingleBranch,
    /// Both `u = +sqrt(z)` and `u = -sqrt(z)`; a proper density.
    TwoBranch,
}

/// Stopping rule for the power-series CDF.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesTruncation<T> {
    pub max_terms: usize,
    pub tail_tolerance: T,
}

impl<T: Scalar> Default for SeriesTruncation<T> {
    fn default() -> Self {
        Self {
            max_terms: 200,
            tail_tolerance: T::lit(1e-12),
        }
    }
}

impl<T: Scalar> SeriesTruncation<T> {
    pub fn new(max_terms: usize, tail_tolerance: T) -> Result<Self> {
        if max_terms == 0 {
            return Err(Error::InvalidParameter {
                name: "max_terms",
                value: 0.0,
                reason: "must be at least one",
            });
        }
        if !(tail_tolerance > T::zero() && tail_tolerance.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "tail_tolerance",
                value: tail_tolerance.as_f64(),
                reason: "must be positive and finite",
            });
        }
        Ok(Self {
            max_terms,
            tail_tolerance,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeriesStatus {
    /// A term fell below the tail tolerance.
    Converged,
    /// `max_terms` were summed without reaching the tolerance.
    Truncated,
    /// The partial sum stopped being finite.
    Diverged,
}

impl SeriesStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SeriesStatus::Converged => "converged",
            SeriesStatus::Truncated => "truncated",
            SeriesStatus::Diverged => "diverged",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue<T> {
    pub value: T,
    pub status: SeriesStatus,
    pub terms: usize,
}

/// Analytic distribution of the received concentration for one channel and
/// one disk. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalDistribution<T> {
    params: ChannelParams<T>,
    region: DiskRegion<T>,
    ln_support: (T, T),
    support: (T, T),
    quadrature: QuadratureOptions<T>,
}

impl<T: Scalar> SignalDistribution<T> {
    pub fn new(params: ChannelParams<T>, region: DiskRegion<T>) -> Result<Self> {
        let vt = params.drift_offset();
        let nearest = vt.max(T::zero()).min(region.diameter());
        let ln_max = params.log_response(nearest)?;
        let ln_min = params
            .log_response(T::zero())?
            .min(params.log_response(region.diameter())?);
        let y_max = params.response(nearest)?;
        let y_min = params
            .response(T::zero())?
            .min(params.response(region.diameter())?);
        Ok(Self {
            params,
            region,
            ln_support: (ln_min, ln_max),
            support: (y_min, y_max),
            quadrature: QuadratureOptions::default(),
        })
    }

    pub fn with_quadrature(mut self, opts: QuadratureOptions<T>) -> Self {
        self.quadrature = opts;
        self
    }

    pub fn params(&self) -> &ChannelParams<T> {
        &self.params
    }

    pub fn region(&self) -> &DiskRegion<T> {
        &self.region
    }

    /// `(y_min, y_max)`. `y_min` is the response at the far end of the
    /// distance range and can underflow to zero; [`log_support`] cannot.
    ///
    /// [`log_support`]: Self::log_support
    pub fn support(&self) -> (T, T) {
        self.support
    }

    /// `(ln y_min, ln y_max)`.
    pub fn log_support(&self) -> (T, T) {
        self.ln_support
    }

    fn expect(&self, kind: ChannelKind) -> Result<()> {
        if self.params.kind() == kind {
            Ok(())
        } else {
            Err(Error::ModelMismatch {
                expected: kind.name(),
            })
        }
    }

    fn scale(&self) -> T {
        self.params.spread().sqrt()
    }

    fn w_of_log(&self, s: T) -> T {
        (self.params.ln_peak_response() - s).max(T::zero()).sqrt()
    }

    /// Reduced displacement range `[w_lo, w_hi]` covered by `x in [0, 2r]`.
    fn w_range(&self) -> (T, T) {
        let vt = self.params.drift_offset();
        let d = self.region.diameter();
        let scale = self.scale();
        let lo = if vt > d { vt - d } else { T::zero() };
        let hi = vt.max((d - vt).abs());
        (lo / scale, hi / scale)
    }

    /// Density of `Z = (X - vt)^2`.
    fn z_density(&self, z: T, branches: DriftBranches) -> T {
        let vt = self.params.drift_offset();
        if vt == T::zero() {
            // Only u = +sqrt(z) lands in [0, 2r]; this is the beta = 2 power law.
            return distance_power_pdf(z, T::lit(2.0), &self.region).unwrap_or(T::zero());
        }
        if z < T::zero() {
            return T::zero();
        }
        if z == T::zero() {
            return if distance_pdf(vt, &self.region) > T::zero() {
                T::infinity()
            } else {
                T::zero()
            };
        }
        let root = z.sqrt();
        let mut mass = distance_pdf(vt + root, &self.region);
        if branches == DriftBranches::TwoBranch {
            mass = mass + distance_pdf(vt - root, &self.region);
        }
        mass / (root + root)
    }

    /// `h_Y(y(w)) |dy/dw|` where `y(w) = peak * exp(-w^2)`.
    fn w_density(&self, w: T, branches: DriftBranches) -> T {
        let spread = self.params.spread();
        (w + w) * spread * self.z_density(spread * w * w, branches)
    }

    fn w_breaks(&self, a: T, b: T) -> Vec<T> {
        let mut points = vec![a];
        let vt = self.params.drift_offset();
        if vt > T::zero() {
            let scale = self.scale();
            let mut inner = [vt / scale, (self.region.diameter() - vt).abs() / scale];
            inner.sort_by(|p, q| p.partial_cmp(q).unwrap());
            points.extend(inner.into_iter().filter(|&p| p > a && p < b));
        }
        points.push(b);
        points
    }

    /// Probability mass with reduced displacement in `[a, b]`.
    fn w_mass(&self, a: T, b: T, branches: DriftBranches) -> Result<T> {
        let (lo, hi) = self.w_range();
        let (a, b) = (a.max(lo), b.min(hi));
        if !(b > a) {
            return Ok(T::zero());
        }
        let points = self.w_breaks(a, b);
        let integral =
            integrate_with_breaks(|w| self.w_density(w, branches), &points, &self.quadrature)?;
        Ok(integral.value)
    }

    fn is_normalized(&self, branches: DriftBranches) -> bool {
        self.params.kind() == ChannelKind::FreeDiffusion || branches == DriftBranches::TwoBranch
    }

    /// Reduced displacement at which the response equals `y`, computed from
    /// the single-rounding ratio `peak / y` where that is representable.
    fn w_of_y(&self, y: T) -> T {
        let ratio = self.params.peak_response() / y;
        if ratio.is_finite() {
            ratio.ln().max(T::zero()).sqrt()
        } else {
            self.w_of_log(y.ln())
        }
    }

    /// `(P(Y <= y), P(Y >= y))` at the concentration with reduced
    /// displacement `w`, each integrated over whichever side keeps the small
    /// tail accurate.
    fn split_w(&self, w: T, branches: DriftBranches) -> Result<(T, T)> {
        let (lo, hi) = self.w_range();
        if w.is_nan() {
            return Err(Error::Domain {
                name: "y",
                value: f64::NAN,
                reason: "not a number",
            });
        }
        if !self.is_normalized(branches) {
            return Ok((self.w_mass(w, hi, branches)?, self.w_mass(lo, w, branches)?));
        }
        if w <= lo {
            return Ok((T::one(), T::zero()));
        }
        if w >= hi {
            return Ok((T::zero(), T::one()));
        }
        let clamp = |p: T| p.max(T::zero()).min(T::one());
        if w < T::lit(0.5) * (lo + hi) {
            let survival = clamp(self.w_mass(lo, w, branches)?);
            Ok((T::one() - survival, survival))
        } else {
            let cdf = clamp(self.w_mass(w, hi, branches)?);
            Ok((cdf, T::one() - cdf))
        }
    }

    // ------------------------------------------------------------------
    // Densities

    /// Free-diffusion density of the received concentration, zero outside
    /// `[y_min, y_max]`. At `y_max` it takes the limit `4Dt / (r^2 y_max)`.
    pub fn free_pdf(&self, y: T) -> Result<T> {
        self.expect(ChannelKind::FreeDiffusion)?;
        Ok(self.pdf(y))
    }

    /// Drift density of the received concentration.
    ///
    /// Diverges like `(y_peak - y)^(-1/2)` at the peak when `0 < vt < 2r`.
    pub fn drift_pdf(&self, y: T, branches: DriftBranches) -> Result<T> {
        self.expect(ChannelKind::DriftDiffusion)?;
        if y > self.params.peak_response() {
            return Err(Error::Domain {
                name: "y",
                value: y.as_f64(),
                reason: "concentration exceeds the drift peak",
            });
        }
        Ok(self.density(y, branches))
    }

    /// Density for the configured model (two branches for drift); zero
    /// outside the support.
    pub fn pdf(&self, y: T) -> T {
        self.density(y, DriftBranches::TwoBranch)
    }

    fn density(&self, y: T, branches: DriftBranches) -> T {
        if !(y > T::zero()) || y > self.support.1 {
            return T::zero();
        }
        match self.params.response_inverse(y) {
            Ok(z) => self.params.spread() * self.z_density(z, branches) / y,
            Err(_) => T::zero(),
        }
    }

    /// Density of `ln Y`, i.e. `y h_Y(y)` at `y = exp(s)`.
    pub fn log_pdf_density(&self, s: T) -> T {
        let ln_peak = self.params.ln_peak_response();
        if !(s <= self.ln_support.1) || s < self.ln_support.0 {
            return T::zero();
        }
        let z = self.params.spread() * (ln_peak - s);
        self.params.spread() * self.z_density(z, DriftBranches::TwoBranch)
    }

    // ------------------------------------------------------------------
    // Cumulative quantities

    /// `P(Y <= y)` by adaptive quadrature of the free-diffusion density.
    pub fn free_cdf_quadrature(&self, y: T) -> Result<T> {
        self.expect(ChannelKind::FreeDiffusion)?;
        self.cdf(y)
    }

    /// `P(Y <= y)` for the configured model.
    pub fn cdf(&self, y: T) -> Result<T> {
        if !(y > T::zero()) {
            return Ok(T::zero());
        }
        Ok(self.split_w(self.w_of_y(y), DriftBranches::TwoBranch)?.0)
    }

    /// `P(Y >= y)` for the configured model.
    pub fn survival(&self, y: T) -> Result<T> {
        if !(y > T::zero()) {
            return Ok(T::one());
        }
        Ok(self.split_w(self.w_of_y(y), DriftBranches::TwoBranch)?.1)
    }

    pub fn cdf_log(&self, s: T) -> Result<T> {
        Ok(self.split_w(self.w_of_log(s), DriftBranches::TwoBranch)?.0)
    }

    pub fn survival_log(&self, s: T) -> Result<T> {
        Ok(self.split_w(self.w_of_log(s), DriftBranches::TwoBranch)?.1)
    }

    /// Drift `P(Y <= y)` under the chosen branch rule. For
    /// [`DriftBranches::PaperSingleBranch`] this tops out at `P(X >= vt)`.
    pub fn drift_cdf(&self, y: T, branches: DriftBranches) -> Result<T> {
        self.expect(ChannelKind::DriftDiffusion)?;
        if !(y > T::zero()) {
            return Ok(T::zero());
        }
        Ok(self.split_w(self.w_of_y(y), branches)?.0)
    }

    /// Total mass of the density. One for free diffusion and two-branch
    /// drift.
    pub fn normalization(&self, branches: DriftBranches) -> Result<T> {
        let (lo, hi) = self.w_range();
        self.w_mass(lo, hi, branches)
    }

    /// `P(a <= Y <= b)`.
    pub fn mass_between(&self, a: T, b: T) -> Result<T> {
        if !(b > a) {
            return Ok(T::zero());
        }
        let (_, hi) = self.w_range();
        let w_of = |y: T| if y > T::zero() { self.w_of_y(y) } else { hi };
        Ok(self
            .w_mass(w_of(b), w_of(a), DriftBranches::TwoBranch)?
            .max(T::zero()))
    }

    /// `P(ln Y <= s_i)` for ascending `s_i`, accumulated interval by interval.
    /// Much cheaper than calling [`cdf_log`](Self::cdf_log) per point.
    pub fn cdf_log_sorted(&self, sorted: &[T]) -> Result<Vec<T>> {
        let (_, hi) = self.w_range();
        let mut previous = hi;
        let mut acc = T::zero();
        let mut out = Vec::with_capacity(sorted.len());
        for (i, &s) in sorted.iter().enumerate() {
            if i > 0 && s < sorted[i - 1] {
                return Err(Error::Precondition(
                    "cdf_log_sorted needs ascending input".into(),
                ));
            }
            let w = if s >= self.ln_support.1 {
                T::zero()
            } else {
                self.w_of_log(s).min(hi)
            };
            if w < previous {
                acc = acc + self.w_mass(w, previous, DriftBranches::TwoBranch)?;
                previous = w;
            }
            out.push(acc.max(T::zero()).min(T::one()));
        }
        Ok(out)
    }

    // ------------------------------------------------------------------
    // Power series

    /// Free-diffusion CDF from the term-wise integrated power series of
    /// `arccos` (coefficients `sigma_n`) and of `sqrt(1 - z / 4r^2)`
    /// (coefficients `gamma_n`).
    ///
    /// With `c = sqrt(z) / 2r`:
    /// `P(Y <= y) = 1 - 4c^2 + (16/pi) sum_n (sigma_n c^2 + gamma_n z^n c^3) / (2n + 3)`,
    /// where `sigma_n = C(2n,n) c^(2n+1) / (4^n (2n+1))` and
    /// `gamma_n = C(1/2,n) (-1)^n / (4^n r^(2n))`.
    pub fn free_cdf_series(&self, y: T, trunc: &SeriesTruncation<T>) -> Result<SeriesValue<T>> {
        self.expect(ChannelKind::FreeDiffusion)?;
        if !(y > T::zero()) {
            return Ok(SeriesValue {
                value: T::zero(),
                status: SeriesStatus::Converged,
                terms: 0,
            });
        }
        self.free_cdf_series_log(y.ln(), trunc)
    }

    pub fn free_cdf_series_log(&self, s: T, trunc: &SeriesTruncation<T>) -> Result<SeriesValue<T>> {
        self.expect(ChannelKind::FreeDiffusion)?;
        let exact = |value| SeriesValue {
            value,
            status: SeriesStatus::Converged,
            terms: 0,
        };
        if s < self.ln_support.0 {
            return Ok(exact(T::zero()));
        }
        if s >= self.ln_support.1 {
            return Ok(exact(T::one()));
        }
        let c = (self.w_of_log(s) * self.scale() / self.region.diameter()).min(T::one());
        let c2 = c * c;

        let (one, two, three) = (T::one(), T::lit(2.0), T::lit(3.0));
        // C(2n, n) / 4^n and C(1/2, n) (-1)^n, advanced by their ratios.
        let mut central = one;
        let mut half_binom = one;
        // c^(2n+1) and c^(2n) = (z / 4r^2)^n
        let mut c_odd = c;
        let mut c_even = one;
        let mut sum = T::zero();
        let mut status = SeriesStatus::Truncated;
        let mut terms = 0;
        for n in 0..trunc.max_terms {
            let nf = T::from_count(n as u64);
            let sigma = central * c_odd / (two * nf + one);
            let gamma_zn = half_binom * c_even;
            let term = (sigma * c2 + gamma_zn * c2 * c) / (two * nf + three);
            sum = sum + term;
            terms = n + 1;
            if !sum.is_finite() {
                status = SeriesStatus::Diverged;
                break;
            }
            if term.abs() < trunc.tail_tolerance {
                status = SeriesStatus::Converged;
                break;
            }
            central = central * (two * nf + one) / (two * nf + two);
            half_binom = half_binom * (nf - T::lit(0.5)) / (nf + one);
            c_odd = c_odd * c2;
            c_even = c_even * c2;
        }
        let value = one - T::lit(4.0) * c2 + T::lit(16.0) / T::PI() * sum;
        let value = if value.is_finite() {
            value.max(T::zero()).min(one)
        } else {
            value
        };
        Ok(SeriesValue {
            value,
            status,
            terms,
        })
    }
}
