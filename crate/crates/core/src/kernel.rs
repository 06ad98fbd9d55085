//! Exciting functions `h` of a linear Hawkes process.
//!
//! A kernel knows its value `h(t)`, its right tail `H(t) = ∫_t^∞ h(s) ds`
//! and its L¹ norm `‖h‖ = H(0)`. Every constructor rejects kernels with
//! `‖h‖ ≥ 1`, so downstream code may assume subcriticality.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite_positive, Error, Result};

/// User supplied right tail `H(t)` of a tabulated kernel.
pub type TailFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Sampled exciting function with a caller-supplied tail.
///
/// `h` is linearly interpolated between samples and is zero past the last
/// sample; nothing is extrapolated. The tail and the L¹ norm come from the
/// caller because their accuracy drives everything computed from `H`.
#[derive(Clone)]
pub struct Tabulated {
    times: Vec<f64>,
    values: Vec<f64>,
    l1_norm: f64,
    tail: TailFn,
    // sup of the interpolant over [times[i], ∞)
    suffix_max: Vec<f64>,
}

impl fmt::Debug for Tabulated {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Tabulated")
            .field("samples", &self.times.len())
            .field("t_max", &self.times.last())
            .field("l1_norm", &self.l1_norm)
            .finish()
    }
}

#[derive(Debug, Clone)]
enum Shape {
    Exponential { alpha: f64, beta: f64 },
    PowerLaw { c: f64, p: f64 },
    Tabulated(Tabulated),
}

/// An exciting function with `‖h‖ < 1`. Immutable once built.
#[derive(Debug, Clone)]
pub struct Kernel {
    shape: Shape,
}

/// Serializable description of the built-in kernels.
///
/// ```json
/// {"type": "exp", "alpha": 1.0, "beta": 2.0}
/// {"type": "powerlaw", "c": 1.0, "p": 3.0}
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum KernelSpec {
    Exp { alpha: f64, beta: f64 },
    Powerlaw { c: f64, p: f64 },
}

impl Kernel {
    /// `h(t) = α e^{-βt}`.
    pub fn exponential(alpha: f64, beta: f64) -> Result<Self> {
        ensure_finite_positive("alpha", alpha)?;
        ensure_finite_positive("beta", beta)?;
        Self::checked(Shape::Exponential { alpha, beta })
    }

    /// `h(t) = c / (1+t)^p`, `p > 2` so that `∫ t h(t) dt < ∞`.
    pub fn power_law(c: f64, p: f64) -> Result<Self> {
        ensure_finite_positive("c", c)?;
        if !(p.is_finite() && p > 2.0) {
            return Err(Error::InvalidParameter {
                name: "p",
                value: p,
                reason: "power-law exponent must exceed 2",
            });
        }
        Self::checked(Shape::PowerLaw { c, p })
    }

    /// Tabulated kernel from samples `(times[i], values[i])` with `times[0] = 0`.
    ///
    /// `tail` must satisfy `tail(0) = l1_norm` and be nonincreasing.
    pub fn tabulated(times: Vec<f64>, values: Vec<f64>, l1_norm: f64, tail: TailFn) -> Result<Self> {
        if times.len() < 2 || times.len() != values.len() {
            return Err(Error::Config(
                "tabulated kernel needs at least two (t, h) samples of equal length".into(),
            ));
        }
        if times[0] != 0.0 || times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config(
                "tabulated kernel times must start at 0 and increase strictly".into(),
            ));
        }
        if let Some(&bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidParameter {
                name: "values",
                value: bad,
                reason: "kernel samples must be finite and nonnegative",
            });
        }
        ensure_finite_positive("l1_norm", l1_norm)?;
        let at_zero = tail(0.0);
        if (at_zero - l1_norm).abs() > 1e-9 * l1_norm.max(1.0) {
            return Err(Error::InvalidParameter {
                name: "tail(0)",
                value: at_zero,
                reason: "tail at zero must equal the L1 norm",
            });
        }
        let mut suffix_max = values.clone();
        for i in (0..suffix_max.len() - 1).rev() {
            suffix_max[i] = suffix_max[i].max(suffix_max[i + 1]);
        }
        Self::checked(Shape::Tabulated(Tabulated {
            times,
            values,
            l1_norm,
            tail,
            suffix_max,
        }))
    }

    fn checked(shape: Shape) -> Result<Self> {
        let kernel = Kernel { shape };
        let l1 = kernel.l1_norm();
        if l1 >= 1.0 {
            return Err(Error::Unstable { l1 });
        }
        Ok(kernel)
    }

    /// Returns `h(t)`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(self.h(t))
    }

    /// Returns `H(t) = ∫_t^∞ h(s) ds`.
    pub fn tail(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(self.tail_at(t))
    }

    pub fn l1_norm(&self) -> f64 {
        match &self.shape {
            Shape::Exponential { alpha, beta } => alpha / beta,
            Shape::PowerLaw { c, p } => c / (p - 1.0),
            Shape::Tabulated(tab) => tab.l1_norm,
        }
    }

    /// Kernel `γ h` used by the tilted measure.
    pub fn scaled(&self, gamma: f64) -> Result<Self> {
        ensure_finite_positive("gamma", gamma)?;
        let shape = match &self.shape {
            Shape::Exponential { alpha, beta } => Shape::Exponential {
                alpha: gamma * alpha,
                beta: *beta,
            },
            Shape::PowerLaw { c, p } => Shape::PowerLaw { c: gamma * c, p: *p },
            Shape::Tabulated(tab) => {
                let inner = Arc::clone(&tab.tail);
                Shape::Tabulated(Tabulated {
                    times: tab.times.clone(),
                    values: tab.values.iter().map(|v| gamma * v).collect(),
                    l1_norm: gamma * tab.l1_norm,
                    tail: Arc::new(move |t| gamma * inner(t)),
                    suffix_max: tab.suffix_max.iter().map(|v| gamma * v).collect(),
                })
            }
        };
        Self::checked(shape)
    }

    /// Serializable form, `None` for tabulated kernels.
    pub fn spec(&self) -> Option<KernelSpec> {
        match self.shape {
            Shape::Exponential { alpha, beta } => Some(KernelSpec::Exp { alpha, beta }),
            Shape::PowerLaw { c, p } => Some(KernelSpec::Powerlaw { c, p }),
            Shape::Tabulated(_) => None,
        }
    }

    /// Decay rate when the kernel is exponential; lets the thinning
    /// simulator keep the excitation as a single decaying state.
    pub(crate) fn exponential_decay(&self) -> Option<f64> {
        match self.shape {
            Shape::Exponential { beta, .. } => Some(beta),
            _ => None,
        }
    }

    pub(crate) fn h(&self, t: f64) -> f64 {
        match &self.shape {
            Shape::Exponential { alpha, beta } => alpha * (-beta * t).exp(),
            Shape::PowerLaw { c, p } => c * (1.0 + t).powf(-p),
            Shape::Tabulated(tab) => tab.interpolate(t),
        }
    }

    pub(crate) fn tail_at(&self, t: f64) -> f64 {
        match &self.shape {
            Shape::Exponential { alpha, beta } => alpha / beta * (-beta * t).exp(),
            Shape::PowerLaw { c, p } => c / (p - 1.0) * (1.0 + t).powf(1.0 - p),
            Shape::Tabulated(tab) => (tab.tail)(t),
        }
    }

    /// `∫_t^∞ H` for kernels with an algebraic tail, where `H` and `h`
    /// form a useful basis for the decay of `F − x`.
    pub(crate) fn algebraic_tail_integral(&self, t: f64) -> Option<f64> {
        match self.shape {
            Shape::PowerLaw { c, p } => Some(c / ((p - 1.0) * (p - 2.0)) * (1.0 + t).powf(2.0 - p)),
            _ => None,
        }
    }

    /// `sup_{s ≥ t} h(s)`: a bound on each past event's contribution that
    /// stays valid until the next event.
    pub(crate) fn envelope(&self, t: f64) -> f64 {
        match &self.shape {
            Shape::Tabulated(tab) => tab.envelope(t),
            _ => self.h(t),
        }
    }

    /// Offset `s` with `H(s) = u ‖h‖`, i.e. a draw from the density
    /// `h / ‖h‖` when `u` is uniform on (0, 1].
    pub(crate) fn offset_quantile(&self, u: f64) -> f64 {
        match &self.shape {
            Shape::Exponential { beta, .. } => -u.ln() / beta,
            Shape::PowerLaw { p, .. } => u.powf(-1.0 / (p - 1.0)) - 1.0,
            Shape::Tabulated(tab) => tab.invert_tail(u * tab.l1_norm),
        }
    }
}

impl TryFrom<KernelSpec> for Kernel {
    type Error = Error;

    fn try_from(spec: KernelSpec) -> Result<Self> {
        match spec {
            KernelSpec::Exp { alpha, beta } => Kernel::exponential(alpha, beta),
            KernelSpec::Powerlaw { c, p } => Kernel::power_law(c, p),
        }
    }
}

impl Tabulated {
    fn interpolate(&self, t: f64) -> f64 {
        let last = *self.times.last().unwrap();
        if t > last {
            return 0.0;
        }
        let i = self.times.partition_point(|&s| s <= t).saturating_sub(1);
        if i + 1 >= self.times.len() {
            return self.values[i];
        }
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let w = (t - t0) / (t1 - t0);
        self.values[i] * (1.0 - w) + self.values[i + 1] * w
    }

    fn envelope(&self, t: f64) -> f64 {
        let last = *self.times.last().unwrap();
        if t > last {
            return 0.0;
        }
        let i = self.times.partition_point(|&s| s <= t);
        let ahead = if i < self.suffix_max.len() { self.suffix_max[i] } else { 0.0 };
        self.interpolate(t).max(ahead)
    }

    fn invert_tail(&self, target: f64) -> f64 {
        let mut lo = 0.0;
        let mut hi = self.times.last().copied().unwrap_or(1.0).max(1.0);
        let mut guard = 0;
        while (self.tail)(hi) > target && guard < 64 {
            lo = hi;
            hi *= 2.0;
            guard += 1;
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if (self.tail)(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-14 * hi.max(1.0) {
                break;
            }
        }
        0.5 * (lo + hi)
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::InvalidParameter {
            name: "t",
            value: t,
            reason: "time must be nonnegative",
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn reference_values() {
        let exp = Kernel::exponential(1.0, 2.0).unwrap();
        let pow = Kernel::power_law(1.0, 3.0).unwrap();
        assert_eq!(exp.eval(0.0).unwrap(), 1.0);
        assert_relative_eq!(exp.eval(0.5).unwrap(), (-1.0f64).exp(), max_relative = 1e-15);
        assert_relative_eq!(pow.eval(1.0).unwrap(), 0.125, max_relative = 1e-15);
        assert_eq!(exp.tail(0.0).unwrap(), 0.5);
        assert_eq!(pow.tail(0.0).unwrap(), 0.5);
        assert!(exp.tail(800.0).unwrap() == 0.0);
        assert_eq!(exp.l1_norm(), 0.5);
        assert_eq!(pow.l1_norm(), 0.5);
    }

    #[test]
    fn rejects_critical_and_invalid() {
        assert!(matches!(Kernel::exponential(2.0, 2.0), Err(Error::Unstable { .. })));
        assert!(matches!(Kernel::power_law(1.0, 2.0), Err(Error::InvalidParameter { .. })));
        assert!(Kernel::exponential(-1.0, 2.0).is_err());
        let k = Kernel::exponential(1.0, 2.0).unwrap();
        assert!(k.eval(-0.1).is_err());
        assert!(k.tail(-1e-12).is_err());
        assert!(k.scaled(2.0).is_err());
    }

    #[test]
    fn power_law_offsets_invert_tail() {
        let k = Kernel::power_law(1.0, 3.0).unwrap();
        for &u in &[0.9, 0.5, 0.1, 1e-4] {
            let s = k.offset_quantile(u);
            assert_relative_eq!(k.tail_at(s), u * k.l1_norm(), max_relative = 1e-12);
        }
    }

    #[test]
    fn spec_round_trip() {
        let json = r#"{"type": "powerlaw", "c": 1.0, "p": 3.0}"#;
        let spec: KernelSpec = serde_json::from_str(json).unwrap();
        let k = Kernel::try_from(spec).unwrap();
        assert_eq!(k.spec(), Some(spec));
        let exp: KernelSpec = serde_json::from_str(r#"{"type":"exp","alpha":1.0,"beta":2.0}"#).unwrap();
        assert_eq!(exp, KernelSpec::Exp { alpha: 1.0, beta: 2.0 });
    }

    #[test]
    fn tabulated_exponential_matches_closed_form() {
        let times: Vec<f64> = (0..=4000).map(|i| i as f64 * 0.005).collect();
        let values: Vec<f64> = times.iter().map(|t| (-2.0 * t).exp()).collect();
        let tab = Kernel::tabulated(times, values, 0.5, Arc::new(|t: f64| 0.5 * (-2.0 * t).exp())).unwrap();
        let exact = Kernel::exponential(1.0, 2.0).unwrap();
        for &t in &[0.0, 0.3, 1.7, 5.0] {
            assert_relative_eq!(tab.eval(t).unwrap(), exact.eval(t).unwrap(), max_relative = 1e-5);
        }
        assert_eq!(tab.eval(25.0).unwrap(), 0.0);
        assert_relative_eq!(tab.offset_quantile(0.25), exact.offset_quantile(0.25), max_relative = 1e-10);
        assert!(tab.envelope(0.0) >= tab.eval(0.0).unwrap());
        let half = tab.scaled(0.5).unwrap();
        assert_relative_eq!(half.l1_norm(), 0.25);
        assert_relative_eq!(half.tail(1.0).unwrap(), 0.25 * (-2.0f64).exp(), max_relative = 1e-12);
    }

    #[test]
    fn tabulated_rejects_inconsistent_tail() {
        let r = Kernel::tabulated(vec![0.0, 1.0], vec![1.0, 0.5], 0.5, Arc::new(|_| 0.4));
        assert!(r.is_err());
    }
}
