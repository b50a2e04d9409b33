//! Eigenvalue families, their gaps, and the scale sequences derived from the
//! gap law.
//!
//! Built-in families have closed-form gaps; naive differences of adjacent
//! eigenvalues cancel catastrophically once gaps approach 1e-19, so every
//! query that matters goes through the stable forms.

use crate::error::{Error, Result};
use crate::numeric::linear_fit;
use crate::scalar::Scalar;

/// Generator of a pure-point spectrum accumulating at one point.
///
/// * `Hydrogen { lambda }`: level `n` at `-lambda / n^2`, gaps `~ 2*lambda / n^3`.
/// * `PowerLaw { alpha, amplitude, sigma0 }`: level `n` at
///   `sigma0 + amplitude / n^alpha`, gaps `~ alpha*|amplitude| / n^(1+alpha)`.
///   Negative amplitude gives eigenvalues increasing toward `sigma0`,
///   positive amplitude decreasing toward it.
/// * `Custom`: finite list in level order, strictly monotone, with absolute
///   gaps strictly decreasing along the list.
#[derive(Debug, Clone, PartialEq)]
pub enum EigenvalueFamily<F> {
    Hydrogen { lambda: F },
    PowerLaw { alpha: F, amplitude: F, sigma0: F },
    Custom(CustomSpectrum<F>),
}

/// Validated caller-supplied spectrum plus the fitted gap law.
#[derive(Debug, Clone, PartialEq)]
pub struct CustomSpectrum<F> {
    values: Vec<F>,
    gap_exponent: F,
    fit_residual: F,
}

impl<F: Scalar> CustomSpectrum<F> {
    pub fn values(&self) -> &[F] {
        &self.values
    }

    /// Max relative deviation of the fitted power law from the actual gaps;
    /// above ~1% the scale sequences derived from the fit are unreliable.
    pub fn fit_residual(&self) -> F {
        self.fit_residual
    }
}

/// Result of the `N_eps` scale query. `index <= 1` carries no usable scale
/// separation and is flagged instead of erroring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScaleIndex {
    pub index: u64,
    pub degenerate: bool,
}

impl<F: Scalar> EigenvalueFamily<F> {
    pub fn hydrogen(lambda: F) -> Result<Self> {
        if !(lambda > F::zero()) || !lambda.is_finite() {
            return Err(Error::InvalidFamily(
                "hydrogen requires lambda > 0".into(),
            ));
        }
        let family = EigenvalueFamily::Hydrogen { lambda };
        family.check_gaps_decreasing(1024)?;
        Ok(family)
    }

    /// `lambda = kappa^2 / 4` for callers holding the Coulomb coupling.
    pub fn hydrogen_from_kappa(kappa: F) -> Result<Self> {
        if !(kappa > F::zero()) || !kappa.is_finite() {
            return Err(Error::InvalidFamily("kappa must be positive".into()));
        }
        Self::hydrogen(kappa * kappa / F::of(4.0))
    }

    pub fn power_law(alpha: F, amplitude: F, sigma0: F) -> Result<Self> {
        if !(alpha > F::zero()) || !alpha.is_finite() {
            return Err(Error::InvalidFamily("power law requires alpha > 0".into()));
        }
        if amplitude == F::zero() || !amplitude.is_finite() || !sigma0.is_finite() {
            return Err(Error::InvalidFamily(
                "power law requires finite nonzero amplitude and finite sigma0".into(),
            ));
        }
        let family = EigenvalueFamily::PowerLaw {
            alpha,
            amplitude,
            sigma0,
        };
        family.check_gaps_decreasing(1024)?;
        Ok(family)
    }

    /// Validate a finite list in level order: strictly monotone values whose
    /// absolute gaps strictly decrease, i.e. vanish toward the accumulation
    /// end. Fits the gap-law exponent by log-log regression.
    pub fn custom(values: Vec<F>) -> Result<Self> {
        if values.len() < 3 {
            return Err(Error::InvalidFamily(
                "custom spectrum needs at least 3 levels".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidFamily("custom spectrum must be finite".into()));
        }
        let increasing = values[1] > values[0];
        let mut gaps = Vec::with_capacity(values.len() - 1);
        for pair in values.windows(2) {
            let d = pair[1] - pair[0];
            if increasing && !(d > F::zero()) || !increasing && !(d < F::zero()) {
                return Err(Error::InvalidFamily(
                    "custom spectrum must be strictly monotone".into(),
                ));
            }
            gaps.push(d.abs());
        }
        for pair in gaps.windows(2) {
            if !(pair[1] < pair[0]) {
                return Err(Error::InvalidFamily(
                    "custom gaps must vanish strictly monotonically".into(),
                ));
            }
        }
        // fit over the tail half, where the asymptotic law holds
        let start = (gaps.len() / 2).min(gaps.len() - 2);
        let xs: Vec<F> = (start + 1..=gaps.len())
            .map(|n| F::of_usize(n).ln())
            .collect();
        let ys: Vec<F> = gaps[start..].iter().map(|g| g.ln()).collect();
        let (slope, intercept) = linear_fit(&xs, &ys)
            .ok_or_else(|| Error::InvalidFamily("gap-law fit failed".into()))?;
        let mut residual = F::zero();
        for (&x, &y) in xs.iter().zip(&ys) {
            let r = (y - (slope * x + intercept)).exp_m1().abs();
            if r > residual {
                residual = r;
            }
        }
        Ok(EigenvalueFamily::Custom(CustomSpectrum {
            values,
            gap_exponent: -slope,
            fit_residual: residual,
        }))
    }

    /// Number of levels, for finite families.
    pub fn horizon(&self) -> Option<usize> {
        match self {
            EigenvalueFamily::Custom(c) => Some(c.values.len()),
            _ => None,
        }
    }

    /// Eigenvalue of level `n >= 1`.
    pub fn eigenvalue(&self, n: u64) -> Result<F> {
        if n == 0 {
            return Err(Error::ZeroLevel);
        }
        match self {
            EigenvalueFamily::Hydrogen { lambda } => {
                let nf = F::of_u64(n);
                Ok(-*lambda / (nf * nf))
            }
            EigenvalueFamily::PowerLaw {
                alpha,
                amplitude,
                sigma0,
            } => {
                let nf = F::of_u64(n);
                Ok(*sigma0 + *amplitude * nf.powf(-*alpha))
            }
            EigenvalueFamily::Custom(c) => {
                c.values
                    .get(n as usize - 1)
                    .copied()
                    .ok_or(Error::LevelOutOfRange {
                        level: n,
                        len: c.values.len(),
                    })
            }
        }
    }

    /// `|eigenvalue(n+1) - eigenvalue(n)|` via a cancellation-free closed
    /// form for the built-in families.
    pub fn gap(&self, n: u64) -> Result<F> {
        if n == 0 {
            return Err(Error::ZeroLevel);
        }
        match self {
            EigenvalueFamily::Hydrogen { lambda } => {
                let nf = F::of_u64(n);
                let np = nf + F::one();
                Ok(*lambda * (F::of(2.0) * nf + F::one()) / (nf * nf * np * np))
            }
            EigenvalueFamily::PowerLaw {
                alpha, amplitude, ..
            } => {
                // 1/n^a - 1/(n+1)^a = n^-a * (1 - exp(a*ln(1 - 1/(n+1))))
                let nf = F::of_u64(n);
                let np = nf + F::one();
                let log_ratio = (-(F::one() / np)).ln_1p();
                Ok(amplitude.abs() * nf.powf(-*alpha) * (-(*alpha * log_ratio).exp_m1()))
            }
            EigenvalueFamily::Custom(c) => {
                let i = n as usize;
                if i >= c.values.len() {
                    return Err(Error::LevelOutOfRange {
                        level: n + 1,
                        len: c.values.len(),
                    });
                }
                Ok((c.values[i] - c.values[i - 1]).abs())
            }
        }
    }

    /// Exponent `e` of the gap law `gap(n) ~ const / n^e`: 3 for Hydrogen,
    /// `1 + alpha` for power laws, fitted for custom spectra.
    pub fn gap_exponent(&self) -> F {
        match self {
            EigenvalueFamily::Hydrogen { .. } => F::of(3.0),
            EigenvalueFamily::PowerLaw { alpha, .. } => F::one() + *alpha,
            EigenvalueFamily::Custom(c) => c.gap_exponent,
        }
    }

    /// `1 / gap_exponent`: the exact upper dimension of the family's
    /// accumulating spectrum (1/3 for Hydrogen, `1/(1+alpha)` for power laws).
    pub fn dimension_ceiling(&self) -> F {
        F::one() / self.gap_exponent()
    }

    /// Largest `C` (deflated by 0.999 so the bound is strict) with
    /// `gap(n) > C / n^e` for all `n <= horizon`.
    pub fn gap_lower_constant(&self, horizon: u64) -> Result<F> {
        if horizon < 2 {
            return Err(Error::InvalidFamily("horizon must be at least 2".into()));
        }
        let e = self.gap_exponent();
        let horizon = match self.horizon() {
            Some(len) => horizon.min(len as u64 - 1),
            None => horizon,
        };
        let mut min = F::infinity();
        for n in 1..=horizon {
            let scaled = F::of_u64(n).powf(e) * self.gap(n)?;
            if scaled < min {
                min = scaled;
            }
        }
        Ok(F::of(0.999) * min)
    }

    /// `floor((C/eps)^(1/e))`: the deepest level whose gap still exceeds
    /// `eps`. Flagged degenerate when the scale separation collapses.
    pub fn n_epsilon(&self, eps: F, c: F) -> Result<ScaleIndex> {
        if !(eps > F::zero()) || !eps.is_finite() {
            return Err(Error::BadRadius);
        }
        if !(c > F::zero()) || !c.is_finite() {
            return Err(Error::InvalidFamily("C must be positive".into()));
        }
        let raw = (c / eps).powf(F::one() / self.gap_exponent()).floor();
        let index = raw.to_u64().unwrap_or(u64::MAX);
        Ok(ScaleIndex {
            index,
            degenerate: index <= 1,
        })
    }

    /// Half the gap at level `N`: the largest radius at which every level
    /// `n <= N` is isolated, granted the monotone gap law.
    pub fn subsequence_epsilon(&self, n: u64) -> Result<F> {
        Ok(self.gap(n)? / F::of(2.0))
    }

    fn check_gaps_decreasing(&self, horizon: u64) -> Result<()> {
        let mut prev = self.gap(1)?;
        if !(prev > F::zero()) || !prev.is_finite() {
            return Err(Error::InvalidFamily("gap(1) must be positive".into()));
        }
        for n in 2..=horizon {
            let g = self.gap(n)?;
            if !(g < prev) {
                return Err(Error::InvalidFamily(format!(
                    "gaps must decrease strictly (violated at n = {n})"
                )));
            }
            prev = g;
        }
        Ok(())
    }
}
