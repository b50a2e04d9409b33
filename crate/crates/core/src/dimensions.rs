//! Correlation and box integrals of atomic measures, per-scale dimension
//! estimates, and window/regression summaries.
//!
//! Two integral forms are implemented. The correlation form weights ball
//! masses by the measure itself and reduces to a sum over atoms; the box
//! form integrates `ball_mass(x)^q` in `x`, which is piecewise constant with
//! breakpoints at `position ± eps` and is evaluated exactly by a sweep line.
//! Both scale like `eps^((q-1)*d)`, and the finite-scale exponent
//! `d = ln(value) / ((q-1) ln eps)` is what a scan records per radius.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measure::AtomicMeasure;
use crate::numeric::{linear_fit, Neumaier, PrefixSums, TwoFloat};
use crate::scalar::Scalar;
use crate::spectra::EigenvalueFamily;
use crate::states::BoundState;

/// Window sums at or below this length are evaluated term by term, which
/// keeps them bitwise equal to a naive scan; longer windows switch to
/// compensated prefix differences (~1 ulp).
const DIRECT_WINDOW: usize = 32;

fn validate_q<F: Scalar>(q: F) -> Result<()> {
    if !(q > F::zero()) || q == F::one() || !q.is_finite() {
        return Err(Error::BadQ);
    }
    Ok(())
}

fn validate_eps<F: Scalar>(eps: F) -> Result<()> {
    if !(eps > F::zero()) || !eps.is_finite() {
        return Err(Error::BadRadius);
    }
    Ok(())
}

#[inline]
fn window_mass<F: Scalar>(weights: &[F], prefix: &PrefixSums<F>, lo: usize, hi: usize) -> F {
    if hi - lo == 1 {
        weights[lo]
    } else if hi - lo <= DIRECT_WINDOW {
        let mut sum = F::zero();
        for &w in &weights[lo..hi] {
            sum = sum + w;
        }
        sum
    } else {
        prefix.window(lo, hi)
    }
}

/// Correlation integral `sum_n ball_mass(p_n, eps)^(q-1) * w_n`.
///
/// Ball masses are found by a two-pointer sweep over the sorted atoms; each
/// mass is clamped below by the atom's own weight, which the true mass always
/// dominates. `O(N)` after the prefix build for any window structure.
pub fn correlation_sum<F: Scalar>(mu: &AtomicMeasure<F>, q: F, eps: F) -> Result<F> {
    validate_q(q)?;
    validate_eps(eps)?;
    let pos = mu.positions();
    let weights = mu.weights();
    let prefix = PrefixSums::new(weights);
    let qm1 = q - F::one();
    let mut lo = 0usize;
    let mut hi = 0usize;
    let mut acc = F::zero();
    for i in 0..pos.len() {
        let a = pos[i] - eps;
        let b = pos[i] + eps;
        while lo < pos.len() && pos[lo] <= a {
            lo += 1;
        }
        while hi < pos.len() && pos[hi] < b {
            hi += 1;
        }
        // radii below one ulp of the position collapse the rounded interval
        // to nothing; the true ball still contains the atom itself
        let mass = if hi > lo {
            window_mass(weights, &prefix, lo, hi).max(weights[i])
        } else {
            weights[i]
        };
        acc = acc + mass.powf(qm1) * weights[i];
    }
    Ok(acc)
}

/// Box integral `eps^-1 * integral of ball_mass(x, eps)^q dx`.
///
/// Sweep line over the `2N` breakpoints `position ± eps`, kept as two-float
/// pairs so segment lengths stay exact even when `eps` is far below the
/// position magnitudes. The running mass is compensated and reset to exact
/// zero whenever the active set empties, so isolated balls contribute
/// `2 * w^q` to machine precision.
pub fn box_integral<F: Scalar>(mu: &AtomicMeasure<F>, q: F, eps: F) -> Result<F> {
    validate_q(q)?;
    validate_eps(eps)?;
    let pos = mu.positions();
    let weights = mu.weights();
    let n = pos.len();

    let mut acc = Neumaier::new();
    let mut mass: Neumaier<F> = Neumaier::new();
    let mut active = 0usize;
    let mut enter = 0usize;
    let mut leave = 0usize;
    let mut prev: Option<TwoFloat<F>> = None;

    while leave < n {
        let leave_ev = TwoFloat::two_sum(pos[leave], eps);
        let enter_ev = if enter < n {
            Some(TwoFloat::two_sum(pos[enter], -eps))
        } else {
            None
        };
        // leaves first on coordinate ties; the tied segment has zero length
        let take_enter = matches!(enter_ev, Some(e) if e < leave_ev);
        let ev = if take_enter {
            enter_ev.expect("checked")
        } else {
            leave_ev
        };
        if let Some(p) = prev {
            if active > 0 {
                let len = ev.sub(p);
                if len > F::zero() {
                    let m = mass.value().max(F::zero());
                    acc.add(len * m.powf(q));
                }
            }
        }
        if take_enter {
            mass.add(weights[enter]);
            enter += 1;
            active += 1;
        } else {
            mass.add(-weights[leave]);
            leave += 1;
            active -= 1;
            if active == 0 {
                mass.reset();
            }
        }
        prev = Some(ev);
    }
    Ok(acc.value() / eps)
}

/// Closed form of the correlation integral when `2*eps < min_gap`.
pub fn isolated_correlation_value<F: Scalar>(mu: &AtomicMeasure<F>, q: F) -> F {
    let qm1 = q - F::one();
    let mut acc = F::zero();
    for &w in mu.weights() {
        acc = acc + w.powf(qm1) * w;
    }
    acc
}

/// Closed form of the box integral when `2*eps < min_gap`.
pub fn isolated_box_value<F: Scalar>(mu: &AtomicMeasure<F>, q: F) -> F {
    let mut acc = F::zero();
    for &w in mu.weights() {
        acc = acc + F::of(2.0) * w.powf(q);
    }
    acc
}

/// Half the smallest retained gap. Radii below it fully resolve the
/// truncation: every estimate collapses to zero and says nothing about the
/// untruncated measure. `None` for single-atom measures.
pub fn resolution_floor<F: Scalar>(mu: &AtomicMeasure<F>) -> Option<F> {
    mu.min_gap().ok().map(|g| g / F::of(2.0))
}

/// Strictly decreasing geometric radius grid from `start` down to `stop`.
pub fn geometric_grid<F: Scalar>(start: F, stop: F, ratio: F) -> Result<Vec<F>> {
    if !(start > F::zero()) || !(stop > F::zero()) || start < stop {
        return Err(Error::InvalidScan(
            "grid needs start >= stop > 0".into(),
        ));
    }
    if !(ratio > F::zero()) || !(ratio < F::one()) {
        return Err(Error::InvalidScan("grid ratio must lie in (0,1)".into()));
    }
    let mut grid = Vec::new();
    let mut eps = start;
    while eps >= stop {
        grid.push(eps);
        eps = eps * ratio;
        if grid.len() > 100_000 {
            return Err(Error::InvalidScan("grid too long".into()));
        }
    }
    Ok(grid)
}

/// Default grid for a measure: from its largest gap down to the resolution
/// floor at ratio `2^-1/2`.
pub fn default_grid<F: Scalar>(mu: &AtomicMeasure<F>) -> Result<Vec<F>> {
    let floor = resolution_floor(mu).ok_or(Error::TooFewAtoms)?;
    geometric_grid(mu.max_gap()?, floor, F::of(std::f64::consts::FRAC_1_SQRT_2))
}

/// One radius of a scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSample<F> {
    pub epsilon: F,
    pub i_value: F,
    pub l_value: F,
    pub d_i: F,
    pub d_l: F,
    /// Below the resolution floor (or at `ln eps = 0`): excluded from
    /// summaries.
    pub degenerate: bool,
}

/// Regression and range summaries over the window's valid samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowSummary<F> {
    pub window: (F, F),
    pub d_min: F,
    pub d_max: F,
    /// `d_i` at the smallest valid radius: the lower-dimension readout.
    pub d_at_finest: F,
    pub regression_slope_i: F,
    pub regression_slope_l: F,
    pub regression_d_i: F,
    pub regression_d_l: F,
    /// Intercept of `d_i = D + c * (-1/ln eps)`: diagnostic only, never a gate.
    pub extrapolated_d: F,
}

/// Per-sample verification data for level-indexed scans.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsequenceCheck<F> {
    pub levels: Vec<u64>,
    /// `sum_{n <= N} w_n^q`, the isolated-head lower bound at each radius.
    pub head_sums: Vec<F>,
    pub bound_ok: Vec<bool>,
    pub all_ok: bool,
}

/// A completed scan: per-radius samples plus summaries.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionScan<F> {
    pub q: F,
    pub total_mass: F,
    pub resolution_floor: Option<F>,
    pub samples: Vec<ScanSample<F>>,
    pub summary: Option<WindowSummary<F>>,
    pub subsequence: Option<SubsequenceCheck<F>>,
}

impl<F: Scalar> DimensionScan<F> {
    /// Valid samples inside the window.
    pub fn valid_samples(&self) -> impl Iterator<Item = &ScanSample<F>> {
        self.samples.iter().filter(|s| !s.degenerate)
    }

    /// Recompute the summary over a sub-window `(eps_lo, eps_hi)`.
    pub fn summarize(&self, window: (F, F)) -> Option<WindowSummary<F>> {
        summarize(self.q, &self.samples, Some(window))
    }

    /// CSV with header `epsilon,I,L,d_I,d_L,degenerate`.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "epsilon,I,L,d_I,d_L,degenerate")?;
        for s in &self.samples {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
                s.epsilon,
                s.i_value,
                s.l_value,
                s.d_i,
                s.d_l,
                u8::from(s.degenerate)
            )?;
        }
        Ok(())
    }
}

fn make_sample<F: Scalar>(mu: &AtomicMeasure<F>, q: F, eps: F, floor: Option<F>) -> Result<ScanSample<F>> {
    let i_value = correlation_sum(mu, q, eps)?;
    let l_value = box_integral(mu, q, eps)?;
    let ln_eps = eps.ln();
    let denom = (q - F::one()) * ln_eps;
    let degenerate = floor.map_or(false, |f| eps < f) || ln_eps == F::zero();
    let (d_i, d_l) = if denom == F::zero() {
        (F::zero(), F::zero())
    } else {
        (i_value.ln() / denom, l_value.ln() / denom)
    };
    Ok(ScanSample {
        epsilon: eps,
        i_value,
        l_value,
        d_i,
        d_l,
        degenerate,
    })
}

fn summarize<F: Scalar>(
    q: F,
    samples: &[ScanSample<F>],
    window: Option<(F, F)>,
) -> Option<WindowSummary<F>> {
    let keep: Vec<&ScanSample<F>> = samples
        .iter()
        .filter(|s| !s.degenerate)
        .filter(|s| window.map_or(true, |(lo, hi)| s.epsilon >= lo && s.epsilon <= hi))
        .collect();
    if keep.len() < 2 {
        return None;
    }
    let xs: Vec<F> = keep.iter().map(|s| s.epsilon.ln()).collect();
    let ys_i: Vec<F> = keep.iter().map(|s| s.i_value.ln()).collect();
    let ys_l: Vec<F> = keep.iter().map(|s| s.l_value.ln()).collect();
    let (slope_i, _) = linear_fit(&xs, &ys_i)?;
    let (slope_l, _) = linear_fit(&xs, &ys_l)?;

    let us: Vec<F> = keep.iter().map(|s| -F::one() / s.epsilon.ln()).collect();
    let ds: Vec<F> = keep.iter().map(|s| s.d_i).collect();
    let extrapolated = linear_fit(&us, &ds).map(|(_, b)| b).unwrap_or(F::nan());

    let mut d_min = F::infinity();
    let mut d_max = F::neg_infinity();
    for s in &keep {
        if s.d_i < d_min {
            d_min = s.d_i;
        }
        if s.d_i > d_max {
            d_max = s.d_i;
        }
    }
    let finest = keep
        .iter()
        .min_by(|a, b| a.epsilon.partial_cmp(&b.epsilon).expect("finite"))
        .expect("nonempty");
    let lo = keep
        .iter()
        .map(|s| s.epsilon)
        .fold(F::infinity(), |a, b| a.min(b));
    let hi = keep
        .iter()
        .map(|s| s.epsilon)
        .fold(F::neg_infinity(), |a, b| a.max(b));
    let qm1 = q - F::one();
    Some(WindowSummary {
        window: (lo, hi),
        d_min,
        d_max,
        d_at_finest: finest.d_i,
        regression_slope_i: slope_i,
        regression_slope_l: slope_l,
        regression_d_i: slope_i / qm1,
        regression_d_l: slope_l / qm1,
        extrapolated_d: extrapolated,
    })
}

/// Scan a measure over a strictly decreasing radius grid. Radii below the
/// resolution floor are flagged degenerate and excluded from the summary.
/// Samples are computed in parallel; per-sample summation order is fixed, so
/// results do not depend on the worker count.
pub fn scan<F: Scalar>(
    mu: &AtomicMeasure<F>,
    q: F,
    grid: &[F],
    window: Option<(F, F)>,
) -> Result<DimensionScan<F>> {
    validate_q(q)?;
    if grid.is_empty() {
        return Err(Error::InvalidScan("empty radius grid".into()));
    }
    for pair in grid.windows(2) {
        if !(pair[1] < pair[0]) {
            return Err(Error::InvalidScan(
                "radius grid must be strictly decreasing".into(),
            ));
        }
    }
    let floor = resolution_floor(mu);
    let samples: Vec<ScanSample<F>> = grid
        .par_iter()
        .map(|&eps| make_sample(mu, q, eps, floor))
        .collect::<Result<_>>()?;
    let summary = summarize(q, &samples, window);
    Ok(DimensionScan {
        q,
        total_mass: mu.total_mass(),
        resolution_floor: floor,
        samples,
        summary,
        subsequence: None,
    })
}

/// Scan at the level-indexed radii `eps_N = gap(N)/2` for each `N` in
/// `levels`. At those radii every level `n <= N` is isolated, so the
/// integral dominates the head sum `sum_{n <= N} w_n^q`; the check is
/// recorded per sample (compared with a 1e-12 relative slack for measures
/// whose sweep order differs from the level order).
pub fn subsequence_scan<F: Scalar>(
    state: &BoundState<F>,
    family: &EigenvalueFamily<F>,
    q: F,
    levels: &[u64],
) -> Result<DimensionScan<F>> {
    validate_q(q)?;
    if levels.is_empty() {
        return Err(Error::InvalidScan("empty level list".into()));
    }
    for pair in levels.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::InvalidScan(
                "level list must be strictly increasing".into(),
            ));
        }
    }
    let max_n = *levels.last().expect("nonempty");
    if max_n + 1 > state.len() as u64 {
        return Err(Error::InvalidScan(format!(
            "level {} needs the clustered tail: state truncated at {}",
            max_n,
            state.len()
        )));
    }
    let mu = state.spectral_measure(family)?;
    let floor = resolution_floor(&mu);

    let samples: Vec<(ScanSample<F>, F)> = levels
        .par_iter()
        .map(|&n| {
            let eps = family.subsequence_epsilon(n)?;
            let sample = make_sample(&mu, q, eps, floor)?;
            Ok((sample, state.weight_power_sum_head(q, n)))
        })
        .collect::<Result<_>>()?;

    let slack = F::one() - F::of(1e-12);
    let mut plain = Vec::with_capacity(samples.len());
    let mut head_sums = Vec::with_capacity(samples.len());
    let mut bound_ok = Vec::with_capacity(samples.len());
    for (sample, head) in samples {
        bound_ok.push(sample.i_value >= head * slack);
        head_sums.push(head);
        plain.push(sample);
    }
    // radii decrease with the level index; summaries expect that order
    let summary = summarize(q, &plain, None);
    let all_ok = bound_ok.iter().all(|&b| b);
    Ok(DimensionScan {
        q,
        total_mass: mu.total_mass(),
        resolution_floor: floor,
        samples: plain,
        summary,
        subsequence: Some(SubsequenceCheck {
            levels: levels.to_vec(),
            head_sums,
            bound_ok,
            all_ok,
        }),
    })
}

/// Outcome of the ceiling check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeReport<F> {
    pub ceiling: F,
    pub slack: F,
    pub max_d_l: F,
    pub margin: F,
    pub pass: bool,
    pub samples_checked: usize,
}

/// Check `d_L <= ceiling + slack` over the scan's valid samples, where the
/// ceiling is the family's exact upper dimension.
///
/// The bound applies to unit-mass measures, so each sample is rescaled to
/// unit mass first (`ln L` shifts by `-q ln mass`; radii are untouched).
/// Failures are reported, not raised.
pub fn upper_envelope_check<F: Scalar>(
    family: &EigenvalueFamily<F>,
    scan: &DimensionScan<F>,
    slack: F,
    window: Option<(F, F)>,
) -> EnvelopeReport<F> {
    let ceiling = family.dimension_ceiling();
    let q = scan.q;
    let ln_mass = scan.total_mass.ln();
    let mut max_d_l = F::neg_infinity();
    let mut checked = 0usize;
    for s in scan.valid_samples() {
        if let Some((lo, hi)) = window {
            if s.epsilon < lo || s.epsilon > hi {
                continue;
            }
        }
        let denom = (q - F::one()) * s.epsilon.ln();
        if denom == F::zero() {
            continue;
        }
        let d = (s.l_value.ln() - q * ln_mass) / denom;
        if d > max_d_l {
            max_d_l = d;
        }
        checked += 1;
    }
    let margin = ceiling + slack - max_d_l;
    EnvelopeReport {
        ceiling,
        slack,
        max_d_l,
        margin,
        pass: checked > 0 && max_d_l <= ceiling + slack,
        samples_checked: checked,
    }
}
