//! Independent slow-path implementations used to validate every fast path
//! before it is trusted, plus the seeded corpus the `verify` command and the
//! acceptance suite run.
//!
//! Oracles are desk-scale only (quadratic scans, fine quadrature) and never
//! sit on a production path.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dimensions::{
    box_integral, correlation_sum, isolated_box_value, isolated_correlation_value,
};
use crate::error::{Error, Result};
use crate::measure::AtomicMeasure;
use crate::numeric::{Neumaier, PrefixSums};
use crate::scalar::Scalar;

/// One fast-vs-oracle comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport<F> {
    pub name: String,
    pub fast_value: F,
    pub oracle_value: F,
    pub abs_dev: F,
    pub rel_dev: F,
    pub tolerance: F,
    pub pass: bool,
    /// Successive quadrature refinements, when the oracle is a quadrature.
    pub refinements: Vec<F>,
    pub converged: bool,
}

impl<F: Scalar> OracleReport<F> {
    fn compare(
        name: impl Into<String>,
        fast: F,
        oracle: F,
        tolerance: F,
        refinements: Vec<F>,
        converged: bool,
    ) -> Self {
        let abs_dev = (fast - oracle).abs();
        let scale = fast.abs().max(oracle.abs()).max(F::min_positive_value());
        let rel_dev = abs_dev / scale;
        OracleReport {
            name: name.into(),
            fast_value: fast,
            oracle_value: oracle,
            abs_dev,
            rel_dev,
            tolerance,
            pass: rel_dev <= tolerance,
            refinements,
            converged,
        }
    }
}

/// Result of the refining midpoint quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadResult<F> {
    pub value: F,
    pub refinements: Vec<F>,
    pub converged: bool,
}

/// Midpoint quadrature of `ball_mass(x, eps)^q / eps` over the support
/// widened by `eps`, roughly doubling the grid until two successive values
/// agree to `successive_tol` (relative) or `cap_points` is reached.
///
/// Grids grow as `2m + 4587` rather than `2m`: under exact doubling, a
/// plateau's coverage error can be invariant from level to level (the
/// fractional breakpoint position maps to `2*frac - 1` while the cell
/// halves), so wrong values agree bit-for-bit. The odd offset shifts every
/// breakpoint phase by a large pseudo-random amount per level, which makes
/// successive agreement meaningful.
///
/// Ball masses are looked up by binary search against compensated prefix
/// sums; the integration route (Riemann sampling vs sweep segments) is what
/// the comparison exercises.
pub fn quad_box_integral<F: Scalar>(
    mu: &AtomicMeasure<F>,
    q: F,
    eps: F,
    start_points: usize,
    successive_tol: F,
    cap_points: usize,
) -> Result<QuadResult<F>> {
    if !(q > F::zero()) || q == F::one() {
        return Err(Error::BadQ);
    }
    if !(eps > F::zero()) || !eps.is_finite() {
        return Err(Error::BadRadius);
    }
    if start_points < 1000 {
        return Err(Error::InvalidScan(
            "quadrature needs at least 1000 grid points".into(),
        ));
    }
    let positions = mu.positions();
    let prefix = PrefixSums::new(mu.weights());
    let (lo_s, hi_s) = mu.support();
    let a = lo_s - eps;
    let b = hi_s + eps;
    let width = b - a;

    let eval = |points: usize| -> F {
        let h = width / F::of_usize(points);
        let mut acc = Neumaier::new();
        for i in 0..points {
            let x = a + (F::of_usize(i) + F::of(0.5)) * h;
            let lo = positions.partition_point(|&p| p <= x - eps);
            let hi = positions.partition_point(|&p| p < x + eps);
            if hi > lo {
                let mass = prefix.window(lo, hi).max(F::zero());
                if mass > F::zero() {
                    acc.add(mass.powf(q));
                }
            }
        }
        acc.value() * h / eps
    };

    let mut points = start_points;
    let mut refinements = vec![eval(points)];
    let mut converged = false;
    let mut agreements = 0usize;
    while points * 2 + 4587 <= cap_points {
        points = points * 2 + 4587;
        let next = eval(points);
        let prev = *refinements.last().expect("nonempty");
        refinements.push(next);
        if (next - prev).abs() <= successive_tol * next.abs() {
            agreements += 1;
            if agreements >= 2 {
                converged = true;
                break;
            }
        } else {
            agreements = 0;
        }
    }
    Ok(QuadResult {
        value: *refinements.last().expect("nonempty"),
        refinements,
        converged,
    })
}

/// All-pairs correlation integral: for every atom, the ball mass is found by
/// scanning every other atom with the shared endpoint convention. Matches
/// the fast path bitwise whenever the fast path sums windows directly.
pub fn naive_correlation_sum<F: Scalar>(mu: &AtomicMeasure<F>, q: F, eps: F) -> Result<F> {
    if !(q > F::zero()) || q == F::one() {
        return Err(Error::BadQ);
    }
    if !(eps > F::zero()) || !eps.is_finite() {
        return Err(Error::BadRadius);
    }
    let positions = mu.positions();
    let weights = mu.weights();
    let qm1 = q - F::one();
    let mut acc = F::zero();
    for i in 0..positions.len() {
        let a = positions[i] - eps;
        let b = positions[i] + eps;
        let mut mass = F::zero();
        for (j, &p) in positions.iter().enumerate() {
            if p > a && p < b {
                mass = mass + weights[j];
            }
        }
        acc = acc + mass.max(weights[i]).powf(qm1) * weights[i];
    }
    Ok(acc)
}

/// Compensated partial sums `sum_{n <= N} n^-exponent` at each checkpoint of
/// the ascending list `n_list`.
pub fn highprec_partial_sums<F: Scalar>(exponent: F, n_list: &[u64]) -> Result<Vec<F>> {
    if !(exponent > F::zero()) {
        return Err(Error::InvalidScan("exponent must be positive".into()));
    }
    for pair in n_list.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::InvalidScan(
                "checkpoints must be strictly increasing".into(),
            ));
        }
    }
    let mut out = Vec::with_capacity(n_list.len());
    let mut acc = Neumaier::new();
    let mut n = 0u64;
    for &stop in n_list {
        while n < stop {
            n += 1;
            acc.add(F::of_u64(n).powf(-exponent));
        }
        out.push(acc.value());
    }
    Ok(out)
}

/// Euler-Maclaurin value of `sum_{n0 < n <= n1} n^-r`; the zeta constant
/// cancels in the difference, so this checks direct summation without an
/// independent zeta evaluation.
pub fn euler_maclaurin_delta<F: Scalar>(r: F, n0: u64, n1: u64) -> F {
    let em = |x: F| -> F {
        x.powf(F::one() - r) / (F::one() - r) + x.powf(-r) / F::of(2.0)
            - r * x.powf(-r - F::one()) / F::of(12.0)
    };
    em(F::of_u64(n1)) - em(F::of_u64(n0))
}

/// `zeta(1.1)`, for the slow-tail cross-check `sum_{n >= N} n^-1.1 ~ 10 N^-0.1`.
pub const ZETA_1_1: f64 = 10.58444846495081;

/// Corpus configuration for [`run_corpus`].
#[derive(Debug, Clone)]
pub struct CorpusConfig {
    pub seed: u64,
    /// Sweep vs quadrature trials.
    pub quad_trials: usize,
    pub quad_tol: f64,
    /// Fast vs all-pairs correlation trials.
    pub correlation_trials: usize,
    pub correlation_tol: f64,
    /// Isolated-ball closed-form trials.
    pub isolated_trials: usize,
    pub isolated_tol: f64,
    /// Perturb one sweep value to prove the harness detects disagreement.
    pub inject_failure: bool,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            seed: 0x0bea_c0de,
            quad_trials: 200,
            quad_tol: 1e-6,
            correlation_trials: 500,
            correlation_tol: 1e-12,
            isolated_trials: 100,
            isolated_tol: 1e-12,
            inject_failure: false,
        }
    }
}

fn random_measure<F: Scalar>(rng: &mut ChaCha8Rng, max_atoms: usize) -> AtomicMeasure<F> {
    let n = rng.gen_range(2..=max_atoms.max(3));
    let atoms: Vec<(F, F)> = (0..n)
        .map(|_| {
            (
                F::of(rng.gen_range(-1.0..1.0)),
                F::of(rng.gen_range(0.0..1.0) + 1e-9),
            )
        })
        .collect();
    AtomicMeasure::from_atoms(atoms).expect("valid corpus measure")
}

fn random_q(rng: &mut ChaCha8Rng) -> f64 {
    // both branches of the admissible range
    if rng.gen_bool(0.75) {
        rng.gen_range(0.15..0.95)
    } else {
        rng.gen_range(1.1..2.5)
    }
}

/// Run the full seeded oracle corpus; one report per comparison.
pub fn run_corpus<F: Scalar>(cfg: &CorpusConfig) -> Vec<OracleReport<F>> {
    let mut reports = Vec::new();

    // sweep line vs midpoint quadrature
    let quad: Vec<OracleReport<F>> = (0..cfg.quad_trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(trial as u64));
            let mu = random_measure::<F>(&mut rng, 120);
            let q = F::of(random_q(&mut rng));
            let eps = F::of(rng.gen_range(0.05..0.4));
            let mut fast = box_integral(&mu, q, eps).expect("sweep");
            if cfg.inject_failure && trial == 0 {
                fast = fast * F::of(1.001);
            }
            let quad = quad_box_integral(&mu, q, eps, 8192, F::of(1e-7), 1 << 24).expect("quad");
            OracleReport::compare(
                format!("box_integral/quadrature/{trial}"),
                fast,
                quad.value,
                F::of(cfg.quad_tol),
                quad.refinements,
                quad.converged,
            )
        })
        .collect();
    reports.extend(quad);

    // fast vs all-pairs correlation
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5ca1_ab1e);
    for trial in 0..cfg.correlation_trials {
        let mu = random_measure::<F>(&mut rng, 1000);
        let q = F::of(random_q(&mut rng));
        let eps = F::of(rng.gen_range(1e-4..0.5));
        let fast = correlation_sum(&mu, q, eps).expect("fast");
        let oracle = naive_correlation_sum(&mu, q, eps).expect("naive");
        reports.push(OracleReport::compare(
            format!("correlation_sum/all_pairs/{trial}"),
            fast,
            oracle,
            F::of(cfg.correlation_tol),
            Vec::new(),
            true,
        ));
    }

    // isolated-ball closed forms, radii spanning 12 orders of magnitude
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x150_1a7e);
    for trial in 0..cfg.isolated_trials {
        let n = rng.gen_range(2usize..50);
        let atoms: Vec<(F, F)> = (0..n)
            .map(|i| {
                (
                    F::of(i as f64 * 0.5 + rng.gen_range(0.0..0.2)),
                    F::of(rng.gen_range(0.0..1.0) + 1e-9),
                )
            })
            .collect();
        let mu = AtomicMeasure::from_atoms(atoms).expect("separated corpus measure");
        let q = F::of(random_q(&mut rng));
        let exp = rng.gen_range(-14.0..-1.0);
        let eps = F::of(10f64.powf(exp));
        let fast_i = correlation_sum(&mu, q, eps).expect("fast I");
        let fast_l = box_integral(&mu, q, eps).expect("fast L");
        reports.push(OracleReport::compare(
            format!("correlation_sum/isolated/{trial}"),
            fast_i,
            isolated_correlation_value(&mu, q),
            F::of(cfg.isolated_tol),
            Vec::new(),
            true,
        ));
        reports.push(OracleReport::compare(
            format!("box_integral/isolated/{trial}"),
            fast_l,
            isolated_box_value(&mu, q),
            F::of(cfg.isolated_tol),
            Vec::new(),
            true,
        ));
    }

    // partial sums against the Euler-Maclaurin closed form
    for (i, r) in [0.55f64, 0.3, 1.1, 2.0].into_iter().enumerate() {
        let n0 = 1024u64;
        let n1 = 1u64 << 18;
        let sums = highprec_partial_sums::<F>(F::of(r), &[n0, n1]).expect("sums");
        let direct = sums[1] - sums[0];
        let em = euler_maclaurin_delta(F::of(r), n0, n1);
        reports.push(OracleReport::compare(
            format!("partial_sums/euler_maclaurin/{i}"),
            direct,
            em,
            F::of(1e-8),
            Vec::new(),
            true,
        ));
    }

    // slow tail: sum_{n >= N} n^-1.1 vs the integral N^-0.1 / 0.1
    {
        let n = 100u64;
        let head = highprec_partial_sums::<F>(F::of(1.1), &[n - 1]).expect("head")[0];
        let tail = F::of(ZETA_1_1) - head;
        let integral = F::of_u64(n).powf(F::of(-0.1)) / F::of(0.1);
        reports.push(OracleReport::compare(
            "partial_sums/tail_integral",
            tail,
            integral,
            F::of(0.01),
            Vec::new(),
            true,
        ));
    }

    reports
}
