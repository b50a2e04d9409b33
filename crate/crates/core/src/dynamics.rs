//! Time-averaged basis occupation probabilities, moment growth, and the
//! dimension-transport comparison.
//!
//! For a state with real amplitudes `a_n` on levels with energies `e_n`, the
//! time average of `|<k|psi(s)>|^2` over `[0, t]` has the closed form
//!
//! ```text
//! W_k(t) = sum_{n,m} c_{k,n} c_{k,m} a_n a_m * Re[(1 - exp(-i(e_n - e_m)t)) / (i(e_n - e_m)t)]
//! ```
//!
//! so no time quadrature is needed; the real part of the averaging kernel is
//! `sin(x)/x` at `x = (e_n - e_m) t`. Off-diagonal terms decay like `1/t`,
//! which makes a finite truncation saturate: growth exponents are only
//! meaningful on windows ending before the smallest retained gap has fully
//! dephased.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::linear_fit;
use crate::scalar::Scalar;
use crate::spectra::EigenvalueFamily;
use crate::states::BoundState;

/// How the `K x N` coefficient matrix was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    /// Rows of the identity: the level basis itself.
    Eigen,
    /// Orthogonal cosine-transform rows: deterministic and level-mixing.
    Scrambled,
    /// Row-orthonormalized seeded Gaussian matrix.
    RandomOrthogonal { seed: u64 },
}

/// Orthonormal rows `c_{k,n}` over the truncated level space, `K <= N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis<F> {
    kind: BasisKind,
    rows: usize,
    cols: usize,
    coeffs: Vec<F>,
}

const GRAM_TOL: f64 = 1e-12;

impl<F: Scalar> Basis<F> {
    fn validated(kind: BasisKind, rows: usize, cols: usize, coeffs: Vec<F>) -> Result<Self> {
        let basis = Basis {
            kind,
            rows,
            cols,
            coeffs,
        };
        let dev = basis.gram_deviation().as_f64();
        if dev > GRAM_TOL {
            return Err(Error::BasisNotOrthonormal { deviation: dev });
        }
        Ok(basis)
    }

    fn check_dims(k: usize, n: usize) -> Result<()> {
        if k < 1 || n < 1 || k > n {
            return Err(Error::DimensionMismatch(format!(
                "basis needs 1 <= K <= N, got K={k}, N={n}"
            )));
        }
        Ok(())
    }

    /// First `k` rows of the `n x n` identity.
    pub fn eigen(k: usize, n: usize) -> Result<Self> {
        Self::check_dims(k, n)?;
        let mut coeffs = vec![F::zero(); k * n];
        for i in 0..k {
            coeffs[i * n + i] = F::one();
        }
        Self::validated(BasisKind::Eigen, k, n, coeffs)
    }

    /// Orthonormal cosine rows
    /// `c_{k,n} = s_k cos(pi k (2n + 1) / (2N))`, `s_0 = sqrt(1/N)`,
    /// `s_k = sqrt(2/N)` (indices from 0 here).
    pub fn scrambled(k: usize, n: usize) -> Result<Self> {
        Self::check_dims(k, n)?;
        let nf = F::of_usize(n);
        let s0 = (F::one() / nf).sqrt();
        let sk = (F::of(2.0) / nf).sqrt();
        let pi = F::of(std::f64::consts::PI);
        let mut coeffs = Vec::with_capacity(k * n);
        for row in 0..k {
            let scale = if row == 0 { s0 } else { sk };
            let rf = F::of_usize(row);
            for col in 0..n {
                let angle =
                    pi * rf * (F::of(2.0) * F::of_usize(col) + F::one()) / (F::of(2.0) * nf);
                coeffs.push(scale * angle.cos());
            }
        }
        Self::validated(BasisKind::Scrambled, k, n, coeffs)
    }

    /// Seeded Gaussian rows orthonormalized by two passes of modified
    /// Gram-Schmidt.
    pub fn random_orthogonal(k: usize, n: usize, seed: u64) -> Result<Self> {
        use rand::{Rng, SeedableRng};
        Self::check_dims(k, n)?;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut rows: Vec<Vec<F>> = (0..k)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        // Box-Muller
                        let u1: f64 = 1.0 - rng.gen::<f64>();
                        let u2: f64 = rng.gen();
                        F::of((-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos())
                    })
                    .collect()
            })
            .collect();
        for _pass in 0..2 {
            for i in 0..k {
                for j in 0..i {
                    let dot = dot(&rows[i], &rows[j]);
                    for c in 0..n {
                        let v = rows[j][c];
                        rows[i][c] = rows[i][c] - dot * v;
                    }
                }
                let norm = dot(&rows[i], &rows[i]).sqrt();
                if !(norm > F::zero()) {
                    return Err(Error::BasisNotOrthonormal { deviation: 1.0 });
                }
                for c in 0..n {
                    rows[i][c] = rows[i][c] / norm;
                }
            }
        }
        let coeffs: Vec<F> = rows.into_iter().flatten().collect();
        Self::validated(BasisKind::RandomOrthogonal { seed }, k, n, coeffs)
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, k: usize) -> &[F] {
        &self.coeffs[k * self.cols..(k + 1) * self.cols]
    }

    /// Largest deviation of the row Gram matrix from the identity.
    pub fn gram_deviation(&self) -> F {
        let mut worst = F::zero();
        for i in 0..self.rows {
            for j in i..self.rows {
                let g = dot(self.row(i), self.row(j));
                let target = if i == j { F::one() } else { F::zero() };
                let dev = (g - target).abs();
                if dev > worst {
                    worst = dev;
                }
            }
        }
        worst
    }
}

#[inline]
fn dot<F: Scalar>(a: &[F], b: &[F]) -> F {
    let mut acc = F::zero();
    for (&x, &y) in a.iter().zip(b) {
        acc = acc + x * y;
    }
    acc
}

/// Time-averaging kernel `(1/t) * integral_0^t exp(-i * delta * s) ds`:
/// `1` at `delta = 0`, else `(1 - exp(-i*delta*t)) / (i*delta*t)`. Its
/// modulus is bounded by `min(1, 2/(|delta| t))`.
pub fn time_avg_kernel<F: Scalar>(delta: F, t: F) -> Complex<F> {
    if delta == F::zero() {
        return Complex::new(F::one(), F::zero());
    }
    let x = delta * t;
    // (1 - e^{-ix})/(ix) = sin(x)/x - i (1 - cos(x))/x
    Complex::new(x.sin() / x, -(F::one() - x.cos()) / x)
}

/// Real part of the kernel; even in `delta` bitwise (evaluated at `|delta t|`,
/// since libm sines are not exactly odd), which makes every occupation
/// probability independent of the phase convention.
#[inline]
pub fn re_kernel<F: Scalar>(delta: F, t: F) -> F {
    if delta == F::zero() {
        F::one()
    } else {
        let x = (delta * t).abs();
        x.sin() / x
    }
}

/// Time-averaged probabilities `W_k(t)` for all basis rows at one time.
///
/// `amplitudes` are the nonnegative level amplitudes (`sum a_n^2` is the
/// captured mass). Cost `O(K N^2)`; tiny negative round-off is clamped to 0.
pub fn averaged_probabilities<F: Scalar>(
    amplitudes: &[F],
    family: &EigenvalueFamily<F>,
    basis: &Basis<F>,
    t: F,
) -> Result<Vec<F>> {
    if !(t > F::zero()) || !t.is_finite() {
        return Err(Error::InvalidTrace("time must be positive".into()));
    }
    if basis.cols() != amplitudes.len() {
        return Err(Error::DimensionMismatch(format!(
            "basis over {} levels, state has {}",
            basis.cols(),
            amplitudes.len()
        )));
    }
    let energies = level_energies(family, amplitudes.len())?;
    Ok(averaged_probabilities_inner(
        amplitudes, &energies, basis, t,
    ))
}

fn level_energies<F: Scalar>(family: &EigenvalueFamily<F>, n: usize) -> Result<Vec<F>> {
    (1..=n as u64).map(|k| family.eigenvalue(k)).collect()
}

fn averaged_probabilities_inner<F: Scalar>(
    amplitudes: &[F],
    energies: &[F],
    basis: &Basis<F>,
    t: F,
) -> Vec<F> {
    let n = amplitudes.len();
    let k = basis.rows();

    // upper-triangle kernel table, rows n, columns m > n
    let mut kernel = vec![F::zero(); n * (n - 1) / 2];
    let mut offsets = vec![0usize; n];
    {
        let mut off = 0usize;
        for (i, slot) in offsets.iter_mut().enumerate() {
            *slot = off;
            off += n - 1 - i;
        }
        for i in 0..n {
            let base = offsets[i];
            for j in i + 1..n {
                kernel[base + j - i - 1] = re_kernel(energies[i] - energies[j], t);
            }
        }
    }

    let mut w = Vec::with_capacity(k);
    for row in 0..k {
        let b = basis.row(row);
        // fixed order: diagonal then ascending (n, m > n) pairs
        let mut acc = F::zero();
        for i in 0..n {
            let bi = b[i] * amplitudes[i];
            acc = acc + bi * bi;
        }
        let mut cross = F::zero();
        for i in 0..n {
            let bi = b[i] * amplitudes[i];
            if bi == F::zero() {
                continue;
            }
            let base = offsets[i];
            let mut inner = F::zero();
            for j in i + 1..n {
                inner = inner + b[j] * amplitudes[j] * kernel[base + j - i - 1];
            }
            cross = cross + bi * inner;
        }
        acc = acc + F::of(2.0) * cross;
        w.push(acc.max(F::zero()));
    }
    w
}

/// `(sum_k k^p W_k)^(1/p)` with `k = 1..K`.
pub fn moment<F: Scalar>(w: &[F], p: F) -> Result<F> {
    if !(p > F::zero()) || !p.is_finite() {
        return Err(Error::InvalidTrace("moment order must be positive".into()));
    }
    if w.is_empty() || w.iter().all(|&x| x == F::zero()) {
        return Err(Error::InvalidTrace("all-zero probability vector".into()));
    }
    if w.iter().any(|&x| x < F::zero()) {
        return Err(Error::InvalidTrace("negative probability".into()));
    }
    let mut acc = F::zero();
    for (i, &wk) in w.iter().enumerate() {
        acc = acc + F::of_usize(i + 1).powf(p) * wk;
    }
    Ok(acc.powf(F::one() / p))
}

/// Smallest level gap inside the truncation.
pub fn min_level_gap<F: Scalar>(family: &EigenvalueFamily<F>, n_levels: usize) -> Result<F> {
    if n_levels < 2 {
        return Err(Error::TooFewAtoms);
    }
    let mut best = F::infinity();
    for n in 1..n_levels as u64 {
        let g = family.gap(n)?;
        if g < best {
            best = g;
        }
    }
    Ok(best)
}

/// Time at which the largest off-diagonal kernel envelope `2/(min_gap * t)`
/// falls below 1e-2; beyond it the truncated dynamics is fully saturated.
pub fn saturation_time<F: Scalar>(family: &EigenvalueFamily<F>, n_levels: usize) -> Result<F> {
    Ok(F::of(200.0) / min_level_gap(family, n_levels)?)
}

/// Geometric time grid with `points_per_decade` samples per decade, ending
/// at `t_end` and spanning `decades` decades.
pub fn geometric_times<F: Scalar>(t_end: F, decades: F, points_per_decade: usize) -> Vec<F> {
    let n = (decades.as_f64() * points_per_decade as f64).round() as usize;
    let t0 = t_end * F::of(10.0).powf(-decades);
    (0..=n)
        .map(|i| t0 * (t_end / t0).powf(F::of_usize(i) / F::of_usize(n)))
        .collect()
}

/// Moment trace over a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTrace<F> {
    pub p: F,
    pub times: Vec<F>,
    /// `w[t][k]`
    pub w: Vec<Vec<F>>,
    pub r: Vec<F>,
    pub saturation_time: F,
}

/// Simulate `W_k(t)` and `r_p(t)` over `times` (strictly increasing).
/// Times are processed in parallel; per-time summation order is fixed.
pub fn simulate_moments<F: Scalar>(
    state: &BoundState<F>,
    family: &EigenvalueFamily<F>,
    basis: &Basis<F>,
    p: F,
    times: &[F],
) -> Result<MomentTrace<F>> {
    if times.is_empty() {
        return Err(Error::InvalidTrace("empty time grid".into()));
    }
    for pair in times.windows(2) {
        if !(pair[1] > pair[0]) {
            return Err(Error::InvalidTrace(
                "time grid must be strictly increasing".into(),
            ));
        }
    }
    if !(times[0] > F::zero()) {
        return Err(Error::InvalidTrace("times must be positive".into()));
    }
    let amplitudes = state.amplitudes();
    if basis.cols() != amplitudes.len() {
        return Err(Error::DimensionMismatch(format!(
            "basis over {} levels, state has {}",
            basis.cols(),
            amplitudes.len()
        )));
    }
    let energies = level_energies(family, amplitudes.len())?;
    let w: Vec<Vec<F>> = times
        .par_iter()
        .map(|&t| averaged_probabilities_inner(&amplitudes, &energies, basis, t))
        .collect();
    let r = w
        .iter()
        .map(|wk| moment(wk, p))
        .collect::<Result<Vec<F>>>()?;
    Ok(MomentTrace {
        p,
        times: times.to_vec(),
        w,
        r,
        saturation_time: saturation_time(family, amplitudes.len())?,
    })
}

/// Growth exponents extracted from a trace window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportExponents<F> {
    /// Smallest two-point secant of `ln r` vs `ln t` in the window.
    pub beta_minus: F,
    /// Largest two-point secant.
    pub beta_plus: F,
    /// Least-squares slope over the window.
    pub regression: F,
    pub window: (F, F),
    /// Set when the window end exceeds the saturation time; exponents past
    /// it measure the truncation, not the state.
    pub beyond_saturation: bool,
}

/// Extract exponents over `window` (defaults to the whole grid).
pub fn transport_exponents<F: Scalar>(
    trace: &MomentTrace<F>,
    window: Option<(F, F)>,
) -> Result<TransportExponents<F>> {
    let (lo, hi) = window.unwrap_or((trace.times[0], *trace.times.last().expect("nonempty")));
    let idx: Vec<usize> = (0..trace.times.len())
        .filter(|&i| trace.times[i] >= lo && trace.times[i] <= hi)
        .collect();
    if idx.len() < 2 {
        return Err(Error::InvalidTrace(
            "window must contain at least two grid times".into(),
        ));
    }
    let mut beta_minus = F::infinity();
    let mut beta_plus = F::neg_infinity();
    for pair in idx.windows(2) {
        let (i, j) = (pair[0], pair[1]);
        let dlnr = trace.r[j].ln() - trace.r[i].ln();
        let dlnt = trace.times[j].ln() - trace.times[i].ln();
        let slope = dlnr / dlnt;
        if slope < beta_minus {
            beta_minus = slope;
        }
        if slope > beta_plus {
            beta_plus = slope;
        }
    }
    let xs: Vec<F> = idx.iter().map(|&i| trace.times[i].ln()).collect();
    let ys: Vec<F> = idx.iter().map(|&i| trace.r[i].ln()).collect();
    let (regression, _) = linear_fit(&xs, &ys).ok_or_else(|| {
        Error::InvalidTrace("degenerate window for regression".into())
    })?;
    Ok(TransportExponents {
        beta_minus,
        beta_plus,
        regression,
        window: (trace.times[idx[0]], trace.times[*idx.last().expect("nonempty")]),
        beyond_saturation: hi > trace.saturation_time,
    })
}

/// Outcome of the dimension-transport comparison
/// `beta_plus >= dimension_estimate - slack`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GsbReport<F> {
    pub beta_plus: F,
    pub dimension_estimate: F,
    pub margin: F,
    pub slack: F,
    pub pass: bool,
}

pub fn gsb_check<F: Scalar>(beta_plus: F, dimension_estimate: F, slack: F) -> GsbReport<F> {
    let margin = beta_plus - dimension_estimate;
    GsbReport {
        beta_plus,
        dimension_estimate,
        margin,
        slack,
        pass: margin >= -slack,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn hyd() -> EigenvalueFamily<f64> {
        EigenvalueFamily::hydrogen(0.25).unwrap()
    }

    #[test]
    fn kernel_examples() {
        let k = time_avg_kernel(0.0f64, 5.0);
        assert_eq!(k, Complex::new(1.0, 0.0));
        // full period: exactly zero up to the rounding of 2*pi
        let k = time_avg_kernel(std::f64::consts::PI, 2.0);
        assert!(k.norm() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let delta = rng.gen_range(-50.0..50.0f64);
            let t = rng.gen_range(1e-3..1e3f64);
            if delta == 0.0 {
                continue;
            }
            let k = time_avg_kernel(delta, t);
            assert!(k.norm() <= 1.0f64.min(2.0 / (delta.abs() * t)) + 1e-12);
            // phase-convention independence of the real part, bitwise
            assert_eq!(re_kernel(delta, t), re_kernel(-delta, t));
        }
    }

    #[test]
    fn bases_are_orthonormal() {
        for (k, n) in [(4usize, 4usize), (8, 16), (64, 64)] {
            assert!(Basis::<f64>::eigen(k, n).unwrap().gram_deviation() == 0.0);
            assert!(Basis::<f64>::scrambled(k, n).unwrap().gram_deviation() < 1e-12);
            for seed in [0u64, 1, 42] {
                let b = Basis::<f64>::random_orthogonal(k, n, seed).unwrap();
                assert!(b.gram_deviation() < 1e-12);
            }
        }
        assert!(Basis::<f64>::scrambled(9, 8).is_err());
    }

    #[test]
    fn eigenstate_probabilities_are_constant() {
        // single occupied level: W_k(t) = c_k7^2 * a^2 for every t
        // (trailing zeros are trimmed, so the state spans 7 levels)
        let mut weights = vec![0.0; 24];
        weights[6] = 1.0;
        let state = BoundState::from_weights(weights).unwrap();
        let n = state.len();
        assert_eq!(n, 7);
        let basis = Basis::<f64>::scrambled(n, n).unwrap();
        let f = hyd();
        let a = state.amplitudes();
        let w1 = averaged_probabilities(&a, &f, &basis, 0.1).unwrap();
        for &t in &[1.0, 100.0, 1e6] {
            let wt = averaged_probabilities(&a, &f, &basis, t).unwrap();
            for (x, y) in w1.iter().zip(&wt) {
                assert!((x - y).abs() <= 1e-15);
            }
        }
        for (k, &w) in w1.iter().enumerate() {
            let c = basis.row(k)[6];
            assert!((w - c * c).abs() < 1e-15);
        }
    }

    #[test]
    fn eigen_basis_probabilities_are_the_weights() {
        let state = BoundState::<f64>::power_state(10, 16, true).unwrap();
        let basis = Basis::<f64>::eigen(16, 16).unwrap();
        let f = hyd();
        let a = state.amplitudes();
        for &t in &[0.5, 3.0, 1e4] {
            let w = averaged_probabilities(&a, &f, &basis, t).unwrap();
            for (wk, &pn) in w.iter().zip(state.weights()) {
                assert!((wk - pn).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn mass_is_conserved_for_square_bases() {
        let state = BoundState::<f64>::power_state(10, 48, true).unwrap();
        let f = hyd();
        let a = state.amplitudes();
        let captured: f64 = state.total();
        for basis in [
            Basis::<f64>::scrambled(48, 48).unwrap(),
            Basis::<f64>::random_orthogonal(48, 48, 5).unwrap(),
        ] {
            for &t in &[0.7, 13.0, 4.2e5] {
                let w = averaged_probabilities(&a, &f, &basis, t).unwrap();
                let total: f64 = w.iter().sum();
                assert!((total - captured).abs() < 1e-10);
                for &x in &w {
                    assert!(x >= 0.0 && x <= captured + 1e-10);
                }
            }
        }
    }

    #[test]
    fn probabilities_converge_to_diagonal_limit() {
        let state = BoundState::<f64>::power_state(10, 64, true).unwrap();
        let f = hyd();
        let basis = Basis::<f64>::scrambled(64, 64).unwrap();
        let a = state.amplitudes();
        let t = 1e6 / min_level_gap(&f, 64).unwrap();
        let w = averaged_probabilities(&a, &f, &basis, t).unwrap();
        for k in 0..64 {
            let diag: f64 = basis
                .row(k)
                .iter()
                .zip(&a)
                .map(|(c, amp)| c * c * amp * amp)
                .sum();
            assert!((w[k] - diag).abs() < 1e-4);
        }
    }

    #[test]
    fn phase_convention_independence_of_probabilities() {
        // negating every energy flips every delta, which is the same as
        // conjugating the evolution; W must be bitwise equal
        let state = BoundState::<f64>::power_state(10, 20, true).unwrap();
        let up = EigenvalueFamily::custom(
            (1..=20).map(|n| -0.25 / (n as f64 * n as f64)).collect(),
        )
        .unwrap();
        let down = EigenvalueFamily::custom(
            (1..=20).map(|n| 0.25 / (n as f64 * n as f64)).collect(),
        )
        .unwrap();
        let basis = Basis::<f64>::scrambled(20, 20).unwrap();
        let a = state.amplitudes();
        for &t in &[0.37, 37.0, 3.7e4] {
            let w_up = averaged_probabilities(&a, &up, &basis, t).unwrap();
            let w_down = averaged_probabilities(&a, &down, &basis, t).unwrap();
            assert_eq!(w_up, w_down);
        }
    }

    #[test]
    fn moment_examples() {
        let mut w = vec![0.0; 8];
        w[0] = 1.0;
        for p in [0.5, 1.0, 2.0] {
            assert_eq!(moment(&w, p).unwrap(), 1.0);
        }
        let mut w = vec![0.0; 3];
        w[0] = 0.5;
        w[2] = 0.5;
        let r = moment(&w, 2.0).unwrap();
        assert!((r - 5.0f64.sqrt()).abs() < 1e-15);
        // power-mean monotonicity for a uniform vector
        let w = vec![1.0 / 6.0; 6];
        let mut prev = 0.0;
        for p in [0.5, 1.0, 2.0, 3.0] {
            let r = moment(&w, p).unwrap();
            assert!(r >= prev);
            prev = r;
        }
        assert!(moment(&[0.0, 0.0], 1.0).is_err());
    }

    #[test]
    fn exponents_vanish_for_constant_traces() {
        let mut weights = vec![0.0; 16];
        weights[4] = 1.0;
        let state = BoundState::from_weights(weights).unwrap();
        let n = state.len();
        let f = hyd();
        let basis = Basis::<f64>::scrambled(n, n).unwrap();
        let times = geometric_times(1e6, 3.0, 8);
        let trace = simulate_moments(&state, &f, &basis, 1.0, &times).unwrap();
        let exps = transport_exponents(&trace, None).unwrap();
        assert!(exps.beta_plus.abs() < 1e-10);
        assert!(exps.beta_minus.abs() < 1e-10);
        assert!(exps.regression.abs() < 1e-10);
    }

    #[test]
    fn saturation_time_and_window_flag() {
        let f = hyd();
        let g = min_level_gap(&f, 64).unwrap();
        assert_eq!(g, f.gap(63).unwrap());
        let tsat = saturation_time(&f, 64).unwrap();
        assert_eq!(tsat, 200.0 / g);

        let state = BoundState::<f64>::power_state(10, 16, true).unwrap();
        let basis = Basis::<f64>::scrambled(16, 16).unwrap();
        let times = geometric_times(1e9, 2.0, 4);
        let trace = simulate_moments(&state, &f, &basis, 1.0, &times).unwrap();
        let exps = transport_exponents(&trace, Some((1e7, 1e9))).unwrap();
        assert!(exps.beyond_saturation == (1e9 > trace.saturation_time));
    }

    #[test]
    fn gsb_check_reports_margin() {
        let r = gsb_check(0.35f64, 0.30, 0.1);
        assert!(r.pass);
        assert!((r.margin - 0.05).abs() < 1e-15);
        let r = gsb_check(0.05, 0.30, 0.1);
        assert!(!r.pass);
    }

    #[test]
    fn geometric_times_shape() {
        let ts = geometric_times(1e4f64, 4.0, 8);
        assert_eq!(ts.len(), 33);
        assert!((ts[0] - 1.0).abs() < 1e-12);
        assert!((ts[32] - 1e4).abs() < 1e-8);
        for pair in ts.windows(2) {
            assert!(pair[1] > pair[0]);
        }
    }
}
