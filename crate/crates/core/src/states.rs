//! Bound states as per-level probability weights, and their conversion to
//! spectral measures.
//!
//! Level degeneracy is never materialized: a state stores the aggregated
//! weight per level, which is the only quantity any estimator reads. Every
//! constructor records the recipe and a closed-form bound on the series mass
//! dropped by the truncation.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::measure::AtomicMeasure;
use crate::numeric::Neumaier;
use crate::scalar::Scalar;
use crate::spectra::EigenvalueFamily;

/// Construction recipe carried by a state.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance<F> {
    /// `w_n = n^-(1 + 1/j)`.
    Power { j: u64 },
    /// Prefix below `split`, tail `w_n = n^(-2s)` from `split` on.
    Hybrid { split: u64, tail_exponent: F },
    /// Base kept through `m1`, zeros up to `m2`, power tail from `m2` on.
    Sigma { j: u64, sigma: F, m1: u64, m2: u64 },
    /// Seeded random weights.
    Random { seed: u64 },
    /// Anything built directly from a weight vector.
    Adhoc,
}

/// Nonnegative weights `w_1 .. w_N` (level-indexed from 1), trailing zeros
/// trimmed.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundState<F> {
    weights: Vec<F>,
    normalized: bool,
    provenance: Provenance<F>,
    truncated_tail_bound: F,
}

impl<F: Scalar> BoundState<F> {
    /// Build from raw weights (unnormalized, ad-hoc provenance).
    pub fn from_weights(weights: Vec<F>) -> Result<Self> {
        Self::build(weights, false, Provenance::Adhoc, F::zero())
    }

    fn build(
        mut weights: Vec<F>,
        normalized: bool,
        provenance: Provenance<F>,
        tail_bound: F,
    ) -> Result<Self> {
        for (i, w) in weights.iter().enumerate() {
            if !w.is_finite() || *w < F::zero() {
                return Err(Error::InvalidState(format!(
                    "weight {} must be finite and nonnegative",
                    i + 1
                )));
            }
        }
        while weights.last() == Some(&F::zero()) {
            weights.pop();
        }
        if weights.is_empty() {
            return Err(Error::InvalidState("state has no positive weight".into()));
        }
        Ok(BoundState {
            weights,
            normalized,
            provenance,
            truncated_tail_bound: tail_bound,
        })
    }

    /// `w_n = n^-(1 + 1/j)` for `n <= n_max`. The unnormalized form is the
    /// default for dimension scans: regression slopes are scale invariant
    /// and the drifting partial-sum normalizer would pollute them.
    pub fn power_state(j: u64, n_max: u64, normalized: bool) -> Result<Self> {
        if j < 1 {
            return Err(Error::InvalidState("power state requires j >= 1".into()));
        }
        if n_max < 2 {
            return Err(Error::InvalidState("power state requires n_max >= 2".into()));
        }
        let e = F::one() + F::one() / F::of_u64(j);
        let weights: Vec<F> = (1..=n_max).map(|n| F::of_u64(n).powf(-e)).collect();
        // integral bound on the dropped series tail
        let tail = F::of_u64(j) * F::of_u64(n_max).powf(-F::one() / F::of_u64(j));
        let state = Self::build(weights, false, Provenance::Power { j }, tail)?;
        if normalized {
            state.normalized()
        } else {
            Ok(state)
        }
    }

    /// Prefix weights below level `split`, then tail `w_n = n^(-2s)` through
    /// `n_max`. Requires `2*s*q_check > 1` so the defining series of the
    /// summability certificate converges.
    pub fn hybrid_state(
        prefix: Option<&BoundState<F>>,
        split: u64,
        tail_exponent: F,
        q_check: F,
        n_max: u64,
    ) -> Result<Self> {
        if split < 1 || split > n_max {
            return Err(Error::InvalidState(
                "hybrid state requires 1 <= split <= n_max".into(),
            ));
        }
        if !(q_check > F::zero()) || !(q_check < F::one()) {
            return Err(Error::InvalidState("q_check must lie in (0,1)".into()));
        }
        let two_sq = F::of(2.0) * tail_exponent * q_check;
        if !(two_sq > F::one()) {
            return Err(Error::TailNotSummable {
                value: two_sq.as_f64(),
            });
        }
        let mut weights: Vec<F> = Vec::with_capacity(n_max as usize);
        for n in 1..split {
            let w = prefix
                .and_then(|p| p.weights.get(n as usize - 1))
                .copied()
                .unwrap_or(F::zero());
            weights.push(w);
        }
        let two_s = F::of(2.0) * tail_exponent;
        for n in split..=n_max {
            weights.push(F::of_u64(n).powf(-two_s));
        }
        let tail = F::of_u64(n_max).powf(F::one() - two_s) / (two_s - F::one());
        Self::build(
            weights,
            false,
            Provenance::Hybrid {
                split,
                tail_exponent,
            },
            tail,
        )
    }

    /// Keep `base` through some `m1`, zero the stretch `(m1, m2)`, and attach
    /// the power tail `n^-(1+1/j)` from `m2` through `n_max`. `m1` and `m2`
    /// are the smallest indices with both in-truncation tails strictly below
    /// `sigma^2`, which caps the squared distance to `base` by `2*sigma^2`.
    pub fn sigma_state(base: &BoundState<F>, j: u64, sigma: F, n_max: u64) -> Result<Self> {
        if j < 1 {
            return Err(Error::InvalidState("sigma state requires j >= 1".into()));
        }
        if !(sigma > F::zero()) || !sigma.is_finite() {
            return Err(Error::InvalidState("sigma must be positive".into()));
        }
        if n_max < 2 {
            return Err(Error::InvalidState("sigma state requires n_max >= 2".into()));
        }
        let sigma_sq = sigma * sigma;

        // smallest m1 with sum_{n > m1} base_n < sigma^2 (suffix sums from the end)
        let mut m1 = base.weights.len() as u64;
        let mut suffix = Neumaier::new();
        for (i, &w) in base.weights.iter().enumerate().rev() {
            suffix.add(w);
            if suffix.value() < sigma_sq {
                m1 = i as u64;
            } else {
                break;
            }
        }

        let e = F::one() + F::one() / F::of_u64(j);
        let tail_term = |n: u64| F::of_u64(n).powf(-e);
        // smallest m2 > m1 with sum_{m2 <= n <= n_max} n^-(1+1/j) < sigma^2
        let mut m2 = n_max + 1;
        let mut suffix = Neumaier::new();
        for n in (m1 + 1..=n_max).rev() {
            suffix.add(tail_term(n));
            if suffix.value() < sigma_sq {
                m2 = n;
            } else {
                break;
            }
        }
        if m2 > n_max {
            let achievable = tail_term(n_max).sqrt();
            return Err(Error::SigmaInfeasible {
                achievable: achievable.as_f64(),
            });
        }

        let mut weights: Vec<F> = Vec::with_capacity(n_max as usize);
        for n in 1..=m1 {
            weights.push(base.weights[n as usize - 1]);
        }
        for _ in m1 + 1..m2 {
            weights.push(F::zero());
        }
        for n in m2..=n_max {
            weights.push(tail_term(n));
        }
        let tail = F::of_u64(j) * F::of_u64(n_max).powf(-F::one() / F::of_u64(j));
        Self::build(
            weights,
            false,
            Provenance::Sigma { j, sigma, m1, m2 },
            tail,
        )
    }

    /// Normalized state with weights `u_n * n^-gamma`, `u_n` uniform in
    /// (0, 1], `gamma` drawn from `[1.05, 1.8]` so the weights stay summable
    /// and the truncation approximates an actual unit vector.
    pub fn random_state(n_max: u64, seed: u64) -> Result<Self> {
        if n_max < 2 {
            return Err(Error::InvalidState("random state requires n_max >= 2".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gamma: f64 = rng.gen_range(1.05..1.8);
        let weights: Vec<F> = (1..=n_max)
            .map(|n| {
                let u: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
                F::of(u) * F::of_u64(n).powf(-F::of(gamma))
            })
            .collect();
        Self::build(weights, false, Provenance::Random { seed }, F::zero())?.normalized()
    }

    /// Rescale to unit total weight.
    pub fn normalized(&self) -> Result<Self> {
        let total = self.total();
        if !(total > F::zero()) {
            return Err(Error::InvalidState("cannot normalize zero state".into()));
        }
        let inv = F::one() / total;
        let weights: Vec<F> = self.weights.iter().map(|&w| w * inv).collect();
        let check = crate::numeric::comp_sum(&weights);
        debug_assert!((check - F::one()).abs() < F::of(1e-12));
        Ok(BoundState {
            weights,
            normalized: true,
            provenance: self.provenance.clone(),
            truncated_tail_bound: self.truncated_tail_bound,
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn weights(&self) -> &[F] {
        &self.weights
    }

    /// Weight of level `n` (1-indexed; zero beyond the truncation).
    pub fn weight(&self, n: u64) -> F {
        self.weights
            .get(n as usize - 1)
            .copied()
            .unwrap_or(F::zero())
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn provenance(&self) -> &Provenance<F> {
        &self.provenance
    }

    /// Closed-form bound on the series mass beyond the truncation.
    pub fn truncated_tail_bound(&self) -> F {
        self.truncated_tail_bound
    }

    /// Compensated total weight in ascending level order.
    pub fn total(&self) -> F {
        crate::numeric::comp_sum(&self.weights)
    }

    /// Amplitudes `sqrt(w_n)`, including interior zeros.
    pub fn amplitudes(&self) -> Vec<F> {
        self.weights.iter().map(|w| w.sqrt()).collect()
    }

    /// `sum_{n <= levels} w_n^q` over positive weights, each term evaluated
    /// as `w^(q-1) * w` to mirror the correlation integral's summand, so
    /// comparisons against it are float-exact in the isolated regime.
    pub fn weight_power_sum_head(&self, q: F, levels: u64) -> F {
        let end = (levels as usize).min(self.weights.len());
        let qm1 = q - F::one();
        let mut acc = F::zero();
        for &w in &self.weights[..end] {
            if w > F::zero() {
                acc = acc + w.powf(qm1) * w;
            }
        }
        acc
    }

    /// `sum_n w_n^q` over the whole truncation. For a hybrid state this is
    /// the finite summability certificate `S(q)`: prefix powers plus the
    /// in-truncation tail `sum n^(-2sq)`.
    pub fn weight_power_sum(&self, q: F) -> F {
        self.weight_power_sum_head(q, self.weights.len() as u64)
    }

    /// Spectral measure of the state under a family: an atom at
    /// `eigenvalue(n)` with weight `w_n` for every positive `w_n`.
    pub fn spectral_measure(&self, family: &EigenvalueFamily<F>) -> Result<AtomicMeasure<F>> {
        if let Some(h) = family.horizon() {
            if self.weights.len() > h {
                return Err(Error::LevelOutOfRange {
                    level: self.weights.len() as u64,
                    len: h,
                });
            }
        }
        let mut atoms = Vec::with_capacity(self.weights.len());
        for (i, &w) in self.weights.iter().enumerate() {
            if w > F::zero() {
                atoms.push((family.eigenvalue(i as u64 + 1)?, w));
            }
        }
        AtomicMeasure::from_atoms(atoms)
    }

    /// CSV with header `n,weight`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "n,weight")?;
        for (i, w) in self.weights.iter().enumerate() {
            writeln!(out, "{},{:.16e}", i + 1, w)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const W2: f64 = 0.4665164957684037; // 2^-1.1
    const W3: f64 = 0.29865281994692073; // 3^-1.1

    #[test]
    fn power_state_values() {
        let s = BoundState::<f64>::power_state(10, 3, false).unwrap();
        assert_eq!(s.weights()[0], 1.0);
        assert!((s.weights()[1] - W2).abs() < 1e-15);
        assert!((s.weights()[2] - W3).abs() < 1e-15);

        let z = 1.0 + W2 + W3;
        let s = BoundState::<f64>::power_state(10, 3, true).unwrap();
        assert!((s.weights()[0] - 1.0 / z).abs() < 1e-15);
        assert!((s.weights()[1] - W2 / z).abs() < 1e-15);
        assert!((s.weights()[2] - W3 / z).abs() < 1e-15);
        assert!(s.is_normalized());
        assert!((s.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn power_state_parameter_range() {
        assert!(BoundState::<f64>::power_state(0, 10, false).is_err());
        assert!(BoundState::<f64>::power_state(3, 1, false).is_err());
        // j = 1 gives the steepest admissible exponent 2, huge j approaches 1
        let s = BoundState::<f64>::power_state(1, 4, false).unwrap();
        assert!((s.weights()[1] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn hybrid_state_tail_and_certificate() {
        let s = BoundState::<f64>::hybrid_state(None, 1, 2.0, 0.5, 4).unwrap();
        assert_eq!(s.weights().len(), 4);
        assert!((s.weights()[0] - 1.0).abs() < 1e-15);
        assert!((s.weights()[1] - 1.0 / 16.0).abs() < 1e-16);
        assert!((s.weights()[2] - 1.0 / 81.0).abs() < 1e-16);
        assert!((s.weights()[3] - 1.0 / 256.0).abs() < 1e-16);
        // S(0.5) = sum n^-2 over the truncation
        let expected = 1.0 + 0.25 + 1.0 / 9.0 + 0.0625;
        assert!((s.weight_power_sum(0.5) - expected).abs() < 1e-12);
    }

    #[test]
    fn hybrid_state_rejects_nonsummable_tail() {
        let err = BoundState::<f64>::hybrid_state(None, 1, 0.4, 0.5, 10).unwrap_err();
        match err {
            Error::TailNotSummable { value } => assert!((value - 0.4).abs() < 1e-15),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn hybrid_state_uses_prefix() {
        let prefix = BoundState::from_weights(vec![0.5, 0.3]).unwrap();
        let s = BoundState::hybrid_state(Some(&prefix), 3, 2.0, 0.5, 5).unwrap();
        assert_eq!(&s.weights()[..2], &[0.5, 0.3]);
        assert!((s.weights()[2] - 3.0f64.powi(-4)).abs() < 1e-18);
    }

    #[test]
    fn sigma_state_search() {
        let base = BoundState::<f64>::power_state(10, 100, true).unwrap();
        let s = BoundState::sigma_state(&base, 10, 0.3, 10_000).unwrap();
        let (m1, m2) = match *s.provenance() {
            Provenance::Sigma { m1, m2, .. } => (m1, m2),
            _ => panic!("wrong provenance"),
        };
        assert!(m1 < m2 && m2 <= 10_000);
        // both in-truncation tails strictly below sigma^2 = 0.09
        let base_tail: f64 = base.weights()[m1 as usize..].iter().sum();
        assert!(base_tail < 0.09);
        let power_tail: f64 = (m2..=10_000).map(|n| (n as f64).powf(-1.1)).sum();
        assert!(power_tail < 0.09);
        // mass discrepancy below 2*sigma^2
        assert!(base_tail + power_tail < 2.0 * 0.09);
        // prefix kept verbatim, gap zeroed
        assert_eq!(s.weights()[..m1 as usize], base.weights()[..m1 as usize]);
        if m2 > m1 + 1 {
            assert_eq!(s.weight(m1 + 1), 0.0);
        }
    }

    #[test]
    fn sigma_state_degenerate_sigma_allows_empty_prefix() {
        let base = BoundState::<f64>::power_state(10, 50, true).unwrap();
        let s = BoundState::sigma_state(&base, 10, 1.5, 1000).unwrap();
        match *s.provenance() {
            Provenance::Sigma { m1, .. } => assert_eq!(m1, 0),
            _ => panic!("wrong provenance"),
        }
    }

    #[test]
    fn sigma_state_infeasible_sigma_reports_achievable() {
        let base = BoundState::<f64>::power_state(10, 50, true).unwrap();
        let err = BoundState::sigma_state(&base, 10, 1e-6, 100).unwrap_err();
        match err {
            Error::SigmaInfeasible { achievable } => {
                assert!((achievable - (100f64).powf(-1.1).sqrt()).abs() < 1e-12)
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn spectral_measure_examples() {
        let f = EigenvalueFamily::hydrogen(0.25).unwrap();
        let s = BoundState::<f64>::power_state(10, 2, true).unwrap();
        let mu = s.spectral_measure(&f).unwrap();
        assert_eq!(mu.positions(), &[-0.25, -0.0625]);
        let z = 1.0 + W2;
        assert!((mu.weights()[0] - 1.0 / z).abs() < 1e-15);
        assert!((mu.weights()[1] - W2 / z).abs() < 1e-15);
        assert!((mu.weights()[0] - 0.68189).abs() < 1e-5);
        assert!((mu.weights()[1] - 0.31811).abs() < 1e-5);

        // support inside [-lambda, 0)
        let (lo, hi) = mu.support();
        assert!(lo >= -0.25 && hi < 0.0);
    }

    #[test]
    fn spectral_measure_preserves_total_weight_exactly() {
        let f = EigenvalueFamily::hydrogen(0.25).unwrap();
        for n_max in [2u64, 17, 100, 1000] {
            let s = BoundState::<f64>::power_state(7, n_max, false).unwrap();
            let mu = s.spectral_measure(&f).unwrap();
            assert_eq!(mu.total_mass(), s.total());
        }
        // interior zeros are skipped without perturbing the compensated sum
        let s = BoundState::from_weights(vec![0.5, 0.0, 0.25, 0.125]).unwrap();
        let mu = s.spectral_measure(&f).unwrap();
        assert_eq!(mu.len(), 3);
        assert_eq!(mu.total_mass(), s.total());
    }

    #[test]
    fn spectral_measure_respects_custom_horizon() {
        let vals: Vec<f64> = (1..=8).map(|n| 1.0 / n as f64).collect();
        let f = EigenvalueFamily::custom(vals).unwrap();
        let s = BoundState::<f64>::power_state(10, 9, false).unwrap();
        assert!(matches!(
            s.spectral_measure(&f),
            Err(Error::LevelOutOfRange { .. })
        ));
    }

    #[test]
    fn trailing_zeros_trimmed_and_zero_state_rejected() {
        let s = BoundState::from_weights(vec![1.0, 0.5, 0.0, 0.0]).unwrap();
        assert_eq!(s.len(), 2);
        assert!(BoundState::<f64>::from_weights(vec![0.0, 0.0]).is_err());
        assert!(BoundState::<f64>::from_weights(vec![]).is_err());
    }

    #[test]
    fn jensen_bound_over_random_normalized_states() {
        // for normalized weights and r in (0,1): sum w^r <= sum n^-r
        let mut rng = ChaCha8Rng::seed_from_u64(0xa11);
        for _ in 0..1000 {
            let n = rng.gen_range(2usize..200);
            let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0) + 1e-12).collect();
            let s = BoundState::from_weights(raw).unwrap().normalized().unwrap();
            let r = rng.gen_range(0.05..0.95);
            let lhs = s.weight_power_sum(r);
            let rhs: f64 = (1..=s.len()).map(|k| (k as f64).powf(-r)).sum();
            assert!(lhs <= rhs, "n={n} r={r} lhs={lhs} rhs={rhs}");
        }
    }

    #[test]
    fn random_state_is_reproducible() {
        let a = BoundState::<f64>::random_state(64, 9).unwrap();
        let b = BoundState::<f64>::random_state(64, 9).unwrap();
        assert_eq!(a, b);
        assert!(a.is_normalized());
        assert!((a.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn state_csv_shape() {
        let s = BoundState::from_weights(vec![1.0, 0.5]).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("n,weight\n1,"));
    }
}
