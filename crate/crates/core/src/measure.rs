//! Finite pure-point measures: sorted Dirac atoms with fast ball-mass queries.

use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::numeric::Neumaier;
use crate::scalar::Scalar;

/// A finite positive measure `sum_i w_i * delta(x - p_i)` with strictly
/// increasing positions.
///
/// Immutable after construction; all queries are pure, so shared references
/// may be used concurrently from any number of workers.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure<F> {
    positions: Vec<F>,
    weights: Vec<F>,
    total_mass: F,
}

impl<F: Scalar> AtomicMeasure<F> {
    /// Build from `(position, weight)` pairs. Positions are sorted and exact
    /// duplicates merged by summing their weights; weights must be positive
    /// and finite.
    pub fn from_atoms<I>(atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (F, F)>,
    {
        let mut pairs: Vec<(F, F)> = Vec::new();
        for (index, (p, w)) in atoms.into_iter().enumerate() {
            if !p.is_finite() {
                return Err(Error::BadPosition { index });
            }
            if !w.is_finite() || w <= F::zero() {
                return Err(Error::BadWeight {
                    index,
                    value: w.as_f64(),
                });
            }
            pairs.push((p, w));
        }
        if pairs.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        pairs.sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).expect("finite positions"));

        let mut positions = Vec::with_capacity(pairs.len());
        let mut weights: Vec<F> = Vec::with_capacity(pairs.len());
        for (p, w) in pairs {
            match positions.last() {
                Some(&last) if last == p => {
                    let i = weights.len() - 1;
                    weights[i] += w;
                }
                _ => {
                    positions.push(p);
                    weights.push(w);
                }
            }
        }
        let mut mass = Neumaier::new();
        for &w in &weights {
            mass.add(w);
        }
        Ok(AtomicMeasure {
            positions,
            weights,
            total_mass: mass.value(),
        })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        false // at least one atom by construction
    }

    pub fn positions(&self) -> &[F] {
        &self.positions
    }

    pub fn weights(&self) -> &[F] {
        &self.weights
    }

    pub fn atoms(&self) -> impl Iterator<Item = (F, F)> + '_ {
        self.positions
            .iter()
            .copied()
            .zip(self.weights.iter().copied())
    }

    /// Cached total mass (compensated sum in ascending position order; set to
    /// exactly one by [`normalize`](Self::normalize)).
    pub fn total_mass(&self) -> F {
        self.total_mass
    }

    /// `(min position, max position)`.
    pub fn support(&self) -> (F, F) {
        (self.positions[0], self.positions[self.positions.len() - 1])
    }

    /// Atom indices inside the open ball `(x-eps, x+eps)`, as a half-open
    /// index range. Membership is evaluated against the rounded endpoints
    /// `x - eps` and `x + eps`, the one convention every query shares.
    #[inline]
    pub(crate) fn ball_range(&self, x: F, eps: F) -> (usize, usize) {
        let a = x - eps;
        let b = x + eps;
        let lo = self.positions.partition_point(|&p| p <= a);
        let hi = self.positions.partition_point(|&p| p < b);
        (lo, hi)
    }

    /// Mass of the open ball `B(x, eps)`; strict inequality, so atoms at
    /// distance exactly `eps` are excluded. `O(log N + hits)`.
    pub fn ball_mass(&self, x: F, eps: F) -> Result<F> {
        if !(eps > F::zero()) || !eps.is_finite() {
            return Err(Error::BadRadius);
        }
        let (lo, hi) = self.ball_range(x, eps);
        let mut sum = F::zero();
        for &w in &self.weights[lo..hi] {
            sum = sum + w;
        }
        Ok(sum)
    }

    /// Smallest distance between consecutive atoms.
    pub fn min_gap(&self) -> Result<F> {
        if self.len() < 2 {
            return Err(Error::TooFewAtoms);
        }
        let mut best = F::infinity();
        for pair in self.positions.windows(2) {
            let g = pair[1] - pair[0];
            if g < best {
                best = g;
            }
        }
        Ok(best)
    }

    /// Largest distance between consecutive atoms.
    pub fn max_gap(&self) -> Result<F> {
        if self.len() < 2 {
            return Err(Error::TooFewAtoms);
        }
        let mut best = F::zero();
        for pair in self.positions.windows(2) {
            let g = pair[1] - pair[0];
            if g > best {
                best = g;
            }
        }
        Ok(best)
    }

    /// Rescale to unit mass. Positions are unchanged; the cached total mass
    /// becomes exactly one, so normalizing twice is a no-op.
    pub fn normalize(&self) -> Self {
        if self.total_mass == F::one() {
            return self.clone();
        }
        let inv = F::one() / self.total_mass;
        AtomicMeasure {
            positions: self.positions.clone(),
            weights: self.weights.iter().map(|&w| w * inv).collect(),
            total_mass: F::one(),
        }
    }

    /// Multiply every weight by `c > 0`.
    pub fn scale_weights(&self, c: F) -> Result<Self> {
        if !(c > F::zero()) || !c.is_finite() {
            return Err(Error::BadWeight {
                index: 0,
                value: c.as_f64(),
            });
        }
        let weights: Vec<F> = self.weights.iter().map(|&w| w * c).collect();
        let mut mass = Neumaier::new();
        for &w in &weights {
            mass.add(w);
        }
        Ok(AtomicMeasure {
            positions: self.positions.clone(),
            weights,
            total_mass: mass.value(),
        })
    }

    /// CSV with header `position,weight`, one atom per row, 17 significant
    /// digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "position,weight")?;
        for (p, w) in self.atoms() {
            writeln!(out, "{:.16e},{:.16e}", p, w)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn m(atoms: &[(f64, f64)]) -> AtomicMeasure<f64> {
        AtomicMeasure::from_atoms(atoms.iter().copied()).unwrap()
    }

    /// Reference implementation: full scan with the same endpoint convention.
    fn ball_mass_scan(mu: &AtomicMeasure<f64>, x: f64, eps: f64) -> f64 {
        let a = x - eps;
        let b = x + eps;
        let mut sum = 0.0;
        for (p, w) in mu.atoms() {
            if p > a && p < b {
                sum += w;
            }
        }
        sum
    }

    #[test]
    fn ball_mass_single_atom() {
        let mu = m(&[(0.0, 1.0)]);
        assert_eq!(mu.ball_mass(0.0, 0.1).unwrap(), 1.0);
    }

    #[test]
    fn ball_mass_two_atoms_inside() {
        let mu = m(&[(0.0, 0.5), (1.0, 0.5)]);
        assert_eq!(mu.ball_mass(0.5, 0.6).unwrap(), 1.0);
    }

    #[test]
    fn open_ball_excludes_boundary() {
        let mu = m(&[(0.0, 0.5), (1.0, 0.5)]);
        assert_eq!(mu.ball_mass(0.5, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn ball_mass_rejects_bad_radius() {
        let mu = m(&[(0.0, 1.0)]);
        assert_eq!(mu.ball_mass(0.0, 0.0), Err(Error::BadRadius));
        assert_eq!(mu.ball_mass(0.0, -1.0), Err(Error::BadRadius));
    }

    #[test]
    fn construction_rejects_bad_atoms() {
        assert_eq!(
            AtomicMeasure::<f64>::from_atoms(std::iter::empty()),
            Err(Error::EmptyMeasure)
        );
        assert!(matches!(
            AtomicMeasure::from_atoms([(0.0, -1.0)]),
            Err(Error::BadWeight { .. })
        ));
        assert!(matches!(
            AtomicMeasure::from_atoms([(0.0, 0.0)]),
            Err(Error::BadWeight { .. })
        ));
        assert!(matches!(
            AtomicMeasure::from_atoms([(f64::NAN, 1.0)]),
            Err(Error::BadPosition { .. })
        ));
    }

    #[test]
    fn duplicates_merge_by_summing() {
        let mu = m(&[(1.0, 0.25), (0.0, 1.0), (1.0, 0.25)]);
        assert_eq!(mu.len(), 2);
        assert_eq!(mu.weights(), &[1.0, 0.5]);
        assert_eq!(mu.min_gap().unwrap(), 1.0);
    }

    #[test]
    fn normalize_examples() {
        let mu = m(&[(0.0, 2.0)]).normalize();
        assert_eq!(mu.weights(), &[1.0]);

        let mu = m(&[(0.0, 1.0), (1.0, 3.0)]).normalize();
        assert_eq!(mu.weights(), &[0.25, 0.75]);

        // idempotence is exact: the cached mass of a normalized measure is one
        let once = m(&[(0.0, 0.3), (1.0, 0.4), (2.0, 0.9)]).normalize();
        let twice = once.normalize();
        assert_eq!(once, twice);
    }

    #[test]
    fn min_gap_examples() {
        let mu = m(&[(0.0, 1.0), (1.0, 1.0), (3.0, 1.0)]);
        assert_eq!(mu.min_gap().unwrap(), 1.0);
        assert_eq!(mu.max_gap().unwrap(), 2.0);
        assert_eq!(m(&[(0.0, 1.0)]).min_gap(), Err(Error::TooFewAtoms));

        // Hydrogen levels n = 1..3 at lambda = 0.25: gaps 0.1875 and 1.25/36
        let mu = m(&[(-0.25, 1.0), (-0.0625, 1.0), (-0.25 / 9.0, 1.0)]);
        let expected = 0.25 * 5.0 / 36.0;
        assert!((mu.min_gap().unwrap() - expected).abs() < 1e-16);
    }

    #[test]
    fn binary_search_matches_scan_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..1000 {
            let n = rng.gen_range(1..60);
            let atoms: Vec<(f64, f64)> = (0..n)
                .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(0.0..1.0) + 1e-9))
                .collect();
            let mu = AtomicMeasure::from_atoms(atoms).unwrap();
            let x = rng.gen_range(-1.2..1.2);
            let eps = rng.gen_range(1e-6..2.0);
            assert_eq!(mu.ball_mass(x, eps).unwrap(), ball_mass_scan(&mu, x, eps));
        }
    }

    #[test]
    fn ball_mass_monotone_in_radius_and_saturates() {
        // dyadic weights keep every sum exact, so the comparisons are exact
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(2..40);
            let atoms: Vec<(f64, f64)> = (0..n)
                .map(|_| {
                    let w = (rng.gen_range(1u32..1024) as f64) / 1024.0;
                    (rng.gen_range(-1.0..1.0), w)
                })
                .collect();
            let mu = AtomicMeasure::from_atoms(atoms).unwrap();
            let x = rng.gen_range(-1.0..1.0);
            let mut prev = 0.0;
            for k in 0..12 {
                let eps = 1e-3 * (2.0f64).powi(k);
                let bm = mu.ball_mass(x, eps).unwrap();
                assert!(bm >= prev);
                prev = bm;
            }
            let (lo, hi) = mu.support();
            let huge = (hi - lo) + (x - lo).abs() + (hi - x).abs() + 1.0;
            assert_eq!(mu.ball_mass(x, huge).unwrap(), mu.total_mass());
        }
    }

    #[test]
    fn ball_mass_dominates_atom_weight() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let n = rng.gen_range(1..30);
            let atoms: Vec<(f64, f64)> = (0..n)
                .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(0.0..1.0) + 1e-9))
                .collect();
            let mu = AtomicMeasure::from_atoms(atoms).unwrap();
            for (p, w) in mu.atoms() {
                for &eps in &[1e-12, 1e-3, 0.5] {
                    assert!(mu.ball_mass(p, eps).unwrap() >= w);
                }
            }
        }
    }

    #[test]
    fn dyadic_weight_scaling_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let atoms: Vec<(f64, f64)> = (0..50)
            .map(|_| {
                let w = (rng.gen_range(1u32..4096) as f64) / 4096.0;
                (rng.gen_range(-1.0..1.0), w)
            })
            .collect();
        let mu = AtomicMeasure::from_atoms(atoms).unwrap();
        let scaled = mu.scale_weights(4.0).unwrap();
        for _ in 0..100 {
            let x = rng.gen_range(-1.0..1.0);
            let eps = rng.gen_range(1e-3..1.0);
            assert_eq!(
                scaled.ball_mass(x, eps).unwrap(),
                4.0 * mu.ball_mass(x, eps).unwrap()
            );
        }
    }

    #[test]
    fn csv_round_figures() {
        let mu = m(&[(-0.25, 1.0 / 3.0)]);
        let mut buf = Vec::new();
        mu.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("position,weight\n"));
        assert!(text.contains("-2.5000000000000000e-1"));
        assert!(text.contains("3.3333333333333331e-1"));
    }

    #[test]
    fn works_in_f32() {
        let mu = AtomicMeasure::<f32>::from_atoms([(0.0f32, 0.5f32), (1.0, 0.5)]).unwrap();
        assert_eq!(mu.ball_mass(0.5, 0.6).unwrap(), 1.0f32);
        assert_eq!(mu.normalize().total_mass(), 1.0f32);
    }
}
