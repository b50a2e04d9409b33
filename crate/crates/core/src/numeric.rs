//! Internal numeric primitives: compensated summation, double-double event
//! coordinates for the sweep line, and least-squares fits.

use crate::scalar::Scalar;

/// Neumaier-compensated accumulator.
///
/// `value()` is accurate to ~1 ulp independent of the number of terms; the
/// running error would otherwise reach N ulp and break mass-normalization
/// tolerances on 1e6-atom measures.
#[derive(Debug, Clone, Copy)]
pub struct Neumaier<F> {
    sum: F,
    comp: F,
}

impl<F: Scalar> Neumaier<F> {
    #[inline]
    pub fn new() -> Self {
        Neumaier {
            sum: F::zero(),
            comp: F::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, x: F) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> F {
        self.sum + self.comp
    }

    /// Hard reset; used by the sweep line when the active set empties so the
    /// zero-mass plateau is exact.
    #[inline]
    pub fn reset(&mut self) {
        self.sum = F::zero();
        self.comp = F::zero();
    }
}

/// Compensated sum of a slice in ascending index order.
pub fn comp_sum<F: Scalar>(xs: &[F]) -> F {
    let mut acc = Neumaier::new();
    for &x in xs {
        acc.add(x);
    }
    acc.value()
}

/// Compensated prefix sums stored as (sum, compensation) pairs so that window
/// masses `prefix[hi] - prefix[lo]` carry ~1 ulp error instead of the
/// cancellation error of plain prefix differences.
#[derive(Debug, Clone)]
pub struct PrefixSums<F> {
    s: Vec<F>,
    c: Vec<F>,
}

impl<F: Scalar> PrefixSums<F> {
    pub fn new(xs: &[F]) -> Self {
        let mut s = Vec::with_capacity(xs.len() + 1);
        let mut c = Vec::with_capacity(xs.len() + 1);
        let mut acc = Neumaier::new();
        s.push(F::zero());
        c.push(F::zero());
        for &x in xs {
            acc.add(x);
            s.push(acc.sum);
            c.push(acc.comp);
        }
        PrefixSums { s, c }
    }

    /// Sum of `xs[lo..hi]`.
    #[inline]
    pub fn window(&self, lo: usize, hi: usize) -> F {
        (self.s[hi] - self.s[lo]) + (self.c[hi] - self.c[lo])
    }
}

/// Unevaluated two-float sum, used for sweep-line event coordinates.
///
/// `position ± eps` rounded to a single float loses the low bits of `eps`
/// whenever `|position| >> eps`; segment lengths derived from such events
/// would carry O(ulp(position)/eps) relative error, which destroys the
/// isolated-ball closed form at small radii. The pair keeps both roundings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoFloat<F> {
    pub hi: F,
    pub lo: F,
}

impl<F: Scalar> TwoFloat<F> {
    /// Knuth two-sum: exact representation of `a + b` as `hi + lo`.
    #[inline]
    pub fn two_sum(a: F, b: F) -> Self {
        let hi = a + b;
        let v = hi - a;
        let lo = (a - (hi - v)) + (b - v);
        TwoFloat { hi, lo }
    }

    /// `self - other`, rounded to a single float.
    #[inline]
    pub fn sub(self, other: Self) -> F {
        let d = Self::two_sum(self.hi, -other.hi);
        d.hi + (d.lo + (self.lo - other.lo))
    }
}

impl<F: Scalar> PartialOrd for TwoFloat<F> {
    #[inline]
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        // |lo| <= ulp(hi)/2, so lexicographic order is numeric order.
        match self.hi.partial_cmp(&other.hi) {
            Some(std::cmp::Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

/// Least-squares line `y = slope*x + intercept`; `None` when fewer than two
/// points or degenerate x-variance.
pub fn linear_fit<F: Scalar>(xs: &[F], ys: &[F]) -> Option<(F, F)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = F::of_usize(xs.len());
    let mut mx = Neumaier::new();
    let mut my = Neumaier::new();
    for (&x, &y) in xs.iter().zip(ys) {
        mx.add(x);
        my.add(y);
    }
    let xb = mx.value() / n;
    let yb = my.value() / n;
    let mut sxy = Neumaier::new();
    let mut sxx = Neumaier::new();
    for (&x, &y) in xs.iter().zip(ys) {
        sxy.add((x - xb) * (y - yb));
        sxx.add((x - xb) * (x - xb));
    }
    let sxx = sxx.value();
    if !(sxx > F::zero()) || !sxx.is_finite() {
        return None;
    }
    let slope = sxy.value() / sxx;
    Some((slope, yb - slope * xb))
}
