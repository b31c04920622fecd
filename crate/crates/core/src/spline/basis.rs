//! Clamped B-spline knot vectors and Cox–de Boor basis evaluation.

use super::{Result, SplineError};
use serde::{Deserialize, Serialize};

/// A clamped, non-decreasing knot vector of a fixed degree.
///
/// The number of basis functions is `knots.len() - degree - 1`; the
/// evaluable domain is `[knots[degree], knots[len - degree - 1]]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnotVector {
    degree: usize,
    knots: Vec<f64>,
}

/// Slack used when deciding whether a parameter sits inside the domain.
/// Purely protects against round-off at the clamped ends.
const DOMAIN_EPS: f64 = 1e-12;

impl KnotVector {
    /// Validates and wraps a knot vector.
    pub fn new(degree: usize, knots: Vec<f64>) -> Result<Self> {
        let min = 2 * (degree + 1);
        if knots.len() < min {
            return Err(SplineError::TooFewKnots { degree, min, got: knots.len() });
        }
        for i in 1..knots.len() {
            if knots[i] < knots[i - 1] {
                return Err(SplineError::KnotsNotSorted(i));
            }
        }
        let n = knots.len();
        for i in 0..=degree {
            if knots[i] != knots[0] || knots[n - 1 - i] != knots[n - 1] {
                return Err(SplineError::NotClamped(degree));
            }
        }
        if knots[0] == knots[n - 1] {
            return Err(SplineError::Invalid("empty knot span".into()));
        }
        Ok(Self { degree, knots })
    }

    /// Clamped uniform knots on `[a, b]` for `n` basis functions.
    pub fn uniform(degree: usize, n: usize, a: f64, b: f64) -> Result<Self> {
        if n < degree + 1 {
            return Err(SplineError::Invalid(format!(
                "need at least {} control points for degree {}",
                degree + 1,
                degree
            )));
        }
        let spans = n - degree;
        let mut knots = Vec::with_capacity(n + degree + 1);
        knots.extend(std::iter::repeat(a).take(degree + 1));
        for i in 1..spans {
            knots.push(a + (b - a) * i as f64 / spans as f64);
        }
        knots.extend(std::iter::repeat(b).take(degree + 1));
        Self::new(degree, knots)
    }

    /// Bézier knots (single span) on `[0, 1]`.
    pub fn bezier(degree: usize) -> Self {
        Self::uniform(degree, degree + 1, 0.0, 1.0).expect("valid by construction")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Number of basis functions supported by this knot vector.
    pub fn num_basis(&self) -> usize {
        self.knots.len() - self.degree - 1
    }

    /// Start of the evaluable domain.
    pub fn domain_start(&self) -> f64 {
        self.knots[self.degree]
    }

    /// End of the evaluable domain.
    pub fn domain_end(&self) -> f64 {
        self.knots[self.knots.len() - self.degree - 1]
    }

    pub fn contains(&self, u: f64) -> bool {
        let span = self.domain_end() - self.domain_start();
        let eps = DOMAIN_EPS * span.max(1.0);
        u >= self.domain_start() - eps && u <= self.domain_end() + eps
    }

    fn check_domain(&self, u: f64) -> Result<f64> {
        if !u.is_finite() || !self.contains(u) {
            return Err(SplineError::OutOfDomain {
                value: u,
                lo: self.domain_start(),
                hi: self.domain_end(),
            });
        }
        Ok(u.clamp(self.domain_start(), self.domain_end()))
    }

    /// Index of the knot span containing `u` (last span at the right end).
    pub fn find_span(&self, u: f64) -> Result<usize> {
        let u = self.check_domain(u)?;
        let n = self.num_basis();
        let p = self.degree;
        if u >= self.knots[n] {
            return Ok(n - 1);
        }
        // binary search over [p, n)
        let (mut lo, mut hi) = (p, n);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if u < self.knots[mid] {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(lo)
    }

    /// The `degree + 1` nonzero basis functions at `u`.
    ///
    /// Returns `(first_index, values)`: basis function `first_index + k`
    /// has value `values[k]`. Values are non-negative and sum to one.
    pub fn eval_basis(&self, u: f64) -> Result<(usize, Vec<f64>)> {
        let span = self.find_span(u)?;
        let u = self.check_domain(u)?;
        let p = self.degree;
        let mut values = vec![0.0; p + 1];
        let mut left = vec![0.0; p + 1];
        let mut right = vec![0.0; p + 1];
        values[0] = 1.0;
        for j in 1..=p {
            left[j] = u - self.knots[span + 1 - j];
            right[j] = self.knots[span + j] - u;
            let mut saved = 0.0;
            for r in 0..j {
                let denom = right[r + 1] + left[j - r];
                let temp = if denom == 0.0 { 0.0 } else { values[r] / denom };
                values[r] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            values[j] = saved;
        }
        Ok((span - p, values))
    }

    /// Nonzero basis functions and their derivatives up to order `k`.
    ///
    /// Returns `(first_index, ders)` with `ders[d][j]` the d-th
    /// derivative of basis `first_index + j`.
    pub fn eval_basis_derivs(&self, u: f64, k: usize) -> Result<(usize, Vec<Vec<f64>>)> {
        let span = self.find_span(u)?;
        let u = self.check_domain(u)?;
        let p = self.degree;
        let order = k.min(p);

        // ndu[j][r]: basis functions and knot differences (NURBS book A2.3).
        let mut ndu = vec![vec![0.0; p + 1]; p + 1];
        let mut left = vec![0.0; p + 1];
        let mut right = vec![0.0; p + 1];
        ndu[0][0] = 1.0;
        for j in 1..=p {
            left[j] = u - self.knots[span + 1 - j];
            right[j] = self.knots[span + j] - u;
            let mut saved = 0.0;
            for r in 0..j {
                ndu[j][r] = right[r + 1] + left[j - r];
                let temp = if ndu[j][r] == 0.0 { 0.0 } else { ndu[r][j - 1] / ndu[j][r] };
                ndu[r][j] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            ndu[j][j] = saved;
        }

        let mut ders = vec![vec![0.0; p + 1]; k + 1];
        for j in 0..=p {
            ders[0][j] = ndu[j][p];
        }
        let mut a = vec![vec![0.0; p + 1]; 2];
        for r in 0..=p {
            let (mut s1, mut s2) = (0usize, 1usize);
            a[0][0] = 1.0;
            for kk in 1..=order {
                let mut d = 0.0;
                let rk = r as isize - kk as isize;
                let pk = p - kk;
                if r >= kk {
                    a[s2][0] = a[s1][0] / ndu[pk + 1][rk as usize];
                    d = a[s2][0] * ndu[rk as usize][pk];
                }
                let j1 = if rk >= -1 { 1 } else { (-rk) as usize };
                let j2 = if r as isize - 1 <= pk as isize { kk - 1 } else { p - r };
                for j in j1..=j2 {
                    a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][(rk + j as isize) as usize];
                    d += a[s2][j] * ndu[(rk + j as isize) as usize][pk];
                }
                if r <= pk {
                    a[s2][kk] = -a[s1][kk - 1] / ndu[pk + 1][r];
                    d += a[s2][kk] * ndu[r][pk];
                }
                ders[kk][r] = d;
                std::mem::swap(&mut s1, &mut s2);
            }
        }
        let mut factor = p as f64;
        for kk in 1..=order {
            for j in 0..=p {
                ders[kk][j] *= factor;
            }
            factor *= (p - kk) as f64;
        }
        Ok((span - p, ders))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn linear_hat_midpoint() {
        let kv = KnotVector::new(1, vec![0.0, 0.0, 1.0, 1.0]).unwrap();
        let (first, vals) = kv.eval_basis(0.5).unwrap();
        assert_eq!(first, 0);
        assert_abs_diff_eq!(vals[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(vals[1], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn clamped_endpoint_interpolation() {
        let kv = KnotVector::new(2, vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0]).unwrap();
        let (first, vals) = kv.eval_basis(0.0).unwrap();
        assert_eq!(first, 0);
        assert_abs_diff_eq!(vals[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(vals[1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(vals[2], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn out_of_domain_is_an_error() {
        let kv = KnotVector::bezier(2);
        assert!(kv.eval_basis(1.5).is_err());
        assert!(kv.eval_basis(-0.1).is_err());
    }

    #[test]
    fn rejects_unsorted_and_unclamped() {
        assert!(KnotVector::new(1, vec![0.0, 1.0, 0.5, 1.0]).is_err());
        assert!(KnotVector::new(2, vec![0.0, 0.0, 0.5, 1.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let kv = KnotVector::uniform(3, 7, 0.0, 1.0).unwrap();
        let h = 1e-7;
        for &u in &[0.13, 0.42, 0.77] {
            let (f0, d) = kv.eval_basis_derivs(u, 1).unwrap();
            let (fa, va) = kv.eval_basis(u - h).unwrap();
            let (fb, vb) = kv.eval_basis(u + h).unwrap();
            assert_eq!(fa, fb);
            assert_eq!(f0, fa);
            for j in 0..=3 {
                let fd = (vb[j] - va[j]) / (2.0 * h);
                assert_abs_diff_eq!(d[1][j], fd, epsilon = 1e-5);
            }
        }
    }

    proptest! {
        #[test]
        fn partition_of_unity(
            degree in 1usize..4,
            n_extra in 0usize..6,
            t in 0.0f64..1.0,
        ) {
            let n = degree + 1 + n_extra;
            let kv = KnotVector::uniform(degree, n, 0.0, 1.0).unwrap();
            let (_, vals) = kv.eval_basis(t).unwrap();
            let sum: f64 = vals.iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-12);
            prop_assert!(vals.iter().all(|&v| v >= -1e-14));
        }
    }
}
