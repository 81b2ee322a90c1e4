//! Maximum-entropy probability vectors with a prescribed mean.
//!
//! For values `x_1..x_k` the exponential family `p_i(λ) ∝ exp(λ x_i)` has a
//! mean `m(λ)` that is strictly increasing (its derivative is the tilted
//! variance `v(λ)`), running from `min x` to `max x`. Solving `m(λ) = α`
//! gives the unique entropy maximiser among vectors with mean `α`.
//!
//! All evaluations subtract `max λ x_i` before exponentiating, and the mean is
//! carried as distances to both ends of the value range so that it stays
//! resolvable when the tilt has pushed it within rounding of an endpoint.

use serde::{Serialize, Serializer};
use thiserror::Error;

/// Default solver tolerance, relative to the value range.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Iteration budget for the safeguarded Newton phase.
pub const MAX_ITERATIONS: usize = 200;
/// Sum tolerance of a [`ProbabilityVector`].
pub const SUM_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoltzmannError {
    #[error("empty value list")]
    Empty,
    #[error("non-finite input")]
    NonFinite,
    #[error("target mean {alpha} outside [{min}, {max}]")]
    Infeasible { alpha: f64, min: f64, max: f64 },
    #[error("no convergence after {iterations} iterations; bracket [{lo}, {hi}]")]
    NoConvergence { iterations: usize, lo: f64, hi: f64 },
    #[error("invalid probability vector: {0}")]
    InvalidVector(String),
}

/// Nonnegative weights over an ordered value list, summing to one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbabilityVector {
    values: Vec<f64>,
    probs: Vec<f64>,
}

impl ProbabilityVector {
    pub fn new(values: Vec<f64>, probs: Vec<f64>) -> Result<Self, BoltzmannError> {
        Self::with_tolerance(values, probs, SUM_TOL)
    }

    /// Like [`ProbabilityVector::new`] with a caller-chosen sum tolerance. The
    /// probabilities are renormalised after the check.
    pub fn with_tolerance(
        values: Vec<f64>,
        mut probs: Vec<f64>,
        sum_tol: f64,
    ) -> Result<Self, BoltzmannError> {
        if values.is_empty() {
            return Err(BoltzmannError::Empty);
        }
        if values.len() != probs.len() {
            return Err(BoltzmannError::InvalidVector(format!(
                "{} values but {} probabilities",
                values.len(),
                probs.len()
            )));
        }
        if values.iter().chain(&probs).any(|x| !x.is_finite()) {
            return Err(BoltzmannError::NonFinite);
        }
        if let Some(p) = probs.iter().find(|&&p| p < 0.0) {
            return Err(BoltzmannError::InvalidVector(format!(
                "negative weight {p}"
            )));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > sum_tol {
            return Err(BoltzmannError::InvalidVector(format!(
                "weights sum to {sum}"
            )));
        }
        if sum != 1.0 {
            probs.iter_mut().for_each(|p| *p /= sum);
        }
        Ok(ProbabilityVector { values, probs })
    }

    /// Uniform weights on `values`.
    pub fn uniform(values: Vec<f64>) -> Result<Self, BoltzmannError> {
        let k = values.len();
        Self::new(values, vec![1.0 / k as f64; k])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.probs)
            .map(|(x, p)| x * p)
            .sum()
    }

    pub fn entropy(&self) -> f64 {
        entropy(&self.probs)
    }
}

/// The tilt parameter, including the limits at the ends of the value range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lambda {
    NegInfinity,
    Finite(f64),
    PosInfinity,
}

impl Lambda {
    pub fn finite(self) -> Option<f64> {
        match self {
            Lambda::Finite(l) => Some(l),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Lambda::Finite(_))
    }
}

impl std::fmt::Display for Lambda {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Lambda::NegInfinity => f.write_str("-inf"),
            Lambda::Finite(l) => write!(f, "{l}"),
            Lambda::PosInfinity => f.write_str("+inf"),
        }
    }
}

/// Finite values serialize as JSON numbers, the limits as `"-inf"`/`"+inf"`.
impl Serialize for Lambda {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Lambda::Finite(l) => s.serialize_f64(*l),
            Lambda::NegInfinity => s.serialize_str("-inf"),
            Lambda::PosInfinity => s.serialize_str("+inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoltzmannSolution {
    pub distribution: ProbabilityVector,
    pub lambda: Lambda,
    pub mean: f64,
    pub variance: f64,
    pub entropy: f64,
    pub iterations: usize,
    pub residual: f64,
    /// All values equal; the tilt is irrelevant and recorded as zero.
    pub degenerate: bool,
}

/// Moments of the tilted distribution at a finite λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiltedMoments {
    pub mean: f64,
    /// `mean - min(values)`, accurate even when tiny.
    pub above_min: f64,
    /// `max(values) - mean`, accurate even when tiny.
    pub below_max: f64,
    pub variance: f64,
}

fn min_max(values: &[f64]) -> (f64, f64) {
    values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        })
}

/// Unnormalised stabilised weights `exp(λ x_i - max_j λ x_j)`; the largest is 1.
fn shifted_weights(values: &[f64], lambda: f64) -> Vec<f64> {
    let shift = values
        .iter()
        .map(|&x| lambda * x)
        .fold(f64::NEG_INFINITY, f64::max);
    values.iter().map(|&x| (lambda * x - shift).exp()).collect()
}

/// Boltzmann probabilities `p_i(λ)` for a finite tilt.
pub fn tilt_probabilities(values: &[f64], lambda: f64) -> Vec<f64> {
    let w = shifted_weights(values, lambda);
    let z: f64 = w.iter().sum();
    w.into_iter().map(|wi| wi / z).collect()
}

/// Mean, variance and endpoint distances of the λ-tilted distribution.
pub fn tilt_moments(values: &[f64], lambda: f64) -> TiltedMoments {
    let (lo, hi) = min_max(values);
    let w = shifted_weights(values, lambda);
    let z: f64 = w.iter().sum();
    let above_min = w
        .iter()
        .zip(values)
        .map(|(wi, x)| wi * (x - lo))
        .sum::<f64>()
        / z;
    let below_max = w
        .iter()
        .zip(values)
        .map(|(wi, x)| wi * (hi - x))
        .sum::<f64>()
        / z;
    // Anchor at whichever end is nearer: that distance carries full relative precision.
    let mean = if above_min <= below_max {
        lo + above_min
    } else {
        hi - below_max
    }
    .clamp(lo, hi);
    let variance = w
        .iter()
        .zip(values)
        .map(|(wi, x)| wi * (x - mean) * (x - mean))
        .sum::<f64>()
        / z;
    TiltedMoments {
        mean,
        above_min,
        below_max,
        variance,
    }
}

/// Tilted mean `m(λ)`.
pub fn tilt_mean(values: &[f64], lambda: f64) -> f64 {
    tilt_moments(values, lambda).mean
}

/// Tilted variance `v(λ) = dm/dλ`.
pub fn tilt_variance(values: &[f64], lambda: f64) -> f64 {
    tilt_moments(values, lambda).variance
}

/// Natural-log entropy with `0 log 0 = 0`, clamped into `[0, log k]`.
pub fn entropy(probs: &[f64]) -> f64 {
    let h: f64 = probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum();
    h.clamp(0.0, (probs.len().max(1) as f64).ln())
}

fn uniform_on(values: &[f64], target: f64) -> Vec<f64> {
    let n = values.iter().filter(|&&x| x == target).count() as f64;
    values
        .iter()
        .map(|&x| if x == target { 1.0 / n } else { 0.0 })
        .collect()
}

fn finish(
    values: &[f64],
    probs: Vec<f64>,
    lambda: Lambda,
    alpha: f64,
    iterations: usize,
    degenerate: bool,
) -> Result<BoltzmannSolution, BoltzmannError> {
    let (variance, mean) = match lambda {
        Lambda::Finite(l) => {
            let m = tilt_moments(values, l);
            (m.variance, m.mean)
        }
        _ => {
            let m = probs.iter().zip(values).map(|(p, x)| p * x).sum::<f64>();
            (0.0, m)
        }
    };
    let entropy = entropy(&probs);
    let distribution = ProbabilityVector::new(values.to_vec(), probs)?;
    Ok(BoltzmannSolution {
        distribution,
        lambda,
        mean,
        variance,
        entropy,
        iterations,
        residual: (mean - alpha).abs(),
        degenerate,
    })
}

/// Finds the maximum-entropy probability vector on `values` with mean `alpha`.
///
/// `tol` is relative to the value range. Targets within tolerance of an end
/// of the range return the limiting distribution (uniform over the values
/// attaining that end) with an infinite λ marker.
pub fn solve_boltzmann(
    values: &[f64],
    alpha: f64,
    tol: f64,
) -> Result<BoltzmannSolution, BoltzmannError> {
    if values.is_empty() {
        return Err(BoltzmannError::Empty);
    }
    if !alpha.is_finite() || !tol.is_finite() || values.iter().any(|x| !x.is_finite()) {
        return Err(BoltzmannError::NonFinite);
    }
    let tol = if tol > 0.0 { tol } else { DEFAULT_TOL };
    let (lo, hi) = min_max(values);
    let range = hi - lo;
    let magnitude = lo.abs().max(hi.abs()).max(alpha.abs());
    // Below a few ulps of the operands the mean cannot be resolved at all.
    let slack = (tol * range).max(4.0 * f64::EPSILON * magnitude);
    let scale_slack = if range > 0.0 {
        slack
    } else {
        (tol * magnitude.max(1.0)).max(slack)
    };

    if alpha < lo - scale_slack || alpha > hi + scale_slack {
        return Err(BoltzmannError::Infeasible {
            alpha,
            min: lo,
            max: hi,
        });
    }
    if range == 0.0 {
        let k = values.len();
        return finish(
            values,
            vec![1.0 / k as f64; k],
            Lambda::Finite(0.0),
            alpha,
            0,
            true,
        );
    }
    if alpha <= lo + slack {
        return finish(
            values,
            uniform_on(values, lo),
            Lambda::NegInfinity,
            alpha,
            0,
            false,
        );
    }
    if alpha >= hi - slack {
        return finish(
            values,
            uniform_on(values, hi),
            Lambda::PosInfinity,
            alpha,
            0,
            false,
        );
    }

    let (lambda, iterations) = find_tilt(values, alpha, range, slack)?;
    finish(
        values,
        tilt_probabilities(values, lambda),
        Lambda::Finite(lambda),
        alpha,
        iterations,
        false,
    )
}

/// Safeguarded Newton on `m(λ) - α` with `v(λ)` as the derivative.
fn find_tilt(
    values: &[f64],
    alpha: f64,
    range: f64,
    slack: f64,
) -> Result<(f64, usize), BoltzmannError> {
    // Bracket. m(0) is the plain average; expand geometrically from 1/range.
    let mut lo_l;
    let mut hi_l;
    let m0 = tilt_mean(values, 0.0);
    if m0 == alpha {
        return Ok((0.0, 0));
    }
    let mut step = 1.0 / range;
    if m0 < alpha {
        lo_l = 0.0;
        hi_l = step;
        while tilt_mean(values, hi_l) < alpha {
            lo_l = hi_l;
            step *= 2.0;
            hi_l = step;
            if !hi_l.is_finite() {
                return Err(BoltzmannError::NoConvergence {
                    iterations: 0,
                    lo: lo_l,
                    hi: hi_l,
                });
            }
        }
    } else {
        hi_l = 0.0;
        lo_l = -step;
        while tilt_mean(values, lo_l) > alpha {
            hi_l = lo_l;
            step *= 2.0;
            lo_l = -step;
            if !lo_l.is_finite() {
                return Err(BoltzmannError::NoConvergence {
                    iterations: 0,
                    lo: lo_l,
                    hi: hi_l,
                });
            }
        }
    }

    let mut lambda = if lo_l < 0.0 && hi_l > 0.0 {
        0.0
    } else {
        0.5 * (lo_l + hi_l)
    };
    for it in 1..=MAX_ITERATIONS {
        let m = tilt_moments(values, lambda);
        let g = m.mean - alpha;
        if g.abs() <= slack {
            return Ok((polish(values, alpha, lambda, g, m.variance), it));
        }
        if g < 0.0 {
            lo_l = lambda;
        } else {
            hi_l = lambda;
        }
        let newton = lambda - g / m.variance;
        lambda = if m.variance > 0.0 && newton.is_finite() && newton > lo_l && newton < hi_l {
            newton
        } else {
            0.5 * (lo_l + hi_l)
        };
        if hi_l - lo_l <= f64::EPSILON * lo_l.abs().max(hi_l.abs()) {
            let m = tilt_mean(values, lambda);
            if (m - alpha).abs() <= slack {
                return Ok((lambda, it));
            }
            break;
        }
    }
    Err(BoltzmannError::NoConvergence {
        iterations: MAX_ITERATIONS,
        lo: lo_l,
        hi: hi_l,
    })
}

/// One extra Newton step once inside tolerance, kept only if it helps.
fn polish(values: &[f64], alpha: f64, lambda: f64, g: f64, variance: f64) -> f64 {
    if g == 0.0 || variance <= 0.0 {
        return lambda;
    }
    let next = lambda - g / variance;
    if next.is_finite() && (tilt_mean(values, next) - alpha).abs() < g.abs() {
        next
    } else {
        lambda
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tilt_mean_basics() {
        assert_eq!(tilt_mean(&[0.0, 1.0], 0.0), 0.5);
        assert_eq!(tilt_mean(&[-1.0, 0.0, 1.0], 0.0), 0.0);
    }

    #[test]
    fn tilt_mean_matches_extended_evaluation() {
        // m(-0.2) on {0,1,3}: (e^-0.2 + 3 e^-0.6) / (1 + e^-0.2 + e^-0.6),
        // evaluated with mpmath at 50 digits.
        let expected = 1.0412340123811656;
        assert!((tilt_mean(&[0.0, 1.0, 3.0], -0.2) - expected).abs() < 1e-15);
    }

    #[test]
    fn tilt_variance_basics() {
        assert_eq!(tilt_variance(&[2.0, 2.0, 2.0], 3.7), 0.0);
        assert_eq!(tilt_variance(&[0.0, 1.0], 0.0), 0.25);
        let v = [0.0, 1.0, 3.0];
        let h = 1e-5;
        let fd = (tilt_mean(&v, -0.2 + h) - tilt_mean(&v, -0.2 - h)) / (2.0 * h);
        assert!((tilt_variance(&v, -0.2) - fd).abs() < 1e-6);
    }

    #[test]
    fn two_point_is_forced() {
        let s = solve_boltzmann(&[0.0, 1.0], 0.25, DEFAULT_TOL).unwrap();
        assert!((s.distribution.probs()[0] - 0.75).abs() < 1e-12);
        assert!((s.distribution.probs()[1] - 0.25).abs() < 1e-12);
        let l = s.lambda.finite().unwrap();
        assert!((l - (1.0f64 / 3.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn symmetric_target_has_zero_tilt() {
        let s = solve_boltzmann(&[-1.0, 0.0, 1.0], 0.0, DEFAULT_TOL).unwrap();
        assert_eq!(s.lambda, Lambda::Finite(0.0));
        for p in s.distribution.probs() {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn boundary_target_returns_limit() {
        let s = solve_boltzmann(&[0.0, 0.0, 1.0], 0.0, DEFAULT_TOL).unwrap();
        assert_eq!(s.lambda, Lambda::NegInfinity);
        assert_eq!(s.distribution.probs(), &[0.5, 0.5, 0.0]);
        let s = solve_boltzmann(&[0.0, 1.0, 1.0, 1.0], 1.0, DEFAULT_TOL).unwrap();
        assert_eq!(s.lambda, Lambda::PosInfinity);
        assert_eq!(s.distribution.probs()[0], 0.0);
        assert!((s.distribution.probs()[1] - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn asymmetric_solution() {
        // bisection oracle on m(λ) over [-1, 0]
        let s = solve_boltzmann(&[0.0, 1.0, 3.0], 1.0, DEFAULT_TOL).unwrap();
        let l = s.lambda.finite().unwrap();
        let (mut a, mut b) = (-1.0f64, 0.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            let p: Vec<f64> = [0.0f64, 1.0, 3.0].iter().map(|x| (mid * x).exp()).collect();
            let z: f64 = p.iter().sum();
            let m = (p[1] + 3.0 * p[2]) / z;
            if m < 1.0 {
                a = mid
            } else {
                b = mid
            }
        }
        assert!((l - a).abs() < 1e-10, "{l} vs {a}");
        // mpmath findroot at 40 digits
        assert!((l + 0.23104906018664844).abs() < 1e-12);
        assert!((s.distribution.mean() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn degenerate_and_errors() {
        let s = solve_boltzmann(&[4.0, 4.0], 4.0, DEFAULT_TOL).unwrap();
        assert!(s.degenerate);
        assert_eq!(s.lambda, Lambda::Finite(0.0));
        assert_eq!(s.distribution.probs(), &[0.5, 0.5]);
        assert_eq!(
            solve_boltzmann(&[], 0.0, DEFAULT_TOL).unwrap_err(),
            BoltzmannError::Empty
        );
        assert!(matches!(
            solve_boltzmann(&[0.0, 1.0], 1.5, DEFAULT_TOL),
            Err(BoltzmannError::Infeasible { .. })
        ));
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&[1.0]), 0.0);
        assert!((entropy(&[0.5, 0.5]) - 2f64.ln()).abs() < 1e-16);
        // -(0.75 ln 0.75 + 0.25 ln 0.25), mpmath at 50 digits
        assert!((entropy(&[0.75, 0.25]) - 0.5623351446188083).abs() < 1e-15);
        assert_eq!(entropy(&[0.0, 1.0]), 0.0);
    }

    #[test]
    fn large_magnitudes_do_not_overflow() {
        let values: Vec<f64> = (0..10_000).map(|i| -1e6 + 200.0 * i as f64).collect();
        let s = solve_boltzmann(&values, 3.0e5, DEFAULT_TOL).unwrap();
        assert!(s.distribution.probs().iter().all(|p| p.is_finite()));
        assert!(s.residual <= DEFAULT_TOL * 2e6);
    }

    #[test]
    fn vector_validation() {
        assert!(ProbabilityVector::new(vec![0.0], vec![1.0]).is_ok());
        assert!(ProbabilityVector::new(vec![0.0, 1.0], vec![0.6, 0.6]).is_err());
        assert!(ProbabilityVector::new(vec![0.0, 1.0], vec![1.5, -0.5]).is_err());
        assert!(ProbabilityVector::new(vec![0.0], vec![0.5, 0.5]).is_err());
    }
}
