//! Distribution functions given in closed form between known critical levels.

use std::fmt;
use std::sync::Arc;

use crate::error::{domain, Result};
use crate::measure::LevelMeasure;
use crate::quad;
use crate::scalar::{compensated_sum, Real};

type MeasureFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// `mu(t)` given by a closure that is smooth on each interval between
/// consecutive knots `0 = k_0 < k_1 < ... < k_m = max_level`.
#[derive(Clone)]
pub struct SmoothDistribution<T> {
    knots: Vec<T>,
    total_measure: T,
    mu: MeasureFn<T>,
}

impl<T: Real> SmoothDistribution<T> {
    /// `knots` must start at zero and increase strictly; the last knot is the
    /// supremum of the function.
    pub fn new(knots: Vec<T>, total_measure: T, mu: impl Fn(T) -> T + Send + Sync + 'static) -> Result<Self> {
        if knots.len() < 2 || knots[0] != T::zero() {
            return domain("knots must start at zero and contain the maximum level");
        }
        if knots.windows(2).any(|w| !(w[0] < w[1])) {
            return domain("knots must be strictly increasing");
        }
        if !(total_measure > T::zero()) {
            return domain("total measure must be positive");
        }
        Ok(Self { knots, total_measure, mu: Arc::new(mu) })
    }

    /// Sorts, deduplicates and clips candidate critical levels to `[0, max_level]`.
    pub fn from_critical_levels(
        levels: impl IntoIterator<Item = T>,
        max_level: T,
        total_measure: T,
        mu: impl Fn(T) -> T + Send + Sync + 'static,
    ) -> Result<Self> {
        let mut knots: Vec<T> = levels
            .into_iter()
            .filter(|t| *t > T::zero() && *t < max_level)
            .collect();
        knots.push(T::zero());
        knots.push(max_level);
        knots.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        knots.dedup_by(|a, b| (*a - *b).abs() <= T::epsilon() * max_level.abs());
        Self::new(knots, total_measure, mu)
    }

    pub fn knots(&self) -> &[T] {
        &self.knots
    }
}

impl<T: Real> fmt::Debug for SmoothDistribution<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothDistribution")
            .field("knots", &self.knots)
            .field("total_measure", &self.total_measure)
            .finish_non_exhaustive()
    }
}

impl<T: Real> LevelMeasure<T> for SmoothDistribution<T> {
    fn measure_above(&self, t: T) -> T {
        if t < T::zero() {
            return self.total_measure;
        }
        if t >= self.max_level() {
            return T::zero();
        }
        (self.mu)(t)
    }

    fn total_measure(&self) -> T {
        self.total_measure
    }

    fn max_level(&self) -> T {
        *self.knots.last().expect("at least two knots")
    }

    fn level_moment(&self, a: T, b: T) -> T {
        let integrand = |t: T| {
            let m = (self.mu)(t);
            if m <= T::zero() {
                T::zero()
            } else {
                t.powf(a - T::one()) * m.powf(b)
            }
        };
        compensated_sum(self.knots.windows(2).map(|w| quad::tanh_sinh(integrand, w[0], w[1])))
    }

    fn weighted_sup(&self, p: T) -> T {
        let objective = |t: T| t.powf(p) * (self.mu)(t);
        self.knots
            .windows(2)
            .map(|w| quad::maximize(objective, w[0], w[1]))
            .fold(T::zero(), T::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_distribution() {
        // mu(t) = 1 - t on [0, 1]: the function s -> 1 - s on [0, 1]
        let d = SmoothDistribution::new(vec![0.0, 1.0], 1.0, |t: f64| 1.0 - t).unwrap();
        assert!((d.level_moment(1.0, 1.0) - 0.5).abs() < 1e-14);
        // ||g||_2^2 = 2 int t (1 - t) = 1/3
        assert!((2.0 * d.level_moment(2.0, 1.0) - 1.0 / 3.0).abs() < 1e-14);
        assert!((d.weighted_sup(1.0) - 0.25).abs() < 1e-14);
        assert_eq!(d.measure_above(-1.0), 1.0);
        assert_eq!(d.measure_above(1.0), 0.0);
        assert!((d.rearranged_value(0.25) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_knots() {
        assert!(SmoothDistribution::new(vec![0.5, 1.0], 1.0, |t: f64| t).is_err());
        assert!(SmoothDistribution::new(vec![0.0, 1.0, 1.0], 1.0, |t: f64| t).is_err());
        let d = SmoothDistribution::from_critical_levels([2.0, -1.0, 0.5, 0.5], 1.0, 1.0, |t: f64| 1.0 - t).unwrap();
        assert_eq!(d.knots(), &[0.0, 0.5, 1.0]);
    }
}
