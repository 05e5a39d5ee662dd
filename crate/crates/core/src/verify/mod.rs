//! Comparison harness: theorem checks, counterexample reproduction, sweeps,
//! curve export and the self-test suite.

mod counterexamples;
mod export;
mod selftest;
mod theorems;

pub use counterexamples::{
    case_exponent, crossover_parameter, fd_distribution_mismatch, gap_sweep, norm_pair, run_counterexample,
    symmetrized_solution,
    CounterexampleOptions, CounterexampleReport, GapPoint, SweepParam,
};
pub use export::{write_distribution_csv, write_profile_csv, write_rearrangement_csv, write_sweep_csv};
pub use selftest::{
    equimeasurability_defect, hardy_littlewood_excess, identity_sweep, random_sampled, random_variant, random_variants,
    selftest, unit_load_balls, with_thread_limit, SelftestItem, SelftestOptions, SelftestReport, THREADS_ENV,
};
pub use theorems::{
    check_level_set_inequality, pointwise_excess, run_theorem_1_1, run_theorem_1_2, ComparisonReport, NormEntry,
    PointwiseCheck,
};

use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::ExampleCase;
use crate::measure::{distribution, LevelMeasure};
use crate::radial::{solve, NormalizationCondition, RadialSolution};

/// How the distribution function of `u` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pipeline {
    /// Closed-form distribution function, integrated by quadrature.
    Exact,
    /// Cell sample of `u` at the given resolution.
    Sampled { resolution: usize },
}

impl Pipeline {
    /// Relative tolerance on norm comparisons.
    pub fn tolerance(self) -> f64 {
        match self {
            Self::Exact => 1e-9,
            Self::Sampled { .. } => 1e-3,
        }
    }
}

impl fmt::Display for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Exact => f.write_str("exact"),
            Self::Sampled { resolution } => write!(f, "sampled@{resolution}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Self::Pass
        } else {
            Self::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Self::Pass
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pass => "pass",
            Self::Fail => "FAIL",
        })
    }
}

/// How a [`Check`] compares its values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    /// `|computed - expected| <= tolerance * max(|expected|, tiny)`.
    Close,
    /// `computed <= expected + tolerance * max(|expected|, 1)`.
    AtMost,
    /// Recorded for the report only.
    Note,
}

/// A named scalar compared against a reference value.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub expected: f64,
    pub computed: f64,
    pub tolerance: f64,
    pub kind: CheckKind,
}

impl Check {
    pub fn close(name: impl Into<String>, expected: f64, computed: f64, tolerance: f64) -> Self {
        Self { name: name.into(), expected, computed, tolerance, kind: CheckKind::Close }
    }

    pub fn at_most(name: impl Into<String>, computed: f64, bound: f64, tolerance: f64) -> Self {
        Self { name: name.into(), expected: bound, computed, tolerance, kind: CheckKind::AtMost }
    }

    pub fn note(name: impl Into<String>, expected: f64, computed: f64) -> Self {
        Self { name: name.into(), expected, computed, tolerance: 0.0, kind: CheckKind::Note }
    }

    pub fn relative_error(&self) -> f64 {
        let scale = self.expected.abs().max(f64::MIN_POSITIVE);
        (self.computed - self.expected).abs() / scale
    }

    pub fn passed(&self) -> bool {
        match self.kind {
            CheckKind::Close => {
                (self.computed - self.expected).abs() <= self.tolerance * self.expected.abs().max(f64::MIN_POSITIVE)
            }
            CheckKind::AtMost => self.computed <= self.expected + self.tolerance * self.expected.abs().max(1.0),
            CheckKind::Note => true,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            CheckKind::Close => write!(
                f,
                "{:<34} expected {:>16.10} computed {:>16.10} rel.err {:.2e} (tol {:.0e}) {}",
                self.name,
                self.expected,
                self.computed,
                self.relative_error(),
                self.tolerance,
                Verdict::from_bool(self.passed())
            ),
            CheckKind::AtMost => write!(
                f,
                "{:<34} {:>16.10} <= {:<16.10} {}",
                self.name,
                self.computed,
                self.expected,
                Verdict::from_bool(self.passed())
            ),
            CheckKind::Note if self.expected == 0.0 => {
                write!(f, "{:<34} reference {:>16.10} computed {:>16.3e}", self.name, self.expected, self.computed)
            }
            CheckKind::Note => write!(
                f,
                "{:<34} reference {:>16.10} computed {:>16.10} (ratio {:.6})",
                self.name,
                self.expected,
                self.computed,
                self.computed / self.expected
            ),
        }
    }
}

/// Least-squares line `y = intercept + slope x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub intercept: f64,
    pub slope: f64,
}

impl LinearFit {
    /// Fit through at least two distinct abscissae.
    pub fn fit(xs: &[f64], ys: &[f64]) -> Option<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return None;
        }
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        if sxx == 0.0 {
            return None;
        }
        let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let slope = sxy / sxx;
        Some(Self { intercept: my - slope * mx, slope })
    }
}

/// `endpoint · 10^(-i/5)` for `i = 5, ..., 1`, then the endpoint itself.
pub fn default_p_grid(endpoint: f64) -> Vec<f64> {
    (1..=5).rev().map(|i| endpoint * 10f64.powf(-(i as f64) / 5.0)).chain([endpoint]).collect()
}

/// Symmetrized solution of a case under a normalization condition.
pub fn solve_symmetrized(case: &ExampleCase, cond: NormalizationCondition) -> Result<RadialSolution<f64>> {
    let prob = case.symmetrized_problem()?;
    let data = case.condition_rhs(cond, prob.c_star())?;
    solve(&prob, cond, data)
}

/// Symmetrized solution under `cond` on ball unions, with zero boundary
/// value on the rectangles.
pub fn solve_for_case(case: &ExampleCase, cond: NormalizationCondition) -> Result<RadialSolution<f64>> {
    if case.is_ball_union() {
        solve_symmetrized(case, cond)
    } else {
        Ok(RadialSolution::with_boundary_value(case.symmetrized_problem()?, 0.0))
    }
}

/// Distribution function of `u`: closed form where available, a cell sample
/// at `resolution` otherwise.
pub fn u_curve(case: &ExampleCase, resolution: usize) -> Result<Box<dyn LevelMeasure<f64> + Send + Sync>> {
    match case.u_distribution() {
        Ok(d) => Ok(Box::new(d)),
        Err(Error::Unsupported(_)) => Ok(Box::new(distribution(&case.sample_domain(resolution)?.u))),
        Err(e) => Err(e),
    }
}

/// Levels `0 < t < top` on a uniform grid of `points` interior nodes.
pub fn level_grid(top: f64, points: usize) -> Vec<f64> {
    (1..=points).map(|k| top * k as f64 / (points + 1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_grid_ends_at_endpoint() {
        let g = default_p_grid(1.0);
        assert_eq!(g.len(), 6);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert!((g[0] - 0.1).abs() < 1e-15);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn linear_fit_recovers_line() {
        let fit = LinearFit::fit(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]).unwrap();
        assert!((fit.intercept - 1.0).abs() < 1e-15 && (fit.slope - 2.0).abs() < 1e-15);
        assert!(LinearFit::fit(&[1.0, 1.0], &[0.0, 1.0]).is_none());
    }

    #[test]
    fn check_semantics() {
        assert!(Check::close("x", 1.0, 1.0 + 1e-13, 1e-12).passed());
        assert!(!Check::close("x", 1.0, 1.1, 1e-2).passed());
        assert!(Check::at_most("y", 0.5, 1.0, 0.0).passed());
        assert!(!Check::at_most("y", 1.5, 1.0, 1e-9).passed());
        assert!(Check::note("z", 1.0, 2.0).passed());
    }
}
