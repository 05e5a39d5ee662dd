//! Distribution functions and decreasing rearrangements of weighted cell data.
//!
//! A function is stored as a list of cells, each carrying a value and the
//! measure of the region where the function takes that value. For such step
//! data the distribution function `t -> |{|f| > t}|` and the decreasing
//! rearrangement `f*` are computed exactly: breakpoints are the distinct
//! absolute values, and plateau measures are sums of cell measures.

use std::cmp::Ordering;

use crate::error::{domain, Result};
use crate::scalar::{compensated_sum, Real};

/// Relative gap below which two absolute values share one plateau.
const MERGE_TOL: f64 = 1e-14;
/// Relative tolerance on `sum(measures) == total_measure`.
const TOTAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell<T> {
    pub value: T,
    pub measure: T,
}

impl<T> Cell<T> {
    pub fn new(value: T, measure: T) -> Self {
        Self { value, measure }
    }
}

/// A measurable function given as `(value, measure)` cells over a domain of
/// known total measure.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction<T> {
    cells: Vec<Cell<T>>,
    total_measure: T,
}

impl<T: Real> SampledFunction<T> {
    /// Builds a function whose domain measure is the sum of the cell measures.
    pub fn new(cells: Vec<Cell<T>>) -> Result<Self> {
        validate_cells(&cells)?;
        let total = compensated_sum(cells.iter().map(|c| c.measure));
        if total <= T::zero() {
            return domain("total measure must be positive");
        }
        Ok(Self { cells, total_measure: total })
    }

    /// Builds a function and checks that the cells tile a domain of measure `total`.
    pub fn with_total(cells: Vec<Cell<T>>, total: T) -> Result<Self> {
        validate_cells(&cells)?;
        if !(total > T::zero()) {
            return domain("total measure must be positive");
        }
        let sum = compensated_sum(cells.iter().map(|c| c.measure));
        if (sum - total).abs() > T::lit(TOTAL_TOL) * total {
            return domain(format!(
                "cell measures sum to {sum}, expected total measure {total}"
            ));
        }
        Ok(Self { cells, total_measure: total })
    }

    pub fn from_pairs<I: IntoIterator<Item = (T, T)>>(pairs: I) -> Result<Self> {
        Self::new(pairs.into_iter().map(|(v, m)| Cell::new(v, m)).collect())
    }

    pub fn cells(&self) -> &[Cell<T>] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn total_measure(&self) -> T {
        self.total_measure
    }

    /// `sum |value|^p * measure`.
    pub fn abs_power_integral(&self, p: T) -> T {
        compensated_sum(self.cells.iter().map(|c| c.value.abs().powf(p) * c.measure))
    }

    /// `sum value * measure`.
    pub fn integral(&self) -> T {
        compensated_sum(self.cells.iter().map(|c| c.value * c.measure))
    }

    pub fn map_values(&self, f: impl Fn(T) -> T) -> Result<Self> {
        let cells = self.cells.iter().map(|c| Cell::new(f(c.value), c.measure)).collect();
        Self::with_total(cells, self.total_measure)
    }
}

fn validate_cells<T: Real>(cells: &[Cell<T>]) -> Result<()> {
    if cells.is_empty() {
        return domain("a sampled function needs at least one cell");
    }
    for (i, c) in cells.iter().enumerate() {
        if !c.value.is_finite() {
            return domain(format!("cell {i} has non-finite value"));
        }
        if !(c.measure >= T::zero()) || !c.measure.is_finite() {
            return domain(format!("cell {i} has invalid measure {}", c.measure));
        }
    }
    Ok(())
}

/// Access to the distribution function `mu(t) = |{|g| > t}|` of some function,
/// together with the integrals Lorentz norms are built from.
pub trait LevelMeasure<T: Real> {
    /// `mu(t)`; equals the total measure for `t < 0`.
    fn measure_above(&self, t: T) -> T;

    fn total_measure(&self) -> T;

    /// Essential supremum of `|g|`; `mu(t) = 0` for `t >= max_level()`.
    fn max_level(&self) -> T;

    /// `int_0^inf t^(a-1) mu(t)^b dt` for `a > 0`, `b > 0`.
    fn level_moment(&self, a: T, b: T) -> T;

    /// `sup_{t > 0} t^p mu(t)`.
    fn weighted_sup(&self, p: T) -> T;

    /// Decreasing rearrangement `g*(s) = inf{t >= 0 : mu(t) < s}`.
    fn rearranged_value(&self, s: T) -> T {
        if s <= T::zero() {
            return self.max_level();
        }
        if s > self.total_measure() {
            return T::zero();
        }
        let (mut lo, mut hi) = (T::zero(), self.max_level());
        if self.measure_above(lo) < s {
            return T::zero();
        }
        for _ in 0..200 {
            let mid = (lo + hi) / T::lit(2.0);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.measure_above(mid) < s {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }
}

/// Exact, right-continuous, non-increasing step distribution function.
///
/// Plateau `i` covers `[breakpoints[i-1], breakpoints[i])` (with an implicit
/// leading breakpoint at zero) where `mu` equals `plateau_measures[i]`;
/// beyond the last breakpoint `mu` vanishes.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionCurve<T> {
    breakpoints: Vec<T>,
    plateau_measures: Vec<T>,
    total_measure: T,
}

impl<T: Real> DistributionCurve<T> {
    pub fn from_steps(breakpoints: Vec<T>, plateau_measures: Vec<T>, total_measure: T) -> Result<Self> {
        if breakpoints.len() != plateau_measures.len() {
            return domain("breakpoints and plateau measures differ in length");
        }
        if !(total_measure > T::zero()) {
            return domain("total measure must be positive");
        }
        for w in breakpoints.windows(2) {
            if !(w[0] < w[1]) {
                return domain("breakpoints must be strictly increasing");
            }
        }
        if breakpoints.first().is_some_and(|b| *b <= T::zero()) {
            return domain("breakpoints must be positive");
        }
        for w in plateau_measures.windows(2) {
            if w[1] > w[0] {
                return domain("plateau measures must be non-increasing");
            }
        }
        let slack = T::lit(TOTAL_TOL) * total_measure;
        if plateau_measures.iter().any(|m| *m < T::zero() || *m > total_measure + slack) {
            return domain("plateau measures must lie in [0, total measure]");
        }
        Ok(Self { breakpoints, plateau_measures, total_measure })
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn plateau_measures(&self) -> &[T] {
        &self.plateau_measures
    }

    /// Iterates `(left, right, measure)` for every plateau.
    pub fn plateaus(&self) -> impl Iterator<Item = (T, T, T)> + '_ {
        self.breakpoints.iter().enumerate().map(move |(i, &right)| {
            let left = if i == 0 { T::zero() } else { self.breakpoints[i - 1] };
            (left, right, self.plateau_measures[i])
        })
    }
}

impl<T: Real> LevelMeasure<T> for DistributionCurve<T> {
    fn measure_above(&self, t: T) -> T {
        if t < T::zero() {
            return self.total_measure;
        }
        let idx = self.breakpoints.partition_point(|b| *b <= t);
        self.plateau_measures.get(idx).copied().unwrap_or_else(T::zero)
    }

    fn total_measure(&self) -> T {
        self.total_measure
    }

    fn max_level(&self) -> T {
        self.breakpoints.last().copied().unwrap_or_else(T::zero)
    }

    fn level_moment(&self, a: T, b: T) -> T {
        // int_left^right t^(a-1) dt = (right^a - left^a) / a on each plateau
        compensated_sum(self.plateaus().filter(|(_, _, m)| *m > T::zero()).map(|(l, r, m)| {
            m.powf(b) * (r.powf(a) - l.powf(a)) / a
        }))
    }

    fn weighted_sup(&self, p: T) -> T {
        // t^p mu(t) increases on each plateau; the sup is the left limit at its right end.
        self.plateaus().map(|(_, r, m)| r.powf(p) * m).fold(T::zero(), T::max)
    }

    fn rearranged_value(&self, s: T) -> T {
        if s <= T::zero() {
            return self.max_level();
        }
        // g*(s) is the left end of the first plateau with measure at most s
        let idx = self.plateau_measures.partition_point(|m| *m > s);
        if idx == 0 {
            T::zero()
        } else {
            self.breakpoints[idx - 1]
        }
    }
}

/// Sorted `(|value|, measure)` pairs with positive value and measure, in a
/// total order independent of the input order.
fn sorted_levels<T: Real>(cells: impl Iterator<Item = (T, T)>) -> Vec<(T, T)> {
    let mut levels: Vec<(T, T)> = cells
        .map(|(v, m)| (v.abs(), m))
        .filter(|(v, m)| *v > T::zero() && *m > T::zero())
        .collect();
    levels.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap_or(Ordering::Equal)
            .then(b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal))
    });
    levels
}

fn curve_from_levels<T: Real>(levels: Vec<(T, T)>, total: T) -> DistributionCurve<T> {
    // Walk levels from the top; nearly equal values share a plateau.
    let mut tops: Vec<T> = Vec::new();
    let mut cumulative: Vec<T> = Vec::new();
    let mut running = T::zero();
    let mut comp = T::zero();
    let merge = T::lit(MERGE_TOL);
    for (value, measure) in levels {
        // Neumaier step keeps long plateau sums accurate.
        let t = running + measure;
        if running.abs() >= measure.abs() {
            comp = comp + ((running - t) + measure);
        } else {
            comp = comp + ((measure - t) + running);
        }
        running = t;
        match tops.last() {
            Some(&top) if top - value <= merge * top => {
                *cumulative.last_mut().expect("paired with tops") = running + comp;
            }
            _ => {
                tops.push(value);
                cumulative.push(running + comp);
            }
        }
    }
    tops.reverse();
    cumulative.reverse();
    let cumulative = cumulative.into_iter().map(|m| m.min(total)).collect();
    DistributionCurve { breakpoints: tops, plateau_measures: cumulative, total_measure: total }
}

/// Exact distribution function of `|f|`.
pub fn distribution<T: Real>(f: &SampledFunction<T>) -> DistributionCurve<T> {
    let levels = sorted_levels(f.cells.iter().map(|c| (c.value, c.measure)));
    curve_from_levels(levels, f.total_measure)
}

/// Decreasing rearrangement of a step function on `[0, domain_length]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRearrangement<T> {
    values: Vec<T>,
    widths: Vec<T>,
    domain_length: T,
    /// `ends[i]` is the right end of step `i`.
    ends: Vec<T>,
    /// `integrals[i]` is `int_0^{ends[i]} f*`.
    integrals: Vec<T>,
}

impl<T: Real> StepRearrangement<T> {
    /// Builds a rearrangement from explicit non-increasing, non-negative steps.
    pub fn from_steps(values: Vec<T>, widths: Vec<T>, domain_length: T) -> Result<Self> {
        if values.len() != widths.len() || values.is_empty() {
            return domain("step values and widths must be non-empty and of equal length");
        }
        if values.iter().any(|v| !(*v >= T::zero()) || !v.is_finite()) {
            return domain("rearranged values must be finite and non-negative");
        }
        if values.windows(2).any(|w| w[1] > w[0]) {
            return domain("rearranged values must be non-increasing");
        }
        if widths.iter().any(|w| !(*w >= T::zero())) {
            return domain("step widths must be non-negative");
        }
        let sum = compensated_sum(widths.iter().copied());
        if !(domain_length > T::zero()) || (sum - domain_length).abs() > T::lit(TOTAL_TOL) * domain_length {
            return domain(format!("step widths sum to {sum}, expected {domain_length}"));
        }
        Ok(Self::build(values, widths, domain_length))
    }

    fn build(values: Vec<T>, widths: Vec<T>, domain_length: T) -> Self {
        let mut ends = Vec::with_capacity(widths.len());
        let mut integrals = Vec::with_capacity(widths.len());
        let (mut end, mut area) = (T::zero(), T::zero());
        let (mut end_c, mut area_c) = (T::zero(), T::zero());
        for (&v, &w) in values.iter().zip(&widths) {
            let (e, ec) = two_sum_step(end, end_c, w);
            end = e;
            end_c = ec;
            let (a, ac) = two_sum_step(area, area_c, v * w);
            area = a;
            area_c = ac;
            ends.push(end + end_c);
            integrals.push(area + area_c);
        }
        Self { values, widths, domain_length, ends, integrals }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn widths(&self) -> &[T] {
        &self.widths
    }

    pub fn domain_length(&self) -> T {
        self.domain_length
    }

    /// Iterates `(start, end, value)` over the steps.
    pub fn steps(&self) -> impl Iterator<Item = (T, T, T)> + '_ {
        (0..self.values.len()).map(move |i| {
            let start = if i == 0 { T::zero() } else { self.ends[i - 1] };
            (start, self.ends[i], self.values[i])
        })
    }

    /// `f*(s)` with the right-continuous convention on step boundaries.
    pub fn value_at(&self, s: T) -> T {
        let idx = self.ends.partition_point(|e| *e <= s);
        self.values.get(idx).copied().unwrap_or_else(T::zero)
    }

    /// `int_0^{|Omega|} f*(s) ds`.
    pub fn total_integral(&self) -> T {
        self.integrals.last().copied().unwrap_or_else(T::zero)
    }

    /// Distribution function of the rearrangement (identical to the source's).
    pub fn distribution(&self) -> DistributionCurve<T> {
        let levels = sorted_levels(self.values.iter().copied().zip(self.widths.iter().copied()));
        curve_from_levels(levels, self.domain_length)
    }

    /// Exact `int_0^w f*(s) ds`.
    pub fn partial_integral(&self, w: T) -> Result<T> {
        let slack = T::lit(TOTAL_TOL) * self.domain_length;
        if !(w >= -slack) || w > self.domain_length + slack {
            return domain(format!("partial integral upper limit {w} outside [0, {}]", self.domain_length));
        }
        Ok(self.partial_integral_clamped(w))
    }

    pub(crate) fn partial_integral_clamped(&self, w: T) -> T {
        let w = w.max(T::zero()).min(self.domain_length);
        let idx = self.ends.partition_point(|e| *e <= w);
        if idx >= self.values.len() {
            return self.total_integral();
        }
        let (start, before) = if idx == 0 {
            (T::zero(), T::zero())
        } else {
            (self.ends[idx - 1], self.integrals[idx - 1])
        };
        before + self.values[idx] * (w - start)
    }
}

fn two_sum_step<T: Real>(sum: T, comp: T, x: T) -> (T, T) {
    let t = sum + x;
    let c = if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
    (t, comp + c)
}

/// Decreasing rearrangement of `|f|`: absolute values sorted non-increasingly,
/// each keeping its cell measure as the step width.
pub fn decreasing_rearrangement<T: Real>(f: &SampledFunction<T>) -> StepRearrangement<T> {
    let mut steps: Vec<(T, T)> = f.cells.iter().map(|c| (c.value.abs(), c.measure)).collect();
    steps.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal));
    let (values, widths) = steps.into_iter().unzip();
    StepRearrangement::build(values, widths, f.total_measure)
}

/// Both sides of the Hardy–Littlewood inequality for two functions on the
/// same cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardyLittlewood<T> {
    /// `int h g`.
    pub lhs: T,
    /// `int_0^{|Omega|} h* g*`.
    pub rhs: T,
}

impl<T: Real> HardyLittlewood<T> {
    pub fn holds(&self, rel_tol: T) -> bool {
        self.lhs <= self.rhs + rel_tol * self.rhs.abs()
    }
}

pub fn hardy_littlewood_pairing<T: Real>(
    h: &SampledFunction<T>,
    g: &SampledFunction<T>,
) -> Result<HardyLittlewood<T>> {
    if h.len() != g.len() {
        return domain("functions are defined on different cell decompositions");
    }
    let tol = T::lit(TOTAL_TOL);
    for (i, (a, b)) in h.cells.iter().zip(&g.cells).enumerate() {
        if (a.measure - b.measure).abs() > tol * a.measure.max(b.measure) {
            return domain(format!("cell {i} has different measures in the two functions"));
        }
    }
    let lhs = compensated_sum(h.cells.iter().zip(&g.cells).map(|(a, b)| a.value * b.value * a.measure));
    let rhs = product_integral(&decreasing_rearrangement(h), &decreasing_rearrangement(g));
    Ok(HardyLittlewood { lhs, rhs })
}

/// `int_0^L a(s) b(s) ds` for two step functions on the same interval.
fn product_integral<T: Real>(a: &StepRearrangement<T>, b: &StepRearrangement<T>) -> T {
    let (mut i, mut j) = (0, 0);
    let mut pos = T::zero();
    let mut terms = Vec::with_capacity(a.values.len() + b.values.len());
    while i < a.values.len() && j < b.values.len() {
        let end = a.ends[i].min(b.ends[j]);
        if end > pos {
            terms.push(a.values[i] * b.values[j] * (end - pos));
            pos = end;
        }
        if a.ends[i] <= end {
            i += 1;
        }
        if b.ends[j] <= end {
            j += 1;
        }
    }
    compensated_sum(terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sf(pairs: &[(f64, f64)]) -> SampledFunction<f64> {
        SampledFunction::from_pairs(pairs.iter().copied()).unwrap()
    }

    #[test]
    fn rejects_empty_and_negative() {
        assert!(SampledFunction::<f64>::new(vec![]).is_err());
        assert!(SampledFunction::from_pairs([(1.0, -0.5)]).is_err());
        assert!(SampledFunction::from_pairs([(f64::NAN, 0.5)]).is_err());
        assert!(SampledFunction::with_total(vec![Cell::new(1.0, 0.5)], 1.0).is_err());
        assert!(SampledFunction::with_total(vec![Cell::new(1.0, 0.5)], 0.5).is_ok());
    }

    #[test]
    fn constant_function_distribution() {
        let d = distribution(&sf(&[(1.0, 2.5)]));
        assert_eq!(d.measure_above(0.0), 2.5);
        assert_eq!(d.measure_above(0.999), 2.5);
        assert_eq!(d.measure_above(1.0), 0.0);
        assert_eq!(d.measure_above(7.0), 0.0);
    }

    #[test]
    fn counting_distribution() {
        let d = distribution(&sf(&[(3.0, 0.5), (-1.0, 0.25), (2.0, 0.25)]));
        assert_eq!(d.breakpoints(), &[1.0, 2.0, 3.0]);
        assert_eq!(d.plateau_measures(), &[1.0, 0.75, 0.5]);
        assert_eq!(d.measure_above(0.5), 1.0);
        assert_eq!(d.measure_above(1.0), 0.75);
        assert_eq!(d.measure_above(2.5), 0.5);
        assert_eq!(d.measure_above(3.0), 0.0);
        assert_eq!(d.measure_above(-1.0), 1.0);
    }

    #[test]
    fn near_equal_values_merge() {
        let d = distribution(&sf(&[(1.0, 0.5), (1.0 + 1e-16, 0.5), (0.5, 1.0)]));
        assert_eq!(d.breakpoints().len(), 2);
    }

    #[test]
    fn zero_function() {
        let f = sf(&[(0.0, 1.0)]);
        let d = distribution(&f);
        assert!(d.breakpoints().is_empty());
        assert_eq!(d.measure_above(0.0), 0.0);
        assert_eq!(d.level_moment(1.0, 1.0), 0.0);
        let r = decreasing_rearrangement(&f);
        assert_eq!(r.total_integral(), 0.0);
    }

    #[test]
    fn sorting_rearrangement() {
        let r = decreasing_rearrangement(&sf(&[(3.0, 0.5), (1.0, 0.25), (2.0, 0.25)]));
        let steps: Vec<_> = r.steps().collect();
        assert_eq!(steps, vec![(0.0, 0.5, 3.0), (0.5, 0.75, 2.0), (0.75, 1.0, 1.0)]);
        assert_eq!(r.value_at(0.6), 2.0);
    }

    #[test]
    fn sorted_input_is_fixed_point() {
        let f = sf(&[(4.0, 0.1), (3.0, 0.2), (3.0, 0.3), (0.5, 0.4)]);
        let r = decreasing_rearrangement(&f);
        assert_eq!(r.values(), &[4.0, 3.0, 3.0, 0.5]);
        assert_eq!(r.widths(), &[0.1, 0.2, 0.3, 0.4]);
    }

    #[test]
    fn two_disk_load_rearrangement() {
        let eps = 0.1;
        let f = sf(&[(eps, PI), (1.0, PI)]);
        let r = decreasing_rearrangement(&f);
        assert_eq!(r.values(), &[1.0, eps]);
        assert_eq!(r.value_at(1.0), 1.0);
        assert_eq!(r.value_at(PI + 0.1), eps);
        assert_eq!(r.partial_integral(PI).unwrap(), PI);
        assert!((r.partial_integral(2.0 * PI).unwrap() - PI * (1.0 + eps)).abs() < 1e-15);
        assert_eq!(r.partial_integral(0.0).unwrap(), 0.0);
        assert!(r.partial_integral(-0.1).is_err());
        assert!(r.partial_integral(2.0 * PI + 0.1).is_err());
    }

    #[test]
    fn hardy_littlewood_examples() {
        let h = sf(&[(1.0, 0.5), (0.0, 0.5)]);
        let g = sf(&[(0.0, 0.5), (1.0, 0.5)]);
        let hl = hardy_littlewood_pairing(&h, &g).unwrap();
        assert_eq!(hl.lhs, 0.0);
        assert_eq!(hl.rhs, 0.5);
        let same = hardy_littlewood_pairing(&h, &h).unwrap();
        assert_eq!(same.lhs, same.rhs);
        let other = sf(&[(1.0, 0.25), (1.0, 0.75)]);
        assert!(hardy_littlewood_pairing(&h, &other).is_err());
        assert!(hardy_littlewood_pairing(&h, &sf(&[(1.0, 1.0)])).is_err());
    }

    #[test]
    fn step_moments_and_sup() {
        let d = DistributionCurve::from_steps(vec![1.0f64, 2.0], vec![1.0, 0.5], 1.0).unwrap();
        // int_0^inf mu = 1*1 + 0.5*1
        assert!((d.level_moment(1.0, 1.0) - 1.5).abs() < 1e-15);
        assert_eq!(d.weighted_sup(1.0), 1.0);
        assert_eq!(d.rearranged_value(0.4), 2.0);
        assert_eq!(d.rearranged_value(0.5), 1.0);
        assert_eq!(d.rearranged_value(0.75), 1.0);
        assert!(DistributionCurve::from_steps(vec![2.0, 1.0], vec![1.0, 0.5], 1.0).is_err());
        assert!(DistributionCurve::from_steps(vec![1.0, 2.0], vec![0.5, 1.0], 1.0).is_err());
    }

    #[test]
    fn generic_over_f32() {
        let f = SampledFunction::<f32>::from_pairs([(3.0, 0.5), (-1.0, 0.25), (2.0, 0.25)]).unwrap();
        let d = distribution(&f);
        assert_eq!(d.measure_above(1.5f32), 0.75);
        let r = decreasing_rearrangement(&f);
        assert_eq!(r.distribution(), d);
    }
}
