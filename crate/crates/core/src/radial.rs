//! Exact radial solution of the symmetrized Neumann problem on the ball.
//!
//! On the ball `B_R` of the same measure as the original domain, the
//! symmetrized problem `-Δv = f♯`, `∂v/∂ν = c*` has the radial solution
//!
//! ```text
//! v'(r) = -(1 / (n ω_n r^(n-1))) ∫_0^{ω_n r^n} f*(s) ds
//! ```
//!
//! which is unique up to an additive constant. The constant is fixed through
//! the boundary value `v_m = v(R)` selected by a [`NormalizationCondition`].
//! Because `f*` is a step function, `v` is a closed form on each plateau:
//! `v = C - A/(n ω_n) G_n(r) - h r² / (2n)` with `G_2 = ln r` and
//! `G_n = r^(2-n) / (2-n)` for `n >= 3`.

use crate::error::{domain, Error, Result};
use crate::measure::{LevelMeasure, StepRearrangement};
use crate::quad;
use crate::scalar::{rel_diff, sphere_area, unit_ball_measure, Real};

const MEASURE_TOL: f64 = 1e-12;
const COMPATIBILITY_TOL: f64 = 1e-10;

/// How the additive constant of the Neumann solution is pinned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormalizationCondition {
    /// `∫_{∂Ω♯} v = Σ_j (c*/c_j) ∫_{∂Ω_j} u`.
    Trace,
    /// `∫_{∂Ω♯} v² = Σ_j (c*/c_j) ∫_{∂Ω_j} u²`.
    SquaredTrace,
}

impl NormalizationCondition {
    /// Power of the trace entering the condition.
    pub fn power(self) -> i32 {
        match self {
            Self::Trace => 1,
            Self::SquaredTrace => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Trace => "cond_1",
            Self::SquaredTrace => "cond_2",
        }
    }
}

/// The symmetrized Neumann problem on the ball.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetrizedProblem<T> {
    dim: usize,
    radius: T,
    f_star: StepRearrangement<T>,
    c_star: T,
}

impl<T: Real> SymmetrizedProblem<T> {
    /// Ball of measure `f_star.domain_length()` with the compatible Neumann datum.
    pub fn new(f_star: StepRearrangement<T>, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let radius = crate::scalar::ball_radius(dim, f_star.domain_length());
        let c_star = c_star_of(&f_star, dim, radius)?;
        Ok(Self { dim, radius, f_star, c_star })
    }

    /// Problem with a prescribed datum `c_star`; fails unless it is compatible.
    pub fn with_neumann(f_star: StepRearrangement<T>, dim: usize, c_star: T) -> Result<Self> {
        check_dim(dim)?;
        let radius = crate::scalar::ball_radius(dim, f_star.domain_length());
        let residual = c_star * sphere_area(dim, radius) + f_star.total_integral();
        let scale = T::one().max(f_star.total_integral().abs());
        if residual.abs() > T::lit(COMPATIBILITY_TOL) * scale {
            return Err(Error::Compatibility { residual: residual.as_f64() });
        }
        Ok(Self { dim, radius, f_star, c_star })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn f_star(&self) -> &StepRearrangement<T> {
        &self.f_star
    }

    pub fn c_star(&self) -> T {
        self.c_star
    }

    /// `|Ω♯|`.
    pub fn measure(&self) -> T {
        self.f_star.domain_length()
    }

    /// `P(Ω♯) = n ω_n R^(n-1)`.
    pub fn perimeter(&self) -> T {
        sphere_area(self.dim, self.radius)
    }

    /// `c* P(Ω♯) + ∫ f*`.
    pub fn compatibility_residual(&self) -> T {
        self.c_star * self.perimeter() + self.f_star.total_integral()
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return domain(format!("dimension must be at least 2, got {dim}"));
    }
    Ok(())
}

/// Neumann datum of the symmetrized problem: `-(∫ f*) / (n ω_n R^(n-1))`.
pub fn c_star_of<T: Real>(f_star: &StepRearrangement<T>, n: usize, radius: T) -> Result<T> {
    check_dim(n)?;
    if !(radius > T::zero()) {
        return domain("ball radius must be positive");
    }
    let ball = unit_ball_measure::<T>(n) * radius.powi(n as i32);
    if rel_diff(ball, f_star.domain_length()) > T::lit(MEASURE_TOL) {
        return domain(format!(
            "rearrangement lives on [0, {}] but the ball has measure {ball}",
            f_star.domain_length()
        ));
    }
    Ok(-f_star.total_integral() / sphere_area(n, radius))
}

/// `v'(r)` from the partial integrals of `f*`.
pub fn radial_derivative<T: Real>(prob: &SymmetrizedProblem<T>, r: T) -> Result<T> {
    if !(r > T::zero()) {
        return domain(format!("radial derivative needs r > 0 (limit at 0 is 0), got {r}"));
    }
    if r > prob.radius * (T::one() + T::lit(MEASURE_TOL)) {
        return domain(format!("r = {r} lies outside the ball of radius {}", prob.radius));
    }
    let n = prob.dim;
    let omega = unit_ball_measure::<T>(n);
    let mass = prob.f_star.partial_integral_clamped(omega * r.powi(n as i32));
    Ok(-mass / (T::from_usize_lossy(n) * omega * r.powi(n as i32 - 1)))
}

/// One plateau of `f*` mapped to the radial interval `[r_lo, r_hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSegment<T> {
    pub r_lo: T,
    pub r_hi: T,
    /// value of `f*` on the plateau
    pub load: T,
    /// `∫_0^{s_lo} f* - load * s_lo`, the coefficient of the `G_n` term
    pub flux: T,
    /// additive constant
    pub offset: T,
}

impl<T: Real> ProfileSegment<T> {
    fn value(&self, n: usize, omega: T, r: T) -> T {
        let nn = T::from_usize_lossy(n);
        let mut v = self.offset - self.load * r * r / (nn + nn);
        if self.flux != T::zero() {
            v = v - self.flux / (nn * omega) * green(n, r);
        }
        v
    }

    fn derivative(&self, n: usize, omega: T, r: T) -> T {
        let nn = T::from_usize_lossy(n);
        let mut d = -self.load * r / nn;
        if self.flux != T::zero() {
            d = d - self.flux / (nn * omega * r.powi(n as i32 - 1));
        }
        d
    }
}

/// Radial fundamental solution up to sign: `ln r` or `r^(2-n)/(2-n)`.
fn green<T: Real>(n: usize, r: T) -> T {
    if n == 2 {
        r.ln()
    } else {
        let e = 2 - n as i32;
        r.powi(e) / T::from_f64(e as f64).expect("small integer")
    }
}

/// Radial solution with a fixed boundary value.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialSolution<T> {
    problem: SymmetrizedProblem<T>,
    v_m: T,
    segments: Vec<ProfileSegment<T>>,
}

/// Solves the symmetrized problem under a normalization condition.
///
/// `boundary_data` is the left-hand side `Σ_j (c*/c_j) ∫_{∂Ω_j} u^k`, with
/// `k = 1` or `2` according to `cond`.
pub fn solve<T: Real>(
    prob: &SymmetrizedProblem<T>,
    cond: NormalizationCondition,
    boundary_data: T,
) -> Result<RadialSolution<T>> {
    if !boundary_data.is_finite() {
        return domain("boundary data must be finite");
    }
    let per = prob.perimeter();
    let v_m = match cond {
        NormalizationCondition::Trace => boundary_data / per,
        NormalizationCondition::SquaredTrace => {
            if boundary_data < T::zero() {
                return Err(Error::Hypothesis(format!(
                    "squared-trace normalization needs non-negative data, got {boundary_data}; \
                     the total load must be positive"
                )));
            }
            (boundary_data / per).sqrt()
        }
    };
    Ok(RadialSolution::with_boundary_value(prob.clone(), v_m))
}

impl<T: Real> RadialSolution<T> {
    /// Solution with `v(R) = v_m`.
    pub fn with_boundary_value(problem: SymmetrizedProblem<T>, v_m: T) -> Self {
        let n = problem.dim;
        let omega = unit_ball_measure::<T>(n);
        let inv_n = T::one() / T::from_usize_lossy(n);
        let radius_of = |s: T| (s / omega).powf(inv_n);

        // merge equal neighbouring values of f* into single plateaus
        let mut plateaus: Vec<(T, T, T)> = Vec::new();
        for (s0, s1, h) in problem.f_star.steps() {
            if s1 <= s0 {
                continue;
            }
            match plateaus.last_mut() {
                Some(last) if last.2 == h => last.1 = s1,
                _ => plateaus.push((s0, s1, h)),
            }
        }
        if plateaus.is_empty() {
            plateaus.push((T::zero(), problem.measure(), T::zero()));
        }

        let last = plateaus.len() - 1;
        let mut segments: Vec<ProfileSegment<T>> = plateaus
            .iter()
            .enumerate()
            .map(|(i, &(s0, s1, h))| {
                let mass_before = problem.f_star.partial_integral_clamped(s0);
                ProfileSegment {
                    r_lo: if i == 0 { T::zero() } else { radius_of(s0) },
                    r_hi: if i == last { problem.radius } else { radius_of(s1) },
                    load: h,
                    flux: if i == 0 { T::zero() } else { mass_before - h * s0 },
                    offset: T::zero(),
                }
            })
            .collect();
        // share the breakpoint radius between neighbours exactly
        for i in 1..segments.len() {
            segments[i].r_lo = segments[i - 1].r_hi;
        }

        // fix offsets from the boundary inwards, matching values at breakpoints
        let mut outer_value = v_m;
        for seg in segments.iter_mut().rev() {
            let shape = seg.value(n, omega, seg.r_hi);
            seg.offset = outer_value - shape;
            outer_value = if seg.r_lo > T::zero() || seg.flux == T::zero() {
                seg.value(n, omega, seg.r_lo)
            } else {
                T::infinity()
            };
        }
        Self { problem, v_m, segments }
    }

    pub fn problem(&self) -> &SymmetrizedProblem<T> {
        &self.problem
    }

    pub fn segments(&self) -> &[ProfileSegment<T>] {
        &self.segments
    }

    /// `v_m = v(R) = inf v`.
    pub fn boundary_value(&self) -> T {
        self.v_m
    }

    /// `v(0) = sup v`.
    pub fn max_value(&self) -> T {
        self.value(T::zero())
    }

    pub fn is_positive(&self) -> bool {
        self.v_m >= T::zero()
    }

    fn segment_index(&self, r: T) -> usize {
        self.segments
            .partition_point(|s| s.r_hi < r)
            .min(self.segments.len() - 1)
    }

    /// `v(r)` for `0 <= r <= R`.
    pub fn value(&self, r: T) -> T {
        let n = self.problem.dim;
        let omega = unit_ball_measure::<T>(n);
        self.segments[self.segment_index(r)].value(n, omega, r)
    }

    /// `v'(r)` from the closed-form segment.
    pub fn derivative(&self, r: T) -> T {
        if r <= T::zero() {
            return T::zero();
        }
        let n = self.problem.dim;
        let omega = unit_ball_measure::<T>(n);
        self.segments[self.segment_index(r)].derivative(n, omega, r)
    }

    /// Left and right limits of `(v, v')` at every interior breakpoint.
    pub fn breakpoint_jumps(&self) -> Vec<(T, T, T)> {
        let n = self.problem.dim;
        let omega = unit_ball_measure::<T>(n);
        self.segments
            .windows(2)
            .map(|w| {
                let r = w[0].r_hi;
                let jump_v = (w[0].value(n, omega, r) - w[1].value(n, omega, r)).abs();
                let jump_d = (w[0].derivative(n, omega, r) - w[1].derivative(n, omega, r)).abs();
                (r, jump_v, jump_d)
            })
            .collect()
    }

    /// `∫_{∂Ω♯} v^k = v_m^k P(Ω♯)`.
    pub fn trace_moment(&self, k: i32) -> T {
        self.v_m.powi(k) * self.problem.perimeter()
    }

    /// `(r, v(r), v'(r))` on a uniform radial grid with `points >= 2` nodes.
    pub fn profile_table(&self, points: usize) -> Vec<(T, T, T)> {
        let points = points.max(2);
        let step = self.problem.radius / T::from_usize_lossy(points - 1);
        (0..points)
            .map(|i| {
                let r = if i + 1 == points { self.problem.radius } else { step * T::from_usize_lossy(i) };
                (r, self.value(r), self.derivative(r))
            })
            .collect()
    }

    /// Profile values at the segment boundaries, from the centre outwards.
    pub fn breakpoint_levels(&self) -> Vec<T> {
        let mut levels = vec![self.max_value()];
        levels.extend(self.segments.iter().map(|s| self.value(s.r_hi)));
        levels
    }

    /// `sup { r : v(r) > t }`, for `v_m <= t < v(0)`.
    fn radius_at_level(&self, t: T) -> T {
        let n = self.problem.dim;
        let omega = unit_ball_measure::<T>(n);
        let k = self
            .segments
            .partition_point(|s| s.value(n, omega, s.r_hi) > t)
            .min(self.segments.len() - 1);
        let seg = &self.segments[k];
        if seg.flux == T::zero() && seg.load > T::zero() {
            // pure quadratic: C - h r²/(2n) = t
            let nn = T::from_usize_lossy(n);
            let r2 = (seg.offset - t) * (nn + nn) / seg.load;
            return r2.max(T::zero()).sqrt().max(seg.r_lo).min(seg.r_hi);
        }
        // strictly decreasing on the segment: safeguarded Newton
        let (mut lo, mut hi) = (seg.r_lo, seg.r_hi);
        let mut r = (lo + hi) / T::lit(2.0);
        for _ in 0..200 {
            let g = seg.value(n, omega, r) - t;
            if g > T::zero() {
                lo = r;
            } else {
                hi = r;
            }
            let d = seg.derivative(n, omega, r);
            let mut next = if d < T::zero() { r - g / d } else { (lo + hi) / T::lit(2.0) };
            if !(next > lo && next < hi) {
                next = (lo + hi) / T::lit(2.0);
            }
            if (next - r).abs() <= T::epsilon() * self.problem.radius || hi - lo <= T::epsilon() * self.problem.radius {
                return next;
            }
            r = next;
        }
        r
    }

    /// Distribution function `φ(t) = |{v > t}|` of a positive solution.
    pub fn phi_curve(&self) -> Result<PhiCurve<T>> {
        if !self.is_positive() {
            return Err(Error::Hypothesis(format!(
                "the symmetrized solution is not positive (v_m = {})",
                self.v_m
            )));
        }
        Ok(PhiCurve { solution: self.clone() })
    }
}

/// Distribution function of a positive radial solution.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiCurve<T> {
    solution: RadialSolution<T>,
}

impl<T: Real> PhiCurve<T> {
    pub fn solution(&self) -> &RadialSolution<T> {
        &self.solution
    }

    /// `φ'(t)`, computed through the inverse profile; zero off `(v_m, v(0))`.
    pub fn derivative(&self, t: T) -> T {
        let sol = &self.solution;
        if t <= sol.v_m || t >= sol.max_value() {
            return T::zero();
        }
        let r = sol.radius_at_level(t);
        let n = sol.problem.dim;
        let d = sol.derivative(r);
        if d == T::zero() {
            return T::zero();
        }
        sphere_area(n, r) / d
    }
}

impl<T: Real> LevelMeasure<T> for PhiCurve<T> {
    fn measure_above(&self, t: T) -> T {
        let sol = &self.solution;
        if t < sol.v_m {
            return sol.problem.measure();
        }
        if t >= sol.max_value() {
            return T::zero();
        }
        let n = sol.problem.dim;
        unit_ball_measure::<T>(n) * sol.radius_at_level(t).powi(n as i32)
    }

    fn total_measure(&self) -> T {
        self.solution.problem.measure()
    }

    fn max_level(&self) -> T {
        self.solution.max_value()
    }

    fn level_moment(&self, a: T, b: T) -> T {
        let sol = &self.solution;
        let n = sol.problem.dim;
        let omega = unit_ball_measure::<T>(n);
        let nn = n as i32;
        let plateau = sol.v_m.powf(a) / a * sol.problem.measure().powf(b);
        // substitute t = v(r) on (v_m, v(0)): dt = v'(r) dr
        let inner: Vec<T> = sol
            .segments
            .iter()
            .map(|seg| {
                quad::tanh_sinh(
                    |r: T| {
                        let v = seg.value(n, omega, r);
                        let phi = omega * r.powi(nn);
                        if v <= T::zero() || phi <= T::zero() {
                            return T::zero();
                        }
                        v.powf(a - T::one()) * phi.powf(b) * (-seg.derivative(n, omega, r))
                    },
                    seg.r_lo,
                    seg.r_hi,
                )
            })
            .collect();
        plateau + crate::scalar::compensated_sum(inner)
    }

    fn weighted_sup(&self, p: T) -> T {
        let sol = &self.solution;
        let n = sol.problem.dim;
        let omega = unit_ball_measure::<T>(n);
        // t = v(r) maps (v_m, v(0)) onto the radii, and t <= v_m gives at most v_m^p |Ω♯|
        let objective = |r: T| sol.value(r).max(T::zero()).powf(p) * omega * r.powi(n as i32);
        sol.segments
            .iter()
            .map(|seg| quad::maximize(objective, seg.r_lo, seg.r_hi))
            .fold(objective(sol.problem.radius), T::max)
    }

    fn rearranged_value(&self, s: T) -> T {
        let sol = &self.solution;
        let n = sol.problem.dim;
        let s = s.max(T::zero()).min(sol.problem.measure());
        let r = (s / unit_ball_measure::<T>(n)).powf(T::one() / T::from_usize_lossy(n));
        sol.value(r.min(sol.problem.radius))
    }
}

/// Constant in front of `φ^((2n-2)/n)` in the level-set identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaNormalization {
    /// `n² ω_n^(-2/n)`.
    NegativeExponent,
    /// `n² ω_n^(2/n)`, the isoperimetric constant `P(B)² / |B|^((2n-2)/n)`.
    Isoperimetric,
}

impl GammaNormalization {
    pub fn value<T: Real>(self, n: usize) -> T {
        let nn = T::from_usize_lossy(n);
        let omega = unit_ball_measure::<T>(n);
        let e = T::lit(2.0) / nn;
        match self {
            Self::NegativeExponent => nn * nn * omega.powf(-e),
            Self::Isoperimetric => nn * nn * omega.powf(e),
        }
    }
}

/// Residuals of the level-set identity for a radial solution, for both
/// normalizations of the isoperimetric constant.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck<T> {
    pub negative_exponent: T,
    pub isoperimetric: T,
    pub points_used: usize,
}

impl<T: Real> IdentityCheck<T> {
    /// The normalization with the smaller residual.
    pub fn closing(&self) -> GammaNormalization {
        if self.isoperimetric <= self.negative_exponent {
            GammaNormalization::Isoperimetric
        } else {
            GammaNormalization::NegativeExponent
        }
    }

    pub fn max_residual(&self) -> T {
        self.isoperimetric.min(self.negative_exponent)
    }
}

/// Both sides of `γ φ^((2n-2)/n) = (-φ' - P_ext / c*) ∫_0^φ f*` at one level.
pub fn identity_sides<T: Real>(curve: &PhiCurve<T>, gamma: GammaNormalization, t: T) -> (T, T) {
    let sol = &curve.solution;
    let prob = &sol.problem;
    let n = prob.dim;
    let phi = curve.measure_above(t);
    let lhs = gamma.value::<T>(n) * phi.powf(T::from_usize_lossy(2 * n - 2) / T::from_usize_lossy(n));
    let external = if t < sol.v_m { prob.perimeter() } else { T::zero() };
    let boundary_term = if external > T::zero() { -external / prob.c_star } else { T::zero() };
    let rhs = (-curve.derivative(t) + boundary_term) * prob.f_star.partial_integral_clamped(phi);
    (lhs, rhs)
}

/// Maximum relative residual of the level-set identity over `t_grid`.
///
/// Grid points within `1e-9` of a profile breakpoint are skipped.
pub fn check_fundamental_identity<T: Real>(sol: &RadialSolution<T>, t_grid: &[T]) -> Result<IdentityCheck<T>> {
    let curve = sol.phi_curve()?;
    let mut levels = sol.breakpoint_levels();
    levels.push(sol.v_m);
    let guard = T::lit(1e-9) * T::one().max(sol.max_value().abs());
    let mut worst = [T::zero(), T::zero()];
    let mut used = 0;
    for &t in t_grid {
        if t < T::zero() || levels.iter().any(|l| (t - *l).abs() <= guard) {
            continue;
        }
        used += 1;
        for (slot, gamma) in [GammaNormalization::NegativeExponent, GammaNormalization::Isoperimetric]
            .into_iter()
            .enumerate()
        {
            let (lhs, rhs) = identity_sides(&curve, gamma, t);
            worst[slot] = worst[slot].max(rel_diff(lhs, rhs));
        }
    }
    Ok(IdentityCheck { negative_exponent: worst[0], isoperimetric: worst[1], points_used: used })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{decreasing_rearrangement, SampledFunction};
    use std::f64::consts::PI;

    fn unit_load_disk(radius: f64) -> SymmetrizedProblem<f64> {
        let f = SampledFunction::from_pairs([(1.0, PI * radius * radius)]).unwrap();
        SymmetrizedProblem::new(decreasing_rearrangement(&f), 2).unwrap()
    }

    fn two_disks(eps: f64) -> SymmetrizedProblem<f64> {
        let f = SampledFunction::from_pairs([(1.0, PI), (eps, PI)]).unwrap();
        SymmetrizedProblem::new(decreasing_rearrangement(&f), 2).unwrap()
    }

    fn two_balls(eps: f64) -> SymmetrizedProblem<f64> {
        let b = 4.0 * PI / 3.0;
        let f = SampledFunction::from_pairs([(1.0, b), (eps, b)]).unwrap();
        SymmetrizedProblem::new(decreasing_rearrangement(&f), 3).unwrap()
    }

    #[test]
    fn c_star_values() {
        assert!((unit_load_disk(1.0).c_star() + 0.5).abs() < 1e-15);
        let eps = 0.01;
        let p = two_disks(eps);
        assert!((p.radius() - 2f64.sqrt()).abs() < 1e-15);
        assert!((p.c_star() + 2f64.sqrt() * (1.0 + eps) / 4.0).abs() < 1e-15);
        let q = two_balls(eps);
        assert!((q.c_star() + (1.0 + eps) / (3.0 * 4f64.cbrt())).abs() < 1e-15);
        let bad = c_star_of(p.f_star(), 2, 1.0);
        assert!(bad.is_err());
    }

    #[test]
    fn prescribed_datum_must_be_compatible() {
        let p = unit_load_disk(1.0);
        assert!(SymmetrizedProblem::with_neumann(p.f_star().clone(), 2, -0.5).is_ok());
        let err = SymmetrizedProblem::with_neumann(p.f_star().clone(), 2, -0.25).unwrap_err();
        assert!(matches!(err, Error::Compatibility { .. }));
    }

    #[test]
    fn derivative_of_unit_load() {
        let p = unit_load_disk(1.0);
        for r in [0.1, 0.5, 1.0] {
            assert!((radial_derivative(&p, r).unwrap() + r / 2.0).abs() < 1e-15);
        }
        assert!(radial_derivative(&p, 0.0).is_err());
        assert!(radial_derivative(&p, 1.5).is_err());
    }

    #[test]
    fn derivative_of_two_disk_load() {
        let eps = 0.2;
        let p = two_disks(eps);
        let c3 = (eps - 1.0) / 2.0;
        for r in [1.1, 1.2, 1.4] {
            let expected = c3 / r - eps * r / 2.0;
            assert!((radial_derivative(&p, r).unwrap() - expected).abs() < 1e-14);
        }
        let at_boundary = radial_derivative(&p, p.radius()).unwrap();
        assert!((at_boundary - p.c_star()).abs() < 1e-10);
    }

    #[test]
    fn torsion_function() {
        let p = unit_load_disk(1.0);
        let sol = solve(&p, NormalizationCondition::Trace, 0.0).unwrap();
        for r in [0.0, 0.3, 0.7, 1.0] {
            assert!((sol.value(r) - (1.0 - r * r) / 4.0).abs() < 1e-15);
        }
    }

    #[test]
    fn printed_boundary_values() {
        let eps = 0.05;
        let p = two_disks(eps);
        // (c*/c_1) * 2π with c_1 = -1/2 and u = 1 on ∂B_1
        let data = p.c_star() / -0.5 * 2.0 * PI;
        let s1 = solve(&p, NormalizationCondition::Trace, data).unwrap();
        assert!((s1.value(p.radius()) - (1.0 + eps) / 2.0).abs() < 1e-14);
        let s2 = solve(&p, NormalizationCondition::SquaredTrace, data).unwrap();
        assert!((s2.value(p.radius()) - ((1.0 + eps) / 2.0).sqrt()).abs() < 1e-14);
        let err = solve(&p, NormalizationCondition::SquaredTrace, -1.0).unwrap_err();
        assert!(matches!(err, Error::Hypothesis(_)));
    }

    #[test]
    fn printed_profile_constants() {
        let eps = 0.03;
        let p = two_disks(eps);
        let sol = RadialSolution::with_boundary_value(p, (1.0 + eps) / 2.0);
        let c1 = 0.75 * (1.0 + eps) + 0.5 * (1.0 - eps) * 2f64.sqrt().ln();
        assert!((sol.max_value() - c1).abs() < 1e-12);
        let q = two_balls(eps);
        let v_m = (1.0 + eps) / (2.0 * 2f64.cbrt());
        let sol3 = RadialSolution::with_boundary_value(q, v_m);
        let c3 = (1.0 - eps) / 3.0;
        // outer segment: v = c2 + c3 / r - eps r²/6, so v'(r) = -c3/r² - eps r/3
        let r = 1.1;
        assert!((sol3.derivative(r) - (-c3 / (r * r) - eps * r / 3.0)).abs() < 1e-12);
        let c2 = (1.0 + 7.0 * eps) / (6.0 * 2f64.cbrt());
        assert!((sol3.value(r) - (c2 + c3 / r - eps * r * r / 6.0)).abs() < 1e-12);
    }

    #[test]
    fn phi_of_quadratic_profile() {
        let radius = 1.3;
        let v_m = 0.2;
        let sol = RadialSolution::with_boundary_value(unit_load_disk(radius), v_m);
        let phi = sol.phi_curve().unwrap();
        let top = v_m + radius * radius / 4.0;
        for k in 1..20 {
            let t = v_m + (top - v_m) * k as f64 / 20.0;
            let exact = PI * (radius * radius - 4.0 * (t - v_m));
            assert!((phi.measure_above(t) - exact).abs() < 1e-13);
        }
        assert_eq!(phi.measure_above(0.1), PI * radius * radius);
        assert_eq!(phi.measure_above(top + 0.1), 0.0);
    }

    #[test]
    fn c1_matching_at_breakpoints() {
        let sol = RadialSolution::with_boundary_value(two_balls(0.3), 0.4);
        for (_, jv, jd) in sol.breakpoint_jumps() {
            assert!(jv <= 1e-12 && jd <= 1e-12);
        }
        assert!((sol.derivative(sol.problem().radius()) - sol.problem().c_star()).abs() < 1e-10);
    }

    #[test]
    fn identity_closes_with_isoperimetric_constant() {
        let sol = RadialSolution::with_boundary_value(unit_load_disk(1.0), 0.1);
        let grid: Vec<f64> = (1..100).map(|k| k as f64 * 0.4 / 100.0).collect();
        let check = check_fundamental_identity(&sol, &grid).unwrap();
        assert!(check.isoperimetric <= 1e-8, "{check:?}");
        assert!(check.negative_exponent > 1e-2);
        assert_eq!(check.closing(), GammaNormalization::Isoperimetric);
        assert!((GammaNormalization::Isoperimetric.value::<f64>(2) - 4.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn negative_boundary_value_is_not_positive() {
        let sol = RadialSolution::with_boundary_value(unit_load_disk(1.0), -0.1);
        assert!(sol.phi_curve().is_err());
    }

    #[test]
    fn single_precision_profile() {
        let f = SampledFunction::<f32>::from_pairs([(1.0, std::f32::consts::PI)]).unwrap();
        let p = SymmetrizedProblem::new(decreasing_rearrangement(&f), 2).unwrap();
        let sol = solve(&p, NormalizationCondition::Trace, 0.0).unwrap();
        assert!((sol.value(0.5) - 0.1875).abs() < 1e-6);
    }
}
