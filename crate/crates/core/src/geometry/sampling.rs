//! Cell sampling of catalog cases and their analytic level-set data.

use super::{radial_value, ClosedForm, ExampleCase, Load, Shape};
use crate::curve::SmoothDistribution;
use crate::error::{domain, Error, Result};
use crate::grid::{assemble_and_solve, cell_counts, DiscreteSolution, Gauge, NeumannData, RectGrid};
use crate::measure::{Cell, SampledFunction};
use crate::scalar::{sphere_area, unit_ball_measure};

/// Paired cell samples of `u` and `f` over the same decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainSample {
    pub u: SampledFunction<f64>,
    pub f: SampledFunction<f64>,
}

/// Superlevel-set data `U_t = {u > t}` of a ball union at one level.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSetData {
    pub mu: f64,
    pub mu_prime: f64,
    /// Area of `∂U_t` inside `Ω`.
    pub perimeter_internal: f64,
    /// Area of `∂U_t ∩ ∂Ω_j`, per component.
    pub perimeter_external: Vec<f64>,
}

/// `(ρ, L, τ)` of every ball, or an error naming the offending shape.
fn ball_data(case: &ExampleCase) -> Result<Vec<(f64, f64, f64)>> {
    case.components
        .iter()
        .map(|c| match (&c.shape, c.solution) {
            (Shape::Ball { radius, .. }, ClosedForm::Radial { trace, load }) => Ok((*radius, load, trace)),
            _ => Err(Error::Unsupported(format!(
                "{}: analytic level sets are available for ball unions only",
                case.id
            ))),
        })
        .collect()
}

/// `sqrt(x)^n` for `x >= 0`.
fn radius_power(x: f64, n: usize) -> f64 {
    x.max(0.0).sqrt().powi(n as i32)
}

impl ExampleCase {
    /// Samples `u` and `f` on a cell decomposition of `Ω`.
    ///
    /// Balls are cut into `resolution²` shells of equal measure, with values
    /// taken at the radius bisecting each shell's measure (angular cells are
    /// merged since both functions are radial on each ball). Rectangles use
    /// near-square cells with `resolution` cells along the longer side;
    /// `u` is taken at centroids and `f` is averaged exactly over each cell.
    pub fn sample_domain(&self, resolution: usize) -> Result<DomainSample> {
        if resolution < 16 {
            return domain(format!("sampling resolution must be at least 16, got {resolution}"));
        }
        let mut u_cells = Vec::new();
        let mut f_cells = Vec::new();
        let n = self.dim;
        for c in &self.components {
            match (&c.shape, c.solution) {
                (Shape::Ball { radius, .. }, ClosedForm::Radial { trace, load }) => {
                    let shells = resolution * resolution;
                    let m = c.measure(n) / shells as f64;
                    let l = match c.load {
                        Load::Constant(l) => l,
                        Load::NegSign { .. } => unreachable!("sign loads live on rectangles"),
                    };
                    for i in 0..shells {
                        // r² at the measure midpoint of the shell
                        let frac = (i as f64 + 0.5) / shells as f64;
                        let r2 = radius * radius * frac.powf(2.0 / n as f64);
                        u_cells.push(Cell::new(radial_value(n, *radius, trace, load, r2), m));
                        f_cells.push(Cell::new(l, m));
                    }
                }
                (Shape::Rect { x, y }, _) => {
                    let (nx, ny) = cell_counts(x.1 - x.0, y.1 - y.0, resolution);
                    let hx = (x.1 - x.0) / nx as f64;
                    let hy = (y.1 - y.0) / ny as f64;
                    for j in 0..ny {
                        let (y0, y1) = (y.0 + hy * j as f64, y.0 + hy * (j + 1) as f64);
                        for i in 0..nx {
                            let (x0, x1) = (x.0 + hx * i as f64, x.0 + hx * (i + 1) as f64);
                            let centroid = [0.5 * (x0 + x1), 0.5 * (y0 + y1)];
                            u_cells.push(Cell::new(c.eval_u(2, &centroid), hx * hy));
                            f_cells.push(Cell::new(cell_average_load(c.load, (x0, x1), (y0, y1)), hx * hy));
                        }
                    }
                }
                (Shape::Ball { .. }, ClosedForm::SignedQuadratic { .. }) => {
                    unreachable!("balls carry radial closed forms")
                }
            }
        }
        let total = self.measure();
        Ok(DomainSample {
            u: SampledFunction::with_total(u_cells, total)?,
            f: SampledFunction::with_total(f_cells, total)?,
        })
    }

    /// Analytic distribution function of `|u|`, where one is available:
    /// positive ball unions and the centred rectangle.
    pub fn u_distribution(&self) -> Result<SmoothDistribution<f64>> {
        if self.is_ball_union() {
            if !self.is_positive() {
                return Err(Error::Hypothesis(format!("{}: u changes sign", self.id)));
            }
            let balls = ball_data(self)?;
            let n = self.dim;
            let omega = unit_ball_measure::<f64>(n);
            let two_n = 2.0 * n as f64;
            let tops: Vec<f64> = balls.iter().map(|&(rho, l, tau)| tau + l * rho * rho / two_n).collect();
            let max = tops.iter().copied().fold(0.0, f64::max);
            let critical: Vec<f64> = balls.iter().map(|b| b.2).chain(tops.iter().copied()).collect();
            let mu = move |t: f64| {
                balls
                    .iter()
                    .map(|&(rho, l, tau)| {
                        if t < tau {
                            omega * rho.powi(n as i32)
                        } else if l > 0.0 {
                            omega * radius_power(rho * rho - two_n * (t - tau) / l, n)
                        } else {
                            0.0
                        }
                    })
                    .sum()
            };
            return SmoothDistribution::from_critical_levels(critical, max, self.measure(), mu);
        }
        match (self.id, self.a) {
            (super::CaseId::ZeroMeanRect, Some(a)) => {
                // |u| > t on a band of height sqrt(a² - 8t) in each half, width 1/a
                SmoothDistribution::new(vec![0.0, a * a / 8.0], 1.0, move |t: f64| (a * a - 8.0 * t).max(0.0).sqrt() / a)
            }
            _ => Err(Error::Unsupported(format!(
                "{}: no analytic distribution; use the sampled pipeline",
                self.id
            ))),
        }
    }

    /// `μ(t)`, `μ'(t)` and the split of `∂U_t` for a positive ball union.
    ///
    /// `t` must avoid the traces and maxima of the components, where `μ'`
    /// jumps.
    pub fn level_set_data(&self, t: f64) -> Result<LevelSetData> {
        let balls = ball_data(self)?;
        if !self.is_positive() {
            return Err(Error::Hypothesis(format!("{}: u changes sign", self.id)));
        }
        let n = self.dim;
        let omega = unit_ball_measure::<f64>(n);
        let two_n = 2.0 * n as f64;
        let mut out = LevelSetData {
            mu: 0.0,
            mu_prime: 0.0,
            perimeter_internal: 0.0,
            perimeter_external: vec![0.0; balls.len()],
        };
        for (j, &(rho, l, tau)) in balls.iter().enumerate() {
            if t < tau {
                out.mu += omega * rho.powi(n as i32);
                out.perimeter_external[j] = sphere_area(n, rho);
                continue;
            }
            if l <= 0.0 {
                continue;
            }
            let r2 = rho * rho - two_n * (t - tau) / l;
            if r2 <= 0.0 {
                continue;
            }
            let r = r2.sqrt();
            out.mu += omega * r.powi(n as i32);
            out.mu_prime -= (n * n) as f64 * omega * r.powi(n as i32 - 2) / l;
            out.perimeter_internal += sphere_area(n, r);
        }
        Ok(out)
    }
}

impl ExampleCase {
    /// Finite-volume solution on a single-rectangle case with near-square
    /// cells, `resolution` along the longer side, exact cell-averaged load and
    /// the component's uniform Neumann datum.
    pub fn solve_fd(&self, resolution: usize, gauge: Gauge) -> Result<DiscreteSolution> {
        let [c] = self.components.as_slice() else {
            return Err(Error::Unsupported(format!("{}: the grid solver takes a single rectangle", self.id)));
        };
        let Shape::Rect { x, y } = c.shape else {
            return Err(Error::Unsupported(format!("{}: the grid solver takes rectangles only", self.id)));
        };
        let grid = RectGrid::near_square(x, y, resolution)?;
        let f = grid.cell_field(|xb, yb| cell_average_load(c.load, xb, yb));
        assemble_and_solve(&grid, &f, NeumannData::uniform(c.neumann), gauge)
    }
}

/// Exact mean of the load over `[x0, x1] × [y0, y1]`.
fn cell_average_load(load: Load, x: (f64, f64), y: (f64, f64)) -> f64 {
    // mean of sgn over [a, b] is (|b| - |a|) / (b - a)
    let mean_sgn = |iv: (f64, f64)| (iv.1.abs() - iv.0.abs()) / (iv.1 - iv.0);
    match load {
        Load::Constant(l) => l,
        Load::NegSign { with_x } => -(mean_sgn(y) + if with_x { mean_sgn(x) } else { 0.0 }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BallSpec;
    use crate::lorentz::lp_norm_pow;
    use crate::measure::{distribution, LevelMeasure};
    use std::f64::consts::PI;

    #[test]
    fn disk_sample_norm() {
        let eps = 0.01;
        let case = ExampleCase::two_disks_l2(eps).unwrap();
        let s = case.sample_domain(512).unwrap();
        assert!((s.u.total_measure() - 2.0 * PI).abs() < 1e-10);
        // ∫ over B_1 of (5 - r²)/4 is 9π/8; over B_2 of ε(1 - r²)/4 is επ/8
        let exact = 9.0 * PI / 8.0 + eps * PI / 8.0;
        assert!((s.u.abs_power_integral(1.0) - exact).abs() < 1e-4 * exact);
        let fd = distribution(&s.f);
        assert_eq!(fd.breakpoints(), &[eps, 1.0]);
        assert!((fd.plateau_measures()[1] - PI).abs() < 1e-10);
        assert!((fd.plateau_measures()[0] - 2.0 * PI).abs() < 1e-10);
    }

    #[test]
    fn dense_sample_matches_analytic_curve() {
        let case = ExampleCase::ball_cluster(2, &[BallSpec { radius: 1.0, load: 1.0, trace: 1.0 }]).unwrap();
        let sampled = distribution(&case.sample_domain(1000).unwrap().u);
        for k in 1..50 {
            let t = 1.0 + 0.25 * k as f64 / 50.0;
            let exact = PI * (5.0 - 4.0 * t);
            assert!((sampled.measure_above(t) - exact).abs() <= 1e-3 * exact);
        }
    }

    #[test]
    fn analytic_norms_match_closed_forms() {
        let eps = 0.1;
        let case = ExampleCase::two_balls_3d(eps).unwrap();
        let d = case.u_distribution().unwrap();
        let exact = 64.0 * PI / 45.0 + 4.0 * PI * eps / 45.0;
        assert!((lp_norm_pow(&d, 1.0).unwrap() - exact).abs() <= 1e-12 * exact);
        let a = 4.0;
        let z = ExampleCase::zero_mean_rect(a).unwrap().u_distribution().unwrap();
        assert!((lp_norm_pow(&z, 1.0).unwrap() - a * a / 12.0).abs() < 1e-12);
        assert!(ExampleCase::shifted_rect(2.0, 0.1).unwrap().u_distribution().is_err());
    }

    #[test]
    fn rectangle_samples() {
        let case = ExampleCase::shifted_rect(2.0, 0.03).unwrap();
        let s = case.sample_domain(64).unwrap();
        assert!((s.u.total_measure() - case.measure()).abs() < 1e-12);
        assert!((s.f.integral() - case.load_integral()).abs() < 1e-12);
        assert!(case.sample_domain(8).is_err());
    }

    #[test]
    fn level_sets_of_two_disks() {
        let eps = 0.2;
        let case = ExampleCase::two_disks_l2(eps).unwrap();
        let inner = case.level_set_data(1.1).unwrap();
        assert!((inner.mu - PI * (5.0 - 4.4)).abs() < 1e-13);
        assert!((inner.mu_prime + 4.0 * PI).abs() < 1e-13);
        assert_eq!(inner.perimeter_external, vec![0.0, 0.0]);
        let whole = case.level_set_data(0.5).unwrap();
        assert!((whole.mu - PI).abs() < 1e-15);
        assert!((whole.perimeter_external[0] - 2.0 * PI).abs() < 1e-15);
        let empty = case.level_set_data(2.0).unwrap();
        assert_eq!(empty.mu, 0.0);
        assert!(ExampleCase::zero_mean_rect(1.0).unwrap().level_set_data(0.1).is_err());
    }
}
