//! Cell-centred finite-volume solver for the Neumann Poisson problem on a rectangle.
//!
//! Unknowns live at cell centroids. Interior faces use the two-point flux
//! `(u_N - u_P) / h`, boundary faces carry the prescribed flux `c` (the
//! ghost-cell closure), so the stencil is the 5-point Laplacian. The system
//! `A u = b` is singular with the constants as kernel; it is solved by
//! conjugate gradients on the mean-zero complement, and the additive constant
//! is fixed afterwards by a [`Gauge`].

use std::io::{self, Write};

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::measure::{Cell, SampledFunction};
use crate::scalar::compensated_sum;

const COMPATIBILITY_TOL: f64 = 1e-8;
const RESIDUAL_TOL: f64 = 1e-10;

/// `(nx, ny)` with near-square cells, `resolution` cells along the longer
/// side and at least 8 along each side.
pub fn cell_counts(width: f64, height: f64, resolution: usize) -> (usize, usize) {
    let resolution = resolution.max(8);
    if width >= height {
        let ny = ((resolution as f64) * height / width).round() as usize;
        (resolution, ny.max(8))
    } else {
        let nx = ((resolution as f64) * width / height).round() as usize;
        (nx.max(8), resolution)
    }
}

/// Uniform `nx × ny` partition of `(x0, x1) × (y0, y1)`, cells in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct RectGrid {
    x: (f64, f64),
    y: (f64, f64),
    nx: usize,
    ny: usize,
}

impl RectGrid {
    pub fn new(x: (f64, f64), y: (f64, f64), nx: usize, ny: usize) -> Result<Self> {
        if !(x.1 > x.0) || !(y.1 > y.0) || !(x.1 - x.0).is_finite() || !(y.1 - y.0).is_finite() {
            return domain("grid intervals must be finite and non-empty");
        }
        if nx < 8 || ny < 8 {
            return domain(format!("grid needs at least 8 cells per direction, got {nx} × {ny}"));
        }
        Ok(Self { x, y, nx, ny })
    }

    /// Grid with near-square cells and `resolution` cells along the longer side.
    pub fn near_square(x: (f64, f64), y: (f64, f64), resolution: usize) -> Result<Self> {
        let (nx, ny) = cell_counts(x.1 - x.0, y.1 - y.0, resolution);
        Self::new(x, y, nx, ny)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn x_interval(&self) -> (f64, f64) {
        self.x
    }

    pub fn y_interval(&self) -> (f64, f64) {
        self.y
    }

    pub fn hx(&self) -> f64 {
        (self.x.1 - self.x.0) / self.nx as f64
    }

    pub fn hy(&self) -> f64 {
        (self.y.1 - self.y.0) / self.ny as f64
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_measure(&self) -> f64 {
        self.hx() * self.hy()
    }

    pub fn total_measure(&self) -> f64 {
        (self.x.1 - self.x.0) * (self.y.1 - self.y.0)
    }

    pub fn perimeter(&self) -> f64 {
        2.0 * ((self.x.1 - self.x.0) + (self.y.1 - self.y.0))
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    /// `[x0, x1] × [y0, y1]` of cell `(i, j)`.
    pub fn cell_bounds(&self, i: usize, j: usize) -> ((f64, f64), (f64, f64)) {
        let (hx, hy) = (self.hx(), self.hy());
        let x0 = self.x.0 + hx * i as f64;
        let y0 = self.y.0 + hy * j as f64;
        let x1 = if i + 1 == self.nx { self.x.1 } else { x0 + hx };
        let y1 = if j + 1 == self.ny { self.y.1 } else { y0 + hy };
        ((x0, x1), (y0, y1))
    }

    pub fn centroid(&self, i: usize, j: usize) -> (f64, f64) {
        let ((x0, x1), (y0, y1)) = self.cell_bounds(i, j);
        (0.5 * (x0 + x1), 0.5 * (y0 + y1))
    }

    /// Row-major field from a function of the cell bounds.
    pub fn cell_field(&self, f: impl Fn((f64, f64), (f64, f64)) -> f64 + Sync) -> Vec<f64> {
        (0..self.len())
            .into_par_iter()
            .map(|k| {
                let (xb, yb) = self.cell_bounds(k % self.nx, k / self.nx);
                f(xb, yb)
            })
            .collect()
    }

    /// Row-major field of point values at centroids.
    pub fn centroid_field(&self, f: impl Fn(f64, f64) -> f64 + Sync) -> Vec<f64> {
        self.cell_field(|xb, yb| f(0.5 * (xb.0 + xb.1), 0.5 * (yb.0 + yb.1)))
    }
}

/// Outward normal derivative prescribed on each side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeumannData {
    pub left: f64,
    pub right: f64,
    pub bottom: f64,
    pub top: f64,
}

impl NeumannData {
    pub fn uniform(c: f64) -> Self {
        Self { left: c, right: c, bottom: c, top: c }
    }
}

/// Functional that pins the additive constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gauge {
    /// `∫_Ω u = 0`.
    MeanZeroInterior,
    /// `∫_{∂Ω} u = 0`, with face values `u_P + c h / 2`.
    MeanZeroTrace,
}

/// Solution of the discrete problem.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSolution {
    grid: RectGrid,
    values: Vec<f64>,
    gauge: Gauge,
    neumann: NeumannData,
    iterations: usize,
    residual: f64,
    compatibility_residual: f64,
}

impl DiscreteSolution {
    pub fn grid(&self) -> &RectGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn gauge(&self) -> Gauge {
        self.gauge
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// `‖A u - b‖_∞ / ‖b‖_∞` at exit.
    pub fn relative_residual(&self) -> f64 {
        self.residual
    }

    /// `Σ b`, the discrete flux balance before projection.
    pub fn compatibility_residual(&self) -> f64 {
        self.compatibility_residual
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    /// `Σ u · cell measure`.
    pub fn interior_integral(&self) -> f64 {
        compensated_sum(self.values.iter().copied()) * self.grid.cell_measure()
    }

    /// `∫_{∂Ω} u` from ghost-cell face values.
    pub fn trace_integral(&self) -> f64 {
        trace_integral(&self.grid, &self.values, &self.neumann)
    }

    /// The gauge functional; zero up to rounding.
    pub fn gauge_value(&self) -> f64 {
        match self.gauge {
            Gauge::MeanZeroInterior => self.interior_integral(),
            Gauge::MeanZeroTrace => self.trace_integral(),
        }
    }

    /// Cells as a sampled function over the rectangle.
    pub fn sampled(&self) -> Result<SampledFunction<f64>> {
        let m = self.grid.cell_measure();
        SampledFunction::with_total(
            self.values.iter().map(|&v| Cell::new(v, m)).collect(),
            self.grid.total_measure(),
        )
    }

    /// `max |u_h - u(centroid)|`.
    pub fn max_error(&self, exact: impl Fn(f64, f64) -> f64 + Sync) -> f64 {
        let reference = self.grid.centroid_field(exact);
        self.values
            .iter()
            .zip(&reference)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `x,y,u` rows at centroids.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "x,y,u")?;
        for j in 0..self.grid.ny {
            for i in 0..self.grid.nx {
                let (x, y) = self.grid.centroid(i, j);
                writeln!(w, "{x:.12e},{y:.12e},{:.12e}", self.value(i, j))?;
            }
        }
        Ok(())
    }
}

/// `Σ |u| · cell measure`.
pub fn l1_norm(sol: &DiscreteSolution) -> f64 {
    compensated_sum(sol.values.iter().map(|v| v.abs())) * sol.grid.cell_measure()
}

fn trace_integral(grid: &RectGrid, u: &[f64], c: &NeumannData) -> f64 {
    let (hx, hy) = (grid.hx(), grid.hy());
    let mut terms = Vec::with_capacity(2 * (grid.nx + grid.ny));
    for i in 0..grid.nx {
        terms.push((u[grid.index(i, 0)] + c.bottom * hy / 2.0) * hx);
        terms.push((u[grid.index(i, grid.ny - 1)] + c.top * hy / 2.0) * hx);
    }
    for j in 0..grid.ny {
        terms.push((u[grid.index(0, j)] + c.left * hx / 2.0) * hy);
        terms.push((u[grid.index(grid.nx - 1, j)] + c.right * hx / 2.0) * hy);
    }
    compensated_sum(terms)
}

/// `A u` for the symmetric finite-volume operator.
fn apply(grid: &RectGrid, u: &[f64], out: &mut [f64]) {
    let (nx, ny) = (grid.nx, grid.ny);
    // face length over centroid distance
    let wx = grid.hy() / grid.hx();
    let wy = grid.hx() / grid.hy();
    out.par_chunks_mut(nx).enumerate().for_each(|(j, row)| {
        for (i, slot) in row.iter_mut().enumerate() {
            let k = j * nx + i;
            let p = u[k];
            let mut acc = 0.0;
            if i > 0 {
                acc += wx * (p - u[k - 1]);
            }
            if i + 1 < nx {
                acc += wx * (p - u[k + 1]);
            }
            if j > 0 {
                acc += wy * (p - u[k - nx]);
            }
            if j + 1 < ny {
                acc += wy * (p - u[k + nx]);
            }
            *slot = acc;
        }
    });
}

/// Deterministic parallel dot product: rows in parallel, rows summed in order.
fn dot(a: &[f64], b: &[f64], row: usize) -> f64 {
    let partial: Vec<f64> = a
        .par_chunks(row)
        .zip(b.par_chunks(row))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>())
        .collect();
    partial.iter().sum()
}

fn remove_mean(v: &mut [f64]) {
    let mean = compensated_sum(v.iter().copied()) / v.len() as f64;
    v.par_iter_mut().for_each(|x| *x -= mean);
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Solves `-Δu = f` with outward flux `c` per side.
///
/// `f` holds one cell average per cell in row-major order.
pub fn assemble_and_solve(grid: &RectGrid, f: &[f64], c: NeumannData, gauge: Gauge) -> Result<DiscreteSolution> {
    let n = grid.len();
    if f.len() != n {
        return domain(format!("load has {} entries for {n} cells", f.len()));
    }
    let (nx, ny) = (grid.nx, grid.ny);
    let (hx, hy) = (grid.hx(), grid.hy());
    let area = grid.cell_measure();
    let mut b: Vec<f64> = f.iter().map(|v| v * area).collect();
    for i in 0..nx {
        b[grid.index(i, 0)] += c.bottom * hx;
        b[grid.index(i, ny - 1)] += c.top * hx;
    }
    for j in 0..ny {
        b[grid.index(0, j)] += c.left * hy;
        b[grid.index(nx - 1, j)] += c.right * hy;
    }
    let balance = compensated_sum(b.iter().copied());
    let scale = compensated_sum(b.iter().map(|v| v.abs())).max(f64::MIN_POSITIVE);
    if balance.abs() > COMPATIBILITY_TOL * scale.max(1.0) {
        return Err(Error::Compatibility { residual: balance });
    }
    remove_mean(&mut b);
    let b_norm = max_abs(&b);

    let mut u = vec![0.0; n];
    let mut iterations = 0;
    let mut residual = 0.0;
    if b_norm > 0.0 {
        let max_iter = 20 * (nx + ny);
        let mut r = b.clone();
        let mut p = r.clone();
        let mut ap = vec![0.0; n];
        let mut rr = dot(&r, &r, nx);
        loop {
            residual = max_abs(&r) / b_norm;
            if residual <= RESIDUAL_TOL {
                break;
            }
            if iterations >= max_iter {
                return Err(Error::NotConverged { iterations, residual });
            }
            apply(grid, &p, &mut ap);
            let alpha = rr / dot(&p, &ap, nx);
            u.par_iter_mut().zip(&p).for_each(|(x, d)| *x += alpha * d);
            r.par_iter_mut().zip(&ap).for_each(|(x, d)| *x -= alpha * d);
            remove_mean(&mut r);
            let rr_next = dot(&r, &r, nx);
            let beta = rr_next / rr;
            rr = rr_next;
            p.par_iter_mut().zip(&r).for_each(|(d, x)| *d = x + beta * *d);
            iterations += 1;
        }
        // confirm with the true residual
        apply(grid, &u, &mut ap);
        let true_res = ap.iter().zip(&b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / b_norm;
        residual = residual.max(true_res);
        if true_res > 10.0 * RESIDUAL_TOL {
            return Err(Error::NotConverged { iterations, residual: true_res });
        }
    }

    let shift = match gauge {
        Gauge::MeanZeroInterior => compensated_sum(u.iter().copied()) / n as f64,
        Gauge::MeanZeroTrace => trace_integral(grid, &u, &c) / grid.perimeter(),
    };
    u.par_iter_mut().for_each(|x| *x -= shift);
    Ok(DiscreteSolution {
        grid: grid.clone(),
        values: u,
        gauge,
        neumann: c,
        iterations,
        residual,
        compatibility_residual: balance,
    })
}

/// Least-squares slope of `ln err` against `ln h`.
pub fn convergence_slope(h: &[f64], err: &[f64]) -> f64 {
    let xs: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = err.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Errors of the manufactured problem `u = cos(πx) cos(πy)` on the unit
/// square under refinement.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub h: Vec<f64>,
    pub errors: Vec<f64>,
    pub slope: f64,
}

/// Solves `-Δu = 2π² cos(πx) cos(πy)` with zero flux on `n × n` grids and
/// measures the max-norm error at centroids.
pub fn manufactured_study(sizes: &[usize]) -> Result<ConvergenceStudy> {
    use std::f64::consts::PI;
    if sizes.len() < 2 {
        return domain("a convergence study needs at least two grids");
    }
    let mut h = Vec::with_capacity(sizes.len());
    let mut errors = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let grid = RectGrid::new((0.0, 1.0), (0.0, 1.0), n, n)?;
        // point values: cell averages of a cosine mode make the scheme exact at centroids
        let f = grid.centroid_field(|x, y| 2.0 * PI * PI * (PI * x).cos() * (PI * y).cos());
        let sol = assemble_and_solve(&grid, &f, NeumannData::uniform(0.0), Gauge::MeanZeroInterior)?;
        h.push(grid.hx());
        errors.push(sol.max_error(|x, y| (PI * x).cos() * (PI * y).cos()));
    }
    let slope = convergence_slope(&h, &errors);
    Ok(ConvergenceStudy { h, errors, slope })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manufactured_solution_converges_at_second_order() {
        let study = manufactured_study(&[32, 64, 128]).unwrap();
        assert!((study.slope - 2.0).abs() <= 0.1, "{study:?}");
        assert!(manufactured_study(&[32]).is_err());
    }

    #[test]
    fn constant_load_is_compatible() {
        let grid = RectGrid::new((0.0, 1.0), (0.0, 1.0), 16, 16).unwrap();
        let f = vec![1.0; grid.len()];
        let c = NeumannData::uniform(-grid.total_measure() / grid.perimeter());
        let sol = assemble_and_solve(&grid, &f, c, Gauge::MeanZeroInterior).unwrap();
        assert!(sol.compatibility_residual().abs() < 1e-12);
        assert!(sol.gauge_value().abs() < 1e-10);
        // u = -((x - 1/2)² + (y - 1/2)²)/4 solves -Δu = 1 with these data; its mean is -1/24
        let err = sol.max_error(|x, y| -((x - 0.5).powi(2) + (y - 0.5).powi(2)) / 4.0 + 1.0 / 24.0);
        assert!(err < 1e-3, "{err}");
    }

    #[test]
    fn incompatible_data_is_rejected() {
        let grid = RectGrid::new((0.0, 1.0), (0.0, 1.0), 8, 8).unwrap();
        let f = vec![1.0; grid.len()];
        let err = assemble_and_solve(&grid, &f, NeumannData::uniform(0.0), Gauge::MeanZeroInterior).unwrap_err();
        assert!(matches!(err, Error::Compatibility { residual } if (residual - 1.0).abs() < 1e-12));
    }

    #[test]
    fn gauges_differ_by_a_constant() {
        let grid = RectGrid::new((-1.0, 1.0), (-0.5, 0.5), 24, 12).unwrap();
        let f = grid.centroid_field(|x, y| x * y + x);
        let c = NeumannData::uniform(0.0);
        let a = assemble_and_solve(&grid, &f, c, Gauge::MeanZeroInterior).unwrap();
        let b = assemble_and_solve(&grid, &f, c, Gauge::MeanZeroTrace).unwrap();
        assert!(b.trace_integral().abs() < 1e-10);
        let shift = b.values()[0] - a.values()[0];
        assert!(a.values().iter().zip(b.values()).all(|(x, y)| (y - x - shift).abs() < 1e-9));
    }

    #[test]
    fn l1_of_simple_fields() {
        let grid = RectGrid::new((0.0, 1.0), (0.0, 1.0), 8, 8).unwrap();
        let zero = assemble_and_solve(&grid, &vec![0.0; 64], NeumannData::uniform(0.0), Gauge::MeanZeroInterior).unwrap();
        assert_eq!(l1_norm(&zero), 0.0);
        assert_eq!(zero.iterations(), 0);
    }

    #[test]
    fn cell_counts_are_near_square() {
        assert_eq!(cell_counts(1.0, 1.0, 512), (512, 512));
        assert_eq!(cell_counts(0.125, 8.0, 512), (8, 512));
        assert_eq!(cell_counts(2.0, 0.5, 64), (64, 16));
        assert!(RectGrid::new((0.0, 1.0), (0.0, 1.0), 4, 8).is_err());
    }
}
