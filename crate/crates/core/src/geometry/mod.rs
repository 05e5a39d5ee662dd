//! Catalog of worked configurations with closed-form solutions.
//!
//! Each [`ExampleCase`] is a finite union of balls or a single rectangle,
//! carrying the load `f`, a constant Neumann datum per component, and the
//! closed-form solution `u`. Ball components use
//! `u = τ + L (ρ² - |x - x_0|²) / (2n)` with constant load `L`, so the trace is
//! `τ` and the datum is `c = -L ρ / n`. Rectangle components use sums of
//! `s |s| / 2 - β s` in each coordinate.

mod sampling;

pub use sampling::{DomainSample, LevelSetData};

use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::measure::{decreasing_rearrangement, SampledFunction, StepRearrangement};
use crate::radial::{NormalizationCondition, SymmetrizedProblem};
use crate::scalar::{compensated_sum, sphere_area, unit_ball_measure};

const BOUNDARY_SLACK: f64 = 1e-12;
const COMPATIBILITY_TOL: f64 = 1e-10;

/// Identifier of a catalog entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseId {
    /// Two unit disks, loads `1` and `ε`, traces `1` and `0`.
    TwoDisksL2,
    /// The same configuration with unit balls in three dimensions.
    TwoBalls3D,
    /// The two-disk configuration, normalized through squared traces.
    TwoDisksL6,
    /// Rectangle with load `-(sgn x + sgn y)` and datum `-ε`, shifted off centre.
    ShiftedRect,
    /// Centred rectangle of unit area with load `-sgn y` and datum `0`.
    ZeroMeanRect,
    /// Any finite union of disjoint balls with constant loads.
    BallCluster,
}

impl CaseId {
    /// Catalog number, for the five fixed configurations.
    pub fn number(self) -> Option<u8> {
        match self {
            Self::TwoDisksL2 => Some(1),
            Self::TwoBalls3D => Some(2),
            Self::TwoDisksL6 => Some(3),
            Self::ShiftedRect => Some(4),
            Self::ZeroMeanRect => Some(5),
            Self::BallCluster => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::TwoDisksL2 => "two-disks-l2",
            Self::TwoBalls3D => "two-balls-3d",
            Self::TwoDisksL6 => "two-disks-l6",
            Self::ShiftedRect => "shifted-rect",
            Self::ZeroMeanRect => "zero-mean-rect",
            Self::BallCluster => "ball-cluster",
        }
    }

    pub fn from_number(k: u8) -> Option<Self> {
        match k {
            1 => Some(Self::TwoDisksL2),
            2 => Some(Self::TwoBalls3D),
            3 => Some(Self::TwoDisksL6),
            4 => Some(Self::ShiftedRect),
            5 => Some(Self::ZeroMeanRect),
            _ => None,
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CaseId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Ok(k) = s.parse::<u8>() {
            if let Some(id) = Self::from_number(k) {
                return Ok(id);
            }
        }
        [
            Self::TwoDisksL2,
            Self::TwoBalls3D,
            Self::TwoDisksL6,
            Self::ShiftedRect,
            Self::ZeroMeanRect,
            Self::BallCluster,
        ]
        .into_iter()
        .find(|id| id.name() == s)
        .ok_or_else(|| Error::Domain(format!("unknown case id '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Ball { center: Vec<f64>, radius: f64 },
    /// `(x0, x1) × (y0, y1)` in the plane.
    Rect { x: (f64, f64), y: (f64, f64) },
}

/// Load on one component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Load {
    Constant(f64),
    /// `-(sgn y + sgn x)` when `with_x`, else `-sgn y`.
    NegSign { with_x: bool },
}

/// Closed-form solution on one component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedForm {
    /// `trace + load (ρ² - r²) / (2n)` about the ball centre.
    Radial { trace: f64, load: f64 },
    /// `y|y|/2 - β y + [x|x|/2 - α x] + shift`, the bracket present iff `alpha` is set.
    SignedQuadratic { alpha: Option<f64>, beta: f64, shift: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentSpec {
    pub shape: Shape,
    pub load: Load,
    /// Neumann datum `c_j` on the boundary of this component.
    pub neumann: f64,
    pub solution: ClosedForm,
}

impl ComponentSpec {
    pub fn measure(&self, dim: usize) -> f64 {
        match &self.shape {
            Shape::Ball { radius, .. } => unit_ball_measure::<f64>(dim) * radius.powi(dim as i32),
            Shape::Rect { x, y } => (x.1 - x.0) * (y.1 - y.0),
        }
    }

    pub fn perimeter(&self, dim: usize) -> f64 {
        match &self.shape {
            Shape::Ball { radius, .. } => sphere_area(dim, *radius),
            Shape::Rect { x, y } => 2.0 * ((x.1 - x.0) + (y.1 - y.0)),
        }
    }

    /// `∫ f` over the component.
    pub fn load_integral(&self, dim: usize) -> f64 {
        match (&self.shape, self.load) {
            (_, Load::Constant(l)) => l * self.measure(dim),
            (Shape::Rect { x, y }, Load::NegSign { with_x }) => {
                let sy = (x.1 - x.0) * (y.1.abs() - y.0.abs());
                let sx = if with_x { (y.1 - y.0) * (x.1.abs() - x.0.abs()) } else { 0.0 };
                -(sy + sx)
            }
            (Shape::Ball { .. }, Load::NegSign { .. }) => unreachable!("sign loads live on rectangles"),
        }
    }

    fn contains(&self, p: &[f64]) -> bool {
        match &self.shape {
            Shape::Ball { center, radius } => {
                let d2: f64 = p.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                d2.sqrt() <= radius * (1.0 + BOUNDARY_SLACK)
            }
            Shape::Rect { x, y } => {
                let sx = BOUNDARY_SLACK * (x.1 - x.0);
                let sy = BOUNDARY_SLACK * (y.1 - y.0);
                p[0] >= x.0 - sx && p[0] <= x.1 + sx && p[1] >= y.0 - sy && p[1] <= y.1 + sy
            }
        }
    }

    fn eval_u(&self, dim: usize, p: &[f64]) -> f64 {
        match (&self.shape, self.solution) {
            (Shape::Ball { center, radius }, ClosedForm::Radial { trace, load }) => {
                let r2: f64 = p.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                radial_value(dim, *radius, trace, load, r2)
            }
            (_, ClosedForm::SignedQuadratic { alpha, beta, shift }) => signed_quadratic(alpha, beta, shift, p[0], p[1]),
            (Shape::Rect { .. }, ClosedForm::Radial { .. }) => unreachable!("radial forms live on balls"),
        }
    }

    fn eval_f(&self, p: &[f64]) -> f64 {
        match self.load {
            Load::Constant(l) => l,
            Load::NegSign { with_x } => -(sgn(p[1]) + if with_x { sgn(p[0]) } else { 0.0 }),
        }
    }

    /// `u_max` on the component.
    fn max_value(&self, dim: usize) -> f64 {
        match (&self.shape, self.solution) {
            (Shape::Ball { radius, .. }, ClosedForm::Radial { trace, load }) => {
                trace + load.max(0.0) * radius * radius / (2.0 * dim as f64)
            }
            (Shape::Rect { x, y }, ClosedForm::SignedQuadratic { alpha, beta, shift }) => {
                let ys = critical_points(y, beta);
                let xs = if alpha.is_some() { critical_points(x, alpha.unwrap_or(0.0)) } else { vec![x.0] };
                let mut best = f64::NEG_INFINITY;
                for &px in &xs {
                    for &py in &ys {
                        best = best.max(signed_quadratic(alpha, beta, shift, px, py).abs());
                    }
                }
                best
            }
            _ => unreachable!("shape and closed form always match"),
        }
    }
}

/// `τ + L (ρ² - r²) / (2n)` from the squared distance to the centre.
pub(crate) fn radial_value(dim: usize, radius: f64, trace: f64, load: f64, r2: f64) -> f64 {
    trace + load * (radius * radius - r2) / (2.0 * dim as f64)
}

/// `s|s|/2 - β s`.
pub(crate) fn signed_part(beta: f64, s: f64) -> f64 {
    0.5 * s * s.abs() - beta * s
}

fn signed_quadratic(alpha: Option<f64>, beta: f64, shift: f64, x: f64, y: f64) -> f64 {
    signed_part(beta, y) + alpha.map_or(0.0, |al| signed_part(al, x)) + shift
}

fn sgn(s: f64) -> f64 {
    if s > 0.0 {
        1.0
    } else if s < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Interval endpoints together with the interior extrema `±β` of `s|s|/2 - βs`.
fn critical_points(iv: &(f64, f64), beta: f64) -> Vec<f64> {
    let mut pts = vec![iv.0, iv.1];
    pts.extend([beta, -beta].into_iter().filter(|s| *s > iv.0 && *s < iv.1));
    pts
}

/// One of the catalogued configurations.
#[derive(Debug, Clone, PartialEq)]
pub struct ExampleCase {
    id: CaseId,
    dim: usize,
    eps: Option<f64>,
    a: Option<f64>,
    components: Vec<ComponentSpec>,
}

fn check_param(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("parameter {name} must be finite and positive, got {x}"));
    }
    Ok(())
}

/// One ball of a cluster: radius `ρ`, constant load `L`, trace `τ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallSpec {
    pub radius: f64,
    pub load: f64,
    pub trace: f64,
}

impl ExampleCase {
    /// Unit disks with loads `1`, `ε` and traces `1`, `0`.
    pub fn two_disks_l2(eps: f64) -> Result<Self> {
        Self::two_unit_balls(CaseId::TwoDisksL2, 2, eps)
    }

    /// Unit balls in three dimensions with loads `1`, `ε` and traces `1`, `0`.
    pub fn two_balls_3d(eps: f64) -> Result<Self> {
        Self::two_unit_balls(CaseId::TwoBalls3D, 3, eps)
    }

    /// Same data as [`ExampleCase::two_disks_l2`], paired with the squared-trace condition.
    pub fn two_disks_l6(eps: f64) -> Result<Self> {
        Self::two_unit_balls(CaseId::TwoDisksL6, 2, eps)
    }

    fn two_unit_balls(id: CaseId, dim: usize, eps: f64) -> Result<Self> {
        check_param("eps", eps)?;
        let balls = [
            BallSpec { radius: 1.0, load: 1.0, trace: 1.0 },
            BallSpec { radius: 1.0, load: eps, trace: 0.0 },
        ];
        let mut case = Self::ball_cluster(dim, &balls)?;
        case.id = id;
        case.eps = Some(eps);
        Ok(case)
    }

    /// Disjoint balls placed along the first axis.
    pub fn ball_cluster(dim: usize, balls: &[BallSpec]) -> Result<Self> {
        if dim < 2 {
            return domain(format!("dimension must be at least 2, got {dim}"));
        }
        if balls.is_empty() {
            return domain("a ball cluster needs at least one ball");
        }
        let mut components = Vec::with_capacity(balls.len());
        let mut cursor = 0.0;
        for (j, b) in balls.iter().enumerate() {
            check_param("radius", b.radius)?;
            if !(b.load >= 0.0) || !b.load.is_finite() || !b.trace.is_finite() {
                return domain(format!("ball {j}: load must be non-negative and the trace finite"));
            }
            let mut center = vec![0.0; dim];
            center[0] = cursor + b.radius;
            cursor += 2.0 * b.radius + 0.5;
            components.push(ComponentSpec {
                shape: Shape::Ball { center, radius: b.radius },
                load: Load::Constant(b.load),
                neumann: -b.load * b.radius / dim as f64,
                solution: ClosedForm::Radial { trace: b.trace, load: b.load },
            });
        }
        Ok(Self { id: CaseId::BallCluster, dim, eps: None, a: None, components })
    }

    /// `(-2ε - 1/(2a), 1/(2a)) × (-2ε - a/2, a/2)`, load `-(sgn x + sgn y)`,
    /// datum `-ε`, solution shifted to zero boundary mean.
    pub fn shifted_rect(a: f64, eps: f64) -> Result<Self> {
        check_param("a", a)?;
        check_param("eps", eps)?;
        let x = (-2.0 * eps - 0.5 / a, 0.5 / a);
        let y = (-2.0 * eps - 0.5 * a, 0.5 * a);
        let (alpha, beta) = (eps + 0.5 / a, eps + 0.5 * a);
        let mut comp = ComponentSpec {
            shape: Shape::Rect { x, y },
            load: Load::NegSign { with_x: true },
            neumann: -eps,
            solution: ClosedForm::SignedQuadratic { alpha: Some(alpha), beta, shift: 0.0 },
        };
        let shift = -edge_integral(&comp, 1) / comp.perimeter(2);
        comp.solution = ClosedForm::SignedQuadratic { alpha: Some(alpha), beta, shift };
        Ok(Self { id: CaseId::ShiftedRect, dim: 2, eps: Some(eps), a: Some(a), components: vec![comp] })
    }

    /// `(-1/(2a), 1/(2a)) × (-a/2, a/2)`, load `-sgn y`, datum `0`,
    /// solution `y|y|/2 - a y / 2`.
    pub fn zero_mean_rect(a: f64) -> Result<Self> {
        check_param("a", a)?;
        let comp = ComponentSpec {
            shape: Shape::Rect { x: (-0.5 / a, 0.5 / a), y: (-0.5 * a, 0.5 * a) },
            load: Load::NegSign { with_x: false },
            neumann: 0.0,
            solution: ClosedForm::SignedQuadratic { alpha: None, beta: 0.5 * a, shift: 0.0 },
        };
        Ok(Self { id: CaseId::ZeroMeanRect, dim: 2, eps: None, a: Some(a), components: vec![comp] })
    }

    /// Catalog entry by id; `eps` and `a` are used where the entry needs them.
    pub fn from_id(id: CaseId, eps: f64, a: f64) -> Result<Self> {
        match id {
            CaseId::TwoDisksL2 => Self::two_disks_l2(eps),
            CaseId::TwoBalls3D => Self::two_balls_3d(eps),
            CaseId::TwoDisksL6 => Self::two_disks_l6(eps),
            CaseId::ShiftedRect => Self::shifted_rect(a, eps),
            CaseId::ZeroMeanRect => Self::zero_mean_rect(a),
            CaseId::BallCluster => Err(Error::Unsupported(
                "ball clusters are built from explicit ball lists".into(),
            )),
        }
    }

    pub fn id(&self) -> CaseId {
        self.id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eps(&self) -> Option<f64> {
        self.eps
    }

    pub fn a(&self) -> Option<f64> {
        self.a
    }

    pub fn components(&self) -> &[ComponentSpec] {
        &self.components
    }

    /// Condition the configuration is normally paired with.
    pub fn default_condition(&self) -> NormalizationCondition {
        match self.id {
            CaseId::TwoDisksL6 => NormalizationCondition::SquaredTrace,
            _ => NormalizationCondition::Trace,
        }
    }

    pub fn is_ball_union(&self) -> bool {
        self.components.iter().all(|c| matches!(c.shape, Shape::Ball { .. }))
    }

    /// Whether `u >= 0`: true for ball unions with non-negative traces.
    pub fn is_positive(&self) -> bool {
        self.is_ball_union()
            && self
                .components
                .iter()
                .all(|c| matches!(c.solution, ClosedForm::Radial { trace, .. } if trace >= 0.0))
    }

    /// Whether `f ≡ 1`.
    pub fn has_unit_load(&self) -> bool {
        self.components.iter().all(|c| c.load == Load::Constant(1.0))
    }

    pub fn measure(&self) -> f64 {
        compensated_sum(self.components.iter().map(|c| c.measure(self.dim)))
    }

    pub fn perimeter(&self) -> f64 {
        compensated_sum(self.components.iter().map(|c| c.perimeter(self.dim)))
    }

    pub fn load_integral(&self) -> f64 {
        compensated_sum(self.components.iter().map(|c| c.load_integral(self.dim)))
    }

    /// `ess sup |u|`.
    pub fn max_abs_value(&self) -> f64 {
        self.components.iter().map(|c| c.max_value(self.dim)).fold(0.0, f64::max)
    }

    /// `min u` over the boundary, for ball unions.
    pub fn trace_minimum(&self) -> Option<f64> {
        self.components
            .iter()
            .map(|c| match c.solution {
                ClosedForm::Radial { trace, .. } => Some(trace),
                ClosedForm::SignedQuadratic { .. } => None,
            })
            .try_fold(f64::INFINITY, |m, t| t.map(|t| m.min(t)))
    }

    fn component_at(&self, p: &[f64]) -> Result<&ComponentSpec> {
        if p.len() != self.dim {
            return domain(format!("expected a point in dimension {}, got {}", self.dim, p.len()));
        }
        self.components
            .iter()
            .find(|c| c.contains(p))
            .ok_or_else(|| Error::Domain(format!("point {p:?} lies outside the domain")))
    }

    /// `u(p)`.
    pub fn evaluate_u(&self, p: &[f64]) -> Result<f64> {
        let c = self.component_at(p)?;
        Ok(c.eval_u(self.dim, p))
    }

    /// `f(p)`, with `sgn 0 = 0`.
    pub fn evaluate_f(&self, p: &[f64]) -> Result<f64> {
        Ok(self.component_at(p)?.eval_f(p))
    }

    /// `c_j P(Ω_j) + ∫_{Ω_j} f` per component.
    pub fn compatibility_residuals(&self) -> Vec<f64> {
        self.components
            .iter()
            .map(|c| c.neumann * c.perimeter(self.dim) + c.load_integral(self.dim))
            .collect()
    }

    /// Checks every component's compatibility residual against `1e-10`.
    pub fn check_compatibility(&self) -> Result<()> {
        for (c, r) in self.components.iter().zip(self.compatibility_residuals()) {
            let scale = 1f64.max(c.load_integral(self.dim).abs());
            if r.abs() > COMPATIBILITY_TOL * scale {
                return Err(Error::Compatibility { residual: r });
            }
        }
        Ok(())
    }

    /// `∫_{∂Ω_j} u^k` per component, for `k` in `{1, 2}`.
    pub fn boundary_moment(&self, k: i32) -> Result<Vec<f64>> {
        if !(k == 1 || k == 2) {
            return domain(format!("boundary moments are defined for k = 1, 2, got {k}"));
        }
        Ok(self
            .components
            .iter()
            .map(|c| match c.solution {
                ClosedForm::Radial { trace, .. } => trace.powi(k) * c.perimeter(self.dim),
                ClosedForm::SignedQuadratic { .. } => edge_integral(c, k),
            })
            .collect())
    }

    /// `Σ_j (c*/c_j) ∫_{∂Ω_j} u^k` with `k` set by `cond`.
    pub fn condition_rhs(&self, cond: NormalizationCondition, c_star: f64) -> Result<f64> {
        let moments = self.boundary_moment(cond.power())?;
        let mut terms = Vec::with_capacity(moments.len());
        for (j, (c, m)) in self.components.iter().zip(moments).enumerate() {
            if c.neumann == 0.0 {
                return Err(Error::DegenerateFlux { component: j });
            }
            terms.push(c_star / c.neumann * m);
        }
        Ok(compensated_sum(terms))
    }

    /// Exact decreasing rearrangement of `|f|`.
    pub fn load_rearrangement(&self) -> Result<StepRearrangement<f64>> {
        let mut pairs = Vec::new();
        for c in &self.components {
            match (&c.shape, c.load) {
                (_, Load::Constant(l)) => pairs.push((l, c.measure(self.dim))),
                (Shape::Rect { x, y }, Load::NegSign { with_x: false }) => {
                    pairs.push((1.0, (x.1 - x.0) * (y.1 - y.0)));
                }
                (Shape::Rect { x, y }, Load::NegSign { with_x: true }) => {
                    // |sgn x + sgn y| is 2 on the (+,+) and (-,-) quadrants, 0 elsewhere
                    let (xm, xp) = (0f64.min(x.1) - x.0.min(0.0), x.1.max(0.0) - 0f64.max(x.0));
                    let (ym, yp) = (0f64.min(y.1) - y.0.min(0.0), y.1.max(0.0) - 0f64.max(y.0));
                    pairs.push((2.0, xp * yp));
                    pairs.push((2.0, xm * ym));
                    pairs.push((0.0, xp * ym));
                    pairs.push((0.0, xm * yp));
                }
                (Shape::Ball { .. }, Load::NegSign { .. }) => unreachable!("sign loads live on rectangles"),
            }
        }
        Ok(decreasing_rearrangement(&SampledFunction::from_pairs(pairs)?))
    }

    /// Symmetrized problem on the ball of equal measure.
    pub fn symmetrized_problem(&self) -> Result<SymmetrizedProblem<f64>> {
        SymmetrizedProblem::new(self.load_rearrangement()?, self.dim)
    }

    /// Normal derivative of `u` on the boundary of component `j`, at the
    /// boundary point along the first axis (balls) or the midpoint of the top
    /// edge (rectangles), by central differences with step `h`.
    pub fn normal_derivative_fd(&self, j: usize, h: f64) -> f64 {
        let c = &self.components[j];
        match &c.shape {
            Shape::Ball { center, radius } => {
                let mut out = center.clone();
                let mut inn = center.clone();
                out[0] += radius + h;
                inn[0] += radius - h;
                (c.eval_u(self.dim, &out) - c.eval_u(self.dim, &inn)) / (2.0 * h)
            }
            Shape::Rect { x, y } => {
                let xm = 0.5 * (x.0 + x.1);
                (c.eval_u(2, &[xm, y.1 + h]) - c.eval_u(2, &[xm, y.1 - h])) / (2.0 * h)
            }
        }
    }

    /// `Δu(p)` by the second-order central stencil with step `h`.
    pub fn laplacian_fd(&self, p: &[f64], h: f64) -> Result<f64> {
        let c = self.component_at(p)?;
        let centre = c.eval_u(self.dim, p);
        let mut acc = 0.0;
        let mut q = p.to_vec();
        for i in 0..self.dim {
            q[i] = p[i] + h;
            let plus = c.eval_u(self.dim, &q);
            q[i] = p[i] - h;
            let minus = c.eval_u(self.dim, &q);
            q[i] = p[i];
            acc += (plus - 2.0 * centre + minus) / (h * h);
        }
        Ok(acc)
    }

    /// A point of component `j` from coordinates in `[0, 1)^dim`, or `None`
    /// when the point falls outside (used for rejection sampling in balls).
    pub fn point_from_unit(&self, j: usize, unit: &[f64]) -> Option<Vec<f64>> {
        match &self.components[j].shape {
            Shape::Ball { center, radius } => {
                let p: Vec<f64> = center.iter().zip(unit).map(|(c, u)| c + radius * (2.0 * u - 1.0)).collect();
                let d2: f64 = p.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                (d2 < radius * radius).then_some(p)
            }
            Shape::Rect { x, y } => Some(vec![x.0 + (x.1 - x.0) * unit[0], y.0 + (y.1 - y.0) * unit[1]]),
        }
    }
}

/// `∫_{∂R} u^k` over the rectangle boundary, exact for the piecewise
/// polynomial `u` by 3-point Gauss-Legendre on edge pieces split at zero.
fn edge_integral(c: &ComponentSpec, k: i32) -> f64 {
    let Shape::Rect { x, y } = &c.shape else {
        unreachable!("edge integrals are taken over rectangles")
    };
    let u = |px: f64, py: f64| c.eval_u(2, &[px, py]).powi(k);
    let along = |iv: (f64, f64), g: &dyn Fn(f64) -> f64| -> f64 {
        let mut cuts = vec![iv.0];
        if iv.0 < 0.0 && iv.1 > 0.0 {
            cuts.push(0.0);
        }
        cuts.push(iv.1);
        compensated_sum(cuts.windows(2).map(|w| gauss_legendre_3(g, w[0], w[1])))
    };
    let bottom = along(*x, &|s| u(s, y.0));
    let top = along(*x, &|s| u(s, y.1));
    let left = along(*y, &|s| u(x.0, s));
    let right = along(*y, &|s| u(x.1, s));
    compensated_sum([bottom, top, left, right])
}

fn gauss_legendre_3(g: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let node = (0.6f64).sqrt() * half;
    half * (5.0 / 9.0 * (g(mid - node) + g(mid + node)) + 8.0 / 9.0 * g(mid))
}

/// `k(a, ε)`, the constant making the boundary mean of the shifted-rectangle solution vanish.
pub fn shifted_rect_constant(a: f64, eps: f64) -> Result<f64> {
    let case = ExampleCase::shifted_rect(a, eps)?;
    match case.components[0].solution {
        ClosedForm::SignedQuadratic { shift, .. } => Ok(shift),
        ClosedForm::Radial { .. } => unreachable!("rectangles carry signed quadratics"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn all_cases() -> Vec<ExampleCase> {
        vec![
            ExampleCase::two_disks_l2(0.01).unwrap(),
            ExampleCase::two_balls_3d(0.01).unwrap(),
            ExampleCase::two_disks_l6(0.2).unwrap(),
            ExampleCase::shifted_rect(3.0, 0.05).unwrap(),
            ExampleCase::zero_mean_rect(4.0).unwrap(),
        ]
    }

    #[test]
    fn ids_round_trip() {
        for k in 1..=5u8 {
            let id = CaseId::from_number(k).unwrap();
            assert_eq!(id.number(), Some(k));
            assert_eq!(id.name().parse::<CaseId>().unwrap(), id);
            assert_eq!(k.to_string().parse::<CaseId>().unwrap(), id);
        }
        assert!("seven".parse::<CaseId>().is_err());
    }

    #[test]
    fn disk_values() {
        let c = ExampleCase::two_disks_l2(0.1).unwrap();
        assert_eq!(c.evaluate_u(&[1.0, 0.0]).unwrap(), 1.25);
        assert!((c.evaluate_u(&[2.0, 0.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((c.evaluate_u(&[3.5, 0.0]).unwrap() - 0.1 / 4.0).abs() < 1e-15);
        assert!(c.evaluate_u(&[2.25, 0.0]).is_err());
        assert!(c.evaluate_u(&[1.0]).is_err());
        let b = ExampleCase::two_balls_3d(0.1).unwrap();
        assert!((b.evaluate_u(&[1.0, 0.0, 0.0]).unwrap() - 7.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn centred_rectangle_values() {
        let a = 4.0;
        let c = ExampleCase::zero_mean_rect(a).unwrap();
        // y|y|/2 - a y/2 at y = -a/2
        let v = c.evaluate_u(&[0.1, -a / 2.0]).unwrap();
        assert!((v - a * a / 8.0).abs() < 1e-14);
        assert!((c.evaluate_u(&[0.0, a / 2.0]).unwrap() + a * a / 8.0).abs() < 1e-14);
        assert!(c.evaluate_u(&[0.2, 0.0]).is_err());
    }

    #[test]
    fn laplacian_matches_load() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = 1e-2;
        for case in all_cases() {
            let mut checked = 0;
            while checked < 1000 {
                let j = rng.gen_range(0..case.components().len());
                let unit: Vec<f64> = (0..case.dim()).map(|_| rng.gen::<f64>()).collect();
                let Some(p) = case.point_from_unit(j, &unit) else { continue };
                // keep the stencil inside one smooth piece
                if !case.component_at(&p).is_ok_and(|c| {
                    let probe = |q: &[f64]| c.contains(q);
                    (0..case.dim()).all(|i| {
                        let mut q = p.clone();
                        q[i] += 2.0 * h;
                        let ok = probe(&q);
                        q[i] -= 4.0 * h;
                        ok && probe(&q)
                    })
                }) {
                    continue;
                }
                if matches!(case.id(), CaseId::ShiftedRect | CaseId::ZeroMeanRect)
                    && (p[0].abs() < 2.0 * h || p[1].abs() < 2.0 * h)
                {
                    continue;
                }
                let lap = case.laplacian_fd(&p, h).unwrap();
                let f = case.evaluate_f(&p).unwrap();
                assert!((lap + f).abs() <= 1e-9, "{:?} at {p:?}: {lap} vs {f}", case.id());
                checked += 1;
            }
        }
    }

    #[test]
    fn neumann_data_match() {
        for case in all_cases() {
            for (j, c) in case.components().iter().enumerate() {
                let d = case.normal_derivative_fd(j, 1e-4);
                assert!((d - c.neumann).abs() < 1e-9, "{:?}: {d} vs {}", case.id(), c.neumann);
            }
        }
    }

    #[test]
    fn compatibility_per_component() {
        for case in all_cases() {
            for r in case.compatibility_residuals() {
                assert!(r.abs() <= 1e-12, "{:?}: {r}", case.id());
            }
            case.check_compatibility().unwrap();
        }
    }

    #[test]
    fn boundary_moments() {
        let c = ExampleCase::two_disks_l2(0.3).unwrap();
        let m = c.boundary_moment(1).unwrap();
        assert!((m[0] - 2.0 * PI).abs() < 1e-14);
        assert_eq!(m[1], 0.0);
        let z = ExampleCase::zero_mean_rect(4.0).unwrap();
        assert!(z.boundary_moment(1).unwrap()[0].abs() < 1e-14);
        let s = ExampleCase::shifted_rect(2.0, 0.1).unwrap();
        assert!(s.boundary_moment(1).unwrap()[0].abs() < 1e-13);
        assert!(s.boundary_moment(2).unwrap()[0] > 0.0);
        assert!(c.boundary_moment(3).is_err());
    }

    #[test]
    fn condition_data() {
        let eps = 0.01;
        let c = ExampleCase::two_disks_l2(eps).unwrap();
        let prob = c.symmetrized_problem().unwrap();
        assert!((prob.c_star() + 2f64.sqrt() * (1.0 + eps) / 4.0).abs() < 1e-15);
        let rhs = c.condition_rhs(NormalizationCondition::Trace, prob.c_star()).unwrap();
        assert!((rhs - PI * 2f64.sqrt() * (1.0 + eps)).abs() < 1e-12);
        assert!((rhs / prob.perimeter() - (1.0 + eps) / 2.0).abs() < 1e-14);
        let z = ExampleCase::zero_mean_rect(2.0).unwrap();
        let err = z.condition_rhs(NormalizationCondition::Trace, -0.1).unwrap_err();
        assert_eq!(err, Error::DegenerateFlux { component: 0 });
    }

    #[test]
    fn load_rearrangements() {
        let eps = 0.25;
        let f = ExampleCase::two_disks_l2(eps).unwrap().load_rearrangement().unwrap();
        assert_eq!(f.values(), &[1.0, eps]);
        assert!((f.widths()[0] - PI).abs() < 1e-15 && (f.widths()[1] - PI).abs() < 1e-15);
        let (a, e) = (2.0, 0.1);
        let s = ExampleCase::shifted_rect(a, e).unwrap().load_rearrangement().unwrap();
        let plus = 0.25 + (2.0 * e + 0.5 / a) * (2.0 * e + 0.5 * a);
        assert!((s.partial_integral(plus).unwrap() - 2.0 * plus).abs() < 1e-14);
        assert_eq!(s.value_at(plus + 1e-9), 0.0);
        let z = ExampleCase::zero_mean_rect(8.0).unwrap().load_rearrangement().unwrap();
        assert_eq!(z.values(), &[1.0]);
        assert!((z.domain_length() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn shifted_constant_is_non_positive() {
        for (a, e) in [(1.0, 0.1), (4.0, 0.01), (10.0, 0.001)] {
            assert!(shifted_rect_constant(a, e).unwrap() <= 0.0);
        }
    }

    #[test]
    fn maxima() {
        assert_eq!(ExampleCase::two_disks_l2(0.1).unwrap().max_abs_value(), 1.25);
        let a = 3.0;
        let z = ExampleCase::zero_mean_rect(a).unwrap();
        assert!((z.max_abs_value() - a * a / 8.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ExampleCase::two_disks_l2(0.0).is_err());
        assert!(ExampleCase::zero_mean_rect(-1.0).is_err());
        assert!(ExampleCase::shifted_rect(1.0, f64::NAN).is_err());
        assert!(ExampleCase::ball_cluster(1, &[BallSpec { radius: 1.0, load: 1.0, trace: 0.0 }]).is_err());
        assert!(ExampleCase::from_id(CaseId::BallCluster, 0.1, 1.0).is_err());
    }
}
