//! The full invariant suite, run in parallel.

use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{
    check_level_set_inequality, fd_distribution_mismatch, level_grid, run_counterexample, run_theorem_1_1,
    run_theorem_1_2, solve_symmetrized, CounterexampleOptions, Pipeline,
};
use crate::error::{domain, Result};
use crate::geometry::{BallSpec, CaseId, ExampleCase};
use crate::grid::{manufactured_study, Gauge};
use crate::measure::{decreasing_rearrangement, distribution, hardy_littlewood_pairing, LevelMeasure, SampledFunction};
use crate::radial::{check_fundamental_identity, GammaNormalization, NormalizationCondition};

/// Environment variable capping the worker threads of the suite.
pub const THREADS_ENV: &str = "TALENTI_THREADS";

const CONDITIONS: [NormalizationCondition; 2] = [NormalizationCondition::Trace, NormalizationCondition::SquaredTrace];

#[derive(Debug, Clone, PartialEq)]
pub struct SelftestOptions {
    /// Sampling and grid resolution along the longer side.
    pub resolution: usize,
    pub seed: u64,
    pub random_variants: usize,
    /// Random instances for each rearrangement property.
    pub random_pairs: usize,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        Self { resolution: 512, seed: 7, random_variants: 20, random_pairs: 1000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelftestItem {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelftestReport {
    pub items: Vec<SelftestItem>,
    pub seconds: f64,
}

impl SelftestReport {
    pub fn all_pass(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &SelftestItem> {
        self.items.iter().filter(|i| !i.passed)
    }

    pub fn find(&self, name: &str) -> Option<&SelftestItem> {
        self.items.iter().find(|i| i.name == name)
    }
}

impl fmt::Display for SelftestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in &self.items {
            writeln!(f, "{} {:<48} {:>7.2}s  {}", if i.passed { "ok  " } else { "FAIL" }, i.name, i.seconds, i.detail)?;
        }
        let failed = self.failures().count();
        write!(
            f,
            "{} items, {} failed, {:.1}s: {}",
            self.items.len(),
            failed,
            self.seconds,
            if failed == 0 { "pass" } else { "FAIL" }
        )
    }
}

/// Runs `f` on a pool sized by [`THREADS_ENV`] when it is set to a positive
/// integer, on the global pool otherwise.
pub fn with_thread_limit<R: Send>(f: impl FnOnce() -> R + Send) -> Result<R> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .ok()
                .filter(|n| *n > 0)
                .ok_or_else(|| crate::error::Error::Domain(format!("{THREADS_ENV} must be a positive integer, got '{v}'")))?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| crate::error::Error::Domain(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(f))
        }
        Err(_) => Ok(f()),
    }
}

/// Unit balls (radius 1) carrying `f = 1` with the given traces.
pub fn unit_load_balls(dim: usize, traces: &[f64]) -> Result<ExampleCase> {
    let balls: Vec<BallSpec> = traces.iter().map(|&trace| BallSpec { radius: 1.0, load: 1.0, trace }).collect();
    ExampleCase::ball_cluster(dim, &balls)
}

/// A positive ball cluster: `n ∈ {2, 3}`, two or three balls of radius in
/// `[0.5, 1.5)`, constant loads in `[ε, 1]` with `ε = 10^U(-4, 0)`, and traces
/// in `[0, 1)`.
pub fn random_variant<R: Rng>(rng: &mut R) -> Result<ExampleCase> {
    let n = rng.gen_range(2..=3);
    let k = rng.gen_range(2..=3);
    let eps = 10f64.powf(rng.gen_range(-4.0..0.0));
    let balls: Vec<BallSpec> = (0..k)
        .map(|_| BallSpec {
            radius: rng.gen_range(0.5..1.5),
            load: rng.gen_range(eps..=1.0),
            trace: rng.gen_range(0.0..1.0),
        })
        .collect();
    ExampleCase::ball_cluster(n, &balls)
}

/// `count` variants from a seeded stream.
pub fn random_variants(seed: u64, count: usize) -> Result<Vec<ExampleCase>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_variant(&mut rng)).collect()
}

/// A signed step function with 1 to 40 cells, some values repeated.
pub fn random_sampled<R: Rng>(rng: &mut R) -> SampledFunction<f64> {
    let cells = rng.gen_range(1..=40);
    let palette: Vec<f64> = (0..rng.gen_range(1..=cells)).map(|_| rng.gen_range(-5.0..5.0)).collect();
    let pairs: Vec<(f64, f64)> = (0..cells)
        .map(|_| (palette[rng.gen_range(0..palette.len())], rng.gen_range(0.01..1.0)))
        .collect();
    SampledFunction::from_pairs(pairs).expect("positive measures")
}

/// Largest relative excess of `∫hg` over `∫h*g*` across `count` random pairs.
pub fn hardy_littlewood_excess(seed: u64, count: usize) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..count {
        let h = random_sampled(&mut rng);
        let g = SampledFunction::new(
            h.cells().iter().map(|c| crate::measure::Cell::new(rng.gen_range(-5.0..5.0), c.measure)).collect(),
        )?;
        let hl = hardy_littlewood_pairing(&h, &g)?;
        worst = worst.max((hl.lhs - hl.rhs) / hl.rhs.abs().max(1.0));
    }
    Ok(worst)
}

/// Largest `|μ_f(t) - μ_{f*}(t)| / |Ω|` and relative `L^p` mismatch for
/// `p ∈ {1, 2, 6}` across `count` random step functions.
pub fn equimeasurability_defect(seed: u64, count: usize) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let f = random_sampled(&mut rng);
        let star = decreasing_rearrangement(&f);
        let (a, b) = (distribution(&f), star.distribution());
        let total = f.total_measure();
        let top = a.max_level();
        for k in 0..=64 {
            let t = top * k as f64 / 64.0;
            worst = worst.max((a.measure_above(t) - b.measure_above(t)).abs() / total);
        }
        for &t in a.breakpoints() {
            worst = worst.max((a.measure_above(t) - b.measure_above(t)).abs() / total);
        }
        for p in [1.0, 2.0, 6.0] {
            let lhs = f.abs_power_integral(p);
            let rhs: f64 = star.steps().map(|(a, b, v)| (b - a) * v.powf(p)).sum();
            worst = worst.max((lhs - rhs).abs() / lhs.max(f64::MIN_POSITIVE));
        }
    }
    Ok(worst)
}

type Job = Box<dyn Fn() -> Result<(bool, String)> + Send + Sync>;

fn job(name: impl Into<String>, f: impl Fn() -> Result<(bool, String)> + Send + Sync + 'static) -> (String, Job) {
    (name.into(), Box::new(f))
}

fn comparison_jobs(jobs: &mut Vec<(String, Job)>, opts: &SelftestOptions) {
    let res = opts.resolution;
    for id in [CaseId::TwoDisksL2, CaseId::TwoBalls3D, CaseId::TwoDisksL6] {
        for cond in CONDITIONS {
            for pipeline in [Pipeline::Exact, Pipeline::Sampled { resolution: res }] {
                jobs.push(job(format!("theorem 1.1 {} {} {pipeline}", id.name(), cond.label()), move || {
                    let case = ExampleCase::from_id(id, 1e-3, 1.0)?;
                    let r = run_theorem_1_1(&case, cond, None, pipeline)?;
                    Ok((r.all_pass(), format!("{} entries, worst margin {:+.2e}", r.entries.len(), r.worst_relative_margin())))
                }));
            }
        }
    }
    let seed = opts.seed;
    for k in 0..opts.random_variants {
        jobs.push(job(format!("theorem 1.1 random variant {k}"), move || {
            let case = random_variants(seed, k + 1)?.pop().expect("k + 1 variants");
            let mut worst = f64::INFINITY;
            let mut ok = true;
            for cond in CONDITIONS {
                let r = run_theorem_1_1(&case, cond, None, Pipeline::Exact)?;
                ok &= r.all_pass() && r.entries.iter().all(|e| e.margin >= -e.tolerance);
                worst = worst.min(r.worst_relative_margin());
            }
            Ok((ok, format!("n={} {} balls, worst margin {worst:+.2e}", case.dim(), case.components().len())))
        }));
    }
    for cond in CONDITIONS {
        jobs.push(job(format!("theorem 1.2 two unit disks {}", cond.label()), move || {
            let r = run_theorem_1_2(&unit_load_balls(2, &[0.0, 0.1])?, cond, None, Pipeline::Exact)?;
            let p = r.pointwise.as_ref().expect("planar pointwise check");
            Ok((r.all_pass() && p.max_excess <= 1e-9, format!("sup(mu - phi) = {:+.2e}", p.max_excess)))
        }));
        jobs.push(job(format!("theorem 1.2 single disk {}", cond.label()), move || {
            let r = run_theorem_1_2(&unit_load_balls(2, &[0.2])?, cond, None, Pipeline::Exact)?;
            let p = r.pointwise.as_ref().expect("planar pointwise check");
            Ok((r.all_pass() && p.max_excess <= 1e-12, format!("sup(mu - phi) = {:+.2e}", p.max_excess)))
        }));
        jobs.push(job(format!("theorem 1.2 two unit balls n=3 {}", cond.label()), move || {
            let r = run_theorem_1_2(&unit_load_balls(3, &[0.0, 0.1])?, cond, None, Pipeline::Exact)?;
            Ok((r.all_pass(), format!("{} entries, worst margin {:+.2e}", r.entries.len(), r.worst_relative_margin())))
        }));
    }
}

/// Every symmetrized problem of the suite, for the identity check.
fn identity_cases(opts: &SelftestOptions) -> Result<Vec<ExampleCase>> {
    let mut cases = vec![
        ExampleCase::two_disks_l2(1e-3)?,
        ExampleCase::two_balls_3d(1e-3)?,
        ExampleCase::two_disks_l6(1e-3)?,
        unit_load_balls(2, &[0.0, 0.1])?,
        unit_load_balls(2, &[0.2])?,
        unit_load_balls(3, &[0.0, 0.1])?,
    ];
    cases.extend(random_variants(opts.seed, opts.random_variants)?);
    Ok(cases)
}

/// Largest level-set identity residual over the suite's problems, with the
/// constant that closes it.
pub fn identity_sweep(cases: &[ExampleCase]) -> Result<(f64, usize)> {
    let mut worst: f64 = 0.0;
    let mut isoperimetric = 0;
    for case in cases {
        for cond in CONDITIONS {
            let sol = solve_symmetrized(case, cond)?;
            let check = check_fundamental_identity(&sol, &level_grid(1.1 * sol.max_value(), 200))?;
            worst = worst.max(check.max_residual());
            if check.closing() == GammaNormalization::Isoperimetric {
                isoperimetric += 1;
            }
        }
    }
    Ok((worst, isoperimetric))
}

fn invariant_jobs(jobs: &mut Vec<(String, Job)>, opts: &SelftestOptions) {
    let o = opts.clone();
    jobs.push(job("level-set identity on all solved problems", move || {
        let cases = identity_cases(&o)?;
        let (worst, iso) = identity_sweep(&cases)?;
        let total = 2 * cases.len();
        Ok((worst <= 1e-8 && iso == total, format!("max residual {worst:.2e}, isoperimetric constant closes {iso}/{total}")))
    }));
    jobs.push(job("level-set inequality two disks, 200 levels", || {
        let case = ExampleCase::two_disks_l2(1e-3)?;
        let slack = check_level_set_inequality(&case, &level_grid(case.max_abs_value() * 1.05, 200))?;
        Ok((slack >= -1e-9, format!("min relative slack {slack:+.3e}")))
    }));
    let (seed, pairs) = (opts.seed, opts.random_pairs);
    jobs.push(job(format!("hardy-littlewood, {pairs} random pairs"), move || {
        let excess = hardy_littlewood_excess(seed, pairs)?;
        Ok((excess <= 1e-12, format!("max relative excess {excess:+.2e}")))
    }));
    jobs.push(job(format!("equimeasurability, {pairs} random functions"), move || {
        let defect = equimeasurability_defect(seed.wrapping_add(1), pairs)?;
        Ok((defect <= 1e-12, format!("max defect {defect:.2e}")))
    }));
    jobs.push(job("grid convergence, manufactured solution", || {
        let study = manufactured_study(&[32, 64, 128])?;
        Ok(((study.slope - 2.0).abs() <= 0.1, format!("slope {:.4}", study.slope)))
    }));
    let res = opts.resolution;
    jobs.push(job("grid vs closed form, shifted rectangle", move || {
        let m = fd_distribution_mismatch(&ExampleCase::shifted_rect(2.0, 1e-2)?, res)?;
        Ok((m <= 2e-2, format!("sup |mu_fd - mu| / |Omega| = {m:.2e}")))
    }));
    jobs.push(job("grid vs closed form, zero-mean rectangle", move || {
        let m = fd_distribution_mismatch(&ExampleCase::zero_mean_rect(4.0)?, res)?;
        Ok((m <= 2e-2, format!("sup |mu_fd - mu| / |Omega| = {m:.2e}")))
    }));
    jobs.push(job("grid error order, zero-mean rectangle", || {
        let case = ExampleCase::zero_mean_rect(4.0)?;
        let mut h = Vec::new();
        let mut err = Vec::new();
        for res in [64, 128, 256] {
            let sol = case.solve_fd(res, Gauge::MeanZeroTrace)?;
            h.push(sol.grid().hx().max(sol.grid().hy()));
            err.push(sol.max_error(|x, y| case.evaluate_u(&[x, y]).unwrap_or(f64::NAN)));
        }
        let slope = crate::grid::convergence_slope(&h, &err);
        Ok((slope >= 1.0, format!("slope {slope:.3}")))
    }));
}

/// Runs every item; individual failures and errors are recorded, not raised.
pub fn selftest(opts: &SelftestOptions) -> Result<SelftestReport> {
    if opts.resolution < 16 {
        return domain(format!("selftest resolution must be at least 16, got {}", opts.resolution));
    }
    let start = Instant::now();
    let mut jobs = Vec::new();
    for id in [CaseId::TwoDisksL2, CaseId::TwoBalls3D, CaseId::TwoDisksL6, CaseId::ShiftedRect, CaseId::ZeroMeanRect] {
        let res = opts.resolution;
        jobs.push(job(format!("counterexample {}", id.name()), move || {
            let r = run_counterexample(id, &CounterexampleOptions { resolution: res, ..Default::default() })?;
            let detail = match (r.fit, r.crossover) {
                (Some(fit), _) => format!("gap fit {:.6} {:+.6} eps", fit.intercept, fit.slope),
                (None, Some(a0)) => format!("crossover a0 = {a0:.6}"),
                _ => String::new(),
            };
            Ok((r.as_expected(), detail))
        }));
    }
    comparison_jobs(&mut jobs, opts);
    invariant_jobs(&mut jobs, opts);
    let items = jobs
        .par_iter()
        .map(|(name, f)| {
            let t = Instant::now();
            let (passed, detail) = match f() {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e}")),
            };
            SelftestItem { name: name.clone(), passed, detail, seconds: t.elapsed().as_secs_f64() }
        })
        .collect();
    Ok(SelftestReport { items, seconds: start.elapsed().as_secs_f64() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variants_are_reproducible_and_positive() {
        let a = random_variants(3, 5).unwrap();
        assert_eq!(a, random_variants(3, 5).unwrap());
        assert!(a.iter().all(|c| c.is_positive() && c.check_compatibility().is_ok()));
    }

    #[test]
    fn rearrangement_properties_hold() {
        assert!(hardy_littlewood_excess(1, 200).unwrap() <= 1e-12);
        assert!(equimeasurability_defect(1, 200).unwrap() <= 1e-12);
    }

    #[test]
    fn coarse_selftest_passes() {
        let opts = SelftestOptions { resolution: 256, seed: 11, random_variants: 3, random_pairs: 50 };
        let report = selftest(&opts).unwrap();
        assert!(report.all_pass(), "{report}");
    }
}
