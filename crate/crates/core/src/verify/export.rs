//! Deterministic CSV writers: fixed headers, `{:.12e}` fields, no timestamps.

use std::io::{self, Write};

use super::{GapPoint, SweepParam};
use crate::measure::LevelMeasure;
use crate::radial::RadialSolution;

/// `t,mu,phi` at `points + 1` uniform levels from 0 to the larger maximum.
pub fn write_distribution_csv<W: Write>(
    mut w: W,
    u: &dyn LevelMeasure<f64>,
    v: &dyn LevelMeasure<f64>,
    points: usize,
) -> io::Result<()> {
    writeln!(w, "t,mu,phi")?;
    let top = u.max_level().max(v.max_level());
    for k in 0..=points {
        let t = top * k as f64 / points.max(1) as f64;
        writeln!(w, "{t:.12e},{:.12e},{:.12e}", u.measure_above(t), v.measure_above(t))?;
    }
    Ok(())
}

/// `s,u_star,v_star` at cell midpoints of a uniform partition of `[0, |Ω|]`.
pub fn write_rearrangement_csv<W: Write>(
    mut w: W,
    u: &dyn LevelMeasure<f64>,
    v: &dyn LevelMeasure<f64>,
    points: usize,
) -> io::Result<()> {
    writeln!(w, "s,u_star,v_star")?;
    let total = u.total_measure().max(v.total_measure());
    let points = points.max(1);
    for k in 0..points {
        let s = total * (k as f64 + 0.5) / points as f64;
        writeln!(w, "{s:.12e},{:.12e},{:.12e}", u.rearranged_value(s), v.rearranged_value(s))?;
    }
    Ok(())
}

/// `r,v,dv` from the centre to the boundary of the symmetrized ball.
pub fn write_profile_csv<W: Write>(mut w: W, sol: &RadialSolution<f64>, points: usize) -> io::Result<()> {
    writeln!(w, "r,v,dv")?;
    for (r, v, dv) in sol.profile_table(points) {
        writeln!(w, "{r:.12e},{v:.12e},{dv:.12e}")?;
    }
    Ok(())
}

/// `<param>,u_norm,v_norm,gap`.
pub fn write_sweep_csv<W: Write>(mut w: W, param: SweepParam, points: &[GapPoint]) -> io::Result<()> {
    writeln!(w, "{},u_norm,v_norm,gap", param.name())?;
    for p in points {
        writeln!(w, "{:.12e},{:.12e},{:.12e},{:.12e}", p.param, p.lhs, p.rhs, p.gap)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ExampleCase;
    use crate::radial::NormalizationCondition;
    use crate::verify::solve_symmetrized;

    fn curves() -> (crate::curve::SmoothDistribution<f64>, RadialSolution<f64>) {
        let case = ExampleCase::two_disks_l2(1e-2).unwrap();
        (case.u_distribution().unwrap(), solve_symmetrized(&case, NormalizationCondition::Trace).unwrap())
    }

    #[test]
    fn headers_and_row_counts() {
        let (u, sol) = curves();
        let phi = sol.phi_curve().unwrap();
        let mut buf = Vec::new();
        write_distribution_csv(&mut buf, &u, &phi, 10).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,mu,phi\n"));
        assert_eq!(text.lines().count(), 12);

        let mut buf = Vec::new();
        write_rearrangement_csv(&mut buf, &u, &phi, 5).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("s,u_star,v_star\n"));

        let mut buf = Vec::new();
        write_profile_csv(&mut buf, &sol, 4).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("r,v,dv\n"));
    }

    #[test]
    fn output_is_byte_identical() {
        let run = || {
            let (u, sol) = curves();
            let mut buf = Vec::new();
            write_distribution_csv(&mut buf, &u, &sol.phi_curve().unwrap(), 100).unwrap();
            buf
        };
        assert_eq!(run(), run());
    }
}
