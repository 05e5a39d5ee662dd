//! Lorentz quasi-norms computed from distribution functions.
//!
//! For `0 < q < inf`,
//! `||g||_{p,q} = p^(1/q) (int_0^inf t^(q-1) mu(t)^(q/p) dt)^(1/q)`,
//! and for `q = inf` the value is `sup_t t^p mu(t)` taken literally, without a
//! `1/p`-th root. That branch is therefore homogeneous of degree `p`, not 1.

use std::fmt;

use crate::error::{domain, Result};
use crate::measure::LevelMeasure;
use crate::scalar::Real;

/// Second Lorentz exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SecondExponent<T> {
    Finite(T),
    Infinite,
}

/// Exponent pair `(p, q)` of a Lorentz space `L^{p,q}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzIndex<T> {
    p: T,
    q: SecondExponent<T>,
}

impl<T: Real> LorentzIndex<T> {
    pub fn new(p: T, q: T) -> Result<Self> {
        check_positive("p", p)?;
        if q == T::infinity() {
            return Ok(Self { p, q: SecondExponent::Infinite });
        }
        check_positive("q", q)?;
        Ok(Self { p, q: SecondExponent::Finite(q) })
    }

    /// `L^{p,p} = L^p`.
    pub fn lebesgue(p: T) -> Result<Self> {
        Self::new(p, p)
    }

    /// `L^{p,inf}`.
    pub fn weak(p: T) -> Result<Self> {
        check_positive("p", p)?;
        Ok(Self { p, q: SecondExponent::Infinite })
    }

    pub fn p(&self) -> T {
        self.p
    }

    pub fn q(&self) -> SecondExponent<T> {
        self.q
    }
}

impl<T: Real> fmt::Display for LorentzIndex<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = short(self.p);
        match self.q {
            SecondExponent::Finite(q) => write!(f, "L^({p},{})", short(q)),
            SecondExponent::Infinite => write!(f, "L^({p},inf)"),
        }
    }
}

/// At most six decimals, trailing zeros dropped.
fn short<T: Real>(x: T) -> String {
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

fn check_positive<T: Real>(name: &str, x: T) -> Result<()> {
    if !(x > T::zero()) || !x.is_finite() {
        return domain(format!("Lorentz exponent {name} must be finite and positive, got {x}"));
    }
    Ok(())
}

/// `||g||_{L^{p,q}}` from the distribution function of `g`.
pub fn lorentz_norm<T: Real, D: LevelMeasure<T> + ?Sized>(d: &D, idx: LorentzIndex<T>) -> T {
    match idx.q {
        SecondExponent::Finite(q) => {
            let integral = d.level_moment(q, q / idx.p);
            if integral <= T::zero() {
                return T::zero();
            }
            idx.p.powf(T::one() / q) * integral.powf(T::one() / q)
        }
        SecondExponent::Infinite => d.weighted_sup(idx.p),
    }
}

/// `||g||_{L^p}`, identical to `lorentz_norm(d, (p, p))`.
pub fn lp_norm<T: Real, D: LevelMeasure<T> + ?Sized>(d: &D, p: T) -> Result<T> {
    Ok(lorentz_norm(d, LorentzIndex::lebesgue(p)?))
}

/// `||g||_{L^p}^p = p int_0^inf t^(p-1) mu(t) dt`, without the final root.
pub fn lp_norm_pow<T: Real, D: LevelMeasure<T> + ?Sized>(d: &D, p: T) -> Result<T> {
    check_positive("p", p)?;
    Ok(p * d.level_moment(p, T::one()))
}

/// Largest `p` in the `(p, 1)` comparison family: `n / (2n - 2)`.
pub fn first_family_endpoint(n: usize) -> f64 {
    n as f64 / (2.0 * n as f64 - 2.0)
}

/// Largest `p` such that the `(2p, 2)` comparison is asserted: `n / (3n - 4)`.
pub fn second_family_endpoint(n: usize) -> f64 {
    n as f64 / (3.0 * n as f64 - 4.0)
}

/// Largest `p` for unit loads when `n >= 3`: `n / (n - 2)`; infinite in the plane.
pub fn unit_load_endpoint(n: usize) -> f64 {
    if n <= 2 {
        f64::INFINITY
    } else {
        n as f64 / (n as f64 - 2.0)
    }
}

/// `1/p - (2n-2)/n`; non-negative exactly on the `(p, 1)` range.
pub fn first_family_exponent(p: f64, n: usize) -> f64 {
    1.0 / p - (2.0 * n as f64 - 2.0) / n as f64
}

/// `1/q - (n-2)/n`; non-negative exactly on the unit-load range.
pub fn unit_load_exponent(q: f64, n: usize) -> f64 {
    1.0 / q - (n as f64 - 2.0) / n as f64
}
