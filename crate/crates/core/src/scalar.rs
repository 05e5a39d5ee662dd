//! Scalar abstraction shared by the rearrangement, Lorentz and radial code.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar the numerical core is generic over (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Neumaier-compensated sum.
pub fn compensated_sum<T: Real, I: IntoIterator<Item = T>>(items: I) -> T {
    let mut sum = T::zero();
    let mut comp = T::zero();
    for x in items {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp = comp + ((sum - t) + x);
        } else {
            comp = comp + ((x - t) + sum);
        }
        sum = t;
    }
    sum + comp
}

/// Measure of the unit ball in `R^n`.
pub fn unit_ball_measure<T: Real>(n: usize) -> T {
    // omega_n = omega_{n-2} * 2 pi / n, omega_0 = 1, omega_1 = 2
    let two_pi = T::PI() + T::PI();
    let mut omega = if n.is_multiple_of(2) { T::one() } else { T::lit(2.0) };
    let mut k = if n.is_multiple_of(2) { 2 } else { 3 };
    while k <= n {
        omega = omega * two_pi / T::from_usize_lossy(k);
        k += 2;
    }
    omega
}

/// Radius of the ball in `R^n` with the given measure.
pub fn ball_radius<T: Real>(n: usize, measure: T) -> T {
    (measure / unit_ball_measure::<T>(n)).powf(T::one() / T::from_usize_lossy(n))
}

/// Surface measure of the sphere of radius `r` in `R^n`.
pub fn sphere_area<T: Real>(n: usize, r: T) -> T {
    T::from_usize_lossy(n) * unit_ball_measure::<T>(n) * r.powi(n as i32 - 1)
}

/// `|a - b| <= tol * max(|a|, |b|)`, with exact zero treated as equal only to exact zero.
pub fn rel_close<T: Real>(a: T, b: T, tol: T) -> bool {
    let scale = a.abs().max(b.abs());
    (a - b).abs() <= tol * scale
}

/// Relative difference `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn rel_diff<T: Real>(a: T, b: T) -> T {
    let scale = a.abs().max(b.abs());
    if scale == T::zero() {
        T::zero()
    } else {
        (a - b).abs() / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn unit_ball_measures() {
        assert!((unit_ball_measure::<f64>(1) - 2.0).abs() < 1e-15);
        assert!((unit_ball_measure::<f64>(2) - PI).abs() < 1e-15);
        assert!((unit_ball_measure::<f64>(3) - 4.0 * PI / 3.0).abs() < 1e-15);
        assert!((unit_ball_measure::<f64>(4) - PI * PI / 2.0).abs() < 1e-14);
        assert!((unit_ball_measure::<f32>(2) - std::f32::consts::PI).abs() < 1e-6);
    }

    #[test]
    fn radius_round_trip() {
        let r = ball_radius::<f64>(2, 2.0 * PI);
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
        let r3 = ball_radius::<f64>(3, 8.0 * PI / 3.0);
        assert!((r3 - 2f64.cbrt()).abs() < 1e-15);
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let xs = std::iter::once(1.0e16).chain(std::iter::repeat_n(1.0, 1000)).chain(std::iter::once(-1.0e16));
        assert_eq!(compensated_sum::<f64, _>(xs), 1000.0);
    }
}
