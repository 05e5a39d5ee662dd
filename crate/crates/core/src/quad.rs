//! Double-exponential (tanh-sinh) quadrature.
//!
//! Used for integrals of smooth closed-form pieces of distribution functions,
//! which may have algebraic singularities at the interval ends (for example
//! `(t0 - t)^(3/2)` at the top of a three-dimensional radial profile).

use crate::scalar::{compensated_sum, Real};

const MAX_LEVEL: usize = 10;

/// `int_a^b f(x) dx`. Endpoints are never evaluated.
pub fn tanh_sinh<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T) -> T {
    if b == a {
        return T::zero();
    }
    if b < a {
        return -tanh_sinh(f, b, a);
    }
    let half = (b - a) / T::lit(2.0);
    let half_pi = T::FRAC_PI_2();
    let tol = T::epsilon().sqrt() * T::lit(1e-3);

    // Contribution of the abscissa pair at parameter `t > 0`, or `None` once
    // the points collapse onto the endpoints.
    let pair = |t: T| -> Option<T> {
        let u = half_pi * t.sinh();
        let e = (u + u).exp();
        // distance of the node from the nearer endpoint, in units of (b - a)
        let offset = T::one() / (e + T::one());
        let weight = half_pi * t.cosh() / (u.cosh() * u.cosh());
        let d = (b - a) * offset;
        if !(d > T::zero()) || !(weight > T::zero()) {
            return None;
        }
        // each side is kept until its node collapses onto its own endpoint
        let left = a + d;
        let right = b - d;
        let mut value = T::zero();
        let mut alive = false;
        if left > a {
            value = value + f(left);
            alive = true;
        }
        if right < b {
            value = value + f(right);
            alive = true;
        }
        if alive {
            Some(weight * value)
        } else {
            None
        }
    };

    let mut h = T::one();
    let mut sum = half_pi * f(a + half);
    let mut k = 1usize;
    let mut terms = Vec::new();
    while let Some(v) = pair(h * T::from_usize_lossy(k)) {
        terms.push(v);
        k += 1;
        if k > 64 {
            break;
        }
    }
    sum = sum + compensated_sum(terms.drain(..));
    let mut estimate = sum * h * half;

    for _level in 1..=MAX_LEVEL {
        h = h / T::lit(2.0);
        // new nodes sit at odd multiples of the halved step
        let mut k = 1usize;
        loop {
            let t = h * T::from_usize_lossy(k);
            match pair(t) {
                Some(v) => terms.push(v),
                None => break,
            }
            k += 2;
            if k > 1 << 14 {
                break;
            }
        }
        sum = sum + compensated_sum(terms.drain(..));
        let next = sum * h * half;
        let diff = (next - estimate).abs();
        estimate = next;
        if diff <= tol * estimate.abs() || diff == T::zero() {
            break;
        }
    }
    estimate
}

/// Sum of tanh-sinh integrals over consecutive intervals of `nodes`.
pub fn piecewise<T: Real, F: Fn(T) -> T>(f: F, nodes: &[T]) -> T {
    compensated_sum(nodes.windows(2).filter(|w| w[1] > w[0]).map(|w| tanh_sinh(&f, w[0], w[1])))
}

/// `max f` over `[a, b]` for a continuous, piecewise unimodal `f`: dense
/// sampling followed by golden-section refinement around the best sample.
/// The endpoints themselves are replaced by points `1e-12 (b - a)` inside.
pub fn maximize<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T) -> T {
    const SAMPLES: usize = 256;
    if !(b > a) {
        return f(a);
    }
    let inset = (b - a) * T::lit(1e-12);
    let node = |i: usize| {
        let x = a + (b - a) * T::from_usize_lossy(i) / T::from_usize_lossy(SAMPLES);
        x.max(a + inset).min(b - inset)
    };
    let (mut arg, mut best) = (0usize, T::neg_infinity());
    for i in 0..=SAMPLES {
        let v = f(node(i));
        if v > best {
            best = v;
            arg = i;
        }
    }
    let (mut lo, mut hi) = (node(arg.saturating_sub(1)), node((arg + 1).min(SAMPLES)));
    let g = T::lit(0.618_033_988_749_895);
    for _ in 0..120 {
        let x1 = hi - g * (hi - lo);
        let x2 = lo + g * (hi - lo);
        if f(x1) < f(x2) {
            lo = x1;
        } else {
            hi = x2;
        }
    }
    best.max(f((lo + hi) / T::lit(2.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial() {
        let v = tanh_sinh(|x: f64| 3.0 * x * x, 0.0, 2.0);
        assert!((v - 8.0).abs() < 1e-13, "{v}");
    }

    #[test]
    fn endpoint_singularities() {
        // int_0^1 x^{-1/2} = 2
        let v = tanh_sinh(|x: f64| x.powf(-0.5), 0.0, 1.0);
        assert!((v - 2.0).abs() < 1e-12, "{v}");
        // int_0^1 (1-x)^{3/2} = 2/5
        let w = tanh_sinh(|x: f64| (1.0 - x).powf(1.5), 0.0, 1.0);
        assert!((w - 0.4).abs() < 1e-14, "{w}");
        // int_1^2 ln x = 2 ln 2 - 1
        let l = tanh_sinh(|x: f64| x.ln(), 1.0, 2.0);
        assert!((l - (2.0 * 2f64.ln() - 1.0)).abs() < 1e-14, "{l}");
    }

    #[test]
    fn reversed_and_piecewise() {
        let v = tanh_sinh(|x: f64| x, 1.0, 0.0);
        assert!((v + 0.5).abs() < 1e-14);
        let p = piecewise(|x: f64| x.abs(), &[-1.0, 0.0, 1.0]);
        assert!((p - 1.0).abs() < 1e-14);
    }

    #[test]
    fn maximizer_finds_interior_peak() {
        let m = maximize(|x: f64| x * (1.0 - x), 0.0, 1.0);
        assert!((m - 0.25).abs() < 1e-15);
        let edge = maximize(|x: f64| x, 0.0, 2.0);
        assert!((edge - 2.0).abs() < 1e-10);
    }

    #[test]
    fn single_precision() {
        let v = tanh_sinh(|x: f32| x.exp(), 0.0, 1.0);
        assert!((v - (1f32.exp() - 1.0)).abs() < 1e-5);
    }
}
