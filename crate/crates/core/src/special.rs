//! Special functions missing from `libm`.

use core::f64::consts::SQRT_2;

const EPS: f64 = 1e-15;
const MAX_ITER: usize = 100_000;
const TINY: f64 = 1e-300;

/// Regularized lower incomplete gamma function `P(a, x)`.
///
/// Series below `x = a + 1`, Lentz continued fraction for the upper tail
/// above it.
pub fn regularized_gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return 1.0;
    }
    let log_prefix = -x + a * libm::log(x) - libm::lgamma(a);
    if x < a + 1.0 {
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut ap = a;
        for _ in 0..MAX_ITER {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * EPS {
                break;
            }
        }
        (sum * libm::exp(log_prefix)).min(1.0)
    } else {
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..MAX_ITER {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < TINY {
                d = TINY;
            }
            c = b + an / c;
            if c.abs() < TINY {
                c = TINY;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < EPS {
                break;
            }
        }
        (1.0 - libm::exp(log_prefix) * h).max(0.0)
    }
}

/// CDF of a Gamma distribution with shape `k` and scale `theta`.
pub fn gamma_cdf(x: f64, k: f64, theta: f64) -> f64 {
    debug_assert!(k > 0.0 && theta > 0.0);
    regularized_gamma_p(k, x / theta)
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::LN_2;

    fn gamma_pdf(x: f64, k: f64, theta: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        libm::exp((k - 1.0) * libm::log(x) - x / theta - libm::lgamma(k) - k * libm::log(theta))
    }

    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        let m = 0.5 * (a + b);
        (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b))
    }

    fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let left = simpson(f, a, m);
        let right = simpson(f, m, b);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        adaptive(f, a, m, left, tol / 2.0, depth - 1)
            + adaptive(f, m, b, right, tol / 2.0, depth - 1)
    }

    fn quad(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        adaptive(f, a, b, simpson(f, a, b), 1e-13, 50)
    }

    #[test]
    fn edges_and_exponential() {
        assert_eq!(gamma_cdf(0.0, 2.0, 1.0), 0.0);
        assert_eq!(gamma_cdf(-1.0, 2.0, 1.0), 0.0);
        assert!((gamma_cdf(1.7 * LN_2, 1.0, 1.7) - 0.5).abs() < 1e-14);
        assert!((gamma_cdf(1e6, 3.0, 1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn matches_quadrature_oracle() {
        let (k, theta) = (2.5, 1.3);
        for i in 1..=40 {
            let x = 0.25 * i as f64;
            let oracle = quad(&|t| gamma_pdf(t, k, theta), 0.0, x);
            let got = gamma_cdf(x, k, theta);
            assert!((got - oracle).abs() < 1e-8, "x={x}: {got} vs {oracle}");
        }
    }

    #[test]
    fn known_values() {
        // P(1/2, x) = erf(sqrt(x)).
        for x in [0.01, 0.3, 1.0, 2.5, 9.0] {
            let want = libm::erf(libm::sqrt(x));
            assert!((regularized_gamma_p(0.5, x) - want).abs() < 1e-13);
        }
        // Integer shape: P(3, x) = 1 - e^{-x}(1 + x + x²/2).
        for x in [0.1, 1.0, 4.0, 20.0] {
            let want = 1.0 - libm::exp(-x) * (1.0 + x + x * x / 2.0);
            assert!((regularized_gamma_p(3.0, x) - want).abs() < 1e-13);
        }
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-16);
        assert!((normal_cdf(1.959_963_984_540_054) - 0.975).abs() < 1e-12);
    }

    #[test]
    fn monotone() {
        for &k in &[0.05, 0.7, 3.0, 40.0, 900.0] {
            let mut prev = 0.0;
            for i in 0..2000 {
                let v = gamma_cdf(i as f64 * k / 500.0, k, 1.0);
                assert!(v >= prev - 1e-14 && v <= 1.0);
                prev = v;
            }
        }
    }
}
