//! Exponential integrator functions `phi_n(x) = sum_k (-x)^k / (k+n)!`.
//!
//! `phi_0(x) = e^{-x}`, `phi_1(x) = (1 - e^{-x})/x`, and
//! `phi_{n+1}(x) = (1/n! - phi_n(x)) / x`. They give cancellation-free forms of
//! the step responses and pulse integrals in this crate.

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

// The upward recurrence loses about log10(n!/x^n) digits, so the series is
// used up to |x| = n + 1, where its terms still decrease monotonically.
fn series_radius(n: usize) -> f64 {
    (n + 1) as f64
}

/// `phi_n(x)` for real `x >= 0` (and moderately negative `x`).
pub fn phi(n: usize, x: f64) -> f64 {
    if x.abs() < series_radius(n) {
        let mut term = 1.0 / factorial(n);
        let mut sum = term;
        for k in 1..80 {
            term *= -x / (k + n) as f64;
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        let mut value = (-x).exp();
        for k in 0..n {
            value = (1.0 / factorial(k) - value) / x;
        }
        value
    }
}

/// Derivative `phi_n'(x) = n phi_{n+1}(x) - phi_n(x)`.
pub fn phi_prime(n: usize, x: f64) -> f64 {
    n as f64 * phi(n + 1, x) - phi(n, x)
}

/// Third derivative, from the same recurrence applied three times.
pub fn phi_third(n: usize, x: f64) -> f64 {
    let nf = n as f64;
    nf * (nf + 1.0) * (nf + 2.0) * phi(n + 3, x) - 3.0 * nf * (nf + 1.0) * phi(n + 2, x)
        + 3.0 * nf * phi(n + 1, x)
        - phi(n, x)
}

/// Relative gap below which [`phi_divided_difference`] switches to a Taylor
/// expansion about the midpoint.
pub const NEAR_EQUAL_GAP: f64 = 1e-4;

/// Divided difference `(phi_n(x) - phi_n(y)) / (x - y)`, stable as `x -> y`.
pub fn phi_divided_difference(n: usize, x: f64, y: f64) -> f64 {
    let scale = x.abs().max(y.abs());
    if scale == 0.0 || (x - y).abs() < NEAR_EQUAL_GAP * scale {
        let m = 0.5 * (x + y);
        let d = 0.5 * (x - y);
        phi_prime(n, m) + d * d / 6.0 * phi_third(n, m)
    } else {
        (phi(n, x) - phi(n, y)) / (x - y)
    }
}
