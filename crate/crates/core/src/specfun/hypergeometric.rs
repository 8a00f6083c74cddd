//! Kummer's confluent hypergeometric function M(a, b, x) = 1F1(a; b; x).

use crate::error::{Error, Result};

const MAX_TERMS: usize = 5000;

fn is_non_positive_integer(v: f64) -> bool {
    v <= 0.0 && v.fract() == 0.0
}

/// Evaluates 1F1(a; b; x) by its ascending series.
///
/// When `a` is a non-positive integer the series terminates and the result is
/// the exact polynomial. Negative `x` is mapped through Kummer's transformation
/// `M(a, b, x) = e^x M(b - a, b, -x)` so the summed series never alternates
/// because of the argument sign.
pub fn kummer_1f1(a: f64, b: f64, x: f64) -> Result<f64> {
    if is_non_positive_integer(b) {
        return Err(Error::Domain(format!(
            "1F1 lower parameter b = {b} is a non-positive integer"
        )));
    }
    if !(a.is_finite() && b.is_finite() && x.is_finite()) {
        return Err(Error::Domain(format!("non-finite 1F1 argument ({a}, {b}, {x})")));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if x < 0.0 && !is_non_positive_integer(a) {
        return Ok(x.exp() * ascending_series(b - a, b, -x)?);
    }
    ascending_series(a, b, x)
}

fn ascending_series(a: f64, b: f64, x: f64) -> Result<f64> {
    // Neumaier-compensated running sum.
    let mut sum = 1.0_f64;
    let mut comp = 0.0_f64;
    let mut term = 1.0_f64;
    let terminating = is_non_positive_integer(a);
    // Terms may pass through a small factor (a + k) before growing again, so
    // the stopping test only applies once k has passed -a.
    let k_min = if a < 0.0 { (-a).ceil() as usize } else { 0 };

    for k in 0..MAX_TERMS {
        let kf = k as f64;
        term *= (a + kf) * x / ((b + kf) * (kf + 1.0));
        if term == 0.0 && terminating {
            return Ok(sum + comp);
        }
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        if !sum.is_finite() {
            break;
        }
        if k >= k_min && term.abs() <= 1e-17 * (sum + comp).abs() {
            let ratio = ((a + kf + 1.0) * x / ((b + kf + 1.0) * (kf + 2.0))).abs();
            if ratio < 1.0 {
                return Ok(sum + comp);
            }
        }
    }
    Err(Error::HypergeometricNonConvergence {
        a,
        b,
        x,
        terms: MAX_TERMS,
    })
}
