//! Spherical Bessel functions of the first kind, orders 0 through 4.

use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 4;

/// Below these arguments the closed trigonometric forms lose digits to
/// cancellation and the power series is used instead.
const SERIES_CROSSOVER: [f64; MAX_ORDER + 1] = [0.5, 0.5, 1.0, 1.5, 2.0];

/// (2l+1)!! for l = 0..=4
const DOUBLE_FACTORIAL: [f64; MAX_ORDER + 1] = [1.0, 3.0, 15.0, 105.0, 945.0];

/// j_l(x) for `l` in 0..=4 and `x >= 0`.
pub fn sph_bessel_j(l: usize, x: f64) -> Result<f64> {
    if l > MAX_ORDER {
        return Err(Error::UnsupportedOrder(l));
    }
    if x < 0.0 || !x.is_finite() {
        return Err(Error::Domain(format!("spherical Bessel argument {x} must be >= 0")));
    }
    Ok(sph_bessel_j_unchecked(l, x))
}

/// Same as [`sph_bessel_j`] without argument validation; used in hot loops.
#[inline]
pub(crate) fn sph_bessel_j_unchecked(l: usize, x: f64) -> f64 {
    if x < SERIES_CROSSOVER[l] {
        return series(l, x);
    }
    let (s, c) = x.sin_cos();
    let inv = 1.0 / x;
    match l {
        0 => s * inv,
        1 => (s * inv - c) * inv,
        2 => {
            let i2 = inv * inv;
            (3.0 * i2 - 1.0) * s * inv - 3.0 * c * i2
        }
        3 => {
            let i2 = inv * inv;
            (15.0 * i2 - 6.0) * s * i2 - (15.0 * i2 - 1.0) * c * inv
        }
        4 => {
            let i2 = inv * inv;
            (105.0 * i2 * i2 - 45.0 * i2 + 1.0) * s * inv - (105.0 * i2 - 10.0) * c * i2
        }
        _ => unreachable!(),
    }
}

fn series(l: usize, x: f64) -> f64 {
    let z = -0.5 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1;
    loop {
        term *= z / (k as f64 * (2 * l + 2 * k + 1) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() || k > 60 {
            break;
        }
        k += 1;
    }
    x.powi(l as i32) / DOUBLE_FACTORIAL[l] * sum
}
