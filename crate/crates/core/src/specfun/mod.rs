//! Special functions and quadrature primitives.

mod bessel;
mod hypergeometric;
mod quadrature;

pub use bessel::{MAX_ORDER as MAX_BESSEL_ORDER, sph_bessel_j};
pub(crate) use bessel::sph_bessel_j_unchecked;
pub use hypergeometric::kummer_1f1;
pub(crate) use quadrature::gauss_lobatto;
pub use quadrature::{CompositeRule, QuadratureRule, gauss_legendre, graded_breakpoints};

use crate::error::{Error, Result};

/// Legendre polynomial P_l(u) by the three-term recurrence.
pub fn legendre_p(l: usize, u: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&u) {
        return Err(Error::Domain(format!("Legendre argument {u} outside [-1, 1]")));
    }
    Ok(quadrature::legendre_pair(l, u).0)
}
