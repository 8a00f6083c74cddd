//! Information measures and statistical complexities of the hydrogen atom
//! confined in an impenetrable sphere.

pub mod complexity;
pub mod error;
pub mod measures;
pub mod momentum;
pub mod pipeline;
pub mod radial;
pub mod specfun;

pub use error::{Error, Result};
