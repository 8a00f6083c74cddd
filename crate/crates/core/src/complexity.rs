//! Statistical complexities C = A·e^{bB} built from an order factor
//! A ∈ {E, I} and a disorder factor B ∈ {S, R}.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::MeasureSet;
use crate::radial::QuantumState;

/// Scaling parameters evaluated by default: 2/3 is labelled (1), 1 is (2).
pub const DEFAULT_B_VALUES: [f64; 2] = [2.0 / 3.0, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    /// E·e^{bS}; the LMC form at b = 1
    ES,
    /// E·e^{bR}
    ER,
    /// I·e^{bS}; the Fisher-Shannon form at b = 2/3
    IS,
    /// I·e^{bR}
    IR,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Space {
    #[serde(rename = "r")]
    Position,
    #[serde(rename = "p")]
    Momentum,
    #[serde(rename = "t")]
    Total,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::ES, Family::ER, Family::IS, Family::IR];
}

impl Space {
    pub const ALL: [Space; 3] = [Space::Position, Space::Momentum, Space::Total];
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::ES => "ES",
            Family::ER => "ER",
            Family::IS => "IS",
            Family::IR => "IR",
        };
        f.write_str(s)
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Space::Position => "r",
            Space::Momentum => "p",
            Space::Total => "t",
        };
        f.write_str(s)
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "ES" => Ok(Family::ES),
            "ER" => Ok(Family::ER),
            "IS" => Ok(Family::IS),
            "IR" => Ok(Family::IR),
            other => Err(Error::Config(format!("unknown complexity family {other:?}"))),
        }
    }
}

impl FromStr for Space {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "r" => Ok(Space::Position),
            "p" => Ok(Space::Momentum),
            "t" => Ok(Space::Total),
            other => Err(Error::Config(format!("unknown space {other:?}"))),
        }
    }
}

/// A·e^{bB}
pub fn complexity_value(order: f64, disorder: f64, b: f64) -> Result<f64> {
    if !(order > 0.0) {
        return Err(Error::Domain(format!("order factor must be positive, got {order}")));
    }
    if !disorder.is_finite() {
        return Err(Error::Domain(format!("disorder factor must be finite, got {disorder}")));
    }
    Ok(order * (b * disorder).exp())
}

/// (order, disorder) scalars feeding one family in one space.
pub fn factors(ms: &MeasureSet, family: Family, space: Space) -> (f64, f64) {
    let (e, i, s, r) = match space {
        Space::Position => (ms.e_r, ms.i_r, ms.s_r, ms.r_r),
        Space::Momentum => (ms.e_p, ms.i_p, ms.s_p, ms.r_p),
        Space::Total => (ms.e_t, ms.i_t, ms.s_t, ms.r_t),
    };
    match family {
        Family::ES => (e, s),
        Family::ER => (e, r),
        Family::IS => (i, s),
        Family::IR => (i, r),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityEntry {
    pub family: Family,
    pub space: Space,
    pub b: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityReport {
    pub state: QuantumState,
    pub r_c: f64,
    pub alpha: f64,
    pub beta: f64,
    pub entries: Vec<ComplexityEntry>,
}

impl ComplexityReport {
    pub fn get(&self, family: Family, space: Space, b: f64) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.family == family && e.space == space && e.b == b)
            .map(|e| e.value)
    }
}

/// All families × spaces × `b_values` for one measure set.
pub fn assemble_report(ms: &MeasureSet, b_values: &[f64]) -> Result<ComplexityReport> {
    if b_values.is_empty() {
        return Err(Error::Config("at least one scaling parameter b is required".into()));
    }
    let mut entries = Vec::with_capacity(12 * b_values.len());
    for &family in &Family::ALL {
        for &space in &Space::ALL {
            let (a, d) = factors(ms, family, space);
            for &b in b_values {
                entries.push(ComplexityEntry {
                    family,
                    space,
                    b,
                    value: complexity_value(a, d, b)?,
                });
            }
        }
    }
    Ok(ComplexityReport {
        state: ms.state,
        r_c: ms.r_c,
        alpha: ms.alpha,
        beta: ms.beta,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_examples() {
        assert_eq!(complexity_value(0.73, 5.1, 0.0).unwrap(), 0.73);
        assert_eq!(complexity_value(1.0, 0.0, 1.0).unwrap(), 1.0);
        let lmc = complexity_value(0.0397887, 4.14473, 1.0).unwrap();
        assert!((lmc - 2.510692).abs() / 2.510692 < 2e-6, "{lmc}");
        assert!(complexity_value(0.0, 1.0, 1.0).is_err());
        assert!(complexity_value(-1.0, 1.0, 1.0).is_err());
        assert!(complexity_value(1.0, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn labels_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.to_string().parse::<Family>().unwrap(), f);
        }
        for s in Space::ALL {
            assert_eq!(s.to_string().parse::<Space>().unwrap(), s);
        }
        assert!("XX".parse::<Family>().is_err());
    }
}
