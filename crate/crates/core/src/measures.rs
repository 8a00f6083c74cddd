//! Shannon, Rényi, Fisher and Onicescu measures in position and momentum space.
//!
//! Both densities factor into a radial part and |Y_lm|², so every measure is
//! a radial integral combined with an angular constant:
//!
//! * Shannon: S = S_radial + S_angular
//! * entropic moments: ∫ρ^q = (∫ f^q x² dx)(∫ |Y|^{2q} dΩ)
//!
//! where f is R² in position space and φ² in momentum space.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::momentum::MomentumSolution;
use crate::radial::{QuantumState, RadialSolution};
use crate::specfun::{CompositeRule, gauss_legendre, graded_breakpoints, legendre_p};

/// Rényi order used in position space for the published tables.
pub const DEFAULT_ALPHA: f64 = 0.6;
/// Rényi order used in momentum space; conjugate to 3/5.
pub const DEFAULT_BETA: f64 = 3.0;

/// Lower bound on S_r + S_p in three dimensions, 3(1 + ln π).
pub const BBM_BOUND: f64 = 6.434_189_657_547_873;

const NORM_TOLERANCE: f64 = 1e-6;

/// Angular integrals of |Y_l0|².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngularFactors {
    pub l: u32,
    /// −∫ |Y_l0|² ln |Y_l0|² dΩ, nats
    pub shannon_ang: f64,
    /// (q, ∫ |Y_l0|^{2q} dΩ)
    pub power_integrals: Vec<(f64, f64)>,
}

impl AngularFactors {
    pub fn power(&self, q: f64) -> Option<f64> {
        self.power_integrals
            .iter()
            .find(|(k, _)| *k == q)
            .map(|(_, v)| *v)
    }
}

/// Composite rule on [-1, 1] with graded panels on both sides of every zero
/// of P_l, where |P_l|^{2q} and P_l² ln P_l² are not smooth.
fn legendre_zero_rule(l: u32) -> CompositeRule {
    let mut cuts = vec![-1.0];
    if l > 0 {
        cuts.extend(gauss_legendre(l as usize).nodes);
    }
    cuts.push(1.0);
    let mut bp: Vec<f64> = Vec::new();
    let last = cuts.len() - 2;
    for (i, seg) in cuts.windows(2).enumerate() {
        let piece = graded_breakpoints(seg[0], seg[1], i > 0, i < last, 14, 0.15, 0.1);
        let skip = usize::from(!bp.is_empty());
        bp.extend(piece.into_iter().skip(skip));
    }
    CompositeRule::from_breakpoints(&bp, &gauss_legendre(24))
}

type AngularKey = (u32, u64);

fn angular_cache() -> &'static RwLock<HashMap<AngularKey, f64>> {
    static CACHE: OnceLock<RwLock<HashMap<AngularKey, f64>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn ylm_sq_prefactor(l: u32) -> f64 {
    (2 * l + 1) as f64 / (4.0 * PI)
}

/// ∫ |Y_l0|^{2q} dΩ; cached per (l, q), written once per key.
pub fn angular_power(l: u32, q: f64) -> f64 {
    let key = (l, q.to_bits());
    if let Some(v) = angular_cache().read().unwrap().get(&key) {
        return *v;
    }
    let rule = legendre_zero_rule(l);
    let c = ylm_sq_prefactor(l);
    let integral = rule.integrate(|u| {
        let p2 = legendre_p(l as usize, u).unwrap().powi(2);
        (c * p2).powf(q)
    });
    let v = 2.0 * PI * integral;
    *angular_cache().write().unwrap().entry(key).or_insert(v)
}

/// −∫ |Y_l0|² ln |Y_l0|² dΩ
pub fn angular_shannon(l: u32) -> f64 {
    let key = (l, u64::MAX);
    if let Some(v) = angular_cache().read().unwrap().get(&key) {
        return *v;
    }
    let rule = legendre_zero_rule(l);
    let c = ylm_sq_prefactor(l);
    let integral = rule.integrate(|u| {
        let y2 = c * legendre_p(l as usize, u).unwrap().powi(2);
        if y2 > 0.0 { -y2 * y2.ln() } else { 0.0 }
    });
    let v = 2.0 * PI * integral;
    *angular_cache().write().unwrap().entry(key).or_insert(v)
}

pub fn angular_factors(l: u32, exponents: &[f64]) -> AngularFactors {
    let mut qs: Vec<f64> = exponents.to_vec();
    if !qs.contains(&1.0) {
        qs.push(1.0);
    }
    qs.sort_by(f64::total_cmp);
    qs.dedup();
    AngularFactors {
        l,
        shannon_ang: angular_shannon(l),
        power_integrals: qs.into_iter().map(|q| (q, angular_power(l, q))).collect(),
    }
}

/// Radial factor f(x) of a density ρ(x) = f(|x|) |Y_lm(x̂)|² sampled on a
/// quadrature rule in x; `weights` exclude the x² Jacobian.
#[derive(Debug, Clone)]
pub struct RadialDensity {
    pub l: u32,
    pub m: i32,
    pub x: Vec<f64>,
    pub weights: Vec<f64>,
    pub f: Vec<f64>,
}

impl RadialDensity {
    pub fn from_position(sol: &RadialSolution) -> Self {
        RadialDensity {
            l: sol.state.l,
            m: sol.state.m,
            x: sol.grid.clone(),
            weights: sol.weights.clone(),
            f: sol.values.iter().map(|v| v * v).collect(),
        }
    }

    pub fn from_momentum(sol: &MomentumSolution) -> Self {
        RadialDensity {
            l: sol.state.l,
            m: sol.state.m,
            x: sol.p_grid.clone(),
            weights: sol.weights.clone(),
            f: sol.values.iter().map(|v| v * v).collect(),
        }
    }

    fn integrate<F: Fn(f64, f64) -> f64>(&self, g: F) -> f64 {
        self.x
            .iter()
            .zip(&self.weights)
            .zip(&self.f)
            .map(|((&x, &w), &f)| w * x * x * g(x, f))
            .sum()
    }

    /// ∫ f x² dx
    pub fn mass(&self) -> f64 {
        self.integrate(|_, f| f)
    }

    fn require_m_zero(&self) -> Result<()> {
        if self.m != 0 {
            return Err(Error::Contract(format!(
                "angular factors are implemented for m = 0 only (m = {})",
                self.m
            )));
        }
        Ok(())
    }

    /// −∫ ρ ln ρ d³x, with 0 ln 0 = 0.
    pub fn shannon(&self) -> Result<f64> {
        self.require_m_zero()?;
        let radial = self.integrate(|_, f| if f > 0.0 { -f * f.ln() } else { 0.0 });
        Ok(radial + angular_shannon(self.l))
    }

    /// ∫ ρ^q d³x
    pub fn entropic_moment(&self, q: f64) -> Result<f64> {
        self.require_m_zero()?;
        let radial = self.integrate(|_, f| if f > 0.0 { f.powf(q) } else { 0.0 });
        Ok(radial * angular_power(self.l, q))
    }

    /// ln(∫ ρ^q d³x) / (1 − q)
    pub fn renyi(&self, q: f64) -> Result<f64> {
        check_order(q)?;
        let moment = self.entropic_moment(q)?;
        if !(moment.is_finite() && moment > 0.0) {
            return Err(Error::Divergent(format!("entropic moment of order {q}")));
        }
        Ok(moment.ln() / (1.0 - q))
    }

    /// ∫ ρ² d³x
    pub fn disequilibrium(&self) -> Result<f64> {
        self.entropic_moment(2.0)
    }
}

fn check_order(q: f64) -> Result<()> {
    if !(q.is_finite() && q > 0.0) || q == 1.0 {
        return Err(Error::Domain(format!("Rényi order must be positive and ≠ 1, got {q}")));
    }
    Ok(())
}

fn check_normalized(rsol: &RadialSolution, psol: &MomentumSolution) -> Result<()> {
    let nr = rsol.norm();
    let np = psol.norm();
    if (nr - 1.0).abs() > NORM_TOLERANCE || (np - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::Contract(format!(
            "densities must be normalized (position {nr}, momentum {np})"
        )));
    }
    if rsol.state != psol.state || rsol.r_c != psol.r_c {
        return Err(Error::Contract(
            "position and momentum solutions describe different cells".into(),
        ));
    }
    Ok(())
}

/// ⟨p²⟩ from the position-space kinetic integral
/// ∫ [(R')² + l(l+1) R²/r²] r² dr = ∫ [u'² + l(l+1) u²/r²] dr.
pub fn kinetic_p2(sol: &RadialSolution) -> f64 {
    let ll = (sol.state.l * (sol.state.l + 1)) as f64;
    let s = sol.samples();
    s.r.iter()
        .zip(&s.w)
        .zip(s.u.iter().zip(&s.du))
        .map(|((r, w), (u, du))| w * (du * du + ll * u * u / (r * r)))
        .sum()
}

/// ∫ R² r^{2+k} dr
pub fn radial_moment(sol: &RadialSolution, k: i32) -> f64 {
    sol.grid
        .iter()
        .zip(&sol.weights)
        .zip(&sol.values)
        .map(|((r, w), v)| w * v * v * r.powi(2 + k))
        .sum()
}

pub fn shannon_pair(rsol: &RadialSolution, psol: &MomentumSolution) -> Result<(f64, f64)> {
    check_normalized(rsol, psol)?;
    Ok((
        RadialDensity::from_position(rsol).shannon()?,
        RadialDensity::from_momentum(psol).shannon()?,
    ))
}

pub fn renyi_pair(
    rsol: &RadialSolution,
    psol: &MomentumSolution,
    alpha: f64,
    beta: f64,
) -> Result<(f64, f64)> {
    check_order(alpha)?;
    check_order(beta)?;
    check_normalized(rsol, psol)?;
    Ok((
        RadialDensity::from_position(rsol).renyi(alpha)?,
        RadialDensity::from_momentum(psol).renyi(beta)?,
    ))
}

/// (I_r, I_p) for a real central-field state:
/// I_r = 4⟨p²⟩ − 2(2l+1)|m|⟨r⁻²⟩, I_p = 4⟨r²⟩ − 2(2l+1)|m|⟨p⁻²⟩.
pub fn fisher_pair(rsol: &RadialSolution, psol: &MomentumSolution) -> Result<(f64, f64)> {
    check_normalized(rsol, psol)?;
    let state = rsol.state;
    let p2 = kinetic_p2(rsol);
    let r2 = radial_moment(rsol, 2);
    let m_term = 2.0 * (2 * state.l + 1) as f64 * state.m.unsigned_abs() as f64;
    if m_term == 0.0 {
        return Ok((4.0 * p2, 4.0 * r2));
    }
    let inv_r2 = radial_moment(rsol, -2);
    let inv_p2 = psol.moment(-2)?;
    Ok((4.0 * p2 - m_term * inv_r2, 4.0 * r2 - m_term * inv_p2))
}

pub fn onicescu_pair(rsol: &RadialSolution, psol: &MomentumSolution) -> Result<(f64, f64)> {
    check_normalized(rsol, psol)?;
    Ok((
        RadialDensity::from_position(rsol).disequilibrium()?,
        RadialDensity::from_momentum(psol).disequilibrium()?,
    ))
}

/// The twelve information scalars of one (state, r_c) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureSet {
    pub state: QuantumState,
    pub r_c: f64,
    pub energy: f64,
    pub alpha: f64,
    pub beta: f64,
    pub s_r: f64,
    pub s_p: f64,
    pub s_t: f64,
    pub r_r: f64,
    pub r_p: f64,
    pub r_t: f64,
    pub i_r: f64,
    pub i_p: f64,
    pub i_t: f64,
    pub e_r: f64,
    pub e_p: f64,
    pub e_t: f64,
    /// ⟨r²⟩
    pub r2: f64,
    /// ⟨p²⟩ from the position-space kinetic integral.
    pub p2: f64,
    /// ⟨p²⟩ from the momentum density, including the fitted tail.
    pub p2_momentum: f64,
    pub inv_r2: f64,
    pub inv_p2: f64,
}

pub fn assemble_measures(
    rsol: &RadialSolution,
    psol: &MomentumSolution,
    alpha: f64,
    beta: f64,
) -> Result<MeasureSet> {
    let (s_r, s_p) = shannon_pair(rsol, psol)?;
    let (r_r, r_p) = renyi_pair(rsol, psol, alpha, beta)?;
    let (i_r, i_p) = fisher_pair(rsol, psol)?;
    let (e_r, e_p) = onicescu_pair(rsol, psol)?;
    Ok(MeasureSet {
        state: rsol.state,
        r_c: rsol.r_c,
        energy: rsol.energy,
        alpha,
        beta,
        s_r,
        s_p,
        s_t: s_r + s_p,
        r_r,
        r_p,
        r_t: r_r + r_p,
        i_r,
        i_p,
        i_t: i_r * i_p,
        e_r,
        e_p,
        e_t: e_r * e_p,
        r2: radial_moment(rsol, 2),
        p2: kinetic_p2(rsol),
        p2_momentum: psol.moment(2)?,
        inv_r2: radial_moment(rsol, -2),
        inv_p2: psol.moment(-2)?,
    })
}
