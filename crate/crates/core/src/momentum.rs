//! Momentum-space radial functions by spherical-Bessel (Hankel) transform.
//!
//! For a real radial function the momentum amplitude of state (n, l, m) is
//! `(-i)^l φ(p) Y_lm(p̂)` with
//!
//! ```text
//!     φ(p) ∝ ∫₀^{r_c} R(r) j_l(pr) r² dr .
//! ```
//!
//! The phase never reaches a density, so only φ is kept, normalized so that
//! ∫ φ² p² dp = 1. A hard wall leaves u'(r_c) ≠ 0, which makes φ² decay only
//! like p⁻⁶; the envelope of the computed tail is fitted and integrated
//! analytically beyond the cutoff.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radial::{QuantumState, RadialSolution};
use crate::specfun::{CompositeRule, gauss_legendre, sph_bessel_j_unchecked};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentumOptions {
    /// Initial cutoff; `None` picks max(30 p_rms, 40 / r_c).
    pub p_max: Option<f64>,
    /// Largest density mass allowed beyond the cutoff.
    pub tail_tolerance: f64,
    /// Raise the cutoff until the tail is small enough.
    pub auto_raise: bool,
    /// Hard ceiling for the raised cutoff, a.u.
    pub p_ceiling: f64,
    /// Divides every panel width; 2.0 doubles the point count.
    pub refinement: f64,
}

impl Default for MomentumOptions {
    fn default() -> Self {
        MomentumOptions {
            p_max: None,
            tail_tolerance: 1e-7,
            auto_raise: true,
            p_ceiling: 1e5,
            refinement: 1.0,
        }
    }
}

/// Normalized momentum radial function on a composite p-grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentumSolution {
    pub state: QuantumState,
    pub r_c: f64,
    /// Momenta in (0, p_max], strictly increasing.
    pub p_grid: Vec<f64>,
    pub weights: Vec<f64>,
    /// φ(p) at `p_grid`; Π(p) = φ(p)² |Y_lm|².
    pub values: Vec<f64>,
    pub p_max: f64,
    /// ∫_{p_max}^∞ φ² p² dp from the fitted envelope.
    pub tail_mass: f64,
    /// φ² ≈ tail_amplitude · p^-(6 + tail_exponent) beyond the cutoff.
    pub tail_amplitude: f64,
    pub tail_exponent: f64,
}

impl MomentumSolution {
    /// ∫ φ² p^{2+k} dp including the analytic tail beyond the cutoff.
    pub fn moment(&self, k: i32) -> Result<f64> {
        let body: f64 = self
            .p_grid
            .iter()
            .zip(&self.weights)
            .zip(&self.values)
            .map(|((p, w), v)| w * v * v * p.powi(2 + k))
            .sum();
        if !body.is_finite() {
            return Err(Error::Divergent(format!("momentum moment p^{k}")));
        }
        // ∫_P^∞ A p^{-(6+s)} p^{2+k} dp converges when 3 + s - k > 0
        let decay = 3.0 + self.tail_exponent - k as f64;
        if decay <= 0.0 {
            return Err(Error::Divergent(format!(
                "⟨p^{k}⟩ with a p^-{} tail",
                6.0 + self.tail_exponent
            )));
        }
        Ok(body + self.tail_amplitude * self.p_max.powf(-decay) / decay)
    }

    /// ∫ Π d³p = ∫ φ² p² dp
    pub fn norm(&self) -> f64 {
        self.moment(0).unwrap_or(f64::NAN)
    }
}

fn panel_rule(a: f64, b: f64, max_width: f64, base: &crate::specfun::QuadratureRule) -> CompositeRule {
    let panels = (((b - a) / max_width).ceil() as usize).max(1);
    let bp: Vec<f64> = (0..=panels)
        .map(|k| a + (b - a) * k as f64 / panels as f64)
        .collect();
    CompositeRule::from_breakpoints(&bp, base)
}

/// Panel width able to resolve u(r) itself.
fn radial_resolution(sol: &RadialSolution) -> f64 {
    (sol.support / 64.0).min(0.5)
}

/// Unnormalized amplitude ∫₀^{r_c} R(r) j_l(pr) r² dr.
///
/// Panels never exceed a quarter wavelength π/(2p); every panel is checked
/// against its two halves and the halved value is returned.
pub fn transform_point(sol: &RadialSolution, p: f64) -> Result<f64> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::Domain(format!("momentum {p} must be positive")));
    }
    let l = sol.state.l as usize;
    let base = gauss_legendre(8);
    let width = (std::f64::consts::FRAC_PI_2 / p).min(radial_resolution(sol));
    let panels = ((sol.support / width).ceil() as usize).max(1);
    let h = sol.support / panels as f64;
    let f = |r: f64| sol.u(r) * r * sph_bessel_j_unchecked(l, p * r);
    let mut total = 0.0;
    let mut worst = (0.0, 0.0, 0.0_f64);
    for k in 0..panels {
        let a = k as f64 * h;
        let b = a + h;
        let m = 0.5 * (a + b);
        let whole = base.integrate(a, b, f);
        let halves = base.integrate(a, m, f) + base.integrate(m, b, f);
        let delta = (whole - halves).abs();
        if delta > worst.2 {
            worst = (a, b, delta);
        }
        total += halves;
    }
    if worst.2 > 1e-10 {
        return Err(Error::Quadrature {
            lo: worst.0,
            hi: worst.1,
            delta: worst.2,
        });
    }
    Ok(total)
}

struct RawTransform {
    p: Vec<f64>,
    w: Vec<f64>,
    phi: Vec<f64>,
}

fn p_breakpoints(p_max: f64, width: f64) -> Vec<f64> {
    // log-spaced panels on (1e-4, 1], linear panels above
    let mut bp = vec![0.0, 1e-4];
    let top = p_max.min(1.0);
    let decades = (top / 1e-4).log10();
    let n_log = ((decades * 4.0).ceil() as usize).max(1);
    for k in 1..=n_log {
        let next = 1e-4 * 10f64.powf(decades * k as f64 / n_log as f64);
        let prev = *bp.last().unwrap();
        // keep log panels no wider than the linear width
        let sub = (((next - prev) / width).ceil() as usize).max(1);
        for j in 1..=sub {
            bp.push(prev + (next - prev) * j as f64 / sub as f64);
        }
    }
    if p_max > 1.0 {
        let panels = (((p_max - 1.0) / width).ceil() as usize).max(1);
        for k in 1..=panels {
            bp.push(1.0 + (p_max - 1.0) * k as f64 / panels as f64);
        }
    }
    bp
}

fn raw_transform(sol: &RadialSolution, p_max: f64, p_rms: f64, refinement: f64) -> RawTransform {
    let l = sol.state.l as usize;
    let r_width = (std::f64::consts::FRAC_PI_2 / p_max).min(radial_resolution(sol)) / refinement;
    let r_rule = panel_rule(0.0, sol.support, r_width, &gauss_legendre(8));
    // weight · u(r) · r, so that φ(p) = Σ f_i j_l(p r_i)
    let f: Vec<f64> = r_rule
        .nodes
        .iter()
        .zip(&r_rule.weights)
        .map(|(&r, &w)| w * sol.u(r) * r)
        .collect();

    let p_width = (4.0 / sol.support).min(0.2 * p_rms) / refinement;
    let bp = p_breakpoints(p_max, p_width);
    let p_rule = CompositeRule::from_breakpoints(&bp, &gauss_legendre(16));
    let phi: Vec<f64> = p_rule
        .nodes
        .par_iter()
        .map(|&p| {
            r_rule
                .nodes
                .iter()
                .zip(&f)
                .map(|(&r, &fi)| fi * sph_bessel_j_unchecked(l, p * r))
                .sum()
        })
        .collect();
    RawTransform {
        p: p_rule.nodes,
        w: p_rule.weights,
        phi,
    }
}

/// Fits φ² ≈ A p^-(6+s) over the last 40 % of the grid.
fn fit_tail(raw: &RawTransform, p_max: f64) -> (f64, f64) {
    let window_mean = |lo: f64, hi: f64| {
        let (mut num, mut den, mut pc) = (0.0, 0.0, 0.0);
        for ((&p, &w), &v) in raw.p.iter().zip(&raw.w).zip(&raw.phi) {
            if p >= lo && p < hi {
                num += w * p.powi(6) * v * v;
                pc += w * p;
                den += w;
            }
        }
        if den > 0.0 { (num / den, pc / den) } else { (0.0, 0.5 * (lo + hi)) }
    };
    let (g1, p1) = window_mean(0.6 * p_max, 0.8 * p_max);
    let (g2, p2) = window_mean(0.8 * p_max, p_max * (1.0 + 1e-12));
    let s = if g1 > 0.0 && g2 > 0.0 {
        (-(g2 / g1).ln() / (p2 / p1).ln()).clamp(0.0, 4.0)
    } else {
        0.0
    };
    (g2 * p2.powf(s), s)
}

/// Builds the normalized momentum radial function of `sol`.
pub fn build_momentum(sol: &RadialSolution, opts: &MomentumOptions) -> Result<MomentumSolution> {
    let p2 = crate::measures::kinetic_p2(sol);
    let p_rms = p2.sqrt();
    let mut p_max = opts
        .p_max
        .unwrap_or_else(|| (30.0 * p_rms).max(40.0 / sol.r_c));
    loop {
        let raw = raw_transform(sol, p_max, p_rms, opts.refinement);
        let (amp, s) = fit_tail(&raw, p_max);
        let body: f64 = raw
            .p
            .iter()
            .zip(&raw.w)
            .zip(&raw.phi)
            .map(|((p, w), v)| w * v * v * p * p)
            .sum();
        let tail_raw = amp * p_max.powf(-(3.0 + s)) / (3.0 + s);
        let norm = body + tail_raw;
        let tail_mass = tail_raw / norm;
        if tail_mass < opts.tail_tolerance {
            let scale = 1.0 / norm.sqrt();
            return Ok(MomentumSolution {
                state: sol.state,
                r_c: sol.r_c,
                p_grid: raw.p,
                weights: raw.w,
                values: raw.phi.iter().map(|v| v * scale).collect(),
                p_max,
                tail_mass,
                tail_amplitude: amp / norm,
                tail_exponent: s,
            });
        }
        // tail ∝ P^-(3+s): the cutoff that would meet the tolerance, plus margin
        let suggested =
            p_max * (tail_mass / opts.tail_tolerance).powf(1.0 / (3.0 + s)) * 1.1;
        if !opts.auto_raise || suggested > opts.p_ceiling {
            return Err(Error::CutoffTooSmall {
                p_max,
                tail_mass,
                suggested,
            });
        }
        p_max = suggested;
    }
}
