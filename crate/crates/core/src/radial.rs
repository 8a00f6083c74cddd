//! Hard-wall confined hydrogen: radial eigenproblem and wavefunctions.
//!
//! The reduced radial function u(r) = r R(r) is expanded in the Lagrange
//! basis on Legendre-Gauss-Lobatto points mapped linearly onto [0, r_c].
//! Dropping the two boundary functions imposes u(0) = u(r_c) = 0, and the
//! Lobatto rule lumps the overlap matrix, so the Hamiltonian
//!
//! ```text
//!     H = ½ M^{-1/2} K M^{-1/2} + diag(l(l+1)/2r² - 1/r)
//! ```
//!
//! is a dense symmetric matrix. Its sorted eigenvalues are the confined
//! levels for the given l; the (n-l)-th one belongs to state (n, l).

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{
    CompositeRule, gauss_legendre, gauss_lobatto, graded_breakpoints, kummer_1f1,
};

const ORBITAL_LETTERS: [char; 5] = ['s', 'p', 'd', 'f', 'g'];

/// Labels of the eight states covered by the tables and figures.
pub const SUPPORTED_STATES: [&str; 8] = ["1s", "2s", "2p", "3s", "3p", "3d", "4f", "5g"];

/// Quantum numbers (n, l, m) of one confined level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuantumState {
    pub n: u32,
    pub l: u32,
    pub m: i32,
}

impl QuantumState {
    pub fn new(n: u32, l: u32, m: i32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidState("n must be >= 1".into()));
        }
        if l >= n {
            return Err(Error::InvalidState(format!("l = {l} must be < n = {n}")));
        }
        if l as usize >= ORBITAL_LETTERS.len() {
            return Err(Error::InvalidState(format!("l = {l} exceeds the supported g shell")));
        }
        if m.unsigned_abs() > l {
            return Err(Error::InvalidState(format!("|m| = {} exceeds l = {l}", m.abs())));
        }
        Ok(QuantumState { n, l, m })
    }

    /// Number of interior radial nodes, n - l - 1.
    pub fn radial_nodes(&self) -> usize {
        (self.n - self.l - 1) as usize
    }

    pub fn is_circular(&self) -> bool {
        self.l + 1 == self.n
    }
}

impl fmt::Display for QuantumState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.n, ORBITAL_LETTERS[self.l as usize])?;
        if self.m != 0 {
            write!(f, "(m={})", self.m)?;
        }
        Ok(())
    }
}

impl FromStr for QuantumState {
    type Err = Error;

    /// Parses labels like `2p`; m is always 0.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let letter = s
            .chars()
            .last()
            .ok_or_else(|| Error::InvalidState("empty state label".into()))?;
        let l = ORBITAL_LETTERS
            .iter()
            .position(|&c| c == letter.to_ascii_lowercase())
            .ok_or_else(|| Error::InvalidState(format!("unknown orbital letter in {s:?}")))?;
        let n: u32 = s[..s.len() - letter.len_utf8()]
            .parse()
            .map_err(|_| Error::InvalidState(format!("bad principal number in {s:?}")))?;
        QuantumState::new(n, l as u32, 0)
    }
}

/// Radius of the impenetrable sphere, in bohr.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Confinement {
    r_c: f64,
}

impl Confinement {
    pub fn new(r_c: f64) -> Result<Self> {
        if !(r_c.is_finite() && r_c > 0.0) {
            return Err(Error::Domain(format!("confinement radius {r_c} must be positive")));
        }
        Ok(Confinement { r_c })
    }

    pub fn radius(&self) -> f64 {
        self.r_c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Interior collocation points of the starting grid.
    pub grid_points: usize,
    /// Largest grid tried before giving up on convergence.
    pub max_grid_points: usize,
    /// Energy agreement required between two grids, hartree (relative above 1 Eh).
    pub energy_tolerance: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            grid_points: 400,
            max_grid_points: 1600,
            energy_tolerance: 1e-8,
        }
    }
}

/// Lagrange basis on mapped Lobatto points.
struct LobattoGrid {
    /// All nodes in r, including 0 and r_c.
    r: Vec<f64>,
    /// Lobatto weights scaled to [0, r_c].
    w: Vec<f64>,
    /// Barycentric weights, proportional to 1 / P_N(x_j).
    bary: Vec<f64>,
    /// P_N at the reference nodes.
    pn: Vec<f64>,
    /// Reference nodes on [-1, 1].
    x: Vec<f64>,
    r_c: f64,
}

impl LobattoGrid {
    fn new(interior: usize, r_c: f64) -> Self {
        let degree = interior + 1;
        let (x, w_ref, pn) = gauss_lobatto(degree);
        let r = x.iter().map(|&x| 0.5 * r_c * (1.0 + x)).collect();
        let w = w_ref.iter().map(|&w| 0.5 * r_c * w).collect();
        let scale = pn.iter().fold(0.0_f64, |m, p| m.max(p.abs()));
        let bary = pn.iter().map(|p| scale / p).collect();
        LobattoGrid {
            r,
            w,
            bary,
            pn,
            x,
            r_c,
        }
    }

    fn degree(&self) -> usize {
        self.x.len() - 1
    }

    /// Derivative matrix D[i][j] = ℓ_j'(r_i), in r units.
    fn derivative_matrix(&self) -> DMatrix<f64> {
        let n = self.degree();
        let scale = 2.0 / self.r_c;
        let mut d = DMatrix::<f64>::zeros(n + 1, n + 1);
        for i in 0..=n {
            let mut diag = 0.0;
            for j in 0..=n {
                if i != j {
                    let v = self.pn[i] / (self.pn[j] * (self.x[i] - self.x[j])) * scale;
                    d[(i, j)] = v;
                    diag -= v;
                }
            }
            d[(i, i)] = diag;
        }
        d
    }

    fn hamiltonian(&self, l: u32) -> DMatrix<f64> {
        let n = self.degree();
        let d = self.derivative_matrix();
        let dim = n - 1;
        let ll = (l * (l + 1)) as f64;
        // K_ij = Σ_k w_k D_ki D_kj over interior i, j.
        let mut wd = d.columns(1, dim).into_owned();
        for k in 0..=n {
            let s = self.w[k].sqrt();
            for j in 0..dim {
                wd[(k, j)] *= s;
            }
        }
        let mut h = wd.transpose() * &wd;
        for i in 0..dim {
            let si = self.w[i + 1].sqrt();
            for j in 0..dim {
                h[(i, j)] *= 0.5 / (si * self.w[j + 1].sqrt());
            }
        }
        for i in 0..dim {
            let r = self.r[i + 1];
            h[(i, i)] += 0.5 * ll / (r * r) - 1.0 / r;
        }
        // exact symmetry
        for i in 0..dim {
            for j in 0..i {
                let v = 0.5 * (h[(i, j)] + h[(j, i)]);
                h[(i, j)] = v;
                h[(j, i)] = v;
            }
        }
        h
    }
}

fn sorted_eigenvalues(h: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = h.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

fn level_index(state: &QuantumState) -> usize {
    state.radial_nodes()
}

fn energy_on_grid(state: &QuantumState, r_c: f64, interior: usize) -> Result<f64> {
    let idx = level_index(state);
    if interior < 2 * (idx + 2) {
        return Err(Error::Resolution {
            points: interior,
            expected: idx,
        });
    }
    let grid = LobattoGrid::new(interior, r_c);
    let ev = sorted_eigenvalues(&grid.hamiltonian(state.l));
    Ok(ev[idx])
}

fn energy_scale(e: f64) -> f64 {
    e.abs().max(1.0)
}

/// Energy of `state` inside a sphere of radius `conf` together with the
/// grid size at which it converged.
fn converged_energy(
    state: &QuantumState,
    conf: &Confinement,
    opts: &SolverOptions,
) -> Result<(f64, usize)> {
    let mut points = opts.grid_points;
    let mut last_pair = (f64::NAN, f64::NAN);
    while points <= opts.max_grid_points.max(opts.grid_points) {
        let coarse = energy_on_grid(state, conf.radius(), points * 3 / 4)?;
        let fine = energy_on_grid(state, conf.radius(), points)?;
        if (fine - coarse).abs() <= opts.energy_tolerance * energy_scale(fine) {
            return Ok((fine, points));
        }
        last_pair = (coarse, fine);
        points *= 2;
    }
    Err(Error::Convergence {
        previous: last_pair.0,
        last: last_pair.1,
    })
}

/// Confined energy ε_{n,l}(r_c) in hartree.
///
/// The (n-l)-th eigenvalue of the collocation Hamiltonian; positive values
/// appear under strong confinement.
pub fn solve_energy(state: &QuantumState, conf: &Confinement, opts: &SolverOptions) -> Result<f64> {
    converged_energy(state, conf, opts).map(|(e, _)| e)
}

/// 1F1(l+1-1/k, 2l+2, 2 r_c k) with k = √(-2ε).
///
/// Vanishes exactly at the confined eigenvalues; defined only for ε < 0.
pub fn boundary_residual(energy: f64, l: u32, r_c: f64) -> Result<f64> {
    if !(energy < 0.0) {
        return Err(Error::Domain(format!(
            "boundary residual needs a bound energy, got {energy}"
        )));
    }
    let k = (-2.0 * energy).sqrt();
    kummer_1f1(l as f64 + 1.0 - 1.0 / k, 2.0 * l as f64 + 2.0, 2.0 * r_c * k)
}

/// Unnormalized closed form (2kr)^l 1F1(l+1-1/k, 2l+2, 2kr) e^{-kr}, ε < 0.
pub fn closed_form_radial(energy: f64, l: u32, r: f64) -> Result<f64> {
    if !(energy < 0.0) {
        return Err(Error::Domain(format!("closed form needs ε < 0, got {energy}")));
    }
    let k = (-2.0 * energy).sqrt();
    let x = 2.0 * k * r;
    Ok(x.powi(l as i32) * kummer_1f1(l as f64 + 1.0 - 1.0 / k, 2.0 * l as f64 + 2.0, x)? * (-k * r).exp())
}

/// Normalized radial wavefunction of one confined level.
///
/// `grid`/`weights` form a composite Gauss rule over (0, support), graded
/// towards the origin, every radial node and the wall, so radial integrals
/// of any function of R are sums over the stored samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSolution {
    pub state: QuantumState,
    pub r_c: f64,
    /// ε_{n,l}, hartree
    pub energy: f64,
    /// Quadrature abscissae in (0, r_c), strictly increasing.
    pub grid: Vec<f64>,
    pub weights: Vec<f64>,
    /// R(r) at `grid`, bohr^{-3/2}.
    pub values: Vec<f64>,
    /// N_{n,l} relating `values` to the closed form; only defined for ε < 0.
    pub norm_constant: Option<f64>,
    /// Interior zeros of R.
    pub node_positions: Vec<f64>,
    /// Beyond this radius |u| stays below 1e-15 of its maximum.
    pub support: f64,
    interp_r: Vec<f64>,
    interp_u: Vec<f64>,
    interp_bary: Vec<f64>,
}

/// u(r), u'(r) sampled on the solution's quadrature grid.
#[derive(Debug, Clone)]
pub struct RadialSamples {
    pub r: Vec<f64>,
    pub w: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
}

const SUPPORT_THRESHOLD: f64 = 1e-15;

impl RadialSolution {
    /// u(r) = r R(r) from the collocation polynomial.
    pub fn u(&self, r: f64) -> f64 {
        barycentric(&self.interp_r, &self.interp_bary, &self.interp_u, r).0
    }

    /// du/dr from the collocation polynomial.
    pub fn du(&self, r: f64) -> f64 {
        barycentric(&self.interp_r, &self.interp_bary, &self.interp_u, r).1
    }

    /// R(r); `r` must be positive.
    pub fn radial(&self, r: f64) -> f64 {
        self.u(r) / r
    }

    /// du/dr at the wall; controls the hard-wall momentum tail.
    pub fn wall_slope(&self) -> f64 {
        self.du(self.r_c)
    }

    pub fn samples(&self) -> RadialSamples {
        let u = self.grid.iter().zip(&self.values).map(|(r, v)| r * v).collect();
        let du = self.grid.iter().map(|&r| self.du(r)).collect();
        RadialSamples {
            r: self.grid.clone(),
            w: self.weights.clone(),
            u,
            du,
        }
    }

    /// ∫ R² r² dr over the stored rule.
    pub fn norm(&self) -> f64 {
        self.grid
            .iter()
            .zip(&self.weights)
            .zip(&self.values)
            .map(|((r, w), v)| w * v * v * r * r)
            .sum()
    }
}

/// Composite rule over (0, support) with graded panels at the origin, at each
/// interior node and at the wall when the support reaches it.
fn integration_rule(nodes: &[f64], support: f64, r_c: f64) -> CompositeRule {
    let mut cuts = vec![0.0];
    cuts.extend(nodes.iter().copied().filter(|&z| z < support));
    cuts.push(support);
    let max_width = (support / 48.0).min(0.5);
    let last = cuts.len() - 2;
    let mut bp: Vec<f64> = Vec::new();
    for (i, seg) in cuts.windows(2).enumerate() {
        let grade_right = i < last || support >= r_c;
        let piece = graded_breakpoints(seg[0], seg[1], true, grade_right, 12, 0.15, max_width);
        let skip = usize::from(!bp.is_empty());
        bp.extend(piece.into_iter().skip(skip));
    }
    CompositeRule::from_breakpoints(&bp, &gauss_legendre(16))
}

/// Value and first derivative of the barycentric interpolant at `t`.
fn barycentric(x: &[f64], lambda: &[f64], f: &[f64], t: f64) -> (f64, f64) {
    let mut num = 0.0;
    let mut den = 0.0;
    for j in 0..x.len() {
        let d = t - x[j];
        if d == 0.0 {
            // derivative at a node: Σ_k λ_k/λ_j (f_j - f_k)/(x_j - x_k)
            let mut der = 0.0;
            for k in 0..x.len() {
                if k != j {
                    der += lambda[k] / lambda[j] * (f[j] - f[k]) / (x[j] - x[k]);
                }
            }
            return (f[j], -der);
        }
        let c = lambda[j] / d;
        num += c * f[j];
        den += c;
    }
    let p = num / den;
    let mut dnum = 0.0;
    for j in 0..x.len() {
        let d = t - x[j];
        dnum += lambda[j] * (p - f[j]) / (d * d);
    }
    (p, dnum / den)
}

/// Lowest-residual eigenvector of `h` near `shift` by inverse iteration.
fn inverse_iteration(h: &DMatrix<f64>, shift: f64) -> Result<(DVector<f64>, f64)> {
    let dim = h.nrows();
    let mut sigma = shift;
    let mut attempt = 0;
    let lu = loop {
        let mut a = h.clone();
        for i in 0..dim {
            a[(i, i)] -= sigma;
        }
        let lu = a.lu();
        if lu.is_invertible() {
            break lu;
        }
        attempt += 1;
        if attempt > 5 {
            return Err(Error::Contract("shifted Hamiltonian stays singular".into()));
        }
        sigma += 1e-12 * energy_scale(shift) * 10f64.powi(attempt);
    };
    let mut v = DVector::from_fn(dim, |i, _| 1.0 + 1e-3 * (i as f64).sin());
    v /= v.norm();
    for _ in 0..4 {
        let mut y = lu
            .solve(&v)
            .ok_or_else(|| Error::Contract("inverse iteration solve failed".into()))?;
        let nrm = y.norm();
        y /= nrm;
        v = y;
    }
    let rayleigh = v.dot(&(h * &v));
    Ok((v, rayleigh))
}

/// Builds the normalized radial function of `state` at the given energy.
///
/// The eigenvector is taken from the grid described by `opts.grid_points` via
/// inverse iteration at `energy`; the node count is checked against n-l-1.
pub fn radial_wavefunction(
    state: &QuantumState,
    conf: &Confinement,
    energy: f64,
    opts: &SolverOptions,
) -> Result<RadialSolution> {
    build_solution(state, conf, energy, opts.grid_points)
}

fn build_solution(
    state: &QuantumState,
    conf: &Confinement,
    energy: f64,
    interior: usize,
) -> Result<RadialSolution> {
    let r_c = conf.radius();
    let grid = LobattoGrid::new(interior, r_c);
    let h = grid.hamiltonian(state.l);
    let (vec, rayleigh) = inverse_iteration(&h, energy)?;

    let n = grid.degree();
    let mut u = vec![0.0; n + 1];
    for i in 0..n - 1 {
        u[i + 1] = vec[i] / grid.w[i + 1].sqrt();
    }
    // R > 0 as r -> 0+
    let first = u
        .iter()
        .skip(1)
        .find(|v| v.abs() > 0.0)
        .copied()
        .unwrap_or(1.0);
    if first < 0.0 {
        u.iter_mut().for_each(|v| *v = -*v);
    }
    let umax = u.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let significant = |v: f64| v.abs() > 1e-10 * umax;

    let mut sol = RadialSolution {
        state: *state,
        r_c,
        energy: rayleigh,
        grid: Vec::new(),
        weights: Vec::new(),
        values: Vec::new(),
        norm_constant: None,
        node_positions: Vec::new(),
        support: r_c,
        interp_r: grid.r.clone(),
        interp_u: u,
        interp_bary: grid.bary.clone(),
    };

    // Sign changes among significant samples bracket the radial nodes.
    let mut prev: Option<(f64, f64)> = None;
    let mut roots = Vec::new();
    for (&r, &v) in grid.r[1..n].iter().zip(&sol.interp_u[1..n]) {
        if !significant(v) {
            continue;
        }
        if let Some((rp, vp)) = prev
            && vp.signum() != v.signum()
        {
            roots.push(bisect(|t| sol.u(t), rp, r));
        }
        prev = Some((r, v));
    }
    let expected = state.radial_nodes();
    if roots.len() != expected {
        return Err(Error::WrongBranch {
            expected,
            found: roots.len(),
        });
    }
    sol.node_positions = roots;

    let last_big = sol
        .interp_u
        .iter()
        .rposition(|v| v.abs() > SUPPORT_THRESHOLD * umax)
        .unwrap_or(n);
    sol.support = if last_big + 1 >= n {
        r_c
    } else {
        grid.r[last_big + 1]
    };

    let rule = integration_rule(&sol.node_positions, sol.support, r_c);
    let u_rule: Vec<f64> = rule.nodes.iter().map(|&r| sol.u(r)).collect();
    let norm: f64 = u_rule.iter().zip(&rule.weights).map(|(u, w)| w * u * u).sum();
    let scale = 1.0 / norm.sqrt();
    sol.interp_u.iter_mut().for_each(|v| *v *= scale);
    sol.values = rule
        .nodes
        .iter()
        .zip(&u_rule)
        .map(|(r, u)| scale * u / r)
        .collect();
    sol.grid = rule.nodes;
    sol.weights = rule.weights;

    if sol.energy < 0.0 {
        // match against the closed form at the peak of |R r|
        let (jmax, _) = sol
            .values
            .iter()
            .zip(&sol.grid)
            .enumerate()
            .fold((0, 0.0_f64), |acc, (j, (v, r))| {
                if (v * r).abs() > acc.1 { (j, (v * r).abs()) } else { acc }
            });
        if let Ok(f) = closed_form_radial(sol.energy, state.l, sol.grid[jmax])
            && f != 0.0
            && f.is_finite()
        {
            sol.norm_constant = Some(sol.values[jmax] / f);
        }
    }
    Ok(sol)
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Energy plus normalized wavefunction on the converged grid.
pub fn solve(state: &QuantumState, conf: &Confinement, opts: &SolverOptions) -> Result<RadialSolution> {
    let (energy, points) = converged_energy(state, conf, opts)?;
    build_solution(state, conf, energy, points)
}

/// Strict sign changes of the sampled R inside (0, r_c), ignoring samples in
/// the numerically-zero tail.
pub fn node_count(solution: &RadialSolution) -> usize {
    let vmax = solution.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut count = 0;
    let mut prev = 0.0_f64;
    for &v in &solution.values {
        if v.abs() <= 1e-10 * vmax {
            continue;
        }
        if prev != 0.0 && prev.signum() != v.signum() {
            count += 1;
        }
        prev = v;
    }
    count
}
