//! Gauss-type quadrature rules and composite panel rules built from them.

use serde::{Deserialize, Serialize};

/// Nodes and weights on the reference interval [-1, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub order: usize,
}

impl QuadratureRule {
    /// Integrates `f` over [a, b] with the rule mapped affinely.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

/// Legendre P_n(x) together with P_{n-1}(x), by upward recurrence.
pub(crate) fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 2..=n {
        let kf = k as f64;
        let next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = next;
    }
    (p, p_prev)
}

/// Gauss-Legendre rule with `order` points, exact for degree `2 * order - 1`.
///
/// Roots of P_n are found by Newton iteration from Chebyshev-like initial
/// guesses; only the non-negative half is iterated and the rest mirrored, so
/// the rule is exactly symmetric.
pub fn gauss_legendre(order: usize) -> QuadratureRule {
    assert!(order >= 1, "Gauss-Legendre order must be positive");
    let n = order;
    let nf = n as f64;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, p_prev) = legendre_pair(n, x);
            dp = nf * (x * p - p_prev) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-15 {
                let (p, p_prev) = legendre_pair(n, x);
                dp = nf * (x * p - p_prev) / (x * x - 1.0);
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // i counts from the largest root downwards
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    QuadratureRule {
        nodes,
        weights,
        order,
    }
}

/// Legendre-Gauss-Lobatto nodes (including ±1), weights, and P_N at each node,
/// for polynomial degree `degree` (so `degree + 1` points).
pub(crate) fn gauss_lobatto(degree: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    assert!(degree >= 2);
    let n = degree;
    let nf = n as f64;
    let mut x: Vec<f64> = (0..=n)
        .map(|j| -(std::f64::consts::PI * j as f64 / nf).cos())
        .collect();
    let mut pn = vec![0.0; n + 1];
    for (j, xj) in x.iter_mut().enumerate() {
        if j == 0 || j == n {
            pn[j] = legendre_pair(n, *xj).0;
            continue;
        }
        for _ in 0..100 {
            let (p, p_prev) = legendre_pair(n, *xj);
            let step = (*xj * p - p_prev) / ((nf + 1.0) * p);
            *xj -= step;
            if step.abs() <= 1e-16 {
                break;
            }
        }
        pn[j] = legendre_pair(n, *xj).0;
    }
    // enforce exact symmetry
    for j in 0..=n / 2 {
        let m = 0.5 * (x[n - j] - x[j]);
        x[j] = -m;
        x[n - j] = m;
    }
    if n.is_multiple_of(2) {
        x[n / 2] = 0.0;
    }
    let w = pn
        .iter()
        .map(|p| 2.0 / (nf * (nf + 1.0) * p * p))
        .collect();
    (x, w, pn)
}

/// A composite rule: absolute nodes and weights over a union of panels.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CompositeRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CompositeRule {
    /// Places `base` on every interval between consecutive `breakpoints`.
    pub fn from_breakpoints(breakpoints: &[f64], base: &QuadratureRule) -> Self {
        let panels = breakpoints.len().saturating_sub(1);
        let mut nodes = Vec::with_capacity(panels * base.order);
        let mut weights = Vec::with_capacity(panels * base.order);
        for w in breakpoints.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b <= a {
                continue;
            }
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for (&x, &wt) in base.nodes.iter().zip(&base.weights) {
                nodes.push(mid + half * x);
                weights.push(wt * half);
            }
        }
        CompositeRule { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Panel breakpoints for [a, b]: geometric grading towards each flagged end
/// (ratio `ratio`, `levels` panels) with the middle split into panels no
/// wider than `max_width`.
pub fn graded_breakpoints(
    a: f64,
    b: f64,
    grade_left: bool,
    grade_right: bool,
    levels: usize,
    ratio: f64,
    max_width: f64,
) -> Vec<f64> {
    let len = b - a;
    if len <= 0.0 {
        return vec![a, b];
    }
    // The graded zone on each side covers a fraction of the interval.
    let zone = (0.25 * len).min(max_width);
    let mut left = Vec::new();
    if grade_left {
        let mut d = zone;
        for _ in 0..levels {
            left.push(a + d);
            d *= ratio;
        }
        left.reverse();
    }
    let mut right = Vec::new();
    if grade_right {
        let mut d = zone;
        for _ in 0..levels {
            right.push(b - d);
            d *= ratio;
        }
    }
    let lo = if grade_left { a + zone } else { a };
    let hi = if grade_right { b - zone } else { b };
    let mid_panels = (((hi - lo) / max_width).ceil() as usize).max(1);

    let mut bp = Vec::with_capacity(2 * levels + mid_panels + 2);
    bp.push(a);
    bp.extend(left.iter().copied().filter(|&x| x > a && x < b));
    for k in 1..mid_panels {
        bp.push(lo + (hi - lo) * k as f64 / mid_panels as f64);
    }
    bp.extend(right.iter().copied().filter(|&x| x > a && x < b));
    bp.push(b);
    bp.sort_by(f64::total_cmp);
    bp.dedup_by(|x, y| (*x - *y).abs() <= 1e-15 * len);
    bp
}
