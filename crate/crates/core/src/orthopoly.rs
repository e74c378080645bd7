//! Orthonormal Legendre polynomials on `[0, 1]`, sampling node families and
//! quadrature rules.
//!
//! The orthonormal Legendre basis on `[0, 1]` is
//! `φ_n(x) = √(2n+1) · P_n(2x − 1)` with the classical normalization
//! `P_n(1) = 1`. Everything in this module is a pure function of its inputs.

use std::f64::consts::PI;

/// Default number of geometric levels of the graded rule.
pub const DEFAULT_HP_LEVELS: usize = 40;
/// Default Gauss–Legendre order on each cell of the graded rule.
pub const DEFAULT_HP_ORDER: usize = 10;

/// Classical Legendre polynomial `P_n(t)` on `[-1, 1]` via the three-term recurrence.
pub fn legendre(n: usize, t: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut p_prev = 1.0;
    let mut p = t;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * t * p - kf * p_prev) / (kf + 1.0);
        p_prev = p;
        p = next;
    }
    p
}

/// Orthonormal shifted Legendre polynomial `φ_n(x) = √(2n+1) P_n(2x−1)`.
pub fn legendre_shifted(n: usize, x: f64) -> f64 {
    ((2 * n + 1) as f64).sqrt() * legendre(n, 2.0 * x - 1.0)
}

/// Fills `out[k] = φ_k(x)` for `k < out.len()`.
pub fn legendre_shifted_all(x: f64, out: &mut [f64]) {
    let t = 2.0 * x - 1.0;
    let mut p_prev = 0.0;
    let mut p = 1.0;
    for (k, slot) in out.iter_mut().enumerate() {
        *slot = ((2 * k + 1) as f64).sqrt() * p;
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * t * p - kf * p_prev) / (kf + 1.0);
        p_prev = p;
        p = next;
    }
}

/// `P_n(t)` together with its derivative, for Newton iteration.
fn legendre_with_derivative(n: usize, t: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = t;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * t * p - kf * p_prev) / (kf + 1.0);
        p_prev = p;
        p = next;
    }
    let nf = n as f64;
    let dp = nf * (t * p - p_prev) / (t * t - 1.0);
    (p, dp)
}

/// A quadrature rule on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    /// Builds a rule from matching node and weight lists.
    ///
    /// Panics if the lengths differ.
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>) -> Self {
        assert_eq!(nodes.len(), weights.len(), "nodes and weights must match");
        Self { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// `Σ w_k f(x_k)`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }

    /// Whether any node sits at (or below) zero, where a log-singular
    /// integrand cannot be evaluated.
    pub fn touches_origin(&self) -> bool {
        self.nodes.first().is_some_and(|&x| x <= 0.0)
    }
}

/// Gauss–Legendre rule on `[-1, 1]`, nodes ascending.
fn gauss_legendre_reference(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    if m == 1 {
        return (vec![0.0], vec![2.0]);
    }
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        // Chebyshev initial guess for the (i+1)-th largest root.
        let mut t = (PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, t);
            dp = d;
            let step = p / d;
            t -= step;
            if step.abs() <= 1e-15 * t.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, t);
        dp = if d.is_finite() { d } else { dp };
        let w = 2.0 / ((1.0 - t * t) * dp * dp);
        nodes[m - 1 - i] = t;
        nodes[i] = -t;
        weights[m - 1 - i] = w;
        weights[i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    (nodes, weights)
}

/// `m`-point Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(m: usize, a: f64, b: f64) -> QuadratureRule {
    assert!(m >= 1, "rule needs at least one node");
    let (t, w) = gauss_legendre_reference(m);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    QuadratureRule::new(
        t.iter().map(|&ti| mid + half * ti).collect(),
        w.iter().map(|&wi| half * wi).collect(),
    )
}

/// `m`-point Gauss–Legendre rule on `[0, 1]`; exact up to degree `2m − 1`.
pub fn gauss_legendre_rule(m: usize) -> QuadratureRule {
    gauss_legendre_on(m, 0.0, 1.0)
}

/// Chebyshev nodes `(cos((2m−1)π/(2M)) + 1)/2`, `m = 1..M`, in the raw
/// (descending) order of the formula.
pub fn chebyshev_nodes_raw(m: usize) -> Vec<f64> {
    let mf = m as f64;
    (1..=m)
        .map(|k| (((2 * k - 1) as f64 * PI / (2.0 * mf)).cos() + 1.0) / 2.0)
        .collect()
}

/// Chebyshev nodes on `[0, 1]`, sorted ascending.
pub fn chebyshev_nodes(m: usize) -> Vec<f64> {
    assert!(m >= 1, "need at least one node");
    let mut nodes = chebyshev_nodes_raw(m);
    nodes.reverse();
    nodes
}

/// Midpoint-shifted equispaced nodes `(m − 1/2)/M`; never hits `x = 0`.
pub fn equispaced_nodes(m: usize) -> Vec<f64> {
    assert!(m >= 1, "need at least one node");
    let mf = m as f64;
    (1..=m).map(|k| (k as f64 - 0.5) / mf).collect()
}

/// Composite rule geometrically graded towards `x = 0`.
///
/// Breakpoints are `0, 2^{-levels}, …, 1/2, 1`; each of the `levels + 1`
/// cells carries an `order`-point Gauss–Legendre rule. Converges
/// exponentially for integrands with `log x` type endpoint singularities.
pub fn hp_log_quadrature(levels: usize, order: usize) -> QuadratureRule {
    assert!(levels >= 1 && order >= 1, "levels and order must be positive");
    let mut nodes = Vec::with_capacity((levels + 1) * order);
    let mut weights = Vec::with_capacity((levels + 1) * order);
    let mut push_cell = |a: f64, b: f64| {
        let cell = gauss_legendre_on(order, a, b);
        nodes.extend_from_slice(cell.nodes());
        weights.extend_from_slice(cell.weights());
    };
    let smallest = 0.5f64.powi(levels as i32);
    push_cell(0.0, smallest);
    for level in (0..levels).rev() {
        let a = 0.5f64.powi(level as i32 + 1);
        push_cell(a, 2.0 * a);
    }
    QuadratureRule::new(nodes, weights)
}

/// Graded rule sized for products of polynomials of total degree up to
/// `degree` times `log²x`.
pub fn hp_rule_for_degree(degree: usize) -> QuadratureRule {
    hp_log_quadrature(DEFAULT_HP_LEVELS, DEFAULT_HP_ORDER.max(degree / 2 + 12))
}

/// Closed form of `∫₀¹ P_n(2x−1) log x dx` for `n ≥ 1`; `−1` for `n = 0`.
pub fn legendre_log_moment(n: usize) -> f64 {
    if n == 0 {
        return -1.0;
    }
    let nf = n as f64;
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    sign / (nf * (nf + 1.0))
}
