//! Sampling functionals `ℓ_{m,M}`: inner products against the Legendre basis
//! (generalized sampling) and scaled point evaluations.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{FrameError, Result};
use crate::frames::{FrameSpec, RealFunction};
use crate::orthopoly::{
    chebyshev_nodes, equispaced_nodes, gauss_legendre_rule, hp_rule_for_degree, legendre_shifted_all,
    QuadratureRule,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Chebyshev,
    GaussLegendre,
    Equispaced,
}

impl NodeKind {
    pub fn name(&self) -> &'static str {
        match self {
            NodeKind::Chebyshev => "chebyshev",
            NodeKind::GaussLegendre => "legendre",
            NodeKind::Equispaced => "equispaced",
        }
    }
}

/// How point values are scaled before they enter the data vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Weighting {
    /// `s_m = 1`.
    Unweighted,
    /// `s_m = √w_m` for the quadrature weights associated with the nodes, so
    /// that `‖f‖_M` approximates `‖f‖_{L²}`.
    Quadrature,
}

/// A node family together with its count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeFamily {
    pub kind: NodeKind,
    pub count: usize,
}

impl NodeFamily {
    pub fn new(kind: NodeKind, count: usize) -> Self {
        Self { kind, count }
    }

    /// Nodes (ascending) and their quadrature weights on `[0, 1]`.
    pub fn nodes_and_weights(&self) -> (Vec<f64>, Vec<f64>) {
        let m = self.count;
        match self.kind {
            NodeKind::GaussLegendre => {
                let rule = gauss_legendre_rule(m);
                (rule.nodes().to_vec(), rule.weights().to_vec())
            }
            NodeKind::Equispaced => (equispaced_nodes(m), vec![1.0 / m as f64; m]),
            NodeKind::Chebyshev => {
                // Gauss–Chebyshev rule for dx/√(x(1−x)) on [0,1], reweighted to dx.
                let nodes = chebyshev_nodes(m);
                let weights = nodes
                    .iter()
                    .map(|&x| PI / m as f64 * (x * (1.0 - x)).sqrt())
                    .collect();
                (nodes, weights)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    BasisInnerProducts,
    WeightedPointValues,
}

#[derive(Debug, Clone)]
enum Functionals {
    InnerProducts { rule: QuadratureRule },
    Points { family: NodeFamily, weighting: Weighting, nodes: Vec<f64>, scales: Vec<f64> },
}

/// `M` linear functionals with their nominal richness constants `A′, B′`.
#[derive(Debug, Clone)]
pub struct SamplingScheme {
    count: usize,
    functionals: Functionals,
    a_prime: f64,
    b_prime: f64,
}

impl SamplingScheme {
    /// `ℓ_m(f) = ⟨f, φ_m⟩`, `m = 0..M`, evaluated with a graded rule that is
    /// exact enough for log-singular integrands.
    pub fn inner_products(m: usize) -> Result<Self> {
        Self::inner_products_with_rule(m, hp_rule_for_degree(2 * m + 2))
    }

    /// Inner products evaluated with a caller supplied rule.
    pub fn inner_products_with_rule(m: usize, rule: QuadratureRule) -> Result<Self> {
        if m == 0 {
            return Err(FrameError::InvalidScheme("need at least one functional".into()));
        }
        if rule.is_empty() {
            return Err(FrameError::InvalidScheme("empty quadrature rule".into()));
        }
        Ok(Self { count: m, functionals: Functionals::InnerProducts { rule }, a_prime: 1.0, b_prime: 1.0 })
    }

    /// Scaled point evaluations `ℓ_m(f) = s_m f(x_m)`.
    pub fn points(kind: NodeKind, m: usize, weighting: Weighting) -> Result<Self> {
        if m == 0 {
            return Err(FrameError::InvalidScheme("need at least one node".into()));
        }
        let family = NodeFamily::new(kind, m);
        let (nodes, weights) = family.nodes_and_weights();
        let scales = match weighting {
            Weighting::Unweighted => vec![1.0; m],
            Weighting::Quadrature => weights.iter().map(|w| w.sqrt()).collect(),
        };
        Self::from_points(family, weighting, nodes, scales)
    }

    fn from_points(family: NodeFamily, weighting: Weighting, nodes: Vec<f64>, scales: Vec<f64>) -> Result<Self> {
        if nodes.iter().any(|&x| !(x > 0.0 && x <= 1.0)) {
            return Err(FrameError::InvalidScheme("point nodes must lie in (0, 1]".into()));
        }
        if scales.iter().any(|&s| !(s >= 0.0 && s.is_finite())) {
            return Err(FrameError::InvalidScheme("scale factors must be nonnegative".into()));
        }
        Ok(Self {
            count: nodes.len(),
            functionals: Functionals::Points { family, weighting, nodes, scales },
            a_prime: 1.0,
            b_prime: 1.0,
        })
    }

    /// Number of functionals `M`.
    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn kind(&self) -> SchemeKind {
        match self.functionals {
            Functionals::InnerProducts { .. } => SchemeKind::BasisInnerProducts,
            Functionals::Points { .. } => SchemeKind::WeightedPointValues,
        }
    }

    /// Nominal lower richness constant `A′`.
    pub fn a_prime(&self) -> f64 {
        self.a_prime
    }

    /// Nominal upper richness constant `B′`.
    pub fn b_prime(&self) -> f64 {
        self.b_prime
    }

    pub fn nodes(&self) -> Option<&[f64]> {
        match &self.functionals {
            Functionals::Points { nodes, .. } => Some(nodes),
            Functionals::InnerProducts { .. } => None,
        }
    }

    pub fn scales(&self) -> Option<&[f64]> {
        match &self.functionals {
            Functionals::Points { scales, .. } => Some(scales),
            Functionals::InnerProducts { .. } => None,
        }
    }

    pub fn label(&self) -> String {
        match &self.functionals {
            Functionals::InnerProducts { .. } => "inner".to_string(),
            Functionals::Points { family, weighting, .. } => match weighting {
                Weighting::Unweighted => family.kind.name().to_string(),
                Weighting::Quadrature => format!("{}-weighted", family.kind.name()),
            },
        }
    }

    /// Data vector `y_m = ℓ_{m,M}(f)`.
    pub fn sample(&self, f: &dyn RealFunction) -> Result<DataVector> {
        let values = match &self.functionals {
            Functionals::Points { nodes, scales, .. } => {
                let mut out = Vec::with_capacity(nodes.len());
                for (&x, &s) in nodes.iter().zip(scales) {
                    out.push(s * f.eval(x)?);
                }
                DVector::from_vec(out)
            }
            Functionals::InnerProducts { rule } => {
                if rule.touches_origin() {
                    // Any singular f breaks here; let the evaluation report it.
                    f.eval(rule.nodes()[0])?;
                }
                let mut out = DVector::zeros(self.count);
                let mut phi = vec![0.0; self.count];
                for (x, w) in rule.iter() {
                    let fw = w * f.eval(x)?;
                    legendre_shifted_all(x, &mut phi);
                    for (acc, p) in out.iter_mut().zip(&phi) {
                        *acc += fw * p;
                    }
                }
                out
            }
        };
        Ok(DataVector { values })
    }

    /// `‖f‖_M`, the Euclidean norm of the data vector.
    pub fn discrete_norm(&self, f: &dyn RealFunction) -> Result<f64> {
        Ok(self.sample(f)?.norm())
    }

    /// The `M × N` matrix `{ℓ_{m,M}(Φ_j)}`.
    pub fn frame_matrix(&self, frame: &FrameSpec) -> Result<DMatrix<f64>> {
        let n = frame.len();
        match &self.functionals {
            Functionals::Points { nodes, scales, .. } => {
                let mut g = DMatrix::zeros(self.count, n);
                let mut row = vec![0.0; n];
                for (i, (&x, &s)) in nodes.iter().zip(scales).enumerate() {
                    frame.eval_all(x, &mut row)?;
                    for (j, v) in row.iter().enumerate() {
                        g[(i, j)] = s * v;
                    }
                }
                Ok(g)
            }
            Functionals::InnerProducts { rule } => {
                let q = rule.len();
                let mut basis = DMatrix::zeros(q, self.count);
                let mut elements = DMatrix::zeros(q, n);
                let mut phi = vec![0.0; self.count];
                let mut row = vec![0.0; n];
                for (k, (x, w)) in rule.iter().enumerate() {
                    let sw = w.sqrt();
                    legendre_shifted_all(x, &mut phi);
                    frame.eval_all(x, &mut row)?;
                    for (m, p) in phi.iter().enumerate() {
                        basis[(k, m)] = sw * p;
                    }
                    for (j, v) in row.iter().enumerate() {
                        elements[(k, j)] = sw * v;
                    }
                }
                Ok(basis.transpose() * elements)
            }
        }
    }
}

/// A parametrized family of schemes, one per sample count `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeFamily {
    InnerProducts,
    Points { kind: NodeKind, weighting: Weighting },
}

impl SchemeFamily {
    pub fn build(&self, m: usize) -> Result<SamplingScheme> {
        match *self {
            SchemeFamily::InnerProducts => SamplingScheme::inner_products(m),
            SchemeFamily::Points { kind, weighting } => SamplingScheme::points(kind, m, weighting),
        }
    }

    pub fn kind(&self) -> SchemeKind {
        match self {
            SchemeFamily::InnerProducts => SchemeKind::BasisInnerProducts,
            SchemeFamily::Points { .. } => SchemeKind::WeightedPointValues,
        }
    }

    /// Nominal `A′` of the family.
    pub fn a_prime(&self) -> f64 {
        1.0
    }

    pub fn label(&self) -> String {
        match self {
            SchemeFamily::InnerProducts => "inner".to_string(),
            SchemeFamily::Points { kind, weighting: Weighting::Unweighted } => kind.name().to_string(),
            SchemeFamily::Points { kind, weighting: Weighting::Quadrature } => format!("{}-weighted", kind.name()),
        }
    }
}

/// Data vector `y = {ℓ_{m,M}(f)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DataVector {
    values: DVector<f64>,
}

impl DataVector {
    pub fn new(values: DVector<f64>) -> Self {
        Self { values }
    }

    pub fn from_slice(values: &[f64]) -> Self {
        Self { values: DVector::from_column_slice(values) }
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.values.norm()
    }
}

/// `A′_{M,N} = inf_{g ∈ H_N, ‖g‖ = 1} ‖g‖²_M` for the given scheme and frame,
/// with the continuous norm evaluated by a graded rule.
pub fn richness_estimate(scheme: &SamplingScheme, frame: &FrameSpec) -> Result<f64> {
    let sys = crate::gram::build_system(frame, scheme)?;
    let factor = crate::gram::build_gram_factor(frame, &crate::gram::default_gram_rule(frame))?;
    crate::diagnostics::richness_constant(&sys, &factor)
}
