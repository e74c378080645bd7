//! Truncated frames on `[0, 1]` built from the orthonormal Legendre basis,
//! optionally enriched with `K` singular functions `ψ_k = w · φ_k`.
//!
//! Element ordering is fixed: indices `0..K` are the enrichment functions
//! `ψ_0, …, ψ_{K−1}`, indices `K..N` are the polynomials `φ_0, …, φ_{N−K−1}`.
//! The polynomial degree of a frame with `N` elements is therefore `N − K − 1`.

use crate::error::{FrameError, Result};
use crate::orthopoly::legendre_shifted_all;

/// Something that can be evaluated pointwise on `(0, 1]`.
pub trait RealFunction: Sync {
    fn eval(&self, x: f64) -> Result<f64>;
}

impl<F> RealFunction for F
where
    F: Fn(f64) -> f64 + Sync,
{
    fn eval(&self, x: f64) -> Result<f64> {
        let v = self(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(FrameError::Domain { x, reason: "function value is not finite" })
        }
    }
}

/// A user supplied enrichment weight.
#[derive(Debug, Clone, Copy)]
pub struct CustomWeight {
    pub name: &'static str,
    pub eval: fn(f64) -> f64,
    /// `‖w‖` in `L²(0, 1)`, used for the frame bound.
    pub l2_norm: f64,
    /// Exclude `x = 0` from evaluation.
    pub singular_at_zero: bool,
}

/// Weight function `w` of the enrichment.
#[derive(Debug, Clone, Copy, Default)]
pub enum Weight {
    #[default]
    Log,
    Custom(CustomWeight),
}

impl Weight {
    pub fn eval(&self, x: f64) -> Result<f64> {
        match self {
            Weight::Log => {
                if x > 0.0 {
                    Ok(x.ln())
                } else {
                    Err(FrameError::Domain { x, reason: "log weight is singular at x <= 0" })
                }
            }
            Weight::Custom(w) => {
                if w.singular_at_zero && x <= 0.0 {
                    return Err(FrameError::Domain { x, reason: "weight is singular at x <= 0" });
                }
                let v = (w.eval)(x);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(FrameError::Domain { x, reason: "weight value is not finite" })
                }
            }
        }
    }

    /// `‖w‖_{L²(0,1)}`; `√2` for the logarithm.
    pub fn l2_norm(&self) -> f64 {
        match self {
            Weight::Log => std::f64::consts::SQRT_2,
            Weight::Custom(w) => w.l2_norm,
        }
    }

    pub fn singular_at_zero(&self) -> bool {
        match self {
            Weight::Log => true,
            Weight::Custom(w) => w.singular_at_zero,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Weight::Log => "log",
            Weight::Custom(w) => w.name,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameKind {
    LegendreOnb,
    OnbPlusK,
}

/// A finite section `Φ_N` of one of the shipped frames.
#[derive(Debug, Clone)]
pub struct FrameSpec {
    kind: FrameKind,
    enrichment: usize,
    len: usize,
    weight: Weight,
    normalized: bool,
}

impl FrameSpec {
    /// The first `n` orthonormal Legendre polynomials.
    pub fn legendre(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(FrameError::InvalidFrame("frame needs at least one element".into()));
        }
        Ok(Self { kind: FrameKind::LegendreOnb, enrichment: 0, len: n, weight: Weight::Log, normalized: false })
    }

    /// ONB+K frame with `ψ_k = log(x) φ_k(x)`, `n` elements in total.
    pub fn onb_plus_k(k: usize, n: usize) -> Result<Self> {
        Self::with_weight(k, n, Weight::Log, false)
    }

    /// ONB+1 frame with the normalized element `ψ = log(x)/√2`.
    pub fn onb_plus_one(n: usize) -> Result<Self> {
        Self::with_weight(1, n, Weight::Log, true)
    }

    /// General enrichment. With `normalized`, each `ψ_k` is divided by `‖w‖`.
    pub fn with_weight(k: usize, n: usize, weight: Weight, normalized: bool) -> Result<Self> {
        if n == 0 {
            return Err(FrameError::InvalidFrame("frame needs at least one element".into()));
        }
        if k > n {
            return Err(FrameError::InvalidFrame(format!(
                "enrichment count K = {k} exceeds frame size N = {n}"
            )));
        }
        if weight.l2_norm() <= 0.0 || !weight.l2_norm().is_finite() {
            return Err(FrameError::InvalidFrame("weight norm must be positive and finite".into()));
        }
        let kind = if k == 0 { FrameKind::LegendreOnb } else { FrameKind::OnbPlusK };
        Ok(Self { kind, enrichment: k, len: n, weight, normalized })
    }

    /// Same frame family with a different number of elements.
    pub fn resized(&self, n: usize) -> Result<Self> {
        Self::with_weight(self.enrichment, n, self.weight, self.normalized)
    }

    pub fn kind(&self) -> FrameKind {
        self.kind
    }

    /// Number of elements `N`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of enrichment functions `K`.
    pub fn enrichment(&self) -> usize {
        self.enrichment
    }

    pub fn weight(&self) -> Weight {
        self.weight
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Number of polynomial elements, `N − K`.
    pub fn polynomial_count(&self) -> usize {
        self.len - self.enrichment
    }

    /// Highest polynomial degree appearing in any element.
    pub fn max_degree(&self) -> usize {
        self.polynomial_count().max(self.enrichment).saturating_sub(1)
    }

    fn psi_scale(&self) -> f64 {
        if self.normalized {
            1.0 / self.weight.l2_norm()
        } else {
            1.0
        }
    }

    /// Certified lower frame bound.
    pub fn lower_bound(&self) -> f64 {
        1.0
    }

    /// Certified upper frame bound `1 + K² ‖w‖² s²` where `s` is the
    /// normalization of the `ψ_k`: `1 + 2K²` for the log weight, `2` for the
    /// normalized ONB+1 frame.
    pub fn upper_bound(&self) -> f64 {
        let k = self.enrichment as f64;
        let wn = self.weight.l2_norm() * self.psi_scale();
        1.0 + k * k * wn * wn
    }

    fn singular_index(&self, j: usize) -> bool {
        j < self.enrichment && self.weight.singular_at_zero()
    }

    /// Value of element `j` at `x`.
    pub fn element(&self, j: usize, x: f64) -> Result<f64> {
        if j >= self.len {
            return Err(FrameError::IndexOutOfRange { index: j, len: self.len });
        }
        if !(0.0..=1.0).contains(&x) {
            return Err(FrameError::Domain { x, reason: "outside [0, 1]" });
        }
        if j < self.enrichment {
            let w = self.weight.eval(x)?;
            Ok(self.psi_scale() * w * crate::orthopoly::legendre_shifted(j, x))
        } else {
            Ok(crate::orthopoly::legendre_shifted(j - self.enrichment, x))
        }
    }

    /// Values of all `N` elements at `x`, written into `out`.
    pub fn eval_all(&self, x: f64, out: &mut [f64]) -> Result<()> {
        if out.len() != self.len {
            return Err(FrameError::DimensionMismatch { expected: self.len, actual: out.len() });
        }
        if !(0.0..=1.0).contains(&x) {
            return Err(FrameError::Domain { x, reason: "outside [0, 1]" });
        }
        let k = self.enrichment;
        let p = self.polynomial_count();
        let mut phi = vec![0.0; k.max(p)];
        legendre_shifted_all(x, &mut phi);
        if k > 0 {
            let w = self.psi_scale() * self.weight.eval(x)?;
            for (slot, phi_j) in out[..k].iter_mut().zip(&phi[..k]) {
                *slot = w * phi_j;
            }
        }
        out[k..].copy_from_slice(&phi[..p]);
        Ok(())
    }

    /// Whether evaluation at `x` is admissible for every element.
    pub fn admits(&self, x: f64) -> bool {
        (0.0..=1.0).contains(&x) && !(x <= 0.0 && self.singular_index(0))
    }

    /// `Σ_j c_j Φ_j(x)`.
    pub fn synthesize(&self, coefficients: &[f64], x: f64) -> Result<f64> {
        if coefficients.len() != self.len {
            return Err(FrameError::DimensionMismatch {
                expected: self.len,
                actual: coefficients.len(),
            });
        }
        let mut vals = vec![0.0; self.len];
        self.eval_all(x, &mut vals)?;
        Ok(vals.iter().zip(coefficients).map(|(v, c)| v * c).sum())
    }

    /// Short label used in reports, e.g. `onbk(K=5)`.
    pub fn label(&self) -> String {
        match (self.kind, self.normalized) {
            (FrameKind::LegendreOnb, _) => "legendre".to_string(),
            (FrameKind::OnbPlusK, true) => format!("onb+{}-normalized({})", self.enrichment, self.weight.name()),
            (FrameKind::OnbPlusK, false) => format!("onb+{}({})", self.enrichment, self.weight.name()),
        }
    }
}

/// A coefficient vector tied to the frame it expands in.
#[derive(Debug, Clone)]
pub struct CoefficientVector {
    frame: FrameSpec,
    values: Vec<f64>,
}

impl CoefficientVector {
    pub fn new(frame: FrameSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != frame.len() {
            return Err(FrameError::DimensionMismatch { expected: frame.len(), actual: values.len() });
        }
        Ok(Self { frame, values })
    }

    pub fn zeros(frame: FrameSpec) -> Self {
        let values = vec![0.0; frame.len()];
        Self { frame, values }
    }

    pub fn unit(frame: FrameSpec, j: usize) -> Result<Self> {
        if j >= frame.len() {
            return Err(FrameError::IndexOutOfRange { index: j, len: frame.len() });
        }
        let mut values = vec![0.0; frame.len()];
        values[j] = 1.0;
        Ok(Self { frame, values })
    }

    pub fn frame(&self) -> &FrameSpec {
        &self.frame
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

impl RealFunction for CoefficientVector {
    fn eval(&self, x: f64) -> Result<f64> {
        self.frame.synthesize(&self.values, x)
    }
}

/// `T_N z` evaluated at `x`.
pub fn synthesize(coeffs: &CoefficientVector, x: f64) -> Result<f64> {
    coeffs.eval(x)
}

/// `f(x) = e^x + log(x) cos(x)`, unbounded as `x → 0⁺`.
#[derive(Debug, Clone, Copy, Default)]
pub struct TargetFunction;

impl RealFunction for TargetFunction {
    fn eval(&self, x: f64) -> Result<f64> {
        target_function(x)
    }
}

pub fn target_function(x: f64) -> Result<f64> {
    if x > 0.0 {
        Ok(x.exp() + x.ln() * x.cos())
    } else {
        Err(FrameError::Domain { x, reason: "target function is singular at x <= 0" })
    }
}
