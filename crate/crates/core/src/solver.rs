//! Truncated-SVD regularized least squares and the a posteriori checks of
//! its error and coefficient bounds.

use nalgebra::DVector;

use crate::error::{FrameError, Result};
use crate::frames::{CoefficientVector, FrameSpec, RealFunction};
use crate::gram::{build_system, GramSystem};
use crate::orthopoly::QuadratureRule;
use crate::sampling::{DataVector, SamplingScheme};

/// `x^ε = Σ_{σ_n > ε} ⟨y, u_n⟩/σ_n v_n` together with bookkeeping.
#[derive(Debug, Clone)]
pub struct RegularizedSolution {
    coefficients: DVector<f64>,
    epsilon: f64,
    kept: usize,
    residual: f64,
}

impl RegularizedSolution {
    pub fn coefficients(&self) -> &DVector<f64> {
        &self.coefficients
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Length of the kept prefix `{n : σ_n > ε}`.
    pub fn kept(&self) -> usize {
        self.kept
    }

    /// `‖G x^ε − y‖`.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn coefficient_norm(&self) -> f64 {
        self.coefficients.norm()
    }
}

/// Solves `G x ≈ y` keeping only singular values strictly larger than `epsilon`.
pub fn truncated_svd_solve(sys: &GramSystem, y: &DataVector, epsilon: f64) -> Result<RegularizedSolution> {
    if y.len() != sys.rows() {
        return Err(FrameError::DimensionMismatch { expected: sys.rows(), actual: y.len() });
    }
    if !(epsilon >= 0.0) {
        return Err(FrameError::InvalidParameter(format!("threshold must be nonnegative, got {epsilon}")));
    }
    let svd = sys.svd();
    let kept = svd.kept(epsilon);
    let mut x = DVector::zeros(sys.cols());
    for n in 0..kept {
        let coef = svd.u().column(n).dot(y.values()) / svd.singular_values()[n];
        x.axpy(coef, &svd.v().column(n), 1.0);
    }
    let residual = (sys.matrix() * &x - y.values()).norm();
    Ok(RegularizedSolution { coefficients: x, epsilon, kept, residual })
}

/// `P^ε_{M,N} f = T_N x^ε`.
#[derive(Debug, Clone)]
pub struct Approximant {
    frame: FrameSpec,
    solution: RegularizedSolution,
}

impl Approximant {
    pub fn new(frame: FrameSpec, solution: RegularizedSolution) -> Result<Self> {
        if solution.coefficients.len() != frame.len() {
            return Err(FrameError::DimensionMismatch {
                expected: frame.len(),
                actual: solution.coefficients.len(),
            });
        }
        Ok(Self { frame, solution })
    }

    /// Solves against an already assembled system.
    pub fn from_system(frame: &FrameSpec, sys: &GramSystem, y: &DataVector, epsilon: f64) -> Result<Self> {
        Self::new(frame.clone(), truncated_svd_solve(sys, y, epsilon)?)
    }

    pub fn frame(&self) -> &FrameSpec {
        &self.frame
    }

    pub fn solution(&self) -> &RegularizedSolution {
        &self.solution
    }

    pub fn coefficients(&self) -> CoefficientVector {
        CoefficientVector::new(self.frame.clone(), self.solution.coefficients.as_slice().to_vec())
            .expect("length checked at construction")
    }
}

impl RealFunction for Approximant {
    fn eval(&self, x: f64) -> Result<f64> {
        self.frame.synthesize(self.solution.coefficients.as_slice(), x)
    }
}

/// Sample `f`, assemble `G_{M,N}` and solve.
pub fn approximate(
    f: &dyn RealFunction,
    frame: &FrameSpec,
    scheme: &SamplingScheme,
    epsilon: f64,
) -> Result<Approximant> {
    let sys = build_system(frame, scheme)?;
    let y = scheme.sample(f)?;
    Approximant::from_system(frame, &sys, &y, epsilon)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    /// `(x, |f(x) − P f(x)|)` per probe.
    pub pointwise: Vec<(f64, f64)>,
    pub residual: f64,
    pub coefficient_norm: f64,
}

impl ErrorReport {
    pub fn max_error(&self) -> f64 {
        self.pointwise.iter().map(|&(_, e)| e).fold(0.0, f64::max)
    }
}

pub fn error_report(approx: &Approximant, f: &dyn RealFunction, probes: &[f64]) -> Result<ErrorReport> {
    let mut pointwise = Vec::with_capacity(probes.len());
    for &x in probes {
        pointwise.push((x, (f.eval(x)? - approx.eval(x)?).abs()));
    }
    Ok(ErrorReport {
        pointwise,
        residual: approx.solution.residual,
        coefficient_norm: approx.solution.coefficient_norm(),
    })
}

/// Outcome of checking one inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
}

impl BoundCheck {
    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }

    /// Holds up to a relative tolerance `tol` on the right-hand side.
    pub fn holds(&self, tol: f64) -> bool {
        self.lhs <= self.rhs + tol * self.rhs.abs().max(1.0)
    }
}

/// Which form of the error bound to test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ErrorBoundForm {
    /// `‖f − T z‖ + κ‖f − T z‖_M + ελ‖z‖`.
    Indirect,
    /// `(1 + √B κ)‖f − T z‖ + ελ‖z‖`, valid when the data are inner products
    /// with the frame itself or with an orthonormal basis.
    InnerProduct { frame_upper_bound: f64 },
}

/// Context needed to evaluate the norms entering the bounds.
pub struct BoundContext<'a> {
    pub scheme: &'a SamplingScheme,
    /// Rule used for continuous `L²` norms; must resolve the singularity.
    pub norm_rule: &'a QuadratureRule,
}

fn l2_norm(rule: &QuadratureRule, f: &dyn RealFunction) -> Result<f64> {
    let mut acc = 0.0;
    for (x, w) in rule.iter() {
        let v = f.eval(x)?;
        acc += w * v * v;
    }
    Ok(acc.sqrt())
}

struct Difference<'a> {
    f: &'a dyn RealFunction,
    g: &'a dyn RealFunction,
}

impl RealFunction for Difference<'_> {
    fn eval(&self, x: f64) -> Result<f64> {
        Ok(self.f.eval(x)? - self.g.eval(x)?)
    }
}

/// Checks `‖f − P^ε f‖ ≤ ‖f − T_N z‖ + κ‖f − T_N z‖_M + ελ‖z‖` (or the
/// inner-product specialization).
pub fn verify_error_bound(
    approx: &Approximant,
    f: &dyn RealFunction,
    z: &CoefficientVector,
    kappa: f64,
    lambda: f64,
    ctx: &BoundContext<'_>,
    form: ErrorBoundForm,
) -> Result<BoundCheck> {
    let eps = approx.solution.epsilon;
    let lhs = l2_norm(ctx.norm_rule, &Difference { f, g: approx })?;
    let dz = Difference { f, g: z };
    let cont = l2_norm(ctx.norm_rule, &dz)?;
    let rhs = match form {
        ErrorBoundForm::Indirect => cont + kappa * ctx.scheme.discrete_norm(&dz)? + eps * lambda * z.norm(),
        ErrorBoundForm::InnerProduct { frame_upper_bound } => {
            (1.0 + frame_upper_bound.sqrt() * kappa) * cont + eps * lambda * z.norm()
        }
    };
    Ok(BoundCheck { lhs, rhs })
}

/// Checks `‖x^ε‖ ≤ ε⁻¹‖f − T_N z‖_M + ‖z‖`.
pub fn verify_coefficient_bound(
    solution: &RegularizedSolution,
    f: &dyn RealFunction,
    z: &CoefficientVector,
    scheme: &SamplingScheme,
) -> Result<BoundCheck> {
    let lhs = solution.coefficient_norm();
    let discrete = scheme.discrete_norm(&Difference { f, g: z })?;
    let rhs = if discrete == 0.0 { z.norm() } else { discrete / solution.epsilon + z.norm() };
    Ok(BoundCheck { lhs, rhs })
}
