//! Stability constants `κ^ε_{M,N}`, `λ^ε_{M,N}`, `C^ε_{M,N}` and the stable
//! sampling rate `Θ^ε(N, θ)`.
//!
//! With `H` a quadrature factor of the continuous Gram matrix and
//! `G_{M,N} = U Σ Vᵀ`,
//!
//! ```text
//! κ = ‖H V (Σ^ε)†‖₂        λ = ε⁻¹ ‖H V (I − I^ε)‖₂        A′_{M,N} = ‖H V Σ⁻¹‖₂⁻²
//! ```
//!
//! where `I^ε` selects the singular values strictly above `ε`. The κ formula
//! is exact whenever the data map is onto `ℝ^M`, which is the case for both
//! inner-product and point-evaluation data.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{FrameError, Result};
use crate::frames::FrameSpec;
use crate::gram::{build_gram_factor, build_system, default_gram_rule, GramFactor, GramSystem};
use crate::sampling::{SchemeFamily, SchemeKind};

/// `V_kept Σ_kept⁻¹`.
fn scaled_kept_vectors(sys: &GramSystem, kept: usize) -> DMatrix<f64> {
    let svd = sys.svd();
    let mut x = svd.v().columns(0, kept).into_owned();
    for (n, mut col) in x.column_iter_mut().enumerate() {
        col /= svd.singular_values()[n];
    }
    x
}

/// `κ^ε_{M,N} = ‖H V (Σ^ε)†‖₂`; zero when every singular value is discarded.
pub fn compute_kappa(sys: &GramSystem, factor: &GramFactor, epsilon: f64) -> f64 {
    let kept = sys.svd().kept(epsilon);
    factor.operator_norm(&scaled_kept_vectors(sys, kept))
}

/// `λ^ε_{M,N} = ε⁻¹‖H V (I − I^ε)‖₂`; zero when nothing is discarded.
pub fn compute_lambda(sys: &GramSystem, factor: &GramFactor, epsilon: f64) -> f64 {
    let kept = sys.svd().kept(epsilon);
    let n = sys.cols();
    if kept == n {
        return 0.0;
    }
    let discarded = sys.svd().v().columns(kept, n - kept).into_owned();
    let norm = factor.operator_norm(&discarded);
    if epsilon > 0.0 {
        norm / epsilon
    } else {
        f64::INFINITY
    }
}

/// `A′_{M,N} = min_z ‖G z‖² / ‖T_N z‖²`, i.e. the smallest generalized
/// eigenvalue of `GᵀG` against `G_N ≈ HᵀH`.
pub fn richness_constant(sys: &GramSystem, factor: &GramFactor) -> Result<f64> {
    if sys.rows() < sys.cols() {
        return Err(FrameError::Undersampled { m: sys.rows(), n: sys.cols() });
    }
    if !(sys.sigma_min() > 0.0) {
        return Err(FrameError::RankDeficient(
            "sampled system has a zero singular value; the discrete norm is not a norm on H_N".into(),
        ));
    }
    let inv = factor.operator_norm(&scaled_kept_vectors(sys, sys.cols()));
    Ok(1.0 / (inv * inv))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsReport {
    pub kappa: f64,
    pub lambda: f64,
    /// `√A · max{κ, λ}`.
    pub c: f64,
    pub kept_rank: usize,
    pub sigma_max: f64,
    pub sigma_min: f64,
    /// `A′_{M,N}`; `0` when the system is numerically rank deficient.
    pub a_prime_mn: f64,
}

impl DiagnosticsReport {
    pub fn compute(frame: &FrameSpec, sys: &GramSystem, factor: &GramFactor, epsilon: f64) -> Self {
        let kappa = compute_kappa(sys, factor, epsilon);
        let lambda = compute_lambda(sys, factor, epsilon);
        Self {
            kappa,
            lambda,
            c: frame.lower_bound().sqrt() * kappa.max(lambda),
            kept_rank: sys.svd().kept(epsilon),
            sigma_max: sys.sigma_max(),
            sigma_min: sys.sigma_min(),
            a_prime_mn: richness_constant(sys, factor).unwrap_or(0.0),
        }
    }

    /// Violations of the global and richness bounds on κ and λ, with a
    /// relative slack `tol`. Empty when everything holds.
    pub fn bound_violations(&self, frame: &FrameSpec, kind: SchemeKind, epsilon: f64, tol: f64) -> Vec<String> {
        let mut out = Vec::new();
        let mut check = |name: &str, value: f64, bound: f64| {
            if value > bound * (1.0 + tol) + tol {
                out.push(format!("{name} = {value:e} exceeds {bound:e}"));
            }
        };
        let global = frame.upper_bound().sqrt() / epsilon;
        check("kappa (sqrt(B)/eps)", self.kappa, global);
        check("lambda (sqrt(B)/eps)", self.lambda, global);
        if kind == SchemeKind::BasisInnerProducts && frame.kind() == crate::frames::FrameKind::LegendreOnb {
            let root = 1.0 / epsilon.sqrt();
            check("kappa (1/sqrt(eps))", self.kappa, root);
            check("lambda (1/sqrt(eps))", self.lambda, root);
        }
        if self.a_prime_mn > 0.0 {
            let rich = 1.0 / self.a_prime_mn.sqrt();
            check("kappa (1/sqrt(A'))", self.kappa, rich);
            check("lambda (1/sqrt(A'))", self.lambda, rich);
        }
        out
    }
}

/// Which inequalities define `Θ^ε(N, θ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SsrCriterion {
    /// `C^ε_{M,N} = √A max{κ, λ} ≤ θ`.
    FrameConstant,
    /// `κ ≤ θ/√A′` and `λ ≤ θ/√A′` with the nominal `A′` of the scheme.
    DataRichness,
}

impl SsrCriterion {
    /// Frame-constant form for inner-product data, richness form otherwise.
    pub fn default_for(family: &SchemeFamily) -> Self {
        match family.kind() {
            SchemeKind::BasisInnerProducts => SsrCriterion::FrameConstant,
            SchemeKind::WeightedPointValues => SsrCriterion::DataRichness,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsrOptions {
    pub criterion: SsrCriterion,
    /// Search stride; `None` means `max(1, ⌊N/20⌋)`.
    pub stride: Option<usize>,
    /// Largest `M` tried; `None` means `64 N`.
    pub m_max: Option<usize>,
}

impl SsrOptions {
    pub fn for_family(family: &SchemeFamily) -> Self {
        Self { criterion: SsrCriterion::default_for(family), stride: None, m_max: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SsrOutcome {
    /// Smallest grid point `M` meeting the criterion.
    Found(usize),
    /// No grid point up to `m_max` met the criterion.
    NotFound { m_max: usize },
}

impl SsrOutcome {
    pub fn value(&self) -> Option<usize> {
        match self {
            SsrOutcome::Found(m) => Some(*m),
            SsrOutcome::NotFound { .. } => None,
        }
    }
}

fn meets(criterion: SsrCriterion, frame: &FrameSpec, family: &SchemeFamily, kappa: f64, lambda: f64, theta: f64) -> bool {
    match criterion {
        SsrCriterion::FrameConstant => frame.lower_bound().sqrt() * kappa.max(lambda) <= theta,
        SsrCriterion::DataRichness => {
            let bound = theta / family.a_prime().sqrt();
            kappa <= bound && lambda <= bound
        }
    }
}

/// Searches `M ∈ {N, N+s, N+2s, …, M_max}` for the smallest `M` satisfying
/// the chosen criterion. With a stride above one the result is an upper
/// bound on the exact minimum, within one stride of it.
pub fn stable_sampling_rate(
    frame: &FrameSpec,
    family: &SchemeFamily,
    theta: f64,
    epsilon: f64,
    options: SsrOptions,
) -> Result<SsrOutcome> {
    if !(theta > 1.0) {
        return Err(FrameError::InvalidParameter(format!("theta must exceed 1, got {theta}")));
    }
    let n = frame.len();
    let stride = options.stride.unwrap_or((n / 20).max(1)).max(1);
    let m_max = options.m_max.unwrap_or(64 * n).max(n);
    let factor = build_gram_factor(frame, &default_gram_rule(frame))?;
    let mut m = n;
    while m <= m_max {
        let sys = build_system(frame, &family.build(m)?)?;
        let kappa = compute_kappa(&sys, &factor, epsilon);
        let lambda = compute_lambda(&sys, &factor, epsilon);
        if meets(options.criterion, frame, family, kappa, lambda, theta) {
            return Ok(SsrOutcome::Found(m));
        }
        m += stride;
    }
    Ok(SsrOutcome::NotFound { m_max })
}

/// One cell of a constants sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantsRow {
    pub gamma: f64,
    pub n: usize,
    pub epsilon: f64,
    pub m: usize,
    pub kappa: f64,
    pub lambda: f64,
    pub kept_rank: usize,
    pub a_prime_mn: f64,
}

/// `M = ⌈γN⌉`, guarding against `γN` landing a hair above an integer.
pub fn oversampled_count(gamma: f64, n: usize) -> usize {
    let raw = gamma * n as f64;
    let rounded = raw.round();
    if (raw - rounded).abs() <= 1e-9 * raw.max(1.0) {
        rounded as usize
    } else {
        raw.ceil() as usize
    }
}

/// κ, λ and `A′_{M,N}` over the grid `gammas × ns × epsilons` with
/// `M = ⌈γN⌉`. Rows come out ordered by `γ`, then `N`, then `ε`.
pub fn constants_sweep(
    frame: &FrameSpec,
    family: &SchemeFamily,
    gammas: &[f64],
    ns: &[usize],
    epsilons: &[f64],
) -> Result<Vec<ConstantsRow>> {
    if let Some(g) = gammas.iter().find(|&&g| !(g >= 1.0)) {
        return Err(FrameError::InvalidParameter(format!("oversampling factor must be >= 1, got {g}")));
    }
    let factors: Vec<(usize, GramFactor)> = ns
        .par_iter()
        .map(|&n| {
            let f = frame.resized(n)?;
            Ok((n, build_gram_factor(&f, &default_gram_rule(&f))?))
        })
        .collect::<Result<_>>()?;
    let cells: Vec<(f64, usize, &GramFactor)> = gammas
        .iter()
        .flat_map(|&g| factors.iter().map(move |(n, fac)| (g, *n, fac)))
        .collect();
    let rows: Vec<Vec<ConstantsRow>> = cells
        .par_iter()
        .map(|&(gamma, n, factor)| {
            let f = frame.resized(n)?;
            let m = oversampled_count(gamma, n);
            let sys = build_system(&f, &family.build(m)?)?;
            let a_prime_mn = richness_constant(&sys, factor).unwrap_or(0.0);
            Ok(epsilons
                .iter()
                .map(|&epsilon| ConstantsRow {
                    gamma,
                    n,
                    epsilon,
                    m,
                    kappa: compute_kappa(&sys, factor, epsilon),
                    lambda: compute_lambda(&sys, factor, epsilon),
                    kept_rank: sys.svd().kept(epsilon),
                    a_prime_mn,
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}
