//! Assembly of the sampled system matrix `G_{M,N}`, a quadrature factor
//! `H` of the continuous Gram matrix `G_N ≈ HᵀH`, and their SVDs.

use std::io::Write;

use nalgebra::{DMatrix, DVector, SVD};

use crate::error::{FrameError, Result};
use crate::frames::FrameSpec;
use crate::orthopoly::{hp_rule_for_degree, QuadratureRule};
use crate::sampling::SamplingScheme;

/// Thin SVD `A = U Σ Vᵀ` with singular values sorted descending.
#[derive(Debug, Clone)]
pub struct Svd {
    u: DMatrix<f64>,
    sigma: DVector<f64>,
    v: DMatrix<f64>,
}

impl Svd {
    pub fn new(a: &DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = a.shape();
        let svd = SVD::try_new(a.clone(), true, true, f64::EPSILON, 10_000)
            .ok_or(FrameError::SvdFailed { rows, cols })?;
        let (Some(u), Some(v_t)) = (svd.u, svd.v_t) else {
            return Err(FrameError::SvdFailed { rows, cols });
        };
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
        let sigma = DVector::from_iterator(order.len(), order.iter().map(|&i| svd.singular_values[i]));
        let u = DMatrix::from_fn(u.nrows(), order.len(), |r, c| u[(r, order[c])]);
        let v = DMatrix::from_fn(v_t.ncols(), order.len(), |r, c| v_t[(order[c], r)]);
        if sigma.iter().any(|s| !s.is_finite()) {
            return Err(FrameError::SvdFailed { rows, cols });
        }
        Ok(Self { u, sigma, v })
    }

    pub fn u(&self) -> &DMatrix<f64> {
        &self.u
    }

    pub fn v(&self) -> &DMatrix<f64> {
        &self.v
    }

    /// Singular values, descending.
    pub fn singular_values(&self) -> &DVector<f64> {
        &self.sigma
    }

    /// Number of singular values strictly above `epsilon`; the kept set is
    /// always this long prefix.
    pub fn kept(&self, epsilon: f64) -> usize {
        self.sigma.iter().take_while(|&&s| s > epsilon).count()
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        &self.u * DMatrix::from_diagonal(&self.sigma) * self.v.transpose()
    }
}

/// Largest singular value.
pub fn spectral_norm(a: &DMatrix<f64>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.singular_values().iter().copied().fold(0.0, f64::max)
}

/// The sampled system `G_{M,N}` and its SVD.
#[derive(Debug, Clone)]
pub struct GramSystem {
    matrix: DMatrix<f64>,
    svd: Svd,
}

impl GramSystem {
    /// Wraps an explicit matrix; the SVD is computed immediately.
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() < matrix.ncols() {
            return Err(FrameError::Undersampled { m: matrix.nrows(), n: matrix.ncols() });
        }
        let svd = Svd::new(&matrix)?;
        Ok(Self { matrix, svd })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn svd(&self) -> &Svd {
        &self.svd
    }

    /// Number of rows `M`.
    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    /// Number of columns `N`.
    pub fn cols(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn sigma_max(&self) -> f64 {
        self.svd.sigma.iter().copied().next().unwrap_or(0.0)
    }

    pub fn sigma_min(&self) -> f64 {
        self.svd.sigma.iter().copied().last().unwrap_or(0.0)
    }

    /// `σ_max / σ_min`.
    pub fn condition_number(&self) -> Result<f64> {
        condition_number(self)
    }

    /// Writes the matrix as CSV, row-major, 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        write_matrix_csv(&self.matrix, out)
    }
}

/// `σ_max / σ_min`; an error when the smallest singular value is zero.
pub fn condition_number(sys: &GramSystem) -> Result<f64> {
    let (hi, lo) = (sys.sigma_max(), sys.sigma_min());
    if lo <= 0.0 || !(hi / lo).is_finite() {
        return Err(FrameError::RankDeficient("smallest singular value is zero; condition number is infinite".into()));
    }
    Ok(hi / lo)
}

/// `G_{M,N} = {ℓ_{m,M}(Φ_j)}` with its SVD.
pub fn build_system(frame: &FrameSpec, scheme: &SamplingScheme) -> Result<GramSystem> {
    let (m, n) = (scheme.len(), frame.len());
    if m < n {
        return Err(FrameError::Undersampled { m, n });
    }
    GramSystem::from_matrix(scheme.frame_matrix(frame)?)
}

/// Quadrature factor `H_{Q,N}` with `HᵀH ≈ G_N`, stored together with the
/// triangular factor `R` of `H = QR` so that `‖H X‖₂ = ‖R X‖₂`.
#[derive(Debug, Clone)]
pub struct GramFactor {
    h: DMatrix<f64>,
    r: DMatrix<f64>,
    rule: QuadratureRule,
}

impl GramFactor {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.h
    }

    /// `R` with `RᵀR = HᵀH`.
    pub fn triangular(&self) -> &DMatrix<f64> {
        &self.r
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    /// Approximate continuous Gram matrix `HᵀH`.
    pub fn gram(&self) -> DMatrix<f64> {
        self.h.transpose() * &self.h
    }

    /// Singular values of `G_N ≈ HᵀH`, descending, computed as the squared
    /// singular values of `H` so that they stay accurate far below `ε_mach ‖G_N‖`.
    pub fn gram_singular_values(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.r.singular_values().iter().map(|v| v * v).collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    /// `κ(G_N) = σ_max(H)² / σ_min(H)²`.
    pub fn gram_condition_number(&self) -> Result<f64> {
        let s = self.gram_singular_values();
        let (hi, lo) = (s[0], s[s.len() - 1]);
        if lo <= 0.0 || !(hi / lo).is_finite() {
            return Err(FrameError::RankDeficient("continuous Gram matrix is singular at working precision".into()));
        }
        Ok(hi / lo)
    }

    /// `‖T_N z‖` for a coefficient vector `z`.
    pub fn synthesis_norm(&self, z: &DVector<f64>) -> f64 {
        (&self.r * z).norm()
    }

    /// `‖T_N X‖₂` as an operator norm, i.e. `‖H X‖₂`.
    pub fn operator_norm(&self, x: &DMatrix<f64>) -> f64 {
        if x.ncols() == 0 {
            return 0.0;
        }
        spectral_norm(&(&self.r * x))
    }
}

/// Graded rule accurate for all pairwise products of elements of `frame`.
pub fn default_gram_rule(frame: &FrameSpec) -> QuadratureRule {
    hp_rule_for_degree(2 * frame.max_degree() + 2)
}

/// `H[k][j] = √w_k Φ_j(x_k)`.
pub fn build_gram_factor(frame: &FrameSpec, rule: &QuadratureRule) -> Result<GramFactor> {
    let n = frame.len();
    if rule.len() < n {
        return Err(FrameError::InvalidParameter(format!(
            "quadrature rule with {} nodes cannot resolve {n} frame elements",
            rule.len()
        )));
    }
    let mut h = DMatrix::zeros(rule.len(), n);
    let mut row = vec![0.0; n];
    for (k, (x, w)) in rule.iter().enumerate() {
        frame.eval_all(x, &mut row)?;
        let sw = w.sqrt();
        for (j, v) in row.iter().enumerate() {
            h[(k, j)] = sw * v;
        }
    }
    let r = h.clone().qr().r();
    Ok(GramFactor { h, r, rule: rule.clone() })
}

/// Writes `matrix` as comma separated rows with 17 significant digits.
pub fn write_matrix_csv<W: Write>(matrix: &DMatrix<f64>, mut out: W) -> std::io::Result<()> {
    for i in 0..matrix.nrows() {
        let row: Vec<String> = (0..matrix.ncols()).map(|j| format!("{:.16e}", matrix[(i, j)])).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}
