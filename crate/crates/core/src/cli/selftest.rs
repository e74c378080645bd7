use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::diagnostics::DiagnosticsReport;
use crate::frames::{CoefficientVector, FrameSpec, TargetFunction};
use crate::gram::{build_gram_factor, build_system, default_gram_rule};
use crate::orthopoly::{gauss_legendre_rule, legendre, legendre_log_moment, legendre_shifted, QuadratureRule};
use crate::sampling::{NodeKind, SamplingScheme, SchemeFamily, Weighting};
use crate::solver::{truncated_svd_solve, verify_coefficient_bound, verify_error_bound, Approximant, BoundContext, ErrorBoundForm};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelftestReport {
    pub checks: Vec<Check>,
}

impl SelftestReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// One `PASS`/`FAIL` line per check.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            s.push_str(&format!("{tag} {} {}\n", c.name, c.detail));
        }
        s
    }
}

/// Runs the built-in checks. `log_rule` integrates `P_n(2x−1) log x`; pass a
/// deliberately broken rule to see the log-integral check fail.
pub fn selftest(log_rule: &QuadratureRule, seed: u64) -> SelftestReport {
    let checks = vec![
        log_integrals(log_rule),
        orthonormality(),
        bound_invariants(),
        random_bounds(seed),
    ];
    SelftestReport { checks }
}

fn log_integrals(rule: &QuadratureRule) -> Check {
    let worst = (1..=20)
        .map(|n| (rule.integrate(|x| legendre(n, 2.0 * x - 1.0) * x.ln()) - legendre_log_moment(n)).abs())
        .fold(0.0, f64::max);
    Check { name: "log_integrals", passed: worst <= 1e-11, detail: format!("max_abs_err={worst:.3e} tol=1e-11") }
}

fn orthonormality() -> Check {
    let rule = gauss_legendre_rule(32);
    let mut worst: f64 = 0.0;
    for m in 0..30 {
        for n in 0..=m {
            let ip = rule.integrate(|x| legendre_shifted(m, x) * legendre_shifted(n, x));
            let target = if m == n { 1.0 } else { 0.0 };
            worst = worst.max((ip - target).abs());
        }
    }
    Check { name: "legendre_orthonormality", passed: worst <= 1e-12, detail: format!("max_abs_err={worst:.3e} tol=1e-12") }
}

fn bound_invariants() -> Check {
    let run = || -> crate::Result<(usize, usize)> {
        let mut cells = 0;
        let mut violations = 0;
        let legendre_points = SchemeFamily::Points { kind: NodeKind::GaussLegendre, weighting: Weighting::Quadrature };
        for n in [10, 20] {
            let frame = FrameSpec::onb_plus_k(5, n)?;
            let factor = build_gram_factor(&frame, &default_gram_rule(&frame))?;
            for gamma in [1, 2] {
                let scheme = legendre_points.build(gamma * n)?;
                let sys = build_system(&frame, &scheme)?;
                for eps in [1e-5, 1e-8] {
                    let rep = DiagnosticsReport::compute(&frame, &sys, &factor, eps);
                    violations += rep.bound_violations(&frame, scheme.kind(), eps, 1e-9).len();
                    cells += 1;
                }
            }
        }
        let frame = FrameSpec::legendre(10)?;
        let factor = build_gram_factor(&frame, &default_gram_rule(&frame))?;
        let scheme = SamplingScheme::inner_products(20)?;
        let sys = build_system(&frame, &scheme)?;
        for eps in [1e-5, 0.5] {
            let rep = DiagnosticsReport::compute(&frame, &sys, &factor, eps);
            violations += rep.bound_violations(&frame, scheme.kind(), eps, 1e-9).len();
            cells += 1;
        }
        Ok((cells, violations))
    };
    match run() {
        Ok((cells, v)) => Check { name: "bound_invariants", passed: v == 0, detail: format!("cells={cells} violations={v}") },
        Err(e) => Check { name: "bound_invariants", passed: false, detail: format!("error: {e}") },
    }
}

fn random_bounds(seed: u64) -> Check {
    let run = || -> crate::Result<(usize, f64)> {
        let frame = FrameSpec::onb_plus_k(5, 12)?;
        let scheme = SamplingScheme::points(NodeKind::GaussLegendre, 24, Weighting::Quadrature)?;
        let sys = build_system(&frame, &scheme)?;
        let norm_rule = default_gram_rule(&frame);
        let factor = build_gram_factor(&frame, &norm_rule)?;
        let eps = 1e-8;
        let rep = DiagnosticsReport::compute(&frame, &sys, &factor, eps);
        let y = scheme.sample(&TargetFunction)?;
        let sol = truncated_svd_solve(&sys, &y, eps)?;
        let approx = Approximant::new(frame.clone(), sol.clone())?;
        let ctx = BoundContext { scheme: &scheme, norm_rule: &norm_rule };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut violations = 0;
        let mut tightest = f64::INFINITY;
        for _ in 0..20 {
            let z: Vec<f64> = (0..frame.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
            let z = CoefficientVector::new(frame.clone(), z)?;
            let e = verify_error_bound(&approx, &TargetFunction, &z, rep.kappa, rep.lambda, &ctx, ErrorBoundForm::Indirect)?;
            let c = verify_coefficient_bound(&sol, &TargetFunction, &z, &scheme)?;
            for b in [e, c] {
                if !b.holds(1e-9) {
                    violations += 1;
                }
                tightest = tightest.min(b.lhs / b.rhs);
            }
        }
        Ok((violations, tightest))
    };
    match run() {
        Ok((v, t)) => Check {
            name: "random_error_bounds",
            passed: v == 0,
            detail: format!("samples=20 violations={v} min_lhs_over_rhs={t:.6e}"),
        },
        Err(e) => Check { name: "random_error_bounds", passed: false, detail: format!("error: {e}") },
    }
}
