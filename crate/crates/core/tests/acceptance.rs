//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::time::{Duration, Instant};

use frameapprox::diagnostics::{
    compute_kappa, compute_lambda, constants_sweep, stable_sampling_rate, DiagnosticsReport, SsrCriterion, SsrOptions,
    SsrOutcome,
};
use frameapprox::gram::{build_gram_factor, default_gram_rule};
use frameapprox::orthopoly::{hp_log_quadrature, hp_rule_for_degree, legendre, legendre_log_moment, QuadratureRule};
use frameapprox::solver::{error_report, verify_coefficient_bound, verify_error_bound, BoundContext, ErrorBoundForm};
use frameapprox::{
    approximate, build_system, truncated_svd_solve, Approximant, CoefficientVector, DataVector, FrameSpec, NodeKind,
    SamplingScheme, SchemeFamily, TargetFunction, Weighting,
};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

const LEGENDRE_PTS: SchemeFamily = SchemeFamily::Points { kind: NodeKind::GaussLegendre, weighting: Weighting::Quadrature };
const EQUISPACED_PTS: SchemeFamily = SchemeFamily::Points { kind: NodeKind::Equispaced, weighting: Weighting::Quadrature };
const CHEBYSHEV_PTS: SchemeFamily = SchemeFamily::Points { kind: NodeKind::Chebyshev, weighting: Weighting::Unweighted };

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let t = Instant::now();
    let r = f();
    let dt = t.elapsed();
    match r {
        Ok(msg) if dt <= limit => Ok(format!("{msg} [{:.2}s]", dt.as_secs_f64())),
        Ok(msg) => Err(format!("{msg}; runtime {:.2}s exceeds {:.0}s", dt.as_secs_f64(), limit.as_secs_f64())),
        Err(msg) => Err(format!("{msg} [{:.2}s]", dt.as_secs_f64())),
    }
}

fn check(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    format!("error: {e}")
}

fn max_probe_error(frame: &FrameSpec, scheme: &SamplingScheme, eps: f64, probes: &[f64]) -> Result<f64, String> {
    let approx = approximate(&TargetFunction, frame, scheme, eps).map_err(err)?;
    Ok(error_report(&approx, &TargetFunction, probes).map_err(err)?.max_error())
}

fn analytic_log_moments() -> Outcome {
    let rule = hp_rule_for_degree(20);
    let worst = (1..=20)
        .map(|n| (rule.integrate(|x| legendre(n, 2.0 * x - 1.0) * x.ln()) - legendre_log_moment(n)).abs())
        .fold(0.0, f64::max);
    check(worst <= 1e-11, format!("max |quadrature - closed form| = {worst:.2e} (tol 1e-11, n = 1..20)"))
}

fn bound_suite() -> Outcome {
    let k = 5;
    let frame = FrameSpec::onb_plus_k(k, 10).map_err(err)?;
    let sqrt_b = (1.0 + 2.0 * (k * k) as f64).sqrt();
    let tol = 1e-9;
    let mut cells = 0;
    let mut bad = Vec::new();
    for (name, family) in [("legendre", LEGENDRE_PTS), ("equispaced", EQUISPACED_PTS)] {
        let rows = constants_sweep(&frame, &family, &[1.0, 2.0, 4.0], &[10, 20, 40], &[1e-5, 1e-8]).map_err(err)?;
        for r in rows {
            cells += 1;
            let global = sqrt_b / r.epsilon;
            let rich = if r.a_prime_mn > 0.0 { 1.0 / r.a_prime_mn.sqrt() } else { f64::INFINITY };
            for (what, v) in [("kappa", r.kappa), ("lambda", r.lambda)] {
                if v > global * (1.0 + tol) || v > rich * (1.0 + tol) {
                    bad.push(format!("{name} N={} M={} eps={:e}: {what}={v:e}", r.n, r.m, r.epsilon));
                }
            }
        }
    }
    check(bad.is_empty(), format!("{cells} cells, {} violations {:?}", bad.len(), bad))
}

struct BoundCell {
    label: &'static str,
    frame: FrameSpec,
    scheme: SamplingScheme,
    eps: f64,
}

fn bound_cells() -> Result<Vec<BoundCell>, String> {
    let k5 = |n| FrameSpec::onb_plus_k(5, n).map_err(err);
    Ok(vec![
        BoundCell { label: "legendre N=20 M=40 eps=1e-5", frame: k5(20)?, scheme: LEGENDRE_PTS.build(40).map_err(err)?, eps: 1e-5 },
        BoundCell { label: "legendre N=20 M=40 eps=1e-8", frame: k5(20)?, scheme: LEGENDRE_PTS.build(40).map_err(err)?, eps: 1e-8 },
        BoundCell { label: "chebyshev N=20 M=20 eps=1e-5", frame: k5(20)?, scheme: CHEBYSHEV_PTS.build(20).map_err(err)?, eps: 1e-5 },
        BoundCell { label: "chebyshev N=40 M=80 eps=2e-13", frame: k5(40)?, scheme: CHEBYSHEV_PTS.build(80).map_err(err)?, eps: 2e-13 },
        BoundCell { label: "equispaced N=20 M=40 eps=1e-8", frame: k5(20)?, scheme: EQUISPACED_PTS.build(40).map_err(err)?, eps: 1e-8 },
        BoundCell {
            label: "inner N=20 M=40 eps=1e-8 (ONB+1)",
            frame: FrameSpec::onb_plus_one(20).map_err(err)?,
            scheme: SamplingScheme::inner_products(40).map_err(err)?,
            eps: 1e-8,
        },
    ])
}

/// Half the draws are plain Gaussian vectors, half perturb the computed
/// coefficients so that `T z` sits close to `f` and the bounds are tight.
fn random_z(rng: &mut ChaCha8Rng, frame: &FrameSpec, centre: &DVector<f64>, i: usize) -> Result<CoefficientVector, String> {
    let scale = if i.is_multiple_of(2) { 1.0 } else { 10f64.powi(-rng.random_range(2..12)) };
    let values = (0..frame.len())
        .map(|j| {
            let g: f64 = rng.sample(StandardNormal);
            if i.is_multiple_of(2) { g } else { centre[j] + scale * g }
        })
        .collect();
    CoefficientVector::new(frame.clone(), values).map_err(err)
}

fn random_bounds(coefficient_form: bool) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(if coefficient_form { 4 } else { 3 });
    let mut checked = 0;
    let mut bad = Vec::new();
    let mut tightest: f64 = 0.0;
    for cell in bound_cells()? {
        let norm_rule = default_gram_rule(&cell.frame);
        let factor = build_gram_factor(&cell.frame, &norm_rule).map_err(err)?;
        let sys = build_system(&cell.frame, &cell.scheme).map_err(err)?;
        let rep = DiagnosticsReport::compute(&cell.frame, &sys, &factor, cell.eps);
        let y = cell.scheme.sample(&TargetFunction).map_err(err)?;
        let sol = truncated_svd_solve(&sys, &y, cell.eps).map_err(err)?;
        let approx = Approximant::new(cell.frame.clone(), sol.clone()).map_err(err)?;
        let ctx = BoundContext { scheme: &cell.scheme, norm_rule: &norm_rule };
        for i in 0..100 {
            let z = random_z(&mut rng, &cell.frame, sol.coefficients(), i)?;
            let b = if coefficient_form {
                verify_coefficient_bound(&sol, &TargetFunction, &z, &cell.scheme)
            } else {
                verify_error_bound(&approx, &TargetFunction, &z, rep.kappa, rep.lambda, &ctx, ErrorBoundForm::Indirect)
            }
            .map_err(err)?;
            checked += 1;
            tightest = tightest.max(b.lhs / b.rhs);
            if !b.holds(1e-9) {
                bad.push(format!("{} draw {i}: {:e} > {:e}", cell.label, b.lhs, b.rhs));
            }
        }
    }
    check(
        bad.is_empty(),
        format!("{checked} draws over 6 cells, {} violations, max lhs/rhs = {tightest:.3} {:?}", bad.len(), bad),
    )
}

fn onb_plus_one_ssr() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    let opts = SsrOptions { criterion: SsrCriterion::FrameConstant, stride: Some(1), m_max: None };
    for n in [5usize, 10, 20, 40] {
        let frame = FrameSpec::onb_plus_one(n).map_err(err)?;
        let bound = 2f64.sqrt() * n as f64 + 1.0;
        match stable_sampling_rate(&frame, &SchemeFamily::InnerProducts, 2.0, 1e-8, opts).map_err(err)? {
            SsrOutcome::Found(m) => {
                ok &= m as f64 <= bound;
                parts.push(format!("N={n}: {m} <= {bound:.2}"));
            }
            SsrOutcome::NotFound { m_max } => {
                ok = false;
                parts.push(format!("N={n}: none up to {m_max}"));
            }
        }
    }
    check(ok, parts.join(", "))
}

fn fig_b() -> Outcome {
    let probes = [0.2, 0.5, 0.9];
    let (n, m, eps) = (60, 120, 2e-13);
    let scheme = CHEBYSHEV_PTS.build(m).map_err(err)?;
    let enriched = max_probe_error(&FrameSpec::onb_plus_k(5, n).map_err(err)?, &scheme, eps, &probes)?;
    let plain = max_probe_error(&FrameSpec::legendre(n).map_err(err)?, &scheme, eps, &probes)?;
    check(
        enriched <= 1e-6 && enriched <= 1e-3 * plain,
        format!("ONB+K error {enriched:.2e} (<= 1e-6), polynomial error {plain:.2e}, ratio {:.2e} (<= 1e-3)", enriched / plain),
    )
}

fn oversampling_plateau() -> Outcome {
    let frame = FrameSpec::onb_plus_k(5, 40).map_err(err)?;
    let probes = [0.2, 0.5, 0.9, 1.0];
    let e = |m| max_probe_error(&frame, &LEGENDRE_PTS.build(m).map_err(err)?, 2e-13, &probes);
    let (e40, e120, e240) = (e(40)?, e(120)?, e(240)?);
    let drop = e120 <= 0.01 * e40;
    let change = (e240 / e120).max(e120 / e240);
    check(
        drop && change < 10.0,
        format!("err(40) = {e40:.2e}, err(120) = {e120:.2e} (needs <= {:.2e}), err(240) = {e240:.2e} (change x{change:.2})", 0.01 * e40),
    )
}

fn constants_contrast() -> Outcome {
    let frame = FrameSpec::onb_plus_k(5, 60).map_err(err)?;
    let leg = &constants_sweep(&frame, &LEGENDRE_PTS, &[2.0], &[60], &[1e-5]).map_err(err)?[0];
    let equi = &constants_sweep(&frame, &EQUISPACED_PTS, &[2.0], &[60], &[1e-5]).map_err(err)?[0];
    let equi_max = equi.kappa.max(equi.lambda);
    check(
        leg.kappa <= 100.0 && leg.lambda <= 100.0 && equi_max >= 1e3,
        format!(
            "legendre kappa = {:.3e}, lambda = {:.3e} (<= 100); equispaced max = {equi_max:.3e} (>= 1e3)",
            leg.kappa, leg.lambda
        ),
    )
}

struct SmallCase {
    label: &'static str,
    frame: FrameSpec,
    scheme: SamplingScheme,
}

fn small_cases() -> Result<Vec<SmallCase>, String> {
    let k5 = |n| FrameSpec::onb_plus_k(5, n).map_err(err);
    Ok(vec![
        SmallCase { label: "ONB+5 N=8 legendre M=16", frame: k5(8)?, scheme: LEGENDRE_PTS.build(16).map_err(err)? },
        SmallCase { label: "ONB+5 N=12 legendre M=24", frame: k5(12)?, scheme: LEGENDRE_PTS.build(24).map_err(err)? },
        SmallCase { label: "ONB+5 N=12 chebyshev M=12", frame: k5(12)?, scheme: CHEBYSHEV_PTS.build(12).map_err(err)? },
        SmallCase { label: "ONB+5 N=12 equispaced M=24", frame: k5(12)?, scheme: EQUISPACED_PTS.build(24).map_err(err)? },
        SmallCase {
            label: "ONB+1 N=12 inner M=24",
            frame: FrameSpec::onb_plus_one(12).map_err(err)?,
            scheme: SamplingScheme::inner_products(24).map_err(err)?,
        },
        SmallCase {
            label: "ONB N=10 inner M=20",
            frame: FrameSpec::legendre(10).map_err(err)?,
            scheme: SamplingScheme::inner_products(20).map_err(err)?,
        },
    ])
}

/// Samples `T_N c` through the scheme, i.e. without touching `G_{M,N}`.
fn sample_synthesis(case: &SmallCase, c: &[f64]) -> Result<DVector<f64>, String> {
    let f = CoefficientVector::new(case.frame.clone(), c.to_vec()).map_err(err)?;
    Ok(case.scheme.sample(&f).map_err(err)?.values().clone())
}

fn projection_structure() -> Outcome {
    let mut worst_orth: f64 = 0.0;
    let mut worst_res: f64 = 0.0;
    let eps = 1e-5;
    for case in small_cases()? {
        let sys = build_system(&case.frame, &case.scheme).map_err(err)?;
        let svd = sys.svd();
        let n = case.frame.len();
        let sig = svd.singular_values();
        let scale = sig[0] * sig[0];
        let xi: Vec<DVector<f64>> = (0..n)
            .map(|j| sample_synthesis(&case, svd.v().column(j).as_slice()))
            .collect::<Result<_, _>>()?;
        for a in 0..n {
            for b in 0..n {
                let target = if a == b { sig[a] * sig[b] } else { 0.0 };
                worst_orth = worst_orth.max((xi[a].dot(&xi[b]) - target).abs() / scale);
            }
        }
        let y = case.scheme.sample(&TargetFunction).map_err(err)?;
        let sol = truncated_svd_solve(&sys, &y, eps).map_err(err)?;
        let fitted = sample_synthesis(&case, sol.coefficients().as_slice())?;
        let r = y.values() - fitted;
        for j in 0..sol.kept() {
            worst_res = worst_res.max(xi[j].dot(&r).abs() / (sig[j] * y.norm()));
        }
    }
    check(
        worst_orth <= 1e-9 && worst_res <= 1e-9,
        format!("max |<xi_m,xi_n>_M - s_m s_n d_mn| / s_max^2 = {worst_orth:.2e}, max |<xi_n,r>_M| / (s_n |y|) = {worst_res:.2e} (tol 1e-9)"),
    )
}

/// Weighted evaluation matrix on an independent rule: `‖E c‖ = ‖T_N c‖`.
fn evaluation_matrix(frame: &FrameSpec, rule: &QuadratureRule) -> Result<DMatrix<f64>, String> {
    let mut e = DMatrix::zeros(rule.len(), frame.len());
    for (q, (x, w)) in rule.iter().enumerate() {
        for j in 0..frame.len() {
            e[(q, j)] = w.sqrt() * frame.element(j, x).map_err(err)?;
        }
    }
    Ok(e)
}

fn top_singular_value(a: &DMatrix<f64>) -> f64 {
    let gram = a.transpose() * a;
    gram.symmetric_eigen().eigenvalues.iter().copied().fold(0.0, f64::max).max(0.0).sqrt()
}

fn rel_diff(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn oracle_equivalence() -> Outcome {
    let rule = hp_log_quadrature(50, 30);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    let mut lines = Vec::new();
    for case in small_cases()? {
        let sys = build_system(&case.frame, &case.scheme).map_err(err)?;
        let factor = build_gram_factor(&case.frame, &default_gram_rule(&case.frame)).map_err(err)?;
        let e = evaluation_matrix(&case.frame, &rule)?;
        let (m, n) = (case.scheme.len(), case.frame.len());
        for eps in [1e-3, 1e-5] {
            // κ: apply the solver to every unit data vector.
            let mut x = DMatrix::zeros(n, m);
            for i in 0..m {
                let sol = truncated_svd_solve(&sys, &DataVector::new(DVector::from_fn(m, |r, _| (r == i) as u8 as f64)), eps)
                    .map_err(err)?;
                x.set_column(i, sol.coefficients());
            }
            let kappa_oracle = top_singular_value(&(&e * x));
            // λ: z ↦ z − L^ε(samples of T_N z), data taken by actual sampling.
            let mut d = DMatrix::zeros(n, n);
            for j in 0..n {
                let unit: Vec<f64> = (0..n).map(|r| (r == j) as u8 as f64).collect();
                let y = DataVector::new(sample_synthesis(&case, &unit)?);
                let sol = truncated_svd_solve(&sys, &y, eps).map_err(err)?;
                d.set_column(j, &(DVector::from_vec(unit) - sol.coefficients()));
            }
            let lambda_oracle = top_singular_value(&(&e * d)) / eps;
            let kappa = compute_kappa(&sys, &factor, eps);
            let lambda = compute_lambda(&sys, &factor, eps);
            let dk = rel_diff(kappa, kappa_oracle);
            // With nothing discarded the oracle returns round-off; compare absolutely.
            let dl = if lambda == 0.0 { lambda_oracle * eps } else { rel_diff(lambda, lambda_oracle) };
            worst = worst.max(dk).max(dl);
            cases += 1;
            if dk > 1e-6 || dl > 1e-6 {
                lines.push(format!(
                    "{} eps={eps:e}: kappa {kappa:e} vs {kappa_oracle:e}, lambda {lambda:e} vs {lambda_oracle:e}",
                    case.label
                ));
            }
        }
    }
    check(worst <= 1e-6, format!("{cases} instances, max relative deviation {worst:.2e} (tol 1e-6) {lines:?}"))
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("1 analytic log moments", Duration::from_secs(1), analytic_log_moments),
        ("2 kappa/lambda bound suite", Duration::from_secs(120), bound_suite),
        ("3 error-bound inequality", Duration::from_secs(120), || random_bounds(false)),
        ("4 coefficient-bound inequality", Duration::from_secs(120), || random_bounds(true)),
        ("5 ONB+1 stable sampling rate", Duration::from_secs(60), onb_plus_one_ssr),
        ("6 enriched vs polynomial accuracy", Duration::from_secs(60), fig_b),
        ("7 oversampling plateau", Duration::from_secs(60), oversampling_plateau),
        ("8 constants contrast", Duration::from_secs(180), constants_contrast),
        ("9 projection structure", Duration::from_secs(120), projection_structure),
        ("10 kappa/lambda oracle", Duration::from_secs(120), oracle_equivalence),
    ];
    let mut failed = 0;
    for (name, limit, f) in criteria {
        match timed(limit, f) {
            Ok(msg) => println!("PASS criterion {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name}: {msg}");
            }
        }
    }
    println!("acceptance: {failed} of 10 criteria failed");
    if failed > 0 {
        std::process::exit(1);
    }
}
