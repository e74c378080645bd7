use crate::diagnostics::{oversampled_count, SsrCriterion};
use crate::frames::{FrameSpec, Weight};
use crate::sampling::{NodeKind, SchemeFamily, Weighting};

use super::{CliError, CriterionArg, ExperimentArgs, FrameArg, NodesArg, WeightingArg};

pub const DEFAULT_EPSILON: f64 = 2e-13;
pub const DEFAULT_PROBES: [f64; 4] = [0.2, 0.5, 0.9, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    PointwiseError,
    Oversampling,
    Constants,
    Ssr,
    SingleApprox,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::PointwiseError => "pointwise_error",
            Experiment::Oversampling => "oversampling",
            Experiment::Constants => "constants",
            Experiment::Ssr => "ssr",
            Experiment::SingleApprox => "single_approx",
        }
    }
}

/// How many samples to take for a frame of size `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MRule {
    /// `M = ⌈γN⌉`.
    Factor(f64),
    Fixed(usize),
}

impl MRule {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let s = s.trim();
        let bad = || CliError::Config(format!("bad M rule {s:?}; expected e.g. 2N, 1.5N, N or 120"));
        if let Some(g) = s.strip_suffix('N') {
            let g = g.trim().trim_end_matches('*');
            let gamma = if g.is_empty() { 1.0 } else { g.parse::<f64>().map_err(|_| bad())? };
            if !(gamma >= 1.0) || !gamma.is_finite() {
                return Err(CliError::Config(format!("M rule factor must be >= 1, got {gamma}")));
            }
            Ok(MRule::Factor(gamma))
        } else {
            s.parse::<usize>().map(MRule::Fixed).map_err(|_| bad())
        }
    }

    pub fn samples(&self, n: usize) -> usize {
        match *self {
            MRule::Factor(g) => oversampled_count(g, n),
            MRule::Fixed(m) => m,
        }
    }
}

/// `a:s:b` (inclusive) or `a,b,c`.
pub fn parse_index_range(s: &str) -> Result<Vec<usize>, CliError> {
    let bad = |what: &str| CliError::Config(format!("bad index list {s:?}: {what}"));
    let s = s.trim();
    let out: Vec<usize> = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let nums = parts.iter().map(|p| p.parse::<usize>()).collect::<Result<Vec<_>, _>>().map_err(|_| bad("not integers"))?;
        let (a, step, b) = match nums[..] {
            [a, b] => (a, 1, b),
            [a, s, b] => (a, s, b),
            _ => return Err(bad("expected a:b or a:s:b")),
        };
        if step == 0 {
            return Err(bad("zero step"));
        }
        (a..=b).step_by(step).collect()
    } else {
        s.split(',').map(|p| p.trim().parse::<usize>()).collect::<Result<_, _>>().map_err(|_| bad("not integers"))?
    };
    if out.is_empty() {
        return Err(bad("empty"));
    }
    Ok(out)
}

pub fn parse_float_list(s: &str) -> Result<Vec<f64>, CliError> {
    let out = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| CliError::Config(format!("bad number list {s:?}")))?;
    if out.is_empty() || out.iter().any(|v| !v.is_finite()) {
        return Err(CliError::Config(format!("bad number list {s:?}")));
    }
    Ok(out)
}

/// A validated experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub frame: FrameArg,
    pub k: usize,
    pub normalize_psi: bool,
    pub family: SchemeFamily,
    pub m_rule: MRule,
    pub ns: Vec<usize>,
    /// Explicit sample counts (`oversampling` only).
    pub ms: Option<Vec<usize>>,
    pub epsilons: Vec<f64>,
    pub gammas: Vec<f64>,
    pub theta: f64,
    pub criterion: Option<SsrCriterion>,
    pub stride: Option<usize>,
    pub m_max: Option<usize>,
    pub probes: Vec<f64>,
    pub out: String,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn from_args(experiment: Experiment, a: &ExperimentArgs) -> Result<Self, CliError> {
        use Experiment::*;
        let nodes = a.nodes.unwrap_or(match experiment {
            PointwiseError | SingleApprox => NodesArg::Chebyshev,
            Oversampling | Constants => NodesArg::Legendre,
            Ssr => NodesArg::Inner,
        });
        let frame = a.frame.unwrap_or(if experiment == Ssr { FrameArg::Onb1 } else { FrameArg::Onbk });
        let family = match nodes {
            NodesArg::Inner => SchemeFamily::InnerProducts,
            n => {
                let kind = match n {
                    NodesArg::Chebyshev => NodeKind::Chebyshev,
                    NodesArg::Legendre => NodeKind::GaussLegendre,
                    _ => NodeKind::Equispaced,
                };
                let weighting = match a.weighting.unwrap_or(WeightingArg::Auto) {
                    WeightingArg::Unweighted => Weighting::Unweighted,
                    WeightingArg::Quadrature => Weighting::Quadrature,
                    WeightingArg::Auto if kind == NodeKind::Chebyshev => Weighting::Unweighted,
                    WeightingArg::Auto => Weighting::Quadrature,
                };
                SchemeFamily::Points { kind, weighting }
            }
        };
        let default_ns = match experiment {
            PointwiseError => "5:5:60",
            Oversampling | SingleApprox => "40",
            Constants => "10:10:80",
            Ssr => "5,10,20,40",
        };
        let default_eps = match experiment {
            Constants => "1e-5",
            Ssr => "1e-8",
            _ => "2e-13",
        };
        let cfg = Self {
            experiment,
            frame,
            k: a.k.unwrap_or(5),
            normalize_psi: a.normalize_psi.unwrap_or(false),
            family,
            m_rule: MRule::parse(a.m_rule.as_deref().unwrap_or("2N"))?,
            ns: parse_index_range(a.n.as_deref().unwrap_or(default_ns))?,
            ms: a.m.as_deref().map(parse_index_range).transpose()?,
            epsilons: parse_float_list(a.eps.as_deref().unwrap_or(default_eps))?,
            gammas: parse_float_list(a.gammas.as_deref().unwrap_or("1,1.5,2,3"))?,
            theta: a.theta.unwrap_or(2.0),
            criterion: match a.criterion.unwrap_or(CriterionArg::Auto) {
                CriterionArg::Auto => None,
                CriterionArg::FrameConstant => Some(SsrCriterion::FrameConstant),
                CriterionArg::DataRichness => Some(SsrCriterion::DataRichness),
            },
            stride: a.stride,
            m_max: a.m_max,
            probes: match a.probes.as_deref() {
                Some(p) => parse_float_list(p)?,
                None => DEFAULT_PROBES.to_vec(),
            },
            out: a.out.clone().unwrap_or_else(|| format!("{}.csv", experiment.name())),
            seed: a.seed.unwrap_or(0),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if let Some(e) = self.epsilons.iter().find(|&&e| !(e > 0.0)) {
            return bad(format!("eps must be positive, got {e}"));
        }
        if let Some(g) = self.gammas.iter().find(|&&g| !(g >= 1.0)) {
            return bad(format!("gammas must be >= 1, got {g}"));
        }
        if let Some(p) = self.probes.iter().find(|&&p| !(p > 0.0 && p <= 1.0)) {
            return bad(format!("probes must lie in (0, 1], got {p}"));
        }
        if !(self.theta > 1.0) {
            return bad(format!("theta must exceed 1, got {}", self.theta));
        }
        if self.stride == Some(0) {
            return bad("stride must be positive".into());
        }
        for &n in &self.ns {
            self.frame_for(n).map_err(|e| CliError::Config(format!("N = {n}: {e}")))?;
            if self.experiment != Experiment::Oversampling {
                let m = self.m_rule.samples(n);
                if m < n && matches!(self.experiment, Experiment::PointwiseError | Experiment::SingleApprox) {
                    return bad(format!("M = {m} is below N = {n}"));
                }
            }
        }
        if let Some(ms) = &self.ms {
            let n_max = self.ns.iter().copied().max().unwrap_or(0);
            if let Some(m) = ms.iter().find(|&&m| m < n_max) {
                return bad(format!("M = {m} is below N = {n_max}"));
            }
        }
        Ok(())
    }

    /// The configured frame with `n` elements in total.
    pub fn frame_for(&self, n: usize) -> crate::Result<FrameSpec> {
        match self.frame {
            FrameArg::Onb => FrameSpec::legendre(n),
            FrameArg::Onb1 => FrameSpec::onb_plus_one(n),
            FrameArg::Onbk if self.k == 0 => FrameSpec::legendre(n),
            FrameArg::Onbk => FrameSpec::with_weight(self.k, n, Weight::Log, self.normalize_psi),
        }
    }

    /// Sample counts used for frame size `n`.
    pub fn sample_counts(&self, n: usize) -> Vec<usize> {
        match &self.ms {
            Some(ms) => ms.clone(),
            None if self.experiment == Experiment::Oversampling => (n..=10 * n).step_by((n / 4).max(1)).collect(),
            None => vec![self.m_rule.samples(n)],
        }
    }
}
