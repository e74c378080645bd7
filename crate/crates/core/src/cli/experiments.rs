use std::io::Write;

use rayon::prelude::*;

use crate::diagnostics::{constants_sweep, stable_sampling_rate, SsrCriterion, SsrOptions, SsrOutcome};
use crate::frames::{RealFunction, TargetFunction};
use crate::solver::{approximate, error_report};

use super::config::{Experiment, ExperimentConfig};
use super::CliError;

/// Fixed-width scientific notation with 17 significant digits.
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn write(&self, out: &mut dyn Write) -> Result<(), CliError> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs one experiment and writes its CSV to `cfg.out` (`-` means `stdout`).
pub fn run(cfg: &ExperimentConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let table = match cfg.experiment {
        Experiment::PointwiseError | Experiment::Oversampling => error_table(cfg)?,
        Experiment::Constants => constants_table(cfg)?,
        Experiment::Ssr => ssr_table(cfg)?,
        Experiment::SingleApprox => single_table(cfg)?,
    };
    if cfg.out == "-" {
        table.write(stdout)
    } else {
        let mut buf = Vec::new();
        table.write(&mut buf)?;
        std::fs::write(&cfg.out, buf)?;
        Ok(())
    }
}

fn error_table(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    let cells: Vec<(usize, usize, f64)> = cfg
        .ns
        .iter()
        .flat_map(|&n| {
            let ms = cfg.sample_counts(n);
            ms.into_iter().flat_map(move |m| cfg.epsilons.iter().map(move |&e| (n, m, e)))
        })
        .collect();
    let blocks: Vec<Vec<Vec<String>>> = cells
        .par_iter()
        .map(|&(n, m, eps)| {
            let frame = cfg.frame_for(n)?;
            let scheme = cfg.family.build(m)?;
            let approx = approximate(&TargetFunction, &frame, &scheme, eps)?;
            let report = error_report(&approx, &TargetFunction, &cfg.probes)?;
            Ok(report
                .pointwise
                .iter()
                .map(|&(x, err)| {
                    vec![
                        n.to_string(),
                        m.to_string(),
                        fmt_f64(eps),
                        fmt_f64(x),
                        fmt_f64(err),
                        fmt_f64(report.coefficient_norm),
                    ]
                })
                .collect())
        })
        .collect::<crate::Result<_>>()?;
    Ok(Table {
        header: vec!["N", "M", "eps", "probe", "error", "coeff_norm"],
        rows: blocks.into_iter().flatten().collect(),
    })
}

fn constants_table(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    let template = cfg.frame_for(cfg.ns[0])?;
    let rows = constants_sweep(&template, &cfg.family, &cfg.gammas, &cfg.ns, &cfg.epsilons)?;
    Ok(Table {
        header: vec!["gamma", "N", "eps", "M", "kappa", "lambda", "kept_rank", "a_prime"],
        rows: rows
            .into_iter()
            .map(|r| {
                vec![
                    fmt_f64(r.gamma),
                    r.n.to_string(),
                    fmt_f64(r.epsilon),
                    r.m.to_string(),
                    fmt_f64(r.kappa),
                    fmt_f64(r.lambda),
                    r.kept_rank.to_string(),
                    fmt_f64(r.a_prime_mn),
                ]
            })
            .collect(),
    })
}

fn ssr_table(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    let criterion = cfg.criterion.unwrap_or(SsrCriterion::default_for(&cfg.family));
    let opts = SsrOptions { criterion, stride: cfg.stride, m_max: cfg.m_max };
    let cells: Vec<(usize, f64)> =
        cfg.ns.iter().flat_map(|&n| cfg.epsilons.iter().map(move |&e| (n, e))).collect();
    let rows = cells
        .par_iter()
        .map(|&(n, eps)| {
            let frame = cfg.frame_for(n)?;
            let outcome = stable_sampling_rate(&frame, &cfg.family, cfg.theta, eps, opts)?;
            let (m, found) = match outcome {
                SsrOutcome::Found(m) => (m, true),
                SsrOutcome::NotFound { m_max } => (m_max, false),
            };
            Ok(vec![
                n.to_string(),
                fmt_f64(cfg.theta),
                fmt_f64(eps),
                match criterion {
                    SsrCriterion::FrameConstant => "frame_constant".into(),
                    SsrCriterion::DataRichness => "data_richness".into(),
                },
                m.to_string(),
                found.to_string(),
            ])
        })
        .collect::<crate::Result<_>>()?;
    Ok(Table { header: vec!["N", "theta", "eps", "criterion", "M", "found"], rows })
}

fn single_table(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    let n = cfg.ns[0];
    let m = cfg.sample_counts(n)[0];
    let eps = cfg.epsilons[0];
    let frame = cfg.frame_for(n)?;
    let approx = approximate(&TargetFunction, &frame, &cfg.family.build(m)?, eps)?;
    let rows = cfg
        .probes
        .iter()
        .map(|&x| {
            let f = TargetFunction.eval(x)?;
            let p = approx.eval(x)?;
            Ok(vec![
                n.to_string(),
                m.to_string(),
                fmt_f64(eps),
                fmt_f64(x),
                fmt_f64(f),
                fmt_f64(p),
                fmt_f64((f - p).abs()),
                approx.solution().kept().to_string(),
            ])
        })
        .collect::<crate::Result<_>>()?;
    Ok(Table { header: vec!["N", "M", "eps", "x", "target", "approximant", "error", "kept_rank"], rows })
}
