//! Data files and the console summary of an experiment.
//!
//! Files written into a variant directory:
//!
//! | file                   | columns                                            |
//! |------------------------|----------------------------------------------------|
//! | `summary.csv`          | policy, reward_mean, reward_ci95, mean_reward, utilization, violation_rate, multiplexing_gain |
//! | `selection_ratio.csv`  | tenant, one column per policy, `onets_predicted` when ONETS ran |
//! | `reward_cdf.csv`       | policy, reward, cdf                                |
//! | `utilization_cdf.csv`  | policy, utilization, cdf                           |
//! | `gain_series.csv`      | round, one column per policy                       |
//! | `traces/*.csv`         | one per (policy, run), see the core crate          |
//!
//! None of the CSV files carry timings, so reruns with the same arguments
//! produce identical bytes.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use slice_broker::analysis::predicted_selections;
use slice_broker::harness::{ExperimentResult, PolicyResult};
use slice_broker::policies::{ucb_index, PolicyKind};
use slice_broker::{Error, Result};

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(csv_err)
}

/// Expected ONETS selection ratio per tenant: the pull-probability bound at
/// the run-averaged final indices `θ̄ + sqrt(2 ln T / W)`, weighted by the
/// observed mix of batch sizes.
pub fn predicted_ratio(result: &PolicyResult, horizon: u32) -> Result<Vec<f64>> {
    let runs = &result.runs;
    let n = result.selection_ratio.len();
    if runs.is_empty() || horizon == 0 {
        return Ok(vec![0.0; n]);
    }
    let t = f64::from(horizon);
    let mut idx = vec![0.0; n];
    let mut batches: Vec<u64> = Vec::new();
    for r in runs {
        for (i, acc) in idx.iter_mut().enumerate() {
            let v = match r.final_pulls[i] {
                0 => r.final_means[i],
                w => ucb_index(r.final_means[i], w, t)?,
            };
            *acc += v / runs.len() as f64;
        }
        if batches.len() < r.batch_sizes.len() {
            batches.resize(r.batch_sizes.len(), 0);
        }
        for (b, x) in batches.iter_mut().zip(&r.batch_sizes) {
            *b += x;
        }
    }
    let floor = f64::MIN_POSITIVE;
    let idx: Vec<f64> = idx.iter().map(|v| v.max(floor)).collect();
    let total = t * runs.len() as f64;
    (0..n)
        .map(|i| Ok(predicted_selections(&idx, &batches, i)? / total))
        .collect()
}

/// Writes every aggregate file of one experiment into `dir`.
pub fn write_variant_files(dir: &Path, result: &ExperimentResult) -> Result<()> {
    fs::create_dir_all(dir)?;

    let mut w = writer(&dir.join("summary.csv"))?;
    w.write_record([
        "policy",
        "reward_mean",
        "reward_ci95",
        "mean_reward",
        "utilization",
        "violation_rate",
        "multiplexing_gain",
    ])
    .map_err(csv_err)?;
    for p in &result.policies {
        w.write_record(summary_fields(p)).map_err(csv_err)?;
    }
    w.flush()?;

    let mut w = writer(&dir.join("selection_ratio.csv"))?;
    let mut header = vec!["tenant".to_string()];
    header.extend(result.policies.iter().map(|p| p.policy.to_string()));
    let prediction = match result.policy(PolicyKind::Onets) {
        Some(p) => {
            header.push("onets_predicted".into());
            Some(predicted_ratio(p, result.horizon)?)
        }
        None => None,
    };
    w.write_record(&header).map_err(csv_err)?;
    for i in 0..result.tenants {
        let mut row = vec![i.to_string()];
        row.extend(
            result
                .policies
                .iter()
                .map(|p| p.selection_ratio[i].to_string()),
        );
        if let Some(pred) = &prediction {
            row.push(pred[i].to_string());
        }
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;

    for (file, column, pick) in [
        (
            "reward_cdf.csv",
            "reward",
            cdf_rewards as fn(&PolicyResult) -> &[(f64, f64)],
        ),
        ("utilization_cdf.csv", "utilization", cdf_utilization),
    ] {
        let mut w = writer(&dir.join(file))?;
        w.write_record(["policy", column, "cdf"]).map_err(csv_err)?;
        for p in &result.policies {
            for (x, f) in pick(p) {
                w.write_record([p.policy.to_string(), x.to_string(), f.to_string()])
                    .map_err(csv_err)?;
            }
        }
        w.flush()?;
    }

    let mut w = writer(&dir.join("gain_series.csv"))?;
    let mut header = vec!["round".to_string()];
    header.extend(result.policies.iter().map(|p| p.policy.to_string()));
    w.write_record(&header).map_err(csv_err)?;
    for t in 0..result.horizon as usize {
        let mut row = vec![(t + 1).to_string()];
        row.extend(result.policies.iter().map(|p| p.gain_series[t].to_string()));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn cdf_rewards(p: &PolicyResult) -> &[(f64, f64)] {
    &p.reward_cdf
}

fn cdf_utilization(p: &PolicyResult) -> &[(f64, f64)] {
    &p.utilization_cdf
}

fn summary_fields(p: &PolicyResult) -> [String; 7] {
    [
        p.policy.to_string(),
        p.reward.mean.to_string(),
        p.reward.ci95.to_string(),
        p.mean_reward.mean.to_string(),
        p.utilization.mean.to_string(),
        p.violation_rate.mean.to_string(),
        p.multiplexing_gain.mean.to_string(),
    ]
}

/// Writes one row per sweep point and policy.
pub fn write_sweep_csv(path: &Path, rows: &[(String, &ExperimentResult)]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record([
        "variant",
        "tenants",
        "alpha",
        "policy",
        "reward_mean",
        "reward_ci95",
        "mean_reward",
        "utilization",
        "violation_rate",
        "multiplexing_gain",
    ])
    .map_err(csv_err)?;
    for (label, res) in rows {
        for p in &res.policies {
            let mut row = vec![
                label.clone(),
                res.tenants.to_string(),
                res.alpha.to_string(),
            ];
            row.extend(summary_fields(p));
            w.write_record(&row).map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Console table echoing mean reward, utilization, violations, gain and
/// decision time per round.
pub fn print_table(
    out: &mut dyn Write,
    title: &str,
    result: &ExperimentResult,
) -> std::io::Result<()> {
    writeln!(
        out,
        "{title}{}tenants={} C={} T={} alpha={} seeds={}",
        if title.is_empty() { "" } else { ": " },
        result.tenants,
        result.capacity,
        result.horizon,
        result.alpha,
        result.seeds
    )?;
    writeln!(
        out,
        "{:<8} {:>22} {:>11} {:>10} {:>10} {:>12}",
        "policy", "cumulative reward", "utilization", "violation", "mux gain", "s/round"
    )?;
    for p in &result.policies {
        writeln!(
            out,
            "{:<8} {:>12.2} ± {:>7.2} {:>11.4} {:>10.5} {:>10.4} {:>12.3e}",
            p.policy.to_string(),
            p.reward.mean,
            p.reward.ci95,
            p.utilization.mean,
            p.violation_rate.mean,
            p.multiplexing_gain.mean,
            p.select_seconds_per_round.mean
        )?;
    }
    Ok(())
}

/// JSON summary of a `run` invocation.
#[derive(Debug, Serialize)]
pub struct RunReport<'a> {
    pub preset: Option<&'a str>,
    pub master_seed: u64,
    pub seeds: usize,
    pub variants: Vec<VariantReport<'a>>,
}

#[derive(Debug, Serialize)]
pub struct VariantReport<'a> {
    pub label: &'a str,
    pub result: &'a ExperimentResult,
}
