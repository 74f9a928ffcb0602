//! The `bounds` subcommand: analytical values for a set of arm means.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use slice_broker::analysis::{
    egreedy_suboptimal_prob, expected_pulls_bound, regret_lower_bound, EgreedyBound, RewardModel,
};
use slice_broker::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsArgs {
    pub means: RewardModel,
    pub k: usize,
    pub b: f64,
    pub d: f64,
    pub horizon: u32,
    /// Tenant count used by the ε-greedy bound; defaults to the arm count.
    pub tenants: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EgreedySample {
    pub round: f64,
    #[serde(flatten)]
    pub bound: EgreedyBound,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundsReport {
    pub means: Vec<f64>,
    pub k: usize,
    pub horizon: u32,
    pub lower_bound_coefficient: f64,
    /// Coefficient times `ln T`.
    pub lower_bound_at_horizon: f64,
    /// Per-round probability that each arm is in the selected batch.
    pub pull_probability: Vec<f64>,
    /// `T` times the above.
    pub expected_pulls: Vec<f64>,
    pub egreedy: Vec<EgreedySample>,
}

/// Rounds `2, 10, 100, …` up to and including `horizon`.
fn sample_rounds(horizon: u32) -> Vec<f64> {
    let mut out = vec![2.0];
    let mut t = 10.0;
    while t < f64::from(horizon) {
        out.push(t);
        t *= 10.0;
    }
    if f64::from(horizon) > 2.0 {
        out.push(f64::from(horizon));
    }
    out
}

pub fn compute(args: &BoundsArgs) -> Result<BoundsReport> {
    let n = args.means.arm_count();
    if args.k == 0 || args.k > n {
        return Err(Error::InvalidParameter {
            name: "k",
            reason: format!("{} outside 1..={n}", args.k),
        });
    }
    if args.horizon < 2 {
        return Err(Error::InvalidParameter {
            name: "horizon",
            reason: "must be at least 2".into(),
        });
    }
    let coeff = regret_lower_bound(&args.means, args.k)?;
    let pull_probability = (0..n)
        .map(|i| expected_pulls_bound(args.means.means(), args.k, i))
        .collect::<Result<Vec<_>>>()?;
    let tenants = args.tenants.unwrap_or(n);
    let egreedy = sample_rounds(args.horizon)
        .into_iter()
        .map(|round| {
            Ok(EgreedySample {
                round,
                bound: egreedy_suboptimal_prob(args.b, args.d, tenants, round)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let t = f64::from(args.horizon);
    Ok(BoundsReport {
        means: args.means.means().to_vec(),
        k: args.k,
        horizon: args.horizon,
        lower_bound_coefficient: coeff,
        lower_bound_at_horizon: coeff * t.ln(),
        expected_pulls: pull_probability.iter().map(|p| p * t).collect(),
        pull_probability,
        egreedy,
    })
}

pub fn print(out: &mut dyn Write, r: &BoundsReport) -> std::io::Result<()> {
    writeln!(out, "arms={} K={} T={}", r.means.len(), r.k, r.horizon)?;
    writeln!(
        out,
        "regret lower bound: {:.6} · ln T = {:.4}",
        r.lower_bound_coefficient, r.lower_bound_at_horizon
    )?;
    writeln!(
        out,
        "{:<6} {:>10} {:>14} {:>14}",
        "arm", "mean", "P(selected)", "E[pulls]"
    )?;
    for (i, m) in r.means.iter().enumerate() {
        writeln!(
            out,
            "{i:<6} {m:>10.4} {:>14.8} {:>14.2}",
            r.pull_probability[i], r.expected_pulls[i]
        )?;
    }
    writeln!(
        out,
        "{:<12} {:>14} {:>10} {:>10}",
        "round", "egreedy raw", "clamped", "ratio"
    )?;
    for s in &r.egreedy {
        writeln!(
            out,
            "{:<12} {:>14.6e} {:>10.6} {:>10.4e}{}",
            s.round,
            s.bound.raw,
            s.bound.clamped,
            s.bound.ratio,
            if s.bound.is_vacuous() {
                "  vacuous"
            } else {
                ""
            }
        )?;
    }
    Ok(())
}

/// Stores the report under `"bounds"` in the JSON object at `path`,
/// creating the file when it does not exist.
pub fn append_to_summary(path: &Path, r: &BoundsReport) -> Result<()> {
    let mut doc = match std::fs::read_to_string(path) {
        Ok(text) => serde_json::from_str::<serde_json::Value>(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => serde_json::json!({}),
        Err(e) => return Err(e.into()),
    };
    let obj = doc
        .as_object_mut()
        .ok_or_else(|| Error::Config(format!("{} does not hold a JSON object", path.display())))?;
    obj.insert(
        "bounds".into(),
        serde_json::to_value(r).map_err(|e| Error::Io(e.to_string()))?,
    );
    slice_broker::harness::write_json(path, &doc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(means: &str, k: usize) -> BoundsArgs {
        BoundsArgs {
            means: RewardModel::parse(means).unwrap(),
            k,
            b: 10.0,
            d: 0.01,
            horizon: 10_000,
            tenants: None,
        }
    }

    #[test]
    fn single_arm_is_always_selected() {
        let r = compute(&args("0.7", 1)).unwrap();
        assert_eq!(r.pull_probability, vec![1.0]);
        assert_eq!(r.expected_pulls, vec![10_000.0]);
        assert_eq!(r.lower_bound_coefficient, 0.0);
    }

    #[test]
    fn two_equal_arms_split_evenly() {
        let r = compute(&args("0.4,0.4", 1)).unwrap();
        for p in r.pull_probability {
            assert!((p - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn too_many_arms_refused() {
        let sixteen = vec!["0.5"; 16].join(",");
        let e = compute(&args(&sixteen, 2)).unwrap_err();
        assert!(matches!(e, Error::InstanceTooLarge(_)), "{e}");
    }

    #[test]
    fn sample_rounds_are_log_spaced() {
        assert_eq!(
            sample_rounds(10_000),
            vec![2.0, 10.0, 100.0, 1000.0, 10_000.0]
        );
        assert_eq!(sample_rounds(2), vec![2.0]);
        assert_eq!(sample_rounds(50), vec![2.0, 10.0, 50.0]);
    }

    #[test]
    fn summary_gains_a_bounds_key() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("summary.json");
        std::fs::write(&path, r#"{"preset": "fig3"}"#).unwrap();
        append_to_summary(&path, &compute(&args("0.6,0.3,0.1", 2)).unwrap()).unwrap();
        let v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(v["preset"], "fig3");
        assert_eq!(v["bounds"]["k"], 2);
        assert_eq!(v["bounds"]["pull_probability"].as_array().unwrap().len(), 3);
    }
}
