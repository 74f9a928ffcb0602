use serde::Serialize;

use crate::error::{Error, Result};

/// Reward distribution family of every arm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RewardFamily {
    /// Negative exponential parameterized by its mean.
    #[default]
    Exponential,
}

/// True arm means `θ_i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RewardModel {
    means: Vec<f64>,
    family: RewardFamily,
}

impl RewardModel {
    pub fn new(means: Vec<f64>) -> Result<Self> {
        if means.is_empty() {
            return Err(Error::param("means", "at least one arm required"));
        }
        if let Some(m) = means.iter().find(|m| !(m.is_finite() && **m > 0.0)) {
            return Err(Error::param(
                "means",
                format!("{m} is not a positive finite mean"),
            ));
        }
        Ok(Self {
            means,
            family: RewardFamily::Exponential,
        })
    }

    /// Parses a comma-separated list of means, e.g. `"1.0, 0.8,0.3"`.
    pub fn parse(text: &str) -> Result<Self> {
        let means = text
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|e| Error::param("means", format!("`{s}`: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(means)
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn family(&self) -> RewardFamily {
        self.family
    }

    pub fn arm_count(&self) -> usize {
        self.means.len()
    }

    /// Means sorted in decreasing order.
    pub fn sorted_desc(&self) -> Vec<f64> {
        let mut m = self.means.clone();
        m.sort_by(|a, b| b.total_cmp(a));
        m
    }

    /// Summed mean of the `batch` best arms.
    pub fn top_sum(&self, batch: usize) -> f64 {
        self.sorted_desc().iter().take(batch).sum()
    }
}

/// Cumulative regret after every round.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegretSeries {
    /// `cumulative[t - 1]` is the regret after round `t`.
    pub cumulative: Vec<f64>,
    pub pulls: Vec<u64>,
}

impl RegretSeries {
    /// Regret after `round` rounds (1-based).
    pub fn at(&self, round: usize) -> f64 {
        self.cumulative[round - 1]
    }

    pub fn total(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }
}

/// Regret against the oracle that always plays the `batch` best arms:
/// `R_t = t·Σ_{top batch} θ − Σ_i θ_i·W_i(t)`, accumulated round by round.
pub fn compute_regret<'a, I>(rounds: I, model: &RewardModel, batch: usize) -> Result<RegretSeries>
where
    I: IntoIterator<Item = &'a [usize]>,
{
    let n = model.arm_count();
    if batch == 0 || batch > n {
        return Err(Error::param("batch", format!("{batch} outside 1..={n}")));
    }
    let best = model.top_sum(batch);
    let mut pulls = vec![0u64; n];
    let mut cumulative = Vec::new();
    let mut acc = 0.0;
    for granted in rounds {
        let mut got = 0.0;
        for &i in granted {
            if i >= n {
                return Err(Error::param("rounds", format!("arm {i} outside the model")));
            }
            pulls[i] += 1;
            got += model.means[i];
        }
        acc += best - got;
        cumulative.push(acc);
    }
    Ok(RegretSeries { cumulative, pulls })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worst_arm_every_round() {
        let m = RewardModel::new(vec![0.9, 0.1]).unwrap();
        let rounds = vec![vec![1usize]; 100];
        let r = compute_regret(rounds.iter().map(Vec::as_slice), &m, 1).unwrap();
        assert!((r.total() - 80.0).abs() < 1e-9);
        assert!((r.at(50) - 40.0).abs() < 1e-9);
        assert_eq!(r.pulls, vec![0, 100]);
    }

    #[test]
    fn top_arms_and_ties_give_zero() {
        let m = RewardModel::new(vec![0.2, 0.7, 0.5]).unwrap();
        let rounds = vec![vec![1usize, 2]; 10];
        let r = compute_regret(rounds.iter().map(Vec::as_slice), &m, 2).unwrap();
        assert!(r.cumulative.iter().all(|x| x.abs() < 1e-12));

        let eq = RewardModel::new(vec![0.4; 4]).unwrap();
        let rounds = [vec![3usize], vec![0], vec![2]];
        let r = compute_regret(rounds.iter().map(Vec::as_slice), &eq, 1).unwrap();
        assert_eq!(r.total(), 0.0);
    }

    #[test]
    fn parse_and_validation() {
        let m = RewardModel::parse(" 1.0, 0.8 ,0.3,").unwrap();
        assert_eq!(m.means(), &[1.0, 0.8, 0.3]);
        assert_eq!(m.top_sum(2), 1.8);
        assert!(RewardModel::parse("1.0,x").is_err());
        assert!(RewardModel::parse("1.0,-2").is_err());
        assert!(RewardModel::parse("").is_err());
        let r: Vec<Vec<usize>> = vec![];
        assert!(compute_regret(r.iter().map(Vec::as_slice), &m, 4).is_err());
    }
}
