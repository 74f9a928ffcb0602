use super::regret::RewardModel;
use crate::error::{Error, Result};

/// Relative entropy of the exponential law with mean `u` from the one with
/// mean `v`: `ln(v/u) + u/v − 1`.
pub fn kl_exponential(u: f64, v: f64) -> Result<f64> {
    if !(u > 0.0 && u.is_finite()) {
        return Err(Error::param(
            "theta_u",
            format!("{u} is not a positive mean"),
        ));
    }
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::param(
            "theta_v",
            format!("{v} is not a positive mean"),
        ));
    }
    let r = u / v;
    // −ln r + r − 1, written to keep precision when r ≈ 1
    Ok((r - 1.0) - (r - 1.0).ln_1p())
}

/// Coefficient of `ln T` in the regret lower bound for uniformly good
/// policies: `Σ (θ_(K) − θ_i) / H(θ_i, θ_(K))` over the arms strictly worse
/// than the `batch`-th best.
pub fn regret_lower_bound(model: &RewardModel, batch: usize) -> Result<f64> {
    let n = model.arm_count();
    if batch == 0 || batch > n {
        return Err(Error::param("batch", format!("{batch} outside 1..={n}")));
    }
    let kth = model.sorted_desc()[batch - 1];
    model
        .means()
        .iter()
        .filter(|&&m| m < kth)
        .map(|&m| Ok((kth - m) / kl_exponential(m, kth)?))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        assert_eq!(kl_exponential(3.0, 3.0).unwrap(), 0.0);
        assert!((kl_exponential(1.0, 2.0).unwrap() - (2f64.ln() - 0.5)).abs() < 1e-15);
        assert!((kl_exponential(2.0, 1.0).unwrap() - (1.0 - 2f64.ln())).abs() < 1e-15);
        assert!(kl_exponential(0.0, 1.0).is_err());
        assert!(kl_exponential(1.0, -1.0).is_err());
    }

    #[test]
    fn lower_bound_edge_cases() {
        let all = RewardModel::new(vec![0.3, 0.2]).unwrap();
        assert_eq!(regret_lower_bound(&all, 2).unwrap(), 0.0);
        let tied = RewardModel::new(vec![0.5, 0.5, 0.1]).unwrap();
        let one = RewardModel::new(vec![0.5, 0.1]).unwrap();
        assert_eq!(
            regret_lower_bound(&tied, 1).unwrap(),
            regret_lower_bound(&one, 1).unwrap()
        );
        assert!(regret_lower_bound(&one, 0).is_err());
    }
}
