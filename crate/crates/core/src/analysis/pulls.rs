//! Per-round probability that the greedy top-K selector picks a given arm,
//! when each arm's index behaves as an independent exponential variable with
//! mean `θ̂_j`.
//!
//! Arm `i` is picked when at most `K − 1` other arms draw above it:
//!
//! ```text
//! P_i = ∫ f(x, θ̂_i) · P{at most K−1 of the υ_j exceed x} dx
//! ```
//!
//! [`expected_pulls_bound`] expands the integrand by inclusion-exclusion and
//! integrates each term exactly; [`expected_pulls_numeric`] integrates the
//! same expression numerically. Multiplied by `T`, either bounds `E[W_i(T)]`.

use crate::error::{Error, Result};

/// Largest arm count accepted by [`expected_pulls_bound`].
pub const MAX_BOUND_ARMS: usize = 15;

const TARGET_ERROR: f64 = 1e-12;
const MAX_RESIDUAL: f64 = 1e-9;

fn check_args(indices: &[f64], batch: usize, arm: usize, max_arms: usize) -> Result<()> {
    let n = indices.len();
    if n == 0 || n > max_arms {
        return Err(Error::InstanceTooLarge(format!(
            "{n} arms; the pull-probability bound supports 1..={max_arms}"
        )));
    }
    if let Some(v) = indices.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::param("indices", format!("{v} is not positive")));
    }
    if batch == 0 {
        return Err(Error::param("batch", "must be at least 1"));
    }
    if arm >= n {
        return Err(Error::param("arm", format!("{arm} outside 0..{n}")));
    }
    Ok(())
}

/// Calls `f` with every `size`-subset of `items`, in lexicographic order.
fn for_each_combination(items: &[usize], size: usize, f: &mut dyn FnMut(&[usize])) {
    let n = items.len();
    if size > n {
        return;
    }
    let mut idx: Vec<usize> = (0..size).collect();
    let mut chosen = vec![0usize; size];
    loop {
        for (c, &k) in chosen.iter_mut().zip(&idx) {
            *c = items[k];
        }
        f(&chosen);
        let Some(p) = (0..size).rev().find(|&p| idx[p] != p + n - size) else {
            return;
        };
        idx[p] += 1;
        for q in p + 1..size {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

/// Closed form:
/// `Σ_{|H| ≤ K−1} Σ_{φ ⊆ I∖H∖{i}} (−1)^{|φ|} / (θ̂_i·(1/θ̂_i + Σ_H 1/θ̂_j + Σ_φ 1/θ̂_p))`,
/// with `H` ranging over the subsets of the other arms.
pub fn expected_pulls_bound(indices: &[f64], batch: usize, arm: usize) -> Result<f64> {
    check_args(indices, batch, arm, MAX_BOUND_ARMS)?;
    let n = indices.len();
    let inv: Vec<f64> = indices.iter().map(|v| 1.0 / v).collect();
    let others: Vec<usize> = (0..n).filter(|&j| j != arm).collect();
    let theta_i = indices[arm];

    let mut total = 0.0;
    let mut rest_sums = vec![0.0f64; 1 << others.len()];
    for h in 0..batch.min(n) {
        for_each_combination(&others, h, &mut |set: &[usize]| {
            let base = inv[arm] + set.iter().map(|&j| inv[j]).sum::<f64>();
            let rest: Vec<usize> = others
                .iter()
                .copied()
                .filter(|j| !set.contains(j))
                .collect();
            let mut acc = 1.0 / (theta_i * base);
            rest_sums[0] = 0.0;
            for mask in 1usize..(1 << rest.len()) {
                let low = mask.trailing_zeros() as usize;
                rest_sums[mask] = rest_sums[mask & (mask - 1)] + inv[rest[low]];
                let term = 1.0 / (theta_i * (base + rest_sums[mask]));
                if mask.count_ones() % 2 == 1 {
                    acc -= term;
                } else {
                    acc += term;
                }
            }
            total += acc;
        });
    }
    Ok(total)
}

/// Probability that at most `k − 1` of the independent events with
/// probabilities `p` occur.
fn at_most(p: &[f64], k: usize) -> f64 {
    // dist[c] = P(exactly c events), truncated at k
    let mut dist = vec![0.0; k + 1];
    dist[0] = 1.0;
    for &q in p {
        for c in (0..=k).rev() {
            let stay = dist[c] * (1.0 - q);
            let up = if c > 0 { dist[c - 1] * q } else { 0.0 };
            dist[c] = stay + up;
        }
    }
    dist[..k].iter().sum()
}

/// The defining integral evaluated by tanh-sinh quadrature after the change
/// of variables `u = 1 − exp(−x/θ̂_i)`, which turns `f(x, θ̂_i) dx` into `du`
/// on `[0, 1]`.
pub fn expected_pulls_numeric(indices: &[f64], batch: usize, arm: usize) -> Result<f64> {
    check_args(indices, batch, arm, MAX_BOUND_ARMS)?;
    let n = indices.len();
    if batch >= n {
        return Ok(1.0);
    }
    let theta_i = indices[arm];
    let others: Vec<f64> = (0..n).filter(|&j| j != arm).map(|j| indices[j]).collect();
    let integrand = |u: f64| {
        let x = -theta_i * (-u).ln_1p();
        let p: Vec<f64> = others.iter().map(|t| (-x / t).exp()).collect();
        at_most(&p, batch)
    };
    let out = quadrature::double_exponential::integrate(integrand, 0.0, 1.0, TARGET_ERROR);
    if !(out.error_estimate <= MAX_RESIDUAL) || !out.integral.is_finite() {
        return Err(Error::Integration {
            residual: out.error_estimate,
            tolerance: MAX_RESIDUAL,
        });
    }
    Ok(out.integral)
}

/// Expected selections of `arm` over a run whose rounds granted `k` arms
/// `batch_sizes[k]` times: `Σ_k batch_sizes[k] · P_arm(θ̂, k)`.
pub fn predicted_selections(indices: &[f64], batch_sizes: &[u64], arm: usize) -> Result<f64> {
    let mut total = 0.0;
    for (k, &count) in batch_sizes.iter().enumerate().skip(1) {
        if count > 0 {
            total += count as f64 * expected_pulls_bound(indices, k, arm)?;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_cases() {
        assert_eq!(expected_pulls_bound(&[0.7], 1, 0).unwrap(), 1.0);
        assert_eq!(expected_pulls_numeric(&[0.7], 1, 0).unwrap(), 1.0);
        assert!((expected_pulls_bound(&[0.4, 0.4], 1, 1).unwrap() - 0.5).abs() < 1e-15);
        assert!((expected_pulls_numeric(&[0.4, 0.4], 1, 0).unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn two_arm_closed_form() {
        // P(υ_0 > υ_1) = θ_0 / (θ_0 + θ_1)
        let p = expected_pulls_bound(&[0.6, 0.2], 1, 0).unwrap();
        assert!((p - 0.75).abs() < 1e-15);
        let q = expected_pulls_numeric(&[0.6, 0.2], 1, 0).unwrap();
        assert!((q - 0.75).abs() < 1e-10);
    }

    #[test]
    fn combinations_are_lexicographic() {
        let mut seen = Vec::new();
        for_each_combination(&[2, 5, 7, 9], 2, &mut |c| seen.push(c.to_vec()));
        assert_eq!(
            seen,
            vec![
                vec![2, 5],
                vec![2, 7],
                vec![2, 9],
                vec![5, 7],
                vec![5, 9],
                vec![7, 9]
            ]
        );
        let mut empty = 0;
        for_each_combination(&[1, 2], 0, &mut |c| {
            assert!(c.is_empty());
            empty += 1;
        });
        assert_eq!(empty, 1);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            expected_pulls_bound(&[0.5; 16], 2, 0),
            Err(Error::InstanceTooLarge(_))
        ));
        assert!(expected_pulls_bound(&[0.5, 0.0], 1, 0).is_err());
        assert!(expected_pulls_bound(&[0.5, 0.1], 0, 0).is_err());
        assert!(expected_pulls_numeric(&[0.5, 0.1], 1, 2).is_err());
    }

    #[test]
    fn prediction_weights_batches() {
        let idx = [0.3, 0.3, 0.3];
        let p = predicted_selections(&idx, &[5, 30, 0, 10], 1).unwrap();
        // 30 rounds of one arm, 10 rounds of all three
        assert!((p - (30.0 / 3.0 + 10.0)).abs() < 1e-9);
    }
}
