use serde::Serialize;

use crate::error::{Error, Result};

/// The ε-greedy sub-optimal selection bound at one round.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EgreedyBound {
    /// The three-term expression as written; may be above 1, negative or
    /// infinite where the bound carries no information.
    pub raw: f64,
    /// `raw` restricted to a probability. Rounds where the expression is
    /// vacuous map to 1.
    pub clamped: f64,
    /// `b·|I| / ((t − 1)·d²·√e)`. The bound only says something once this
    /// drops below 1.
    pub ratio: f64,
}

impl EgreedyBound {
    pub fn is_vacuous(&self) -> bool {
        !(self.ratio < 1.0) || !self.raw.is_finite() || self.raw >= 1.0
    }
}

/// Evaluates
/// `b/(d²t) + 2·(b/d²)·ln(1/x)·x^{b/(5d²)} + (4e/d²)·x^{b/2}` with
/// `x = b|I| / ((t−1)·d²·√e)`.
pub fn egreedy_suboptimal_prob(
    b: f64,
    d: f64,
    tenant_count: usize,
    round: f64,
) -> Result<EgreedyBound> {
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::param("b", format!("{b} must be > 0")));
    }
    if !(d > 0.0 && d <= 1.0) {
        return Err(Error::param("d", format!("{d} outside (0, 1]")));
    }
    if tenant_count == 0 {
        return Err(Error::param("tenant_count", "at least one tenant required"));
    }
    if !(round >= 2.0) {
        return Err(Error::param("round", format!("{round} < 2")));
    }
    let d2 = d * d;
    let x = b * tenant_count as f64 / ((round - 1.0) * d2 * 0.5f64.exp());
    let first = b / (d2 * round);
    let second = 2.0 * (b / d2 * (1.0 / x).ln()) * x.powf(b / (5.0 * d2));
    let third = 4.0 * std::f64::consts::E / d2 * x.powf(b / 2.0);
    let raw = first + second + third;
    let mut bound = EgreedyBound {
        raw,
        clamped: 1.0,
        ratio: x,
    };
    if !bound.is_vacuous() {
        bound.clamped = raw.clamp(0.0, 1.0);
    }
    Ok(bound)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_parameters_are_vacuous() {
        let v = egreedy_suboptimal_prob(10.0, 0.01, 10, 1e4).unwrap();
        assert!(v.ratio > 1.0);
        assert!(v.is_vacuous());
        assert_eq!(v.clamped, 1.0);
    }

    #[test]
    fn argument_checks() {
        assert!(egreedy_suboptimal_prob(0.0, 0.5, 2, 10.0).is_err());
        assert!(egreedy_suboptimal_prob(1.0, 1.5, 2, 10.0).is_err());
        assert!(egreedy_suboptimal_prob(1.0, 0.5, 0, 10.0).is_err());
        assert!(egreedy_suboptimal_prob(1.0, 0.5, 2, 1.0).is_err());
    }
}
