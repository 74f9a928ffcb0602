use crate::error::{Error, Result};

/// Per-round tenant reward blending the requested share of capacity with the
/// unused share of the slice:
///
/// ```text
/// η = α·R/C + (1 − α)·(R − λ)/R
/// ```
///
/// An absent request (`R = 0`) earns nothing.
pub fn compute_reward(requested: u32, used: f64, capacity: u32, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if capacity == 0 {
        return Err(Error::param("capacity", "capacity must be positive"));
    }
    if requested > capacity {
        return Err(Error::param(
            "requested",
            format!("requested {requested} PRBs exceeds capacity {capacity}"),
        ));
    }
    if !used.is_finite() || used < 0.0 {
        return Err(Error::param(
            "used",
            format!("used PRBs {used} must be >= 0"),
        ));
    }
    let r = f64::from(requested);
    if used > r {
        return Err(Error::param(
            "used",
            format!("used PRBs {used} exceed requested {requested}"),
        ));
    }
    if requested == 0 {
        return Ok(0.0);
    }
    let c = f64::from(capacity);
    Ok(alpha * r / c + (1.0 - alpha) * (r - used) / r)
}

/// Reward when no monitoring data is available: only the request term remains.
pub fn reward_without_monitoring(requested: u32, capacity: u32, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if capacity == 0 || requested > capacity {
        return Err(Error::param(
            "requested",
            format!("requested {requested} PRBs outside 0..={capacity}"),
        ));
    }
    Ok(alpha * f64::from(requested) / f64::from(capacity))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::param("alpha", format!("{alpha} outside [0, 1]")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn absent_request_earns_nothing() {
        assert_eq!(compute_reward(0, 0.0, 150, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn full_request_full_use() {
        assert_abs_diff_eq!(compute_reward(150, 150.0, 150, 0.5).unwrap(), 0.5);
    }

    #[test]
    fn hand_evaluated_example() {
        // 0.5·(50/150) + 0.5·(25/50)
        assert_abs_diff_eq!(
            compute_reward(50, 25.0, 150, 0.5).unwrap(),
            0.416_666_666_666_666_7,
            epsilon = 1e-12
        );
    }

    #[test]
    fn unmonitored_drops_second_term() {
        assert_abs_diff_eq!(reward_without_monitoring(75, 150, 0.4).unwrap(), 0.2);
    }

    #[test]
    fn rejects_out_of_range_inputs() {
        assert!(compute_reward(50, 51.0, 150, 0.5).is_err());
        assert!(compute_reward(151, 0.0, 150, 0.5).is_err());
        assert!(compute_reward(50, 10.0, 150, 1.5).is_err());
        assert!(compute_reward(50, 10.0, 150, -0.1).is_err());
        assert!(compute_reward(50, -1.0, 150, 0.5).is_err());
    }

    proptest! {
        #[test]
        fn reward_is_bounded(c in 1u32..500, r_frac in 0.0f64..=1.0, u_frac in 0.0f64..=1.0, alpha in 0.0f64..=1.0) {
            let r = ((f64::from(c) * r_frac).floor() as u32).min(c);
            let used = f64::from(r) * u_frac;
            let eta = compute_reward(r, used, c, alpha).unwrap();
            prop_assert!((0.0..=1.0).contains(&eta));
        }

        #[test]
        fn monotone_in_request_and_use(c in 2u32..500, r in 1u32..500, ratio in 0.0f64..=1.0, alpha in 0.0f64..=1.0, du in 0.0f64..=1.0) {
            let r = r.min(c - 1);
            let lo = compute_reward(r, f64::from(r) * ratio, c, alpha).unwrap();
            let hi = compute_reward(r + 1, f64::from(r + 1) * ratio, c, alpha).unwrap();
            prop_assert!(hi >= lo - 1e-12);

            let used = f64::from(r) * ratio;
            let more = (used + du * (f64::from(r) - used)).min(f64::from(r));
            let a = compute_reward(r, used, c, alpha).unwrap();
            let b = compute_reward(r, more, c, alpha).unwrap();
            prop_assert!(b <= a + 1e-12);
        }
    }
}
