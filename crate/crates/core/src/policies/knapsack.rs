use crate::error::{Error, Result};

/// A candidate arm for the per-round knapsack.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnapsackItem {
    pub tenant: usize,
    /// Index value to maximize (`θ̂`).
    pub value: f64,
    /// Integer PRB cost.
    pub cost: u32,
}

/// Solves the single-round selection exactly: the locked tenants are kept,
/// and among `candidates` the subset maximizing the summed value within the
/// residual budget is added.
///
/// 0/1 knapsack by dynamic programming over integer PRBs, `O(n·C)`.
/// Items with non-positive value are never taken.
pub fn solve_instantaneous(
    capacity: u32,
    locked: &[(usize, u32)],
    candidates: &[KnapsackItem],
) -> Result<Vec<usize>> {
    let locked_cost: u32 = locked.iter().map(|(_, c)| c).sum();
    if locked_cost > capacity {
        return Err(Error::LockedOverBudget {
            locked: locked_cost,
            capacity,
        });
    }
    let mut selected: Vec<usize> = locked.iter().map(|(t, _)| *t).collect();
    let residual = (capacity - locked_cost) as usize;
    let width = residual + 1;

    let items: Vec<&KnapsackItem> = candidates
        .iter()
        .filter(|c| c.value > 0.0 && (c.cost as usize) <= residual)
        .collect();
    if items.is_empty() {
        return Ok(selected);
    }

    let mut best = vec![0.0f64; width];
    let mut keep = vec![false; items.len() * width];
    for (k, item) in items.iter().enumerate() {
        let c = item.cost as usize;
        let row = &mut keep[k * width..(k + 1) * width];
        for w in (c..width).rev() {
            let with = best[w - c] + item.value;
            if with > best[w] {
                best[w] = with;
                row[w] = true;
            }
        }
    }

    let mut w = residual;
    let mut chosen = Vec::new();
    for k in (0..items.len()).rev() {
        if keep[k * width + w] {
            chosen.push(items[k].tenant);
            w -= items[k].cost as usize;
        }
    }
    chosen.reverse();
    selected.extend(chosen);
    Ok(selected)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn item(tenant: usize, value: f64, cost: u32) -> KnapsackItem {
        KnapsackItem {
            tenant,
            value,
            cost,
        }
    }

    #[test]
    fn two_halves_beat_one_whole() {
        let got = solve_instantaneous(
            10,
            &[],
            &[item(1, 0.9, 10), item(2, 0.5, 5), item(3, 0.5, 5)],
        )
        .unwrap();
        assert_eq!(got, vec![2, 3]);
    }

    #[test]
    fn empty_candidates_keep_locked() {
        assert_eq!(solve_instantaneous(10, &[(4, 6)], &[]).unwrap(), vec![4]);
    }

    #[test]
    fn nothing_fits() {
        let got = solve_instantaneous(10, &[(0, 8)], &[item(1, 1.0, 3), item(2, 1.0, 5)]).unwrap();
        assert_eq!(got, vec![0]);
    }

    #[test]
    fn zero_cost_items_are_free() {
        let got = solve_instantaneous(5, &[], &[item(0, 0.2, 0), item(1, 0.7, 5)]).unwrap();
        assert_eq!(got, vec![0, 1]);
    }

    #[test]
    fn locked_over_budget_is_an_error() {
        assert!(matches!(
            solve_instantaneous(10, &[(0, 6), (1, 6)], &[]),
            Err(Error::LockedOverBudget { locked: 12, .. })
        ));
    }
}
