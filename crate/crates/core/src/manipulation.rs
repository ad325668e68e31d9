//! Manipulation and recount profile algebra.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::model::{DistrictId, ElectionInstance, ManipulationStrategy, RecountSet, VoteProfile};

/// Number of single-vote moves turning one row into the other,
/// `½ Σ_c |a_c − b_c|`. Rows must have the same voter count.
pub fn swap_distance(a: &[u64], b: &[u64]) -> Result<u64> {
    if a.len() != b.len() {
        return Err(Error::RowLength {
            district: 0,
            expected: a.len(),
            found: b.len(),
        });
    }
    let sa: u128 = a.iter().map(|&x| x as u128).sum();
    let sb: u128 = b.iter().map(|&x| x as u128).sum();
    if sa != sb {
        return Err(Error::RowSumMismatch {
            district: 0,
            original: sa as u64,
            manipulated: sb as u64,
        });
    }
    let total: u128 = a.iter().zip(b).map(|(&x, &y)| x.abs_diff(y) as u128).sum();
    Ok((total / 2) as u64)
}

/// The profile after the defender restores `recount ⊆ touched`: original rows
/// outside `touched` and on `recount`, manipulated rows on the rest.
pub fn apply_recount(
    original: &VoteProfile,
    manipulated: &VoteProfile,
    touched: &BTreeSet<DistrictId>,
    recount: &RecountSet,
) -> Result<VoteProfile> {
    if original.num_districts() != manipulated.num_districts()
        || original.num_candidates() != manipulated.num_candidates()
    {
        return Err(Error::ShapeMismatch);
    }
    if let Some(d) = recount.iter().find(|d| !touched.contains(d)) {
        return Err(Error::RecountNotSubset(d));
    }
    let mut out = original.clone();
    for &i in touched {
        if i >= out.num_districts() {
            return Err(Error::UnknownDistrict(i));
        }
        if !recount.contains(i) {
            out.set_row(i, manipulated.row(i));
        }
    }
    Ok(out)
}

/// Why a manipulation strategy is inadmissible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Budget { touched: usize, budget: usize },
    UnknownDistrict { district: DistrictId },
    RowLength { district: DistrictId, expected: usize, found: usize },
    Sum { district: DistrictId, expected: u64, found: u64 },
    Cap { district: DistrictId, distance: u64, gamma: u64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::Budget { touched, budget } => {
                write!(f, "touches {touched} districts with an attacker budget of {budget}")
            }
            Violation::UnknownDistrict { district } => write!(f, "unknown district {district}"),
            Violation::RowLength {
                district,
                expected,
                found,
            } => write!(f, "district {district}: row has {found} entries, expected {expected}"),
            Violation::Sum {
                district,
                expected,
                found,
            } => write!(f, "district {district}: row sums to {found}, expected {expected}"),
            Violation::Cap {
                district,
                distance,
                gamma,
            } => write!(f, "district {district}: {distance} swaps exceed gamma {gamma}"),
        }
    }
}

/// Checks the budget, then each touched district in order: row width, voter
/// count, and swap distance against `γ_i`. Reports the first failure.
pub fn validate_manipulation(
    instance: &ElectionInstance,
    strategy: &ManipulationStrategy,
    budget: usize,
) -> std::result::Result<(), Violation> {
    if strategy.len() > budget {
        return Err(Violation::Budget {
            touched: strategy.len(),
            budget,
        });
    }
    let m = instance.num_candidates();
    for (i, row) in strategy.iter() {
        if i >= instance.num_districts() {
            return Err(Violation::UnknownDistrict { district: i });
        }
        if row.len() != m {
            return Err(Violation::RowLength {
                district: i,
                expected: m,
                found: row.len(),
            });
        }
        let district = instance.district(i);
        let found = row.iter().try_fold(0u64, |a, &x| a.checked_add(x)).unwrap_or(u64::MAX);
        if found != district.size {
            return Err(Violation::Sum {
                district: i,
                expected: district.size,
                found,
            });
        }
        let distance = swap_distance(instance.original().row(i), row)
            .expect("row sums checked above");
        if distance > district.gamma {
            return Err(Violation::Cap {
                district: i,
                distance,
                gamma: district.gamma,
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TieOrder;

    #[test]
    fn swap_distance_examples() {
        assert_eq!(swap_distance(&[1, 2], &[1, 2]).unwrap(), 0);
        assert_eq!(swap_distance(&[3, 0], &[0, 3]).unwrap(), 3);
        assert_eq!(swap_distance(&[2, 1, 0], &[0, 2, 1]).unwrap(), 2);
        assert!(matches!(swap_distance(&[1, 0], &[1, 1]), Err(Error::RowSumMismatch { .. })));
    }

    fn three_districts() -> (VoteProfile, VoteProfile) {
        let v = VoteProfile::from_rows(vec![vec![1, 0], vec![2, 0], vec![3, 0]]).unwrap();
        let vbar = VoteProfile::from_rows(vec![vec![0, 1], vec![0, 2], vec![0, 3]]).unwrap();
        (v, vbar)
    }

    #[test]
    fn apply_recount_selects_rows() {
        let (v, vbar) = three_districts();
        let touched: BTreeSet<_> = [0, 1].into_iter().collect();
        let full: RecountSet = touched.iter().copied().collect();
        assert_eq!(apply_recount(&v, &vbar, &touched, &full).unwrap(), v);

        let none = apply_recount(&v, &vbar, &touched, &RecountSet::empty()).unwrap();
        assert_eq!(none.row(0), vbar.row(0));
        assert_eq!(none.row(1), vbar.row(1));
        assert_eq!(none.row(2), v.row(2));

        let some = apply_recount(&v, &vbar, &touched, &[1].into_iter().collect()).unwrap();
        assert_eq!(some.row(0), vbar.row(0));
        assert_eq!(some.row(1), v.row(1));
        assert_eq!(some.row(2), v.row(2));

        assert_eq!(
            apply_recount(&v, &vbar, &touched, &[2].into_iter().collect()),
            Err(Error::RecountNotSubset(2))
        );
    }

    #[test]
    fn validate_manipulation_reports_named_violations() {
        let (v, _) = three_districts();
        let inst = ElectionInstance::new(TieOrder::identity(2), &[(1, 1), (1, 1), (1, 3)], v, None).unwrap();
        assert_eq!(validate_manipulation(&inst, &ManipulationStrategy::new(), 0), Ok(()));

        let s = ManipulationStrategy::new().with_row(1, vec![1, 0]);
        assert_eq!(
            validate_manipulation(&inst, &s, 3),
            Err(Violation::Sum {
                district: 1,
                expected: 2,
                found: 1
            })
        );
        let s = ManipulationStrategy::new().with_row(1, vec![0, 2]);
        assert_eq!(
            validate_manipulation(&inst, &s, 3),
            Err(Violation::Cap {
                district: 1,
                distance: 2,
                gamma: 1
            })
        );
        let s = ManipulationStrategy::new().with_row(0, vec![0, 1]).with_row(2, vec![0, 3]);
        assert_eq!(validate_manipulation(&inst, &s, 2), Ok(()));
        assert_eq!(
            validate_manipulation(&inst, &s, 1),
            Err(Violation::Budget { touched: 2, budget: 1 })
        );
    }
}
