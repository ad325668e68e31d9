//! Election data model.
//!
//! Candidates and districts are dense indices (`0..m` and `0..k`). Names only
//! exist in the file layer.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Candidate = usize;
pub type DistrictId = usize;

/// Aggregation rule: plurality over voters or plurality over districts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    Pv,
    Pd,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Pv => f.write_str("pv"),
            Rule::Pd => f.write_str("pd"),
        }
    }
}

/// Linear tie-breaking order, most favored candidate first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TieOrder {
    ranking: Vec<Candidate>,
    position: Vec<usize>,
}

impl TieOrder {
    pub fn new(ranking: Vec<Candidate>) -> Result<Self> {
        let m = ranking.len();
        let mut position = vec![usize::MAX; m];
        for (pos, &c) in ranking.iter().enumerate() {
            if c >= m {
                return Err(Error::TieOrder(format!("candidate {c} out of range")));
            }
            if position[c] != usize::MAX {
                return Err(Error::TieOrder(format!("candidate {c} listed twice")));
            }
            position[c] = pos;
        }
        Ok(TieOrder { ranking, position })
    }

    /// Candidate `0` first, then `1`, and so on.
    pub fn identity(m: usize) -> Self {
        TieOrder {
            ranking: (0..m).collect(),
            position: (0..m).collect(),
        }
    }

    /// True when `a` is favored over `b`.
    #[inline]
    pub fn prefers(&self, a: Candidate, b: Candidate) -> bool {
        self.position[a] < self.position[b]
    }

    #[inline]
    pub fn position(&self, c: Candidate) -> usize {
        self.position[c]
    }

    pub fn ranking(&self) -> &[Candidate] {
        &self.ranking
    }

    pub fn most_favored(&self) -> Candidate {
        self.ranking[0]
    }

    pub fn len(&self) -> usize {
        self.ranking.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranking.is_empty()
    }
}

/// District-by-candidate matrix of vote counts, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VoteProfile {
    candidates: usize,
    counts: Vec<u64>,
}

impl VoteProfile {
    pub fn zeros(districts: usize, candidates: usize) -> Self {
        VoteProfile {
            candidates,
            counts: vec![0; districts * candidates],
        }
    }

    pub fn from_rows(rows: Vec<Vec<u64>>) -> Result<Self> {
        let candidates = rows.first().map_or(0, Vec::len);
        let mut counts = Vec::with_capacity(rows.len() * candidates);
        for (district, row) in rows.into_iter().enumerate() {
            if row.len() != candidates {
                return Err(Error::RowLength {
                    district,
                    expected: candidates,
                    found: row.len(),
                });
            }
            counts.extend(row);
        }
        Ok(VoteProfile { candidates, counts })
    }

    pub fn num_districts(&self) -> usize {
        if self.candidates == 0 {
            0
        } else {
            self.counts.len() / self.candidates
        }
    }

    pub fn num_candidates(&self) -> usize {
        self.candidates
    }

    #[inline]
    pub fn row(&self, district: DistrictId) -> &[u64] {
        let start = district * self.candidates;
        &self.counts[start..start + self.candidates]
    }

    #[inline]
    pub fn get(&self, district: DistrictId, candidate: Candidate) -> u64 {
        self.counts[district * self.candidates + candidate]
    }

    pub fn set(&mut self, district: DistrictId, candidate: Candidate, votes: u64) {
        self.counts[district * self.candidates + candidate] = votes;
    }

    pub fn set_row(&mut self, district: DistrictId, row: &[u64]) {
        let start = district * self.candidates;
        self.counts[start..start + self.candidates].copy_from_slice(row);
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u64]> + '_ {
        self.counts.chunks(self.candidates.max(1))
    }

    /// Voter count of a district, or `None` on overflow.
    pub fn row_sum(&self, district: DistrictId) -> Option<u64> {
        self.row(district)
            .iter()
            .try_fold(0u64, |acc, &x| acc.checked_add(x))
    }

    /// Districts whose rows differ between `self` and `other`.
    pub fn differing_rows(&self, other: &VoteProfile) -> BTreeSet<DistrictId> {
        (0..self.num_districts())
            .filter(|&i| self.row(i) != other.row(i))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct District {
    /// Number of voters `n_i`.
    pub size: u64,
    pub weight: u64,
    /// How many votes an attacker may change here.
    pub gamma: u64,
}

/// Districted election: tie order, district parameters, the original profile
/// and optionally a manipulated one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElectionInstance {
    tie: TieOrder,
    districts: Vec<District>,
    original: VoteProfile,
    manipulated: Option<VoteProfile>,
    total_voters: u64,
    total_weight: u64,
}

impl ElectionInstance {
    /// Builds an instance from `(weight, gamma)` pairs, deriving district sizes
    /// from the original profile.
    pub fn new(
        tie: TieOrder,
        params: &[(u64, u64)],
        original: VoteProfile,
        manipulated: Option<VoteProfile>,
    ) -> Result<Self> {
        let districts = params
            .iter()
            .enumerate()
            .map(|(i, &(weight, gamma))| {
                let size = if i < original.num_districts() {
                    original.row_sum(i).ok_or(Error::Overflow)?
                } else {
                    0
                };
                Ok(District {
                    size,
                    weight,
                    gamma,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_districts(tie, districts, original, manipulated)
    }

    pub fn from_districts(
        tie: TieOrder,
        districts: Vec<District>,
        original: VoteProfile,
        manipulated: Option<VoteProfile>,
    ) -> Result<Self> {
        let m = original.num_candidates();
        let k = districts.len();
        if m == 0 {
            return Err(Error::NoCandidates);
        }
        if k == 0 {
            return Err(Error::NoDistricts);
        }
        if tie.len() != m {
            return Err(Error::TieOrder(format!(
                "{} entries for {m} candidates",
                tie.len()
            )));
        }
        if original.num_districts() != k {
            return Err(Error::ShapeMismatch);
        }
        if let Some(man) = &manipulated {
            if man.num_districts() != k || man.num_candidates() != m {
                return Err(Error::ShapeMismatch);
            }
        }
        let mut total_voters = 0u64;
        let mut total_weight = 0u64;
        for (i, d) in districts.iter().enumerate() {
            let actual = original.row_sum(i).ok_or(Error::Overflow)?;
            if actual != d.size {
                return Err(Error::SizeMismatch {
                    district: i,
                    declared: d.size,
                    actual,
                });
            }
            if let Some(man) = &manipulated {
                let other = man.row_sum(i).ok_or(Error::Overflow)?;
                if other != actual {
                    return Err(Error::RowSumMismatch {
                        district: i,
                        original: actual,
                        manipulated: other,
                    });
                }
            }
            if d.weight == 0 {
                return Err(Error::ZeroWeight { district: i });
            }
            if d.gamma > d.size {
                return Err(Error::GammaTooLarge {
                    district: i,
                    gamma: d.gamma,
                    size: d.size,
                });
            }
            total_voters = total_voters.checked_add(d.size).ok_or(Error::Overflow)?;
            total_weight = total_weight
                .checked_add(d.weight)
                .ok_or(Error::Overflow)?;
        }
        // scores are handled as i64 by the solvers
        if total_voters > i64::MAX as u64 || total_weight > i64::MAX as u64 {
            return Err(Error::Overflow);
        }
        Ok(ElectionInstance {
            tie,
            districts,
            original,
            manipulated,
            total_voters,
            total_weight,
        })
    }

    pub fn num_candidates(&self) -> usize {
        self.original.num_candidates()
    }

    pub fn num_districts(&self) -> usize {
        self.districts.len()
    }

    pub fn tie(&self) -> &TieOrder {
        &self.tie
    }

    pub fn districts(&self) -> &[District] {
        &self.districts
    }

    pub fn district(&self, i: DistrictId) -> &District {
        &self.districts[i]
    }

    pub fn weights(&self) -> Vec<u64> {
        self.districts.iter().map(|d| d.weight).collect()
    }

    pub fn original(&self) -> &VoteProfile {
        &self.original
    }

    pub fn manipulated(&self) -> Option<&VoteProfile> {
        self.manipulated.as_ref()
    }

    pub fn total_voters(&self) -> u64 {
        self.total_voters
    }

    pub fn total_weight(&self) -> u64 {
        self.total_weight
    }

    pub fn with_manipulated(&self, manipulated: VoteProfile) -> Result<Self> {
        Self::from_districts(
            self.tie.clone(),
            self.districts.clone(),
            self.original.clone(),
            Some(manipulated),
        )
    }

    pub fn without_manipulated(&self) -> Self {
        ElectionInstance {
            manipulated: None,
            ..self.clone()
        }
    }

    /// Same profiles and tie order with different district weights.
    pub fn with_weights(&self, weights: &[u64]) -> Result<Self> {
        let districts = self
            .districts
            .iter()
            .zip(weights)
            .map(|(d, &weight)| District { weight, ..*d })
            .collect();
        Self::from_districts(
            self.tie.clone(),
            districts,
            self.original.clone(),
            self.manipulated.clone(),
        )
    }

    pub fn check_candidate(&self, c: Candidate) -> Result<()> {
        if c < self.num_candidates() {
            Ok(())
        } else {
            Err(Error::UnknownCandidate(c))
        }
    }
}

/// Per-candidate totals: vote counts under PV, won weight under PD.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ScoreVector(pub Vec<u64>);

impl ScoreVector {
    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }
}

impl Index<Candidate> for ScoreVector {
    type Output = u64;

    fn index(&self, c: Candidate) -> &u64 {
        &self.0[c]
    }
}

/// Attacker move: the touched districts `M` with their replacement rows.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ManipulationStrategy {
    rows: std::collections::BTreeMap<DistrictId, Vec<u64>>,
}

impl ManipulationStrategy {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_row(mut self, district: DistrictId, row: Vec<u64>) -> Self {
        self.rows.insert(district, row);
        self
    }

    pub fn insert(&mut self, district: DistrictId, row: Vec<u64>) {
        self.rows.insert(district, row);
    }

    pub fn touched(&self) -> BTreeSet<DistrictId> {
        self.rows.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, district: DistrictId) -> Option<&[u64]> {
        self.rows.get(&district).map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (DistrictId, &[u64])> + '_ {
        self.rows.iter().map(|(&i, r)| (i, r.as_slice()))
    }

    /// The manipulated profile `v̄`: replacement rows on `M`, original rows
    /// elsewhere. Rows must already have the profile's width.
    pub fn apply(&self, original: &VoteProfile) -> VoteProfile {
        let mut out = original.clone();
        for (&i, row) in &self.rows {
            out.set_row(i, row);
        }
        out
    }
}

/// Defender move: districts restored to their original rows.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct RecountSet(pub BTreeSet<DistrictId>);

impl RecountSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, d: DistrictId) -> bool {
        self.0.contains(&d)
    }

    pub fn iter(&self) -> impl Iterator<Item = DistrictId> + '_ {
        self.0.iter().copied()
    }
}

impl FromIterator<DistrictId> for RecountSet {
    fn from_iter<I: IntoIterator<Item = DistrictId>>(iter: I) -> Self {
        RecountSet(iter.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tie_order_rejects_duplicates_and_out_of_range() {
        assert!(TieOrder::new(vec![0, 0]).is_err());
        assert!(TieOrder::new(vec![0, 2]).is_err());
        let t = TieOrder::new(vec![2, 0, 1]).unwrap();
        assert!(t.prefers(2, 0));
        assert!(t.prefers(0, 1));
        assert_eq!(t.most_favored(), 2);
    }

    #[test]
    fn instance_rejects_bad_shapes() {
        let v = VoteProfile::from_rows(vec![vec![1, 1], vec![2, 0]]).unwrap();
        let tie = TieOrder::identity(2);
        assert_eq!(
            ElectionInstance::new(tie.clone(), &[(0, 0), (1, 0)], v.clone(), None),
            Err(Error::ZeroWeight { district: 0 })
        );
        assert_eq!(
            ElectionInstance::new(tie.clone(), &[(1, 3), (1, 0)], v.clone(), None),
            Err(Error::GammaTooLarge {
                district: 0,
                gamma: 3,
                size: 2
            })
        );
        let bad = VoteProfile::from_rows(vec![vec![1, 1], vec![2, 1]]).unwrap();
        assert_eq!(
            ElectionInstance::new(tie.clone(), &[(1, 0), (1, 0)], v.clone(), Some(bad)),
            Err(Error::RowSumMismatch {
                district: 1,
                original: 2,
                manipulated: 3
            })
        );
        assert!(VoteProfile::from_rows(vec![vec![1], vec![1, 2]]).is_err());
        let ok = ElectionInstance::new(tie, &[(2, 1), (3, 2)], v, None).unwrap();
        assert_eq!(ok.total_voters(), 4);
        assert_eq!(ok.total_weight(), 5);
    }

    #[test]
    fn instance_rejects_overflowing_totals() {
        let v = VoteProfile::from_rows(vec![vec![1], vec![1]]).unwrap();
        let r = ElectionInstance::new(TieOrder::identity(1), &[(u64::MAX, 0), (1, 0)], v, None);
        assert_eq!(r, Err(Error::Overflow));
    }

    #[test]
    fn strategy_apply_replaces_only_touched_rows() {
        let v = VoteProfile::from_rows(vec![vec![1, 0], vec![0, 1]]).unwrap();
        let s = ManipulationStrategy::new().with_row(1, vec![1, 0]);
        let out = s.apply(&v);
        assert_eq!(out.row(0), &[1, 0]);
        assert_eq!(out.row(1), &[1, 0]);
        assert_eq!(v.differing_rows(&out).into_iter().collect::<Vec<_>>(), vec![1]);
    }
}
