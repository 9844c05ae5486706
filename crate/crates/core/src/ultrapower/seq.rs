//! Piecewise symbolic Cauchy sequences: a generalized power sum on each
//! block of an eventually periodic partition of the naturals.
//!
//! All branches must share one limit (otherwise the sequence would not be
//! Cauchy); ring operations work on the common refinement of the two
//! partitions, and sign analysis per branch turns comparison index-sets
//! into exact eventually periodic sets.

use alloc::string::ToString;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rational::Rational;

use super::epset::EpSet;
use super::powersum::PowerSum;

/// Element of the symbolic Cauchy-sequence class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeqExpr {
    branches: Vec<(EpSet, PowerSum)>,
}

impl SeqExpr {
    /// Constant sequence.
    pub fn constant(c: Rational) -> SeqExpr {
        SeqExpr { branches: alloc::vec![(EpSet::full(), PowerSum::constant(c))] }
    }

    pub fn zero() -> SeqExpr {
        Self::constant(Rational::zero())
    }

    /// Single power sum on all indices.
    pub fn from_power_sum(p: PowerSum) -> SeqExpr {
        SeqExpr { branches: alloc::vec![(EpSet::full(), p)] }
    }

    /// Case-defined sequence: `on` where `set` holds, `off` elsewhere.
    pub fn two_case(set: EpSet, on: PowerSum, off: PowerSum) -> Result<SeqExpr> {
        Self::piecewise(alloc::vec![(set.clone(), on), (set.complement(), off)])
    }

    /// General piecewise constructor. The sets must partition the naturals
    /// and every branch must share the same limit.
    pub fn piecewise(branches: Vec<(EpSet, PowerSum)>) -> Result<SeqExpr> {
        let nonempty: Vec<(EpSet, PowerSum)> = branches
            .into_iter()
            .filter(|(s, _)| !s.is_empty())
            .collect();
        if nonempty.is_empty() {
            return Err(Error::Domain {
                op: "SeqExpr::piecewise",
                reason: "partition must cover the naturals".to_string(),
            });
        }
        // Pairwise disjoint and jointly exhaustive.
        let mut cover = EpSet::empty();
        for (s, _) in &nonempty {
            if !cover.intersect(s).is_empty() {
                return Err(Error::Domain {
                    op: "SeqExpr::piecewise",
                    reason: "branch index sets overlap".to_string(),
                });
            }
            cover = cover.union(s);
        }
        if cover != EpSet::full() {
            return Err(Error::Domain {
                op: "SeqExpr::piecewise",
                reason: "branch index sets do not cover the naturals".to_string(),
            });
        }
        // Cauchy: one shared limit.
        let limit = nonempty[0].1.limit().clone();
        for (set, p) in &nonempty {
            if set.is_infinite() && p.limit() != &limit {
                return Err(Error::Domain {
                    op: "SeqExpr::piecewise",
                    reason: "branches disagree on the limit (sequence not Cauchy)".to_string(),
                });
            }
        }
        Ok(Self::canonical(nonempty))
    }

    fn canonical(branches: Vec<(EpSet, PowerSum)>) -> SeqExpr {
        let mut merged: Vec<(EpSet, PowerSum)> = Vec::new();
        for (set, p) in branches {
            if set.is_empty() {
                continue;
            }
            match merged.iter_mut().find(|(_, q)| q == &p) {
                Some((existing, _)) => *existing = existing.union(&set),
                None => merged.push((set, p)),
            }
        }
        merged.sort_by_key(|(set, _)| {
            set.members_below(set.threshold() + set.period())
                .first()
                .copied()
                .unwrap_or(u64::MAX)
        });
        SeqExpr { branches: merged }
    }

    pub fn branches(&self) -> &[(EpSet, PowerSum)] {
        &self.branches
    }

    /// The limit shared by every (infinite) branch.
    pub fn limit(&self) -> &Rational {
        self.branches
            .iter()
            .find(|(s, _)| s.is_infinite())
            .map(|(_, p)| p.limit())
            .expect("a partition of the naturals has an infinite block")
    }

    fn branch_at(&self, n: u64) -> &PowerSum {
        &self
            .branches
            .iter()
            .find(|(s, _)| s.contains(n))
            .expect("partition covers every index")
            .1
    }

    pub fn value_f64(&self, n: u64) -> f64 {
        self.branch_at(n).value_f64(n)
    }

    pub fn value_exact(&self, n: u64) -> Option<Rational> {
        self.branch_at(n).value_exact(n)
    }

    fn zip(&self, other: &SeqExpr, f: impl Fn(&PowerSum, &PowerSum) -> PowerSum) -> SeqExpr {
        let mut out = Vec::new();
        for (sa, pa) in &self.branches {
            for (sb, pb) in &other.branches {
                let set = sa.intersect(sb);
                if !set.is_empty() {
                    out.push((set, f(pa, pb)));
                }
            }
        }
        Self::canonical(out)
    }

    pub fn add(&self, other: &SeqExpr) -> SeqExpr {
        self.zip(other, PowerSum::add)
    }

    pub fn sub(&self, other: &SeqExpr) -> SeqExpr {
        self.zip(other, PowerSum::sub)
    }

    pub fn mul(&self, other: &SeqExpr) -> SeqExpr {
        self.zip(other, PowerSum::mul)
    }

    pub fn neg(&self) -> SeqExpr {
        SeqExpr {
            branches: self.branches.iter().map(|(s, p)| (s.clone(), p.neg())).collect(),
        }
    }

    pub fn scale(&self, factor: &Rational) -> SeqExpr {
        Self::canonical(
            self.branches
                .iter()
                .map(|(s, p)| (s.clone(), p.scale(factor)))
                .collect(),
        )
    }

    /// True when the sequence is identically zero.
    pub fn is_identically_zero(&self) -> bool {
        self.branches.iter().all(|(_, p)| p.is_zero())
    }

    /// The exact index set `{n | pred(sign(self_n))}`, assembled from the
    /// per-branch sign runs.
    pub fn sign_set(&self, pred: impl Fn(i32) -> bool) -> EpSet {
        let mut out = EpSet::empty();
        for (set, p) in &self.branches {
            let runs = p.sign_runs();
            let stable_from = runs.stable_from();
            let mut bits = alloc::vec![false; stable_from as usize];
            for pair in runs.runs.windows(2) {
                if pred(pair[0].1) {
                    for slot in &mut bits[pair[0].0 as usize..pair[1].0 as usize] {
                        *slot = true;
                    }
                }
            }
            let tail: alloc::collections::BTreeSet<u64> = if pred(runs.eventual()) {
                [0].into_iter().collect()
            } else {
                Default::default()
            };
            let member = EpSet::from_parts(bits, 1, tail).expect("valid description");
            out = out.union(&set.intersect(&member));
        }
        out
    }
}
