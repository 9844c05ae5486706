//! Eventually periodic subsets of the naturals: the decidable Boolean
//! algebra fed to the filter oracle.
//!
//! Beyond a threshold `N0`, membership depends only on the residue modulo a
//! period `m`; below it, explicit bits apply. The canonical form (minimal
//! period, then minimal threshold) is unique, so structural equality is set
//! equality, and the algebra is closed under complement, union and
//! intersection with everything decidable.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Eventually periodic subset of the naturals in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EpSet {
    prefix: Vec<bool>,
    period: u64,
    residues: BTreeSet<u64>,
}

impl EpSet {
    fn normalized(prefix: Vec<bool>, period: u64, residues: BTreeSet<u64>) -> EpSet {
        debug_assert!(period >= 1);
        // Degenerate tails collapse to period one.
        let (mut period, mut residues) = if residues.is_empty() {
            (1, BTreeSet::new())
        } else if residues.len() as u64 == period {
            (1, BTreeSet::from([0]))
        } else {
            (period, residues)
        };
        // Minimal period: smallest divisor d of m with d-periodic residues.
        for d in 1..=period {
            if period % d != 0 {
                continue;
            }
            let mut consistent = true;
            'outer: for r in 0..d {
                let first = residues.contains(&r);
                let mut k = r;
                while k < period {
                    if residues.contains(&k) != first {
                        consistent = false;
                        break 'outer;
                    }
                    k += d;
                }
            }
            if consistent {
                residues = (0..d).filter(|r| residues.contains(r)).collect();
                period = d;
                break;
            }
        }
        // Minimal threshold: drop prefix bits that agree with the periodic
        // prediction.
        let mut prefix = prefix;
        while let Some(&last) = prefix.last() {
            let n = (prefix.len() - 1) as u64;
            if residues.contains(&(n % period)) == last {
                prefix.pop();
            } else {
                break;
            }
        }
        EpSet { prefix, period, residues }
    }

    pub fn empty() -> EpSet {
        EpSet { prefix: Vec::new(), period: 1, residues: BTreeSet::new() }
    }

    /// All of the naturals.
    pub fn full() -> EpSet {
        EpSet { prefix: Vec::new(), period: 1, residues: BTreeSet::from([0]) }
    }

    pub fn evens() -> EpSet {
        Self::residue_class(2, 0)
    }

    pub fn odds() -> EpSet {
        Self::residue_class(2, 1)
    }

    /// `{n | n ≡ r (mod m)}`.
    pub fn residue_class(m: u64, r: u64) -> EpSet {
        assert!(m >= 1 && r < m);
        EpSet::normalized(Vec::new(), m, BTreeSet::from([r]))
    }

    /// `{n | n >= start}`.
    pub fn from_threshold(start: u64) -> EpSet {
        EpSet::normalized(
            alloc::vec![false; start as usize],
            1,
            BTreeSet::from([0]),
        )
    }

    /// Finite set from explicit members.
    pub fn from_finite(members: &[u64]) -> EpSet {
        let n0 = members.iter().map(|&n| n + 1).max().unwrap_or(0);
        let mut prefix = alloc::vec![false; n0 as usize];
        for &n in members {
            prefix[n as usize] = true;
        }
        EpSet::normalized(prefix, 1, BTreeSet::new())
    }

    /// Builds from an eventually periodic description: explicit bits below
    /// `prefix.len()`, then residue classes modulo `period`.
    pub fn from_parts(prefix: Vec<bool>, period: u64, residues: BTreeSet<u64>) -> Result<EpSet> {
        if period == 0 {
            return Err(Error::Domain {
                op: "EpSet::from_parts",
                reason: "period must be at least one".to_string(),
            });
        }
        if residues.iter().any(|&r| r >= period) {
            return Err(Error::Domain {
                op: "EpSet::from_parts",
                reason: "residues must lie below the period".to_string(),
            });
        }
        Ok(EpSet::normalized(prefix, period, residues))
    }

    pub fn contains(&self, n: u64) -> bool {
        if (n as usize) < self.prefix.len() {
            self.prefix[n as usize]
        } else {
            self.residues.contains(&(n % self.period))
        }
    }

    pub fn threshold(&self) -> u64 {
        self.prefix.len() as u64
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    pub fn residues(&self) -> &BTreeSet<u64> {
        &self.residues
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty() && self.prefix.iter().all(|&b| !b)
    }

    pub fn is_finite(&self) -> bool {
        self.residues.is_empty()
    }

    pub fn is_infinite(&self) -> bool {
        !self.is_finite()
    }

    /// Finite complement: the tail is all-in.
    pub fn is_cofinite(&self) -> bool {
        self.period == 1 && self.residues.contains(&0)
    }

    /// Fraction of residues in one period, as `(hits, period)`.
    pub fn tail_density(&self) -> (u64, u64) {
        (self.residues.len() as u64, self.period)
    }

    pub fn complement(&self) -> EpSet {
        EpSet::normalized(
            self.prefix.iter().map(|b| !b).collect(),
            self.period,
            (0..self.period).filter(|r| !self.residues.contains(r)).collect(),
        )
    }

    fn combine(&self, other: &EpSet, f: impl Fn(bool, bool) -> bool) -> EpSet {
        let period = num_integer::lcm(self.period, other.period);
        let n0 = self.prefix.len().max(other.prefix.len());
        let prefix: Vec<bool> = (0..n0 as u64)
            .map(|n| f(self.contains(n), other.contains(n)))
            .collect();
        let base = n0 as u64;
        let residues: BTreeSet<u64> = (0..period)
            .filter(|r| {
                // Sample at the first index past both prefixes with this
                // residue; membership there is the tail behavior.
                let n = base + ((r + period - base % period) % period);
                f(self.contains(n), other.contains(n))
            })
            .collect();
        EpSet::normalized(prefix, period, residues)
    }

    pub fn union(&self, other: &EpSet) -> EpSet {
        self.combine(other, |a, b| a | b)
    }

    pub fn intersect(&self, other: &EpSet) -> EpSet {
        self.combine(other, |a, b| a & b)
    }

    pub fn minus(&self, other: &EpSet) -> EpSet {
        self.combine(other, |a, b| a & !b)
    }

    /// `{n | n + k in self}`.
    pub fn shift_down(&self, k: u64) -> EpSet {
        let n0 = (self.prefix.len() as u64).saturating_sub(k);
        let prefix: Vec<bool> = (0..n0).map(|n| self.contains(n + k)).collect();
        let residues: BTreeSet<u64> = self
            .residues
            .iter()
            .map(|r| (r + self.period - k % self.period) % self.period)
            .collect();
        EpSet::normalized(prefix, self.period, residues)
    }

    /// Members below `bound`, for sampling-style checks.
    pub fn members_below(&self, bound: u64) -> Vec<u64> {
        (0..bound).filter(|&n| self.contains(n)).collect()
    }

    pub fn subset_of(&self, other: &EpSet) -> bool {
        self.minus(other).is_empty()
    }
}

impl fmt::Display for EpSet {
    /// Canonical text form `per(m){r1,r2,...};N0=k;pre=<bits>`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "per({}){{", self.period)?;
        for (i, r) in self.residues.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, "}};N0={};pre=", self.prefix.len())?;
        for &b in &self.prefix {
            write!(f, "{}", if b { '1' } else { '0' })?;
        }
        Ok(())
    }
}

impl core::str::FromStr for EpSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<EpSet> {
        let bad = |msg: &str| Error::Parse { column: 1, message: String::from(msg) };
        let rest = s.trim().strip_prefix("per(").ok_or_else(|| bad("expected per(m)"))?;
        let (m_str, rest) = rest.split_once(')').ok_or_else(|| bad("expected `)`"))?;
        let period: u64 = m_str.parse().map_err(|_| bad("bad period"))?;
        let rest = rest.strip_prefix('{').ok_or_else(|| bad("expected `{`"))?;
        let (res_str, rest) = rest.split_once('}').ok_or_else(|| bad("expected `}`"))?;
        let mut residues = BTreeSet::new();
        for part in res_str.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            residues.insert(part.parse::<u64>().map_err(|_| bad("bad residue"))?);
        }
        let rest = rest.strip_prefix(";N0=").ok_or_else(|| bad("expected `;N0=`"))?;
        let (n0_str, bits) = rest.split_once(";pre=").ok_or_else(|| bad("expected `;pre=`"))?;
        let n0: usize = n0_str.parse().map_err(|_| bad("bad threshold"))?;
        let prefix: Vec<bool> = bits
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(bad("prefix bits must be 0 or 1")),
            })
            .collect::<Result<_>>()?;
        if prefix.len() != n0 {
            return Err(bad(&format!("expected {n0} prefix bits")));
        }
        EpSet::from_parts(prefix, period, residues)
    }
}
