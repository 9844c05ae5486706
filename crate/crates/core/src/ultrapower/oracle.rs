//! Lazily-consistent free-filter fragment over the eventually periodic set
//! algebra.
//!
//! No global free ultrafilter is constructed (that needs choice); instead
//! the oracle answers "dominant?" queries one at a time, committing just
//! enough to stay consistent: the committed sets always have infinite
//! intersection (the finite-intersection property), so every answer is
//! consistent with some free ultrafilter extending the fragment. Finite
//! sets are never dominant, cofinite sets always are, and a pluggable
//! strategy resolves the genuinely free choices, which makes
//! ultrafilter-dependence observable.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};

use super::epset::EpSet;

/// Commitment policy for queries neither forced nor refuted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Commit the queried set.
    PreferIn,
    /// Commit the complement.
    PreferOut,
    /// Keep the even numbers large: commit whichever side retains
    /// infinitely many evens inside the current intersection.
    EvensFirst,
    /// Same with the odd numbers.
    OddsFirst,
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::PreferIn => "prefer-in",
            Strategy::PreferOut => "prefer-out",
            Strategy::EvensFirst => "evens-first",
            Strategy::OddsFirst => "odds-first",
        }
    }

    pub fn all() -> [Strategy; 4] {
        [Strategy::PreferIn, Strategy::PreferOut, Strategy::EvensFirst, Strategy::OddsFirst]
    }
}

/// One answered query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogEntry {
    pub query: EpSet,
    pub dominant: bool,
}

/// Stateful dominance oracle. Queries may commit; answers are deterministic
/// given the strategy and the query history, and repeated queries answer
/// identically. Mutation requires `&mut`, which serializes access.
#[derive(Debug, Clone)]
pub struct FilterOracle {
    strategy: Strategy,
    committed: Vec<EpSet>,
    meet: EpSet,
    log: Vec<LogEntry>,
}

impl FilterOracle {
    pub fn new(strategy: Strategy) -> FilterOracle {
        FilterOracle {
            strategy,
            committed: Vec::new(),
            meet: EpSet::full(),
            log: Vec::new(),
        }
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    /// Decides whether `s` is dominant, committing if necessary.
    pub fn dominant(&mut self, s: &EpSet) -> bool {
        let verdict = self.decide(s);
        self.log.push(LogEntry { query: s.clone(), dominant: verdict });
        verdict
    }

    fn decide(&mut self, s: &EpSet) -> bool {
        if s.is_finite() {
            return false;
        }
        if s.is_cofinite() {
            return true;
        }
        // Forced by earlier commitments: the filter generated by the
        // committed sets contains every superset of the meet modulo a
        // finite correction.
        if self.meet.minus(s).is_finite() {
            return true;
        }
        if self.meet.intersect(s).is_finite() {
            return false;
        }
        let take = match self.strategy {
            Strategy::PreferIn => true,
            Strategy::PreferOut => false,
            Strategy::EvensFirst => {
                self.meet.intersect(s).intersect(&EpSet::evens()).is_infinite()
            }
            Strategy::OddsFirst => {
                self.meet.intersect(s).intersect(&EpSet::odds()).is_infinite()
            }
        };
        let chosen = if take { s.clone() } else { s.complement() };
        self.meet = self.meet.intersect(&chosen);
        debug_assert!(self.meet.is_infinite(), "commitments must keep an infinite core");
        self.committed.push(chosen);
        take
    }

    /// Sets committed so far, in commitment order.
    pub fn committed(&self) -> &[EpSet] {
        &self.committed
    }

    /// Intersection of all committed sets; infinite at all times.
    pub fn meet(&self) -> &EpSet {
        &self.meet
    }

    pub fn log(&self) -> &[LogEntry] {
        &self.log
    }

    /// Session log in the replayable line format
    /// `Q <EpSet canonical form> -> dominant|rejected`.
    pub fn log_lines(&self) -> String {
        let mut out = String::new();
        for entry in &self.log {
            out.push_str("Q ");
            out.push_str(&entry.query.to_string());
            out.push_str(" -> ");
            out.push_str(if entry.dominant { "dominant" } else { "rejected" });
            out.push('\n');
        }
        out
    }

    /// Parses a session log produced by [`FilterOracle::log_lines`].
    pub fn parse_log(text: &str) -> Result<Vec<LogEntry>> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| Error::Parse {
                column: 1,
                message: format!("log line {}: {msg}", i + 1),
            };
            let rest = line.strip_prefix("Q ").ok_or_else(|| bad("expected `Q `"))?;
            let (set_str, verdict_str) =
                rest.rsplit_once(" -> ").ok_or_else(|| bad("expected ` -> `"))?;
            let dominant = match verdict_str.trim() {
                "dominant" => true,
                "rejected" => false,
                _ => return Err(bad("verdict must be dominant or rejected")),
            };
            entries.push(LogEntry { query: set_str.trim().parse()?, dominant });
        }
        Ok(entries)
    }

    /// Replays a log against a fresh oracle with the given strategy and
    /// checks that every verdict reproduces (the determinism audit).
    pub fn replay_matches(strategy: Strategy, entries: &[LogEntry]) -> bool {
        let mut fresh = FilterOracle::new(strategy);
        entries
            .iter()
            .all(|entry| fresh.dominant(&entry.query) == entry.dominant)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_and_cofinite_are_decided() {
        for strategy in Strategy::all() {
            let mut o = FilterOracle::new(strategy);
            assert!(!o.dominant(&EpSet::empty()));
            assert!(!o.dominant(&EpSet::from_finite(&[1, 2, 3])));
            assert!(o.dominant(&EpSet::from_threshold(7)));
            assert!(o.dominant(&EpSet::full()));
            // nothing was committed for those
            assert!(o.committed().is_empty());
        }
    }

    #[test]
    fn complement_dichotomy() {
        let mut o = FilterOracle::new(Strategy::PreferIn);
        assert!(o.dominant(&EpSet::evens()));
        assert!(!o.dominant(&EpSet::odds()));

        let mut o = FilterOracle::new(Strategy::PreferOut);
        assert!(!o.dominant(&EpSet::evens()));
        // forced: the complement is already committed
        assert!(o.dominant(&EpSet::odds()));
    }

    #[test]
    fn strategies_split_the_alternating_set() {
        let mut evens_first = FilterOracle::new(Strategy::EvensFirst);
        assert!(evens_first.dominant(&EpSet::evens()));
        let mut odds_first = FilterOracle::new(Strategy::OddsFirst);
        assert!(!odds_first.dominant(&EpSet::evens()));
    }

    #[test]
    fn repeated_queries_are_stable() {
        for strategy in Strategy::all() {
            let mut o = FilterOracle::new(strategy);
            let s = EpSet::residue_class(3, 1);
            let first = o.dominant(&s);
            for _ in 0..3 {
                assert_eq!(o.dominant(&s), first);
            }
            assert!(o.meet().is_infinite());
        }
    }

    #[test]
    fn log_round_trip_and_replay() {
        let mut o = FilterOracle::new(Strategy::EvensFirst);
        o.dominant(&EpSet::evens());
        o.dominant(&EpSet::residue_class(4, 0));
        o.dominant(&EpSet::from_finite(&[9]));
        let text = o.log_lines();
        let entries = FilterOracle::parse_log(&text).unwrap();
        assert_eq!(entries.len(), 3);
        assert!(FilterOracle::replay_matches(Strategy::EvensFirst, &entries));
    }

    #[test]
    fn thin_dominant_chain() {
        // Halving the density again and again keeps everything dominant:
        // multiples of 2, then 4, then 8 ... the meet stays infinite while
        // the committed sets get arbitrarily thin.
        let mut o = FilterOracle::new(Strategy::PreferIn);
        let mut previous_density = 1.0f64;
        for k in 1..=6 {
            let s = EpSet::residue_class(1 << k, 0);
            assert!(o.dominant(&s));
            let (hits, period) = s.tail_density();
            let density = hits as f64 / period as f64;
            assert!(density < previous_density);
            previous_density = density;
        }
        assert!(o.meet().is_infinite());
        assert_eq!(o.meet(), &EpSet::residue_class(64, 0));
    }
}
