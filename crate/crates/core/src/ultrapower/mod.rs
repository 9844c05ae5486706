//! Desk-scale ultrapower sandbox: symbolic Cauchy sequences quotiented by a
//! lazily-built free-filter oracle, with the transfer theorems runnable.
//!
//! The sequence universe is the class of piecewise generalized power sums
//! over eventually periodic index partitions: the smallest class closed
//! under ring operations that contains the classic example sequences,
//! keeps equality/order/membership index sets decidable, and has computable
//! limits. Dominance is decided by a [`FilterOracle`], whose strategy makes
//! the ultrafilter-dependence of verdicts observable.

mod epset;
mod frac;
mod hyper;
mod oracle;
mod powersum;
mod realset;
mod seq;

pub use epset::EpSet;
pub use frac::HyperFrac;
pub use hyper::{
    hyper_eq, hyper_le, hyper_lt, is_infinitesimal_hyper, pair_membership_set,
    pseudo_distance_hyper, relation_cod, relation_dom, star_apply_poly, star_exists_witness,
    star_in_dom, star_member, star_pair_member, st_hyper, Hyper, Poly,
};
pub use oracle::{FilterOracle, LogEntry, Strategy};
pub use powersum::{PowerSum, SignRuns};
pub use realset::{parse_real_interval, Lower, RealInterval, RealSet, Upper};
pub use seq::SeqExpr;
