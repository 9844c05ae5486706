//! Exact arithmetic for two infinitesimal-enriched refinements of the reals.
//!
//! Cantor completes the rationals by collapsing every null Cauchy sequence to
//! zero. This crate implements two ways of refining that collapse so null
//! sequences survive as honest infinitesimals:
//!
//! * [`fermat`] — the ring of Fermat reals: a standard part plus a canonical
//!   sorted list of nilpotent infinitesimal terms `c·dt_w` with rational
//!   orders. Comes with decision procedures for nilpotency, products of
//!   powers, and the total order, all in exact rational arithmetic.
//! * [`smooth`] — expression trees for smooth functions, symbolic
//!   differentiation, and the extension of smooth maps to Fermat reals via
//!   the truncated Taylor formula (a fractional-order forward-mode
//!   differentiation engine).
//! * [`sets`] — finite unions of open rational intervals, their extensions,
//!   and executable intuitionistic transfer (propositional connectives and
//!   quantifier projections over open rectangle relations).
//! * [`ultrapower`] — symbolic Cauchy sequences (piecewise generalized power
//!   sums over eventually periodic index partitions) quotiented by a lazily
//!   extended free-filter fragment, with the transfer theorems runnable.
//!
//! The crate is `no_std`-compatible (requires `alloc`); disable default
//! features and enable `libm` for float math without the standard library.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod error;
pub mod fermat;
pub mod rational;
pub mod sets;
pub mod smooth;
pub mod ultrapower;

pub use error::Error;
pub use fermat::{FermatReal, PowerProduct, SampleBase, Term};
pub use rational::{Mode, Rational, Scalar};
pub use smooth::{Expr, TaylorData};
