//! Generalized power sums `c + sum_i a_i (n+1)^(-q_i)`: the symbolic Cauchy
//! sequences of the ultrapower sandbox.
//!
//! The class is closed under ring operations, every sequence converges to
//! its constant term, and the sign of a difference is eventually constant
//! with a computable exact threshold. Early indices are decided exactly as
//! well, through a radical decomposition: this is what turns equality and
//! order index-sets into honest eventually periodic sets.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Pow, ToPrimitive, Zero};

use crate::rational::Rational;

/// `constant + sum_i alpha_i * (n+1)^(-q_i)` with `alpha_i != 0`,
/// `q_i > 0` strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PowerSum {
    constant: Rational,
    terms: Vec<(Rational, Rational)>,
}

/// Exact sign behavior of a power sum over all indices, as maximal runs:
/// `runs[k] = (start, sign)` says the sign holds from `start` up to the
/// next run's start; the last run extends forever.
#[derive(Debug, Clone, PartialEq)]
pub struct SignRuns {
    pub runs: Vec<(u64, i32)>,
}

impl SignRuns {
    pub fn sign_at(&self, n: u64) -> i32 {
        let idx = self.runs.partition_point(|(start, _)| *start <= n);
        self.runs[idx - 1].1
    }

    /// The sign that holds from the last run on.
    pub fn eventual(&self) -> i32 {
        self.runs.last().expect("runs are nonempty").1
    }

    /// Start of the final (infinite) run.
    pub fn stable_from(&self) -> u64 {
        self.runs.last().expect("runs are nonempty").0
    }
}

impl PowerSum {
    pub fn new(constant: Rational, terms: Vec<(Rational, Rational)>) -> PowerSum {
        let mut merged: BTreeMap<Rational, Rational> = BTreeMap::new();
        for (alpha, q) in terms {
            assert!(q.is_positive(), "power-sum exponents must be positive");
            let slot = merged.entry(q).or_insert_with(Rational::zero);
            *slot = &*slot + &alpha;
        }
        PowerSum {
            constant,
            terms: merged
                .into_iter()
                .filter(|(_, alpha)| !alpha.is_zero())
                .map(|(q, alpha)| (alpha, q))
                .collect(),
        }
    }

    pub fn constant(c: Rational) -> PowerSum {
        PowerSum { constant: c, terms: Vec::new() }
    }

    pub fn zero() -> PowerSum {
        Self::constant(Rational::zero())
    }

    /// `alpha * (n+1)^(-q)`.
    pub fn reciprocal_power(alpha: Rational, q: Rational) -> PowerSum {
        PowerSum::new(Rational::zero(), alloc::vec![(alpha, q)])
    }

    /// The limit: power terms vanish, the constant remains.
    pub fn limit(&self) -> &Rational {
        &self.constant
    }

    pub fn terms(&self) -> &[(Rational, Rational)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &PowerSum) -> PowerSum {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        PowerSum::new(&self.constant + &other.constant, terms)
    }

    pub fn neg(&self) -> PowerSum {
        PowerSum {
            constant: -&self.constant,
            terms: self.terms.iter().map(|(a, q)| (-a, q.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &PowerSum) -> PowerSum {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &PowerSum) -> PowerSum {
        let mut terms: Vec<(Rational, Rational)> = Vec::new();
        for (a, q) in &other.terms {
            terms.push((&self.constant * a, q.clone()));
        }
        for (a, q) in &self.terms {
            terms.push((a * &other.constant, q.clone()));
        }
        for (a1, q1) in &self.terms {
            for (a2, q2) in &other.terms {
                terms.push((a1 * a2, q1 + q2));
            }
        }
        PowerSum::new(&self.constant * &other.constant, terms)
    }

    pub fn scale(&self, factor: &Rational) -> PowerSum {
        if factor.is_zero() {
            return PowerSum::zero();
        }
        PowerSum {
            constant: &self.constant * factor,
            terms: self.terms.iter().map(|(a, q)| (a * factor, q.clone())).collect(),
        }
    }

    /// Double-precision value at index `n`.
    pub fn value_f64(&self, n: u64) -> f64 {
        let t = (n + 1) as f64;
        let mut acc = self.constant.to_f64();
        for (a, q) in &self.terms {
            acc += a.to_f64() * num_traits::Float::powf(t, -q.to_f64());
        }
        acc
    }

    /// Exact value at index `n` whenever every `(n+1)^(q_i)` is rational.
    pub fn value_exact(&self, n: u64) -> Option<Rational> {
        let t = Rational::from_int((n + 1) as i64);
        let mut acc = self.constant.clone();
        for (a, q) in &self.terms {
            let p = t.pow_rational_exact(q)?;
            acc = acc + a * &p.recip();
        }
        Some(acc)
    }

    /// Sign constant from some index on: the slowest-decaying term (or the
    /// constant) dominates. Returns `(sign, from)` with the bound exact.
    /// The index can be astronomically large for close exponents, hence
    /// the big-integer return.
    pub fn eventual_sign_big(&self) -> (i32, BigInt) {
        if self.terms.is_empty() {
            return (self.constant.signum(), BigInt::zero());
        }
        if !self.constant.is_zero() {
            let magnitude_sum = self
                .terms
                .iter()
                .fold(Rational::zero(), |acc, (a, _)| acc + a.abs());
            let bound = magnitude_sum / self.constant.abs();
            let from = min_index_power_exceeds(&self.terms[0].1, &bound);
            return (self.constant.signum(), from);
        }
        let (lead, q1) = &self.terms[0];
        if self.terms.len() == 1 {
            return (lead.signum(), BigInt::zero());
        }
        let tail_sum = self.terms[1..]
            .iter()
            .fold(Rational::zero(), |acc, (a, _)| acc + a.abs());
        let gap = &self.terms[1].1 - q1;
        let from = min_index_power_exceeds(&gap, &(tail_sum / lead.abs()));
        (lead.signum(), from)
    }

    /// [`PowerSum::eventual_sign_big`] for callers that keep magnitudes
    /// small enough for machine indices.
    pub fn eventual_sign(&self) -> (i32, u64) {
        let (sign, from) = self.eventual_sign_big();
        (sign, from.to_u64().expect("stabilization index fits u64"))
    }

    /// Exact sign at one index.
    pub fn sign_at(&self, n: u64) -> i32 {
        if let Some(v) = self.value_exact(n) {
            return v.signum();
        }
        self.sign_at_algebraic(n)
    }

    /// Exact sign-run decomposition over all indices. Sign changes happen
    /// only at real roots of the polynomial `S(s) = c s^M + sum a_i
    /// s^(M - m_i)` in `s = (n+1)^(1/L)`, so the runs are found by Sturm
    /// root isolation plus a handful of exact single-index signs, never by
    /// scanning an index range.
    pub fn sign_runs(&self) -> SignRuns {
        if self.terms.is_empty() {
            return SignRuns { runs: alloc::vec![(0, self.constant.signum())] };
        }
        let level = crate::rational::denominator_lcm(self.terms.iter().map(|(_, q)| q))
            .to_u64()
            .expect("exponent denominators fit u64");
        let level_rat = Rational::from_int(level as i64);
        let exps: Vec<u64> = self
            .terms
            .iter()
            .map(|(_, q)| {
                (q * &level_rat)
                    .numer()
                    .to_u64()
                    .expect("scaled exponent fits u64")
            })
            .collect();
        let m_max = *exps.iter().max().expect("terms nonempty") as usize;
        let mut dense = alloc::vec![Rational::zero(); m_max + 1];
        dense[m_max] = self.constant.clone();
        for ((a, _), m) in self.terms.iter().zip(exps.iter()) {
            let slot = m_max - *m as usize;
            dense[slot] = &dense[slot] + a;
        }
        let poly = sturm::trim(dense);
        if poly.len() <= 1 {
            // Constant polynomial: a single never-changing sign.
            let sign = poly.first().map(Rational::signum).unwrap_or(0);
            return SignRuns { runs: alloc::vec![(0, sign)] };
        }
        let chain = sturm::chain(&poly);
        let hi = sturm::root_bound(&poly);
        let lo = sturm::non_root_point(&poly, &Rational::new(1, 2), &Rational::one());
        let isolated = sturm::isolate(&chain, &poly, lo, hi);

        // Map each isolating s-interval to its window of integer t = n+1
        // (those t with a < t^(1/L) <= b), refined until at most one
        // integer remains.
        let pow_floor = |x: &Rational| -> BigInt { x.pow_i64(level as i64).floor_big() };
        let mut windows: Vec<BigInt> = Vec::new(); // the affected integers t
        for (mut a, mut b) in isolated {
            loop {
                let t_lo = pow_floor(&a);
                let t_hi = pow_floor(&b);
                let span = &t_hi - &t_lo;
                if span <= BigInt::one() {
                    if span == BigInt::one() && t_hi >= BigInt::one() {
                        windows.push(t_hi);
                    }
                    break;
                }
                let mid = sturm::non_root_point(&poly, &a, &b);
                if sturm::count(&chain, &a, &mid) >= 1 {
                    b = mid;
                } else {
                    a = mid;
                }
            }
        }
        windows.sort();
        windows.dedup();

        // Assemble runs: constant sign between windows, exact sign at each
        // windowed index.
        // TODO: lift run starts to BigInt if a caller ever needs sign
        // changes past u64 indices; the Cauchy root bound keeps realistic
        // sequences far below that.
        let mut runs: Vec<(u64, i32)> = Vec::new();
        let mut cursor = BigInt::one(); // t = n+1
        let push = |runs: &mut Vec<(u64, i32)>, t_start: &BigInt, sign: i32| {
            let n = (t_start - 1u32).to_u64().expect("run start fits u64");
            match runs.last() {
                Some((_, s)) if *s == sign => {}
                _ => runs.push((n, sign)),
            }
        };
        for t in windows {
            if t < cursor {
                continue;
            }
            if t > cursor {
                let gap_sign = self.sign_at((&cursor - 1u32).to_u64().expect("fits"));
                push(&mut runs, &cursor, gap_sign);
            }
            let here = self.sign_at((&t - 1u32).to_u64().expect("fits"));
            push(&mut runs, &t, here);
            cursor = t + 1u32;
        }
        let tail_sign = self.sign_at((&cursor - 1u32).to_u64().expect("fits"));
        push(&mut runs, &cursor, tail_sign);
        if runs.first().map(|(start, _)| *start) != Some(0) {
            // Degenerate: ensure coverage from zero.
            runs.insert(0, (0, self.sign_at(0)));
        }
        SignRuns { runs }
    }

    /// Sign at an index where some power is irrational. Writes the value as
    /// `sum_r g_r b^r` with `b = W^(-1/L')` and rational `g_r`; the powers
    /// `1, b, .., b^(L'-1)` are linearly independent over the rationals, so
    /// the value is zero only if every `g_r` is, and otherwise rational
    /// interval refinement of `b` settles the sign.
    fn sign_at_algebraic(&self, n: u64) -> i32 {
        let level = crate::rational::denominator_lcm(self.terms.iter().map(|(_, q)| q))
            .to_u64()
            .expect("exponent denominators fit u64");
        let (w, e) = perfect_power(n + 1);
        let g = num_integer::gcd(e as u64, level);
        let e_red = (e as u64) / g;
        let l_red = level / g;
        debug_assert!(l_red > 1, "rational case handled by value_exact");
        let w_big = BigInt::from(w);
        let big_w = Pow::pow(&w_big, e_red as u32);
        // value = sum_r g_r * b^r,  b = big_w^(-1/l_red)
        let mut groups: Vec<Rational> = alloc::vec![Rational::zero(); l_red as usize];
        groups[0] = self.constant.clone();
        for (a, q) in &self.terms {
            // (n+1)^(-q) = b^m with m = q * level an integer.
            let m_rat = q * &Rational::from_big(BigInt::from(level), BigInt::one());
            debug_assert!(m_rat.is_integer());
            let m = m_rat.numer().to_u64().expect("term exponent fits u64");
            let r = (m % l_red) as usize;
            let d = m / l_red;
            // b^m = b^r * (1/W)^d
            let w_pow = Rational::from_big(Pow::pow(&big_w, d as u32), BigInt::one());
            groups[r] = &groups[r] + &(a / &w_pow);
        }
        if groups.iter().all(Rational::is_zero) {
            return 0;
        }
        // Interval refinement of b.
        for precision in [8u32, 16, 32, 64, 128, 256, 512] {
            let scale = Pow::pow(&BigInt::from(2), precision * l_red as u32);
            let y = (&big_w * &scale).nth_root(l_red as u32);
            let two_k = Rational::from_big(Pow::pow(&BigInt::from(2), precision), BigInt::one());
            // W^(1/L') lies in [y, y+1] / 2^k, so b lies in the reciprocal.
            let root_lo = Rational::from_big(y.clone(), BigInt::one()) / two_k.clone();
            let root_hi = Rational::from_big(y + BigInt::one(), BigInt::one()) / two_k;
            let b_lo = root_hi.recip();
            let b_hi = root_lo.recip();
            let mut sum_lo = Rational::zero();
            let mut sum_hi = Rational::zero();
            let mut pow_lo = Rational::one();
            let mut pow_hi = Rational::one();
            for g_r in &groups {
                if g_r.is_positive() {
                    sum_lo = sum_lo + g_r * &pow_lo;
                    sum_hi = sum_hi + g_r * &pow_hi;
                } else {
                    sum_lo = sum_lo + g_r * &pow_hi;
                    sum_hi = sum_hi + g_r * &pow_lo;
                }
                pow_lo = pow_lo * b_lo.clone();
                pow_hi = pow_hi * b_hi.clone();
            }
            if sum_lo.is_positive() {
                return 1;
            }
            if sum_hi.is_negative() {
                return -1;
            }
        }
        unreachable!("nonzero algebraic value must separate from zero")
    }
}

/// Smallest `n` with `(n+1)^exp > bound` (`exp > 0`).
fn min_index_power_exceeds(exp: &Rational, bound: &Rational) -> BigInt {
    if !bound.is_positive() {
        return BigInt::zero();
    }
    let p = exp.numer().to_u32().expect("exponent numerator fits u32");
    let r = exp.denom().to_u32().expect("exponent denominator fits u32");
    // t^p > bound^r for integer t = n+1.
    let rhs = bound.pow_i64(r as i64);
    let (a, b) = (rhs.numer().clone(), rhs.denom().clone());
    let mut t = BigInt::from(1).max((&a / &b).nth_root(p));
    while Pow::pow(&t, p) * &b <= a {
        t += 1;
    }
    while t > BigInt::one() && Pow::pow(&(&t - 1u32), p) * &b > a {
        t -= 1;
    }
    t - 1u32
}

/// Sturm-sequence machinery over dense rational polynomials, used to
/// isolate the sign changes of a power sum.
mod sturm {
    use alloc::vec::Vec;

    use crate::rational::Rational;

    pub type Dense = Vec<Rational>;

    pub fn trim(mut p: Dense) -> Dense {
        while p.last().is_some_and(Rational::is_zero) {
            p.pop();
        }
        p
    }

    pub fn eval(p: &[Rational], x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in p.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    fn derivative(p: &[Rational]) -> Dense {
        trim(
            p.iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * &Rational::from_int(k as i64))
                .collect(),
        )
    }

    /// Remainder of `a` divided by `b` (`b` nonzero).
    fn remainder(a: &[Rational], b: &[Rational]) -> Dense {
        let mut r: Dense = a.to_vec();
        let b_deg = b.len() - 1;
        let b_lead = b.last().expect("nonzero divisor");
        while r.len() > b_deg {
            let r_deg = r.len() - 1;
            let factor = r.last().expect("trimmed") / b_lead;
            let shift = r_deg - b_deg;
            for (k, c) in b.iter().enumerate() {
                r[k + shift] = &r[k + shift] - &(c * &factor);
            }
            r = trim(r);
            if r.is_empty() {
                break;
            }
        }
        r
    }

    /// The Sturm chain `p, p', -rem(...), ...`.
    pub fn chain(p: &Dense) -> Vec<Dense> {
        let mut out = alloc::vec![p.clone(), derivative(p)];
        loop {
            let last = &out[out.len() - 1];
            if last.is_empty() {
                out.pop();
                break;
            }
            if last.len() == 1 {
                break;
            }
            let prev = &out[out.len() - 2];
            let rem: Dense = remainder(prev, last).iter().map(|c| -c).collect();
            if rem.is_empty() {
                break;
            }
            out.push(rem);
        }
        out
    }

    fn variations(chain: &[Dense], x: &Rational) -> usize {
        let mut count = 0;
        let mut last_sign = 0;
        for p in chain {
            let s = eval(p, x).signum();
            if s == 0 {
                continue;
            }
            if last_sign != 0 && s != last_sign {
                count += 1;
            }
            last_sign = s;
        }
        count
    }

    /// Number of distinct real roots in `(a, b]` (`a`, `b` non-roots).
    pub fn count(chain: &[Dense], a: &Rational, b: &Rational) -> i64 {
        variations(chain, a) as i64 - variations(chain, b) as i64
    }

    /// Strict upper bound on every real root (Cauchy bound).
    pub fn root_bound(p: &Dense) -> Rational {
        let lead = p.last().expect("nonconstant").abs();
        let mut max_ratio = Rational::zero();
        for c in &p[..p.len() - 1] {
            let ratio = c.abs() / lead.clone();
            if ratio > max_ratio {
                max_ratio = ratio;
            }
        }
        (Rational::one() + max_ratio).max(Rational::from_int(2))
    }

    /// A point strictly inside `(a, b)` where `p` does not vanish.
    pub fn non_root_point(p: &Dense, a: &Rational, b: &Rational) -> Rational {
        let width = b - a;
        for k in 2..(p.len() as i64 + 4) {
            let candidate = a + &(&width / &Rational::from_int(k));
            if !eval(p, &candidate).is_zero() {
                return candidate;
            }
        }
        unreachable!("a polynomial has finitely many roots")
    }

    /// Isolating intervals `(a, b]` each containing exactly one distinct
    /// real root of `p` in `(lo, hi]`.
    pub fn isolate(
        chain: &[Dense],
        p: &Dense,
        lo: Rational,
        hi: Rational,
    ) -> Vec<(Rational, Rational)> {
        let mut out = Vec::new();
        let total = count(chain, &lo, &hi);
        split(chain, p, lo, hi, total, &mut out);
        out
    }

    fn split(
        chain: &[Dense],
        p: &Dense,
        lo: Rational,
        hi: Rational,
        roots: i64,
        out: &mut Vec<(Rational, Rational)>,
    ) {
        if roots <= 0 {
            return;
        }
        if roots == 1 {
            out.push((lo, hi));
            return;
        }
        let mid = non_root_point(p, &lo, &hi);
        let left = count(chain, &lo, &mid);
        split(chain, p, lo, mid.clone(), left, out);
        split(chain, p, mid, hi, roots - left, out);
    }
}

/// Maximal-exponent decomposition `t = w^e` (`t >= 1`).
fn perfect_power(t: u64) -> (u64, u32) {
    if t <= 1 {
        return (t, 1);
    }
    for e in (2..=t.ilog2().max(1)).rev() {
        let w = BigInt::from(t).nth_root(e);
        if Pow::pow(&w, e) == BigInt::from(t) {
            let (w_inner, e_inner) = perfect_power(w.to_u64().expect("root fits"));
            return (w_inner, e_inner * e);
        }
    }
    (t, 1)
}
