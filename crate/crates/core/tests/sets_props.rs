//! Transfer suite for open-set extensions: the propositional preservation
//! laws with boundary-stressing sampling, and the quantifier projections
//! against exact pointwise brute force.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use continuum::fermat::FermatReal;
use continuum::rational::{Rational, Scalar};
use continuum::sets::{Endpoint, Interval, OpenRelation, OpenSet, Rect};
use continuum::ultrapower::RealSet;

fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

const ENDPOINT_POOL: [(i64, i64); 11] = [
    (-3, 1),
    (-2, 1),
    (-3, 2),
    (-1, 1),
    (-1, 2),
    (0, 1),
    (1, 2),
    (1, 1),
    (3, 2),
    (2, 1),
    (3, 1),
];

fn pool_point(r: &mut StdRng) -> Rational {
    let (n, d) = ENDPOINT_POOL[r.random_range(0..ENDPOINT_POOL.len())];
    Rational::new(n, d)
}

fn random_open_set(r: &mut StdRng) -> OpenSet {
    let n = r.random_range(0..=3usize);
    let mut intervals = Vec::new();
    for _ in 0..n {
        let a = pool_point(r);
        let b = pool_point(r);
        if a == b {
            continue;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let lo_ep = if r.random_range(0..8) == 0 { Endpoint::NegInf } else { Endpoint::Finite(lo) };
        let hi_ep = if r.random_range(0..8) == 0 { Endpoint::PosInf } else { Endpoint::Finite(hi) };
        if let Ok(iv) = Interval::new(lo_ep, hi_ep) {
            intervals.push(iv);
        }
    }
    OpenSet::from_intervals(intervals)
}

/// Standard parts that stress boundaries: every finite endpoint, nudged
/// copies of it, and uniform pool rationals.
fn sample_points(sets: &[&OpenSet], r: &mut StdRng) -> Vec<Rational> {
    let mut points = Vec::new();
    let nudges = [
        Rational::zero(),
        Rational::new(1, 7),
        Rational::new(-1, 7),
        Rational::new(1, 100),
        Rational::new(-1, 100),
    ];
    for set in sets {
        for iv in set.intervals() {
            for ep in [iv.lo(), iv.hi()] {
                if let Endpoint::Finite(p) = ep {
                    for nudge in &nudges {
                        points.push(p + nudge);
                    }
                }
            }
        }
    }
    for _ in 0..5 {
        points.push(pool_point(r));
    }
    points
}

const ORDER_POOL: [(i64, i64); 4] = [(1, 1), (3, 2), (2, 1), (3, 1)];

/// Dresses a standard part with 0..=3 random infinitesimal terms.
fn dress(st: Rational, r: &mut StdRng) -> FermatReal {
    let n = r.random_range(0..=3usize);
    let mut picks: Vec<usize> = (0..ORDER_POOL.len()).collect();
    let mut terms = Vec::new();
    for _ in 0..n {
        let i = r.random_range(0..picks.len());
        let (p, q) = ORDER_POOL[picks.swap_remove(i)];
        let coef = Rational::new(r.random_range(1i64..=5) * if r.random_range(0..2) == 0 { 1 } else { -1 }, 2);
        terms.push((Scalar::Exact(coef), Rational::new(p, q)));
    }
    FermatReal::from_parts(Scalar::Exact(st), terms).unwrap()
}

/// Independent closure-membership test: `p` inside or on the boundary of
/// some interval.
fn in_closure(set: &OpenSet, p: &Rational) -> bool {
    set.intervals().iter().any(|iv| {
        let lo_ok = match iv.lo() {
            Endpoint::NegInf => true,
            Endpoint::Finite(a) => a <= p,
            Endpoint::PosInf => false,
        };
        let hi_ok = match iv.hi() {
            Endpoint::NegInf => false,
            Endpoint::Finite(b) => p <= b,
            Endpoint::PosInf => true,
        };
        lo_ok && hi_ok
    })
}

#[test]
fn propositional_transfer_items_one_to_three() {
    let mut r = rng(31);
    let mut trials = 0;
    while trials < 500 {
        let a = random_open_set(&mut r);
        let b = random_open_set(&mut r);
        let union = a.union(&b);
        let meet = a.intersect(&b);
        let diff = a.int_diff(&b);
        for st in sample_points(&[&a, &b], &mut r) {
            let x = dress(st.clone(), &mut r);
            // item 1: ext(A u B) = extA u extB
            assert_eq!(
                union.member_ext(&x),
                a.member_ext(&x) || b.member_ext(&x)
            );
            // item 2: same for intersections
            assert_eq!(
                meet.member_ext(&x),
                a.member_ext(&x) && b.member_ext(&x)
            );
            // item 3: interior difference is a standard-part test against
            // A minus the closure of B (independent oracle).
            assert_eq!(
                diff.member_ext(&x),
                a.contains(&st) && !in_closure(&b, &st)
            );
            trials += 1;
        }
    }
}

#[test]
fn propositional_transfer_items_four_to_six() {
    let mut r = rng(32);
    for _ in 0..500 {
        let a = random_open_set(&mut r);
        let b = random_open_set(&mut r);
        // Witness-complete samples: endpoints (nudged), interior midpoints
        // of both interior differences, and random points.
        let mut points = sample_points(&[&a, &b], &mut r);
        for set in [a.int_diff(&b), b.int_diff(&a)] {
            for iv in set.intervals() {
                if let (Endpoint::Finite(lo), Endpoint::Finite(hi)) = (iv.lo(), iv.hi()) {
                    points.push((lo + hi) / Rational::from_int(2));
                }
            }
        }
        let implication = points.iter().all(|p| {
            let x = dress(p.clone(), &mut r);
            !a.member_ext(&x) || b.member_ext(&x)
        });
        // item 4: inclusion transfers exactly
        assert_eq!(a.subset_of(&b), implication, "A = {a}, B = {b}");
        // item 6: extensionality via canonical forms
        let ext_equal = points.iter().all(|p| {
            let x = dress(p.clone(), &mut r);
            a.member_ext(&x) == b.member_ext(&x)
        });
        assert_eq!(a == b, ext_equal, "A = {a}, B = {b}");
        // item 5: nothing is a member of ext(empty)
        let empty = OpenSet::empty();
        assert!(points.iter().all(|p| !empty.member_ext(&dress(p.clone(), &mut r))));
    }
}

fn random_relation(r: &mut StdRng, a: &OpenSet, b: &OpenSet) -> Option<OpenRelation> {
    let mut rects = Vec::new();
    for _ in 0..r.random_range(1..=3usize) {
        let ax = a.intervals().get(r.random_range(0..a.intervals().len().max(1)))?;
        let by = b.intervals().get(r.random_range(0..b.intervals().len().max(1)))?;
        // Shrink into a random sub-rectangle so boundaries differ from A x B.
        let sub = |iv: &Interval, rr: &mut StdRng| -> Interval {
            if let (Endpoint::Finite(lo), Endpoint::Finite(hi)) = (iv.lo(), iv.hi()) {
                let span = hi - lo;
                let cut = Rational::new(rr.random_range(0i64..=2), 8);
                let lo2 = lo + &(&span * &cut);
                let hi2 = hi - &(&span * &cut);
                Interval::open(lo2, hi2).unwrap_or_else(|_| iv.clone())
            } else {
                iv.clone()
            }
        };
        rects.push(Rect { x: sub(ax, r), y: sub(by, r) });
    }
    OpenRelation::new(rects, a, b).ok()
}

fn open_to_real(set: &OpenSet) -> RealSet {
    use continuum::ultrapower::{Lower, RealInterval, Upper};
    RealSet::from_intervals(
        set.intervals()
            .iter()
            .map(|iv| RealInterval {
                lo: match iv.lo() {
                    Endpoint::NegInf => Lower::NegInf,
                    Endpoint::Finite(v) => Lower::At(v.clone(), false),
                    Endpoint::PosInf => unreachable!("lower bound"),
                },
                hi: match iv.hi() {
                    Endpoint::PosInf => Upper::PosInf,
                    Endpoint::Finite(v) => Upper::At(v.clone(), false),
                    Endpoint::NegInf => unreachable!("upper bound"),
                },
            })
            .collect(),
    )
}

/// A rational point inside a nonempty flagged-interval set.
fn pick_point(set: &RealSet) -> Option<Rational> {
    use continuum::ultrapower::{Lower, Upper};
    let iv = set.intervals().first()?;
    Some(match (&iv.lo, &iv.hi) {
        (Lower::At(a, true), _) => a.clone(),
        (Lower::At(a, false), Upper::At(b, _)) => (a + b) / Rational::from_int(2),
        (Lower::At(a, false), Upper::PosInf) => a + &Rational::one(),
        (Lower::NegInf, Upper::At(b, _)) => b - &Rational::one(),
        (Lower::NegInf, Upper::PosInf) => Rational::zero(),
    })
}

/// `{b in B | (a, b) in C}` as an exact flagged-interval set.
fn y_slice(c: &OpenRelation, b: &OpenSet, a: &Rational) -> RealSet {
    let mut acc = RealSet::empty();
    for rect in c.rects() {
        if rect.x.contains(a) {
            acc = acc.union(&open_to_real(&OpenSet::from_intervals(vec![rect.y.clone()])));
        }
    }
    acc.intersect(&open_to_real(b))
}

#[test]
fn existential_projection_matches_membership() {
    let mut r = rng(33);
    let mut instances = 0;
    while instances < 200 {
        let a = random_open_set(&mut r);
        let b = random_open_set(&mut r);
        if a.is_empty() || b.is_empty() {
            continue;
        }
        let Some(c) = random_relation(&mut r, &a, &b) else { continue };
        let exists = c.project_exists();
        for st in sample_points(&[&a, &b], &mut r) {
            let x = dress(st.clone(), &mut r);
            // exists-witness: some rational y pairs with st x in C, exactly
            // when the slice is nonempty.
            let slice = y_slice(&c, &b, &st);
            assert_eq!(exists.member_ext(&x), !slice.is_empty(), "C = {:?}", c.rects());
            if let Some(y) = pick_point(&slice) {
                assert!(c.contains(&st, &y));
                assert!(b.contains(&y));
            }
        }
        instances += 1;
    }
}

#[test]
fn universal_projection_matches_pointwise_brute_force() {
    let mut r = rng(34);
    let mut instances = 0;
    while instances < 100 {
        let a = random_open_set(&mut r);
        let b = random_open_set(&mut r);
        if a.is_empty() || b.is_empty() {
            continue;
        }
        let Some(c) = random_relation(&mut r, &a, &b) else { continue };
        let forall = c.project_forall(&a, &b);
        let b_real = open_to_real(&b);
        for st in sample_points(&[&a, &b, &forall], &mut r) {
            // Brute force, exactly: a qualifies iff it lies in A and no b
            // in B escapes the slice.
            let brute = a.contains(&st) && b_real.difference(&y_slice(&c, &b, &st)).is_empty();
            assert_eq!(
                forall.contains(&st),
                brute,
                "a = {st}, A = {a}, B = {b}, C = {:?}",
                c.rects()
            );
        }
        instances += 1;
    }
}
