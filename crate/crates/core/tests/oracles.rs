//! Values computed independently of the library and frozen here.

use std::collections::BTreeMap;

use hypertoric::data::arrangements::tp2;
use hypertoric::kirwan::{Polarization, Space};
use hypertoric::lattice::{CharLattice, LaurentPoly};
use hypertoric::loops::xi_positive_loops;
use hypertoric::qseries::theta_expand;
use hypertoric::stab::{build_stab, Slope};
use hypertoric::{int, rat};

/// Series in `q` with coefficients in `x^{1/2}`: `(q exponent, half x exponent) → coeff`.
type Naive = BTreeMap<(i64, i64), i64>;

fn naive_mul(a: &Naive, b: &Naive, order: i64) -> Naive {
    let mut out = Naive::new();
    for ((qa, xa), ca) in a {
        for ((qb, xb), cb) in b {
            if qa + qb <= order {
                *out.entry((qa + qb, xa + xb)).or_insert(0) += ca * cb;
            }
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

fn binomial(q: i64, x_half: i64) -> Naive {
    Naive::from([((0, 0), 1), ((q, x_half), -1)])
}

fn naive_theta(order: i64) -> Naive {
    let mut acc = Naive::from([((0, 1), 1), ((0, -1), -1)]);
    for n in 1..=order {
        acc = naive_mul(&acc, &binomial(n, 2), order);
        acc = naive_mul(&acc, &binomial(n, -2), order);
    }
    acc
}

fn to_naive(s: &hypertoric::qseries::QSeries) -> Naive {
    let mut out = Naive::new();
    for (q, c) in s.coeffs() {
        for (e, v) in c.terms() {
            out.insert((*q, e[0]), v.to_integer().try_into().unwrap());
        }
    }
    out
}

#[test]
fn theta_matches_naive_product() {
    let l = CharLattice::new(["x"], 2).unwrap();
    let x = LaurentPoly::monomial(&l, vec![2], int(1));
    for order in 1..=5 {
        assert_eq!(to_naive(&theta_expand(&x, order).unwrap()), naive_theta(order), "order {order}");
    }
}

#[test]
fn positive_loops_match_shifted_theta() {
    // (1 − x) ∏ (1 − qᵏx)(1 − qᵏ/x) = −x^{1/2} ϑ(x), with x = u1·v1
    let order = 4;
    let lhs = to_naive_two(&xi_positive_loops(1, order, order).unwrap());
    let rhs = naive_mul(&naive_theta(order), &Naive::from([((0, 1), -1)]), order);
    assert_eq!(lhs, rhs);
}

/// Collapse `u1^a v1^a` to `x^a` for the single-coordinate case.
fn to_naive_two(s: &hypertoric::qseries::QSeries) -> Naive {
    let mut out = Naive::new();
    for (q, c) in s.coeffs() {
        for (e, v) in c.terms() {
            assert_eq!(e[0], e[1]);
            out.insert((*q, e[0]), v.to_integer().try_into().unwrap());
        }
    }
    out
}

#[test]
fn tp2_opposite_envelopes() {
    let sp = Space::new(tp2(), "t");
    let slope = Slope(vec![rat(1, 7), rat(2, 7), rat(2, 7)]);
    let s = build_stab(&sp, &[1, 2], Polarization::Opposite, &slope).unwrap();
    let l = &sp.lattice;
    let p = |t: &str| LaurentPoly::parse(l, t).unwrap();
    let m = |a: &str, b: &str| &p(a) * &p(b);
    let idx = |b: &[usize]| sp.point_index(b).unwrap();
    let (p01, p02, p12) = (idx(&[0, 1]), idx(&[0, 2]), idx(&[1, 2]));

    assert_eq!(s.values[p01][p01], &m("t1*h - 1", "t2*h - 1") * &p("t1^-1*t2^-1*h^-1"));
    assert_eq!(s.values[p01][p02], &m("h - 1", "t1*h - t2") * &p("t1^-1*t2^(-1/2)*h^-1"));
    assert_eq!(s.values[p01][p12], &m("h - 1", "t1 - t2*h") * &p("-t1^(-1/2)*t2^-1*h^-1"));

    assert!(s.values[p12][p01].is_zero());
    assert_eq!(s.values[p12][p02], &m("h - 1", "t2 - 1") * &p("-t1^(1/2)*t2^(-1/2)*h^(-1/2)"));
    assert_eq!(s.values[p12][p12], &m("t1 - 1", "t1 - t2*h") * &p("t2^-1*h^(-1/2)"));

    assert!(s.values[p02][p01].is_zero() && s.values[p02][p12].is_zero());
    assert_eq!(s.values[p02][p02], &m("t1 - t2", "t2 - 1") * &p("-t1^-1"));
}
