//! Truncated power series in `q` with Laurent polynomial coefficients.
//!
//! Exponents of `q` are stored in units of `1/q_scale` and may be negative.
//! `order` is the largest exponent that is known exactly; every product
//! tracks its own precision from the operands' valuations.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::lattice::{half_exponents, rat_text, AlgebraError, CharLattice, LaurentPoly};
use crate::Rat;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("truncation order must be at least 1, got {0}")]
    BadOrder(i64),
    #[error("theta argument must be a monomial with coefficient 1, got {0}")]
    NotUnitMonomial(String),
    #[error("x^(1/2) is not representable for {0}; raise the lattice scale")]
    NoSquareRoot(String),
    #[error("q-scales differ: {0} vs {1}")]
    ScaleMismatch(i64, i64),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Clone, PartialEq, Eq)]
pub struct QSeries {
    lattice: Arc<CharLattice>,
    q_scale: i64,
    order: i64,
    coeffs: BTreeMap<i64, LaurentPoly>,
}

impl QSeries {
    /// The zero series known through `q^(order/q_scale)`.
    pub fn zero(lattice: &Arc<CharLattice>, q_scale: i64, order: i64) -> Self {
        assert!(q_scale >= 1);
        QSeries { lattice: lattice.clone(), q_scale, order, coeffs: BTreeMap::new() }
    }

    pub fn constant(p: LaurentPoly, q_scale: i64, order: i64) -> Self {
        let mut s = Self::zero(p.lattice(), q_scale, order);
        if order >= 0 {
            s.insert(0, p);
        }
        s
    }

    /// `c · q^{e}` with `e` in scaled units.
    pub fn monomial(p: LaurentPoly, q_exp: i64, q_scale: i64, order: i64) -> Self {
        let mut s = Self::zero(p.lattice(), q_scale, order);
        if q_exp <= order {
            s.insert(q_exp, p);
        }
        s
    }

    fn insert(&mut self, e: i64, p: LaurentPoly) {
        if e > self.order || p.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(e).or_insert_with(|| LaurentPoly::zero(&self.lattice));
        *entry = &*entry + &p;
        if entry.is_zero() {
            self.coeffs.remove(&e);
        }
    }

    pub fn lattice(&self) -> &Arc<CharLattice> {
        &self.lattice
    }

    pub fn q_scale(&self) -> i64 {
        self.q_scale
    }

    /// Precision in scaled units.
    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn order_rat(&self) -> Rat {
        Rat::new(self.order.into(), self.q_scale.into())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, e: i64) -> LaurentPoly {
        self.coeffs.get(&e).cloned().unwrap_or_else(|| LaurentPoly::zero(&self.lattice))
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&i64, &LaurentPoly)> {
        self.coeffs.iter()
    }

    pub fn valuation(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn truncate(&self, order: i64) -> Self {
        let order = order.min(self.order);
        QSeries {
            lattice: self.lattice.clone(),
            q_scale: self.q_scale,
            order,
            coeffs: self.coeffs.range(..=order).map(|(k, v)| (*k, v.clone())).collect(),
        }
    }

    fn check(&self, o: &Self) -> Result<(), SeriesError> {
        if self.q_scale != o.q_scale {
            return Err(SeriesError::ScaleMismatch(self.q_scale, o.q_scale));
        }
        if *self.lattice != *o.lattice {
            return Err(AlgebraError::LatticeMismatch(format!(
                "{:?} vs {:?}",
                self.lattice.labels(),
                o.lattice.labels()
            ))
            .into());
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self, SeriesError> {
        self.check(o)?;
        let mut out = Self::zero(&self.lattice, self.q_scale, self.order.min(o.order));
        for (e, c) in self.coeffs.iter().chain(o.coeffs.iter()) {
            out.insert(*e, c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        QSeries {
            lattice: self.lattice.clone(),
            q_scale: self.q_scale,
            order: self.order,
            coeffs: self.coeffs.iter().map(|(k, v)| (*k, -v)).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Result<Self, SeriesError> {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Result<Self, SeriesError> {
        self.check(o)?;
        let va = self.valuation().unwrap_or(self.order);
        let vb = o.valuation().unwrap_or(o.order);
        let order = (self.order + vb).min(o.order + va);
        let mut out = Self::zero(&self.lattice, self.q_scale, order);
        for (ea, ca) in &self.coeffs {
            for (eb, cb) in &o.coeffs {
                if ea + eb <= order {
                    out.insert(ea + eb, ca * cb);
                }
            }
        }
        Ok(out)
    }

    /// Multiply by `q^{q_exp} · p` (scaled q units).
    pub fn scale(&self, p: &LaurentPoly, q_exp: i64) -> Self {
        let mut out = Self::zero(&self.lattice, self.q_scale, self.order + q_exp);
        for (e, c) in &self.coeffs {
            out.insert(e + q_exp, c * p);
        }
        out
    }

    /// Apply a map to every coefficient (e.g. a lattice homomorphism).
    pub fn map_coeffs<F>(&self, target: &Arc<CharLattice>, f: F) -> Self
    where
        F: Fn(&LaurentPoly) -> LaurentPoly,
    {
        let mut out = Self::zero(target, self.q_scale, self.order);
        for (e, c) in &self.coeffs {
            out.insert(*e, f(c));
        }
        out
    }

    pub fn with_q_scale(&self, q_scale: i64) -> Self {
        assert_eq!(q_scale % self.q_scale, 0);
        let k = q_scale / self.q_scale;
        QSeries {
            lattice: self.lattice.clone(),
            q_scale,
            order: self.order * k,
            coeffs: self.coeffs.iter().map(|(e, c)| (e * k, c.clone())).collect(),
        }
    }

    /// Coefficient-wise equality through the smaller of the two orders and
    /// `limit`. Returns the first exponent that differs.
    pub fn first_difference(&self, o: &Self, limit: i64) -> Option<i64> {
        let upto = self.order.min(o.order).min(limit);
        let keys: std::collections::BTreeSet<i64> =
            self.coeffs.keys().chain(o.coeffs.keys()).copied().filter(|k| *k <= upto).collect();
        keys.into_iter().find(|k| self.coeff(*k) != o.coeff(*k))
    }

    pub fn agrees_with(&self, o: &Self) -> bool {
        self.first_difference(o, i64::MAX).is_none()
    }

    pub fn to_text(&self) -> String {
        let mut parts = Vec::new();
        for (e, c) in &self.coeffs {
            let ct = c.to_text();
            let ct = if c.len() > 1 { format!("({ct})") } else { ct };
            let qe = Rat::new((*e).into(), self.q_scale.into());
            let qpart = if qe.is_zero() {
                String::new()
            } else if qe.is_one() {
                "q".to_string()
            } else if qe.is_integer() {
                format!("q^{}", rat_text(&qe))
            } else {
                format!("q^({})", rat_text(&qe))
            };
            parts.push(match (qpart.is_empty(), ct.as_str()) {
                (true, _) => ct,
                (false, "1") => qpart,
                (false, _) => format!("{ct}*{qpart}"),
            });
        }
        let next = Rat::new((self.order + 1).into(), self.q_scale.into());
        let big_o = if next.is_integer() {
            format!("O(q^{})", rat_text(&next))
        } else {
            format!("O(q^({}))", rat_text(&next))
        };
        parts.push(big_o);
        parts.join(" + ")
    }
}

impl fmt::Debug for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QSeries({})", self.to_text())
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn unit_monomial(x: &LaurentPoly) -> Result<Vec<i64>, SeriesError> {
    match x.as_monomial() {
        Some(m) if m.coeff.is_one() => Ok(m.exponents),
        _ => Err(SeriesError::NotUnitMonomial(x.to_text())),
    }
}

/// `ϑ(x) = (x^{1/2} − x^{−1/2}) ∏_{n≥1} (1 − qⁿx)(1 − qⁿ/x)` through `q^order`.
pub fn theta_expand(x: &LaurentPoly, order: i64) -> Result<QSeries, SeriesError> {
    theta_expand_shifted(x, 0, 1, order)
}

/// `ϑ(q^{a} x)` with `a = shift/q_scale`, through `q^order`.
pub fn theta_expand_shifted(
    x: &LaurentPoly,
    shift: i64,
    q_scale: i64,
    order: i64,
) -> Result<QSeries, SeriesError> {
    if order < 1 {
        return Err(SeriesError::BadOrder(order));
    }
    let lat = x.lattice().clone();
    let ex = unit_monomial(x)?;
    let half = half_exponents(&ex).ok_or_else(|| SeriesError::NoSquareRoot(x.to_text()))?;
    if shift % 2 != 0 {
        return Err(SeriesError::NoSquareRoot(format!("q^({shift}/{q_scale})")));
    }
    let target = order * q_scale;
    let inv: Vec<i64> = ex.iter().map(|v| -v).collect();
    let neg_half: Vec<i64> = half.iter().map(|v| -v).collect();
    let mono = |e: &[i64], c: i64| LaurentPoly::monomial(&lat, e.to_vec(), Rat::from_integer(c.into()));
    let one = LaurentPoly::one(&lat);
    let work = target + 2 * shift.abs() + 2 * q_scale;

    let mut acc = QSeries::constant(mono(&half, 1), q_scale, work).scale(&one, shift / 2);
    acc = acc.add(&QSeries::monomial(mono(&neg_half, -1), -shift / 2, q_scale, work - shift.abs()))?;
    let mut n = 1i64;
    loop {
        let e1 = n * q_scale + shift;
        let e2 = n * q_scale - shift;
        let v = acc.valuation().unwrap_or(acc.order);
        if e1.min(e2) + v > target && e1.min(e2) > 0 {
            break;
        }
        for (e, m) in [(e1, &ex), (e2, &inv)] {
            let mut f = QSeries::constant(one.clone(), q_scale, work);
            f = f.add(&QSeries::monomial(mono(m, -1), e, q_scale, work))?;
            acc = acc.mul(&f)?;
        }
        n += 1;
    }
    let out = acc.truncate(target);
    debug_assert!(out.order() >= target);
    Ok(QSeries { order: target, ..out })
}

/// Compares `ϑ(qx)` with `−q^{−1/2} x⁻¹ ϑ(x)` through `q^{order−1}`.
/// Returns the first differing exponent (in units of `q^{1/2}`), if any.
pub fn theta_automorphy_defect(x: &LaurentPoly, order: i64) -> Result<Option<i64>, SeriesError> {
    let lhs = theta_expand_shifted(x, 2, 2, order)?;
    let inv = x.monomial_inverse().ok_or_else(|| SeriesError::NotUnitMonomial(x.to_text()))?;
    let rhs = theta_expand(x, order)?.with_q_scale(2).scale(&-&inv, -1);
    Ok(lhs.first_difference(&rhs, 2 * (order - 1)))
}

/// Constant-term-free check helper: `1 + 0·q + ...` test.
pub fn is_one(s: &QSeries) -> bool {
    s.coeffs.len() == 1 && s.coeff(0) == LaurentPoly::one(&s.lattice)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::int;

    fn lat() -> Arc<CharLattice> {
        CharLattice::new(["t"], 2).unwrap()
    }

    fn p(s: &str) -> LaurentPoly {
        LaurentPoly::parse(&lat(), s).unwrap()
    }

    #[test]
    fn truncated_products() {
        let a = QSeries::constant(p("1"), 1, 1).add(&QSeries::monomial(p("t"), 1, 1, 1)).unwrap();
        let b = QSeries::constant(p("1"), 1, 1).add(&QSeries::monomial(p("-t"), 1, 1, 1)).unwrap();
        assert!(is_one(&a.mul(&b).unwrap()));
        let a2 = QSeries::constant(p("1"), 1, 2).add(&QSeries::monomial(p("t"), 1, 1, 2)).unwrap();
        let sq = a2.mul(&a2).unwrap();
        assert_eq!(sq.coeff(1), p("2*t"));
        assert_eq!(sq.coeff(2), p("t^2"));
        let one = QSeries::constant(p("1"), 1, 2);
        assert_eq!(a2.mul(&one).unwrap(), a2);
    }

    #[test]
    fn theta_low_order() {
        let th = theta_expand(&p("t"), 1).unwrap();
        assert_eq!(th.coeff(0), p("t^(1/2) - t^(-1/2)"));
        assert_eq!(th.coeff(1), p("-t^(3/2) + t^(1/2) - t^(-1/2) + t^(-3/2)"));
        assert_eq!(th.order(), 1);
        assert!(theta_expand(&p("t"), 0).is_err());
        assert!(theta_expand(&p("2*t"), 1).is_err());
        assert!(theta_expand(&p("1"), 3).unwrap().is_zero());
        let _ = int(0);
    }

    #[test]
    fn automorphy() {
        for x in ["t", "t^-1", "t^3", "t^-2"] {
            assert_eq!(theta_automorphy_defect(&p(x), 4).unwrap(), None, "{x}");
        }
    }

    #[test]
    fn text_form() {
        let th = theta_expand(&p("t"), 1).unwrap();
        assert_eq!(
            th.to_text(),
            "(-t^(-1/2) + t^(1/2)) + (t^(-3/2) - t^(-1/2) + t^(1/2) - t^(3/2))*q + O(q^2)"
        );
    }
}
