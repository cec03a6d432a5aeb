//! Characters, sparse Laurent polynomials over a scaled exponent lattice,
//! rational characters, degree polytopes, the `∧•` map and cocharacter limits.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::lp;
use crate::Rat;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("lattice mismatch: {0}")]
    LatticeMismatch(String),
    #[error("axis labels must be unique, `{0}` repeats")]
    DuplicateAxis(String),
    #[error("lattice scale must be positive, got {0}")]
    BadScale(i64),
    #[error("exponent {exponent} is not representable at scale {scale}")]
    Unrepresentable { exponent: String, scale: i64 },
    #[error("degree of zero undefined")]
    DegreeOfZero,
    #[error("limit diverges along σ")]
    LimitDiverges,
    #[error("zero cocharacter")]
    ZeroCocharacter,
    #[error("∧• needs integer coefficients, found {0}")]
    NonIntegralCoefficient(String),
    #[error("∧• of a nonzero multiple of the trivial character")]
    TrivialCharacter,
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error: {0}")]
    Parse(String),
}

/// A character lattice with named axes. Stored exponents are integers in
/// units of `1/scale`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CharLattice {
    labels: Vec<String>,
    scale: i64,
}

impl CharLattice {
    pub fn new<S: Into<String>>(
        labels: impl IntoIterator<Item = S>,
        scale: i64,
    ) -> Result<Arc<Self>, AlgebraError> {
        if scale < 1 {
            return Err(AlgebraError::BadScale(scale));
        }
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(AlgebraError::DuplicateAxis(l.clone()));
            }
        }
        Ok(Arc::new(CharLattice { labels, scale }))
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn scale(&self) -> i64 {
        self.scale
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn axis(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Scaled exponent for a rational exponent, if representable.
    pub fn scaled(&self, e: &Rat) -> Result<i64, AlgebraError> {
        let v = e * Rat::from_integer(BigInt::from(self.scale));
        if !v.is_integer() {
            return Err(AlgebraError::Unrepresentable {
                exponent: e.to_string(),
                scale: self.scale,
            });
        }
        i64::try_from(v.to_integer()).map_err(|_| AlgebraError::Unrepresentable {
            exponent: e.to_string(),
            scale: self.scale,
        })
    }

    pub fn unscaled(&self, e: i64) -> Rat {
        Rat::new(BigInt::from(e), BigInt::from(self.scale))
    }
}

fn same_lattice(a: &Arc<CharLattice>, b: &Arc<CharLattice>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A single term `coeff · x^exps` with scaled exponents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial {
    pub exponents: Vec<i64>,
    pub coeff: Rat,
}

/// Sparse Laurent polynomial with exact rational coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    lattice: Arc<CharLattice>,
    terms: BTreeMap<Vec<i64>, Rat>,
}

impl LaurentPoly {
    pub fn zero(lattice: &Arc<CharLattice>) -> Self {
        LaurentPoly { lattice: lattice.clone(), terms: BTreeMap::new() }
    }

    pub fn one(lattice: &Arc<CharLattice>) -> Self {
        Self::constant(lattice, Rat::one())
    }

    pub fn constant(lattice: &Arc<CharLattice>, c: Rat) -> Self {
        Self::monomial(lattice, vec![0; lattice.rank()], c)
    }

    /// Monomial with exponents already in scaled units.
    pub fn monomial(lattice: &Arc<CharLattice>, exponents: Vec<i64>, coeff: Rat) -> Self {
        assert_eq!(exponents.len(), lattice.rank(), "exponent length");
        let mut p = Self::zero(lattice);
        if !coeff.is_zero() {
            p.terms.insert(exponents, coeff);
        }
        p
    }

    /// Monomial from integer (unscaled) exponents.
    pub fn from_int_exponents(lattice: &Arc<CharLattice>, exps: &[i64], coeff: Rat) -> Self {
        let s = lattice.scale();
        Self::monomial(lattice, exps.iter().map(|e| e * s).collect(), coeff)
    }

    /// Monomial from rational exponents.
    pub fn from_rat_exponents(
        lattice: &Arc<CharLattice>,
        exps: &[Rat],
        coeff: Rat,
    ) -> Result<Self, AlgebraError> {
        let v = exps.iter().map(|e| lattice.scaled(e)).collect::<Result<Vec<_>, _>>()?;
        Ok(Self::monomial(lattice, v, coeff))
    }

    pub fn from_terms(
        lattice: &Arc<CharLattice>,
        terms: impl IntoIterator<Item = (Vec<i64>, Rat)>,
    ) -> Self {
        let mut p = Self::zero(lattice);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Vec<i64>, c: Rat) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(e.len(), self.lattice.rank());
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn lattice(&self) -> &Arc<CharLattice> {
        &self.lattice
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &Rat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[i64]) -> Rat {
        self.terms.get(exps).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn as_monomial(&self) -> Option<Monomial> {
        if self.terms.len() != 1 {
            return None;
        }
        let (e, c) = self.terms.iter().next().unwrap();
        Some(Monomial { exponents: e.clone(), coeff: c.clone() })
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    fn check(&self, other: &Self) {
        assert!(
            same_lattice(&self.lattice, &other.lattice),
            "lattice mismatch: {:?} vs {:?}",
            self.lattice,
            other.lattice
        );
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, AlgebraError> {
        if !same_lattice(&self.lattice, &other.lattice) {
            return Err(AlgebraError::LatticeMismatch(format!(
                "{:?} vs {:?}",
                self.lattice.labels(),
                other.lattice.labels()
            )));
        }
        Ok(self + other)
    }

    pub fn scale_by(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(&self.lattice);
        }
        LaurentPoly {
            lattice: self.lattice.clone(),
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// Multiply by `x^shift` (scaled units).
    pub fn shift(&self, shift: &[i64]) -> Self {
        LaurentPoly {
            lattice: self.lattice.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, v)| (e.iter().zip(shift).map(|(a, b)| a + b).collect(), v.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(&self.lattice);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Inverse of a monomial; `None` for anything else.
    pub fn monomial_inverse(&self) -> Option<Self> {
        let m = self.as_monomial()?;
        Some(Self::monomial(
            &self.lattice,
            m.exponents.iter().map(|e| -e).collect(),
            m.coeff.recip(),
        ))
    }

    /// Apply a linear map on exponents into another lattice, summing
    /// coefficients of colliding images.
    pub fn map_exponents<F>(&self, target: &Arc<CharLattice>, f: F) -> Self
    where
        F: Fn(&[i64]) -> Vec<i64>,
    {
        let mut out = Self::zero(target);
        for (e, c) in &self.terms {
            out.add_term(f(e), c.clone());
        }
        out
    }

    /// Same labels, finer scale.
    pub fn rescale(&self, target: &Arc<CharLattice>) -> Self {
        assert_eq!(self.lattice.labels(), target.labels());
        assert_eq!(target.scale() % self.lattice.scale(), 0, "target scale must refine");
        let k = target.scale() / self.lattice.scale();
        self.map_exponents(target, |e| e.iter().map(|x| x * k).collect())
    }

    /// Set the given axis to 1 and drop it.
    pub fn specialize_axis_to_one(&self, target: &Arc<CharLattice>, axis: usize) -> Self {
        self.map_exponents(target, |e| {
            e.iter().enumerate().filter(|(i, _)| *i != axis).map(|(_, x)| *x).collect()
        })
    }

    /// Zero out the given axis (keeping it in the lattice).
    pub fn kill_axis(&self, axis: usize) -> Self {
        self.map_exponents(&self.lattice.clone(), |e| {
            let mut v = e.to_vec();
            v[axis] = 0;
            v
        })
    }

    pub fn coefficients_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    /// σ-grade range `(min, max)` of the support; `None` for zero.
    pub fn grade_range(&self, sigma: &[i64]) -> Option<(i64, i64)> {
        let mut it = self.terms.keys().map(|e| dot(e, sigma));
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), g| (lo.min(g), hi.max(g))))
    }

    fn leading_part(&self, sigma: &[i64]) -> Option<(i64, LaurentPoly)> {
        let (_, hi) = self.grade_range(sigma)?;
        let lead = LaurentPoly {
            lattice: self.lattice.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| dot(e, sigma) == hi)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        };
        Some((hi, lead))
    }

    /// Canonical text: terms sorted by exponent vector, exact fractions.
    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mono = self.monomial_text(e);
            if mono.is_empty() {
                s.push_str(&rat_text(&a));
            } else if a.is_one() {
                s.push_str(&mono);
            } else {
                s.push_str(&rat_text(&a));
                s.push('*');
                s.push_str(&mono);
            }
        }
        s
    }

    fn monomial_text(&self, e: &[i64]) -> String {
        let mut parts = Vec::new();
        for (i, &x) in e.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let r = self.lattice.unscaled(x);
            let label = &self.lattice.labels()[i];
            if r.is_one() {
                parts.push(label.clone());
            } else if r.is_integer() {
                parts.push(format!("{}^{}", label, r));
            } else {
                parts.push(format!("{}^({})", label, r));
            }
        }
        parts.join("*")
    }

    /// Parse the canonical text form back into a polynomial on `lattice`.
    pub fn parse(lattice: &Arc<CharLattice>, text: &str) -> Result<Self, AlgebraError> {
        let text = text.trim();
        if text == "0" {
            return Ok(Self::zero(lattice));
        }
        let mut out = Self::zero(lattice);
        for (sign, body) in split_terms(text)? {
            let (e, c) = parse_term(lattice, body.trim())?;
            out.add_term(e, if sign { -c } else { c });
        }
        Ok(out)
    }
}

fn split_terms(text: &str) -> Result<Vec<(bool, &str)>, AlgebraError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0usize;
    let mut neg = false;
    let mut i = 0usize;
    if bytes.first() == Some(&b'-') {
        neg = true;
        start = 1;
        i = 1;
    }
    while i < bytes.len() {
        match bytes[i] {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b'+' | b'-' if depth == 0 && i > 0 && bytes[i - 1] == b' ' => {
                let body = &text[start..i];
                if body.trim().is_empty() {
                    return Err(AlgebraError::Parse(format!("empty term in `{text}`")));
                }
                out.push((neg, body));
                neg = bytes[i] == b'-';
                start = i + 1;
            }
            _ => {}
        }
        i += 1;
    }
    let body = &text[start..];
    if body.trim().is_empty() {
        return Err(AlgebraError::Parse(format!("empty term in `{text}`")));
    }
    out.push((neg, body));
    Ok(out)
}

fn parse_rat(s: &str) -> Result<Rat, AlgebraError> {
    let s = s.trim().trim_start_matches('(').trim_end_matches(')');
    let bad = || AlgebraError::Parse(format!("bad number `{s}`"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(Rat::new(n, d))
    } else {
        let n: BigInt = s.parse().map_err(|_| bad())?;
        Ok(Rat::from_integer(n))
    }
}

fn parse_term(lattice: &Arc<CharLattice>, body: &str) -> Result<(Vec<i64>, Rat), AlgebraError> {
    let mut exps = vec![0i64; lattice.rank()];
    let mut coeff = Rat::one();
    for factor in body.split('*') {
        let factor = factor.trim();
        if factor.is_empty() {
            return Err(AlgebraError::Parse(format!("empty factor in `{body}`")));
        }
        let first = factor.chars().next().unwrap();
        if first.is_ascii_digit() || first == '(' {
            coeff *= parse_rat(factor)?;
            continue;
        }
        let (label, exp) = match factor.split_once('^') {
            Some((l, e)) => (l, parse_rat(e)?),
            None => (factor, Rat::one()),
        };
        let axis = lattice
            .axis(label)
            .ok_or_else(|| AlgebraError::Parse(format!("unknown axis `{label}`")))?;
        exps[axis] += lattice.scaled(&exp)?;
    }
    Ok((exps, coeff))
}

pub fn rat_text(r: &Rat) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub(crate) fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({})", self.to_text())
    }
}

impl<'a> Add<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.check(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.check(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.check(rhs);
        let mut out = LaurentPoly::zero(&self.lattice);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Vec<i64> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale_by(&-Rat::one())
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: LaurentPoly) -> LaurentPoly {
        &self + &rhs
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: LaurentPoly) -> LaurentPoly {
        &self - &rhs
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

/// Element of the fraction field. Equality is by cross-multiplication.
#[derive(Clone)]
pub struct RationalChar {
    pub num: LaurentPoly,
    pub den: LaurentPoly,
}

impl RationalChar {
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        num.check(&den);
        Ok(RationalChar { num, den })
    }

    pub fn from_poly(p: LaurentPoly) -> Self {
        let den = LaurentPoly::one(p.lattice());
        RationalChar { num: p, den }
    }

    pub fn zero(lattice: &Arc<CharLattice>) -> Self {
        Self::from_poly(LaurentPoly::zero(lattice))
    }

    pub fn one(lattice: &Arc<CharLattice>) -> Self {
        Self::from_poly(LaurentPoly::one(lattice))
    }

    pub fn lattice(&self) -> &Arc<CharLattice> {
        self.num.lattice()
    }

    pub fn is_one(&self) -> bool {
        *self == Self::one(self.lattice())
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Normalise a monomial denominator away; leaves other fractions alone.
    pub fn simplify_monomial_den(&self) -> Self {
        if let Some(inv) = self.den.monomial_inverse() {
            Self::from_poly(&self.num * &inv)
        } else {
            self.clone()
        }
    }

    /// The numerator as a polynomial when the denominator is a monomial.
    pub fn as_poly(&self) -> Option<LaurentPoly> {
        self.den.monomial_inverse().map(|inv| &self.num * &inv)
    }

    pub fn mul(&self, o: &Self) -> Self {
        RationalChar { num: &self.num * &o.num, den: &self.den * &o.den }
    }

    pub fn div(&self, o: &Self) -> Result<Self, AlgebraError> {
        if o.num.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(RationalChar { num: &self.num * &o.den, den: &self.den * &o.num })
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return RationalChar { num: &self.num + &o.num, den: self.den.clone() };
        }
        RationalChar {
            num: &(&self.num * &o.den) + &(&o.num * &self.den),
            den: &self.den * &o.den,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        RationalChar { num: -&self.num, den: self.den.clone() }
    }

    pub fn mul_poly(&self, p: &LaurentPoly) -> Self {
        RationalChar { num: &self.num * p, den: self.den.clone() }
    }

    pub fn map_exponents<F>(&self, target: &Arc<CharLattice>, f: F) -> Result<Self, AlgebraError>
    where
        F: Fn(&[i64]) -> Vec<i64>,
    {
        let den = self.den.map_exponents(target, &f);
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(RationalChar { num: self.num.map_exponents(target, &f), den })
    }

    /// Limit along the cocharacter `sigma` (integer vector, one entry per
    /// axis). The result is homogeneous of σ-degree zero on the same lattice.
    pub fn limit_along(&self, sigma: &[i64]) -> Result<Self, AlgebraError> {
        assert_eq!(sigma.len(), self.lattice().rank());
        if sigma.iter().all(|s| *s == 0) {
            return Err(AlgebraError::ZeroCocharacter);
        }
        let (gd, lead_den) = self.den.leading_part(sigma).ok_or(AlgebraError::DivisionByZero)?;
        let Some((gn, lead_num)) = self.num.leading_part(sigma) else {
            return Ok(Self::zero(self.lattice()));
        };
        if gn > gd {
            return Err(AlgebraError::LimitDiverges);
        }
        if gn < gd {
            return Ok(Self::zero(self.lattice()));
        }
        let (e0, _) = lead_den.terms().next().unwrap();
        let back: Vec<i64> = e0.iter().map(|x| -x).collect();
        Ok(RationalChar { num: lead_num.shift(&back), den: lead_den.shift(&back) })
    }

    /// Limit as the given axis goes to infinity (`direction = 1`) or zero
    /// (`direction = -1`), with that axis removed from the result.
    pub fn limit_along_axis(
        &self,
        axis: usize,
        direction: i64,
        residual: &Arc<CharLattice>,
    ) -> Result<Self, AlgebraError> {
        let mut sigma = vec![0; self.lattice().rank()];
        sigma[axis] = direction;
        let l = self.limit_along(&sigma)?;
        l.map_exponents(residual, |e| {
            debug_assert_eq!(e[axis], 0);
            e.iter().enumerate().filter(|(i, _)| *i != axis).map(|(_, x)| *x).collect()
        })
    }

    pub fn to_text(&self) -> String {
        if self.num.is_zero() {
            return "0".into();
        }
        if self.den.as_monomial().map(|m| m.exponents.iter().all(|e| *e == 0)).unwrap_or(false) {
            let c = self.den.as_monomial().unwrap().coeff;
            return self.num.scale_by(&c.recip()).to_text();
        }
        format!("({})/({})", self.num.to_text(), self.den.to_text())
    }
}

impl PartialEq for RationalChar {
    fn eq(&self, o: &Self) -> bool {
        &self.num * &o.den == &o.num * &self.den
    }
}

impl fmt::Debug for RationalChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalChar({})", self.to_text())
    }
}

impl fmt::Display for RationalChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// `∏_{μ≠0} (1 − x^μ)^{c_μ}`. A nonzero coefficient at μ = 0 is an error.
pub fn wedge_star(v: &LaurentPoly) -> Result<RationalChar, AlgebraError> {
    wedge_star_impl(v, false)
}

/// As [`wedge_star`] but silently drops the trivial character.
pub fn wedge_star_omitting_trivial(v: &LaurentPoly) -> Result<RationalChar, AlgebraError> {
    wedge_star_impl(v, true)
}

fn wedge_star_impl(v: &LaurentPoly, omit_trivial: bool) -> Result<RationalChar, AlgebraError> {
    let l = v.lattice();
    let one = LaurentPoly::one(l);
    let mut num = one.clone();
    let mut den = one.clone();
    for (e, c) in v.terms() {
        if !c.is_integer() {
            return Err(AlgebraError::NonIntegralCoefficient(rat_text(c)));
        }
        if e.iter().all(|x| *x == 0) {
            if omit_trivial {
                continue;
            }
            return Err(AlgebraError::TrivialCharacter);
        }
        let factor = &one - &LaurentPoly::monomial(l, e.clone(), Rat::one());
        let k: BigInt = c.to_integer();
        let n = u32::try_from(k.abs()).expect("multiplicity fits u32");
        let f = factor.pow(n);
        if k.is_positive() {
            num = &num * &f;
        } else {
            den = &den * &f;
        }
    }
    Ok(RationalChar { num, den })
}

/// Support of a polynomial projected onto a subset of axes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreePolytope {
    dim: usize,
    points: Vec<Vec<Rat>>,
}

pub fn deg_a(f: &LaurentPoly, a_axes: &[usize]) -> Result<DegreePolytope, AlgebraError> {
    if f.is_zero() {
        return Err(AlgebraError::DegreeOfZero);
    }
    let l = f.lattice();
    let mut pts: Vec<Vec<Rat>> =
        f.terms().map(|(e, _)| a_axes.iter().map(|&i| l.unscaled(e[i])).collect()).collect();
    pts.sort();
    pts.dedup();
    Ok(DegreePolytope { dim: a_axes.len(), points: pts })
}

impl DegreePolytope {
    pub fn from_points(dim: usize, mut points: Vec<Vec<Rat>>) -> Self {
        assert!(points.iter().all(|p| p.len() == dim));
        points.sort();
        points.dedup();
        DegreePolytope { dim, points }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<Rat>] {
        &self.points
    }

    pub fn translate(&self, v: &[Rat]) -> Self {
        Self::from_points(
            self.dim,
            self.points.iter().map(|p| p.iter().zip(v).map(|(a, b)| a + b).collect()).collect(),
        )
    }

    pub fn minkowski_sum(&self, o: &Self) -> Self {
        assert_eq!(self.dim, o.dim);
        let mut pts = Vec::new();
        for a in &self.points {
            for b in &o.points {
                pts.push(a.iter().zip(b).map(|(x, y)| x + y).collect());
            }
        }
        Self::from_points(self.dim, pts)
    }

    /// Whether `x` lies in the convex hull.
    pub fn hull_contains(&self, x: &[Rat]) -> bool {
        lp::max_min_weight(&self.points, x).is_some()
    }

    /// Whether `x` lies in the interior of a full-dimensional hull.
    pub fn interior_contains(&self, x: &[Rat]) -> bool {
        self.is_full_dimensional()
            && lp::max_min_weight(&self.points, x).map(|s| s.is_positive()).unwrap_or(false)
    }

    pub fn is_full_dimensional(&self) -> bool {
        if self.points.is_empty() {
            return false;
        }
        let base = &self.points[0];
        let rows: Vec<Vec<Rat>> = self.points[1..]
            .iter()
            .map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect())
            .collect();
        crate::linalg::rank_rat(&rows) == self.dim
    }

    pub fn contained_in(&self, o: &Self) -> bool {
        self.points.iter().all(|x| o.hull_contains(x))
    }

    pub fn strictly_contained_in(&self, o: &Self) -> bool {
        self.points.iter().all(|x| o.interior_contains(x))
    }

    pub fn hull_eq(&self, o: &Self) -> bool {
        self.contained_in(o) && o.contained_in(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundedness {
    StrictlyBounded,
    Bounded,
    Unbounded,
}

/// Compare `deg(F)` against `deg(G)`. Strict means every point of `F` lies
/// in the interior of the hull of `G`, which is what makes limits vanish
/// along every cocharacter.
pub fn is_bounded(
    f: &LaurentPoly,
    g: &LaurentPoly,
    a_axes: &[usize],
) -> Result<Boundedness, AlgebraError> {
    let dg = deg_a(g, a_axes)?;
    if f.is_zero() {
        return Ok(Boundedness::Bounded);
    }
    let df = deg_a(f, a_axes)?;
    Ok(if df.strictly_contained_in(&dg) {
        Boundedness::StrictlyBounded
    } else if df.contained_in(&dg) {
        Boundedness::Bounded
    } else {
        Boundedness::Unbounded
    })
}

/// `x^{1/2}` exponent helper: halves a scaled exponent vector, which must be
/// even in every entry.
pub fn half_exponents(e: &[i64]) -> Option<Vec<i64>> {
    e.iter().map(|x| if x.is_even() { Some(x / 2) } else { None }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat() -> Arc<CharLattice> {
        CharLattice::new(["t", "h"], 2).unwrap()
    }

    fn p(s: &str) -> LaurentPoly {
        LaurentPoly::parse(&lat(), s).unwrap()
    }

    #[test]
    fn wedge_examples() {
        let w = wedge_star(&p("t + h*t^-1")).unwrap();
        assert_eq!(w, RationalChar::from_poly(&(&p("1") - &p("t")) * &(&p("1") - &p("h*t^-1"))));
        assert_eq!(wedge_star(&p("0")).unwrap(), RationalChar::one(&lat()));
        let w = wedge_star(&p("2*t - h")).unwrap();
        let expect =
            RationalChar::new((&p("1") - &p("t")).pow(2), &p("1") - &p("h")).unwrap();
        assert_eq!(w, expect);
        assert_eq!(wedge_star(&p("1 + t")).unwrap_err(), AlgebraError::TrivialCharacter);
        assert_eq!(
            wedge_star_omitting_trivial(&p("3 + t")).unwrap(),
            RationalChar::from_poly(&p("1") - &p("t"))
        );
    }

    #[test]
    fn degree_examples() {
        let d = deg_a(&p("1 + t + h*t"), &[0]).unwrap();
        assert_eq!(d.points().len(), 2);
        let d = deg_a(&(&(&p("1") - &p("t")) * &(&p("1") - &p("h*t^-1"))), &[0]).unwrap();
        let ends: Vec<Rat> = d.points().iter().map(|v| v[0].clone()).collect();
        assert_eq!(ends.first().unwrap(), &Rat::from_integer((-1).into()));
        assert_eq!(ends.last().unwrap(), &Rat::from_integer(1.into()));
        assert_eq!(deg_a(&p("0"), &[0]).unwrap_err(), AlgebraError::DegreeOfZero);
    }

    #[test]
    fn boundedness() {
        assert_eq!(is_bounded(&p("1 + t"), &p("1 + t"), &[0]).unwrap(), Boundedness::Bounded);
        assert_eq!(is_bounded(&p("t^2"), &p("1 + t"), &[0]).unwrap(), Boundedness::Unbounded);
        assert_eq!(is_bounded(&p("0"), &p("1 + t"), &[0]).unwrap(), Boundedness::Bounded);
        // a boundary point is contained but not interior
        assert_eq!(is_bounded(&p("1"), &p("1 + t"), &[0]).unwrap(), Boundedness::Bounded);
        assert_eq!(
            is_bounded(&p("t"), &p("t^-1 + t^2"), &[0]).unwrap(),
            Boundedness::StrictlyBounded
        );
    }

    #[test]
    fn limits() {
        let up = [2, 0];
        let q = RationalChar::new(&p("1") - &p("t*h"), &p("1") - &p("t")).unwrap();
        assert_eq!(q.limit_along(&up).unwrap(), RationalChar::from_poly(p("h")));
        let q = RationalChar::new(&p("1") - &p("t^-1"), &p("1") - &p("t")).unwrap();
        assert!(q.limit_along(&up).unwrap().is_zero());
        let q = RationalChar::new(&p("1") - &p("h"), &p("1") - &p("h")).unwrap();
        assert_eq!(q.limit_along(&up).unwrap(), RationalChar::one(&lat()));
        let q = RationalChar::new(p("t^2"), &p("1") - &p("t")).unwrap();
        assert_eq!(q.limit_along(&up).unwrap_err(), AlgebraError::LimitDiverges);
        let res = CharLattice::new(["h"], 2).unwrap();
        let q = RationalChar::new(&p("1") - &p("t*h"), &p("1") - &p("t")).unwrap();
        let l = q.limit_along_axis(0, 1, &res).unwrap();
        assert_eq!(l, RationalChar::from_poly(LaurentPoly::parse(&res, "h").unwrap()));
    }

    #[test]
    fn text_round_trip() {
        for s in ["0", "1", "-t", "1/2 - 3*t^(1/2)*h^-1 + h^2", "-2/3*t^(-3/2)"] {
            let f = p(s);
            assert_eq!(LaurentPoly::parse(&lat(), &f.to_text()).unwrap(), f);
        }
        assert_eq!(p("1 - t").to_text(), "1 - t");
    }
}
