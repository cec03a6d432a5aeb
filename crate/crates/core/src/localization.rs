//! Fixed-point localization sums, the factor analysis of `ξ/∧•T^{1/2}` in
//! the limit `t → ∞`, and the intertwiner check.
//!
//! Localization summands have denominators that are products of binomials
//! `1 − x^μ`. [`Fraction`] keeps them factored so sums only need the least
//! common multiple of their denominators.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::data::dot;
use crate::kirwan::Polarization;
use crate::lattice::{is_bounded, AlgebraError, Boundedness, CharLattice, LaurentPoly, RationalChar};
use crate::stab::{build_stab, Slope, StabError, StabMatrix};
use crate::xi::{xi_restriction, DualPair, SubspaceSpec};
use crate::Rat;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum LocalizationError {
    #[error("non-isolated or convention breach: denominator factor {0} vanishes")]
    ZeroDenominator(String),
    #[error("class has a non-integral coefficient")]
    NonIntegral,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Stab(#[from] StabError),
    #[error("no fixed points")]
    Empty,
}

/// `num / ∏_μ (1 − x^μ)^{m_μ}` with each `μ` normalised so its first nonzero
/// entry is positive.
#[derive(Debug, Clone)]
pub struct Fraction {
    pub num: LaurentPoly,
    pub den: BTreeMap<Vec<i64>, u32>,
}

fn canonical(mu: &[i64]) -> bool {
    mu.iter().find(|x| **x != 0).map(|x| *x > 0).unwrap_or(false)
}

fn binomial(lat: &Arc<CharLattice>, mu: &[i64]) -> LaurentPoly {
    &LaurentPoly::one(lat) - &LaurentPoly::monomial(lat, mu.to_vec(), Rat::one())
}

impl Fraction {
    pub fn poly(num: LaurentPoly) -> Self {
        Fraction { num, den: BTreeMap::new() }
    }

    pub fn lattice(&self) -> &Arc<CharLattice> {
        self.num.lattice()
    }

    /// Divide by the binomial `1 − x^μ` (scaled exponents), `power` times.
    pub fn divide_binomial(&mut self, mu: &[i64], power: u32) -> Result<(), LocalizationError> {
        if power == 0 {
            return Ok(());
        }
        if mu.iter().all(|x| *x == 0) {
            return Err(LocalizationError::ZeroDenominator("1 - 1".into()));
        }
        let lat = self.lattice().clone();
        if canonical(mu) {
            *self.den.entry(mu.to_vec()).or_insert(0) += power;
        } else {
            // 1/(1 − x^μ) = −x^{−μ} / (1 − x^{−μ})
            let neg: Vec<i64> = mu.iter().map(|x| -x).collect();
            let m = LaurentPoly::monomial(&lat, neg.clone(), -Rat::one());
            self.num = &self.num * &m.pow(power);
            *self.den.entry(neg).or_insert(0) += power;
        }
        Ok(())
    }

    /// `num / ∧•(class)`, omitting trivial characters.
    pub fn over_wedge(num: LaurentPoly, class: &LaurentPoly) -> Result<Self, LocalizationError> {
        let mut f = Fraction::poly(num);
        for (mu, c) in class.terms() {
            if !c.is_integer() {
                return Err(LocalizationError::NonIntegral);
            }
            if mu.iter().all(|x| *x == 0) {
                continue;
            }
            let k: i64 = c.to_integer().try_into().expect("small multiplicity");
            if k > 0 {
                f.divide_binomial(mu, k as u32)?;
            } else {
                let b = binomial(f.lattice(), mu);
                f.num = &f.num * &b.pow((-k) as u32);
            }
        }
        Ok(f)
    }

    pub fn den_poly(&self) -> LaurentPoly {
        let lat = self.lattice().clone();
        self.den.iter().fold(LaurentPoly::one(&lat), |acc, (mu, m)| &acc * &binomial(&lat, mu).pow(*m))
    }

    pub fn to_rational(&self) -> RationalChar {
        RationalChar::new(self.num.clone(), self.den_poly()).expect("nonzero denominator")
    }

    /// Push forward along a linear map of exponent vectors.
    pub fn map<F>(&self, target: &Arc<CharLattice>, f: F) -> Result<Self, LocalizationError>
    where
        F: Fn(&[i64]) -> Vec<i64>,
    {
        let mut out = Fraction::poly(self.num.map_exponents(target, &f));
        for (mu, m) in &self.den {
            let image = f(mu);
            if image.iter().all(|x| *x == 0) {
                return Err(LocalizationError::ZeroDenominator(format!("1 - x^{mu:?}")));
            }
            out.divide_binomial(&image, *m)?;
        }
        Ok(out)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Fraction::poly(&self.num * &o.num);
        out.den = self.den.clone();
        for (mu, m) in &o.den {
            *out.den.entry(mu.clone()).or_insert(0) += m;
        }
        out
    }
}

/// Sum of fractions over the least common multiple of their denominators.
pub fn euler_sum(summands: &[Fraction]) -> RationalChar {
    let lat = summands.first().expect("at least one summand").lattice().clone();
    let mut lcm: BTreeMap<Vec<i64>, u32> = BTreeMap::new();
    for s in summands {
        for (mu, m) in &s.den {
            let e = lcm.entry(mu.clone()).or_insert(0);
            *e = (*e).max(*m);
        }
    }
    let mut powers: BTreeMap<(Vec<i64>, u32), LaurentPoly> = BTreeMap::new();
    let mut power = |mu: &Vec<i64>, k: u32| -> LaurentPoly {
        powers.entry((mu.clone(), k)).or_insert_with(|| binomial(&lat, mu).pow(k)).clone()
    };
    let mut num = LaurentPoly::zero(&lat);
    for s in summands {
        if s.num.is_zero() {
            continue;
        }
        let mut term = s.num.clone();
        for (mu, m) in &lcm {
            let have = s.den.get(mu).copied().unwrap_or(0);
            if *m > have {
                term = &term * &power(mu, m - have);
            }
        }
        num = &num + &term;
    }
    let mut den = LaurentPoly::one(&lat);
    for (mu, m) in &lcm {
        den = &den * &power(mu, *m);
    }
    RationalChar::new(num, den).expect("nonzero denominator")
}

/// `⟨A, B⟩ = Σ_x A|_x B|_x / ∧•T_x`.
pub fn euler_pairing(
    a: &[LaurentPoly],
    b: &[LaurentPoly],
    tangents: &[LaurentPoly],
) -> Result<RationalChar, LocalizationError> {
    if a.is_empty() {
        return Err(LocalizationError::Empty);
    }
    let summands = a
        .iter()
        .zip(b)
        .zip(tangents)
        .map(|((x, y), t)| Fraction::over_wedge(x * y, t))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(euler_sum(&summands))
}

/// The cocharacter used to collapse `𝔸 × G^∨` to a single axis `t`:
/// `μ ↦ ⟨μ_𝔸, zeta⟩ + ⟨μ_{G^∨}, dual⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Specialization {
    pub zeta: Vec<i64>,
    pub dual: Vec<i64>,
}

impl Specialization {
    /// `ζ × η`, the direction along which the off-diagonal limits vanish.
    pub fn standard(pair: &DualPair) -> Self {
        Specialization { zeta: pair.zeta().to_vec(), dual: pair.eta().to_vec() }
    }

    /// `ζ × η⁻¹`.
    pub fn inverse_dual(pair: &DualPair) -> Self {
        Specialization { zeta: pair.zeta().to_vec(), dual: pair.eta().iter().map(|x| -x).collect() }
    }

    pub fn target(scale: i64) -> Arc<CharLattice> {
        CharLattice::new(["t", "h"], scale).expect("labels")
    }

    pub fn apply(&self, pair: &DualPair, mu: &[i64]) -> Vec<i64> {
        let r = pair.r();
        let k = pair.k();
        vec![dot(&mu[..r], &self.zeta) + dot(&mu[r..r + k], &self.dual), mu[r + k]]
    }

    pub fn fraction(&self, pair: &DualPair, f: &Fraction) -> Result<Fraction, LocalizationError> {
        let target = Self::target(pair.joint.scale());
        f.map(&target, |mu| self.apply(pair, mu))
    }
}

/// Limit `t → ∞` of a function of `(t, h)`, returned on the `h` lattice.
pub fn limit_t(q: &RationalChar) -> Result<RationalChar, AlgebraError> {
    let scale = q.lattice().scale();
    let hl = CharLattice::new(["h"], scale).expect("labels");
    q.limit_along_axis(0, 1, &hl)
}

pub fn hbar_lattice(scale: i64) -> Arc<CharLattice> {
    CharLattice::new(["h"], scale).expect("labels")
}

/// `(ℏ/(1−ℏ))^a · (ℏ⁻¹/(1−ℏ⁻¹))^b` on the `h` lattice.
pub fn closed_form(scale: i64, a: usize, b: usize) -> RationalChar {
    let l = hbar_lattice(scale);
    let h = LaurentPoly::monomial(&l, vec![scale], Rat::one());
    let hi = LaurentPoly::monomial(&l, vec![-scale], Rat::one());
    let one = LaurentPoly::one(&l);
    let f1 = RationalChar::new(h.clone(), &one - &h).unwrap();
    let f2 = RationalChar::new(hi.clone(), &one - &hi).unwrap();
    let mut out = RationalChar::one(&l);
    for _ in 0..a {
        out = out.mul(&f1);
    }
    for _ in 0..b {
        out = out.mul(&f2);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorType {
    /// `e ∈ b_p ∩ b_q^c`
    First,
    /// `e ∈ b_p ∩ b_q`
    Second,
    /// `e ∈ b_p^c ∩ b_q^c`
    Third,
    /// `e ∈ b_p^c ∩ b_q`
    Last,
}

#[derive(Debug, Clone)]
pub struct TaggedFactor {
    pub e: usize,
    pub kind: FactorType,
    /// `(1 − ab) / ((1 − a)(1 − b))` on the `(t, h)` lattice, trivial
    /// denominator factors omitted.
    pub value: Fraction,
    /// The limit the factor analysis predicts for this factor.
    pub predicted: RationalChar,
}

/// Factors of `ξ_{p×q^!} / (∧•T^{1/2}_p ⊗ ∧•T^{1/2}_{q^!})` along `spec`.
pub fn pneqq_factors(pair: &DualPair, p: usize, q: usize, spec: &Specialization) -> Result<Vec<TaggedFactor>, LocalizationError> {
    let target = Specialization::target(pair.joint.scale());
    let s = pair.joint.scale();
    let hl = hbar_lattice(s);
    let bp = &pair.x.points[p];
    let bq = &pair.x.points[q];
    let mut out = Vec::new();
    for e in 0..pair.x.n() {
        let kind = match (bp.contains(e), bq.contains(e)) {
            (true, false) => FactorType::First,
            (true, true) => FactorType::Second,
            (false, false) => FactorType::Third,
            (false, true) => FactorType::Last,
        };
        let a: Vec<i64> = spec.apply(pair, &pair.u(p, e)).into_iter().map(|x| x * s).collect();
        let b: Vec<i64> = spec.apply(pair, &pair.u_dual(q, e)).into_iter().map(|x| x * s).collect();
        let ab: Vec<i64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let mut f = Fraction::poly(binomial(&target, &ab));
        for w in [&a, &b] {
            if w.iter().any(|x| *x != 0) {
                f.divide_binomial(w, 1)?;
            }
        }
        // the factor analysis: first → 0, second/third → 1 or ℏ^{±1}/(1−ℏ^{±1}) by the sign
        // of the t-exponent, last → 1
        let predicted = match kind {
            FactorType::First => RationalChar::zero(&hl),
            FactorType::Second if a[0] > 0 => closed_form(s, 1, 0),
            FactorType::Third if b[0] > 0 => closed_form(s, 0, 1),
            _ => RationalChar::one(&hl),
        };
        out.push(TaggedFactor { e, kind, value: f, predicted });
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct PneqqRecord {
    pub p: String,
    pub q: String,
    /// Product of the factors, then the limit.
    pub limit: String,
    /// Limits of the individual factors, multiplied.
    pub limit_by_factors: String,
    /// Product of the limits predicted factor by factor.
    pub predicted_by_factors: String,
    pub expected: String,
    pub routes_agree: bool,
    pub factor_predictions_hold: bool,
    pub pass: bool,
}

/// `lim_{t→∞} ξ_{p×q^!}/(∧•T^{1/2}_p ∧•T^{1/2}_{q^!})` two ways, against
/// `δ_{pq} (ℏ/(1−ℏ))^{rk ind_p} (ℏ⁻¹/(1−ℏ⁻¹))^{rk ind_{p^!}}`.
pub fn pneqq_limit(pair: &DualPair, p: usize, q: usize, spec: &Specialization) -> Result<PneqqRecord, LocalizationError> {
    let s = pair.joint.scale();
    let hl = hbar_lattice(s);
    let xi = xi_restriction(pair, &SubspaceSpec::full(pair.x.n()), p, q);
    let half = &pair.half_tangent_x(p) + &pair.half_tangent_dual(q);
    let f = spec.fraction(pair, &Fraction::over_wedge(xi, &half)?)?;
    let product = limit_t(&f.to_rational())?;

    let factors = pneqq_factors(pair, p, q, spec)?;
    let mut by_factors = RationalChar::one(&hl);
    let mut predicted = RationalChar::one(&hl);
    let mut predictions_hold = true;
    for t in &factors {
        let l = limit_t(&t.value.to_rational())?;
        predictions_hold &= l == t.predicted;
        by_factors = by_factors.mul(&l);
        predicted = predicted.mul(&t.predicted);
    }
    let expected = if p == q {
        closed_form(s, pair.x.rank_ind(p, &spec.zeta), pair.dual.rank_ind(pair.dual_of[p], &spec.dual))
    } else {
        RationalChar::zero(&hl)
    };
    Ok(PneqqRecord {
        p: pair.point_label(p),
        q: pair.dual_label(q),
        limit: product.to_text(),
        limit_by_factors: by_factors.to_text(),
        predicted_by_factors: predicted.to_text(),
        expected: expected.to_text(),
        routes_agree: product == by_factors,
        factor_predictions_hold: predictions_hold,
        pass: product == expected,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LimitRecord {
    pub p: String,
    pub q: String,
    pub limit: String,
    pub expected: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct IntertwinerReport {
    pub slope: String,
    pub slope_dual: String,
    pub specialization: Specialization,
    pub records: Vec<LimitRecord>,
    pub offdiagonal_zero: bool,
    pub diagonal_closed_form: bool,
    /// Normalising each row by its diagonal limit gives `𝟙 + R` with `lim R = 0`.
    pub identity_plus_r: bool,
    pub diagonal_limits: Vec<String>,
    pub unbounded_summands: usize,
    pub not_strictly_bounded_offpoint_summands: usize,
    pub nonvanishing_offpoint_summands: usize,
}

impl IntertwinerReport {
    pub fn pass(&self) -> bool {
        self.offdiagonal_zero && self.diagonal_closed_form && self.identity_plus_r
    }
}

/// Stable envelopes used by the intertwiner: opposite polarizations, chamber
/// ζ on `X` and `η` on `X^!`.
pub fn intertwiner_envelopes(
    pair: &DualPair,
    slope: &Slope,
    slope_dual: &Slope,
) -> Result<(StabMatrix, StabMatrix), StabError> {
    let s = build_stab(&pair.x, pair.zeta(), Polarization::Opposite, slope)?;
    let sd = build_stab(&pair.dual, pair.eta(), Polarization::Opposite, slope_dual)?;
    Ok((s, sd))
}

/// `∏_e (u_e|_a / u_e|_b)^{s_e}` on the joint lattice, for either side.
fn slope_ratio(pair: &DualPair, slope: &Slope, a: usize, b: usize, dual: bool) -> Result<LaurentPoly, AlgebraError> {
    let width = pair.joint.rank();
    let mut exps = vec![Rat::zero(); width];
    for e in 0..pair.x.n() {
        let (ua, ub) = if dual { (pair.u_dual(a, e), pair.u_dual(b, e)) } else { (pair.u(a, e), pair.u(b, e)) };
        for i in 0..width {
            exps[i] += &slope.0[e] * Rat::from_integer((ua[i] - ub[i]).into());
        }
    }
    LaurentPoly::from_rat_exponents(&pair.joint, &exps, Rat::one())
}

/// The full intertwiner computation. `pair` must be built with a scale
/// divisible by the slope denominators.
pub fn intertwiner_check(
    pair: &DualPair,
    slope: &Slope,
    slope_dual: &Slope,
    spec: &Specialization,
) -> Result<IntertwinerReport, LocalizationError> {
    let (s, sd) = intertwiner_envelopes(pair, slope, slope_dual)?;
    let n = pair.len();
    let sc = pair.joint.scale();
    let hl = hbar_lattice(sc);
    let xi_spec = SubspaceSpec::full(pair.x.n());
    let xi: Vec<Vec<LaurentPoly>> =
        (0..n).map(|x| (0..n).map(|y| xi_restriction(pair, &xi_spec, x, y)).collect()).collect();
    let sx: Vec<Vec<LaurentPoly>> =
        s.values.iter().map(|row| row.iter().map(|v| pair.embed_x(v)).collect()).collect();
    // dual envelopes indexed by X's points through q ↦ q^!
    let sdx: Vec<Vec<LaurentPoly>> = (0..n)
        .map(|q| (0..n).map(|y| pair.embed_dual(&sd.values[pair.dual_of[q]][pair.dual_of[y]])).collect())
        .collect();
    let tangent: Vec<Vec<LaurentPoly>> =
        (0..n).map(|x| (0..n).map(|y| &pair.tangent_x(x) + &pair.tangent_dual(y)).collect()).collect();

    let mut records = Vec::new();
    let mut limits = vec![vec![RationalChar::zero(&hl); n]; n];
    let mut unbounded = 0;
    let mut not_strict = 0;
    let mut nonvanishing = 0;
    let t_axis = [0usize];
    for p in 0..n {
        for q in 0..n {
            let mut summands = Vec::new();
            for x in 0..n {
                for y in 0..n {
                    let val = &(&xi[x][y] * &sx[p][x]) * &sdx[q][y];
                    if val.is_zero() {
                        continue;
                    }
                    let twist = &slope_ratio(pair, slope, p, x, false)? * &slope_ratio(pair, slope_dual, q, y, true)?;
                    let f = spec.fraction(pair, &Fraction::over_wedge(&val * &twist, &tangent[x][y])?)?;
                    let den = f.den_poly();
                    match is_bounded(&f.num, &den, &t_axis)? {
                        Boundedness::Unbounded => unbounded += 1,
                        Boundedness::Bounded if (x, y) != (p, q) => not_strict += 1,
                        _ => {}
                    }
                    if (x, y) != (p, q) {
                        if let Ok(l) = limit_t(&f.to_rational()) {
                            if !l.is_zero() {
                                nonvanishing += 1;
                            }
                        }
                    }
                    summands.push(f);
                }
            }
            let total = if summands.is_empty() {
                RationalChar::zero(&Specialization::target(sc))
            } else {
                euler_sum(&summands)
            };
            let l = limit_t(&total)?;
            let expected = if p == q {
                closed_form(sc, pair.x.rank_ind(p, pair.zeta()), pair.dual.rank_ind(pair.dual_of[p], pair.eta()))
            } else {
                RationalChar::zero(&hl)
            };
            records.push(LimitRecord {
                p: pair.point_label(p),
                q: pair.dual_label(q),
                limit: l.to_text(),
                expected: expected.to_text(),
                pass: l == expected,
            });
            limits[p][q] = l;
        }
    }
    let offdiagonal_zero = (0..n).all(|p| (0..n).all(|q| p == q || limits[p][q].is_zero()));
    let diagonal_closed_form = records.iter().enumerate().filter(|(i, _)| i / n == i % n).all(|(_, r)| r.pass);
    let identity_plus_r = offdiagonal_zero && (0..n).all(|p| !limits[p][p].is_zero());
    Ok(IntertwinerReport {
        slope: slope.to_string(),
        slope_dual: slope_dual.to_string(),
        specialization: spec.clone(),
        records,
        offdiagonal_zero,
        diagonal_closed_form,
        identity_plus_r,
        diagonal_limits: (0..n).map(|p| limits[p][p].to_text()).collect(),
        unbounded_summands: unbounded,
        not_strictly_bounded_offpoint_summands: not_strict,
        nonvanishing_offpoint_summands: nonvanishing,
    })
}

/// Draw slopes for `X` and `X^!` until both envelopes exist.
pub fn random_intertwiner_slopes<R: rand::Rng>(pair: &DualPair, rng: &mut R) -> (Slope, Slope) {
    loop {
        let s = Slope::random(pair.x.n(), rng);
        let sd = Slope::random(pair.x.n(), rng);
        if intertwiner_envelopes(pair, &s, &sd).is_ok() {
            return (s, sd);
        }
    }
}

/// Joint lattice scale for a pair of slopes.
pub fn scale_for(slopes: &[&Slope]) -> i64 {
    slopes.iter().fold(2i64, |acc, s| num_integer::lcm(acc, s.denominator_lcm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::arrangements::*;
    use crate::rat;

    #[test]
    fn single_summand_cancels() {
        let pair = DualPair::new(&tp1());
        let t = pair.tangent_x(0);
        let w = crate::lattice::wedge_star(&t).unwrap();
        let r = euler_pairing(&[w.num.clone()], &[LaurentPoly::one(&pair.joint)], &[t]).unwrap();
        assert_eq!(r, RationalChar::one(&pair.joint));
        assert_eq!(euler_pairing(&[], &[], &[]).unwrap_err(), LocalizationError::Empty);
    }

    #[test]
    fn pneqq_offdiagonal_vanishes_tp1() {
        let pair = DualPair::new(&tp1());
        let spec = Specialization::standard(&pair);
        let r = pneqq_limit(&pair, 0, 1, &spec).unwrap();
        assert!(r.pass && r.routes_agree, "{r:?}");
        let r = pneqq_limit(&pair, 1, 0, &spec).unwrap();
        assert!(r.pass && r.routes_agree, "{r:?}");
    }

    #[test]
    fn intertwiner_offdiagonal_tp1() {
        let s = Slope(vec![rat(1, 3), rat(0, 1)]);
        let sd = Slope(vec![rat(1, 5), rat(-2, 5)]);
        let pair = DualPair::with_scale(&tp1(), scale_for(&[&s, &sd]));
        let rep = intertwiner_check(&pair, &s, &sd, &Specialization::standard(&pair)).unwrap();
        assert!(rep.offdiagonal_zero, "{rep:?}");
        assert!(rep.identity_plus_r);
    }
}
