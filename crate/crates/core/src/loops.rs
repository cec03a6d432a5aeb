//! Truncated loop data, the positive-loop class `ξ(ℒ⁺)` and its comparison
//! with the duality interface.

use std::sync::Arc;

use num_traits::One;
use serde::Serialize;

use crate::elliptic::{generator_lattice, interface_series, restriction_map};
use crate::lattice::{CharLattice, LaurentPoly};
use crate::qseries::{QSeries, SeriesError};
use crate::xi::DualPair;
use crate::Rat;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum LoopError {
    #[error("order {order} exceeds truncation level {level}; raise truncation level")]
    TruncationTooLow { order: i64, level: i64 },
    #[error("residual is not a global unit: {0}")]
    NotAUnit(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// `ξ(ℒ⁺_N)` before substitution: one binomial per `(e, k) ∈ E × [−N, N]`
/// on the lattice of `χ_{e,k}, χ̌_{e,k}`.
#[derive(Debug, Clone)]
pub struct RawLoopProduct {
    pub lattice: Arc<CharLattice>,
    pub n: usize,
    pub level: i64,
    pub factors: Vec<LaurentPoly>,
}

impl RawLoopProduct {
    fn width(&self) -> usize {
        (2 * self.level + 1) as usize
    }

    /// Axis of `χ_{e,k}`; `χ̌_{e,k}` follows after all `χ` axes.
    pub fn axis(&self, e: usize, k: i64, dual: bool) -> usize {
        let base = e * self.width() + (k + self.level) as usize;
        if dual {
            base + self.n * self.width()
        } else {
            base
        }
    }

    pub fn factor_count(&self) -> usize {
        self.factors.len()
    }

    pub fn expand(&self) -> LaurentPoly {
        self.factors.iter().fold(LaurentPoly::one(&self.lattice), |acc, f| &acc * f)
    }

    /// Decompose a scaled loop-lattice exponent into `(q exponent, image)`
    /// under `χ_{e,k} ↦ q^k img(e)`, `χ̌_{e,k} ↦ img_dual(e)`.
    fn substitute_exponent(&self, mu: &[i64], img: &[Vec<i64>], img_dual: &[Vec<i64>], width: usize) -> (i64, Vec<i64>) {
        let s = self.lattice.scale();
        let mut q = 0;
        let mut out = vec![0; width];
        for e in 0..self.n {
            for k in -self.level..=self.level {
                let a = mu[self.axis(e, k, false)];
                let b = mu[self.axis(e, k, true)];
                q += k * a;
                for i in 0..width {
                    out[i] += a * img[e][i] + b * img_dual[e][i];
                }
            }
        }
        assert_eq!(q % s, 0, "integral q exponents");
        (q / s, out)
    }

    /// Substitute into every factor and multiply through `q^order`.
    pub fn substitute(
        &self,
        target: &Arc<CharLattice>,
        img: &[Vec<i64>],
        img_dual: &[Vec<i64>],
        order: i64,
    ) -> Result<QSeries, LoopError> {
        if order > self.level {
            return Err(LoopError::TruncationTooLow { order, level: self.level });
        }
        let width = target.rank();
        let mut acc = QSeries::constant(LaurentPoly::one(target), 1, order);
        for f in &self.factors {
            let mut term = QSeries::zero(target, 1, order);
            for (mu, c) in f.terms() {
                let (q, v) = self.substitute_exponent(mu, img, img_dual, width);
                let mono = LaurentPoly::monomial(target, v, c.clone());
                term = term.add(&QSeries::monomial(mono, q, 1, order))?;
            }
            acc = acc.mul(&term)?;
        }
        Ok(acc.truncate(order))
    }
}

/// `∏_e (1 − χ_{e,0}χ̌_{e,0}) ∏_{0<k≤N} (1 − χ_{e,k}χ̌_{e,k}) ∏_{−N≤k<0} (1 − χ⁻¹_{e,k}χ̌⁻¹_{e,k})`.
pub fn xi_positive_loops_raw(n: usize, level: i64) -> RawLoopProduct {
    assert!(level >= 0);
    let mut labels = Vec::new();
    for prefix in ["x", "y"] {
        for e in 1..=n {
            for k in -level..=level {
                labels.push(format!("{prefix}{e}_{}", k.to_string().replace('-', "m")));
            }
        }
    }
    let lattice = CharLattice::new(labels, 1).expect("distinct labels");
    let mut raw = RawLoopProduct { lattice: lattice.clone(), n, level, factors: Vec::new() };
    let one = LaurentPoly::one(&lattice);
    for e in 0..n {
        for k in -level..=level {
            let sign = if k < 0 { -1 } else { 1 };
            let mut v = vec![0; lattice.rank()];
            v[raw.axis(e, k, false)] = sign;
            v[raw.axis(e, k, true)] = sign;
            raw.factors.push(&one - &LaurentPoly::monomial(&lattice, v, Rat::one()));
        }
    }
    raw
}

fn generator_images(n: usize) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let unit = |i: usize| {
        let mut v = vec![0; 2 * n];
        v[i] = 2;
        v
    };
    ((0..n).map(unit).collect(), (0..n).map(|e| unit(n + e)).collect())
}

/// `ξ(ℒ⁺)` through `q^order` on the generator lattice `u1..un, v1..vn`.
pub fn xi_positive_loops(n: usize, level: i64, order: i64) -> Result<QSeries, LoopError> {
    let raw = xi_positive_loops_raw(n, level);
    let (img, img_dual) = generator_images(n);
    raw.substitute(&generator_lattice(n), &img, &img_dual, order)
}

/// `ξ(ℒ⁺)` restricted to `p × q^!` by substituting restricted characters
/// into the raw product.
pub fn xi_positive_loops_at(pair: &DualPair, p: usize, q: usize, level: i64, order: i64) -> Result<QSeries, LoopError> {
    let n = pair.x.n();
    let raw = xi_positive_loops_raw(n, level);
    let s = pair.joint.scale();
    let scaled = |v: Vec<i64>| v.into_iter().map(|x| x * s).collect::<Vec<_>>();
    let img: Vec<Vec<i64>> = (0..n).map(|e| scaled(pair.u(p, e))).collect();
    let img_dual: Vec<Vec<i64>> = (0..n).map(|e| scaled(pair.u_dual(q, e))).collect();
    raw.substitute(&pair.joint, &img, &img_dual, order)
}

/// `∏_e (u_e ǔ_e)^{−1/2}` on the generator lattice.
pub fn fractional_twist(n: usize) -> LaurentPoly {
    let lat = generator_lattice(n);
    LaurentPoly::monomial(&lat, vec![-1; 2 * n], Rat::one())
}

/// The monomial `c` with `a = c · b`, if one exists.
pub fn monomial_ratio(a: &LaurentPoly, b: &LaurentPoly) -> Option<LaurentPoly> {
    let (ea, ca) = a.terms().last()?;
    let (eb, cb) = b.terms().last()?;
    let shift: Vec<i64> = ea.iter().zip(eb).map(|(x, y)| x - y).collect();
    let c = LaurentPoly::monomial(a.lattice(), shift, ca / cb);
    (&c * b == *a).then_some(c)
}

#[derive(Debug, Clone, Serialize)]
pub struct RestrictionRecord {
    pub p: String,
    pub q: String,
    pub series_agree: bool,
    pub unit_agrees: bool,
    pub zero: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MainTheoremReport {
    pub order: i64,
    pub unit: String,
    pub first_difference: Option<String>,
    pub loops: String,
    pub interface: String,
    pub restrictions: Vec<RestrictionRecord>,
}

impl MainTheoremReport {
    pub fn pass(&self) -> bool {
        self.first_difference.is_none() && self.restrictions.iter().all(|r| r.series_agree && r.unit_agrees)
    }
}

/// Compare `ξ(ℒ⁺)` with `𝔪ᵘ · ∏_e (u_e ǔ_e)^{−1/2}` through `q^order`, up to a
/// single unit read off the `q⁰` terms, globally and at every pair of fixed
/// points.
pub fn main_theorem_check(pair: &DualPair, order: i64) -> Result<MainTheoremReport, LoopError> {
    let n = pair.x.n();
    let lhs = xi_positive_loops(n, order, order)?;
    let m = interface_series(n, order)?;
    let rhs = m.series.scale(&fractional_twist(n), 0);
    let unit = monomial_ratio(&lhs.coeff(0), &rhs.coeff(0)).ok_or_else(|| {
        LoopError::NotAUnit(format!("{} vs {}", lhs.coeff(0), rhs.coeff(0)))
    })?;
    let scaled = rhs.scale(&unit, 0);
    let first_difference = lhs.first_difference(&scaled, order).map(|e| {
        format!("q^{e}: {} vs {}", lhs.coeff(e), scaled.coeff(e))
    });

    let mut restrictions = Vec::new();
    for p in 0..pair.len() {
        for q in 0..pair.len() {
            let hom = restriction_map(pair, p, q);
            let direct = xi_positive_loops_at(pair, p, q, order, order)?;
            let via_global = lhs.map_coeffs(&pair.joint, |c| c.map_exponents(&pair.joint, &hom));
            let rhs_at = m.restrict(pair, p, q).scale(&fractional_twist(n).map_exponents(&pair.joint, &hom), 0);
            let unit_at = unit.map_exponents(&pair.joint, &hom);
            let zero = direct.is_zero() && rhs_at.is_zero();
            let unit_agrees = zero
                || monomial_ratio(&direct.coeff(0), &rhs_at.coeff(0)).map(|u| u == unit_at).unwrap_or(false);
            restrictions.push(RestrictionRecord {
                p: pair.point_label(p),
                q: pair.dual_label(q),
                series_agree: direct.agrees_with(&via_global) && direct.agrees_with(&rhs_at.scale(&unit_at, 0)),
                unit_agrees,
                zero,
            });
        }
    }
    Ok(MainTheoremReport {
        order,
        unit: unit.to_text(),
        first_difference,
        loops: lhs.to_text(),
        interface: rhs.to_text(),
        restrictions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::arrangements::*;

    #[test]
    fn raw_counts() {
        assert_eq!(xi_positive_loops_raw(1, 1).factor_count(), 3);
        assert_eq!(xi_positive_loops_raw(3, 2).factor_count(), 15);
        let raw0 = xi_positive_loops_raw(2, 0);
        assert_eq!(raw0.expand().to_text(), LaurentPoly::parse(&raw0.lattice, "1 - x1_0*y1_0 - x2_0*y2_0 + x1_0*x2_0*y1_0*y2_0").unwrap().to_text());
    }

    #[test]
    fn low_coefficients() {
        let s = xi_positive_loops(1, 3, 1).unwrap();
        let lat = generator_lattice(1);
        assert_eq!(s.coeff(0), LaurentPoly::parse(&lat, "1 - u1*v1").unwrap());
        let expect = &LaurentPoly::parse(&lat, "-u1*v1 - u1^-1*v1^-1").unwrap() * &LaurentPoly::parse(&lat, "1 - u1*v1").unwrap();
        assert_eq!(s.coeff(1), expect);
        assert_eq!(
            xi_positive_loops(1, 1, 2).unwrap_err(),
            LoopError::TruncationTooLow { order: 2, level: 1 }
        );
        let long = xi_positive_loops(2, 4, 3).unwrap();
        assert!(long.agrees_with(&xi_positive_loops(2, 3, 3).unwrap()));
    }

    #[test]
    fn tp1_main_theorem() {
        let pair = DualPair::new(&tp1());
        let rep = main_theorem_check(&pair, 3).unwrap();
        assert!(rep.pass(), "{rep:?}");
        assert_eq!(rep.unit, "u1*u2*v1*v2");
    }
}
