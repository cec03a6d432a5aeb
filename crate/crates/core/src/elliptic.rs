//! The duality interface `𝔪 = ∏_e ϑ(u_e ǔ_e)` as a truncated `q`-series and
//! its fixed-point restrictions.
//!
//! The interface lives on the lattice freely generated by the Kirwan images
//! `u_1..u_n, v_1..v_n` (with `v_e = ǔ_e`). Restricting to a pair of fixed
//! points is the lattice map sending each generator to its restriction.

use std::sync::Arc;

use num_traits::One;
use serde::Serialize;

use crate::lattice::{CharLattice, LaurentPoly};
use crate::qseries::{theta_automorphy_defect, theta_expand, QSeries, SeriesError};
use crate::xi::{xi_restriction, DualPair, SubspaceSpec};
use crate::Rat;

/// Lattice with axes `u1..un, v1..vn` and scale 2.
pub fn generator_lattice(n: usize) -> Arc<CharLattice> {
    let labels: Vec<String> = (1..=n).map(|e| format!("u{e}")).chain((1..=n).map(|e| format!("v{e}"))).collect();
    CharLattice::new(labels, 2).expect("distinct labels")
}

/// `u_e ǔ_e` on the generator lattice.
pub fn generator_product(lat: &Arc<CharLattice>, n: usize, e: usize) -> LaurentPoly {
    let mut v = vec![0; 2 * n];
    v[e] = 1;
    v[n + e] = 1;
    LaurentPoly::from_int_exponents(lat, &v, Rat::one())
}

#[derive(Debug, Clone)]
pub struct InterfaceSeries {
    pub series: QSeries,
    pub n: usize,
    pub order: i64,
}

impl InterfaceSeries {
    /// Restriction to `p × q^!`.
    pub fn restrict(&self, pair: &DualPair, p: usize, q: usize) -> QSeries {
        let hom = restriction_map(pair, p, q);
        self.series.map_coeffs(&pair.joint, |c| c.map_exponents(&pair.joint, &hom))
    }
}

/// The lattice map `u_e ↦ u_e|_p`, `v_e ↦ ǔ_e|_{q^!}` on scaled exponents.
pub fn restriction_map(pair: &DualPair, p: usize, q: usize) -> impl Fn(&[i64]) -> Vec<i64> {
    let n = pair.x.n();
    let ratio = pair.joint.scale() / 2;
    let images: Vec<Vec<i64>> = (0..n).map(|e| pair.u(p, e)).chain((0..n).map(|e| pair.u_dual(q, e))).collect();
    let width = pair.joint.rank();
    move |mu: &[i64]| {
        let mut out = vec![0; width];
        for (m, img) in mu.iter().zip(&images) {
            for (o, v) in out.iter_mut().zip(img) {
                *o += m * v * ratio;
            }
        }
        out
    }
}

pub fn interface_series(n: usize, order: i64) -> Result<InterfaceSeries, SeriesError> {
    let lat = generator_lattice(n);
    let mut acc = QSeries::constant(LaurentPoly::one(&lat), 1, order);
    for e in 0..n {
        acc = acc.mul(&theta_expand(&generator_product(&lat, n, e), order)?)?;
    }
    Ok(InterfaceSeries { series: acc.truncate(order), n, order })
}

/// `Stab^ell(p)|_q = ∏_e ϑ(u_e|_q · ǔ_e|_{p^!})` on the joint lattice. A
/// trivial argument contributes `ϑ(1) = 0`.
pub fn elliptic_stab_restriction(pair: &DualPair, p: usize, q: usize, order: i64) -> Result<QSeries, SeriesError> {
    let mut acc = QSeries::constant(LaurentPoly::one(&pair.joint), 1, order);
    for e in 0..pair.x.n() {
        let w: Vec<i64> = pair.u(q, e).iter().zip(pair.u_dual(p, e)).map(|(a, b)| a + b).collect();
        acc = acc.mul(&theta_expand(&pair.mono(&w), order)?)?;
    }
    Ok(acc.truncate(order))
}

/// `∏_e (−(u_e|_q ǔ_e|_{p^!})^{−1/2})`, the unit relating the `q⁰` term of an
/// elliptic restriction to `ξ|_{q × p^!}`.
pub fn q0_unit(pair: &DualPair, p: usize, q: usize) -> LaurentPoly {
    let s = pair.joint.scale();
    let mut exps = vec![0; pair.joint.rank()];
    for e in 0..pair.x.n() {
        for (i, (a, b)) in pair.u(q, e).iter().zip(pair.u_dual(p, e)).enumerate() {
            exps[i] -= (a + b) * s / 2;
        }
    }
    let sign = if pair.x.n() % 2 == 0 { Rat::one() } else { -Rat::one() };
    LaurentPoly::monomial(&pair.joint, exps, sign)
}

#[derive(Debug, Clone, Serialize)]
pub struct EllipticReport {
    pub order: i64,
    pub pairs_checked: usize,
    /// Pairs where restricting the interface differs from the direct product.
    pub restriction_mismatches: Vec<(String, String)>,
    /// Pairs where the `q⁰` term is not `ξ` times the expected unit.
    pub q0_mismatches: Vec<(String, String)>,
    /// Pairs whose elliptic restriction vanishes.
    pub zero_entries: Vec<(String, String)>,
    pub automorphy_failures: Vec<String>,
}

impl EllipticReport {
    pub fn pass(&self) -> bool {
        self.restriction_mismatches.is_empty() && self.q0_mismatches.is_empty() && self.automorphy_failures.is_empty()
    }
}

pub fn check_interface(pair: &DualPair, order: i64) -> Result<EllipticReport, SeriesError> {
    let m = interface_series(pair.x.n(), order)?;
    let full = SubspaceSpec::full(pair.x.n());
    let mut report = EllipticReport {
        order,
        pairs_checked: 0,
        restriction_mismatches: Vec::new(),
        q0_mismatches: Vec::new(),
        zero_entries: Vec::new(),
        automorphy_failures: Vec::new(),
    };
    for p in 0..pair.len() {
        for q in 0..pair.len() {
            let direct = elliptic_stab_restriction(pair, p, q, order)?;
            let label = (pair.point_label(p), pair.point_label(q));
            report.pairs_checked += 1;
            if !m.restrict(pair, q, p).agrees_with(&direct) {
                report.restriction_mismatches.push(label.clone());
            }
            if direct.coeff(0) != &xi_restriction(pair, &full, q, p) * &q0_unit(pair, p, q) {
                report.q0_mismatches.push(label.clone());
            }
            if direct.is_zero() {
                report.zero_entries.push(label);
            }
        }
    }
    let lat = generator_lattice(pair.x.n());
    for e in 0..pair.x.n() {
        let x = generator_product(&lat, pair.x.n(), e);
        if theta_automorphy_defect(&x, order)?.is_some() {
            report.automorphy_failures.push(x.to_text());
        }
    }
    Ok(report)
}
