//! K-theoretic stable envelopes: diagonal normalisation, the axioms as
//! executable checks, a constructive search, and the duality pairing.
//!
//! `Stab(p)|_q` is sought in the form
//! `K_p|_q · (diag(p)/K_p|_p) · ∏_e (u_e|_q / u_e|_p)^{m_e}`, where `K_p` is the
//! Koszul product cutting out the attracting coordinate subspace of `p` and
//! `m` runs over the line bundles with G-character in `½∂ᵀ𝟙 + ℤ^k`. The degree
//! axiom selects a unique `m` for a generic slope.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use crate::data::dot;
use crate::kirwan::{Polarization, Space};
use crate::lattice::{deg_a, rat_text, wedge_star_omitting_trivial, DegreePolytope, LaurentPoly, RationalChar};
use crate::localization::{euler_sum, Fraction};
use crate::Rat;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum StabError {
    #[error("slope is not generic: the degree condition does not single out an envelope at p = {p}, q = {q} ({reason})")]
    NonGenericSlope { p: String, q: String, reason: String },
    #[error("slope has {got} entries, expected {expected}")]
    SlopeLength { got: usize, expected: usize },
    #[error("bad slope `{0}`")]
    Parse(String),
    #[error(transparent)]
    Chamber(#[from] crate::kirwan::KirwanError),
}

/// `𝓛 = Σ_e s_e u_e` with rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slope(pub Vec<Rat>);

impl Slope {
    pub fn neg(&self) -> Slope {
        Slope(self.0.iter().map(|x| -x.clone()).collect())
    }

    pub fn denominator_lcm(&self) -> i64 {
        self.0.iter().fold(1i64, |acc, x| {
            let d: i64 = x.denom().try_into().expect("small denominator");
            num_integer::lcm(acc, d)
        })
    }

    /// Numerators in `-6..=6` over 7.
    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Slope {
        Slope((0..n).map(|_| Rat::new(rng.gen_range(-6i64..=6).into(), 7.into())).collect())
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.iter().map(rat_text).join(","))
    }
}

impl FromStr for Slope {
    type Err = StabError;
    fn from_str(s: &str) -> Result<Self, StabError> {
        let bad = || StabError::Parse(s.to_string());
        s.split(',')
            .map(|t| {
                let t = t.trim();
                let (n, d) = t.split_once('/').unwrap_or((t, "1"));
                let n: i64 = n.trim().parse().map_err(|_| bad())?;
                let d: i64 = d.trim().parse().map_err(|_| bad())?;
                if d == 0 {
                    return Err(bad());
                }
                Ok(Rat::new(n.into(), d.into()))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Slope)
    }
}

/// A-part of `𝓛|_p`, i.e. `Σ_{e∈b_p} s_e α^p_e`.
pub fn slope_shift(space: &Space, p: usize, slope: &Slope) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); space.r()];
    for &e in &space.points[p].base {
        for (i, a) in space.points[p].alpha(e).unwrap().iter().enumerate() {
            out[i] += &slope.0[e] * Rat::from_integer((*a).into());
        }
    }
    out
}

/// Geometric tangent weights at `p`, as `(weight, sign of its pairing with
/// the chamber)`: `u_e^{-1}` and `u_e ℏ^{-1}` for `e ∈ b_p`.
fn tangent_weights(space: &Space, p: usize, chamber: &[i64]) -> Vec<(Vec<i64>, i64)> {
    let r = space.r();
    let mut out = Vec::new();
    for &e in &space.points[p].base {
        let w = space.u(p, e);
        let a = dot(space.points[p].alpha(e).unwrap(), chamber).signum();
        out.push((w.iter().map(|x| -x).collect(), -a));
        let mut v = w.to_vec();
        v[r] -= 1;
        out.push((v, a));
    }
    out
}

fn int_mono(space: &Space, v: &[i64], c: i64) -> LaurentPoly {
    LaurentPoly::from_int_exponents(&space.lattice, v, Rat::from_integer(c.into()))
}

/// `∏_{w∈T_{<0}}(1 − w^{-1}) · (−1)^{rk T^{1/2}_{>0}} · (det T_{<0} / det T^{1/2})^{1/2}`.
pub fn diagonal_value(space: &Space, p: usize, chamber: &[i64], pol: Polarization) -> LaurentPoly {
    let (kos, unit) = diagonal_parts(space, p, chamber, pol);
    &kos * &unit
}

fn diagonal_parts(space: &Space, p: usize, chamber: &[i64], pol: Polarization) -> (LaurentPoly, LaurentPoly) {
    let r = space.r();
    let one = LaurentPoly::one(&space.lattice);
    let weights = tangent_weights(space, p, chamber);
    let mut kos = one.clone();
    let mut ratio = vec![0i64; r + 1];
    for (w, s) in &weights {
        if *s < 0 {
            let inv: Vec<i64> = w.iter().map(|x| -x).collect();
            kos = &kos * &(&one - &int_mono(space, &inv, 1));
            for (a, b) in ratio.iter_mut().zip(w) {
                *a += b;
            }
        }
    }
    let mut positive_half = 0;
    for &e in &space.points[p].base {
        let w = space.u(p, e);
        let a = dot(space.points[p].alpha(e).unwrap(), chamber);
        let (half, sign): (Vec<i64>, i64) = match pol {
            Polarization::Standard => (w.iter().map(|x| -x).collect(), -a),
            Polarization::Opposite => {
                let mut v = w.to_vec();
                v[r] -= 1;
                (v, a)
            }
        };
        if sign > 0 {
            positive_half += 1;
        }
        for (x, y) in ratio.iter_mut().zip(&half) {
            *x -= y;
        }
    }
    // the lattice has scale 2, so the scaled exponents of the square root
    // are the integer exponents of the ratio
    let sign = if positive_half % 2 == 0 { Rat::one() } else { -Rat::one() };
    let unit = LaurentPoly::monomial(&space.lattice, ratio, sign);
    (kos, unit)
}

/// `K_p|_q = ∏_{e∈b_p, ⟨α,σ⟩>0} (1 − u_e|_q) ∏_{⟨α,σ⟩<0} (1 − ℏ/u_e|_q)`.
pub fn koszul(space: &Space, p: usize, q: usize, chamber: &[i64]) -> LaurentPoly {
    let r = space.r();
    let one = LaurentPoly::one(&space.lattice);
    let mut out = one.clone();
    for &e in &space.points[p].base {
        let w = space.u(q, e);
        let v: Vec<i64> = if dot(space.points[p].alpha(e).unwrap(), chamber) > 0 {
            w.to_vec()
        } else {
            let mut v: Vec<i64> = w.iter().map(|x| -x).collect();
            v[r] += 1;
            v
        };
        out = &out * &(&one - &int_mono(space, &v, 1));
    }
    out
}

/// Transitive closure of `q ⪯ p ⟺ q ∈ Attr^n(p)`.
pub fn attracting_order(space: &Space, chamber: &[i64]) -> Vec<Vec<bool>> {
    let n = space.points.len();
    let eta = &space.data.eta;
    let mut le: Vec<Vec<bool>> = (0..n)
        .map(|p| (0..n).map(|q| p == q || crate::xi::attr_member(space, p, q, chamber, eta)).collect())
        .collect();
    for k in 0..n {
        for p in 0..n {
            for q in 0..n {
                if le[p][k] && le[k][q] {
                    le[p][q] = true;
                }
            }
        }
    }
    le
}

#[derive(Debug, Clone)]
pub struct StabMatrix {
    pub chamber: Vec<i64>,
    pub polarization: Polarization,
    pub slope: Slope,
    /// `values[p][q] = Stab(p)|_q`.
    pub values: Vec<Vec<LaurentPoly>>,
    /// G-character of the line bundle twist selected for each source.
    pub twist: Vec<Vec<Rat>>,
}

fn a_points(f: &LaurentPoly, r: usize, shift: &[Rat]) -> DegreePolytope {
    deg_a(f, &(0..r).collect_vec()).unwrap().translate(shift)
}

fn row_for(space: &Space, p: usize, chamber: &[i64], pol: Polarization, g: &[Rat]) -> Vec<LaurentPoly> {
    let (kos_p, unit) = diagonal_parts(space, p, chamber, pol);
    let pt = &space.points[p];
    let m: Vec<(usize, Rat)> = pt
        .complement
        .iter()
        .map(|&e| {
            let b = pt.beta_p(e).unwrap();
            (e, b.iter().zip(g).map(|(x, y)| Rat::from_integer((*x).into()) * y).sum())
        })
        .collect();
    let width = space.r() + 1;
    (0..space.points.len())
        .map(|q| {
            if q == p {
                return &kos_p * &unit;
            }
            let k = koszul(space, p, q, chamber);
            if k.is_zero() {
                return k;
            }
            // ∏ (u_e|_q / u_e|_p)^{m_e}; 2·m_e is an integer
            let mut shift = vec![0i64; width];
            for (e, me) in &m {
                let twice: i64 = (me * Rat::from_integer(2.into())).to_integer().try_into().unwrap();
                for (i, s) in shift.iter_mut().enumerate() {
                    *s += twice * (space.u(q, *e)[i] - space.u(p, *e)[i]);
                }
            }
            // scaled exponents at scale 2 equal twice the rational exponents
            let tw = LaurentPoly::monomial(&space.lattice, shift, Rat::one());
            &(&k * &unit) * &tw
        })
        .collect()
}

fn degree_failure(space: &Space, p: usize, row: &[LaurentPoly], diag: &[LaurentPoly], slope: &Slope) -> Option<usize> {
    let r = space.r();
    let sp = slope_shift(space, p, slope);
    (0..row.len()).find(|&q| {
        q != p && !row[q].is_zero() && {
            let f = a_points(&row[q], r, &sp);
            let g = a_points(&diag[q], r, &slope_shift(space, q, slope));
            !f.contained_in(&g)
        }
    })
}

const MAX_RADIUS: i64 = 10;

/// Construct `Stab(p)|_q` for every pair. Fails when the degree axiom does
/// not determine the envelope uniquely (non-generic slope).
pub fn build_stab(space: &Space, chamber: &[i64], pol: Polarization, slope: &Slope) -> Result<StabMatrix, StabError> {
    if slope.0.len() != space.n() {
        return Err(StabError::SlopeLength { got: slope.0.len(), expected: space.n() });
    }
    space.check_chamber(chamber)?;
    let npts = space.points.len();
    let k = space.data.k();
    let g0: Vec<Rat> = (0..k)
        .map(|j| Rat::new(space.data.partial.iter().map(|row| row[j]).sum::<i64>().into(), 2.into()))
        .collect();
    let diag: Vec<LaurentPoly> = (0..npts).map(|p| diagonal_value(space, p, chamber, pol)).collect();
    let mut values = Vec::with_capacity(npts);
    let mut twist = Vec::with_capacity(npts);
    for p in 0..npts {
        let candidates = |radius: i64| -> Vec<Vec<i64>> {
            (0..k).map(|_| -radius..=radius).multi_cartesian_product().collect()
        };
        let solve = |g: &[i64]| -> (Vec<Rat>, Vec<LaurentPoly>) {
            let gr: Vec<Rat> = g.iter().zip(&g0).map(|(x, y)| Rat::from_integer((*x).into()) + y).collect();
            let row = row_for(space, p, chamber, pol, &gr);
            (gr, row)
        };
        let search = |radius: i64| -> Vec<(Vec<Rat>, Vec<LaurentPoly>)> {
            let mut found: Vec<(Vec<Rat>, Vec<LaurentPoly>)> = Vec::new();
            let cands = if k == 0 { vec![vec![]] } else { candidates(radius) };
            for g in cands {
                let (gr, row) = solve(&g);
                if degree_failure(space, p, &row, &diag, slope).is_none() && !found.iter().any(|(_, r)| *r == row) {
                    found.push((gr, row));
                }
            }
            found
        };
        let mut radius = 1;
        let mut found = search(radius);
        while found.is_empty() && radius < MAX_RADIUS && k > 0 {
            radius += 1;
            found = search(radius);
        }
        if found.is_empty() {
            let (_, row) = solve(&vec![0; k]);
            let q = degree_failure(space, p, &row, &diag, slope).unwrap_or(p);
            return Err(StabError::NonGenericSlope {
                p: space.label(p),
                q: space.label(q),
                reason: format!("no twist within radius {MAX_RADIUS} satisfies the degree condition"),
            });
        }
        if k > 0 {
            found = search(radius + 2);
        }
        if found.len() > 1 {
            let q = (0..npts).find(|&q| found[0].1[q] != found[1].1[q]).unwrap_or(p);
            return Err(StabError::NonGenericSlope {
                p: space.label(p),
                q: space.label(q),
                reason: format!("{} rows satisfy the degree condition", found.len()),
            });
        }
        let (g, row) = found.pop().unwrap();
        values.push(row);
        twist.push(g);
    }
    Ok(StabMatrix { chamber: chamber.to_vec(), polarization: pol, slope: slope.clone(), values, twist })
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct AxiomReport {
    pub support_failures: Vec<(String, String)>,
    pub diagonal_failures: Vec<String>,
    pub hbar_one_failures: Vec<String>,
    pub degree_failures: Vec<(String, String)>,
}

impl AxiomReport {
    pub fn pass(&self) -> bool {
        self.support_failures.is_empty()
            && self.diagonal_failures.is_empty()
            && self.hbar_one_failures.is_empty()
            && self.degree_failures.is_empty()
    }
}

pub fn check_axioms(space: &Space, s: &StabMatrix) -> AxiomReport {
    let order = attracting_order(space, &s.chamber);
    let npts = space.points.len();
    let h = space.h_axis();
    let r = space.r();
    let mut rep = AxiomReport::default();
    for p in 0..npts {
        for q in 0..npts {
            if !order[p][q] && !s.values[p][q].is_zero() {
                rep.support_failures.push((space.label(p), space.label(q)));
            }
        }
        let d = diagonal_value(space, p, &s.chamber, s.polarization);
        if s.values[p][p] != d {
            rep.diagonal_failures.push(space.label(p));
        }
        let lhs = RationalChar::from_poly(s.values[p][p].kill_axis(h));
        let rhs = wedge_star_omitting_trivial(&space.half_tangent(s.polarization, p).kill_axis(h)).expect("integer class");
        if lhs != rhs {
            rep.hbar_one_failures.push(space.label(p));
        }
        let sp = slope_shift(space, p, &s.slope);
        for q in 0..npts {
            if q == p || s.values[p][q].is_zero() {
                continue;
            }
            if s.values[q][q].is_zero() {
                rep.degree_failures.push((space.label(p), space.label(q)));
                continue;
            }
            let f = a_points(&s.values[p][q], r, &sp);
            let g = a_points(&s.values[q][q], r, &slope_shift(space, q, &s.slope));
            if !f.contained_in(&g) {
                rep.degree_failures.push((space.label(p), space.label(q)));
            }
        }
    }
    rep
}

/// `⟨Stab(p), Stab_op(q)⟩` by localization, with `∧•T_x` in the denominator.
pub fn duality_pairing(space: &Space, s: &StabMatrix, s_op: &StabMatrix) -> Vec<Vec<RationalChar>> {
    let npts = space.points.len();
    let tangents: Vec<LaurentPoly> = (0..npts).map(|x| space.tangent_class(x)).collect();
    (0..npts)
        .map(|p| {
            (0..npts)
                .map(|q| {
                    let summands: Vec<Fraction> = (0..npts)
                        .map(|x| {
                            Fraction::over_wedge(&s.values[p][x] * &s_op.values[q][x], &tangents[x])
                                .expect("isolated fixed points")
                        })
                        .collect();
                    euler_sum(&summands)
                })
                .collect()
        })
        .collect()
}

pub fn is_identity(m: &[Vec<RationalChar>]) -> bool {
    m.iter().enumerate().all(|(i, row)| {
        row.iter().enumerate().all(|(j, v)| {
            if i == j {
                *v == RationalChar::one(v.lattice())
            } else {
                v.is_zero() || v.num.is_zero()
            }
        })
    })
}

/// Stable envelope and its opposite (`−σ`, opposite polarization, `𝓛⁻¹`).
pub fn stab_and_opposite(space: &Space, chamber: &[i64], slope: &Slope) -> Result<(StabMatrix, StabMatrix), StabError> {
    let s = build_stab(space, chamber, Polarization::Standard, slope)?;
    let neg: Vec<i64> = chamber.iter().map(|x| -x).collect();
    let s_op = build_stab(space, &neg, Polarization::Opposite, &slope.neg())?;
    Ok((s, s_op))
}

/// The generator behind every seeded random slope.
pub fn seeded_rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Draw random slopes until both the envelope and its opposite exist.
pub fn random_generic_slope<R: Rng>(space: &Space, chamber: &[i64], rng: &mut R) -> (Slope, StabMatrix, StabMatrix) {
    loop {
        let s = Slope::random(space.n(), rng);
        if let Ok((a, b)) = stab_and_opposite(space, chamber, &s) {
            return (s, a, b);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::arrangements::*;
    use crate::rat;

    fn slope(v: &[(i64, i64)]) -> Slope {
        Slope(v.iter().map(|&(a, b)| rat(a, b)).collect())
    }

    #[test]
    fn tp1_envelope() {
        let sp = Space::new(tp1(), "t");
        let s = build_stab(&sp, &[1], Polarization::Standard, &slope(&[(1, 3), (0, 1)])).unwrap();
        assert!(check_axioms(&sp, &s).pass());
        let (s, o) = stab_and_opposite(&sp, &[1], &slope(&[(1, 3), (0, 1)])).unwrap();
        assert!(is_identity(&duality_pairing(&sp, &s, &o)));
    }

    #[test]
    fn tp2_known_rows() {
        let sp = Space::new(tp2(), "t");
        let s = build_stab(&sp, &[1, 2], Polarization::Opposite, &slope(&[(1, 7), (2, 7), (2, 7)])).unwrap();
        assert!(check_axioms(&sp, &s).pass());
        let l = &sp.lattice;
        let p = |t: &str| LaurentPoly::parse(l, t).unwrap();
        // Stab({e1,e3}) is supported at its own point only
        assert!(s.values[1][0].is_zero() && s.values[1][2].is_zero());
        assert_eq!(s.values[1][1], diagonal_value(&sp, 1, &[1, 2], Polarization::Opposite));
        // Stab({e2,e3}) vanishes at {e1,e2}
        assert!(s.values[2][0].is_zero());
        let _ = p;
    }

    #[test]
    fn slope_text() {
        let s: Slope = "1/3, -2/7,0".parse().unwrap();
        assert_eq!(s.to_string(), "1/3,-2/7,0");
        assert!("1/0".parse::<Slope>().is_err());
    }
}
