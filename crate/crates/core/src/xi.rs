//! The class `ξ = ∏_e (1 − u_e ǔ_e)` on `X × X^!` and its fixed-point
//! restrictions.

use std::sync::Arc;

use num_integer::Integer;
use num_traits::One;
use serde::Serialize;

use crate::data::{dot, HypertoricData};
use crate::kirwan::{Coord, Space};
use crate::lattice::{deg_a, wedge_star_omitting_trivial, CharLattice, LaurentPoly, RationalChar};
use crate::Rat;

/// A space together with its Gale dual and a joint character lattice
/// `(t_1..t_r, z_1..z_k, h)` in which the dual ℏ enters inverted.
#[derive(Debug, Clone)]
pub struct DualPair {
    pub x: Space,
    pub dual: Space,
    pub joint: Arc<CharLattice>,
    /// `dual_of[q]` is the index of `q^!` among the dual's fixed points.
    pub dual_of: Vec<usize>,
}

impl DualPair {
    pub fn new(data: &HypertoricData) -> Self {
        Self::with_scale(data, 2)
    }

    /// `scale` must be even so that square roots of characters exist.
    pub fn with_scale(data: &HypertoricData, scale: i64) -> Self {
        assert!(scale.is_even());
        let x = Space::new(data.clone(), "t");
        let dual = Space::new(data.gale_dual(), "z");
        let mut labels: Vec<String> = x.lattice.labels()[..x.r()].to_vec();
        labels.extend(dual.lattice.labels()[..dual.r()].iter().cloned());
        labels.push("h".into());
        let joint = CharLattice::new(labels, scale).expect("distinct labels");
        let dual_of = x
            .points
            .iter()
            .map(|p| dual.point_index(&p.complement).expect("complement is a dual base"))
            .collect();
        DualPair { x, dual, joint, dual_of }
    }

    pub fn len(&self) -> usize {
        self.x.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.points.is_empty()
    }

    pub fn r(&self) -> usize {
        self.x.r()
    }

    pub fn k(&self) -> usize {
        self.dual.r()
    }

    pub fn h_axis(&self) -> usize {
        self.r() + self.k()
    }

    /// The `𝔸 × G^∨` axes.
    pub fn torus_axes(&self) -> Vec<usize> {
        (0..self.r() + self.k()).collect()
    }

    /// Integer exponent vector of `X` into the joint lattice.
    pub fn x_vec(&self, v: &[i64]) -> Vec<i64> {
        let r = self.r();
        let mut out = v[..r].to_vec();
        out.extend(std::iter::repeat(0).take(self.k()));
        out.push(v[r]);
        out
    }

    /// Integer exponent vector of `X^!` into the joint lattice, `ℏ ↦ ℏ⁻¹`.
    pub fn dual_vec(&self, v: &[i64]) -> Vec<i64> {
        let k = self.k();
        let mut out = vec![0; self.r()];
        out.extend_from_slice(&v[..k]);
        out.push(-v[k]);
        out
    }

    pub fn embed_x(&self, f: &LaurentPoly) -> LaurentPoly {
        let ratio = self.joint.scale() / f.lattice().scale();
        f.map_exponents(&self.joint, |e| self.x_vec(e).into_iter().map(|v| v * ratio).collect())
    }

    pub fn embed_dual(&self, f: &LaurentPoly) -> LaurentPoly {
        let ratio = self.joint.scale() / f.lattice().scale();
        f.map_exponents(&self.joint, |e| self.dual_vec(e).into_iter().map(|v| v * ratio).collect())
    }

    /// `u_e|_p` in the joint lattice.
    pub fn u(&self, p: usize, e: usize) -> Vec<i64> {
        self.x_vec(self.x.u(p, e))
    }

    /// `ǔ_e|_{q^!}` in the joint lattice (ℏ inverted).
    pub fn u_dual(&self, q: usize, e: usize) -> Vec<i64> {
        self.dual_vec(self.dual.u(self.dual_of[q], e))
    }

    pub fn mono(&self, v: &[i64]) -> LaurentPoly {
        LaurentPoly::from_int_exponents(&self.joint, v, Rat::one())
    }

    pub fn point_label(&self, p: usize) -> String {
        self.x.label(p)
    }

    pub fn dual_label(&self, q: usize) -> String {
        format!("{}!", self.dual.label(self.dual_of[q]))
    }

    pub fn zeta(&self) -> &[i64] {
        &self.x.data.zeta
    }

    pub fn eta(&self) -> &[i64] {
        &self.x.data.eta
    }

    /// Standard half tangent space at `p` and at `q^!`, in the joint lattice.
    pub fn half_tangent_x(&self, p: usize) -> LaurentPoly {
        self.embed_x(&self.x.polarization_restriction(&vec![Coord::X; self.x.n()], p))
    }

    pub fn half_tangent_dual(&self, q: usize) -> LaurentPoly {
        self.embed_dual(&self.dual.polarization_restriction(&vec![Coord::X; self.x.n()], self.dual_of[q]))
    }

    pub fn tangent_x(&self, p: usize) -> LaurentPoly {
        self.embed_x(&self.x.tangent_class(p))
    }

    pub fn tangent_dual(&self, q: usize) -> LaurentPoly {
        self.embed_dual(&self.dual.tangent_class(self.dual_of[q]))
    }
}

/// Which character of each coordinate enters `V′`; coordinates not listed
/// are absent.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SubspaceSpec {
    pub entries: Vec<(usize, Coord)>,
}

impl SubspaceSpec {
    /// `V′ = V`: every coordinate with its `x` character.
    pub fn full(n: usize) -> Self {
        SubspaceSpec { entries: (0..n).map(|e| (e, Coord::X)).collect() }
    }

    pub fn union(&self, o: &Self) -> Self {
        let mut entries = self.entries.clone();
        entries.extend(o.entries.iter().cloned());
        SubspaceSpec { entries }
    }
}

/// `ξ(V′)|_{p × q^!}`: a product of `(1 − u ǔ)` for `x` flags and
/// `(1 − u⁻¹ ǔ⁻¹)` for `y` flags.
pub fn xi_restriction(pair: &DualPair, spec: &SubspaceSpec, p: usize, q: usize) -> LaurentPoly {
    let one = LaurentPoly::one(&pair.joint);
    let mut out = one.clone();
    for &(e, flag) in &spec.entries {
        let w: Vec<i64> = pair.u(p, e).iter().zip(pair.u_dual(q, e)).map(|(a, b)| a + b).collect();
        let w = match flag {
            Coord::X => w,
            Coord::Y => w.iter().map(|x| -x).collect(),
        };
        out = &out * &(&one - &pair.mono(&w));
    }
    out
}

/// `q`'s attracting set contains `p`: for every `e ∈ b_q ∩ b_p^c`,
/// `⟨α^q_e, ζ⟩ · ⟨β^p_e, η⟩ > 0`.
pub fn attr_member(space: &Space, q: usize, p: usize, zeta: &[i64], eta: &[i64]) -> bool {
    let pq = &space.points[q];
    let pp = &space.points[p];
    pq.base.iter().filter(|e| !pp.contains(**e)).all(|&e| {
        dot(pq.alpha(e).unwrap(), zeta) * dot(pp.beta_p(e).unwrap(), eta) > 0
    })
}

pub fn attr_n_member(pair: &DualPair, q: usize, p: usize, zeta: &[i64], eta: &[i64]) -> bool {
    attr_member(&pair.x, q, p, zeta, eta)
}

#[derive(Debug, Clone, Serialize)]
pub struct XiEntry {
    pub p: String,
    pub q: String,
    pub value: String,
    pub zero: bool,
    pub member: bool,
}

#[derive(Debug, Clone)]
pub struct XiMatrix {
    pub entries: Vec<Vec<LaurentPoly>>,
}

pub fn xi_matrix(pair: &DualPair) -> XiMatrix {
    let spec = SubspaceSpec::full(pair.x.n());
    let n = pair.len();
    XiMatrix {
        entries: (0..n).map(|p| (0..n).map(|q| xi_restriction(pair, &spec, p, q)).collect()).collect(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VanishingReport {
    /// Nonzero entries whose pair fails the membership test.
    pub violations: Vec<(String, String)>,
    /// Zero entries whose pair passes the membership test.
    pub converse_violations: Vec<(String, String)>,
    pub table: Vec<XiEntry>,
}

impl VanishingReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn exact(&self) -> bool {
        self.violations.is_empty() && self.converse_violations.is_empty()
    }
}

pub fn check_vanishing(pair: &DualPair, m: &XiMatrix) -> VanishingReport {
    let (zeta, eta) = (pair.zeta().to_vec(), pair.eta().to_vec());
    let mut rep = VanishingReport { violations: vec![], converse_violations: vec![], table: vec![] };
    for p in 0..pair.len() {
        for q in 0..pair.len() {
            let v = &m.entries[p][q];
            let member = attr_n_member(pair, q, p, &zeta, &eta);
            let labels = (pair.point_label(p), pair.dual_label(q));
            if !v.is_zero() && !member {
                rep.violations.push(labels.clone());
            }
            if v.is_zero() && member {
                rep.converse_violations.push(labels.clone());
            }
            rep.table.push(XiEntry { p: labels.0, q: labels.1, value: v.to_text(), zero: v.is_zero(), member });
        }
    }
    rep
}

#[derive(Debug, Clone, Serialize)]
pub struct DegreeBoundReport {
    pub offdiagonal_failures: Vec<(String, String)>,
    pub diagonal_failures: Vec<(String, String)>,
    pub offdiagonal_checked: usize,
}

impl DegreeBoundReport {
    pub fn pass(&self) -> bool {
        self.offdiagonal_failures.is_empty() && self.diagonal_failures.is_empty()
    }
}

fn wedge_product_of_bases(pair: &DualPair, p: usize, q: usize) -> LaurentPoly {
    let one = LaurentPoly::one(&pair.joint);
    let mut g = one.clone();
    for &e in &pair.x.points[p].base {
        g = &g * &(&one - &pair.mono(&pair.u(p, e)));
    }
    for &e in &pair.dual.points[pair.dual_of[q]].base {
        g = &g * &(&one - &pair.mono(&pair.u_dual(q, e)));
    }
    g
}

/// Off the diagonal the `𝔸 × G^∨`-degree of `ξ_{p×q^!}` lies in that of
/// `∏_{e∈b_p}(1−u_e) ∏_{e∈b_{q^!}}(1−ǔ_e)`; on the diagonal `ξ` equals
/// `∧•T^{1/2}_p ⊗ ∧•T^{1/2}_{p^!}` once ℏ is set to one.
pub fn check_degree_bound(pair: &DualPair, m: &XiMatrix) -> DegreeBoundReport {
    let axes = pair.torus_axes();
    let h = pair.h_axis();
    let mut rep = DegreeBoundReport { offdiagonal_failures: vec![], diagonal_failures: vec![], offdiagonal_checked: 0 };
    for p in 0..pair.len() {
        for q in 0..pair.len() {
            let v = &m.entries[p][q];
            let labels = (pair.point_label(p), pair.dual_label(q));
            if p != q {
                if v.is_zero() {
                    continue;
                }
                rep.offdiagonal_checked += 1;
                let g = wedge_product_of_bases(pair, p, q);
                let ok = deg_a(v, &axes).unwrap().contained_in(&deg_a(&g, &axes).unwrap());
                if !ok {
                    rep.offdiagonal_failures.push(labels);
                }
            } else {
                let lhs = RationalChar::from_poly(v.kill_axis(h));
                let half = (&pair.half_tangent_x(p) + &pair.half_tangent_dual(q)).kill_axis(h);
                let rhs = wedge_star_omitting_trivial(&half).expect("integer class");
                if lhs != rhs {
                    rep.diagonal_failures.push(labels);
                }
            }
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::arrangements::*;

    #[test]
    fn tp1_membership() {
        let pair = DualPair::new(&tp1());
        let (z, e) = (vec![1], vec![1]);
        assert!(attr_n_member(&pair, 0, 0, &z, &e));
        assert!(!attr_n_member(&pair, 1, 0, &z, &e));
        assert!(attr_n_member(&pair, 0, 1, &z, &e));
    }

    #[test]
    fn vanishing_and_bounds() {
        for (name, d) in all() {
            let pair = DualPair::new(&d);
            let m = xi_matrix(&pair);
            let v = check_vanishing(&pair, &m);
            assert!(v.exact(), "{name}: {v:?}");
            let b = check_degree_bound(&pair, &m);
            assert!(b.pass(), "{name}: {b:?}");
        }
    }

    #[test]
    fn empty_spec_and_multiplicativity() {
        let pair = DualPair::new(&tp2());
        let one = LaurentPoly::one(&pair.joint);
        assert_eq!(xi_restriction(&pair, &SubspaceSpec::default(), 0, 1), one);
        let a = SubspaceSpec { entries: vec![(0, Coord::X), (2, Coord::Y)] };
        let b = SubspaceSpec { entries: vec![(1, Coord::X)] };
        for p in 0..3 {
            for q in 0..3 {
                assert_eq!(
                    xi_restriction(&pair, &a.union(&b), p, q),
                    &xi_restriction(&pair, &a, p, q) * &xi_restriction(&pair, &b, p, q)
                );
            }
        }
    }
}
