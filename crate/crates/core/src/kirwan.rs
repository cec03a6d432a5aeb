//! Restriction of Kirwan classes to fixed points.
//!
//! A [`Space`] bundles validated data with its fixed points and the table of
//! restrictions `u_e|_p`, each a character of `A × ℂ^×_ℏ` stored as an
//! integer exponent vector `(a_1, …, a_r, h)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::One;
use serde::Serialize;

use crate::data::{dot, FixedPoint, HypertoricData};
use crate::lattice::{CharLattice, LaurentPoly};
use crate::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Coord {
    X,
    Y,
}

/// Which Darboux coordinate is nonzero at the lift of `p`, for each `e ∉ b_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedPoint {
    pub nonzero: BTreeMap<usize, Coord>,
}

/// A character `∏ χ_e^{m_e} · ℏ^h` of `D × ℂ^×_ℏ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DCharacter {
    pub m: Vec<i64>,
    pub h: i64,
}

impl DCharacter {
    pub fn coordinate(n: usize, e: usize) -> Self {
        let mut m = vec![0; n];
        m[e] = 1;
        DCharacter { m, h: 0 }
    }

    /// The character `ℏ χ_e^{-1}` of the dual Darboux coordinate `y_e`.
    pub fn dual_coordinate(n: usize, e: usize) -> Self {
        let mut m = vec![0; n];
        m[e] = -1;
        DCharacter { m, h: 1 }
    }

    pub fn trivial(n: usize) -> Self {
        DCharacter { m: vec![0; n], h: 0 }
    }

    pub fn mul(&self, o: &Self) -> Self {
        DCharacter { m: self.m.iter().zip(&o.m).map(|(a, b)| a + b).collect(), h: self.h + o.h }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightType {
    Attracting,
    Repelling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarization {
    Standard,
    Opposite,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum KirwanError {
    #[error("chamber {chamber:?} is not generic: <alpha^p_e, chamber> = 0 at p = {point}, e = {e}")]
    NonGeneric { chamber: Vec<i64>, point: String, e: String },
    #[error("lift inconsistent at {0}")]
    LiftInconsistent(String),
}

#[derive(Debug, Clone)]
pub struct Space {
    pub data: HypertoricData,
    pub points: Vec<FixedPoint>,
    pub lattice: Arc<CharLattice>,
    lifts: Vec<LiftedPoint>,
    u: Vec<Vec<Vec<i64>>>,
}

impl Space {
    /// Build the restriction tables; `prefix` names the A-axes
    /// (`t1, t2, …` or `z1, z2, …`). The ℏ axis is always `h`.
    pub fn new(data: HypertoricData, prefix: &str) -> Self {
        let points = data.enumerate_bases();
        let mut labels: Vec<String> = (1..=data.r()).map(|i| format!("{prefix}{i}")).collect();
        labels.push("h".into());
        let lattice = CharLattice::new(labels, 2).expect("distinct labels");
        let lifts: Vec<LiftedPoint> = points
            .iter()
            .map(|p| LiftedPoint {
                nonzero: p
                    .complement
                    .iter()
                    .map(|&e| {
                        let c = if dot(p.beta_p(e).unwrap(), &data.eta) > 0 { Coord::Y } else { Coord::X };
                        (e, c)
                    })
                    .collect(),
            })
            .collect();
        let mut s = Space { data, points, lattice, lifts, u: Vec::new() };
        let n = s.data.n();
        s.u = (0..s.points.len())
            .map(|pi| {
                (0..n)
                    .map(|e| s.restrict_character(pi, &DCharacter::coordinate(n, e)).expect("validated data"))
                    .collect()
            })
            .collect();
        s
    }

    pub fn n(&self) -> usize {
        self.data.n()
    }

    pub fn r(&self) -> usize {
        self.data.r()
    }

    pub fn h_axis(&self) -> usize {
        self.data.r()
    }

    pub fn a_axes(&self) -> Vec<usize> {
        (0..self.data.r()).collect()
    }

    pub fn lift(&self, pi: usize) -> &LiftedPoint {
        &self.lifts[pi]
    }

    pub fn point_index(&self, base: &[usize]) -> Option<usize> {
        self.points.iter().position(|p| p.base == base)
    }

    pub fn label(&self, pi: usize) -> String {
        self.points[pi].label(&self.data.labels)
    }

    /// Restrict a character of `D × ℂ^×_ℏ` to the fixed point `pi` through
    /// the stabiliser of its lift, which projects isomorphically onto
    /// `A × ℂ^×_ℏ`. Returns integer exponents `(a_1..a_r, h)`.
    pub fn restrict_character(&self, pi: usize, lambda: &DCharacter) -> Result<Vec<i64>, KirwanError> {
        let p = &self.points[pi];
        let lift = &self.lifts[pi];
        let r = self.r();
        let n = self.n();
        let y_sum: Vec<i64> = (0..r)
            .map(|i| {
                lift.nonzero.iter().filter(|(_, c)| **c == Coord::Y).map(|(&e, _)| self.data.beta[i][e]).sum()
            })
            .collect();
        // cocharacter of the stabiliser lying over (a, c) ∈ 𝔞 × ℤ
        let lift_cochar = |a: &[i64], c: i64| -> Vec<i64> {
            let target: Vec<i64> = a.iter().zip(&y_sum).map(|(x, y)| x - c * y).collect();
            let mut d = vec![0i64; n];
            for (i, &e) in p.base.iter().enumerate() {
                d[e] = dot(&p.alpha[i], &target);
            }
            for (&e, coord) in &lift.nonzero {
                d[e] = if *coord == Coord::Y { c } else { 0 };
            }
            d
        };
        let mut out = Vec::with_capacity(r + 1);
        for i in 0..=r {
            let (a, c) = if i < r {
                let mut a = vec![0; r];
                a[i] = 1;
                (a, 0)
            } else {
                (vec![0; r], 1)
            };
            let d = lift_cochar(&a, c);
            let image: Vec<i64> = (0..r).map(|j| (0..n).map(|e| self.data.beta[j][e] * d[e]).sum()).collect();
            if image != a {
                return Err(KirwanError::LiftInconsistent(self.label(pi)));
            }
            out.push(dot(&lambda.m, &d) + lambda.h * c);
        }
        Ok(out)
    }

    /// Integer exponents of `u_e|_p`.
    pub fn u(&self, pi: usize, e: usize) -> &[i64] {
        &self.u[pi][e]
    }

    pub fn u_poly(&self, pi: usize, e: usize) -> LaurentPoly {
        LaurentPoly::from_int_exponents(&self.lattice, &self.u[pi][e], Rat::one())
    }

    pub fn epsilon(&self, pi: usize, e: usize) -> i64 {
        self.u[pi][e][self.r()]
    }

    pub fn a_part<'a>(&self, v: &'a [i64]) -> &'a [i64] {
        &v[..self.r()]
    }

    /// `Σ_e` restriction of the chosen Darboux character of each coordinate.
    pub fn polarization_restriction(&self, flags: &[Coord], pi: usize) -> LaurentPoly {
        let n = self.n();
        let mut out = LaurentPoly::zero(&self.lattice);
        for (e, f) in flags.iter().enumerate() {
            let ch = match f {
                Coord::X => DCharacter::coordinate(n, e),
                Coord::Y => DCharacter::dual_coordinate(n, e),
            };
            let v = self.restrict_character(pi, &ch).expect("validated data");
            out = &out + &LaurentPoly::from_int_exponents(&self.lattice, &v, Rat::one());
        }
        out
    }

    pub fn half_tangent(&self, pol: Polarization, pi: usize) -> LaurentPoly {
        let std = self.polarization_restriction(&vec![Coord::X; self.n()], pi);
        match pol {
            Polarization::Standard => std,
            Polarization::Opposite => &self.tangent_class(pi) - &std,
        }
    }

    /// `Σ_{e∈b_p} (w_e + ℏ w_e^{-1})`.
    pub fn tangent_class(&self, pi: usize) -> LaurentPoly {
        let mut out = LaurentPoly::zero(&self.lattice);
        let h = self.hbar();
        for &e in &self.points[pi].base {
            let w = self.u_poly(pi, e);
            out = &out + &w;
            out = &out + &(&h * &w.monomial_inverse().unwrap());
        }
        out
    }

    pub fn hbar(&self) -> LaurentPoly {
        let mut v = vec![0; self.r() + 1];
        v[self.r()] = 1;
        LaurentPoly::from_int_exponents(&self.lattice, &v, Rat::one())
    }

    pub fn classify_weight(&self, pi: usize, e: usize, chamber: &[i64]) -> Result<WeightType, KirwanError> {
        let a = self.points[pi].alpha(e).expect("e in base");
        match dot(a, chamber) {
            0 => Err(KirwanError::NonGeneric {
                chamber: chamber.to_vec(),
                point: self.label(pi),
                e: self.data.labels[e].clone(),
            }),
            x if x > 0 => Ok(WeightType::Attracting),
            _ => Ok(WeightType::Repelling),
        }
    }

    pub fn check_chamber(&self, chamber: &[i64]) -> Result<(), KirwanError> {
        for pi in 0..self.points.len() {
            for &e in &self.points[pi].base {
                self.classify_weight(pi, e, chamber)?;
            }
        }
        Ok(())
    }

    /// `rk ind_p = #{e ∈ b_p : ⟨α^p_e, chamber⟩ > 0}`.
    pub fn rank_ind(&self, pi: usize, chamber: &[i64]) -> usize {
        let p = &self.points[pi];
        p.alpha.iter().filter(|a| dot(a, chamber) > 0).count()
    }

    /// Lemma-level self tests on the restriction table: ℏ-exponent off the
    /// base, A-part on the base. Returns a description of the first failure.
    pub fn self_test(&self) -> Result<(), String> {
        for (pi, p) in self.points.iter().enumerate() {
            for &e in &p.complement {
                let want = i64::from(dot(p.beta_p(e).unwrap(), &self.data.eta) > 0);
                let u = self.u(pi, e);
                if self.a_part(u).iter().any(|&x| x != 0) || u[self.r()] != want {
                    return Err(format!("u_{e}|_{} = {u:?}, expected h^{want}", self.label(pi)));
                }
            }
            for &e in &p.base {
                if self.a_part(self.u(pi, e)) != p.alpha(e).unwrap() {
                    return Err(format!("A-part of u_{e}|_{} differs from alpha", self.label(pi)));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::arrangements::*;

    #[test]
    fn tp1_restrictions() {
        let s = Space::new(tp1(), "t");
        // p = {e1}: u_2 = h, u_1 has A-part alpha = 1
        assert_eq!(s.u(0, 1), &[0, 1]);
        assert_eq!(s.a_part(s.u(0, 0)), &[1]);
        assert_eq!(s.epsilon(0, 1), 1);
        let s2 = Space::new(tp1().with_eta(vec![-1]), "t");
        assert_eq!(s2.epsilon(0, 1), 0);
        let triv = DCharacter::trivial(2);
        assert_eq!(s.restrict_character(0, &triv).unwrap(), vec![0, 0]);
        assert_eq!(s.classify_weight(0, 0, &[1]).unwrap(), WeightType::Attracting);
        assert_eq!(s.classify_weight(0, 0, &[-1]).unwrap(), WeightType::Repelling);
        assert_eq!(s.classify_weight(1, 1, &[1]).unwrap(), WeightType::Repelling);
    }

    #[test]
    fn self_tests_pass() {
        for (_, d) in all() {
            let s = Space::new(d.clone(), "t");
            s.self_test().unwrap();
            Space::new(d.gale_dual(), "z").self_test().unwrap();
        }
    }

    #[test]
    fn multiplicative_and_polarized() {
        let s = Space::new(tp2(), "t");
        let a = DCharacter { m: vec![1, -2, 0], h: 1 };
        let b = DCharacter { m: vec![0, 3, 1], h: -2 };
        for pi in 0..s.points.len() {
            let ra = s.restrict_character(pi, &a).unwrap();
            let rb = s.restrict_character(pi, &b).unwrap();
            let rab = s.restrict_character(pi, &a.mul(&b)).unwrap();
            assert_eq!(rab, ra.iter().zip(&rb).map(|(x, y)| x + y).collect::<Vec<_>>());
            let t = s.tangent_class(pi);
            let opp = s.half_tangent(Polarization::Opposite, pi);
            let std = s.half_tangent(Polarization::Standard, pi);
            assert_eq!(&opp + &std, t);
            let total: Rat = t.terms().map(|(_, c)| c.clone()).sum();
            assert_eq!(total, crate::int(2 * s.r() as i64));
        }
    }
}
