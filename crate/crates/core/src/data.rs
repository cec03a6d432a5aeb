//! Hypertoric input data, validation, bases (fixed points) and Gale duality.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::linalg::{self, IMat};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum DataError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("input is not valid JSON for hypertoric data: {0}")]
    Json(String),
}

/// The exact sequence `0 → 𝔤 --∂--> ℤ^E --β--> 𝔞 → 0` together with a GIT
/// character `eta` of G and a cocharacter `zeta` of A.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypertoricData {
    #[serde(rename = "E")]
    pub labels: Vec<String>,
    pub partial: IMat,
    pub beta: IMat,
    pub eta: Vec<i64>,
    pub zeta: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckOutcome>,
}

impl ValidationReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// A base `b ⊂ E`, i.e. a torus-fixed point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedPoint {
    pub base: Vec<usize>,
    pub complement: Vec<usize>,
    /// `alpha[i]` is `α^b_e` for `e = base[i]`: the rows of `β_b⁻¹`.
    pub alpha: IMat,
    /// `beta_p[i]` is `β^p_e` for `e = complement[i]`: the columns of
    /// `(∂ restricted to the rows b^c)⁻¹`.
    pub beta_p: IMat,
}

impl FixedPoint {
    pub fn contains(&self, e: usize) -> bool {
        self.base.contains(&e)
    }

    pub fn alpha(&self, e: usize) -> Option<&[i64]> {
        self.base.iter().position(|&x| x == e).map(|i| self.alpha[i].as_slice())
    }

    pub fn beta_p(&self, e: usize) -> Option<&[i64]> {
        self.complement.iter().position(|&x| x == e).map(|i| self.beta_p[i].as_slice())
    }

    pub fn label(&self, labels: &[String]) -> String {
        format!("{{{}}}", self.base.iter().map(|&e| labels[e].as_str()).join(","))
    }
}

pub(crate) fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl HypertoricData {
    pub fn from_json(text: &str) -> Result<Self, DataError> {
        let d: HypertoricData =
            serde_json::from_str(text).map_err(|e| DataError::Json(e.to_string()))?;
        d.check_dimensions()?;
        Ok(d)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serialisable")
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn k(&self) -> usize {
        self.eta.len()
    }

    /// Rank of A, `n − k`.
    pub fn r(&self) -> usize {
        self.zeta.len()
    }

    pub fn check_dimensions(&self) -> Result<(), DataError> {
        let n = self.n();
        let k = self.k();
        let r = self.r();
        let err = |m: String| Err(DataError::Dimension(m));
        if self.partial.len() != n {
            return err(format!("partial has {} rows, expected |E| = {n}", self.partial.len()));
        }
        if let Some(i) = self.partial.iter().position(|row| row.len() != k) {
            return err(format!("partial row {i} has length {}, expected k = {k}", self.partial[i].len()));
        }
        if self.beta.len() != r {
            return err(format!("beta has {} rows, expected |zeta| = {r}", self.beta.len()));
        }
        if let Some(i) = self.beta.iter().position(|row| row.len() != n) {
            return err(format!("beta row {i} has length {}, expected |E| = {n}", self.beta[i].len()));
        }
        if r + k != n {
            return err(format!("|eta| + |zeta| = {} but |E| = {n}", r + k));
        }
        let distinct: BTreeSet<&String> = self.labels.iter().collect();
        if distinct.len() != n {
            return err("labels in E are not distinct".into());
        }
        Ok(())
    }

    /// Every invariant of the input, each with a witness on failure.
    pub fn validate(&self) -> Result<ValidationReport, DataError> {
        self.check_dimensions()?;
        let n = self.n();
        let k = self.k();
        let r = self.r();
        let mut checks = Vec::new();
        let mut push = |name: &str, pass: bool, detail: String| {
            checks.push(CheckOutcome { name: name.into(), pass, detail })
        };

        let prod = linalg::mat_mul(&self.beta, &self.partial);
        let composite_zero = prod.iter().flatten().all(|&x| x == 0);
        push(
            "composite_zero",
            composite_zero,
            if composite_zero { "beta * partial = 0".into() } else { format!("beta * partial = {prod:?}") },
        );

        let rp = linalg::rank(&self.partial);
        let rb = linalg::rank(&self.beta);
        push("rank_partial", rp == k, format!("rank {rp}, expected {k}"));
        push("rank_beta", rb == r, format!("rank {rb}, expected {r}"));

        let inv = linalg::smith_invariants(&self.partial);
        let torsion_free = inv.len() == k && inv.iter().all(|d| d.is_one());
        push(
            "cokernel_torsion_free",
            torsion_free,
            format!("invariant factors of partial: {:?}", inv.iter().map(|d| d.to_string()).collect_vec()),
        );

        let witness = self.unimodularity_witness();
        push(
            "totally_unimodular",
            witness.is_none(),
            match &witness {
                None => "every square submatrix of beta has determinant in {-1,0,1}".into(),
                Some((rows, cols, d)) => format!("rows {rows:?} cols {cols:?} of beta have determinant {d}"),
            },
        );

        let coloop = (0..n).find(|&e| self.beta.iter().all(|row| row[e] == 0));
        push(
            "no_single_coordinate_cocharacter",
            coloop.is_none(),
            match coloop {
                None => "no cocharacter of G acts on a single coordinate".into(),
                Some(e) => format!("G contains the coordinate circle of {}", self.labels[e]),
            },
        );

        let wall = self.eta_wall();
        push(
            "eta_generic",
            wall.is_none(),
            match &wall {
                None => "eta avoids every wall spanned by k-1 rows of partial".into(),
                Some((idx, normal)) => format!(
                    "eta lies on the wall spanned by rows {:?} (normal {normal:?})",
                    idx.iter().map(|&e| &self.labels[e]).collect_vec()
                ),
            },
        );

        let structural = composite_zero && rp == k && rb == r && witness.is_none();
        if structural {
            let pts = self.enumerate_bases();
            let bad = pts.iter().find_map(|p| {
                p.base
                    .iter()
                    .zip(&p.alpha)
                    .find(|(_, a)| dot(a, &self.zeta) == 0)
                    .map(|(&e, _)| (p.label(&self.labels), self.labels[e].clone()))
            });
            push(
                "zeta_generic",
                bad.is_none(),
                match &bad {
                    None => format!("<alpha, zeta> != 0 at all {} fixed points", pts.len()),
                    Some((p, e)) => format!("<alpha^p_e, zeta> = 0 for p = {p}, e = {e}"),
                },
            );
            push(
                "fixed_points_exist",
                !pts.is_empty(),
                format!("{} fixed points", pts.len()),
            );
        } else {
            push("zeta_generic", false, "skipped: exact sequence checks failed".into());
        }
        Ok(ValidationReport { checks })
    }

    /// A square submatrix of β with determinant outside {-1, 0, 1}.
    pub fn unimodularity_witness(&self) -> Option<(Vec<usize>, Vec<usize>, String)> {
        let r = self.r();
        let n = self.n();
        for size in 1..=r.min(n) {
            for rows in (0..r).combinations(size) {
                for cols in (0..n).combinations(size) {
                    let d = linalg::det(&linalg::select(&self.beta, &rows, &cols));
                    if d.abs() > num_bigint::BigInt::one() {
                        return Some((rows, cols, d.to_string()));
                    }
                }
            }
        }
        None
    }

    /// A wall (hyperplane spanned by `k-1` rows of ∂) containing η.
    pub fn eta_wall(&self) -> Option<(Vec<usize>, Vec<i64>)> {
        let k = self.k();
        if k == 0 {
            return None;
        }
        for idx in (0..self.n()).combinations(k - 1) {
            let vs: IMat = idx.iter().map(|&e| self.partial[e].clone()).collect();
            if linalg::rank(&vs) != k - 1 {
                continue;
            }
            let normal = linalg::normal_vector(&vs, k);
            if dot(&normal, &self.eta) == 0 {
                return Some((idx, normal));
            }
        }
        None
    }

    /// All bases in lexicographic order, with their dual bases.
    pub fn enumerate_bases(&self) -> Vec<FixedPoint> {
        let n = self.n();
        let r = self.r();
        let mut out = Vec::new();
        for base in (0..n).combinations(r) {
            let cols = linalg::select(&self.beta, &(0..r).collect_vec(), &base);
            let d = linalg::det_i64(&cols);
            if d.abs() != 1 {
                continue;
            }
            out.push(self.fixed_point(&base).expect("unimodular base"));
        }
        out
    }

    pub fn fixed_point(&self, base: &[usize]) -> Option<FixedPoint> {
        let n = self.n();
        let r = self.r();
        let k = self.k();
        let complement: Vec<usize> = (0..n).filter(|e| !base.contains(e)).collect();
        let bmat = linalg::select(&self.beta, &(0..r).collect_vec(), base);
        let alpha = linalg::inverse_unimodular(&bmat)?;
        let pmat = linalg::select(&self.partial, &complement, &(0..k).collect_vec());
        let pinv = linalg::inverse_unimodular(&pmat)?;
        let beta_p = linalg::transpose(&pinv, complement.len());
        Some(FixedPoint { base: base.to_vec(), complement, alpha, beta_p })
    }

    /// `∂^! = βᵀ`, `β^! = ∂ᵀ`, `η^! = −ζ`, `ζ^! = −η`.
    pub fn gale_dual(&self) -> HypertoricData {
        HypertoricData {
            labels: self.labels.clone(),
            partial: linalg::transpose(&self.beta, self.n()),
            beta: linalg::transpose(&self.partial, self.k()),
            eta: self.zeta.iter().map(|x| -x).collect(),
            zeta: self.eta.iter().map(|x| -x).collect(),
        }
    }

    pub fn with_zeta(&self, zeta: Vec<i64>) -> HypertoricData {
        HypertoricData { zeta, ..self.clone() }
    }

    pub fn with_eta(&self, eta: Vec<i64>) -> HypertoricData {
        HypertoricData { eta, ..self.clone() }
    }
}

/// The fixed point of the dual data indexed by the complement of `p`'s base.
pub fn dual_point(dual: &HypertoricData, p: &FixedPoint) -> Option<FixedPoint> {
    dual.fixed_point(&p.complement)
}

/// For every `e ∈ b_p`, `α^p_e = β^{p^!}_e`.
pub fn alphabeta_holds(p: &FixedPoint, pd: &FixedPoint) -> bool {
    p.base.iter().all(|&e| p.alpha(e) == pd.beta_p(e))
}

/// `⟨α^b_e, β(e')⟩ = δ` on the base and `⟨∂_{e'}, β^p_e⟩ = δ` off it.
pub fn dual_basis_identities(data: &HypertoricData, p: &FixedPoint) -> bool {
    let col = |e: usize| -> Vec<i64> { data.beta.iter().map(|row| row[e]).collect() };
    let on = p.base.iter().all(|&e| {
        p.base.iter().all(|&f| dot(p.alpha(e).unwrap(), &col(f)) == i64::from(e == f))
    });
    let off = p.complement.iter().all(|&e| {
        p.complement.iter().all(|&f| dot(&data.partial[f], p.beta_p(e).unwrap()) == i64::from(e == f))
    });
    on && off
}

pub mod arrangements {
    use super::HypertoricData;

    fn labels(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("e{i}")).collect()
    }

    /// `T*P¹`.
    pub fn tp1() -> HypertoricData {
        HypertoricData {
            labels: labels(2),
            partial: vec![vec![1], vec![1]],
            beta: vec![vec![1, -1]],
            eta: vec![1],
            zeta: vec![1],
        }
    }

    /// `T*P²`.
    pub fn tp2() -> HypertoricData {
        HypertoricData {
            labels: labels(3),
            partial: vec![vec![1], vec![1], vec![1]],
            beta: vec![vec![1, 0, -1], vec![0, 1, -1]],
            eta: vec![1],
            zeta: vec![1, 2],
        }
    }

    /// A rank-two arrangement on four hyperplanes with five fixed points.
    pub fn rank2() -> HypertoricData {
        HypertoricData {
            labels: labels(4),
            partial: vec![vec![1, 1], vec![0, 1], vec![1, 0], vec![0, 1]],
            beta: vec![vec![1, 0, -1, -1], vec![0, 1, 0, -1]],
            eta: vec![2, 1],
            zeta: vec![3, 1],
        }
    }

    pub fn all() -> Vec<(&'static str, HypertoricData)> {
        vec![("tp1", tp1()), ("tp2", tp2()), ("rank2", rank2())]
    }
}

#[cfg(test)]
mod tests {
    use super::arrangements::*;
    use super::*;

    #[test]
    fn tp1_validates() {
        let rep = tp1().validate().unwrap();
        assert!(rep.pass(), "{rep:?}");
    }

    #[test]
    fn broken_inputs() {
        let d = HypertoricData {
            labels: vec!["a".into(), "b".into()],
            partial: vec![vec![2], vec![-1]],
            beta: vec![vec![1, 2]],
            eta: vec![1],
            zeta: vec![1],
        };
        let rep = d.validate().unwrap();
        assert!(!rep.get("totally_unimodular").unwrap().pass);
        let rep = tp1().with_eta(vec![0]).validate().unwrap();
        assert!(!rep.get("eta_generic").unwrap().pass);
        let bad = HypertoricData { partial: vec![vec![1]], ..tp1() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn bases() {
        let b: Vec<Vec<usize>> = tp1().enumerate_bases().into_iter().map(|p| p.base).collect();
        assert_eq!(b, vec![vec![0], vec![1]]);
        let b: Vec<Vec<usize>> = tp2().enumerate_bases().into_iter().map(|p| p.base).collect();
        assert_eq!(b, vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(rank2().enumerate_bases().len(), 5);
        let trivial = HypertoricData {
            labels: vec!["a".into()],
            partial: vec![vec![1]],
            beta: vec![],
            eta: vec![1],
            zeta: vec![],
        };
        let pts = trivial.enumerate_bases();
        assert_eq!(pts.len(), 1);
        assert!(pts[0].base.is_empty());
    }

    #[test]
    fn duality() {
        for (_, d) in all() {
            let dd = d.gale_dual();
            assert_eq!(dd.gale_dual(), d);
            let pts = d.enumerate_bases();
            assert_eq!(pts.len(), dd.enumerate_bases().len());
            for p in &pts {
                let pd = dual_point(&dd, p).unwrap();
                assert!(alphabeta_holds(p, &pd));
                assert!(dual_basis_identities(&d, p));
                assert_eq!(dual_point(&d, &pd).unwrap(), *p);
            }
        }
        let dd = tp1().gale_dual();
        assert_eq!(dd.partial, vec![vec![1], vec![-1]]);
        assert_eq!(dd.beta, vec![vec![1, 1]]);
    }
}
