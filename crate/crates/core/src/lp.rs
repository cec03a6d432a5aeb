//! Exact two-phase simplex over the rationals with Bland's rule.

use num_traits::{One, Signed, Zero};

use crate::Rat;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal { value: Rat, x: Vec<Rat> },
}

struct Tableau {
    // rows: constraint rows, each of length cols + 1 (last entry is rhs)
    rows: Vec<Vec<Rat>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for x in self.rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..self.rows.len() {
            if i != r && !self.rows[i][c].is_zero() {
                let f = self.rows[i][c].clone();
                for j in 0..=self.cols {
                    let v = &self.rows[r][j] * &f;
                    self.rows[i][j] -= v;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Maximise `obj · x` over the current basis; `allowed` masks columns
    /// that may enter. Returns false when unbounded.
    fn optimise(&mut self, obj: &[Rat], allowed: &[bool]) -> bool {
        loop {
            // reduced cost of column j: obj_j - sum_i obj_{basis_i} * a_ij
            let entering = (0..self.cols).find(|&j| {
                allowed[j] && !self.basis.contains(&j) && {
                    let mut rc = obj[j].clone();
                    for (i, &b) in self.basis.iter().enumerate() {
                        rc -= &obj[b] * &self.rows[i][j];
                    }
                    rc.is_positive()
                }
            });
            let Some(c) = entering else { return true };
            let mut best: Option<(usize, Rat)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if a.is_positive() {
                    let ratio = &self.rows[i][self.cols] / a;
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            let Some((r, _)) = best else { return false };
            self.pivot(r, c);
        }
    }
}

/// Maximise `c·x` subject to `A x = b`, `x ≥ 0`.
pub fn maximize(a: &[Vec<Rat>], b: &[Rat], c: &[Rat]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    let cols = n + m;
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let neg = b[i].is_negative();
        let mut row: Vec<Rat> =
            a[i].iter().map(|x| if neg { -x.clone() } else { x.clone() }).collect();
        row.extend((0..m).map(|j| if j == i { Rat::one() } else { Rat::zero() }));
        row.push(if neg { -b[i].clone() } else { b[i].clone() });
        rows.push(row);
    }
    let mut t = Tableau { rows, basis: (n..n + m).collect(), cols };

    // phase one: maximise -(sum of artificials)
    let mut obj1 = vec![Rat::zero(); cols];
    for o in obj1.iter_mut().skip(n) {
        *o = -Rat::one();
    }
    let all = vec![true; cols];
    t.optimise(&obj1, &all);
    let infeas: Rat = t
        .basis
        .iter()
        .enumerate()
        .filter(|(_, &bcol)| bcol >= n)
        .map(|(i, _)| t.rows[i][cols].clone())
        .sum();
    if infeas.is_positive() {
        return LpOutcome::Infeasible;
    }
    // drive remaining artificials out of the basis, dropping redundant rows
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= n {
            match (0..n).find(|&j| !t.rows[i][j].is_zero()) {
                Some(j) => {
                    t.pivot(i, j);
                    i += 1;
                }
                None => {
                    t.rows.remove(i);
                    t.basis.remove(i);
                }
            }
        } else {
            i += 1;
        }
    }

    let mut obj2 = c.to_vec();
    obj2.extend((0..m).map(|_| Rat::zero()));
    let mut allowed = vec![true; cols];
    for x in allowed.iter_mut().skip(n) {
        *x = false;
    }
    if !t.optimise(&obj2, &allowed) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Rat::zero(); n];
    for (i, &bcol) in t.basis.iter().enumerate() {
        if bcol < n {
            x[bcol] = t.rows[i][cols].clone();
        }
    }
    let value = x.iter().zip(c).map(|(xi, ci)| xi * ci).sum();
    LpOutcome::Optimal { value, x }
}

/// Largest `s` such that `x = Σ λ_i g_i` with `Σ λ_i = 1` and every
/// `λ_i ≥ s`; `None` when `x` is outside the affine hull or `s < 0` is forced
/// (i.e. `x` is not in the convex hull).
pub fn max_min_weight(points: &[Vec<Rat>], x: &[Rat]) -> Option<Rat> {
    let m = points.len();
    if m == 0 {
        return None;
    }
    let d = x.len();
    // variables: mu_1..mu_m >= 0, s+ >= 0, s- >= 0 with lambda_i = s + mu_i
    let n = m + 2;
    let mut a = Vec::with_capacity(d + 1);
    for k in 0..d {
        let mut row: Vec<Rat> = points.iter().map(|p| p[k].clone()).collect();
        let sum: Rat = points.iter().map(|p| p[k].clone()).sum();
        row.push(sum.clone());
        row.push(-sum);
        a.push(row);
    }
    let mut row = vec![Rat::one(); m];
    let mm = Rat::from_integer((m as i64).into());
    row.push(mm.clone());
    row.push(-mm);
    a.push(row);
    let mut b: Vec<Rat> = x.to_vec();
    b.push(Rat::one());
    let mut c = vec![Rat::zero(); n];
    c[m] = Rat::one();
    c[m + 1] = -Rat::one();
    match maximize(&a, &b, &c) {
        LpOutcome::Optimal { value, .. } if !value.is_negative() => Some(value),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{int, rat};

    fn pts(v: &[&[i64]]) -> Vec<Vec<Rat>> {
        v.iter().map(|p| p.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn small_lp() {
        // max x + y, x + 2y + s1 = 4, 3x + y + s2 = 6
        let a = vec![
            vec![int(1), int(2), int(1), int(0)],
            vec![int(3), int(1), int(0), int(1)],
        ];
        let r = maximize(&a, &[int(4), int(6)], &[int(1), int(1), int(0), int(0)]);
        match r {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, rat(14, 5)),
            other => panic!("{other:?}"),
        }
        assert_eq!(maximize(&[vec![int(1)]], &[int(-1)], &[int(1)]), LpOutcome::Infeasible);
        assert_eq!(
            maximize(&[vec![int(1), int(-1)]], &[int(0)], &[int(1), int(0)]),
            LpOutcome::Unbounded
        );
    }

    #[test]
    fn hull_weights() {
        let square = pts(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        assert_eq!(max_min_weight(&square, &[rat(1, 2), rat(1, 2)]), Some(rat(1, 4)));
        assert_eq!(max_min_weight(&square, &[int(1), rat(1, 2)]), Some(int(0)));
        assert_eq!(max_min_weight(&square, &[int(2), int(0)]), None);
        let seg = pts(&[&[0], &[1]]);
        assert_eq!(max_min_weight(&seg, &[int(0)]), Some(int(0)));
        assert_eq!(max_min_weight(&seg, &[rat(1, 3)]), Some(rat(1, 3)));
    }
}
