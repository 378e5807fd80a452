//! Exact-rational linear programming over the nonnegative orthant.
//!
//! [`maximize`] is a dense two-phase simplex method with Bland's rule, so
//! it terminates on the heavily degenerate systems produced by ratio
//! constraints. [`fourier_motzkin_feasible`] decides feasibility by
//! elimination and serves as an independent check on small systems.

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Relation {
    Le,
    Eq,
}

/// `coeffs · x (≤ | =) rhs`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn le(coeffs: Vec<Rational>, rhs: Rational) -> Constraint {
        Constraint {
            coeffs,
            relation: Relation::Le,
            rhs,
        }
    }

    pub fn eq(coeffs: Vec<Rational>, rhs: Rational) -> Constraint {
        Constraint {
            coeffs,
            relation: Relation::Eq,
            rhs,
        }
    }

    pub fn holds(&self, x: &[Rational]) -> bool {
        let lhs: Rational = self.coeffs.iter().zip(x).map(|(a, b)| a * b).sum();
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Eq => lhs == self.rhs,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal { value: Rational, point: Vec<Rational> },
}

impl LpOutcome {
    pub fn point(&self) -> Option<&[Rational]> {
        match self {
            LpOutcome::Optimal { point, .. } => Some(point),
            _ => None,
        }
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn pivot(&mut self, obj: &mut [Rational], r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v /= &p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    if !pv.is_zero() {
                        *v -= &f * pv;
                    }
                }
            }
        }
        if !obj[c].is_zero() {
            let f = obj[c].clone();
            for (v, pv) in obj.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Runs to optimality with Bland's rule. Returns false if unbounded.
    fn run(&mut self, obj: &mut [Rational], allowed: usize) -> bool {
        loop {
            let Some(c) = (0..allowed).find(|&j| obj[j].is_negative()) else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                if row[c].is_positive() {
                    let ratio = &row[self.width] / &row[c];
                    let better = match &best {
                        None => true,
                        Some((br, bv)) => ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br]),
                    };
                    if better {
                        best = Some((r, ratio));
                    }
                }
            }
            match best {
                Some((r, _)) => self.pivot(obj, r, c),
                None => return false,
            }
        }
    }
}

/// Maximizes `objective · x` subject to `constraints` and `x ≥ 0`.
pub fn maximize(objective: &[Rational], constraints: &[Constraint]) -> LpOutcome {
    let n = objective.len();
    let m = constraints.len();
    let slack_count = constraints.iter().filter(|c| c.relation == Relation::Le).count();
    let mut needs_artificial = Vec::with_capacity(m);
    for c in constraints {
        needs_artificial.push(c.relation == Relation::Eq || c.rhs.is_negative());
    }
    let art_count = needs_artificial.iter().filter(|&&b| b).count();
    let width = n + slack_count + art_count;
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut slack = n;
    let mut art = n + slack_count;
    for (c, &needs) in constraints.iter().zip(&needs_artificial) {
        assert_eq!(c.coeffs.len(), n, "constraint width differs from objective");
        let mut row = vec![Rational::zero(); width + 1];
        let sign = if c.rhs.is_negative() {
            -Rational::one()
        } else {
            Rational::one()
        };
        for (j, a) in c.coeffs.iter().enumerate() {
            row[j] = a * &sign;
        }
        row[width] = &c.rhs * &sign;
        if c.relation == Relation::Le {
            row[slack] = sign.clone();
            if !needs {
                basis.push(slack);
            }
            slack += 1;
        }
        if needs {
            row[art] = Rational::one();
            basis.push(art);
            art += 1;
        }
        rows.push(row);
    }
    let mut t = Tableau { rows, basis, width };
    let first_art = n + slack_count;

    if art_count > 0 {
        let mut obj = vec![Rational::zero(); width + 1];
        for v in obj.iter_mut().take(width).skip(first_art) {
            *v = Rational::one();
        }
        for r in 0..m {
            if t.basis[r] >= first_art {
                for (v, x) in obj.iter_mut().zip(&t.rows[r]) {
                    *v -= x;
                }
            }
        }
        t.run(&mut obj, width);
        if !obj[width].is_zero() {
            return LpOutcome::Infeasible;
        }
        let mut r = 0;
        while r < t.rows.len() {
            if t.basis[r] >= first_art {
                match (0..first_art).find(|&j| !t.rows[r][j].is_zero()) {
                    Some(c) => {
                        let mut dummy = vec![Rational::zero(); width + 1];
                        t.pivot(&mut dummy, r, c);
                        r += 1;
                    }
                    None => {
                        t.rows.remove(r);
                        t.basis.remove(r);
                    }
                }
            } else {
                r += 1;
            }
        }
    }

    let mut obj = vec![Rational::zero(); width + 1];
    for (j, c) in objective.iter().enumerate() {
        obj[j] = -c.clone();
    }
    for r in 0..t.rows.len() {
        let b = t.basis[r];
        if !obj[b].is_zero() {
            let f = obj[b].clone();
            for (v, x) in obj.iter_mut().zip(&t.rows[r]) {
                *v -= &f * x;
            }
        }
    }
    if !t.run(&mut obj, first_art) {
        return LpOutcome::Unbounded;
    }
    let mut point = vec![Rational::zero(); n];
    for (r, &b) in t.basis.iter().enumerate() {
        if b < n {
            point[b] = t.rows[r][width].clone();
        }
    }
    LpOutcome::Optimal {
        value: obj[width].clone(),
        point,
    }
}

/// Some point of `{x ≥ 0 : constraints}`, if any.
pub fn feasible_point(num_vars: usize, constraints: &[Constraint]) -> Option<Vec<Rational>> {
    maximize(&vec![Rational::zero(); num_vars], constraints)
        .point()
        .map(<[Rational]>::to_vec)
}

/// Feasibility of `{x ≥ 0 : constraints}` by Fourier–Motzkin elimination.
pub fn fourier_motzkin_feasible(num_vars: usize, constraints: &[Constraint]) -> bool {
    let mut rows: Vec<(Vec<Rational>, Rational)> = Vec::new();
    for c in constraints {
        rows.push((c.coeffs.clone(), c.rhs.clone()));
        if c.relation == Relation::Eq {
            rows.push((c.coeffs.iter().map(|a| -a.clone()).collect(), -c.rhs.clone()));
        }
    }
    for i in 0..num_vars {
        let mut coeffs = vec![Rational::zero(); num_vars];
        coeffs[i] = -Rational::one();
        rows.push((coeffs, Rational::zero()));
    }
    for k in 0..num_vars {
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for (a, b) in rows {
            if a[k].is_positive() {
                pos.push((a, b));
            } else if a[k].is_negative() {
                neg.push((a, b));
            } else {
                rest.push((a, b));
            }
        }
        for (ap, bp) in &pos {
            for (an, bn) in &neg {
                let fp = -an[k].clone();
                let fn_ = ap[k].clone();
                let a: Vec<Rational> = ap.iter().zip(an).map(|(x, y)| x * &fp + y * &fn_).collect();
                let b = bp * &fp + bn * &fn_;
                rest.push(normalize(a, b));
            }
        }
        rest.sort();
        rest.dedup();
        rows = rest;
    }
    rows.iter().all(|(_, b)| !b.is_negative())
}

fn normalize(a: Vec<Rational>, b: Rational) -> (Vec<Rational>, Rational) {
    let scale = a
        .iter()
        .chain(std::iter::once(&b))
        .find(|v| !v.is_zero())
        .map(|v| v.abs());
    match scale {
        Some(s) => (a.into_iter().map(|v| v / &s).collect(), b / s),
        None => (a, b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn small_optimum() {
        // max x + y, x + 2y ≤ 4, 3x + y ≤ 6
        let out = maximize(
            &v(&[1, 1]),
            &[Constraint::le(v(&[1, 2]), int(4)), Constraint::le(v(&[3, 1]), int(6))],
        );
        assert_eq!(
            out,
            LpOutcome::Optimal {
                value: rat(14, 5),
                point: vec![rat(8, 5), rat(6, 5)]
            }
        );
    }

    #[test]
    fn infeasible_and_unbounded() {
        let cs = [Constraint::eq(v(&[1, 1]), int(1)), Constraint::le(v(&[1, 1]), int(0))];
        assert_eq!(maximize(&v(&[0, 0]), &cs), LpOutcome::Infeasible);
        assert!(!fourier_motzkin_feasible(2, &cs));
        let cs = [Constraint::le(v(&[1, -1]), int(1))];
        assert_eq!(maximize(&v(&[0, 1]), &cs), LpOutcome::Unbounded);
    }

    #[test]
    fn negative_rhs_and_equalities() {
        // x + y = 1, x - y ≤ -1/2  → y ≥ 3/4
        let cs = [
            Constraint::eq(v(&[1, 1]), int(1)),
            Constraint::le(v(&[1, -1]), rat(-1, 2)),
        ];
        let out = maximize(&v(&[1, 0]), &cs);
        assert_eq!(out.point().unwrap(), &[rat(1, 4), rat(3, 4)]);
        assert!(fourier_motzkin_feasible(2, &cs));
    }

    #[test]
    fn degenerate_ratio_system() {
        // golden ratio system at t = 2: feasible only at L = (1/2, 1/2)
        let t = int(2);
        let c = [[0, 1], [1, 1], [1, 2], [1, 0]];
        let d = [[1, 0], [0, 1], [1, 1], [1, 1]];
        let mut cs: Vec<Constraint> = c
            .iter()
            .zip(&d)
            .map(|(c, d)| Constraint::le((0..2).map(|i| int(c[i]) - &t * int(d[i])).collect(), int(0)))
            .collect();
        cs.push(Constraint::eq(v(&[1, 1]), int(1)));
        let p = feasible_point(2, &cs).unwrap();
        assert!(cs.iter().all(|c| c.holds(&p)));
        assert!(fourier_motzkin_feasible(2, &cs));
    }
}
