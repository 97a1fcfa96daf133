//! Minimal exact phase-1 simplex over the rationals, used for convex-hull
//! membership and for finding relative-interior points of cones. Bland's
//! rule, so no cycling; sizes here are tiny (≤ ~70 columns).

use crate::poly::Rational;
use num_traits::{One, Signed, Zero};

/// Feasibility of A x = b, x ≥ 0. Returns a feasible x when one exists.
pub fn solve_eq_nonneg(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let m = a.len();
    if m == 0 {
        return Some(Vec::new());
    }
    let n = a[0].len();
    // tableau: n structural + m artificial columns, last column = rhs
    let cols = n + m;
    let mut t: Vec<Vec<Rational>> = Vec::with_capacity(m);
    for i in 0..m {
        let mut row: Vec<Rational> = Vec::with_capacity(cols + 1);
        let flip = b[i].is_negative();
        for j in 0..n {
            row.push(if flip { -a[i][j].clone() } else { a[i][j].clone() });
        }
        for k in 0..m {
            row.push(if k == i { Rational::one() } else { Rational::zero() });
        }
        row.push(if flip { -b[i].clone() } else { b[i].clone() });
        t.push(row);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    // phase-1 objective: minimize the sum of artificials; the reduced-cost
    // row starts as the negated sum of the constraint rows over the
    // structural columns
    let mut obj: Vec<Rational> = vec![Rational::zero(); cols + 1];
    for row in &t {
        for j in 0..=cols {
            obj[j] -= &row[j];
        }
    }
    for j in n..cols {
        obj[j] = Rational::zero();
    }

    loop {
        // Bland: entering column = smallest index with negative reduced cost
        let Some(enter) = (0..cols).find(|&j| obj[j].is_negative()) else {
            break;
        };
        // ratio test, Bland tie-break on basis variable index
        let mut leave: Option<usize> = None;
        let mut best: Option<Rational> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = &t[i][cols] / &t[i][enter];
                let better = match &best {
                    None => true,
                    Some(b) => {
                        ratio < *b || (ratio == *b && basis[i] < basis[leave.unwrap()])
                    }
                };
                if better {
                    best = Some(ratio);
                    leave = Some(i);
                }
            }
        }
        let leave = leave?; // unbounded cannot happen in phase 1
        pivot(&mut t, &mut obj, leave, enter, cols);
        basis[leave] = enter;
    }

    // feasible iff the phase-1 optimum is zero
    if !obj[cols].is_zero() {
        return None;
    }
    let mut x = vec![Rational::zero(); n];
    for i in 0..m {
        if basis[i] < n {
            x[basis[i]] = t[i][cols].clone();
        } else if !t[i][cols].is_zero() {
            // artificial stuck in the basis at a nonzero level
            return None;
        }
    }
    Some(x)
}

fn pivot(t: &mut [Vec<Rational>], obj: &mut [Rational], r: usize, c: usize, cols: usize) {
    let p = t[r][c].clone();
    for j in 0..=cols {
        t[r][j] /= &p;
    }
    for i in 0..t.len() {
        if i != r && !t[i][c].is_zero() {
            let factor = t[i][c].clone();
            for j in 0..=cols {
                let delta = &factor * &t[r][j];
                t[i][j] -= delta;
            }
        }
    }
    if !obj[c].is_zero() {
        let factor = obj[c].clone();
        for j in 0..=cols {
            let delta = &factor * &t[r][j];
            obj[j] -= delta;
        }
    }
}

/// Is p a convex combination of the given points?
pub fn in_convex_hull(p: &[Rational], points: &[Vec<Rational>]) -> bool {
    if points.is_empty() {
        return false;
    }
    let d = p.len();
    let mut a: Vec<Vec<Rational>> = Vec::with_capacity(d + 1);
    for row in 0..d {
        a.push(points.iter().map(|q| q[row].clone()).collect());
    }
    a.push(vec![Rational::one(); points.len()]);
    let mut b: Vec<Rational> = p.to_vec();
    b.push(Rational::one());
    solve_eq_nonneg(&a, &b).is_some()
}

/// A solution ω (free sign) of ⟨e_k, ω⟩ = 0 and ⟨g_k, ω⟩ ≥ 1, if any.
pub fn solve_relative_interior(
    equalities: &[Vec<Rational>],
    strict: &[Vec<Rational>],
) -> Option<Vec<Rational>> {
    let d = equalities
        .first()
        .or_else(|| strict.first())
        .map(|v| v.len())?;
    // ω = u − v with u, v ≥ 0, one slack per strict inequality
    let nvars = 2 * d + strict.len();
    let mut a: Vec<Vec<Rational>> = Vec::new();
    let mut b: Vec<Rational> = Vec::new();
    for e in equalities {
        let mut row = vec![Rational::zero(); nvars];
        for j in 0..d {
            row[j] = e[j].clone();
            row[d + j] = -e[j].clone();
        }
        a.push(row);
        b.push(Rational::zero());
    }
    for (k, g) in strict.iter().enumerate() {
        let mut row = vec![Rational::zero(); nvars];
        for j in 0..d {
            row[j] = g[j].clone();
            row[d + j] = -g[j].clone();
        }
        row[2 * d + k] = -Rational::one();
        a.push(row);
        b.push(Rational::one());
    }
    let x = solve_eq_nonneg(&a, &b)?;
    Some((0..d).map(|j| &x[j] - &x[d + j]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat_int;

    fn v(vals: &[i64]) -> Vec<Rational> {
        vals.iter().map(|&x| rat_int(x)).collect()
    }

    #[test]
    fn hull_membership() {
        let square = vec![v(&[0, 0]), v(&[2, 0]), v(&[0, 2]), v(&[2, 2])];
        assert!(in_convex_hull(&v(&[1, 1]), &square));
        assert!(in_convex_hull(&v(&[2, 2]), &square));
        assert!(!in_convex_hull(&v(&[3, 1]), &square));
        assert!(!in_convex_hull(&v(&[1, 1]), &[v(&[0, 0]), v(&[2, 0])]));
    }

    #[test]
    fn interior_point_of_cone() {
        // ω with ω_1 ≥ 1, ω_2 ≥ 1 and ω_1 − ω_2 = 0
        let sol = solve_relative_interior(
            &[v(&[1, -1])],
            &[v(&[1, 0]), v(&[0, 1])],
        )
        .unwrap();
        assert_eq!(sol[0], sol[1]);
        assert!(sol[0] >= rat_int(1));
        // infeasible: ω ≥ 1 and −ω ≥ 1
        assert!(solve_relative_interior(&[], &[v(&[1]), v(&[-1])]).is_none());
    }
}
