//! Dense phase-one simplex for feasibility of `A x = b, x ≥ 0`.
//!
//! Works over any ordered field implementing [`LpScalar`]: `f64` with
//! tolerances, or exact rationals for boundary cases where a floating-point
//! verdict would be unreliable. Problems here are tiny (16 columns), so the
//! tableau is dense and pivoting follows Bland's rule.

use std::fmt::Debug;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Arithmetic needed by the solver.
pub trait LpScalar: Clone + Debug + PartialOrd + Signed {
    /// Magnitude below which a pivot candidate is treated as zero.
    fn is_negligible(&self) -> bool;

    fn is_positive_entry(&self) -> bool {
        !self.is_negligible() && Signed::is_positive(self)
    }

    fn is_negative_entry(&self) -> bool {
        !self.is_negligible() && Signed::is_negative(self)
    }
}

impl LpScalar for f64 {
    fn is_negligible(&self) -> bool {
        f64::abs(*self) <= 1e-12
    }
}

impl LpScalar for BigRational {
    fn is_negligible(&self) -> bool {
        Zero::is_zero(self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility<F> {
    /// A nonnegative solution of `A x = b`.
    Feasible(Vec<F>),
    /// Minimal total constraint violation found by phase one.
    Infeasible { residual: F },
}

/// Keep a maximal linearly independent subset of the rows of `[A | b]`.
///
/// Returns the indices of the retained rows, or `None` if some dependent row
/// contradicts the others (`0 = nonzero` after elimination).
pub fn independent_rows<F: LpScalar>(a: &[Vec<F>], b: &[F], tolerance: &F) -> Option<Vec<usize>> {
    let n = a.first().map_or(0, Vec::len);
    // reduced copies of accepted rows, each with its pivot column
    let mut basis: Vec<(usize, Vec<F>, F)> = Vec::new();
    let mut kept = Vec::new();
    for (r, (row, rhs)) in a.iter().zip(b).enumerate() {
        let mut row = row.clone();
        let mut rhs = rhs.clone();
        for (pivot, brow, brhs) in &basis {
            let factor = row[*pivot].clone();
            if factor.is_negligible() {
                continue;
            }
            for c in 0..n {
                row[c] = row[c].clone() - factor.clone() * brow[c].clone();
            }
            rhs = rhs - factor * brhs.clone();
        }
        let pivot = (0..n)
            .filter(|&c| !row[c].is_negligible())
            .max_by(|&x, &y| row[x].abs().partial_cmp(&row[y].abs()).expect("comparable"));
        match pivot {
            Some(p) => {
                let scale = row[p].clone();
                for v in row.iter_mut() {
                    *v = v.clone() / scale.clone();
                }
                rhs = rhs / scale;
                basis.push((p, row, rhs));
                kept.push(r);
            }
            None => {
                if rhs.abs() > *tolerance {
                    return None;
                }
            }
        }
    }
    Some(kept)
}

/// Decide whether `A x = b` has a solution with `x ≥ 0`.
///
/// `tolerance` bounds the phase-one objective accepted as zero (use zero for
/// exact arithmetic).
pub fn phase_one<F: LpScalar>(a: &[Vec<F>], b: &[F], tolerance: &F) -> Feasibility<F> {
    assert_eq!(a.len(), b.len(), "row count mismatch");
    let n = a.first().map_or(0, Vec::len);
    assert!(a.iter().all(|r| r.len() == n), "ragged constraint matrix");

    let Some(rows) = independent_rows(a, b, tolerance) else {
        // the rank test found an inconsistent combination; report how badly
        // phase one still misses the full system
        return Feasibility::Infeasible {
            residual: solve_tableau(a, b).1,
        };
    };
    let a: Vec<Vec<F>> = rows.iter().map(|&r| a[r].clone()).collect();
    let b: Vec<F> = rows.iter().map(|&r| b[r].clone()).collect();
    let (x, residual) = solve_tableau(&a, &b);
    if residual > *tolerance {
        Feasibility::Infeasible { residual }
    } else {
        Feasibility::Feasible(x)
    }
}

/// Minimize the sum of artificial variables; returns the primal point and
/// the optimal phase-one objective.
fn solve_tableau<F: LpScalar>(a: &[Vec<F>], b: &[F]) -> (Vec<F>, F) {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let width = n + m;

    // rows scaled so that every right-hand side is nonnegative
    let mut tab: Vec<Vec<F>> = Vec::with_capacity(m);
    let mut rhs: Vec<F> = Vec::with_capacity(m);
    for (r, row) in a.iter().enumerate() {
        let flip = b[r] < F::zero();
        let mut t: Vec<F> = row.iter().map(|v| if flip { -v.clone() } else { v.clone() }).collect();
        t.extend((0..m).map(|k| if k == r { F::one() } else { F::zero() }));
        tab.push(t);
        rhs.push(if flip { -b[r].clone() } else { b[r].clone() });
    }
    let mut basis: Vec<usize> = (n..width).collect();

    // reduced costs of the phase-one objective (sum of artificials)
    let mut cost = vec![F::zero(); width];
    let mut objective = F::zero();
    for r in 0..m {
        for c in 0..n {
            cost[c] = cost[c].clone() - tab[r][c].clone();
        }
        objective = objective + rhs[r].clone();
    }

    // Bland: lowest-index column with negative reduced cost
    while let Some(enter) = (0..width).find(|&c| cost[c].is_negative_entry()) {
        let mut leave: Option<(usize, F)> = None;
        for r in 0..m {
            if tab[r][enter].is_positive_entry() {
                let ratio = rhs[r].clone() / tab[r][enter].clone();
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => ratio < *best || (ratio == *best && basis[r] < basis[*lr]),
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        // phase one is bounded below by zero, so an entering column always has a pivot
        let Some((pr, _)) = leave else { break };

        let pivot = tab[pr][enter].clone();
        for v in tab[pr].iter_mut() {
            *v = v.clone() / pivot.clone();
        }
        rhs[pr] = rhs[pr].clone() / pivot;
        for r in 0..m {
            if r == pr {
                continue;
            }
            let factor = tab[r][enter].clone();
            if factor.is_negligible() {
                continue;
            }
            let (pivot_row, row) = if r < pr {
                let (lo, hi) = tab.split_at_mut(pr);
                (&hi[0], &mut lo[r])
            } else {
                let (lo, hi) = tab.split_at_mut(r);
                (&lo[pr], &mut hi[0])
            };
            for (v, p) in row.iter_mut().zip(pivot_row) {
                *v = v.clone() - factor.clone() * p.clone();
            }
            rhs[r] = rhs[r].clone() - factor * rhs[pr].clone();
        }
        let factor = cost[enter].clone();
        for c in 0..width {
            cost[c] = cost[c].clone() - factor.clone() * tab[pr][c].clone();
        }
        objective = objective + factor * rhs[pr].clone();
        basis[pr] = enter;
    }

    let mut x = vec![F::zero(); n];
    for (r, &var) in basis.iter().enumerate() {
        if var < n {
            x[var] = if rhs[r] < F::zero() { F::zero() } else { rhs[r].clone() };
        }
    }
    let objective = if objective < F::zero() { F::zero() } else { objective };
    (x, objective)
}
