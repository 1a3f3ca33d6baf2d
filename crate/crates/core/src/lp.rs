//! Dense phase-1 simplex for linear feasibility `A x = b, x ≥ 0`.
//!
//! Problems here are tiny (a d-majorization instance in dimension `n` has
//! `n²` variables and `3n` rows, with `n ≤ 64`), so a full-tableau simplex
//! with Bland's rule is the whole solver. No external dependency; the
//! feasible point is a first-class output because it doubles as the
//! stochastic-matrix witness.

/// Outcome of a feasibility solve.
#[derive(Debug, Clone)]
pub enum LpOutcome {
    /// A nonnegative solution of `Ax = b`; entries in variable order.
    Feasible(Vec<f64>),
    /// Phase-1 optimum stayed positive: no feasible point. Carries the
    /// residual infeasibility (the optimal artificial mass).
    Infeasible { residual: f64 },
    /// Iteration cap reached before optimality; never coerced to a verdict.
    Undecided,
}

/// Solves the phase-1 problem `min Σ artificials` over `Ax + s = b`,
/// `x, s ≥ 0`, with Bland's anti-cycling rule. Feasibility is declared when
/// the optimum is at most `tol` (equalities relaxed to `|·| ≤ tol`).
pub fn feasible_point(a: &[Vec<f64>], b: &[f64], tol: f64, max_iters: usize) -> LpOutcome {
    let rows = a.len();
    assert_eq!(rows, b.len());
    let cols = if rows == 0 { 0 } else { a[0].len() };
    if rows == 0 {
        return LpOutcome::Feasible(vec![]);
    }

    // Tableau: structural columns, artificial columns, rhs.
    let width = cols + rows + 1;
    let mut t = vec![vec![0.0f64; width]; rows];
    for r in 0..rows {
        let flip = if b[r] < 0.0 { -1.0 } else { 1.0 };
        for c in 0..cols {
            t[r][c] = flip * a[r][c];
        }
        t[r][cols + r] = 1.0;
        t[r][width - 1] = flip * b[r];
    }
    let mut basis: Vec<usize> = (cols..cols + rows).collect();

    // Objective row for min Σ artificials, expressed over nonbasic columns:
    // obj[c] = Σ_r t[r][c], obj value = Σ_r rhs[r].
    let mut obj = vec![0.0f64; width];
    for r in 0..rows {
        for c in 0..width {
            obj[c] += t[r][c];
        }
    }
    for r in 0..rows {
        obj[cols + r] = 0.0; // artificials are basic, reduced cost zero
    }

    const PIVOT_EPS: f64 = 1e-11;
    for _ in 0..max_iters {
        // Bland: smallest-index column with positive reduced cost.
        let entering = (0..cols + rows).find(|&c| obj[c] > PIVOT_EPS);
        let entering = match entering {
            Some(c) => c,
            None => {
                let value = obj[width - 1];
                return if value.abs() <= tol {
                    let mut x = vec![0.0; cols];
                    for (r, &bv) in basis.iter().enumerate() {
                        if bv < cols {
                            x[bv] = t[r][width - 1];
                        }
                    }
                    LpOutcome::Feasible(x)
                } else {
                    LpOutcome::Infeasible { residual: value }
                };
            }
        };
        // Ratio test; Bland tie-break on the smallest basic variable.
        let mut leave: Option<(usize, f64)> = None;
        for r in 0..rows {
            if t[r][entering] > PIVOT_EPS {
                let ratio = t[r][width - 1] / t[r][entering];
                let better = match leave {
                    None => true,
                    Some((lr, lratio)) => {
                        ratio < lratio - 1e-15 || (ratio <= lratio + 1e-15 && basis[r] < basis[lr])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        let (pivot_row, _) = match leave {
            Some(x) => x,
            // Phase-1 objective is bounded below by zero; an unbounded ray
            // cannot occur, but bail out defensively.
            None => return LpOutcome::Undecided,
        };
        pivot(&mut t, &mut obj, pivot_row, entering);
        basis[pivot_row] = entering;
    }
    LpOutcome::Undecided
}

fn pivot(t: &mut [Vec<f64>], obj: &mut [f64], row: usize, col: usize) {
    let width = t[0].len();
    let scale = t[row][col];
    for c in 0..width {
        t[row][c] /= scale;
    }
    t[row][col] = 1.0;
    for r in 0..t.len() {
        if r != row && t[r][col].abs() > 0.0 {
            let factor = t[r][col];
            for c in 0..width {
                t[r][c] -= factor * t[row][c];
            }
            t[r][col] = 0.0;
        }
    }
    let factor = obj[col];
    if factor.abs() > 0.0 {
        for c in 0..width {
            obj[c] -= factor * t[row][c];
        }
        obj[col] = 0.0;
    }
}
