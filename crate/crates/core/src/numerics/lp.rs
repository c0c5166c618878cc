//! Feasibility of `A x = b, lo <= x <= hi` by phase-1 simplex.
//!
//! Variables are shifted to `z = x - lo >= 0`; finite upper bounds become
//! explicit rows `z + s = hi - lo`. A dense tableau with one artificial per
//! row is driven to a zero artificial sum using Bland's rule, which cannot
//! cycle. The systems solved here have at most a few dozen variables.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Sparse equality system: row `i` is `sum_j coef * x_j = rhs[i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSystem<T> {
    pub n_vars: usize,
    pub rows: Vec<Vec<(usize, T)>>,
    pub rhs: Vec<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome<T> {
    Feasible(Vec<T>),
    /// Phase-1 optimum (sum of artificial values) exceeded the tolerance.
    Infeasible { phase1_objective: T },
}

/// Finds some `x` with `A x = b` and `lo <= x <= hi`.
///
/// `tol` is the acceptance threshold on the phase-1 objective, in the units
/// of `b`. The returned point satisfies the bounds exactly.
pub fn lp_feasible<T: Scalar>(
    sys: &LinearSystem<T>,
    lo: &[T],
    hi: &[T],
    tol: T,
) -> Result<LpOutcome<T>> {
    let nv = sys.n_vars;
    if lo.len() != nv || hi.len() != nv || sys.rows.len() != sys.rhs.len() {
        return Err(Error::Shape(format!(
            "{} vars, {} lower, {} upper, {} rows, {} rhs",
            nv,
            lo.len(),
            hi.len(),
            sys.rows.len(),
            sys.rhs.len()
        )));
    }
    for (j, (&l, &h)) in lo.iter().zip(hi).enumerate() {
        if !l.is_finite() || !(l <= h) {
            return Err(Error::Domain(format!("bad bounds [{l}, {h}] on x{j}")));
        }
    }
    if sys.rows.iter().flatten().any(|&(j, _)| j >= nv) {
        return Err(Error::Shape("column index out of range".into()));
    }

    let bounded: Vec<usize> = (0..nv).filter(|&j| hi[j].is_finite()).collect();
    let m_eq = sys.rows.len();
    let m = m_eq + bounded.len();
    // Columns: z (nv), upper slacks (bounded.len()), artificials (m).
    let ns = bounded.len();
    let ncol = nv + ns + m;
    let width = ncol + 1;
    let mut tab = vec![T::zero(); (m + 1) * width];
    let at = |r: usize, c: usize| r * width + c;

    for (i, row) in sys.rows.iter().enumerate() {
        let mut rhs = sys.rhs[i];
        for &(j, a) in row {
            tab[at(i, j)] += a;
            rhs -= a * lo[j];
        }
        let sign = if rhs < T::zero() { -T::one() } else { T::one() };
        for c in 0..nv {
            tab[at(i, c)] *= sign;
        }
        tab[at(i, ncol)] = rhs * sign;
    }
    for (s, &j) in bounded.iter().enumerate() {
        let r = m_eq + s;
        tab[at(r, j)] = T::one();
        tab[at(r, nv + s)] = T::one();
        tab[at(r, ncol)] = hi[j] - lo[j];
    }
    let mut basis: Vec<usize> = (0..m).map(|i| nv + ns + i).collect();
    for i in 0..m {
        tab[at(i, nv + ns + i)] = T::one();
    }
    // Objective row holds reduced costs of minimizing the artificial sum.
    for c in 0..width {
        let mut acc = T::zero();
        for i in 0..m {
            acc += tab[at(i, c)];
        }
        tab[at(m, c)] = if c >= nv + ns && c < ncol { T::zero() } else { -acc };
    }

    let scale = tab[at(m, ncol)].abs().max(T::one());
    let eps = T::epsilon() * T::lit(64.0) * scale;
    let max_pivots = 50 * (m + ncol) + 1000;
    let mut pivots = 0;
    loop {
        let entering = (0..ncol).find(|&c| tab[at(m, c)] < -eps);
        let Some(e) = entering else { break };
        let mut leave: Option<(usize, T)> = None;
        for i in 0..m {
            let a = tab[at(i, e)];
            if a > eps {
                let ratio = tab[at(i, ncol)] / a;
                match leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr || (ratio == lr && basis[i] < basis[li]) {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        // Phase 1 is bounded below by zero, so a pivot row always exists.
        let Some((r, _)) = leave else { break };
        pivot(&mut tab, width, m, r, e);
        basis[r] = e;
        pivots += 1;
        if pivots > max_pivots {
            return Err(Error::Numeric("simplex pivot limit reached".into()));
        }
    }

    let phase1 = -tab[at(m, ncol)];
    if phase1 > tol {
        return Ok(LpOutcome::Infeasible {
            phase1_objective: phase1,
        });
    }
    let mut z = vec![T::zero(); nv];
    for (i, &b) in basis.iter().enumerate() {
        if b < nv {
            z[b] = tab[at(i, ncol)];
        }
    }
    let x = (0..nv)
        .map(|j| (lo[j] + z[j].pos()).min(hi[j]).max(lo[j]))
        .collect();
    Ok(LpOutcome::Feasible(x))
}

fn pivot<T: Scalar>(tab: &mut [T], width: usize, m: usize, r: usize, e: usize) {
    let pv = tab[r * width + e];
    for c in 0..width {
        tab[r * width + c] /= pv;
    }
    for i in 0..=m {
        if i == r {
            continue;
        }
        let factor = tab[i * width + e];
        if factor == T::zero() {
            continue;
        }
        for c in 0..width {
            let v = tab[r * width + c];
            tab[i * width + c] -= factor * v;
        }
        tab[i * width + e] = T::zero();
    }
}

/// Max absolute residual of `A x - b`.
pub fn residual<T: Scalar>(sys: &LinearSystem<T>, x: &[T]) -> T {
    sys.rows
        .iter()
        .zip(&sys.rhs)
        .map(|(row, &b)| {
            let ax: T = row.iter().map(|&(j, a)| a * x[j]).sum();
            (ax - b).abs()
        })
        .fold(T::zero(), T::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(rows: Vec<Vec<(usize, f64)>>, rhs: Vec<f64>, n: usize) -> LinearSystem<f64> {
        LinearSystem { n_vars: n, rows, rhs }
    }

    #[test]
    fn segment() {
        let s = sys(vec![vec![(0, 1.0), (1, 1.0)]], vec![1.0], 2);
        match lp_feasible(&s, &[0.0, 0.0], &[1.0, 1.0], 1e-12).unwrap() {
            LpOutcome::Feasible(x) => {
                assert!(residual(&s, &x) < 1e-9);
                assert!(x.iter().all(|&v| (0.0..=1.0).contains(&v)));
            }
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn bound_conflict() {
        let s = sys(vec![vec![(0, 1.0)]], vec![2.0], 1);
        assert!(matches!(
            lp_feasible(&s, &[0.0], &[1.0], 1e-12).unwrap(),
            LpOutcome::Infeasible { .. }
        ));
    }

    #[test]
    fn negative_rhs_and_shifted_bounds() {
        // x0 - x1 = -3 with x0 in [-1, 1], x1 in [2, 5].
        let s = sys(vec![vec![(0, 1.0), (1, -1.0)]], vec![-3.0], 2);
        match lp_feasible(&s, &[-1.0, 2.0], &[1.0, 5.0], 1e-12).unwrap() {
            LpOutcome::Feasible(x) => assert!(residual(&s, &x) < 1e-9, "{x:?}"),
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn unbounded_above_variable() {
        let s = sys(vec![vec![(0, 2.0), (1, 1.0)]], vec![10.0], 2);
        match lp_feasible(&s, &[0.0, 0.0], &[1.0, f64::INFINITY], 1e-12).unwrap() {
            LpOutcome::Feasible(x) => assert!(residual(&s, &x) < 1e-9),
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn degenerate_redundant_rows() {
        // Duplicate and zero rows must not confuse the pivoting.
        let s = sys(
            vec![
                vec![(0, 1.0), (1, 1.0), (2, 1.0)],
                vec![(0, 1.0), (1, 1.0), (2, 1.0)],
                vec![],
                vec![(0, 1.0), (2, -1.0)],
            ],
            vec![1.0, 1.0, 0.0, 0.0],
            3,
        );
        match lp_feasible(&s, &[0.0; 3], &[1.0; 3], 1e-12).unwrap() {
            LpOutcome::Feasible(x) => assert!(residual(&s, &x) < 1e-9),
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn shape_mismatch() {
        let s = sys(vec![vec![(3, 1.0)]], vec![1.0], 2);
        assert!(lp_feasible(&s, &[0.0; 2], &[1.0; 2], 1e-9).is_err());
    }
}
