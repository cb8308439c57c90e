//! Primal simplex on the dual of `min c·x, A x ≥ b, 0 ≤ x ≤ 1`.
//!
//! The dual is `max b·y − 1·z` subject to `Aᵀ y − z ≤ c`, `y, z ≥ 0`. With a
//! slack per edge row the all-slack basis is feasible because `c ≥ 0`, and a
//! new primal constraint is just a new dual column, so the current basis
//! stays feasible and the next solve starts from it. The primal point is
//! read off the simplex multipliers of the edge rows.

use crate::error::{FlexError, Result};

const PRICE_TOL: f64 = 1e-10;
const PIVOT_TOL: f64 = 1e-9;
const REFACTOR_EVERY: usize = 64;

#[derive(Clone, Debug)]
struct Column {
    obj: f64,
    a: Vec<f64>,
}

#[derive(Clone, Debug)]
pub(crate) struct DualSimplex {
    m: usize,
    c: Vec<f64>,
    columns: Vec<Column>,
    basis: Vec<usize>,
    binv: Vec<Vec<f64>>,
    beta: Vec<f64>,
    pivots_since_refactor: usize,
    pub pivots: usize,
}

impl DualSimplex {
    /// `c` are the primal edge costs.
    pub fn new(c: Vec<f64>) -> DualSimplex {
        let m = c.len();
        let mut columns = Vec::with_capacity(2 * m);
        for i in 0..m {
            let mut a = vec![0.0; m];
            a[i] = 1.0;
            columns.push(Column { obj: 0.0, a });
        }
        for i in 0..m {
            let mut a = vec![0.0; m];
            a[i] = -1.0;
            columns.push(Column { obj: -1.0, a });
        }
        let binv = (0..m)
            .map(|i| {
                let mut row = vec![0.0; m];
                row[i] = 1.0;
                row
            })
            .collect();
        DualSimplex {
            m,
            beta: c.clone(),
            c,
            columns,
            basis: (0..m).collect(),
            binv,
            pivots_since_refactor: 0,
            pivots: 0,
        }
    }

    /// Adds the primal constraint `Σ coeffs · x ≥ rhs`.
    pub fn add_constraint(&mut self, coeffs: &[(usize, f64)], rhs: f64) {
        let mut a = vec![0.0; self.m];
        for &(e, v) in coeffs {
            a[e] += v;
        }
        self.columns.push(Column { obj: rhs, a });
    }

    fn multipliers(&self) -> Vec<f64> {
        let mut pi = vec![0.0; self.m];
        for (r, &j) in self.basis.iter().enumerate() {
            let cb = self.columns[j].obj;
            if cb != 0.0 {
                for (k, p) in pi.iter_mut().enumerate() {
                    *p += cb * self.binv[r][k];
                }
            }
        }
        pi
    }

    fn reduced_cost(&self, pi: &[f64], j: usize) -> f64 {
        let col = &self.columns[j];
        col.obj - col.a.iter().zip(pi).map(|(a, p)| a * p).sum::<f64>()
    }

    /// Runs to optimality with Bland's rule. `Err` when the dual is
    /// unbounded, meaning the primal constraints admit no x in [0,1].
    pub fn solve(&mut self, max_pivots: usize) -> Result<()> {
        let mut in_basis = vec![false; self.columns.len()];
        for &j in &self.basis {
            in_basis[j] = true;
        }
        for _ in 0..max_pivots {
            let pi = self.multipliers();
            let entering = (0..self.columns.len()).find(|&j| !in_basis[j] && self.reduced_cost(&pi, j) > PRICE_TOL);
            let Some(j) = entering else {
                return Ok(());
            };
            let d: Vec<f64> = (0..self.m)
                .map(|r| {
                    self.binv[r]
                        .iter()
                        .zip(&self.columns[j].a)
                        .map(|(b, a)| b * a)
                        .sum::<f64>()
                })
                .collect();
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.m {
                if d[r] > PIVOT_TOL {
                    let ratio = self.beta[r].max(0.0) / d[r];
                    let better = match leave {
                        None => true,
                        Some((lr, lv)) => {
                            ratio < lv - 1e-12 || (ratio <= lv + 1e-12 && self.basis[r] < self.basis[lr])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((r, _)) = leave else {
                return Err(FlexError::infeasible(
                    "LP constraints cannot be met within 0 <= x <= 1",
                    None,
                ));
            };
            in_basis[self.basis[r]] = false;
            in_basis[j] = true;
            self.pivot(r, j, &d);
        }
        Err(FlexError::NonConvergence { iterations: max_pivots })
    }

    fn pivot(&mut self, r: usize, j: usize, d: &[f64]) {
        let piv = d[r];
        let row_r: Vec<f64> = self.binv[r].iter().map(|v| v / piv).collect();
        let beta_r = self.beta[r] / piv;
        for i in 0..self.m {
            if i == r || d[i] == 0.0 {
                continue;
            }
            let f = d[i];
            for k in 0..self.m {
                self.binv[i][k] -= f * row_r[k];
            }
            self.beta[i] -= f * beta_r;
        }
        self.binv[r] = row_r;
        self.beta[r] = beta_r;
        self.basis[r] = j;
        self.pivots += 1;
        self.pivots_since_refactor += 1;
        if self.pivots_since_refactor >= REFACTOR_EVERY {
            self.refactor();
        }
    }

    /// Recomputes B⁻¹ and the basic values from scratch.
    fn refactor(&mut self) {
        let m = self.m;
        // augmented [B | I]
        let mut aug: Vec<Vec<f64>> = (0..m)
            .map(|i| {
                let mut row = vec![0.0; 2 * m];
                for (r, &j) in self.basis.iter().enumerate() {
                    row[r] = self.columns[j].a[i];
                }
                row[m + i] = 1.0;
                row
            })
            .collect();
        for col in 0..m {
            let Some(p) = (col..m).max_by(|&a, &b| aug[a][col].abs().total_cmp(&aug[b][col].abs())) else {
                return;
            };
            if aug[p][col].abs() < 1e-14 {
                return; // keep the product-form inverse
            }
            aug.swap(col, p);
            let pv = aug[col][col];
            for v in aug[col].iter_mut() {
                *v /= pv;
            }
            let pivot_row = aug[col].clone();
            for (i, row) in aug.iter_mut().enumerate() {
                if i != col && row[col] != 0.0 {
                    let f = row[col];
                    for (v, pr) in row.iter_mut().zip(&pivot_row) {
                        *v -= f * pr;
                    }
                }
            }
        }
        for i in 0..m {
            self.binv[i] = aug[i][m..].to_vec();
        }
        self.beta = (0..m)
            .map(|i| self.binv[i].iter().zip(&self.c).map(|(b, c)| b * c).sum())
            .collect();
        self.pivots_since_refactor = 0;
    }

    /// Dual objective, equal to the primal objective at optimality.
    pub fn objective(&self) -> f64 {
        self.basis
            .iter()
            .zip(&self.beta)
            .map(|(&j, &v)| self.columns[j].obj * v)
            .sum()
    }

    /// Primal point from the multipliers, clamped into [0, 1].
    pub fn primal(&self) -> Vec<f64> {
        self.multipliers().into_iter().map(|v| v.clamp(0.0, 1.0)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_covering_row() {
        // min 3x0 + 1x1, x0 + x1 >= 1
        let mut lp = DualSimplex::new(vec![3.0, 1.0]);
        lp.add_constraint(&[(0, 1.0), (1, 1.0)], 1.0);
        lp.solve(100).unwrap();
        assert!((lp.objective() - 1.0).abs() < 1e-9);
        let x = lp.primal();
        assert!((x[1] - 1.0).abs() < 1e-9 && x[0].abs() < 1e-9);
    }

    #[test]
    fn upper_bounds_bind() {
        // min x0 + x1 + x2, x0 + x1 + x2 >= 2.5 with x <= 1
        let mut lp = DualSimplex::new(vec![1.0, 1.0, 1.0]);
        lp.add_constraint(&[(0, 1.0), (1, 1.0), (2, 1.0)], 2.5);
        lp.solve(100).unwrap();
        assert!((lp.objective() - 2.5).abs() < 1e-9);
        // a second row forces x0 up
        lp.add_constraint(&[(0, 1.0)], 1.0);
        lp.solve(100).unwrap();
        assert!((lp.objective() - 2.5).abs() < 1e-9);
        assert!((lp.primal()[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn impossible_rows_are_reported() {
        let mut lp = DualSimplex::new(vec![1.0]);
        lp.add_constraint(&[(0, 1.0)], 2.0);
        assert!(matches!(lp.solve(100), Err(FlexError::Infeasible { .. })));
    }
}
