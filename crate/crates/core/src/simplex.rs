//! Dense two-phase primal simplex with Bland's anti-cycling rule.
//!
//! Sized for the small programs this crate builds: a few hundred columns and a
//! dozen rows. Not a general-purpose LP library.

const PIVOT_EPS: f64 = 1e-11;
const COST_EPS: f64 = 1e-12;
/// Phase-one residual accepted as feasible.
const FEASIBILITY_TOL: f64 = 1e-8;
const MAX_PIVOTS: usize = 50_000;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LpStatus {
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone)]
pub(crate) struct LpSolution {
    pub x: Vec<f64>,
    #[cfg_attr(not(test), allow(dead_code))]
    pub objective: f64,
}

/// `maximize c.x  s.t.  eq_a x = eq_b,  ub_a x <= ub_b,  x >= 0`.
#[derive(Debug, Clone, Default)]
pub(crate) struct LinearProgram {
    pub objective: Vec<f64>,
    pub eq_rows: Vec<(Vec<f64>, f64)>,
    pub ub_rows: Vec<(Vec<f64>, f64)>,
}

struct Tableau {
    /// `rows x (cols + 1)`; the last column is the right-hand side.
    a: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let width = self.cols + 1;
        let piv = self.a[r][c];
        for k in 0..width {
            self.a[r][k] /= piv;
        }
        let pivot_row = self.a[r].clone();
        for (i, row) in self.a.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for k in 0..width {
                    row[k] -= f * pivot_row[k];
                }
                row[c] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes `cost` over the columns in `allowed`. Returns `Ok(())` at optimality.
    fn optimize(&mut self, cost: &[f64], allowed: &[bool]) -> Result<(), LpStatus> {
        for _ in 0..MAX_PIVOTS {
            // Reduced cost of column j: c_j - c_B B^-1 A_j, read off the tableau.
            let entering = (0..self.cols).find(|&j| {
                allowed[j] && !self.basis.contains(&j) && {
                    let mut rc = cost[j];
                    for (i, &b) in self.basis.iter().enumerate() {
                        rc -= cost[b] * self.a[i][j];
                    }
                    rc > COST_EPS
                }
            });
            let Some(c) = entering else {
                return Ok(());
            };
            let rhs = self.cols;
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.a.len() {
                let coef = self.a[i][c];
                if coef > PIVOT_EPS {
                    let ratio = self.a[i][rhs] / coef;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - 1e-14 || (ratio <= lr + 1e-14 && self.basis[i] < self.basis[li]) {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else {
                return Err(LpStatus::Unbounded);
            };
            self.pivot(r, c);
        }
        Err(LpStatus::IterationLimit)
    }
}

impl LinearProgram {
    pub fn solve(&self) -> Result<LpSolution, LpStatus> {
        let n = self.objective.len();
        let n_ub = self.ub_rows.len();
        let m = self.eq_rows.len() + n_ub;
        // Columns: originals, slacks, artificials.
        let cols = n + n_ub + m;
        let mut a = Vec::with_capacity(m);
        let rows = self
            .eq_rows
            .iter()
            .map(|r| (r, None))
            .chain(self.ub_rows.iter().enumerate().map(|(k, r)| (r, Some(k))));
        for (i, ((coefs, b), slack)) in rows.enumerate() {
            let mut row = vec![0.0; cols + 1];
            row[..n].copy_from_slice(coefs);
            if let Some(k) = slack {
                row[n + k] = 1.0;
            }
            row[cols] = *b;
            if *b < 0.0 {
                for v in row.iter_mut() {
                    *v = -*v;
                }
            }
            row[n + n_ub + i] = 1.0;
            a.push(row);
        }
        let mut t = Tableau {
            a,
            basis: (n + n_ub..cols).collect(),
            cols,
        };

        let mut phase1 = vec![0.0; cols];
        for c in phase1.iter_mut().skip(n + n_ub) {
            *c = -1.0;
        }
        let all = vec![true; cols];
        t.optimize(&phase1, &all)?;
        let residual: f64 = t
            .basis
            .iter()
            .enumerate()
            .filter(|(_, &b)| b >= n + n_ub)
            .map(|(i, _)| t.a[i][cols])
            .sum();
        if residual > FEASIBILITY_TOL {
            return Err(LpStatus::Infeasible);
        }

        // Drive remaining artificials out of the basis; drop redundant rows.
        let mut i = 0;
        while i < t.a.len() {
            if t.basis[i] >= n + n_ub {
                if let Some(c) = (0..n + n_ub).find(|&c| t.a[i][c].abs() > PIVOT_EPS) {
                    t.pivot(i, c);
                } else {
                    t.a.remove(i);
                    t.basis.remove(i);
                    continue;
                }
            }
            i += 1;
        }

        let mut cost = vec![0.0; cols];
        cost[..n].copy_from_slice(&self.objective);
        let mut allowed = vec![true; cols];
        for v in allowed.iter_mut().skip(n + n_ub) {
            *v = false;
        }
        t.optimize(&cost, &allowed)?;

        let mut x = vec![0.0; n];
        for (i, &b) in t.basis.iter().enumerate() {
            if b < n {
                x[b] = t.a[i][cols].max(0.0);
            }
        }
        let objective = x.iter().zip(&self.objective).map(|(a, b)| a * b).sum();
        Ok(LpSolution { x, objective })
    }
}
