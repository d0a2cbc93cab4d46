//! Dense two-phase primal simplex for the small programs built by the KAM engine.
//!
//! Every variable is bounded below by zero. Constraints are either equalities
//! (`a·z = b`) or lower bounds on a linear form (`g·z >= h`). Entering and
//! leaving variables are chosen by Bland's rule (lowest index first), so a
//! given program always follows the same pivot path.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

/// A linear program over nonnegative variables.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    sense: Sense,
    objective: Vec<f64>,
    eq_rows: Vec<Vec<f64>>,
    eq_rhs: Vec<f64>,
    ge_rows: Vec<Vec<f64>>,
    ge_rhs: Vec<f64>,
}

impl LinearProgram {
    pub fn new(sense: Sense, objective: Vec<f64>) -> Self {
        Self {
            sense,
            objective,
            eq_rows: Vec::new(),
            eq_rhs: Vec::new(),
            ge_rows: Vec::new(),
            ge_rhs: Vec::new(),
        }
    }

    pub fn maximize(objective: Vec<f64>) -> Self {
        Self::new(Sense::Maximize, objective)
    }

    pub fn minimize(objective: Vec<f64>) -> Self {
        Self::new(Sense::Minimize, objective)
    }

    /// Adds the constraint `row · z = rhs`.
    pub fn add_equality(&mut self, row: Vec<f64>, rhs: f64) -> &mut Self {
        self.eq_rows.push(row);
        self.eq_rhs.push(rhs);
        self
    }

    /// Adds the constraint `row · z >= rhs`.
    pub fn add_at_least(&mut self, row: Vec<f64>, rhs: f64) -> &mut Self {
        self.ge_rows.push(row);
        self.ge_rhs.push(rhs);
        self
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.eq_rows.len() + self.ge_rows.len()
    }

    pub fn equalities(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.eq_rows
            .iter()
            .map(Vec::as_slice)
            .zip(self.eq_rhs.iter().copied())
    }

    pub fn lower_bounds(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.ge_rows
            .iter()
            .map(Vec::as_slice)
            .zip(self.ge_rhs.iter().copied())
    }

    /// Objective value of `z` in the program's own sense.
    pub fn evaluate(&self, z: &[f64]) -> f64 {
        dot(&self.objective, z)
    }

    /// Largest constraint or bound violation of `z` (zero when feasible).
    pub fn max_violation(&self, z: &[f64]) -> f64 {
        let eq = self
            .equalities()
            .map(|(row, rhs)| (dot(row, z) - rhs).abs());
        let ge = self
            .lower_bounds()
            .map(|(row, rhs)| (rhs - dot(row, z)).max(0.0));
        let bounds = z.iter().map(|&v| (-v).max(0.0));
        eq.chain(ge).chain(bounds).fold(0.0, f64::max)
    }

    fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(LpError::NonFinite("objective"));
        }
        for (row, (coeffs, rhs)) in self.equalities().chain(self.lower_bounds()).enumerate() {
            if coeffs.len() != n {
                return Err(LpError::Dimension {
                    row,
                    expected: n,
                    found: coeffs.len(),
                });
            }
            if !rhs.is_finite() || coeffs.iter().any(|c| !c.is_finite()) {
                return Err(LpError::NonFinite("constraint"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Outcome of [`solve_lp`]. `values` is empty unless the status is optimal.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub values: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("constraint row {row} has {found} coefficients, expected {expected}")]
    Dimension {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("non-finite coefficient in {0}")]
    NonFinite(&'static str),
    #[error("iteration cap reached after {iterations} pivots")]
    IterationLimit { iterations: usize },
}

/// Solves `lp` with the two-phase simplex method.
///
/// `tol` is used both as the pivot/reduced-cost threshold and, scaled by the
/// largest right-hand side, as the phase-one infeasibility threshold.
pub fn solve_lp(lp: &LinearProgram, tol: f64) -> Result<LpSolution, LpError> {
    lp.validate()?;
    let n = lp.num_vars();
    let cap = 50 * (n + lp.num_constraints()).max(1);
    let mut tableau = Tableau::build(lp);
    let rhs_scale = 1.0
        + tableau
            .rows
            .iter()
            .map(|r| r[r.len() - 1])
            .fold(0.0, f64::max);

    let mut iterations = 0;
    if tableau.art_start < tableau.ncols {
        let costs: Vec<f64> = (0..tableau.ncols)
            .map(|j| if j >= tableau.art_start { -1.0 } else { 0.0 })
            .collect();
        // Phase one is bounded above by zero, so it cannot report unbounded.
        tableau.optimize(&costs, tableau.ncols, tol, cap, &mut iterations)?;
        let residual: f64 = tableau
            .basis
            .iter()
            .zip(&tableau.rows)
            .filter(|(&b, _)| b >= tableau.art_start)
            .map(|(_, row)| row[tableau.ncols])
            .sum();
        if residual > tol * rhs_scale {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                values: Vec::new(),
                objective: f64::NAN,
                iterations,
            });
        }
        tableau.evict_artificials(tol);
    }

    let sign = match lp.sense {
        Sense::Maximize => 1.0,
        Sense::Minimize => -1.0,
    };
    let costs: Vec<f64> = (0..tableau.art_start)
        .map(|j| if j < n { sign * lp.objective[j] } else { 0.0 })
        .collect();
    let outcome = tableau.optimize(&costs, tableau.art_start, tol, cap, &mut iterations)?;
    if outcome == Phase::Unbounded {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            values: Vec::new(),
            objective: f64::NAN,
            iterations,
        });
    }

    let mut values = vec![0.0; n];
    for (row, &b) in tableau.rows.iter().zip(&tableau.basis) {
        if b < n {
            values[b] = row[tableau.ncols];
        }
    }
    let objective = lp.evaluate(&values);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        values,
        objective,
        iterations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Optimal,
    Unbounded,
}

/// Row-major dense tableau. Columns are ordered: original variables, surplus
/// variables of the `>=` rows, artificial variables. The last entry of each
/// row is its right-hand side.
struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    ncols: usize,
    art_start: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.num_vars();
        let n_ge = lp.ge_rows.len();
        let n_rows = lp.num_constraints();

        // Rows first without artificial columns; artificial needs are decided per row.
        let mut raw: Vec<(Vec<f64>, Option<usize>)> = Vec::with_capacity(n_rows);
        for (coeffs, rhs) in lp.equalities() {
            let mut row = vec![0.0; n + n_ge];
            row[..n].copy_from_slice(coeffs);
            let flip = rhs < 0.0;
            if flip {
                row.iter_mut().for_each(|v| *v = -*v);
            }
            row.push(if flip { -rhs } else { rhs });
            raw.push((row, None));
        }
        for (g, (coeffs, rhs)) in lp.lower_bounds().enumerate() {
            let mut row = vec![0.0; n + n_ge];
            row[..n].copy_from_slice(coeffs);
            row[n + g] = -1.0;
            // With a nonpositive bound the negated row has a +1 surplus and a
            // nonnegative rhs, so the surplus starts in the basis.
            let flip = rhs <= 0.0;
            if flip {
                row.iter_mut().for_each(|v| *v = -*v);
            }
            row.push(if flip { -rhs } else { rhs });
            raw.push((row, flip.then_some(n + g)));
        }

        let art_start = n + n_ge;
        let n_art = raw.iter().filter(|(_, b)| b.is_none()).count();
        let ncols = art_start + n_art;
        let mut rows = Vec::with_capacity(n_rows);
        let mut basis = Vec::with_capacity(n_rows);
        let mut next_art = art_start;
        for (row, surplus_basic) in raw {
            let rhs = row[art_start];
            let mut full = row[..art_start].to_vec();
            full.resize(ncols, 0.0);
            let b = surplus_basic.unwrap_or_else(|| {
                full[next_art] = 1.0;
                next_art += 1;
                next_art - 1
            });
            full.push(rhs);
            rows.push(full);
            basis.push(b);
        }
        Self {
            rows,
            basis,
            ncols,
            art_start,
        }
    }

    /// Maximizes `costs · z` over the first `allowed` columns from the current
    /// feasible basis.
    fn optimize(
        &mut self,
        costs: &[f64],
        allowed: usize,
        tol: f64,
        cap: usize,
        iterations: &mut usize,
    ) -> Result<Phase, LpError> {
        loop {
            let Some(entering) = self.entering_column(costs, allowed, tol) else {
                return Ok(Phase::Optimal);
            };
            let Some(leaving) = self.leaving_row(entering, tol) else {
                return Ok(Phase::Unbounded);
            };
            if *iterations >= cap {
                return Err(LpError::IterationLimit {
                    iterations: *iterations,
                });
            }
            self.pivot(leaving, entering);
            *iterations += 1;
        }
    }

    fn entering_column(&self, costs: &[f64], allowed: usize, tol: f64) -> Option<usize> {
        let cost_of = |j: usize| costs.get(j).copied().unwrap_or(0.0);
        (0..allowed).find(|&j| {
            if self.basis.contains(&j) {
                return false;
            }
            let reduced = cost_of(j)
                - self
                    .rows
                    .iter()
                    .zip(&self.basis)
                    .map(|(row, &b)| cost_of(b) * row[j])
                    .sum::<f64>();
            reduced > tol
        })
    }

    fn leaving_row(&self, entering: usize, tol: f64) -> Option<usize> {
        let rhs_col = self.ncols;
        let mut best: Option<(usize, f64)> = None;
        for (i, row) in self.rows.iter().enumerate() {
            let a = row[entering];
            if a <= tol {
                continue;
            }
            let ratio = row[rhs_col] / a;
            best = match best {
                None => Some((i, ratio)),
                Some((bi, br)) => {
                    let tie = (ratio - br).abs() <= 1e-12 * (1.0 + br.abs());
                    if ratio < br && !tie || tie && self.basis[i] < self.basis[bi] {
                        Some((i, ratio))
                    } else {
                        Some((bi, br))
                    }
                }
            };
        }
        best.map(|(i, _)| i)
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        self.rows[r].iter_mut().for_each(|v| *v /= p);
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                row.iter_mut()
                    .zip(&pivot_row)
                    .for_each(|(v, &pv)| *v -= f * pv);
                row[c] = 0.0;
            }
        }
        let rhs_col = self.ncols;
        for row in &mut self.rows {
            if row[rhs_col] < 0.0 {
                row[rhs_col] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    /// Pivots zero-valued artificial variables out of the basis after phase
    /// one, dropping rows that turn out to be redundant.
    fn evict_artificials(&mut self, tol: f64) {
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] < self.art_start {
                i += 1;
                continue;
            }
            self.rows[i][self.ncols] = 0.0;
            let replacement = (0..self.art_start)
                .find(|&j| !self.basis.contains(&j) && self.rows[i][j].abs() > tol);
            match replacement {
                Some(j) => {
                    self.pivot(i, j);
                    i += 1;
                }
                None => {
                    self.rows.remove(i);
                    self.basis.remove(i);
                }
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
