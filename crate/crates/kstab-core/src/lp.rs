//! Exact linear programming over the rationals.
//!
//! Two-phase primal simplex with Bland's anti-cycling rule. Sized for the
//! problems that arise here: a handful of rows with up to a few thousand
//! columns (epigraph duals over lattice grids), or small dense systems.

// Tableau updates index across rows and columns.
#![allow(clippy::needless_range_loop)]

use crate::error::{KstabError, Result};
use crate::rational::Ratio;
use crate::vector::QVec;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct LpProblem {
    pub num_vars: usize,
    /// Objective coefficients; the solver minimizes.
    pub minimize: Vec<Ratio>,
    pub constraints: Vec<(Vec<Ratio>, Relation, Ratio)>,
    /// When true the structural variables are free; otherwise nonnegative.
    pub free_vars: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Unbounded,
    Infeasible,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective: Ratio,
    pub point: Vec<Ratio>,
    /// One simplex multiplier per constraint, in input order.
    pub duals: Vec<Ratio>,
}

struct Tableau {
    rows: Vec<Vec<Ratio>>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Ratio {
        &self.rows[i][self.ncols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.rows[r][c].clone();
        debug_assert!(!piv.is_zero());
        for x in self.rows[r].iter_mut() {
            *x = &*x / &piv;
        }
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let factor = self.rows[i][c].clone();
            if factor.is_zero() {
                continue;
            }
            for j in 0..=self.ncols {
                let delta = &factor * &self.rows[r][j];
                self.rows[i][j] = &self.rows[i][j] - &delta;
            }
        }
        self.basis[r] = c;
    }

    /// Bland's rule: entering column = lowest index with negative reduced
    /// cost, leaving row = lowest basis index among ratio-test ties.
    fn run(&mut self, costs: &[Ratio], forbidden_from: usize) -> LpStatus {
        loop {
            let m = self.rows.len();
            let mut entering = None;
            'cols: for j in 0..self.ncols {
                if j >= forbidden_from || self.basis.contains(&j) {
                    continue;
                }
                let mut rc = costs[j].clone();
                for i in 0..m {
                    if costs[self.basis[i]].is_zero() || self.rows[i][j].is_zero() {
                        continue;
                    }
                    rc -= &costs[self.basis[i]] * &self.rows[i][j];
                }
                if rc.is_negative() {
                    entering = Some(j);
                    break 'cols;
                }
            }
            let Some(c) = entering else {
                return LpStatus::Optimal;
            };
            let mut leaving: Option<(usize, Ratio)> = None;
            for i in 0..m {
                if self.rows[i][c].is_positive() {
                    let ratio = self.rhs(i) / &self.rows[i][c];
                    match &leaving {
                        None => leaving = Some((i, ratio)),
                        Some((best_i, best)) => {
                            if ratio < *best
                                || (ratio == *best && self.basis[i] < self.basis[*best_i])
                            {
                                leaving = Some((i, ratio));
                            }
                        }
                    }
                }
            }
            let Some((r, _)) = leaving else {
                return LpStatus::Unbounded;
            };
            self.pivot(r, c);
        }
    }
}

pub fn solve(problem: &LpProblem) -> Result<LpSolution> {
    let m = problem.constraints.len();
    let n = problem.num_vars;
    for (row, _, _) in &problem.constraints {
        if row.len() != n {
            return Err(KstabError::DimensionMismatch {
                expected: n,
                got: row.len(),
            });
        }
    }
    if problem.minimize.len() != n {
        return Err(KstabError::DimensionMismatch {
            expected: n,
            got: problem.minimize.len(),
        });
    }

    // Structural columns: x, or (x+, x-) pairs when free.
    let structurals = if problem.free_vars { 2 * n } else { n };
    let struct_coeff = |row: &[Ratio], j: usize| -> Ratio {
        if problem.free_vars {
            let k = j / 2;
            if j.is_multiple_of(2) {
                row[k].clone()
            } else {
                -row[k].clone()
            }
        } else {
            row[j].clone()
        }
    };

    // Count slack and artificial columns.
    let mut flipped = vec![false; m];
    let mut relations = Vec::with_capacity(m);
    for (i, (_, rel, rhs)) in problem.constraints.iter().enumerate() {
        let mut rel = *rel;
        if rhs.is_negative() {
            flipped[i] = true;
            rel = match rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
        relations.push(rel);
    }
    let n_slack = relations
        .iter()
        .filter(|r| matches!(r, Relation::Le | Relation::Ge))
        .count();
    let n_art = relations
        .iter()
        .filter(|r| matches!(r, Relation::Ge | Relation::Eq))
        .count();
    let ncols = structurals + n_slack + n_art;

    let mut rows = Vec::with_capacity(m);
    let mut basis = vec![usize::MAX; m];
    let mut identity_col = vec![usize::MAX; m];
    let mut slack_at = structurals;
    let mut art_at = structurals + n_slack;
    for (i, (coeffs, _, rhs)) in problem.constraints.iter().enumerate() {
        let sign = if flipped[i] { -Ratio::one() } else { Ratio::one() };
        let mut row = vec![Ratio::zero(); ncols + 1];
        for j in 0..structurals {
            row[j] = &sign * struct_coeff(coeffs, j);
        }
        row[ncols] = &sign * rhs;
        match relations[i] {
            Relation::Le => {
                row[slack_at] = Ratio::one();
                basis[i] = slack_at;
                identity_col[i] = slack_at;
                slack_at += 1;
            }
            Relation::Ge => {
                row[slack_at] = -Ratio::one();
                slack_at += 1;
                row[art_at] = Ratio::one();
                basis[i] = art_at;
                identity_col[i] = art_at;
                art_at += 1;
            }
            Relation::Eq => {
                row[art_at] = Ratio::one();
                basis[i] = art_at;
                identity_col[i] = art_at;
                art_at += 1;
            }
        }
        rows.push(row);
    }

    let mut tab = Tableau { rows, basis, ncols };

    // Phase 1: drive artificials to zero.
    if n_art > 0 {
        let mut costs = vec![Ratio::zero(); ncols];
        for c in costs.iter_mut().take(ncols).skip(structurals + n_slack) {
            *c = Ratio::one();
        }
        let status = tab.run(&costs, ncols);
        debug_assert_eq!(status, LpStatus::Optimal);
        let mut infeas = Ratio::zero();
        for i in 0..m {
            if tab.basis[i] >= structurals + n_slack {
                infeas += tab.rhs(i);
            }
        }
        if !infeas.is_zero() {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                objective: Ratio::zero(),
                point: vec![Ratio::zero(); n],
                duals: vec![Ratio::zero(); m],
            });
        }
        // Pivot zero-valued artificials out of the basis when possible.
        for i in 0..m {
            if tab.basis[i] >= structurals + n_slack {
                if let Some(j) = (0..structurals + n_slack).find(|&j| !tab.rows[i][j].is_zero()) {
                    tab.pivot(i, j);
                }
            }
        }
    }

    // Phase 2 with the real objective; artificial columns may not re-enter.
    let mut costs = vec![Ratio::zero(); ncols];
    for j in 0..structurals {
        costs[j] = struct_coeff(&problem.minimize, j);
    }
    let status = tab.run(&costs, structurals + n_slack);
    if status == LpStatus::Unbounded {
        return Ok(LpSolution {
            status,
            objective: Ratio::zero(),
            point: vec![Ratio::zero(); n],
            duals: vec![Ratio::zero(); m],
        });
    }

    let mut point = vec![Ratio::zero(); n];
    for i in 0..m {
        let b = tab.basis[i];
        if b < structurals {
            let value = tab.rhs(i).clone();
            if problem.free_vars {
                let k = b / 2;
                if b.is_multiple_of(2) {
                    point[k] = &point[k] + &value;
                } else {
                    point[k] = &point[k] - &value;
                }
            } else {
                point[b] = value;
            }
        }
    }
    let objective = problem
        .minimize
        .iter()
        .zip(&point)
        .map(|(c, x)| c * x)
        .fold(Ratio::zero(), |acc, t| acc + t);

    // Multipliers read off the identity columns: y_i = c_B . B^{-1} e_i.
    let mut duals = vec![Ratio::zero(); m];
    for (i, dual) in duals.iter_mut().enumerate() {
        let col = identity_col[i];
        let mut y = Ratio::zero();
        for r in 0..m {
            if costs[tab.basis[r]].is_zero() || tab.rows[r][col].is_zero() {
                continue;
            }
            y += &costs[tab.basis[r]] * &tab.rows[r][col];
        }
        if flipped[i] {
            y = -y;
        }
        *dual = y;
    }

    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective,
        point,
        duals,
    })
}

/// Minimizes `max_i (<g_i, x> + c_i)` over all of Q^n.
///
/// Small form sets go straight to the dual program; large ones run an exact
/// active-set loop that only ever hands small subproblems to the simplex.
pub fn min_of_max_affine(forms: &[(QVec, Ratio)]) -> Result<(Ratio, QVec)> {
    if forms.len() <= 64 {
        min_of_max_affine_small(forms)
    } else {
        min_of_max_affine_active_set(forms)
    }
}

fn min_of_max_affine_small(forms: &[(QVec, Ratio)]) -> Result<(Ratio, QVec)> {
    let Some(first) = forms.first() else {
        return Err(KstabError::InvalidInput("empty form list".into()));
    };
    let n = first.0.dim();
    if forms.len() == 1 {
        // Affine objective: bounded only when the gradient vanishes.
        if !first.0.is_zero() {
            return Err(KstabError::UnboundedObjective);
        }
        return Ok((first.1.clone(), QVec::zeros(n)));
    }
    let mut constraints = Vec::with_capacity(n + 1);
    let ones = vec![Ratio::one(); forms.len()];
    constraints.push((ones, Relation::Eq, Ratio::one()));
    for k in 0..n {
        let row: Vec<Ratio> = forms.iter().map(|(g, _)| g.0[k].clone()).collect();
        constraints.push((row, Relation::Eq, Ratio::zero()));
    }
    let problem = LpProblem {
        num_vars: forms.len(),
        minimize: forms.iter().map(|(_, c)| -c.clone()).collect(),
        constraints,
        free_vars: false,
    };
    let sol = solve(&problem)?;
    match sol.status {
        LpStatus::Infeasible => Err(KstabError::UnboundedObjective),
        LpStatus::Unbounded => Err(KstabError::Internal(
            "dual of an epigraph program cannot be unbounded".into(),
        )),
        LpStatus::Optimal => {
            // Multipliers give a feasible point of the epigraph program at the
            // optimal value: t = -y_0 and x = y_tail satisfy t >= <g,x> + c.
            let value = -sol.objective;
            let witness = QVec(sol.duals[1..=n].to_vec());
            Ok((value, witness))
        }
    }
}

/// Exact cutting-plane loop: solve on a working subset, then add the most
/// violated form until none is violated. Terminates because the subset only
/// grows; every subproblem certificate is exact.
fn min_of_max_affine_active_set(forms: &[(QVec, Ratio)]) -> Result<(Ratio, QVec)> {
    let n = forms[0].0.dim();
    let mut active: Vec<usize> = Vec::new();
    // Seed with per-coordinate gradient extremes and the largest constant.
    for k in 0..n {
        let hi = (0..forms.len())
            .max_by(|&a, &b| forms[a].0 .0[k].cmp(&forms[b].0 .0[k]))
            .unwrap();
        let lo = (0..forms.len())
            .min_by(|&a, &b| forms[a].0 .0[k].cmp(&forms[b].0 .0[k]))
            .unwrap();
        for idx in [hi, lo] {
            if !active.contains(&idx) {
                active.push(idx);
            }
        }
    }
    let top = (0..forms.len())
        .max_by(|&a, &b| forms[a].1.cmp(&forms[b].1))
        .unwrap();
    if !active.contains(&top) {
        active.push(top);
    }

    loop {
        let subset: Vec<(QVec, Ratio)> = active.iter().map(|&i| forms[i].clone()).collect();
        match min_of_max_affine_small(&subset) {
            Ok((value, witness)) => {
                // Most violated form at the witness, lowest index on ties.
                let mut worst: Option<(usize, Ratio)> = None;
                for (j, (g, c)) in forms.iter().enumerate() {
                    let at = g.dot(&witness) + c;
                    match &worst {
                        None => worst = Some((j, at)),
                        Some((_, w)) if at > *w => worst = Some((j, at)),
                        _ => {}
                    }
                }
                let (j, peak) = worst.expect("nonempty forms");
                if peak <= value {
                    return Ok((value, witness));
                }
                debug_assert!(!active.contains(&j));
                active.push(j);
            }
            Err(KstabError::UnboundedObjective) => {
                // Certificate direction with <g_i, d> <= -1 on the subset.
                let constraints = active
                    .iter()
                    .map(|&i| (forms[i].0 .0.clone(), Relation::Le, -Ratio::one()))
                    .collect();
                let cert = solve(&LpProblem {
                    num_vars: n,
                    minimize: vec![Ratio::zero(); n],
                    constraints,
                    free_vars: true,
                })?;
                if cert.status != LpStatus::Optimal {
                    return Err(KstabError::Internal(
                        "descent certificate must exist for an unbounded subset".into(),
                    ));
                }
                let d = QVec(cert.point);
                // A form blocking the descent direction must exist, or the
                // full objective is unbounded too.
                let mut blocker: Option<(usize, Ratio)> = None;
                for (j, (g, _)) in forms.iter().enumerate() {
                    let along = g.dot(&d);
                    match &blocker {
                        None => blocker = Some((j, along)),
                        Some((_, b)) if along > *b => blocker = Some((j, along)),
                        _ => {}
                    }
                }
                let (j, along) = blocker.expect("nonempty forms");
                if along.is_negative() {
                    return Err(KstabError::UnboundedObjective);
                }
                debug_assert!(!active.contains(&j));
                active.push(j);
            }
            Err(other) => return Err(other),
        }
    }
}
