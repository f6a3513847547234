//! Bounded dual simplex over `A v − r = 0`.
//!
//! Every model column is boxed, and each row activity `r_i` becomes a
//! logical column with bounds taken from the row sense. An infinite row side
//! is replaced by the activity range implied by the column boxes, widened by
//! one so that it can never be tight at a feasible point. With every
//! variable boxed, any basis is made dual feasible by moving nonbasic
//! variables to the bound matching the sign of their reduced cost, so the
//! dual simplex needs no phase one and re-optimizes directly after rows are
//! appended or the objective changes.
//!
//! The ratio test passes breakpoints by bound flipping while the dual slope
//! stays positive and picks the entering column among Harris-relaxed ties by
//! pivot magnitude. Costs are perturbed against dual degeneracy; the
//! perturbation is removed at the end and any resulting dual infeasibility is
//! cleaned up by flips and further iterations.

use alloc::vec;
use alloc::vec::Vec;

use super::lu::{ColRef, Lu};
use super::{LpSolution, LpStatus, PivotRule, SolverConfig};
use crate::lp::model::{LpModel, Sense};
use crate::rng::splitmix64;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarStatus {
    Basic,
    AtLower,
    AtUpper,
}

/// Status of every structural column followed by every row logical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis {
    pub status: Vec<VarStatus>,
    pub num_cols: usize,
}

/// Amount by which `v` leaves `[lb, ub]` beyond `tol`. Pricing and the
/// final optimality check share it so they cannot disagree at the boundary.
#[inline]
fn bound_violation(v: f64, lb: f64, ub: f64, tol: f64) -> Option<f64> {
    if v < lb - tol {
        Some(lb - v)
    } else if v > ub + tol {
        Some(v - ub)
    } else {
        None
    }
}

const PIVOT_TOL: f64 = 1e-9;
/// Relative mismatch between the row- and column-wise pivot that triggers
/// a refactorization.
const PIVOT_CHECK_TOL: f64 = 1e-7;
const PERTURB_BASE: f64 = 5e-7;

pub struct DualSimplex {
    n: usize,
    m: usize,
    col_start: Vec<usize>,
    col_row: Vec<u32>,
    col_val: Vec<f64>,
    row_start: Vec<usize>,
    row_col: Vec<u32>,
    row_val: Vec<f64>,
    logical_rows: Vec<u32>,
    logical_vals: Vec<f64>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    cost: Vec<f64>,
    work_cost: Vec<f64>,
    x: Vec<f64>,
    d: Vec<f64>,
    status: Vec<VarStatus>,
    head: Vec<usize>,
    lu: Lu,
    cfg: SolverConfig,
    iterations: usize,
    factored: bool,
    // Scratch.
    rho: Vec<f64>,
    alpha_row: Vec<f64>,
    row_touched: Vec<usize>,
    row_mark: Vec<bool>,
    alpha_col: Vec<f64>,
    flip_vec: Vec<f64>,
    // Basic values and bounds by basis position; `x` of basic variables is
    // only synchronized outside `run`.
    xb: Vec<f64>,
    lbb: Vec<f64>,
    ubb: Vec<f64>,
    /// Dual Devex reference weights by basis position.
    weight: Vec<f64>,
}

struct Candidate {
    j: usize,
    ratio: f64,
    abs_alpha: f64,
}

enum Step {
    Continue,
    Optimal,
    Infeasible,
}

impl DualSimplex {
    pub fn new(model: &LpModel, cfg: SolverConfig) -> Result<Self> {
        model.validate()?;
        let n = model.num_cols();
        let mut s = Self {
            n,
            m: 0,
            col_start: Vec::new(),
            col_row: Vec::new(),
            col_val: Vec::new(),
            row_start: vec![0],
            row_col: Vec::new(),
            row_val: Vec::new(),
            logical_rows: Vec::new(),
            logical_vals: Vec::new(),
            lb: model.lower.clone(),
            ub: model.upper.clone(),
            cost: model.objective.clone(),
            work_cost: Vec::new(),
            x: Vec::new(),
            d: Vec::new(),
            status: Vec::new(),
            head: Vec::new(),
            lu: Lu::default(),
            cfg,
            iterations: 0,
            factored: false,
            rho: Vec::new(),
            alpha_row: Vec::new(),
            row_touched: Vec::new(),
            row_mark: Vec::new(),
            alpha_col: Vec::new(),
            flip_vec: Vec::new(),
            weight: Vec::new(),
            xb: Vec::new(),
            lbb: Vec::new(),
            ubb: Vec::new(),
        };
        s.status = (0..n)
            .map(|j| if model.objective[j] < 0.0 { VarStatus::AtUpper } else { VarStatus::AtLower })
            .collect();
        s.x = (0..n).map(|j| if s.status[j] == VarStatus::AtUpper { s.ub[j] } else { s.lb[j] }).collect();
        s.append_rows(model, 0);
        s.crash();
        Ok(s)
    }

    /// Moves zero-cost columns to the bound with the smaller total row
    /// infeasibility, one greedy pass in column order. Either bound keeps
    /// such a column dual feasible.
    fn crash(&mut self) {
        let n = self.n;
        let infeas = |lb: f64, ub: f64, v: f64| (lb - v).max(0.0) + (v - ub).max(0.0);
        for j in 0..n {
            if self.cost[j] != 0.0 || self.ub[j] <= self.lb[j] {
                continue;
            }
            let delta = self.ub[j] - self.lb[j];
            let mut change = 0.0;
            for q in self.col_start[j]..self.col_start[j + 1] {
                let r = n + self.col_row[q] as usize;
                let (lo, hi, act) = (self.lb[r], self.ub[r], self.x[r]);
                change += infeas(lo, hi, act + self.col_val[q] * delta) - infeas(lo, hi, act);
            }
            if change < 0.0 {
                self.status[j] = VarStatus::AtUpper;
                self.x[j] = self.ub[j];
                for q in self.col_start[j]..self.col_start[j + 1] {
                    let r = n + self.col_row[q] as usize;
                    self.x[r] += self.col_val[q] * delta;
                }
            }
        }
    }

    pub fn num_rows(&self) -> usize {
        self.m
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Appends rows `first..` of `model`; their logicals enter the basis.
    pub fn append_rows(&mut self, model: &LpModel, first: usize) {
        assert_eq!(model.num_cols(), self.n);
        let n = self.n;
        let old_m = self.m;
        let new_m = model.num_rows();
        assert!(first == old_m && new_m >= old_m, "rows must be appended in order");
        // Logical variables are stored after the structurals; shift nothing,
        // just grow the per-variable arrays.
        for r in first..new_m {
            let (cols, vals) = model.row(r);
            let (mut lo_imp, mut hi_imp) = (0.0, 0.0);
            for (&c, &v) in cols.iter().zip(vals) {
                let c = c as usize;
                self.row_col.push(c as u32);
                self.row_val.push(v);
                let (a, b) = (v * self.lb[c], v * self.ub[c]);
                lo_imp += a.min(b);
                hi_imp += a.max(b);
            }
            self.row_start.push(self.row_col.len());
            let rhs = model.rhs[r];
            let (lo, hi) = match model.senses[r] {
                Sense::Le => (lo_imp.min(rhs) - 1.0, rhs),
                Sense::Ge => (rhs, hi_imp.max(rhs) + 1.0),
                Sense::Eq => (rhs, rhs),
            };
            self.lb.push(lo);
            self.ub.push(hi);
            self.cost.push(0.0);
            let act: f64 = cols.iter().zip(vals).map(|(&c, &v)| v * self.x[c as usize]).sum();
            self.x.push(act);
            self.status.push(VarStatus::Basic);
            self.head.push(n + r);
            self.logical_rows.push(r as u32);
            self.logical_vals.push(-1.0);
        }
        self.m = new_m;
        self.rebuild_columns();
        let total = n + new_m;
        self.rho.resize(new_m, 0.0);
        self.alpha_col.resize(new_m, 0.0);
        self.flip_vec.resize(new_m, 0.0);
        self.weight.resize(new_m, 1.0);
        self.alpha_row.resize(total, 0.0);
        self.row_mark.resize(total, false);
        self.d.resize(total, 0.0);
        self.factored = false;
    }

    fn rebuild_columns(&mut self) {
        let n = self.n;
        let mut count = vec![0usize; n + 1];
        for &c in &self.row_col {
            count[c as usize + 1] += 1;
        }
        for j in 0..n {
            count[j + 1] += count[j];
        }
        self.col_start = count.clone();
        self.col_row = vec![0; self.row_col.len()];
        self.col_val = vec![0.0; self.row_col.len()];
        let mut next = count;
        for r in 0..self.m {
            for q in self.row_start[r]..self.row_start[r + 1] {
                let c = self.row_col[q] as usize;
                let dst = next[c];
                next[c] += 1;
                self.col_row[dst] = r as u32;
                self.col_val[dst] = self.row_val[q];
            }
        }
    }

    /// Replaces the objective coefficients of the structural columns.
    pub fn set_objective(&mut self, cost: &[f64]) {
        assert_eq!(cost.len(), self.n);
        self.cost[..self.n].copy_from_slice(cost);
    }

    /// Installs a warm-start basis; ignored when inconsistent with the model.
    pub fn set_basis(&mut self, basis: &Basis) -> bool {
        let n = self.n;
        if basis.num_cols != n || basis.status.len() > n + self.m || basis.status.len() < n {
            return false;
        }
        let mut status = basis.status.clone();
        status.resize(n + self.m, VarStatus::Basic);
        let head: Vec<usize> = (0..status.len()).filter(|&j| status[j] == VarStatus::Basic).collect();
        if head.len() != self.m {
            return false;
        }
        for j in 0..status.len() {
            match status[j] {
                VarStatus::AtLower => self.x[j] = self.lb[j],
                VarStatus::AtUpper => self.x[j] = self.ub[j],
                VarStatus::Basic => {}
            }
        }
        self.status = status;
        self.head = head;
        self.weight.iter_mut().for_each(|w| *w = 1.0);
        self.factored = false;
        true
    }

    pub fn basis(&self) -> Basis {
        Basis { status: self.status.clone(), num_cols: self.n }
    }

    fn column(&self, j: usize) -> ColRef<'_> {
        if j < self.n {
            let (a, b) = (self.col_start[j], self.col_start[j + 1]);
            ColRef { rows: &self.col_row[a..b], vals: &self.col_val[a..b] }
        } else {
            let i = j - self.n;
            ColRef { rows: &self.logical_rows[i..i + 1], vals: &self.logical_vals[i..i + 1] }
        }
    }

    fn refactor(&mut self) -> Result<()> {
        for _attempt in 0..4 {
            let mut lu = core::mem::take(&mut self.lu);
            let cols: Vec<ColRef<'_>> = self.head.iter().map(|&j| self.column(j)).collect();
            let res = lu.factorize(self.m, &cols);
            drop(cols);
            self.lu = lu;
            match res {
                Ok(()) => {
                    self.factored = true;
                    return Ok(());
                }
                Err(sing) => {
                    for (&pos, &row) in sing.positions.iter().zip(&sing.rows) {
                        let logical = self.n + row;
                        if self.status[logical] == VarStatus::Basic {
                            return Err(Error::SingularBasis);
                        }
                        let j = self.head[pos];
                        let to_upper = (self.x[j] - self.lb[j]) > (self.ub[j] - self.x[j]);
                        self.status[j] = if to_upper { VarStatus::AtUpper } else { VarStatus::AtLower };
                        self.x[j] = if to_upper { self.ub[j] } else { self.lb[j] };
                        self.head[pos] = logical;
                        self.status[logical] = VarStatus::Basic;
                    }
                }
            }
        }
        Err(Error::SingularBasis)
    }

    /// Recomputes basic values from the nonbasic ones.
    fn compute_primal(&mut self) {
        let m = self.m;
        let mut rhs = core::mem::take(&mut self.alpha_col);
        rhs.iter_mut().for_each(|v| *v = 0.0);
        for j in 0..self.n {
            if self.status[j] != VarStatus::Basic && self.x[j] != 0.0 {
                let xj = self.x[j];
                for q in self.col_start[j]..self.col_start[j + 1] {
                    rhs[self.col_row[q] as usize] -= self.col_val[q] * xj;
                }
            }
        }
        for i in 0..m {
            let j = self.n + i;
            if self.status[j] != VarStatus::Basic {
                rhs[i] += self.x[j];
            }
        }
        self.lu.ftran(&mut rhs);
        self.xb.resize(m, 0.0);
        self.lbb.resize(m, 0.0);
        self.ubb.resize(m, 0.0);
        for pos in 0..m {
            let j = self.head[pos];
            self.x[j] = rhs[pos];
            self.xb[pos] = rhs[pos];
            self.lbb[pos] = self.lb[j];
            self.ubb[pos] = self.ub[j];
        }
        self.alpha_col = rhs;
    }

    /// Recomputes row prices and reduced costs from `work_cost`.
    fn compute_duals(&mut self) {
        let m = self.m;
        let mut pi = core::mem::take(&mut self.rho);
        for pos in 0..m {
            pi[pos] = self.work_cost[self.head[pos]];
        }
        self.lu.btran(&mut pi);
        for j in 0..self.n {
            let mut dj = self.work_cost[j];
            for q in self.col_start[j]..self.col_start[j + 1] {
                dj -= pi[self.col_row[q] as usize] * self.col_val[q];
            }
            self.d[j] = dj;
        }
        for i in 0..m {
            self.d[self.n + i] = self.work_cost[self.n + i] + pi[i];
        }
        for &j in &self.head {
            self.d[j] = 0.0;
        }
        self.rho = pi;
    }

    /// Moves nonbasic variables to the bound their reduced cost prefers.
    fn flip_to_dual_feasible(&mut self, tol: f64) -> bool {
        let mut flipped = false;
        for j in 0..self.n + self.m {
            match self.status[j] {
                VarStatus::AtLower if self.d[j] < -tol && self.ub[j] > self.lb[j] => {
                    self.status[j] = VarStatus::AtUpper;
                    self.x[j] = self.ub[j];
                    flipped = true;
                }
                VarStatus::AtUpper if self.d[j] > tol && self.ub[j] > self.lb[j] => {
                    self.status[j] = VarStatus::AtLower;
                    self.x[j] = self.lb[j];
                    flipped = true;
                }
                _ => {}
            }
        }
        flipped
    }

    fn perturbed_costs(&self) -> Vec<f64> {
        let mut c = self.cost.clone();
        for j in 0..self.n {
            let u = (splitmix64(j as u64 ^ 0x5EED) >> 11) as f64 / (1u64 << 53) as f64;
            let xi = PERTURB_BASE * (1.0 + self.cost[j].abs()) * (0.5 + u);
            c[j] += match self.status[j] {
                VarStatus::AtUpper => -xi,
                _ => xi,
            };
        }
        c
    }

    /// Runs the dual simplex to optimality from the current basis.
    pub fn solve(&mut self) -> Result<LpStatus> {
        let tol_d = self.cfg.opt_tol;
        if !self.factored {
            self.refactor()?;
        }
        self.compute_primal();
        self.work_cost = if self.cfg.perturb { self.perturbed_costs() } else { self.cost.clone() };
        self.compute_duals();
        if self.flip_to_dual_feasible(0.0) {
            self.compute_primal();
        }
        let mut perturbed = self.cfg.perturb;
        let mut cleanups = 0;
        loop {
            match self.run()? {
                LpStatus::Optimal => {}
                other => {
                    if perturbed {
                        // Confirm without perturbation before reporting.
                        perturbed = false;
                        self.work_cost = self.cost.clone();
                        self.refactor()?;
                        self.compute_primal();
                        self.compute_duals();
                        if self.flip_to_dual_feasible(0.0) {
                            self.compute_primal();
                        }
                        continue;
                    }
                    return Ok(other);
                }
            }
            self.work_cost = self.cost.clone();
            perturbed = false;
            self.refactor()?;
            self.compute_primal();
            self.compute_duals();
            let flipped = self.flip_to_dual_feasible(tol_d);
            if flipped {
                self.compute_primal();
            }
            let ftol = self.cfg.feas_tol;
            let primal_ok =
                self.head.iter().all(|&j| bound_violation(self.x[j], self.lb[j], self.ub[j], ftol).is_none());
            if primal_ok && !flipped {
                return Ok(LpStatus::Optimal);
            }
            cleanups += 1;
            if cleanups > 50 {
                return Err(Error::SingularBasis);
            }
        }
    }

    fn run(&mut self) -> Result<LpStatus> {
        let status = self.run_inner();
        for (pos, &j) in self.head.iter().enumerate() {
            self.x[j] = self.xb[pos];
        }
        status
    }

    fn run_inner(&mut self) -> Result<LpStatus> {
        let mut stalled = 0usize;
        let mut since_refactor = 0usize;
        loop {
            if self.iterations >= self.cfg.max_iterations {
                return Ok(LpStatus::IterationLimit);
            }
            if since_refactor >= self.cfg.refactor_interval
                || self.lu.fill_ratio() > 3.0
            {
                self.refactor()?;
                self.compute_primal();
                self.compute_duals();
                if self.flip_to_dual_feasible(self.cfg.opt_tol) {
                    self.compute_primal();
                }
                since_refactor = 0;
            }
            let bland = self.cfg.pivot_rule == PivotRule::Bland
                || (self.cfg.pivot_rule == PivotRule::DantzigBland && stalled >= self.cfg.bland_after);
            match self.iterate(bland, &mut stalled)? {
                Step::Continue => since_refactor += 1,
                Step::Optimal => return Ok(LpStatus::Optimal),
                Step::Infeasible => return Ok(LpStatus::Infeasible),
            }
            if self.lu.num_updates() == 0 {
                since_refactor = 0;
            }
        }
    }

    fn iterate(&mut self, bland: bool, stalled: &mut usize) -> Result<Step> {
        let n = self.n;
        let m = self.m;
        let ftol = self.cfg.feas_tol;
        // Leaving row.
        let mut p = usize::MAX;
        let mut best = 0.0;
        for pos in 0..m {
            let Some(inf) = bound_violation(self.xb[pos], self.lbb[pos], self.ubb[pos], ftol) else {
                continue;
            };
            if bland {
                if p == usize::MAX || self.head[pos] < self.head[p] {
                    p = pos;
                }
            } else if inf * inf > best * self.weight[pos] {
                best = inf * inf / self.weight[pos];
                p = pos;
            }
        }
        if p == usize::MAX {
            return Ok(Step::Optimal);
        }
        let jp = self.head[p];
        let xp = self.xb[p];
        let to_lower = xp < self.lb[jp];
        let target = if to_lower { self.lb[jp] } else { self.ub[jp] };

        // Row p of the simplex tableau.
        let mut rho = core::mem::take(&mut self.rho);
        rho.iter_mut().for_each(|v| *v = 0.0);
        rho[p] = 1.0;
        self.lu.btran(&mut rho);
        for &j in &self.row_touched {
            self.alpha_row[j] = 0.0;
            self.row_mark[j] = false;
        }
        self.row_touched.clear();
        for i in 0..m {
            let r = rho[i];
            if r == 0.0 {
                continue;
            }
            for q in self.row_start[i]..self.row_start[i + 1] {
                let c = self.row_col[q] as usize;
                if !self.row_mark[c] {
                    self.row_mark[c] = true;
                    self.row_touched.push(c);
                }
                self.alpha_row[c] += r * self.row_val[q];
            }
            let lj = n + i;
            if !self.row_mark[lj] {
                self.row_mark[lj] = true;
                self.row_touched.push(lj);
            }
            self.alpha_row[lj] -= r;
        }
        self.rho = rho;

        // Ratio test with bound flipping.
        let mut cands: Vec<Candidate> = Vec::new();
        for &j in &self.row_touched {
            let st = self.status[j];
            if st == VarStatus::Basic || self.ub[j] <= self.lb[j] {
                continue;
            }
            let a = self.alpha_row[j];
            let ah = if to_lower { -a } else { a };
            let eligible = match st {
                VarStatus::AtLower => ah > PIVOT_TOL,
                VarStatus::AtUpper => ah < -PIVOT_TOL,
                VarStatus::Basic => false,
            };
            if eligible {
                cands.push(Candidate { j, ratio: self.d[j].abs() / ah.abs(), abs_alpha: ah.abs() });
            }
        }
        if cands.is_empty() {
            return Ok(Step::Infeasible);
        }
        let mut flips: Vec<usize> = Vec::new();
        let q;
        if bland {
            let mut bi = 0;
            for (c, cand) in cands.iter().enumerate() {
                let b = &cands[bi];
                if cand.ratio < b.ratio || (cand.ratio == b.ratio && cand.j < b.j) {
                    bi = c;
                }
            }
            q = cands[bi].j;
        } else {
            let tol_d = self.cfg.opt_tol;
            let mut slope = (xp - target).abs();
            let mut remaining: Vec<usize> = (0..cands.len()).collect();
            loop {
                let bound = remaining
                    .iter()
                    .map(|&c| (self.d[cands[c].j].abs() + tol_d) / cands[c].abs_alpha)
                    .fold(f64::INFINITY, f64::min);
                let (group, rest): (Vec<usize>, Vec<usize>) =
                    remaining.iter().partition(|&&c| cands[c].ratio <= bound);
                let drop: f64 = group
                    .iter()
                    .map(|&c| cands[c].abs_alpha * (self.ub[cands[c].j] - self.lb[cands[c].j]))
                    .sum();
                if slope - drop <= 0.0 || rest.is_empty() {
                    if slope - drop > 0.0 && rest.is_empty() {
                        // Even flipping every candidate leaves the row infeasible
                        // unless one of them enters the basis.
                    }
                    let mut bi = group[0];
                    for &c in &group {
                        let (a, b) = (&cands[c], &cands[bi]);
                        if a.abs_alpha > b.abs_alpha || (a.abs_alpha == b.abs_alpha && a.j < b.j) {
                            bi = c;
                        }
                    }
                    q = cands[bi].j;
                    break;
                }
                slope -= drop;
                flips.extend(group.iter().map(|&c| cands[c].j));
                remaining = rest;
            }
        }

        // Bound flips.
        if !flips.is_empty() {
            let mut fv = core::mem::take(&mut self.flip_vec);
            fv.iter_mut().for_each(|v| *v = 0.0);
            for &j in &flips {
                let (new_status, new_x) = match self.status[j] {
                    VarStatus::AtLower => (VarStatus::AtUpper, self.ub[j]),
                    _ => (VarStatus::AtLower, self.lb[j]),
                };
                let delta = new_x - self.x[j];
                self.x[j] = new_x;
                self.status[j] = new_status;
                let col = self.column(j);
                for (&r, &v) in col.rows.iter().zip(col.vals) {
                    fv[r as usize] += v * delta;
                }
            }
            self.lu.ftran(&mut fv);
            for (xb, f) in self.xb.iter_mut().zip(fv.iter()) {
                *xb -= f;
            }
            self.flip_vec = fv;
        }

        // Entering column.
        let mut col = core::mem::take(&mut self.alpha_col);
        col.iter_mut().for_each(|v| *v = 0.0);
        {
            let c = self.column(q);
            for (&r, &v) in c.rows.iter().zip(c.vals) {
                col[r as usize] = v;
            }
        }
        self.lu.ftran_entering(&mut col);
        let apq = col[p];
        let arq = self.alpha_row[q];
        if (apq - arq).abs() > PIVOT_CHECK_TOL * (1.0 + apq.abs()) || apq.abs() < PIVOT_TOL {
            self.alpha_col = col;
            self.refactor()?;
            self.compute_primal();
            self.compute_duals();
            if self.flip_to_dual_feasible(self.cfg.opt_tol) {
                self.compute_primal();
            }
            return Ok(Step::Continue);
        }
        let xp = self.xb[p];
        let theta_p = (xp - target) / apq;
        let wp = self.weight[p];
        let mut reset = false;
        for pos in 0..m {
            let a = col[pos];
            if a != 0.0 {
                self.xb[pos] -= theta_p * a;
                let r = a / apq;
                let w = &mut self.weight[pos];
                *w = w.max(r * r * wp);
                reset |= *w > 1e7;
            }
        }
        self.weight[p] = (wp / (apq * apq)).max(1.0);
        if reset {
            self.weight.iter_mut().for_each(|w| *w = 1.0);
        }
        self.xb[p] = self.x[q] + theta_p;
        self.lbb[p] = self.lb[q];
        self.ubb[p] = self.ub[q];
        self.x[jp] = target;

        let theta_d = self.d[q] / arq;
        if theta_d.abs() <= 1e-12 {
            *stalled += 1;
        } else {
            *stalled = 0;
        }
        for &j in &self.row_touched {
            if self.status[j] != VarStatus::Basic {
                self.d[j] -= theta_d * self.alpha_row[j];
            }
        }
        self.d[q] = 0.0;
        self.d[jp] = -theta_d;

        self.status[jp] = if to_lower { VarStatus::AtLower } else { VarStatus::AtUpper };
        self.status[q] = VarStatus::Basic;
        self.head[p] = q;
        self.alpha_col = col;
        self.iterations += 1;
        let upd = self.lu.update(p, apq);
        if upd.is_err() {
            self.refactor()?;
            self.compute_primal();
            self.compute_duals();
            if self.flip_to_dual_feasible(self.cfg.opt_tol) {
                self.compute_primal();
            }
        }
        Ok(Step::Continue)
    }

    /// Current primal values, prices and reduced costs against the true costs.
    pub fn solution(&mut self, status: LpStatus, obj_constant: f64) -> LpSolution {
        let n = self.n;
        let m = self.m;
        self.work_cost = self.cost.clone();
        if self.factored {
            self.compute_duals();
        }
        let primal = self.x[..n].to_vec();
        let activity = self.x[n..n + m].to_vec();
        let duals = self.rho[..m].to_vec();
        let reduced = self.d[..n].to_vec();
        let objective = obj_constant + (0..n).map(|j| self.cost[j] * self.x[j]).sum::<f64>();
        let mut dual_objective = obj_constant;
        for i in 0..m {
            let y = duals[i];
            let j = n + i;
            dual_objective += if y > 0.0 { y * self.lb[j] } else { y * self.ub[j] };
        }
        for j in 0..n {
            let dj = reduced[j];
            dual_objective += if dj > 0.0 { dj * self.lb[j] } else { dj * self.ub[j] };
        }
        LpSolution {
            status,
            primal,
            row_activity: activity,
            duals,
            reduced_costs: reduced,
            objective,
            dual_objective,
            iterations: self.iterations,
        }
    }
}
