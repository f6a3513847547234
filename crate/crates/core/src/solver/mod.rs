//! Linear programming: a bounded dual simplex, the cutting-plane loop and
//! the recovery and uniqueness checks built on it.

mod lu;
pub mod recovery;
mod simplex;

use alloc::vec::Vec;

pub use recovery::{
    lp_recovers, solve_model_with_cuts, solve_with_cuts, truth_point, uniqueness_probe, CutLoopConfig, CutSolve,
    RecoveryVerdict, Uniqueness, RECOVERY_TOL, UNIQUENESS_TOL,
};
pub use simplex::{Basis, DualSimplex, VarStatus};

use crate::lp::LpModel;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PivotRule {
    /// Largest primal infeasibility with bound-flipping ratio test, switching
    /// to Bland's rule after `bland_after` consecutive degenerate pivots.
    #[default]
    DantzigBland,
    /// Smallest-index rule throughout.
    Bland,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub feas_tol: f64,
    pub opt_tol: f64,
    pub pivot_rule: PivotRule,
    pub max_iterations: usize,
    pub bland_after: usize,
    /// Basis updates between refactorizations.
    pub refactor_interval: usize,
    /// Deterministic cost perturbation against dual degeneracy.
    pub perturb: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            feas_tol: 1e-9,
            opt_tol: 1e-9,
            pivot_rule: PivotRule::DantzigBland,
            max_iterations: 5_000_000,
            bland_after: 1000,
            refactor_interval: 100,
            perturb: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.feas_tol > 0.0 && self.opt_tol > 0.0) {
            return Err(Error::InvalidConfig("tolerances must be positive".into()));
        }
        if self.refactor_interval == 0 {
            return Err(Error::InvalidConfig("refactor interval must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    /// Never produced for boxed models; kept for completeness of the status set.
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub primal: Vec<f64>,
    pub row_activity: Vec<f64>,
    /// Row prices `π` with `c = Aᵀπ + d`; `≤ 0` on `Le` rows and `≥ 0` on
    /// `Ge` rows at optimality.
    pub duals: Vec<f64>,
    pub reduced_costs: Vec<f64>,
    /// Primal objective including the model constant.
    pub objective: f64,
    /// Objective of the dual solution induced by the duals and reduced costs.
    pub dual_objective: f64,
    pub iterations: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// Solves `model` from the slack basis.
pub fn solve(model: &LpModel, cfg: &SolverConfig) -> Result<LpSolution> {
    cfg.validate()?;
    let mut s = DualSimplex::new(model, *cfg)?;
    let status = s.solve()?;
    Ok(s.solution(status, model.obj_constant))
}
