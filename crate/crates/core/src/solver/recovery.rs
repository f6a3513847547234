//! Cutting-plane loop over the lazy families, the uniqueness probe over the
//! optimal face, and the recovery verdict.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::{Basis, DualSimplex, LpSolution, LpStatus, SolverConfig, VarStatus};
use crate::lp::{build, separate, BuildMode, ColumnLayout, CutDescriptor, LpModel, Relaxation, RowKind, Sense};
use crate::tensor::{BinaryTensor, FactorTriple};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutLoopConfig {
    /// Cuts added per round, at most one per anchor and family.
    pub max_cuts: usize,
    pub max_rounds: usize,
    /// Violation above which a cut is added.
    pub separation_tol: f64,
    pub build_mode: BuildMode,
}

impl Default for CutLoopConfig {
    fn default() -> Self {
        Self { max_cuts: 5000, max_rounds: 10_000, separation_tol: 2e-9, build_mode: BuildMode::Auto }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CutSolve {
    pub solution: LpSolution,
    /// Separation rounds that added at least one cut.
    pub rounds: usize,
    pub cuts_added: usize,
}

/// A model, its solver state and the instance that drives separation.
struct CutLoop<'a> {
    g: &'a BinaryTensor,
    model: LpModel,
    simplex: DualSimplex,
    added: BTreeSet<CutDescriptor>,
    cut_cfg: CutLoopConfig,
    rounds: usize,
}

/// A dual feasible starting basis for models whose leading rows are the
/// standard rows of `g`. Every `w` is basic in its zero-entry row or in one
/// of the three rows of its one-entry; the mode is chosen greedily so that
/// as many factor columns as possible have nonpositive reduced cost and can
/// start at their upper bound.
fn structured_start(g: &BinaryTensor, model: &LpModel) -> Option<Basis> {
    let lay = model.layout?;
    if lay.dims != g.dims() {
        return None;
    }
    let d = lay.dims;
    let nf = lay.w_offset();
    let n = model.num_cols();
    // Reduced cost of each factor column: +1 per zero-entry row, −1 per
    // one-entry row the entry's `w` is made basic in.
    let mut zeros = alloc::vec![0i64; nf];
    let mut ones = alloc::vec![0i64; nf];
    for idx in 0..d.len() {
        let (i, j, k) = d.coords(idx);
        let r = if g.get_linear(idx) { &mut ones } else { &mut zeros };
        for c in [lay.x(i), lay.y(j), lay.z(k)] {
            r[c] += 1;
        }
    }
    let mut red = zeros.clone();
    let mut chosen = alloc::vec![u8::MAX; d.len()];
    for idx in 0..d.len() {
        if g.get_linear(idx) {
            let (i, j, k) = d.coords(idx);
            let cols = [lay.x(i), lay.y(j), lay.z(k)];
            let mode = (0..3).max_by_key(|&t| (red[cols[t]], core::cmp::Reverse(t))).unwrap_or(0);
            red[cols[mode]] -= 1;
            chosen[idx] = mode as u8;
        }
    }
    let mut status = alloc::vec![VarStatus::Basic; n + model.num_rows()];
    for c in 0..nf {
        let at_upper = red[c] < 0 || (red[c] == 0 && ones[c] >= zeros[c]);
        status[c] = if at_upper { VarStatus::AtUpper } else { VarStatus::AtLower };
    }
    let mut covered = alloc::vec![false; d.len()];
    for (r, kind) in model.kinds.iter().enumerate() {
        match *kind {
            RowKind::Upper { entry, mode } if chosen[entry as usize] == mode && !covered[entry as usize] => {
                covered[entry as usize] = true;
                status[n + r] = VarStatus::AtUpper;
            }
            RowKind::Lower { entry } if !covered[entry as usize] => {
                covered[entry as usize] = true;
                status[n + r] = VarStatus::AtLower;
            }
            _ => {}
        }
    }
    covered.iter().all(|&c| c).then_some(Basis { status, num_cols: n })
}

impl<'a> CutLoop<'a> {
    fn new(g: &'a BinaryTensor, model: LpModel, cfg: SolverConfig, cut_cfg: CutLoopConfig) -> Result<Self> {
        cfg.validate()?;
        let mut simplex = DualSimplex::new(&model, cfg)?;
        if let Some(basis) = structured_start(g, &model) {
            simplex.set_basis(&basis);
        }
        let added = model
            .kinds
            .iter()
            .filter_map(|k| match k {
                RowKind::Cut(c) => Some(*c),
                _ => None,
            })
            .collect();
        Ok(Self { g, model, simplex, added, cut_cfg, rounds: 0 })
    }

    /// Re-optimizes until the lazy families hold at the current optimum.
    fn run(&mut self) -> Result<LpSolution> {
        loop {
            let status = self.simplex.solve()?;
            let sol = self.simplex.solution(status, self.model.obj_constant);
            if status != LpStatus::Optimal || self.model.lazy_families.is_empty() {
                return Ok(sol);
            }
            let found = separate(
                self.g,
                &sol.primal,
                &self.model.lazy_families,
                self.cut_cfg.max_cuts,
                self.cut_cfg.separation_tol,
            );
            let first = self.model.num_rows();
            for (cut, _) in found {
                if self.added.insert(cut) {
                    self.model.add_cut(&cut);
                }
            }
            if self.model.num_rows() == first {
                return Ok(sol);
            }
            self.rounds += 1;
            if self.rounds > self.cut_cfg.max_rounds {
                return Err(Error::IterationLimit(self.rounds));
            }
            self.model.revision += 1;
            self.simplex.append_rows(&self.model, first);
        }
    }

    fn cuts_added(&self) -> usize {
        self.added.len()
    }
}

/// Solves `relaxation` for `g`, generating its lazy families by separation.
pub fn solve_with_cuts(
    g: &BinaryTensor,
    relaxation: Relaxation,
    cfg: &SolverConfig,
    cut_cfg: &CutLoopConfig,
) -> Result<CutSolve> {
    let model = build(g, relaxation, cut_cfg.build_mode)?;
    solve_model_with_cuts(g, model, cfg, cut_cfg)
}

/// Runs the cut loop on a prebuilt model of `g`.
pub fn solve_model_with_cuts(
    g: &BinaryTensor,
    model: LpModel,
    cfg: &SolverConfig,
    cut_cfg: &CutLoopConfig,
) -> Result<CutSolve> {
    let eager_cuts = model.kinds.iter().filter(|k| matches!(k, RowKind::Cut(_))).count();
    let mut lp = CutLoop::new(g, model, *cfg, *cut_cfg)?;
    let solution = lp.run()?;
    Ok(CutSolve { solution, rounds: lp.rounds, cuts_added: lp.cuts_added() - eager_cuts })
}

/// The extended point `(x, y, z, W)` of a factor triple.
pub fn truth_point(truth: &FactorTriple) -> Vec<f64> {
    let d = truth.dims();
    let lay = ColumnLayout { dims: d };
    let mut v = alloc::vec![0.0; lay.num_cols()];
    for mode in 0..3 {
        for (i, b) in truth.factor(mode).iter().enumerate() {
            v[lay.factor(mode, i)] = b as u8 as f64;
        }
    }
    for idx in 0..d.len() {
        let (i, j, k) = d.coords(idx);
        v[lay.w_linear(idx)] = truth.product(i, j, k) as u8 as f64;
    }
    v
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Uniqueness {
    pub unique: bool,
    /// Largest `Σ_{t=0} v + Σ_{t=1} (1 − v)` over the optimal face.
    pub max_l1_deviation: f64,
    pub cut_rounds: usize,
}

fn pin_and_probe(lp: &mut CutLoop<'_>, target: &[f64], unique_tol: f64) -> Result<Uniqueness> {
    let model = &mut lp.model;
    let target_obj = model.evaluate(target);
    let pin: Vec<(usize, f64)> =
        model.objective.iter().enumerate().filter(|(_, &c)| c != 0.0).map(|(j, &c)| (j, c)).collect();
    let first = model.num_rows();
    // A relative slack keeps the pinned face nonempty under roundoff in the
    // reoptimized basis.
    let slack = PIN_SLACK * target_obj.abs().max(1.0);
    model.add_row(&pin, Sense::Le, target_obj - model.obj_constant + slack, RowKind::Pin);
    let ones = target.iter().filter(|&&t| t > 0.5).count() as f64;
    let probe: Vec<f64> = target.iter().map(|&t| if t > 0.5 { 1.0 } else { -1.0 }).collect();
    model.objective.copy_from_slice(&probe);
    model.obj_constant = 0.0;
    model.revision += 1;
    lp.simplex.append_rows(&lp.model, first);
    lp.simplex.set_objective(&probe);
    let rounds_before = lp.rounds;
    let sol = lp.run()?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Err(Error::NotOptimal("optimal face probe is infeasible")),
        _ => return Err(Error::NotOptimal("optimal face probe did not finish")),
    }
    let dev = (ones - sol.objective).max(0.0);
    Ok(Uniqueness { unique: dev <= unique_tol, max_l1_deviation: dev, cut_rounds: lp.rounds - rounds_before })
}

/// Decides whether `target` is the only optimum of `model` (a model of `g`),
/// running the cut loop for its lazy families on both the original and the
/// probe objective. `opt_value` is the optimum of `model` including its
/// constant; the truth counts as unique when the optimal face lies within
/// L1 distance `unique_tol` of it.
pub fn uniqueness_probe(
    g: &BinaryTensor,
    model: &LpModel,
    opt_value: f64,
    target: &[f64],
    cfg: &SolverConfig,
    cut_cfg: &CutLoopConfig,
    unique_tol: f64,
) -> Result<Uniqueness> {
    let target_obj = model.evaluate(target);
    if model.max_violation(target) > cfg.feas_tol || target_obj > opt_value + 1e-7 * (1.0 + opt_value.abs()) {
        return Err(Error::TargetNotOptimal { target: target_obj, optimum: opt_value });
    }
    let mut lp = CutLoop::new(g, model.clone(), *cfg, *cut_cfg)?;
    pin_and_probe(&mut lp, target, unique_tol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryVerdict {
    pub recovered: bool,
    /// Largest coordinate distance between the LP optimum and the truth.
    pub max_coordinate_deviation: f64,
    /// `None` when uniqueness was not checked or the optimum already differs.
    pub unique: Option<bool>,
    pub max_l1_deviation: Option<f64>,
    pub cut_rounds: usize,
    pub objective: f64,
    pub iterations: usize,
}

/// Relative slack of the objective pin of the uniqueness probe.
pub const PIN_SLACK: f64 = 1e-9;

/// Default distance under which an LP optimum counts as the truth.
pub const RECOVERY_TOL: f64 = 1e-6;

/// L1 radius of the pinned optimal face below which the truth counts as the
/// only optimum. The pin slack alone widens a unique optimum's face to
/// `PIN_SLACK · |objective|` times a conditioning factor that grows towards
/// the recovery threshold (up to `2.5e-5` at `15 × 15 × 15`); a second
/// optimal vertex lies at L1 distance of order one.
pub const UNIQUENESS_TOL: f64 = 1e-3;

/// Solves `relaxation` for `g` and compares its optimum with the truth; with
/// `check_unique`, recovery also requires the truth to be the only optimum.
pub fn lp_recovers(
    g: &BinaryTensor,
    truth: &FactorTriple,
    relaxation: Relaxation,
    cfg: &SolverConfig,
    cut_cfg: &CutLoopConfig,
    check_unique: bool,
) -> Result<RecoveryVerdict> {
    g.dims().ensure_eq(&truth.dims())?;
    let model = build(g, relaxation, cut_cfg.build_mode)?;
    let mut lp = CutLoop::new(g, model, *cfg, *cut_cfg)?;
    let sol = lp.run()?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::NotOptimal("relaxation did not reach optimality"));
    }
    let target = truth_point(truth);
    let dev = sol.primal.iter().zip(&target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let mut verdict = RecoveryVerdict {
        recovered: dev <= RECOVERY_TOL,
        max_coordinate_deviation: dev,
        unique: None,
        max_l1_deviation: None,
        cut_rounds: lp.rounds,
        objective: sol.objective,
        iterations: sol.iterations,
    };
    if verdict.recovered && check_unique {
        let u = pin_and_probe(&mut lp, &target, UNIQUENESS_TOL)?;
        verdict.unique = Some(u.unique);
        verdict.max_l1_deviation = Some(u.max_l1_deviation);
        verdict.recovered = u.unique;
        verdict.cut_rounds = lp.rounds;
        verdict.iterations = lp.simplex.iterations();
    }
    Ok(verdict)
}
