//! Monte-Carlo recovery experiments over a grid of tensor densities and
//! corruption probabilities.
//!
//! Every trial draws from its own seed stream derived from the master seed
//! and its grid position, so results do not depend on execution order.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::bits::BitVector;
use crate::corruption::{fully_random_corrupt, Adversary, CorruptionSpec};
use crate::lp::{BuildMode, Relaxation};
use crate::rng::{derive_seed, rng_from_seed, sample_subset, Rng};
use crate::solver::{lp_recovers, CutLoopConfig, SolverConfig};
use crate::tensor::{Dims, FactorTriple};
use crate::{Error, Result};

/// `start, start + step, …` up to `stop` inclusive, rounded to 12 decimals
/// so that grid values print exactly.
pub fn grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(start <= stop) || !start.is_finite() || !stop.is_finite() {
        return Err(Error::InvalidConfig(format!("bad grid {start}:{step}:{stop}")));
    }
    let count = libm::floor((stop - start) / step + 1e-9) as usize + 1;
    Ok((0..count).map(|i| libm::round((start + i as f64 * step) * 1e12) / 1e12).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dims: Dims,
    /// Requested tensor densities; each must lie in `(0, 1]`.
    pub rw_grid: Vec<f64>,
    /// Corruption probabilities in `[0, 1]`.
    pub p_grid: Vec<f64>,
    pub trials: usize,
    /// Solved in increasing strength order regardless of the order given.
    pub relaxations: Vec<Relaxation>,
    pub adversary: Adversary,
    pub seed: u64,
    /// Recovery also requires the truth to be the unique optimum.
    pub check_unique: bool,
    /// Skip a relaxation once a weaker one recovered; its outcome is then
    /// inferred from the nesting of the feasible regions.
    pub cascade: bool,
    pub threads: usize,
    pub solver: SolverConfig,
    pub cuts: CutLoopConfig,
    /// Simplex iterations allowed per complete-relaxation solve, summed over
    /// cut rounds. A trial that runs out counts as not recovered, so the
    /// reported cLP rate becomes a lower bound.
    pub clp_iteration_budget: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dims: Dims { n: 15, m: 15, l: 15 },
            rw_grid: (1..=25).map(|i| i as f64 * 0.04).map(|v| libm::round(v * 1e12) / 1e12).collect(),
            p_grid: (0..=50).map(|i| i as f64 / 100.0).collect(),
            trials: 40,
            relaxations: Relaxation::ALL.to_vec(),
            adversary: Adversary::None,
            seed: 0,
            check_unique: false,
            cascade: false,
            threads: 1,
            solver: SolverConfig::default(),
            cuts: CutLoopConfig { build_mode: BuildMode::Lazy, ..CutLoopConfig::default() },
            clp_iteration_budget: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if self.relaxations.is_empty() {
            return Err(Error::InvalidConfig("no relaxation selected".into()));
        }
        if let Some(&r) = self.rw_grid.iter().find(|&&r| !(r > 0.0 && r <= 1.0)) {
            return Err(Error::InvalidRate(r));
        }
        if let Some(&p) = self.p_grid.iter().find(|&&p| !(0.0..=1.0).contains(&p)) {
            return Err(Error::InvalidProbability(p));
        }
        self.solver.validate()
    }

    /// Selected relaxations, weakest first, without repeats.
    pub fn ordered_relaxations(&self) -> Vec<Relaxation> {
        let mut r = self.relaxations.clone();
        r.sort();
        r.dedup();
        r
    }

    pub fn num_trials_total(&self) -> usize {
        self.rw_grid.len() * self.p_grid.len() * self.trials
    }
}

/// Support size per factor for density `rw`: `max(1, round(n · rw^{1/3}))`.
pub fn support_sizes(dims: Dims, rw: f64) -> Result<[usize; 3]> {
    if !(rw > 0.0 && rw <= 1.0) {
        return Err(Error::InvalidRate(rw));
    }
    let c = libm::cbrt(rw);
    Ok(dims.extents().map(|e| (libm::round(e as f64 * c) as usize).clamp(1, e)))
}

/// Density `n_x n_y n_z / (n m l)` realized for requested density `rw`.
pub fn achieved_density(dims: Dims, rw: f64) -> Result<f64> {
    let s = support_sizes(dims, rw)?;
    Ok((s[0] * s[1] * s[2]) as f64 / dims.len() as f64)
}

/// Factors with the support sizes of [`support_sizes`] at uniformly random
/// positions.
pub fn make_ground_truth(dims: Dims, rw: f64, rng: &mut Rng) -> Result<FactorTriple> {
    let s = support_sizes(dims, rw)?;
    let ext = dims.extents();
    let mut f = |t: usize| {
        let mut b = BitVector::zeros(ext[t]);
        for i in sample_subset(rng, ext[t], s[t]) {
            b.set(i, true);
        }
        b
    };
    let (x, y, z) = (f(0), f(1), f(2));
    FactorTriple::new(x, y, z)
}

/// Seed of trial `trial` in grid cell `(rw_idx, p_idx)`.
pub fn trial_seed(master: u64, rw_idx: usize, p_idx: usize, trial: usize) -> u64 {
    derive_seed(derive_seed(derive_seed(master, rw_idx as u64), p_idx as u64), trial as u64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelaxationOutcome {
    pub relaxation: Relaxation,
    pub recovered: bool,
    /// LP optimum; `NaN` when inferred or failed.
    pub objective: f64,
    pub cut_rounds: usize,
    pub solve_ms: f64,
    /// Taken from a weaker relaxation that recovered instead of solved.
    pub inferred: bool,
    /// Solver error, in which case the trial counts as not recovered.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub rw_idx: usize,
    pub p_idx: usize,
    pub rw_requested: f64,
    pub rw_achieved: f64,
    pub p: f64,
    pub trial: usize,
    pub seed: u64,
    pub corrupted: usize,
    pub outcomes: Vec<RelaxationOutcome>,
}

/// Monotonic milliseconds; core code is clock-agnostic.
pub trait Clock {
    fn now_ms(&self) -> f64;
}

/// A clock that always reads zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn now_ms(&self) -> f64 {
        0.0
    }
}

/// Runs one trial: truth, fully-random corruption, the optional adversary,
/// then every selected relaxation.
pub fn run_trial(cfg: &ExperimentConfig, rw_idx: usize, p_idx: usize, trial: usize, clock: &dyn Clock) -> Result<TrialRecord> {
    let rw = *cfg.rw_grid.get(rw_idx).ok_or(Error::IndexOutOfRange { index: rw_idx, len: cfg.rw_grid.len() })?;
    let p = *cfg.p_grid.get(p_idx).ok_or(Error::IndexOutOfRange { index: p_idx, len: cfg.p_grid.len() })?;
    let seed = trial_seed(cfg.seed, rw_idx, p_idx, trial);
    let mut rng = rng_from_seed(derive_seed(seed, 0));
    let truth = make_ground_truth(cfg.dims, rw, &mut rng)?;
    let g = fully_random_corrupt(&truth, CorruptionSpec::new(p, derive_seed(seed, 1))?)?;
    let g = cfg.adversary.apply(&truth, &g, derive_seed(seed, 2))?;
    let corrupted = g.hamming(&crate::tensor::outer_product(&truth))?;
    let mut outcomes = Vec::new();
    let mut weaker_recovered = false;
    for rel in cfg.ordered_relaxations() {
        if cfg.cascade && weaker_recovered {
            outcomes.push(RelaxationOutcome {
                relaxation: rel,
                recovered: true,
                objective: f64::NAN,
                cut_rounds: 0,
                solve_ms: 0.0,
                inferred: true,
                error: None,
            });
            continue;
        }
        let t0 = clock.now_ms();
        let mut solver = cfg.solver;
        if let (Relaxation::Clp, Some(budget)) = (rel, cfg.clp_iteration_budget) {
            solver.max_iterations = budget;
        }
        let res = lp_recovers(&g, &truth, rel, &solver, &cfg.cuts, cfg.check_unique);
        let ms = clock.now_ms() - t0;
        let out = match res {
            Ok(v) => RelaxationOutcome {
                relaxation: rel,
                recovered: v.recovered,
                objective: v.objective,
                cut_rounds: v.cut_rounds,
                solve_ms: ms,
                inferred: false,
                error: None,
            },
            Err(e) => RelaxationOutcome {
                relaxation: rel,
                recovered: false,
                objective: f64::NAN,
                cut_rounds: 0,
                solve_ms: ms,
                inferred: false,
                error: Some(e.to_string()),
            },
        };
        weaker_recovered |= out.recovered;
        outcomes.push(out);
    }
    Ok(TrialRecord {
        rw_idx,
        p_idx,
        rw_requested: rw,
        rw_achieved: achieved_density(cfg.dims, rw)?,
        p,
        trial,
        seed,
        corrupted,
        outcomes,
    })
}

/// Counters of one cell and relaxation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CellStats {
    pub trials: usize,
    pub recovered: usize,
    pub errors: usize,
    pub total_ms: f64,
    pub total_rounds: usize,
}

impl CellStats {
    pub fn rate(&self) -> f64 {
        if self.trials == 0 { 0.0 } else { self.recovered as f64 / self.trials as f64 }
    }
}

/// One aggregated line of the diagram.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagramRow {
    pub rw_requested: f64,
    pub rw_achieved: f64,
    pub p: f64,
    pub relaxation: Relaxation,
    pub trials: usize,
    pub recovered: usize,
    pub rate: f64,
    pub mean_solve_ms: f64,
    pub mean_cut_rounds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDiagram {
    pub rw_grid: Vec<f64>,
    pub rw_achieved: Vec<f64>,
    pub p_grid: Vec<f64>,
    pub relaxations: Vec<Relaxation>,
    /// `[rw][p][relaxation]`, flattened.
    cells: Vec<CellStats>,
}

impl PhaseDiagram {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        let rw_achieved = cfg.rw_grid.iter().map(|&r| achieved_density(cfg.dims, r)).collect::<Result<_>>()?;
        let relaxations = cfg.ordered_relaxations();
        let cells = vec![CellStats::default(); cfg.rw_grid.len() * cfg.p_grid.len() * relaxations.len()];
        Ok(Self { rw_grid: cfg.rw_grid.clone(), rw_achieved, p_grid: cfg.p_grid.clone(), relaxations, cells })
    }

    fn slot(&self, rw_idx: usize, p_idx: usize, rel: Relaxation) -> Option<usize> {
        let r = self.relaxations.iter().position(|&x| x == rel)?;
        (rw_idx < self.rw_grid.len() && p_idx < self.p_grid.len())
            .then(|| (rw_idx * self.p_grid.len() + p_idx) * self.relaxations.len() + r)
    }

    /// Adds a trial; counters are sums, so the order of calls is irrelevant.
    pub fn add(&mut self, rec: &TrialRecord) {
        for o in &rec.outcomes {
            if let Some(s) = self.slot(rec.rw_idx, rec.p_idx, o.relaxation) {
                let c = &mut self.cells[s];
                c.trials += 1;
                c.recovered += usize::from(o.recovered);
                c.errors += usize::from(o.error.is_some());
                c.total_ms += o.solve_ms;
                c.total_rounds += o.cut_rounds;
            }
        }
    }

    pub fn cell(&self, rw_idx: usize, p_idx: usize, rel: Relaxation) -> Option<CellStats> {
        self.slot(rw_idx, p_idx, rel).map(|s| self.cells[s])
    }

    pub fn rate(&self, rw_idx: usize, p_idx: usize, rel: Relaxation) -> Option<f64> {
        self.cell(rw_idx, p_idx, rel).map(|c| c.rate())
    }

    /// Cells with at least one trial, in grid order.
    pub fn rows(&self) -> Vec<DiagramRow> {
        let mut out = Vec::new();
        for (ri, &rw) in self.rw_grid.iter().enumerate() {
            for (pi, &p) in self.p_grid.iter().enumerate() {
                for &rel in &self.relaxations {
                    let c = self.cell(ri, pi, rel).unwrap_or_default();
                    if c.trials == 0 {
                        continue;
                    }
                    out.push(DiagramRow {
                        rw_requested: rw,
                        rw_achieved: self.rw_achieved[ri],
                        p,
                        relaxation: rel,
                        trials: c.trials,
                        recovered: c.recovered,
                        rate: c.rate(),
                        mean_solve_ms: c.total_ms / c.trials as f64,
                        mean_cut_rounds: c.total_rounds as f64 / c.trials as f64,
                    });
                }
            }
        }
        out
    }
}

/// Every `(rw_idx, p_idx, trial)` of the grid in a fixed order.
pub fn tasks(cfg: &ExperimentConfig) -> Vec<(usize, usize, usize)> {
    let mut t = Vec::with_capacity(cfg.num_trials_total());
    for ri in 0..cfg.rw_grid.len() {
        for pi in 0..cfg.p_grid.len() {
            for trial in 0..cfg.trials {
                t.push((ri, pi, trial));
            }
        }
    }
    t
}

/// Runs the whole grid on the calling thread, handing each record to
/// `sink` as it completes.
pub fn run_grid(
    cfg: &ExperimentConfig,
    clock: &dyn Clock,
    mut sink: impl FnMut(&TrialRecord),
) -> Result<PhaseDiagram> {
    cfg.validate()?;
    let mut diagram = PhaseDiagram::new(cfg)?;
    for (ri, pi, trial) in tasks(cfg) {
        let rec = run_trial(cfg, ri, pi, trial, clock)?;
        diagram.add(&rec);
        sink(&rec);
    }
    Ok(diagram)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> ExperimentConfig {
        ExperimentConfig {
            dims: Dims::cube(5).unwrap(),
            rw_grid: vec![0.5, 1.0],
            p_grid: vec![0.0, 0.1],
            trials: 3,
            relaxations: vec![Relaxation::Flp, Relaxation::Slp],
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn grids() {
        let g = grid(0.0, 0.5, 0.01).unwrap();
        assert_eq!(g.len(), 51);
        assert_eq!(g[37], 0.37);
        assert_eq!(*g.last().unwrap(), 0.5);
        assert_eq!(grid(0.0, 1.0, 0.04).unwrap().len(), 26);
        assert!(grid(1.0, 0.0, 0.1).is_err());
        let d = ExperimentConfig::default();
        assert_eq!(d.rw_grid.len(), 25);
        assert_eq!(*d.rw_grid.last().unwrap(), 1.0);
        assert_eq!(d.p_grid.len(), 51);
    }

    #[test]
    fn support_sizes_follow_cube_root() {
        let d15 = Dims::cube(15).unwrap();
        assert_eq!(support_sizes(d15, 0.5).unwrap(), [12; 3]);
        assert_eq!(support_sizes(d15, 1.0).unwrap(), [15; 3]);
        assert_eq!(support_sizes(Dims::cube(3).unwrap(), 8.0 / 27.0).unwrap(), [2; 3]);
        assert_eq!(support_sizes(d15, 1e-6).unwrap(), [1; 3]);
        assert!(support_sizes(d15, 0.0).is_err());
        let mut rng = rng_from_seed(1);
        let t = make_ground_truth(d15, 1.0, &mut rng).unwrap();
        assert_eq!(t.support_sizes(), [15; 3]);
        let t = make_ground_truth(Dims::new(4, 6, 9).unwrap(), 0.3, &mut rng).unwrap();
        assert_eq!(t.support_sizes(), support_sizes(Dims::new(4, 6, 9).unwrap(), 0.3).unwrap());
        assert!((achieved_density(d15, 0.5).unwrap() - 1728.0 / 3375.0).abs() < 1e-15);
    }

    #[test]
    fn noiseless_cells_recover_and_trials_repeat() {
        let cfg = small_cfg();
        for ri in 0..2 {
            let rec = run_trial(&cfg, ri, 0, 0, &NoClock).unwrap();
            assert_eq!(rec.corrupted, 0);
            assert!(rec.outcomes.iter().all(|o| o.recovered && !o.inferred));
            assert_eq!(rec.outcomes[0].relaxation, Relaxation::Slp);
        }
        let a = run_trial(&cfg, 1, 1, 2, &NoClock).unwrap();
        let b = run_trial(&cfg, 1, 1, 2, &NoClock).unwrap();
        assert_eq!(a, b);
        assert!(run_trial(&cfg, 2, 0, 0, &NoClock).is_err());
    }

    #[test]
    fn cascade_matches_full_solves() {
        let mut cfg = small_cfg();
        cfg.p_grid = vec![0.05, 0.15];
        cfg.check_unique = true;
        let full = run_grid(&cfg, &NoClock, |_| {}).unwrap();
        cfg.cascade = true;
        let mut inferred = 0;
        let fast = run_grid(&cfg, &NoClock, |r| inferred += r.outcomes.iter().filter(|o| o.inferred).count()).unwrap();
        assert_eq!(full.rows().len(), fast.rows().len());
        for (a, b) in full.rows().iter().zip(fast.rows()) {
            assert_eq!(a.recovered, b.recovered);
        }
        assert!(inferred > 0);
    }

    #[test]
    fn exhausted_clp_budget_counts_as_failure() {
        let mut cfg = small_cfg();
        cfg.rw_grid = vec![1.0];
        cfg.p_grid = vec![0.3];
        cfg.relaxations = vec![Relaxation::Clp];
        cfg.clp_iteration_budget = Some(1);
        let d = run_grid(&cfg, &NoClock, |r| {
            assert!(!r.outcomes[0].recovered);
            assert!(r.outcomes[0].error.is_some());
        })
        .unwrap();
        let c = d.cell(0, 0, Relaxation::Clp).unwrap();
        assert_eq!((c.recovered, c.errors), (0, 3));
    }

    #[test]
    fn diagram_aggregation() {
        let cfg = small_cfg();
        let mut recs = Vec::new();
        let d = run_grid(&cfg, &NoClock, |r| recs.push(r.clone())).unwrap();
        assert_eq!(recs.len(), 12);
        let rows = d.rows();
        assert_eq!(rows.len(), 8);
        for r in &rows {
            assert_eq!(r.trials, 3);
            assert_eq!(r.rate, r.recovered as f64 / 3.0);
        }
        // Adding in reverse order gives the same counters.
        let mut rev = PhaseDiagram::new(&cfg).unwrap();
        for r in recs.iter().rev() {
            rev.add(r);
        }
        assert_eq!(rev, d);
        let empty = PhaseDiagram::new(&ExperimentConfig { trials: 1, ..small_cfg() }).unwrap();
        assert!(empty.rows().is_empty());
        assert!(ExperimentConfig { trials: 0, ..small_cfg() }.validate().is_err());
        assert!(ExperimentConfig { rw_grid: vec![0.0], ..small_cfg() }.validate().is_err());
    }
}
