//! Thread-parallel drivers over the pure core routines.

use std::sync::mpsc;
use std::time::Instant;

use anyhow::Context;
use btf_core::exact::{ExactConfig, ExactProblem, ExactResult};
use btf_core::experiment::{run_trial, tasks, Clock, ExperimentConfig, PhaseDiagram, TrialRecord};
use btf_core::BinaryTensor;
use rayon::prelude::*;

/// Milliseconds since construction.
#[derive(Debug, Clone, Copy)]
pub struct InstantClock(Instant);

impl InstantClock {
    pub fn new() -> Self {
        Self(Instant::now())
    }
}

impl Default for InstantClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for InstantClock {
    fn now_ms(&self) -> f64 {
        self.0.elapsed().as_secs_f64() * 1e3
    }
}

pub fn thread_pool(threads: usize) -> anyhow::Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().context("building the thread pool")
}

/// Runs every trial of `cfg` on `cfg.threads` workers. Records reach `sink`
/// on the calling thread in completion order; the returned diagram only
/// holds sums and does not depend on the schedule.
pub fn run_grid_parallel(cfg: &ExperimentConfig, mut sink: impl FnMut(&TrialRecord)) -> anyhow::Result<PhaseDiagram> {
    cfg.validate()?;
    let pool = thread_pool(cfg.threads.max(1))?;
    let clock = InstantClock::new();
    let mut diagram = PhaseDiagram::new(cfg)?;
    let (tx, rx) = mpsc::channel();
    std::thread::scope(|s| {
        s.spawn(move || {
            pool.install(|| {
                tasks(cfg).into_par_iter().for_each_with(tx, |tx, (ri, pi, t)| {
                    // The receiver only goes away on an earlier error.
                    let _ = tx.send(run_trial(cfg, ri, pi, t, &clock));
                });
            })
        });
        for rec in rx {
            let rec = rec?;
            diagram.add(&rec);
            sink(&rec);
        }
        Ok(diagram)
    })
}

/// Exhaustive search with the outer enumeration split across the pool.
pub fn solve_exact_parallel(g: &BinaryTensor, cfg: &ExactConfig, threads: usize) -> anyhow::Result<ExactResult> {
    let problem = ExactProblem::new(g, cfg)?;
    let pool = thread_pool(threads.max(1))?;
    let parts = threads.max(1) * 8;
    let scan = pool.install(|| {
        problem
            .chunks(parts)
            .into_par_iter()
            .map(|r| problem.scan(r))
            .reduce_with(|a, b| a.merge(b, problem.max_witnesses()))
    });
    let scan = scan.unwrap_or_else(|| problem.scan(0..0));
    Ok(problem.finish(scan))
}
