use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use btf::config::{parse_build_mode, ConfigFile};
use btf::format::{read_instance, read_truth, write_instance, write_truth};
use btf::mps::write_mps;
use btf::report::{heatmap_svg, write_diagram_csv, RecordWriter};
use btf::run::{run_grid_parallel, solve_exact_parallel};
use btf_core::corruption::{fully_random_corrupt, Adversary, CorruptionSpec};
use btf_core::exact::ExactConfig;
use btf_core::experiment::{make_ground_truth, ExperimentConfig};
use btf_core::lp::{build, BuildMode, Relaxation};
use btf_core::polytope::{
    all_embeddings, building_block_facets, completeness_check, facet_rank, sample_embeddings, verify_lifting,
    FacetFamily, Hypergraph,
};
use btf_core::rng::{derive_seed, rng_from_seed};
use btf_core::solver::{lp_recovers, solve_with_cuts, CutLoopConfig, LpStatus, SolverConfig};
use btf_core::theory::{check_deter1, check_deter2, compute_stats, CertificateReport, DEFAULT_FLOWER_ALPHA};
use btf_core::{BinaryTensor, Dims};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "btf", version, about = "Rank-one Boolean tensor factorization by linear programming")]
struct Cli {
    /// Master seed for every random choice [default: 0].
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// TOML experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum AdversaryArg {
    None,
    Fraction,
    RevertP,
}

#[derive(Clone, Copy, ValueEnum)]
enum RelaxationArg {
    Slp,
    Flp,
    Clp,
}

impl From<RelaxationArg> for Relaxation {
    fn from(r: RelaxationArg) -> Self {
        match r {
            RelaxationArg::Slp => Relaxation::Slp,
            RelaxationArg::Flp => Relaxation::Flp,
            RelaxationArg::Clp => Relaxation::Clp,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CertArg {
    Slp,
    Flp,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Draws a ground truth, corrupts it and writes both files.
    Generate {
        #[arg(long, num_args = 3, value_names = ["N", "M", "L"], default_values_t = [15, 15, 15])]
        shape: Vec<usize>,
        /// Requested tensor density in (0, 1].
        #[arg(long, default_value_t = 1.0)]
        rw: f64,
        /// Flip probability of the fully-random model.
        #[arg(long, default_value_t = 0.0)]
        p: f64,
        /// Revert probability of the `fraction` adversary.
        #[arg(long, default_value_t = 0.5)]
        q: f64,
        #[arg(long, value_enum, default_value_t = AdversaryArg::None)]
        adversary: AdversaryArg,
        /// Instance output; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Solves an LP relaxation of an instance.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum)]
        relaxation: RelaxationArg,
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Also writes the eager model as MPS.
        #[arg(long)]
        mps: Option<PathBuf>,
        /// eager, lazy or auto.
        #[arg(long, default_value = "auto")]
        mode: String,
        /// Skip the uniqueness probe when a truth is given.
        #[arg(long)]
        no_unique: bool,
    },
    /// Solves the rank-one problem exactly by enumeration.
    Exact {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Maximum number of enumerated factor pairs.
        #[arg(long, default_value_t = 1 << 22)]
        budget: u128,
    },
    /// Checks the deterministic recovery conditions of a relaxation.
    Certify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        #[arg(long, value_enum)]
        which: CertArg,
        #[arg(long, default_value_t = DEFAULT_FLOWER_ALPHA)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
    },
    /// Verifies the building-block facets, or their lifts to a shape.
    Facets {
        #[arg(long, num_args = 3, value_names = ["N", "M", "L"])]
        shape: Option<Vec<usize>>,
        /// Embeddings checked per facet when lifting; all when absent and at
        /// most 20 exist.
        #[arg(long)]
        embeddings: Option<usize>,
        /// Random objectives of the completeness check.
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
    /// Monte-Carlo sweep over tensor density and corruption probability.
    Experiment {
        #[arg(long, num_args = 3, value_names = ["N", "M", "L"])]
        shape: Option<Vec<usize>>,
        /// Comma-separated densities.
        #[arg(long, value_delimiter = ',')]
        rw_grid: Option<Vec<f64>>,
        /// Comma-separated corruption probabilities.
        #[arg(long, value_delimiter = ',')]
        p_grid: Option<Vec<f64>>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, value_enum, value_delimiter = ',')]
        relaxations: Option<Vec<RelaxationArg>>,
        /// Strict mode: recovery requires a unique optimum.
        #[arg(long)]
        unique: bool,
        /// Infer stronger relaxations from weaker recoveries.
        #[arg(long)]
        cascade: bool,
        #[arg(long)]
        clp_budget: Option<usize>,
        /// Diagram CSV; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-trial CSV, flushed after every trial.
        #[arg(long)]
        records: Option<PathBuf>,
        /// Directory receiving one heatmap per relaxation.
        #[arg(long)]
        svg_dir: Option<PathBuf>,
        /// Draw the threshold curves on the heatmaps.
        #[arg(long)]
        overlay: bool,
        /// Leave `mean_solve_ms` empty for reproducible output.
        #[arg(long)]
        no_timing: bool,
    },
    /// Writes a relaxation of an instance as fixed-field MPS.
    ExportMps {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum)]
        relaxation: RelaxationArg,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "eager")]
        mode: String,
    },
}

fn dims_of(v: &[usize]) -> Result<Dims> {
    Ok(Dims::new(v[0], v[1], v[2])?)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn export_mps(g: &BinaryTensor, rel: Relaxation, mode: BuildMode, path: &Path) -> Result<()> {
    let model = build(g, rel, mode)?;
    let mut out = create(path)?;
    write_mps(&model, rel.name(), &mut out)?;
    out.flush()?;
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let seed = cli.seed.unwrap_or(0);
    let threads = cli.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    match cli.cmd {
        Cmd::Generate { shape, rw, p, q, adversary, out, truth } => {
            let dims = dims_of(&shape)?;
            let t = make_ground_truth(dims, rw, &mut rng_from_seed(derive_seed(seed, 0)))?;
            let g = fully_random_corrupt(&t, CorruptionSpec::new(p, derive_seed(seed, 1))?)?;
            let adv = match adversary {
                AdversaryArg::None => Adversary::None,
                AdversaryArg::Fraction => Adversary::Fraction { q },
                AdversaryArg::RevertP => Adversary::RevertP,
            };
            let g = adv.apply(&t, &g, derive_seed(seed, 2))?;
            output(out.as_deref())?.write_all(write_instance(&g).as_bytes())?;
            if let Some(path) = truth {
                std::fs::write(&path, write_truth(&t)).with_context(|| format!("writing {}", path.display()))?;
            }
        }
        Cmd::Solve { instance, relaxation, truth, mps, mode, no_unique } => {
            let g = read_instance(&instance)?;
            let rel = Relaxation::from(relaxation);
            let cut_cfg = CutLoopConfig { build_mode: parse_build_mode(&mode)?, ..CutLoopConfig::default() };
            let solver = SolverConfig::default();
            if let Some(path) = &mps {
                export_mps(&g, rel, BuildMode::Eager, path)?;
            }
            let s = solve_with_cuts(&g, rel, &solver, &cut_cfg)?;
            if s.solution.status != LpStatus::Optimal {
                bail!("{} ended with status {:?}", rel.name(), s.solution.status);
            }
            let integral = s.solution.primal.iter().all(|v| (v - v.round()).abs() <= 1e-6);
            println!("relaxation: {}", rel.name());
            println!("objective: {:.9}", s.solution.objective);
            println!("iterations: {}", s.solution.iterations);
            println!("cut_rounds: {}", s.rounds);
            println!("cuts_added: {}", s.cuts_added);
            println!("integral: {integral}");
            if let Some(path) = truth {
                let t = read_truth(&path)?;
                let v = lp_recovers(&g, &t, rel, &solver, &cut_cfg, !no_unique)?;
                println!("max_deviation: {:.3e}", v.max_coordinate_deviation);
                if let (Some(u), Some(dev)) = (v.unique, v.max_l1_deviation) {
                    println!("optimal_face_l1_radius: {dev:.3e}");
                    println!("unique: {u}");
                }
                println!("recovered: {}", v.recovered);
            }
        }
        Cmd::Exact { instance, truth, budget } => {
            let g = read_instance(&instance)?;
            let cfg = ExactConfig { budget, ..ExactConfig::default() };
            let r = solve_exact_parallel(&g, &cfg, threads)?;
            println!("optimum: {}", r.optimum);
            println!("optimal_tensors: {}", r.optimal_count);
            println!("zero_tensor_optimal: {}", r.zero_tensor_optimal);
            if let Some(path) = truth {
                let t = read_truth(&path)?;
                if g.dims() != t.dims() {
                    bail!("truth shape {:?} does not match the instance {:?}", t.dims(), g.dims());
                }
                println!("recovered: {}", r.recovers(&t));
            }
        }
        Cmd::Certify { instance, truth, which, alpha, format } => {
            let g = read_instance(&instance)?;
            let t = read_truth(&truth)?;
            let stats = compute_stats(&t, &g)?;
            let report = match which {
                CertArg::Slp => check_deter1(&stats),
                CertArg::Flp => check_deter2(&stats, alpha)?,
            };
            match format {
                OutputFormat::Text => print!("{report}"),
                OutputFormat::Csv => certificate_csv(&report, io::stdout().lock())?,
            }
        }
        Cmd::Facets { shape, embeddings, trials } => match shape {
            None => facets_table(trials, seed)?,
            Some(shape) => lifting_table(dims_of(&shape)?, embeddings, seed)?,
        },
        Cmd::Experiment {
            shape,
            rw_grid,
            p_grid,
            trials,
            relaxations,
            unique,
            cascade,
            clp_budget,
            out,
            records,
            svg_dir,
            overlay,
            no_timing,
        } => {
            let mut cfg = ExperimentConfig::default();
            let from_file = cli.config.as_deref().map(ConfigFile::load).transpose()?.unwrap_or_default();
            from_file.apply(&mut cfg)?;
            cfg.seed = cli.seed.or(from_file.seed).unwrap_or(0);
            cfg.threads = cli.threads.or(from_file.threads).unwrap_or(threads);
            if let Some(s) = shape {
                cfg.dims = dims_of(&s)?;
            }
            if let Some(g) = rw_grid {
                cfg.rw_grid = g;
            }
            if let Some(g) = p_grid {
                cfg.p_grid = g;
            }
            if let Some(t) = trials {
                cfg.trials = t;
            }
            if let Some(r) = relaxations {
                cfg.relaxations = r.into_iter().map(Relaxation::from).collect();
            }
            cfg.check_unique |= unique;
            cfg.cascade |= cascade;
            if clp_budget.is_some() {
                cfg.clp_iteration_budget = clp_budget;
            }
            let mut rec_out = records.as_deref().map(|p| create(p).map(RecordWriter::new)).transpose()?.transpose()?;
            let total = cfg.num_trials_total();
            let mut done = 0usize;
            let diagram = run_grid_parallel(&cfg, |r| {
                done += 1;
                if let Some(w) = rec_out.as_mut() {
                    if let Err(e) = w.write(r) {
                        eprintln!("warning: writing trial record failed: {e}");
                    }
                }
                if done % 100 == 0 || done == total {
                    eprintln!("{done}/{total} trials");
                }
            })?;
            write_diagram_csv(&diagram, output(out.as_deref())?, !no_timing)?;
            if let Some(dir) = svg_dir {
                std::fs::create_dir_all(&dir)?;
                for &rel in &diagram.relaxations {
                    let path = dir.join(format!("{}.svg", rel.name()));
                    std::fs::write(&path, heatmap_svg(&diagram, rel, overlay))
                        .with_context(|| format!("writing {}", path.display()))?;
                }
            }
        }
        Cmd::ExportMps { instance, relaxation, out, mode } => {
            let g = read_instance(&instance)?;
            export_mps(&g, relaxation.into(), parse_build_mode(&mode)?, &out)?;
        }
    }
    Ok(())
}

fn certificate_csv(report: &CertificateReport, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["condition", "instances", "holds", "strict", "strict_required", "min_slack", "violations"])?;
    for c in &report.conditions {
        let sites: Vec<String> = c.violations.iter().map(|s| s.to_string()).collect();
        w.write_record([
            c.id.to_string(),
            c.instances.to_string(),
            c.holds.to_string(),
            c.holds_strictly.to_string(),
            c.strict_required.to_string(),
            c.min_slack.map_or_else(String::new, |s| s.to_string()),
            sites.join(";"),
        ])?;
    }
    w.write_record(["all", "", &report.holds().to_string(), &report.all_strict().to_string(), "", "", ""])?;
    w.flush()?;
    Ok(())
}

const FAMILIES: [FacetFamily; 8] = [
    FacetFamily::EdgeUpper,
    FacetFamily::EdgeNonnegative,
    FacetFamily::EdgeLower,
    FacetFamily::NodeUpper,
    FacetFamily::FlowerInner,
    FacetFamily::FlowerOuter,
    FacetFamily::RunningIntersection,
    FacetFamily::FourTerm,
];

fn facets_table(trials: usize, seed: u64) -> Result<()> {
    let h = Hypergraph::building_block();
    let rows = building_block_facets();
    let dim = btf_core::polytope::polytope_dimension(&h)?;
    println!("building block: {} nodes, {} edges, polytope dimension {dim}", h.num_nodes(), h.edges().len());
    println!("{:<22} {:>5} {:>6} {:>7}  result", "family", "rows", "valid", "facets");
    let mut all = true;
    for fam in FAMILIES {
        let (mut n, mut valid, mut facets) = (0, 0, 0);
        for r in rows.iter().filter(|r| r.family == fam) {
            n += 1;
            if let Ok(rank) = facet_rank(&h, &r.ineq) {
                valid += 1;
                facets += usize::from(rank == dim);
            }
        }
        let ok = n > 0 && valid == n && facets == n;
        all &= ok;
        println!("{:<22} {n:>5} {valid:>6} {facets:>7}  {}", fam.name(), if ok { "pass" } else { "FAIL" });
    }
    let c = completeness_check(trials, seed)?;
    println!("completeness: {}/{} integral, {}/{} optimal  {}", c.integral, c.trials, c.optimal, c.trials, pass(c.passes()));
    all &= c.passes();
    println!("overall: {}", pass(all));
    if !all {
        bail!("facet verification failed");
    }
    Ok(())
}

fn lifting_table(d: Dims, embeddings: Option<usize>, seed: u64) -> Result<()> {
    let every = all_embeddings(d);
    let embs = match embeddings {
        Some(k) if k < every.len() => sample_embeddings(d, k, seed),
        None if every.len() > 20 => sample_embeddings(d, 20, seed),
        _ => every,
    };
    let report = verify_lifting(d, &embs)?;
    println!("shape {}x{}x{}: polytope dimension {}, {} embeddings", d.n, d.m, d.l, report.polytope_dim, embs.len());
    println!("{:<22} {:>6} {:>6} {:>7}  result", "family", "lifts", "valid", "facets");
    for fam in FAMILIES {
        let recs: Vec<_> = report.records.iter().filter(|r| r.family == fam).collect();
        let valid = recs.iter().filter(|r| r.valid).count();
        let facets = recs.iter().filter(|r| r.valid && r.facet).count();
        let ok = !recs.is_empty() && facets == recs.len();
        println!("{:<22} {:>6} {valid:>6} {facets:>7}  {}", fam.name(), recs.len(), pass(ok));
    }
    println!("overall: {}", pass(report.all_facets()));
    if !report.all_facets() {
        bail!("lifting verification failed");
    }
    Ok(())
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}
