//! File formats and the MPS export, cross-checked against an independent
//! LP solver.

use std::io::BufReader;

use btf::format::{parse_instance, parse_truth, write_instance, write_truth};
use btf::mps::write_mps;
use btf_core::bits::BitVector;
use btf_core::corruption::{fully_random_corrupt, CorruptionSpec};
use btf_core::lp::{build, BuildMode, Relaxation};
use btf_core::solver::{solve_with_cuts, CutLoopConfig, SolverConfig};
use btf_core::{BinaryTensor, Dims, FactorTriple};
use minilp::MpsFile;
use minilp::OptimizationDirection;
use proptest::prelude::*;

fn tensor(n: usize, m: usize, l: usize, bits: &[bool]) -> BinaryTensor {
    let dims = Dims::new(n, m, l).unwrap();
    BinaryTensor::from_bits(dims, BitVector::from_bools(&bits[..dims.len()])).unwrap()
}

proptest! {
    #[test]
    fn instance_round_trip(n in 1usize..5, m in 1usize..5, l in 1usize..5, bits in prop::collection::vec(any::<bool>(), 64)) {
        let g = tensor(n, m, l, &bits);
        prop_assert_eq!(parse_instance(&write_instance(&g)).unwrap(), g);
    }

    #[test]
    fn truth_round_trip(bits in prop::collection::vec(any::<bool>(), 12), n in 1usize..5, m in 1usize..5, l in 1usize..5) {
        let t = FactorTriple::from_bools(&bits[..n], &bits[4..4 + m], &bits[8..8 + l]).unwrap();
        prop_assert_eq!(parse_truth(&write_truth(&t)).unwrap(), t);
    }
}

fn objective_constant(text: &str) -> f64 {
    let line = text.lines().find(|l| l.starts_with("* OBJCONST")).unwrap();
    line.split_whitespace().nth(2).unwrap().parse().unwrap()
}

/// Optimum of the exported model as computed by `minilp`.
fn external_optimum(text: &str) -> f64 {
    let mps = MpsFile::parse(BufReader::new(text.as_bytes()), OptimizationDirection::Minimize).unwrap();
    mps.problem.solve().unwrap().objective() + objective_constant(text)
}

#[test]
fn exported_models_match_an_external_solver() {
    let truth = FactorTriple::from_bools(&[true, true, false, true], &[true, false, true], &[true, true, true]).unwrap();
    let mut checked = 0;
    for seed in 0..6 {
        let g = fully_random_corrupt(&truth, CorruptionSpec::new(0.3, seed).unwrap()).unwrap();
        for rel in Relaxation::ALL {
            let model = build(&g, rel, BuildMode::Eager).unwrap();
            let mut buf = Vec::new();
            write_mps(&model, "t", &mut buf).unwrap();
            let text = String::from_utf8(buf).unwrap();
            let ours = solve_with_cuts(&g, rel, &SolverConfig::default(), &CutLoopConfig::default()).unwrap();
            let theirs = external_optimum(&text);
            assert!(
                (ours.solution.objective - theirs).abs() < 1e-6,
                "seed {seed} {}: {} vs {theirs}",
                rel.name(),
                ours.solution.objective
            );
            checked += 1;
        }
    }
    assert_eq!(checked, 18);
}

#[test]
fn export_lists_every_row_and_bound() {
    let g = BinaryTensor::ones(Dims::cube(2).unwrap());
    let model = build(&g, Relaxation::Slp, BuildMode::Eager).unwrap();
    let mut buf = Vec::new();
    write_mps(&model, "ones", &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let section = |name: &str, next: &str| {
        let start = text.find(&format!("\n{name}\n")).unwrap() + name.len() + 2;
        let end = text.find(&format!("\n{next}\n")).unwrap();
        text[start..end].lines().count()
    };
    assert_eq!(section("ROWS", "COLUMNS"), model.num_rows() + 1);
    assert_eq!(section("BOUNDS", "ENDATA"), model.num_cols());
    assert!(text.ends_with("ENDATA\n"));
}
