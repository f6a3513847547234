//! Exhaustive solution of the rank-one problem at small sizes.
//!
//! The two shortest modes are enumerated in Gray-code order while fiber
//! sums along the longest mode are updated incrementally. For fixed outer
//! factors the best third factor decouples per coordinate: switching
//! `z_k` on changes the objective by `s − 2 c_k`, where `s` is the number of
//! covered `(a, b)` pairs and `c_k` the number of ones among them.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::bits::BitVector;
use crate::tensor::{outer_product, BinaryTensor, Dims, FactorTriple};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactConfig {
    /// Maximum number of outer `(x, y)` pairs to enumerate.
    pub budget: u128,
    /// Maximum number of witness triples kept.
    pub max_witnesses: usize,
}

impl Default for ExactConfig {
    fn default() -> Self {
        Self { budget: 1 << 22, max_witnesses: 1024 }
    }
}

/// Optimum of the rank-one problem with every optimal tensor counted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactResult {
    pub optimum: usize,
    /// Number of distinct optimal rank-one tensors.
    pub optimal_count: u128,
    /// One triple per optimal tensor, sorted; the zero tensor is represented
    /// by the all-zero triple. Truncated to `max_witnesses`.
    pub witnesses: Vec<FactorTriple>,
    pub zero_tensor_optimal: bool,
}

impl ExactResult {
    pub fn witnesses_truncated(&self) -> bool {
        (self.witnesses.len() as u128) < self.optimal_count
    }

    pub fn optimal_tensors(&self) -> Vec<BinaryTensor> {
        self.witnesses.iter().map(outer_product).collect()
    }

    /// True iff the unique optimal tensor is `x̄ ⊗ ȳ ⊗ z̄` with all three
    /// factors nonzero, so that the optimal triple is unique as well.
    pub fn recovers(&self, truth: &FactorTriple) -> bool {
        self.optimal_count == 1
            && truth.all_nonzero()
            && self.witnesses.len() == 1
            && self.witnesses[0] == *truth
    }
}

/// Tensor re-laid out so that the enumerated modes come first.
#[derive(Debug, Clone)]
pub struct ExactProblem {
    /// `order[0], order[1]` are enumerated; `order[2]` is solved fiber-wise.
    order: [usize; 3],
    ext: [usize; 3],
    /// Entries indexed `(a·ext1 + b)·ext2 + c` in permuted mode order.
    data: Vec<i32>,
    ones: usize,
    dims: Dims,
    max_witnesses: usize,
}

/// Accumulator for a range of outer Gray-code indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactScan {
    pub best: usize,
    pub nonzero_count: u128,
    pub zero_optimal: bool,
    /// Permuted-order witnesses `(a, b, c)` in discovery order.
    found: Vec<[BitVector; 3]>,
}

impl ExactScan {
    fn empty() -> Self {
        Self { best: usize::MAX, nonzero_count: 0, zero_optimal: false, found: Vec::new() }
    }

    /// Combines scans of consecutive ranges; `self` must precede `other`.
    pub fn merge(mut self, other: ExactScan, max_witnesses: usize) -> ExactScan {
        if other.best < self.best {
            return other;
        }
        if other.best == self.best {
            self.nonzero_count += other.nonzero_count;
            self.zero_optimal |= other.zero_optimal;
            let room = max_witnesses.saturating_sub(self.found.len());
            self.found.extend(other.found.into_iter().take(room));
        }
        self
    }
}

impl ExactProblem {
    pub fn new(g: &BinaryTensor, cfg: &ExactConfig) -> Result<Self> {
        let dims = g.dims();
        let e = dims.extents();
        let mut order = [0usize, 1, 2];
        order.sort_by_key(|&mode| (e[mode], mode));
        let needed = 1u128 << (e[order[0]] + e[order[1]]).min(127);
        if needed > cfg.budget {
            return Err(Error::BudgetExceeded { needed, budget: cfg.budget });
        }
        let ext = [e[order[0]], e[order[1]], e[order[2]]];
        let mut data = vec![0i32; dims.len()];
        let mut ijk = [0usize; 3];
        for a in 0..ext[0] {
            for b in 0..ext[1] {
                for c in 0..ext[2] {
                    ijk[order[0]] = a;
                    ijk[order[1]] = b;
                    ijk[order[2]] = c;
                    data[(a * ext[1] + b) * ext[2] + c] = g.get(ijk[0], ijk[1], ijk[2]) as i32;
                }
            }
        }
        Ok(Self { order, ext, data, ones: g.count_ones(), dims, max_witnesses: cfg.max_witnesses })
    }

    /// Number of outer Gray-code indices.
    pub fn outer_len(&self) -> u64 {
        1u64 << self.ext[0]
    }

    /// A fixed partition of the outer range into at most `parts` chunks.
    pub fn chunks(&self, parts: usize) -> Vec<Range<u64>> {
        let total = self.outer_len();
        let parts = (parts.max(1) as u64).min(total);
        (0..parts).map(|p| (total * p / parts)..(total * (p + 1) / parts)).collect()
    }

    pub fn scan(&self, range: Range<u64>) -> ExactScan {
        let [ea, eb, ec] = self.ext;
        let mut scan = ExactScan::empty();
        if range.is_empty() {
            return scan;
        }
        let gray = |t: u64| t ^ (t >> 1);
        let mut x = gray(range.start);
        let mut h = vec![0i32; eb * ec];
        for a in 0..ea {
            if (x >> a) & 1 == 1 {
                self.add_slice(&mut h, a, 1);
            }
        }
        let mut c1 = vec![0i32; ec];
        let mut t = range.start;
        loop {
            let nx = x.count_ones() as i64;
            c1.iter_mut().for_each(|v| *v = 0);
            let mut y: u64 = 0;
            for u in 0..(1u64 << eb) {
                if u > 0 {
                    let bit = u.trailing_zeros() as usize;
                    y ^= 1 << bit;
                    let row = &h[bit * ec..(bit + 1) * ec];
                    if (y >> bit) & 1 == 1 {
                        c1.iter_mut().zip(row).for_each(|(c, r)| *c += r);
                    } else {
                        c1.iter_mut().zip(row).for_each(|(c, r)| *c -= r);
                    }
                }
                let s = nx * y.count_ones() as i64;
                let mut obj = self.ones as i64;
                for &c in &c1 {
                    obj += (s - 2 * c as i64).min(0);
                }
                let obj = obj as usize;
                if obj <= scan.best {
                    if obj < scan.best {
                        scan = ExactScan { best: obj, ..ExactScan::empty() };
                    }
                    self.record(&mut scan, x, y, s, &c1);
                }
            }
            t += 1;
            if t >= range.end {
                break;
            }
            let bit = t.trailing_zeros() as usize;
            x ^= 1 << bit;
            let sign = if (x >> bit) & 1 == 1 { 1 } else { -1 };
            self.add_slice(&mut h, bit, sign);
        }
        scan
    }

    fn add_slice(&self, h: &mut [i32], a: usize, sign: i32) {
        let len = self.ext[1] * self.ext[2];
        let src = &self.data[a * len..(a + 1) * len];
        h.iter_mut().zip(src).for_each(|(v, s)| *v += sign * s);
    }

    fn record(&self, scan: &mut ExactScan, x: u64, y: u64, s: i64, c1: &[i32]) {
        if x == 0 || y == 0 {
            scan.zero_optimal = true;
            return;
        }
        let mut must = BitVector::zeros(self.ext[2]);
        let mut ties = Vec::new();
        for (c, &v) in c1.iter().enumerate() {
            let d = s - 2 * v as i64;
            if d < 0 {
                must.set(c, true);
            } else if d == 0 {
                ties.push(c);
            }
        }
        let must_empty = !must.any();
        if must_empty {
            scan.zero_optimal = true;
        }
        let subsets = 1u128 << ties.len().min(127);
        scan.nonzero_count += subsets - must_empty as u128;
        let bits_a = BitVector::from_fn(self.ext[0], |a| (x >> a) & 1 == 1);
        let bits_b = BitVector::from_fn(self.ext[1], |b| (y >> b) & 1 == 1);
        let mut mask: u128 = 0;
        while scan.found.len() < self.max_witnesses && mask < subsets {
            let mut z = must.clone();
            for (p, &c) in ties.iter().enumerate() {
                if (mask >> p) & 1 == 1 {
                    z.set(c, true);
                }
            }
            mask += 1;
            if z.any() {
                scan.found.push([bits_a.clone(), bits_b.clone(), z]);
            }
        }
    }

    pub fn finish(&self, scan: ExactScan) -> ExactResult {
        let mut witnesses: Vec<FactorTriple> = scan
            .found
            .into_iter()
            .map(|f| {
                let mut modes = [BitVector::zeros(0), BitVector::zeros(0), BitVector::zeros(0)];
                for (slot, bits) in f.into_iter().enumerate() {
                    modes[self.order[slot]] = bits;
                }
                let [x, y, z] = modes;
                FactorTriple { x, y, z }
            })
            .collect();
        if scan.zero_optimal {
            witnesses.push(FactorTriple::zeros(self.dims));
        }
        witnesses.sort();
        witnesses.truncate(self.max_witnesses);
        ExactResult {
            optimum: scan.best,
            optimal_count: scan.nonzero_count + scan.zero_optimal as u128,
            witnesses,
            zero_tensor_optimal: scan.zero_optimal,
        }
    }

    pub fn max_witnesses(&self) -> usize {
        self.max_witnesses
    }
}

/// Solves the rank-one problem exactly on one thread.
pub fn solve_exact(g: &BinaryTensor, cfg: &ExactConfig) -> Result<ExactResult> {
    let problem = ExactProblem::new(g, cfg)?;
    let scan = problem.scan(0..problem.outer_len());
    Ok(problem.finish(scan))
}

pub fn exact_recovers(g: &BinaryTensor, truth: &FactorTriple, cfg: &ExactConfig) -> Result<bool> {
    g.dims().ensure_eq(&truth.dims())?;
    Ok(solve_exact(g, cfg)?.recovers(truth))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corruption::{apply_monotone, classify, fully_random_corrupt, CorruptionSpec, MonotonePlan};
    use crate::rng::{rng_from_seed, Rng};
    use crate::tensor::objective;
    use crate::tensor::tests::{all_triples, random_bits, random_triple};
    use alloc::collections::BTreeSet;
    use proptest::prelude::*;

    fn cfg() -> ExactConfig {
        ExactConfig::default()
    }

    /// Optimum and set of optimal tensors by enumerating every triple.
    fn brute(g: &BinaryTensor) -> (usize, BTreeSet<BinaryTensor>) {
        let mut best = usize::MAX;
        let mut set = BTreeSet::new();
        for t in all_triples(g.dims()) {
            let v = objective(g, &t).unwrap();
            if v < best {
                best = v;
                set.clear();
            }
            if v == best {
                set.insert(outer_product(&t));
            }
        }
        (best, set)
    }

    fn random_tensor(rng: &mut Rng, d: Dims) -> BinaryTensor {
        BinaryTensor::from_bits(d, random_bits(rng, d.len(), 0.5)).unwrap()
    }

    #[test]
    fn noiseless_rank_one_is_unique() {
        let truth = FactorTriple::from_bools(&[true, false, true], &[true, true], &[false, true, true, true]).unwrap();
        let g = outer_product(&truth);
        let r = solve_exact(&g, &cfg()).unwrap();
        assert_eq!(r.optimum, 0);
        assert_eq!(r.optimal_count, 1);
        assert!(r.recovers(&truth));
    }

    #[test]
    fn zero_tensor_has_single_optimal_tensor() {
        let g = BinaryTensor::zeros(Dims::cube(3).unwrap());
        let r = solve_exact(&g, &cfg()).unwrap();
        assert_eq!(r.optimum, 0);
        assert_eq!(r.optimal_count, 1);
        assert!(r.zero_tensor_optimal);
        assert_eq!(r.witnesses, alloc::vec![FactorTriple::zeros(g.dims())]);
    }

    #[test]
    fn complement_is_not_recovered() {
        let truth = FactorTriple::ones(Dims::cube(3).unwrap());
        let g = outer_product(&truth).complement();
        assert!(!exact_recovers(&g, &truth, &cfg()).unwrap());
    }

    #[test]
    fn budget_is_enforced() {
        let g = BinaryTensor::zeros(Dims::cube(12).unwrap());
        assert!(matches!(solve_exact(&g, &cfg()), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn matches_full_enumeration_on_random_instances() {
        let mut rng = rng_from_seed(11);
        for shape in [(3, 3, 3), (2, 3, 4), (4, 2, 1), (1, 3, 2)] {
            let d = Dims::new(shape.0, shape.1, shape.2).unwrap();
            for _ in 0..25 {
                let g = random_tensor(&mut rng, d);
                let (best, set) = brute(&g);
                let r = solve_exact(&g, &cfg()).unwrap();
                assert_eq!(r.optimum, best);
                assert_eq!(r.optimal_count, set.len() as u128);
                let got: BTreeSet<BinaryTensor> = r.optimal_tensors().into_iter().collect();
                assert_eq!(got, set);
                for w in &r.witnesses {
                    assert_eq!(objective(&g, w).unwrap(), r.optimum);
                }
            }
        }
    }

    #[test]
    fn chunked_scan_matches_single_scan() {
        let mut rng = rng_from_seed(12);
        let g = random_tensor(&mut rng, Dims::new(5, 4, 6).unwrap());
        let p = ExactProblem::new(&g, &cfg()).unwrap();
        let whole = p.finish(p.scan(0..p.outer_len()));
        let merged = p
            .chunks(7)
            .into_iter()
            .map(|r| p.scan(r))
            .reduce(|a, b| a.merge(b, p.max_witnesses()))
            .unwrap();
        assert_eq!(p.finish(merged), whole);
    }

    #[test]
    fn recovers_under_moderate_noise() {
        let d = Dims::cube(8).unwrap();
        let truth = FactorTriple::ones(d);
        let mut ok = 0;
        for seed in 0..100 {
            let g = fully_random_corrupt(&truth, CorruptionSpec::new(0.25, seed).unwrap()).unwrap();
            ok += exact_recovers(&g, &truth, &cfg()).unwrap() as usize;
        }
        assert!(ok >= 95, "recovered {ok}/100");
    }

    #[test]
    fn recovery_survives_every_single_monotone_revert() {
        let d = Dims::cube(3).unwrap();
        let mut rng = rng_from_seed(13);
        let mut checked = 0;
        for seed in 0..200u64 {
            let truth = random_triple(&mut rng, d);
            let g = fully_random_corrupt(&truth, CorruptionSpec::new(0.15, seed).unwrap()).unwrap();
            if !exact_recovers(&g, &truth, &cfg()).unwrap() {
                continue;
            }
            for idx in classify(&truth, &g).unwrap().f().iter_ones() {
                let g2 = apply_monotone(&truth, &g, &MonotonePlan::Indices(alloc::vec![idx])).unwrap();
                assert!(exact_recovers(&g2, &truth, &cfg()).unwrap());
                checked += 1;
            }
        }
        assert!(checked > 20);
    }

    proptest! {
        #[test]
        fn optimum_bounded_by_truth_objective(seed in any::<u64>(), p in 0.0f64..0.6) {
            let mut rng = rng_from_seed(seed);
            let d = Dims::new(3, 4, 3).unwrap();
            let truth = random_triple(&mut rng, d);
            let g = fully_random_corrupt(&truth, CorruptionSpec::new(p, seed).unwrap()).unwrap();
            let r = solve_exact(&g, &cfg()).unwrap();
            prop_assert!(r.optimum <= objective(&g, &truth).unwrap());
        }

        #[test]
        fn optimum_invariant_under_mode_permutations(seed in any::<u64>()) {
            let mut rng = rng_from_seed(seed);
            let d = Dims::new(3, 4, 2).unwrap();
            let g = random_tensor(&mut rng, d);
            let pi = [2usize, 0, 3, 1];
            let pk = [1usize, 0];
            let h = BinaryTensor::from_fn(d, |i, j, k| g.get((i + 1) % 3, pi[j], pk[k]));
            prop_assert_eq!(solve_exact(&g, &cfg()).unwrap().optimum, solve_exact(&h, &cfg()).unwrap().optimum);
        }
    }
}
