//! Binary tensors, factor triples and the discrepancy count between two
//! rank-one tensors.

use alloc::format;
use alloc::vec::Vec;

use crate::bits::BitVector;
use crate::{Error, Result};

/// Extents of the three tensor modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dims {
    pub n: usize,
    pub m: usize,
    pub l: usize,
}

impl Dims {
    pub fn new(n: usize, m: usize, l: usize) -> Result<Self> {
        if n == 0 || m == 0 || l == 0 {
            return Err(Error::InvalidDims { n, m, l });
        }
        Ok(Self { n, m, l })
    }

    pub fn cube(n: usize) -> Result<Self> {
        Self::new(n, n, n)
    }

    /// Number of entries `n·m·l`.
    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.m * self.l
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major linear index with `k` fastest.
    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        debug_assert!(i < self.n && j < self.m && k < self.l);
        (i * self.m + j) * self.l + k
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize, usize) {
        let k = idx % self.l;
        let ij = idx / self.l;
        (ij / self.m, ij % self.m, k)
    }

    pub fn extents(&self) -> [usize; 3] {
        [self.n, self.m, self.l]
    }

    pub(crate) fn ensure_eq(&self, other: &Dims) -> Result<()> {
        if self != other {
            return Err(Error::DimensionMismatch {
                expected: format!("{}x{}x{}", self.n, self.m, self.l),
                found: format!("{}x{}x{}", other.n, other.m, other.l),
            });
        }
        Ok(())
    }
}

/// Dense 0/1 tensor stored as one bit per entry in row-major order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryTensor {
    dims: Dims,
    bits: BitVector,
}

impl BinaryTensor {
    pub fn zeros(dims: Dims) -> Self {
        Self { dims, bits: BitVector::zeros(dims.len()) }
    }

    pub fn ones(dims: Dims) -> Self {
        Self { dims, bits: BitVector::ones(dims.len()) }
    }

    pub fn from_bits(dims: Dims, bits: BitVector) -> Result<Self> {
        if bits.len() != dims.len() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} entries", dims.len()),
                found: format!("{} entries", bits.len()),
            });
        }
        Ok(Self { dims, bits })
    }

    pub fn from_fn(dims: Dims, mut f: impl FnMut(usize, usize, usize) -> bool) -> Self {
        let bits = BitVector::from_fn(dims.len(), |idx| {
            let (i, j, k) = dims.coords(idx);
            f(i, j, k)
        });
        Self { dims, bits }
    }

    #[inline]
    pub fn dims(&self) -> Dims {
        self.dims
    }

    #[inline]
    pub fn bits(&self) -> &BitVector {
        &self.bits
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> bool {
        self.bits.get(self.dims.index(i, j, k))
    }

    #[inline]
    pub fn get_linear(&self, idx: usize) -> bool {
        self.bits.get(idx)
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, value: bool) {
        let idx = self.dims.index(i, j, k);
        self.bits.set(idx, value);
    }

    pub fn set_linear(&mut self, idx: usize, value: bool) {
        self.bits.set(idx, value);
    }

    pub fn flip_linear(&mut self, idx: usize) {
        self.bits.flip(idx);
    }

    pub fn complement(&self) -> Self {
        Self { dims: self.dims, bits: self.bits.not() }
    }

    pub fn count_ones(&self) -> usize {
        self.bits.count_ones()
    }

    pub fn hamming(&self, other: &Self) -> Result<usize> {
        self.dims.ensure_eq(&other.dims)?;
        Ok(self.bits.hamming(&other.bits))
    }
}

/// Three binary factor vectors `(x, y, z)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FactorTriple {
    pub x: BitVector,
    pub y: BitVector,
    pub z: BitVector,
}

impl FactorTriple {
    pub fn new(x: BitVector, y: BitVector, z: BitVector) -> Result<Self> {
        Dims::new(x.len(), y.len(), z.len())?;
        Ok(Self { x, y, z })
    }

    pub fn from_bools(x: &[bool], y: &[bool], z: &[bool]) -> Result<Self> {
        Self::new(BitVector::from_bools(x), BitVector::from_bools(y), BitVector::from_bools(z))
    }

    pub fn ones(dims: Dims) -> Self {
        Self { x: BitVector::ones(dims.n), y: BitVector::ones(dims.m), z: BitVector::ones(dims.l) }
    }

    pub fn zeros(dims: Dims) -> Self {
        Self { x: BitVector::zeros(dims.n), y: BitVector::zeros(dims.m), z: BitVector::zeros(dims.l) }
    }

    pub fn dims(&self) -> Dims {
        Dims { n: self.x.len(), m: self.y.len(), l: self.z.len() }
    }

    pub fn factor(&self, mode: usize) -> &BitVector {
        match mode {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("mode {mode} out of range"),
        }
    }

    /// Support sizes `(n_x, n_y, n_z)`.
    pub fn support_sizes(&self) -> [usize; 3] {
        [self.x.count_ones(), self.y.count_ones(), self.z.count_ones()]
    }

    /// Ones-ratios `(r_x, r_y, r_z)`.
    pub fn ratios(&self) -> [f64; 3] {
        let d = self.dims();
        let s = self.support_sizes();
        [s[0] as f64 / d.n as f64, s[1] as f64 / d.m as f64, s[2] as f64 / d.l as f64]
    }

    /// Tensor density `r_x r_y r_z`.
    pub fn density(&self) -> f64 {
        let r = self.ratios();
        r[0] * r[1] * r[2]
    }

    pub fn all_nonzero(&self) -> bool {
        self.x.any() && self.y.any() && self.z.any()
    }

    #[inline]
    pub fn product(&self, i: usize, j: usize, k: usize) -> bool {
        self.x.get(i) && self.y.get(j) && self.z.get(k)
    }
}

/// The index sets where the data tensor is zero (`s0`) and one (`s1`),
/// as sorted linear indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexPartition {
    pub dims: Dims,
    pub s0: Vec<usize>,
    pub s1: Vec<usize>,
}

impl IndexPartition {
    pub fn s0_triples(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.s0.iter().map(|&idx| self.dims.coords(idx))
    }

    pub fn s1_triples(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.s1.iter().map(|&idx| self.dims.coords(idx))
    }
}

/// Per-mode counts `|X_st| = |{i : truth_i = s, cand_i = t}|`, indexed `[s][t]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DeltaBreakdown {
    pub x: [[usize; 2]; 2],
    pub y: [[usize; 2]; 2],
    pub z: [[usize; 2]; 2],
}

impl DeltaBreakdown {
    pub fn new(truth: &FactorTriple, cand: &FactorTriple) -> Result<Self> {
        truth.dims().ensure_eq(&cand.dims())?;
        Ok(Self {
            x: mode_counts(&truth.x, &cand.x),
            y: mode_counts(&truth.y, &cand.y),
            z: mode_counts(&truth.z, &cand.z),
        })
    }

    /// The fourteen-term closed form of `|Δ|`.
    ///
    /// An index lies in `Δ` iff the truth product and the candidate product
    /// differ, i.e. exactly one of them is 1. Splitting by which side is 1
    /// and which coordinates disagree gives seven terms per side.
    pub fn closed_form(&self) -> usize {
        let (x, y, z) = (&self.x, &self.y, &self.z);
        let (x11, x10, x01) = (x[1][1], x[1][0], x[0][1]);
        let (y11, y10, y01) = (y[1][1], y[1][0], y[0][1]);
        let (z11, z10, z01) = (z[1][1], z[1][0], z[0][1]);
        x11 * y11 * z10
            + x11 * y10 * z11
            + x10 * y11 * z11
            + x11 * y10 * z10
            + x10 * y11 * z10
            + x10 * y10 * z11
            + x10 * y10 * z10
            + x11 * y11 * z01
            + x11 * y01 * z11
            + x01 * y11 * z11
            + x11 * y01 * z01
            + x01 * y11 * z01
            + x01 * y01 * z11
            + x01 * y01 * z01
    }
}

fn mode_counts(truth: &BitVector, cand: &BitVector) -> [[usize; 2]; 2] {
    let both = truth.and(cand).count_ones();
    let t1 = truth.count_ones();
    let c1 = cand.count_ones();
    let t1c0 = t1 - both;
    let t0c1 = c1 - both;
    [[truth.len() - both - t1c0 - t0c1, t0c1], [t1c0, both]]
}

/// The rank-one tensor `x ⊗ y ⊗ z`.
pub fn outer_product(t: &FactorTriple) -> BinaryTensor {
    let dims = t.dims();
    let mut out = BinaryTensor::zeros(dims);
    let zs: Vec<usize> = t.z.iter_ones().collect();
    for i in t.x.iter_ones() {
        for j in t.y.iter_ones() {
            let base = dims.index(i, j, 0);
            for &k in &zs {
                out.bits.set(base + k, true);
            }
        }
    }
    out
}

/// Number of entries where `g` and `x ⊗ y ⊗ z` disagree.
pub fn objective(g: &BinaryTensor, t: &FactorTriple) -> Result<usize> {
    g.dims.ensure_eq(&t.dims())?;
    Ok(g.bits.hamming(&outer_product(t).bits))
}

pub fn partition(g: &BinaryTensor) -> IndexPartition {
    let s1: Vec<usize> = g.bits.iter_ones().collect();
    let s0: Vec<usize> = g.bits.not().iter_ones().collect();
    IndexPartition { dims: g.dims, s0, s1 }
}

/// `|Δ|`, the number of entries where the two rank-one tensors differ.
pub fn delta_count(truth: &FactorTriple, cand: &FactorTriple) -> Result<usize> {
    let closed = DeltaBreakdown::new(truth, cand)?.closed_form();
    debug_assert_eq!(closed, delta_enumerate(truth, cand));
    Ok(closed)
}

/// `|Δ|` by comparing the two outer products entrywise.
pub fn delta_enumerate(truth: &FactorTriple, cand: &FactorTriple) -> usize {
    outer_product(truth).bits.hamming(&outer_product(cand).bits)
}

/// `min{n_x n_y, n_x n_z, n_y n_z}` over the truth supports.
pub fn delta_lower_bound(truth: &FactorTriple) -> usize {
    let [a, b, c] = truth.support_sizes();
    (a * b).min(a * c).min(b * c)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::rng::{rng_from_seed, uniform, Rng};
    use proptest::prelude::*;

    pub(crate) fn random_bits(rng: &mut Rng, len: usize, p_one: f64) -> BitVector {
        BitVector::from_fn(len, |_| uniform(rng) < p_one)
    }

    pub(crate) fn random_triple(rng: &mut Rng, d: Dims) -> FactorTriple {
        FactorTriple {
            x: random_bits(rng, d.n, 0.5),
            y: random_bits(rng, d.m, 0.5),
            z: random_bits(rng, d.l, 0.5),
        }
    }

    /// Every triple of the given shape, in a fixed order.
    pub(crate) fn all_triples(d: Dims) -> Vec<FactorTriple> {
        let total = d.n + d.m + d.l;
        (0u64..1 << total)
            .map(|mask| {
                let bit = |p: usize| (mask >> p) & 1 == 1;
                FactorTriple {
                    x: BitVector::from_fn(d.n, bit),
                    y: BitVector::from_fn(d.m, |j| bit(d.n + j)),
                    z: BitVector::from_fn(d.l, |k| bit(d.n + d.m + k)),
                }
            })
            .collect()
    }

    #[test]
    fn dims_reject_zero() {
        assert!(Dims::new(0, 1, 1).is_err());
        let d = Dims::new(2, 3, 4).unwrap();
        for idx in 0..d.len() {
            let (i, j, k) = d.coords(idx);
            assert_eq!(d.index(i, j, k), idx);
        }
    }

    #[test]
    fn outer_product_small_cases() {
        let t = FactorTriple::from_bools(&[true], &[true], &[true]).unwrap();
        assert_eq!(outer_product(&t).count_ones(), 1);
        let t = FactorTriple::from_bools(&[true, false], &[true, true], &[true]).unwrap();
        let w = outer_product(&t);
        assert!(w.get(0, 0, 0) && w.get(0, 1, 0));
        assert!(!w.get(1, 0, 0) && !w.get(1, 1, 0));
    }

    #[test]
    fn outer_product_matches_triple_loop() {
        let mut rng = rng_from_seed(1);
        let d = Dims::cube(4).unwrap();
        for _ in 0..20 {
            let t = random_triple(&mut rng, d);
            let w = outer_product(&t);
            for i in 0..4 {
                for j in 0..4 {
                    for k in 0..4 {
                        assert_eq!(w.get(i, j, k), t.x.get(i) && t.y.get(j) && t.z.get(k));
                    }
                }
            }
        }
    }

    #[test]
    fn objective_examples() {
        let d = Dims::cube(2).unwrap();
        let t = FactorTriple::ones(d);
        assert_eq!(objective(&outer_product(&t), &t).unwrap(), 0);
        let mut g = BinaryTensor::ones(d);
        g.set(1, 0, 1, false);
        assert_eq!(objective(&g, &t).unwrap(), 1);
        let other = FactorTriple::ones(Dims::cube(3).unwrap());
        assert!(objective(&g, &other).is_err());
    }

    #[test]
    fn objective_matches_entrywise_loop() {
        let mut rng = rng_from_seed(2);
        let d = Dims::cube(3).unwrap();
        for _ in 0..50 {
            let g = BinaryTensor::from_bits(d, random_bits(&mut rng, 27, 0.5)).unwrap();
            let t = random_triple(&mut rng, d);
            let mut expect = 0;
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        if g.get(i, j, k) != t.product(i, j, k) {
                            expect += 1;
                        }
                    }
                }
            }
            assert_eq!(objective(&g, &t).unwrap(), expect);
        }
    }

    #[test]
    fn partition_examples() {
        let d = Dims::new(2, 3, 2).unwrap();
        assert!(partition(&BinaryTensor::zeros(d)).s1.is_empty());
        assert!(partition(&BinaryTensor::ones(d)).s0.is_empty());
        let mut rng = rng_from_seed(3);
        let g = BinaryTensor::from_bits(d, random_bits(&mut rng, d.len(), 0.4)).unwrap();
        let p = partition(&g);
        assert_eq!(p.s0.len() + p.s1.len(), d.len());
        assert!(p.s1.iter().all(|&i| g.get_linear(i)));
        assert!(p.s0.iter().all(|&i| !g.get_linear(i)));
    }

    #[test]
    fn delta_examples() {
        let d = Dims::cube(1).unwrap();
        let truth = FactorTriple::ones(d);
        assert_eq!(delta_count(&truth, &truth).unwrap(), 0);
        let cand = FactorTriple::from_bools(&[false], &[true], &[true]).unwrap();
        assert_eq!(delta_count(&truth, &cand).unwrap(), 1);
        assert_eq!(delta_lower_bound(&FactorTriple::ones(Dims::new(2, 3, 4).unwrap())), 6);
        let zero_x = FactorTriple::from_bools(&[false, false], &[true], &[true]).unwrap();
        assert_eq!(delta_lower_bound(&zero_x), 0);
    }

    #[test]
    fn delta_closed_form_exhaustive_up_to_three() {
        for shape in [(1, 2, 3), (2, 2, 2), (3, 1, 2), (2, 3, 2)] {
            let d = Dims::new(shape.0, shape.1, shape.2).unwrap();
            let all = all_triples(d);
            for truth in all.iter().step_by(3) {
                for cand in &all {
                    let closed = DeltaBreakdown::new(truth, cand).unwrap().closed_form();
                    assert_eq!(closed, delta_enumerate(truth, cand));
                }
            }
        }
    }

    #[test]
    fn delta_lower_bound_exhaustive_two() {
        let d = Dims::cube(2).unwrap();
        let all = all_triples(d);
        for truth in &all {
            let bound = delta_lower_bound(truth);
            let w = outer_product(truth);
            for cand in &all {
                if outer_product(cand) != w {
                    assert!(delta_count(truth, cand).unwrap() >= bound);
                }
            }
        }
    }

    #[test]
    fn objective_of_rank_one_data_is_delta() {
        let mut rng = rng_from_seed(4);
        let d = Dims::new(3, 4, 2).unwrap();
        for _ in 0..50 {
            let a = random_triple(&mut rng, d);
            let b = random_triple(&mut rng, d);
            assert_eq!(objective(&outer_product(&a), &b).unwrap(), delta_count(&a, &b).unwrap());
        }
    }

    proptest! {
        #[test]
        fn breakdown_sums_to_extents(seed in any::<u64>(), n in 1usize..6, m in 1usize..6, l in 1usize..6) {
            let mut rng = rng_from_seed(seed);
            let d = Dims::new(n, m, l).unwrap();
            let a = random_triple(&mut rng, d);
            let b = random_triple(&mut rng, d);
            let br = DeltaBreakdown::new(&a, &b).unwrap();
            let sum = |c: [[usize; 2]; 2]| c[0][0] + c[0][1] + c[1][0] + c[1][1];
            prop_assert_eq!(sum(br.x), n);
            prop_assert_eq!(sum(br.y), m);
            prop_assert_eq!(sum(br.z), l);
            prop_assert_eq!(br.closed_form(), delta_enumerate(&a, &b));
        }

        #[test]
        fn rank_one_minors_vanish(seed in any::<u64>()) {
            let mut rng = rng_from_seed(seed);
            let d = Dims::new(3, 3, 3).unwrap();
            let w = outer_product(&random_triple(&mut rng, d));
            for i in 0..3 { for i2 in 0..3 { for j in 0..3 { for j2 in 0..3 { for k in 0..3 {
                prop_assert_eq!(w.get(i, j, k) && w.get(i2, j2, k), w.get(i, j2, k) && w.get(i2, j, k));
            }}}}}
        }
    }
}
