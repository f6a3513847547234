//! Noise models: independent entry flips and monotone reverts.

use alloc::vec::Vec;

use crate::bits::BitVector;
use crate::rng::{rng_from_seed, uniform};
use crate::tensor::{outer_product, BinaryTensor, FactorTriple};
use crate::{Error, Result};

/// Flip probability and seed of the fully-random model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorruptionSpec {
    pub p: f64,
    pub seed: u64,
}

impl CorruptionSpec {
    pub fn new(p: f64, seed: u64) -> Result<Self> {
        check_probability(p)?;
        Ok(Self { p, seed })
    }
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    Ok(())
}

/// Flips each entry of `x ⊗ y ⊗ z` independently with probability `p`.
///
/// Entries are visited in linear order and each consumes exactly one
/// uniform draw, flipping when the draw is below `p`.
pub fn fully_random_corrupt(truth: &FactorTriple, spec: CorruptionSpec) -> Result<BinaryTensor> {
    check_probability(spec.p)?;
    let mut g = outer_product(truth);
    let mut rng = rng_from_seed(spec.seed);
    for idx in 0..g.dims().len() {
        if uniform(&mut rng) < spec.p {
            g.flip_linear(idx);
        }
    }
    Ok(g)
}

/// The sets `P` (truth product is 1) and `T` (data agrees with the truth).
/// `N` and `F` are their complements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntryClassification {
    pub positive: BitVector,
    pub agree: BitVector,
}

impl EntryClassification {
    pub fn p(&self) -> &BitVector {
        &self.positive
    }

    pub fn n(&self) -> BitVector {
        self.positive.not()
    }

    pub fn t(&self) -> &BitVector {
        &self.agree
    }

    pub fn f(&self) -> BitVector {
        self.agree.not()
    }

    /// `|F|`, the number of corrupted entries.
    pub fn corrupted(&self) -> usize {
        self.agree.count_zeros()
    }
}

pub fn classify(truth: &FactorTriple, g: &BinaryTensor) -> Result<EntryClassification> {
    truth.dims().ensure_eq(&g.dims())?;
    let positive = outer_product(truth).bits().clone();
    let agree = positive.xor(g.bits()).not();
    let c = EntryClassification { positive, agree };
    debug_assert!({
        let s1 = g.bits();
        let s0 = s1.not();
        let tn = c.t().and(&c.n());
        let fp = c.f().and(c.p());
        let tp = c.t().and(c.p());
        let fneg = c.f().and(&c.n());
        s0 == tn.or(&fp) && *s1 == tp.or(&fneg)
    });
    Ok(c)
}

/// Entries to revert to their ground-truth value.
#[derive(Debug, Clone, PartialEq)]
pub enum MonotonePlan {
    /// Explicit linear indices; each must currently disagree with the truth.
    Indices(Vec<usize>),
    /// Every disagreeing entry is reverted independently with probability `q`.
    RevertFraction { q: f64, seed: u64 },
}

/// Adversary behaviours applied after fully-random corruption.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Adversary {
    #[default]
    None,
    /// Revert each corrupted entry independently with probability `q`.
    Fraction { q: f64 },
    /// Revert every corrupted entry whose truth value is 1.
    RevertP,
}

impl Adversary {
    /// Concrete plan for the instance `g`.
    pub fn plan(&self, truth: &FactorTriple, g: &BinaryTensor, seed: u64) -> Result<MonotonePlan> {
        Ok(match *self {
            Adversary::None => MonotonePlan::Indices(Vec::new()),
            Adversary::Fraction { q } => {
                check_probability(q)?;
                MonotonePlan::RevertFraction { q, seed }
            }
            Adversary::RevertP => {
                let c = classify(truth, g)?;
                MonotonePlan::Indices(c.f().and(c.p()).iter_ones().collect())
            }
        })
    }

    pub fn apply(&self, truth: &FactorTriple, g: &BinaryTensor, seed: u64) -> Result<BinaryTensor> {
        let plan = self.plan(truth, g, seed)?;
        apply_monotone(truth, g, &plan)
    }
}

/// Resets the planned entries of `g` to `x_i y_j z_k`.
pub fn apply_monotone(truth: &FactorTriple, g: &BinaryTensor, plan: &MonotonePlan) -> Result<BinaryTensor> {
    let c = classify(truth, g)?;
    let mut out = g.clone();
    match plan {
        MonotonePlan::Indices(idx) => {
            let len = g.dims().len();
            for &i in idx {
                if i >= len {
                    return Err(Error::IndexOutOfRange { index: i, len });
                }
                if c.agree.get(i) {
                    return Err(Error::PlanEntryAgrees(i));
                }
                out.set_linear(i, c.positive.get(i));
            }
        }
        &MonotonePlan::RevertFraction { q, seed } => {
            check_probability(q)?;
            let mut rng = rng_from_seed(seed);
            for i in c.f().iter_ones() {
                if uniform(&mut rng) < q {
                    out.set_linear(i, c.positive.get(i));
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::tests::random_triple;
    use crate::tensor::Dims;
    use crate::rng::rng_from_seed;
    use proptest::prelude::*;

    fn instance(seed: u64, n: usize, p: f64) -> (FactorTriple, BinaryTensor) {
        let mut rng = rng_from_seed(seed);
        let truth = random_triple(&mut rng, Dims::cube(n).unwrap());
        let g = fully_random_corrupt(&truth, CorruptionSpec::new(p, seed ^ 99).unwrap()).unwrap();
        (truth, g)
    }

    #[test]
    fn extremes() {
        let (truth, g0) = instance(1, 4, 0.0);
        assert_eq!(g0, outer_product(&truth));
        let g1 = fully_random_corrupt(&truth, CorruptionSpec::new(1.0, 5).unwrap()).unwrap();
        assert_eq!(g1, outer_product(&truth).complement());
        assert!(CorruptionSpec::new(1.5, 0).is_err());
    }

    #[test]
    fn flip_fraction_concentrates() {
        let truth = FactorTriple::ones(Dims::cube(15).unwrap());
        let total = 15 * 15 * 15;
        let (mut flips, mut trials) = (0usize, 0usize);
        for seed in 0..10_000u64 {
            let g = fully_random_corrupt(&truth, CorruptionSpec::new(0.3, seed).unwrap()).unwrap();
            flips += total - g.count_ones();
            trials += total;
        }
        let mean = flips as f64 / trials as f64;
        let sd = (0.3 * 0.7 / trials as f64).sqrt();
        assert!((mean - 0.3).abs() < 3.0 * sd, "mean {mean}");
    }

    #[test]
    fn monotone_plans() {
        let (truth, g) = instance(2, 5, 0.4);
        let c = classify(&truth, &g).unwrap();
        assert_eq!(apply_monotone(&truth, &g, &MonotonePlan::Indices(Vec::new())).unwrap(), g);
        let all = MonotonePlan::Indices(c.f().iter_ones().collect());
        assert_eq!(apply_monotone(&truth, &g, &all).unwrap(), outer_product(&truth));
        let agreeing = c.t().iter_ones().next().unwrap();
        assert_eq!(
            apply_monotone(&truth, &g, &MonotonePlan::Indices(alloc::vec![agreeing])),
            Err(Error::PlanEntryAgrees(agreeing))
        );
        let half = apply_monotone(&truth, &g, &MonotonePlan::RevertFraction { q: 0.5, seed: 3 }).unwrap();
        let c2 = classify(&truth, &half).unwrap();
        assert!(c2.corrupted() <= c.corrupted());
        assert!(c2.corrupted() < c.corrupted());
    }

    #[test]
    fn revert_p_only_touches_positive_entries() {
        let (truth, g) = instance(3, 5, 0.3);
        let out = Adversary::RevertP.apply(&truth, &g, 0).unwrap();
        let before = classify(&truth, &g).unwrap();
        let after = classify(&truth, &out).unwrap();
        assert_eq!(after.f().and(after.p()).count_ones(), 0);
        assert_eq!(after.f().and(&after.n()), before.f().and(&before.n()));
    }

    #[test]
    fn classification_extremes() {
        let (truth, _) = instance(4, 3, 0.0);
        let w = outer_product(&truth);
        assert_eq!(classify(&truth, &w).unwrap().corrupted(), 0);
        assert_eq!(classify(&truth, &w.complement()).unwrap().t().count_ones(), 0);
    }

    proptest! {
        #[test]
        fn deterministic_and_identities(seed in any::<u64>(), p in 0.0f64..=1.0) {
            let (truth, g) = instance(seed, 4, p);
            let (_, g2) = instance(seed, 4, p);
            prop_assert_eq!(&g, &g2);
            let c = classify(&truth, &g).unwrap();
            let s1 = g.bits().clone();
            let s0 = s1.not();
            prop_assert_eq!(s0, c.t().and(&c.n()).or(&c.f().and(c.p())));
            prop_assert_eq!(s1, c.t().and(c.p()).or(&c.f().and(&c.n())));
        }

        #[test]
        fn monotone_never_adds_disagreement(seed in any::<u64>(), q in 0.0f64..=1.0) {
            let (truth, g) = instance(seed, 4, 0.35);
            let out = apply_monotone(&truth, &g, &MonotonePlan::RevertFraction { q, seed }).unwrap();
            let before = classify(&truth, &g).unwrap().f();
            let after = classify(&truth, &out).unwrap().f();
            prop_assert_eq!(after.and_not(&before).count_ones(), 0);
        }
    }
}
