//! The standard, flower and complete relaxations of the extended problem.

use alloc::vec::Vec;

use crate::lp::cuts::{count_family, enumerate_family, CutFamily};
use crate::lp::model::{ColumnLayout, LpModel, RowKind, Sense};
use crate::tensor::{BinaryTensor, Dims};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relaxation {
    Slp,
    Flp,
    Clp,
}

impl Relaxation {
    pub const ALL: [Relaxation; 3] = [Relaxation::Slp, Relaxation::Flp, Relaxation::Clp];

    pub fn name(self) -> &'static str {
        match self {
            Relaxation::Slp => "slp",
            Relaxation::Flp => "flp",
            Relaxation::Clp => "clp",
        }
    }

    pub fn families(self) -> &'static [CutFamily] {
        match self {
            Relaxation::Slp => &[],
            Relaxation::Flp => &CutFamily::FLOWER,
            Relaxation::Clp => &CutFamily::ALL,
        }
    }
}

impl core::str::FromStr for Relaxation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "slp" => Ok(Relaxation::Slp),
            "flp" => Ok(Relaxation::Flp),
            "clp" => Ok(Relaxation::Clp),
            other => Err(Error::InvalidConfig(alloc::format!("unknown relaxation {other:?}"))),
        }
    }
}

/// How the families beyond the standard rows are generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BuildMode {
    /// Every row upfront.
    Eager,
    /// Every extra family by separation.
    Lazy,
    /// Flower rows upfront while `n·m·l ≤ 512`, everything else by separation.
    #[default]
    Auto,
}

/// Largest tensor for which `Auto` builds flower rows upfront.
pub const AUTO_EAGER_FLOWER_ENTRIES: usize = 512;

/// Default cap on the number of rows of an eager model.
pub const DEFAULT_ROW_CAP: u128 = 2_000_000;

impl BuildMode {
    fn is_lazy(self, family: CutFamily, dims: Dims) -> bool {
        match self {
            BuildMode::Eager => false,
            BuildMode::Lazy => true,
            BuildMode::Auto => {
                !CutFamily::FLOWER.contains(&family) || dims.len() > AUTO_EAGER_FLOWER_ENTRIES
            }
        }
    }
}

/// The standard relaxation: three upper rows per one-entry and the lower
/// row `w ≥ x + y + z − 2` per zero-entry. `w ≥ 0` is carried by the
/// column bounds, as are the unit boxes of all columns. The objective
/// constant `|S1|` is kept apart from the coefficient vector.
pub fn build_slp(g: &BinaryTensor) -> LpModel {
    let dims = g.dims();
    let lay = ColumnLayout { dims };
    let mut model = LpModel::new(lay.num_cols());
    model.layout = Some(lay);
    let mut ones = 0usize;
    for idx in 0..dims.len() {
        let (i, j, k) = dims.coords(idx);
        let w = lay.w_linear(idx);
        let entry = idx as u32;
        if g.get_linear(idx) {
            ones += 1;
            model.objective[w] = -1.0;
            for (mode, col) in [lay.x(i), lay.y(j), lay.z(k)].into_iter().enumerate() {
                model.add_row(&[(w, 1.0), (col, -1.0)], Sense::Le, 0.0, RowKind::Upper { entry, mode: mode as u8 });
            }
        } else {
            model.objective[w] = 1.0;
            model.add_row(
                &[(w, 1.0), (lay.x(i), -1.0), (lay.y(j), -1.0), (lay.z(k), -1.0)],
                Sense::Ge,
                -2.0,
                RowKind::Lower { entry },
            );
        }
    }
    model.obj_constant = ones as f64;
    model
}

fn build_with(g: &BinaryTensor, families: &[CutFamily], mode: BuildMode, row_cap: u128) -> Result<LpModel> {
    let dims = g.dims();
    let mut model = build_slp(g);
    let eager: Vec<CutFamily> = families.iter().copied().filter(|&f| !mode.is_lazy(f, dims)).collect();
    let needed: u128 =
        model.num_rows() as u128 + eager.iter().map(|&f| count_family(g, f)).sum::<u128>();
    if !eager.is_empty() && needed > row_cap {
        return Err(Error::RowCapExceeded { needed, cap: row_cap });
    }
    for &f in &eager {
        for c in enumerate_family(g, f) {
            model.add_cut(&c);
        }
    }
    model.lazy_families = families.iter().copied().filter(|&f| mode.is_lazy(f, dims)).collect();
    Ok(model)
}

/// Standard rows plus the three flower families.
pub fn build_flp(g: &BinaryTensor, mode: BuildMode) -> Result<LpModel> {
    build_with(g, &CutFamily::FLOWER, mode, DEFAULT_ROW_CAP)
}

/// Flower rows plus the running-intersection and four-term families.
pub fn build_clp(g: &BinaryTensor, mode: BuildMode, row_cap: u128) -> Result<LpModel> {
    build_with(g, &CutFamily::ALL, mode, row_cap)
}

pub fn build(g: &BinaryTensor, relaxation: Relaxation, mode: BuildMode) -> Result<LpModel> {
    match relaxation {
        Relaxation::Slp => Ok(build_slp(g)),
        Relaxation::Flp => build_flp(g, mode),
        Relaxation::Clp => build_clp(g, mode, DEFAULT_ROW_CAP),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use crate::tensor::partition;
    use crate::tensor::tests::random_bits;

    fn random_tensor(seed: u64, d: Dims) -> BinaryTensor {
        let mut rng = rng_from_seed(seed);
        BinaryTensor::from_bits(d, random_bits(&mut rng, d.len(), 0.5)).unwrap()
    }

    #[test]
    fn single_entry_models() {
        let d = Dims::cube(1).unwrap();
        let one = build_slp(&BinaryTensor::ones(d));
        assert_eq!(one.num_cols(), 4);
        assert_eq!(one.num_rows(), 3);
        assert_eq!(one.obj_constant, 1.0);
        assert_eq!(one.evaluate(&[1.0; 4]), 0.0);
        let zero = build_slp(&BinaryTensor::zeros(d));
        assert_eq!(zero.num_rows(), 1);
        assert_eq!(zero.senses[0], Sense::Ge);
        assert_eq!(zero.evaluate(&[0.0; 4]), 0.0);
    }

    #[test]
    fn slp_row_count() {
        for seed in 0..5 {
            let g = random_tensor(seed, Dims::cube(3).unwrap());
            let p = partition(&g);
            let m = build_slp(&g);
            assert_eq!(m.num_rows(), 3 * p.s1.len() + p.s0.len());
            assert!(m.lower.iter().all(|&v| v == 0.0));
            assert!(m.validate().is_ok());
        }
    }

    #[test]
    fn flower_row_count_matches_enumeration() {
        let g = random_tensor(9, Dims::cube(4).unwrap());
        let base = build_slp(&g).num_rows();
        let m = build_flp(&g, BuildMode::Eager).unwrap();
        let mut brute = 0;
        let d = g.dims();
        for a in 0..d.len() {
            let (i, j, k) = d.coords(a);
            if g.get_linear(a) {
                continue;
            }
            for p in 0..4 {
                brute += g.get(p, j, k) as usize + g.get(i, p, k) as usize + g.get(i, j, p) as usize;
            }
        }
        assert_eq!(m.num_rows() - base, brute);
        assert!(m.lazy_families.is_empty());
        let lazy = build_flp(&g, BuildMode::Lazy).unwrap();
        assert_eq!(lazy.num_rows(), base);
        assert_eq!(lazy.lazy_families, CutFamily::FLOWER.to_vec());
    }

    #[test]
    fn degenerate_data() {
        let d = Dims::cube(3).unwrap();
        let ones = BinaryTensor::ones(d);
        assert_eq!(build_clp(&ones, BuildMode::Eager, DEFAULT_ROW_CAP).unwrap().num_rows(), build_slp(&ones).num_rows());
        let zeros = BinaryTensor::zeros(d);
        assert_eq!(build_clp(&zeros, BuildMode::Eager, DEFAULT_ROW_CAP).unwrap().num_rows(), build_slp(&zeros).num_rows());
        assert!(matches!(
            build_clp(&random_tensor(1, d), BuildMode::Eager, 10),
            Err(Error::RowCapExceeded { .. })
        ));
    }

    #[test]
    fn auto_mode_split() {
        let small = random_tensor(2, Dims::cube(3).unwrap());
        let m = build_clp(&small, BuildMode::Auto, DEFAULT_ROW_CAP).unwrap();
        assert_eq!(m.lazy_families, [CutFamily::RiX, CutFamily::RiY, CutFamily::RiZ, CutFamily::FourTerm].to_vec());
        let big = random_tensor(3, Dims::cube(17).unwrap());
        assert_eq!(build_flp(&big, BuildMode::Auto).unwrap().lazy_families, CutFamily::FLOWER.to_vec());
    }
}
