//! Exact separation for the lazily generated families.
//!
//! Every family member is a sum of an anchor part and one independent term
//! per primed mode, so the most violated member at an anchor takes each
//! primed term at its maximum over the corresponding fiber. One pass over
//! the tensor per mode builds those fiber maxima.

use alloc::vec;
use alloc::vec::Vec;

use crate::lp::cuts::{CutDescriptor, CutFamily};
use crate::lp::model::ColumnLayout;
use crate::tensor::{BinaryTensor, Dims};

/// Per-fiber maxima along one mode: the largest `w` over one-entries and
/// the largest `u_p − w` over zero-entries, with the smallest attaining index.
struct FiberMaxima {
    one_w: Vec<(f64, u32)>,
    zero_gap: Vec<(f64, u32)>,
}

fn fiber_id(d: &Dims, mode: usize, e: [usize; 3]) -> usize {
    match mode {
        0 => e[1] * d.l + e[2],
        1 => e[0] * d.l + e[2],
        _ => e[0] * d.m + e[1],
    }
}

fn fiber_maxima(g: &BinaryTensor, lay: &ColumnLayout, point: &[f64], mode: usize, want_zero: bool) -> FiberMaxima {
    let d = g.dims();
    let ext = d.extents();
    let fibers = d.len() / ext[mode];
    let mut one_w = vec![(f64::NEG_INFINITY, u32::MAX); fibers];
    let mut zero_gap = if want_zero { vec![(f64::NEG_INFINITY, u32::MAX); fibers] } else { Vec::new() };
    for idx in 0..d.len() {
        let (i, j, k) = d.coords(idx);
        let e = [i, j, k];
        let f = fiber_id(&d, mode, e);
        let p = e[mode] as u32;
        let w = point[lay.w_linear(idx)];
        if g.get_linear(idx) {
            if w > one_w[f].0 {
                one_w[f] = (w, p);
            }
        } else if want_zero {
            let gap = point[lay.factor(mode, e[mode])] - w;
            if gap > zero_gap[f].0 {
                zero_gap[f] = (gap, p);
            }
        }
    }
    FiberMaxima { one_w, zero_gap }
}

/// Most violated member per anchor of each family in `families`, keeping
/// those violated by more than `tol`. The result is sorted by decreasing
/// violation, ties by descriptor, and truncated to `max_cuts`.
pub fn separate(
    g: &BinaryTensor,
    point: &[f64],
    families: &[CutFamily],
    max_cuts: usize,
    tol: f64,
) -> Vec<(CutDescriptor, f64)> {
    let d = g.dims();
    let lay = ColumnLayout { dims: d };
    assert_eq!(point.len(), lay.num_cols(), "point has the wrong length");
    let want_zero = families.contains(&CutFamily::FourTerm);
    let needs_mode = |t: usize| families.iter().any(|f| f.primed_modes().contains(&t));
    let maxima: Vec<Option<FiberMaxima>> =
        (0..3).map(|t| needs_mode(t).then(|| fiber_maxima(g, &lay, point, t, want_zero))).collect();
    let mx = |t: usize| maxima[t].as_ref().expect("fiber maxima computed for every primed mode");

    let mut out = Vec::new();
    for idx in 0..d.len() {
        let (i, j, k) = d.coords(idx);
        let a = [i, j, k];
        let anchor = a.map(|v| v as u32);
        let w_a = point[lay.w_linear(idx)];
        let one = g.get_linear(idx);
        for &fam in families {
            if fam.anchor_value() != one {
                continue;
            }
            let mut prime = anchor;
            let violation = match fam {
                CutFamily::FlowerX | CutFamily::FlowerY | CutFamily::FlowerZ => {
                    let t = fam.mode();
                    let (best, p) = mx(t).one_w[fiber_id(&d, t, a)];
                    if p == u32::MAX {
                        continue;
                    }
                    prime[t] = p;
                    best - w_a + point[lay.factor(t, a[t])] - 1.0
                }
                CutFamily::RiX | CutFamily::RiY | CutFamily::RiZ => {
                    let t = fam.mode();
                    let mut total = -w_a - point[lay.factor(t, a[t])];
                    let mut ok = true;
                    for &u in fam.primed_modes() {
                        let (best, p) = mx(u).one_w[fiber_id(&d, u, a)];
                        if p == u32::MAX {
                            ok = false;
                            break;
                        }
                        prime[u] = p;
                        total += best;
                    }
                    if !ok {
                        continue;
                    }
                    total
                }
                CutFamily::FourTerm => {
                    let mut total = w_a - 4.0;
                    let mut ok = true;
                    for t in 0..3 {
                        let (best, p) = mx(t).zero_gap[fiber_id(&d, t, a)];
                        if p == u32::MAX {
                            ok = false;
                            break;
                        }
                        prime[t] = p;
                        total += point[lay.factor(t, a[t])] + best;
                    }
                    if !ok {
                        continue;
                    }
                    total
                }
            };
            if violation > tol {
                out.push((CutDescriptor { family: fam, anchor, prime }, violation));
            }
        }
    }
    out.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    out.truncate(max_cuts);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::cuts::enumerate_family;
    use crate::rng::{rng_from_seed, uniform};
    use crate::tensor::tests::{all_triples, random_bits};
    use crate::tensor::outer_product;

    fn violation_of(c: &CutDescriptor, lay: &ColumnLayout, point: &[f64]) -> f64 {
        let (coeffs, _, rhs) = c.row(lay);
        coeffs.iter().map(|&(col, a)| a * point[col]).sum::<f64>() - rhs
    }

    #[test]
    fn plugged_in_flower_violation() {
        let d = Dims::new(2, 1, 1).unwrap();
        let mut g = BinaryTensor::zeros(d);
        g.set(0, 0, 0, true);
        let lay = ColumnLayout { dims: d };
        let mut point = vec![0.0; lay.num_cols()];
        point[lay.w(0, 0, 0)] = 1.0;
        point[lay.x(1)] = 1.0;
        let cuts = separate(&g, &point, &[CutFamily::FlowerX], 10, 1e-9);
        assert_eq!(cuts.len(), 1);
        assert_eq!(cuts[0].0.prime, [0, 0, 0]);
        assert_eq!(cuts[0].0.anchor, [1, 0, 0]);
        assert!((cuts[0].1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn integral_points_are_never_separated() {
        let d = Dims::new(2, 3, 2).unwrap();
        let lay = ColumnLayout { dims: d };
        let mut rng = rng_from_seed(5);
        let g = BinaryTensor::from_bits(d, random_bits(&mut rng, d.len(), 0.5)).unwrap();
        for t in all_triples(d) {
            let w = outer_product(&t);
            let mut v = vec![0.0; lay.num_cols()];
            for i in 0..d.n {
                v[lay.x(i)] = t.x.get(i) as u8 as f64;
            }
            for j in 0..d.m {
                v[lay.y(j)] = t.y.get(j) as u8 as f64;
            }
            for k in 0..d.l {
                v[lay.z(k)] = t.z.get(k) as u8 as f64;
            }
            for idx in 0..d.len() {
                v[lay.w_linear(idx)] = w.get_linear(idx) as u8 as f64;
            }
            assert!(separate(&g, &v, &CutFamily::ALL, usize::MAX, 1e-12).is_empty());
        }
    }

    #[test]
    fn matches_exhaustive_enumeration() {
        let d = Dims::cube(3).unwrap();
        let lay = ColumnLayout { dims: d };
        let mut rng = rng_from_seed(6);
        for _ in 0..100 {
            let g = BinaryTensor::from_bits(d, random_bits(&mut rng, d.len(), 0.5)).unwrap();
            let point: Vec<f64> = (0..lay.num_cols()).map(|_| uniform(&mut rng)).collect();
            for fam in CutFamily::ALL {
                let all = enumerate_family(&g, fam);
                let found = separate(&g, &point, &[fam], usize::MAX, 1e-9);
                for idx in 0..d.len() {
                    let a = d.coords(idx);
                    let a = [a.0 as u32, a.1 as u32, a.2 as u32];
                    let best = all
                        .iter()
                        .filter(|c| c.anchor == a)
                        .map(|c| violation_of(c, &lay, &point))
                        .fold(f64::NEG_INFINITY, f64::max);
                    let got = found.iter().find(|(c, _)| c.anchor == a);
                    match got {
                        Some((c, v)) => {
                            assert!(all.contains(c));
                            assert!((v - best).abs() < 1e-12);
                            assert!((violation_of(c, &lay, &point) - v).abs() < 1e-12);
                        }
                        None => assert!(best <= 1e-9),
                    }
                }
            }
        }
    }

    #[test]
    fn sorted_and_capped() {
        let d = Dims::cube(3).unwrap();
        let lay = ColumnLayout { dims: d };
        let mut rng = rng_from_seed(7);
        let g = BinaryTensor::from_bits(d, random_bits(&mut rng, d.len(), 0.5)).unwrap();
        let point: Vec<f64> = (0..lay.num_cols()).map(|_| uniform(&mut rng)).collect();
        let all = separate(&g, &point, &CutFamily::ALL, usize::MAX, 1e-9);
        assert!(all.windows(2).all(|w| w[0].1 > w[1].1 || (w[0].1 == w[1].1 && w[0].0 < w[1].0)));
        let capped = separate(&g, &point, &CutFamily::ALL, 3, 1e-9);
        assert_eq!(&capped[..], &all[..3.min(all.len())]);
    }
}
