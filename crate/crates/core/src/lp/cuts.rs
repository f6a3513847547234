//! The flower, running-intersection and four-term inequality families.
//!
//! Every family is indexed by an anchor entry and one primed index per mode
//! involved. Modes a family does not use keep the anchor's coordinate in
//! `prime`, so each descriptor has a single canonical form.

use alloc::vec::Vec;

use crate::lp::model::{ColumnLayout, Sense};
use crate::tensor::{BinaryTensor, Dims};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CutFamily {
    FlowerX,
    FlowerY,
    FlowerZ,
    RiX,
    RiY,
    RiZ,
    FourTerm,
}

impl CutFamily {
    pub const ALL: [CutFamily; 7] = [
        CutFamily::FlowerX,
        CutFamily::FlowerY,
        CutFamily::FlowerZ,
        CutFamily::RiX,
        CutFamily::RiY,
        CutFamily::RiZ,
        CutFamily::FourTerm,
    ];
    pub const FLOWER: [CutFamily; 3] = [CutFamily::FlowerX, CutFamily::FlowerY, CutFamily::FlowerZ];
    pub const RUNNING_INTERSECTION: [CutFamily; 3] = [CutFamily::RiX, CutFamily::RiY, CutFamily::RiZ];

    /// The mode singled out by the family (the `u` on the right-hand side).
    pub fn mode(self) -> usize {
        match self {
            CutFamily::FlowerX | CutFamily::RiX => 0,
            CutFamily::FlowerY | CutFamily::RiY => 1,
            CutFamily::FlowerZ | CutFamily::RiZ => 2,
            CutFamily::FourTerm => 0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CutFamily::FlowerX => "flower-x",
            CutFamily::FlowerY => "flower-y",
            CutFamily::FlowerZ => "flower-z",
            CutFamily::RiX => "ri-x",
            CutFamily::RiY => "ri-y",
            CutFamily::RiZ => "ri-z",
            CutFamily::FourTerm => "four-term",
        }
    }

    /// Flower and running-intersection anchors are zero-entries, four-term
    /// anchors are one-entries.
    pub fn anchor_value(self) -> bool {
        self == CutFamily::FourTerm
    }

    /// Value the entries at the primed positions must have.
    pub fn prime_value(self) -> bool {
        self != CutFamily::FourTerm
    }

    /// Modes whose primed index differs from the anchor.
    pub fn primed_modes(self) -> &'static [usize] {
        match self {
            CutFamily::FlowerX => &[0],
            CutFamily::FlowerY => &[1],
            CutFamily::FlowerZ => &[2],
            CutFamily::RiX => &[1, 2],
            CutFamily::RiY => &[0, 2],
            CutFamily::RiZ => &[0, 1],
            CutFamily::FourTerm => &[0, 1, 2],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CutDescriptor {
    pub family: CutFamily,
    pub anchor: [u32; 3],
    pub prime: [u32; 3],
}

impl CutDescriptor {
    pub fn anchor(&self) -> [usize; 3] {
        self.anchor.map(|v| v as usize)
    }

    /// The anchor with coordinate `mode` replaced by its primed index.
    pub fn primed_entry(&self, mode: usize) -> [usize; 3] {
        let mut e = self.anchor();
        e[mode] = self.prime[mode] as usize;
        e
    }

    /// The row `coeffs · v ≤ rhs` over the tensor columns.
    pub fn row(&self, lay: &ColumnLayout) -> (Vec<(usize, f64)>, Sense, f64) {
        let w = |e: [usize; 3]| lay.w(e[0], e[1], e[2]);
        let a = self.anchor();
        let mut coeffs = Vec::with_capacity(10);
        let rhs = match self.family {
            CutFamily::FlowerX | CutFamily::FlowerY | CutFamily::FlowerZ => {
                let t = self.family.mode();
                coeffs.push((w(self.primed_entry(t)), 1.0));
                coeffs.push((w(a), -1.0));
                coeffs.push((lay.factor(t, a[t]), 1.0));
                1.0
            }
            CutFamily::RiX | CutFamily::RiY | CutFamily::RiZ => {
                let t = self.family.mode();
                for &u in self.family.primed_modes() {
                    coeffs.push((w(self.primed_entry(u)), 1.0));
                }
                coeffs.push((w(a), -1.0));
                coeffs.push((lay.factor(t, a[t]), -1.0));
                0.0
            }
            CutFamily::FourTerm => {
                for t in 0..3 {
                    coeffs.push((lay.factor(t, a[t]), 1.0));
                    coeffs.push((lay.factor(t, self.prime[t] as usize), 1.0));
                }
                coeffs.push((w(a), 1.0));
                for t in 0..3 {
                    coeffs.push((w(self.primed_entry(t)), -1.0));
                }
                4.0
            }
        };
        (coeffs, Sense::Le, rhs)
    }

    /// Whether the referenced entries of `g` have the values the family requires.
    pub fn is_valid_for(&self, g: &BinaryTensor) -> bool {
        let d = g.dims();
        let e = d.extents();
        let in_range = |v: [usize; 3]| v[0] < e[0] && v[1] < e[1] && v[2] < e[2];
        let a = self.anchor();
        if !in_range(a) || !in_range(self.prime.map(|v| v as usize)) {
            return false;
        }
        if g.get(a[0], a[1], a[2]) != self.family.anchor_value() {
            return false;
        }
        let primed = self.family.primed_modes();
        for t in 0..3 {
            if !primed.contains(&t) && self.prime[t] != self.anchor[t] {
                return false;
            }
        }
        primed.iter().all(|&t| {
            let p = self.primed_entry(t);
            g.get(p[0], p[1], p[2]) == self.family.prime_value()
        })
    }
}

/// Indices along the fiber through `anchor` in `mode` whose entry equals `value`.
pub(crate) fn fiber_hits(g: &BinaryTensor, anchor: [usize; 3], mode: usize, value: bool) -> Vec<usize> {
    let ext = g.dims().extents()[mode];
    let mut e = anchor;
    (0..ext)
        .filter(|&p| {
            e[mode] = p;
            g.get(e[0], e[1], e[2]) == value
        })
        .collect()
}

/// Every member of `family` for `g`, in increasing descriptor order.
pub fn enumerate_family(g: &BinaryTensor, family: CutFamily) -> Vec<CutDescriptor> {
    let d = g.dims();
    let mut out = Vec::new();
    let primed = family.primed_modes();
    for idx in 0..d.len() {
        if g.get_linear(idx) != family.anchor_value() {
            continue;
        }
        let (i, j, k) = d.coords(idx);
        let a = [i, j, k];
        let lists: Vec<Vec<usize>> =
            primed.iter().map(|&t| fiber_hits(g, a, t, family.prime_value())).collect();
        if lists.iter().any(|l| l.is_empty()) {
            continue;
        }
        let mut pos = alloc::vec![0usize; lists.len()];
        loop {
            let mut prime = a.map(|v| v as u32);
            for (slot, &t) in primed.iter().enumerate() {
                prime[t] = lists[slot][pos[slot]] as u32;
            }
            out.push(CutDescriptor { family, anchor: a.map(|v| v as u32), prime });
            let mut s = lists.len();
            let exhausted = loop {
                if s == 0 {
                    break true;
                }
                s -= 1;
                pos[s] += 1;
                if pos[s] < lists[s].len() {
                    break false;
                }
                pos[s] = 0;
            };
            if exhausted {
                break;
            }
        }
    }
    out
}

/// Number of members of `family` for `g`, without listing them.
pub fn count_family(g: &BinaryTensor, family: CutFamily) -> u128 {
    let d: Dims = g.dims();
    let primed = family.primed_modes();
    let mut total: u128 = 0;
    for idx in 0..d.len() {
        if g.get_linear(idx) != family.anchor_value() {
            continue;
        }
        let (i, j, k) = d.coords(idx);
        let mut prod: u128 = 1;
        for &t in primed {
            prod *= fiber_hits(g, [i, j, k], t, family.prime_value()).len() as u128;
        }
        total += prod;
    }
    total
}
