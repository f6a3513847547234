//! Recovery thresholds, the tallies behind the deterministic recovery
//! conditions of the standard and flower relaxations, the condition
//! checkers, and the explicit dual certificate of the standard relaxation.
//!
//! Every tally is an exact integer and every condition is evaluated in
//! rational arithmetic; floating point only appears in reported slacks.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::bits::BitVector;
use crate::tensor::{BinaryTensor, Dims, FactorTriple};
use crate::{Error, Result};

/// Corruption probability below which the exact problem recovers the
/// ground truth with high probability, and at or above which it fails.
pub fn threshold_ip() -> f64 {
    0.5
}

/// Whether `p` lies strictly below the threshold of the exact problem.
pub fn ip_recovery_regime(p: f64) -> bool {
    p < threshold_ip()
}

fn check_rate(r: f64) -> Result<f64> {
    if r > 0.0 && r <= 1.0 {
        Ok(r)
    } else {
        Err(Error::InvalidRate(r))
    }
}

/// The correction `δ ≥ 0` of the standard-relaxation threshold, for rates
/// sorted so that `r_x ≥ r_y ≥ r_z`.
pub fn slp_delta(rx: f64, ry: f64, rz: f64) -> f64 {
    0.5 * rx * ry + 0.5 * rx * rz - ry * rz + rx - 0.5 * ry - 0.5 * rz
}

/// Recovery threshold of the standard relaxation for factor ones-ratios
/// `r_x, r_y, r_z` in any order.
pub fn threshold_slp(rx: f64, ry: f64, rz: f64) -> Result<f64> {
    let mut r = [check_rate(rx)?, check_rate(ry)?, check_rate(rz)?];
    r.sort_by(|a, b| b.total_cmp(a));
    let prod = r[0] * r[1] * r[2];
    let delta = slp_delta(r[0], r[1], r[2]);
    debug_assert!(delta >= -1e-12);
    Ok(prod / (2.0 * (1.0 + prod) + delta))
}

/// Recovery threshold of the flower relaxation for tensor density `r_w`.
pub fn threshold_flp(rw: f64) -> Result<f64> {
    let rw = check_rate(rw)?;
    Ok(rw / (1.0 + 2.0 * rw))
}

/// The two modes other than `t`, in increasing order.
#[inline]
pub const fn other_modes(t: usize) -> (usize, usize) {
    match t {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

type Quad = [[u64; 2]; 2];

/// Exact tallies of agreeing (`T`) and corrupted (`F`) entries, split by the
/// ground-truth values of the coordinates involved.
///
/// Mode `t` tallies are indexed by the mode-`t` coordinate and by the truth
/// values `(r, s)` of the other two modes in increasing mode order, so
/// `T^{y,j}_{rs}` counts `(i, k)` with `x̄_i = r`, `z̄_k = s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecoveryStats {
    dims: Dims,
    truth: [Vec<bool>; 3],
    agree: [Vec<Quad>; 3],
    disagree: [Vec<Quad>; 3],
    /// `pair[t][a·len(v) + b][r]`: agreeing entries along mode `t` whose
    /// mode-`t` truth value is `r`, at other coordinates `(a, b)`.
    pair: [Vec<[u64; 2]>; 3],
    /// `triple[t][idx][r][s][u]`.
    triple: [Vec<[[[u64; 2]; 2]; 2]>; 3],
    /// Membership in the agreeing set, by linear entry index.
    agreeing: BitVector,
    corrupted: usize,
}

impl RecoveryStats {
    pub fn dims(&self) -> Dims {
        self.dims
    }

    /// `|F|`.
    pub fn corrupted(&self) -> usize {
        self.corrupted
    }

    pub fn truth_value(&self, t: usize, idx: usize) -> bool {
        self.truth[t][idx]
    }

    /// Support size of factor `t` (`n_x̄`, `n_ȳ`, `n_z̄`).
    pub fn support(&self, t: usize) -> usize {
        self.truth[t].iter().filter(|&&b| b).count()
    }

    /// `T^{t,idx}_{rs}`.
    pub fn t(&self, t: usize, idx: usize, r: usize, s: usize) -> u64 {
        self.agree[t][idx][r][s]
    }

    /// `F^{t,idx}_{rs}`.
    pub fn f(&self, t: usize, idx: usize, r: usize, s: usize) -> u64 {
        self.disagree[t][idx][r][s]
    }

    /// `T^{t,idx}`.
    pub fn t_total(&self, t: usize, idx: usize) -> u64 {
        self.agree[t][idx].iter().flatten().sum()
    }

    /// `F^{t,idx}`.
    pub fn f_total(&self, t: usize, idx: usize) -> u64 {
        self.disagree[t][idx].iter().flatten().sum()
    }

    /// Pair tally along mode `t` at other coordinates `(a, b)`: for `t = 0`
    /// this is `T^{y,z,a,b}_r`, for `t = 1` `T^{x,z,a,b}_r`, for `t = 2`
    /// `T^{x,y,a,b}_r`.
    pub fn pair(&self, t: usize, a: usize, b: usize, r: usize) -> u64 {
        let (_, v) = other_modes(t);
        self.pair[t][a * self.extent(v) + b][r]
    }

    /// `T^{t,idx}_{rsu}`.
    pub fn triple(&self, t: usize, idx: usize, r: usize, s: usize, u: usize) -> u64 {
        self.triple[t][idx][r][s][u]
    }

    /// Average of the pair tallies with value 1 along mode `t`, e.g.
    /// `T̄^{y,z}_1` for `t = 0`.
    pub fn pair_average(&self, t: usize) -> BigRational {
        let total: u64 = self.pair[t].iter().map(|c| c[1]).sum();
        BigRational::new(BigInt::from(total), BigInt::from(self.pair[t].len()))
    }

    /// `F_00/3 + (F_01 + F_10)/2 + F_11` for mode `t`, index `idx`.
    pub fn weighted_false(&self, t: usize, idx: usize) -> BigRational {
        let f = &self.disagree[t][idx];
        rat(2 * f[0][0] + 3 * (f[0][1] + f[1][0]) + 6 * f[1][1], 6)
    }

    /// Whether entry `(i, j, k)` agrees with the ground truth.
    pub fn is_agreeing(&self, i: usize, j: usize, k: usize) -> bool {
        self.agreeing.get(self.dims.index(i, j, k))
    }

    fn extent(&self, t: usize) -> usize {
        self.dims.extents()[t]
    }

    /// Coefficient of the zero-index dual multiplier (`α_i`, `β_j`, `γ_k`):
    /// `weighted_false / T_11`, zero when there is no corruption to pay for,
    /// `None` when it is undefined.
    pub fn zero_ratio(&self, t: usize, idx: usize) -> Option<BigRational> {
        let wf = self.weighted_false(t, idx);
        if wf.is_zero() {
            return Some(wf);
        }
        let t11 = self.t(t, idx, 1, 1);
        (t11 > 0).then(|| wf / BigRational::from_integer(BigInt::from(t11)))
    }
}

fn rat(num: u64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn rat_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Counts every tally by direct enumeration of the entries.
pub fn compute_stats(truth: &FactorTriple, g: &BinaryTensor) -> Result<RecoveryStats> {
    let d = truth.dims();
    d.ensure_eq(&g.dims())?;
    let ext = d.extents();
    let tv: [Vec<bool>; 3] = core::array::from_fn(|t| truth.factor(t).to_bools());
    let mut agree: [Vec<Quad>; 3] = core::array::from_fn(|t| vec![[[0; 2]; 2]; ext[t]]);
    let mut disagree = agree.clone();
    let mut pair: [Vec<[u64; 2]>; 3] = core::array::from_fn(|t| {
        let (u, v) = other_modes(t);
        vec![[0; 2]; ext[u] * ext[v]]
    });
    let mut corrupted = 0;
    let mut agreeing = BitVector::zeros(d.len());
    for idx in 0..d.len() {
        let (i, j, k) = d.coords(idx);
        let c = [i, j, k];
        let prod = tv[0][i] && tv[1][j] && tv[2][k];
        let ok = prod == g.get_linear(idx);
        corrupted += usize::from(!ok);
        agreeing.set(idx, ok);
        for t in 0..3 {
            let (u, v) = other_modes(t);
            let (r, s) = (usize::from(tv[u][c[u]]), usize::from(tv[v][c[v]]));
            if ok {
                agree[t][c[t]][r][s] += 1;
                pair[t][c[u] * ext[v] + c[v]][usize::from(tv[t][c[t]])] += 1;
            } else {
                disagree[t][c[t]][r][s] += 1;
            }
        }
    }
    let mut triple: [Vec<[[[u64; 2]; 2]; 2]>; 3] = core::array::from_fn(|t| vec![[[[0; 2]; 2]; 2]; ext[t]]);
    for idx in 0..d.len() {
        let (i, j, k) = d.coords(idx);
        let c = [i, j, k];
        if !agreeing.get(idx) {
            continue;
        }
        for t in 0..3 {
            let (u, v) = other_modes(t);
            let (r, s) = (usize::from(tv[u][c[u]]), usize::from(tv[v][c[v]]));
            let along = pair[t][c[u] * ext[v] + c[v]];
            let cell = &mut triple[t][c[t]][r][s];
            cell[0] += along[0];
            cell[1] += along[1];
        }
    }
    let stats = RecoveryStats { dims: d, truth: tv, agree, disagree, pair, triple, agreeing, corrupted };
    debug_assert!((0..3).all(|t| {
        let (u, v) = other_modes(t);
        (0..ext[t]).all(|idx| (stats.t_total(t, idx) + stats.f_total(t, idx)) as usize == ext[u] * ext[v])
    }));
    Ok(stats)
}

/// Where a condition instance lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Site {
    /// A factor coordinate of mode `mode`.
    Index { mode: u8, index: usize },
    /// Two coordinates of the modes other than `mode`.
    Pair { mode: u8, a: usize, b: usize },
    Entry { i: usize, j: usize, k: usize },
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const NAMES: [char; 3] = ['x', 'y', 'z'];
        match *self {
            Site::Index { mode, index } => write!(f, "{}[{}]", NAMES[mode as usize], index),
            Site::Pair { mode, a, b } => {
                let (u, v) = other_modes(mode as usize);
                write!(f, "({}[{}], {}[{}])", NAMES[u], a, NAMES[v], b)
            }
            Site::Entry { i, j, k } => write!(f, "({i}, {j}, {k})"),
        }
    }
}

/// Violating sites kept per condition.
pub const MAX_REPORTED_VIOLATIONS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionRecord {
    pub id: &'static str,
    pub instances: usize,
    pub holds: bool,
    pub holds_strictly: bool,
    /// Whether uniqueness needs this condition to hold strictly.
    pub strict_required: bool,
    /// Smallest `lhs − rhs` over the instances; `None` without instances or
    /// when some instance is undefined (a zero denominator).
    pub min_slack: Option<f64>,
    pub violations: Vec<Site>,
}

/// Tracks one condition family over its instances.
struct Tracker {
    rec: ConditionRecord,
    min: Option<BigRational>,
    undefined: bool,
}

impl Tracker {
    fn new(id: &'static str, strict_required: bool) -> Self {
        Self {
            rec: ConditionRecord {
                id,
                instances: 0,
                holds: true,
                holds_strictly: true,
                strict_required,
                min_slack: None,
                violations: Vec::new(),
            },
            min: None,
            undefined: false,
        }
    }

    /// Records `lhs − rhs`; `None` marks an undefined instance. Conditions
    /// stated with a strict inequality pass `strict_form`.
    fn push(&mut self, site: Site, slack: Option<BigRational>, strict_form: bool) {
        self.rec.instances += 1;
        let (holds, strict) = match &slack {
            Some(s) if strict_form => (s.is_positive(), s.is_positive()),
            Some(s) => (!s.is_negative(), s.is_positive()),
            None => (false, false),
        };
        if !holds && self.rec.violations.len() < MAX_REPORTED_VIOLATIONS {
            self.rec.violations.push(site);
        }
        self.rec.holds &= holds;
        self.rec.holds_strictly &= strict;
        match slack {
            Some(s) => {
                if self.min.as_ref().is_none_or(|m| s < *m) {
                    self.min = Some(s);
                }
            }
            None => self.undefined = true,
        }
    }

    fn finish(mut self) -> ConditionRecord {
        self.rec.min_slack = if self.undefined { None } else { self.min.as_ref().map(rat_f64) };
        self.rec.holds_strictly &= self.rec.holds;
        self.rec
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CertifiedRelaxation {
    Standard,
    Flower,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    pub relaxation: CertifiedRelaxation,
    /// No corrupted entries: optimality always holds and uniqueness holds
    /// iff every factor is nonzero.
    pub noiseless: bool,
    pub factors_nonzero: bool,
    pub conditions: Vec<ConditionRecord>,
}

impl CertificateReport {
    /// The sufficient conditions for optimality of the ground truth.
    pub fn holds(&self) -> bool {
        if self.noiseless {
            return true;
        }
        self.conditions.iter().all(|c| c.holds)
    }

    /// The sufficient conditions for the ground truth being the unique
    /// optimum.
    pub fn all_strict(&self) -> bool {
        if self.noiseless {
            return self.factors_nonzero;
        }
        self.conditions.iter().all(|c| c.holds && (!c.strict_required || c.holds_strictly))
    }

    pub fn condition(&self, id: &str) -> Option<&ConditionRecord> {
        self.conditions.iter().find(|c| c.id == id)
    }
}

impl fmt::Display for CertificateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.relaxation {
            CertifiedRelaxation::Standard => "standard",
            CertifiedRelaxation::Flower => "flower",
        };
        writeln!(f, "relaxation: {name}")?;
        writeln!(f, "noiseless: {}", self.noiseless)?;
        writeln!(f, "holds: {}", self.holds())?;
        writeln!(f, "all_strict: {}", self.all_strict())?;
        for c in &self.conditions {
            let slack = c.min_slack.map_or_else(|| "-".into(), |s| format!("{s:.6}"));
            write!(
                f,
                "condition {}: instances={} holds={} strict={} strict_required={} min_slack={}",
                c.id, c.instances, c.holds, c.holds_strictly, c.strict_required, slack
            )?;
            if !c.violations.is_empty() {
                write!(f, " violations=")?;
                for (n, s) in c.violations.iter().enumerate() {
                    write!(f, "{}{}", if n > 0 { ";" } else { "" }, s)?;
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn int(v: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Every zero-index of a nonzero-free mode must see at least one corrupted
/// entry in its slice.
fn condition_false_present(s: &RecoveryStats) -> ConditionRecord {
    let mut tr = Tracker::new("c1-1", false);
    for t in 0..3 {
        for idx in 0..s.extent(t) {
            if !s.truth[t][idx] {
                tr.push(Site::Index { mode: t as u8, index: idx }, Some(int(s.f_total(t, idx))), true);
            }
        }
    }
    tr.finish()
}

/// `T_11 ≥ F_00/3 + (F_01 + F_10)/2 + F_11` at every zero-index.
fn condition_nc1(s: &RecoveryStats) -> ConditionRecord {
    let mut tr = Tracker::new("nc1", true);
    for t in 0..3 {
        for idx in 0..s.extent(t) {
            if !s.truth[t][idx] {
                let slack = int(s.t(t, idx, 1, 1)) - s.weighted_false(t, idx);
                tr.push(Site::Index { mode: t as u8, index: idx }, Some(slack), false);
            }
        }
    }
    tr.finish()
}


fn truth_at(s: &RecoveryStats, c: [usize; 3]) -> [bool; 3] {
    [s.truth[0][c[0]], s.truth[1][c[1]], s.truth[2][c[2]]]
}

/// Pair tally along mode `t` through entry `c`.
fn pair_through(s: &RecoveryStats, t: usize, c: [usize; 3], r: usize) -> u64 {
    let (u, v) = other_modes(t);
    s.pair(t, c[u], c[v], r)
}

/// Zero ratios of every zero-index; `None` where undefined or at one-indices.
fn zero_ratios(s: &RecoveryStats) -> [Vec<Option<BigRational>>; 3] {
    core::array::from_fn(|t| {
        (0..s.extent(t)).map(|idx| if s.truth[t][idx] { None } else { s.zero_ratio(t, idx) }).collect()
    })
}

/// For every one-index, `T_11/3 − F_11 − Σ` of the zero ratios over the
/// agreeing entries of its slice whose other two coordinates hold exactly one
/// zero; `None` when a needed ratio is undefined.
fn nc4_slacks(s: &RecoveryStats, ratios: &[Vec<Option<BigRational>>; 3]) -> [Vec<Option<BigRational>>; 3] {
    let d = s.dims;
    let mut out: [Vec<Option<BigRational>>; 3] = core::array::from_fn(|t| {
        (0..s.extent(t))
            .map(|idx| s.truth[t][idx].then(|| rat(s.t(t, idx, 1, 1), 3) - int(s.f(t, idx, 1, 1))))
            .collect()
    });
    for idx in 0..d.len() {
        if !s.agreeing.get(idx) {
            continue;
        }
        let (i, j, k) = d.coords(idx);
        let c = [i, j, k];
        let vals = truth_at(s, c);
        if vals.iter().filter(|&&b| !b).count() != 1 {
            continue;
        }
        let zm = vals.iter().position(|&b| !b).unwrap_or(0);
        let ratio = &ratios[zm][c[zm]];
        for t in (0..3).filter(|&t| t != zm) {
            let cell = &mut out[t][c[t]];
            *cell = match (cell.take(), ratio) {
                (Some(acc), Some(r)) => Some(acc - r),
                _ => None,
            };
        }
    }
    out
}

/// Checks the sufficient conditions for the ground truth to be an optimum
/// (and, strictly, the unique optimum) of the standard relaxation.
pub fn check_deter1(s: &RecoveryStats) -> CertificateReport {
    let factors_nonzero = (0..3).all(|t| s.support(t) > 0);
    if s.corrupted == 0 {
        return CertificateReport {
            relaxation: CertifiedRelaxation::Standard,
            noiseless: true,
            factors_nonzero,
            conditions: Vec::new(),
        };
    }
    let ratios = zero_ratios(s);
    let slacks = nc4_slacks(s, &ratios);
    let mut nc4 = Tracker::new("nc4", true);
    for (t, per_mode) in slacks.into_iter().enumerate() {
        for (idx, slack) in per_mode.into_iter().enumerate() {
            if s.truth[t][idx] {
                nc4.push(Site::Index { mode: t as u8, index: idx }, slack, false);
            }
        }
    }
    CertificateReport {
        relaxation: CertifiedRelaxation::Standard,
        noiseless: false,
        factors_nonzero,
        conditions: vec![condition_false_present(s), condition_nc1(s), nc4.finish()],
    }
}

/// Default constant of the triple-tally condition of the flower relaxation;
/// any value below one works, closer to one is weaker.
pub const DEFAULT_FLOWER_ALPHA: f64 = 0.99;

/// Checks the sufficient conditions for the ground truth to be an optimum
/// (and, strictly, the unique optimum) of the flower relaxation, with the
/// triple-tally constant `alpha ∈ (0, 1)`.
pub fn check_deter2(s: &RecoveryStats, alpha: f64) -> Result<CertificateReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidConfig(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let factors_nonzero = (0..3).all(|t| s.support(t) > 0);
    if s.corrupted == 0 {
        return Ok(CertificateReport {
            relaxation: CertifiedRelaxation::Flower,
            noiseless: true,
            factors_nonzero,
            conditions: Vec::new(),
        });
    }
    let a = BigRational::from_float(alpha).ok_or_else(|| Error::InvalidConfig("alpha is not finite".into()))?;
    let d = s.dims;
    let ext = d.extents();

    // Pairs whose two truth values are one must see an agreeing one-entry.
    let mut c21 = Tracker::new("c2-1", false);
    for t in 0..3 {
        let (u, v) = other_modes(t);
        for a_ in 0..ext[u] {
            for b in 0..ext[v] {
                if s.truth[u][a_] && s.truth[v][b] {
                    let slack = int(s.pair(t, a_, b, 1)) - int(1);
                    c21.push(Site::Pair { mode: t as u8, a: a_, b }, Some(slack), false);
                }
            }
        }
    }

    let avg: [BigRational; 3] = core::array::from_fn(|t| s.pair_average(t));
    let mut c23 = Tracker::new("c2-3", false);
    for t in 0..3 {
        for idx in 0..ext[t] {
            if !s.truth[t][idx] {
                let slack = int(s.triple(t, idx, 1, 1, 1)) - &a * int(s.t(t, idx, 1, 1)) * &avg[t];
                c23.push(Site::Index { mode: t as u8, index: idx }, Some(slack), false);
            }
        }
    }

    let ratios = zero_ratios(s);
    let mut aa1 = Tracker::new("aa1", true);
    let mut newass = Tracker::new("newass", true);
    // Per fiber along mode t: Σ of zero ratios over its agreeing zero-index
    // entries; `None` when one of them is undefined.
    let mut fiber: [Vec<Option<BigRational>>; 3] = core::array::from_fn(|t| {
        let (u, v) = other_modes(t);
        vec![Some(BigRational::zero()); ext[u] * ext[v]]
    });
    for idx in 0..d.len() {
        if !s.agreeing.get(idx) {
            continue;
        }
        let (i, j, k) = d.coords(idx);
        let c = [i, j, k];
        for t in 0..3 {
            if s.truth[t][c[t]] {
                continue;
            }
            let (u, v) = other_modes(t);
            let cell = &mut fiber[t][c[u] * ext[v] + c[v]];
            *cell = match (cell.take(), &ratios[t][c[t]]) {
                (Some(acc), Some(r)) => Some(acc + r),
                _ => None,
            };
        }
    }
    let third = rat(1, 3);
    for idx in 0..d.len() {
        if !s.agreeing.get(idx) {
            continue;
        }
        let (i, j, k) = d.coords(idx);
        let c = [i, j, k];
        let site = Site::Entry { i, j, k };
        let vals = truth_at(s, c);
        let zeros = vals.iter().filter(|&&b| !b).count();
        if zeros == 1 {
            let t = vals.iter().position(|&b| !b).unwrap_or(0);
            let wf = s.weighted_false(t, c[t]);
            let t11 = int(s.t(t, c[t], 1, 1));
            let p1 = pair_through(s, t, c, 1);
            // A zero pair tally leaves the second term unbounded.
            let lhs = if p1 == 0 {
                t11
            } else {
                let q = int(s.triple(t, c[t], 1, 1, 1)) / int(p1);
                if q < t11 { q } else { t11 }
            };
            aa1.push(site, Some(lhs - wf), false);
        } else if zeros == 0 {
            newass.push(site, newass_slack(s, c, &a, &avg, &fiber, &third), false);
        }
    }

    Ok(CertificateReport {
        relaxation: CertifiedRelaxation::Flower,
        noiseless: false,
        factors_nonzero,
        conditions: vec![condition_false_present(s), c21.finish(), c23.finish(), aa1.finish(), newass.finish()],
    })
}

/// `3γ̄ − max_t F^t_11 / T^t_11` at an agreeing entry with all truth values
/// one; `None` when a denominator vanishes.
fn newass_slack(
    s: &RecoveryStats,
    c: [usize; 3],
    alpha: &BigRational,
    avg: &[BigRational; 3],
    fiber: &[Vec<Option<BigRational>>; 3],
    third: &BigRational,
) -> Option<BigRational> {
    let ext = s.dims.extents();
    let mut g3 = int(2);
    for t in 0..3 {
        let p1 = pair_through(s, t, c, 1);
        if p1 == 0 {
            return None;
        }
        g3 -= third * int(s.support(t) as u64) / int(p1);
        let (u, v) = other_modes(t);
        let sum = fiber[t][c[u] * ext[v] + c[v]].as_ref()?;
        if !sum.is_zero() {
            if avg[t].is_zero() {
                return None;
            }
            g3 -= sum / (alpha * &avg[t]);
        }
    }
    let mut worst = BigRational::zero();
    for t in 0..3 {
        // T_11 counts this entry, so it is positive.
        let r = int(s.f(t, c[t], 1, 1)) / int(s.t(t, c[t], 1, 1));
        if r > worst {
            worst = r;
        }
    }
    Some(g3 - worst)
}

/// The explicit dual point of the standard relaxation. Per-entry arrays are
/// indexed by linear entry index and are zero outside their row set.
#[derive(Debug, Clone, PartialEq)]
pub struct DualCertificateSlp {
    pub dims: Dims,
    /// `true` where the entry is a one of the data (the `S_1` rows).
    pub s1: BitVector,
    pub lambda: Vec<[f64; 3]>,
    pub mu: Vec<[f64; 2]>,
    pub u: [Vec<f64>; 3],
    pub l: [Vec<f64>; 3],
}

impl DualCertificateSlp {
    /// `|S_1| − 2 Σ μ² − Σ u`.
    pub fn objective(&self) -> f64 {
        let s1 = self.s1.count_ones() as f64;
        let mu2: f64 = self.mu.iter().map(|m| m[1]).sum();
        let u: f64 = self.u.iter().flatten().sum();
        s1 - 2.0 * mu2 - u
    }
}

/// Builds the dual point of the standard relaxation that certifies the
/// optimality of `truth` for data `g`.
pub fn build_dual_certificate_slp(
    truth: &FactorTriple,
    g: &BinaryTensor,
    stats: &RecoveryStats,
) -> Result<DualCertificateSlp> {
    let d = truth.dims();
    d.ensure_eq(&g.dims())?;
    d.ensure_eq(&stats.dims)?;
    let report = check_deter1(stats);
    if !report.holds() {
        let failed: Vec<&str> = report.conditions.iter().filter(|c| !c.holds).map(|c| c.id).collect();
        return Err(Error::CertificatePrecondition(format!("conditions {failed:?} fail")));
    }
    let ext = d.extents();
    // Multipliers of the zero-indices; zero in the noiseless case.
    let ratio: [Vec<f64>; 3] = core::array::from_fn(|t| {
        (0..ext[t])
            .map(|idx| {
                if stats.truth[t][idx] {
                    0.0
                } else {
                    stats.zero_ratio(t, idx).as_ref().map_or(0.0, rat_f64)
                }
            })
            .collect()
    });
    let mut s1 = BitVector::zeros(d.len());
    let mut lambda = vec![[0.0; 3]; d.len()];
    let mut mu = vec![[0.0; 2]; d.len()];
    let mut lam_sum: [Vec<f64>; 3] = core::array::from_fn(|t| vec![0.0; ext[t]]);
    let mut mu_sum = lam_sum.clone();
    for idx in 0..d.len() {
        let (i, j, k) = d.coords(idx);
        let c = [i, j, k];
        let vals = truth_at(stats, c);
        let positive = vals.iter().all(|&b| b);
        let one = g.get_linear(idx);
        if one {
            s1.set(idx, true);
            let lam = if positive {
                [1.0 / 3.0; 3]
            } else {
                let zeros = vals.iter().filter(|&&b| !b).count() as f64;
                core::array::from_fn(|t| if vals[t] { 0.0 } else { 1.0 / zeros })
            };
            for t in 0..3 {
                lam_sum[t][c[t]] += lam[t];
            }
            lambda[idx] = lam;
        } else {
            let mu2 = if positive {
                1.0
            } else {
                let zeros: Vec<usize> = (0..3).filter(|&t| !vals[t]).collect();
                if zeros.len() == 1 { ratio[zeros[0]][c[zeros[0]]] } else { 0.0 }
            };
            for t in 0..3 {
                mu_sum[t][c[t]] += mu2;
            }
            mu[idx] = [1.0 - mu2, mu2];
        }
    }
    let l: [Vec<f64>; 3] = core::array::from_fn(|t| vec![0.0; ext[t]]);
    // At one-indices `u` absorbs the balance of the index equation; at
    // zero-indices the multiplier choice already balances it.
    let u: [Vec<f64>; 3] = core::array::from_fn(|t| {
        (0..ext[t])
            .map(|idx| if stats.truth[t][idx] { lam_sum[t][idx] - mu_sum[t][idx] } else { 0.0 })
            .collect()
    });
    Ok(DualCertificateSlp { dims: d, s1, lambda, mu, u, l })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificateCheck {
    /// Largest residual of the index equations and the per-row sums.
    pub max_residual: f64,
    /// Most negative dual value, or zero.
    pub min_value: f64,
    /// Largest product of a dual value and its primal slack at the truth.
    pub max_complementarity: f64,
    pub dual_objective: f64,
    /// `|F|`, the objective of the truth.
    pub primal_objective: f64,
}

impl CertificateCheck {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_residual <= tol
            && self.min_value >= -tol
            && self.max_complementarity <= tol
            && (self.dual_objective - self.primal_objective).abs() <= tol * (1.0 + self.primal_objective)
    }
}

/// Measures feasibility of `cert` for the dual of the standard relaxation
/// of `g` and its complementarity with the point of `truth`.
pub fn verify_dual_certificate_slp(
    cert: &DualCertificateSlp,
    truth: &FactorTriple,
    g: &BinaryTensor,
) -> Result<CertificateCheck> {
    let d = cert.dims;
    d.ensure_eq(&truth.dims())?;
    d.ensure_eq(&g.dims())?;
    let ext = d.extents();
    let tv: [Vec<bool>; 3] = core::array::from_fn(|t| truth.factor(t).to_bools());
    let mut res: f64 = 0.0;
    let mut min: f64 = 0.0;
    let mut comp: f64 = 0.0;
    let mut balance: [Vec<f64>; 3] = core::array::from_fn(|t| vec![0.0; ext[t]]);
    let mut corrupted = 0usize;
    for idx in 0..d.len() {
        let (i, j, k) = d.coords(idx);
        let c = [i, j, k];
        let x = [tv[0][i], tv[1][j], tv[2][k]].map(|b| b as u8 as f64);
        let w = x[0] * x[1] * x[2];
        let one = g.get_linear(idx);
        if one != cert.s1.get(idx) {
            return Err(Error::DimensionMismatch { expected: "row sets of g".into(), found: "certificate rows".into() });
        }
        if one {
            corrupted += usize::from(w == 0.0);
            let lam = cert.lambda[idx];
            res = res.max((lam.iter().sum::<f64>() - 1.0).abs());
            for t in 0..3 {
                min = min.min(lam[t]);
                comp = comp.max((lam[t] * (x[t] - w)).abs());
                balance[t][c[t]] -= lam[t];
            }
            if cert.mu[idx] != [0.0; 2] {
                res = res.max(cert.mu[idx][0].abs().max(cert.mu[idx][1].abs()));
            }
        } else {
            corrupted += usize::from(w == 1.0);
            let m = cert.mu[idx];
            res = res.max((m[0] + m[1] - 1.0).abs());
            min = min.min(m[0]).min(m[1]);
            comp = comp.max((m[0] * w).abs());
            comp = comp.max((m[1] * (w - x[0] - x[1] - x[2] + 2.0)).abs());
            for t in 0..3 {
                balance[t][c[t]] += m[1];
            }
            if cert.lambda[idx] != [0.0; 3] {
                res = res.max(cert.lambda[idx].iter().fold(0.0, |a: f64, v| a.max(v.abs())));
            }
        }
    }
    for t in 0..3 {
        for idx in 0..ext[t] {
            let (u, l) = (cert.u[t][idx], cert.l[t][idx]);
            let xv = tv[t][idx] as u8 as f64;
            res = res.max((balance[t][idx] + u - l).abs());
            min = min.min(u).min(l);
            comp = comp.max((u * (1.0 - xv)).abs()).max((l * xv).abs());
        }
    }
    Ok(CertificateCheck {
        max_residual: res,
        min_value: min,
        max_complementarity: comp,
        dual_objective: cert.objective(),
        primal_objective: corrupted as f64,
    })
}
