//! Enumeration checks of the facet description of the multilinear polytope
//! of the six-node building-block hypergraph, and of its lifting to the
//! hypergraph of rank-one tensors.
//!
//! Points are 0/1 vectors `(u, w)` with `w_e = Π_{v ∈ e} u_v`; every rank
//! is computed by fraction-free integer elimination.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::lp::{LpModel, RowKind, Sense};
use crate::rng::{below, rng_from_seed};
use crate::solver::{solve, SolverConfig};
use crate::tensor::Dims;
use crate::{Error, Result};

/// Largest node count accepted by the enumeration.
pub const MAX_ENUMERATION_NODES: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    nodes: usize,
    edges: Vec<Vec<usize>>,
}

impl Hypergraph {
    /// Edges must have at least two distinct in-range members and be
    /// pairwise distinct as sets.
    pub fn new(nodes: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen: Vec<Vec<usize>> = Vec::with_capacity(edges.len());
        for e in &edges {
            let mut s = e.clone();
            s.sort_unstable();
            s.dedup();
            if s.len() != e.len() || s.len() < 2 || s.iter().any(|&v| v >= nodes) {
                return Err(Error::InvalidConfig(format!("bad edge {e:?} on {nodes} nodes")));
            }
            if seen.contains(&s) {
                return Err(Error::InvalidConfig(format!("duplicate edge {e:?}")));
            }
            seen.push(s);
        }
        Ok(Self { nodes, edges })
    }

    /// Nodes `v_1..v_6` (indices 0..6) and edges `e_0 = {v_1, v_3, v_5}`,
    /// `e_1 = {v_1, v_3, v_6}`, `e_2 = {v_2, v_3, v_5}`, `e_3 = {v_1, v_4, v_5}`.
    pub fn building_block() -> Self {
        Self { nodes: 6, edges: vec![vec![0, 2, 4], vec![0, 2, 5], vec![1, 2, 4], vec![0, 3, 4]] }
    }

    /// The tripartite hypergraph of rank-one tensors: nodes `x` then `y`
    /// then `z`, one edge per entry in linear entry order.
    pub fn rank_one(d: Dims) -> Self {
        let [n, m, _] = d.extents();
        let edges = (0..d.len())
            .map(|idx| {
                let (i, j, k) = d.coords(idx);
                vec![i, n + j, n + m + k]
            })
            .collect();
        Self { nodes: n + m + d.extents()[2], edges }
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    /// Length of a point `(u, w)`.
    pub fn space_dim(&self) -> usize {
        self.nodes + self.edges.len()
    }
}

/// `Σ u_coef·u + Σ w_coef·w ≤ rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearInequality {
    pub u: Vec<i64>,
    pub w: Vec<i64>,
    pub rhs: i64,
}

impl LinearInequality {
    pub fn zero(h: &Hypergraph) -> Self {
        Self { u: vec![0; h.nodes], w: vec![0; h.edges.len()], rhs: 0 }
    }

    /// `rhs − lhs` at `point`.
    pub fn slack(&self, point: &[u8]) -> i64 {
        let nu = self.u.len();
        let lhs: i64 = self.u.iter().zip(&point[..nu]).map(|(c, &p)| c * p as i64).sum::<i64>()
            + self.w.iter().zip(&point[nu..]).map(|(c, &p)| c * p as i64).sum::<i64>();
        self.rhs - lhs
    }

    pub fn negated(&self) -> Self {
        Self { u: self.u.iter().map(|c| -c).collect(), w: self.w.iter().map(|c| -c).collect(), rhs: -self.rhs }
    }

    fn fits(&self, h: &Hypergraph) -> bool {
        self.u.len() == h.nodes && self.w.len() == h.edges.len()
    }
}

/// All `2^|V|` points of the multilinear set of `h`, `u` first.
pub fn enumerate_multilinear_set(h: &Hypergraph) -> Result<Vec<Vec<u8>>> {
    if h.nodes > MAX_ENUMERATION_NODES {
        return Err(Error::TooLarge(h.nodes));
    }
    Ok((0u32..1 << h.nodes)
        .map(|mask| {
            let mut p: Vec<u8> = (0..h.nodes).map(|v| (mask >> v & 1) as u8).collect();
            for e in &h.edges {
                p.push(e.iter().all(|&v| mask >> v & 1 == 1) as u8);
            }
            p
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Validation {
    pub valid: bool,
    pub min_slack: i64,
    pub tight_count: usize,
    /// A point violating the inequality, if any.
    pub witness: Option<Vec<u8>>,
}

pub fn validate_inequality(h: &Hypergraph, ineq: &LinearInequality) -> Result<Validation> {
    if !ineq.fits(h) {
        return Err(Error::DimensionMismatch {
            expected: format!("{} u and {} w coefficients", h.nodes, h.edges.len()),
            found: format!("{} and {}", ineq.u.len(), ineq.w.len()),
        });
    }
    let points = enumerate_multilinear_set(h)?;
    let mut out = Validation { valid: true, min_slack: i64::MAX, tight_count: 0, witness: None };
    for p in points {
        let s = ineq.slack(&p);
        out.min_slack = out.min_slack.min(s);
        out.tight_count += usize::from(s == 0);
        if s < 0 && out.witness.is_none() {
            out.valid = false;
            out.witness = Some(p);
        }
    }
    Ok(out)
}

/// Number of affinely independent points among `points` (one more than the
/// dimension of their affine hull; zero for no points).
pub fn affine_rank(points: &[Vec<u8>]) -> usize {
    // Rank of the rows (p, 1) by Bareiss elimination.
    let mut rows: Vec<Vec<BigInt>> =
        points.iter().map(|p| p.iter().map(|&v| BigInt::from(v)).chain([BigInt::from(1)]).collect()).collect();
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = BigInt::from(1);
    for c in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, piv);
        // Every remaining row is rescaled, so all of them share the
        // divisor `prev` of the next step.
        for r in rank + 1..rows.len() {
            for cc in c + 1..cols {
                let v = (&rows[rank][c] * &rows[r][cc] - &rows[r][c] * &rows[rank][cc]) / &prev;
                rows[r][cc] = v;
            }
            rows[r][c] = BigInt::zero();
        }
        prev = rows[rank][c].clone();
        rank += 1;
    }
    rank
}

/// Dimension of the multilinear polytope of `h`.
pub fn polytope_dimension(h: &Hypergraph) -> Result<usize> {
    Ok(affine_rank(&enumerate_multilinear_set(h)?) - 1)
}

/// Affine rank of the points of `h` on which `ineq` is tight. The
/// inequality defines a facet iff this equals the polytope dimension.
pub fn facet_rank(h: &Hypergraph, ineq: &LinearInequality) -> Result<usize> {
    if !validate_inequality(h, ineq)?.valid {
        return Err(Error::InvalidInequality);
    }
    let tight: Vec<Vec<u8>> = enumerate_multilinear_set(h)?.into_iter().filter(|p| ineq.slack(p) == 0).collect();
    Ok(affine_rank(&tight))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FacetFamily {
    /// `w_e ≤ u_v`.
    EdgeUpper,
    /// `w_e ≥ 0`.
    EdgeNonnegative,
    /// `Σ_{v ∈ e} u_v − w_e ≤ 2`.
    EdgeLower,
    /// `u_v ≤ 1`.
    NodeUpper,
    /// `u_{e_0 \ e} + w_e − w_{e_0} ≤ 1`.
    FlowerInner,
    /// `u_{e \ e_0} − w_e + w_{e_0} ≤ 1`.
    FlowerOuter,
    /// `−u_{e ∩ e'} + w_e + w_{e'} − w_{e_0} ≤ 0`.
    RunningIntersection,
    /// `Σ u − Σ_{e ≠ e_0} w_e + w_{e_0} ≤ 4`.
    FourTerm,
}

impl FacetFamily {
    pub fn name(self) -> &'static str {
        match self {
            FacetFamily::EdgeUpper => "edge-upper",
            FacetFamily::EdgeNonnegative => "edge-nonnegative",
            FacetFamily::EdgeLower => "edge-lower",
            FacetFamily::NodeUpper => "node-upper",
            FacetFamily::FlowerInner => "flower-inner",
            FacetFamily::FlowerOuter => "flower-outer",
            FacetFamily::RunningIntersection => "running-intersection",
            FacetFamily::FourTerm => "four-term",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FacetRow {
    pub family: FacetFamily,
    pub label: String,
    pub ineq: LinearInequality,
}

/// The 36 rows of the facet description of the building-block polytope.
pub fn building_block_facets() -> Vec<FacetRow> {
    let h = Hypergraph::building_block();
    let e = h.edges.clone();
    let mut rows = Vec::new();
    let mut push = |family, label: String, ineq| rows.push(FacetRow { family, label, ineq });
    for (ei, edge) in e.iter().enumerate() {
        for &v in edge {
            let mut q = LinearInequality::zero(&h);
            q.w[ei] = 1;
            q.u[v] = -1;
            push(FacetFamily::EdgeUpper, format!("w_e{ei} <= u_v{}", v + 1), q);
        }
    }
    for (ei, edge) in e.iter().enumerate() {
        let mut q = LinearInequality::zero(&h);
        q.w[ei] = -1;
        push(FacetFamily::EdgeNonnegative, format!("w_e{ei} >= 0"), q);
        let mut q = LinearInequality::zero(&h);
        for &v in edge {
            q.u[v] = 1;
        }
        q.w[ei] = -1;
        q.rhs = 2;
        push(FacetFamily::EdgeLower, format!("sum u_e{ei} - w_e{ei} <= 2"), q);
    }
    for v in 0..h.nodes {
        let mut q = LinearInequality::zero(&h);
        q.u[v] = 1;
        q.rhs = 1;
        push(FacetFamily::NodeUpper, format!("u_v{} <= 1", v + 1), q);
    }
    let minus = |a: &[usize], b: &[usize]| -> Vec<usize> { a.iter().copied().filter(|v| !b.contains(v)).collect() };
    for ei in 1..4 {
        let mut q = LinearInequality::zero(&h);
        for v in minus(&e[0], &e[ei]) {
            q.u[v] += 1;
        }
        q.w[ei] = 1;
        q.w[0] = -1;
        q.rhs = 1;
        push(FacetFamily::FlowerInner, format!("u(e0 - e{ei}) + w_e{ei} - w_e0 <= 1"), q);
    }
    for ei in 1..4 {
        let mut q = LinearInequality::zero(&h);
        for v in minus(&e[ei], &e[0]) {
            q.u[v] += 1;
        }
        q.w[ei] = -1;
        q.w[0] = 1;
        q.rhs = 1;
        push(FacetFamily::FlowerOuter, format!("u(e{ei} - e0) - w_e{ei} + w_e0 <= 1"), q);
    }
    for a in 1..4 {
        for b in a + 1..4 {
            let mut q = LinearInequality::zero(&h);
            for &v in e[a].iter().filter(|v| e[b].contains(v)) {
                q.u[v] -= 1;
            }
            q.w[a] = 1;
            q.w[b] = 1;
            q.w[0] = -1;
            push(FacetFamily::RunningIntersection, format!("-u(e{a} & e{b}) + w_e{a} + w_e{b} - w_e0 <= 0"), q);
        }
    }
    let mut q = LinearInequality::zero(&h);
    q.u.iter_mut().for_each(|c| *c = 1);
    q.w = vec![1, -1, -1, -1];
    q.rhs = 4;
    push(FacetFamily::FourTerm, "sum u - w_e1 - w_e2 - w_e3 + w_e0 <= 4".into(), q);
    rows
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompletenessReport {
    pub trials: usize,
    /// Optima that are points of the multilinear set.
    pub integral: usize,
    /// Optima whose objective matches the best point of the set.
    pub optimal: usize,
}

impl CompletenessReport {
    pub fn passes(&self) -> bool {
        self.integral == self.trials && self.optimal == self.trials
    }
}

/// Minimizes `trials` random objectives with entries in `{-50..50}/50`
/// over the building-block facet description and checks each optimum
/// against the enumerated set.
pub fn completeness_check(trials: usize, seed: u64) -> Result<CompletenessReport> {
    let h = Hypergraph::building_block();
    let rows = building_block_facets();
    let points = enumerate_multilinear_set(&h)?;
    let dim = h.space_dim();
    let mut model = LpModel::new(dim);
    // The box is looser than the bounds the description implies, so it
    // never decides a vertex.
    model.lower.iter_mut().for_each(|v| *v = -1.0);
    model.upper.iter_mut().for_each(|v| *v = 2.0);
    for r in &rows {
        let coeffs: Vec<(usize, f64)> =
            r.ineq.u.iter().chain(&r.ineq.w).enumerate().filter(|(_, &c)| c != 0).map(|(j, &c)| (j, c as f64)).collect();
        model.add_row(&coeffs, Sense::Le, r.ineq.rhs as f64, RowKind::Other);
    }
    let cfg = SolverConfig { perturb: false, ..SolverConfig::default() };
    let mut rng = rng_from_seed(seed);
    let mut report = CompletenessReport { trials, integral: 0, optimal: 0 };
    for _ in 0..trials {
        let c: Vec<i64> = (0..dim).map(|_| below(&mut rng, 101) as i64 - 50).collect();
        model.objective = c.iter().map(|&v| v as f64 / 50.0).collect();
        let sol = solve(&model, &cfg)?;
        if !sol.is_optimal() {
            return Err(Error::NotOptimal("facet description LP"));
        }
        let rounded: Vec<u8> = sol.primal.iter().map(|&v| libm::round(v).clamp(0.0, 1.0) as u8).collect();
        let close = sol.primal.iter().zip(&rounded).all(|(&v, &r)| (v - r as f64).abs() <= 1e-9);
        if close && points.contains(&rounded) {
            report.integral += 1;
        }
        let best = points.iter().map(|p| p.iter().zip(&c).map(|(&v, &w)| v as i64 * w).sum::<i64>()).min();
        if best.is_some_and(|b| (sol.objective - b as f64 / 50.0).abs() <= 1e-9) {
            report.optimal += 1;
        }
    }
    Ok(report)
}

/// Assignment of the building-block nodes to tensor indices: `v_1, v_2` to
/// `x[0], x[1]`, `v_3, v_4` to `y[0], y[1]` and `v_5, v_6` to `z[0], z[1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Embedding {
    pub x: [usize; 2],
    pub y: [usize; 2],
    pub z: [usize; 2],
}

impl Embedding {
    fn check(&self, d: Dims) -> Result<()> {
        let ext = d.extents();
        for (t, pair) in [self.x, self.y, self.z].iter().enumerate() {
            if pair[0] == pair[1] || pair[0] >= ext[t] || pair[1] >= ext[t] {
                return Err(Error::InvalidConfig(format!("bad embedding {self:?} for {ext:?}")));
            }
        }
        Ok(())
    }
}

fn ordered_pairs(n: usize) -> Vec<[usize; 2]> {
    (0..n).flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| [a, b])).collect()
}

/// Every embedding into `d`.
pub fn all_embeddings(d: Dims) -> Vec<Embedding> {
    let ext = d.extents();
    let mut out = Vec::new();
    for &x in &ordered_pairs(ext[0]) {
        for &y in &ordered_pairs(ext[1]) {
            for &z in &ordered_pairs(ext[2]) {
                out.push(Embedding { x, y, z });
            }
        }
    }
    out
}

/// `count` embeddings drawn uniformly with replacement.
pub fn sample_embeddings(d: Dims, count: usize, seed: u64) -> Vec<Embedding> {
    let mut rng = rng_from_seed(seed);
    let ext = d.extents();
    let mut pair = |n: usize| {
        let a = below(&mut rng, n as u64) as usize;
        let b = (a + 1 + below(&mut rng, n as u64 - 1) as usize) % n;
        [a, b]
    };
    (0..count).map(|_| Embedding { x: pair(ext[0]), y: pair(ext[1]), z: pair(ext[2]) }).collect()
}

/// Zero-extends a building-block inequality to the rank-one hypergraph of
/// `d` under `emb`.
pub fn lift(ineq: &LinearInequality, d: Dims, emb: &Embedding) -> Result<LinearInequality> {
    emb.check(d)?;
    let h = Hypergraph::rank_one(d);
    let [n, m, _] = d.extents();
    let node = [emb.x[0], emb.x[1], n + emb.y[0], n + emb.y[1], n + m + emb.z[0], n + m + emb.z[1]];
    let mut out = LinearInequality::zero(&h);
    for (v, &c) in ineq.u.iter().enumerate() {
        out.u[node[v]] += c;
    }
    for (e, edge) in Hypergraph::building_block().edges.iter().enumerate() {
        // Each building-block edge takes one node per mode, in mode order.
        let (i, j, k) = (node[edge[0]], node[edge[1]] - n, node[edge[2]] - n - m);
        out.w[d.index(i, j, k)] += ineq.w[e];
    }
    out.rhs = ineq.rhs;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftRecord {
    pub family: FacetFamily,
    pub label: String,
    pub embedding: Embedding,
    pub valid: bool,
    /// Dimension of the face the lifted row defines.
    pub face_dim: usize,
    pub facet: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftingReport {
    pub dims: Dims,
    pub polytope_dim: usize,
    pub records: Vec<LiftRecord>,
}

impl LiftingReport {
    pub fn all_facets(&self) -> bool {
        self.records.iter().all(|r| r.valid && r.facet)
    }
}

/// Lifts every building-block facet under each embedding and checks that
/// the result is valid and facet-defining for the rank-one polytope of `d`.
pub fn verify_lifting(d: Dims, embeddings: &[Embedding]) -> Result<LiftingReport> {
    let ext = d.extents();
    if ext.iter().any(|&e| e < 2) {
        return Err(Error::InvalidConfig("every extent must be at least 2".into()));
    }
    let h = Hypergraph::rank_one(d);
    let points = enumerate_multilinear_set(&h)?;
    let polytope_dim = affine_rank(&points) - 1;
    let mut records = Vec::new();
    for row in building_block_facets() {
        for emb in embeddings {
            let q = lift(&row.ineq, d, emb)?;
            let valid = points.iter().all(|p| q.slack(p) >= 0);
            let face_dim = if valid {
                let tight: Vec<Vec<u8>> = points.iter().filter(|p| q.slack(p) == 0).cloned().collect();
                affine_rank(&tight).saturating_sub(1)
            } else {
                0
            };
            records.push(LiftRecord {
                family: row.family,
                label: row.label.clone(),
                embedding: *emb,
                valid,
                face_dim,
                facet: valid && face_dim + 1 == polytope_dim,
            });
        }
    }
    Ok(LiftingReport { dims: d, polytope_dim, records })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Rank over the rationals by plain Gaussian elimination, as an oracle
    /// for the fraction-free routine.
    fn rational_rank(points: &[Vec<u8>]) -> usize {
        use num_rational::BigRational;
        let mut rows: Vec<Vec<BigRational>> = points
            .iter()
            .map(|p| p.iter().map(|&v| BigRational::from_integer(v.into())).chain([BigRational::from_integer(1.into())]).collect())
            .collect();
        let cols = rows.first().map_or(0, Vec::len);
        let mut rank = 0;
        for c in 0..cols {
            let Some(piv) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else { continue };
            rows.swap(rank, piv);
            for r in rank + 1..rows.len() {
                let f = &rows[r][c] / &rows[rank][c];
                for cc in c..cols {
                    let v = &rows[r][cc] - &f * &rows[rank][cc];
                    rows[r][cc] = v;
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn enumeration_sizes() {
        let h = Hypergraph::building_block();
        let pts = enumerate_multilinear_set(&h).unwrap();
        assert_eq!(pts.len(), 64);
        assert_eq!(affine_rank(&pts), 11);
        let e = Hypergraph::new(2, vec![vec![0, 1]]).unwrap();
        let pts = enumerate_multilinear_set(&e).unwrap();
        assert_eq!(pts.len(), 4);
        assert!(pts.iter().all(|p| p[2] == p[0] * p[1]));
        let big = Hypergraph::new(21, vec![vec![0, 1]]).unwrap();
        assert!(matches!(enumerate_multilinear_set(&big), Err(Error::TooLarge(21))));
        assert!(Hypergraph::new(3, vec![vec![0, 3]]).is_err());
        assert!(Hypergraph::new(3, vec![vec![0, 1], vec![1, 0]]).is_err());
    }

    #[test]
    fn bareiss_matches_rational_elimination() {
        let mut rng = rng_from_seed(9);
        for _ in 0..40 {
            let rows = 1 + below(&mut rng, 14) as usize;
            let cols = 1 + below(&mut rng, 10) as usize;
            let pts: Vec<Vec<u8>> =
                (0..rows).map(|_| (0..cols).map(|_| below(&mut rng, 2) as u8).collect()).collect();
            assert_eq!(affine_rank(&pts), rational_rank(&pts));
        }
        assert_eq!(affine_rank(&[]), 0);
    }

    #[test]
    fn simple_validations() {
        let h = Hypergraph::building_block();
        let mut q = LinearInequality::zero(&h);
        q.w[0] = -1;
        assert!(validate_inequality(&h, &q).unwrap().valid);
        let mut q = LinearInequality::zero(&h);
        q.u[0] = 1;
        q.rhs = 1;
        let v = validate_inequality(&h, &q).unwrap();
        assert!(v.valid);
        assert_eq!(v.tight_count, 32);
        let flower = &building_block_facets()[26];
        assert_eq!(flower.family, FacetFamily::FlowerInner);
        let neg = validate_inequality(&h, &flower.ineq.negated()).unwrap();
        assert!(!neg.valid);
        let wit = neg.witness.unwrap();
        assert!(flower.ineq.negated().slack(&wit) < 0);
    }

    #[test]
    fn building_block_rows_are_facets() {
        let h = Hypergraph::building_block();
        let rows = building_block_facets();
        assert_eq!(rows.len(), 36);
        let count = |f| rows.iter().filter(|r| r.family == f).count();
        assert_eq!(count(FacetFamily::EdgeUpper), 12);
        assert_eq!(count(FacetFamily::EdgeNonnegative) + count(FacetFamily::EdgeLower), 8);
        assert_eq!(count(FacetFamily::NodeUpper), 6);
        assert_eq!(count(FacetFamily::RunningIntersection), 3);
        assert_eq!(polytope_dimension(&h).unwrap(), 10);
        for r in &rows {
            assert_eq!(facet_rank(&h, &r.ineq).unwrap(), 10, "{}", r.label);
        }
        let mut nonneg = LinearInequality::zero(&h);
        nonneg.u[0] = -1;
        assert!(facet_rank(&h, &nonneg).unwrap() < 10);
        assert_eq!(facet_rank(&h, &rows[26].ineq.negated()), Err(Error::InvalidInequality));
    }

    #[test]
    fn single_edge_upper_bound_is_facet() {
        let h = Hypergraph::new(2, vec![vec![0, 1]]).unwrap();
        assert_eq!(polytope_dimension(&h).unwrap(), 3);
        let q = LinearInequality { u: vec![-1, 0], w: vec![1], rhs: 0 };
        assert_eq!(facet_rank(&h, &q).unwrap(), 3);
    }

    #[test]
    fn description_is_complete() {
        let r = completeness_check(200, 5).unwrap();
        assert!(r.passes(), "{r:?}");
    }

    #[test]
    fn lifting_at_smallest_shape() {
        let d = Dims::cube(2).unwrap();
        let embs = all_embeddings(d);
        assert_eq!(embs.len(), 8);
        let rep = verify_lifting(d, &embs).unwrap();
        assert_eq!(rep.polytope_dim, 14);
        assert_eq!(rep.records.len(), 36 * 8);
        for r in &rep.records {
            assert!(r.valid && r.face_dim == 13, "{} {:?}", r.label, r.embedding);
        }
    }

    #[test]
    fn lifting_identity_embedding_keeps_coefficients() {
        let d = Dims::cube(2).unwrap();
        let emb = Embedding { x: [0, 1], y: [0, 1], z: [0, 1] };
        let four = building_block_facets().pop().unwrap();
        let q = lift(&four.ineq, d, &emb).unwrap();
        assert_eq!(q.u, vec![1; 6]);
        assert_eq!(q.w[d.index(0, 0, 0)], 1);
        assert_eq!(q.w[d.index(0, 0, 1)], -1);
        assert_eq!(q.w[d.index(1, 0, 0)], -1);
        assert_eq!(q.w[d.index(0, 1, 0)], -1);
        assert_eq!(q.w[d.index(1, 1, 1)], 0);
        assert!(lift(&four.ineq, d, &Embedding { x: [0, 0], y: [0, 1], z: [0, 1] }).is_err());
    }

    #[test]
    fn sampled_embeddings_are_distinct_pairs() {
        let d = Dims::new(3, 4, 2).unwrap();
        for e in sample_embeddings(d, 50, 3) {
            e.check(d).unwrap();
        }
        let rep = verify_lifting(d, &sample_embeddings(d, 2, 1)).unwrap();
        assert!(rep.records.iter().all(|r| r.valid));
    }
}
