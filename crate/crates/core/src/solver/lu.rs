//! Sparse LU factorization of simplex bases with Forrest–Tomlin updates.
//!
//! Columns are processed left-looking (Gilbert–Peierls): each column is
//! solved against the part of `L` built so far, using a depth-first search
//! to visit only the pivot steps it reaches. The pivot row is chosen among
//! entries within a factor `PIVOT_THRESHOLD` of the largest, preferring
//! rows with few nonzeros in the basis, which keeps fill low on the
//! near-triangular bases these LPs produce.
//!
//! After factorization `U` is indexed by pivot row: the column owned by row
//! `r` is the one pivoted on `r`, and `seq` lists the rows in triangular
//! order. A column replacement removes the row and column of the leaving
//! pivot, eliminates the old row against later rows (recorded as a row eta)
//! and appends the partially transformed entering column at the end of
//! `seq`. Tableau columns of these LPs are dense while the spikes `L⁻¹a` are
//! not, so this keeps updates sparse where a product-form eta file would not.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

/// Relative threshold for pivot candidates.
const PIVOT_THRESHOLD: f64 = 0.1;
/// Columns whose largest remaining entry is below this are singular.
const SINGULAR_TOL: f64 = 1e-11;
/// Entries below this magnitude are dropped.
const DROP_TOL: f64 = 1e-14;
/// Relative disagreement between the updated pivot and the tableau pivot
/// beyond which an update is refused.
const UPDATE_CHECK_TOL: f64 = 1e-8;

/// Borrowed sparse column.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ColRef<'a> {
    pub rows: &'a [u32],
    pub vals: &'a [f64],
}

/// Outcome of a factorization attempt that hit singular columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Singular {
    /// Basis positions that received no pivot.
    pub positions: Vec<usize>,
    /// Rows that received no pivot, as many as `positions`.
    pub rows: Vec<usize>,
}

/// An update whose new pivot was too small or inconsistent; refactor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct UnstableUpdate;

#[derive(Debug, Clone, Default)]
pub(crate) struct Lu {
    m: usize,
    // Everything below is indexed by elimination step. Steps `0..m` come
    // from the factorization; every update appends one.
    step_row0: Vec<u32>,
    row_step0: Vec<u32>,
    // L, nonempty columns only, by ascending pivot step.
    l_piv: Vec<u32>,
    l_start: Vec<usize>,
    l_idx: Vec<u32>,
    l_val: Vec<f64>,
    diag: Vec<f64>,
    alive: Vec<bool>,
    step_pos: Vec<u32>,
    pos_step: Vec<u32>,
    // U columns in one pool; removed entries are zeroed in place.
    ucol_start: Vec<usize>,
    u_idx: Vec<u32>,
    u_val: Vec<f64>,
    /// Per step, the `(column step, pool index)` of its row entries.
    urow: Vec<Vec<(u32, u32)>>,
    // Row etas: `w[new] = w[old] − Σ val · w[idx]`, then `w[old] = 0`.
    e_old: Vec<u32>,
    e_new: Vec<u32>,
    e_start: Vec<usize>,
    e_idx: Vec<u32>,
    e_val: Vec<f64>,
    spike: Vec<(u32, f64)>,
    spike_valid: bool,
    updates: usize,
    base_nnz: usize,
    /// Zero between calls.
    work: Vec<f64>,
    /// Zero outside `update`.
    spike_dense: Vec<f64>,
    // Factorization scratch, steps in elimination order.
    f_l_start: Vec<usize>,
    f_l_row: Vec<u32>,
    f_l_val: Vec<f64>,
    f_u_start: Vec<usize>,
    f_u_step: Vec<u32>,
    f_u_val: Vec<f64>,
    f_diag: Vec<f64>,
    f_prow: Vec<u32>,
    f_pcol: Vec<u32>,
}

impl Lu {
    pub fn num_updates(&self) -> usize {
        self.updates
    }

    /// Nonzeros of the updated factors relative to those right after
    /// factorization.
    pub fn fill_ratio(&self) -> f64 {
        (self.u_val.len() + self.e_idx.len() + self.l_val.len() + self.m) as f64 / self.base_nnz.max(1) as f64
    }

    /// Factorizes the `m × m` basis whose position `p` holds `cols[p]`.
    pub fn factorize(&mut self, m: usize, cols: &[ColRef<'_>]) -> Result<(), Singular> {
        assert_eq!(cols.len(), m);
        self.m = m;
        self.f_l_start.clear();
        self.f_l_row.clear();
        self.f_l_val.clear();
        self.f_u_start.clear();
        self.f_u_step.clear();
        self.f_u_val.clear();
        self.f_diag.clear();
        self.f_prow.clear();
        self.f_pcol.clear();
        self.f_l_start.push(0);
        self.f_u_start.push(0);
        self.work.clear();
        self.work.resize(m, 0.0);
        self.spike_dense.clear();
        self.spike_dense.resize(m, 0.0);

        let mut row_count = vec![0u32; m];
        let mut max_len = 0;
        for c in cols {
            for &r in c.rows {
                row_count[r as usize] += 1;
            }
            max_len = max_len.max(c.rows.len());
        }
        // Counting sort of positions by column length.
        let mut bucket = vec![0usize; max_len + 2];
        for c in cols {
            bucket[c.rows.len() + 1] += 1;
        }
        for i in 0..=max_len {
            bucket[i + 1] += bucket[i];
        }
        let mut order = vec![0usize; m];
        for (p, c) in cols.iter().enumerate() {
            let b = &mut bucket[c.rows.len()];
            order[*b] = p;
            *b += 1;
        }

        const NONE: u32 = u32::MAX;
        let mut row_step = vec![NONE; m];
        let mut visited = vec![u32::MAX; m];
        let mut touched_mark = vec![false; m];
        let mut touched: Vec<u32> = Vec::new();
        let mut topo: Vec<u32> = Vec::new();
        let mut stack: Vec<(u32, usize)> = Vec::new();
        let mut singular_positions = Vec::new();
        let x = &mut self.work;

        for (ci, &p) in order.iter().enumerate() {
            let col = cols[p];
            let s = self.f_prow.len();
            touched.clear();
            topo.clear();
            for (&r, &v) in col.rows.iter().zip(col.vals) {
                x[r as usize] += v;
                if !touched_mark[r as usize] {
                    touched_mark[r as usize] = true;
                    touched.push(r);
                }
            }
            // Depth-first search over pivot steps reachable from the column.
            for &r0 in col.rows {
                let st0 = row_step[r0 as usize];
                if st0 == NONE || visited[st0 as usize] == ci as u32 {
                    continue;
                }
                visited[st0 as usize] = ci as u32;
                stack.push((st0, self.f_l_start[st0 as usize]));
                while let Some(top) = stack.last_mut() {
                    let st = top.0;
                    let end = self.f_l_start[st as usize + 1];
                    let mut next = None;
                    while top.1 < end {
                        let r = self.f_l_row[top.1] as usize;
                        top.1 += 1;
                        let nst = row_step[r];
                        if nst != NONE && visited[nst as usize] != ci as u32 {
                            next = Some(nst);
                            break;
                        }
                    }
                    match next {
                        Some(nst) => {
                            visited[nst as usize] = ci as u32;
                            stack.push((nst, self.f_l_start[nst as usize]));
                        }
                        None => {
                            topo.push(st);
                            stack.pop();
                        }
                    }
                }
            }
            // Numeric triangular solve in topological order.
            for &st in topo.iter().rev() {
                let st = st as usize;
                let v = x[self.f_prow[st] as usize];
                if v == 0.0 {
                    continue;
                }
                for q in self.f_l_start[st]..self.f_l_start[st + 1] {
                    let r = self.f_l_row[q] as usize;
                    x[r] -= self.f_l_val[q] * v;
                    if !touched_mark[r] {
                        touched_mark[r] = true;
                        touched.push(r as u32);
                    }
                }
            }
            // Split into the U part and pivot candidates.
            let mut amax: f64 = 0.0;
            for &r in &touched {
                if row_step[r as usize] == NONE {
                    amax = amax.max(x[r as usize].abs());
                }
            }
            let mut pivot_row = usize::MAX;
            if amax > SINGULAR_TOL {
                let mut best = (u32::MAX, 0.0f64, usize::MAX);
                for &r in &touched {
                    let r = r as usize;
                    if row_step[r] != NONE {
                        continue;
                    }
                    let a = x[r].abs();
                    if a < PIVOT_THRESHOLD * amax {
                        continue;
                    }
                    let key = (row_count[r], a, r);
                    if key.0 < best.0 || (key.0 == best.0 && (key.1 > best.1 || (key.1 == best.1 && r < best.2))) {
                        best = key;
                    }
                }
                pivot_row = best.2;
            }
            if pivot_row == usize::MAX {
                singular_positions.push(p);
                for &r in &touched {
                    x[r as usize] = 0.0;
                    touched_mark[r as usize] = false;
                }
                continue;
            }
            let piv = x[pivot_row];
            for &r in &touched {
                let r = r as usize;
                let v = x[r];
                if r != pivot_row && v != 0.0 {
                    let st = row_step[r];
                    if st != NONE {
                        self.f_u_step.push(st);
                        self.f_u_val.push(v);
                    } else if (v / piv).abs() > DROP_TOL {
                        self.f_l_row.push(r as u32);
                        self.f_l_val.push(v / piv);
                    }
                }
                x[r] = 0.0;
                touched_mark[r] = false;
            }
            self.f_l_start.push(self.f_l_row.len());
            self.f_u_start.push(self.f_u_step.len());
            self.f_diag.push(piv);
            self.f_prow.push(pivot_row as u32);
            self.f_pcol.push(p as u32);
            row_step[pivot_row] = s as u32;
            for &r in col.rows {
                row_count[r as usize] = row_count[r as usize].saturating_sub(1);
            }
        }
        if !singular_positions.is_empty() {
            let rows: Vec<usize> = (0..m).filter(|&r| row_step[r] == NONE).collect();
            return Err(Singular { positions: singular_positions, rows });
        }
        self.install();
        Ok(())
    }

    /// Moves the step-ordered factors into the update structure.
    fn install(&mut self) {
        let m = self.m;
        self.row_step0.clear();
        self.row_step0.resize(m, 0);
        for s in 0..m {
            self.row_step0[self.f_prow[s] as usize] = s as u32;
        }
        self.step_row0.clear();
        self.step_row0.extend_from_slice(&self.f_prow);
        self.l_piv.clear();
        self.l_start.clear();
        self.l_idx.clear();
        self.l_val.clear();
        self.l_start.push(0);
        for s in 0..m {
            let (a, b) = (self.f_l_start[s], self.f_l_start[s + 1]);
            if a < b {
                self.l_piv.push(s as u32);
                for q in a..b {
                    self.l_idx.push(self.row_step0[self.f_l_row[q] as usize]);
                    self.l_val.push(self.f_l_val[q]);
                }
                self.l_start.push(self.l_idx.len());
            }
        }
        self.diag.clear();
        self.diag.extend_from_slice(&self.f_diag);
        self.alive.clear();
        self.alive.resize(m, true);
        self.step_pos.clear();
        self.step_pos.extend_from_slice(&self.f_pcol);
        self.pos_step.clear();
        self.pos_step.resize(m, 0);
        for s in 0..m {
            self.pos_step[self.f_pcol[s] as usize] = s as u32;
        }
        self.ucol_start.clear();
        self.ucol_start.extend_from_slice(&self.f_u_start);
        self.u_idx.clear();
        self.u_idx.extend_from_slice(&self.f_u_step);
        self.u_val.clear();
        self.u_val.extend_from_slice(&self.f_u_val);
        self.urow.truncate(m);
        self.urow.iter_mut().for_each(Vec::clear);
        self.urow.resize_with(m, Vec::new);
        for s in 0..m {
            for k in self.ucol_start[s]..self.ucol_start[s + 1] {
                self.urow[self.u_idx[k] as usize].push((s as u32, k as u32));
            }
        }
        self.e_old.clear();
        self.e_new.clear();
        self.e_start.clear();
        self.e_start.push(0);
        self.e_idx.clear();
        self.e_val.clear();
        self.spike.clear();
        self.spike_valid = false;
        self.updates = 0;
        self.base_nnz = self.u_val.len() + self.l_val.len() + m;
        self.work.truncate(m);
        self.work.iter_mut().for_each(|v| *v = 0.0);
        self.spike_dense.truncate(m);
        self.spike_dense.iter_mut().for_each(|v| *v = 0.0);
    }

    fn num_steps(&self) -> usize {
        self.diag.len()
    }

    fn ftran_inner(&mut self, v: &mut [f64], save_spike: bool) {
        let m = self.m;
        let ns = self.num_steps();
        let w = &mut self.work;
        for r in 0..m {
            if v[r] != 0.0 {
                w[self.row_step0[r] as usize] = v[r];
                v[r] = 0.0;
            }
        }
        for k in 0..self.l_piv.len() {
            let val = w[self.l_piv[k] as usize];
            if val == 0.0 {
                continue;
            }
            for q in self.l_start[k]..self.l_start[k + 1] {
                w[self.l_idx[q] as usize] -= self.l_val[q] * val;
            }
        }
        for e in 0..self.e_old.len() {
            let old = self.e_old[e] as usize;
            let mut acc = w[old];
            w[old] = 0.0;
            for q in self.e_start[e]..self.e_start[e + 1] {
                acc -= self.e_val[q] * w[self.e_idx[q] as usize];
            }
            w[self.e_new[e] as usize] = acc;
        }
        if save_spike {
            self.spike.clear();
            self.spike.extend(w[..ns].iter().enumerate().filter(|(_, &a)| a.abs() > DROP_TOL).map(|(s, &a)| (s as u32, a)));
            self.spike_valid = true;
        }
        for s in (0..ns).rev() {
            let val = w[s];
            if val == 0.0 {
                continue;
            }
            let val = val / self.diag[s];
            w[s] = val;
            for q in self.ucol_start[s]..self.ucol_start[s + 1] {
                w[self.u_idx[q] as usize] -= self.u_val[q] * val;
            }
        }
        for s in 0..ns {
            if self.alive[s] {
                v[self.step_pos[s] as usize] = w[s];
            }
            w[s] = 0.0;
        }
    }

    /// Solves `B y = v` in place; `v` is indexed by row on entry and by
    /// basis position on exit.
    pub fn ftran(&mut self, v: &mut [f64]) {
        self.ftran_inner(v, false);
    }

    /// As [`Lu::ftran`], keeping the spike of `v` for a following update.
    pub fn ftran_entering(&mut self, v: &mut [f64]) {
        self.ftran_inner(v, true);
    }

    /// Solves `Bᵀ y = v` in place; `v` is indexed by basis position on
    /// entry and by row on exit.
    pub fn btran(&mut self, v: &mut [f64]) {
        let m = self.m;
        let ns = self.num_steps();
        let w = &mut self.work;
        for p in 0..m {
            if v[p] != 0.0 {
                w[self.pos_step[p] as usize] = v[p];
                v[p] = 0.0;
            }
        }
        for s in 0..ns {
            let val = w[s];
            if val == 0.0 {
                continue;
            }
            let val = val / self.diag[s];
            w[s] = val;
            for &(c, k) in &self.urow[s] {
                let u = self.u_val[k as usize];
                if u != 0.0 && self.alive[c as usize] {
                    w[c as usize] -= u * val;
                }
            }
        }
        for e in (0..self.e_old.len()).rev() {
            let new = self.e_new[e] as usize;
            let val = w[new];
            w[new] = 0.0;
            if val == 0.0 {
                continue;
            }
            for q in self.e_start[e]..self.e_start[e + 1] {
                w[self.e_idx[q] as usize] -= self.e_val[q] * val;
            }
            w[self.e_old[e] as usize] += val;
        }
        for k in (0..self.l_piv.len()).rev() {
            let s = self.l_piv[k] as usize;
            let mut acc = w[s];
            for q in self.l_start[k]..self.l_start[k + 1] {
                acc -= self.l_val[q] * w[self.l_idx[q] as usize];
            }
            w[s] = acc;
        }
        for s in 0..m {
            v[self.step_row0[s] as usize] = w[s];
            w[s] = 0.0;
        }
        for s in m..ns {
            w[s] = 0.0;
        }
    }

    /// Replaces the column at basis position `pos` by the one last passed to
    /// [`Lu::ftran_entering`], whose tableau entry at `pos` is `pivot`.
    /// On error the factors are unchanged and still describe the old basis.
    pub fn update(&mut self, pos: usize, pivot: f64) -> Result<(), UnstableUpdate> {
        if !self.spike_valid {
            return Err(UnstableUpdate);
        }
        self.spike_valid = false;
        let sp = self.pos_step[pos] as usize;
        let old_diag = self.diag[sp];

        // Eliminate the old row of `sp` against later rows in step order.
        let w = &mut self.work;
        let mut heap: BinaryHeap<Reverse<u32>> = BinaryHeap::new();
        for &(c, k) in &self.urow[sp] {
            let u = self.u_val[k as usize];
            if u != 0.0 && self.alive[c as usize] {
                if w[c as usize] == 0.0 {
                    heap.push(Reverse(c));
                }
                w[c as usize] += u;
            }
        }
        let mut etas: Vec<(u32, f64)> = Vec::new();
        let mut last = u32::MAX;
        while let Some(Reverse(c)) = heap.pop() {
            if c == last {
                continue;
            }
            last = c;
            let cu = c as usize;
            let val = w[cu];
            w[cu] = 0.0;
            if val.abs() <= DROP_TOL {
                continue;
            }
            let mu = val / self.diag[cu];
            etas.push((c, mu));
            for &(c2, k) in &self.urow[cu] {
                let u = self.u_val[k as usize];
                if u == 0.0 || !self.alive[c2 as usize] || c2 as usize == sp {
                    continue;
                }
                if w[c2 as usize] == 0.0 {
                    heap.push(Reverse(c2));
                }
                w[c2 as usize] -= mu * u;
            }
        }

        // New diagonal: the spike's entry at `sp` after the row eta.
        let d = &mut self.spike_dense;
        for &(s, v) in &self.spike {
            d[s as usize] = v;
        }
        let mut new_diag = d[sp];
        for &(c, mu) in &etas {
            new_diag -= mu * d[c as usize];
        }
        for &(s, _) in &self.spike {
            d[s as usize] = 0.0;
        }
        let expected = (pivot * old_diag).abs();
        if new_diag.abs() <= SINGULAR_TOL || (new_diag.abs() - expected).abs() > UPDATE_CHECK_TOL * (1.0 + expected) {
            return Err(UnstableUpdate);
        }

        // Commit: drop row and column `sp`, append the spike as a new step.
        for &(_, k) in &self.urow[sp] {
            self.u_val[k as usize] = 0.0;
        }
        self.urow[sp].clear();
        self.alive[sp] = false;
        let ns = self.num_steps() as u32;
        self.e_old.push(sp as u32);
        self.e_new.push(ns);
        for &(c, mu) in &etas {
            self.e_idx.push(c);
            self.e_val.push(mu);
        }
        self.e_start.push(self.e_idx.len());
        let spike = core::mem::take(&mut self.spike);
        self.urow.push(Vec::new());
        for &(s, v) in &spike {
            let su = s as usize;
            if su != sp && self.alive[su] {
                let k = self.u_val.len() as u32;
                self.u_idx.push(s);
                self.u_val.push(v);
                self.urow[su].push((ns, k));
            }
        }
        self.spike = spike;
        self.spike.clear();
        self.ucol_start.push(self.u_val.len());
        self.diag.push(new_diag);
        self.alive.push(true);
        self.step_pos.push(pos as u32);
        self.pos_step[pos] = ns;
        self.work.push(0.0);
        self.spike_dense.push(0.0);
        self.updates += 1;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{rng_from_seed, uniform};

    struct Dense {
        m: usize,
        cols: Vec<(Vec<u32>, Vec<f64>)>,
    }

    impl Dense {
        fn refs(&self) -> Vec<ColRef<'_>> {
            self.cols.iter().map(|(r, v)| ColRef { rows: r, vals: v }).collect()
        }
        fn mul(&self, y: &[f64]) -> Vec<f64> {
            let mut out = vec![0.0; self.m];
            for (p, (r, v)) in self.cols.iter().enumerate() {
                for (&i, &a) in r.iter().zip(v) {
                    out[i as usize] += a * y[p];
                }
            }
            out
        }
        fn mul_t(&self, y: &[f64]) -> Vec<f64> {
            self.cols.iter().map(|(r, v)| r.iter().zip(v).map(|(&i, &a)| a * y[i as usize]).sum()).collect()
        }
    }

    fn random_sparse(seed: u64, m: usize, density: f64) -> Dense {
        let mut rng = rng_from_seed(seed);
        let cols = (0..m)
            .map(|p| {
                let mut rows = Vec::new();
                let mut vals = Vec::new();
                for r in 0..m {
                    if r == (p * 7 + 3) % m || uniform(&mut rng) < density {
                        rows.push(r as u32);
                        vals.push(uniform(&mut rng) * 4.0 - 2.0 + if r == (p * 7 + 3) % m { 5.0 } else { 0.0 });
                    }
                }
                (rows, vals)
            })
            .collect();
        Dense { m, cols }
    }

    fn check_solves(lu: &mut Lu, b: &Dense, tol: f64) {
        let m = b.m;
        let rhs: Vec<f64> = (0..m).map(|i| i as f64 * 0.1 - 1.0).collect();
        let mut y = rhs.clone();
        lu.ftran(&mut y);
        let back = b.mul(&y);
        for i in 0..m {
            assert!((back[i] - rhs[i]).abs() < tol, "ftran residual {}", back[i] - rhs[i]);
        }
        let mut z = rhs.clone();
        lu.btran(&mut z);
        let back = b.mul_t(&z);
        for i in 0..m {
            assert!((back[i] - rhs[i]).abs() < tol, "btran residual {}", back[i] - rhs[i]);
        }
    }

    #[test]
    fn solves_match_products() {
        for seed in 0..20 {
            let m = 30;
            let b = random_sparse(seed, m, 0.1);
            let mut lu = Lu::default();
            lu.factorize(m, &b.refs()).unwrap();
            check_solves(&mut lu, &b, 1e-9);
        }
    }

    #[test]
    fn updates_track_column_replacement() {
        for seed in 0..10 {
            let m = 25;
            let mut b = random_sparse(seed, m, 0.15);
            let mut lu = Lu::default();
            lu.factorize(m, &b.refs()).unwrap();
            let mut rng = rng_from_seed(seed + 50);
            let mut applied = 0;
            for step in 0..40 {
                let pos = (step * 11 + seed as usize) % m;
                let rows: Vec<u32> =
                    (0..m as u32).filter(|&r| r as usize == pos || uniform(&mut rng) < 0.2).collect();
                let vals: Vec<f64> =
                    rows.iter().map(|&r| if r as usize == pos { 6.0 } else { uniform(&mut rng) - 0.5 }).collect();
                let mut alpha = vec![0.0; m];
                for (&r, &v) in rows.iter().zip(&vals) {
                    alpha[r as usize] = v;
                }
                lu.ftran_entering(&mut alpha);
                if alpha[pos].abs() < 1e-3 {
                    continue;
                }
                b.cols[pos] = (rows, vals);
                if lu.update(pos, alpha[pos]).is_err() {
                    lu.factorize(m, &b.refs()).unwrap();
                }
                applied += 1;
                check_solves(&mut lu, &b, 1e-8);
            }
            assert!(applied > 20);
            assert!(lu.num_updates() > 0 || applied == 0);
        }
    }

    #[test]
    fn reports_singular_columns() {
        let m = 3;
        let cols = vec![
            (vec![0u32, 1], vec![1.0, 1.0]),
            (vec![0u32, 1], vec![2.0, 2.0]),
            (vec![2u32], vec![1.0]),
        ];
        let refs: Vec<ColRef<'_>> = cols.iter().map(|(r, v)| ColRef { rows: r, vals: v }).collect();
        let mut lu = Lu::default();
        let err = lu.factorize(m, &refs).unwrap_err();
        assert_eq!(err.positions.len(), 1);
        assert_eq!(err.rows.len(), 1);
    }
}
