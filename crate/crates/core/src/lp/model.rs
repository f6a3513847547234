//! Sparse inequality systems with bounded columns.

use alloc::vec::Vec;

use crate::lp::cuts::{CutDescriptor, CutFamily};
use crate::tensor::Dims;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

/// Which family a row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RowKind {
    /// `w_ijk ≤ x_i` (mode 0), `≤ y_j` (mode 1) or `≤ z_k` (mode 2) on a one-entry.
    Upper { entry: u32, mode: u8 },
    /// `w_ijk ≥ x_i + y_j + z_k − 2` on a zero-entry.
    Lower { entry: u32 },
    Cut(CutDescriptor),
    /// Objective pinned at its optimum.
    Pin,
    Other,
}

/// Column numbering of the extended tensor formulation: `x`, then `y`,
/// then `z`, then one `w` per entry in linear order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ColumnLayout {
    pub dims: Dims,
}

impl ColumnLayout {
    #[inline]
    pub fn x(&self, i: usize) -> usize {
        i
    }
    #[inline]
    pub fn y(&self, j: usize) -> usize {
        self.dims.n + j
    }
    #[inline]
    pub fn z(&self, k: usize) -> usize {
        self.dims.n + self.dims.m + k
    }
    /// Column of the factor entry `index` in mode `mode`.
    #[inline]
    pub fn factor(&self, mode: usize, index: usize) -> usize {
        match mode {
            0 => self.x(index),
            1 => self.y(index),
            _ => self.z(index),
        }
    }
    #[inline]
    pub fn w_offset(&self) -> usize {
        self.dims.n + self.dims.m + self.dims.l
    }
    #[inline]
    pub fn w(&self, i: usize, j: usize, k: usize) -> usize {
        self.w_offset() + self.dims.index(i, j, k)
    }
    #[inline]
    pub fn w_linear(&self, idx: usize) -> usize {
        self.w_offset() + idx
    }
    pub fn num_cols(&self) -> usize {
        self.w_offset() + self.dims.len()
    }
}

/// `min cᵀv + c₀` subject to sparse rows and finite column bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct LpModel {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub objective: Vec<f64>,
    pub obj_constant: f64,
    row_start: Vec<usize>,
    row_cols: Vec<u32>,
    row_vals: Vec<f64>,
    pub senses: Vec<Sense>,
    pub rhs: Vec<f64>,
    pub kinds: Vec<RowKind>,
    /// Present for models of the tensor formulation.
    pub layout: Option<ColumnLayout>,
    /// Families whose rows are generated by separation instead of upfront.
    pub lazy_families: Vec<CutFamily>,
    /// Bumped each time rows are appended.
    pub revision: u32,
}

impl LpModel {
    /// A model with `num_cols` columns bounded in `[0, 1]` and zero objective.
    pub fn new(num_cols: usize) -> Self {
        Self {
            lower: alloc::vec![0.0; num_cols],
            upper: alloc::vec![1.0; num_cols],
            objective: alloc::vec![0.0; num_cols],
            obj_constant: 0.0,
            row_start: alloc::vec![0],
            row_cols: Vec::new(),
            row_vals: Vec::new(),
            senses: Vec::new(),
            rhs: Vec::new(),
            kinds: Vec::new(),
            layout: None,
            lazy_families: Vec::new(),
            revision: 0,
        }
    }

    pub fn num_cols(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.senses.len()
    }

    pub fn num_nonzeros(&self) -> usize {
        self.row_vals.len()
    }

    pub fn add_row(&mut self, coeffs: &[(usize, f64)], sense: Sense, rhs: f64, kind: RowKind) {
        for &(c, v) in coeffs {
            self.row_cols.push(c as u32);
            self.row_vals.push(v);
        }
        self.row_start.push(self.row_cols.len());
        self.senses.push(sense);
        self.rhs.push(rhs);
        self.kinds.push(kind);
    }

    /// Appends the row of `cut`; requires a tensor layout.
    pub fn add_cut(&mut self, cut: &CutDescriptor) {
        let lay = self.layout.expect("cuts need a tensor column layout");
        let (coeffs, sense, rhs) = cut.row(&lay);
        self.add_row(&coeffs, sense, rhs, RowKind::Cut(*cut));
    }

    /// Column indices and coefficients of row `r`.
    pub fn row(&self, r: usize) -> (&[u32], &[f64]) {
        let (a, b) = (self.row_start[r], self.row_start[r + 1]);
        (&self.row_cols[a..b], &self.row_vals[a..b])
    }

    pub fn row_activity(&self, r: usize, point: &[f64]) -> f64 {
        let (cols, vals) = self.row(r);
        cols.iter().zip(vals).map(|(&c, &v)| v * point[c as usize]).sum()
    }

    /// Amount by which `point` violates row `r` (zero if satisfied).
    pub fn row_violation(&self, r: usize, point: &[f64]) -> f64 {
        let a = self.row_activity(r, point);
        let rhs = self.rhs[r];
        match self.senses[r] {
            Sense::Le => (a - rhs).max(0.0),
            Sense::Ge => (rhs - a).max(0.0),
            Sense::Eq => (a - rhs).abs(),
        }
    }

    /// Largest row or bound violation of `point`.
    pub fn max_violation(&self, point: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (c, &v) in point.iter().enumerate() {
            worst = worst.max(self.lower[c] - v).max(v - self.upper[c]);
        }
        for r in 0..self.num_rows() {
            worst = worst.max(self.row_violation(r, point));
        }
        worst
    }

    /// `cᵀv + c₀`.
    pub fn evaluate(&self, point: &[f64]) -> f64 {
        self.obj_constant + self.objective.iter().zip(point).map(|(c, v)| c * v).sum::<f64>()
    }

    /// Checks finiteness, bound order and column references.
    pub fn validate(&self) -> Result<()> {
        let n = self.num_cols();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::MalformedModel("bound vectors have the wrong length".into()));
        }
        for c in 0..n {
            if !(self.lower[c].is_finite() && self.upper[c].is_finite() && self.objective[c].is_finite()) {
                return Err(Error::MalformedModel(alloc::format!("column {c} has a non-finite bound or cost")));
            }
            if self.lower[c] > self.upper[c] {
                return Err(Error::MalformedModel(alloc::format!("column {c} has lower > upper")));
            }
        }
        if !self.obj_constant.is_finite() {
            return Err(Error::MalformedModel("non-finite objective constant".into()));
        }
        for r in 0..self.num_rows() {
            let (cols, vals) = self.row(r);
            if cols.iter().any(|&c| c as usize >= n) {
                return Err(Error::MalformedModel(alloc::format!("row {r} references a missing column")));
            }
            if vals.iter().any(|v| !v.is_finite()) || !self.rhs[r].is_finite() {
                return Err(Error::MalformedModel(alloc::format!("row {r} has a non-finite coefficient")));
            }
        }
        Ok(())
    }
}
