use crate::error::{Error, Result};

use super::modp::ModP;

/// Column-compressed matrix over GF(p), `p < 256`. Stored entries are
/// non-zero, and row indices within a column are strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatModP {
    rows: usize,
    cols: usize,
    p: u32,
    col_ptr: Vec<usize>,
    row_idx: Vec<u32>,
    vals: Vec<u8>,
}

impl SparseMatModP {
    pub fn zero(rows: usize, cols: usize, p: u32) -> Self {
        SparseMatModP { rows, cols, p, col_ptr: vec![0; cols + 1], row_idx: Vec::new(), vals: Vec::new() }
    }

    pub fn identity(n: usize, p: u32) -> Self {
        SparseMatModP { rows: n, cols: n, p, col_ptr: (0..=n).collect(), row_idx: (0..n as u32).collect(), vals: vec![1; n] }
    }

    /// Build from `(row, col, value)` triplets. Values are reduced mod p and
    /// duplicates are summed; zero results are dropped.
    pub fn from_triplets(rows: usize, cols: usize, p: u32, triplets: impl IntoIterator<Item = (usize, usize, u64)>) -> Result<Self> {
        let field = ModP::new(p)?;
        let mut columns: Vec<Vec<(u32, u8)>> = vec![Vec::new(); cols];
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(Error::invalid(format!("entry ({r}, {c}) outside a {rows}x{cols} matrix")));
            }
            columns[c].push((r as u32, field.reduce(v)));
        }
        Ok(Self::from_columns_unchecked(rows, p, columns, &field))
    }

    /// Build from per-column entry lists (any order, duplicates summed).
    pub(crate) fn from_columns_unchecked(rows: usize, p: u32, mut columns: Vec<Vec<(u32, u8)>>, field: &ModP) -> Self {
        let cols = columns.len();
        let mut col_ptr = Vec::with_capacity(cols + 1);
        let mut row_idx = Vec::new();
        let mut vals = Vec::new();
        col_ptr.push(0);
        for col in &mut columns {
            col.sort_unstable_by_key(|e| e.0);
            let mut i = 0;
            while i < col.len() {
                let r = col[i].0;
                let mut v = 0u8;
                while i < col.len() && col[i].0 == r {
                    v = field.add(v, col[i].1);
                    i += 1;
                }
                if v != 0 {
                    row_idx.push(r);
                    vals.push(v);
                }
            }
            col_ptr.push(row_idx.len());
        }
        SparseMatModP { rows, cols, p, col_ptr, row_idx, vals }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn is_zero(&self) -> bool {
        self.vals.is_empty()
    }

    pub fn column(&self, c: usize) -> (&[u32], &[u8]) {
        let (a, b) = (self.col_ptr[c], self.col_ptr[c + 1]);
        (&self.row_idx[a..b], &self.vals[a..b])
    }

    pub fn get(&self, r: usize, c: usize) -> u8 {
        let (rows, vals) = self.column(c);
        match rows.binary_search(&(r as u32)) {
            Ok(i) => vals[i],
            Err(_) => 0,
        }
    }

    /// All stored entries in column-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, u8)> + '_ {
        (0..self.cols).flat_map(move |c| {
            let (rows, vals) = self.column(c);
            rows.iter().zip(vals).map(move |(&r, &v)| (r as usize, c, v))
        })
    }

    pub fn column_weights(&self) -> Vec<usize> {
        self.col_ptr.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn row_weights(&self) -> Vec<usize> {
        let mut w = vec![0; self.rows];
        for &r in &self.row_idx {
            w[r as usize] += 1;
        }
        w
    }

    pub fn transpose(&self) -> Self {
        let mut columns: Vec<Vec<(u32, u8)>> = vec![Vec::new(); self.rows];
        for (r, c, v) in self.triplets() {
            columns[r].push((c as u32, v));
        }
        let mut col_ptr = Vec::with_capacity(self.rows + 1);
        let mut row_idx = Vec::with_capacity(self.nnz());
        let mut vals = Vec::with_capacity(self.nnz());
        col_ptr.push(0);
        for col in columns {
            for (r, v) in col {
                row_idx.push(r);
                vals.push(v);
            }
            col_ptr.push(row_idx.len());
        }
        SparseMatModP { rows: self.cols, cols: self.rows, p: self.p, col_ptr, row_idx, vals }
    }

    pub fn scaled(&self, f: u64) -> Self {
        let field = ModP::new(self.p).expect("matrix prime was validated at construction");
        let f = field.reduce(f);
        if f == 0 {
            return Self::zero(self.rows, self.cols, self.p);
        }
        let mut out = self.clone();
        for v in &mut out.vals {
            *v = field.mul(*v, f);
        }
        out
    }

    /// The product `self * rhs`.
    pub fn mul(&self, rhs: &SparseMatModP) -> Result<Self> {
        if self.cols != rhs.rows || self.p != rhs.p {
            return Err(Error::invalid(format!(
                "cannot multiply {}x{} (p={}) by {}x{} (p={})",
                self.rows, self.cols, self.p, rhs.rows, rhs.cols, rhs.p
            )));
        }
        let field = ModP::new(self.p)?;
        let mut acc = vec![0u8; self.rows];
        let mut touched: Vec<u32> = Vec::new();
        let mut col_ptr = Vec::with_capacity(rhs.cols + 1);
        let mut row_idx = Vec::new();
        let mut vals = Vec::new();
        col_ptr.push(0);
        for c in 0..rhs.cols {
            let (mid, mv) = rhs.column(c);
            for (&k, &b) in mid.iter().zip(mv) {
                let (rs, av) = self.column(k as usize);
                for (&r, &a) in rs.iter().zip(av) {
                    let slot = &mut acc[r as usize];
                    if *slot == 0 {
                        touched.push(r);
                    }
                    *slot = field.add(*slot, field.mul(a, b));
                    // a slot that returns to zero stays in `touched`; filtered below
                }
            }
            touched.sort_unstable();
            touched.dedup();
            for &r in &touched {
                let v = std::mem::take(&mut acc[r as usize]);
                if v != 0 {
                    row_idx.push(r);
                    vals.push(v);
                }
            }
            touched.clear();
            col_ptr.push(row_idx.len());
        }
        Ok(SparseMatModP { rows: self.rows, cols: rhs.cols, p: self.p, col_ptr, row_idx, vals })
    }

    /// `self * v` for a dense vector.
    pub fn apply(&self, v: &[u8]) -> Vec<u8> {
        let field = ModP::new(self.p).expect("matrix prime was validated at construction");
        let mut out = vec![0u8; self.rows];
        for (c, &x) in v.iter().enumerate().take(self.cols) {
            if x == 0 {
                continue;
            }
            let (rs, vs) = self.column(c);
            for (&r, &a) in rs.iter().zip(vs) {
                out[r as usize] = field.add(out[r as usize], field.mul(a, x));
            }
        }
        out
    }

    pub fn to_dense_rows(&self) -> Vec<Vec<u8>> {
        let mut out = vec![vec![0u8; self.cols]; self.rows];
        for (r, c, v) in self.triplets() {
            out[r][c] = v;
        }
        out
    }

    pub fn trace(&self) -> u8 {
        let field = ModP::new(self.p).expect("matrix prime was validated at construction");
        (0..self.rows.min(self.cols)).fold(0, |acc, i| field.add(acc, self.get(i, i)))
    }
}
