use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::modp::ModP;
use super::sparse::SparseMatModP;

/// Matrices with at most this many cells go straight to dense elimination.
const DENSE_CELLS: usize = 1 << 22;

/// The sparse phase hands over to dense elimination once the active block
/// holds more than one nonzero per this many cells.
const FILL_RATIO: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RankMethod {
    #[default]
    Auto,
    Dense,
    Sparse,
}

/// Rank over GF(p).
pub fn rank_mod_p(m: &SparseMatModP) -> usize {
    rank_with(m, RankMethod::Auto)
}

pub fn rank_with(m: &SparseMatModP, method: RankMethod) -> usize {
    if m.is_zero() {
        return 0;
    }
    let cells = m.rows().saturating_mul(m.cols());
    match method {
        RankMethod::Dense => rank_dense(m),
        RankMethod::Sparse => rank_sparse(m),
        RankMethod::Auto if cells <= DENSE_CELLS => rank_dense(m),
        RankMethod::Auto => rank_sparse(m),
    }
}

fn field_of(m: &SparseMatModP) -> ModP {
    ModP::new(m.p()).expect("matrix prime was validated at construction")
}

/// Rows of `m` as sparse `(col, value)` lists, ordered by column.
fn sparse_rows(m: &SparseMatModP) -> Vec<Vec<(u32, u8)>> {
    let t = m.transpose();
    (0..t.cols())
        .map(|r| {
            let (cs, vs) = t.column(r);
            cs.iter().copied().zip(vs.iter().copied()).collect()
        })
        .collect()
}

fn rank_dense(m: &SparseMatModP) -> usize {
    if m.rows() > m.cols() {
        return rank_dense(&m.transpose());
    }
    let rows = sparse_rows(m);
    if m.p() == 2 {
        let mut packed = PackedRows::new(m.cols());
        for r in &rows {
            packed.push(r.iter().map(|&(c, _)| c as usize));
        }
        packed.rank()
    } else {
        let dense: Vec<Vec<u32>> = rows
            .iter()
            .map(|r| {
                let mut v = vec![0u32; m.cols()];
                for &(c, x) in r {
                    v[c as usize] = x as u32;
                }
                v
            })
            .collect();
        lazy_rank_rows(dense, &field_of(m))
    }
}

/// Forward elimination on dense rows whose entries are reduced mod p only
/// when needed: updates accumulate in `u32` until they could overflow.
fn lazy_rank_rows(mut rows: Vec<Vec<u32>>, field: &ModP) -> usize {
    let p = field.p();
    let cols = rows.first().map_or(0, Vec::len);
    let limit = (u32::MAX - p) / ((p - 1) * (p - 1));
    let mut pending = vec![0u32; rows.len()];
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows.len() {
            break;
        }
        let Some(pr) = (rank..rows.len()).find(|&r| !rows[r][c].is_multiple_of(p)) else {
            continue;
        };
        rows.swap(rank, pr);
        pending.swap(rank, pr);
        let (head, tail) = rows.split_at_mut(rank + 1);
        let pivot = &mut head[rank];
        let inv = field.inv((pivot[c] % p) as u8) as u32;
        for x in &mut pivot[c..] {
            *x = *x % p * inv % p;
        }
        let pivot = &pivot[c..];
        for (row, count) in tail.iter_mut().zip(&mut pending[rank + 1..]) {
            let f = row[c] % p;
            if f == 0 {
                continue;
            }
            let nf = p - f;
            for (d, &s) in row[c..].iter_mut().zip(pivot) {
                *d += nf * s;
            }
            *count += 1;
            if *count >= limit {
                for x in &mut row[c..] {
                    *x %= p;
                }
                *count = 0;
            }
        }
        rank += 1;
    }
    rank
}

/// Bit-packed rows over GF(2).
struct PackedRows {
    words: usize,
    data: Vec<u64>,
    len: usize,
}

impl PackedRows {
    fn new(cols: usize) -> Self {
        PackedRows { words: cols.div_ceil(64), data: Vec::new(), len: 0 }
    }

    fn push(&mut self, ones: impl Iterator<Item = usize>) {
        let start = self.data.len();
        self.data.resize(start + self.words, 0);
        for c in ones {
            self.data[start + c / 64] ^= 1 << (c % 64);
        }
        self.len += 1;
    }

    fn rank(mut self) -> usize {
        let w = self.words;
        let mut rank = 0;
        for c in 0..w * 64 {
            if rank == self.len {
                break;
            }
            let (word, bit) = (c / 64, 1u64 << (c % 64));
            let Some(pr) = (rank..self.len).find(|&r| self.data[r * w + word] & bit != 0) else {
                continue;
            };
            if pr != rank {
                for x in 0..w {
                    self.data.swap(rank * w + x, pr * w + x);
                }
            }
            let (head, tail) = self.data.split_at_mut((rank + 1) * w);
            let pivot = &head[rank * w + word..(rank + 1) * w];
            for row in tail.chunks_exact_mut(w) {
                if row[word] & bit != 0 {
                    for (d, s) in row[word..].iter_mut().zip(pivot) {
                        *d ^= s;
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}

/// `dst - f * src` for sorted sparse rows.
fn sparse_axpy(dst: &[(u32, u8)], src: &[(u32, u8)], f: u8, field: &ModP) -> Vec<(u32, u8)> {
    let mut out = Vec::with_capacity(dst.len() + src.len());
    let (mut a, mut b) = (0, 0);
    while a < dst.len() || b < src.len() {
        let ca = dst.get(a).map_or(u32::MAX, |e| e.0);
        let cb = src.get(b).map_or(u32::MAX, |e| e.0);
        if ca < cb {
            out.push(dst[a]);
            a += 1;
        } else if cb < ca {
            out.push((cb, field.neg(field.mul(f, src[b].1))));
            b += 1;
        } else {
            let v = field.sub(dst[a].1, field.mul(f, src[b].1));
            if v != 0 {
                out.push((ca, v));
            }
            a += 1;
            b += 1;
        }
    }
    out
}

/// Structured elimination: pivot on the lightest column (shortest row within
/// it) while the active block stays sparse, then finish densely.
fn rank_sparse(m: &SparseMatModP) -> usize {
    let field = field_of(m);
    let mut rows = sparse_rows(m);
    let ncols = m.cols();
    let mut col_rows: Vec<Vec<u32>> = vec![Vec::new(); ncols];
    let mut col_count = vec![0u32; ncols];
    let mut nnz = 0usize;
    for (r, row) in rows.iter().enumerate() {
        nnz += row.len();
        for &(c, _) in row {
            col_rows[c as usize].push(r as u32);
            col_count[c as usize] += 1;
        }
    }
    let mut row_alive: Vec<bool> = rows.iter().map(|r| !r.is_empty()).collect();
    let mut live_rows = row_alive.iter().filter(|&&a| a).count();
    let mut live_cols = col_count.iter().filter(|&&c| c > 0).count();
    let mut heap: BinaryHeap<Reverse<(u32, u32)>> =
        (0..ncols).filter(|&c| col_count[c] > 0).map(|c| Reverse((col_count[c], c as u32))).collect();
    let mut rank = 0;

    while let Some(Reverse((cnt, c))) = heap.pop() {
        let c = c as usize;
        if col_count[c] != cnt || cnt == 0 {
            continue;
        }
        if cnt > 1 && nnz.saturating_mul(FILL_RATIO) > live_rows.saturating_mul(live_cols) {
            break;
        }
        let mut cands: Vec<u32> = std::mem::take(&mut col_rows[c]);
        cands.sort_unstable();
        cands.dedup();
        cands.retain(|&r| row_alive[r as usize] && rows[r as usize].binary_search_by_key(&(c as u32), |e| e.0).is_ok());
        let Some(&pr) = cands.iter().min_by_key(|&&r| (rows[r as usize].len(), r)) else {
            col_count[c] = 0;
            continue;
        };
        let pivot = std::mem::take(&mut rows[pr as usize]);
        row_alive[pr as usize] = false;
        live_rows -= 1;
        let pv = pivot[pivot.binary_search_by_key(&(c as u32), |e| e.0).unwrap()].1;
        let inv = field.inv(pv);
        for &r in &cands {
            if r == pr {
                continue;
            }
            let old = std::mem::take(&mut rows[r as usize]);
            let f = field.mul(old[old.binary_search_by_key(&(c as u32), |e| e.0).unwrap()].1, inv);
            let new = sparse_axpy(&old, &pivot, f, &field);
            // adjust column counts by the symmetric difference of supports
            let (mut a, mut b) = (0, 0);
            while a < old.len() || b < new.len() {
                let ca = old.get(a).map_or(u32::MAX, |e| e.0);
                let cb = new.get(b).map_or(u32::MAX, |e| e.0);
                if ca == cb {
                    a += 1;
                    b += 1;
                    continue;
                }
                let col = ca.min(cb) as usize;
                if ca < cb {
                    col_count[col] -= 1;
                    if col_count[col] == 0 {
                        live_cols -= 1;
                    }
                    a += 1;
                } else {
                    if col_count[col] == 0 {
                        live_cols += 1;
                    }
                    col_count[col] += 1;
                    col_rows[col].push(r);
                    b += 1;
                }
                heap.push(Reverse((col_count[col], col as u32)));
            }
            nnz = nnz + new.len() - old.len();
            if new.is_empty() {
                row_alive[r as usize] = false;
                live_rows -= 1;
            }
            rows[r as usize] = new;
        }
        nnz -= pivot.len();
        for &(col, _) in &pivot {
            let col = col as usize;
            col_count[col] -= 1;
            if col_count[col] == 0 {
                live_cols -= 1;
            } else {
                heap.push(Reverse((col_count[col], col as u32)));
            }
        }
        rank += 1;
    }

    if live_rows == 0 {
        return rank;
    }
    let mut compact = vec![u32::MAX; ncols];
    let mut width = 0usize;
    for (c, &n) in col_count.iter().enumerate() {
        if n > 0 {
            compact[c] = width as u32;
            width += 1;
        }
    }
    let mut triplets = Vec::with_capacity(nnz);
    let mut height = 0usize;
    for (r, row) in rows.iter().enumerate() {
        if !row_alive[r] || row.is_empty() {
            continue;
        }
        triplets.extend(row.iter().map(|&(c, x)| (height, compact[c as usize] as usize, x as u64)));
        height += 1;
    }
    let rest = SparseMatModP::from_triplets(height, width, m.p(), triplets).expect("entries lie in the active block");
    rank + rank_dense(&rest)
}

/// A subspace of GF(p)^len held as a fully reduced row-echelon basis.
#[derive(Clone, Debug)]
pub struct Echelon {
    len: usize,
    field: ModP,
    rows: Vec<Vec<u8>>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(len: usize, p: u32) -> crate::Result<Self> {
        Ok(Echelon { len, field: ModP::new(p)?, rows: Vec::new(), pivots: Vec::new() })
    }

    pub fn from_rows(len: usize, p: u32, rows: impl IntoIterator<Item = Vec<u8>>) -> crate::Result<Self> {
        let mut e = Self::new(len, p)?;
        for r in rows {
            e.insert(r);
        }
        Ok(e)
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn ambient_dim(&self) -> usize {
        self.len
    }

    /// Subtract from `v` its components along the basis rows, returning the
    /// coefficients used (one per row, in pivot order).
    pub fn reduce(&self, v: &mut [u8]) -> Vec<u8> {
        let mut coeffs = Vec::with_capacity(self.rows.len());
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let f = v[pc];
            coeffs.push(f);
            if f != 0 {
                self.field.sub_scaled(&mut v[pc..], &row[pc..], f);
            }
        }
        coeffs
    }

    pub fn contains(&self, v: &[u8]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|&x| x == 0)
    }

    /// Add `v` to the span. Returns false if it was already contained.
    pub fn insert(&mut self, mut v: Vec<u8>) -> bool {
        assert_eq!(v.len(), self.len, "vector length does not match the ambient space");
        self.reduce(&mut v);
        let Some(pc) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = self.field.inv(v[pc]);
        self.field.scale(&mut v[pc..], inv);
        for row in &mut self.rows {
            let f = row[pc];
            if f != 0 {
                self.field.sub_scaled(row, &v, f);
            }
        }
        let at = self.pivots.partition_point(|&q| q < pc);
        self.pivots.insert(at, pc);
        self.rows.insert(at, v);
        true
    }
}

/// Basis of the null space `{v : M v = 0}`: one vector per free column,
/// with a 1 in that column and zeros in the other free columns.
pub fn kernel_basis(m: &SparseMatModP) -> Vec<Vec<u8>> {
    let field = field_of(m);
    let n = m.cols();
    let mut ech = Echelon::new(n, m.p()).expect("matrix prime was validated at construction");
    for row in sparse_rows(m) {
        if row.is_empty() {
            continue;
        }
        let mut v = vec![0u8; n];
        for (c, x) in row {
            v[c as usize] = x;
        }
        ech.insert(v);
    }
    let mut is_pivot = vec![false; n];
    for &pc in ech.pivots() {
        is_pivot[pc] = true;
    }
    (0..n)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![0u8; n];
            v[f] = 1;
            for (row, &pc) in ech.rows().iter().zip(ech.pivots()) {
                v[pc] = field.neg(row[f]);
            }
            v
        })
        .collect()
}
