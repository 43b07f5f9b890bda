//! The subspace lattice of GF(q)^n: canonical enumeration of each level,
//! containment, the boundary map between levels, and the action of GL(n,q).

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use itertools::Itertools;
use num_traits::ToPrimitive;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::homology::{rank_mod_p, SparseMatModP};
use crate::qcomb::{gauss_binomial, q_factorial};
use crate::qfield::{Elem, FieldTable};

pub const DEFAULT_LEVEL_CAP: u64 = 200_000;

/// Row-reduce the `nrows x ncols` row-major matrix `m` in place. Returns the
/// pivot columns; the first `pivots.len()` rows then hold the RREF.
pub fn rref(field: &FieldTable, m: &mut [Elem], nrows: usize, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(pr) = (r..nrows).find(|&i| m[i * ncols + c] != 0) else {
            continue;
        };
        if pr != r {
            for j in 0..ncols {
                m.swap(r * ncols + j, pr * ncols + j);
            }
        }
        let inv = field.inv(m[r * ncols + c]).expect("pivot is non-zero");
        for j in c..ncols {
            m[r * ncols + j] = field.mul(m[r * ncols + j], inv);
        }
        for i in 0..nrows {
            let f = m[i * ncols + c];
            if i == r || f == 0 {
                continue;
            }
            for j in c..ncols {
                let t = field.mul(f, m[r * ncols + j]);
                m[i * ncols + j] = field.sub(m[i * ncols + j], t);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

fn mat_mul(field: &FieldTable, a: &[Elem], b: &[Elem], rows: usize, inner: usize, cols: usize) -> Vec<Elem> {
    let mut out = vec![0; rows * cols];
    for i in 0..rows {
        for l in 0..inner {
            let x = a[i * inner + l];
            if x == 0 {
                continue;
            }
            for j in 0..cols {
                let y = b[l * cols + j];
                if y != 0 {
                    out[i * cols + j] = field.add(out[i * cols + j], field.mul(x, y));
                }
            }
        }
    }
    out
}

/// A k-dimensional subspace of GF(q)^n, held as its reduced row-echelon
/// basis (`k x n`, row-major). Equality is equality of subspaces.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    n: usize,
    k: usize,
    rows: Vec<Elem>,
}

impl Subspace {
    /// The row space of an arbitrary `r x n` matrix.
    pub fn span(field: &FieldTable, n: usize, mut rows: Vec<Elem>) -> Result<Self> {
        if n == 0 && !rows.is_empty() || n > 0 && !rows.len().is_multiple_of(n) {
            return Err(Error::invalid(format!("{} entries do not form rows of length {n}", rows.len())));
        }
        if rows.iter().any(|&x| x as u32 >= field.order()) {
            return Err(Error::invalid("matrix entry outside the field"));
        }
        let r = rows.len().checked_div(n).unwrap_or(0);
        let k = rref(field, &mut rows, r, n).len();
        rows.truncate(k * n);
        Ok(Subspace { n, k, rows })
    }

    pub fn zero(n: usize) -> Self {
        Subspace { n, k: 0, rows: Vec::new() }
    }

    pub fn full(n: usize) -> Self {
        let mut rows = vec![0; n * n];
        for i in 0..n {
            rows[i * n + i] = 1;
        }
        Subspace { n, k: n, rows }
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn rows(&self) -> &[Elem] {
        &self.rows
    }

    pub fn row(&self, r: usize) -> &[Elem] {
        &self.rows[r * self.n..(r + 1) * self.n]
    }

    pub fn pivots(&self) -> Vec<usize> {
        (0..self.k).map(|r| self.row(r).iter().position(|&x| x != 0).unwrap()).collect()
    }

    /// Whether `other` is a subspace of `self`.
    pub fn contains(&self, field: &FieldTable, other: &Subspace) -> bool {
        if other.n != self.n || other.k > self.k {
            return false;
        }
        let mut stacked = self.rows.clone();
        stacked.extend_from_slice(&other.rows);
        rref(field, &mut stacked, self.k + other.k, self.n).len() == self.k
    }

    /// Whether `other` is a hyperplane of `self`.
    pub fn covers(&self, field: &FieldTable, other: &Subspace) -> bool {
        other.k + 1 == self.k && self.contains(field, other)
    }

    /// The image `x g` under the right action of `g`.
    pub fn act(&self, field: &FieldTable, g: &GroupElement) -> Self {
        assert_eq!(g.n, self.n, "group element and subspace live in different dimensions");
        let mut rows = mat_mul(field, &self.rows, &g.entries, self.k, self.n, self.n);
        rref(field, &mut rows, self.k, self.n);
        Subspace { n: self.n, k: self.k, rows }
    }

    /// All subspaces of `self` of dimension `d`, as images of the canonical
    /// `d`-subspaces of GF(q)^k under the basis of `self`.
    fn subspaces_of(&self, field: &FieldTable, inner: &[Subspace]) -> Vec<Subspace> {
        inner
            .iter()
            .map(|y| {
                let d = y.k;
                let mut rows = mat_mul(field, &y.rows, &self.rows, d, self.k, self.n);
                rref(field, &mut rows, d, self.n);
                Subspace { n: self.n, k: d, rows }
            })
            .collect()
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<_> = (0..self.k).map(|r| self.row(r)).collect();
        write!(f, "Subspace{rows:?}")
    }
}

/// All `k`-subspaces of GF(q)^n in canonical order: by pivot set
/// (lexicographic), then by the free entries read row by row as a base-q
/// numeral, most significant first.
pub fn enumerate_subspaces(field: &FieldTable, n: usize, k: usize, cap: u64) -> Result<Vec<Subspace>> {
    if k > n {
        return Ok(Vec::new());
    }
    let q = field.order() as u64;
    let count = gauss_binomial(n as i64, k as i64, q);
    if count.to_u64().is_none_or(|c| c > cap) {
        return Err(Error::CapExceeded { what: format!("level {k} of GF({q})^{n}"), count: count.to_string(), cap });
    }
    let mut out = Vec::with_capacity(count.to_usize().unwrap_or(0));
    for pivots in (0..n).combinations(k) {
        let free: Vec<usize> = (0..k)
            .flat_map(|r| {
                let pivots = &pivots;
                (pivots[r] + 1..n).filter(move |c| !pivots.contains(c)).map(move |c| r * n + c)
            })
            .collect();
        let mut rows = vec![0 as Elem; k * n];
        for (r, &c) in pivots.iter().enumerate() {
            rows[r * n + c] = 1;
        }
        let mut digits = vec![0 as Elem; free.len()];
        loop {
            for (&pos, &d) in free.iter().zip(&digits) {
                rows[pos] = d;
            }
            out.push(Subspace { n, k, rows: rows.clone() });
            let Some(last) = digits.iter().rposition(|&d| (d as u64) + 1 < q) else {
                break;
            };
            digits[last] += 1;
            for d in &mut digits[last + 1..] {
                *d = 0;
            }
        }
    }
    Ok(out)
}

/// An invertible `n x n` matrix over GF(q), acting on row vectors from the right.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupElement {
    n: usize,
    entries: Vec<Elem>,
}

impl GroupElement {
    pub fn new(field: &FieldTable, n: usize, entries: Vec<Elem>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::invalid(format!("{} entries do not form a {n}x{n} matrix", entries.len())));
        }
        if entries.iter().any(|&x| x as u32 >= field.order()) {
            return Err(Error::invalid("matrix entry outside the field"));
        }
        let mut scratch = entries.clone();
        if rref(field, &mut scratch, n, n).len() != n {
            return Err(Error::Singular);
        }
        Ok(GroupElement { n, entries })
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, 1)
    }

    /// `a` times the identity; `a` must be non-zero.
    pub fn scalar(n: usize, a: Elem) -> Self {
        assert_ne!(a, 0, "scalar matrix must be invertible");
        let mut entries = vec![0; n * n];
        for i in 0..n {
            entries[i * n + i] = a;
        }
        GroupElement { n, entries }
    }

    pub fn diagonal(field: &FieldTable, diag: &[Elem]) -> Result<Self> {
        let n = diag.len();
        let mut entries = vec![0; n * n];
        for (i, &d) in diag.iter().enumerate() {
            entries[i * n + i] = d;
        }
        Self::new(field, n, entries)
    }

    /// The matrix sending basis vector `e_i` to `e_{perm[i]}`.
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &j in perm {
            if j >= n || std::mem::replace(&mut seen[j], true) {
                return Err(Error::invalid(format!("{perm:?} is not a permutation")));
            }
        }
        let mut entries = vec![0; n * n];
        for (i, &j) in perm.iter().enumerate() {
            entries[i * n + j] = 1;
        }
        Ok(GroupElement { n, entries })
    }

    /// Uniformly random invertible matrix, by rejection sampling.
    pub fn random<R: Rng + ?Sized>(field: &FieldTable, n: usize, rng: &mut R) -> Self {
        loop {
            let entries: Vec<Elem> = (0..n * n).map(|_| rng.gen_range(0..field.order()) as Elem).collect();
            if let Ok(g) = Self::new(field, n, entries) {
                return g;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Elem] {
        &self.entries
    }

    /// The matrix product `self * other`; acting by it means acting by
    /// `self` first.
    pub fn compose(&self, field: &FieldTable, other: &GroupElement) -> Self {
        assert_eq!(self.n, other.n);
        GroupElement { n: self.n, entries: mat_mul(field, &self.entries, &other.entries, self.n, self.n, self.n) }
    }
}

/// One level `L^n_k` with its inverse index.
#[derive(Debug)]
pub struct Level {
    subspaces: Vec<Subspace>,
    index: HashMap<Subspace, u32>,
}

impl Level {
    fn new(subspaces: Vec<Subspace>) -> Self {
        let index = subspaces.iter().enumerate().map(|(i, s)| (s.clone(), i as u32)).collect();
        Level { subspaces, index }
    }

    pub fn len(&self) -> usize {
        self.subspaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subspaces.is_empty()
    }

    pub fn subspaces(&self) -> &[Subspace] {
        &self.subspaces
    }

    pub fn get(&self, i: usize) -> &Subspace {
        &self.subspaces[i]
    }

    pub fn index_of(&self, x: &Subspace) -> Option<usize> {
        self.index.get(x).map(|&i| i as usize)
    }
}

/// The projective space P(n,q): all subspaces of GF(q)^n, graded by dimension.
#[derive(Debug)]
pub struct ProjectiveSpace {
    field: Arc<FieldTable>,
    n: usize,
    cap: u64,
    levels: Vec<OnceLock<Arc<Level>>>,
}

impl ProjectiveSpace {
    pub fn new(q: u64, n: usize) -> Result<Self> {
        Self::with_cap(q, n, DEFAULT_LEVEL_CAP)
    }

    pub fn with_cap(q: u64, n: usize, cap: u64) -> Result<Self> {
        Ok(Self::from_field(Arc::new(FieldTable::from_order(q)?), n, cap))
    }

    pub fn from_field(field: Arc<FieldTable>, n: usize, cap: u64) -> Self {
        ProjectiveSpace { field, n, cap, levels: (0..=n).map(|_| OnceLock::new()).collect() }
    }

    pub fn field(&self) -> &FieldTable {
        &self.field
    }

    pub fn field_arc(&self) -> Arc<FieldTable> {
        self.field.clone()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u64 {
        self.field.order() as u64
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    /// Number of subspaces of dimension `k` (zero outside `0..=n`), checked
    /// against the cap without enumerating.
    pub fn level_size(&self, k: i64) -> Result<usize> {
        if k < 0 || k > self.n as i64 {
            return Ok(0);
        }
        let count = gauss_binomial(self.n as i64, k, self.q());
        match count.to_u64() {
            Some(c) if c <= self.cap => Ok(c as usize),
            _ => Err(Error::CapExceeded {
                what: format!("level {k} of GF({})^{}", self.q(), self.n),
                count: count.to_string(),
                cap: self.cap,
            }),
        }
    }

    pub fn level(&self, k: usize) -> Result<Arc<Level>> {
        if k > self.n {
            return Err(Error::invalid(format!("level {k} does not exist in dimension {}", self.n)));
        }
        if let Some(l) = self.levels[k].get() {
            return Ok(l.clone());
        }
        let subs = enumerate_subspaces(&self.field, self.n, k, self.cap)?;
        Ok(self.levels[k].get_or_init(|| Arc::new(Level::new(subs))).clone())
    }

    /// Containment matrix with rows indexed by `L_s` and columns by `L_t`:
    /// entry 1 where one subspace contains the other.
    pub fn incidence_matrix(&self, s: usize, t: usize, p: u32) -> Result<SparseMatModP> {
        if s > t {
            return Ok(self.incidence_matrix(t, s, p)?.transpose());
        }
        let (lo, hi) = (self.level(s)?, self.level(t)?);
        let inner = enumerate_subspaces(&self.field, t, s, u64::MAX)?;
        let field = &*self.field;
        let columns: Vec<Vec<u32>> = hi
            .subspaces()
            .par_iter()
            .map(|x| x.subspaces_of(field, &inner).iter().map(|y| lo.index_of(y).expect("sub-subspace is enumerated") as u32).collect())
            .collect();
        let triplets = columns.iter().enumerate().flat_map(|(c, rs)| rs.iter().map(move |&r| (r as usize, c, 1)));
        SparseMatModP::from_triplets(lo.len(), hi.len(), p, triplets)
    }

    /// The boundary `M_k -> M_{k-1}`, sending a subspace to the sum of its
    /// hyperplanes. Shape `|L_{k-1}| x |L_k|`; zero-sized outside `1..=n`.
    pub fn boundary_matrix(&self, k: i64, p: u32) -> Result<SparseMatModP> {
        if k < 1 || k > self.n as i64 {
            return Ok(SparseMatModP::zero(self.level_size(k - 1)?, self.level_size(k)?, p));
        }
        self.incidence_matrix(k as usize - 1, k as usize, p)
    }

    /// `∂^i: M_k -> M_{k-i}` as a product of `i` consecutive boundaries.
    pub fn boundary_power(&self, k: i64, i: usize, p: u32) -> Result<SparseMatModP> {
        let mut acc = SparseMatModP::identity(self.level_size(k)?, p);
        for step in 0..i as i64 {
            let d = self.boundary_matrix(k - step, p)?;
            acc = d.mul(&acc)?;
        }
        Ok(acc)
    }

    /// `∂^i` through the closed form `[i]_q! * containment`.
    pub fn boundary_power_closed(&self, k: i64, i: usize, p: u32) -> Result<SparseMatModP> {
        let (rows, cols) = (self.level_size(k - i as i64)?, self.level_size(k)?);
        if rows == 0 || cols == 0 {
            return Ok(SparseMatModP::zero(rows, cols, p));
        }
        let c = q_factorial(i as u32, self.q()) % p;
        let inc = self.incidence_matrix(k as usize - i, k as usize, p)?;
        Ok(inc.scaled(c.to_u64().unwrap()))
    }

    pub fn incidence_rank(&self, s: usize, t: usize, p: u32) -> Result<usize> {
        Ok(rank_mod_p(&self.incidence_matrix(s, t, p)?))
    }

    /// Index of `x g` for every `x` in `L_k`.
    pub fn action_on_level(&self, g: &GroupElement, k: usize) -> Result<Vec<u32>> {
        if g.dim() != self.n {
            return Err(Error::invalid(format!("group element of size {} on dimension {}", g.dim(), self.n)));
        }
        let level = self.level(k)?;
        let field = &*self.field;
        Ok(level
            .subspaces()
            .par_iter()
            .map(|x| level.index_of(&x.act(field, g)).expect("image is a subspace of the same dimension") as u32)
            .collect())
    }

    /// The permutation matrix of `g` on `M_k`: column `x` has its one in row `x g`.
    pub fn permutation_matrix(&self, g: &GroupElement, k: usize, p: u32) -> Result<SparseMatModP> {
        let images = self.action_on_level(g, k)?;
        let n = images.len();
        SparseMatModP::from_triplets(n, n, p, images.iter().enumerate().map(|(c, &r)| (r as usize, c, 1)))
    }

    /// Number of `k`-subspaces fixed by `g`; zero outside `0..=n`.
    pub fn count_fixed_subspaces(&self, g: &GroupElement, k: i64) -> Result<u64> {
        if k < 0 || k > self.n as i64 {
            return Ok(0);
        }
        let images = self.action_on_level(g, k as usize)?;
        Ok(images.iter().enumerate().filter(|&(i, &j)| i == j as usize).count() as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcomb::q_int;

    fn gf(q: u64) -> FieldTable {
        FieldTable::from_order(q).unwrap()
    }

    /// Brute force: distinct row spaces of all k-tuples of vectors.
    fn brute_force_count(field: &FieldTable, n: usize, k: usize) -> usize {
        let q = field.order() as usize;
        let vectors: Vec<Vec<Elem>> = (0..q.pow(n as u32))
            .map(|mut x| {
                (0..n)
                    .map(|_| {
                        let d = x % q;
                        x /= q;
                        d as Elem
                    })
                    .collect()
            })
            .collect();
        let mut seen = std::collections::HashSet::new();
        for combo in (0..vectors.len()).combinations(k) {
            let rows: Vec<Elem> = combo.iter().flat_map(|&v| vectors[v].clone()).collect();
            let s = Subspace::span(field, n, rows).unwrap();
            if s.dim() == k {
                seen.insert(s);
            }
        }
        seen.len()
    }

    #[test]
    fn level_sizes_match_brute_force() {
        for (q, n) in [(2u64, 4usize), (3, 3), (4, 2)] {
            let f = gf(q);
            for k in 0..=n {
                let subs = enumerate_subspaces(&f, n, k, DEFAULT_LEVEL_CAP).unwrap();
                assert_eq!(subs.len(), brute_force_count(&f, n, k), "q={q} n={n} k={k}");
                assert_eq!(subs.len(), gauss_binomial(n as i64, k as i64, q).to_usize().unwrap());
            }
        }
    }

    #[test]
    fn enumeration_is_canonical_and_ordered() {
        let f = gf(3);
        let lines = enumerate_subspaces(&f, 2, 1, 100).unwrap();
        let expected: Vec<Vec<Elem>> = vec![vec![1, 0], vec![1, 1], vec![1, 2], vec![0, 1]];
        assert_eq!(lines.iter().map(|s| s.rows().to_vec()).collect::<Vec<_>>(), expected);
        for s in &lines {
            assert_eq!(&Subspace::span(&f, 2, s.rows().to_vec()).unwrap(), s);
        }
        assert_eq!(enumerate_subspaces(&f, 4, 0, 100).unwrap(), vec![Subspace::zero(4)]);
        assert!(matches!(enumerate_subspaces(&f, 6, 3, 1000), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn boundary_columns_and_rows_have_q_integer_weight() {
        let space = ProjectiveSpace::new(2, 4).unwrap();
        for k in 1..=4usize {
            let d = space.boundary_matrix(k as i64, 3).unwrap();
            assert!(d.column_weights().iter().all(|&w| q_int(k as u32, 2) == w.into()));
            assert!(d.row_weights().iter().all(|&w| q_int(4 - k as u32 + 1, 2) == w.into()));
        }
        let d = ProjectiveSpace::new(3, 2).unwrap().boundary_matrix(1, 2).unwrap();
        assert_eq!(d.to_dense_rows(), vec![vec![1, 1, 1, 1]]);
    }

    #[test]
    fn powers_follow_the_q_factorial_law() {
        let space = ProjectiveSpace::new(2, 3).unwrap();
        let sq = space.boundary_power(2, 2, 7).unwrap();
        assert_eq!(sq, space.boundary_power_closed(2, 2, 7).unwrap());
        assert!(sq.triplets().all(|(_, _, v)| v == 3));
        assert!(space.boundary_power(2, 2, 3).unwrap().is_zero());
        assert_eq!(space.boundary_power(2, 0, 3).unwrap(), SparseMatModP::identity(7, 3));
    }

    #[test]
    fn containment_brute_force() {
        let f = gf(2);
        let space = ProjectiveSpace::new(2, 3).unwrap();
        let inc = space.incidence_matrix(1, 2, 5).unwrap();
        let (lines, planes) = (space.level(1).unwrap(), space.level(2).unwrap());
        for (r, y) in lines.subspaces().iter().enumerate() {
            for (c, x) in planes.subspaces().iter().enumerate() {
                assert_eq!(inc.get(r, c) == 1, x.contains(&f, y));
                assert_eq!(inc.get(r, c) == 1, x.covers(&f, y));
            }
        }
        assert_eq!(space.incidence_matrix(2, 1, 5).unwrap(), inc.transpose());
    }

    #[test]
    fn fixed_subspaces() {
        let space = ProjectiveSpace::new(3, 2).unwrap();
        let f = space.field();
        let d = GroupElement::diagonal(f, &[1, 2]).unwrap();
        assert_eq!(space.count_fixed_subspaces(&d, 1).unwrap(), 2);
        assert_eq!(space.count_fixed_subspaces(&GroupElement::scalar(2, 2), 1).unwrap(), 4);
        assert_eq!(space.count_fixed_subspaces(&GroupElement::identity(2), 0).unwrap(), 1);
        assert!(matches!(GroupElement::new(f, 2, vec![1, 2, 2, 1]), Err(Error::Singular)));
    }

    #[test]
    fn action_is_a_right_action() {
        let space = ProjectiveSpace::new(3, 3).unwrap();
        let f = space.field();
        let g = GroupElement::new(f, 3, vec![1, 1, 0, 0, 1, 2, 2, 0, 1]).unwrap();
        let h = GroupElement::permutation(&[2, 0, 1]).unwrap();
        let gh = g.compose(f, &h);
        for x in space.level(1).unwrap().subspaces() {
            assert_eq!(x.act(f, &gh), x.act(f, &g).act(f, &h));
        }
        let e1 = Subspace::span(f, 3, vec![1, 0, 0]).unwrap();
        assert_eq!(e1.act(f, &h), Subspace::span(f, 3, vec![0, 0, 1]).unwrap());
    }
}
