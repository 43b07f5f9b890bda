use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::cache::MatrixCache;
use crate::error::{Error, Result};
use crate::lattice::{GroupElement, ProjectiveSpace};
use crate::qcomb::{quantum_char, IndexPair};

use super::linalg::rank_mod_p;
use super::modp::ModP;
use super::quotient::QuotientSpace;
use super::sparse::SparseMatModP;

/// A vector stored as its non-zero `(index, value)` entries.
pub type SparseVector = Vec<(usize, u8)>;

pub fn to_sparse(v: &[u8]) -> SparseVector {
    v.iter().enumerate().filter(|(_, &x)| x != 0).map(|(i, &x)| (i, x)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyResult {
    pub pair: IndexPair,
    pub betti: u64,
    pub is_middle: bool,
    pub kernel_dim: u64,
    pub image_dim: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<SparseVector>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InducedKind {
    /// `∂^t: H_{k,i} -> H_{k-t,i-t}`
    Boundary,
    /// `inc^t: H_{k,i} -> H_{k,i+t}`
    Inclusion,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub level: i64,
    /// The power of `∂` leaving this position of the sequence.
    pub step: i64,
    pub betti: u64,
}

type Cached<K, V> = Mutex<HashMap<K, Arc<V>>>;

/// Homology of the sequences `... <- M_{k-i} <- M_k <- M_{k+m-i} <- ...`
/// of permutation modules of P(n,q) over GF(p), with memoized matrices.
pub struct HomologyEngine {
    space: Arc<ProjectiveSpace>,
    p: u32,
    m: u32,
    cache: Option<MatrixCache>,
    boundaries: Cached<i64, SparseMatModP>,
    powers: Cached<(i64, usize), SparseMatModP>,
    ranks: Mutex<HashMap<(i64, usize), usize>>,
    quotients: Cached<(i64, i64), QuotientSpace>,
}

impl HomologyEngine {
    pub fn new(q: u64, n: usize, p: u32) -> Result<Self> {
        Self::with_space(Arc::new(ProjectiveSpace::new(q, n)?), p)
    }

    pub fn with_space(space: Arc<ProjectiveSpace>, p: u32) -> Result<Self> {
        let m = quantum_char(p, space.q())?;
        ModP::new(p)?;
        Ok(HomologyEngine {
            space,
            p,
            m,
            cache: None,
            boundaries: Mutex::default(),
            powers: Mutex::default(),
            ranks: Mutex::default(),
            quotients: Mutex::default(),
        })
    }

    pub fn with_cache(mut self, cache: MatrixCache) -> Self {
        self.cache = Some(cache);
        self
    }

    pub fn space(&self) -> &ProjectiveSpace {
        &self.space
    }

    pub fn n(&self) -> i64 {
        self.space.n() as i64
    }

    pub fn q(&self) -> u64 {
        self.space.q()
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn m(&self) -> i64 {
        self.m as i64
    }

    pub fn pair(&self, k: i64, i: i64) -> Result<IndexPair> {
        IndexPair::with_m(self.n(), k, i, self.m(), self.p, self.q())
    }

    /// `∂: M_k -> M_{k-1}`, read from the matrix cache when one is attached.
    pub fn boundary(&self, k: i64) -> Result<Arc<SparseMatModP>> {
        if let Some(b) = self.boundaries.lock().unwrap().get(&k) {
            return Ok(b.clone());
        }
        let in_range = (1..=self.n()).contains(&k);
        let b = match &self.cache {
            Some(cache) if in_range => {
                let key = cache.key(self.q(), self.n(), k, self.p);
                match cache.load(&key)? {
                    Some(b) => b,
                    None => {
                        let b = self.space.boundary_matrix(k, self.p)?;
                        cache.store(&key, &b)?;
                        b
                    }
                }
            }
            _ => self.space.boundary_matrix(k, self.p)?,
        };
        let b = Arc::new(b);
        self.boundaries.lock().unwrap().insert(k, b.clone());
        Ok(b)
    }

    /// `∂^i: M_k -> M_{k-i}` as a product of consecutive boundaries.
    pub fn boundary_power(&self, k: i64, i: usize) -> Result<Arc<SparseMatModP>> {
        if let Some(b) = self.powers.lock().unwrap().get(&(k, i)) {
            return Ok(b.clone());
        }
        let b = if i == 0 {
            SparseMatModP::identity(self.space.level_size(k)?, self.p)
        } else {
            let lower = self.boundary(k - i as i64 + 1)?;
            let upper = self.boundary_power(k, i - 1)?;
            lower.mul(&upper)?
        };
        let b = Arc::new(b);
        self.powers.lock().unwrap().insert((k, i), b.clone());
        Ok(b)
    }

    /// Rank of `∂^i` on `M_k`.
    pub fn power_rank(&self, k: i64, i: usize) -> Result<usize> {
        if let Some(&r) = self.ranks.lock().unwrap().get(&(k, i)) {
            return Ok(r);
        }
        let r = rank_mod_p(&*self.boundary_power(k, i)?);
        self.ranks.lock().unwrap().insert((k, i), r);
        Ok(r)
    }

    fn check_step(&self, i: i64) -> Result<()> {
        if !(0..=self.m()).contains(&i) {
            return Err(Error::invalid(format!("step i = {i} must lie in 0..={}", self.m())));
        }
        Ok(())
    }

    /// `∂^i ∂^{m-i}` must vanish on `M_{k+m-i}`.
    fn check_homological(&self, k: i64, i: i64) -> Result<()> {
        let a = self.boundary_power(k, i as usize)?;
        let b = self.boundary_power(k + self.m() - i, (self.m() - i) as usize)?;
        if !a.mul(&b)?.is_zero() {
            return Err(Error::NotHomological(format!("∂^{i} ∂^{} is non-zero at level {k}", self.m() - i)));
        }
        Ok(())
    }

    /// Dimension of `H_{k,i}` from ranks alone.
    pub fn homology_dim(&self, k: i64, i: i64) -> Result<HomologyResult> {
        self.check_step(i)?;
        let pair = self.pair(k, i)?;
        self.check_homological(k, i)?;
        let size = self.space.level_size(k)?;
        let kernel_dim = size - self.power_rank(k, i as usize)?;
        let image_dim = self.power_rank(k + self.m() - i, (self.m() - i) as usize)?;
        let betti = kernel_dim
            .checked_sub(image_dim)
            .ok_or_else(|| Error::NotHomological(format!("image of dimension {image_dim} exceeds kernel of dimension {kernel_dim}")))?;
        Ok(HomologyResult {
            is_middle: pair.is_middle_index(),
            pair,
            betti: betti as u64,
            kernel_dim: kernel_dim as u64,
            image_dim: image_dim as u64,
            basis: None,
        })
    }

    /// `ker ∂^i / im ∂^{m-i}` at level `k`, with coset representatives.
    pub fn quotient(&self, k: i64, i: i64) -> Result<Arc<QuotientSpace>> {
        self.check_step(i)?;
        if let Some(h) = self.quotients.lock().unwrap().get(&(k, i)) {
            return Ok(h.clone());
        }
        let a = self.boundary_power(k, i as usize)?;
        let b = self.boundary_power(k + self.m() - i, (self.m() - i) as usize)?;
        let h = Arc::new(QuotientSpace::new(&a, &b)?);
        self.quotients.lock().unwrap().insert((k, i), h.clone());
        Ok(h)
    }

    /// Coset representatives of a basis of `H_{k,i}`.
    pub fn homology_basis(&self, k: i64, i: i64) -> Result<Vec<Vec<u8>>> {
        Ok(self.quotient(k, i)?.representatives().to_vec())
    }

    pub fn homology(&self, k: i64, i: i64, with_basis: bool) -> Result<HomologyResult> {
        if !with_basis {
            return self.homology_dim(k, i);
        }
        let h = self.quotient(k, i)?;
        let pair = self.pair(k, i)?;
        Ok(HomologyResult {
            is_middle: pair.is_middle_index(),
            pair,
            betti: h.dim() as u64,
            kernel_dim: h.kernel_dim() as u64,
            image_dim: h.image_dim() as u64,
            basis: Some(h.representatives().iter().map(|v| to_sparse(v)).collect()),
        })
    }

    /// Matrix of the map on homology induced by `∂^t` or by the identity,
    /// in the representative bases (target dimension x source dimension).
    pub fn induced_map(&self, kind: InducedKind, k: i64, i: i64, t: i64) -> Result<SparseMatModP> {
        let (tk, ti) = match kind {
            InducedKind::Boundary => (k - t, i - t),
            InducedKind::Inclusion => (k, i + t),
        };
        if t < 0 || !(0..=self.m()).contains(&ti) || !(0..=self.m()).contains(&i) {
            return Err(Error::invalid(format!("no induced {kind:?} of power {t} from step {i} (m = {})", self.m())));
        }
        let source = self.quotient(k, i)?;
        let target = self.quotient(tk, ti)?;
        let map = match kind {
            InducedKind::Boundary => Some(self.boundary_power(k, t as usize)?),
            InducedKind::Inclusion => None,
        };
        let mut triplets = Vec::new();
        for (c, v) in source.representatives().iter().enumerate() {
            let image = match &map {
                Some(d) => d.apply(v),
                None => v.clone(),
            };
            for (r, x) in target.coords(&image)?.into_iter().enumerate() {
                if x != 0 {
                    triplets.push((r, c, x as u64));
                }
            }
        }
        SparseMatModP::from_triplets(target.dim(), source.dim(), self.p, triplets)
    }

    /// Trace of `g` acting on `H_{k,i}`, computed on the representatives.
    pub fn homology_trace(&self, g: &GroupElement, k: i64, i: i64) -> Result<u8> {
        let pair = self.pair(k, i)?;
        if !pair.is_middle_index() {
            return Err(Error::invalid(format!("({k}, {i}) is not a middle index for n = {}", self.n())));
        }
        let h = self.quotient(k, i)?;
        let perm = self.space.permutation_matrix(g, k as usize, self.p)?;
        let field = ModP::new(self.p)?;
        let mut trace = 0u8;
        for (j, v) in h.representatives().iter().enumerate() {
            trace = field.add(trace, h.coords(&perm.apply(v))?[j]);
        }
        Ok(trace)
    }

    /// `sum_t π_{k+tm}(g) - π_{k-i+tm}(g)` reduced mod p, where `π_j` counts
    /// the `j`-subspaces fixed by `g`.
    pub fn fixed_point_sum(&self, g: &GroupElement, k: i64, i: i64) -> Result<u8> {
        let field = ModP::new(self.p)?;
        let mut acc = 0u8;
        for level in 0..=self.n() {
            let plus = (level - k).rem_euclid(self.m()) == 0;
            let minus = (level - k + i).rem_euclid(self.m()) == 0;
            if !plus && !minus {
                continue;
            }
            let pi = field.reduce(self.space.count_fixed_subspaces(g, level)?);
            if plus {
                acc = field.add(acc, pi);
            }
            if minus {
                acc = field.sub(acc, pi);
            }
        }
        Ok(acc)
    }

    /// Homology at every position of the sequence through `(k, i)`, in
    /// ascending level order.
    pub fn sequence_profile(&self, k: i64, i: i64) -> Result<Vec<ProfileEntry>> {
        if !(1..self.m()).contains(&i) {
            return Err(Error::invalid(format!("step i = {i} must lie strictly between 0 and m = {}", self.m())));
        }
        let mut out = Vec::new();
        for level in 0..=self.n() {
            let step = if (level - k).rem_euclid(self.m()) == 0 {
                i
            } else if (level - k + i).rem_euclid(self.m()) == 0 {
                self.m() - i
            } else {
                continue;
            };
            out.push(ProfileEntry { level, step, betti: self.homology_dim(level, step)?.betti });
        }
        Ok(out)
    }
}
