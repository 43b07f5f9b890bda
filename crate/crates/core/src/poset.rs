//! Incidence homology of an arbitrary finite ranked poset.
//!
//! Text format, one directive per line (`#` starts a comment):
//!
//! ```text
//! poset <name>
//! elements <N>
//! rank <element> <rank>        once per element, 0 <= element < N
//! cover <upper> <lower>        rank(lower) = rank(upper) - 1
//! ```
//!
//! Ranks may be any integers; they are shifted so that the minimum is 0.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homology::{to_sparse, QuotientSpace, SparseMatModP, SparseVector};
use crate::lattice::ProjectiveSpace;

pub const DEFAULT_BOOLEAN_CAP: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankedPoset {
    name: String,
    rank: Vec<usize>,
    levels: Vec<Vec<usize>>,
    position: Vec<usize>,
    lower_covers: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetHomology {
    pub k: i64,
    pub i: i64,
    pub m: i64,
    pub p: u32,
    pub betti: u64,
    pub kernel_dim: u64,
    pub image_dim: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<SparseVector>>,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

impl RankedPoset {
    /// Build from per-element ranks and `(upper, lower)` cover pairs.
    pub fn new(name: impl Into<String>, ranks: &[i64], covers: &[(usize, usize)]) -> Result<Self> {
        Self::build(name.into(), ranks, covers.iter().map(|&c| (c, 0)))
    }

    fn build(name: String, ranks: &[i64], covers: impl Iterator<Item = ((usize, usize), usize)>) -> Result<Self> {
        // `line` is 0 when the pair did not come from a file
        let fail = |line: usize, msg: String| if line == 0 { Error::invalid(msg) } else { parse_err(line, msg) };
        let Some(&min) = ranks.iter().min() else {
            return Err(Error::invalid("poset has no elements"));
        };
        let rank: Vec<usize> = ranks.iter().map(|&r| (r - min) as usize).collect();
        let top = *rank.iter().max().unwrap();
        let mut levels = vec![Vec::new(); top + 1];
        let mut position = vec![0; rank.len()];
        for (e, &r) in rank.iter().enumerate() {
            position[e] = levels[r].len();
            levels[r].push(e);
        }
        let mut lower_covers = vec![Vec::new(); rank.len()];
        let mut seen = HashSet::new();
        for ((upper, lower), line) in covers {
            for e in [upper, lower] {
                if e >= rank.len() {
                    return Err(fail(line, format!("element {e} does not exist (poset has {} elements)", rank.len())));
                }
            }
            if rank[lower] + 1 != rank[upper] {
                return Err(fail(
                    line,
                    format!("cover {upper} > {lower} joins ranks {} and {}, which are not consecutive", ranks[upper], ranks[lower]),
                ));
            }
            if !seen.insert((upper, lower)) {
                return Err(fail(line, format!("cover {upper} > {lower} is listed twice")));
            }
            lower_covers[upper].push(lower);
        }
        for lc in &mut lower_covers {
            lc.sort_unstable();
        }
        Ok(RankedPoset { name, rank, levels, position, lower_covers })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut name = None;
        let mut count: Option<(usize, usize)> = None;
        let mut ranks: Vec<Option<(i64, usize)>> = Vec::new();
        let mut covers = Vec::new();
        let mut last = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            last = line;
            let content = raw.split('#').next().unwrap().trim();
            if content.is_empty() {
                continue;
            }
            let words: Vec<&str> = content.split_whitespace().collect();
            let num = |s: &str| -> Result<i64> { s.parse().map_err(|_| parse_err(line, format!("expected an integer, found {s:?}"))) };
            let elem = |s: &str| -> Result<usize> {
                let (n, _) = count.ok_or_else(|| parse_err(line, "`elements` must precede ranks and covers"))?;
                let e = num(s)?;
                if e < 0 || e as usize >= n {
                    return Err(parse_err(line, format!("element {e} does not exist (poset has {n} elements)")));
                }
                Ok(e as usize)
            };
            match (words[0], words.len()) {
                ("poset", 2) if name.is_none() => name = Some(words[1].to_string()),
                ("poset", 2) => return Err(parse_err(line, "duplicate `poset` line")),
                ("elements", 2) if count.is_none() => {
                    let n = num(words[1])?;
                    if n <= 0 {
                        return Err(parse_err(line, "poset has no elements"));
                    }
                    count = Some((n as usize, line));
                    ranks = vec![None; n as usize];
                }
                ("elements", 2) => return Err(parse_err(line, "duplicate `elements` line")),
                ("rank", 3) => {
                    let e = elem(words[1])?;
                    let r = num(words[2])?;
                    if ranks[e].replace((r, line)).is_some() {
                        return Err(parse_err(line, format!("rank of element {e} given twice")));
                    }
                }
                ("cover", 3) => covers.push(((elem(words[1])?, elem(words[2])?), line)),
                (word, _) => return Err(parse_err(line, format!("unrecognized directive {word:?} or wrong number of fields"))),
            }
        }
        let name = name.ok_or_else(|| parse_err(last.max(1), "missing `poset <name>` line"))?;
        let (_, count_line) = count.ok_or_else(|| parse_err(last.max(1), "missing `elements <N>` line"))?;
        let ranks = ranks
            .iter()
            .enumerate()
            .map(|(e, r)| r.map(|(r, _)| r).ok_or_else(|| parse_err(count_line, format!("element {e} has no rank"))))
            .collect::<Result<Vec<i64>>>()?;
        Self::build(name, &ranks, covers.into_iter())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "poset {}", self.name).unwrap();
        writeln!(out, "elements {}", self.len()).unwrap();
        for (e, r) in self.rank.iter().enumerate() {
            writeln!(out, "rank {e} {r}").unwrap();
        }
        for (e, lc) in self.lower_covers.iter().enumerate() {
            for l in lc {
                writeln!(out, "cover {e} {l}").unwrap();
            }
        }
        out
    }

    /// Subsets of an `n`-set under inclusion; element `x` is the subset with
    /// bitmask `x`.
    pub fn boolean_lattice(n: usize) -> Result<Self> {
        Self::boolean_lattice_with_cap(n, DEFAULT_BOOLEAN_CAP)
    }

    pub fn boolean_lattice_with_cap(n: usize, cap: usize) -> Result<Self> {
        if n > cap {
            return Err(Error::CapExceeded { what: format!("B_{n}"), count: format!("2^{n}"), cap: cap as u64 });
        }
        let size = 1usize << n;
        let ranks: Vec<i64> = (0..size).map(|x| x.count_ones() as i64).collect();
        let covers: Vec<(usize, usize)> =
            (0..size).flat_map(|x| (0..n).filter(move |b| x >> b & 1 == 1).map(move |b| (x, x ^ (1 << b)))).collect();
        Self::new(format!("B{n}"), &ranks, &covers)
    }

    /// A chain `0 < 1 < ... < len - 1`.
    pub fn chain(len: usize) -> Result<Self> {
        let ranks: Vec<i64> = (0..len as i64).collect();
        let covers: Vec<(usize, usize)> = (1..len).map(|e| (e, e - 1)).collect();
        Self::new(format!("chain{len}"), &ranks, &covers)
    }

    /// All subspaces of GF(q)^n, level by level in canonical order.
    pub fn from_projective_space(space: &ProjectiveSpace) -> Result<Self> {
        let n = space.n();
        let mut offsets = vec![0usize];
        let mut ranks = Vec::new();
        for k in 0..=n {
            let size = space.level_size(k as i64)?;
            ranks.extend(std::iter::repeat_n(k as i64, size));
            offsets.push(offsets[k] + size);
        }
        let mut covers = Vec::new();
        for k in 1..=n {
            let d = space.boundary_matrix(k as i64, 2)?;
            covers.extend(d.triplets().map(|(r, c, _)| (offsets[k] + c, offsets[k - 1] + r)));
        }
        Self::new(format!("P({n},{})", space.q()), &ranks, &covers)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.rank.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rank.is_empty()
    }

    pub fn max_rank(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn rank_of(&self, e: usize) -> usize {
        self.rank[e]
    }

    pub fn lower_covers(&self, e: usize) -> &[usize] {
        &self.lower_covers[e]
    }

    /// Elements of rank `k`; empty outside `0..=max_rank`.
    pub fn level(&self, k: i64) -> &[usize] {
        usize::try_from(k).ok().and_then(|k| self.levels.get(k)).map_or(&[], |l| l.as_slice())
    }

    pub fn level_size(&self, k: i64) -> usize {
        self.level(k).len()
    }

    /// `∂: M_k -> M_{k-1}`, rows and columns in level order.
    pub fn boundary(&self, k: i64, p: u32) -> Result<SparseMatModP> {
        let triplets = self
            .level(k)
            .iter()
            .enumerate()
            .flat_map(|(c, &x)| self.lower_covers[x].iter().map(move |&y| (self.position[y], c, 1)))
            .collect::<Vec<_>>();
        SparseMatModP::from_triplets(self.level_size(k - 1), self.level_size(k), p, triplets)
    }

    /// `∂^i: M_k -> M_{k-i}`.
    pub fn boundary_power(&self, k: i64, i: usize, p: u32) -> Result<SparseMatModP> {
        let mut acc = SparseMatModP::identity(self.level_size(k), p);
        for step in 0..i as i64 {
            acc = self.boundary(k - step, p)?.mul(&acc)?;
        }
        Ok(acc)
    }

    /// Least `m > 1` with `∂^m = 0` on every level. Always exists because
    /// `∂` lowers rank.
    pub fn nilpotency_exponent(&self, p: u32) -> Result<usize> {
        for m in 2..=self.max_rank() + 1 {
            let mut vanishes = true;
            for k in m as i64..=self.max_rank() as i64 {
                if !self.boundary_power(k, m, p)?.is_zero() {
                    vanishes = false;
                    break;
                }
            }
            if vanishes {
                return Ok(m);
            }
        }
        Ok(self.max_rank() + 2)
    }

    /// `∂^m` must vanish wherever two maps of the sequence through `(k, i)` compose.
    fn check_sequence(&self, k: i64, i: i64, m: i64, p: u32) -> Result<()> {
        for level in 0..=self.max_rank() as i64 {
            let on_sequence = (level - k).rem_euclid(m) == 0 || (level - k + i).rem_euclid(m) == 0;
            if on_sequence && level >= m && !self.boundary_power(level, m as usize, p)?.is_zero() {
                return Err(Error::NotHomological(format!("∂^{m} is non-zero on level {level} of {}", self.name)));
            }
        }
        Ok(())
    }

    /// `ker ∂^i / im ∂^{m-i}` at level `k`.
    pub fn homology(&self, k: i64, i: i64, m: i64, p: u32, with_basis: bool) -> Result<PosetHomology> {
        if m < 2 || !(0 < i && i < m) {
            return Err(Error::invalid(format!("need 0 < i < m and m >= 2, got i = {i}, m = {m}")));
        }
        self.check_sequence(k, i, m, p)?;
        let a = self.boundary_power(k, i as usize, p)?;
        let b = self.boundary_power(k + m - i, (m - i) as usize, p)?;
        let (betti, kernel_dim, image_dim, basis) = if with_basis {
            let h = QuotientSpace::new(&a, &b)?;
            let basis = h.representatives().iter().map(|v| to_sparse(v)).collect();
            (h.dim(), h.kernel_dim(), h.image_dim(), Some(basis))
        } else {
            let kernel = a.cols() - crate::homology::rank_mod_p(&a);
            let image = crate::homology::rank_mod_p(&b);
            (kernel - image, kernel, image, None)
        };
        Ok(PosetHomology { k, i, m, p, betti: betti as u64, kernel_dim: kernel_dim as u64, image_dim: image_dim as u64, basis })
    }
}

impl FromStr for RankedPoset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boolean_lattice_shape() {
        let b3 = RankedPoset::boolean_lattice(3).unwrap();
        assert_eq!(b3.len(), 8);
        assert_eq!((0..4).map(|k| b3.level_size(k)).collect::<Vec<_>>(), vec![1, 3, 3, 1]);
        assert_eq!(b3.rank_of(0b101), 2);
        assert_eq!(RankedPoset::boolean_lattice(0).unwrap().len(), 1);
        assert!(RankedPoset::boolean_lattice(21).is_err());
        assert_eq!(RankedPoset::boolean_lattice(2).unwrap().boundary(1, 5).unwrap().to_dense_rows(), vec![vec![1, 1]]);
    }

    #[test]
    fn text_round_trip() {
        let b2 = RankedPoset::boolean_lattice(2).unwrap();
        assert_eq!(RankedPoset::parse(&b2.to_text()).unwrap(), b2);
        let shifted = "poset s\nelements 2\nrank 0 5 # top\nrank 1 4\ncover 0 1\n";
        let p = RankedPoset::parse(shifted).unwrap();
        assert_eq!((p.rank_of(0), p.rank_of(1)), (1, 0));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let cases = [
            ("poset x\nelements 2\nrank 0 0\nrank 1 2\ncover 1 0\n", 5),
            ("poset x\nelements 2\nrank 0 0\nrank 1 1\ncover 1 7\n", 5),
            ("poset x\nelements 2\nrank 0 0\n", 2),
            ("poset x\nelements 1\nrank 0 0\nrank 0 1\n", 4),
            ("poset x\nrank 0 0\n", 2),
            ("# nothing here\n", 1),
            ("poset x\nelements 1\nrank 0 zero\n", 3),
        ];
        for (text, line) in cases {
            match RankedPoset::parse(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?} gave {other:?}"),
            }
        }
        assert!(RankedPoset::parse("").is_err());
    }

    #[test]
    fn nilpotency() {
        let b4 = RankedPoset::boolean_lattice(4).unwrap();
        assert_eq!(b4.nilpotency_exponent(2).unwrap(), 2);
        assert_eq!(b4.nilpotency_exponent(3).unwrap(), 3);
        assert_eq!(RankedPoset::chain(3).unwrap().nilpotency_exponent(5).unwrap(), 3);
        assert_eq!(RankedPoset::chain(1).unwrap().nilpotency_exponent(5).unwrap(), 2);
    }

    #[test]
    fn small_homology() {
        let b2 = RankedPoset::boolean_lattice(2).unwrap();
        let h = b2.homology(1, 1, 2, 2, true).unwrap();
        assert_eq!((h.betti, h.kernel_dim, h.image_dim), (0, 1, 1));
        let b4 = RankedPoset::boolean_lattice(4).unwrap();
        // mod 2 the Boolean lattice is exact: it is the augmented chain complex of a simplex
        assert_eq!(b4.homology(2, 1, 2, 2, false).unwrap().betti, 0);
        assert_eq!(b4.homology(2, 1, 3, 3, false).unwrap().betti, 1);
        assert!(matches!(b4.homology(2, 1, 2, 3, false), Err(Error::NotHomological(_))));
        let chain = RankedPoset::chain(2).unwrap();
        assert_eq!(chain.homology(0, 1, 2, 3, false).unwrap().betti, 0);
        assert_eq!(chain.homology(0, 1, 3, 3, false).unwrap().betti, 1);
    }

    #[test]
    fn projective_space_as_poset() {
        let space = ProjectiveSpace::new(3, 2).unwrap();
        let p = RankedPoset::from_projective_space(&space).unwrap();
        assert_eq!(p.len(), 6);
        assert_eq!(p.homology(1, 1, 2, 2, false).unwrap().betti, 2);
        assert_eq!(p.boundary(1, 2).unwrap(), space.boundary_matrix(1, 2).unwrap());
    }
}
