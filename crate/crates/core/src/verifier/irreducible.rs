use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::homology::HomologyEngine;

/// Where a dimension in an [`IrreducibleDimTable`] came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Provenance {
    /// The homology at the maximal middle index `(k, i)`.
    MaximalMiddleIndex { k: i64, i: i64 },
    /// `D^{(n,0)}` is the trivial module.
    Trivial,
    /// `n - t < 0`, so there is no such module.
    Empty,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrreducibleDim {
    pub dim: u64,
    pub provenance: Provenance,
}

/// Dimensions of the irreducibles `D^{(n-t,t)}` for one `(n, p, q)`, read off
/// the homology at maximal middle indices `(t, 2t - n + 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrreducibleDimTable {
    pub n: i64,
    pub p: u32,
    pub q: u64,
    pub dims: BTreeMap<i64, IrreducibleDim>,
    /// Values of `t` in the derivable range with no maximal middle index.
    pub gaps: Vec<i64>,
}

impl IrreducibleDimTable {
    pub fn derive(engine: &HomologyEngine) -> Result<Self> {
        let (n, m) = (engine.n(), engine.m());
        let mut dims = BTreeMap::new();
        let mut gaps = Vec::new();
        dims.insert(0, IrreducibleDim { dim: 1, provenance: Provenance::Trivial });
        let top = (n + m - 2).div_euclid(2);
        for t in (n + 1) / 2..=top {
            if t > n {
                dims.insert(t, IrreducibleDim { dim: 0, provenance: Provenance::Empty });
                continue;
            }
            let (k, i) = (t, 2 * t - n + 1);
            let pair = engine.pair(k, i.clamp(0, m))?;
            if i != pair.i || !pair.is_maximal_middle_index() {
                gaps.push(t);
                continue;
            }
            let dim = engine.homology_dim(k, i)?.betti;
            dims.insert(t, IrreducibleDim { dim, provenance: Provenance::MaximalMiddleIndex { k, i } });
        }
        Ok(IrreducibleDimTable { n, p: engine.p(), q: engine.q(), dims, gaps })
    }

    /// `dim D^{(n-t,t)}`, if known.
    pub fn dim(&self, t: i64) -> Option<u64> {
        if t > self.n {
            return Some(0);
        }
        self.dims.get(&t).map(|d| d.dim)
    }
}
