//! On-disk cache of boundary matrices.
//!
//! A cache file is plain text:
//!
//! ```text
//! qhom-matrix v1
//! <q> <n> <k> <p> <rows> <cols>
//! <row> <col> <value>        one line per non-zero, column-major, 0-based
//! end <sha256 of all preceding bytes, lowercase hex>
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::homology::SparseMatModP;

const MAGIC: &str = "qhom-matrix v1";

/// Identifies the boundary `∂: M_k -> M_{k-1}` of P(n,q) over GF(p).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MatrixKey {
    pub q: u64,
    pub n: i64,
    pub k: i64,
    pub p: u32,
}

pub fn encode_matrix(key: &MatrixKey, m: &SparseMatModP) -> String {
    let mut out = String::with_capacity(32 + 16 * m.nnz());
    writeln!(out, "{MAGIC}").unwrap();
    writeln!(out, "{} {} {} {} {} {}", key.q, key.n, key.k, key.p, m.rows(), m.cols()).unwrap();
    for (r, c, v) in m.triplets() {
        writeln!(out, "{r} {c} {v}").unwrap();
    }
    let digest = hex::encode(Sha256::digest(out.as_bytes()));
    writeln!(out, "end {digest}").unwrap();
    out
}

fn corrupt(msg: impl Into<String>) -> Error {
    Error::Integrity(msg.into())
}

fn fields<const N: usize>(line: &str, what: &str) -> Result<[u64; N]> {
    let parts: Vec<&str> = line.split(' ').collect();
    if parts.len() != N {
        return Err(corrupt(format!("malformed {what} line {line:?}")));
    }
    let mut out = [0u64; N];
    for (o, s) in out.iter_mut().zip(parts) {
        *o = s.parse().map_err(|_| corrupt(format!("malformed {what} line {line:?}")))?;
    }
    Ok(out)
}

pub fn decode_matrix(text: &str) -> Result<(MatrixKey, SparseMatModP)> {
    let body_len = text.trim_end_matches('\n').rfind('\n').map(|i| i + 1).ok_or_else(|| corrupt("truncated cache file"))?;
    let (body, trailer) = text.split_at(body_len);
    let expected = trailer.strip_prefix("end ").and_then(|s| s.strip_suffix('\n')).ok_or_else(|| corrupt("missing end line"))?;
    let actual = hex::encode(Sha256::digest(body.as_bytes()));
    if expected != actual {
        return Err(corrupt(format!("checksum mismatch: recorded {expected}, computed {actual}")));
    }
    let mut lines = body.lines();
    if lines.next() != Some(MAGIC) {
        return Err(corrupt("unrecognized header"));
    }
    let header = lines.next().ok_or_else(|| corrupt("missing shape line"))?;
    let [q, n, k, p, rows, cols] = fields::<6>(header, "shape")?;
    let key = MatrixKey { q, n: n as i64, k: k as i64, p: p as u32 };
    let mut triplets = Vec::new();
    let mut prev = None;
    for line in lines {
        let [r, c, v] = fields::<3>(line, "entry")?;
        if v == 0 || v >= p || r >= rows || c >= cols || prev.is_some_and(|pc| (c, r) <= pc) {
            return Err(corrupt(format!("invalid entry {line:?}")));
        }
        prev = Some((c, r));
        triplets.push((r as usize, c as usize, v));
    }
    let m = SparseMatModP::from_triplets(rows as usize, cols as usize, p as u32, triplets).map_err(|e| corrupt(e.to_string()))?;
    Ok((key, m))
}

/// A directory of cached boundary matrices.
#[derive(Clone, Debug)]
pub struct MatrixCache {
    dir: PathBuf,
}

impl MatrixCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(MatrixCache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key(&self, q: u64, n: i64, k: i64, p: u32) -> MatrixKey {
        MatrixKey { q, n, k, p }
    }

    pub fn path(&self, key: &MatrixKey) -> PathBuf {
        self.dir.join(format!("boundary_q{}_n{}_k{}_p{}.qhm", key.q, key.n, key.k, key.p))
    }

    /// The cached matrix, or `None` if there is no file for `key`.
    pub fn load(&self, key: &MatrixKey) -> Result<Option<SparseMatModP>> {
        let path = self.path(key);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let (found, m) = decode_matrix(&text).map_err(|e| match e {
            Error::Integrity(msg) => Error::Integrity(format!("{}: {msg}", path.display())),
            other => other,
        })?;
        if found != *key {
            return Err(Error::Integrity(format!("{}: header describes {found:?}", path.display())));
        }
        Ok(Some(m))
    }

    pub fn store(&self, key: &MatrixKey, m: &SparseMatModP) -> Result<()> {
        let path = self.path(key);
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        fs::write(&tmp, encode_matrix(key, m))?;
        fs::rename(&tmp, &path)?;
        Ok(())
    }
}
