use crate::error::{Error, Result};

use super::linalg::{kernel_basis, Echelon};
use super::sparse::SparseMatModP;

/// The quotient `ker A / im B` for composable `A: V -> W` and `B: U -> V`,
/// with an explicit basis of coset representatives.
///
/// Representatives are kernel vectors reduced against the image, so each
/// vanishes at every image pivot; they are also fully reduced among
/// themselves, which makes coordinates a matter of reading off entries.
#[derive(Clone, Debug)]
pub struct QuotientSpace {
    image: Echelon,
    reps: Echelon,
    kernel_dim: usize,
}

impl QuotientSpace {
    /// `a` has shape `dim W x dim V`, `b` has shape `dim V x dim U`.
    pub fn new(a: &SparseMatModP, b: &SparseMatModP) -> Result<Self> {
        if a.cols() != b.rows() || a.p() != b.p() {
            return Err(Error::invalid(format!(
                "cannot form a quotient of ker({}x{}) by im({}x{})",
                a.rows(),
                a.cols(),
                b.rows(),
                b.cols()
            )));
        }
        let dim = a.cols();
        let p = a.p();
        let mut image = Echelon::new(dim, p)?;
        for c in 0..b.cols() {
            let (rs, vs) = b.column(c);
            if rs.is_empty() {
                continue;
            }
            let mut v = vec![0u8; dim];
            for (&r, &x) in rs.iter().zip(vs) {
                v[r as usize] = x;
            }
            image.insert(v);
        }
        let kernel = kernel_basis(a);
        let kernel_dim = kernel.len();
        let mut reps = Echelon::new(dim, p)?;
        for mut v in kernel {
            image.reduce(&mut v);
            reps.insert(v);
        }
        if reps.rank() + image.rank() != kernel_dim {
            return Err(Error::NotHomological(format!(
                "image of rank {} is not contained in a kernel of dimension {kernel_dim}",
                image.rank()
            )));
        }
        Ok(QuotientSpace { image, reps, kernel_dim })
    }

    pub fn dim(&self) -> usize {
        self.reps.rank()
    }

    pub fn kernel_dim(&self) -> usize {
        self.kernel_dim
    }

    pub fn image_dim(&self) -> usize {
        self.image.rank()
    }

    pub fn ambient_dim(&self) -> usize {
        self.image.ambient_dim()
    }

    pub fn representatives(&self) -> &[Vec<u8>] {
        self.reps.rows()
    }

    /// Coordinates of the class of `v` in the representative basis. Fails
    /// when `v` is not a cycle.
    pub fn coords(&self, v: &[u8]) -> Result<Vec<u8>> {
        if v.len() != self.ambient_dim() {
            return Err(Error::invalid(format!("vector of length {} in a space of dimension {}", v.len(), self.ambient_dim())));
        }
        let mut w = v.to_vec();
        self.image.reduce(&mut w);
        let coeffs = self.reps.reduce(&mut w);
        if w.iter().any(|&x| x != 0) {
            return Err(Error::invalid("vector does not lie in the kernel"));
        }
        Ok(coeffs)
    }

    pub fn is_boundary(&self, v: &[u8]) -> bool {
        self.image.contains(v)
    }
}
