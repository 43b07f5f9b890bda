use crate::error::{Error, Result};
use crate::qfield::is_prime;

/// The coefficient field GF(p) for `p < 256`, with a full multiplication table.
#[derive(Clone, Debug)]
pub struct ModP {
    p: u8,
    inv: [u8; 256],
    mul: Vec<u8>,
}

impl PartialEq for ModP {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
    }
}

impl Eq for ModP {}

impl ModP {
    pub fn new(p: u32) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if p >= 256 {
            return Err(Error::invalid(format!("coefficient prime {p} must be below 256")));
        }
        let mut mul = vec![0u8; (p * p) as usize];
        let mut inv = [0u8; 256];
        for a in 0..p {
            for b in 0..p {
                let v = (a * b % p) as u8;
                mul[(a * p + b) as usize] = v;
                if v == 1 {
                    inv[a as usize] = b as u8;
                }
            }
        }
        Ok(ModP { p: p as u8, inv, mul })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p as u32
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        let s = a as u16 + b as u16;
        if s >= self.p as u16 {
            (s - self.p as u16) as u8
        } else {
            s as u8
        }
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.p as usize + b as usize]
    }

    /// Inverse of a non-zero element. Zero maps to zero.
    #[inline]
    pub fn inv(&self, a: u8) -> u8 {
        self.inv[a as usize]
    }

    pub fn reduce(&self, x: u64) -> u8 {
        (x % self.p as u64) as u8
    }

    /// Table of `b -> -f*b`, for row updates `row -= f * pivot_row`.
    pub(crate) fn neg_scale_table(&self, f: u8) -> [u8; 256] {
        let mut t = [0u8; 256];
        let nf = self.neg(f);
        for b in 0..self.p {
            t[b as usize] = self.mul(nf, b);
        }
        t
    }

    /// `dst -= f * src` entrywise.
    #[inline]
    pub(crate) fn sub_scaled(&self, dst: &mut [u8], src: &[u8], f: u8) {
        if f == 0 {
            return;
        }
        let t = self.neg_scale_table(f);
        let p = self.p;
        for (d, &s) in dst.iter_mut().zip(src) {
            let x = *d as u16 + t[s as usize] as u16;
            *d = if x >= p as u16 { (x - p as u16) as u8 } else { x as u8 };
        }
    }

    pub(crate) fn scale(&self, v: &mut [u8], f: u8) {
        for x in v {
            *x = self.mul(*x, f);
        }
    }
}
