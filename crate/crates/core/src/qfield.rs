//! Finite field arithmetic for GF(q), q = q0^e.
//!
//! Elements are the integers `0..q`, read as base-`q0` digit vectors of
//! polynomial coefficients with the constant term in the least significant
//! digit. Multiplication goes through log/antilog tables built from a
//! primitive element; addition is digit-wise mod `q0`.

use crate::error::{Error, Result};

/// An element index in `0..q`.
pub type Elem = u16;

/// Largest field order accepted by [`FieldTable::new`].
pub const DEFAULT_FIELD_CAP: u64 = 1 << 16;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Split a prime power into `(q0, e)`. Returns `None` if `q` is not a prime power.
pub fn prime_power_parts(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let mut rest = q;
    let mut e = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Mul,
    Neg,
    Inv,
    Pow,
}

#[derive(Debug, Clone)]
pub struct FieldTable {
    q0: u32,
    e: u32,
    q: u32,
    /// Low-order coefficients of the monic defining polynomial (empty for prime fields).
    modulus: Vec<u32>,
    exp: Vec<Elem>,
    log: Vec<u32>,
}

impl PartialEq for FieldTable {
    fn eq(&self, other: &Self) -> bool {
        self.q0 == other.q0 && self.e == other.e && self.modulus == other.modulus
    }
}

impl Eq for FieldTable {}

impl FieldTable {
    pub fn new(q0: u32, e: u32) -> Result<Self> {
        Self::with_cap(q0, e, DEFAULT_FIELD_CAP)
    }

    pub fn with_cap(q0: u32, e: u32, cap: u64) -> Result<Self> {
        if !is_prime(q0 as u64) {
            return Err(Error::NotPrime(q0 as u64));
        }
        if e < 1 {
            return Err(Error::invalid("extension degree must be at least 1"));
        }
        let order = (q0 as u64).checked_pow(e).filter(|&q| q <= cap.min(DEFAULT_FIELD_CAP));
        let Some(q) = order else {
            return Err(Error::CapExceeded { what: format!("GF({q0}^{e})"), count: format!("{q0}^{e}"), cap: cap.min(DEFAULT_FIELD_CAP) });
        };
        let modulus = if e == 1 { Vec::new() } else { first_irreducible(q0, e) };
        let mut table = FieldTable { q0, e, q: q as u32, modulus, exp: Vec::new(), log: Vec::new() };
        table.build_log_tables();
        Ok(table)
    }

    /// Build GF(q) from its order.
    pub fn from_order(q: u64) -> Result<Self> {
        let (q0, e) = prime_power_parts(q).ok_or_else(|| Error::invalid(format!("{q} is not a prime power")))?;
        Self::new(q0 as u32, e)
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn characteristic(&self) -> u32 {
        self.q0
    }

    pub fn degree(&self) -> u32 {
        self.e
    }

    /// Coefficients `c0..c_{e-1}` of the defining polynomial `x^e + c_{e-1}x^{e-1} + ... + c0`.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.q as Elem
    }

    /// The generator used for the log tables.
    pub fn primitive_element(&self) -> Elem {
        self.exp[1.min(self.exp.len() - 1)]
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.e == 1 {
            let s = a as u32 + b as u32;
            return if s >= self.q { (s - self.q) as Elem } else { s as Elem };
        }
        if self.q0 == 2 {
            return a ^ b;
        }
        let (mut a, mut b) = (a as u32, b as u32);
        let mut out = 0;
        let mut place = 1;
        while a > 0 || b > 0 {
            out += ((a % self.q0 + b % self.q0) % self.q0) * place;
            a /= self.q0;
            b /= self.q0;
            place *= self.q0;
        }
        out as Elem
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        if self.e == 1 {
            return if a == 0 { 0 } else { (self.q - a as u32) as Elem };
        }
        if self.q0 == 2 {
            return a;
        }
        let mut a = a as u32;
        let mut out = 0;
        let mut place = 1;
        while a > 0 {
            out += ((self.q0 - a % self.q0) % self.q0) * place;
            a /= self.q0;
            place *= self.q0;
        }
        out as Elem
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        let l = self.log[a as usize];
        Ok(self.exp[((self.q - 1 - l) % (self.q - 1)) as usize])
    }

    pub fn pow(&self, a: Elem, exp: u64) -> Elem {
        if exp == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let l = (self.log[a as usize] as u64 * (exp % (self.q as u64 - 1))) % (self.q as u64 - 1);
        self.exp[l as usize]
    }

    /// Dispatch a named operation. `b` is the second operand for `Add`/`Mul`,
    /// the exponent for `Pow`, and ignored otherwise.
    pub fn op(&self, op: FieldOp, a: Elem, b: u64) -> Result<Elem> {
        self.check(a)?;
        match op {
            FieldOp::Add | FieldOp::Mul => {
                let b = Elem::try_from(b).ok().filter(|&b| (b as u32) < self.q);
                let b = b.ok_or_else(|| Error::invalid("operand outside the field"))?;
                Ok(if op == FieldOp::Add { self.add(a, b) } else { self.mul(a, b) })
            }
            FieldOp::Neg => Ok(self.neg(a)),
            FieldOp::Inv => self.inv(a),
            FieldOp::Pow => Ok(self.pow(a, b)),
        }
    }

    fn check(&self, a: Elem) -> Result<()> {
        if (a as u32) < self.q {
            Ok(())
        } else {
            Err(Error::invalid(format!("{a} is not an element of GF({})", self.q)))
        }
    }

    /// Multiplication by polynomial arithmetic; only used to seed the tables.
    fn slow_mul(&self, a: u32, b: u32) -> u32 {
        if self.e == 1 {
            return (a as u64 * b as u64 % self.q as u64) as u32;
        }
        let p = self.q0;
        let da = digits(a, p, self.e);
        let db = digits(b, p, self.e);
        let mut prod = vec![0u32; 2 * self.e as usize];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        let e = self.e as usize;
        for deg in (e..prod.len()).rev() {
            let c = prod[deg];
            if c == 0 {
                continue;
            }
            prod[deg] = 0;
            // x^e = -(c0 + c1 x + ... )
            for (j, &m) in self.modulus.iter().enumerate() {
                let idx = deg - e + j;
                prod[idx] = (prod[idx] + (p - (c * m) % p)) % p;
            }
        }
        undigits(&prod[..e], p)
    }

    fn build_log_tables(&mut self) {
        let q = self.q;
        if q == 2 {
            self.exp = vec![1, 1];
            self.log = vec![0, 0];
            return;
        }
        for g in 2..q {
            let mut exp = Vec::with_capacity(2 * (q as usize - 1));
            let mut x = 1u32;
            loop {
                exp.push(x as Elem);
                x = self.slow_mul(x, g);
                if x == 1 {
                    break;
                }
            }
            if exp.len() == q as usize - 1 {
                let mut log = vec![0u32; q as usize];
                for (i, &v) in exp.iter().enumerate() {
                    log[v as usize] = i as u32;
                }
                exp.extend_from_within(..);
                self.exp = exp;
                self.log = log;
                return;
            }
        }
        unreachable!("the multiplicative group of a finite field is cyclic");
    }
}

fn digits(mut a: u32, p: u32, len: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(len as usize);
    for _ in 0..len {
        out.push(a % p);
        a /= p;
    }
    out
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Remainder of `a` modulo monic `b` over GF(p); coefficients low to high.
fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        if lead != 0 {
            for (j, &c) in b.iter().enumerate() {
                r[shift + j] = (r[shift + j] + p - (lead * c) % p) % p;
            }
        }
        r.pop();
    }
    while r.last() == Some(&0) {
        r.pop();
    }
    r
}

/// First monic irreducible polynomial of degree `e` over GF(q0), scanning the
/// low-order coefficient vector as an integer in ascending order.
fn first_irreducible(q0: u32, e: u32) -> Vec<u32> {
    let count = q0.pow(e);
    'candidates: for code in 0..count {
        let mut f = digits(code, q0, e);
        f.push(1);
        for d in 1..=e / 2 {
            for low in 0..q0.pow(d) {
                let mut g = digits(low, q0, d);
                g.push(1);
                if poly_rem(&f, &g, q0).is_empty() {
                    continue 'candidates;
                }
            }
        }
        f.pop();
        return f;
    }
    unreachable!("irreducible polynomials exist in every degree");
}
