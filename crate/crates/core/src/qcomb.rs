//! q-integers, Gaussian binomials and the index calculus of the homology
//! modules `H^n_{k,i}`: middle indices, dualities, the intervals `T_{k,i}`
//! and the closed-form and recursive Betti numbers.
//!
//! Everything here is exact. Values are computed as big integers and only
//! reduced mod p where a caller needs it.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qfield::is_prime;

/// `[i]_q = 1 + q + ... + q^{i-1}`, with `[0]_q = 0`.
pub fn q_int(i: u32, q: u64) -> BigUint {
    let q = BigUint::from(q);
    let mut acc = BigUint::zero();
    let mut term = BigUint::one();
    for _ in 0..i {
        acc += &term;
        term *= &q;
    }
    acc
}

/// `(i!)_q = [i]_q [i-1]_q ... [1]_q`, with `(0!)_q = 1`.
pub fn q_factorial(i: u32, q: u64) -> BigUint {
    (1..=i).map(|j| q_int(j, q)).product()
}

/// The number of `k`-dimensional subspaces of `GF(q)^n`; the ordinary binomial at `q = 1`.
/// Zero when `k < 0` or `k > n`.
pub fn gauss_binomial(n: i64, k: i64, q: u64) -> BigUint {
    if n < 0 || k < 0 || k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k) as u32;
    let n = n as u32;
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for j in 0..k {
        num *= q_int(n - j, q);
        den *= q_int(j + 1, q);
    }
    num / den
}

/// Least `m > 1` with `[m]_q = 0` in GF(p). `q = 1` is the limit case and gives `m = p`.
pub fn quantum_char(p: u32, q: u64) -> Result<u32> {
    if !is_prime(p as u64) {
        return Err(Error::NotPrime(p as u64));
    }
    if q == 0 || q.is_multiple_of(p as u64) {
        return Err(Error::CharacteristicDividesOrder { p, q });
    }
    let q = q % p as u64;
    let p64 = p as u64;
    let mut term = 1u64;
    let mut sum = 0u64;
    for i in 1..=p {
        sum = (sum + term) % p64;
        term = term * q % p64;
        if i > 1 && sum == 0 {
            return Ok(i);
        }
    }
    unreachable!("[p]_q vanishes mod p whenever the order of q does not")
}

/// Parameters `(n, k, i)` of a homology module together with the coefficient
/// prime `p`, the field order `q` and the nilpotency exponent `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndexPair {
    pub n: i64,
    pub k: i64,
    pub i: i64,
    pub m: i64,
    pub p: u32,
    pub q: u64,
}

/// Members `lo..=hi` of an interval `T_{k,i}`; members above `n` index zero modules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TInterval {
    pub n: i64,
    pub lo: i64,
    pub hi: i64,
}

impl TInterval {
    pub fn members(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }

    /// `true` when `D^{(n-t,t)}` is zero because `n - t < 0`.
    pub fn vanishes(&self, t: i64) -> bool {
        t > self.n
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1).max(0) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl IndexPair {
    /// Projective-space parameters; `m` is the quantum characteristic of `q` in GF(p).
    pub fn new(n: i64, k: i64, i: i64, p: u32, q: u64) -> Result<Self> {
        let m = quantum_char(p, q)? as i64;
        Self::with_m(n, k, i, m, p, q)
    }

    /// Parameters with an explicit exponent `m`, e.g. the `q = 1` limit or a generic poset.
    pub fn with_m(n: i64, k: i64, i: i64, m: i64, p: u32, q: u64) -> Result<Self> {
        if n < 0 {
            return Err(Error::invalid(format!("n = {n} is negative")));
        }
        if m < 2 {
            return Err(Error::invalid(format!("m = {m} must be at least 2")));
        }
        if !(0..=m).contains(&i) {
            return Err(Error::invalid(format!("i = {i} outside 0..={m}")));
        }
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if q == 0 || q.is_multiple_of(p as u64) {
            return Err(Error::CharacteristicDividesOrder { p, q });
        }
        Ok(IndexPair { n, k, i, m, p, q })
    }

    /// Same `n, m, p, q` with a different `(k, i)`.
    pub fn at(&self, k: i64, i: i64) -> Result<Self> {
        Self::with_m(self.n, k, i, self.m, self.p, self.q)
    }

    /// Same `k, i, m, p, q` in a different ambient dimension.
    pub fn in_dim(&self, n: i64) -> Result<Self> {
        Self::with_m(n, self.k, self.i, self.m, self.p, self.q)
    }

    pub fn is_middle_index(&self) -> bool {
        let IndexPair { n, k, i, m, .. } = *self;
        let s = 2 * k + m - i;
        (0..=n).contains(&k) && 0 < i && i < m && n < s && s < n + m
    }

    pub fn is_maximal_middle_index(&self) -> bool {
        self.is_middle_index() && 2 * self.k - self.i == self.n - 1
    }

    /// Canonical representative `(b, b - a)`, `0 <= a < b <= m - 1`, of the
    /// pairs that define the same sequence `M^n_{k,i}`.
    pub fn sequence_key(&self) -> Result<Self> {
        if !(0 < self.i && self.i < self.m) {
            return Err(Error::invalid(format!("i = {} outside the open range (0, {})", self.i, self.m)));
        }
        let top = self.k.rem_euclid(self.m);
        let bottom = (self.k - self.i).rem_euclid(self.m);
        let (a, b) = if bottom < top { (bottom, top) } else { (top, bottom) };
        self.at(b, b - a)
    }

    /// The two dual index pairs `(n - k, m - i)` and `(k, 2k - n + m - i)`.
    pub fn dual_indices(&self) -> ((i64, i64), (i64, i64)) {
        let IndexPair { n, k, i, m, .. } = *self;
        ((n - k, m - i), (k, 2 * k - n + m - i))
    }

    /// The interval `T_{k,i}` indexing the irreducible summands `D^{(n-t,t)}`.
    pub fn t_interval(&self) -> Result<TInterval> {
        if !self.is_middle_index() {
            return Err(Error::invalid(format!("({}, {}) is not a middle index for n = {}", self.k, self.i, self.n)));
        }
        let IndexPair { n, k, i, m, .. } = *self;
        let upper_half = 2 * k >= n;
        let low_step = 2 * i <= m - n + 2 * k;
        let lo = if upper_half { k } else { n - k };
        let hi = if low_step { n - k + i - 1 } else { k + m - i - 1 };
        Ok(TInterval { n, lo, hi })
    }

    /// Alternating sum `sum_t C(n, k+tm)_q - C(n, k-i+tm)_q` over all levels of the sequence.
    pub fn euler_characteristic(&self) -> BigInt {
        let IndexPair { n, k, i, m, q, .. } = *self;
        let mut acc = BigInt::zero();
        for level in 0..=n {
            if (level - k).rem_euclid(m) == 0 {
                acc += BigInt::from(gauss_binomial(n, level, q));
            }
            if (level - k + i).rem_euclid(m) == 0 {
                acc -= BigInt::from(gauss_binomial(n, level, q));
            }
        }
        acc
    }

    /// `beta^n_{k,i}` from the Euler characteristic; zero off middle indices.
    pub fn betti_closed_form(&self) -> BigUint {
        if !self.is_middle_index() {
            return BigUint::zero();
        }
        let chi = self.euler_characteristic();
        assert!(!chi.is_negative(), "negative Euler characteristic at middle index {self:?}");
        chi.to_biguint().unwrap()
    }

    /// `beta^n_{k,i}` from the branching recursion
    /// `beta^n_{k,i} = beta^{n-1}_{k,i+1} + beta^{n-1}_{k-1,i-1} + beta^{n-2}_{k-1,i} (q^{n-1} - 1)`
    /// down to `n <= 1`.
    pub fn betti_recurrence(&self) -> BigUint {
        let mut memo = HashMap::new();
        betti_rec(self, self.n, self.k, self.i, &mut memo)
    }

    /// Numeric form of the leading-term statement: `|beta - P| < q^D` where
    /// `P = (q^{n-1}-1)(q^{n-3}-1)...(q^eps-1)` and `D = (n-1)+(n-3)+...+eps`.
    pub fn leading_term_check(&self) -> bool {
        if !self.is_middle_index() {
            return false;
        }
        let (product, degree) = leading_product(self.n, self.q);
        let bound = BigInt::from(self.q).pow(degree as u32);
        let beta = BigInt::from(self.betti_closed_form());
        let product = BigInt::from(product);
        beta >= &product - &bound && beta < product + bound
    }
}

fn betti_rec(base: &IndexPair, n: i64, k: i64, i: i64, memo: &mut HashMap<(i64, i64, i64), BigUint>) -> BigUint {
    if n < 0 || k < 0 || k > n || i <= 0 || i >= base.m {
        return BigUint::zero();
    }
    if n <= 1 {
        return IndexPair { n, k, i, ..*base }.betti_closed_form();
    }
    if let Some(v) = memo.get(&(n, k, i)) {
        return v.clone();
    }
    let singer = BigUint::from(base.q).pow((n - 1) as u32) - BigUint::one();
    let v = betti_rec(base, n - 1, k, i + 1, memo)
        + betti_rec(base, n - 1, k - 1, i - 1, memo)
        + betti_rec(base, n - 2, k - 1, i, memo) * singer;
    memo.insert((n, k, i), v.clone());
    v
}

/// `(q^{n-1}-1)(q^{n-3}-1)...(q^eps-1)` and the sum of its exponents,
/// with `eps = 2` for odd `n` and `1` for even `n`.
pub fn leading_product(n: i64, q: u64) -> (BigUint, u64) {
    let eps = if n % 2 == 1 { 2 } else { 1 };
    let q = BigUint::from(q);
    let mut product = BigUint::one();
    let mut degree = 0u64;
    let mut j = n - 1;
    while j >= eps {
        product *= q.pow(j as u32) - BigUint::one();
        degree += j as u64;
        j -= 2;
    }
    (product, degree)
}

/// The unique non-zero Betti number for `m(p,q) = 2` (product formula) or
/// `m(p,q) = 3` (two-term recursion from `beta^0 = beta^1 = 1`).
pub fn betti_special(m: u32, n: u32, p: u32, q: u64) -> Result<BigUint> {
    let actual = quantum_char(p, q)?;
    if actual != m || !(m == 2 || m == 3) {
        return Err(Error::invalid(format!("m(p={p}, q={q}) = {actual}; special formulas need m = {m} in {{2, 3}}")));
    }
    if m == 2 {
        if n % 2 == 1 {
            return Ok(BigUint::zero());
        }
        return Ok(leading_product(n as i64, q).0);
    }
    let (mut prev, mut cur) = (BigUint::one(), BigUint::one());
    for j in 2..=n {
        let next = &cur + &prev * (BigUint::from(q).pow(j - 1) - BigUint::one());
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Reduce a big integer mod `p`.
pub fn mod_p(x: &BigUint, p: u32) -> u32 {
    (x % p).to_u32().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(n: i64, k: i64, i: i64, p: u32, q: u64) -> IndexPair {
        IndexPair::new(n, k, i, p, q).unwrap()
    }

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn q_integers_and_factorials() {
        assert_eq!(q_int(0, 5), big(0));
        assert_eq!(q_int(2, 3), big(4));
        assert_eq!(q_int(3, 2), big(7));
        assert_eq!(q_factorial(0, 2), big(1));
        assert_eq!(q_factorial(2, 3), big(4));
        assert_eq!(q_factorial(3, 2), big(21));
    }

    #[test]
    fn gaussian_binomials() {
        assert_eq!(gauss_binomial(4, 2, 2), big(35));
        assert_eq!(gauss_binomial(2, 1, 3), big(4));
        assert_eq!(gauss_binomial(7, 0, 5), big(1));
        assert_eq!(gauss_binomial(5, 2, 1), big(10));
        assert_eq!(gauss_binomial(3, 4, 2), big(0));
        assert_eq!(gauss_binomial(3, -1, 2), big(0));
        // exceeds u64
        assert!(gauss_binomial(10, 5, 2) > big(0) && gauss_binomial(20, 10, 2) > big(u64::MAX));
    }

    #[test]
    fn quantum_characteristic() {
        assert_eq!(quantum_char(3, 2).unwrap(), 2);
        assert_eq!(quantum_char(7, 2).unwrap(), 3);
        assert_eq!(quantum_char(2, 3).unwrap(), 2);
        assert_eq!(quantum_char(5, 2).unwrap(), 4);
        assert_eq!(quantum_char(3, 4).unwrap(), 3);
        assert_eq!(quantum_char(5, 1).unwrap(), 5);
        assert!(matches!(quantum_char(2, 4), Err(Error::CharacteristicDividesOrder { .. })));
        assert!(quantum_char(4, 3).is_err());
    }

    #[test]
    fn quantum_char_factorial_characterisation() {
        for p in [2u32, 3, 5, 7, 11, 13] {
            for q in [1u64, 2, 3, 4, 5, 7, 8, 9] {
                let Ok(m) = quantum_char(p, q) else { continue };
                assert!(m >= 2);
                assert_eq!(mod_p(&q_factorial(m, q), p), 0);
                for i in 0..m {
                    assert_ne!(mod_p(&q_factorial(i, q), p), 0, "p={p} q={q} i={i}");
                }
            }
        }
    }

    #[test]
    fn middle_index_examples() {
        let p = IndexPair::with_m(2, 1, 1, 2, 3, 2).unwrap();
        assert!(p.is_middle_index());
        assert!(!pair(3, 2, 1, 7, 2).is_middle_index());
        for n in (1..9).step_by(2) {
            for k in 0..=n {
                assert!(!pair(n, k, 1, 3, 2).is_middle_index());
            }
        }
        assert!(pair(3, 2, 2, 7, 2).is_maximal_middle_index());
        assert!(!pair(3, 1, 1, 7, 2).is_maximal_middle_index());
        // n = 0: 2k - i = -1 forces (0, 1)
        for i in 1..3 {
            let x = pair(0, 0, i, 7, 2);
            assert_eq!(x.is_maximal_middle_index(), x.is_middle_index() && i == 1);
        }
    }

    #[test]
    fn sequence_keys() {
        // m = 5: p = 11, q = 3 (3^5 = 243 = 1 mod 11)
        let a = IndexPair::new(10, 4, 2, 11, 3).unwrap();
        assert_eq!(a.m, 5);
        assert_eq!(a.sequence_key().unwrap(), a);
        let b = a.at(2, 3).unwrap();
        assert_eq!(b.sequence_key().unwrap(), a);
        // the levels of both sequences coincide
        let levels = |x: &IndexPair| {
            let mut v: Vec<(i64, i64)> = (-2..=20)
                .filter_map(|l| {
                    if (l - x.k).rem_euclid(x.m) == 0 {
                        Some((l, x.i))
                    } else if (l - x.k + x.i).rem_euclid(x.m) == 0 {
                        Some((l, x.m - x.i))
                    } else {
                        None
                    }
                })
                .collect();
            v.sort();
            v
        };
        assert_eq!(levels(&a), levels(&b));
        let m2 = pair(6, 3, 1, 3, 2);
        let keys: std::collections::HashSet<_> = (0..=6).map(|k| m2.at(k, 1).unwrap().sequence_key().unwrap()).collect();
        assert_eq!(keys.len(), 1);
        assert!(a.at(4, 0).unwrap().sequence_key().is_err());
    }

    #[test]
    fn key_count_is_m_choose_2() {
        for (p, q) in [(7u32, 2u64), (5, 2), (11, 3), (13, 2)] {
            let base = IndexPair::new(20, 0, 1, p, q).unwrap();
            let m = base.m;
            let mut keys = std::collections::HashSet::new();
            for k in 0..=20 {
                for i in 1..m {
                    keys.insert(base.at(k, i).unwrap().sequence_key().unwrap());
                }
            }
            assert_eq!(keys.len() as i64, m * (m - 1) / 2);
        }
    }

    #[test]
    fn dual_index_examples() {
        let x = IndexPair::new(10, 4, 2, 11, 3).unwrap();
        assert_eq!(x.dual_indices(), ((6, 3), (4, 1)));
        assert_eq!(pair(3, 1, 1, 7, 2).dual_indices(), ((2, 2), (1, 1)));
        // self-dual under the first duality
        let s = IndexPair::new(4, 2, 2, 5, 2).unwrap();
        assert_eq!(s.dual_indices().0, (2, 2));
    }

    #[test]
    fn t_intervals() {
        let t = pair(3, 1, 1, 7, 2).t_interval().unwrap();
        assert_eq!(t.members().collect::<Vec<_>>(), vec![2]);
        let t = pair(3, 2, 2, 7, 2).t_interval().unwrap();
        assert_eq!(t.members().collect::<Vec<_>>(), vec![2]);
        assert!(pair(3, 1, 2, 7, 2).t_interval().is_err());
        // maximal middle indices give the singleton {k} or {n - k}
        for (p, q) in [(7u32, 2u64), (5, 2), (13, 2), (11, 3)] {
            for n in 0..9 {
                let base = IndexPair::new(n, 0, 1, p, q).unwrap();
                for k in 0..=n {
                    for i in 1..base.m {
                        let x = base.at(k, i).unwrap();
                        if x.is_maximal_middle_index() {
                            let t = x.t_interval().unwrap();
                            assert_eq!(t.len(), 1);
                            assert!(t.lo == k || t.lo == n - k);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(pair(4, 2, 1, 3, 2).betti_closed_form(), big(7));
        assert_eq!(pair(3, 1, 1, 7, 2).betti_closed_form(), big(5));
        assert_eq!(pair(2, 1, 1, 2, 3).betti_closed_form(), big(2));
        assert_eq!(pair(3, 1, 2, 7, 2).betti_closed_form(), big(0));
        assert_eq!(pair(4, 2, 2, 7, 2).betti_closed_form(), big(19));
    }

    #[test]
    fn recurrence_examples() {
        assert_eq!(pair(4, 2, 2, 7, 2).betti_recurrence(), big(19));
        assert_eq!(pair(1, 0, 1, 7, 2).betti_recurrence(), pair(1, 0, 1, 7, 2).betti_closed_form());
        for n in (0..10).step_by(2) {
            let x = pair(n, n / 2, 1, 3, 2);
            assert_eq!(x.betti_recurrence(), leading_product(n, 2).0);
        }
    }

    #[test]
    fn special_cases() {
        assert_eq!(betti_special(2, 2, 2, 3).unwrap(), big(2));
        assert_eq!(betti_special(3, 4, 7, 2).unwrap(), big(19));
        assert_eq!(betti_special(3, 5, 7, 2).unwrap(), big(94));
        assert_eq!(betti_special(2, 5, 3, 2).unwrap(), big(0));
        assert!(betti_special(4, 4, 5, 2).is_err());
        assert!(betti_special(2, 4, 3, 4).is_err());
    }

    #[test]
    fn leading_terms() {
        assert!(pair(3, 1, 1, 7, 2).leading_term_check());
        assert!(pair(4, 2, 1, 3, 2).leading_term_check());
        for n in (0..12).step_by(2) {
            let x = pair(n, n / 2, 1, 2, 3);
            assert_eq!(x.betti_closed_form(), leading_product(n, 3).0);
            assert!(x.leading_term_check());
        }
        assert!(!pair(3, 1, 2, 7, 2).leading_term_check());
    }

    #[test]
    fn n10_m5_example_orbit() {
        // (4,2), (6,3), (4,1), (6,4) for n = 10, m = 5
        for q in [3u64] {
            let x = IndexPair::new(10, 4, 2, 11, q).unwrap();
            let b = x.betti_closed_form();
            assert!(b > big(0));
            for (k, i) in [(6, 3), (4, 1), (6, 4)] {
                assert_eq!(x.at(k, i).unwrap().betti_closed_form(), b);
            }
        }
    }

    #[test]
    fn rejects_invalid_pairs() {
        assert!(IndexPair::new(3, 1, 4, 7, 2).is_err());
        assert!(IndexPair::new(-1, 0, 1, 7, 2).is_err());
        assert!(IndexPair::new(3, 1, 1, 2, 4).is_err());
        assert!(IndexPair::with_m(3, 1, 1, 1, 7, 2).is_err());
    }
}
