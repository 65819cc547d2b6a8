//! GF(p^e) with a polynomial-basis representation and full exp/log tables.
//!
//! Elements are indices in 0..p^e: the index encodes the coefficient vector
//! (c_0, ..., c_{e-1}) over GF(p) as sum c_i * p^i, so 0 is the zero element
//! and the index doubles as the point label of the vector space V.

use crate::arith;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

pub type Elt = u64;

/// Default ceiling on p^e.
pub const DEFAULT_ORDER_BOUND: u64 = 1 << 20;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FiniteField {
    pub p: u64,
    pub e: u32,
    /// Monic irreducible modulus, modulus[i] = coefficient of t^i, length e+1.
    pub modulus: Vec<u64>,
    order: u64,
    /// exp[i] = g^i for the fixed primitive element g; length order-1.
    exp: Vec<Elt>,
    /// log[x] for x != 0; log[0] is a sentinel.
    log: Vec<u64>,
}

impl FiniteField {
    pub fn new(p: u64, e: u32) -> Result<Self> {
        Self::with_bound(p, e, DEFAULT_ORDER_BOUND)
    }

    pub fn with_bound(p: u64, e: u32, bound: u64) -> Result<Self> {
        if !arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if e == 0 {
            return Err(Error::Precondition("extension degree must be >= 1".into()));
        }
        let order = (p as u128).checked_pow(e).filter(|&o| o <= bound as u128).ok_or(
            Error::BoundExceeded(p.checked_pow(e).unwrap_or(u64::MAX), bound),
        )? as u64;

        let modulus = smallest_irreducible(p, e);
        let mut field = FiniteField {
            p,
            e,
            modulus,
            order,
            exp: Vec::new(),
            log: Vec::new(),
        };
        let g = field.find_primitive();
        field.build_tables(g);
        Ok(field)
    }

    /// Rebuild tables from the serialized header (p, e, modulus).
    pub fn from_parts(p: u64, e: u32, modulus: Vec<u64>) -> Result<Self> {
        let f = Self::new(p, e)?;
        if f.modulus != modulus {
            return Err(Error::Precondition(format!(
                "modulus mismatch for GF({p}^{e}): expected {:?}, got {modulus:?}",
                f.modulus
            )));
        }
        Ok(f)
    }

    /// Structural validation of deserialized tables: sizes, the canonical
    /// modulus, and the exp/log bijection. Intended for cache loads whose
    /// integrity is already protected by a checksum.
    pub fn validate_tables(self) -> Result<Self> {
        let bad = |msg: &str| Error::Precondition(format!("invalid field tables: {msg}"));
        if !arith::is_prime(self.p) || self.e == 0 {
            return Err(bad("parameters"));
        }
        let order = (self.p as u128).pow(self.e);
        if order > DEFAULT_ORDER_BOUND as u128 || order != self.order as u128 {
            return Err(bad("order"));
        }
        if self.modulus != smallest_irreducible(self.p, self.e) {
            return Err(bad("modulus"));
        }
        if self.exp.len() as u64 != self.order - 1
            || self.log.len() as u64 != self.order
            || self.exp.first() != Some(&1)
        {
            return Err(bad("table sizes"));
        }
        let mut seen = vec![false; self.order as usize];
        for (i, &x) in self.exp.iter().enumerate() {
            if x == 0 || x >= self.order || seen[x as usize] || self.log[x as usize] != i as u64 {
                return Err(bad("exp/log tables"));
            }
            seen[x as usize] = true;
        }
        Ok(self)
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn zero(&self) -> Elt {
        0
    }

    pub fn one(&self) -> Elt {
        1
    }

    /// The fixed primitive element g (lexicographically smallest, coefficients
    /// compared from the constant term upward).
    pub fn primitive_element(&self) -> Elt {
        self.exp[1]
    }

    pub fn coeffs(&self, x: Elt) -> Vec<u64> {
        let mut x = x;
        (0..self.e)
            .map(|_| {
                let c = x % self.p;
                x /= self.p;
                c
            })
            .collect()
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> Elt {
        assert_eq!(coeffs.len(), self.e as usize);
        coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * self.p + c % self.p)
    }

    pub fn add(&self, a: Elt, b: Elt) -> Elt {
        let (mut a, mut b) = (a, b);
        let mut out = 0u64;
        let mut base = 1u64;
        for _ in 0..self.e {
            out += (a % self.p + b % self.p) % self.p * base;
            a /= self.p;
            b /= self.p;
            base *= self.p;
        }
        out
    }

    pub fn neg(&self, a: Elt) -> Elt {
        let mut a = a;
        let mut out = 0u64;
        let mut base = 1u64;
        for _ in 0..self.e {
            out += (self.p - a % self.p) % self.p * base;
            a /= self.p;
            base *= self.p;
        }
        out
    }

    pub fn sub(&self, a: Elt, b: Elt) -> Elt {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Elt, b: Elt) -> Elt {
        if a == 0 || b == 0 {
            return 0;
        }
        let m = self.order - 1;
        self.exp[((self.log[a as usize] + self.log[b as usize]) % m) as usize]
    }

    pub fn inv(&self, a: Elt) -> Result<Elt> {
        if a == 0 {
            return Err(Error::ZeroLog);
        }
        let m = self.order - 1;
        Ok(self.exp[((m - self.log[a as usize]) % m) as usize])
    }

    pub fn discrete_log(&self, x: Elt) -> Result<u64> {
        if x == 0 {
            return Err(Error::ZeroLog);
        }
        Ok(self.log[x as usize])
    }

    pub fn exp_of(&self, k: u64) -> Elt {
        self.exp[(k % (self.order - 1)) as usize]
    }

    pub fn pow(&self, a: Elt, k: u64) -> Elt {
        if a == 0 {
            return if k == 0 { 1 } else { 0 };
        }
        let m = self.order - 1;
        let idx = (self.log[a as usize] as u128 * k as u128 % m as u128) as usize;
        self.exp[idx]
    }

    /// x^(q^j) with q = p^d; the j-th power of the Frobenius over the
    /// subfield of order p^d. Requires d | e.
    pub fn frobenius(&self, x: Elt, j: u32, d: u32) -> Result<Elt> {
        if self.e % d != 0 {
            return Err(Error::BadSubfieldDegree { d, e: self.e });
        }
        if x == 0 {
            return Ok(0);
        }
        let m = self.order - 1;
        let q = arith::pow_mod(self.p % m, d as u64, m);
        let qj = arith::pow_mod(q, j as u64, m);
        Ok(self.exp[((self.log[x as usize] as u128 * qj as u128) % m as u128) as usize])
    }

    pub fn elements(&self) -> impl Iterator<Item = Elt> {
        0..self.order
    }

    /// Elements in lexicographic coefficient order (constant term first).
    fn lex_elements(&self) -> impl Iterator<Item = Elt> + '_ {
        let p = self.p;
        let e = self.e;
        (0..self.order).map(move |k| {
            // read k as big-endian digits (c0 most significant), emit index
            let mut k = k;
            let mut digits = vec![0u64; e as usize];
            for i in (0..e as usize).rev() {
                digits[i] = k % p; // digits[0] = c0 after the loop
                k /= p;
            }
            digits
                .iter()
                .rev()
                .fold(0u64, |acc, &c| acc * p + c)
        })
    }

    // -- construction internals: raw polynomial arithmetic, no tables --

    fn poly_mul(&self, a: Elt, b: Elt) -> Elt {
        poly_mul_mod(self.p, self.e, &self.modulus, a, b)
    }

    fn poly_pow(&self, mut a: Elt, mut k: u64) -> Elt {
        let mut acc = 1u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.poly_mul(acc, a);
            }
            a = self.poly_mul(a, a);
            k >>= 1;
        }
        acc
    }

    fn find_primitive(&self) -> Elt {
        let m = self.order - 1;
        if m == 1 {
            return 1;
        }
        let primes = arith::distinct_prime_factors(m);
        for x in self.lex_elements() {
            if x == 0 {
                continue;
            }
            if primes.iter().all(|&r| self.poly_pow(x, m / r) != 1) {
                return x;
            }
        }
        unreachable!("GF({}^{}) has a primitive element", self.p, self.e)
    }

    fn build_tables(&mut self, g: Elt) {
        let m = (self.order - 1) as usize;
        let mut exp = Vec::with_capacity(m);
        let mut log = vec![u64::MAX; self.order as usize];
        let mut cur = 1u64;
        for i in 0..m {
            exp.push(cur);
            log[cur as usize] = i as u64;
            cur = self.poly_mul(cur, g);
        }
        debug_assert_eq!(cur, 1);
        self.exp = exp;
        self.log = log;
    }
}

fn poly_mul_mod(p: u64, e: u32, modulus: &[u64], a: Elt, b: Elt) -> Elt {
    let e = e as usize;
    let to_coeffs = |mut x: u64| -> Vec<u64> {
        (0..e)
            .map(|_| {
                let c = x % p;
                x /= p;
                c
            })
            .collect()
    };
    let ca = to_coeffs(a);
    let cb = to_coeffs(b);
    let mut prod = vec![0u64; 2 * e - 1];
    for (i, &x) in ca.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in cb.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    // reduce by the monic modulus
    for i in (e..2 * e - 1).rev() {
        let c = prod[i];
        if c == 0 {
            continue;
        }
        prod[i] = 0;
        for k in 0..e {
            let sub = c * modulus[k] % p;
            prod[i - e + k] = (prod[i - e + k] + p * p - sub) % p;
        }
    }
    prod[..e].iter().rev().fold(0u64, |acc, &c| acc * p + c)
}

/// The lexicographically smallest monic irreducible of degree e over GF(p)
/// (coefficient vectors compared from the constant term upward).
fn smallest_irreducible(p: u64, e: u32) -> Vec<u64> {
    if e == 1 {
        return vec![0, 1]; // t
    }
    let e = e as usize;
    let total = p.pow(e as u32);
    for k in 0..total {
        // big-endian digits: c0 is the most significant, so lex order
        let mut kk = k;
        let mut coeffs = vec![0u64; e];
        for i in (0..e).rev() {
            coeffs[i] = kk % p;
            kk /= p;
        }
        let mut modulus = coeffs.clone();
        modulus.push(1);
        if is_irreducible(p, &modulus) {
            return modulus;
        }
    }
    unreachable!("irreducible polynomials of degree {e} over GF({p}) exist")
}

/// Trial division by all monic polynomials of degree 1..=deg/2.
fn is_irreducible(p: u64, poly: &[u64]) -> bool {
    let deg = poly.len() - 1;
    if poly[0] == 0 {
        return deg == 1; // divisible by t
    }
    for d in 1..=deg / 2 {
        let count = p.pow(d as u32);
        for k in 0..count {
            let mut kk = k;
            let mut div = vec![0u64; d + 1];
            for c in div.iter_mut().take(d) {
                *c = kk % p;
                kk /= p;
            }
            div[d] = 1;
            if poly_divides(p, &div, poly) {
                return false;
            }
        }
    }
    true
}

fn poly_divides(p: u64, div: &[u64], poly: &[u64]) -> bool {
    let mut rem: Vec<u64> = poly.to_vec();
    let dd = div.len() - 1; // div is monic
    for i in (dd..rem.len()).rev() {
        let lead = rem[i];
        if lead == 0 {
            continue;
        }
        for (k, &c) in div.iter().enumerate() {
            rem[i - dd + k] = (rem[i - dd + k] + p * p - lead * c % p) % p;
        }
    }
    rem.iter().all(|&c| c == 0)
}
