//! Arithmetic in one ambient finite field `F_{p^{e·n}}`.
//!
//! Every field used by the library is a subfield of the ambient field. An
//! element is a dense index: the coefficient vector of its representative
//! polynomial in the root of the modulus, read as a base-`p` integer with the
//! constant coefficient as the least significant digit. The subfield of degree
//! `d` over `F_q` (with `q = p^e`) is `{x : x^{q^d} = x}`, so embedding is the
//! identity on indices.

use std::sync::Arc;

use crate::error::{GammaError, Result};

/// Dense element index.
pub type FElem = u32;

const SIZE_CAP: u64 = 1 << 24;
const NO_LOG: u32 = u32::MAX;

/// A realized field `F_{p^{e·n}}` with discrete-log tables.
#[derive(Debug)]
pub struct FieldCtx {
    p: u32,
    e: u32,
    n: u32,
    q: u64,
    size: u64,
    modulus: Vec<u32>,
    exp: Vec<FElem>,
    log: Vec<u32>,
    minus_top: Vec<FElem>,
}

/// Builds the field `F_{p^{e·n}}`, shared behind an `Arc`.
pub fn build_field(p: u32, e: u32, n: u32) -> Result<Arc<FieldCtx>> {
    FieldCtx::new(p, e, n).map(Arc::new)
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Positive divisors of `n` in increasing order.
pub fn divisors(n: u32) -> Vec<u32> {
    (1..=n).filter(|d| n % d == 0).collect()
}

impl FieldCtx {
    /// Builds `F_{p^{e·n}}` with the least primitive modulus.
    ///
    /// Monic polynomials `x^D + c_{D-1}x^{D-1} + … + c_0` are ordered by the
    /// integer `Σ c_i p^i`; the first one whose root generates the unit group
    /// is the modulus.
    pub fn new(p: u32, e: u32, n: u32) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(GammaError::NotPrime(p as u64));
        }
        if e == 0 || n == 0 {
            return Err(GammaError::BadParameters("e and n must be positive".into()));
        }
        let degree = e
            .checked_mul(n)
            .ok_or_else(|| GammaError::BadParameters("degree overflow".into()))?;
        let size = checked_pow(p as u64, degree).filter(|&s| s <= SIZE_CAP);
        let size = size.ok_or(GammaError::TooLarge { p: p as u64, degree })?;
        let q = (p as u64).pow(e);
        let top_weight = size / p as u64;

        for code in 1..size {
            let coeffs = digits(code, p, degree as usize);
            if coeffs[0] == 0 {
                continue;
            }
            let minus_top: Vec<FElem> = (0..p)
                .map(|t| {
                    let mut idx = 0u64;
                    let mut w = 1u64;
                    for &c in &coeffs {
                        let v = (p as u64 - (t as u64 * c as u64) % p as u64) % p as u64;
                        idx += v * w;
                        w *= p as u64;
                    }
                    idx as FElem
                })
                .collect();
            let mut ctx = FieldCtx {
                p,
                e,
                n,
                q,
                size,
                modulus: coeffs,
                exp: Vec::new(),
                log: Vec::new(),
                minus_top,
            };
            if ctx.try_fill_tables(top_weight) {
                if !is_irreducible_fp(&ctx.modulus, p) {
                    return Err(GammaError::BadParameters("modulus failed irreducibility".into()));
                }
                return Ok(ctx);
            }
        }
        Err(GammaError::BadParameters(format!(
            "no primitive polynomial of degree {degree} over F_{p}"
        )))
    }

    fn mul_by_root(&self, a: FElem, top_weight: u64) -> FElem {
        let a = a as u64;
        let top = (a / top_weight) as usize;
        let shifted = ((a % top_weight) * self.p as u64) as FElem;
        self.add(shifted, self.minus_top[top])
    }

    fn try_fill_tables(&mut self, top_weight: u64) -> bool {
        let order = (self.size - 1) as usize;
        let mut exp = Vec::with_capacity(order);
        let mut cur: FElem = 1;
        exp.push(cur);
        for _ in 1..order {
            cur = self.mul_by_root(cur, top_weight);
            if cur == 1 || cur == 0 {
                return false;
            }
            exp.push(cur);
        }
        if self.mul_by_root(cur, top_weight) != 1 {
            return false;
        }
        let mut log = vec![NO_LOG; self.size as usize];
        for (j, &x) in exp.iter().enumerate() {
            log[x as usize] = j as u32;
        }
        self.exp = exp;
        self.log = log;
        true
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn e(&self) -> u32 {
        self.e
    }
    /// Degree of the ambient field over `F_q`.
    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn q(&self) -> u64 {
        self.q
    }
    /// Number of elements of the ambient field.
    pub fn size(&self) -> u64 {
        self.size
    }
    /// Order of the ambient unit group.
    pub fn order(&self) -> u64 {
        self.size - 1
    }
    /// Coefficients `c_0, …, c_{D-1}` of the monic modulus.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }
    /// The fixed generator (root of the modulus).
    pub fn gen(&self) -> FElem {
        self.exp[1 % self.exp.len()]
    }
    pub fn zero(&self) -> FElem {
        0
    }
    pub fn one(&self) -> FElem {
        1
    }

    /// `q^d`.
    pub fn q_pow(&self, d: u32) -> u64 {
        self.q.pow(d)
    }

    /// Image of an integer in the prime field.
    pub fn from_int(&self, v: i64) -> FElem {
        v.rem_euclid(self.p as i64) as FElem
    }

    pub fn add(&self, a: FElem, b: FElem) -> FElem {
        if self.p == 2 {
            return a ^ b;
        }
        let p = self.p;
        let (mut a, mut b) = (a, b);
        let (mut r, mut w) = (0u32, 1u32);
        while a > 0 || b > 0 {
            let mut s = a % p + b % p;
            if s >= p {
                s -= p;
            }
            r += s * w;
            w = w.wrapping_mul(p);
            a /= p;
            b /= p;
        }
        r
    }

    pub fn neg(&self, a: FElem) -> FElem {
        if self.p == 2 {
            return a;
        }
        let p = self.p;
        let mut a = a;
        let (mut r, mut w) = (0u32, 1u32);
        while a > 0 {
            let d = a % p;
            r += ((p - d) % p) * w;
            w = w.wrapping_mul(p);
            a /= p;
        }
        r
    }

    pub fn sub(&self, a: FElem, b: FElem) -> FElem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FElem, b: FElem) -> FElem {
        if a == 0 || b == 0 {
            return 0;
        }
        let s = self.log[a as usize] as u64 + self.log[b as usize] as u64;
        self.exp[(s % self.order()) as usize]
    }

    pub fn inv(&self, a: FElem) -> Result<FElem> {
        if a == 0 {
            return Err(GammaError::DivideByZero);
        }
        let l = self.log[a as usize] as u64;
        Ok(self.exp[((self.order() - l) % self.order()) as usize])
    }

    pub fn div(&self, a: FElem, b: FElem) -> Result<FElem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^k` for any integer `k`; `0^k` with `k < 0` is an error.
    pub fn pow(&self, a: FElem, k: i64) -> Result<FElem> {
        if a == 0 {
            return match k {
                0 => Ok(1),
                k if k > 0 => Ok(0),
                _ => Err(GammaError::DivideByZero),
            };
        }
        let ord = self.order() as i128;
        let l = self.log[a as usize] as i128;
        let t = (l * k as i128).rem_euclid(ord);
        Ok(self.exp[t as usize])
    }

    /// `gen^j`.
    pub fn exp_of(&self, j: i64) -> FElem {
        self.exp[j.rem_euclid(self.order() as i64) as usize]
    }

    /// Frobenius `a ↦ a^q`.
    pub fn frobenius(&self, a: FElem) -> FElem {
        self.frobenius_pow(a, 1)
    }

    /// `a ↦ a^{q^i}`.
    pub fn frobenius_pow(&self, a: FElem, i: u32) -> FElem {
        if a == 0 {
            return 0;
        }
        let ord = self.order() as u128;
        let l = self.log[a as usize] as u128;
        let qi = (self.q as u128).pow(i) % ord;
        self.exp[((l * qi) % ord) as usize]
    }

    /// Discrete logarithm with respect to [`FieldCtx::gen`].
    pub fn dlog(&self, a: FElem) -> Result<u64> {
        if a == 0 || a as u64 >= self.size {
            return Err(GammaError::ZeroHasNoLog);
        }
        Ok(self.log[a as usize] as u64)
    }

    /// Table lookup for a nonzero element.
    #[inline]
    pub fn log_of(&self, a: FElem) -> u64 {
        debug_assert!(a != 0);
        self.log[a as usize] as u64
    }

    fn check_degree(&self, d: u32) -> Result<()> {
        if d == 0 || self.n % d != 0 {
            return Err(GammaError::BadParameters(format!(
                "degree {d} does not divide {}",
                self.n
            )));
        }
        Ok(())
    }

    /// `(q^n − 1)/(q^d − 1)`: the log of the canonical generator of the
    /// degree-`d` subfield.
    pub fn subfield_step(&self, d: u32) -> u64 {
        self.order() / (self.q_pow(d) - 1)
    }

    /// Canonical generator `gen^{(q^n−1)/(q^d−1)}` of the degree-`d` subfield.
    pub fn subfield_gen(&self, d: u32) -> FElem {
        self.exp[(self.subfield_step(d) % self.order()) as usize]
    }

    pub fn in_subfield(&self, a: FElem, d: u32) -> bool {
        if self.n % d != 0 {
            return false;
        }
        a == 0 || self.log_of(a) % self.subfield_step(d) == 0
    }

    /// Elements of the degree-`d` subfield: `0` followed by `gen_d^j`.
    pub fn subfield_elements(&self, d: u32) -> Vec<FElem> {
        let mut v = vec![0];
        v.extend(self.subfield_units(d));
        v
    }

    /// Units of the degree-`d` subfield in the order `gen_d^0, gen_d^1, …`.
    pub fn subfield_units(&self, d: u32) -> Vec<FElem> {
        let step = self.subfield_step(d);
        (0..self.q_pow(d) - 1)
            .map(|j| self.exp[((j * step) % self.order()) as usize])
            .collect()
    }

    /// Smallest `d` with `a^{q^d} = a`.
    pub fn degree_of(&self, a: FElem) -> u32 {
        (1..=self.n)
            .find(|&d| self.n % d == 0 && self.in_subfield(a, d))
            .unwrap_or(self.n)
    }

    fn check_tower(&self, xi: FElem, d1: u32, d2: u32) -> Result<()> {
        self.check_degree(d1)?;
        self.check_degree(d2)?;
        if d1 % d2 != 0 {
            return Err(GammaError::BadParameters(format!("{d2} does not divide {d1}")));
        }
        if !self.in_subfield(xi, d1) {
            return Err(GammaError::NotInSubfield { elem: xi, degree: d1 });
        }
        Ok(())
    }

    /// Norm from the degree-`d1` subfield to the degree-`d2` subfield.
    pub fn norm(&self, xi: FElem, d1: u32, d2: u32) -> Result<FElem> {
        self.check_tower(xi, d1, d2)?;
        let mut acc = 1;
        for i in 0..d1 / d2 {
            acc = self.mul(acc, self.frobenius_pow(xi, d2 * i));
        }
        Ok(acc)
    }

    /// Trace from the degree-`d1` subfield to the degree-`d2` subfield.
    pub fn trace(&self, xi: FElem, d1: u32, d2: u32) -> Result<FElem> {
        self.check_tower(xi, d1, d2)?;
        let mut acc = 0;
        for i in 0..d1 / d2 {
            acc = self.add(acc, self.frobenius_pow(xi, d2 * i));
        }
        Ok(acc)
    }

    /// Embeds an element of the degree-`d` subfield into the ambient field.
    pub fn embed(&self, xi: FElem, d: u32) -> Result<FElem> {
        self.check_degree(d)?;
        if !self.in_subfield(xi, d) {
            return Err(GammaError::NotInSubfield { elem: xi, degree: d });
        }
        Ok(xi)
    }

    /// Absolute trace `F_q → F_p` as an integer in `0..p`.
    pub fn trace_to_prime(&self, a: FElem) -> u32 {
        let mut acc = 0;
        let mut x = a;
        for _ in 0..self.e {
            acc = self.add(acc, x);
            x = self.pow(x, self.p as i64).unwrap_or(0);
        }
        debug_assert!(acc < self.p);
        acc
    }

    /// Dense position of an element of `F_q`: `0 ↦ 0`, `gen_1^j ↦ j + 1`.
    #[inline]
    pub fn fq_slot(&self, a: FElem) -> usize {
        if a == 0 {
            0
        } else {
            (self.log_of(a) / self.subfield_step(1)) as usize + 1
        }
    }

    /// Inverse of [`FieldCtx::fq_slot`].
    pub fn fq_from_slot(&self, s: usize) -> FElem {
        if s == 0 {
            0
        } else {
            self.exp[(((s as u64 - 1) * self.subfield_step(1)) % self.order()) as usize]
        }
    }
}

fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    let mut r: u64 = 1;
    for _ in 0..exp {
        r = r.checked_mul(base)?;
        if r > SIZE_CAP {
            return None;
        }
    }
    Some(r)
}

fn digits(mut v: u64, p: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((v % p as u64) as u32);
        v /= p as u64;
    }
    out
}

/// Trial division of `x^D + Σ c_i x^i` by every monic polynomial of degree
/// at most `D/2` over `F_p`.
pub(crate) fn is_irreducible_fp(coeffs: &[u32], p: u32) -> bool {
    let deg = coeffs.len();
    let mut f: Vec<u32> = coeffs.to_vec();
    f.push(1);
    for dd in 1..=deg / 2 {
        let count = (p as u64).pow(dd as u32);
        for code in 0..count {
            let mut g = digits(code, p, dd);
            g.push(1);
            if poly_rem_fp(&f, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn poly_rem_fp(f: &[u32], g: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u64> = f.iter().map(|&c| c as u64).collect();
    let dg = g.len() - 1;
    let p = p as u64;
    while r.len() > dg {
        let lead = r.pop().unwrap_or(0);
        let shift = r.len() - dg;
        for i in 0..dg {
            r[shift + i] = (r[shift + i] + (p - lead) * g[i] as u64) % p;
        }
    }
    r.into_iter().map(|c| c as u32).collect()
}
