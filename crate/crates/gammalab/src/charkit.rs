//! Additive and multiplicative characters, Gauss and Kloosterman sums, and
//! the normalized Fourier transform on `F_q^m`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{GammaError, Result};
use crate::ffield::{FElem, FieldCtx};

/// Absolute tolerance for complex comparisons.
pub const TOL: f64 = 1e-8;

/// Tolerance for a sum of `terms` unit-modulus terms.
pub fn tolerance_for(terms: u64) -> f64 {
    if terms > 1_000_000 {
        TOL.max(terms as f64 * 1e-14)
    } else {
        TOL
    }
}

/// `exp(2πi·num/den)`, reducing `num` exactly before taking the angle.
pub fn root_of_unity(num: i128, den: u64) -> Complex64 {
    let r = num.rem_euclid(den as i128) as f64;
    Complex64::from_polar(1.0, 2.0 * PI * r / den as f64)
}

/// The additive character `ψ(x) = exp(2πi·Tr_{F_q/F_p}(x)/p)` or its inverse.
#[derive(Debug, Clone)]
pub struct AddChar {
    field: Arc<FieldCtx>,
    inverse: bool,
    table: Arc<Vec<Complex64>>,
}

impl AddChar {
    pub fn new(field: &Arc<FieldCtx>, inverse: bool) -> Self {
        let p = field.p() as u64;
        let sign = if inverse { -1 } else { 1 };
        let table = (0..field.q() as usize)
            .map(|s| {
                let t = field.trace_to_prime(field.fq_from_slot(s));
                root_of_unity(sign * t as i128, p)
            })
            .collect();
        AddChar { field: field.clone(), inverse, table: Arc::new(table) }
    }

    /// The standard character `ψ`.
    pub fn standard(field: &Arc<FieldCtx>) -> Self {
        Self::new(field, false)
    }

    /// `ψ^{-1}`.
    pub fn inverted(&self) -> Self {
        Self::new(&self.field, !self.inverse)
    }

    pub fn is_inverse(&self) -> bool {
        self.inverse
    }

    pub fn field(&self) -> &Arc<FieldCtx> {
        &self.field
    }

    /// `ψ(x)` for `x ∈ F_q`.
    #[inline]
    pub fn eval(&self, x: FElem) -> Complex64 {
        debug_assert!(self.field.in_subfield(x, 1));
        self.table[self.field.fq_slot(x)]
    }
}

/// A character of `F_{q^d}^×`, `θ(gen_d^j) = ζ_{q^d−1}^{k·j}`.
#[derive(Debug, Clone)]
pub struct MultChar {
    field: Arc<FieldCtx>,
    level: u32,
    modulus: u64,
    k: u64,
    table: Arc<Vec<Complex64>>,
}

impl MultChar {
    pub fn new(field: &Arc<FieldCtx>, level: u32, k: i64) -> Result<Self> {
        if level == 0 || field.n() % level != 0 {
            return Err(GammaError::BadParameters(format!(
                "character level {level} does not divide {}",
                field.n()
            )));
        }
        let modulus = field.q_pow(level) - 1;
        let k = k.rem_euclid(modulus as i64) as u64;
        let table = (0..modulus)
            .map(|j| root_of_unity(k as i128 * j as i128, modulus))
            .collect();
        Ok(MultChar { field: field.clone(), level, modulus, k, table: Arc::new(table) })
    }

    pub fn level(&self) -> u32 {
        self.level
    }
    /// Exponent `k` modulo `q^d − 1`.
    pub fn exponent(&self) -> u64 {
        self.k
    }
    /// `q^d − 1`.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }
    pub fn field(&self) -> &Arc<FieldCtx> {
        &self.field
    }

    pub fn is_trivial(&self) -> bool {
        self.k == 0
    }

    /// `θ(ξ)`; zero is sent to zero.
    #[inline]
    pub fn eval(&self, xi: FElem) -> Complex64 {
        if xi == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let l = self.field.log_of(xi);
        let step = self.field.subfield_step(self.level);
        debug_assert!(l % step == 0, "argument outside the character's field");
        self.table[(l / step) as usize]
    }

    pub fn inverse(&self) -> Self {
        Self::new(&self.field, self.level, -(self.k as i64)).expect("same level")
    }

    /// `θ^q`.
    pub fn frobenius(&self) -> Self {
        let k = (self.k as u128 * self.field.q() as u128 % self.modulus as u128) as i64;
        Self::new(&self.field, self.level, k).expect("same level")
    }

    /// Restriction to the degree-`d` subfield.
    pub fn restrict(&self, d: u32) -> Result<Self> {
        if self.level % d != 0 {
            return Err(GammaError::BadParameters(format!("{d} does not divide {}", self.level)));
        }
        let md = self.field.q_pow(d) - 1;
        Self::new(&self.field, d, (self.k % md) as i64)
    }
}

/// Galois orbit `{k·q^i mod (q^n − 1)}` in order of `i`.
pub fn galois_orbit(k: u64, q: u64, n: u32) -> Vec<u64> {
    let m = q.pow(n) - 1;
    let mut out = Vec::with_capacity(n as usize);
    let mut cur = k % m;
    for _ in 0..n {
        out.push(cur);
        cur = (cur as u128 * q as u128 % m as u128) as u64;
    }
    out
}

/// Whether `k` is a regular exponent: its Galois orbit has `n` members.
pub fn is_regular(k: u64, q: u64, n: u32) -> bool {
    let mut orbit = galois_orbit(k, q, n);
    orbit.sort_unstable();
    orbit.dedup();
    orbit.len() == n as usize
}

/// Whether `θ` restricted to `F_{q^d}^×` is trivial, i.e. `(q^d − 1) | k`.
pub fn restriction_is_trivial(theta: &MultChar, d: u32) -> bool {
    let md = theta.field().q_pow(d) - 1;
    theta.level() % d == 0 && theta.exponent() % md == 0
}

/// Least exponent of every Galois orbit of regular characters of `F_{q^n}^×`.
pub fn regular_orbit_representatives(q: u64, n: u32) -> Vec<u64> {
    let m = q.pow(n) - 1;
    (0..m)
        .filter(|&k| is_regular(k, q, n) && galois_orbit(k, q, n).iter().all(|&j| j >= k))
        .collect()
}

/// `G_ψ(χ) = Σ_{a ∈ F_q^×} χ(a^{-1})ψ(a)`.
pub fn gauss_sum(chi: &MultChar, psi: &AddChar) -> Result<Complex64> {
    if chi.level() != 1 {
        return Err(GammaError::PreconditionViolated("Gauss sum needs a character of F_q^×".into()));
    }
    let f = psi.field();
    Ok(f.subfield_units(1)
        .into_iter()
        .map(|a| chi.eval(f.inv(a).expect("unit")) * psi.eval(a))
        .sum())
}

/// `K_ψ(a, b) = Σ_{x ∈ F_q^×} ψ(ax)ψ(b/x)`.
pub fn kloosterman(a: FElem, b: FElem, psi: &AddChar) -> Complex64 {
    let f = psi.field();
    f.subfield_units(1)
        .into_iter()
        .map(|x| {
            let bx = f.div(b, x).expect("unit");
            psi.eval(f.mul(a, x)) * psi.eval(bx)
        })
        .sum()
}

/// A complex function on `F_q^m`, indexed by `Σ slot(x_i)·q^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct CFun {
    m: usize,
    q: usize,
    values: Vec<Complex64>,
}

impl CFun {
    pub fn zeros(m: usize, q: usize) -> Self {
        CFun { m, q, values: vec![Complex64::new(0.0, 0.0); q.pow(m as u32)] }
    }

    pub fn constant(m: usize, q: usize, c: Complex64) -> Self {
        CFun { m, q, values: vec![c; q.pow(m as u32)] }
    }

    pub fn from_values(m: usize, q: usize, values: Vec<Complex64>) -> Result<Self> {
        let len = q.pow(m as u32);
        if values.len() != len {
            return Err(GammaError::DimensionMismatch { expected: len, got: values.len() });
        }
        Ok(CFun { m, q, values })
    }

    /// Indicator of the vector `x`.
    pub fn delta(field: &FieldCtx, x: &[FElem]) -> Self {
        let q = field.q() as usize;
        let mut f = Self::zeros(x.len(), q);
        f.values[vector_index(field, x)] = Complex64::new(1.0, 0.0);
        f
    }

    pub fn from_fn(field: &FieldCtx, m: usize, mut f: impl FnMut(&[FElem]) -> Complex64) -> Self {
        let q = field.q() as usize;
        let values = (0..q.pow(m as u32)).map(|i| f(&vector_at(field, m, i))).collect();
        CFun { m, q, values }
    }

    pub fn dim(&self) -> usize {
        self.m
    }
    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    #[inline]
    pub fn at(&self, idx: usize) -> Complex64 {
        self.values[idx]
    }

    pub fn eval(&self, field: &FieldCtx, x: &[FElem]) -> Complex64 {
        self.values[vector_index(field, x)]
    }

    pub fn max_abs_diff(&self, other: &CFun) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        CFun { m: self.m, q: self.q, values: self.values.iter().map(|v| v * c).collect() }
    }
}

/// Position of `x ∈ F_q^m` in a [`CFun`].
#[inline]
pub fn vector_index(field: &FieldCtx, x: &[FElem]) -> usize {
    let q = field.q() as usize;
    x.iter().rev().fold(0, |acc, &xi| acc * q + field.fq_slot(xi))
}

/// Vector of `F_q^m` stored at position `idx`.
pub fn vector_at(field: &FieldCtx, m: usize, mut idx: usize) -> Vec<FElem> {
    let q = field.q() as usize;
    let mut out = Vec::with_capacity(m);
    for _ in 0..m {
        out.push(field.fq_from_slot(idx % q));
        idx /= q;
    }
    out
}

/// `φ̂(y) = q^{-m/2} Σ_x φ(x)ψ(⟨x, y⟩)`.
pub fn fourier(phi: &CFun, psi: &AddChar) -> CFun {
    let f = psi.field();
    let m = phi.dim();
    let vecs: Vec<Vec<FElem>> = (0..phi.len()).map(|i| vector_at(f, m, i)).collect();
    let norm = (f.q() as f64).powf(-(m as f64) / 2.0);
    let values = vecs
        .iter()
        .map(|y| {
            let s: Complex64 = vecs
                .iter()
                .enumerate()
                .map(|(i, x)| {
                    let dot = x.iter().zip(y).fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)));
                    phi.at(i) * psi.eval(dot)
                })
                .sum();
            s * norm
        })
        .collect();
    CFun { m, q: phi.q, values }
}
