//! Characters of irreducible cuspidal representations `π_θ` of `GL_n(F_q)`.
//!
//! For `g` whose characteristic polynomial is `f^c` with `f` irreducible of
//! degree `d` and root `α`, and `dim ker f(g) = d·k`,
//!
//! `χ(g) = (−1)^{n−1} ∏_{i=1}^{k−1}(1 − q^{d·i}) Σ_{i<d} θ(α^{q^i})`;
//! all other classes have character value zero.

use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::charkit::{is_regular, MultChar, TOL};
use crate::error::{GammaError, Result};
use crate::ffield::{divisors, FElem, FieldCtx};
use crate::matgrp::{self, gl_order, ClassType, ClassTyper, Mat};

/// Largest group enumerated element by element in the oracles.
const EXHAUSTIVE_LIMIT: u128 = 20_000;

/// The cuspidal representation attached to a regular character `θ` of
/// `F_{q^n}^×`.
#[derive(Debug, Clone)]
pub struct CuspidalRep {
    field: Arc<FieldCtx>,
    n: u32,
    theta: MultChar,
    central: MultChar,
    typer: Arc<ClassTyper>,
}

impl CuspidalRep {
    /// `θ = θ_k` on `F_{q^n}^×`; rejects non-regular `k`.
    pub fn new(field: &Arc<FieldCtx>, n: u32, k: i64) -> Result<Self> {
        let theta = MultChar::new(field, n, k)?;
        Self::from_theta(theta)
    }

    pub fn from_theta(theta: MultChar) -> Result<Self> {
        let field = theta.field().clone();
        let n = theta.level();
        if !is_regular(theta.exponent(), field.q(), n) {
            return Err(GammaError::NotRegular { k: theta.exponent(), n });
        }
        let central = theta.restrict(1)?;
        let typer = Arc::new(ClassTyper::new(&field, n as usize)?);
        Ok(CuspidalRep { field, n, theta, central, typer })
    }

    pub fn field(&self) -> &Arc<FieldCtx> {
        &self.field
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn theta(&self) -> &MultChar {
        &self.theta
    }

    /// `ω_π = θ|_{F_q^×}`.
    pub fn central_char(&self) -> &MultChar {
        &self.central
    }

    pub fn typer(&self) -> &ClassTyper {
        &self.typer
    }

    /// `π̃`, attached to `θ^{-1}`.
    pub fn contragredient(&self) -> Self {
        CuspidalRep {
            field: self.field.clone(),
            n: self.n,
            theta: self.theta.inverse(),
            central: self.central.inverse(),
            typer: self.typer.clone(),
        }
    }

    /// `χ(1) = ∏_{i=1}^{n−1}(q^i − 1)`.
    pub fn degree(&self) -> f64 {
        let q = self.field.q() as f64;
        (1..self.n as i32).map(|i| q.powi(i) - 1.0).product()
    }

    /// Character value from a precomputed class type.
    pub fn character_of_type(&self, ct: &ClassType) -> Complex64 {
        if !ct.primary {
            return Complex64::new(0.0, 0.0);
        }
        let f = self.field.as_ref();
        let qd = (f.q() as f64).powi(ct.d as i32);
        let sign = if self.n % 2 == 1 { 1.0 } else { -1.0 };
        let prod: f64 = (1..ct.k as i32).map(|i| 1.0 - qd.powi(i)).product();
        let orbit: Complex64 = (0..ct.d).map(|i| self.theta.eval(f.frobenius_pow(ct.alpha, i))).sum();
        orbit * (sign * prod)
    }

    pub fn character(&self, g: &Mat) -> Result<Complex64> {
        let ct = self.typer.classify(g)?;
        Ok(self.character_of_type(&ct))
    }

    /// `Σ_{u ∈ U} χ(g·u)` over the unipotent radical of the standard parabolic
    /// with the given block sizes.
    pub fn radical_sum(&self, g: &Mat, blocks: &[usize]) -> Result<Complex64> {
        let f = self.field.as_ref();
        let n = self.n as usize;
        let total: usize = blocks.iter().sum();
        if total != n {
            return Err(GammaError::DimensionMismatch { expected: n, got: total });
        }
        let mut positions = Vec::new();
        let mut start = 0;
        for &b in blocks {
            for i in start..start + b {
                for j in start + b..n {
                    positions.push((i, j));
                }
            }
            start += b;
        }
        let els = f.subfield_elements(1);
        let mut radical = vec![Mat::identity(n)];
        for &(i, j) in &positions {
            radical = radical
                .into_iter()
                .flat_map(|m| {
                    els.iter().map(move |&v| {
                        let mut m2 = m.clone();
                        m2.set(i, j, v);
                        m2
                    })
                })
                .collect();
        }
        radical.iter().map(|u| self.character(&g.mul(f, u))).sum()
    }

    /// Self-check of the character formula against the orthogonality and
    /// degree identities.
    pub fn verify_irreducible(&self) -> Result<IrreducibilityReport> {
        let f = self.field.as_ref();
        let n = self.n as usize;
        let q = f.q();
        let inner = self.class_census_norm();
        if (inner - 1.0).abs() > 1e-9 {
            return Err(GammaError::OracleFailed(format!("<chi,chi> over classes = {inner}")));
        }
        let order = gl_order(q, self.n);
        let exhaustive = order <= EXHAUSTIVE_LIMIT;
        let elements: Vec<Mat> = if exhaustive {
            matgrp::gl_elements(f, n)
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            (0..2000).map(|_| matgrp::random_gl(f, n, &mut rng)).collect()
        };
        let mut inner_exhaustive = None;
        if exhaustive {
            let mut s = 0.0;
            for g in &elements {
                s += self.character(g)?.norm_sqr();
            }
            let v = s / order as f64;
            if (v - 1.0).abs() > 1e-9 {
                return Err(GammaError::OracleFailed(format!("<chi,chi> by enumeration = {v}")));
            }
            inner_exhaustive = Some(v);
        }
        let deg = self.character(&Mat::identity(n))?;
        if (deg - Complex64::new(self.degree(), 0.0)).norm() > TOL || self.degree() <= 0.0 {
            return Err(GammaError::OracleFailed(format!("chi(1) = {deg}, expected {}", self.degree())));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0xc1a55);
        let mut inverse_err: f64 = 0.0;
        let mut class_err: f64 = 0.0;
        for g in &elements {
            let v = self.character(g)?;
            let vi = self.character(&g.inv(f)?)?;
            inverse_err = inverse_err.max((vi - v.conj()).norm());
            let h = matgrp::random_gl(f, n, &mut rng);
            let conj = Mat::product(f, &[&h, g, &h.inv(f)?]);
            class_err = class_err.max((self.character(&conj)? - v).norm());
        }
        if inverse_err > TOL {
            return Err(GammaError::OracleFailed(format!("chi(g^-1) != conj chi(g): {inverse_err:e}")));
        }
        if class_err > TOL {
            return Err(GammaError::OracleFailed(format!("chi not a class function: {class_err:e}")));
        }
        Ok(IrreducibilityReport {
            inner_product: inner,
            inner_product_exhaustive: inner_exhaustive,
            degree: deg.re,
            inverse_conj_error: inverse_err,
            class_function_error: class_err,
            elements_checked: elements.len(),
        })
    }

    /// `⟨χ, χ⟩` summed over primary conjugacy classes, weighted by
    /// centralizer orders.
    pub fn class_census_norm(&self) -> f64 {
        let f = self.field.as_ref();
        let q = f.q() as f64;
        let mut total = 0.0;
        for d in divisors(self.n) {
            let c = self.n / d;
            let qd = q.powi(d as i32);
            let reps = orbit_representatives(f, d);
            for lambda in partitions(c) {
                let z = unipotent_centralizer(qd, &lambda);
                for &alpha in &reps {
                    let ct = ClassType { primary: true, d, c, alpha, k: lambda.len() as u32 };
                    total += self.character_of_type(&ct).norm_sqr() / z;
                }
            }
        }
        total
    }
}

/// Outcome of [`CuspidalRep::verify_irreducible`].
#[derive(Debug, Clone, PartialEq)]
pub struct IrreducibilityReport {
    pub inner_product: f64,
    pub inner_product_exhaustive: Option<f64>,
    pub degree: f64,
    pub inverse_conj_error: f64,
    pub class_function_error: f64,
    pub elements_checked: usize,
}

/// One element of least discrete log from each Frobenius orbit of exact
/// degree `d`.
fn orbit_representatives(f: &FieldCtx, d: u32) -> Vec<FElem> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for a in f.subfield_units(d) {
        if f.degree_of(a) != d || seen.contains(&a) {
            continue;
        }
        for i in 0..d {
            seen.insert(f.frobenius_pow(a, i));
        }
        out.push(a);
    }
    out
}

/// Partitions of `c` in non-increasing part order.
pub fn partitions(c: u32) -> Vec<Vec<u32>> {
    fn go(rest: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=rest.min(max)).rev() {
            cur.push(part);
            go(rest - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(c, c, &mut Vec::new(), &mut out);
    out
}

/// Centralizer order in `GL_c(Q)` of a unipotent element of Jordan type `λ`:
/// `Q^{Σ λ'_i²} ∏_i ∏_{j=1}^{m_i} (1 − Q^{-j})`.
fn unipotent_centralizer(qd: f64, lambda: &[u32]) -> f64 {
    let largest = lambda.first().copied().unwrap_or(0);
    let conj_sq: u32 = (1..=largest)
        .map(|i| lambda.iter().filter(|&&p| p >= i).count() as u32)
        .map(|l| l * l)
        .sum();
    let mut z = qd.powi(conj_sq as i32);
    for part in 1..=largest {
        let m = lambda.iter().filter(|&&p| p == part).count() as i32;
        for j in 1..=m {
            z *= 1.0 - qd.powi(-j);
        }
    }
    z
}
