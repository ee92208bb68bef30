//! Rational functions in `X = q^{-s}` and the local factors of level zero
//! supercuspidal representations built from a cuspidal `π_0`.
//!
//! The local integrals enter only through their exact values: the lifted
//! sums are the finite sums plus, for even `n`, an `L(ms, ω_π)` correction
//! weighted by `js(W_0, 1)`.

use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bessel::BesselTable;
use crate::charkit::{restriction_is_trivial, vector_at, CFun};
use crate::error::{GammaError, Result};
use crate::exjs::{shalika_witness, FeOptions, JsContext, WhittakerFun};
use crate::matgrp::{gl_elements, gl_order, random_gl};

/// Coefficient tolerance after max-norm normalization.
pub const RAT_TOL: f64 = 1e-9;

type Poly = Vec<Complex64>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn max_norm(p: &[Complex64]) -> f64 {
    p.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn trim(mut p: Poly, scale: f64) -> Poly {
    let cut = scale * 1e-12;
    while p.last().is_some_and(|z| z.norm() <= cut) {
        p.pop();
    }
    p
}

fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![c(0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &[Complex64], b: &[Complex64]) -> Poly {
    let mut out = vec![c(0.0); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] += y;
    }
    out
}

fn shift_up(p: &[Complex64], k: usize) -> Poly {
    let mut out = vec![c(0.0); k];
    out.extend_from_slice(p);
    out
}

/// `(quotient, remainder)`; `b` must be trimmed and nonzero.
fn poly_divrem(a: &[Complex64], b: &[Complex64]) -> (Poly, Poly) {
    let mut r = a.to_vec();
    if a.len() < b.len() {
        return (Vec::new(), r);
    }
    let lead = *b.last().expect("nonzero divisor");
    let mut quot = vec![c(0.0); a.len() - b.len() + 1];
    for k in (0..quot.len()).rev() {
        let coef = r[k + b.len() - 1] / lead;
        quot[k] = coef;
        for (j, bj) in b.iter().enumerate() {
            r[k + j] -= coef * bj;
        }
    }
    r.truncate(b.len() - 1);
    (quot, r)
}

fn poly_gcd(a: &[Complex64], b: &[Complex64]) -> Poly {
    let scale = max_norm(a).max(max_norm(b)).max(1.0);
    let mut x = trim(a.to_vec(), scale);
    let mut y = trim(b.to_vec(), scale);
    while !y.is_empty() {
        let ny = max_norm(&y);
        let y_unit: Poly = y.iter().map(|z| z / ny).collect();
        let (_, r) = poly_divrem(&x, &y_unit);
        x = y_unit;
        y = if max_norm(&r) <= RAT_TOL { Vec::new() } else { trim(r, 1.0) };
    }
    let lead = *x.last().unwrap_or(&c(1.0));
    x.iter().map(|z| z / lead).collect()
}

fn eval_poly(p: &[Complex64], x: Complex64) -> Complex64 {
    p.iter().rev().fold(c(0.0), |acc, a| acc * x + a)
}

/// `X^{x_shift} · num(X) / den(X)` with complex coefficients, lowest degree
/// first. Reduced form has coprime `num`, `den`, neither divisible by `X`,
/// and `den(0) = 1`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RatQS {
    pub num: Vec<Complex64>,
    pub den: Vec<Complex64>,
    pub x_shift: i64,
}

impl RatQS {
    pub fn new(num: Vec<Complex64>, den: Vec<Complex64>, x_shift: i64) -> Result<Self> {
        if den.iter().all(|z| z.norm() == 0.0) {
            return Err(GammaError::DivideByZero);
        }
        Ok(RatQS { num, den, x_shift }.reduce())
    }

    pub fn constant(v: Complex64) -> Self {
        RatQS { num: vec![v], den: vec![c(1.0)], x_shift: 0 }.reduce()
    }

    pub fn zero() -> Self {
        Self::constant(c(0.0))
    }

    pub fn one() -> Self {
        Self::constant(c(1.0))
    }

    /// `v·X^k`.
    pub fn monomial(v: Complex64, k: i64) -> Self {
        RatQS { num: vec![v], den: vec![c(1.0)], x_shift: k }.reduce()
    }

    pub fn from_poly(coeffs: Vec<Complex64>) -> Self {
        RatQS { num: coeffs, den: vec![c(1.0)], x_shift: 0 }.reduce()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    /// Cancels common factors, moves powers of `X` into `x_shift` and scales
    /// to `den(0) = 1`. Idempotent.
    pub fn reduce(&self) -> Self {
        let scale = max_norm(&self.num).max(max_norm(&self.den));
        let mut num = trim(self.num.clone(), scale);
        let mut den = trim(self.den.clone(), scale);
        if num.is_empty() {
            return RatQS { num: Vec::new(), den: vec![c(1.0)], x_shift: 0 };
        }
        let mut shift = self.x_shift;
        let cut = scale * 1e-12;
        let lead_zeros = |p: &Poly| p.iter().take_while(|z| z.norm() <= cut).count();
        let kn = lead_zeros(&num);
        let kd = lead_zeros(&den);
        num.drain(..kn);
        den.drain(..kd);
        shift += kn as i64 - kd as i64;
        if num.len() > 1 && den.len() > 1 {
            let g = poly_gcd(&num, &den);
            if g.len() > 1 {
                num = trim(poly_divrem(&num, &g).0, scale);
                den = trim(poly_divrem(&den, &g).0, scale);
            }
        }
        let d0 = den[0];
        RatQS { num: num.iter().map(|z| z / d0).collect(), den: den.iter().map(|z| z / d0).collect(), x_shift: shift }
    }

    pub fn add(&self, o: &RatQS) -> RatQS {
        let s = self.x_shift.min(o.x_shift);
        let a = shift_up(&poly_mul(&self.num, &o.den), (self.x_shift - s) as usize);
        let b = shift_up(&poly_mul(&o.num, &self.den), (o.x_shift - s) as usize);
        RatQS { num: poly_add(&a, &b), den: poly_mul(&self.den, &o.den), x_shift: s }.reduce()
    }

    pub fn neg(&self) -> RatQS {
        RatQS { num: self.num.iter().map(|z| -z).collect(), den: self.den.clone(), x_shift: self.x_shift }
    }

    pub fn sub(&self, o: &RatQS) -> RatQS {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RatQS) -> RatQS {
        RatQS {
            num: poly_mul(&self.num, &o.num),
            den: poly_mul(&self.den, &o.den),
            x_shift: self.x_shift + o.x_shift,
        }
        .reduce()
    }

    pub fn scale(&self, v: Complex64) -> RatQS {
        RatQS { num: self.num.iter().map(|z| z * v).collect(), den: self.den.clone(), x_shift: self.x_shift }.reduce()
    }

    pub fn inv(&self) -> Result<RatQS> {
        if self.is_zero() {
            return Err(GammaError::DivideByZero);
        }
        Ok(RatQS { num: self.den.clone(), den: self.num.clone(), x_shift: -self.x_shift }.reduce())
    }

    pub fn div(&self, o: &RatQS) -> Result<RatQS> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        eval_poly(&self.num, x) / eval_poly(&self.den, x) * x.powi(self.x_shift as i32)
    }

    /// `f(X) ↦ f(q^{-1} X^{-1})`, i.e. `s ↦ 1 − s`.
    pub fn reflect(&self, q: f64) -> RatQS {
        let flip = |p: &[Complex64]| -> Poly {
            let d = p.len().saturating_sub(1);
            (0..p.len()).map(|i| p[d - i] * q.powi(-((d - i) as i32))).collect()
        };
        let dn = self.num.len().saturating_sub(1) as i64;
        let dd = self.den.len().saturating_sub(1) as i64;
        RatQS {
            num: flip(&self.num).iter().map(|z| z * q.powi(-(self.x_shift as i32))).collect(),
            den: flip(&self.den),
            x_shift: -self.x_shift - dn + dd,
        }
        .reduce()
    }

    /// Constant in `X` (after reduction).
    pub fn is_constant(&self) -> bool {
        let r = self.reduce();
        r.is_zero() || (r.num.len() == 1 && r.den.len() == 1 && r.x_shift == 0)
    }

    /// A pole at some `X ≠ 0`, i.e. a nonconstant reduced denominator.
    pub fn has_pole(&self) -> bool {
        self.reduce().den.len() > 1
    }

    /// Largest coefficient of `num_a·den_b − num_b·den_a` after each side is
    /// scaled to unit max-norm.
    pub fn distance(&self, o: &RatQS) -> f64 {
        let norm = |r: &RatQS| -> (Poly, Poly) {
            let k = max_norm(&r.den);
            (r.num.iter().map(|z| z / k).collect(), r.den.iter().map(|z| z / k).collect())
        };
        let (an, ad) = norm(self);
        let (bn, bd) = norm(o);
        let s = self.x_shift.min(o.x_shift);
        let lhs = shift_up(&poly_mul(&an, &bd), (self.x_shift - s) as usize);
        let rhs = shift_up(&poly_mul(&bn, &ad), (o.x_shift - s) as usize);
        let neg: Poly = rhs.iter().map(|z| -z).collect();
        max_norm(&poly_add(&lhs, &neg))
    }

    pub fn approx_eq(&self, o: &RatQS) -> bool {
        self.distance(o) <= RAT_TOL
    }

    /// Whether the reduced denominator divides `target` as a polynomial.
    pub fn den_divides(&self, target: &[Complex64]) -> bool {
        let r = self.reduce();
        let (_, rem) = poly_divrem(target, &r.den);
        max_norm(&rem) <= RAT_TOL * max_norm(target).max(1.0)
    }
}

impl PartialEq for RatQS {
    fn eq(&self, o: &Self) -> bool {
        self.approx_eq(o)
    }
}

fn fmt_poly(p: &[Complex64]) -> String {
    if p.is_empty() {
        return "0".into();
    }
    let terms: Vec<String> = p
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() > 1e-12)
        .map(|(k, z)| {
            let coef = format!("({:.6}{:+.6}i)", z.re, z.im);
            match k {
                0 => coef,
                1 => format!("{coef}X"),
                _ => format!("{coef}X^{k}"),
            }
        })
        .collect();
    terms.join(" + ")
}

impl fmt::Display for RatQS {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.x_shift != 0 {
            write!(f, "X^{}·", self.x_shift)?;
        }
        write!(f, "[{}] / [{}]", fmt_poly(&self.num), fmt_poly(&self.den))
    }
}

/// `L(ms, χ) = 1/(1 − c·X^m)` with `c = χ(ϖ)`.
pub fn l_factor(cval: Complex64, m: u32) -> Result<RatQS> {
    if m == 0 {
        return Err(GammaError::BadParameters("m must be at least 1".into()));
    }
    let mut den = vec![c(0.0); m as usize + 1];
    den[0] = c(1.0);
    den[m as usize] = -cval;
    RatQS::new(vec![c(1.0)], den, 0)
}

/// `L(m(1−s), χ^{-1}) = 1/(1 − c^{-1} q^{-m} X^{-m})`.
pub fn dual_l_factor(cval: Complex64, m: u32, q: f64) -> Result<RatQS> {
    Ok(l_factor(cval.inv(), m)?.reflect(q))
}

/// A level zero representation, seen through `π_0` and `c = ω_π(ϖ)`.
#[derive(Debug, Clone)]
pub struct LevelZeroCtx {
    table: BesselTable,
    js: JsContext,
    c: Complex64,
}

impl LevelZeroCtx {
    pub fn new(table: &BesselTable, cval: Complex64) -> Result<Self> {
        if (cval.norm() - 1.0).abs() > 1e-9 {
            return Err(GammaError::BadParameters(format!("|c| = {} must be 1", cval.norm())));
        }
        let js = JsContext::new(table.psi(), table.n() as usize)?;
        Ok(LevelZeroCtx { table: table.clone(), js, c: cval })
    }

    pub fn table(&self) -> &BesselTable {
        &self.table
    }
    pub fn js_context(&self) -> &JsContext {
        &self.js
    }
    pub fn c(&self) -> Complex64 {
        self.c
    }
    pub fn m(&self) -> u32 {
        self.js.m() as u32
    }
    fn q(&self) -> f64 {
        self.table.rep().field().q() as f64
    }
    fn even(&self) -> bool {
        !self.js.is_odd()
    }

    /// Whether `ω_π` is unramified, i.e. `ω_{π_0}` is trivial.
    pub fn unramified(&self) -> bool {
        self.table.rep().central_char().is_trivial()
    }

    pub fn has_shalika_vector(&self) -> bool {
        self.even() && restriction_is_trivial(self.table.rep().theta(), self.m())
    }

    /// `L(ms, ω_π)`: `1/(1 − cX^m)` when unramified, else `1`.
    pub fn central_l(&self) -> Result<RatQS> {
        if self.unramified() {
            l_factor(self.c, self.m())
        } else {
            Ok(RatQS::one())
        }
    }

    /// `L(m(1−s), ω_π^{-1})`.
    pub fn central_l_dual(&self) -> Result<RatQS> {
        if self.unramified() {
            dual_l_factor(self.c, self.m(), self.q())
        } else {
            Ok(RatQS::one())
        }
    }

    fn one_fn(&self) -> CFun {
        CFun::constant(self.js.m(), self.q() as usize, c(1.0))
    }

    fn at_zero(&self, phi: &CFun) -> Complex64 {
        phi.at(0)
    }
}

/// `JS(s, lift W_0, lift φ_0)`.
pub fn lifted_js(ctx: &LevelZeroCtx, w0: &WhittakerFun, phi0: &CFun) -> Result<RatQS> {
    let base = RatQS::constant(ctx.js.js(&ctx.table, w0, phi0)?);
    if !ctx.even() {
        return Ok(base);
    }
    let period = ctx.js.js(&ctx.table, w0, &ctx.one_fn())?;
    let corr = RatQS::monomial(ctx.c * ctx.at_zero(phi0) * period, ctx.m() as i64).mul(&ctx.central_l()?);
    Ok(base.add(&corr))
}

/// `JS̃(s, lift W_0, lift φ_0)`.
pub fn lifted_dual_js(ctx: &LevelZeroCtx, w0: &WhittakerFun, phi0: &CFun) -> Result<RatQS> {
    let base = RatQS::constant(ctx.js.dual_js(&ctx.table, w0, phi0)?);
    if !ctx.even() {
        return Ok(base);
    }
    let period = ctx.js.js(&ctx.table, w0, &ctx.one_fn())?;
    let hat0 = ctx.js.dual_transform(phi0).at(0);
    let m = ctx.m() as i64;
    let coef = ctx.c.inv() * ctx.q().powi(-(m as i32)) * hat0 * period;
    let corr = RatQS::monomial(coef, -m).mul(&ctx.central_l_dual()?);
    Ok(base.add(&corr))
}

/// A pair with nonzero lifted `JS`: the canonical pair, or with a Shalika
/// vector the witness normalized to `js(W, 1) = 1` against `φ = 1`.
fn gamma_pair(ctx: &LevelZeroCtx) -> Result<(WhittakerFun, CFun)> {
    if ctx.has_shalika_vector() {
        let w = shalika_witness(&ctx.js)?;
        let v = ctx.js.js(&ctx.table, &w, &ctx.one_fn())?;
        Ok((w.scale(v.inv()), ctx.one_fn()))
    } else {
        ctx.js.canonical_pair()
    }
}

/// `γ(s, π, ∧², ψ)` as the ratio of the lifted sums.
pub fn local_gamma(ctx: &LevelZeroCtx) -> Result<RatQS> {
    let (w, phi) = gamma_pair(ctx)?;
    lifted_dual_js(ctx, &w, &phi)?.div(&lifted_js(ctx, &w, &phi)?)
}

/// `(L(s, π, ∧²), ε(s, π, ∧², ψ))`.
pub fn local_l_eps(ctx: &LevelZeroCtx) -> Result<(RatQS, RatQS)> {
    if ctx.has_shalika_vector() {
        let m = ctx.m() as i64;
        let eps = RatQS::monomial(ctx.c.inv() * ctx.q().powf(-(m as f64) / 2.0), -m);
        Ok((l_factor(ctx.c, ctx.m())?, eps))
    } else {
        let (w, phi) = ctx.js.canonical_pair()?;
        let g = ctx.js.dual_js(&ctx.table, &w, &phi)? / ctx.js.js(&ctx.table, &w, &phi)?;
        Ok((RatQS::one(), RatQS::constant(g)))
    }
}

/// `γ = ε · L(1−s, π̃, ∧²) / L(s, π, ∧²)` assembled from [`local_l_eps`].
pub fn gamma_from_l_eps(ctx: &LevelZeroCtx) -> Result<RatQS> {
    let (l, eps) = local_l_eps(ctx)?;
    let l_dual = if ctx.has_shalika_vector() { ctx.central_l_dual()? } else { RatQS::one() };
    eps.mul(&l_dual).div(&l)
}

/// `Λ_s(lift W_0) = JS(W_0, 1)`, the same at every admissible `s`.
pub fn shalika_functional_value(ctx: &LevelZeroCtx, w0: &WhittakerFun) -> Result<Complex64> {
    if !ctx.even() {
        return Err(GammaError::PreconditionViolated("Shalika periods need even n".into()));
    }
    ctx.js.js(&ctx.table, w0, &ctx.one_fn())
}

/// `∏_α (1 − αX)^{-1}` over the `m`-th roots `α` of `c` at which the period
/// of `W_0` is nonzero.
pub fn l_from_shalika_periods(ctx: &LevelZeroCtx, w0: &WhittakerFun) -> Result<RatQS> {
    let v = shalika_functional_value(ctx, w0)?;
    let m = ctx.m();
    let mut out = RatQS::one();
    if v.norm() <= crate::charkit::TOL || !ctx.unramified() {
        return Ok(out);
    }
    let root = Complex64::from_polar(1.0, ctx.c.arg() / m as f64);
    for j in 0..m {
        let alpha = root * crate::charkit::root_of_unity(j as i128, m as u64);
        out = out.mul(&RatQS::new(vec![c(1.0)], vec![c(1.0), -alpha], 0)?);
    }
    Ok(out)
}

/// Outcome of [`modified_fe_check`].
#[derive(Debug, Clone, Serialize)]
pub struct ModifiedFe {
    pub gamma: RatQS,
    pub max_residual: f64,
    pub pairs_checked: usize,
}

/// The two sides of the modified functional equation with `L(·, 1)`.
fn modified_sides(ctx: &LevelZeroCtx, w: &WhittakerFun, phi: &CFun) -> Result<(RatQS, RatQS)> {
    let js = &ctx.js;
    let q = ctx.q();
    let m = ctx.m();
    let period = js.js(&ctx.table, w, &ctx.one_fn())?;
    let hat0 = js.dual_transform(phi).at(0);
    let lhs = RatQS::constant(js.dual_js(&ctx.table, w, phi)?).add(
        &RatQS::monomial(q.powi(-(m as i32)) * hat0 * period, -(m as i64)).mul(&dual_l_factor(c(1.0), m, q)?),
    );
    let rhs = RatQS::constant(js.js(&ctx.table, w, phi)?)
        .add(&RatQS::monomial(phi.at(0) * period, m as i64).mul(&l_factor(c(1.0), m)?));
    Ok((lhs, rhs))
}

/// Extracts `γ̃ = LHS/RHS` on the canonical pair and checks `LHS = γ̃·RHS`
/// on translates `(𝓑(·h), δ_x)`: all of them when few, else `opts.trials`.
pub fn modified_fe_check(table: &BesselTable, opts: &FeOptions) -> Result<ModifiedFe> {
    let ctx = LevelZeroCtx::new(table, c(1.0))?;
    if !ctx.even() {
        return Err(GammaError::PreconditionViolated("the modified equation is for even n".into()));
    }
    let f = table.rep().field().as_ref();
    let n = table.n() as usize;
    let (w0, phi0) = ctx.js.canonical_pair()?;
    let (l0, r0) = modified_sides(&ctx, &w0, &phi0)?;
    let gamma = l0.div(&r0)?;
    let m = ctx.js.m();
    let nvec = (f.q() as usize).pow(m as u32);
    let pairs: Vec<(crate::matgrp::Mat, usize)> = if gl_order(f.q(), n as u32) * nvec as u128 <= opts.exhaustive_limit {
        gl_elements(f, n).into_iter().flat_map(|h| (0..nvec).map(move |i| (h.clone(), i))).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        (0..opts.trials).map(|_| (random_gl(f, n, &mut rng), rng.gen_range(0..nvec))).collect()
    };
    let mut max_residual: f64 = 0.0;
    for (h, i) in &pairs {
        let phi = CFun::delta(f, &vector_at(f, m, *i));
        let (l, r) = modified_sides(&ctx, &WhittakerFun::translate(h.clone()), &phi)?;
        max_residual = max_residual.max(l.distance(&gamma.mul(&r)));
    }
    if max_residual > RAT_TOL {
        return Err(GammaError::NonConstantRatio { residual: max_residual });
    }
    Ok(ModifiedFe { gamma, max_residual, pairs_checked: pairs.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(re: f64) -> Complex64 {
        c(re)
    }

    #[test]
    fn arithmetic_identities() {
        let a = RatQS::new(vec![r(1.0), r(2.0)], vec![r(1.0), r(-3.0), r(0.5)], 1).unwrap();
        let b = RatQS::new(vec![r(0.0), r(1.0), Complex64::new(0.0, 1.0)], vec![r(2.0), r(1.0)], -2).unwrap();
        assert!(a.mul(&a.inv().unwrap()).approx_eq(&RatQS::one()));
        assert!(a.add(&b).sub(&b).approx_eq(&a));
        let red = a.reduce();
        assert_eq!(red.num, red.reduce().num);
        assert_eq!(red.den[0], r(1.0));
        for x in [r(0.3), Complex64::new(0.1, -0.7), Complex64::from_polar(1.0, 2.0)] {
            assert!((a.mul(&b).eval(x) - a.eval(x) * b.eval(x)).norm() < 1e-9);
        }
    }

    #[test]
    fn cancellation_and_laurent_shift() {
        // (1 − X²)/(1 − X) = 1 + X
        let v = RatQS::new(vec![r(1.0), r(0.0), r(-1.0)], vec![r(1.0), r(-1.0)], 0).unwrap();
        assert_eq!(v.den.len(), 1);
        assert!(v.approx_eq(&RatQS::from_poly(vec![r(1.0), r(1.0)])));
        let w = RatQS::new(vec![r(0.0), r(0.0), r(3.0)], vec![r(0.0), r(2.0)], -1).unwrap();
        assert_eq!((w.x_shift, w.num.len()), (0, 1));
    }

    #[test]
    fn l_factor_examples() {
        assert!(l_factor(c(0.0), 3).unwrap().approx_eq(&RatQS::one()));
        let l = l_factor(c(1.0), 1).unwrap();
        assert!((l.eval(r(0.5)) - r(2.0)).norm() < 1e-12);
        let cval = Complex64::from_polar(1.0, 0.9);
        let ctx_prod = (0..3).fold(RatQS::one(), |acc, j| {
            let a = Complex64::from_polar(1.0, 0.3) * crate::charkit::root_of_unity(j, 3);
            acc.mul(&RatQS::new(vec![r(1.0)], vec![r(1.0), -a], 0).unwrap())
        });
        assert!(ctx_prod.approx_eq(&l_factor(cval, 3).unwrap()));
    }

    #[test]
    fn reflect_is_an_involution() {
        let a = RatQS::new(vec![r(1.0), r(2.0)], vec![r(1.0), r(-3.0), r(0.5)], 2).unwrap();
        assert!(a.reflect(3.0).reflect(3.0).approx_eq(&a));
        let x = Complex64::new(0.4, 0.2);
        assert!((a.reflect(3.0).eval(x) - a.eval((x * 3.0).inv())).norm() < 1e-9);
    }

    #[test]
    fn json_shape() {
        let a = RatQS::monomial(Complex64::new(0.5, -1.0), -2);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"num":[[0.5,-1.0]],"den":[[1.0,0.0]],"x_shift":-2}"#);
        let back: RatQS = serde_json::from_str(&s).unwrap();
        assert!(back.approx_eq(&a));
    }

    fn table(p: u32, n: u32, k: i64) -> BesselTable {
        let f = crate::ffield::build_field(p, 1, n).unwrap();
        let rep = crate::cuspchar::CuspidalRep::new(&f, n, k).unwrap();
        BesselTable::build(&rep, &crate::charkit::AddChar::standard(&f))
    }

    #[test]
    fn shalika_case_factors() {
        let ctx = LevelZeroCtx::new(&table(3, 2, 2), r(1.0)).unwrap();
        assert!(ctx.has_shalika_vector());
        let (l, eps) = local_l_eps(&ctx).unwrap();
        assert!(l.approx_eq(&RatQS::new(vec![r(1.0)], vec![r(1.0), r(-1.0)], 0).unwrap()));
        assert!(eps.approx_eq(&RatQS::monomial(r(3f64.powf(-0.5)), -1)));
        let g = local_gamma(&ctx).unwrap();
        assert!(g.approx_eq(&gamma_from_l_eps(&ctx).unwrap()));
        assert!(l.has_pole() && !g.is_constant());
    }

    #[test]
    fn non_shalika_case_is_constant() {
        let ctx = LevelZeroCtx::new(&table(3, 2, 1), Complex64::new(0.0, 1.0)).unwrap();
        let g = local_gamma(&ctx).unwrap();
        assert!(g.is_constant());
        let (l, eps) = local_l_eps(&ctx).unwrap();
        assert!(!l.has_pole() && eps.approx_eq(&g));
    }

    #[test]
    fn modified_equation_gl2_q3() {
        for k in crate::charkit::regular_orbit_representatives(3, 2).into_iter().map(|k| k as i64) {
            let t = table(3, 2, k);
            let out = modified_fe_check(&t, &FeOptions::default()).unwrap();
            assert_eq!(out.pairs_checked, 48 * 3);
            if k == 2 {
                let lz = local_gamma(&LevelZeroCtx::new(&t, r(1.0)).unwrap()).unwrap();
                assert!(out.gamma.approx_eq(&lz), "{} vs {}", out.gamma, lz);
            }
        }
    }
}
