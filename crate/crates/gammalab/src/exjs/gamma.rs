//! The exterior-square gamma factor by the functional equation, the torus
//! sums and the closed forms for `n ≤ 4`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{JsContext, WhittakerFun};
use crate::bessel::BesselTable;
use crate::charkit::{gauss_sum, kloosterman, restriction_is_trivial, vector_at, CFun, TOL};
use crate::cuspchar::CuspidalRep;
use crate::error::{GammaError, Result};
use crate::matgrp::{antidiag_elem, compositions, gl_elements, gl_order, random_gl, unit_tuples};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Ratio,
    Torus,
    ClosedForm,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaResult {
    pub value: Complex64,
    pub route: Route,
    /// Largest `|dual_js − γ·js|` seen while checking constancy.
    pub residual: f64,
    pub pairs_checked: usize,
}

impl GammaResult {
    fn direct(value: Complex64, route: Route) -> Self {
        GammaResult { value, route, residual: 0.0, pairs_checked: 0 }
    }
}

/// Sampling controls for the functional-equation check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeOptions {
    pub seed: u64,
    pub trials: usize,
    /// Every pair is checked when `|GL_n|·q^m` is at most this.
    pub exhaustive_limit: u128,
    pub tol: f64,
}

impl Default for FeOptions {
    fn default() -> Self {
        FeOptions { seed: 0x6a73, trials: 128, exhaustive_limit: 100_000, tol: TOL }
    }
}

fn binom2x2(m: usize) -> i32 {
    (m * m.saturating_sub(1)) as i32
}

fn check_no_shalika(rep: &CuspidalRep) -> Result<()> {
    let n = rep.n();
    if n % 2 == 0 && restriction_is_trivial(rep.theta(), n / 2) {
        return Err(GammaError::ShalikaVectorPresent);
    }
    Ok(())
}

/// `γ` as `dual_js/js` on the canonical pair, then checked on many pairs
/// `(𝓑(·h), δ_x)`: all of them when there are few enough, otherwise
/// `opts.trials` random ones.
pub fn gamma_ratio(table: &BesselTable, opts: &FeOptions) -> Result<GammaResult> {
    let rep = table.rep();
    check_no_shalika(rep)?;
    let f = rep.field().as_ref();
    let n = rep.n() as usize;
    let ctx = JsContext::new(table.psi(), n)?;
    let (w0, phi0) = ctx.canonical_pair()?;
    let js0 = ctx.js(table, &w0, &phi0)?;
    if (js0 - Complex64::new(1.0, 0.0)).norm() > opts.tol {
        return Err(GammaError::OracleFailed(format!("canonical js = {js0}, expected 1")));
    }
    let gamma = ctx.dual_js(table, &w0, &phi0)? / js0;

    let m = ctx.m();
    let q = f.q() as usize;
    let deltas: Vec<CFun> = (0..q.pow(m as u32)).map(|i| CFun::delta(f, &vector_at(f, m, i))).collect();
    let total = gl_order(f.q(), n as u32) * deltas.len() as u128;
    let exhaustive = total <= opts.exhaustive_limit;
    let samples: Vec<(crate::matgrp::Mat, Option<usize>)> = if exhaustive {
        gl_elements(f, n).into_iter().map(|h| (h, None)).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        (0..opts.trials).map(|_| (random_gl(f, n, &mut rng), Some(rng.gen_range(0..deltas.len())))).collect()
    };
    let residuals: Vec<(f64, usize)> = samples
        .par_iter()
        .map(|(h, which)| -> Result<(f64, usize)> {
            let w = WhittakerFun::translate(h.clone());
            let phis: Vec<CFun> = match which {
                Some(i) => vec![deltas[*i].clone()],
                None => deltas.clone(),
            };
            let vals = ctx.pair_values(table, &w, &phis)?;
            let r = vals.iter().map(|(a, b)| (b - gamma * a).norm()).fold(0.0, f64::max);
            Ok((r, vals.len()))
        })
        .collect::<Result<_>>()?;
    let residual = residuals.iter().map(|r| r.0).fold(0.0, f64::max);
    let pairs_checked = residuals.iter().map(|r| r.1).sum();
    if residual > opts.tol {
        return Err(GammaError::NonConstantRatio { residual });
    }
    Ok(GammaResult { value: gamma, route: Route::Ratio, residual, pairs_checked })
}

/// `γ` from the Bessel function on the torus cells.
pub fn gamma_torus(table: &BesselTable) -> Result<GammaResult> {
    let rep = table.rep();
    check_no_shalika(rep)?;
    let f = rep.field().as_ref();
    let psi = table.psi();
    let n = rep.n() as usize;
    let m = n / 2;
    let odd = n % 2 == 1;
    let q = f.q() as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for comp in compositions(m) {
        let weight = q.powi(-comp.iter().map(|&k| binom2x2(k)).sum::<i32>());
        for lambdas in unit_tuples(f, comp.len()) {
            let cell = antidiag_elem(&comp, &lambdas, 2, odd)?;
            let mut term = table.eval(&cell.inv(f)?)?;
            if !odd && *comp.last().expect("nonempty") == 1 {
                term *= psi.eval(*lambdas.last().expect("nonempty"));
            }
            sum += term * weight;
        }
    }
    let half = if odd { m as f64 / 2.0 } else { -(m as f64) / 2.0 };
    let value = sum * q.powf(half + binom2x2(m) as f64);
    Ok(GammaResult::direct(value, Route::Torus))
}

/// The two partial sums of the even torus formula, and `γ` rebuilt from them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct S0S1 {
    pub s0: Complex64,
    pub s1: Complex64,
    /// `Σ_a ω_π(a^{-1})ψ(a)`.
    pub gauss: Complex64,
    pub gamma: Complex64,
}

/// `S_0` collects compositions whose first part exceeds one, `S_1` the cells
/// `antidiag(I_2, λ_2 I_{2m_2}, …)`.
pub fn s0_s1_decomposition(table: &BesselTable) -> Result<S0S1> {
    let rep = table.rep();
    let n = rep.n() as usize;
    if n % 2 == 1 {
        return Err(GammaError::PreconditionViolated("S0/S1 split needs even n".into()));
    }
    check_no_shalika(rep)?;
    let f = rep.field().as_ref();
    let q = f.q() as f64;
    let m = n / 2;
    let mut s0 = Complex64::new(0.0, 0.0);
    for comp in compositions(m).into_iter().filter(|c| c[0] > 1) {
        let weight = q.powi(-comp.iter().map(|&k| binom2x2(k)).sum::<i32>());
        for lambdas in unit_tuples(f, comp.len()) {
            s0 += table.eval(&antidiag_elem(&comp, &lambdas, 2, false)?)? * weight;
        }
    }
    let tails = if m == 1 { vec![Vec::new()] } else { compositions(m - 1) };
    let mut s1 = Complex64::new(0.0, 0.0);
    for tail in tails {
        let weight = q.powi(-tail.iter().map(|&k| binom2x2(k)).sum::<i32>());
        let comp: Vec<usize> = std::iter::once(1).chain(tail.iter().copied()).collect();
        for lambdas in unit_tuples(f, tail.len()) {
            let scalars: Vec<_> = std::iter::once(1).chain(lambdas).collect();
            s1 += table.eval(&antidiag_elem(&comp, &scalars, 2, false)?)? * weight;
        }
    }
    let gauss = gauss_sum(rep.central_char(), table.psi())?;
    let gamma = (s0 + s1 * gauss) * q.powf(-(m as f64) / 2.0 + binom2x2(m) as f64);
    Ok(S0S1 { s0, s1, gauss, gamma })
}

/// Which Kloosterman arguments enter the `GL_4` closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum KloostermanArgs {
    /// `Tr(ξ^{-2}) ± Tr(ξ²)/N(ξ)`, from the square-sum substitution.
    Derived,
    /// `Tr(ξ²)/N(ξ)² ± N(ξ)·Tr(ξ^{-2})`.
    Printed,
}

fn gl4_closed(rep: &CuspidalRep, psi: &crate::charkit::AddChar, args: KloostermanArgs) -> Result<Complex64> {
    let f = rep.field().as_ref();
    let q = f.q() as f64;
    let theta = rep.theta();
    if rep.n() != 4 {
        return Err(GammaError::UnsupportedN(rep.n()));
    }
    if restriction_is_trivial(theta, 2) {
        return Err(GammaError::PreconditionViolated("GL_4 closed form needs θ nontrivial on F_{q^2}^×".into()));
    }
    let t0 = if rep.central_char().is_trivial() { q * q - 1.0 } else { 0.0 };
    let mut s = Complex64::new(0.0, 0.0);
    for xi in f.subfield_units(4) {
        let xi2 = f.mul(xi, xi);
        let nxi = f.norm(xi, 4, 1)?;
        let tr_sq = f.trace(xi2, 4, 1)?;
        let tr_inv_sq = f.trace(f.inv(xi2)?, 4, 1)?;
        let (first, second) = match args {
            KloostermanArgs::Derived => (tr_inv_sq, f.div(tr_sq, nxi)?),
            KloostermanArgs::Printed => (f.div(tr_sq, f.mul(nxi, nxi))?, f.mul(nxi, tr_inv_sq)),
        };
        let k = kloosterman(1, f.add(first, second), psi) + kloosterman(1, f.sub(first, second), psi);
        s += theta.eval(xi2) * k;
    }
    let g = gauss_sum(rep.central_char(), psi)?;
    Ok(Complex64::new(t0 / (q * q), 0.0) - g * s * (0.5 / q.powi(3)))
}

/// The `GL_4` closed form with Kloosterman arguments
/// `Tr(ξ²)/N(ξ)² ± N(ξ)·Tr(ξ^{-2})`.
///
/// This differs from [`gamma_closed`] whenever `ω_π` is nontrivial and `q` is
/// odd; there it disagrees with the ratio and torus routes.
pub fn gamma_closed_gl4_printed(rep: &CuspidalRep, psi: &crate::charkit::AddChar) -> Result<Complex64> {
    gl4_closed(rep, psi, KloostermanArgs::Printed)
}

/// The closed forms for `n = 2, 3, 4`.
///
/// For `n = 4` the Kloosterman arguments are `Tr(ξ^{-2}) ± Tr(ξ²)/N(ξ)`, the
/// values produced by substituting `(ξ², ±N ξ)` into the `w_6` Bessel formula.
pub fn gamma_closed(rep: &CuspidalRep, psi: &crate::charkit::AddChar) -> Result<GammaResult> {
    let f = rep.field().as_ref();
    let q = f.q() as f64;
    let value = match rep.n() {
        2 => {
            if rep.central_char().is_trivial() {
                return Err(GammaError::PreconditionViolated("GL_2 closed form needs nontrivial ω_π".into()));
            }
            gauss_sum(rep.central_char(), psi)? / q.sqrt()
        }
        3 => {
            let mut s = Complex64::new(0.0, 0.0);
            for xi in f.subfield_units(3) {
                let xi2 = f.mul(xi, xi);
                let arg = f.neg(f.div(f.trace(xi2, 3, 1)?, f.norm(xi, 3, 1)?)?);
                s += psi.eval(arg) * rep.theta().eval(xi2);
            }
            s * q.powf(-1.5)
        }
        4 => gl4_closed(rep, psi, KloostermanArgs::Derived)?,
        other => return Err(GammaError::UnsupportedN(other)),
    };
    Ok(GammaResult::direct(value, Route::ClosedForm))
}

/// Both sides of `2·Σ_λ Σ_{N(ξ)=λ²} J(ξ, λ) = Σ_ξ (J(ξ², N ξ) + J(ξ², −N ξ))`
/// for `ξ ∈ F_{q^d}^×`, `λ ∈ F_q^×`, kept free of division so integer `J`
/// compares exactly.
pub fn square_sum_sides<T>(f: &crate::ffield::FieldCtx, d: u32, mut j: impl FnMut(u32, u32) -> T) -> Result<(T, T)>
where
    T: std::ops::Add<Output = T> + Default + Clone,
{
    let units = f.subfield_units(d);
    let mut lhs = T::default();
    for &lambda in &f.subfield_units(1) {
        let l2 = f.mul(lambda, lambda);
        for &xi in &units {
            if f.norm(xi, d, 1)? == l2 {
                lhs = lhs + j(xi, lambda);
            }
        }
    }
    let mut rhs = T::default();
    for &xi in &units {
        let nxi = f.norm(xi, d, 1)?;
        let xi2 = f.mul(xi, xi);
        rhs = rhs + j(xi2, nxi) + j(xi2, f.neg(nxi));
    }
    Ok((lhs.clone() + lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charkit::{regular_orbit_representatives, AddChar};
    use crate::ffield::build_field;

    fn reps(p: u32, n: u32) -> Vec<(CuspidalRep, BesselTable)> {
        let f = build_field(p, 1, n).unwrap();
        let psi = AddChar::standard(&f);
        regular_orbit_representatives(p as u64, n)
            .into_iter()
            .map(|k| CuspidalRep::new(&f, n, k as i64).unwrap())
            .filter(|r| n % 2 == 1 || !restriction_is_trivial(r.theta(), n / 2))
            .map(|r| {
                let t = BesselTable::build(&r, &psi);
                (r, t)
            })
            .collect()
    }

    #[test]
    fn routes_agree_small() {
        for &(p, n) in &[(2u32, 2u32), (3, 2), (2, 3), (3, 3), (2, 4)] {
            for (rep, table) in reps(p, n) {
                let ratio = gamma_ratio(&table, &FeOptions::default()).unwrap_or_else(|e| panic!("({p},{n},{}): {e}", rep.theta().exponent()));
                let torus = gamma_torus(&table).unwrap();
                let k = rep.theta().exponent();
                let closed = match gamma_closed(&rep, table.psi()) {
                    Ok(c) => c,
                    Err(GammaError::PreconditionViolated(_)) => torus.clone(),
                    Err(e) => panic!("{e}"),
                };
                assert!((ratio.value - torus.value).norm() < 1e-7, "({p},{n},{k}) ratio {} torus {}", ratio.value, torus.value);
                assert!((ratio.value - closed.value).norm() < 1e-7, "({p},{n},{k}) ratio {} closed {}", ratio.value, closed.value);
                assert!((ratio.value.norm() - 1.0).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn s0_s1_rebuilds_gamma() {
        for &(p, n) in &[(3u32, 2u32), (2, 4)] {
            for (rep, table) in reps(p, n) {
                let d = s0_s1_decomposition(&table).unwrap();
                let t = gamma_torus(&table).unwrap();
                assert!((d.gamma - t.value).norm() < 1e-9);
                if !rep.central_char().is_trivial() {
                    assert!(d.s0.norm() < 1e-9);
                }
                if n == 2 {
                    assert!(d.s0.norm() < 1e-12 && (d.s1 - 1.0).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn shalika_rep_is_rejected() {
        let f = build_field(3, 1, 2).unwrap();
        let rep = CuspidalRep::new(&f, 2, 2).unwrap();
        let table = BesselTable::build(&rep, &AddChar::standard(&f));
        assert!(matches!(gamma_ratio(&table, &FeOptions::default()), Err(GammaError::ShalikaVectorPresent)));
        assert!(matches!(gamma_torus(&table), Err(GammaError::ShalikaVectorPresent)));
    }
}
