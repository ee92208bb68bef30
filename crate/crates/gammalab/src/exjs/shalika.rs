//! Shalika vectors and the multiplicity-one bounds.

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use serde::Serialize;

use super::{JsContext, WhittakerFun};
use crate::bessel::BesselTable;
use crate::charkit::{restriction_is_trivial, CFun, TOL};
use crate::cuspchar::CuspidalRep;
use crate::error::{GammaError, Result};
use crate::matgrp::{self, gl_elements, gl_order, random_gl, shalika_diag, shalika_unipotent, CosetKind, Mat};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShalikaReport {
    /// `(q^m − 1) | k`.
    pub criterion: bool,
    /// Whether some `W` with `js(W, 1) ≠ 0` was found.
    pub nonvanishing_found: bool,
    /// `js(W, 1)` and `W(σ)` for the constructed candidate.
    pub witness_js: Complex64,
    pub witness_at_sigma: Complex64,
    /// Largest `|js(𝓑(·h), 1)|` over the translates searched.
    pub max_translate_js: f64,
    pub translates_checked: usize,
    /// `(js, dual_js)` of the normalized witness against `φ = 1`, when it exists.
    pub broken_equation: Option<(Complex64, Complex64)>,
}

impl ShalikaReport {
    pub fn consistent(&self) -> bool {
        self.criterion == self.nonvanishing_found
            && self.broken_equation.map_or(true, |(a, b)| (a - 1.0).norm() < TOL && b.norm() < TOL)
    }
}

/// `W(h) = Σ_{g∈N\P} Σ_X 𝓑(h·U(X)·D(g)·σ^{-1}) ψ(−tr X)`.
pub fn shalika_witness(ctx: &JsContext) -> Result<WhittakerFun> {
    let f = ctx.field().as_ref();
    let m = ctx.m();
    if ctx.is_odd() {
        return Err(GammaError::PreconditionViolated("Shalika vectors are an even-n notion".into()));
    }
    let sigma_inv = ctx.sigma().inv(f)?;
    let mut eps = vec![0; m];
    eps[m - 1] = 1;
    let xs = matgrp::coset_reps(f, m, CosetKind::UpperBackslashMat);
    let mut terms = Vec::new();
    for g in ctx.ng_reps().iter().filter(|g| g.row(m - 1) == eps) {
        let dg = shalika_diag(g, false);
        for x in &xs {
            let h = Mat::product(f, &[&shalika_unipotent(x, false), &dg, &sigma_inv]);
            terms.push((ctx.psi().eval(f.neg(x.trace(f))), h));
        }
    }
    Ok(WhittakerFun::from_terms(terms))
}

/// Decides whether `π` has a Shalika vector, by the divisibility criterion
/// and independently by searching for `W` with `js(W, 1) ≠ 0`.
///
/// Translates are exhaustive when `|GL_n| ≤ exhaustive_limit`, otherwise
/// `samples` random ones are drawn.
pub fn shalika_detect(table: &BesselTable, samples: usize, exhaustive_limit: u128, seed: u64) -> Result<ShalikaReport> {
    let rep = table.rep();
    let f = rep.field().as_ref();
    let n = rep.n() as usize;
    if n % 2 == 1 {
        return Err(GammaError::PreconditionViolated("Shalika detection needs even n".into()));
    }
    let m = n / 2;
    let criterion = restriction_is_trivial(rep.theta(), m as u32);
    let ctx = JsContext::new(table.psi(), n)?;
    let one = CFun::constant(m, f.q() as usize, Complex64::new(1.0, 0.0));

    let witness = shalika_witness(&ctx)?;
    let witness_js = ctx.js(table, &witness, &one)?;
    let witness_at_sigma = witness.eval(table, ctx.sigma())?;

    let hs = if gl_order(f.q(), n as u32) <= exhaustive_limit {
        gl_elements(f, n)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..samples).map(|_| random_gl(f, n, &mut rng)).collect()
    };
    let mut max_translate_js: f64 = 0.0;
    for h in &hs {
        let v = ctx.js(table, &WhittakerFun::translate(h.clone()), &one)?;
        max_translate_js = max_translate_js.max(v.norm());
    }
    let nonvanishing_found = witness_js.norm() > TOL || max_translate_js > TOL;
    let broken_equation = if witness_js.norm() > TOL {
        let w = witness.scale(witness_js.inv());
        Some((ctx.js(table, &w, &one)?, ctx.dual_js(table, &w, &one)?))
    } else {
        None
    };
    Ok(ShalikaReport {
        criterion,
        nonvanishing_found,
        witness_js,
        witness_at_sigma,
        max_translate_js,
        translates_checked: hs.len(),
        broken_equation,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomdimReport {
    /// `(1/|H|) Σ_{h∈H} χ(h)`.
    pub value: Complex64,
    /// The nearest integer to `value`.
    pub dimension: i64,
    pub subgroup_order: usize,
}

/// `dim Hom_H(π, 1)` for `H = L_{m,m} ∩ P_{2m}` (even) or `M′_{2m+1} ∩ P_{2m+1}` (odd).
pub fn homdim_check(rep: &CuspidalRep) -> Result<HomdimReport> {
    let f = rep.field().as_ref();
    let n = rep.n() as usize;
    let m = n / 2;
    let gm = gl_elements(f, m);
    let mut eps = vec![0; m];
    eps[m - 1] = 1;
    let mirabolic: Vec<&Mat> = gm.iter().filter(|g| g.row(m - 1) == eps).collect();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut order = 0usize;
    if n % 2 == 0 {
        for g1 in &gm {
            for g2 in &mirabolic {
                sum += rep.character(&matgrp::block_diag(&[g1, g2]))?;
                order += 1;
            }
        }
    } else {
        let us: Vec<Vec<_>> =
            (0..(f.q() as usize).pow(m as u32)).map(|i| crate::charkit::vector_at(f, m, i)).collect();
        for g1 in &gm {
            for g2 in &gm {
                let base = matgrp::block_diag(&[g1, g2, &Mat::identity(1)]);
                for u in &us {
                    let mut h = base.clone();
                    for (i, &ui) in u.iter().enumerate() {
                        h.set(i, n - 1, ui);
                    }
                    sum += rep.character(&h)?;
                    order += 1;
                }
            }
        }
    }
    let value = sum / order as f64;
    let dimension = value.re.round() as i64;
    if value.im.abs() > 1e-6 || (value.re - dimension as f64).abs() > 1e-6 || !(0..=1).contains(&dimension) {
        return Err(GammaError::DimensionBoundViolated(value.re));
    }
    Ok(HomdimReport { value, dimension, subgroup_order: order })
}
