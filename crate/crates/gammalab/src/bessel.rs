//! The Bessel function `𝓑_{π,ψ}` of a cuspidal representation.
//!
//! Values are tabulated on the support cells `antidiag(λ_1 I_{n_1}, …)` by
//! averaging the character, and extended to all of `GL_n(F_q)` through the
//! Bruhat decomposition and `𝓑(u_1 g u_2) = ψ(u_1)ψ(u_2)𝓑(g)`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::charkit::AddChar;
use crate::cuspchar::CuspidalRep;
use crate::error::{GammaError, Result};
use crate::ffield::FElem;
use crate::matgrp::{self, antidiag_elem, bruhat, parse_antidiag_scalar, Mat};

/// `(composition, scalars)` naming `antidiag(λ_1 I_{n_1}, …, λ_r I_{n_r})`.
pub type BesselKey = (Vec<usize>, Vec<FElem>);

#[derive(Debug, Clone)]
pub struct BesselTable {
    rep: CuspidalRep,
    psi: AddChar,
    entries: BTreeMap<BesselKey, Complex64>,
}

/// `(1/|N|) Σ_{u∈N} χ(g·u) ψ^{-1}(u)`.
pub fn bessel_direct(rep: &CuspidalRep, psi: &AddChar, g: &Mat, unipotents: &[Mat]) -> Result<Complex64> {
    let f = rep.field().as_ref();
    let mut s = Complex64::new(0.0, 0.0);
    for u in unipotents {
        let chi = rep.character(&g.mul(f, u))?;
        if chi.norm_sqr() != 0.0 {
            s += chi * psi.eval(u.superdiag_sum(f)).conj();
        }
    }
    Ok(s / unipotents.len() as f64)
}

impl BesselTable {
    /// Tabulates every support cell, in parallel over keys.
    pub fn build(rep: &CuspidalRep, psi: &AddChar) -> Self {
        let f = rep.field().as_ref();
        let n = rep.n() as usize;
        let unipotents = matgrp::upper_unipotents(f, n);
        let keys: Vec<BesselKey> = matgrp::compositions(n)
            .into_iter()
            .flat_map(|comp| {
                matgrp::unit_tuples(f, comp.len()).into_iter().map(move |s| (comp.clone(), s))
            })
            .collect();
        let entries = keys
            .into_par_iter()
            .map(|key| {
                let t = antidiag_elem(&key.0, &key.1, 1, false).expect("unit scalars");
                let v = bessel_direct(rep, psi, &t, &unipotents).expect("invertible key");
                (key, v)
            })
            .collect();
        BesselTable { rep: rep.clone(), psi: psi.clone(), entries }
    }

    pub fn rep(&self) -> &CuspidalRep {
        &self.rep
    }

    pub fn psi(&self) -> &AddChar {
        &self.psi
    }

    pub fn n(&self) -> u32 {
        self.rep.n()
    }

    pub fn entries(&self) -> &BTreeMap<BesselKey, Complex64> {
        &self.entries
    }

    pub fn entry(&self, weights: &[usize], scalars: &[FElem]) -> Option<Complex64> {
        self.entries.get(&(weights.to_vec(), scalars.to_vec())).copied()
    }

    /// `𝓑(g)` for any invertible `g`.
    pub fn eval(&self, g: &Mat) -> Result<Complex64> {
        let f = self.rep.field().as_ref();
        if g.n() != self.rep.n() as usize {
            return Err(GammaError::DimensionMismatch { expected: self.rep.n() as usize, got: g.n() });
        }
        let b = bruhat(f, g)?;
        let Some(key) = parse_antidiag_scalar(&b.wd(f)) else {
            return Ok(Complex64::new(0.0, 0.0));
        };
        let v = self.entries.get(&key).copied().unwrap_or_default();
        Ok(self.psi.eval(b.u1.superdiag_sum(f)) * self.psi.eval(b.u2.superdiag_sum(f)) * v)
    }

    /// CSV with columns `composition,scalars,re,im`; scalars are written as
    /// exponents of the canonical generator of `F_q^×`.
    pub fn to_csv(&self) -> String {
        let f = self.rep.field();
        let mut out = String::from("composition,scalars,re,im\n");
        for ((comp, scalars), v) in &self.entries {
            let c: Vec<String> = comp.iter().map(|x| x.to_string()).collect();
            let s: Vec<String> = scalars.iter().map(|&x| (f.fq_slot(x) - 1).to_string()).collect();
            writeln!(out, "{},{},{:.12},{:.12}", c.join(";"), s.join(";"), v.re, v.im).expect("string write");
        }
        out
    }
}

pub fn bessel_build(rep: &CuspidalRep, psi: &AddChar) -> BesselTable {
    BesselTable::build(rep, psi)
}

pub fn bessel_eval(table: &BesselTable, g: &Mat) -> Result<Complex64> {
    table.eval(g)
}

/// `𝓑(antidiag(λ_1, λ_2 I_2)) = q^{-2} Σ_{N(ξ)=λ_1λ_2²} ψ(−λ_2^{-1} Tr ξ) θ(ξ)` on `GL_3`.
pub fn bessel_closed_form_gl3(rep: &CuspidalRep, psi: &AddChar, l1: FElem, l2: FElem) -> Result<Complex64> {
    let f = rep.field().as_ref();
    if rep.n() != 3 {
        return Err(GammaError::UnsupportedN(rep.n()));
    }
    if l1 == 0 || l2 == 0 {
        return Err(GammaError::ZeroScalar);
    }
    let target = f.mul(l1, f.mul(l2, l2));
    let l2inv = f.inv(l2)?;
    let mut s = Complex64::new(0.0, 0.0);
    for xi in f.subfield_units(3) {
        if f.norm(xi, 3, 1)? != target {
            continue;
        }
        let arg = f.neg(f.mul(l2inv, f.trace(xi, 3, 1)?));
        s += psi.eval(arg) * rep.theta().eval(xi);
    }
    Ok(s / (f.q() as f64).powi(2))
}

/// `𝓑(diag(μI_2, νI_2)·antidiag(I_2, I_2))` on `GL_4` by the character-sum
/// formula with `a_3(ξ) = −Tr ξ` and `a_1(ξ) = −Tr(1/ξ)·N(ξ)`.
pub fn bessel_closed_form_gl4(rep: &CuspidalRep, psi: &AddChar, mu: FElem, nu: FElem) -> Result<Complex64> {
    let f = rep.field().as_ref();
    if rep.n() != 4 {
        return Err(GammaError::UnsupportedN(4));
    }
    if mu == 0 || nu == 0 {
        return Err(GammaError::ZeroScalar);
    }
    let q = f.q() as f64;
    let mn = f.mul(mu, nu);
    let target = f.mul(mn, mn);
    let denom_base = f.mul(mn, nu);
    let units = f.subfield_units(1);
    let mut s = Complex64::new(0.0, 0.0);
    for xi in f.subfield_units(4) {
        let nxi = f.norm(xi, 4, 1)?;
        if nxi != target {
            continue;
        }
        let a3 = f.neg(f.trace(xi, 4, 1)?);
        let a1 = f.neg(f.mul(f.trace(f.inv(xi)?, 4, 1)?, nxi));
        let numer = f.add(a1, f.mul(a3, mn));
        let mut inner = Complex64::new(0.0, 0.0);
        if f.in_subfield(xi, 2) && !f.in_subfield(xi, 1) && mn == f.neg(f.norm(xi, 2, 1)?) {
            inner -= q;
        }
        for &beta in &units {
            let arg = f.add(f.neg(beta), f.div(numer, f.mul(beta, denom_base))?);
            inner += psi.eval(arg);
        }
        s += inner * (-1.0 / q.powi(4)) * rep.theta().eval(xi);
    }
    Ok(s)
}
