//! Jacquet–Shalika sums, their duals, the Shalika subgroup action and the
//! exterior-square gamma factor.

mod gamma;
mod shalika;

pub use gamma::{
    gamma_closed, gamma_closed_gl4_printed, gamma_ratio, gamma_torus, s0_s1_decomposition, square_sum_sides, FeOptions, GammaResult, Route, S0S1,
};
pub use shalika::{homdim_check, shalika_detect, shalika_witness, HomdimReport, ShalikaReport};

use std::sync::Arc;

use num_complex::Complex64;

use crate::bessel::BesselTable;
use crate::charkit::{fourier, vector_index, AddChar, CFun};
use crate::error::{GammaError, Result};
use crate::ffield::{FElem, FieldCtx};
use crate::matgrp::{
    self, block_diag, coset_reps, long_weyl, odd_lower, odd_upper_right, shalika_diag, shalika_unipotent,
    sigma_perm, CosetKind, Mat,
};

/// A Whittaker function `W(g) = Σ_i c_i 𝓑(g·h_i)`.
///
/// Right translates of the Bessel function span the Whittaker model, so
/// finite combinations of them represent every `W`.
#[derive(Debug, Clone, PartialEq)]
pub struct WhittakerFun {
    terms: Vec<(Complex64, Mat)>,
}

impl WhittakerFun {
    /// `𝓑` itself.
    pub fn bessel(n: usize) -> Self {
        Self::translate(Mat::identity(n))
    }

    /// `g ↦ 𝓑(g·h)`.
    pub fn translate(h: Mat) -> Self {
        Self::scaled_translate(Complex64::new(1.0, 0.0), h)
    }

    pub fn scaled_translate(c: Complex64, h: Mat) -> Self {
        WhittakerFun { terms: vec![(c, h)] }
    }

    pub fn from_terms(terms: Vec<(Complex64, Mat)>) -> Self {
        WhittakerFun { terms }
    }

    pub fn terms(&self) -> &[(Complex64, Mat)] {
        &self.terms
    }

    pub fn scale(&self, c: Complex64) -> Self {
        WhittakerFun { terms: self.terms.iter().map(|(a, h)| (a * c, h.clone())).collect() }
    }

    /// `π(s)W : g ↦ W(g·s)`.
    pub fn right_translate(&self, f: &FieldCtx, s: &Mat) -> Self {
        WhittakerFun { terms: self.terms.iter().map(|(a, h)| (*a, s.mul(f, h))).collect() }
    }

    pub fn eval(&self, table: &BesselTable, g: &Mat) -> Result<Complex64> {
        let f = table.rep().field().as_ref();
        let mut s = Complex64::new(0.0, 0.0);
        for (c, h) in &self.terms {
            s += c * table.eval(&g.mul(f, h))?;
        }
        Ok(s)
    }
}

/// An element of the Shalika subgroup: `[[g, X], [0, g]]` for even `n`,
/// `[[g, X, Y], [0, g, 0], [0, Z, 1]]` for odd `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShalikaElement {
    pub g: Mat,
    pub x: Mat,
    /// Column `Y` (odd case only).
    pub y: Option<Vec<FElem>>,
    /// Row `Z` (odd case only).
    pub z: Option<Vec<FElem>>,
}

impl ShalikaElement {
    pub fn even(g: Mat, x: Mat) -> Self {
        ShalikaElement { g, x, y: None, z: None }
    }

    pub fn odd(g: Mat, x: Mat, y: Vec<FElem>, z: Vec<FElem>) -> Self {
        ShalikaElement { g, x, y: Some(y), z: Some(z) }
    }

    pub fn is_odd(&self) -> bool {
        self.y.is_some()
    }

    fn validate(&self, f: &FieldCtx) -> Result<()> {
        let m = self.g.n();
        if self.x.n() != m {
            return Err(GammaError::MalformedShalikaElement(format!("X is {}x{}, g is {m}x{m}", self.x.n(), self.x.n())));
        }
        match (&self.y, &self.z) {
            (None, None) => {}
            (Some(y), Some(z)) if y.len() == m && z.len() == m => {}
            _ => return Err(GammaError::MalformedShalikaElement("Y and Z must both be present with length m".into())),
        }
        if !self.g.is_invertible(f) {
            return Err(GammaError::MalformedShalikaElement("g is singular".into()));
        }
        Ok(())
    }

    pub fn to_matrix(&self, f: &FieldCtx) -> Result<Mat> {
        self.validate(f)?;
        let m = self.g.n();
        let n = 2 * m + usize::from(self.is_odd());
        let mut s = Mat::identity(n);
        for i in 0..m {
            for j in 0..m {
                s.set(i, j, self.g.get(i, j));
                s.set(m + i, m + j, self.g.get(i, j));
                s.set(i, m + j, self.x.get(i, j));
            }
        }
        if let (Some(y), Some(z)) = (&self.y, &self.z) {
            for i in 0..m {
                s.set(i, 2 * m, y[i]);
                s.set(2 * m, m + i, z[i]);
            }
        }
        Ok(s)
    }

    /// Reads an element of `S_n` off a matrix, rejecting anything outside it.
    pub fn from_matrix(f: &FieldCtx, s: &Mat) -> Result<Self> {
        let n = s.n();
        let m = n / 2;
        let odd = n % 2 == 1;
        let block = |r0: usize, c0: usize| Mat::from_fn(m, |i, j| s.get(r0 + i, c0 + j));
        let g = block(0, 0);
        let x = block(0, m);
        let (y, z) = if odd {
            (Some((0..m).map(|i| s.get(i, 2 * m)).collect()), Some((0..m).map(|j| s.get(2 * m, m + j)).collect()))
        } else {
            (None, None)
        };
        let el = ShalikaElement { g, x, y, z };
        if n < 2 || el.to_matrix(f)? != *s {
            return Err(GammaError::MalformedShalikaElement("matrix is not in the Shalika subgroup".into()));
        }
        Ok(el)
    }

    /// `Ψ(s) = ψ(tr(X g^{-1}))`, defined on the whole group for even `n` and
    /// on the mirabolic part (`Z = 0`) for odd `n`.
    pub fn character(&self, f: &FieldCtx, psi: &AddChar) -> Result<Complex64> {
        if let Some(z) = &self.z {
            if z.iter().any(|&v| v != 0) {
                return Err(GammaError::MalformedShalikaElement("Ψ needs Z = 0".into()));
            }
        }
        let t = self.x.mul(f, &self.g.inv(f)?).trace(f);
        Ok(psi.eval(t))
    }
}

/// `ρ(s)φ`. Even: `φ(y) ↦ φ(yg)`. Odd: `ψ(−tr((X − YZ)g^{-1})) ψ(⟨x, Y⟩) φ(xg + Z)`,
/// obtained from the four generator relations.
pub fn shalika_action(s: &ShalikaElement, phi: &CFun, psi: &AddChar) -> Result<CFun> {
    let f = psi.field().as_ref();
    s.validate(f)?;
    let m = s.g.n();
    if phi.dim() != m {
        return Err(GammaError::DimensionMismatch { expected: m, got: phi.dim() });
    }
    let g = &s.g;
    match (&s.y, &s.z) {
        (Some(y), Some(z)) => {
            let ginv = g.inv(f)?;
            let mut yz = Mat::zeros(m);
            for i in 0..m {
                for j in 0..m {
                    yz.set(i, j, f.mul(y[i], z[j]));
                }
            }
            let diff = Mat::from_fn(m, |i, j| f.sub(s.x.get(i, j), yz.get(i, j)));
            let scalar = psi.eval(f.neg(diff.mul(f, &ginv).trace(f)));
            Ok(CFun::from_fn(f, m, |x| {
                let xg = g.vec_mul(f, x);
                let shifted: Vec<FElem> = xg.iter().zip(z).map(|(&a, &b)| f.add(a, b)).collect();
                let dot = x.iter().zip(y).fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)));
                scalar * psi.eval(dot) * phi.eval(f, &shifted)
            }))
        }
        _ => Ok(CFun::from_fn(f, m, |x| phi.eval(f, &g.vec_mul(f, x)))),
    }
}

/// One summand of a Jacquet–Shalika sum: `W(point)·weight·φ(slot)`.
#[derive(Debug, Clone)]
struct KernelTerm {
    point: Mat,
    weight: Complex64,
    slot: usize,
}

/// The index sets, kernel points and normalization of the Jacquet–Shalika
/// sums on `GL_n(F_q)` for a fixed `ψ`.
#[derive(Debug, Clone)]
pub struct JsContext {
    field: Arc<FieldCtx>,
    psi: AddChar,
    n: usize,
    m: usize,
    odd: bool,
    norm: f64,
    sigma: Mat,
    ng_reps: Vec<Mat>,
    js_terms: Vec<KernelTerm>,
    dual_terms: Vec<KernelTerm>,
    flip: Mat,
}

impl JsContext {
    pub fn new(psi: &AddChar, n: usize) -> Result<Self> {
        let field = psi.field().clone();
        let f = field.as_ref();
        if n < 2 {
            return Err(GammaError::BadParameters(format!("n = {n} must be at least 2")));
        }
        let m = n / 2;
        let odd = n % 2 == 1;
        let q = f.q() as usize;
        let sigma = sigma_perm(n);
        let ng_reps = coset_reps(f, m, CosetKind::UnipotentBackslashGl);
        let x_reps = coset_reps(f, m, CosetKind::UpperBackslashMat);
        let z_count = if odd { q.pow(m as u32) } else { 1 };
        let norm = 1.0 / (ng_reps.len() * x_reps.len() * z_count) as f64;
        let mut js_terms = Vec::new();
        let mut dual_terms = Vec::new();
        let front = matgrp::antidiag_blocks(&[Mat::identity(1), Mat::identity(2 * m)]);
        for g in &ng_reps {
            let dg = shalika_diag(g, odd);
            let g_inv = g.inv(f)?;
            for x in &x_reps {
                let ux = shalika_unipotent(x, odd);
                let weight = psi.eval(f.neg(x.trace(f)));
                let base = Mat::product(f, &[&sigma, &ux, &dg]);
                if odd {
                    for zi in 0..z_count {
                        let z = crate::charkit::vector_at(f, m, zi);
                        let lz = odd_lower(&z);
                        js_terms.push(KernelTerm { point: base.mul(f, &lz), weight, slot: zi });
                        let neg: Vec<FElem> = z.iter().map(|&v| f.neg(v)).collect();
                        let ur = odd_upper_right(&neg);
                        dual_terms.push(KernelTerm { point: Mat::product(f, &[&front, &base, &ur]), weight, slot: zi });
                    }
                } else {
                    let eps_g = g.row(m - 1);
                    js_terms.push(KernelTerm { point: base.clone(), weight, slot: vector_index(f, &eps_g) });
                    let e1_gt = g_inv.col(0);
                    dual_terms.push(KernelTerm { point: base, weight, slot: vector_index(f, &e1_gt) });
                }
            }
        }
        let flip = if odd {
            block_diag(&[&matgrp::antidiag_blocks(&[Mat::identity(m), Mat::identity(m)]), &Mat::identity(1)])
        } else {
            matgrp::antidiag_blocks(&[Mat::identity(m), Mat::identity(m)])
        };
        Ok(JsContext { field, psi: psi.clone(), n, m, odd, norm, sigma, ng_reps, js_terms, dual_terms, flip })
    }

    pub fn field(&self) -> &Arc<FieldCtx> {
        &self.field
    }
    pub fn psi(&self) -> &AddChar {
        &self.psi
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn is_odd(&self) -> bool {
        self.odd
    }
    pub fn sigma(&self) -> &Mat {
        &self.sigma
    }
    /// Representatives of `N_m \ GL_m`.
    pub fn ng_reps(&self) -> &[Mat] {
        &self.ng_reps
    }

    /// `[G:N][M:𝓑]`, times `q^m` for odd `n`.
    pub fn index_constant(&self) -> f64 {
        1.0 / self.norm
    }

    /// The pair `(W, φ)` with `js(W, φ) = 1`: `W = C·π(σ^{-1})𝓑` and
    /// `φ = δ_ε` (even) or `δ_0` (odd).
    pub fn canonical_pair(&self) -> Result<(WhittakerFun, CFun)> {
        let f = self.field.as_ref();
        let w = WhittakerFun::scaled_translate(Complex64::new(self.index_constant(), 0.0), self.sigma.inv(f)?);
        let mut point = vec![0; self.m];
        if !self.odd {
            point[self.m - 1] = 1;
        }
        Ok((w, CFun::delta(f, &point)))
    }

    fn check_phi(&self, phi: &CFun) -> Result<()> {
        if phi.dim() != self.m || phi.len() != (self.field.q() as usize).pow(self.m as u32) {
            return Err(GammaError::DimensionMismatch { expected: self.m, got: phi.dim() });
        }
        Ok(())
    }

    fn sum(
        &self,
        terms: &[KernelTerm],
        w: &dyn Fn(&Mat) -> Result<Complex64>,
        phi: &CFun,
        conj_weights: bool,
    ) -> Result<Complex64> {
        let mut s = Complex64::new(0.0, 0.0);
        for t in terms {
            let ph = phi.at(t.slot);
            if ph.norm_sqr() == 0.0 {
                continue;
            }
            let wt = if conj_weights { t.weight.conj() } else { t.weight };
            s += w(&t.point)? * wt * ph;
        }
        Ok(s * self.norm)
    }

    /// `JS(W, φ)` for an arbitrary function `W` on `GL_n`.
    pub fn js_fn(&self, w: &dyn Fn(&Mat) -> Result<Complex64>, phi: &CFun) -> Result<Complex64> {
        self.check_phi(phi)?;
        self.sum(&self.js_terms, w, phi, false)
    }

    /// `JS(W, φ)` with `ψ` replaced by `ψ^{-1}` in the kernel.
    pub fn js_fn_inverse_psi(&self, w: &dyn Fn(&Mat) -> Result<Complex64>, phi: &CFun) -> Result<Complex64> {
        self.check_phi(phi)?;
        self.sum(&self.js_terms, w, phi, true)
    }

    pub fn js(&self, table: &BesselTable, w: &WhittakerFun, phi: &CFun) -> Result<Complex64> {
        self.js_fn(&|g: &Mat| w.eval(table, g), phi)
    }

    /// The transform paired with `W` in the dual sum: `φ̂_ψ` for even `n`,
    /// `φ̂_{ψ^{-1}}` for odd `n`.
    ///
    /// With `φ̂_ψ` the odd dual sum is not equivariant under the `Y` and `Z`
    /// generators of the Shalika subgroup, and the functional equation fails
    /// (see [`JsContext::dual_js_printed`]). `φ̂_{ψ^{-1}}(Z) = φ̂_ψ(−Z)` restores both.
    pub fn dual_transform(&self, phi: &CFun) -> CFun {
        if self.odd {
            fourier(phi, &self.psi.inverted())
        } else {
            fourier(phi, &self.psi)
        }
    }

    /// The dual sum by its direct formula: `φ̂(e_1 ᵗg^{-1})` (even) or the
    /// `antidiag(1, I_{2m})`-shifted kernel against the transform at `Z` (odd).
    pub fn dual_js_fn(&self, w: &dyn Fn(&Mat) -> Result<Complex64>, phi: &CFun) -> Result<Complex64> {
        self.check_phi(phi)?;
        self.sum(&self.dual_terms, w, &self.dual_transform(phi), false)
    }

    /// The direct dual formula with `φ̂_ψ` for both parities. Agrees with
    /// [`JsContext::dual_js`] for even `n` and in characteristic 2.
    pub fn dual_js_printed(&self, table: &BesselTable, w: &WhittakerFun, phi: &CFun) -> Result<Complex64> {
        self.check_phi(phi)?;
        self.sum(&self.dual_terms, &|g: &Mat| w.eval(table, g), &fourier(phi, &self.psi), false)
    }

    pub fn dual_js(&self, table: &BesselTable, w: &WhittakerFun, phi: &CFun) -> Result<Complex64> {
        self.dual_js_fn(&|g: &Mat| w.eval(table, g), phi)
    }

    /// The dual sum from its definition `JS_{π̃,ψ^{-1}}(π̃(J)W̃, φ̂)` with
    /// `W̃(g) = W(w_n ᵗg^{-1})` and `φ̂` from [`JsContext::dual_transform`].
    pub fn dual_js_by_definition_fn(
        &self,
        w: &dyn Fn(&Mat) -> Result<Complex64>,
        phi: &CFun,
    ) -> Result<Complex64> {
        let f = self.field.as_ref();
        self.check_phi(phi)?;
        let hat = self.dual_transform(phi);
        let wn = long_weyl(self.n);
        let flipped = |g: &Mat| -> Result<Complex64> {
            let arg = wn.mul(f, &g.mul(f, &self.flip).inv(f)?.transpose());
            w(&arg)
        };
        self.sum(&self.js_terms, &flipped, &hat, true)
    }

    pub fn dual_js_by_definition(&self, table: &BesselTable, w: &WhittakerFun, phi: &CFun) -> Result<Complex64> {
        self.dual_js_by_definition_fn(&|g: &Mat| w.eval(table, g), phi)
    }

    /// `J`: `antidiag(I_m, I_m)`, extended by `1` for odd `n`.
    pub fn flip(&self) -> &Mat {
        &self.flip
    }

    /// `(js, dual_js)` of `W` against each `φ` in one pass over the kernel.
    pub fn pair_values(&self, table: &BesselTable, w: &WhittakerFun, phis: &[CFun]) -> Result<Vec<(Complex64, Complex64)>> {
        let js_vals: Vec<Complex64> = self
            .js_terms
            .iter()
            .map(|t| w.eval(table, &t.point).map(|v| v * t.weight))
            .collect::<Result<_>>()?;
        let dual_vals: Vec<Complex64> = self
            .dual_terms
            .iter()
            .map(|t| w.eval(table, &t.point).map(|v| v * t.weight))
            .collect::<Result<_>>()?;
        phis.iter()
            .map(|phi| {
                self.check_phi(phi)?;
                let hat = self.dual_transform(phi);
                let a: Complex64 = self.js_terms.iter().zip(&js_vals).map(|(t, v)| v * phi.at(t.slot)).sum();
                let b: Complex64 = self.dual_terms.iter().zip(&dual_vals).map(|(t, v)| v * hat.at(t.slot)).sum();
                Ok((a * self.norm, b * self.norm))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cuspchar::CuspidalRep;
    use crate::ffield::build_field;

    #[test]
    fn canonical_pair_gives_one() {
        for &(p, n, k) in &[(3u32, 2u32, 1i64), (2, 3, 1), (2, 4, 1), (2, 5, 1)] {
            let f = build_field(p, 1, n).unwrap();
            let psi = AddChar::standard(&f);
            let rep = CuspidalRep::new(&f, n, k).unwrap();
            let table = BesselTable::build(&rep, &psi);
            let ctx = JsContext::new(&psi, n as usize).unwrap();
            let (w, phi) = ctx.canonical_pair().unwrap();
            let v = ctx.js(&table, &w, &phi).unwrap();
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-9, "({p},{n}): {v}");
        }
    }

    #[test]
    fn shalika_element_round_trip() {
        let f = build_field(3, 1, 3).unwrap();
        let g = Mat::from_rows(&[vec![1]]).unwrap();
        let x = Mat::from_rows(&[vec![2]]).unwrap();
        let s = ShalikaElement::odd(g, x, vec![1], vec![2]);
        let mat = s.to_matrix(&f).unwrap();
        assert_eq!(ShalikaElement::from_matrix(&f, &mat).unwrap(), s);
        let mut bad = mat.clone();
        bad.set(1, 0, 1);
        assert!(matches!(ShalikaElement::from_matrix(&f, &bad), Err(GammaError::MalformedShalikaElement(_))));
    }

    #[test]
    fn action_examples() {
        let f = build_field(3, 1, 4).unwrap();
        let psi = AddChar::standard(&f);
        let phi = CFun::from_fn(&f, 2, |x| Complex64::new(f.fq_slot(x[0]) as f64, f.fq_slot(x[1]) as f64));
        let id = ShalikaElement::odd(Mat::identity(2), Mat::zeros(2), vec![0, 0], vec![0, 0]);
        assert_eq!(shalika_action(&id, &phi, &psi).unwrap(), phi);
        let shift = ShalikaElement::odd(Mat::identity(2), Mat::zeros(2), vec![0, 0], vec![1, 0]);
        let out = shalika_action(&shift, &phi, &psi).unwrap();
        for i in 0..9 {
            let x = crate::charkit::vector_at(&f, 2, i);
            let x1 = vec![f.add(x[0], 1), x[1]];
            assert_eq!(out.eval(&f, &x), phi.eval(&f, &x1));
        }
        let g = Mat::from_rows(&[vec![0, 1], vec![1, 0]]).unwrap();
        let even = ShalikaElement::even(g, Mat::from_rows(&[vec![1, 2], vec![0, 1]]).unwrap());
        let out = shalika_action(&even, &phi, &psi).unwrap();
        for i in 0..9 {
            let x = crate::charkit::vector_at(&f, 2, i);
            assert_eq!(out.eval(&f, &x), phi.eval(&f, &[x[1], x[0]]));
        }
    }
}
