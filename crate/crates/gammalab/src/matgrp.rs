//! Square matrices over `F_q`, Bruhat decomposition, coset systems, the
//! shuffles `σ_n`, antidiagonal block elements and conjugacy-class typing.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use rand::Rng;

use crate::error::{GammaError, Result};
use crate::ffield::{divisors, FElem, FieldCtx};

/// An `n×n` matrix with entries in `F_q`, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat {
    n: usize,
    a: Vec<FElem>,
}

impl Mat {
    pub fn zeros(n: usize) -> Self {
        Mat { n, a: vec![0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<FElem>]) -> Result<Self> {
        let n = rows.len();
        let mut a = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(GammaError::DimensionMismatch { expected: n, got: r.len() });
            }
            a.extend_from_slice(r);
        }
        Ok(Mat { n, a })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> FElem) -> Self {
        let mut a = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                a.push(f(i, j));
            }
        }
        Mat { n, a }
    }

    /// Diagonal matrix.
    pub fn diag(d: &[FElem]) -> Self {
        let n = d.len();
        Mat::from_fn(n, |i, j| if i == j { d[i] } else { 0 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[FElem] {
        &self.a
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> FElem {
        self.a[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: FElem) {
        self.a[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<FElem> {
        self.a[i * self.n..(i + 1) * self.n].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<FElem> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    pub fn rows(&self) -> Vec<Vec<FElem>> {
        (0..self.n).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.n, |i, j| self.get(j, i))
    }

    pub fn mul(&self, f: &FieldCtx, o: &Mat) -> Mat {
        let n = self.n;
        debug_assert_eq!(n, o.n);
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let x = self.a[i * n + k];
                if x == 0 {
                    continue;
                }
                for j in 0..n {
                    let y = o.a[k * n + j];
                    if y != 0 {
                        let cur = out.a[i * n + j];
                        out.a[i * n + j] = f.add(cur, f.mul(x, y));
                    }
                }
            }
        }
        out
    }

    /// Product of a list of matrices, left to right.
    pub fn product(f: &FieldCtx, ms: &[&Mat]) -> Mat {
        let mut it = ms.iter();
        let first = (*it.next().expect("nonempty product")).clone();
        it.fold(first, |acc, m| acc.mul(f, m))
    }

    pub fn add(&self, f: &FieldCtx, o: &Mat) -> Mat {
        Mat { n: self.n, a: self.a.iter().zip(&o.a).map(|(&x, &y)| f.add(x, y)).collect() }
    }

    pub fn scale(&self, f: &FieldCtx, c: FElem) -> Mat {
        Mat { n: self.n, a: self.a.iter().map(|&x| f.mul(c, x)).collect() }
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, f: &FieldCtx, v: &[FElem]) -> Vec<FElem> {
        (0..self.n)
            .map(|j| (0..self.n).fold(0, |acc, i| f.add(acc, f.mul(v[i], self.get(i, j)))))
            .collect()
    }

    pub fn trace(&self, f: &FieldCtx) -> FElem {
        (0..self.n).fold(0, |acc, i| f.add(acc, self.get(i, i)))
    }

    /// Sum of the superdiagonal entries `u_{i,i+1}`.
    pub fn superdiag_sum(&self, f: &FieldCtx) -> FElem {
        (0..self.n.saturating_sub(1)).fold(0, |acc, i| f.add(acc, self.get(i, i + 1)))
    }

    pub fn is_upper_unipotent(&self) -> bool {
        (0..self.n).all(|i| {
            (0..self.n).all(|j| match i.cmp(&j) {
                std::cmp::Ordering::Equal => self.get(i, j) == 1,
                std::cmp::Ordering::Greater => self.get(i, j) == 0,
                std::cmp::Ordering::Less => true,
            })
        })
    }

    pub fn entries_in_base_field(&self, f: &FieldCtx) -> bool {
        self.a.iter().all(|&x| f.in_subfield(x, 1))
    }

    /// Row echelon reduction; returns the rank and the determinant.
    fn eliminate(&self, f: &FieldCtx) -> (usize, FElem) {
        let n = self.n;
        let mut m = self.a.clone();
        let mut rank = 0;
        let mut det = 1;
        for col in 0..n {
            let Some(piv) = (rank..n).find(|&r| m[r * n + col] != 0) else {
                det = 0;
                continue;
            };
            if piv != rank {
                for j in 0..n {
                    m.swap(piv * n + j, rank * n + j);
                }
                det = f.neg(det);
            }
            let pv = m[rank * n + col];
            det = f.mul(det, pv);
            let pinv = f.inv(pv).expect("nonzero pivot");
            for r in rank + 1..n {
                let x = m[r * n + col];
                if x == 0 {
                    continue;
                }
                let c = f.mul(x, pinv);
                for j in col..n {
                    let v = f.sub(m[r * n + j], f.mul(c, m[rank * n + j]));
                    m[r * n + j] = v;
                }
            }
            rank += 1;
        }
        (rank, if rank == n { det } else { 0 })
    }

    pub fn rank(&self, f: &FieldCtx) -> usize {
        self.eliminate(f).0
    }

    pub fn det(&self, f: &FieldCtx) -> FElem {
        self.eliminate(f).1
    }

    pub fn is_invertible(&self, f: &FieldCtx) -> bool {
        self.rank(f) == self.n
    }

    /// Gauss–Jordan inverse.
    pub fn inv(&self, f: &FieldCtx) -> Result<Mat> {
        let n = self.n;
        let w = 2 * n;
        let mut m = vec![0; n * w];
        for i in 0..n {
            for j in 0..n {
                m[i * w + j] = self.get(i, j);
            }
            m[i * w + n + i] = 1;
        }
        for col in 0..n {
            let piv = (col..n).find(|&r| m[r * w + col] != 0).ok_or(GammaError::Singular)?;
            if piv != col {
                for j in 0..w {
                    m.swap(piv * w + j, col * w + j);
                }
            }
            let pinv = f.inv(m[col * w + col])?;
            for j in 0..w {
                m[col * w + j] = f.mul(m[col * w + j], pinv);
            }
            for r in 0..n {
                if r == col || m[r * w + col] == 0 {
                    continue;
                }
                let c = m[r * w + col];
                for j in 0..w {
                    let v = f.sub(m[r * w + j], f.mul(c, m[col * w + j]));
                    m[r * w + j] = v;
                }
            }
        }
        Ok(Mat::from_fn(n, |i, j| m[i * w + n + j]))
    }

    /// Characteristic polynomial `c_0, …, c_{n-1}` (monic, leading term
    /// omitted) via reduction to upper Hessenberg form.
    pub fn charpoly(&self, f: &FieldCtx) -> Vec<FElem> {
        let n = self.n;
        let mut h = self.a.clone();
        for j in 0..n.saturating_sub(2) {
            let Some(i) = (j + 1..n).find(|&i| h[i * n + j] != 0) else {
                continue;
            };
            if i != j + 1 {
                for c in 0..n {
                    h.swap(i * n + c, (j + 1) * n + c);
                }
                for r in 0..n {
                    h.swap(r * n + i, r * n + j + 1);
                }
            }
            let pinv = f.inv(h[(j + 1) * n + j]).expect("nonzero pivot");
            for r in j + 2..n {
                let u = f.mul(h[r * n + j], pinv);
                if u == 0 {
                    continue;
                }
                for c in 0..n {
                    let v = f.sub(h[r * n + c], f.mul(u, h[(j + 1) * n + c]));
                    h[r * n + c] = v;
                }
                for rr in 0..n {
                    let v = f.add(h[rr * n + j + 1], f.mul(u, h[rr * n + r]));
                    h[rr * n + j + 1] = v;
                }
            }
        }
        let hh = |i: usize, j: usize| h[(i - 1) * n + (j - 1)];
        let mut polys: Vec<Vec<FElem>> = vec![vec![1]];
        for m in 1..=n {
            let prev = &polys[m - 1];
            let mut pm = vec![0; m + 1];
            let neg_h = f.neg(hh(m, m));
            for (i, &c) in prev.iter().enumerate() {
                pm[i + 1] = f.add(pm[i + 1], c);
                pm[i] = f.add(pm[i], f.mul(neg_h, c));
            }
            let mut prod = 1;
            for i in 1..m {
                prod = f.mul(prod, hh(m - i + 1, m - i));
                let coef = f.mul(hh(m - i, m), prod);
                if coef == 0 {
                    continue;
                }
                for (t, &c) in polys[m - i - 1].iter().enumerate() {
                    pm[t] = f.sub(pm[t], f.mul(coef, c));
                }
            }
            polys.push(pm);
        }
        let mut out = polys.pop().expect("n+1 polynomials");
        out.pop();
        out
    }

    /// Evaluates the polynomial `Σ c_i X^i` (coefficients low to high) at
    /// this matrix.
    pub fn eval_poly(&self, f: &FieldCtx, coeffs: &[FElem]) -> Mat {
        let mut acc = Mat::zeros(self.n);
        for &c in coeffs.iter().rev() {
            acc = acc.mul(f, self);
            for i in 0..self.n {
                let v = f.add(acc.get(i, i), c);
                acc.set(i, i, v);
            }
        }
        acc
    }
}

/// Block matrix from a square grid of blocks with compatible sizes.
pub fn from_blocks(blocks: &[Vec<Mat>]) -> Mat {
    let sizes: Vec<usize> = blocks.iter().map(|row| row[0].n()).collect();
    let n: usize = sizes.iter().sum();
    let mut out = Mat::zeros(n);
    let mut r0 = 0;
    for (bi, row) in blocks.iter().enumerate() {
        let mut c0 = 0;
        for (bj, b) in row.iter().enumerate() {
            debug_assert!(b.n() == sizes[bi] || b.n() == sizes[bj]);
            for i in 0..sizes[bi] {
                for j in 0..sizes[bj] {
                    if i < b.n() && j < b.n() {
                        out.set(r0 + i, c0 + j, b.get(i, j));
                    }
                }
            }
            c0 += sizes[bj];
        }
        r0 += sizes[bi];
    }
    out
}

/// `antidiag(g_1, …, g_r)`: `g_1` in the top-right corner, `g_r` in the
/// bottom-left.
pub fn antidiag_blocks(blocks: &[Mat]) -> Mat {
    let n: usize = blocks.iter().map(Mat::n).sum();
    let mut out = Mat::zeros(n);
    let mut r0 = 0;
    let mut c_end = n;
    for b in blocks {
        let s = b.n();
        let c0 = c_end - s;
        for i in 0..s {
            for j in 0..s {
                out.set(r0 + i, c0 + j, b.get(i, j));
            }
        }
        r0 += s;
        c_end = c0;
    }
    out
}

/// `diag(g_1, …, g_r)`.
pub fn block_diag(blocks: &[&Mat]) -> Mat {
    let n: usize = blocks.iter().map(|b| b.n()).sum();
    let mut out = Mat::zeros(n);
    let mut o = 0;
    for b in blocks {
        for i in 0..b.n() {
            for j in 0..b.n() {
                out.set(o + i, o + j, b.get(i, j));
            }
        }
        o += b.n();
    }
    out
}

/// `antidiag(λ_1 I_{t·m_1}, …, λ_r I_{t·m_r} [, I_1])`.
pub fn antidiag_elem(weights: &[usize], scalars: &[FElem], t: usize, tail_one: bool) -> Result<Mat> {
    if weights.len() != scalars.len() {
        return Err(GammaError::DimensionMismatch { expected: weights.len(), got: scalars.len() });
    }
    if scalars.iter().any(|&s| s == 0) {
        return Err(GammaError::ZeroScalar);
    }
    let mut blocks: Vec<Mat> = weights
        .iter()
        .zip(scalars)
        .map(|(&m, &l)| Mat::diag(&vec![l; t * m]))
        .collect();
    if tail_one {
        blocks.push(Mat::identity(1));
    }
    Ok(antidiag_blocks(&blocks))
}

/// The long Weyl element `w_n` (ones on the antidiagonal).
pub fn long_weyl(n: usize) -> Mat {
    Mat::from_fn(n, |i, j| u32::from(i + j == n - 1))
}

/// Column permutation matrix of the shuffle `σ_n`: columns `1, …, m` go to
/// `1, 3, …, 2m−1`, columns `m+1, …, 2m` to `2, 4, …, 2m`; `2m+1` is fixed
/// when `n` is odd.
pub fn sigma_perm(n: usize) -> Mat {
    let m = n / 2;
    let target = |j: usize| {
        if j < m {
            2 * j
        } else if j < 2 * m {
            2 * (j - m) + 1
        } else {
            j
        }
    };
    Mat::from_fn(n, |i, j| u32::from(i == target(j)))
}

/// `[[I, X], [0, I]]`, with an extra trailing `1` when `odd`.
pub fn shalika_unipotent(x: &Mat, odd: bool) -> Mat {
    let m = x.n();
    let n = 2 * m + usize::from(odd);
    let mut out = Mat::identity(n);
    for i in 0..m {
        for j in 0..m {
            out.set(i, m + j, x.get(i, j));
        }
    }
    out
}

/// `diag(g, g)`, with an extra trailing `1` when `odd`.
pub fn shalika_diag(g: &Mat, odd: bool) -> Mat {
    let m = g.n();
    let n = 2 * m + usize::from(odd);
    let mut out = Mat::identity(n);
    for i in 0..m {
        for j in 0..m {
            out.set(i, j, g.get(i, j));
            out.set(m + i, m + j, g.get(i, j));
        }
    }
    out
}

/// `[[I, 0, 0], [0, I, 0], [0, z, 1]]` for a row `z` of length `m`.
pub fn odd_lower(z: &[FElem]) -> Mat {
    let m = z.len();
    let mut out = Mat::identity(2 * m + 1);
    for (j, &v) in z.iter().enumerate() {
        out.set(2 * m, m + j, v);
    }
    out
}

/// `[[I, 0, y], [0, I, 0], [0, 0, 1]]` for a column `y` of length `m`.
pub fn odd_upper_right(y: &[FElem]) -> Mat {
    let m = y.len();
    let mut out = Mat::identity(2 * m + 1);
    for (i, &v) in y.iter().enumerate() {
        out.set(i, 2 * m, v);
    }
    out
}

/// `u_1 · w · d · u_2` with `u_i` upper unipotent, `w` a permutation matrix
/// and `d` diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BruhatDecomp {
    pub u1: Mat,
    pub w: Mat,
    pub d: Mat,
    pub u2: Mat,
}

impl BruhatDecomp {
    /// The monomial middle factor `w·d`.
    pub fn wd(&self, f: &FieldCtx) -> Mat {
        self.w.mul(f, &self.d)
    }
}

/// Bruhat decomposition by column-wise elimination from the bottom-most
/// nonzero entry.
pub fn bruhat(f: &FieldCtx, g: &Mat) -> Result<BruhatDecomp> {
    let n = g.n();
    let mut a = g.clone();
    let mut u1 = Mat::identity(n);
    let mut u2 = Mat::identity(n);
    let mut pivot_row = vec![usize::MAX; n];
    for j in 0..n {
        let i = (0..n).rev().find(|&i| a.get(i, j) != 0).ok_or(GammaError::Singular)?;
        if pivot_row.contains(&i) {
            return Err(GammaError::Singular);
        }
        pivot_row[j] = i;
        let pinv = f.inv(a.get(i, j))?;
        for k in j + 1..n {
            let c = f.mul(a.get(i, k), pinv);
            if c == 0 {
                continue;
            }
            for r in 0..n {
                let v = f.sub(a.get(r, k), f.mul(c, a.get(r, j)));
                a.set(r, k, v);
            }
            for cc in 0..n {
                let v = f.add(u2.get(j, cc), f.mul(c, u2.get(k, cc)));
                u2.set(j, cc, v);
            }
        }
        for r in 0..i {
            let c = f.mul(a.get(r, j), pinv);
            if c == 0 {
                continue;
            }
            for cc in 0..n {
                let v = f.sub(a.get(r, cc), f.mul(c, a.get(i, cc)));
                a.set(r, cc, v);
            }
            for rr in 0..n {
                let v = f.add(u1.get(rr, i), f.mul(c, u1.get(rr, r)));
                u1.set(rr, i, v);
            }
        }
    }
    let w = Mat::from_fn(n, |i, j| u32::from(pivot_row[j] == i));
    let d = Mat::from_fn(n, |i, j| if i == j { a.get(pivot_row[j], j) } else { 0 });
    Ok(BruhatDecomp { u1, w, d, u2 })
}

/// Parses a monomial matrix as `antidiag(λ_1 I_{n_1}, …, λ_r I_{n_r})`.
pub fn parse_antidiag_scalar(m: &Mat) -> Option<(Vec<usize>, Vec<FElem>)> {
    let n = m.n();
    let mut r0 = 0;
    let mut c_end = n;
    let mut weights = Vec::new();
    let mut scalars = Vec::new();
    while r0 < n {
        let c = (0..c_end).find(|&c| m.get(r0, c) != 0)?;
        let s = c_end - c;
        if r0 + s > n {
            return None;
        }
        let lambda = m.get(r0, c);
        for i in 0..s {
            if m.get(r0 + i, c + i) != lambda {
                return None;
            }
        }
        weights.push(s);
        scalars.push(lambda);
        r0 += s;
        c_end = c;
    }
    (c_end == 0).then_some((weights, scalars))
}

/// All ordered compositions of `n`.
pub fn compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for mut rest in compositions(n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Every tuple in `(F_q^×)^r`, in lexicographic order of the unit list.
pub fn unit_tuples(f: &FieldCtx, r: usize) -> Vec<Vec<FElem>> {
    let units = f.subfield_units(1);
    let mut out: Vec<Vec<FElem>> = vec![vec![]];
    for _ in 0..r {
        out = out
            .into_iter()
            .flat_map(|t| {
                units.iter().map(move |&u| {
                    let mut t2 = t.clone();
                    t2.push(u);
                    t2
                })
            })
            .collect();
    }
    out
}

/// `|GL_n(F_q)|`.
pub fn gl_order(q: u64, n: u32) -> u128 {
    let qn = (q as u128).pow(n);
    (0..n).map(|i| qn - (q as u128).pow(i)).product()
}

/// All matrices in `GL_n(F_q)` (row-by-row generation).
pub fn gl_elements(f: &FieldCtx, n: usize) -> Vec<Mat> {
    let q = f.q() as usize;
    let vectors: Vec<Vec<FElem>> =
        (0..q.pow(n as u32)).map(|i| crate::charkit::vector_at(f, n, i)).collect();
    let mut partial: Vec<Vec<Vec<FElem>>> = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for rows in &partial {
            for v in &vectors {
                let mut cand = rows.clone();
                cand.push(v.clone());
                if rank_of_rows(f, &cand, n) == cand.len() {
                    next.push(cand);
                }
            }
        }
        partial = next;
    }
    partial.into_iter().map(|rows| Mat::from_rows(&rows).expect("square")).collect()
}

fn rank_of_rows(f: &FieldCtx, rows: &[Vec<FElem>], n: usize) -> usize {
    let mut padded = rows.to_vec();
    while padded.len() < n {
        padded.push(vec![0; n]);
    }
    Mat::from_rows(&padded).expect("square").rank(f)
}

/// Upper unipotent group `N_n`, enumerated over the superdiagonal-first
/// entry order.
pub fn upper_unipotents(f: &FieldCtx, n: usize) -> Vec<Mat> {
    let positions: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    fill_positions(f, n, &positions)
}

/// Strictly lower-triangular matrices `𝒩⁻_m`.
pub fn lower_nilpotents(f: &FieldCtx, m: usize) -> Vec<Mat> {
    let positions: Vec<(usize, usize)> =
        (0..m).flat_map(|i| (0..i).map(move |j| (i, j))).collect();
    let mut out = fill_positions(f, m, &positions);
    for x in &mut out {
        for i in 0..m {
            x.set(i, i, 0);
        }
    }
    out
}

fn fill_positions(f: &FieldCtx, n: usize, positions: &[(usize, usize)]) -> Vec<Mat> {
    let els = f.subfield_elements(1);
    let mut out = vec![Mat::identity(n)];
    for &(i, j) in positions {
        out = out
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
    out
}

/// Canonical representative of the coset `N·g`: rows are reduced from the
/// bottom up, clearing each lower row's leading column.
pub fn canonical_ng(f: &FieldCtx, g: &Mat) -> Mat {
    let n = g.n();
    let mut a = g.clone();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    for i in (0..n).rev() {
        for &(row, col) in &pivots {
            let c = f.div(a.get(i, col), a.get(row, col)).expect("pivot nonzero");
            if c != 0 {
                for j in 0..n {
                    let v = f.sub(a.get(i, j), f.mul(c, a.get(row, j)));
                    a.set(i, j, v);
                }
            }
        }
        if let Some(col) = (0..n).find(|&c| a.get(i, c) != 0) {
            pivots.insert(0, (i, col));
        }
    }
    a
}

/// Kinds of coset systems used by the Jacquet–Shalika sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CosetKind {
    /// `N_m \ GL_m`.
    UnipotentBackslashGl,
    /// `𝓑 \ M_m`, represented by `𝒩⁻_m`.
    UpperBackslashMat,
}

/// Coset representatives of the requested kind.
pub fn coset_reps(f: &FieldCtx, m: usize, kind: CosetKind) -> Vec<Mat> {
    match kind {
        CosetKind::UnipotentBackslashGl => {
            let set: BTreeSet<Mat> = gl_elements(f, m).iter().map(|g| canonical_ng(f, g)).collect();
            set.into_iter().collect()
        }
        CosetKind::UpperBackslashMat => lower_nilpotents(f, m),
    }
}

/// Uniform random element of `GL_n(F_q)` by rejection.
pub fn random_gl<R: Rng>(f: &FieldCtx, n: usize, rng: &mut R) -> Mat {
    loop {
        let m = random_matrix(f, n, rng);
        if m.is_invertible(f) {
            return m;
        }
    }
}

pub fn random_matrix<R: Rng>(f: &FieldCtx, n: usize, rng: &mut R) -> Mat {
    let q = f.q() as usize;
    Mat::from_fn(n, |_, _| f.fq_from_slot(rng.gen_range(0..q)))
}

pub fn random_unipotent<R: Rng>(f: &FieldCtx, n: usize, rng: &mut R) -> Mat {
    let q = f.q() as usize;
    Mat::from_fn(n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => 1,
        std::cmp::Ordering::Less => f.fq_from_slot(rng.gen_range(0..q)),
        std::cmp::Ordering::Greater => 0,
    })
}

pub fn random_vector<R: Rng>(f: &FieldCtx, m: usize, rng: &mut R) -> Vec<FElem> {
    let q = f.q() as usize;
    (0..m).map(|_| f.fq_from_slot(rng.gen_range(0..q))).collect()
}

/// Conjugacy-class data relevant to cuspidal characters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassType {
    /// Characteristic polynomial is `f^c` with `f` irreducible.
    pub primary: bool,
    pub d: u32,
    pub c: u32,
    /// Root of `f` with least discrete log.
    pub alpha: FElem,
    /// `dim ker f(g) / d`.
    pub k: u32,
}

impl ClassType {
    fn non_primary() -> Self {
        ClassType { primary: false, d: 0, c: 0, alpha: 0, k: 0 }
    }
}

/// Precomputed table of primary characteristic polynomials for `n×n`
/// matrices, keyed by coefficient code.
#[derive(Debug, Clone)]
pub struct ClassTyper {
    field: Arc<FieldCtx>,
    n: usize,
    primary: HashMap<u64, (u32, FElem, Vec<FElem>)>,
}

impl ClassTyper {
    /// Requires `n` to divide the ambient degree so that every irreducible
    /// factor of degree dividing `n` splits in the ambient field.
    pub fn new(field: &Arc<FieldCtx>, n: usize) -> Result<Self> {
        if n == 0 || field.n() as usize % n != 0 {
            return Err(GammaError::BadParameters(format!(
                "matrix size {n} must divide the ambient degree {}",
                field.n()
            )));
        }
        let f = field.as_ref();
        let mut primary = HashMap::new();
        for j in 0..f.order() {
            let alpha = f.exp_of(j as i64);
            let d = f.degree_of(alpha);
            if n % d as usize != 0 {
                continue;
            }
            let minpoly = minimal_polynomial(f, alpha, d);
            let mut pw = vec![1];
            for _ in 0..n / d as usize {
                pw = poly_mul(f, &pw, &minpoly);
            }
            pw.pop();
            let code = poly_code(f, &pw);
            primary.entry(code).or_insert_with(|| {
                let mut fm = minpoly.clone();
                fm.pop();
                (d, alpha, fm)
            });
        }
        Ok(ClassTyper { field: field.clone(), n, primary })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn classify(&self, g: &Mat) -> Result<ClassType> {
        let f = self.field.as_ref();
        if g.n() != self.n {
            return Err(GammaError::DimensionMismatch { expected: self.n, got: g.n() });
        }
        let cp = g.charpoly(f);
        if cp[0] == 0 {
            return Err(GammaError::Singular);
        }
        let Some((d, alpha, fm)) = self.primary.get(&poly_code(f, &cp)) else {
            return Ok(ClassType::non_primary());
        };
        let mut full = fm.clone();
        full.push(1);
        let rank = g.eval_poly(f, &full).rank(f);
        Ok(ClassType {
            primary: true,
            d: *d,
            c: self.n as u32 / d,
            alpha: *alpha,
            k: ((self.n - rank) as u32) / d,
        })
    }
}

/// One-off class typing; builds a [`ClassTyper`] for the matrix size.
pub fn class_type(field: &Arc<FieldCtx>, g: &Mat) -> Result<ClassType> {
    ClassTyper::new(field, g.n())?.classify(g)
}

/// `∏_{i<d} (X − α^{q^i})`, coefficients low to high including the leading 1.
pub fn minimal_polynomial(f: &FieldCtx, alpha: FElem, d: u32) -> Vec<FElem> {
    let mut p = vec![1];
    for i in 0..d {
        let r = f.neg(f.frobenius_pow(alpha, i));
        p = poly_mul(f, &p, &[r, 1]);
    }
    p
}

fn poly_mul(f: &FieldCtx, a: &[FElem], b: &[FElem]) -> Vec<FElem> {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    out
}

fn poly_code(f: &FieldCtx, coeffs: &[FElem]) -> u64 {
    let q = f.q();
    coeffs.iter().rev().fold(0, |acc, &c| acc * q + f.fq_slot(c) as u64)
}

/// Sizes of the divisor lattice, re-exported for class enumeration.
pub fn degree_divisors(n: u32) -> Vec<u32> {
    divisors(n)
}
