use gammalab::bessel::BesselTable;
use gammalab::charkit::{regular_orbit_representatives, restriction_is_trivial, vector_at, AddChar, CFun};
use gammalab::cuspchar::CuspidalRep;
use gammalab::exjs::{
    gamma_closed_gl4_printed, gamma_ratio, gamma_torus, shalika_action, FeOptions, JsContext, ShalikaElement,
    WhittakerFun,
};
use gammalab::ffield::{build_field, FieldCtx};
use gammalab::matgrp::{long_weyl, random_gl, random_matrix, random_vector, Mat};
use gammalab::GammaError;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tables(p: u32, n: u32) -> Vec<BesselTable> {
    let f = build_field(p, 1, n).unwrap();
    let psi = AddChar::standard(&f);
    regular_orbit_representatives(p as u64, n)
        .into_iter()
        .map(|k| CuspidalRep::new(&f, n, k as i64).unwrap())
        .filter(|r| n % 2 == 1 || !restriction_is_trivial(r.theta(), n / 2))
        .map(|r| BesselTable::build(&r, &psi))
        .collect()
}

fn random_delta(f: &FieldCtx, m: usize, rng: &mut ChaCha8Rng) -> CFun {
    CFun::delta(f, &random_vector(f, m, rng))
}

fn random_phi(f: &FieldCtx, m: usize, rng: &mut ChaCha8Rng) -> CFun {
    CFun::from_fn(f, m, |_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn random_shalika(f: &FieldCtx, n: usize, rng: &mut ChaCha8Rng) -> ShalikaElement {
    let m = n / 2;
    let g = random_gl(f, m, rng);
    let x = random_matrix(f, m, rng);
    if n % 2 == 0 {
        ShalikaElement::even(g, x)
    } else {
        ShalikaElement::odd(g, x, random_vector(f, m, rng), random_vector(f, m, rng))
    }
}

#[test]
fn exhaustive_constancy_for_gl2() {
    for p in [2u32, 3] {
        for table in tables(p, 2) {
            let r = gamma_ratio(&table, &FeOptions::default()).unwrap();
            let f = table.rep().field();
            let q = f.q() as usize;
            assert_eq!(r.pairs_checked, gammalab::matgrp::gl_order(q as u64, 2) as usize * q);
            assert!(r.residual < 1e-8);
        }
    }
}

#[test]
fn sampled_constancy_with_mixed_test_functions() {
    for &(p, n) in &[(3u32, 3u32), (2, 4), (2, 5)] {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for table in tables(p, n).into_iter().take(3) {
            let f = table.rep().field().clone();
            let ctx = JsContext::new(table.psi(), n as usize).unwrap();
            let gamma = gamma_torus(&table).unwrap().value;
            for _ in 0..20 {
                let w = WhittakerFun::from_terms(vec![
                    (Complex64::new(1.0, 0.5), random_gl(&f, n as usize, &mut rng)),
                    (Complex64::new(-0.3, 2.0), random_gl(&f, n as usize, &mut rng)),
                ]);
                let phi = random_phi(&f, ctx.m(), &mut rng);
                let a = ctx.js(&table, &w, &phi).unwrap();
                let b = ctx.dual_js(&table, &w, &phi).unwrap();
                assert!((b - gamma * a).norm() < 1e-8, "({p},{n}): {b} vs {}", gamma * a);
            }
        }
    }
}

#[test]
fn shalika_equivariance() {
    for &(p, n) in &[(3u32, 2u32), (2, 3), (3, 3), (2, 4), (2, 5)] {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let table = tables(p, n).remove(0);
        let f = table.rep().field().clone();
        let psi = table.psi().clone();
        let ctx = JsContext::new(&psi, n as usize).unwrap();
        for _ in 0..30 {
            let s = random_shalika(&f, n as usize, &mut rng);
            let w = WhittakerFun::translate(random_gl(&f, n as usize, &mut rng));
            let phi = random_phi(&f, ctx.m(), &mut rng);
            let ws = w.right_translate(&f, &s.to_matrix(&f).unwrap());
            let phis = shalika_action(&s, &phi, &psi).unwrap();
            let factor = if n % 2 == 0 { s.character(&f, &psi).unwrap() } else { Complex64::new(1.0, 0.0) };
            let lhs = ctx.js(&table, &ws, &phis).unwrap();
            let rhs = factor * ctx.js(&table, &w, &phi).unwrap();
            assert!((lhs - rhs).norm() < 1e-8, "js ({p},{n}): {lhs} vs {rhs}");
            let lhs = ctx.dual_js(&table, &ws, &phis).unwrap();
            let rhs = factor * ctx.dual_js(&table, &w, &phi).unwrap();
            assert!((lhs - rhs).norm() < 1e-8, "dual ({p},{n}): {lhs} vs {rhs}");
        }
    }
}

#[test]
fn dual_formula_matches_definition_and_double_duality() {
    for &(p, n) in &[(3u32, 2u32), (2, 3), (3, 3), (2, 4)] {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let table = tables(p, n).remove(0);
        let f = table.rep().field().clone();
        let psi = table.psi().clone();
        let ctx = JsContext::new(&psi, n as usize).unwrap();
        let ctx_inv = JsContext::new(&psi.inverted(), n as usize).unwrap();
        let wn = long_weyl(n as usize);
        let flip = ctx.flip().clone();
        for _ in 0..10 {
            let w = WhittakerFun::translate(random_gl(&f, n as usize, &mut rng));
            let phi = random_phi(&f, ctx.m(), &mut rng);
            let direct = ctx.dual_js(&table, &w, &phi).unwrap();
            let by_def = ctx.dual_js_by_definition(&table, &w, &phi).unwrap();
            assert!((direct - by_def).norm() < 1e-8, "({p},{n}): {direct} vs {by_def}");

            let w_eval = |g: &Mat| w.eval(&table, g);
            let w1 = |g: &Mat| -> gammalab::Result<Complex64> {
                w_eval(&wn.mul(&f, &g.mul(&f, &flip).inv(&f)?.transpose()))
            };
            let phi1 = ctx.dual_transform(&phi);
            let once = ctx_inv.js_fn(&w1, &phi1).unwrap();
            assert!((once - direct).norm() < 1e-8);
            let twice = ctx_inv.dual_js_by_definition_fn(&w1, &phi1).unwrap();
            let original = ctx.js(&table, &w, &phi).unwrap();
            assert!((twice - original).norm() < 1e-8, "({p},{n}): {twice} vs {original}");
        }
    }
}

#[test]
fn flipped_whittaker_function_is_psi_inverse_equivariant() {
    let (p, n) = (3u32, 3u32);
    let table = tables(p, n).remove(0);
    let f = table.rep().field().clone();
    let psi = table.psi().clone();
    let ctx = JsContext::new(&psi, n as usize).unwrap();
    let wn = long_weyl(n as usize);
    let w = WhittakerFun::translate(random_gl(&f, n as usize, &mut ChaCha8Rng::seed_from_u64(3)));
    // W(w_n ᵗ(gJ)^{-1}) lies in the ψ^{-1}-Whittaker model of the contragredient.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let g = random_gl(&f, n as usize, &mut rng);
        let u = gammalab::matgrp::random_unipotent(&f, n as usize, &mut rng);
        let flipped = |x: &Mat| w.eval(&table, &wn.mul(&f, &x.mul(&f, ctx.flip()).inv(&f).unwrap().transpose())).unwrap();
        let lhs = flipped(&u.mul(&f, &g));
        let rhs = psi.inverted().eval(u.superdiag_sum(&f)) * flipped(&g);
        assert!((lhs - rhs).norm() < 1e-9);
    }
}

#[test]
fn gamma_times_contragredient_gamma_is_one() {
    for &(p, n) in &[(2u32, 2u32), (3, 2), (5, 2), (2, 3), (3, 3), (2, 4)] {
        for table in tables(p, n) {
            let g = gamma_torus(&table).unwrap().value;
            let dual = BesselTable::build(&table.rep().contragredient(), &table.psi().inverted());
            let gd = gamma_ratio(&dual, &FeOptions { trials: 16, ..FeOptions::default() }).unwrap().value;
            assert!((g * gd - 1.0).norm() < 1e-8, "({p},{n}): {}", g * gd);
            assert!((g.norm() - 1.0).abs() < 1e-8);
        }
    }
}

#[test]
fn galois_conjugate_characters_give_the_same_gamma() {
    for &(p, n) in &[(3u32, 2u32), (2, 3), (3, 3), (2, 4)] {
        let f = build_field(p, 1, n).unwrap();
        let psi = AddChar::standard(&f);
        let modulus = (p as u64).pow(n) - 1;
        for table in tables(p, n) {
            let k = table.rep().theta().exponent();
            let conj = CuspidalRep::new(&f, n, ((k * p as u64) % modulus) as i64).unwrap();
            let a = gamma_torus(&table).unwrap().value;
            let b = gamma_torus(&BesselTable::build(&conj, &psi)).unwrap().value;
            assert!((a - b).norm() < 1e-9, "({p},{n}) k={k}");
        }
    }
}

#[test]
fn shalika_reps_are_rejected() {
    let f = build_field(3, 1, 2).unwrap();
    let psi = AddChar::standard(&f);
    let table = BesselTable::build(&CuspidalRep::new(&f, 2, 2).unwrap(), &psi);
    assert!(matches!(gamma_ratio(&table, &FeOptions::default()), Err(GammaError::ShalikaVectorPresent)));
    assert!(matches!(gamma_torus(&table), Err(GammaError::ShalikaVectorPresent)));
}

/// With `φ̂_ψ` in place of `φ̂_{ψ^{-1}}`, the odd dual sum stops being
/// proportional to `js` once the characteristic is odd.
#[test]
fn printed_odd_dual_breaks_constancy_in_odd_characteristic() {
    for &(p, broken) in &[(2u32, false), (3, true)] {
        let table = tables(p, 3).remove(0);
        let f = table.rep().field().clone();
        let ctx = JsContext::new(table.psi(), 3).unwrap();
        let gamma = gamma_torus(&table).unwrap().value;
        let mut worst: f64 = 0.0;
        for h in gammalab::matgrp::gl_elements(&f, 3).into_iter().step_by(7) {
            let w = WhittakerFun::translate(h);
            for i in 0..f.q() as usize {
                let phi = CFun::delta(&f, &vector_at(&f, 1, i));
                let a = ctx.js(&table, &w, &phi).unwrap();
                let b = ctx.dual_js_printed(&table, &w, &phi).unwrap();
                worst = worst.max((b - gamma * a).norm());
            }
        }
        assert_eq!(worst > 1e-3, broken, "q={p}: worst residual {worst}");
    }
}

/// The GL_4 closed form with the printed Kloosterman arguments matches the
/// other routes exactly when `ω_π` is trivial or `q` is even.
#[test]
fn printed_gl4_closed_form_deviates_only_for_ramified_odd_q() {
    for p in [2u32, 3] {
        for table in tables(p, 4) {
            let rep = table.rep();
            let torus = gamma_torus(&table).unwrap().value;
            let printed = gamma_closed_gl4_printed(rep, table.psi()).unwrap();
            let expect_ok = p == 2 || rep.central_char().is_trivial();
            let ok = (printed - torus).norm() < 1e-7;
            assert_eq!(ok, expect_ok, "q={p} k={}: printed {printed} torus {torus}", rep.theta().exponent());
        }
    }
}

#[test]
fn delta_pairs_span_enough() {
    let table = tables(3, 2).remove(0);
    let f = table.rep().field().clone();
    let ctx = JsContext::new(table.psi(), 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let nonzero = (0..50)
        .filter(|_| {
            let w = WhittakerFun::translate(random_gl(&f, 2, &mut rng));
            ctx.js(&table, &w, &random_delta(&f, 1, &mut rng)).unwrap().norm() > 1e-9
        })
        .count();
    assert!(nonzero > 0);
}
