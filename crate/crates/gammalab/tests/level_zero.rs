use std::f64::consts::PI;

use gammalab::bessel::BesselTable;
use gammalab::charkit::{regular_orbit_representatives, AddChar, CFun};
use gammalab::cuspchar::CuspidalRep;
use gammalab::exjs::{gamma_closed, gamma_torus, shalika_detect, shalika_witness, FeOptions, WhittakerFun};
use gammalab::ffield::build_field;
use gammalab::levelzero::{
    gamma_from_l_eps, l_factor, l_from_shalika_periods, lifted_dual_js, lifted_js, local_gamma, local_l_eps,
    modified_fe_check, shalika_functional_value, LevelZeroCtx, RatQS,
};
use gammalab::matgrp::random_gl;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cvals() -> [Complex64; 3] {
    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::from_polar(1.0, 2.0 * PI / 5.0)]
}

fn all_tables(p: u32, n: u32) -> Vec<BesselTable> {
    let f = build_field(p, 1, n).unwrap();
    let psi = AddChar::standard(&f);
    regular_orbit_representatives(p as u64, n)
        .into_iter()
        .map(|k| BesselTable::build(&CuspidalRep::new(&f, n, k as i64).unwrap(), &psi))
        .collect()
}

fn random_pair(ctx: &LevelZeroCtx, rng: &mut ChaCha8Rng) -> (WhittakerFun, CFun) {
    let f = ctx.table().rep().field().clone();
    let n = ctx.table().n() as usize;
    let w = WhittakerFun::from_terms(vec![
        (Complex64::new(1.0, 0.0), random_gl(&f, n, rng)),
        (Complex64::new(0.5, -0.5), random_gl(&f, n, rng)),
    ]);
    let phi = CFun::from_fn(&f, ctx.m() as usize, |_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    (w, phi)
}

#[test]
fn lifted_sums_are_constants_without_shalika_vector() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for &(p, n) in &[(3u32, 2u32), (2, 3), (3, 3), (2, 4)] {
        for table in all_tables(p, n) {
            let ctx = LevelZeroCtx::new(&table, cvals()[2]).unwrap();
            if ctx.has_shalika_vector() {
                continue;
            }
            let js = ctx.js_context();
            for _ in 0..5 {
                let (w, phi) = random_pair(&ctx, &mut rng);
                let a = lifted_js(&ctx, &w, &phi).unwrap();
                let b = lifted_dual_js(&ctx, &w, &phi).unwrap();
                assert!(a.approx_eq(&RatQS::constant(js.js(&table, &w, &phi).unwrap())));
                assert!(b.approx_eq(&RatQS::constant(js.dual_js(&table, &w, &phi).unwrap())));
            }
        }
    }
}

#[test]
fn lifted_witness_gives_the_l_factor() {
    for &(p, n) in &[(2u32, 2u32), (3, 2), (2, 4)] {
        for table in all_tables(p, n) {
            for cval in cvals() {
                let ctx = LevelZeroCtx::new(&table, cval).unwrap();
                if !ctx.has_shalika_vector() {
                    continue;
                }
                let m = ctx.m();
                let q = p as f64;
                let jsc = ctx.js_context();
                let w = shalika_witness(jsc).unwrap();
                let period = shalika_functional_value(&ctx, &w).unwrap();
                let w = w.scale(period.inv());
                let one = CFun::constant(m as usize, p as usize, Complex64::new(1.0, 0.0));
                let a = lifted_js(&ctx, &w, &one).unwrap();
                assert!(a.approx_eq(&l_factor(cval, m).unwrap()), "{a}");
                let b = lifted_dual_js(&ctx, &w, &one).unwrap();
                let expected = RatQS::monomial(q.powf(m as f64 / 2.0) * q.powi(-(m as i32)) * cval.inv(), -(m as i64))
                    .mul(&ctx.central_l_dual().unwrap());
                assert!(b.approx_eq(&expected), "{b} vs {expected}");
            }
        }
    }
}

#[test]
fn lifted_functional_equation_holds_for_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for &(p, n) in &[(3u32, 2u32), (2, 4), (2, 3)] {
        for table in all_tables(p, n) {
            for cval in cvals() {
                let ctx = LevelZeroCtx::new(&table, cval).unwrap();
                let gamma = local_gamma(&ctx).unwrap();
                for _ in 0..4 {
                    let (w, phi) = random_pair(&ctx, &mut rng);
                    let lhs = lifted_dual_js(&ctx, &w, &phi).unwrap();
                    let rhs = gamma.mul(&lifted_js(&ctx, &w, &phi).unwrap());
                    assert!(lhs.approx_eq(&rhs), "({p},{n}) c={cval}: {lhs} vs {rhs}");
                }
            }
        }
    }
}

#[test]
fn gamma_shape_matches_shalika_criterion() {
    for &(p, n) in &[(2u32, 2u32), (3, 2), (2, 4), (3, 4)] {
        for table in all_tables(p, n) {
            let report = shalika_detect(&table, 1000, 1000, 9).unwrap();
            assert!(report.consistent());
            for cval in cvals() {
                let ctx = LevelZeroCtx::new(&table, cval).unwrap();
                let shalika = report.nonvanishing_found;
                assert_eq!(ctx.has_shalika_vector(), shalika);
                let gamma = local_gamma(&ctx).unwrap();
                assert_eq!(gamma.is_constant(), !shalika, "({p},{n}) c={cval}: {gamma}");
                assert!(gamma.approx_eq(&gamma_from_l_eps(&ctx).unwrap()));
                let (l, eps) = local_l_eps(&ctx).unwrap();
                assert_eq!(l.has_pole(), shalika);
                let m = ctx.m();
                let mut target = vec![Complex64::new(0.0, 0.0); m as usize + 1];
                target[0] = Complex64::new(1.0, 0.0);
                target[m as usize] = -cval;
                assert!(l.den_divides(&target));
                if shalika {
                    assert!(l.approx_eq(&l_factor(cval, m).unwrap()));
                    let e = RatQS::monomial((p as f64).powf(-(m as f64) / 2.0) * cval.inv(), -(m as i64));
                    assert!(eps.approx_eq(&e));
                } else {
                    let g = gamma_torus(&table).unwrap().value;
                    assert!(gamma.approx_eq(&RatQS::constant(g)));
                    assert!(eps.approx_eq(&RatQS::constant(g)));
                }
            }
        }
    }
}

#[test]
fn non_shalika_gamma_matches_closed_form_gl2() {
    let f = build_field(3, 1, 2).unwrap();
    let psi = AddChar::standard(&f);
    let rep = CuspidalRep::new(&f, 2, 1).unwrap();
    let ctx = LevelZeroCtx::new(&BesselTable::build(&rep, &psi), Complex64::new(1.0, 0.0)).unwrap();
    let closed = gamma_closed(&rep, &psi).unwrap().value;
    assert!(local_gamma(&ctx).unwrap().approx_eq(&RatQS::constant(closed)));
    assert!(local_l_eps(&ctx).unwrap().0.approx_eq(&RatQS::one()));
}

#[test]
fn l_factor_from_shalika_periods() {
    for &(p, n) in &[(3u32, 2u32), (2, 4)] {
        for table in all_tables(p, n) {
            for cval in cvals() {
                let ctx = LevelZeroCtx::new(&table, cval).unwrap();
                let w = if ctx.has_shalika_vector() {
                    shalika_witness(ctx.js_context()).unwrap()
                } else {
                    ctx.js_context().canonical_pair().unwrap().0
                };
                let via_periods = l_from_shalika_periods(&ctx, &w).unwrap();
                assert!(via_periods.approx_eq(&local_l_eps(&ctx).unwrap().0), "({p},{n}) c={cval}: {via_periods}");
            }
        }
    }
}

#[test]
fn shalika_period_is_linear_and_vanishes_without_shalika_vector() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for table in all_tables(3, 2) {
        let ctx = LevelZeroCtx::new(&table, Complex64::new(1.0, 0.0)).unwrap();
        let (w1, _) = random_pair(&ctx, &mut rng);
        let (w2, _) = random_pair(&ctx, &mut rng);
        let a = Complex64::new(0.3, 1.7);
        let mut terms = w1.scale(a).terms().to_vec();
        terms.extend_from_slice(w2.terms());
        let sum = shalika_functional_value(&ctx, &WhittakerFun::from_terms(terms)).unwrap();
        let parts = a * shalika_functional_value(&ctx, &w1).unwrap() + shalika_functional_value(&ctx, &w2).unwrap();
        assert!((sum - parts).norm() < 1e-9);
        if !ctx.has_shalika_vector() {
            assert!(shalika_functional_value(&ctx, &w1).unwrap().norm() < 1e-9);
        } else {
            let w = shalika_witness(ctx.js_context()).unwrap();
            let v = shalika_functional_value(&ctx, &w).unwrap();
            let w = w.scale(v.inv());
            assert!((shalika_functional_value(&ctx, &w).unwrap() - 1.0).norm() < 1e-9);
        }
    }
}

#[test]
fn gamma_times_reflected_contragredient_gamma_is_one() {
    for &(p, n) in &[(3u32, 2u32), (2, 3), (2, 4)] {
        for table in all_tables(p, n) {
            let dual = BesselTable::build(&table.rep().contragredient(), &table.psi().inverted());
            for cval in cvals() {
                let g = local_gamma(&LevelZeroCtx::new(&table, cval).unwrap()).unwrap();
                let gd = local_gamma(&LevelZeroCtx::new(&dual, cval.inv()).unwrap()).unwrap();
                let prod = g.mul(&gd.reflect(p as f64));
                assert!(prod.approx_eq(&RatQS::one()), "({p},{n}) c={cval}: {prod}");
            }
        }
    }
}

#[test]
fn modified_equation_exhaustive_gl2() {
    for p in [2u32, 3] {
        for table in all_tables(p, 2) {
            let r = modified_fe_check(&table, &FeOptions::default()).unwrap();
            let q = p as usize;
            assert_eq!(r.pairs_checked, (q * q - 1) * (q * q - q) * q);
            assert!(r.max_residual < 1e-9);
            let ctx = LevelZeroCtx::new(&table, Complex64::new(1.0, 0.0)).unwrap();
            assert_eq!(r.gamma.is_constant(), !ctx.has_shalika_vector());
            assert!(r.gamma.approx_eq(&local_gamma(&ctx).unwrap()));
        }
    }
}

#[test]
fn modified_equation_sampled_gl4() {
    let opts = FeOptions { trials: 120, exhaustive_limit: 0, ..FeOptions::default() };
    for table in all_tables(2, 4) {
        let r = modified_fe_check(&table, &opts).unwrap();
        assert_eq!(r.pairs_checked, 120);
        assert!(r.max_residual < 1e-9);
    }
}
