use gammalab::bessel::{bessel_closed_form_gl3, bessel_closed_form_gl4, BesselTable};
use gammalab::charkit::{regular_orbit_representatives, AddChar, TOL};
use gammalab::cuspchar::CuspidalRep;
use gammalab::ffield::build_field;

#[test]
fn gl3_formula_matches_table_exhaustively() {
    for p in [2u32, 3] {
        let f = build_field(p, 1, 3).unwrap();
        let psi = AddChar::standard(&f);
        for k in regular_orbit_representatives(p as u64, 3) {
            let rep = CuspidalRep::new(&f, 3, k as i64).unwrap();
            let table = BesselTable::build(&rep, &psi);
            for l1 in f.subfield_units(1) {
                for l2 in f.subfield_units(1) {
                    let printed = bessel_closed_form_gl3(&rep, &psi, l1, l2).unwrap();
                    let tab = table.entry(&[1, 2], &[l1, l2]).unwrap();
                    assert!((printed - tab).norm() < TOL, "q={p} k={k} ({l1},{l2}): {printed} vs {tab}");
                }
            }
        }
    }
}

#[test]
fn gl4_w6_formula_matches_table() {
    for p in [2u32, 3] {
        let f = build_field(p, 1, 4).unwrap();
        let psi = AddChar::standard(&f);
        let reps = regular_orbit_representatives(p as u64, 4);
        let ks: Vec<u64> = if p == 2 { reps } else { reps.into_iter().step_by(3).collect() };
        for k in ks {
            let rep = CuspidalRep::new(&f, 4, k as i64).unwrap();
            let table = BesselTable::build(&rep, &psi);
            for mu in f.subfield_units(1) {
                for nu in f.subfield_units(1) {
                    let printed = bessel_closed_form_gl4(&rep, &psi, mu, nu).unwrap();
                    let tab = table.entry(&[2, 2], &[mu, nu]).unwrap();
                    assert!((printed - tab).norm() < TOL, "q={p} k={k} ({mu},{nu}): {printed} vs {tab}");
                }
            }
        }
    }
}

#[test]
fn contragredient_table_is_conjugate() {
    for &(p, n) in &[(3u32, 2u32), (2, 3), (3, 3), (2, 4)] {
        let f = build_field(p, 1, n).unwrap();
        let psi = AddChar::standard(&f);
        for k in regular_orbit_representatives(p as u64, n) {
            let rep = CuspidalRep::new(&f, n, k as i64).unwrap();
            let a = BesselTable::build(&rep, &psi);
            let b = BesselTable::build(&rep.contragredient(), &psi.inverted());
            for (key, v) in a.entries() {
                assert!((b.entries()[key] - v.conj()).norm() < TOL);
            }
        }
    }
}
