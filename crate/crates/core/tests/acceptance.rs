//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line. Dimensions marked "derived" below were computed independently
//! with the evaluation oracle (`oracle_check`) before being frozen here.

use lcas_core::cmap::ConformalMap;
use lcas_core::lca::{fixture, LCAlgebra};
use lcas_core::poly::{rat_int, Poly, Rational, Var};
use lcas_core::solver::{
    cinn_span, oracle_check, quasi_embed, residual, solve_space, span_of_maps, AbgParams,
    DegreeBound, DerivationKind,
};

fn report(number: u32, name: &str, ok: bool) {
    println!("criterion {number:02} ({name}): {}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {number} ({name}) failed");
}

fn abg(alpha: i64, beta: i64, gamma: i64) -> DerivationKind {
    DerivationKind::AlphaBetaGamma(AbgParams::of_ints(alpha, beta, gamma))
}

fn abg_r(alpha: Rational, beta: Rational, gamma: Rational) -> DerivationKind {
    DerivationKind::AlphaBetaGamma(AbgParams::new(alpha, beta, gamma))
}

#[test]
fn criterion_01_axiom_suite() {
    let vir = fixture("vir").unwrap();
    let cur = fixture("cur_sl2").unwrap();
    let mut ok = [
        vir.clone(),
        cur.clone(),
        fixture("rank2_LW").unwrap(),
        fixture("solvable_d1").unwrap(),
        fixture("abelian(2)").unwrap(),
        vir.truncated_extension(),
        vir.direct_sum(&cur),
    ]
    .iter()
    .all(|alg| alg.check_axioms().passed());

    // five single-entry mutations of vir (one table entry, five additions)
    let del = Poly::var(Var::Del);
    let lam = Poly::var(Var::Lam);
    let one = Poly::one();
    let mutations = [
        lam.clone(),
        del.clone(),
        one,
        &lam * &lam,
        &del * &lam,
    ];
    for add in &mutations {
        let table = vec![vec![vec![&vir.structure(0, 0)[0] + add]]];
        let mutated = LCAlgebra::new(vec!["L".into()], table).unwrap();
        ok &= !mutated.check_axioms().passed();
    }
    // five single-entry mutations of cur_sl2 (lam added at five entries)
    for (i, j, k) in [(0, 0, 0), (0, 1, 1), (1, 2, 0), (2, 2, 2), (1, 0, 2)] {
        let mut table: Vec<Vec<Vec<Poly>>> = (0..3)
            .map(|a| (0..3).map(|b| cur.structure(a, b).to_vec()).collect())
            .collect();
        table[i][j][k] = &table[i][j][k] + &lam;
        let mutated = LCAlgebra::new(cur.names().to_vec(), table).unwrap();
        ok &= !mutated.check_axioms().passed();
    }
    report(1, "axiom suite", ok);
}

#[test]
fn criterion_02_generalized_derivations_of_vir() {
    let vir = fixture("vir").unwrap();
    let bounds = DegreeBound::new(4, 3);
    let gder = solve_space(&DerivationKind::Generalized, &vir, bounds);
    let proj = gder.project(0).unwrap();

    // derived dimension at these bounds: a0 contributes lam-degrees 0..3,
    // a1 only 0..2 because the bracket partner raises its lam-degree by
    // one; oracle-confirmed below
    let mut ok = proj.dimension() == 7;
    ok &= oracle_check(&DerivationKind::Generalized, &vir, bounds);

    let qder = solve_space(&DerivationKind::Quasi, &vir, bounds);
    ok &= proj.same_space(&qder.project(0).unwrap());

    let del = Poly::var(Var::Del);
    let lam = Poly::var(Var::Lam);
    for tuple in gder.basis_tuples().unwrap() {
        let d = &tuple[0].entries()[0][0];
        // every solution has the first-order form a0(lam) + a1(lam) del
        ok &= d.degree(Var::Del).unwrap_or(0) <= 1;
        ok &= tuple[1] == tuple[0];
        let a0 = d.coefficient_of(Var::Del, 0);
        let a1 = d.coefficient_of(Var::Del, 1);
        let bracket_map = &(&a0 - &(&a1 * &lam)).scale(&rat_int(2)) + &(&a1 * &del);
        ok &= tuple[2].entries()[0][0] == bracket_map;
    }

    // membership of the explicit solution family, sampled over (a0, a1)
    for (a0, a1) in [
        (Poly::one(), Poly::zero()),
        (Poly::zero(), Poly::one()),
        (lam.pow(3), lam.pow(2)),
    ] {
        let d = &a0 + &(&a1 * &del);
        let dd = &(&a0 - &(&a1 * &lam)).scale(&rat_int(2)) + &(&a1 * &del);
        let tuple = [
            ConformalMap::new(&vir, vec![vec![d.clone()]]).unwrap(),
            ConformalMap::new(&vir, vec![vec![d]]).unwrap(),
            ConformalMap::new(&vir, vec![vec![dd]]).unwrap(),
        ];
        ok &= gder.contains_tuple(&tuple).unwrap();
    }
    report(2, "generalized derivations of vir", ok);
}

#[test]
fn criterion_03_vir_centroids_vanish() {
    let vir = fixture("vir").unwrap();
    let bounds = DegreeBound::new(4, 3);
    let mut ok = solve_space(&DerivationKind::Centroid, &vir, bounds).is_zero_space();
    ok &= solve_space(&DerivationKind::Quasicentroid, &vir, bounds).is_zero_space();
    ok &= oracle_check(&DerivationKind::Centroid, &vir, bounds);
    ok &= oracle_check(&DerivationKind::Quasicentroid, &vir, bounds);
    report(3, "centroid and quasicentroid of vir vanish", ok);
}

#[test]
fn criterion_04_vir_derivations_are_inner() {
    let vir = fixture("vir").unwrap();
    let bounds = DegreeBound::new(4, 3);
    let cder = solve_space(&DerivationKind::Conformal, &vir, bounds);
    let inner = cinn_span(&vir, bounds);
    let ok = cder.same_space(&inner) && cder.dimension() == 3;
    report(4, "derivations of vir are inner", ok);
}

#[test]
fn criterion_05_vir_three_parameter_classification() {
    let vir = fixture("vir").unwrap();
    let bounds = DegreeBound::new(4, 3);
    let mut ok = solve_space(&abg(3, 1, 1), &vir, bounds).is_zero_space();

    let inner = cinn_span(&vir, bounds);
    let d111 = solve_space(&abg(1, 1, 1), &vir, bounds);
    ok &= d111.same_space(&inner) && d111.dimension() == 3;

    let d211 = solve_space(&abg(2, 1, 1), &vir, bounds);
    ok &= d211.dimension() == 4;
    for tuple in d211.basis_tuples().unwrap() {
        ok &= tuple[0].entries()[0][0].degree(Var::Del).unwrap_or(0) == 0;
    }

    for kind in [abg(1, 0, 0), abg(0, 1, -1), abg(1, 1, -1), abg(1, 1, 0)] {
        ok &= solve_space(&kind, &vir, bounds).is_zero_space();
    }
    report(5, "three-parameter classification on vir", ok);
}

#[test]
fn criterion_06_current_three_parameter_classification() {
    let cur = fixture("cur_sl2").unwrap();
    let bounds = DegreeBound::new(3, 2);
    let mut ok = solve_space(&abg(1, 0, 0), &cur, bounds).is_zero_space();
    ok &= solve_space(&abg(3, 1, 1), &cur, bounds).is_zero_space();

    // scalar multiples of the identity, lam-degree up to the bound
    let lam = Poly::var(Var::Lam);
    let mut scalars = Vec::new();
    let mut m = ConformalMap::identity(&cur);
    for _ in 0..=bounds.max_lam {
        scalars.push(m.clone());
        m = m.scale_poly(&lam);
    }
    let scalar_span = span_of_maps("identity-scalars", &cur, bounds, &scalars).unwrap();
    ok &= scalar_span.dimension() == 3;
    for kind in [abg(0, 1, -1), abg(2, 1, 1), abg(1, 1, 0)] {
        let s = solve_space(&kind, &cur, bounds);
        ok &= s.same_space(&scalar_span) && s.dimension() == 3;
    }

    let cder = solve_space(&DerivationKind::Conformal, &cur, bounds);
    let d111 = solve_space(&abg(1, 1, 1), &cur, bounds);
    ok &= d111.same_space(&cder);
    // derived dimension at (3,2): the scalar block f(lam)(del + lam) Id
    // holds deg f <= 1 (two dimensions, oracle-confirmed), the inner
    // block 3 (max_lam + 1) = 9, and the blocks meet trivially
    ok &= cder.dimension() == 11;
    ok &= oracle_check(&DerivationKind::Conformal, &cur, bounds);
    let del_lam = &Poly::var(Var::Del) + &lam;
    let shift_block: Vec<ConformalMap> = (0..=1)
        .map(|k| ConformalMap::identity(&cur).scale_poly(&(&lam.pow(k) * &del_lam)))
        .collect();
    let shift_span = span_of_maps("shift-scalars", &cur, bounds, &shift_block).unwrap();
    let inner = cinn_span(&cur, bounds);
    ok &= inner.dimension() == 9;
    ok &= shift_span.sum(&inner).unwrap().same_space(&cder);
    ok &= shift_span.intersect(&inner).unwrap().is_zero_space();
    ok &= scalar_span.intersect(&inner).unwrap().is_zero_space();
    report(6, "three-parameter classification on cur_sl2", ok);
}

#[test]
fn criterion_07_parameter_identities_under_sampling() {
    let deltas = [rat_int(0), lcas_core::poly::rat(1, 2), rat_int(1), rat_int(2), rat_int(3), rat_int(-1)];
    let scalings = [rat_int(2), rat_int(-3), lcas_core::poly::rat(1, 2)];
    let mut ok = true;
    for (name, bounds) in [("vir", DegreeBound::new(4, 3)), ("cur_sl2", DegreeBound::new(3, 2))] {
        let alg = fixture(name).unwrap();
        let cder = solve_space(&DerivationKind::Conformal, &alg, bounds);
        let qc = solve_space(&DerivationKind::Quasicentroid, &alg, bounds);
        let zder = solve_space(&DerivationKind::Central, &alg, bounds);
        let ann = solve_space(&abg(1, 0, 0), &alg, bounds);

        ok &= solve_space(&abg(1, 1, 1), &alg, bounds).same_space(&cder);
        ok &= solve_space(&abg(0, 1, -1), &alg, bounds).same_space(&qc);
        ok &= ann
            .intersect(&solve_space(&abg(0, 1, 0), &alg, bounds))
            .unwrap()
            .same_space(&zder);

        for delta in &deltas {
            // scaling invariance of a sampled family member
            let base = solve_space(
                &abg_r(delta.clone(), rat_int(1), rat_int(1)),
                &alg,
                bounds,
            );
            for s in &scalings {
                let scaled = solve_space(
                    &abg_r(delta * s, s.clone(), s.clone()),
                    &alg,
                    bounds,
                );
                ok &= base.same_space(&scaled);
            }
            // symmetric/antisymmetric intersection decomposition
            let d110 = solve_space(&abg_r(delta.clone(), rat_int(1), rat_int(0)), &alg, bounds);
            let sym = solve_space(
                &abg_r(delta * &rat_int(2), rat_int(1), rat_int(1)),
                &alg,
                bounds,
            );
            ok &= d110.same_space(&qc.intersect(&sym).unwrap());
            if *delta != rat_int(0) {
                let d11m1 =
                    solve_space(&abg_r(delta.clone(), rat_int(1), rat_int(-1)), &alg, bounds);
                ok &= d11m1.same_space(&qc.intersect(&ann).unwrap());
            }
        }
    }
    report(7, "parameter identities under sampling", ok);
}

#[test]
fn criterion_08_structure_property_suites() {
    // the tower, splitting, bracket, centralizer, ideal, and direct-sum
    // suites live in tests/solver_suite.rs; re-run their core assertions
    // on the named fixtures at the acceptance bounds
    let vir = fixture("vir").unwrap();
    let cur = fixture("cur_sl2").unwrap();
    let mut ok = true;

    // tower on vir at (4,3) and cur_sl2 at (2,2)
    for (alg, bounds) in [(&vir, DegreeBound::new(4, 3)), (&cur, DegreeBound::new(2, 2))] {
        let inner = cinn_span(alg, bounds);
        let cder = solve_space(&DerivationKind::Conformal, alg, bounds);
        let qder = solve_space(&DerivationKind::Quasi, alg, bounds);
        let gder = solve_space(&DerivationKind::Generalized, alg, bounds);
        let qder_proj = qder.project(0).unwrap();
        let gder_proj = gder.project(0).unwrap();
        for t in inner.basis_tuples().unwrap() {
            ok &= cder.contains_tuple(&t).unwrap();
        }
        for t in cder.basis_tuples().unwrap() {
            ok &= qder_proj.contains_tuple(&t).unwrap();
        }
        for t in qder_proj.basis_tuples().unwrap() {
            ok &= gder_proj.contains_tuple(&t).unwrap();
        }

        // splitting of generalized tuples
        let qc = solve_space(&DerivationKind::Quasicentroid, alg, bounds);
        for t in gder.basis_tuples().unwrap() {
            let avg = t[0].add(&t[1]).unwrap().scale(&lcas_core::poly::rat(1, 2));
            let dif = t[0].sub(&t[1]).unwrap().scale(&lcas_core::poly::rat(1, 2));
            ok &= qder.contains_tuple(&[avg, t[2].clone()]).unwrap();
            ok &= qc.contains_tuple(&[dif]).unwrap();
        }

        // centroid pairs (D, 2D)
        let centroid = solve_space(&DerivationKind::Centroid, alg, bounds);
        for t in centroid.basis_tuples().unwrap() {
            ok &= qder.contains_tuple(&[t[0].clone(), t[0].scale(&rat_int(2))]).unwrap();
        }
    }

    // quasicentroid brackets fall into the qder projection at raised bounds
    let bounds = DegreeBound::new(2, 1);
    let qc = solve_space(&DerivationKind::Quasicentroid, &cur, bounds);
    let raised = DegreeBound::new(4, 3);
    let qder_raised = solve_space(&DerivationKind::Quasi, &cur, raised).project(0).unwrap();
    let qc_maps: Vec<ConformalMap> = qc
        .basis_tuples()
        .unwrap()
        .into_iter()
        .map(|mut t| t.remove(0))
        .collect();
    for a in &qc_maps {
        for b in &qc_maps {
            for c in a.gc_bracket(b).unwrap().extract_lam_coeffs() {
                ok &= qder_raised.contains_tuple(&[c]).unwrap();
            }
        }
    }

    // centerless centralizer property
    let centroid = solve_space(&DerivationKind::Centroid, &cur, DegreeBound::new(3, 2));
    let qc = solve_space(&DerivationKind::Quasicentroid, &cur, DegreeBound::new(3, 2));
    for a in centroid.basis_tuples().unwrap() {
        for b in centroid.basis_tuples().unwrap().iter().chain(qc.basis_tuples().unwrap().iter()) {
            ok &= a[0].gc_bracket(&b[0]).unwrap().is_zero();
        }
    }

    // kernel and image ideals of centroid maps
    for t in centroid.basis_tuples().unwrap() {
        ok &= lcas_core::solver::map_kernel_submodule(&cur, &t[0], 2)
            .unwrap()
            .is_ideal(&cur)
            .unwrap();
        ok &= lcas_core::solver::map_image_submodule(&cur, &t[0])
            .unwrap()
            .is_ideal(&cur)
            .unwrap();
    }

    // block-diagonal direct-sum decomposition with additive dimensions
    let sum = vir.direct_sum(&cur);
    let bounds = DegreeBound::new(2, 1);
    for kind in [
        DerivationKind::Generalized,
        DerivationKind::Quasi,
        DerivationKind::Centroid,
        DerivationKind::Quasicentroid,
    ] {
        let whole = solve_space(&kind, &sum, bounds);
        let parts =
            solve_space(&kind, &vir, bounds).dimension() + solve_space(&kind, &cur, bounds).dimension();
        ok &= whole.dimension() == parts;
        for t in whole.basis_tuples().unwrap() {
            for m in &t {
                for i in 0..4 {
                    for j in 0..4 {
                        if (i < 1) != (j < 1) {
                            ok &= m.entries()[i][j].is_zero();
                        }
                    }
                }
            }
        }
    }
    report(8, "structure property suites", ok);
}

#[test]
fn criterion_09_quasiderivation_embedding() {
    let vir = fixture("vir").unwrap();
    let ext = vir.truncated_extension();
    let bounds = DegreeBound::new(4, 3);
    let qder = solve_space(&DerivationKind::Quasi, &vir, bounds);
    let mut ok = true;
    let mut images = Vec::new();
    for tuple in qder.basis_tuples().unwrap() {
        let img = quasi_embed(&vir, &tuple[0], &tuple[1]).unwrap();
        ok &= residual(&DerivationKind::Conformal, std::slice::from_ref(&img), &ext)
            .unwrap()
            .is_zero();
        images.push(img);
    }
    let embed_span = span_of_maps("embed", &ext, bounds, &images).unwrap();
    ok &= embed_span.dimension() == qder.dimension();

    let cder_ext = solve_space(&DerivationKind::Conformal, &ext, bounds);
    let zder_ext = solve_space(&DerivationKind::Central, &ext, bounds);
    ok &= embed_span.sum(&zder_ext).unwrap().same_space(&cder_ext);
    ok &= embed_span.intersect(&zder_ext).unwrap().is_zero_space();
    // derived dimensions at (4,3), oracle-confirmed: 7 + 20 = 27
    ok &= (embed_span.dimension(), zder_ext.dimension(), cder_ext.dimension()) == (7, 20, 27);
    ok &= oracle_check(&DerivationKind::Conformal, &ext, bounds);
    ok &= oracle_check(&DerivationKind::Central, &ext, bounds);
    report(9, "quasiderivation embedding", ok);
}

#[test]
fn criterion_10_module_theory() {
    let vir = fixture("vir").unwrap();
    let rep = vir.complement_test(&vir.derived_subalgebra()).unwrap();
    let mut ok = rep.quotient_free && rep.complement.as_ref().is_some_and(|c| c.is_zero());

    let rank2 = fixture("rank2_LW").unwrap();
    let rep = rank2.complement_test(&rank2.derived_subalgebra()).unwrap();
    ok &= !rep.quotient_free && rep.complement.is_none();

    let solvable = fixture("solvable_d1").unwrap();
    let rep = solvable.complement_test(&solvable.derived_subalgebra()).unwrap();
    ok &= rep.quotient_free;
    ok &= rep
        .complement
        .is_some_and(|c| c.generator_rows() == [vec![Poly::one(), Poly::zero()]]);
    report(10, "module theory", ok);
}

#[test]
fn criterion_11_oracle_equivalence_matrix() {
    let bounds = DegreeBound::new(2, 2);
    let kinds = [
        DerivationKind::Conformal,
        DerivationKind::Quasi,
        DerivationKind::Generalized,
        DerivationKind::Centroid,
        DerivationKind::Quasicentroid,
        DerivationKind::Central,
        abg(2, 1, 1),
    ];
    let mut ok = true;
    for name in ["vir", "cur_sl2"] {
        let alg = fixture(name).unwrap();
        for kind in &kinds {
            let agreed = oracle_check(kind, &alg, bounds);
            if !agreed {
                println!("  oracle disagreement: {} on {}", kind.label(), name);
            }
            ok &= agreed;
        }
    }
    report(11, "oracle equivalence matrix", ok);
}
