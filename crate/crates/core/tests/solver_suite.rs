//! Space-level properties of the derivation solvers: the inclusion
//! tower, tuple splitting, bracket closure, behavior on direct sums,
//! the centroid's kernel/image ideals, the scaling and intersection laws
//! of the three-parameter family, and the embedding into the truncated
//! extension.

use lcas_core::cmap::ConformalMap;
use lcas_core::lca::{fixture, LCAlgebra};
use lcas_core::poly::{rat, rat_int, Poly, Rational, Var};
use lcas_core::solver::{
    cinn_span, map_image_submodule, map_kernel_submodule, quasi_embed, residual, solve_space,
    span_of_maps, AbgParams, DegreeBound, DerivationKind, SolutionSpace,
};

fn halve(m: &ConformalMap) -> ConformalMap {
    m.scale(&rat(1, 2))
}

fn tower_holds(alg: &LCAlgebra, bounds: DegreeBound) {
    let inner = cinn_span(alg, bounds);
    let cder = solve_space(&DerivationKind::Conformal, alg, bounds);
    let qder = solve_space(&DerivationKind::Quasi, alg, bounds).project(0).unwrap();
    let gder = solve_space(&DerivationKind::Generalized, alg, bounds).project(0).unwrap();
    for tuple in inner.basis_tuples().unwrap() {
        assert!(cder.contains_tuple(&tuple).unwrap(), "inner map outside cder");
    }
    for tuple in cder.basis_tuples().unwrap() {
        assert!(qder.contains_tuple(&tuple).unwrap(), "cder map outside qder projection");
    }
    for tuple in qder.basis_tuples().unwrap() {
        assert!(gder.contains_tuple(&tuple).unwrap(), "qder map outside gder projection");
    }
}

#[test]
fn inclusion_tower_on_vir_and_current() {
    tower_holds(&fixture("vir").unwrap(), DegreeBound::new(4, 3));
    tower_holds(&fixture("cur_sl2").unwrap(), DegreeBound::new(2, 2));
}

#[test]
fn centroid_elements_pair_with_twice_themselves() {
    // (D, 2D) solves the quasiderivation identity for centroid D
    for (name, bounds) in [("vir", DegreeBound::new(4, 3)), ("cur_sl2", DegreeBound::new(3, 2))] {
        let alg = fixture(name).unwrap();
        let centroid = solve_space(&DerivationKind::Centroid, &alg, bounds);
        let qder = solve_space(&DerivationKind::Quasi, &alg, bounds);
        for tuple in centroid.basis_tuples().unwrap() {
            let d = &tuple[0];
            let pair = [d.clone(), d.scale(&rat_int(2))];
            assert!(qder.contains_tuple(&pair).unwrap(), "{name}: (D, 2D) not a qder pair");
        }
    }
}

#[test]
fn gder_tuples_split_into_qder_and_qc_parts() {
    for (name, bounds) in [("vir", DegreeBound::new(4, 3)), ("cur_sl2", DegreeBound::new(2, 2))] {
        let alg = fixture(name).unwrap();
        let gder = solve_space(&DerivationKind::Generalized, &alg, bounds);
        let qder = solve_space(&DerivationKind::Quasi, &alg, bounds);
        let qc = solve_space(&DerivationKind::Quasicentroid, &alg, bounds);
        for tuple in gder.basis_tuples().unwrap() {
            let (d, d1, d2) = (&tuple[0], &tuple[1], &tuple[2]);
            let avg = halve(&d.add(d1).unwrap());
            let dif = halve(&d.sub(d1).unwrap());
            // the qder partner of (D + D')/2 is exactly the bracket map D''
            assert!(
                qder.contains_tuple(&[avg, d2.clone()]).unwrap(),
                "{name}: averaged tuple misses the qder space"
            );
            assert!(
                qc.contains_tuple(&[dif]).unwrap(),
                "{name}: difference misses the quasicentroid"
            );
        }
    }
}

#[test]
fn quasicentroid_brackets_land_in_qder() {
    for (name, bounds) in [
        ("vir", DegreeBound::new(2, 2)),
        ("cur_sl2", DegreeBound::new(2, 1)),
        ("rank2_LW", DegreeBound::new(1, 1)),
    ] {
        let alg = fixture(name).unwrap();
        let qc = solve_space(&DerivationKind::Quasicentroid, &alg, bounds);
        let raised = DegreeBound::new(
            2 * bounds.max_del,
            bounds.max_del + bounds.max_lam,
        );
        let qder_raised = solve_space(&DerivationKind::Quasi, &alg, raised).project(0).unwrap();
        let maps: Vec<ConformalMap> = qc
            .basis_tuples()
            .unwrap()
            .into_iter()
            .map(|mut t| t.remove(0))
            .collect();
        for d1 in &maps {
            for d2 in &maps {
                for coeff in d1.gc_bracket(d2).unwrap().extract_lam_coeffs() {
                    assert!(
                        qder_raised.contains_tuple(&[coeff]).unwrap(),
                        "{name}: bracket coefficient escapes qder at raised bounds"
                    );
                }
            }
        }
    }
}

#[test]
fn centroid_centralizes_quasicentroid_when_centerless() {
    for (name, bounds) in [("vir", DegreeBound::new(4, 3)), ("cur_sl2", DegreeBound::new(3, 2))] {
        let alg = fixture(name).unwrap();
        // centerless hypothesis, verified computationally
        assert!(solve_space(&DerivationKind::Center, &alg, DegreeBound::new(4, 0)).is_zero_space());
        let centroid = solve_space(&DerivationKind::Centroid, &alg, bounds);
        let qc = solve_space(&DerivationKind::Quasicentroid, &alg, bounds);
        let cmaps: Vec<ConformalMap> = centroid
            .basis_tuples()
            .unwrap()
            .into_iter()
            .map(|mut t| t.remove(0))
            .collect();
        let qmaps: Vec<ConformalMap> = qc
            .basis_tuples()
            .unwrap()
            .into_iter()
            .map(|mut t| t.remove(0))
            .collect();
        for a in &cmaps {
            for b in cmaps.iter().chain(&qmaps) {
                assert!(a.gc_bracket(b).unwrap().is_zero(), "{name}: nonvanishing bracket");
            }
        }
    }
}

#[test]
fn centroid_kernels_and_images_are_ideals() {
    let cur = fixture("cur_sl2").unwrap();
    let centroid = solve_space(&DerivationKind::Centroid, &cur, DegreeBound::new(3, 2));
    assert!(centroid.dimension() > 0);
    for tuple in centroid.basis_tuples().unwrap() {
        let ker = map_kernel_submodule(&cur, &tuple[0], 2).unwrap();
        let im = map_image_submodule(&cur, &tuple[0]).unwrap();
        assert!(ker.is_ideal(&cur).unwrap());
        assert!(im.is_ideal(&cur).unwrap());
    }

    // on a direct sum the centroid has nontrivial kernels and images
    let vir = fixture("vir").unwrap();
    let sum = vir.direct_sum(&cur);
    let centroid = solve_space(&DerivationKind::Centroid, &sum, DegreeBound::new(2, 1));
    let mut saw_proper = false;
    for tuple in centroid.basis_tuples().unwrap() {
        let ker = map_kernel_submodule(&sum, &tuple[0], 2).unwrap();
        let im = map_image_submodule(&sum, &tuple[0]).unwrap();
        assert!(ker.is_ideal(&sum).unwrap());
        assert!(im.is_ideal(&sum).unwrap());
        if !ker.is_zero() && ker.rank() < sum.rank() {
            saw_proper = true;
        }
    }
    assert!(saw_proper, "expected a centroid map with a proper nonzero kernel");
}

fn block_is_diagonal(map: &ConformalMap, n1: usize) -> bool {
    let n = map.rank();
    for i in 0..n {
        for j in 0..n {
            if (i < n1) != (j < n1) && !map.entries()[i][j].is_zero() {
                return false;
            }
        }
    }
    true
}

#[test]
fn direct_sum_spaces_are_block_diagonal_and_additive() {
    let vir = fixture("vir").unwrap();
    let cur = fixture("cur_sl2").unwrap();
    let sum = vir.direct_sum(&cur);
    let bounds = DegreeBound::new(2, 1);
    for kind in [
        DerivationKind::Generalized,
        DerivationKind::Quasi,
        DerivationKind::Centroid,
        DerivationKind::Quasicentroid,
    ] {
        let whole = solve_space(&kind, &sum, bounds);
        let left = solve_space(&kind, &vir, bounds);
        let right = solve_space(&kind, &cur, bounds);
        assert_eq!(
            whole.dimension(),
            left.dimension() + right.dimension(),
            "{}: dimensions do not add",
            kind.label()
        );
        for tuple in whole.basis_tuples().unwrap() {
            for map in &tuple {
                assert!(block_is_diagonal(map, 1), "{}: off-diagonal block", kind.label());
            }
        }
    }
}

fn abg(alpha: Rational, beta: Rational, gamma: Rational) -> DerivationKind {
    DerivationKind::AlphaBetaGamma(AbgParams::new(alpha, beta, gamma))
}

fn abg_i(alpha: i64, beta: i64, gamma: i64) -> DerivationKind {
    DerivationKind::AlphaBetaGamma(AbgParams::of_ints(alpha, beta, gamma))
}

#[test]
fn three_parameter_family_specializations() {
    for (name, bounds) in [("vir", DegreeBound::new(3, 2)), ("cur_sl2", DegreeBound::new(2, 2))] {
        let alg = fixture(name).unwrap();
        // (1,1,1) is the derivation identity
        assert!(solve_space(&abg_i(1, 1, 1), &alg, bounds)
            .same_space(&solve_space(&DerivationKind::Conformal, &alg, bounds)));
        // (0,1,-1) is the quasicentroid
        assert!(solve_space(&abg_i(0, 1, -1), &alg, bounds)
            .same_space(&solve_space(&DerivationKind::Quasicentroid, &alg, bounds)));
        // (1,0,0) meet (0,1,0) kills both sides of the bracket
        let meet = solve_space(&abg_i(1, 0, 0), &alg, bounds)
            .intersect(&solve_space(&abg_i(0, 1, 0), &alg, bounds))
            .unwrap();
        assert!(meet.same_space(&solve_space(&DerivationKind::Central, &alg, bounds)));
        // scaling invariance
        for (a, b, g) in [(1i64, 1i64, 1i64), (0, 1, -1), (1, 2, 3)] {
            let base = solve_space(&abg_i(a, b, g), &alg, bounds);
            for delta in [rat_int(2), rat_int(-3), rat(1, 2)] {
                let scaled = solve_space(
                    &abg(
                        &delta * rat_int(a),
                        &delta * rat_int(b),
                        &delta * rat_int(g),
                    ),
                    &alg,
                    bounds,
                );
                assert!(base.same_space(&scaled), "{name}: scaling by {delta} changed the space");
            }
        }
    }
}

#[test]
fn three_parameter_family_intersections() {
    for (name, bounds) in [("vir", DegreeBound::new(3, 2)), ("cur_sl2", DegreeBound::new(2, 2))] {
        let alg = fixture(name).unwrap();
        // general decomposition into symmetric and antisymmetric parts
        for (a, b, g) in [(rat_int(1), rat_int(1), rat_int(0)),
                          (rat_int(1), rat_int(1), rat_int(1)),
                          (rat(1, 2), rat_int(2), rat_int(-3))] {
            let whole = solve_space(&abg(a.clone(), b.clone(), g.clone()), &alg, bounds);
            let skewed = solve_space(&abg(rat_int(0), &b - &g, &g - &b), &alg, bounds);
            let doubled = solve_space(
                &abg(&a * rat_int(2), &b + &g, &b + &g),
                &alg,
                bounds,
            );
            assert!(whole.same_space(&skewed.intersect(&doubled).unwrap()),
                "{name}: ({a},{b},{g}) decomposition fails");
        }
    }
}

#[test]
fn three_parameter_family_normal_form_cases() {
    let deltas: [Rational; 6] = [
        rat_int(0), rat(1, 2), rat_int(1), rat_int(2), rat_int(3), rat_int(-1),
    ];
    for (name, bounds) in [("vir", DegreeBound::new(3, 2)), ("cur_sl2", DegreeBound::new(2, 2))] {
        let alg = fixture(name).unwrap();
        let full = solve_space(&abg_i(0, 0, 0), &alg, bounds);
        let layout = full.layout();
        assert_eq!(full.dimension(), layout.ncols(), "(0,0,0) must be the full ansatz");

        // maps killing the bracket annihilate the derived submodule
        let annihilator = solve_space(&abg_i(1, 0, 0), &alg, bounds);
        let derived = alg.derived_subalgebra();
        for tuple in annihilator.basis_tuples().unwrap() {
            for gen in derived.generators(&alg).unwrap() {
                let img = tuple[0].apply(&alg, &gen).unwrap();
                assert!(img.iter().all(|p| p.is_zero()));
            }
        }

        let qc = solve_space(&abg_i(0, 1, -1), &alg, bounds);
        let ann = solve_space(&abg_i(1, 0, 0), &alg, bounds);
        for delta in &deltas {
            // (delta, 1, -1) for nonzero delta is the intersection case
            if *delta != rat_int(0) {
                let s = solve_space(&abg(delta.clone(), rat_int(1), rat_int(-1)), &alg, bounds);
                assert!(s.same_space(&qc.intersect(&ann).unwrap()), "{name}: (d,1,-1) case");
            }
            // (delta, 1, 0) always intersects the doubled symmetric case
            let s = solve_space(&abg(delta.clone(), rat_int(1), rat_int(0)), &alg, bounds);
            let sym = solve_space(
                &abg(delta * rat_int(2), rat_int(1), rat_int(1)),
                &alg,
                bounds,
            );
            assert!(s.same_space(&qc.intersect(&sym).unwrap()), "{name}: (d,1,0) case");
        }
    }
}

#[test]
fn zero_map_is_everywhere_and_residuals_recheck() {
    let vir = fixture("vir").unwrap();
    let bounds = DegreeBound::new(2, 2);
    let zero = ConformalMap::zero(&vir);
    for kind in [
        DerivationKind::Conformal,
        DerivationKind::Centroid,
        DerivationKind::Quasicentroid,
        DerivationKind::Central,
    ] {
        let space = solve_space(&kind, &vir, bounds);
        assert!(space.contains_tuple(std::slice::from_ref(&zero)).unwrap());
        for tuple in space.basis_tuples().unwrap() {
            assert!(residual(&kind, &tuple, &vir).unwrap().is_zero());
        }
    }
}

#[test]
fn embedding_is_injective_and_partner_independent() {
    // injectivity on the full basis of the quasiderivation space
    let vir = fixture("vir").unwrap();
    let bounds = DegreeBound::new(4, 3);
    let qder = solve_space(&DerivationKind::Quasi, &vir, bounds);
    let ext = vir.truncated_extension();
    let images: Vec<ConformalMap> = qder
        .basis_tuples()
        .unwrap()
        .iter()
        .map(|t| quasi_embed(&vir, &t[0], &t[1]).unwrap())
        .collect();
    let span = span_of_maps("embed", &ext, bounds, &images).unwrap();
    assert_eq!(span.dimension(), qder.dimension(), "images must stay independent");

    // partner ambiguity: adding any bracket-annihilating map to the
    // partner leaves the embedding unchanged
    let solvable = fixture("solvable_d1").unwrap();
    let bounds = DegreeBound::new(2, 2);
    let qder = solve_space(&DerivationKind::Quasi, &solvable, bounds);
    let annihilators = solve_space(&abg_i(1, 0, 0), &solvable, bounds);
    assert!(annihilators.dimension() > 0, "fixture should admit partner ambiguity");
    for tuple in qder.basis_tuples().unwrap() {
        let base = quasi_embed(&solvable, &tuple[0], &tuple[1]).unwrap();
        for k in annihilators.basis_tuples().unwrap() {
            let other = tuple[1].add(&k[0]).unwrap();
            assert!(qder.contains_tuple(&[tuple[0].clone(), other.clone()]).unwrap());
            let img = quasi_embed(&solvable, &tuple[0], &other).unwrap();
            assert_eq!(img, base, "embedding depends on the choice of partner");
        }
    }
}

#[test]
fn embedded_quasiderivations_become_derivations() {
    for name in ["vir", "solvable_d1", "cur_sl2"] {
        let alg = fixture(name).unwrap();
        let bounds = DegreeBound::new(2, 1);
        let ext = alg.truncated_extension();
        let qder = solve_space(&DerivationKind::Quasi, &alg, bounds);
        for tuple in qder.basis_tuples().unwrap() {
            let img = quasi_embed(&alg, &tuple[0], &tuple[1]).unwrap();
            let res = residual(&DerivationKind::Conformal, &[img], &ext).unwrap();
            assert!(res.is_zero(), "{name}: embedded map fails the derivation identity");
        }
    }
}

#[test]
fn extension_derivations_split_into_embedded_and_central_parts() {
    let vir = fixture("vir").unwrap();
    let ext = vir.truncated_extension();
    let bounds = DegreeBound::new(2, 2);
    let qder = solve_space(&DerivationKind::Quasi, &vir, bounds);
    let images: Vec<ConformalMap> = qder
        .basis_tuples()
        .unwrap()
        .iter()
        .map(|t| quasi_embed(&vir, &t[0], &t[1]).unwrap())
        .collect();
    let embed_span = span_of_maps("embed", &ext, bounds, &images).unwrap();
    let zder = solve_space(&DerivationKind::Central, &ext, bounds);
    let cder = solve_space(&DerivationKind::Conformal, &ext, bounds);
    assert!(embed_span.sum(&zder).unwrap().same_space(&cder));
    assert!(embed_span.intersect(&zder).unwrap().is_zero_space());
}

#[test]
fn first_order_family_dimension_pattern_on_vir() {
    // the solutions are a0(lam) + a1(lam) del with the bracket partner
    // raising a1's lam-degree by one, so each bound (D, L) with D, L >= 1
    // yields (L + 1) + L tuples; the grid oracle agrees throughout
    let vir = fixture("vir").unwrap();
    for (d, l) in [(1u16, 1u16), (2, 1), (3, 2), (4, 3), (5, 4)] {
        let bounds = DegreeBound::new(d, l);
        let gder = solve_space(&DerivationKind::Generalized, &vir, bounds);
        assert_eq!(
            gder.dimension(),
            (2 * l + 1) as usize,
            "unexpected dimension at ({d},{l})"
        );
        assert_eq!(gder.dimension(), gder.project(0).unwrap().dimension());
        let qder = solve_space(&DerivationKind::Quasi, &vir, bounds);
        assert_eq!(qder.dimension(), gder.dimension());
        if d <= 3 {
            assert!(lcas_core::solver::oracle_check(&DerivationKind::Quasi, &vir, bounds));
        }
    }
}

#[test]
fn central_derivations_bracket_back_into_themselves() {
    // on an algebra with nonzero center, brackets of central and
    // generalized derivations stay central (checked at raised bounds)
    let ext = fixture("vir").unwrap().truncated_extension();
    let bounds = DegreeBound::new(1, 1);
    let zder = solve_space(&DerivationKind::Central, &ext, bounds);
    let gder = solve_space(&DerivationKind::Generalized, &ext, bounds);
    assert!(zder.dimension() > 0);
    let raised = DegreeBound::new(2, 2);
    let zder_raised = solve_space(&DerivationKind::Central, &ext, raised);
    for z in zder.basis_tuples().unwrap() {
        for g in gder.basis_tuples().unwrap() {
            for coeff in z[0].gc_bracket(&g[0]).unwrap().extract_lam_coeffs() {
                assert!(zder_raised.contains_tuple(&[coeff]).unwrap());
            }
        }
    }
}

#[test]
fn space_ops_edge_cases() {
    let vir = fixture("vir").unwrap();
    let b = DegreeBound::new(2, 2);
    let cder = solve_space(&DerivationKind::Conformal, &vir, b);
    let zero = ConformalMap::zero(&vir);
    assert!(cder.contains_tuple(&[zero]).unwrap());

    // out-of-bounds maps are simply not members
    let big = ConformalMap::new(&vir, vec![vec![Poly::var(Var::Del).pow(5)]]).unwrap();
    assert!(!cder.contains_tuple(&[big]).unwrap());

    // mismatched layouts are an error
    let other = solve_space(&DerivationKind::Conformal, &vir, DegreeBound::new(1, 1));
    assert!(cder.intersect(&other).is_err());

    let qder = solve_space(&DerivationKind::Quasi, &vir, b);
    assert!(qder.project(2).is_err());
    assert!(qder.project(1).is_ok());

    let _unused: Option<SolutionSpace> = None;
}
