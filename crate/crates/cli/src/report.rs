//! Deterministic text and JSON rendering of axiom reports, solution
//! spaces, and module-theory results.

use lcas_core::lca::{AxiomReport, LCAlgebra, SmithReport};
use lcas_core::solver::{SolutionSpace, SpaceLayout};
use serde_json::{json, Value};

use crate::expr::render_element;

pub fn axiom_report_text(alg: &LCAlgebra, report: &AxiomReport) -> String {
    let mut out = String::new();
    if report.passed() {
        out.push_str("axioms: pass\n");
        return out;
    }
    out.push_str("axioms: fail\n");
    for (i, j, residual) in &report.skew_failures {
        out.push_str(&format!(
            "skew ({}, {}): residual {}\n",
            alg.name(*i),
            alg.name(*j),
            render_element(residual, alg.names()),
        ));
    }
    for (i, j, k, residual) in &report.jacobi_failures {
        out.push_str(&format!(
            "jacobi ({}, {}, {}): residual {}\n",
            alg.name(*i),
            alg.name(*j),
            alg.name(*k),
            render_element(residual, alg.names()),
        ));
    }
    out
}

pub fn axiom_report_json(alg: &LCAlgebra, report: &AxiomReport) -> Value {
    let residuals = |v: &[lcas_core::poly::Poly]| -> Vec<String> {
        v.iter().map(|p| p.to_string()).collect()
    };
    json!({
        "passed": report.passed(),
        "skew_failures": report.skew_failures.iter().map(|(i, j, r)| json!({
            "pair": [alg.name(*i), alg.name(*j)],
            "residual": residuals(r),
        })).collect::<Vec<_>>(),
        "jacobi_failures": report.jacobi_failures.iter().map(|(i, j, k, r)| json!({
            "triple": [alg.name(*i), alg.name(*j), alg.name(*k)],
            "residual": residuals(r),
        })).collect::<Vec<_>>(),
    })
}

fn space_basis_matrices(space: &SolutionSpace) -> Vec<Vec<Vec<Vec<String>>>> {
    space
        .basis_tuples()
        .expect("map layout")
        .iter()
        .map(|tuple| {
            tuple
                .iter()
                .map(|map| {
                    map.entries()
                        .iter()
                        .map(|row| row.iter().map(|p| p.to_string()).collect())
                        .collect()
                })
                .collect()
        })
        .collect()
}

pub fn space_json(space: &SolutionSpace) -> Value {
    match space.layout() {
        SpaceLayout::Maps { arity, bounds, .. } => {
            let mut value = json!({
                "kind": space.label(),
                "bounds": {"del": bounds.max_del, "lam": bounds.max_lam},
                "dimension": space.dimension(),
                "basis": space_basis_matrices(space),
            });
            if arity > 1 {
                let proj = space.project(0).expect("slot 0 exists");
                value["projection_dimension"] = json!(proj.dimension());
            }
            value
        }
        SpaceLayout::Elements { max_del, .. } => {
            let basis: Vec<Vec<String>> = space
                .basis_elements()
                .expect("element layout")
                .iter()
                .map(|e| e.coords().iter().map(|p| p.to_string()).collect())
                .collect();
            json!({
                "kind": space.label(),
                "bounds": {"del": max_del},
                "dimension": space.dimension(),
                "basis": basis,
            })
        }
    }
}

pub fn space_text(space: &SolutionSpace, alg: &LCAlgebra) -> String {
    let mut out = String::new();
    out.push_str(&format!("kind: {}\n", space.label()));
    match space.layout() {
        SpaceLayout::Maps { arity, bounds, n } => {
            out.push_str(&format!("bounds: {bounds}\n"));
            out.push_str(&format!("dimension: {}\n", space.dimension()));
            if arity > 1 {
                let proj = space.project(0).expect("slot 0 exists");
                out.push_str(&format!("projection dimension (slot 0): {}\n", proj.dimension()));
            }
            for (b, tuple) in space.basis_tuples().expect("map layout").iter().enumerate() {
                out.push_str(&format!("basis[{b}]:\n"));
                for (s, map) in tuple.iter().enumerate() {
                    if arity > 1 {
                        out.push_str(&format!("  slot {s}:\n"));
                    }
                    let indent = if arity > 1 { "    " } else { "  " };
                    for j in 0..n {
                        let column: Vec<lcas_core::poly::Poly> =
                            (0..n).map(|i| map.entries()[i][j].clone()).collect();
                        out.push_str(&format!(
                            "{indent}D({}) = {}\n",
                            alg.name(j),
                            render_element(&column, alg.names()),
                        ));
                    }
                }
            }
        }
        SpaceLayout::Elements { max_del, .. } => {
            out.push_str(&format!("bounds: del<={max_del}\n"));
            out.push_str(&format!("dimension: {}\n", space.dimension()));
            for (b, e) in space.basis_elements().expect("element layout").iter().enumerate() {
                out.push_str(&format!(
                    "basis[{b}]: {}\n",
                    render_element(e.coords(), alg.names()),
                ));
            }
        }
    }
    out
}

pub fn derived_text(alg: &LCAlgebra, report: &SmithReport, generators: &[Vec<lcas_core::poly::Poly>]) -> String {
    let mut out = String::new();
    out.push_str(&format!("derived submodule rank: {}\n", generators.len()));
    for (k, row) in generators.iter().enumerate() {
        out.push_str(&format!("generator[{k}]: {}\n", render_element(row, alg.names())));
    }
    let factors: Vec<String> = report.invariant_factors.iter().map(|f| f.to_string()).collect();
    out.push_str(&format!("invariant factors: [{}]\n", factors.join(", ")));
    out.push_str(&format!("quotient free: {}\n", report.quotient_free));
    match &report.complement {
        None => out.push_str("complement: none\n"),
        Some(c) if c.is_zero() => out.push_str("complement: 0\n"),
        Some(c) => {
            for (k, row) in c.generator_rows().iter().enumerate() {
                out.push_str(&format!(
                    "complement[{k}]: {}\n",
                    render_element(row, alg.names()),
                ));
            }
        }
    }
    out
}

pub fn derived_json(
    alg: &LCAlgebra,
    report: &SmithReport,
    generators: &[Vec<lcas_core::poly::Poly>],
) -> Value {
    json!({
        "generators": generators.iter().map(|r| render_element(r, alg.names())).collect::<Vec<_>>(),
        "invariant_factors": report.invariant_factors.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
        "quotient_free": report.quotient_free,
        "complement": report.complement.as_ref().map(|c| {
            c.generator_rows().iter().map(|r| render_element(r, alg.names())).collect::<Vec<_>>()
        }),
    })
}
