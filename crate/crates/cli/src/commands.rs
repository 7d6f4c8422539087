//! One function per subcommand. Each returns the report payload; input
//! problems come back as [`InputError`].

use std::path::Path;

use groupoid_moduli::algebroid::checks::SubalgebroidChart;
use groupoid_moduli::algebroid::morphism::sample_vector;
use groupoid_moduli::algebroid::{
    check_axioms, dual_poisson as dual_of, gauge_order_study, jacobi_residual, morphism_residual as residual_of,
    poisson_to_algebroid, refinement_study, sample_unit_ball, subalgebroid_check, FieldSpec,
};
use groupoid_moduli::fingroupoid::validate as validate_tables;
use groupoid_moduli::lattice::EnumerateOptions;
use groupoid_moduli::moduli::{self, ModuliSpace};
use groupoid_moduli::{FiniteGroupoid, Lattice};
use serde_json::{json, Value};

use crate::input::{self, GroupoidInput, InputError};
use crate::report::Outcome;

fn invalid(path: &Path, err: impl ToString) -> InputError {
    InputError::Invalid { path: path.to_path_buf(), message: err.to_string() }
}

fn to_value(v: impl serde::Serialize) -> Value {
    serde_json::to_value(v).expect("result types serialise to JSON")
}

fn shape(g: &FiniteGroupoid) -> Value {
    json!({ "objects": g.n_objects(), "arrows": g.n_arrows(), "leaves": g.leaves().len() })
}

pub fn validate(path: &Path) -> Result<Outcome, InputError> {
    let tables = match input::groupoid_input(path)? {
        GroupoidInput::Tables(t) => t,
        GroupoidInput::Built(g) => g.to_tables(),
    };
    let report = validate_tables(&tables).map_err(|e| invalid(path, e))?;
    let passed = report.passed();
    let summary = if passed {
        vec![format!("{} objects, {} arrows: all groupoid axioms hold", tables.objects, tables.arrows.len())]
    } else {
        report.violations.iter().take(5).map(|v| format!("violated {}: witness {:?}", v.axiom.describe(), v.witness)).collect()
    };
    let result = json!({ "objects": tables.objects, "arrows": tables.arrows.len(), "validation": to_value(&report) });
    Ok(Outcome { passed, result, summary })
}

pub fn leaves(path: &Path) -> Result<Outcome, InputError> {
    let g = input::groupoid(path)?;
    let leaves = g.leaves();
    let summary = vec![format!("{} leaves: {:?}", leaves.len(), leaves)];
    let result = json!({ "groupoid": shape(&g), "count": leaves.len(), "leaves": leaves });
    Ok(Outcome { passed: true, result, summary })
}

pub fn isotropy(path: &Path) -> Result<Outcome, InputError> {
    let g = input::groupoid(path)?;
    let leaf_index = g.leaf_index();
    let mut groups = Vec::new();
    for x in 0..g.n_objects() {
        let iso = g.isotropy_group(x).map_err(|e| invalid(path, e))?;
        groups.push(json!({ "object": x, "leaf": leaf_index[x], "order": iso.order(), "arrows": iso.arrows }));
    }
    // Conjugation from the first object of each leaf to the others, along
    // the least connecting arrow.
    let mut passed = true;
    let mut conjugations = Vec::new();
    for leaf in g.leaves() {
        let x = leaf[0];
        for &y in &leaf[1..] {
            let a = g.hom(x, y)[0];
            let iso = g.conjugate_isotropy(x, y, a).map_err(|e| invalid(path, e))?;
            let ok = iso.is_isomorphism(&g);
            passed &= ok;
            conjugations.push(json!({ "map": to_value(&iso), "is_isomorphism": ok }));
        }
    }
    let orders: Vec<usize> = groups.iter().map(|v| v["order"].as_u64().unwrap_or(0) as usize).collect();
    let summary = vec![format!("isotropy orders by object: {orders:?}")];
    let result = json!({ "groupoid": shape(&g), "isotropy": groups, "conjugations": conjugations });
    Ok(Outcome { passed, result, summary })
}

pub fn bisections(path: &Path) -> Result<Outcome, InputError> {
    let g = input::groupoid(path)?;
    let bis = g.bisections().map_err(|e| invalid(path, e))?;
    let n = bis.order();
    let as_groupoid = bis.to_groupoid(&g);
    let group_ok = validate_tables(&as_groupoid.to_tables()).map(|r| r.passed()).unwrap_or(false);
    let psi_ok = bis.psi_is_leaf_preserving_homomorphism(&g);
    let elements: Vec<Value> =
        bis.elements.iter().map(|b| json!({ "sigma": b.sigma, "psi": b.psi(&g) })).collect();
    let table: Vec<&[usize]> = bis.table.chunks(n.max(1)).collect();
    let summary = vec![format!("bisection group of order {n}; psi is a leaf-preserving homomorphism: {psi_ok}")];
    let result = json!({
        "groupoid": shape(&g),
        "order": n,
        "identity": bis.identity,
        "elements": elements,
        "table": table,
        "is_group": group_ok,
        "psi_leaf_preserving_homomorphism": psi_ok,
    });
    Ok(Outcome { passed: group_ok && psi_ok, result, summary })
}

fn moduli_summary(space: &ModuliSpace) -> Vec<String> {
    let mut lines = vec![format!("{} classes from {} representations", space.class_count(), space.rep_count())];
    for leaf in &space.leaves {
        lines.push(format!("  leaf {} {:?}: {} classes", leaf.leaf, leaf.objects, leaf.class_count));
    }
    lines
}

fn moduli_result(g: &FiniteGroupoid, space: &ModuliSpace) -> Value {
    json!({ "groupoid": shape(g), "class_count": space.class_count(), "rep_count": space.rep_count(), "moduli": to_value(space) })
}

pub fn moduli_closed(path: &Path, genus: usize, limit: u64) -> Result<Outcome, InputError> {
    let g = input::groupoid(path)?;
    let space = moduli::moduli_closed(&g, genus, limit).map_err(|e| invalid(path, e))?;
    Ok(Outcome { passed: true, summary: moduli_summary(&space), result: moduli_result(&g, &space) })
}

pub fn moduli_open(path: &Path, genus: usize, sub: &str, limit: u64) -> Result<Outcome, InputError> {
    let g = input::groupoid(path)?;
    let h = input::subgroupoid(&g, sub)?;
    let space = moduli::moduli_open(&g, genus, &h, limit).map_err(|e| invalid(path, e))?;
    Ok(Outcome { passed: true, summary: moduli_summary(&space), result: moduli_result(&g, &space) })
}

pub fn moduli_interval(path: &Path, sub0: &str, sub1: &str) -> Result<Outcome, InputError> {
    let g = input::groupoid(path)?;
    let h0 = input::subgroupoid(&g, sub0)?;
    let h1 = input::subgroupoid(&g, sub1)?;
    let classes = moduli::moduli_interval(&g, &h0, &h1).map_err(|e| invalid(path, e))?;
    let summary = vec![format!("{} double cosets", classes.len())];
    let result = json!({ "groupoid": shape(&g), "class_count": classes.len(), "classes": to_value(&classes) });
    Ok(Outcome { passed: true, result, summary })
}

pub fn lattice_enumerate(
    groupoid: &Path,
    surface: &Path,
    sub: Option<&str>,
    gauge_fixed: bool,
    limit: u64,
) -> Result<Outcome, InputError> {
    let g = input::groupoid(groupoid)?;
    let c = input::surface(surface)?;
    let h = sub.map(|s| input::subgroupoid(&g, s)).transpose()?;
    let lattice = Lattice::new(&c, &g, h).map_err(|e| invalid(surface, e))?;
    let fields = lattice
        .enumerate_flat(&EnumerateOptions { gauge_fixed, limit })
        .map_err(|e| invalid(surface, e))?;
    let surface_info = json!({
        "kind": to_value(c.kind()),
        "vertices": c.n_vertices(),
        "edges": c.n_edges(),
        "faces": c.n_faces(),
        "euler_characteristic": c.euler_characteristic(),
    });
    let mut summary = vec![format!("{} flat fields{}", fields.len(), if gauge_fixed { " (gauge fixed)" } else { "" })];
    let mut result = json!({ "groupoid": shape(&g), "surface": surface_info, "gauge_fixed": gauge_fixed, "field_count": fields.len() });
    if gauge_fixed {
        result["fields"] = to_value(&fields);
    } else {
        let orbits = lattice.gauge_orbits(&fields);
        summary.push(format!("{} gauge orbits", orbits.len()));
        result["orbit_count"] = json!(orbits.len());
        result["orbits"] = to_value(&orbits);
    }
    Ok(Outcome { passed: true, result, summary })
}

pub fn compare(groupoid: &Path, surface: &Path, sub: Option<&str>, limit: u64) -> Result<Outcome, InputError> {
    let g = input::groupoid(groupoid)?;
    let c = input::surface(surface)?;
    let h = sub.map(|s| input::subgroupoid(&g, s)).transpose()?;
    let cmp = moduli::compare_lattice_vs_holonomy(&c, &g, h.as_ref(), limit).map_err(|e| invalid(surface, e))?;
    let mut summary = vec![format!(
        "lattice gauge orbits: {}, holonomy classes: {}, bijection: {}",
        cmp.lattice_orbit_count,
        cmp.holonomy_class_count,
        match (&cmp.bijection, cmp.agrees()) {
            (Some(_), true) => "verified",
            (None, true) => "not checked (no standard loops)",
            (_, false) => "failed",
        }
    )];
    summary.extend(cmp.mismatches.iter().take(5).map(|m| format!("  mismatch: {m}")));
    let result = json!({ "groupoid": shape(&g), "comparison": to_value(&cmp) });
    Ok(Outcome { passed: cmp.agrees(), result, summary })
}

pub fn algebroid_check(
    path: &Path,
    h: f64,
    tol: f64,
    points: usize,
    seed: u64,
    chart: Option<&Path>,
) -> Result<Outcome, InputError> {
    let a = input::algebroid(path, h)?;
    let samples = sample_unit_ball(a.dim_m, points, seed);
    let axioms = check_axioms(&a, &samples, h, tol);
    let mut passed = axioms.passed;
    let mut summary = vec![format!(
        "anchor residual {:.3e}, bracket residual {:.3e}, antisymmetry {:.3e} (tol {tol:e})",
        axioms.anchor_residual, axioms.bracket_residual, axioms.antisymmetry_residual
    )];
    let mut result = json!({ "dim_M": a.dim_m, "rank_E": a.rank_e, "axioms": to_value(&axioms) });
    if let Some(chart_path) = chart {
        let chart: SubalgebroidChart = input::read_json(chart_path)?;
        if chart.transverse.iter().any(|&m| m >= a.dim_m) || chart.sub_basis.iter().any(|&c| c >= a.rank_e) {
            return Err(invalid(chart_path, "chart indices out of range"));
        }
        let sub = subalgebroid_check(&a, &chart, &samples, tol);
        passed &= sub.passed;
        summary.push(format!("subalgebroid: {}", if sub.passed { "closed" } else { "not closed" }));
        result["subalgebroid"] = to_value(&sub);
    }
    Ok(Outcome { passed, result, summary })
}

pub fn poisson_check(path: &Path, h: f64, tol: f64, points: usize, seed: u64) -> Result<Outcome, InputError> {
    let p = input::poisson(path)?;
    let samples = sample_unit_ball(p.dim_m, points, seed);
    let jacobi = jacobi_residual(&p, &samples, h, tol);
    let cotangent = check_axioms(&poisson_to_algebroid(&p, h), &samples, h, tol);
    let summary = vec![
        format!("Jacobi residual {:.3e} (tol {tol:e})", jacobi.jacobi_residual),
        format!("cotangent algebroid max residual {:.3e}", cotangent.max_residual()),
    ];
    let result = json!({ "dim_M": p.dim_m, "jacobi": to_value(&jacobi), "cotangent_axioms": to_value(&cotangent) });
    Ok(Outcome { passed: jacobi.passed && cotangent.passed, result, summary })
}

pub fn dual_poisson(path: &Path, h: f64, tol: f64, points: usize, seed: u64) -> Result<Outcome, InputError> {
    let a = input::algebroid(path, h)?;
    let axioms = check_axioms(&a, &sample_unit_ball(a.dim_m, points, seed), h, tol);
    let dual = dual_of(&a);
    let jacobi = jacobi_residual(&dual, &sample_unit_ball(dual.dim_m, points, seed), h, tol);
    let summary = vec![
        format!("dual Poisson on {} dimensions: Jacobi residual {:.3e} (tol {tol:e})", dual.dim_m, jacobi.jacobi_residual),
        format!("algebroid max residual {:.3e}", axioms.max_residual()),
    ];
    let result = json!({
        "dim_M": a.dim_m,
        "rank_E": a.rank_e,
        "jacobi": to_value(&jacobi),
        "axioms": to_value(&axioms),
        "consistent": jacobi.passed == axioms.passed,
    });
    Ok(Outcome { passed: jacobi.passed, result, summary })
}

pub fn morphism_residual(
    algebroid: &Path,
    field: &Path,
    tol: f64,
    levels: Option<usize>,
    (order_min, order_max): (f64, f64),
) -> Result<Outcome, InputError> {
    let a = input::algebroid(algebroid, groupoid_moduli::algebroid::checks::DEFAULT_H)?;
    let spec = input::field(field)?;
    match levels {
        None => {
            let m = spec.build().map_err(|e| invalid(field, e))?;
            let r = residual_of(&a, &m, tol).map_err(|e| invalid(field, e))?;
            let summary = vec![format!(
                "curvature residual {:.3e}, anchor residual {:.3e} on {} interior nodes (tol {tol:e})",
                r.curvature_residual, r.anchor_residual, r.interior_nodes
            )];
            Ok(Outcome { passed: r.passed, result: json!({ "residual": to_value(&r) }), summary })
        }
        Some(levels) => {
            if !matches!(spec, FieldSpec::Analytic { .. }) {
                return Err(invalid(field, "--refine needs an analytic field"));
            }
            let study = refinement_study(&a, &spec, levels).map_err(|e| invalid(field, e))?;
            let passed = study.order >= order_min && study.order <= order_max;
            let summary = vec![
                format!("residuals {:?} at spacings {:?}", study.residuals, study.spacings),
                format!("fitted order {:.4} (accepted range [{order_min}, {order_max}])", study.order),
            ];
            Ok(Outcome { passed, result: json!({ "refinement": to_value(&study) }), summary })
        }
    }
}

pub fn gauge_order(
    algebroid: &Path,
    field: &Path,
    beta: &Path,
    epsilons: &[f64],
    (slope_min, slope_max): (f64, f64),
) -> Result<Outcome, InputError> {
    let a = input::algebroid(algebroid, groupoid_moduli::algebroid::checks::DEFAULT_H)?;
    let m = input::field(field)?.build().map_err(|e| invalid(field, e))?;
    let exprs = input::expressions(beta)?;
    let b = sample_vector(m.grid, &exprs).map_err(|e| invalid(beta, e))?;
    let study = gauge_order_study(&a, &m, &b, epsilons).map_err(|e| invalid(field, e))?;
    let passed = study.slope >= slope_min && study.slope <= slope_max;
    let summary = vec![
        format!("residual growth {:?} at epsilons {:?}", study.residual_growth, study.epsilons),
        format!("fitted slope {:.4} (accepted range [{slope_min}, {slope_max}])", study.slope),
    ];
    Ok(Outcome { passed, result: json!({ "gauge_order": to_value(&study) }), summary })
}
