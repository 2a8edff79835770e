use std::path::PathBuf;

use hypcompact_core::actions::CompactifiedAction;
use hypcompact_core::diagnostics::{
    classify_smoothness, conjugacy_exponent, endpoints_under, flatness_order,
    transversality_check, ActionModel, Geodesic, GridSpec, SmoothnessProbe, SmoothnessVerdict,
};
use hypcompact_core::fields::{pullback_field, pullback_field_numeric};
use hypcompact_core::lorentz::generator;
use hypcompact_core::sampling::Sampler;
use hypcompact_core::symbolic::parse_field;
use hypcompact_core::{Error, GeneratorKind, GroupElement, Model, ModelPoint};
use serde_json::json;

use crate::config::RunConfig;
use crate::report::{cell, Report, Table};
use crate::CliError;

/// `max|a − b| / max(1, |b|∞)`; infinity matches only infinity.
fn rel_err(a: &ModelPoint, b: &ModelPoint) -> f64 {
    match (a.finite(), b.finite()) {
        (None, None) => 0.0,
        (Some(x), Some(y)) => rel_vec_err(x, y),
        _ => f64::INFINITY,
    }
}

fn rel_vec_err(x: &[f64], y: &[f64]) -> f64 {
    let scale = y.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    x.iter().zip(y).fold(0.0f64, |m, (p, q)| m.max((p - q).abs())) / scale
}

fn boundary_gap(p: &ModelPoint) -> f64 {
    let Some(c) = p.finite() else { return 0.0 };
    if p.model().is_chart() {
        c[c.len() - 1].abs()
    } else {
        (c.iter().map(|x| x * x).sum::<f64>().sqrt() - 1.0).abs()
    }
}

struct AxiomStats {
    composition: f64,
    identity: f64,
    boundary: f64,
    errors: Vec<String>,
}

fn action_axioms(action: &CompactifiedAction, s: &mut Sampler, samples: usize, boundary: bool) -> AxiomStats {
    let n = s.n();
    let id = GroupElement::identity(n);
    let mut st = AxiomStats {
        composition: 0.0,
        identity: 0.0,
        boundary: 0.0,
        errors: Vec::new(),
    };
    for _ in 0..samples {
        let x = if action.model().is_chart() {
            s.chart_point(action.model(), boundary)
        } else {
            s.ball_model_point(action.model(), boundary)
        };
        let g = s.group_element();
        let h = s.group_element();
        let run = || -> Result<(f64, f64, f64), Error> {
            let lhs = action.act(&g, &action.act(&h, &x)?)?;
            let rhs = action.act(&g.compose(&h), &x)?;
            let e_id = rel_err(&action.act(&id, &x)?, &x);
            let gap = if boundary { boundary_gap(&rhs) } else { 0.0 };
            Ok((rel_err(&lhs, &rhs), e_id, gap))
        };
        match run() {
            Ok((c, i, b)) => {
                st.composition = st.composition.max(c);
                st.identity = st.identity.max(i);
                st.boundary = st.boundary.max(b);
            }
            Err(e) => st.errors.push(e.to_string()),
        }
    }
    st
}

pub fn check_action(cfg: &RunConfig, samples: usize) -> Result<Report, CliError> {
    let f = cfg.map();
    let actions = [
        ("proj", CompactifiedAction::proj()),
        ("conf", CompactifiedAction::conf()),
        ("reparam", CompactifiedAction::reparam(f.clone())),
    ];
    let tol_action = cfg.tol.get("action");
    let tol_boundary = cfg.tol.get("boundary");
    let mut s = Sampler::new(cfg.n, cfg.seed);
    let mut table = Table::new(&[
        "action", "points", "samples", "composition_err", "identity_err", "boundary_err", "pass",
    ]);
    let mut suites = Vec::new();
    let mut summary = Vec::new();
    let mut pass = true;
    for (name, action) in &actions {
        for boundary in [false, true] {
            let st = action_axioms(action, &mut s, samples, boundary);
            let ok = st.errors.is_empty()
                && st.composition < tol_action
                && st.identity < tol_action
                && st.boundary < tol_boundary;
            pass &= ok;
            let points = if boundary { "boundary" } else { "interior" };
            table.push([
                name.to_string(),
                points.to_string(),
                samples.to_string(),
                st.composition.to_string(),
                st.identity.to_string(),
                st.boundary.to_string(),
                ok.to_string(),
            ]);
            summary.push(format!(
                "{name} {points}: composition {:.2e}, identity {:.2e}, boundary {:.2e} -> {}",
                st.composition,
                st.identity,
                st.boundary,
                if ok { "ok" } else { "VIOLATION" }
            ));
            suites.push(json!({
                "action": name,
                "points": points,
                "samples": samples,
                "composition_err": st.composition,
                "identity_err": st.identity,
                "boundary_err": st.boundary,
                "errors": st.errors,
                "pass": ok,
            }));
        }
    }

    // Pulled-back generator fields at the boundary exist only when f/f′ is smooth.
    let smooth = classify_smoothness(
        &SmoothnessProbe::ratio_of(&f),
        5,
        &GridSpec::default(),
        &cfg.tol,
    )
    .map_err(CliError::failure)?;
    let mut singular = Vec::new();
    for kind in GeneratorKind::basis(cfg.n) {
        let x = generator(kind, cfg.n).map_err(CliError::failure)?;
        let q = s.chart_point(Model::ChartKC, true);
        if let Err(e) = pullback_field(&f, &x, &q) {
            singular.push(format!("{kind}: {e}"));
        }
    }
    let flagged = matches!(smooth.verdict, SmoothnessVerdict::DivergesAtOrder(_)) || !singular.is_empty();
    summary.push(format!(
        "boundary fields for {f}: {} (f/f' verdict {:?})",
        if flagged { "FLAGGED" } else { "ok" },
        smooth.verdict
    ));
    Ok(Report {
        command: "check-action",
        pass,
        result: json!({
            "suites": suites,
            "boundary_fields": {
                "status": if flagged { "flagged" } else { "ok" },
                "ratio_verdict": smooth.verdict,
                "evidence_decades": smooth.evidence_decades,
                "singular": singular,
            },
        }),
        table,
        summary,
    })
}

pub fn smoothness(cfg: &RunConfig, k_max: usize) -> Result<Report, CliError> {
    let f = cfg.map();
    let probe = SmoothnessProbe::ratio_of(&f);
    let smooth = classify_smoothness(&probe, k_max, &GridSpec::default(), &cfg.tol)
        .map_err(CliError::failure)?;
    let flat = flatness_order(&f, k_max, &cfg.tol).map_err(CliError::failure)?;
    let mut table = Table::new(&["order", "level", "y", "estimate"]);
    for ev in &smooth.evidence {
        for (j, (y, e)) in smooth.grid.iter().zip(&ev.estimates).enumerate() {
            table.push([ev.order.to_string(), (j + 1).to_string(), y.to_string(), e.to_string()]);
        }
    }
    let summary = vec![
        format!("f/f' of {f}: {:?} ({:.1} decades of evidence)", smooth.verdict, smooth.evidence_decades),
        format!("flatness of {f}: {:?}", flat.verdict),
    ];
    Ok(Report {
        command: "smoothness",
        pass: true,
        result: json!({ "smoothness": smooth, "flatness": flat }),
        table,
        summary,
    })
}

pub fn holder(cfg: &RunConfig, from: ActionModel, to: ActionModel, pairs: usize) -> Result<Report, CliError> {
    let sample = Sampler::new(cfg.n, cfg.seed).boundary_pairs(pairs);
    let fit = conjugacy_exponent(from, to, &sample).map_err(CliError::failure)?;
    let mut table = Table::new(&["u", "v"]);
    for (u, v) in &sample {
        table.push([cell(u), cell(v)]);
    }
    let summary = vec![format!(
        "{from:?} -> {to:?}: exponent {:.4} (forward {:.4}, inverse {:.4}, residual {:.3})",
        fit.exponent, fit.forward.exponent, fit.inverse.exponent, fit.residual
    )];
    Ok(Report {
        command: "holder",
        pass: true,
        result: serde_json::to_value(&fit).map_err(CliError::failure)?,
        table,
        summary,
    })
}

pub fn geodesic(cfg: &RunConfig, random: usize, a: Option<Vec<f64>>, b: Option<Vec<f64>>) -> Result<Report, CliError> {
    let f = cfg.map();
    let geodesics = match (a, b) {
        (Some(a), Some(b)) => {
            if a.len() != cfg.n || b.len() != cfg.n {
                return Err(CliError::Usage(format!("--a and --b need {} coordinates", cfg.n)));
            }
            vec![Geodesic::new(a, b).map_err(|e| CliError::Usage(e.to_string()))?]
        }
        (None, None) => {
            let mut s = Sampler::new(cfg.n, cfg.seed);
            (0..random).map(|_| s.geodesic()).collect()
        }
        _ => return Err(CliError::Usage("--a and --b go together".into())),
    };
    let mut table = Table::new(&["index", "end", "limit", "steps", "cauchy", "converged"]);
    let mut runs = Vec::new();
    let mut converged = 0;
    let mut pass = true;
    for (i, l) in geodesics.iter().enumerate() {
        let r = endpoints_under(&f, l, &cfg.tol).map_err(CliError::failure)?;
        let t = transversality_check(&f, l, &cfg.tol).map_err(CliError::failure)?;
        let ok = r.converged() && r.distinct;
        pass &= ok;
        converged += usize::from(ok);
        for (end, ev) in [("start", &r.start), ("end", &r.end)] {
            let limit = ev.limit.finite().map_or("inf".to_string(), cell);
            table.push([
                i.to_string(),
                end.to_string(),
                limit,
                ev.steps.to_string(),
                ev.cauchy.to_string(),
                ev.converged.to_string(),
            ]);
        }
        runs.push(json!({ "geodesic": l, "endpoints": r, "transversality": t }));
    }
    let summary = vec![format!(
        "{converged} of {} geodesics have two distinct convergent endpoints under {f}",
        geodesics.len()
    )];
    Ok(Report {
        command: "geodesic",
        pass,
        result: json!({ "runs": runs }),
        table,
        summary,
    })
}

pub fn pullback(
    cfg: &RunConfig,
    kind: GeneratorKind,
    point: Option<Vec<f64>>,
    samples: usize,
) -> Result<Report, CliError> {
    let f = cfg.map();
    let x = generator(kind, cfg.n).map_err(|e| CliError::Usage(e.to_string()))?;
    let points = match point {
        Some(c) => {
            if c.len() != cfg.n {
                return Err(CliError::Usage(format!("--point needs {} coordinates", cfg.n)));
            }
            vec![ModelPoint::new(Model::ChartKC, c).map_err(|e| CliError::Usage(e.to_string()))?]
        }
        None => {
            let mut s = Sampler::new(cfg.n, cfg.seed);
            (0..samples).map(|_| s.chart_point(Model::ChartKC, false)).collect()
        }
    };
    let tol = cfg.tol.get("field");
    let mut table = Table::new(&["point", "closed_form", "numeric", "error"]);
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    let mut pass = true;
    for q in &points {
        let c = q.finite().expect("finite chart point");
        let exact = pullback_field(&f, &x, q);
        let numeric = pullback_field_numeric(&f, &x, q);
        let err = match (&exact, &numeric) {
            (Ok(a), Ok(b)) => Some(rel_vec_err(b, a)),
            _ => None,
        };
        if let Some(e) = err {
            worst = worst.max(e);
            pass &= e < tol;
        }
        let show = |r: &Result<Vec<f64>, Error>| r.as_ref().map_or_else(|e| e.to_string(), |v| cell(v));
        table.push([
            cell(c),
            show(&exact),
            show(&numeric),
            err.map_or(String::new(), |e| e.to_string()),
        ]);
        rows.push(json!({
            "point": c,
            "closed_form": exact.as_ref().map_err(|e| e.to_string()).ok(),
            "numeric": numeric.as_ref().map_err(|e| e.to_string()).ok(),
            "error": err,
            "failure": exact.err().map(|e| e.to_string()),
        }));
    }
    let summary = vec![format!(
        "pullback of {kind} by {f} at {} points: max closed-form vs numeric discrepancy {worst:.2e}",
        points.len()
    )];
    Ok(Report {
        command: "pullback",
        pass,
        result: json!({ "generator": kind.to_string(), "rows": rows, "max_error": worst }),
        table,
        summary,
    })
}

pub fn symbolic(cfg: &RunConfig, field: Option<String>, file: Option<PathBuf>, p: i64) -> Result<Report, CliError> {
    let text = match (field, file) {
        (Some(t), None) => t,
        (None, Some(path)) => std::fs::read_to_string(&path)
            .map_err(|e| CliError::Failure(format!("{}: {e}", path.display())))?,
        _ => return Err(CliError::Usage("give exactly one of --field and --file".into())),
    };
    if p < 1 {
        return Err(CliError::Usage(format!("--p must be positive, got {p}")));
    }
    let x = parse_field(text.trim(), cfg.n).map_err(|e| CliError::Usage(e.to_string()))?;
    let pulled = x.pullback_monomial(p).map_err(CliError::failure)?;
    let culprit = pulled.first_non_analytic().map(|t| t.monomial_string(cfg.n));
    let mut table = Table::new(&["component", "coeff", "a", "b"]);
    for t in pulled.terms() {
        let a: Vec<String> = t.a.iter().map(|e| e.to_string()).collect();
        table.push([t.component.to_string(), t.coeff.to_string(), a.join(";"), t.b.to_string()]);
    }
    let mut summary = vec![
        format!("field: {x}"),
        format!("pullback (p={p}): {pulled}"),
        format!("boundary-tangent: {}", x.is_boundary_tangent()),
    ];
    summary.push(match &culprit {
        Some(t) => format!("non-analytic: term {t}"),
        None => "analytic".to_string(),
    });
    Ok(Report {
        command: "symbolic",
        pass: true,
        result: json!({
            "field": x.to_json_value(),
            "field_text": x.to_string(),
            "p": p,
            "pullback": pulled.to_json_value(),
            "pullback_text": pulled.to_string(),
            "boundary_tangent": x.is_boundary_tangent(),
            "analytic": pulled.is_analytic(),
            "first_non_analytic": culprit,
        }),
        table,
        summary,
    })
}
