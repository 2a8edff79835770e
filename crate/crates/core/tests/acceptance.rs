//! Acceptance gate. One line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p hypcompact-core --test acceptance`.

use std::time::{Duration, Instant};

use hypcompact_core::actions::{act_conf_in_chart_pc, CompactifiedAction};
use hypcompact_core::diagnostics::{
    boundary_tangency_angle, classify_smoothness, conjugacy_exponent, endpoints_under,
    flatness_order, ActionModel, FlatnessVerdict, GridSpec, SmoothnessProbe, SmoothnessVerdict,
};
use hypcompact_core::fields::{proj_field, proj_field_numeric, pullback_field, pullback_field_numeric};
use hypcompact_core::lorentz::{generator, GeneratorKind};
use hypcompact_core::models::{FlatExample, ReparamMap};
use hypcompact_core::sampling::Sampler;
use hypcompact_core::symbolic::PolyVectorField;
use hypcompact_core::{GroupElement, Model, ModelPoint, Tolerances};
use num_rational::Rational64;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// `max|a − b| / max(1, |b|∞)`, with infinity equal only to itself.
fn rel_err(a: &ModelPoint, b: &ModelPoint) -> f64 {
    match (a.finite(), b.finite()) {
        (None, None) => 0.0,
        (Some(x), Some(y)) => {
            let scale = y.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            let d = x.iter().zip(y).fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
            d / scale
        }
        _ => f64::INFINITY,
    }
}

fn vec_rel_err(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    a.iter().zip(b).fold(0.0f64, |m, (p, q)| m.max((p - q).abs())) / scale
}

fn boundary_gap(p: &ModelPoint) -> f64 {
    let Some(c) = p.finite() else { return 0.0 };
    if p.model().is_chart() {
        c[c.len() - 1].abs()
    } else {
        (c.iter().map(|x| x * x).sum::<f64>().sqrt() - 1.0).abs()
    }
}

fn sample_point(s: &mut Sampler, model: Model, boundary: bool) -> ModelPoint {
    if model.is_chart() {
        s.chart_point(model, boundary)
    } else {
        s.ball_model_point(model, boundary)
    }
}

fn action_axioms() -> Outcome {
    let start = Instant::now();
    let kinds = [
        CompactifiedAction::proj(),
        CompactifiedAction::conf(),
        CompactifiedAction::reparam(ReparamMap::monomial(1).unwrap()),
        CompactifiedAction::reparam(ReparamMap::monomial(2).unwrap()),
        CompactifiedAction::reparam(ReparamMap::monomial(3).unwrap()),
        CompactifiedAction::reparam(ReparamMap::flat(FlatExample::F1)),
    ];
    let mut worst_comp = 0.0f64;
    let mut worst_id = 0.0f64;
    let mut worst_bd = 0.0f64;
    let mut failures = 0usize;
    for n in [2, 3, 4] {
        for (ki, action) in kinds.iter().enumerate() {
            let mut s = Sampler::new(n, 1000 + 10 * n as u64 + ki as u64);
            let id = GroupElement::identity(n);
            for i in 0..1000 {
                let boundary = i % 10 == 0;
                let x = sample_point(&mut s, action.model(), boundary);
                let g = s.group_element();
                let h = s.group_element();
                let res = (|| -> hypcompact_core::Result<(f64, f64, f64)> {
                    let lhs = action.act(&g, &action.act(&h, &x)?)?;
                    let rhs = action.act(&g.compose(&h), &x)?;
                    let e_id = rel_err(&action.act(&id, &x)?, &x);
                    let bd = if boundary { boundary_gap(&rhs) } else { 0.0 };
                    Ok((rel_err(&lhs, &rhs), e_id, bd))
                })();
                match res {
                    Ok((c, e, b)) => {
                        worst_comp = worst_comp.max(c);
                        worst_id = worst_id.max(e);
                        worst_bd = worst_bd.max(b);
                    }
                    Err(_) => failures += 1,
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = failures == 0
        && worst_comp < 1e-9
        && worst_id < 1e-9
        && worst_bd < 1e-10
        && elapsed < Duration::from_secs(30);
    outcome(
        pass,
        format!(
            "composition {worst_comp:.2e}, identity {worst_id:.2e}, boundary {worst_bd:.2e}, errors {failures}, {:.1}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn p2_is_conf() -> Outcome {
    let f = ReparamMap::monomial(2).unwrap();
    let act = CompactifiedAction::reparam(f);
    let mut worst = 0.0f64;
    let mut failures = 0;
    let mut boundary_count = 0;
    for n in [2, 3, 4] {
        let mut s = Sampler::new(n, 2000 + n as u64);
        let count = if n == 3 { 334 } else { 333 };
        for i in 0..count {
            let boundary = boundary_count < 100 && i % 3 == 0;
            if boundary {
                boundary_count += 1;
            }
            let q = s.chart_point(Model::ChartKC, boundary);
            let g = s.group_element();
            let pc = ModelPoint::new(Model::ChartPC, q.finite().unwrap().to_vec()).unwrap();
            match (act.act(&g, &q), act_conf_in_chart_pc(&g, &pc)) {
                (Ok(a), Ok(b)) => {
                    let a = match a.finite() {
                        Some(c) => ModelPoint::new(Model::ChartPC, c.to_vec()).unwrap(),
                        None => ModelPoint::infinity(Model::ChartPC, n).unwrap(),
                    };
                    worst = worst.max(rel_err(&a, &b));
                }
                _ => failures += 1,
            }
        }
    }
    outcome(
        worst < 1e-9 && failures == 0 && boundary_count == 100,
        format!("max error {worst:.2e} on 1000 points ({boundary_count} boundary), errors {failures}"),
    )
}

fn displayed_fields() -> Outcome {
    let mut worst_proj = 0.0f64;
    let mut worst_pull = 0.0f64;
    let mut failures = 0;
    let maps = [
        ReparamMap::monomial(2).unwrap(),
        ReparamMap::monomial(3).unwrap(),
        ReparamMap::flat(FlatExample::F1),
        ReparamMap::flat(FlatExample::F2),
    ];
    let n = 3;
    let h = generator(GeneratorKind::H, n).unwrap();
    let y1 = generator(GeneratorKind::Y(1), n).unwrap();
    let mut s = Sampler::new(n, 3000);
    for i in 0..500 {
        let q = s.chart_point(Model::ChartKC, false);
        let c = q.finite().unwrap().to_vec();
        let (x1, x2, y) = (c[0], c[1], c[2]);
        // displayed closed forms
        let disp_h = [2.0 * x1, 2.0 * x2, 4.0 * y];
        let disp_y1 = [y + x2 * x2 - x1 * x1, -2.0 * x1 * x2, -4.0 * x1 * y];
        for (gen, disp) in [(&h, &disp_h), (&y1, &disp_y1)] {
            match (proj_field(gen, &q), proj_field_numeric(gen, &q)) {
                (Ok(a), Ok(b)) => {
                    worst_proj = worst_proj.max(vec_rel_err(&a, disp)).max(vec_rel_err(&b, disp));
                }
                _ => failures += 1,
            }
        }
        let f = &maps[i % maps.len()];
        let (fy, r) = (f.eval(y), f.ratio(y));
        let tilde_h = [2.0 * x1, 2.0 * x2, 4.0 * r];
        let tilde_y1 = [fy + x2 * x2 - x1 * x1, -2.0 * x1 * x2, -4.0 * x1 * r];
        for (gen, disp) in [(&h, &tilde_h), (&y1, &tilde_y1)] {
            match (pullback_field(f, gen, &q), pullback_field_numeric(f, gen, &q)) {
                (Ok(a), Ok(b)) => {
                    worst_pull = worst_pull.max(vec_rel_err(&a, disp)).max(vec_rel_err(&b, disp));
                }
                _ => failures += 1,
            }
        }
    }
    outcome(
        worst_proj < 1e-7 && worst_pull < 1e-7 && failures == 0,
        format!("proj {worst_proj:.2e}, pullback {worst_pull:.2e} over 500 points, errors {failures}"),
    )
}

fn condition_separation() -> Outcome {
    let start = Instant::now();
    let tol = Tolerances::default();
    let grid = GridSpec::default();
    let mut cases: Vec<(ReparamMap, SmoothnessVerdict)> = (1..=5)
        .map(|p| (ReparamMap::monomial(p).unwrap(), SmoothnessVerdict::SmoothUpTo(5)))
        .collect();
    cases.push((ReparamMap::flat(FlatExample::F1), SmoothnessVerdict::SmoothUpTo(5)));
    cases.push((ReparamMap::flat(FlatExample::F2), SmoothnessVerdict::DivergesAtOrder(3)));
    let mut wrong = Vec::new();
    let mut weakest = f64::INFINITY;
    for (f, expected) in &cases {
        match classify_smoothness(&SmoothnessProbe::ratio_of(f), 5, &grid, &tol) {
            Ok(r) => {
                weakest = weakest.min(r.evidence_decades);
                if r.verdict != *expected || r.evidence_decades < 2.0 {
                    wrong.push(format!("{f}: {:?}", r.verdict));
                }
            }
            Err(e) => wrong.push(format!("{f}: {e}")),
        }
    }
    let elapsed = start.elapsed();
    outcome(
        wrong.is_empty() && elapsed < Duration::from_secs(5),
        format!(
            "{} maps, weakest evidence {weakest:.1} decades, mismatches {wrong:?}, {:.2}s",
            cases.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn non_flat_implies_condition() -> Outcome {
    let tol = Tolerances::default();
    let grid = GridSpec::default();
    let mut counterexamples = Vec::new();
    let mut checked = 0;
    for p in 1..=5usize {
        let mut plain = vec![0.0; p + 1];
        plain[p] = 1.0;
        let mut shifted = vec![0.0; p + 2];
        shifted[p] = 1.0;
        shifted[p + 1] = 1.0;
        for coeffs in [plain, shifted] {
            let f = ReparamMap::polynomial(coeffs).unwrap();
            checked += 1;
            let flat = flatness_order(&f, 6, &tol).map(|r| r.verdict);
            let smooth = classify_smoothness(&SmoothnessProbe::ratio_of(&f), 5, &grid, &tol)
                .map(|r| r.verdict);
            let ok = matches!(flat, Ok(FlatnessVerdict::NonFlatAtOrder(k)) if k == p)
                && matches!(smooth, Ok(SmoothnessVerdict::SmoothUpTo(_)));
            if !ok {
                counterexamples.push(format!("{f}: {flat:?} / {smooth:?}"));
            }
        }
    }
    outcome(
        counterexamples.is_empty(),
        format!("{checked} maps, counterexamples {counterexamples:?}"),
    )
}

fn holder_half() -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    for n in [2, 3] {
        let pairs = Sampler::new(n, 6000 + n as u64).boundary_pairs(400);
        for (from, to) in [
            (ActionModel::Proj, ActionModel::Conf),
            (ActionModel::Conf, ActionModel::Proj),
        ] {
            match conjugacy_exponent(from, to, &pairs) {
                Ok(r) => {
                    pass &= (r.exponent - 0.5).abs() <= 0.05 && r.residual < 0.1;
                    lines.push(format!("n={n} {from:?}->{to:?} {:.4} (res {:.3})", r.exponent, r.residual));
                }
                Err(e) => {
                    pass = false;
                    lines.push(format!("n={n}: {e}"));
                }
            }
        }
    }
    outcome(pass, lines.join(", "))
}

fn monomial_family(n: usize) -> Vec<PolyVectorField> {
    let mut exps = Vec::new();
    for a1 in 0..=2u32 {
        for a2 in 0..=2u32 - a1 {
            exps.push(vec![a1, a2]);
        }
    }
    let mut out = Vec::new();
    for component in 1..=n {
        for a in &exps {
            for b in 0..=2i64 {
                let mut f = PolyVectorField::zero(n).unwrap();
                f.add_term(component, Rational64::from_integer(1), a.clone(), Rational64::from_integer(b))
                    .unwrap();
                out.push(f);
            }
        }
    }
    out
}

fn anal_prolong() -> Outcome {
    let n = 3;
    let family = monomial_family(n);
    let mut mismatches = 0;
    let mut law_errors = 0;
    let mut worst_eval = 0.0f64;
    let mut s = Sampler::new(n, 7000);
    let points: Vec<Vec<f64>> = (0..5)
        .map(|_| {
            let q = s.chart_point(Model::ChartKC, false);
            let mut c = q.finite().unwrap().to_vec();
            c[n - 1] = c[n - 1].max(0.05);
            c
        })
        .collect();
    // sums of three members exercise the equivalence beyond single terms
    let mut fields: Vec<PolyVectorField> = family.clone();
    for _ in 0..200 {
        let pick = |s: &mut Sampler| family[(s.uniform(0.0, family.len() as f64) as usize).min(family.len() - 1)].clone();
        let sum = pick(&mut s).add(&pick(&mut s)).unwrap().add(&pick(&mut s)).unwrap();
        fields.push(sum);
    }
    for field in &fields {
        for p in [2i64, 3, 4] {
            let pulled = field.pullback_monomial(p).unwrap();
            if pulled.is_analytic() != field.is_boundary_tangent() {
                mismatches += 1;
            }
            // exponent and coefficient law, term by term
            let mut expected = PolyVectorField::zero(n).unwrap();
            for t in field.terms() {
                let pr = Rational64::from_integer(p);
                let (coeff, b) = if t.component == n {
                    (t.coeff / pr, pr * t.b + Rational64::from_integer(1) - pr)
                } else {
                    (t.coeff, pr * t.b)
                };
                expected.add_term(t.component, coeff, t.a.clone(), b).unwrap();
            }
            if expected != pulled {
                law_errors += 1;
            }
            for q in &points {
                let y = q[n - 1];
                let mut image = q.clone();
                image[n - 1] = y.powi(p as i32);
                let raw = field.evaluate(&image).unwrap();
                let mut numeric = raw.clone();
                numeric[n - 1] = raw[n - 1] / (p as f64 * y.powi(p as i32 - 1));
                let exact = pulled.evaluate(q).unwrap();
                worst_eval = worst_eval.max(vec_rel_err(&exact, &numeric));
            }
        }
    }
    outcome(
        mismatches == 0 && law_errors == 0 && worst_eval < 1e-10,
        format!(
            "{} fields x 3 powers, equivalence mismatches {mismatches}, law errors {law_errors}, eval {worst_eval:.2e}",
            fields.len()
        ),
    )
}

fn tangency_dichotomy() -> Outcome {
    let mut s = Sampler::new(3, 8000);
    let mut max_conf = 0.0f64;
    let mut min_proj = f64::INFINITY;
    let mut failures = 0;
    for _ in 0..50 {
        let (g1, g2) = s.asymptotic_pair();
        match (
            boundary_tangency_angle(ActionModel::Conf, &g1, &g2),
            boundary_tangency_angle(ActionModel::Proj, &g1, &g2),
        ) {
            (Ok(c), Ok(p)) => {
                max_conf = max_conf.max(c.angle);
                min_proj = min_proj.min(p.angle);
            }
            _ => failures += 1,
        }
    }
    outcome(
        max_conf < 1e-3 && min_proj > 1e-2 && failures == 0,
        format!("50 pairs, max conf {max_conf:.2e} rad, min proj {min_proj:.3} rad, errors {failures}"),
    )
}

fn endpoints() -> Outcome {
    let tol = Tolerances::default();
    let maps = [
        ReparamMap::monomial(1).unwrap(),
        ReparamMap::monomial(2).unwrap(),
        ReparamMap::monomial(3).unwrap(),
        ReparamMap::flat(FlatExample::F1),
    ];
    let mut s = Sampler::new(3, 9000);
    let geodesics: Vec<_> = (0..100).map(|_| s.geodesic()).collect();
    let mut bad = 0;
    let mut worst = 0.0f64;
    let mut most_steps = 0;
    for f in &maps {
        for l in &geodesics {
            match endpoints_under(f, l, &tol) {
                Ok(r) => {
                    worst = worst.max(r.start.cauchy).max(r.end.cauchy);
                    most_steps = most_steps.max(r.start.steps).max(r.end.steps);
                    if !(r.converged() && r.distinct) {
                        bad += 1;
                    }
                }
                Err(_) => bad += 1,
            }
        }
    }
    outcome(
        bad == 0 && worst < 1e-6,
        format!("400 runs, failures {bad}, worst Cauchy {worst:.2e}, most steps {most_steps}"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 action axioms", action_axioms),
        ("2 p=2 reparam equals conf", p2_is_conf),
        ("3 displayed field formulas", displayed_fields),
        ("4 condition separation f1/f2", condition_separation),
        ("5 non-flat implies condition", non_flat_implies_condition),
        ("6 Hölder-1/2 conjugacy", holder_half),
        ("7 monomial pullback analyticity", anal_prolong),
        ("8 tangency dichotomy", tangency_dichotomy),
        ("9 geodesic endpoints", endpoints),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let o = run();
        println!("{} criterion {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
