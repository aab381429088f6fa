//! One function per subcommand. Each returns the text to print and whether
//! every check passed; errors carry their exit class.

#![allow(clippy::needless_range_loop)]

use std::fmt::Write as _;
use std::path::Path;

use ews_core::estimate::{estimate as run_estimate, EstimateReport, QuadrantVerdict};
use ews_core::geometry::{
    boundary_u, classify_subregion, point_q, points_r, quadrant, region_contains, rybczynski_pattern, segment_ab,
    vector_line, SegmentAB, SegmentKind, SignMatrix, VectorLine,
};
use ews_core::index::Factor;
use ews_core::io::{
    load_economy, load_observations_csv, load_observations_json, load_shock, read_json, write_file, ColumnMap,
    EconomyDocument, TechnologyDocument,
};
use ews_core::model::{classify_substitutes, ews_matrix, ews_ratio_vector, validate_economy_with, Economy};
use ews_core::plot::Scene;
use ews_core::production::{economy_snapshot, fd_rybczynski, solve_equilibrium, NestPolicy, SampleConstraints};
use ews_core::statics::{h_checks, lemma2_diagnostics, rybczynski_matrix, solve_linear, Shock};
use ews_core::sweep::{run_sweep, SweepConfig};
use ews_core::tol;
use serde_json::{json, Value};

use crate::{display, out_path, Cli, Failure, Format, NestChoice, Outcome};

fn finish(cli: &Cli, text: String, value: Value, passed: bool) -> Result<Outcome, Failure> {
    let stdout = match cli.format {
        Format::Text => text,
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&value).map_err(|e| Failure::Model(e.to_string()))?;
            s.push('\n');
            s
        }
    };
    Ok(Outcome { stdout, passed })
}

fn to_value<S: serde::Serialize>(v: &S) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn fmt3(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("({})", parts.join(", "))
}

fn save(path: &Path, contents: &str) -> Result<(), Failure> {
    write_file(path, contents.as_bytes()).map_err(Failure::from)
}

/// Loads an economy and refuses to go on if its structure is broken.
fn checked_economy(cli: &Cli, path: &Path) -> Result<Economy<f64>, Failure> {
    let e = load_economy(path)?;
    let report = validate_economy_with(&e, false, cli.tolerance.unwrap_or(tol::STRUCTURAL));
    if !report.is_empty() {
        return Err(Failure::Model(format!("{} is not a valid economy:\n{report}", display(path))));
    }
    Ok(e)
}

pub fn validate(cli: &Cli, path: &Path, check_ranking: bool) -> Result<Outcome, Failure> {
    let e = load_economy(path)?;
    let report = validate_economy_with(&e, check_ranking, cli.tolerance.unwrap_or(tol::STRUCTURAL));
    let text = format!("{}: {}", display(path), report);
    let value = json!({ "file": display(path), "valid": report.is_empty(), "violations": report.violations });
    finish(cli, text, value, report.is_empty())
}

pub fn ews(cli: &Cli, path: &Path) -> Result<Outcome, Failure> {
    let e = checked_economy(cli, path)?;
    let g = ews_matrix(&e);
    let identity = g.minor_identity();
    let pairs = classify_substitutes(&g);
    let point = ews_ratio_vector(&g);

    let mut text = String::from("EWS matrix g[i][h] (rows and columns T, K, L):\n");
    for (i, row) in g.g.iter().enumerate() {
        let _ = writeln!(text, "  {}  {:>12.6} {:>12.6} {:>12.6}   row sum {:.2e}", Factor::ALL[i], row[0], row[1], row[2], g.row_sum(i));
    }
    let _ = writeln!(text, "reciprocity residual: {:.2e}", g.reciprocity_residual());
    let _ = writeln!(
        text,
        "minor identity: {:.6} / {:.6} / {:.6} (max relative gap {:.2e})",
        identity.minor,
        identity.expanded,
        identity.share_form,
        identity.max_disagreement()
    );
    for p in &pairs {
        let _ = writeln!(text, "  {}{}: {:?}", p.pair.0, p.pair.1, p.label);
    }
    match &point {
        Ok(p) => {
            let _ = writeln!(text, "ratio vector (S', U') = ({:.6}, {:.6})", p.s, p.u);
        }
        Err(err) => {
            let _ = writeln!(text, "{err}");
        }
    }
    let value = json!({
        "g": g.g,
        "row_sums": [g.row_sum(0), g.row_sum(1), g.row_sum(2)],
        "reciprocity_residual": g.reciprocity_residual(),
        "minor_identity": identity,
        "pairs": pairs,
        "ratio_point": point.as_ref().ok(),
    });
    finish(cli, text, value, true)
}

pub fn classify(cli: &Cli, path: &Path) -> Result<Outcome, Failure> {
    let e = checked_economy(cli, path)?;
    let g = ews_matrix(&e);
    let point = ews_ratio_vector(&g)?;
    let inside = region_contains(&point, g.lt_sign())?;
    let quad = quadrant(&point);
    let label = classify_subregion(&point, &e);
    let pattern = rybczynski_pattern(label).ok();

    let mut text = format!("(S', U') = ({:.6}, {:.6})\nquadrant: {quad}\nsubregion: {label}\n", point.s, point.u);
    if !inside {
        text.push_str("warning: point lies outside the admissible region\n");
    }
    if let Some(m) = &pattern {
        let _ = writeln!(text, "Rybczynski signs (rows X1, X2; columns T, K, L): {m}");
    }
    let value = json!({
        "point": point,
        "in_region": inside,
        "quadrant": quad,
        "subregion": label,
        "rybczynski_pattern": pattern,
    });
    finish(cli, text, value, inside)
}

pub fn solve(cli: &Cli, economy: &Path, shock_path: &Path) -> Result<Outcome, Failure> {
    let e = checked_economy(cli, economy)?;
    let shock = load_shock(shock_path)?;
    let resp = solve_linear(&e, &shock)?;
    let h = h_checks(&e, &resp);
    let diagnostics = lemma2_diagnostics(&resp);
    let line = vector_line(&resp, &e);
    let segment = line.as_ref().map_err(Clone::clone).and_then(|l| segment_ab(l, &resp, &e));
    let point = ews_ratio_vector(&ews_matrix(&e)).ok();

    let mut text = String::new();
    let _ = writeln!(text, "w* (T, K, L) = {}", fmt3(&resp.w_star));
    let _ = writeln!(text, "X* (1, 2)    = {}", fmt3(&resp.x_star));
    let _ = writeln!(text, "a0' (T, K, L) = {}", fmt3(&resp.a0_prime));
    let _ = writeln!(text, "ranking: {}", resp.ranking);
    match resp.sign_label {
        Some(l) => {
            let _ = writeln!(text, "sign label: {l}");
        }
        None => text.push_str("sign label: none\n"),
    }
    let _ = writeln!(text, "H_1, H_2, H_0 = {:.3e}, {:.3e}, {:.3e}", h.h_sector[0], h.h_sector[1], h.h0);
    let _ = writeln!(text, "residual {:.2e}, pivot ratio {:.2e}", resp.residual, resp.pivot_ratio);
    match (&line, &segment) {
        (Ok(l), Ok(s)) => {
            let _ = writeln!(text, "vector line: U' = {:+.6} S' {:+.6}", -l.a1, l.b1);
            let _ = writeln!(
                text,
                "A = ({:.6}, {:.6}), B = ({:.6}, {:.6}), {:?}",
                s.point_a.s, s.point_a.u, s.point_b.s, s.point_b.u, s.kind
            );
            if let Some(p) = &point {
                let _ = writeln!(text, "ratio point on line: residual {:.2e}, in segment: {}", l.residual(p), s.contains(p));
            }
        }
        (Err(err), _) | (_, Err(err)) => {
            let _ = writeln!(text, "segment unavailable: {err}");
        }
    }
    let value = json!({
        "response": resp,
        "h_checks": h,
        "lemma2": diagnostics.as_ref().ok(),
        "vector_line": line.as_ref().ok(),
        "segment": segment.as_ref().ok(),
        "ratio_point": point,
    });
    finish(cli, text, value, true)
}

fn matrix_text(title: &str, m: &[[f64; 3]; 2]) -> String {
    let mut s = format!("{title} (rows X1, X2; columns V_T, V_K, V_L):\n");
    for row in m {
        let _ = writeln!(s, "  {:>12.6} {:>12.6} {:>12.6}", row[0], row[1], row[2]);
    }
    s
}

pub fn rybczynski(cli: &Cli, economy: Option<&Path>, technology: Option<&Path>, step: f64) -> Result<Outcome, Failure> {
    let (e, fd) = match (economy, technology) {
        (Some(path), _) => (checked_economy(cli, path)?, None),
        (None, Some(path)) => {
            let doc: TechnologyDocument = read_json(path)?;
            for s in &doc.sectors {
                s.check()?;
            }
            let eq = solve_equilibrium(&doc.sectors, doc.p, doc.v, doc.w0)?;
            let e = economy_snapshot(&eq, &doc.sectors);
            let fd = fd_rybczynski(&doc.sectors, doc.p, doc.v, step)?;
            (e, Some(fd))
        }
        (None, None) => return Err(Failure::Input("need an economy file or --technology".into())),
    };
    let m = rybczynski_matrix(&e)?;
    let mut text = matrix_text("linearized", &m.values);
    let _ = writeln!(text, "signs: {}", m.signs);
    let mut passed = true;
    let mut comparison = Value::Null;
    if let Some(fd) = fd {
        let rel_tol = cli.tolerance.unwrap_or(0.01);
        let mut worst = 0.0f64;
        for j in 0..2 {
            for i in 0..3 {
                let scale = m.values[j][i].abs().max(fd[j][i].abs()).max(f64::MIN_POSITIVE);
                worst = worst.max((m.values[j][i] - fd[j][i]).abs() / scale);
            }
        }
        let signs_agree = SignMatrix::from_values(&fd) == m.signs;
        passed = signs_agree && worst <= rel_tol;
        text.push_str(&matrix_text("finite differences", &fd));
        let _ = writeln!(text, "signs agree: {signs_agree}; worst relative gap {worst:.3e} (tolerance {rel_tol:.1e})");
        comparison = json!({ "finite_difference": fd, "signs_agree": signs_agree, "max_relative_gap": worst, "tolerance": rel_tol });
    }
    let value = json!({ "rybczynski": m, "comparison": comparison, "economy": EconomyDocument::from_economy(&e) });
    finish(cli, text, value, passed)
}

fn load_observations(input: &Path, columns: Option<&Path>) -> Result<Vec<ews_core::estimate::Observation<f64>>, Failure> {
    let is_csv = input.extension().is_some_and(|x| x.eq_ignore_ascii_case("csv"));
    if is_csv {
        let map: ColumnMap = match columns {
            Some(p) => read_json(p)?,
            None => ColumnMap::new(),
        };
        Ok(load_observations_csv(input, &map)?)
    } else {
        Ok(load_observations_json(input)?)
    }
}

pub fn estimate(cli: &Cli, input: &Path, columns: Option<&Path>, plot: bool) -> Result<Outcome, Failure> {
    let observations = load_observations(input, columns)?;
    if observations.is_empty() {
        return Err(Failure::Input(format!("{} holds no observations", display(input))));
    }
    let single = observations.len() == 1;
    let mut text = String::new();
    let mut values = Vec::new();
    let mut passed = true;
    for (k, obs) in observations.iter().enumerate() {
        match run_estimate(obs, cli.time_reversal) {
            Ok(report) => {
                let _ = writeln!(
                    text,
                    "#{k}: P = {:.6}{} ranking {} label {} quadrant {:?} subregion {:?}{}",
                    report.p,
                    if report.reversed { " (reversed)" } else { "" },
                    report.ranking,
                    report.sign_label.map_or("none".to_string(), |l| l.to_string()),
                    report.quadrant.verdict,
                    report.subregion.verdict,
                    if report.consistency.consistent { "" } else { " [inconsistent data]" },
                );
                if plot {
                    let name = if single { "estimate.svg".to_string() } else { format!("estimate_{k}.svg") };
                    match report_scene(&report) {
                        Ok(scene) => save(&out_path(cli, &name), &scene.to_svg())?,
                        Err(err) => {
                            let _ = writeln!(text, "#{k}: no plot: {err}");
                        }
                    }
                }
                values.push(to_value(&report));
            }
            Err(err) => {
                if single {
                    return Err(err.into());
                }
                passed = false;
                let _ = writeln!(text, "#{k}: error: {err}");
                values.push(json!({ "error": err.to_string() }));
            }
        }
    }
    let value = if single { values.pop().unwrap_or(Value::Null) } else { Value::Array(values) };
    finish(cli, text, value, passed)
}

pub fn sweep(
    cli: &Cli,
    count: usize,
    quadrant_iv: bool,
    nest: NestChoice,
    fd_oracle: bool,
    shock: Option<&Path>,
    name: &str,
) -> Result<Outcome, Failure> {
    let seed = cli.seed.ok_or_else(|| Failure::Input("sweep requires --seed".into()))?;
    let mut cfg = SweepConfig::new(seed, count);
    if quadrant_iv {
        cfg.constraints = SampleConstraints::quadrant_iv();
    }
    cfg.constraints.nest_policy = match nest {
        NestChoice::LandCapital => NestPolicy::LandCapital,
        NestChoice::Any => NestPolicy::Any,
    };
    cfg.fd_oracle = fd_oracle;
    if let Some(path) = shock {
        cfg.shock = load_shock(path)?;
    }
    if let Some(t) = cli.tolerance {
        cfg.tolerance = t;
    }
    let result = run_sweep(&cfg);
    let csv_path = out_path(cli, &format!("{name}.csv"));
    let summary_path = out_path(cli, &format!("{name}_summary.json"));
    save(&csv_path, &result.to_csv())?;
    let summary_json = serde_json::to_string_pretty(&result.summary).map_err(|e| Failure::Model(e.to_string()))?;
    save(&summary_path, &summary_json)?;

    let s = &result.summary;
    let mut text = format!("seed {} count {}\n", s.seed, s.count);
    for (title, map) in [
        ("quadrants", &s.quadrants),
        ("subregions", &s.subregions),
        ("rankings", &s.rankings),
        ("segments", &s.segment_kinds),
        ("violations", &s.violations),
    ] {
        let parts: Vec<String> = map.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(text, "{title}: {}", parts.join(" "));
    }
    let _ = writeln!(text, "wrote {} and {}", display(&csv_path), display(&summary_path));
    finish(cli, text, to_value(&result.summary), s.total_violations == 0)
}

/// Line through two points, in the U′ = −a1·S′ + b1 form.
fn line_through(a: (f64, f64), b: (f64, f64), theta_l_over_k: f64) -> Result<VectorLine<f64>, Failure> {
    if (b.0 - a.0).abs() < tol::DEGENERATE {
        return Err(Failure::Model("endpoints A and B share the same S'; the chord is vertical".into()));
    }
    let a1 = -(b.1 - a.1) / (b.0 - a.0);
    Ok(VectorLine { a1, b1: a.1 + a1 * a.0, g0: f64::NAN, theta_l_over_k })
}

fn report_scene(report: &EstimateReport<f64>) -> Result<Scene, Failure> {
    let q = &report.quadrant;
    let (Some(a), Some(b)) = (q.point_a, q.point_b) else {
        return Err(Failure::Model("the report has no endpoints A and B".into()));
    };
    let r = a.theta_l_over_k;
    let line = line_through((a.s, a.u), (b.s, b.u), r)?;
    let kind = if line.a1 > 0.0 { SegmentKind::Finite } else { SegmentKind::ThroughInfinity };
    let thresholds = report.subregion.thresholds;
    let mut scene = Scene {
        theta_l_over_k: r,
        line: Some(line),
        segment: Some(SegmentAB { point_a: a, point_b: b, kind, closed_form_gap: 0.0, discriminant: f64::NAN }),
        thresholds: Some(thresholds),
        title: Some(format!("{:?} / {:?}", q.verdict, report.subregion.verdict)),
        ..Scene::default()
    };
    if q.verdict == QuadrantVerdict::QuadrantIv {
        let on_curve = |s: f64| boundary_u(s, r).map(|u| ews_core::model::RatioPoint::new(s, u, r));
        if let (Ok(r1), Ok(r2)) = (on_curve(thresholds[0]), on_curve(thresholds[1])) {
            scene.r = Some([r1, r2]);
        }
    }
    Ok(scene)
}

fn economy_scene(e: &Economy<f64>, shock: &Shock<f64>, name: &str) -> Result<Scene, Failure> {
    let g = ews_matrix(e);
    let point = ews_ratio_vector(&g)?;
    let resp = solve_linear(e, shock)?;
    let line = vector_line(&resp, e)?;
    let segment = segment_ab(&line, &resp, e)?;
    Ok(Scene {
        theta_l_over_k: e.theta_l_over_k(),
        economy_point: Some(point),
        line: Some(line),
        segment: Some(segment),
        q: point_q(e).ok(),
        r: Some(points_r(e)),
        thresholds: None,
        title: Some(name.to_string()),
        viewport: None,
    })
}

pub fn plot(cli: &Cli, input: &Path, shock: Option<&Path>, name: &str) -> Result<Outcome, Failure> {
    let raw: Value = read_json(input)?;
    let scene = if let Ok(doc) = serde_json::from_value::<EconomyDocument>(raw.clone()) {
        let e = doc.into_economy();
        let report = validate_economy_with(&e, false, cli.tolerance.unwrap_or(tol::STRUCTURAL));
        if !report.is_empty() {
            return Err(Failure::Model(format!("{} is not a valid economy:\n{report}", display(input))));
        }
        let shock = match shock {
            Some(p) => load_shock(p)?,
            None => Shock::price(1.0),
        };
        economy_scene(&e, &shock, name)?
    } else if let Ok(report) = serde_json::from_value::<EstimateReport<f64>>(raw) {
        report_scene(&report)?
    } else {
        return Err(Failure::Input(format!("{} is neither an economy nor an estimate report", display(input))));
    };
    let svg_path = out_path(cli, &format!("{name}.svg"));
    let csv_path = out_path(cli, &format!("{name}.csv"));
    save(&svg_path, &scene.to_svg())?;
    save(&csv_path, &scene.to_csv())?;

    let points: Vec<Value> = scene
        .plotted_points()
        .into_iter()
        .filter(|p| !matches!(p.element, "boundary" | "segment" | "vector_line"))
        .map(|p| to_value(&p))
        .collect();
    let text = format!("wrote {} and {}\n", display(&svg_path), display(&csv_path));
    let value = json!({ "svg": display(&svg_path), "csv": display(&csv_path), "points": points });
    finish(cli, text, value, true)
}
