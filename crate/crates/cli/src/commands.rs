//! The subcommands. Each is generic over the arithmetic mode and writes
//! its files into the run's output directory.

use std::path::{Path, PathBuf};

use flexinfo_core::acquisition::{default_resolution, simplex_grid, synthesis_threshold};
use flexinfo_core::decision::{undominated_actions, value_at};
use flexinfo_core::io::{
    cost_from_json, cost_to_json, distribution_from_json, distribution_to_json, parse_document, problem_from_json,
    problem_to_json, scalar_to_json, screening_instance_from_json, screening_instance_to_json, screening_solution_to_json,
    solution_to_json, subdivision_to_json, vec_to_json, verdict_to_json,
};
use flexinfo_core::scalar::convert_vec;
use flexinfo_core::transforms::screening_solve;
use flexinfo_core::{
    classify_transformation, solve_acquisition, synthesize_cost, ArithmeticMode, Belief, DecisionProblem,
    MaxAffine, Rational, Scalar, TransformationVerdict, UPSCost,
};
use serde_json::{json, Value};

use crate::output::{fmt_num, Written};
use crate::suites;
use crate::svg::{interval_plot, triangle_plot, Series};
use crate::{CliError, RunConfig};

/// What a command produced.
#[derive(Debug)]
pub struct Outcome {
    pub written: Vec<PathBuf>,
    pub summary: String,
    /// False only for verification suites that found violations.
    pub pass: bool,
}

pub fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse_document(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn read_problem<S: Scalar>(path: &Path) -> Result<DecisionProblem<S>, CliError> {
    problem_from_json(&read_json(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// A cost given inline as JSON or as a path to a JSON file.
fn read_cost<S: Scalar>(arg: &str) -> Result<UPSCost<S>, CliError> {
    let v = if arg.trim_start().starts_with('{') { parse_document(arg)? } else { read_json(Path::new(arg))? };
    Ok(cost_from_json(&v)?)
}

fn report(cfg: &RunConfig, body: Value) -> Value {
    let mut v = body;
    v["config"] = cfg.to_json();
    v
}

fn input(cfg: &RunConfig, i: usize) -> Result<&Path, CliError> {
    cfg.inputs.get(i).map(PathBuf::as_path).ok_or_else(|| CliError::Input(format!("missing input file #{}", i + 1)))
}

fn f64s<S: Scalar>(v: &[S]) -> Vec<f64> {
    v.iter().map(Scalar::to_f64).collect()
}

/// Sample points `(x, V(x))` on a two-state grid, `x` the second coordinate.
fn curve(f: &dyn Fn(&[f64]) -> f64, resolution: usize) -> Vec<(f64, f64)> {
    simplex_grid::<f64>(2, resolution).into_iter().rev().map(|mu| (mu[1], f(&mu))).collect()
}

fn plot_resolution(cfg: &RunConfig) -> usize {
    cfg.grid.unwrap_or(400)
}

pub fn analyze(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.mode {
        ArithmeticMode::Exact => analyze_in::<Rational>(cfg),
        ArithmeticMode::Float => analyze_in::<f64>(cfg),
    }
}

fn analyze_in<S: Scalar>(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let d: DecisionProblem<S> = read_problem(input(cfg, 0)?)?;
    let n = d.num_states();
    let sub = d.subdivision();
    let priors = cfg.parse_priors::<S>()?;
    let at_priors = priors
        .iter()
        .map(|mu| {
            let (v, opt) = value_at(&d, mu)?;
            Ok(json!({"prior": vec_to_json(mu.as_slice()), "value": scalar_to_json(&v), "optimal_actions": opt}))
        })
        .collect::<Result<Vec<_>, flexinfo_core::Error>>()?;
    let undominated = undominated_actions(&d);
    cfg.prepare_out()?;
    let mut w = Written::default();
    w.json(
        &cfg.out,
        "subdivision.json",
        &report(
            cfg,
            json!({
                "problem": problem_to_json(&d),
                "undominated": undominated,
                "subdivision": subdivision_to_json(&sub),
                "at_priors": at_priors,
            }),
        ),
    )?;
    let f64_fn: MaxAffine<f64> = to_f64_fn(&d.value_function());
    let mut notice = String::new();
    match n {
        2 => {
            let pts = curve(&|mu| f64_fn.eval(mu), plot_resolution(cfg));
            let rows: Vec<Vec<String>> = pts.iter().map(|(x, v)| vec![fmt_num(*x), fmt_num(*v)]).collect();
            w.csv(&cfg.out, "value.csv", &["x", "value"], &rows)?;
            let kinks: Vec<f64> = sub
                .cells()
                .iter()
                .flat_map(|c| c.polytope.vertices().iter().map(|v| v[1].to_f64()))
                .filter(|x| *x > 0.0 && *x < 1.0)
                .collect();
            let title = format!("Value function over P({})", d.states()[1]);
            let svg = interval_plot(&title, &format!("P({})", d.states()[1]), &[Series { name: "V".into(), points: pts }], &kinks);
            w.text(&cfg.out, "subdivision.svg", &svg)?;
        }
        3 => {
            let cells: Vec<(String, Vec<Vec<f64>>)> =
                sub.cells().iter().map(|c| (c.labels.join("/"), c.polytope.vertices().iter().map(|v| f64s(v)).collect())).collect();
            let points: Vec<Vec<f64>> = priors.iter().map(|p| f64s(p.as_slice())).collect();
            w.text(&cfg.out, "subdivision.svg", &triangle_plot("Subdivision", d.states(), &cells, &points))?;
        }
        _ => notice = format!("\nno figure: {n} states (figures need 2 or 3)"),
    }
    Ok(Outcome {
        written: w.0,
        summary: format!("{} cells; undominated: {}{notice}", sub.cells().len(), undominated.join(", ")),
        pass: true,
    })
}

fn to_f64_fn<S: Scalar>(f: &MaxAffine<S>) -> MaxAffine<f64> {
    MaxAffine::from_vectors(f.pieces().iter().map(|p| convert_vec::<S, f64>(&p.payoff)).collect())
        .expect("conversion keeps dimensions")
}

pub fn compare(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.mode {
        ArithmeticMode::Exact => compare_in::<Rational>(cfg),
        ArithmeticMode::Float => compare_in::<f64>(cfg),
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn fmt_scalar<S: Scalar>(x: &S) -> String {
    scalar_to_json(x).to_string().trim_matches('"').to_owned()
}

fn fmt_vec<S: Scalar>(v: &[S]) -> String {
    let parts: Vec<String> = v.iter().map(fmt_scalar).collect();
    format!("({})", parts.join(", "))
}

pub fn verdict_summary<S: Scalar>(v: &TransformationVerdict<S>) -> String {
    use flexinfo_core::compare::TransformationKind;
    let mut lines = vec![
        format!("greater value: {}", yes(v.greater_value_free_prior)),
        format!("convex difference: {}", yes(v.convex_difference)),
        format!("refines: {}", yes(v.refines)),
    ];
    match &v.kind {
        TransformationKind::Addition { added, totally_refining, totally_strictly_refining } => lines.push(format!(
            "addition of {}: totally refining {}, totally strictly refining {}",
            added.join(", "),
            yes(*totally_refining),
            yes(*totally_strictly_refining)
        )),
        TransformationKind::Removal { removed, has_leftovers, consequential, .. } => lines.push(format!(
            "removal of {}: leftovers {}, consequential {}",
            removed.join(", "),
            yes(*has_leftovers),
            yes(*consequential)
        )),
        TransformationKind::General => lines.push("general transformation".into()),
    }
    if let Some(w) = &v.nonconvexity_witness {
        lines.push(format!(
            "witness: mu = {}, mu' = {}, lambda = {}, violation = {}",
            fmt_vec(&w.mu),
            fmt_vec(&w.mu_prime),
            fmt_scalar(&w.lambda),
            fmt_scalar(&w.violation)
        ));
    }
    for p in &v.priors {
        lines.push(format!("prior {}: shift-majorizes {}", fmt_vec(&p.prior), yes(p.shift_majorizes)));
    }
    lines.join("\n")
}

fn compare_in<S: Scalar>(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let d: DecisionProblem<S> = read_problem(input(cfg, 0)?)?;
    let dhat: DecisionProblem<S> = read_problem(input(cfg, 1)?)?;
    if d.states() != dhat.states() {
        return Err(CliError::Input(format!("state mismatch: {:?} vs {:?}", d.states(), dhat.states())));
    }
    let mut priors = cfg.parse_priors::<S>()?;
    if priors.is_empty() {
        priors.push(Belief::uniform(d.num_states()));
    }
    let verdict = classify_transformation(&d, &dhat, &priors)?;
    let summary = verdict_summary(&verdict);
    cfg.prepare_out()?;
    let mut w = Written::default();
    w.json(&cfg.out, "verdict.json", &report(cfg, json!({"verdict": verdict_to_json(&verdict), "summary": summary})))?;
    w.text(&cfg.out, "summary.txt", &format!("{summary}\n"))?;
    Ok(Outcome { written: w.0, summary, pass: true })
}

pub fn acquire(cfg: &RunConfig, cost_arg: &str) -> Result<Outcome, CliError> {
    match cfg.mode {
        ArithmeticMode::Exact => acquire_in::<Rational>(cfg, cost_arg),
        ArithmeticMode::Float => acquire_in::<f64>(cfg, cost_arg),
    }
}

fn single_prior<S: Scalar>(cfg: &RunConfig) -> Result<Belief<S>, CliError> {
    let mut p = cfg.parse_priors::<S>()?;
    match p.len() {
        1 => Ok(p.remove(0)),
        0 => Err(CliError::Input("--prior is required".into())),
        _ => Err(CliError::Input("give exactly one --prior".into())),
    }
}

fn acquire_in<S: Scalar>(cfg: &RunConfig, cost_arg: &str) -> Result<Outcome, CliError> {
    let d: DecisionProblem<S> = read_problem(input(cfg, 0)?)?;
    let cost: UPSCost<S> = read_cost(cost_arg)?;
    let mu0 = single_prior::<S>(cfg)?;
    let n = d.num_states();
    let resolution = cfg.grid.unwrap_or_else(|| default_resolution(n));
    let f = d.value_function();
    let sol = solve_acquisition(&f, &cost, &mu0, resolution)?;
    cfg.prepare_out()?;
    let mut w = Written::default();
    w.json(
        &cfg.out,
        "solution.json",
        &report(
            cfg,
            json!({
                "problem": problem_to_json(&d),
                "cost": cost_to_json(&cost),
                "prior": vec_to_json(mu0.as_slice()),
                "solution": solution_to_json(&sol),
            }),
        ),
    )?;
    if n == 2 {
        let ff = to_f64_fn(&f);
        let rows = simplex_grid::<S>(2, resolution.min(2000))
            .into_iter()
            .rev()
            .map(|mu| {
                let c = cost.potential(&mu)?;
                let v = f.eval(&mu);
                Ok(vec![fmt_num(mu[1].to_f64()), fmt_num(v.to_f64()), fmt_num(c.to_f64()), fmt_num((v - c).to_f64())])
            })
            .collect::<Result<Vec<_>, flexinfo_core::Error>>()?;
        w.csv(&cfg.out, "curve.csv", &["x", "value", "cost", "net"], &rows)?;
        let net: Vec<(f64, f64)> = rows.iter().map(|r| (r[0].parse().unwrap_or(0.0), r[3].parse().unwrap_or(0.0))).collect();
        let value = curve(&|mu| ff.eval(mu), resolution.min(400));
        let markers: Vec<f64> = sol.distribution.points().map(|p| p[1].to_f64()).collect();
        let svg = interval_plot(
            "Value and net value",
            &format!("P({})", d.states()[1]),
            &[Series { name: "V".into(), points: value }, Series { name: "V - c".into(), points: net }],
            &markers,
        );
        w.text(&cfg.out, "acquisition.svg", &svg)?;
    }
    let support: Vec<String> =
        sol.distribution.support().iter().map(|(p, wt)| format!("{} w {}", fmt_vec(p), fmt_scalar(wt))).collect();
    Ok(Outcome {
        written: w.0,
        summary: format!("support: {}; unique: {}", support.join("; "), yes(sol.unique)),
        pass: true,
    })
}

pub fn screen(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.mode {
        ArithmeticMode::Exact => screen_in::<Rational>(cfg),
        ArithmeticMode::Float => screen_in::<f64>(cfg),
    }
}

fn screen_in<S: Scalar>(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let inst = screening_instance_from_json::<S>(&read_json(input(cfg, 0)?)?)?;
    let resolution = cfg.grid.unwrap_or_else(|| default_resolution(inst.prior.dim()));
    let sol = screening_solve(&inst, resolution)?;
    cfg.prepare_out()?;
    let mut w = Written::default();
    w.json(
        &cfg.out,
        "screening.json",
        &report(cfg, json!({"instance": screening_instance_to_json(&inst), "solution": screening_solution_to_json(&sol)})),
    )?;
    let d = &sol.diagnostics;
    Ok(Outcome {
        written: w.0,
        summary: format!(
            "second best keeps type 1 efficient: {}; second-best type 2 is an MPC of first best: {}",
            yes(d.second_best_1_equals_first_best_1),
            yes(d.second_best_2_mpc_of_first_best_2)
        ),
        pass: true,
    })
}

pub fn synth_cost(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.mode {
        ArithmeticMode::Exact => synth_cost_in::<Rational>(cfg),
        ArithmeticMode::Float => synth_cost_in::<f64>(cfg),
    }
}

fn synth_cost_in<S: Scalar>(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let d: DecisionProblem<S> = read_problem(input(cfg, 0)?)?;
    let target = distribution_from_json::<S>(&read_json(input(cfg, 1)?)?)?;
    let mu0 = match cfg.parse_priors::<S>()?.into_iter().next() {
        Some(p) => p,
        None => Belief::new(target.mean())?,
    };
    let cost = synthesize_cost(&d, &target, &mu0)?;
    let threshold = synthesis_threshold(&d, &target)?;
    cfg.prepare_out()?;
    let mut w = Written::default();
    w.json(
        &cfg.out,
        "cost.json",
        &report(
            cfg,
            json!({
                "cost": cost_to_json(&cost),
                "target": distribution_to_json(&target),
                "prior": vec_to_json(mu0.as_slice()),
                "epsilon_threshold": threshold.as_ref().map(scalar_to_json),
            }),
        ),
    )?;
    let eps = match &cost {
        UPSCost::MaxParaboloid { epsilon, .. } => scalar_to_json(epsilon).to_string(),
        _ => String::new(),
    };
    Ok(Outcome { written: w.0, summary: format!("max-paraboloid cost with epsilon {}", eps.trim_matches('"')), pass: true })
}

/// Runs one suite, or every suite for `"all"`, writing one report each.
pub fn verify(cfg: &RunConfig, suite: &str) -> Result<Outcome, CliError> {
    let names: Vec<&str> = if suite == "all" { suites::SUITES.to_vec() } else { vec![suite] };
    cfg.prepare_out()?;
    let mut w = Written::default();
    let mut lines = Vec::new();
    let mut pass = true;
    for name in names {
        let r = suites::run_suite(name, cfg.seed, cfg.mode)?;
        w.json(&cfg.out, &format!("verify-{name}.json"), &report(cfg, r.to_json()))?;
        lines.extend(r.lines());
        pass &= r.pass();
    }
    Ok(Outcome { written: w.0, summary: lines.join("\n"), pass })
}
