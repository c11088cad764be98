//! JSON documents. Exact mode writes scalars as `"p/q"` strings, float
//! mode as numbers rounded to 12 significant digits. Keys are sorted, so
//! equal values serialize to equal bytes.

use serde_json::{json, Map, Value};

use crate::acquisition::{AcquisitionSolution, IncomparablePair, MpcVerdict, Paraboloid, PosteriorDistribution, UPSCost};
use crate::compare::{AffineWitness, NonconvexityWitness, PriorVerdict, TransformationKind, TransformationVerdict};
use crate::decision::{Action, DecisionProblem, MaxAffine, Subdivision};
use crate::error::{Error, Result};
use crate::geometry::Belief;
use crate::scalar::{format_rational, parse_rational, round_sig, Scalar};
use crate::transforms::{DelegationReport, PerturbationReport, ScreeningInstance, ScreeningSolution};

/// Parses JSON text, reporting syntax errors with line and column.
pub fn parse_document(text: &str) -> Result<Value> {
    serde_json::from_str(text)
        .map_err(|e| Error::MalformedInput(format!("line {}, column {}: {e}", e.line(), e.column())))
}

/// Pretty-printed with sorted keys and a trailing newline.
pub fn to_canonical(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values built here always serialize");
    s.push('\n');
    s
}

fn bad(path: &str, what: impl std::fmt::Display) -> Error {
    Error::MalformedInput(format!("{path}: {what}"))
}

pub fn scalar_to_json<S: Scalar>(x: &S) -> Value {
    if S::EXACT {
        return match x.to_rational() {
            Some(r) => Value::String(format_rational(&r)),
            None => Value::Null,
        };
    }
    serde_json::Number::from_f64(round_sig(x.to_f64())).map_or(Value::Null, Value::Number)
}

/// Accepts `"p/q"`, decimal strings and JSON numbers.
pub fn scalar_from_json<S: Scalar>(v: &Value, path: &str) -> Result<S> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        other => return Err(bad(path, format!("expected a number, found {other}"))),
    };
    let r = parse_rational(&text).map_err(|e| bad(path, e))?;
    let x = S::from_rational(&r);
    if !x.is_finite() {
        return Err(bad(path, "number out of range"));
    }
    Ok(x)
}

pub fn vec_to_json<S: Scalar>(xs: &[S]) -> Value {
    Value::Array(xs.iter().map(scalar_to_json).collect())
}

pub fn vec_from_json<S: Scalar>(v: &Value, path: &str) -> Result<Vec<S>> {
    array(v, path)?.iter().enumerate().map(|(i, x)| scalar_from_json(x, &format!("{path}[{i}]"))).collect()
}

fn matrix_to_json<S: Scalar>(m: &[Vec<S>]) -> Value {
    Value::Array(m.iter().map(|r| vec_to_json(r)).collect())
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| bad(path, "expected an array"))
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| bad(path, "expected an object"))
}

fn field<'a>(o: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    o.get(key).ok_or_else(|| bad(path, format!("missing field {key:?}")))
}

fn string(v: &Value, path: &str) -> Result<String> {
    v.as_str().map(str::to_owned).ok_or_else(|| bad(path, "expected a string"))
}

fn strings(xs: &[String]) -> Value {
    Value::Array(xs.iter().map(|s| Value::String(s.clone())).collect())
}

// Decision problems.

pub fn problem_from_json<S: Scalar>(v: &Value) -> Result<DecisionProblem<S>> {
    let o = object(v, "$")?;
    let states = array(field(o, "states", "$")?, "$.states")?
        .iter()
        .enumerate()
        .map(|(i, s)| string(s, &format!("$.states[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let actions = array(field(o, "actions", "$")?, "$.actions")?
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let p = format!("$.actions[{i}]");
            let ao = object(a, &p)?;
            let label = string(field(ao, "label", &p)?, &format!("{p}.label"))?;
            let payoffs = vec_from_json(field(ao, "payoffs", &p)?, &format!("{p}.payoffs"))?;
            Ok(Action::new(label, payoffs))
        })
        .collect::<Result<Vec<_>>>()?;
    DecisionProblem::new(states, actions)
}

pub fn parse_problem<S: Scalar>(text: &str) -> Result<DecisionProblem<S>> {
    problem_from_json(&parse_document(text)?)
}

pub fn problem_to_json<S: Scalar>(d: &DecisionProblem<S>) -> Value {
    json!({
        "states": strings(d.states()),
        "actions": d.actions().iter().map(|a| json!({"label": a.label, "payoffs": vec_to_json(&a.payoffs)})).collect::<Vec<_>>(),
    })
}

/// A value function as the problem whose actions are its pieces.
pub fn value_function_to_json<S: Scalar>(f: &MaxAffine<S>) -> Value {
    let states: Vec<String> = (1..=f.dim()).map(|i| format!("s{i}")).collect();
    json!({
        "states": strings(&states),
        "actions": f.pieces().iter().map(|p| json!({"label": p.label, "payoffs": vec_to_json(&p.payoff)})).collect::<Vec<_>>(),
    })
}

pub fn value_function_from_json<S: Scalar>(v: &Value) -> Result<MaxAffine<S>> {
    Ok(problem_from_json::<S>(v)?.value_function())
}

pub fn belief_from_json<S: Scalar>(v: &Value, path: &str) -> Result<Belief<S>> {
    Belief::new(vec_from_json(v, path)?)
}

pub fn subdivision_to_json<S: Scalar>(s: &Subdivision<S>) -> Value {
    json!({
        "dimension": s.dim(),
        "cells": s.cells().iter().map(|c| json!({
            "labels": strings(&c.labels),
            "payoff": c.payoff.as_ref().map(|p| vec_to_json(p)),
            "vertices": matrix_to_json(c.polytope.vertices()),
        })).collect::<Vec<_>>(),
    })
}

// Distributions and costs.

pub fn distribution_to_json<S: Scalar>(phi: &PosteriorDistribution<S>) -> Value {
    json!({
        "support": phi.support().iter().map(|(p, w)| json!({"belief": vec_to_json(p), "weight": scalar_to_json(w)})).collect::<Vec<_>>(),
    })
}

pub fn distribution_from_json<S: Scalar>(v: &Value) -> Result<PosteriorDistribution<S>> {
    let o = object(v, "$")?;
    let support = array(field(o, "support", "$")?, "$.support")?
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let p = format!("$.support[{i}]");
            let eo = object(e, &p)?;
            Ok((
                vec_from_json(field(eo, "belief", &p)?, &format!("{p}.belief"))?,
                scalar_from_json(field(eo, "weight", &p)?, &format!("{p}.weight"))?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    PosteriorDistribution::new(support)
}

pub fn cost_to_json<S: Scalar>(c: &UPSCost<S>) -> Value {
    match c {
        UPSCost::ScaledEntropy { scale } => json!({"family": c.family(), "scale": scalar_to_json(scale)}),
        UPSCost::Quadratic { matrix } => json!({"family": c.family(), "matrix": matrix_to_json(matrix)}),
        UPSCost::MaxParaboloid { epsilon, pieces } => json!({
            "family": c.family(),
            "epsilon": scalar_to_json(epsilon),
            "pieces": pieces.iter().map(|p| json!({
                "label": p.label,
                "slope": vec_to_json(&p.slope),
                "center": vec_to_json(&p.center),
            })).collect::<Vec<_>>(),
        }),
        UPSCost::AffineShiftOfValue { base, epsilon, regularizer } => json!({
            "family": c.family(),
            "base": value_function_to_json(base),
            "epsilon": scalar_to_json(epsilon),
            "regularizer": cost_to_json(regularizer),
        }),
    }
}

pub fn cost_from_json<S: Scalar>(v: &Value) -> Result<UPSCost<S>> {
    cost_at(v, "$")
}

fn cost_at<S: Scalar>(v: &Value, path: &str) -> Result<UPSCost<S>> {
    let o = object(v, path)?;
    let family = string(field(o, "family", path)?, &format!("{path}.family"))?;
    let sub = |k: &str| format!("{path}.{k}");
    Ok(match family.as_str() {
        "scaled_entropy" => UPSCost::ScaledEntropy { scale: scalar_from_json(field(o, "scale", path)?, &sub("scale"))? },
        "quadratic" => UPSCost::Quadratic {
            matrix: array(field(o, "matrix", path)?, &sub("matrix"))?
                .iter()
                .enumerate()
                .map(|(i, r)| vec_from_json(r, &format!("{path}.matrix[{i}]")))
                .collect::<Result<_>>()?,
        },
        "max_paraboloid" => UPSCost::MaxParaboloid {
            epsilon: scalar_from_json(field(o, "epsilon", path)?, &sub("epsilon"))?,
            pieces: array(field(o, "pieces", path)?, &sub("pieces"))?
                .iter()
                .enumerate()
                .map(|(i, e)| {
                    let p = format!("{path}.pieces[{i}]");
                    let eo = object(e, &p)?;
                    Ok(Paraboloid {
                        label: string(field(eo, "label", &p)?, &format!("{p}.label"))?,
                        slope: vec_from_json(field(eo, "slope", &p)?, &format!("{p}.slope"))?,
                        center: vec_from_json(field(eo, "center", &p)?, &format!("{p}.center"))?,
                    })
                })
                .collect::<Result<_>>()?,
        },
        "affine_shift_of_value" => UPSCost::AffineShiftOfValue {
            base: value_function_from_json(field(o, "base", path)?)?,
            epsilon: scalar_from_json(field(o, "epsilon", path)?, &sub("epsilon"))?,
            regularizer: Box::new(cost_at(field(o, "regularizer", path)?, &sub("regularizer"))?),
        },
        other => return Err(bad(&sub("family"), format!("unknown cost family {other:?}"))),
    })
}

pub fn solution_to_json<S: Scalar>(s: &AcquisitionSolution<S>) -> Value {
    json!({
        "distribution": distribution_to_json(&s.distribution),
        "mean": vec_to_json(&s.distribution.mean()),
        "net_value": scalar_to_json(&s.net_value),
        "grid_resolution": s.grid_resolution,
        "dual_gap": scalar_to_json(&s.dual_gap),
        "unique": s.unique,
    })
}

pub fn mpc_verdict_to_json<S: Scalar>(v: &MpcVerdict<S>) -> Value {
    match v {
        MpcVerdict::Coupling(m) => json!({"holds": true, "coupling": matrix_to_json(m)}),
        MpcVerdict::Separated(c) => json!({
            "holds": false,
            "separating_function": value_function_to_json(&c.phi),
            "gap": scalar_to_json(&c.gap),
        }),
    }
}

pub fn pair_to_json<S: Scalar>(p: &IncomparablePair<S>) -> Value {
    json!({
        "prior": vec_to_json(p.prior.as_slice()),
        "cost": cost_to_json(&p.cost),
        "phi_v": distribution_to_json(&p.phi_v),
        "phi_vhat": distribution_to_json(&p.phi_vhat),
        "solution_v": solution_to_json(&p.solution_v),
        "solution_vhat": solution_to_json(&p.solution_vhat),
        "shift": scalar_to_json(&p.shift),
    })
}

// Verdicts.

fn nonconvexity_to_json<S: Scalar>(w: &NonconvexityWitness<S>) -> Value {
    json!({
        "mu": vec_to_json(&w.mu),
        "mu_prime": vec_to_json(&w.mu_prime),
        "lambda": scalar_to_json(&w.lambda),
        "violation": scalar_to_json(&w.violation),
    })
}

fn affine_witness_to_json<S: Scalar>(w: &AffineWitness<S>) -> Value {
    json!({"lambda": vec_to_json(&w.lambda), "tau": scalar_to_json(&w.tau), "vector": vec_to_json(&w.vector)})
}

fn kind_to_json(k: &TransformationKind) -> Value {
    match k {
        TransformationKind::Addition { added, totally_refining, totally_strictly_refining } => json!({
            "kind": "addition",
            "added": strings(added),
            "totally_refining": totally_refining,
            "totally_strictly_refining": totally_strictly_refining,
        }),
        TransformationKind::Removal { removed, has_leftovers, consequential, reverse_totally_refining } => json!({
            "kind": "removal",
            "removed": strings(removed),
            "has_leftovers": has_leftovers,
            "consequential": consequential,
            "reverse_totally_refining": reverse_totally_refining,
        }),
        TransformationKind::General => json!({"kind": "general"}),
    }
}

fn prior_verdict_to_json<S: Scalar>(p: &PriorVerdict<S>) -> Value {
    json!({
        "prior": vec_to_json(&p.prior),
        "shift_majorizes": p.shift_majorizes,
        "witness": p.witness.as_ref().map(affine_witness_to_json),
        "envelope_gap": scalar_to_json(&p.envelope_gap),
        "optimal_before": strings(&p.optimal_before),
        "optimal_after": strings(&p.optimal_after),
        "optimal_overlap": strings(&p.optimal_overlap),
        "generic": p.generic,
        "prior_optimal_consistent": p.prior_optimal_consistent,
        "bad_removal_consistent": p.bad_removal_consistent,
    })
}

pub fn verdict_to_json<S: Scalar>(v: &TransformationVerdict<S>) -> Value {
    json!({
        "convex_difference": v.convex_difference,
        "refines": v.refines,
        "greater_value_free_prior": v.greater_value_free_prior,
        "nonconvexity_witness": v.nonconvexity_witness.as_ref().map(nonconvexity_to_json),
        "transformation": kind_to_json(&v.kind),
        "priors": v.priors.iter().map(prior_verdict_to_json).collect::<Vec<_>>(),
    })
}

// Applications.

pub fn screening_instance_from_json<S: Scalar>(v: &Value) -> Result<ScreeningInstance<S>> {
    let o = object(v, "$")?;
    Ok(ScreeningInstance {
        v1: value_function_from_json(field(o, "v1", "$")?)?,
        v2: value_function_from_json(field(o, "v2", "$")?)?,
        rho: scalar_from_json(field(o, "rho", "$")?, "$.rho")?,
        prior: belief_from_json(field(o, "prior", "$")?, "$.prior")?,
        cost: cost_from_json(field(o, "cost", "$")?)?,
    })
}

pub fn screening_instance_to_json<S: Scalar>(inst: &ScreeningInstance<S>) -> Value {
    json!({
        "v1": value_function_to_json(&inst.v1),
        "v2": value_function_to_json(&inst.v2),
        "rho": scalar_to_json(&inst.rho),
        "prior": vec_to_json(inst.prior.as_slice()),
        "cost": cost_to_json(&inst.cost),
    })
}

pub fn screening_solution_to_json<S: Scalar>(s: &ScreeningSolution<S>) -> Value {
    let d = &s.diagnostics;
    let pair = |a: &AcquisitionSolution<S>, b: &AcquisitionSolution<S>, ta: &S, tb: &S| {
        json!({
            "type_1": {"solution": solution_to_json(a), "price": scalar_to_json(ta)},
            "type_2": {"solution": solution_to_json(b), "price": scalar_to_json(tb)},
        })
    };
    json!({
        "first_best": pair(&s.first_best.0, &s.first_best.1, &s.first_best_prices.0, &s.first_best_prices.1),
        "second_best": pair(&s.second_best.0, &s.second_best.1, &s.second_best_prices.0, &s.second_best_prices.1),
        "diagnostics": {
            "first_best_1_strict_mpc_of_2": d.first_best_1_strict_mpc_of_2,
            "first_best_2_mpc_of_1": d.first_best_2_mpc_of_1,
            "second_best_2_mpc_of_first_best_2": d.second_best_2_mpc_of_first_best_2,
            "first_best_2_strict_mpc_of_second_best_2": d.first_best_2_strict_mpc_of_second_best_2,
            "second_best_1_equals_first_best_1": d.second_best_1_equals_first_best_1,
            "ic1_gap": scalar_to_json(&d.ic1_gap),
            "ir1_slack": scalar_to_json(&d.ir1_slack),
            "ir2_gap": scalar_to_json(&d.ir2_gap),
            "second_best_2_unique": d.second_best_2_unique,
        },
    })
}

pub fn perturbation_to_json<S: Scalar>(r: &PerturbationReport<S>) -> Value {
    json!({
        "case": r.case.name(),
        "epsilon": scalar_to_json(&r.epsilon),
        "perturbed_actions": strings(&r.perturbed_actions),
        "kink": scalar_to_json(&r.kink),
        "composed_kink": scalar_to_json(&r.composed_kink),
        "refinement_broken": r.refinement_broken,
    })
}

pub fn delegation_to_json<S: Scalar>(r: &DelegationReport<S>) -> Value {
    let outcome = |o: &crate::transforms::DelegationOutcome<S>| {
        json!({"gain": scalar_to_json(&o.gain), "buys": o.buys, "principal_payoff": scalar_to_json(&o.principal_payoff)})
    };
    json!({
        "without_extra": outcome(&r.without_extra),
        "with_extra": outcome(&r.with_extra),
        "totally_refining": r.totally_refining,
        "refining_guarantee": r.refining_guarantee,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::Rational;

    #[test]
    fn problem_round_trip_is_byte_stable() {
        let text = r#"{"states":["lo","hi"],"actions":[{"label":"a","payoffs":["3/10", 1]},{"label":"b","payoffs":[0.5,"-2"]}]}"#;
        let d: DecisionProblem<Rational> = parse_problem(text).unwrap();
        let once = to_canonical(&problem_to_json(&d));
        let twice = to_canonical(&problem_to_json(&parse_problem::<Rational>(&once).unwrap()));
        assert_eq!(once, twice);
        assert!(once.contains("\"3/10\"") && once.contains("\"1/2\""));
    }

    #[test]
    fn float_output_uses_twelve_digits() {
        assert_eq!(scalar_to_json(&(1.0f64 / 3.0)).to_string(), "0.333333333333");
        assert_eq!(scalar_to_json(&0.3f64).to_string(), "0.3");
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse_problem::<f64>("{\n  \"states\": [,]\n}").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn semantic_errors_carry_path() {
        let err = parse_problem::<f64>(r#"{"states":["a","b"],"actions":[{"label":"x","payoffs":[1,"q"]}]}"#).unwrap_err();
        assert!(err.to_string().contains("$.actions[0].payoffs[1]"), "{err}");
    }

    #[test]
    fn costs_and_distributions_round_trip() {
        let d = fixtures::two_action::<Rational>();
        let mu0 = Belief::binary(Rational::new(3.into(), 10.into()));
        let q = |a: i64, b: i64| Rational::new(a.into(), b.into());
        let phi = PosteriorDistribution::new(vec![(vec![q(4, 5), q(1, 5)], q(5, 6)), (vec![q(1, 5), q(4, 5)], q(1, 6))])
            .unwrap();
        phi.check_plausible(mu0.as_slice()).unwrap();
        let cost = crate::synthesize_cost(&d, &phi, &mu0).unwrap();
        let back: UPSCost<Rational> = cost_from_json(&cost_to_json(&cost)).unwrap();
        assert_eq!(back, cost);
        let phi_back: PosteriorDistribution<Rational> = distribution_from_json(&distribution_to_json(&phi)).unwrap();
        assert_eq!(phi_back, phi);
        let nested = UPSCost::AffineShiftOfValue {
            base: d.value_function(),
            epsilon: q(1, 4),
            regularizer: Box::new(UPSCost::squared_norm(2)),
        };
        assert_eq!(cost_from_json::<Rational>(&cost_to_json(&nested)).unwrap(), nested);
    }

    #[test]
    fn screening_instance_round_trips() {
        let inst = fixtures::screening_instance();
        let v = screening_instance_to_json(&inst);
        let back: ScreeningInstance<f64> = screening_instance_from_json(&v).unwrap();
        assert_eq!(to_canonical(&screening_instance_to_json(&back)), to_canonical(&v));
    }
}
