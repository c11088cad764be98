//! Small hand-built problems used by tests, examples and the CLI.

use crate::acquisition::{PosteriorDistribution, UPSCost};
use crate::decision::{Action, DecisionProblem, MaxAffine};
use crate::geometry::Belief;
use crate::transforms::{Phi, ScreeningInstance};
use crate::Scalar;

fn r<S: Scalar>(p: i64, q: i64) -> S {
    S::ratio(p, q)
}

fn states(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("s{i}")).collect()
}

fn problem<S: Scalar>(n: usize, actions: Vec<(&str, Vec<S>)>) -> DecisionProblem<S> {
    DecisionProblem::new(states(n), actions.into_iter().map(|(l, p)| Action::new(l, p)).collect())
        .expect("fixture is well formed")
}

/// `a1 = (1, 0)`, `a2 = (0, 1)`: value `max{μ, 1 - μ}`.
pub fn two_action<S: Scalar>() -> DecisionProblem<S> {
    problem(2, vec![("a1", vec![S::one(), S::zero()]), ("a2", vec![S::zero(), S::one()])])
}

/// [`two_action`] plus the weakly dominated `a3 = (1/2, 1/2)`, which ties
/// at the kink.
pub fn tie_problem<S: Scalar>() -> DecisionProblem<S> {
    let mut d = two_action::<S>().actions().to_vec();
    d.push(Action::new("a3", vec![r(1, 2), r(1, 2)]));
    DecisionProblem::new(states(2), d).expect("fixture is well formed")
}

/// Two actions that each cross the kink of [`two_action`] yet together leave
/// a convex difference: `(3/2, 1/2)` and `(1/2, 3/2)`.
pub fn parallel_shift_pair<S: Scalar>() -> Vec<Vec<S>> {
    vec![vec![r(3, 2), r(1, 2)], vec![r(1, 2), r(3, 2)]]
}

/// Three states; `n` pays in the first state, `c` in the other two.
pub fn motivating<S: Scalar>() -> DecisionProblem<S> {
    problem(
        3,
        vec![("n", vec![S::one(), S::zero(), S::zero()]), ("c", vec![S::zero(), S::one(), S::one()])],
    )
}

/// [`motivating`] with `s = (-1, 0, 2)`, optimal exactly where `μ3 >= 1/2`,
/// and the strictly dominated `r = (1/4, 1/2, 1/2)`.
pub fn motivating_extended<S: Scalar>() -> DecisionProblem<S> {
    let mut a = motivating::<S>().actions().to_vec();
    a.push(Action::new("s", vec![-S::one(), S::zero(), S::from_i64(2)]));
    a.push(Action::new("r", vec![r(1, 4), r(1, 2), r(1, 2)]));
    DecisionProblem::new(states(3), a).expect("fixture is well formed")
}

/// Two-state problem with a convex-kink middle action, and the same
/// problem after adding two actions that beat it only near `μ = 1/2`.
/// The difference is not convex, yet at `μ = 1/2` the values coincide.
pub fn pointwise_dominance_pair<S: Scalar>() -> (DecisionProblem<S>, DecisionProblem<S>) {
    let d = problem(
        2,
        vec![
            ("a1", vec![S::one(), S::zero()]),
            ("a2", vec![r(3, 5), r(3, 5)]),
            ("a3", vec![S::zero(), S::one()]),
        ],
    );
    let mut a = d.actions().to_vec();
    a.push(Action::new("b1", vec![r(9, 10), r(7, 30)]));
    a.push(Action::new("b2", vec![r(7, 30), r(9, 10)]));
    (d.clone(), DecisionProblem::new(states(2), a).expect("fixture is well formed"))
}

/// `v = max{e1, e2, e3}` and `vhat` adding the refining `(6/5, -1/5, -1/5)`.
pub fn cross_pair<S: Scalar>() -> (MaxAffine<S>, MaxAffine<S>) {
    let e = |i: usize| (0..3).map(|k| if k == i { S::one() } else { S::zero() }).collect::<Vec<S>>();
    let v = MaxAffine::from_vectors(vec![e(0), e(1), e(2)]).expect("fixture is well formed");
    let vhat = MaxAffine::from_vectors(vec![e(0), e(1), e(2), vec![r(6, 5), r(-1, 5), r(-1, 5)]])
        .expect("fixture is well formed");
    (v, vhat)
}

fn cara() -> Phi<f64> {
    Phi::Exp { alpha: 1.0 }
}

/// `(2, 0)` and `(0, 2)` under CARA utility: the kink stays at `1/2`.
pub fn symmetric_risk_problem() -> (DecisionProblem<f64>, Phi<f64>) {
    (problem(2, vec![("a1", vec![2.0, 0.0]), ("a2", vec![0.0, 2.0])]), cara())
}

/// `(3, 0)` and `(0, 1)`: CARA utility moves the kink from `3/4` left.
pub fn kink_moving_problem() -> (DecisionProblem<f64>, Phi<f64>) {
    (problem(2, vec![("a1", vec![3.0, 0.0]), ("a2", vec![0.0, 1.0])]), cara())
}

/// [`kink_moving_problem`] plus a strictly dominated `a3` that, under CARA
/// utility, takes over between the moved kink and `3/4` and meets `a2`
/// exactly at `3/4`, so the composed subdivision refines the original.
pub fn risk_refining_problem() -> (DecisionProblem<f64>, Phi<f64>) {
    let phi = |x: f64| -(-x).exp();
    let d3 = 0.8;
    // a3 and a2 agree at 3/4 after composing.
    let target = phi(0.0) + 3.0 * phi(1.0) - 3.0 * phi(d3);
    let c3 = -(-target).ln();
    let (mut d, phi) = kink_moving_problem();
    d = crate::transforms::add_labeled_actions(&d, &[Action::new("a3", vec![c3, d3])]).expect("fresh label");
    (d, phi)
}

/// `v2 = max{μ, 1 - μ}`, `v1` adding `(11/10, -1/10)` and `(-1/10, 11/10)`,
/// equally likely types, entropy cost, prior `(3/5, 2/5)`.
pub fn screening_instance() -> ScreeningInstance<f64> {
    let v2 = two_action::<f64>().value_function();
    let v1 = MaxAffine::from_vectors(vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.1, -0.1], vec![-0.1, 1.1]])
        .expect("well formed");
    ScreeningInstance { v1, v2, rho: 0.5, prior: Belief::binary(0.4), cost: UPSCost::entropy(0.5) }
}

/// [`two_action`], signal price `3/10`, a fully revealing experiment at
/// prior `1/2`.
pub fn delegation_setting<S: Scalar>() -> (DecisionProblem<S>, S, PosteriorDistribution<S>, Belief<S>) {
    let phi = PosteriorDistribution::new(vec![(vec![S::one(), S::zero()], r(1, 2)), (vec![S::zero(), S::one()], r(1, 2))])
        .expect("well formed");
    (two_action(), r(3, 10), phi, Belief::binary(r(1, 2)))
}
