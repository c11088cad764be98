//! Seeded random instances for property suites. Payoffs are integers in
//! `[-5, 5]`; problems have 2 to 5 actions.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::acquisition::{is_nonredundant, PosteriorDistribution};
use crate::compare::is_weakly_dominated;
use crate::decision::{Action, DecisionProblem};
use crate::error::Result;
use crate::geometry::Belief;
use crate::scalar::Scalar;

pub const PAYOFF_BOUND: i64 = 5;
const MAX_TRIES: usize = 200;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_payoffs<S: Scalar>(rng: &mut impl Rng, n: usize) -> Vec<S> {
    (0..n).map(|_| S::from_i64(rng.gen_range(-PAYOFF_BOUND..=PAYOFF_BOUND))).collect()
}

pub fn random_problem<S: Scalar>(rng: &mut impl Rng, n: usize) -> DecisionProblem<S> {
    let m = rng.gen_range(2..=5);
    let actions = (1..=m).map(|i| Action::new(format!("a{i}"), random_payoffs(rng, n))).collect();
    let states = (1..=n).map(|i| format!("s{i}")).collect();
    DecisionProblem::new(states, actions).expect("generated problems are well formed")
}

/// A random action that strictly beats `d` at some belief, if one turns up.
pub fn improving_action<S: Scalar>(rng: &mut impl Rng, d: &DecisionProblem<S>) -> Result<Option<Vec<S>>> {
    for _ in 0..MAX_TRIES {
        let a = random_payoffs(rng, d.num_states());
        if !is_weakly_dominated(d, &a)? {
            return Ok(Some(a));
        }
    }
    Ok(None)
}

/// A random problem together with an improving addition.
pub fn problem_with_addition<S: Scalar>(rng: &mut impl Rng, n: usize) -> Result<(DecisionProblem<S>, Vec<S>)> {
    loop {
        let d = random_problem(rng, n);
        if let Some(a) = improving_action(rng, &d)? {
            return Ok((d, a));
        }
    }
}

/// Labels of a nonempty proper subset of the actions.
pub fn random_removal<S: Scalar>(rng: &mut impl Rng, d: &DecisionProblem<S>) -> Vec<String> {
    let mut labels: Vec<String> = d.actions().iter().map(|a| a.label.clone()).collect();
    labels.shuffle(rng);
    let k = rng.gen_range(1..labels.len());
    labels.truncate(k);
    labels.sort();
    labels
}

/// Log-uniform on `[lo, hi]`.
pub fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..=hi.ln())).exp()
}

/// Interior belief with coordinates in multiples of `1/denom`.
pub fn interior_belief<S: Scalar>(rng: &mut impl Rng, n: usize, denom: i64) -> Belief<S> {
    assert!(denom >= n as i64, "denominator too small for an interior point");
    let mut cuts: Vec<i64> = (1..denom).collect::<Vec<_>>().choose_multiple(rng, n - 1).copied().collect();
    cuts.sort_unstable();
    let mut parts = Vec::with_capacity(n);
    let mut prev = 0;
    for c in cuts.into_iter().chain(std::iter::once(denom)) {
        parts.push(S::ratio(c - prev, denom));
        prev = c;
    }
    Belief::new(parts).expect("positive parts summing to one")
}

/// A non-redundant target of one or two posteriors for a two-state problem
/// and its mean, with coordinates in multiples of `1/denom`.
pub fn nonredundant_target<S: Scalar>(
    rng: &mut impl Rng,
    d: &DecisionProblem<S>,
    denom: i64,
) -> Option<(PosteriorDistribution<S>, Belief<S>)> {
    for _ in 0..MAX_TRIES {
        let size = rng.gen_range(1..=2);
        let mut xs: Vec<i64> = (1..denom).collect::<Vec<_>>().choose_multiple(rng, size).copied().collect();
        xs.sort_unstable();
        let w = rng.gen_range(1..denom);
        let weights: Vec<S> = if size == 1 { vec![S::one()] } else { vec![S::ratio(w, denom), S::ratio(denom - w, denom)] };
        let support: Vec<(Vec<S>, S)> = xs
            .iter()
            .zip(weights)
            .map(|(&x, wt)| (vec![S::ratio(denom - x, denom), S::ratio(x, denom)], wt))
            .collect();
        let Ok(phi) = PosteriorDistribution::new(support) else { continue };
        if is_nonredundant(d, &phi) {
            let mu0 = Belief::new(phi.mean()).ok()?;
            return Some((phi, mu0));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    #[test]
    fn generation_is_seed_deterministic() {
        let a: DecisionProblem<Rational> = random_problem(&mut rng(7), 3);
        let b: DecisionProblem<Rational> = random_problem(&mut rng(7), 3);
        assert_eq!(a, b);
        assert!((2..=5).contains(&a.actions().len()));
    }

    #[test]
    fn interior_beliefs_are_interior() {
        let mut r = rng(1);
        for _ in 0..50 {
            let b: Belief<Rational> = interior_belief(&mut r, 3, 12);
            assert!(b.is_interior());
        }
    }

    #[test]
    fn removals_are_proper_and_nonempty() {
        let mut r = rng(3);
        for _ in 0..50 {
            let d: DecisionProblem<f64> = random_problem(&mut r, 2);
            let k = random_removal(&mut r, &d).len();
            assert!(k >= 1 && k < d.actions().len());
        }
    }
}
