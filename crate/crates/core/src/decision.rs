//! Finite decision problems, value functions and their cell subdivisions.

use crate::error::{Error, Result};
use crate::geometry::{Belief, Halfspace, Polytope};
use crate::lp::strict_feasibility;
use crate::scalar::{approx_eq, dot, lex_cmp, sub_vec, vec_approx_eq, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct Action<S> {
    pub label: String,
    pub payoffs: Vec<S>,
}

impl<S: Scalar> Action<S> {
    pub fn new(label: impl Into<String>, payoffs: Vec<S>) -> Self {
        Action { label: label.into(), payoffs }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecisionProblem<S> {
    states: Vec<String>,
    actions: Vec<Action<S>>,
}

impl<S: Scalar> DecisionProblem<S> {
    pub fn new(states: Vec<String>, actions: Vec<Action<S>>) -> Result<Self> {
        if states.len() < 2 {
            return Err(Error::MalformedInput("a decision problem needs at least two states".into()));
        }
        if actions.is_empty() {
            return Err(Error::MalformedInput("a decision problem needs at least one action".into()));
        }
        for (i, a) in actions.iter().enumerate() {
            if a.payoffs.len() != states.len() {
                return Err(Error::MalformedInput(format!(
                    "action {:?} has {} payoffs for {} states",
                    a.label,
                    a.payoffs.len(),
                    states.len()
                )));
            }
            if a.payoffs.iter().any(|x| !x.is_finite()) {
                return Err(Error::NumericDomain(format!("action {:?} has a non-finite payoff", a.label)));
            }
            if actions[..i].iter().any(|b| b.label == a.label) {
                return Err(Error::MalformedInput(format!("duplicate action label {:?}", a.label)));
            }
        }
        Ok(DecisionProblem { states, actions })
    }

    /// States named `s1..sn`, actions `a1..am`.
    pub fn from_payoffs(payoffs: Vec<Vec<S>>) -> Result<Self> {
        let n = payoffs.first().map_or(0, Vec::len);
        let states = (1..=n).map(|i| format!("s{i}")).collect();
        let actions = payoffs.into_iter().enumerate().map(|(i, p)| Action::new(format!("a{}", i + 1), p)).collect();
        DecisionProblem::new(states, actions)
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn actions(&self) -> &[Action<S>] {
        &self.actions
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn action(&self, label: &str) -> Option<&Action<S>> {
        self.actions.iter().find(|a| a.label == label)
    }

    pub fn value_function(&self) -> MaxAffine<S> {
        MaxAffine {
            n: self.num_states(),
            pieces: self.actions.iter().map(|a| Piece { payoff: a.payoffs.clone(), label: a.label.clone() }).collect(),
        }
    }

    pub fn subdivision(&self) -> Subdivision<S> {
        subdivision_of(&self.value_function())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Piece<S> {
    pub payoff: Vec<S>,
    pub label: String,
}

/// `μ ↦ max_i payoff_i · μ`.
#[derive(Clone, Debug, PartialEq)]
pub struct MaxAffine<S> {
    n: usize,
    pieces: Vec<Piece<S>>,
}

/// Actions sharing one payoff vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PayoffClass<S> {
    pub payoff: Vec<S>,
    pub labels: Vec<String>,
}

impl<S: Scalar> MaxAffine<S> {
    pub fn new(n: usize, pieces: Vec<Piece<S>>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::MalformedInput("max-affine function with no pieces".into()));
        }
        if pieces.iter().any(|p| p.payoff.len() != n) {
            return Err(Error::MalformedInput("piece dimension differs from state count".into()));
        }
        Ok(MaxAffine { n, pieces })
    }

    pub fn from_vectors(vectors: Vec<Vec<S>>) -> Result<Self> {
        let n = vectors.first().map_or(0, Vec::len);
        let pieces =
            vectors.into_iter().enumerate().map(|(i, payoff)| Piece { payoff, label: format!("p{}", i + 1) }).collect();
        MaxAffine::new(n, pieces)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn pieces(&self) -> &[Piece<S>] {
        &self.pieces
    }

    pub fn eval(&self, mu: &[S]) -> S {
        let mut best: Option<S> = None;
        for p in &self.pieces {
            let v = dot(&p.payoff, mu);
            if best.as_ref().is_none_or(|b| v > *b) {
                best = Some(v);
            }
        }
        best.expect("nonempty pieces")
    }

    /// Labels of every piece attaining the maximum (within tolerance).
    pub fn argmax(&self, mu: &[S]) -> Vec<String> {
        let v = self.eval(mu);
        self.pieces.iter().filter(|p| approx_eq(&dot(&p.payoff, mu), &v)).map(|p| p.label.clone()).collect()
    }

    /// Distinct payoff vectors with their labels, in first-appearance order.
    pub fn classes(&self) -> Vec<PayoffClass<S>> {
        let mut out: Vec<PayoffClass<S>> = Vec::new();
        for p in &self.pieces {
            match out.iter_mut().find(|c| same_vector(&c.payoff, &p.payoff)) {
                Some(c) => c.labels.push(p.label.clone()),
                None => out.push(PayoffClass { payoff: p.payoff.clone(), labels: vec![p.label.clone()] }),
            }
        }
        out
    }

    /// Classes that are the unique maximizer at some belief.
    pub fn undominated_classes(&self) -> Vec<PayoffClass<S>> {
        let classes = self.classes();
        let simplex = Polytope::simplex(self.n);
        classes
            .iter()
            .enumerate()
            .filter(|(i, c)| {
                let rows: Vec<Halfspace<S>> = classes
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| k != i)
                    .map(|(_, o)| Halfspace::new(sub_vec(&o.payoff, &c.payoff), S::zero()))
                    .collect();
                let strict = vec![true; rows.len()];
                matches!(strict_feasibility(&rows, &strict, &simplex), Ok((true, _)))
            })
            .map(|(_, c)| c.clone())
            .collect()
    }

    /// Affine iff a single payoff class is undominated.
    pub fn is_affine(&self) -> bool {
        self.undominated_classes().len() <= 1
    }

    /// Pointwise difference is not max-affine in general; this returns the
    /// pieces of `self` shifted by `g`, i.e. `μ ↦ self(μ) + g·μ`.
    pub fn shifted(&self, g: &[S]) -> MaxAffine<S> {
        MaxAffine {
            n: self.n,
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece {
                    payoff: p.payoff.iter().zip(g).map(|(a, b)| a.clone() + b.clone()).collect(),
                    label: p.label.clone(),
                })
                .collect(),
        }
    }

    /// Pieces of both functions: `max(self, other)`.
    pub fn max_with(&self, other: &MaxAffine<S>) -> MaxAffine<S> {
        let mut pieces = self.pieces.clone();
        pieces.extend(other.pieces.iter().cloned());
        MaxAffine { n: self.n, pieces }
    }

    pub fn to_problem(&self) -> Result<DecisionProblem<S>> {
        let states = (1..=self.n).map(|i| format!("s{i}")).collect();
        let actions = self.pieces.iter().map(|p| Action::new(p.label.clone(), p.payoff.clone())).collect();
        DecisionProblem::new(states, actions)
    }
}

pub(crate) fn same_vector<S: Scalar>(a: &[S], b: &[S]) -> bool {
    if S::EXACT {
        a == b
    } else {
        vec_approx_eq(a, b)
    }
}

/// A labelled cell; `payoff` is the affine piece active on it when the cell
/// comes from a value function.
#[derive(Clone, Debug)]
pub struct Cell<S: Scalar> {
    pub labels: Vec<String>,
    pub polytope: Polytope<S>,
    pub payoff: Option<Vec<S>>,
}

#[derive(Clone, Debug)]
pub struct Subdivision<S: Scalar> {
    n: usize,
    cells: Vec<Cell<S>>,
}

impl<S: Scalar> Subdivision<S> {
    pub fn new(n: usize, cells: Vec<Cell<S>>) -> Self {
        Subdivision { n, cells }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn cells(&self) -> &[Cell<S>] {
        &self.cells
    }

    /// Every cell vertex, deduplicated and sorted.
    pub fn vertices(&self) -> Vec<Vec<S>> {
        let mut out: Vec<Vec<S>> = Vec::new();
        for c in &self.cells {
            for v in c.polytope.vertices() {
                if !out.iter().any(|w| same_vector(w, v)) {
                    out.push(v.clone());
                }
            }
        }
        out.sort_by(|a, b| lex_cmp(a, b));
        out
    }

    /// Index of the first cell containing `mu`.
    pub fn cell_containing(&self, mu: &[S]) -> Option<usize> {
        self.cells.iter().position(|c| c.polytope.contains_point(mu))
    }

    /// Checks full dimension of every cell, interior-disjointness of every
    /// pair, and coverage of a grid with `resolution` steps per edge.
    pub fn check_invariants(&self, resolution: usize) -> Result<()> {
        for c in &self.cells {
            if !crate::geometry::is_full_dimensional(&c.polytope) {
                return Err(Error::Representation(format!("cell {:?} is not full-dimensional", c.labels)));
            }
        }
        for (i, a) in self.cells.iter().enumerate() {
            for b in &self.cells[i + 1..] {
                let x = crate::geometry::intersect(&a.polytope, &b.polytope);
                if crate::geometry::is_full_dimensional(&x) {
                    return Err(Error::Representation(format!(
                        "cells {:?} and {:?} overlap in their interiors",
                        a.labels, b.labels
                    )));
                }
            }
        }
        for mu in crate::acquisition::simplex_grid::<S>(self.n, resolution) {
            if self.cell_containing(&mu).is_none() {
                return Err(Error::Representation(format!("grid point {mu:?} is not covered")));
            }
        }
        Ok(())
    }
}

/// Cells of a max-affine function: one per undominated payoff class.
pub fn subdivision_of<S: Scalar>(f: &MaxAffine<S>) -> Subdivision<S> {
    let und = f.undominated_classes();
    let cells = und
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let hs = und
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != i)
                .map(|(_, o)| Halfspace::new(sub_vec(&o.payoff, &c.payoff), S::zero()))
                .collect();
            Cell { labels: c.labels.clone(), polytope: Polytope::new(f.dim(), hs), payoff: Some(c.payoff.clone()) }
        })
        .collect();
    Subdivision { n: f.dim(), cells }
}

/// A function that is affine on each cell of a subdivision.
#[derive(Clone, Debug)]
pub struct CellwiseAffine<S: Scalar> {
    pub subdivision: Subdivision<S>,
    pub pieces: Vec<Vec<S>>,
}

impl<S: Scalar> CellwiseAffine<S> {
    pub fn eval(&self, mu: &[S]) -> Option<S> {
        self.subdivision.cell_containing(mu).map(|i| dot(&self.pieces[i], mu))
    }

    /// Adjacent pieces agree on every vertex the cells share.
    pub fn is_continuous(&self) -> bool {
        let cells = self.subdivision.cells();
        for (i, c) in cells.iter().enumerate() {
            for v in c.polytope.vertices() {
                let here = dot(&self.pieces[i], v);
                for (j, d) in cells.iter().enumerate() {
                    if j != i && d.polytope.contains_point(v) && !approx_eq(&here, &dot(&self.pieces[j], v)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn sub(&self, other: &CellwiseAffine<S>) -> CellwiseAffine<S> {
        CellwiseAffine {
            subdivision: self.subdivision.clone(),
            pieces: self.pieces.iter().zip(&other.pieces).map(|(a, b)| sub_vec(a, b)).collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub enum PiecewiseAffineFn<S: Scalar> {
    MaxAffine(MaxAffine<S>),
    CellwiseAffine(CellwiseAffine<S>),
}

impl<S: Scalar> PiecewiseAffineFn<S> {
    pub fn eval(&self, mu: &[S]) -> Option<S> {
        match self {
            PiecewiseAffineFn::MaxAffine(f) => Some(f.eval(mu)),
            PiecewiseAffineFn::CellwiseAffine(f) => f.eval(mu),
        }
    }
}

/// Attaches to each cell of `s` the piece of `f` active throughout it.
pub fn restrict_to_cellwise<S: Scalar>(f: &MaxAffine<S>, s: &Subdivision<S>) -> Result<CellwiseAffine<S>> {
    let mut pieces = Vec::with_capacity(s.cells().len());
    for cell in s.cells() {
        let verts = cell.polytope.vertices();
        let vals: Vec<S> = verts.iter().map(|v| f.eval(v)).collect();
        let found = f
            .pieces()
            .iter()
            .find(|p| verts.iter().zip(&vals).all(|(v, fv)| approx_eq(&dot(&p.payoff, v), fv)));
        match found {
            Some(p) => pieces.push(p.payoff.clone()),
            None => {
                return Err(Error::Representation(format!(
                    "function is not affine on cell {}",
                    cell.labels.join("+")
                )))
            }
        }
    }
    Ok(CellwiseAffine { subdivision: s.clone(), pieces })
}

fn check_dim<S: Scalar>(d: &DecisionProblem<S>, mu: &Belief<S>) -> Result<()> {
    if mu.dim() != d.num_states() {
        return Err(Error::MalformedInput(format!(
            "belief has {} entries for {} states",
            mu.dim(),
            d.num_states()
        )));
    }
    Ok(())
}

/// Value and maximizing actions at `mu`.
pub fn value_at<S: Scalar>(d: &DecisionProblem<S>, mu: &Belief<S>) -> Result<(S, Vec<String>)> {
    check_dim(d, mu)?;
    let f = d.value_function();
    Ok((f.eval(mu.as_slice()), f.argmax(mu.as_slice())))
}

/// Labels of actions uniquely optimal somewhere (duplicates share a class).
pub fn undominated_actions<S: Scalar>(d: &DecisionProblem<S>) -> Vec<String> {
    let und = d.value_function().undominated_classes();
    d.actions()
        .iter()
        .filter(|a| und.iter().any(|c| c.labels.contains(&a.label)))
        .map(|a| a.label.clone())
        .collect()
}

pub fn subdivision<S: Scalar>(d: &DecisionProblem<S>) -> Subdivision<S> {
    d.subdivision()
}

/// Actions optimal at an interior prior.
pub fn optimal_action_set<S: Scalar>(d: &DecisionProblem<S>, mu0: &Belief<S>) -> Result<Vec<String>> {
    check_dim(d, mu0)?;
    if !mu0.is_interior() {
        return Err(Error::Precondition("prior must be in the interior of the simplex".into()));
    }
    Ok(value_at(d, mu0)?.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(p: i64, d: i64) -> Rational {
        Rational::ratio(p, d)
    }

    fn two_action() -> DecisionProblem<Rational> {
        DecisionProblem::from_payoffs(vec![vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(1, 1)]]).unwrap()
    }

    #[test]
    fn value_at_kink_and_vertices() {
        let d = two_action();
        let (v, arg) = value_at(&d, &Belief::binary(q(1, 2))).unwrap();
        assert_eq!(v, q(1, 2));
        assert_eq!(arg, vec!["a1", "a2"]);
        let (v, arg) = value_at(&d, &Belief::vertex(2, 0)).unwrap();
        assert_eq!((v, arg), (q(1, 1), vec!["a1".to_string()]));
        let (v, arg) = value_at(&d, &Belief::binary(q(3, 10))).unwrap();
        assert_eq!((v, arg), (q(7, 10), vec!["a1".to_string()]));
    }

    #[test]
    fn undominated_examples() {
        assert_eq!(undominated_actions(&two_action()), vec!["a1", "a2"]);
        let d = DecisionProblem::from_payoffs(vec![
            vec![q(1, 1), q(0, 1)],
            vec![q(0, 1), q(1, 1)],
            vec![q(1, 2), q(1, 2)],
        ])
        .unwrap();
        assert_eq!(undominated_actions(&d), vec!["a1", "a2"]);
        let d = DecisionProblem::from_payoffs(vec![vec![q(1, 1), q(1, 1)], vec![q(0, 1), q(0, 1)]]).unwrap();
        assert_eq!(undominated_actions(&d), vec!["a1"]);
    }

    #[test]
    fn two_cells_meet_at_half() {
        let s = two_action().subdivision();
        assert_eq!(s.cells().len(), 2);
        assert_eq!(s.cells()[0].polytope.vertices(), &[vec![q(1, 2), q(1, 2)], vec![q(1, 1), q(0, 1)]]);
        assert_eq!(s.cells()[1].polytope.vertices(), &[vec![q(0, 1), q(1, 1)], vec![q(1, 2), q(1, 2)]]);
        s.check_invariants(8).unwrap();
    }

    #[test]
    fn single_action_single_cell() {
        let d = DecisionProblem::from_payoffs(vec![vec![q(1, 1), q(2, 1)]]).unwrap();
        let s = d.subdivision();
        assert_eq!(s.cells().len(), 1);
        assert_eq!(s.cells()[0].polytope.vertices().len(), 2);
    }

    #[test]
    fn duplicates_merge_into_one_cell() {
        let d = DecisionProblem::from_payoffs(vec![
            vec![q(1, 1), q(0, 1)],
            vec![q(1, 1), q(0, 1)],
            vec![q(0, 1), q(1, 1)],
        ])
        .unwrap();
        let s = d.subdivision();
        assert_eq!(s.cells().len(), 2);
        assert_eq!(s.cells()[0].labels, vec!["a1", "a2"]);
    }

    #[test]
    fn prior_must_be_interior() {
        let d = two_action();
        assert!(matches!(optimal_action_set(&d, &Belief::vertex(2, 0)), Err(Error::Precondition(_))));
        assert_eq!(optimal_action_set(&d, &Belief::binary(q(3, 10))).unwrap(), vec!["a1"]);
    }

    #[test]
    fn restriction_to_own_cells() {
        let d = two_action();
        let f = d.value_function();
        let w = restrict_to_cellwise(&f, &d.subdivision()).unwrap();
        assert_eq!(w.pieces, vec![vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(1, 1)]]);
        assert!(w.is_continuous());
        let whole = Subdivision::new(
            2,
            vec![Cell { labels: vec!["all".into()], polytope: Polytope::simplex(2), payoff: None }],
        );
        assert!(matches!(restrict_to_cellwise(&f, &whole), Err(Error::Representation(_))));
        let constant = MaxAffine::from_vectors(vec![vec![q(2, 1), q(2, 1)]]).unwrap();
        let w = restrict_to_cellwise(&constant, &d.subdivision()).unwrap();
        assert!(w.pieces.iter().all(|p| p == &vec![q(2, 1), q(2, 1)]));
    }

    #[test]
    fn malformed_problems_rejected() {
        assert!(DecisionProblem::<Rational>::from_payoffs(vec![vec![q(1, 1)]]).is_err());
        let dup = DecisionProblem::new(
            vec!["x".into(), "y".into()],
            vec![Action::new("a", vec![q(0, 1), q(0, 1)]), Action::new("a", vec![q(1, 1), q(0, 1)])],
        );
        assert!(dup.is_err());
        assert!(matches!(
            DecisionProblem::from_payoffs(vec![vec![f64::INFINITY, 0.0]]),
            Err(Error::NumericDomain(_))
        ));
    }
}
