//! Transformations of decision problems and two applications: selling
//! information to two types, and delegating to an agent who may buy a signal.

use crate::acquisition::{
    is_mpc_within, is_strict_mpc, solve_acquisition, AcquisitionSolution, LinearCombination, PosteriorDistribution,
    UPSCost,
};
use crate::compare::{is_convex_difference, is_totally_refining, refines};
use crate::decision::{same_vector, Action, DecisionProblem, MaxAffine};
use crate::error::{Error, Result};
use crate::geometry::Belief;
use crate::scalar::{approx_eq, Scalar};

/// Appends actions labelled `b1, b2, ...`, skipping labels already in use.
pub fn add_actions<S: Scalar>(d: &DecisionProblem<S>, new: &[Vec<S>]) -> Result<DecisionProblem<S>> {
    let mut actions = d.actions().to_vec();
    let mut k = 0;
    for payoffs in new {
        let label = loop {
            k += 1;
            let l = format!("b{k}");
            if !actions.iter().any(|a| a.label == l) {
                break l;
            }
        };
        actions.push(Action::new(label, payoffs.clone()));
    }
    DecisionProblem::new(d.states().to_vec(), actions)
}

/// Appends labelled actions; labels must be fresh.
pub fn add_labeled_actions<S: Scalar>(d: &DecisionProblem<S>, new: &[Action<S>]) -> Result<DecisionProblem<S>> {
    let mut actions = d.actions().to_vec();
    actions.extend(new.iter().cloned());
    DecisionProblem::new(d.states().to_vec(), actions)
}

pub fn remove_actions<S: Scalar>(d: &DecisionProblem<S>, labels: &[String]) -> Result<DecisionProblem<S>> {
    if let Some(l) = labels.iter().find(|l| d.action(l).is_none()) {
        return Err(Error::Precondition(format!("no action labelled {l:?}")));
    }
    let kept: Vec<Action<S>> = d.actions().iter().filter(|a| !labels.contains(&a.label)).cloned().collect();
    if kept.is_empty() {
        return Err(Error::Precondition("cannot remove every action".into()));
    }
    DecisionProblem::new(d.states().to_vec(), kept)
}

/// Payoffs `k·u + s`.
pub fn affine_transform<S: Scalar>(d: &DecisionProblem<S>, k: &S, s: &S) -> Result<DecisionProblem<S>> {
    if !(*k > S::zero()) {
        return Err(Error::Precondition(format!("scale must be positive, got {k}")));
    }
    map_payoffs(d, |u| Ok(k.clone() * u.clone() + s.clone()))
}

fn map_payoffs<S: Scalar>(d: &DecisionProblem<S>, f: impl Fn(&S) -> Result<S>) -> Result<DecisionProblem<S>> {
    let actions = d
        .actions()
        .iter()
        .map(|a| Ok(Action::new(a.label.clone(), a.payoffs.iter().map(&f).collect::<Result<_>>()?)))
        .collect::<Result<_>>()?;
    DecisionProblem::new(d.states().to_vec(), actions)
}

/// Scale factor on utility when CARA wealth moves from `w` to `w_hat`:
/// `exp(-α(ŵ - w))`, at least 1 exactly when wealth falls.
pub fn cara_wealth_factor(alpha: f64, w: f64, w_hat: f64) -> Result<f64> {
    if !(alpha > 0.0) || !w.is_finite() || !w_hat.is_finite() {
        return Err(Error::Precondition("risk aversion must be positive and wealth finite".into()));
    }
    Ok((-alpha * (w_hat - w)).exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    Affine,
    Concave,
    Convex,
    General,
}

impl Shape {
    pub fn as_str(self) -> &'static str {
        match self {
            Shape::Affine => "affine",
            Shape::Concave => "concave",
            Shape::Convex => "convex",
            Shape::General => "general",
        }
    }
}

/// Strictly increasing maps applied to utility.
#[derive(Clone, Debug, PartialEq)]
pub enum Phi<S> {
    /// `k·x + s`, `k > 0`.
    Affine { k: S, s: S },
    /// `-exp(-αx)/α`; concave for `α > 0`, convex for `α < 0`.
    Exp { alpha: f64 },
    /// `(x + shift)^p` for `p > 0`, defined where `x + shift > 0`.
    Power { p: f64, shift: f64 },
    /// `ln(x + shift)`, defined where `x + shift > 0`.
    LogShift { shift: f64 },
}

impl<S: Scalar> Phi<S> {
    pub fn identity() -> Self {
        Phi::Affine { k: S::one(), s: S::zero() }
    }

    pub fn shape(&self) -> Shape {
        match self {
            Phi::Affine { .. } => Shape::Affine,
            Phi::Exp { alpha } if *alpha > 0.0 => Shape::Concave,
            Phi::Exp { .. } => Shape::Convex,
            Phi::Power { p, .. } if *p == 1.0 => Shape::Affine,
            Phi::Power { p, .. } if *p < 1.0 => Shape::Concave,
            Phi::Power { .. } => Shape::Convex,
            Phi::LogShift { .. } => Shape::Concave,
        }
    }

    /// Non-affine families are evaluated in floating point.
    pub fn apply(&self, x: &S) -> Result<S> {
        let float = |f: f64| S::from_f64(f).ok_or_else(|| Error::NumericDomain(format!("phi({x}) is not finite")));
        let xf = x.to_f64();
        match self {
            Phi::Affine { k, s } => Ok(k.clone() * x.clone() + s.clone()),
            Phi::Exp { alpha } => float(-(-alpha * xf).exp() / alpha),
            Phi::Power { p, shift } if xf + shift > 0.0 => float((xf + shift).powf(*p)),
            Phi::LogShift { shift } if xf + shift > 0.0 => float((xf + shift).ln()),
            _ => Err(Error::NumericDomain(format!("phi undefined at {x}"))),
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = match self {
            Phi::Affine { k, .. } => !(*k > S::zero()),
            Phi::Exp { alpha } => *alpha == 0.0 || !alpha.is_finite(),
            Phi::Power { p, shift } => !(*p > 0.0) || !p.is_finite() || !shift.is_finite(),
            Phi::LogShift { shift } => !shift.is_finite(),
        };
        if bad {
            Err(Error::Precondition(format!("phi parameters out of range: {self:?}")))
        } else {
            Ok(())
        }
    }
}

/// Applies `phi` to every payoff after checking it is strictly increasing
/// on the payoffs that occur.
pub fn compose_utility<S: Scalar>(d: &DecisionProblem<S>, phi: &Phi<S>) -> Result<DecisionProblem<S>> {
    phi.validate()?;
    let mut xs: Vec<S> = d.actions().iter().flat_map(|a| a.payoffs.iter().cloned()).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    xs.dedup();
    let ys: Vec<S> = xs.iter().map(|x| phi.apply(x)).collect::<Result<_>>()?;
    if ys.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Precondition("phi is not strictly increasing on the payoffs".into()));
    }
    map_payoffs(d, |u| phi.apply(u))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PerturbationCase {
    /// Leftmost kink unchanged by `phi`, same neighbour: lower `a1` at state 1.
    SameKinkSameNeighbour,
    /// Leftmost kink unchanged, new neighbour: raise `a2` at state 1.
    SameKinkNewNeighbour,
    /// Leftmost kink moved left: raise `a1` at state 1.
    KinkMovedLeft,
}

impl PerturbationCase {
    pub fn name(self) -> &'static str {
        match self {
            PerturbationCase::SameKinkSameNeighbour => "case 1a",
            PerturbationCase::SameKinkNewNeighbour => "case 1b",
            PerturbationCase::KinkMovedLeft => "case 2",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PerturbationReport<S> {
    pub case: PerturbationCase,
    pub epsilon: S,
    pub perturbed_actions: Vec<String>,
    /// Right end of the leftmost cell before and after applying `phi`.
    pub kink: S,
    pub composed_kink: S,
    pub refinement_broken: bool,
}

/// Cells of a two-state problem as `(left, right, labels)` in the
/// probability of the second state, ordered left to right.
pub fn cell_intervals<S: Scalar>(d: &DecisionProblem<S>) -> Result<Vec<(S, S, Vec<String>)>> {
    if d.num_states() != 2 {
        return Err(Error::Precondition("interval cells need exactly two states".into()));
    }
    let mut out: Vec<(S, S, Vec<String>)> = d
        .subdivision()
        .cells()
        .iter()
        .map(|c| {
            let xs: Vec<S> = c.polytope.vertices().iter().map(|v| v[1].clone()).collect();
            let lo = xs.iter().cloned().fold(S::one(), |a, b| if b < a { b } else { a });
            let hi = xs.iter().cloned().fold(S::zero(), |a, b| if b > a { b } else { a });
            (lo, hi, c.labels.clone())
        })
        .collect();
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    Ok(out)
}

fn bump<S: Scalar>(d: &DecisionProblem<S>, labels: &[String], delta: &S) -> Result<DecisionProblem<S>> {
    let actions = d
        .actions()
        .iter()
        .map(|a| {
            let mut p = a.payoffs.clone();
            if labels.contains(&a.label) {
                p[0] = p[0].clone() + delta.clone();
            }
            Action::new(a.label.clone(), p)
        })
        .collect();
    DecisionProblem::new(d.states().to_vec(), actions)
}

/// Perturbs a two-state problem whose subdivision is refined by the
/// `phi`-composed one, by `epsilon` at the first state, so that the
/// refinement fails.
pub fn perturb_break_refinement<S: Scalar>(
    d: &DecisionProblem<S>,
    phi: &Phi<S>,
    epsilon: &S,
) -> Result<(DecisionProblem<S>, PerturbationReport<S>)> {
    if d.num_states() != 2 {
        return Err(Error::Precondition("perturbation needs exactly two states".into()));
    }
    if !(*epsilon > S::zero()) {
        return Err(Error::Precondition("epsilon must be positive".into()));
    }
    if phi.shape() == Shape::Affine {
        return Err(Error::Inapplicable("an affine phi leaves every subdivision unchanged".into()));
    }
    let composed = compose_utility(d, phi)?;
    if !refines(&composed.subdivision(), &d.subdivision()) {
        return Err(Error::Inapplicable("the composed subdivision does not refine the original".into()));
    }
    let cells = cell_intervals(d)?;
    let hat = cell_intervals(&composed)?;
    if cells.len() < 2 {
        return Err(Error::Inapplicable("a single-cell problem has no refinement to break".into()));
    }
    let (kink, a1) = (cells[0].1.clone(), cells[0].2.clone());
    let a2 = cells[1].2.clone();
    let composed_kink = hat[0].1.clone();
    let (case, labels, delta) = if approx_eq(&composed_kink, &kink) {
        if hat.get(1).is_some_and(|c| c.2 == a2) {
            (PerturbationCase::SameKinkSameNeighbour, a1, -epsilon.clone())
        } else {
            (PerturbationCase::SameKinkNewNeighbour, a2, epsilon.clone())
        }
    } else {
        (PerturbationCase::KinkMovedLeft, a1, epsilon.clone())
    };
    let perturbed = bump(d, &labels, &delta)?;
    let broken = !refines(&compose_utility(&perturbed, phi)?.subdivision(), &perturbed.subdivision());
    if !broken {
        return Err(Error::Inapplicable(format!("{} perturbation left the refinement intact", case.name())));
    }
    let report = PerturbationReport {
        case,
        epsilon: epsilon.clone(),
        perturbed_actions: labels,
        kink,
        composed_kink,
        refinement_broken: broken,
    };
    Ok((perturbed, report))
}

/// Two buyer types with value functions `v1`, `v2` (`v1 - v2` convex),
/// type 1 having probability `rho`.
#[derive(Clone, Debug)]
pub struct ScreeningInstance<S: Scalar> {
    pub v1: MaxAffine<S>,
    pub v2: MaxAffine<S>,
    pub rho: S,
    pub prior: Belief<S>,
    pub cost: UPSCost<S>,
}

impl<S: Scalar> ScreeningInstance<S> {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho > S::zero() && self.rho < S::one()) {
            return Err(Error::Precondition(format!("type probability {} outside (0, 1)", self.rho)));
        }
        if !is_convex_difference(&self.v1, &self.v2)?.0 {
            return Err(Error::Precondition("v1 - v2 is not convex".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct ScreeningDiagnostics<S> {
    pub first_best_1_strict_mpc_of_2: bool,
    pub first_best_2_mpc_of_1: bool,
    pub second_best_2_mpc_of_first_best_2: bool,
    pub first_best_2_strict_mpc_of_second_best_2: bool,
    pub second_best_1_equals_first_best_1: bool,
    /// Type-1 payoff from its own contract minus from type 2's.
    pub ic1_gap: S,
    pub ir1_slack: S,
    pub ir2_gap: S,
    /// The virtual-value problem has a unique grid optimum.
    pub second_best_2_unique: bool,
}

#[derive(Clone, Debug)]
pub struct ScreeningSolution<S: Scalar> {
    pub first_best: (AcquisitionSolution<S>, AcquisitionSolution<S>),
    pub first_best_prices: (S, S),
    pub second_best: (AcquisitionSolution<S>, AcquisitionSolution<S>),
    pub second_best_prices: (S, S),
    pub diagnostics: ScreeningDiagnostics<S>,
}

/// Gross value of information: `E_Φ v - v(μ0)`.
fn info_gain<S: Scalar>(v: &MaxAffine<S>, phi: &PosteriorDistribution<S>, mu0: &Belief<S>) -> S {
    phi.expect(|m| v.eval(m)) - v.eval(mu0.as_slice())
}

/// First best: each type's own acquisition problem, priced at its
/// participation constraint. Second best: type 1 keeps its first-best
/// distribution; type 2's solves the virtual value `(v2 - ρ v1)/(1 - ρ)`;
/// prices make type 2's participation and type 1's incentive constraint
/// bind.
pub fn screening_solve<S: Scalar>(inst: &ScreeningInstance<S>, grid_resolution: usize) -> Result<ScreeningSolution<S>> {
    inst.validate()?;
    let mu0 = &inst.prior;
    let one_minus = S::one() - inst.rho.clone();
    let virtual_value = LinearCombination {
        terms: vec![
            (S::one() / one_minus.clone(), inst.v2.clone()),
            (-inst.rho.clone() / one_minus, inst.v1.clone()),
        ],
    };
    let (fb1, (fb2, sb2)) = rayon::join(
        || solve_acquisition(&inst.v1, &inst.cost, mu0, grid_resolution),
        || {
            rayon::join(
                || solve_acquisition(&inst.v2, &inst.cost, mu0, grid_resolution),
                || solve_acquisition(&virtual_value, &inst.cost, mu0, grid_resolution),
            )
        },
    );
    let (fb1, fb2, sb2) = (fb1?, fb2?, sb2?);
    let sb1 = fb1.clone();
    let t1_fb = info_gain(&inst.v1, &fb1.distribution, mu0);
    let t2_fb = info_gain(&inst.v2, &fb2.distribution, mu0);
    let t2_sb = info_gain(&inst.v2, &sb2.distribution, mu0);
    let e1 = |phi: &PosteriorDistribution<S>| phi.expect(|m| inst.v1.eval(m));
    let t1_sb = e1(&sb1.distribution) - e1(&sb2.distribution) + t2_sb.clone();
    let own = e1(&sb1.distribution) - t1_sb.clone();
    let other = e1(&sb2.distribution) - t2_sb.clone();
    let ir1_slack = own.clone() - inst.v1.eval(mu0.as_slice());
    let ir2_gap = info_gain(&inst.v2, &sb2.distribution, mu0) - t2_sb.clone();
    let slack = S::ratio(2, grid_resolution as i64);
    let (p1, p2, q2) = (&fb1.distribution, &fb2.distribution, &sb2.distribution);
    let diagnostics = ScreeningDiagnostics {
        first_best_1_strict_mpc_of_2: is_strict_mpc(p1, p2)?,
        first_best_2_mpc_of_1: is_mpc_within(p2, p1, &slack)?,
        second_best_2_mpc_of_first_best_2: is_mpc_within(q2, p2, &slack)?,
        first_best_2_strict_mpc_of_second_best_2: is_strict_mpc(p2, q2)?,
        second_best_1_equals_first_best_1: sb1.distribution == fb1.distribution,
        ic1_gap: own - other,
        ir1_slack,
        ir2_gap,
        second_best_2_unique: sb2.unique,
    };
    Ok(ScreeningSolution {
        first_best: (fb1, fb2),
        first_best_prices: (t1_fb, t2_fb),
        second_best: (sb1, sb2),
        second_best_prices: (t1_sb, t2_sb),
        diagnostics,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DelegationOutcome<S> {
    pub gain: S,
    pub buys: bool,
    /// Expected decision payoff, which the principal shares.
    pub principal_payoff: S,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DelegationReport<S> {
    pub without_extra: DelegationOutcome<S>,
    pub with_extra: DelegationOutcome<S>,
    pub totally_refining: bool,
    /// With totally refining extras, whether the principal is no worse off.
    pub refining_guarantee: Option<bool>,
}

fn delegate<S: Scalar>(v: &MaxAffine<S>, gamma: &S, phi: &PosteriorDistribution<S>, mu0: &Belief<S>) -> DelegationOutcome<S> {
    let gain = info_gain(v, phi, mu0);
    let buys = gain >= gamma.clone();
    let principal_payoff = if buys { phi.expect(|m| v.eval(m)) } else { v.eval(mu0.as_slice()) };
    DelegationOutcome { gain, buys, principal_payoff }
}

/// Whether giving the agent `extra` actions helps the principal when the
/// agent decides whether to buy `experiment` at price `gamma`.
pub fn delegation_compare<S: Scalar>(
    d: &DecisionProblem<S>,
    extra: &[Vec<S>],
    gamma: &S,
    experiment: &PosteriorDistribution<S>,
    mu0: &Belief<S>,
) -> Result<DelegationReport<S>> {
    if !(*gamma > S::zero()) {
        return Err(Error::Precondition("signal price must be positive".into()));
    }
    experiment.check_plausible(mu0.as_slice())?;
    let dhat = add_actions(d, extra)?;
    let without_extra = delegate(&d.value_function(), gamma, experiment, mu0);
    let with_extra = delegate(&dhat.value_function(), gamma, experiment, mu0);
    let totally_refining = is_totally_refining(d, extra)?;
    let refining_guarantee =
        totally_refining.then(|| crate::scalar::ge(&with_extra.principal_payoff, &without_extra.principal_payoff));
    Ok(DelegationReport { without_extra, with_extra, totally_refining, refining_guarantee })
}

/// Payoff matrices agree row by row.
pub fn same_payoffs<S: Scalar>(a: &DecisionProblem<S>, b: &DecisionProblem<S>) -> bool {
    a.actions().len() == b.actions().len()
        && a.actions().iter().zip(b.actions()).all(|(x, y)| x.label == y.label && same_vector(&x.payoffs, &y.payoffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compare::{is_consequential, is_convex_difference};
    use crate::fixtures;
    use crate::scalar::Rational;

    fn q(p: i64, d: i64) -> Rational {
        Rational::ratio(p, d)
    }

    #[test]
    fn add_then_remove_is_identity() {
        let d = fixtures::two_action::<Rational>();
        let more = add_actions(&d, &[vec![q(3, 4), q(3, 4)], vec![q(2, 1), q(-1, 1)]]).unwrap();
        assert_eq!(more.actions().len(), 4);
        let back = remove_actions(&more, &["b1".into(), "b2".into()]).unwrap();
        assert!(same_payoffs(&back, &d));
        assert!(add_labeled_actions(&d, &[Action::new("a1", vec![q(0, 1), q(0, 1)])]).is_err());
    }

    #[test]
    fn removal_examples() {
        let d = fixtures::two_action::<Rational>();
        let one = remove_actions(&d, &["a2".into()]).unwrap();
        assert_eq!(one.subdivision().cells().len(), 1);
        assert!(one.value_function().is_affine());
        assert!(remove_actions(&d, &["a1".into(), "a2".into()]).is_err());
        let tie = fixtures::tie_problem::<Rational>();
        assert!(!is_consequential(&tie, &remove_actions(&tie, &["a3".into()]).unwrap()).unwrap());
    }

    #[test]
    fn affine_examples() {
        let d = fixtures::two_action::<Rational>();
        assert!(same_payoffs(&affine_transform(&d, &q(1, 1), &q(0, 1)).unwrap(), &d));
        let doubled = affine_transform(&d, &q(2, 1), &q(1, 5)).unwrap();
        let mu = Belief::binary(q(1, 3));
        let (f, g) = (d.value_function(), doubled.value_function());
        assert_eq!(g.eval(mu.as_slice()), q(2, 1) * f.eval(mu.as_slice()) + q(1, 5));
        let half = affine_transform(&d, &q(1, 2), &q(0, 1)).unwrap();
        assert!(!is_convex_difference(&half.value_function(), &f).unwrap().0);
        assert!(affine_transform(&d, &q(0, 1), &q(0, 1)).is_err());
    }

    #[test]
    fn cara_examples() {
        assert_eq!(cara_wealth_factor(1.0, 3.0, 3.0).unwrap(), 1.0);
        assert!((cara_wealth_factor(1.0, 1.0, 1.0 - 2f64.ln()).unwrap() - 2.0).abs() < 1e-12);
        assert!(cara_wealth_factor(0.5, 1.0, 2.0).unwrap() < 1.0);
        assert!(cara_wealth_factor(0.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn compose_examples() {
        let d = fixtures::two_action::<Rational>();
        assert!(same_payoffs(&compose_utility(&d, &Phi::identity()).unwrap(), &d));
        let a = compose_utility(&d, &Phi::Affine { k: q(3, 1), s: q(-1, 1) }).unwrap();
        assert!(same_payoffs(&a, &affine_transform(&d, &q(3, 1), &q(-1, 1)).unwrap()));
        let (d2, phi) = fixtures::kink_moving_problem();
        let hat = compose_utility(&d2, &phi).unwrap();
        let (k, kh) = (cell_intervals(&d2).unwrap()[0].1, cell_intervals(&hat).unwrap()[0].1);
        let (a1, a2) = (&d2.actions()[0].payoffs, &d2.actions()[1].payoffs);
        let p = |x: f64| -(-x).exp();
        let indifference = (p(a1[0]) - p(a2[0])) / (p(a1[0]) - p(a2[0]) + p(a2[1]) - p(a1[1]));
        assert!((kh - indifference).abs() < 1e-9);
        assert!((k - 0.75).abs() < 1e-12);
        assert!(compose_utility(&d2, &Phi::LogShift { shift: 0.0 }).is_err());
    }

    #[test]
    fn perturbation_same_kink() {
        let (d, phi) = fixtures::symmetric_risk_problem();
        let (_, report) = perturb_break_refinement(&d, &phi, &1e-4).unwrap();
        assert_eq!(report.case, PerturbationCase::SameKinkSameNeighbour);
        assert!(report.refinement_broken);
    }

    #[test]
    fn perturbation_moved_kink() {
        let (d, phi) = fixtures::risk_refining_problem();
        let (p, report) = perturb_break_refinement(&d, &phi, &1e-4).unwrap();
        assert_eq!(report.case.name(), "case 2");
        assert!(!refines(&compose_utility(&p, &phi).unwrap().subdivision(), &p.subdivision()));
    }

    #[test]
    fn perturbation_identity_is_inapplicable() {
        let d = fixtures::two_action::<f64>();
        assert!(matches!(perturb_break_refinement(&d, &Phi::identity(), &1e-4), Err(Error::Inapplicable(_))));
    }

    #[test]
    fn screening_fixture() {
        let inst = fixtures::screening_instance();
        let s = screening_solve(&inst, 400).unwrap();
        assert!(s.diagnostics.second_best_1_equals_first_best_1);
        assert!(s.first_best_prices.0 >= s.first_best_prices.1);
        assert!(s.diagnostics.ic1_gap.abs() < 1e-8);
        assert!(s.diagnostics.ir1_slack >= -1e-12);
        assert!(s.diagnostics.second_best_2_mpc_of_first_best_2);
        assert!(!s.diagnostics.first_best_2_strict_mpc_of_second_best_2);
        assert!(!s.diagnostics.first_best_1_strict_mpc_of_2);
        assert!(s.diagnostics.first_best_2_mpc_of_1);
    }

    #[test]
    fn screening_small_rho_matches_first_best() {
        let mut inst = fixtures::screening_instance();
        inst.rho = 1e-9;
        let s = screening_solve(&inst, 200).unwrap();
        assert_eq!(s.second_best.1.distribution, s.first_best.1.distribution);
    }

    #[test]
    fn delegation_examples() {
        let (d, gamma, phi, mu0) = fixtures::delegation_setting::<Rational>();
        let refine = delegation_compare(&d, &[vec![q(21, 20), q(-3, 20)]], &gamma, &phi, &mu0).unwrap();
        assert_eq!(refine.refining_guarantee, Some(true));
        assert!(refine.with_extra.principal_payoff >= refine.without_extra.principal_payoff);
        let none = delegation_compare(&d, &[], &gamma, &phi, &mu0).unwrap();
        assert_eq!(none.with_extra, none.without_extra);
        let tent = delegation_compare(&d, &[vec![q(3, 4), q(3, 4)]], &gamma, &phi, &mu0).unwrap();
        assert!(tent.without_extra.buys && !tent.with_extra.buys);
        assert!(tent.with_extra.principal_payoff < tent.without_extra.principal_payoff);
        assert_eq!(tent.refining_guarantee, None);
    }
}
