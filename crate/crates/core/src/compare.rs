//! Comparisons between an initial and a transformed decision problem.

use rayon::prelude::*;

use crate::decision::{
    restrict_to_cellwise, same_vector, subdivision_of, Cell, CellwiseAffine, DecisionProblem, MaxAffine, Subdivision,
};
use crate::error::{Error, Result};
use crate::geometry::{contains, intersect, is_full_dimensional, Belief, Halfspace, Polytope};
use crate::lp::{solve_lp, strict_feasibility, LinearProgram, LpStatus, Relation, Sense};
use crate::scalar::{dot, gt, sub_vec, Scalar};

/// Every cell of `fine` lies inside some cell of `coarse`.
pub fn refines<S: Scalar>(fine: &Subdivision<S>, coarse: &Subdivision<S>) -> bool {
    fine.cells().iter().all(|f| coarse.cells().iter().any(|c| contains(&c.polytope, &f.polytope)))
}

/// Full-dimensional pairwise intersections, labelled `left&right`.
pub fn common_refinement<S: Scalar>(c1: &Subdivision<S>, c2: &Subdivision<S>) -> Subdivision<S> {
    let mut cells = Vec::new();
    for a in c1.cells() {
        for b in c2.cells() {
            let p = intersect(&a.polytope, &b.polytope);
            if is_full_dimensional(&p) {
                cells.push(Cell {
                    labels: vec![format!("{}&{}", a.labels.join("+"), b.labels.join("+"))],
                    polytope: p,
                    payoff: None,
                });
            }
        }
    }
    Subdivision::new(c1.dim(), cells)
}

/// `W = vhat - v` as a cellwise-affine function on the common refinement.
pub fn difference<S: Scalar>(vhat: &MaxAffine<S>, v: &MaxAffine<S>) -> Result<CellwiseAffine<S>> {
    if vhat.dim() != v.dim() {
        return Err(Error::MalformedInput(format!(
            "value functions over {} and {} states",
            vhat.dim(),
            v.dim()
        )));
    }
    let r = common_refinement(&subdivision_of(vhat), &subdivision_of(v));
    let a = restrict_to_cellwise(vhat, &r)?;
    let b = restrict_to_cellwise(v, &r)?;
    Ok(a.sub(&b))
}

/// Points `mu`, `mu_prime` and weight `lambda` with
/// `W(λμ + (1-λ)μ') > λW(μ) + (1-λ)W(μ')`.
#[derive(Clone, Debug, PartialEq)]
pub struct NonconvexityWitness<S> {
    pub mu: Vec<S>,
    pub mu_prime: Vec<S>,
    pub lambda: S,
    pub violation: S,
}

impl<S: Scalar> NonconvexityWitness<S> {
    /// Recomputes the convexity gap of `w` along the witness.
    pub fn gap(&self, w: impl Fn(&[S]) -> S) -> S {
        let l = self.lambda.clone();
        let mid: Vec<S> = self
            .mu
            .iter()
            .zip(&self.mu_prime)
            .map(|(a, b)| l.clone() * a.clone() + (S::one() - l.clone()) * b.clone())
            .collect();
        w(&mid) - (l.clone() * w(&self.mu) + (S::one() - l) * w(&self.mu_prime))
    }
}

/// Convexity of `vhat - v`, with a witness when it fails.
pub fn is_convex_difference<S: Scalar>(
    vhat: &MaxAffine<S>,
    v: &MaxAffine<S>,
) -> Result<(bool, Option<NonconvexityWitness<S>>)> {
    let w = difference(vhat, v)?;
    let wf = |mu: &[S]| vhat.eval(mu) - v.eval(mu);
    let verts = w.subdivision.vertices();
    let wv: Vec<S> = verts.iter().map(|x| wf(x)).collect();
    let mut best: Option<NonconvexityWitness<S>> = None;
    for (k, cell) in w.subdivision.cells().iter().enumerate() {
        let piece = &w.pieces[k];
        for (x, wx) in verts.iter().zip(&wv) {
            if !gt(&dot(piece, x), wx) {
                continue;
            }
            let Some(wit) = witness_from(&cell.polytope, x, &wf) else { continue };
            if best.as_ref().is_none_or(|b| wit.violation > b.violation) {
                best = Some(wit);
            }
        }
    }
    Ok(match best {
        Some(wit) => (false, Some(wit)),
        None => (true, None),
    })
}

/// From the centroid of `cell` toward an outside vertex `x` at which the
/// cell's piece exceeds `w`: half of the largest step staying in the cell.
fn witness_from<S: Scalar>(cell: &Polytope<S>, x: &[S], w: &impl Fn(&[S]) -> S) -> Option<NonconvexityWitness<S>> {
    let c = cell.centroid()?;
    let d = sub_vec(x, &c);
    let mut smax: Option<S> = None;
    for h in cell.all_rows() {
        let ad = dot(&h.normal, &d);
        if ad > S::zero() {
            let s = h.slack(&c) / ad;
            if smax.as_ref().is_none_or(|m| s < *m) {
                smax = Some(s);
            }
        }
    }
    let s = smax? / S::from_i64(2);
    if !(s > S::zero()) {
        return None;
    }
    let lambda = S::one() - s;
    let mut wit = NonconvexityWitness { mu: c, mu_prime: x.to_vec(), lambda, violation: S::zero() };
    wit.violation = wit.gap(w);
    gt(&wit.violation, &S::zero()).then_some(wit)
}

fn beats_everywhere_rows<S: Scalar>(f: &MaxAffine<S>, new: &[S]) -> Vec<Halfspace<S>> {
    f.classes().iter().map(|c| Halfspace::new(sub_vec(&c.payoff, new), S::zero())).collect()
}

/// `{μ : new·μ >= V(μ)}`.
fn improvement_region<S: Scalar>(f: &MaxAffine<S>, new: &[S]) -> Polytope<S> {
    Polytope::new(f.dim(), beats_everywhere_rows(f, new))
}

/// Some belief where `new` strictly beats every existing action.
fn strictly_improves<S: Scalar>(f: &MaxAffine<S>, new: &[S]) -> Result<bool> {
    let rows = beats_everywhere_rows(f, new);
    let strict = vec![true; rows.len()];
    Ok(strict_feasibility(&rows, &strict, &Polytope::simplex(f.dim()))?.0)
}

fn lp_empty<S: Scalar>(p: &Polytope<S>) -> Result<bool> {
    let n = p.dim();
    let mut lp = LinearProgram::new(Sense::Minimize, vec![S::zero(); n]);
    lp.add(vec![S::one(); n], Relation::Eq, S::one());
    for h in p.halfspaces() {
        lp.add(h.normal.clone(), Relation::Le, h.offset.clone());
    }
    lp.all_nonnegative();
    Ok(solve_lp(&lp)?.status == LpStatus::Infeasible)
}

fn check_new<S: Scalar>(d: &DecisionProblem<S>, new: &[S]) -> Result<()> {
    if new.len() != d.num_states() {
        return Err(Error::MalformedInput(format!(
            "new action has {} payoffs for {} states",
            new.len(),
            d.num_states()
        )));
    }
    Ok(())
}

/// Index of the first original cell containing the new action's region.
fn container<S: Scalar>(d: &DecisionProblem<S>, new: &[S]) -> Result<Option<(usize, Polytope<S>, Subdivision<S>)>> {
    check_new(d, new)?;
    let f = d.value_function();
    if !strictly_improves(&f, new)? {
        return Ok(None);
    }
    let region = improvement_region(&f, new);
    let sub = subdivision_of(&f);
    let idx = sub.cells().iter().position(|c| contains(&c.polytope, &region));
    Ok(idx.map(|i| (i, region, sub)))
}

/// Strictly optimal somewhere, and optimal only inside one original cell.
pub fn is_refining<S: Scalar>(d: &DecisionProblem<S>, new: &[S]) -> Result<bool> {
    Ok(container(d, new)?.is_some())
}

/// Refining, and the new region misses every other original cell.
pub fn is_strictly_refining<S: Scalar>(d: &DecisionProblem<S>, new: &[S]) -> Result<bool> {
    let Some((i, region, sub)) = container(d, new)? else { return Ok(false) };
    for (j, c) in sub.cells().iter().enumerate() {
        if j != i && !lp_empty(&intersect(&region, &c.polytope))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Never strictly better than the existing actions.
pub fn is_weakly_dominated<S: Scalar>(d: &DecisionProblem<S>, new: &[S]) -> Result<bool> {
    check_new(d, new)?;
    Ok(!strictly_improves(&d.value_function(), new)?)
}

/// Strictly worse than the existing actions at every belief.
pub fn is_strictly_dominated<S: Scalar>(d: &DecisionProblem<S>, new: &[S]) -> Result<bool> {
    check_new(d, new)?;
    lp_empty(&improvement_region(&d.value_function(), new))
}

/// Each new action, tested against the original actions alone, is weakly
/// dominated or refining.
pub fn is_totally_refining<S: Scalar>(d: &DecisionProblem<S>, new_actions: &[Vec<S>]) -> Result<bool> {
    for b in new_actions {
        if !(is_weakly_dominated(d, b)? || is_refining(d, b)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Each new action is strictly dominated or strictly refining.
pub fn is_totally_strictly_refining<S: Scalar>(d: &DecisionProblem<S>, new_actions: &[Vec<S>]) -> Result<bool> {
    for b in new_actions {
        if !(is_strictly_dominated(d, b)? || is_strictly_refining(d, b)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Some kept action is undominated in the full problem.
pub fn has_leftovers<S: Scalar>(d: &DecisionProblem<S>, kept: &[String]) -> Result<bool> {
    if kept.is_empty() {
        return Err(Error::Precondition("the kept action set is empty".into()));
    }
    if let Some(l) = kept.iter().find(|l| d.action(l).is_none()) {
        return Err(Error::Precondition(format!("kept label {l:?} is not an action")));
    }
    let und = crate::decision::undominated_actions(d);
    Ok(kept.iter().any(|l| und.contains(l)))
}

/// The value functions differ somewhere.
pub fn is_consequential<S: Scalar>(d: &DecisionProblem<S>, dhat: &DecisionProblem<S>) -> Result<bool> {
    if d.num_states() != dhat.num_states() {
        return Err(Error::MalformedInput("problems have different state counts".into()));
    }
    let (f, g) = (d.value_function(), dhat.value_function());
    let r = common_refinement(&subdivision_of(&f), &subdivision_of(&g));
    Ok(r.vertices().iter().any(|x| !crate::scalar::approx_eq(&f.eval(x), &g.eval(x))))
}

/// Affine `ℓ(μ) = λ·μ_{1..n-1} + τ`, also stored as the payoff vector `ℓ`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineWitness<S> {
    pub lambda: Vec<S>,
    pub tau: S,
    pub vector: Vec<S>,
}

impl<S: Scalar> AffineWitness<S> {
    pub fn from_vector(vector: Vec<S>) -> Self {
        let n = vector.len();
        let last = vector[n - 1].clone();
        let lambda = vector[..n - 1].iter().map(|x| x.clone() - last.clone()).collect();
        AffineWitness { lambda, tau: last, vector }
    }

    pub fn eval(&self, mu: &[S]) -> S {
        dot(&self.vector, mu)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShiftMajorization<S> {
    pub holds: bool,
    pub witness: Option<AffineWitness<S>>,
    /// `W(μ0)` minus its lower convex envelope at `μ0`; zero iff `holds`.
    pub gap: S,
}

fn check_prior<S: Scalar>(n: usize, mu0: &Belief<S>) -> Result<()> {
    if mu0.dim() != n {
        return Err(Error::MalformedInput(format!("prior has {} entries for {n} states", mu0.dim())));
    }
    if !mu0.is_interior() {
        return Err(Error::Precondition("prior must be in the interior of the simplex".into()));
    }
    Ok(())
}

/// Whether some affine `ℓ` has `vhat + ℓ >= v` everywhere with equality at
/// `mu0`. Solved as `max h·μ0` over affine minorants `h` of `W` at the
/// refinement vertices; `ℓ = -h`.
pub fn shift_majorizes<S: Scalar>(
    vhat: &MaxAffine<S>,
    v: &MaxAffine<S>,
    mu0: &Belief<S>,
) -> Result<ShiftMajorization<S>> {
    check_prior(v.dim(), mu0)?;
    let w = difference(vhat, v)?;
    let n = v.dim();
    let mut lp = LinearProgram::new(Sense::Maximize, mu0.as_slice().to_vec());
    for x in w.subdivision.vertices() {
        let wx = vhat.eval(&x) - v.eval(&x);
        lp.add(x, Relation::Le, wx);
    }
    let res = solve_lp(&lp)?;
    if res.status != LpStatus::Optimal {
        return Err(Error::Numeric(format!("envelope LP ended {:?}", res.status)));
    }
    let w0 = vhat.eval(mu0.as_slice()) - v.eval(mu0.as_slice());
    let gap = w0 - res.value.clone();
    let holds = if S::EXACT { gap.is_zero() } else { gap.abs() <= S::tol() };
    let witness = holds.then(|| AffineWitness::from_vector(res.solution.iter().map(|x| -x.clone()).collect()));
    debug_assert_eq!(res.solution.len(), n);
    Ok(ShiftMajorization { holds, witness, gap })
}

/// `min Σ λ_k w(v_k)` over convex weights on the subdivision's vertices with
/// barycenter `mu0`.
pub fn lower_convex_envelope_at<S: Scalar>(w: &CellwiseAffine<S>, mu0: &Belief<S>) -> Result<S> {
    let verts = w.subdivision.vertices();
    let n = mu0.dim();
    let vals: Vec<S> = verts
        .iter()
        .map(|x| w.eval(x).ok_or_else(|| Error::Representation("vertex outside every cell".into())))
        .collect::<Result<_>>()?;
    let mut lp = LinearProgram::new(Sense::Minimize, vals);
    for i in 0..n {
        lp.add(verts.iter().map(|x| x[i].clone()).collect(), Relation::Eq, mu0.as_slice()[i].clone());
    }
    lp.all_nonnegative();
    let res = solve_lp(&lp)?;
    match res.status {
        LpStatus::Optimal => Ok(res.value),
        s => Err(Error::Numeric(format!("envelope LP ended {s:?}"))),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TransformationKind {
    Addition { added: Vec<String>, totally_refining: bool, totally_strictly_refining: bool },
    Removal { removed: Vec<String>, has_leftovers: bool, consequential: bool, reverse_totally_refining: bool },
    General,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PriorVerdict<S> {
    pub prior: Vec<S>,
    pub shift_majorizes: bool,
    pub witness: Option<AffineWitness<S>>,
    pub envelope_gap: S,
    pub optimal_before: Vec<String>,
    pub optimal_after: Vec<String>,
    pub optimal_overlap: Vec<String>,
    pub generic: bool,
    /// Adding actions with a surviving prior-optimal action, or a
    /// consequential removal, is consistent with the shift test.
    pub prior_optimal_consistent: Option<bool>,
    /// For removals at a generic prior: shift-majorization only when the
    /// removal is inconsequential or the new prior-optimal action was weakly
    /// dominated by the old one.
    pub bad_removal_consistent: Option<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransformationVerdict<S> {
    pub convex_difference: bool,
    pub refines: bool,
    pub greater_value_free_prior: bool,
    pub nonconvexity_witness: Option<NonconvexityWitness<S>>,
    pub kind: TransformationKind,
    pub priors: Vec<PriorVerdict<S>>,
}

impl<S: Scalar> TransformationVerdict<S> {
    /// First supplied prior at which shift-majorization holds.
    pub fn shift_majorizes_at(&self) -> Option<(&[S], &AffineWitness<S>)> {
        self.priors.iter().find_map(|p| p.witness.as_ref().map(|w| (p.prior.as_slice(), w)))
    }
}

fn kind_of<S: Scalar>(d: &DecisionProblem<S>, dhat: &DecisionProblem<S>) -> Result<TransformationKind> {
    let keeps = |a: &DecisionProblem<S>, b: &DecisionProblem<S>| {
        a.actions().iter().all(|x| b.action(&x.label).is_some_and(|y| same_vector(&x.payoffs, &y.payoffs)))
    };
    let extra = |a: &DecisionProblem<S>, b: &DecisionProblem<S>| -> Vec<crate::decision::Action<S>> {
        b.actions().iter().filter(|x| a.action(&x.label).is_none()).cloned().collect()
    };
    if keeps(d, dhat) && dhat.actions().len() > d.actions().len() {
        let added = extra(d, dhat);
        let vecs: Vec<Vec<S>> = added.iter().map(|a| a.payoffs.clone()).collect();
        return Ok(TransformationKind::Addition {
            added: added.iter().map(|a| a.label.clone()).collect(),
            totally_refining: is_totally_refining(d, &vecs)?,
            totally_strictly_refining: is_totally_strictly_refining(d, &vecs)?,
        });
    }
    if keeps(dhat, d) && dhat.actions().len() < d.actions().len() {
        let removed = extra(dhat, d);
        let vecs: Vec<Vec<S>> = removed.iter().map(|a| a.payoffs.clone()).collect();
        let kept: Vec<String> = dhat.actions().iter().map(|a| a.label.clone()).collect();
        return Ok(TransformationKind::Removal {
            removed: removed.iter().map(|a| a.label.clone()).collect(),
            has_leftovers: has_leftovers(d, &kept)?,
            consequential: is_consequential(d, dhat)?,
            reverse_totally_refining: is_totally_refining(dhat, &vecs)?,
        });
    }
    Ok(TransformationKind::General)
}

fn unique_class<S: Scalar>(f: &MaxAffine<S>, mu: &[S]) -> Option<Vec<S>> {
    let v = f.eval(mu);
    let mut found: Option<Vec<S>> = None;
    for p in f.pieces() {
        if crate::scalar::approx_eq(&dot(&p.payoff, mu), &v) {
            match &found {
                None => found = Some(p.payoff.clone()),
                Some(q) if same_vector(q, &p.payoff) => {}
                Some(_) => return None,
            }
        }
    }
    found
}

fn prior_verdict<S: Scalar>(
    d: &DecisionProblem<S>,
    dhat: &DecisionProblem<S>,
    kind: &TransformationKind,
    mu0: &Belief<S>,
) -> Result<PriorVerdict<S>> {
    let (f, g) = (d.value_function(), dhat.value_function());
    let sm = shift_majorizes(&g, &f, mu0)?;
    let before = crate::decision::optimal_action_set(d, mu0)?;
    let after = crate::decision::optimal_action_set(dhat, mu0)?;
    let overlap: Vec<String> = before.iter().filter(|l| after.contains(l)).cloned().collect();
    let a0 = unique_class(&f, mu0.as_slice());
    let ahat0 = unique_class(&g, mu0.as_slice());
    let generic = a0.is_some() && ahat0.is_some();
    let (prior_ok, removal_ok) = match kind {
        TransformationKind::Addition { .. } => (Some(overlap.is_empty() || sm.holds), None),
        TransformationKind::Removal { consequential, .. } => {
            let p = (*consequential).then_some(!sm.holds || overlap.is_empty());
            let r = match (&a0, &ahat0) {
                (Some(a), Some(ah)) => {
                    let dominated = ah.iter().zip(a).all(|(x, y)| crate::scalar::ge(y, x));
                    Some(!sm.holds || !*consequential || dominated)
                }
                _ => None,
            };
            (p, r)
        }
        TransformationKind::General => (None, None),
    };
    Ok(PriorVerdict {
        prior: mu0.as_slice().to_vec(),
        shift_majorizes: sm.holds,
        witness: sm.witness,
        envelope_gap: sm.gap,
        optimal_before: before,
        optimal_after: after,
        optimal_overlap: overlap,
        generic,
        prior_optimal_consistent: prior_ok,
        bad_removal_consistent: removal_ok,
    })
}

/// Full comparison of `d` and `dhat`, with per-prior checks evaluated in
/// parallel.
pub fn classify_transformation<S: Scalar>(
    d: &DecisionProblem<S>,
    dhat: &DecisionProblem<S>,
    priors: &[Belief<S>],
) -> Result<TransformationVerdict<S>> {
    if d.num_states() != dhat.num_states() {
        return Err(Error::MalformedInput("problems have different state counts".into()));
    }
    let (f, g) = (d.value_function(), dhat.value_function());
    let (convex, witness) = is_convex_difference(&g, &f)?;
    let refines = refines(&subdivision_of(&g), &subdivision_of(&f));
    let kind = kind_of(d, dhat)?;
    let priors: Vec<PriorVerdict<S>> =
        priors.par_iter().map(|mu0| prior_verdict(d, dhat, &kind, mu0)).collect::<Result<_>>()?;
    Ok(TransformationVerdict {
        convex_difference: convex,
        refines,
        greater_value_free_prior: convex,
        nonconvexity_witness: witness,
        kind,
        priors,
    })
}

/// Convenience for an interior grid of candidate priors.
pub fn interior_priors<S: Scalar>(n: usize, resolution: usize) -> Vec<Belief<S>> {
    crate::acquisition::simplex_grid::<S>(n, resolution)
        .into_iter()
        .filter(|p| p.iter().all(|x| *x > S::zero()))
        .map(|p| Belief::new(p).expect("grid point"))
        .collect()
}
