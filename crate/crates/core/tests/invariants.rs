//! Randomized invariants of the kernel, geometry, decision, comparison,
//! transformation and acquisition layers.

use flexinfo_core::acquisition::PosteriorDistribution;
use flexinfo_core::compare::{is_convex_difference, refines};
use flexinfo_core::decision::{subdivision_of, Action};
use flexinfo_core::geometry::{contains, enumerate_vertices, intersect};
use flexinfo_core::lp::{is_feasible, solve_lp, LinearProgram, LpStatus, Relation, Sense};
use flexinfo_core::transforms::{add_actions, affine_transform, compose_utility, remove_actions, Phi};
use flexinfo_core::{
    is_mpc, solve_acquisition, Belief, DecisionProblem, Error, Halfspace, Polytope, Rational, Scalar, UPSCost,
};
use proptest::prelude::*;

fn q(p: i64, d: i64) -> Rational {
    Rational::new(p.into(), d.into())
}

fn qs(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| q(x, 1)).collect()
}

fn payoffs(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-5i64..=5, n), 2..=5)
}

fn problem(rows: &[Vec<i64>]) -> DecisionProblem<Rational> {
    DecisionProblem::from_payoffs(rows.iter().map(|r| qs(r)).collect()).unwrap()
}

/// A belief from positive integer weights.
fn belief(w: &[i64]) -> Vec<Rational> {
    let total: i64 = w.iter().sum();
    w.iter().map(|&x| q(x, total)).collect()
}

fn small_lp(rows: &[Vec<i64>], rhs: &[i64], obj: &[i64], sense: Sense) -> LinearProgram<Rational> {
    let mut lp = LinearProgram::new(sense, qs(obj));
    for (r, b) in rows.iter().zip(rhs) {
        lp.add(qs(r), Relation::Le, q(*b, 1));
    }
    // A box keeps every instance bounded.
    for j in 0..obj.len() {
        let mut e = vec![q(0, 1); obj.len()];
        e[j] = q(1, 1);
        lp.add(e, Relation::Le, q(10, 1));
    }
    lp.all_nonnegative();
    lp
}

fn float_lp(lp: &LinearProgram<Rational>) -> LinearProgram<f64> {
    let conv = |v: &[Rational]| v.iter().map(Scalar::to_f64).collect::<Vec<f64>>();
    let mut out = LinearProgram::new(lp.sense, conv(&lp.objective));
    for c in &lp.constraints {
        out.add(conv(&c.coeffs), c.relation, c.rhs.to_f64());
    }
    out.all_nonnegative();
    out
}

/// Vertices of `{μ ∈ Δ_3 : rows}` from every pair of tight rows.
fn brute_force_vertices(rows: &[Halfspace<Rational>]) -> Vec<Vec<Rational>> {
    let mut out: Vec<Vec<Rational>> = Vec::new();
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let m = [rows[i].normal.clone(), rows[j].normal.clone(), vec![q(1, 1); 3]];
            let b = [rows[i].offset.clone(), rows[j].offset.clone(), q(1, 1)];
            let det3 = |a: &[Vec<Rational>; 3]| {
                a[0][0].clone() * (a[1][1].clone() * a[2][2].clone() - a[1][2].clone() * a[2][1].clone())
                    - a[0][1].clone() * (a[1][0].clone() * a[2][2].clone() - a[1][2].clone() * a[2][0].clone())
                    + a[0][2].clone() * (a[1][0].clone() * a[2][1].clone() - a[1][1].clone() * a[2][0].clone())
            };
            let d = det3(&m);
            if d == q(0, 1) {
                continue;
            }
            let x: Vec<Rational> = (0..3)
                .map(|k| {
                    let mut mk = m.clone();
                    for r in 0..3 {
                        mk[r][k] = b[r].clone();
                    }
                    det3(&mk) / d.clone()
                })
                .collect();
            let feasible = rows.iter().all(|h| h.offset.clone() - dot(&h.normal, &x) >= q(0, 1));
            if feasible && !out.contains(&x) {
                out.push(x);
            }
        }
    }
    out.sort();
    out
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(q(0, 1), |s, (x, y)| s + x.clone() * y.clone())
}

fn halfspaces() -> impl Strategy<Value = Vec<(Vec<i64>, i64)>> {
    prop::collection::vec((prop::collection::vec(-3i64..=3, 3), -2i64..=3), 0..5)
}

fn polytope(hs: &[(Vec<i64>, i64)]) -> Polytope<Rational> {
    Polytope::new(3, hs.iter().map(|(n, b)| Halfspace::new(qs(n), q(*b, 1))).collect())
}

fn sorted_vertices(p: &Polytope<Rational>) -> Vec<Vec<Rational>> {
    let mut v: Vec<Vec<Rational>> = enumerate_vertices(p).into_iter().map(Belief::into_vec).collect();
    v.sort();
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn max_equals_minus_min_of_negation(
        rows in prop::collection::vec(prop::collection::vec(-4i64..=4, 3), 1..5),
        rhs in prop::collection::vec(0i64..=8, 5),
        obj in prop::collection::vec(-4i64..=4, 3),
    ) {
        let max = solve_lp(&small_lp(&rows, &rhs, &obj, Sense::Maximize)).unwrap();
        let neg: Vec<i64> = obj.iter().map(|c| -c).collect();
        let min = solve_lp(&small_lp(&rows, &rhs, &neg, Sense::Minimize)).unwrap();
        prop_assert_eq!(max.status, LpStatus::Optimal);
        prop_assert_eq!(max.value, -min.value);
    }

    #[test]
    fn optimal_solutions_satisfy_constraints_in_both_modes(
        rows in prop::collection::vec(prop::collection::vec(-4i64..=4, 3), 1..5),
        rhs in prop::collection::vec(-3i64..=8, 5),
        obj in prop::collection::vec(-4i64..=4, 3),
    ) {
        let lp = small_lp(&rows, &rhs, &obj, Sense::Maximize);
        let exact = solve_lp(&lp).unwrap();
        let flp = float_lp(&lp);
        let float = solve_lp(&flp).unwrap();
        prop_assert_eq!(exact.status, float.status);
        if exact.status == LpStatus::Optimal {
            prop_assert!(is_feasible(&lp, &exact.solution));
            prop_assert!(is_feasible(&flp, &float.solution));
            prop_assert!((exact.value.to_f64() - float.value).abs() <= 1e-7);
        }
    }

    #[test]
    fn vertices_match_brute_force(hs in halfspaces()) {
        let p = polytope(&hs);
        prop_assert_eq!(sorted_vertices(&p), brute_force_vertices(&p.all_rows()));
    }

    #[test]
    fn vertices_ignore_halfspace_order(hs in halfspaces(), rot in 0usize..5) {
        let mut shuffled = hs.clone();
        if !shuffled.is_empty() {
            let k = rot % shuffled.len();
            shuffled.rotate_left(k);
            shuffled.reverse();
        }
        prop_assert_eq!(sorted_vertices(&polytope(&hs)), sorted_vertices(&polytope(&shuffled)));
    }

    #[test]
    fn intersection_commutes_and_is_idempotent(a in halfspaces(), b in halfspaces()) {
        let (p, r) = (polytope(&a), polytope(&b));
        prop_assert_eq!(sorted_vertices(&intersect(&p, &r)), sorted_vertices(&intersect(&r, &p)));
        prop_assert_eq!(sorted_vertices(&intersect(&p, &p)), sorted_vertices(&p));
    }

    #[test]
    fn mutual_containment_means_equal_vertices(a in halfspaces(), b in halfspaces()) {
        let (p, r) = (polytope(&a), polytope(&b));
        if contains(&p, &r) && contains(&r, &p) {
            prop_assert_eq!(sorted_vertices(&p), sorted_vertices(&r));
        }
    }

    #[test]
    fn value_function_is_convex_on_segments(
        rows in payoffs(3),
        a in prop::collection::vec(1i64..=9, 3),
        b in prop::collection::vec(1i64..=9, 3),
        l in 0i64..=10,
    ) {
        let f = problem(&rows).value_function();
        let (x, y, lam) = (belief(&a), belief(&b), q(l, 10));
        let mid: Vec<Rational> =
            x.iter().zip(&y).map(|(u, v)| lam.clone() * u.clone() + (q(1, 1) - lam.clone()) * v.clone()).collect();
        prop_assert!(f.eval(&mid) <= lam.clone() * f.eval(&x) + (q(1, 1) - lam) * f.eval(&y));
    }

    #[test]
    fn cells_tile_the_simplex(rows in payoffs(3)) {
        let s = problem(&rows).subdivision();
        let total = s.cells().iter().fold(q(0, 1), |a, c| a + c.polytope.chart_volume().unwrap());
        prop_assert_eq!(total, q(1, 2));
    }

    #[test]
    fn each_cell_has_a_unique_argmax_point(rows in payoffs(3)) {
        let d = problem(&rows);
        let f = d.value_function();
        for c in d.subdivision().cells() {
            let center = c.polytope.centroid().unwrap();
            let winners: Vec<Vec<Rational>> = d
                .actions()
                .iter()
                .filter(|a| dot(&a.payoffs, &center) == f.eval(&center))
                .map(|a| a.payoffs.clone())
                .collect();
            prop_assert!(winners.iter().all(|w| Some(w) == c.payoff.as_ref()));
        }
    }

    #[test]
    fn duplicating_an_action_keeps_the_value(rows in payoffs(3), pick in 0usize..5, w in prop::collection::vec(1i64..=9, 3)) {
        let d = problem(&rows);
        let dup = d.actions()[pick % d.actions().len()].payoffs.clone();
        let mut actions = d.actions().to_vec();
        actions.push(Action::new("copy", dup));
        let e = DecisionProblem::new(d.states().to_vec(), actions).unwrap();
        let mu = belief(&w);
        prop_assert_eq!(d.value_function().eval(&mu), e.value_function().eval(&mu));
        prop_assert_eq!(d.subdivision().cells().len(), e.subdivision().cells().len());
    }

    #[test]
    fn add_then_remove_is_identity(rows in payoffs(2), extra in prop::collection::vec(-5i64..=5, 2)) {
        let d = problem(&rows);
        let bigger = add_actions(&d, &[qs(&extra)]).unwrap();
        let added: Vec<String> = bigger.actions()[d.actions().len()..].iter().map(|a| a.label.clone()).collect();
        let back = remove_actions(&bigger, &added).unwrap();
        prop_assert_eq!(back.actions(), d.actions());
    }

    #[test]
    fn affine_utility_equals_affine_transform(rows in payoffs(3), k in 1i64..=20, s in -5i64..=5) {
        let d = problem(&rows);
        let (k, s) = (q(k, 4), q(s, 1));
        let via_phi = compose_utility(&d, &Phi::Affine { k: k.clone(), s: s.clone() }).unwrap();
        let direct = affine_transform(&d, &k, &s).unwrap();
        prop_assert_eq!(via_phi.actions(), direct.actions());
    }

    #[test]
    fn convex_difference_implies_refinement(rows in payoffs(3), extra in prop::collection::vec(-5i64..=5, 3)) {
        let d = problem(&rows);
        let dhat = add_actions(&d, &[qs(&extra)]).unwrap();
        let (f, g) = (d.value_function(), dhat.value_function());
        if is_convex_difference(&g, &f).unwrap().0 {
            prop_assert!(refines(&subdivision_of(&g), &subdivision_of(&f)));
        }
    }

    #[test]
    fn finer_grids_never_lower_the_value(rows in payoffs(2), x in 1i64..=9, r in 2usize..=12) {
        let f = problem(&rows).value_function();
        let cost = UPSCost::Quadratic { matrix: vec![vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(1, 1)]] };
        let mu0 = Belief::binary(q(x, 10));
        let coarse = solve_acquisition(&f, &cost, &mu0, r).unwrap();
        let fine = solve_acquisition(&f, &cost, &mu0, 2 * r).unwrap();
        prop_assert!(fine.net_value >= coarse.net_value);
    }

    #[test]
    fn a_point_mass_contracts_any_spread(xs in prop::collection::vec(0i64..=12, 1..4), ws in prop::collection::vec(1i64..=5, 3)) {
        let mut pts = xs.clone();
        pts.sort_unstable();
        pts.dedup();
        let total: i64 = ws[..pts.len()].iter().sum();
        let spread = PosteriorDistribution::new(
            pts.iter().zip(&ws).map(|(&x, &w)| (vec![q(12 - x, 12), q(x, 12)], q(w, total))).collect(),
        ).unwrap();
        let point = PosteriorDistribution::new(vec![(spread.mean(), q(1, 1))]).unwrap();
        prop_assert!(is_mpc(&point, &spread).unwrap());
        prop_assert!(is_mpc(&spread, &spread).unwrap());
        prop_assert_eq!(is_mpc(&spread, &point).unwrap(), spread.len() == 1);
    }
}

#[test]
fn unequal_means_are_a_precondition_error() {
    let p = PosteriorDistribution::new(vec![(vec![q(1, 2), q(1, 2)], q(1, 1))]).unwrap();
    let r = PosteriorDistribution::new(vec![(vec![q(2, 3), q(1, 3)], q(1, 1))]).unwrap();
    assert!(matches!(is_mpc(&p, &r), Err(Error::Precondition(_))));
}
