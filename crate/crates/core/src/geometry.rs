//! Polytopes inside the belief simplex, stored by halfspaces with a lazily
//! computed vertex list.

use std::cmp::Ordering;
use std::sync::OnceLock;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::lp::strict_feasibility;
use crate::scalar::{dot, lex_cmp, Scalar};

/// A probability vector over the states.
#[derive(Clone, Debug, PartialEq)]
pub struct Belief<S>(Vec<S>);

impl<S: Scalar> Belief<S> {
    /// Validates nonnegativity and unit mass. Float input within 1e-9 of unit
    /// mass is renormalized.
    pub fn new(p: Vec<S>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::MalformedInput("belief has no entries".into()));
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(Error::NumericDomain("non-finite belief entry".into()));
        }
        if p.iter().any(|x| *x < -S::tol()) {
            return Err(Error::MalformedInput("negative belief entry".into()));
        }
        let total = p.iter().fold(S::zero(), |a, x| a + x.clone());
        if S::EXACT {
            if total != S::one() {
                return Err(Error::MalformedInput(format!("belief sums to {total}, not 1")));
            }
            return Ok(Belief(p));
        }
        if (total.clone() - S::one()).abs() > S::tol() {
            return Err(Error::MalformedInput(format!("belief sums to {total}, not 1")));
        }
        let p = p
            .into_iter()
            .map(|x| if x < S::zero() { S::zero() } else { x / total.clone() })
            .collect();
        Ok(Belief(p))
    }

    /// Vertex `i` of the simplex.
    pub fn vertex(n: usize, i: usize) -> Self {
        let mut p = vec![S::zero(); n];
        p[i] = S::one();
        Belief(p)
    }

    pub fn uniform(n: usize) -> Self {
        Belief(vec![S::one() / S::from_i64(n as i64); n])
    }

    /// Two-state belief putting `x` on the second state.
    pub fn binary(x: S) -> Self {
        Belief(vec![S::one() - x.clone(), x])
    }

    pub fn as_slice(&self) -> &[S] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<S> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_interior(&self) -> bool {
        self.0.iter().all(|x| *x > S::zero())
    }
}

/// `normal · μ <= offset`.
#[derive(Clone, Debug, PartialEq)]
pub struct Halfspace<S> {
    pub normal: Vec<S>,
    pub offset: S,
}

impl<S: Scalar> Halfspace<S> {
    pub fn new(normal: Vec<S>, offset: S) -> Self {
        Halfspace { normal, offset }
    }

    pub fn slack(&self, mu: &[S]) -> S {
        self.offset.clone() - dot(&self.normal, mu)
    }

    pub fn holds(&self, mu: &[S]) -> bool {
        self.slack(mu) >= -S::tol()
    }

    /// Rewrites the row so its normal is orthogonal to the all-ones vector.
    /// Rows that hold everywhere on the simplex become `None`.
    fn canonical(mut self) -> Option<Self> {
        let n = self.normal.len();
        if n == 0 {
            return Some(self);
        }
        let mean = self.normal.iter().fold(S::zero(), |a, x| a + x.clone()) / S::from_i64(n as i64);
        if !mean.is_zero() {
            for v in self.normal.iter_mut() {
                *v = v.clone() - mean.clone();
            }
            self.offset = self.offset - mean;
        }
        if S::EXACT {
            if self.normal.iter().all(Scalar::is_zero) && self.offset >= S::zero() {
                return None;
            }
        } else {
            let tiny = S::from_f64(1e-14).unwrap();
            if self.normal.iter().all(|v| v.abs() <= tiny) {
                for v in self.normal.iter_mut() {
                    *v = S::zero();
                }
                if self.offset >= -S::tol() {
                    return None;
                }
            }
        }
        Some(self)
    }
}

/// A polytope `{μ ∈ Δ : every halfspace holds}`.
#[derive(Debug)]
pub struct Polytope<S: Scalar> {
    n: usize,
    halfspaces: Vec<Halfspace<S>>,
    vertices: OnceLock<Vec<Vec<S>>>,
}

impl<S: Scalar> Clone for Polytope<S> {
    fn clone(&self) -> Self {
        Polytope { n: self.n, halfspaces: self.halfspaces.clone(), vertices: self.vertices.clone() }
    }
}

impl<S: Scalar> Polytope<S> {
    pub fn new(n: usize, halfspaces: Vec<Halfspace<S>>) -> Self {
        let mut hs: Vec<Halfspace<S>> = Vec::new();
        for h in halfspaces {
            assert_eq!(h.normal.len(), n, "halfspace dimension");
            if let Some(c) = h.canonical() {
                if !hs.contains(&c) {
                    hs.push(c);
                }
            }
        }
        Polytope { n, halfspaces: hs, vertices: OnceLock::new() }
    }

    pub fn simplex(n: usize) -> Self {
        Polytope::new(n, Vec::new())
    }

    /// `{μ : lo <= μ_last <= hi}`, the interval `[lo, hi]` in the usual
    /// two-state coordinate.
    pub fn interval(lo: S, hi: S) -> Self {
        Polytope::new(
            2,
            vec![
                Halfspace::new(vec![S::zero(), -S::one()], -lo),
                Halfspace::new(vec![S::zero(), S::one()], hi),
            ],
        )
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn halfspaces(&self) -> &[Halfspace<S>] {
        &self.halfspaces
    }

    pub fn vertices(&self) -> &[Vec<S>] {
        self.vertices.get_or_init(|| compute_vertices(self.n, &self.halfspaces))
    }

    pub fn is_empty(&self) -> bool {
        self.vertices().is_empty()
    }

    pub fn contains_point(&self, mu: &[S]) -> bool {
        mu.iter().all(|x| *x >= -S::tol()) && self.halfspaces.iter().all(|h| h.holds(mu))
    }

    pub fn centroid(&self) -> Option<Vec<S>> {
        let vs = self.vertices();
        if vs.is_empty() {
            return None;
        }
        let k = S::from_i64(vs.len() as i64);
        Some((0..self.n).map(|i| vs.iter().fold(S::zero(), |a, v| a + v[i].clone()) / k.clone()).collect())
    }

    /// All constraints including `μ_i >= 0`, as `normal · μ <= offset` rows.
    pub fn all_rows(&self) -> Vec<Halfspace<S>> {
        let mut rows: Vec<Halfspace<S>> = (0..self.n)
            .map(|i| {
                let mut e = vec![S::zero(); self.n];
                e[i] = -S::one();
                Halfspace::new(e, S::zero())
            })
            .collect();
        rows.extend(self.halfspaces.iter().cloned());
        rows
    }

    /// Volume in the chart that drops the last coordinate; `n <= 3` only.
    pub fn chart_volume(&self) -> Option<S> {
        let vs = self.vertices();
        match self.n {
            1 => Some(if vs.is_empty() { S::zero() } else { S::one() }),
            2 => {
                if vs.len() < 2 {
                    return Some(S::zero());
                }
                let lo = vs.iter().map(|v| v[0].clone()).fold(vs[0][0].clone(), |a, b| if b < a { b } else { a });
                let hi = vs.iter().map(|v| v[0].clone()).fold(vs[0][0].clone(), |a, b| if b > a { b } else { a });
                Some(hi - lo)
            }
            3 => Some(polygon_area(vs)),
            _ => None,
        }
    }
}

fn polygon_area<S: Scalar>(vs: &[Vec<S>]) -> S {
    if vs.len() < 3 {
        return S::zero();
    }
    let k = S::from_i64(vs.len() as i64);
    let cx = vs.iter().fold(S::zero(), |a, v| a + v[0].clone()) / k.clone();
    let cy = vs.iter().fold(S::zero(), |a, v| a + v[1].clone()) / k;
    let rel: Vec<(S, S)> = vs.iter().map(|v| (v[0].clone() - cx.clone(), v[1].clone() - cy.clone())).collect();
    let half = |p: &(S, S)| -> u8 {
        if p.1 > S::zero() || (p.1.is_zero() && p.0 > S::zero()) {
            0
        } else {
            1
        }
    };
    let mut order: Vec<usize> = (0..rel.len()).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (&rel[i], &rel[j]);
        half(a).cmp(&half(b)).then_with(|| {
            let cross = a.0.clone() * b.1.clone() - a.1.clone() * b.0.clone();
            if cross > S::zero() {
                Ordering::Less
            } else if cross < S::zero() {
                Ordering::Greater
            } else {
                Ordering::Equal
            }
        })
    });
    let mut twice = S::zero();
    for w in 0..order.len() {
        let p = &rel[order[w]];
        let q = &rel[order[(w + 1) % order.len()]];
        twice = twice + p.0.clone() * q.1.clone() - p.1.clone() * q.0.clone();
    }
    twice.abs() / S::from_i64(2)
}

/// Solves a square system by Gaussian elimination; `None` if singular.
pub fn solve_square<S: Scalar>(mut a: Vec<Vec<S>>, mut b: Vec<S>) -> Option<Vec<S>> {
    let n = b.len();
    for col in 0..n {
        let mut piv = None;
        let mut best = S::zero();
        for (r, row) in a.iter().enumerate().skip(col) {
            let v = row[col].abs();
            if v > best {
                best = v;
                piv = Some(r);
                if S::EXACT {
                    break;
                }
            }
        }
        let p = piv?;
        if !S::EXACT && best <= S::from_f64(1e-12).unwrap() {
            return None;
        }
        a.swap(col, p);
        b.swap(col, p);
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone() / a[col][col].clone();
            for c in col..n {
                let v = a[col][c].clone();
                a[r][c] = a[r][c].clone() - f.clone() * v;
            }
            let bc = b[col].clone();
            b[r] = b[r].clone() - f * bc;
        }
    }
    Some((0..n).map(|i| b[i].clone() / a[i][i].clone()).collect())
}

fn compute_vertices<S: Scalar>(n: usize, halfspaces: &[Halfspace<S>]) -> Vec<Vec<S>> {
    let mut rows: Vec<Halfspace<S>> = (0..n)
        .map(|i| {
            let mut e = vec![S::zero(); n];
            e[i] = -S::one();
            Halfspace::new(e, S::zero())
        })
        .collect();
    rows.extend(halfspaces.iter().cloned());
    let mut out: Vec<Vec<S>> = Vec::new();
    if n == 0 {
        return out;
    }
    let feasible = |mu: &[S]| rows.iter().all(|h| h.holds(mu));
    for combo in (0..rows.len()).combinations(n - 1) {
        let mut a: Vec<Vec<S>> = combo.iter().map(|&i| rows[i].normal.clone()).collect();
        let mut b: Vec<S> = combo.iter().map(|&i| rows[i].offset.clone()).collect();
        a.push(vec![S::one(); n]);
        b.push(S::one());
        let Some(mut mu) = solve_square(a, b) else { continue };
        if !S::EXACT {
            for v in mu.iter_mut() {
                if v.abs() < S::from_f64(1e-13).unwrap() {
                    *v = S::zero();
                }
            }
        }
        if !feasible(&mu) {
            continue;
        }
        let dup = out.iter().any(|v| {
            if S::EXACT {
                *v == mu
            } else {
                crate::scalar::max_norm_dist(v, &mu) < 1e-9
            }
        });
        if !dup {
            out.push(mu);
        }
    }
    out.sort_by(|a, b| lex_cmp(a, b));
    out
}

/// Extreme points of `p`; empty iff `p` is empty.
pub fn enumerate_vertices<S: Scalar>(p: &Polytope<S>) -> Vec<Belief<S>> {
    p.vertices().iter().map(|v| Belief(v.clone())).collect()
}

/// Whether `inner ⊆ outer`, checked on the vertices of `inner`.
pub fn contains<S: Scalar>(outer: &Polytope<S>, inner: &Polytope<S>) -> bool {
    inner.vertices().iter().all(|v| outer.halfspaces.iter().all(|h| h.holds(v)))
}

pub fn intersect<S: Scalar>(p: &Polytope<S>, q: &Polytope<S>) -> Polytope<S> {
    assert_eq!(p.n, q.n, "intersecting polytopes of different dimension");
    let mut hs = p.halfspaces.clone();
    hs.extend(q.halfspaces.iter().cloned());
    Polytope::new(p.n, hs)
}

/// Whether `p` has nonempty interior relative to the simplex.
pub fn is_full_dimensional<S: Scalar>(p: &Polytope<S>) -> bool {
    if p.is_empty() {
        return false;
    }
    let rows = p.all_rows();
    let strict = vec![true; rows.len()];
    let domain = Polytope::simplex(p.n);
    matches!(strict_feasibility(&rows, &strict, &domain), Ok((true, _)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(p: i64, d: i64) -> Rational {
        Rational::ratio(p, d)
    }

    fn pts(p: &Polytope<Rational>) -> Vec<Vec<Rational>> {
        p.vertices().to_vec()
    }

    #[test]
    fn whole_segment() {
        let p = Polytope::<Rational>::simplex(2);
        assert_eq!(pts(&p), vec![vec![q(0, 1), q(1, 1)], vec![q(1, 1), q(0, 1)]]);
    }

    #[test]
    fn half_segment() {
        let p = Polytope::new(2, vec![Halfspace::new(vec![q(0, 1), q(1, 1)], q(1, 2))]);
        assert_eq!(pts(&p), vec![vec![q(1, 2), q(1, 2)], vec![q(1, 1), q(0, 1)]]);
    }

    #[test]
    fn cell_of_first_action() {
        // (1,0)·μ >= (0,1)·μ  <=>  (-1, 1)·μ <= 0
        let p = Polytope::new(2, vec![Halfspace::new(vec![q(-1, 1), q(1, 1)], q(0, 1))]);
        assert_eq!(pts(&p), vec![vec![q(1, 2), q(1, 2)], vec![q(1, 1), q(0, 1)]]);
    }

    #[test]
    fn containment_on_segment() {
        let a = Polytope::interval(q(0, 1), q(1, 2));
        let b = Polytope::interval(q(0, 1), q(3, 4));
        assert!(contains(&a, &a));
        assert!(contains(&b, &a));
        assert!(!contains(&a, &b));
    }

    #[test]
    fn intersections() {
        let a = Polytope::interval(q(0, 1), q(1, 2));
        let b = Polytope::interval(q(1, 4), q(1, 1));
        let c = intersect(&a, &b);
        assert_eq!(pts(&c), pts(&Polytope::interval(q(1, 4), q(1, 2))));
        let d = intersect(&Polytope::interval(q(0, 1), q(1, 4)), &Polytope::interval(q(1, 2), q(1, 1)));
        assert!(d.is_empty());
    }

    #[test]
    fn full_dimensionality() {
        assert!(is_full_dimensional(&Polytope::<Rational>::simplex(3)));
        assert!(!is_full_dimensional(&Polytope::interval(q(1, 2), q(1, 2))));
        assert!(is_full_dimensional(&Polytope::interval(q(1, 4), q(1, 2))));
        assert!(!is_full_dimensional(&Polytope::interval(q(3, 4), q(1, 4))));
    }

    #[test]
    fn triangle_area() {
        let p = Polytope::<Rational>::simplex(3);
        assert_eq!(p.chart_volume().unwrap(), q(1, 2));
        let cut = Polytope::new(3, vec![Halfspace::new(vec![q(1, 1), q(0, 1), q(0, 1)], q(1, 2))]);
        assert_eq!(cut.chart_volume().unwrap(), q(3, 8));
    }

    #[test]
    fn always_true_rows_are_dropped() {
        let p = Polytope::new(2, vec![Halfspace::new(vec![q(1, 1), q(1, 1)], q(2, 1))]);
        assert!(p.halfspaces().is_empty());
    }

    #[test]
    fn belief_validation() {
        assert!(Belief::new(vec![q(1, 2), q(1, 2)]).is_ok());
        assert!(Belief::new(vec![q(1, 2), q(1, 3)]).is_err());
        assert!(Belief::new(vec![q(-1, 2), q(3, 2)]).is_err());
        let b = Belief::new(vec![0.3, 0.7 + 1e-12]).unwrap();
        assert!((b.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
