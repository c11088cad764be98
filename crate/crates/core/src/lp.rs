//! Dense two-phase primal simplex over any [`Scalar`].
//!
//! Variables are free unless `variable_bounds` says otherwise. Certificates are
//! stated against the original constraints plus one implicit row per finite
//! variable bound, so they can be checked without knowing the internal
//! standard form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Halfspace, Polytope};
use crate::scalar::{dot, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint<S> {
    pub coeffs: Vec<S>,
    pub relation: Relation,
    pub rhs: S,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Bound<S> {
    pub lower: Option<S>,
    pub upper: Option<S>,
}

impl<S: Scalar> Bound<S> {
    pub fn free() -> Self {
        Bound { lower: None, upper: None }
    }
    pub fn nonnegative() -> Self {
        Bound { lower: Some(S::zero()), upper: None }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram<S> {
    pub objective: Vec<S>,
    pub constraints: Vec<Constraint<S>>,
    /// `None` means every variable is free.
    pub variable_bounds: Option<Vec<Bound<S>>>,
    pub sense: Sense,
}

impl<S: Scalar> LinearProgram<S> {
    pub fn new(sense: Sense, objective: Vec<S>) -> Self {
        LinearProgram { objective, constraints: Vec::new(), variable_bounds: None, sense }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add(&mut self, coeffs: Vec<S>, relation: Relation, rhs: S) -> &mut Self {
        self.constraints.push(Constraint { coeffs, relation, rhs });
        self
    }

    pub fn all_nonnegative(&mut self) -> &mut Self {
        self.variable_bounds = Some(vec![Bound::nonnegative(); self.num_vars()]);
        self
    }

    pub fn set_bound(&mut self, var: usize, bound: Bound<S>) -> &mut Self {
        let n = self.num_vars();
        let bounds = self.variable_bounds.get_or_insert_with(|| vec![Bound::free(); n]);
        bounds[var] = bound;
        self
    }

    fn bound(&self, j: usize) -> Bound<S> {
        match &self.variable_bounds {
            Some(b) => b[j].clone(),
            None => Bound::free(),
        }
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(Error::MalformedInput(format!(
                    "constraint {i} has {} coefficients, objective has {n}",
                    c.coeffs.len()
                )));
            }
        }
        if let Some(b) = &self.variable_bounds {
            if b.len() != n {
                return Err(Error::MalformedInput(format!("{} bounds for {n} variables", b.len())));
            }
        }
        let finite = self.objective.iter().all(Scalar::is_finite)
            && self.constraints.iter().all(|c| c.rhs.is_finite() && c.coeffs.iter().all(Scalar::is_finite))
            && self.variable_bounds.iter().flatten().all(|b| {
                b.lower.iter().chain(b.upper.iter()).all(Scalar::is_finite)
            });
        if !finite {
            return Err(Error::NumericDomain("non-finite coefficient".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertificateKind {
    /// Dual solution proving optimality of the reported value.
    Optimality,
    /// Nonnegative combination of the constraints reading `0 <= negative`.
    Farkas,
}

/// Multipliers for each constraint row and each finite variable bound
/// (entries for infinite bounds are zero).
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate<S> {
    pub kind: CertificateKind,
    pub rows: Vec<S>,
    pub lower: Vec<S>,
    pub upper: Vec<S>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpResult<S> {
    pub status: LpStatus,
    pub solution: Vec<S>,
    pub value: S,
    pub certificate: Option<Certificate<S>>,
}

enum ColumnMap<S> {
    /// x = base + col
    Shift { col: usize, base: S, upper_row: Option<usize> },
    /// x = base - col
    Reflect { col: usize, base: S },
    /// x = pos - neg
    Split { pos: usize, neg: usize },
}

struct Tableau<S> {
    a: Vec<Vec<S>>,
    b: Vec<S>,
    r: Vec<S>,
    obj: S,
    basis: Vec<usize>,
    n_real: usize,
}

fn rc_tol<S: Scalar>() -> S {
    if S::EXACT {
        S::zero()
    } else {
        S::from_f64(1e-10).unwrap()
    }
}

const BLAND_AFTER_DEGENERATE: usize = 25;

impl<S: Scalar> Tableau<S> {
    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.a[row][col].clone();
        if piv != S::one() {
            for v in self.a[row].iter_mut() {
                if !v.is_zero() {
                    *v = v.clone() / piv.clone();
                }
            }
            self.b[row] = self.b[row].clone() / piv;
        }
        let prow = std::mem::take(&mut self.a[row]);
        let pb = self.b[row].clone();
        let nz: Vec<usize> = (0..prow.len()).filter(|&j| !prow[j].is_zero()).collect();
        for i in 0..self.a.len() {
            if i == row {
                continue;
            }
            let f = self.a[i][col].clone();
            if f.is_zero() {
                continue;
            }
            let ri = &mut self.a[i];
            for &j in &nz {
                ri[j] = ri[j].clone() - f.clone() * prow[j].clone();
            }
            ri[col] = S::zero();
            self.b[i] = self.b[i].clone() - f * pb.clone();
        }
        let f = self.r[col].clone();
        if !f.is_zero() {
            for &j in &nz {
                self.r[j] = self.r[j].clone() - f.clone() * prow[j].clone();
            }
            self.r[col] = S::zero();
            self.obj = self.obj.clone() + f * pb;
        }
        self.a[row] = prow;
        self.basis[row] = col;
    }

    /// Runs simplex iterations on the current reduced-cost row.
    /// Returns `false` if the objective is unbounded below.
    fn optimize(&mut self) -> Result<bool> {
        let m = self.a.len();
        let tol = rc_tol::<S>();
        let ptol = S::pivot_tol();
        let mut degenerate = 0usize;
        let limit = 100_000 + 50 * (m + self.n_real);
        for _ in 0..limit {
            let bland = degenerate >= BLAND_AFTER_DEGENERATE;
            let mut enter: Option<usize> = None;
            let mut best = -tol.clone();
            for j in 0..self.n_real {
                if self.r[j] < best {
                    enter = Some(j);
                    if bland {
                        break;
                    }
                    best = self.r[j].clone();
                }
            }
            let Some(col) = enter else { return Ok(true) };
            let mut leave: Option<(usize, S)> = None;
            for i in 0..m {
                let aij = &self.a[i][col];
                if *aij > ptol {
                    let ratio = self.b[i].clone() / aij.clone();
                    let better = match &leave {
                        None => true,
                        Some((k, best_ratio)) => {
                            let diff = ratio.clone() - best_ratio.clone();
                            diff < -S::pivot_tol()
                                || (diff.abs() <= S::pivot_tol() && self.basis[i] < self.basis[*k])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((row, ratio)) = leave else { return Ok(false) };
            if ratio.abs() <= S::pivot_tol() {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(row, col);
            if !S::EXACT {
                for v in self.b.iter_mut() {
                    if *v < S::zero() && v.abs() < S::from_f64(1e-12).unwrap() {
                        *v = S::zero();
                    }
                }
            }
        }
        Err(Error::Numeric("simplex iteration limit reached".into()))
    }
}

/// Solves `lp`; the arithmetic mode is the scalar type `S`.
pub fn solve_lp<S: Scalar>(lp: &LinearProgram<S>) -> Result<LpResult<S>> {
    lp.validate()?;
    let n = lp.num_vars();
    let sign = match lp.sense {
        Sense::Minimize => S::one(),
        Sense::Maximize => -S::one(),
    };

    // Structural columns.
    let mut maps = Vec::with_capacity(n);
    let mut n_struct = 0usize;
    let mut upper_rows: Vec<(usize, S)> = Vec::new();
    for j in 0..n {
        let b = lp.bound(j);
        match (b.lower, b.upper) {
            (Some(lo), hi) => {
                if let Some(h) = &hi {
                    if *h < lo {
                        return Ok(infeasible_bounds(lp, j));
                    }
                }
                let upper_row = hi.map(|h| {
                    upper_rows.push((n_struct, h - lo.clone()));
                    upper_rows.len() - 1
                });
                maps.push(ColumnMap::Shift { col: n_struct, base: lo, upper_row });
                n_struct += 1;
            }
            (None, Some(hi)) => {
                maps.push(ColumnMap::Reflect { col: n_struct, base: hi });
                n_struct += 1;
            }
            (None, None) => {
                maps.push(ColumnMap::Split { pos: n_struct, neg: n_struct + 1 });
                n_struct += 2;
            }
        }
    }
    let mut cost = vec![S::zero(); n_struct];
    for (j, m) in maps.iter().enumerate() {
        let c = sign.clone() * lp.objective[j].clone();
        match m {
            ColumnMap::Shift { col, .. } => cost[*col] = c,
            ColumnMap::Reflect { col, .. } => cost[*col] = -c,
            ColumnMap::Split { pos, neg } => {
                cost[*pos] = c.clone();
                cost[*neg] = -c;
            }
        }
    }

    // Rows: original constraints then upper-bound rows.
    let n_orig = lp.constraints.len();
    let m = n_orig + upper_rows.len();
    let n_slack = lp.constraints.iter().filter(|c| c.relation != Relation::Eq).count() + upper_rows.len();
    let n_real = n_struct + n_slack;
    let width = n_real + m;
    let mut a = vec![vec![S::zero(); width]; m];
    let mut b = vec![S::zero(); m];
    let mut slack = n_struct;
    for (i, c) in lp.constraints.iter().enumerate() {
        let mut rhs = c.rhs.clone();
        for (j, coef) in c.coeffs.iter().enumerate() {
            if coef.is_zero() {
                continue;
            }
            match &maps[j] {
                ColumnMap::Shift { col, base, .. } => {
                    a[i][*col] = coef.clone();
                    if !base.is_zero() {
                        rhs = rhs - coef.clone() * base.clone();
                    }
                }
                ColumnMap::Reflect { col, base } => {
                    a[i][*col] = -coef.clone();
                    rhs = rhs - coef.clone() * base.clone();
                }
                ColumnMap::Split { pos, neg } => {
                    a[i][*pos] = coef.clone();
                    a[i][*neg] = -coef.clone();
                }
            }
        }
        match c.relation {
            Relation::Le => {
                a[i][slack] = S::one();
                slack += 1;
            }
            Relation::Ge => {
                a[i][slack] = -S::one();
                slack += 1;
            }
            Relation::Eq => {}
        }
        b[i] = rhs;
    }
    for (k, (col, cap)) in upper_rows.iter().enumerate() {
        let i = n_orig + k;
        a[i][*col] = S::one();
        a[i][slack] = S::one();
        slack += 1;
        b[i] = cap.clone();
    }
    let mut sigma = vec![S::one(); m];
    for i in 0..m {
        if b[i] < S::zero() {
            sigma[i] = -S::one();
            for v in a[i].iter_mut() {
                if !v.is_zero() {
                    *v = -v.clone();
                }
            }
            b[i] = -b[i].clone();
        }
        a[i][n_real + i] = S::one();
    }

    // Phase 1.
    let mut r = vec![S::zero(); width];
    for j in 0..n_real {
        let mut s = S::zero();
        for row in &a {
            if !row[j].is_zero() {
                s = s - row[j].clone();
            }
        }
        r[j] = s;
    }
    let obj = b.iter().fold(S::zero(), |acc, v| acc + v.clone());
    let mut t = Tableau { a, b, r, obj, basis: (n_real..n_real + m).collect(), n_real };
    t.optimize()?;

    let b_scale = t.b.iter().fold(S::one(), |acc, v| if v.abs() > acc { v.abs() } else { acc });
    let infeasible = if S::EXACT { t.obj > S::zero() } else { t.obj > S::tol() * b_scale };
    if infeasible {
        let z: Vec<S> = (0..m).map(|i| S::one() - t.r[n_real + i].clone()).collect();
        let y: Vec<S> = (0..m).map(|i| -(sigma[i].clone() * z[i].clone())).collect();
        let mut lower = vec![S::zero(); n];
        let mut upper = vec![S::zero(); n];
        for (j, map) in maps.iter().enumerate() {
            match map {
                ColumnMap::Shift { col, upper_row, .. } => {
                    lower[j] = -t.r[*col].clone();
                    if let Some(u) = upper_row {
                        upper[j] = y[n_orig + u].clone();
                    }
                }
                ColumnMap::Reflect { col, .. } => upper[j] = t.r[*col].clone(),
                ColumnMap::Split { .. } => {}
            }
        }
        return Ok(LpResult {
            status: LpStatus::Infeasible,
            solution: Vec::new(),
            value: S::zero(),
            certificate: Some(Certificate {
                kind: CertificateKind::Farkas,
                rows: y[..n_orig].to_vec(),
                lower,
                upper,
            }),
        });
    }

    // Drive remaining artificials out of the basis where possible.
    for i in 0..m {
        if t.basis[i] >= n_real {
            let mut best: Option<usize> = None;
            for j in 0..n_real {
                if t.a[i][j].abs() > S::pivot_tol() {
                    match best {
                        Some(k) if t.a[i][k].abs() >= t.a[i][j].abs() => {}
                        _ => best = Some(j),
                    }
                    if S::EXACT {
                        break;
                    }
                }
            }
            if let Some(j) = best {
                t.pivot(i, j);
            }
        }
    }

    // Phase 2.
    let mut full_cost = vec![S::zero(); width];
    full_cost[..n_struct].clone_from_slice(&cost);
    for j in 0..width {
        let mut s = full_cost[j].clone();
        for i in 0..m {
            let cb = &full_cost[t.basis[i]];
            if !cb.is_zero() && !t.a[i][j].is_zero() {
                s = s - cb.clone() * t.a[i][j].clone();
            }
        }
        t.r[j] = s;
    }
    t.obj = (0..m).fold(S::zero(), |acc, i| acc + full_cost[t.basis[i]].clone() * t.b[i].clone());
    if !t.optimize()? {
        return Ok(LpResult {
            status: LpStatus::Unbounded,
            solution: Vec::new(),
            value: S::zero(),
            certificate: None,
        });
    }

    let mut xs = vec![S::zero(); width];
    for i in 0..m {
        xs[t.basis[i]] = t.b[i].clone();
    }
    let mut x = Vec::with_capacity(n);
    for map in &maps {
        x.push(match map {
            ColumnMap::Shift { col, base, .. } => base.clone() + xs[*col].clone(),
            ColumnMap::Reflect { col, base } => base.clone() - xs[*col].clone(),
            ColumnMap::Split { pos, neg } => xs[*pos].clone() - xs[*neg].clone(),
        });
    }
    let value = dot(&lp.objective, &x);

    let yp: Vec<S> = (0..m).map(|i| -t.r[n_real + i].clone()).collect();
    let y: Vec<S> = (0..m).map(|i| sign.clone() * sigma[i].clone() * yp[i].clone()).collect();
    let mut lower = vec![S::zero(); n];
    let mut upper = vec![S::zero(); n];
    for (j, map) in maps.iter().enumerate() {
        match map {
            ColumnMap::Shift { col, upper_row, .. } => {
                lower[j] = sign.clone() * t.r[*col].clone();
                if let Some(u) = upper_row {
                    upper[j] = y[n_orig + u].clone();
                }
            }
            ColumnMap::Reflect { col, .. } => upper[j] = -(sign.clone() * t.r[*col].clone()),
            ColumnMap::Split { .. } => {}
        }
    }
    Ok(LpResult {
        status: LpStatus::Optimal,
        solution: x,
        value,
        certificate: Some(Certificate {
            kind: CertificateKind::Optimality,
            rows: y[..n_orig].to_vec(),
            lower,
            upper,
        }),
    })
}

fn infeasible_bounds<S: Scalar>(lp: &LinearProgram<S>, j: usize) -> LpResult<S> {
    let n = lp.num_vars();
    let mut lower = vec![S::zero(); n];
    let mut upper = vec![S::zero(); n];
    lower[j] = -S::one();
    upper[j] = S::one();
    LpResult {
        status: LpStatus::Infeasible,
        solution: Vec::new(),
        value: S::zero(),
        certificate: Some(Certificate {
            kind: CertificateKind::Farkas,
            rows: vec![S::zero(); lp.constraints.len()],
            lower,
            upper,
        }),
    }
}

fn scaled_tol<S: Scalar>(scale: &S) -> S {
    if S::EXACT {
        S::zero()
    } else {
        S::tol() * (S::one() + scale.abs())
    }
}

/// Checks `x` against every constraint and bound within the mode tolerance.
pub fn is_feasible<S: Scalar>(lp: &LinearProgram<S>, x: &[S]) -> bool {
    if x.len() != lp.num_vars() {
        return false;
    }
    for c in &lp.constraints {
        let lhs = dot(&c.coeffs, x);
        let tol = scaled_tol(&c.rhs);
        let ok = match c.relation {
            Relation::Le => lhs <= c.rhs.clone() + tol,
            Relation::Ge => lhs >= c.rhs.clone() - tol,
            Relation::Eq => (lhs - c.rhs.clone()).abs() <= tol,
        };
        if !ok {
            return false;
        }
    }
    (0..x.len()).all(|j| {
        let b = lp.bound(j);
        b.lower.is_none_or(|lo| x[j] >= lo.clone() - scaled_tol(&lo))
            && b.upper.is_none_or(|hi| x[j] <= hi.clone() + scaled_tol(&hi))
    })
}

/// Σ multiplier·row over constraints and bounds, per variable, and the
/// matching combination of right-hand sides.
fn combine<S: Scalar>(lp: &LinearProgram<S>, cert: &Certificate<S>) -> Option<(Vec<S>, S)> {
    let n = lp.num_vars();
    if cert.rows.len() != lp.constraints.len() || cert.lower.len() != n || cert.upper.len() != n {
        return None;
    }
    let mut lhs = vec![S::zero(); n];
    let mut rhs = S::zero();
    for (c, y) in lp.constraints.iter().zip(&cert.rows) {
        if y.is_zero() {
            continue;
        }
        for (j, a) in c.coeffs.iter().enumerate() {
            if !a.is_zero() {
                lhs[j] = lhs[j].clone() + y.clone() * a.clone();
            }
        }
        rhs = rhs + y.clone() * c.rhs.clone();
    }
    for j in 0..n {
        let b = lp.bound(j);
        match b.lower {
            Some(lo) => {
                lhs[j] = lhs[j].clone() + cert.lower[j].clone();
                rhs = rhs + cert.lower[j].clone() * lo;
            }
            None if !cert.lower[j].is_zero() => return None,
            None => {}
        }
        match b.upper {
            Some(hi) => {
                lhs[j] = lhs[j].clone() + cert.upper[j].clone();
                rhs = rhs + cert.upper[j].clone() * hi;
            }
            None if !cert.upper[j].is_zero() => return None,
            None => {}
        }
    }
    Some((lhs, rhs))
}

fn signs_ok<S: Scalar>(lp: &LinearProgram<S>, cert: &Certificate<S>, le_nonneg: bool) -> bool {
    let t = S::tol();
    let nonneg = |v: &S| *v >= -t.clone();
    let nonpos = |v: &S| *v <= t.clone();
    let (le_ok, ge_ok): (&dyn Fn(&S) -> bool, &dyn Fn(&S) -> bool) =
        if le_nonneg { (&nonneg, &nonpos) } else { (&nonpos, &nonneg) };
    lp.constraints.iter().zip(&cert.rows).all(|(c, y)| match c.relation {
        Relation::Le => le_ok(y),
        Relation::Ge => ge_ok(y),
        Relation::Eq => true,
    }) && cert.lower.iter().all(ge_ok)
        && cert.upper.iter().all(le_ok)
}

/// Verifies a Farkas certificate: the combination has zero coefficients and a
/// negative right-hand side, proving no feasible point exists.
pub fn verify_farkas<S: Scalar>(lp: &LinearProgram<S>, cert: &Certificate<S>) -> bool {
    if cert.kind != CertificateKind::Farkas || !signs_ok(lp, cert, true) {
        return false;
    }
    let Some((lhs, rhs)) = combine(lp, cert) else { return false };
    lhs.iter().all(|v| v.abs() <= S::tol()) && rhs < -S::tol()
}

/// Verifies primal feasibility, dual feasibility and a zero duality gap.
pub fn verify_optimality<S: Scalar>(lp: &LinearProgram<S>, res: &LpResult<S>) -> bool {
    let Some(cert) = &res.certificate else { return false };
    if res.status != LpStatus::Optimal || cert.kind != CertificateKind::Optimality {
        return false;
    }
    if !is_feasible(lp, &res.solution) {
        return false;
    }
    let le_nonneg = lp.sense == Sense::Maximize;
    if !signs_ok(lp, cert, le_nonneg) {
        return false;
    }
    let Some((lhs, rhs)) = combine(lp, cert) else { return false };
    let stationary = lhs
        .iter()
        .zip(&lp.objective)
        .all(|(l, c)| (l.clone() - c.clone()).abs() <= scaled_tol(c));
    stationary && (rhs - res.value.clone()).abs() <= scaled_tol(&res.value)
}

/// Decides whether some point of `domain` satisfies every row, with the
/// rows flagged in `strict` holding strictly. Maximizes the smallest strict
/// slack `t <= 1`; the witness is the maximizer.
pub fn strict_feasibility<S: Scalar>(
    rows: &[Halfspace<S>],
    strict: &[bool],
    domain: &Polytope<S>,
) -> Result<(bool, Vec<S>)> {
    if rows.len() != strict.len() {
        return Err(Error::MalformedInput("strict mask length differs from row count".into()));
    }
    let n = domain.dim();
    if rows.iter().any(|h| h.normal.len() != n) {
        return Err(Error::MalformedInput("row dimension differs from domain".into()));
    }
    if domain.is_empty() {
        return Err(Error::Precondition("strict feasibility over an empty domain".into()));
    }
    let mut obj = vec![S::zero(); n + 1];
    obj[n] = S::one();
    let mut lp = LinearProgram::new(Sense::Maximize, obj);
    let mut ones = vec![S::one(); n];
    ones.push(S::zero());
    lp.add(ones, Relation::Eq, S::one());
    for h in domain.halfspaces() {
        let mut c = h.normal.clone();
        c.push(S::zero());
        lp.add(c, Relation::Le, h.offset.clone());
    }
    for (h, &s) in rows.iter().zip(strict) {
        let mut c = h.normal.clone();
        c.push(if s { S::one() } else { S::zero() });
        lp.add(c, Relation::Le, h.offset.clone());
    }
    let mut bounds = vec![Bound::nonnegative(); n];
    bounds.push(Bound { lower: None, upper: Some(S::one()) });
    lp.variable_bounds = Some(bounds);
    let res = solve_lp(&lp)?;
    match res.status {
        LpStatus::Optimal => {
            let t = res.solution[n].clone();
            let ok = if S::EXACT { t > S::zero() } else { t > S::tol() };
            Ok((ok, res.solution[..n].to_vec()))
        }
        LpStatus::Infeasible => Ok((false, Vec::new())),
        LpStatus::Unbounded => Err(Error::Numeric("strict feasibility LP unbounded".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(p: i64) -> Rational {
        Rational::from_i64(p)
    }

    #[test]
    fn box_maximum() {
        let mut lp = LinearProgram::new(Sense::Maximize, vec![q(1)]);
        lp.add(vec![q(1)], Relation::Le, q(3)).add(vec![q(1)], Relation::Ge, q(0));
        let r = solve_lp(&lp).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert_eq!(r.solution, vec![q(3)]);
        assert_eq!(r.value, q(3));
        assert!(verify_optimality(&lp, &r));
    }

    #[test]
    fn simplex_face() {
        let mut lp = LinearProgram::new(Sense::Maximize, vec![q(1), q(1)]);
        lp.add(vec![q(1), q(1)], Relation::Le, q(1)).all_nonnegative();
        let r = solve_lp(&lp).unwrap();
        assert_eq!(r.value, q(1));
        assert!(verify_optimality(&lp, &r));
    }

    #[test]
    fn contradictory_bounds_give_farkas() {
        let mut lp = LinearProgram::new(Sense::Maximize, vec![q(1)]);
        lp.add(vec![q(1)], Relation::Le, q(1)).add(vec![q(1)], Relation::Ge, q(2));
        let r = solve_lp(&lp).unwrap();
        assert_eq!(r.status, LpStatus::Infeasible);
        assert!(verify_farkas(&lp, r.certificate.as_ref().unwrap()));
    }

    #[test]
    fn crossed_variable_bounds_are_infeasible() {
        let mut lp = LinearProgram::new(Sense::Minimize, vec![q(1)]);
        lp.set_bound(0, Bound { lower: Some(q(2)), upper: Some(q(1)) });
        let r = solve_lp(&lp).unwrap();
        assert_eq!(r.status, LpStatus::Infeasible);
        assert!(verify_farkas(&lp, r.certificate.as_ref().unwrap()));
    }

    #[test]
    fn unbounded_detected() {
        let mut lp = LinearProgram::new(Sense::Maximize, vec![q(1), q(-1)]);
        lp.add(vec![q(1), q(-1)], Relation::Ge, q(0)).all_nonnegative();
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn mixed_bounds_certificate() {
        // min x - 2y + z, x in [1, 4], y <= 3 (free below), z free, x + y + z = 2, y - z >= -1
        let mut lp = LinearProgram::new(Sense::Minimize, vec![q(1), q(-2), q(1)]);
        lp.add(vec![q(1), q(1), q(1)], Relation::Eq, q(2));
        lp.add(vec![q(0), q(1), q(-1)], Relation::Ge, q(-1));
        lp.add(vec![q(1), q(0), q(0)], Relation::Le, q(10));
        lp.set_bound(0, Bound { lower: Some(q(1)), upper: Some(q(4)) });
        lp.set_bound(1, Bound { lower: None, upper: Some(q(3)) });
        let r = solve_lp(&lp).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert!(verify_optimality(&lp, &r), "{r:?}");
    }

    #[test]
    fn dimension_mismatch_is_malformed() {
        let mut lp = LinearProgram::new(Sense::Maximize, vec![q(1)]);
        lp.add(vec![q(1), q(1)], Relation::Le, q(1));
        assert!(matches!(solve_lp(&lp), Err(Error::MalformedInput(_))));
    }

    #[test]
    fn non_finite_is_domain_error() {
        let mut lp = LinearProgram::new(Sense::Maximize, vec![f64::NAN]);
        lp.add(vec![1.0], Relation::Le, 1.0);
        assert!(matches!(solve_lp(&lp), Err(Error::NumericDomain(_))));
    }

    #[test]
    fn strict_rows_on_unit_interval() {
        // Beliefs (1-x, x); row "x > 0" is -mu_2 < 0.
        let dom = Polytope::<Rational>::simplex(2);
        let pos = Halfspace { normal: vec![q(0), q(-1)], offset: q(0) };
        let (ok, w) = strict_feasibility(&[pos], &[true], &dom).unwrap();
        assert!(ok);
        assert!(w[1] > q(0));
        let gt1 = Halfspace { normal: vec![q(0), q(-1)], offset: q(-1) };
        let (ok, _) = strict_feasibility(&[gt1], &[true], &dom).unwrap();
        assert!(!ok);
    }

    #[test]
    fn strict_feasibility_empty_domain_is_precondition_error() {
        let empty = Polytope::new(2, vec![Halfspace { normal: vec![q(0), q(0)], offset: q(-1) }]);
        assert!(matches!(
            strict_feasibility::<Rational>(&[], &[], &empty),
            Err(Error::Precondition(_))
        ));
    }
}
