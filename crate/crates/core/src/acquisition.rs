//! Posterior-separable costs, flexible acquisition by grid concavification,
//! the mean-preserving-contraction order, and cost constructions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decision::{same_vector, subdivision_of, DecisionProblem, MaxAffine};
use crate::error::{Error, Result};
use crate::geometry::Belief;
use crate::lp::{solve_lp, Certificate, CertificateKind, LinearProgram, LpStatus, Relation, Sense};
use crate::scalar::{approx_eq, dot, sub_vec, vec_approx_eq, Scalar};

/// Feasibility slack for float coupling rows.
pub const MPC_FLOAT_SLACK: f64 = 1e-8;
/// Float weights below this are dropped from extracted supports.
pub const SUPPORT_THRESHOLD: f64 = 1e-9;
/// Halvings tried by [`synthesize_cost`] before giving up.
pub const MAX_HALVINGS: usize = 60;
/// Reduced costs above `-NEAR_TIE · scale` count as possible ties.
const NEAR_TIE: f64 = 1e-6;

/// Points of the simplex with coordinates in multiples of `1/resolution`.
pub fn simplex_grid<S: Scalar>(n: usize, resolution: usize) -> Vec<Vec<S>> {
    fn rec<S: Scalar>(i: usize, left: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<S>>) {
        if i == n - 1 {
            cur[i] = left;
            out.push(cur.iter().map(|&k| S::ratio(k as i64, r as i64)).collect());
            return;
        }
        for k in (0..=left).rev() {
            cur[i] = k;
            rec(i + 1, left - k, n, r, cur, out);
        }
    }
    let mut out = Vec::new();
    if n > 0 && resolution > 0 {
        rec::<S>(0, resolution, n, resolution, &mut vec![0; n], &mut out);
    }
    out
}

/// Grid resolution used when none is given: 400, 60 and 20 steps for two,
/// three and more states.
pub fn default_resolution(n: usize) -> usize {
    match n {
        0..=2 => 400,
        3 => 60,
        _ => 20,
    }
}

fn is_belief<S: Scalar>(p: &[S]) -> bool {
    let sum = p.iter().fold(S::zero(), |a, x| a + x.clone());
    let nonneg = p.iter().all(|x| *x >= -S::tol());
    nonneg && if S::EXACT { sum == S::one() } else { approx_eq(&sum, &S::one()) }
}

fn same_point<S: Scalar>(a: &[S], b: &[S]) -> bool {
    if S::EXACT {
        same_vector(a, b)
    } else {
        vec_approx_eq(a, b)
    }
}

/// A finitely supported distribution over beliefs.
#[derive(Clone, Debug, PartialEq)]
pub struct PosteriorDistribution<S> {
    support: Vec<(Vec<S>, S)>,
}

impl<S: Scalar> PosteriorDistribution<S> {
    pub fn new(support: Vec<(Vec<S>, S)>) -> Result<Self> {
        let Some(n) = support.first().map(|(p, _)| p.len()) else {
            return Err(Error::MalformedInput("distribution with empty support".into()));
        };
        if n < 2 || support.iter().any(|(p, _)| p.len() != n) {
            return Err(Error::MalformedInput("support points must share a dimension of at least 2".into()));
        }
        if support.iter().any(|(p, w)| !w.is_finite() || p.iter().any(|x| !x.is_finite())) {
            return Err(Error::NumericDomain("non-finite entry in distribution".into()));
        }
        if let Some((p, _)) = support.iter().find(|(p, _)| !is_belief(p)) {
            return Err(Error::MalformedInput(format!("support point {p:?} is not a belief")));
        }
        if support.iter().any(|(_, w)| !(*w > S::zero())) {
            return Err(Error::MalformedInput("weights must be positive".into()));
        }
        let total = support.iter().fold(S::zero(), |a, (_, w)| a + w.clone());
        let sums_to_one = if S::EXACT { total == S::one() } else { approx_eq(&total, &S::one()) };
        if !sums_to_one {
            return Err(Error::MalformedInput(format!("weights sum to {total}, not 1")));
        }
        for (i, (p, _)) in support.iter().enumerate() {
            if support[..i].iter().any(|(q, _)| same_point(p, q)) {
                return Err(Error::MalformedInput(format!("support point {p:?} repeated")));
            }
        }
        Ok(PosteriorDistribution { support })
    }

    pub fn degenerate(mu: &Belief<S>) -> Self {
        PosteriorDistribution { support: vec![(mu.as_slice().to_vec(), S::one())] }
    }

    pub fn support(&self) -> &[(Vec<S>, S)] {
        &self.support
    }

    pub fn points(&self) -> impl Iterator<Item = &[S]> {
        self.support.iter().map(|(p, _)| p.as_slice())
    }

    pub fn dim(&self) -> usize {
        self.support[0].0.len()
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn mean(&self) -> Vec<S> {
        let mut m = vec![S::zero(); self.dim()];
        for (p, w) in &self.support {
            for (mi, pi) in m.iter_mut().zip(p) {
                *mi = mi.clone() + w.clone() * pi.clone();
            }
        }
        m
    }

    pub fn expect(&self, f: impl Fn(&[S]) -> S) -> S {
        self.support.iter().fold(S::zero(), |a, (p, w)| a + w.clone() * f(p))
    }

    /// Fails with a plausibility error unless the mean is `mu0`.
    pub fn check_plausible(&self, mu0: &[S]) -> Result<()> {
        let m = self.mean();
        let ok = m.len() == mu0.len()
            && if S::EXACT { same_vector(&m, mu0) } else { m.iter().zip(mu0).all(|(a, b)| approx_eq(a, b)) };
        if ok {
            Ok(())
        } else {
            Err(Error::Plausibility(format!("mean {m:?} differs from prior {mu0:?}")))
        }
    }
}

/// `slope·μ + ε‖μ - center‖²`, the distance taken over all coordinates but
/// the last.
#[derive(Clone, Debug, PartialEq)]
pub struct Paraboloid<S> {
    pub label: String,
    pub slope: Vec<S>,
    pub center: Vec<S>,
}

/// Potential `c` of a cost `D(Φ) = E_Φ c - c(μ0)`.
#[derive(Clone, Debug, PartialEq)]
pub enum UPSCost<S: Scalar> {
    /// `scale · Σ μ_i ln μ_i`; float mode only.
    ScaledEntropy { scale: S },
    /// `μᵀ A μ`.
    Quadratic { matrix: Vec<Vec<S>> },
    MaxParaboloid { epsilon: S, pieces: Vec<Paraboloid<S>> },
    /// `ε ρ(μ) + base(μ)`.
    AffineShiftOfValue { base: MaxAffine<S>, epsilon: S, regularizer: Box<UPSCost<S>> },
}

pub(crate) fn chart_sq_dist<S: Scalar>(a: &[S], b: &[S]) -> S {
    let k = a.len().saturating_sub(1);
    a[..k].iter().zip(&b[..k]).fold(S::zero(), |s, (x, y)| {
        let d = x.clone() - y.clone();
        s + d.clone() * d
    })
}

impl<S: Scalar> UPSCost<S> {
    pub fn entropy(scale: S) -> Self {
        UPSCost::ScaledEntropy { scale }
    }

    /// `μ·μ`.
    pub fn squared_norm(n: usize) -> Self {
        let matrix = (0..n).map(|i| (0..n).map(|j| if i == j { S::one() } else { S::zero() }).collect()).collect();
        UPSCost::Quadratic { matrix }
    }

    pub fn family(&self) -> &'static str {
        match self {
            UPSCost::ScaledEntropy { .. } => "scaled_entropy",
            UPSCost::Quadratic { .. } => "quadratic",
            UPSCost::MaxParaboloid { .. } => "max_paraboloid",
            UPSCost::AffineShiftOfValue { .. } => "affine_shift_of_value",
        }
    }

    /// Checks parameters against an `n`-state simplex.
    pub fn validate(&self, n: usize) -> Result<()> {
        let positive = |x: &S, what: &str| {
            if x.is_finite() && *x > S::zero() {
                Ok(())
            } else {
                Err(Error::MalformedInput(format!("{what} must be positive, got {x}")))
            }
        };
        match self {
            UPSCost::ScaledEntropy { scale } => positive(scale, "entropy scale"),
            UPSCost::Quadratic { matrix } => {
                if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
                    return Err(Error::MalformedInput(format!("quadratic cost needs a {n}x{n} matrix")));
                }
                Ok(())
            }
            UPSCost::MaxParaboloid { epsilon, pieces } => {
                positive(epsilon, "paraboloid epsilon")?;
                if pieces.is_empty() || pieces.iter().any(|p| p.slope.len() != n || p.center.len() != n) {
                    return Err(Error::MalformedInput(format!("paraboloid pieces must have {n} entries")));
                }
                Ok(())
            }
            UPSCost::AffineShiftOfValue { base, epsilon, regularizer } => {
                positive(epsilon, "regularizer weight")?;
                if base.dim() != n {
                    return Err(Error::MalformedInput(format!("base value function is not over {n} states")));
                }
                regularizer.validate(n)
            }
        }
    }

    pub fn potential(&self, mu: &[S]) -> Result<S> {
        match self {
            UPSCost::ScaledEntropy { scale } => {
                let mut s = S::zero();
                for x in mu {
                    if *x > S::zero() {
                        let l = x.ln().ok_or_else(|| {
                            Error::NumericDomain("entropy cost is not rational; use float mode".into())
                        })?;
                        s = s + x.clone() * l;
                    }
                }
                Ok(scale.clone() * s)
            }
            UPSCost::Quadratic { matrix } => {
                Ok(matrix.iter().zip(mu).fold(S::zero(), |a, (row, x)| a + x.clone() * dot(row, mu)))
            }
            UPSCost::MaxParaboloid { epsilon, pieces } => {
                let mut best: Option<S> = None;
                for p in pieces {
                    let t = dot(&p.slope, mu) + epsilon.clone() * chart_sq_dist(mu, &p.center);
                    if best.as_ref().is_none_or(|b| t > *b) {
                        best = Some(t);
                    }
                }
                best.ok_or_else(|| Error::MalformedInput("paraboloid cost with no pieces".into()))
            }
            UPSCost::AffineShiftOfValue { base, epsilon, regularizer } => {
                Ok(epsilon.clone() * regularizer.potential(mu)? + base.eval(mu))
            }
        }
    }
}

/// `Σ w_k c(μ_k) - c(μ0)`.
pub fn eval_cost<S: Scalar>(cost: &UPSCost<S>, phi: &PosteriorDistribution<S>, mu0: &Belief<S>) -> Result<S> {
    phi.check_plausible(mu0.as_slice())?;
    let mut total = S::zero();
    for (p, w) in phi.support() {
        total = total + w.clone() * cost.potential(p)?;
    }
    Ok(total - cost.potential(mu0.as_slice())?)
}

/// A real function on beliefs, such as a value function.
pub trait BeliefFunction<S: Scalar>: Sync {
    fn dim(&self) -> usize;
    fn value(&self, mu: &[S]) -> S;
}

impl<S: Scalar> BeliefFunction<S> for MaxAffine<S> {
    fn dim(&self) -> usize {
        MaxAffine::dim(self)
    }
    fn value(&self, mu: &[S]) -> S {
        self.eval(mu)
    }
}

/// `Σ coefficient · f(μ)`.
#[derive(Clone, Debug)]
pub struct LinearCombination<S: Scalar> {
    pub terms: Vec<(S, MaxAffine<S>)>,
}

impl<S: Scalar> BeliefFunction<S> for LinearCombination<S> {
    fn dim(&self) -> usize {
        self.terms.first().map_or(0, |(_, f)| f.dim())
    }
    fn value(&self, mu: &[S]) -> S {
        self.terms.iter().fold(S::zero(), |a, (c, f)| a + c.clone() * f.eval(mu))
    }
}

#[derive(Clone, Debug)]
pub struct AcquisitionSolution<S> {
    pub distribution: PosteriorDistribution<S>,
    /// `E_Φ V - D(Φ)`.
    pub net_value: S,
    pub grid_resolution: usize,
    pub grid: Vec<Vec<S>>,
    /// Largest violation of dual feasibility or of the zero duality gap.
    pub dual_gap: S,
    /// No other distribution on the grid attains the optimum.
    pub unique: bool,
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

/// Maximizes `E_Φ v - D(Φ)` over distributions on the uniform grid with
/// `mu0` appended.
pub fn solve_acquisition<S: Scalar, F: BeliefFunction<S> + ?Sized>(
    v: &F,
    cost: &UPSCost<S>,
    mu0: &Belief<S>,
    grid_resolution: usize,
) -> Result<AcquisitionSolution<S>> {
    solve_acquisition_with(v, cost, mu0, grid_resolution, &[])
}

/// As [`solve_acquisition`], with `extra` beliefs appended to the grid.
pub fn solve_acquisition_with<S: Scalar, F: BeliefFunction<S> + ?Sized>(
    v: &F,
    cost: &UPSCost<S>,
    mu0: &Belief<S>,
    grid_resolution: usize,
    extra: &[Vec<S>],
) -> Result<AcquisitionSolution<S>> {
    let n = v.dim();
    check_prior(n, mu0)?;
    if grid_resolution < 2 {
        return Err(Error::Precondition("grid resolution must be at least 2".into()));
    }
    cost.validate(n)?;
    let mut grid = simplex_grid::<S>(n, grid_resolution);
    for p in std::iter::once(mu0.as_slice()).chain(extra.iter().map(Vec::as_slice)) {
        if p.len() != n || !is_belief(p) {
            return Err(Error::MalformedInput(format!("appended point {p:?} is not a belief")));
        }
        if !grid.iter().any(|g| same_point(g, p)) {
            grid.push(p.to_vec());
        }
    }
    let obj: Vec<S> = grid.iter().map(|g| Ok(v.value(g) - cost.potential(g)?)).collect::<Result<_>>()?;
    let mut lp = LinearProgram::new(Sense::Maximize, obj.clone());
    for i in 0..n {
        lp.add(grid.iter().map(|g| g[i].clone()).collect(), Relation::Eq, mu0.as_slice()[i].clone());
    }
    lp.all_nonnegative();
    let res = solve_lp(&lp)?;
    if res.status != LpStatus::Optimal {
        return Err(Error::Numeric(format!("acquisition LP ended {:?}", res.status)));
    }

    let keep: Vec<usize> = (0..grid.len())
        .filter(|&j| if S::EXACT { res.solution[j] > S::zero() } else { res.solution[j].to_f64() > SUPPORT_THRESHOLD })
        .collect();
    let total = keep.iter().fold(S::zero(), |a, &j| a + res.solution[j].clone());
    let support: Vec<(Vec<S>, S)> = keep.iter().map(|&j| (grid[j].clone(), res.solution[j].clone() / total.clone())).collect();
    let distribution = PosteriorDistribution::new(support)?;

    let Some(cert) = &res.certificate else {
        return Err(Error::Numeric("acquisition LP returned no dual".into()));
    };
    let dual_gap = dual_gap(&grid, &obj, mu0.as_slice(), cert, &res.value);
    let unique = optimum_is_unique(&lp, &res.value, &keep, &grid, &cert.rows)?;
    let net_value = res.value.clone() + cost.potential(mu0.as_slice())?;
    Ok(AcquisitionSolution { distribution, net_value, grid_resolution, grid, dual_gap, unique })
}

fn dual_gap<S: Scalar>(grid: &[Vec<S>], obj: &[S], mu0: &[S], cert: &Certificate<S>, value: &S) -> S {
    debug_assert_eq!(cert.kind, CertificateKind::Optimality);
    let y = &cert.rows;
    let mut worst = (dot(y, mu0) - value.clone()).abs();
    for (g, c) in grid.iter().zip(obj) {
        let viol = c.clone() - dot(y, g);
        if viol > worst {
            worst = viol;
        }
    }
    worst
}

/// Affinely independent support, and no optimal solution puts weight off
/// it. Exact mode re-solves maximizing the weight off the support. Float
/// mode looks near the LP dual `y0` for an optimal dual whose reduced costs
/// off the support are all negative by a margin; columns already below
/// `-NEAR_TIE` stay negative inside the search box.
fn optimum_is_unique<S: Scalar>(
    lp: &LinearProgram<S>,
    value: &S,
    keep: &[usize],
    grid: &[Vec<S>],
    y0: &[S],
) -> Result<bool> {
    let pts: Vec<&[S]> = keep.iter().map(|&j| grid[j].as_slice()).collect();
    if !affinely_independent(&pts) {
        return Ok(false);
    }
    if S::EXACT {
        let off: Vec<S> = (0..grid.len()).map(|j| if keep.contains(&j) { S::zero() } else { S::one() }).collect();
        let mut second = LinearProgram::new(Sense::Maximize, off);
        for c in &lp.constraints {
            second.add(c.coeffs.clone(), c.relation, c.rhs.clone());
        }
        second.add(lp.objective.clone(), Relation::Ge, value.clone());
        second.all_nonnegative();
        let r = solve_lp(&second)?;
        return Ok(r.status == LpStatus::Optimal && r.value.is_zero());
    }
    let scale = lp.objective.iter().fold(S::one(), |a, c| if c.abs() > a { c.abs() } else { a });
    let kappa = S::from_f64(NEAR_TIE).expect("finite constant") * scale.clone();
    let near: Vec<usize> = (0..grid.len())
        .filter(|j| !keep.contains(j) && lp.objective[*j].clone() - dot(y0, &grid[*j]) > -kappa.clone())
        .collect();
    if near.is_empty() {
        return Ok(true);
    }
    let n = grid[0].len();
    let mut obj = vec![S::zero(); n + 1];
    obj[n] = S::one();
    let mut dual = LinearProgram::new(Sense::Maximize, obj);
    for &j in keep {
        let mut row = grid[j].clone();
        row.push(S::zero());
        dual.add(row, Relation::Eq, lp.objective[j].clone());
    }
    for &j in &near {
        let mut row = grid[j].clone();
        row.push(-S::one());
        dual.add(row, Relation::Ge, lp.objective[j].clone());
    }
    let half = kappa.clone() / S::from_i64(2);
    for i in 0..n {
        let mut row = vec![S::zero(); n + 1];
        row[i] = S::one();
        dual.add(row.clone(), Relation::Le, y0[i].clone() + half.clone());
        dual.add(row, Relation::Ge, y0[i].clone() - half.clone());
    }
    let mut cap = vec![S::zero(); n + 1];
    cap[n] = S::one();
    dual.add(cap, Relation::Le, scale.clone());
    let r = solve_lp(&dual)?;
    Ok(r.status == LpStatus::Optimal && r.value > S::tol() * scale)
}

/// Rank of `rows` by elimination with the mode's pivot tolerance.
pub(crate) fn rank<S: Scalar>(mut rows: Vec<Vec<S>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).max_by(|&a, &b| {
            rows[a][c].abs().partial_cmp(&rows[b][c].abs()).unwrap_or(std::cmp::Ordering::Equal)
        }) else {
            break;
        };
        if rows[p][c].abs() <= S::pivot_tol() {
            continue;
        }
        rows.swap(r, p);
        for i in r + 1..rows.len() {
            let f = rows[i][c].clone() / rows[r][c].clone();
            if f.is_zero() {
                continue;
            }
            for k in c..cols {
                let x = rows[r][k].clone();
                rows[i][k] = rows[i][k].clone() - f.clone() * x;
            }
        }
        r += 1;
    }
    r
}

pub(crate) fn affinely_independent<S: Scalar>(pts: &[&[S]]) -> bool {
    match pts.split_first() {
        None => true,
        Some((first, rest)) => rank(rest.iter().map(|p| sub_vec(p, first)).collect()) == rest.len(),
    }
}

/// Separating convex function: `E_P φ - E_Q φ = gap > 0`.
#[derive(Clone, Debug)]
pub struct MpcCertificate<S: Scalar> {
    pub phi: MaxAffine<S>,
    pub gap: S,
}

/// Outcome of the coupling LP for "P is a mean-preserving contraction of Q".
#[derive(Clone, Debug)]
pub enum MpcVerdict<S: Scalar> {
    /// Row `i` spreads the `i`-th point of `P` over the support of `Q`.
    Coupling(Vec<Vec<S>>),
    Separated(MpcCertificate<S>),
}

impl<S: Scalar> MpcVerdict<S> {
    pub fn holds(&self) -> bool {
        matches!(self, MpcVerdict::Coupling(_))
    }
}

/// Adds `coeffs·x = rhs`, or the band `|coeffs·x - rhs| <= slack`.
/// Returns the indices of the rows added.
fn add_band<S: Scalar>(lp: &mut LinearProgram<S>, coeffs: Vec<S>, rhs: S, slack: Option<&S>) -> Vec<usize> {
    let k = lp.constraints.len();
    match slack {
        None => {
            lp.add(coeffs, Relation::Eq, rhs);
            vec![k]
        }
        Some(s) => {
            lp.add(coeffs.clone(), Relation::Le, rhs.clone() + s.clone());
            lp.add(coeffs, Relation::Ge, rhs - s.clone());
            vec![k, k + 1]
        }
    }
}

fn float_slack<S: Scalar>() -> Option<S> {
    (!S::EXACT).then(|| S::from_f64(MPC_FLOAT_SLACK).expect("finite"))
}

/// Decides whether `p` is a mean-preserving contraction of `q`, returning
/// a coupling or a convex function separating the two.
pub fn mpc_check<S: Scalar>(p: &PosteriorDistribution<S>, q: &PosteriorDistribution<S>) -> Result<MpcVerdict<S>> {
    mpc_check_within(p, q, float_slack::<S>().as_ref())
}

/// As [`mpc_check`], letting means and barycenters miss by `slack` per
/// coordinate; used to compare solutions found on a grid.
pub fn mpc_check_within<S: Scalar>(
    p: &PosteriorDistribution<S>,
    q: &PosteriorDistribution<S>,
    slack: Option<&S>,
) -> Result<MpcVerdict<S>> {
    let n = p.dim();
    if q.dim() != n {
        return Err(Error::Precondition("distributions over different state counts".into()));
    }
    let (pm, qm) = (p.mean(), q.mean());
    let means_equal = match slack {
        None => same_vector(&pm, &qm),
        Some(s) => pm.iter().zip(&qm).all(|(a, b)| (a.clone() - b.clone()).abs() <= s.clone()),
    };
    if !means_equal {
        return Err(Error::Precondition(format!("means differ: {pm:?} vs {qm:?}")));
    }
    let (k, m) = (p.len(), q.len());
    let var = |i: usize, j: usize| i * m + j;
    let mut lp = LinearProgram::new(Sense::Minimize, vec![S::zero(); k * m]);
    let mut row_sum = Vec::with_capacity(k);
    for i in 0..k {
        let mut c = vec![S::zero(); k * m];
        for j in 0..m {
            c[var(i, j)] = S::one();
        }
        row_sum.push(lp.constraints.len());
        lp.add(c, Relation::Eq, S::one());
    }
    for (j, (_, qw)) in q.support().iter().enumerate() {
        let mut c = vec![S::zero(); k * m];
        for (i, (_, pw)) in p.support().iter().enumerate() {
            c[var(i, j)] = pw.clone();
        }
        add_band(&mut lp, c, qw.clone(), float_slack::<S>().as_ref());
    }
    let mut bary_rows = vec![Vec::with_capacity(n); k];
    for (i, (x, _)) in p.support().iter().enumerate() {
        for s in 0..n {
            let mut c = vec![S::zero(); k * m];
            for (j, (y, _)) in q.support().iter().enumerate() {
                c[var(i, j)] = y[s].clone();
            }
            bary_rows[i].push(add_band(&mut lp, c, x[s].clone(), slack));
        }
    }
    lp.all_nonnegative();
    let res = solve_lp(&lp)?;
    match res.status {
        LpStatus::Optimal => {
            let mat = (0..k).map(|i| (0..m).map(|j| res.solution[var(i, j)].clone()).collect()).collect();
            Ok(MpcVerdict::Coupling(mat))
        }
        LpStatus::Infeasible => {
            let cert = res.certificate.ok_or_else(|| Error::Numeric("infeasible coupling LP without certificate".into()))?;
            let y = |rows: &[usize]| rows.iter().fold(S::zero(), |a, &r| a + cert.rows[r].clone());
            let pieces: Vec<Vec<S>> = p
                .support()
                .iter()
                .enumerate()
                .map(|(i, (_, pw))| {
                    let alpha = cert.rows[row_sum[i]].clone();
                    (0..n).map(|s| (-alpha.clone() - y(&bary_rows[i][s])) / pw.clone()).collect()
                })
                .collect();
            let phi = MaxAffine::from_vectors(pieces)?;
            let gap = p.expect(|x| phi.eval(x)) - q.expect(|x| phi.eval(x));
            Ok(MpcVerdict::Separated(MpcCertificate { phi, gap }))
        }
        s => Err(Error::Numeric(format!("coupling LP ended {s:?}"))),
    }
}

/// `p` is a mean-preserving contraction of `q`.
pub fn is_mpc<S: Scalar>(p: &PosteriorDistribution<S>, q: &PosteriorDistribution<S>) -> Result<bool> {
    Ok(mpc_check(p, q)?.holds())
}

/// `p` is a mean-preserving contraction of `q` up to `slack`.
pub fn is_mpc_within<S: Scalar>(p: &PosteriorDistribution<S>, q: &PosteriorDistribution<S>, slack: &S) -> Result<bool> {
    Ok(mpc_check_within(p, q, Some(slack))?.holds())
}

pub fn is_strict_mpc<S: Scalar>(p: &PosteriorDistribution<S>, q: &PosteriorDistribution<S>) -> Result<bool> {
    Ok(is_mpc(p, q)? && !is_mpc(q, p)?)
}

/// Index of the payoff class uniquely optimal at `mu`, if `mu` is interior
/// to the simplex and to that class's cell.
fn interior_class<S: Scalar>(f: &MaxAffine<S>, mu: &[S]) -> Option<usize> {
    if mu.iter().any(|x| !crate::scalar::gt(x, &S::zero())) {
        return None;
    }
    let classes = f.classes();
    let v = f.eval(mu);
    let top: Vec<usize> =
        (0..classes.len()).filter(|&k| !crate::scalar::gt(&v, &dot(&classes[k].payoff, mu))).collect();
    (top.len() == 1).then(|| top[0])
}

/// Every support point is interior to a cell, and no two share one.
pub fn is_nonredundant<S: Scalar>(d: &DecisionProblem<S>, phi: &PosteriorDistribution<S>) -> bool {
    if phi.dim() != d.num_states() {
        return false;
    }
    let f = d.value_function();
    let mut seen = Vec::new();
    for p in phi.points() {
        match interior_class(&f, p) {
            Some(k) if !seen.contains(&k) => seen.push(k),
            _ => return false,
        }
    }
    true
}

/// Paraboloid pieces for `phi`: each action's piece is centered at the
/// support point in its cell, or at the first support point otherwise.
fn synthesis_pieces<S: Scalar>(d: &DecisionProblem<S>, phi: &PosteriorDistribution<S>) -> Vec<Paraboloid<S>> {
    let f = d.value_function();
    let classes = f.classes();
    let first = phi.support()[0].0.clone();
    let centers: Vec<(usize, Vec<S>)> =
        phi.points().filter_map(|p| interior_class(&f, p).map(|k| (k, p.to_vec()))).collect();
    d.actions()
        .iter()
        .map(|a| {
            let k = classes.iter().position(|c| same_vector(&c.payoff, &a.payoffs)).expect("class of own action");
            let center = centers.iter().find(|(c, _)| *c == k).map_or(first.clone(), |(_, p)| p.clone());
            Paraboloid { label: a.label.clone(), slope: a.payoffs.clone(), center }
        })
        .collect()
}

/// Largest `ε` for which the paraboloid cost touches `V` at every support
/// point: the minimum of `(V(μ_k) - u_i·μ_k) / ‖μ_k - center_i‖²`.
/// `None` when no piece constrains `ε`.
pub fn synthesis_threshold<S: Scalar>(d: &DecisionProblem<S>, phi: &PosteriorDistribution<S>) -> Result<Option<S>> {
    if !is_nonredundant(d, phi) {
        return Err(Error::Precondition("target distribution is redundant".into()));
    }
    let f = d.value_function();
    let mut best: Option<S> = None;
    for p in phi.points() {
        let v = f.eval(p);
        for piece in synthesis_pieces(d, phi) {
            let dist = chart_sq_dist(p, &piece.center);
            if dist.is_zero() {
                continue;
            }
            let r = (v.clone() - dot(&piece.slope, p)) / dist;
            if best.as_ref().is_none_or(|b| r < *b) {
                best = Some(r);
            }
        }
    }
    Ok(best)
}

/// Midpoint of the known feasible window for two-point targets under
/// `max{μ, 1-μ}` with support `{η, η + 1/2}`.
fn persuasion_window_midpoint<S: Scalar>(d: &DecisionProblem<S>, phi: &PosteriorDistribution<S>) -> Option<S> {
    if d.num_states() != 2 || phi.len() != 2 {
        return None;
    }
    let und = d.value_function().undominated_classes();
    let e = |i: usize| -> Vec<S> { (0..2).map(|k| if k == i { S::one() } else { S::zero() }).collect() };
    let is_tent = und.len() == 2 && (0..2).all(|i| und.iter().any(|c| same_vector(&c.payoff, &e(i))));
    let mut xs: Vec<S> = phi.points().map(|p| p[1].clone()).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let half = S::ratio(1, 2);
    let eta = xs[0].clone();
    let fits = eta > S::zero() && eta < half && approx_eq(&(xs[1].clone() - eta.clone()), &half);
    // The window (4 - 8η, 8η) has midpoint 2 for every η.
    (is_tent && fits).then(|| S::from_i64(2))
}

/// A max-of-paraboloids cost whose acquisition problem at `mu0` is solved
/// exactly by distributions on `supp phi`. `ε` starts at a known window
/// midpoint when one applies, else 1, and halves until the cost touches
/// `V` at the support and stays above it on a verification grid.
pub fn synthesize_cost<S: Scalar>(
    d: &DecisionProblem<S>,
    phi: &PosteriorDistribution<S>,
    mu0: &Belief<S>,
) -> Result<UPSCost<S>> {
    phi.check_plausible(mu0.as_slice())?;
    let threshold = synthesis_threshold(d, phi)?;
    let pieces = synthesis_pieces(d, phi);
    let f = d.value_function();
    let n = d.num_states();
    let check_grid = simplex_grid::<S>(n, default_resolution(n).min(200));
    let mut eps = persuasion_window_midpoint(d, phi).unwrap_or_else(S::one);
    for _ in 0..=MAX_HALVINGS {
        let within = threshold.as_ref().is_none_or(|t| eps <= *t);
        if within {
            let cost = UPSCost::MaxParaboloid { epsilon: eps.clone(), pieces: pieces.clone() };
            if verify_synthesis(&f, &cost, phi, &check_grid)? {
                return Ok(cost);
            }
        }
        eps = eps / S::from_i64(2);
    }
    Err(Error::SynthesisFailure(format!("no workable epsilon after {MAX_HALVINGS} halvings")))
}

fn verify_synthesis<S: Scalar>(
    f: &MaxAffine<S>,
    cost: &UPSCost<S>,
    phi: &PosteriorDistribution<S>,
    grid: &[Vec<S>],
) -> Result<bool> {
    for p in phi.points() {
        if !approx_eq(&f.eval(p), &cost.potential(p)?) {
            return Ok(false);
        }
    }
    for g in grid {
        if crate::scalar::gt(&f.eval(g), &cost.potential(g)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `ε ρ + vhat`: under it, acquiring nothing is uniquely optimal for
/// `vhat` at every interior prior.
pub fn adversarial_cost<S: Scalar>(vhat: &MaxAffine<S>, epsilon: S, regularizer: UPSCost<S>) -> Result<UPSCost<S>> {
    if !(epsilon > S::zero()) {
        return Err(Error::Precondition(format!("epsilon must be positive, got {epsilon}")));
    }
    regularizer.validate(vhat.dim())?;
    Ok(UPSCost::AffineShiftOfValue { base: vhat.clone(), epsilon, regularizer: Box::new(regularizer) })
}

/// Prior, cost and two binary solutions that are Blackwell-incomparable.
#[derive(Clone, Debug)]
pub struct IncomparablePair<S: Scalar> {
    pub prior: Belief<S>,
    pub cost: UPSCost<S>,
    pub phi_v: PosteriorDistribution<S>,
    pub phi_vhat: PosteriorDistribution<S>,
    pub solution_v: AcquisitionSolution<S>,
    pub solution_vhat: AcquisitionSolution<S>,
    /// Downward shift applied to `v` after matching `vhat` at the vertices.
    pub shift: S,
}

fn collinear<S: Scalar>(a: &[S], b: &[S], c: &[S]) -> bool {
    rank(vec![sub_vec(b, a), sub_vec(c, a)]) < 2
}

/// Chooses `μ1, μ2` in distinct cells where `vhat` is on top and
/// `μ̃1, μ̃2` in distinct cells where the shifted `v` is on top, with
/// `λμ1 + (1-λ)μ2 = λ̃μ̃1 + (1-λ̃)μ̃2`, each point at slack `t > 0`.
fn cross_points<S: Scalar>(
    cells: [&crate::geometry::Polytope<S>; 4],
    lambda: &S,
    lambda_t: &S,
    direction: Option<(&[S], &S)>,
) -> Result<Option<(Vec<Vec<S>>, S)>> {
    let n = cells[0].dim();
    let nv = 4 * n + 1;
    let t = 4 * n;
    let mut obj = vec![S::zero(); nv];
    match direction {
        None => obj[t] = S::one(),
        Some((dir, _)) => obj[..4 * n].clone_from_slice(dir),
    }
    let mut lp = LinearProgram::new(Sense::Maximize, obj);
    for (k, cell) in cells.iter().enumerate() {
        let mut ones = vec![S::zero(); nv];
        for i in 0..n {
            ones[k * n + i] = S::one();
        }
        lp.add(ones, Relation::Eq, S::one());
        for h in cell.all_rows() {
            let mut c = vec![S::zero(); nv];
            c[k * n..(k + 1) * n].clone_from_slice(&h.normal);
            c[t] = S::one();
            lp.add(c, Relation::Le, h.offset.clone());
        }
    }
    let w = [lambda.clone(), S::one() - lambda.clone(), -lambda_t.clone(), lambda_t.clone() - S::one()];
    for i in 0..n {
        let mut c = vec![S::zero(); nv];
        for k in 0..4 {
            c[k * n + i] = w[k].clone();
        }
        lp.add(c, Relation::Eq, S::zero());
    }
    let mut cap = vec![S::zero(); nv];
    cap[t] = S::one();
    lp.add(cap.clone(), Relation::Le, S::one());
    if let Some((_, floor)) = direction {
        lp.add(cap, Relation::Ge, floor.clone());
    }
    let res = solve_lp(&lp)?;
    if res.status != LpStatus::Optimal || !crate::scalar::gt(&res.solution[t], &S::zero()) {
        return Ok(None);
    }
    let pts = (0..4).map(|k| res.solution[k * n..(k + 1) * n].to_vec()).collect();
    Ok(Some((pts, res.solution[t].clone())))
}

fn support_matches<S: Scalar>(sol: &AcquisitionSolution<S>, target: &[&[S]]) -> bool {
    sol.distribution.len() == target.len()
        && sol.distribution.points().all(|p| target.iter().any(|q| same_point(p, q)))
}

/// For a convex, non-affine `vhat - v` with `v` non-affine on at least three
/// states: a prior and cost under which `v` and `vhat` lead to uniquely
/// optimal binary distributions whose supports cross, so neither is a
/// mean-preserving contraction of the other.
pub fn incomparable_pair_construction<S: Scalar>(
    v: &MaxAffine<S>,
    vhat: &MaxAffine<S>,
) -> Result<IncomparablePair<S>> {
    let n = v.dim();
    if vhat.dim() != n {
        return Err(Error::MalformedInput("value functions over different state counts".into()));
    }
    if n < 3 {
        return Err(Error::Inapplicable("needs at least three states; two-state supports are collinear".into()));
    }
    if v.is_affine() {
        return Err(Error::Inapplicable("v is affine".into()));
    }
    let w = crate::compare::difference(vhat, v)?;
    if w.pieces.len() <= 1 || w.pieces.windows(2).all(|p| same_vector(&p[0], &p[1])) {
        return Err(Error::Inapplicable("vhat - v is affine".into()));
    }
    let (convex, _) = crate::compare::is_convex_difference(vhat, v)?;
    if !convex {
        return Err(Error::Inapplicable("vhat - v is not convex".into()));
    }
    let h: Vec<S> = (0..n)
        .map(|i| {
            let e = Belief::<S>::vertex(n, i);
            vhat.eval(e.as_slice()) - v.eval(e.as_slice())
        })
        .collect();
    let depth = w
        .subdivision
        .vertices()
        .iter()
        .map(|x| dot(&h, x) - (vhat.eval(x) - v.eval(x)))
        .fold(S::zero(), |a, b| if b > a { b } else { a });
    if !(depth > S::zero()) {
        return Err(Error::Inapplicable("vhat - v does not dip below its vertex interpolation".into()));
    }
    let weights = [S::ratio(1, 2), S::ratio(1, 3), S::ratio(2, 3)];
    let mut delta = depth / S::from_i64(2);
    for _ in 0..12 {
        let ones = vec![S::one(); n];
        let shifted = v.shifted(&sub_vec(&h, &crate::scalar::scale_vec(&delta, &ones)));
        let tagged = |f: &MaxAffine<S>, tag: &str| {
            let pieces = f
                .pieces()
                .iter()
                .enumerate()
                .map(|(i, p)| crate::decision::Piece { payoff: p.payoff.clone(), label: format!("{tag}:{i}:{}", p.label) })
                .collect();
            MaxAffine::new(n, pieces)
        };
        let joint = tagged(&shifted, "v")?.max_with(&tagged(vhat, "vhat")?);
        let sub = subdivision_of(&joint);
        let side = |labels: &[String], tag: &str| labels.iter().all(|l| l.starts_with(tag));
        let top: Vec<usize> = (0..sub.cells().len()).filter(|&i| side(&sub.cells()[i].labels, "vhat:")).collect();
        let low: Vec<usize> = (0..sub.cells().len()).filter(|&i| side(&sub.cells()[i].labels, "v:")).collect();
        for (a, b) in pairs(&top) {
            for (c, e) in pairs(&low) {
                for lam in &weights {
                    for lam_t in &weights {
                        let cells = [a, b, c, e].map(|i| &sub.cells()[i].polytope);
                        if let Some(found) = pick_cross(cells, lam, lam_t)? {
                            let d = joint.to_problem()?;
                            if let Some(pair) = finish_cross(v, vhat, &d, found, lam, lam_t, delta.clone())? {
                                return Ok(pair);
                            }
                        }
                    }
                }
            }
        }
        delta = delta / S::from_i64(2);
    }
    Err(Error::Inapplicable("no crossing supports found".into()))
}

fn pairs(ix: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (k, &a) in ix.iter().enumerate() {
        for &b in &ix[k + 1..] {
            out.push((a, b));
        }
    }
    out
}

/// Cross points with the largest common slack, or, if those are collinear,
/// with a few deterministic tilts of the objective.
fn pick_cross<S: Scalar>(
    cells: [&crate::geometry::Polytope<S>; 4],
    lam: &S,
    lam_t: &S,
) -> Result<Option<Vec<Vec<S>>>> {
    let Some((pts, t)) = cross_points(cells, lam, lam_t, None)? else { return Ok(None) };
    if !collinear(&pts[0], &pts[1], &pts[2]) {
        return Ok(Some(pts));
    }
    let n = cells[0].dim();
    let floor = t / S::from_i64(2);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..8 {
        let dir: Vec<S> = (0..4 * n).map(|_| S::from_i64(rng.gen_range(-8..=8))).collect();
        if let Some((pts, _)) = cross_points(cells, lam, lam_t, Some((&dir, &floor)))? {
            if !collinear(&pts[0], &pts[1], &pts[2]) {
                return Ok(Some(pts));
            }
        }
    }
    Ok(None)
}

#[allow(clippy::too_many_arguments)]
fn finish_cross<S: Scalar>(
    v: &MaxAffine<S>,
    vhat: &MaxAffine<S>,
    joint: &DecisionProblem<S>,
    pts: Vec<Vec<S>>,
    lam: &S,
    lam_t: &S,
    shift: S,
) -> Result<Option<IncomparablePair<S>>> {
    let half = S::ratio(1, 2);
    let w = [
        half.clone() * lam.clone(),
        half.clone() * (S::one() - lam.clone()),
        half.clone() * lam_t.clone(),
        half * (S::one() - lam_t.clone()),
    ];
    let phi = PosteriorDistribution::new(pts.iter().cloned().zip(w).collect())?;
    let prior = Belief::new(phi.mean())?;
    if !prior.is_interior() || !is_nonredundant(joint, &phi) {
        return Ok(None);
    }
    let cost = synthesize_cost(joint, &phi, &prior)?;
    let res = default_resolution(v.dim());
    let sol_vhat = solve_acquisition_with(vhat, &cost, &prior, res, &pts)?;
    let sol_v = solve_acquisition_with(v, &cost, &prior, res, &pts)?;
    let ok = support_matches(&sol_vhat, &[&pts[0], &pts[1]])
        && support_matches(&sol_v, &[&pts[2], &pts[3]])
        && sol_v.unique
        && sol_vhat.unique
        && !is_mpc(&sol_v.distribution, &sol_vhat.distribution)?
        && !is_mpc(&sol_vhat.distribution, &sol_v.distribution)?;
    if !ok {
        return Ok(None);
    }
    Ok(Some(IncomparablePair {
        prior,
        cost,
        phi_v: sol_v.distribution.clone(),
        phi_vhat: sol_vhat.distribution.clone(),
        solution_v: sol_v,
        solution_vhat: sol_vhat,
        shift,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::scalar::Rational;

    fn q(p: i64, d: i64) -> Rational {
        Rational::ratio(p, d)
    }

    fn binary(points: &[(Rational, Rational)]) -> PosteriorDistribution<Rational> {
        PosteriorDistribution::new(points.iter().map(|(x, w)| (vec![q(1, 1) - x.clone(), x.clone()], w.clone())).collect())
            .unwrap()
    }

    #[test]
    fn grid_sizes() {
        assert_eq!(simplex_grid::<f64>(2, 4).len(), 5);
        assert_eq!(simplex_grid::<f64>(3, 60).len(), 1891);
        assert!(simplex_grid::<Rational>(3, 5).iter().all(|p| p.iter().cloned().fold(q(0, 1), |a, b| a + b) == q(1, 1)));
    }

    #[test]
    fn distribution_validation() {
        assert!(PosteriorDistribution::<Rational>::new(vec![]).is_err());
        assert!(PosteriorDistribution::new(vec![(vec![q(1, 2), q(1, 2)], q(1, 2))]).is_err());
        assert!(PosteriorDistribution::new(vec![(vec![q(1, 2), q(1, 2)], q(1, 2)), (vec![q(1, 2), q(1, 2)], q(1, 2))])
            .is_err());
        assert!(PosteriorDistribution::new(vec![(vec![q(1, 2), q(1, 3)], q(1, 1))]).is_err());
        let d = binary(&[(q(0, 1), q(1, 2)), (q(1, 1), q(1, 2))]);
        assert_eq!(d.mean(), vec![q(1, 2), q(1, 2)]);
        assert!(d.check_plausible(&[q(1, 3), q(2, 3)]).is_err());
    }

    #[test]
    fn cost_values() {
        let mu0 = Belief::binary(0.5);
        let phi = PosteriorDistribution::new(vec![(vec![1.0, 0.0], 0.5), (vec![0.0, 1.0], 0.5)]).unwrap();
        let e = eval_cost(&UPSCost::entropy(2.0), &phi, &mu0).unwrap();
        assert!((e - 2.0 * std::f64::consts::LN_2).abs() < 1e-12);
        let quad = eval_cost(&UPSCost::squared_norm(2), &phi, &mu0).unwrap();
        assert!((quad - 0.5).abs() < 1e-12);
        assert_eq!(eval_cost(&UPSCost::entropy(1.0), &PosteriorDistribution::degenerate(&mu0), &mu0).unwrap(), 0.0);
        let exact = binary(&[(q(0, 1), q(1, 2)), (q(1, 1), q(1, 2))]);
        assert!(matches!(
            eval_cost(&UPSCost::entropy(q(1, 1)), &exact, &Belief::binary(q(1, 2))),
            Err(Error::NumericDomain(_))
        ));
        assert!(matches!(eval_cost(&UPSCost::squared_norm(2), &exact, &Belief::binary(q(1, 3))), Err(Error::Plausibility(_))));
    }

    #[test]
    fn affine_value_learns_nothing() {
        let v = MaxAffine::from_vectors(vec![vec![1.0, 3.0]]).unwrap();
        let s = solve_acquisition(&v, &UPSCost::entropy(1.0), &Belief::binary(0.3), 100).unwrap();
        assert_eq!(s.distribution.len(), 1);
        assert!((s.net_value - 1.6).abs() < 1e-9);
        assert!(s.unique);
    }

    fn tied_paraboloids<S: Scalar>() -> (MaxAffine<S>, UPSCost<S>) {
        let (d, _) = fixtures::pointwise_dominance_pair::<S>();
        let centers = [S::ratio(1, 5), S::ratio(1, 2), S::ratio(4, 5)];
        let pieces = d
            .actions()
            .iter()
            .zip(centers)
            .map(|(a, x)| Paraboloid { label: a.label.clone(), slope: a.payoffs.clone(), center: vec![S::one() - x.clone(), x] })
            .collect();
        (d.value_function(), UPSCost::MaxParaboloid { epsilon: S::one(), pieces })
    }

    #[test]
    fn three_touching_points_are_reported_as_ties() {
        // V - c vanishes at 1/5, 1/2 and 4/5, so any two of them around the
        // prior are optimal.
        let (v, cost) = tied_paraboloids::<f64>();
        let s = solve_acquisition(&v, &cost, &Belief::binary(0.35), 100).unwrap();
        assert!((s.net_value - cost.potential(&[0.65, 0.35]).unwrap()).abs() < 1e-9);
        assert!(!s.unique);
        let (v, cost) = tied_paraboloids::<Rational>();
        let s = solve_acquisition(&v, &cost, &Belief::binary(q(7, 20)), 20).unwrap();
        assert!(!s.unique);
    }

    #[test]
    fn adversarial_cost_is_degenerate() {
        let vhat = fixtures::two_action::<f64>().value_function();
        let cost = adversarial_cost(&vhat, 0.05, UPSCost::entropy(1.0)).unwrap();
        let mu0 = Belief::binary(0.4);
        let s = solve_acquisition(&vhat, &cost, &mu0, 200).unwrap();
        assert_eq!(s.distribution.len(), 1);
        assert!((s.net_value - vhat.eval(mu0.as_slice())).abs() < 1e-9);
        assert!(adversarial_cost(&vhat, 0.0, UPSCost::entropy(1.0)).is_err());
    }

    #[test]
    fn mpc_basics() {
        let delta = PosteriorDistribution::degenerate(&Belief::binary(q(1, 2)));
        let spread = binary(&[(q(0, 1), q(1, 2)), (q(1, 1), q(1, 2))]);
        assert!(is_mpc(&delta, &spread).unwrap());
        assert!(!is_mpc(&spread, &delta).unwrap());
        assert!(is_strict_mpc(&delta, &spread).unwrap());
        assert!(!is_strict_mpc(&spread, &delta).unwrap());
        let MpcVerdict::Separated(c) = mpc_check(&spread, &delta).unwrap() else { panic!() };
        assert!(c.gap > q(0, 1));
        let other = binary(&[(q(0, 1), q(1, 2)), (q(3, 4), q(1, 2))]);
        assert!(is_mpc(&delta, &other).is_err());
    }

    #[test]
    fn nonredundancy_examples() {
        let d = fixtures::two_action::<Rational>();
        let two = |a: Rational, b: Rational| binary(&[(a, q(1, 2)), (b, q(1, 2))]);
        assert!(is_nonredundant(&d, &two(q(3, 10), q(4, 5))));
        assert!(!is_nonredundant(&d, &two(q(1, 5), q(1, 2))));
        let same_cell = binary(&[(q(3, 5), q(1, 2)), (q(4, 5), q(1, 2))]);
        assert!(!is_nonredundant(&d, &same_cell));
    }

    #[test]
    fn synthesis_threshold_on_persuasion_target() {
        let d = fixtures::two_action::<Rational>();
        let single = binary(&[(q(3, 10), q(1, 1))]);
        assert_eq!(synthesis_threshold(&d, &single).unwrap(), None);
        let phi = binary(&[(q(3, 10), q(3, 5)), (q(4, 5), q(2, 5))]);
        assert_eq!(synthesis_threshold(&d, &phi).unwrap(), Some(q(8, 5)));
        let phi = binary(&[(q(1, 10), q(1, 2)), (q(9, 10), q(1, 2))]);
        assert_eq!(synthesis_threshold(&d, &phi).unwrap(), Some(q(5, 4)));
    }

    #[test]
    fn synthesized_cost_reproduces_target() {
        let d = fixtures::two_action::<Rational>();
        let phi = binary(&[(q(3, 10), q(3, 5)), (q(4, 5), q(2, 5))]);
        let mu0 = Belief::binary(q(1, 2));
        let cost = synthesize_cost(&d, &phi, &mu0).unwrap();
        let UPSCost::MaxParaboloid { epsilon, .. } = &cost else { panic!() };
        assert_eq!(*epsilon, q(1, 1));
        let s = solve_acquisition(&d.value_function(), &cost, &mu0, 40).unwrap();
        assert_eq!(s.distribution, phi);
        assert!(s.unique);
        assert!(s.dual_gap.is_zero());
    }

    #[test]
    fn single_point_target() {
        let d = fixtures::two_action::<Rational>();
        let mu0 = Belief::binary(q(1, 5));
        let phi = PosteriorDistribution::degenerate(&mu0);
        let cost = synthesize_cost(&d, &phi, &mu0).unwrap();
        let s = solve_acquisition(&d.value_function(), &cost, &mu0, 20).unwrap();
        assert_eq!(s.distribution, phi);
    }

    #[test]
    fn redundant_target_rejected() {
        let d = fixtures::two_action::<Rational>();
        let phi = binary(&[(q(1, 2), q(1, 1))]);
        assert!(matches!(synthesize_cost(&d, &phi, &Belief::binary(q(1, 2))), Err(Error::Precondition(_))));
    }

    #[test]
    fn rank_and_independence() {
        assert_eq!(rank(vec![vec![q(1, 1), q(2, 1)], vec![q(2, 1), q(4, 1)]]), 1);
        let a = [q(1, 1), q(0, 1), q(0, 1)];
        let b = [q(0, 1), q(1, 1), q(0, 1)];
        let c = [q(1, 2), q(1, 2), q(0, 1)];
        assert!(!affinely_independent(&[&a, &b, &c]));
        assert!(collinear(&a, &b, &c));
    }

    #[test]
    fn incomparable_pair_on_three_states() {
        let (v, vhat) = fixtures::cross_pair::<Rational>();
        let pair = incomparable_pair_construction(&v, &vhat).unwrap();
        assert!(!is_mpc(&pair.phi_v, &pair.phi_vhat).unwrap());
        assert!(!is_mpc(&pair.phi_vhat, &pair.phi_v).unwrap());
        assert!(pair.solution_v.dual_gap.is_zero() && pair.solution_vhat.dual_gap.is_zero());
        assert_eq!(pair.phi_v.len(), 2);
        assert_eq!(pair.phi_vhat.len(), 2);
    }

    #[test]
    fn incomparable_pair_preconditions() {
        let two = fixtures::two_action::<Rational>().value_function();
        let more = fixtures::parallel_shift_pair::<Rational>();
        let vhat = two.max_with(&MaxAffine::from_vectors(more).unwrap());
        assert!(matches!(incomparable_pair_construction(&two, &vhat), Err(Error::Inapplicable(_))));
        let flat = MaxAffine::from_vectors(vec![vec![q(1, 1), q(0, 1), q(0, 1)]]).unwrap();
        let (_, vh) = fixtures::cross_pair::<Rational>();
        assert!(matches!(incomparable_pair_construction(&flat, &vh), Err(Error::Inapplicable(_))));
    }
}
