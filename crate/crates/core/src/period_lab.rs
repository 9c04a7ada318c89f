//! Period bounds, Hensel lifting of residue cycles, π-adic search for
//! periodic points and certification of their periods.
//!
//! A point of `X(O/π^N)` counts as periodic of period `n` when it is the
//! image of a solution of `f^n(x) = x` modulo `π^{2N}`. Solutions that only
//! exist at precision `N` (for instance `1 + p^{N-1}c` for a power map) do
//! not survive the doubling and are discarded.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_traits::One;

use crate::arith::valuation;
use crate::dvr::{DvrElement, Eisenstein, RingSpec};
use crate::dynamics::linalg::{self, det_expansion};
use crate::dynamics::{
    lift_point, reduce_point, special_fiber_census, special_fiber_census_via, successor_table, FiberCensus, MapSpec,
    Point, PointSpace,
};
use crate::error::{Error, Result};
use crate::residue_field::{FieldElem, FieldSpec, DEFAULT_ENUMERATION_CAP};
use crate::ring::Ring;

/// Maximum number of kept branches per level and per `n`.
pub const DEFAULT_BRANCH_BUDGET: usize = 100_000;
/// Iteration budget for exact-period computations.
pub const DEFAULT_MAX_ITER: u64 = 1_000_000;

/// `B_coprime = N·(q^d - 1)` and `B_all = B_coprime·p^e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundReport {
    pub n_pts: u64,
    pub q: u64,
    pub d: usize,
    pub e: u32,
    pub p: u64,
    pub coprime: BigUint,
    pub all: BigUint,
    /// Set when `d = 0`, where the coprime bound is 0.
    pub vacuous: bool,
}

pub fn compute_bounds(census: &FiberCensus, e: u32, p: u64) -> BoundReport {
    let qd = num_traits::pow(BigUint::from(census.q), census.d);
    let coprime = BigUint::from(census.n_pts) * (qd - BigUint::one());
    let all = &coprime * num_traits::pow(BigUint::from(p), e as usize);
    BoundReport { n_pts: census.n_pts, q: census.q, d: census.d, e, p, vacuous: census.d == 0, coprime, all }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CertificateChecks {
    pub m_divides_n: bool,
    /// `m·r ≤ B_coprime`.
    pub coprime_bound_ok: bool,
    /// `t ≤ v(p)`.
    pub p_part_ok: bool,
}

/// A periodic point with `n = m·r·p^t`, `gcd(r, p) = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodCertificate {
    pub point: Point<DvrElement>,
    pub precision: u32,
    /// Exact period at precision `precision`.
    pub n: u64,
    /// Period of the reduced point.
    pub m: u64,
    pub r: u64,
    pub t: u32,
    pub checks: CertificateChecks,
}

impl PeriodCertificate {
    /// The prime-to-`p` part `m·r`.
    pub fn prime_to_p_part(&self) -> u64 {
        self.m * self.r
    }
}

fn check_residue_cycle(map: &MapSpec, field: &FieldSpec, cycle: &[Point<FieldElem>]) -> Result<()> {
    if cycle.is_empty() {
        return Err(Error::NotACycle("empty cycle".into()));
    }
    for (i, pt) in cycle.iter().enumerate() {
        if map.normalize(field, pt.0.clone())? != *pt {
            return Err(Error::NotACycle(format!("point {i} is not normalized")));
        }
        if map.evaluate(field, pt)? != cycle[(i + 1) % cycle.len()] {
            return Err(Error::NotACycle(format!("point {i} does not map to its successor")));
        }
    }
    if cycle.iter().collect::<BTreeSet<_>>().len() != cycle.len() {
        return Err(Error::NotACycle("repeated point".into()));
    }
    Ok(())
}

/// `f^n(x) - x` in the chart of `x`, or `None` if `f^n(x)` lies in another
/// chart (so `x` is not even periodic modulo `π`).
fn residual<R: Ring>(map: &MapSpec, ring: &R, chart: Option<usize>, coords: &[R::Elem], n: u64) -> Result<Option<Vec<R::Elem>>> {
    let image = map.iterate(ring, &map.from_chart(ring, chart, coords), n)?;
    let (image_chart, image_coords) = map.to_chart(ring, &image);
    if image_chart != chart {
        return Ok(None);
    }
    Ok(Some(image_coords.iter().zip(coords).map(|(a, b)| ring.sub(a, b)).collect()))
}

fn min_valuation<R: Ring>(ring: &R, v: &[R::Elem]) -> u32 {
    v.iter().map(|x| ring.valuation(x)).min().unwrap_or(ring.precision())
}

/// Jacobian of `x ↦ f^n(x) - x` in the chart of `x`.
fn residual_jacobian<R: Ring>(map: &MapSpec, ring: &R, point: &Point<R::Elem>, n: u64) -> Result<linalg::Matrix<R::Elem>> {
    let j = map.jacobian_iterate(ring, point, n)?;
    Ok(linalg::mat_sub(ring, &j, &linalg::identity(ring, map.dim())))
}

/// Lifts a nondegenerate cycle of the reduced map to the unique cycle over
/// `O/π^N` reducing onto it.
pub fn hensel_lift_cycle(map: &MapSpec, cycle: &[Point<FieldElem>], ring: &RingSpec) -> Result<Vec<Point<DvrElement>>> {
    let field = ring.residue_field();
    check_residue_cycle(map, field, cycle)?;
    let m = cycle.len() as u64;
    let jbar = residual_jacobian(map, field, &cycle[0], m)?;
    if !linalg::is_invertible(field, &jbar) {
        return Err(Error::Degenerate);
    }
    let mut x = lift_point(ring, &cycle[0]);
    let mut converged = false;
    // Each Newton step at least doubles the number of correct digits.
    for _ in 0..=2 * ring.precision() {
        let (chart, coords) = map.to_chart(ring, &x);
        let g = residual(map, ring, chart, &coords, m)?.ok_or(Error::PrecisionExhausted)?;
        if g.iter().all(|c| ring.is_zero(c)) {
            converged = true;
            break;
        }
        let j = residual_jacobian(map, ring, &x, m)?;
        let step = linalg::solve(ring, &j, &g)?;
        let next: Vec<_> = coords.iter().zip(&step).map(|(a, b)| ring.sub(a, b)).collect();
        x = map.from_chart(ring, chart, &next);
    }
    if !converged {
        return Err(Error::PrecisionExhausted);
    }
    let mut out = Vec::with_capacity(cycle.len());
    for _ in 0..m {
        let next = map.evaluate(ring, &x)?;
        out.push(x);
        x = next;
    }
    Ok(out)
}

#[derive(Debug, Clone)]
struct Node {
    chart: Option<usize>,
    coords: Vec<DvrElement>,
    /// The node is a class modulo `π^level`.
    level: u32,
    /// Valuation of `f^n(x) - x` at the representative with zero higher digits.
    residual_val: u32,
}

struct Search<'a> {
    map: &'a MapSpec,
    ring: &'a RingSpec,
    /// The same ring at twice the precision.
    wide: RingSpec,
    digits: Vec<FieldElem>,
    n: u64,
    budget: usize,
}

impl Search<'_> {
    fn target(&self) -> u32 {
        self.ring.precision()
    }

    fn top(&self) -> u32 {
        self.wide.precision()
    }

    fn node(&self, chart: Option<usize>, coords: Vec<DvrElement>, level: u32) -> Result<Option<Node>> {
        let Some(res) = residual(self.map, &self.wide, chart, &coords, self.n)? else {
            return Ok(None);
        };
        let residual_val = min_valuation(&self.wide, &res);
        Ok((residual_val >= level).then_some(Node { chart, coords, level, residual_val }))
    }

    /// Children `x + π^level·t`, `t ∈ k^d`, that solve one more digit.
    fn children(&self, node: &Node) -> Result<Vec<Node>> {
        let wide = &self.wide;
        let shift = wide.uniformizer_pow(node.level);
        let q = self.digits.len() as u64;
        let dim = node.coords.len();
        let total = q.pow(dim as u32);
        let mut out = Vec::new();
        for mut idx in 0..total {
            let coords: Vec<DvrElement> = node
                .coords
                .iter()
                .map(|c| {
                    let t = &self.digits[(idx % q) as usize];
                    idx /= q;
                    wide.add(c, &wide.mul(&shift, &wide.lift(t)))
                })
                .collect();
            out.extend(self.node(node.chart, coords, node.level + 1)?);
        }
        Ok(out)
    }

    fn project(&self, node: &Node) -> Point<DvrElement> {
        let coords: Vec<_> = node.coords.iter().map(|c| self.ring.coerce(c)).collect();
        self.map.from_chart(self.ring, node.chart, &coords)
    }

    /// Valuation of `det J` and the least valuation of an entry of `J`,
    /// where `J` is the Jacobian of the residual at the node.
    fn jacobian_valuations(&self, node: &Node) -> Result<(u32, u32)> {
        let wide = &self.wide;
        let point = self.map.from_chart(wide, node.chart, &node.coords);
        let jac = residual_jacobian(self.map, wide, &point, self.n)?;
        let entry_min = jac.iter().flatten().map(|x| wide.valuation(x)).min().unwrap_or(self.top());
        Ok((wide.valuation(&det_expansion(wide, &jac)), entry_min))
    }

    /// When Hensel's lemma isolates a unique root inside the class of
    /// `node`, descends to it digit by digit and returns it at precision `N`.
    fn capture(&self, node: &Node, delta: u32) -> Result<Option<Node>> {
        let v = node.residual_val;
        if !(node.level > delta && v > 2 * delta && v - delta >= node.level && delta <= self.target()) {
            return Ok(None);
        }
        let mut x = node.clone();
        x.level = (v - delta).min(self.top());
        while x.level < self.target() {
            let kids = self.children(&x)?;
            let best = kids.iter().map(|c| c.residual_val).max();
            let Some(best) = best else { return Ok(None) };
            let mut winners = kids.into_iter().filter(|c| c.residual_val == best);
            let (Some(w), None) = (winners.next(), winners.next()) else {
                return Ok(None);
            };
            if best - delta <= x.level {
                return Ok(None);
            }
            x = Node { level: (best - delta).min(self.top()), ..w };
        }
        Ok(Some(x))
    }

    fn run(&self, seeds: &[Point<FieldElem>]) -> Result<BTreeSet<Point<DvrElement>>> {
        let mut found = BTreeSet::new();
        let mut frontier = Vec::new();
        for seed in seeds {
            let (chart, coords) = self.map.to_chart(&self.wide, &lift_point(&self.wide, seed));
            frontier.extend(self.node(chart, coords, 1)?);
        }
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for node in frontier {
                if node.level >= self.target() && found.contains(&self.project(&node)) {
                    continue;
                }
                if node.residual_val >= self.top() && node.level >= self.target() {
                    found.insert(self.project(&node));
                    continue;
                }
                // On the class x + π^j·t the residual is F(x) + π^j·J·t plus
                // terms of valuation at least 2j, so a small F(x) never grows.
                let (delta, entry_min) = self.jacobian_valuations(&node)?;
                let j = node.level;
                if node.residual_val < (2 * j).min(j + entry_min) {
                    continue;
                }
                if let Some(root) = self.capture(&node, delta)? {
                    found.insert(self.project(&root));
                    continue;
                }
                next.extend(self.children(&node)?);
                if next.len() > self.budget {
                    return Err(Error::BranchBudgetExceeded(self.budget));
                }
            }
            frontier = next;
        }
        Ok(found)
    }
}

/// Cycle length of every point of the functional graph (0 off cycles).
fn cycle_length_per_point(succ: &[u64]) -> Vec<u64> {
    let mut len = vec![0u64; succ.len()];
    let mut seen = vec![false; succ.len()];
    for start in 0..succ.len() {
        if seen[start] {
            continue;
        }
        let mut path = Vec::new();
        let mut pos = alloc::collections::BTreeMap::new();
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            pos.insert(x, path.len());
            path.push(x);
            x = succ[x] as usize;
        }
        if let Some(&i) = pos.get(&x) {
            let cyc = &path[i..];
            for &y in cyc {
                len[y] = cyc.len() as u64;
            }
        }
    }
    len
}

pub fn find_periodic_points(map: &MapSpec, ring: &RingSpec, n_max: u64) -> Result<Vec<PeriodCertificate>> {
    find_periodic_points_with(map, ring, n_max, DEFAULT_BRANCH_BUDGET)
}

/// Every point of `X(O/π^N)` of period at most `n_max` (in the sense of
/// the module docs), certified and sorted by `(n, point)`.
pub fn find_periodic_points_with(map: &MapSpec, ring: &RingSpec, n_max: u64, budget: usize) -> Result<Vec<PeriodCertificate>> {
    if n_max == 0 {
        return Err(Error::BadInput("n_max must be at least 1".into()));
    }
    let field = ring.residue_field();
    map.validate(field, DEFAULT_ENUMERATION_CAP)?;
    let space = PointSpace::new(map.space(), map.dim(), field, DEFAULT_ENUMERATION_CAP)?;
    let succ = successor_table(map, field, &space, 0..space.len())?;
    let census = FiberCensus::from_successors(field.size(), map.dim(), &succ);
    let bounds = compute_bounds(&census, ring.e(), ring.p());
    let cycle_len = cycle_length_per_point(&succ);

    let mut search = Search {
        map,
        ring,
        wide: ring.with_precision(2 * ring.precision())?,
        digits: field.elements().collect(),
        n: 0,
        budget,
    };
    let mut found = BTreeSet::new();
    for n in 1..=n_max {
        let seeds: Vec<_> = (0..space.len())
            .filter(|&i| cycle_len[i as usize] != 0 && n % cycle_len[i as usize] == 0)
            .map(|i| space.point(i))
            .collect();
        search.n = n;
        found.extend(search.run(&seeds)?);
    }
    let mut certs = found
        .into_iter()
        .map(|pt| certify_with_bounds(map, ring, &pt, &bounds, DEFAULT_MAX_ITER))
        .collect::<Result<Vec<_>>>()?;
    certs.sort_by(|a, b| (a.n, &a.point).cmp(&(b.n, &b.point)));
    Ok(certs)
}

/// Certificate for a point periodic at the ring's precision, with bounds
/// taken from the census of the reduced map.
pub fn certify_period(map: &MapSpec, ring: &RingSpec, point: &Point<DvrElement>) -> Result<PeriodCertificate> {
    let census = special_fiber_census(map, ring.residue_field())?;
    certify_with_bounds(map, ring, point, &compute_bounds(&census, ring.e(), ring.p()), DEFAULT_MAX_ITER)
}

pub fn certify_with_bounds(
    map: &MapSpec,
    ring: &RingSpec,
    point: &Point<DvrElement>,
    bounds: &BoundReport,
    max_iter: u64,
) -> Result<PeriodCertificate> {
    let not_periodic = Error::NotPeriodicAtPrecision(ring.precision());
    let point = map.normalize(ring, point.0.clone())?;
    let rec = map.orbit(ring, &point, max_iter).map_err(|e| match e {
        Error::IterationBudgetExceeded(_) => not_periodic.clone(),
        other => other,
    })?;
    if rec.tail != 0 {
        return Err(not_periodic);
    }
    let n = rec.cycle;
    let field = ring.residue_field();
    let m = map.orbit(field, &reduce_point(ring, &point), max_iter)?.cycle;
    let k = n / m;
    let t = valuation(k, ring.p());
    let r = k / ring.p().pow(t);
    let checks = CertificateChecks {
        m_divides_n: n % m == 0,
        coprime_bound_ok: BigUint::from(m) * BigUint::from(r) <= bounds.coprime,
        p_part_ok: t <= ring.v_p(),
    };
    Ok(PeriodCertificate { point, precision: ring.precision(), n, m, r, t, checks })
}

/// The base changes examined by [`verify_theorem`], prepared so that the
/// stages can run independently.
#[derive(Debug, Clone)]
pub struct VerificationPlan {
    pub map: MapSpec,
    pub field: FieldSpec,
    pub census: FiberCensus,
    pub rings: Vec<RingSpec>,
    pub n_max: u64,
    pub budget: usize,
}

/// Two Eisenstein polynomials for every `e`; precision defaults to `6e`.
pub fn plan_verification(
    map: &MapSpec,
    p: u64,
    f: u32,
    e_list: &[u32],
    n_max: u64,
    precision: Option<u32>,
) -> Result<VerificationPlan> {
    if e_list.is_empty() {
        return Err(Error::BadInput("e_list is empty".into()));
    }
    if n_max == 0 {
        return Err(Error::BadInput("n_max must be at least 1".into()));
    }
    let field = FieldSpec::new(p, f)?;
    let census = special_fiber_census(map, &field)?;
    let mut rings = Vec::new();
    for &e in e_list {
        let prec = precision.unwrap_or(6 * e);
        for choice in [Eisenstein::Default, Eisenstein::alternate(p, e)] {
            rings.push(RingSpec::over_field(field.clone(), e, choice, prec)?);
        }
    }
    Ok(VerificationPlan { map: map.clone(), field, census, rings, n_max, budget: DEFAULT_BRANCH_BUDGET })
}

/// Outcome for one base change.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageResult {
    pub e: u32,
    pub eisenstein: Vec<BigInt>,
    pub precision: u32,
    pub census: FiberCensus,
    pub bounds: BoundReport,
    pub certificates: Vec<PeriodCertificate>,
}

pub fn run_stage(plan: &VerificationPlan, index: usize) -> Result<StageResult> {
    let ring = &plan.rings[index];
    let census = special_fiber_census_via(&plan.map, ring, DEFAULT_ENUMERATION_CAP)?;
    let certificates = find_periodic_points_with(&plan.map, ring, plan.n_max, plan.budget)?;
    Ok(StageResult {
        e: ring.e(),
        eisenstein: ring.eisenstein().to_vec(),
        precision: ring.precision(),
        bounds: compute_bounds(&census, ring.e(), ring.p()),
        census,
        certificates,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FailureKind {
    CensusMismatch,
    /// `m` does not divide `n`, or `m·r` exceeds the coprime bound.
    BoundViolated { n: u64, m: u64, r: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub e: u32,
    pub eisenstein: Vec<BigInt>,
    pub kind: FailureKind,
}

/// Every failed check of a verification run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterexampleReport {
    pub failures: Vec<Failure>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub census: FiberCensus,
    pub stages: Vec<StageResult>,
    /// Largest `p^t` over all certificates.
    pub max_p_part: u64,
    /// Largest period coprime to `p`.
    pub max_coprime_period: u64,
    pub invariance_ok: bool,
}

impl VerificationReport {
    pub fn coprime_bound(&self) -> Option<&BigUint> {
        self.stages.first().map(|s| &s.bounds.coprime)
    }

    /// `B_all` for the largest `e` examined.
    pub fn all_bound(&self) -> Option<&BigUint> {
        self.stages.iter().max_by_key(|s| s.e).map(|s| &s.bounds.all)
    }
}

/// Checks the stage outcomes against the plan.
pub fn assemble(plan: &VerificationPlan, stages: Vec<StageResult>) -> Result<VerificationReport> {
    let p = plan.field.p();
    let mut failures = Vec::new();
    let mut max_p_part = 1u64;
    let mut max_coprime_period = 0u64;
    for s in &stages {
        let fail = |kind| Failure { e: s.e, eisenstein: s.eisenstein.clone(), kind };
        if s.census != plan.census {
            failures.push(fail(FailureKind::CensusMismatch));
        }
        for c in &s.certificates {
            if !c.checks.m_divides_n || !c.checks.coprime_bound_ok {
                failures.push(fail(FailureKind::BoundViolated { n: c.n, m: c.m, r: c.r }));
            }
            max_p_part = max_p_part.max(p.pow(c.t));
            if c.n % p != 0 {
                max_coprime_period = max_coprime_period.max(c.n);
            }
        }
    }
    if !failures.is_empty() {
        return Err(Error::Counterexample(Box::new(CounterexampleReport { failures })));
    }
    Ok(VerificationReport { census: plan.census.clone(), stages, max_p_part, max_coprime_period, invariance_ok: true })
}

/// Runs every stage of [`plan_verification`] in order.
pub fn verify_theorem(
    map: &MapSpec,
    p: u64,
    f: u32,
    e_list: &[u32],
    n_max: u64,
    precision: Option<u32>,
) -> Result<VerificationReport> {
    let plan = plan_verification(map, p, f, e_list, n_max, precision)?;
    let stages = (0..plan.rings.len()).map(|i| run_stage(&plan, i)).collect::<Result<Vec<_>>>()?;
    assemble(&plan, stages)
}

/// Human-readable label for a failure.
pub fn describe_failure(f: &Failure) -> String {
    match &f.kind {
        FailureKind::CensusMismatch => format!("census differs at e = {}", f.e),
        FailureKind::BoundViolated { n, m, r } => format!("period {n} (m = {m}, r = {r}) breaks the bound at e = {}", f.e),
    }
}
