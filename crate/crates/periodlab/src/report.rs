//! Serializable reports, one per command.

use periodlab_core::dynamics::{FiberCensus, Point};
use periodlab_core::period_lab::{BoundReport, PeriodCertificate, VerificationReport};
use periodlab_core::power_map::OrderTable;
use periodlab_core::torsion_sieve::{hasse_ok, DensityEstimate, SieveResult, StabilityReport, TorsionPrimes};
use periodlab_core::{FieldElem, RingSpec};
use serde::{Deserialize, Serialize};

use crate::schema::{IntLit, PointDto, RingSpecDto};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CensusReport {
    pub q: u64,
    pub n_pts: u64,
    pub d: usize,
    pub cycles: Vec<u64>,
    pub per: Vec<u64>,
    pub tails: u64,
}

impl From<&FiberCensus> for CensusReport {
    fn from(c: &FiberCensus) -> Self {
        CensusReport {
            q: c.q,
            n_pts: c.n_pts,
            d: c.d,
            cycles: c.cycles.clone(),
            per: c.per_set.iter().copied().collect(),
            tails: c.tails,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsReport {
    pub n_pts: u64,
    pub q: u64,
    pub d: usize,
    pub e: u32,
    pub p: u64,
    pub coprime: String,
    pub all: String,
    pub vacuous: bool,
}

impl From<&BoundReport> for BoundsReport {
    fn from(b: &BoundReport) -> Self {
        BoundsReport {
            n_pts: b.n_pts,
            q: b.q,
            d: b.d,
            e: b.e,
            p: b.p,
            coprime: b.coprime.to_string(),
            all: b.all.to_string(),
            vacuous: b.vacuous,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiftReport {
    pub ring: RingSpecDto,
    pub cycle: Vec<PointDto>,
    pub lifted: Vec<PointDto>,
}

impl LiftReport {
    pub fn new(ring: &RingSpec, cycle: &[Point<FieldElem>], lifted: &[Point<periodlab_core::DvrElement>]) -> Self {
        LiftReport {
            ring: RingSpecDto::from(ring),
            cycle: cycle.iter().map(PointDto::from_field).collect(),
            lifted: lifted.iter().map(|pt| PointDto::from_ring(ring, pt)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateDto {
    pub point: PointDto,
    pub precision: u32,
    pub n: u64,
    pub m: u64,
    pub r: u64,
    pub t: u32,
    pub m_divides_n: bool,
    pub coprime_bound_ok: bool,
    pub p_part_ok: bool,
    /// Ramification index of the stage, in multi-stage reports.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eisenstein: Option<Vec<IntLit>>,
}

impl CertificateDto {
    pub fn new(ring: &RingSpec, c: &PeriodCertificate) -> Self {
        CertificateDto {
            point: PointDto::from_ring(ring, &c.point),
            precision: c.precision,
            n: c.n,
            m: c.m,
            r: c.r,
            t: c.t,
            m_divides_n: c.checks.m_divides_n,
            coprime_bound_ok: c.checks.coprime_bound_ok,
            p_part_ok: c.checks.p_part_ok,
            e: None,
            eisenstein: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FindReport {
    pub ring: RingSpecDto,
    pub n_max: u64,
    pub certificates: Vec<CertificateDto>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundPair {
    pub coprime: String,
    pub all: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageSummary {
    pub e: u32,
    pub eisenstein: Vec<IntLit>,
    pub precision: u32,
    pub census_matches: bool,
    pub certificates: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyReport {
    pub census: CensusReport,
    pub bounds: BoundPair,
    pub stages: Vec<StageSummary>,
    pub certificates: Vec<CertificateDto>,
    pub max_p_part: u64,
    pub max_coprime_period: u64,
    pub invariance_ok: bool,
}

impl VerifyReport {
    /// `rings[i]` is the ring of `report.stages[i]`.
    pub fn new(report: &VerificationReport, rings: &[RingSpec]) -> Self {
        let mut certificates = Vec::new();
        let mut stages = Vec::new();
        for (stage, ring) in report.stages.iter().zip(rings) {
            let eisenstein: Vec<IntLit> = stage.eisenstein.iter().map(IntLit::number).collect();
            for c in &stage.certificates {
                let mut dto = CertificateDto::new(ring, c);
                dto.e = Some(stage.e);
                dto.eisenstein = Some(eisenstein.clone());
                certificates.push(dto);
            }
            stages.push(StageSummary {
                e: stage.e,
                eisenstein,
                precision: stage.precision,
                census_matches: stage.census == report.census,
                certificates: stage.certificates.len(),
            });
        }
        let text = |b: Option<&num_bigint::BigUint>| b.map_or_else(String::new, ToString::to_string);
        VerifyReport {
            census: CensusReport::from(&report.census),
            bounds: BoundPair { coprime: text(report.coprime_bound()), all: text(report.all_bound()) },
            stages,
            certificates,
            max_p_part: report.max_p_part,
            max_coprime_period: report.max_coprime_period,
            invariance_ok: report.invariance_ok,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrderRowDto {
    pub k: u32,
    pub order: String,
    pub p_valuation: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerMapReport {
    pub q: u64,
    pub p: u64,
    pub k0: u32,
    pub ratio_law_ok: bool,
    pub strict_from_k0: bool,
    pub rows: Vec<OrderRowDto>,
}

impl From<&OrderTable> for PowerMapReport {
    fn from(t: &OrderTable) -> Self {
        PowerMapReport {
            q: t.q,
            p: t.p,
            k0: t.k0,
            ratio_law_ok: t.ratio_law_ok,
            strict_from_k0: t.strict_from_k0,
            rows: t.rows.iter().map(|r| OrderRowDto { k: r.k, order: r.order.to_string(), p_valuation: r.p_valuation }).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SievePrimeDto {
    pub ell: String,
    pub m: u64,
    pub b: u32,
    /// `m·p^b`.
    pub exponent: String,
    pub is_p: bool,
    pub probable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SieveReport {
    pub q: u64,
    pub p: u64,
    pub a: u32,
    pub m_max: u64,
    pub complete: bool,
    pub primes: Vec<SievePrimeDto>,
    pub cofactors: Vec<String>,
    pub skipped: Vec<u64>,
}

impl From<&SieveResult> for SieveReport {
    fn from(s: &SieveResult) -> Self {
        let p = num_bigint::BigUint::from(s.p);
        SieveReport {
            q: s.q,
            p: s.p,
            a: s.a,
            m_max: s.m_max,
            complete: s.complete,
            primes: s
                .primes
                .iter()
                .map(|x| SievePrimeDto {
                    ell: x.ell.to_string(),
                    m: x.m,
                    b: x.b,
                    exponent: (num_bigint::BigUint::from(x.m) * p.pow(x.b)).to_string(),
                    is_p: x.is_p,
                    probable: x.probable,
                })
                .collect(),
            cofactors: s.cofactors.iter().map(ToString::to_string).collect(),
            skipped: s.skipped.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityLevelDto {
    pub a: u32,
    pub modulus: u64,
    pub count: u64,
    pub ratio: f64,
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityReport {
    pub p: u64,
    pub x: u64,
    pub prime_count: u64,
    pub count_1modp: u64,
    pub ratio: f64,
    pub levels: Vec<DensityLevelDto>,
}

impl From<&DensityEstimate> for DensityReport {
    fn from(d: &DensityEstimate) -> Self {
        DensityReport {
            p: d.p,
            x: d.x,
            prime_count: d.prime_count,
            count_1modp: d.count_1modp,
            ratio: d.ratio,
            levels: d
                .levels
                .iter()
                .map(|l| DensityLevelDto { a: l.a, modulus: l.modulus, count: l.count, ratio: l.ratio, expected: l.expected })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EcTorsionReport {
    pub q: u64,
    pub a4: i64,
    pub a6: i64,
    pub order: u64,
    /// Group exponent.
    pub m: u64,
    /// `order / m`.
    pub n: u64,
    pub exhaustive: bool,
    pub hasse_ok: bool,
    pub primes: Vec<u64>,
    /// Residue characteristic, invisible to reduction.
    pub undetermined: u64,
}

impl EcTorsionReport {
    pub fn new(a4: i64, a6: i64, t: &TorsionPrimes) -> Self {
        EcTorsionReport {
            q: t.count.q,
            a4,
            a6,
            order: t.count.order,
            m: t.count.m,
            n: t.count.n,
            exhaustive: t.count.exhaustive,
            hasse_ok: hasse_ok(t.count.order, t.count.q),
            primes: t.primes.clone(),
            undetermined: t.undetermined,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerReport {
    pub p: u64,
    pub v_delta: u64,
    pub e_seq: Vec<u64>,
    pub values: Vec<u64>,
    pub prime_to_p: Vec<u64>,
    pub stable_from: usize,
    pub stable: bool,
    pub wild_from: usize,
    pub other_reduction_bound: u64,
}

impl From<&StabilityReport> for TowerReport {
    fn from(s: &StabilityReport) -> Self {
        TowerReport {
            p: s.p,
            v_delta: s.v_delta,
            e_seq: s.e_seq.clone(),
            values: s.values.clone(),
            prime_to_p: s.prime_to_p.clone(),
            stable_from: s.stable_from,
            stable: s.stable,
            wild_from: s.wild_from,
            other_reduction_bound: s.other_reduction_bound,
        }
    }
}

/// Any command's result, tagged by `kind` in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Report {
    Census(CensusReport),
    Bounds(BoundsReport),
    Lift(LiftReport),
    FindPeriodic(FindReport),
    Verify(VerifyReport),
    PowerMap(PowerMapReport),
    Sieve(SieveReport),
    Density(DensityReport),
    EcTorsion(EcTorsionReport),
    Tower(TowerReport),
}

/// A rectangular table of display strings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub name: &'static str,
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

fn list<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn certificate_table(certs: &[CertificateDto], with_stage: bool) -> Table {
    let mut headers = vec!["n", "m", "r", "t", "point"];
    if with_stage {
        headers.insert(0, "e");
    }
    let rows = certs
        .iter()
        .map(|c| {
            let mut row = vec![c.n.to_string(), c.m.to_string(), c.r.to_string(), c.t.to_string(), c.point.display()];
            if with_stage {
                row.insert(0, c.e.map_or_else(String::new, |e| e.to_string()));
            }
            row
        })
        .collect();
    Table { name: "certificates", headers, rows }
}

fn census_table(c: &CensusReport) -> Table {
    Table {
        name: "census",
        headers: vec!["q", "N_pts", "d", "cycles", "Per"],
        rows: vec![vec![c.q.to_string(), c.n_pts.to_string(), c.d.to_string(), list(&c.cycles), list(&c.per)]],
    }
}

impl Report {
    pub fn title(&self) -> &'static str {
        match self {
            Report::Census(_) => "Special fiber census",
            Report::Bounds(_) => "Period bounds",
            Report::Lift(_) => "Hensel lift",
            Report::FindPeriodic(_) => "Periodic points",
            Report::Verify(_) => "Bound verification",
            Report::PowerMap(_) => "Orders along the cyclotomic tower",
            Report::Sieve(_) => "Torsion prime sieve",
            Report::Density(_) => "Prime density",
            Report::EcTorsion(_) => "Good-reduction torsion",
            Report::Tower(_) => "Component stability",
        }
    }

    /// Scalar fields, in display order.
    pub fn summary(&self) -> Vec<(&'static str, String)> {
        match self {
            Report::Census(c) => vec![("tails", c.tails.to_string())],
            Report::Bounds(_) => Vec::new(),
            Report::Lift(l) => vec![("p", l.ring.p.to_string()), ("e", l.ring.e.to_string())],
            Report::FindPeriodic(f) => vec![
                ("p", f.ring.p.to_string()),
                ("f", f.ring.f.to_string()),
                ("e", f.ring.e.to_string()),
                ("precision", f.ring.precision.map_or_else(String::new, |n| n.to_string())),
                ("n_max", f.n_max.to_string()),
            ],
            Report::Verify(v) => vec![
                ("B_coprime", v.bounds.coprime.clone()),
                ("B_all", v.bounds.all.clone()),
                ("max_p_part", v.max_p_part.to_string()),
                ("max_coprime_period", v.max_coprime_period.to_string()),
                ("invariance_ok", v.invariance_ok.to_string()),
            ],
            Report::PowerMap(t) => vec![
                ("q", t.q.to_string()),
                ("p", t.p.to_string()),
                ("k0", t.k0.to_string()),
                ("ratio_law_ok", t.ratio_law_ok.to_string()),
                ("strict_from_k0", t.strict_from_k0.to_string()),
            ],
            Report::Sieve(s) => vec![
                ("q", s.q.to_string()),
                ("p", s.p.to_string()),
                ("a", s.a.to_string()),
                ("m_max", s.m_max.to_string()),
                ("complete", s.complete.to_string()),
                ("cofactors", s.cofactors.join(" ")),
                ("skipped", list(&s.skipped)),
            ],
            Report::Density(d) => vec![
                ("p", d.p.to_string()),
                ("X", d.x.to_string()),
                ("prime_count", d.prime_count.to_string()),
                ("count_1modp", d.count_1modp.to_string()),
                ("ratio", d.ratio.to_string()),
            ],
            Report::EcTorsion(_) => Vec::new(),
            Report::Tower(t) => vec![
                ("p", t.p.to_string()),
                ("v_delta", t.v_delta.to_string()),
                ("stable", t.stable.to_string()),
                ("stable_from", t.stable_from.to_string()),
                ("wild_from", t.wild_from.to_string()),
                ("other_reduction_bound", t.other_reduction_bound.to_string()),
            ],
        }
    }

    /// The tables of the report; the first is the CSV form.
    pub fn tables(&self) -> Vec<Table> {
        match self {
            Report::Census(c) => vec![census_table(c)],
            Report::Bounds(b) => vec![Table {
                name: "bounds",
                headers: vec!["q", "N_pts", "d", "e", "p", "B_coprime", "B_all", "vacuous"],
                rows: vec![vec![
                    b.q.to_string(),
                    b.n_pts.to_string(),
                    b.d.to_string(),
                    b.e.to_string(),
                    b.p.to_string(),
                    b.coprime.clone(),
                    b.all.clone(),
                    b.vacuous.to_string(),
                ]],
            }],
            Report::Lift(l) => vec![Table {
                name: "cycle",
                headers: vec!["index", "residue", "lift"],
                rows: l
                    .cycle
                    .iter()
                    .zip(&l.lifted)
                    .enumerate()
                    .map(|(i, (c, x))| vec![i.to_string(), c.display(), x.display()])
                    .collect(),
            }],
            Report::FindPeriodic(f) => vec![certificate_table(&f.certificates, false)],
            Report::Verify(v) => vec![
                certificate_table(&v.certificates, true),
                census_table(&v.census),
                Table {
                    name: "stages",
                    headers: vec!["e", "eisenstein", "precision", "census_matches", "certificates"],
                    rows: v
                        .stages
                        .iter()
                        .map(|s| {
                            vec![
                                s.e.to_string(),
                                serde_json::to_string(&s.eisenstein).expect("integers serialize"),
                                s.precision.to_string(),
                                s.census_matches.to_string(),
                                s.certificates.to_string(),
                            ]
                        })
                        .collect(),
                },
            ],
            Report::PowerMap(t) => vec![Table {
                name: "orders",
                headers: vec!["k", "order", "p_valuation"],
                rows: t.rows.iter().map(|r| vec![r.k.to_string(), r.order.clone(), r.p_valuation.to_string()]).collect(),
            }],
            Report::Sieve(s) => vec![Table {
                name: "primes",
                headers: vec!["ell", "m", "b", "exponent", "is_p", "probable"],
                rows: s
                    .primes
                    .iter()
                    .map(|x| {
                        vec![
                            x.ell.clone(),
                            x.m.to_string(),
                            x.b.to_string(),
                            x.exponent.clone(),
                            x.is_p.to_string(),
                            x.probable.to_string(),
                        ]
                    })
                    .collect(),
            }],
            Report::Density(d) => vec![Table {
                name: "levels",
                headers: vec!["a", "modulus", "count", "ratio", "expected"],
                rows: d
                    .levels
                    .iter()
                    .map(|l| vec![l.a.to_string(), l.modulus.to_string(), l.count.to_string(), l.ratio.to_string(), l.expected.to_string()])
                    .collect(),
            }],
            Report::EcTorsion(t) => vec![Table {
                name: "curve",
                headers: vec!["q", "a4", "a6", "order", "m", "n", "exhaustive", "hasse_ok", "primes", "undetermined"],
                rows: vec![vec![
                    t.q.to_string(),
                    t.a4.to_string(),
                    t.a6.to_string(),
                    t.order.to_string(),
                    t.m.to_string(),
                    t.n.to_string(),
                    t.exhaustive.to_string(),
                    t.hasse_ok.to_string(),
                    list(&t.primes),
                    t.undetermined.to_string(),
                ]],
            }],
            Report::Tower(t) => vec![Table {
                name: "stages",
                headers: vec!["n", "e_n", "v_n", "prime_to_p"],
                rows: (0..t.e_seq.len())
                    .map(|i| vec![i.to_string(), t.e_seq[i].to_string(), t.values[i].to_string(), t.prime_to_p[i].to_string()])
                    .collect(),
            }],
        }
    }
}
