//! Experiment configurations and their execution.

use std::path::Path;

use periodlab_core::dynamics::{special_fiber_census, MapSpec};
use periodlab_core::period_lab::{
    assemble, compute_bounds, find_periodic_points, hensel_lift_cycle, plan_verification, run_stage,
};
use periodlab_core::power_map::unboundedness_report;
use periodlab_core::torsion_sieve::{
    component_stability, density_estimate, good_reduction_torsion_primes, sieve_with, DEFAULT_MAX_BITS,
};
use periodlab_core::arith::Factorizer;
use periodlab_core::Ring;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::render::{emit, Format};
use crate::report::{
    BoundsReport, CensusReport, CertificateDto, DensityReport, EcTorsionReport, FindReport, LiftReport,
    PowerMapReport, Report, SieveReport, TowerReport, VerifyReport,
};
use crate::schema::{field_point, FieldElemDto, FieldSpecDto, MapSpecDto, RingSpecDto};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "PERIODLAB_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Census,
    Bounds,
    Lift,
    FindPeriodic,
    Verify,
    PowerMap,
    Sieve,
    Density,
    EcTorsion,
    Tower,
}

/// Numeric parameters; each command reads the ones it needs.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_max: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_max: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none", rename = "X", alias = "x")]
    pub x: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_list: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycle: Option<Vec<Vec<FieldElemDto>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a4: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a6: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_delta: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_seq: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_bits: Option<u64>,
}

/// A complete, reproducible description of one run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<MapSpecDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldSpecDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ring: Option<RingSpecDto>,
    #[serde(default)]
    pub params: Params,
    #[serde(default = "default_format")]
    pub format: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    /// Runs never draw random numbers; `false` is rejected.
    #[serde(default = "yes")]
    pub deterministic: bool,
}

fn default_format() -> String {
    "json".into()
}

fn yes() -> bool {
    true
}

impl ExperimentConfig {
    pub fn new(command: Command) -> Self {
        ExperimentConfig {
            command,
            map: None,
            field: None,
            ring: None,
            params: Params::default(),
            format: default_format(),
            output: None,
            deterministic: true,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?)
    }
}

fn need<T: Clone>(value: &Option<T>, name: &str, command: Command) -> Result<T> {
    value.clone().ok_or_else(|| CliError::Schema(format!("{command:?} needs `{name}`")))
}

fn map_of(config: &ExperimentConfig) -> Result<MapSpec> {
    need(&config.map, "map", config.command)?.build()
}

/// Field from `field`, or the residue field of `ring`.
fn field_of(config: &ExperimentConfig) -> Result<periodlab_core::FieldSpec> {
    match (&config.field, &config.ring) {
        (Some(f), _) => f.build(),
        (None, Some(r)) => Ok(r.build()?.residue_field().clone()),
        (None, None) => Err(CliError::Schema(format!("{:?} needs `field`", config.command))),
    }
}

/// Runs `f` on a pool sized by [`THREADS_ENV`], or on the global pool.
pub fn with_pool<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(f()),
        Ok(s) => {
            let n: usize = s
                .trim()
                .parse()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| CliError::Schema(format!("{THREADS_ENV} must be a positive integer, got `{s}`")))?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Internal(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

/// Computes the report described by `config`.
pub fn run(config: &ExperimentConfig) -> Result<Report> {
    if !config.deterministic {
        return Err(CliError::Schema("only deterministic runs are supported".into()));
    }
    let params = &config.params;
    let cmd = config.command;
    let report = match cmd {
        Command::Census => {
            let census = special_fiber_census(&map_of(config)?, &field_of(config)?)?;
            Report::Census(CensusReport::from(&census))
        }
        Command::Bounds => {
            let field = field_of(config)?;
            let e = match (&params.e, &config.ring) {
                (Some(e), _) => *e,
                (None, Some(r)) => r.e,
                (None, None) => return Err(CliError::Schema("Bounds needs `e`".into())),
            };
            let census = special_fiber_census(&map_of(config)?, &field)?;
            Report::Bounds(BoundsReport::from(&compute_bounds(&census, e, field.p())))
        }
        Command::Lift => {
            let ring = need(&config.ring, "ring", cmd)?.build()?;
            let map = map_of(config)?;
            let k = ring.residue_field();
            let cycle = need(&params.cycle, "cycle", cmd)?
                .iter()
                .map(|coords| Ok(map.normalize(k, field_point(k, coords)?.0)?))
                .collect::<Result<Vec<_>>>()?;
            let lifted = hensel_lift_cycle(&map, &cycle, &ring)?;
            Report::Lift(LiftReport::new(&ring, &cycle, &lifted))
        }
        Command::FindPeriodic => {
            let ring = need(&config.ring, "ring", cmd)?.build()?;
            let n_max = need(&params.n_max, "n_max", cmd)?;
            let certs = find_periodic_points(&map_of(config)?, &ring, n_max)?;
            Report::FindPeriodic(FindReport {
                ring: RingSpecDto::from(&ring),
                n_max,
                certificates: certs.iter().map(|c| CertificateDto::new(&ring, c)).collect(),
            })
        }
        Command::Verify => {
            let field = field_of(config)?;
            let e_list = need(&params.e_list, "e_list", cmd)?;
            let n_max = need(&params.n_max, "n_max", cmd)?;
            let plan = plan_verification(&map_of(config)?, field.p(), field.degree(), &e_list, n_max, params.precision)?;
            let stages = with_pool(|| {
                (0..plan.rings.len()).into_par_iter().map(|i| run_stage(&plan, i)).collect::<periodlab_core::Result<Vec<_>>>()
            })??;
            let report = assemble(&plan, stages)?;
            Report::Verify(VerifyReport::new(&report, &plan.rings))
        }
        Command::PowerMap => {
            let table = unboundedness_report(need(&params.q, "q", cmd)?, need(&params.p, "p", cmd)?, need(&params.k_max, "k_max", cmd)?)?;
            Report::PowerMap(PowerMapReport::from(&table))
        }
        Command::Sieve => {
            let result = sieve_with(
                need(&params.q, "q", cmd)?,
                need(&params.p, "p", cmd)?,
                need(&params.a, "a", cmd)?,
                need(&params.m_max, "m_max", cmd)?,
                &Factorizer::default(),
                params.max_bits.unwrap_or(DEFAULT_MAX_BITS),
            )?;
            Report::Sieve(SieveReport::from(&result))
        }
        Command::Density => {
            let estimate = density_estimate(need(&params.p, "p", cmd)?, need(&params.x, "X", cmd)?)?;
            Report::Density(DensityReport::from(&estimate))
        }
        Command::EcTorsion => {
            let (a4, a6) = (need(&params.a4, "a4", cmd)?, need(&params.a6, "a6", cmd)?);
            let torsion = good_reduction_torsion_primes(a4, a6, &field_of(config)?)?;
            Report::EcTorsion(EcTorsionReport::new(a4, a6, &torsion))
        }
        Command::Tower => {
            let stability = component_stability(
                need(&params.v_delta, "v_delta", cmd)?,
                &need(&params.e_seq, "e_seq", cmd)?,
                need(&params.p, "p", cmd)?,
            )?;
            Report::Tower(TowerReport::from(&stability))
        }
    };
    Ok(report)
}

/// Runs `config` and renders the report in its format.
pub fn execute(config: &ExperimentConfig) -> Result<String> {
    let format: Format = config.format.parse()?;
    emit(&run(config)?, format)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip() {
        let text = r#"{"command":"power-map","params":{"q":2,"p":3,"k_max":3},"format":"csv"}"#;
        let config = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(config.command, Command::PowerMap);
        let again = ExperimentConfig::from_json(&serde_json::to_string(&config).unwrap()).unwrap();
        assert_eq!(again, config);
        assert_eq!(execute(&config).unwrap(), "k,order,p_valuation\n1,2,0\n2,6,1\n3,18,2\n");
    }

    #[test]
    fn schema_errors() {
        assert!(ExperimentConfig::from_json(r#"{"command":"warp"}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"command":"sieve","params":{"zzz":1}}"#).is_err());
        let missing = ExperimentConfig::from_json(r#"{"command":"sieve","params":{"q":2}}"#).unwrap();
        assert_eq!(run(&missing).unwrap_err().code(), "cli.SchemaError");
        let mut random = ExperimentConfig::new(Command::Tower);
        random.deterministic = false;
        assert_eq!(run(&random).unwrap_err().code(), "cli.SchemaError");
    }

    #[test]
    fn domain_errors_keep_their_codes() {
        let config = ExperimentConfig::from_json(r#"{"command":"tower","params":{"v_delta":1,"p":3,"e_seq":[2,3]}}"#).unwrap();
        assert_eq!(run(&config).unwrap_err().code(), "torsion_sieve.BadTower");
        let config = ExperimentConfig::from_json(r#"{"command":"density","params":{"p":4,"X":10}}"#).unwrap();
        assert_eq!(run(&config).unwrap_err().code(), "residue_field.NotPrime");
    }

    #[test]
    fn lift_normalizes_projective_input() {
        let text = r#"{"command":"lift",
            "map":{"space":"projective","dim":1,"polys":[
                {"monomials":[{"exps":[2,0],"coeff":"1"}]},{"monomials":[{"exps":[0,2],"coeff":"1"}]}]},
            "ring":{"p":7,"precision":2},
            "params":{"cycle":[[4,2],[1,2]]}}"#;
        let Report::Lift(lift) = run(&ExperimentConfig::from_json(text).unwrap()).unwrap() else { panic!() };
        // [4:2] = [1:4]; squaring gives [1:16] = [1:2] and back.
        assert_eq!(lift.cycle[0].coords, vec![vec![vec![1]], vec![vec![4]]]);
        assert_eq!(lift.lifted.len(), 2);
    }
}
