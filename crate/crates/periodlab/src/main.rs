use std::io::Write;
use std::panic;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use periodlab::schema::{EisensteinDto, FieldElemDto, FieldSpecDto, MapSpecDto, RingSpecDto};
use periodlab::{execute, CliError, Command, ExperimentConfig, Result};

#[derive(Parser)]
#[command(name = "periodlab", version, about = "Periods of self-maps over truncated p-adic rings")]
struct Cli {
    /// json, csv or markdown.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct FieldArgs {
    #[arg(long)]
    p: u64,
    #[arg(long, default_value_t = 1)]
    f: u32,
}

impl FieldArgs {
    fn dto(&self) -> FieldSpecDto {
        FieldSpecDto { p: self.p, f: self.f, modulus: None }
    }
}

#[derive(Args)]
struct RingArgs {
    /// Ring spec as a JSON file; overrides the other ring flags.
    #[arg(long)]
    ring: Option<PathBuf>,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long, default_value_t = 1)]
    f: u32,
    #[arg(long, default_value_t = 1)]
    e: u32,
    /// default, zeta_p, alternate or comma-separated coefficients.
    #[arg(long, default_value = "default", allow_hyphen_values = true)]
    eisenstein: String,
    /// Defaults to 6e.
    #[arg(long)]
    precision: Option<u32>,
}

impl RingArgs {
    fn dto(&self) -> Result<RingSpecDto> {
        if let Some(path) = &self.ring {
            return Ok(serde_json::from_str(&read(path)?)?);
        }
        let p = self.p.ok_or_else(|| CliError::Schema("either --ring or --p is required".into()))?;
        Ok(RingSpecDto { p, f: self.f, e: self.e, eisenstein: EisensteinDto::parse(&self.eisenstein)?, precision: self.precision })
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Cycle structure of the reduced map.
    Census {
        #[arg(long)]
        map: PathBuf,
        #[command(flatten)]
        field: FieldArgs,
    },
    /// Prime-to-p and total period bounds.
    Bounds {
        #[arg(long)]
        map: PathBuf,
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = 1)]
        e: u32,
    },
    /// Hensel-lift a cycle of the reduced map.
    Lift {
        #[arg(long)]
        map: PathBuf,
        #[command(flatten)]
        ring: RingArgs,
        /// JSON list of residue points, e.g. `[[2],[4]]`.
        #[arg(long)]
        cycle: String,
    },
    /// Search for periodic points and certify their periods.
    FindPeriodic {
        #[arg(long)]
        map: PathBuf,
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long)]
        n_max: u64,
    },
    /// Check the period bounds across several ramified base changes.
    Verify {
        #[arg(long)]
        map: PathBuf,
        #[command(flatten)]
        field: FieldArgs,
        /// Comma-separated ramification indices.
        #[arg(long, value_delimiter = ',', required = true)]
        e: Vec<u32>,
        #[arg(long)]
        n_max: u64,
        /// Defaults to 6e for each e.
        #[arg(long)]
        precision: Option<u32>,
    },
    /// Orders of q modulo p^k.
    PowerMap {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        k_max: u32,
    },
    /// Primes dividing q^(m p^b) - 1 that are not 1 mod p^a.
    Sieve {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        a: u32,
        #[arg(long)]
        m_max: u64,
        /// Skip exponents whose q^E - 1 exceeds this many bits.
        #[arg(long)]
        max_bits: Option<u64>,
    },
    /// Share of primes up to X that are 1 mod p^a.
    Density {
        #[arg(long)]
        p: u64,
        #[arg(long = "X", alias = "x")]
        x: u64,
    },
    /// Prime divisors of #E(F_q) for y^2 = x^3 + a4 x + a6.
    EcTorsion {
        #[arg(long, allow_hyphen_values = true)]
        a4: i64,
        #[arg(long, allow_hyphen_values = true)]
        a6: i64,
        #[command(flatten)]
        field: FieldArgs,
    },
    /// Component-group orders along a tower.
    Tower {
        #[arg(long)]
        vdelta: u64,
        #[arg(long)]
        p: u64,
        /// Comma-separated ramification indices e_n.
        #[arg(long, value_delimiter = ',', required = true)]
        e: Vec<u64>,
    },
    /// Run an experiment config file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn load_map(path: &Path) -> Result<MapSpecDto> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))
}

fn config_of(cmd: Cmd) -> Result<ExperimentConfig> {
    let mut c = ExperimentConfig::new(Command::Census);
    match cmd {
        Cmd::Census { map, field } => {
            c.map = Some(load_map(&map)?);
            c.field = Some(field.dto());
        }
        Cmd::Bounds { map, field, e } => {
            c.command = Command::Bounds;
            c.map = Some(load_map(&map)?);
            c.field = Some(field.dto());
            c.params.e = Some(e);
        }
        Cmd::Lift { map, ring, cycle } => {
            c.command = Command::Lift;
            c.map = Some(load_map(&map)?);
            c.ring = Some(ring.dto()?);
            let points: Vec<Vec<FieldElemDto>> =
                serde_json::from_str(&cycle).map_err(|e| CliError::Schema(format!("--cycle: {e}")))?;
            c.params.cycle = Some(points);
        }
        Cmd::FindPeriodic { map, ring, n_max } => {
            c.command = Command::FindPeriodic;
            c.map = Some(load_map(&map)?);
            c.ring = Some(ring.dto()?);
            c.params.n_max = Some(n_max);
        }
        Cmd::Verify { map, field, e, n_max, precision } => {
            c.command = Command::Verify;
            c.map = Some(load_map(&map)?);
            c.field = Some(field.dto());
            c.params.e_list = Some(e);
            c.params.n_max = Some(n_max);
            c.params.precision = precision;
        }
        Cmd::PowerMap { q, p, k_max } => {
            c.command = Command::PowerMap;
            (c.params.q, c.params.p, c.params.k_max) = (Some(q), Some(p), Some(k_max));
        }
        Cmd::Sieve { q, p, a, m_max, max_bits } => {
            c.command = Command::Sieve;
            (c.params.q, c.params.p, c.params.a, c.params.m_max) = (Some(q), Some(p), Some(a), Some(m_max));
            c.params.max_bits = max_bits;
        }
        Cmd::Density { p, x } => {
            c.command = Command::Density;
            (c.params.p, c.params.x) = (Some(p), Some(x));
        }
        Cmd::EcTorsion { a4, a6, field } => {
            c.command = Command::EcTorsion;
            (c.params.a4, c.params.a6) = (Some(a4), Some(a6));
            c.field = Some(field.dto());
        }
        Cmd::Tower { vdelta, p, e } => {
            c.command = Command::Tower;
            (c.params.v_delta, c.params.p, c.params.e_seq) = (Some(vdelta), Some(p), Some(e));
        }
        Cmd::Run { config } => c = ExperimentConfig::load(&config)?,
    }
    Ok(c)
}

fn main_inner(cli: Cli) -> Result<()> {
    let mut config = config_of(cli.command)?;
    if let Some(format) = cli.format {
        config.format = format;
    }
    if let Some(output) = cli.output {
        config.output = Some(output.to_string_lossy().into_owned());
    }
    let text = execute(&config)?;
    match &config.output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{path}: {e}")))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn report_error(err: &CliError) -> ExitCode {
    let text = serde_json::to_string(&err.message()).unwrap_or_else(|_| format!("{{\"code\":\"{}\"}}", err.code()));
    eprintln!("{text}");
    ExitCode::from(err.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    panic::set_hook(Box::new(|_| {}));
    match panic::catch_unwind(|| main_inner(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(err)) => report_error(&err),
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unexpected failure".into());
            report_error(&CliError::Internal(message))
        }
    }
}
