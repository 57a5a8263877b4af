use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use harness::Measurement;
use randomness::{PositiveLaw, WeightModel};
use serde::{Deserialize, Serialize};
use wedge::{WedgeFunction, DEFAULT_MAX_VERTICES};

use crate::CliError;

/// Environment variable that overrides the seed of a run or archived config.
pub const SEED_ENV: &str = "WEDGE_FPP_SEED";
pub const CONFIG_FILE: &str = "config.json";

#[derive(Debug, Parser)]
#[command(name = "wedge-fpp", version, about = "First-passage percolation on wedges of the square lattice")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,
    /// Re-run an archived configuration instead of a subcommand.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory; every file of the run is written below it.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (defaults to the available parallelism).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Exit with code 3 when a statistical check fails.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Cap on wedge vertices.
    #[arg(long, global = true)]
    pub max_vertices: Option<u64>,
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub schema: String,
    pub command: Command,
    pub seed: u64,
    pub workers: usize,
    pub strict: bool,
    pub max_vertices: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            schema: harness::SCHEMA.into(),
            command,
            seed: 0,
            workers: 1,
            strict: false,
            max_vertices: DEFAULT_MAX_VERTICES,
            out: None,
        }
    }

    /// Resolves flags, the environment and an optional archived config.
    ///
    /// The seed comes from `--seed`, else from the environment, else from the
    /// archived config, else 0.
    pub fn resolve(cli: Cli, env_seed: Option<String>) -> Result<Self, CliError> {
        let mut cfg = match (cli.command, &cli.config) {
            (Some(_), Some(_)) => return Err(CliError::Validation("give either a subcommand or --config, not both".into())),
            (Some(c), None) => RunConfig::new(c),
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
                let cfg: RunConfig = serde_json::from_str(&text)?;
                if cfg.schema != harness::SCHEMA {
                    return Err(CliError::Validation(format!("unsupported config schema {:?}", cfg.schema)));
                }
                cfg
            }
            (None, None) => return Err(CliError::Validation("a subcommand or --config is required".into())),
        };
        let env_seed = match env_seed {
            Some(s) => Some(s.trim().parse::<u64>().map_err(|_| CliError::Validation(format!("{SEED_ENV}={s:?} is not a u64")))?),
            None => None,
        };
        if let Some(s) = cli.seed.or(env_seed) {
            cfg.seed = s;
        }
        if let Some(w) = cli.workers {
            cfg.workers = w;
        } else if cli.config.is_none() {
            cfg.workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
        }
        if cfg.workers == 0 {
            return Err(CliError::Validation("--workers must be positive".into()));
        }
        cfg.strict |= cli.strict;
        if let Some(m) = cli.max_vertices {
            cfg.max_vertices = m;
        }
        if cli.out.is_some() {
            cfg.out = cli.out;
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Replicated passage times over an n-grid, with regime fit and variance checks.
    Simulate(SimulateArgs),
    /// Checks T^B(0, P(n)) = Y_n on every replica.
    DualityCheck(DualityArgs),
    /// Correlation length of subcritical bond percolation.
    Xi(XiArgs),
    /// Top-down open crossings of a block and its leftmost crossing.
    Crossing(CrossingArgs),
    /// Rectangle crossing probabilities along a height family.
    Sponge(SpongeArgs),
    /// Block sequence of a regime, optionally with the assumption audit.
    Sequence(SequenceArgs),
    /// Martingale increments along leftmost crossings.
    Martingale(MartingaleArgs),
    /// Growth regime of E T(0, P(n)).
    Classify(ClassifyArgs),
    /// Normality of the standardized passage time at one n.
    Clt(CltArgs),
    /// Summary tables and plot data from a run directory.
    Report(ReportArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::DualityCheck(_) => "duality-check",
            Command::Xi(_) => "xi",
            Command::Crossing(_) => "crossing",
            Command::Sponge(_) => "sponge",
            Command::Sequence(_) => "sequence",
            Command::Martingale(_) => "martingale",
            Command::Classify(_) => "classify",
            Command::Clt(_) => "clt",
            Command::Report(_) => "report",
        }
    }
}

/// `f(u) = a log(1+u) + b log(1 + log(1+u))`.
#[derive(Debug, Clone, Copy, PartialEq, Args, Serialize, Deserialize)]
pub struct WedgeArgs {
    #[arg(long)]
    pub a: f64,
    #[arg(long, default_value_t = 0.0)]
    pub b: f64,
}

impl WedgeArgs {
    pub fn function(&self) -> Result<WedgeFunction, CliError> {
        Ok(WedgeFunction::log_log_log(self.a, self.b)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LawKind {
    Constant,
    ShiftedExponential,
    Pareto,
}

/// Law of the positive part `tau' >= delta`.
#[derive(Debug, Clone, Copy, PartialEq, Args, Serialize, Deserialize)]
pub struct LawArgs {
    #[arg(long, value_enum, default_value_t = LawKind::Constant)]
    pub law: LawKind,
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    /// Rate of the exponential part.
    #[arg(long, default_value_t = 1.0)]
    pub rate: f64,
    /// Tail exponent of the Pareto part.
    #[arg(long, default_value_t = 4.5)]
    pub exponent: f64,
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
}

impl LawArgs {
    pub fn model(&self, p: f64) -> Result<WeightModel, CliError> {
        let law = match self.law {
            LawKind::Constant => PositiveLaw::Constant,
            LawKind::ShiftedExponential => PositiveLaw::ShiftedExponential { rate: self.rate },
            LawKind::Pareto => PositiveLaw::ParetoTail { exponent: self.exponent, scale: self.scale },
        };
        Ok(WeightModel::with_law(p, self.delta, law)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum Case {
    /// `p = 1/2`.
    #[value(name = "1")]
    #[serde(rename = "1")]
    One,
    /// `p > 1/2`, `a < xi`.
    #[value(name = "2a")]
    #[serde(rename = "2a")]
    TwoA,
    /// `p > 1/2`, `b <= a = xi`.
    #[value(name = "2b")]
    #[serde(rename = "2b")]
    TwoB,
}

impl Case {
    pub fn regime(&self) -> sequences::Regime {
        match self {
            Case::One => sequences::Regime::Critical,
            Case::TwoA => sequences::Regime::SubXi,
            Case::TwoB => sequences::Regime::AtXi,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub wedge: WedgeArgs,
    #[arg(long)]
    pub p: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub law: LawArgs,
    /// Strictly increasing widths, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 200)]
    pub replicas: usize,
    /// Any of T, T_B, Y_n, Y_n_j=<j>, dT_B.
    #[arg(long, value_delimiter = ',', default_value = "T")]
    pub measure: Vec<Measurement>,
    /// Correlation length at 1 - p; estimated when needed and absent.
    #[arg(long)]
    pub xi: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub xi_ci: f64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct DualityArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub wedge: WedgeArgs,
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 200)]
    pub replicas: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetArg {
    /// `P(0 <-> P(n))`.
    Plane,
    /// `P(0 <-> n e_1)`.
    Point,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct XiArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 16)]
    pub nmax: usize,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, value_enum, default_value_t = TargetArg::Plane)]
    pub target: TargetArg,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct CrossingArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub wedge: WedgeArgs,
    #[arg(long)]
    pub p: f64,
    /// Leftmost column of the block.
    #[arg(long)]
    pub lo: usize,
    /// Rightmost column of the block.
    #[arg(long)]
    pub hi: usize,
    #[arg(long, default_value_t = 1000)]
    pub samples: u64,
    /// Compare the leftmost crossing with exhaustive search on every sample.
    #[arg(long)]
    pub certify: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthArg {
    Thin,
    Thick,
    Balanced,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SpongeArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long, value_enum)]
    pub growth: GrowthArg,
    /// Constant of the balanced family; calibrated when absent.
    #[arg(long)]
    pub c: Option<f64>,
    /// Calibration width for the balanced family (defaults to the middle of --n).
    #[arg(long)]
    pub n_ref: Option<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 400)]
    pub samples: u64,
    /// Correlation length at p; estimated when absent.
    #[arg(long)]
    pub xi: Option<f64>,
    #[arg(long, default_value_t = 1 << 24)]
    pub max_height: u64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SequenceArgs {
    #[arg(long, value_enum)]
    pub case: Case,
    #[command(flatten)]
    #[serde(flatten)]
    pub wedge: WedgeArgs,
    #[arg(long)]
    pub p: f64,
    /// Correlation length at 1 - p; estimated when needed and absent.
    #[arg(long)]
    pub xi: Option<f64>,
    #[arg(long, default_value_t = 40)]
    pub imax: usize,
    #[arg(long)]
    pub audit: bool,
    #[arg(long, default_value_t = 400)]
    pub samples: u64,
    /// First audited block (defaults to the audit index).
    #[arg(long)]
    pub ilo: Option<usize>,
    /// Last audited block (defaults to ten blocks on).
    #[arg(long)]
    pub ihi: Option<usize>,
    /// Levels of the line-to-line tail.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub m: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct MartingaleArgs {
    #[arg(long, value_enum)]
    pub case: Case,
    #[command(flatten)]
    #[serde(flatten)]
    pub wedge: WedgeArgs,
    #[arg(long)]
    pub p: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub law: LawArgs,
    #[arg(long)]
    pub xi: Option<f64>,
    #[arg(long, default_value_t = 10)]
    pub i0: usize,
    #[arg(long, default_value_t = 500)]
    pub outer: usize,
    #[arg(long, default_value_t = 256)]
    pub inner: usize,
    /// Largest number of blocks scanned for a crossing.
    #[arg(long, default_value_t = martingale::DEFAULT_CAP)]
    pub cap: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub a: f64,
    #[arg(long, default_value_t = 0.0)]
    pub b: f64,
    #[arg(long)]
    pub p: f64,
    /// Correlation length at 1 - p; estimated when needed and absent.
    #[arg(long)]
    pub xi: Option<f64>,
    /// Half-width of the confidence interval of --xi.
    #[arg(long, default_value_t = 0.0)]
    pub xi_ci: f64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct CltArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub wedge: WedgeArgs,
    #[arg(long)]
    pub p: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub law: LawArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 2000)]
    pub replicas: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ReportArgs {
    /// Directory holding the artifacts of earlier runs.
    #[arg(long)]
    pub dir: PathBuf,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("wedge-fpp").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn seed_precedence() {
        let argv = ["classify", "--a", "1", "--p", "0.5", "--workers", "2"];
        assert_eq!(RunConfig::resolve(parse(&argv), None).unwrap().seed, 0);
        assert_eq!(RunConfig::resolve(parse(&argv), Some("17".into())).unwrap().seed, 17);
        let mut with_flag = argv.to_vec();
        with_flag.extend(["--seed", "5"]);
        assert_eq!(RunConfig::resolve(parse(&with_flag), Some("17".into())).unwrap().seed, 5);
        assert!(matches!(RunConfig::resolve(parse(&argv), Some("x".into())), Err(CliError::Validation(_))));
    }

    #[test]
    fn archived_config_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig::resolve(
            parse(&["simulate", "--a", "1", "--p", "0.5", "--n", "8,16", "--measure", "T,Y_n_j=2,dT_B", "--seed", "9", "--workers", "3"]),
            None,
        )
        .unwrap();
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&text).unwrap(), cfg);
        let path = dir.path().join(CONFIG_FILE);
        std::fs::write(&path, &text).unwrap();
        let replay = RunConfig::resolve(parse(&["--config", path.to_str().unwrap()]), None).unwrap();
        assert_eq!(replay, cfg);
        let overridden = RunConfig::resolve(parse(&["--config", path.to_str().unwrap(), "--workers", "1"]), Some("4".into())).unwrap();
        assert_eq!((overridden.workers, overridden.seed), (1, 4));
        assert_eq!(overridden.command, cfg.command);
    }

    #[test]
    fn rejects_bad_combinations() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, "{}").unwrap();
        assert!(RunConfig::resolve(parse(&["--config", path.to_str().unwrap()]), None).is_err());
        assert!(RunConfig::resolve(parse(&["--workers", "2"]), None).is_err());
        assert!(RunConfig::resolve(parse(&["xi", "--p", "0.3", "--workers", "0"]), None).is_err());
        assert!(Cli::try_parse_from(["wedge-fpp", "sequence", "--case", "3", "--a", "1", "--p", "0.5"]).is_err());
    }

    #[test]
    fn every_subcommand_serializes_with_its_name() {
        let cases: [&[&str]; 10] = [
            &["simulate", "--a", "1", "--p", "0.5", "--n", "8"],
            &["duality-check", "--a", "1", "--p", "0.5", "--n", "8"],
            &["xi", "--p", "0.3"],
            &["crossing", "--a", "1", "--p", "0.5", "--lo", "2", "--hi", "4"],
            &["sponge", "--p", "0.3", "--growth", "thin", "--n", "4,8"],
            &["sequence", "--case", "2b", "--a", "1", "--p", "0.7"],
            &["martingale", "--case", "1", "--a", "1", "--p", "0.5", "--law", "pareto"],
            &["classify", "--a", "1", "--p", "0.5"],
            &["clt", "--a", "1", "--p", "0.5", "--n", "8"],
            &["report", "--dir", "."],
        ];
        for args in cases {
            let cfg = RunConfig::resolve(parse(args), None).unwrap();
            let v = serde_json::to_value(&cfg).unwrap();
            assert_eq!(v["command"]["subcommand"], cfg.command.name());
            assert_eq!(serde_json::from_value::<RunConfig>(v).unwrap(), cfg);
        }
    }
}
