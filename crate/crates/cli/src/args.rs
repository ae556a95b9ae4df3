use std::f64::consts::FRAC_PI_2;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qgame_core::quantum::su2_from_angles;
use qgame_core::ratio::parse_rational;
use qgame_core::quantum::Unitary2;
use qgame_core::Rational;

#[derive(Debug, Parser)]
#[command(name = "qgames", version, about = "Classical, mediated and quantized two-player games")]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Seed for all sampling; `QGAMES_SEED` sets the default.
    #[arg(long, global = true, env = "QGAMES_SEED", default_value_t = 42)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Equilibria, dominance, correlated optima and EWL embedding checks.
    Analyze(AnalyzeArgs),
    /// Check or optimize a referee distribution.
    Correlated(CorrelatedArgs),
    /// Evaluate the EWL protocol.
    Ewl(EwlArgs),
    /// Certify a claimed equilibrium.
    Verify(VerifyArgs),
    /// Run every reproduction check.
    PaperCheck(PaperCheckArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Game file or builtin name (pd, poker, chicken).
    #[arg(long)]
    pub game: String,
    /// Entanglement levels to check; repeatable.
    #[arg(long, value_parser = parse_gamma)]
    pub gamma: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct CorrelatedArgs {
    #[arg(long)]
    pub game: String,
    /// Referee distribution over cells in row-major order, e.g. 1/3,1/3,1/3,0.
    /// Without it the objective is optimized over all correlated equilibria.
    #[arg(long, value_parser = parse_rationals)]
    pub rho: Option<RationalList>,
    #[arg(long, value_parser = parse_objective, default_value = "welfare")]
    pub objective: Objective,
}

#[derive(Debug, Args)]
pub struct EwlArgs {
    #[arg(long)]
    pub game: String,
    #[arg(long, value_parser = parse_gamma, default_value = "max")]
    pub gamma: f64,
    /// Player A's unitary as theta,alpha,beta.
    #[arg(long = "uA", value_parser = parse_unitary, allow_hyphen_values = true)]
    pub u_a: Option<Unitary2>,
    /// Player B's unitary as theta,alpha,beta.
    #[arg(long = "uB", value_parser = parse_unitary, allow_hyphen_values = true)]
    pub u_b: Option<Unitary2>,
    /// Haar-random play for each player without an explicit unitary.
    #[arg(long, value_enum)]
    pub mixture: Option<MixtureKind>,
    #[arg(long, default_value_t = 200_000)]
    pub samples: u64,
    #[arg(long, value_enum)]
    pub check: Option<CheckKind>,
    #[arg(long, default_value_t = 20)]
    pub grid_steps: usize,
    /// Run an outcome coverage scan with this many Haar pairs.
    #[arg(long)]
    pub coverage: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MixtureKind {
    Haar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    Proper,
    Complete,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub game: String,
    /// Without it a classical profile is checked exactly in the mixed game.
    #[arg(long, value_parser = parse_gamma)]
    pub gamma: Option<f64>,
    /// `classical:p,q` (first-strategy probabilities) or `haar`.
    #[arg(long, value_parser = parse_profile)]
    pub profile: ProfileSpec,
    #[arg(long, default_value_t = 8)]
    pub grid: usize,
    #[arg(long, default_value_t = 200_000)]
    pub samples: u64,
}

#[derive(Debug, Args)]
pub struct PaperCheckArgs {
    #[arg(long, default_value_t = 200_000)]
    pub samples: u64,
    /// Points per angle axis of the deviation grid.
    #[arg(long, default_value_t = 8)]
    pub grid: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RationalList(pub Vec<Rational>);

#[derive(Debug, Clone, PartialEq)]
pub enum Objective {
    Welfare,
    Player(usize),
    Custom(Vec<Rational>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileSpec {
    Classical(Rational, Rational),
    Haar,
}

pub fn parse_gamma(s: &str) -> Result<f64, String> {
    if s == "max" {
        return Ok(FRAC_PI_2);
    }
    s.parse::<f64>()
        .map_err(|_| format!("expected a number or 'max', got '{s}'"))
}

pub fn parse_rationals(s: &str) -> Result<RationalList, String> {
    s.split(',')
        .map(|part| parse_rational(part.trim()).map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()
        .map(RationalList)
}

pub fn parse_unitary(s: &str) -> Result<Unitary2, String> {
    let angles = s
        .split(',')
        .map(|part| part.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| format!("expected theta,alpha,beta, got '{s}'"))?;
    match angles[..] {
        [theta, alpha, beta] if angles.iter().all(|a| a.is_finite()) => {
            Ok(su2_from_angles(theta, alpha, beta))
        }
        _ => Err(format!("expected three finite angles theta,alpha,beta, got '{s}'")),
    }
}

pub fn parse_objective(s: &str) -> Result<Objective, String> {
    match s {
        "welfare" => Ok(Objective::Welfare),
        "player1" => Ok(Objective::Player(0)),
        "player2" => Ok(Objective::Player(1)),
        _ => match s.strip_prefix("custom:") {
            Some(rest) => parse_rationals(rest).map(|l| Objective::Custom(l.0)),
            None => Err(format!(
                "expected welfare, player1, player2 or custom:<rationals>, got '{s}'"
            )),
        },
    }
}

pub fn parse_profile(s: &str) -> Result<ProfileSpec, String> {
    if s == "haar" {
        return Ok(ProfileSpec::Haar);
    }
    let rest = s
        .strip_prefix("classical:")
        .ok_or_else(|| format!("expected classical:p,q or haar, got '{s}'"))?;
    let RationalList(v) = parse_rationals(rest)?;
    match <[Rational; 2]>::try_from(v) {
        Ok([p, q]) if qgame_core::simplex::is_probability(&p) && qgame_core::simplex::is_probability(&q) => {
            Ok(ProfileSpec::Classical(p, q))
        }
        _ => Err(format!("expected two probabilities p,q in [0, 1], got '{rest}'")),
    }
}
