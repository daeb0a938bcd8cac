mod balance;
mod kappa;
mod lowess;
mod output;
mod regress;
mod simulate;
mod tone;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use foulplay::panel::{load_panel, PanelLimits, GAMES_FILE, PERSONS_FILE, ROWS_FILE};
use foulplay::{Panel, RaceSource, SeasonRange};
use serde::Serialize;

/// Environment variable that caps the worker thread count.
pub const WORKERS_ENV: &str = "FOULPLAY_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "foulplay", version, about = "Skin-tone measurement and referee-bias panel regressions")]
#[command(after_help = "Set FOULPLAY_WORKERS to limit the number of worker threads.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Measure the representative skin tone of every image in a directory.
    Tone(tone::ToneArgs),
    /// Fit a foul-rate regression on a panel.
    Regress(regress::RegressArgs),
    /// Chi-square balance tests of referee assignment, one per season.
    Balance(balance::BalanceArgs),
    /// Cohen's kappa between two label files.
    Kappa(kappa::KappaArgs),
    /// LOWESS smooth of two columns of a CSV file.
    Lowess(lowess::LowessArgs),
    /// Generate a synthetic panel with planted effects.
    Simulate(simulate::SimulateArgs),
}

/// Location of the three panel CSVs.
#[derive(Debug, Clone, Args, Serialize)]
pub struct PanelArgs {
    /// Directory holding persons.csv, games.csv and player_games.csv.
    #[arg(long, value_name = "DIR")]
    pub panel: Option<PathBuf>,
    /// Persons file (overrides --panel).
    #[arg(long, value_name = "CSV")]
    pub persons: Option<PathBuf>,
    /// Games file (overrides --panel).
    #[arg(long, value_name = "CSV")]
    pub games: Option<PathBuf>,
    /// Player-game rows file (overrides --panel).
    #[arg(long, value_name = "CSV")]
    pub rows: Option<PathBuf>,
    /// Hard cap on minutes per player-game.
    #[arg(long, default_value_t = 48.0)]
    pub max_minutes: f64,
}

impl PanelArgs {
    pub fn paths(&self) -> anyhow::Result<[PathBuf; 3]> {
        let pick = |explicit: &Option<PathBuf>, file: &str| -> anyhow::Result<PathBuf> {
            match (explicit, &self.panel) {
                (Some(p), _) => Ok(p.clone()),
                (None, Some(dir)) => Ok(dir.join(file)),
                (None, None) => Err(UsageError(format!("pass --panel DIR or the path to {file}")).into()),
            }
        };
        Ok([pick(&self.persons, PERSONS_FILE)?, pick(&self.games, GAMES_FILE)?, pick(&self.rows, ROWS_FILE)?])
    }

    pub fn load(&self) -> anyhow::Result<Panel> {
        let [p, g, r] = self.paths()?;
        let limits = PanelLimits { max_minutes: self.max_minutes, ..PanelLimits::default() };
        let (panel, report) = load_panel(&p, &g, &r, &limits).context("loading panel")?;
        eprintln!("loaded {} persons, {} games, {} player-games", report.persons, report.games, report.rows);
        Ok(panel)
    }
}

/// Season window; defaults to every season in the panel.
#[derive(Debug, Clone, Copy, Args, Serialize)]
pub struct PeriodArgs {
    /// First season of the analysis period.
    #[arg(long)]
    pub first_season: Option<i32>,
    /// Last season of the analysis period.
    #[arg(long)]
    pub last_season: Option<i32>,
}

impl PeriodArgs {
    pub fn resolve(&self, panel: &Panel) -> anyhow::Result<SeasonRange> {
        let seasons = panel.seasons();
        let (Some(&lo), Some(&hi)) = (seasons.first(), seasons.last()) else {
            anyhow::bail!("panel has no seasons");
        };
        let first = self.first_season.unwrap_or(lo);
        let last = self.last_season.unwrap_or(hi);
        SeasonRange::new(first, last).map_err(|e| UsageError(e.to_string()).into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RaceSourceArg {
    Fairface,
    Human,
}

impl From<RaceSourceArg> for RaceSource {
    fn from(a: RaceSourceArg) -> Self {
        match a {
            RaceSourceArg::Fairface => RaceSource::FairFace,
            RaceSourceArg::Human => RaceSource::Human,
        }
    }
}

/// Invalid arguments that clap cannot catch on its own; exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn configure_workers() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var(WORKERS_ENV) else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| UsageError(format!("{WORKERS_ENV} must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("starting worker pool")?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    configure_workers()?;
    match cli.command {
        Command::Tone(a) => tone::run(a),
        Command::Regress(a) => regress::run(a),
        Command::Balance(a) => balance::run(a),
        Command::Kappa(a) => kappa::run(a),
        Command::Lowess(a) => lowess::run(a),
        Command::Simulate(a) => simulate::run(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.downcast_ref::<UsageError>().is_some() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
