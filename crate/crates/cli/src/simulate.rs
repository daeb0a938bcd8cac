use std::path::PathBuf;

use anyhow::Context;
use clap::Args;
use foulplay::panel::{write_panel, GAMES_FILE, PERSONS_FILE, ROWS_FILE};
use foulplay::sim::{generate, PlantedReferee, SimConfig};
use serde::Serialize;

use crate::output::OutputDir;
use crate::UsageError;

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    /// Output directory for the three panel CSVs.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    /// Seed for every random draw.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Full generator configuration as JSON; the flags below override it.
    #[arg(long, value_name = "JSON")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seasons: Option<usize>,
    #[arg(long)]
    pub first_season: Option<i32>,
    #[arg(long)]
    pub teams: Option<usize>,
    #[arg(long)]
    pub games_per_team: Option<usize>,
    #[arg(long)]
    pub players_per_team: Option<usize>,
    #[arg(long)]
    pub starters: Option<usize>,
    #[arg(long)]
    pub referees: Option<usize>,
    /// Planted coefficient on Black × fraction non-Black referees.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Planted coefficient on crew distance (per L* unit).
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// Index (0-based) of a referee with an individual bias.
    #[arg(long, requires = "delta")]
    pub planted_referee: Option<usize>,
    /// Individual bias per L* unit of the planted referee.
    #[arg(long, requires = "planted_referee", allow_hyphen_values = true)]
    pub delta: Option<f64>,
}

impl SimulateArgs {
    fn config(&self) -> anyhow::Result<SimConfig> {
        let mut c = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
            }
            None => SimConfig::default(),
        };
        macro_rules! set {
            ($($field:ident <- $flag:ident),*) => {$( if let Some(v) = self.$flag { c.$field = v; } )*};
        }
        set!(seed <- seed, seasons <- seasons, first_season <- first_season, teams <- teams,
             games_per_team <- games_per_team, players_per_team <- players_per_team, starters <- starters,
             referee_pool <- referees, planted_alpha <- alpha, planted_beta <- beta);
        if let (Some(index), Some(delta)) = (self.planted_referee, self.delta) {
            c.planted_referee = Some(PlantedReferee { index, delta });
        }
        c.validate().map_err(|e| UsageError(e.to_string()))?;
        Ok(c)
    }
}

pub fn run(args: SimulateArgs) -> anyhow::Result<()> {
    let config = args.config()?;
    let panel = generate(&config)?;
    write_panel(&panel, &args.out)?;
    let mut out = OutputDir::new(&args.out);
    for f in [PERSONS_FILE, GAMES_FILE, ROWS_FILE] {
        out.adopt(f);
    }
    out.write_json("config.json", &config)?;
    eprintln!("wrote {} player-games to {}", panel.rows().len(), args.out.display());
    let inputs: Vec<PathBuf> = args.config.iter().cloned().collect();
    out.finish("simulate", &args, Some(config.seed), &inputs)
}
