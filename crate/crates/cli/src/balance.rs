use clap::{Args, ValueEnum};
use foulplay::stats::{balance_table, BalanceMode};
use serde::Serialize;

use crate::output::OutputDir;
use crate::{PanelArgs, PeriodArgs, RaceSourceArg};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    /// Black starters against non-Black referees.
    Race,
    /// Starter L* quartile against crew L* quartile.
    Tone,
}

#[derive(Debug, Args, Serialize)]
pub struct BalanceArgs {
    #[command(flatten)]
    pub panel: PanelArgs,
    #[command(flatten)]
    pub period: PeriodArgs,
    #[arg(long, value_enum, default_value = "race")]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value = "fairface")]
    pub race_source: RaceSourceArg,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: std::path::PathBuf,
}

pub fn run(args: BalanceArgs) -> anyhow::Result<()> {
    let inputs = args.panel.paths()?;
    let panel = args.panel.load()?;
    let period = args.period.resolve(&panel)?;
    let mode = match args.mode {
        ModeArg::Race => BalanceMode::Race(args.race_source.into()),
        ModeArg::Tone => BalanceMode::Tone,
    };
    let table = balance_table(&panel, period, mode)?;
    let text = table.render();
    print!("{text}");
    let mut out = OutputDir::new(&args.out);
    out.write("balance.txt", &text)?;
    let mut csv = Vec::new();
    table.write_csv(&mut csv)?;
    out.write("balance.csv", csv)?;
    out.write_json("balance.json", &table)?;
    out.finish("balance", &args, None, &inputs)
}
