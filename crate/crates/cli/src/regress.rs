use std::fmt::Write as _;

use clap::{Args, ValueEnum};
use foulplay::features::{build_features, columns, feature_frame, ModelKind};
use foulplay::felm::{
    fit, observed_grid, per_referee_roster, pooled_change, quadratic_margins, render_table, FitOptions, PerRefereeOptions,
    SmallSample, TableColumn, TeamPerformance,
};
use foulplay::{Panel, SeasonRange};
use serde::Serialize;

use crate::output::OutputDir;
use crate::{PanelArgs, PeriodArgs, RaceSourceArg, UsageError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    /// Black × fraction non-Black referees.
    Race,
    /// Mean absolute L* distance to the crew.
    Tone,
    /// Change in a coefficient between two periods.
    Pooled,
    /// Crew distance and its square, with marginal effects.
    Quadratic,
    /// One regression per referee.
    PerReferee,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variable {
    Race,
    Tone,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SmallSampleArg {
    Cgm,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TeamPerformanceArg {
    WinFraction,
    Omit,
}

#[derive(Debug, Args, Serialize)]
pub struct RegressArgs {
    #[command(flatten)]
    pub panel: PanelArgs,
    /// Which regression to run.
    #[arg(long, value_enum)]
    pub model: Model,
    #[command(flatten)]
    pub period: PeriodArgs,
    /// First season of the second period (pooled model).
    #[arg(long)]
    pub post_first: Option<i32>,
    /// Last season of the second period (pooled model).
    #[arg(long)]
    pub post_last: Option<i32>,
    /// Variable whose change the pooled model tests.
    #[arg(long, value_enum, default_value = "tone")]
    pub variable: Variable,
    /// Race labels used by the race model.
    #[arg(long, value_enum, default_value = "fairface")]
    pub race_source: RaceSourceArg,
    /// Small-sample factor applied to each cluster dimension.
    #[arg(long, value_enum, default_value = "cgm")]
    pub small_sample: SmallSampleArg,
    /// Number of grid points for quadratic marginal effects.
    #[arg(long, default_value_t = 25)]
    pub grid: usize,
    /// Minimum share of games a referee must have worked (per-referee model).
    #[arg(long, default_value_t = 0.01)]
    pub min_game_share: f64,
    /// Team-performance control in the per-referee model.
    #[arg(long, value_enum, default_value = "win-fraction")]
    pub team_performance: TeamPerformanceArg,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: std::path::PathBuf,
}

impl RegressArgs {
    fn fit_options(&self) -> FitOptions {
        let mut o = FitOptions::default();
        o.vcov.small_sample = match self.small_sample {
            SmallSampleArg::Cgm => SmallSample::Cgm,
            SmallSampleArg::None => SmallSample::None,
        };
        o
    }
}

fn single_model(panel: &Panel, args: &RegressArgs, model: ModelKind, quadratic: bool, out: &mut OutputDir) -> anyhow::Result<()> {
    let period = args.period.resolve(panel)?;
    let rows = build_features(panel, model, args.race_source.into(), period, None)?;
    let spec = model.spec(quadratic);
    let res = fit(&spec, &feature_frame(&rows), &args.fit_options())?;
    let mut terms = vec![model.variable_of_interest()];
    if quadratic {
        terms.push(columns::CREW_DISTANCE_SQ);
    }
    let title = match model {
        ModelKind::Race => "Race",
        ModelKind::Tone => "Skin tone",
    };
    let table = render_table(
        &[TableColumn { title: title.into(), subtitle: period.to_string(), fit: &res }],
        &terms,
    );
    print!("{table}");
    out.write("table.txt", &table)?;
    out.write_json("fit.json", &res)?;
    if quadratic {
        let distances: Vec<f64> = rows.iter().map(|r| r.crew_distance).collect();
        let grid = observed_grid(&distances, args.grid);
        let margins = quadratic_margins(&res, columns::CREW_DISTANCE, columns::CREW_DISTANCE_SQ, &grid)?;
        let mut w = csv::Writer::from_writer(Vec::new());
        for m in &margins {
            w.serialize(m)?;
        }
        out.write("margins.csv", w.into_inner()?)?;
    }
    Ok(())
}

fn pooled(panel: &Panel, args: &RegressArgs, out: &mut OutputDir) -> anyhow::Result<()> {
    let post_first = args
        .post_first
        .ok_or_else(|| UsageError("the pooled model needs --post-first".into()))?;
    let seasons = panel.seasons();
    let post_last = args.post_last.or(seasons.last().copied()).unwrap_or(post_first);
    let after = SeasonRange::new(post_first, post_last).map_err(|e| UsageError(e.to_string()))?;
    let before = match (args.period.first_season, args.period.last_season) {
        (None, None) => {
            let first = seasons.first().copied().unwrap_or(post_first);
            SeasonRange::new(first, post_first - 1).map_err(|_| UsageError("no seasons before --post-first".into()))?
        }
        _ => args.period.resolve(panel)?,
    };
    if before.overlaps(&after) {
        return Err(UsageError(format!("periods {before} and {after} overlap")).into());
    }
    let model = match args.variable {
        Variable::Race => ModelKind::Race,
        Variable::Tone => ModelKind::Tone,
    };
    let source = args.race_source.into();
    let rows_before = build_features(panel, model, source, before, None)?;
    let rows_after = build_features(panel, model, source, after, None)?;
    let pc = pooled_change(model, &rows_before, &rows_after, &args.fit_options())?;
    let columns = [
        TableColumn { title: "Pre-awareness".into(), subtitle: before.to_string(), fit: &pc.before },
        TableColumn { title: "Post-awareness".into(), subtitle: after.to_string(), fit: &pc.after },
        TableColumn { title: "Pooled".into(), subtitle: format!("{before}, {after}"), fit: &pc.pooled },
    ];
    let table = render_table(&columns, &[pc.variable.as_str(), pc.change_term.as_str()]);
    print!("{table}");
    out.write("table.txt", &table)?;
    out.write_json("pooled.json", &pc)?;
    Ok(())
}

fn per_referee(panel: &Panel, args: &RegressArgs, out: &mut OutputDir) -> anyhow::Result<()> {
    if !(0.0..=1.0).contains(&args.min_game_share) {
        return Err(UsageError("--min-game-share must lie in [0, 1]".into()).into());
    }
    let period = args.period.resolve(panel)?;
    let opts = PerRefereeOptions {
        min_game_share: args.min_game_share,
        team_performance: match args.team_performance {
            TeamPerformanceArg::WinFraction => TeamPerformance::RunningWinFraction,
            TeamPerformanceArg::Omit => TeamPerformance::Omit,
        },
        fit: args.fit_options(),
    };
    let roster = per_referee_roster(panel, period, &opts)?;
    if roster.estimates.is_empty() {
        anyhow::bail!("no referee could be estimated in {period}");
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    for e in &roster.estimates {
        w.serialize(e)?;
    }
    out.write("roster.csv", w.into_inner()?)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["referee_id", "reason"])?;
    for s in &roster.skipped {
        w.write_record([s.referee_id.as_str(), s.reason.as_str()])?;
    }
    out.write("skipped.csv", w.into_inner()?)?;
    out.write_json("roster.json", &roster)?;

    let mut text = format!("Per-referee skin-tone distance effects, {}\n", period);
    let _ = writeln!(text, "{:<10} {:>6} {:>9} {:>9} {:>20}", "Referee", "Games", "Estimate", "SE", "95% CI");
    for e in &roster.estimates {
        let _ = writeln!(
            text,
            "{:<10} {:>6} {:>9.4} {:>9.4} {:>20}",
            e.referee_id,
            e.games,
            e.estimate,
            e.std_error,
            format!("[{:.4}, {:.4}]", e.ci_low, e.ci_high)
        );
    }
    for s in &roster.skipped {
        let _ = writeln!(text, "skipped {}: {}", s.referee_id, s.reason);
    }
    print!("{text}");
    out.write("table.txt", &text)?;
    Ok(())
}

pub fn run(args: RegressArgs) -> anyhow::Result<()> {
    if args.grid == 0 {
        return Err(UsageError("--grid must be at least 1".into()).into());
    }
    let inputs = args.panel.paths()?;
    let panel = args.panel.load()?;
    let mut out = OutputDir::new(&args.out);
    match args.model {
        Model::Race => single_model(&panel, &args, ModelKind::Race, false, &mut out)?,
        Model::Tone => single_model(&panel, &args, ModelKind::Tone, false, &mut out)?,
        Model::Quadratic => single_model(&panel, &args, ModelKind::Tone, true, &mut out)?,
        Model::Pooled => pooled(&panel, &args, &mut out)?,
        Model::PerReferee => per_referee(&panel, &args, &mut out)?,
    }
    out.finish("regress", &args, None, &inputs)
}
