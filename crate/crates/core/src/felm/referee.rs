use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{fit, FitError, FitOptions, FitResultT, Frame, ModelSpec};
use crate::features::{build_features, columns, FeatureError, ModelKind, RaceSource, SeasonRange};
use crate::panel::Panel;

pub const REFEREE_X_DISTANCE: &str = "referee_x_distance";
pub const REFEREE_PRESENT: &str = "referee_present";
pub const ATTENDANCE: &str = "attendance";
pub const TEAM_PERFORMANCE: &str = "team_performance";

/// How "team performance up to the game" enters the per-referee model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TeamPerformance {
    /// Share of the team's earlier games that season it won; 0.5 before any.
    #[default]
    RunningWinFraction,
    Omit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerRefereeOptions {
    /// Minimum share of the period's games a referee must have worked.
    pub min_game_share: f64,
    pub team_performance: TeamPerformance,
    pub fit: FitOptions,
}

impl Default for PerRefereeOptions {
    fn default() -> Self {
        Self {
            min_game_share: 0.01,
            team_performance: TeamPerformance::RunningWinFraction,
            fit: FitOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
struct DesignRow {
    player_id: String,
    player_year: String,
    game: usize,
    player_l: f64,
    foul_rate: f64,
    minutes: f64,
    crew_distance: f64,
    starter: f64,
    home: f64,
    coach: f64,
    team_performance: f64,
}

/// Period data shared by every per-referee regression.
#[derive(Debug, Clone)]
pub struct RefereeDesign {
    period: SeasonRange,
    rows: Vec<DesignRow>,
    game_ids: Vec<String>,
    crews: Vec<[String; 3]>,
    attendance: Option<Vec<f64>>,
    referee_l: HashMap<String, f64>,
    team_performance: TeamPerformance,
}

// (date, game) -> did the team win, in date order.
type TeamSchedule = BTreeMap<(chrono::NaiveDate, String), Option<bool>>;

fn running_win_fraction(panel: &Panel, period: SeasonRange) -> HashMap<(String, String), f64> {
    let mut schedule: BTreeMap<(String, i32), TeamSchedule> = BTreeMap::new();
    for row in panel.rows().iter().filter(|r| period.contains(r.season)) {
        let Some(game) = panel.game(&row.game_id) else { continue };
        let slot = schedule
            .entry((row.team_id.clone(), row.season))
            .or_default()
            .entry((game.date, row.game_id.clone()))
            .or_insert(None);
        if slot.is_none() {
            *slot = row.team_won;
        }
    }
    let mut out = HashMap::new();
    for ((team, _), games) in schedule {
        let (mut wins, mut played) = (0u32, 0u32);
        for ((_, game_id), won) in games {
            let frac = if played == 0 { 0.5 } else { wins as f64 / played as f64 };
            out.insert((team.clone(), game_id), frac);
            if let Some(w) = won {
                played += 1;
                wins += w as u32;
            }
        }
    }
    out
}

impl RefereeDesign {
    pub fn build(panel: &Panel, period: SeasonRange, team_performance: TeamPerformance) -> Result<Self, FeatureError> {
        let features = build_features(panel, ModelKind::Tone, RaceSource::FairFace, period, None)?;
        let source_rows: Vec<_> = panel.rows().iter().filter(|r| period.contains(r.season)).collect();
        debug_assert_eq!(features.len(), source_rows.len());
        let perf = running_win_fraction(panel, period);

        let mut game_index: HashMap<String, usize> = HashMap::new();
        let mut game_ids = Vec::new();
        let mut crews = Vec::new();
        let mut attendance = Vec::new();
        let mut rows = Vec::with_capacity(features.len());
        for (f, src) in features.iter().zip(source_rows) {
            let game = panel
                .game(&f.game_id)
                .ok_or_else(|| FeatureError::UnknownPerson(f.game_id.clone()))?;
            let idx = *game_index.entry(f.game_id.clone()).or_insert_with(|| {
                game_ids.push(f.game_id.clone());
                crews.push(game.crew.ids().clone());
                attendance.push(game.attendance);
                game_ids.len() - 1
            });
            let player_l = panel
                .person(&f.player_id)
                .and_then(|p| p.l_star)
                .ok_or_else(|| FeatureError::MissingLabel {
                    person: f.player_id.clone(),
                    what: "L* value",
                })?;
            rows.push(DesignRow {
                player_id: f.player_id.clone(),
                player_year: f.player_year_key(),
                game: idx,
                player_l,
                foul_rate: f.foul_rate,
                minutes: f.weight,
                crew_distance: f.crew_distance,
                starter: f.starter,
                home: f.home,
                coach: f.coach,
                team_performance: perf.get(&(src.team_id.clone(), f.game_id.clone())).copied().unwrap_or(0.5),
            });
        }
        let mut referee_l = HashMap::new();
        for crew in &crews {
            for id in crew {
                if let Some(l) = panel.person(id).and_then(|p| p.l_star) {
                    referee_l.insert(id.clone(), l);
                }
            }
        }
        // Attendance enters only when every game in the period reports it.
        let attendance = attendance.into_iter().collect::<Option<Vec<f64>>>();
        Ok(Self {
            period,
            rows,
            game_ids,
            crews,
            attendance,
            referee_l,
            team_performance,
        })
    }

    pub fn period(&self) -> SeasonRange {
        self.period
    }

    pub fn n_games(&self) -> usize {
        self.game_ids.len()
    }

    pub fn uses_attendance(&self) -> bool {
        self.attendance.is_some()
    }

    /// Referees seen on at least one crew in the period, sorted by id.
    pub fn referees(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.crews.iter().flatten().cloned().collect();
        ids.sort();
        ids.dedup();
        ids
    }

    pub fn games_worked(&self, referee: &str) -> usize {
        self.crews.iter().filter(|c| c.iter().any(|r| r == referee)).count()
    }

    /// Regressors in order: the referee × distance interaction first.
    pub fn regressors(&self) -> Vec<String> {
        let mut r = vec![
            REFEREE_X_DISTANCE.to_string(),
            REFEREE_PRESENT.to_string(),
            columns::CREW_DISTANCE.to_string(),
            columns::STARTER.to_string(),
            columns::HOME.to_string(),
            columns::COACH.to_string(),
        ];
        if self.uses_attendance() {
            r.push(ATTENDANCE.to_string());
        }
        if self.team_performance == TeamPerformance::RunningWinFraction {
            r.push(TEAM_PERFORMANCE.to_string());
        }
        r
    }

    pub fn spec(&self) -> ModelSpec {
        ModelSpec::new(
            columns::FOUL_RATE,
            self.regressors(),
            vec![columns::PLAYER_YEAR.into()],
            columns::MINUTES,
            vec![columns::PLAYER.into(), columns::GAME.into()],
        )
        .expect("per-referee spec is valid")
    }

    /// Estimation frame for `referee`, whose L* must be known.
    pub fn frame(&self, referee: &str) -> FitResultT<Frame> {
        let l_ref = *self
            .referee_l
            .get(referee)
            .ok_or_else(|| FitError::Data(format!("referee {referee} has no L* value")))?;
        let present: Vec<f64> = self
            .crews
            .iter()
            .map(|c| if c.iter().any(|r| r == referee) { 1.0 } else { 0.0 })
            .collect();
        let rows = &self.rows;
        let col = |f: &dyn Fn(&DesignRow) -> f64| rows.iter().map(f).collect::<Vec<f64>>();
        let mut frame = Frame::new(rows.len());
        frame.add_numeric(columns::FOUL_RATE, col(&|r| r.foul_rate))?;
        frame.add_numeric(columns::MINUTES, col(&|r| r.minutes))?;
        frame.add_numeric(REFEREE_X_DISTANCE, col(&|r| present[r.game] * (l_ref - r.player_l).abs()))?;
        frame.add_numeric(REFEREE_PRESENT, col(&|r| present[r.game]))?;
        frame.add_numeric(columns::CREW_DISTANCE, col(&|r| r.crew_distance))?;
        frame.add_numeric(columns::STARTER, col(&|r| r.starter))?;
        frame.add_numeric(columns::HOME, col(&|r| r.home))?;
        frame.add_numeric(columns::COACH, col(&|r| r.coach))?;
        if let Some(att) = &self.attendance {
            frame.add_numeric(ATTENDANCE, col(&|r| att[r.game]))?;
        }
        frame.add_numeric(TEAM_PERFORMANCE, col(&|r| r.team_performance))?;
        let py: Vec<&str> = rows.iter().map(|r| r.player_year.as_str()).collect();
        frame.add_key(columns::PLAYER_YEAR, &py)?;
        let players: Vec<&str> = rows.iter().map(|r| r.player_id.as_str()).collect();
        frame.add_key(columns::PLAYER, &players)?;
        let games: Vec<usize> = rows.iter().map(|r| r.game).collect();
        frame.add_key(columns::GAME, &games)?;
        Ok(frame)
    }
}

/// One referee's deviation from the rest of the pool in the foul-rate
/// gradient with respect to her own skin-tone distance to the player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefereeEstimate {
    pub referee_id: String,
    pub games: usize,
    pub game_share: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub p_value: f64,
    pub n_obs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefereeSkip {
    pub referee_id: String,
    pub reason: String,
}

/// Per-referee regression; referees below the game-share threshold or whose
/// model cannot be estimated are skipped with a reason.
pub fn per_referee_fit(
    design: &RefereeDesign,
    referee: &str,
    options: &PerRefereeOptions,
) -> Result<RefereeEstimate, RefereeSkip> {
    let skip = |reason: String| RefereeSkip {
        referee_id: referee.to_string(),
        reason,
    };
    let games = design.games_worked(referee);
    let n_games = design.n_games();
    let share = if n_games == 0 { 0.0 } else { games as f64 / n_games as f64 };
    if share < options.min_game_share {
        return Err(skip(format!(
            "worked {games} of {n_games} games ({:.2}%), below the {:.2}% threshold",
            100.0 * share,
            100.0 * options.min_game_share
        )));
    }
    let frame = design.frame(referee).map_err(|e| skip(e.to_string()))?;
    let res = fit(&design.spec(), &frame, &options.fit).map_err(|e| skip(e.to_string()))?;
    let term = res.require(REFEREE_X_DISTANCE).map_err(|e| skip(e.to_string()))?;
    Ok(RefereeEstimate {
        referee_id: referee.to_string(),
        games,
        game_share: share,
        estimate: term.estimate,
        std_error: term.std_error,
        ci_low: term.ci_low,
        ci_high: term.ci_high,
        p_value: term.p_value,
        n_obs: res.n_obs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefereeRoster {
    pub period: SeasonRange,
    /// Ascending by estimate (ties by id).
    pub estimates: Vec<RefereeEstimate>,
    pub skipped: Vec<RefereeSkip>,
}

/// Runs [`per_referee_fit`] for every referee seen in the period, in parallel.
pub fn per_referee_roster(
    panel: &Panel,
    period: SeasonRange,
    options: &PerRefereeOptions,
) -> Result<RefereeRoster, FeatureError> {
    let design = RefereeDesign::build(panel, period, options.team_performance)?;
    let outcomes: Vec<_> = design
        .referees()
        .par_iter()
        .map(|r| per_referee_fit(&design, r, options))
        .collect();
    let mut estimates = Vec::new();
    let mut skipped = Vec::new();
    for o in outcomes {
        match o {
            Ok(e) => estimates.push(e),
            Err(s) => skipped.push(s),
        }
    }
    estimates.sort_by(|a, b| a.estimate.total_cmp(&b.estimate).then_with(|| a.referee_id.cmp(&b.referee_id)));
    Ok(RefereeRoster {
        period,
        estimates,
        skipped,
    })
}
