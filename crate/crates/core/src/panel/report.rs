use std::collections::{BTreeSet, HashSet};

use serde::Serialize;

use super::{Panel, Race, RaceSource, Role};
use crate::features::crew_distance;

/// Totals in the layout of a "Sample size" table.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PanelReport {
    pub players: usize,
    pub referees: usize,
    pub games: usize,
    pub player_games: usize,
    pub player_minutes: f64,
}

/// Counts distinct players and referees that appear in games, games, rows
/// and minutes.
pub fn validate_panel(panel: &Panel) -> PanelReport {
    let players: HashSet<&str> = panel.rows().iter().map(|r| r.player_id.as_str()).collect();
    let referees: HashSet<&str> = panel
        .games()
        .iter()
        .flat_map(|g| g.crew.ids().iter().map(String::as_str))
        .collect();
    PanelReport {
        players: players.len(),
        referees: referees.len(),
        games: panel.games().len(),
        player_games: panel.rows().len(),
        player_minutes: panel.rows().iter().map(|r| r.minutes).sum(),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ToneSummary {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub max: f64,
}

impl ToneSummary {
    /// Sample SD (n − 1 denominator). Empty input yields the zero summary.
    pub fn from_values(values: &[f64]) -> Self {
        if values.is_empty() {
            return Self::default();
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let sd = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self {
            n: values.len(),
            mean,
            sd,
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

/// One column (Black, non-Black or total) of the sample-size table.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct GroupSize {
    pub players: usize,
    pub player_tone: ToneSummary,
    pub referees: usize,
    pub referee_tone: ToneSummary,
    pub games: usize,
    pub player_games: usize,
    pub player_minutes: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleSizeTable {
    pub race_source: RaceSource,
    pub black: GroupSize,
    pub non_black: GroupSize,
    pub total: GroupSize,
    pub unique_crews: usize,
    /// Player-game crew distance; `None` when some L* is missing.
    pub crew_distance: Option<ToneSummary>,
}

/// Sample sizes split by the selected race labels. Persons without a label
/// count only toward the total column.
pub fn sample_size(panel: &Panel, source: RaceSource) -> SampleSizeTable {
    let group = |want: Option<Race>| -> GroupSize {
        let matches = |id: &str| {
            want.is_none() || panel.person(id).and_then(|p| p.race(source)) == want
        };
        let rows: Vec<_> = panel.rows().iter().filter(|r| matches(&r.player_id)).collect();
        let players: BTreeSet<&str> = rows.iter().map(|r| r.player_id.as_str()).collect();
        let games: HashSet<&str> = rows.iter().map(|r| r.game_id.as_str()).collect();
        let referees: BTreeSet<&str> = panel
            .games()
            .iter()
            .flat_map(|g| g.crew.ids().iter().map(String::as_str))
            .filter(|id| matches(id))
            .collect();
        let tones = |ids: &BTreeSet<&str>| -> Vec<f64> {
            ids.iter()
                .filter_map(|id| panel.person(id).and_then(|p| p.l_star))
                .collect()
        };
        GroupSize {
            players: players.len(),
            player_tone: ToneSummary::from_values(&tones(&players)),
            referees: referees.len(),
            referee_tone: ToneSummary::from_values(&tones(&referees)),
            games: games.len(),
            player_games: rows.len(),
            player_minutes: rows.iter().map(|r| r.minutes).sum(),
        }
    };

    let unique_crews: HashSet<[String; 3]> =
        panel.games().iter().map(|g| g.crew.sorted_key()).collect();

    let distances: Option<Vec<f64>> = panel
        .rows()
        .iter()
        .map(|r| {
            let player = panel.person(&r.player_id)?.l_star?;
            let game = panel.game(&r.game_id)?;
            let mut crew = [0.0; 3];
            for (slot, id) in crew.iter_mut().zip(game.crew.ids()) {
                *slot = panel.person(id)?.l_star?;
            }
            Some(crew_distance(player, crew))
        })
        .collect();

    SampleSizeTable {
        race_source: source,
        black: group(Some(Race::Black)),
        non_black: group(Some(Race::NonBlack)),
        total: group(None),
        unique_crews: unique_crews.len(),
        crew_distance: distances.map(|d| ToneSummary::from_values(&d)),
    }
}

impl SampleSizeTable {
    /// Aligned plain-text rendering.
    pub fn render(&self) -> String {
        let cols = [&self.black, &self.non_black, &self.total];
        let mut out = String::new();
        out.push_str(&format!("{:<28}{:>14}{:>14}{:>14}\n", "", "Black", "Non-Black", "Total"));
        let mut line = |label: &str, f: &dyn Fn(&GroupSize) -> String| {
            out.push_str(&format!("{label:<28}"));
            for c in cols {
                out.push_str(&format!("{:>14}", f(c)));
            }
            out.push('\n');
        };
        line("No. of players", &|g| g.players.to_string());
        line("  Mean L* value", &|g| format!("{:.2}", g.player_tone.mean));
        line("    (SD)", &|g| format!("({:.2})", g.player_tone.sd));
        line("No. of referees", &|g| g.referees.to_string());
        line("  Mean L* value", &|g| format!("{:.2}", g.referee_tone.mean));
        line("    (SD)", &|g| format!("({:.2})", g.referee_tone.sd));
        line("No. of games", &|g| g.games.to_string());
        line("No. of player-games", &|g| g.player_games.to_string());
        line("No. of player-minutes", &|g| format!("{:.0}", g.player_minutes));
        out.push_str(&format!("{:<28}{:>42}\n", "No. of unique crews", self.unique_crews));
        if let Some(d) = &self.crew_distance {
            out.push_str(&format!("{:<28}{:>42}\n", "  Mean abs. L* diff.", format!("{:.2}", d.mean)));
            out.push_str(&format!("{:<28}{:>42}\n", "    (SD)", format!("({:.2})", d.sd)));
        }
        out
    }
}

impl Panel {
    /// Referees in `role == Referee` order of appearance in the persons table.
    pub fn referee_ids(&self) -> Vec<&str> {
        self.persons()
            .iter()
            .filter(|p| p.role == Role::Referee)
            .map(|p| p.person_id.as_str())
            .collect()
    }
}
