//! Player-game panel: persons, games with their referee crews, and one row
//! per player per game.

mod csv_io;
mod report;

use std::collections::{BTreeMap, HashMap, HashSet};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use csv_io::{load_panel, write_panel, LoadReport, GAMES_FILE, PERSONS_FILE, ROWS_FILE};
pub use report::{sample_size, validate_panel, GroupSize, PanelReport, SampleSizeTable, ToneSummary};

#[derive(Debug, Error)]
pub enum PanelError {
    #[error("{file}:{line}: {message}")]
    Schema {
        file: String,
        line: u64,
        message: String,
    },
    #[error("unknown {kind} id `{id}`{}", context.as_deref().map(|c| format!(" ({c})")).unwrap_or_default())]
    Dangling {
        kind: &'static str,
        id: String,
        context: Option<String>,
    },
    #[error("duplicate {what}: {key}")]
    Duplicate { what: &'static str, key: String },
    #[error("invalid {what}: {message}")]
    Invalid { what: &'static str, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type PanelResult<T> = Result<T, PanelError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Player,
    Referee,
    Coach,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Race {
    Black,
    NonBlack,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    Woman,
    Man,
}

/// Which race labels an analysis uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RaceSource {
    #[default]
    FairFace,
    Human,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Person {
    pub person_id: String,
    pub role: Role,
    pub race_fairface: Option<Race>,
    pub race_human: Option<Race>,
    pub l_star: Option<f64>,
    pub gender: Option<Gender>,
}

impl Person {
    pub fn race(&self, source: RaceSource) -> Option<Race> {
        match source {
            RaceSource::FairFace => self.race_fairface,
            RaceSource::Human => self.race_human,
        }
    }
}

/// The three referees officiating one game.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RefereeCrew {
    ids: [String; 3],
}

impl RefereeCrew {
    pub fn new(ids: [String; 3]) -> PanelResult<Self> {
        if ids[0] == ids[1] || ids[0] == ids[2] || ids[1] == ids[2] {
            return Err(PanelError::Invalid {
                what: "referee crew",
                message: format!("referees must be distinct, got {ids:?}"),
            });
        }
        Ok(Self { ids })
    }

    pub fn ids(&self) -> &[String; 3] {
        &self.ids
    }

    pub fn contains(&self, referee_id: &str) -> bool {
        self.ids.iter().any(|r| r == referee_id)
    }

    /// Order-free identity of the crew.
    pub fn sorted_key(&self) -> [String; 3] {
        let mut ids = self.ids.clone();
        ids.sort();
        ids
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameRecord {
    pub game_id: String,
    pub season: i32,
    pub date: NaiveDate,
    pub crew: RefereeCrew,
    pub attendance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerGameRow {
    pub player_id: String,
    pub game_id: String,
    pub team_id: String,
    pub season: i32,
    pub minutes: f64,
    pub fouls: u32,
    pub starter: bool,
    pub home: bool,
    pub coach_id: String,
    /// Whether the player's team won; used for running team performance.
    pub team_won: Option<bool>,
}

/// Validation bounds applied at construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelLimits {
    pub max_minutes: f64,
    pub max_fouls: u32,
    pub seasons: Option<(i32, i32)>,
}

impl Default for PanelLimits {
    fn default() -> Self {
        Self {
            max_minutes: 48.0,
            max_fouls: 6,
            seasons: None,
        }
    }
}

/// Validated, immutable panel with lookup indexes.
#[derive(Debug, Clone)]
pub struct Panel {
    persons: Vec<Person>,
    games: Vec<GameRecord>,
    rows: Vec<PlayerGameRow>,
    person_index: HashMap<String, usize>,
    game_index: HashMap<String, usize>,
    rows_by_game: Vec<Vec<usize>>,
    rows_by_player_year: BTreeMap<(String, i32), Vec<usize>>,
}

impl Panel {
    pub fn new(
        persons: Vec<Person>,
        games: Vec<GameRecord>,
        rows: Vec<PlayerGameRow>,
        limits: &PanelLimits,
    ) -> PanelResult<Self> {
        let mut person_index = HashMap::with_capacity(persons.len());
        for (i, p) in persons.iter().enumerate() {
            if let Some(l) = p.l_star {
                if !(0.0..=100.0).contains(&l) {
                    return Err(PanelError::Invalid {
                        what: "person",
                        message: format!("{}: L* {l} outside [0, 100]", p.person_id),
                    });
                }
            }
            if person_index.insert(p.person_id.clone(), i).is_some() {
                return Err(PanelError::Duplicate {
                    what: "person_id",
                    key: p.person_id.clone(),
                });
            }
        }
        let role_of = |id: &str, want: Role, context: &str| -> PanelResult<()> {
            match person_index.get(id) {
                None => Err(PanelError::Dangling {
                    kind: match want {
                        Role::Player => "player",
                        Role::Referee => "referee",
                        Role::Coach => "coach",
                    },
                    id: id.to_string(),
                    context: Some(context.to_string()),
                }),
                Some(&i) if persons[i].role != want => Err(PanelError::Invalid {
                    what: "role",
                    message: format!("{id} is a {:?}, expected {want:?} ({context})", persons[i].role),
                }),
                Some(_) => Ok(()),
            }
        };

        let mut game_index = HashMap::with_capacity(games.len());
        for (i, g) in games.iter().enumerate() {
            if game_index.insert(g.game_id.clone(), i).is_some() {
                return Err(PanelError::Duplicate {
                    what: "game_id",
                    key: g.game_id.clone(),
                });
            }
            if let Some((lo, hi)) = limits.seasons {
                if g.season < lo || g.season > hi {
                    return Err(PanelError::Invalid {
                        what: "game",
                        message: format!("{}: season {} outside {lo}-{hi}", g.game_id, g.season),
                    });
                }
            }
            if let Some(a) = g.attendance {
                if !(a.is_finite() && a >= 0.0) {
                    return Err(PanelError::Invalid {
                        what: "game",
                        message: format!("{}: attendance {a}", g.game_id),
                    });
                }
            }
            for r in g.crew.ids() {
                role_of(r, Role::Referee, &format!("crew of game {}", g.game_id))?;
            }
        }

        let mut rows_by_game = vec![Vec::new(); games.len()];
        let mut rows_by_player_year: BTreeMap<(String, i32), Vec<usize>> = BTreeMap::new();
        let mut seen = HashSet::with_capacity(rows.len());
        for (i, r) in rows.iter().enumerate() {
            let context = format!("row {} / {}", r.player_id, r.game_id);
            let &g = game_index.get(&r.game_id).ok_or_else(|| PanelError::Dangling {
                kind: "game",
                id: r.game_id.clone(),
                context: Some(context.clone()),
            })?;
            role_of(&r.player_id, Role::Player, &context)?;
            role_of(&r.coach_id, Role::Coach, &context)?;
            if r.season != games[g].season {
                return Err(PanelError::Invalid {
                    what: "row",
                    message: format!("{context}: season {} but game is in {}", r.season, games[g].season),
                });
            }
            if !(r.minutes.is_finite() && r.minutes > 0.0 && r.minutes <= limits.max_minutes) {
                return Err(PanelError::Invalid {
                    what: "row",
                    message: format!("{context}: minutes {} outside (0, {}]", r.minutes, limits.max_minutes),
                });
            }
            if r.fouls > limits.max_fouls {
                return Err(PanelError::Invalid {
                    what: "row",
                    message: format!("{context}: {} fouls exceeds {}", r.fouls, limits.max_fouls),
                });
            }
            if !seen.insert((r.player_id.as_str(), r.game_id.as_str())) {
                return Err(PanelError::Duplicate {
                    what: "(player_id, game_id) pair; each player appears once per game",
                    key: format!("({}, {})", r.player_id, r.game_id),
                });
            }
            rows_by_game[g].push(i);
            rows_by_player_year
                .entry((r.player_id.clone(), r.season))
                .or_default()
                .push(i);
        }

        Ok(Self {
            persons,
            games,
            rows,
            person_index,
            game_index,
            rows_by_game,
            rows_by_player_year,
        })
    }

    pub fn persons(&self) -> &[Person] {
        &self.persons
    }

    pub fn games(&self) -> &[GameRecord] {
        &self.games
    }

    pub fn rows(&self) -> &[PlayerGameRow] {
        &self.rows
    }

    pub fn person(&self, id: &str) -> Option<&Person> {
        self.person_index.get(id).map(|&i| &self.persons[i])
    }

    pub fn game(&self, id: &str) -> Option<&GameRecord> {
        self.game_index.get(id).map(|&i| &self.games[i])
    }

    /// Row indexes for each game, aligned with [`Panel::games`].
    pub fn rows_by_game(&self) -> &[Vec<usize>] {
        &self.rows_by_game
    }

    pub fn rows_by_player_year(&self) -> &BTreeMap<(String, i32), Vec<usize>> {
        &self.rows_by_player_year
    }

    pub fn seasons(&self) -> Vec<i32> {
        let mut s: Vec<i32> = self.games.iter().map(|g| g.season).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    pub fn referees(&self) -> impl Iterator<Item = &Person> {
        self.persons.iter().filter(|p| p.role == Role::Referee)
    }
}
