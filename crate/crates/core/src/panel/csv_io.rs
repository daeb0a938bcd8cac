use std::fs::File;
use std::path::Path;

use chrono::NaiveDate;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{
    Gender, GameRecord, Panel, PanelError, PanelLimits, PanelResult, Person, PlayerGameRow, Race,
    RefereeCrew, Role,
};

pub const PERSONS_FILE: &str = "persons.csv";
pub const GAMES_FILE: &str = "games.csv";
pub const ROWS_FILE: &str = "player_games.csv";

#[derive(Debug, Serialize, Deserialize)]
struct PersonCsv {
    person_id: String,
    role: Role,
    race_fairface: Option<Race>,
    race_human: Option<Race>,
    l_star: Option<f64>,
    gender: Option<Gender>,
}

#[derive(Debug, Serialize, Deserialize)]
struct GameCsv {
    game_id: String,
    season: i32,
    date: NaiveDate,
    ref1: String,
    ref2: String,
    ref3: String,
    attendance: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct RowCsv {
    player_id: String,
    game_id: String,
    team_id: String,
    season: i32,
    minutes: f64,
    fouls: u32,
    starter: u8,
    home: u8,
    coach_id: String,
    team_won: Option<u8>,
}

/// Counts of records read from each file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LoadReport {
    pub persons: usize,
    pub games: usize,
    pub rows: usize,
}

fn read_records<T, U>(
    path: &Path,
    mut convert: impl FnMut(T) -> Result<U, String>,
) -> PanelResult<Vec<U>>
where
    T: DeserializeOwned,
{
    let file = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let headers = reader.headers()?.clone();
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| PanelError::Schema {
            file: file.clone(),
            line: e.position().map(|p| p.line()).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let schema = |message: String| PanelError::Schema {
            file: file.clone(),
            line,
            message,
        };
        let raw: T = record
            .deserialize(Some(&headers))
            .map_err(|e| schema(e.to_string()))?;
        out.push(convert(raw).map_err(schema)?);
    }
    Ok(out)
}

fn flag(name: &str, v: u8) -> Result<bool, String> {
    match v {
        0 => Ok(false),
        1 => Ok(true),
        other => Err(format!("{name} must be 0 or 1, got {other}")),
    }
}

/// Reads and validates the three panel CSVs.
pub fn load_panel(
    persons_csv: &Path,
    games_csv: &Path,
    rows_csv: &Path,
    limits: &PanelLimits,
) -> PanelResult<(Panel, LoadReport)> {
    let persons = read_records(persons_csv, |p: PersonCsv| {
        Ok(Person {
            person_id: p.person_id,
            role: p.role,
            race_fairface: p.race_fairface,
            race_human: p.race_human,
            l_star: p.l_star,
            gender: p.gender,
        })
    })?;
    let games = read_records(games_csv, |g: GameCsv| {
        let crew = RefereeCrew::new([g.ref1, g.ref2, g.ref3]).map_err(|e| e.to_string())?;
        Ok(GameRecord {
            game_id: g.game_id,
            season: g.season,
            date: g.date,
            crew,
            attendance: g.attendance,
        })
    })?;
    let rows = read_records(rows_csv, |r: RowCsv| {
        Ok(PlayerGameRow {
            player_id: r.player_id,
            game_id: r.game_id,
            team_id: r.team_id,
            season: r.season,
            minutes: r.minutes,
            fouls: r.fouls,
            starter: flag("starter", r.starter)?,
            home: flag("home", r.home)?,
            coach_id: r.coach_id,
            team_won: r.team_won.map(|v| flag("team_won", v)).transpose()?,
        })
    })?;
    let report = LoadReport {
        persons: persons.len(),
        games: games.len(),
        rows: rows.len(),
    };
    Ok((Panel::new(persons, games, rows, limits)?, report))
}

/// Writes the panel as `persons.csv`, `games.csv` and `player_games.csv` in `dir`.
pub fn write_panel(panel: &Panel, dir: &Path) -> PanelResult<()> {
    std::fs::create_dir_all(dir)?;
    let mut w = csv::Writer::from_writer(File::create(dir.join(PERSONS_FILE))?);
    for p in panel.persons() {
        w.serialize(PersonCsv {
            person_id: p.person_id.clone(),
            role: p.role,
            race_fairface: p.race_fairface,
            race_human: p.race_human,
            l_star: p.l_star,
            gender: p.gender,
        })?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_writer(File::create(dir.join(GAMES_FILE))?);
    for g in panel.games() {
        let [r1, r2, r3] = g.crew.ids().clone();
        w.serialize(GameCsv {
            game_id: g.game_id.clone(),
            season: g.season,
            date: g.date,
            ref1: r1,
            ref2: r2,
            ref3: r3,
            attendance: g.attendance,
        })?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_writer(File::create(dir.join(ROWS_FILE))?);
    for r in panel.rows() {
        w.serialize(RowCsv {
            player_id: r.player_id.clone(),
            game_id: r.game_id.clone(),
            team_id: r.team_id.clone(),
            season: r.season,
            minutes: r.minutes,
            fouls: r.fouls,
            starter: r.starter as u8,
            home: r.home as u8,
            coach_id: r.coach_id.clone(),
            team_won: r.team_won.map(u8::from),
        })?;
    }
    w.flush()?;
    Ok(())
}
