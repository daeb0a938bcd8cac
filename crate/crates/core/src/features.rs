//! Regressors built from the panel: foul rate, crew race composition, crew
//! skin-tone distance, controls and the post-period flag.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::felm::{Frame, ModelSpec};
use crate::panel::{Panel, Race, RefereeCrew};

pub use crate::panel::RaceSource;

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("minutes must be positive, got {0}")]
    NonPositiveMinutes(f64),
    #[error("{person} has no {what}")]
    MissingLabel { person: String, what: &'static str },
    #[error("unknown person {0}")]
    UnknownPerson(String),
    #[error("no rows in period {0}")]
    NoRowsInPeriod(SeasonRange),
    #[error("invalid season range: {0}")]
    BadRange(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type FeatureResult<T> = Result<T, FeatureError>;

/// Fouls per 40 minutes played.
pub fn foul_rate(fouls: u32, minutes: f64) -> FeatureResult<f64> {
    if !(minutes > 0.0) {
        return Err(FeatureError::NonPositiveMinutes(minutes));
    }
    Ok(40.0 * fouls as f64 / minutes)
}

/// Share of the crew labelled non-Black under `source`.
pub fn frac_nonblack(panel: &Panel, crew: &RefereeCrew, source: RaceSource) -> FeatureResult<f64> {
    let mut non_black = 0;
    for id in crew.ids() {
        let person = panel
            .person(id)
            .ok_or_else(|| FeatureError::UnknownPerson(id.clone()))?;
        match person.race(source) {
            Some(Race::NonBlack) => non_black += 1,
            Some(Race::Black) => {}
            None => {
                return Err(FeatureError::MissingLabel {
                    person: id.clone(),
                    what: "race label",
                })
            }
        }
    }
    Ok(non_black as f64 / 3.0)
}

/// Mean absolute L* gap between a player and each referee of the crew.
pub fn crew_distance(player_l: f64, crew_ls: [f64; 3]) -> f64 {
    // Summing in sorted order makes the result exactly invariant to the
    // order in which the crew is listed.
    let mut gaps = crew_ls.map(|r| (player_l - r).abs());
    gaps.sort_by(f64::total_cmp);
    (gaps[0] + gaps[1] + gaps[2]) / 3.0
}

/// Inclusive range of seasons, written `2004-2006` (or a single `2005`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeasonRange {
    pub first: i32,
    pub last: i32,
}

impl SeasonRange {
    pub fn new(first: i32, last: i32) -> FeatureResult<Self> {
        if first > last {
            return Err(FeatureError::BadRange(format!("{first}-{last}")));
        }
        Ok(Self { first, last })
    }

    pub fn single(season: i32) -> Self {
        Self {
            first: season,
            last: season,
        }
    }

    pub fn contains(&self, season: i32) -> bool {
        (self.first..=self.last).contains(&season)
    }

    pub fn overlaps(&self, other: &SeasonRange) -> bool {
        self.first <= other.last && other.first <= self.last
    }
}

impl fmt::Display for SeasonRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.first == self.last {
            write!(f, "{}", self.first)
        } else {
            write!(f, "{}-{}", self.first, self.last)
        }
    }
}

impl FromStr for SeasonRange {
    type Err = FeatureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FeatureError::BadRange(s.to_string());
        match s.split_once('-') {
            Some((a, b)) => {
                SeasonRange::new(a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?)
            }
            None => Ok(SeasonRange::single(s.trim().parse().map_err(|_| bad())?)),
        }
    }
}

/// Which regression the features feed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// Black player × share of non-Black referees, coach race control.
    Race,
    /// Crew skin-tone distance, coach L* control.
    Tone,
}

pub mod columns {
    pub const FOUL_RATE: &str = "foul_rate";
    pub const MINUTES: &str = "minutes";
    pub const BLACK: &str = "black";
    pub const FRAC_NONBLACK: &str = "frac_nonblack";
    pub const BLACK_X_FRAC: &str = "black_x_frac_nonblack";
    pub const CREW_DISTANCE: &str = "crew_distance";
    pub const CREW_DISTANCE_SQ: &str = "crew_distance_sq";
    pub const STARTER: &str = "starter";
    pub const HOME: &str = "home";
    pub const COACH: &str = "coach";
    pub const POST: &str = "post";
    pub const PLAYER_YEAR: &str = "player_year";
    pub const GAME: &str = "game";
    pub const PLAYER: &str = "player";
}

/// One player-game observation ready for estimation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRow {
    pub player_id: String,
    pub game_id: String,
    pub season: i32,
    pub model: ModelKind,
    pub foul_rate: f64,
    pub weight: f64,
    /// Zero in the tone model.
    pub black_player: f64,
    /// Zero in the tone model.
    pub frac_nonblack_refs: f64,
    /// Zero in the race model.
    pub crew_distance: f64,
    pub starter: f64,
    pub home: f64,
    /// Coach is Black (race model) or coach L* (tone model).
    pub coach: f64,
    pub post: f64,
}

impl FeatureRow {
    pub fn player_year_key(&self) -> String {
        format!("{}@{}", self.player_id, self.season)
    }
}

impl ModelKind {
    /// Regressors in priority order. Main effects absorbed by the fixed
    /// effects are listed after the interaction so the collinearity pass drops
    /// them instead of the term of interest.
    pub fn regressors(self, quadratic: bool) -> Vec<&'static str> {
        use columns::*;
        match (self, quadratic) {
            (ModelKind::Race, _) => vec![BLACK_X_FRAC, BLACK, FRAC_NONBLACK, STARTER, HOME, COACH],
            (ModelKind::Tone, false) => vec![CREW_DISTANCE, STARTER, HOME, COACH],
            (ModelKind::Tone, true) => vec![CREW_DISTANCE, CREW_DISTANCE_SQ, STARTER, HOME, COACH],
        }
    }

    /// The variable whose coefficient the model is about.
    pub fn variable_of_interest(self) -> &'static str {
        match self {
            ModelKind::Race => columns::BLACK_X_FRAC,
            ModelKind::Tone => columns::CREW_DISTANCE,
        }
    }

    /// Minutes-weighted foul rate on the listed regressors with player-year
    /// and game effects absorbed and player × game clustering.
    pub fn spec(self, quadratic: bool) -> ModelSpec {
        ModelSpec::new(
            columns::FOUL_RATE,
            self.regressors(quadratic).iter().map(|s| s.to_string()).collect(),
            vec![columns::PLAYER_YEAR.into(), columns::GAME.into()],
            columns::MINUTES,
            vec![columns::PLAYER.into(), columns::GAME.into()],
        )
        .expect("built-in model specs are valid")
    }
}

fn lookup_l(panel: &Panel, id: &str) -> FeatureResult<f64> {
    panel
        .person(id)
        .ok_or_else(|| FeatureError::UnknownPerson(id.to_string()))?
        .l_star
        .ok_or_else(|| FeatureError::MissingLabel {
            person: id.to_string(),
            what: "L* value",
        })
}

fn lookup_black(panel: &Panel, id: &str, source: RaceSource) -> FeatureResult<f64> {
    match panel
        .person(id)
        .ok_or_else(|| FeatureError::UnknownPerson(id.to_string()))?
        .race(source)
    {
        Some(Race::Black) => Ok(1.0),
        Some(Race::NonBlack) => Ok(0.0),
        None => Err(FeatureError::MissingLabel {
            person: id.to_string(),
            what: "race label",
        }),
    }
}

/// One feature row per panel row whose season lies in `period`.
/// `post` is 1 exactly for seasons inside `post_range`.
pub fn build_features(
    panel: &Panel,
    model: ModelKind,
    source: RaceSource,
    period: SeasonRange,
    post_range: Option<SeasonRange>,
) -> FeatureResult<Vec<FeatureRow>> {
    let mut out = Vec::new();
    for row in panel.rows().iter().filter(|r| period.contains(r.season)) {
        let game = panel
            .game(&row.game_id)
            .ok_or_else(|| FeatureError::UnknownPerson(row.game_id.clone()))?;
        let (black_player, frac, distance, coach) = match model {
            ModelKind::Race => (
                lookup_black(panel, &row.player_id, source)?,
                frac_nonblack(panel, &game.crew, source)?,
                0.0,
                lookup_black(panel, &row.coach_id, source)?,
            ),
            ModelKind::Tone => {
                let player = lookup_l(panel, &row.player_id)?;
                let ids = game.crew.ids();
                let crew = [
                    lookup_l(panel, &ids[0])?,
                    lookup_l(panel, &ids[1])?,
                    lookup_l(panel, &ids[2])?,
                ];
                (0.0, 0.0, crew_distance(player, crew), lookup_l(panel, &row.coach_id)?)
            }
        };
        out.push(FeatureRow {
            player_id: row.player_id.clone(),
            game_id: row.game_id.clone(),
            season: row.season,
            model,
            foul_rate: foul_rate(row.fouls, row.minutes)?,
            weight: row.minutes,
            black_player,
            frac_nonblack_refs: frac,
            crew_distance: distance,
            starter: row.starter as u8 as f64,
            home: row.home as u8 as f64,
            coach,
            post: if post_range.is_some_and(|p| p.contains(row.season)) { 1.0 } else { 0.0 },
        });
    }
    if out.is_empty() {
        return Err(FeatureError::NoRowsInPeriod(period));
    }
    Ok(out)
}

/// Estimation frame with every feature column plus the player-year, game and
/// player keys.
pub fn feature_frame(rows: &[FeatureRow]) -> Frame {
    use columns::*;
    let col = |f: &dyn Fn(&FeatureRow) -> f64| rows.iter().map(f).collect::<Vec<f64>>();
    let mut frame = Frame::new(rows.len());
    let numeric: [(&str, Vec<f64>); 11] = [
        (FOUL_RATE, col(&|r| r.foul_rate)),
        (MINUTES, col(&|r| r.weight)),
        (BLACK, col(&|r| r.black_player)),
        (FRAC_NONBLACK, col(&|r| r.frac_nonblack_refs)),
        (BLACK_X_FRAC, col(&|r| r.black_player * r.frac_nonblack_refs)),
        (CREW_DISTANCE, col(&|r| r.crew_distance)),
        (CREW_DISTANCE_SQ, col(&|r| r.crew_distance * r.crew_distance)),
        (STARTER, col(&|r| r.starter)),
        (HOME, col(&|r| r.home)),
        (COACH, col(&|r| r.coach)),
        (POST, col(&|r| r.post)),
    ];
    for (name, values) in numeric {
        frame.add_numeric(name, values).expect("lengths match");
    }
    let player_years: Vec<String> = rows.iter().map(FeatureRow::player_year_key).collect();
    frame.add_key(PLAYER_YEAR, &player_years).expect("lengths match");
    let games: Vec<&str> = rows.iter().map(|r| r.game_id.as_str()).collect();
    frame.add_key(GAME, &games).expect("lengths match");
    let players: Vec<&str> = rows.iter().map(|r| r.player_id.as_str()).collect();
    frame.add_key(PLAYER, &players).expect("lengths match");
    frame
}

/// Writes the feature rows as CSV for auditing.
pub fn write_features_csv<W: Write>(rows: &[FeatureRow], out: W) -> FeatureResult<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::panel::fixtures::small_panel;
    use crate::panel::PanelLimits;
    use proptest::prelude::*;

    #[test]
    fn foul_rate_examples() {
        assert_eq!(foul_rate(2, 20.0).unwrap(), 4.0);
        assert_eq!(foul_rate(0, 35.0).unwrap(), 0.0);
        assert_eq!(foul_rate(3, 30.0).unwrap(), 4.0);
        assert!(foul_rate(1, 0.0).is_err());
        assert!(foul_rate(1, -2.0).is_err());
    }

    #[test]
    fn crew_distance_examples() {
        assert_eq!(crew_distance(50.0, [50.0, 50.0, 50.0]), 0.0);
        assert_eq!(crew_distance(40.0, [50.0, 60.0, 70.0]), 20.0);
    }

    #[test]
    fn frac_nonblack_examples() {
        let (persons, games, rows) = small_panel();
        let panel = Panel::new(persons, games, rows, &PanelLimits::default()).unwrap();
        let crew = |a: &str, b: &str, c: &str| RefereeCrew::new([a.into(), b.into(), c.into()]).unwrap();
        // r1, r3 are Black; r0, r2 non-Black
        assert!(frac_nonblack(&panel, &crew("r1", "r3", "r1x"), RaceSource::FairFace).is_err());
        assert_eq!(frac_nonblack(&panel, &crew("r0", "r1", "r3"), RaceSource::FairFace).unwrap(), 1.0 / 3.0);
        assert_eq!(frac_nonblack(&panel, &crew("r0", "r2", "r1"), RaceSource::Human).unwrap(), 2.0 / 3.0);
    }

    #[test]
    fn missing_label_names_referee() {
        let (mut persons, games, rows) = small_panel();
        persons.iter_mut().find(|p| p.person_id == "r2").unwrap().race_fairface = None;
        let panel = Panel::new(persons, games, rows, &PanelLimits::default()).unwrap();
        let err = frac_nonblack(&panel, &panel.games()[0].crew, RaceSource::FairFace).unwrap_err();
        assert!(err.to_string().contains("r2"));
    }

    #[test]
    fn period_filter_and_post_flags() {
        let (persons, mut games, mut rows) = small_panel();
        games[1].season = 2007;
        for r in rows.iter_mut().filter(|r| r.game_id == "g2") {
            r.season = 2007;
        }
        let panel = Panel::new(persons, games, rows, &PanelLimits::default()).unwrap();
        let only_2005 = build_features(&panel, ModelKind::Race, RaceSource::FairFace, SeasonRange::single(2005), None).unwrap();
        assert_eq!(only_2005.len(), 10);
        assert!(only_2005.iter().all(|r| r.post == 0.0));

        let pooled = build_features(
            &panel,
            ModelKind::Tone,
            RaceSource::FairFace,
            SeasonRange::new(2004, 2010).unwrap(),
            Some(SeasonRange::new(2007, 2010).unwrap()),
        )
        .unwrap();
        for r in &pooled {
            assert_eq!(r.post == 1.0, (2007..=2010).contains(&r.season));
        }
        let err = build_features(&panel, ModelKind::Race, RaceSource::FairFace, SeasonRange::single(1999), None);
        assert!(matches!(err, Err(FeatureError::NoRowsInPeriod(_))));
    }

    #[test]
    fn season_range_parsing() {
        assert_eq!("2004-2006".parse::<SeasonRange>().unwrap(), SeasonRange::new(2004, 2006).unwrap());
        assert_eq!("2009".parse::<SeasonRange>().unwrap(), SeasonRange::single(2009));
        assert!("2006-2004".parse::<SeasonRange>().is_err());
        assert!("x".parse::<SeasonRange>().is_err());
    }

    proptest! {
        #[test]
        fn foul_rate_scale_invariant(fouls in 0u32..7, minutes in 1u32..48, c in 1u32..6) {
            let base = foul_rate(fouls, minutes as f64).unwrap();
            let scaled = foul_rate(fouls * c, (minutes * c) as f64).unwrap();
            prop_assert!((base - scaled).abs() <= 1e-12 * base.max(1.0));
        }

        #[test]
        fn crew_distance_symmetric_and_zero_iff_equal(p in 0.0f64..100.0, a in 0.0f64..100.0, b in 0.0f64..100.0, c in 0.0f64..100.0) {
            let d = crew_distance(p, [a, b, c]);
            for perm in [[a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
                prop_assert_eq!(d, crew_distance(p, perm));
            }
            prop_assert!(d >= 0.0);
            prop_assert_eq!(d == 0.0, a == p && b == p && c == p);
            prop_assert_eq!(crew_distance(p, [p, p, p]), 0.0);
        }
    }
}
