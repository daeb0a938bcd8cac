//! Synthetic panels with planted effects.
//!
//! Every season each team plays `games_per_team` rounds; a round pairs all
//! teams by a uniformly random perfect matching, and each game draws three
//! distinct referees uniformly from the pool, independently of rosters.
//! Fouls follow a Poisson process over the minutes a player is on court with
//! intensity (per 40 minutes)
//!
//! ```text
//! baseline + alpha·black·frac_nonblack + beta·crew_distance
//!          + delta·present_r·|L_r − L_player| + theta_iy + gamma_g + noise
//! ```
//!
//! floored at 0.05. A player whose sixth foul arrives before her planned
//! minutes are up fouls out: her minutes end at that foul. Stopping the
//! process there keeps `E[40·fouls − minutes·intensity] = 0`, so the
//! minutes-weighted regression still targets the planted coefficients.

use std::path::Path;

use chrono::{Duration, NaiveDate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::SeasonRange;
use crate::panel::{
    write_panel, GameRecord, Gender, Panel, PanelError, PanelLimits, Person, PlayerGameRow, Race, RefereeCrew, Role,
};

const FOUL_OUT: u32 = 6;
const RATE_FLOOR: f64 = 0.05;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    Config(String),
    #[error(transparent)]
    Panel(#[from] PanelError),
}

/// Normal distribution of L* for one group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToneDistribution {
    pub mean: f64,
    pub sd: f64,
}

/// L* by race. The defaults put the player-crew distance near a mean of
/// 8.39 with a standard deviation of 4.19.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToneByRace {
    pub black: ToneDistribution,
    pub non_black: ToneDistribution,
}

impl Default for ToneByRace {
    fn default() -> Self {
        Self {
            black: ToneDistribution { mean: 50.0, sd: 5.5 },
            non_black: ToneDistribution { mean: 60.0, sd: 5.0 },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[derive(Default)]
pub struct ToneDistributions {
    pub player: ToneByRace,
    pub referee: ToneByRace,
    pub coach: ToneByRace,
}


/// Share of Black persons per role.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RaceMix {
    pub player: f64,
    pub referee: f64,
    pub coach: f64,
}

impl Default for RaceMix {
    fn default() -> Self {
        Self {
            player: 0.67,
            referee: 0.45,
            coach: 0.3,
        }
    }
}

/// A bias planted on one referee: fouls rise by `delta` per L* unit of her
/// own distance to the player in games she works.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlantedReferee {
    /// Index into the referee pool (`R01` is index 0).
    pub index: usize,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub seasons: usize,
    pub first_season: i32,
    pub teams: usize,
    pub games_per_team: usize,
    pub players_per_team: usize,
    pub starters: usize,
    pub referee_pool: usize,
    /// Fouls per 40 minutes before effects.
    pub baseline: f64,
    pub planted_alpha: f64,
    pub planted_beta: f64,
    pub planted_referee: Option<PlantedReferee>,
    pub fe_sd_player_year: f64,
    pub fe_sd_game: f64,
    pub noise_sd: f64,
    pub race_mix: RaceMix,
    pub l_star: ToneDistributions,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            seasons: 3,
            first_season: 2004,
            teams: 12,
            games_per_team: 34,
            players_per_team: 12,
            starters: 5,
            referee_pool: 30,
            baseline: 4.4,
            planted_alpha: 0.0,
            planted_beta: 0.0,
            planted_referee: None,
            fe_sd_player_year: 1.0,
            fe_sd_game: 0.5,
            noise_sd: 0.5,
            race_mix: RaceMix::default(),
            l_star: ToneDistributions::default(),
            seed: 0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::Config(m));
        for (name, v) in [
            ("seasons", self.seasons),
            ("teams", self.teams),
            ("games_per_team", self.games_per_team),
            ("players_per_team", self.players_per_team),
            ("starters", self.starters),
            ("referee_pool", self.referee_pool),
        ] {
            if v == 0 {
                return bad(format!("{name} must be at least 1"));
            }
        }
        if !self.teams.is_multiple_of(2) {
            return bad(format!("{} teams cannot all be paired in every round", self.teams));
        }
        if self.starters > self.players_per_team {
            return bad(format!("{} starters exceed a roster of {}", self.starters, self.players_per_team));
        }
        if self.referee_pool < 3 {
            return bad(format!("a pool of {} referees cannot staff a crew of 3", self.referee_pool));
        }
        if let Some(p) = self.planted_referee {
            if p.index >= self.referee_pool {
                return bad(format!("planted referee {} outside a pool of {}", p.index, self.referee_pool));
            }
        }
        let sds = [
            self.fe_sd_player_year,
            self.fe_sd_game,
            self.noise_sd,
            self.l_star.player.black.sd,
            self.l_star.player.non_black.sd,
            self.l_star.referee.black.sd,
            self.l_star.referee.non_black.sd,
            self.l_star.coach.black.sd,
            self.l_star.coach.non_black.sd,
        ];
        if sds.iter().any(|s| !(*s >= 0.0 && s.is_finite())) {
            return bad("standard deviations must be finite and non-negative".into());
        }
        let mix = self.race_mix;
        if [mix.player, mix.referee, mix.coach].iter().any(|s| !(0.0..=1.0).contains(s)) {
            return bad("race shares must lie in [0, 1]".into());
        }
        if !(self.baseline.is_finite() && self.planted_alpha.is_finite() && self.planted_beta.is_finite()) {
            return bad("effects must be finite".into());
        }
        Ok(())
    }

    pub fn period(&self) -> SeasonRange {
        SeasonRange {
            first: self.first_season,
            last: self.first_season + self.seasons as i32 - 1,
        }
    }

    /// Rows the generator will emit.
    pub fn expected_rows(&self) -> usize {
        self.seasons * self.teams * self.games_per_team * self.players_per_team
    }
}

fn normal(mean: f64, sd: f64) -> Normal<f64> {
    Normal::new(mean, sd).expect("validated standard deviation")
}

fn draw_person<R: Rng>(rng: &mut R, id: String, role: Role, black_share: f64, tones: &ToneByRace) -> Person {
    let black = rng.random::<f64>() < black_share;
    let dist = if black { tones.black } else { tones.non_black };
    let l = normal(dist.mean, dist.sd).sample(rng).clamp(0.0, 100.0);
    let race = if black { Race::Black } else { Race::NonBlack };
    Person {
        person_id: id,
        role,
        race_fairface: Some(race),
        race_human: Some(race),
        l_star: Some(l),
        gender: (role == Role::Referee).then(|| if rng.random::<f64>() < 0.5 { Gender::Woman } else { Gender::Man }),
    }
}

fn is_black(p: &Person) -> f64 {
    (p.race_fairface == Some(Race::Black)) as u8 as f64
}

/// Fouls and minutes for one player: a Poisson process at `rate` per 40
/// minutes over `planned` minutes, stopped at the sixth foul.
fn draw_fouls<R: Rng>(rng: &mut R, rate: f64, planned: f64) -> (u32, f64) {
    let lambda = planned / 40.0 * rate;
    let n = Poisson::new(lambda).expect("positive intensity").sample(rng) as u32;
    if n < FOUL_OUT {
        return (n, planned);
    }
    let mut times: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    times.sort_by(f64::total_cmp);
    let t = (times[FOUL_OUT as usize - 1] * planned).max(1e-3);
    (FOUL_OUT, t)
}

/// Draws a full panel. Identical configs give identical panels.
pub fn generate(config: &SimConfig) -> Result<Panel, SimError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mix = config.race_mix;
    let tones = config.l_star;

    let referees: Vec<Person> = (0..config.referee_pool)
        .map(|r| draw_person(&mut rng, format!("R{:02}", r + 1), Role::Referee, mix.referee, &tones.referee))
        .collect();
    let coaches: Vec<Person> = (0..config.teams)
        .map(|t| draw_person(&mut rng, format!("C{:02}", t + 1), Role::Coach, mix.coach, &tones.coach))
        .collect();
    let players: Vec<Vec<Person>> = (0..config.teams)
        .map(|t| {
            (0..config.players_per_team)
                .map(|k| draw_person(&mut rng, format!("P{:02}{:02}", t + 1, k + 1), Role::Player, mix.player, &tones.player))
                .collect()
        })
        .collect();
    let team_ids: Vec<String> = (0..config.teams).map(|t| format!("T{:02}", t + 1)).collect();

    let theta_dist = normal(0.0, config.fe_sd_player_year);
    let gamma_dist = normal(0.0, config.fe_sd_game);
    let noise_dist = normal(0.0, config.noise_sd);
    let attendance_dist = normal(7.8, 2.4);
    let planted = config.planted_referee.map(|p| (referees[p.index].l_star.unwrap_or(0.0), p));

    let mut games = Vec::new();
    let mut rows = Vec::with_capacity(config.expected_rows());
    for s in 0..config.seasons {
        let season = config.first_season + s as i32;
        let theta: Vec<Vec<f64>> = players
            .iter()
            .map(|team| team.iter().map(|_| theta_dist.sample(&mut rng)).collect())
            .collect();
        let opening = NaiveDate::from_ymd_opt(season, 5, 20).expect("valid date");
        let mut order: Vec<usize> = (0..config.teams).collect();
        let mut game_no = 0;
        for round in 0..config.games_per_team {
            order.shuffle(&mut rng);
            let date = opening + Duration::days(2 * round as i64);
            for pair in order.chunks(2) {
                game_no += 1;
                let game_id = format!("G{season}-{game_no:04}");
                let (home, away) = if rng.random::<bool>() { (pair[0], pair[1]) } else { (pair[1], pair[0]) };
                let crew_idx = rand::seq::index::sample(&mut rng, config.referee_pool, 3).into_vec();
                let crew: Vec<&Person> = crew_idx.iter().map(|&i| &referees[i]).collect();
                let crew_l: Vec<f64> = crew.iter().map(|r| r.l_star.unwrap_or(0.0)).collect();
                let frac_nonblack = crew.iter().map(|r| 1.0 - is_black(r)).sum::<f64>() / 3.0;
                let planted_present = planted.filter(|(_, p)| crew_idx.contains(&p.index));
                let gamma = gamma_dist.sample(&mut rng);
                let attendance = attendance_dist.sample(&mut rng).max(0.5);
                let home_won = rng.random::<bool>();
                games.push(GameRecord {
                    game_id: game_id.clone(),
                    season,
                    date,
                    crew: RefereeCrew::new([crew[0].person_id.clone(), crew[1].person_id.clone(), crew[2].person_id.clone()])?,
                    attendance: Some(attendance),
                });
                for (team, is_home) in [(home, true), (away, false)] {
                    let mut roster: Vec<usize> = (0..config.players_per_team).collect();
                    roster.shuffle(&mut rng);
                    for (slot, &k) in roster.iter().enumerate() {
                        let player = &players[team][k];
                        let pl = player.l_star.unwrap_or(0.0);
                        let starter = slot < config.starters;
                        let distance = crew_l.iter().map(|r| (pl - r).abs()).sum::<f64>() / 3.0;
                        let mut rate = config.baseline
                            + config.planted_alpha * is_black(player) * frac_nonblack
                            + config.planted_beta * distance
                            + theta[team][k]
                            + gamma
                            + noise_dist.sample(&mut rng);
                        if let Some((l_ref, p)) = planted_present {
                            rate += p.delta * (l_ref - pl).abs();
                        }
                        let planned = if starter {
                            rng.random_range(24.0..38.0)
                        } else {
                            rng.random_range(4.0..24.0)
                        };
                        let (fouls, minutes) = draw_fouls(&mut rng, rate.max(RATE_FLOOR), planned);
                        rows.push(PlayerGameRow {
                            player_id: player.person_id.clone(),
                            game_id: game_id.clone(),
                            team_id: team_ids[team].clone(),
                            season,
                            minutes,
                            fouls,
                            starter,
                            home: is_home,
                            coach_id: coaches[team].person_id.clone(),
                            team_won: Some(home_won == is_home),
                        });
                    }
                }
            }
        }
    }
    let persons = referees
        .into_iter()
        .chain(coaches)
        .chain(players.into_iter().flatten())
        .collect();
    Ok(Panel::new(persons, games, rows, &PanelLimits::default())?)
}

/// Generates a panel and writes the three panel CSVs into `dir`.
pub fn generate_to_dir(config: &SimConfig, dir: &Path) -> Result<Panel, SimError> {
    let panel = generate(config)?;
    write_panel(&panel, dir)?;
    Ok(panel)
}

/// Fouls per 40 minutes implied by a one-standard-deviation move in a
/// regressor with coefficient `beta`.
pub fn effect_size(beta: f64, distance_sd: f64) -> f64 {
    beta.abs() * distance_sd
}

/// Independent seed for replication `index` derived from `base`
/// (SplitMix64 finalizer over the pair).
pub fn replication_seed(base: u64, index: u64) -> u64 {
    let mut z = base
        .wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SimConfig {
        SimConfig {
            seasons: 1,
            teams: 4,
            games_per_team: 6,
            players_per_team: 8,
            referee_pool: 9,
            seed: 11,
            ..SimConfig::default()
        }
    }

    #[test]
    fn shape_and_bounds() {
        let cfg = small();
        let panel = generate(&cfg).unwrap();
        assert_eq!(panel.rows().len(), cfg.expected_rows());
        assert_eq!(panel.games().len(), cfg.teams / 2 * cfg.games_per_team);
        for r in panel.rows() {
            assert!(r.minutes > 0.0 && r.minutes <= 48.0);
            assert!(r.fouls <= 6);
        }
    }

    #[test]
    fn default_size() {
        assert_eq!(SimConfig::default().expected_rows(), 14_688);
    }

    #[test]
    fn same_seed_same_panel() {
        let a = generate(&small()).unwrap();
        let b = generate(&small()).unwrap();
        assert_eq!(a.rows(), b.rows());
        assert_eq!(a.games(), b.games());
        assert_eq!(a.persons(), b.persons());
    }

    #[test]
    fn infeasible_configs() {
        assert!(generate(&SimConfig { teams: 5, ..small() }).is_err());
        assert!(generate(&SimConfig { starters: 9, ..small() }).is_err());
        assert!(generate(&SimConfig { referee_pool: 2, ..small() }).is_err());
        assert!(generate(&SimConfig { seasons: 0, ..small() }).is_err());
        assert!(generate(&SimConfig { noise_sd: -1.0, ..small() }).is_err());
    }

    #[test]
    fn effect_sizes() {
        assert!((effect_size(-0.020, 4.27) - 0.0854).abs() < 1e-12);
        assert_eq!(effect_size(0.0, 3.0), 0.0);
        assert!((effect_size(-0.5, 2.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn replication_seeds_differ() {
        let seeds: std::collections::BTreeSet<u64> = (0..1000).map(|i| replication_seed(7, i)).collect();
        assert_eq!(seeds.len(), 1000);
    }
}
