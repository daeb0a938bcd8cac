use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{weighted_mean_sd, StatsError, StatsResult};
use crate::features::{build_features, ModelKind, RaceSource, SeasonRange};
use crate::felm::{cgm_twoway_vcov, stars, wls_fit, KeyColumn, Term, VcovOptions};
use crate::panel::Panel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub variable: String,
    pub black_mean: f64,
    pub black_sd: f64,
    pub non_black_mean: f64,
    pub non_black_sd: f64,
    /// Black minus non-Black weighted mean.
    pub difference: f64,
    pub std_error: f64,
    pub p_value: f64,
    pub stars: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryTable {
    pub race_source: RaceSource,
    pub period: SeasonRange,
    pub black_player_games: usize,
    pub non_black_player_games: usize,
    pub rows: Vec<SummaryRow>,
}

/// Minutes-weighted means and SDs by player race for the player-game
/// variables, with differences tested by weighted regression on a Black
/// indicator and player-clustered standard errors.
pub fn summary_table(panel: &Panel, source: RaceSource, period: SeasonRange) -> StatsResult<SummaryTable> {
    let feats = build_features(panel, ModelKind::Race, source, period, None)?;
    let n = feats.len();
    let w: Vec<f64> = feats.iter().map(|f| f.weight).collect();
    let black: Vec<f64> = feats.iter().map(|f| f.black_player).collect();
    let n_black = black.iter().filter(|b| **b == 1.0).count();
    if n_black == 0 || n_black == n {
        return Err(StatsError::Empty(if n_black == 0 { "no Black players".into() } else { "no non-Black players".into() }));
    }
    let players: Vec<&str> = feats.iter().map(|f| f.player_id.as_str()).collect();
    let cluster = KeyColumn::from_labels(&players);
    let nonblack_refs: Vec<f64> = feats.iter().map(|f| (f.frac_nonblack_refs * 3.0).round()).collect();

    let mut variables: Vec<(String, Vec<f64>)> = vec![
        ("Fouls per 40 minutes".into(), feats.iter().map(|f| f.foul_rate).collect()),
        ("Minutes played".into(), w.clone()),
        ("Starter".into(), feats.iter().map(|f| f.starter).collect()),
        ("Home".into(), feats.iter().map(|f| f.home).collect()),
        ("Black coach".into(), feats.iter().map(|f| f.coach).collect()),
    ];
    for k in 0..4 {
        variables.push((
            format!("{k} non-Black referees"),
            nonblack_refs.iter().map(|c| (*c == k as f64) as u8 as f64).collect(),
        ));
    }
    variables.push(("# non-Black referees".into(), nonblack_refs.clone()));

    let ones = vec![1.0; n];
    let mut rows = Vec::with_capacity(variables.len());
    for (name, values) in variables {
        let split = |want: f64| -> (Vec<f64>, Vec<f64>) {
            values
                .iter()
                .zip(&w)
                .zip(&black)
                .filter(|(_, b)| **b == want)
                .map(|((v, w), _)| (*v, *w))
                .unzip()
        };
        let (bv, bw) = split(1.0);
        let (nv, nw) = split(0.0);
        let (bm, bsd) = weighted_mean_sd(&bv, &bw);
        let (nm, nsd) = weighted_mean_sd(&nv, &nw);
        let fit = wls_fit(&[ones.clone(), black.clone()], &values, &w)?;
        let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let (difference, variance) = if fit.kept == [0, 1] && fit.coefficients[1].abs() > 1e-12 * scale {
            let cols: Vec<&[f64]> = vec![&ones, &black];
            let v = cgm_twoway_vcov(&cols, &fit.residuals, &w, &fit.bread, &[("player", &cluster)], VcovOptions::default())?;
            (fit.coefficients[1], v.matrix[(1, 1)])
        } else if (bm - nm).abs() > 1e-12 * scale {
            (bm - nm, 0.0)
        } else {
            // Identical group means up to rounding: report an exact zero.
            (0.0, 0.0)
        };
        let term = Term::new(name.clone(), difference, variance);
        let p = if term.std_error > 0.0 { term.p_value } else if difference == 0.0 { 1.0 } else { 0.0 };
        rows.push(SummaryRow {
            variable: name,
            black_mean: bm,
            black_sd: bsd,
            non_black_mean: nm,
            non_black_sd: nsd,
            difference,
            std_error: term.std_error,
            p_value: p,
            stars: stars(p).to_string(),
        });
    }
    Ok(SummaryTable {
        race_source: source,
        period,
        black_player_games: n_black,
        non_black_player_games: n - n_black,
        rows,
    })
}

impl SummaryTable {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<24}{:>16}{:>20}{:>14}",
            "", "Black players", "Non-Black players", "Difference"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<24}{:>16.2}{:>20.2}{:>14}",
                r.variable,
                r.black_mean,
                r.non_black_mean,
                format!("{:.2}{}", r.difference, r.stars)
            );
            let _ = writeln!(
                out,
                "{:<24}{:>16}{:>20}",
                "",
                format!("({:.2})", r.black_sd),
                format!("({:.2})", r.non_black_sd)
            );
        }
        let _ = writeln!(
            out,
            "Player-games: {} Black, {} non-Black; weighted by minutes; *** p<0.01, ** p<0.05, * p<0.1",
            self.black_player_games, self.non_black_player_games
        );
        out
    }
}
