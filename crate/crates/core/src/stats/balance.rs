use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{chi_square_independence, ChiSquare, ContingencyTable, StatsError, StatsResult};
use crate::features::{frac_nonblack, FeatureError, RaceSource, SeasonRange};
use crate::panel::{Panel, Race};

/// How team × game units are classified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode", content = "source")]
pub enum BalanceMode {
    /// Number of Black starters against number of non-Black referees.
    Race(RaceSource),
    /// Starter mean-L* quartile against crew mean-L* quartile.
    Tone,
}

// One team in one game.
#[derive(Debug, Clone)]
struct Unit {
    season: i32,
    row_value: f64,
    crew_value: f64,
}

fn units(panel: &Panel, period: SeasonRange, mode: BalanceMode) -> StatsResult<Vec<Unit>> {
    let mut starters: BTreeMap<(&str, &str), Vec<&str>> = BTreeMap::new();
    for row in panel.rows().iter().filter(|r| r.starter && period.contains(r.season)) {
        starters
            .entry((row.game_id.as_str(), row.team_id.as_str()))
            .or_default()
            .push(row.player_id.as_str());
    }
    let mut out = Vec::with_capacity(starters.len());
    for ((game_id, _), ids) in starters {
        let game = panel
            .game(game_id)
            .ok_or_else(|| FeatureError::UnknownPerson(game_id.to_string()))?;
        let person = |id: &str| panel.person(id).ok_or_else(|| FeatureError::UnknownPerson(id.to_string()));
        let missing = |id: &str, what: &'static str| FeatureError::MissingLabel {
            person: id.to_string(),
            what,
        };
        let (row_value, crew_value) = match mode {
            BalanceMode::Race(source) => {
                let mut black = 0;
                for id in &ids {
                    match person(id)?.race(source) {
                        Some(Race::Black) => black += 1,
                        Some(Race::NonBlack) => {}
                        None => return Err(missing(id, "race label").into()),
                    }
                }
                (black as f64, (frac_nonblack(panel, &game.crew, source)? * 3.0).round())
            }
            BalanceMode::Tone => {
                let mut sum = 0.0;
                for id in &ids {
                    sum += person(id)?.l_star.ok_or_else(|| missing(id, "L* value"))?;
                }
                let mut crew = 0.0;
                for id in game.crew.ids() {
                    crew += person(id)?.l_star.ok_or_else(|| missing(id, "L* value"))?;
                }
                (sum / ids.len() as f64, crew / 3.0)
            }
        };
        out.push(Unit {
            season: game.season,
            row_value,
            crew_value,
        });
    }
    Ok(out)
}

/// Quartile bin (0..=3) per value: `floor(4 r / n)` with `r` the 0-based rank
/// of the first equal value, so ties share the lower bin.
pub fn quartile_bins(values: &[f64]) -> Vec<usize> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut bins = vec![0; n];
    let mut first_rank = 0;
    for (r, &i) in order.iter().enumerate() {
        if r > 0 && values[order[r - 1]] != values[i] {
            first_rank = r;
        }
        bins[i] = 4 * first_rank / n;
    }
    bins
}

// Replaces the raw row/crew values of tone-mode units by 1-based quartiles.
fn to_quartiles(units: &mut [Unit]) {
    let rows: Vec<f64> = units.iter().map(|u| u.row_value).collect();
    let crews: Vec<f64> = units.iter().map(|u| u.crew_value).collect();
    for ((u, r), c) in units.iter_mut().zip(quartile_bins(&rows)).zip(quartile_bins(&crews)) {
        u.row_value = (r + 1) as f64;
        u.crew_value = (c + 1) as f64;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BalanceRow {
    pub season: i32,
    /// Mean row value (Black starters, or starter quartile) per crew column.
    pub cells: Vec<Option<f64>>,
    pub counts: Vec<usize>,
    pub test: Option<ChiSquare>,
    /// Why the test could not be run, when it could not.
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BalanceTable {
    pub mode: BalanceMode,
    pub period: SeasonRange,
    pub column_labels: Vec<String>,
    pub rows: Vec<BalanceRow>,
    pub column_totals: Vec<usize>,
    pub n_units: usize,
}

fn column_labels(mode: BalanceMode) -> Vec<String> {
    match mode {
        BalanceMode::Race(_) => (0..4).map(|i| format!("{i} non-Black refs")).collect(),
        BalanceMode::Tone => (1..=4).map(|i| format!("Q{i} crew tint")).collect(),
    }
}

fn column_of(mode: BalanceMode, u: &Unit) -> usize {
    match mode {
        BalanceMode::Race(_) => u.crew_value as usize,
        BalanceMode::Tone => u.crew_value as usize - 1,
    }
}

fn season_row(season: i32, units: &[&Unit], mode: BalanceMode) -> StatsResult<BalanceRow> {
    if units.is_empty() {
        return Err(StatsError::Empty(format!("no team-games in season {season}")));
    }
    let n_rows = match mode {
        BalanceMode::Race(_) => units.iter().map(|u| u.row_value as usize).max().unwrap_or(0) + 1,
        BalanceMode::Tone => 4,
    };
    let row_of = |u: &Unit| match mode {
        BalanceMode::Race(_) => u.row_value as usize,
        BalanceMode::Tone => u.row_value as usize - 1,
    };
    let mut counts = vec![vec![0u64; 4]; n_rows];
    let mut sums = [0.0; 4];
    let mut col_n = vec![0usize; 4];
    for u in units {
        let c = column_of(mode, u);
        counts[row_of(u)][c] += 1;
        sums[c] += u.row_value;
        col_n[c] += 1;
    }
    let row_labels = match mode {
        BalanceMode::Race(_) => (0..n_rows).map(|i| format!("{i} Black starters")).collect(),
        BalanceMode::Tone => (1..=4).map(|i| format!("Q{i} starter tone")).collect(),
    };
    let table = ContingencyTable::new(row_labels, column_labels(mode), counts)?.without_empty_margins();
    let test = chi_square_independence(&table)?;
    Ok(BalanceRow {
        season,
        cells: (0..4).map(|c| (col_n[c] > 0).then(|| sums[c] / col_n[c] as f64)).collect(),
        counts: col_n,
        test: Some(test),
        note: None,
    })
}

/// Chi-square balance test for one season. Quartiles (tone mode) are taken
/// within the season; a season whose table collapses below 2×2 after dropping
/// empty rows and columns is rejected as degenerate.
pub fn balance_test(panel: &Panel, season: i32, mode: BalanceMode) -> StatsResult<BalanceRow> {
    let mut us = units(panel, SeasonRange::single(season), mode)?;
    if mode == BalanceMode::Tone {
        to_quartiles(&mut us);
    }
    let refs: Vec<&Unit> = us.iter().collect();
    season_row(season, &refs, mode).map_err(|e| match e {
        StatsError::Shape { .. } => StatsError::ZeroMarginal(format!("season {season} ({e})")),
        other => other,
    })
}

/// Per-season balance table over `period`. Tone quartiles are taken over all
/// team-games of the period; seasons whose test cannot be run keep their
/// cells and carry a note instead of a p-value.
pub fn balance_table(panel: &Panel, period: SeasonRange, mode: BalanceMode) -> StatsResult<BalanceTable> {
    let mut us = units(panel, period, mode)?;
    if us.is_empty() {
        return Err(StatsError::Empty(format!("no team-games in {period}")));
    }
    if mode == BalanceMode::Tone {
        to_quartiles(&mut us);
    }
    let mut by_season: BTreeMap<i32, Vec<&Unit>> = BTreeMap::new();
    for u in &us {
        by_season.entry(u.season).or_default().push(u);
    }
    let mut rows = Vec::new();
    for (season, group) in by_season {
        let row = match season_row(season, &group, mode) {
            Ok(r) => r,
            Err(e) => {
                let mut col_n = vec![0usize; 4];
                let mut sums = [0.0; 4];
                for u in &group {
                    let c = column_of(mode, u);
                    col_n[c] += 1;
                    sums[c] += u.row_value;
                }
                BalanceRow {
                    season,
                    cells: (0..4).map(|c| (col_n[c] > 0).then(|| sums[c] / col_n[c] as f64)).collect(),
                    counts: col_n,
                    test: None,
                    note: Some(e.to_string()),
                }
            }
        };
        rows.push(row);
    }
    let mut column_totals = vec![0usize; 4];
    for u in &us {
        column_totals[column_of(mode, u)] += 1;
    }
    Ok(BalanceTable {
        mode,
        period,
        column_labels: column_labels(mode),
        rows,
        column_totals,
        n_units: us.len(),
    })
}

impl BalanceTable {
    /// Aligned text: one line per season with the four column means and the
    /// chi-square p-value, then column sizes with their share of units.
    pub fn render(&self) -> String {
        let mut lines: Vec<Vec<String>> = Vec::new();
        let mut header = vec!["Season".to_string()];
        header.extend(self.column_labels.iter().cloned());
        header.push("chi2 p-value".into());
        lines.push(header);
        for r in &self.rows {
            let mut l = vec![r.season.to_string()];
            l.extend(r.cells.iter().map(|c| c.map_or("-".into(), |v| format!("{v:.2}"))));
            l.push(match (&r.test, &r.note) {
                (Some(t), _) => format!("{:.3}", t.p_value),
                (None, Some(_)) => "degenerate".into(),
                _ => "-".into(),
            });
            lines.push(l);
        }
        let mut sizes = vec!["Sample size".to_string()];
        sizes.extend(self.column_totals.iter().map(|c| {
            format!("{c} ({:.2}%)", 100.0 * *c as f64 / self.n_units as f64)
        }));
        sizes.push(format!("n = {}", self.n_units));
        lines.push(sizes);
        let widths: Vec<usize> = (0..lines[0].len())
            .map(|j| lines.iter().map(|l| l[j].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for (i, l) in lines.iter().enumerate() {
            let cells: Vec<String> = l
                .iter()
                .enumerate()
                .map(|(j, c)| {
                    if j == 0 {
                        format!("{c:<w$}", w = widths[j])
                    } else {
                        format!("{c:>w$}", w = widths[j])
                    }
                })
                .collect();
            let _ = writeln!(out, "{}", cells.join("  "));
            if i == 0 || i == lines.len() - 2 {
                let _ = writeln!(out, "{}", "-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
            }
        }
        out
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["season".to_string()];
        for i in 0..4 {
            header.push(format!("col{i}_mean"));
            header.push(format!("col{i}_n"));
        }
        header.extend(["statistic", "df", "p_value", "note"].map(String::from));
        w.write_record(&header)?;
        for r in &self.rows {
            let mut rec = vec![r.season.to_string()];
            for i in 0..4 {
                rec.push(r.cells[i].map_or(String::new(), |v| v.to_string()));
                rec.push(r.counts[i].to_string());
            }
            match &r.test {
                Some(t) => rec.extend([t.statistic.to_string(), t.df.to_string(), t.p_value.to_string()]),
                None => rec.extend([String::new(), String::new(), String::new()]),
            }
            rec.push(r.note.clone().unwrap_or_default());
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quartiles_even_for_distinct_values() {
        for n in 4..40 {
            let v: Vec<f64> = (0..n).map(|i| ((i * 101) % n) as f64).collect();
            let bins = quartile_bins(&v);
            for b in 0..4 {
                let c = bins.iter().filter(|&&x| x == b).count();
                assert!(c >= n / 4 && c <= n.div_ceil(4), "n={n} bin={b} count={c}");
            }
        }
    }

    #[test]
    fn ties_go_low() {
        assert_eq!(quartile_bins(&[1.0, 1.0, 1.0, 2.0]), vec![0, 0, 0, 3]);
        assert_eq!(quartile_bins(&[5.0; 8]), vec![0; 8]);
    }
}
