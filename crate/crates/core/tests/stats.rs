mod common;

use foulplay::panel::{Panel, PanelLimits};
use foulplay::sim::{generate, SimConfig};
use foulplay::stats::{
    balance_table, balance_test, chi_square_independence, cohens_kappa, kappa_from_confusion, ks_uniform_distance,
    lowess, regularized_gamma_p, regularized_gamma_q, summary_table, AgreementPair, BalanceMode, ContingencyTable,
    LowessOptions, StatsError,
};
use foulplay::{RaceSource, SeasonRange};
use proptest::prelude::*;
use statrs::function::gamma::{gamma_lr, gamma_ur};

include!("fixtures/lowess_sine.rs");

#[test]
fn chi_square_two_by_two() {
    let t = ContingencyTable::from_counts(vec![vec![10, 20], vec![20, 10]]).unwrap();
    let r = chi_square_independence(&t).unwrap();
    assert!((r.statistic - 20.0 / 3.0).abs() < 1e-6);
    assert_eq!(r.df, 1);
    assert!((r.p_value - 0.009823274507519235).abs() < 1e-6);
}

// Worked 2×3 example from the SciPy `chi2_contingency` documentation.
#[test]
fn chi_square_published_example() {
    let t = ContingencyTable::from_counts(vec![vec![10, 10, 20], vec![20, 20, 20]]).unwrap();
    let r = chi_square_independence(&t).unwrap();
    assert!((r.statistic - 2.7777777777777777).abs() < 1e-6);
    assert_eq!(r.df, 2);
    assert!((r.p_value - 0.24935220877729622).abs() < 1e-6);
}

#[test]
fn kappa_fixtures() {
    assert!((kappa_from_confusion(&[vec![40.0, 5.0], vec![5.0, 50.0]]).unwrap() - 79.0 / 99.0).abs() < 1e-12);
    // 3×3 by hand: p_o = 0.7, p_e = (0.3·0.3 + 0.4·0.3 + 0.3·0.4) = 0.33.
    let m = [vec![20.0, 5.0, 5.0], vec![5.0, 30.0, 5.0], vec![5.0, 5.0, 20.0]];
    let total = 100.0;
    let p_o = 70.0 / total;
    let p_e = (30.0 * 30.0 + 40.0 * 40.0 + 30.0 * 30.0) / (total * total);
    assert!((kappa_from_confusion(&m).unwrap() - (p_o - p_e) / (1.0 - p_e)).abs() < 1e-12);
}

#[test]
fn lowess_matches_reference_on_noisy_sine() {
    let fit = lowess(&XS, &YS, LowessOptions::default()).unwrap();
    for ((x, f), (xr, want)) in fit.iter().zip(XS.iter().zip(FIT_DEFAULT)) {
        assert_eq!(x, xr);
        assert!((f - want).abs() < 1e-6, "x={x}: {f} vs {want}");
    }
    let narrow = lowess(&XS, &YS, LowessOptions { fraction: 0.3, iterations: 3 }).unwrap();
    for ((_, f), want) in narrow.iter().zip(FIT_NARROW) {
        assert!((f - want).abs() < 1e-6);
    }
}

#[test]
fn ks_distance_of_exact_grid() {
    let p: Vec<f64> = (1..=50).map(|i| i as f64 / 50.0).collect();
    assert!((ks_uniform_distance(&p) - 0.02).abs() < 1e-12);
}

fn panel(cfg: &SimConfig) -> Panel {
    generate(cfg).unwrap()
}

#[test]
fn balance_table_layout() {
    let cfg = SimConfig { seasons: 2, games_per_team: 12, seed: 4, ..SimConfig::default() };
    let p = panel(&cfg);
    for mode in [BalanceMode::Race(RaceSource::FairFace), BalanceMode::Tone] {
        let t = balance_table(&p, cfg.period(), mode).unwrap();
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.column_labels.len(), 4);
        for r in &t.rows {
            assert_eq!(r.cells.len(), 4);
            assert!(r.test.is_some());
        }
        assert_eq!(t.column_totals.iter().sum::<usize>(), t.n_units);
        // Two teams per game.
        assert_eq!(t.n_units, 2 * p.games().len());
        let text = t.render();
        assert!(text.contains("chi2 p-value"));
        let single = balance_test(&p, 2004, mode).unwrap();
        assert!(single.test.unwrap().p_value > 0.0);
    }
}

#[test]
fn single_crew_type_season_is_degenerate() {
    let cfg = SimConfig {
        seasons: 1,
        games_per_team: 6,
        referee_pool: 3,
        seed: 1,
        ..SimConfig::default()
    };
    let p = panel(&cfg);
    let err = balance_test(&p, 2004, BalanceMode::Race(RaceSource::FairFace)).unwrap_err();
    assert!(matches!(err, StatsError::ZeroMarginal(_)), "{err}");
    assert!(balance_test(&p, 1999, BalanceMode::Tone).is_err());
}

#[test]
fn summary_table_weighted_means() {
    let cfg = SimConfig { seasons: 1, games_per_team: 8, seed: 2, ..SimConfig::default() };
    let p = panel(&cfg);
    let t = summary_table(&p, RaceSource::FairFace, SeasonRange::single(2004)).unwrap();
    let fouls = &t.rows[0];
    let (mut num, mut den) = (0.0, 0.0);
    for r in p.rows() {
        let black = p.person(&r.player_id).unwrap().race_fairface == Some(foulplay::panel::Race::Black);
        if black {
            num += r.minutes * 40.0 * r.fouls as f64 / r.minutes;
            den += r.minutes;
        }
    }
    assert!((fouls.black_mean - num / den).abs() < 1e-12);
    assert!((fouls.difference - (fouls.black_mean - fouls.non_black_mean)).abs() < 1e-10);
    assert!(t.render().contains("Fouls per 40 minutes"));
}

#[test]
fn summary_table_identical_groups_and_equal_weights() {
    let cfg = SimConfig { seasons: 1, games_per_team: 4, seed: 3, ..SimConfig::default() };
    let base = panel(&cfg);
    // Mirror every player as a non-Black twin with identical rows.
    let mut persons = base.persons().to_vec();
    let mut rows = base.rows().to_vec();
    for pl in base.persons().iter().filter(|p| p.role == foulplay::panel::Role::Player) {
        let mut twin = pl.clone();
        twin.person_id = format!("{}x", pl.person_id);
        let black = foulplay::panel::Race::Black;
        let non = foulplay::panel::Race::NonBlack;
        let mut orig = pl.clone();
        orig.race_fairface = Some(black);
        twin.race_fairface = Some(non);
        *persons.iter_mut().find(|p| p.person_id == pl.person_id).unwrap() = orig;
        persons.push(twin);
        for r in base.rows().iter().filter(|r| r.player_id == pl.person_id) {
            let mut r2 = r.clone();
            r2.player_id = format!("{}x", pl.person_id);
            rows.push(r2);
        }
    }
    for r in rows.iter_mut() {
        r.minutes = 20.0;
    }
    let p = Panel::new(persons, base.games().to_vec(), rows, &PanelLimits::default()).unwrap();
    let t = summary_table(&p, RaceSource::FairFace, SeasonRange::single(2004)).unwrap();
    for row in &t.rows {
        assert!(row.difference.abs() < 1e-12, "{}", row.variable);
        assert_eq!(row.stars, "");
    }
    let fouls = &t.rows[0];
    let rates: Vec<f64> = p
        .rows()
        .iter()
        .filter(|r| !r.player_id.ends_with('x'))
        .map(|r| 40.0 * r.fouls as f64 / r.minutes)
        .collect();
    let unweighted = rates.iter().sum::<f64>() / rates.len() as f64;
    assert!((fouls.black_mean - unweighted).abs() < 1e-12);
}

proptest! {
    #[test]
    fn gamma_agrees_with_statrs(a in 0.05f64..200.0, x in 0.0f64..400.0) {
        let q = regularized_gamma_q(a, x).unwrap();
        let p = regularized_gamma_p(a, x).unwrap();
        prop_assert!((q - gamma_ur(a, x)).abs() < 1e-9);
        prop_assert!((p - gamma_lr(a, x)).abs() < 1e-9);
    }

    #[test]
    fn chi_square_swap_invariance(cells in proptest::collection::vec(1u64..60, 6), swap_rows in any::<bool>()) {
        let t = vec![cells[0..3].to_vec(), cells[3..6].to_vec()];
        let a = chi_square_independence(&ContingencyTable::from_counts(t.clone()).unwrap()).unwrap();
        let swapped = if swap_rows {
            vec![t[1].clone(), t[0].clone()]
        } else {
            t.iter().map(|r| vec![r[2], r[0], r[1]]).collect()
        };
        let b = chi_square_independence(&ContingencyTable::from_counts(swapped).unwrap()).unwrap();
        prop_assert!((a.statistic - b.statistic).abs() < 1e-9 * a.statistic.max(1.0));
    }

    #[test]
    fn kappa_bounds(a in proptest::collection::vec(0u8..3, 2..60), flip in proptest::collection::vec(any::<bool>(), 60)) {
        let ra: Vec<String> = a.iter().map(|v| v.to_string()).collect();
        let rb: Vec<String> = a.iter().zip(&flip).map(|(v, f)| if *f { ((v + 1) % 3).to_string() } else { v.to_string() }).collect();
        if let Ok(k) = cohens_kappa(&AgreementPair::new(ra.clone(), rb).unwrap()) {
            prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&k));
        }
        if ra.iter().any(|v| v != &ra[0]) {
            prop_assert!((cohens_kappa(&AgreementPair::new(ra.clone(), ra).unwrap()).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn lowess_permutation_invariant(seed in 0u64..1000) {
        let mut idx: Vec<usize> = (0..XS.len()).collect();
        let mut s = seed;
        for i in (1..idx.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            idx.swap(i, (s >> 33) as usize % (i + 1));
        }
        let xs: Vec<f64> = idx.iter().map(|&i| XS[i]).collect();
        let ys: Vec<f64> = idx.iter().map(|&i| YS[i]).collect();
        prop_assert_eq!(lowess(&xs, &ys, LowessOptions::default()).unwrap(), lowess(&XS, &YS, LowessOptions::default()).unwrap());
    }
}
