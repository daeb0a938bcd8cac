use std::fmt::Write;

use super::FitResult;
use crate::features::columns;

/// One column of a regression table.
#[derive(Debug, Clone)]
pub struct TableColumn<'a> {
    pub title: String,
    pub subtitle: String,
    pub fit: &'a FitResult,
}

/// Human-readable label for a regressor column.
pub fn term_label(name: &str) -> String {
    if let Some(inner) = name.strip_prefix("post_x_") {
        return match inner {
            columns::CREW_DISTANCE => "Change in coefficient, after awareness".to_string(),
            other => format!("Post {}", term_label(other)),
        };
    }
    match name {
        columns::BLACK_X_FRAC => "Black × fraction non-Black referees",
        columns::BLACK => "Black",
        columns::FRAC_NONBLACK => "Fraction non-Black referees",
        columns::CREW_DISTANCE => "Crew distance",
        columns::CREW_DISTANCE_SQ => "Crew distance²",
        columns::STARTER => "Starter",
        columns::HOME => "Home",
        columns::COACH => "Coach",
        columns::POST => "Post",
        other => other,
    }
    .to_string()
}

pub fn stars(p: f64) -> &'static str {
    if p < 0.01 {
        "***"
    } else if p < 0.05 {
        "**"
    } else if p < 0.1 {
        "*"
    } else {
        ""
    }
}

fn thousands(n: usize) -> String {
    let digits = n.to_string();
    let mut out = String::new();
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(c);
    }
    out
}

/// Aligned plain-text regression table: one row pair (estimate with stars,
/// clustered standard error in parentheses) per displayed term, then N and
/// the weighted sample mean. Cells are blank where a column lacks the term.
pub fn render_table(columns: &[TableColumn<'_>], terms: &[&str]) -> String {
    let mut rows: Vec<Vec<String>> = Vec::new();
    rows.push(std::iter::once(String::new()).chain(columns.iter().map(|c| c.title.clone())).collect());
    rows.push(std::iter::once(String::new()).chain(columns.iter().map(|c| c.subtitle.clone())).collect());
    let rule_after_header = rows.len();
    for name in terms {
        let mut est = vec![term_label(name)];
        let mut se = vec![String::new()];
        for c in columns {
            match c.fit.term(name) {
                Some(t) => {
                    est.push(format!("{:.3}{}", t.estimate, stars(t.p_value)));
                    se.push(format!("({:.3})", t.std_error));
                }
                None => {
                    est.push(String::new());
                    se.push(String::new());
                }
            }
        }
        rows.push(est);
        rows.push(se);
    }
    let rule_before_footer = rows.len();
    rows.push(std::iter::once("N".to_string()).chain(columns.iter().map(|c| thousands(c.fit.n_obs))).collect());
    rows.push(
        std::iter::once("Sample mean".to_string())
            .chain(columns.iter().map(|c| format!("{:.2}", c.fit.sample_mean)))
            .collect(),
    );

    let ncol = columns.len() + 1;
    let widths: Vec<usize> = (0..ncol)
        .map(|j| rows.iter().map(|r| r[j].chars().count()).max().unwrap_or(0))
        .collect();
    let total: usize = widths.iter().sum::<usize>() + 2 * (ncol - 1);
    let rule = "-".repeat(total);
    let mut out = String::new();
    let _ = writeln!(out, "{}", "=".repeat(total));
    for (i, row) in rows.iter().enumerate() {
        if i == rule_after_header || i == rule_before_footer {
            let _ = writeln!(out, "{rule}");
        }
        let mut line = String::new();
        for (j, cell) in row.iter().enumerate() {
            let pad = widths[j] - cell.chars().count();
            if j == 0 {
                line.push_str(cell);
                line.push_str(&" ".repeat(pad));
            } else {
                line.push_str("  ");
                line.push_str(&" ".repeat(pad));
                line.push_str(cell);
            }
        }
        let _ = writeln!(out, "{}", line.trim_end());
    }
    let _ = writeln!(out, "{}", "=".repeat(total));
    out.push_str("Standard errors clustered by ");
    out.push_str(&columns.first().map(|c| c.fit.spec.clusters.join(" and ")).unwrap_or_default());
    out.push_str(" in parentheses; observations weighted by minutes.\n");
    out.push_str("*** p<0.01, ** p<0.05, * p<0.1\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_and_stars() {
        assert_eq!(term_label("black_x_frac_nonblack"), "Black × fraction non-Black referees");
        assert_eq!(term_label("post_x_black_x_frac_nonblack"), "Post Black × fraction non-Black referees");
        assert_eq!(term_label("crew_distance"), "Crew distance");
        assert_eq!(stars(0.005), "***");
        assert_eq!(stars(0.04), "**");
        assert_eq!(stars(0.07), "*");
        assert_eq!(stars(0.2), "");
        assert_eq!(thousands(45878), "45,878");
        assert_eq!(thousands(999), "999");
    }
}
