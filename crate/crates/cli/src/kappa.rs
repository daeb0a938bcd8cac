use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::Args;
use foulplay::stats::{cohens_kappa, kappa_from_confusion, AgreementPair};
use serde::Serialize;

use crate::output::OutputDir;
use crate::UsageError;

#[derive(Debug, Args, Serialize)]
pub struct KappaArgs {
    /// First rater's labels, one per line.
    #[arg(long, value_name = "FILE", requires = "rater_b", conflicts_with = "confusion")]
    pub rater_a: Option<PathBuf>,
    /// Second rater's labels, one per line, in the same order.
    #[arg(long, value_name = "FILE", requires = "rater_a")]
    pub rater_b: Option<PathBuf>,
    /// Square confusion matrix as headerless CSV (rows: rater A, columns: rater B).
    #[arg(long, value_name = "CSV")]
    pub confusion: Option<PathBuf>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Debug, Serialize)]
struct KappaReport {
    kappa: f64,
    n: f64,
    categories: Option<Vec<String>>,
    confusion: Vec<Vec<f64>>,
}

fn read_labels(path: &Path) -> anyhow::Result<Vec<String>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from).collect())
}

fn read_matrix(path: &Path) -> anyhow::Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = record
            .iter()
            .map(|c| c.parse::<f64>().with_context(|| format!("{}:{}: `{c}` is not a number", path.display(), i + 1)))
            .collect::<anyhow::Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

pub fn run(args: KappaArgs) -> anyhow::Result<()> {
    let (report, inputs) = match (&args.rater_a, &args.rater_b, &args.confusion) {
        (Some(a), Some(b), None) => {
            let pair = AgreementPair::new(read_labels(a)?, read_labels(b)?)?;
            let confusion = pair.confusion();
            let report = KappaReport {
                kappa: cohens_kappa(&pair)?,
                n: confusion.iter().flatten().sum(),
                categories: Some(pair.categories()),
                confusion,
            };
            (report, vec![a.clone(), b.clone()])
        }
        (None, None, Some(c)) => {
            let confusion = read_matrix(c)?;
            let report = KappaReport {
                kappa: kappa_from_confusion(&confusion)?,
                n: confusion.iter().flatten().sum(),
                categories: None,
                confusion,
            };
            (report, vec![c.clone()])
        }
        _ => return Err(UsageError("pass --rater-a and --rater-b, or --confusion".into()).into()),
    };
    println!("{:?}", report.kappa);
    let mut out = OutputDir::new(&args.out);
    out.write_json("kappa.json", &report)?;
    out.finish("kappa", &args, None, &inputs)
}
