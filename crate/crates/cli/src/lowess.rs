use std::path::PathBuf;

use anyhow::Context;
use clap::Args;
use foulplay::stats::{lowess, LowessOptions};
use serde::Serialize;

use crate::output::OutputDir;
use crate::UsageError;

#[derive(Debug, Args, Serialize)]
pub struct LowessArgs {
    /// CSV with a header row.
    #[arg(long, value_name = "CSV")]
    pub input: PathBuf,
    /// Column holding the predictor.
    #[arg(long)]
    pub x: String,
    /// Column holding the response.
    #[arg(long)]
    pub y: String,
    /// Share of points in each local window.
    #[arg(long, default_value_t = 2.0 / 3.0)]
    pub frac: f64,
    /// Number of robustness reweighting passes.
    #[arg(long, default_value_t = 1)]
    pub iterations: usize,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

pub fn run(args: LowessArgs) -> anyhow::Result<()> {
    if !(args.frac > 0.0 && args.frac <= 1.0) {
        return Err(UsageError("--frac must lie in (0, 1]".into()).into());
    }
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| anyhow::anyhow!("column `{name}` not found in {}", args.input.display()))
    };
    let (xi, yi) = (col(&args.x)?, col(&args.y)?);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let num = |i: usize| -> anyhow::Result<f64> {
            let cell = record.get(i).unwrap_or("");
            cell.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .with_context(|| format!("{}:{line}: `{cell}` is not a finite number", args.input.display()))
        };
        xs.push(num(xi)?);
        ys.push(num(yi)?);
    }
    let fit = lowess(&xs, &ys, LowessOptions { fraction: args.frac, iterations: args.iterations })?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([args.x.as_str(), "fit"])?;
    for (x, f) in &fit {
        w.write_record([x.to_string(), f.to_string()])?;
    }
    let mut out = OutputDir::new(&args.out);
    out.write("lowess.csv", w.into_inner()?)?;
    out.finish("lowess", &args, None, std::slice::from_ref(&args.input))
}
