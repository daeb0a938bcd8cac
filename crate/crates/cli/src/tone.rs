use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::Args;
use foulplay::color::{
    load_png, measure_image_detailed, write_tone_csv, ToneRecord, BLACK_L_STAR_THRESHOLD, DEFAULT_CLUSTERS,
    GAUSSIAN_KERNEL_3, GAUSSIAN_SIGMA_3, SKIN_HSV_RANGE,
};
use foulplay::sim::replication_seed;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::output::OutputDir;
use crate::UsageError;

#[derive(Debug, Args, Serialize)]
pub struct ToneArgs {
    /// Directory of PNG headshots or pre-masked face crops.
    #[arg(long, value_name = "DIR")]
    pub images: PathBuf,
    /// Output CSV, one row per measured image.
    #[arg(long, value_name = "CSV")]
    pub out: PathBuf,
    /// Base seed for k-means; each image gets its own derived seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Per-image seed derived from the base seed and the image id, so adding or
/// removing images leaves the other measurements unchanged.
fn image_seed(base: u64, id: &str) -> u64 {
    let digest = Sha256::digest(id.as_bytes());
    let mut word = [0u8; 8];
    word.copy_from_slice(&digest[..8]);
    replication_seed(base, u64::from_le_bytes(word))
}

fn list_images(dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    if !dir.is_dir() {
        return Err(UsageError(format!("{} is not a directory", dir.display())).into());
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("listing {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .filter(|p| !p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.starts_with('.')))
        .collect();
    files.sort();
    Ok(files)
}

/// Fixed measurement settings, recorded in the manifest next to the flags.
#[derive(Debug, Serialize)]
struct PipelineSettings {
    hsv_lower: [u8; 3],
    hsv_upper: [u8; 3],
    hue_wraps: bool,
    blur_kernel: [f64; 3],
    blur_sigma: f64,
    clusters: usize,
    black_l_star_threshold: f64,
}

#[derive(Debug, Serialize)]
struct ToneConfig<'a> {
    #[serde(flatten)]
    args: &'a ToneArgs,
    pipeline: PipelineSettings,
}

#[derive(Debug)]
struct Failure {
    image_id: String,
    reason: String,
}

pub fn run(args: ToneArgs) -> anyhow::Result<()> {
    let files = list_images(&args.images)?;
    if files.is_empty() {
        anyhow::bail!("no images found in {}", args.images.display());
    }
    let outcomes: Vec<Result<ToneRecord, Failure>> = files
        .par_iter()
        .map(|path| {
            let id = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
            load_png(path)
                .and_then(|img| measure_image_detailed(&img, image_seed(args.seed, &id)))
                .map(|m| ToneRecord::from_measurement(id.clone(), &m))
                .map_err(|e| Failure { image_id: id, reason: e.to_string() })
        })
        .collect();
    let (records, failures): (Vec<_>, Vec<_>) = outcomes.into_iter().partition(Result::is_ok);
    let records: Vec<ToneRecord> = records.into_iter().map(Result::unwrap).collect();
    let failures: Vec<Failure> = failures.into_iter().map(|f| f.unwrap_err()).collect();
    for f in &failures {
        eprintln!("skipped {}: {}", f.image_id, f.reason);
    }

    let dir = match args.out.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = args
        .out
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| UsageError(format!("invalid output path {}", args.out.display())))?
        .to_string();
    let stem = args.out.file_stem().and_then(|s| s.to_str()).unwrap_or("tones");
    let failures_name = format!("{stem}_failures.csv");
    let mut out = OutputDir::new(&dir);

    let mut csv_bytes = Vec::new();
    write_tone_csv(&records, DEFAULT_CLUSTERS, &mut csv_bytes)?;
    out.write(&name, csv_bytes)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["image_id", "reason"])?;
    for f in &failures {
        w.write_record([f.image_id.as_str(), f.reason.as_str()])?;
    }
    out.write(&failures_name, w.into_inner()?)?;
    let config = ToneConfig {
        args: &args,
        pipeline: PipelineSettings {
            hsv_lower: SKIN_HSV_RANGE.lower,
            hsv_upper: SKIN_HSV_RANGE.upper,
            hue_wraps: false,
            blur_kernel: GAUSSIAN_KERNEL_3,
            blur_sigma: GAUSSIAN_SIGMA_3,
            clusters: DEFAULT_CLUSTERS,
            black_l_star_threshold: BLACK_L_STAR_THRESHOLD,
        },
    };
    out.finish("tone", &config, Some(args.seed), &files)?;

    eprintln!("measured {} of {} images", records.len(), files.len());
    if records.is_empty() {
        anyhow::bail!("no image could be measured");
    }
    Ok(())
}
