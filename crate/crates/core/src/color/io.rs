use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::pipeline::ToneMeasurement;
use super::{ColorResult, LabTone, RgbImage};

/// Decodes PNG bytes to 8-bit RGB. Alpha is composited over black.
pub fn decode_png(bytes: &[u8]) -> ColorResult<RgbImage> {
    let decoded = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)?;
    from_dynamic(decoded)
}

pub fn load_png(path: &Path) -> ColorResult<RgbImage> {
    let bytes = std::fs::read(path)?;
    decode_png(&bytes)
}

fn from_dynamic(decoded: image::DynamicImage) -> ColorResult<RgbImage> {
    let rgba = decoded.to_rgba8();
    let (w, h) = rgba.dimensions();
    let pixels = rgba
        .pixels()
        .map(|p| {
            let [r, g, b, a] = p.0;
            let over_black = |c: u8| ((c as u32 * a as u32 + 127) / 255) as u8;
            [over_black(r), over_black(g), over_black(b)]
        })
        .collect();
    RgbImage::new(w, h, pixels)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterRecord {
    pub centroid_rgb: [f64; 3],
    pub centroid_lab: LabTone,
    pub size: usize,
    pub weight: f64,
}

/// One measured image, as written to CSV and JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToneRecord {
    pub image_id: String,
    pub l_star: f64,
    pub a_star: f64,
    pub b_star: f64,
    pub clusters: Vec<ClusterRecord>,
}

impl ToneRecord {
    pub fn from_measurement(image_id: impl Into<String>, m: &ToneMeasurement) -> Self {
        let clusters = m
            .skin_clusters
            .iter()
            .zip(m.weights())
            .map(|(c, weight)| ClusterRecord {
                centroid_rgb: c.centroid_rgb,
                centroid_lab: c.centroid_lab,
                size: c.size,
                weight,
            })
            .collect();
        Self {
            image_id: image_id.into(),
            l_star: m.tone.l_star,
            a_star: m.tone.a_star,
            b_star: m.tone.b_star,
            clusters,
        }
    }
}

const CLUSTER_FIELDS: [&str; 8] = ["r", "g", "b", "l_star", "a_star", "b_star", "size", "weight"];

/// Writes one row per image. Cluster columns `c{i}_*` are filled for the skin
/// clusters in size order and left empty beyond them.
pub fn write_tone_csv<W: Write>(records: &[ToneRecord], max_clusters: usize, out: W) -> ColorResult<()> {
    let mut writer = csv::Writer::from_writer(out);
    let mut header: Vec<String> = ["image_id", "l_star", "a_star", "b_star", "n_clusters"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for i in 1..=max_clusters {
        header.extend(CLUSTER_FIELDS.iter().map(|f| format!("c{i}_{f}")));
    }
    writer.write_record(&header)?;
    for rec in records {
        let mut row = vec![
            rec.image_id.clone(),
            rec.l_star.to_string(),
            rec.a_star.to_string(),
            rec.b_star.to_string(),
            rec.clusters.len().to_string(),
        ];
        for i in 0..max_clusters {
            match rec.clusters.get(i) {
                Some(c) => row.extend([
                    c.centroid_rgb[0].to_string(),
                    c.centroid_rgb[1].to_string(),
                    c.centroid_rgb[2].to_string(),
                    c.centroid_lab.l_star.to_string(),
                    c.centroid_lab.a_star.to_string(),
                    c.centroid_lab.b_star.to_string(),
                    c.size.to_string(),
                    c.weight.to_string(),
                ]),
                None => row.extend(std::iter::repeat_n(String::new(), CLUSTER_FIELDS.len())),
            }
        }
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}
