use super::kmeans::dominant_colors;
use super::mask::{apply_mask, extract_skin_mask};
use super::{ColorCluster, ColorError, ColorResult, LabTone, RgbImage};

pub const DEFAULT_CLUSTERS: usize = 5;

/// Clusters whose centroid lightness falls below this are treated as the
/// masked-out background.
pub const BLACK_L_STAR_THRESHOLD: f64 = 5.0;

/// Drops near-black clusters (centroid L* below [`BLACK_L_STAR_THRESHOLD`]).
pub fn exclude_black_cluster(clusters: &[ColorCluster]) -> ColorResult<Vec<ColorCluster>> {
    let kept: Vec<ColorCluster> = clusters
        .iter()
        .filter(|c| c.centroid_lab.l_star >= BLACK_L_STAR_THRESHOLD)
        .cloned()
        .collect();
    if kept.is_empty() {
        return Err(ColorError::NoSkinClusters);
    }
    Ok(kept)
}

/// Size-weighted mean of the cluster centroids, averaged in Lab space.
pub fn representative_tone(clusters: &[ColorCluster]) -> ColorResult<LabTone> {
    let total: usize = clusters.iter().map(|c| c.size).sum();
    if clusters.is_empty() || total == 0 {
        return Err(ColorError::NoSkinClusters);
    }
    let total = total as f64;
    let mut tone = LabTone::new(0.0, 0.0, 0.0);
    for c in clusters {
        let w = c.size as f64 / total;
        tone.l_star += w * c.centroid_lab.l_star;
        tone.a_star += w * c.centroid_lab.a_star;
        tone.b_star += w * c.centroid_lab.b_star;
    }
    Ok(tone)
}

/// Full pipeline output: the tone plus the clusters that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct ToneMeasurement {
    pub tone: LabTone,
    /// Every k-means cluster, background included, largest first.
    pub all_clusters: Vec<ColorCluster>,
    /// Clusters entering the weighted average.
    pub skin_clusters: Vec<ColorCluster>,
    pub skin_pixels: usize,
}

impl ToneMeasurement {
    /// Weight of each skin cluster in the average.
    pub fn weights(&self) -> Vec<f64> {
        let total: usize = self.skin_clusters.iter().map(|c| c.size).sum();
        self.skin_clusters
            .iter()
            .map(|c| c.size as f64 / total as f64)
            .collect()
    }
}

pub fn measure_image_detailed(img: &RgbImage, seed: u64) -> ColorResult<ToneMeasurement> {
    let mask = extract_skin_mask(img);
    let masked = apply_mask(img, &mask)?;
    let all_clusters = dominant_colors(&masked, DEFAULT_CLUSTERS, seed)?;
    let skin_clusters = exclude_black_cluster(&all_clusters)?;
    let tone = representative_tone(&skin_clusters)?;
    Ok(ToneMeasurement {
        tone,
        all_clusters,
        skin_clusters,
        skin_pixels: mask.count(),
    })
}

/// Image to representative skin tone; deterministic for a fixed seed.
pub fn measure_image(img: &RgbImage, seed: u64) -> ColorResult<LabTone> {
    Ok(measure_image_detailed(img, seed)?.tone)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::color::srgb_to_lab;

    fn cluster_with_l(l: f64, size: usize) -> ColorCluster {
        ColorCluster {
            centroid_rgb: [0.0; 3],
            size,
            centroid_lab: LabTone::new(l, 0.0, 0.0),
        }
    }

    #[test]
    fn black_cluster_rules() {
        let clusters = vec![
            ColorCluster::new([0.0, 0.0, 0.0], 400),
            ColorCluster::new([200.0, 150.0, 120.0], 600),
        ];
        let kept = exclude_black_cluster(&clusters).unwrap();
        assert_eq!(kept, vec![clusters[1].clone()]);

        let bright = vec![ColorCluster::new([200.0, 150.0, 120.0], 6)];
        assert_eq!(exclude_black_cluster(&bright).unwrap(), bright);

        let dark = vec![
            ColorCluster::new([3.0, 3.0, 3.0], 10),
            ColorCluster::new([2.0, 1.0, 2.0], 10),
        ];
        assert!(matches!(exclude_black_cluster(&dark), Err(ColorError::NoSkinClusters)));
    }

    #[test]
    fn weighted_average() {
        let one = cluster_with_l(42.0, 7);
        assert_eq!(representative_tone(&[one]).unwrap().l_star, 42.0);
        let even = [cluster_with_l(40.0, 50), cluster_with_l(60.0, 50)];
        assert_eq!(representative_tone(&even).unwrap().l_star, 50.0);
        let skewed = [cluster_with_l(40.0, 300), cluster_with_l(60.0, 100)];
        assert_eq!(representative_tone(&skewed).unwrap().l_star, 45.0);
        assert!(representative_tone(&[]).is_err());
    }

    #[test]
    fn uniform_skin_image() {
        let color = [203, 146, 117];
        let img = RgbImage::filled(16, 16, color).unwrap();
        let tone = measure_image(&img, 0).unwrap();
        let expected = srgb_to_lab(color);
        assert!((tone.l_star - expected.l_star).abs() < 1e-6);
        assert!((tone.a_star - expected.a_star).abs() < 1e-6);
        assert!((tone.b_star - expected.b_star).abs() < 1e-6);
    }

    #[test]
    fn no_skin_pixels() {
        let img = RgbImage::filled(8, 8, [0, 0, 255]).unwrap();
        assert!(matches!(measure_image(&img, 0), Err(ColorError::NoSkinClusters)));
    }
}
