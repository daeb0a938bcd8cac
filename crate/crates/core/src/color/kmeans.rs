use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ColorCluster, ColorError, ColorResult, RgbImage};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansConfig {
    pub k: usize,
    pub seed: u64,
    pub max_iterations: usize,
    /// Stop once no centroid moves further than this (RGB units).
    pub tolerance: f64,
}

impl KMeansConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            k,
            seed,
            max_iterations: 100,
            tolerance: 1e-4,
        }
    }
}

#[derive(Debug, Clone)]
pub struct KMeansFit {
    /// Non-empty clusters, largest first.
    pub clusters: Vec<ColorCluster>,
    /// Within-cluster sum of squares after each assignment step.
    pub inertia_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

fn dist2(a: [f64; 3], b: [f64; 3]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)
}

fn nearest(point: [f64; 3], centroids: &[[f64; 3]]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centroids.iter().enumerate() {
        let d = dist2(point, *c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

// Draws an index with probability proportional to `weights`.
fn weighted_pick(rng: &mut ChaCha8Rng, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if target < acc && *w > 0.0 {
            return i;
        }
    }
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

/// Lloyd's k-means over pixel colors with k-means++ seeding.
///
/// Pixels sharing a color are collapsed into one weighted point, which leaves
/// both the objective and the seeding distribution unchanged. When the image
/// has at most `k` distinct colors each color becomes its own cluster.
pub fn kmeans(img: &RgbImage, config: &KMeansConfig) -> ColorResult<KMeansFit> {
    if config.k == 0 {
        return Err(ColorError::ZeroClusters);
    }
    if img.is_empty() {
        return Err(ColorError::NoPixels);
    }
    let mut counts: BTreeMap<[u8; 3], usize> = BTreeMap::new();
    for &p in img.pixels() {
        *counts.entry(p).or_default() += 1;
    }
    let points: Vec<[f64; 3]> = counts.keys().map(|c| c.map(f64::from)).collect();
    let weights: Vec<f64> = counts.values().map(|&n| n as f64).collect();

    if points.len() <= config.k {
        let mut clusters: Vec<ColorCluster> = points
            .iter()
            .zip(counts.values())
            .map(|(&p, &n)| ColorCluster::new(p, n))
            .collect();
        sort_clusters(&mut clusters);
        return Ok(KMeansFit {
            clusters,
            inertia_trace: vec![0.0],
            iterations: 0,
            converged: true,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut centroids = Vec::with_capacity(config.k);
    centroids.push(points[weighted_pick(&mut rng, &weights)]);
    let mut d2: Vec<f64> = points.iter().map(|&p| dist2(p, centroids[0])).collect();
    while centroids.len() < config.k {
        let scores: Vec<f64> = d2.iter().zip(&weights).map(|(d, w)| d * w).collect();
        let next = points[weighted_pick(&mut rng, &scores)];
        centroids.push(next);
        for (d, &p) in d2.iter_mut().zip(&points) {
            *d = d.min(dist2(p, next));
        }
    }

    let mut labels = vec![0usize; points.len()];
    let mut inertia_trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < config.max_iterations {
        iterations += 1;
        let mut inertia = 0.0;
        for (i, &p) in points.iter().enumerate() {
            let (j, d) = nearest(p, &centroids);
            labels[i] = j;
            inertia += weights[i] * d;
        }
        inertia_trace.push(inertia);

        let mut sums = vec![[0.0f64; 3]; config.k];
        let mut mass = vec![0.0f64; config.k];
        for (i, &p) in points.iter().enumerate() {
            let j = labels[i];
            mass[j] += weights[i];
            for c in 0..3 {
                sums[j][c] += weights[i] * p[c];
            }
        }
        let mut shift: f64 = 0.0;
        for j in 0..config.k {
            // empty clusters keep their centroid
            if mass[j] > 0.0 {
                let updated = sums[j].map(|s| s / mass[j]);
                shift = shift.max(dist2(updated, centroids[j]).sqrt());
                centroids[j] = updated;
            }
        }
        if shift < config.tolerance {
            converged = true;
            break;
        }
    }

    let mut sizes = vec![0usize; config.k];
    for (i, &j) in labels.iter().enumerate() {
        sizes[j] += weights[i] as usize;
    }
    let mut clusters: Vec<ColorCluster> = centroids
        .iter()
        .zip(&sizes)
        .filter(|(_, &n)| n > 0)
        .map(|(&c, &n)| ColorCluster::new(c, n))
        .collect();
    sort_clusters(&mut clusters);
    Ok(KMeansFit {
        clusters,
        inertia_trace,
        iterations,
        converged,
    })
}

fn sort_clusters(clusters: &mut [ColorCluster]) {
    clusters.sort_by(|a, b| {
        b.size.cmp(&a.size).then_with(|| {
            a.centroid_rgb
                .partial_cmp(&b.centroid_rgb)
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });
}

/// The `k` dominant colors of an image, largest cluster first.
pub fn dominant_colors(img: &RgbImage, k: usize, seed: u64) -> ColorResult<Vec<ColorCluster>> {
    Ok(kmeans(img, &KMeansConfig::new(k, seed))?.clusters)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_image_collapses_to_one_cluster() {
        let img = RgbImage::filled(6, 5, [120, 80, 60]).unwrap();
        let clusters = dominant_colors(&img, 5, 1).unwrap();
        assert_eq!(clusters.len(), 1);
        assert_eq!(clusters[0].size, 30);
        assert_eq!(clusters[0].centroid_rgb, [120.0, 80.0, 60.0]);
    }

    #[test]
    fn two_colors_three_to_one() {
        let a = [200, 150, 120];
        let b = [90, 60, 40];
        let img = RgbImage::from_fn(8, 4, |x, _| if x < 6 { a } else { b }).unwrap();
        let clusters = dominant_colors(&img, 2, 3).unwrap();
        assert_eq!(clusters.len(), 2);
        assert_eq!(clusters[0].size, 24);
        assert_eq!(clusters[1].size, 8);
        assert_eq!(clusters[0].centroid_rgb, a.map(f64::from));
        assert_eq!(clusters[1].centroid_rgb, b.map(f64::from));
    }

    #[test]
    fn partition_and_monotone_objective_on_noisy_image() {
        let mut state = 17u32;
        let img = RgbImage::from_fn(40, 30, |_, _| {
            state = state.wrapping_mul(1_664_525).wrapping_add(1_013_904_223);
            let b = state.to_le_bytes();
            [b[1], b[2], b[3] / 2]
        })
        .unwrap();
        let fit = kmeans(&img, &KMeansConfig::new(5, 9)).unwrap();
        assert_eq!(fit.clusters.iter().map(|c| c.size).sum::<usize>(), 1200);
        for pair in fit.inertia_trace.windows(2) {
            assert!(pair[1] <= pair[0] * (1.0 + 1e-12), "{pair:?}");
        }
        let again = kmeans(&img, &KMeansConfig::new(5, 9)).unwrap();
        assert_eq!(fit.clusters, again.clusters);
    }

    #[test]
    fn zero_k_is_rejected() {
        let img = RgbImage::filled(2, 2, [1, 2, 3]).unwrap();
        assert!(matches!(dominant_colors(&img, 0, 0), Err(ColorError::ZeroClusters)));
    }
}
