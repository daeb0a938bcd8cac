//! Image to representative skin tone.
//!
//! The pipeline is: HSV skin thresholding, 3x3 Gaussian smoothing of the mask,
//! masking, k-means over the masked pixels, removal of the near-black
//! background cluster, and a size-weighted average of the cluster centroids
//! in CIELAB.

mod hsv;
mod io;
mod kmeans;
mod lab;
mod mask;
mod pipeline;

use thiserror::Error;

pub use hsv::{rgb_to_hsv8, HsvRange, SKIN_HSV_RANGE};
pub use io::{decode_png, load_png, write_tone_csv, ClusterRecord, ToneRecord};
pub use kmeans::{dominant_colors, kmeans, KMeansConfig, KMeansFit};
pub use lab::{srgb_f64_to_lab, srgb_to_lab, LabTone};
pub use mask::{
    apply_mask, extract_skin_mask, smooth_mask, threshold_mask, SkinMask, GAUSSIAN_KERNEL_3, GAUSSIAN_SIGMA_3,
};
pub use pipeline::{
    exclude_black_cluster, measure_image, measure_image_detailed, representative_tone,
    ToneMeasurement, BLACK_L_STAR_THRESHOLD, DEFAULT_CLUSTERS,
};

#[derive(Debug, Error)]
pub enum ColorError {
    #[error("invalid image: {0}")]
    InvalidImage(String),
    #[error("mask is {mask_w}x{mask_h} but image is {img_w}x{img_h}")]
    DimensionMismatch {
        img_w: u32,
        img_h: u32,
        mask_w: u32,
        mask_h: u32,
    },
    #[error("no pixels")]
    NoPixels,
    #[error("k must be at least 1")]
    ZeroClusters,
    #[error("no skin clusters")]
    NoSkinClusters,
    #[error("failed to decode image: {0}")]
    Decode(#[from] image::ImageError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type ColorResult<T> = Result<T, ColorError>;

/// An 8-bit RGB raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: u32,
    height: u32,
    pixels: Vec<[u8; 3]>,
}

impl RgbImage {
    pub fn new(width: u32, height: u32, pixels: Vec<[u8; 3]>) -> ColorResult<Self> {
        if width == 0 || height == 0 {
            return Err(ColorError::InvalidImage(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        let expected = width as usize * height as usize;
        if pixels.len() != expected {
            return Err(ColorError::InvalidImage(format!(
                "expected {expected} pixels, got {}",
                pixels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// Uniform image filled with one color.
    pub fn filled(width: u32, height: u32, rgb: [u8; 3]) -> ColorResult<Self> {
        Self::new(width, height, vec![rgb; width as usize * height as usize])
    }

    pub fn from_fn(
        width: u32,
        height: u32,
        mut f: impl FnMut(u32, u32) -> [u8; 3],
    ) -> ColorResult<Self> {
        let mut pixels = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::new(width, height, pixels)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }

    pub fn pixel(&self, x: u32, y: u32) -> [u8; 3] {
        self.pixels[y as usize * self.width as usize + x as usize]
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }
}

/// A k-means cluster of pixel colors.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ColorCluster {
    pub centroid_rgb: [f64; 3],
    pub size: usize,
    pub centroid_lab: LabTone,
}

impl ColorCluster {
    pub fn new(centroid_rgb: [f64; 3], size: usize) -> Self {
        Self {
            centroid_rgb,
            size,
            centroid_lab: srgb_f64_to_lab(centroid_rgb),
        }
    }
}
