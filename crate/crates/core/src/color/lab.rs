use serde::{Deserialize, Serialize};

/// A CIELAB color. `l_star` is the perceptual lightness on 0..=100.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabTone {
    pub l_star: f64,
    pub a_star: f64,
    pub b_star: f64,
}

impl LabTone {
    pub const fn new(l_star: f64, a_star: f64, b_star: f64) -> Self {
        Self {
            l_star,
            a_star,
            b_star,
        }
    }
}

// IEC 61966-2-1 linear sRGB -> XYZ (D65).
const SRGB_TO_XYZ: [[f64; 3]; 3] = [
    [0.412_456_4, 0.357_576_1, 0.180_437_5],
    [0.212_672_9, 0.715_152_2, 0.072_175_0],
    [0.019_333_9, 0.119_192_0, 0.950_304_1],
];

// The D65 white is taken as the image of sRGB white so neutral grays land
// exactly on a* = b* = 0.
const WHITE: [f64; 3] = [
    SRGB_TO_XYZ[0][0] + SRGB_TO_XYZ[0][1] + SRGB_TO_XYZ[0][2],
    SRGB_TO_XYZ[1][0] + SRGB_TO_XYZ[1][1] + SRGB_TO_XYZ[1][2],
    SRGB_TO_XYZ[2][0] + SRGB_TO_XYZ[2][1] + SRGB_TO_XYZ[2][2],
];

const EPSILON: f64 = 216.0 / 24389.0;
const KAPPA: f64 = 24389.0 / 27.0;

fn linearize(channel: f64) -> f64 {
    let c = (channel / 255.0).clamp(0.0, 1.0);
    if c <= 0.040_45 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

fn lab_f(t: f64) -> f64 {
    if t > EPSILON {
        t.cbrt()
    } else {
        (KAPPA * t + 16.0) / 116.0
    }
}

/// Converts an 8-bit sRGB triple to CIE 1976 L*a*b* under D65.
pub fn srgb_to_lab(rgb: [u8; 3]) -> LabTone {
    srgb_f64_to_lab([rgb[0] as f64, rgb[1] as f64, rgb[2] as f64])
}

/// Same as [`srgb_to_lab`] for real-valued channels on the 0..=255 scale,
/// as produced by k-means centroids.
pub fn srgb_f64_to_lab(rgb: [f64; 3]) -> LabTone {
    let lin = rgb.map(linearize);
    let mut xyz = [0.0; 3];
    for (row, out) in SRGB_TO_XYZ.iter().zip(xyz.iter_mut()) {
        *out = row[0] * lin[0] + row[1] * lin[1] + row[2] * lin[2];
    }
    let fx = lab_f(xyz[0] / WHITE[0]);
    let fy = lab_f(xyz[1] / WHITE[1]);
    let fz = lab_f(xyz[2] / WHITE[2]);
    LabTone {
        l_star: (116.0 * fy - 16.0).clamp(0.0, 100.0),
        a_star: 500.0 * (fx - fy),
        b_star: 200.0 * (fy - fz),
    }
}
