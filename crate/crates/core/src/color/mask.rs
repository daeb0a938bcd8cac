use super::hsv::{rgb_to_hsv8, SKIN_HSV_RANGE};
use super::{ColorError, ColorResult, RgbImage};

/// Boolean skin mask with the same dimensions as its source image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkinMask {
    width: u32,
    height: u32,
    bits: Vec<bool>,
}

impl SkinMask {
    pub fn new(width: u32, height: u32, bits: Vec<bool>) -> ColorResult<Self> {
        if bits.len() != width as usize * height as usize {
            return Err(ColorError::InvalidImage(format!(
                "mask of {width}x{height} needs {} bits, got {}",
                width as usize * height as usize,
                bits.len()
            )));
        }
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    pub fn filled(width: u32, height: u32, value: bool) -> Self {
        Self {
            width,
            height,
            bits: vec![value; width as usize * height as usize],
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, x: u32, y: u32) -> bool {
        self.bits[y as usize * self.width as usize + x as usize]
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// Raw per-pixel HSV threshold, before smoothing.
pub fn threshold_mask(img: &RgbImage) -> SkinMask {
    let bits = img
        .pixels()
        .iter()
        .map(|&p| SKIN_HSV_RANGE.contains(rgb_to_hsv8(p)))
        .collect();
    SkinMask {
        width: img.width(),
        height: img.height(),
        bits,
    }
}

// Border handling mirrors without repeating the edge pixel (gfedcb|abcdefgh|gfedcba).
fn reflect101(i: isize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let n = n as isize;
    let r = if i < 0 {
        -i
    } else if i >= n {
        2 * n - 2 - i
    } else {
        i
    };
    r as usize
}

/// One axis of the separable 3x3 smoothing kernel.
pub const GAUSSIAN_KERNEL_3: [f64; 3] = [0.25, 0.5, 0.25];

/// The sigma a 3-tap Gaussian gets when only the kernel size is given
/// (`0.3·((size − 1)/2 − 1) + 0.8`); at that sigma the sampled taps are
/// conventionally rounded to the binomial `[1 2 1] / 4`.
pub const GAUSSIAN_SIGMA_3: f64 = 0.8;

/// Smooths a mask with the 3x3 Gaussian kernel `[1 2 1]ᵀ[1 2 1] / 16` and
/// re-binarizes at 0.5 (values equal to 0.5 stay in the mask).
pub fn smooth_mask(mask: &SkinMask) -> SkinMask {
    const K: [f64; 3] = GAUSSIAN_KERNEL_3;
    let (w, h) = (mask.width as usize, mask.height as usize);
    let src: Vec<f64> = mask.bits.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();

    let mut horiz = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (k, weight) in K.iter().enumerate() {
                let xx = reflect101(x as isize + k as isize - 1, w);
                acc += weight * src[y * w + xx];
            }
            horiz[y * w + x] = acc;
        }
    }
    let mut bits = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (k, weight) in K.iter().enumerate() {
                let yy = reflect101(y as isize + k as isize - 1, h);
                acc += weight * horiz[yy * w + x];
            }
            bits.push(acc >= 0.5);
        }
    }
    SkinMask {
        width: mask.width,
        height: mask.height,
        bits,
    }
}

/// HSV skin threshold followed by 3x3 Gaussian smoothing.
pub fn extract_skin_mask(img: &RgbImage) -> SkinMask {
    smooth_mask(&threshold_mask(img))
}

/// Zeroes every pixel outside the mask.
pub fn apply_mask(img: &RgbImage, mask: &SkinMask) -> ColorResult<RgbImage> {
    if img.width() != mask.width || img.height() != mask.height {
        return Err(ColorError::DimensionMismatch {
            img_w: img.width(),
            img_h: img.height(),
            mask_w: mask.width,
            mask_h: mask.height,
        });
    }
    let pixels = img
        .pixels()
        .iter()
        .zip(&mask.bits)
        .map(|(&p, &keep)| if keep { p } else { [0, 0, 0] })
        .collect();
    RgbImage::new(img.width(), img.height(), pixels)
}
