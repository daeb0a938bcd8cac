/// Converts RGB to 8-bit HSV: hue on 0..=179 (degrees halved), saturation and
/// value on 0..=255, each rounded to nearest.
pub fn rgb_to_hsv8(rgb: [u8; 3]) -> [u8; 3] {
    // Fixed-point arithmetic with 12 fractional bits and reciprocal tables,
    // so results agree bit-for-bit with the common 8-bit converters
    // (e.g. S = 127, not 128, for a 100/200 chroma ratio).
    const SHIFT: u32 = 12;
    const HALF: i32 = 1 << (SHIFT - 1);
    let [r, g, b] = rgb.map(i32::from);
    let v = r.max(g).max(b);
    let diff = v - r.min(g).min(b);
    let sdiv = |x: i32| if x == 0 { 0 } else { ((255 << SHIFT) as f64 / x as f64).round_ties_even() as i32 };
    let hdiv = |x: i32| if x == 0 { 0 } else { ((180 << SHIFT) as f64 / (6.0 * x as f64)).round_ties_even() as i32 };
    let s = (diff * sdiv(v) + HALF) >> SHIFT;
    let h = if v == r {
        g - b
    } else if v == g {
        b - r + 2 * diff
    } else {
        r - g + 4 * diff
    };
    let mut h = (h * hdiv(diff) + HALF) >> SHIFT;
    if h < 0 {
        h += 180;
    }
    [h as u8, s as u8, v as u8]
}

/// Inclusive per-channel HSV box.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HsvRange {
    pub lower: [u8; 3],
    pub upper: [u8; 3],
}

impl HsvRange {
    pub fn contains(&self, hsv: [u8; 3]) -> bool {
        (0..3).all(|i| hsv[i] >= self.lower[i] && hsv[i] <= self.upper[i])
    }
}

/// Skin range in 8-bit HSV. Hue does not wrap, so reds above 20 are excluded.
pub const SKIN_HSV_RANGE: HsvRange = HsvRange {
    lower: [0, 48, 89],
    upper: [20, 255, 255],
};

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_computed_skin_color() {
        // max=R=203, min=117, delta=86: h = 60*29/86 = 20.23 deg -> 10;
        // s = 255*86/203 = 108.03 -> 108; v = 203.
        assert_eq!(rgb_to_hsv8([203, 146, 117]), [10, 108, 203]);
        assert!(SKIN_HSV_RANGE.contains([10, 108, 203]));
    }

    #[test]
    fn matches_reference_converter() {
        // Frozen from an 8-bit OpenCV RGB->HSV conversion.
        let cases: [([u8; 3], [u8; 3]); 15] = [
            ([203, 146, 117], [10, 108, 203]),
            ([0, 0, 255], [120, 255, 255]),
            ([255, 0, 0], [0, 255, 255]),
            ([141, 85, 36], [14, 190, 141]),
            ([224, 172, 105], [17, 135, 224]),
            ([92, 51, 23], [12, 191, 92]),
            ([60, 40, 30], [10, 128, 60]),
            ([255, 219, 172], [17, 83, 255]),
            ([200, 100, 100], [0, 127, 200]),
            ([100, 200, 100], [60, 127, 200]),
            ([13, 13, 13], [0, 0, 13]),
            ([128, 64, 0], [15, 255, 128]),
            ([250, 40, 70], [176, 214, 250]),
            ([90, 80, 70], [15, 57, 90]),
            ([205, 92, 92], [0, 141, 205]),
        ];
        for (rgb, hsv) in cases {
            assert_eq!(rgb_to_hsv8(rgb), hsv, "rgb {rgb:?}");
        }
    }

    #[test]
    fn blue_is_not_skin() {
        assert!(!SKIN_HSV_RANGE.contains(rgb_to_hsv8([0, 0, 255])));
    }
}
