mod common;

use common::{face_card, LAB_PROBES};
use foulplay::color::{
    apply_mask, dominant_colors, exclude_black_cluster, extract_skin_mask, measure_image, measure_image_detailed,
    representative_tone, rgb_to_hsv8, srgb_to_lab, threshold_mask, write_tone_csv, ColorCluster, ColorError,
    RgbImage, SkinMask, ToneRecord, SKIN_HSV_RANGE,
};
use proptest::prelude::*;

#[test]
fn lab_probe_colors() {
    for (rgb, want) in LAB_PROBES {
        let lab = srgb_to_lab(rgb);
        let got = [lab.l_star, lab.a_star, lab.b_star];
        for c in 0..3 {
            assert!((got[c] - want[c]).abs() < 0.05, "{rgb:?}: {got:?} vs {want:?}");
        }
    }
    let white = srgb_to_lab([255, 255, 255]);
    assert!((white.l_star - 100.0).abs() < 1e-3 && white.a_star.abs() < 1e-3 && white.b_star.abs() < 1e-3);
    let black = srgb_to_lab([0, 0, 0]);
    assert!(black.l_star.abs() < 1e-3 && black.a_star.abs() < 1e-3 && black.b_star.abs() < 1e-3);
}

// Checksums over the full 24-bit cube from an independent 8-bit HSV converter.
#[test]
fn hsv_full_cube_checksums() {
    let (mut sum_h, mut sum_s, mut sum_v) = (0i64, 0i64, 0i64);
    let (mut mix_h, mut mix_s) = (0i64, 0i64);
    let (mut skin, mut skin_mix) = (0i64, 0i64);
    for idx in 0..(1i64 << 24) {
        let rgb = [(idx >> 16) as u8, (idx >> 8) as u8, idx as u8];
        let hsv = rgb_to_hsv8(rgb);
        let m = idx % 1_000_003;
        let [h, s, v] = hsv.map(i64::from);
        sum_h += h;
        sum_s += s;
        sum_v += v;
        mix_h += h * m;
        mix_s += s * m;
        if SKIN_HSV_RANGE.contains(hsv) {
            skin += 1;
            skin_mix += m;
        }
    }
    assert_eq!((sum_h, sum_s, sum_v), (1_501_377_885, 2_860_642_890, 3_212_820_480));
    assert_eq!((mix_h, mix_s), (742_527_814_434_826, 1_408_161_937_756_570));
    assert_eq!((skin, skin_mix), (1_809_873, 904_235_649_584));
}

#[test]
fn skin_example_color_is_in_range() {
    assert_eq!(rgb_to_hsv8([203, 146, 117]), [10, 108, 203]);
    assert!(SKIN_HSV_RANGE.contains(rgb_to_hsv8([203, 146, 117])));
    assert!(!SKIN_HSV_RANGE.contains(rgb_to_hsv8([0, 0, 255])));
}

#[test]
fn half_skin_half_blue_mask() {
    let img = RgbImage::from_fn(10, 6, |x, _| if x < 5 { [203, 146, 117] } else { [0, 0, 255] }).unwrap();
    let mask = extract_skin_mask(&img);
    let raw = threshold_mask(&img);
    for y in 0..6 {
        for x in 0..10 {
            assert_eq!(raw.get(x, y), x < 5);
            if !(4..=5).contains(&x) {
                assert_eq!(mask.get(x, y), x < 5, "({x},{y})");
            }
        }
    }
}

#[test]
fn checkerboard_mask_zeroes_exactly_the_masked_pixels() {
    let img = RgbImage::from_fn(7, 5, |x, y| [(x * 30) as u8, (y * 40) as u8, 77]).unwrap();
    let bits: Vec<bool> = (0..35).map(|i| (i % 7 + i / 7) % 2 == 0).collect();
    let mask = SkinMask::new(7, 5, bits.clone()).unwrap();
    let out = apply_mask(&img, &mask).unwrap();
    for (i, (o, p)) in out.pixels().iter().zip(img.pixels()).enumerate() {
        assert_eq!(*o, if bits[i] { *p } else { [0, 0, 0] });
    }
    let wrong = SkinMask::filled(5, 7, true);
    assert!(matches!(apply_mask(&img, &wrong), Err(ColorError::DimensionMismatch { .. })));
}

#[test]
fn seven_to_three_card() {
    let a = [224, 172, 105];
    let b = [141, 85, 36];
    let img = RgbImage::from_fn(10, 10, |x, _| if x < 7 { a } else { b }).unwrap();
    // Both colors sit inside the skin range, so the mask is everywhere true.
    assert!(extract_skin_mask(&img).bits().iter().all(|b| *b));
    let tone = measure_image(&img, 3).unwrap();
    let (la, lb) = (srgb_to_lab(a), srgb_to_lab(b));
    assert!((tone.l_star - (0.7 * la.l_star + 0.3 * lb.l_star)).abs() < 1e-9);
    assert!((tone.a_star - (0.7 * la.a_star + 0.3 * lb.a_star)).abs() < 1e-9);
    assert!((tone.b_star - (0.7 * la.b_star + 0.3 * lb.b_star)).abs() < 1e-9);
}

#[test]
fn no_skin_pixels_errors() {
    let img = RgbImage::filled(8, 8, [0, 0, 255]).unwrap();
    assert!(matches!(measure_image(&img, 0), Err(ColorError::NoSkinClusters)));
}

#[test]
fn black_cluster_rules() {
    let kept = exclude_black_cluster(&[ColorCluster::new([0.0; 3], 400), ColorCluster::new([200.0, 150.0, 120.0], 600)])
        .unwrap();
    assert_eq!(kept.len(), 1);
    assert_eq!(kept[0].size, 600);
    assert!(exclude_black_cluster(&[ColorCluster::new([3.0; 3], 5), ColorCluster::new([2.0, 1.0, 2.0], 5)]).is_err());
    let tone = representative_tone(&[
        ColorCluster::new([200.0, 150.0, 120.0], 300),
        ColorCluster::new([120.0, 80.0, 50.0], 100),
    ])
    .unwrap();
    let l1 = ColorCluster::new([200.0, 150.0, 120.0], 1).centroid_lab.l_star;
    let l2 = ColorCluster::new([120.0, 80.0, 50.0], 1).centroid_lab.l_star;
    assert!((tone.l_star - (300.0 * l1 + 100.0 * l2) / 400.0).abs() < 1e-12);
}

#[test]
fn corpus_is_deterministic() {
    let run = || {
        let records: Vec<ToneRecord> = (0..12)
            .map(|i| ToneRecord::from_measurement(format!("img{i:02}"), &measure_image_detailed(&face_card(i), 9).unwrap()))
            .collect();
        let mut buf = Vec::new();
        write_tone_csv(&records, 5, &mut buf).unwrap();
        buf
    };
    assert_eq!(run(), run());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn partition_envelope_and_range(seed in 0u64..10_000, k in 1usize..7) {
        let img = face_card(seed);
        let masked = apply_mask(&img, &extract_skin_mask(&img)).unwrap();
        let clusters = dominant_colors(&masked, k, seed).unwrap();
        prop_assert_eq!(clusters.iter().map(|c| c.size).sum::<usize>(), masked.len());
        if let Ok(m) = measure_image_detailed(&img, seed) {
            prop_assert!((0.0..=100.0).contains(&m.tone.l_star));
            let ls: Vec<f64> = m.skin_clusters.iter().map(|c| c.centroid_lab.l_star).collect();
            let lo = ls.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = ls.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(m.tone.l_star >= lo - 1e-9 && m.tone.l_star <= hi + 1e-9);
            prop_assert_eq!(m.tone, measure_image(&img, seed).unwrap());
        }
    }

    #[test]
    fn gray_lightness_strictly_increasing(v in 0u8..255) {
        prop_assert!(srgb_to_lab([v + 1; 3]).l_star > srgb_to_lab([v; 3]).l_star);
    }
}
