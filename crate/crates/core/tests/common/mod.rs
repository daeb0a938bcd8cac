#![allow(dead_code)]

use foulplay::felm::{Frame, ModelSpec};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Random weighted panel with two crossed group structures.
#[derive(Debug, Clone)]
pub struct Instance {
    pub y: Vec<f64>,
    pub x: Vec<Vec<f64>>,
    pub w: Vec<f64>,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub n_a: usize,
    pub n_b: usize,
}

impl Instance {
    pub fn random(seed: u64, n: usize, k: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n_a = (n / 6).max(2);
        let n_b = (n / 9).max(2);
        // Every group gets at least one row so group counts are exact.
        let a: Vec<usize> = (0..n).map(|i| if i < n_a { i } else { rng.random_range(0..n_a) }).collect();
        let b: Vec<usize> = (0..n).map(|i| if i < n_b { i } else { rng.random_range(0..n_b) }).collect();
        let fa: Vec<f64> = (0..n_a).map(|_| 2.0 * gauss(&mut rng)).collect();
        let fb: Vec<f64> = (0..n_b).map(|_| 2.0 * gauss(&mut rng)).collect();
        let x: Vec<Vec<f64>> = (0..k)
            .map(|_| (0..n).map(|i| gauss(&mut rng) + 0.5 * fa[a[i]] - 0.3 * fb[b[i]]).collect())
            .collect();
        let beta: Vec<f64> = (0..k).map(|j| 0.5 + j as f64 * -0.7).collect();
        let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..3.0)).collect();
        let y = (0..n)
            .map(|i| (0..k).map(|j| beta[j] * x[j][i]).sum::<f64>() + fa[a[i]] + fb[b[i]] + gauss(&mut rng))
            .collect();
        Self { y, x, w, a, b, n_a, n_b }
    }

    pub fn names(&self) -> Vec<String> {
        (0..self.x.len()).map(|j| format!("x{j}")).collect()
    }

    pub fn frame(&self) -> Frame {
        let mut f = Frame::new(self.y.len());
        f.add_numeric("y", self.y.clone()).unwrap();
        f.add_numeric("w", self.w.clone()).unwrap();
        for (name, col) in self.names().iter().zip(&self.x) {
            f.add_numeric(name, col.clone()).unwrap();
        }
        f.add_key("a", &self.a).unwrap();
        f.add_key("b", &self.b).unwrap();
        f
    }

    pub fn spec(&self) -> ModelSpec {
        ModelSpec::new("y", self.names(), vec!["a".into(), "b".into()], "w", vec!["a".into(), "b".into()]).unwrap()
    }
}

pub fn gauss<R: Rng>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Weighted least squares by SVD pseudo-inverse on an explicit design.
pub fn dense_wls(design: &DMatrix<f64>, y: &[f64], w: &[f64]) -> DVector<f64> {
    let n = y.len();
    let sw: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
    let xs = DMatrix::from_fn(n, design.ncols(), |i, j| design[(i, j)] * sw[i]);
    let ys = DVector::from_fn(n, |i, _| y[i] * sw[i]);
    xs.svd(true, true).solve(&ys, 1e-11).expect("svd solve")
}

/// Regressors followed by one dummy per group of `a` and per group of `b`.
/// The dummy blocks are collinear; the pseudo-inverse still pins down the
/// regressor slopes, which are identified.
pub fn dummy_design(inst: &Instance) -> DMatrix<f64> {
    let n = inst.y.len();
    let k = inst.x.len();
    DMatrix::from_fn(n, k + inst.n_a + inst.n_b, |i, j| {
        if j < k {
            inst.x[j][i]
        } else if j < k + inst.n_a {
            (inst.a[i] == j - k) as u8 as f64
        } else {
            (inst.b[i] == j - k - inst.n_a) as u8 as f64
        }
    })
}

/// Columns as a dense matrix.
pub fn design(cols: &[Vec<f64>]) -> DMatrix<f64> {
    DMatrix::from_fn(cols[0].len(), cols.len(), |i, j| cols[j][i])
}

/// `(X'WX)^-1` by direct inversion.
pub fn bread(x: &DMatrix<f64>, w: &[f64]) -> DMatrix<f64> {
    let wx = DMatrix::from_fn(x.nrows(), x.ncols(), |i, j| x[(i, j)] * w[i]);
    (x.transpose() * wx).try_inverse().expect("invertible")
}

/// Textbook closed form `(X'WX)^-1 X'Wy`.
pub fn closed_form(x: &DMatrix<f64>, y: &[f64], w: &[f64]) -> DVector<f64> {
    let b = bread(x, w);
    let xtwy = DVector::from_fn(x.ncols(), |j, _| (0..x.nrows()).map(|i| x[(i, j)] * w[i] * y[i]).sum::<f64>());
    b * xtwy
}

/// Heteroskedasticity-robust sandwich with the `N/(N-K)` correction.
pub fn hc1(x: &DMatrix<f64>, resid: &[f64], w: &[f64]) -> DMatrix<f64> {
    let (n, k) = (x.nrows(), x.ncols());
    let b = bread(x, w);
    let mut meat = DMatrix::zeros(k, k);
    for i in 0..n {
        let s = w[i] * resid[i];
        let xi = x.row(i).transpose();
        meat += &xi * xi.transpose() * (s * s);
    }
    &b * meat * &b * (n as f64 / (n - k) as f64)
}

/// One-way cluster sandwich by explicit per-cluster score sums with
/// `G/(G-1)·(N-1)/(N-K)`.
pub fn one_way_cluster(x: &DMatrix<f64>, resid: &[f64], w: &[f64], cluster: &[usize]) -> DMatrix<f64> {
    let (n, k) = (x.nrows(), x.ncols());
    let b = bread(x, w);
    let mut groups: Vec<usize> = cluster.to_vec();
    groups.sort();
    groups.dedup();
    let mut meat = DMatrix::zeros(k, k);
    for g in &groups {
        let mut s = DVector::zeros(k);
        for i in (0..n).filter(|&i| cluster[i] == *g) {
            s += x.row(i).transpose() * (w[i] * resid[i]);
        }
        meat += &s * s.transpose();
    }
    let gc = groups.len() as f64;
    &b * meat * &b * (gc / (gc - 1.0) * (n as f64 - 1.0) / (n - k) as f64)
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).abs().max()
}

/// Probe colors with CIELAB values from an independent high-precision
/// evaluation of the sRGB (D65) definition.
pub const LAB_PROBES: [([u8; 3], [f64; 3]); 20] = [
    ([255, 255, 255], [100.0, 0.0, 0.0]),
    ([0, 0, 0], [0.0, 0.0, 0.0]),
    ([255, 0, 0], [53.237116, 80.090114, 67.203264]),
    ([0, 255, 0], [87.735519, -86.181597, 83.186620]),
    ([0, 0, 255], [32.300873, 79.195270, -107.855466]),
    ([128, 128, 128], [53.585013, 0.0, 0.0]),
    ([203, 146, 117], [65.388889, 17.907805, 23.889443]),
    ([141, 85, 36], [41.669977, 18.902008, 37.239309]),
    ([198, 134, 66], [61.177370, 18.037274, 45.590221]),
    ([224, 172, 105], [73.787412, 11.273337, 41.531806]),
    ([241, 194, 125], [81.163132, 8.359795, 40.920121]),
    ([255, 219, 172], [89.347519, 5.924624, 27.766985]),
    ([92, 51, 23], [25.877617, 15.797854, 25.174669]),
    ([60, 40, 30], [18.241501, 7.862375, 10.316407]),
    ([10, 10, 10], [2.741748, 0.0, 0.0]),
    ([250, 240, 230], [95.311365, 1.676583, 6.022014]),
    ([33, 200, 150], [72.116003, -51.999613, 13.760590]),
    ([180, 30, 90], [40.199572, 60.662869, 4.449620]),
    ([1, 2, 3], [0.509843, -0.122377, -0.470587]),
    ([120, 200, 40], [73.189659, -48.675485, 65.815019]),
];

/// Synthetic headshot: a skin-colored ellipse with per-pixel jitter and a
/// darker band, on a blue background.
pub fn face_card(seed: u64) -> foulplay::RgbImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = rng.random_range(24..48u32);
    let h = rng.random_range(24..48u32);
    // Keep the colour inside the skin band: hue below 40 degrees, saturation above 0.3.
    let r = rng.random_range(150.0..250.0f64);
    let b = r * rng.random_range(0.3..0.7);
    let g = b + (r - b) * rng.random_range(0.1..0.5);
    let base = [r as u8, g as u8, b as u8];
    let shade = base.map(|c| (c as f64 * 0.7) as u8);
    foulplay::RgbImage::from_fn(w, h, |x, y| {
        let dx = (x as f64 - w as f64 / 2.0) / (w as f64 / 2.5);
        let dy = (y as f64 - h as f64 / 2.0) / (h as f64 / 2.2);
        if dx * dx + dy * dy > 1.0 {
            return [20, 40, 200];
        }
        let src = if y > h * 2 / 3 { shade } else { base };
        let j = rng.random_range(-6i16..=6);
        src.map(|c| (c as i16 + j).clamp(0, 255) as u8)
    })
    .expect("non-empty card")
}
