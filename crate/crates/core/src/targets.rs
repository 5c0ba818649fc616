//! Benchmark target distributions.
//!
//! Continuous densities are evaluated at bin centres and normalized. 2D
//! targets live on `[−3, 3]²`; the joint bin index stores the x register in
//! its low `n_x` bits and the y register above it.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// Default seed for the five peak weights of the 1D target.
pub const DEFAULT_WEIGHT_SEED: u64 = 42;

/// Half-width of the 2D domain.
pub const GRID_HALF_WIDTH: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Grid {
    #[serde(rename = "grid_1d")]
    Grid1D { n: usize },
    #[serde(rename = "grid_2d")]
    Grid2D { n_x: usize, n_y: usize },
}

impl Grid {
    pub fn num_bits(&self) -> usize {
        match *self {
            Grid::Grid1D { n } => n,
            Grid::Grid2D { n_x, n_y } => n_x + n_y,
        }
    }

    pub fn num_bins(&self) -> usize {
        1 << self.num_bits()
    }
}

/// Centre of bin `k` of a `bits`-qubit register spanning `[−3, 3]`.
pub fn bin_center(k: usize, bits: usize) -> f64 {
    let width = 2.0 * GRID_HALF_WIDTH / (1usize << bits) as f64;
    -GRID_HALF_WIDTH + (k as f64 + 0.5) * width
}

pub fn joint_index(ix: usize, iy: usize, n_x: usize) -> usize {
    ix | (iy << n_x)
}

pub fn split_index(bin: usize, n_x: usize) -> (usize, usize) {
    (bin & ((1 << n_x) - 1), bin >> n_x)
}

/// How a target was built; stamped into result manifests.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Provenance {
    #[serde(rename = "multimodal_1d")]
    Multimodal1d { weight_seed: u64, weights: [f64; 5] },
    #[serde(rename = "bivariate_gaussian_2d")]
    BivariateGaussian2d { rho: f64 },
    #[serde(rename = "four_mode_mixture_2d")]
    FourModeMixture2d { sigma: f64, centers: [(f64, f64); 4] },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetDistribution {
    pub probs: Vec<f64>,
    pub grid: Grid,
    pub provenance: Provenance,
}

impl std::ops::Deref for TargetDistribution {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.probs
    }
}

fn normalize(mut v: Vec<f64>) -> Vec<f64> {
    let s: f64 = v.iter().sum();
    for x in &mut v {
        *x /= s;
    }
    v
}

/// Peak centres `μ_j = (j − ½)·2ⁿ/5`, `j = 1..5`, in bin units.
pub fn multimodal_centers(n: usize) -> [f64; 5] {
    let bins = (1usize << n) as f64;
    std::array::from_fn(|j| (j as f64 + 0.5) * bins / 5.0)
}

/// Common peak width `σ = 2ⁿ/20` in bin units.
pub fn multimodal_sigma(n: usize) -> f64 {
    (1usize << n) as f64 / 20.0
}

/// Weights `w_j ~ U(0.5, 1.5)` drawn from `weight_seed`.
pub fn multimodal_weights(weight_seed: u64) -> [f64; 5] {
    let mut rng = RandomStream::new(weight_seed);
    std::array::from_fn(|_| rng.random_range(0.5..1.5))
}

/// Five Gaussian peaks over bins `x = 0..2ⁿ−1` with explicit weights.
pub fn multimodal_1d_with_weights(n: usize, weights: [f64; 5]) -> Result<Vec<f64>> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("1D target needs n ≥ 3, got {n}")));
    }
    let mu = multimodal_centers(n);
    let sigma = multimodal_sigma(n);
    let raw = (0..1usize << n)
        .map(|x| {
            let x = x as f64;
            mu.iter()
                .zip(weights)
                .map(|(m, w)| w * (-(x - m).powi(2) / (2.0 * sigma * sigma)).exp())
                .sum()
        })
        .collect();
    Ok(normalize(raw))
}

pub fn multimodal_1d(n: usize, weight_seed: u64) -> Result<TargetDistribution> {
    let weights = multimodal_weights(weight_seed);
    Ok(TargetDistribution {
        probs: multimodal_1d_with_weights(n, weights)?,
        grid: Grid::Grid1D { n },
        provenance: Provenance::Multimodal1d { weight_seed, weights },
    })
}

fn grid_2d(n_x: usize, n_y: usize, density: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    let mut raw = vec![0.0; 1 << (n_x + n_y)];
    for iy in 0..1usize << n_y {
        for ix in 0..1usize << n_x {
            raw[joint_index(ix, iy, n_x)] = density(bin_center(ix, n_x), bin_center(iy, n_y));
        }
    }
    normalize(raw)
}

/// `p(x, y) ∝ exp[−(x² − 2ρxy + y²) / (2(1 − ρ²))]`.
pub fn bivariate_gaussian_2d(n_x: usize, n_y: usize, rho: f64) -> Result<TargetDistribution> {
    if !(rho.abs() < 1.0) {
        return Err(Error::InvalidArgument(format!("correlation must satisfy |ρ| < 1, got {rho}")));
    }
    if n_x == 0 || n_y == 0 {
        return Err(Error::InvalidArgument("empty register".into()));
    }
    let denom = 2.0 * (1.0 - rho * rho);
    Ok(TargetDistribution {
        probs: grid_2d(n_x, n_y, |x, y| (-(x * x - 2.0 * rho * x * y + y * y) / denom).exp()),
        grid: Grid::Grid2D { n_x, n_y },
        provenance: Provenance::BivariateGaussian2d { rho },
    })
}

pub const MIXTURE_CENTERS: [(f64, f64); 4] = [(-1.5, -1.5), (1.5, -1.5), (-1.5, 1.5), (1.5, 1.5)];
pub const MIXTURE_SIGMA: f64 = 0.5;

/// Equal-weight mixture of four isotropic Gaussians at `(±1.5, ±1.5)`, `σ = 0.5`.
pub fn four_mode_mixture_2d(n_x: usize, n_y: usize) -> Result<TargetDistribution> {
    if n_x < 2 || n_y < 2 {
        return Err(Error::InvalidArgument(format!(
            "mixture target needs n_x, n_y ≥ 2, got {n_x}, {n_y}"
        )));
    }
    let s2 = 2.0 * MIXTURE_SIGMA * MIXTURE_SIGMA;
    Ok(TargetDistribution {
        probs: grid_2d(n_x, n_y, |x, y| {
            MIXTURE_CENTERS
                .iter()
                .map(|(mx, my)| (-((x - mx).powi(2) + (y - my).powi(2)) / s2).exp())
                .sum()
        }),
        grid: Grid::Grid2D { n_x, n_y },
        provenance: Provenance::FourModeMixture2d { sigma: MIXTURE_SIGMA, centers: MIXTURE_CENTERS },
    })
}

/// Declarative target description used by experiment configs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TargetSpec {
    #[serde(rename = "multimodal_1d")]
    Multimodal1d {
        #[serde(default = "default_weight_seed")]
        weight_seed: u64,
    },
    #[serde(rename = "bivariate_gaussian_2d")]
    BivariateGaussian2d { rho: f64 },
    #[serde(rename = "four_mode_mixture_2d")]
    FourModeMixture2d,
}

fn default_weight_seed() -> u64 {
    DEFAULT_WEIGHT_SEED
}

impl TargetSpec {
    /// Builds the target over `bits` measured qubits (split evenly for 2D,
    /// the extra bit going to y when `bits` is odd). `rho` overrides the
    /// spec's correlation when sweeping.
    pub fn build(&self, bits: usize, rho: Option<f64>) -> Result<TargetDistribution> {
        match *self {
            TargetSpec::Multimodal1d { weight_seed } => multimodal_1d(bits, weight_seed),
            TargetSpec::BivariateGaussian2d { rho: r } => {
                bivariate_gaussian_2d(bits / 2, bits - bits / 2, rho.unwrap_or(r))
            }
            TargetSpec::FourModeMixture2d => four_mode_mixture_2d(bits / 2, bits - bits / 2),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            TargetSpec::Multimodal1d { .. } => "multimodal_1d",
            TargetSpec::BivariateGaussian2d { .. } => "bivariate_gaussian_2d",
            TargetSpec::FourModeMixture2d => "four_mode_mixture_2d",
        }
    }
}

/// Bins of a 2D distribution that are at least as large as all eight
/// neighbours and carry at least `min_fraction` of the peak value.
pub fn local_maxima_2d(probs: &[f64], n_x: usize, n_y: usize, min_fraction: f64) -> Vec<usize> {
    let (wx, wy) = (1i64 << n_x, 1i64 << n_y);
    let peak = probs.iter().cloned().fold(0.0, f64::max);
    let mut out = Vec::new();
    for iy in 0..wy {
        for ix in 0..wx {
            let b = joint_index(ix as usize, iy as usize, n_x);
            let v = probs[b];
            if v < min_fraction * peak {
                continue;
            }
            let is_max = (-1..=1).all(|dy: i64| {
                (-1..=1).all(|dx: i64| {
                    let (jx, jy) = (ix + dx, iy + dy);
                    (dx == 0 && dy == 0)
                        || jx < 0
                        || jy < 0
                        || jx >= wx
                        || jy >= wy
                        || probs[joint_index(jx as usize, jy as usize, n_x)] <= v
                })
            });
            if is_max {
                out.push(b);
            }
        }
    }
    out
}

/// Bins whose centres are closest to `(x, y)` (ties all kept).
pub fn nearest_bins(x: f64, y: f64, n_x: usize, n_y: usize) -> Vec<usize> {
    let d = |k: usize, bits: usize, c: f64| (bin_center(k, bits) - c).abs();
    let best = |bits: usize, c: f64| {
        let m = (0..1usize << bits).map(|k| d(k, bits, c)).fold(f64::INFINITY, f64::min);
        (0..1usize << bits).filter(move |&k| d(k, bits, c) <= m + 1e-12).collect::<Vec<_>>()
    };
    let (xs, ys) = (best(n_x, x), best(n_y, y));
    let mut out = Vec::new();
    for &iy in &ys {
        for &ix in &xs {
            out.push(joint_index(ix, iy, n_x));
        }
    }
    out
}

/// True when every significant local maximum sits in the nearest-bin block
/// of some mixture centre and every centre's block holds one.
pub fn modes_resolved(probs: &[f64], n_x: usize, n_y: usize) -> bool {
    let maxima = local_maxima_2d(probs, n_x, n_y, 0.1);
    let blocks: Vec<Vec<usize>> = MIXTURE_CENTERS.iter().map(|&(x, y)| nearest_bins(x, y, n_x, n_y)).collect();
    maxima.iter().all(|m| blocks.iter().any(|b| b.contains(m)))
        && blocks.iter().all(|b| maxima.iter().any(|m| b.contains(m)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sum(p: &[f64]) -> f64 {
        p.iter().sum()
    }

    #[test]
    fn multimodal_geometry() {
        let c = multimodal_centers(6);
        for (a, b) in c.iter().zip([6.4, 19.2, 32.0, 44.8, 57.6]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((multimodal_sigma(6) - 3.2).abs() < 1e-15);
        let t = multimodal_1d(6, DEFAULT_WEIGHT_SEED).unwrap();
        assert_eq!(t.len(), 64);
        assert!((sum(&t) - 1.0).abs() < 1e-12);
        let Provenance::Multimodal1d { weights, .. } = t.provenance else { unreachable!() };
        assert!(weights.iter().all(|w| (0.5..1.5).contains(w)));
        assert!(multimodal_1d(2, 0).is_err());
    }

    #[test]
    fn equal_weights_mirror_symmetry() {
        // Oracle: evaluate the unnormalized mixture directly at x and 2ⁿ − x;
        // the centres are symmetric about 2ⁿ⁻¹.
        let n = 6;
        let p = multimodal_1d_with_weights(n, [1.0; 5]).unwrap();
        let bins = 1usize << n;
        let raw = |x: f64| -> f64 {
            (1..=5)
                .map(|j| {
                    let mu = (j as f64 - 0.5) * bins as f64 / 5.0;
                    let s = bins as f64 / 20.0;
                    (-(x - mu).powi(2) / (2.0 * s * s)).exp()
                })
                .sum()
        };
        for x in 1..bins {
            assert!((raw(x as f64) - raw((bins - x) as f64)).abs() < 1e-12);
            assert!((p[x] / p[bins - x] - 1.0).abs() < 1e-12);
        }
        // the 0..2ⁿ−1 index mirror is only approximate (half-bin offset)
        for x in 0..bins {
            assert!((p[x] - p[bins - 1 - x]).abs() < 0.2 * p.iter().cloned().fold(0.0, f64::max));
        }
    }

    #[test]
    fn gaussian_independent_case_factorizes() {
        let t = bivariate_gaussian_2d(3, 3, 0.0).unwrap();
        let (mut mx, mut my) = (vec![0.0; 8], vec![0.0; 8]);
        for b in 0..64 {
            let (ix, iy) = split_index(b, 3);
            mx[ix] += t[b];
            my[iy] += t[b];
        }
        for b in 0..64 {
            let (ix, iy) = split_index(b, 3);
            assert!((t[b] - mx[ix] * my[iy]).abs() < 1e-12);
        }
        assert!(bivariate_gaussian_2d(3, 3, 1.0).is_err());
    }

    #[test]
    fn gaussian_correlation_on_grid() {
        // Direct moment computation of the discretized distribution.
        let t = bivariate_gaussian_2d(4, 4, 0.9).unwrap();
        let (mut ex, mut ey, mut exx, mut eyy, mut exy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for b in 0..256 {
            let (ix, iy) = split_index(b, 4);
            let (x, y) = (bin_center(ix, 4), bin_center(iy, 4));
            ex += t[b] * x;
            ey += t[b] * y;
            exx += t[b] * x * x;
            eyy += t[b] * y * y;
            exy += t[b] * x * y;
        }
        let r = (exy - ex * ey) / ((exx - ex * ex) * (eyy - ey * ey)).sqrt();
        assert!(r > 0.8, "{r}");
        for b in 0..256 {
            let (ix, iy) = split_index(b, 4);
            assert!((t[b] - t[joint_index(iy, ix, 4)]).abs() < 1e-15);
        }
    }

    #[test]
    fn mixture_symmetry_and_modes() {
        let t = four_mode_mixture_2d(4, 4).unwrap();
        assert!((sum(&t) - 1.0).abs() < 1e-12);
        for b in 0..256 {
            let (ix, iy) = split_index(b, 4);
            assert!((t[b] - t[joint_index(15 - ix, iy, 4)]).abs() < 1e-15);
            assert!((t[b] - t[joint_index(ix, 15 - iy, 4)]).abs() < 1e-15);
        }
        // Oracle: brute-force argmax of the density over each quadrant.
        let maxima = local_maxima_2d(&t, 4, 4, 0.0);
        assert_eq!(maxima.len(), 4);
        for q in 0..4 {
            let (sx, sy) = (q & 1, q >> 1);
            let best = (0..256)
                .filter(|&b| {
                    let (ix, iy) = split_index(b, 4);
                    (ix >= 8) as usize == sx && (iy >= 8) as usize == sy
                })
                .max_by(|&a, &b| t[a].total_cmp(&t[b]))
                .unwrap();
            assert!(maxima.contains(&best));
            let (cx, cy) = MIXTURE_CENTERS.iter().find(|c| (c.0 > 0.0) as usize == sx && (c.1 > 0.0) as usize == sy).unwrap();
            assert!(nearest_bins(*cx, *cy, 4, 4).contains(&best));
        }
        assert!(modes_resolved(&t, 4, 4));
        assert!(modes_resolved(&four_mode_mixture_2d(3, 3).unwrap(), 3, 3));
        assert!(!modes_resolved(&bivariate_gaussian_2d(3, 3, 0.0).unwrap(), 3, 3));
    }

    #[test]
    fn index_layout_roundtrip() {
        for n_x in 1..5 {
            for b in 0..1usize << (n_x + 3) {
                let (ix, iy) = split_index(b, n_x);
                assert_eq!(joint_index(ix, iy, n_x), b);
            }
        }
        assert!((bin_center(0, 3) + 2.625).abs() < 1e-15);
        assert!((bin_center(7, 3) - 2.625).abs() < 1e-15);
    }
}
