use faer::Mat;
use rand_distr::{Distribution, StandardNormal};

use super::DenseMatrix;
use crate::rng::RandomStream;
use crate::C64;

/// Haar-distributed unitary of dimension `dim`.
///
/// QR-factorizes a complex Ginibre matrix (i.i.d. entries with independent
/// `N(0, 1/2)` real and imaginary parts) and multiplies column `j` of `Q` by
/// the phase of `R_jj`, which removes the bias of the factorization and
/// leaves `Q` distributed with the unitarily invariant measure.
pub fn haar_unitary(dim: usize, rng: &mut RandomStream) -> DenseMatrix {
    assert!(dim >= 2, "Haar unitaries need dim ≥ 2");
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut entries = Vec::with_capacity(dim * dim);
    for _ in 0..dim * dim {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        entries.push(C64::new(re * scale, im * scale));
    }
    let z = Mat::from_fn(dim, dim, |i, j| entries[i * dim + j]);
    let qr = z.qr();
    let q = qr.compute_Q();
    let r = qr.R();
    let phases: Vec<C64> = (0..dim)
        .map(|j| {
            let d = r[(j, j)];
            let n = d.norm();
            if n > 0.0 { d / n } else { C64::new(1.0, 0.0) }
        })
        .collect();
    DenseMatrix::from_fn(dim, |i, j| q[(i, j)] * phases[j])
}
