use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// Multinomial shot counts for `probs`.
///
/// Drawn bin by bin from the conditional binomials
/// `n_k ~ Bin(shots − Σ_{j<k} n_j, p_k / Σ_{j≥k} p_j)`.
pub fn sample_counts(probs: &[f64], num_shots: u64, rng: &mut RandomStream) -> Result<Vec<u64>> {
    if let Some(p) = probs.iter().find(|&&p| p < -1e-12 || !p.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "probability {p} is negative or non-finite"
        )));
    }
    let total: f64 = probs.iter().map(|p| p.max(0.0)).sum();
    if (total - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidArgument(format!(
            "probabilities sum to {total}, not 1"
        )));
    }
    let mut counts = vec![0u64; probs.len()];
    let mut remaining = num_shots;
    let mut mass_left = total;
    for (k, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        let p = p.max(0.0);
        if k + 1 == probs.len() {
            counts[k] = remaining;
            break;
        }
        let cond = if mass_left > 0.0 { (p / mass_left).clamp(0.0, 1.0) } else { 0.0 };
        let n = if cond >= 1.0 {
            remaining
        } else if cond <= 0.0 {
            0
        } else {
            Binomial::new(remaining, cond)
                .expect("conditional probability is in (0, 1)")
                .sample(rng)
        };
        counts[k] = n;
        remaining -= n;
        mass_left -= p;
    }
    Ok(counts)
}
