//! Distribution metrics in nats.

use crate::error::{Error, Result};

/// Floor applied to model probabilities inside logarithms.
pub const PROB_FLOOR: f64 = 1e-12;

/// Default additive smoothing for shot-based distributions.
pub const DEFAULT_SMOOTHING: f64 = 0.5;

fn same_len(p: &[f64], q: &[f64]) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch { expected: p.len(), got: q.len() });
    }
    Ok(())
}

/// `−Σ p ln max(q, 10⁻¹²)`.
pub fn nll(p: &[f64], q: &[f64]) -> Result<f64> {
    same_len(p, q)?;
    Ok(p.iter()
        .zip(q)
        .filter(|(&px, _)| px > 0.0)
        .map(|(&px, &qx)| -px * qx.max(PROB_FLOOR).ln())
        .sum())
}

/// `−Σ p ln p` with `0·ln 0 = 0`.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum()
}

/// `D(p‖q) = Σ p ln(p / max(q, 10⁻¹²))`.
pub fn kld(p: &[f64], q: &[f64]) -> Result<f64> {
    same_len(p, q)?;
    Ok(p.iter()
        .zip(q)
        .filter(|(&px, _)| px > 0.0)
        .map(|(&px, &qx)| px * (px.ln() - qx.max(PROB_FLOOR).ln()))
        .sum())
}

/// `(count_x + α) / (shots + α·bins)`.
pub fn empirical_distribution(counts: &[u64], smoothing_alpha: f64) -> Result<Vec<f64>> {
    let shots: u64 = counts.iter().sum();
    if shots == 0 {
        return Err(Error::InvalidArgument("empirical distribution of zero shots".into()));
    }
    if !(smoothing_alpha.is_finite() && smoothing_alpha >= 0.0) {
        return Err(Error::InvalidArgument(format!("smoothing must be ≥ 0, got {smoothing_alpha}")));
    }
    let denom = shots as f64 + smoothing_alpha * counts.len() as f64;
    Ok(counts.iter().map(|&c| (c as f64 + smoothing_alpha) / denom).collect())
}
