//! Critical exponents, the Pohozaev identity audit, refinement trends,
//! embedding constants and the compactness probe.

mod embedding;
mod pohozaev;
mod trend;

pub use embedding::{
    compactness_probe, embedding_constant, embedding_ratio, oscillating_sequence, sine_coarse_space,
    CompactnessReport, EmbeddingReport, DEFAULT_EMBEDDING_ITERS,
};
pub use pohozaev::{pohozaev_coefficient, pohozaev_evaluate, pohozaev_samples, PohozaevReport};
pub use trend::{nonexistence_trend, trend_verdict, TrendReport, TrendVerdict};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// `p_crit = (4 + 5k)/k` and `2_k = (4 + 6k)/k = p_crit + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalExponents<T> {
    pub p_crit: T,
    pub two_k: T,
}

pub fn critical_exponents<T: Real>(k: T) -> Result<CriticalExponents<T>> {
    if !(k > T::zero()) || !k.is_finite() {
        return Err(Error::InvalidInput(format!("k must be positive, got {k}")));
    }
    Ok(CriticalExponents {
        p_crit: (T::lit(4.0) + T::lit(5.0) * k) / k,
        two_k: (T::lit(4.0) + T::lit(6.0) * k) / k,
    })
}
