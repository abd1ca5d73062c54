//! Shared inputs for the criterion benches.

use zpf_core::params::RotationConfig;
use zpf_core::DEFAULT_INV_ALPHA;

/// A slow, moderately damped free orbit inside every small-β gate.
pub fn reference_config() -> RotationConfig {
    RotationConfig::with_gamma_omega(0.01, 1.0, 0.0, 1.0 / DEFAULT_INV_ALPHA).expect("valid reference config")
}

/// Lags spread over one revolution, avoiding the coincident point.
pub fn lags(count: usize) -> Vec<f64> {
    (1..=count).map(|i| std::f64::consts::PI * i as f64 / (count + 1) as f64).collect()
}
