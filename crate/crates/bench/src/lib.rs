//! Benchmark inputs shared by the criterion targets.

/// Sample points used by the zeta and Gamma-tilde benchmarks.
pub const SAMPLE_XS: [f64; 4] = [0.2, 0.7, 1.3, 2.9];
