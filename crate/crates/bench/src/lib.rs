//! Inputs shared by the benchmarks in `benches/`.

use fracmt_core::{GridFunction, MTConfig, Normalization, Params, Variant};

pub fn half() -> Params {
    Params::new(0.5).expect("s = 1/2 is valid")
}

/// Smooth bump on `[−1, 1]` with `n_cells` uniform cells.
pub fn bump(n_cells: usize) -> GridFunction {
    GridFunction::uniform(-1.0, 1.0, n_cells, |x| (1.0 - x * x).powi(2)).expect("valid grid")
}

/// Deterministic non-symmetric profile with zero ends.
pub fn rough(n_cells: usize) -> GridFunction {
    GridFunction::uniform(0.0, 1.0, n_cells, |x| {
        (x * (1.0 - x) * (1.0 + 0.5 * (37.0 * x).sin())).abs()
    })
    .expect("valid grid")
}

pub fn exp_config(alpha: f64) -> MTConfig {
    MTConfig::new(alpha, half(), Normalization::Seminorm, Variant::ExpInterval)
        .expect("valid config")
}
