#![allow(dead_code)]

use fracmt_core::{GridFunction, Params};

pub fn half() -> Params {
    Params::new(0.5).unwrap()
}

pub fn tent(radius: f64, n_cells: usize) -> GridFunction {
    GridFunction::uniform(-radius, radius, n_cells, |x| 1.0 - (x / radius).abs()).unwrap()
}

/// Even, non-increasing on `[0, radius]`, zero at `±radius`. Node `j` on the
/// right half holds `Σ_{k ≥ j} drops[k]`.
pub fn even_decreasing(drops: &[f64], radius: f64) -> GridFunction {
    let m = drops.len();
    let h = radius / m as f64;
    let mut right = vec![0.0; m + 1];
    for j in (0..m).rev() {
        right[j] = right[j + 1] + drops[j].abs();
    }
    let nodes: Vec<f64> = (0..=2 * m).map(|i| (i as f64 - m as f64) * h).collect();
    let values: Vec<f64> = (0..=2 * m)
        .map(|i| right[(i as isize - m as isize).unsigned_abs()])
        .collect();
    GridFunction::new(nodes, values).unwrap()
}

/// Uniform grid on `[0, 1]` with zero end values and the given interior values.
pub fn interior(values: &[f64]) -> GridFunction {
    let n = values.len() + 1;
    let mut all = Vec::with_capacity(n + 1);
    all.push(0.0);
    all.extend_from_slice(values);
    all.push(0.0);
    let nodes = (0..=n).map(|i| i as f64 / n as f64).collect();
    GridFunction::new(nodes, all).unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        ((a - b) / b).abs()
    }
}
