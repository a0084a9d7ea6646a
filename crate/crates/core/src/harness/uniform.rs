//! Grid-based control of the uniform distance between concave functions on
//! `[0, 1]`.
//!
//! For concave `f` and grid spacing `1/G` (`G >= 2`), every `x` in a cell
//! `[t_i, t_{i+1}]` satisfies `|f(x) - f(t_i)| <= 2 η(f)` where `η` is the
//! largest jump between neighboring grid values. Hence
//! `sup |c - c_n| <= max_i |c(t_i) - c_n(t_i)| + 2η(c) + 2η(c_n)`.

/// `{0, 1/G, ..., 1}`.
pub fn unit_grid(divisions: usize) -> Vec<f64> {
    (0..=divisions)
        .map(|i| i as f64 / divisions as f64)
        .collect()
}

/// `max_i |a_i - b_i|`.
pub fn sup_norm_gap(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// `η(f) = max_i |f(t_i) - f(t_{i+1})|`.
pub fn grid_oscillation(values: &[f64]) -> f64 {
    values
        .windows(2)
        .map(|w| (w[0] - w[1]).abs())
        .fold(0.0, f64::max)
}

/// Bound on `sup_{[0,1]} |c - c_n|` from grid values of two concave functions.
pub fn concave_uniform_bound(c: &[f64], c_n: &[f64]) -> f64 {
    assert!(c.len() >= 3, "need at least two grid cells");
    sup_norm_gap(c, c_n) + 2.0 * grid_oscillation(c) + 2.0 * grid_oscillation(c_n)
}
