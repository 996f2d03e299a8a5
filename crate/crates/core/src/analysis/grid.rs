//! Theta grids for coverage sweeps.

use crate::error::{check_alpha, domain, Result};
use crate::intervals::cp_interval;

/// Interior points of the default grid.
pub const DEFAULT_GRID_POINTS: usize = 999;

/// Offset placed on either side of each Clopper-Pearson endpoint.
pub const JUMP_OFFSET: f64 = 1e-9;

/// `points` equally spaced values `i / (points + 1)`, `i = 1..=points`.
pub fn uniform_grid(points: usize) -> Vec<f64> {
    let d = (points + 1) as f64;
    (1..=points).map(|i| i as f64 / d).collect()
}

/// Equally spaced interior points plus both sides of every Clopper-Pearson
/// endpoint for `(n, alpha)`, so the jumps of the exact curves are resolved.
pub fn default_theta_grid(n: u32, alpha: f64) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    let mut grid = uniform_grid(DEFAULT_GRID_POINTS);
    for y in 0..=n {
        let cp = cp_interval(n, y, alpha)?;
        for e in [cp.lower, cp.upper] {
            grid.extend([e - JUMP_OFFSET, e + JUMP_OFFSET]);
        }
    }
    grid.retain(|&t| t > 0.0 && t < 1.0);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    Ok(grid)
}

/// Grids must be strictly increasing and lie inside `(0, 1)`.
pub fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(domain("theta_grid", "[]", "at least one point"));
    }
    if let Some(&t) = grid.iter().find(|&&t| !(t > 0.0 && t < 1.0)) {
        return Err(domain("theta", t, "(0, 1)"));
    }
    if let Some(w) = grid.windows(2).find(|w| w[0] >= w[1]) {
        return Err(domain(
            "theta_grid",
            format!("{} then {}", w[0], w[1]),
            "strictly increasing values",
        ));
    }
    Ok(())
}
