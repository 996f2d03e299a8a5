//! Containment of randomized and data-randomized intervals in the
//! Clopper-Pearson interval, checked exhaustively.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_alpha, check_unit, domain, Result};
use crate::intervals::{
    cp_interval, korn_interval, BernoulliSequence, Interval, KornRanker,
};
use crate::numerics::choose_u128;

/// Solver slack allowed when comparing endpoints: two roots found to
/// `1e-12` are "equal" within this and "strictly ordered" beyond it.
pub const ENDPOINT_TOL: f64 = 1e-10;

/// Largest `n` for which the `2^n` patterns are enumerated.
pub const MAX_ENUMERATION_N: u32 = 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Containment {
    pub y: u32,
    /// Auxiliary value (randomized) or pattern rank (data-randomized).
    pub aux: String,
    pub lower: f64,
    pub upper: f64,
    pub cp_lower: f64,
    pub cp_upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominationReport {
    pub method: String,
    pub n: u32,
    pub alpha: f64,
    pub pairs_checked: u64,
    /// Pairs whose interval pokes outside Clopper-Pearson.
    pub violations: Vec<Containment>,
    /// Pairs whose strict/equal pattern at either end differs from the
    /// boundary rules (randomized interval only).
    pub strictness_violations: Vec<Containment>,
    /// `min (u_CP - u) + (l - l_CP)` over all pairs.
    pub worst_slack: f64,
    pub worst: Option<Containment>,
    /// Pairs with the upper end equal to `u_CP` within [`ENDPOINT_TOL`].
    pub upper_ties: u64,
    pub lower_ties: u64,
}

impl DominationReport {
    pub fn dominates(&self) -> bool {
        self.violations.is_empty() && self.strictness_violations.is_empty()
    }
}

struct Tally {
    report: DominationReport,
}

impl Tally {
    fn new(method: &str, n: u32, alpha: f64) -> Self {
        Tally {
            report: DominationReport {
                method: method.into(),
                n,
                alpha,
                pairs_checked: 0,
                violations: Vec::new(),
                strictness_violations: Vec::new(),
                worst_slack: f64::INFINITY,
                worst: None,
                upper_ties: 0,
                lower_ties: 0,
            },
        }
    }

    /// `expect_equal` gives, per end, whether the interval should share the
    /// Clopper-Pearson endpoint; `None` skips the strictness check.
    fn add(&mut self, c: Containment, expect_equal: Option<(bool, bool)>) {
        let r = &mut self.report;
        r.pairs_checked += 1;
        let du = c.cp_upper - c.upper;
        let dl = c.lower - c.cp_lower;
        let up_tie = du.abs() <= ENDPOINT_TOL;
        let lo_tie = dl.abs() <= ENDPOINT_TOL;
        r.upper_ties += u64::from(up_tie);
        r.lower_ties += u64::from(lo_tie);
        if du < -ENDPOINT_TOL || dl < -ENDPOINT_TOL {
            r.violations.push(c.clone());
        }
        if let Some((eu, el)) = expect_equal {
            if eu != up_tie || el != lo_tie {
                r.strictness_violations.push(c.clone());
            }
        }
        if du + dl < r.worst_slack {
            r.worst_slack = du + dl;
            r.worst = Some(c);
        }
    }
}

fn cp_table(n: u32, alpha: f64) -> Result<Vec<Interval>> {
    (0..=n).map(|y| cp_interval(n, y, alpha)).collect()
}

/// Check `[l_R(y, v), u_R(y, v)] ⊆ [l_CP(y), u_CP(y)]` for every `y` and every
/// `v` in `v_grid`, together with the pattern of strict and tied ends:
///
/// * the upper ends tie exactly when `v = 1`, or `y = n` and `v >= alpha/2`
///   (both are 1);
/// * the lower ends tie exactly when `v = 0`, or `y = 0` and `v <= 1 - alpha/2`
///   (both are 0).
///
/// Everywhere else the randomized end is strictly inside.
pub fn domination_report(n: u32, alpha: f64, v_grid: &[f64]) -> Result<DominationReport> {
    check_alpha(alpha)?;
    for &v in v_grid {
        check_unit("v", v)?;
    }
    let cps = cp_table(n, alpha)?;
    let half = alpha / 2.0;
    let rows = (0..=n)
        .into_par_iter()
        .map(|y| {
            v_grid
                .iter()
                .map(|&v| {
                    let iv = crate::intervals::stevens_interval(n, y, v, alpha)?;
                    let eu = v == 1.0 || (y == n && v >= half);
                    let el = v == 0.0 || (y == 0 && v <= 1.0 - half);
                    Ok((containment(&iv, &cps[y as usize], format!("v={v}")), (eu, el)))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = Tally::new("stevens", n, alpha);
    for (c, e) in rows.into_iter().flatten() {
        t.add(c, Some(e));
    }
    Ok(t.report)
}

fn containment(iv: &Interval, cp: &Interval, aux: String) -> Containment {
    Containment {
        y: iv.inputs.y,
        aux,
        lower: iv.lower,
        upper: iv.upper,
        cp_lower: cp.lower,
        cp_upper: cp.upper,
    }
}

fn check_enumerable(n: u32) -> Result<()> {
    if n == 0 || n > MAX_ENUMERATION_N {
        return Err(domain("n", n, format!("[1, {MAX_ENUMERATION_N}] for full enumeration")));
    }
    Ok(())
}

fn pattern(n: u32, mask: u64) -> BernoulliSequence {
    BernoulliSequence::new((0..n).map(|i| mask >> i & 1 == 1).collect())
        .expect("n within the enumeration cap")
}

/// Every one of the `2^n` patterns gives a data-randomized interval inside the
/// Clopper-Pearson interval for its count.
pub fn korn_domination_report(n: u32, alpha: f64) -> Result<DominationReport> {
    check_enumerable(n)?;
    check_alpha(alpha)?;
    let cps = cp_table(n, alpha)?;
    let rows = (0..1u64 << n)
        .into_par_iter()
        .map(|mask| {
            let seq = pattern(n, mask);
            let iv = korn_interval(&seq, alpha)?;
            let cp = &cps[seq.y() as usize];
            Ok(containment(&iv, cp, seq.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = Tally::new("korn", n, alpha);
    for c in rows {
        t.add(c, None);
    }
    Ok(t.report)
}

/// Distribution of the rank levels for one count `y`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelCheck {
    pub y: u32,
    pub count: u128,
    /// The ranks over all patterns with `y` ones are exactly `1..=count`.
    pub ranks_exact: bool,
    /// `P(W <= x) <= x <= P(W_tilde <= x)` at every level and midpoint.
    pub cdf_ordered: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniformityReport {
    pub n: u32,
    pub patterns: u64,
    pub per_y: Vec<LevelCheck>,
}

impl UniformityReport {
    pub fn holds(&self) -> bool {
        self.per_y.iter().all(|c| c.ranks_exact && c.cdf_ordered)
    }
}

/// Enumerate all `2^n` patterns and verify that, given `Y = y`, the rank
/// level `W` takes each value `k / C(n, y)` exactly once and that `W` is
/// stochastically at least and `W_tilde` at most a uniform variable.
pub fn korn_uniformity(n: u32) -> Result<UniformityReport> {
    check_enumerable(n)?;
    let ranker = KornRanker::new(n)?;
    let mut ranks: Vec<Vec<u128>> = vec![Vec::new(); n as usize + 1];
    for mask in 0..1u64 << n {
        let seq = pattern(n, mask);
        let kr = ranker.rank(&seq)?;
        ranks[seq.y() as usize].push(kr.rank.0);
    }
    let per_y = ranks
        .into_iter()
        .enumerate()
        .map(|(y, mut r)| {
            let count = choose_u128(n, y as u32);
            r.sort_unstable();
            let ranks_exact = r.len() as u128 == count && r.iter().copied().eq(1..=count);
            LevelCheck {
                y: y as u32,
                count,
                ranks_exact,
                cdf_ordered: cdf_ordered(&r, count),
            }
        })
        .collect();
    Ok(UniformityReport {
        n,
        patterns: 1 << n,
        per_y,
    })
}

/// With sorted ranks `r`, `P(W <= x) = #{k : k/c <= x} / m` and
/// `P(W_tilde <= x) = #{k : (k-1)/c <= x} / m`; checked at every
/// `x = j/(2c)`, i.e. at each level and each midpoint, in integers.
fn cdf_ordered(r: &[u128], c: u128) -> bool {
    let m = r.len() as u128;
    (0..=2 * c).all(|j| {
        let w = r.partition_point(|&k| 2 * k <= j) as u128;
        let wt = r.partition_point(|&k| 2 * (k - 1) <= j) as u128;
        // w/m <= j/(2c) <= wt/m
        2 * c * w <= j * m && j * m <= 2 * c * wt
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v_grid(points: usize) -> Vec<f64> {
        (0..points).map(|i| i as f64 / (points - 1) as f64).collect()
    }

    #[test]
    fn stevens_dominates_cp() {
        let r = domination_report(10, 0.05, &v_grid(101)).unwrap();
        assert!(r.dominates(), "{:?}", r.violations.first().or(r.strictness_violations.first()));
        assert_eq!(r.pairs_checked, 11 * 101);
        assert!(r.worst_slack > 0.0);
    }

    #[test]
    fn alpha_half_on_grid_ties() {
        // alpha/2 = 0.05 and 1 - alpha/2 = 0.95 are grid points here
        let r = domination_report(7, 0.1, &v_grid(101)).unwrap();
        assert!(r.dominates(), "{:?}", r.strictness_violations.first());
    }

    #[test]
    fn ties_only_at_reduction_endpoints_for_interior_y() {
        let r = domination_report(4, 0.05, &[0.0, 0.5, 1.0]).unwrap();
        // upper ties: v = 1 for every y, plus y = n at v = 0.5
        assert_eq!(r.upper_ties, 5 + 1);
        // lower ties: v = 0 for every y, plus y = 0 at v = 0.5
        assert_eq!(r.lower_ties, 5 + 1);
    }

    #[test]
    fn korn_patterns_dominated() {
        let r = korn_domination_report(8, 0.05).unwrap();
        assert!(r.dominates());
        assert_eq!(r.pairs_checked, 256);
    }

    #[test]
    fn rank_levels_are_uniform() {
        let r = korn_uniformity(6).unwrap();
        assert!(r.holds());
        assert_eq!(r.per_y.iter().map(|c| c.count).sum::<u128>(), 64);
    }

    #[test]
    fn cdf_check_catches_skew() {
        assert!(cdf_ordered(&[1, 2, 3], 3));
        assert!(!cdf_ordered(&[1, 1, 3], 3));
        assert!(!cdf_ordered(&[2, 3, 3], 3));
    }

    #[test]
    fn enumeration_cap() {
        assert!(korn_uniformity(21).is_err());
        assert!(korn_domination_report(0, 0.05).is_err());
    }
}
