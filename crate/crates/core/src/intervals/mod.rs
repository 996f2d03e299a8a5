//! Interval constructions: Clopper-Pearson, the randomized interval built on
//! `Z = Y + V`, its two-variable and discrete-level variants, the
//! data-randomized interval driven by the ones-pattern, and the interval
//! based on the two-group split estimator.
//!
//! Upper endpoints solve `P_theta(Z <= z) = alpha/2` and lower endpoints solve
//! `P_theta(Z >= z) = alpha/2`, where for a randomized statistic
//!
//! ```text
//! P(Z <= z) = F(y-1) + v f(y)          P(Z >= z) = (1-v) f(y) + P(Y > y)
//! ```
//!
//! Setting `v = 1` (upper) or `v = 0` (lower) gives the Clopper-Pearson
//! equations.

mod korn;
mod split;

pub use korn::{korn_interval, korn_rank, unrank_pattern, BernoulliSequence, KornRank, KornRanker};
pub use split::{
    split_design, split_sample_cdf, split_sample_interval, split_sample_sf, thetahat_support,
    SplitDesign,
};

use num::rational::Ratio;
use serde::{Serialize, Serializer};

use crate::error::{check_alpha, check_unit, domain, Result};
use crate::numerics::{
    solve_decreasing, solve_increasing, BinomialModel, WideCount, MAX_TRIALS, SOLVER_TOL,
};

/// Exact level value such as `W = rank / C(n, y)`.
pub type Level = Ratio<u128>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClopperPearson,
    Stevens,
    StevensGeneralized,
    DiscreteAux,
    Korn,
    SplitSample,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::ClopperPearson => "clopper-pearson",
            Method::Stevens => "stevens",
            Method::StevensGeneralized => "stevens-generalized",
            Method::DiscreteAux => "discrete-aux",
            Method::Korn => "korn",
            Method::SplitSample => "split-sample",
        }
    }
}

/// Auxiliary values an interval was computed from.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AuxInputs {
    None,
    Uniform {
        v: f64,
    },
    Pair {
        v_lower: f64,
        v_upper: f64,
    },
    Levels {
        #[serde(serialize_with = "ser_level")]
        w: Level,
        #[serde(serialize_with = "ser_level")]
        w_tilde: Level,
    },
    Korn {
        bits: String,
        rank: WideCount,
        count: WideCount,
    },
    Split {
        n1: u32,
        n2: u32,
        y1: u32,
        y2: u32,
    },
}

pub(crate) fn ser_level<S: Serializer>(
    l: &Level,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(&format_args!("{}/{}", l.numer(), l.denom()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalInputs {
    pub n: u32,
    pub y: u32,
    pub alpha: f64,
    pub aux: AuxInputs,
}

/// A confidence interval `[lower, upper]` inside `[0, 1]`, with the inputs
/// needed to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
    pub method: Method,
    pub inputs: IntervalInputs,
    /// Set only by [`stevens_generalized`] when independent auxiliary values
    /// put the lower endpoint above the upper one. The raw pair is kept.
    pub crossed: bool,
}

impl Interval {
    fn new(lower: f64, upper: f64, method: Method, inputs: IntervalInputs) -> Self {
        Interval {
            lower,
            upper,
            method,
            inputs,
            crossed: lower > upper,
        }
    }

    pub fn length(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, theta: f64) -> bool {
        self.lower <= theta && theta <= self.upper
    }

    /// `self` lies inside `outer`, allowing `tol` of solver slack at each end.
    pub fn within(&self, outer: &Interval, tol: f64) -> bool {
        self.lower >= outer.lower - tol && self.upper <= outer.upper + tol
    }
}

pub(crate) fn check_counts(n: u32, y: u32) -> Result<()> {
    if n == 0 || n > MAX_TRIALS {
        return Err(domain("n", n, format!("[1, {MAX_TRIALS}]")));
    }
    if y > n {
        return Err(domain("y", y, format!("[0, {n}]")));
    }
    Ok(())
}

/// Upper endpoint `u_R(y, v)`: 1 when `y = n` and `v > alpha/2`, 0 when
/// `P_0(Z <= z) <= alpha/2` (only `y = 0`, `v <= alpha/2`), otherwise the root
/// of `F(y-1) + v f(y) = alpha/2`.
pub(crate) fn upper_endpoint(n: u32, y: u32, v: f64, alpha: f64) -> Result<f64> {
    let target = alpha / 2.0;
    if y == n && v > target {
        return Ok(1.0);
    }
    let below = |t: f64| {
        let m = BinomialModel::unchecked(n, t);
        m.cdf_unchecked(i64::from(y) - 1) + v * m.pmf_unchecked(y)
    };
    if below(0.0) <= target {
        return Ok(0.0);
    }
    // at y = n, v = alpha/2 the root is exactly 1; rounding may put it past
    if below(1.0) >= target {
        return Ok(1.0);
    }
    solve_decreasing(below, 0.0, 1.0, target, SOLVER_TOL)
}

/// Lower endpoint `l_R(y, v)`: 0 when `y = 0` and `v < 1 - alpha/2`, 1 when
/// `P_1(Z >= z) <= alpha/2` (only `y = n`, `v >= 1 - alpha/2`), otherwise the
/// root of `(1-v) f(y) + P(Y > y) = alpha/2`.
pub(crate) fn lower_endpoint(n: u32, y: u32, v: f64, alpha: f64) -> Result<f64> {
    let target = alpha / 2.0;
    if y == 0 && v < 1.0 - target {
        return Ok(0.0);
    }
    let above = |t: f64| {
        let m = BinomialModel::unchecked(n, t);
        (1.0 - v) * m.pmf_unchecked(y) + m.sf_unchecked(i64::from(y))
    };
    if above(1.0) <= target {
        return Ok(1.0);
    }
    // mirror case: y = 0, v = 1 - alpha/2 has its root exactly at 0
    if above(0.0) >= target {
        return Ok(0.0);
    }
    solve_increasing(above, 0.0, 1.0, target, SOLVER_TOL)
}

/// Clopper-Pearson interval: `upper` solves `F(y) = alpha/2` (1 at `y = n`),
/// `lower` solves `P(Y >= y) = alpha/2` (0 at `y = 0`).
pub fn cp_interval(n: u32, y: u32, alpha: f64) -> Result<Interval> {
    check_counts(n, y)?;
    check_alpha(alpha)?;
    let target = alpha / 2.0;
    let upper = if y == n {
        1.0
    } else {
        solve_decreasing(
            |t| BinomialModel::unchecked(n, t).cdf_unchecked(i64::from(y)),
            0.0,
            1.0,
            target,
            SOLVER_TOL,
        )?
    };
    let lower = if y == 0 {
        0.0
    } else {
        solve_increasing(
            |t| {
                let m = BinomialModel::unchecked(n, t);
                m.pmf_unchecked(y) + m.sf_unchecked(i64::from(y))
            },
            0.0,
            1.0,
            target,
            SOLVER_TOL,
        )?
    };
    Ok(Interval::new(
        lower,
        upper,
        Method::ClopperPearson,
        IntervalInputs {
            n,
            y,
            alpha,
            aux: AuxInputs::None,
        },
    ))
}

/// Randomized interval `[l_R(y, v), u_R(y, v)]` from `Z = Y + V`.
pub fn stevens_interval(n: u32, y: u32, v: f64, alpha: f64) -> Result<Interval> {
    check_counts(n, y)?;
    check_alpha(alpha)?;
    check_unit("v", v)?;
    Ok(Interval::new(
        lower_endpoint(n, y, v, alpha)?,
        upper_endpoint(n, y, v, alpha)?,
        Method::Stevens,
        IntervalInputs {
            n,
            y,
            alpha,
            aux: AuxInputs::Uniform { v },
        },
    ))
}

/// `[l_R(y, v_lower), u_R(y, v_upper)]` with separate auxiliary values for
/// each end. A crossed pair is returned as is with `crossed = true`.
pub fn stevens_generalized(
    n: u32,
    y: u32,
    v_lower: f64,
    v_upper: f64,
    alpha: f64,
) -> Result<Interval> {
    check_counts(n, y)?;
    check_alpha(alpha)?;
    check_unit("v_lower", v_lower)?;
    check_unit("v_upper", v_upper)?;
    Ok(Interval::new(
        lower_endpoint(n, y, v_lower, alpha)?,
        upper_endpoint(n, y, v_upper, alpha)?,
        Method::StevensGeneralized,
        IntervalInputs {
            n,
            y,
            alpha,
            aux: AuxInputs::Pair { v_lower, v_upper },
        },
    ))
}

pub(crate) fn level_f64(l: &Level) -> f64 {
    *l.numer() as f64 / *l.denom() as f64
}

/// `[l_R(y, w_tilde), u_R(y, w)]` for a discrete auxiliary variable on the
/// levels `1/M, ..., M/M` with `w_tilde = w - 1/M` and `M > 1`.
pub fn discrete_aux_interval(
    n: u32,
    y: u32,
    w: Level,
    w_tilde: Level,
    alpha: f64,
) -> Result<Interval> {
    check_counts(n, y)?;
    check_alpha(alpha)?;
    let zero = Level::from_integer(0);
    let one = Level::from_integer(1);
    if w <= zero || w > one {
        return Err(domain("w", fmt_level(&w), "(0, 1]"));
    }
    if w_tilde < zero || w_tilde >= one {
        return Err(domain("w_tilde", fmt_level(&w_tilde), "[0, 1)"));
    }
    let step = w - w_tilde;
    if *step.numer() != 1 || *step.denom() < 2 || !(w * step.recip()).is_integer() {
        return Err(domain(
            "w - w_tilde",
            fmt_level(&step),
            "1/M for an integer M > 1 with w on the grid 1/M, ..., M/M",
        ));
    }
    Ok(levels_interval(n, y, w, w_tilde, alpha, Method::DiscreteAux)?.with_aux(
        AuxInputs::Levels { w, w_tilde },
    ))
}

/// Shared by the discrete and data-randomized constructions; no level checks.
pub(crate) fn levels_interval(
    n: u32,
    y: u32,
    w: Level,
    w_tilde: Level,
    alpha: f64,
    method: Method,
) -> Result<Interval> {
    Ok(Interval::new(
        lower_endpoint(n, y, level_f64(&w_tilde), alpha)?,
        upper_endpoint(n, y, level_f64(&w), alpha)?,
        method,
        IntervalInputs {
            n,
            y,
            alpha,
            aux: AuxInputs::Levels { w, w_tilde },
        },
    ))
}

impl Interval {
    fn with_aux(mut self, aux: AuxInputs) -> Self {
        self.inputs.aux = aux;
        self
    }
}

pub(crate) fn fmt_level(l: &Level) -> String {
    format!("{}/{}", l.numer(), l.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    const A: f64 = 0.05;

    fn lv(a: u128, b: u128) -> Level {
        Level::new(a, b)
    }

    #[test]
    fn cp_boundaries() {
        let top = cp_interval(10, 10, A).unwrap();
        assert_eq!(top.upper, 1.0);
        let bottom = cp_interval(10, 0, A).unwrap();
        assert_eq!(bottom.lower, 0.0);
        // y = 0: (1 - u)^n = alpha/2
        assert!((bottom.upper - (1.0 - 0.025f64.powf(0.1))).abs() < 1e-12);
        // y = n: l^n = alpha/2
        assert!((top.lower - 0.025f64.powf(0.1)).abs() < 1e-12);
    }

    #[test]
    fn cp_rejects_bad_inputs() {
        assert!(cp_interval(10, 3, 0.0).is_err());
        assert!(cp_interval(10, 3, 1.0).is_err());
        assert!(cp_interval(10, 11, 0.05).is_err());
        assert!(cp_interval(0, 0, 0.05).is_err());
    }

    #[test]
    fn stevens_boundary_rules() {
        let s = stevens_interval(10, 10, 0.9, A).unwrap();
        assert_eq!(s.upper, 1.0);
        let s = stevens_interval(10, 10, 0.01, A).unwrap();
        assert!(s.upper < 1.0);
        let s = stevens_interval(10, 0, 0.5, A).unwrap();
        assert_eq!(s.lower, 0.0);
        let s = stevens_interval(10, 0, 0.99, A).unwrap();
        assert!(s.lower > 0.0);
        // Below alpha/2 the upper confidence set at y = 0 is empty.
        let s = stevens_interval(10, 0, 0.01, A).unwrap();
        assert_eq!((s.lower, s.upper), (0.0, 0.0));
        // Mirror image at y = n.
        let s = stevens_interval(10, 10, 0.99, A).unwrap();
        assert_eq!((s.lower, s.upper), (1.0, 1.0));
        assert!(stevens_interval(10, 3, 1.5, A).is_err());
        assert!(stevens_interval(10, 3, -0.1, A).is_err());
    }

    #[test]
    fn stevens_reduces_to_cp() {
        for y in 0..=10 {
            let cp = cp_interval(10, y, A).unwrap();
            let (u1, l0) = (
                stevens_interval(10, y, 1.0, A).unwrap().upper,
                stevens_interval(10, y, 0.0, A).unwrap().lower,
            );
            assert!((u1 - cp.upper).abs() < 1e-12);
            assert!((l0 - cp.lower).abs() < 1e-12);
            if y >= 1 {
                let prev = cp_interval(10, y - 1, A).unwrap();
                let u0 = stevens_interval(10, y, 0.0, A).unwrap().upper;
                assert!((u0 - prev.upper).abs() < 1e-12);
            }
            if y < 10 {
                let next = cp_interval(10, y + 1, A).unwrap();
                let l1 = stevens_interval(10, y, 1.0, A).unwrap().lower;
                assert!((l1 - next.lower).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn stevens_strictly_inside_cp_at_mid_v() {
        let cp = cp_interval(10, 3, A).unwrap();
        let s = stevens_interval(10, 3, 0.5, A).unwrap();
        assert!(cp.lower < s.lower && s.upper < cp.upper, "{s:?} vs {cp:?}");
    }

    #[test]
    fn generalized_degenerate_cases() {
        for y in 0..=10 {
            for v in [0.0, 0.2, 0.5, 0.97, 1.0] {
                let g = stevens_generalized(10, y, v, v, A).unwrap();
                let s = stevens_interval(10, y, v, A).unwrap();
                assert_eq!((g.lower, g.upper), (s.lower, s.upper));
            }
            let g = stevens_generalized(10, y, 0.0, 1.0, A).unwrap();
            let cp = cp_interval(10, y, A).unwrap();
            assert!((g.lower - cp.lower).abs() < 1e-12 && (g.upper - cp.upper).abs() < 1e-12);
        }
    }

    #[test]
    fn generalized_antithetic_lower_decreases() {
        let mut prev = f64::INFINITY;
        for i in 0..=100 {
            let vu = f64::from(i) / 100.0;
            let g = stevens_generalized(10, 3, 1.0 - vu, vu, A).unwrap();
            assert!(g.lower < prev, "v_u = {vu}");
            prev = g.lower;
        }
    }

    #[test]
    fn generalized_flags_crossing() {
        let g = stevens_generalized(10, 0, 0.99, 0.01, A).unwrap();
        assert!(g.crossed);
        assert!(g.lower > g.upper);
        assert!(!stevens_generalized(10, 3, 0.4, 0.6, A).unwrap().crossed);
    }

    #[test]
    fn discrete_levels() {
        let cp = cp_interval(10, 3, A).unwrap();
        // w = 1, w_tilde = 0 is the single-level block; the level path reduces to CP.
        let d = levels_interval(10, 3, lv(1, 1), lv(0, 1), A, Method::DiscreteAux).unwrap();
        assert!((d.lower - cp.lower).abs() < 1e-12 && (d.upper - cp.upper).abs() < 1e-12);
        let d = discrete_aux_interval(10, 3, lv(2, 4), lv(1, 4), A).unwrap();
        assert!(d.within(&cp, 0.0));
        assert!(cp.lower < d.lower && d.upper < cp.upper);
    }

    #[test]
    fn discrete_rejects_bad_levels() {
        // M = 1 is a single level, not a randomization.
        assert!(discrete_aux_interval(10, 3, lv(1, 1), lv(0, 1), A).is_err());
        assert!(discrete_aux_interval(10, 3, lv(0, 1), lv(0, 1), A).is_err());
        assert!(discrete_aux_interval(10, 3, lv(3, 4), lv(1, 4), A).is_err());
        assert!(discrete_aux_interval(10, 3, lv(5, 4), lv(4, 4), A).is_err());
        assert!(discrete_aux_interval(10, 3, lv(5, 6), lv(1, 2), A).is_err());
        assert!(discrete_aux_interval(10, 3, lv(3, 5), lv(1, 5), A).is_err());
        // 2/3 and 1/2 sit on the sixths grid: a valid M = 6 pair.
        assert!(discrete_aux_interval(10, 3, lv(2, 3), lv(1, 2), A).is_ok());
    }
}
