//! Interval based on the split estimator `(Y1/n1 + Y2/n2) / 2` for a coprime
//! split `n = n1 + n2`.
//!
//! Everything is decided on the integer numerator `T = y1*n2 + y2*n1`, so the
//! estimator is `T / (2 n1 n2)` and no comparison ever depends on floating
//! point ties.

use num::integer::gcd;
use num::rational::Ratio;
use serde::Serialize;

use super::{check_alpha, AuxInputs, Interval, IntervalInputs, Method};
use crate::error::{domain, Result};
use crate::numerics::{solve_decreasing, solve_increasing, BinomialModel, MAX_TRIALS, SOLVER_TOL};

/// Group sizes of a coprime split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SplitDesign {
    n1: u32,
    n2: u32,
}

impl SplitDesign {
    pub fn new(n1: u32, n2: u32) -> Result<Self> {
        if n1 == 0 || n2 == 0 {
            return Err(domain("n1, n2", format!("{n1}, {n2}"), "positive sizes"));
        }
        if n1 + n2 > MAX_TRIALS {
            return Err(domain("n1 + n2", n1 + n2, format!("[2, {MAX_TRIALS}]")));
        }
        if gcd(n1, n2) != 1 {
            return Err(domain("gcd(n1, n2)", gcd(n1, n2), "1"));
        }
        Ok(Self { n1, n2 })
    }

    pub fn n1(&self) -> u32 {
        self.n1
    }

    pub fn n2(&self) -> u32 {
        self.n2
    }

    pub fn n(&self) -> u32 {
        self.n1 + self.n2
    }

    /// `T = y1*n2 + y2*n1`.
    pub fn numerator(&self, y1: u32, y2: u32) -> u64 {
        u64::from(y1) * u64::from(self.n2) + u64::from(y2) * u64::from(self.n1)
    }

    /// `2 n1 n2`, the common denominator of the estimator.
    pub fn denominator(&self) -> u64 {
        2 * u64::from(self.n1) * u64::from(self.n2)
    }

    pub fn max_numerator(&self) -> u64 {
        self.numerator(self.n1, self.n2)
    }

    /// Exact estimate for the outcome `(y1, y2)`.
    pub fn estimate(&self, y1: u32, y2: u32) -> Ratio<u64> {
        Ratio::new(self.numerator(y1, y2), self.denominator())
    }

    /// All outcomes `(y1, y2)` in row-major order.
    pub fn outcomes(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..=self.n1).flat_map(move |a| (0..=self.n2).map(move |b| (a, b)))
    }

    fn check_outcome(&self, y1: u32, y2: u32) -> Result<()> {
        if y1 > self.n1 {
            return Err(domain("y1", y1, format!("[0, {}]", self.n1)));
        }
        if y2 > self.n2 {
            return Err(domain("y2", y2, format!("[0, {}]", self.n2)));
        }
        Ok(())
    }
}

/// Coprime split of `n` with the groups as close in size as possible,
/// `n1 <= n2`.
pub fn split_design(n: u32) -> Result<SplitDesign> {
    if !(3..=MAX_TRIALS).contains(&n) {
        return Err(domain("n", n, format!("[3, {MAX_TRIALS}]")));
    }
    (1..=n / 2)
        .rev()
        .find(|&k| gcd(k, n - k) == 1)
        .map(|k| SplitDesign { n1: k, n2: n - k })
        .ok_or_else(|| domain("n", n, "a value with a coprime split"))
}

fn group_pmfs(design: &SplitDesign, theta: f64) -> (Vec<f64>, Vec<f64>) {
    (
        BinomialModel::unchecked(design.n1, theta).pmf_vec(),
        BinomialModel::unchecked(design.n2, theta).pmf_vec(),
    )
}

fn tail_mass(design: &SplitDesign, theta: f64, keep: impl Fn(u64) -> bool) -> f64 {
    let (p1, p2) = group_pmfs(design, theta);
    let mut acc = 0.0;
    for (a, pa) in p1.iter().enumerate() {
        let mut row = 0.0;
        for (b, pb) in p2.iter().enumerate() {
            if keep(design.numerator(a as u32, b as u32)) {
                row += pb;
            }
        }
        acc += pa * row;
    }
    acc.min(1.0)
}

/// `P_theta(T <= t_numerator)`.
pub fn split_sample_cdf(design: &SplitDesign, theta: f64, t_numerator: i64) -> Result<f64> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(domain("theta", theta, "[0, 1]"));
    }
    if t_numerator < 0 {
        return Ok(0.0);
    }
    if t_numerator as u64 >= design.max_numerator() {
        return Ok(1.0);
    }
    Ok(tail_mass(design, theta, |t| t <= t_numerator as u64))
}

/// `P_theta(T >= t_numerator)`.
pub fn split_sample_sf(design: &SplitDesign, theta: f64, t_numerator: i64) -> Result<f64> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(domain("theta", theta, "[0, 1]"));
    }
    if t_numerator <= 0 {
        return Ok(1.0);
    }
    Ok(tail_mass(design, theta, |t| t >= t_numerator as u64))
}

/// Intersection of the upper and lower `1 - alpha/2` intervals from tests
/// based on the split estimator.
pub fn split_sample_interval(
    y1: u32,
    y2: u32,
    design: &SplitDesign,
    alpha: f64,
) -> Result<Interval> {
    design.check_outcome(y1, y2)?;
    check_alpha(alpha)?;
    let target = alpha / 2.0;
    let t_obs = design.numerator(y1, y2);
    let upper = if t_obs == design.max_numerator() {
        1.0
    } else {
        solve_decreasing(
            |th| tail_mass(design, th, |t| t <= t_obs),
            0.0,
            1.0,
            target,
            SOLVER_TOL,
        )?
    };
    let lower = if t_obs == 0 {
        0.0
    } else {
        solve_increasing(
            |th| tail_mass(design, th, |t| t >= t_obs),
            0.0,
            1.0,
            target,
            SOLVER_TOL,
        )?
    };
    Ok(Interval::new(
        lower,
        upper,
        Method::SplitSample,
        IntervalInputs {
            n: design.n(),
            y: y1 + y2,
            alpha,
            aux: AuxInputs::Split {
                n1: design.n1,
                n2: design.n2,
                y1,
                y2,
            },
        },
    ))
}

/// Distinct values of the split estimator, ascending.
pub fn thetahat_support(design: &SplitDesign) -> Vec<Ratio<u64>> {
    let mut nums: Vec<u64> = design
        .outcomes()
        .map(|(a, b)| design.numerator(a, b))
        .collect();
    nums.sort_unstable();
    nums.dedup();
    nums.into_iter()
        .map(|t| Ratio::new(t, design.denominator()))
        .collect()
}
