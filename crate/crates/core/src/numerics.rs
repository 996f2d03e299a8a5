//! Binomial probability kernels, exact binomial coefficients and a bisection
//! solver for monotone functions.
//!
//! Trial counts are capped at [`MAX_TRIALS`]; every coefficient up to that cap
//! fits in a `u128` with room to spare, so counting is exact throughout.

use std::fmt;
use std::ops::Add;
use std::sync::OnceLock;

use serde::{Serialize, Serializer};

use crate::error::{domain, Error, Result};

/// Largest supported number of Bernoulli trials.
pub const MAX_TRIALS: u32 = 64;

/// Default bracket width at which bisection stops; zero bisects down to
/// adjacent floats.
pub const SOLVER_TOL: f64 = 0.0;

/// Hard cap on bisection steps.
pub const SOLVER_MAX_ITER: usize = 200;

/// `Binomial(n, theta)`, the law of the number of successes `Y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinomialModel {
    n: u32,
    theta: f64,
}

impl BinomialModel {
    pub fn new(n: u32, theta: f64) -> Result<Self> {
        if n == 0 || n > MAX_TRIALS {
            return Err(domain("n", n, format!("[1, {MAX_TRIALS}]")));
        }
        if !(0.0..=1.0).contains(&theta) {
            return Err(domain("theta", theta, "[0, 1]"));
        }
        Ok(Self { n, theta })
    }

    /// Internal constructor for callers that already validated `n` and `theta`.
    pub(crate) fn unchecked(n: u32, theta: f64) -> Self {
        debug_assert!(n >= 1 && n <= MAX_TRIALS && (0.0..=1.0).contains(&theta));
        Self { n, theta }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `P(Y = y)`.
    pub fn pmf(&self, y: u32) -> Result<f64> {
        if y > self.n {
            return Err(domain("y", y, format!("[0, {}]", self.n)));
        }
        Ok(self.pmf_unchecked(y))
    }

    /// `P(Y <= y)` for `-1 <= y <= n`, with `F(-1) = 0` and `F(n) = 1`.
    pub fn cdf(&self, y: i64) -> Result<f64> {
        if y < -1 || y > i64::from(self.n) {
            return Err(domain("y", y, format!("[-1, {}]", self.n)));
        }
        Ok(self.cdf_unchecked(y))
    }

    /// `P(Y > y) = 1 - F(y)` for `-1 <= y <= n`, summed over the upper tail
    /// rather than formed by cancellation.
    pub fn sf(&self, y: i64) -> Result<f64> {
        if y < -1 || y > i64::from(self.n) {
            return Err(domain("y", y, format!("[-1, {}]", self.n)));
        }
        Ok(self.sf_unchecked(y))
    }

    pub(crate) fn pmf_unchecked(&self, y: u32) -> f64 {
        let (n, t) = (self.n, self.theta);
        if t == 0.0 {
            return if y == 0 { 1.0 } else { 0.0 };
        }
        if t == 1.0 {
            return if y == n { 1.0 } else { 0.0 };
        }
        let log_p = ln_choose(n, y) + f64::from(y) * t.ln() + f64::from(n - y) * (-t).ln_1p();
        log_p.exp()
    }

    pub(crate) fn cdf_unchecked(&self, y: i64) -> f64 {
        if y < 0 {
            return 0.0;
        }
        if y >= i64::from(self.n) {
            return 1.0;
        }
        // Sum whichever tail is lighter; the complement of a small upper tail
        // keeps values near 1 monotone in theta.
        if f64::from(self.n) * self.theta <= y as f64 {
            return 1.0 - self.upper_tail(y as u32 + 1);
        }
        let acc: f64 = (0..=y as u32).map(|j| self.pmf_unchecked(j)).sum();
        acc.min(1.0)
    }

    fn upper_tail(&self, from: u32) -> f64 {
        let acc: f64 = (from..=self.n).map(|j| self.pmf_unchecked(j)).sum();
        acc.min(1.0)
    }

    pub(crate) fn sf_unchecked(&self, y: i64) -> f64 {
        if y >= i64::from(self.n) {
            return 0.0;
        }
        if y < 0 {
            return 1.0;
        }
        if f64::from(self.n) * self.theta > y as f64 {
            let lower: f64 = (0..=y as u32).map(|j| self.pmf_unchecked(j)).sum();
            return 1.0 - lower.min(1.0);
        }
        self.upper_tail(y as u32 + 1)
    }

    /// All point masses `P(Y = 0), ..., P(Y = n)`.
    pub fn pmf_vec(&self) -> Vec<f64> {
        (0..=self.n).map(|y| self.pmf_unchecked(y)).collect()
    }
}

/// `P(Y = y)` for `Y ~ Binomial(n, theta)`.
pub fn binom_pmf(model: &BinomialModel, y: u32) -> Result<f64> {
    model.pmf(y)
}

/// `P(Y <= y)` for `Y ~ Binomial(n, theta)`; accepts `y = -1`.
pub fn binom_cdf(model: &BinomialModel, y: i64) -> Result<f64> {
    model.cdf(y)
}

/// Exact non-negative integer wide enough for every count this crate forms,
/// including `2^64` and sums of binomial coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct WideCount(pub u128);

impl WideCount {
    pub const ZERO: WideCount = WideCount(0);
    pub const ONE: WideCount = WideCount(1);

    pub fn get(self) -> u128 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }
}

impl Add for WideCount {
    type Output = WideCount;

    fn add(self, rhs: WideCount) -> WideCount {
        WideCount(self.0.checked_add(rhs.0).expect("WideCount overflow"))
    }
}

impl std::iter::Sum for WideCount {
    fn sum<I: Iterator<Item = WideCount>>(iter: I) -> WideCount {
        iter.fold(WideCount::ZERO, |a, b| a + b)
    }
}

impl From<u128> for WideCount {
    fn from(v: u128) -> Self {
        WideCount(v)
    }
}

impl fmt::Display for WideCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

// JSON numbers lose precision past 2^53, so counts travel as decimal strings.
impl Serialize for WideCount {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(&self.0)
    }
}

/// Exact binomial coefficient `C(n, k)` for `0 <= k <= n <= 64`.
pub fn choose(n: u32, k: u32) -> Result<WideCount> {
    if n > MAX_TRIALS {
        return Err(domain("n", n, format!("[0, {MAX_TRIALS}]")));
    }
    if k > n {
        return Err(domain("k", k, format!("[0, {n}]")));
    }
    Ok(WideCount(choose_u128(n, k)))
}

pub(crate) fn choose_u128(n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    // Each partial product is itself a binomial coefficient times (n - i),
    // so the division is exact and nothing approaches u128::MAX for n <= 64.
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    acc
}

fn ln_choose(n: u32, k: u32) -> f64 {
    static TABLE: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        (0..=MAX_TRIALS)
            .map(|m| (0..=m).map(|j| (choose_u128(m, j) as f64).ln()).collect())
            .collect()
    });
    table[n as usize][k as usize]
}

/// Finds `x` in `[lo, hi]` with `f(x) = target` for a continuous, strictly
/// decreasing `f`, by plain bisection down to a bracket of width `tol`
/// (or [`SOLVER_MAX_ITER`] halvings). Returns the end of the final bracket
/// where `f <= target`, so points strictly beyond the root see `f < target`
/// as evaluated.
pub fn solve_decreasing<F>(f: F, lo: f64, hi: f64, target: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (f_lo, f_hi) = (f(lo), f(hi));
    if !(f_lo >= target && target >= f_hi) {
        return Err(Error::Bracket {
            lo,
            hi,
            target,
            f_lo,
            f_hi,
        });
    }
    let (mut a, mut b) = (lo, hi);
    for _ in 0..SOLVER_MAX_ITER {
        if b - a <= tol {
            break;
        }
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm > target {
            a = mid;
        } else if fm < target {
            b = mid;
        } else {
            return Ok(mid);
        }
    }
    Ok(b)
}

/// [`solve_decreasing`] for an increasing function.
pub(crate) fn solve_increasing<F>(f: F, lo: f64, hi: f64, target: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    solve_decreasing(|x| -f(x), lo, hi, -target, tol)
}
