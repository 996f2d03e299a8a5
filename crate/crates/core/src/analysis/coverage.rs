//! Exact non-coverage probabilities and expected lengths.
//!
//! Nothing here samples. Randomized procedures use the measure of the
//! auxiliary values that cause a miss: `theta > u_R(y, v)` exactly when
//! `F(y-1) + v f(y) < alpha/2`, i.e. when `v` is below
//! `r(y) = (alpha/2 - F(y-1)) / f(y)`, and symmetrically for the lower end
//! with `r'(y) = (alpha/2 - P(Y > y)) / f(y)` and `1 - v` in place of `v`.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::check_grid;
use crate::error::{check_alpha, domain, Error, Result};
use crate::intervals::{
    cp_interval, lower_endpoint, split_sample_interval, upper_endpoint, SplitDesign,
};
use crate::numerics::{choose_u128, BinomialModel, MAX_TRIALS};
use crate::quadrature::{GaussLegendre, DEFAULT_NODES};

/// Largest total number of levels `sum_y M(y)` for which discrete expected
/// lengths are tabulated; each level costs two root solves.
pub const MAX_LENGTH_LEVELS: u128 = 1 << 22;

/// A procedure whose exact coverage and length can be swept over theta.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum MethodSpec {
    ClopperPearson,
    Stevens,
    /// Two-variable randomized interval with `v_lower = 1 - v_upper`.
    Antithetic,
    /// Discrete auxiliary variable on `1/M, ..., M/M` for every `y`.
    Discrete { levels: u128 },
    /// Levels `M(y) = C(n, y)` from the ones-pattern rank.
    Korn,
    Split { n1: u32, n2: u32 },
}

impl MethodSpec {
    pub fn tag(&self) -> String {
        match self {
            MethodSpec::ClopperPearson => "clopper-pearson".into(),
            MethodSpec::Stevens => "stevens".into(),
            MethodSpec::Antithetic => "antithetic".into(),
            MethodSpec::Discrete { levels } => format!("discrete-{levels}"),
            MethodSpec::Korn => "korn".into(),
            MethodSpec::Split { n1, n2 } => format!("split-{n1}-{n2}"),
        }
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta < 1.0 {
        Ok(())
    } else {
        Err(domain("theta", theta, "(0, 1)"))
    }
}

fn check_n(n: u32) -> Result<()> {
    if n == 0 || n > MAX_TRIALS {
        return Err(domain("n", n, format!("[1, {MAX_TRIALS}]")));
    }
    Ok(())
}

/// Upper and lower miss mass, each `sum_y min(f(y), max(0, alpha/2 - tail))`,
/// which is `sum_y f(y) clamp(r, 0, 1)` without dividing by tiny `f(y)`.
fn randomized_mass(pmf: &[f64], alpha: f64) -> (f64, f64) {
    let half = alpha / 2.0;
    let mut upper = 0.0;
    let mut below = 0.0;
    for &f in pmf {
        upper += (half - below).clamp(0.0, f);
        below += f;
    }
    let mut lower = 0.0;
    let mut above = 0.0;
    for &f in pmf.iter().rev() {
        lower += (half - above).clamp(0.0, f);
        above += f;
    }
    (upper, lower)
}

/// `#{k in 1..=m : k/m < ratio}`, the number of levels that miss.
pub(crate) fn levels_below(ratio: f64, m: u128) -> u128 {
    if ratio <= 0.0 {
        return 0;
    }
    if ratio > 1.0 {
        return m;
    }
    let c = (ratio * m as f64).ceil() - 1.0;
    if c <= 0.0 {
        0
    } else {
        (c as u128).min(m)
    }
}

/// Same reduction with the auxiliary value restricted to `M(y)` levels.
fn discrete_mass(pmf: &[f64], alpha: f64, levels: &[u128]) -> (f64, f64) {
    let half = alpha / 2.0;
    let n = pmf.len();
    let mut upper = 0.0;
    let mut below = 0.0;
    for (y, &f) in pmf.iter().enumerate() {
        if f > 0.0 {
            let m = levels[y];
            upper += f * (levels_below((half - below) / f, m) as f64 / m as f64);
        }
        below += f;
    }
    let mut lower = 0.0;
    let mut above = 0.0;
    for y in (0..n).rev() {
        let f = pmf[y];
        if f > 0.0 {
            let m = levels[y];
            lower += f * (levels_below((half - above) / f, m) as f64 / m as f64);
        }
        above += f;
    }
    (upper, lower)
}

/// `(P(theta > u_CP(Y)), P(theta < l_CP(Y)))`.
pub fn noncoverage_cp(n: u32, alpha: f64, theta: f64) -> Result<(f64, f64)> {
    check_theta(theta)?;
    Procedure::new(MethodSpec::ClopperPearson, n, alpha)?.noncoverage(theta)
}

/// Exact non-coverage of the randomized interval with `V ~ U(0, 1)`; both
/// components equal `alpha/2` up to rounding.
pub fn noncoverage_randomized_exact(n: u32, alpha: f64, theta: f64) -> Result<(f64, f64)> {
    check_n(n)?;
    check_alpha(alpha)?;
    check_theta(theta)?;
    Ok(randomized_mass(&BinomialModel::unchecked(n, theta).pmf_vec(), alpha))
}

/// Exact non-coverage of `[l_R(y, 1 - v), u_R(y, v)]` with `v ~ U(0, 1)`.
/// The lower miss `{1 - (1 - v) < r'}` is `{v < r'}`, of the same measure.
pub fn noncoverage_antithetic_exact(n: u32, alpha: f64, theta: f64) -> Result<(f64, f64)> {
    noncoverage_randomized_exact(n, alpha, theta)
}

/// Exact non-coverage with the auxiliary variable on `M(y)` equally likely
/// levels: `w in {1/M, ..., 1}` for the upper end, `w - 1/M` for the lower.
pub fn noncoverage_discrete_exact<M>(n: u32, alpha: f64, theta: f64, m: M) -> Result<(f64, f64)>
where
    M: Fn(u32) -> u128,
{
    check_n(n)?;
    check_alpha(alpha)?;
    check_theta(theta)?;
    let levels = level_vec(n, m)?;
    Ok(discrete_mass(
        &BinomialModel::unchecked(n, theta).pmf_vec(),
        alpha,
        &levels,
    ))
}

fn level_vec<M: Fn(u32) -> u128>(n: u32, m: M) -> Result<Vec<u128>> {
    (0..=n)
        .map(|y| match m(y) {
            0 => Err(domain("M(y)", 0, "positive level counts")),
            k => Ok(k),
        })
        .collect()
}

/// Exact non-coverage of the split-sample interval by enumerating `(y1, y2)`.
pub fn noncoverage_split(design: &SplitDesign, alpha: f64, theta: f64) -> Result<(f64, f64)> {
    check_theta(theta)?;
    let spec = MethodSpec::Split {
        n1: design.n1(),
        n2: design.n2(),
    };
    Procedure::new(spec, design.n(), alpha)?.noncoverage(theta)
}

/// Expected interval length at `theta`.
pub fn expected_length(spec: &MethodSpec, n: u32, alpha: f64, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    Procedure::new(spec.clone(), n, alpha)?.expected_length(theta)
}

#[derive(Debug)]
enum Tables {
    Cp { lower: Vec<f64>, upper: Vec<f64> },
    Randomized,
    Levels(Vec<u128>),
    Split {
        design: SplitDesign,
        // indexed by the numerator of the estimate
        intervals: Vec<(f64, f64)>,
    },
}

/// A method fixed at `(n, alpha)` with whatever does not depend on theta
/// computed once. Expected-length tables are built on first use.
#[derive(Debug)]
pub struct Procedure {
    spec: MethodSpec,
    n: u32,
    alpha: f64,
    tables: Tables,
    lengths: OnceLock<Vec<f64>>,
}

impl Procedure {
    pub fn new(spec: MethodSpec, n: u32, alpha: f64) -> Result<Self> {
        check_n(n)?;
        check_alpha(alpha)?;
        let tables = match &spec {
            MethodSpec::ClopperPearson => {
                let ivs = (0..=n)
                    .map(|y| cp_interval(n, y, alpha))
                    .collect::<Result<Vec<_>>>()?;
                Tables::Cp {
                    lower: ivs.iter().map(|i| i.lower).collect(),
                    upper: ivs.iter().map(|i| i.upper).collect(),
                }
            }
            MethodSpec::Stevens | MethodSpec::Antithetic => Tables::Randomized,
            MethodSpec::Discrete { levels } => {
                if *levels < 2 {
                    return Err(domain("M", levels, "integers > 1"));
                }
                Tables::Levels(vec![*levels; n as usize + 1])
            }
            MethodSpec::Korn => Tables::Levels((0..=n).map(|y| choose_u128(n, y)).collect()),
            MethodSpec::Split { n1, n2 } => {
                let design = SplitDesign::new(*n1, *n2)?;
                if design.n() != n {
                    return Err(domain("n", n, format!("n1 + n2 = {}", design.n())));
                }
                let mut intervals = vec![(f64::NAN, f64::NAN); design.max_numerator() as usize + 1];
                let mut outcomes: Vec<(u32, u32)> = design.outcomes().collect();
                outcomes.sort_by_key(|&(a, b)| design.numerator(a, b));
                outcomes.dedup_by_key(|&mut (a, b)| design.numerator(a, b));
                let solved = outcomes
                    .par_iter()
                    .map(|&(a, b)| split_sample_interval(a, b, &design, alpha))
                    .collect::<Result<Vec<_>>>()?;
                for (&(a, b), iv) in outcomes.iter().zip(solved) {
                    intervals[design.numerator(a, b) as usize] = (iv.lower, iv.upper);
                }
                Tables::Split { design, intervals }
            }
        };
        Ok(Self {
            spec,
            n,
            alpha,
            tables,
            lengths: OnceLock::new(),
        })
    }

    pub fn spec(&self) -> &MethodSpec {
        &self.spec
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Level counts `M(y)` for discrete procedures.
    pub fn levels(&self) -> Option<&[u128]> {
        match &self.tables {
            Tables::Levels(m) => Some(m),
            _ => None,
        }
    }

    /// `(upper, lower)` non-coverage at `theta`.
    pub fn noncoverage(&self, theta: f64) -> Result<(f64, f64)> {
        check_theta(theta)?;
        let pmf = BinomialModel::unchecked(self.n, theta).pmf_vec();
        Ok(match &self.tables {
            Tables::Cp { lower, upper } => {
                let mut up = 0.0;
                let mut lo = 0.0;
                for (y, &f) in pmf.iter().enumerate() {
                    if upper[y] < theta {
                        up += f;
                    }
                    if lower[y] > theta {
                        lo += f;
                    }
                }
                (up, lo)
            }
            Tables::Randomized => randomized_mass(&pmf, self.alpha),
            Tables::Levels(m) => discrete_mass(&pmf, self.alpha, m),
            Tables::Split { design, intervals } => {
                let p1 = BinomialModel::unchecked(design.n1(), theta).pmf_vec();
                let p2 = BinomialModel::unchecked(design.n2(), theta).pmf_vec();
                let mut up = 0.0;
                let mut lo = 0.0;
                for (a, fa) in p1.iter().enumerate() {
                    let (mut row_up, mut row_lo) = (0.0, 0.0);
                    for (b, fb) in p2.iter().enumerate() {
                        let (l, u) = intervals[design.numerator(a as u32, b as u32) as usize];
                        if u < theta {
                            row_up += fb;
                        }
                        if l > theta {
                            row_lo += fb;
                        }
                    }
                    up += fa * row_up;
                    lo += fa * row_lo;
                }
                (up, lo)
            }
        })
    }

    /// Expected length at `theta`.
    pub fn expected_length(&self, theta: f64) -> Result<f64> {
        check_theta(theta)?;
        let lengths = self.lengths()?;
        Ok(match &self.tables {
            Tables::Split { design, .. } => {
                let p1 = BinomialModel::unchecked(design.n1(), theta).pmf_vec();
                let p2 = BinomialModel::unchecked(design.n2(), theta).pmf_vec();
                let mut acc = 0.0;
                for (a, fa) in p1.iter().enumerate() {
                    let row: f64 = p2
                        .iter()
                        .enumerate()
                        .map(|(b, fb)| fb * lengths[design.numerator(a as u32, b as u32) as usize])
                        .sum();
                    acc += fa * row;
                }
                acc
            }
            _ => BinomialModel::unchecked(self.n, theta)
                .pmf_vec()
                .iter()
                .zip(lengths)
                .map(|(f, l)| f * l)
                .sum(),
        })
    }

    /// Conditional expected length given `Y = y` (given the numerator of the
    /// estimate for split designs).
    pub fn lengths(&self) -> Result<&[f64]> {
        if let Some(l) = self.lengths.get() {
            return Ok(l);
        }
        let computed = self.compute_lengths()?;
        Ok(self.lengths.get_or_init(|| computed))
    }

    fn compute_lengths(&self) -> Result<Vec<f64>> {
        let (n, alpha) = (self.n, self.alpha);
        match (&self.spec, &self.tables) {
            (_, Tables::Cp { lower, upper }) => {
                Ok(upper.iter().zip(lower).map(|(u, l)| u - l).collect())
            }
            (_, Tables::Split { intervals, .. }) => {
                Ok(intervals.iter().map(|(l, u)| u - l).collect())
            }
            (spec, Tables::Randomized) => {
                let antithetic = matches!(spec, MethodSpec::Antithetic);
                let quad = GaussLegendre::new(DEFAULT_NODES);
                (0..=n)
                    .into_par_iter()
                    .map(|y| randomized_mean_length(&quad, n, y, alpha, antithetic))
                    .collect()
            }
            (_, Tables::Levels(m)) => {
                let total: u128 = m.iter().sum();
                if total > MAX_LENGTH_LEVELS {
                    return Err(Error::Unsupported(format!(
                        "expected length over {total} levels exceeds the cap of {MAX_LENGTH_LEVELS}"
                    )));
                }
                (0..=n)
                    .map(|y| levels_mean_length(n, y, m[y as usize], alpha))
                    .collect()
            }
        }
    }
}

/// `int_0^1 u_R(y, v) - l_R(y, v') dv` with `v' = v` or `1 - v`, split where
/// the boundary rules switch on so each piece is smooth.
fn randomized_mean_length(
    quad: &GaussLegendre,
    n: u32,
    y: u32,
    alpha: f64,
    antithetic: bool,
) -> Result<f64> {
    let half = alpha / 2.0;
    let breaks = [0.0, half, 1.0 - half, 1.0];
    let mut err = None;
    let upper = quad.integrate_pieces(&breaks, |v| {
        upper_endpoint(n, y, v, alpha).unwrap_or_else(|e| {
            err.get_or_insert(e);
            f64::NAN
        })
    });
    let lower = quad.integrate_pieces(&breaks, |v| {
        let vl = if antithetic { 1.0 - v } else { v };
        lower_endpoint(n, y, vl, alpha).unwrap_or_else(|e| {
            err.get_or_insert(e);
            f64::NAN
        })
    });
    match err {
        Some(e) => Err(e),
        None => Ok(upper - lower),
    }
}

/// `(1/M) sum_k u_R(y, k/M) - l_R(y, (k-1)/M)`.
fn levels_mean_length(n: u32, y: u32, m: u128, alpha: f64) -> Result<f64> {
    let mf = m as f64;
    let sum = (1..=m)
        .into_par_iter()
        .map(|k| {
            let u = upper_endpoint(n, y, k as f64 / mf, alpha)?;
            let l = lower_endpoint(n, y, (k - 1) as f64 / mf, alpha)?;
            Ok(u - l)
        })
        .collect::<Result<Vec<f64>>>()?
        .iter()
        .sum::<f64>();
    Ok(sum / mf)
}

/// Exact non-coverage and expected length of one method over a theta grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageCurve {
    pub method: String,
    pub alpha: f64,
    pub n: u32,
    pub theta_grid: Vec<f64>,
    pub upper_noncoverage: Vec<f64>,
    pub lower_noncoverage: Vec<f64>,
    pub expected_length: Vec<f64>,
}

impl CoverageCurve {
    pub fn len(&self) -> usize {
        self.theta_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta_grid.is_empty()
    }
}

/// Sweep `spec` over `grid`. Points are evaluated in parallel but each value
/// depends only on its own theta, so the output is order-independent.
pub fn coverage_curve(spec: &MethodSpec, n: u32, alpha: f64, grid: &[f64]) -> Result<CoverageCurve> {
    check_grid(grid)?;
    let proc = Procedure::new(spec.clone(), n, alpha)?;
    proc.lengths()?;
    let rows = grid
        .par_iter()
        .map(|&t| {
            let (u, l) = proc.noncoverage(t)?;
            Ok((u, l, proc.expected_length(t)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CoverageCurve {
        method: spec.tag(),
        alpha,
        n,
        theta_grid: grid.to_vec(),
        upper_noncoverage: rows.iter().map(|r| r.0).collect(),
        lower_noncoverage: rows.iter().map(|r| r.1).collect(),
        expected_length: rows.iter().map(|r| r.2).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::grid::uniform_grid;
    use crate::intervals::{split_design, stevens_interval};

    #[test]
    fn randomized_identity_small_cases() {
        let (u, l) = noncoverage_randomized_exact(10, 0.05, 0.3).unwrap();
        assert!((u - 0.025).abs() < 1e-12 && (l - 0.025).abs() < 1e-12);
        // n = 1, theta = 1/2: f = (1/2, 1/2); min(1/2, 0.05) + 0 on each side
        let (u, l) = noncoverage_randomized_exact(1, 0.1, 0.5).unwrap();
        assert_eq!((u, l), (0.05, 0.05));
    }

    #[test]
    fn randomized_reduction_matches_ratio_form() {
        // sum_y f(y) clamp((alpha/2 - F(y-1)) / f(y), 0, 1), straight from the definition
        let (n, alpha, theta) = (7, 0.1, 0.62);
        let m = BinomialModel::new(n, theta).unwrap();
        let mut up = 0.0;
        let mut lo = 0.0;
        for y in 0..=n {
            let f = m.pmf(y).unwrap();
            let r = (alpha / 2.0 - m.cdf(i64::from(y) - 1).unwrap()) / f;
            let rl = (alpha / 2.0 - m.sf(i64::from(y)).unwrap()) / f;
            up += f * r.clamp(0.0, 1.0);
            lo += f * rl.clamp(0.0, 1.0);
        }
        let (u, l) = noncoverage_randomized_exact(n, alpha, theta).unwrap();
        assert!((u - up).abs() < 1e-14 && (l - lo).abs() < 1e-14);
    }

    #[test]
    fn randomized_reduction_matches_interval_inversion() {
        // with v on a fine midpoint grid, the miss fraction tracks the reduction
        let (n, alpha, theta) = (6, 0.1, 0.35);
        let pmf = BinomialModel::new(n, theta).unwrap().pmf_vec();
        let k = 2000;
        let mut up = 0.0;
        let mut lo = 0.0;
        for y in 0..=n {
            let mut miss_u = 0;
            let mut miss_l = 0;
            for i in 0..k {
                let v = (i as f64 + 0.5) / k as f64;
                let iv = stevens_interval(n, y, v, alpha).unwrap();
                miss_u += usize::from(theta > iv.upper);
                miss_l += usize::from(theta < iv.lower);
            }
            up += pmf[y as usize] * miss_u as f64 / k as f64;
            lo += pmf[y as usize] * miss_l as f64 / k as f64;
        }
        assert!((up - 0.05).abs() < 1e-3, "{up}");
        assert!((lo - 0.05).abs() < 1e-3, "{lo}");
    }

    #[test]
    fn levels_below_counts() {
        assert_eq!(levels_below(-0.1, 10), 0);
        assert_eq!(levels_below(0.0, 10), 0);
        assert_eq!(levels_below(0.1, 10), 0);
        assert_eq!(levels_below(0.1000001, 10), 1);
        assert_eq!(levels_below(0.55, 10), 5);
        assert_eq!(levels_below(1.0, 10), 9);
        assert_eq!(levels_below(1.5, 10), 10);
    }

    #[test]
    fn discrete_counts_match_interval_inversion() {
        let (n, alpha, theta, m) = (5, 0.1, 0.4, 7u128);
        let (u, l) = noncoverage_discrete_exact(n, alpha, theta, |_| m).unwrap();
        let pmf = BinomialModel::new(n, theta).unwrap().pmf_vec();
        let mut up = 0.0;
        let mut lo = 0.0;
        for y in 0..=n {
            for k in 1..=m {
                let w = k as f64 / m as f64;
                let wt = (k - 1) as f64 / m as f64;
                if theta > upper_endpoint(n, y, w, alpha).unwrap() {
                    up += pmf[y as usize] / m as f64;
                }
                if theta < lower_endpoint(n, y, wt, alpha).unwrap() {
                    lo += pmf[y as usize] / m as f64;
                }
            }
        }
        assert!((u - up).abs() < 1e-14 && (l - lo).abs() < 1e-14);
        assert!(u <= 0.05 && l <= 0.05);
    }

    #[test]
    fn discrete_rejects_zero_levels() {
        assert!(noncoverage_discrete_exact(5, 0.1, 0.4, |_| 0).is_err());
        assert!(Procedure::new(MethodSpec::Discrete { levels: 1 }, 5, 0.1).is_err());
    }

    #[test]
    fn cp_noncoverage_bounded_and_vanishing() {
        for &t in &uniform_grid(99) {
            let (u, l) = noncoverage_cp(10, 0.05, t).unwrap();
            assert!(u <= 0.025 && l <= 0.025);
        }
        // only y >= 1 can miss from below, with mass about n theta
        let (u, l) = noncoverage_cp(10, 0.05, 1e-9).unwrap();
        assert!(u == 0.0 && l < 2e-8);
    }

    #[test]
    fn cp_noncoverage_by_enumeration() {
        let (n, alpha, theta) = (10, 0.05, 0.5);
        let pmf = BinomialModel::new(n, theta).unwrap().pmf_vec();
        let mut up = 0.0;
        let mut lo = 0.0;
        for y in 0..=n {
            let cp = cp_interval(n, y, alpha).unwrap();
            if cp.upper < theta {
                up += pmf[y as usize];
            }
            if cp.lower > theta {
                lo += pmf[y as usize];
            }
        }
        assert_eq!(noncoverage_cp(n, alpha, theta).unwrap(), (up, lo));
        // misses only at y <= 1 and y >= 9
        assert!(up > 0.0 && up <= 0.025);
    }

    #[test]
    fn split_noncoverage_bounded() {
        let d = SplitDesign::new(3, 7).unwrap();
        let p = Procedure::new(MethodSpec::Split { n1: 3, n2: 7 }, 10, 0.05).unwrap();
        for &t in &uniform_grid(49) {
            let (u, l) = p.noncoverage(t).unwrap();
            assert!(u <= 0.025 && l <= 0.025, "{t}: {u} {l}");
            assert_eq!(noncoverage_split(&d, 0.05, t).unwrap(), (u, l));
        }
        let (u, l) = noncoverage_split(&d, 0.05, 1e-9).unwrap();
        assert!(u == 0.0 && l < 2e-8);
        assert!(Procedure::new(MethodSpec::Split { n1: 3, n2: 7 }, 11, 0.05).is_err());
    }

    #[test]
    fn split_length_by_enumeration() {
        let d = split_design(5).unwrap();
        let theta = 0.3;
        let spec = MethodSpec::Split { n1: d.n1(), n2: d.n2() };
        let p1 = BinomialModel::new(d.n1(), theta).unwrap().pmf_vec();
        let p2 = BinomialModel::new(d.n2(), theta).unwrap().pmf_vec();
        let mut want = 0.0;
        for (a, b) in d.outcomes() {
            let iv = split_sample_interval(a, b, &d, 0.05).unwrap();
            want += p1[a as usize] * p2[b as usize] * iv.length();
        }
        let got = expected_length(&spec, 5, 0.05, theta).unwrap();
        assert!((got - want).abs() < 1e-14);
    }

    #[test]
    fn stevens_shorter_than_cp() {
        let s = expected_length(&MethodSpec::Stevens, 10, 0.05, 0.5).unwrap();
        let c = expected_length(&MethodSpec::ClopperPearson, 10, 0.05, 0.5).unwrap();
        assert!(s < c, "{s} vs {c}");
    }

    #[test]
    fn stevens_length_quadrature_converges() {
        // a 64-node rule and a 200-node rule agree on each conditional length
        let (n, alpha) = (8, 0.05);
        let fine = GaussLegendre::new(200);
        for y in 0..=n {
            let a = randomized_mean_length(&GaussLegendre::new(64), n, y, alpha, false).unwrap();
            let b = randomized_mean_length(&fine, n, y, alpha, false).unwrap();
            assert!((a - b).abs() < 1e-9, "y={y}: {a} vs {b}");
        }
    }

    #[test]
    fn antithetic_matches_stevens() {
        let p = Procedure::new(MethodSpec::Antithetic, 10, 0.05).unwrap();
        let s = Procedure::new(MethodSpec::Stevens, 10, 0.05).unwrap();
        for &t in &[0.1, 0.5, 0.77] {
            let a = p.expected_length(t).unwrap();
            let b = s.expected_length(t).unwrap();
            assert!((a - b).abs() < 1e-8);
            let (u, l) = noncoverage_antithetic_exact(10, 0.05, t).unwrap();
            assert!((u - 0.025).abs() < 1e-12 && (l - 0.025).abs() < 1e-12);
        }
    }

    #[test]
    fn korn_levels_and_length() {
        let p = Procedure::new(MethodSpec::Korn, 6, 0.05).unwrap();
        assert_eq!(p.levels().unwrap(), &[1, 6, 15, 20, 15, 6, 1]);
        let c = Procedure::new(MethodSpec::ClopperPearson, 6, 0.05).unwrap();
        for &t in &[0.2, 0.5] {
            assert!(p.expected_length(t).unwrap() < c.expected_length(t).unwrap());
            let (u, l) = p.noncoverage(t).unwrap();
            assert!(u <= 0.025 && l <= 0.025);
        }
    }

    #[test]
    fn length_table_cap() {
        let p = Procedure::new(MethodSpec::Korn, 40, 0.05).unwrap();
        assert!(matches!(p.expected_length(0.5), Err(Error::Unsupported(_))));
        assert!(p.noncoverage(0.5).is_ok());
    }

    #[test]
    fn curve_shape_and_order() {
        let grid = uniform_grid(20);
        let c = coverage_curve(&MethodSpec::Stevens, 5, 0.1, &grid).unwrap();
        assert_eq!(c.len(), 20);
        assert_eq!(c.method, "stevens");
        for (i, &t) in grid.iter().enumerate() {
            assert_eq!(c.expected_length[i], expected_length(&MethodSpec::Stevens, 5, 0.1, t).unwrap());
        }
        assert!(coverage_curve(&MethodSpec::Stevens, 5, 0.1, &[0.5, 0.2]).is_err());
    }
}
