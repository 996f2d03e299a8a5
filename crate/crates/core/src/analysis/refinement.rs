//! Whether a statistic refines the ordering of outcomes induced by `Y`.
//!
//! A statistic `S` is a refinement when every value taken with `Y = y` lies
//! strictly below every value taken with `Y = y + 1`. The randomized statistic
//! `Y + V` is one; the split estimator generally is not.

use num::rational::Ratio;
use serde::{Serialize, Serializer};

use crate::error::{check_unit, domain, Result};
use crate::intervals::SplitDesign;

/// Largest number of inversion witnesses kept in a report.
pub const MAX_WITNESSES: usize = 16;

fn ser_ratio<S: Serializer>(r: &Ratio<u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(&format_args!("{}/{}", r.numer(), r.denom()))
}

/// One outcome `(y1, y2)` and its estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Outcome {
    pub y1: u32,
    pub y2: u32,
    #[serde(serialize_with = "ser_ratio")]
    pub estimate: Ratio<u64>,
}

impl Outcome {
    pub fn y(&self) -> u32 {
        self.y1 + self.y2
    }
}

/// Two outcomes with `first.y() < second.y()` whose estimates are equal
/// (tie) or in the opposite order (inversion).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub first: Outcome,
    pub second: Outcome,
}

/// The family `(t, 0)` against `(0, t + 1)`: `t/(2 n1) > (t+1)/(2 n2)` holds
/// exactly when `t > n1 / (n2 - n1)`. Reported even when the smallest such `t`
/// exceeds the group sizes, with `attainable` saying whether both outcomes
/// exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OrderingAnomaly {
    pub n1: u64,
    pub n2: u64,
    #[serde(serialize_with = "ser_ratio")]
    pub threshold: Ratio<u64>,
    pub t: u64,
    #[serde(serialize_with = "ser_ratio")]
    pub left: Ratio<u64>,
    #[serde(serialize_with = "ser_ratio")]
    pub right: Ratio<u64>,
    pub attainable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinementReport {
    pub statistic: String,
    pub is_refinement: bool,
    /// All pairs from different `y` blocks with equal value.
    pub ties: Vec<Witness>,
    pub inversion_count: u64,
    /// The first [`MAX_WITNESSES`] inversions in `(y1, y2)` order.
    pub inversions: Vec<Witness>,
    pub anomaly: Option<OrderingAnomaly>,
}

/// Compare every pair of outcomes of the split estimator across `y` blocks.
pub fn refinement_check(design: &SplitDesign) -> RefinementReport {
    let outcomes: Vec<Outcome> = design
        .outcomes()
        .map(|(y1, y2)| Outcome {
            y1,
            y2,
            estimate: design.estimate(y1, y2),
        })
        .collect();
    let mut ties = Vec::new();
    let mut inversions = Vec::new();
    let mut inversion_count = 0u64;
    for a in &outcomes {
        for b in &outcomes {
            if a.y() >= b.y() {
                continue;
            }
            if a.estimate == b.estimate {
                ties.push(Witness { first: *a, second: *b });
            } else if a.estimate > b.estimate {
                inversion_count += 1;
                if inversions.len() < MAX_WITNESSES {
                    inversions.push(Witness { first: *a, second: *b });
                }
            }
        }
    }
    RefinementReport {
        statistic: format!("split-{}-{}", design.n1(), design.n2()),
        is_refinement: ties.is_empty() && inversion_count == 0,
        ties,
        inversion_count,
        inversions,
        anomaly: ordering_anomaly(design),
    }
}

fn ordering_anomaly(design: &SplitDesign) -> Option<OrderingAnomaly> {
    let (n1, n2) = (u64::from(design.n1()), u64::from(design.n2()));
    if n2 <= n1 {
        return None;
    }
    let threshold = Ratio::new(n1, n2 - n1);
    let t = threshold.floor().to_integer() + 1;
    Some(OrderingAnomaly {
        n1,
        n2,
        threshold,
        t,
        left: Ratio::new(t, 2 * n1),
        right: Ratio::new(t + 1, 2 * n2),
        attainable: t <= n1 && t < n2,
    })
}

/// Block structure of `Y + v` over the given `v` values in `[0, 1)`:
/// the largest value in block `y` must sit below the smallest in block `y + 1`.
pub fn stevens_refinement_check(n: u32, v_grid: &[f64]) -> Result<RefinementReport> {
    if v_grid.is_empty() {
        return Err(domain("v_grid", "[]", "at least one value"));
    }
    for &v in v_grid {
        check_unit("v", v)?;
        if v >= 1.0 {
            return Err(domain("v", v, "[0, 1)"));
        }
    }
    let lo = v_grid.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v_grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ordered = (0..n).all(|y| f64::from(y) + hi < f64::from(y + 1) + lo);
    Ok(RefinementReport {
        statistic: "y+v".into(),
        is_refinement: ordered,
        ties: Vec::new(),
        inversion_count: 0,
        inversions: Vec::new(),
        anomaly: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intervals::split_design;

    #[test]
    fn design_23_24_tie_and_formal_anomaly() {
        let r = refinement_check(&split_design(47).unwrap());
        assert!(!r.is_refinement);
        assert_eq!(r.ties.len(), 1);
        let w = r.ties[0];
        assert_eq!((w.first.y1, w.first.y2), (23, 0));
        assert_eq!((w.second.y1, w.second.y2), (0, 24));
        assert_eq!(w.first.estimate, Ratio::new(1, 2));
        // no attainable strict inversion for this design
        assert_eq!(r.inversion_count, 0);
        let a = r.anomaly.unwrap();
        assert_eq!(a.threshold, Ratio::from_integer(23));
        assert_eq!(a.t, 24);
        assert_eq!((a.left, a.right), (Ratio::new(24, 46), Ratio::new(25, 48)));
        assert!(a.left > a.right);
        assert!(!a.attainable);
    }

    #[test]
    fn design_3_7_has_real_inversions() {
        let r = refinement_check(&SplitDesign::new(3, 7).unwrap());
        assert!(!r.is_refinement);
        assert!(r.inversion_count > 0);
        let a = r.anomaly.unwrap();
        assert_eq!(a.t, 1);
        assert!(a.attainable);
        assert!(r.inversions.iter().any(|w| {
            (w.first.y1, w.first.y2, w.second.y1, w.second.y2) == (1, 0, 0, 2)
        }));
        let w = r.inversions[0];
        assert!(w.first.y() < w.second.y() && w.first.estimate > w.second.estimate);
    }

    #[test]
    fn inversion_count_by_brute_force() {
        let d = SplitDesign::new(2, 5).unwrap();
        let outs: Vec<_> = d.outcomes().collect();
        let mut count = 0;
        for &(a1, a2) in &outs {
            for &(b1, b2) in &outs {
                let ea = Ratio::new(a1, 2) + Ratio::new(a2, 5);
                let eb = Ratio::new(b1, 2) + Ratio::new(b2, 5);
                if a1 + a2 < b1 + b2 && ea > eb {
                    count += 1;
                }
            }
        }
        assert_eq!(refinement_check(&d).inversion_count, count);
    }

    #[test]
    fn stevens_statistic_refines() {
        let grid: Vec<f64> = (0..100).map(|i| f64::from(i) / 100.0).collect();
        assert!(stevens_refinement_check(10, &grid).unwrap().is_refinement);
        assert!(stevens_refinement_check(10, &[0.0, 1.0]).is_err());
    }
}
