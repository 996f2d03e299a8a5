//! Long-run behaviour of randomized intervals driven by a given auxiliary
//! sequence, with the binomial data drawn from a seeded generator.

use std::collections::HashMap;

use serde::Serialize;

use crate::auxiliary::{data_rng, open_unit, AuxDraw, AuxKind, AuxSource};
use crate::error::{check_alpha, domain, Result};
use crate::intervals::{lower_endpoint, upper_endpoint};
use crate::numerics::{BinomialModel, MAX_TRIALS};

/// Number of checkpoints a run is divided into.
pub const CHECKPOINTS: u64 = 100;

/// Running proportions after the first `k` trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Checkpoint {
    pub k: u64,
    pub upper_prop: f64,
    pub lower_prop: f64,
    pub average_length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub source: AuxKind,
    pub n: u32,
    pub alpha: f64,
    pub theta: f64,
    pub m: u64,
    /// Seed of the binomial data stream.
    pub seed: u64,
    pub running_upper_prop: f64,
    pub running_lower_prop: f64,
    pub average_length: f64,
    pub checkpoints: Vec<Checkpoint>,
}

/// Draw `Y_1, ..., Y_m` iid `Binomial(n, theta)` and pair `Y_k` with the
/// `k`-th auxiliary value. Continuous sources give `[l_R(Y_k, v_k),
/// u_R(Y_k, v_k)]`; periodic sources give `[l_R(Y_k, w~_k), u_R(Y_k, w_k)]`.
/// Proportions of `theta > upper` and `theta < lower` are recorded every
/// `max(1, m / 100)` trials and at the end.
pub fn longrun_simulate(
    source: AuxKind,
    n: u32,
    alpha: f64,
    theta: f64,
    m: u64,
    seed: u64,
) -> Result<SimulationReport> {
    if n == 0 || n > MAX_TRIALS {
        return Err(domain("n", n, format!("[1, {MAX_TRIALS}]")));
    }
    check_alpha(alpha)?;
    if !(theta > 0.0 && theta < 1.0) {
        return Err(domain("theta", theta, "(0, 1)"));
    }
    if m == 0 {
        return Err(domain("m", m, "integers >= 1"));
    }
    let mut aux = AuxSource::new(source.clone())?;
    let cdf: Vec<f64> = BinomialModel::unchecked(n, theta)
        .pmf_vec()
        .iter()
        .scan(0.0, |acc, f| {
            *acc += f;
            Some(*acc)
        })
        .collect();
    let mut rng = data_rng(seed);
    // periodic sources repeat (y, level) pairs, so their intervals are cached
    let mut cache: HashMap<(u32, u32), (f64, f64)> = HashMap::new();
    let every = (m / CHECKPOINTS).max(1);
    let (mut miss_u, mut miss_l, mut total_len) = (0u64, 0u64, 0.0);
    let mut checkpoints = Vec::new();
    for k in 1..=m {
        let u = open_unit(&mut rng);
        let y = cdf.iter().position(|&c| u <= c).unwrap_or(n as usize) as u32;
        let draw = aux.next_draw();
        let (lower, upper) = match draw {
            AuxDraw::Continuous(v) => (
                lower_endpoint(n, y, v, alpha)?,
                upper_endpoint(n, y, v, alpha)?,
            ),
            AuxDraw::Level { index, .. } => match cache.get(&(y, index)) {
                Some(&e) => e,
                None => {
                    let e = (
                        lower_endpoint(n, y, draw.lower_value(), alpha)?,
                        upper_endpoint(n, y, draw.upper_value(), alpha)?,
                    );
                    cache.insert((y, index), e);
                    e
                }
            },
        };
        miss_u += u64::from(theta > upper);
        miss_l += u64::from(theta < lower);
        total_len += upper - lower;
        if k % every == 0 || k == m {
            let kf = k as f64;
            checkpoints.push(Checkpoint {
                k,
                upper_prop: miss_u as f64 / kf,
                lower_prop: miss_l as f64 / kf,
                average_length: total_len / kf,
            });
        }
    }
    let last = *checkpoints.last().expect("m >= 1 gives a final checkpoint");
    Ok(SimulationReport {
        source,
        n,
        alpha,
        theta,
        m,
        seed,
        running_upper_prop: last.upper_prop,
        running_lower_prop: last.lower_prop,
        average_length: last.average_length,
        checkpoints,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_trial_is_zero_or_one() {
        for kind in [
            AuxKind::SeededUniform { seed: 3 },
            AuxKind::weyl_default(),
            AuxKind::van_der_corput_default(),
            AuxKind::periodic_identity(8),
        ] {
            let r = longrun_simulate(kind, 10, 0.05, 0.3, 1, 42).unwrap();
            assert!([0.0, 1.0].contains(&r.running_upper_prop));
            assert!([0.0, 1.0].contains(&r.running_lower_prop));
            assert_eq!(r.checkpoints.len(), 1);
        }
    }

    #[test]
    fn reproducible() {
        let a = longrun_simulate(AuxKind::SeededUniform { seed: 9 }, 10, 0.05, 0.3, 2000, 1).unwrap();
        let b = longrun_simulate(AuxKind::SeededUniform { seed: 9 }, 10, 0.05, 0.3, 2000, 1).unwrap();
        assert_eq!(a, b);
        let c = longrun_simulate(AuxKind::SeededUniform { seed: 9 }, 10, 0.05, 0.3, 2000, 2).unwrap();
        assert_ne!(a.checkpoints, c.checkpoints);
    }

    #[test]
    fn checkpoint_spacing() {
        let r = longrun_simulate(AuxKind::van_der_corput_default(), 5, 0.1, 0.5, 250, 0).unwrap();
        let ks: Vec<u64> = r.checkpoints.iter().map(|c| c.k).collect();
        assert_eq!(ks[0], 2);
        assert_eq!(*ks.last().unwrap(), 250);
        assert_eq!(ks.len(), 125);
        let r = longrun_simulate(AuxKind::van_der_corput_default(), 5, 0.1, 0.5, 503, 0).unwrap();
        assert_eq!(r.checkpoints.len(), 101);
        assert_eq!(r.checkpoints[99].k, 500);
    }

    #[test]
    fn data_draws_follow_the_binomial() {
        // y-draw frequencies near the pmf
        let (n, theta) = (4, 0.3);
        let pmf = BinomialModel::new(n, theta).unwrap().pmf_vec();
        let cdf: Vec<f64> = pmf.iter().scan(0.0, |a, f| { *a += f; Some(*a) }).collect();
        let mut rng = data_rng(5);
        let mut counts = [0u32; 5];
        let m = 100_000;
        for _ in 0..m {
            let u = open_unit(&mut rng);
            counts[cdf.iter().position(|&c| u <= c).unwrap_or(4)] += 1;
        }
        for y in 0..5 {
            let p = pmf[y];
            let se = (p * (1.0 - p) / m as f64).sqrt();
            assert!((counts[y] as f64 / m as f64 - p).abs() < 5.0 * se);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let k = AuxKind::weyl_default();
        assert!(longrun_simulate(k.clone(), 10, 0.05, 0.3, 0, 1).is_err());
        assert!(longrun_simulate(k.clone(), 10, 0.05, 1.0, 5, 1).is_err());
        assert!(longrun_simulate(k, 0, 0.05, 0.3, 5, 1).is_err());
        assert!(longrun_simulate(AuxKind::PeriodicPerm { perm: vec![1, 1] }, 3, 0.05, 0.3, 5, 1).is_err());
    }
}
