//! Auxiliary-variable sources: a seeded uniform generator, Weyl sequences
//! `{k * lambda}`, van der Corput radical inverses and periodic permutations
//! of the levels `1/N, ..., N/N`.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::error::{domain, Error, Result};

/// Half-open range a source promises for every value it emits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnitRange {
    /// `(0, 1)`; satisfies both half-open conventions.
    Open,
    /// `[0, 1)`
    ClosedOpen,
    /// `(0, 1]`
    OpenClosed,
}

impl UnitRange {
    pub fn contains(self, v: f64) -> bool {
        match self {
            UnitRange::Open => v > 0.0 && v < 1.0,
            UnitRange::ClosedOpen => (0.0..1.0).contains(&v),
            UnitRange::OpenClosed => v > 0.0 && v <= 1.0,
        }
    }
}

/// Parameters of an auxiliary source, without its running state.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AuxKind {
    /// ChaCha20 stream (stream id 1) seeded with `seed`.
    SeededUniform { seed: u64 },
    Weyl { lambda: f64 },
    VanDerCorput { base: u32 },
    /// `perm` holds a permutation of `1..=N`; `N = perm.len()`.
    PeriodicPerm { perm: Vec<u32> },
}

impl AuxKind {
    pub fn weyl_default() -> Self {
        AuxKind::Weyl {
            lambda: std::f64::consts::SQRT_2,
        }
    }

    pub fn van_der_corput_default() -> Self {
        AuxKind::VanDerCorput { base: 2 }
    }

    pub fn periodic_identity(period: u32) -> Self {
        AuxKind::PeriodicPerm {
            perm: (1..=period).collect(),
        }
    }

    pub fn range(&self) -> UnitRange {
        match self {
            AuxKind::SeededUniform { .. } => UnitRange::Open,
            AuxKind::Weyl { .. } | AuxKind::VanDerCorput { .. } => UnitRange::ClosedOpen,
            AuxKind::PeriodicPerm { .. } => UnitRange::OpenClosed,
        }
    }

    /// Whether the source emits discrete levels `(w, w - 1/N)` rather than a
    /// single continuous value.
    pub fn is_discrete(&self) -> bool {
        matches!(self, AuxKind::PeriodicPerm { .. })
    }

    fn validate(&self) -> Result<()> {
        match self {
            AuxKind::SeededUniform { .. } => Ok(()),
            AuxKind::Weyl { lambda } => {
                if lambda.is_finite() && lambda.fract() != 0.0 {
                    Ok(())
                } else {
                    Err(domain("lambda", lambda, "a finite non-integer real"))
                }
            }
            AuxKind::VanDerCorput { base } => {
                if *base >= 2 {
                    Ok(())
                } else {
                    Err(domain("base", base, "integers >= 2"))
                }
            }
            AuxKind::PeriodicPerm { perm } => validate_perm(perm),
        }
    }
}

/// One emission of an auxiliary source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AuxDraw {
    Continuous(f64),
    /// `w = index / period` and `w_tilde = (index - 1) / period`.
    Level { index: u32, period: u32 },
}

impl AuxDraw {
    /// The value used for the upper endpoint.
    pub fn upper_value(self) -> f64 {
        match self {
            AuxDraw::Continuous(v) => v,
            AuxDraw::Level { index, period } => f64::from(index) / f64::from(period),
        }
    }

    /// The value used for the lower endpoint.
    pub fn lower_value(self) -> f64 {
        match self {
            AuxDraw::Continuous(v) => v,
            AuxDraw::Level { index, period } => f64::from(index - 1) / f64::from(period),
        }
    }
}

/// Sequential generator of auxiliary values; position `k` starts at 1.
#[derive(Debug, Clone)]
pub struct AuxSource {
    kind: AuxKind,
    k: u64,
    rng: Option<ChaCha20Rng>,
}

impl AuxSource {
    pub fn new(kind: AuxKind) -> Result<Self> {
        kind.validate()?;
        let rng = match kind {
            AuxKind::SeededUniform { seed } => Some(aux_rng(seed)),
            _ => None,
        };
        Ok(Self { kind, k: 1, rng })
    }

    pub fn kind(&self) -> &AuxKind {
        &self.kind
    }

    /// Index of the next emission.
    pub fn position(&self) -> u64 {
        self.k
    }

    pub fn next_draw(&mut self) -> AuxDraw {
        let k = self.k;
        self.k += 1;
        let draw = match &self.kind {
            AuxKind::SeededUniform { .. } => {
                let rng = self.rng.as_mut().expect("seeded source owns an rng");
                AuxDraw::Continuous(open_unit(rng))
            }
            AuxKind::Weyl { lambda } => AuxDraw::Continuous(weyl(*lambda, k)),
            AuxKind::VanDerCorput { base } => AuxDraw::Continuous(van_der_corput(k, *base)),
            AuxKind::PeriodicPerm { perm } => {
                let period = perm.len() as u32;
                AuxDraw::Level {
                    index: perm[((k - 1) % u64::from(period)) as usize],
                    period,
                }
            }
        };
        let range = self.kind.range();
        assert!(
            range.contains(draw.upper_value()),
            "{:?} emitted {} outside {:?}",
            self.kind,
            draw.upper_value(),
            range
        );
        draw
    }
}

/// Next value from a seeded uniform source: strictly inside `(0, 1)`.
pub fn uniform_draw(source: &mut AuxSource) -> Result<f64> {
    match source.kind {
        AuxKind::SeededUniform { .. } => Ok(source.next_draw().upper_value()),
        _ => Err(Error::Unsupported(format!(
            "uniform_draw needs a seeded uniform source, got {:?}",
            source.kind
        ))),
    }
}

/// Fractional part of `k * lambda`.
pub fn weyl(lambda: f64, k: u64) -> f64 {
    let v = (k as f64 * lambda).fract();
    if v < 0.0 {
        v + 1.0
    } else {
        v
    }
}

/// Radical inverse of `k` in `base`: the base-`b` digits of `k` mirrored
/// about the radix point.
pub fn van_der_corput(mut k: u64, base: u32) -> f64 {
    debug_assert!(base >= 2);
    let b = u64::from(base);
    let inv = 1.0 / f64::from(base);
    let mut scale = inv;
    let mut acc = 0.0;
    while k > 0 {
        acc += (k % b) as f64 * scale;
        k /= b;
        scale *= inv;
    }
    acc
}

/// `(w_k, w_tilde_k)` for the periodic sequence whose first period is
/// `perm[0]/N, ..., perm[N-1]/N`.
pub fn periodic_perm(perm: &[u32], k: u64) -> Result<(f64, f64)> {
    validate_perm(perm)?;
    if k == 0 {
        return Err(domain("k", k, "integers >= 1"));
    }
    let n = perm.len() as u32;
    let index = perm[((k - 1) % u64::from(n)) as usize];
    let d = AuxDraw::Level { index, period: n };
    Ok((d.upper_value(), d.lower_value()))
}

pub fn validate_perm(perm: &[u32]) -> Result<()> {
    let n = perm.len();
    if n < 2 {
        return Err(Error::InvalidPermutation(format!(
            "period must be at least 2, got {n}"
        )));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p == 0 || p as usize > n {
            return Err(Error::InvalidPermutation(format!(
                "entry {p} outside 1..={n}"
            )));
        }
        if std::mem::replace(&mut seen[p as usize - 1], true) {
            return Err(Error::InvalidPermutation(format!("entry {p} repeated")));
        }
    }
    Ok(())
}

/// Generator for the binomial draws of a simulation: ChaCha20, stream 0.
pub(crate) fn data_rng(seed: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(0);
    rng
}

fn aux_rng(seed: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(1);
    rng
}

/// 53-bit uniform in `(0, 1)`; an exact zero is redrawn.
pub(crate) fn open_unit(rng: &mut ChaCha20Rng) -> f64 {
    loop {
        let v = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        if v > 0.0 {
            return v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_uniform_replays() {
        let draws = |seed| {
            let mut s = AuxSource::new(AuxKind::SeededUniform { seed }).unwrap();
            [
                uniform_draw(&mut s).unwrap(),
                uniform_draw(&mut s).unwrap(),
                uniform_draw(&mut s).unwrap(),
            ]
        };
        assert_eq!(draws(7), draws(7));
        assert_ne!(draws(7), draws(8));
    }

    #[test]
    fn seeded_uniform_mean_and_ks() {
        let mut s = AuxSource::new(AuxKind::SeededUniform { seed: 2024 }).unwrap();
        let mut xs: Vec<f64> = (0..100_000).map(|_| uniform_draw(&mut s).unwrap()).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!((mean - 0.5).abs() < 0.01, "mean {mean}");
        xs.sort_by(f64::total_cmp);
        let m = xs.len() as f64;
        let ks = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| ((i as f64 + 1.0) / m - x).max(x - i as f64 / m))
            .fold(0.0, f64::max);
        assert!(ks < 0.01, "KS distance {ks}");
    }

    #[test]
    fn uniform_draw_rejects_other_kinds() {
        let mut s = AuxSource::new(AuxKind::van_der_corput_default()).unwrap();
        assert!(uniform_draw(&mut s).is_err());
    }

    #[test]
    fn weyl_sqrt2() {
        let l = std::f64::consts::SQRT_2;
        assert!((weyl(l, 1) - 0.414_213_562_37).abs() < 1e-10);
        assert!((weyl(l, 2) - 0.828_427_124_75).abs() < 1e-10);
        assert!((weyl(l, 3) - 0.242_640_687_12).abs() < 1e-10);
    }

    #[test]
    fn van_der_corput_base2_and_3() {
        assert_eq!(van_der_corput(1, 2), 0.5);
        assert_eq!(van_der_corput(2, 2), 0.25);
        assert_eq!(van_der_corput(3, 2), 0.75);
        assert_eq!(van_der_corput(6, 2), 0.375);
        assert!((van_der_corput(1, 3) - 1.0 / 3.0).abs() < 1e-15);
        assert!((van_der_corput(5, 3) - 7.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn periodic_identity_pattern() {
        let perm = [1, 2, 3, 4];
        let ws: Vec<f64> = (1..=5).map(|k| periodic_perm(&perm, k).unwrap().0).collect();
        assert_eq!(ws, vec![0.25, 0.5, 0.75, 1.0, 0.25]);
        let (w, wt) = periodic_perm(&perm, 3).unwrap();
        assert_eq!((w, wt), (0.75, 0.5));
    }

    #[test]
    fn periodic_any_perm_covers_levels_each_period() {
        let perm = vec![3, 1, 4, 2];
        let mut src = AuxSource::new(AuxKind::PeriodicPerm { perm }).unwrap();
        src.next_draw(); // start mid-period
        for _ in 0..5 {
            let mut idx: Vec<u32> = (0..4)
                .map(|_| match src.next_draw() {
                    AuxDraw::Level { index, period } => {
                        assert_eq!(period, 4);
                        index
                    }
                    AuxDraw::Continuous(_) => unreachable!(),
                })
                .collect();
            idx.sort_unstable();
            assert_eq!(idx, vec![1, 2, 3, 4]);
        }
    }

    #[test]
    fn invalid_perms() {
        assert!(matches!(
            validate_perm(&[1, 1, 3]),
            Err(Error::InvalidPermutation(_))
        ));
        assert!(validate_perm(&[0, 1]).is_err());
        assert!(validate_perm(&[1, 3]).is_err());
        assert!(validate_perm(&[1]).is_err());
        assert!(AuxSource::new(AuxKind::PeriodicPerm { perm: vec![2, 2] }).is_err());
        assert!(AuxSource::new(AuxKind::VanDerCorput { base: 1 }).is_err());
        assert!(AuxSource::new(AuxKind::Weyl { lambda: 2.0 }).is_err());
    }

    fn equidistributed(mut next: impl FnMut(u64) -> f64) {
        let m = 100_000u64;
        let vals: Vec<f64> = (1..=m).map(&mut next).collect();
        for i in 1..=9 {
            let t = f64::from(i) / 10.0;
            let prop = vals.iter().filter(|&&v| v <= t).count() as f64 / m as f64;
            assert!((prop - t).abs() < 0.01, "t={t} prop={prop}");
        }
    }

    #[test]
    fn weyl_and_vdc_equidistribute() {
        equidistributed(|k| weyl(std::f64::consts::SQRT_2, k));
        equidistributed(|k| weyl(std::f64::consts::PI, k));
        equidistributed(|k| van_der_corput(k, 2));
        equidistributed(|k| van_der_corput(k, 3));
    }

    #[test]
    fn sources_respect_declared_ranges() {
        for kind in [
            AuxKind::SeededUniform { seed: 1 },
            AuxKind::weyl_default(),
            AuxKind::van_der_corput_default(),
            AuxKind::periodic_identity(8),
        ] {
            let range = kind.range();
            let mut s = AuxSource::new(kind).unwrap();
            for _ in 0..1000 {
                let d = s.next_draw();
                assert!(range.contains(d.upper_value()));
                if let AuxDraw::Level { .. } = d {
                    assert!(UnitRange::ClosedOpen.contains(d.lower_value()));
                }
            }
        }
    }
}
