//! Data-randomized interval: the auxiliary level is the rank of the observed
//! ones-pattern among all `C(n, y)` patterns with the same count.
//!
//! Patterns are ordered by the sum of their one-positions (ones early in the
//! sequence rank first), ties broken lexicographically on the sorted position
//! tuple. Ranks are computed by counting, through a table of subset-sum
//! counts (the coefficients of the Gaussian binomial `[m choose k]_q`), so no
//! pattern enumeration is needed.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::{check_alpha, levels_interval, AuxInputs, Interval, Level, Method};
use crate::error::{domain, Error, Result};
use crate::numerics::{choose_u128, WideCount, MAX_TRIALS};

/// Observed Bernoulli outcomes `x_1, ..., x_n` in order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BernoulliSequence {
    bits: Vec<bool>,
}

impl BernoulliSequence {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() || bits.len() > MAX_TRIALS as usize {
            return Err(domain("n", bits.len(), format!("[1, {MAX_TRIALS}]")));
        }
        Ok(Self { bits })
    }

    /// Sequence of length `n` with ones at the given 1-based positions.
    pub fn from_positions(n: u32, positions: &[u32]) -> Result<Self> {
        let mut bits = vec![false; n as usize];
        for &p in positions {
            if p == 0 || p > n {
                return Err(domain("position", p, format!("[1, {n}]")));
            }
            bits[p as usize - 1] = true;
        }
        Self::new(bits)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn n(&self) -> u32 {
        self.bits.len() as u32
    }

    /// Number of ones.
    pub fn y(&self) -> u32 {
        self.bits.iter().filter(|&&b| b).count() as u32
    }

    /// 1-based positions of the ones, ascending.
    pub fn positions(&self) -> Vec<u32> {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i as u32 + 1)
            .collect()
    }

    /// The same outcomes with `x_i` moved to position `perm[i]` (0-based).
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.bits.len() {
            return Err(Error::InvalidPermutation(format!(
                "length {} does not match n = {}",
                perm.len(),
                self.bits.len()
            )));
        }
        let mut out = vec![None; self.bits.len()];
        for (i, &p) in perm.iter().enumerate() {
            match out.get_mut(p) {
                Some(slot @ None) => *slot = Some(self.bits[i]),
                _ => return Err(Error::InvalidPermutation(format!("bad target {p}"))),
            }
        }
        Self::new(out.into_iter().map(|b| b.expect("bijection")).collect())
    }
}

impl FromStr for BernoulliSequence {
    type Err = Error;

    /// Parses a compact string of `0` and `1` characters.
    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(domain("bit", other, "'0' or '1'")),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(bits)
    }
}

impl fmt::Display for BernoulliSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Rank of a ones-pattern among the `count = C(n, y)` patterns with the same
/// `y`, with `w = rank / count` and `w_tilde = (rank - 1) / count`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KornRank {
    pub rank: WideCount,
    pub count: WideCount,
    #[serde(serialize_with = "super::ser_level")]
    pub w: Level,
    #[serde(serialize_with = "super::ser_level")]
    pub w_tilde: Level,
}

/// Counts of `k`-subsets of `{1, ..., m}` by sum, for all `m <= n`.
///
/// `table[m][k][d]` is the number of subsets whose sum is `k(k+1)/2 + d`,
/// for `0 <= d <= k(m-k)`.
#[derive(Debug, Clone)]
pub struct KornRanker {
    n: u32,
    table: Vec<Vec<Vec<u128>>>,
}

fn min_sum(k: u32) -> u64 {
    u64::from(k) * u64::from(k + 1) / 2
}

impl KornRanker {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 || n > MAX_TRIALS {
            return Err(domain("n", n, format!("[1, {MAX_TRIALS}]")));
        }
        let mut table: Vec<Vec<Vec<u128>>> = Vec::with_capacity(n as usize + 1);
        table.push(vec![vec![1]]);
        for m in 1..=n as usize {
            let prev = &table[m - 1];
            let row: Vec<Vec<u128>> = (0..=m)
                .map(|k| {
                    let width = k * (m - k) + 1;
                    (0..width)
                        .map(|d| {
                            // exclude m: a k-subset of {1..m-1} with the same sum
                            let without = if k < m {
                                prev[k].get(d).copied().unwrap_or(0)
                            } else {
                                0
                            };
                            // include m: a (k-1)-subset of {1..m-1}, offset m - k
                            let with = if k >= 1 && d >= m - k {
                                prev[k - 1].get(d - (m - k)).copied().unwrap_or(0)
                            } else {
                                0
                            };
                            without + with
                        })
                        .collect()
                })
                .collect();
            table.push(row);
        }
        Ok(Self { n, table })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Number of `k`-subsets of `{1, ..., m}` whose elements sum to `sum`.
    pub fn count_with_sum(&self, m: u32, k: u32, sum: i64) -> u128 {
        if k > m || m > self.n {
            return 0;
        }
        let d = sum - min_sum(k) as i64;
        if d < 0 {
            return 0;
        }
        self.table[m as usize][k as usize]
            .get(d as usize)
            .copied()
            .unwrap_or(0)
    }

    /// `k`-subsets of `{lo, ..., n}` with the given sum, by shifting to
    /// `{1, ..., n - lo + 1}`.
    fn count_from(&self, lo: u32, k: u32, sum: i64) -> u128 {
        if lo > self.n + 1 {
            return u128::from(k == 0 && sum == 0);
        }
        self.count_with_sum(self.n + 1 - lo, k, sum - i64::from(k) * i64::from(lo - 1))
    }

    /// 1-based rank of a sorted position tuple.
    fn rank_positions(&self, positions: &[u32]) -> u128 {
        let y = positions.len() as u32;
        let total: i64 = positions.iter().map(|&p| i64::from(p)).sum();
        let mut rank: u128 = (min_sum(y) as i64..total)
            .map(|s| self.count_with_sum(self.n, y, s))
            .sum();
        let (mut prefix, mut prev) = (0i64, 0u32);
        for (i, &p) in positions.iter().enumerate() {
            let rest = y - i as u32 - 1;
            for c in prev + 1..p {
                rank += self.count_from(c + 1, rest, total - prefix - i64::from(c));
            }
            prefix += i64::from(p);
            prev = p;
        }
        rank + 1
    }

    pub fn rank(&self, seq: &BernoulliSequence) -> Result<KornRank> {
        if seq.n() != self.n {
            return Err(domain("n", seq.n(), format!("{} (ranker size)", self.n)));
        }
        let count = choose_u128(self.n, seq.y());
        let rank = self.rank_positions(&seq.positions());
        debug_assert!(rank >= 1 && rank <= count);
        Ok(KornRank {
            rank: WideCount(rank),
            count: WideCount(count),
            w: Level::new(rank, count),
            w_tilde: Level::new(rank - 1, count),
        })
    }

    /// The pattern with `y` ones holding the given 1-based rank.
    pub fn unrank(&self, y: u32, rank: u128) -> Result<BernoulliSequence> {
        let count = choose_u128(self.n, y);
        if y > self.n {
            return Err(domain("y", y, format!("[0, {}]", self.n)));
        }
        if rank == 0 || rank > count {
            return Err(domain("rank", rank, format!("[1, {count}]")));
        }
        let mut r = rank - 1;
        let mut total = min_sum(y) as i64;
        loop {
            let c = self.count_with_sum(self.n, y, total);
            if r < c {
                break;
            }
            r -= c;
            total += 1;
        }
        let mut positions = Vec::with_capacity(y as usize);
        let (mut remaining, mut prev) = (total, 0u32);
        for i in 0..y {
            let rest = y - i - 1;
            let mut c = prev + 1;
            loop {
                let cnt = self.count_from(c + 1, rest, remaining - i64::from(c));
                if r < cnt {
                    break;
                }
                r -= cnt;
                c += 1;
            }
            positions.push(c);
            remaining -= i64::from(c);
            prev = c;
        }
        BernoulliSequence::from_positions(self.n, &positions)
    }
}

/// Exact rank of the ones-pattern of `seq` among patterns with the same count.
pub fn korn_rank(seq: &BernoulliSequence) -> KornRank {
    KornRanker::new(seq.n())
        .and_then(|r| r.rank(seq))
        .expect("sequence length already validated")
}

/// Inverse of [`korn_rank`].
pub fn unrank_pattern(n: u32, y: u32, rank: u128) -> Result<BernoulliSequence> {
    KornRanker::new(n)?.unrank(y, rank)
}

/// `[l_R(y, W_tilde), u_R(y, W)]` with `(W, W_tilde)` from the pattern rank.
pub fn korn_interval(seq: &BernoulliSequence, alpha: f64) -> Result<Interval> {
    check_alpha(alpha)?;
    let kr = korn_rank(seq);
    korn_interval_ranked(seq, &kr, alpha)
}

pub(crate) fn korn_interval_ranked(
    seq: &BernoulliSequence,
    kr: &KornRank,
    alpha: f64,
) -> Result<Interval> {
    let mut iv = levels_interval(seq.n(), seq.y(), kr.w, kr.w_tilde, alpha, Method::Korn)?;
    iv.inputs.aux = AuxInputs::Korn {
        bits: seq.to_string(),
        rank: kr.rank,
        count: kr.count,
    };
    Ok(iv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intervals::cp_interval;
    use proptest::prelude::*;

    fn seq(s: &str) -> BernoulliSequence {
        s.parse().unwrap()
    }

    /// Brute-force ordering: all patterns sorted by (position sum, tuple).
    fn enumerate_ranks(n: u32, y: u32) -> Vec<Vec<u32>> {
        let mut pats: Vec<Vec<u32>> = (0u64..1 << n)
            .filter(|m| m.count_ones() == y)
            .map(|m| (1..=n).filter(|p| m >> (p - 1) & 1 == 1).collect())
            .collect();
        pats.sort_by_key(|p: &Vec<u32>| (p.iter().sum::<u32>(), p.clone()));
        pats
    }

    #[test]
    fn degenerate_blocks() {
        for s in ["11111", "00000", "1", "0"] {
            let kr = korn_rank(&seq(s));
            assert_eq!((kr.rank.get(), kr.count.get()), (1, 1));
            assert_eq!(kr.w, Level::from_integer(1));
            assert_eq!(kr.w_tilde, Level::from_integer(0));
        }
    }

    #[test]
    fn single_one_ranks_by_position() {
        for (s, r) in [("100", 1u128), ("010", 2), ("001", 3)] {
            let kr = korn_rank(&seq(s));
            assert_eq!(kr.rank.get(), r);
            assert_eq!(kr.w, Level::new(r, 3));
        }
    }

    #[test]
    fn matches_enumeration_oracle() {
        for n in 1..=10u32 {
            let ranker = KornRanker::new(n).unwrap();
            for y in 0..=n {
                let pats = enumerate_ranks(n, y);
                assert_eq!(pats.len() as u128, choose_u128(n, y));
                for (i, p) in pats.iter().enumerate() {
                    let s = BernoulliSequence::from_positions(n, p).unwrap();
                    let kr = ranker.rank(&s).unwrap();
                    assert_eq!(kr.rank.get(), i as u128 + 1, "n={n} y={y} {p:?}");
                    assert_eq!(ranker.unrank(y, i as u128 + 1).unwrap(), s);
                }
            }
        }
    }

    #[test]
    fn n5_y2_is_a_bijection() {
        let ranker = KornRanker::new(5).unwrap();
        let mut ranks: Vec<u128> = enumerate_ranks(5, 2)
            .iter()
            .map(|p| {
                let s = BernoulliSequence::from_positions(5, p).unwrap();
                ranker.rank(&s).unwrap().rank.get()
            })
            .collect();
        ranks.sort_unstable();
        assert_eq!(ranks, (1..=10).collect::<Vec<_>>());
    }

    #[test]
    fn subset_sum_table_rows_total_binomials() {
        let r = KornRanker::new(20).unwrap();
        for m in 0..=20 {
            for k in 0..=m {
                let total: u128 = r.table[m as usize][k as usize].iter().sum();
                assert_eq!(total, choose_u128(m, k));
            }
        }
    }

    #[test]
    fn large_n_rank_round_trips() {
        let r = KornRanker::new(47).unwrap();
        let count = choose_u128(47, 23);
        for rank in [1, 2, 12345, count / 2, count - 1, count] {
            let s = r.unrank(23, rank).unwrap();
            assert_eq!(s.y(), 23);
            assert_eq!(r.rank(&s).unwrap().rank.get(), rank);
        }
        let first = r.unrank(23, 1).unwrap();
        assert_eq!(first.positions(), (1..=23).collect::<Vec<_>>());
    }

    #[test]
    fn permutation_changes_rank_not_count() {
        let s = seq("11000");
        let reversed = s.permuted(&[4, 3, 2, 1, 0]).unwrap();
        assert_eq!(reversed.to_string(), "00011");
        assert_eq!(s.y(), reversed.y());
        assert_ne!(korn_rank(&s).rank, korn_rank(&reversed).rank);
        assert!(s.permuted(&[0, 0, 1, 2, 3]).is_err());
    }

    #[test]
    fn korn_interval_examples() {
        let top = korn_interval(&seq("11111"), 0.05).unwrap();
        assert_eq!(top.upper, 1.0);
        assert_eq!(top.upper, cp_interval(5, 5, 0.05).unwrap().upper);

        // Ones at the front hold rank 1, so W_tilde = 0 and the lower end is CP's.
        let cp = cp_interval(5, 2, 0.05).unwrap();
        let first = korn_interval(&seq("11000"), 0.05).unwrap();
        assert!(first.within(&cp, 0.0));
        assert!((first.lower - cp.lower).abs() < 1e-12);
        assert!(first.upper < cp.upper);

        let last = korn_interval(&seq("00011"), 0.05).unwrap();
        assert_eq!(korn_rank(&seq("00011")).w_tilde, Level::new(9, 10));
        assert!(last.within(&cp, 0.0));
        assert!(last.lower > cp.lower);
        assert!((last.upper - cp.upper).abs() < 1e-12);
        assert_ne!((first.lower, first.upper), (last.lower, last.upper));
    }

    #[test]
    fn parse_errors() {
        assert!("10a1".parse::<BernoulliSequence>().is_err());
        assert!("".parse::<BernoulliSequence>().is_err());
    }

    proptest! {
        #[test]
        fn rank_unrank_round_trip(n in 1u32..=40, mask in any::<u64>()) {
            let bits: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
            let s = BernoulliSequence::new(bits).unwrap();
            let r = KornRanker::new(n).unwrap();
            let kr = r.rank(&s).unwrap();
            prop_assert!(kr.rank.get() >= 1 && kr.rank <= kr.count);
            prop_assert_eq!(kr.w - kr.w_tilde, Level::new(1, kr.count.get()));
            prop_assert_eq!(r.unrank(s.y(), kr.rank.get()).unwrap(), s);
        }
    }
}
