use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

/// How phase `k` scales with the total length `S_{k-1}` of the phases before it.
///
/// Every rule has the shape `L_1 = 1`, `L_k = c_k · S_{k-1}`, hence
/// `L_k / S_k = c_k / (c_k + 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum GrowthRule {
    /// `c_k = k`: phase fraction `k/(k+1)`.
    Linear,
    /// `c_k = base^(k-1)`.
    Geometric { base: u32 },
}

impl GrowthRule {
    pub fn multiplier(&self, k: u32) -> BigInt {
        match *self {
            GrowthRule::Linear => BigInt::from(k),
            GrowthRule::Geometric { base } => BigInt::from(base).pow(k - 1),
        }
    }
}

/// Alternating proximal/distal phase layout on the index line.
///
/// Phase `k` occupies `[S_{k-1}, S_k)`; odd phases are proximal, even phases
/// distal. Phase ends beyond `u64` are treated as never reached.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "GrowthRule", into = "GrowthRule")]
pub struct BlockSchedule {
    rule: GrowthRule,
    ends: Vec<u64>,
}

impl BlockSchedule {
    pub fn new(rule: GrowthRule) -> Self {
        if let GrowthRule::Geometric { base } = rule {
            assert!(base >= 1, "geometric growth base must be positive");
        }
        let mut ends = Vec::new();
        let mut total = BigInt::zero();
        let limit = BigInt::from(u64::MAX);
        for k in 1u32.. {
            let len = if k == 1 { BigInt::one() } else { rule.multiplier(k) * &total };
            total += len;
            if total > limit {
                break;
            }
            ends.push(u64::try_from(&total).unwrap());
        }
        BlockSchedule { rule, ends }
    }

    /// `L_k = k · S_{k-1}`.
    pub fn linear() -> Self {
        Self::new(GrowthRule::Linear)
    }

    pub fn rule(&self) -> GrowthRule {
        self.rule
    }

    /// Phase ends `S_1, S_2, ...` that fit in `u64`.
    pub fn ends(&self) -> &[u64] {
        &self.ends
    }

    /// Start and (exclusive) end of phase `k`; the end is `None` past `u64`.
    pub fn phase_bounds(&self, k: u32) -> (u64, Option<u64>) {
        assert!(k >= 1);
        let start = if k == 1 { 0 } else { self.ends.get(k as usize - 2).copied().unwrap_or(u64::MAX) };
        (start, self.ends.get(k as usize - 1).copied())
    }

    /// 1-based phase containing index `i`.
    pub fn phase_of(&self, i: u64) -> u32 {
        self.ends.partition_point(|&end| end <= i) as u32 + 1
    }

    pub fn is_proximal_phase(k: u32) -> bool {
        k % 2 == 1
    }

    pub fn is_proximal(&self, i: u64) -> bool {
        Self::is_proximal_phase(self.phase_of(i))
    }

    /// Exact `L_k` and `S_k`.
    pub fn exact_lengths(&self, k: u32) -> (BigInt, BigInt) {
        let mut total = BigInt::zero();
        let mut len = BigInt::zero();
        for j in 1..=k {
            len = if j == 1 { BigInt::one() } else { self.rule.multiplier(j) * &total };
            total += &len;
        }
        (len, total)
    }

    /// `L_k / S_k`, the share of the first `S_k` indices taken by phase `k`.
    pub fn tail_fraction(&self, k: u32) -> Ratio<BigInt> {
        let (len, total) = self.exact_lengths(k);
        Ratio::new(len, total)
    }

    /// Closed form `c_k / (c_k + 1)` of the tail fraction.
    pub fn predicted_tail_fraction(&self, k: u32) -> Ratio<BigInt> {
        if k == 1 {
            return Ratio::one();
        }
        let c = self.rule.multiplier(k);
        Ratio::new(c.clone(), c + 1)
    }
}

impl Default for BlockSchedule {
    /// `L_k = 16^(k-1) · S_{k-1}`: phase ends 1, 17, 4369, ~1.8·10^7, so a
    /// proximal and a distal phase both exceed density 0.99 below 10^6.
    fn default() -> Self {
        Self::new(GrowthRule::Geometric { base: 16 })
    }
}

impl From<GrowthRule> for BlockSchedule {
    fn from(rule: GrowthRule) -> Self {
        Self::new(rule)
    }
}

impl From<BlockSchedule> for GrowthRule {
    fn from(s: BlockSchedule) -> Self {
        s.rule
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_lengths() {
        let s = BlockSchedule::linear();
        let lens: Vec<u64> = (1..=5).map(|k| u64::try_from(s.exact_lengths(k).0).unwrap()).collect();
        assert_eq!(lens, vec![1, 2, 9, 48, 300]);
        assert_eq!(&s.ends()[..5], &[1, 3, 12, 60, 360]);
    }

    #[test]
    fn default_lengths() {
        let s = BlockSchedule::default();
        assert_eq!(&s.ends()[..4], &[1, 17, 4369, 17_899_793]);
    }

    #[test]
    fn tail_dominance_identity_up_to_40() {
        for rule in [GrowthRule::Linear, GrowthRule::Geometric { base: 16 }, GrowthRule::Geometric { base: 2 }] {
            let s = BlockSchedule::new(rule);
            for k in 1..=40 {
                assert_eq!(s.tail_fraction(k), s.predicted_tail_fraction(k), "{rule:?} k={k}");
            }
        }
        let s = BlockSchedule::linear();
        assert_eq!(s.tail_fraction(40), Ratio::new(BigInt::from(40), BigInt::from(41)));
    }

    #[test]
    fn phase_lookup() {
        let s = BlockSchedule::default();
        assert_eq!(s.phase_of(0), 1);
        assert_eq!(s.phase_of(1), 2);
        assert_eq!(s.phase_of(16), 2);
        assert_eq!(s.phase_of(17), 3);
        assert_eq!(s.phase_of(4368), 3);
        assert_eq!(s.phase_of(4369), 4);
        assert!(s.is_proximal(0) && !s.is_proximal(5) && s.is_proximal(100));
        assert_eq!(s.phase_bounds(3), (17, Some(4369)));
        assert_eq!(s.phase_of(u64::MAX), s.ends().len() as u32 + 1);
    }

    #[test]
    fn json_keeps_only_the_rule() {
        let s = BlockSchedule::default();
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"{"rule":"geometric","base":16}"#);
        let back: BlockSchedule = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }
}
