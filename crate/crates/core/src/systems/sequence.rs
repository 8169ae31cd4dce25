use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::construct::BlockSchedule;
use crate::error::{Error, Result};

/// Indices compared before two sequences are declared equal (distance 0).
pub const DEFAULT_COMPARISON_BOUND: u64 = 1 << 16;

/// A one-sided infinite sequence over `{0, .., alphabet-1}` with a finite description.
///
/// `PrefixPeriodic` descriptions are kept canonical (primitive period, prefix
/// not ending in the period's last symbol), so for them structural equality
/// is sequence equality.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SequenceRepr", into = "SequenceRepr")]
pub struct SymbolicSequence {
    alphabet: u32,
    generator: Generator,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    PrefixPeriodic { prefix: Vec<u8>, period: Vec<u8> },
    /// A block program read from absolute index `offset` onwards.
    BlockProgram { program: Arc<BlockProgram>, offset: u64 },
}

/// Copies `proximal` on odd phases and `distal` on even phases of `schedule`,
/// time-aligned: index `i` reads index `i` of the copied sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockProgram {
    pub schedule: BlockSchedule,
    pub proximal: SymbolicSequence,
    pub distal: SymbolicSequence,
}

/// Result of scanning two sequences for their first differing index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Disagreement {
    At(u64),
    /// Proven equal at every index (both eventually periodic).
    Never,
    /// Equal on `[0, bound)`; undecided beyond.
    BeyondBound(u64),
}

impl SymbolicSequence {
    pub fn prefix_periodic(alphabet: u32, prefix: Vec<u8>, period: Vec<u8>) -> Result<Self> {
        if !(2..=256).contains(&alphabet) {
            return Err(Error::precondition(format!("alphabet size {alphabet} outside 2..=256")));
        }
        if period.is_empty() {
            return Err(Error::precondition("period word must be nonempty"));
        }
        if let Some(s) = prefix.iter().chain(&period).find(|&&s| s as u32 >= alphabet) {
            return Err(Error::precondition(format!("symbol {s} outside alphabet of size {alphabet}")));
        }
        let (prefix, period) = canonical(prefix, period);
        Ok(SymbolicSequence { alphabet, generator: Generator::PrefixPeriodic { prefix, period } })
    }

    /// The constant sequence `s s s ...`.
    pub fn constant(alphabet: u32, symbol: u8) -> Result<Self> {
        Self::prefix_periodic(alphabet, vec![], vec![symbol])
    }

    pub fn block_program(alphabet: u32, program: BlockProgram) -> Result<Self> {
        if program.proximal.alphabet > alphabet || program.distal.alphabet > alphabet {
            return Err(Error::precondition("block program sources exceed the alphabet"));
        }
        Ok(SymbolicSequence {
            alphabet,
            generator: Generator::BlockProgram { program: Arc::new(program), offset: 0 },
        })
    }

    pub fn alphabet(&self) -> u32 {
        self.alphabet
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn is_prefix_periodic(&self) -> bool {
        matches!(self.generator, Generator::PrefixPeriodic { .. })
    }

    /// `(prefix, period)` for eventually periodic descriptions.
    pub fn prefix_period(&self) -> Option<(&[u8], &[u8])> {
        match &self.generator {
            Generator::PrefixPeriodic { prefix, period } => Some((prefix, period)),
            Generator::BlockProgram { .. } => None,
        }
    }

    pub fn symbol_at(&self, i: u64) -> u8 {
        match &self.generator {
            Generator::PrefixPeriodic { prefix, period } => {
                let n = prefix.len() as u64;
                if i < n {
                    prefix[i as usize]
                } else {
                    period[((i - n) % period.len() as u64) as usize]
                }
            }
            Generator::BlockProgram { program, offset } => program.symbol_at(offset + i),
        }
    }

    pub fn word(&self, start: u64, len: usize) -> Vec<u8> {
        (0..len as u64).map(|j| self.symbol_at(start + j)).collect()
    }

    /// The sequence with its first `k` symbols removed.
    pub fn shifted(&self, k: u64) -> Self {
        let generator = match &self.generator {
            Generator::PrefixPeriodic { prefix, period } => {
                let n = prefix.len() as u64;
                if k <= n {
                    Generator::PrefixPeriodic { prefix: prefix[k as usize..].to_vec(), period: period.clone() }
                } else {
                    let r = ((k - n) % period.len() as u64) as usize;
                    let mut p = period.clone();
                    p.rotate_left(r);
                    Generator::PrefixPeriodic { prefix: vec![], period: p }
                }
            }
            Generator::BlockProgram { program, offset } => {
                Generator::BlockProgram { program: Arc::clone(program), offset: offset + k }
            }
        };
        SymbolicSequence { alphabet: self.alphabet, generator }
    }

    /// First index where `self` and `other` differ, scanning at most `bound` indices.
    pub fn first_disagreement(&self, other: &Self, bound: u64) -> Disagreement {
        if let (Some((p1, q1)), Some((p2, q2))) = (self.prefix_period(), other.prefix_period()) {
            if self == other {
                return Disagreement::Never;
            }
            let horizon = (p1.len().max(p2.len()) as u64).saturating_add((q1.len() as u64).lcm(&(q2.len() as u64)));
            if horizon <= bound {
                return match (0..horizon).find(|&i| self.symbol_at(i) != other.symbol_at(i)) {
                    Some(i) => Disagreement::At(i),
                    None => Disagreement::Never,
                };
            }
        }
        self.scan_disagreement(other, 0, bound)
    }

    /// First index in `[from, to)` where the sequences differ.
    pub fn scan_disagreement(&self, other: &Self, from: u64, to: u64) -> Disagreement {
        match (from..to).find(|&i| self.symbol_at(i) != other.symbol_at(i)) {
            Some(i) => Disagreement::At(i),
            None => Disagreement::BeyondBound(to),
        }
    }

    /// Largest symbol that can occur.
    pub fn max_symbol(&self) -> u8 {
        match &self.generator {
            Generator::PrefixPeriodic { prefix, period } => *prefix.iter().chain(period).max().unwrap(),
            Generator::BlockProgram { program, .. } => program.proximal.max_symbol().max(program.distal.max_symbol()),
        }
    }

    /// Eventual period length, when the description is eventually periodic.
    pub fn eventual_period(&self) -> Option<(usize, usize)> {
        self.prefix_period().map(|(p, q)| (p.len(), q.len()))
    }

    /// Parses `"101(0)"` (prefix then periodic block in parentheses) or a
    /// comma-separated form `"1,10(2,3)"` for alphabets beyond 10 symbols.
    pub fn parse(alphabet: u32, text: &str) -> Result<Self> {
        let text = text.trim();
        let (prefix, period) = match text.find('(') {
            Some(open) => {
                let close = text
                    .rfind(')')
                    .filter(|&c| c > open && c == text.len() - 1)
                    .ok_or_else(|| Error::Parse(format!("unbalanced parentheses in {text:?}")))?;
                (&text[..open], &text[open + 1..close])
            }
            None => return Err(Error::Parse(format!("missing periodic block \"(..)\" in {text:?}"))),
        };
        let comma_separated = alphabet > 10 || text.contains(',');
        let symbols = |s: &str| -> Result<Vec<u8>> {
            if s.is_empty() {
                return Ok(vec![]);
            }
            if comma_separated {
                s.split(',')
                    .map(|t| t.trim().parse::<u8>().map_err(|e| Error::Parse(format!("{t:?}: {e}"))))
                    .collect()
            } else {
                s.chars()
                    .map(|c| {
                        c.to_digit(10)
                            .map(|d| d as u8)
                            .ok_or_else(|| Error::Parse(format!("invalid symbol {c:?} in {text:?}")))
                    })
                    .collect()
            }
        };
        Self::prefix_periodic(alphabet, symbols(prefix)?, symbols(period)?)
    }
}

impl BlockProgram {
    pub fn symbol_at(&self, i: u64) -> u8 {
        if self.schedule.is_proximal(i) {
            self.proximal.symbol_at(i)
        } else {
            self.distal.symbol_at(i)
        }
    }
}

fn canonical(mut prefix: Vec<u8>, mut period: Vec<u8>) -> (Vec<u8>, Vec<u8>) {
    let n = period.len();
    if let Some(d) = (1..=n).find(|&d| n.is_multiple_of(d) && (d..n).all(|i| period[i] == period[i - d])) {
        period.truncate(d);
    }
    while let (Some(&last), Some(&tail)) = (prefix.last(), period.last()) {
        if last != tail {
            break;
        }
        prefix.pop();
        period.rotate_right(1);
    }
    (prefix, period)
}

fn write_symbols(f: &mut fmt::Formatter<'_>, symbols: &[u8], wide: bool) -> fmt::Result {
    if wide {
        let parts: Vec<String> = symbols.iter().map(|s| s.to_string()).collect();
        write!(f, "{}", parts.join(","))
    } else {
        symbols.iter().try_for_each(|s| write!(f, "{s}"))
    }
}

impl fmt::Display for SymbolicSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.generator {
            Generator::PrefixPeriodic { prefix, period } => {
                let wide = self.alphabet > 10;
                write_symbols(f, prefix, wide)?;
                write!(f, "(")?;
                write_symbols(f, period, wide)?;
                write!(f, ")")
            }
            Generator::BlockProgram { program, offset } => {
                write!(f, "block[{} | {} @{}]", program.proximal, program.distal, offset)
            }
        }
    }
}

impl fmt::Debug for SymbolicSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Serialize, Deserialize)]
struct SequenceRepr {
    alphabet: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    prefix: Option<Vec<u8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    period: Option<Vec<u8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    program: Option<Box<BlockProgram>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    offset: Option<u64>,
}

impl TryFrom<SequenceRepr> for SymbolicSequence {
    type Error = Error;
    fn try_from(r: SequenceRepr) -> Result<Self> {
        match (r.period, r.program) {
            (Some(period), None) => Self::prefix_periodic(r.alphabet, r.prefix.unwrap_or_default(), period),
            (None, Some(program)) => {
                let seq = Self::block_program(r.alphabet, *program)?;
                Ok(seq.shifted(r.offset.unwrap_or(0)))
            }
            _ => Err(Error::Parse("sequence needs exactly one of \"period\" or \"program\"".into())),
        }
    }
}

impl From<SymbolicSequence> for SequenceRepr {
    fn from(s: SymbolicSequence) -> Self {
        match s.generator {
            Generator::PrefixPeriodic { prefix, period } => SequenceRepr {
                alphabet: s.alphabet,
                prefix: Some(prefix),
                period: Some(period),
                program: None,
                offset: None,
            },
            Generator::BlockProgram { program, offset } => SequenceRepr {
                alphabet: s.alphabet,
                prefix: None,
                period: None,
                program: Some(Box::new((*program).clone())),
                offset: Some(offset),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(s: &str) -> SymbolicSequence {
        SymbolicSequence::parse(2, s).unwrap()
    }

    #[test]
    fn canonical_forms_identify_equal_sequences() {
        assert_eq!(seq("(0101)"), seq("(01)"));
        assert_eq!(seq("0(10)"), seq("(01)"));
        assert_eq!(seq("1000(0)"), seq("1(0)"));
        assert_ne!(seq("1(0)"), seq("(0)"));
        assert_eq!(seq("1(0)").to_string(), "1(0)");
    }

    #[test]
    fn shifting_drops_the_head() {
        assert_eq!(seq("101(0)").shifted(1), seq("01(0)"));
        assert_eq!(seq("(001)").shifted(4), seq("(010)"));
        assert_eq!(seq("11(01)").shifted(3), seq("(10)"));
    }

    #[test]
    fn disagreement_of_eventually_periodic_pairs_is_exact() {
        assert_eq!(seq("(0)").first_disagreement(&seq("(1)"), 16), Disagreement::At(0));
        assert_eq!(seq("(0)").first_disagreement(&seq("0(1)"), 16), Disagreement::At(1));
        assert_eq!(seq("(01)").first_disagreement(&seq("0101(01)"), 16), Disagreement::Never);
        assert_eq!(seq("(0)").first_disagreement(&seq("0000000000000000000001(0)"), 8), Disagreement::BeyondBound(8));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(SymbolicSequence::prefix_periodic(2, vec![2], vec![0]).is_err());
        assert!(SymbolicSequence::prefix_periodic(2, vec![], vec![]).is_err());
        assert!(SymbolicSequence::prefix_periodic(1, vec![], vec![0]).is_err());
        assert!(SymbolicSequence::parse(2, "0101").is_err());
    }

    #[test]
    fn wide_alphabet_text() {
        let s = SymbolicSequence::parse(12, "11,3(10)").unwrap();
        assert_eq!(s.symbol_at(0), 11);
        assert_eq!(s.symbol_at(5), 10);
        assert_eq!(s.to_string(), "11,3(10)");
    }

    #[test]
    fn json_shape() {
        let s = seq("1(0)");
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"{"alphabet":2,"prefix":[1],"period":[0]}"#);
        let back: SymbolicSequence = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }
}
