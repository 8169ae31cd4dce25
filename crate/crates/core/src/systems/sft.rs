//! One-sided subshifts of finite type given by forbidden words.

use std::collections::HashSet;

use crate::error::{Error, Result};

/// Longest forbidden word accepted.
pub const MAX_FORBIDDEN_LEN: usize = 32;
const STATE_CAP: usize = 1 << 20;

pub(crate) struct Sft<'a> {
    pub symbols: u32,
    pub forbidden: &'a [Vec<u8>],
    /// Number of trailing symbols that decide the next move.
    memory: usize,
}

impl<'a> Sft<'a> {
    pub fn new(symbols: u32, forbidden: &'a [Vec<u8>]) -> Result<Self> {
        if !(2..=256).contains(&symbols) {
            return Err(Error::InvalidSystem(format!("alphabet size {symbols} outside 2..=256")));
        }
        for w in forbidden {
            if w.is_empty() || w.len() > MAX_FORBIDDEN_LEN {
                return Err(Error::InvalidSystem(format!(
                    "forbidden word length {} outside 1..={MAX_FORBIDDEN_LEN}",
                    w.len()
                )));
            }
            if w.iter().any(|&s| s as u32 >= symbols) {
                return Err(Error::InvalidSystem(format!("forbidden word {w:?} uses a symbol outside the alphabet")));
            }
        }
        let memory = forbidden.iter().map(|w| w.len()).max().unwrap_or(1) - 1;
        Ok(Sft { symbols, forbidden, memory })
    }

    pub fn longest_forbidden(&self) -> usize {
        self.memory + 1
    }

    /// No forbidden word ends at the last position of `w`.
    fn suffix_ok(&self, w: &[u8]) -> bool {
        self.forbidden.iter().all(|f| !w.ends_with(f))
    }

    pub fn is_allowed(&self, w: &[u8]) -> bool {
        (1..=w.len()).all(|end| self.suffix_ok(&w[..end]))
    }

    fn state_of(&self, w: &[u8]) -> Vec<u8> {
        w[w.len().saturating_sub(self.memory)..].to_vec()
    }

    /// Whether `w` extends to an infinite allowed sequence.
    pub fn extends_forever(&self, w: &[u8]) -> Result<bool> {
        Ok(self.extension(w)?.is_some())
    }

    /// Symbols `(middle, cycle)` with `w middle cycle cycle ...` allowed, if any.
    pub fn extension(&self, w: &[u8]) -> Result<Option<(Vec<u8>, Vec<u8>)>> {
        if !self.is_allowed(w) {
            return Ok(None);
        }
        let mut dead = HashSet::new();
        let mut path: Vec<(Vec<u8>, u8)> = Vec::new();
        let mut buf = w.to_vec();
        Ok(self.search(&mut buf, &mut dead, &mut path)?.map(|start| {
            let symbols: Vec<u8> = path.iter().map(|&(_, s)| s).collect();
            (symbols[..start].to_vec(), symbols[start..].to_vec())
        }))
    }

    /// Depth-first search for a cycle of states reachable from the end of
    /// `buf`; returns the path index where the cycle starts.
    fn search(
        &self,
        buf: &mut Vec<u8>,
        dead: &mut HashSet<Vec<u8>>,
        path: &mut Vec<(Vec<u8>, u8)>,
    ) -> Result<Option<usize>> {
        let state = self.state_of(buf);
        if let Some(pos) = path.iter().position(|(st, _)| *st == state) {
            return Ok(Some(pos));
        }
        if dead.contains(&state) {
            return Ok(None);
        }
        if dead.len() + path.len() > STATE_CAP {
            return Err(Error::Budget("subshift language search exceeded its state cap".into()));
        }
        for s in 0..self.symbols as u8 {
            buf.push(s);
            if self.suffix_ok(buf) {
                path.push((state.clone(), s));
                if let Some(pos) = self.search(buf, dead, path)? {
                    return Ok(Some(pos));
                }
                path.pop();
            }
            buf.pop();
        }
        dead.insert(state);
        Ok(None)
    }

    /// An allowed, infinitely extendable word agreeing with every fixed
    /// position of `constraints`; `None` if there is none.
    pub fn complete(&self, constraints: &[Option<u8>]) -> Result<Option<Vec<u8>>> {
        let mut dead: HashSet<(usize, Vec<u8>)> = HashSet::new();
        let mut word = Vec::with_capacity(constraints.len());
        if self.fill(constraints, &mut word, &mut dead)? {
            Ok(Some(word))
        } else {
            Ok(None)
        }
    }

    fn fill(
        &self,
        constraints: &[Option<u8>],
        word: &mut Vec<u8>,
        dead: &mut HashSet<(usize, Vec<u8>)>,
    ) -> Result<bool> {
        let pos = word.len();
        if pos == constraints.len() {
            return self.extends_forever(word);
        }
        let key = (pos, self.state_of(word));
        if dead.contains(&key) {
            return Ok(false);
        }
        if dead.len() > STATE_CAP {
            return Err(Error::Budget("subshift word completion exceeded its state cap".into()));
        }
        let choices: Vec<u8> = match constraints[pos] {
            Some(s) => vec![s],
            None => (0..self.symbols as u8).collect(),
        };
        for s in choices {
            word.push(s);
            if self.suffix_ok(word) && self.fill(constraints, word, dead)? {
                return Ok(true);
            }
            word.pop();
        }
        dead.insert(key);
        Ok(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_mean_shift() {
        let forbidden = vec![vec![1, 1]];
        let sft = Sft::new(2, &forbidden).unwrap();
        assert!(sft.is_allowed(&[1, 0, 1]));
        assert!(!sft.is_allowed(&[0, 1, 1]));
        assert!(sft.extends_forever(&[1]).unwrap());
        let w = sft.complete(&[Some(1), None, Some(1)]).unwrap().unwrap();
        assert_eq!(w, vec![1, 0, 1]);
        assert!(sft.complete(&[Some(1), Some(1)]).unwrap().is_none());
        let (middle, cycle) = sft.extension(&[0, 1]).unwrap().unwrap();
        let mut w = vec![0, 1];
        w.extend(&middle);
        for _ in 0..4 {
            w.extend(&cycle);
        }
        assert!(sft.is_allowed(&w));
    }

    #[test]
    fn empty_language() {
        let forbidden = vec![vec![0], vec![1]];
        let sft = Sft::new(2, &forbidden).unwrap();
        assert!(!sft.extends_forever(&[]).unwrap());
        // Dead ends only: after "10" nothing is allowed.
        let forbidden = vec![vec![0, 0], vec![0, 1], vec![1, 1]];
        let sft = Sft::new(2, &forbidden).unwrap();
        assert!(!sft.extends_forever(&[]).unwrap());
    }
}
