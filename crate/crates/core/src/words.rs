//! Alphabet profiles, gapped and ungapped words, and their canonical orderings.
//!
//! Orderings are part of the file formats:
//! * `Σ_B` (ungapped words) is lexicographic with position 1 most significant.
//! * `V_{l,k}` (exactly `k` letters) is grouped by the set of lettered
//!   positions, groups taken in increasing bitmask order (bit `i` set for
//!   position `i + 1`), then lexicographic on the letters inside a group.
//!   For `B = (3,2), k = 1` this gives `0g 1g 2g g0 g1`.
//! * `V'_{l,<=k}` (letters drawn from `1..b_i`) is ordered by letter count,
//!   then as above; the all-gap word comes first.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symfunc::IntSeq;

/// Default bound on the size of any enumerated word set.
pub const DEFAULT_CAP: u64 = 1_000_000;

/// Longest supported word; position sets are stored as `u64` bitmasks.
pub const MAX_LENGTH: usize = 63;

/// The tuple `B = (b_1, ..., b_l)` of per-position alphabet sizes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlphabetProfile {
    sizes: Vec<u32>,
    cap: u64,
}

impl AlphabetProfile {
    pub fn new(sizes: Vec<u32>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidProfile("profile must have at least one position".into()));
        }
        if sizes.len() > MAX_LENGTH {
            return Err(Error::InvalidProfile(format!(
                "profile length {} exceeds the supported maximum of {MAX_LENGTH}",
                sizes.len()
            )));
        }
        if let Some((i, b)) = sizes.iter().enumerate().find(|(_, &b)| b < 2) {
            return Err(Error::InvalidProfile(format!(
                "alphabet size {b} at position {} is below 2",
                i + 1
            )));
        }
        Ok(AlphabetProfile {
            sizes,
            cap: DEFAULT_CAP,
        })
    }

    pub fn uniform(b: u32, l: usize) -> Result<Self> {
        Self::new(vec![b; l])
    }

    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }

    /// Parses `"3,2"` or a JSON list `"[3, 2]"`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let sizes: Vec<u32> = if s.starts_with('[') {
            serde_json::from_str(s)?
        } else {
            s.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<u32>()
                        .map_err(|e| Error::Parse(format!("alphabet size {t:?}: {e}")))
                })
                .collect::<Result<_>>()?
        };
        Self::new(sizes)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.sizes).expect("list of integers serializes")
    }

    pub fn sizes(&self) -> &[u32] {
        &self.sizes
    }

    pub fn size(&self, position: usize) -> u32 {
        self.sizes[position]
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    pub fn is_uniform(&self) -> bool {
        self.sizes.iter().all(|&b| b == self.sizes[0])
    }

    pub fn as_int_seq(&self) -> IntSeq {
        IntSeq::new(self.sizes.iter().map(|&b| b as i64).collect())
    }

    /// `prod b_i`.
    pub fn sigma_len(&self) -> BigInt {
        self.sizes.iter().map(|&b| BigInt::from(b)).product()
    }

    /// `B(G)`: the sizes at the positions of `set`, in increasing order.
    pub fn subseq(&self, set: PosSet) -> IntSeq {
        IntSeq::new(set.iter().map(|i| self.sizes[i] as i64).collect())
    }

    pub fn full_set(&self) -> PosSet {
        PosSet::full(self.len())
    }

    /// Letters are written without separators when every alphabet fits in
    /// one decimal digit.
    fn compact(&self) -> bool {
        self.sizes.iter().all(|&b| b <= 10)
    }

    pub fn format_word(&self, w: &Word) -> String {
        let parts = w.symbols.iter().map(|s| s.to_string());
        if self.compact() {
            parts.collect()
        } else {
            parts.collect::<Vec<_>>().join(",")
        }
    }

    pub fn parse_word(&self, s: &str) -> Result<Word> {
        let s = s.trim();
        let tokens: Vec<&str> = if s.contains(',') {
            s.split(',').map(str::trim).collect()
        } else if self.compact() {
            s.char_indices().map(|(i, c)| &s[i..i + c.len_utf8()]).collect()
        } else if self.len() == 1 && !s.is_empty() {
            vec![s]
        } else {
            return Err(Error::Parse(format!(
                "word {s:?} must be comma-separated for alphabets larger than 10"
            )));
        };
        let symbols = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| {
                if *t == "g" {
                    Ok(Symbol::Gap)
                } else {
                    t.parse::<u32>().map(Symbol::Letter).map_err(|_| Error::InvalidSymbol {
                        position: i + 1,
                        symbol: t.to_string(),
                        reason: "expected a letter index or 'g'".into(),
                    })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let w = Word::new(symbols);
        w.validate(self)?;
        Ok(w)
    }
}

impl Serialize for AlphabetProfile {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.sizes.serialize(s)
    }
}

impl<'de> Deserialize<'de> for AlphabetProfile {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let sizes = Vec::<u32>::deserialize(d)?;
        AlphabetProfile::new(sizes).map_err(serde::de::Error::custom)
    }
}

/// A subset of the positions `{0, ..., l-1}` stored as a bitmask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PosSet(pub u64);

impl PosSet {
    pub const EMPTY: PosSet = PosSet(0);

    pub fn full(l: usize) -> PosSet {
        PosSet(if l == 64 { u64::MAX } else { (1u64 << l) - 1 })
    }

    /// From 0-based positions.
    pub fn from_positions(positions: &[usize]) -> PosSet {
        PosSet(positions.iter().fold(0, |m, &p| m | 1 << p))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, o: PosSet) -> PosSet {
        PosSet(self.0 | o.0)
    }

    pub fn intersection(self, o: PosSet) -> PosSet {
        PosSet(self.0 & o.0)
    }

    pub fn difference(self, o: PosSet) -> PosSet {
        PosSet(self.0 & !o.0)
    }

    pub fn complement(self, l: usize) -> PosSet {
        PosSet::full(l).difference(self)
    }

    pub fn is_subset(self, o: PosSet) -> bool {
        self.0 & !o.0 == 0
    }

    /// Positions in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut m = self.0;
        std::iter::from_fn(move || {
            if m == 0 {
                None
            } else {
                let i = m.trailing_zeros() as usize;
                m &= m - 1;
                Some(i)
            }
        })
    }

    /// All subsets of `self`, in increasing bitmask order.
    pub fn subsets(self) -> impl Iterator<Item = PosSet> {
        let full = self.0;
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full {
                None
            } else {
                Some((cur.wrapping_sub(full)) & full)
            };
            Some(PosSet(cur))
        })
    }
}

impl fmt::Display for PosSet {
    /// 1-based, as `{2,4,5}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

/// All `n`-element subsets of `{0, ..., l-1}` in increasing bitmask order.
pub fn masks_of_size(l: usize, n: usize) -> impl Iterator<Item = PosSet> {
    let limit: u128 = 1u128 << l;
    let mut next: Option<u64> = if n > l {
        None
    } else if n == 0 {
        Some(0)
    } else {
        Some((1u64 << n) - 1)
    };
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 {
            None
        } else {
            // Gosper's hack
            let c = cur & cur.wrapping_neg();
            let r = cur.wrapping_add(c);
            let nx = (((r ^ cur) >> 2) / c) | r;
            if r == 0 || (nx as u128) >= limit {
                None
            } else {
                Some(nx)
            }
        };
        Some(PosSet(cur))
    })
}

/// One position of a word. The derived order is `0 < 1 < ... < b-1 < g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Letter(u32),
    Gap,
}

impl Symbol {
    pub fn is_gap(self) -> bool {
        matches!(self, Symbol::Gap)
    }

    pub fn letter(self) -> Option<u32> {
        match self {
            Symbol::Letter(a) => Some(a),
            Symbol::Gap => None,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Letter(a) => write!(f, "{a}"),
            Symbol::Gap => f.write_str("g"),
        }
    }
}

/// A length-`l` word over `Δ_B`: each position holds a letter or the gap.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    symbols: Vec<Symbol>,
}

impl Word {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        Word { symbols }
    }

    pub fn from_letters(letters: &[u32]) -> Self {
        Word::new(letters.iter().map(|&a| Symbol::Letter(a)).collect())
    }

    pub fn all_gap(l: usize) -> Self {
        Word::new(vec![Symbol::Gap; l])
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// `G_v`.
    pub fn gap_set(&self) -> PosSet {
        PosSet(
            self.symbols
                .iter()
                .enumerate()
                .filter(|(_, s)| s.is_gap())
                .fold(0, |m, (i, _)| m | 1 << i),
        )
    }

    /// `Ḡ_v`, the lettered positions.
    pub fn letter_set(&self) -> PosSet {
        self.gap_set().complement(self.len())
    }

    pub fn gap_count(&self) -> usize {
        self.symbols.iter().filter(|s| s.is_gap()).count()
    }

    pub fn is_gap_free(&self) -> bool {
        self.gap_count() == 0
    }

    /// Checks length and letter ranges against `profile`.
    pub fn validate(&self, profile: &AlphabetProfile) -> Result<()> {
        if self.len() != profile.len() {
            return Err(Error::ProfileMismatch(format!(
                "word of length {} used with a profile of length {}",
                self.len(),
                profile.len()
            )));
        }
        for (i, s) in self.symbols.iter().enumerate() {
            if let Symbol::Letter(a) = s {
                if *a >= profile.size(i) {
                    return Err(Error::InvalidSymbol {
                        position: i + 1,
                        symbol: a.to_string(),
                        reason: format!("alphabet at this position has size {}", profile.size(i)),
                    });
                }
            }
        }
        Ok(())
    }

    /// Componentwise `self ⪯ other` under `0 < 1 < ... < g`.
    pub fn precedes_eq(&self, other: &Word) -> bool {
        self.symbols.iter().zip(&other.symbols).all(|(a, b)| a <= b)
    }
}

impl std::ops::Index<usize> for Word {
    type Output = Symbol;
    fn index(&self, i: usize) -> &Symbol {
        &self.symbols[i]
    }
}

/// `G_v`, `P(u,v)`, `Q(u,v)`: gapped, matching and mismatching positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PositionSets {
    pub gaps: PosSet,
    pub matches: PosSet,
    pub mismatches: PosSet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpaceKind {
    /// `Σ_B`.
    Sigma,
    /// `V_{l,k;B}`.
    Gapped(usize),
    /// `V'_{l,<=k;B}`.
    PrimeUpTo(usize),
}

#[derive(Clone, Debug)]
struct Block {
    mask: PosSet,
    offset: usize,
    count: usize,
}

/// A canonically ranked word set (`Σ_B`, `V_{l,k}` or `V'_{l,<=k}`).
#[derive(Clone, Debug)]
pub struct WordSpace {
    profile: AlphabetProfile,
    kind: SpaceKind,
    blocks: Vec<Block>,
    block_of_mask: HashMap<PosSet, usize>,
    len: usize,
}

impl WordSpace {
    pub fn sigma(profile: &AlphabetProfile) -> Result<Self> {
        Self::build(profile, SpaceKind::Sigma)
    }

    pub fn gapped(profile: &AlphabetProfile, k: usize) -> Result<Self> {
        Self::build(profile, SpaceKind::Gapped(k))
    }

    pub fn prime_up_to(profile: &AlphabetProfile, k: usize) -> Result<Self> {
        Self::build(profile, SpaceKind::PrimeUpTo(k))
    }

    fn build(profile: &AlphabetProfile, kind: SpaceKind) -> Result<Self> {
        let l = profile.len();
        let (letter_counts, prime) = match kind {
            SpaceKind::Sigma => (l..=l, false),
            SpaceKind::Gapped(k) => {
                check_k(l, k)?;
                (k..=k, false)
            }
            SpaceKind::PrimeUpTo(k) => {
                check_k(l, k)?;
                (0..=k, true)
            }
        };
        let cap = profile.cap() as u128;
        let mut blocks = Vec::new();
        let mut block_of_mask = HashMap::new();
        let mut total: u128 = 0;
        for n in letter_counts {
            for mask in masks_of_size(l, n) {
                let count: u128 = mask
                    .iter()
                    .map(|i| {
                        let b = profile.size(i) as u128;
                        if prime {
                            b - 1
                        } else {
                            b
                        }
                    })
                    .fold(1u128, |acc, r| acc.saturating_mul(r));
                total = total.saturating_add(count);
                if total > cap {
                    return Err(Error::CapExceeded {
                        requested: total,
                        cap: profile.cap(),
                    });
                }
                block_of_mask.insert(mask, blocks.len());
                blocks.push(Block {
                    mask,
                    offset: (total - count) as usize,
                    count: count as usize,
                });
            }
        }
        Ok(WordSpace {
            profile: profile.clone(),
            kind,
            blocks,
            block_of_mask,
            len: total as usize,
        })
    }

    pub fn profile(&self) -> &AlphabetProfile {
        &self.profile
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    fn prime(&self) -> bool {
        matches!(self.kind, SpaceKind::PrimeUpTo(_))
    }

    fn radix(&self, i: usize) -> usize {
        let b = self.profile.size(i) as usize;
        if self.prime() {
            b - 1
        } else {
            b
        }
    }

    /// First rank of the group whose lettered positions are `mask`.
    pub fn block_offset(&self, mask: PosSet) -> Option<usize> {
        self.block_of_mask.get(&mask).map(|&i| self.blocks[i].offset)
    }

    /// Position of `w` in the canonical order, or `None` if `w` is not in the set.
    pub fn rank(&self, w: &Word) -> Option<usize> {
        if w.len() != self.profile.len() {
            return None;
        }
        let mask = w.letter_set();
        let block = &self.blocks[*self.block_of_mask.get(&mask)?];
        let base = if self.prime() { 1 } else { 0 };
        let mut idx = 0usize;
        for i in mask.iter() {
            let a = w[i].letter()? as usize;
            if a < base || a >= self.profile.size(i) as usize {
                return None;
            }
            idx = idx * self.radix(i) + (a - base);
        }
        Some(block.offset + idx)
    }

    pub fn unrank(&self, rank: usize) -> Option<Word> {
        if rank >= self.len {
            return None;
        }
        let bi = self.blocks.partition_point(|b| b.offset <= rank) - 1;
        let block = &self.blocks[bi];
        let mut rem = rank - block.offset;
        debug_assert!(rem < block.count);
        let base = if self.prime() { 1 } else { 0 };
        let mut symbols = vec![Symbol::Gap; self.profile.len()];
        let positions: Vec<usize> = block.mask.iter().collect();
        for &i in positions.iter().rev() {
            let r = self.radix(i);
            symbols[i] = Symbol::Letter((rem % r + base) as u32);
            rem /= r;
        }
        Some(Word::new(symbols))
    }

    /// Words in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = Word> + '_ {
        (0..self.len).map(move |r| self.unrank(r).expect("rank in range"))
    }

    pub fn words(&self) -> Vec<Word> {
        self.iter().collect()
    }
}

fn check_k(l: usize, k: usize) -> Result<()> {
    if k > l {
        return Err(Error::InvalidProfile(format!("k = {k} exceeds word length {l}")));
    }
    Ok(())
}

/// `Σ_B` in lexicographic order.
pub fn enumerate_sigma(profile: &AlphabetProfile) -> Result<Vec<Word>> {
    Ok(WordSpace::sigma(profile)?.words())
}

/// `V_{l,k;B}`: words with exactly `l - k` gaps.
pub fn enumerate_v(profile: &AlphabetProfile, k: usize) -> Result<Vec<Word>> {
    Ok(WordSpace::gapped(profile, k)?.words())
}

/// `V'_{l,<=k;B}`: words over `Γ_B` (no letter 0) with at most `k` letters.
pub fn enumerate_vprime_le(profile: &AlphabetProfile, k: usize) -> Result<Vec<Word>> {
    Ok(WordSpace::prime_up_to(profile, k)?.words())
}

fn require_gap_free(u: &Word) -> Result<()> {
    if !u.is_gap_free() {
        return Err(Error::ArityMismatch {
            expected: 0,
            found: u.gap_count(),
        });
    }
    Ok(())
}

fn require_same_length(u: &Word, v: &Word) -> Result<()> {
    if u.len() != v.len() {
        return Err(Error::ProfileMismatch(format!(
            "words of lengths {} and {}",
            u.len(),
            v.len()
        )));
    }
    Ok(())
}

/// `u ~ v`: `u` agrees with `v` at every lettered position of `v`.
pub fn matches(u: &Word, v: &Word) -> Result<bool> {
    require_same_length(u, v)?;
    require_gap_free(u)?;
    Ok(u.symbols
        .iter()
        .zip(&v.symbols)
        .all(|(a, b)| b.is_gap() || a == b))
}

pub fn position_sets(u: &Word, v: &Word) -> Result<PositionSets> {
    require_same_length(u, v)?;
    require_gap_free(u)?;
    let mut sets = PositionSets {
        gaps: PosSet::EMPTY,
        matches: PosSet::EMPTY,
        mismatches: PosSet::EMPTY,
    };
    for (i, (a, b)) in u.symbols.iter().zip(&v.symbols).enumerate() {
        let bit = PosSet(1 << i);
        if b.is_gap() {
            sets.gaps = sets.gaps.union(bit);
        } else if a == b {
            sets.matches = sets.matches.union(bit);
        } else {
            sets.mismatches = sets.mismatches.union(bit);
        }
    }
    Ok(sets)
}

/// `B(G)`.
pub fn subseq_profile(profile: &AlphabetProfile, set: PosSet) -> IntSeq {
    profile.subseq(set)
}

/// `M_{l,k}(u)`: the gapped words in `V_{l,k}` that match `u`, in canonical order.
pub fn match_neighbors(u: &Word, k: usize) -> Result<Vec<Word>> {
    require_gap_free(u)?;
    let l = u.len();
    check_k(l, k)?;
    Ok(masks_of_size(l, k)
        .map(|mask| {
            Word::new(
                (0..l)
                    .map(|i| if mask.contains(i) { u[i] } else { Symbol::Gap })
                    .collect(),
            )
        })
        .collect())
}

/// `M'(v)`: the ungapped words matching `v`, in lexicographic order.
pub fn match_extensions(profile: &AlphabetProfile, v: &Word) -> Result<Vec<Word>> {
    v.validate(profile)?;
    let gaps: Vec<usize> = v.gap_set().iter().collect();
    let count: u128 = gaps
        .iter()
        .map(|&i| profile.size(i) as u128)
        .fold(1, |a, b| a.saturating_mul(b));
    if count > profile.cap() as u128 {
        return Err(Error::CapExceeded {
            requested: count,
            cap: profile.cap(),
        });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut symbols = v.symbols.clone();
    for &i in &gaps {
        symbols[i] = Symbol::Letter(0);
    }
    'outer: loop {
        out.push(Word::new(symbols.clone()));
        for &i in gaps.iter().rev() {
            let Symbol::Letter(a) = symbols[i] else { unreachable!() };
            if a + 1 < profile.size(i) {
                symbols[i] = Symbol::Letter(a + 1);
                continue 'outer;
            }
            symbols[i] = Symbol::Letter(0);
        }
        break;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symfunc::{binomial, elem_sym, r_poly};
    use proptest::prelude::*;

    fn prof(b: &[u32]) -> AlphabetProfile {
        AlphabetProfile::new(b.to_vec()).unwrap()
    }

    fn fmt_all(p: &AlphabetProfile, ws: &[Word]) -> Vec<String> {
        ws.iter().map(|w| p.format_word(w)).collect()
    }

    #[test]
    fn profile_validation() {
        assert!(AlphabetProfile::new(vec![]).is_err());
        assert!(AlphabetProfile::new(vec![3, 1]).is_err());
        assert!(AlphabetProfile::new(vec![2; 64]).is_err());
        assert_eq!(AlphabetProfile::parse("3, 2").unwrap().sizes(), &[3, 2]);
        assert_eq!(AlphabetProfile::parse("[4,4,2]").unwrap().sizes(), &[4, 4, 2]);
        assert_eq!(prof(&[3, 2]).to_json(), "[3,2]");
    }

    #[test]
    fn sigma_order() {
        let p = prof(&[3, 2]);
        let s = enumerate_sigma(&p).unwrap();
        assert_eq!(fmt_all(&p, &s), ["00", "01", "10", "11", "20", "21"]);
        let p = prof(&[2]);
        assert_eq!(fmt_all(&p, &enumerate_sigma(&p).unwrap()), ["0", "1"]);
        let p = prof(&[2, 2, 2]);
        let s = fmt_all(&p, &enumerate_sigma(&p).unwrap());
        assert_eq!(s.len(), 8);
        assert_eq!(s.first().unwrap(), "000");
        assert_eq!(s.last().unwrap(), "111");
    }

    #[test]
    fn gapped_order() {
        let p = prof(&[3, 2]);
        assert_eq!(fmt_all(&p, &enumerate_v(&p, 1).unwrap()), ["0g", "1g", "2g", "g0", "g1"]);
        assert_eq!(fmt_all(&p, &enumerate_v(&p, 0).unwrap()), ["gg"]);
        assert_eq!(
            fmt_all(&p, &enumerate_v(&p, 2).unwrap()),
            fmt_all(&p, &enumerate_sigma(&p).unwrap())
        );
        assert!(enumerate_v(&p, 3).is_err());
    }

    #[test]
    fn prime_order() {
        let p = prof(&[3, 2]);
        assert_eq!(fmt_all(&p, &enumerate_vprime_le(&p, 1).unwrap()), ["gg", "1g", "2g", "g1"]);
        let p = prof(&[2, 3]);
        assert_eq!(fmt_all(&p, &enumerate_vprime_le(&p, 1).unwrap()), ["gg", "1g", "g1", "g2"]);
        let p = prof(&[4, 2, 3]);
        assert_eq!(fmt_all(&p, &enumerate_vprime_le(&p, 0).unwrap()), ["ggg"]);
    }

    #[test]
    fn cap_is_enforced() {
        let p = prof(&[4; 12]).with_cap(1000);
        assert!(matches!(WordSpace::sigma(&p), Err(Error::CapExceeded { .. })));
        assert!(WordSpace::gapped(&p, 1).is_ok());
        assert!(matches!(
            match_extensions(&p, &Word::all_gap(12)),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn matching() {
        let p = prof(&[3, 2]);
        let w = |s: &str| p.parse_word(s).unwrap();
        assert!(matches(&w("00"), &w("0g")).unwrap());
        assert!(!matches(&w("10"), &w("0g")).unwrap());
        assert!(matches(&w("21"), &w("21")).unwrap());
        assert!(matches(&w("0g"), &w("00")).is_err());
        assert!(matches(&w("00"), &Word::all_gap(3)).is_err());
    }

    #[test]
    fn position_set_examples() {
        let p = prof(&[3, 2]);
        let w = |s: &str| p.parse_word(s).unwrap();
        let s = position_sets(&w("00"), &w("0g")).unwrap();
        assert_eq!((s.gaps, s.matches, s.mismatches), (PosSet(0b10), PosSet(0b01), PosSet::EMPTY));
        let s = position_sets(&w("00"), &w("1g")).unwrap();
        assert_eq!((s.gaps, s.matches, s.mismatches), (PosSet(0b10), PosSet::EMPTY, PosSet(0b01)));

        let p7 = prof(&[2, 3, 3, 3, 4, 4, 4]);
        let v = p7.parse_word("1g2gg12").unwrap();
        assert_eq!(v.gap_set().to_string(), "{2,4,5}");
        let u = p7.parse_word("1020012").unwrap();
        assert_eq!(position_sets(&u, &v).unwrap().gaps.to_string(), "{2,4,5}");
        // positions 2,4,5 carry sizes (3,3,4)
        assert_eq!(subseq_profile(&p7, v.gap_set()).values(), &[3, 3, 4]);
    }

    #[test]
    fn subsequences() {
        let p = prof(&[3, 2]);
        assert_eq!(subseq_profile(&p, PosSet::from_positions(&[1])).values(), &[2]);
        assert_eq!(subseq_profile(&p, PosSet::from_positions(&[0, 1])).values(), &[3, 2]);
        assert!(subseq_profile(&p, PosSet::EMPTY).is_empty());
    }

    #[test]
    fn neighbors_and_extensions() {
        let p = prof(&[3, 2]);
        let w = |s: &str| p.parse_word(s).unwrap();
        // oracle: filter all of V_{2,1}
        let brute: Vec<Word> = enumerate_v(&p, 1)
            .unwrap()
            .into_iter()
            .filter(|v| matches(&w("00"), v).unwrap())
            .collect();
        assert_eq!(fmt_all(&p, &brute), ["0g", "g0"]);
        assert_eq!(match_neighbors(&w("00"), 1).unwrap(), brute);
        assert_eq!(match_neighbors(&w("21"), 2).unwrap(), vec![w("21")]);
        assert_eq!(match_neighbors(&w("21"), 0).unwrap(), vec![w("gg")]);

        assert_eq!(fmt_all(&p, &match_extensions(&p, &w("g0")).unwrap()), ["00", "10", "20"]);
        assert_eq!(match_extensions(&p, &w("11")).unwrap(), vec![w("11")]);
        assert_eq!(match_extensions(&p, &w("gg")).unwrap(), enumerate_sigma(&p).unwrap());
    }

    #[test]
    fn wide_alphabets_use_commas() {
        let p = prof(&[12, 3]);
        let v = p.parse_word("11,g").unwrap();
        assert_eq!(p.format_word(&v), "11,g");
        assert!(p.parse_word("12,0").is_err());
        assert!(p.parse_word("110").is_err());
        let single = prof(&[20]);
        assert_eq!(single.parse_word("17").unwrap(), Word::from_letters(&[17]));
    }

    #[test]
    fn gosper_enumeration() {
        let masks: Vec<u64> = masks_of_size(4, 2).map(|m| m.0).collect();
        assert_eq!(masks, [0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100]);
        assert_eq!(masks_of_size(3, 0).count(), 1);
        assert_eq!(masks_of_size(3, 3).count(), 1);
        assert_eq!(masks_of_size(3, 4).count(), 0);
        assert_eq!(masks_of_size(63, 63).count(), 1);
        let subs: Vec<u64> = PosSet(0b101).subsets().map(|m| m.0).collect();
        assert_eq!(subs, [0, 1, 4, 5]);
    }

    fn profile_strategy(max_len: usize, max_b: u32) -> impl Strategy<Value = AlphabetProfile> {
        prop::collection::vec(2u32..=max_b, 1..=max_len)
            .prop_map(|b| AlphabetProfile::new(b).unwrap())
    }

    proptest! {
        #[test]
        fn counting_identities(p in profile_strategy(5, 4)) {
            let b = p.as_int_seq();
            let l = p.len();
            prop_assert_eq!(BigInt::from(enumerate_sigma(&p).unwrap().len()), p.sigma_len());
            for k in 0..=l {
                let v = enumerate_v(&p, k).unwrap();
                prop_assert_eq!(BigInt::from(v.len()), elem_sym(&b, k as i64));
                let vp = enumerate_vprime_le(&p, k).unwrap();
                prop_assert_eq!(BigInt::from(vp.len()), r_poly(&b, k as i64));
                prop_assert_eq!(&vp[0], &Word::all_gap(l));
                for x in &v {
                    let expected: u64 = x.gap_set().iter().map(|i| p.size(i) as u64).product();
                    prop_assert_eq!(match_extensions(&p, x).unwrap().len() as u64, expected);
                }
            }
            for u in enumerate_sigma(&p).unwrap().iter().take(10) {
                for k in 0..=l {
                    prop_assert_eq!(
                        BigInt::from(match_neighbors(u, k).unwrap().len()),
                        binomial(l as u64, k as u64)
                    );
                }
            }
        }

        #[test]
        fn rank_round_trip(p in profile_strategy(5, 4)) {
            let l = p.len();
            let mut spaces = vec![WordSpace::sigma(&p).unwrap()];
            for k in 0..=l {
                spaces.push(WordSpace::gapped(&p, k).unwrap());
                spaces.push(WordSpace::prime_up_to(&p, k).unwrap());
            }
            for space in &spaces {
                let words = space.words();
                let mut sorted_unique = words.clone();
                sorted_unique.dedup();
                prop_assert_eq!(sorted_unique.len(), words.len());
                for (r, w) in words.iter().enumerate() {
                    prop_assert_eq!(space.rank(w), Some(r));
                    let back = space.unrank(r);
                    prop_assert_eq!(back.as_ref(), Some(w));
                    let text = p.format_word(w);
                    prop_assert_eq!(&p.parse_word(&text).unwrap(), w);
                }
                prop_assert!(space.unrank(words.len()).is_none());
            }
        }

        #[test]
        fn position_sets_partition(p in profile_strategy(6, 5), seed in any::<u64>()) {
            let l = p.len();
            let mut s = seed;
            let mut next = |m: u32| { s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407); ((s >> 33) % m as u64) as u32 };
            let u = Word::from_letters(&(0..l).map(|i| next(p.size(i))).collect::<Vec<_>>());
            let v = Word::new((0..l).map(|i| {
                let r = next(p.size(i) + 1);
                if r == p.size(i) { Symbol::Gap } else { Symbol::Letter(r) }
            }).collect());
            let sets = position_sets(&u, &v).unwrap();
            prop_assert!(sets.gaps.intersection(sets.matches).is_empty());
            prop_assert!(sets.gaps.intersection(sets.mismatches).is_empty());
            prop_assert!(sets.matches.intersection(sets.mismatches).is_empty());
            prop_assert_eq!(sets.gaps.union(sets.matches).union(sets.mismatches), p.full_set());
            prop_assert_eq!(sets.gaps, v.gap_set());
            prop_assert_eq!(sets.matches.len() + sets.mismatches.len(), v.letter_set().len());
            prop_assert_eq!(matches(&u, &v).unwrap(), sets.mismatches.is_empty());
        }
    }
}
