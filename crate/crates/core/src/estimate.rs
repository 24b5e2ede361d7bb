//! ℓ-mer count estimation from gapped k-mer counts.
//!
//! Sequences are read from a line-based TSV (`id<TAB>symbols`). A position
//! class map assigns an alphabet size to each sequence position, cycling
//! with a fixed period; the default map gives every position the same
//! alphabet. Windows of length `l` slide by one, and a window at offset `s`
//! is counted only when `s` is a multiple of the period, so that its
//! positions line up with the profile `B`.
//!
//! From the ℓ-mer counts `n` the gapped counts are `c = A n`, and the
//! estimate is `W c`, which equals `H n`.

use std::io::{BufRead, Write};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{format_value, NumberFormat};
use crate::par::Execution;
use crate::pinv::PinvOperator;
use crate::words::{AlphabetProfile, Word, WordSpace};

/// Cyclic assignment of alphabet sizes to sequence positions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassMap {
    /// Alphabet size of each class; position `j` has class `j mod period`.
    pub alphabet_sizes: Vec<u32>,
    /// Defaults to `alphabet_sizes.len()`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<usize>,
}

impl ClassMap {
    /// One class for every position.
    pub fn constant(b: u32) -> Self {
        ClassMap {
            alphabet_sizes: vec![b],
            period: None,
        }
    }

    /// The default map for `profile`: constant when `B` is uniform, otherwise
    /// `B` itself repeated with period `l`.
    pub fn default_for(profile: &AlphabetProfile) -> Self {
        if profile.is_uniform() {
            Self::constant(profile.size(0))
        } else {
            ClassMap {
                alphabet_sizes: profile.sizes().to_vec(),
                period: None,
            }
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let map: ClassMap = serde_json::from_str(s)?;
        map.period()?;
        Ok(map)
    }

    /// The period, checked against the class list.
    pub fn period(&self) -> Result<usize> {
        let n = self.alphabet_sizes.len();
        if n == 0 {
            return Err(Error::MapMismatch("class map has no classes".into()));
        }
        if let Some(&b) = self.alphabet_sizes.iter().find(|&&b| b < 2) {
            return Err(Error::MapMismatch(format!("class alphabet size {b} is below 2")));
        }
        match self.period {
            None => Ok(n),
            Some(p) if p == n => Ok(p),
            Some(p) => Err(Error::MapMismatch(format!(
                "period {p} does not match the {n} listed classes"
            ))),
        }
    }

    pub fn size_at(&self, position: usize) -> u32 {
        self.alphabet_sizes[position % self.alphabet_sizes.len()]
    }

    /// Checks that aligned windows see exactly `B`.
    pub fn check_profile(&self, profile: &AlphabetProfile) -> Result<()> {
        self.period()?;
        let window: Vec<u32> = (0..profile.len()).map(|i| self.size_at(i)).collect();
        if window != profile.sizes() {
            return Err(Error::MapMismatch(format!(
                "aligned windows have alphabet sizes {window:?}, profile is {:?}",
                profile.sizes()
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceRecord {
    pub id: String,
    pub symbols: Vec<u32>,
}

/// Parses `id<TAB>symbols`. Symbols are single digits when every class
/// alphabet has at most 10 letters and comma-separated otherwise. Blank
/// lines and lines starting with `#` are skipped.
pub fn read_sequences<R: BufRead>(input: R, map: &ClassMap) -> Result<Vec<SequenceRecord>> {
    map.period()?;
    let compact = map.alphabet_sizes.iter().all(|&b| b <= 10);
    let mut out = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let line = line?;
        let t = line.trim_end_matches(['\r', '\n']);
        if t.trim().is_empty() || t.starts_with('#') {
            continue;
        }
        let (id, seq) = t
            .split_once('\t')
            .ok_or_else(|| Error::Parse(format!("line {}: expected id<TAB>symbols", n + 1)))?;
        let seq = seq.trim();
        let tokens: Vec<&str> = if seq.is_empty() {
            Vec::new()
        } else if compact && !seq.contains(',') {
            seq.char_indices().map(|(i, c)| &seq[i..i + c.len_utf8()]).collect()
        } else {
            seq.split(',').map(str::trim).collect()
        };
        let symbols = tokens
            .iter()
            .enumerate()
            .map(|(j, tok)| {
                let bad = |reason: String| Error::InvalidSymbol {
                    position: j + 1,
                    symbol: tok.to_string(),
                    reason: format!("record {id:?}: {reason}"),
                };
                let a: u32 = tok.parse().map_err(|_| bad("not a letter index".into()))?;
                let b = map.size_at(j);
                if a >= b {
                    return Err(bad(format!("position class has alphabet size {b}")));
                }
                Ok(a)
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(SequenceRecord {
            id: id.to_string(),
            symbols,
        });
    }
    Ok(out)
}

/// ℓ-mer counts `n` over `Σ_B` (lexicographic order).
pub fn count_lmers(profile: &AlphabetProfile, map: &ClassMap, records: &[SequenceRecord]) -> Result<Vec<BigInt>> {
    map.check_profile(profile)?;
    let period = map.period()?;
    let sigma = WordSpace::sigma(profile)?;
    let l = profile.len();
    let mut counts = vec![BigInt::zero(); sigma.len()];
    for rec in records {
        if rec.symbols.len() < l {
            continue;
        }
        for s in (0..=rec.symbols.len() - l).step_by(period) {
            let w = Word::from_letters(&rec.symbols[s..s + l]);
            let r = sigma.rank(&w).ok_or_else(|| Error::InvalidSymbol {
                position: s + 1,
                symbol: profile.format_word(&w),
                reason: format!("record {:?}: window is not a word of the profile", rec.id),
            })?;
            counts[r] += BigInt::one();
        }
    }
    Ok(counts)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Estimate {
    pub words: Vec<Word>,
    /// `n`.
    pub observed: Vec<BigInt>,
    /// `c = A n`, indexed by `V_{l,k}`.
    pub gapped: Vec<BigInt>,
    /// `W c`.
    pub estimate: Vec<BigRational>,
}

/// Runs the full pipeline on parsed records.
pub fn estimate_counts(
    profile: &AlphabetProfile,
    k: usize,
    map: &ClassMap,
    records: &[SequenceRecord],
    exec: Execution,
) -> Result<Estimate> {
    let observed = count_lmers(profile, map, records)?;
    let op = PinvOperator::with_execution(profile, k, exec)?;
    let gapped = op.incidence().apply(&observed)?;
    let estimate = op.apply_w_integer(&gapped)?;
    Ok(Estimate {
        words: op.incidence().cols().words(),
        observed,
        gapped,
        estimate,
    })
}

/// `word<TAB>observed<TAB>estimate` with a header line.
pub fn write_estimate_tsv<W: Write>(
    profile: &AlphabetProfile,
    est: &Estimate,
    format: NumberFormat,
    mut out: W,
) -> Result<()> {
    writeln!(out, "word\tobserved\testimate")?;
    for ((w, n), e) in est.words.iter().zip(&est.observed).zip(&est.estimate) {
        writeln!(out, "{}\t{}\t{}", profile.format_word(w), n, format_value(e, format))?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pinv::{h_apply, materialize_h};

    fn prof(b: &[u32]) -> AlphabetProfile {
        AlphabetProfile::new(b.to_vec()).unwrap()
    }

    fn recs(map: &ClassMap, text: &str) -> Vec<SequenceRecord> {
        read_sequences(text.as_bytes(), map).unwrap()
    }

    #[test]
    fn single_lmer_gives_h_column() {
        let p = prof(&[3, 2]);
        let map = ClassMap::default_for(&p);
        let r = recs(&map, "s1\t21\n");
        let est = estimate_counts(&p, 1, &map, &r, Execution::default()).unwrap();
        let h = materialize_h(&p, 1).unwrap();
        assert_eq!(est.estimate, h.column(5));
        assert_eq!(est.observed.iter().filter(|x| !x.is_zero()).count(), 1);
    }

    #[test]
    fn empty_input_gives_zero() {
        let p = prof(&[2, 2, 2]);
        let map = ClassMap::default_for(&p);
        let est = estimate_counts(&p, 2, &map, &[], Execution::default()).unwrap();
        assert!(est.estimate.iter().all(Zero::is_zero));
        let r = recs(&map, "# comment\n\nshort\t01\n");
        let est = estimate_counts(&p, 2, &map, &r, Execution::default()).unwrap();
        assert!(est.estimate.iter().all(Zero::is_zero));
    }

    #[test]
    fn uniform_counts_are_fixed() {
        let p = prof(&[2, 2, 2]);
        let map = ClassMap::default_for(&p);
        let text: String = WordSpace::sigma(&p)
            .unwrap()
            .iter()
            .enumerate()
            .map(|(i, w)| format!("r{i}\t{}\n", p.format_word(&w)))
            .collect();
        let est = estimate_counts(&p, 1, &map, &recs(&map, &text), Execution::default()).unwrap();
        assert!(est.estimate.iter().all(|x| x.is_one()));
    }

    #[test]
    fn sliding_windows_and_projector() {
        let p = prof(&[2, 2, 2]);
        let map = ClassMap::constant(2);
        let r = recs(&map, "a\t0110100\nb\t111\n");
        let n = count_lmers(&p, &map, &r).unwrap();
        // windows of a: 011 110 101 010 100, plus b: 111
        let total: BigInt = n.iter().sum();
        assert_eq!(total, BigInt::from(6));
        assert_eq!(n[3], BigInt::one());
        assert_eq!(n[7], BigInt::one());
        let est = estimate_counts(&p, 2, &map, &r, Execution::Sequential).unwrap();
        let x: Vec<BigRational> = n.iter().cloned().map(BigRational::from_integer).collect();
        assert_eq!(est.estimate, h_apply(&p, 2, &x).unwrap());
    }

    #[test]
    fn periodic_map_counts_aligned_windows_only() {
        let p = prof(&[3, 2]);
        let map = ClassMap::from_json(r#"{"alphabet_sizes": [3, 2], "period": 2}"#).unwrap();
        let r = recs(&map, "x\t210120\n");
        let n = count_lmers(&p, &map, &r).unwrap();
        // offsets 0, 2, 4: 21, 01, 20
        let sigma = WordSpace::sigma(&p).unwrap();
        let at = |s: &str| n[sigma.rank(&p.parse_word(s).unwrap()).unwrap()].clone();
        assert_eq!(at("21"), BigInt::one());
        assert_eq!(at("01"), BigInt::one());
        assert_eq!(at("20"), BigInt::one());
        assert_eq!(n.iter().sum::<BigInt>(), BigInt::from(3));
    }

    #[test]
    fn errors() {
        let p = prof(&[3, 2]);
        let map = ClassMap::default_for(&p);
        assert!(matches!(
            read_sequences("x\t22\n".as_bytes(), &map),
            Err(Error::InvalidSymbol { position: 2, .. })
        ));
        assert!(matches!(
            read_sequences("x\t2a\n".as_bytes(), &map),
            Err(Error::InvalidSymbol { .. })
        ));
        assert!(matches!(read_sequences("no tab\n".as_bytes(), &map), Err(Error::Parse(_))));
        let wrong = ClassMap::constant(3);
        assert!(matches!(count_lmers(&p, &wrong, &[]), Err(Error::MapMismatch(_))));
        assert!(matches!(
            ClassMap::from_json(r#"{"alphabet_sizes": [3, 2], "period": 3}"#),
            Err(Error::MapMismatch(_))
        ));
        assert!(ClassMap::from_json(r#"{"alphabet_sizes": []}"#).is_err());
    }

    #[test]
    fn tsv_output() {
        let p = prof(&[3, 2]);
        let map = ClassMap::default_for(&p);
        let r = recs(&map, "s\t00\n");
        let est = estimate_counts(&p, 1, &map, &r, Execution::default()).unwrap();
        let mut buf = Vec::new();
        write_estimate_tsv(&p, &est, NumberFormat::Exact, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "word\tobserved\testimate");
        assert_eq!(lines[1], "00\t1\t2/3");
        assert_eq!(lines[4], "11\t0\t-1/6");
    }
}
