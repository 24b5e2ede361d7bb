//! The signed kernel `ν_B` and the summation identities built on it.
//!
//! Each `check_*` / `sum_*` operation returns the literal brute-force sum.
//! The matching closed forms are asserted in tests, never computed here.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::words::{match_extensions, match_neighbors, AlphabetProfile, Symbol, Word, WordSpace};

fn check_symbol(profile: &AlphabetProfile, i: usize, s: Symbol) -> Result<()> {
    if let Symbol::Letter(a) = s {
        if a >= profile.size(i) {
            return Err(Error::InvalidSymbol {
                position: i + 1,
                symbol: a.to_string(),
                reason: format!("alphabet at this position has size {}", profile.size(i)),
            });
        }
    }
    Ok(())
}

/// `ν_i(x, y)` at 0-based position `i`:
/// `-b_i` if `x = y = g`, `-y` if `x = y` is a letter, `1` if `x ≺ y`, `0` if `x ≻ y`.
pub fn nu_pos(profile: &AlphabetProfile, i: usize, x: Symbol, y: Symbol) -> Result<i64> {
    if i >= profile.len() {
        return Err(Error::InvalidPosition(i + 1));
    }
    check_symbol(profile, i, x)?;
    check_symbol(profile, i, y)?;
    Ok(nu_unchecked(profile.size(i), x, y))
}

#[inline]
pub(crate) fn nu_unchecked(b: u32, x: Symbol, y: Symbol) -> i64 {
    use std::cmp::Ordering::*;
    match x.cmp(&y) {
        Less => 1,
        Greater => 0,
        Equal => match y {
            Symbol::Gap => -(b as i64),
            Symbol::Letter(a) => -(a as i64),
        },
    }
}

/// `ν_B(v, w) = prod_i ν_i(v_i, w_i)`.
pub fn nu_word(profile: &AlphabetProfile, v: &Word, w: &Word) -> Result<BigInt> {
    v.validate(profile)?;
    w.validate(profile)?;
    Ok(nu_word_unchecked(profile, v, w))
}

pub(crate) fn nu_word_unchecked(profile: &AlphabetProfile, v: &Word, w: &Word) -> BigInt {
    let mut acc: i128 = 1;
    let mut big: Option<BigInt> = None;
    for (i, (&x, &y)) in v.symbols().iter().zip(w.symbols()).enumerate() {
        let f = nu_unchecked(profile.size(i), x, y);
        if f == 0 {
            return BigInt::zero();
        }
        match &mut big {
            Some(b) => *b *= f,
            None => match acc.checked_mul(f as i128) {
                Some(p) => acc = p,
                None => big = Some(BigInt::from(acc) * f),
            },
        }
    }
    big.unwrap_or_else(|| BigInt::from(acc))
}

fn require_prime_word(profile: &AlphabetProfile, vp: &Word, k: usize) -> Result<()> {
    vp.validate(profile)?;
    if vp.symbols().contains(&Symbol::Letter(0)) {
        return Err(Error::InvalidSymbol {
            position: vp.symbols().iter().position(|s| *s == Symbol::Letter(0)).unwrap() + 1,
            symbol: "0".into(),
            reason: "eigenvector labels use letters 1..b_i".into(),
        });
    }
    let letters = vp.letter_set().len();
    if letters > k {
        return Err(Error::ArityMismatch {
            expected: profile.len() - k,
            found: vp.gap_count(),
        });
    }
    Ok(())
}

/// `sum_{w in V_{l,k}} ν_B(w, v')`.
pub fn check_sum_over_vk(profile: &AlphabetProfile, k: usize, vp: &Word) -> Result<BigInt> {
    require_prime_word(profile, vp, k)?;
    let space = WordSpace::gapped(profile, k)?;
    Ok(space.iter().map(|w| nu_word_unchecked(profile, &w, vp)).sum())
}

/// `sum_{w in V_{l,k}} ν_B(w, v') ν_B(w, v'')`.
pub fn check_correlation(profile: &AlphabetProfile, k: usize, vp: &Word, vpp: &Word) -> Result<BigInt> {
    require_prime_word(profile, vp, k)?;
    require_prime_word(profile, vpp, k)?;
    let space = WordSpace::gapped(profile, k)?;
    Ok(space
        .iter()
        .map(|w| nu_word_unchecked(profile, &w, vp) * nu_word_unchecked(profile, &w, vpp))
        .sum())
}

/// `sum_{y in M_{l,k}(u)} ν_B(y, v')`.
pub fn sum_over_match_neighbors(profile: &AlphabetProfile, u: &Word, k: usize, vp: &Word) -> Result<BigInt> {
    u.validate(profile)?;
    vp.validate(profile)?;
    Ok(match_neighbors(u, k)?
        .iter()
        .map(|y| nu_word_unchecked(profile, y, vp))
        .sum())
}

/// `sum_{u in M'(v)} ν_B(u, v')`.
pub fn sum_over_extensions(profile: &AlphabetProfile, v: &Word, vp: &Word) -> Result<BigInt> {
    vp.validate(profile)?;
    Ok(match_extensions(profile, v)?
        .iter()
        .map(|u| nu_word_unchecked(profile, u, vp))
        .sum())
}

/// `φ_i(u, v) = sum_{j = max(1, v_i)}^{b_i - 1} ν_i(v_i, j) ν_i(u_i, j) / (j (j + 1))`
/// for a lettered position `i` (0-based) of `v`.
pub fn phi(profile: &AlphabetProfile, u: &Word, v: &Word, i: usize) -> Result<BigRational> {
    u.validate(profile)?;
    v.validate(profile)?;
    if !u.is_gap_free() {
        return Err(Error::ArityMismatch {
            expected: 0,
            found: u.gap_count(),
        });
    }
    if i >= profile.len() {
        return Err(Error::InvalidPosition(i + 1));
    }
    let Symbol::Letter(vi) = v[i] else {
        return Err(Error::InvalidPosition(i + 1));
    };
    let b = profile.size(i);
    let mut acc = BigRational::zero();
    for j in vi.max(1)..b {
        let y = Symbol::Letter(j);
        let num = nu_unchecked(b, v[i], y) * nu_unchecked(b, u[i], y);
        if num != 0 {
            acc += BigRational::new(BigInt::from(num), BigInt::from(j as u64 * (j as u64 + 1)));
        }
    }
    Ok(acc)
}

/// `sum_{x ⪯ z ⪯ y} ν_B(x, z)` by enumerating the interval.
pub fn interval_sum(profile: &AlphabetProfile, x: &Word, y: &Word) -> Result<BigInt> {
    x.validate(profile)?;
    y.validate(profile)?;
    if !x.precedes_eq(y) {
        return Ok(BigInt::zero());
    }
    // per-position candidate symbols between x_i and y_i inclusive
    let ranges: Vec<Vec<Symbol>> = (0..profile.len())
        .map(|i| {
            let mut all: Vec<Symbol> = (0..profile.size(i)).map(Symbol::Letter).collect();
            all.push(Symbol::Gap);
            all.into_iter().filter(|s| *s >= x[i] && *s <= y[i]).collect()
        })
        .collect();
    let mut total = BigInt::zero();
    let mut idx = vec![0usize; ranges.len()];
    loop {
        let z = Word::new(idx.iter().zip(&ranges).map(|(&j, r)| r[j]).collect());
        total += nu_word_unchecked(profile, x, &z);
        let mut p = ranges.len();
        loop {
            if p == 0 {
                return Ok(total);
            }
            p -= 1;
            idx[p] += 1;
            if idx[p] < ranges[p].len() {
                break;
            }
            idx[p] = 0;
        }
    }
}

/// `prod_{i in Ḡ_{v'}} (v'_i + v'_i^2)`, the letter part of `‖x_{v'}‖²`.
pub(crate) fn letter_weight(vp: &Word) -> BigInt {
    vp.symbols()
        .iter()
        .filter_map(|s| s.letter())
        .map(|a| BigInt::from(a as u64 * (a as u64 + 1)))
        .fold(BigInt::one(), |acc, f| acc * f)
}
