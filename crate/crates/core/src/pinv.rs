//! Closed-form entries of the Moore-Penrose pseudoinverse `W` of `A_{l,k;B}`
//! and of the projector `H = W A`, together with matrix-free application of
//! both operators.
//!
//! For `u ∈ Σ_B` and `v ∈ V_{l,k}` with `P`, `Q` the matching and
//! mismatching lettered positions of `v`:
//!
//! ```text
//! W(u,v) = 1/prod_{i not in G_v} b_i * sum_{G ⊇ G_v} (-1)^{|Q\G|} prod_{i in P\G} (b_i - 1) / S_{l-k}(B(G))
//! H(u,w) = 1/prod b_i * sum_{|G| >= l-k} (-1)^{|Q\G|} prod_{i in P\G} (b_i - 1)
//! ```

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::oracle::DenseExactMatrix;
use crate::par::{self, Execution};
use crate::spectra::{eigenvalue_of, norm_sq_of, IncidenceOperator};
use crate::symfunc::{binomial, elem_sym, elem_sym_all, generalized_binomial};
use crate::words::{position_sets, AlphabetProfile, PosSet, Symbol, Word, WordSpace};

/// Longest word for which `S_{l-k}(B(G))` is tabulated for every `G`.
const TABLE_MAX_LEN: usize = 16;

fn check_k(profile: &AlphabetProfile, k: usize) -> Result<()> {
    if k > profile.len() {
        return Err(Error::InvalidProfile(format!(
            "k = {k} exceeds word length {}",
            profile.len()
        )));
    }
    Ok(())
}

fn require_ungapped(profile: &AlphabetProfile, u: &Word) -> Result<()> {
    u.validate(profile)?;
    if !u.is_gap_free() {
        return Err(Error::ArityMismatch {
            expected: 0,
            found: u.gap_count(),
        });
    }
    Ok(())
}

fn ratio(n: BigInt, d: BigInt) -> BigRational {
    BigRational::new(n, d)
}

fn parity_sign(n: usize) -> i64 {
    if n.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Entry evaluator for one `(B, k)`; holds the memo table of `S_{l-k}(B(G))`.
///
/// The table is filled once at construction and only read afterwards, so a
/// context can be shared across threads.
#[derive(Clone, Debug)]
pub struct PinvContext {
    profile: AlphabetProfile,
    k: usize,
    table: Option<Vec<BigInt>>,
    exec: Execution,
}

impl PinvContext {
    pub fn new(profile: &AlphabetProfile, k: usize) -> Result<Self> {
        Self::with_execution(profile, k, Execution::default())
    }

    pub fn with_execution(profile: &AlphabetProfile, k: usize, exec: Execution) -> Result<Self> {
        check_k(profile, k)?;
        let l = profile.len();
        let table = (l <= TABLE_MAX_LEN).then(|| {
            par::map_indices(exec, 1usize << l, |mask| {
                let g = PosSet(mask as u64);
                if g.len() < l - k {
                    BigInt::zero()
                } else {
                    elem_sym(&profile.subseq(g), (l - k) as i64)
                }
            })
        });
        Ok(PinvContext {
            profile: profile.clone(),
            k,
            table,
            exec,
        })
    }

    /// A context that evaluates `S_{l-k}(B(G))` on demand; cheaper for a
    /// handful of entries.
    pub fn untabulated(profile: &AlphabetProfile, k: usize) -> Result<Self> {
        check_k(profile, k)?;
        Ok(PinvContext {
            profile: profile.clone(),
            k,
            table: None,
            exec: Execution::Sequential,
        })
    }

    pub fn profile(&self) -> &AlphabetProfile {
        &self.profile
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `S_{l-k}(B(G))`.
    fn gap_sym(&self, g: PosSet) -> BigInt {
        match &self.table {
            Some(t) => t[g.0 as usize].clone(),
            None => elem_sym(&self.profile.subseq(g), (self.profile.len() - self.k) as i64),
        }
    }

    /// `W_{l,k;B}(u, v)`.
    pub fn w_entry(&self, u: &Word, v: &Word) -> Result<BigRational> {
        let l = self.profile.len();
        require_ungapped(&self.profile, u)?;
        v.validate(&self.profile)?;
        if v.gap_count() != l - self.k {
            return Err(Error::ArityMismatch {
                expected: l - self.k,
                found: v.gap_count(),
            });
        }
        let sets = position_sets(u, v)?;
        let lettered = v.letter_set();
        let mut total = BigRational::zero();
        for extra in lettered.subsets() {
            let g = sets.gaps.union(extra);
            let sign = parity_sign(sets.mismatches.difference(extra).len());
            let weight: BigInt = sets
                .matches
                .difference(extra)
                .iter()
                .map(|i| BigInt::from(self.profile.size(i) - 1))
                .product();
            total += ratio(weight * sign, self.gap_sym(g));
        }
        Ok(total / BigRational::from_integer(self.profile.subseq(lettered).product()))
    }

    /// `H_{l,k;B}(u, w)`, summing over `(|G ∩ P|, |G ∩ Q|)` instead of all `G`.
    pub fn h_entry(&self, u: &Word, w: &Word) -> Result<BigRational> {
        require_ungapped(&self.profile, u)?;
        require_ungapped(&self.profile, w)?;
        let sets = position_sets(u, w)?;
        Ok(h_grouped(&self.profile, self.k, sets.matches, sets.mismatches))
    }

    /// `W` as a dense `|Σ_B| × |V_{l,k}|` matrix.
    pub fn materialize_w(&self) -> Result<DenseExactMatrix> {
        let sigma = WordSpace::sigma(&self.profile)?.words();
        let rows = WordSpace::gapped(&self.profile, self.k)?.words();
        let entries = par::try_map_slice(self.exec, &sigma, |u| {
            rows.iter().map(|v| self.w_entry(u, v)).collect::<Result<Vec<_>>>()
        })?;
        DenseExactMatrix::new(sigma.len(), rows.len(), entries.into_iter().flatten().collect())
    }

    /// `H` as a dense `|Σ_B| × |Σ_B|` matrix.
    pub fn materialize_h(&self) -> Result<DenseExactMatrix> {
        let sigma = WordSpace::sigma(&self.profile)?.words();
        let entries = par::try_map_slice(self.exec, &sigma, |u| {
            sigma.iter().map(|w| self.h_entry(u, w)).collect::<Result<Vec<_>>>()
        })?;
        DenseExactMatrix::new(sigma.len(), sigma.len(), entries.into_iter().flatten().collect())
    }
}

fn h_grouped(profile: &AlphabetProfile, k: usize, p_set: PosSet, q_set: PosSet) -> BigRational {
    let l = profile.len();
    let p = p_set.len();
    let q = q_set.len();
    // e_j over (b_i - 1), i in P; choosing s positions of P inside G leaves
    // the product over the other p - s
    let e = elem_sym_all(&profile.subseq(p_set).shifted(-1));
    let mut total = BigInt::zero();
    for s in 0..=p {
        for t in 0..=q {
            if s + t < l - k {
                continue;
            }
            total += binomial(q as u64, t as u64) * &e[p - s] * parity_sign(q - t);
        }
    }
    ratio(total, profile.as_int_seq().product())
}

pub fn w_entry(profile: &AlphabetProfile, k: usize, u: &Word, v: &Word) -> Result<BigRational> {
    PinvContext::untabulated(profile, k)?.w_entry(u, v)
}

pub fn h_entry(profile: &AlphabetProfile, k: usize, u: &Word, w: &Word) -> Result<BigRational> {
    check_k(profile, k)?;
    require_ungapped(profile, u)?;
    require_ungapped(profile, w)?;
    let sets = position_sets(u, w)?;
    Ok(h_grouped(profile, k, sets.matches, sets.mismatches))
}

pub fn materialize_w(profile: &AlphabetProfile, k: usize) -> Result<DenseExactMatrix> {
    materialize_w_with(profile, k, Execution::default())
}

pub fn materialize_w_with(profile: &AlphabetProfile, k: usize, exec: Execution) -> Result<DenseExactMatrix> {
    PinvContext::with_execution(profile, k, exec)?.materialize_w()
}

pub fn materialize_h(profile: &AlphabetProfile, k: usize) -> Result<DenseExactMatrix> {
    materialize_h_with(profile, k, Execution::default())
}

pub fn materialize_h_with(profile: &AlphabetProfile, k: usize, exec: Execution) -> Result<DenseExactMatrix> {
    PinvContext::with_execution(profile, k, exec)?.materialize_h()
}

fn check_uniform(b: u32, l: usize, k: usize) -> Result<()> {
    if b < 2 {
        return Err(Error::InvalidProfile(format!("alphabet size {b} is below 2")));
    }
    if k > l {
        return Err(Error::InvalidProfile(format!("k = {k} exceeds word length {l}")));
    }
    Ok(())
}

fn pow(b: u32, e: usize) -> BigInt {
    num_traits::pow(BigInt::from(b), e)
}

/// Uniform-alphabet `W` entry for a pair with `m` mismatches, in the
/// single-sum form with the generalized binomial `C(k-l, m)`.
pub fn w_entry_uniform(b: u32, l: usize, k: usize, m: usize) -> Result<BigRational> {
    check_uniform(b, l, k)?;
    if m > k {
        return Err(Error::InvalidProfile(format!("{m} mismatches with only {k} letters")));
    }
    let (li, ki, mi) = (l as i64, k as i64, m as i64);
    let sum: BigInt = (0..=k - m)
        .map(|n| binomial(l as u64, n as u64) * pow(b - 1, n))
        .sum();
    let den = pow(b, l) * binomial(l as u64, k as u64) * binomial(k as u64, m as u64);
    Ok(ratio(generalized_binomial(ki - li, mi) * sum, den))
}

/// The same entry in the double-sum form over `n` and `t`.
pub fn w_entry_uniform_double_sum(b: u32, l: usize, k: usize, m: usize) -> Result<BigRational> {
    check_uniform(b, l, k)?;
    if m > k {
        return Err(Error::InvalidProfile(format!("{m} mismatches with only {k} letters")));
    }
    let mut total = BigRational::zero();
    for n in 0..=k {
        let den = binomial((l - n) as u64, (l - k) as u64);
        let mut inner = BigInt::zero();
        for t in 0..=n {
            if t > k - m || n - t > m {
                continue;
            }
            inner += binomial((k - m) as u64, t as u64)
                * binomial(m as u64, (n - t) as u64)
                * pow(b - 1, t)
                * parity_sign(n - t);
        }
        total += ratio(inner, den);
    }
    Ok(total / BigRational::from_integer(pow(b, l)))
}

/// Uniform-alphabet `H` entry for two words agreeing in `p` positions.
pub fn h_entry_uniform(b: u32, l: usize, k: usize, p: usize) -> Result<BigRational> {
    check_uniform(b, l, k)?;
    if p > l {
        return Err(Error::InvalidProfile(format!("{p} agreements in words of length {l}")));
    }
    let upper = l as i64 - p as i64 - 1;
    let total: BigInt = (0..=k)
        .map(|n| {
            generalized_binomial(upper, (k - n) as i64)
                * binomial(p as u64, n as u64)
                * pow(b - 1, n)
                * parity_sign(k - n)
        })
        .sum();
    Ok(ratio(total, pow(b, l)))
}

/// Matrix-free `W = A^T Υ D Υ^T` and `H = W A` for one `(B, k)`.
///
/// Vectors are brought to a common denominator on entry so that the
/// `Υ^T`, `Υ` and `A^T` stages run in integer arithmetic. `Υ` is never
/// stored; its nonzero entries are enumerated from the support of `ν_B`.
#[derive(Clone, Debug)]
pub struct PinvOperator {
    incidence: IncidenceOperator,
    labels: WordSpace,
    /// `D / (‖x_{v'}‖² λ_{v'})` per label.
    scale: Vec<BigInt>,
    /// `lcm_{v'} ‖x_{v'}‖² λ_{v'}`.
    denom: BigInt,
    exec: Execution,
}

impl PinvOperator {
    pub fn new(profile: &AlphabetProfile, k: usize) -> Result<Self> {
        Self::with_execution(profile, k, Execution::default())
    }

    pub fn with_execution(profile: &AlphabetProfile, k: usize, exec: Execution) -> Result<Self> {
        check_k(profile, k)?;
        let incidence = IncidenceOperator::new(profile, k)?.with_execution(exec);
        let labels = WordSpace::prime_up_to(profile, k)?;
        let words = labels.words();
        let nl = par::map_slice(exec, &words, |vp| {
            norm_sq_of(profile, k, vp) * eigenvalue_of(profile, k, vp)
        });
        let denom = nl.iter().fold(BigInt::one(), |acc, x| acc.lcm(x));
        let scale = nl.iter().map(|x| &denom / x).collect();
        Ok(PinvOperator {
            incidence,
            labels,
            scale,
            denom,
            exec,
        })
    }

    pub fn profile(&self) -> &AlphabetProfile {
        self.incidence.profile()
    }

    pub fn k(&self) -> usize {
        self.incidence.k()
    }

    pub fn incidence(&self) -> &IncidenceOperator {
        &self.incidence
    }

    /// `W c` for `c` indexed by `V_{l,k}`.
    pub fn apply_w(&self, counts: &[BigRational]) -> Result<Vec<BigRational>> {
        check_len(self.incidence.rows().len(), counts.len())?;
        let (ints, den) = to_common_denominator(counts);
        let out = self.apply_w_scaled(&ints);
        let den = den * &self.denom;
        Ok(out.into_iter().map(|n| ratio(n, den.clone())).collect())
    }

    /// `W c` for integer counts.
    pub fn apply_w_integer(&self, counts: &[BigInt]) -> Result<Vec<BigRational>> {
        check_len(self.incidence.rows().len(), counts.len())?;
        let out = self.apply_w_scaled(counts);
        Ok(out.into_iter().map(|n| ratio(n, self.denom.clone())).collect())
    }

    /// `H x` for `x` indexed by `Σ_B`.
    pub fn apply_h(&self, x: &[BigRational]) -> Result<Vec<BigRational>> {
        check_len(self.incidence.cols().len(), x.len())?;
        let (ints, den) = to_common_denominator(x);
        let c = self.incidence.apply(&ints)?;
        let out = self.apply_w_scaled(&c);
        let den = den * &self.denom;
        Ok(out.into_iter().map(|n| ratio(n, den.clone())).collect())
    }

    /// `D · W c` as integers. The sign `(-1)^{l-k}` of `Υ` appears twice and
    /// cancels, so plain `ν_B` values are used on both sides.
    fn apply_w_scaled(&self, counts: &[BigInt]) -> Vec<BigInt> {
        let profile = self.profile();
        let l = profile.len();
        let k = self.k();
        let rows = self.incidence.rows();
        let t = par::map_indices(self.exec, self.labels.len(), |j| {
            let vp = self.labels.unrank(j).expect("label rank");
            let options = row_options(profile, &vp);
            let mut acc = BigInt::zero();
            for_each_support(&options, l - k, l - k, &mut |w, nu| {
                let r = rows.rank(w).expect("support row lies in V");
                if !counts[r].is_zero() {
                    acc += &counts[r] * nu;
                }
            });
            acc * &self.scale[j]
        });
        let y = par::map_indices(self.exec, rows.len(), |r| {
            let w = rows.unrank(r).expect("row rank");
            let options = label_options(profile, &w);
            let mut acc = BigInt::zero();
            for_each_support(&options, l - k, l, &mut |vp, nu| {
                let j = self.labels.rank(vp).expect("support label lies in V'");
                if !t[j].is_zero() {
                    acc += &t[j] * nu;
                }
            });
            acc
        });
        self.incidence
            .apply_transpose(&y)
            .expect("row vector has the row dimension")
    }
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

fn to_common_denominator(x: &[BigRational]) -> (Vec<BigInt>, BigInt) {
    let den = x.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let ints = x
        .iter()
        .map(|v| v.numer() * (&den / v.denom()))
        .collect();
    (ints, den)
}

/// Symbols `w_i` with `ν_i(w_i, v'_i) != 0`, and those values.
fn row_options(profile: &AlphabetProfile, vp: &Word) -> Vec<Vec<(Symbol, i64)>> {
    (0..profile.len())
        .map(|i| {
            let b = profile.size(i);
            match vp[i] {
                Symbol::Gap => (0..b)
                    .map(|a| (Symbol::Letter(a), 1))
                    .chain(std::iter::once((Symbol::Gap, -(b as i64))))
                    .collect(),
                Symbol::Letter(y) => (0..y)
                    .map(|a| (Symbol::Letter(a), 1))
                    .chain(std::iter::once((Symbol::Letter(y), -(y as i64))))
                    .collect(),
            }
        })
        .collect()
}

/// Label symbols `v'_i` (no letter 0) with `ν_i(w_i, v'_i) != 0`.
fn label_options(profile: &AlphabetProfile, w: &Word) -> Vec<Vec<(Symbol, i64)>> {
    (0..profile.len())
        .map(|i| {
            let b = profile.size(i);
            match w[i] {
                Symbol::Gap => vec![(Symbol::Gap, -(b as i64))],
                Symbol::Letter(x) => (x.max(1)..b)
                    .map(|y| (Symbol::Letter(y), if y == x { -(x as i64) } else { 1 }))
                    .chain(std::iter::once((Symbol::Gap, 1)))
                    .collect(),
            }
        })
        .collect()
}

/// Visits every word built from `options` with between `min_gaps` and
/// `max_gaps` gaps, passing the product of the option weights.
fn for_each_support(
    options: &[Vec<(Symbol, i64)>],
    min_gaps: usize,
    max_gaps: usize,
    f: &mut dyn FnMut(&Word, &BigInt),
) {
    #[allow(clippy::too_many_arguments)]
    fn rec(
        options: &[Vec<(Symbol, i64)>],
        i: usize,
        gaps: usize,
        min_gaps: usize,
        max_gaps: usize,
        weight: Option<i128>,
        symbols: &mut Vec<Symbol>,
        leaf: &mut dyn FnMut(&[Symbol], Option<i128>),
    ) {
        let l = options.len();
        if gaps > max_gaps || gaps + (l - i) < min_gaps {
            return;
        }
        if i == l {
            leaf(symbols, weight);
            return;
        }
        for &(s, w) in &options[i] {
            symbols.push(s);
            let g = gaps + usize::from(s.is_gap());
            let next = weight.and_then(|x| x.checked_mul(w as i128));
            rec(options, i + 1, g, min_gaps, max_gaps, next, symbols, leaf);
            symbols.pop();
        }
    }
    let mut symbols = Vec::with_capacity(options.len());
    let mut leaf = |s: &[Symbol], weight: Option<i128>| {
        let word = Word::new(s.to_vec());
        let nu = match weight {
            Some(x) => BigInt::from(x),
            None => options
                .iter()
                .zip(s)
                .map(|(opts, sym)| {
                    BigInt::from(opts.iter().find(|(o, _)| o == sym).expect("chosen option").1)
                })
                .product(),
        };
        f(&word, &nu);
    };
    rec(options, 0, 0, min_gaps, max_gaps, Some(1), &mut symbols, &mut leaf);
}

/// `W c` without materializing `W`.
pub fn w_apply(profile: &AlphabetProfile, k: usize, counts: &[BigRational]) -> Result<Vec<BigRational>> {
    PinvOperator::new(profile, k)?.apply_w(counts)
}

pub fn w_apply_with(
    profile: &AlphabetProfile,
    k: usize,
    counts: &[BigRational],
    exec: Execution,
) -> Result<Vec<BigRational>> {
    PinvOperator::with_execution(profile, k, exec)?.apply_w(counts)
}

/// `H x = W (A x)`.
pub fn h_apply(profile: &AlphabetProfile, k: usize, x: &[BigRational]) -> Result<Vec<BigRational>> {
    PinvOperator::new(profile, k)?.apply_h(x)
}

/// Literal `2^l`-term evaluation of `H(u, w)`.
pub fn h_entry_literal(profile: &AlphabetProfile, k: usize, u: &Word, w: &Word) -> Result<BigRational> {
    check_k(profile, k)?;
    require_ungapped(profile, u)?;
    require_ungapped(profile, w)?;
    let l = profile.len();
    let sets = position_sets(u, w)?;
    let mut total = BigInt::zero();
    for g in PosSet::full(l).subsets() {
        if g.len() < l - k {
            continue;
        }
        let weight: BigInt = sets
            .matches
            .difference(g)
            .iter()
            .map(|i| BigInt::from(profile.size(i) - 1))
            .product();
        total += weight * parity_sign(sets.mismatches.difference(g).len());
    }
    Ok(ratio(total, profile.as_int_seq().product()))
}
