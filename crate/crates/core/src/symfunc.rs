//! Elementary symmetric polynomials `S_i` and the partial sums `R_i`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// An ordered integer sequence `(x_1, ..., x_n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntSeq(Vec<i64>);

impl IntSeq {
    pub fn new(values: Vec<i64>) -> Self {
        IntSeq(values)
    }

    pub fn values(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `X + delta`, elementwise.
    pub fn shifted(&self, delta: i64) -> IntSeq {
        IntSeq(self.0.iter().map(|x| x + delta).collect())
    }

    /// `X` with the `m`-th entry (0-based) removed.
    pub fn without(&self, m: usize) -> IntSeq {
        let mut v = self.0.clone();
        v.remove(m);
        IntSeq(v)
    }

    pub fn product(&self) -> BigInt {
        self.0.iter().map(|&x| BigInt::from(x)).product()
    }
}

impl From<Vec<i64>> for IntSeq {
    fn from(v: Vec<i64>) -> Self {
        IntSeq(v)
    }
}

impl From<&[i64]> for IntSeq {
    fn from(v: &[i64]) -> Self {
        IntSeq(v.to_vec())
    }
}

/// `[S_0(X), ..., S_n(X)]` via the Pascal-type recurrence
/// `S_i(X) = x_m S_{i-1}(X without m) + S_i(X without m)`.
pub fn elem_sym_all(x: &IntSeq) -> Vec<BigInt> {
    let n = x.len();
    let mut s = vec![BigInt::zero(); n + 1];
    s[0] = BigInt::one();
    for (m, &xm) in x.values().iter().enumerate() {
        let xm = BigInt::from(xm);
        // descending so s[i - 1] still holds the value without x_m
        for i in (1..=m + 1).rev() {
            let add = &s[i - 1] * &xm;
            s[i] += add;
        }
    }
    s
}

/// `S_i(X)`; zero for `i < 0` or `i > |X|`.
pub fn elem_sym(x: &IntSeq, i: i64) -> BigInt {
    if i < 0 || i as usize > x.len() {
        return BigInt::zero();
    }
    let i = i as usize;
    // only the first i+1 coefficients are needed
    let mut s = vec![BigInt::zero(); i + 1];
    s[0] = BigInt::one();
    for (m, &xm) in x.values().iter().enumerate() {
        let xm = BigInt::from(xm);
        for j in (1..=(m + 1).min(i)).rev() {
            let add = &s[j - 1] * &xm;
            s[j] += add;
        }
    }
    s.swap_remove(i)
}

/// `R_i(X) = sum_{j=0}^{i} S_j(X - 1)`.
pub fn r_poly(x: &IntSeq, i: i64) -> BigInt {
    if i < 0 {
        return BigInt::zero();
    }
    let s = elem_sym_all(&x.shifted(-1));
    let top = (i as usize).min(x.len());
    s[..=top].iter().sum()
}

/// Literal evaluation of
/// `sum over complements Gbar with |Gbar| <= k of prod_{i in Gbar} (b_i - 1) * S_{l-k}(B(G))`
/// where `l = |B|`. Equals `C(l, k) * prod b_i`.
pub fn weighted_gap_sum(b: &IntSeq, k: usize) -> BigInt {
    let l = b.len();
    assert!(k <= l, "k must not exceed the sequence length");
    assert!(l < 64, "sequence too long for subset enumeration");
    let mut total = BigInt::zero();
    for complement in 0u64..(1u64 << l) {
        if complement.count_ones() as usize > k {
            continue;
        }
        let mut weight = BigInt::one();
        let mut kept = Vec::with_capacity(l);
        for (i, &bi) in b.values().iter().enumerate() {
            if complement >> i & 1 == 1 {
                weight *= bi - 1;
            } else {
                kept.push(bi);
            }
        }
        total += weight * elem_sym(&IntSeq(kept), (l - k) as i64);
    }
    total
}

/// Ordinary binomial coefficient `C(n, k)`, zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc *= n - j;
        acc /= j + 1;
    }
    acc
}

/// Binomial coefficient with an arbitrary integer upper index, defined by the
/// falling factorial `n (n-1) ... (n-k+1) / k!`. Zero for `k < 0`.
pub fn generalized_binomial(n: i64, k: i64) -> BigInt {
    if k < 0 {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for j in 0..k {
        acc *= n - j;
        // exact at every step: the running product of j+1 consecutive
        // integers is divisible by (j+1)!
        acc /= j + 1;
    }
    acc
}
