//! The incidence matrix `A_{l,k;B}` and the closed-form nonzero spectrum of
//! `A A^T`.
//!
//! Every eigenpair is labelled by a word `v'` of `V'_{l,<=k}`:
//! `x_{v'}(w) = (-1)^{l-k} ν_B(w, v')` over `V_{l,k}` with eigenvalue
//! `S_{l-k}(B(G_{v'}))`, and `z_{v'}(u) = ν_B(u, v')` over `Σ_B` is the
//! matching eigenvector of `A^T A`. Vectors are kept as exact integers.

use std::ops::AddAssign;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::nu::{letter_weight, nu_word_unchecked};
use crate::par::{self, Execution};
use crate::symfunc::elem_sym;
use crate::words::{masks_of_size, AlphabetProfile, Symbol, Word, WordSpace};

/// Lettered-position group of `V_{l,k}`: `(position, stride)` pairs plus the
/// rank of the group's first word.
#[derive(Clone, Debug)]
struct RowGroup {
    offset: usize,
    digits: Vec<(usize, usize)>,
}

/// Matrix-free view of `A_{l,k;B}`: rows are `V_{l,k}`, columns `Σ_B`.
#[derive(Clone, Debug)]
pub struct IncidenceOperator {
    k: usize,
    sigma: WordSpace,
    gapped: WordSpace,
    sigma_strides: Vec<usize>,
    groups: Vec<RowGroup>,
    exec: Execution,
}

impl IncidenceOperator {
    pub fn new(profile: &AlphabetProfile, k: usize) -> Result<Self> {
        let sigma = WordSpace::sigma(profile)?;
        let gapped = WordSpace::gapped(profile, k)?;
        let l = profile.len();
        let mut sigma_strides = vec![1usize; l];
        for i in (0..l.saturating_sub(1)).rev() {
            sigma_strides[i] = sigma_strides[i + 1] * profile.size(i + 1) as usize;
        }
        let groups = masks_of_size(l, k)
            .map(|mask| {
                let positions: Vec<usize> = mask.iter().collect();
                let mut digits = Vec::with_capacity(positions.len());
                let mut stride = 1usize;
                for &i in positions.iter().rev() {
                    digits.push((i, stride));
                    stride *= profile.size(i) as usize;
                }
                RowGroup {
                    offset: gapped.block_offset(mask).expect("group exists"),
                    digits,
                }
            })
            .collect();
        Ok(IncidenceOperator {
            k,
            sigma,
            gapped,
            sigma_strides,
            groups,
            exec: Execution::default(),
        })
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn profile(&self) -> &AlphabetProfile {
        self.sigma.profile()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rows(&self) -> &WordSpace {
        &self.gapped
    }

    pub fn cols(&self) -> &WordSpace {
        &self.sigma
    }

    fn sigma_digits(&self, col: usize) -> Vec<usize> {
        let profile = self.profile();
        let mut rem = col;
        let mut d = vec![0usize; profile.len()];
        for i in (0..profile.len()).rev() {
            let b = profile.size(i) as usize;
            d[i] = rem % b;
            rem /= b;
        }
        d
    }

    /// Row ranks of `M_{l,k}(u)` for the column `u` of rank `col`.
    pub fn neighbor_ranks(&self, col: usize) -> Vec<usize> {
        let d = self.sigma_digits(col);
        self.groups
            .iter()
            .map(|g| g.offset + g.digits.iter().map(|&(i, s)| d[i] * s).sum::<usize>())
            .collect()
    }

    /// Column ranks of `M'(v)` for the row `v` of rank `row`, ascending.
    pub fn extension_ranks(&self, row: usize) -> Vec<usize> {
        let v = self.gapped.unrank(row).expect("row in range");
        let profile = self.profile();
        let mut base = 0usize;
        let mut gaps = Vec::new();
        for i in 0..profile.len() {
            match v[i] {
                Symbol::Letter(a) => base += a as usize * self.sigma_strides[i],
                Symbol::Gap => gaps.push(i),
            }
        }
        let mut out = vec![base];
        // gap positions in increasing order; expanding the most significant
        // first keeps the output sorted
        for &i in &gaps {
            let b = profile.size(i) as usize;
            let stride = self.sigma_strides[i];
            out = out
                .iter()
                .flat_map(|&r| (0..b).map(move |a| r + a * stride))
                .collect();
        }
        out
    }

    /// `A x` for `x` indexed by `Σ_B`.
    pub fn apply<T>(&self, x: &[T]) -> Result<Vec<T>>
    where
        T: Clone + Zero + for<'a> AddAssign<&'a T> + Send + Sync,
    {
        check_len(self.sigma.len(), x.len())?;
        Ok(par::map_indices(self.exec, self.gapped.len(), |row| {
            let mut acc = T::zero();
            for c in self.extension_ranks(row) {
                acc += &x[c];
            }
            acc
        }))
    }

    /// `A^T y` for `y` indexed by `V_{l,k}`.
    pub fn apply_transpose<T>(&self, y: &[T]) -> Result<Vec<T>>
    where
        T: Clone + Zero + for<'a> AddAssign<&'a T> + Send + Sync,
    {
        check_len(self.gapped.len(), y.len())?;
        Ok(par::map_indices(self.exec, self.sigma.len(), |col| {
            let mut acc = T::zero();
            for r in self.neighbor_ranks(col) {
                acc += &y[r];
            }
            acc
        }))
    }
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// The 0/1 matrix `A_{l,k;B}` in coordinate form, entries sorted by `(row, col)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseIncidence {
    pub profile: AlphabetProfile,
    pub k: usize,
    pub n_rows: usize,
    pub n_cols: usize,
    pub entries: Vec<(usize, usize)>,
}

impl SparseIncidence {
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Dense integer rows, for small instances.
    pub fn to_dense_rows(&self) -> Vec<Vec<u8>> {
        let mut m = vec![vec![0u8; self.n_cols]; self.n_rows];
        for &(r, c) in &self.entries {
            m[r][c] = 1;
        }
        m
    }
}

pub fn build_incidence(profile: &AlphabetProfile, k: usize) -> Result<SparseIncidence> {
    build_incidence_with(profile, k, Execution::default())
}

pub fn build_incidence_with(profile: &AlphabetProfile, k: usize, exec: Execution) -> Result<SparseIncidence> {
    let op = IncidenceOperator::new(profile, k)?.with_execution(exec);
    let rows = par::map_indices(exec, op.rows().len(), |r| op.extension_ranks(r));
    let entries = rows
        .into_iter()
        .enumerate()
        .flat_map(|(r, cols)| cols.into_iter().map(move |c| (r, c)))
        .collect();
    Ok(SparseIncidence {
        profile: profile.clone(),
        k,
        n_rows: op.rows().len(),
        n_cols: op.cols().len(),
        entries,
    })
}

/// An eigenvector `x_{v'}` of `A A^T` with its exact eigenvalue and squared norm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenVectorX {
    pub label: Word,
    pub entries: Vec<BigInt>,
    pub eigenvalue: BigInt,
    pub norm_sq: BigInt,
}

fn validate_label(profile: &AlphabetProfile, k: usize, vp: &Word) -> Result<()> {
    vp.validate(profile)?;
    if let Some(i) = vp.symbols().iter().position(|s| *s == Symbol::Letter(0)) {
        return Err(Error::InvalidSymbol {
            position: i + 1,
            symbol: "0".into(),
            reason: "eigenvector labels use letters 1..b_i".into(),
        });
    }
    if vp.letter_set().len() > k {
        return Err(Error::ArityMismatch {
            expected: profile.len() - k,
            found: vp.gap_count(),
        });
    }
    Ok(())
}

/// `λ_{v'} = S_{l-k}(B(G_{v'}))`.
pub fn eigenvalue_of(profile: &AlphabetProfile, k: usize, vp: &Word) -> BigInt {
    elem_sym(&profile.subseq(vp.gap_set()), (profile.len() - k) as i64)
}

/// `‖x_{v'}‖² = S_{l-k}(B(G_{v'})) prod_{lettered} (v'_i + v'_i²) prod_{gapped} b_i`.
pub fn norm_sq_of(profile: &AlphabetProfile, k: usize, vp: &Word) -> BigInt {
    eigenvalue_of(profile, k, vp) * letter_weight(vp) * profile.subseq(vp.gap_set()).product()
}

fn sign(profile: &AlphabetProfile, k: usize) -> i64 {
    if (profile.len() - k).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn eigvec_x_in(space: &WordSpace, k: usize, vp: &Word) -> EigenVectorX {
    let profile = space.profile();
    let s = sign(profile, k);
    let entries = space
        .iter()
        .map(|w| nu_word_unchecked(profile, &w, vp) * s)
        .collect();
    EigenVectorX {
        label: vp.clone(),
        entries,
        eigenvalue: eigenvalue_of(profile, k, vp),
        norm_sq: norm_sq_of(profile, k, vp),
    }
}

pub fn eigvec_x(profile: &AlphabetProfile, k: usize, vp: &Word) -> Result<EigenVectorX> {
    validate_label(profile, k, vp)?;
    let space = WordSpace::gapped(profile, k)?;
    Ok(eigvec_x_in(&space, k, vp))
}

/// `z_{v'}(u) = ν_B(u, v')` over `Σ_B`.
pub fn eigvec_z(profile: &AlphabetProfile, vp: &Word) -> Result<Vec<BigInt>> {
    validate_label(profile, profile.len(), vp)?;
    let space = WordSpace::sigma(profile)?;
    Ok(space.iter().map(|u| nu_word_unchecked(profile, &u, vp)).collect())
}

/// All nonzero eigenpairs of `A A^T`, ordered as `V'_{l,<=k}` (all-gap label first).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectralSystem {
    pub profile: AlphabetProfile,
    pub k: usize,
    pub eigenpairs: Vec<EigenVectorX>,
}

impl SpectralSystem {
    pub fn len(&self) -> usize {
        self.eigenpairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenpairs.is_empty()
    }

    pub fn lambda(&self) -> Vec<BigInt> {
        self.eigenpairs.iter().map(|e| e.eigenvalue.clone()).collect()
    }

    pub fn norms_sq(&self) -> Vec<BigInt> {
        self.eigenpairs.iter().map(|e| e.norm_sq.clone()).collect()
    }

    pub fn labels(&self) -> Vec<Word> {
        self.eigenpairs.iter().map(|e| e.label.clone()).collect()
    }

    /// Number of rows of `Υ`, i.e. `|V_{l,k}|`.
    pub fn dim(&self) -> usize {
        self.eigenpairs.first().map_or(0, |e| e.entries.len())
    }

    /// `d_{v'} = 1 / (‖x_{v'}‖² λ_{v'})`.
    pub fn d_values(&self) -> Vec<BigRational> {
        self.eigenpairs
            .iter()
            .map(|e| BigRational::new(BigInt::from(1), &e.norm_sq * &e.eigenvalue))
            .collect()
    }
}

pub fn build_system(profile: &AlphabetProfile, k: usize) -> Result<SpectralSystem> {
    build_system_with(profile, k, Execution::default())
}

pub fn build_system_with(profile: &AlphabetProfile, k: usize, exec: Execution) -> Result<SpectralSystem> {
    let labels = WordSpace::prime_up_to(profile, k)?.words();
    let space = WordSpace::gapped(profile, k)?;
    let eigenpairs = par::map_slice(exec, &labels, |vp| eigvec_x_in(&space, k, vp));
    Ok(SpectralSystem {
        profile: profile.clone(),
        k,
        eigenpairs,
    })
}

/// `Q = Υ E`: columns `x_{v'} / ‖x_{v'}‖` in floating point.
pub fn q_matrix_float(system: &SpectralSystem) -> DMatrix<f64> {
    let rows = system.dim();
    let mut q = DMatrix::<f64>::zeros(rows, system.len());
    for (j, e) in system.eigenpairs.iter().enumerate() {
        let norm = e.norm_sq.to_f64().unwrap_or(f64::INFINITY).sqrt();
        for (i, x) in e.entries.iter().enumerate() {
            q[(i, j)] = x.to_f64().unwrap_or(f64::NAN) / norm;
        }
    }
    q
}
