//! Exact certification of the closed forms.
//!
//! Everything here works on dense rational matrices and never consults the
//! closed-form entry formulas, so a passing [`penrose_check`] certifies a `W`
//! on its own: the Moore-Penrose pseudoinverse is unique. No floating point
//! and no tolerances are used.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectra::{eigvec_z, SparseIncidence, SpectralSystem};
use crate::symfunc::{binomial, r_poly};

/// Row-major matrix of reduced rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseExactMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigRational>,
}

impl DenseExactMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigRational>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        Ok(DenseExactMatrix { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseExactMatrix {
            rows,
            cols,
            entries: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = BigRational::one();
        }
        m
    }

    pub fn from_integer_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            entries.extend(r.iter().map(|x| BigRational::from_integer(x.clone().into())));
        }
        Ok(DenseExactMatrix {
            rows: rows.len(),
            cols,
            entries,
        })
    }

    pub fn from_incidence(a: &SparseIncidence) -> Self {
        let mut m = Self::zeros(a.n_rows, a.n_cols);
        for &(r, c) in &a.entries {
            m.entries[r * a.n_cols + c] = BigRational::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[BigRational] {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> &BigRational {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: BigRational) {
        self.entries[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[BigRational] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<BigRational> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                entries.push(self.get(r, c).clone());
            }
        }
        DenseExactMatrix {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.asymmetry().is_none()
    }

    /// First `(r, c)` with `M[r][c] != M[c][r]`.
    fn asymmetry(&self) -> Option<(usize, usize)> {
        if self.rows != self.cols {
            return Some((0, 0));
        }
        for r in 0..self.rows {
            for c in r + 1..self.cols {
                if self.get(r, c) != self.get(c, r) {
                    return Some((r, c));
                }
            }
        }
        None
    }

    /// Integer numerators over one common denominator.
    fn scaled(&self) -> (Vec<BigInt>, BigInt) {
        let den = self
            .entries
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let ints = self
            .entries
            .iter()
            .map(|x| x.numer() * (&den / x.denom()))
            .collect();
        (ints, den)
    }

    /// Exact product, computed on integer numerators.
    pub fn mul(&self, other: &DenseExactMatrix) -> Result<DenseExactMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let (a, da) = self.scaled();
        let (b, db) = other.scaled();
        let den = da * db;
        let (n, p) = (self.cols, other.cols);
        let mut entries = Vec::with_capacity(self.rows * p);
        let mut acc = vec![BigInt::zero(); p];
        for i in 0..self.rows {
            for x in acc.iter_mut() {
                x.set_zero();
            }
            for t in 0..n {
                let av = &a[i * n + t];
                if av.is_zero() {
                    continue;
                }
                for (j, x) in acc.iter_mut().enumerate() {
                    let bv = &b[t * p + j];
                    if !bv.is_zero() {
                        *x += av * bv;
                    }
                }
            }
            entries.extend(acc.iter().map(|x| BigRational::new(x.clone(), den.clone())));
        }
        Ok(DenseExactMatrix {
            rows: self.rows,
            cols: p,
            entries,
        })
    }

    /// First entry where `self` and `expected` differ.
    fn first_difference(&self, expected: &DenseExactMatrix) -> Option<Failure> {
        if self.rows != expected.rows || self.cols != expected.cols {
            return Some(Failure {
                row: self.rows,
                col: self.cols,
                expected: format!("{}x{}", expected.rows, expected.cols),
                actual: format!("{}x{}", self.rows, self.cols),
            });
        }
        self.entries
            .iter()
            .zip(&expected.entries)
            .position(|(a, e)| a != e)
            .map(|i| Failure {
                row: i / self.cols,
                col: i % self.cols,
                expected: expected.entries[i].to_string(),
                actual: self.entries[i].to_string(),
            })
    }
}

/// A located mismatch. Values are rationals printed as `n/d` (or `n`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub row: usize,
    pub col: usize,
    pub expected: String,
    pub actual: String,
}

/// One named check: `{check, pass, first_failure}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub pass: bool,
    pub first_failure: Option<Failure>,
}

impl CheckReport {
    fn from_failure(check: &str, failure: Option<Failure>) -> Self {
        CheckReport {
            check: check.to_string(),
            pass: failure.is_none(),
            first_failure: failure,
        }
    }

    fn scalar(check: &str, expected: impl ToString, actual: impl ToString) -> Self {
        let (e, a) = (expected.to_string(), actual.to_string());
        let failure = (e != a).then_some(Failure {
            row: 0,
            col: 0,
            expected: e,
            actual: a,
        });
        Self::from_failure(check, failure)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

pub fn all_pass(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| r.pass)
}

fn symmetry_report(check: &str, m: &DenseExactMatrix) -> CheckReport {
    let failure = m.asymmetry().map(|(r, c)| Failure {
        row: r,
        col: c,
        expected: m.get(c, r).to_string(),
        actual: m.get(r, c).to_string(),
    });
    CheckReport::from_failure(check, failure)
}

/// The four Penrose conditions for `W` as pseudoinverse of `A`.
pub fn penrose_check(a: &DenseExactMatrix, w: &DenseExactMatrix) -> Result<Vec<CheckReport>> {
    if w.rows != a.cols || w.cols != a.rows {
        return Err(Error::DimensionMismatch {
            expected: a.cols * a.rows,
            found: w.rows * w.cols,
        });
    }
    let aw = a.mul(w)?;
    let wa = w.mul(a)?;
    let awa = aw.mul(a)?;
    let waw = wa.mul(w)?;
    Ok(vec![
        CheckReport::from_failure("AWA=A", awa.first_difference(a)),
        CheckReport::from_failure("WAW=W", waw.first_difference(w)),
        symmetry_report("AW symmetric", &aw),
        symmetry_report("WA symmetric", &wa),
    ])
}

/// Rank by fraction-free (Bareiss) elimination; rows are first scaled to
/// integers.
pub fn exact_rank(m: &DenseExactMatrix) -> usize {
    let mut rows: Vec<Vec<BigInt>> = (0..m.rows)
        .map(|r| {
            let row = m.row(r);
            let den = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| x.numer() * (&den / x.denom())).collect()
        })
        .collect();
    let mut prev = BigInt::one();
    let mut rank = 0;
    for c in 0..m.cols {
        let Some(p) = (rank..m.rows).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let (top, rest) = rows.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        let pivot = pivot_row[c].clone();
        for row in rest.iter_mut() {
            let factor = row[c].clone();
            for j in c + 1..m.cols {
                let v = (&pivot * &row[j] - &factor * &pivot_row[j]) / &prev;
                row[j] = v;
            }
            row[c].set_zero();
        }
        prev = pivot;
        rank += 1;
    }
    rank
}

/// Compares the rank of `A` against `R_k(B)`.
pub fn rank_check(a: &DenseExactMatrix, system: &SpectralSystem) -> CheckReport {
    let expected = r_poly(&system.profile.as_int_seq(), system.k as i64);
    CheckReport::scalar("rank(A)=R_k(B)", expected, exact_rank(a))
}

fn upsilon(system: &SpectralSystem) -> DenseExactMatrix {
    let rows = system.dim();
    let cols = system.len();
    let mut m = DenseExactMatrix::zeros(rows, cols);
    for (j, e) in system.eigenpairs.iter().enumerate() {
        for (i, x) in e.entries.iter().enumerate() {
            m.set(i, j, BigRational::from_integer(x.clone()));
        }
    }
    m
}

/// `Υ diag(s) Υ^T`.
fn upsilon_weighted_gram(system: &SpectralSystem, weights: &[BigRational]) -> DenseExactMatrix {
    let u = upsilon(system);
    let mut scaled = u.clone();
    for r in 0..scaled.rows {
        for (c, w) in weights.iter().enumerate() {
            let v = scaled.get(r, c) * w;
            scaled.set(r, c, v);
        }
    }
    scaled.mul(&u.transpose()).expect("conformable")
}

fn check_system_dims(a: &DenseExactMatrix, system: &SpectralSystem) -> Result<()> {
    if system.dim() != a.rows {
        return Err(Error::DimensionMismatch {
            expected: a.rows,
            found: system.dim(),
        });
    }
    Ok(())
}

fn max_deviation(actual: &DenseExactMatrix, expected: &DenseExactMatrix) -> Option<Failure> {
    let mut worst: Option<(usize, BigRational)> = None;
    for (i, (a, e)) in actual.entries.iter().zip(&expected.entries).enumerate() {
        let d = (a - e).abs();
        if !d.is_zero() && worst.as_ref().is_none_or(|(_, w)| &d > w) {
            worst = Some((i, d));
        }
    }
    worst.map(|(i, _)| Failure {
        row: i / actual.cols,
        col: i % actual.cols,
        expected: expected.entries[i].to_string(),
        actual: actual.entries[i].to_string(),
    })
}

/// `A A^T = Υ diag(λ / ‖x‖²) Υ^T`; a failure names the largest deviation.
pub fn gram_residual(a: &DenseExactMatrix, system: &SpectralSystem) -> Result<CheckReport> {
    check_system_dims(a, system)?;
    let aat = a.mul(&a.transpose())?;
    let weights: Vec<BigRational> = system
        .eigenpairs
        .iter()
        .map(|e| BigRational::new(e.eigenvalue.clone(), e.norm_sq.clone()))
        .collect();
    let rhs = upsilon_weighted_gram(system, &weights);
    Ok(CheckReport::from_failure("AA^T=QLQ^T", max_deviation(&aat, &rhs)))
}

/// `A^T Q Q^T = A^T`, with `Q Q^T = Υ diag(1/‖x‖²) Υ^T`.
pub fn column_space_check(a: &DenseExactMatrix, system: &SpectralSystem) -> Result<CheckReport> {
    check_system_dims(a, system)?;
    let weights: Vec<BigRational> = system
        .eigenpairs
        .iter()
        .map(|e| BigRational::new(BigInt::one(), e.norm_sq.clone()))
        .collect();
    let qqt = upsilon_weighted_gram(system, &weights);
    let at = a.transpose();
    Ok(CheckReport::from_failure("A^TQQ^T=A^T", at.mul(&qqt)?.first_difference(&at)))
}

fn vec_failure(i: usize, col: usize, expected: &BigInt, actual: &BigInt) -> Failure {
    Failure {
        row: i,
        col,
        expected: expected.to_string(),
        actual: actual.to_string(),
    }
}

fn first_vec_difference(col: usize, actual: &[BigInt], expected: &[BigInt]) -> Option<Failure> {
    if actual.len() != expected.len() {
        return Some(Failure {
            row: actual.len(),
            col,
            expected: format!("length {}", expected.len()),
            actual: format!("length {}", actual.len()),
        });
    }
    actual
        .iter()
        .zip(expected)
        .position(|(a, e)| a != e)
        .map(|i| vec_failure(i, col, &expected[i], &actual[i]))
}

fn int_matvec(rows: &[Vec<BigInt>], x: &[BigInt]) -> Vec<BigInt> {
    rows.iter()
        .map(|r| r.iter().zip(x).filter(|(a, _)| !a.is_zero()).map(|(a, b)| a * b).sum())
        .collect()
}

fn integer_rows(m: &DenseExactMatrix) -> Result<Vec<Vec<BigInt>>> {
    (0..m.rows)
        .map(|r| {
            m.row(r)
                .iter()
                .map(|x| {
                    if x.is_integer() {
                        Ok(x.to_integer())
                    } else {
                        Err(Error::Parse(format!("non-integer entry {x} in incidence matrix")))
                    }
                })
                .collect()
        })
        .collect()
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Eigen-equations and intertwining relations, each over every label:
/// `A A^T x = λ x`, `A z = x`, `A^T x = λ z`, `A^T A z = λ z`, and the
/// stored `‖x‖²` against the literal dot product. Failures report the
/// label index as `col` and the vector index as `row`.
pub fn eigen_checks(a: &DenseExactMatrix, system: &SpectralSystem) -> Result<Vec<CheckReport>> {
    check_system_dims(a, system)?;
    let a_rows = integer_rows(a)?;
    let at_rows = integer_rows(&a.transpose())?;
    let mut fails: [Option<Failure>; 5] = Default::default();
    for (j, e) in system.eigenpairs.iter().enumerate() {
        let z = eigvec_z(&system.profile, &e.label)?;
        let atx = int_matvec(&at_rows, &e.entries);
        let lam_x: Vec<BigInt> = e.entries.iter().map(|x| x * &e.eigenvalue).collect();
        let lam_z: Vec<BigInt> = z.iter().map(|x| x * &e.eigenvalue).collect();
        let found = [
            first_vec_difference(j, &int_matvec(&a_rows, &atx), &lam_x),
            first_vec_difference(j, &int_matvec(&a_rows, &z), &e.entries),
            first_vec_difference(j, &atx, &lam_z),
            first_vec_difference(j, &int_matvec(&at_rows, &int_matvec(&a_rows, &z)), &lam_z),
            {
                let d = dot(&e.entries, &e.entries);
                (d != e.norm_sq).then(|| vec_failure(0, j, &e.norm_sq, &d))
            },
        ];
        for (slot, f) in fails.iter_mut().zip(found) {
            if slot.is_none() {
                *slot = f;
            }
        }
    }
    let names = ["AA^Tx=lx", "Az=x", "A^Tx=lz", "A^TAz=lz", "norm_sq"];
    Ok(names
        .iter()
        .zip(fails)
        .map(|(n, f)| CheckReport::from_failure(n, f))
        .collect())
}

/// Pairwise orthogonality of the `x` and of the `z` vectors; a failure names
/// the two label indices.
pub fn orthogonality_check(system: &SpectralSystem) -> Result<Vec<CheckReport>> {
    let zs = system
        .eigenpairs
        .iter()
        .map(|e| eigvec_z(&system.profile, &e.label))
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<&[BigInt]> = system.eigenpairs.iter().map(|e| e.entries.as_slice()).collect();
    let find = |vs: &[&[BigInt]]| {
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                let d = dot(vs[i], vs[j]);
                if !d.is_zero() {
                    return Some(vec_failure(i, j, &BigInt::zero(), &d));
                }
            }
        }
        None
    };
    let z_refs: Vec<&[BigInt]> = zs.iter().map(Vec::as_slice).collect();
    Ok(vec![
        CheckReport::from_failure("x orthogonal", find(&xs)),
        CheckReport::from_failure("z orthogonal", find(&z_refs)),
    ])
}

/// `sum λ = C(l,k) prod b_i` and eigenpair count `= R_k(B)`.
pub fn trace_check(system: &SpectralSystem) -> Vec<CheckReport> {
    let b = system.profile.as_int_seq();
    let l = system.profile.len() as u64;
    let trace: BigInt = system.eigenpairs.iter().map(|e| &e.eigenvalue).sum();
    vec![
        CheckReport::scalar("trace", binomial(l, system.k as u64) * b.product(), trace),
        CheckReport::scalar("count=R_k(B)", r_poly(&b, system.k as i64), system.len()),
    ]
}

/// `H` symmetric, `H H = H` and every row summing to 1.
pub fn projector_checks(h: &DenseExactMatrix) -> Result<Vec<CheckReport>> {
    let hh = h.mul(h)?;
    let row_sum = (0..h.rows).find_map(|r| {
        let s: BigRational = h.row(r).iter().sum();
        (!s.is_one()).then(|| Failure {
            row: r,
            col: 0,
            expected: "1".into(),
            actual: s.to_string(),
        })
    });
    Ok(vec![
        symmetry_report("H symmetric", h),
        CheckReport::from_failure("HH=H", hh.first_difference(h)),
        CheckReport::from_failure("H row sums", row_sum),
    ])
}

/// Compares two matrices entrywise under a given check name.
pub fn equality_check(check: &str, actual: &DenseExactMatrix, expected: &DenseExactMatrix) -> CheckReport {
    CheckReport::from_failure(check, actual.first_difference(expected))
}
