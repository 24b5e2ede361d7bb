use std::fs::File;
use std::io::{BufReader, BufWriter};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use kmer_pinv::estimate::{estimate_counts, read_sequences, ClassMap};
use kmer_pinv::io::{
    read_matrix_csv, read_matrix_json, read_matrix_market, read_system_json, word_labels, write_matrix_csv,
    write_matrix_json, write_matrix_market, write_system_json, NumberFormat,
};
use kmer_pinv::oracle::{all_pass, penrose_check, DenseExactMatrix};
use kmer_pinv::pinv::{h_apply, materialize_h, materialize_w, materialize_w_with, PinvOperator};
use kmer_pinv::spectra::{build_incidence, build_system, build_system_with};
use kmer_pinv::{AlphabetProfile, Execution, WordSpace};

fn prof(b: &[u32]) -> AlphabetProfile {
    AlphabetProfile::new(b.to_vec()).unwrap()
}

#[test]
fn artifacts_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let p = prof(&[2, 4, 3]);
    let k = 2;
    let a = build_incidence(&p, k).unwrap();
    let s = build_system(&p, k).unwrap();
    let w = materialize_w(&p, k).unwrap();
    let rows = word_labels(&p, &WordSpace::sigma(&p).unwrap().words());
    let cols = word_labels(&p, &WordSpace::gapped(&p, k).unwrap().words());

    let path = dir.path().join("A.mtx");
    write_matrix_market(&a, BufWriter::new(File::create(&path).unwrap())).unwrap();
    assert_eq!(read_matrix_market(BufReader::new(File::open(&path).unwrap())).unwrap(), a);

    let path = dir.path().join("spectrum.json");
    write_system_json(&s, BufWriter::new(File::create(&path).unwrap())).unwrap();
    assert_eq!(read_system_json(File::open(&path).unwrap()).unwrap(), s);

    let path = dir.path().join("W.csv");
    write_matrix_csv(&w, &rows, &cols, NumberFormat::Exact, File::create(&path).unwrap()).unwrap();
    let back = read_matrix_csv(File::open(&path).unwrap()).unwrap();
    assert_eq!((back.matrix, back.row_labels, back.col_labels), (w.clone(), rows.clone(), cols.clone()));

    let path = dir.path().join("W.json");
    write_matrix_json(&w, &rows, &cols, NumberFormat::Exact, File::create(&path).unwrap()).unwrap();
    assert_eq!(read_matrix_json(File::open(&path).unwrap()).unwrap().matrix, w);
}

#[test]
fn reloaded_artifacts_still_certify() {
    let dir = tempfile::tempdir().unwrap();
    let p = prof(&[3, 3, 2]);
    let k = 1;
    let path = dir.path().join("A.mtx");
    write_matrix_market(&build_incidence(&p, k).unwrap(), File::create(&path).unwrap()).unwrap();
    let a = DenseExactMatrix::from_incidence(&read_matrix_market(BufReader::new(File::open(&path).unwrap())).unwrap());
    let w = materialize_w(&p, k).unwrap();
    assert!(all_pass(&penrose_check(&a, &w).unwrap()));
}

#[test]
fn estimate_is_projection_of_observed_counts() {
    let p = prof(&[4, 4, 4]);
    let map = ClassMap::constant(4);
    let input = "# reads\nr1\t0123012301\nr2\t3333210\n\nr3\t121\n";
    let records = read_sequences(input.as_bytes(), &map).unwrap();
    assert_eq!(records.len(), 3);
    for k in 0..=3 {
        let est = estimate_counts(&p, k, &map, &records, Execution::default()).unwrap();
        let total: BigInt = est.observed.iter().sum();
        assert_eq!(total, BigInt::from(8 + 5 + 1));
        let observed: Vec<BigRational> = est.observed.iter().cloned().map(BigRational::from_integer).collect();
        assert_eq!(est.estimate, h_apply(&p, k, &observed).unwrap(), "k={k}");
        // H preserves the total count
        let sum: BigRational = est.estimate.iter().sum();
        assert_eq!(sum, BigRational::from_integer(total));
    }
    let est = estimate_counts(&p, 3, &map, &records, Execution::Sequential).unwrap();
    let observed: Vec<BigRational> = est.observed.iter().cloned().map(BigRational::from_integer).collect();
    assert_eq!(est.estimate, observed);
}

#[test]
fn sequential_and_parallel_agree() {
    let p = prof(&[3, 2, 4, 2, 3]);
    for k in [1, 3] {
        assert_eq!(
            materialize_w_with(&p, k, Execution::Sequential).unwrap(),
            materialize_w_with(&p, k, Execution::Parallel).unwrap()
        );
        assert_eq!(
            build_system_with(&p, k, Execution::Sequential).unwrap(),
            build_system_with(&p, k, Execution::Parallel).unwrap()
        );
        let rows = WordSpace::gapped(&p, k).unwrap().len();
        let counts: Vec<BigRational> = (0..rows).map(|i| BigRational::from_integer(BigInt::from(i % 7))).collect();
        let seq = PinvOperator::with_execution(&p, k, Execution::Sequential).unwrap().apply_w(&counts).unwrap();
        let par = PinvOperator::with_execution(&p, k, Execution::Parallel).unwrap().apply_w(&counts).unwrap();
        assert_eq!(seq, par);
    }
}

#[test]
fn h_kills_the_orthogonal_complement() {
    let p = prof(&[2, 3, 2]);
    let k = 1;
    let h = materialize_h(&p, k).unwrap();
    let a = DenseExactMatrix::from_incidence(&build_incidence(&p, k).unwrap());
    let ha_t = h.mul(&a.transpose()).unwrap();
    assert_eq!(ha_t, a.transpose());
    let rank = h.entries().chunks(h.cols()).enumerate().map(|(i, r)| r[i].clone()).sum::<BigRational>();
    assert!(!rank.is_zero());
    assert_eq!(rank, BigRational::from_integer(build_system(&p, k).unwrap().len().into()));
}
