use proptest::prelude::*;
use tensorfill::core::random::{standard_normals, stream_rng};
use tensorfill::core::sampling::sample_exact;
use tensorfill::core::tensor::project_mask;
use tensorfill::core::{DMatrix, DVector, Tensor};
use tensorfill::io::*;
use tensorfill::Error;

fn random_tensor(k: usize, d: usize, seed: u64) -> Tensor {
    Tensor::from_values(k, d, standard_normals(&mut stream_rng(seed, 0), d.pow(k as u32))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn tensor_round_trip_is_bit_exact(k in 1usize..4, d in 1usize..5, seed in any::<u64>()) {
        let t = random_tensor(k, d, seed);
        let mut buf = Vec::new();
        write_tensor(&mut buf, &t).unwrap();
        prop_assert_eq!(read_tensor(buf.as_slice()).unwrap(), t);
    }

    #[test]
    fn observation_round_trip_is_bit_exact(d in 1usize..5, seed in any::<u64>(), frac in 0.0f64..=1.0) {
        let t = random_tensor(3, d, seed);
        let n = (frac * (d * d * d) as f64) as usize;
        let mask = sample_exact(3, d, n, &mut stream_rng(seed, 1)).unwrap();
        let y = project_mask(&t, &mask).unwrap();
        let mut buf = Vec::new();
        write_observations(&mut buf, &y).unwrap();
        prop_assert_eq!(read_observations(buf.as_slice()).unwrap(), y);
    }

    #[test]
    fn matrix_and_component_round_trips(rows in 1usize..6, cols in 1usize..6, seed in any::<u64>()) {
        let m = DMatrix::from_vec(rows, cols, standard_normals(&mut stream_rng(seed, 2), rows * cols));
        let mut buf = Vec::new();
        write_matrix(&mut buf, &m).unwrap();
        prop_assert_eq!(read_matrix(buf.as_slice()).unwrap(), m.clone());

        let comps: Vec<DVector<f64>> = m.column_iter().map(|c| c.into_owned()).collect();
        let mut buf = Vec::new();
        write_components(&mut buf, &comps).unwrap();
        prop_assert_eq!(read_components(buf.as_slice()).unwrap(), comps);
    }
}

#[test]
fn extreme_floats_survive() {
    let values = vec![f64::MIN_POSITIVE, -0.0, 1e308, -5e-324, 0.1 + 0.2, 1.0 / 3.0, f64::EPSILON, -7.0];
    let t = Tensor::from_values(3, 2, values).unwrap();
    let mut buf = Vec::new();
    write_tensor(&mut buf, &t).unwrap();
    let back = read_tensor(buf.as_slice()).unwrap();
    for (a, b) in t.values().iter().zip(back.values()) {
        assert_eq!(a.to_bits(), b.to_bits());
    }
}

#[test]
fn observation_indices_are_one_based() {
    let y = read_observations("3 2 2\n1 1 1 0.5\n2 2 2 -1.5\n".as_bytes()).unwrap();
    assert_eq!(y.tensor().get(&[0, 0, 0]), 0.5);
    assert_eq!(y.tensor().get(&[1, 1, 1]), -1.5);
    assert_eq!(y.mask().len(), 2);
}

#[test]
fn parse_errors_carry_line_numbers() {
    match read_observations("3 2 2\n1 1 1 0.5\n1 3 1 2.0\n".as_bytes()) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("unexpected {other:?}"),
    }
    match read_tensor("2 2\n1 2\n3 x\n".as_bytes()) {
        Err(Error::Parse { line, message }) => {
            assert_eq!(line, 3);
            assert!(message.contains("`x`"));
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(read_tensor("2 2\n1 2 3\n".as_bytes()), Err(Error::Parse { .. })));
    assert!(matches!(read_tensor("2 2\n1 2 3 4 5\n".as_bytes()), Err(Error::Parse { .. })));
    assert!(matches!(read_observations("3 0 0\n".as_bytes()), Err(Error::Parse { .. })));
    assert!(matches!(read_observations("3 2 9\n".as_bytes()), Err(Error::Infeasible(_))));
    assert!(matches!(read_observations("1 2 1\n0 1.0\n".as_bytes()), Err(Error::Parse { .. })));
}

#[test]
fn files_round_trip_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.txt");
    let t = random_tensor(3, 3, 5);
    write_file(&path, |w| write_tensor(w, &t)).unwrap();
    assert_eq!(load_tensor(&path).unwrap(), t);
    assert!(matches!(load_tensor(&dir.path().join("missing.txt")), Err(Error::Io { .. })));
}
