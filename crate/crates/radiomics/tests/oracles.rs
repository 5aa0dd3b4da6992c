//! Texture matrices and features against brute-force references on seeded random volumes.

mod common;

#[test]
fn random_volumes_match_references() {
    for seed in 0..120 {
        if let Err(e) = common::check_case(seed, 1e-10) {
            panic!("{e}");
        }
    }
}

#[test]
fn references_reproduce_the_worked_run_lengths() {
    let v = radiomics::phantom::worked_image();
    let order = [[1, 0, 0], [1, 1, 0], [0, 1, 0], [-1, 1, 0]];
    for (m, want) in order.into_iter().zip(radiomics::phantom::GLRLM.iter()) {
        let got = common::glrlm(&v, Some(0), m);
        let padded: Vec<Vec<u64>> = got.iter().map(|r| (0..4).map(|j| r.get(j).copied().unwrap_or(0)).collect()).collect();
        let want: Vec<Vec<u64>> = want.iter().map(|r| r.to_vec()).collect();
        assert_eq!(padded, want, "direction {m:?}");
    }
}
