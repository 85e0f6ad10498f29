//! Cross-module invariants swept over k and randomized angles.

use std::f64::consts::PI;

use proptest::prelude::*;
use quaquaversal::blocks::{
    block_grid, diagonal_block_mismatch, structure_report, verify_theorem_on, AxisPair, Partition,
};
use quaquaversal::linalg::{frobenius, unitarity_defect};
use quaquaversal::repgen::{rot, Axis, IrrepIndex};
use quaquaversal::spectra::{block_spectrum, dense_spectrum, quaquaversal_operator};
use quaquaversal::tiling::{moment_residual, GenerationIndex, MomentMode};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rotations_are_unitary_homomorphisms(
        k in 0u32..=25,
        a in -7.0f64..7.0,
        b in -7.0f64..7.0,
        axis in prop_oneof![Just(Axis::X), Just(Axis::Y), Just(Axis::Z)],
    ) {
        let k = IrrepIndex::new(k);
        let ra = rot(axis, k, a);
        prop_assert!(unitarity_defect(ra.matrix()) <= 1e-10 * k.dim() as f64);
        let lhs = &ra * &rot(axis, k, b);
        let rhs = rot(axis, k, a + b);
        prop_assert!(frobenius(&(lhs.matrix() - rhs.matrix())) <= 1e-9);
    }

    #[test]
    fn theorem_holds_at_random_angles(k in 1u32..=20, theta in 0.0f64..(2.0 * PI)) {
        let part = Partition::quaquaversal(IrrepIndex::new(k)).unwrap();
        let report = verify_theorem_on(&part, theta).unwrap();
        prop_assert!(report.max() <= 1e-8, "{:?}", report);
    }
}

#[test]
fn quaquaversal_structure_through_k60() {
    for k in 1..=60 {
        let k = IrrepIndex::new(k);
        let part = Partition::quaquaversal(k).unwrap();
        let grid = block_grid(&quaquaversal_operator(k), &part).unwrap();
        let r = structure_report(&grid);
        assert!(r.within(1e-9), "k = {k}: {r:?}");
    }
}

#[test]
fn swapped_partition_structure() {
    for k in [1, 2, 9, 24] {
        let k = IrrepIndex::new(k);
        let part = Partition::new(k, AxisPair::QUAQUAVERSAL.swapped()).unwrap();
        let grid = block_grid(&quaquaversal_operator(k), &part).unwrap();
        assert!(structure_report(&grid).within(1e-9));
    }
}

#[test]
fn predicted_diagonal_blocks_through_k40() {
    for k in 1..=40 {
        let part = Partition::quaquaversal(IrrepIndex::new(k)).unwrap();
        let m = diagonal_block_mismatch(&part).unwrap();
        assert!(m.iter().all(|&x| x <= 1e-9), "k = {k}: {m:?}");
    }
}

#[test]
fn realness_and_moments_through_k60() {
    for k in 1..=60 {
        let k = IrrepIndex::new(k);
        let dense = dense_spectrum(k).unwrap();
        assert!(dense.realness_residual <= 1e-8, "k = {k}");
        assert!(
            dense.moments_valid(),
            "k = {k}: {:?}",
            dense.trace_moment_residuals
        );
        assert_eq!(dense.total_multiplicity(), k.dim());
        assert!(dense.spectral_radius < 1.0 - 10.0 * dense.backward_error);
        let block = block_spectrum(k).unwrap();
        assert!(block.moments_valid(), "k = {k}");
    }
}

#[test]
fn exact_moment_identity() {
    for k in 0..=6 {
        for n in 0..=4 {
            let r = moment_residual(
                IrrepIndex::new(k),
                GenerationIndex::new(n),
                MomentMode::Exact,
            )
            .unwrap();
            assert!(r <= 1e-10, "k = {k}, N = {n}: {r}");
        }
    }
}

#[test]
fn sampled_error_scales_like_inverse_sqrt_count() {
    let k = IrrepIndex::new(2);
    let n = GenerationIndex::new(4);
    let scaled: Vec<f64> = [1_000u64, 10_000, 100_000]
        .iter()
        .map(|&count| {
            let r = moment_residual(k, n, MomentMode::Sampled { count, seed: 11 }).unwrap();
            r * (count as f64).sqrt()
        })
        .collect();
    let hi = scaled.iter().copied().fold(f64::MIN, f64::max);
    let lo = scaled.iter().copied().fold(f64::MAX, f64::min);
    assert!(hi / lo <= 4.0, "{scaled:?}");
}
