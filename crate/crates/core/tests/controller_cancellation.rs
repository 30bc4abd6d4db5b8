//! Seeded randomized verification that the synthesized controls cancel the
//! nonlinear coupling: over many random state tuples, the assembled error
//! derivative must match the diagonal closed loop applied to the error.

use fracsync_core::chen::{State3, SystemParams};
use fracsync_core::controller::{
    aggregate_controls, allocate, error_rhs_coupled, error_state, feedback, gain_matrix,
    AllocationCase, HybridScheme,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_state(rng: &mut ChaCha8Rng) -> State3 {
    State3([
        rng.gen_range(-50.0..50.0),
        rng.gen_range(-50.0..50.0),
        rng.gen_range(-50.0..50.0),
    ])
}

#[test]
fn cancellation_holds_over_1000_random_tuples_both_allocations() {
    let p = SystemParams::default();
    let scheme = HybridScheme::default();
    let spec = gain_matrix(&p, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);

    let mut worst: f64 = 0.0;
    for sample in 0..1000 {
        let x = random_state(&mut rng);
        let y = random_state(&mut rng);
        let z = random_state(&mut rng);
        let w = random_state(&mut rng);
        let e = error_state(x, y, z, w, &scheme);
        let v = feedback(&e, &spec);
        let u = aggregate_controls(x, y, z, w, v, &p, &scheme);
        let linear = spec.closed_loop().mul_vec(e.0);

        for case in [
            AllocationCase::SplitEqually,
            AllocationCase::FirstResponseOnly,
        ] {
            let (uz, uw) = allocate(u, case);
            let rhs = error_rhs_coupled(x, y, z, w, uz, uw, &p, &scheme);
            for i in 0..3 {
                let resid = (rhs[i] - linear[i]).abs();
                let bound = 1e-9 * linear[i].abs() + 1e-12;
                assert!(
                    resid <= bound,
                    "sample {sample} case {case:?} component {i}: \
                     rhs = {}, linear = {}, residual = {resid:e}",
                    rhs[i],
                    linear[i]
                );
                worst = worst.max(if linear[i].abs() > 0.0 {
                    resid / linear[i].abs()
                } else {
                    resid
                });
            }
        }
    }
    // Cancellation is algebraic, so the residual is pure rounding noise.
    println!("worst relative residual over 1000 tuples: {worst:e}");
}

#[test]
fn cancellation_holds_for_generalized_schemes() {
    // Same identity under random mode assignments and projective scales.
    use fracsync_core::controller::SyncMode;
    let p = SystemParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0xa11c);
    let modes = [SyncMode::Complete, SyncMode::Anti, SyncMode::Projective];

    for sample in 0..200 {
        let scheme = HybridScheme::new(
            [
                modes[rng.gen_range(0..3)],
                modes[rng.gen_range(0..3)],
                modes[rng.gen_range(0..3)],
            ],
            // Keep the scale away from zero: the gain divides by it.
            rng.gen_range(0.5..6.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 },
        )
        .expect("nonzero finite scale");
        let lambda = rng.gen_range(-3.0..6.0);
        let spec = gain_matrix(&p, lambda);

        let x = random_state(&mut rng);
        let y = random_state(&mut rng);
        let z = random_state(&mut rng);
        let w = random_state(&mut rng);
        let e = error_state(x, y, z, w, &scheme);
        let v = feedback(&e, &spec);
        let u = aggregate_controls(x, y, z, w, v, &p, &scheme);
        let (uz, uw) = allocate(u, AllocationCase::SplitEqually);
        let rhs = error_rhs_coupled(x, y, z, w, uz, uw, &p, &scheme);
        let linear = spec.closed_loop().mul_vec(e.0);
        for i in 0..3 {
            assert!(
                (rhs[i] - linear[i]).abs() <= 1e-9 * linear[i].abs() + 1e-9,
                "sample {sample} component {i}: rhs = {}, linear = {}",
                rhs[i],
                linear[i]
            );
        }
    }
}
