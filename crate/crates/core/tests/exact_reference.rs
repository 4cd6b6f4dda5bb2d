mod common;

use common::*;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tfim::exact::{diagonalize, exact_sweep, order_parameter, solve, OrderParameterVariant};
use tfim::model::{build_hamiltonian, expectation, SpinChainModel};

fn template() -> SpinChainModel {
    SpinChainModel::new(4, 1.0, 0.0).unwrap()
}

#[test]
fn energies_match_published_column() {
    let r = exact_sweep(&template(), &GRID, OrderParameterVariant::ExcludeDiagonal).unwrap();
    for (o, e) in r.iter().zip(EXACT_ENERGY) {
        assert!((o.energy - e).abs() < 1e-4, "h={} E={}", o.field, o.energy);
    }
}

#[test]
fn individual_spectra() {
    for (h, e) in [(1.4, -6.1403), (1.8, -7.6191)] {
        let s = diagonalize(&build_hamiltonian(&template().with_field(h).unwrap())).unwrap();
        assert!((s.ground_energy() - e).abs() < 1e-4);
    }
}

#[test]
fn exclude_diagonal_reproduces_order_parameter_column() {
    let r = exact_sweep(&template(), &GRID, OrderParameterVariant::ExcludeDiagonal).unwrap();
    for (o, m) in r.iter().zip(EXACT_MZ) {
        assert!(
            (o.order_parameter - m).abs() < 1e-4,
            "h={} M={}",
            o.field,
            o.order_parameter
        );
        // The printed all-pairs form sits above 1/sqrt(N) and cannot match.
        assert!(o.order_parameter_include >= 0.5);
        assert!((o.order_parameter_include - m).abs() > 0.1);
    }
}

#[test]
fn order_parameter_at_h06_via_contraction() {
    let o = solve(
        &template().with_field(0.6).unwrap(),
        OrderParameterVariant::ExcludeDiagonal,
    )
    .unwrap();
    let m = order_parameter(&o.zz_correlations, OrderParameterVariant::ExcludeDiagonal).unwrap();
    assert!((m - 0.7259).abs() < 1e-4);
}

#[test]
fn classical_limit() {
    let r = exact_sweep(&template(), &[0.0], OrderParameterVariant::ExcludeDiagonal).unwrap();
    assert_eq!(r[0].energy, -3.0);
    assert_eq!(r[0].degeneracy_gap, 0.0);
    // Degenerate ground space: every pair is fully correlated whichever vector is returned.
    assert!(r[0]
        .zz_correlations
        .iter()
        .flatten()
        .all(|c| (c - 1.0).abs() < 1e-12));
    assert!((r[0].order_parameter_include - 1.0).abs() < 1e-12);
}

#[test]
fn variational_floor_on_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for o in exact_sweep(&template(), &GRID, OrderParameterVariant::ExcludeDiagonal).unwrap() {
        let op = build_hamiltonian(&template().with_field(o.field).unwrap());
        for _ in 0..100 {
            let v: Vec<Complex64> = (0..16)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let n = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            let psi: Vec<Complex64> = v.into_iter().map(|a| a / n).collect();
            assert!(o.energy <= expectation(&op, &psi).unwrap() + 1e-12);
        }
    }
}

#[test]
fn order_parameter_decreases_with_field() {
    let grid: Vec<f64> = (0..=32).map(|k| 0.2 + 1.6 * k as f64 / 32.0).collect();
    let r = exact_sweep(&template(), &grid, OrderParameterVariant::ExcludeDiagonal).unwrap();
    for w in r.windows(2) {
        assert!(
            w[1].order_parameter < w[0].order_parameter,
            "h={}",
            w[1].field
        );
    }
    for o in &r {
        assert!(o.z_expectations.iter().all(|z| z.abs() < 1e-8));
        assert!(o.zz_correlations.iter().flatten().all(|&c| c >= -1e-10));
        assert!((0.0..=1.0).contains(&o.order_parameter));
    }
}

#[test]
fn residuals_on_larger_chain() {
    let op = build_hamiltonian(&SpinChainModel::new(7, 1.0, 0.9).unwrap());
    let s = diagonalize(&op).unwrap();
    let hv = op.apply_real(&s.ground_vector);
    let res = hv
        .iter()
        .zip(&s.ground_vector)
        .map(|(a, b)| (a - s.ground_energy() * b).abs())
        .fold(0.0, f64::max);
    assert!(res < 1e-9);
}
