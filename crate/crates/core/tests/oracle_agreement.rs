use std::f64::consts::PI;

use tripartite_cqed::fock_field::{binomial_amplitude, squeezed_weight, FieldConfig};
use tripartite_cqed::oracle::{
    compare_states, full_evolution, hamiltonian_block_evolution, squeezed_vacuum_amplitudes,
    truncated_beam_splitter, Block,
};
use tripartite_cqed::tavis_cummings::{
    one_atom_unitary, two_atom_unitary, ClosedFormEvaluator, ClosedFormVariant, EvolutionParams,
};

#[test]
fn closed_form_matches_brute_force() {
    for &theta in &[PI / 3.0, PI / 2.0, PI] {
        for &s in &[0.3, 0.9] {
            let config = FieldConfig::new(s, theta, 24).unwrap();
            let evaluator = ClosedFormEvaluator::new(config);
            for &tau in &[0.3, 2.0, 14.5] {
                let oracle = full_evolution(&config, tau).unwrap();
                let closed = evaluator.rho(EvolutionParams::new(tau).unwrap());
                let report = compare_states(&closed, &oracle.rho, 1e-10).unwrap();
                assert!(report.passed(), "theta={theta} s={s} tau={tau}\n{report}");
            }
        }
    }
}

#[test]
fn uncorrected_coherences_disagree_with_brute_force() {
    let config = FieldConfig::new(0.6, PI, 20).unwrap();
    let evaluator = ClosedFormEvaluator::with_variant(config, ClosedFormVariant::Uncorrected);
    let oracle = full_evolution(&config, 0.8).unwrap();
    let report = compare_states(
        &evaluator.rho(EvolutionParams::new(0.8).unwrap()),
        &oracle.rho,
        1e-8,
    )
    .unwrap();
    assert!(!report.passed());
    let (i, j) = report.argmax;
    assert!([
        (0, 5),
        (0, 6),
        (5, 0),
        (6, 0),
        (1, 7),
        (2, 7),
        (7, 1),
        (7, 2)
    ]
    .contains(&(i, j)));
}

#[test]
fn trace_deficit_agrees() {
    let config = FieldConfig::new(0.9, PI / 2.0, 15).unwrap();
    let oracle = full_evolution(&config, 1.0).unwrap();
    let evaluator = ClosedFormEvaluator::new(config);
    assert!((oracle.squeezing_deficit - evaluator.deficit()).abs() < 1e-12);
    assert!((oracle.rho.trace() + evaluator.deficit() - 1.0).abs() < 1e-12);
}

#[test]
fn squeezed_ladder_matches_weights() {
    let amps = squeezed_vacuum_amplitudes(1.2, 80).unwrap();
    for (n, a) in amps.iter().enumerate() {
        assert!((a - squeezed_weight(n, 1.2)).abs() < 1e-12, "n={n}");
    }
}

#[test]
fn beam_splitter_matches_binomial_amplitudes() {
    for &theta in &[0.0, PI / 3.0, PI / 2.0, 2.5, PI] {
        let bs = truncated_beam_splitter(theta, 30).unwrap();
        for n in 0..=28 {
            for k in 0..=n {
                let sign = if (n - k) % 2 == 0 { 1.0 } else { -1.0 };
                let expected = sign * binomial_amplitude(n, k, theta).unwrap();
                let got = bs.amplitude(n, k);
                assert!(
                    got.im.abs() < 1e-10 && (got.re - expected).abs() < 1e-10,
                    "theta={theta} n={n} k={k}"
                );
            }
        }
    }
}

#[test]
fn block_unitaries_match_numerical_exponentials() {
    for n in 0..25 {
        for &tau in &[0.0, 0.8, 14.5] {
            let closed = two_atom_unitary(n, tau).matrix;
            let numeric = hamiltonian_block_evolution(Block::TwoAtomCoupled, n, tau).unwrap();
            assert!(
                (closed - numeric).norm() < 1e-10,
                "two atoms n={n} tau={tau}"
            );
            let closed = one_atom_unitary(n, tau).matrix;
            let numeric = hamiltonian_block_evolution(Block::OneAtom, n, tau).unwrap();
            assert!(
                (closed - numeric).norm() < 1e-10,
                "one atom n={n} tau={tau}"
            );
        }
    }
}
