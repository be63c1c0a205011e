use metrokit::channels::DephasingChannel;
use metrokit::linalg::{self, c, CMatrix, CVector, I};
use metrokit::operators::{build_hamiltonian, HamiltonianKind, HermitianOperator};
use metrokit::qfi::{qfi_dephased, qfi_dephased_spectral, qfi_from_sld, qfi_mixed_sld, qfi_pure, sld, spectral_qfi, DephasedQfiEngine};
use metrokit::states::{ghz_state, pretty_good_state, variance, QuantumState};
use metrokit::su2::{collective_spin_generators, generators_for_kind, Axis};
use proptest::prelude::*;

fn complex_vector(amps: &[(f64, f64)]) -> CVector {
    CVector::from_iterator(amps.len(), amps.iter().map(|&(re, im)| c(re, im)))
}

/// Projects onto states even under the global flip and the reversal of qubit order.
fn symmetrise(v: &CVector, n: usize) -> CVector {
    let dim = 1usize << n;
    let reverse = |x: usize| (0..n).fold(0, |acc, q| (acc << 1) | (x >> q & 1));
    CVector::from_fn(dim, |x, _| (v[x] + v[x ^ (dim - 1)] + v[reverse(x)] + v[reverse(x) ^ (dim - 1)]) * c(0.25, 0.0))
}

fn amplitudes(dim: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim)
}

#[test]
fn ghz_saturates_heisenberg_scaling() {
    for n in 2..=8 {
        let h = build_hamiltonian(HamiltonianKind::Local, n).unwrap();
        let value = qfi_pure(&ghz_state(n).unwrap(), &h).unwrap().value;
        assert!((value - (n * n) as f64).abs() < 1e-9);
    }
}

#[test]
fn weak_noise_approaches_pure_value() {
    for (kind, n) in [(HamiltonianKind::Local, 6), (HamiltonianKind::NearestNeighbor, 6)] {
        let gens = generators_for_kind(kind, n).unwrap();
        let axis = if kind == HamiltonianKind::Local { Axis::Two } else { Axis::Three };
        let state = pretty_good_state(&gens, axis, None).unwrap();
        let h = build_hamiltonian(kind, n).unwrap();
        let pure = 4.0 * variance(&state, &h).unwrap();
        let ch = DephasingChannel::from_rate(n, 1e-6, 1.0).unwrap();
        let noisy = qfi_dephased(&state, &h, &ch).unwrap().value;
        assert!(((noisy - pure) / pure).abs() < 1e-3, "{kind}: {noisy} vs {pure}");
        assert!(noisy <= pure + 1e-9);
    }
}

#[test]
fn sld_and_spectral_agree_for_local_pretty_good_state() {
    let gens = collective_spin_generators(4).unwrap();
    let state = pretty_good_state(&gens, Axis::Two, Some(2)).unwrap();
    let h = build_hamiltonian(HamiltonianKind::Local, 4).unwrap();
    let ch = DephasingChannel::new(4, 0.9).unwrap();
    let a = qfi_mixed_sld(&state, &h, &ch, 0.0).unwrap().value;
    let b = qfi_dephased_spectral(&state, &h, &ch).unwrap().value;
    assert!((a - b).abs() < 1e-9, "{a} vs {b}");
}

#[test]
fn sld_solves_its_defining_equation() {
    let psi = ghz_state(3).unwrap();
    let h = build_hamiltonian(HamiltonianKind::NearestNeighbor, 3).unwrap();
    let rho = QuantumState::mixed(metrokit::channels::dephase_pure(psi.vector().unwrap(), &DephasingChannel::new(3, 0.8).unwrap()).unwrap()).unwrap();
    let m = rho.density_matrix();
    let drho = linalg::commutator(h.matrix(), &m) * I;
    let l = sld(&rho, &drho).unwrap();
    let lhs = (&l * &m + &m * &l) * c(0.5, 0.0);
    assert!(linalg::max_abs(&(lhs - &drho)) < 1e-10);
    assert!((qfi_from_sld(&rho, &l) - spectral_qfi(&m, h.matrix())).abs() < 1e-9);
}

#[test]
fn qfi_is_additive_over_independent_copies() {
    let single = ghz_state(2).unwrap();
    let h1 = build_hamiltonian(HamiltonianKind::Local, 2).unwrap();
    let pair = QuantumState::normalized(single.vector().unwrap().kronecker(single.vector().unwrap())).unwrap();
    let id = CMatrix::identity(4, 4);
    let h2 = HermitianOperator::new(h1.matrix().kronecker(&id) + id.kronecker(h1.matrix())).unwrap();
    let f1 = qfi_dephased_spectral(&single, &h1, &DephasingChannel::new(2, 0.85).unwrap()).unwrap().value;
    let f2 = qfi_dephased_spectral(&pair, &h2, &DephasingChannel::new(4, 0.85).unwrap()).unwrap().value;
    assert!((f2 - 2.0 * f1).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sector_engine_matches_dense(amps in amplitudes(32), p in 0.5f64..1.0, symmetric in any::<bool>(), nn in any::<bool>()) {
        let n = 5;
        let mut v = complex_vector(&amps);
        if symmetric {
            v = symmetrise(&v, n);
        }
        prop_assume!(v.norm() > 1e-3);
        let state = QuantumState::normalized(v).unwrap();
        let kind = if nn { HamiltonianKind::NearestNeighbor } else { HamiltonianKind::Local };
        let h = build_hamiltonian(kind, n).unwrap();
        let ch = DephasingChannel::new(n, p).unwrap();
        let engine = DephasedQfiEngine::new(state.vector().unwrap(), &h).unwrap();
        let dense = qfi_dephased_spectral(&state, &h, &ch).unwrap().value;
        prop_assert!((engine.qfi(&ch).unwrap() - dense).abs() < 1e-9 * dense.max(1.0));
    }

    #[test]
    fn sld_matches_spectral_and_ignores_theta(amps in amplitudes(8), p in 0.5f64..0.99) {
        let v = complex_vector(&amps);
        prop_assume!(v.norm() > 1e-3);
        let state = QuantumState::normalized(v).unwrap();
        let h = build_hamiltonian(HamiltonianKind::NearestNeighbor, 3).unwrap();
        let ch = DephasingChannel::new(3, p).unwrap();
        let spectral = qfi_dephased_spectral(&state, &h, &ch).unwrap().value;
        for theta in [0.0, 0.3] {
            let via_sld = qfi_mixed_sld(&state, &h, &ch, theta).unwrap().value;
            prop_assert!((via_sld - spectral).abs() < 1e-8 * spectral.max(1.0), "theta {}: {} vs {}", theta, via_sld, spectral);
        }
    }

    #[test]
    fn dephasing_never_increases_qfi(amps in amplitudes(16), p in 0.5f64..=1.0) {
        let v = complex_vector(&amps);
        prop_assume!(v.norm() > 1e-3);
        let state = QuantumState::normalized(v).unwrap();
        let h = build_hamiltonian(HamiltonianKind::Local, 4).unwrap();
        let noisy = qfi_dephased(&state, &h, &DephasingChannel::new(4, p).unwrap()).unwrap().value;
        prop_assert!(noisy <= qfi_pure(&state, &h).unwrap().value + 1e-9);
    }
}
