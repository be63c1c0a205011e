use metrokit::linalg::{c, CVector};
use metrokit::operators::{build_hamiltonian, HamiltonianKind};
use metrokit::states::{
    dicke_state, ghz_state, nn_balanced_optimal, pg_variance_closed_form, pretty_good_state, product_plus, variance, DickeBasis,
    QuantumState,
};
use metrokit::su2::{collective_spin_generators, generators_for_kind, Axis};
use num_complex::Complex64;
use proptest::prelude::*;

/// `⟨ψ|H²|ψ⟩ − ⟨ψ|H|ψ⟩²` from a plain row-by-row matrix product.
fn brute_variance(psi: &CVector, kind: HamiltonianKind, n: usize) -> f64 {
    let h = build_hamiltonian(kind, n).unwrap();
    let m = h.matrix();
    let dim = psi.len();
    let mut hpsi = vec![Complex64::new(0.0, 0.0); dim];
    for (r, out) in hpsi.iter_mut().enumerate() {
        for col in 0..dim {
            *out += m[(r, col)] * psi[col];
        }
    }
    let mean: f64 = (0..dim).map(|i| (psi[i].conj() * hpsi[i]).re).sum();
    let square: f64 = hpsi.iter().map(|z| z.norm_sqr()).sum();
    square - mean * mean
}

#[test]
fn pretty_good_variance_matches_ladder_formula() {
    for (kind, n) in [(HamiltonianKind::NearestNeighbor, 5), (HamiltonianKind::NearestNeighbor, 6), (HamiltonianKind::NonLocal, 4)] {
        let gens = generators_for_kind(kind, n).unwrap();
        let top = (2.0 * gens.j_max()).round() as usize;
        for k in 0..=top {
            let state = pretty_good_state(&gens, Axis::Three, Some(k)).unwrap();
            let expected = pg_variance_closed_form(gens.j_max(), k, gens.structure_constant()).unwrap();
            let actual = brute_variance(state.vector().unwrap(), kind, n);
            assert!((actual - expected).abs() < 1e-9, "{kind} n={n} k={k}: {actual} vs {expected}");
        }
    }
}

#[test]
fn collective_spin_pretty_good_variance() {
    // Raising the S_x ground state of Σσz/2 halfway: j = N/2, k = j gives (j(j+1))/2.
    let gens = collective_spin_generators(4).unwrap();
    let state = pretty_good_state(&gens, Axis::Two, Some(2)).unwrap();
    assert!((brute_variance(state.vector().unwrap(), HamiltonianKind::Local, 4) - 3.0).abs() < 1e-9);
}

#[test]
fn x_basis_dicke_variance_for_five_qubits() {
    let h = build_hamiltonian(HamiltonianKind::Local, 5).unwrap();
    let state = dicke_state(5, 2, DickeBasis::X).unwrap();
    assert!((variance(&state, &h).unwrap() - 17.0 / 4.0).abs() < 1e-12);
}

#[test]
fn reference_state_variances() {
    for n in 2..=6 {
        let local = build_hamiltonian(HamiltonianKind::Local, n).unwrap();
        let nn = build_hamiltonian(HamiltonianKind::NearestNeighbor, n).unwrap();
        let nf = n as f64;
        assert!((variance(&ghz_state(n).unwrap(), &local).unwrap() - nf * nf / 4.0).abs() < 1e-12);
        assert!((variance(&product_plus(n), &local).unwrap() - nf / 4.0).abs() < 1e-12);
        // Spread of the Ising spectrum is 2(N − 1), so the optimum is (N − 1)².
        let balanced = nn_balanced_optimal(n, 0.7).unwrap();
        assert!((variance(&balanced, &nn).unwrap() - (nf - 1.0).powi(2)).abs() < 1e-12);
    }
}

#[test]
fn mixed_and_pure_variances_agree() {
    let h = build_hamiltonian(HamiltonianKind::NearestNeighbor, 4).unwrap();
    let pure = nn_balanced_optimal(4, 0.2).unwrap();
    let mixed = QuantumState::mixed(pure.density_matrix()).unwrap();
    assert!((variance(&pure, &h).unwrap() - variance(&mixed, &h).unwrap()).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn variance_ignores_global_phase(amps in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16), phase in 0.0f64..6.3) {
        let v = CVector::from_iterator(16, amps.iter().map(|&(re, im)| c(re, im)));
        prop_assume!(v.norm() > 1e-3);
        let h = build_hamiltonian(HamiltonianKind::NonLocal, 4).unwrap();
        let a = QuantumState::normalized(v.clone()).unwrap();
        let b = QuantumState::normalized(v * Complex64::from_polar(1.0, phase)).unwrap();
        prop_assert!((variance(&a, &h).unwrap() - variance(&b, &h).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn variance_is_bounded_by_spectral_spread(amps in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16)) {
        let v = CVector::from_iterator(16, amps.iter().map(|&(re, im)| c(re, im)));
        prop_assume!(v.norm() > 1e-3);
        let h = build_hamiltonian(HamiltonianKind::NearestNeighbor, 4).unwrap();
        let value = variance(&QuantumState::normalized(v).unwrap(), &h).unwrap();
        prop_assert!((0.0..=9.0 + 1e-12).contains(&value));
    }
}
