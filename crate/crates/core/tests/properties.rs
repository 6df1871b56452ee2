use proptest::prelude::*;
use qchan::capacity::{self, holevo_chi};
use qchan::channels::{self, kraus_amplitude_damping, kraus_depolarizing, symmetrize};
use qchan::linalg2::{eigenvalues_herm2, von_neumann_entropy};
use qchan::mixtures::minimax_capacity;
use qchan::{Channel, Complex, Ensemble, Herm2, MixedChannelPair, QubitState};
use std::f64::consts::TAU;

/// Any point of the Bloch ball, parameterized by `a`, radius fraction and phase.
fn state() -> impl Strategy<Value = QubitState> {
    (0.0..=1.0f64, 0.0..=1.0f64, 0.0..TAU).prop_map(|(a, r, phase)| {
        let max = (a * (1.0 - a)).sqrt();
        QubitState::new(a, Complex::from_polar(r * max, phase)).unwrap()
    })
}

fn pure_state() -> impl Strategy<Value = QubitState> {
    (0.0..=1.0f64, 0.0..TAU).prop_map(|(a, phase)| QubitState::pure(a, phase).unwrap())
}

fn ensemble() -> impl Strategy<Value = Ensemble> {
    ensemble_of(4)
}

fn small_ensemble() -> impl Strategy<Value = Ensemble> {
    ensemble_of(2)
}

fn ensemble_of(max_len: usize) -> impl Strategy<Value = Ensemble> {
    prop::collection::vec((0.01..1.0f64, state()), 1..=max_len).prop_map(|raw| {
        let total: f64 = raw.iter().map(|(w, _)| w).sum();
        Ensemble::new(raw.into_iter().map(|(w, s)| (w / total, s)).collect()).unwrap()
    })
}

fn qubit_channel() -> impl Strategy<Value = Channel> {
    prop_oneof![
        (0.0..=1.0f64).prop_map(|g| Channel::amplitude_damping(g).unwrap()),
        (0.0..=1.0f64).prop_map(|l| Channel::depolarizing(l).unwrap()),
        (0.0..=1.0f64)
            .prop_map(|g| Channel::general_kraus(kraus_amplitude_damping(g).unwrap()).unwrap()),
        (0.0..=1.0f64)
            .prop_map(|l| Channel::general_kraus(kraus_depolarizing(l).unwrap()).unwrap()),
    ]
}

fn closed_form_channel() -> impl Strategy<Value = Channel> {
    prop_oneof![
        (0.0..=1.0f64).prop_map(|g| Channel::amplitude_damping(g).unwrap()),
        (0.0..=1.0f64).prop_map(|l| Channel::depolarizing(l).unwrap()),
    ]
}

fn capacity_of(channel: &Channel) -> f64 {
    match *channel {
        Channel::AmplitudeDamping { gamma } => {
            capacity::capacity_amplitude_damping(gamma, capacity::DEFAULT_TOL)
                .unwrap()
                .capacity_bits
        }
        Channel::Depolarizing { lambda } => {
            capacity::capacity_depolarizing(lambda)
                .unwrap()
                .capacity_bits
        }
        Channel::GeneralKraus(_) => unreachable!(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn density_matrix_spectrum(s in state()) {
        let m = s.to_herm2();
        let (hi, lo) = eigenvalues_herm2(&m);
        prop_assert!(hi >= lo);
        prop_assert!((hi + lo - 1.0).abs() < 1e-12);
        let e = von_neumann_entropy(&m).unwrap();
        prop_assert!((0.0..=1.0).contains(&e));
    }

    #[test]
    fn pure_states_have_zero_entropy(s in pure_state()) {
        prop_assert!(s.is_pure());
        prop_assert!(s.entropy() < 1e-10);
    }

    #[test]
    fn mix_is_affine_under_splitting(e in small_ensemble(), cut in 0.0..=1.0f64) {
        let refined: Vec<_> = e
            .iter()
            .flat_map(|&(p, s)| [(p * cut, s), (p * (1.0 - cut), s)])
            .collect();
        let coarse = e.mix();
        let fine = Ensemble::new(refined).unwrap().mix();
        prop_assert!((coarse.a - fine.a).abs() < 1e-14);
        prop_assert!((coarse.b - fine.b).norm() < 1e-14);
    }

    #[test]
    fn channels_preserve_trace_and_positivity(ch in qubit_channel(), s in state()) {
        let out = ch.apply(&s).to_herm2();
        prop_assert!((out.trace() - 1.0).abs() < 1e-12);
        let (_, lo) = out.eigenvalues();
        prop_assert!(lo >= -1e-12);
    }

    #[test]
    fn kraus_and_closed_form_damping_agree(g in 0.0..=1.0f64, s in state()) {
        let direct = Channel::amplitude_damping(g).unwrap().apply(&s);
        let kraus = Channel::general_kraus(kraus_amplitude_damping(g).unwrap()).unwrap().apply(&s);
        prop_assert!((direct.a - kraus.a).abs() < 1e-12);
        prop_assert!((direct.b - kraus.b).norm() < 1e-12);
    }

    #[test]
    fn kraus_and_closed_form_depolarizing_agree(l in 0.0..=1.0f64, s in state()) {
        let direct = Channel::depolarizing(l).unwrap().apply(&s);
        let kraus = Channel::general_kraus(kraus_depolarizing(l).unwrap()).unwrap().apply(&s);
        prop_assert!((direct.a - kraus.a).abs() < 1e-12);
        prop_assert!((direct.b - kraus.b).norm() < 1e-12);
    }

    #[test]
    fn output_entropy_is_mirror_invariant(ch in closed_form_channel(), s in state()) {
        let plain = ch.apply(&s).entropy();
        let mirrored = ch.apply(&s.mirror()).entropy();
        prop_assert!((plain - mirrored).abs() < 1e-12);
    }

    #[test]
    fn chi_is_bounded_by_output_entropy(ch in qubit_channel(), e in ensemble()) {
        let chi = holevo_chi(&ch, &e).unwrap();
        let bound = ch.apply(&e.mix()).entropy();
        prop_assert!(chi >= -1e-12);
        prop_assert!(chi <= bound + 1e-12);
        prop_assert!(bound <= 1.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn symmetrizing_never_lowers_chi(g in 0.0..=1.0f64, e in ensemble()) {
        let ch = Channel::amplitude_damping(g).unwrap();
        let sym = symmetrize(&e);
        prop_assert!(holevo_chi(&ch, &sym).unwrap() >= holevo_chi(&ch, &e).unwrap() - 1e-10);
        prop_assert_eq!(symmetrize(&sym), sym);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn sup_min_is_bounded_by_worse_branch(ch1 in closed_form_channel(), ch2 in closed_form_channel(), w in 0.0..=1.0f64) {
        let pair = MixedChannelPair::new(ch1.clone(), ch2.clone(), w).unwrap();
        let r = minimax_capacity(&pair, 1e-6).unwrap();
        prop_assert!(r.capacity_bits <= capacity_of(&ch1).min(capacity_of(&ch2)) + 1e-9);
    }

    #[test]
    fn two_damping_channels_reduce_to_worse_one(g1 in 0.0..=1.0f64, g2 in 0.0..=1.0f64) {
        let pair = MixedChannelPair::new(
            Channel::amplitude_damping(g1).unwrap(),
            Channel::amplitude_damping(g2).unwrap(),
            0.5,
        ).unwrap();
        let r = minimax_capacity(&pair, 1e-6).unwrap();
        let worse = qchan::mixtures::capacity_two_amplitude_damping(g1, g2).unwrap();
        prop_assert!((r.capacity_bits - worse.capacity_bits).abs() < 1e-6);
    }

    #[test]
    fn two_depolarizing_channels_reduce_to_worse_one(l1 in 0.0..=1.0f64, l2 in 0.0..=1.0f64) {
        let pair = MixedChannelPair::new(
            Channel::depolarizing(l1).unwrap(),
            Channel::depolarizing(l2).unwrap(),
            0.5,
        ).unwrap();
        let r = minimax_capacity(&pair, 1e-6).unwrap();
        let worse = qchan::mixtures::capacity_two_depolarizing(l1, l2).unwrap();
        prop_assert!((r.capacity_bits - worse.capacity_bits).abs() < 1e-8);
    }
}

#[test]
fn closed_form_eigenvalues_match_generic_solver() {
    let mut checked = 0;
    for gi in 0..=10 {
        let gamma = gi as f64 / 10.0;
        for ai in 0..=10 {
            let a = ai as f64 / 10.0;
            let max = (a * (1.0 - a)).sqrt();
            for ri in 0..=10 {
                let s = QubitState::real(a, max * ri as f64 / 10.0).unwrap();
                let (p, m) = channels::output_eigenvalues_ad(gamma, &s).unwrap();
                // independent: trace/determinant of the applied matrix
                let out: Herm2 = Channel::amplitude_damping(gamma)
                    .unwrap()
                    .apply(&s)
                    .to_herm2();
                let det = out.m00 * out.m11 - out.m01.norm_sqr();
                let disc = (1.0 - 4.0 * det).max(0.0).sqrt();
                assert!(
                    (p - 0.5 * (1.0 + disc)).abs() < 1e-12,
                    "γ={gamma} a={a} r={ri}"
                );
                assert!(
                    (m - 0.5 * (1.0 - disc)).abs() < 1e-12,
                    "γ={gamma} a={a} r={ri}"
                );
                checked += 1;
            }
        }
    }
    assert!(checked >= 1000);
}
