use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64 as C;
use proptest::prelude::*;
use qgame_core::equilibria::{security_level_quantum, verify_quantum_eq, Method};
use qgame_core::ewl::{
    embed_mixed_quantum, embed_pure_quantum, g_mq, g_q, outcome_dist_mq, protocol_state, EwlConfig,
    QuantumMixture,
};
use qgame_core::quantum::{apply2, basis_state, haar_su2, su2_from_angles, tensor, Superposition, Unitary2};
use qgame_core::{Game, PureProfile};

type M4 = [[C; 4]; 4];

fn kron(a: &Unitary2, b: &Unitary2) -> M4 {
    std::array::from_fn(|r| std::array::from_fn(|c| a.get(r / 2, c / 2) * b.get(r % 2, c % 2)))
}

fn mul(a: &M4, b: &M4) -> M4 {
    std::array::from_fn(|r| std::array::from_fn(|c| (0..4).map(|k| a[r][k] * b[k][c]).sum()))
}

/// `exp(i gamma / 2 * D x D)` by its power series, `D = [[0, 1], [-1, 0]]`.
fn oracle_entangler(gamma: f64) -> M4 {
    let d = Unitary2::new([[C::new(0.0, 0.0), C::new(1.0, 0.0)], [C::new(-1.0, 0.0), C::new(0.0, 0.0)]]).unwrap();
    let generator = kron(&d, &d).map(|row| row.map(|x| x * C::new(0.0, gamma / 2.0)));
    let mut term: M4 = std::array::from_fn(|r| std::array::from_fn(|c| C::new((r == c) as u8 as f64, 0.0)));
    let mut sum = term;
    for n in 1..40 {
        term = mul(&term, &generator).map(|row| row.map(|x| x / n as f64));
        for r in 0..4 {
            for c in 0..4 {
                sum[r][c] += term[r][c];
            }
        }
    }
    sum
}

fn oracle_probs(gamma: f64, a: &Unitary2, b: &Unitary2) -> [f64; 4] {
    let j = oracle_entangler(gamma);
    let j_dag: M4 = std::array::from_fn(|r| std::array::from_fn(|c| j[c][r].conj()));
    let m = mul(&j_dag, &mul(&kron(a, b), &j));
    std::array::from_fn(|k| m[k][0].norm_sqr())
}

fn angles() -> impl Strategy<Value = Unitary2> {
    (0.0..PI, 0.0..2.0 * PI, 0.0..2.0 * PI).prop_map(|(t, a, b)| su2_from_angles(t, a, b))
}

fn pd_max() -> EwlConfig {
    EwlConfig::maximal(Game::prisoners_dilemma()).unwrap()
}

#[test]
fn normalization_and_measurement_examples() {
    let s = Superposition::new(vec![0, 1], vec![C::new(3.0, 0.0), C::new(0.0, 4.0)]).unwrap();
    let n = s.normalize();
    assert!((n.amplitudes()[0] - C::new(0.6, 0.0)).norm() < 1e-15);
    assert!((n.amplitudes()[1] - C::new(0.0, 0.8)).norm() < 1e-15);
    let m = s.measure();
    assert!((m.prob(&0) - 9.0 / 25.0).abs() < 1e-15);
    assert!((m.prob(&1) - 16.0 / 25.0).abs() < 1e-15);
    let even = Superposition::new(vec!['x', 'y'], vec![C::new(1.0, 0.0); 2]).unwrap().measure();
    assert!((even.prob(&'x') - 0.5).abs() < 1e-15);
    assert!(Superposition::new(vec![0], vec![C::new(0.0, 0.0)]).is_err());
}

#[test]
fn tensor_examples() {
    let zero = Superposition::new(vec![0usize, 1], vec![C::new(1.0, 0.0), C::new(0.0, 0.0)]).unwrap();
    let plus = Superposition::new(vec![0usize, 1], vec![C::new(1.0, 0.0), C::new(1.0, 0.0)]).unwrap();
    let one = Superposition::new(vec![0usize, 1], vec![C::new(0.0, 0.0), C::new(1.0, 0.0)]).unwrap();
    assert!(tensor(&zero, &zero).projectively_eq(&basis_state(0, 0), 1e-12));
    let t = tensor(&plus, &one).measure();
    assert!((t.prob(&(0, 1)) - 0.5).abs() < 1e-15 && (t.prob(&(1, 1)) - 0.5).abs() < 1e-15);
}

#[test]
fn flip_acts_on_the_first_qubit() {
    let s = apply2(&su2_from_angles(PI, 0.0, 0.0), &Unitary2::identity(), &basis_state(0, 0)).unwrap();
    assert!(s.projectively_eq(&basis_state(1, 0), 1e-12));
    let same = apply2(&Unitary2::identity(), &Unitary2::identity(), &basis_state(1, 1)).unwrap();
    assert!(same.projectively_eq(&basis_state(1, 1), 1e-15));
}

#[test]
fn protocol_examples() {
    let config = pd_max();
    let flip = su2_from_angles(PI, 0.0, 0.0);
    let state = protocol_state(&config, &flip, &Unitary2::identity()).measure();
    assert!((state.prob(&PureProfile::new(1, 0)) - 1.0).abs() < 1e-12);
    assert_eq!(g_q(&config, &Unitary2::identity(), &Unitary2::identity()), [3.0, 3.0]);

    let poker = EwlConfig::maximal(Game::simplified_poker()).unwrap();
    let pay = g_q(&poker, &Unitary2::identity(), &flip);
    assert!(pay[0].abs() < 1e-12 && pay[1].abs() < 1e-12);

    // Separable start: amplitudes are products of cosines and sines.
    let classical = EwlConfig::new(Game::prisoners_dilemma(), 0.0).unwrap();
    let (t, f) = (0.7, 2.1);
    let probs = classical.cell_probs(&su2_from_angles(t, 0.0, 0.0), &su2_from_angles(f, 0.0, 0.0));
    let (ct, st, cf, sf) = ((t / 2.0).cos(), (t / 2.0).sin(), (f / 2.0).cos(), (f / 2.0).sin());
    let want = [ct * cf, ct * sf, st * cf, st * sf].map(|x: f64| x * x);
    for k in 0..4 {
        assert!((probs[k] - want[k]).abs() < 1e-12);
    }

    // Q = diag(i, -i) on both sides keeps (s1, t1) at maximal entanglement.
    let q = su2_from_angles(0.0, FRAC_PI_2, 0.0);
    let pay = g_q(&config, &q, &q);
    assert!((pay[0] - 3.0).abs() < 1e-12 && (pay[1] - 3.0).abs() < 1e-12);
}

#[test]
fn haar_first_entry_has_mean_one_half() {
    let n = 100_000u64;
    let mean = (0..n).map(|i| haar_su2(3, i).get(0, 0).norm_sqr()).sum::<f64>() / n as f64;
    assert!((mean - 0.5).abs() < 0.01, "{mean}");
    assert_eq!(haar_su2(3, 17), haar_su2(3, 17));
}

fn ks_statistic(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

#[test]
fn haar_samples_are_left_invariant() {
    // Two-sample Kolmogorov-Smirnov at the 1% level on |u00|^2 and on the
    // phase of u00, comparing U against V U for a fixed V.
    let n = 20_000u64;
    let v = su2_from_angles(1.1, 0.3, 2.0);
    let plain: Vec<Unitary2> = (0..n).map(|i| haar_su2(11, i)).collect();
    let moved: Vec<Unitary2> = (0..n).map(|i| v.mul(&haar_su2(12, i))).collect();
    let critical = 1.628 * ((2 * n) as f64 / (n * n) as f64).sqrt();
    let features: [fn(&Unitary2) -> f64; 2] = [|u| u.get(0, 0).norm_sqr(), |u| u.get(0, 0).arg()];
    for f in features {
        let d = ks_statistic(plain.iter().map(f).collect(), moved.iter().map(f).collect());
        assert!(d < critical, "KS statistic {d} >= {critical}");
    }
    // |u00|^2 of a Haar SU(2) element is uniform on [0, 1].
    let mut u: Vec<f64> = plain.iter().map(|u| u.get(0, 0).norm_sqr()).collect();
    u.sort_by(f64::total_cmp);
    let d = u
        .iter()
        .enumerate()
        .map(|(k, x)| (x - k as f64 / n as f64).abs().max((x - (k + 1) as f64 / n as f64).abs()))
        .fold(0.0, f64::max);
    assert!(d < 1.628 / (n as f64).sqrt());
}

#[test]
fn haar_outcomes_are_uniform() {
    let config = pd_max();
    let haar = QuantumMixture::haar(42, 100_000);
    let both = outcome_dist_mq(&config, &haar, &haar).unwrap();
    assert!(both.dist.weights().iter().all(|w| (w - 0.25).abs() < 0.01));
    let fixed = QuantumMixture::point(su2_from_angles(0.4, 1.0, 5.0));
    let one_sided = outcome_dist_mq(&config, &fixed, &haar).unwrap();
    assert!(one_sided.dist.weights().iter().all(|w| (w - 0.25).abs() < 0.01));
    let pay = g_mq(&config, &haar, &haar).unwrap();
    assert!(pay.mean.iter().all(|p| (p - 2.25).abs() < 0.02));
}

#[test]
fn pure_defection_against_identity_gains_two() {
    let config = EwlConfig::new(Game::prisoners_dilemma(), 0.0).unwrap();
    let id = QuantumMixture::point(Unitary2::identity());
    let r = verify_quantum_eq(&config, &id, &id, 8).unwrap();
    assert!(!r.certified);
    assert!(r.max_deviation_gain.iter().all(|g| (g - 2.0).abs() < 1e-9));
}

#[test]
fn haar_is_an_equilibrium_and_a_security_strategy() {
    let haar = QuantumMixture::haar(42, 100_000);
    let r = verify_quantum_eq(&pd_max(), &haar, &haar, 8).unwrap();
    assert_eq!(r.method, Method::MonteCarlo);
    assert!(r.max_deviation_gain.iter().all(|g| *g <= 0.03));
    assert!(r.payoff.iter().all(|p| (p - 2.25).abs() <= 0.02 && *p > 1.0));
    for i in 0..2 {
        assert!(r.max_deviation_gain[i] <= r.epsilon[i]);
    }

    let poker = EwlConfig::maximal(Game::simplified_poker()).unwrap();
    let r = verify_quantum_eq(&poker, &haar, &haar, 8).unwrap();
    assert!(r.max_deviation_gain.iter().all(|g| *g <= 0.03));
    assert!((r.payoff[0] - 15.0 / 16.0).abs() <= 0.02 && (r.payoff[1] + 15.0 / 16.0).abs() <= 0.02);

    let s = security_level_quantum(&poker, 0, &haar, 8).unwrap();
    assert!((s.level - 15.0 / 16.0).abs() <= 0.02);
    assert!(s.spread <= 0.03);
    assert!(s.level > 5.0 / 6.0);
}

#[test]
fn verification_is_thread_count_independent() {
    let haar = QuantumMixture::haar(5, 30_000);
    let a = verify_quantum_eq(&pd_max(), &haar, &haar, 4).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let b = pool.install(|| verify_quantum_eq(&pd_max(), &haar, &haar, 4).unwrap());
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn classical_embeddings_commute_for_many_gammas() {
    for (_, game) in Game::builtins() {
        for k in 0..=10 {
            let config = EwlConfig::new(game.clone(), k as f64 * FRAC_PI_2 / 10.0).unwrap();
            for p in game.profiles().collect::<Vec<_>>() {
                let got = g_q(&config, &embed_pure_quantum(p.row()), &embed_pure_quantum(p.col()));
                let want = game.payoff_f64(p).unwrap();
                assert!((got[0] - want[0]).abs() < 1e-9 && (got[1] - want[1]).abs() < 1e-9);
            }
        }
    }
    let m = embed_mixed_quantum(0.3).apply([C::new(1.0, 0.0), C::new(0.0, 0.0)]);
    assert!((m[0].norm_sqr() - 0.3).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn cell_probabilities_match_series_oracle(gamma in 0.0..=FRAC_PI_2, a in angles(), b in angles()) {
        let config = EwlConfig::new(Game::prisoners_dilemma(), gamma).unwrap();
        let got = config.cell_probs(&a, &b);
        let want = oracle_probs(gamma, &a, &b);
        for k in 0..4 {
            prop_assert!((got[k] - want[k]).abs() < 1e-12, "{:?} vs {:?}", got, want);
        }
    }

    #[test]
    fn measurement_ignores_scale(
        re in prop::collection::vec(-3.0f64..3.0, 4),
        im in prop::collection::vec(-3.0f64..3.0, 4),
        r in 0.01f64..100.0,
        phi in 0.0..2.0 * PI,
    ) {
        let amps: Vec<C> = re.iter().zip(&im).map(|(&a, &b)| C::new(a, b)).collect();
        prop_assume!(amps.iter().map(|a| a.norm_sqr()).sum::<f64>() > 1e-6);
        let s = Superposition::new(vec![0, 1, 2, 3], amps).unwrap();
        let scaled = s.scaled(C::from_polar(r, phi)).unwrap();
        for (x, y) in s.measure().weights().iter().zip(scaled.measure().weights()) {
            prop_assert!((x - y).abs() < 1e-12);
        }
        prop_assert!((s.measure().weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn local_unitaries_preserve_inner_products(u in angles(), v in angles(), seed in 0u64..1000) {
        let random_state = |k: u64| {
            let a = haar_su2(seed, k);
            Superposition::new(
                vec![(0usize, 0usize), (0, 1), (1, 0), (1, 1)],
                vec![a.get(0, 0), a.get(0, 1), a.get(1, 0) * 0.5, a.get(1, 1) * 2.0],
            )
            .unwrap()
        };
        let (s, t) = (random_state(0), random_state(1));
        let before = s.inner(&t);
        let after = apply2(&u, &v, &s).unwrap().inner(&apply2(&u, &v, &t).unwrap());
        prop_assert!((before - after).norm() < 1e-12);
    }

    #[test]
    fn global_phase_does_not_change_payoffs(u in angles(), v in angles(), phi in 0.0..2.0 * PI) {
        let config = pd_max();
        let base = g_q(&config, &u, &v);
        let rotated = g_q(&config, &u.with_phase(phi), &v);
        prop_assert!((base[0] - rotated[0]).abs() < 1e-12 && (base[1] - rotated[1]).abs() < 1e-12);
    }
}
