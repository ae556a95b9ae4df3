//! The reproduction suite behind `paper-check`. Each criterion recomputes
//! its figures from scratch and reports them alongside a pass flag.

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, PI};

use num_traits::{Signed, Zero};
use qgame_core::equilibria::{mixed_nash_2x2, security_level_quantum, verify_quantum_eq};
use qgame_core::ewl::{
    check_complete, check_proper, g_mq, outcome_dist_mq, EwlConfig, QuantumMixture,
};
use qgame_core::mediated::{aumann_check, embed_f, follow_payoff, g_com, is_correlated_eq, RefereeDist};
use qgame_core::quantum::{su2_from_angles, Superposition, Unitary2, C64};
use qgame_core::ratio::{frac, int, to_f64};
use qgame_core::report::round15;
use qgame_core::simplex::{g_mix, realizable, Dist, MixedProfile, REALIZABLE_TOLERANCE};
use qgame_core::{Game, PureProfile, Rational, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use serde_json::{json, Value};

use crate::commands::{profile_label, rationals};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Criterion {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub details: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PaperCheck {
    pub seed: u64,
    pub samples: u64,
    pub deviation_grid: usize,
    pub passed: bool,
    pub criteria: Vec<Criterion>,
}

#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub seed: u64,
    pub samples: u64,
    pub grid: usize,
}

pub const TITLES: [&str; 10] = [
    "classical pure equilibria",
    "mixed equilibria",
    "correlated equilibria",
    "realizability by product mixtures",
    "commutative extension diagrams",
    "Born rule",
    "Haar uniformity of outcomes",
    "quantum payoffs, deviations and security",
    "uniform PD outcome is not a correlated equilibrium",
    "determinism under a different thread pool",
];

/// Tolerance for extension diagrams and Born-rule identities.
const DIAGRAM_TOLERANCE: f64 = 1e-9;
const BORN_TOLERANCE: f64 = 1e-12;
const UNIFORMITY_TOLERANCE: f64 = 0.01;
const PAYOFF_TOLERANCE: f64 = 0.02;
const GAIN_TOLERANCE: f64 = 0.03;

/// Independent random stream for each criterion.
fn rng(seed: u64, criterion: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(criterion);
    r
}

fn done(id: u32, passed: bool, details: Value) -> Criterion {
    Criterion {
        id,
        title: TITLES[id as usize - 1],
        passed,
        details,
    }
}

/// A random distribution over `n` cells with integer weights in `0..=1000`.
pub fn random_cells(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    loop {
        let w: Vec<i64> = (0..n).map(|_| rng.random_range(0..=1000)).collect();
        let total: i64 = w.iter().sum();
        if total > 0 {
            return w.iter().map(|&x| frac(x, total)).collect();
        }
    }
}

pub fn pure_equilibria() -> Criterion {
    let expected = [
        ("pd", vec![PureProfile::new(1, 1)]),
        ("chicken", vec![PureProfile::new(1, 0), PureProfile::new(0, 1)]),
        ("poker", vec![]),
    ];
    let mut passed = true;
    let mut details = serde_json::Map::new();
    for (name, want) in expected {
        let game = Game::builtin(name).expect("builtin");
        let found = game.pure_nash_all();
        passed &= found.iter().collect::<BTreeSet<_>>() == want.iter().collect::<BTreeSet<_>>();
        let labels: Vec<String> = found.iter().map(|&p| profile_label(&game, p)).collect();
        details.insert(name.into(), labels.into());
    }
    done(1, passed, Value::Object(details))
}

pub fn mixed_equilibria() -> Result<Criterion> {
    let poker = Game::simplified_poker();
    let eqs = mixed_nash_2x2(&poker)?;
    let poker_ok = eqs.len() == 1
        && eqs[0].first_probabilities() == [frac(2, 3), frac(2, 3)]
        && eqs[0].payoff == [frac(5, 6), frac(-5, 6)];
    let chicken = Game::chicken();
    let mixed = mixed_nash_2x2(&chicken)?
        .into_iter()
        .find(|e| !e.is_pure() && !e.degenerate);
    let chicken_ok = mixed.as_ref().is_some_and(|e| e.payoff == [int(1), int(1)]);
    Ok(done(
        2,
        poker_ok && chicken_ok,
        json!({
            "poker": eqs.first().map(|e| json!({
                "first_probabilities": rationals(&e.first_probabilities()),
                "payoff": rationals(&e.payoff),
            })),
            "chicken_mixed": mixed.map(|e| json!({
                "first_probabilities": rationals(&e.first_probabilities()),
                "payoff": rationals(&e.payoff),
            })),
        }),
    ))
}

pub fn correlated_equilibria(seed: u64) -> Result<Criterion> {
    let chicken = Game::chicken();
    let rho = RefereeDist::from_cells(&chicken, vec![frac(1, 3), frac(1, 3), frac(1, 3), int(0)])?;
    let mediated = is_correlated_eq(&chicken, &rho)?;
    let obedience = aumann_check(&chicken, &rho);
    let payoff = follow_payoff(&chicken, &rho)?;
    let chicken_ok = mediated.is_equilibrium && obedience.satisfied && payoff == [frac(5, 3), frac(5, 3)];

    let pd = Game::prisoners_dilemma();
    let mut r = rng(seed, 3);
    let mut accepted = 0;
    let mut drawn = 0;
    while drawn < 1000 {
        let cells = random_cells(&mut r, 4);
        if cells[..3].iter().all(Zero::is_zero) {
            continue;
        }
        drawn += 1;
        let rho = RefereeDist::from_cells(&pd, cells)?;
        if is_correlated_eq(&pd, &rho)?.is_equilibrium || aumann_check(&pd, &rho).satisfied {
            accepted += 1;
        }
    }
    let point = RefereeDist::point(&pd, PureProfile::new(1, 1))?;
    let point_ok = is_correlated_eq(&pd, &point)?.is_equilibrium;
    Ok(done(
        3,
        chicken_ok && accepted == 0 && point_ok,
        json!({
            "chicken_follow_payoff": rationals(&payoff),
            "chicken_mediated_check": mediated.is_equilibrium,
            "chicken_obedience_check": obedience.satisfied,
            "pd_random_rho": drawn,
            "pd_random_accepted": accepted,
            "pd_point_mass_accepted": point_ok,
        }),
    ))
}

fn two_cell_target(a: PureProfile, b: PureProfile) -> Dist<PureProfile> {
    Dist::new(vec![a, b], vec![frac(1, 2), frac(1, 2)]).expect("valid target")
}

pub fn realizability(seed: u64) -> Result<Criterion> {
    let pd = Game::prisoners_dilemma();
    let diagonal = realizable(&pd, &two_cell_target(PureProfile::new(0, 0), PureProfile::new(1, 1)), REALIZABLE_TOLERANCE)?;
    let anti = realizable(&pd, &two_cell_target(PureProfile::new(0, 1), PureProfile::new(1, 0)), REALIZABLE_TOLERANCE)?;
    let mut r = rng(seed, 4);
    let mut recovered = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (p, q): (f64, f64) = (r.random(), r.random());
        // Witness convention: p = P(s1), q = P(t2).
        let cells = vec![p * (1.0 - q), p * q, (1.0 - p) * (1.0 - q), (1.0 - p) * q];
        let target = Dist::new(qgame_core::ewl::CELLS.to_vec(), cells)?;
        let found = realizable(&pd, &target, REALIZABLE_TOLERANCE)?;
        if let (true, Some(w)) = (found.realizable, found.witness) {
            let err = (w.p - p).abs().max((w.q - q).abs());
            worst = worst.max(err);
            if err <= 1e-6 {
                recovered += 1;
            }
        }
    }
    Ok(done(
        4,
        !diagonal.realizable && !anti.realizable && recovered == 100,
        json!({
            "diagonal_distance": round15(diagonal.distance),
            "anti_diagonal_distance": round15(anti.distance),
            "random_products_recovered": recovered,
            "worst_parameter_error": round15(worst),
        }),
    ))
}

pub fn extension_diagrams(seed: u64) -> Result<Criterion> {
    let mut r = rng(seed, 5);
    let mut mix_ok = true;
    let mut com_ok = true;
    let mut proper_worst: f64 = 0.0;
    let mut complete_worst: f64 = 0.0;
    let mut quantum_ok = true;
    for (_, game) in Game::builtins() {
        for profile in game.profiles().collect::<Vec<_>>() {
            let want = game.payoff(profile)?;
            mix_ok &= g_mix(&game, &MixedProfile::<Rational>::pure(&game, profile)?)? == *want;
        }
        for _ in 0..50 {
            let rho = RefereeDist::from_cells(&game, random_cells(&mut r, 4))?;
            for profile in game.profiles().collect::<Vec<_>>() {
                let got = g_com(&game, &rho, embed_f(profile.row())?, embed_f(profile.col())?)?;
                com_ok &= got == *game.payoff(profile)?;
            }
        }
        for k in 0..=10 {
            let config = EwlConfig::new(game.clone(), k as f64 * FRAC_PI_2 / 10.0)?;
            let check = check_proper(&config);
            quantum_ok &= check.holds;
            proper_worst = proper_worst.max(check.max_deviation);
        }
        for gamma in [0.0, FRAC_PI_2] {
            // 19 steps: a 20 x 20 grid of (p, q).
            let check = check_complete(&EwlConfig::new(game.clone(), gamma)?, 19)?;
            quantum_ok &= check.holds;
            complete_worst = complete_worst.max(check.max_deviation);
        }
    }
    let quantum_ok = quantum_ok && proper_worst <= DIAGRAM_TOLERANCE && complete_worst <= DIAGRAM_TOLERANCE;
    Ok(done(
        5,
        mix_ok && com_ok && quantum_ok,
        json!({
            "mixed_extension_exact": mix_ok,
            "mediated_extension_exact": com_ok,
            "ewl_proper_max_deviation": round15(proper_worst),
            "ewl_complete_max_deviation": round15(complete_worst),
        }),
    ))
}

fn random_amplitude(r: &mut ChaCha8Rng) -> C64 {
    C64::new(r.sample(StandardNormal), r.sample(StandardNormal))
}

pub fn born_rule(seed: u64) -> Result<Criterion> {
    let mut r = rng(seed, 6);
    let mut worst_norm: f64 = 0.0;
    let mut worst_scale: f64 = 0.0;
    let mut worst_formula: f64 = 0.0;
    for _ in 0..1000 {
        let dim = r.random_range(2..=8);
        let amps: Vec<C64> = (0..dim).map(|_| random_amplitude(&mut r)).collect();
        let s = Superposition::new((0..dim).collect(), amps)?;
        let m = s.measure();
        worst_norm = worst_norm.max((m.weights().iter().sum::<f64>() - 1.0).abs());
        let factor = C64::from_polar(10f64.powf(r.random_range(-3.0..3.0)), r.random_range(0.0..2.0 * PI));
        let scaled = s.scaled(factor)?.measure();
        for (a, b) in m.weights().iter().zip(scaled.weights()) {
            worst_scale = worst_scale.max((a - b).abs());
        }

        let (alpha, beta) = (random_amplitude(&mut r), random_amplitude(&mut r));
        let pair = Superposition::new(vec![0, 1], vec![alpha, beta])?.measure();
        let formula = alpha.norm_sqr() / (alpha.norm_sqr() + beta.norm_sqr());
        worst_formula = worst_formula.max((pair.prob(&0) - formula).abs());
    }
    Ok(done(
        6,
        worst_norm <= BORN_TOLERANCE && worst_scale <= BORN_TOLERANCE && worst_formula <= BORN_TOLERANCE,
        json!({
            "states": 1000,
            "max_normalization_error": round15(worst_norm),
            "max_scale_error": round15(worst_scale),
            "max_two_term_formula_error": round15(worst_formula),
        }),
    ))
}

/// Twenty fixed unitaries: the two classical embeddings and eighteen
/// pseudo-random angle triples.
pub fn fixed_unitaries(seed: u64) -> Vec<Unitary2> {
    let mut r = rng(seed, 7);
    let mut out = vec![Unitary2::identity(), Unitary2::flip()];
    while out.len() < 20 {
        out.push(su2_from_angles(
            r.random_range(0.0..PI),
            r.random_range(0.0..2.0 * PI),
            r.random_range(0.0..2.0 * PI),
        ));
    }
    out
}

fn max_cell_deviation(weights: &[f64]) -> f64 {
    weights.iter().map(|w| (w - 0.25).abs()).fold(0.0, f64::max)
}

pub fn haar_uniformity(s: Settings) -> Result<Criterion> {
    let config = EwlConfig::maximal(Game::prisoners_dilemma())?;
    let haar = QuantumMixture::haar(s.seed, s.samples);
    let both = max_cell_deviation(outcome_dist_mq(&config, &haar, &haar)?.dist.weights());
    let mut fixed_worst: f64 = 0.0;
    for u in fixed_unitaries(s.seed) {
        let point = QuantumMixture::point(u);
        for (ma, mb) in [(&haar, &point), (&point, &haar)] {
            fixed_worst = fixed_worst.max(max_cell_deviation(outcome_dist_mq(&config, ma, mb)?.dist.weights()));
        }
    }
    Ok(done(
        7,
        both <= UNIFORMITY_TOLERANCE && fixed_worst <= UNIFORMITY_TOLERANCE,
        json!({
            "haar_haar_max_cell_deviation": round15(both),
            "haar_fixed_max_cell_deviation": round15(fixed_worst),
            "fixed_unitaries": 20,
        }),
    ))
}

pub fn quantum_claims(s: Settings) -> Result<Criterion> {
    let haar = QuantumMixture::haar(s.seed, s.samples);

    let pd = Game::prisoners_dilemma();
    let classical_pd = mixed_nash_2x2(&pd)?[0].payoff.clone();
    let report = verify_quantum_eq(&EwlConfig::maximal(pd)?, &haar, &haar, s.grid)?;
    let payoff_ok = report.payoff.iter().all(|p| (p - 2.25).abs() <= PAYOFF_TOLERANCE);
    let gain_ok = report.max_deviation_gain.iter().all(|g| *g <= GAIN_TOLERANCE);
    let beats_classical = (0..2).all(|i| report.payoff[i] > to_f64(&classical_pd[i]));

    let poker = Game::simplified_poker();
    let classical_value = mixed_nash_2x2(&poker)?[0].payoff[0].clone();
    let security = security_level_quantum(&EwlConfig::maximal(poker)?, 0, &haar, s.grid)?;
    let level_ok = (security.level - 15.0 / 16.0).abs() <= PAYOFF_TOLERANCE;
    let spread_ok = security.spread <= GAIN_TOLERANCE;
    let beats_value = security.level > to_f64(&classical_value);

    Ok(done(
        8,
        payoff_ok && gain_ok && beats_classical && level_ok && spread_ok && beats_value,
        json!({
            "pd_haar_payoff": report.payoff.map(round15),
            "pd_haar_payoff_std_error": report.payoff_std_error.map(round15),
            "pd_max_deviation_gain": report.max_deviation_gain.map(round15),
            "pd_certified": report.certified,
            "pd_classical_equilibrium_payoff": rationals(&classical_pd),
            "poker_haar_security_level": round15(security.level),
            "poker_security_spread": round15(security.spread),
            "poker_classical_value": classical_value.to_string(),
        }),
    ))
}

pub fn uniform_not_correlated() -> Result<Criterion> {
    let pd = Game::prisoners_dilemma();
    let uniform = RefereeDist::from_cells(&pd, vec![frac(1, 4); 4])?;
    let check = aumann_check(&pd, &uniform);
    let worst = check
        .violations
        .iter()
        .map(|v| v.shortfall.clone())
        .max()
        .unwrap_or_else(Rational::zero);
    Ok(done(
        9,
        !check.satisfied && worst.is_positive(),
        json!({
            "obedience_satisfied": check.satisfied,
            "violations": check.violations.len(),
            "largest_shortfall": worst.to_string(),
        }),
    ))
}

/// Recomputes a sampled payoff on a single-thread pool and compares bits.
pub fn determinism(s: Settings) -> Result<Criterion> {
    let config = EwlConfig::maximal(Game::prisoners_dilemma())?;
    let haar = QuantumMixture::haar(s.seed, s.samples);
    let here = g_mq(&config, &haar, &haar)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .expect("thread pool");
    let there = pool.install(|| g_mq(&config, &haar, &haar))?;
    let identical = here.mean.map(f64::to_bits) == there.mean.map(f64::to_bits)
        && here.std_error.map(f64::to_bits) == there.std_error.map(f64::to_bits);
    Ok(done(10, identical, json!({ "bit_identical": identical })))
}

pub fn run(s: Settings) -> Result<PaperCheck> {
    let criteria = vec![
        pure_equilibria(),
        mixed_equilibria()?,
        correlated_equilibria(s.seed)?,
        realizability(s.seed)?,
        extension_diagrams(s.seed)?,
        born_rule(s.seed)?,
        haar_uniformity(s)?,
        quantum_claims(s)?,
        uniform_not_correlated()?,
        determinism(s)?,
    ];
    Ok(PaperCheck {
        seed: s.seed,
        samples: s.samples,
        deviation_grid: s.grid,
        passed: criteria.iter().all(|c| c.passed),
        criteria,
    })
}
