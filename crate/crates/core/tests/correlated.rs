use num_traits::{Signed, Zero};
use proptest::prelude::*;
use qgame_core::mediated::{
    aumann_check, ce_optimize, embed_f, follow_payoff, g_com, is_correlated_eq, player_objective,
    welfare_objective, ComStrategy, RefereeDist,
};
use qgame_core::ratio::{frac, int};
use qgame_core::{Game, PureProfile, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_cells(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    loop {
        let w: Vec<i64> = (0..n).map(|_| rng.random_range(0..=50)).collect();
        let total: i64 = w.iter().sum();
        if total > 0 {
            return w.iter().map(|&x| frac(x, total)).collect();
        }
    }
}

/// Independent oracle: the eight obedience inequalities of a 2x2 game,
/// written out cell by cell.
fn obedient(game: &Game, rho: &[Rational]) -> bool {
    let u = |r: usize, c: usize, i: usize| game.payoff(PureProfile::new(r, c)).unwrap()[i].clone();
    let w = |r: usize, c: usize| rho[2 * r + c].clone();
    let mut ok = true;
    for told in 0..2 {
        let alt = 1 - told;
        let row_gap: Rational = (0..2).map(|c| w(told, c) * (u(told, c, 0) - u(alt, c, 0))).sum();
        let col_gap: Rational = (0..2).map(|r| w(r, told) * (u(r, told, 1) - u(r, alt, 1))).sum();
        ok &= !row_gap.is_negative() && !col_gap.is_negative();
    }
    ok
}

#[test]
fn chicken_uniform_is_correlated() {
    // Uniform play is the product of the mixed equilibrium: every obedience
    // inequality holds with equality.
    let chicken = Game::chicken();
    let uniform = vec![frac(1, 4); 4];
    assert!(obedient(&chicken, &uniform));
    let rho = RefereeDist::from_cells(&chicken, uniform).unwrap();
    assert!(aumann_check(&chicken, &rho).satisfied);
    assert!(is_correlated_eq(&chicken, &rho).unwrap().is_equilibrium);
}

#[test]
fn mediated_examples() {
    let chicken = Game::chicken();
    let rho = RefereeDist::from_cells(&chicken, vec![frac(1, 3), frac(1, 3), frac(1, 3), int(0)]).unwrap();
    assert_eq!(
        g_com(&chicken, &rho, ComStrategy::CPrime, ComStrategy::CPrime).unwrap(),
        [frac(5, 3), frac(5, 3)]
    );
    assert_eq!(follow_payoff(&chicken, &rho).unwrap(), [frac(5, 3), frac(5, 3)]);
    assert!(is_correlated_eq(&chicken, &rho).unwrap().is_equilibrium);

    let pd = Game::prisoners_dilemma();
    let cc = RefereeDist::point(&pd, PureProfile::new(0, 0)).unwrap();
    assert_eq!(g_com(&pd, &cc, ComStrategy::CPrime, ComStrategy::DPrime).unwrap(), [int(0), int(5)]);
    assert_eq!(embed_f(0).unwrap(), ComStrategy::APrime);
    assert_eq!(embed_f(1).unwrap(), ComStrategy::BPrime);
    assert_eq!(follow_payoff(&pd, &RefereeDist::point(&pd, PureProfile::new(1, 1)).unwrap()).unwrap(), [int(1), int(1)]);
}

#[test]
fn oracles_agree_on_random_referees() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (_, game) in Game::builtins() {
        for _ in 0..1000 {
            let cells = random_cells(&mut rng, 4);
            let rho = RefereeDist::from_cells(&game, cells.clone()).unwrap();
            let mediated = is_correlated_eq(&game, &rho).unwrap().is_equilibrium;
            let aumann = aumann_check(&game, &rho).satisfied;
            assert_eq!(mediated, aumann, "{} {:?}", game.name(), cells);
            assert_eq!(aumann, obedient(&game, &cells));
        }
    }
}

#[test]
fn pd_referees_off_equilibrium_fail() {
    let pd = Game::prisoners_dilemma();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..1000 {
        let cells = random_cells(&mut rng, 4);
        let rho = RefereeDist::from_cells(&pd, cells.clone()).unwrap();
        let off = cells[..3].iter().any(|w| w.is_positive());
        assert_eq!(is_correlated_eq(&pd, &rho).unwrap().is_equilibrium, !off);
    }
    let uniform = RefereeDist::from_cells(&pd, vec![frac(1, 4); 4]).unwrap();
    assert!(!aumann_check(&pd, &uniform).satisfied);
}

#[test]
fn pure_equilibria_are_correlated() {
    for (_, game) in Game::builtins() {
        for p in game.pure_nash_all() {
            let rho = RefereeDist::point(&game, p).unwrap();
            assert!(aumann_check(&game, &rho).satisfied);
        }
    }
}

/// All distributions with weights in multiples of `1 / n`.
fn lattice(n: i64) -> impl Iterator<Item = Vec<Rational>> {
    (0..=n).flat_map(move |a| {
        (0..=n - a).flat_map(move |b| {
            (0..=n - a - b).map(move |c| vec![frac(a, n), frac(b, n), frac(c, n), frac(n - a - b - c, n)])
        })
    })
}

#[test]
fn chicken_welfare_optimum_matches_lattice_search() {
    let chicken = Game::chicken();
    let objective = welfare_objective(&chicken);
    let best_on_lattice = lattice(30)
        .filter(|cells| obedient(&chicken, cells))
        .map(|cells| objective.iter().zip(&cells).map(|(o, w)| o * w).sum::<Rational>())
        .max()
        .unwrap();
    assert_eq!(best_on_lattice, frac(10, 3));
    let lp = ce_optimize(&chicken, &objective).unwrap();
    assert_eq!(lp.value, frac(10, 3));
    assert!(aumann_check(&chicken, &lp.rho).satisfied);
}

#[test]
fn poker_has_a_unique_correlated_equilibrium() {
    let poker = Game::simplified_poker();
    let product = vec![frac(4, 9), frac(2, 9), frac(2, 9), frac(1, 9)];
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..50 {
        let objective: Vec<Rational> = (0..4).map(|_| int(rng.random_range(-20..=20))).collect();
        for sign in [1, -1] {
            let o: Vec<Rational> = objective.iter().map(|x| x * int(sign)).collect();
            let best = ce_optimize(&poker, &o).unwrap();
            assert_eq!(best.rho.cells(&poker), product);
        }
    }
}

#[test]
fn objectives() {
    let pd = Game::prisoners_dilemma();
    let best = ce_optimize(&pd, &welfare_objective(&pd)).unwrap();
    assert_eq!(best.value, int(2));
    assert_eq!(best.rho.prob(PureProfile::new(1, 1)), int(1));
    let chicken = Game::chicken();
    let zero = ce_optimize(&chicken, &vec![int(0); 4]).unwrap();
    assert!(zero.value.is_zero());
    let p1 = ce_optimize(&chicken, &player_objective(&chicken, 0)).unwrap();
    assert_eq!(p1.value, int(3));
}

fn game_strategy(rows: usize, cols: usize) -> impl Strategy<Value = Game> {
    prop::collection::vec([-4i64..=4, -4i64..=4], rows * cols).prop_map(move |c| {
        let t = c
            .chunks(cols)
            .map(|row| row.iter().map(|&[a, b]| [int(a), int(b)]).collect())
            .collect();
        Game::from_table("random", t).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn optimum_is_feasible_and_dominates_pure_equilibria(
        game in game_strategy(3, 3),
        objective in prop::collection::vec(-5i64..=5, 9),
    ) {
        let objective: Vec<Rational> = objective.into_iter().map(int).collect();
        let best = ce_optimize(&game, &objective).unwrap();
        prop_assert!(aumann_check(&game, &best.rho).satisfied);
        for p in game.pure_nash_all() {
            let k = p.row() * 3 + p.col();
            prop_assert!(best.value >= objective[k]);
        }
    }

    #[test]
    fn mediated_game_extends_base_game(game in game_strategy(2, 2), w in prop::collection::vec(0i64..=9, 4)) {
        prop_assume!(w.iter().any(|&x| x > 0));
        let total: i64 = w.iter().sum();
        let rho = RefereeDist::from_cells(&game, w.iter().map(|&x| frac(x, total)).collect()).unwrap();
        for p in game.profiles().collect::<Vec<_>>() {
            let got = g_com(&game, &rho, embed_f(p.row()).unwrap(), embed_f(p.col()).unwrap()).unwrap();
            prop_assert_eq!(&got, game.payoff(p).unwrap());
        }
    }
}
