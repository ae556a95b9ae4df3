//! Mediated communication and correlated equilibria.
//!
//! A referee draws a profile from `rho` and privately tells each player
//! their component. In the mediated game each player picks a response map
//! from recommendation to action. Following the referee, `(C', C')`, is a
//! correlated equilibrium when no player gains by switching to another map.
//!
//! Two independent characterizations are provided: the deviation check in
//! the mediated game ([`is_correlated_eq`]) and the obedience inequalities
//! ([`aumann_check`]).

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{Game, Payoff, PureProfile, PLAYERS};
use crate::lp::{Constraint, LinearProgram, Relation};
use crate::ratio::Rational;
use crate::simplex::{self, Dist};

/// The referee's distribution over strategy profiles.
#[derive(Debug, Clone, PartialEq)]
pub struct RefereeDist {
    rho: Dist<PureProfile>,
}

impl Serialize for RefereeDist {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let profiles: Vec<[usize; 2]> = self.rho.support().iter().map(|p| p.choices).collect();
        let weights: Vec<String> = self.rho.weights().iter().map(ToString::to_string).collect();
        let mut st = s.serialize_struct("RefereeDist", 2)?;
        st.serialize_field("profiles", &profiles)?;
        st.serialize_field("weights", &weights)?;
        st.end()
    }
}

impl RefereeDist {
    pub fn new(game: &Game, rho: Dist<PureProfile>) -> Result<Self> {
        for profile in rho.support() {
            game.check_profile(*profile)?;
        }
        Ok(RefereeDist { rho })
    }

    /// Weights for every cell of `game` in row-major order.
    pub fn from_cells(game: &Game, weights: Vec<Rational>) -> Result<Self> {
        if weights.len() != game.cell_count() {
            return Err(Error::DimensionMismatch {
                expected: game.cell_count(),
                found: weights.len(),
            });
        }
        Ok(RefereeDist {
            rho: Dist::new(game.profiles().collect(), weights)?,
        })
    }

    pub fn point(game: &Game, profile: PureProfile) -> Result<Self> {
        game.check_profile(profile)?;
        Ok(RefereeDist {
            rho: Dist::point(profile),
        })
    }

    pub fn dist(&self) -> &Dist<PureProfile> {
        &self.rho
    }

    pub fn prob(&self, profile: PureProfile) -> Rational {
        self.rho.prob(&profile)
    }

    /// Row-major cell weights for `game`.
    pub fn cells(&self, game: &Game) -> Vec<Rational> {
        game.profiles().map(|p| self.prob(p)).collect()
    }
}

/// Response maps from a binary recommendation to an action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ComStrategy {
    /// Plays the first strategy whatever is recommended.
    APrime,
    /// Plays the second strategy whatever is recommended.
    BPrime,
    /// Follows the recommendation.
    CPrime,
    /// Plays the opposite of the recommendation.
    DPrime,
}

impl ComStrategy {
    pub const ALL: [ComStrategy; 4] = [
        ComStrategy::APrime,
        ComStrategy::BPrime,
        ComStrategy::CPrime,
        ComStrategy::DPrime,
    ];

    pub fn respond(self, recommendation: usize) -> usize {
        match self {
            ComStrategy::APrime => 0,
            ComStrategy::BPrime => 1,
            ComStrategy::CPrime => recommendation,
            ComStrategy::DPrime => 1 - recommendation,
        }
    }
}

/// Payoff of the mediated game for response maps `s1`, `s2`.
pub fn g_com(game: &Game, rho: &RefereeDist, s1: ComStrategy, s2: ComStrategy) -> Result<Payoff> {
    game.require_2x2()?;
    let mut out: Payoff = [Rational::zero(), Rational::zero()];
    for (profile, w) in rho.rho.iter() {
        let played = PureProfile::new(s1.respond(profile.row()), s2.respond(profile.col()));
        let u = game.cell(played.row(), played.col());
        for (acc, value) in out.iter_mut().zip(u) {
            *acc += w * value;
        }
    }
    Ok(out)
}

/// The embedding of base-game strategies into response maps.
pub fn embed_f(strategy: usize) -> Result<ComStrategy> {
    match strategy {
        0 => Ok(ComStrategy::APrime),
        1 => Ok(ComStrategy::BPrime),
        index => Err(Error::StrategyOutOfRange { index, arity: 2 }),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelatedCheck {
    pub is_equilibrium: bool,
    /// Largest payoff improvement from a unilateral switch away from `C'`;
    /// at most zero for an equilibrium.
    #[serde(serialize_with = "crate::report::rational_str")]
    pub worst_violation: Rational,
}

pub fn is_correlated_eq(game: &Game, rho: &RefereeDist) -> Result<CorrelatedCheck> {
    let follow = g_com(game, rho, ComStrategy::CPrime, ComStrategy::CPrime)?;
    let mut worst: Option<Rational> = None;
    for deviation in ComStrategy::ALL {
        if deviation == ComStrategy::CPrime {
            continue;
        }
        let as_row = g_com(game, rho, deviation, ComStrategy::CPrime)?;
        let as_col = g_com(game, rho, ComStrategy::CPrime, deviation)?;
        for gain in [&as_row[0] - &follow[0], &as_col[1] - &follow[1]] {
            if worst.as_ref().is_none_or(|w| gain > *w) {
                worst = Some(gain);
            }
        }
    }
    let worst = worst.expect("three deviations per player");
    Ok(CorrelatedCheck {
        is_equilibrium: !worst.is_positive(),
        worst_violation: worst,
    })
}

/// A violated obedience constraint: `player` told `recommended` would do
/// better by `shortfall` (in expectation, unnormalized) playing `alternative`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObedienceViolation {
    pub player: usize,
    pub recommended: usize,
    pub alternative: usize,
    #[serde(serialize_with = "crate::report::rational_str")]
    pub shortfall: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AumannCheck {
    pub satisfied: bool,
    pub violations: Vec<ObedienceViolation>,
}

/// Obedience gap `sum_b rho(a, b) [u_i(a, b) - u_i(a', b)]` for `player`
/// told `a`, considering `a'`, over cell weights in row-major order.
fn obedience_terms(game: &Game, player: usize, a: usize, alt: usize) -> Vec<(usize, Rational)> {
    let other_count = game.strategy_count(1 - player);
    (0..other_count)
        .map(|b| {
            let told = PureProfile::new(0, 0).with(player, a).with(1 - player, b);
            let swapped = told.with(player, alt);
            let k = told.row() * game.cols() + told.col();
            let diff = &game.cell(told.row(), told.col())[player]
                - &game.cell(swapped.row(), swapped.col())[player];
            (k, diff)
        })
        .collect()
}

/// Checks the obedience inequalities for every player, every recommendation
/// with positive marginal, and every alternative. Works for any finite game.
pub fn aumann_check(game: &Game, rho: &RefereeDist) -> AumannCheck {
    let cells = rho.cells(game);
    let mut violations = Vec::new();
    for player in 0..PLAYERS {
        let n = game.strategy_count(player);
        for a in 0..n {
            let terms = obedience_terms(game, player, a, a);
            let marginal: Rational = terms.iter().map(|(k, _)| cells[*k].clone()).sum();
            if !marginal.is_positive() {
                continue;
            }
            for alt in (0..n).filter(|&alt| alt != a) {
                let gap: Rational = obedience_terms(game, player, a, alt)
                    .into_iter()
                    .map(|(k, diff)| &cells[k] * diff)
                    .sum();
                if gap.is_negative() {
                    violations.push(ObedienceViolation {
                        player,
                        recommended: a,
                        alternative: alt,
                        shortfall: -gap,
                    });
                }
            }
        }
    }
    AumannCheck {
        satisfied: violations.is_empty(),
        violations,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CeOptimum {
    #[serde(serialize_with = "crate::report::rational_str")]
    pub value: Rational,
    pub rho: RefereeDist,
}

/// Per-cell objectives in row-major order.
pub fn welfare_objective(game: &Game) -> Vec<Rational> {
    game.cells().iter().map(|p| &p[0] + &p[1]).collect()
}

pub fn player_objective(game: &Game, player: usize) -> Vec<Rational> {
    game.cells().iter().map(|p| p[player].clone()).collect()
}

/// Maximizes `objective . rho` over the correlated-equilibrium polytope.
pub fn ce_optimize(game: &Game, objective: &[Rational]) -> Result<CeOptimum> {
    let cells = game.cell_count();
    if objective.len() != cells {
        return Err(Error::ObjectiveLength {
            expected: cells,
            found: objective.len(),
        });
    }
    let mut constraints = Vec::new();
    for player in 0..PLAYERS {
        let n = game.strategy_count(player);
        for a in 0..n {
            for alt in (0..n).filter(|&alt| alt != a) {
                // sum_b rho(a, b) [u(alt, b) - u(a, b)] <= 0
                let mut coefficients = vec![Rational::zero(); cells];
                for (k, diff) in obedience_terms(game, player, a, alt) {
                    coefficients[k] = -diff;
                }
                constraints.push(Constraint {
                    coefficients,
                    relation: Relation::LessEq,
                    rhs: Rational::zero(),
                });
            }
        }
    }
    constraints.push(Constraint {
        coefficients: vec![crate::ratio::one(); cells],
        relation: Relation::Equal,
        rhs: crate::ratio::one(),
    });
    let solution = LinearProgram {
        objective: objective.to_vec(),
        constraints,
    }
    .solve()?;
    Ok(CeOptimum {
        value: solution.value,
        rho: RefereeDist::from_cells(game, solution.x)?,
    })
}

/// Expected outcome when everyone follows the referee.
pub fn follow_payoff(game: &Game, rho: &RefereeDist) -> Result<Payoff> {
    let pushed = simplex::pushforward(game, rho.dist())?;
    Ok(simplex::expectation(&pushed))
}
