//! Equilibrium computation and certification.
//!
//! Classical checks are exact. Quantum checks scan a grid of pure unitary
//! deviations against the opponent's fixed mixture. Deviating to a mixture
//! can never beat the best pure deviation because the deviator's payoff is
//! linear in their own mixture, so pure deviations are enough.
//!
//! Against a fixed opponent ensemble `{s_i}` (the opponent's half-applied
//! states), every per-sample payoff is a Hermitian form `s_i^dagger H s_i`
//! whose matrix `H` depends only on the deviator's unitary. Sample means and
//! sample variances over the same keyed draws therefore follow from the
//! second and fourth moment tensors of `{s_i}`, which are accumulated once.

use std::f64::consts::PI;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ewl::{mixture_average, EwlConfig, QuantumMixture};
use crate::game::{Game, Payoff, PLAYERS};
use crate::montecarlo::{self, Moments, CHUNK};
use crate::quantum::{su2_from_angles, Matrix4, Unitary2, C64};
use crate::ratio::{self, Rational};
use crate::report::{f64_15, f64s_15, rationals_str, round15};
use crate::simplex::{self, Dist, MixedProfile};

// ----- classical -----

/// Closed interval of a player's first-strategy probability.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbabilityRange {
    #[serde(serialize_with = "crate::report::rational_str")]
    pub lower: Rational,
    #[serde(serialize_with = "crate::report::rational_str")]
    pub upper: Rational,
}

impl ProbabilityRange {
    fn point(x: Rational) -> Self {
        ProbabilityRange { lower: x.clone(), upper: x }
    }

    pub fn is_point(&self) -> bool {
        self.lower == self.upper
    }
}

/// A Nash equilibrium of the mixed extension of a 2x2 game. Degenerate games
/// can have continua of equilibria; those are reported as ranges with a
/// representative (midpoint) profile and `degenerate = true`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedEquilibrium {
    pub profile: MixedProfile,
    pub payoff: Payoff,
    pub ranges: [ProbabilityRange; PLAYERS],
    pub degenerate: bool,
}

impl MixedEquilibrium {
    pub fn is_pure(&self) -> bool {
        !self.degenerate
            && self
                .ranges
                .iter()
                .all(|r| r.is_point() && (r.lower.is_zero() || r.lower.is_one()))
    }

    /// First-strategy probability of each player in the representative.
    pub fn first_probabilities(&self) -> [Rational; PLAYERS] {
        std::array::from_fn(|i| self.profile.players[i].prob(&0))
    }
}

impl Serialize for MixedEquilibrium {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        #[derive(Serialize)]
        struct Strings(#[serde(serialize_with = "rationals_str")] Vec<Rational>);
        let mut st = s.serialize_struct("MixedEquilibrium", 5)?;
        st.serialize_field("row", &Strings(self.profile.players[0].weights().to_vec()))?;
        st.serialize_field("col", &Strings(self.profile.players[1].weights().to_vec()))?;
        st.serialize_field("payoff", &Strings(self.payoff.to_vec()))?;
        st.serialize_field("ranges", &self.ranges)?;
        st.serialize_field("degenerate", &self.degenerate)?;
        st.end()
    }
}

#[derive(Debug, Clone)]
enum Piece {
    Point(Rational),
    Open(Rational, Rational),
}

impl Piece {
    fn representative(&self) -> Rational {
        match self {
            Piece::Point(x) => x.clone(),
            Piece::Open(a, b) => (a + b) / ratio::int(2),
        }
    }

    fn is_exactly(&self, x: &Rational) -> bool {
        matches!(self, Piece::Point(y) if y == x)
    }

    fn interior(&self) -> bool {
        match self {
            Piece::Point(x) => x.is_positive() && *x < Rational::one(),
            Piece::Open(..) => true,
        }
    }

    fn range(&self) -> ProbabilityRange {
        match self {
            Piece::Point(x) => ProbabilityRange::point(x.clone()),
            Piece::Open(a, b) => ProbabilityRange {
                lower: a.clone(),
                upper: b.clone(),
            },
        }
    }
}

/// Affine function `at_zero + x (at_one - at_zero)` on `[0, 1]`.
struct Affine {
    at_zero: Rational,
    at_one: Rational,
}

impl Affine {
    fn eval(&self, x: &Rational) -> Rational {
        &self.at_zero + x * (&self.at_one - &self.at_zero)
    }

    /// `[0, 1]` split into points and open intervals on which the sign is
    /// constant.
    fn pieces(&self) -> Vec<Piece> {
        let mut breaks = vec![Rational::zero(), Rational::one()];
        let slope = &self.at_one - &self.at_zero;
        if !slope.is_zero() {
            let root = -&self.at_zero / slope;
            if root.is_positive() && root < Rational::one() {
                breaks.insert(1, root);
            }
        }
        let mut out = vec![Piece::Point(breaks[0].clone())];
        for w in breaks.windows(2) {
            out.push(Piece::Open(w[0].clone(), w[1].clone()));
            out.push(Piece::Point(w[1].clone()));
        }
        out
    }
}

/// Whether a first-strategy probability piece is a best response given the
/// sign of (first minus second strategy payoff).
fn consistent(sign: &Rational, piece: &Piece) -> bool {
    if sign.is_positive() {
        piece.is_exactly(&Rational::one())
    } else if sign.is_negative() {
        piece.is_exactly(&Rational::zero())
    } else {
        true
    }
}

/// All Nash equilibria of the mixed extension of a 2x2 game, solved exactly:
/// pure equilibria first (lexicographic), then isolated mixed ones, then
/// degenerate families.
pub fn mixed_nash_2x2(game: &Game) -> Result<Vec<MixedEquilibrium>> {
    game.require_2x2()?;
    let u = |r: usize, c: usize, i: usize| game.cell(r, c)[i].clone();
    // Player 1's advantage of s1 over s2 as a function of q = P(t1).
    let d1 = Affine {
        at_zero: u(0, 1, 0) - u(1, 1, 0),
        at_one: u(0, 0, 0) - u(1, 0, 0),
    };
    // Player 2's advantage of t1 over t2 as a function of p = P(s1).
    let d2 = Affine {
        at_zero: u(1, 0, 1) - u(1, 1, 1),
        at_one: u(0, 0, 1) - u(0, 1, 1),
    };
    let mut found = Vec::new();
    for p_piece in d2.pieces() {
        for q_piece in d1.pieces() {
            let sign1 = d1.eval(&q_piece.representative());
            let sign2 = d2.eval(&p_piece.representative());
            if !consistent(&sign1, &p_piece) || !consistent(&sign2, &q_piece) {
                continue;
            }
            let (p, q) = (p_piece.representative(), q_piece.representative());
            let profile = MixedProfile::binary(p, q)?;
            let payoff = simplex::g_mix(game, &profile)?;
            let has_interval = matches!(p_piece, Piece::Open(..)) || matches!(q_piece, Piece::Open(..));
            found.push(MixedEquilibrium {
                profile,
                payoff,
                ranges: [p_piece.range(), q_piece.range()],
                degenerate: has_interval || (p_piece.interior() != q_piece.interior()),
            });
        }
    }
    found.sort_by_key(|e| {
        let kind = if e.is_pure() { 0 } else if !e.degenerate { 1 } else { 2 };
        let [p, q] = e.first_probabilities();
        // Pure profiles in (row, col) order: probability one means index 0.
        (kind, -p, -q)
    });
    Ok(found)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Grid,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Angles {
    #[serde(serialize_with = "f64_15")]
    pub theta: f64,
    #[serde(serialize_with = "f64_15")]
    pub alpha: f64,
    #[serde(serialize_with = "f64_15")]
    pub beta: f64,
}

impl Angles {
    pub fn unitary(&self) -> Unitary2 {
        su2_from_angles(self.theta, self.alpha, self.beta)
    }
}

/// Exact figures for classical reports, as `"a/b"` strings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactFigures {
    #[serde(serialize_with = "rationals_str")]
    pub payoff: Vec<Rational>,
    #[serde(serialize_with = "rationals_str")]
    pub max_deviation_gain: Vec<Rational>,
}

/// Tolerance breakdown for grid-based quantum certification.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridAllowance {
    pub deviation_grid: usize,
    /// Largest distance from any point of the angle box to the grid.
    #[serde(serialize_with = "f64_15")]
    pub covering_radius: f64,
    /// Largest finite-difference slope between grid neighbours, per player.
    #[serde(serialize_with = "f64s_15")]
    pub lipschitz_estimate: [f64; PLAYERS],
    #[serde(serialize_with = "f64s_15")]
    pub allowance: [f64; PLAYERS],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumReport {
    pub profile: String,
    pub method: Method,
    #[serde(serialize_with = "f64s_15")]
    pub payoff: [f64; PLAYERS],
    #[serde(serialize_with = "f64s_15")]
    pub payoff_std_error: [f64; PLAYERS],
    #[serde(serialize_with = "f64s_15")]
    pub max_deviation_gain: [f64; PLAYERS],
    #[serde(serialize_with = "f64s_15")]
    pub deviation_gain_std_error: [f64; PLAYERS],
    /// The gain each player may show and still count as not deviating:
    /// three standard errors plus a 1e-9 rounding floor.
    #[serde(serialize_with = "f64s_15")]
    pub statistical_allowance: [f64; PLAYERS],
    /// Certified equilibrium tolerance: the profile is an epsilon-equilibrium
    /// against all deviations in the angle box (grid and statistical slack
    /// included).
    #[serde(serialize_with = "f64s_15")]
    pub epsilon: [f64; PLAYERS],
    pub certified: bool,
    pub best_deviation: [Option<Angles>; PLAYERS],
    pub grid: Option<GridAllowance>,
    pub exact: Option<ExactFigures>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub note: String,
}

/// Exact best-deviation gains of a mixed profile, checked against pure
/// strategies (enough, by multilinearity).
pub fn verify_classical_eq(game: &Game, m: &MixedProfile) -> Result<EquilibriumReport> {
    let current = simplex::g_mix(game, m)?;
    let mut gains: Vec<Rational> = Vec::with_capacity(PLAYERS);
    for (player, value) in current.iter().enumerate() {
        let opponent = &m.players[1 - player];
        let best = (0..game.strategy_count(player))
            .map(|s| simplex::pure_vs_mixed(game, player, s, opponent))
            .max()
            .expect("strategy lists are non-empty");
        gains.push(best - value);
    }
    let certified = gains.iter().all(|g| !g.is_positive());
    let to_f = |v: &[Rational]| [ratio::to_f64(&v[0]), ratio::to_f64(&v[1])];
    let describe = |d: &Dist<usize>| {
        d.weights().iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
    };
    Ok(EquilibriumReport {
        profile: format!(
            "classical (({}), ({}))",
            describe(&m.players[0]),
            describe(&m.players[1])
        ),
        method: Method::Exact,
        payoff: to_f(&current),
        payoff_std_error: [0.0; PLAYERS],
        max_deviation_gain: to_f(&gains),
        deviation_gain_std_error: [0.0; PLAYERS],
        statistical_allowance: [0.0; PLAYERS],
        epsilon: [0.0; PLAYERS],
        certified,
        best_deviation: [None, None],
        grid: None,
        exact: Some(ExactFigures {
            payoff: current.to_vec(),
            max_deviation_gain: gains,
        }),
        samples: None,
        seed: None,
        note: "gains are exact; pure-strategy deviations suffice by multilinearity".into(),
    })
}

/// Worst-case payoff of `player`'s mixed strategy over opponent pure
/// strategies.
pub fn security_level(game: &Game, player: usize, strategy: &Dist<usize>) -> Result<Rational> {
    if player >= PLAYERS {
        return Err(Error::InvalidPlayer(player));
    }
    if let Some(&bad) = strategy.support().iter().find(|&&s| s >= game.strategy_count(player)) {
        return Err(Error::StrategyOutOfRange {
            index: bad,
            arity: game.strategy_count(player),
        });
    }
    let opponent = 1 - player;
    Ok((0..game.strategy_count(opponent))
        .map(|t| {
            strategy
                .iter()
                .map(|(&s, w)| {
                    let p = crate::game::PureProfile::new(0, 0).with(player, s).with(opponent, t);
                    w * &game.cell(p.row(), p.col())[player]
                })
                .sum::<Rational>()
        })
        .min()
        .expect("strategy lists are non-empty"))
}

// ----- quantum -----

/// Second and fourth moments of a player's half-applied states, either
/// weighted exactly (finite mixtures) or averaged over keyed Haar draws.
#[derive(Debug, Clone)]
pub struct StateMoments {
    second: [[C64; 4]; 4],
    fourth: Vec<C64>,
    /// Zero for exact (finite) ensembles.
    samples: u64,
}

fn accumulate(second: &mut [[C64; 4]; 4], fourth: &mut [C64], s: &[C64; 4], w: f64) {
    let mut pair = [[C64::default(); 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            pair[a][b] = s[a].conj() * s[b];
            second[a][b] += pair[a][b] * w;
        }
    }
    for a in 0..4 {
        for b in 0..4 {
            let ab = pair[a][b] * w;
            let base = (a * 4 + b) * 16;
            for c in 0..4 {
                for d in 0..4 {
                    fourth[base + c * 4 + d] += ab * pair[c][d];
                }
            }
        }
    }
}

impl StateMoments {
    /// Moments of `player`'s states `(u on player's qubit) J|00>` with `u`
    /// drawn from `mixture`.
    pub fn of(config: &EwlConfig, player: usize, mixture: &QuantumMixture) -> Result<Self> {
        use rayon::prelude::*;
        mixture.validate()?;
        match mixture {
            QuantumMixture::Finite(d) => {
                let mut second = [[C64::default(); 4]; 4];
                let mut fourth = vec![C64::default(); 256];
                for (u, w) in d.iter() {
                    accumulate(&mut second, &mut fourth, &config.half_applied(player, u), *w);
                }
                Ok(StateMoments { second, fourth, samples: 0 })
            }
            QuantumMixture::Haar { seed, samples } => {
                let key = montecarlo::player_seed(*seed, player);
                let n = *samples;
                let partial: Vec<([[C64; 4]; 4], Vec<C64>)> = (0..n.div_ceil(CHUNK))
                    .into_par_iter()
                    .map(|c| {
                        let mut second = [[C64::default(); 4]; 4];
                        let mut fourth = vec![C64::default(); 256];
                        for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
                            let u = crate::quantum::haar_su2(key, i);
                            accumulate(&mut second, &mut fourth, &config.half_applied(player, &u), 1.0);
                        }
                        (second, fourth)
                    })
                    .collect();
                let mut second = [[C64::default(); 4]; 4];
                let mut fourth = vec![C64::default(); 256];
                for (s, f) in &partial {
                    for a in 0..4 {
                        for b in 0..4 {
                            second[a][b] += s[a][b];
                        }
                    }
                    for (acc, v) in fourth.iter_mut().zip(f) {
                        *acc += v;
                    }
                }
                let inv = 1.0 / n as f64;
                for row in second.iter_mut() {
                    for v in row.iter_mut() {
                        *v *= inv;
                    }
                }
                for v in fourth.iter_mut() {
                    *v *= inv;
                }
                Ok(StateMoments { second, fourth, samples: n })
            }
        }
    }

    /// Mean and standard error of `s^dagger H s` over the ensemble.
    #[allow(clippy::needless_range_loop)]
    pub fn form(&self, h: &Matrix4) -> Moments<1> {
        let mut mean = C64::default();
        for a in 0..4 {
            for b in 0..4 {
                mean += h[a][b] * self.second[a][b];
            }
        }
        let mean = mean.re;
        if self.samples == 0 {
            return Moments::exact([mean]);
        }
        let mut sq = C64::default();
        for a in 0..4 {
            for b in 0..4 {
                let hab = h[a][b];
                let base = (a * 4 + b) * 16;
                for c in 0..4 {
                    for d in 0..4 {
                        sq += hab * h[c][d] * self.fourth[base + c * 4 + d];
                    }
                }
            }
        }
        let n = self.samples as f64;
        let std_error = if self.samples < 2 {
            0.0
        } else {
            let var = ((sq.re - mean * mean) * n / (n - 1.0)).max(0.0);
            (var / n).sqrt()
        };
        Moments {
            mean: [mean],
            std_error: [std_error],
            samples: self.samples,
        }
    }
}

/// `M^dagger diag(weights) M`: the Hermitian form giving a payoff.
fn payoff_form(m: &Matrix4, weights: &[f64; 4]) -> Matrix4 {
    std::array::from_fn(|a| {
        std::array::from_fn(|b| (0..4).map(|k| m[k][a].conj() * weights[k] * m[k][b]).sum())
    })
}

/// Angle grid: `theta` over `[0, pi]` with `n` points, `alpha`, `beta` over
/// `[0, 2 pi)` with `n` points each.
#[derive(Debug, Clone, Copy)]
pub struct AngleGrid {
    pub n: usize,
}

impl AngleGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::GridTooSmall { min: 2, found: n });
        }
        Ok(AngleGrid { n })
    }

    pub fn steps(&self) -> [f64; 3] {
        let n = self.n as f64;
        [PI / (n - 1.0), 2.0 * PI / n, 2.0 * PI / n]
    }

    pub fn angles(&self, k: usize) -> Angles {
        let n = self.n;
        let [dt, da, db] = self.steps();
        Angles {
            theta: (k / (n * n)) as f64 * dt,
            alpha: ((k / n) % n) as f64 * da,
            beta: (k % n) as f64 * db,
        }
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn covering_radius(&self) -> f64 {
        0.5 * self.steps().iter().map(|s| s * s).sum::<f64>().sqrt()
    }

    /// Largest `|f(x) - f(y)| / step` over axis neighbours (angles wrap).
    pub fn lipschitz(&self, values: &[f64]) -> f64 {
        let n = self.n;
        let steps = self.steps();
        let idx = |t: usize, a: usize, b: usize| (t * n + a) * n + b;
        let mut best: f64 = 0.0;
        for t in 0..n {
            for a in 0..n {
                for b in 0..n {
                    let here = values[idx(t, a, b)];
                    if t + 1 < n {
                        best = best.max((values[idx(t + 1, a, b)] - here).abs() / steps[0]);
                    }
                    best = best.max((values[idx(t, (a + 1) % n, b)] - here).abs() / steps[1]);
                    best = best.max((values[idx(t, a, (b + 1) % n)] - here).abs() / steps[2]);
                }
            }
        }
        best
    }
}

/// Payoffs of `scored` when `mover` plays each grid unitary against the
/// other player's fixed ensemble.
#[derive(Debug, Clone)]
pub struct GridScan {
    pub grid: AngleGrid,
    pub values: Vec<Moments<1>>,
}

impl GridScan {
    pub fn means(&self) -> Vec<f64> {
        self.values.iter().map(|m| m.mean[0]).collect()
    }

    fn extreme(&self, max: bool) -> (usize, Moments<1>) {
        let mut best = 0;
        for (k, v) in self.values.iter().enumerate() {
            let better = if max {
                v.mean[0] > self.values[best].mean[0]
            } else {
                v.mean[0] < self.values[best].mean[0]
            };
            if better {
                best = k;
            }
        }
        (best, self.values[best])
    }

    pub fn argmax(&self) -> (usize, Moments<1>) {
        self.extreme(true)
    }

    pub fn argmin(&self) -> (usize, Moments<1>) {
        self.extreme(false)
    }
}

pub fn grid_scan(
    config: &EwlConfig,
    mover: usize,
    fixed: &StateMoments,
    scored: usize,
    grid: AngleGrid,
) -> GridScan {
    let weights: [f64; 4] = std::array::from_fn(|k| {
        config.game().payoff_f64(crate::ewl::CELLS[k]).expect("2x2 cell")[scored]
    });
    let values = (0..grid.len())
        .map(|k| {
            let u = grid.angles(k).unitary();
            let op = config.measurement_operator(mover, &u);
            fixed.form(&payoff_form(&op, &weights))
        })
        .collect();
    GridScan { grid, values }
}

fn seed_of(m: &QuantumMixture) -> Option<u64> {
    match m {
        QuantumMixture::Haar { seed, .. } => Some(*seed),
        QuantumMixture::Finite(_) => None,
    }
}

/// Estimates each player's best unilateral deviation gain over a
/// `deviation_grid^3` grid of pure unitaries. Sampling parameters come from
/// the mixtures themselves.
pub fn verify_quantum_eq(
    config: &EwlConfig,
    ma: &QuantumMixture,
    mb: &QuantumMixture,
    deviation_grid: usize,
) -> Result<EquilibriumReport> {
    let grid = AngleGrid::new(deviation_grid)?;
    let base = crate::ewl::g_mq(config, ma, mb)?;
    let mixtures = [ma, mb];
    let mut gains = [0.0; PLAYERS];
    let mut gain_se = [0.0; PLAYERS];
    let mut lipschitz = [0.0; PLAYERS];
    let mut best_deviation = [None, None];
    for player in 0..PLAYERS {
        let other = 1 - player;
        let fixed = StateMoments::of(config, other, mixtures[other])?;
        let scan = grid_scan(config, player, &fixed, player, grid);
        let (k, best) = scan.argmax();
        gains[player] = best.mean[0] - base.mean[player];
        gain_se[player] = best.std_error[0].hypot(base.std_error[player]);
        lipschitz[player] = grid.lipschitz(&scan.means());
        best_deviation[player] = Some(grid.angles(k));
    }
    let covering_radius = grid.covering_radius();
    let allowance = lipschitz.map(|l| l * covering_radius);
    let statistical = gain_se.map(|se| 3.0 * se + 1e-9);
    let epsilon = std::array::from_fn(|i| gains[i].max(0.0) + statistical[i] + allowance[i]);
    let certified = (0..PLAYERS).all(|i| gains[i] <= statistical[i]);
    let stochastic = matches!(ma, QuantumMixture::Haar { .. }) || matches!(mb, QuantumMixture::Haar { .. });
    Ok(EquilibriumReport {
        profile: format!("quantum ({}, {}) at gamma {}", ma.describe(), mb.describe(), round15(config.gamma())),
        method: if stochastic { Method::MonteCarlo } else { Method::Grid },
        payoff: base.mean,
        payoff_std_error: base.std_error,
        max_deviation_gain: gains,
        deviation_gain_std_error: gain_se,
        statistical_allowance: statistical,
        epsilon,
        certified,
        best_deviation,
        grid: Some(GridAllowance {
            deviation_grid,
            covering_radius,
            lipschitz_estimate: lipschitz,
            allowance,
        }),
        exact: None,
        samples: stochastic.then_some(base.samples),
        seed: seed_of(ma).or(seed_of(mb)),
        note: "deviations scanned over pure unitaries; mixed deviations cannot do better \
               because payoffs are linear in the deviator's mixture"
            .into(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantumSecurity {
    /// Minimum over the opponent grid of the player's expected payoff.
    #[serde(serialize_with = "f64_15")]
    pub level: f64,
    #[serde(serialize_with = "f64_15")]
    pub max: f64,
    /// `max - level`: zero when the opponent has no recourse.
    #[serde(serialize_with = "f64_15")]
    pub spread: f64,
    #[serde(serialize_with = "f64_15")]
    pub std_error: f64,
    pub worst_response: Angles,
    pub opponent_grid: usize,
    pub samples: u64,
}

/// Security level of `player`'s quantum mixture against a grid of opponent
/// pure unitaries.
pub fn security_level_quantum(
    config: &EwlConfig,
    player: usize,
    strategy: &QuantumMixture,
    opponent_grid: usize,
) -> Result<QuantumSecurity> {
    if player >= PLAYERS {
        return Err(Error::InvalidPlayer(player));
    }
    let grid = AngleGrid::new(opponent_grid)?;
    let own = StateMoments::of(config, player, strategy)?;
    let scan = grid_scan(config, 1 - player, &own, player, grid);
    let (k, low) = scan.argmin();
    let (_, high) = scan.argmax();
    let std_error = scan.values.iter().map(|m| m.std_error[0]).fold(0.0, f64::max);
    Ok(QuantumSecurity {
        level: low.mean[0],
        max: high.mean[0],
        spread: high.mean[0] - low.mean[0],
        std_error,
        worst_response: grid.angles(k),
        opponent_grid,
        samples: low.samples,
    })
}

/// Direct per-sample payoff of `scored` when `mover` plays `u` against the
/// other player's mixture. Slower than the moment route; used to cross-check
/// it.
pub fn deviation_payoff_direct(
    config: &EwlConfig,
    mover: usize,
    u: &Unitary2,
    fixed: &QuantumMixture,
    scored: usize,
) -> Result<Moments<1>> {
    let point = QuantumMixture::point(*u);
    let (ma, mb) = if mover == 0 { (&point, fixed) } else { (fixed, &point) };
    mixture_average(ma, mb, |ua, ub| [config.utility(scored, &config.cell_probs(ua, ub))])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::{frac, int};
    use std::f64::consts::FRAC_PI_2;

    fn pure_profiles(eqs: &[MixedEquilibrium]) -> Vec<[Rational; 2]> {
        eqs.iter().filter(|e| e.is_pure()).map(|e| e.first_probabilities()).collect()
    }

    #[test]
    fn poker_mixed_equilibrium() {
        let eqs = mixed_nash_2x2(&Game::simplified_poker()).unwrap();
        assert_eq!(eqs.len(), 1);
        assert_eq!(eqs[0].first_probabilities(), [frac(2, 3), frac(2, 3)]);
        assert_eq!(eqs[0].payoff, [frac(5, 6), frac(-5, 6)]);
        assert!(!eqs[0].degenerate);
    }

    #[test]
    fn chicken_equilibria() {
        let eqs = mixed_nash_2x2(&Game::chicken()).unwrap();
        assert_eq!(eqs.len(), 3);
        assert_eq!(pure_profiles(&eqs), vec![[int(1), int(0)], [int(0), int(1)]]);
        assert_eq!(eqs[2].first_probabilities(), [frac(1, 2), frac(1, 2)]);
        assert_eq!(eqs[2].payoff, [int(1), int(1)]);
    }

    #[test]
    fn pd_only_defection() {
        let eqs = mixed_nash_2x2(&Game::prisoners_dilemma()).unwrap();
        assert_eq!(eqs.len(), 1);
        assert_eq!(pure_profiles(&eqs), vec![[int(0), int(0)]]);
    }

    #[test]
    fn degenerate_families() {
        // Player 2 indifferent everywhere; player 1 prefers s1 against t1
        // and s2 against t2.
        let g = Game::from_table(
            "degenerate",
            vec![
                vec![[int(1), int(0)], [int(0), int(0)]],
                vec![[int(0), int(0)], [int(1), int(0)]],
            ],
        )
        .unwrap();
        let eqs = mixed_nash_2x2(&g).unwrap();
        assert!(eqs.iter().any(|e| e.degenerate));
        for e in &eqs {
            assert!(verify_classical_eq(&g, &e.profile).unwrap().certified);
        }
        // A constant game: everything is an equilibrium.
        let flat = Game::from_table("flat", vec![vec![[int(0), int(0)]; 2]; 2]).unwrap();
        let eqs = mixed_nash_2x2(&flat).unwrap();
        let full = eqs.iter().find(|e| {
            e.ranges.iter().all(|r| r.lower.is_zero() && r.upper.is_one())
        });
        assert!(full.is_some_and(|e| e.degenerate));
    }

    #[test]
    fn classical_verification() {
        let poker = Game::simplified_poker();
        let r = verify_classical_eq(&poker, &MixedProfile::binary(frac(2, 3), frac(2, 3)).unwrap()).unwrap();
        assert!(r.certified);
        assert_eq!(r.exact.unwrap().max_deviation_gain, vec![int(0), int(0)]);

        let chicken = Game::chicken();
        let r = verify_classical_eq(&chicken, &MixedProfile::binary(int(1), int(1)).unwrap()).unwrap();
        assert!(!r.certified);
        assert_eq!(r.exact.unwrap().max_deviation_gain, vec![int(1), int(1)]);

        let pd = Game::prisoners_dilemma();
        let r = verify_classical_eq(&pd, &MixedProfile::binary(int(0), int(0)).unwrap()).unwrap();
        assert!(r.certified);
        assert_eq!(r.max_deviation_gain, [0.0, 0.0]);
    }

    #[test]
    fn classical_security_levels() {
        let poker = Game::simplified_poker();
        let eq = Dist::binary(frac(2, 3)).unwrap();
        assert_eq!(security_level(&poker, 0, &eq).unwrap(), frac(5, 6));
        let pd = Game::prisoners_dilemma();
        assert_eq!(security_level(&pd, 0, &Dist::point(1)).unwrap(), int(1));
        assert!(security_level(&pd, 2, &Dist::point(1)).is_err());
        assert!(security_level(&pd, 0, &Dist::point(3)).is_err());
    }

    #[test]
    fn moment_route_matches_direct_sampling() {
        let cfg = EwlConfig::maximal(Game::prisoners_dilemma()).unwrap();
        let haar = QuantumMixture::haar(11, 3_000);
        let u = su2_from_angles(1.3, 0.4, 5.0);
        for (mover, scored) in [(0, 0), (1, 1), (1, 0), (0, 1)] {
            let other = 1 - mover;
            let moments = StateMoments::of(&cfg, other, &haar).unwrap();
            let weights: [f64; 4] = std::array::from_fn(|k| cfg.game().table_f64()[k][scored]);
            let via_moments = moments.form(&payoff_form(&cfg.measurement_operator(mover, &u), &weights));
            let direct = deviation_payoff_direct(&cfg, mover, &u, &haar, scored).unwrap();
            assert!((via_moments.mean[0] - direct.mean[0]).abs() < 1e-10);
            assert!((via_moments.std_error[0] - direct.std_error[0]).abs() < 1e-9);
        }
        // Finite ensembles are exact.
        let half = QuantumMixture::Finite(
            Dist::new(vec![Unitary2::identity(), Unitary2::flip()], vec![0.25, 0.75]).unwrap(),
        );
        let moments = StateMoments::of(&cfg, 1, &half).unwrap();
        let weights: [f64; 4] = std::array::from_fn(|k| cfg.game().table_f64()[k][0]);
        let m = moments.form(&payoff_form(&cfg.measurement_operator(0, &u), &weights));
        let direct = deviation_payoff_direct(&cfg, 0, &u, &half, 0).unwrap();
        assert!((m.mean[0] - direct.mean[0]).abs() < 1e-12);
        assert_eq!(m.std_error[0], 0.0);
    }

    #[test]
    fn identity_point_masses_invite_flip() {
        let cfg = EwlConfig::new(Game::prisoners_dilemma(), 0.0).unwrap();
        let id = QuantumMixture::point(Unitary2::identity());
        let r = verify_quantum_eq(&cfg, &id, &id, 8).unwrap();
        assert!((r.max_deviation_gain[0] - 2.0).abs() < 1e-9);
        assert!((r.max_deviation_gain[1] - 2.0).abs() < 1e-9);
        assert!(!r.certified);
        assert_eq!(r.method, Method::Grid);
        for i in 0..2 {
            assert!(r.max_deviation_gain[i] <= r.epsilon[i]);
        }
    }

    #[test]
    fn haar_profile_small_sample() {
        let cfg = EwlConfig::new(Game::prisoners_dilemma(), FRAC_PI_2).unwrap();
        let haar = QuantumMixture::haar(5, 20_000);
        let r = verify_quantum_eq(&cfg, &haar, &haar, 5).unwrap();
        assert!((r.payoff[0] - 2.25).abs() < 0.06);
        assert!(r.max_deviation_gain.iter().all(|g| *g < 0.08));
        assert_eq!(r.method, Method::MonteCarlo);
        assert_eq!(r.samples, Some(20_000));
    }

    #[test]
    fn grid_geometry() {
        let g = AngleGrid::new(3).unwrap();
        assert_eq!(g.len(), 27);
        let last = g.angles(26);
        assert!((last.theta - PI).abs() < 1e-15);
        assert!((last.alpha - 4.0 * PI / 3.0).abs() < 1e-15);
        assert!(AngleGrid::new(1).is_err());
        // A linear ramp in theta has slope 1 / step * step = 1.
        let values: Vec<f64> = (0..27).map(|k| g.angles(k).theta).collect();
        assert!((g.lipschitz(&values) - 1.0).abs() < 1e-12);
    }
}
