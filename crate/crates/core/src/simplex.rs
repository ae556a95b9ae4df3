//! Probability distributions over finite sets and the mixed extension of a
//! game.
//!
//! A mixed profile is evaluated as a composite: take the product of the two
//! players' distributions, push it forward along the payoff function to a
//! distribution over outcome vectors, then take the expectation. Each stage
//! is exposed separately so the composition can be checked against the
//! game itself on embedded pure profiles.

use std::fmt::Debug;
use std::ops::{Add, Mul, Sub};

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{Game, Payoff, PureProfile, PLAYERS};
use crate::ratio::{self, Rational};

/// Numeric type usable as a probability weight: exact rationals or `f64`.
pub trait Weight:
    Clone
    + Debug
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
{
    fn from_rational(r: &Rational) -> Self;
    fn to_f64(&self) -> f64;
    /// Whether a total of weights counts as one (exact for rationals).
    fn is_unit_total(total: &Self) -> bool;
    /// Equality used when merging outcome vectors.
    fn same(a: &Self, b: &Self) -> bool;
}

impl Weight for Rational {
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ratio::to_f64(self)
    }

    fn is_unit_total(total: &Self) -> bool {
        total.is_one()
    }

    fn same(a: &Self, b: &Self) -> bool {
        a == b
    }
}

pub const FLOAT_TOLERANCE: f64 = 1e-12;

impl Weight for f64 {
    fn from_rational(r: &Rational) -> Self {
        ratio::to_f64(r)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_unit_total(total: &Self) -> bool {
        (total - 1.0).abs() <= FLOAT_TOLERANCE
    }

    fn same(a: &Self, b: &Self) -> bool {
        (a - b).abs() <= FLOAT_TOLERANCE
    }
}

/// A finitely supported probability distribution. Zero weights may appear
/// in the support.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dist<X, W = Rational> {
    support: Vec<X>,
    weights: Vec<W>,
}

impl<X: PartialEq, W: Weight> Dist<X, W> {
    pub fn new(support: Vec<X>, weights: Vec<W>) -> Result<Self> {
        if support.len() != weights.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} support elements but {} weights",
                support.len(),
                weights.len()
            )));
        }
        if support.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        if weights.iter().any(|w| *w < W::zero()) {
            return Err(Error::InvalidDistribution("negative weight".into()));
        }
        let total = weights.iter().cloned().fold(W::zero(), |a, b| a + b);
        if !W::is_unit_total(&total) {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {}, not 1",
                total.to_f64()
            )));
        }
        for (i, x) in support.iter().enumerate() {
            if support[..i].contains(x) {
                return Err(Error::InvalidDistribution("repeated support element".into()));
            }
        }
        Ok(Dist { support, weights })
    }

    pub fn point(x: X) -> Self {
        Dist {
            support: vec![x],
            weights: vec![W::one()],
        }
    }

    /// Weight of `x`, zero outside the support.
    pub fn prob(&self, x: &X) -> W {
        self.support
            .iter()
            .position(|y| y == x)
            .map_or_else(W::zero, |k| self.weights[k].clone())
    }
}

impl<X, W> Dist<X, W> {
    pub fn support(&self) -> &[X] {
        &self.support
    }

    pub fn weights(&self) -> &[W] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&X, &W)> {
        self.support.iter().zip(&self.weights)
    }

    pub fn total(&self) -> W
    where
        W: Weight,
    {
        self.weights.iter().cloned().fold(W::zero(), |a, b| a + b)
    }

    pub fn to_f64(&self) -> Dist<X, f64>
    where
        X: Clone,
        W: Weight,
    {
        Dist {
            support: self.support.clone(),
            weights: self.weights.iter().map(Weight::to_f64).collect(),
        }
    }
}

impl<W: Weight> Dist<usize, W> {
    /// Distribution over `0..weights.len()`.
    pub fn over_indices(weights: Vec<W>) -> Result<Self> {
        Dist::new((0..weights.len()).collect(), weights)
    }

    /// `(p, 1 - p)` over two strategies.
    pub fn binary(p: W) -> Result<Self> {
        let rest = W::one() - p.clone();
        Dist::over_indices(vec![p, rest])
    }
}

/// One distribution per player over that player's strategy indices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixedProfile<W = Rational> {
    pub players: [Dist<usize, W>; PLAYERS],
}

impl<W: Weight> MixedProfile<W> {
    pub fn new(row: Dist<usize, W>, col: Dist<usize, W>) -> Self {
        MixedProfile { players: [row, col] }
    }

    /// Both players mix over two strategies with first-strategy probabilities
    /// `p` and `q`.
    pub fn binary(p: W, q: W) -> Result<Self> {
        Ok(MixedProfile::new(Dist::binary(p)?, Dist::binary(q)?))
    }

    pub fn pure(game: &Game, profile: PureProfile) -> Result<Self> {
        game.check_profile(profile)?;
        Ok(MixedProfile::new(
            embed_pure(profile.row(), game.rows())?,
            embed_pure(profile.col(), game.cols())?,
        ))
    }

    fn check(&self, game: &Game) -> Result<()> {
        for (player, dist) in self.players.iter().enumerate() {
            let count = game.strategy_count(player);
            if let Some(&bad) = dist.support().iter().find(|&&s| s >= count) {
                return Err(Error::DimensionMismatch {
                    expected: count,
                    found: bad + 1,
                });
            }
        }
        Ok(())
    }
}

/// The embedding of a pure strategy as a point mass over `0..arity`.
pub fn embed_pure<W: Weight>(strategy: usize, arity: usize) -> Result<Dist<usize, W>> {
    if strategy >= arity {
        return Err(Error::StrategyOutOfRange {
            index: strategy,
            arity,
        });
    }
    let weights = (0..arity)
        .map(|k| if k == strategy { W::one() } else { W::zero() })
        .collect();
    Ok(Dist {
        support: (0..arity).collect(),
        weights,
    })
}

/// Independent product, support in row-major order.
pub fn product<X: Clone, Y: Clone, W: Weight>(a: &Dist<X, W>, b: &Dist<Y, W>) -> Dist<(X, Y), W> {
    let mut support = Vec::with_capacity(a.len() * b.len());
    let mut weights = Vec::with_capacity(a.len() * b.len());
    for (x, wx) in a.iter() {
        for (y, wy) in b.iter() {
            support.push((x.clone(), y.clone()));
            weights.push(wx.clone() * wy.clone());
        }
    }
    Dist { support, weights }
}

/// Distribution over outcome vectors induced by a distribution over profiles.
/// Profiles with equal outcome vectors have their mass merged.
pub fn pushforward<W: Weight>(
    game: &Game,
    dist: &Dist<PureProfile, W>,
) -> Result<Dist<Payoff<W>, W>> {
    let mut support: Vec<Payoff<W>> = Vec::new();
    let mut weights: Vec<W> = Vec::new();
    for (&profile, w) in dist.iter() {
        let payoff = game.payoff(profile)?;
        let outcome = [W::from_rational(&payoff[0]), W::from_rational(&payoff[1])];
        let existing = support
            .iter()
            .position(|o| W::same(&o[0], &outcome[0]) && W::same(&o[1], &outcome[1]));
        match existing {
            Some(k) => weights[k] = weights[k].clone() + w.clone(),
            None => {
                support.push(outcome);
                weights.push(w.clone());
            }
        }
    }
    Ok(Dist { support, weights })
}

pub fn expectation<W: Weight>(dist: &Dist<Payoff<W>, W>) -> Payoff<W> {
    let mut out = [W::zero(), W::zero()];
    for (outcome, w) in dist.iter() {
        for (acc, value) in out.iter_mut().zip(outcome) {
            *acc = acc.clone() + w.clone() * value.clone();
        }
    }
    out
}

pub fn profile_dist<W: Weight>(m: &MixedProfile<W>) -> Dist<PureProfile, W> {
    let pairs = product(&m.players[0], &m.players[1]);
    Dist {
        support: pairs
            .support
            .iter()
            .map(|&(r, c)| PureProfile::new(r, c))
            .collect(),
        weights: pairs.weights,
    }
}

/// Expected outcome of a mixed profile: expectation after pushforward after
/// product.
pub fn g_mix<W: Weight>(game: &Game, m: &MixedProfile<W>) -> Result<Payoff<W>> {
    m.check(game)?;
    let outcomes = pushforward(game, &profile_dist(m))?;
    Ok(expectation(&outcomes))
}

/// A product distribution on a 2x2 game, in the convention of the classic
/// tableau: `p` is the probability of the first row strategy and `q` the
/// probability of the *second* column strategy, so cell `(s1, t1)` carries
/// `p (1 - q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProductWitness {
    pub p: f64,
    pub q: f64,
}

impl ProductWitness {
    pub fn cells(&self) -> [f64; 4] {
        product_cells(self.p, self.q)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Realizability {
    pub realizable: bool,
    /// Smallest total-variation distance found between the target and a
    /// product distribution.
    pub distance: f64,
    pub witness: Option<ProductWitness>,
}

pub const REALIZABLE_GRID: usize = 101;
pub const REALIZABLE_SWEEPS: usize = 50;
pub const REALIZABLE_TOLERANCE: f64 = 1e-9;

fn product_cells(p: f64, q: f64) -> [f64; 4] {
    [p * (1.0 - q), p * q, (1.0 - p) * (1.0 - q), (1.0 - p) * q]
}

fn total_variation(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Minimizes a sum of absolute values of affine functions of one variable on
/// `[0, 1]`: the optimum sits at an endpoint or at one of the kinks.
fn line_minimum(terms: &[(f64, f64)], current: f64) -> f64 {
    let objective = |x: f64| terms.iter().map(|(a, b)| (a * x + b).abs()).sum::<f64>();
    let kinks = terms
        .iter()
        .filter(|(a, _)| *a != 0.0)
        .map(|(a, b)| -b / a)
        .filter(|x| (0.0..=1.0).contains(x));
    let mut best = (objective(current), current);
    for x in [0.0, 1.0].into_iter().chain(kinks) {
        let v = objective(x);
        if v < best.0 {
            best = (v, x);
        }
    }
    best.1
}

/// Searches for a product distribution matching `target` to within
/// `tolerance` in total variation: a 101x101 grid over `(p, q)`, then 50
/// sweeps of coordinate descent with exact line minimization. The marginals
/// of the target are tried as a second starting point.
pub fn realizable<W: Weight>(
    game: &Game,
    target: &Dist<PureProfile, W>,
    tolerance: f64,
) -> Result<Realizability> {
    game.require_2x2()?;
    let mut t = [0.0; 4];
    for (profile, w) in target.iter() {
        t[game.cell_index(*profile)?] += w.to_f64();
    }

    let step = 1.0 / (REALIZABLE_GRID - 1) as f64;
    let mut grid_best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..REALIZABLE_GRID {
        for j in 0..REALIZABLE_GRID {
            let (p, q) = (i as f64 * step, j as f64 * step);
            let d = total_variation(&product_cells(p, q), &t);
            if d < grid_best.0 {
                grid_best = (d, p, q);
            }
        }
    }

    let refine = |mut p: f64, mut q: f64| {
        for _ in 0..REALIZABLE_SWEEPS {
            // Cells as affine functions of p with q fixed, minus the target.
            let in_p = [
                (1.0 - q, -t[0]),
                (q, -t[1]),
                (-(1.0 - q), (1.0 - q) - t[2]),
                (-q, q - t[3]),
            ];
            p = line_minimum(&in_p, p);
            let in_q = [
                (-p, p - t[0]),
                (p, -t[1]),
                (-(1.0 - p), (1.0 - p) - t[2]),
                (1.0 - p, -t[3]),
            ];
            q = line_minimum(&in_q, q);
        }
        (total_variation(&product_cells(p, q), &t), p, q)
    };

    let from_grid = refine(grid_best.1, grid_best.2);
    let from_marginals = refine(t[0] + t[1], t[1] + t[3]);
    let (distance, p, q) = if from_marginals.0 < from_grid.0 {
        from_marginals
    } else {
        from_grid
    };
    let realizable = distance <= tolerance;
    Ok(Realizability {
        realizable,
        distance,
        witness: realizable.then_some(ProductWitness { p, q }),
    })
}

/// Exact multilinearity helper: expected payoff of `player` when they play
/// pure `strategy` against the opponent's mixture.
pub fn pure_vs_mixed<W: Weight>(
    game: &Game,
    player: usize,
    strategy: usize,
    opponent: &Dist<usize, W>,
) -> W {
    let mut total = W::zero();
    for (&other, w) in opponent.iter() {
        let profile = PureProfile::new(0, 0).with(player, strategy).with(1 - player, other);
        let u = &game.cell(profile.row(), profile.col())[player];
        total = total + w.clone() * W::from_rational(u);
    }
    total
}

pub fn is_probability(r: &Rational) -> bool {
    !r.is_negative() && *r <= Rational::one()
}
