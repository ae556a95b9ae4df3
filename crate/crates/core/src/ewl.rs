//! The EWL quantization protocol for 2x2 games.
//!
//! The referee prepares `J(gamma)|00>`, each player applies a single-qubit
//! unitary, and the referee measures in the basis `{J(gamma)|xy>}`. Outcome
//! `(x, y)` is paid as cell `(row x, column y)` of the base game, with `|0>`
//! standing for the first strategy ("no flip").
//!
//! The entangler is `J(gamma) = cos(gamma/2) I + i sin(gamma/2) D (x) D` with
//! `D = su2(pi, 0, 0)`. `D (x) D` commutes with `su2(theta, 0, 0) (x) I` and
//! `I (x) su2(theta, 0, 0)`, which is what makes the classical embeddings
//! reproduce the game and its mixed extension for every `gamma`.

use std::f64::consts::FRAC_PI_2;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{Game, Payoff, PureProfile};
use crate::montecarlo::{self, Moments};
use crate::quantum::{
    haar_su2, mat4_adjoint, mat4_apply, mat4_mul, su2_from_angles, Matrix4, Superposition,
    Unitary2, C64,
};
use crate::simplex::{self, Dist, MixedProfile};

pub const EMBEDDING_TOLERANCE: f64 = 1e-9;

/// Profiles in the order of the measurement basis `|00>, |01>, |10>, |11>`.
pub const CELLS: [PureProfile; 4] = [
    PureProfile::new(0, 0),
    PureProfile::new(0, 1),
    PureProfile::new(1, 0),
    PureProfile::new(1, 1),
];

pub fn entangler(gamma: f64) -> Matrix4 {
    let d = Unitary2::flip();
    let dd = d.kron(&d);
    let (s, c) = (gamma / 2.0).sin_cos();
    std::array::from_fn(|r| {
        std::array::from_fn(|k| {
            let id = if r == k { c } else { 0.0 };
            C64::new(id, 0.0) + C64::new(0.0, s) * dd[r][k]
        })
    })
}

/// One member of the protocol family: a 2x2 game and an entanglement level.
#[derive(Debug, Clone)]
pub struct EwlConfig {
    game: Game,
    gamma: f64,
    j_adjoint: Matrix4,
    initial: [C64; 4],
    table: [Payoff<f64>; 4],
}

impl EwlConfig {
    pub fn new(game: Game, gamma: f64) -> Result<Self> {
        game.require_2x2()?;
        if !(0.0..=FRAC_PI_2).contains(&gamma) {
            return Err(Error::GammaOutOfRange(gamma));
        }
        let j = entangler(gamma);
        let initial = std::array::from_fn(|r| j[r][0]);
        let t = game.table_f64();
        Ok(EwlConfig {
            table: [t[0], t[1], t[2], t[3]],
            game,
            gamma,
            j_adjoint: mat4_adjoint(&j),
            initial,
        })
    }

    /// `gamma = pi/2`: the maximally entangled initial state.
    pub fn maximal(game: Game) -> Result<Self> {
        EwlConfig::new(game, FRAC_PI_2)
    }

    pub fn game(&self) -> &Game {
        &self.game
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn initial_state(&self) -> [C64; 4] {
        self.initial
    }

    /// Amplitudes of `(ua (x) ub) J|00>` in the measurement basis.
    pub fn amplitudes(&self, ua: &Unitary2, ub: &Unitary2) -> [C64; 4] {
        let played = mat4_apply(&ua.kron(ub), &self.initial);
        mat4_apply(&self.j_adjoint, &played)
    }

    pub fn cell_probs(&self, ua: &Unitary2, ub: &Unitary2) -> [f64; 4] {
        self.amplitudes(ua, ub).map(|a| a.norm_sqr())
    }

    pub fn expected(&self, probs: &[f64; 4]) -> Payoff<f64> {
        let mut out = [0.0; 2];
        for (p, cell) in probs.iter().zip(&self.table) {
            out[0] += p * cell[0];
            out[1] += p * cell[1];
        }
        out
    }

    pub fn utility(&self, player: usize, probs: &[f64; 4]) -> f64 {
        probs.iter().zip(&self.table).map(|(p, cell)| p * cell[player]).sum()
    }

    /// `u` applied to `player`'s qubit of the initial state.
    pub fn half_applied(&self, player: usize, u: &Unitary2) -> [C64; 4] {
        let id = Unitary2::identity();
        let op = if player == 0 { u.kron(&id) } else { id.kron(u) };
        mat4_apply(&op, &self.initial)
    }

    /// `J^dagger (u on player's qubit)`: maps a half-applied state of the
    /// other player to measurement-basis amplitudes.
    pub fn measurement_operator(&self, player: usize, u: &Unitary2) -> Matrix4 {
        let id = Unitary2::identity();
        let op = if player == 0 { u.kron(&id) } else { id.kron(u) };
        mat4_mul(&self.j_adjoint, &op)
    }
}

/// The joint state after both players act, in the referee's basis labelled
/// by game profiles.
pub fn protocol_state(config: &EwlConfig, ua: &Unitary2, ub: &Unitary2) -> Superposition<PureProfile> {
    Superposition::new(CELLS.to_vec(), config.amplitudes(ua, ub).to_vec())
        .expect("unitary evolution of a unit vector is nonzero")
}

/// Expected payoff of the quantized game: measure, push forward to
/// outcomes, take the expectation.
pub fn g_q(config: &EwlConfig, ua: &Unitary2, ub: &Unitary2) -> Payoff<f64> {
    let outcome = protocol_state(config, ua, ub).measure();
    let pushed = simplex::pushforward(config.game(), &outcome).expect("cells of a 2x2 game");
    simplex::expectation(&pushed)
}

/// A probability distribution over a player's pure quantum strategies.
#[derive(Debug, Clone, PartialEq)]
pub enum QuantumMixture {
    Finite(Dist<Unitary2, f64>),
    /// Haar measure on SU(2), estimated from `samples` keyed draws.
    Haar { seed: u64, samples: u64 },
}

impl QuantumMixture {
    pub fn point(u: Unitary2) -> Self {
        QuantumMixture::Finite(Dist::point(u))
    }

    pub fn haar(seed: u64, samples: u64) -> Self {
        QuantumMixture::Haar { seed, samples }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            QuantumMixture::Haar { samples: 0, .. } => Err(Error::ZeroSamples),
            _ => Ok(()),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            QuantumMixture::Finite(d) if d.len() == 1 => "point mass".to_string(),
            QuantumMixture::Finite(d) => format!("finite mixture of {} unitaries", d.len()),
            QuantumMixture::Haar { seed, samples } => {
                format!("haar (seed {seed}, {samples} samples)")
            }
        }
    }

    /// The `i`-th draw for `player`; only meaningful for the Haar case.
    fn draw(&self, player: usize, i: u64) -> Unitary2 {
        match self {
            QuantumMixture::Haar { seed, .. } => haar_su2(montecarlo::player_seed(*seed, player), i),
            QuantumMixture::Finite(_) => unreachable!("finite mixtures are summed exactly"),
        }
    }
}

/// Averages `value(ua, ub)` over the two mixtures. Finite supports are
/// summed exactly; Haar mixtures are sampled. When both players are Haar the
/// draws are paired by index over `max` of the two sample counts.
pub fn mixture_average<const K: usize, F>(
    ma: &QuantumMixture,
    mb: &QuantumMixture,
    value: F,
) -> Result<Moments<K>>
where
    F: Fn(&Unitary2, &Unitary2) -> [f64; K] + Sync,
{
    ma.validate()?;
    mb.validate()?;
    let weighted = |d: &Dist<Unitary2, f64>, f: &dyn Fn(&Unitary2) -> [f64; K]| {
        let mut acc = [0.0; K];
        for (u, w) in d.iter() {
            let v = f(u);
            for k in 0..K {
                acc[k] += w * v[k];
            }
        }
        acc
    };
    Ok(match (ma, mb) {
        (QuantumMixture::Finite(da), QuantumMixture::Finite(db)) => {
            Moments::exact(weighted(da, &|ua| weighted(db, &|ub| value(ua, ub))))
        }
        (QuantumMixture::Haar { samples, .. }, QuantumMixture::Finite(db)) => {
            montecarlo::estimate(*samples, |i| {
                let ua = ma.draw(0, i);
                weighted(db, &|ub| value(&ua, ub))
            })
        }
        (QuantumMixture::Finite(da), QuantumMixture::Haar { samples, .. }) => {
            montecarlo::estimate(*samples, |i| {
                let ub = mb.draw(1, i);
                weighted(da, &|ua| value(ua, &ub))
            })
        }
        (QuantumMixture::Haar { samples: na, .. }, QuantumMixture::Haar { samples: nb, .. }) => {
            montecarlo::estimate(*na.max(nb), |i| value(&ma.draw(0, i), &mb.draw(1, i)))
        }
    })
}

/// Expected payoff of the mixed quantized game, with standard errors.
pub fn g_mq(config: &EwlConfig, ma: &QuantumMixture, mb: &QuantumMixture) -> Result<Moments<2>> {
    mixture_average(ma, mb, |ua, ub| config.expected(&config.cell_probs(ua, ub)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeEstimate {
    pub dist: Dist<PureProfile, f64>,
    #[serde(serialize_with = "crate::report::f64s_15")]
    pub std_error: [f64; 4],
    pub samples: u64,
}

/// The averaged measurement distribution over the four cells.
pub fn outcome_dist_mq(
    config: &EwlConfig,
    ma: &QuantumMixture,
    mb: &QuantumMixture,
) -> Result<OutcomeEstimate> {
    let m = mixture_average(ma, mb, |ua, ub| config.cell_probs(ua, ub))?;
    // Renormalize away rounding so the result is a valid distribution.
    let total: f64 = m.mean.iter().sum();
    let dist = Dist::new(CELLS.to_vec(), m.mean.iter().map(|p| p / total).collect())?;
    Ok(OutcomeEstimate {
        dist,
        std_error: m.std_error,
        samples: m.samples,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmbeddingCheck {
    pub holds: bool,
    #[serde(serialize_with = "crate::report::f64_15")]
    pub max_deviation: f64,
}

/// The classical embedding of pure strategies: `I` and the flip.
pub fn embed_pure_quantum(strategy: usize) -> Unitary2 {
    if strategy == 0 {
        Unitary2::identity()
    } else {
        Unitary2::flip()
    }
}

/// The classical embedding of a mixed strategy with first-strategy
/// probability `p`: a real rotation measuring to `(p, 1 - p)`.
pub fn embed_mixed_quantum(p: f64) -> Unitary2 {
    su2_from_angles(2.0 * p.clamp(0.0, 1.0).sqrt().acos(), 0.0, 0.0)
}

/// Whether the quantized game restricted to embedded pure strategies
/// reproduces the base game.
pub fn check_proper(config: &EwlConfig) -> EmbeddingCheck {
    let mut worst: f64 = 0.0;
    for profile in CELLS {
        let got = g_q(
            config,
            &embed_pure_quantum(profile.row()),
            &embed_pure_quantum(profile.col()),
        );
        let want = config.game().payoff_f64(profile).expect("2x2 profile");
        for k in 0..2 {
            worst = worst.max((got[k] - want[k]).abs());
        }
    }
    EmbeddingCheck {
        holds: worst <= EMBEDDING_TOLERANCE,
        max_deviation: worst,
    }
}

/// Whether the quantized game on embedded mixed strategies reproduces the
/// mixed extension, over a `(grid_steps + 1)^2` grid of `(p, q)`.
pub fn check_complete(config: &EwlConfig, grid_steps: usize) -> Result<EmbeddingCheck> {
    if grid_steps < 2 {
        return Err(Error::GridTooSmall {
            min: 2,
            found: grid_steps,
        });
    }
    let mut worst: f64 = 0.0;
    for i in 0..=grid_steps {
        for k in 0..=grid_steps {
            let p = i as f64 / grid_steps as f64;
            let q = k as f64 / grid_steps as f64;
            let got = g_q(config, &embed_mixed_quantum(p), &embed_mixed_quantum(q));
            let want = simplex::g_mix(config.game(), &MixedProfile::binary(p, q)?)?;
            for j in 0..2 {
                worst = worst.max((got[j] - want[j]).abs());
            }
        }
    }
    Ok(EmbeddingCheck {
        holds: worst <= EMBEDDING_TOLERANCE,
        max_deviation: worst,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageScan {
    pub pairs: u64,
    pub targets: usize,
    /// Worst case over targets of the nearest sampled outcome distribution,
    /// in total variation.
    #[serde(serialize_with = "crate::report::f64_15")]
    pub max_nearest_distance: f64,
    #[serde(serialize_with = "crate::report::f64_15")]
    pub mean_nearest_distance: f64,
}

/// Empirical look at how much of the outcome simplex pure unitary pairs
/// reach: Haar-random pairs against uniformly random target distributions.
pub fn coverage_scan(config: &EwlConfig, pairs: u64, targets: usize, seed: u64) -> Result<CoverageScan> {
    if pairs == 0 || targets == 0 {
        return Err(Error::ZeroSamples);
    }
    let reached: Vec<[f64; 4]> = (0..pairs)
        .map(|i| {
            config.cell_probs(
                &haar_su2(montecarlo::player_seed(seed, 0), i),
                &haar_su2(montecarlo::player_seed(seed, 1), i),
            )
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX);
    let mut worst: f64 = 0.0;
    let mut total = 0.0;
    for _ in 0..targets {
        let e: [f64; 4] = std::array::from_fn(|_| Exp1.sample(&mut rng));
        let s: f64 = e.iter().sum();
        let target = e.map(|x| x / s);
        let nearest = reached
            .iter()
            .map(|r| 0.5 * r.iter().zip(&target).map(|(a, b)| (a - b).abs()).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(nearest);
        total += nearest;
    }
    Ok(CoverageScan {
        pairs,
        targets,
        max_nearest_distance: worst,
        mean_nearest_distance: total / targets as f64,
    })
}
