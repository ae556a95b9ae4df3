use std::f64::consts::FRAC_PI_2;
use std::path::Path;

use qgame_core::equilibria::{mixed_nash_2x2, verify_classical_eq, verify_quantum_eq};
use qgame_core::ewl::{
    check_complete, check_proper, coverage_scan, embed_mixed_quantum, g_mq, g_q, outcome_dist_mq,
    protocol_state, EwlConfig, QuantumMixture, CELLS,
};
use qgame_core::mediated::{
    aumann_check, ce_optimize, follow_payoff, is_correlated_eq, player_objective, welfare_objective,
    RefereeDist,
};
use qgame_core::quantum::Unitary2;
use qgame_core::ratio;
use qgame_core::report::round15;
use qgame_core::simplex::MixedProfile;
use qgame_core::{Error, Game, PureProfile, Rational, Result};
use serde_json::{json, Value};

use crate::args::{
    AnalyzeArgs, CheckKind, CorrelatedArgs, EwlArgs, MixtureKind, Objective, ProfileSpec, VerifyArgs,
};

/// A command's report, and whether a claimed equilibrium failed its test.
pub struct Outcome {
    pub report: Value,
    pub certification_failed: bool,
}

impl Outcome {
    fn ok(report: Value) -> Self {
        Outcome {
            report,
            certification_failed: false,
        }
    }
}

/// Number of random targets in an `ewl --coverage` scan.
const COVERAGE_TARGETS: usize = 200;

/// A builtin name or a path to a game file.
pub fn load_game(arg: &str) -> Result<Game> {
    if Game::BUILTIN_NAMES.contains(&arg) {
        return Game::builtin(arg);
    }
    match std::fs::read_to_string(arg) {
        Ok(text) => Game::from_json_str(&text),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound && !looks_like_path(arg) => {
            Err(Error::UnknownBuiltin(arg.to_string()))
        }
        Err(e) => Err(Error::Io {
            path: arg.to_string(),
            message: e.to_string(),
        }),
    }
}

fn looks_like_path(arg: &str) -> bool {
    arg.contains(std::path::MAIN_SEPARATOR) || arg.contains('/') || Path::new(arg).extension().is_some()
}

pub fn rationals(xs: &[Rational]) -> Value {
    Value::from(xs.iter().map(ToString::to_string).collect::<Vec<_>>())
}

fn floats(xs: &[f64]) -> Value {
    Value::from(xs.iter().map(|&x| round15(x)).collect::<Vec<_>>())
}

pub fn profile_label(game: &Game, p: PureProfile) -> String {
    format!("({}, {})", game.strategy_name(0, p.row()), game.strategy_name(1, p.col()))
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize to JSON")
}

fn objective_vector(game: &Game, objective: &Objective) -> Result<Vec<Rational>> {
    let v = match objective {
        Objective::Welfare => welfare_objective(game),
        Objective::Player(i) => player_objective(game, *i),
        Objective::Custom(v) => v.clone(),
    };
    if v.len() != game.cell_count() {
        return Err(Error::ObjectiveLength {
            expected: game.cell_count(),
            found: v.len(),
        });
    }
    Ok(v)
}

pub fn analyze(args: &AnalyzeArgs) -> Result<Outcome> {
    let game = load_game(&args.game)?;
    let pure: Vec<Value> = game
        .pure_nash_all()
        .into_iter()
        .map(|p| {
            json!({
                "profile": [p.row(), p.col()],
                "label": profile_label(&game, p),
                "payoff": rationals(game.payoff(p).expect("listed profiles are valid")),
            })
        })
        .collect();
    let mut dominance = Vec::new();
    for player in 0..2 {
        for d in game.dominance(player)? {
            dominance.push(json!({
                "player": player,
                "dominating": game.strategy_name(player, d.dominating),
                "dominated": game.strategy_name(player, d.dominated),
                "strict": d.strict,
            }));
        }
    }
    let mixed = if game.is_2x2() {
        to_value(&mixed_nash_2x2(&game)?)
    } else {
        Value::Null
    };
    let mut correlated = serde_json::Map::new();
    for (name, objective) in [
        ("welfare", Objective::Welfare),
        ("player1", Objective::Player(0)),
        ("player2", Objective::Player(1)),
    ] {
        let best = ce_optimize(&game, &objective_vector(&game, &objective)?)?;
        correlated.insert(
            name.into(),
            json!({
                "value": best.value.to_string(),
                "rho": rationals(&best.rho.cells(&game)),
                "payoff": rationals(&follow_payoff(&game, &best.rho)?),
            }),
        );
    }
    let mut ewl = Vec::new();
    for &gamma in &args.gamma {
        let config = EwlConfig::new(game.clone(), gamma)?;
        ewl.push(json!({
            "gamma": round15(gamma),
            "proper": to_value(&check_proper(&config)),
            "complete": to_value(&check_complete(&config, 20)?),
        }));
    }
    Ok(Outcome::ok(json!({
        "game": game.to_json_value(),
        "pure_nash": pure,
        "dominance": dominance,
        "mixed_nash": mixed,
        "correlated_optima": correlated,
        "ewl": ewl,
    })))
}

pub fn correlated(args: &CorrelatedArgs) -> Result<Outcome> {
    let game = load_game(&args.game)?;
    let objective = objective_vector(&game, &args.objective)?;
    let report = match &args.rho {
        Some(list) => {
            let rho = RefereeDist::from_cells(&game, list.0.clone())?;
            let cells = rho.cells(&game);
            let value: Rational = objective.iter().zip(&cells).map(|(o, w)| o * w).sum();
            let check = aumann_check(&game, &rho);
            let mediated = if game.is_2x2() {
                to_value(&is_correlated_eq(&game, &rho)?)
            } else {
                Value::Null
            };
            json!({
                "mode": "check",
                "feasible": check.satisfied,
                "value": value.to_string(),
                "rho": rationals(&cells),
                "violations": to_value(&check.violations),
                "payoff": rationals(&follow_payoff(&game, &rho)?),
                "mediated_game_check": mediated,
            })
        }
        None => match ce_optimize(&game, &objective) {
            Ok(best) => json!({
                "mode": "optimize",
                "feasible": true,
                "value": best.value.to_string(),
                "rho": rationals(&best.rho.cells(&game)),
                "violations": [],
                "payoff": rationals(&follow_payoff(&game, &best.rho)?),
            }),
            Err(Error::Infeasible) => json!({
                "mode": "optimize",
                "feasible": false,
                "value": Value::Null,
                "rho": Value::Null,
                "violations": [],
            }),
            Err(e) => return Err(e),
        },
    };
    Ok(Outcome::ok(report))
}

fn amplitudes_json(amps: &[qgame_core::quantum::C64]) -> Value {
    Value::from(
        amps.iter()
            .map(|a| json!([round15(a.re), round15(a.im)]))
            .collect::<Vec<_>>(),
    )
}

fn cell_labels(game: &Game) -> Value {
    Value::from(CELLS.iter().map(|&p| profile_label(game, p)).collect::<Vec<_>>())
}

pub fn ewl(args: &EwlArgs, seed: u64) -> Result<Outcome> {
    let game = load_game(&args.game)?;
    let config = EwlConfig::new(game, args.gamma)?;
    let mut report = serde_json::Map::new();
    report.insert("game".into(), config.game().name().into());
    report.insert("gamma".into(), round15(config.gamma()).into());
    report.insert("cells".into(), cell_labels(config.game()));
    if let Some(kind) = args.check {
        let check = match kind {
            CheckKind::Proper => check_proper(&config),
            CheckKind::Complete => check_complete(&config, args.grid_steps)?,
        };
        let name = match kind {
            CheckKind::Proper => "proper",
            CheckKind::Complete => "complete",
        };
        report.insert(
            "check".into(),
            json!({ "kind": name, "holds": check.holds, "max_deviation": round15(check.max_deviation) }),
        );
    }
    match args.mixture {
        Some(MixtureKind::Haar) => {
            let haar = QuantumMixture::haar(seed, args.samples);
            let ma = args.u_a.map_or_else(|| haar.clone(), QuantumMixture::point);
            let mb = args.u_b.map_or_else(|| haar.clone(), QuantumMixture::point);
            let payoff = g_mq(&config, &ma, &mb)?;
            let outcome = outcome_dist_mq(&config, &ma, &mb)?;
            report.insert(
                "mixed".into(),
                json!({
                    "players": [ma.describe(), mb.describe()],
                    "seed": seed,
                    "samples": payoff.samples,
                    "payoff": floats(&payoff.mean),
                    "payoff_std_error": floats(&payoff.std_error),
                    "outcome": floats(outcome.dist.weights()),
                    "outcome_std_error": floats(&outcome.std_error),
                }),
            );
        }
        None => {
            let show_pure = args.u_a.is_some() || args.u_b.is_some() || (args.check.is_none() && args.coverage.is_none());
            if show_pure {
                let ua = args.u_a.unwrap_or(Unitary2::identity());
                let ub = args.u_b.unwrap_or(Unitary2::identity());
                let state = protocol_state(&config, &ua, &ub);
                report.insert(
                    "pure".into(),
                    json!({
                        "uA": to_value(&ua),
                        "uB": to_value(&ub),
                        "amplitudes": amplitudes_json(state.amplitudes()),
                        "outcome": floats(&config.cell_probs(&ua, &ub)),
                        "payoff": floats(&g_q(&config, &ua, &ub)),
                    }),
                );
            }
        }
    }
    if let Some(pairs) = args.coverage {
        report.insert(
            "coverage".into(),
            to_value(&coverage_scan(&config, pairs, COVERAGE_TARGETS, seed)?),
        );
    }
    Ok(Outcome::ok(Value::Object(report)))
}

pub fn verify(args: &VerifyArgs, seed: u64) -> Result<Outcome> {
    let game = load_game(&args.game)?;
    let report = match (&args.profile, args.gamma) {
        (ProfileSpec::Classical(p, q), None) => {
            verify_classical_eq(&game, &MixedProfile::binary(p.clone(), q.clone())?)?
        }
        (ProfileSpec::Classical(p, q), Some(gamma)) => {
            let config = EwlConfig::new(game, gamma)?;
            let ma = QuantumMixture::point(embed_mixed_quantum(ratio::to_f64(p)));
            let mb = QuantumMixture::point(embed_mixed_quantum(ratio::to_f64(q)));
            verify_quantum_eq(&config, &ma, &mb, args.grid)?
        }
        (ProfileSpec::Haar, gamma) => {
            let config = EwlConfig::new(game, gamma.unwrap_or(FRAC_PI_2))?;
            let haar = QuantumMixture::haar(seed, args.samples);
            verify_quantum_eq(&config, &haar, &haar, args.grid)?
        }
    };
    Ok(Outcome {
        certification_failed: !report.certified,
        report: to_value(&report),
    })
}
