//! Finite two-player games in normal form.
//!
//! A [`Game`] maps every pure strategy profile to an outcome vector with one
//! real utility per player. Payoffs are held as exact rationals; float views
//! are produced on demand.

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::ratio::{self, Rational};

pub const PLAYERS: usize = 2;

/// One outcome vector: the utility of player 1 and player 2.
pub type Payoff<T = Rational> = [T; PLAYERS];

/// A choice of one pure strategy per player: `(row, column)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PureProfile {
    pub choices: [usize; PLAYERS],
}

impl PureProfile {
    pub const fn new(row: usize, col: usize) -> Self {
        PureProfile { choices: [row, col] }
    }

    pub fn row(&self) -> usize {
        self.choices[0]
    }

    pub fn col(&self) -> usize {
        self.choices[1]
    }

    /// The same profile with `player`'s choice replaced.
    pub fn with(&self, player: usize, strategy: usize) -> Self {
        let mut choices = self.choices;
        choices[player] = strategy;
        PureProfile { choices }
    }
}

impl fmt::Display for PureProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.choices[0], self.choices[1])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Dominance {
    pub dominating: usize,
    pub dominated: usize,
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NashCheck {
    pub is_nash: bool,
    /// Best payoff improvement available to each player by deviating alone.
    pub deviation_gains: Payoff,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Game {
    name: String,
    player_names: [String; PLAYERS],
    strategy_names: [Vec<String>; PLAYERS],
    // Row-major: cell (r, c) lives at r * cols + c.
    cells: Vec<Payoff>,
}

impl Game {
    pub fn new(
        name: impl Into<String>,
        player_names: [String; PLAYERS],
        strategy_names: [Vec<String>; PLAYERS],
        payoffs: Vec<Vec<Payoff>>,
    ) -> Result<Self> {
        let rows = strategy_names[0].len();
        let cols = strategy_names[1].len();
        if rows == 0 || cols == 0 {
            return Err(Error::RaggedPayoffs(
                "every player needs at least one strategy".into(),
            ));
        }
        if payoffs.len() != rows {
            return Err(Error::RaggedPayoffs(format!(
                "{} payoff rows for {} row strategies",
                payoffs.len(),
                rows
            )));
        }
        let mut cells = Vec::with_capacity(rows * cols);
        for (r, row) in payoffs.into_iter().enumerate() {
            if row.len() != cols {
                return Err(Error::RaggedPayoffs(format!(
                    "row {r} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            cells.extend(row);
        }
        Ok(Game {
            name: name.into(),
            player_names,
            strategy_names,
            cells,
        })
    }

    /// Builds a game with default labels `s1, s2, ...` and `t1, t2, ...`.
    pub fn from_table(name: impl Into<String>, payoffs: Vec<Vec<Payoff>>) -> Result<Self> {
        let rows = payoffs.len();
        let cols = payoffs.first().map_or(0, Vec::len);
        let labels = |prefix: char, n: usize| (1..=n).map(|k| format!("{prefix}{k}")).collect();
        Game::new(
            name,
            ["Player 1".to_string(), "Player 2".to_string()],
            [labels('s', rows), labels('t', cols)],
            payoffs,
        )
    }

    fn from_integers(name: &str, table: [[(i64, i64); 2]; 2]) -> Self {
        let payoffs = table
            .iter()
            .map(|row| row.iter().map(|&(a, b)| [ratio::int(a), ratio::int(b)]).collect())
            .collect();
        Game::from_table(name, payoffs).expect("builtin tables are well formed")
    }

    /// Prisoner's Dilemma: mutual defection `(s2, t2)` is the unique equilibrium.
    pub fn prisoners_dilemma() -> Self {
        Game::from_integers("Prisoner's Dilemma", [[(3, 3), (0, 5)], [(5, 0), (1, 1)]])
    }

    /// Simplified Poker, zero-sum.
    pub fn simplified_poker() -> Self {
        let q = ratio::frac;
        let payoffs = vec![
            vec![[q(5, 4), q(-5, 4)], [q(0, 1), q(0, 1)]],
            vec![[q(0, 1), q(0, 1)], [q(5, 2), q(-5, 2)]],
        ];
        Game::from_table("Simplified Poker", payoffs).expect("builtin tables are well formed")
    }

    /// The variant of Chicken with payoffs 2, 0, 3 and -1.
    pub fn chicken() -> Self {
        Game::from_integers("Chicken", [[(2, 2), (0, 3)], [(3, 0), (-1, -1)]])
    }

    pub const BUILTIN_NAMES: [&'static str; 3] = ["pd", "poker", "chicken"];

    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "pd" => Ok(Game::prisoners_dilemma()),
            "poker" => Ok(Game::simplified_poker()),
            "chicken" => Ok(Game::chicken()),
            other => Err(Error::UnknownBuiltin(other.to_string())),
        }
    }

    pub fn builtins() -> Vec<(&'static str, Game)> {
        Game::BUILTIN_NAMES
            .iter()
            .map(|&n| (n, Game::builtin(n).expect("known builtin")))
            .collect()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn player_name(&self, player: usize) -> &str {
        &self.player_names[player]
    }

    pub fn strategy_names(&self, player: usize) -> &[String] {
        &self.strategy_names[player]
    }

    pub fn strategy_name(&self, player: usize, strategy: usize) -> &str {
        &self.strategy_names[player][strategy]
    }

    pub fn strategy_count(&self, player: usize) -> usize {
        self.strategy_names[player].len()
    }

    pub fn rows(&self) -> usize {
        self.strategy_count(0)
    }

    pub fn cols(&self) -> usize {
        self.strategy_count(1)
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn is_2x2(&self) -> bool {
        self.rows() == 2 && self.cols() == 2
    }

    pub fn require_2x2(&self) -> Result<()> {
        if self.is_2x2() {
            Ok(())
        } else {
            Err(Error::NotTwoByTwo {
                rows: self.rows(),
                cols: self.cols(),
            })
        }
    }

    /// Every profile in row-major (lexicographic) order.
    pub fn profiles(&self) -> impl Iterator<Item = PureProfile> + '_ {
        let cols = self.cols();
        (0..self.cells.len()).map(move |k| PureProfile::new(k / cols, k % cols))
    }

    pub fn cell_index(&self, profile: PureProfile) -> Result<usize> {
        self.check_profile(profile)?;
        Ok(profile.row() * self.cols() + profile.col())
    }

    pub fn check_profile(&self, profile: PureProfile) -> Result<()> {
        for player in 0..PLAYERS {
            let count = self.strategy_count(player);
            let index = profile.choices[player];
            if index >= count {
                return Err(Error::InvalidProfile {
                    player,
                    index,
                    count,
                });
            }
        }
        Ok(())
    }

    fn check_player(&self, player: usize) -> Result<()> {
        if player < PLAYERS {
            Ok(())
        } else {
            Err(Error::InvalidPlayer(player))
        }
    }

    pub fn payoff(&self, profile: PureProfile) -> Result<&Payoff> {
        let k = self.cell_index(profile)?;
        Ok(&self.cells[k])
    }

    /// Payoff of an index-checked profile; panics on out-of-range input.
    pub(crate) fn cell(&self, row: usize, col: usize) -> &Payoff {
        &self.cells[row * self.cols() + col]
    }

    pub fn utility(&self, player: usize, profile: PureProfile) -> Result<&Rational> {
        self.check_player(player)?;
        Ok(&self.payoff(profile)?[player])
    }

    pub fn payoff_f64(&self, profile: PureProfile) -> Result<Payoff<f64>> {
        let p = self.payoff(profile)?;
        Ok([ratio::to_f64(&p[0]), ratio::to_f64(&p[1])])
    }

    /// Float view of a 2x2 table in row-major cell order.
    pub fn table_f64(&self) -> Vec<Payoff<f64>> {
        self.cells
            .iter()
            .map(|p| [ratio::to_f64(&p[0]), ratio::to_f64(&p[1])])
            .collect()
    }

    pub fn cells(&self) -> &[Payoff] {
        &self.cells
    }

    /// Strategies of `player` that maximize their payoff against the fixed
    /// `opponent_strategy`. Ties are all returned, in index order.
    pub fn best_replies(&self, player: usize, opponent_strategy: usize) -> Result<Vec<usize>> {
        self.check_player(player)?;
        let opponent = 1 - player;
        let opp_count = self.strategy_count(opponent);
        if opponent_strategy >= opp_count {
            return Err(Error::InvalidProfile {
                player: opponent,
                index: opponent_strategy,
                count: opp_count,
            });
        }
        let value = |s: usize| {
            let profile = PureProfile::new(0, 0)
                .with(player, s)
                .with(opponent, opponent_strategy);
            &self.cell(profile.row(), profile.col())[player]
        };
        let n = self.strategy_count(player);
        let best = (0..n).map(value).max().expect("strategy lists are non-empty");
        Ok((0..n).filter(|&s| value(s) == best).collect())
    }

    pub fn is_nash(&self, profile: PureProfile) -> Result<NashCheck> {
        self.check_profile(profile)?;
        let current = self.cell(profile.row(), profile.col());
        let mut gains: Payoff = [Rational::zero(), Rational::zero()];
        for (player, gain) in gains.iter_mut().enumerate() {
            for s in 0..self.strategy_count(player) {
                let deviated = profile.with(player, s);
                let diff =
                    &self.cell(deviated.row(), deviated.col())[player] - &current[player];
                if diff > *gain {
                    *gain = diff;
                }
            }
        }
        Ok(NashCheck {
            is_nash: gains.iter().all(Zero::is_zero),
            deviation_gains: gains,
        })
    }

    /// All pure Nash equilibria in lexicographic `(row, col)` order.
    pub fn pure_nash_all(&self) -> Vec<PureProfile> {
        self.profiles()
            .filter(|&p| self.is_nash(p).map(|c| c.is_nash).unwrap_or(false))
            .collect()
    }

    /// Every ordered pair `(a, b)` where strategy `a` of `player` dominates `b`.
    pub fn dominance(&self, player: usize) -> Result<Vec<Dominance>> {
        self.check_player(player)?;
        let opponent = 1 - player;
        let n = self.strategy_count(player);
        let utility = |own: usize, other: usize| {
            let p = PureProfile::new(0, 0).with(player, own).with(opponent, other);
            &self.cell(p.row(), p.col())[player]
        };
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                let mut all_geq = true;
                let mut all_gt = true;
                let mut any_gt = false;
                for other in 0..self.strategy_count(opponent) {
                    let (ua, ub) = (utility(a, other), utility(b, other));
                    all_geq &= ua >= ub;
                    all_gt &= ua > ub;
                    any_gt |= ua > ub;
                }
                if all_gt {
                    out.push(Dominance { dominating: a, dominated: b, strict: true });
                } else if all_geq && any_gt {
                    out.push(Dominance { dominating: a, dominated: b, strict: false });
                }
            }
        }
        Ok(out)
    }

    /// Applies `u -> scale * u + shift` to one player's utilities.
    pub fn affine_transform(&self, player: usize, scale: &Rational, shift: &Rational) -> Result<Game> {
        self.check_player(player)?;
        let mut out = self.clone();
        for cell in &mut out.cells {
            cell[player] = &cell[player] * scale + shift;
        }
        Ok(out)
    }

    // ----- file format -----

    /// Parses the JSON game file format.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: Value =
            serde_json::from_str(text).map_err(|e| Error::MalformedGame(e.to_string()))?;
        let obj = doc
            .as_object()
            .ok_or_else(|| Error::MalformedGame("top level must be an object".into()))?;
        let players = obj
            .get("players")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::MalformedGame("missing `players` array".into()))?;
        if players.len() != PLAYERS {
            return Err(Error::NotTwoPlayer(players.len()));
        }
        let mut player_names: [String; PLAYERS] = Default::default();
        let mut strategy_names: [Vec<String>; PLAYERS] = Default::default();
        for (i, player) in players.iter().enumerate() {
            player_names[i] = player
                .get("name")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::MalformedGame(format!("player {i} needs a string `name`")))?
                .to_string();
            let strategies = player
                .get("strategies")
                .and_then(Value::as_array)
                .ok_or_else(|| {
                    Error::MalformedGame(format!("player {i} needs a `strategies` array"))
                })?;
            strategy_names[i] = strategies
                .iter()
                .map(|s| {
                    s.as_str().map(str::to_string).ok_or_else(|| {
                        Error::MalformedGame(format!("player {i} strategy names must be strings"))
                    })
                })
                .collect::<Result<_>>()?;
        }
        let rows = obj
            .get("payoffs")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::MalformedGame("missing `payoffs` array".into()))?;
        let mut payoffs = Vec::with_capacity(rows.len());
        for (r, row) in rows.iter().enumerate() {
            let row = row
                .as_array()
                .ok_or_else(|| Error::RaggedPayoffs(format!("row {r} is not an array")))?;
            let mut parsed = Vec::with_capacity(row.len());
            for (c, entry) in row.iter().enumerate() {
                let entry = entry.as_array().filter(|e| e.len() == PLAYERS).ok_or_else(|| {
                    Error::RaggedPayoffs(format!("cell ({r}, {c}) must be a 2-element array"))
                })?;
                parsed.push([json_rational(&entry[0])?, json_rational(&entry[1])?]);
            }
            payoffs.push(parsed);
        }
        let name = obj
            .get("name")
            .and_then(Value::as_str)
            .unwrap_or("custom game")
            .to_string();
        Game::new(name, player_names, strategy_names, payoffs)
    }

    /// Serializes to the same JSON format `from_json_str` reads, with
    /// rationals written as strings.
    pub fn to_json_value(&self) -> Value {
        let players: Vec<Value> = (0..PLAYERS)
            .map(|i| {
                serde_json::json!({
                    "name": self.player_names[i],
                    "strategies": self.strategy_names[i],
                })
            })
            .collect();
        let payoffs: Vec<Value> = (0..self.rows())
            .map(|r| {
                (0..self.cols())
                    .map(|c| {
                        let p = self.cell(r, c);
                        serde_json::json!([p[0].to_string(), p[1].to_string()])
                    })
                    .collect()
            })
            .collect();
        serde_json::json!({ "name": self.name, "players": players, "payoffs": payoffs })
    }
}

fn json_rational(value: &Value) -> Result<Rational> {
    match value {
        Value::String(s) => ratio::parse_rational(s),
        // serde_json keeps the literal digits for integers; floats are read
        // through their decimal text so "0.1" stays 1/10.
        Value::Number(n) => ratio::parse_rational(&n.to_string()).or_else(|_| {
            n.as_f64()
                .and_then(ratio::from_f64)
                .ok_or_else(|| Error::InvalidRational(n.to_string()))
        }),
        other => Err(Error::InvalidRational(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::{frac, int};

    fn p(a: i64, b: i64) -> Payoff {
        [int(a), int(b)]
    }

    #[test]
    fn table_payoffs() {
        let pd = Game::prisoners_dilemma();
        assert_eq!(pd.payoff(PureProfile::new(1, 1)).unwrap(), &p(1, 1));
        let poker = Game::simplified_poker();
        assert_eq!(
            poker.payoff(PureProfile::new(0, 0)).unwrap(),
            &[frac(5, 4), frac(-5, 4)]
        );
        let chicken = Game::chicken();
        assert_eq!(chicken.payoff(PureProfile::new(0, 0)).unwrap(), &p(2, 2));
    }

    #[test]
    fn out_of_range_profile() {
        let pd = Game::prisoners_dilemma();
        assert_eq!(
            pd.payoff(PureProfile::new(2, 0)),
            Err(Error::InvalidProfile { player: 0, index: 2, count: 2 })
        );
        assert!(pd.is_nash(PureProfile::new(0, 5)).is_err());
        assert!(pd.best_replies(0, 2).is_err());
        assert!(pd.best_replies(2, 0).is_err());
    }

    #[test]
    fn best_replies_and_ties() {
        let pd = Game::prisoners_dilemma();
        assert_eq!(pd.best_replies(0, 0).unwrap(), vec![1]);
        let chicken = Game::chicken();
        assert_eq!(chicken.best_replies(0, 1).unwrap(), vec![0]);
        let flat = Game::from_table("flat", vec![vec![p(1, 1); 3]; 2]).unwrap();
        assert_eq!(flat.best_replies(0, 2).unwrap(), vec![0, 1]);
        assert_eq!(flat.best_replies(1, 0).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn nash_checks() {
        let pd = Game::prisoners_dilemma();
        let eq = pd.is_nash(PureProfile::new(1, 1)).unwrap();
        assert!(eq.is_nash);
        assert_eq!(eq.deviation_gains, p(0, 0));
        let coop = pd.is_nash(PureProfile::new(0, 0)).unwrap();
        assert!(!coop.is_nash);
        assert_eq!(coop.deviation_gains, p(2, 2));

        assert_eq!(pd.pure_nash_all(), vec![PureProfile::new(1, 1)]);
        assert_eq!(
            Game::chicken().pure_nash_all(),
            vec![PureProfile::new(0, 1), PureProfile::new(1, 0)]
        );
        assert!(Game::simplified_poker().pure_nash_all().is_empty());
    }

    #[test]
    fn dominance_relations() {
        let pd = Game::prisoners_dilemma();
        let strict = |a, b| Dominance { dominating: a, dominated: b, strict: true };
        assert_eq!(pd.dominance(0).unwrap(), vec![strict(1, 0)]);
        assert_eq!(pd.dominance(1).unwrap(), vec![strict(1, 0)]);
        assert!(Game::simplified_poker().dominance(0).unwrap().is_empty());

        let weak = Game::from_table("weak", vec![vec![p(1, 0), p(2, 0)], vec![p(1, 0), p(1, 0)]])
            .unwrap();
        assert_eq!(
            weak.dominance(0).unwrap(),
            vec![Dominance { dominating: 0, dominated: 1, strict: false }]
        );
    }

    #[test]
    fn json_roundtrip_and_errors() {
        let text = r#"{
            "players": [
                {"name": "I", "strategies": ["a", "b"]},
                {"name": "II", "strategies": ["x", "y"]}
            ],
            "payoffs": [[["5/4", "-5/4"], [0, 0]], [[0, 0.5], ["5/2", -2.5]]]
        }"#;
        let game = Game::from_json_str(text).unwrap();
        assert_eq!(game.payoff(PureProfile::new(0, 0)).unwrap()[0], frac(5, 4));
        assert_eq!(game.payoff(PureProfile::new(1, 0)).unwrap()[1], frac(1, 2));
        assert_eq!(game.payoff(PureProfile::new(1, 1)).unwrap()[1], frac(-5, 2));
        let again = Game::from_json_str(&game.to_json_value().to_string()).unwrap();
        assert_eq!(again.cells(), game.cells());

        let codes = |t: &str| Game::from_json_str(t).unwrap_err().code();
        assert_eq!(codes("{"), "malformed-json");
        assert_eq!(
            codes(r#"{"players": [{"name": "a", "strategies": ["x"]}], "payoffs": []}"#),
            "not-two-player"
        );
        let two = r#"[{"name": "a", "strategies": ["x", "y"]}, {"name": "b", "strategies": ["z"]}]"#;
        assert_eq!(
            codes(&format!(r#"{{"players": {two}, "payoffs": [[[1, 1]]]}}"#)),
            "ragged-payoffs"
        );
        assert_eq!(
            codes(&format!(r#"{{"players": {two}, "payoffs": [[["1/x", 1]], [[0, 0]]]}}"#)),
            "invalid-rational"
        );
    }
}
