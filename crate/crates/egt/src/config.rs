//! Run configuration: a JSON document whose keys mirror the command-line
//! flags. Flags given on the command line override the file.

use std::fmt;
use std::path::{Path, PathBuf};

use egt_core::game::{build_meta_game, direct_meta_game, BaseGame, MetaGame, StrategyAutomaton};
use egt_core::population::{enumerate_states, StateSpace, StateVector};
use egt_core::presets;
use egt_core::revision::Protocol;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Environment variable naming the default output root.
pub const OUT_DIR_ENV: &str = "EGT_OUT_DIR";

/// Built-in games.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GamePreset {
    /// Iterated Prisoner's Dilemma `[[a, 1], [4, 2]]`, `a = 3` by default.
    #[default]
    Ipd,
    /// Iterated Stag Hunt `[[a, 1], [8, 5]]`, `a = 10` by default.
    StagHunt,
    /// One-shot Rock-Paper-Scissors.
    Rps,
    /// Payoffs from the `payoff` key.
    Custom,
}

impl GamePreset {
    /// Parses `ipd`, `stag_hunt` (or `stag-hunt`, `sh`), `rps` or `custom`.
    pub fn parse(name: &str) -> Result<Self> {
        match name.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "ipd" | "pd" => Ok(GamePreset::Ipd),
            "stag_hunt" | "sh" | "ish" => Ok(GamePreset::StagHunt),
            "rps" => Ok(GamePreset::Rps),
            "custom" => Ok(GamePreset::Custom),
            other => Err(Error::Config(format!(
                "unknown game preset `{other}` (expected ipd, stag_hunt, rps or custom)"
            ))),
        }
    }

    /// Name used in file names and metadata.
    pub fn as_str(&self) -> &'static str {
        match self {
            GamePreset::Ipd => "ipd",
            GamePreset::StagHunt => "stag_hunt",
            GamePreset::Rps => "rps",
            GamePreset::Custom => "custom",
        }
    }
}

impl fmt::Display for GamePreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Parameter lists expanded by `sweep`; empty lists keep the base value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    pub a: Vec<f64>,
    pub players: Vec<usize>,
    pub protocol: Vec<String>,
    pub eta: Vec<f64>,
    pub rounds: Vec<u64>,
}

impl SweepSpec {
    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
            && self.players.is_empty()
            && self.protocol.is_empty()
            && self.eta.is_empty()
            && self.rounds.is_empty()
    }
}

/// Everything needed to build and analyze one chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub game: GamePreset,
    /// Override of the base game's upper-left payoff.
    pub a: Option<f64>,
    /// Base game (or direct meta-game) for `custom`.
    pub payoff: Option<Vec<Vec<f64>>>,
    /// Use `payoff` as the meta-game instead of iterating it.
    pub direct: bool,
    /// Strategy names for direct custom games.
    pub names: Option<Vec<String>>,
    pub strategies: Vec<String>,
    pub rounds: u64,
    pub players: usize,
    pub protocol: String,
    pub eta: Option<f64>,
    pub generations: usize,
    pub seed: u64,
    pub init: Option<Vec<usize>>,
    pub out: Option<PathBuf>,
    pub self_loops: bool,
    pub scale: f64,
    pub runs: Option<u64>,
    pub jobs: usize,
    pub sweep: SweepSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            game: GamePreset::Ipd,
            a: None,
            payoff: None,
            direct: false,
            names: None,
            strategies: vec!["allc".into(), "alld".into(), "tft".into()],
            rounds: presets::DEFAULT_ROUNDS,
            players: 3,
            protocol: "br".into(),
            eta: None,
            generations: 100,
            seed: 0,
            init: None,
            out: None,
            self_loops: false,
            scale: 1.0,
            runs: None,
            jobs: 1,
            sweep: SweepSpec::default(),
        }
    }
}

/// Looks up a built-in strategy by name.
pub fn strategy_by_name(name: &str) -> Result<StrategyAutomaton> {
    match name.trim().to_ascii_lowercase().as_str() {
        "allc" => Ok(StrategyAutomaton::all_c()),
        "alld" => Ok(StrategyAutomaton::all_d()),
        "tft" | "titfortat" | "tit_for_tat" => Ok(StrategyAutomaton::tit_for_tat()),
        other => Err(Error::Config(format!(
            "unknown strategy `{other}` (expected allc, alld or tft)"
        ))),
    }
}

impl RunConfig {
    /// Reads a JSON config file.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::ReadConfig {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| Error::ParseConfig {
            path: path.to_path_buf(),
            source,
        })
    }

    /// The revision protocol, validated.
    pub fn protocol(&self) -> Result<Protocol> {
        Protocol::parse(&self.protocol, self.eta)
            .map_err(|e| Error::Config(format!("protocol `{}`: {e}", self.protocol)))
    }

    /// Checks everything that can be checked without building the chain.
    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            return Err(Error::Config("rounds must be positive".into()));
        }
        if self.players == 0 {
            return Err(Error::Config("players must be positive".into()));
        }
        if let Some(eta) = self.eta {
            if !(eta.is_finite() && eta > 0.0) {
                return Err(Error::Config(format!("eta must be positive, got {eta}")));
            }
        }
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(Error::Config(format!(
                "scale must be positive, got {}",
                self.scale
            )));
        }
        self.protocol()?;
        match self.game {
            GamePreset::Ipd | GamePreset::StagHunt => {
                if self.strategies.len() != 3 {
                    return Err(Error::Config(format!(
                        "preset games need exactly 3 strategies, got {}",
                        self.strategies.len()
                    )));
                }
            }
            GamePreset::Rps => {
                if self.a.is_some() {
                    return Err(Error::Config("parameter `a` does not apply to rps".into()));
                }
            }
            GamePreset::Custom => {
                if self.payoff.is_none() {
                    return Err(Error::Config("custom game needs a `payoff` matrix".into()));
                }
            }
        }
        for name in &self.strategies {
            strategy_by_name(name)?;
        }
        Ok(())
    }

    /// Builds the meta-game `B`.
    pub fn meta_game(&self) -> Result<MetaGame> {
        self.validate()?;
        let strategies = || -> Result<Vec<StrategyAutomaton>> {
            self.strategies
                .iter()
                .map(|s| strategy_by_name(s))
                .collect()
        };
        let meta = match self.game {
            GamePreset::Ipd => build_meta_game(
                &presets::prisoners_dilemma(self.a.unwrap_or(3.0))?,
                &strategies()?,
                self.rounds,
            )?,
            GamePreset::StagHunt => build_meta_game(
                &presets::stag_hunt(self.a.unwrap_or(10.0))?,
                &strategies()?,
                self.rounds,
            )?,
            GamePreset::Rps => presets::rps()?,
            GamePreset::Custom => {
                let rows = self.payoff.as_deref().unwrap_or_default();
                let mut base = BaseGame::from_rows(rows)?;
                if let Some(a) = self.a {
                    let mut entries = base.entries().to_vec();
                    entries[0] = a;
                    base = BaseGame::new(base.actions(), entries)?;
                }
                if self.direct {
                    let names = self
                        .names
                        .clone()
                        .unwrap_or_else(|| (1..=base.actions()).map(|i| format!("s{i}")).collect());
                    direct_meta_game(base.entries().to_vec(), names)?
                } else {
                    build_meta_game(&base, &strategies()?, self.rounds)?
                }
            }
        };
        if meta.strategies() != 3 {
            return Err(Error::Config(format!(
                "the pipeline needs exactly 3 strategies, got {}",
                meta.strategies()
            )));
        }
        Ok(meta)
    }

    pub fn state_space(&self) -> Result<StateSpace> {
        Ok(enumerate_states(self.players, 3)?)
    }

    /// Initial state for trajectories: `init` if given, otherwise the most
    /// balanced composition with the remainder going to the first strategies.
    pub fn initial_state(&self) -> Result<StateVector> {
        match &self.init {
            Some(init) => {
                if init.len() != 3 || init.iter().sum::<usize>() != self.players {
                    return Err(Error::Config(format!(
                        "init {init:?} must have 3 entries summing to {}",
                        self.players
                    )));
                }
                Ok(StateVector::new(init.clone()))
            }
            None => {
                let n = self.players;
                let counts = (0..3).map(|m| n / 3 + usize::from(m < n % 3)).collect();
                Ok(StateVector::new(counts))
            }
        }
    }

    /// Short label such as `ipd_a3.2_N30_br`; sweeps drop the swept values
    /// and end in `_sweep_<keys>`, as in `ipd_N30_br_sweep_a`.
    pub fn label(&self) -> String {
        let s = &self.sweep;
        let mut label = self.game.to_string();
        if let Some(a) = self.a.filter(|_| s.a.is_empty()) {
            label.push_str(&format!("_a{a}"));
        }
        if s.players.is_empty() {
            label.push_str(&format!("_N{}", self.players));
        }
        if s.protocol.is_empty() {
            label.push_str(&format!("_{}", self.protocol.to_ascii_lowercase()));
        }
        if let Some(eta) = self.eta.filter(|_| s.eta.is_empty()) {
            if self.protocol.eq_ignore_ascii_case("logit") || !s.protocol.is_empty() {
                label.push_str(&format!("_eta{eta}"));
            }
        }
        if !s.is_empty() {
            label.push_str("_sweep");
            let keys = [
                ("a", s.a.is_empty()),
                ("N", s.players.is_empty()),
                ("protocol", s.protocol.is_empty()),
                ("eta", s.eta.is_empty()),
                ("T", s.rounds.is_empty()),
            ];
            for (key, _) in keys.iter().filter(|(_, empty)| !empty) {
                label.push('_');
                label.push_str(key);
            }
        }
        label
    }

    /// Output directory: `out` if set, else `$EGT_OUT_DIR/<label>` (default
    /// root `out`).
    pub fn output_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| {
            let root =
                std::env::var_os(OUT_DIR_ENV).map_or_else(|| PathBuf::from("out"), PathBuf::from);
            root.join(self.label())
        })
    }

    /// Every combination of the sweep lists, with a directory label per
    /// binding.
    pub fn expand_sweep(&self) -> Vec<(String, RunConfig)> {
        let s = &self.sweep;
        let a_values: Vec<Option<f64>> = if s.a.is_empty() {
            vec![self.a]
        } else {
            s.a.iter().map(|&a| Some(a)).collect()
        };
        let players = if s.players.is_empty() {
            vec![self.players]
        } else {
            s.players.clone()
        };
        let protocols = if s.protocol.is_empty() {
            vec![self.protocol.clone()]
        } else {
            s.protocol.clone()
        };
        let etas: Vec<Option<f64>> = if s.eta.is_empty() {
            vec![self.eta]
        } else {
            s.eta.iter().map(|&e| Some(e)).collect()
        };
        let rounds = if s.rounds.is_empty() {
            vec![self.rounds]
        } else {
            s.rounds.clone()
        };

        let mut out = Vec::new();
        for &a in &a_values {
            for &n in &players {
                for protocol in &protocols {
                    let is_logit = protocol.eq_ignore_ascii_case("logit");
                    // eta only varies for logit bindings
                    let eta_list: &[Option<f64>] = if is_logit { &etas } else { &etas[..1] };
                    for &eta in eta_list {
                        for &t in &rounds {
                            let mut cfg = self.clone();
                            cfg.sweep = SweepSpec::default();
                            cfg.a = a;
                            cfg.players = n;
                            cfg.protocol = protocol.clone();
                            cfg.eta = eta;
                            cfg.rounds = t;
                            cfg.out = None;
                            let mut parts = Vec::new();
                            if !s.a.is_empty() {
                                parts.push(format!("a={}", a.unwrap_or_default()));
                            }
                            if !s.players.is_empty() {
                                parts.push(format!("N={n}"));
                            }
                            if !s.protocol.is_empty() {
                                parts.push(protocol.to_ascii_lowercase());
                            }
                            if is_logit && !s.eta.is_empty() {
                                parts.push(format!("eta={}", eta.unwrap_or_default()));
                            }
                            if !s.rounds.is_empty() {
                                parts.push(format!("T={t}"));
                            }
                            if parts.is_empty() {
                                parts.push("run".into());
                            }
                            out.push((parts.join("_"), cfg));
                        }
                    }
                }
            }
        }
        out
    }
}

/// Parses `30`, `3..15` (inclusive) or `3,9,12`.
pub fn parse_player_list(text: &str) -> Result<Vec<usize>> {
    let bad = || Error::Config(format!("cannot parse player list `{text}`"));
    if let Some((lo, hi)) = text.split_once("..") {
        let lo: usize = lo.trim().parse().map_err(|_| bad())?;
        let hi: usize = hi
            .trim()
            .trim_start_matches('=')
            .parse()
            .map_err(|_| bad())?;
        if lo == 0 || lo > hi {
            return Err(bad());
        }
        return Ok((lo..=hi).collect());
    }
    text.split(',')
        .map(|v| {
            v.trim()
                .parse::<usize>()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(bad)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_build_the_prisoners_dilemma() {
        let cfg = RunConfig::default();
        let meta = cfg.meta_game().unwrap();
        assert_eq!(meta.payoff(1, 2), 2002.0);
        assert_eq!(cfg.protocol().unwrap(), Protocol::BestResponse);
    }

    #[test]
    fn validation_errors() {
        let mut cfg = RunConfig {
            rounds: 0,
            ..RunConfig::default()
        };
        assert!(cfg.validate().is_err());
        cfg.rounds = 10;
        cfg.protocol = "logit".into();
        assert!(cfg.validate().is_err());
        cfg.eta = Some(-1.0);
        assert!(cfg.validate().is_err());
        cfg.eta = Some(0.5);
        assert!(cfg.validate().is_ok());
        cfg.strategies.pop();
        assert!(cfg.validate().is_err());
        assert!(GamePreset::parse("chicken").is_err());
        let rps = RunConfig {
            game: GamePreset::Rps,
            a: Some(2.0),
            ..RunConfig::default()
        };
        assert!(rps.validate().is_err());
    }

    #[test]
    fn balanced_initial_state() {
        let cfg = RunConfig {
            players: 14,
            ..RunConfig::default()
        };
        assert_eq!(cfg.initial_state().unwrap().counts(), &[5, 5, 4]);
        let cfg = RunConfig {
            players: 3,
            init: Some(vec![1, 1, 2]),
            ..RunConfig::default()
        };
        assert!(cfg.initial_state().is_err());
    }

    #[test]
    fn player_lists() {
        assert_eq!(parse_player_list("3..6").unwrap(), vec![3, 4, 5, 6]);
        assert_eq!(parse_player_list("12,15,30").unwrap(), vec![12, 15, 30]);
        assert_eq!(parse_player_list("9").unwrap(), vec![9]);
        assert!(parse_player_list("0..3").is_err());
        assert!(parse_player_list("x").is_err());
    }

    #[test]
    fn sweep_expansion() {
        let mut cfg = RunConfig {
            players: 30,
            ..RunConfig::default()
        };
        cfg.sweep.a = vec![3.0, 3.2, 3.5, 3.8];
        let runs = cfg.expand_sweep();
        assert_eq!(runs.len(), 4);
        assert_eq!(runs[1].0, "a=3.2");
        assert_eq!(runs[1].1.a, Some(3.2));
        assert_eq!(cfg.label(), "ipd_N30_br_sweep_a");
        assert_eq!(runs[1].1.label(), "ipd_a3.2_N30_br");

        let mut cfg = RunConfig::default();
        cfg.sweep.protocol = vec!["br".into(), "logit".into()];
        cfg.sweep.eta = vec![0.1, 1.0];
        assert_eq!(cfg.label(), "ipd_N3_sweep_protocol_eta");
        let labels: Vec<String> = cfg.expand_sweep().into_iter().map(|(l, _)| l).collect();
        assert_eq!(labels, vec!["br", "logit_eta=0.1", "logit_eta=1"]);
    }

    #[test]
    fn config_file_keys() {
        let cfg: RunConfig = serde_json::from_str(
            r#"{"game": "stag_hunt", "a": 9, "players": 15, "sweep": {"a": [8.5, 9, 10, 11]}}"#,
        )
        .unwrap();
        assert_eq!(cfg.game, GamePreset::StagHunt);
        assert_eq!(cfg.sweep.a.len(), 4);
        assert!(serde_json::from_str::<RunConfig>(r#"{"gmae": "ipd"}"#).is_err());
    }
}
