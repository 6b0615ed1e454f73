//! Config in, analyzed chain out.

use egt_core::chain::{
    build_transition_matrix, classify_states, ChainClassification, TransitionMatrix,
};
use egt_core::game::MetaGame;
use egt_core::population::StateSpace;
use egt_core::revision::Protocol;
use egt_core::solver::{absorption_probabilities, rgb_colors, AbsorptionResult, Rgb};

use crate::config::RunConfig;
use crate::Result;

/// A validated configuration with its meta-game and state space.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: RunConfig,
    pub meta: MetaGame,
    pub protocol: Protocol,
    pub space: StateSpace,
}

/// Transition matrix, classification, absorption probabilities and colors.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub transitions: TransitionMatrix,
    pub classification: ChainClassification,
    pub absorption: AbsorptionResult,
    pub colors: Vec<Rgb>,
}

impl Experiment {
    pub fn new(config: &RunConfig) -> Result<Self> {
        let meta = config.meta_game()?;
        let protocol = config.protocol()?;
        let space = config.state_space()?;
        Ok(Self {
            config: config.clone(),
            meta,
            protocol,
            space,
        })
    }

    pub fn transitions(&self) -> Result<TransitionMatrix> {
        Ok(build_transition_matrix(
            &self.space,
            &self.meta,
            &self.protocol,
        )?)
    }

    /// Builds the chain, classifies it and solves for absorption.
    pub fn analyze(&self) -> Result<Analysis> {
        let transitions = self.transitions()?;
        let classification = classify_states(&transitions);
        let absorption = absorption_probabilities(&transitions, &classification)?;
        let colors = rgb_colors(&absorption);
        Ok(Analysis {
            transitions,
            classification,
            absorption,
            colors,
        })
    }
}
