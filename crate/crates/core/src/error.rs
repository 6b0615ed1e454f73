use thiserror::Error;

/// Errors raised while building or analyzing a game chain.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A payoff matrix was empty or had the wrong number of entries.
    #[error("payoff matrix must be a non-empty square matrix, got {entries} entries for dimension {dim}")]
    BadMatrixShape {
        /// Expected side length.
        dim: usize,
        /// Number of entries actually supplied.
        entries: usize,
    },
    /// A payoff entry was NaN or infinite.
    #[error("payoff entry ({row}, {col}) is not finite")]
    NonFinitePayoff {
        /// Row of the offending entry.
        row: usize,
        /// Column of the offending entry.
        col: usize,
    },
    /// A strategy refers to an action the base game does not have.
    #[error("strategy `{strategy}` uses action {action} but the game has {actions} actions")]
    ActionOutOfRange {
        /// Strategy label.
        strategy: alloc::string::String,
        /// Offending action.
        action: usize,
        /// Number of actions in the game.
        actions: usize,
    },
    /// A strategy's response table does not cover every opponent action.
    #[error("strategy `{strategy}` responds to {covered} actions, the game has {actions}")]
    IncompleteResponse {
        /// Strategy label.
        strategy: alloc::string::String,
        /// Size of the response table.
        covered: usize,
        /// Number of actions in the game.
        actions: usize,
    },
    /// Iterated play needs at least one round.
    #[error("number of rounds must be positive")]
    ZeroRounds,
    /// A meta-game needs at least one strategy.
    #[error("at least one strategy is required")]
    NoStrategies,
    /// Number of strategy labels does not match the matrix.
    #[error("{names} strategy names for a {dim}x{dim} payoff matrix")]
    NameCount {
        /// Number of names.
        names: usize,
        /// Matrix dimension.
        dim: usize,
    },
    /// The state space needs at least one player and one strategy.
    #[error("state space needs N >= 1 and M >= 1 (got N = {players}, M = {strategies})")]
    EmptySpace {
        /// Number of players.
        players: usize,
        /// Number of strategies.
        strategies: usize,
    },
    /// Logit noise must be strictly positive and finite.
    #[error("logit noise eta must be positive and finite, got {0}")]
    InvalidEta(f64),
    /// Two objects disagree on the number of strategies.
    #[error("dimension mismatch: expected {expected} strategies, found {found}")]
    DimensionMismatch {
        /// Expected count.
        expected: usize,
        /// Count found.
        found: usize,
    },
    /// A state vector is not a member of the state space.
    #[error("state is not in the state space")]
    StateNotInSpace,
    /// The transient block of the chain could not be factorized.
    #[error("singular transient block: pivot {pivot:e} at column {column}")]
    Singular {
        /// Magnitude of the rejected pivot.
        pivot: f64,
        /// Elimination step.
        column: usize,
    },
    /// The absorption system was solved with an unacceptable residual.
    #[error("absorption solve residual {0:e} exceeds tolerance")]
    Residual(f64),
}

/// Result alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;
