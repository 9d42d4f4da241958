use crate::grid::Ball;

/// Errors shared by every module of the laboratory.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("empty region: no grid node lies in the requested region")]
    EmptyRegion,

    #[error("scale below resolution: t = {t} is smaller than one grid cell ({cell})")]
    ScaleBelowResolution { t: f64, cell: f64 },

    #[error("negative argument: t = {0}")]
    NegativeArgument(f64),

    #[error("degenerate growth function: phi(x, t) = 0 for t = {t} > 0 at x = {x:?}")]
    DegenerateGrowth { x: [f64; 2], t: f64 },

    #[error("weight vanishes on ball {ball:?} at t = {t}")]
    WeightVanishesOnBall { ball: Ball, t: f64 },

    #[error("not of positive lower type: estimated i(phi) = {0}")]
    NotPositiveLowerType(f64),

    #[error("non-finite samples: index {index} holds {value}")]
    NonFiniteSamples { index: usize, value: f64 },

    #[error("not supported in ball: {excess} node(s) carry mass outside the declared ball")]
    NotSupportedInBall { excess: usize },

    #[error("degenerate ball: {0:?} contains no grid node")]
    DegenerateBall(Ball),

    #[error("degenerate weight on ball {ball:?}: Gram condition {condition:.3e} with residual {residual:.3e}")]
    DegenerateWeight {
        ball: Ball,
        condition: f64,
        residual: f64,
    },

    #[error("level set not compactly contained: {0} node(s) touch the box boundary layer")]
    LevelSetNotCompact(usize),

    #[error("dictionary smoothness below m(phi): dictionary m = {dict_m}, m(phi) = {m_phi}")]
    SmoothnessBelowRequired { dict_m: usize, m_phi: usize },

    #[error("not compactly supported inside the box margin: {0} offending node(s)")]
    NonCompactSupport(usize),

    #[error("truncation did not converge: remainder {remainder:.3e} > eps {eps:.3e} at K = {k_max}")]
    TruncationDidNotConverge {
        remainder: f64,
        eps: f64,
        k_max: usize,
    },

    #[error("corpus degenerate: every member has zero oscillation")]
    DegenerateCorpus,

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("bisection failed to bracket: {0}")]
    BracketFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
