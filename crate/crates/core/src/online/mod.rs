//! Stepsize learning as one-dimensional online convex optimization.
//!
//! Each round contributes a quadratic surrogate loss in the stepsize; an FTRL
//! learner with a quadratic regularizer centred at `1/M` and the indicator of
//! `[0, 2/M]` plays the next stepsize in closed form.

mod coord;
mod ftrl;
mod regret;
mod surrogate;

pub use coord::{coord_ftrl_stepsize, CoordFtrlState};
pub use ftrl::{ftrl_stepsize, FtrlState, DEFAULT_ALPHA};
pub use regret::{LedgerStep, RegretLedger};
pub use surrogate::{eval_surrogate, eval_surrogate_percoord, SurrogateForm, SurrogateLoss};
