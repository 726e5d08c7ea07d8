//! RescaledExp: parameter-free online linear optimization without a known
//! bound on the gradients, together with baseline optimizers, the matching
//! lower-bound adversary, hinge-loss classification plumbing and a one-pass
//! benchmark harness.
//!
//! ```
//! use rescaledexp::{GradVector, RescaledExp};
//!
//! let mut opt = RescaledExp::new(1);
//! let w = opt.step(&GradVector::scalar(1.0).unwrap()).unwrap();
//! assert!((w[0] + 0.5f64.exp_m1()).abs() < 1e-12);
//! ```

// Negated comparisons are used on purpose so that NaN falls into the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adversary;
pub mod baselines;
pub mod data;
pub mod error;
pub mod harness;
pub mod learner;
pub mod losses;
pub mod regret;
pub mod rescaled;
pub mod synthetic;
pub mod vector;
pub mod verify;

pub use baselines::{Baseline, BaselineConfig, BaselineKind};
pub use data::{DatasetHandle, LabelMap, Order, ParseError, ParseErrorKind};
pub use error::{Error, Result};
pub use learner::{OnlineLearner, ZeroPlayer};
pub use losses::{hinge_loss, hinge_subgradient, Label, SparseExample};
pub use regret::{rescaled_exp_regret_bound, BoundInputs, GradientStats, RegretLedger};
pub use rescaled::{ftrl_argmin, psi, CoordinateWise, EpochAccumulator, RescaledExp};
pub use vector::GradVector;
