//! Reference optimizers compared against RescaledExp.
//!
//! Every baseline starts at the origin and has one tuned hyperparameter,
//! `scale`, which multiplies its learning rate. All other constants are
//! fixed in [`BaselineConstants`]. With `g` the subgradient, `λ` the scale
//! and `ε = 1e-8`, the updates are (per coordinate unless noted):
//!
//! * **AdaGrad**: `G += g²`, `w -= λ g / (√G + ε)`.
//! * **Adam**: `m = β1 m + (1-β1) g`, `v = β2 v + (1-β2) g²`,
//!   `w -= λ m̂ / (√v̂ + ε)` with bias-corrected `m̂`, `v̂`; β1 = 0.9, β2 = 0.999.
//! * **AdaDelta**: `E[g²] = ρ E[g²] + (1-ρ) g²`,
//!   `Δ = -√(E[Δ²] + ε) / √(E[g²] + ε) · g`, `E[Δ²] = ρ E[Δ²] + (1-ρ) Δ²`,
//!   `w += λ Δ`; ρ = 0.95.
//! * **PiSTOL** (vector): `θ -= g`, `α += a L ||g||`,
//!   `w = λ θ / α · exp(||θ||² / (2α))` with `α₀ = a L`, a = 2.25, L = 1.
//!   Here `λ` plays the role of PiSTOL's `b`.
//! * **ScaleInvariant**: dual averaging with per-coordinate normalization,
//!   `θ -= g`, `G += g²`, `w = λ θ / (√G + ε)`. The update is unchanged
//!   when all gradients are multiplied by a positive constant.
//! * **SGD with decay**: `w -= λ γ^⌊t/s⌋ g` with γ = 0.95, s = 1000
//!   (staircase exponential decay).
//!
//! PiSTOL and ScaleInvariant are best-effort renderings of the cited
//! algorithms, not line-by-line ports.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::learner::OnlineLearner;
use crate::vector::GradVector;

/// Denominator stabilizer shared by all baselines.
pub const EPSILON: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BaselineKind {
    AdaGrad,
    Adam,
    AdaDelta,
    Pistol,
    ScaleInvariant,
    SgdDecay,
}

impl BaselineKind {
    pub const ALL: [BaselineKind; 6] = [
        BaselineKind::AdaGrad,
        BaselineKind::Adam,
        BaselineKind::AdaDelta,
        BaselineKind::Pistol,
        BaselineKind::ScaleInvariant,
        BaselineKind::SgdDecay,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BaselineKind::AdaGrad => "adagrad",
            BaselineKind::Adam => "adam",
            BaselineKind::AdaDelta => "adadelta",
            BaselineKind::Pistol => "pistol",
            BaselineKind::ScaleInvariant => "scale_invariant",
            BaselineKind::SgdDecay => "sgd_decay",
        }
    }

    pub fn is_per_coordinate(self) -> bool {
        !matches!(self, BaselineKind::Pistol)
    }
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BaselineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BaselineKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown baseline '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineConstants {
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adadelta_rho: f64,
    pub pistol_a: f64,
    pub pistol_lipschitz: f64,
    pub sgd_decay_rate: f64,
    pub sgd_decay_steps: u64,
}

impl Default for BaselineConstants {
    fn default() -> Self {
        BaselineConstants {
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adadelta_rho: 0.95,
            pistol_a: 2.25,
            pistol_lipschitz: 1.0,
            sgd_decay_rate: 0.95,
            sgd_decay_steps: 1000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineConfig {
    pub kind: BaselineKind,
    pub scale: f64,
    pub constants: BaselineConstants,
}

impl BaselineConfig {
    pub fn new(kind: BaselineKind, scale: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::InvalidInput(format!(
                "{kind} scale must be positive and finite, got {scale}"
            )));
        }
        Ok(BaselineConfig {
            kind,
            scale,
            constants: BaselineConstants::default(),
        })
    }
}

#[derive(Debug, Clone)]
enum State {
    AdaGrad {
        sq: Vec<f64>,
    },
    Adam {
        m: Vec<f64>,
        v: Vec<f64>,
        beta1_pow: f64,
        beta2_pow: f64,
    },
    AdaDelta {
        eg2: Vec<f64>,
        edx2: Vec<f64>,
    },
    Pistol {
        theta: Vec<f64>,
        alpha: f64,
    },
    ScaleInvariant {
        theta: Vec<f64>,
        sq: Vec<f64>,
    },
    SgdDecay,
}

#[derive(Debug, Clone)]
pub struct Baseline {
    config: BaselineConfig,
    w: GradVector,
    state: State,
    t: u64,
}

impl Baseline {
    pub fn new(config: BaselineConfig, dim: usize) -> Self {
        let c = &config.constants;
        let state = match config.kind {
            BaselineKind::AdaGrad => State::AdaGrad { sq: vec![0.0; dim] },
            BaselineKind::Adam => State::Adam {
                m: vec![0.0; dim],
                v: vec![0.0; dim],
                beta1_pow: 1.0,
                beta2_pow: 1.0,
            },
            BaselineKind::AdaDelta => State::AdaDelta {
                eg2: vec![0.0; dim],
                edx2: vec![0.0; dim],
            },
            BaselineKind::Pistol => State::Pistol {
                theta: vec![0.0; dim],
                alpha: c.pistol_a * c.pistol_lipschitz,
            },
            BaselineKind::ScaleInvariant => State::ScaleInvariant {
                theta: vec![0.0; dim],
                sq: vec![0.0; dim],
            },
            BaselineKind::SgdDecay => State::SgdDecay,
        };
        Baseline {
            config,
            w: GradVector::zeros(dim),
            state,
            t: 0,
        }
    }

    pub fn config(&self) -> &BaselineConfig {
        &self.config
    }

    pub fn step(&mut self, g: &GradVector) -> Result<&GradVector> {
        g.check_dim(self.w.dim())?;
        self.t += 1;
        let lr = self.config.scale;
        let c = self.config.constants;
        let gs = g.as_slice();
        let w = self.w.values_mut();
        match &mut self.state {
            State::AdaGrad { sq } => {
                for i in 0..gs.len() {
                    sq[i] += gs[i] * gs[i];
                    w[i] -= lr * gs[i] / (sq[i].sqrt() + EPSILON);
                }
            }
            State::Adam {
                m,
                v,
                beta1_pow,
                beta2_pow,
            } => {
                *beta1_pow *= c.adam_beta1;
                *beta2_pow *= c.adam_beta2;
                for i in 0..gs.len() {
                    m[i] = c.adam_beta1 * m[i] + (1.0 - c.adam_beta1) * gs[i];
                    v[i] = c.adam_beta2 * v[i] + (1.0 - c.adam_beta2) * gs[i] * gs[i];
                    let m_hat = m[i] / (1.0 - *beta1_pow);
                    let v_hat = v[i] / (1.0 - *beta2_pow);
                    w[i] -= lr * m_hat / (v_hat.sqrt() + EPSILON);
                }
            }
            State::AdaDelta { eg2, edx2 } => {
                let rho = c.adadelta_rho;
                for i in 0..gs.len() {
                    eg2[i] = rho * eg2[i] + (1.0 - rho) * gs[i] * gs[i];
                    let dx = -((edx2[i] + EPSILON).sqrt() / (eg2[i] + EPSILON).sqrt()) * gs[i];
                    edx2[i] = rho * edx2[i] + (1.0 - rho) * dx * dx;
                    w[i] += lr * dx;
                }
            }
            State::Pistol { theta, alpha } => {
                for (th, gi) in theta.iter_mut().zip(gs) {
                    *th -= gi;
                }
                *alpha += c.pistol_a * c.pistol_lipschitz * g.norm();
                let theta_sq: f64 = theta.iter().map(|x| x * x).sum();
                let factor = lr / *alpha * (theta_sq / (2.0 * *alpha)).exp();
                for (wi, th) in w.iter_mut().zip(theta.iter()) {
                    *wi = if *th == 0.0 { 0.0 } else { factor * th };
                }
            }
            State::ScaleInvariant { theta, sq } => {
                for i in 0..gs.len() {
                    theta[i] -= gs[i];
                    sq[i] += gs[i] * gs[i];
                    w[i] = lr * theta[i] / (sq[i].sqrt() + EPSILON);
                }
            }
            State::SgdDecay => {
                let rate = lr * c.sgd_decay_rate.powf((self.t / c.sgd_decay_steps) as f64);
                for i in 0..gs.len() {
                    w[i] -= rate * gs[i];
                }
            }
        }
        if !self.w.is_finite() {
            return Err(Error::Diverged {
                algorithm: self.config.kind.name().to_string(),
                step: self.t,
            });
        }
        Ok(&self.w)
    }
}

impl OnlineLearner for Baseline {
    fn name(&self) -> &str {
        self.config.kind.name()
    }

    fn dim(&self) -> usize {
        self.w.dim()
    }

    fn iterate(&self) -> &GradVector {
        &self.w
    }

    fn step(&mut self, g: &GradVector) -> Result<&GradVector> {
        Baseline::step(self, g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn learner(kind: BaselineKind, scale: f64, dim: usize) -> Baseline {
        Baseline::new(BaselineConfig::new(kind, scale).unwrap(), dim)
    }

    fn s(x: f64) -> GradVector {
        GradVector::scalar(x).unwrap()
    }

    #[test]
    fn adagrad_first_step() {
        // -1 * 2 / sqrt(4)
        let mut b = learner(BaselineKind::AdaGrad, 1.0, 1);
        let w = b.step(&s(2.0)).unwrap()[0];
        assert!((w + 1.0).abs() < 1e-8, "{w}");
    }

    #[test]
    fn adam_moves_against_constant_gradient() {
        // Hand trace: bias correction makes m_hat = v_hat = 1 for a constant
        // unit gradient, so each step moves by lr / (1 + eps).
        let mut b = learner(BaselineKind::Adam, 0.1, 1);
        let mut prev = 0.0;
        for t in 1..=3 {
            let w = b.step(&s(1.0)).unwrap()[0];
            assert!(w < prev);
            let expected = -0.1 * t as f64 / (1.0 + EPSILON);
            assert!((w - expected).abs() < 1e-12, "step {t}: {w} vs {expected}");
            prev = w;
        }
    }

    #[test]
    fn zero_stream_keeps_origin() {
        for kind in BaselineKind::ALL {
            let mut b = learner(kind, 0.5, 3);
            for _ in 0..20 {
                let w = b.step(&GradVector::zeros(3)).unwrap();
                assert!(w.is_zero(), "{kind} moved on zero gradients: {w:?}");
            }
        }
    }

    #[test]
    fn rejects_bad_scale_and_dimension() {
        assert!(BaselineConfig::new(BaselineKind::Adam, 0.0).is_err());
        assert!(BaselineConfig::new(BaselineKind::Adam, f64::NAN).is_err());
        let mut b = learner(BaselineKind::AdaGrad, 1.0, 2);
        assert!(b.step(&s(1.0)).is_err());
    }

    #[test]
    fn pistol_divergence_is_reported() {
        let mut b = learner(BaselineKind::Pistol, 1.0, 1);
        let err = (0..100_000)
            .map(|_| b.step(&s(-1.0)).map(|w| w[0]))
            .find_map(|r| r.err())
            .expect("pistol should overflow on a constant gradient");
        assert_eq!(err.kind(), "diverged");
    }

    #[test]
    fn sgd_decay_staircase() {
        let mut b = learner(BaselineKind::SgdDecay, 1.0, 1);
        for _ in 0..999 {
            b.step(&s(1.0)).unwrap();
        }
        let before = b.iterate()[0];
        let after = b.step(&s(1.0)).unwrap()[0];
        // Step 1000 is the first decayed one.
        assert!(((before - after) - 0.95).abs() < 1e-12);
    }

    #[test]
    fn names_round_trip() {
        for kind in BaselineKind::ALL {
            assert_eq!(kind.name().parse::<BaselineKind>().unwrap(), kind);
        }
        assert!("sgd".parse::<BaselineKind>().is_err());
    }
}
