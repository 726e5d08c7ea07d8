//! The one-dimensional "checkmate" adversary behind the lower bound on
//! regret without a known gradient bound.
//!
//! While the learner stays below `threshold = ½ exp(√T / (4 ln2 · c))` the
//! adversary feeds `g = -1`. The first time the learner reaches the
//! threshold it receives `g = 2T`, and every later gradient is zero.
//! All logarithms are natural.

use std::f64::consts::LN_2;
use std::fmt;

use crate::error::{Error, Result};

/// Upper limit of the horizon scan in [`find_min_horizon`].
pub const SCAN_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdversaryParams {
    c: f64,
    k: f64,
    eps: f64,
    horizon: u64,
}

impl AdversaryParams {
    pub fn new(c: f64, k: f64, eps: f64, horizon: u64) -> Result<Self> {
        validate_constants(c, k, eps)?;
        if horizon == 0 {
            return Err(Error::InvalidInput("horizon must be at least 1".into()));
        }
        Ok(AdversaryParams { c, k, eps, horizon })
    }

    /// Parameters with the smallest horizon that satisfies both conditions.
    pub fn with_min_horizon(c: f64, k: f64, eps: f64) -> Result<Self> {
        let horizon = find_min_horizon(c, k, eps)?;
        Self::new(c, k, eps, horizon)
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    /// `√T / (4 ln2 · c)`, the exponent shared by the threshold and the conditions.
    fn growth_exponent(&self) -> f64 {
        (self.horizon as f64).sqrt() / (4.0 * LN_2 * self.c)
    }

    pub fn threshold(&self) -> f64 {
        0.5 * self.growth_exponent().exp()
    }

    /// Comparator used by the lower-bound argument in each case.
    pub fn comparator(&self, case: Case) -> f64 {
        match case {
            Case::StayedLow => self.growth_exponent().exp(),
            Case::Crossed => 0.0,
        }
    }
}

fn validate_constants(c: f64, k: f64, eps: f64) -> Result<()> {
    if !(c > 0.0 && c.is_finite()) || !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "adversary constants must be positive and finite (c={c}, k={k})"
        )));
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::InvalidInput(format!(
            "eps must lie in (0, 1/2), got {eps}"
        )));
    }
    Ok(())
}

/// `ln(e^a + e^b)` without overflow.
fn log_add_exp(a: f64, b: f64) -> f64 {
    let hi = a.max(b);
    let lo = a.min(b);
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// Both sides of the two horizon conditions, compared in log space so
/// that large horizons do not overflow.
fn condition_logs(p: &AdversaryParams) -> [(f64, f64); 2] {
    let t = p.horizon as f64;
    let a = p.growth_exponent();
    let b = (2.0 * t).powf(0.5 - p.eps);
    let ln_k = p.k.ln();
    // T/4 e^a > k ln2 √T + k e^b
    let first = (
        (t / 4.0).ln() + a,
        log_add_exp(ln_k + LN_2.ln() + 0.5 * t.ln(), ln_k + b),
    );
    // T/2 e^a > 2kT e^b + 2kT √T ln(2T+1)
    let ln_2kt = (2.0 * p.k * t).ln();
    let second = (
        (t / 2.0).ln() + a,
        log_add_exp(
            ln_2kt + b,
            ln_2kt + 0.5 * t.ln() + (2.0 * t + 1.0).ln().ln(),
        ),
    );
    [first, second]
}

pub fn first_condition_holds(p: &AdversaryParams) -> bool {
    let (lhs, rhs) = condition_logs(p)[0];
    lhs > rhs
}

pub fn second_condition_holds(p: &AdversaryParams) -> bool {
    let (lhs, rhs) = condition_logs(p)[1];
    lhs > rhs
}

pub fn conditions_hold(p: &AdversaryParams) -> bool {
    first_condition_holds(p) && second_condition_holds(p)
}

/// Smallest horizon `T >= 1` satisfying both conditions, by upward scan.
pub fn find_min_horizon(c: f64, k: f64, eps: f64) -> Result<u64> {
    validate_constants(c, k, eps)?;
    let mut p = AdversaryParams {
        c,
        k,
        eps,
        horizon: 1,
    };
    while p.horizon <= SCAN_CAP {
        if conditions_hold(&p) {
            return Ok(p.horizon);
        }
        p.horizon += 1;
    }
    Err(Error::Infeasible {
        c,
        k,
        eps,
        cap: SCAN_CAP,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Probing,
    Punished,
    Done,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    /// The learner never reached the threshold.
    StayedLow,
    /// The learner reached the threshold and was punished.
    Crossed,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Case::StayedLow => "stayed_low",
            Case::Crossed => "crossed",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Adversary {
    params: AdversaryParams,
    threshold: f64,
    phase: Phase,
}

impl Adversary {
    pub fn new(params: AdversaryParams) -> Self {
        Adversary {
            params,
            threshold: params.threshold(),
            phase: Phase::Probing,
        }
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn params(&self) -> &AdversaryParams {
        &self.params
    }

    /// Gradient answering the learner's iterate `w`.
    pub fn next(&mut self, w: f64) -> f64 {
        match self.phase {
            Phase::Probing if w < self.threshold => -1.0,
            Phase::Probing => {
                self.phase = Phase::Punished;
                2.0 * self.params.horizon as f64
            }
            Phase::Punished | Phase::Done => {
                self.phase = Phase::Done;
                0.0
            }
        }
    }

    pub fn case(&self) -> Case {
        match self.phase {
            Phase::Probing => Case::StayedLow,
            Phase::Punished | Phase::Done => Case::Crossed,
        }
    }
}

fn u_log_u(u: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        u * u.ln()
    }
}

/// Right-hand side of the lower bound,
/// `(k + c|u| ln|u|) L_max √T ln(L_max + 1) + k L_max exp((2T)^{1/2-eps})`.
pub fn lower_bound_value(p: &AdversaryParams, u: f64, l_max: f64) -> f64 {
    let t = p.horizon as f64;
    (p.k + p.c * u_log_u(u.abs())) * l_max * t.sqrt() * l_max.ln_1p()
        + p.k * l_max * (2.0 * t).powf(0.5 - p.eps).exp()
}

/// The weaker form of the bound with `(max_t ||g_t|| / L(t))^{1/2-eps}` in
/// the exponent. Never exceeds [`lower_bound_value`] when `max_ratio <= 2T`.
pub fn lower_bound_ratio_form(p: &AdversaryParams, u: f64, l_max: f64, max_ratio: f64) -> f64 {
    let t = p.horizon as f64;
    (p.k + p.c * u_log_u(u.abs())) * l_max * t.sqrt() * l_max.ln_1p()
        + p.k * l_max * max_ratio.powf(0.5 - p.eps).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conditions_at_sixteen() {
        let p = AdversaryParams::new(1.0, 1.0, 0.25, 16).unwrap();
        assert!(first_condition_holds(&p));
        assert!(!second_condition_holds(&p));
        assert!(!conditions_hold(&p));
    }

    #[test]
    fn conditions_fail_at_one() {
        let p = AdversaryParams::new(1.0, 1.0, 0.25, 1).unwrap();
        assert!(!conditions_hold(&p));
    }

    #[test]
    fn rejects_bad_eps() {
        assert!(AdversaryParams::new(1.0, 1.0, 0.6, 10).is_err());
        assert!(AdversaryParams::new(1.0, 1.0, 0.0, 10).is_err());
        assert!(find_min_horizon(1.0, 1.0, 0.5).is_err());
        assert!(find_min_horizon(-1.0, 1.0, 0.25).is_err());
    }

    #[test]
    fn threshold_at_sixteen() {
        let p = AdversaryParams::new(1.0, 1.0, 0.25, 16).unwrap();
        assert!((p.threshold() - 2.116_043_053_278_541).abs() < 1e-12);
    }

    #[test]
    fn adversary_phases() {
        let p = AdversaryParams::new(1.0, 1.0, 0.25, 16).unwrap();
        let mut adv = Adversary::new(p);
        assert_eq!(adv.next(0.0), -1.0);
        assert_eq!(adv.next(2.0), -1.0);
        assert_eq!(adv.phase(), Phase::Probing);
        assert_eq!(adv.next(3.0), 32.0);
        assert_eq!(adv.phase(), Phase::Punished);
        assert_eq!(adv.next(-100.0), 0.0);
        assert_eq!(adv.phase(), Phase::Done);
        assert_eq!(adv.next(1e9), 0.0);
        assert_eq!(adv.case(), Case::Crossed);
    }

    #[test]
    fn lower_bound_cases() {
        let p = AdversaryParams::new(1.0, 1.0, 0.25, 400).unwrap();
        let t: f64 = 400.0;
        let tail = (2.0 * t).powf(0.25).exp();
        // Crossed: u = 0, L_max = 2T.
        let l = 2.0 * t;
        let expected = l * t.sqrt() * (l + 1.0).ln() + l * tail;
        assert!((lower_bound_value(&p, 0.0, l) - expected).abs() < 1e-9 * expected);
        // Stayed low: L_max = 1.
        let u = p.comparator(Case::StayedLow);
        let expected = (1.0 + u * u.ln()) * t.sqrt() * LN_2 + tail;
        assert!((lower_bound_value(&p, u, 1.0) - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn log_add_exp_matches_direct() {
        for (a, b) in [(0.0, 0.0), (1.0, -3.0), (-20.0, 5.0)] {
            let direct = (f64::exp(a) + f64::exp(b)).ln();
            assert!((log_add_exp(a, b) - direct).abs() < 1e-12);
        }
    }
}
