//! Regret accounting for linear losses and the RescaledExp upper bound.

use crate::error::Result;
use crate::rescaled::psi_radius;
use crate::vector::GradVector;

/// Stores `sum_t <g_t, w_t>` and `sum_t g_t`, which is enough to evaluate
/// `R_T(u) = sum_t <g_t, w_t - u>` for any comparator after the fact.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretLedger {
    loss_dot_sum: f64,
    g_total: GradVector,
    t: u64,
}

impl RegretLedger {
    pub fn new(dim: usize) -> Self {
        RegretLedger {
            loss_dot_sum: 0.0,
            g_total: GradVector::zeros(dim),
            t: 0,
        }
    }

    /// Records the gradient `g` received after playing `w`.
    pub fn record(&mut self, g: &GradVector, w: &GradVector) -> Result<()> {
        g.check_dim(self.g_total.dim())?;
        w.check_dim(self.g_total.dim())?;
        self.loss_dot_sum += g.dot(w);
        self.g_total.add_assign(g);
        self.t += 1;
        Ok(())
    }

    pub fn regret(&self, u: &GradVector) -> Result<f64> {
        u.check_dim(self.g_total.dim())?;
        Ok(self.loss_dot_sum - self.g_total.dot(u))
    }

    pub fn loss_dot_sum(&self) -> f64 {
        self.loss_dot_sum
    }

    pub fn g_total(&self) -> &GradVector {
        &self.g_total
    }

    pub fn steps(&self) -> u64 {
        self.t
    }
}

/// Online statistics of a gradient stream, indexed from the first nonzero
/// gradient (leading zeros are dropped, later zeros still count as steps).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GradientStats {
    first_norm: Option<f64>,
    l_max: f64,
    sq_sum: f64,
    max_ratio: f64,
    horizon: u64,
}

impl GradientStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn observe(&mut self, g: &GradVector) {
        self.observe_norm(g.norm());
    }

    pub fn observe_norm(&mut self, norm: f64) {
        if self.first_norm.is_none() {
            if norm == 0.0 {
                return;
            }
            self.first_norm = Some(norm);
        } else if norm > 0.0 {
            // L(t) = max norm strictly before t; positive once started.
            self.max_ratio = self.max_ratio.max(norm / self.l_max);
        }
        self.l_max = self.l_max.max(norm);
        self.sq_sum += norm * norm;
        self.horizon += 1;
    }

    /// Norm of the first nonzero gradient, `L_1`.
    pub fn first_norm(&self) -> Option<f64> {
        self.first_norm
    }

    pub fn l_max(&self) -> f64 {
        self.l_max
    }

    pub fn sq_sum(&self) -> f64 {
        self.sq_sum
    }

    /// `max_t ||g_t|| / L(t)` over steps after the first nonzero gradient.
    pub fn max_ratio(&self) -> f64 {
        self.max_ratio
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }
}

/// Inputs of the RescaledExp regret bound other than the comparator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    pub l_max: f64,
    pub l_first: f64,
    pub m_max: f64,
    pub sq_sum: f64,
    pub max_ratio: f64,
    pub horizon: u64,
}

impl BoundInputs {
    /// Combines stream statistics with the optimizer's `M_max`.
    /// Returns `None` if the stream never produced a nonzero gradient.
    pub fn from_stats(stats: &GradientStats, m_max: f64) -> Option<Self> {
        Some(BoundInputs {
            l_max: stats.l_max(),
            l_first: stats.first_norm()?,
            m_max,
            sq_sum: stats.sq_sum(),
            max_ratio: stats.max_ratio(),
            horizon: stats.horizon(),
        })
    }

    /// `log2(L_max / L_1) + 1`, the epoch-count ceiling.
    pub fn epoch_factor(&self) -> f64 {
        (self.l_max / self.l_first).log2() + 1.0
    }
}

/// Upper bound on the regret of RescaledExp against a comparator of norm `u_norm`:
///
/// ```text
/// (2 psi(u) + 96) (log2(L_max/L_1) + 1) sqrt(M_max + sum ||g||^2)
///   + 8 L_max (log2(L_max/L_1) + 1) min(exp(8 r^2), exp(sqrt(T/2)))
/// ```
///
/// with `r = max_t ||g_t|| / L(t)`. May be `+inf` when both exponentials overflow.
pub fn rescaled_exp_regret_bound(u_norm: f64, inputs: &BoundInputs) -> Result<f64> {
    let psi_u = psi_radius(u_norm)?;
    let epochs = inputs.epoch_factor();
    let main = (2.0 * psi_u + 96.0) * epochs * (inputs.m_max + inputs.sq_sum).sqrt();
    let ratio_term = (8.0 * inputs.max_ratio * inputs.max_ratio).exp();
    let horizon_term = (inputs.horizon as f64 / 2.0).sqrt().exp();
    let penalty = 8.0 * inputs.l_max * epochs * ratio_term.min(horizon_term);
    Ok(main + penalty)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: f64) -> GradVector {
        GradVector::scalar(x).unwrap()
    }

    #[test]
    fn regret_arithmetic() {
        // loss_dot_sum = 5, g_total = 2 via two steps.
        let mut ledger = RegretLedger::new(1);
        ledger.record(&s(1.0), &s(3.0)).unwrap();
        ledger.record(&s(1.0), &s(2.0)).unwrap();
        assert_eq!(ledger.loss_dot_sum(), 5.0);
        assert_eq!(ledger.regret(&s(1.0)).unwrap(), 3.0);
        assert_eq!(ledger.regret(&s(0.0)).unwrap(), 5.0);
    }

    #[test]
    fn empty_ledger_has_zero_regret() {
        let ledger = RegretLedger::new(2);
        for u in [[0.0, 0.0], [5.0, -3.0], [1e6, 1e-6]] {
            let u = GradVector::new(u.to_vec()).unwrap();
            assert_eq!(ledger.regret(&u).unwrap(), 0.0);
        }
    }

    #[test]
    fn zero_gradients_leave_ledger_empty() {
        let mut ledger = RegretLedger::new(3);
        let w = GradVector::new(vec![1.0, 2.0, 3.0]).unwrap();
        for _ in 0..10 {
            ledger.record(&GradVector::zeros(3), &w).unwrap();
        }
        assert_eq!(ledger.loss_dot_sum(), 0.0);
        assert!(ledger.g_total().is_zero());
        assert_eq!(ledger.steps(), 10);
    }

    #[test]
    fn ledger_rejects_mismatched_comparator() {
        let ledger = RegretLedger::new(2);
        assert!(ledger.regret(&s(1.0)).is_err());
    }

    #[test]
    fn stats_skip_leading_zeros() {
        let mut st = GradientStats::new();
        for x in [0.0, 0.0, 1.0, 0.0, 3.0, 0.5] {
            st.observe(&s(x));
        }
        assert_eq!(st.first_norm(), Some(1.0));
        assert_eq!(st.l_max(), 3.0);
        assert_eq!(st.horizon(), 4);
        assert_eq!(st.max_ratio(), 3.0);
        assert_eq!(st.sq_sum(), 1.0 + 9.0 + 0.25);
    }

    #[test]
    fn single_epoch_zero_comparator_bound() {
        let inputs = BoundInputs {
            l_max: 2.0,
            l_first: 2.0,
            m_max: 5.0,
            sq_sum: 11.0,
            max_ratio: 1.0,
            horizon: 4,
        };
        let expected = 96.0 * 16f64.sqrt() + 8.0 * 2.0 * 8f64.exp().min(2f64.sqrt().exp());
        let got = rescaled_exp_regret_bound(0.0, &inputs).unwrap();
        assert!((got - expected).abs() < 1e-9 * expected);
    }
}
