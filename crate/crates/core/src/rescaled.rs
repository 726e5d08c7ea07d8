//! The RescaledExp optimizer.
//!
//! Within an epoch the learner runs FTRL with the regularizer
//! `psi(w) / eta_t`, where
//!
//! ```text
//! psi(w)   = (||w|| + 1) ln(||w|| + 1) - ||w||
//! 1 / eta_t = k * sqrt(2) * sqrt(M_t + sum ||g||^2)
//! M_t      = max(M_{t-1}, ||g_sum|| / p - sum ||g||^2),   p = 1 / L
//! ```
//!
//! and plays the closed-form minimizer
//! `w = -g_sum / ||g_sum|| * (exp(eta * ||g_sum||) - 1)`.
//!
//! The scale estimate `L` starts at the norm of the first nonzero gradient.
//! When a gradient with `||g_t|| > 2 L` arrives, `L` jumps to `||g_t||` and
//! FTRL restarts from scratch, either at the origin or (re-centered
//! variant) around the iterate played before the offending step.

use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::learner::OnlineLearner;
use crate::vector::GradVector;

/// Regularizer scale constant `k`.
pub const K: f64 = SQRT_2;

/// Largest FTRL exponent accepted before reporting overflow.
pub const EXP_LIMIT: f64 = 700.0;

/// `psi` as a function of the radius `r = ||w||`.
pub fn psi_radius(r: f64) -> Result<f64> {
    if !r.is_finite() || r < 0.0 {
        return Err(Error::InvalidInput(format!(
            "psi radius must be finite and >= 0, got {r}"
        )));
    }
    Ok(((r + 1.0) * r.ln_1p() - r).max(0.0))
}

pub fn psi(w: &GradVector) -> f64 {
    // GradVector entries are finite, so the norm is too.
    psi_radius(w.norm()).expect("finite norm")
}

/// Radius of the FTRL minimizer, `exp(eta * s) - 1`.
fn argmin_radius(eta: f64, sum_norm: f64, step: Option<u64>) -> Result<f64> {
    if sum_norm == 0.0 {
        return Ok(0.0);
    }
    let exponent = eta * sum_norm;
    if !(exponent <= EXP_LIMIT) {
        return Err(Error::Overflow {
            step,
            exponent,
            limit: EXP_LIMIT,
        });
    }
    Ok(exponent.exp_m1())
}

/// Minimizer of `psi(w) / eta + <g_sum, w>`. Zero when `g_sum` is zero.
pub fn ftrl_argmin(g_sum: &GradVector, eta: f64) -> Result<GradVector> {
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::InvalidInput(format!(
            "eta must be positive and finite, got {eta}"
        )));
    }
    let sum_norm = g_sum.norm();
    let radius = argmin_radius(eta, sum_norm, None)?;
    let mut w = GradVector::zeros(g_sum.dim());
    if sum_norm > 0.0 {
        let scale = -radius / sum_norm;
        for (wi, gi) in w.values_mut().iter_mut().zip(g_sum.iter()) {
            *wi = gi * scale;
        }
    }
    Ok(w)
}

/// Running sums for one epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochAccumulator {
    g_sum: GradVector,
    sq_sum: f64,
    m: f64,
    l_est: f64,
    p: f64,
    epoch_start: u64,
}

/// Accumulator values after absorbing one more gradient, not yet committed.
#[derive(Debug, Clone, Copy)]
struct Absorbed {
    sum_norm: f64,
    sq_sum: f64,
    m: f64,
}

impl EpochAccumulator {
    pub fn new(dim: usize, l_est: f64, epoch_start: u64) -> Result<Self> {
        if !(l_est > 0.0) || !l_est.is_finite() {
            return Err(Error::InvalidInput(format!(
                "scale estimate must be positive, got {l_est}"
            )));
        }
        Ok(EpochAccumulator {
            g_sum: GradVector::zeros(dim),
            sq_sum: 0.0,
            m: 0.0,
            l_est,
            p: 1.0 / l_est,
            epoch_start,
        })
    }

    pub fn g_sum(&self) -> &GradVector {
        &self.g_sum
    }

    pub fn sq_sum(&self) -> f64 {
        self.sq_sum
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn l_est(&self) -> f64 {
        self.l_est
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn epoch_start(&self) -> u64 {
        self.epoch_start
    }

    pub fn is_empty(&self) -> bool {
        self.sq_sum == 0.0
    }

    /// Current FTRL scale. Infinite for an empty epoch.
    pub fn eta(&self) -> f64 {
        eta_from(self.m, self.sq_sum)
    }

    fn preview(&self, g: &GradVector) -> Absorbed {
        let sum_norm = self
            .g_sum
            .iter()
            .zip(g.iter())
            .map(|(s, x)| (s + x) * (s + x))
            .sum::<f64>()
            .sqrt();
        let sq_sum = self.sq_sum + g.norm_sq();
        let m = self.m.max(sum_norm / self.p - sq_sum);
        Absorbed {
            sum_norm,
            sq_sum,
            m,
        }
    }

    fn commit(&mut self, g: &GradVector, next: Absorbed) {
        self.g_sum.add_assign(g);
        self.sq_sum = next.sq_sum;
        self.m = next.m;
    }

    /// Adds `g` to the epoch sums and updates `M`.
    pub fn absorb(&mut self, g: &GradVector) -> Result<()> {
        g.check_dim(self.g_sum.dim())?;
        let next = self.preview(g);
        self.commit(g, next);
        Ok(())
    }

    fn restart(&mut self, l_est: f64, epoch_start: u64) {
        self.g_sum.fill_zero();
        self.sq_sum = 0.0;
        self.m = 0.0;
        self.l_est = l_est;
        self.p = 1.0 / l_est;
        self.epoch_start = epoch_start;
    }
}

fn eta_from(m: f64, sq_sum: f64) -> f64 {
    1.0 / (K * SQRT_2 * (m + sq_sum).sqrt())
}

/// The RescaledExp state machine over dense vectors.
#[derive(Debug, Clone)]
pub struct RescaledExp {
    dim: usize,
    acc: Option<EpochAccumulator>,
    w: GradVector,
    /// Iterate played on the previous nonzero step.
    w_prev: GradVector,
    anchor: GradVector,
    recenter: bool,
    step_count: u64,
    epochs: usize,
    reset_steps: Vec<u64>,
    m_max: f64,
    last_eta: Option<f64>,
}

impl RescaledExp {
    pub fn new(dim: usize) -> Self {
        Self::with_recenter(dim, false)
    }

    /// Re-centered variant: each restart anchors FTRL at the iterate played
    /// one step before the gradient that triggered it.
    pub fn recentered(dim: usize) -> Self {
        Self::with_recenter(dim, true)
    }

    pub fn with_recenter(dim: usize, recenter: bool) -> Self {
        RescaledExp {
            dim,
            acc: None,
            w: GradVector::zeros(dim),
            w_prev: GradVector::zeros(dim),
            anchor: GradVector::zeros(dim),
            recenter,
            step_count: 0,
            epochs: 0,
            reset_steps: Vec::new(),
            m_max: 0.0,
            last_eta: None,
        }
    }

    pub fn is_started(&self) -> bool {
        self.acc.is_some()
    }

    pub fn is_recentered(&self) -> bool {
        self.recenter
    }

    pub fn accumulator(&self) -> Option<&EpochAccumulator> {
        self.acc.as_ref()
    }

    pub fn anchor(&self) -> &GradVector {
        &self.anchor
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    pub fn epoch_count(&self) -> usize {
        self.epochs
    }

    /// Steps (1-based) whose gradient triggered a restart.
    pub fn reset_steps(&self) -> &[u64] {
        &self.reset_steps
    }

    /// Largest `M_t` seen over all epochs.
    pub fn m_max(&self) -> f64 {
        self.m_max
    }

    /// `eta_t` computed on the most recent nonzero step, before any restart.
    pub fn last_eta(&self) -> Option<f64> {
        self.last_eta
    }

    pub fn step(&mut self, g: &GradVector) -> Result<&GradVector> {
        g.check_dim(self.dim)?;
        self.step_count += 1;
        let t = self.step_count;
        let g_norm = g.norm();
        if g_norm == 0.0 {
            return Ok(&self.w);
        }

        let fresh = self.acc.is_none();
        let mut acc = match self.acc.take() {
            Some(acc) => acc,
            None => EpochAccumulator::new(self.dim, g_norm, t)?,
        };
        let next = acc.preview(g);
        let eta = eta_from(next.m, next.sq_sum);
        let radius = match argmin_radius(eta, next.sum_norm, Some(t)) {
            Ok(r) => r,
            Err(e) => {
                // Leave the state as it was before this call.
                if !fresh {
                    self.acc = Some(acc);
                }
                self.step_count -= 1;
                return Err(e);
            }
        };
        if fresh {
            self.epochs = 1;
        }
        acc.commit(g, next);
        self.m_max = self.m_max.max(acc.m());
        self.last_eta = Some(eta);

        // w_prev <- w_t; self.w now holds w_{t-1}.
        std::mem::swap(&mut self.w, &mut self.w_prev);

        if g_norm > 2.0 * acc.l_est() {
            acc.restart(g_norm, t + 1);
            self.epochs += 1;
            self.reset_steps.push(t);
            if self.recenter {
                self.anchor.copy_from(&self.w);
            } else {
                self.w.fill_zero();
            }
        } else {
            let scale = if next.sum_norm > 0.0 {
                -radius / next.sum_norm
            } else {
                0.0
            };
            for ((wi, ai), si) in self
                .w
                .values_mut()
                .iter_mut()
                .zip(self.anchor.iter())
                .zip(acc.g_sum().iter())
            {
                *wi = ai + si * scale;
            }
        }
        self.acc = Some(acc);
        Ok(&self.w)
    }
}

impl OnlineLearner for RescaledExp {
    fn name(&self) -> &str {
        "rescaledexp"
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn iterate(&self) -> &GradVector {
        &self.w
    }

    fn step(&mut self, g: &GradVector) -> Result<&GradVector> {
        RescaledExp::step(self, g)
    }

    fn epochs(&self) -> Option<usize> {
        Some(self.epochs)
    }
}

/// One independent scalar RescaledExp per coordinate.
#[derive(Debug, Clone)]
pub struct CoordinateWise {
    coords: Vec<RescaledExp>,
    w: GradVector,
    scratch: GradVector,
}

impl CoordinateWise {
    pub fn new(dim: usize, recenter: bool) -> Self {
        CoordinateWise {
            coords: (0..dim)
                .map(|_| RescaledExp::with_recenter(1, recenter))
                .collect(),
            w: GradVector::zeros(dim),
            scratch: GradVector::zeros(1),
        }
    }

    pub fn coordinate(&self, i: usize) -> &RescaledExp {
        &self.coords[i]
    }

    pub fn step(&mut self, g: &GradVector) -> Result<&GradVector> {
        g.check_dim(self.coords.len())?;
        for (i, state) in self.coords.iter_mut().enumerate() {
            self.scratch.values_mut()[0] = g[i];
            let wi = state.step(&self.scratch)?[0];
            self.w.values_mut()[i] = wi;
        }
        Ok(&self.w)
    }

    /// Largest epoch count over the coordinates.
    pub fn max_epochs(&self) -> usize {
        self.coords
            .iter()
            .map(|c| c.epoch_count())
            .max()
            .unwrap_or(0)
    }
}

impl OnlineLearner for CoordinateWise {
    fn name(&self) -> &str {
        "rescaledexp"
    }

    fn dim(&self) -> usize {
        self.coords.len()
    }

    fn iterate(&self) -> &GradVector {
        &self.w
    }

    fn step(&mut self, g: &GradVector) -> Result<&GradVector> {
        CoordinateWise::step(self, g)
    }

    fn epochs(&self) -> Option<usize> {
        Some(self.max_epochs())
    }
}
