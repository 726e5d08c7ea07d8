//! Executable acceptance checks, shared by the `acceptance` test target and
//! the `verify` CLI subcommand. Every check is deterministic (fixed seeds).

#[allow(clippy::approx_constant)]
pub mod corpus;
pub mod oracle;

use std::fmt;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::adversary::Case;
use crate::data::{parse_line, DatasetHandle, LabelMap};
use crate::error::{Error, Result};
use crate::harness::{
    aggregate, run_adversary, run_sweep, AdversaryLearner, Algorithm, RunSpec, SweepGrid,
};
use crate::learner::OnlineLearner;
use crate::losses::{hinge_loss, hinge_subgradient, Label, SparseExample};
use crate::regret::{rescaled_exp_regret_bound, BoundInputs, GradientStats, RegretLedger};
use crate::rescaled::{ftrl_argmin, CoordinateWise, RescaledExp, EXP_LIMIT};
use crate::synthetic::{generate, Flavor, SyntheticConfig};
use crate::vector::GradVector;

/// Minimal adversary horizon for `(c, k, eps) = (1, 1, 0.25)`, from an
/// independent high-precision scan.
pub const FROZEN_MIN_HORIZON: u64 = 400;

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Option<Duration>,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "{verdict} [{:>2}] {} ({:.2}s",
            self.id,
            self.name,
            self.elapsed.as_secs_f64()
        )?;
        if let Some(limit) = self.limit {
            write!(f, ", limit {}s", limit.as_secs())?;
        }
        write!(f, "): {}", self.detail)
    }
}

pub const CHECK_NAMES: [&str; 10] = [
    "ftrl argmin vs radial minimizer",
    "scale invariance",
    "regret upper bound",
    "epoch count",
    "diffbound inequalities",
    "iterate cap",
    "adversary lower bound",
    "hinge subgradient inequality",
    "synthetic benchmark pipeline",
    "libsvm parser corpus",
];

const LIMITS: [Option<u64>; 10] = [
    Some(5),
    Some(10),
    Some(30),
    None,
    Some(10),
    None,
    Some(5),
    None,
    Some(120),
    None,
];

fn timed(id: u8, body: impl FnOnce() -> (bool, String)) -> CheckOutcome {
    let start = Instant::now();
    let (ok, detail) = body();
    let elapsed = start.elapsed();
    let limit = LIMITS[id as usize - 1].map(Duration::from_secs);
    let in_time = limit.is_none_or(|l| elapsed <= l);
    let detail = if in_time {
        detail
    } else {
        format!("{detail}; runtime limit exceeded")
    };
    CheckOutcome {
        id,
        name: CHECK_NAMES[id as usize - 1],
        passed: ok && in_time,
        detail,
        elapsed,
        limit,
    }
}

fn rng(tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0xacce_0000 + tag)
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    10f64.powf(rng.gen_range(lo.log10()..=hi.log10()))
}

fn unit_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 && n <= 1.0 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Scalar gradients with occasional zeros, sign drift and magnitude jumps
/// that trigger epoch resets.
pub fn scalar_sequence(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let mut scale = log_uniform(rng, 1e-2, 1.0);
    let drift = if rng.gen_bool(0.5) { 0.3 } else { -0.3 };
    (0..len)
        .map(|_| {
            if rng.gen_bool(0.05) {
                return 0.0;
            }
            if rng.gen_bool(0.01) {
                scale *= rng.gen_range(2.5..10.0);
            }
            scale * (drift + rng.gen_range(-1.0..1.0))
        })
        .collect()
}

/// Vector gradients with `||g_t|| <= 1`: drifting, pure noise, or constant.
pub fn bounded_sequence(
    rng: &mut ChaCha8Rng,
    kind: usize,
    dim: usize,
    len: usize,
) -> Vec<GradVector> {
    let drift = unit_vector(rng, dim);
    let mut mag = log_uniform(rng, 1e-3, 1e-1);
    (0..len)
        .map(|_| {
            if rng.gen_bool(0.002) {
                mag = (mag * rng.gen_range(2.0..8.0)).min(1.0);
            }
            let v: Vec<f64> = match kind % 3 {
                0 => {
                    let noise = unit_vector(rng, dim);
                    let a = rng.gen_range(0.0..1.0);
                    drift
                        .iter()
                        .zip(&noise)
                        .map(|(d, n)| 0.5 * d + 0.5 * a * n)
                        .collect()
                }
                1 => unit_vector(rng, dim)
                    .into_iter()
                    .map(|x| x * rng.gen_range(0.0..1.0))
                    .collect(),
                _ => drift.iter().map(|d| -d).collect(),
            };
            GradVector::new(v.into_iter().map(|x| x * mag).collect()).expect("finite")
        })
        .collect()
}

fn scalar(x: f64) -> GradVector {
    GradVector::scalar(x).expect("finite")
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs())
}

/// `||w_t - anchor|| <= exp(sqrt(t / 2))` for the optimizer's current state.
pub fn iterate_cap_holds(opt: &RescaledExp) -> bool {
    let t = opt.step_count() as f64;
    opt.iterate().distance(opt.anchor()) <= (t / 2.0).sqrt().exp()
}

pub fn check_argmin() -> CheckOutcome {
    timed(1, || {
        let mut rng = rng(1);
        let mut worst = 0.0f64;
        let mut failures = 0;
        let mut overflow = 0;
        let mut floor_dominated = 0;
        for _ in 0..1000 {
            let dim = rng.gen_range(1..=5);
            let dir = unit_vector(&mut rng, dim);
            let s = log_uniform(&mut rng, 1e-3, 1e3);
            let eta = log_uniform(&mut rng, 1e-4, 10.0);
            let g = GradVector::new(dir.iter().map(|d| d * s).collect()).expect("finite");
            let s = g.norm();
            let oracle = oracle::radial_argmin(s, eta);
            match (ftrl_argmin(&g, eta), oracle) {
                // Beyond the exponent guard the optimizer reports overflow
                // instead of returning a huge or infinite iterate.
                (Err(Error::Overflow { .. }), _) if eta * s > EXP_LIMIT => overflow += 1,
                (Ok(w), Some(r)) => {
                    // The minimizer direction is -g / ||g||.
                    let expected: Vec<f64> = g.iter().map(|gi| -gi / s * r).collect();
                    let err = w
                        .iter()
                        .zip(&expected)
                        .fold(0.0f64, |acc, (a, b)| acc.hypot(a - b));
                    // 1e-6 absolute, or the f64 conditioning floor of exp at
                    // this exponent when the radius is too large for 1e-6.
                    let floor = 8.0 * f64::EPSILON * (1.0 + eta * s) * (1.0 + r);
                    if floor > 1e-6 {
                        floor_dominated += 1;
                    }
                    let tol = 1e-6f64.max(floor);
                    worst = worst.max(err / tol);
                    if err > tol {
                        failures += 1;
                    }
                }
                _ => failures += 1,
            }
        }
        (
            failures == 0,
            format!(
                "1000 pairs, {failures} mismatches, worst error/tolerance {worst:.3}, \
                 {overflow} beyond exp guard, {floor_dominated} at f64 precision floor"
            ),
        )
    })
}

pub fn check_scale_invariance() -> CheckOutcome {
    timed(2, || {
        let mut rng = rng(2);
        let mut worst = 0.0f64;
        let mut failures = 0;
        let mut resets = 0;
        for _ in 0..100 {
            let seq = scalar_sequence(&mut rng, 1000);
            let mut base = RescaledExp::new(1);
            let base_w: Vec<f64> = seq
                .iter()
                .map(|&g| base.step(&scalar(g)).expect("step")[0])
                .collect();
            resets += base.reset_steps().len();
            for lambda in [1e-3, 1.0, 1e3] {
                let mut scaled = RescaledExp::new(1);
                let mut bad = false;
                for (&g, &w) in seq.iter().zip(&base_w) {
                    let ws = scaled.step(&scalar(lambda * g)).expect("step")[0];
                    if w != ws {
                        worst = worst.max((w - ws).abs() / w.abs().max(ws.abs()));
                    }
                    bad |= !rel_close(w, ws, 1e-9);
                }
                bad |= scaled.reset_steps() != base.reset_steps();
                failures += bad as usize;
            }
        }
        (
            failures == 0,
            format!("300 runs, {failures} mismatching, worst relative gap {worst:.2e}, {resets} resets per λ"),
        )
    })
}

pub fn check_regret_bound() -> CheckOutcome {
    timed(3, || {
        let mut rng = rng(3);
        let mut violations = 0;
        let mut tightest = 0.0f64;
        let mut comparisons = 0;
        for i in 0..50 {
            let dim = 1 + i % 4;
            let seq = bounded_sequence(&mut rng, i, dim, 10_000);
            let mut opt = RescaledExp::new(dim);
            let mut ledger = RegretLedger::new(dim);
            let mut stats = GradientStats::new();
            for g in &seq {
                ledger.record(g, opt.iterate()).expect("dims");
                stats.observe(g);
                opt.step(g).expect("step");
            }
            let Some(inputs) = BoundInputs::from_stats(&stats, opt.m_max()) else {
                continue;
            };
            for axis in 0..dim {
                for u in [0.0, 1.0, -1.0, 10.0, -10.0, 100.0, -100.0] {
                    let comparator = GradVector::axis(dim, axis, u);
                    let regret = ledger.regret(&comparator).expect("dims");
                    let bound = rescaled_exp_regret_bound(u.abs(), &inputs).expect("finite");
                    comparisons += 1;
                    if regret > bound {
                        violations += 1;
                    }
                    tightest = tightest.max(regret / bound);
                }
            }
        }
        (
            violations == 0,
            format!("{comparisons} comparisons, {violations} violations, max regret/bound {tightest:.3e}"),
        )
    })
}

pub fn check_epoch_count() -> CheckOutcome {
    timed(4, || {
        let mut rng = rng(4);
        let mut violations = 0;
        let mut max_epochs = 0;
        for i in 0..10_000 {
            let dim = 1 + i % 3;
            let len = 40;
            let mut mags: Vec<f64> = (0..len).map(|_| log_uniform(&mut rng, 1e-3, 1e3)).collect();
            if i % 2 == 0 {
                mags.sort_by(f64::total_cmp);
            }
            let mut opt = RescaledExp::new(dim);
            let mut stats = GradientStats::new();
            for m in mags {
                let g = GradVector::new(
                    unit_vector(&mut rng, dim)
                        .into_iter()
                        .map(|x| x * m)
                        .collect(),
                )
                .expect("finite");
                stats.observe(&g);
                opt.step(&g).expect("step");
            }
            let first = stats.first_norm().expect("nonzero");
            let ceiling = (stats.l_max() / first).log2() + 1.0;
            max_epochs = max_epochs.max(opt.epoch_count());
            if opt.epoch_count() as f64 > ceiling {
                violations += 1;
            }
        }
        (
            violations == 0,
            format!("10000 sequences, {violations} violations, most epochs {max_epochs}"),
        )
    })
}

pub fn check_diffbound() -> CheckOutcome {
    timed(5, || {
        let mut rng = rng(5);
        let (mut same, mut opposite, mut violations) = (0usize, 0usize, 0usize);
        while same + opposite < 100_000 {
            let seq = scalar_sequence(&mut rng, 200);
            let mut opt = RescaledExp::new(1);
            for &g in &seq {
                let before = opt
                    .accumulator()
                    .filter(|a| !a.is_empty())
                    .map(|a| (a.eta(), a.g_sum()[0], a.l_est(), a.p()));
                let resets = opt.reset_steps().len();
                opt.step(&scalar(g)).expect("step");
                let Some((eta_prev, sum_prev, l, p)) = before else {
                    continue;
                };
                if g == 0.0 || sum_prev == 0.0 || opt.reset_steps().len() != resets {
                    continue;
                }
                let acc = opt.accumulator().expect("started");
                let (eta, sum) = (acc.eta(), acc.g_sum()[0]);
                let a = eta_prev * sum_prev.abs();
                let b = eta * sum.abs();
                let gap = (a - b).abs();
                // Rounding slack for the two products and the difference.
                let slack = 4.0 * f64::EPSILON * (a + b);
                let factor = if g.signum() == sum_prev.signum() {
                    same += 1;
                    1.0
                } else if g.abs() <= l {
                    opposite += 1;
                    1.0 + p * l / 2.0
                } else {
                    continue;
                };
                if gap > factor * eta * g.abs() + slack {
                    violations += 1;
                }
            }
        }
        (
            violations == 0,
            format!("{same} same-sign and {opposite} opposite-sign steps, {violations} violations"),
        )
    })
}

pub fn check_iterate_cap() -> CheckOutcome {
    timed(6, || {
        let mut rng = rng(6);
        let mut checked = 0u64;
        let mut violations = 0u64;
        let mut watch = |opt: &RescaledExp| {
            checked += 1;
            violations += !iterate_cap_holds(opt) as u64;
        };
        for recenter in [false, true] {
            for _ in 0..100 {
                let seq = scalar_sequence(&mut rng, 1000);
                let mut opt = RescaledExp::with_recenter(1, recenter);
                for g in seq {
                    opt.step(&scalar(g)).expect("step");
                    watch(&opt);
                }
            }
            for i in 0..12 {
                let dim = 1 + i % 4;
                let mut opt = RescaledExp::with_recenter(dim, recenter);
                for g in bounded_sequence(&mut rng, i, dim, 2000) {
                    opt.step(&g).expect("step");
                    watch(&opt);
                }
            }
            // Constant gradients drive the iterate outward as fast as possible.
            for c in [-1.0, 1.0, 1e-6, 1e6] {
                let mut opt = RescaledExp::with_recenter(1, recenter);
                for _ in 0..2000 {
                    opt.step(&scalar(c)).expect("step");
                    watch(&opt);
                }
            }
            let mut cw = CoordinateWise::new(3, recenter);
            for g in bounded_sequence(&mut rng, 0, 3, 2000) {
                cw.step(&g).expect("step");
                for i in 0..3 {
                    watch(cw.coordinate(i));
                }
            }
        }
        // The adversary episode, replayed on a bare optimizer.
        let params = crate::adversary::AdversaryParams::new(1.0, 1.0, 0.25, FROZEN_MIN_HORIZON)
            .expect("valid");
        let mut adv = crate::adversary::Adversary::new(params);
        let mut opt = RescaledExp::new(1);
        for _ in 0..params.horizon() {
            let g = adv.next(opt.iterate()[0]);
            opt.step(&scalar(g)).expect("step");
            watch(&opt);
        }
        (
            violations == 0,
            format!("{checked} iterates checked, {violations} violations"),
        )
    })
}

pub fn check_adversary() -> CheckOutcome {
    timed(7, || {
        match run_adversary(AdversaryLearner::RescaledExp, 1.0, 1.0, 0.25) {
            Ok(r) => {
                let ok =
                    r.params.horizon() == FROZEN_MIN_HORIZON && r.measured_regret >= r.lower_bound;
                let case = match r.case {
                    Case::StayedLow => "stayed low",
                    Case::Crossed => "crossed",
                };
                (
                    ok,
                    format!(
                        "T={} ({case}), regret {:.6e} vs lower bound {:.6e}, upper bound {}",
                        r.params.horizon(),
                        r.measured_regret,
                        r.lower_bound,
                        r.upper_bound.map_or("n/a".into(), |b| format!("{b:.6e}"))
                    ),
                )
            }
            Err(e) => (false, format!("error: {e}")),
        }
    })
}

pub fn check_hinge_subgradient() -> CheckOutcome {
    timed(8, || {
        let mut rng = rng(8);
        let mut violations = 0;
        let mut worst = f64::NEG_INFINITY;
        for i in 0..100_000 {
            let dim = rng.gen_range(1..=8);
            let mut features = Vec::new();
            for j in 1..=dim as u32 {
                if rng.gen_bool(0.6) {
                    features.push((j, rng.gen_range(-2.0..2.0)));
                }
            }
            let label = if rng.gen_bool(0.5) {
                Label::Positive
            } else {
                Label::Negative
            };
            let x = SparseExample::new(features, label).expect("valid");
            let mut w: Vec<f64> = (0..dim).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let norm_sq: f64 = x.features().iter().map(|(_, v)| v * v).sum();
            if i % 10 == 0 && norm_sq > 0.0 {
                // Put w at (or within rounding of) the kink.
                w = vec![0.0; dim];
                for &(j, v) in x.features() {
                    w[j as usize - 1] = label.sign() * v / norm_sq;
                }
            }
            let w = GradVector::new(w).expect("finite");
            let w2 = GradVector::new((0..dim).map(|_| rng.gen_range(-3.0..3.0)).collect())
                .expect("finite");
            let g = hinge_subgradient(&w, &x).expect("dims").to_dense(&x, dim);
            let lhs = hinge_loss(&w, &x).expect("dims")
                + g.iter()
                    .zip(w2.iter().zip(w.iter()))
                    .map(|(gi, (b, a))| gi * (b - a))
                    .sum::<f64>();
            let rhs = hinge_loss(&w2, &x).expect("dims");
            worst = worst.max(lhs - rhs);
            if lhs > rhs + 1e-12 {
                violations += 1;
            }
        }
        (
            violations == 0,
            format!("100000 triples, {violations} violations, max lhs-rhs {worst:.3e}"),
        )
    })
}

/// The two bundled synthetic datasets, read from `dir`.
pub fn bundled_datasets(dir: &Path) -> Result<Vec<DatasetHandle>> {
    Flavor::ALL
        .iter()
        .map(|f| DatasetHandle::open(dir.join(f.file_name())))
        .collect()
}

/// The same datasets, regenerated in memory.
pub fn generated_datasets() -> Result<Vec<DatasetHandle>> {
    Flavor::ALL
        .iter()
        .map(|&f| DatasetHandle::from_text(f.name(), generate(&SyntheticConfig::bundled(f))))
        .collect()
}

pub fn check_pipeline(datasets: &[DatasetHandle]) -> CheckOutcome {
    timed(9, || {
        let grid = SweepGrid::default();
        let mut reports = Vec::new();
        let mut count_ok = true;
        for ds in datasets {
            for alg in Algorithm::LINEUP {
                match run_sweep(ds, &RunSpec::new(alg), &grid) {
                    Ok(out) => {
                        let expected = if alg.is_tuned() { 15 } else { 1 };
                        count_ok &= out.reports.len() == expected;
                        reports.extend(out.reports);
                    }
                    Err(e) => return (false, format!("{alg} on {}: {e}", ds.name())),
                }
            }
        }
        let table = match aggregate(&reports) {
            Ok(t) => t,
            Err(e) => return (false, format!("aggregate: {e}")),
        };
        let mut ok = count_ok && !datasets.is_empty();
        let mut parts = Vec::new();
        for ds in datasets {
            let v = table
                .normalized(Algorithm::RescaledExp, ds.name())
                .unwrap_or(f64::INFINITY);
            ok &= v <= 1.5;
            parts.push(format!("{}={v:.4}", ds.name()));
        }
        let means: Vec<String> = table
            .means
            .iter()
            .map(|(a, m)| format!("{a} {m:.3}"))
            .collect();
        (
            ok,
            format!(
                "rescaledexp normalized {} ({} runs, counts {}); means: {}",
                parts.join(", "),
                reports.len(),
                if count_ok { "ok" } else { "wrong" },
                means.join(", ")
            ),
        )
    })
}

pub fn check_parser_corpus() -> CheckOutcome {
    timed(10, || {
        let sign = LabelMap::Sign;
        let mut problems = Vec::new();
        for (i, v) in corpus::VALID.iter().enumerate() {
            let line = i + 1;
            match parse_line(v.text, line, &sign) {
                Ok(ex) => {
                    if ex.label() != v.label || ex.features() != v.features {
                        problems.push(format!("valid #{line} parsed as {ex:?}"));
                    } else if parse_line(&ex.to_libsvm(), line, &sign).as_ref() != Ok(&ex) {
                        problems.push(format!("valid #{line} does not round-trip"));
                    }
                }
                Err(e) => problems.push(format!("valid #{line} rejected: {e}")),
            }
        }
        let valid_text: String = corpus::VALID
            .iter()
            .map(|v| format!("{}\n", v.text))
            .collect();
        match DatasetHandle::from_text_with("valid", valid_text, Some(LabelMap::Sign))
            .and_then(|d| d.load())
        {
            Ok(all) if all.len() == corpus::VALID.len() => {}
            Ok(all) => problems.push(format!("valid document yields {} examples", all.len())),
            Err(e) => problems.push(format!("valid document rejected: {e}")),
        }
        for (i, m) in corpus::MALFORMED.iter().enumerate() {
            let expected = (m.expected)();
            match parse_line(m.text, i + 1, &sign) {
                Err(e) if e.kind == expected && e.line == i + 1 => {}
                other => problems.push(format!("malformed #{} gave {other:?}", i + 1)),
            }
            // Embed after a comment line, a blank line and some valid lines.
            let lead = i % 7;
            let mut doc = String::from("# header\n\n");
            for v in &corpus::VALID[..lead] {
                doc.push_str(v.text);
                doc.push('\n');
            }
            doc.push_str(m.text);
            doc.push_str("\n+1 1:1\n");
            let want_line = 3 + lead;
            match DatasetHandle::from_text_with("doc", doc, Some(LabelMap::Sign)) {
                Err(Error::Parse(e)) if e.kind == expected && e.line == want_line => {}
                Err(e) => problems.push(format!("malformed #{} in document: {e}", i + 1)),
                Ok(_) => problems.push(format!("malformed #{} accepted in document", i + 1)),
            }
        }
        (
            problems.is_empty(),
            if problems.is_empty() {
                format!(
                    "{} valid and {} malformed lines as expected",
                    corpus::VALID.len(),
                    corpus::MALFORMED.len()
                )
            } else {
                problems.join("; ")
            },
        )
    })
}

/// Runs all ten checks in order.
pub fn run_all(datasets: &[DatasetHandle]) -> Vec<CheckOutcome> {
    vec![
        check_argmin(),
        check_scale_invariance(),
        check_regret_bound(),
        check_epoch_count(),
        check_diffbound(),
        check_iterate_cap(),
        check_adversary(),
        check_hinge_subgradient(),
        check_pipeline(datasets),
        check_parser_corpus(),
    ]
}
