//! One-pass benchmark driver: single runs, hyperparameter sweeps,
//! normalized-loss aggregation, adversary episodes and CSV reports.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::adversary::{lower_bound_value, Adversary, AdversaryParams, Case};
use crate::baselines::{Baseline, BaselineConfig, BaselineKind};
use crate::data::{DatasetHandle, Order};
use crate::error::{Error, Result};
use crate::learner::{OnlineLearner, ZeroPlayer};
use crate::losses::{hinge_eval, HingeGradient};
use crate::regret::{rescaled_exp_regret_bound, BoundInputs, GradientStats, RegretLedger};
use crate::rescaled::{CoordinateWise, RescaledExp};
use crate::vector::GradVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    RescaledExp,
    Baseline(BaselineKind),
}

impl Algorithm {
    /// The algorithms of the linear-classification comparison.
    pub const LINEUP: [Algorithm; 6] = [
        Algorithm::Baseline(BaselineKind::AdaGrad),
        Algorithm::RescaledExp,
        Algorithm::Baseline(BaselineKind::AdaDelta),
        Algorithm::Baseline(BaselineKind::ScaleInvariant),
        Algorithm::Baseline(BaselineKind::Adam),
        Algorithm::Baseline(BaselineKind::Pistol),
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::RescaledExp => "rescaledexp",
            Algorithm::Baseline(k) => k.name(),
        }
    }

    pub fn is_tuned(self) -> bool {
        matches!(self, Algorithm::Baseline(_))
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "rescaledexp" {
            Ok(Algorithm::RescaledExp)
        } else {
            s.parse().map(Algorithm::Baseline)
        }
    }
}

/// Everything that determines a single run besides the dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSpec {
    pub algorithm: Algorithm,
    pub hyperparameter: Option<f64>,
    pub coordinate_wise: bool,
    pub recenter: bool,
    pub seed: u64,
    pub order: Order,
}

impl RunSpec {
    pub fn new(algorithm: Algorithm) -> Self {
        RunSpec {
            algorithm,
            hyperparameter: None,
            coordinate_wise: true,
            recenter: false,
            seed: 0,
            order: Order::FileOrder,
        }
    }

    pub fn with_hyperparameter(mut self, value: f64) -> Self {
        self.hyperparameter = Some(value);
        self
    }

    pub fn variant(&self) -> String {
        match self.algorithm {
            Algorithm::RescaledExp => {
                let base = if self.coordinate_wise {
                    "coordinate"
                } else {
                    "vector"
                };
                if self.recenter {
                    format!("{base}-recentered")
                } else {
                    base.to_string()
                }
            }
            Algorithm::Baseline(_) => "standard".to_string(),
        }
    }
}

pub fn build_learner(spec: &RunSpec, dim: usize) -> Result<Box<dyn OnlineLearner>> {
    match spec.algorithm {
        Algorithm::RescaledExp => {
            if let Some(h) = spec.hyperparameter {
                return Err(Error::InvalidInput(format!(
                    "rescaledexp takes no hyperparameter (got {h})"
                )));
            }
            if spec.coordinate_wise {
                Ok(Box::new(CoordinateWise::new(dim, spec.recenter)))
            } else {
                Ok(Box::new(RescaledExp::with_recenter(dim, spec.recenter)))
            }
        }
        Algorithm::Baseline(kind) => {
            let scale = spec.hyperparameter.ok_or_else(|| {
                Error::InvalidInput(format!("{kind} needs a hyperparameter value"))
            })?;
            Ok(Box::new(Baseline::new(
                BaselineConfig::new(kind, scale)?,
                dim,
            )))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub algorithm: Algorithm,
    pub variant: String,
    pub hyperparameter: Option<f64>,
    pub dataset: String,
    pub seed: u64,
    pub ordering: String,
    pub n_examples: u64,
    /// Mean hinge loss over the pass; `+inf` if the learner diverged.
    pub average_loss: f64,
    pub epochs_used: Option<usize>,
    pub wall_time_ms: Option<f64>,
}

impl RunReport {
    /// Equality ignoring the wall-clock column.
    pub fn same_outcome(&self, other: &RunReport) -> bool {
        let mut a = self.clone();
        a.wall_time_ms = other.wall_time_ms;
        &a == other
    }
}

/// One pass over the dataset: predict at the current iterate, record the
/// hinge loss, feed its subgradient to the learner.
pub fn run_once(dataset: &DatasetHandle, spec: &RunSpec) -> Result<RunReport> {
    let started = Instant::now();
    let dim = dataset.dimension().max(1);
    let mut learner = build_learner(spec, dim)?;
    let mut grad = GradVector::zeros(dim);
    let mut total = 0.0;
    let mut n = 0u64;
    let mut diverged = false;
    for example in dataset.stream(spec.order)? {
        let x = example?;
        let (loss, sub) = hinge_eval(learner.iterate(), &x)?;
        total += loss;
        n += 1;
        sub.scatter(&x, &mut grad);
        let stepped = learner.step(&grad).map(|_| ());
        HingeGradient::clear(&x, &mut grad);
        match stepped {
            Ok(()) => {}
            Err(Error::Diverged { .. }) => {
                diverged = true;
                break;
            }
            Err(e) => return Err(e),
        }
    }
    if n == 0 {
        return Err(Error::InvalidInput(format!(
            "dataset '{}' has no examples",
            dataset.name()
        )));
    }
    let average_loss = if diverged {
        f64::INFINITY
    } else {
        total / n as f64
    };
    Ok(RunReport {
        algorithm: spec.algorithm,
        variant: spec.variant(),
        hyperparameter: spec.hyperparameter,
        dataset: dataset.name().to_string(),
        seed: spec.seed,
        ordering: spec.order.to_string(),
        n_examples: dataset.n_examples() as u64,
        average_loss,
        epochs_used: learner.epochs(),
        wall_time_ms: Some(started.elapsed().as_secs_f64() * 1e3),
    })
}

/// Two-step hyperparameter grid: powers of ten, then multiples of the best.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub coarse: Vec<f64>,
    pub refine_betas: Vec<f64>,
}

impl Default for SweepGrid {
    fn default() -> Self {
        SweepGrid {
            coarse: (-5..=2)
                .map(|i| format!("1e{i}").parse().expect("literal"))
                .collect(),
            refine_betas: vec![0.2, 0.4, 0.8, 2.0, 4.0, 6.0, 8.0],
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub best: RunReport,
    pub reports: Vec<RunReport>,
}

/// Index of the lowest finite loss; ties go to the smaller hyperparameter.
fn best_index(reports: &[RunReport]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, r) in reports.iter().enumerate() {
        if !r.average_loss.is_finite() {
            continue;
        }
        best = match best {
            None => Some(i),
            Some(b) => {
                let cur = &reports[b];
                let better = r.average_loss < cur.average_loss
                    || (r.average_loss == cur.average_loss
                        && r.hyperparameter < cur.hyperparameter);
                Some(if better { i } else { b })
            }
        };
    }
    best
}

fn run_grid(dataset: &DatasetHandle, base: &RunSpec, values: &[f64]) -> Result<Vec<RunReport>> {
    values
        .par_iter()
        .map(|&h| run_once(dataset, &base.with_hyperparameter(h)))
        .collect()
}

/// Tunes a baseline over the grid (8 coarse + 7 refinement runs), or runs
/// RescaledExp exactly once.
pub fn run_sweep(
    dataset: &DatasetHandle,
    base: &RunSpec,
    grid: &SweepGrid,
) -> Result<SweepOutcome> {
    if !base.algorithm.is_tuned() {
        let report = run_once(
            dataset,
            &RunSpec {
                hyperparameter: None,
                ..*base
            },
        )?;
        return Ok(SweepOutcome {
            best: report.clone(),
            reports: vec![report],
        });
    }
    let mut reports = run_grid(dataset, base, &grid.coarse)?;
    // With every coarse run diverged, refine around the most conservative value.
    let center = match best_index(&reports) {
        Some(i) => reports[i].hyperparameter.expect("tuned run"),
        None => grid.coarse.iter().copied().fold(f64::INFINITY, f64::min),
    };
    let refine: Vec<f64> = grid.refine_betas.iter().map(|b| b * center).collect();
    reports.extend(run_grid(dataset, base, &refine)?);
    let best = best_index(&reports).ok_or_else(|| {
        Error::Sweep(format!(
            "all {} runs of {} on '{}' diverged",
            reports.len(),
            base.algorithm,
            dataset.name()
        ))
    })?;
    Ok(SweepOutcome {
        best: reports[best].clone(),
        reports,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedEntry {
    pub algorithm: Algorithm,
    pub dataset: String,
    pub best_hyperparameter: Option<f64>,
    pub best_loss: f64,
    pub normalized: f64,
}

/// Best-setting loss of each algorithm divided by the lowest loss any
/// algorithm reached on the same dataset, plus per-algorithm means.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedTable {
    pub entries: Vec<NormalizedEntry>,
    pub means: Vec<(Algorithm, f64)>,
}

impl NormalizedTable {
    pub fn normalized(&self, algorithm: Algorithm, dataset: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.algorithm == algorithm && e.dataset == dataset)
            .map(|e| e.normalized)
    }

    pub fn mean(&self, algorithm: Algorithm) -> Option<f64> {
        self.means
            .iter()
            .find(|(a, _)| *a == algorithm)
            .map(|(_, m)| *m)
    }

    pub fn datasets(&self) -> BTreeSet<&str> {
        self.entries.iter().map(|e| e.dataset.as_str()).collect()
    }
}

pub fn aggregate(reports: &[RunReport]) -> Result<NormalizedTable> {
    if reports.is_empty() {
        return Err(Error::Aggregate("no reports".into()));
    }
    let algorithms: BTreeSet<Algorithm> = reports.iter().map(|r| r.algorithm).collect();
    let datasets: BTreeSet<&str> = reports.iter().map(|r| r.dataset.as_str()).collect();
    let mut best: BTreeMap<(&str, Algorithm), &RunReport> = BTreeMap::new();
    for r in reports.iter().filter(|r| r.average_loss.is_finite()) {
        let slot = best.entry((r.dataset.as_str(), r.algorithm)).or_insert(r);
        if r.average_loss < slot.average_loss
            || (r.average_loss == slot.average_loss && r.hyperparameter < slot.hyperparameter)
        {
            *slot = r;
        }
    }
    let mut entries = Vec::new();
    for &ds in &datasets {
        let mut row = Vec::new();
        for &alg in &algorithms {
            let r = best
                .get(&(ds, alg))
                .ok_or_else(|| Error::Aggregate(format!("no finite result for {alg} on '{ds}'")))?;
            row.push(*r);
        }
        let floor = row
            .iter()
            .map(|r| r.average_loss)
            .fold(f64::INFINITY, f64::min);
        if !(floor > 0.0) {
            return Err(Error::Aggregate(format!(
                "lowest loss on '{ds}' is {floor}; cannot normalize"
            )));
        }
        entries.extend(row.into_iter().map(|r| NormalizedEntry {
            algorithm: r.algorithm,
            dataset: ds.to_string(),
            best_hyperparameter: r.hyperparameter,
            best_loss: r.average_loss,
            normalized: r.average_loss / floor,
        }));
    }
    let means = algorithms
        .iter()
        .map(|&alg| {
            let vals: Vec<f64> = entries
                .iter()
                .filter(|e| e.algorithm == alg)
                .map(|e| e.normalized)
                .collect();
            (alg, vals.iter().sum::<f64>() / vals.len() as f64)
        })
        .collect();
    Ok(NormalizedTable { entries, means })
}

/// Which learner to put in front of the adversary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AdversaryLearner {
    RescaledExp,
    Baseline { kind: BaselineKind, scale: f64 },
    Zero,
}

impl AdversaryLearner {
    pub fn name(&self) -> String {
        match self {
            AdversaryLearner::RescaledExp => "rescaledexp".into(),
            AdversaryLearner::Baseline { kind, .. } => kind.name().into(),
            AdversaryLearner::Zero => "zero".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdversaryReport {
    pub learner: String,
    pub params: AdversaryParams,
    pub case: Case,
    pub comparator: f64,
    pub measured_regret: f64,
    pub lower_bound: f64,
    /// RescaledExp's own regret upper bound; only computed for that learner.
    pub upper_bound: Option<f64>,
    pub l_max: f64,
    pub max_ratio: f64,
    pub crossed_at: Option<u64>,
}

/// Plays a full episode against the adversary at its minimal horizon.
pub fn run_adversary(
    learner: AdversaryLearner,
    c: f64,
    k: f64,
    eps: f64,
) -> Result<AdversaryReport> {
    let params = AdversaryParams::with_min_horizon(c, k, eps)?;
    run_adversary_with(learner, params)
}

pub fn run_adversary_with(
    choice: AdversaryLearner,
    params: AdversaryParams,
) -> Result<AdversaryReport> {
    match choice {
        AdversaryLearner::RescaledExp => {
            let mut learner = RescaledExp::new(1);
            let mut report = play_episode(&mut learner, &choice, params)?;
            let stats = report_stats(&report);
            if let Some(inputs) = BoundInputs::from_stats(&stats, learner.m_max()) {
                report.upper_bound =
                    Some(rescaled_exp_regret_bound(report.comparator.abs(), &inputs)?);
            }
            Ok(report)
        }
        AdversaryLearner::Baseline { kind, scale } => {
            let mut learner = Baseline::new(BaselineConfig::new(kind, scale)?, 1);
            play_episode(&mut learner, &choice, params)
        }
        AdversaryLearner::Zero => play_episode(&mut ZeroPlayer::new(1), &choice, params),
    }
}

/// Gradient statistics are fully determined by the episode outcome, so
/// they are rebuilt from the report rather than stored twice.
fn report_stats(report: &AdversaryReport) -> GradientStats {
    let mut stats = GradientStats::new();
    let t = report.params.horizon();
    let probes = report.crossed_at.map_or(t, |c| c - 1);
    for _ in 0..probes {
        stats.observe_norm(1.0);
    }
    if report.crossed_at.is_some() {
        stats.observe_norm(2.0 * t as f64);
        for _ in probes + 1..t {
            stats.observe_norm(0.0);
        }
    }
    stats
}

fn play_episode(
    learner: &mut dyn OnlineLearner,
    choice: &AdversaryLearner,
    params: AdversaryParams,
) -> Result<AdversaryReport> {
    let mut adversary = Adversary::new(params);
    let mut ledger = RegretLedger::new(1);
    let mut stats = GradientStats::new();
    let mut crossed_at = None;
    let mut g = GradVector::zeros(1);
    for t in 1..=params.horizon() {
        let w = learner.iterate()[0];
        let gt = adversary.next(w);
        if gt > 0.0 && crossed_at.is_none() {
            crossed_at = Some(t);
        }
        g.values_mut()[0] = gt;
        ledger.record(&g, learner.iterate())?;
        stats.observe(&g);
        learner.step(&g)?;
    }
    let case = adversary.case();
    let comparator = params.comparator(case);
    let measured_regret = ledger.regret(&GradVector::scalar(comparator)?)?;
    let l_max = stats.l_max();
    Ok(AdversaryReport {
        learner: choice.name(),
        params,
        case,
        comparator,
        measured_regret,
        lower_bound: lower_bound_value(&params, comparator, l_max),
        upper_bound: None,
        l_max,
        max_ratio: stats.max_ratio(),
        crossed_at,
    })
}

fn fmt_opt<T: fmt::Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

pub const REPORT_COLUMNS: [&str; 10] = [
    "algorithm",
    "variant",
    "hyperparameter",
    "dataset",
    "seed",
    "ordering",
    "n_examples",
    "average_loss",
    "epochs_used",
    "wall_time_ms",
];

/// Writes run reports with a header row. With `timing = false` the
/// wall-clock column is left empty so identical inputs give identical bytes.
pub fn write_reports<W: Write>(out: W, reports: &[RunReport], timing: bool) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(REPORT_COLUMNS)?;
    for r in reports {
        let wall = if timing {
            r.wall_time_ms
                .map(|ms| format!("{ms:.3}"))
                .unwrap_or_default()
        } else {
            String::new()
        };
        w.write_record([
            r.algorithm.name().to_string(),
            r.variant.clone(),
            fmt_opt(r.hyperparameter),
            r.dataset.clone(),
            r.seed.to_string(),
            r.ordering.clone(),
            r.n_examples.to_string(),
            r.average_loss.to_string(),
            fmt_opt(r.epochs_used),
            wall,
        ])?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}

fn parse_field<T: FromStr>(row: usize, column: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidInput(format!("row {row}: bad {column} value '{value}'")))
}

fn parse_opt<T: FromStr>(row: usize, column: &str, value: &str) -> Result<Option<T>> {
    if value.is_empty() {
        Ok(None)
    } else {
        parse_field(row, column, value).map(Some)
    }
}

pub fn read_reports<R: Read>(input: R) -> Result<Vec<RunReport>> {
    let mut rdr = csv::Reader::from_reader(input);
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(REPORT_COLUMNS.iter().copied()) {
        return Err(Error::InvalidInput(format!(
            "unexpected report header: {}",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 2;
        out.push(RunReport {
            algorithm: parse_field(row, "algorithm", &rec[0])?,
            variant: rec[1].to_string(),
            hyperparameter: parse_opt(row, "hyperparameter", &rec[2])?,
            dataset: rec[3].to_string(),
            seed: parse_field(row, "seed", &rec[4])?,
            ordering: rec[5].to_string(),
            n_examples: parse_field(row, "n_examples", &rec[6])?,
            average_loss: parse_field(row, "average_loss", &rec[7])?,
            epochs_used: parse_opt(row, "epochs_used", &rec[8])?,
            wall_time_ms: parse_opt(row, "wall_time_ms", &rec[9])?,
        });
    }
    Ok(out)
}

/// Normalized table as CSV; per-algorithm means use the dataset name `mean`.
pub fn write_table<W: Write>(out: W, table: &NormalizedTable) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record([
        "algorithm",
        "dataset",
        "best_hyperparameter",
        "best_loss",
        "normalized_loss",
    ])?;
    for e in &table.entries {
        w.write_record([
            e.algorithm.name().to_string(),
            e.dataset.clone(),
            fmt_opt(e.best_hyperparameter),
            e.best_loss.to_string(),
            e.normalized.to_string(),
        ])?;
    }
    for (alg, mean) in &table.means {
        w.write_record([alg.name(), "mean", "", "", &mean.to_string()])?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}

pub fn write_adversary<W: Write>(out: W, reports: &[AdversaryReport]) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record([
        "learner",
        "c",
        "k",
        "eps",
        "horizon",
        "case",
        "comparator",
        "measured_regret",
        "lower_bound",
        "upper_bound",
        "l_max",
        "max_ratio",
        "crossed_at",
    ])?;
    for r in reports {
        w.write_record([
            r.learner.clone(),
            r.params.c().to_string(),
            r.params.k().to_string(),
            r.params.eps().to_string(),
            r.params.horizon().to_string(),
            r.case.to_string(),
            r.comparator.to_string(),
            r.measured_regret.to_string(),
            r.lower_bound.to_string(),
            fmt_opt(r.upper_bound),
            r.l_max.to_string(),
            r.max_ratio.to_string(),
            fmt_opt(r.crossed_at),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}
