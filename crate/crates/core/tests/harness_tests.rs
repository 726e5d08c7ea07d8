use rescaledexp::data::Order;
use rescaledexp::harness::{
    aggregate, read_reports, run_adversary, run_once, run_sweep, write_adversary, write_reports,
    write_table, AdversaryLearner, Algorithm, RunReport, RunSpec, SweepGrid,
};
use rescaledexp::{BaselineKind, DatasetHandle, Error};

fn toy() -> DatasetHandle {
    DatasetHandle::from_text("toy", "+1 1:1 2:0.5\n-1 1:-0.5 2:-1\n".repeat(10)).unwrap()
}

fn all_specs() -> Vec<RunSpec> {
    let mut specs = vec![RunSpec::new(Algorithm::RescaledExp)];
    for (cw, rc) in [(false, false), (true, true), (false, true)] {
        specs.push(RunSpec {
            coordinate_wise: cw,
            recenter: rc,
            ..RunSpec::new(Algorithm::RescaledExp)
        });
    }
    for kind in BaselineKind::ALL {
        specs.push(RunSpec::new(Algorithm::Baseline(kind)).with_hyperparameter(0.1));
    }
    specs
}

#[test]
fn first_prediction_is_made_at_zero() {
    let ds = DatasetHandle::from_text("one", "-1 3:2.5\n").unwrap();
    for spec in all_specs() {
        let r = run_once(&ds, &spec).unwrap();
        assert_eq!(r.average_loss, 1.0, "{}", spec.algorithm);
        assert_eq!(r.n_examples, 1);
    }
}

#[test]
fn toy_separable_set_regression() {
    let r = run_once(&toy(), &RunSpec::new(Algorithm::RescaledExp)).unwrap();
    assert!(r.average_loss < 1.0);
    assert!(
        (r.average_loss - 0.051_345_904_697_490_41).abs() < 1e-12,
        "{}",
        r.average_loss
    );
    assert_eq!(r.variant, "coordinate");
    assert_eq!(r.hyperparameter, None);
    assert!(r.epochs_used.is_some());
}

#[test]
fn runs_are_deterministic() {
    let ds = toy();
    for spec in all_specs() {
        for order in [Order::FileOrder, Order::Shuffled(3)] {
            let spec = RunSpec {
                order,
                seed: 3,
                ..spec
            };
            let a = run_once(&ds, &spec).unwrap();
            let b = run_once(&ds, &spec).unwrap();
            assert!(a.same_outcome(&b));
            let mut x = Vec::new();
            let mut y = Vec::new();
            write_reports(&mut x, &[a], false).unwrap();
            write_reports(&mut y, &[b], false).unwrap();
            assert_eq!(x, y);
        }
    }
}

#[test]
fn run_argument_errors() {
    let ds = toy();
    let with_hyper = RunSpec::new(Algorithm::RescaledExp).with_hyperparameter(1.0);
    assert!(matches!(
        run_once(&ds, &with_hyper),
        Err(Error::InvalidInput(_))
    ));
    let without = RunSpec::new(Algorithm::Baseline(BaselineKind::Adam));
    assert!(matches!(
        run_once(&ds, &without),
        Err(Error::InvalidInput(_))
    ));
    let empty = DatasetHandle::from_text("empty", "").unwrap();
    assert!(run_once(&empty, &RunSpec::new(Algorithm::RescaledExp)).is_err());
}

#[test]
fn sweep_counts_and_refinement() {
    let ds = toy();
    let grid = SweepGrid::default();
    assert_eq!(grid.coarse.len(), 8);
    assert_eq!(grid.refine_betas.len(), 7);
    let out = run_sweep(&ds, &RunSpec::new(Algorithm::RescaledExp), &grid).unwrap();
    assert_eq!(out.reports.len(), 1);
    for kind in [BaselineKind::AdaGrad, BaselineKind::Pistol] {
        let out = run_sweep(&ds, &RunSpec::new(Algorithm::Baseline(kind)), &grid).unwrap();
        assert_eq!(out.reports.len(), 15);
        let coarse = &out.reports[..8];
        let best_coarse = coarse
            .iter()
            .filter(|r| r.average_loss.is_finite())
            .min_by(|a, b| a.average_loss.total_cmp(&b.average_loss))
            .unwrap();
        let center = best_coarse.hyperparameter.unwrap();
        for (r, beta) in out.reports[8..].iter().zip(&grid.refine_betas) {
            assert_eq!(r.hyperparameter, Some(beta * center));
        }
        let min = out
            .reports
            .iter()
            .map(|r| r.average_loss)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(out.best.average_loss, min);
        let smallest_tied = out
            .reports
            .iter()
            .filter(|r| r.average_loss == min)
            .map(|r| r.hyperparameter.unwrap())
            .fold(f64::INFINITY, f64::min);
        assert_eq!(out.best.hyperparameter, Some(smallest_tied));
    }
}

#[test]
fn sweep_fails_when_every_run_diverges() {
    // A huge feature value makes the second prediction overflow for every step size.
    let ds = DatasetHandle::from_text("huge", "+1 1:1e200\n-1 1:1e200\n+1 1:1e200\n").unwrap();
    let err = run_sweep(
        &ds,
        &RunSpec::new(Algorithm::Baseline(BaselineKind::SgdDecay)),
        &SweepGrid::default(),
    )
    .unwrap_err();
    assert!(matches!(err, Error::Sweep(_)));
    assert!(err.to_string().contains("sgd_decay") && err.to_string().contains("huge"));
}

fn report(alg: Algorithm, dataset: &str, hyper: Option<f64>, loss: f64) -> RunReport {
    RunReport {
        algorithm: alg,
        variant: "standard".into(),
        hyperparameter: hyper,
        dataset: dataset.into(),
        seed: 0,
        ordering: "file".into(),
        n_examples: 10,
        average_loss: loss,
        epochs_used: None,
        wall_time_ms: None,
    }
}

const A: Algorithm = Algorithm::Baseline(BaselineKind::AdaGrad);
const B: Algorithm = Algorithm::RescaledExp;

#[test]
fn aggregate_single_dataset() {
    let t = aggregate(&[report(A, "d", Some(1.0), 0.10), report(B, "d", None, 0.12)]).unwrap();
    assert_eq!(t.normalized(A, "d"), Some(1.0));
    assert!((t.normalized(B, "d").unwrap() - 1.2).abs() < 1e-12);
    assert_eq!(t.mean(A), Some(1.0));
    assert_eq!(t.mean(B), t.normalized(B, "d"));
}

#[test]
fn aggregate_uses_best_setting_and_split_wins() {
    let reports = [
        report(A, "x", Some(1.0), 0.30),
        report(A, "x", Some(0.1), 0.10),
        report(A, "x", Some(10.0), f64::INFINITY),
        report(B, "x", None, 0.20),
        report(A, "y", Some(1.0), 0.40),
        report(B, "y", None, 0.10),
    ];
    let t = aggregate(&reports).unwrap();
    for ds in ["x", "y"] {
        let min = [A, B]
            .iter()
            .map(|&a| t.normalized(a, ds).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert_eq!(min, 1.0);
    }
    let best_a = t
        .entries
        .iter()
        .find(|e| e.algorithm == A && e.dataset == "x")
        .unwrap();
    assert_eq!(best_a.best_hyperparameter, Some(0.1));
    for alg in [A, B] {
        let m = t.mean(alg).unwrap();
        assert!(m > 1.0 && m < 4.0);
    }
}

#[test]
fn aggregate_missing_pair_is_an_error() {
    let reports = [
        report(A, "x", Some(1.0), 0.3),
        report(B, "x", None, 0.2),
        report(A, "y", Some(1.0), 0.4),
    ];
    assert!(matches!(aggregate(&reports), Err(Error::Aggregate(_))));
    assert!(matches!(aggregate(&[]), Err(Error::Aggregate(_))));
}

#[test]
fn csv_round_trip_and_format() {
    let mut reports = vec![
        report(A, "x", Some(1e-5), 0.25),
        report(B, "x", None, f64::INFINITY),
    ];
    reports[1].epochs_used = Some(3);
    reports[1].variant = "coordinate".into();
    reports[0].wall_time_ms = Some(1.5);
    let mut buf = Vec::new();
    write_reports(&mut buf, &reports, true).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "algorithm,variant,hyperparameter,dataset,seed,ordering,n_examples,average_loss,epochs_used,wall_time_ms"
    );
    assert_eq!(
        lines.next().unwrap(),
        "adagrad,standard,0.00001,x,0,file,10,0.25,,1.500"
    );
    assert_eq!(
        lines.next().unwrap(),
        "rescaledexp,coordinate,,x,0,file,10,inf,3,"
    );
    assert!(!text.contains('\r'));
    let back = read_reports(&buf[..]).unwrap();
    assert_eq!(back.len(), 2);
    assert_eq!(back[0].hyperparameter, Some(1e-5));
    assert_eq!(back[1].average_loss, f64::INFINITY);
    assert_eq!(back[1].epochs_used, Some(3));
    assert!(read_reports("a,b\n1,2\n".as_bytes()).is_err());
}

#[test]
fn table_and_adversary_csv() {
    let t = aggregate(&[report(A, "d", Some(1.0), 0.10), report(B, "d", None, 0.12)]).unwrap();
    let mut buf = Vec::new();
    write_table(&mut buf, &t).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("algorithm,dataset,best_hyperparameter,best_loss,normalized_loss\n"));
    assert!(text.contains("\nadagrad,mean,,,1\n"));

    let r = run_adversary(AdversaryLearner::RescaledExp, 1.0, 1.0, 0.25).unwrap();
    let mut buf = Vec::new();
    write_adversary(&mut buf, &[r]).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let row = text.lines().nth(1).unwrap();
    assert!(row.starts_with("rescaledexp,1,1,0.25,400,crossed,0,"));
}
