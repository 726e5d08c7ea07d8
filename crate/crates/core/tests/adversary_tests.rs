use rescaledexp::adversary::{
    conditions_hold, find_min_horizon, lower_bound_ratio_form, lower_bound_value, Adversary,
    AdversaryParams, Case, Phase,
};
use rescaledexp::harness::{run_adversary, run_adversary_with, AdversaryLearner};
use rescaledexp::verify::FROZEN_MIN_HORIZON;
use rescaledexp::{BaselineKind, Error};

fn params(c: f64, k: f64, eps: f64, t: u64) -> AdversaryParams {
    AdversaryParams::new(c, k, eps, t).unwrap()
}

#[test]
fn minimal_horizon_regression() {
    assert_eq!(
        find_min_horizon(1.0, 1.0, 0.25).unwrap(),
        FROZEN_MIN_HORIZON
    );
    assert!(!conditions_hold(&params(
        1.0,
        1.0,
        0.25,
        FROZEN_MIN_HORIZON - 1
    )));
    for t in [
        FROZEN_MIN_HORIZON,
        2 * FROZEN_MIN_HORIZON,
        4 * FROZEN_MIN_HORIZON,
    ] {
        assert!(conditions_hold(&params(1.0, 1.0, 0.25, t)), "T={t}");
    }
}

#[test]
fn other_scans_match_oracle() {
    for ((c, k, eps), t) in [
        ((1.0, 1.0, 0.4), 289),
        ((2.0, 1.0, 0.25), 3410),
        ((1.0, 10.0, 0.25), 828),
        ((1.0, 1.0, 0.49), 285),
        ((0.5, 1.0, 0.25), 59),
    ] {
        assert_eq!(
            find_min_horizon(c, k, eps).unwrap(),
            t,
            "c={c} k={k} eps={eps}"
        );
    }
}

#[test]
fn infeasible_parameters_hit_the_cap() {
    match find_min_horizon(1000.0, 1.0, 0.25) {
        Err(Error::Infeasible { cap, .. }) => assert_eq!(cap, 10_000_000),
        other => panic!("expected infeasible, got {other:?}"),
    }
}

#[test]
fn invalid_eps_is_rejected() {
    assert!(matches!(
        run_adversary(AdversaryLearner::Zero, 1.0, 1.0, 0.6),
        Err(Error::InvalidInput(_))
    ));
}

#[test]
fn phases_only_move_forward() {
    let mut adv = Adversary::new(params(1.0, 1.0, 0.25, 16));
    assert_eq!(adv.next(0.0), -1.0);
    assert_eq!(adv.phase(), Phase::Probing);
    assert_eq!(adv.next(adv.threshold()), 32.0);
    for w in [0.0, -5.0, 1e9] {
        assert_eq!(adv.next(w), 0.0);
        assert_eq!(adv.phase(), Phase::Done);
    }
}

#[test]
fn rescaled_exp_meets_the_lower_bound() {
    let r = run_adversary(AdversaryLearner::RescaledExp, 1.0, 1.0, 0.25).unwrap();
    let t = FROZEN_MIN_HORIZON;
    assert_eq!(r.params.horizon(), t);
    assert_eq!(r.case, Case::Crossed);
    assert_eq!(r.comparator, 0.0);
    assert_eq!(r.l_max, 2.0 * t as f64);
    assert_eq!(r.max_ratio, 2.0 * t as f64);
    assert!(r.measured_regret >= r.lower_bound);
    let upper = r.upper_bound.unwrap();
    assert!(r.measured_regret <= upper);
    // With max ratio 2T the ratio form coincides with the main bound.
    let ratio = lower_bound_ratio_form(&r.params, 0.0, r.l_max, r.max_ratio);
    assert!((ratio - r.lower_bound).abs() <= 1e-12 * ratio);
}

#[test]
fn zero_player_stays_low() {
    let p = params(1.0, 1.0, 0.25, FROZEN_MIN_HORIZON);
    let r = run_adversary_with(AdversaryLearner::Zero, p).unwrap();
    assert_eq!(r.case, Case::StayedLow);
    assert_eq!(r.l_max, 1.0);
    assert_eq!(r.max_ratio, 1.0);
    assert_eq!(r.crossed_at, None);
    // Comparator is twice the threshold; regret = sum of -1 * (0 - u) = T u.
    assert!((r.comparator - 2.0 * p.threshold()).abs() < 1e-9 * r.comparator);
    let expected = FROZEN_MIN_HORIZON as f64 * r.comparator;
    assert!((r.measured_regret - expected).abs() <= 1e-9 * expected);
    assert!(r.measured_regret >= r.lower_bound);
    assert_eq!(r.lower_bound, lower_bound_value(&p, r.comparator, 1.0));
}

#[test]
fn every_learner_is_checkmated() {
    let p = params(1.0, 1.0, 0.25, FROZEN_MIN_HORIZON);
    let mut learners = vec![AdversaryLearner::RescaledExp, AdversaryLearner::Zero];
    for kind in BaselineKind::ALL {
        for scale in [1e-3, 1.0, 100.0] {
            learners.push(AdversaryLearner::Baseline { kind, scale });
        }
    }
    for learner in learners {
        match run_adversary_with(learner, p) {
            Ok(r) => {
                assert_eq!(r.case == Case::Crossed, r.crossed_at.is_some());
                assert!(
                    r.measured_regret >= r.lower_bound,
                    "{}: {} < {}",
                    r.learner,
                    r.measured_regret,
                    r.lower_bound
                );
                let expected_ratio = if r.case == Case::Crossed {
                    2.0 * p.horizon() as f64
                } else {
                    1.0
                };
                assert_eq!(r.max_ratio, expected_ratio, "{}", r.learner);
            }
            // A baseline whose iterate overflows has no regret to report.
            Err(Error::Diverged { .. }) => {}
            Err(e) => panic!("{e}"),
        }
    }
}
