use proptest::prelude::*;
use rescaledexp::losses::hinge_eval;
use rescaledexp::{hinge_loss, CoordinateWise, GradVector, Label, OnlineLearner, SparseExample};

fn example() -> impl Strategy<Value = SparseExample> {
    (
        prop::collection::vec(prop::option::of(-3.0f64..3.0), 4),
        any::<bool>(),
    )
        .prop_map(|(vals, pos)| {
            let features = vals
                .into_iter()
                .enumerate()
                .filter_map(|(i, v)| v.map(|v| (i as u32 + 1, v)))
                .collect();
            SparseExample::new(
                features,
                if pos {
                    Label::Positive
                } else {
                    Label::Negative
                },
            )
            .unwrap()
        })
}

fn vec4() -> impl Strategy<Value = GradVector> {
    prop::collection::vec(-5.0f64..5.0, 4).prop_map(|v| GradVector::new(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn subgradient_inequality(x in example(), w in vec4(), w2 in vec4()) {
        let (loss, g) = hinge_eval(&w, &x).unwrap();
        let g = g.to_dense(&x, 4);
        let diff: f64 = g.iter().zip(w2.iter().zip(w.iter())).map(|(gi, (b, a))| gi * (b - a)).sum();
        prop_assert!(loss + diff <= hinge_loss(&w2, &x).unwrap() + 1e-12);
    }

    #[test]
    fn kink_subgradient_still_valid(x in example(), w2s in prop::collection::vec(vec4(), 100)) {
        let n2: f64 = x.features().iter().map(|(_, v)| v * v).sum();
        prop_assume!(n2 > 1e-6);
        let mut w = vec![0.0; 4];
        for &(i, v) in x.features() {
            w[i as usize - 1] = x.label().sign() * v / n2;
        }
        let w = GradVector::new(w).unwrap();
        let (loss, g) = hinge_eval(&w, &x).unwrap();
        let g = g.to_dense(&x, 4);
        for w2 in w2s {
            let diff: f64 = g.iter().zip(w2.iter().zip(w.iter())).map(|(gi, (b, a))| gi * (b - a)).sum();
            prop_assert!(loss + diff <= hinge_loss(&w2, &x).unwrap() + 1e-12);
        }
    }

    #[test]
    fn regret_domination(xs in prop::collection::vec(example(), 1..80), u in vec4()) {
        // sum(l_t(w_t) - l_t(u)) <= sum g_t . (w_t - u) along a recorded run.
        let mut opt = CoordinateWise::new(4, false);
        let (mut lhs, mut rhs) = (0.0, 0.0);
        for x in &xs {
            let w = opt.iterate().clone();
            let (loss, sub) = hinge_eval(&w, x).unwrap();
            let g = sub.to_dense(x, 4);
            lhs += loss - hinge_loss(&u, x).unwrap();
            rhs += g.dot(&w) - g.dot(&u);
            opt.step(&g).unwrap();
        }
        prop_assert!(lhs <= rhs + 1e-9 * (1.0 + rhs.abs()));
    }
}
