use dps_core::stats::{credible_interval, variance_estimators};
use dps_core::{BaseMeasure, NoiseSpec, ReplicateStreams, SetExpr, UrnState, WeightModel};

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, v.sqrt())
}

/// With deterministic constant weight `w`, a new color appears at step `i`
/// with probability `θ / (θ + w·i)`.
fn expected_distinct(theta: f64, w: f64, n: u64) -> f64 {
    (0..n).map(|i| theta / (theta + w * i as f64)).sum()
}

#[test]
fn distinct_count_matches_exact_expectation() {
    for (theta, w) in [(1.0, 2.0), (3.0, 1.0), (0.5, 1.5)] {
        let m = WeightModel::constant(w, NoiseSpec::Deterministic, w).unwrap();
        let n = 2_000;
        let r = 400;
        let ls: Vec<f64> = (0..r)
            .map(|i| {
                let mut s = UrnState::new(theta, BaseMeasure::uniform()).unwrap();
                s.advance(&m, n, &mut ReplicateStreams::new(404, i));
                s.distinct() as f64
            })
            .collect();
        let (mean, sd) = mean_sd(&ls);
        let exact = expected_distinct(theta, w, n);
        assert!((mean - exact).abs() < 3.5 * sd / (r as f64).sqrt(), "θ={theta} w={w}: {mean} vs {exact}");
    }
}

#[test]
fn plug_in_variance_is_consistent_for_bernoulli_weights() {
    // W = 3 with probability 5/6, else 0: E[W²] / w̄² = 7.5 / 6.25 = 1.2.
    let m = WeightModel::constant(2.5, NoiseSpec::BernoulliScaled, 3.0).unwrap();
    let a = SetExpr::left_open(0.0, 0.5).unwrap();
    for rep in 0..4 {
        let mut s = UrnState::new(20.0, BaseMeasure::uniform()).unwrap();
        s.advance(&m, 100_000, &mut ReplicateStreams::new(12, rep));
        let e = variance_estimators(&s, &a).unwrap();
        let p = e.pred_prob;
        let target = 1.2 * p * (1.0 - p);
        assert!((e.v_hat / target - 1.0).abs() < 0.03, "{} vs {target}", e.v_hat);
        assert!((e.u_hat / (0.2 * p * (1.0 - p)) - 1.0).abs() < 0.2, "{}", e.u_hat);
        assert!((e.m_n - 2.5).abs() < 0.02);
    }
}

#[test]
fn interval_width_halves_when_n_quadruples() {
    let m = WeightModel::constant(2.5, NoiseSpec::BernoulliScaled, 3.0).unwrap();
    let mut ratios = Vec::new();
    for rep in 0..10 {
        let mut s = UrnState::new(20.0, BaseMeasure::uniform()).unwrap();
        let mut st = ReplicateStreams::new(21, rep);
        s.advance(&m, 20_000, &mut st);
        let w1 = credible_interval(&s, 0.5, 0.05).unwrap().width();
        s.advance(&m, 60_000, &mut st);
        let w4 = credible_interval(&s, 0.5, 0.05).unwrap().width();
        ratios.push(w4 / w1);
    }
    for r in ratios {
        assert!((0.45..=0.55).contains(&r), "{r}");
    }
}
