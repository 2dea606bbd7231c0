use stablefit::bench::{emit_table, run_mc, Estimator, Format, McConfig, McMetrics, TrueModel};
use stablefit::data::{goodness_of_fit, to_log_returns};
use stablefit::{fit_spectral, hybrid_fit, sample_mv, sample_uni, RngSeed, SpectralModel, StableParams, UniEstimator};

#[test]
fn hybrid_recovers_parameters_at_large_n() {
    for (k, &(alpha, sigma, delta)) in [(0.8, 1.0, 0.0), (1.3, 2.0, -1.0), (1.9, 0.5, 3.0)].iter().enumerate() {
        let p = StableParams::zero(alpha, 0.0, sigma, delta).unwrap();
        let x = sample_uni(&p, 5_000, RngSeed(100 + k as u64)).unwrap();
        let e = hybrid_fit(&x).unwrap().estimate;
        assert!((e.alpha - alpha).abs() < 0.05, "{e:?}");
        assert!((e.sigma / sigma - 1.0).abs() < 0.05, "{e:?}");
        assert!((e.delta - delta).abs() < 0.05 * sigma, "{e:?}");
    }
}

#[test]
fn hybrid_is_location_scale_equivariant() {
    let p = StableParams::zero(1.4, 0.0, 1.0, 0.0).unwrap();
    let x = sample_uni(&p, 3000, RngSeed(4)).unwrap();
    let a = hybrid_fit(&x).unwrap().estimate;
    let y: Vec<f64> = x.iter().map(|v| 3.0 * v - 2.0).collect();
    let b = hybrid_fit(&y).unwrap().estimate;
    assert!((a.alpha - b.alpha).abs() < 1e-6);
    assert!((3.0 * a.sigma - b.sigma).abs() < 1e-6);
}

#[test]
fn projected_marginals_are_stable() {
    let model = SpectralModel::on_grid(1.3, 2, vec![0.25; 4], vec![0.0; 2]).unwrap();
    let data = sample_mv(&model, 10_000, RngSeed(12)).unwrap();
    for s in &model.points {
        let proj: Vec<f64> = data.rows().map(|x| x.iter().zip(s).map(|(a, b)| a * b).sum()).collect();
        let e = hybrid_fit(&proj).unwrap().estimate;
        assert!((e.alpha - 1.3).abs() < 0.1, "{s:?}: {e:?}");
    }
}

#[test]
fn centred_data_gives_small_shift() {
    let model = SpectralModel::on_grid(1.3, 2, vec![0.25; 4], vec![0.0; 2]).unwrap();
    let data = sample_mv(&model, 4000, RngSeed(21)).unwrap();
    let fit = fit_spectral(&data, 4).unwrap();
    assert!(fit.delta_hat.iter().all(|d| d.abs() < 0.1), "{:?}", fit.delta_hat);
    assert!(fit.gamma_hat.iter().all(|&g| g >= 0.0));
}

#[test]
fn gaussian_goodness_of_fit_is_calibrated() {
    let p = StableParams::zero(2.0, 0.0, 1.0, 0.0).unwrap();
    let runs = 20;
    let accepted = (0..runs)
        .filter(|&k| {
            let x = sample_uni(&p, 500, RngSeed(300 + k)).unwrap();
            goodness_of_fit(&x, UniEstimator::Hybrid).unwrap().p_value > 0.05
        })
        .count();
    assert!(accepted as f64 >= 0.95 * runs as f64, "{accepted}/{runs}");
}

#[test]
fn gof_on_price_path() {
    let p = StableParams::zero(1.7, 0.0, 0.01, 0.0005).unwrap();
    let r = sample_uni(&p, 1550, RngSeed(77)).unwrap();
    let mut prices = vec![100.0];
    for v in &r {
        let last = *prices.last().unwrap();
        prices.push(last * v.exp());
    }
    let back = to_log_returns(&prices).unwrap();
    assert_eq!(back.len(), 1550);
    let report = goodness_of_fit(&back, UniEstimator::Hybrid).unwrap();
    assert!(report.ks_statistic < 0.04 && report.p_value > 0.01, "{report:?}");
}

#[test]
fn bench_json_round_trip_and_repeatability() {
    let config = McConfig {
        true_model: TrueModel::Spectral(SpectralModel::on_grid(1.6, 1, vec![0.5, 0.5], vec![0.0]).unwrap()),
        n: 600,
        replicates: 12,
        seed: RngSeed(3),
        estimator: Estimator::SpectralEcf,
    };
    let a = emit_table(&[run_mc(&config).unwrap()], Format::Json);
    let b = emit_table(&[run_mc(&config).unwrap()], Format::Json);
    assert_eq!(a, b);
    let parsed: Vec<McMetrics> = serde_json::from_slice(&a).unwrap();
    assert_eq!(parsed[0].params.len(), 4);
    assert_eq!(emit_table(&parsed, Format::Json), a);
}
