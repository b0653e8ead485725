use chaoslab::kernels::*;
use chaoslab::regularity::*;
use chaoslab::rng::Estimate;

fn fbm_paths(alpha: f64, m: usize, seed: u64, count: usize) -> Vec<PathSample> {
    let spec = HermiteKernelSpec::fbm(alpha, 1.0).unwrap();
    simulate_paths(&spec, &GridSpec::new(m), seed, count).unwrap()
}

#[test]
fn fbm_increment_norms_follow_scaling() {
    for alpha in [0.3, 0.75] {
        let paths = fbm_paths(alpha, 1 << 12, 21, 50);
        for j in 3..=8 {
            let delta = 2f64.powi(-j);
            let mean_sq = paths
                .iter()
                .map(|p| increment_lp_norm(p, delta, 2.0).unwrap().powi(2))
                .sum::<f64>()
                / paths.len() as f64;
            let want = (1.0 - delta).sqrt() * delta.powf(alpha);
            let r = mean_sq.sqrt() / want;
            assert!((r - 1.0).abs() < 0.1, "α {alpha} j {j}: ratio {r}");
        }
    }
}

#[test]
fn fbm_terminal_variance_is_normalized() {
    let spec = HermiteKernelSpec::fbm(0.5, 1.0).unwrap();
    let sim = Simulator::new(&spec, &GridSpec::new(256)).unwrap();
    let g: Vec<f64> = sim.terminal_values(5, 10_000).unwrap();
    let sq: Vec<f64> = g.iter().map(|x| x * x).collect();
    let e = Estimate::from_values(&sq);
    assert!(e.within(1.0, 3.0), "{e:?}");
}

#[test]
fn rosenblatt_skewness_sign_is_stable() {
    let spec = HermiteKernelSpec::rosenblatt(0.7, 1.0).unwrap();
    let sim = Simulator::new(&spec, &GridSpec::new(512)).unwrap();
    for seed in [1, 2, 3] {
        let g = sim.terminal_values(seed, 500).unwrap();
        let n = g.len() as f64;
        let m = g.iter().sum::<f64>() / n;
        let m2 = g.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
        let m3 = g.iter().map(|x| (x - m).powi(3)).sum::<f64>() / n;
        assert!(m3 / m2.powf(1.5) > 0.5, "seed {seed}");
    }
}

#[test]
fn besov_levels_separate_around_alpha() {
    let alpha = 0.5;
    let paths = fbm_paths(alpha, 1 << 12, 33, 10);
    for p in &paths {
        let below = dyadic_besov_seminorm(p, alpha - 0.25, IncrementNorm::Orlicz { beta: 2.0 }).unwrap();
        let above = dyadic_besov_seminorm(p, alpha + 0.25, IncrementNorm::Orlicz { beta: 2.0 }).unwrap();
        assert!(below.growth_slope() < -0.1, "{}", below.growth_slope());
        assert!(above.growth_slope() > 0.1, "{}", above.growth_slope());
        assert!(above.value >= below.value);
    }
}

#[test]
fn linear_path_report() {
    let path = PathSample::from_fn(1.0, 1024, |t| t).unwrap();
    let fit = theta_slope_fit(std::slice::from_ref(&path), 2.0, Some(3..=9)).unwrap();
    assert!((fit.mean - 1.0).abs() < 1e-12);
    let lux = increment_norm(&path, 0.25, IncrementNorm::Orlicz { beta: 2.0 }).unwrap();
    let want = 0.25 / (1.0 + 1.0 / 0.75f64).ln().sqrt();
    assert!((lux / want - 1.0).abs() < 1e-10);
}
