//! One PASS/FAIL line per acceptance criterion.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use chaoslab::chaos::counterexample;
use chaoslab::fuzz::*;
use chaoslab::kernels::*;
use chaoslab::regularity::*;
use chaoslab::rng::{gaussian_vec, stream};

fn report(id: u32, name: &str, pass: bool, detail: String) {
    println!("criterion {id:>2} {name}: {} ({detail})", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {id} {name} failed: {detail}");
}

fn skewness(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let m2 = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n;
    let m3 = x.iter().map(|v| (v - m).powi(3)).sum::<f64>() / n;
    let se = (6.0 * n * (n - 1.0) / ((n - 2.0) * (n + 1.0) * (n + 3.0))).sqrt();
    (m3 / m2.powf(1.5), se)
}

fn rosenblatt_paths() -> &'static Vec<PathSample> {
    static PATHS: OnceLock<Vec<PathSample>> = OnceLock::new();
    PATHS.get_or_init(|| {
        let spec = HermiteKernelSpec::rosenblatt(0.7, 1.0).unwrap();
        simulate_paths(&spec, &GridSpec::new(1 << 13), 11, 50).unwrap()
    })
}

#[test]
fn criterion_01_expansion_oracle() {
    let start = Instant::now();
    let lim = FuzzLimits::default();
    let mean = fuzz_expansion_mean(101, 500, &lim, 1e-9).unwrap();
    let point = fuzz_expansion_pointwise(102, 500, 100, &lim, 1e-9).unwrap();
    let elapsed = start.elapsed();
    let pass = mean.pass && point.pass && mean.instances >= 500 && elapsed < Duration::from_secs(300);
    report(
        1,
        "expansion/oracle equivalence",
        pass,
        format!(
            "{} instances, mean rel {:.1e}, pointwise {:.1e} over {} seeds, {:.1?}",
            mean.instances, mean.worst, point.worst, point.evaluations, elapsed
        ),
    );
}

#[test]
fn criterion_02_counterexample() {
    let c = counterexample().unwrap();
    let pass = c.e_xi_eta.abs() < 1e-12 && (c.e_squares / 4.0 - 1.0).abs() < 1e-10;
    report(2, "counterexample", pass, format!("E ξη = {:e}, squares covariance {}", c.e_xi_eta, c.e_squares));
}

#[test]
fn criterion_03_inequality_fuzzing() {
    let lim = FuzzLimits::default();
    let runs = [
        fuzz_norm_bound(301, 1000, &lim, 1e-12).unwrap(),
        fuzz_inner_bound(302, 1000, &lim, 1e-12).unwrap(),
        fuzz_composition(303, 1000, &lim, 1e-10).unwrap(),
        fuzz_permutation(304, 1000, &lim, 1e-10).unwrap(),
    ];
    let pass = runs.iter().all(|r| r.pass && r.instances >= 1000);
    let detail: Vec<String> = runs.iter().map(|r| format!("{} worst {:.1e}", r.check, r.worst)).collect();
    report(3, "inequality fuzzing", pass, detail.join(", "));
}

#[test]
fn criterion_04_cardinality() {
    let s = fuzz_cardinality(401, 8, 200, 10).unwrap();
    report(4, "pair-set cardinality", s.pass, format!("{} cases, {} mismatches", s.instances, s.failures));
}

#[test]
fn criterion_05_covariance_identity() {
    let s = fuzz_covariance(501, 500, &FuzzLimits::default(), 1e-10).unwrap();
    report(5, "covariance identity", s.pass, format!("{} pairs, worst {:.1e}", s.instances, s.worst));
}

#[test]
fn criterion_06_fbm_regularity() {
    let start = Instant::now();
    let mut pass = true;
    let mut detail = Vec::new();
    for (i, alpha) in [0.3, 0.5, 0.75].into_iter().enumerate() {
        let spec = HermiteKernelSpec::fbm(alpha, 1.0).unwrap();
        let paths = simulate_paths(&spec, &GridSpec::new(1 << 14), 600 + i as u64, 50).unwrap();
        let fit = theta_slope_fit(&paths, 2.0, Some(3..=10)).unwrap();
        pass &= (fit.mean - alpha).abs() <= 0.05;
        detail.push(format!("α {alpha}: {:.4}", fit.mean));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(600);
    report(6, "fBm regularity", pass, format!("{}, {:.1?}", detail.join(", "), elapsed));
}

#[test]
fn criterion_07_rosenblatt_regularity() {
    let paths = rosenblatt_paths();
    let fit = theta_slope_fit(paths, 2.0, None).unwrap();
    let study = modulus_refinement(paths, 0.7, 1.0, 3).unwrap();
    let g1: Vec<f64> = paths.iter().map(|p| *p.values().last().unwrap()).collect();
    let (skew, se) = skewness(&g1);
    let slope_ok = (fit.mean - 0.7).abs() <= 0.1;
    let modulus_ok = study.stable(2.0) && study.steps == vec![1 << 11, 1 << 12, 1 << 13];
    let skew_ok = skew.abs() > 3.0 * se;
    report(
        7,
        "Rosenblatt regularity",
        slope_ok && modulus_ok && skew_ok,
        format!(
            "slope {:.4}, modulus means {:?} growth {:.3}, skewness {:.3} (SE {:.3})",
            fit.mean,
            study.means.iter().map(|m| format!("{m:.3}")).collect::<Vec<_>>(),
            study.growth,
            skew,
            se
        ),
    );
}

#[test]
fn criterion_08_moment_growth_shape() {
    const NOISE_Z: f64 = 2.0;
    let paths = rosenblatt_paths();
    let deltas = [1.0 / 64.0, 1.0 / 128.0, 1.0 / 256.0, 1.0 / 512.0];
    let ells = [2.0, 4.0, 6.0, 8.0];
    let linear = moment_growth_check(paths, &deltas, &ells, 0.7, 1.0).unwrap();
    let root = moment_growth_check(paths, &deltas, &ells, 0.7, 0.5).unwrap();
    let pass = linear.no_increasing_trend(NOISE_Z) && root.kendall_z > NOISE_Z;
    report(
        8,
        "moment-growth shape",
        pass,
        format!("Kendall z with ℓ: {:.2}, with ℓ^1/2: {:.2}", linear.kendall_z, root.kendall_z),
    );
}

#[test]
fn criterion_09_condition_verification() {
    let opts = SweepOptions::default();
    let mut pass = true;
    let mut detail = Vec::new();
    let specs = [
        HermiteKernelSpec::fbm(0.3, 1.0).unwrap(),
        HermiteKernelSpec::fbm(0.5, 1.0).unwrap(),
        HermiteKernelSpec::fbm(0.75, 1.0).unwrap(),
        HermiteKernelSpec::rosenblatt(0.7, 1.0).unwrap(),
    ];
    for spec in &specs {
        let family = DiscretizedFamily::new(spec, &GridSpec::new(32)).unwrap();
        let g1 = verify_g1(&family, &opts).unwrap();
        let g2 = verify_g2(&family, &opts).unwrap();
        let g4 = verify_g4(spec, &G4Options::default()).unwrap();
        pass &= g1.pass && g2.pass && g4.epsilon > 0.0;
        detail.push(format!(
            "{}: κ {:.3} drift {:.3}, κ' {:.3} drift {:.3}, ε {:.3}",
            g1.label, g1.kappa, g1.drift, g2.kappa_prime, g2.drift, g4.epsilon
        ));
    }
    let zero = ZeroKernel {
        alpha: 0.5,
        horizon: 1.0,
        m: 32,
    };
    let z = verify_g2(&zero, &opts).unwrap();
    pass &= !z.pass;
    detail.push(format!("zero kernel G2 pass = {}", z.pass));
    report(9, "condition verification", pass, detail.join("; "));
}

#[test]
fn criterion_10_orlicz_machinery() {
    let mut worst = 0.0f64;
    for c in [0.5, 1.0, 3.0] {
        let lux = luxemburg_norm(&vec![c; 257], 1.0, &OrliczFunction::new(2.0).unwrap()).unwrap();
        worst = worst.max((lux / (c / 2f64.ln().sqrt()) - 1.0).abs());
    }
    let closed_ok = worst < 1e-10;
    // ‖f‖_p ≤ ‖f‖_Φ (1/β + 1/p)^{1/β} for measure at most 1
    let mut ok = closed_ok;
    let mut detail = vec![format!("closed form rel {worst:.1e}")];
    for (n, beta) in [(1usize, 2.0), (2, 1.0)] {
        let phi = OrliczFunction::for_chaos(n);
        let (mut c1, mut c2) = (f64::INFINITY, 0.0f64);
        for i in 0..100u64 {
            let mut rng = stream(1000 + n as u64, i);
            let len = 64 << (i % 6);
            let values: Vec<f64> = gaussian_vec(&mut rng, len)
                .into_iter()
                .map(|g| if n == 1 { g } else { g * g - 1.0 })
                .collect();
            let r = psup_norm(&values, 1.0, beta).unwrap() / luxemburg_norm(&values, 1.0, &phi).unwrap();
            c1 = c1.min(r);
            c2 = c2.max(r);
        }
        let bound = (1.0 + 1.0 / beta).powf(1.0 / beta);
        ok &= c1 > 0.0 && c2 <= bound;
        detail.push(format!("β {beta}: [c1, c2] = [{c1:.4}, {c2:.4}], c2 bound {bound:.4}"));
    }
    report(10, "Orlicz machinery", ok, detail.join(", "));
}
