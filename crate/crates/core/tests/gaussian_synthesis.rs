use chigrid::gaussim::{
    build_embedding, eval_correlation, sample_fbm, sample_path, sample_vector_chi_input,
    CorrelationModel, FbmSampler, LatticeSpec,
};
use chigrid::harness::{ks_two_sample, ks_two_sample_pvalue};
use chigrid::rng::{stream, DOMAIN_DIAGNOSTIC};

const N_PATHS: u64 = 2000;

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn lag_covariances_match_the_model() {
    for model in [
        CorrelationModel::exp_power(1.0).unwrap(),
        CorrelationModel::exp_power(1.5).unwrap(),
        CorrelationModel::strong_mixture(1.0, 0.5, 200.0).unwrap(),
    ] {
        let spec = LatticeSpec::new(0.1, 64).unwrap();
        let emb = build_embedding(&model, &spec).unwrap();
        let paths: Vec<Vec<f64>> = (0..N_PATHS)
            .map(|i| sample_path(&emb, &spec, &mut stream(1, DOMAIN_DIAGNOSTIC, i)).values)
            .collect();
        for k in 0..=20 {
            let r = eval_correlation(&model, k as f64 * spec.mesh);
            let products: Vec<f64> = paths.iter().map(|p| p[3] * p[3 + k]).collect();
            let (r_hat, _) = mean_and_se(&products);
            let bound = 3.0 * ((1.0 + r * r) / N_PATHS as f64).sqrt();
            assert!(
                (r_hat - r).abs() <= bound,
                "{model:?} lag {k}: {r_hat} vs {r}"
            );
        }
    }
}

#[test]
fn components_are_uncorrelated() {
    let model = CorrelationModel::exp_power(1.0).unwrap();
    let spec = LatticeSpec::new(0.1, 32).unwrap();
    let products: Vec<f64> = (0..N_PATHS)
        .map(|i| {
            let x = sample_vector_chi_input(&model, &spec, 3, &mut stream(2, DOMAIN_DIAGNOSTIC, i))
                .unwrap();
            x.components[0].values[7] * x.components[1].values[7]
        })
        .collect();
    let (mean, se) = mean_and_se(&products);
    assert!(mean.abs() <= 3.0 * se, "{mean} +- {se}");
}

#[test]
fn mixture_sampling_matches_direct_embedding() {
    let model = CorrelationModel::strong_mixture(1.0, 1.0, 20.0).unwrap();
    let spec = LatticeSpec::new(0.05, 200).unwrap();
    let emb = build_embedding(&model, &spec).unwrap();
    let max = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let direct: Vec<f64> = (0..N_PATHS)
        .map(|i| max(&sample_path(&emb, &spec, &mut stream(3, DOMAIN_DIAGNOSTIC, i)).values))
        .collect();
    let mixed: Vec<f64> = (0..N_PATHS)
        .map(|i| {
            let x = sample_vector_chi_input(&model, &spec, 1, &mut stream(4, DOMAIN_DIAGNOSTIC, i))
                .unwrap();
            max(&x.components[0].values)
        })
        .collect();
    let d = ks_two_sample(&direct, &mixed);
    assert!(
        ks_two_sample_pvalue(d, direct.len(), mixed.len()) > 0.01,
        "D = {d}"
    );
}

#[test]
fn fbm_unit_variance_and_self_similarity() {
    for hurst in [0.25, 0.5, 0.8, 1.0] {
        let spec = LatticeSpec::new(0.05, 41).unwrap();
        let sampler = FbmSampler::new(hurst, spec).unwrap();
        let (mut at_one, mut at_two) = (Vec::new(), Vec::new());
        for i in 0..10_000 {
            let path = sampler.sample(&mut stream(5, DOMAIN_DIAGNOSTIC, i));
            assert_eq!(path.values[0], 0.0);
            at_one.push(path.values[20].powi(2));
            at_two.push(path.values[40].powi(2));
        }
        let (v1, se1) = mean_and_se(&at_one);
        let (v2, se2) = mean_and_se(&at_two);
        assert!((v1 - 1.0).abs() <= 3.0 * se1, "H={hurst}: Var B(1) = {v1}");
        let ratio = 2f64.powf(2.0 * hurst);
        let se = (se2 * se2 + ratio * ratio * se1 * se1).sqrt();
        assert!(
            (v2 - ratio * v1).abs() <= 3.0 * se,
            "H={hurst}: {v2} vs {}",
            ratio * v1
        );
    }
}

#[test]
fn brownian_increments_are_uncorrelated() {
    let products: Vec<f64> = (0..10_000)
        .map(|i| {
            let p = sample_fbm(0.5, 16, 0.1, &mut stream(6, DOMAIN_DIAGNOSTIC, i))
                .unwrap()
                .values;
            (p[5] - p[4]) * (p[6] - p[5])
        })
        .collect();
    let (mean, se) = mean_and_se(&products);
    assert!(mean.abs() <= 3.0 * se);
}

#[test]
fn degenerate_fbm_is_a_line() {
    let p = sample_fbm(1.0, 11, 0.1, &mut stream(7, DOMAIN_DIAGNOSTIC, 0))
        .unwrap()
        .values;
    let unit = p[10];
    for (k, v) in p.iter().enumerate() {
        assert!((v - k as f64 * 0.1 * unit).abs() <= 1e-14);
    }
}

#[test]
fn seeded_paths_are_reproducible() {
    let model = CorrelationModel::exp_power(0.7).unwrap();
    let spec = LatticeSpec::new(0.02, 500).unwrap();
    let emb = build_embedding(&model, &spec).unwrap();
    let a = sample_path(&emb, &spec, &mut stream(9, DOMAIN_DIAGNOSTIC, 3));
    let b = sample_path(&emb, &spec, &mut stream(9, DOMAIN_DIAGNOSTIC, 3));
    assert_eq!(a.values, b.values);
}
