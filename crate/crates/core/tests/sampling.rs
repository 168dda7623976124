use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use surftn::decoder::exact_chi;
use surftn::{amplitude_damping, build_lattice, iid_network_factors, sample_syndrome, DenseNoise, DenseOracle, NetworkOutcomes, OutcomeModel, Syndrome};

fn ad_models(gamma: f64) -> (DenseOracle, NetworkOutcomes) {
    let lat = build_lattice(3, 3).unwrap();
    let k = amplitude_damping(gamma).unwrap();
    let noise = iid_network_factors(&k, &lat).unwrap();
    let dense = DenseOracle::new(&lat, DenseNoise::Iid(k)).unwrap();
    let net = NetworkOutcomes::new(&lat, &noise, exact_chi(&lat, &noise)).unwrap();
    (dense, net)
}

#[test]
fn network_marginals_match_dense() {
    let (mut dense, mut net) = ad_models(0.3);
    let lat = dense.lattice().clone();
    for s in Syndrome::enumerate(&lat) {
        let full: Vec<Option<bool>> = s.x.iter().chain(&s.z).map(|&b| Some(b)).collect();
        let (a, b) = (dense.marginal(&full).unwrap(), net.marginal(&full).unwrap());
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        assert!((a - dense.syndrome_probability(&s).unwrap()).abs() < 1e-14);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let part: Vec<Option<bool>> = (0..lat.num_checks()).map(|_| [None, Some(false), Some(true)][rng.gen_range(0..3)]).collect();
        let (a, b) = (dense.marginal(&part).unwrap(), net.marginal(&part).unwrap());
        assert!((a - b).abs() < 1e-12, "{part:?}: {a} vs {b}");
    }
    assert!((dense.marginal(&vec![None; lat.num_checks()]).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn chain_rule_histogram_matches_exact_distribution() {
    let (mut dense, _) = ad_models(0.2);
    let lat = dense.lattice().clone();
    let all = Syndrome::enumerate(&lat);
    let index: std::collections::HashMap<Syndrome, usize> = all.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    let n = 100_000;
    let mut counts = vec![0usize; all.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..n {
        counts[index[&sample_syndrome(&mut dense, &mut rng).unwrap()]] += 1;
    }
    let mut tv = 0.0;
    for (s, &c) in all.iter().zip(&counts) {
        let p = dense.syndrome_probability(s).unwrap();
        let expected = p * n as f64;
        tv += (c as f64 / n as f64 - p).abs() / 2.0;
        let sd = (expected * (1.0 - p)).sqrt();
        // Bonferroni-style bound over 256 cells
        assert!((c as f64 - expected).abs() <= 4.5 * sd + 1.0, "{s:?}: {c} vs {expected:.1}");
    }
    assert!(tv < 0.02, "total variation {tv}");
}

#[test]
fn dense_and_network_samplers_agree_draw_by_draw() {
    let (mut dense, mut net) = ad_models(0.2);
    let mut same = 0;
    for seed in 0..2000 {
        let a = sample_syndrome(&mut dense, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let b = sample_syndrome(&mut net, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        same += (a == b) as usize;
    }
    assert!(same >= 1995, "{same}");
    assert!(net.cached_prefixes() > 0);
}
