//! One test per acceptance criterion; each prints a single PASS/FAIL line
//! with the measured quantities.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use surftn::channels::{random_kraus, ptm_from_kraus};
use surftn::decoder::exact_chi;
use surftn::experiment::{run_cbf_benchmark, run_timing, trial_seed, wilson_bounds, ExperimentConfig, ExperimentKind};
use surftn::noise::cbf_exact_distribution;
use surftn::oracle::optimal_decode_dense;
use surftn::{
    amplitude_damping, build_lattice, cbf_mcmc_sample, cbf_network_factors, diamond_distance_from_identity,
    iid_network_factors, recovery_frame, syndrome_of, trace_distance_from_identity, CosetTable, Decoder, DecoderConfig,
    DenseNoise, DenseOracle, IsingParams, KrausChannel, Mwpm, PauliFrame, QubitChannel, SelectionNorm, Syndrome,
};

/// Criteria run one at a time so the timing measurement is not disturbed.
static SERIAL: std::sync::Mutex<()> = std::sync::Mutex::new(());

fn serial() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn report(n: u32, name: &str, pass: bool, detail: String) {
    println!("[{}] criterion {n:>2} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {n} ({name}) failed: {detail}");
}

fn workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Benchmark Ising couplings at inverse temperature `beta`.
fn ising(beta: f64) -> IsingParams {
    IsingParams { beta, h: 0.01, j1: 1.0, j2: -1.5 }
}

#[test]
fn criterion_01_dense_choi_equality() {
    let _guard = serial();
    let start = std::time::Instant::now();
    let lat = build_lattice(3, 3).unwrap();
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for gamma in [0.09, 0.2, 0.39] {
        let k = amplitude_damping(gamma).unwrap();
        let noise = iid_network_factors(&k, &lat).unwrap();
        let dec = Decoder::new(&lat, &noise, DecoderConfig::with_chi(exact_chi(&lat, &noise))).unwrap();
        let oracle = DenseOracle::new(&lat, DenseNoise::Iid(k)).unwrap();
        for s in Syndrome::enumerate(&lat) {
            let (dense, _) = oracle.logical_channel(&s).unwrap();
            let sn = dec.network().impose_syndrome(&s, &recovery_frame(&s, &lat).unwrap()).unwrap();
            let Ok((tn, stats)) = sn.logical_choi(dec.config()) else {
                failures += 1;
                continue;
            };
            let scale = stats.log_scale.exp();
            let norm = dense.c[0][0].norm();
            for i in 0..4 {
                for j in 0..4 {
                    worst = worst.max((tn.c[i][j] * scale - dense.c[i][j]).norm() / norm);
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        1,
        "dense-oracle Choi equality",
        worst < 1e-8 && failures == 0 && secs < 600.0,
        format!("max relative deviation {worst:.2e} over 3x256 syndromes, {failures} failed, {secs:.1} s"),
    );
}

#[test]
fn criterion_02_chi8_sufficiency() {
    let _guard = serial();
    let start = std::time::Instant::now();
    let lat = build_lattice(3, 3).unwrap();
    let k = amplitude_damping(0.2).unwrap();
    let noise = iid_network_factors(&k, &lat).unwrap();
    let dec = Decoder::new(&lat, &noise, DecoderConfig { chi: 8, norm: SelectionNorm::Diamond, ..DecoderConfig::default() }).unwrap();
    let oracle = DenseOracle::new(&lat, DenseNoise::Iid(k)).unwrap();
    let mut mass = 0.0;
    for s in Syndrome::enumerate(&lat) {
        let p = oracle.syndrome_probability(&s).unwrap();
        let opt = optimal_decode_dense(&oracle, &s, SelectionNorm::Diamond).unwrap();
        if dec.decode(&s).map(|r| r.correction) != Ok(opt) {
            mass += p;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    report(2, "chi=8 sufficiency", mass < 0.01 && secs < 600.0, format!("differing mass {mass:.3e}, {secs:.1} s"));
}

#[test]
fn criterion_03_cbf_exact_ml_agreement() {
    let _guard = serial();
    let start = std::time::Instant::now();
    let lat = build_lattice(3, 3).unwrap();
    let mut detail = Vec::new();
    let mut pass = true;
    for beta in [0.8, 1.0, 1.4] {
        let p = ising(beta);
        let dec = Decoder::new(&lat, &cbf_network_factors(&p, &lat).unwrap(), DecoderConfig::with_chi(8)).unwrap();
        let table = CosetTable::new(&p, &lat).unwrap();
        let (mut reachable, mut agree) = (0, 0);
        for s in Syndrome::enumerate(&lat) {
            let Ok(ml) = table.decode(&s) else { continue };
            reachable += 1;
            agree += (dec.decode(&s).map(|r| r.correction) == Ok(ml)) as usize;
        }
        pass &= reachable > 0 && agree == reachable;
        detail.push(format!("beta {beta}: {agree}/{reachable}"));
    }
    let secs = start.elapsed().as_secs_f64();
    report(3, "CBF exact-ML agreement", pass && secs < 300.0, format!("{}, {secs:.1} s", detail.join(", ")));
}

#[test]
fn criterion_04_j2_irrelevance() {
    let _guard = serial();
    let lat = build_lattice(3, 3).unwrap();
    let n = lat.num_qubits();
    let mut worst: f64 = 0.0;
    for beta in [0.8, 1.0, 1.4] {
        let a = cbf_exact_distribution(&ising(beta), &lat).unwrap();
        let b = cbf_exact_distribution(&IsingParams { j2: 0.0, ..ising(beta) }, &lat).unwrap();
        let mut groups: HashMap<Vec<bool>, Vec<usize>> = HashMap::new();
        for m in 0..1usize << n {
            let s = syndrome_of(&PauliFrame::from_x_mask(n, m as u64), &lat).unwrap();
            groups.entry(s.z).or_default().push(m);
        }
        for members in groups.values() {
            let za: f64 = members.iter().map(|&m| a.probs[m]).sum();
            let zb: f64 = members.iter().map(|&m| b.probs[m]).sum();
            for &m in members {
                worst = worst.max((a.probs[m] / za - b.probs[m] / zb).abs());
            }
        }
    }
    report(4, "J2 irrelevance", worst <= 1e-12, format!("max |p(sigma|s) difference| {worst:.2e}"));
}

fn cbf_config(inv_betas: Vec<f64>, samples: usize) -> ExperimentConfig {
    ExperimentConfig {
        sizes: vec![5],
        inv_betas,
        samples,
        workers: workers(),
        ..ExperimentConfig::defaults(ExperimentKind::CbfSweep)
    }
}

#[test]
fn criterion_05_decoder_beats_matching() {
    let _guard = serial();
    let start = std::time::Instant::now();
    let rows = run_cbf_benchmark(&cbf_config(vec![0.8, 0.9, 1.0], 12_000)).unwrap();
    let mut pass = true;
    let mut detail = Vec::new();
    for ib in [0.8, 0.9, 1.0] {
        let get = |name: &str| rows.iter().find(|r| r.decoder == name && r.param_value == ib).unwrap();
        let (tn, mw) = (get("tn"), get("mwpm"));
        let n_tn = tn.samples - tn.decode_errors;
        let n_mw = mw.samples - mw.decode_errors;
        let (_, tn_hi) = wilson_bounds(tn.failures.unwrap(), n_tn);
        let (mw_lo, _) = wilson_bounds(mw.failures.unwrap(), n_mw);
        pass &= tn.value < mw.value && tn_hi < mw_lo && tn.decode_errors == 0;
        detail.push(format!(
            "1/beta {ib}: tn {:.4} (hi {tn_hi:.4}, {} errors) vs mwpm {:.4} (lo {mw_lo:.4})",
            tn.value, tn.decode_errors, mw.value
        ));
    }
    let secs = start.elapsed().as_secs_f64();
    report(5, "decoder-vs-MWPM separation", pass && secs < 7200.0, format!("{}; {secs:.0} s", detail.join("; ")));
}

#[test]
fn criterion_06_low_noise_suppression() {
    let _guard = serial();
    let rows = run_cbf_benchmark(&cbf_config(vec![0.7], 10_000)).unwrap();
    let tn = rows.iter().find(|r| r.decoder == "tn").unwrap();
    let mw = rows.iter().find(|r| r.decoder == "mwpm").unwrap();
    report(
        6,
        "low-noise suppression",
        tn.failures == Some(0) && tn.decode_errors == 0,
        format!("tn failures {:?} of {} (mwpm {:?})", tn.failures, tn.samples, mw.failures),
    );
}

#[test]
fn criterion_07_linear_time_scaling() {
    let _guard = serial();
    let cfg = ExperimentConfig::defaults(ExperimentKind::Timing);
    let r = run_timing(&cfg).unwrap();
    let times: Vec<String> = r.points.iter().map(|p| format!("N={} {:.1} ms", p.qubits, 1e3 * p.decode_s)).collect();
    report(
        7,
        "linear-time scaling",
        r.decode_fit.r2 > 0.95 && r.decode_exponent < 1.3,
        format!(
            "decode {}; affine R2 {:.4}, exponent {:.3} (contraction only: R2 {:.4}, exponent {:.3})",
            times.join(", "),
            r.decode_fit.r2,
            r.decode_exponent,
            r.contraction_fit.r2,
            r.contraction_exponent
        ),
    );
}

#[test]
fn criterion_08_channel_metric_anchors() {
    let _guard = serial();
    let id = diamond_distance_from_identity(&QubitChannel::identity()).unwrap();
    let x = diamond_distance_from_identity(&QubitChannel::pauli_conjugation(surftn::Pauli::X)).unwrap();
    let bf = diamond_distance_from_identity(&ptm_from_kraus(&KrausChannel::bit_flip(0.1).unwrap()).unwrap()).unwrap();
    let anchors = id == 0.0 && (x - 2.0).abs() <= 1e-6 && (bf - 0.2).abs() <= 1e-6;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut lower_violations, mut upper_violations) = (0, 0);
    let mut ratio = (f64::INFINITY, 0.0f64);
    for i in 0..100 {
        let e = ptm_from_kraus(&random_kraus(1 + i % 4, &mut rng)).unwrap();
        let t = trace_distance_from_identity(&e).unwrap();
        let d = diamond_distance_from_identity(&e).unwrap();
        lower_violations += (t > d) as usize;
        upper_violations += (d > 2.0 * t) as usize;
        ratio = (ratio.0.min(d / t), ratio.1.max(d / t));
    }
    report(
        8,
        "channel-metric anchors",
        anchors && lower_violations == 0 && upper_violations == 0,
        format!(
            "identity {id:e}, X {x:.9}, bit-flip {bf:.9}; trace <= diamond violated {lower_violations}/100, \
             diamond <= 2 trace violated {upper_violations}/100, diamond/trace in [{:.6}, {:.6}]",
            ratio.0, ratio.1
        ),
    );
}

#[test]
fn criterion_09_noise_model_suites() {
    let _guard = serial();
    let lat = build_lattice(3, 3).unwrap();
    let n = lat.num_qubits();
    let p = ising(1.0);

    // Metropolis flip-count histogram of independent chains against enumeration
    let exact = cbf_exact_distribution(&p, &lat).unwrap();
    let mut expected = vec![0.0; n + 1];
    for (m, q) in exact.probs.iter().enumerate() {
        expected[m.count_ones() as usize] += q;
    }
    let samples = 10_000;
    let mut counts = vec![0usize; n + 1];
    for i in 0..samples {
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(99, 0, i as u64));
        let c = cbf_mcmc_sample(&p, &lat, 1000, &mut rng).unwrap();
        counts[c.spins.iter().filter(|&&s| s < 0).count()] += 1;
    }
    let mut z_max: f64 = 0.0;
    for k in 0..=n {
        let mean = samples as f64 * expected[k];
        let sd = (mean * (1.0 - expected[k])).sqrt();
        let dev = (counts[k] as f64 - mean).abs();
        z_max = z_max.max(if sd > 0.0 { dev / sd } else if dev > 0.0 { f64::INFINITY } else { 0.0 });
    }

    // network factors against the exhaustive global PTM (no J2 in the factors)
    let net = cbf_network_factors(&p, &lat).unwrap();
    let plain = cbf_exact_distribution(&IsingParams { j2: 0.0, ..p }, &lat).unwrap();
    let ident = vec![0usize; n];
    let id_entry = net.global_entry(&ident, &ident).unwrap();
    let mut ptm_dev: f64 = 0.0;
    for zmask in 0..1u64 << n {
        // Z on the sites of `zmask`; a flip anticommutes with Z
        let q: Vec<usize> = (0..n).map(|k| if zmask >> k & 1 == 1 { 3 } else { 0 }).collect();
        let want: f64 = plain.probs.iter().enumerate().map(|(m, w)| if (m as u64 & zmask).count_ones() % 2 == 1 { -w } else { *w }).sum();
        let got = net.global_entry(&q, &q).unwrap() / id_entry;
        ptm_dev = ptm_dev.max((got.re - want).abs()).max(got.im.abs());
    }

    // syndrome probabilities of the dense AD pipeline
    let mut norm_dev: f64 = 0.0;
    for gamma in [0.09, 0.2, 0.39] {
        let o = DenseOracle::new(&lat, DenseNoise::Iid(amplitude_damping(gamma).unwrap())).unwrap();
        let total: f64 = Syndrome::enumerate(&lat).iter().map(|s| o.syndrome_probability(s).unwrap()).sum();
        norm_dev = norm_dev.max((total - 1.0).abs());
    }
    report(
        9,
        "noise-model statistical suites",
        z_max <= 3.0 && ptm_dev <= 1e-10 && norm_dev <= 1e-12,
        format!("MCMC max |z| {z_max:.2} over {} cells, factor PTM deviation {ptm_dev:.2e}, |sum p(s) - 1| {norm_dev:.2e}", n + 1),
    );
}

#[test]
fn criterion_10_mwpm_optimality() {
    let _guard = serial();
    let lat = build_lattice(3, 3).unwrap();
    let n = lat.num_qubits();
    let mut min_x: HashMap<Vec<bool>, usize> = HashMap::new();
    let mut min_z: HashMap<Vec<bool>, usize> = HashMap::new();
    for mask in 0..1u64 << n {
        let fx = PauliFrame::from_x_mask(n, mask);
        let fz = PauliFrame { x: vec![false; n], z: fx.x.clone() };
        let w = mask.count_ones() as usize;
        let e = min_x.entry(syndrome_of(&fx, &lat).unwrap().z).or_insert(w);
        *e = (*e).min(w);
        let e = min_z.entry(syndrome_of(&fz, &lat).unwrap().x).or_insert(w);
        *e = (*e).min(w);
    }
    let m = Mwpm::new(&lat);
    let mut bad = 0;
    for s in Syndrome::enumerate(&lat) {
        let r = m.decode_full(&s).unwrap();
        let xw = r.frame.x.iter().filter(|&&b| b).count();
        let zw = r.frame.z.iter().filter(|&&b| b).count();
        let ok = syndrome_of(&r.frame, &lat).unwrap() == s && xw == min_x[&s.z] && zw == min_z[&s.x];
        bad += !ok as usize;
    }
    report(10, "MWPM optimality", bad == 0, format!("{bad} of 256 syndromes off the exhaustive minimum"));
}

