//! Cross-checks of the decoder and noise models against exhaustive oracles
//! on small lattices.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ExperimentKind, OutputFormat};
use super::stats::trial_seed;
use crate::baselines::{CosetTable, Mwpm};
use crate::channels::SelectionNorm;
use crate::decoder::{exact_chi, Decoder, DecoderConfig};
use crate::error::{Error, Result};
use crate::lattice::{build_lattice, recovery_frame, syndrome_of, Lattice, PauliFrame, Syndrome};
use crate::noise::{amplitude_damping, cbf_exact_distribution, cbf_mcmc_sample, cbf_network_factors, iid_network_factors, IsingParams};
use crate::oracle::{optimal_decode_dense, DenseNoise, DenseOracle};
use crate::tensor::C64;

/// Bond dimension whose sufficiency is checked against the dense optimum.
pub const SUFFICIENT_CHI: usize = 8;

/// Dense and network Choi entries must agree to this relative precision.
pub const CHOI_TOLERANCE: f64 = 1e-8;

/// One check: `value` is compared against `threshold` (smaller is better
/// unless stated in `detail`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub check: String,
    pub size: usize,
    pub param: String,
    pub param_value: f64,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn at_most(check: &str, size: usize, param: &str, param_value: f64, value: f64, threshold: f64, detail: String) -> Self {
        CheckOutcome {
            check: check.into(),
            size,
            param: param.into(),
            param_value,
            value,
            threshold,
            passed: value <= threshold,
            detail,
        }
    }
}

fn ad_oracle(lat: &Lattice, gamma: f64) -> Result<DenseOracle> {
    DenseOracle::new(lat, DenseNoise::Iid(amplitude_damping(gamma)?))
}

/// Largest entrywise deviation of the network logical Choi matrix from the
/// dense one over all syndromes, relative to the syndrome's `C_II`.
/// `chi = 0` contracts exactly.
pub fn check_dense_choi(d: usize, gamma: f64, chi: usize) -> Result<CheckOutcome> {
    let lat = build_lattice(d, d)?;
    let noise = iid_network_factors(&amplitude_damping(gamma)?, &lat)?;
    let chi = if chi == 0 { exact_chi(&lat, &noise) } else { chi };
    let dec = Decoder::new(&lat, &noise, DecoderConfig::with_chi(chi))?;
    let oracle = ad_oracle(&lat, gamma)?;
    let mut worst: f64 = 0.0;
    let (mut zero, mut failed) = (0, 0);
    for s in Syndrome::enumerate(&lat) {
        let (dense, p) = oracle.logical_channel(&s)?;
        let r = recovery_frame(&s, &lat)?;
        let sn = dec.network().impose_syndrome(&s, &r)?;
        let (tn, stats) = match sn.logical_choi(dec.config()) {
            Ok(v) => v,
            Err(Error::ZeroProbability) if p.abs() < 1e-14 => {
                zero += 1;
                continue;
            }
            // a truncated contraction can lose a syndrome altogether
            Err(_) => {
                failed += 1;
                continue;
            }
        };
        let scale = stats.log_scale.exp();
        let norm = dense.c[0][0].norm();
        for i in 0..4 {
            for j in 0..4 {
                let dev = (tn.c[i][j] * scale - dense.c[i][j]).norm() / norm;
                worst = worst.max(dev);
            }
        }
    }
    let mut c = CheckOutcome::at_most(
        "dense-choi",
        d,
        "gamma",
        gamma,
        worst,
        CHOI_TOLERANCE,
        format!("chi {chi}, {zero} zero-probability syndromes, {failed} failed contractions"),
    );
    c.passed &= failed == 0;
    Ok(c)
}

/// Probability mass of the syndromes whose `chi`-truncated selection
/// differs from the dense optimal one (diamond norm).
pub fn check_chi_sufficiency(d: usize, gamma: f64, chi: usize) -> Result<CheckOutcome> {
    let lat = build_lattice(d, d)?;
    let noise = iid_network_factors(&amplitude_damping(gamma)?, &lat)?;
    let dec = Decoder::new(&lat, &noise, DecoderConfig { chi, norm: SelectionNorm::Diamond, ..DecoderConfig::default() })?;
    let oracle = ad_oracle(&lat, gamma)?;
    let (mut mass, mut count, mut total) = (0.0, 0, 0.0);
    for s in Syndrome::enumerate(&lat) {
        let p = oracle.syndrome_probability(&s)?;
        total += p;
        if p <= 0.0 {
            continue;
        }
        let opt = optimal_decode_dense(&oracle, &s, SelectionNorm::Diamond)?;
        let differs = match dec.decode(&s) {
            Ok(r) => r.correction != opt,
            Err(_) => true,
        };
        if differs {
            mass += p;
            count += 1;
        }
    }
    Ok(CheckOutcome::at_most(
        "chi-sufficiency",
        d,
        "gamma",
        gamma,
        mass,
        0.01,
        format!("chi {chi}, {count} differing syndromes, total mass {total:.12}"),
    ))
}

/// Number of reachable bit-flip syndromes on which the network decoder and
/// exhaustive maximum likelihood disagree.
pub fn check_cbf_ml(d: usize, params: &IsingParams, chi: usize) -> Result<CheckOutcome> {
    let lat = build_lattice(d, d)?;
    let noise = cbf_network_factors(params, &lat)?;
    let dec = Decoder::new(&lat, &noise, DecoderConfig::with_chi(chi))?;
    let table = CosetTable::new(params, &lat)?;
    let (mut reachable, mut disagree) = (0, 0);
    for s in Syndrome::enumerate(&lat) {
        let Ok(ml) = table.decode(&s) else { continue };
        reachable += 1;
        match dec.decode(&s) {
            Ok(r) if r.correction == ml => {}
            _ => disagree += 1,
        }
    }
    Ok(CheckOutcome::at_most(
        "cbf-ml-agreement",
        d,
        "beta",
        params.beta,
        disagree as f64,
        0.0,
        format!("chi {chi}, {reachable} reachable syndromes"),
    ))
}

fn z_syndrome_key(lat: &Lattice, mask: u64) -> Result<u64> {
    let s = syndrome_of(&PauliFrame::from_x_mask(lat.num_qubits(), mask), lat)?;
    Ok(s.z.iter().enumerate().fold(0, |m, (i, &b)| m | (b as u64) << i))
}

/// Conditional distributions `p(σ|s)` with and without the `J2` term.
pub fn check_j2_irrelevance(d: usize, params: &IsingParams) -> Result<CheckOutcome> {
    let lat = build_lattice(d, d)?;
    let with = cbf_exact_distribution(params, &lat)?;
    let without = cbf_exact_distribution(&IsingParams { j2: 0.0, ..*params }, &lat)?;
    let keys: Vec<u64> = (0..with.probs.len() as u64).map(|m| z_syndrome_key(&lat, m)).collect::<Result<_>>()?;
    let mut sums: HashMap<u64, (f64, f64)> = HashMap::new();
    for (m, &k) in keys.iter().enumerate() {
        let e = sums.entry(k).or_default();
        e.0 += with.probs[m];
        e.1 += without.probs[m];
    }
    let mut worst: f64 = 0.0;
    for (m, &k) in keys.iter().enumerate() {
        let (a, b) = sums[&k];
        worst = worst.max((with.probs[m] / a - without.probs[m] / b).abs());
    }
    Ok(CheckOutcome::at_most(
        "j2-irrelevance",
        d,
        "beta",
        params.beta,
        worst,
        1e-12,
        format!("{} syndromes, J2 {} vs 0", sums.len(), params.j2),
    ))
}

/// Syndromes on which the matching frame is not of minimum weight, against
/// an exhaustive search over all X frames and all Z frames separately.
pub fn check_mwpm_optimality(d: usize) -> Result<CheckOutcome> {
    let lat = build_lattice(d, d)?;
    let n = lat.num_qubits();
    if n > 20 {
        return Err(Error::Capacity(format!("{n} sites is too many for the exhaustive frame search")));
    }
    let key = |b: &[bool]| b.iter().enumerate().fold(0u64, |m, (i, &v)| m | (v as u64) << i);
    // minimum X weight per Z-check outcome, minimum Z weight per X-check outcome
    let mut min_x: HashMap<u64, usize> = HashMap::new();
    let mut min_z: HashMap<u64, usize> = HashMap::new();
    for mask in 0..1u64 << n {
        let w = mask.count_ones() as usize;
        let fx = PauliFrame::from_x_mask(n, mask);
        let fz = PauliFrame { x: vec![false; n], z: fx.x.clone() };
        let e = min_x.entry(key(&syndrome_of(&fx, &lat)?.z)).or_insert(w);
        *e = (*e).min(w);
        let e = min_z.entry(key(&syndrome_of(&fz, &lat)?.x)).or_insert(w);
        *e = (*e).min(w);
    }
    let m = Mwpm::new(&lat);
    let mut bad = 0;
    let syndromes = Syndrome::enumerate(&lat);
    for s in &syndromes {
        let r = m.decode_full(s)?;
        let xw = r.frame.x.iter().filter(|&&b| b).count();
        let zw = r.frame.z.iter().filter(|&&b| b).count();
        let ok = syndrome_of(&r.frame, &lat)? == *s
            && (xw, zw) == (r.x_weight, r.z_weight)
            && Some(&xw) == min_x.get(&key(&s.z))
            && Some(&zw) == min_z.get(&key(&s.x));
        if !ok {
            bad += 1;
        }
    }
    Ok(CheckOutcome::at_most("mwpm-optimality", d, "none", 0.0, bad as f64, 0.0, format!("{} syndromes", syndromes.len())))
}

/// `|Σ_s p(s) - 1|` of the dense amplitude-damping pipeline.
pub fn check_normalization(d: usize, gamma: f64) -> Result<CheckOutcome> {
    let lat = build_lattice(d, d)?;
    let oracle = ad_oracle(&lat, gamma)?;
    let total: f64 = Syndrome::enumerate(&lat).iter().map(|s| oracle.syndrome_probability(s)).sum::<Result<f64>>()?;
    Ok(CheckOutcome::at_most("syndrome-normalization", d, "gamma", gamma, (total - 1.0).abs(), 1e-12, format!("sum {total:.15}")))
}

/// Global PTM of the CBF network factors against the exhaustive sum over
/// spin configurations (without `J2`, which the factors leave out).
///
/// Diagonal entries are compared after dividing by the identity entry, for
/// every string of I and Z plus random full strings; random off-diagonal
/// entries must vanish.
pub fn check_cbf_factors(d: usize, params: &IsingParams, seed: u64) -> Result<CheckOutcome> {
    let lat = build_lattice(d, d)?;
    let n = lat.num_qubits();
    let net = cbf_network_factors(params, &lat)?;
    let dist = cbf_exact_distribution(&IsingParams { j2: 0.0, ..*params }, &lat)?;
    // indices of I, X, Y, Z
    let flips_sign = |q: usize| q == 2 || q == 3;
    let expected = |q: &[usize]| -> f64 {
        let sel: u64 = (0..n).filter(|&k| flips_sign(q[k])).fold(0, |m, k| m | 1 << k);
        dist.probs.iter().enumerate().map(|(m, p)| if (m as u64 & sel).count_ones() % 2 == 1 { -p } else { *p }).sum()
    };
    let ident = vec![0usize; n];
    let id_entry = net.global_entry(&ident, &ident)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut strings: Vec<Vec<usize>> = (0..1u64 << n).map(|m| (0..n).map(|k| if m >> k & 1 == 1 { 3 } else { 0 }).collect()).collect();
    strings.extend((0..200).map(|_| (0..n).map(|_| rng.gen_range(0..4)).collect::<Vec<usize>>()));
    let mut worst: f64 = 0.0;
    for q in &strings {
        let v: C64 = net.global_entry(q, q)? / id_entry;
        worst = worst.max((v.re - expected(q)).abs()).max(v.im.abs());
    }
    for _ in 0..50 {
        let out: Vec<usize> = (0..n).map(|_| rng.gen_range(0..4)).collect();
        let mut inp: Vec<usize> = (0..n).map(|_| rng.gen_range(0..4)).collect();
        if inp == out {
            inp[0] = (inp[0] + 1) % 4;
        }
        worst = worst.max((net.global_entry(&out, &inp)? / id_entry).norm());
    }
    Ok(CheckOutcome::at_most(
        "cbf-factors-ptm",
        d,
        "beta",
        params.beta,
        worst,
        1e-10,
        format!("{} diagonal and 50 off-diagonal entries", strings.len()),
    ))
}

/// Largest z-score of the Metropolis flip-count histogram against exact
/// enumeration, over independent chains of `sweeps` sweeps each.
pub fn check_mcmc(d: usize, params: &IsingParams, samples: usize, sweeps: usize, seed: u64) -> Result<CheckOutcome> {
    let lat = build_lattice(d, d)?;
    let n = lat.num_qubits();
    let dist = cbf_exact_distribution(params, &lat)?;
    let mut expected = vec![0.0; n + 1];
    for (m, p) in dist.probs.iter().enumerate() {
        expected[m.count_ones() as usize] += p;
    }
    let mut counts = vec![0usize; n + 1];
    for i in 0..samples {
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, 0, i as u64));
        let c = cbf_mcmc_sample(params, &lat, sweeps, &mut rng)?;
        counts[c.spins.iter().filter(|&&s| s < 0).count()] += 1;
    }
    let nf = samples as f64;
    let mut worst: f64 = 0.0;
    for (k, &p) in expected.iter().enumerate() {
        let dev = counts[k] as f64 - nf * p;
        let sd = (nf * p * (1.0 - p)).sqrt();
        let z = if sd > 0.0 { dev.abs() / sd } else if dev.abs() > 0.5 { f64::INFINITY } else { 0.0 };
        worst = worst.max(z);
    }
    Ok(CheckOutcome::at_most(
        "mcmc-vs-exact",
        d,
        "beta",
        params.beta,
        worst,
        3.0,
        format!("{samples} chains of {sweeps} sweeps, {} flip-count cells", n + 1),
    ))
}

/// Sweeps per independent chain in the MCMC check.
pub const MCMC_CHECK_SWEEPS: usize = 1000;

/// Every check of an `oracle-check` configuration, in a fixed order.
pub fn run_oracle_checks(cfg: &ExperimentConfig) -> Result<Vec<CheckOutcome>> {
    if cfg.kind != ExperimentKind::OracleCheck {
        return Err(Error::Config("run_oracle_checks needs an oracle-check config".into()));
    }
    cfg.validate()?;
    let mut out = Vec::new();
    for &d in &cfg.sizes {
        for &g in &cfg.gammas {
            out.push(check_dense_choi(d, g, cfg.chi)?);
            out.push(check_normalization(d, g)?);
            out.push(check_chi_sufficiency(d, g, SUFFICIENT_CHI)?);
        }
        for &ib in &cfg.inv_betas {
            let p = cfg.ising(ib);
            out.push(check_cbf_ml(d, &p, SUFFICIENT_CHI)?);
            out.push(check_j2_irrelevance(d, &p)?);
            out.push(check_cbf_factors(d, &p, cfg.seed)?);
            out.push(check_mcmc(d, &p, cfg.samples, MCMC_CHECK_SWEEPS, cfg.seed)?);
        }
        out.push(check_mwpm_optimality(d)?);
    }
    Ok(out)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub const CHECK_CSV_HEADER: &str = "check,size,param,param_value,value,threshold,passed,detail";

/// Serialized check results with the config echo, like [`super::render`].
pub fn render_checks(checks: &[CheckOutcome], config: &serde_json::Value, format: OutputFormat) -> Result<String> {
    use super::output::round12;
    match format {
        OutputFormat::Csv => {
            let mut out = String::new();
            if let serde_json::Value::Object(map) = config {
                for (k, v) in map {
                    out.push_str(&format!("# {k}: {v}\n"));
                }
            }
            out.push_str(CHECK_CSV_HEADER);
            out.push('\n');
            for c in checks {
                let fields = [
                    c.check.clone(),
                    c.size.to_string(),
                    c.param.clone(),
                    round12(c.param_value).to_string(),
                    format!("{:e}", round12(c.value)),
                    format!("{:e}", c.threshold),
                    c.passed.to_string(),
                    csv_field(&c.detail),
                ];
                out.push_str(&fields.join(","));
                out.push('\n');
            }
            Ok(out)
        }
        OutputFormat::Json => {
            let doc = serde_json::json!({ "config": config, "checks": checks });
            let mut s = serde_json::to_string_pretty(&doc).map_err(|e| Error::Io(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
    }
}
