use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use surftn::noise::{cbf_exact_distribution, CbfChain, ChainStart, IsingGeometry};
use surftn::{build_lattice, IsingParams};

/// Empirical Metropolis transition rate of flipping site `i` from `spins`.
fn flip_rate(chain: &mut CbfChain, spins: &[i8], i: usize, trials: usize, rng: &mut ChaCha8Rng) -> f64 {
    let mut acc = 0;
    for _ in 0..trials {
        chain.set_spins(spins);
        acc += chain.try_flip(i, rng) as usize;
    }
    acc as f64 / trials as f64
}

#[test]
fn metropolis_detailed_balance_on_sampled_pairs() {
    let lat = build_lattice(3, 3).unwrap();
    let n = lat.num_qubits();
    let p = IsingParams::benchmark(1.0);
    let exact = cbf_exact_distribution(&p, &lat).unwrap();
    let geo = IsingGeometry::new(&lat);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut chain = CbfChain::new(&geo, p, ChainStart::AllUp, &mut rng);
    let mut tested = 0;
    while tested < 6 {
        let a: u64 = rng.gen_range(0..1 << n);
        let i = rng.gen_range(0..n);
        let b = a ^ 1 << i;
        let spins = |m: u64| (0..n).map(|k| if m >> k & 1 == 1 { -1i8 } else { 1 }).collect::<Vec<_>>();
        let (pa, pb) = (exact.probs[a as usize], exact.probs[b as usize]);
        // rates below 2% need more trials than the tolerance allows
        if pa.min(pb) / pa.max(pb) < 0.02 {
            continue;
        }
        let fwd = flip_rate(&mut chain, &spins(a), i, 100_000, &mut rng);
        let back = flip_rate(&mut chain, &spins(b), i, 100_000, &mut rng);
        let (lhs, rhs) = (pa * fwd, pb * back);
        assert!((lhs - rhs).abs() / lhs.max(rhs) < 0.05, "{a:b} <-> {b:b}: {lhs} vs {rhs}");
        tested += 1;
    }
}

#[test]
fn long_chain_visits_both_ordered_states() {
    let lat = build_lattice(3, 3).unwrap();
    let geo = IsingGeometry::new(&lat);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut chain = CbfChain::new(&geo, IsingParams::benchmark(1.0), ChainStart::AllUp, &mut rng);
    let (mut up, mut down) = (0, 0);
    for _ in 0..20_000 {
        chain.sweep(&mut rng);
        let m: i32 = chain.spins().iter().map(|&s| s as i32).sum();
        up += (m > 0) as usize;
        down += (m < 0) as usize;
    }
    assert!(up > 1000 && down > 1000, "{up} {down}");
}
