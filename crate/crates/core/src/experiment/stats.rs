//! Interval estimates, per-trial seeding and the trial-parallel map.

/// z-score of a two-sided 95% interval.
pub const Z95: f64 = 1.959963984540054;

/// Wilson score interval for `k` successes in `n` trials: `(center, half_width)`.
pub fn wilson_interval(k: usize, n: usize, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.5, 0.5);
    }
    let (k, n) = (k as f64, n as f64);
    let p = k / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    (center, half)
}

/// `[lo, hi]` of the Wilson interval.
pub fn wilson_bounds(k: usize, n: usize) -> (f64, f64) {
    let (c, h) = wilson_interval(k, n, Z95);
    ((c - h).max(0.0), (c + h).min(1.0))
}

/// Mean and 95% half-width (normal approximation with the sample standard
/// deviation).
pub fn mean_interval(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, Z95 * (var / n as f64).sqrt())
}

/// Least-squares line `y = slope·x + intercept` with its `R²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> LinearFit {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    LinearFit { slope, intercept, r2 }
}

/// Exponent `α` of the power law `y ∝ x^α` fitted in log-log space.
pub fn power_law_exponent(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    linear_fit(&lx, &ly).slope
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of trial `trial` at sweep point `point`.
pub fn trial_seed(seed: u64, point: u64, trial: u64) -> u64 {
    splitmix64(splitmix64(seed ^ splitmix64(point)) ^ trial)
}

/// Maps `f` over `0..n` on `workers` threads. Each worker handles a
/// contiguous block with its own state from `init`; the output is in trial
/// order, so it does not depend on the worker count as long as `f` depends
/// only on the trial index.
pub fn par_map<S, T, I, F>(n: usize, workers: usize, init: I, f: F) -> Vec<T>
where
    T: Send,
    I: Fn() -> S + Sync,
    F: Fn(&mut S, usize) -> T + Sync,
{
    let workers = workers.clamp(1, n.max(1));
    if workers == 1 {
        let mut s = init();
        return (0..n).map(|i| f(&mut s, i)).collect();
    }
    let chunk = n.div_ceil(workers);
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let (init, f) = (&init, &f);
                scope.spawn(move || {
                    let mut s = init();
                    (w * chunk..((w + 1) * chunk).min(n)).map(|i| f(&mut s, i)).collect::<Vec<T>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn wilson_known_values() {
        // 0 of 10: upper bound z^2/(n+z^2)
        let (lo, hi) = wilson_bounds(0, 10);
        assert_eq!(lo, 0.0);
        assert!((hi - Z95 * Z95 / (10.0 + Z95 * Z95)).abs() < 1e-12);
        let (c, h) = wilson_interval(50, 100, Z95);
        assert!((c - 0.5).abs() < 1e-12);
        assert!((h - 0.0961).abs() < 1e-3);
    }

    #[test]
    fn wilson_coverage() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for p in [0.01, 0.1, 0.5] {
            let n = 1000;
            let mut covered = 0;
            for _ in 0..1000 {
                let k = (0..n).filter(|_| rng.gen::<f64>() < p).count();
                let (lo, hi) = wilson_bounds(k, n);
                if lo <= p && p <= hi {
                    covered += 1;
                }
            }
            assert!(covered >= 930, "p={p}: {covered}");
        }
    }

    #[test]
    fn fits_recover_exact_models() {
        let xs = [9.0, 25.0, 49.0, 81.0];
        let f = linear_fit(&xs, &xs.map(|x| 3.0 * x + 2.0));
        assert!((f.slope - 3.0).abs() < 1e-12 && (f.intercept - 2.0).abs() < 1e-10 && (f.r2 - 1.0).abs() < 1e-12);
        assert!((power_law_exponent(&xs, &xs.map(|x| 0.5 * x.powf(1.7))) - 1.7).abs() < 1e-12);
    }

    #[test]
    fn mean_interval_of_constant() {
        assert_eq!(mean_interval(&[2.0, 2.0, 2.0]), (2.0, 0.0));
    }

    #[test]
    fn par_map_independent_of_workers() {
        let f = |_: &mut (), i: usize| trial_seed(5, 2, i as u64);
        let a = par_map(37, 1, || (), f);
        let b = par_map(37, 4, || (), f);
        assert_eq!(a, b);
        assert_ne!(trial_seed(5, 2, 0), trial_seed(5, 3, 0));
    }
}
