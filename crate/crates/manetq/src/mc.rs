//! Seeded, reproducible Monte Carlo evaluation of every metric.
//!
//! # Determinism contract
//!
//! Results are a pure function of [`TrialConfig`], independent of thread
//! count and scheduling. The generator algorithm is part of the external
//! contract so that runs are reproducible across implementations:
//!
//! * Trial `t` (0-based) draws from `ChaCha8Rng::seed_from_u64(seed)` with
//!   `set_stream(t)` — the ChaCha8 stream cipher keyed by the rand_chacha
//!   0.3 / rand_core 0.6 `seed_from_u64` expansion of the 64-bit seed, with
//!   the trial index as the 64-bit stream number.
//! * Per trial, in order: in varying-node mode, `n` on/off draws (uniform
//!   f64 compared against `p`); then one uniform f64 in `[0, 1)` per active
//!   node for its position. Uniforms are rand 0.6-compatible 53-bit
//!   `Standard` f64 draws.
//! * Trials are accumulated in fixed chunks of [`CHUNK_TRIALS`] and chunk
//!   partials are combined in chunk order, so floating-point summation order
//!   never depends on the degree of parallelism.
//!
//! # Conventions
//!
//! Coverage uses the circular (periodic) convention even under disconnected
//! boundaries, matching the exact formula's derivation; `coverage_clip`
//! optionally clips radio discs to `[0, 1]` for exploratory use. In
//! varying-node mode, trials with 0 active nodes score 0 on every metric,
//! and trials with 1 active node score segmentation 1, reachability 0,
//! vulnerability 0, coverage `min(2*rho, 1)`, not connected.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::MetricKind;
use crate::params::SystemParams;
use crate::varying::OnProbability;

/// Trials per accumulation chunk; fixed so that summation order is
/// independent of worker count.
pub const CHUNK_TRIALS: u64 = 4096;

/// Disconnection orders reported by [`run`] go up to
/// `min(n, floor(1/rho), MAX_REPORTED_DISCONNECTION)`.
pub const MAX_REPORTED_DISCONNECTION: u64 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Unit circle; the outermost nodes may connect via the boundary.
    Periodic,
    /// Plain interval; no wrap-around link.
    Disconnected,
}

impl std::str::FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "periodic" | "pb" => Ok(Boundary::Periodic),
            "disconnected" | "db" => Ok(Boundary::Disconnected),
            other => Err(Error::Parse(format!("unknown boundary {other:?}"))),
        }
    }
}

/// One simulation experiment.
#[derive(Debug, Clone)]
pub struct TrialConfig {
    pub params: SystemParams,
    pub boundary: Boundary,
    pub trials: u64,
    pub seed: u64,
    /// Varying-node mode: thin nodes by independent Bernoulli(p) draws.
    pub on_probability: Option<OnProbability>,
    /// Clip radio discs to `[0, 1]` when computing coverage (exploratory;
    /// default off keeps the circular convention).
    pub coverage_clip: bool,
}

impl TrialConfig {
    pub fn new(params: SystemParams, boundary: Boundary, trials: u64, seed: u64) -> Result<Self> {
        if trials == 0 {
            return Err(Error::InvalidParameter("trial count must be >= 1".into()));
        }
        Ok(Self { params, boundary, trials, seed, on_probability: None, coverage_clip: false })
    }
}

/// Metric values of a single sampled configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    /// Number of gaps `>= rho` (circular gaps under periodic boundaries,
    /// interior gaps under disconnected ones).
    pub disconnect_count: u64,
    pub connected: bool,
    pub coverage: f64,
    pub segmentation: f64,
    pub vulnerability: f64,
    pub reachability: f64,
    /// Nodes participating in this trial (less than `n` in varying-node mode).
    pub active_count: u64,
}

/// Monte Carlo estimate of one metric.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    /// Sample standard deviation over sqrt(trials).
    pub stderr: f64,
    pub trials: u64,
    pub seed: u64,
}

/// Sorted node positions and the `n` circular next-neighbour gaps.
/// `gaps[i]` for `i < n-1` is `positions[i+1] - positions[i]`; `gaps[n-1]`
/// is the wrap-around gap `positions[0] + 1 - positions[n-1]`.
#[derive(Debug, Clone)]
pub struct NodeSample {
    pub positions: Vec<f64>,
    pub gaps: Vec<f64>,
}

/// Draw `n` uniform positions and return them sorted along with the circular
/// gap vector. The gaps are non-negative and sum to 1 up to rounding.
pub fn sample_gaps<R: Rng>(n: u64, rng: &mut R) -> NodeSample {
    let n = n as usize;
    let mut positions: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
    positions.sort_unstable_by(f64::total_cmp);
    let mut gaps = Vec::with_capacity(n);
    for i in 0..n.saturating_sub(1) {
        gaps.push(positions[i + 1] - positions[i]);
    }
    gaps.push(positions[0] + 1.0 - positions[n - 1]);
    NodeSample { positions, gaps }
}

/// Evaluate all metrics on one gap configuration.
///
/// The disconnect count runs over the full circular gap set under periodic
/// boundaries and over the `n-1` interior gaps under disconnected ones.
/// Coverage always uses the circular convention here; vulnerability always
/// uses circular adjacency. Reachability is 1 when connected, otherwise
/// `n^-2 * sum b_i (b_i - 1)` over the segment sizes.
pub fn eval_trial(gaps: &[f64], rho: f64, boundary: Boundary) -> TrialOutcome {
    let n = gaps.len();
    assert!(n >= 1, "eval_trial needs at least one gap");

    let counted = match boundary {
        Boundary::Periodic => gaps,
        Boundary::Disconnected => &gaps[..n - 1],
    };
    let disconnect_count = counted.iter().filter(|&&y| y >= rho).count() as u64;
    let connected = disconnect_count == 0;

    let uncovered: f64 = gaps.iter().map(|&y| (y - 2.0 * rho).max(0.0)).sum();
    let coverage = (1.0 - uncovered).clamp(0.0, 1.0);

    let segmentation = disconnect_count as f64 / n as f64;

    let vulnerability = if n < 2 {
        0.0
    } else {
        let important = (0..n)
            .filter(|&j| {
                let left = gaps[(j + n - 1) % n];
                let right = gaps[j];
                left < rho && right < rho && left + right >= rho
            })
            .count();
        important as f64 / n as f64
    };

    let reachability = if connected {
        1.0
    } else {
        let nf = n as f64;
        let sum: f64 = segment_sizes(gaps, rho, boundary)
            .into_iter()
            .map(|b| (b * (b - 1)) as f64)
            .sum();
        sum / (nf * nf)
    };

    TrialOutcome {
        disconnect_count,
        connected,
        coverage,
        segmentation,
        vulnerability,
        reachability,
        active_count: n as u64,
    }
}

/// Segment sizes of a disconnected configuration (at least one splitting
/// gap under PB; any configuration under DB).
fn segment_sizes(gaps: &[f64], rho: f64, boundary: Boundary) -> Vec<u64> {
    let n = gaps.len();
    match boundary {
        Boundary::Periodic => {
            // gap i separates node i from node i+1 (mod n); k splitting gaps
            // partition the circle into k arcs of nodes.
            let splits: Vec<usize> = (0..n).filter(|&i| gaps[i] >= rho).collect();
            debug_assert!(!splits.is_empty());
            let k = splits.len();
            (0..k)
                .map(|t| {
                    let next = splits[(t + 1) % k];
                    let diff = (next + n - splits[t]) % n;
                    if diff == 0 { n as u64 } else { diff as u64 }
                })
                .collect()
        }
        Boundary::Disconnected => {
            // k splitting interior gaps cut the line into k+1 runs.
            let mut sizes = Vec::new();
            let mut start = 0usize;
            for (i, &g) in gaps[..n - 1].iter().enumerate() {
                if g >= rho {
                    sizes.push((i + 1 - start) as u64);
                    start = i + 1;
                }
            }
            sizes.push((n - start) as u64);
            sizes
        }
    }
}

fn clipped_coverage(positions: &[f64], rho: f64) -> f64 {
    let mut covered = 0.0;
    let mut cursor = 0.0f64;
    for &x in positions {
        let lo = (x - rho).max(cursor).min(1.0);
        let hi = (x + rho).clamp(0.0, 1.0);
        if hi > lo {
            covered += hi - lo;
        }
        cursor = cursor.max(hi);
    }
    covered
}

/// Per-trial values relevant to the estimates; `covered` is the coveredness
/// indicator (every circular gap below `2*rho`).
struct TrialValues {
    outcome: TrialOutcome,
    covered: bool,
}

fn run_one_trial(config: &TrialConfig, trial_index: u64) -> TrialValues {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(trial_index);

    let n = config.params.n();
    let rho = config.params.rho().to_f64();

    let active = match &config.on_probability {
        None => n,
        Some(p) => {
            let p = p.to_f64();
            (0..n).filter(|_| rng.gen::<f64>() < p).count() as u64
        }
    };

    match active {
        0 => TrialValues {
            outcome: TrialOutcome {
                disconnect_count: 0,
                connected: false,
                coverage: 0.0,
                segmentation: 0.0,
                vulnerability: 0.0,
                reachability: 0.0,
                active_count: 0,
            },
            covered: false,
        },
        1 if config.on_probability.is_some() => TrialValues {
            outcome: TrialOutcome {
                disconnect_count: 1,
                connected: false,
                coverage: (2.0 * rho).min(1.0),
                segmentation: 1.0,
                vulnerability: 0.0,
                reachability: 0.0,
                active_count: 1,
            },
            covered: 2.0 * rho > 1.0,
        },
        _ => {
            let sample = sample_gaps(active, &mut rng);
            let mut outcome = eval_trial(&sample.gaps, rho, config.boundary);
            if config.coverage_clip {
                outcome.coverage = clipped_coverage(&sample.positions, rho);
            }
            let covered = sample.gaps.iter().all(|&y| y < 2.0 * rho);
            TrialValues { outcome, covered }
        }
    }
}

/// Partial sums over one chunk of trials. Indicator metrics accumulate as
/// integer counts, continuous ones as (sum, sum of squares).
struct ChunkAccum {
    connected: u64,
    covered: u64,
    disc_counts: Vec<u64>,
    coverage: (f64, f64),
    segmentation: (f64, f64),
    vulnerability: (f64, f64),
    reachability: (f64, f64),
}

impl ChunkAccum {
    fn new(k_slots: usize) -> Self {
        Self {
            connected: 0,
            covered: 0,
            disc_counts: vec![0; k_slots],
            coverage: (0.0, 0.0),
            segmentation: (0.0, 0.0),
            vulnerability: (0.0, 0.0),
            reachability: (0.0, 0.0),
        }
    }

    fn add(&mut self, v: &TrialValues) {
        let o = &v.outcome;
        self.connected += u64::from(o.connected);
        self.covered += u64::from(v.covered);
        if let Some(slot) = self.disc_counts.get_mut(o.disconnect_count as usize) {
            *slot += 1;
        }
        for (acc, x) in [
            (&mut self.coverage, o.coverage),
            (&mut self.segmentation, o.segmentation),
            (&mut self.vulnerability, o.vulnerability),
            (&mut self.reachability, o.reachability),
        ] {
            acc.0 += x;
            acc.1 += x * x;
        }
    }

    fn merge(&mut self, other: &ChunkAccum) {
        self.connected += other.connected;
        self.covered += other.covered;
        for (a, b) in self.disc_counts.iter_mut().zip(&other.disc_counts) {
            *a += b;
        }
        for (a, b) in [
            (&mut self.coverage, other.coverage),
            (&mut self.segmentation, other.segmentation),
            (&mut self.vulnerability, other.vulnerability),
            (&mut self.reachability, other.reachability),
        ] {
            a.0 += b.0;
            a.1 += b.1;
        }
    }
}

fn estimate_from_sums(sum: f64, sumsq: f64, trials: u64, seed: u64) -> Estimate {
    let n = trials as f64;
    let mean = sum / n;
    let stderr = if trials > 1 {
        let var = ((sumsq - sum * sum / n) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    Estimate { mean, stderr, trials, seed }
}

fn estimate_from_count(count: u64, trials: u64, seed: u64) -> Estimate {
    let c = count as f64;
    estimate_from_sums(c, c, trials, seed)
}

/// Run the experiment and return per-metric estimates.
///
/// Trials are embarrassingly parallel over the current rayon pool; shared
/// state is the read-only config, and the reduction is the fixed-order chunk
/// merge described in the module docs, so output is identical for any worker
/// count. Disconnection orders `k = 0 ..= min(n, floor(1/rho), 10)` are
/// included alongside the six named metrics.
pub fn run(config: &TrialConfig) -> Result<BTreeMap<MetricKind, Estimate>> {
    if config.trials == 0 {
        return Err(Error::InvalidParameter("trial count must be >= 1".into()));
    }
    let k_max = crate::params::floor_reciprocal(config.params.rho())?
        .min(config.params.n().into())
        .min(MAX_REPORTED_DISCONNECTION.into());
    let k_max = u64::try_from(k_max).expect("k_max bounded by MAX_REPORTED_DISCONNECTION");
    let k_slots = (k_max + 1) as usize;

    let trials = config.trials;
    let n_chunks = trials.div_ceil(CHUNK_TRIALS);
    let partials: Vec<ChunkAccum> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let lo = chunk * CHUNK_TRIALS;
            let hi = (lo + CHUNK_TRIALS).min(trials);
            let mut acc = ChunkAccum::new(k_slots);
            for t in lo..hi {
                acc.add(&run_one_trial(config, t));
            }
            acc
        })
        .collect();

    let mut total = ChunkAccum::new(k_slots);
    for p in &partials {
        total.merge(p);
    }

    let seed = config.seed;
    let mut map = BTreeMap::new();
    map.insert(MetricKind::Connectedness, estimate_from_count(total.connected, trials, seed));
    map.insert(MetricKind::Coveredness, estimate_from_count(total.covered, trials, seed));
    for (kind, (sum, sumsq)) in [
        (MetricKind::Coverage, total.coverage),
        (MetricKind::Segmentation, total.segmentation),
        (MetricKind::Vulnerability, total.vulnerability),
        (MetricKind::Reachability, total.reachability),
    ] {
        map.insert(kind, estimate_from_sums(sum, sumsq, trials, seed));
    }
    for (k, &count) in total.disc_counts.iter().enumerate() {
        map.insert(MetricKind::Disconnection(k as u64), estimate_from_count(count, trials, seed));
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact;
    use crate::params::ExactRational;
    use proptest::prelude::*;

    fn sys(n: u64, rho: &str) -> SystemParams {
        SystemParams::new(n, rho.parse().unwrap()).unwrap()
    }

    #[test]
    fn sample_gaps_basics() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = sample_gaps(1, &mut rng);
        assert_eq!(s.gaps, vec![1.0]);

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = sample_gaps(10_000, &mut rng);
        assert!(s.positions.windows(2).all(|w| w[0] <= w[1]));
        let total: f64 = s.gaps.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(s.gaps.iter().all(|&g| g >= 0.0));
    }

    #[test]
    fn sample_gaps_reproducible() {
        let mut a = ChaCha8Rng::seed_from_u64(99);
        let mut b = ChaCha8Rng::seed_from_u64(99);
        assert_eq!(sample_gaps(3, &mut a).positions, sample_gaps(3, &mut b).positions);
    }

    #[test]
    fn eval_trial_hand_cases() {
        // Both gaps below rho: connected.
        let o = eval_trial(&[0.5, 0.5], 0.6, Boundary::Periodic);
        assert_eq!(o.disconnect_count, 0);
        assert!(o.connected);
        assert_eq!(o.reachability, 1.0);

        // One splitting gap, one segment of two nodes: 2*1/4 = 0.5.
        let o = eval_trial(&[0.7, 0.3], 0.5, Boundary::Periodic);
        assert_eq!(o.disconnect_count, 1);
        assert_eq!(o.reachability, 0.5);
        assert_eq!(o.segmentation, 0.5);

        // Three nodes, one split: segment of 3 nodes, reachability 6/9;
        // only the node between the two 0.3 gaps is important.
        let o = eval_trial(&[0.4, 0.3, 0.3], 0.35, Boundary::Periodic);
        assert_eq!(o.disconnect_count, 1);
        assert!((o.reachability - 6.0 / 9.0).abs() < 1e-15);
        assert!((o.vulnerability - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn eval_trial_boundary_split() {
        // Interior gaps 0.2, 0.6 and wrap gap 0.2: periodic k = 1, but the
        // line version has one interior split into runs of 2 and 1 nodes.
        let gaps = [0.2, 0.6, 0.2];
        let pb = eval_trial(&gaps, 0.5, Boundary::Periodic);
        assert_eq!(pb.disconnect_count, 1);
        assert_eq!(pb.reachability, (3.0 * 2.0) / 9.0);
        let db = eval_trial(&gaps, 0.5, Boundary::Disconnected);
        assert_eq!(db.disconnect_count, 1);
        assert_eq!(db.reachability, (2.0 * 1.0 + 0.0) / 9.0);

        // All interior gaps small: the line is connected regardless of the
        // wrap gap.
        let db = eval_trial(&[0.1, 0.1, 0.7], 0.5, Boundary::Disconnected);
        assert_eq!(db.disconnect_count, 0);
        assert!(db.connected);
        assert_eq!(db.reachability, 1.0);
    }

    #[test]
    fn coverage_conventions() {
        // Circular coverage: gaps (0.7, 0.3) at rho = 0.1: uncovered
        // (0.7-0.2) + (0.3-0.2) = 0.6.
        let o = eval_trial(&[0.7, 0.3], 0.1, Boundary::Periodic);
        assert!((o.coverage - 0.4).abs() < 1e-15);

        // Clipped coverage from positions 0.2 and 0.9 at rho = 0.1:
        // [0.1,0.3] and [0.8,1.0] cover 0.4.
        assert!((clipped_coverage(&[0.2, 0.9], 0.1) - 0.4).abs() < 1e-15);
        // Overlapping discs and edge clipping.
        assert!((clipped_coverage(&[0.05, 0.1], 0.1) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn run_matches_two_node_oracles() {
        // Periodic n = 2, rho = 3/5: exact connectedness 1/5.
        let mut config = TrialConfig::new(sys(2, "3/5"), Boundary::Periodic, 100_000, 42).unwrap();
        let est = &run(&config).unwrap()[&MetricKind::Connectedness];
        assert!((est.mean - 0.2).abs() <= 4.0 * est.stderr, "mean={} stderr={}", est.mean, est.stderr);

        // Disconnected n = 2, rho = 1/4: exact connectedness 7/16.
        config.params = sys(2, "1/4");
        config.boundary = Boundary::Disconnected;
        let est = &run(&config).unwrap()[&MetricKind::Connectedness];
        assert!((est.mean - 7.0 / 16.0).abs() <= 4.0 * est.stderr);
    }

    #[test]
    fn run_is_deterministic_across_pool_sizes() {
        let config = TrialConfig::new(sys(20, "1/10"), Boundary::Periodic, 10_000, 7).unwrap();
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let many = rayon::ThreadPoolBuilder::new().num_threads(8).build().unwrap();
        let a = single.install(|| run(&config)).unwrap();
        let b = many.install(|| run(&config)).unwrap();
        let c = many.install(|| run(&config)).unwrap();
        assert_eq!(a, b);
        assert_eq!(b, c);
    }

    #[test]
    fn varying_node_mode_thins() {
        let mut config = TrialConfig::new(sys(10, "1/5"), Boundary::Periodic, 20_000, 11).unwrap();
        config.on_probability = Some(OnProbability::new("1/2".parse().unwrap()).unwrap());
        let est = run(&config).unwrap();
        // Segmentation should be near the simulation-convention mixture, not
        // the fixed-n value.
        let values =
            crate::varying::metric_values_simulation(MetricKind::Segmentation, 10, &"1/5".parse().unwrap())
                .unwrap();
        let expected = crate::varying::mix_binomial(
            &values,
            &OnProbability::new("1/2".parse().unwrap()).unwrap(),
        )
        .unwrap()
        .to_f64();
        let seg = &est[&MetricKind::Segmentation];
        assert!((seg.mean - expected).abs() <= 4.0 * seg.stderr + 1e-9);
    }

    #[test]
    fn disconnection_estimates_present_and_bounded() {
        let config = TrialConfig::new(sys(50, "1/20"), Boundary::Periodic, 5_000, 3).unwrap();
        let est = run(&config).unwrap();
        assert!(est.contains_key(&MetricKind::Disconnection(0)));
        assert!(est.contains_key(&MetricKind::Disconnection(10)));
        assert!(!est.contains_key(&MetricKind::Disconnection(11)));
        let total: f64 = (0..=10)
            .map(|k| est[&MetricKind::Disconnection(k)].mean)
            .sum();
        assert!(total <= 1.0 + 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        // Per-trial invariants over random configurations; together with the
        // 200-ish trials below each case this covers >10^4 random trials.
        #[test]
        fn trial_outcome_invariants(
            n in 1u64..40,
            rho_num in 1i64..30,
            seed in 0u64..1_000,
            periodic in proptest::bool::ANY,
        ) {
            let rho = ExactRational::ratio(rho_num, 30);
            let rho_f = rho.to_f64();
            let boundary = if periodic { Boundary::Periodic } else { Boundary::Disconnected };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..200 {
                let sample = sample_gaps(n, &mut rng);
                let o = eval_trial(&sample.gaps, rho_f, boundary);
                prop_assert!(o.disconnect_count <= n);
                prop_assert_eq!(o.connected, o.disconnect_count == 0);
                prop_assert!((0.0..=1.0).contains(&o.coverage));
                prop_assert!((0.0..=1.0).contains(&o.segmentation));
                prop_assert!((0.0..=1.0).contains(&o.vulnerability));
                prop_assert!((0.0..=1.0).contains(&o.reachability));
                // segmentation is exactly the quotient k / n' (the product
                // form k = seg * n' double-rounds in binary floats).
                prop_assert_eq!(
                    o.segmentation,
                    o.disconnect_count as f64 / o.active_count as f64
                );
                if o.connected {
                    prop_assert_eq!(o.reachability, 1.0);
                }
            }
        }
    }

    #[test]
    fn per_trial_matches_exact_moments_smoke() {
        // Cheap sanity against the exact module at a mid-size point.
        let params = sys(10, "1/5");
        let config = TrialConfig::new(params.clone(), Boundary::Periodic, 50_000, 1234).unwrap();
        let est = run(&config).unwrap();
        for kind in [
            MetricKind::Connectedness,
            MetricKind::Coverage,
            MetricKind::Segmentation,
            MetricKind::Vulnerability,
            MetricKind::Reachability,
        ] {
            let exact_v = exact::metric(&params, kind).unwrap().to_f64();
            let e = &est[&kind];
            assert!(
                (e.mean - exact_v).abs() <= 4.0 * e.stderr + 1e-9,
                "{kind}: mc={} exact={exact_v} stderr={}",
                e.mean,
                e.stderr
            );
        }
    }
}
