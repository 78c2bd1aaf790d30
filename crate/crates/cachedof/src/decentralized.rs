//! Decentralized (randomized) receiver placement, sub-phase delivery
//! scheduling, expected block counts, the achievable DoF, and a
//! Monte-Carlo validator for the expectation formulas.

use crate::centralized::splitting_ratio;
use crate::model::{
    binomial, pack_balanced, subsets_of_size, validate_config, CachingRealization, Delivery,
    DeliverySchedule, DemandVector, Error, NetworkConfig, Result, ValidationMode,
};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Transmitter side is the deterministic subfile split of the centralized
/// scheme; each receiver independently caches exactly mu_R*F packets per
/// file, chosen uniformly at random from a seed-derived substream.
#[derive(Clone, Debug)]
pub struct DecentralizedPlacement {
    pub cfg: NetworkConfig,
    pub seed: u64,
    /// Lexicographic K_T*mu_T-subsets of transmitters, as bitmasks.
    pub tx_subsets: Vec<u64>,
    /// rx_sets[n * F + f] = bitmask of receivers caching packet (n, f).
    rx_sets: Vec<u64>,
}

impl DecentralizedPlacement {
    pub fn realization(&self) -> CachingRealization {
        let cfg = &self.cfg;
        let per_subfile = cfg.packets_per_file / self.tx_subsets.len();
        let mut tx_sets = vec![0u64; cfg.num_files * cfg.packets_per_file];
        for n in 0..cfg.num_files {
            for f in 0..cfg.packets_per_file {
                tx_sets[n * cfg.packets_per_file + f] = self.tx_subsets[f / per_subfile];
            }
        }
        CachingRealization::new(cfg, tx_sets, self.rx_sets.clone())
    }

    /// Fraction of library packets cached by exactly l receivers, for
    /// l = 0..=K_R. Converges to the binomial pmf as F grows.
    pub fn cached_count_fractions(&self) -> Vec<f64> {
        let mut counts = vec![0usize; self.cfg.num_rx + 1];
        for mask in &self.rx_sets {
            counts[mask.count_ones() as usize] += 1;
        }
        let total = self.rx_sets.len() as f64;
        counts.into_iter().map(|c| c as f64 / total).collect()
    }
}

/// Derives an independent, order-insensitive RNG for one (receiver, file)
/// cell from the master seed.
fn cell_rng(seed: u64, receiver: usize, file: usize) -> ChaCha12Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(receiver as u64).to_le_bytes());
    key[16..24].copy_from_slice(&(file as u64).to_le_bytes());
    ChaCha12Rng::from_seed(key)
}

pub fn decentralized_place(cfg: &NetworkConfig, seed: u64) -> Result<DecentralizedPlacement> {
    let cfg = validate_config(*cfg, ValidationMode::SchedulerDecentralized)?;
    let t = cfg.tx_cache_int().unwrap();
    let c_t = binomial(cfg.num_tx, t) as usize;
    if cfg.packets_per_file % c_t != 0 {
        return Err(Error::IndivisibleF {
            given: cfg.packets_per_file,
            required: c_t,
            smallest: c_t,
        });
    }
    let cache_f = cfg.mu_r * cfg.packets_per_file as f64;
    let per_file = cache_f.round() as usize;
    if (cache_f - per_file as f64).abs() > crate::model::INT_TOL {
        return Err(Error::NonIntegerCacheCount(cache_f));
    }
    let mut rx_sets = vec![0u64; cfg.num_files * cfg.packets_per_file];
    for j in 0..cfg.num_rx {
        for n in 0..cfg.num_files {
            let mut rng = cell_rng(seed, j, n);
            for f in rand::seq::index::sample(&mut rng, cfg.packets_per_file, per_file) {
                rx_sets[n * cfg.packets_per_file + f] |= 1 << j;
            }
        }
    }
    Ok(DecentralizedPlacement {
        cfg,
        seed,
        tx_subsets: subsets_of_size(cfg.num_tx, t),
        rx_sets,
    })
}

/// Deliveries grouped by l = number of receivers caching the packet
/// (the demanding receiver never does, by construction of the need set).
#[derive(Clone, Debug)]
pub struct SubPhasePlan {
    /// per_l[l] = the (receiver, packet) pairs whose packet is cached by
    /// exactly l receivers, l = 0..K_R-1.
    pub per_l: Vec<Vec<Delivery>>,
}

pub fn sub_phase_plan(
    realization: &CachingRealization,
    demands: &DemandVector,
) -> SubPhasePlan {
    let mut per_l = vec![Vec::new(); realization.num_rx];
    for d in realization.needed_deliveries(demands) {
        let l = realization.rx_set(d.packet).count_ones() as usize;
        per_l[l].push(d);
    }
    SubPhasePlan { per_l }
}

/// P-side: sub-phase l packs into blocks of min{K_T*mu_T + l, K_R}
/// receivers; N-side: coded-multicast groups of l + 1. As in the
/// centralized scheduler, a zero-bandwidth side carries nothing.
pub fn decentralized_schedule(
    placement: &DecentralizedPlacement,
    demands: &DemandVector,
    alpha: f64,
) -> Result<DeliverySchedule> {
    if !demands.is_distinct() {
        return Err(Error::NonDistinctDemands);
    }
    let cfg = &placement.cfg;
    let t = cfg.tx_cache_int().unwrap();
    let realization = placement.realization();
    let plan = sub_phase_plan(&realization, demands);
    let q = splitting_ratio_decentralized(&NetworkConfig { alpha, ..*cfg });
    let mut p_blocks = Vec::new();
    let mut n_blocks = Vec::new();
    for (l, items) in plan.per_l.iter().enumerate() {
        if items.is_empty() {
            continue;
        }
        if q > 0.0 {
            let cap = (t + l).min(cfg.num_rx).max(1);
            p_blocks.extend(pack_balanced(cfg.num_rx, items, cap));
        }
        if q < 1.0 {
            n_blocks.extend(pack_balanced(cfg.num_rx, items, l + 1));
        }
    }
    Ok(DeliverySchedule {
        q,
        p_blocks,
        n_blocks,
    })
}

/// Expected block counts (H_p, H_n), F-normalized:
/// H_p = K_R * sum_{l=0}^{K_R-1} C(K_R-1,l) mu^l (1-mu)^{K_R-l} / min{t+l, K_R},
/// H_n the same with denominator l + 1 (the sum form keeps mu_R = 0
/// well-defined, where the closed form (1-mu)/mu*(1-(1-mu)^{K_R}) is 0/0).
pub fn expected_blocks_decentralized(cfg: &NetworkConfig) -> (f64, f64) {
    let t = cfg.tx_cache_units();
    let kr = cfg.num_rx;
    let hp = kr as f64 * block_sum(kr, cfg.mu_r, |l| (t + l as f64).min(kr as f64));
    let hn = kr as f64 * block_sum(kr, cfg.mu_r, |l| l as f64 + 1.0);
    (hp, hn)
}

/// sum_{l=0}^{K_R-1} C(K_R-1,l) mu^l (1-mu)^{K_R-l} / denom(l).
fn block_sum<F: Fn(usize) -> f64>(kr: usize, mu_r: f64, denom: F) -> f64 {
    (0..kr)
        .map(|l| {
            binomial(kr - 1, l) as f64 * mu_r.powi(l as i32)
                * (1.0 - mu_r).powi((kr - l) as i32)
                / denom(l)
        })
        .sum()
}

/// The alpha = 1 and alpha = 0 legs of the decentralized DoF.
fn dof_legs(cfg: &NetworkConfig) -> (f64, f64) {
    let t = cfg.tx_cache_units();
    let kr = cfg.num_rx;
    let inv = |denom: &dyn Fn(usize) -> f64| {
        (0..kr)
            .map(|l| {
                binomial(kr - 1, l) as f64 * cfg.mu_r.powi(l as i32)
                    * (1.0 - cfg.mu_r).powi((kr - 1 - l) as i32)
                    / denom(l)
            })
            .sum::<f64>()
    };
    let leg_p = 1.0 / inv(&|l| (t + l as f64).min(kr as f64));
    let leg_n = 1.0 / inv(&|l| l as f64 + 1.0);
    (leg_p, leg_n)
}

/// Theorem-2 achievable DoF. The N-leg K_R*mu_R / (1 - (1-mu_R)^{K_R}) is
/// evaluated through the equivalent binomial sum, whose mu_R -> 0 limit
/// is 1.
pub fn dof_decentralized(cfg: &NetworkConfig) -> f64 {
    let (leg_p, leg_n) = dof_legs(cfg);
    cfg.alpha * leg_p + cfg.alpha_bar() * leg_n
}

/// q making (q/alpha) H_p = (q_bar/alpha_bar) H_n in expectation.
pub fn splitting_ratio_decentralized(cfg: &NetworkConfig) -> f64 {
    let (leg_p, leg_n) = dof_legs(cfg);
    splitting_ratio(cfg.alpha, leg_p, leg_n)
}

/// F-normalized expected delivery time K_R(1 - mu_R) / dof.
pub fn delivery_time_decentralized(cfg: &NetworkConfig) -> f64 {
    delivery_time_decentralized_params(cfg.tx_cache_units(), cfg.num_rx, cfg.mu_r, cfg.alpha)
}

/// Same, parameterized by t = K_T*mu_T directly for the tradeoff solver.
pub fn delivery_time_decentralized_params(t: f64, kr: usize, mu_r: f64, alpha: f64) -> f64 {
    let cfg = NetworkConfig::new(1, kr, kr, 1, t, mu_r, alpha);
    kr as f64 * (1.0 - mu_r) / dof_decentralized(&cfg)
}

#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct MonteCarloReport {
    pub formula: f64,
    pub empirical_mean: f64,
    pub stderr: f64,
    pub trials: usize,
    pub seed: u64,
}

/// Places and schedules `trials` independent realizations, measuring the
/// realized delivery time of each, and compares the mean to the
/// expectation formula. Deterministic given (cfg, seed, trials).
pub fn montecarlo_delivery(
    cfg: &NetworkConfig,
    seed: u64,
    trials: usize,
) -> Result<MonteCarloReport> {
    use rayon::prelude::*;
    if trials == 0 {
        return Err(Error::Domain("trials must be >= 1".into()));
    }
    let demands = DemandVector::worst_case(cfg)?;
    let times: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let trial_seed = seed ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
            let placement = decentralized_place(cfg, trial_seed)?;
            let schedule = decentralized_schedule(&placement, &demands, cfg.alpha)?;
            let delivered = placement
                .realization()
                .needed_deliveries(&demands)
                .len();
            crate::model::delivery_time(&schedule.accounting(delivered), cfg.alpha)
        })
        .collect::<Result<_>>()?;
    let n = times.len() as f64;
    let mean = times.iter().sum::<f64>() / n;
    let var = if trials > 1 {
        times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let formula =
        cfg.packets_per_file as f64 * cfg.num_rx as f64 * (1.0 - cfg.mu_r)
            / dof_decentralized(cfg);
    Ok(MonteCarloReport {
        formula,
        empirical_mean: mean,
        stderr: (var / n).sqrt(),
        trials,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(kt: usize, kr: usize, n: usize, f: usize, mt: f64, mr: f64, a: f64) -> NetworkConfig {
        NetworkConfig::new(kt, kr, n, f, mt, mr, a)
    }

    #[test]
    fn placement_is_deterministic_and_exact() {
        let c = cfg(2, 3, 3, 12, 0.5, 1.0 / 3.0, 0.5);
        let p1 = decentralized_place(&c, 42).unwrap();
        let p2 = decentralized_place(&c, 42).unwrap();
        assert_eq!(p1.rx_sets, p2.rx_sets);
        let p3 = decentralized_place(&c, 43).unwrap();
        assert_ne!(p1.rx_sets, p3.rx_sets);
        // each receiver caches exactly mu_R*F = 4 packets per file
        for j in 0..3 {
            for n in 0..3 {
                let cnt = (0..12)
                    .filter(|&f| p1.rx_sets[n * 12 + f] & (1 << j) != 0)
                    .count();
                assert_eq!(cnt, 4);
            }
        }
    }

    #[test]
    fn empty_caches_when_mu_r_zero() {
        let c = cfg(2, 2, 2, 2, 0.5, 0.0, 0.5);
        let p = decentralized_place(&c, 1).unwrap();
        assert!(p.rx_sets.iter().all(|&m| m == 0));
    }

    #[test]
    fn cached_fractions_approach_binomial_pmf() {
        // K_R=3, mu_R=1/3, F=30000: P(0 receivers) = (2/3)^3 = 8/27
        let c = cfg(2, 3, 3, 30_000, 0.5, 1.0 / 3.0, 0.5);
        let p = decentralized_place(&c, 7).unwrap();
        let fr = p.cached_count_fractions();
        for l in 0..=3usize {
            let pmf = binomial(3, l) as f64 * (1.0f64 / 3.0).powi(l as i32)
                * (2.0f64 / 3.0).powi(3 - l as i32);
            assert!(
                (fr[l] - pmf).abs() < 0.01,
                "l={l}: {} vs {}",
                fr[l],
                pmf
            );
        }
    }

    #[test]
    fn expected_blocks_hand_values() {
        // K_R=2, mu_R=1/2, t=1 -> H_p = H_n = 3/4 per F
        let c = cfg(2, 2, 2, 4, 0.5, 0.5, 0.5);
        let (hp, hn) = expected_blocks_decentralized(&c);
        assert!((hp - 0.75).abs() < 1e-12);
        assert!((hn - 0.75).abs() < 1e-12);
        // mu_R = 0 -> H_n = K_R per F
        let (_, hn0) = expected_blocks_decentralized(&cfg(2, 2, 2, 4, 0.5, 0.0, 0.5));
        assert!((hn0 - 2.0).abs() < 1e-12);
        // mu_R = 1 -> both 0
        let (hp1, hn1) = expected_blocks_decentralized(&cfg(2, 2, 2, 4, 0.5, 1.0, 0.5));
        assert_eq!((hp1, hn1), (0.0, 0.0));
    }

    #[test]
    fn dof_hand_values_and_limits() {
        let c0 = cfg(2, 2, 2, 4, 0.5, 0.5, 0.0);
        let c1 = cfg(2, 2, 2, 4, 0.5, 0.5, 1.0);
        assert!((dof_decentralized(&c0) - 4.0 / 3.0).abs() < 1e-12);
        assert!((dof_decentralized(&c1) - 4.0 / 3.0).abs() < 1e-12);
        // mu_R -> 0, alpha = 0 -> 1
        assert!((dof_decentralized(&cfg(2, 2, 2, 4, 0.5, 0.0, 0.0)) - 1.0).abs() < 1e-15);
        // legs and block formulas agree: K_R(1-mu)/H = leg
        let c = cfg(16, 16, 16, 1, 0.5, 1.0 / 16.0, 0.5);
        let (hp, hn) = expected_blocks_decentralized(&c);
        let leg_p = dof_decentralized(&NetworkConfig { alpha: 1.0, ..c });
        let leg_n = dof_decentralized(&NetworkConfig { alpha: 0.0, ..c });
        let kr1m = 16.0 * (1.0 - 1.0 / 16.0);
        assert!((kr1m / hp - leg_p).abs() / leg_p < 1e-12);
        assert!((kr1m / hn - leg_n).abs() / leg_n < 1e-12);
    }

    #[test]
    fn splitting_ratio_equalizes_loads() {
        let c = cfg(16, 16, 16, 1, 0.5, 1.0 / 16.0, 0.5);
        let q = splitting_ratio_decentralized(&c);
        let (hp, hn) = expected_blocks_decentralized(&c);
        let lhs = q / c.alpha * hp;
        let rhs = (1.0 - q) / c.alpha_bar() * hn;
        assert!((lhs - rhs).abs() / lhs < 1e-12);
        // equal legs -> q = 1/2
        let q2 = splitting_ratio_decentralized(&cfg(2, 2, 2, 4, 0.5, 0.5, 0.5));
        assert!((q2 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn schedule_is_deterministic_and_counts_track_expectation() {
        let c = cfg(2, 2, 2, 4, 0.5, 0.5, 0.5);
        let d = DemandVector::worst_case(&c).unwrap();
        let p = decentralized_place(&c, 7).unwrap();
        let s1 = decentralized_schedule(&p, &d, c.alpha).unwrap();
        let s2 = decentralized_schedule(&p, &d, c.alpha).unwrap();
        assert_eq!(s1.p_blocks, s2.p_blocks);
        assert_eq!(s1.n_blocks, s2.n_blocks);
        // finite-F counts stay near the F-scaled expectation (3 at F=4)
        assert!(s1.p_blocks.len() >= 2 && s1.p_blocks.len() <= 6);
    }

    #[test]
    fn montecarlo_matches_formula() {
        let c = cfg(2, 2, 2, 10_000, 0.5, 0.5, 0.0);
        let r = montecarlo_delivery(&c, 123, 32).unwrap();
        assert!(
            (r.empirical_mean - r.formula).abs() / r.formula < 0.02,
            "{r:?}"
        );
        // determinism
        let r2 = montecarlo_delivery(&c, 123, 32).unwrap();
        assert_eq!(r.empirical_mean.to_bits(), r2.empirical_mean.to_bits());
        // mu_R = 0: deterministic placement, zero variance
        let c0 = cfg(2, 2, 2, 100, 0.5, 0.0, 0.0);
        let r0 = montecarlo_delivery(&c0, 5, 8).unwrap();
        assert_eq!(r0.stderr, 0.0);
        assert!((r0.empirical_mean - r0.formula).abs() < 1e-9);
    }
}
