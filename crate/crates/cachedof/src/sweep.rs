//! Default verification grids and suite runners shared by the CLI
//! `verify` command and the acceptance test suite.

use crate::analysis::{
    quasiconcavity_certificate, verify_pinelis_inequality, verify_poly_nonneg,
    weighted_sum_check,
};
use crate::bounds::dof_upper_bound;
use crate::centralized::dof_centralized;
use crate::decentralized::dof_decentralized;
use crate::exact::{rat, Rat};
use crate::model::NetworkConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

/// Runs `f` on a rayon pool capped at $CACHEDOF_THREADS threads (all
/// cores when unset or unparseable).
pub fn with_thread_cap<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    match std::env::var("CACHEDOF_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
    {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

pub const DEFAULT_K_GRID: [usize; 6] = [1, 2, 4, 8, 16, 32];

pub fn default_mu_grid() -> Vec<f64> {
    (0..=16).map(|i| i as f64 / 16.0).collect()
}

pub fn default_alpha_grid() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

/// All formula-valid configs over the default K / mu / alpha grids
/// (N = K_R, F = 1; neither enters the closed forms).
pub fn default_configs() -> Vec<NetworkConfig> {
    default_configs_with(&DEFAULT_K_GRID, &default_mu_grid(), &default_alpha_grid())
}

pub fn default_configs_with(
    k_grid: &[usize],
    mu_grid: &[f64],
    alpha_grid: &[f64],
) -> Vec<NetworkConfig> {
    let mut out = Vec::new();
    for &kt in k_grid {
        for &mu_t in mu_grid {
            if kt as f64 * mu_t < 1.0 {
                continue;
            }
            for &kr in k_grid {
                for &mu_r in mu_grid {
                    for &alpha in alpha_grid {
                        out.push(NetworkConfig::new(kt, kr, kr, 1, mu_t, mu_r, alpha));
                    }
                }
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct GapsSummary {
    pub configs: usize,
    pub max_centralized_ratio: f64,
    pub max_centralized_at: NetworkConfig,
    pub max_decentralized_ratio: f64,
    pub max_decentralized_at: NetworkConfig,
    pub max_cen_vs_dec_ratio: f64,
    pub max_cen_vs_dec_at: NetworkConfig,
    /// Most negative value of upper - achievable (sandwich slack).
    pub min_sandwich_slack: f64,
    pub pass: bool,
}

/// Gap factors over a config grid: upper/centralized <= 2,
/// upper/decentralized <= 3, centralized/decentralized <= 1.5, and the
/// sandwich dof_dec <= dof_cen <= upper.
pub fn gaps_suite(grid: &[NetworkConfig]) -> GapsSummary {
    let per: Vec<(f64, f64, f64, f64, NetworkConfig)> = grid
        .par_iter()
        .map(|cfg| {
            let cen = dof_centralized(cfg);
            let dec = dof_decentralized(cfg);
            let up = dof_upper_bound(cfg);
            let slack = (up - cen).min(cen - dec);
            (up / cen, up / dec, cen / dec, slack, *cfg)
        })
        .collect();
    let pick = |f: &dyn Fn(&(f64, f64, f64, f64, NetworkConfig)) -> f64| {
        per.iter()
            .cloned()
            .max_by(|a, b| f(a).total_cmp(&f(b)))
            .unwrap()
    };
    let c = pick(&|x| x.0);
    let d = pick(&|x| x.1);
    let cd = pick(&|x| x.2);
    let min_slack = per.iter().map(|x| x.3).fold(f64::INFINITY, f64::min);
    let pass = c.0 <= 2.0 + 1e-9
        && d.1 <= 3.0 + 1e-9
        && cd.2 <= 1.5 + 1e-9
        && min_slack >= -1e-9;
    GapsSummary {
        configs: grid.len(),
        max_centralized_ratio: c.0,
        max_centralized_at: c.4,
        max_decentralized_ratio: d.1,
        max_decentralized_at: d.4,
        max_cen_vs_dec_ratio: cd.2,
        max_cen_vs_dec_at: cd.4,
        min_sandwich_slack: min_slack,
        pass,
    }
}

/// r values 1, 1.25, ..., up to and including `max` (quarters).
pub fn quarter_grid(max: usize) -> Vec<Rat> {
    (4..=4 * max as i64).map(|q| rat(q, 4)).collect()
}

#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct PolySummary {
    pub cells: usize,
    pub certificates_passed: usize,
    pub min_sampled_value: f64,
    pub pass: bool,
}

/// Quasiconcavity certificates plus nonnegativity sampling for all
/// K_R in [2, kr_max] and r on the quarter grid in [1, K_R].
pub fn poly_suite(kr_max: usize, samples: usize) -> PolySummary {
    let cells: Vec<(usize, Rat)> = (2..=kr_max)
        .flat_map(|kr| quarter_grid(kr).into_iter().map(move |r| (kr, r)))
        .collect();
    let results: Vec<(bool, f64)> = cells
        .par_iter()
        .map(|(kr, r)| {
            let cert = quasiconcavity_certificate(*kr, r).expect("valid cell");
            let min = verify_poly_nonneg(*kr, r, samples).expect("valid cell");
            (cert.passed(), min)
        })
        .collect();
    let certificates_passed = results.iter().filter(|r| r.0).count();
    let min_sampled_value = results.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    PolySummary {
        cells: cells.len(),
        certificates_passed,
        min_sampled_value,
        pass: certificates_passed == cells.len() && min_sampled_value >= -1e-12,
    }
}

#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct PinelisSummary {
    pub cells: usize,
    pub min_slack: f64,
    /// Largest |slack| over the r = K cells, which must be exactly 0.
    pub max_edge_slack: f64,
    pub pass: bool,
}

/// The Pinelis inequality over K in [1, k_max], r on the quarter grid.
pub fn pinelis_suite(k_max: usize) -> PinelisSummary {
    let cells: Vec<(usize, f64)> = (1..=k_max)
        .flat_map(|k| (4..=4 * k).map(move |q| (k, q as f64 / 4.0)))
        .collect();
    let slacks: Vec<(f64, bool)> = cells
        .par_iter()
        .map(|&(k, r)| {
            let (_, _, slack) = verify_pinelis_inequality(k, r).expect("valid cell");
            (slack, r == k as f64)
        })
        .collect();
    let min_slack = slacks.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let max_edge_slack = slacks
        .iter()
        .filter(|s| s.1)
        .map(|s| s.0.abs())
        .fold(0.0, f64::max);
    PinelisSummary {
        cells: cells.len(),
        min_slack,
        max_edge_slack,
        pass: min_slack >= -1e-12 && max_edge_slack == 0.0,
    }
}

#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct IdentitiesSummary {
    pub configs: usize,
    pub alphas_per_config: usize,
    pub pass: bool,
}

/// Exact weighted-sum decompositions on `count` random rational configs,
/// each checked at 11 rational alpha values.
pub fn identities_suite(count: usize, seed: u64) -> IdentitiesSummary {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let ks = [1usize, 2, 4, 8, 16];
    let mut cases = Vec::with_capacity(count);
    while cases.len() < count {
        let kt = ks[rng.gen_range(0..ks.len())];
        let kr = ks[rng.gen_range(0..ks.len())];
        let mu_t = rat(rng.gen_range(0..=16), 16);
        let mu_r = rat(rng.gen_range(0..=16), 16);
        if mu_t.clone() * rat(kt as i64, 1) < rat(1, 1) {
            continue;
        }
        cases.push((kt, kr, mu_t, mu_r));
    }
    let alphas: Vec<Rat> = (0..=10).map(|a| rat(a, 10)).collect();
    let pass = cases
        .par_iter()
        .all(|(kt, kr, mu_t, mu_r)| weighted_sum_check(*kt, *kr, mu_t, mu_r, &alphas));
    IdentitiesSummary {
        configs: count,
        alphas_per_config: alphas.len(),
        pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_is_large_and_valid() {
        let grid = default_configs();
        assert!(grid.len() >= 5000, "{}", grid.len());
        for cfg in &grid {
            assert!(cfg.tx_cache_units() >= 1.0);
            assert!(cfg.num_files >= cfg.num_rx);
        }
    }

    #[test]
    fn gaps_suite_passes_on_subgrid() {
        let grid = default_configs_with(&[1, 2, 4], &default_mu_grid(), &[0.0, 0.5, 1.0]);
        let s = gaps_suite(&grid);
        assert!(s.pass, "{s:?}");
        assert!(s.max_centralized_ratio <= 2.0 + 1e-9);
        // the 1.5 boundary is attained at K_R=2, mu_R=1/2 cases
        assert!(s.max_cen_vs_dec_ratio > 1.5 - 1e-6);
        assert_eq!(s.max_cen_vs_dec_at.num_rx, 2);
    }

    #[test]
    fn poly_and_pinelis_suites_pass_small() {
        let p = poly_suite(8, 50);
        assert!(p.pass, "{p:?}");
        let q = pinelis_suite(16);
        assert!(q.pass, "{q:?}");
    }

    #[test]
    fn identities_suite_passes() {
        let s = identities_suite(20, 99);
        assert!(s.pass);
    }

    #[test]
    fn thread_cap_env_is_respected() {
        std::env::set_var("CACHEDOF_THREADS", "2");
        let n = with_thread_cap(rayon::current_num_threads);
        assert_eq!(n, 2);
        std::env::remove_var("CACHEDOF_THREADS");
    }
}
