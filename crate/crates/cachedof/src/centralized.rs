//! Centralized placement, block scheduling over both subchannels, the
//! splitting ratio, and the closed-form achievable DoF / delivery time.

use crate::model::{
    binomial, pack_balanced, subsets_of_size, validate_config, CachingRealization,
    DeliverySchedule, DemandVector, Error, NetworkConfig, Result, ValidationMode,
};

/// Deterministic subfile-level placement: file n splits into
/// C(K_T, K_T*mu_T) * C(K_R, K_R*mu_R) equal subfiles, one per pair
/// (T, R) of cache sets; transmitter i stores the subfiles with i in T
/// and receiver j those with j in R.
#[derive(Clone, Debug)]
pub struct CentralizedPlacement {
    pub cfg: NetworkConfig,
    /// Lexicographic K_T*mu_T-subsets of transmitters, as bitmasks.
    pub tx_subsets: Vec<u64>,
    /// Lexicographic K_R*mu_R-subsets of receivers, as bitmasks.
    pub rx_subsets: Vec<u64>,
    /// Packets per (T, R) subfile: F / (C_T * C_R).
    pub packets_per_subfile: usize,
}

impl CentralizedPlacement {
    /// Subfile (by T-index, R-index) covers packet indices
    /// [s*p, (s+1)*p) with s = t_idx * C_R + r_idx.
    pub fn subfile_packet_range(&self, t_idx: usize, r_idx: usize) -> std::ops::Range<usize> {
        let s = t_idx * self.rx_subsets.len() + r_idx;
        s * self.packets_per_subfile..(s + 1) * self.packets_per_subfile
    }

    /// Per-packet cached-by masks for the whole library.
    pub fn realization(&self) -> CachingRealization {
        let cfg = &self.cfg;
        let mut tx_sets = vec![0u64; cfg.num_files * cfg.packets_per_file];
        let mut rx_sets = vec![0u64; cfg.num_files * cfg.packets_per_file];
        for n in 0..cfg.num_files {
            for (ti, &t_mask) in self.tx_subsets.iter().enumerate() {
                for (ri, &r_mask) in self.rx_subsets.iter().enumerate() {
                    for f in self.subfile_packet_range(ti, ri) {
                        tx_sets[n * cfg.packets_per_file + f] = t_mask;
                        rx_sets[n * cfg.packets_per_file + f] = r_mask;
                    }
                }
            }
        }
        CachingRealization::new(cfg, tx_sets, rx_sets)
    }

    /// Number of packets cached by one transmitter (mu_T * N * F).
    pub fn tx_cache_size(&self) -> usize {
        let cfg = &self.cfg;
        let t = cfg.tx_cache_int().unwrap();
        let with_i = binomial(cfg.num_tx - 1, t - 1) as usize;
        with_i * self.rx_subsets.len() * self.packets_per_subfile * cfg.num_files
    }

    /// Number of packets cached by one receiver (mu_R * N * F).
    pub fn rx_cache_size(&self) -> usize {
        let cfg = &self.cfg;
        let r = cfg.rx_cache_int().unwrap();
        let with_j = if r == 0 {
            0
        } else {
            binomial(cfg.num_rx - 1, r - 1) as usize
        };
        with_j * self.tx_subsets.len() * self.packets_per_subfile * cfg.num_files
    }
}

pub fn centralized_place(cfg: &NetworkConfig) -> Result<CentralizedPlacement> {
    let cfg = validate_config(*cfg, ValidationMode::SchedulerCentralized)?;
    let t = cfg.tx_cache_int().unwrap();
    let r = cfg.rx_cache_int().unwrap();
    let required = (binomial(cfg.num_tx, t) * binomial(cfg.num_rx, r)) as usize;
    if cfg.packets_per_file % required != 0 {
        return Err(Error::IndivisibleF {
            given: cfg.packets_per_file,
            required,
            smallest: required,
        });
    }
    Ok(CentralizedPlacement {
        cfg,
        tx_subsets: subsets_of_size(cfg.num_tx, t),
        rx_subsets: subsets_of_size(cfg.num_rx, r),
        packets_per_subfile: cfg.packets_per_file / required,
    })
}

/// Per-P-block capacity min{K_T*mu_T + K_R*mu_R, K_R} (cooperation gain).
pub fn p_capacity(cfg: &NetworkConfig) -> f64 {
    (cfg.tx_cache_units() + cfg.rx_cache_units()).min(cfg.num_rx as f64)
}

/// Per-N-block capacity min{1 + K_R*mu_R, K_R} (multicast gain).
pub fn n_capacity(cfg: &NetworkConfig) -> f64 {
    (1.0 + cfg.rx_cache_units()).min(cfg.num_rx as f64)
}

/// q = alpha*capP / (alpha*capP + alpha_bar*capN): equalizes
/// (q/alpha) H_p and (q_bar/alpha_bar) H_n on exact instances.
pub fn splitting_ratio_centralized(cfg: &NetworkConfig) -> f64 {
    splitting_ratio(cfg.alpha, p_capacity(cfg), n_capacity(cfg))
}

pub(crate) fn splitting_ratio(alpha: f64, leg_p: f64, leg_n: f64) -> f64 {
    if alpha >= 1.0 {
        return 1.0;
    }
    if alpha <= 0.0 {
        return 0.0;
    }
    let num = alpha * leg_p;
    num / (num + (1.0 - alpha) * leg_n)
}

/// Schedules all demanded-but-uncached packets: the P-side into blocks of
/// min{K_T*mu_T + K_R*mu_R, K_R} distinct receivers, the N-side into
/// coded-multicast groups of min{1 + K_R*mu_R, K_R}. A side with zero
/// bandwidth carries nothing.
pub fn centralized_schedule(
    placement: &CentralizedPlacement,
    demands: &DemandVector,
    alpha: f64,
) -> Result<DeliverySchedule> {
    if !demands.is_distinct() {
        return Err(Error::NonDistinctDemands);
    }
    let cfg = &placement.cfg;
    let realization = placement.realization();
    let needed = realization.needed_deliveries(demands);
    let q = splitting_ratio_centralized(&NetworkConfig { alpha, ..*cfg });
    let cap_p = p_capacity(cfg).floor() as usize;
    let cap_n = n_capacity(cfg).floor() as usize;
    let p_blocks = if q > 0.0 {
        pack_balanced(cfg.num_rx, &needed, cap_p.max(1))
    } else {
        Vec::new()
    };
    let n_blocks = if q < 1.0 {
        pack_balanced(cfg.num_rx, &needed, cap_n.max(1))
    } else {
        Vec::new()
    };
    Ok(DeliverySchedule {
        q,
        p_blocks,
        n_blocks,
    })
}

/// Theorem-1 achievable DoF:
/// alpha*min{K_T mu_T + K_R mu_R, K_R} + (1-alpha)*min{1 + K_R mu_R, K_R}.
pub fn dof_centralized(cfg: &NetworkConfig) -> f64 {
    cfg.alpha * p_capacity(cfg) + cfg.alpha_bar() * n_capacity(cfg)
}

/// F-normalized delivery time K_R(1 - mu_R) / dof_centralized(cfg).
pub fn delivery_time_centralized(cfg: &NetworkConfig) -> f64 {
    delivery_time_centralized_params(
        cfg.num_tx as f64 * cfg.mu_t,
        cfg.num_rx,
        cfg.mu_r,
        cfg.alpha,
    )
}

/// Same formula parameterized directly by t = K_T*mu_T (used by the
/// tradeoff solver, which varies mu_R continuously).
pub fn delivery_time_centralized_params(t: f64, kr: usize, mu_r: f64, alpha: f64) -> f64 {
    let krf = kr as f64;
    let r = krf * mu_r;
    let dof = alpha * (t + r).min(krf) + (1.0 - alpha) * (1.0 + r).min(krf);
    krf * (1.0 - mu_r) / dof
}
