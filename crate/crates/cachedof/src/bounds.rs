//! Converse upper bound, gap-factor reports, per-block feasibility rules,
//! the exact brute-force scheduling oracle, and placement accounting
//! checks.

use crate::centralized::dof_centralized;
use crate::decentralized::dof_decentralized;
use crate::model::{
    Block, CachingRealization, DemandVector, Error, NetworkConfig, Result, Scheme, Subchannel,
};

/// Converse bound:
/// alpha*min{(t+r)/(1-mu_R), K_R} + (1-alpha)*min{(1+r)/(1-mu_R), K_R},
/// with t = K_T*mu_T, r = K_R*mu_R; at mu_R = 1 both legs saturate to K_R.
pub fn dof_upper_bound(cfg: &NetworkConfig) -> f64 {
    let kr = cfg.num_rx as f64;
    let t = cfg.tx_cache_units();
    let r = cfg.rx_cache_units();
    let leg = |num: f64| {
        if cfg.mu_r >= 1.0 {
            kr
        } else {
            (num / (1.0 - cfg.mu_r)).min(kr)
        }
    };
    cfg.alpha * leg(t + r) + cfg.alpha_bar() * leg(1.0 + r)
}

#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct DofReport {
    pub scheme: Scheme,
    pub config: NetworkConfig,
    pub achievable: f64,
    pub upper: f64,
    /// upper / achievable.
    pub ratio: f64,
}

pub fn gap_centralized(cfg: &NetworkConfig) -> DofReport {
    let achievable = dof_centralized(cfg);
    let upper = dof_upper_bound(cfg);
    DofReport {
        scheme: Scheme::Centralized,
        config: *cfg,
        achievable,
        upper,
        ratio: upper / achievable,
    }
}

pub fn gap_decentralized(cfg: &NetworkConfig) -> DofReport {
    let achievable = dof_decentralized(cfg);
    let upper = dof_upper_bound(cfg);
    DofReport {
        scheme: Scheme::Decentralized,
        config: *cfg,
        achievable,
        upper,
        ratio: upper / achievable,
    }
}

/// Max of dof_centralized / dof_decentralized over `grid`, with the
/// config attaining it.
pub fn centralized_vs_decentralized_ratio(grid: &[NetworkConfig]) -> (f64, Option<NetworkConfig>) {
    let mut best = (f64::NEG_INFINITY, None);
    for cfg in grid {
        let ratio = dof_centralized(cfg) / dof_decentralized(cfg);
        if ratio > best.0 {
            best = (ratio, Some(*cfg));
        }
    }
    best
}

/// Per-item block capacity: |R_l| + |T_l| on the P-side (zero-forcing
/// cooperation), |R_l| + 1 on the N-side (coded multicasting).
fn item_capacity(realization: &CachingRealization, p: crate::model::PacketId, side: Subchannel) -> Result<usize> {
    let t = realization.tx_set(p).count_ones() as usize;
    if t == 0 {
        return Err(Error::UnservablePacket {
            file: p.file,
            index: p.index,
        });
    }
    let r = realization.rx_set(p).count_ones() as usize;
    Ok(match side {
        Subchannel::P => r + t,
        Subchannel::N => r + 1,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Feasible,
    /// Capacity violated; carries the packet whose cached-by sets set the
    /// binding limit.
    Infeasible { witness: crate::model::PacketId, limit: usize },
    /// Two deliveries in the block target the same receiver.
    DuplicateReceiver { receiver: usize },
}

/// Checks |block| <= min_l (|R_l| + |T_l|) (P) or min_l |R_l| + 1 (N),
/// plus receiver distinctness. Empty blocks are feasible.
pub fn check_block_feasibility(
    block: &Block,
    realization: &CachingRealization,
    side: Subchannel,
) -> Result<Feasibility> {
    let mut seen = 0u64;
    for d in &block.deliveries {
        if seen & (1 << d.receiver) != 0 {
            return Ok(Feasibility::DuplicateReceiver {
                receiver: d.receiver,
            });
        }
        seen |= 1 << d.receiver;
    }
    let size = block.deliveries.len();
    for d in &block.deliveries {
        let cap = item_capacity(realization, d.packet, side)?;
        if size > cap {
            return Ok(Feasibility::Infeasible {
                witness: d.packet,
                limit: cap,
            });
        }
    }
    Ok(Feasibility::Feasible)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleResult {
    pub p_blocks: usize,
    pub n_blocks: usize,
    /// The splitting ratio minimizing max{(q/a) H_p, (q_bar/a_bar) H_n}.
    pub q_star: f64,
    /// The minimized max-load in time-slots.
    pub min_max_load: f64,
}

pub const DEFAULT_ORACLE_CAP: usize = 16;

/// Exact minimum number of feasible blocks on each side, by exhaustive
/// set-partition search.
///
/// Symmetry breaking: every new block contains the smallest-indexed
/// undelivered item, and only maximal feasible blocks are branched on
/// (any cover by non-maximal blocks is dominated, since subsets of
/// feasible blocks are feasible). Branch-and-bound prunes with
/// ceil(remaining / largest capacity).
pub fn bruteforce_min_blocks(
    realization: &CachingRealization,
    demands: &DemandVector,
    alpha: f64,
    max_items: usize,
) -> Result<OracleResult> {
    let items = realization.needed_deliveries(demands);
    if items.len() > max_items {
        return Err(Error::InstanceTooLarge {
            items: items.len(),
            cap: max_items,
        });
    }
    let side_min = |side: Subchannel| -> Result<usize> {
        let caps = items
            .iter()
            .map(|d| item_capacity(realization, d.packet, side))
            .collect::<Result<Vec<_>>>()?;
        let receivers: Vec<usize> = items.iter().map(|d| d.receiver).collect();
        Ok(min_cover(&receivers, &caps))
    };
    let hp = side_min(Subchannel::P)?;
    let hn = side_min(Subchannel::N)?;
    let (q_star, load) = optimal_split(hp as f64, hn as f64, alpha);
    Ok(OracleResult {
        p_blocks: hp,
        n_blocks: hn,
        q_star,
        min_max_load: load,
    })
}

/// q minimizing max{(q/a) hp, ((1-q)/(1-a)) hn}, clamped to the alpha
/// edges, and the resulting load.
pub(crate) fn optimal_split(hp: f64, hn: f64, alpha: f64) -> (f64, f64) {
    if hp == 0.0 && hn == 0.0 {
        return (alpha, 0.0);
    }
    if alpha >= 1.0 {
        return (1.0, hp);
    }
    if alpha <= 0.0 {
        return (0.0, hn);
    }
    let q = alpha * hn / (alpha * hn + (1.0 - alpha) * hp);
    (q, hp * hn / (alpha * hn + (1.0 - alpha) * hp))
}

/// Minimum number of blocks covering all items, where a block is any set
/// of items with distinct receivers and size <= each member's capacity.
fn min_cover(receivers: &[usize], caps: &[usize]) -> usize {
    let n = receivers.len();
    if n == 0 {
        return 0;
    }
    let global_cap = *caps.iter().max().unwrap();
    let mut best = n; // singleton blocks always work (caps >= 1)
    let full: u64 = if n == 64 { !0 } else { (1u64 << n) - 1 };
    let mut memo: std::collections::HashMap<u64, usize> = Default::default();
    fn solve(
        remaining: u64,
        receivers: &[usize],
        caps: &[usize],
        global_cap: usize,
        best: &mut usize,
        used: usize,
        memo: &mut std::collections::HashMap<u64, usize>,
    ) {
        if remaining == 0 {
            *best = (*best).min(used);
            return;
        }
        if let Some(&seen) = memo.get(&remaining) {
            if seen <= used {
                return;
            }
        }
        memo.insert(remaining, used);
        let cnt = remaining.count_ones() as usize;
        let bound = used + cnt.div_ceil(global_cap);
        if bound >= *best {
            return;
        }
        let anchor = remaining.trailing_zeros() as usize;
        // enumerate maximal feasible blocks containing the anchor
        let mut stack = vec![(1u64 << anchor, 1u64 << receivers[anchor], caps[anchor], anchor + 1)];
        while let Some((mask, rx_mask, cap, from)) = stack.pop() {
            let size = mask.count_ones() as usize;
            let mut extended = false;
            for i in from..receivers.len() {
                if remaining & (1 << i) == 0 || rx_mask & (1 << receivers[i]) != 0 {
                    continue;
                }
                let new_cap = cap.min(caps[i]);
                if size + 1 > new_cap {
                    continue;
                }
                extended = true;
                stack.push((mask | (1 << i), rx_mask | (1u64 << receivers[i]), new_cap, i + 1));
            }
            // maximality: also check items before `from` that were skipped
            let maximal = !extended
                && (0..receivers.len()).all(|i| {
                    remaining & (1 << i) == 0
                        || mask & (1 << i) != 0
                        || rx_mask & (1 << receivers[i]) != 0
                        || size + 1 > cap.min(caps[i])
                });
            if maximal {
                solve(remaining & !mask, receivers, caps, global_cap, best, used + 1, memo);
            }
        }
    }
    solve(full, receivers, caps, global_cap, &mut best, 0, &mut memo);
    best
}

#[derive(Clone, Debug)]
pub struct CountingCheck {
    /// w[i][j], i in 1..=K_T (index i-1), j in 0..K_R.
    pub w: Vec<Vec<f64>>,
    pub receiver_lhs: f64,
    pub receiver_rhs: f64,
    pub library_lhs: f64,
    pub library_rhs: f64,
    pub receiver_ok: bool,
    pub library_ok: bool,
}

impl CountingCheck {
    pub fn ok(&self) -> bool {
        self.receiver_ok && self.library_ok
    }
}

/// Builds the counting table w_{i,j} = (K_R - j) * #{packets with
/// |T| = i, |R| = j} over j < K_R and checks
/// sum j/(K_R-j) w_{i,j} <= K_R mu_R N F  and  sum 1/(K_R-j) w_{i,j} <= N F.
pub fn verify_counting_bounds(realization: &CachingRealization, cfg: &NetworkConfig) -> CountingCheck {
    let kr = cfg.num_rx;
    let kt = cfg.num_tx;
    let mut w = vec![vec![0.0f64; kr]; kt];
    for n in 0..cfg.num_files {
        for f in 0..cfg.packets_per_file {
            let p = crate::model::PacketId { file: n, index: f };
            let i = realization.tx_set(p).count_ones() as usize;
            let j = realization.rx_set(p).count_ones() as usize;
            if i >= 1 && j < kr {
                w[i - 1][j] += (kr - j) as f64;
            }
        }
    }
    let mut receiver_lhs = 0.0;
    let mut library_lhs = 0.0;
    for i in 0..kt {
        for j in 0..kr {
            receiver_lhs += j as f64 / (kr - j) as f64 * w[i][j];
            library_lhs += 1.0 / (kr - j) as f64 * w[i][j];
        }
    }
    let nf = (cfg.num_files * cfg.packets_per_file) as f64;
    let receiver_rhs = cfg.rx_cache_units() * nf;
    let library_rhs = nf;
    CountingCheck {
        w,
        receiver_lhs,
        receiver_rhs,
        library_lhs,
        library_rhs,
        receiver_ok: receiver_lhs <= receiver_rhs * (1.0 + 1e-12) + 1e-9,
        library_ok: library_lhs <= library_rhs * (1.0 + 1e-12) + 1e-9,
    }
}
