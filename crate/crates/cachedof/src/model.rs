//! Network configuration, validation, packet indexing and the shared
//! delivery-time accounting used by both placement schemes.

use thiserror::Error;

/// Tolerance used when deciding whether `K_T * mu_T` (etc.) is an integer.
pub const INT_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum Error {
    #[error("library cannot be covered by transmitter caches: K_T*mu_T = {0} < 1")]
    LibraryUncoverable(f64),
    #[error("scheduler mode needs an integer {quantity}, got {value}")]
    NonIntegerCache { quantity: &'static str, value: f64 },
    #[error("worst-case distinct demands need N >= K_R, got N = {files}, K_R = {receivers}")]
    TooFewFiles { files: usize, receivers: usize },
    #[error("delivery time undefined: traffic routed to a zero-bandwidth subchannel")]
    UndefinedDuration,
    #[error("F = {given} not divisible by the {required} equal subfiles; smallest valid F is {smallest}")]
    IndivisibleF {
        given: usize,
        required: usize,
        smallest: usize,
    },
    #[error("mu_R * F = {0} is not an integer packet count")]
    NonIntegerCacheCount(f64),
    #[error("demands must be distinct in worst-case mode")]
    NonDistinctDemands,
    #[error("oracle instance too large: {items} subpackets on one side, cap is {cap}")]
    InstanceTooLarge { items: usize, cap: usize },
    #[error("packet (file {file}, index {index}) is cached by no transmitter")]
    UnservablePacket { file: usize, index: usize },
    #[error("{0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// The tuple (K_T, K_R, N, F, mu_T, mu_R, alpha).
///
/// `alpha` is the bandwidth fraction of the P-subchannel (perfect CSIT);
/// the N-subchannel gets the remaining `1 - alpha`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct NetworkConfig {
    pub num_tx: usize,
    pub num_rx: usize,
    pub num_files: usize,
    pub packets_per_file: usize,
    pub mu_t: f64,
    pub mu_r: f64,
    pub alpha: f64,
}

impl NetworkConfig {
    pub fn new(
        num_tx: usize,
        num_rx: usize,
        num_files: usize,
        packets_per_file: usize,
        mu_t: f64,
        mu_r: f64,
        alpha: f64,
    ) -> Self {
        Self {
            num_tx,
            num_rx,
            num_files,
            packets_per_file,
            mu_t,
            mu_r,
            alpha,
        }
    }

    pub fn alpha_bar(&self) -> f64 {
        1.0 - self.alpha
    }

    /// K_T * mu_T, the aggregate (normalized) transmitter cache size.
    pub fn tx_cache_units(&self) -> f64 {
        self.num_tx as f64 * self.mu_t
    }

    /// K_R * mu_R, the aggregate (normalized) receiver cache size.
    pub fn rx_cache_units(&self) -> f64 {
        self.num_rx as f64 * self.mu_r
    }

    /// K_T * mu_T as an integer, if it is one (within `INT_TOL`).
    pub fn tx_cache_int(&self) -> Option<usize> {
        as_integer(self.tx_cache_units())
    }

    /// K_R * mu_R as an integer, if it is one (within `INT_TOL`).
    pub fn rx_cache_int(&self) -> Option<usize> {
        as_integer(self.rx_cache_units())
    }
}

fn as_integer(x: f64) -> Option<usize> {
    let r = x.round();
    if (x - r).abs() <= INT_TOL && r >= 0.0 {
        Some(r as usize)
    } else {
        None
    }
}

/// How strict config validation should be.
///
/// Formula mode accepts real-valued cache sizes (the closed forms coincide
/// with memory-sharing at integer corners). Scheduler mode enforces the
/// integrality needed to realize an actual placement: integer `K_T*mu_T`
/// for both schemes, and integer `K_R*mu_R` for the centralized scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValidationMode {
    Formula,
    SchedulerCentralized,
    SchedulerDecentralized,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Scheme {
    Centralized,
    Decentralized,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scheme::Centralized => write!(f, "centralized"),
            Scheme::Decentralized => write!(f, "decentralized"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subchannel {
    P,
    N,
}

/// Checks the invariants of `cfg` for the given mode and returns it unchanged.
pub fn validate_config(cfg: NetworkConfig, mode: ValidationMode) -> Result<NetworkConfig> {
    if cfg.num_tx == 0 || cfg.num_rx == 0 || cfg.num_files == 0 || cfg.packets_per_file == 0 {
        return Err(Error::Domain(
            "K_T, K_R, N and F must all be positive".into(),
        ));
    }
    for (name, v) in [("mu_T", cfg.mu_t), ("mu_R", cfg.mu_r), ("alpha", cfg.alpha)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Domain(format!("{name} = {v} outside [0, 1]")));
        }
    }
    if cfg.tx_cache_units() < 1.0 - INT_TOL {
        return Err(Error::LibraryUncoverable(cfg.tx_cache_units()));
    }
    if cfg.num_files < cfg.num_rx {
        return Err(Error::TooFewFiles {
            files: cfg.num_files,
            receivers: cfg.num_rx,
        });
    }
    match mode {
        ValidationMode::Formula => {}
        ValidationMode::SchedulerCentralized | ValidationMode::SchedulerDecentralized => {
            if cfg.tx_cache_int().is_none() {
                return Err(Error::NonIntegerCache {
                    quantity: "K_T*mu_T",
                    value: cfg.tx_cache_units(),
                });
            }
            if mode == ValidationMode::SchedulerCentralized && cfg.rx_cache_int().is_none() {
                return Err(Error::NonIntegerCache {
                    quantity: "K_R*mu_R",
                    value: cfg.rx_cache_units(),
                });
            }
        }
    }
    Ok(cfg)
}

/// One packet of the library: packet `index` of file `file` (both 0-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PacketId {
    pub file: usize,
    pub index: usize,
}

/// Demanded file per receiver, 0-based file indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DemandVector(pub Vec<usize>);

impl DemandVector {
    /// Canonical worst-case demands: receiver j demands file j.
    pub fn worst_case(cfg: &NetworkConfig) -> Result<Self> {
        if cfg.num_files < cfg.num_rx {
            return Err(Error::TooFewFiles {
                files: cfg.num_files,
                receivers: cfg.num_rx,
            });
        }
        Ok(Self((0..cfg.num_rx).collect()))
    }

    pub fn is_distinct(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.0.iter().all(|d| seen.insert(*d))
    }
}

/// Block counts and traffic totals for one delivery run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeliveryAccounting {
    /// Splitting ratio: fraction of each packet's bits on the P-subchannel.
    pub q: f64,
    pub p_blocks: usize,
    pub n_blocks: usize,
    /// Number of whole packets delivered, |D|.
    pub delivered: usize,
}

/// H = max{(q/alpha) H_p, (q_bar/alpha_bar) H_n} in time-slots.
///
/// A side carrying no bits (q = 0 for P, q = 1 for N) contributes 0
/// regardless of its block count; routing positive bits onto a
/// zero-bandwidth subchannel is an error when blocks exist there.
pub fn delivery_time(acct: &DeliveryAccounting, alpha: f64) -> Result<f64> {
    let side = |bits: f64, bw: f64, blocks: usize| -> Result<f64> {
        if bits <= 0.0 || blocks == 0 {
            Ok(0.0)
        } else if bw <= 0.0 {
            Err(Error::UndefinedDuration)
        } else {
            Ok(bits / bw * blocks as f64)
        }
    };
    let p = side(acct.q, alpha, acct.p_blocks)?;
    let n = side(1.0 - acct.q, 1.0 - alpha, acct.n_blocks)?;
    Ok(p.max(n))
}

/// One subpacket delivery: `packet`'s P- or N-half goes to `receiver`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Delivery {
    pub receiver: usize,
    pub packet: PacketId,
}

/// A scheduling unit: one subpacket to each of several distinct receivers.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Block {
    pub deliveries: Vec<Delivery>,
}

/// Ordered P-blocks and N-blocks plus the splitting ratio they assume.
#[derive(Clone, Debug)]
pub struct DeliverySchedule {
    pub q: f64,
    pub p_blocks: Vec<Block>,
    pub n_blocks: Vec<Block>,
}

impl DeliverySchedule {
    pub fn accounting(&self, delivered: usize) -> DeliveryAccounting {
        DeliveryAccounting {
            q: self.q,
            p_blocks: self.p_blocks.len(),
            n_blocks: self.n_blocks.len(),
            delivered,
        }
    }
}

/// Per-packet cached-by sets for an uncoded placement: for every packet
/// (n, f), the bitmask of transmitters and of receivers storing it.
#[derive(Clone, Debug)]
pub struct CachingRealization {
    pub num_tx: usize,
    pub num_rx: usize,
    pub num_files: usize,
    pub packets_per_file: usize,
    tx_sets: Vec<u64>,
    rx_sets: Vec<u64>,
}

impl CachingRealization {
    pub fn new(cfg: &NetworkConfig, tx_sets: Vec<u64>, rx_sets: Vec<u64>) -> Self {
        assert_eq!(tx_sets.len(), cfg.num_files * cfg.packets_per_file);
        assert_eq!(rx_sets.len(), tx_sets.len());
        Self {
            num_tx: cfg.num_tx,
            num_rx: cfg.num_rx,
            num_files: cfg.num_files,
            packets_per_file: cfg.packets_per_file,
            tx_sets,
            rx_sets,
        }
    }

    fn flat(&self, p: PacketId) -> usize {
        p.file * self.packets_per_file + p.index
    }

    /// Transmitters caching packet `p`, as a bitmask.
    pub fn tx_set(&self, p: PacketId) -> u64 {
        self.tx_sets[self.flat(p)]
    }

    /// Receivers caching packet `p`, as a bitmask.
    pub fn rx_set(&self, p: PacketId) -> u64 {
        self.rx_sets[self.flat(p)]
    }

    pub fn rx_caches_packet(&self, receiver: usize, p: PacketId) -> bool {
        self.rx_set(p) & (1 << receiver) != 0
    }

    /// All (receiver, packet) pairs that must be delivered for `demands`.
    pub fn needed_deliveries(&self, demands: &DemandVector) -> Vec<Delivery> {
        let mut out = Vec::new();
        for (j, &d) in demands.0.iter().enumerate() {
            for f in 0..self.packets_per_file {
                let p = PacketId { file: d, index: f };
                if !self.rx_caches_packet(j, p) {
                    out.push(Delivery {
                        receiver: j,
                        packet: p,
                    });
                }
            }
        }
        out
    }
}

/// All k-subsets of {0..n-1} as bitmasks, in lexicographic order of the
/// sorted index tuples.
pub fn subsets_of_size(n: usize, k: usize) -> Vec<u64> {
    assert!(n <= 64);
    let mut out = Vec::new();
    let mut pick = Vec::new();
    fn rec(start: usize, n: usize, k: usize, pick: &mut Vec<usize>, out: &mut Vec<u64>) {
        if pick.len() == k {
            out.push(pick.iter().fold(0u64, |m, &i| m | (1 << i)));
            return;
        }
        for i in start..n {
            pick.push(i);
            rec(i + 1, n, k, pick, out);
            pick.pop();
        }
    }
    rec(0, n, k, &mut pick, &mut out);
    out
}

/// Binomial coefficient as u128; panics on overflow (callers stay small).
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Packs deliveries into blocks of at most `capacity` distinct receivers.
///
/// Each round serves the receivers with the most remaining subpackets
/// (ties by index), one subpacket each. With balanced per-receiver queues
/// this realizes ceil(total / capacity) blocks, the best any one-shot
/// schedule can do at uniform per-packet capacity; the last block may be
/// partial.
pub fn pack_balanced(num_rx: usize, deliveries: &[Delivery], capacity: usize) -> Vec<Block> {
    assert!(capacity >= 1);
    let mut queues: Vec<std::collections::VecDeque<Delivery>> =
        vec![Default::default(); num_rx];
    for d in deliveries {
        queues[d.receiver].push_back(*d);
    }
    let mut blocks = Vec::new();
    loop {
        let mut order: Vec<usize> = (0..num_rx).filter(|&j| !queues[j].is_empty()).collect();
        if order.is_empty() {
            break;
        }
        order.sort_by_key(|&j| (std::cmp::Reverse(queues[j].len()), j));
        order.truncate(capacity);
        order.sort_unstable();
        let deliveries = order
            .into_iter()
            .map(|j| queues[j].pop_front().unwrap())
            .collect();
        blocks.push(Block { deliveries });
    }
    blocks
}
