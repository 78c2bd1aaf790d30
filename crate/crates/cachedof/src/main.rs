//! Command-line surface: closed-form DoF reports, schedule dumps with an
//! optional brute-force cross-check, verification suites, the
//! cache-vs-CSIT tradeoff CSV, and Monte-Carlo validation.

use cachedof::analysis::{tradeoff_curve, TradeoffPoint};
use cachedof::bounds::{bruteforce_min_blocks, dof_upper_bound, DEFAULT_ORACLE_CAP};
use cachedof::centralized::{
    centralized_place, centralized_schedule, dof_centralized, splitting_ratio_centralized,
};
use cachedof::decentralized::{
    decentralized_place, decentralized_schedule, dof_decentralized, montecarlo_delivery,
    splitting_ratio_decentralized,
};
use cachedof::model::{delivery_time, validate_config, ValidationMode};
use cachedof::sweep::{
    default_configs, gaps_suite, identities_suite, pinelis_suite, poly_suite, with_thread_cap,
};
use cachedof::{DeliverySchedule, Error, NetworkConfig, Scheme};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "cachedof", version, about = "Cache-aided interference management over parallel subchannels: DoF formulas, schedulers and numerical certification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Centralized,
    Decentralized,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeOrBoth {
    Centralized,
    Decentralized,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Args)]
struct ConfigArgs {
    /// Number of transmitters (K_T)
    #[arg(long)]
    kt: usize,
    /// Number of receivers (K_R)
    #[arg(long)]
    kr: usize,
    /// Number of library files (N); defaults to K_R
    #[arg(long)]
    n: Option<usize>,
    /// Packets per file (F)
    #[arg(long, default_value_t = 1)]
    f: usize,
    /// Transmitter cache fraction (mu_T)
    #[arg(long = "mut")]
    mu_t: f64,
    /// Receiver cache fraction (mu_R)
    #[arg(long = "mur")]
    mu_r: f64,
    /// P-subchannel (perfect-CSIT) bandwidth fraction
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
}

impl ConfigArgs {
    fn to_config(&self) -> NetworkConfig {
        NetworkConfig::new(
            self.kt,
            self.kr,
            self.n.unwrap_or(self.kr),
            self.f,
            self.mu_t,
            self.mu_r,
            self.alpha,
        )
    }
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form achievable DoF (both schemes), upper bound and gaps
    Dof {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Run a scheduler and print every block, optionally cross-checked
    /// against the exact brute-force optimum
    Schedule {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, value_enum, default_value_t = SchemeArg::Centralized)]
        scheme: SchemeArg,
        /// Placement seed (decentralized scheme)
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also compute the exact minimum block counts and report
        /// MATCH/MISMATCH
        #[arg(long)]
        oracle: bool,
        /// Oracle instance-size cap (demanded packets)
        #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
        oracle_cap: usize,
    },
    /// Run verification suites over default grids; nonzero exit on any
    /// failed assertion
    Verify {
        /// gaps | poly | pinelis | identities | all
        #[arg(long, default_value = "all")]
        suite: String,
        /// Largest K_R for the polynomial certificate grid
        #[arg(long, default_value_t = 64)]
        kr_max: usize,
        /// Largest K for the Pinelis inequality grid
        #[arg(long, default_value_t = 128)]
        k_max: usize,
        /// Interior sample count for polynomial nonnegativity
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Number of random rational configs for the identity suite
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// CSV of the extra cache delta_R compensating a CSIT reduction
    /// alpha_bar, per scheme
    Tradeoff {
        /// Transmitter counts (repeatable)
        #[arg(long, required = true, num_args = 1..)]
        kt: Vec<usize>,
        #[arg(long)]
        kr: usize,
        #[arg(long = "mut")]
        mu_t: f64,
        #[arg(long = "mur")]
        mu_r: f64,
        #[arg(long, value_enum, default_value_t = SchemeOrBoth::Both)]
        scheme: SchemeOrBoth,
        /// Number of alpha_bar grid points on [0, 1]
        #[arg(long, default_value_t = 101)]
        points: usize,
        /// Output file (stdout when omitted)
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Monte-Carlo validation of the decentralized delivery-time formula
    Montecarlo {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value_t = 32)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Max relative error |mean - formula| / formula
        #[arg(long, default_value_t = 0.05)]
        tol: f64,
    },
}

/// Rounds to `digits` significant digits and renders without exponent
/// noise (shortest representation of the rounded value).
fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{:.*e}", digits - 1, x).parse().unwrap();
    format!("{rounded}")
}

fn fail(code: i32, msg: &str) -> ! {
    eprintln!("error: {msg}");
    std::process::exit(code);
}

fn config_or_exit(cfg: NetworkConfig, mode: ValidationMode) -> NetworkConfig {
    match validate_config(cfg, mode) {
        Ok(c) => c,
        Err(e) => fail(2, &e.to_string()),
    }
}

fn main() {
    let cli = Cli::parse();
    match cli.command {
        Command::Dof { config, format } => {
            let cfg = config_or_exit(config.to_config(), ValidationMode::Formula);
            cmd_dof(&cfg, format);
        }
        Command::Schedule {
            config,
            scheme,
            seed,
            oracle,
            oracle_cap,
        } => cmd_schedule(config.to_config(), scheme, seed, oracle, oracle_cap),
        Command::Verify {
            suite,
            kr_max,
            k_max,
            samples,
            count,
            seed,
        } => with_thread_cap(|| cmd_verify(&suite, kr_max, k_max, samples, count, seed)),
        Command::Tradeoff {
            kt,
            kr,
            mu_t,
            mu_r,
            scheme,
            points,
            out,
        } => cmd_tradeoff(&kt, kr, mu_t, mu_r, scheme, points, out),
        Command::Montecarlo {
            config,
            trials,
            seed,
            tol,
        } => cmd_montecarlo(config.to_config(), trials, seed, tol),
    }
}

fn cmd_dof(cfg: &NetworkConfig, format: Format) {
    let cen = dof_centralized(cfg);
    let dec = dof_decentralized(cfg);
    let up = dof_upper_bound(cfg);
    let qc = splitting_ratio_centralized(cfg);
    let qd = splitting_ratio_decentralized(cfg);
    match format {
        Format::Json => {
            let fields = [
                ("achievable_centralized", cen),
                ("achievable_decentralized", dec),
                ("upper_bound", up),
                ("ratio_centralized", up / cen),
                ("ratio_decentralized", up / dec),
                ("q_centralized", qc),
                ("q_decentralized", qd),
            ];
            let body: Vec<String> = fields
                .iter()
                .map(|(k, v)| format!("\"{k}\": {}", sig(*v, 12)))
                .collect();
            println!("{{{}}}", body.join(", "));
        }
        Format::Table => {
            println!("{:<26} {}", "achievable centralized", sig(cen, 12));
            println!("{:<26} {}", "achievable decentralized", sig(dec, 12));
            println!("{:<26} {}", "upper bound", sig(up, 12));
            println!("{:<26} {}", "ratio centralized", sig(up / cen, 12));
            println!("{:<26} {}", "ratio decentralized", sig(up / dec, 12));
            println!("{:<26} {}", "q centralized", sig(qc, 12));
            println!("{:<26} {}", "q decentralized", sig(qd, 12));
        }
    }
}

fn print_blocks(label: &str, blocks: &[cachedof::model::Block]) {
    for (i, b) in blocks.iter().enumerate() {
        let entries: Vec<String> = b
            .deliveries
            .iter()
            .map(|d| format!("rx{}<-({},{})", d.receiver, d.packet.file, d.packet.index))
            .collect();
        println!("{label}-block {i}: {}", entries.join(" "));
    }
}

fn cmd_schedule(cfg: NetworkConfig, scheme: SchemeArg, seed: u64, oracle: bool, cap: usize) {
    let mode = match scheme {
        SchemeArg::Centralized => ValidationMode::SchedulerCentralized,
        SchemeArg::Decentralized => ValidationMode::SchedulerDecentralized,
    };
    let cfg = config_or_exit(cfg, mode);
    let demands = match cachedof::DemandVector::worst_case(&cfg) {
        Ok(d) => d,
        Err(e) => fail(2, &e.to_string()),
    };
    let run = || -> Result<(DeliverySchedule, cachedof::CachingRealization), Error> {
        match scheme {
            SchemeArg::Centralized => {
                let p = centralized_place(&cfg)?;
                Ok((centralized_schedule(&p, &demands, cfg.alpha)?, p.realization()))
            }
            SchemeArg::Decentralized => {
                let p = decentralized_place(&cfg, seed)?;
                Ok((decentralized_schedule(&p, &demands, cfg.alpha)?, p.realization()))
            }
        }
    };
    let (schedule, realization) = match run() {
        Ok(v) => v,
        Err(e) => fail(2, &e.to_string()),
    };
    let delivered = realization.needed_deliveries(&demands).len();
    print_blocks("P", &schedule.p_blocks);
    print_blocks("N", &schedule.n_blocks);
    let acct = schedule.accounting(delivered);
    let h = match delivery_time(&acct, cfg.alpha) {
        Ok(h) => h,
        Err(e) => fail(2, &e.to_string()),
    };
    println!(
        "blocks: P={} N={} q={} delivered={} H={}",
        acct.p_blocks,
        acct.n_blocks,
        sig(acct.q, 12),
        delivered,
        sig(h, 12)
    );
    if h > 0.0 {
        println!("realized dof: {}", sig(delivered as f64 / h, 12));
    }
    if oracle {
        let opt = match bruteforce_min_blocks(&realization, &demands, cfg.alpha, cap) {
            Ok(o) => o,
            Err(e @ Error::InstanceTooLarge { .. }) => fail(3, &e.to_string()),
            Err(e) => fail(2, &e.to_string()),
        };
        println!(
            "oracle: P={} N={} q*={} max-load={}",
            opt.p_blocks,
            opt.n_blocks,
            sig(opt.q_star, 12),
            sig(opt.min_max_load, 12)
        );
        // compare only the sides that carry traffic at this q
        let p_ok = acct.q == 0.0
            || match scheme {
                SchemeArg::Centralized => acct.p_blocks == opt.p_blocks,
                SchemeArg::Decentralized => acct.p_blocks >= opt.p_blocks,
            };
        let n_ok = acct.q == 1.0
            || match scheme {
                SchemeArg::Centralized => acct.n_blocks == opt.n_blocks,
                SchemeArg::Decentralized => acct.n_blocks >= opt.n_blocks,
            };
        println!("verdict: {}", if p_ok && n_ok { "MATCH" } else { "MISMATCH" });
    }
}

fn cmd_verify(suite: &str, kr_max: usize, k_max: usize, samples: usize, count: usize, seed: u64) {
    let mut ok = true;
    let run_gaps = matches!(suite, "gaps" | "all");
    let run_poly = matches!(suite, "poly" | "all");
    let run_pinelis = matches!(suite, "pinelis" | "all");
    let run_identities = matches!(suite, "identities" | "all");
    if !(run_gaps || run_poly || run_pinelis || run_identities) {
        fail(2, &format!("unknown suite '{suite}' (expected gaps|poly|pinelis|identities|all)"));
    }
    if run_gaps {
        let s = gaps_suite(&default_configs());
        println!(
            "gaps: {} over {} configs; max up/cen {} <= 2, max up/dec {} <= 3, max cen/dec {} <= 1.5",
            pass_str(s.pass),
            s.configs,
            sig(s.max_centralized_ratio, 12),
            sig(s.max_decentralized_ratio, 12),
            sig(s.max_cen_vs_dec_ratio, 12)
        );
        if !s.pass {
            eprintln!(
                "gaps falsified at: up/cen {:?}; up/dec {:?}; cen/dec {:?}",
                s.max_centralized_at, s.max_decentralized_at, s.max_cen_vs_dec_at
            );
        }
        ok &= s.pass;
    }
    if run_poly {
        let s = poly_suite(kr_max, samples);
        println!(
            "poly: {} over {} (K_R, r) cells; certificates {}/{}; min sampled p {}",
            pass_str(s.pass),
            s.cells,
            s.certificates_passed,
            s.cells,
            sig(s.min_sampled_value, 12)
        );
        ok &= s.pass;
    }
    if run_pinelis {
        let s = pinelis_suite(k_max);
        println!(
            "pinelis: {} over {} (K, r) cells; min slack {}; max |slack| at r=K {}",
            pass_str(s.pass),
            s.cells,
            sig(s.min_slack, 12),
            sig(s.max_edge_slack, 12)
        );
        ok &= s.pass;
    }
    if run_identities {
        let s = identities_suite(count, seed);
        println!(
            "identities: {} over {} rational configs x {} alphas (exact)",
            pass_str(s.pass),
            s.configs,
            s.alphas_per_config
        );
        ok &= s.pass;
    }
    if !ok {
        std::process::exit(1);
    }
}

fn pass_str(p: bool) -> &'static str {
    if p {
        "PASS"
    } else {
        "FAIL"
    }
}

fn cmd_tradeoff(
    kts: &[usize],
    kr: usize,
    mu_t: f64,
    mu_r: f64,
    scheme: SchemeOrBoth,
    points: usize,
    out: Option<std::path::PathBuf>,
) {
    if points < 2 {
        fail(2, "need at least 2 grid points");
    }
    let schemes: &[Scheme] = match scheme {
        SchemeOrBoth::Centralized => &[Scheme::Centralized],
        SchemeOrBoth::Decentralized => &[Scheme::Decentralized],
        SchemeOrBoth::Both => &[Scheme::Centralized, Scheme::Decentralized],
    };
    let grid: Vec<f64> = (0..points).map(|i| i as f64 / (points - 1) as f64).collect();
    let mut csv = String::from("alpha_bar,delta_r,scheme,kt,kr,mut,mur\n");
    for &kt in kts {
        let cfg = config_or_exit(
            NetworkConfig::new(kt, kr, kr, 1, mu_t, mu_r, 1.0),
            ValidationMode::Formula,
        );
        for &s in schemes {
            for TradeoffPoint {
                alpha_bar, delta_r, ..
            } in tradeoff_curve(&cfg, s, &grid)
            {
                let d = delta_r.map_or("NA".to_string(), |d| sig(d, 9));
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    sig(alpha_bar, 9),
                    d,
                    s,
                    kt,
                    kr,
                    sig(mu_t, 9),
                    sig(mu_r, 9)
                ));
            }
        }
    }
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, csv) {
                fail(2, &format!("cannot write {}: {e}", path.display()));
            }
        }
        None => print!("{csv}"),
    }
}

fn cmd_montecarlo(cfg: NetworkConfig, trials: usize, seed: u64, tol: f64) {
    if trials == 0 {
        fail(2, "trials must be >= 1");
    }
    let cfg = config_or_exit(cfg, ValidationMode::SchedulerDecentralized);
    let report = match montecarlo_delivery(&cfg, seed, trials) {
        Ok(r) => r,
        Err(e) => fail(2, &e.to_string()),
    };
    println!(
        "{{\"formula\": {}, \"empirical_mean\": {}, \"stderr\": {}, \"trials\": {}, \"seed\": {}}}",
        sig(report.formula, 12),
        sig(report.empirical_mean, 12),
        sig(report.stderr, 12),
        report.trials,
        report.seed
    );
    let rel = if report.formula > 0.0 {
        (report.empirical_mean - report.formula).abs() / report.formula
    } else {
        report.empirical_mean.abs()
    };
    if rel > tol {
        eprintln!("tolerance exceeded: relative error {} > {tol}", sig(rel, 6));
        std::process::exit(1);
    }
}
