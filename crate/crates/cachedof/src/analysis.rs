//! Polynomial quasiconcavity certificates, the Pinelis inequality check,
//! the J(r) dominance check, the cache-vs-CSIT tradeoff solver, and the
//! exact weighted-sum identity checks.

use crate::centralized::delivery_time_centralized_params;
use crate::decentralized::delivery_time_decentralized_params;
use crate::exact::{binom_rat, rat_int, to_f64, Rat};
use crate::model::{binomial, Error, NetworkConfig, Result, Scheme};
use num::{One, Signed, ToPrimitive, Zero};

/// Exact coefficients c_0..c_{K_R} of the certificate polynomial
/// p(zeta) = sum c_m zeta^m:
///   c_0 = 0,
///   c_{K_R} = (1 - r)/K_R,
///   c_m = C(K_R-1,m-1) ((K_R+1)/m - (K_R+r)/min{r+m-1, K_R})
///       + C(K_R-1,m)  (1/(m+1) - r/min{r+m, K_R})   for 1 <= m <= K_R-1.
pub fn poly_coefficients(kr: usize, r: &Rat) -> Result<Vec<Rat>> {
    if kr < 2 {
        return Err(Error::Domain(format!("K_R = {kr} must be >= 2")));
    }
    if r < &Rat::one() || r > &rat_int(kr as i64) {
        return Err(Error::Domain(format!(
            "r = {r} outside [1, {kr}]"
        )));
    }
    let krr = rat_int(kr as i64);
    let rat_min = |a: Rat, b: &Rat| if &a <= b { a } else { b.clone() };
    let mut c = vec![Rat::zero(); kr + 1];
    c[kr] = (Rat::one() - r) / &krr;
    for m in 1..kr {
        let mr = rat_int(m as i64);
        let first = (&krr + Rat::one()) / &mr
            - (&krr + r) / rat_min(r + &mr - Rat::one(), &krr);
        let second = Rat::one() / (&mr + Rat::one()) - r / rat_min(r + &mr, &krr);
        c[m] = binom_rat(kr - 1, m - 1) * first + binom_rat(kr - 1, m) * second;
    }
    Ok(c)
}

/// p(zeta) in f64 via Horner's rule.
pub fn eval_poly(coeffs: &[Rat], zeta: f64) -> f64 {
    coeffs
        .iter()
        .rev()
        .fold(0.0, |acc, c| acc * zeta + to_f64(c))
}

/// Closed form d_m = (K-m+1)(r-1)/(m(m+r-1)) + (K-m)(1-r)/((m+1)(m+r)),
/// equal to c'_m on m in [1, K - floor(r) - 1].
fn d_seq(kr: usize, r: &Rat, m: usize) -> Rat {
    let k = rat_int(kr as i64);
    let m1 = rat_int(m as i64);
    let a = (&k - &m1 + Rat::one()) * (r - Rat::one()) / (&m1 * (&m1 + r - Rat::one()));
    let b = (&k - &m1) * (Rat::one() - r) / ((&m1 + Rat::one()) * (&m1 + r));
    a + b
}

/// Closed form e_m = ((K+1)/m - (K+r)/K) + (K-m)/m (1/(m+1) - r/K),
/// equal to c'_m on m in [K - floor(r) + 1, K - 1].
fn e_seq(kr: usize, r: &Rat, m: usize) -> Rat {
    let k = rat_int(kr as i64);
    let m1 = rat_int(m as i64);
    let first = (&k + Rat::one()) / &m1 - (&k + r) / &k;
    let second = (&k - &m1) / &m1 * (Rat::one() / (&m1 + Rat::one()) - r / &k);
    first + second
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckOutcome {
    Pass,
    Fail,
    /// Index range empty or polynomial degenerate; nothing to check.
    Vacuous,
}

impl CheckOutcome {
    pub fn ok(self) -> bool {
        self != CheckOutcome::Fail
    }
    fn from_bool(b: bool) -> Self {
        if b {
            CheckOutcome::Pass
        } else {
            CheckOutcome::Fail
        }
    }
}

/// Pass/fail record of every step of the quasiconcavity argument for one
/// (K_R, r) cell. All comparisons are exact rational.
#[derive(Clone, Debug)]
pub struct PolyCertificate {
    pub kr: usize,
    pub r: Rat,
    pub coeffs: Vec<Rat>,
    /// c'_m = c_m / C(K_R-1, m-1) for m in [1, K_R-1].
    pub normalized: Vec<Rat>,
    /// (a) coefficient signs: nonnegative prefix, one positive pivot,
    /// nonpositive suffix (the quasiconcavity precondition).
    pub sign_pattern: CheckOutcome,
    /// (b) c'_m non-increasing over [1, K_R-1].
    pub c_prime_nonincreasing: CheckOutcome,
    /// (c) the closed forms d_m and e_m non-increasing on their ranges.
    pub d_e_nonincreasing: CheckOutcome,
    /// (d) c'_{K-rt} <= d_{K-rt-1} and c'_{K-rt} >= e_{K-rt+1}.
    pub boundary_comparisons: CheckOutcome,
    /// (e) l(eps) >= its three parabola lower bounds and g(K_R) >= 0.
    pub parabola_bounds: CheckOutcome,
}

impl PolyCertificate {
    pub fn passed(&self) -> bool {
        [
            self.sign_pattern,
            self.c_prime_nonincreasing,
            self.d_e_nonincreasing,
            self.boundary_comparisons,
            self.parabola_bounds,
        ]
        .into_iter()
        .all(CheckOutcome::ok)
    }
}

/// True when there is an N with c_m >= 0 for m < N, c_N > 0, c_m <= 0 for
/// m > N (N = -1 meaning all nonpositive).
fn sign_pattern_ok(coeffs: &[Rat]) -> bool {
    let pivot = coeffs.iter().rposition(|c| c.is_positive());
    match pivot {
        None => true, // all <= 0
        Some(n) => coeffs[..n].iter().all(|c| !c.is_negative()),
    }
}

pub fn quasiconcavity_certificate(kr: usize, r: &Rat) -> Result<PolyCertificate> {
    let coeffs = poly_coefficients(kr, r)?;
    let normalized: Vec<Rat> = (1..kr)
        .map(|m| coeffs[m].clone() / binom_rat(kr - 1, m - 1))
        .collect();
    let degenerate = r == &Rat::one() || r == &rat_int(kr as i64);
    if degenerate {
        // r = 1 gives the all-zero polynomial; r = K_R collapses the zeta
        // domain to the single point 0.
        let sign_pattern = CheckOutcome::from_bool(sign_pattern_ok(&coeffs));
        return Ok(PolyCertificate {
            kr,
            r: r.clone(),
            coeffs,
            normalized,
            sign_pattern,
            c_prime_nonincreasing: CheckOutcome::Vacuous,
            d_e_nonincreasing: CheckOutcome::Vacuous,
            boundary_comparisons: CheckOutcome::Vacuous,
            parabola_bounds: CheckOutcome::Vacuous,
        });
    }

    let sign_pattern = CheckOutcome::from_bool(sign_pattern_ok(&coeffs));
    let c_prime_nonincreasing = CheckOutcome::from_bool(
        normalized.windows(2).all(|w| w[0] >= w[1]),
    );

    // rt = floor(r) in [1, K_R-1], eps = r - rt in [0, 1)
    let rt = r.floor().to_integer().to_i64().unwrap() as usize;
    let eps = r - rat_int(rt as i64);

    let d_range: Vec<usize> = (1..kr.saturating_sub(rt)).collect(); // [1, K-rt-1]
    let e_range: Vec<usize> = (kr - rt + 1..kr).collect(); // [K-rt+1, K-1]
    let d_ok = d_range
        .windows(2)
        .all(|w| d_seq(kr, r, w[0]) >= d_seq(kr, r, w[1]));
    let e_ok = e_range
        .windows(2)
        .all(|w| e_seq(kr, r, w[0]) >= e_seq(kr, r, w[1]));
    let d_e_nonincreasing = if d_range.len() < 2 && e_range.len() < 2 {
        CheckOutcome::Vacuous
    } else {
        CheckOutcome::from_bool(d_ok && e_ok)
    };

    // consistency of the case split: d_m and e_m must equal c'_m on
    // their ranges (rolled into the boundary check)
    let case_split_ok = d_range.iter().all(|&m| d_seq(kr, r, m) == normalized[m - 1])
        && e_range.iter().all(|&m| e_seq(kr, r, m) == normalized[m - 1]);

    let pivot_m = kr - rt; // index K_R - rt, in [1, K_R-1]
    let c_pivot = &normalized[pivot_m - 1];
    let left_ok = if pivot_m >= 2 {
        c_pivot <= &d_seq(kr, r, pivot_m - 1)
    } else {
        true
    };
    let right_ok = if pivot_m + 1 <= kr - 1 {
        c_pivot >= &e_seq(kr, r, pivot_m + 1)
    } else {
        true
    };
    let boundary_comparisons = CheckOutcome::from_bool(case_split_ok && left_ok && right_ok);

    let parabola_bounds = CheckOutcome::from_bool(parabola_bounds_ok(kr, rt, &eps));

    Ok(PolyCertificate {
        kr,
        r: r.clone(),
        coeffs,
        normalized,
        sign_pattern,
        c_prime_nonincreasing,
        d_e_nonincreasing,
        boundary_comparisons,
        parabola_bounds,
    })
}

/// l(eps) = l1 + l2 + l3 with
///   l1 = K(K+eps-1)(K+1-rt-eps)(K-rt+2),
///   l2 = K(K+eps-1)(K+rt),
///   l3 = (eps-1)(K+eps+rt)(K-rt)(K-rt+1)(K-rt+2);
/// checks l1(eps) >= l1(1), l2(eps) >= l2(0), l3(eps) >= l3(0), and that
/// the bound sum g(K_R) = K(K-1)(K+rt) + (K-rt)(K-rt+2)(rt^2-rt-K) >= 0.
fn parabola_bounds_ok(kr: usize, rt: usize, eps: &Rat) -> bool {
    let k = rat_int(kr as i64);
    let rtr = rat_int(rt as i64);
    let one = Rat::one();
    let l1 = |e: &Rat| {
        &k * (&k + e - &one) * (&k + &one - &rtr - e) * (&k - &rtr + rat_int(2))
    };
    let l2 = |e: &Rat| &k * (&k + e - &one) * (&k + &rtr);
    let l3 = |e: &Rat| {
        (e - &one)
            * (&k + e + &rtr)
            * (&k - &rtr)
            * (&k - &rtr + &one)
            * (&k - &rtr + rat_int(2))
    };
    let g = &k * (&k - &one) * (&k + &rtr)
        + (&k - &rtr) * (&k - &rtr + rat_int(2)) * (&rtr * &rtr - &rtr - &k);
    l1(eps) >= l1(&one)
        && l2(eps) >= l2(&Rat::zero())
        && l3(eps) >= l3(&Rat::zero())
        && !g.is_negative()
}

/// Samples p(zeta) at both endpoints of [0, (K_R-r)/(K_R+r)] plus
/// `samples` uniform interior points; returns the minimum value.
pub fn verify_poly_nonneg(kr: usize, r: &Rat, samples: usize) -> Result<f64> {
    if samples < 2 {
        return Err(Error::Domain("samples must be >= 2".into()));
    }
    let coeffs = poly_coefficients(kr, r)?;
    let upper = to_f64(&((rat_int(kr as i64) - r) / (rat_int(kr as i64) + r)));
    let mut min = f64::INFINITY;
    for i in 0..=samples + 1 {
        let zeta = upper * i as f64 / (samples + 1) as f64;
        min = min.min(eval_poly(&coeffs, zeta));
    }
    Ok(min)
}

/// LHS, RHS and slack (RHS - LHS) of the inequality
/// sum_{m=1}^{K} m/min{r+m-1,K} C(K,m) ((K-r)/(K+r))^m
///   <= (K-r+2)/(K+r) ((2K/(K+r))^K - 1),
/// evaluated in exact rational arithmetic. The inequality is tight at
/// r = 1 and at r = K, where floating-point evaluation would produce
/// sign noise; exact arithmetic returns a slack of exactly 0 there.
pub fn verify_pinelis_inequality(k: usize, r: f64) -> Result<(f64, f64, f64)> {
    if k == 0 || !(1.0..=k as f64).contains(&r) {
        return Err(Error::Domain(format!(
            "need K >= 1 and r in [1, K]; got K = {k}, r = {r}"
        )));
    }
    let r = Rat::from_float(r).unwrap();
    let kq = rat_int(k as i64);
    let zeta = (&kq - &r) / (&kq + &r);
    let mut lhs = Rat::zero();
    let mut term: Rat = Rat::one(); // C(K,m) zeta^m, starting at m = 0
    for m in 1..=k {
        term *= rat_int((k - m + 1) as i64) / rat_int(m as i64) * &zeta;
        let denom = {
            let x = &r + rat_int(m as i64 - 1);
            if x <= kq { x } else { kq.clone() }
        };
        lhs += rat_int(m as i64) / denom * &term;
    }
    let base = rat_int(2 * k as i64) / (&kq + &r);
    let mut pow = Rat::one();
    for _ in 0..k {
        pow *= &base;
    }
    let rhs = (&kq - &r + rat_int(2)) / (&kq + &r) * (pow - Rat::one());
    let slack = &rhs - &lhs;
    Ok((to_f64(&lhs), to_f64(&rhs), to_f64(&slack)))
}

/// J(r) = min{(r + K_R mu_R)/(1 - mu_R), K_R}
///        * sum_m C(K_R-1,m) mu^m (1-mu)^{K_R-1-m} / min{r+m, K_R}.
pub fn j_function(r: f64, kr: usize, mu_r: f64) -> f64 {
    let krf = kr as f64;
    let numerator = ((r + krf * mu_r) / (1.0 - mu_r)).min(krf);
    let sum: f64 = (0..kr)
        .map(|m| {
            binomial(kr - 1, m) as f64 * mu_r.powi(m as i32)
                * (1.0 - mu_r).powi((kr - 1 - m) as i32)
                / (r + m as f64).min(krf)
        })
        .sum();
    numerator * sum
}

/// J(1) >= J(r) for every r in the grid (the decentralized gap step).
pub fn check_j_dominance(kr: usize, mu_r: f64, r_grid: &[f64]) -> bool {
    let j1 = j_function(1.0, kr, mu_r);
    r_grid.iter().all(|&r| j1 >= j_function(r, kr, mu_r) - 1e-12)
}

#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct TradeoffPoint {
    pub alpha_bar: f64,
    /// Extra receiver cache fraction restoring the full-CSIT delivery
    /// time; None when even mu_R + delta_R = 1 cannot restore it.
    pub delta_r: Option<f64>,
    pub scheme: Scheme,
}

/// For each alpha_bar, bisects delta_R in [0, 1 - mu_R] so that
/// H_scheme(mu_T, mu_R + delta_R, 1 - alpha_bar) equals
/// H_scheme(mu_T, mu_R, 1). H is continuous and strictly decreasing in
/// delta_R until it reaches 0, so bisection needs no smoothness.
pub fn tradeoff_curve(
    cfg: &NetworkConfig,
    scheme: Scheme,
    alpha_bar_grid: &[f64],
) -> Vec<TradeoffPoint> {
    let t = cfg.tx_cache_units();
    let h = |mu_r: f64, alpha: f64| -> f64 {
        match scheme {
            Scheme::Centralized => delivery_time_centralized_params(t, cfg.num_rx, mu_r, alpha),
            Scheme::Decentralized => {
                delivery_time_decentralized_params(t, cfg.num_rx, mu_r, alpha)
            }
        }
    };
    let target = h(cfg.mu_r, 1.0);
    alpha_bar_grid
        .iter()
        .map(|&ab| {
            let alpha = 1.0 - ab;
            let max_delta = 1.0 - cfg.mu_r;
            if h(cfg.mu_r, alpha) <= target + 1e-15 {
                return TradeoffPoint {
                    alpha_bar: ab,
                    delta_r: Some(0.0),
                    scheme,
                };
            }
            if h(cfg.mu_r + max_delta, alpha) > target + 1e-12 {
                return TradeoffPoint {
                    alpha_bar: ab,
                    delta_r: None,
                    scheme,
                };
            }
            let (mut lo, mut hi) = (0.0f64, max_delta);
            while hi - lo > 1e-9 {
                let mid = 0.5 * (lo + hi);
                if h(cfg.mu_r + mid, alpha) > target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            TradeoffPoint {
                alpha_bar: ab,
                delta_r: Some(0.5 * (lo + hi)),
                scheme,
            }
        })
        .collect()
}

/// Exact check of all three weighted-sum decompositions
/// f(alpha) = alpha f(1) + (1-alpha) f(0) at rational parameters.
pub fn weighted_sum_check(
    kt: usize,
    kr: usize,
    mu_t: &Rat,
    mu_r: &Rat,
    alpha_grid: &[Rat],
) -> bool {
    use crate::exact::{dof_centralized_rat, dof_decentralized_rat, dof_upper_rat,
        weighted_sum_identity};
    alpha_grid.iter().all(|alpha| {
        weighted_sum_identity(|a| dof_centralized_rat(kt, kr, mu_t, mu_r, a), alpha)
            && weighted_sum_identity(|a| dof_decentralized_rat(kt, kr, mu_t, mu_r, a), alpha)
            && weighted_sum_identity(|a| dof_upper_rat(kt, kr, mu_t, mu_r, a), alpha)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    /// Independent oracle: the certificate polynomial is defined by
    /// p(zeta) = sum_m [ (zeta(K+1)+1)/(1+m) - (zeta(K+r)+r)/min{r+m,K} ]
    ///           * C(K-1,m) zeta^m,
    /// expanded in powers of zeta. This recomputes the coefficients from
    /// that definition rather than the closed form.
    fn coeffs_from_definition(kr: usize, r: &Rat) -> Vec<Rat> {
        let mut c = vec![Rat::zero(); kr + 1];
        let krr = rat_int(kr as i64);
        for m in 0..kr {
            let b = binom_rat(kr - 1, m);
            let denom_n = rat_int(1 + m as i64);
            let denom_r = {
                let x = r + rat_int(m as i64);
                if x <= krr { x } else { krr.clone() }
            };
            // ((K+1)/denom_n - (K+r)/denom_r) zeta^{m+1}
            c[m + 1] += b.clone()
                * ((&krr + Rat::one()) / &denom_n - (&krr + r) / &denom_r);
            // (1/denom_n - r/denom_r) zeta^m
            c[m] += b * (Rat::one() / denom_n - r / denom_r);
        }
        c
    }

    #[test]
    fn coefficients_match_defining_inequality_expansion() {
        for (kr, rn, rd) in [(4, 2, 1), (4, 5, 2), (6, 3, 1), (5, 7, 4), (8, 1, 1)] {
            let r = rat(rn, rd);
            let closed = poly_coefficients(kr, &r).unwrap();
            let expanded = coeffs_from_definition(kr, &r);
            assert_eq!(closed, expanded, "kr={kr} r={rn}/{rd}");
        }
    }

    #[test]
    fn coefficients_spot_values() {
        let c = poly_coefficients(4, &rat(2, 1)).unwrap();
        assert_eq!(
            c,
            vec![rat(0, 1), rat(3, 2), rat(1, 1), rat(1, 4), rat(-1, 4)]
        );
        // r = 1: all-zero polynomial
        let z = poly_coefficients(4, &Rat::one()).unwrap();
        assert!(z.iter().all(Zero::is_zero));
        // domain errors
        assert!(poly_coefficients(4, &rat(1, 2)).is_err());
        assert!(poly_coefficients(1, &Rat::one()).is_err());
    }

    #[test]
    fn certificate_passes_and_reports_sequences() {
        let cert = quasiconcavity_certificate(4, &rat(2, 1)).unwrap();
        assert!(cert.passed());
        assert_eq!(cert.normalized, vec![rat(3, 2), rat(1, 3), rat(1, 12)]);
        // degenerate cases pass vacuously
        assert!(quasiconcavity_certificate(4, &Rat::one()).unwrap().passed());
        assert!(quasiconcavity_certificate(4, &rat_int(4)).unwrap().passed());
    }

    #[test]
    fn certificate_grid_small() {
        for kr in 2..=12usize {
            let mut rq = rat_int(1);
            while rq <= rat_int(kr as i64) {
                let cert = quasiconcavity_certificate(kr, &rq).unwrap();
                assert!(cert.passed(), "kr={kr} r={rq}");
                rq += rat(1, 4);
            }
        }
    }

    #[test]
    fn poly_nonneg_spot_values() {
        // right endpoint at K_R=4, r=2: p(1/3) = 50/81
        let c = poly_coefficients(4, &rat(2, 1)).unwrap();
        let v = eval_poly(&c, 1.0 / 3.0);
        assert!((v - 50.0 / 81.0).abs() < 1e-12);
        assert_eq!(eval_poly(&c, 0.0), 0.0);
        let min = verify_poly_nonneg(16, &rat(4, 1), 1000).unwrap();
        assert!(min >= -1e-12);
    }

    #[test]
    fn pinelis_spot_values() {
        let (lhs, rhs, slack) = verify_pinelis_inequality(4, 2.0).unwrap();
        assert!((lhs - 100.0 / 81.0).abs() < 1e-12);
        assert!((rhs - 350.0 / 243.0).abs() < 1e-12);
        assert!(slack > 0.0);
        // r = K: both sides exactly 0
        let (l0, r0, s0) = verify_pinelis_inequality(6, 6.0).unwrap();
        assert_eq!((l0, r0, s0), (0.0, 0.0, 0.0));
        assert!(verify_pinelis_inequality(4, 0.5).is_err());
    }

    #[test]
    fn j_dominance_holds() {
        // numerator saturation at r >= K_R(1 - 2 mu_R)
        let kr = 16;
        let mu = 1.0 / 8.0;
        let r_sat = kr as f64 * (1.0 - 2.0 * mu);
        let j = j_function(r_sat, kr, mu);
        let sum: f64 = (0..kr)
            .map(|m| {
                binomial(kr - 1, m) as f64 * mu.powi(m as i32)
                    * (1.0 - mu).powi((kr - 1 - m) as i32)
                    / (r_sat + m as f64).min(kr as f64)
            })
            .sum();
        assert!((j - kr as f64 * sum).abs() < 1e-9);
        let grid: Vec<f64> = (1..=12).map(|x| x as f64).collect();
        assert!(check_j_dominance(16, 1.0 / 8.0, &grid));
    }

    #[test]
    fn tradeoff_curve_properties() {
        let cfg = NetworkConfig::new(8, 16, 16, 1, 0.5, 1.0 / 16.0, 1.0);
        let grid: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
        let pts = tradeoff_curve(&cfg, Scheme::Centralized, &grid);
        assert_eq!(pts[0].delta_r, Some(0.0));
        // monotone nondecreasing in alpha_bar
        let mut prev = -1.0;
        for p in &pts {
            let d = p.delta_r.expect("attainable");
            assert!(d >= prev - 1e-9);
            prev = d;
        }
        // residual check: the defining equality holds at the root
        let t = cfg.tx_cache_units();
        let target = delivery_time_centralized_params(t, 16, cfg.mu_r, 1.0);
        for p in &pts {
            let d = p.delta_r.unwrap();
            if d > 0.0 && d < 1.0 - cfg.mu_r {
                let h = delivery_time_centralized_params(t, 16, cfg.mu_r + d, 1.0 - p.alpha_bar);
                assert!((h - target).abs() / target < 1e-6, "ab={}", p.alpha_bar);
            }
        }
    }

    #[test]
    fn weighted_sum_check_exact() {
        let alphas: Vec<Rat> = (0..=10).map(|a| rat(a, 10)).collect();
        assert!(weighted_sum_check(16, 16, &rat(1, 2), &rat(1, 16), &alphas));
        assert!(weighted_sum_check(2, 2, &rat(1, 2), &rat(1, 2), &alphas));
    }
}
