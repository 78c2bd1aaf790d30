//! Exact rational evaluation of the closed-form DoF expressions, used by
//! the identity checks so that sign decisions never hinge on rounding.

use num::rational::BigRational;
use num::{BigInt, One, Zero};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_min(a: Rat, b: Rat) -> Rat {
    if a <= b {
        a
    } else {
        b
    }
}

pub fn binom_rat(n: usize, k: usize) -> Rat {
    Rat::from_integer(BigInt::from(crate::model::binomial(n, k)))
}

/// x^k for nonnegative k.
pub fn pow_rat(x: &Rat, k: usize) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..k {
        acc *= x;
    }
    acc
}

/// Converts to f64 (both terms fit comfortably in the ranges we sweep).
pub fn to_f64(x: &Rat) -> f64 {
    let n = x.numer();
    let d = x.denom();
    // Avoid precision loss for big integers by going through string only
    // when the parts exceed f64's exact-integer range.
    fn part(b: &BigInt) -> f64 {
        use num::ToPrimitive;
        b.to_f64().unwrap_or(f64::NAN)
    }
    part(n) / part(d)
}

/// Achievable DoF of the centralized scheme at rational parameters:
/// alpha * min{t + r, K_R} + (1 - alpha) * min{1 + r, K_R},
/// with t = K_T*mu_T and r = K_R*mu_R.
pub fn dof_centralized_rat(kt: usize, kr: usize, mu_t: &Rat, mu_r: &Rat, alpha: &Rat) -> Rat {
    let t = rat_int(kt as i64) * mu_t;
    let r = rat_int(kr as i64) * mu_r;
    let krr = rat_int(kr as i64);
    let leg_p = rat_min(&t + &r, krr.clone());
    let leg_n = rat_min(Rat::one() + &r, krr);
    alpha * leg_p + (Rat::one() - alpha) * leg_n
}

/// Achievable DoF of the decentralized scheme at rational parameters.
///
/// P-leg: 1 / sum_{l=0}^{K_R-1} C(K_R-1,l) mu_R^l (1-mu_R)^{K_R-1-l} / min{t+l, K_R}.
/// N-leg: K_R mu_R / (1 - (1-mu_R)^{K_R}), with the mu_R = 0 limit 1; we
/// evaluate it as 1 / sum_l C(K_R-1,l) mu^l (1-mu)^{K_R-1-l} / (1+l), which
/// is the same quantity and stays finite at mu_R = 0.
pub fn dof_decentralized_rat(kt: usize, kr: usize, mu_t: &Rat, mu_r: &Rat, alpha: &Rat) -> Rat {
    let t = rat_int(kt as i64) * mu_t;
    let leg_p = Rat::one() / decentralized_inverse_leg(kr, mu_r, |l| {
        rat_min(&t + rat_int(l as i64), rat_int(kr as i64))
    });
    let leg_n =
        Rat::one() / decentralized_inverse_leg(kr, mu_r, |l| rat_int(l as i64 + 1));
    alpha * leg_p + (Rat::one() - alpha) * leg_n
}

/// sum_{l=0}^{K_R-1} C(K_R-1,l) mu^l (1-mu)^{K_R-1-l} / denom(l).
/// At mu_R = 1 only l = K_R-1 survives; callers never divide by zero since
/// denom(l) >= 1 always.
fn decentralized_inverse_leg<F: Fn(usize) -> Rat>(kr: usize, mu_r: &Rat, denom: F) -> Rat {
    let one_minus = Rat::one() - mu_r;
    let mut acc = Rat::zero();
    for l in 0..kr {
        let term = binom_rat(kr - 1, l) * pow_rat(mu_r, l) * pow_rat(&one_minus, kr - 1 - l);
        acc += term / denom(l);
    }
    acc
}

/// Converse upper bound at rational parameters:
/// alpha * min{(t+r)/(1-mu_R), K_R} + (1-alpha) * min{(1+r)/(1-mu_R), K_R},
/// with mu_R = 1 giving K_R on both legs through the min.
pub fn dof_upper_rat(kt: usize, kr: usize, mu_t: &Rat, mu_r: &Rat, alpha: &Rat) -> Rat {
    let t = rat_int(kt as i64) * mu_t;
    let r = rat_int(kr as i64) * mu_r;
    let krr = rat_int(kr as i64);
    let denom = Rat::one() - mu_r;
    let leg = |num: Rat| {
        if denom.is_zero() || num >= &krr * &denom {
            krr.clone()
        } else {
            num / denom.clone()
        }
    };
    let leg_p = leg(&t + &r);
    let leg_n = leg(Rat::one() + &r);
    alpha * leg_p + (Rat::one() - alpha) * leg_n
}

/// True when f(alpha) = alpha f(1) + (1-alpha) f(0) exactly.
pub fn weighted_sum_identity<F: Fn(&Rat) -> Rat>(f: F, alpha: &Rat) -> bool {
    let at_alpha = f(alpha);
    let mix = alpha * f(&Rat::one()) + (Rat::one() - alpha) * f(&Rat::zero());
    (at_alpha - mix).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centralized_matches_hand_values() {
        // K_T=16, mu_T=1/2, K_R=16, mu_R=1/16
        let v1 = dof_centralized_rat(16, 16, &rat(1, 2), &rat(1, 16), &Rat::one());
        assert_eq!(v1, rat_int(9));
        let v0 = dof_centralized_rat(16, 16, &rat(1, 2), &rat(1, 16), &Rat::zero());
        assert_eq!(v0, rat_int(2));
        let vh = dof_centralized_rat(16, 16, &rat(1, 2), &rat(1, 16), &rat(1, 2));
        assert_eq!(vh, rat(11, 2));
    }

    #[test]
    fn decentralized_matches_hand_values() {
        // K_R=2, mu_R=1/2, t=1: both legs are 4/3.
        let a0 = dof_decentralized_rat(2, 2, &rat(1, 2), &rat(1, 2), &Rat::zero());
        let a1 = dof_decentralized_rat(2, 2, &rat(1, 2), &rat(1, 2), &Rat::one());
        assert_eq!(a0, rat(4, 3));
        assert_eq!(a1, rat(4, 3));
        // mu_R = 0: N-leg limit is 1.
        let z = dof_decentralized_rat(2, 2, &rat(1, 2), &Rat::zero(), &Rat::zero());
        assert_eq!(z, Rat::one());
        // mu_R = 1: full caches, both legs K_R.
        let f = dof_decentralized_rat(2, 3, &rat(1, 2), &Rat::one(), &rat(1, 3));
        assert_eq!(f, rat_int(3));
    }

    #[test]
    fn upper_bound_matches_hand_values() {
        let u1 = dof_upper_rat(16, 16, &rat(1, 2), &rat(1, 16), &Rat::one());
        assert_eq!(u1, rat(48, 5)); // 9.6
        let u0 = dof_upper_rat(16, 16, &rat(1, 2), &rat(1, 16), &Rat::zero());
        assert_eq!(u0, rat(32, 15));
        // mu_R = 1 saturates to K_R
        let s = dof_upper_rat(2, 4, &Rat::one(), &Rat::one(), &rat(1, 2));
        assert_eq!(s, rat_int(4));
    }

    #[test]
    fn weighted_sum_identities_hold() {
        let mu_t = rat(1, 2);
        let mu_r = rat(1, 16);
        for a in 0..=10 {
            let alpha = rat(a, 10);
            assert!(weighted_sum_identity(
                |al| dof_centralized_rat(16, 16, &mu_t, &mu_r, al),
                &alpha
            ));
            assert!(weighted_sum_identity(
                |al| dof_decentralized_rat(16, 16, &mu_t, &mu_r, al),
                &alpha
            ));
            assert!(weighted_sum_identity(
                |al| dof_upper_rat(16, 16, &mu_t, &mu_r, al),
                &alpha
            ));
        }
    }
}
