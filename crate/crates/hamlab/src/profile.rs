//! Elongation profiles `ρ₊`, `ρ₋ = 1 − ρ₊` and `ρ_K`.
//!
//! `ρ₊` is the quintic smoothstep `6x⁵ − 15x⁴ + 10x³` on `[0, 1]`, so every
//! profile is `C²`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::HamError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "k", rename_all = "snake_case")]
pub enum Profile {
    RhoPlus,
    RhoMinus,
    RhoK(f64),
}

fn smoothstep(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        x * x * x * (10.0 + x * (-15.0 + 6.0 * x))
    }
}

fn smoothstep_prime(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        30.0 * x * x * (x - 1.0) * (x - 1.0)
    }
}

impl Profile {
    pub fn rho_k(k: f64) -> Result<Profile, HamError> {
        if !(k.is_finite() && k >= 0.0) {
            return Err(HamError::Invalid(format!("K = {k} must be a finite nonnegative number")));
        }
        Ok(Profile::RhoK(k))
    }

    pub fn value(&self, tau: f64) -> f64 {
        match *self {
            Profile::RhoPlus => smoothstep(tau),
            Profile::RhoMinus => 1.0 - smoothstep(tau),
            Profile::RhoK(k) if k < 1.0 => k * Profile::RhoK(1.0).value(tau),
            Profile::RhoK(k) => {
                if tau <= -k + 1.0 {
                    smoothstep(tau + k)
                } else if tau >= k - 1.0 {
                    1.0 - smoothstep(tau - k + 1.0)
                } else {
                    1.0
                }
            }
        }
    }

    pub fn derivative(&self, tau: f64) -> f64 {
        match *self {
            Profile::RhoPlus => smoothstep_prime(tau),
            Profile::RhoMinus => -smoothstep_prime(tau),
            Profile::RhoK(k) if k < 1.0 => k * Profile::RhoK(1.0).derivative(tau),
            Profile::RhoK(k) => {
                if tau <= -k + 1.0 {
                    smoothstep_prime(tau + k)
                } else if tau >= k - 1.0 {
                    -smoothstep_prime(tau - k + 1.0)
                } else {
                    0.0
                }
            }
        }
    }

    /// `(ρ(−∞), ρ(+∞))`.
    pub fn limits(&self) -> (f64, f64) {
        match self {
            Profile::RhoPlus => (0.0, 1.0),
            Profile::RhoMinus => (1.0, 0.0),
            Profile::RhoK(_) => (0.0, 0.0),
        }
    }

    /// `(∫(ρ′)₊, ∫(ρ′)₋)`.
    pub fn variation(&self) -> (f64, f64) {
        match *self {
            Profile::RhoPlus => (1.0, 0.0),
            Profile::RhoMinus => (0.0, 1.0),
            Profile::RhoK(k) => {
                let m = k.min(1.0);
                (m, m)
            }
        }
    }

    /// Interval outside which `ρ′ ≡ 0`.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Profile::RhoPlus | Profile::RhoMinus => (0.0, 1.0),
            Profile::RhoK(k) => {
                let k = k.max(1.0);
                (-k, k)
            }
        }
    }
}

impl FromStr for Profile {
    type Err = HamError;

    /// `rho+`, `rho-`, `rhoK=2` (also `K=2`, `rho_K:2`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match s {
            "rho+" | "rho_plus" | "plus" => Ok(Profile::RhoPlus),
            "rho-" | "rho_minus" | "minus" => Ok(Profile::RhoMinus),
            _ => {
                let k = s
                    .strip_prefix("rhoK=")
                    .or_else(|| s.strip_prefix("K="))
                    .or_else(|| s.strip_prefix("rho_K:"))
                    .or_else(|| s.strip_prefix("rho_K="))
                    .and_then(|v| v.parse::<f64>().ok())
                    .ok_or_else(|| HamError::Parse { input: s.to_string(), message: "expected rho+, rho- or rhoK=<K>".into() })?;
                Profile::rho_k(k)
            }
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::RhoPlus => f.write_str("rho+"),
            Profile::RhoMinus => f.write_str("rho-"),
            Profile::RhoK(k) => write!(f, "rhoK={k}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(lo: f64, hi: f64) -> impl Iterator<Item = f64> {
        (0..=400).map(move |i| lo + (hi - lo) * i as f64 / 400.0)
    }

    #[test]
    fn rho_plus_boundary_values_and_monotonicity() {
        let p = Profile::RhoPlus;
        for tau in grid(-3.0, 4.0) {
            if tau <= 0.0 {
                assert_eq!(p.value(tau), 0.0);
            }
            if tau >= 1.0 {
                assert_eq!(p.value(tau), 1.0);
            }
            assert!(p.derivative(tau) >= 0.0);
            assert_eq!(Profile::RhoMinus.value(tau), 1.0 - p.value(tau));
        }
    }

    #[test]
    fn rho_k_shape() {
        for k in [1.0, 1.5, 2.0, 3.0] {
            let p = Profile::RhoK(k);
            for tau in grid(-k - 1.0, k + 1.0) {
                let v = p.value(tau);
                if tau.abs() >= k {
                    assert_eq!(v, 0.0, "K={k} tau={tau}");
                }
                if tau.abs() <= k - 1.0 {
                    assert_eq!(v, 1.0);
                }
                if (-k..=-k + 1.0).contains(&tau) {
                    assert!(p.derivative(tau) >= 0.0);
                    assert_eq!(v, Profile::RhoPlus.value(tau + k));
                }
                if (k - 1.0..=k).contains(&tau) {
                    assert!(p.derivative(tau) <= 0.0);
                    assert_eq!(v, Profile::RhoMinus.value(tau - k + 1.0));
                }
            }
        }
        for tau in grid(-3.0, 3.0) {
            assert_eq!(Profile::RhoK(0.0).value(tau), 0.0);
            assert_eq!(Profile::RhoK(0.5).value(tau), 0.5 * Profile::RhoK(1.0).value(tau));
        }
    }

    #[test]
    fn derivative_matches_differences() {
        for p in [Profile::RhoPlus, Profile::RhoMinus, Profile::RhoK(2.0), Profile::RhoK(0.7)] {
            for tau in grid(-2.9, 2.9) {
                let h = 1e-6;
                let fd = (p.value(tau + h) - p.value(tau - h)) / (2.0 * h);
                assert!((fd - p.derivative(tau)).abs() < 1e-6, "{p} at {tau}");
            }
        }
    }

    #[test]
    fn parsing() {
        assert_eq!("rho+".parse::<Profile>().unwrap(), Profile::RhoPlus);
        assert_eq!("rhoK=2".parse::<Profile>().unwrap(), Profile::RhoK(2.0));
        assert!("rhoK=-1".parse::<Profile>().is_err());
        assert!("bogus".parse::<Profile>().is_err());
    }
}
