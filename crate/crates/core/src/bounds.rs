//! Exact-rational calculator for the storage/repair-bandwidth outer bounds
//! and the corner points of the separate-coding region.
//!
//! For `d` messages with normalized sizes `B_1..B_d` (summing to one):
//!
//! ```text
//!   beta_bar                    >= sum_k T_{d,k} B_k
//!   alpha_bar + J_{d-1} beta_bar >= J_d sum_k T_{d,k} B_k
//! ```
//!
//! where `T_{d,k} = 1 / sum_{i=1..k} (d+1-i)` and `J_d = d(d+1)/2`. Nothing in
//! this module touches floating point.

use crate::error::{Error, Result};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub type Rational = num_rational::BigRational;

pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p"`, `"p/q"` or `"-p/q"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: `{s}`"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

/// `T_{d,k} = 1 / sum_{i=1}^{k} (d + 1 - i)`.
pub fn t_coeff(d: usize, k: usize) -> Result<Rational> {
    if k == 0 || k > d {
        return Err(Error::InvalidParams(format!("T_{{d,k}} needs 1 <= k <= d, got d={d}, k={k}")));
    }
    let denom: usize = (1..=k).map(|i| d + 1 - i).sum();
    Ok(rational(1, denom as i64))
}

/// `J_d = 1 + 2 + ... + d`, with `J_0 = 0`.
pub fn j_sum(d: i64) -> Result<Rational> {
    if d < 0 {
        return Err(Error::InvalidParams(format!("J_d needs d >= 0, got {d}")));
    }
    Ok(int(d * (d + 1) / 2))
}

/// Normalized message-size tuple `(B_1, ..., B_d)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MessageProfile {
    weights: Vec<Rational>,
}

impl MessageProfile {
    pub fn new(weights: Vec<Rational>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidParams("profile needs d >= 1 weights".into()));
        }
        if weights.iter().any(Signed::is_negative) {
            return Err(Error::InvalidParams("profile weights must be nonnegative".into()));
        }
        let total: Rational = weights.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidParams(format!("profile weights sum to {total}, not 1")));
        }
        Ok(MessageProfile { weights })
    }

    /// Normalizes raw message sizes.
    pub fn from_sizes(sizes: &[u64]) -> Result<Self> {
        let total: u64 = sizes.iter().sum();
        if total == 0 {
            return Err(Error::EmptySystem);
        }
        let total = BigInt::from(total);
        Self::new(
            sizes
                .iter()
                .map(|&b| Rational::new(BigInt::from(b), total.clone()))
                .collect(),
        )
    }

    pub fn d(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }
}

/// Normalized `(alpha_bar, beta_bar)` pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatePoint {
    pub alpha_bar: Rational,
    pub beta_bar: Rational,
}

impl RatePoint {
    pub fn new(alpha_bar: Rational, beta_bar: Rational) -> Self {
        RatePoint { alpha_bar, beta_bar }
    }
}

impl fmt::Display for RatePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.alpha_bar, self.beta_bar)
    }
}

/// `coeff_alpha * alpha_bar + coeff_beta * beta_bar >= rhs`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundLine {
    pub coeff_alpha: Rational,
    pub coeff_beta: Rational,
    pub rhs: Rational,
}

impl BoundLine {
    pub fn lhs(&self, p: &RatePoint) -> Rational {
        &self.coeff_alpha * &p.alpha_bar + &self.coeff_beta * &p.beta_bar
    }
}

impl fmt::Display for BoundLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = if self.coeff_alpha.is_one() { String::new() } else { format!("{}", self.coeff_alpha) };
        write!(f, "{a}ᾱ + {}β̄ ≥ {}", self.coeff_beta, self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundSet {
    /// Right-hand side of the repair-bandwidth floor.
    pub beta_floor: Rational,
    pub line: BoundLine,
}

/// Per-bound slack of a candidate point; negative slack means violation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Feasibility {
    pub feasible: bool,
    pub beta_slack: Rational,
    pub line_slack: Rational,
}

fn weighted_t(profile: &MessageProfile) -> Rational {
    let d = profile.d();
    profile
        .weights
        .iter()
        .enumerate()
        .map(|(i, b)| t_coeff(d, i + 1).expect("k in range") * b)
        .sum()
}

/// `sum_k T_{d,k} B_k`.
pub fn bound_beta(profile: &MessageProfile) -> Rational {
    weighted_t(profile)
}

pub fn bound_line(profile: &MessageProfile) -> BoundSet {
    let d = profile.d() as i64;
    let floor = weighted_t(profile);
    let line = BoundLine {
        coeff_alpha: Rational::one(),
        coeff_beta: j_sum(d - 1).expect("d >= 1"),
        rhs: j_sum(d).expect("d >= 1") * &floor,
    };
    BoundSet { beta_floor: floor, line }
}

/// Intersection of the two bounds taken with equality.
pub fn mbr_point(profile: &MessageProfile) -> RatePoint {
    let b = weighted_t(profile);
    RatePoint {
        alpha_bar: int(profile.d() as i64) * &b,
        beta_bar: b,
    }
}

/// Weighted sum of the per-level MSR points `(1/k, 1/(k(d-k+1)))`.
pub fn msr_point(profile: &MessageProfile) -> RatePoint {
    let d = profile.d() as i64;
    let mut alpha = Rational::zero();
    let mut beta = Rational::zero();
    for (i, b) in profile.weights.iter().enumerate() {
        let k = i as i64 + 1;
        alpha += rational(1, k) * b;
        beta += rational(1, k * (d - k + 1)) * b;
    }
    RatePoint::new(alpha, beta)
}

/// Per-level MBR point `(d T_{d,k}, T_{d,k})`.
pub fn level_mbr_point(d: usize, k: usize) -> Result<RatePoint> {
    let t = t_coeff(d, k)?;
    Ok(RatePoint::new(int(d as i64) * &t, t))
}

/// Per-level MSR point `(1/k, 1/(k(d-k+1)))`.
pub fn level_msr_point(d: usize, k: usize) -> Result<RatePoint> {
    if k == 0 || k > d {
        return Err(Error::InvalidParams(format!("level {k} out of range for d={d}")));
    }
    let (d, k) = (d as i64, k as i64);
    Ok(RatePoint::new(rational(1, k), rational(1, k * (d - k + 1))))
}

/// Operating point of separate coding: `(sum alpha_k B_k, sum beta_k B_k)`.
pub fn separate_point(per_level: &[RatePoint], profile: &MessageProfile) -> Result<RatePoint> {
    if per_level.len() != profile.d() {
        return Err(Error::SizeMismatch {
            expected: profile.d(),
            got: per_level.len(),
        });
    }
    let mut alpha = Rational::zero();
    let mut beta = Rational::zero();
    for (p, b) in per_level.iter().zip(&profile.weights) {
        alpha += &p.alpha_bar * b;
        beta += &p.beta_bar * b;
    }
    Ok(RatePoint::new(alpha, beta))
}

pub fn feasible(point: &RatePoint, profile: &MessageProfile) -> Feasibility {
    let set = bound_line(profile);
    let beta_slack = &point.beta_bar - &set.beta_floor;
    let line_slack = set.line.lhs(point) - &set.line.rhs;
    Feasibility {
        feasible: !beta_slack.is_negative() && !line_slack.is_negative(),
        beta_slack,
        line_slack,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fig1() -> MessageProfile {
        MessageProfile::new(vec![int(0), rational(1, 3), rational(2, 3)]).unwrap()
    }

    fn random_profile(rng: &mut ChaCha8Rng, d: usize) -> MessageProfile {
        loop {
            let sizes: Vec<u64> = (0..d).map(|_| rng.gen_range(0..50)).collect();
            if let Ok(p) = MessageProfile::from_sizes(&sizes) {
                return p;
            }
        }
    }

    #[test]
    fn t_and_j_examples() {
        for d in 1..=10 {
            assert_eq!(t_coeff(d, 1).unwrap(), rational(1, d as i64));
        }
        assert_eq!(t_coeff(3, 2).unwrap(), rational(1, 5));
        assert_eq!(t_coeff(3, 3).unwrap(), rational(1, 6));
        assert_eq!(t_coeff(1, 1).unwrap(), int(1));
        assert!(t_coeff(3, 0).is_err() && t_coeff(3, 4).is_err());
        assert_eq!(j_sum(0).unwrap(), int(0));
        assert_eq!(j_sum(2).unwrap(), int(3));
        assert_eq!(j_sum(3).unwrap(), int(6));
        assert!(j_sum(-1).is_err());
    }

    #[test]
    fn t_reciprocal_is_block_size_and_decreasing() {
        for d in 1..=20usize {
            for k in 1..=d {
                let t = t_coeff(d, k).unwrap();
                let inv = t.recip();
                assert!(inv.is_integer());
                assert_eq!(inv, int((k * d - k * (k - 1) / 2) as i64));
                if k > 1 {
                    assert!(t < t_coeff(d, k - 1).unwrap());
                }
            }
        }
    }

    #[test]
    fn figure_one_corner_points() {
        let p = fig1();
        assert_eq!(bound_beta(&p), rational(8, 45));
        let set = bound_line(&p);
        assert_eq!(set.line.coeff_beta, int(3));
        assert_eq!(set.line.rhs, rational(16, 15));
        assert_eq!(mbr_point(&p), RatePoint::new(rational(8, 15), rational(8, 45)));
        assert_eq!(msr_point(&p), RatePoint::new(rational(7, 18), rational(11, 36)));
        let f = feasible(&mbr_point(&p), &p);
        assert!(f.feasible && f.beta_slack.is_zero() && f.line_slack.is_zero());
    }

    #[test]
    fn single_level_profile() {
        let p = MessageProfile::new(vec![int(1)]).unwrap();
        assert_eq!(bound_beta(&p), int(1));
        let set = bound_line(&p);
        assert_eq!((set.line.coeff_beta.clone(), set.line.rhs.clone()), (int(0), int(1)));
        assert_eq!(mbr_point(&p), RatePoint::new(int(1), int(1)));
        assert_eq!(msr_point(&p), RatePoint::new(int(1), int(1)));
    }

    #[test]
    fn perturbed_point_violates_floor() {
        let p = fig1();
        let pt = RatePoint::new(rational(8, 15), rational(8, 45) - rational(1, 1000));
        let f = feasible(&pt, &p);
        assert!(!f.feasible);
        assert!(f.beta_slack.is_negative());
        let generous = feasible(&RatePoint::new(int(1), int(1)), &p);
        assert!(generous.feasible);
    }

    #[test]
    fn profile_validation() {
        assert!(MessageProfile::new(vec![rational(1, 2)]).is_err());
        assert!(MessageProfile::new(vec![rational(3, 2), rational(-1, 2)]).is_err());
        assert!(MessageProfile::new(vec![]).is_err());
        assert_eq!(MessageProfile::from_sizes(&[0, 0]), Err(Error::EmptySystem));
        assert_eq!(MessageProfile::from_sizes(&[0, 15, 30]).unwrap(), fig1());
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("8/45").unwrap(), rational(8, 45));
        assert_eq!(parse_rational(" -2/4 ").unwrap(), rational(-1, 2));
        assert_eq!(parse_rational("3").unwrap(), int(3));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(format!("{}", rational(16, 15)), "16/15");
    }

    #[test]
    fn random_profiles_line_structure_and_corner_ordering() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let d = rng.gen_range(1..=8);
            let p = random_profile(&mut rng, d);
            // definitional oracle for the floor
            let mut brute = Rational::zero();
            for k in 1..=d {
                let denom: usize = (1..=k).map(|i| d + 1 - i).sum();
                brute += &p.weights()[k - 1] / int(denom as i64);
            }
            assert_eq!(bound_beta(&p), brute);
            let set = bound_line(&p);
            assert_eq!(set.line.rhs, j_sum(d as i64).unwrap() * bound_beta(&p));
            assert_eq!(set.beta_floor, &set.line.rhs / j_sum(d as i64).unwrap());
            let mbr = mbr_point(&p);
            let msr = msr_point(&p);
            assert_eq!(mbr.alpha_bar, int(d as i64) * &mbr.beta_bar);
            assert!(msr.alpha_bar <= mbr.alpha_bar);
            assert!(msr.beta_bar >= mbr.beta_bar);
            let per_msr: Vec<RatePoint> = (1..=d).map(|k| level_msr_point(d, k).unwrap()).collect();
            assert_eq!(separate_point(&per_msr, &p).unwrap(), msr);
        }
    }

    #[test]
    fn separate_point_examples() {
        let p = fig1();
        let per: Vec<RatePoint> = (1..=3).map(|k| level_mbr_point(3, k).unwrap()).collect();
        assert_eq!(per[1], RatePoint::new(rational(3, 5), rational(1, 5)));
        assert_eq!(per[2], RatePoint::new(rational(1, 2), rational(1, 6)));
        assert_eq!(separate_point(&per, &p).unwrap(), RatePoint::new(rational(8, 15), rational(8, 45)));
        let only2 = MessageProfile::new(vec![int(0), int(1), int(0)]).unwrap();
        assert_eq!(separate_point(&per, &only2).unwrap(), per[1]);
        assert_eq!(
            separate_point(&per[..2], &p),
            Err(Error::SizeMismatch { expected: 3, got: 2 })
        );
    }
}
