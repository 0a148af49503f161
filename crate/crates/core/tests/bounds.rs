//! Bound formulas against closed forms derived independently of the library.

use mldr_core::bounds::{
    bound_beta, bound_line, feasible, int, level_mbr_point, level_msr_point, mbr_point, msr_point, rational,
    separate_point, t_coeff, MessageProfile, RatePoint, Rational,
};
use proptest::prelude::*;

/// `1 / sum_{i<k} (d - i)` summed as `k(2d - k + 1)/2`.
fn t_closed(d: usize, k: usize) -> Rational {
    rational(2, (k * (2 * d - k + 1)) as i64)
}

fn profile_strategy() -> impl Strategy<Value = Vec<u64>> {
    (1usize..=8).prop_flat_map(|d| proptest::collection::vec(0u64..50, d)).prop_filter("nonempty", |v| v.iter().any(|&b| b > 0))
}

#[test]
fn coefficients_match_closed_form() {
    for d in 1..=16 {
        for k in 1..=d {
            assert_eq!(t_coeff(d, k).unwrap(), t_closed(d, k), "d={d} k={k}");
        }
    }
}

proptest! {
    #[test]
    fn mbr_point_is_the_corner(sizes in profile_strategy()) {
        let p = MessageProfile::from_sizes(&sizes).unwrap();
        let mbr = mbr_point(&p);
        let f = feasible(&mbr, &p);
        prop_assert!(f.feasible);
        prop_assert_eq!(f.beta_slack, int(0));
        prop_assert_eq!(f.line_slack, int(0));
        // moving off the corner in either direction breaks a bound
        let lower_beta = RatePoint::new(mbr.alpha_bar.clone() + int(1), &mbr.beta_bar - rational(1, 1000));
        prop_assert!(!feasible(&lower_beta, &p).feasible);
        let lower_alpha = RatePoint::new(&mbr.alpha_bar - rational(1, 1000), mbr.beta_bar.clone());
        prop_assert!(!feasible(&lower_alpha, &p).feasible);
    }

    #[test]
    fn separate_coding_hits_both_corners(sizes in profile_strategy()) {
        let p = MessageProfile::from_sizes(&sizes).unwrap();
        let d = p.d();
        let per: Vec<_> = (1..=d).map(|k| level_mbr_point(d, k).unwrap()).collect();
        prop_assert_eq!(separate_point(&per, &p).unwrap(), mbr_point(&p));
        let msr: Vec<_> = (1..=d).map(|k| level_msr_point(d, k).unwrap()).collect();
        let msr_sep = separate_point(&msr, &p).unwrap();
        prop_assert_eq!(&msr_sep, &msr_point(&p));
        prop_assert!(feasible(&msr_sep, &p).feasible);
    }

    #[test]
    fn floor_is_the_weighted_closed_form(sizes in profile_strategy()) {
        let p = MessageProfile::from_sizes(&sizes).unwrap();
        let d = p.d();
        let expected: Rational = p.weights().iter().enumerate().map(|(i, b)| t_closed(d, i + 1) * b).sum();
        prop_assert_eq!(bound_beta(&p), expected.clone());
        let set = bound_line(&p);
        prop_assert_eq!(set.line.coeff_beta, int(((d - 1) * d / 2) as i64));
        prop_assert_eq!(set.line.rhs, int((d * (d + 1) / 2) as i64) * expected);
    }
}
