//! Bound reports and plotting sweeps. Rationals are rendered as `p/q`.

use std::fmt::Write as _;

use mldr_core::bounds::{bound_line, feasible, int, j_sum, mbr_point, msr_point, MessageProfile, RatePoint, Rational};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PointJson {
    pub alpha_bar: String,
    pub beta_bar: String,
}

impl From<&RatePoint> for PointJson {
    fn from(p: &RatePoint) -> Self {
        PointJson { alpha_bar: p.alpha_bar.to_string(), beta_bar: p.beta_bar.to_string() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LineJson {
    pub coeff_alpha: String,
    pub coeff_beta: String,
    pub rhs: String,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PointCheck {
    pub point: PointJson,
    pub feasible: bool,
    pub beta_slack: String,
    pub line_slack: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundsReport {
    pub d: usize,
    pub profile: Vec<String>,
    pub beta_floor: String,
    pub line: LineJson,
    pub mbr: PointJson,
    pub msr: PointJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub check: Option<PointCheck>,
}

pub fn bounds_report(profile: &MessageProfile, point: Option<&RatePoint>) -> BoundsReport {
    let set = bound_line(profile);
    let check = point.map(|p| {
        let f = feasible(p, profile);
        PointCheck {
            point: p.into(),
            feasible: f.feasible,
            beta_slack: f.beta_slack.to_string(),
            line_slack: f.line_slack.to_string(),
        }
    });
    BoundsReport {
        d: profile.d(),
        profile: profile.weights().iter().map(ToString::to_string).collect(),
        beta_floor: set.beta_floor.to_string(),
        line: LineJson {
            coeff_alpha: set.line.coeff_alpha.to_string(),
            coeff_beta: set.line.coeff_beta.to_string(),
            rhs: set.line.rhs.to_string(),
            text: set.line.to_string(),
        },
        mbr: (&mbr_point(profile)).into(),
        msr: (&msr_point(profile)).into(),
        check,
    }
}

pub fn render_text(report: &BoundsReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "d = {}, profile = ({})", report.d, report.profile.join(", "));
    let _ = writeln!(out, "bandwidth floor: β̄ ≥ {}", report.beta_floor);
    let _ = writeln!(out, "storage line:    {}", report.line.text);
    let _ = writeln!(out, "MBR point:       ({}, {})", report.mbr.alpha_bar, report.mbr.beta_bar);
    let _ = writeln!(out, "MSR point:       ({}, {})", report.msr.alpha_bar, report.msr.beta_bar);
    if let Some(c) = &report.check {
        let verdict = if c.feasible { "feasible" } else { "infeasible" };
        let _ = writeln!(
            out,
            "point ({}, {}): {verdict} (floor slack {}, line slack {})",
            c.point.alpha_bar, c.point.beta_bar, c.beta_slack, c.line_slack
        );
    }
    out
}

/// `beta_bar,alpha_bar_line,beta_floor` rows for `beta_bar` running from the
/// floor to twice the floor in `steps` equal increments. `alpha_bar_line` is
/// the smallest storage the line allows at that bandwidth.
pub fn sweep_csv(profile: &MessageProfile, steps: usize) -> String {
    let set = bound_line(profile);
    let steps = steps.max(1);
    let mut out = String::from("beta_bar,alpha_bar_line,beta_floor\n");
    let slope = j_sum(profile.d() as i64 - 1).expect("d >= 1");
    for i in 0..=steps {
        let beta: Rational = &set.beta_floor * (int(1) + int(i as i64) / int(steps as i64));
        let alpha = &set.line.rhs - &slope * &beta;
        let _ = writeln!(out, "{beta},{alpha},{}", set.beta_floor);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use mldr_core::bounds::{parse_rational, rational};

    fn three_level_profile() -> MessageProfile {
        MessageProfile::new(vec![rational(0, 1), rational(1, 3), rational(2, 3)]).unwrap()
    }

    #[test]
    fn report_fields() {
        let r = bounds_report(&three_level_profile(), Some(&RatePoint::new(rational(8, 15), rational(8, 45))));
        assert_eq!(r.beta_floor, "8/45");
        assert_eq!(r.line.text, "ᾱ + 3β̄ ≥ 16/15");
        assert_eq!((r.mbr.alpha_bar.as_str(), r.msr.beta_bar.as_str()), ("8/15", "11/36"));
        let c = r.check.as_ref().unwrap();
        assert!(c.feasible);
        assert_eq!((c.beta_slack.as_str(), c.line_slack.as_str()), ("0", "0"));
        assert!(render_text(&r).contains("feasible"));
    }

    #[test]
    fn sweep_rows_lie_on_the_line() {
        let csv = sweep_csv(&three_level_profile(), 8);
        let rows: Vec<&str> = csv.lines().skip(1).collect();
        assert_eq!(rows.len(), 9);
        for row in rows {
            let f: Vec<Rational> = row.split(',').map(|s| parse_rational(s).unwrap()).collect();
            assert_eq!(&f[0] * int(3) + &f[1], rational(16, 15));
            assert!(f[0] >= f[2]);
        }
    }
}
