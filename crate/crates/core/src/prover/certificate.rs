//! Exact certificates for cone-program inequalities.
//!
//! A certificate for `target · x >= 0` is a list of row multipliers `y` and
//! column multipliers `s` with
//! `Σ y_r row_r + Σ s_c e_c = target`, `y_r >= 0` on inequality rows and
//! `s_c >= 0`. Since every column is nonnegative, the identity proves the
//! claim on every point of the cone.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::model::ConeProgram;
use crate::bounds::Rational;
use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Certificate {
    /// `(row index, multiplier)`.
    pub rows: Vec<(usize, Rational)>,
    /// `(column, multiplier)` for column nonnegativity.
    pub columns: Vec<(u32, Rational)>,
}

impl Certificate {
    pub fn len(&self) -> usize {
        self.rows.len() + self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// One line per multiplier, `coeff * (row)`.
    pub fn describe(&self, program: &ConeProgram) -> Vec<String> {
        let mut lines = Vec::with_capacity(self.len());
        for (r, y) in &self.rows {
            lines.push(format!("{y} * [{}]", program.describe_row(&program.rows()[*r])));
        }
        for (c, s) in &self.columns {
            let name = match program.columns()[*c as usize] {
                super::model::Column::Entropy(set) => format!("H({})", program.model().universe().describe(set)),
                super::model::Column::Scalar(sc) => super::expr::scalar_name(sc),
            };
            lines.push(format!("{s} * [{name} >= 0]"));
        }
        lines
    }
}

/// Checks the certificate identity exactly.
pub fn verify(program: &ConeProgram, target: &[Rational], cert: &Certificate) -> Result<()> {
    let invalid = |msg: String| Err(Error::CertificateInvalid(msg));
    let cols = program.columns().len();
    if target.len() != cols {
        return invalid(format!("target has {} entries for {cols} columns", target.len()));
    }
    let mut sum = alloc::vec![Rational::zero(); cols];
    for (r, y) in &cert.rows {
        let Some(row) = program.rows().get(*r) else {
            return invalid(format!("row {r} out of range"));
        };
        if !row.equality && y.is_negative() {
            return invalid(format!("negative multiplier on inequality row {r}"));
        }
        for &(c, v) in &row.coeffs {
            sum[c as usize] += y * Rational::from_integer(BigInt::from(v));
        }
    }
    for (c, s) in &cert.columns {
        if *c as usize >= cols {
            return invalid(format!("column {c} out of range"));
        }
        if s.is_negative() {
            return invalid(format!("negative multiplier on column {c}"));
        }
        sum[*c as usize] += s;
    }
    match sum.iter().zip(target).position(|(a, b)| a != b) {
        Some(c) => invalid(format!("identity fails at column {c}: {} != {}", sum[c], target[c])),
        None => Ok(()),
    }
}

/// Largest integer not above `x`, for `|x| < 2^62`.
fn floor(x: f64) -> f64 {
    let t = x as i64 as f64;
    if t > x {
        t - 1.0
    } else {
        t
    }
}

/// Best rational approximation of `x` with denominator at most `max_den`.
pub fn approximate(x: f64, max_den: i64) -> Rational {
    let negative = x < 0.0;
    let mut v = if negative { -x } else { x };
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    for _ in 0..64 {
        let a = floor(v);
        let (p2, q2) = (a as i128 * p1 + p0, a as i128 * q1 + q0);
        if q2 > max_den as i128 {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = v - a;
        if frac < 1e-12 {
            break;
        }
        v = 1.0 / frac;
    }
    if q1 == 0 {
        return Rational::zero();
    }
    let r = Rational::new(BigInt::from(p1), BigInt::from(q1));
    if negative {
        -r
    } else {
        r
    }
}

const DENOMINATORS: [i64; 4] = [360, 5040, 100_000, 10_000_000];

/// Turns approximate dual values into an exact certificate.
///
/// First rounds the row multipliers and lets the column multipliers absorb
/// the residual; failing that, solves exactly on the numerical support.
pub fn reconstruct(
    program: &ConeProgram,
    target: &[Rational],
    row_values: &[f64],
    column_values: &[f64],
    tolerance: f64,
) -> Result<Certificate> {
    for max_den in DENOMINATORS {
        if let Some(cert) = round_rows(program, target, row_values, tolerance, max_den) {
            if verify(program, target, &cert).is_ok() {
                return Ok(cert);
            }
        }
    }
    let cert = solve_on_support(program, target, row_values, column_values, tolerance)?;
    verify(program, target, &cert)?;
    Ok(cert)
}

fn round_rows(
    program: &ConeProgram,
    target: &[Rational],
    row_values: &[f64],
    tolerance: f64,
    max_den: i64,
) -> Option<Certificate> {
    let mut residual: Vec<Rational> = target.to_vec();
    let mut rows = Vec::new();
    for (r, &v) in row_values.iter().enumerate() {
        if v.abs() <= tolerance {
            continue;
        }
        let y = approximate(v, max_den);
        if y.is_zero() {
            continue;
        }
        for &(c, a) in &program.rows()[r].coeffs {
            residual[c as usize] -= &y * Rational::from_integer(BigInt::from(a));
        }
        rows.push((r, y));
    }
    let mut columns = Vec::new();
    for (c, s) in residual.into_iter().enumerate() {
        if s.is_negative() {
            return None;
        }
        if !s.is_zero() {
            columns.push((c as u32, s));
        }
    }
    Some(Certificate { rows, columns })
}

#[derive(Clone, Copy)]
enum Unknown {
    Row(usize),
    Column(u32),
}

fn solve_on_support(
    program: &ConeProgram,
    target: &[Rational],
    row_values: &[f64],
    column_values: &[f64],
    tolerance: f64,
) -> Result<Certificate> {
    let mut unknowns = Vec::new();
    let mut equations: Vec<BTreeMap<usize, Rational>> = alloc::vec![BTreeMap::new(); target.len()];
    for (r, &v) in row_values.iter().enumerate() {
        if v.abs() > tolerance {
            let u = unknowns.len();
            unknowns.push(Unknown::Row(r));
            for &(c, a) in &program.rows()[r].coeffs {
                equations[c as usize].insert(u, Rational::from_integer(BigInt::from(a)));
            }
        }
    }
    for (c, &v) in column_values.iter().enumerate() {
        if v > tolerance {
            let u = unknowns.len();
            unknowns.push(Unknown::Column(c as u32));
            equations[c].insert(u, Rational::from_integer(1.into()));
        }
    }
    let system: Vec<(BTreeMap<usize, Rational>, Rational)> = equations.into_iter().zip(target.iter().cloned()).collect();
    let values = solve_sparse(system, unknowns.len())
        .ok_or_else(|| Error::CertificateInvalid("support system is inconsistent".into()))?;
    let mut cert = Certificate::default();
    for (u, value) in values.into_iter().enumerate() {
        if value.is_zero() {
            continue;
        }
        match unknowns[u] {
            Unknown::Row(r) => cert.rows.push((r, value)),
            Unknown::Column(c) => cert.columns.push((c, value)),
        }
    }
    Ok(cert)
}

/// Solves a sparse linear system exactly, setting free unknowns to zero.
/// Returns `None` when the system is inconsistent.
pub fn solve_sparse(system: Vec<(BTreeMap<usize, Rational>, Rational)>, unknowns: usize) -> Option<Vec<Rational>> {
    let mut pivots: Vec<(usize, BTreeMap<usize, Rational>, Rational)> = Vec::new();
    for (mut eq, mut rhs) in system {
        for (var, row, row_rhs) in &pivots {
            let Some(factor) = eq.get(var).cloned() else { continue };
            for (v, a) in row {
                let slot = eq.entry(*v).or_insert_with(Rational::zero);
                *slot -= &factor * a;
                if slot.is_zero() {
                    eq.remove(v);
                }
            }
            rhs -= &factor * row_rhs;
        }
        let Some((&var, lead)) = eq.iter().next() else {
            if rhs.is_zero() {
                continue;
            }
            return None;
        };
        let lead = lead.clone();
        for a in eq.values_mut() {
            *a /= &lead;
        }
        rhs /= &lead;
        pivots.push((var, eq, rhs));
    }
    let mut values = alloc::vec![Rational::zero(); unknowns];
    for (var, row, rhs) in pivots.iter().rev() {
        let mut v = rhs.clone();
        for (other, a) in row {
            if other != var {
                v -= a * &values[*other];
            }
        }
        values[*var] = v;
    }
    Some(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::rational;

    #[test]
    fn approximation_recovers_small_fractions() {
        for (n, d) in [(1, 3), (-2, 7), (22, 45), (0, 1), (5, 1), (1, 360)] {
            let x = n as f64 / d as f64 + 1e-11;
            assert_eq!(approximate(x, 1000), rational(n, d), "{n}/{d}");
        }
        assert_eq!(approximate(core::f64::consts::PI, 10), rational(22, 7));
    }

    #[test]
    fn sparse_solver_matches_dense_solution() {
        // x + y = 3, x - y = 1, 2x = 4 (redundant)
        let eq = |terms: &[(usize, i64)], rhs: i64| {
            (terms.iter().map(|&(v, a)| (v, rational(a, 1))).collect::<BTreeMap<_, _>>(), rational(rhs, 1))
        };
        let system = alloc::vec![eq(&[(0, 1), (1, 1)], 3), eq(&[(0, 1), (1, -1)], 1), eq(&[(0, 2)], 4)];
        assert_eq!(solve_sparse(system, 2), Some(alloc::vec![rational(2, 1), rational(1, 1)]));
        let bad = alloc::vec![eq(&[(0, 1)], 1), eq(&[(0, 1)], 2)];
        assert_eq!(solve_sparse(bad, 1), None);
    }
}
