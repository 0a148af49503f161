//! Deciding entropy claims: a float LP proposes, exact arithmetic disposes.

use mldr_core::bounds::{j_sum, t_coeff};
use mldr_core::prover::certificate::{self, Certificate};
use mldr_core::prover::{ConeProgram, Functional, GroundModel, ProgramOptions, Scalar, Universe};
use mldr_core::Rational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::lp::{self, TOLERANCE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    #[serde(rename = "PROVEN")]
    Proven,
    #[serde(rename = "NOT_IMPLIED")]
    NotImplied,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Proven => "PROVEN",
            Status::NotImplied => "NOT_IMPLIED",
        })
    }
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub status: Status,
    /// Minimum of the claim over the normalized cone; exactly 0 when proven.
    pub lp_value: f64,
    /// Present iff proven; already checked exactly.
    pub certificate: Option<Certificate>,
    /// Minimizing point when not implied, one value per column.
    pub witness: Option<Vec<f64>>,
}

/// Decides `query >= 0` on the program's cone.
pub fn prove(program: &ConeProgram, query: &Functional) -> Result<Verdict> {
    let target = program.target(query)?;
    if target.iter().all(Zero::is_zero) {
        let certificate = Certificate::default();
        certificate::verify(program, &target, &certificate)?;
        return Ok(Verdict { status: Status::Proven, lp_value: 0.0, certificate: Some(certificate), witness: None });
    }
    let mut exact_failure = None;
    if let Some(dual) = lp::dual_point(program, &target)? {
        match certificate::reconstruct(program, &target, &dual.rows, &dual.columns, TOLERANCE) {
            Ok(certificate) => {
                return Ok(Verdict { status: Status::Proven, lp_value: 0.0, certificate: Some(certificate), witness: None })
            }
            Err(e) => exact_failure = Some(e),
        }
    }
    let primal = lp::primal_minimum(program, &target)?;
    if primal.value < -TOLERANCE {
        return Ok(Verdict { status: Status::NotImplied, lp_value: primal.value, certificate: None, witness: Some(primal.x) });
    }
    Err(HarnessError::Solver(match exact_failure {
        Some(e) => format!("LP minimum is {:.3e} but the certificate failed exact checking: {e}", primal.value),
        None => format!("LP minimum is {:.3e} yet no certificate exists", primal.value),
    }))
}

pub fn prove_on(model: &GroundModel, options: ProgramOptions, query: &Functional) -> Result<Verdict> {
    let program = ConeProgram::build(model, options)?;
    prove(&program, query)
}

/// `beta - Σ T_{d,k} B_k` and `alpha + J_{d-1} beta - J_d Σ T_{d,k} B_k`.
pub fn theorem_claims(d: usize) -> Result<(Functional, Functional)> {
    let mut weighted = Functional::zero();
    for k in 1..=d {
        weighted = weighted + Functional::scalar(Scalar::Message(k)).scale(&t_coeff(d, k)?);
    }
    let beta = Functional::scalar(Scalar::Beta);
    let bandwidth = beta.clone() - weighted.clone();
    let jd: Rational = j_sum(d as i64)?;
    let jd1 = j_sum(d as i64 - 1)?;
    let storage = Functional::scalar(Scalar::Alpha) + beta.scale(&jd1) - weighted.scale(&jd);
    Ok((bandwidth, storage))
}

/// Both outer bounds for repair degree `d`, proven on the full singleton model.
pub fn theorem_check(d: usize, options: ProgramOptions) -> Result<(Verdict, Verdict)> {
    let model = GroundModel::standard(d)?;
    let program = ConeProgram::build(&model, options)?;
    let (bandwidth, storage) = theorem_claims(d)?;
    Ok((prove(&program, &bandwidth)?, prove(&program, &storage)?))
}

/// Serializable form of a verdict with readable certificate lines.
#[derive(Clone, Debug, Serialize)]
pub struct VerdictReport {
    pub claim: String,
    pub status: Status,
    pub lp_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Vec<String>>,
}

impl VerdictReport {
    pub fn new(program: &ConeProgram, universe: &Universe, query: &Functional, verdict: &Verdict, with_certificate: bool) -> Self {
        VerdictReport {
            claim: format!("{} >= 0", query.display(universe)),
            status: verdict.status,
            lp_value: verdict.lp_value,
            certificate: verdict.certificate.as_ref().filter(|_| with_certificate).map(|c| c.describe(program)),
        }
    }
}
