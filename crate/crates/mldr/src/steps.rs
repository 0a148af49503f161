//! Runs every step of the derivation catalog and reports the outcome.

use mldr_core::prover::catalog::{self, check_exact, Outcome};
use mldr_core::prover::{Claim, GroundModel, Justification, ProgramOptions, Reduction, Relation, ShannonUse, Universe};
use serde::Serialize;

use crate::error::Result;
use crate::prove::{prove_on, Status};

#[derive(Clone, Debug, Serialize)]
pub struct StepReport {
    pub name: String,
    pub kind: &'static str,
    pub claim: String,
    pub expected: bool,
    pub verified: bool,
    pub detail: String,
}

impl StepReport {
    pub fn as_expected(&self) -> bool {
        self.expected == self.verified
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub name: String,
    pub lhs: String,
    pub rhs: String,
    pub expect_equal: bool,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogReport {
    pub d: usize,
    pub steps: Vec<StepReport>,
    pub identities: Vec<IdentityReport>,
}

impl CatalogReport {
    pub fn all_as_expected(&self) -> bool {
        self.steps.iter().all(StepReport::as_expected) && self.identities.iter().all(|i| i.holds)
    }
}

fn kind(j: &Justification) -> &'static str {
    match j {
        Justification::Symmetry(_) => "symmetry",
        Justification::Dependency => "dependency",
        Justification::Shannon(_) => "shannon",
        Justification::Combination(from) if from.is_empty() => "expansion",
        Justification::Combination(_) => "combination",
    }
}

/// Options for a Shannon step; structure enters through column quotients.
pub fn shannon_options(uses: &ShannonUse) -> ProgramOptions {
    let pick = |on: bool| if on { Reduction::Quotient } else { Reduction::Off };
    ProgramOptions {
        dependencies: pick(uses.dependencies),
        symmetry: pick(uses.symmetry),
        independence: uses.independence,
        size_bounds: uses.size_bounds,
    }
}

/// Proves a claim on the model grouped by the sets it mentions.
pub fn check_shannon(universe: &Universe, claim: &Claim, uses: &ShannonUse) -> Result<(bool, String)> {
    let difference = claim.difference();
    if difference.is_zero() {
        return Ok((true, String::from("both sides coincide")));
    }
    let sets: Vec<_> = difference.entropy_terms().map(|(s, _)| s).collect();
    let model = GroundModel::auto(universe.clone(), &sets, &uses.refine)?;
    let options = shannon_options(uses);
    let mut directions = vec![difference.clone()];
    if claim.relation == Relation::Equal {
        directions.push(-difference);
    }
    for query in &directions {
        let verdict = prove_on(&model, options, query)?;
        if verdict.status != Status::Proven {
            return Ok((false, format!("not implied on {} groups, lp value {:.3e}", model.group_count(), verdict.lp_value)));
        }
    }
    Ok((true, format!("certified on {} groups", model.group_count())))
}

pub fn run_catalog(d: usize) -> Result<CatalogReport> {
    let cat = catalog::catalog(d)?;
    let group = cat.universe.node_group();
    let mut steps = Vec::with_capacity(cat.steps.len());
    for (i, step) in cat.steps.iter().enumerate() {
        let (verified, detail) = match check_exact(&cat.universe, &cat.steps, i, &group) {
            Outcome::Verified => (true, String::from("exact")),
            Outcome::Rejected(why) => (false, why),
            Outcome::NeedsSolver => match &step.justification {
                Justification::Shannon(uses) => check_shannon(&cat.universe, &step.claim, uses)?,
                _ => unreachable!("only Shannon steps need the solver"),
            },
        };
        let rel = if step.claim.relation == Relation::Equal { "=" } else { ">=" };
        let claim = format!("{} {rel} {}", step.claim.lhs.display(&cat.universe), step.claim.rhs.display(&cat.universe));
        steps.push(StepReport {
            name: step.name.clone(),
            kind: kind(&step.justification),
            claim,
            expected: step.expect_valid,
            verified,
            detail,
        });
    }
    let identities = cat.identities.iter().map(identity_report).collect();
    Ok(CatalogReport { d, steps, identities })
}

pub fn identity_report(id: &catalog::Identity) -> IdentityReport {
    IdentityReport {
        name: id.name.clone(),
        lhs: id.lhs.to_string(),
        rhs: id.rhs.to_string(),
        expect_equal: id.expect_equal,
        holds: id.holds(),
    }
}
