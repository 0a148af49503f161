//! JSON proof scripts.
//!
//! ```json
//! {
//!   "name": "example",
//!   "model": { "kind": "standard", "d": 2 },
//!   "options": "fast",
//!   "composites": { "into_1": ["S_2_1", "S_3_1"] },
//!   "queries": [{ "name": "q", "claim": "H(into_1) >= H(S_2_1)", "expect": "PROVEN" }]
//! }
//! ```
//!
//! Model kinds are `standard` (`d`), `free` (`variables`) and `grouped`
//! (`d` or `variables`, plus `groups` mapping a group name to member names).
//! Options are `fast`, `reference`, `shannon`, or an object with
//! `dependencies` and `symmetry` in `off|equalities|quotient` and boolean
//! `independence` and `size_bounds`.

use std::collections::BTreeMap;
use std::path::Path;

use mldr_core::prover::{parse_claim_with, ConeProgram, GroundModel, ProgramOptions, Reduction, Universe, VarSet};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::prove::{prove, Status, VerdictReport};

pub const SHIPPED: [(&str, &str); 2] = [
    ("theorem_d2", include_str!("../scripts/theorem_d2.json")),
    ("zhang_yeung", include_str!("../scripts/zhang_yeung.json")),
];

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub kind: String,
    #[serde(default)]
    pub d: Option<usize>,
    #[serde(default)]
    pub variables: Option<Vec<String>>,
    #[serde(default)]
    pub groups: Option<BTreeMap<String, Vec<String>>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionSpec {
    #[serde(default = "off")]
    pub dependencies: String,
    #[serde(default = "off")]
    pub symmetry: String,
    #[serde(default)]
    pub independence: bool,
    #[serde(default)]
    pub size_bounds: bool,
}

fn off() -> String {
    "off".into()
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum OptionsField {
    Preset(String),
    Custom(OptionSpec),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuerySpec {
    pub name: String,
    pub claim: String,
    pub expect: Status,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Script {
    pub name: String,
    pub model: ModelSpec,
    pub options: OptionsField,
    #[serde(default)]
    pub composites: BTreeMap<String, Vec<String>>,
    pub queries: Vec<QuerySpec>,
}

#[derive(Clone, Debug, Serialize)]
pub struct QueryReport {
    pub name: String,
    pub expect: Status,
    #[serde(flatten)]
    pub verdict: VerdictReport,
    pub as_expected: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScriptReport {
    pub name: String,
    pub columns: usize,
    pub rows: usize,
    pub queries: Vec<QueryReport>,
}

impl ScriptReport {
    /// True when some query expected to be proven was not.
    pub fn failed(&self) -> bool {
        self.queries.iter().any(|q| q.expect == Status::Proven && q.verdict.status != Status::Proven)
    }
}

fn format_err(msg: impl Into<String>) -> HarnessError {
    HarnessError::Format(msg.into())
}

impl Script {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| format_err(format!("script: {e}")))
    }

    /// A shipped script name, or a path to a script file.
    pub fn load(name_or_path: &str) -> Result<Self> {
        if let Some((_, text)) = SHIPPED.iter().find(|(n, _)| *n == name_or_path) {
            return Self::from_json(text);
        }
        let path = Path::new(name_or_path);
        if !path.exists() {
            return Err(HarnessError::Usage(format!("no shipped script or file named `{name_or_path}`")));
        }
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    fn universe(&self) -> Result<Universe> {
        let m = &self.model;
        match (m.d, &m.variables) {
            (Some(d), None) => Ok(Universe::standard(d)?),
            (None, Some(vars)) => Ok(Universe::free(vars)?),
            _ => Err(format_err("model needs exactly one of `d` and `variables`")),
        }
    }

    fn options(&self) -> Result<ProgramOptions> {
        let reduction = |s: &str| match s {
            "off" => Ok(Reduction::Off),
            "equalities" => Ok(Reduction::Equalities),
            "quotient" => Ok(Reduction::Quotient),
            other => Err(format_err(format!("unknown reduction `{other}`"))),
        };
        match &self.options {
            OptionsField::Preset(p) => match p.as_str() {
                "fast" => Ok(ProgramOptions::fast()),
                "reference" => Ok(ProgramOptions::reference()),
                "shannon" => Ok(ProgramOptions::shannon()),
                other => Err(format_err(format!("unknown option preset `{other}`"))),
            },
            OptionsField::Custom(o) => Ok(ProgramOptions {
                dependencies: reduction(&o.dependencies)?,
                symmetry: reduction(&o.symmetry)?,
                independence: o.independence,
                size_bounds: o.size_bounds,
            }),
        }
    }

    fn resolve_members(universe: &Universe, names: &[String], what: &str) -> Result<VarSet> {
        if names.is_empty() {
            return Err(format_err(format!("{what} is empty")));
        }
        names.iter().try_fold(VarSet::EMPTY, |acc, n| {
            universe.resolve(n).map(|s| acc | s).map_err(|_| format_err(format!("{what} names unknown variable `{n}`")))
        })
    }

    fn model(&self, universe: Universe) -> Result<GroundModel> {
        let grouped = |groups: &BTreeMap<String, Vec<String>>| -> Result<GroundModel> {
            let named = groups
                .iter()
                .map(|(g, names)| Ok((g.clone(), Self::resolve_members(&universe, names, &format!("group `{g}`"))?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(GroundModel::grouped(universe.clone(), named)?)
        };
        match (self.model.kind.as_str(), &self.model.groups) {
            ("standard", None) if universe.is_standard() => Ok(GroundModel::standard(universe.d())?),
            ("free", None) if !universe.is_standard() => {
                let names: Vec<&str> = (0..universe.len()).map(|i| universe.name(i)).collect();
                Ok(GroundModel::free(&names)?)
            }
            ("grouped", Some(groups)) => grouped(groups),
            (kind, _) => Err(format_err(format!("model kind `{kind}` does not match its fields"))),
        }
    }

    pub fn run(&self, with_certificates: bool) -> Result<ScriptReport> {
        let universe = self.universe()?;
        let mut composites = BTreeMap::new();
        for (name, members) in &self.composites {
            if universe.resolve(name).is_ok() {
                return Err(format_err(format!("composite `{name}` shadows a variable")));
            }
            composites.insert(name.clone(), Self::resolve_members(&universe, members, &format!("composite `{name}`"))?);
        }
        let model = self.model(universe.clone())?;
        let program = ConeProgram::build(&model, self.options()?)?;
        let resolve = |name: &str| match composites.get(name) {
            Some(&set) => Ok(set),
            None => universe.resolve(name),
        };
        let mut queries = Vec::with_capacity(self.queries.len());
        for q in &self.queries {
            let functional = parse_claim_with(&resolve, universe.is_standard(), &q.claim)
                .map_err(|e| format_err(format!("query `{}`: {e}", q.name)))?;
            let verdict = prove(&program, &functional)?;
            let report = VerdictReport::new(&program, &universe, &functional, &verdict, with_certificates);
            queries.push(QueryReport {
                name: q.name.clone(),
                expect: q.expect,
                as_expected: verdict.status == q.expect,
                verdict: report,
            });
        }
        Ok(ScriptReport {
            name: self.name.clone(),
            columns: program.columns().len(),
            rows: program.rows().len(),
            queries,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_scripts_parse() {
        for (name, _) in SHIPPED {
            assert_eq!(Script::load(name).unwrap().name, name);
        }
    }

    #[test]
    fn unknown_composite_member_is_a_format_error() {
        let text = r#"{"name":"x","model":{"kind":"standard","d":1},"options":"fast",
            "composites":{"c":["W_9"]},"queries":[]}"#;
        assert!(matches!(Script::from_json(text).unwrap().run(false), Err(HarnessError::Format(_))));
    }

    #[test]
    fn unknown_name_in_claim_is_a_format_error() {
        let text = r#"{"name":"x","model":{"kind":"standard","d":1},"options":"fast",
            "queries":[{"name":"q","claim":"H(mystery) >= 0","expect":"PROVEN"}]}"#;
        assert!(matches!(Script::from_json(text).unwrap().run(false), Err(HarnessError::Format(_))));
    }

    #[test]
    fn grouped_models_and_custom_options() {
        let text = r#"{"name":"g","model":{"kind":"grouped","variables":["A","B","C"],
            "groups":{"a":["A"],"bc":["B","C"]}},
            "options":{"dependencies":"off","symmetry":"off"},
            "queries":[{"name":"q","claim":"H(A) + H(B,C) >= H(A,B,C)","expect":"PROVEN"},
                       {"name":"r","claim":"H(A) >= H(B,C)","expect":"NOT_IMPLIED"}]}"#;
        let report = Script::from_json(text).unwrap().run(true).unwrap();
        assert!(report.queries.iter().all(|q| q.as_expected));
        assert!(!report.failed());
    }
}
