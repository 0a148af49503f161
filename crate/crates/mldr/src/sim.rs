//! Seeded failure and repair simulation with reconstruction audits.

use mldr_core::bounds::{feasible, RatePoint};
use mldr_core::mldr::{MldrSystem, SystemShare};
use mldr_core::Fe;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::SystemConfigFile;
use crate::error::{HarnessError, Result};
use crate::report::PointJson;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RepairEvent {
    pub round: usize,
    pub target: usize,
    pub helpers: Vec<usize>,
    pub symbols_per_helper: Vec<usize>,
    pub total_symbols: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Audit {
    pub round: usize,
    pub level: usize,
    pub nodes: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimReport {
    pub n: usize,
    pub d: usize,
    pub q: u32,
    pub sizes: Vec<usize>,
    pub seed: u64,
    pub rounds: usize,
    pub alpha_total: usize,
    pub beta_total: usize,
    pub events: Vec<RepairEvent>,
    pub audits: Vec<Audit>,
    /// Measured storage and per-helper traffic over the padded total size.
    pub empirical: PointJson,
    pub empirical_unpadded: PointJson,
    pub feasible: bool,
    pub beta_slack: String,
    pub line_slack: String,
}

fn random_messages(system: &MldrSystem, rng: &mut ChaCha8Rng) -> Vec<Vec<Fe>> {
    let q = system.config().field.modulus();
    system
        .layouts()
        .iter()
        .map(|l| (0..l.size()).map(|_| Fe(rng.gen_range(0..q))).collect())
        .collect()
}

fn ratio(num: usize, den: usize) -> mldr_core::Rational {
    mldr_core::bounds::rational(num as i64, den as i64)
}

/// Every round fails one uniformly random node, repairs it from `d` random
/// survivors, and checks that the rebuilt share equals the lost one. After
/// each repair, every nonempty level `k` is decoded from a random `k`-subset.
pub fn simulate(config: &SystemConfigFile, rounds: usize, seed: u64) -> Result<SimReport> {
    if rounds == 0 {
        return Err(HarnessError::Usage("simulation needs at least one round".into()));
    }
    let system = config.system()?;
    let (n, d) = (config.n, config.d);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let messages = random_messages(&system, &mut rng);
    let original: Vec<SystemShare> = system.encode(&messages)?;
    let mut shares = original.clone();
    let mut events = Vec::with_capacity(rounds);
    let mut audits = Vec::new();
    let (mut stored_max, mut sent_max) = (0usize, 0usize);

    for round in 1..=rounds {
        let target = rng.gen_range(1..=n);
        let survivors: Vec<usize> = (1..=n).filter(|&v| v != target).collect();
        let mut helpers: Vec<usize> = sample(&mut rng, survivors.len(), d).into_iter().map(|i| survivors[i]).collect();
        helpers.sort_unstable();
        let payloads = helpers
            .iter()
            .map(|&h| system.helper_payload(&shares[h - 1], target))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let symbols_per_helper: Vec<usize> = payloads.iter().map(|p| p.symbols.len()).collect();
        let rebuilt = system.regenerate_from_payloads(target, &payloads)?;
        if rebuilt != original[target - 1] {
            return Err(HarnessError::SimulationFault(format!("round {round}: node {target} not rebuilt exactly")));
        }
        stored_max = stored_max.max(rebuilt.symbols.len());
        sent_max = sent_max.max(symbols_per_helper.iter().copied().max().unwrap_or(0));
        shares[target - 1] = rebuilt;
        events.push(RepairEvent {
            round,
            target,
            helpers,
            total_symbols: symbols_per_helper.iter().sum(),
            symbols_per_helper,
        });

        for layout in system.layouts() {
            let k = layout.level;
            if layout.size() == 0 {
                continue;
            }
            let mut nodes: Vec<usize> = sample(&mut rng, n, k).into_iter().map(|i| i + 1).collect();
            nodes.sort_unstable();
            let picked: Vec<SystemShare> = nodes.iter().map(|&v| shares[v - 1].clone()).collect();
            let decoded = system.reconstruct(&picked)?;
            if decoded[k - 1] != messages[k - 1] {
                return Err(HarnessError::SimulationFault(format!("round {round}: level {k} audit on {nodes:?} failed")));
            }
            audits.push(Audit { round, level: k, nodes });
        }
    }

    let padded_total: usize = system.layouts().iter().map(|l| l.padded_size).sum();
    let raw_total: usize = config.sizes.iter().sum();
    let point = RatePoint::new(ratio(stored_max, padded_total), ratio(sent_max, padded_total));
    let unpadded = RatePoint::new(ratio(stored_max, raw_total), ratio(sent_max, raw_total));
    let check = feasible(&point, &system.padded_profile());
    Ok(SimReport {
        n,
        d,
        q: config.q,
        sizes: config.sizes.clone(),
        seed,
        rounds,
        alpha_total: system.alpha_total(),
        beta_total: system.beta_total(),
        events,
        audits,
        empirical: (&point).into(),
        empirical_unpadded: (&unpadded).into(),
        feasible: check.feasible,
        beta_slack: check.beta_slack.to_string(),
        line_slack: check.line_slack.to_string(),
    })
}
