//! Separate-coding MLDR scheme: message `k` is striped into generations of
//! an `(n, k, d)` MBR code and the per-level shares are stacked on each node.
//!
//! Share layout is level-major: all generations of level 1, then level 2,
//! and so on; each generation contributes `d` symbols. A helper's repair
//! payload follows the same order with one symbol per generation.

use crate::bounds::{MessageProfile, RatePoint, Rational};
use crate::error::{Error, Result};
use crate::field::{Fe, Field};
use crate::mbr::{MbrCode, NodeShare, RepairSymbol};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigInt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MldrConfig {
    pub n: usize,
    pub d: usize,
    /// Message sizes `B_1..B_d` in symbols; zeros allowed.
    pub sizes: Vec<usize>,
    pub field: Field,
}

impl MldrConfig {
    pub fn new(n: usize, d: usize, sizes: Vec<usize>, field: Field) -> Self {
        MldrConfig { n, d, sizes, field }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.d == 0 || self.d > self.n - 1 {
            return Err(Error::InvalidParams(format!(
                "need n >= 2 and 1 <= d <= n-1, got n={}, d={}",
                self.n, self.d
            )));
        }
        if self.sizes.len() != self.d {
            return Err(Error::SizeMismatch {
                expected: self.d,
                got: self.sizes.len(),
            });
        }
        if self.sizes.iter().all(|&b| b == 0) {
            return Err(Error::EmptySystem);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LevelLayout {
    pub level: usize,
    /// Message symbols per generation of this level's code.
    pub block: usize,
    pub generations: usize,
    pub padded_size: usize,
    pub pad: usize,
}

impl LevelLayout {
    pub fn size(&self) -> usize {
        self.padded_size - self.pad
    }
}

/// Per-node content of the whole stacked system.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SystemShare {
    pub node: usize,
    pub symbols: Vec<Fe>,
}

/// What one helper sends toward a failed node: one symbol per generation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairPayload {
    pub helper: usize,
    pub target: usize,
    pub symbols: Vec<Fe>,
}

#[derive(Debug, Clone)]
pub struct MldrSystem {
    config: MldrConfig,
    layouts: Vec<LevelLayout>,
    codes: Vec<Option<MbrCode>>,
    alpha_total: usize,
    beta_total: usize,
}

/// Computes generations and padding per level and instantiates one code per
/// nonempty level.
pub fn plan_layout(config: MldrConfig) -> Result<MldrSystem> {
    config.validate()?;
    let (n, d) = (config.n, config.d);
    let mut layouts = Vec::with_capacity(d);
    let mut codes = Vec::with_capacity(d);
    for (i, &size) in config.sizes.iter().enumerate() {
        let k = i + 1;
        let block = k * d - k * (k - 1) / 2;
        let generations = size.div_ceil(block);
        layouts.push(LevelLayout {
            level: k,
            block,
            generations,
            padded_size: generations * block,
            pad: generations * block - size,
        });
        codes.push(if generations > 0 {
            Some(MbrCode::new(n, k, d, config.field)?)
        } else {
            None
        });
    }
    let beta_total: usize = layouts.iter().map(|l| l.generations).sum();
    Ok(MldrSystem {
        config,
        layouts,
        codes,
        alpha_total: beta_total * d,
        beta_total,
    })
}

impl MldrSystem {
    /// Rebuilds a system from a stored layout, checking it against the sizes
    /// that layout implies.
    pub fn from_layout(n: usize, d: usize, field: Field, gens_and_pads: &[(usize, usize)]) -> Result<Self> {
        if gens_and_pads.len() != d {
            return Err(Error::SizeMismatch {
                expected: d,
                got: gens_and_pads.len(),
            });
        }
        let mut sizes = Vec::with_capacity(d);
        for (i, &(g, pad)) in gens_and_pads.iter().enumerate() {
            let k = i + 1;
            let block = k * d - k * (k - 1) / 2;
            let padded = g * block;
            if pad > padded || (g > 0 && pad >= block) {
                return Err(Error::InvalidParams(format!("level {k}: pad {pad} inconsistent with {g} generations")));
            }
            sizes.push(padded - pad);
        }
        let sys = plan_layout(MldrConfig::new(n, d, sizes, field))?;
        if sys.layouts.iter().zip(gens_and_pads).any(|(l, &(g, p))| l.generations != g || l.pad != p) {
            return Err(Error::InvalidParams("layout does not match message sizes".into()));
        }
        Ok(sys)
    }

    pub fn config(&self) -> &MldrConfig {
        &self.config
    }

    pub fn layouts(&self) -> &[LevelLayout] {
        &self.layouts
    }

    pub fn code(&self, level: usize) -> Option<&MbrCode> {
        self.codes.get(level.checked_sub(1)?)?.as_ref()
    }

    /// Symbols stored per node.
    pub fn alpha_total(&self) -> usize {
        self.alpha_total
    }

    /// Symbols sent by each helper during one repair.
    pub fn beta_total(&self) -> usize {
        self.beta_total
    }

    fn level_offset(&self, level: usize) -> usize {
        self.layouts[..level - 1].iter().map(|l| l.generations).sum::<usize>() * self.config.d
    }

    fn check_node(&self, node: usize) -> Result<()> {
        if node == 0 || node > self.config.n {
            return Err(Error::NodeOutOfRange(node));
        }
        Ok(())
    }

    fn check_share(&self, share: &SystemShare) -> Result<()> {
        self.check_node(share.node)?;
        if share.symbols.len() != self.alpha_total {
            return Err(Error::SizeMismatch {
                expected: self.alpha_total,
                got: share.symbols.len(),
            });
        }
        Ok(())
    }

    /// Pads, stripes and encodes `d` messages; message `k` must hold `B_k`
    /// symbols.
    pub fn encode(&self, messages: &[Vec<Fe>]) -> Result<Vec<SystemShare>> {
        let (n, d) = (self.config.n, self.config.d);
        if messages.len() != d {
            return Err(Error::SizeMismatch {
                expected: d,
                got: messages.len(),
            });
        }
        let mut shares: Vec<SystemShare> = (1..=n)
            .map(|node| SystemShare {
                node,
                symbols: Vec::with_capacity(self.alpha_total),
            })
            .collect();
        for (layout, msg) in self.layouts.iter().zip(messages) {
            if msg.len() != layout.size() {
                return Err(Error::SizeMismatch {
                    expected: layout.size(),
                    got: msg.len(),
                });
            }
            let Some(code) = &self.codes[layout.level - 1] else {
                continue;
            };
            let mut padded = msg.clone();
            padded.resize(layout.padded_size, Fe::ZERO);
            for chunk in padded.chunks(layout.block) {
                for (share, node_share) in shares.iter_mut().zip(code.encode(chunk)?) {
                    share.symbols.extend_from_slice(&node_share.symbols);
                }
            }
        }
        Ok(shares)
    }

    fn node_share(&self, share: &SystemShare, level: usize, generation: usize) -> NodeShare {
        let d = self.config.d;
        let start = self.level_offset(level) + generation * d;
        NodeShare {
            node: share.node,
            symbols: share.symbols[start..start + d].to_vec(),
        }
    }

    /// Recovers every message of level `k <= shares.len()`. Level `k` of the
    /// result is at index `k - 1`; empty levels come back empty.
    pub fn reconstruct(&self, shares: &[SystemShare]) -> Result<Vec<Vec<Fe>>> {
        if shares.is_empty() || shares.len() > self.config.n {
            return Err(Error::WrongShareCount {
                expected: self.config.n,
                got: shares.len(),
            });
        }
        for (i, s) in shares.iter().enumerate() {
            self.check_share(s)?;
            if shares[..i].iter().any(|o| o.node == s.node) {
                return Err(Error::DuplicateNode(s.node));
            }
        }
        let top = shares.len().min(self.config.d);
        let mut out = Vec::with_capacity(top);
        for layout in &self.layouts[..top] {
            let k = layout.level;
            let Some(code) = &self.codes[k - 1] else {
                out.push(Vec::new());
                continue;
            };
            let mut msg = Vec::with_capacity(layout.padded_size);
            for g in 0..layout.generations {
                let picked: Vec<NodeShare> = shares[..k].iter().map(|s| self.node_share(s, k, g)).collect();
                msg.extend(code.reconstruct(&picked)?);
            }
            msg.truncate(layout.size());
            out.push(msg);
        }
        Ok(out)
    }

    /// Payload a helper sends toward `target`, computed from its own share.
    pub fn helper_payload(&self, helper: &SystemShare, target: usize) -> Result<RepairPayload> {
        self.check_share(helper)?;
        self.check_node(target)?;
        if helper.node == target {
            return Err(Error::SelfRepair(target));
        }
        let mut symbols = Vec::with_capacity(self.beta_total);
        for layout in &self.layouts {
            let Some(code) = &self.codes[layout.level - 1] else {
                continue;
            };
            for g in 0..layout.generations {
                let ns = self.node_share(helper, layout.level, g);
                symbols.push(code.helper_symbol(&ns, target)?.symbol);
            }
        }
        Ok(RepairPayload {
            helper: helper.node,
            target,
            symbols,
        })
    }

    /// Rebuilds `target` from `d` helper payloads.
    pub fn regenerate_from_payloads(&self, target: usize, payloads: &[RepairPayload]) -> Result<SystemShare> {
        self.check_node(target)?;
        let d = self.config.d;
        if payloads.len() != d {
            return Err(Error::InvalidRepairSet(format!("need {d} helpers, got {}", payloads.len())));
        }
        for (i, p) in payloads.iter().enumerate() {
            if p.target != target || p.helper == target {
                return Err(Error::InvalidRepairSet(format!(
                    "payload from node {} toward node {} cannot repair node {target}",
                    p.helper, p.target
                )));
            }
            if payloads[..i].iter().any(|o| o.helper == p.helper) {
                return Err(Error::InvalidRepairSet(format!("duplicate helper {}", p.helper)));
            }
            if p.symbols.len() != self.beta_total {
                return Err(Error::InvalidRepairSet(format!(
                    "helper {} sent {} symbols, expected {}",
                    p.helper,
                    p.symbols.len(),
                    self.beta_total
                )));
            }
        }
        let mut symbols = Vec::with_capacity(self.alpha_total);
        let mut cursor = 0;
        for layout in &self.layouts {
            let Some(code) = &self.codes[layout.level - 1] else {
                continue;
            };
            for _ in 0..layout.generations {
                let syms: Vec<RepairSymbol> = payloads
                    .iter()
                    .map(|p| RepairSymbol {
                        helper: p.helper,
                        target,
                        symbol: p.symbols[cursor],
                    })
                    .collect();
                symbols.extend(code.regenerate(target, &syms)?.symbols);
                cursor += 1;
            }
        }
        Ok(SystemShare { node: target, symbols })
    }

    /// Exact repair of `target` from any `d` distinct helper shares.
    pub fn regenerate_node(&self, target: usize, helpers: &[SystemShare]) -> Result<SystemShare> {
        self.check_node(target)?;
        if helpers.len() != self.config.d {
            return Err(Error::InvalidRepairSet(format!(
                "need {} helpers, got {}",
                self.config.d,
                helpers.len()
            )));
        }
        if helpers.iter().any(|h| h.node == target) {
            return Err(Error::InvalidRepairSet(format!("node {target} listed as its own helper")));
        }
        let payloads = helpers
            .iter()
            .map(|h| self.helper_payload(h, target))
            .collect::<Result<Vec<_>>>()?;
        self.regenerate_from_payloads(target, &payloads)
    }

    /// Normalized profile of the padded message sizes.
    pub fn padded_profile(&self) -> MessageProfile {
        let padded: Vec<u64> = self.layouts.iter().map(|l| l.padded_size as u64).collect();
        MessageProfile::from_sizes(&padded).expect("validated system is nonempty")
    }

    /// `(alpha_total, beta_total)` normalized by the padded total message size.
    pub fn achieved_point(&self) -> RatePoint {
        let total: usize = self.layouts.iter().map(|l| l.padded_size).sum();
        self.normalize(total)
    }

    /// Same, normalized by the unpadded sizes `sum B_k`.
    pub fn achieved_point_unpadded(&self) -> RatePoint {
        self.normalize(self.config.sizes.iter().sum())
    }

    fn normalize(&self, total: usize) -> RatePoint {
        let total = BigInt::from(total);
        RatePoint::new(
            Rational::new(BigInt::from(self.alpha_total), total.clone()),
            Rational::new(BigInt::from(self.beta_total), total),
        )
    }

    pub fn zero_messages(&self) -> Vec<Vec<Fe>> {
        self.layouts.iter().map(|l| vec![Fe::ZERO; l.size()]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{int, mbr_point, rational};

    fn fig1_system() -> MldrSystem {
        plan_layout(MldrConfig::new(4, 3, vec![0, 15, 30], Field::default())).unwrap()
    }

    #[test]
    fn layout_of_figure_one_profile() {
        let sys = fig1_system();
        let l = sys.layouts();
        assert_eq!((l[0].generations, l[1].generations, l[2].generations), (0, 3, 5));
        assert_eq!((l[1].block, l[2].block), (5, 6));
        assert!(l.iter().all(|x| x.pad == 0));
        assert_eq!((sys.alpha_total(), sys.beta_total()), (24, 8));
        assert!(sys.code(1).is_none());
        assert_eq!(sys.alpha_total(), 3 * sys.beta_total());
    }

    #[test]
    fn padding_and_empty() {
        let sys = plan_layout(MldrConfig::new(4, 3, vec![0, 1, 0], Field::default())).unwrap();
        assert_eq!(sys.layouts()[1].generations, 1);
        assert_eq!(sys.layouts()[1].pad, 4);
        assert_eq!(
            plan_layout(MldrConfig::new(4, 3, vec![0, 0, 0], Field::default())).unwrap_err(),
            Error::EmptySystem
        );
        assert!(matches!(
            plan_layout(MldrConfig::new(300, 3, vec![1, 0, 0], Field::default())),
            Err(Error::InvalidParams(_))
        ));
        assert!(matches!(
            plan_layout(MldrConfig::new(3, 3, vec![1, 0, 0], Field::default())),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn achieved_point_examples() {
        let sys = fig1_system();
        assert_eq!(sys.achieved_point(), RatePoint::new(rational(8, 15), rational(8, 45)));
        assert_eq!(sys.achieved_point(), mbr_point(&sys.padded_profile()));
        let rep = plan_layout(MldrConfig::new(2, 1, vec![7], Field::default())).unwrap();
        assert_eq!(rep.achieved_point(), RatePoint::new(int(1), int(1)));
        let padded = plan_layout(MldrConfig::new(4, 3, vec![0, 1, 0], Field::default())).unwrap();
        assert_eq!(padded.achieved_point(), RatePoint::new(rational(3, 5), rational(1, 5)));
        assert_eq!(padded.achieved_point_unpadded(), RatePoint::new(int(3), int(1)));
    }

    #[test]
    fn zero_messages_zero_shares() {
        let sys = fig1_system();
        let shares = sys.encode(&sys.zero_messages()).unwrap();
        assert_eq!(shares.len(), 4);
        for s in &shares {
            assert_eq!(s.symbols.len(), 24);
            assert!(s.symbols.iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn encode_checks_lengths() {
        let sys = fig1_system();
        let mut msgs = sys.zero_messages();
        msgs[2].pop();
        assert_eq!(sys.encode(&msgs), Err(Error::SizeMismatch { expected: 30, got: 29 }));
    }

    #[test]
    fn single_share_with_empty_first_level() {
        let sys = fig1_system();
        let shares = sys.encode(&sys.zero_messages()).unwrap();
        let out = sys.reconstruct(&shares[2..3]).unwrap();
        assert_eq!(out, vec![Vec::<Fe>::new()]);
        assert_eq!(
            sys.reconstruct(&[shares[0].clone(), shares[0].clone()]),
            Err(Error::DuplicateNode(1))
        );
    }

    #[test]
    fn regenerate_rejects_target_among_helpers() {
        let sys = fig1_system();
        let shares = sys.encode(&sys.zero_messages()).unwrap();
        assert!(matches!(sys.regenerate_node(1, &shares[..3]), Err(Error::InvalidRepairSet(_))));
        assert!(matches!(sys.regenerate_node(1, &shares[1..3]), Err(Error::InvalidRepairSet(_))));
    }
}
