//! Ground random variables of a storage system with `n = d + 1` nodes.
//!
//! Nodes and levels are 1-based in every public helper. Ground variables are
//! ordered as `W_1..W_n`, then `S_{j,k}` for `j != k` in lexicographic order,
//! then `M_1..M_d`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::varset::{VarSet, MAX_GROUND_VARS};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    /// Content stored at a node.
    Node(usize),
    /// Repair message sent by `from` to help regenerate `to`.
    Repair { from: usize, to: usize },
    /// Message of one level.
    Message(usize),
    /// Variable with no structural role.
    Free,
}

/// `from` determines `to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dependency {
    pub from: VarSet,
    pub to: VarSet,
}

/// Node permutation lifted to ground variable indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundPerm {
    /// `nodes[i - 1]` is the image of node `i`.
    pub nodes: Vec<usize>,
    image: Vec<u8>,
}

impl GroundPerm {
    pub fn apply(&self, set: VarSet) -> VarSet {
        set.iter().map(|i| self.image[i] as usize).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.nodes.iter().enumerate().all(|(i, &v)| v == i + 1)
    }
}

#[derive(Clone, Debug)]
pub struct Universe {
    names: Vec<String>,
    kinds: Vec<VarKind>,
    levels: usize,
    nodes: usize,
}

impl Universe {
    /// Variables of a system with `d + 1` nodes, repair degree `d` and `d` levels.
    pub fn standard(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParams("d must be at least 1".into()));
        }
        let n = d + 1;
        let count = n + n * (n - 1) + d;
        if count > MAX_GROUND_VARS {
            return Err(Error::ModelTooLarge { vars: count, limit: MAX_GROUND_VARS });
        }
        let mut names = Vec::with_capacity(count);
        let mut kinds = Vec::with_capacity(count);
        for i in 1..=n {
            names.push(format!("W_{i}"));
            kinds.push(VarKind::Node(i));
        }
        for j in 1..=n {
            for k in 1..=n {
                if j != k {
                    names.push(format!("S_{j}_{k}"));
                    kinds.push(VarKind::Repair { from: j, to: k });
                }
            }
        }
        for k in 1..=d {
            names.push(format!("M_{k}"));
            kinds.push(VarKind::Message(k));
        }
        Ok(Universe { names, kinds, levels: d, nodes: n })
    }

    /// Unstructured variables with the given names.
    pub fn free<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        if names.is_empty() || names.len() > MAX_GROUND_VARS {
            return Err(Error::InvalidParams(format!("{} variables", names.len())));
        }
        let names: Vec<String> = names.iter().map(|s| String::from(s.as_ref())).collect();
        for (i, a) in names.iter().enumerate() {
            if names[..i].contains(a) {
                return Err(Error::InvalidParams(format!("duplicate variable {a}")));
            }
        }
        let kinds = alloc::vec![VarKind::Free; names.len()];
        Ok(Universe { names, kinds, levels: 0, nodes: 0 })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn is_standard(&self) -> bool {
        self.nodes > 0
    }

    /// Repair degree, equal to the number of levels (0 for free universes).
    pub fn d(&self) -> usize {
        self.levels
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn kind(&self, i: usize) -> VarKind {
        self.kinds[i]
    }

    pub fn all(&self) -> VarSet {
        (0..self.len()).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    fn node_in_range(&self, i: usize) -> bool {
        (1..=self.nodes).contains(&i)
    }

    pub fn w(&self, i: usize) -> VarSet {
        assert!(self.node_in_range(i), "node {i} out of range");
        VarSet::singleton(i - 1)
    }

    pub fn s(&self, from: usize, to: usize) -> VarSet {
        assert!(self.node_in_range(from) && self.node_in_range(to) && from != to);
        let n = self.nodes;
        let offset = (from - 1) * (n - 1) + if to < from { to - 1 } else { to - 2 };
        VarSet::singleton(n + offset)
    }

    pub fn m(&self, k: usize) -> VarSet {
        assert!((1..=self.levels).contains(&k), "level {k} out of range");
        VarSet::singleton(self.nodes + self.nodes * (self.nodes - 1) + k - 1)
    }

    /// Repair messages from every listed sender to `to`, skipping `to` itself.
    pub fn s_from<I: IntoIterator<Item = usize>>(&self, senders: I, to: usize) -> VarSet {
        senders.into_iter().filter(|&j| j != to).map(|j| self.s(j, to)).fold(VarSet::EMPTY, |a, b| a | b)
    }

    /// Every repair message sent by node `from`.
    pub fn sent_by(&self, from: usize) -> VarSet {
        (1..=self.nodes).filter(|&k| k != from).fold(VarSet::EMPTY, |acc, k| acc | self.s(from, k))
    }

    /// `l_k`: messages to node `k` from the nodes after it. Empty for `k = 0`.
    pub fn l(&self, k: usize) -> VarSet {
        if k == 0 {
            return VarSet::EMPTY;
        }
        self.s_from(k + 1..=self.nodes, k)
    }

    /// Union of `l_r` for `r` in `first..=last`; empty when `first > last`.
    pub fn l_range(&self, first: usize, last: usize) -> VarSet {
        (first..=last).fold(VarSet::EMPTY, |acc, r| acc | self.l(r))
    }

    /// `l^{(k)}`: union of `l_1..l_k`.
    pub fn l_upto(&self, k: usize) -> VarSet {
        self.l_range(1, k)
    }

    /// `l'_r`: `l_r` together with the message from node 1 to node `r`.
    pub fn l_prime(&self, r: usize) -> VarSet {
        assert!(r >= 2, "l' starts at node 2");
        self.s(1, r) | self.l(r)
    }

    pub fn l_prime_range(&self, first: usize, last: usize) -> VarSet {
        (first..=last).fold(VarSet::EMPTY, |acc, r| acc | self.l_prime(r))
    }

    pub fn w_set<I: IntoIterator<Item = usize>>(&self, nodes: I) -> VarSet {
        nodes.into_iter().fold(VarSet::EMPTY, |acc, i| acc | self.w(i))
    }

    /// `W^{(k)}`: content of nodes `1..=k`.
    pub fn w_upto(&self, k: usize) -> VarSet {
        self.w_set(1..=k)
    }

    /// `M^{(k)}`: messages of levels `1..=k`.
    pub fn m_upto(&self, k: usize) -> VarSet {
        (1..=k).fold(VarSet::EMPTY, |acc, j| acc | self.m(j))
    }

    /// `W_1` together with `l_2..l_k`.
    pub fn anchor(&self, k: usize) -> VarSet {
        self.w(1) | self.l_range(2, k)
    }

    /// Resolves a ground name or one of the composite names
    /// `l_k`, `l^k`, `l'_r`, `W^k`, `M^k`, `A_k`.
    pub fn resolve(&self, name: &str) -> Result<VarSet> {
        if let Some(i) = self.index_of(name) {
            return Ok(VarSet::singleton(i));
        }
        if !self.is_standard() {
            return Err(Error::UnknownName(name.into()));
        }
        let unknown = || Error::UnknownName(name.into());
        let (head, index) = name.split_once(['_', '^']).ok_or_else(unknown)?;
        let sep = name.as_bytes()[head.len()];
        let index: usize = index.parse().map_err(|_| unknown())?;
        let n = self.nodes;
        let set = match (head, sep) {
            ("l", b'_') if (1..=n).contains(&index) => self.l(index),
            ("l", b'^') if index <= n => self.l_upto(index),
            ("l'", b'_') if (2..=n).contains(&index) => self.l_prime(index),
            ("W", b'^') if index <= n => self.w_upto(index),
            ("M", b'^') if index <= self.levels => self.m_upto(index),
            ("A", b'_') if (1..=n).contains(&index) => self.anchor(index),
            _ => return Err(unknown()),
        };
        Ok(set)
    }

    /// Functional dependencies of the storage system.
    ///
    /// A node determines what it sends, the messages received by a node
    /// determine its content, and any `k` nodes determine the first `k` levels.
    pub fn dependencies(&self) -> Vec<Dependency> {
        if !self.is_standard() {
            return Vec::new();
        }
        let n = self.nodes;
        let mut deps = Vec::new();
        for j in 1..=n {
            deps.push(Dependency { from: self.w(j), to: self.sent_by(j) });
        }
        for k in 1..=n {
            deps.push(Dependency { from: self.s_from(1..=n, k), to: self.w(k) });
        }
        for subset in 1u32..(1 << n) {
            let size = subset.count_ones() as usize;
            let nodes = (1..=n).filter(|i| subset >> (i - 1) & 1 == 1);
            let to = self.m_upto(size.min(self.levels));
            deps.push(Dependency { from: self.w_set(nodes), to });
        }
        deps
    }

    /// Smallest superset of `set` closed under `deps`.
    pub fn closure(deps: &[Dependency], set: VarSet) -> VarSet {
        let mut current = set;
        loop {
            let next = deps
                .iter()
                .filter(|dep| dep.from.is_subset(current))
                .fold(current, |acc, dep| acc | dep.to);
            if next == current {
                return current;
            }
            current = next;
        }
    }

    /// Lifts a node permutation, given as the images of nodes `1..=n`.
    pub fn ground_perm(&self, nodes: &[usize]) -> Result<GroundPerm> {
        let n = self.nodes;
        if nodes.len() != n {
            return Err(Error::SizeMismatch { expected: n, got: nodes.len() });
        }
        let mut seen = alloc::vec![false; n + 1];
        for &v in nodes {
            if !(1..=n).contains(&v) {
                return Err(Error::NodeOutOfRange(v));
            }
            if seen[v] {
                return Err(Error::DuplicateNode(v));
            }
            seen[v] = true;
        }
        let image = (0..self.len())
            .map(|i| {
                let target = match self.kinds[i] {
                    VarKind::Node(a) => self.w(nodes[a - 1]),
                    VarKind::Repair { from, to } => self.s(nodes[from - 1], nodes[to - 1]),
                    VarKind::Message(_) | VarKind::Free => VarSet::singleton(i),
                };
                target.iter().next().unwrap() as u8
            })
            .collect();
        Ok(GroundPerm { nodes: nodes.to_vec(), image })
    }

    /// Permutation exchanging the nodes in `a` with those in `b`, pairwise.
    pub fn swap_perm(&self, a: &[usize], b: &[usize]) -> Result<GroundPerm> {
        if a.len() != b.len() {
            return Err(Error::SizeMismatch { expected: a.len(), got: b.len() });
        }
        let mut nodes: Vec<usize> = (1..=self.nodes).collect();
        for (&x, &y) in a.iter().zip(b) {
            if !self.node_in_range(x) || !self.node_in_range(y) {
                return Err(Error::NodeOutOfRange(x.max(y)));
            }
            nodes.swap(x - 1, y - 1);
        }
        self.ground_perm(&nodes)
    }

    /// Every permutation of the nodes. Only the identity for free universes.
    pub fn node_group(&self) -> Vec<GroundPerm> {
        if !self.is_standard() {
            let image = (0..self.len()).map(|i| i as u8).collect();
            return alloc::vec![GroundPerm { nodes: Vec::new(), image }];
        }
        let mut current: Vec<usize> = (1..=self.nodes).collect();
        let mut out = Vec::new();
        permutations(&mut current, 0, &mut |p| out.push(self.ground_perm(p).expect("valid permutation")));
        out
    }

    /// Comma-separated ground names of `set`.
    pub fn describe(&self, set: VarSet) -> String {
        let parts: Vec<&str> = set.iter().map(|i| self.names[i].as_str()).collect();
        parts.join(",")
    }
}

fn permutations(items: &mut Vec<usize>, start: usize, visit: &mut dyn FnMut(&[usize])) {
    if start == items.len() {
        visit(items);
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        permutations(items, start + 1, visit);
        items.swap(start, i);
    }
}
