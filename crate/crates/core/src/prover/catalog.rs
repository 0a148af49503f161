//! The derivation of the outer bounds as a list of individually checkable
//! steps.
//!
//! Every step is a claim `lhs >= rhs` or `lhs = rhs` between entropy
//! functionals of [`Universe::standard`], with one justification:
//!
//! * `Symmetry`: a node permutation maps `lhs` onto `rhs` term by term.
//! * `Dependency`: both sides agree after replacing every set by its closure.
//! * `Shannon`: the claim follows from elemental inequalities on the groups
//!   generated by the sets it mentions, plus the structural constraints
//!   it lists. Checking it needs an LP solver.
//! * `Combination`: `lhs - rhs` equals a weighted sum of earlier claims
//!   (`lhs - rhs` each), with nonnegative weights on inequalities.
//!
//! [`check_exact`] decides all but `Shannon` steps without floating point.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::{One, Signed};

use super::expr::{Functional, Scalar};
use super::universe::{GroundPerm, Universe};
use super::varset::VarSet;
use crate::bounds::{int, j_sum, rational, t_coeff, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    AtLeast,
    Equal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Claim {
    pub lhs: Functional,
    pub rhs: Functional,
    pub relation: Relation,
}

impl Claim {
    pub fn difference(&self) -> Functional {
        self.lhs.clone() - self.rhs.clone()
    }
}

/// Structural constraints a Shannon step may use.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ShannonUse {
    pub dependencies: bool,
    pub symmetry: bool,
    pub independence: bool,
    pub size_bounds: bool,
    /// Extra sets that split the automatically derived groups.
    pub refine: Vec<VarSet>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Justification {
    /// Images of nodes `1..=n`.
    Symmetry(Vec<usize>),
    Dependency,
    Shannon(ShannonUse),
    /// Weighted earlier steps, by name.
    Combination(Vec<(String, Rational)>),
}

#[derive(Clone, Debug)]
pub struct Step {
    pub name: String,
    pub claim: Claim,
    pub justification: Justification,
    /// `false` for recorded readings that are expected not to check.
    pub expect_valid: bool,
}

/// Exact arithmetic fact used by the derivation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Identity {
    pub name: String,
    pub lhs: Rational,
    pub rhs: Rational,
    pub expect_equal: bool,
}

impl Identity {
    pub fn holds(&self) -> bool {
        (self.lhs == self.rhs) == self.expect_equal
    }
}

#[derive(Clone, Debug)]
pub struct Catalog {
    pub universe: Universe,
    pub steps: Vec<Step>,
    pub identities: Vec<Identity>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Verified,
    Rejected(String),
    /// Shannon step; decided by an LP.
    NeedsSolver,
}

/// `(i, p)` with `d + 1 - j = i (d - k) + p`, `i >= 1`, `1 <= p <= d - k`.
pub fn decompose(d: usize, k: usize, j: usize) -> (usize, usize) {
    assert!(1 <= j && j <= k && k < d, "need 1 <= j <= k < d");
    let width = d - k;
    let total = d + 1 - j;
    let p = (total - 1) % width + 1;
    ((total - p) / width, p)
}

struct Builder<'a> {
    u: &'a Universe,
    d: usize,
    steps: Vec<Step>,
}

fn c(x: VarSet, given: VarSet) -> Functional {
    Functional::cond(x, given)
}

fn r(n: i64, d: i64) -> Rational {
    rational(n, d)
}

fn premises<const N: usize>(items: [(&String, Rational); N]) -> Vec<(String, Rational)> {
    items.into_iter().map(|(n, w)| (n.clone(), w)).collect()
}

fn ones(names: &[&String]) -> Vec<(String, Rational)> {
    names.iter().map(|n| ((*n).clone(), Rational::one())).collect()
}

impl Builder<'_> {
    fn t(&self, k: usize) -> Rational {
        t_coeff(self.d, k).expect("valid level")
    }

    fn j(&self, x: i64) -> Rational {
        j_sum(x).expect("nonnegative")
    }

    fn push(&mut self, name: String, lhs: Functional, rhs: Functional, relation: Relation, justification: Justification) -> String {
        let claim = Claim { lhs, rhs, relation };
        self.steps.push(Step { name: name.clone(), claim, justification, expect_valid: true });
        name
    }

    fn symmetric(&mut self, name: String, lhs: Functional, rhs: Functional, perm: GroundPerm) -> String {
        self.push(name, lhs, rhs, Relation::Equal, Justification::Symmetry(perm.nodes))
    }

    fn dependent(&mut self, name: String, lhs: Functional, rhs: Functional) -> String {
        self.push(name, lhs, rhs, Relation::Equal, Justification::Dependency)
    }

    fn shannon(&mut self, name: String, lhs: Functional, rhs: Functional, uses: ShannonUse) -> String {
        self.push(name, lhs, rhs, Relation::AtLeast, Justification::Shannon(uses))
    }

    fn combine(&mut self, name: String, lhs: Functional, rhs: Functional, from: Vec<(String, Rational)>) -> String {
        self.push(name, lhs, rhs, Relation::AtLeast, Justification::Combination(from))
    }

    /// `lhs = rhs` by expanding conditional entropies.
    fn identity(&mut self, name: String, lhs: Functional, rhs: Functional) -> String {
        self.push(name, lhs, rhs, Relation::Equal, Justification::Combination(Vec::new()))
    }

    fn swap(&self, a: &[usize], b: &[usize]) -> GroundPerm {
        self.u.swap_perm(a, b).expect("valid swap")
    }

    fn singletons(&self, set: VarSet) -> Vec<VarSet> {
        set.iter().map(VarSet::singleton).collect()
    }

    fn han_use(&self, receiver_set: VarSet, dependencies: bool) -> ShannonUse {
        ShannonUse { symmetry: true, dependencies, refine: self.singletons(receiver_set), ..ShannonUse::default() }
    }

    /// Exchanging one unit of `H(l^(k) | M^(k))` for `H(l^(j) | M^(k))`.
    fn exchange(&mut self, k: usize, j: usize) -> String {
        let (u, d) = (self.u, self.d);
        let n = d + 1;
        let (i, p) = decompose(d, k, j);
        let width = d - k;
        let m = u.m_upto(k);
        let (lk, lj, lk1, prev, next) = (u.l_upto(k), u.l_upto(j), u.l_upto(k + 1), u.l_upto(j - 1), u.l(k + 1));
        let part = |q: usize| -> Vec<usize> {
            if q == 0 {
                (j..j + p).collect()
            } else {
                let s = j + p + (q - 1) * width;
                (s..s + width).collect()
            }
        };
        let union = |q: usize| -> VarSet { u.s_from((0..=i - q).flat_map(part), k + 1) };
        let pre = format!("exchange(k={k},j={j})");
        let tail_nodes: Vec<usize> = (k + 2..=n).collect();

        let first = u.s_from(j..=k, k + 1);
        let perm = self.swap(&[j], &[k + 1]);
        let swap = self.symmetric(format!("{pre}.swap"), c(lj, m), c(first | next | prev, m), perm);
        let expand = self.dependent(format!("{pre}.expand"), c(lk, m), c(lk | first, m));
        let submod = self.shannon(
            format!("{pre}.submodular"),
            c(lk | first, m) + c(first | next | prev, m),
            c(lk | first | next, m) + c(first | prev, m),
            ShannonUse::default(),
        );
        let collapse = self.dependent(format!("{pre}.collapse"), c(lk | first | next, m), c(lk1, m));
        let mut chain = self.combine(
            format!("{pre}.chain[1]"),
            c(lk, m) + c(lj, m),
            c(lk1, m) + c(union(1) | prev, m),
            ones(&[&swap, &expand, &submod, &collapse]),
        );
        for q in 1..i {
            let rest = union(q + 1);
            let perm = self.swap(&part(i - q), &tail_nodes);
            let shift = self.symmetric(format!("{pre}.shift[{q}]"), c(union(q) | prev, m), c(rest | next | prev, m), perm);
            let expand = self.dependent(format!("{pre}.expand[{q}]"), c(lk, m), c(lk | rest, m));
            let submod = self.shannon(
                format!("{pre}.submodular[{q}]"),
                c(rest | next | prev, m) + c(lk | rest, m),
                c(rest | next | lk, m) + c(rest | prev, m),
                ShannonUse::default(),
            );
            let collapse = self.dependent(format!("{pre}.collapse[{q}]"), c(rest | next | lk, m), c(lk1, m));
            let weight = int(q as i64 + 1);
            chain = self.combine(
                format!("{pre}.chain[{}]", q + 1),
                c(lk, m).scale(&weight) + c(lj, m),
                c(lk1, m).scale(&weight) + c(rest | prev, m),
                ones(&[&chain, &shift, &expand, &submod, &collapse]),
            );
        }

        let head = u.s_from(part(0), k + 1);
        let top: Vec<usize> = (k + 2..k + 2 + p).collect();
        let head_top = u.s_from(top.iter().copied(), k + 1);
        let given = prev | m;
        let split = self.identity(format!("{pre}.split"), c(head | prev, m), c(prev, m) + c(head, given));
        let perm = self.swap(&part(0), &top);
        let align = self.symmetric(format!("{pre}.align"), c(head, given), c(head_top, given), perm);
        let han = self.shannon(
            format!("{pre}.han"),
            c(head_top, given).scale(&r(1, p as i64)),
            c(next, given).scale(&r(1, width as i64)),
            self.han_use(next, false),
        );
        let condition = self.shannon(format!("{pre}.condition"), c(next, given), c(next, lk | m), ShannonUse::default());
        let increment = self.identity(format!("{pre}.increment"), c(next, lk | m), c(lk1, m) - c(lk, m));
        let frac = r(p as i64, width as i64);
        let tail = self.combine(
            format!("{pre}.tail"),
            c(head, given),
            (c(lk1, m) - c(lk, m)).scale(&frac),
            premises([(&align, Rational::one()), (&han, int(p as i64)), (&condition, frac.clone()), (&increment, frac)]),
        );
        let weight = r((d + 1 - j) as i64, width as i64);
        self.combine(
            pre,
            c(lk, m).scale(&weight) + c(lj, m),
            c(lk1, m).scale(&weight) + c(prev, m),
            ones(&[&chain, &split, &tail]),
        )
    }

    /// Same exchange with `W_1, l_2..l_k` in place of `l^(k)`.
    fn anchored(&mut self, k: usize, j: usize) -> String {
        let (u, d) = (self.u, self.d);
        let n = d + 1;
        let (i, p) = decompose(d, k, j);
        let width = d - k;
        let m = u.m_upto(k);
        let (ak, ak1, lj, prev, next) = (u.anchor(k), u.anchor(k + 1), u.l_upto(j), u.l_upto(j - 1), u.l(k + 1));
        let shifted = u.l_prime_range(2, j);
        let part = |q: usize| -> Vec<usize> {
            if q == 0 {
                core::iter::once(1).chain(j + 1..j + p).collect()
            } else {
                let s = j + p + (q - 1) * width;
                (s..s + width).collect()
            }
        };
        let union = |q: usize| -> VarSet { u.s_from((0..=i - q).flat_map(part), k + 1) };
        let pre = format!("anchored(k={k},j={j})");
        let tail_nodes: Vec<usize> = (k + 2..=n).collect();
        let forward: Vec<usize> = (2..=n).chain([1]).collect();
        let backward: Vec<usize> = core::iter::once(n).chain(1..n).collect();
        let core_set = u.w(1) | u.l_prime_range(2, k);

        let perm = u.ground_perm(&forward).expect("rotation");
        let rotate = self.symmetric(format!("{pre}.rotate"), c(lj, m), c(u.l_prime_range(2, j + 1), m), perm);
        let first = union(1);
        let perm = self.swap(&[j + 1], &[k + 1]);
        let swap = self.symmetric(format!("{pre}.swap"), c(u.l_prime_range(2, j + 1), m), c(first | next | shifted, m), perm);
        let expand = self.dependent(format!("{pre}.expand"), c(ak, m), c(core_set | first, m));
        let submod = self.shannon(
            format!("{pre}.submodular"),
            c(core_set | first, m) + c(first | next | shifted, m),
            c(core_set | first | next, m) + c(first | shifted, m),
            ShannonUse::default(),
        );
        let collapse = self.dependent(format!("{pre}.collapse"), c(core_set | first | next, m), c(ak1, m));
        let mut chain = self.combine(
            format!("{pre}.chain[1]"),
            c(ak, m) + c(lj, m),
            c(ak1, m) + c(first | shifted, m),
            ones(&[&rotate, &swap, &expand, &submod, &collapse]),
        );
        let between = u.s_from(j + 1..=k, k + 1);
        let with_deps = ShannonUse { dependencies: true, ..ShannonUse::default() };
        for q in 1..i {
            let rest = union(q + 1);
            let perm = self.swap(&part(i - q), &tail_nodes);
            let shift = self.symmetric(format!("{pre}.shift[{q}]"), c(union(q) | shifted, m), c(rest | next | shifted, m), perm);
            let expand = self.dependent(format!("{pre}.expand[{q}]"), c(ak, m), c(core_set | rest, m));
            let submod = self.shannon(
                format!("{pre}.submodular[{q}]"),
                c(rest | next | shifted, m) + c(core_set | rest, m),
                c(core_set | rest | between | next, m) + c(rest | shifted, m),
                with_deps.clone(),
            );
            let collapse = self.dependent(format!("{pre}.collapse[{q}]"), c(core_set | rest | between | next, m), c(ak1, m));
            let weight = int(q as i64 + 1);
            chain = self.combine(
                format!("{pre}.chain[{}]", q + 1),
                c(ak, m).scale(&weight) + c(lj, m),
                c(ak1, m).scale(&weight) + c(rest | shifted, m),
                ones(&[&chain, &shift, &expand, &submod, &collapse]),
            );
        }

        let head = u.s_from(part(0), k + 1);
        let top: Vec<usize> = (k + 2..k + 2 + p).collect();
        let head_top = u.s_from(top.iter().copied(), k + 1);
        let given = shifted | m;
        let split = self.identity(format!("{pre}.split"), c(head | shifted, m), c(shifted, m) + c(head, given));
        let perm = u.ground_perm(&backward).expect("rotation");
        let unrotate = self.symmetric(format!("{pre}.unrotate"), c(shifted, m), c(prev, m), perm);
        let perm = self.swap(&part(0), &top);
        let align = self.symmetric(format!("{pre}.align"), c(head, given), c(head_top, given), perm);
        let han = self.shannon(
            format!("{pre}.han"),
            c(head_top, given).scale(&r(1, p as i64)),
            c(next, given).scale(&r(1, width as i64)),
            self.han_use(next, false),
        );
        let condition = self.shannon(format!("{pre}.condition"), c(next, given), c(next, ak | m), with_deps);
        let increment = self.identity(format!("{pre}.increment"), c(next, ak | m), c(ak1, m) - c(ak, m));
        let frac = r(p as i64, width as i64);
        let tail = self.combine(
            format!("{pre}.tail"),
            c(head, given),
            (c(ak1, m) - c(ak, m)).scale(&frac),
            premises([(&align, Rational::one()), (&han, int(p as i64)), (&condition, frac.clone()), (&increment, frac)]),
        );
        let steps = int(i as i64);
        let partial = self.combine(
            format!("{pre}.partial"),
            c(ak, m).scale(&steps) + c(lj, m),
            c(ak1, m).scale(&steps) + c(prev, m) + c(head, given),
            ones(&[&chain, &split, &unrotate]),
        );
        let weight = r((d + 1 - j) as i64, width as i64);
        self.combine(
            pre,
            c(ak, m).scale(&weight) + c(lj, m),
            c(ak1, m).scale(&weight) + c(prev, m),
            ones(&[&partial, &tail]),
        )
    }

    /// Han-type inequalities for every sender subset, conditioned as in the
    /// exchange steps.
    fn han_family(&mut self, k: usize, j: usize) {
        let (u, d) = (self.u, self.d);
        let width = d - k;
        let next = u.l(k + 1);
        let m = u.m_upto(k);
        let senders: Vec<usize> = (k + 2..=d + 1).collect();
        for (label, given) in [("plain", u.l_upto(j - 1) | m), ("anchored", u.l_prime_range(2, j) | m)] {
            for subset in 1u32..(1 << senders.len()) {
                let chosen: Vec<usize> = senders.iter().enumerate().filter(|(b, _)| subset >> b & 1 == 1).map(|(_, &s)| s).collect();
                let set = u.s_from(chosen.iter().copied(), k + 1);
                let name = format!("han.{label}(k={k},j={j},senders={chosen:?})");
                let lhs = c(set, given).scale(&r(1, chosen.len() as i64));
                let rhs = c(next, given).scale(&r(1, width as i64));
                let uses = self.han_use(next, false);
                self.shannon(name, lhs, rhs, uses);
            }
        }
    }

    fn message_size(&mut self, k: usize) -> String {
        let u = self.u;
        let refine = self.singletons(u.m_upto(k));
        let uses = ShannonUse { independence: true, size_bounds: true, refine, ..ShannonUse::default() };
        let lhs = c(u.m(k), u.m_upto(k - 1));
        let rhs = Functional::scalar(Scalar::Message(k));
        self.push(format!("message_size({k})"), lhs, rhs, Relation::Equal, Justification::Shannon(uses))
    }

    fn build(&mut self) {
        let (u, d) = (self.u, self.d);
        let n = d + 1;
        for k in 1..d {
            for j in 1..=k {
                self.han_family(k, j);
            }
        }
        let mut level_steps = Vec::new();
        let mut anchor_steps = Vec::new();
        for k in 1..d {
            let m = u.m_upto(k);
            let results: Vec<String> = (1..=k).map(|j| self.exchange(k, j)).collect();
            let weight = int((d - k) as i64) * self.t(k) * self.t(k + 1);
            let from = results.iter().map(|name| (name.clone(), weight.clone())).collect();
            let lhs = c(u.l_upto(k), m).scale(&self.t(k));
            let rhs = c(u.l_upto(k + 1), m).scale(&self.t(k + 1));
            level_steps.push(self.combine(format!("level_step({k})"), lhs, rhs, from));

            let results: Vec<String> = (1..=k).map(|j| self.anchored(k, j)).collect();
            let weight = int((d - k) as i64) * self.t(k);
            let from: Vec<(String, Rational)> = results.iter().map(|name| (name.clone(), weight.clone())).collect();
            let lhs = c(u.anchor(k), m) + c(u.l_upto(k), m).scale(&weight);
            anchor_steps.push(self.combine(format!("anchor_step({k})"), lhs, c(u.anchor(k + 1), m), from.clone()));

            let alt = int((d - k) as i64) * t_coeff(n, k).expect("valid level");
            let lhs = c(u.anchor(k), m) + c(u.l_upto(k), m).scale(&alt);
            let from = results.iter().map(|name| (name.clone(), alt.clone())).collect();
            self.combine(format!("anchor_step_node_count({k})"), lhs, c(u.anchor(k + 1), m), from);
            self.steps.last_mut().expect("just pushed").expect_valid = false;
        }

        let beta = Functional::scalar(Scalar::Beta);
        let alpha = Functional::scalar(Scalar::Alpha);
        let b = |k: usize| Functional::scalar(Scalar::Message(k));
        let first_sum = (2..=n).fold(Functional::zero(), |acc, i| acc + Functional::h(u.s(i, 1)));
        let (l1, m1, w1) = (u.l(1), u.m(1), u.w(1));
        let inv_d = r(1, d as i64);

        let size_only = ShannonUse { size_bounds: true, ..ShannonUse::default() };
        let repair_bound = self.shannon("bandwidth.repair_bound".into(), beta.clone(), first_sum.clone().scale(&inv_d), size_only.clone());
        let union = self.shannon("bandwidth.union".into(), first_sum.clone(), Functional::h(l1), ShannonUse::default());
        let decode_first = self.dependent("bandwidth.decode_first".into(), Functional::h(l1), Functional::h(l1 | m1));
        let split_first = self.identity("bandwidth.split_first".into(), Functional::h(l1 | m1), Functional::h(m1) + c(l1, m1));
        let size_first = self.message_size(1);
        let mut bandwidth = self.combine(
            "bandwidth(1)".into(),
            beta.clone(),
            (b(1) + c(l1, m1)).scale(&self.t(1)),
            premises([
                (&repair_bound, Rational::one()),
                (&union, inv_d.clone()),
                (&decode_first, inv_d.clone()),
                (&split_first, inv_d.clone()),
                (&size_first, inv_d.clone()),
            ]),
        );
        let mut decodes = Vec::new();
        let mut splits = Vec::new();
        let mut sizes = Vec::new();
        let mut bound_sum = b(1).scale(&self.t(1));
        for k in 1..d {
            let (mk, mk1, lk1) = (u.m_upto(k), u.m_upto(k + 1), u.l_upto(k + 1));
            let next_msg = u.m(k + 1);
            let decode = self.dependent(format!("bandwidth.decode({k})"), c(lk1, mk), c(lk1 | next_msg, mk));
            let split = self.identity(format!("bandwidth.split({k})"), c(lk1 | next_msg, mk), c(next_msg, mk) + c(lk1, mk1));
            let size = self.message_size(k + 1);
            let t = self.t(k + 1);
            bound_sum = bound_sum + b(k + 1).scale(&t);
            bandwidth = self.combine(
                format!("bandwidth({})", k + 1),
                beta.clone(),
                bound_sum.clone() + c(lk1, mk1).scale(&t),
                premises([
                    (&bandwidth, Rational::one()),
                    (&level_steps[k - 1], Rational::one()),
                    (&decode, t.clone()),
                    (&split, t.clone()),
                    (&size, t),
                ]),
            );
            decodes.push(decode);
            splits.push(split);
            sizes.push(size);
        }
        let md = u.m_upto(d);
        let residual = self.shannon("bandwidth.residual".into(), c(u.l_upto(d), md), Functional::zero(), ShannonUse::default());
        self.combine(
            "bandwidth_bound".into(),
            beta.clone(),
            bound_sum.clone(),
            premises([(&bandwidth, Rational::one()), (&residual, self.t(d))]),
        );

        let jd = self.j(d as i64);
        let jd1 = self.j(d as i64 - 1);
        let budget = alpha + beta.scale(&jd1);
        let share = jd1.clone() * &inv_d;
        let bounds = self.shannon(
            "storage.bounds".into(),
            budget.clone(),
            Functional::h(w1) + first_sum.scale(&share),
            size_only,
        );
        let decode_node = self.dependent("storage.decode_first".into(), Functional::h(w1), Functional::h(w1 | m1));
        let split_node = self.identity("storage.split_first".into(), Functional::h(w1 | m1), Functional::h(m1) + c(w1, m1));
        let mut storage_sum = b(1).scale(&(jd.clone() * self.t(1)));
        let mut storage = self.combine(
            "storage(1)".into(),
            budget.clone(),
            storage_sum.clone() + c(u.anchor(1), m1) + c(l1, m1).scale(&(jd1.clone() * self.t(1))),
            premises([
                (&bounds, Rational::one()),
                (&union, share.clone()),
                (&decode_first, share.clone()),
                (&split_first, share.clone()),
                (&decode_node, Rational::one()),
                (&split_node, Rational::one()),
                (&size_first, Rational::one() + share),
            ]),
        );
        for k in 1..d {
            let (mk, mk1, lk, lk1, ak1) = (u.m_upto(k), u.m_upto(k + 1), u.l_upto(k), u.l_upto(k + 1), u.anchor(k + 1));
            let next_msg = u.m(k + 1);
            let remaining = self.j((d - 1 - k) as i64);
            let merge = self.combine(
                format!("storage.merge({k})"),
                budget.clone(),
                storage_sum.clone() + c(ak1, mk) + c(lk, mk).scale(&(remaining.clone() * self.t(k))),
                ones(&[&storage, &anchor_steps[k - 1]]),
            );
            let decode = self.dependent(format!("storage.decode({k})"), c(ak1, mk), c(ak1 | next_msg, mk));
            let split = self.identity(format!("storage.split({k})"), c(ak1 | next_msg, mk), c(next_msg, mk) + c(ak1, mk1));
            let weight = remaining.clone() * self.t(k + 1);
            storage_sum = storage_sum + b(k + 1).scale(&(jd.clone() * self.t(k + 1)));
            storage = self.combine(
                format!("storage({})", k + 1),
                budget.clone(),
                storage_sum.clone() + c(ak1, mk1) + c(lk1, mk1).scale(&weight),
                premises([
                    (&merge, Rational::one()),
                    (&level_steps[k - 1], remaining),
                    (&decode, Rational::one()),
                    (&split, Rational::one()),
                    (&decodes[k - 1], weight.clone()),
                    (&splits[k - 1], weight.clone()),
                    (&sizes[k - 1], Rational::one() + weight),
                ]),
            );
        }
        let residual = self.shannon("storage.residual".into(), c(u.anchor(d), md), Functional::zero(), ShannonUse::default());
        self.combine("storage_bound".into(), budget, storage_sum, ones(&[&storage, &residual]));
    }
}

/// Exact facts about the coefficients used by the derivation for repair
/// degree `d`.
pub fn identities(d: usize) -> Vec<Identity> {
    let mut out = Vec::new();
    let di = d as i64;
    let t = |k: usize| t_coeff(d, k).expect("valid level");
    let j = |x: i64| j_sum(x).expect("nonnegative");
    let mut push = |name: String, lhs: Rational, rhs: Rational, expect_equal: bool| {
        out.push(Identity { name, lhs, rhs, expect_equal });
    };
    push(format!("d={d}: first level weight"), t(1), r(1, di), true);
    push(format!("d={d}: storage base weight"), Rational::one() + j(di - 1) * t(1), j(di) * t(1), true);
    for k in 1..d {
        let ki = k as i64;
        let reciprocal = |k: usize| Rational::one() / t(k);
        push(format!("d={d},k={k}: level weight recursion"), reciprocal(k + 1), reciprocal(k) + int(di - ki), true);
        push(format!("d={d},k={k}: remaining pair count"), j(di - ki) - int(di - ki), j(di - 1 - ki), true);
        push(
            format!("d={d},k={k}: storage step weight"),
            Rational::one() + j(di - 1 - ki) * t(k + 1),
            j(di) * t(k + 1),
            true,
        );
        let tail_sum: i64 = (di - ki..=di).sum();
        push(format!("d={d},k={k}: reversed block sum"), Rational::one() / t(k + 1), int(tail_sum), true);
        let node_count = t_coeff(d + 1, k + 1).expect("valid level");
        push(
            format!("d={d},k={k}: storage step weight with node count"),
            (int(tail_sum) + j(di - 1 - ki)) * node_count,
            j(di) * t(k + 1),
            false,
        );
        let width = d - k;
        for jj in 1..=k {
            let total = d + 1 - jj;
            let solutions: Vec<(usize, usize)> = (1..=total)
                .flat_map(|i| (1..=width).map(move |p| (i, p)))
                .filter(|&(i, p)| i * width + p == total)
                .collect();
            push(format!("d={d},k={k},j={jj}: decomposition unique"), int(solutions.len() as i64), Rational::one(), true);
            let (i, p) = decompose(d, k, jj);
            push(
                format!("d={d},k={k},j={jj}: decomposition weight"),
                int(i as i64) + r(p as i64, width as i64),
                r(total as i64, width as i64),
                true,
            );
            let blocks = |first: Vec<usize>| -> Vec<usize> {
                let mut all = first;
                for q in 1..i {
                    let s = jj + p + (q - 1) * width;
                    all.extend(s..s + width);
                }
                all.sort_unstable();
                all
            };
            let plain = blocks((jj..jj + p).collect()) == (jj..=k).collect::<Vec<_>>();
            push(format!("d={d},k={k},j={jj}: sender blocks partition"), int(plain as i64), Rational::one(), true);
            let anchored = blocks(core::iter::once(1).chain(jj + 1..jj + p).collect());
            let ok = anchored == core::iter::once(1).chain(jj + 1..=k).collect::<Vec<_>>();
            push(format!("d={d},k={k},j={jj}: anchored sender blocks partition"), int(ok as i64), Rational::one(), true);
        }
    }
    out
}

pub fn catalog(d: usize) -> Result<Catalog> {
    if d == 0 {
        return Err(Error::InvalidParams("d must be at least 1".into()));
    }
    let universe = Universe::standard(d)?;
    let mut builder = Builder { u: &universe, d, steps: Vec::new() };
    builder.build();
    let steps = builder.steps;
    Ok(Catalog { identities: identities(d), steps, universe })
}

fn canonical(group: &[GroundPerm], f: &Functional) -> Functional {
    f.map_sets(|s| group.iter().map(|p| p.apply(s)).fold(s, |a, b| a.min(b)))
}

/// Decides a step without an LP. Premises of a combination must appear
/// earlier in `steps`; their own validity is not rechecked here.
pub fn check_exact(universe: &Universe, steps: &[Step], index: usize, group: &[GroundPerm]) -> Outcome {
    let step = &steps[index];
    let claim = &step.claim;
    match &step.justification {
        Justification::Shannon(_) => Outcome::NeedsSolver,
        Justification::Symmetry(nodes) => {
            if claim.relation != Relation::Equal {
                return Outcome::Rejected("symmetry gives equalities only".into());
            }
            let perm = match universe.ground_perm(nodes) {
                Ok(p) => p,
                Err(e) => return Outcome::Rejected(format!("bad permutation: {e}")),
            };
            if claim.lhs.map_sets(|s| perm.apply(s)) != claim.rhs {
                return Outcome::Rejected("permutation does not map the left side onto the right side".into());
            }
            if canonical(group, &claim.lhs) != canonical(group, &claim.rhs) {
                return Outcome::Rejected("sides have different canonical forms".into());
            }
            Outcome::Verified
        }
        Justification::Dependency => {
            if claim.relation != Relation::Equal {
                return Outcome::Rejected("dependencies give equalities only".into());
            }
            let deps = universe.dependencies();
            let close = |f: &Functional| f.map_sets(|s| Universe::closure(&deps, s));
            if close(&claim.lhs) == close(&claim.rhs) {
                Outcome::Verified
            } else {
                Outcome::Rejected("closures differ".into())
            }
        }
        Justification::Combination(from) => {
            let earlier: BTreeMap<&str, &Step> = steps[..index].iter().map(|s| (s.name.as_str(), s)).collect();
            let mut sum = Functional::zero();
            for (name, weight) in from {
                let Some(premise) = earlier.get(name.as_str()) else {
                    return Outcome::Rejected(format!("premise {name} is not an earlier step"));
                };
                if premise.claim.relation == Relation::AtLeast {
                    if claim.relation == Relation::Equal {
                        return Outcome::Rejected(format!("equality derived from inequality {name}"));
                    }
                    if weight.is_negative() {
                        return Outcome::Rejected(format!("negative weight on inequality {name}"));
                    }
                }
                sum = sum + premise.claim.difference().scale(weight);
            }
            if sum == claim.difference() {
                Outcome::Verified
            } else {
                let gap = claim.difference() - sum;
                Outcome::Rejected(format!("combination misses by {}", gap.display(universe)))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decomposition_examples() {
        assert_eq!(decompose(3, 1, 1), (1, 1));
        assert_eq!(decompose(3, 2, 1), (2, 1));
        assert_eq!(decompose(3, 2, 2), (1, 1));
        assert_eq!(decompose(5, 2, 1), (1, 2));
        assert_eq!(decompose(5, 2, 2), (1, 1));
        for d in 2..=12 {
            for k in 1..d {
                for j in 1..=k {
                    let (i, p) = decompose(d, k, j);
                    assert!(i >= 1 && (1..=d - k).contains(&p));
                    assert_eq!(i * (d - k) + p, d + 1 - j);
                }
            }
        }
    }

    #[test]
    fn identities_hold_up_to_twelve() {
        for d in 1..=12 {
            for id in identities(d) {
                assert!(id.holds(), "{}: {} vs {}", id.name, id.lhs, id.rhs);
            }
        }
    }

    #[test]
    fn exact_steps_check_for_small_d() {
        for d in 1..=4 {
            let cat = catalog(d).unwrap();
            let group = cat.universe.node_group();
            for (i, step) in cat.steps.iter().enumerate() {
                let outcome = check_exact(&cat.universe, &cat.steps, i, &group);
                match outcome {
                    Outcome::NeedsSolver => {}
                    Outcome::Verified => assert!(step.expect_valid, "{} unexpectedly verified", step.name),
                    Outcome::Rejected(why) => assert!(!step.expect_valid, "{}: {why}", step.name),
                }
            }
        }
    }

    #[test]
    fn names_are_unique() {
        let cat = catalog(3).unwrap();
        let mut names: Vec<&str> = cat.steps.iter().map(|s| s.name.as_str()).collect();
        let before = names.len();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), before);
    }

    #[test]
    fn tampered_combination_is_rejected() {
        let mut cat = catalog(3).unwrap();
        let group = cat.universe.node_group();
        let idx = cat.steps.iter().position(|s| s.name == "bandwidth_bound").unwrap();
        if let Justification::Combination(from) = &mut cat.steps[idx].justification {
            from[1].1 = r(1, 2);
        }
        assert!(matches!(check_exact(&cat.universe, &cat.steps, idx, &group), Outcome::Rejected(_)));
    }

    #[test]
    fn final_bounds_match_closed_form() {
        let cat = catalog(3).unwrap();
        let find = |name: &str| cat.steps.iter().find(|s| s.name == name).unwrap();
        let beta = find("bandwidth_bound");
        let weights: Vec<Rational> = beta.claim.rhs.scalar_terms().map(|(_, c)| c.clone()).collect();
        assert_eq!(weights, [r(1, 3), r(1, 5), r(1, 6)]);
        let storage = find("storage_bound");
        let weights: Vec<Rational> = storage.claim.rhs.scalar_terms().map(|(_, c)| c.clone()).collect();
        assert_eq!(weights, [r(2, 1), r(6, 5), r(1, 1)]);
    }
}
