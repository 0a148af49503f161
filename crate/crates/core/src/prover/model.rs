//! Entropy models over groups of ground variables and the cone programs
//! built from them.
//!
//! A model partitions (part of) a [`Universe`] into at most
//! [`MAX_GROUPS`] groups. A [`ConeProgram`] has one column per joint
//! entropy of a nonempty union of groups, after optional identification of
//! columns, plus scalar columns for standard universes. Every column is
//! nonnegative. Rows are elemental Shannon inequalities and the structural
//! constraints selected by [`ProgramOptions`].

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::Zero;

use super::expr::{Functional, Scalar};
use super::universe::{Dependency, GroundPerm, Universe, VarKind};
use super::varset::VarSet;
use crate::bounds::Rational;
use crate::error::{Error, Result};

pub const MAX_GROUPS: usize = 16;

/// How a structural property enters the program.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Reduction {
    #[default]
    Off,
    /// Equality rows between columns.
    Equalities,
    /// Columns are identified before rows are generated.
    Quotient,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct ProgramOptions {
    pub dependencies: Reduction,
    pub symmetry: Reduction,
    /// Levels' messages are mutually independent.
    pub independence: bool,
    /// Storage and repair bandwidth bound entropies; messages have sizes `B_k`.
    pub size_bounds: bool,
}

impl ProgramOptions {
    /// Elemental inequalities only.
    pub fn shannon() -> Self {
        Self::default()
    }

    /// Every structural constraint, as explicit equality rows.
    pub fn reference() -> Self {
        ProgramOptions {
            dependencies: Reduction::Equalities,
            symmetry: Reduction::Equalities,
            independence: true,
            size_bounds: true,
        }
    }

    /// Every structural constraint, with dependency closure and symmetry
    /// orbits folded into the column space.
    pub fn fast() -> Self {
        ProgramOptions {
            dependencies: Reduction::Quotient,
            symmetry: Reduction::Quotient,
            independence: true,
            size_bounds: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GroundModel {
    universe: Universe,
    groups: Vec<VarSet>,
    names: Vec<String>,
}

impl GroundModel {
    /// One group per ground variable of the standard universe.
    pub fn standard(d: usize) -> Result<Self> {
        let universe = Universe::standard(d)?;
        Self::singletons(universe)
    }

    /// One group per named variable, with no structure.
    pub fn free<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        Self::singletons(Universe::free(names)?)
    }

    fn singletons(universe: Universe) -> Result<Self> {
        if universe.len() > MAX_GROUPS {
            return Err(Error::ModelTooLarge { vars: universe.len(), limit: MAX_GROUPS });
        }
        let groups = (0..universe.len()).map(VarSet::singleton).collect();
        let names = (0..universe.len()).map(|i| String::from(universe.name(i))).collect();
        Ok(GroundModel { universe, groups, names })
    }

    /// Named, pairwise disjoint, nonempty groups.
    pub fn grouped(universe: Universe, groups: Vec<(String, VarSet)>) -> Result<Self> {
        if groups.is_empty() {
            return Err(Error::InvalidGrouping("no groups".into()));
        }
        if groups.len() > MAX_GROUPS {
            return Err(Error::ModelTooLarge { vars: groups.len(), limit: MAX_GROUPS });
        }
        let mut seen = VarSet::EMPTY;
        for (name, set) in &groups {
            if set.is_empty() {
                return Err(Error::InvalidGrouping(format!("group {name} is empty")));
            }
            if !set.is_subset(universe.all()) {
                return Err(Error::InvalidGrouping(format!("group {name} is outside the universe")));
            }
            if !(*set & seen).is_empty() {
                return Err(Error::InvalidGrouping(format!("group {name} overlaps an earlier group")));
            }
            seen |= *set;
        }
        let (names, groups) = groups.into_iter().unzip();
        Ok(GroundModel { universe, groups, names })
    }

    /// Groups are the atoms of the Boolean algebra generated by `sets` and
    /// the parts of `refine` inside their union.
    pub fn auto(universe: Universe, sets: &[VarSet], refine: &[VarSet]) -> Result<Self> {
        let union = sets.iter().fold(VarSet::EMPTY, |a, &b| a | b);
        if union.is_empty() {
            return Err(Error::InvalidGrouping("expression mentions no variables".into()));
        }
        let mut regions = alloc::vec![union];
        for &cut in sets.iter().chain(refine) {
            regions = regions
                .into_iter()
                .flat_map(|r| [r & cut, r - cut])
                .filter(|r| !r.is_empty())
                .collect();
        }
        regions.sort();
        let named = regions.into_iter().map(|r| (format!("{{{}}}", universe.describe(r)), r)).collect();
        Self::grouped(universe, named)
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn groups(&self) -> &[VarSet] {
        &self.groups
    }

    pub fn group_names(&self) -> &[String] {
        &self.names
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    /// Union of the groups selected by `mask`.
    pub fn ground(&self, mask: u32) -> VarSet {
        self.groups
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .fold(VarSet::EMPTY, |a, (_, &g)| a | g)
    }

    /// Mask of the groups whose union is `set`, if `set` is such a union.
    pub fn mask_of(&self, set: VarSet) -> Option<u32> {
        let mut mask = 0u32;
        let mut covered = VarSet::EMPTY;
        for (i, &g) in self.groups.iter().enumerate() {
            if g.is_subset(set) {
                mask |= 1 << i;
                covered |= g;
            }
        }
        (covered == set).then_some(mask)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Column {
    /// Joint entropy of this ground set (a representative of its class).
    Entropy(VarSet),
    Scalar(Scalar),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RowLabel {
    /// `H(group | every other group) >= 0`.
    Conditional { group: usize },
    /// `I(a; b | given) >= 0`, with `given` a group mask.
    Mutual { a: usize, b: usize, given: u32 },
    /// `H(closure) = H(set)`.
    Dependency { set: VarSet, closure: VarSet },
    /// `H(set) = H(image)` for a node permutation mapping one to the other.
    Symmetry { set: VarSet, image: VarSet },
    /// `H(M_1, ..) = H(M_1) + ..` over the listed messages.
    Independence(VarSet),
    /// `alpha >= H(W_i)`.
    Storage(VarSet),
    /// `beta >= H(S_{j,k})`.
    Repair(VarSet),
    /// `H(M_k) = B_k`.
    MessageSize(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub label: RowLabel,
    pub equality: bool,
    /// Sorted by column, no zero coefficients.
    pub coeffs: Vec<(u32, i32)>,
}

const NO_COLUMN: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct ConeProgram {
    model: GroundModel,
    options: ProgramOptions,
    deps: Vec<Dependency>,
    perms: Vec<GroundPerm>,
    columns: Vec<Column>,
    rows: Vec<Row>,
    col_of_mask: Vec<u32>,
    key_index: BTreeMap<VarSet, u32>,
    scalar_index: BTreeMap<Scalar, u32>,
}

struct RowSink {
    rows: Vec<Row>,
    seen: BTreeSet<(bool, Vec<(u32, i32)>)>,
}

impl RowSink {
    fn push(&mut self, label: RowLabel, equality: bool, terms: &[(u32, i32)]) {
        let mut acc: BTreeMap<u32, i32> = BTreeMap::new();
        for &(c, v) in terms {
            if c != NO_COLUMN {
                *acc.entry(c).or_insert(0) += v;
            }
        }
        let mut coeffs: Vec<(u32, i32)> = acc.into_iter().filter(|&(_, v)| v != 0).collect();
        if coeffs.is_empty() {
            return;
        }
        if equality && coeffs[0].1 < 0 {
            coeffs.iter_mut().for_each(|c| c.1 = -c.1);
        }
        if self.seen.insert((equality, coeffs.clone())) {
            self.rows.push(Row { label, equality, coeffs });
        }
    }
}

impl ConeProgram {
    pub fn build(model: &GroundModel, options: ProgramOptions) -> Result<Self> {
        let universe = model.universe();
        let deps = if options.dependencies != Reduction::Off { universe.dependencies() } else { Vec::new() };
        let perms = if options.symmetry != Reduction::Off {
            universe.node_group().into_iter().filter(|p| !p.is_identity()).collect()
        } else {
            Vec::new()
        };
        let mut program = ConeProgram {
            model: model.clone(),
            options,
            deps,
            perms,
            columns: Vec::new(),
            rows: Vec::new(),
            col_of_mask: Vec::new(),
            key_index: BTreeMap::new(),
            scalar_index: BTreeMap::new(),
        };
        program.layout_columns();
        let mut sink = RowSink { rows: Vec::new(), seen: BTreeSet::new() };
        program.elemental_rows(&mut sink);
        if options.dependencies == Reduction::Equalities {
            program.dependency_rows(&mut sink);
        }
        if options.symmetry == Reduction::Equalities {
            program.symmetry_rows(&mut sink);
        }
        if options.independence {
            program.independence_rows(&mut sink);
        }
        if options.size_bounds {
            program.size_rows(&mut sink);
        }
        program.rows = sink.rows;
        Ok(program)
    }

    pub fn model(&self) -> &GroundModel {
        &self.model
    }

    pub fn options(&self) -> ProgramOptions {
        self.options
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    /// Class representative of a ground set under the active quotients.
    fn key(&self, set: VarSet) -> VarSet {
        let mut key = set;
        if self.options.dependencies == Reduction::Quotient {
            key = Universe::closure(&self.deps, key);
        }
        if self.options.symmetry == Reduction::Quotient {
            key = self.perms.iter().map(|p| p.apply(key)).fold(key, |a, b| a.min(b));
        }
        key
    }

    fn layout_columns(&mut self) {
        let n = self.model.group_count();
        self.col_of_mask = alloc::vec![NO_COLUMN; 1 << n];
        for mask in 1u32..(1 << n) {
            let ground = self.model.ground(mask);
            let key = self.key(ground);
            let next = self.columns.len() as u32;
            let col = *self.key_index.entry(key).or_insert(next);
            if col == next {
                self.columns.push(Column::Entropy(ground));
            }
            self.col_of_mask[mask as usize] = col;
        }
        if self.model.universe().is_standard() {
            let d = self.model.universe().d();
            let scalars = [Scalar::Alpha, Scalar::Beta].into_iter().chain((1..=d).map(Scalar::Message));
            for s in scalars {
                self.scalar_index.insert(s, self.columns.len() as u32);
                self.columns.push(Column::Scalar(s));
            }
        }
    }

    fn col(&self, mask: u32) -> u32 {
        self.col_of_mask[mask as usize]
    }

    /// Column holding `H(set)`, if the set is expressible in this program.
    pub fn column_of_set(&self, set: VarSet) -> Option<u32> {
        if let Some(mask) = self.model.mask_of(set) {
            return (mask != 0).then(|| self.col(mask));
        }
        if self.options.dependencies == Reduction::Quotient || self.options.symmetry == Reduction::Quotient {
            return self.key_index.get(&self.key(set)).copied();
        }
        None
    }

    pub fn column_of_scalar(&self, s: Scalar) -> Option<u32> {
        self.scalar_index.get(&s).copied()
    }

    fn elemental_rows(&self, sink: &mut RowSink) {
        let n = self.model.group_count();
        let full = (1u32 << n) - 1;
        for i in 0..n {
            let rest = full & !(1 << i);
            sink.push(RowLabel::Conditional { group: i }, false, &[(self.col(full), 1), (self.col(rest), -1)]);
        }
        for a in 0..n {
            for b in a + 1..n {
                let others = full & !(1 << a) & !(1 << b);
                let mut given = others;
                loop {
                    let terms = [
                        (self.col(given | 1 << a), 1),
                        (self.col(given | 1 << b), 1),
                        (self.col(given | 1 << a | 1 << b), -1),
                        (self.col(given), -1),
                    ];
                    sink.push(RowLabel::Mutual { a, b, given }, false, &terms);
                    if given == 0 {
                        break;
                    }
                    given = (given - 1) & others;
                }
            }
        }
    }

    fn dependency_rows(&self, sink: &mut RowSink) {
        let n = self.model.group_count();
        for mask in 1u32..(1 << n) {
            let set = self.model.ground(mask);
            let closure = Universe::closure(&self.deps, set);
            let inside = (0..n).filter(|&i| self.model.groups()[i].is_subset(closure)).fold(0u32, |m, i| m | 1 << i);
            if inside != mask {
                let label = RowLabel::Dependency { set, closure: self.model.ground(inside) };
                sink.push(label, true, &[(self.col(inside), 1), (self.col(mask), -1)]);
            }
        }
    }

    fn symmetry_rows(&self, sink: &mut RowSink) {
        let cols = self.columns.len();
        let mut parent: Vec<u32> = (0..cols as u32).collect();
        fn find(parent: &mut [u32], mut x: u32) -> u32 {
            while parent[x as usize] != x {
                parent[x as usize] = parent[parent[x as usize] as usize];
                x = parent[x as usize];
            }
            x
        }
        for (c, column) in self.columns.iter().enumerate() {
            let Column::Entropy(set) = *column else { continue };
            for p in &self.perms {
                if let Some(other) = self.column_of_set(p.apply(set)) {
                    let (ra, rb) = (find(&mut parent, c as u32), find(&mut parent, other));
                    if ra != rb {
                        parent[ra.max(rb) as usize] = ra.min(rb);
                    }
                }
            }
        }
        for c in 0..cols as u32 {
            let root = find(&mut parent, c);
            if root != c {
                let (Column::Entropy(set), Column::Entropy(image)) = (self.columns[c as usize], self.columns[root as usize])
                else {
                    continue;
                };
                sink.push(RowLabel::Symmetry { set, image }, true, &[(c, 1), (root, -1)]);
            }
        }
    }

    fn independence_rows(&self, sink: &mut RowSink) {
        let universe = self.model.universe();
        let messages: Vec<VarSet> = (1..=universe.d())
            .map(|k| universe.m(k))
            .filter(|&m| self.model.mask_of(m).is_some())
            .collect();
        if messages.len() < 2 {
            return;
        }
        let union = messages.iter().fold(VarSet::EMPTY, |a, &b| a | b);
        let Some(joint) = self.column_of_set(union) else { return };
        let mut terms: Vec<(u32, i32)> = messages.iter().filter_map(|&m| self.column_of_set(m)).map(|c| (c, 1)).collect();
        terms.push((joint, -1));
        sink.push(RowLabel::Independence(union), true, &terms);
    }

    fn size_rows(&self, sink: &mut RowSink) {
        let universe = self.model.universe();
        if !universe.is_standard() {
            return;
        }
        let alpha = self.scalar_index[&Scalar::Alpha];
        let beta = self.scalar_index[&Scalar::Beta];
        for i in 0..universe.len() {
            let set = VarSet::singleton(i);
            let Some(col) = self.model.mask_of(set).map(|m| self.col(m)) else { continue };
            match universe.kind(i) {
                VarKind::Node(_) => sink.push(RowLabel::Storage(set), false, &[(alpha, 1), (col, -1)]),
                VarKind::Repair { .. } => sink.push(RowLabel::Repair(set), false, &[(beta, 1), (col, -1)]),
                VarKind::Message(k) => {
                    let b = self.scalar_index[&Scalar::Message(k)];
                    sink.push(RowLabel::MessageSize(k), true, &[(col, 1), (b, -1)])
                }
                VarKind::Free => {}
            }
        }
    }

    /// Dense coefficient vector of `f` over the columns.
    pub fn target(&self, f: &Functional) -> Result<Vec<Rational>> {
        let mut out = alloc::vec![Rational::zero(); self.columns.len()];
        for (set, c) in f.entropy_terms() {
            let col = self.column_of_set(set).ok_or_else(|| {
                Error::InvalidGrouping(format!("H({}) is not a union of groups", self.model.universe().describe(set)))
            })?;
            out[col as usize] += c;
        }
        for (s, c) in f.scalar_terms() {
            let col = self
                .column_of_scalar(s)
                .ok_or_else(|| Error::UnknownName(super::expr::scalar_name(s)))?;
            out[col as usize] += c;
        }
        Ok(out)
    }

    /// Human-readable form of a row, `... >= 0` or `... = 0`.
    pub fn describe_row(&self, row: &Row) -> String {
        let mut f = Functional::zero();
        for &(c, v) in &row.coeffs {
            let coeff = Rational::from_integer(v.into());
            match self.columns[c as usize] {
                Column::Entropy(set) => f.add_entropy(set, coeff),
                Column::Scalar(s) => f.add_scalar(s, coeff),
            }
        }
        let rel = if row.equality { "=" } else { ">=" };
        format!("{} {rel} 0", f.display(self.model.universe()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn elemental_row_count_matches_formula() {
        for n in 1..=6usize {
            let names: Vec<String> = (0..n).map(|i| format!("X{i}")).collect();
            let model = GroundModel::free(&names).unwrap();
            let program = ConeProgram::build(&model, ProgramOptions::shannon()).unwrap();
            let expected = n + binom(n, 2) * (1 << n.saturating_sub(2));
            assert_eq!(program.rows().len(), expected, "n = {n}");
            assert_eq!(program.columns().len(), (1 << n) - 1);
        }
    }

    #[test]
    fn standard_model_sizes() {
        let m1 = GroundModel::standard(1).unwrap();
        assert_eq!(m1.group_count(), 5);
        let m2 = GroundModel::standard(2).unwrap();
        assert_eq!(m2.group_count(), 11);
        let program = ConeProgram::build(&m2, ProgramOptions::shannon()).unwrap();
        assert_eq!(program.rows().len(), 11 + 55 * 512);
        assert!(matches!(GroundModel::standard(3), Err(Error::ModelTooLarge { vars: 19, .. })));
    }

    #[test]
    fn quotient_shrinks_column_space() {
        let model = GroundModel::standard(2).unwrap();
        let full = ConeProgram::build(&model, ProgramOptions::reference()).unwrap();
        let fast = ConeProgram::build(&model, ProgramOptions::fast()).unwrap();
        assert_eq!(full.columns().len(), 2047 + 4);
        assert!(fast.columns().len() < full.columns().len() / 10);
        // W_1 and W_2 are exchanged by a transposition; a node's content
        // determines everything it sends.
        let u = model.universe();
        assert_eq!(fast.column_of_set(u.w(1)), fast.column_of_set(u.w(2)));
        assert_eq!(fast.column_of_set(u.w(1)), fast.column_of_set(u.w(1) | u.s(1, 3)));
        assert_ne!(full.column_of_set(u.w(1)), full.column_of_set(u.w(2)));
    }

    #[test]
    fn auto_groups_are_venn_regions() {
        let u = Universe::free(&["A", "B", "C", "D"]).unwrap();
        let set = |names: &[&str]| names.iter().fold(VarSet::EMPTY, |a, n| a | u.resolve(n).unwrap());
        let model = GroundModel::auto(u.clone(), &[set(&["A", "B"]), set(&["B", "C"])], &[]).unwrap();
        assert_eq!(model.groups(), [set(&["A"]), set(&["B"]), set(&["C"])]);
        assert_eq!(model.mask_of(set(&["A", "B"])).map(|m| m.count_ones()), Some(2));
        assert_eq!(model.mask_of(set(&["D"])), None);
    }

    #[test]
    fn grouping_errors() {
        let u = Universe::free(&["A", "B"]).unwrap();
        let a = u.resolve("A").unwrap();
        let overlap = GroundModel::grouped(u.clone(), alloc::vec![("x".into(), a), ("y".into(), a)]);
        assert!(matches!(overlap, Err(Error::InvalidGrouping(_))));
        let empty = GroundModel::grouped(u, alloc::vec![("x".into(), VarSet::EMPTY)]);
        assert!(matches!(empty, Err(Error::InvalidGrouping(_))));
    }

    #[test]
    fn target_rejects_split_groups() {
        let u = Universe::free(&["A", "B"]).unwrap();
        let ab = u.all();
        let model = GroundModel::grouped(u.clone(), alloc::vec![("ab".into(), ab)]).unwrap();
        let program = ConeProgram::build(&model, ProgramOptions::shannon()).unwrap();
        assert!(program.target(&Functional::h(ab)).is_ok());
        assert!(program.target(&Functional::h(u.resolve("A").unwrap())).is_err());
    }
}
