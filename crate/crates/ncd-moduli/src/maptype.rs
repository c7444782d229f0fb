//! Decorated map types into a level building and their validators.
//!
//! A map type lists domain components with the piece each one lands in, the
//! special points on each component with their contact records, the nodes
//! (pairs of special points) and, for every point of the collapsed base
//! curve, the fiber: the chain of trivial components inserted there.

use crate::building::{Levels, PieceLabel, Sign};
use crate::divisor::{CombinatorialDivisor, Stratum};
use crate::exactnum::{solve_power_system, ExactNonzeroComplex, IntegerMatrix, PowerSystemSolution};
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Contact data of one point with one local branch.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotContact {
    /// Contact order; `None` when the component lies inside the branch.
    pub s: Option<u32>,
    pub sign: Sign,
    pub level: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeff: Option<ExactNonzeroComplex>,
    /// The coefficient is a formal extension in a direction where the
    /// component is constant.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub formal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContactRecord {
    pub stratum: String,
    #[serde(default)]
    pub slots: Vec<SlotContact>,
}

impl ContactRecord {
    pub fn depth(&self) -> usize {
        self.slots.len()
    }

    /// `|s(x)|`, with undefined orders counted as zero.
    pub fn degree(&self) -> u64 {
        self.slots.iter().map(|c| c.s.unwrap_or(0) as u64).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecialPoint {
    pub id: String,
    pub contact: ContactRecord,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub id: String,
    pub genus: u32,
    pub trivial: bool,
    pub piece: PieceLabel,
    pub points: Vec<SpecialPoint>,
}

/// The preimage of one base point: a chain of trivial components between
/// `start` and `end`. For a node the ends are its two sides on nontrivial
/// components; for a marked point `end` is the marked point itself.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fiber {
    pub base: String,
    pub start: String,
    pub end: String,
    #[serde(default)]
    pub trivial: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapType {
    pub divisor: CombinatorialDivisor,
    pub levels: Levels,
    pub components: Vec<Component>,
    #[serde(default)]
    pub nodes: Vec<[String; 2]>,
    #[serde(default)]
    pub fibers: Vec<Fiber>,
    #[serde(rename = "c1A")]
    pub c1a: i64,
    #[serde(rename = "AV")]
    pub av: i64,
    pub chi: i64,
    pub ell: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("point `{point}`: {reason}")]
    Contact { point: String, reason: String },
    #[error("component `{component}`: {reason}")]
    Component { component: String, reason: String },
    #[error("trivial component `{component}`: coefficients in slot {slot} are not reciprocal")]
    Reciprocity { component: String, slot: usize },
    #[error("point `{0}` belongs to more than one node")]
    NodeReuse(String),
    #[error("marked point `{0}` lies on an infinity divisor")]
    MarkedAtInfinity(String),
    #[error("fiber `{base}`: {reason}")]
    Fiber { base: String, reason: String },
    #[error("contact degrees of marked points sum to {found}, AV = {expected}")]
    Degree { expected: i64, found: u64 },
    #[error("node {node}: image strata `{left}` and `{right}` differ")]
    NaiveStratum { node: String, left: String, right: String },
    #[error("node {node}, slot {slot}: multiplicity {left:?} vs {right:?}")]
    NaiveMultiplicity { node: String, slot: usize, left: Option<u32>, right: Option<u32> },
    #[error("node {node}, slot {slot}: signs are not opposite")]
    NaiveSign { node: String, slot: usize },
    #[error("node {node}, slot {slot}: zero side on level {plus} does not meet infinity side on level {minus}")]
    NaiveLevel { node: String, slot: usize, plus: u32, minus: u32 },
    #[error("fiber `{base}`, direction {direction}: {reason}")]
    Cylinder { base: String, direction: usize, reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum MapTypeError {
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("point `{point}` slot {slot} carries no coefficient")]
    Undecorated { point: String, slot: usize },
    #[error("point `{point}` slot {slot} has undefined multiplicity")]
    Undefined { point: String, slot: usize },
    #[error("invalid fiber `{0}`")]
    Fiber(String),
}

fn node_name(n: &[String; 2]) -> String {
    format!("{}={}", n[0], n[1])
}

/// A node of a fiber, oriented from the start of the chain to its end.
#[derive(Clone, Copy, Debug)]
pub struct ChainNode<'a> {
    /// Index into [`MapType::nodes`].
    pub index: usize,
    pub lower: &'a SpecialPoint,
    pub upper: &'a SpecialPoint,
}

/// A fiber resolved against the map type.
#[derive(Clone, Debug)]
pub struct Chain<'a> {
    pub fiber: &'a Fiber,
    /// Stratum of the start point; directions are its slots.
    pub frame: &'a Stratum,
    pub nodes: Vec<ChainNode<'a>>,
    pub trivial: Vec<&'a Component>,
    pub marked_end: bool,
}

/// A maximal run of consecutive chain nodes that stay together after the
/// components constant in one direction are contracted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    /// Positions in [`Chain::nodes`].
    pub nodes: Vec<usize>,
    /// Nodes that change level in this direction, with the level reached.
    pub steps: Vec<(usize, u32)>,
    /// Trailing block absorbed into a marked end.
    pub end: bool,
}

impl MapType {
    pub fn point(&self, id: &str) -> Option<(&Component, &SpecialPoint)> {
        self.components.iter().find_map(|c| c.points.iter().find(|p| p.id == id).map(|p| (c, p)))
    }

    pub fn component(&self, id: &str) -> Option<&Component> {
        self.components.iter().find(|c| c.id == id)
    }

    /// The other side of the node through `point`, if any.
    pub fn partner(&self, point: &str) -> Option<&str> {
        self.nodes.iter().find_map(|[a, b]| {
            if a == point {
                Some(b.as_str())
            } else if b == point {
                Some(a.as_str())
            } else {
                None
            }
        })
    }

    /// Points that are not sides of a node.
    pub fn marked_points(&self) -> Vec<&SpecialPoint> {
        let in_nodes: BTreeSet<&str> = self.nodes.iter().flat_map(|n| n.iter().map(String::as_str)).collect();
        self.components.iter().flat_map(|c| c.points.iter()).filter(|p| !in_nodes.contains(p.id.as_str())).collect()
    }

    fn slot_bound(&self, stratum: &Stratum, i: usize) -> u32 {
        self.levels.bound(&self.divisor, &stratum.slots[i])
    }

    /// Level group of direction `i` in `frame`: 0 for a single level count,
    /// the component index for per-component levels.
    pub fn direction_group(&self, frame: &Stratum, i: usize) -> usize {
        match self.levels {
            Levels::Uniform(_) => 0,
            Levels::PerComponent(_) => self.divisor.component_index(&frame.slots[i]).unwrap_or(0),
        }
    }

    /// Level groups with their bounds.
    pub fn level_groups(&self) -> Vec<u32> {
        match &self.levels {
            Levels::Uniform(m) => vec![*m],
            Levels::PerComponent(v) => v.clone(),
        }
    }

    /// Entries of `rec` indexed by the slots of `frame`. Records on the same
    /// stratum align positionally; otherwise slots are matched by component
    /// when the component occurs once on both sides.
    pub fn align<'a>(&self, frame: &Stratum, rec: &'a ContactRecord) -> Vec<Option<&'a SlotContact>> {
        if rec.stratum == frame.id {
            return (0..frame.slots.len()).map(|i| rec.slots.get(i)).collect();
        }
        let Some(rs) = self.divisor.stratum(&rec.stratum) else {
            return vec![None; frame.slots.len()];
        };
        frame
            .slots
            .iter()
            .map(|c| {
                let once = |v: &[String]| v.iter().filter(|x| *x == c).count() == 1;
                if once(&frame.slots) && once(&rs.slots) {
                    rs.slots.iter().position(|x| x == c).and_then(|j| rec.slots.get(j))
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn validate_structure(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut ids = BTreeSet::new();
        for c in &self.components {
            if !ids.insert(c.id.as_str()) {
                out.push(Violation::DuplicateId(c.id.clone()));
            }
        }
        let mut pids = BTreeSet::new();
        for p in self.components.iter().flat_map(|c| &c.points) {
            if !pids.insert(p.id.as_str()) {
                out.push(Violation::DuplicateId(p.id.clone()));
            }
        }
        for c in &self.components {
            self.check_component(c, &mut out);
        }
        let mut used = BTreeSet::new();
        for n in &self.nodes {
            for p in n {
                if self.point(p).is_none() {
                    out.push(Violation::UnknownPoint(p.clone()));
                }
                if !used.insert(p.as_str()) {
                    out.push(Violation::NodeReuse(p.clone()));
                }
            }
        }
        for p in self.marked_points() {
            if p.contact.slots.iter().any(|e| e.sign == Sign::Minus) {
                out.push(Violation::MarkedAtInfinity(p.id.clone()));
            }
        }
        self.check_fiber_cover(&mut out);
        let found: u64 = self.marked_points().iter().map(|p| p.contact.degree()).sum();
        if found as i64 != self.av {
            out.push(Violation::Degree { expected: self.av, found });
        }
        out
    }

    fn check_component(&self, c: &Component, out: &mut Vec<Violation>) {
        let bad = |reason: String| Violation::Component { component: c.id.clone(), reason };
        match self.divisor.stratum(&c.piece.stratum) {
            None => out.push(bad(format!("unknown piece stratum `{}`", c.piece.stratum))),
            Some(s) => {
                if s.slots.len() != c.piece.levels.len() {
                    out.push(bad(format!("piece has {} levels for {} slots", c.piece.levels.len(), s.slots.len())));
                } else if let Some(i) = (0..s.slots.len()).find(|&i| c.piece.levels[i] > self.slot_bound(s, i)) {
                    out.push(bad(format!("piece level {} in slot {i} exceeds the building", c.piece.levels[i])));
                }
            }
        }
        for p in &c.points {
            self.check_contact(c, p, out);
        }
        if c.trivial {
            if c.genus != 0 {
                out.push(bad("trivial component of positive genus".into()));
            }
            if c.points.len() != 2 {
                out.push(bad(format!("trivial component with {} special points", c.points.len())));
            } else if let Some(frame) = self.divisor.stratum(&c.points[0].contact.stratum) {
                let a = self.align(frame, &c.points[0].contact);
                let b = self.align(frame, &c.points[1].contact);
                for (slot, (x, y)) in a.iter().zip(&b).enumerate() {
                    if let (Some(Some(u)), Some(Some(v))) = (x.map(|e| e.coeff.as_ref()), y.map(|e| e.coeff.as_ref())) {
                        if !u.mul(v).is_one() {
                            out.push(Violation::Reciprocity { component: c.id.clone(), slot });
                        }
                    }
                }
            }
        } else if let Some(p) = c.points.iter().find(|p| p.contact.slots.iter().any(|e| e.s.is_none())) {
            out.push(bad(format!("nontrivial component has undefined multiplicity at `{}`", p.id)));
        }
    }

    fn check_contact(&self, c: &Component, p: &SpecialPoint, out: &mut Vec<Violation>) {
        let bad = |reason: String| Violation::Contact { point: p.id.clone(), reason };
        let Some(s) = self.divisor.stratum(&p.contact.stratum) else {
            out.push(bad(format!("unknown stratum `{}`", p.contact.stratum)));
            return;
        };
        if s.slots.len() != p.contact.slots.len() {
            out.push(bad(format!("{} entries for a depth-{} stratum", p.contact.slots.len(), s.depth)));
            return;
        }
        for (i, e) in p.contact.slots.iter().enumerate() {
            if e.level > self.slot_bound(s, i) {
                out.push(bad(format!("level {} in slot {i} exceeds the building", e.level)));
            }
            if e.sign == Sign::Minus && e.level == 0 {
                out.push(bad(format!("slot {i} is an infinity side on level 0")));
            }
            if e.s == Some(0) {
                out.push(bad(format!("slot {i} has contact order 0")));
            }
            if e.formal && !c.trivial {
                out.push(bad(format!("formal entry in slot {i} on a nontrivial component")));
            }
        }
    }

    fn check_fiber_cover(&self, out: &mut Vec<Violation>) {
        let mut node_seen: BTreeMap<usize, usize> = BTreeMap::new();
        let mut comp_seen: BTreeMap<&str, usize> = BTreeMap::new();
        let mut marked_seen: BTreeMap<&str, usize> = BTreeMap::new();
        for f in &self.fibers {
            match self.chain(f) {
                Ok(ch) => {
                    for n in &ch.nodes {
                        *node_seen.entry(n.index).or_default() += 1;
                    }
                    for t in &ch.trivial {
                        *comp_seen.entry(t.id.as_str()).or_default() += 1;
                    }
                    if ch.marked_end {
                        *marked_seen.entry(f.end.as_str()).or_default() += 1;
                    }
                }
                Err(reason) => out.push(Violation::Fiber { base: f.base.clone(), reason }),
            }
        }
        for (i, n) in self.nodes.iter().enumerate() {
            if node_seen.get(&i).copied().unwrap_or(0) != 1 {
                out.push(Violation::Fiber { base: node_name(n), reason: "node is not in exactly one fiber".into() });
            }
        }
        for c in self.components.iter().filter(|c| c.trivial) {
            if comp_seen.get(c.id.as_str()).copied().unwrap_or(0) != 1 {
                out.push(Violation::Component { component: c.id.clone(), reason: "trivial component is not in exactly one fiber".into() });
            }
        }
        for p in self.marked_points() {
            if marked_seen.get(p.id.as_str()).copied().unwrap_or(0) != 1 {
                out.push(Violation::Fiber { base: p.id.clone(), reason: "marked point is not the end of exactly one fiber".into() });
            }
        }
    }

    /// Walk a fiber from its start through its trivial components.
    pub fn chain<'a>(&'a self, f: &'a Fiber) -> Result<Chain<'a>, String> {
        let (start_c, start) = self.point(&f.start).ok_or_else(|| format!("unknown start `{}`", f.start))?;
        if start_c.trivial {
            return Err("fiber starts on a trivial component".into());
        }
        let frame = self.divisor.stratum(&start.contact.stratum).ok_or("start has an unknown stratum")?;
        let node_index = |a: &str, b: &str| {
            self.nodes.iter().position(|[x, y]| (x == a && y == b) || (x == b && y == a))
        };
        let mut cur = start;
        let mut nodes = Vec::new();
        let mut trivial = Vec::new();
        for tid in &f.trivial {
            let t = self.component(tid).ok_or_else(|| format!("unknown component `{tid}`"))?;
            if !t.trivial || t.points.len() != 2 {
                return Err(format!("`{tid}` is not a two-pointed trivial component"));
            }
            let next = self.partner(&cur.id).ok_or_else(|| format!("`{}` is not a node side", cur.id))?;
            let (a, b) = if t.points[0].id == next {
                (&t.points[0], &t.points[1])
            } else if t.points[1].id == next {
                (&t.points[1], &t.points[0])
            } else {
                return Err(format!("`{}` does not continue into `{tid}`", cur.id));
            };
            nodes.push(ChainNode { index: node_index(&cur.id, &a.id).expect("partner node"), lower: cur, upper: a });
            trivial.push(t);
            cur = b;
        }
        let marked_end = cur.id == f.end;
        if marked_end {
            if self.partner(&f.end).is_some() {
                return Err(format!("end `{}` is a node side", f.end));
            }
        } else {
            let (end_c, end) = self.point(&f.end).ok_or_else(|| format!("unknown end `{}`", f.end))?;
            if end_c.trivial {
                return Err("node fiber ends on a trivial component".into());
            }
            match self.partner(&cur.id) {
                Some(p) if p == f.end => {}
                _ => return Err(format!("`{}` is not joined to the end `{}`", cur.id, f.end)),
            }
            nodes.push(ChainNode { index: node_index(&cur.id, &end.id).expect("partner node"), lower: cur, upper: end });
        }
        Ok(Chain { fiber: f, frame, nodes, trivial, marked_end })
    }

    /// Naive matching at every node: equal image strata, equal contact
    /// orders, opposite signs across genuine (non-formal) entries.
    pub fn check_naive(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for n in &self.nodes {
            let (Some((_, a)), Some((_, b))) = (self.point(&n[0]), self.point(&n[1])) else {
                continue;
            };
            let node = node_name(n);
            if a.contact.stratum != b.contact.stratum {
                out.push(Violation::NaiveStratum { node, left: a.contact.stratum.clone(), right: b.contact.stratum.clone() });
                continue;
            }
            for (slot, (x, y)) in a.contact.slots.iter().zip(&b.contact.slots).enumerate() {
                if x.s.is_none() || y.s.is_none() || x.s != y.s {
                    out.push(Violation::NaiveMultiplicity { node: node.clone(), slot, left: x.s, right: y.s });
                }
                if x.formal || y.formal {
                    continue;
                }
                if x.sign == Sign::Zero || x.sign != y.sign.opposite() {
                    out.push(Violation::NaiveSign { node: node.clone(), slot });
                    continue;
                }
                let (plus, minus) = if x.sign == Sign::Plus { (x, y) } else { (y, x) };
                if plus.level + 1 != minus.level {
                    out.push(Violation::NaiveLevel { node: node.clone(), slot, plus: plus.level, minus: minus.level });
                }
            }
        }
        out
    }

    /// Level change of a chain node in direction `i`: `(later − earlier, level)`
    /// where the level is the higher of the two sides.
    pub fn step(&self, frame: &Stratum, n: &ChainNode<'_>, i: usize) -> Option<(i64, u32)> {
        let lo = self.align(frame, &n.lower.contact)[i]?;
        let hi = self.align(frame, &n.upper.contact)[i]?;
        Some((hi.level as i64 - lo.level as i64, lo.level.max(hi.level)))
    }

    /// True when a trivial component is constant in direction `i`.
    pub fn formal_in(&self, frame: &Stratum, t: &Component, i: usize) -> bool {
        t.points.iter().any(|p| self.align(frame, &p.contact)[i].is_some_and(|e| e.formal))
    }

    /// Blocks of a chain in direction `i`. Consecutive nodes stay together
    /// when the trivial component between them is constant in `i`.
    pub fn blocks(&self, ch: &Chain<'_>, i: usize) -> Vec<Block> {
        let mut out: Vec<Block> = Vec::new();
        let mut cur = Block { nodes: vec![], steps: vec![], end: false };
        for (k, n) in ch.nodes.iter().enumerate() {
            cur.nodes.push(k);
            if let Some((d, l)) = self.step(ch.frame, n, i) {
                if d != 0 {
                    cur.steps.push((k, l));
                }
            }
            let after = ch.trivial.get(k);
            let joined = after.is_some_and(|t| self.formal_in(ch.frame, t, i));
            if !joined {
                out.push(std::mem::replace(&mut cur, Block { nodes: vec![], steps: vec![], end: false }));
            } else if k + 1 == ch.nodes.len() {
                cur.end = true;
                out.push(std::mem::replace(&mut cur, Block { nodes: vec![], steps: vec![], end: false }));
            }
        }
        out
    }

    /// Number of trivial components inserted over a base point.
    pub fn stretch(&self, base: &str) -> Option<usize> {
        self.fibers.iter().find(|f| f.base == base).map(|f| f.trivial.len())
    }

    /// Chain shape, monotone level changes and one step per level in every
    /// direction.
    pub fn check_broken_cylinders(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for f in &self.fibers {
            let ch = match self.chain(f) {
                Ok(ch) => ch,
                Err(reason) => {
                    out.push(Violation::Fiber { base: f.base.clone(), reason });
                    continue;
                }
            };
            let bad = |direction: usize, reason: String| Violation::Cylinder { base: f.base.clone(), direction, reason };
            let k = ch.frame.slots.len();
            for t in &ch.trivial {
                let a = self.align(ch.frame, &t.points[0].contact);
                let b = self.align(ch.frame, &t.points[1].contact);
                for i in 0..k {
                    if let (Some(x), Some(y)) = (a[i], b[i]) {
                        if x.level != y.level {
                            out.push(bad(i, format!("trivial `{}` changes level", t.id)));
                        }
                    }
                }
            }
            for i in 0..k {
                let deltas: Vec<i64> = ch.nodes.iter().filter_map(|n| self.step(ch.frame, n, i)).map(|s| s.0).collect();
                if deltas.iter().any(|d| d.abs() > 1) {
                    out.push(bad(i, "level jumps by more than one".into()));
                }
                if deltas.contains(&1) && deltas.contains(&-1) {
                    out.push(bad(i, "levels are not monotone".into()));
                }
                for b in self.blocks(&ch, i) {
                    let want = if b.end { 0 } else { 1 };
                    if b.steps.len() != want {
                        out.push(bad(i, format!("a block has {} level steps, expected {want}", b.steps.len())));
                    }
                }
            }
            if k > 0 {
                for n in &ch.nodes {
                    if (0..k).all(|i| self.step(ch.frame, n, i).is_none_or(|s| s.0 == 0)) {
                        out.push(bad(0, format!("node at `{}` moves in no direction", n.lower.id)));
                    }
                }
            }
        }
        out
    }

    /// Power equations `a(y⁻)·a(y⁺)·c(y)^s = 1` in one unknown `c` per node.
    /// Returns the exponent matrix, right-hand sides and the (node, slot)
    /// origin of each row.
    pub fn enhanced_system(&self) -> (IntegerMatrix, Vec<ExactNonzeroComplex>, Vec<(usize, usize)>) {
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        let mut origin = Vec::new();
        for (j, n) in self.nodes.iter().enumerate() {
            let (Some((_, a)), Some((_, b))) = (self.point(&n[0]), self.point(&n[1])) else {
                continue;
            };
            for (slot, (x, y)) in a.contact.slots.iter().zip(&b.contact.slots).enumerate() {
                if let (Some(u), Some(v), Some(s)) = (&x.coeff, &y.coeff, x.s.or(y.s)) {
                    let mut row = vec![0i64; self.nodes.len()];
                    row[j] = s as i64;
                    rows.push(row);
                    rhs.push(u.mul(v).inv());
                    origin.push((j, slot));
                }
            }
        }
        let m = IntegerMatrix::from_i64(self.nodes.len(), &rows).expect("rectangular");
        (m, rhs, origin)
    }

    pub fn check_enhanced(&self) -> EnhancedResult {
        let (m, rhs, origin) = self.enhanced_system();
        let names: Vec<String> = self.nodes.iter().map(node_name).collect();
        if rhs.is_empty() {
            return EnhancedResult {
                satisfiable: true,
                witness: Some(names.into_iter().map(|n| (n, ExactNonzeroComplex::one())).collect()),
                branches: Some(BigUint::from(1u32)),
                free_dimension: self.nodes.len(),
                conflict: None,
            };
        }
        match solve_power_system(&m, &rhs).expect("one right-hand side per row") {
            PowerSystemSolution::Inconsistent { equation } => {
                let (j, slot) = origin[equation];
                EnhancedResult {
                    satisfiable: false,
                    witness: None,
                    branches: None,
                    free_dimension: 0,
                    conflict: Some(EnhancedConflict { node: names[j].clone(), slot }),
                }
            }
            PowerSystemSolution::Solvable(set) => EnhancedResult {
                satisfiable: true,
                witness: set.representatives.first().map(|w| names.iter().cloned().zip(w.iter().cloned()).collect()),
                branches: Some(set.branches.clone()),
                free_dimension: set.free_dimension,
                conflict: None,
            },
        }
    }

    /// Levels (per level group) that carry no nontrivial component.
    pub fn uncovered_levels(&self) -> Vec<(usize, u32)> {
        let mut covered: BTreeSet<(usize, u32)> = BTreeSet::new();
        for c in self.components.iter().filter(|c| !c.trivial) {
            let Some(s) = self.divisor.stratum(&c.piece.stratum) else { continue };
            for (i, &l) in c.piece.levels.iter().enumerate() {
                if l > 0 && i < s.slots.len() {
                    covered.insert((self.direction_group(s, i), l));
                }
            }
        }
        let mut out = Vec::new();
        for (g, &bound) in self.level_groups().iter().enumerate() {
            for l in 1..=bound {
                if !covered.contains(&(g, l)) {
                    out.push((g, l));
                }
            }
        }
        out
    }

    /// Every positive level carries at least one nontrivial component.
    pub fn check_relative_stability(&self) -> bool {
        self.uncovered_levels().is_empty()
    }

    pub fn evaluation(&self, point: &str) -> Result<Evaluation, MapTypeError> {
        let (_, p) = self.point(point).ok_or_else(|| MapTypeError::UnknownPoint(point.into()))?;
        let mut weights = Vec::new();
        let mut coeffs = Vec::new();
        for (slot, e) in p.contact.slots.iter().enumerate() {
            let s = e.s.ok_or_else(|| MapTypeError::Undefined { point: point.into(), slot })?;
            let a = e.coeff.clone().ok_or_else(|| MapTypeError::Undecorated { point: point.into(), slot })?;
            weights.push(s);
            coeffs.push(a);
        }
        Ok(Evaluation { stratum: p.contact.stratum.clone(), weights, coeffs })
    }

    /// `Σ |s(x)|` over marked points equals `A·V`.
    pub fn degree_check(&self) -> bool {
        self.marked_points().iter().map(|p| p.contact.degree()).sum::<u64>() as i64 == self.av
    }

    /// Every validator in order; the first nonempty list wins.
    pub fn validate_all(&self) -> Result<EnhancedResult, Vec<Violation>> {
        for check in [Self::validate_structure, Self::check_naive, Self::check_broken_cylinders] {
            let v = check(self);
            if !v.is_empty() {
                return Err(v);
            }
        }
        let enhanced = self.check_enhanced();
        if let Some(c) = &enhanced.conflict {
            return Err(vec![Violation::Contact {
                point: c.node.clone(),
                reason: format!("enhanced matching fails in slot {}", c.slot),
            }]);
        }
        if !self.check_relative_stability() {
            let levels = self.uncovered_levels();
            return Err(vec![Violation::Component {
                component: "*".into(),
                reason: format!("no nontrivial component on levels {levels:?}"),
            }]);
        }
        Ok(enhanced)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnhancedConflict {
    pub node: String,
    pub slot: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnhancedResult {
    pub satisfiable: bool,
    /// One constant per node, in node order.
    pub witness: Option<Vec<(String, ExactNonzeroComplex)>>,
    /// Number of discrete solution branches.
    #[serde(serialize_with = "ser_biguint")]
    pub branches: Option<BigUint>,
    pub free_dimension: usize,
    pub conflict: Option<EnhancedConflict>,
}

fn ser_biguint<S: serde::Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(b) => s.serialize_str(&b.to_string()),
        None => s.serialize_none(),
    }
}

/// Weighted projective class of the leading coefficients at a point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Evaluation {
    pub stratum: String,
    pub weights: Vec<u32>,
    pub coeffs: Vec<ExactNonzeroComplex>,
}

impl Evaluation {
    pub fn same_class(&self, other: &Evaluation) -> bool {
        self.stratum == other.stratum && self.weights == other.weights && wproj_equal(&self.coeffs, &other.coeffs, &self.weights)
    }
}

fn exists_scaling(ratios: &[ExactNonzeroComplex], weights: &[u32]) -> bool {
    if ratios.is_empty() {
        return true;
    }
    let rows: Vec<Vec<i64>> = weights.iter().map(|&s| vec![s as i64]).collect();
    let m = IntegerMatrix::from_i64(1, &rows).expect("single column");
    solve_power_system(&m, ratios).is_ok_and(|r| r.is_consistent())
}

/// `b_i = t^{s_i}·a_i` for some `t`.
pub fn wproj_equal(a: &[ExactNonzeroComplex], b: &[ExactNonzeroComplex], weights: &[u32]) -> bool {
    if a.len() != b.len() || a.len() != weights.len() {
        return false;
    }
    let ratios: Vec<_> = a.iter().zip(b).map(|(x, y)| y.div(x)).collect();
    exists_scaling(&ratios, weights)
}

/// `[b]` is the class of the inverse tuple `[a⁻¹]`: the pair lies on the
/// antidiagonal.
pub fn wproj_antidiagonal(a: &[ExactNonzeroComplex], b: &[ExactNonzeroComplex], weights: &[u32]) -> bool {
    if a.len() != b.len() || a.len() != weights.len() {
        return false;
    }
    let prods: Vec<_> = a.iter().zip(b).map(|(x, y)| x.mul(y)).collect();
    exists_scaling(&prods, weights)
}
