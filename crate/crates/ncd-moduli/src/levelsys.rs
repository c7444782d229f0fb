//! The level linear system, its positive solutions, and gluing parameters.
//!
//! Unknowns are ordered as follows: first `α(z)` for every node `z` in
//! [`MapType::nodes`] order, then `β(g, l)` for every level group `g` and
//! level `l = 1..=bound(g)`. A single level count has one group.

use crate::building::Levels;
use crate::exactnum::{
    int, rational_nullspace, solve_power_system, strict_positive_solution, ExactNonzeroComplex, IntegerMatrix,
    PowerSystemSolution, Rational, RationalMatrix,
};
use crate::maptype::MapType;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LevelError {
    #[error("fiber `{base}`: {reason}")]
    Fiber { base: String, reason: String },
    #[error("fiber `{base}`, direction {direction}: a block has {steps} level steps")]
    MissingStep { base: String, direction: usize, steps: usize },
    #[error("fiber `{base}`, direction {direction}: undefined multiplicity at the step node")]
    Undefined { base: String, direction: usize },
    #[error("gluing problems need a single level count")]
    MultiLevel,
    #[error("node `{0}` is missing a coefficient")]
    Undecorated(String),
    #[error("expected {expected} rescaling parameters, found {found}")]
    LambdaCount { expected: usize, found: usize },
    #[error("the level system has no positive solution")]
    Infeasible,
}

/// `s · Σ_{z ∈ nodes} α(z) − β(group, level) = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelEquation {
    pub base: String,
    pub direction: usize,
    pub s: u32,
    pub nodes: Vec<usize>,
    pub group: usize,
    pub level: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelSystem {
    pub node_names: Vec<String>,
    /// Level bound per group.
    pub groups: Vec<u32>,
    /// Group labels used when printing; empty for a single level count.
    pub group_names: Vec<String>,
    pub equations: Vec<LevelEquation>,
}

impl LevelSystem {
    pub fn new(node_names: Vec<String>, groups: Vec<u32>, equations: Vec<LevelEquation>) -> Self {
        LevelSystem { node_names, groups, group_names: vec![], equations }
    }

    pub fn alpha_count(&self) -> usize {
        self.node_names.len()
    }

    pub fn beta_count(&self) -> usize {
        self.groups.iter().map(|&b| b as usize).sum()
    }

    pub fn unknown_count(&self) -> usize {
        self.alpha_count() + self.beta_count()
    }

    /// Column of `β(group, level)`.
    pub fn beta_index(&self, group: usize, level: u32) -> usize {
        self.alpha_count() + self.groups[..group].iter().map(|&b| b as usize).sum::<usize>() + level as usize - 1
    }

    /// `(group, level)` of every β column, in order.
    pub fn betas(&self) -> Vec<(usize, u32)> {
        self.groups.iter().enumerate().flat_map(|(g, &b)| (1..=b).map(move |l| (g, l))).collect()
    }

    pub fn beta_name(&self, group: usize, level: u32) -> String {
        if self.group_names.is_empty() {
            format!("beta{level}")
        } else {
            format!("beta[{},{level}]", self.group_names[group])
        }
    }

    pub fn matrix(&self) -> RationalMatrix {
        let mut a = RationalMatrix::zeros(self.equations.len(), self.unknown_count());
        for (r, e) in self.equations.iter().enumerate() {
            for &z in &e.nodes {
                let v = a.get(r, z) + int(e.s as i64);
                a.set(r, z, v);
            }
            let c = self.beta_index(e.group, e.level);
            let v = a.get(r, c) - int(1);
            a.set(r, c, v);
        }
        a
    }

    pub fn describe_equation(&self, e: &LevelEquation) -> String {
        let alphas: Vec<String> = e.nodes.iter().map(|&z| format!("alpha({})", self.node_names[z])).collect();
        let sum = if alphas.len() == 1 { alphas[0].clone() } else { format!("({})", alphas.join(" + ")) };
        let lhs = if e.s == 1 { sum } else { format!("{}*{}", e.s, sum) };
        format!("{lhs} = {}", self.beta_name(e.group, e.level))
    }
}

/// Build the level system from the fibers of a map type.
pub fn build_system(mt: &MapType) -> Result<LevelSystem, LevelError> {
    let mut equations = Vec::new();
    for f in &mt.fibers {
        let ch = mt.chain(f).map_err(|reason| LevelError::Fiber { base: f.base.clone(), reason })?;
        for i in 0..ch.frame.slots.len() {
            for b in mt.blocks(&ch, i) {
                let want = if b.end { 0 } else { 1 };
                if b.steps.len() != want {
                    return Err(LevelError::MissingStep { base: f.base.clone(), direction: i, steps: b.steps.len() });
                }
                let Some(&(at, level)) = b.steps.first() else { continue };
                let n = &ch.nodes[at];
                let s = mt.align(ch.frame, &n.lower.contact)[i]
                    .and_then(|e| e.s)
                    .ok_or_else(|| LevelError::Undefined { base: f.base.clone(), direction: i })?;
                equations.push(LevelEquation {
                    base: f.base.clone(),
                    direction: i,
                    s,
                    nodes: b.nodes.iter().map(|&k| ch.nodes[k].index).collect(),
                    group: mt.direction_group(ch.frame, i),
                    level,
                });
            }
        }
    }
    let node_names = mt.nodes.iter().map(|[a, b]| format!("{a}={b}")).collect();
    let mut sys = LevelSystem::new(node_names, mt.level_groups(), equations);
    if mt.levels.is_multi() {
        sys.group_names = mt.divisor.components.clone();
    }
    Ok(sys)
}

/// A strictly positive solution in unknown order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelWitness {
    pub values: Vec<Rational>,
    alpha_count: usize,
}

impl LevelWitness {
    pub fn alpha(&self, node: usize) -> &Rational {
        &self.values[node]
    }

    pub fn alphas(&self) -> &[Rational] {
        &self.values[..self.alpha_count]
    }

    pub fn betas(&self) -> &[Rational] {
        &self.values[self.alpha_count..]
    }
}

pub fn feasible_positive(sys: &LevelSystem) -> Option<LevelWitness> {
    strict_positive_solution(&sys.matrix()).map(|values| LevelWitness { values, alpha_count: sys.alpha_count() })
}

fn beta_projection(sys: &LevelSystem) -> RationalMatrix {
    let basis = rational_nullspace(&sys.matrix());
    let off = sys.alpha_count();
    let rows: Vec<Vec<Rational>> = basis.iter().map(|v| v[off..].to_vec()).collect();
    RationalMatrix::from_rows(sys.beta_count(), rows).expect("rectangular")
}

/// Number of independent rescaling parameters: the rank of the β-part of
/// the solution space.
pub fn torus_dim(sys: &LevelSystem) -> usize {
    beta_projection(sys).rank()
}

/// A linear relation `Σ c·β = 0` with coprime integer coefficients, the
/// highest β first with a positive coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BetaRelation {
    /// `(group, level, coefficient)`, nonzero coefficients only.
    pub terms: Vec<(usize, u32, Rational)>,
}

impl BetaRelation {
    pub fn coefficient(&self, group: usize, level: u32) -> Rational {
        self.terms.iter().find(|t| t.0 == group && t.1 == level).map(|t| t.2.clone()).unwrap_or_else(Rational::zero)
    }

    pub fn display<'a>(&'a self, sys: &'a LevelSystem) -> impl fmt::Display + 'a {
        RelationDisplay { rel: self, sys }
    }
}

struct RelationDisplay<'a> {
    rel: &'a BetaRelation,
    sys: &'a LevelSystem,
}

impl fmt::Display for RelationDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (g, l, c)) in self.rel.terms.iter().enumerate() {
            let name = self.sys.beta_name(*g, *l);
            let mag = c.abs();
            let body = if mag.is_one() { name } else { format!("{mag}*{name}") };
            match (k, c.is_negative()) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        write!(f, " = 0")
    }
}

/// Relations among the β's implied by the system: a basis of the linear
/// forms vanishing on the β-part of every solution. There are exactly
/// `Σ bounds − torus_dim` of them.
pub fn beta_relations(sys: &LevelSystem) -> Vec<BetaRelation> {
    let betas = sys.betas();
    rational_nullspace(&beta_projection(sys))
        .into_iter()
        .map(|v| {
            let den = v.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            let ints: Vec<BigInt> = v.iter().map(|q| (q * Rational::from(den.clone())).to_integer()).collect();
            let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
            let lead_negative = ints.iter().rev().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
            let sign = if lead_negative { -BigInt::one() } else { BigInt::one() };
            let mut terms: Vec<(usize, u32, Rational)> = betas
                .iter()
                .zip(&ints)
                .filter(|(_, x)| !x.is_zero())
                .map(|(&(grp, l), x)| (grp, l, Rational::from(x * &sign / &g)))
                .collect();
            terms.reverse();
            BetaRelation { terms }
        })
        .collect()
}

/// One direction of a base node in a gluing problem.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluingDirection {
    pub s: u32,
    /// `a(x⁻)·a(x⁺)`.
    pub p: ExactNonzeroComplex,
    pub l_minus: u32,
    pub l_plus: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluingNode {
    pub name: String,
    pub directions: Vec<GluingDirection>,
}

/// Equations `μ(x)^{s_i} = (∏_{l = l⁻..=l⁺} λ_l) · p_i⁻¹`, one unknown `μ`
/// per base node. Levels below 1 contribute nothing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluingProblem {
    pub levels: u32,
    pub nodes: Vec<GluingNode>,
}

/// A gluing problem together with values of the rescaling parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluingInput {
    #[serde(flatten)]
    pub problem: GluingProblem,
    pub lambda: Vec<ExactNonzeroComplex>,
}

impl GluingProblem {
    /// Collapse every fiber of a node to one equation per direction. The
    /// range runs over the levels of the nodes in the chain, i.e. from one
    /// above the lower end to the upper end.
    pub fn from_map_type(mt: &MapType) -> Result<GluingProblem, LevelError> {
        let m = match mt.levels {
            Levels::Uniform(m) => m,
            Levels::PerComponent(_) => return Err(LevelError::MultiLevel),
        };
        let mut nodes = Vec::new();
        for f in &mt.fibers {
            let ch = mt.chain(f).map_err(|reason| LevelError::Fiber { base: f.base.clone(), reason })?;
            if ch.marked_end {
                continue;
            }
            let first = ch.nodes.first().expect("node fiber").lower;
            let last = ch.nodes.last().expect("node fiber").upper;
            let a = mt.align(ch.frame, &first.contact);
            let b = mt.align(ch.frame, &last.contact);
            let mut directions = Vec::new();
            for i in 0..ch.frame.slots.len() {
                let (Some(x), Some(y)) = (a[i], b[i]) else { continue };
                let (Some(u), Some(v)) = (&x.coeff, &y.coeff) else {
                    return Err(LevelError::Undecorated(f.base.clone()));
                };
                let s = x.s.ok_or_else(|| LevelError::Undefined { base: f.base.clone(), direction: i })?;
                let (lo, hi) = (x.level.min(y.level), x.level.max(y.level));
                directions.push(GluingDirection { s, p: u.mul(v), l_minus: lo + 1, l_plus: hi });
            }
            nodes.push(GluingNode { name: f.base.clone(), directions });
        }
        Ok(GluingProblem { levels: m, nodes })
    }

    /// Coefficient matrix of the log-linear form: `s_i` at `log μ(x)` and
    /// `−1` at every `log λ_l` in range, unknowns `(μ..., λ_1..λ_m)`.
    pub fn log_matrix(&self) -> RationalMatrix {
        let rows: usize = self.nodes.iter().map(|n| n.directions.len()).sum();
        let n = self.nodes.len();
        let mut a = RationalMatrix::zeros(rows, n + self.levels as usize);
        let mut r = 0;
        for (j, node) in self.nodes.iter().enumerate() {
            for d in &node.directions {
                a.set(r, j, int(d.s as i64));
                for l in d.l_minus.max(1)..=d.l_plus.min(self.levels) {
                    a.set(r, n + l as usize - 1, int(-1));
                }
                r += 1;
            }
        }
        a
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NodeGluing {
    pub name: String,
    #[serde(serialize_with = "ser_big")]
    pub count: BigUint,
    pub solutions: Vec<ExactNonzeroComplex>,
    /// Directions `(i, j)` whose equations cannot hold together.
    pub conflict: Option<(usize, usize)>,
}

fn ser_big<S: serde::Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GluingSolution {
    pub nodes: Vec<NodeGluing>,
}

impl GluingSolution {
    pub fn consistent(&self) -> bool {
        self.nodes.iter().all(|n| n.conflict.is_none())
    }

    /// Number of joint choices of all `μ(x)`.
    pub fn total(&self) -> BigUint {
        self.nodes.iter().map(|n| n.count.clone()).product()
    }
}

fn single_column(s: &[u32]) -> IntegerMatrix {
    IntegerMatrix::from_i64(1, &s.iter().map(|&v| vec![v as i64]).collect::<Vec<_>>()).expect("single column")
}

pub fn solve_gluing(gp: &GluingProblem, lambda: &[ExactNonzeroComplex]) -> Result<GluingSolution, LevelError> {
    if lambda.len() != gp.levels as usize {
        return Err(LevelError::LambdaCount { expected: gp.levels as usize, found: lambda.len() });
    }
    let mut nodes = Vec::new();
    for node in &gp.nodes {
        let s: Vec<u32> = node.directions.iter().map(|d| d.s).collect();
        let rhs: Vec<ExactNonzeroComplex> = node
            .directions
            .iter()
            .map(|d| {
                let lam = (d.l_minus.max(1)..=d.l_plus.min(gp.levels))
                    .fold(ExactNonzeroComplex::one(), |acc, l| acc.mul(&lambda[l as usize - 1]));
                lam.div(&d.p)
            })
            .collect();
        if s.is_empty() {
            nodes.push(NodeGluing { name: node.name.clone(), count: BigUint::one(), solutions: vec![], conflict: None });
            continue;
        }
        match solve_power_system(&single_column(&s), &rhs).expect("matching lengths") {
            PowerSystemSolution::Inconsistent { equation } => {
                let partner = (0..equation)
                    .find(|&j| {
                        let pair = single_column(&[s[j], s[equation]]);
                        !solve_power_system(&pair, &[rhs[j].clone(), rhs[equation].clone()]).is_ok_and(|r| r.is_consistent())
                    })
                    .unwrap_or(0);
                nodes.push(NodeGluing {
                    name: node.name.clone(),
                    count: BigUint::zero(),
                    solutions: vec![],
                    conflict: Some((partner, equation)),
                });
            }
            PowerSystemSolution::Solvable(set) => nodes.push(NodeGluing {
                name: node.name.clone(),
                count: set.branches.clone(),
                solutions: set.representatives.iter().map(|r| r[0].clone()).collect(),
                conflict: None,
            }),
        }
    }
    Ok(GluingSolution { nodes })
}

/// An unknown of the level system.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Unknown {
    Node(String),
    Level { group: usize, level: u32 },
}

/// Unknowns whose rates are tied together, with their exponents in a
/// positive solution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AsymptoticClass {
    pub members: Vec<(Unknown, Rational)>,
}

impl AsymptoticClass {
    pub fn contains(&self, u: &Unknown) -> bool {
        self.members.iter().any(|(v, _)| v == u)
    }
}

fn find(p: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while p[r] != r {
        r = p[r];
    }
    let mut y = x;
    while p[y] != r {
        let next = p[y];
        p[y] = r;
        y = next;
    }
    r
}

fn union(p: &mut [usize], a: usize, b: usize) {
    let (x, y) = (find(p, a), find(p, b));
    if x != y {
        p[x] = y;
    }
}

/// Partition of nodes and levels into asymptotic classes. Nodes over one
/// base point are merged, the levels each base point spans are merged, and
/// classes sharing an unknown merge transitively.
pub fn asymptotic_classes(mt: &MapType) -> Result<Vec<AsymptoticClass>, LevelError> {
    let sys = build_system(mt)?;
    let w = feasible_positive(&sys).ok_or(LevelError::Infeasible)?;
    let n = sys.unknown_count();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut by_base: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for e in &sys.equations {
        let cols = by_base.entry(e.base.as_str()).or_default();
        cols.extend(e.nodes.iter().copied());
        cols.push(sys.beta_index(e.group, e.level));
    }
    for f in &mt.fibers {
        if let Ok(ch) = mt.chain(f) {
            by_base.entry(f.base.as_str()).or_default().extend(ch.nodes.iter().map(|z| z.index));
        }
    }
    for cols in by_base.values() {
        for pair in cols.windows(2) {
            union(&mut parent, pair[0], pair[1]);
        }
    }
    // Levels spanned by one base point, filled in between its extremes.
    let mut spans: BTreeMap<(&str, usize), (u32, u32)> = BTreeMap::new();
    for e in &sys.equations {
        let span = spans.entry((e.base.as_str(), e.group)).or_insert((e.level, e.level));
        span.0 = span.0.min(e.level);
        span.1 = span.1.max(e.level);
    }
    for (&(_, g), &(lo, hi)) in &spans {
        for l in lo..hi {
            union(&mut parent, sys.beta_index(g, l), sys.beta_index(g, l + 1));
        }
    }
    let betas = sys.betas();
    let mut classes: BTreeMap<usize, Vec<(Unknown, Rational)>> = BTreeMap::new();
    for col in 0..n {
        let r = find(&mut parent, col);
        let u = if col < sys.alpha_count() {
            Unknown::Node(sys.node_names[col].clone())
        } else {
            let (group, level) = betas[col - sys.alpha_count()];
            Unknown::Level { group, level }
        };
        classes.entry(r).or_default().push((u, w.values[col].clone()));
    }
    Ok(classes.into_values().map(|members| AsymptoticClass { members }).collect())
}
