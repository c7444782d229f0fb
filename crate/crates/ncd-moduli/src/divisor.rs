//! Finite presentations of normal-crossings divisors.
//!
//! A divisor is a graded list of strata. Each stratum of depth `k` carries
//! `k` branch slots pointing at components of the normalization, the number
//! of connected components of its own normalization, monodromy generators
//! permuting its slots, and the ids of the depth `k+1` strata on its boundary.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

/// Slot permutation: `perm[i]` is the image of slot `i`.
pub type Permutation = Vec<usize>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stratum {
    pub id: String,
    pub depth: usize,
    /// Component names of the local branches, one per slot.
    pub slots: Vec<String>,
    pub normalization_components: u32,
    #[serde(default)]
    pub monodromy: Vec<Permutation>,
    #[serde(default)]
    pub boundary: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CombinatorialDivisor {
    #[serde(rename = "dimX")]
    pub dim_x: u32,
    pub components: Vec<String>,
    pub strata: Vec<Stratum>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DivisorViolation {
    #[error("dimX = {0} must be even and positive")]
    BadDimension(u32),
    #[error("duplicate component name `{0}`")]
    DuplicateComponent(String),
    #[error("duplicate stratum id `{0}`")]
    DuplicateStratum(String),
    #[error("expected exactly one depth-0 stratum, found {0}")]
    DepthZeroCount(usize),
    #[error("stratum `{id}`: depth {depth} but {slots} slots")]
    SlotCount { id: String, depth: usize, slots: usize },
    #[error("stratum `{id}`: unknown component `{component}`")]
    UnknownComponent { id: String, component: String },
    #[error("stratum `{id}`: depth {depth} violates 2k ≤ dimX = {dim_x}")]
    TooDeep { id: String, depth: usize, dim_x: u32 },
    #[error("stratum `{id}`: normalization_components must be positive")]
    NoNormalization { id: String },
    #[error("stratum `{id}`: monodromy entry {index} is not a permutation of its slots")]
    NotPermutation { id: String, index: usize },
    #[error("stratum `{id}`: monodromy entry {index} moves a slot onto a different component")]
    MonodromyMixesComponents { id: String, index: usize },
    #[error("stratum `{id}`: unknown boundary stratum `{target}`")]
    UnknownBoundary { id: String, target: String },
    #[error("stratum `{id}`: boundary stratum `{target}` has depth {found}, expected {expected}")]
    BoundaryDepth { id: String, target: String, expected: usize, found: usize },
    #[error("stratum `{id}`: branches are not a sub-multiset of boundary stratum `{target}`")]
    BoundaryBranches { id: String, target: String },
    #[error("stratum `{id}` of depth {depth} lies on no boundary of depth {}", depth - 1)]
    Orphan { id: String, depth: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DivisorError {
    #[error("no strata of depth {0}")]
    NoStrataAtDepth(usize),
    #[error("unknown component `{0}`")]
    UnknownComponent(String),
    #[error("intersection {subset:?} is listed but its subset {missing:?} is not")]
    NotClosed { subset: Vec<String>, missing: Vec<String> },
    #[error("intersection {0:?} is deeper than dimX allows")]
    TooDeep(Vec<String>),
    #[error("invalid divisor: {0}")]
    Invalid(String),
}

/// Component counts attached to depth `k` of a divisor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumCounts {
    /// Connected components of the normalization of `V^k`.
    pub resolution_of_vk: u64,
    /// Connected components of the total space of the degree-k branch cover.
    pub double_resolution: u64,
    /// Connected components of the normalization of the depth-(k+1) divisor
    /// inside the resolved `V^k`.
    pub resolution_of_wk1: u64,
}

impl fmt::Display for StratumCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}, {}, {}}}", self.resolution_of_vk, self.double_resolution, self.resolution_of_wk1)
    }
}

impl CombinatorialDivisor {
    pub fn stratum(&self, id: &str) -> Option<&Stratum> {
        self.strata.iter().find(|s| s.id == id)
    }

    pub fn strata_of_depth(&self, k: usize) -> impl Iterator<Item = &Stratum> {
        self.strata.iter().filter(move |s| s.depth == k)
    }

    pub fn max_depth(&self) -> usize {
        self.strata.iter().map(|s| s.depth).max().unwrap_or(0)
    }

    /// The unique depth-0 stratum standing for the ambient space.
    pub fn ambient(&self) -> Option<&Stratum> {
        self.strata_of_depth(0).next()
    }

    pub fn component_index(&self, name: &str) -> Option<usize> {
        self.components.iter().position(|c| c == name)
    }

    /// True when some stratum has two slots on the same component, so that
    /// the normal directions cannot be rescaled independently.
    pub fn has_linked_directions(&self) -> bool {
        self.strata.iter().any(|s| {
            let set: BTreeSet<&String> = s.slots.iter().collect();
            set.len() < s.slots.len()
        })
    }

    pub fn validate(&self) -> Vec<DivisorViolation> {
        use DivisorViolation as V;
        let mut out = Vec::new();
        if self.dim_x == 0 || self.dim_x % 2 != 0 {
            out.push(V::BadDimension(self.dim_x));
        }
        let mut seen = BTreeSet::new();
        for c in &self.components {
            if !seen.insert(c) {
                out.push(V::DuplicateComponent(c.clone()));
            }
        }
        let mut ids = BTreeSet::new();
        for s in &self.strata {
            if !ids.insert(&s.id) {
                out.push(V::DuplicateStratum(s.id.clone()));
            }
        }
        let zero = self.strata_of_depth(0).count();
        if zero != 1 {
            out.push(V::DepthZeroCount(zero));
        }
        let mut covered: BTreeSet<&str> = BTreeSet::new();
        for s in &self.strata {
            let id = s.id.clone();
            if s.slots.len() != s.depth {
                out.push(V::SlotCount { id: id.clone(), depth: s.depth, slots: s.slots.len() });
            }
            for c in &s.slots {
                if self.component_index(c).is_none() {
                    out.push(V::UnknownComponent { id: id.clone(), component: c.clone() });
                }
            }
            if 2 * s.depth as u64 > self.dim_x as u64 {
                out.push(V::TooDeep { id: id.clone(), depth: s.depth, dim_x: self.dim_x });
            }
            if s.normalization_components == 0 {
                out.push(V::NoNormalization { id: id.clone() });
            }
            for (index, perm) in s.monodromy.iter().enumerate() {
                let mut sorted = perm.clone();
                sorted.sort_unstable();
                if sorted != (0..s.slots.len()).collect::<Vec<_>>() {
                    out.push(V::NotPermutation { id: id.clone(), index });
                } else if perm.iter().enumerate().any(|(i, &j)| s.slots[i] != s.slots[j]) {
                    out.push(V::MonodromyMixesComponents { id: id.clone(), index });
                }
            }
            for t in &s.boundary {
                match self.stratum(t) {
                    None => out.push(V::UnknownBoundary { id: id.clone(), target: t.clone() }),
                    Some(ts) => {
                        covered.insert(ts.id.as_str());
                        if ts.depth != s.depth + 1 {
                            out.push(V::BoundaryDepth {
                                id: id.clone(),
                                target: t.clone(),
                                expected: s.depth + 1,
                                found: ts.depth,
                            });
                        } else if !is_submultiset(&s.slots, &ts.slots) {
                            out.push(V::BoundaryBranches { id: id.clone(), target: t.clone() });
                        }
                    }
                }
            }
        }
        for s in &self.strata {
            if s.depth > 0 && !covered.contains(s.id.as_str()) {
                out.push(V::Orphan { id: s.id.clone(), depth: s.depth });
            }
        }
        out
    }

    pub fn stratum_counts(&self, k: usize) -> Result<StratumCounts, DivisorError> {
        if self.strata_of_depth(k).next().is_none() {
            return Err(DivisorError::NoStrataAtDepth(k));
        }
        let cover = |k: usize| -> u64 {
            self.strata_of_depth(k)
                .map(|s| s.normalization_components as u64 * slot_orbits(s).len() as u64)
                .sum()
        };
        Ok(StratumCounts {
            resolution_of_vk: self.strata_of_depth(k).map(|s| s.normalization_components as u64).sum(),
            double_resolution: cover(k),
            resolution_of_wk1: cover(k + 1),
        })
    }
}

fn is_submultiset(small: &[String], big: &[String]) -> bool {
    let mut count: BTreeMap<&String, i64> = BTreeMap::new();
    for b in big {
        *count.entry(b).or_default() += 1;
    }
    for s in small {
        let e = count.entry(s).or_default();
        *e -= 1;
        if *e < 0 {
            return false;
        }
    }
    true
}

/// Orbits of the slots under the monodromy generators.
pub fn slot_orbits(s: &Stratum) -> Vec<Vec<usize>> {
    let n = s.slots.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for perm in &s.monodromy {
        for (i, &j) in perm.iter().enumerate() {
            if j < n {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

/// The group generated by a stratum's monodromy, as explicit permutations.
pub fn monodromy_group(s: &Stratum) -> Vec<Permutation> {
    let n = s.slots.len();
    let id: Permutation = (0..n).collect();
    let mut group: BTreeSet<Permutation> = BTreeSet::from([id.clone()]);
    let mut frontier = vec![id];
    while let Some(g) = frontier.pop() {
        for h in &s.monodromy {
            if h.len() != n {
                continue;
            }
            let gh: Permutation = (0..n).map(|i| h[g[i]]).collect();
            if group.insert(gh.clone()) {
                frontier.push(gh);
            }
        }
    }
    group.into_iter().collect()
}

/// Lexicographically least relabelling of a per-slot vector under monodromy.
pub fn canonical_under_monodromy<T: Clone + Ord>(s: &Stratum, values: &[T]) -> Vec<T> {
    monodromy_group(s)
        .iter()
        .map(|g| {
            let mut out = values.to_vec();
            for (i, v) in values.iter().enumerate() {
                out[g[i]] = v.clone();
            }
            out
        })
        .min()
        .unwrap_or_else(|| values.to_vec())
}

fn subset_id(names: &[String]) -> String {
    names.join("^")
}

/// Coordinate-hyperplane model: `n` hyperplanes in real dimension `2n`.
pub fn local_model(n: usize) -> CombinatorialDivisor {
    let components: Vec<String> = (1..=n).map(|i| format!("H{i}")).collect();
    let mut strata = Vec::new();
    for mask in 0u64..(1u64 << n) {
        let members: Vec<String> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| components[i].clone()).collect();
        let boundary = (0..n)
            .filter(|i| mask >> i & 1 == 0)
            .map(|i| {
                let m = mask | 1 << i;
                let names: Vec<String> = (0..n).filter(|j| m >> j & 1 == 1).map(|j| components[j].clone()).collect();
                subset_id(&names)
            })
            .collect();
        strata.push(Stratum {
            id: if members.is_empty() { "X".into() } else { subset_id(&members) },
            depth: members.len(),
            slots: members,
            normalization_components: 1,
            monodromy: vec![],
            boundary,
        });
    }
    strata.sort_by(|a, b| a.depth.cmp(&b.depth).then_with(|| a.slots.cmp(&b.slots)));
    // Boundary ids of depth-(n-1) strata must name the depth-n stratum the same way.
    if let Some(top) = strata.iter().find(|s| s.depth == n).map(|s| s.id.clone()) {
        for s in strata.iter_mut().filter(|s| s.depth + 1 == n) {
            s.boundary = vec![top.clone()];
        }
    }
    if n == 0 {
        strata[0].id = "X".into();
    }
    CombinatorialDivisor { dim_x: 2 * n as u32, components, strata }
}

/// One named intersection of components in a simple-crossings presentation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Intersection {
    pub components: Vec<String>,
    /// Number of connected components of the intersection.
    #[serde(default = "one")]
    pub count: u32,
    #[serde(default)]
    pub id: Option<String>,
}

fn one() -> u32 {
    1
}

/// Components with a list of which subsets meet (simple normal crossings).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossingPoset {
    #[serde(rename = "dimX")]
    pub dim_x: u32,
    pub components: Vec<String>,
    #[serde(default)]
    pub intersections: Vec<Intersection>,
}

pub fn simple_crossings(poset: &CrossingPoset) -> Result<CombinatorialDivisor, DivisorError> {
    let mut sets: BTreeMap<Vec<String>, (u32, String)> = BTreeMap::new();
    for c in &poset.components {
        sets.insert(vec![c.clone()], (1, c.clone()));
    }
    for i in &poset.intersections {
        let mut key = i.components.clone();
        key.sort();
        key.dedup();
        for c in &key {
            if !poset.components.contains(c) {
                return Err(DivisorError::UnknownComponent(c.clone()));
            }
        }
        if 2 * key.len() as u64 > poset.dim_x as u64 {
            return Err(DivisorError::TooDeep(key));
        }
        let id = i.id.clone().unwrap_or_else(|| subset_id(&key));
        sets.insert(key, (i.count, id));
    }
    // Closure: every proper subset of size ≥ 2 must also be listed.
    for key in sets.keys().filter(|k| k.len() > 2) {
        for skip in 0..key.len() {
            let sub: Vec<String> = key.iter().enumerate().filter(|(j, _)| *j != skip).map(|(_, c)| c.clone()).collect();
            if !sets.contains_key(&sub) {
                return Err(DivisorError::NotClosed { subset: key.clone(), missing: sub });
            }
        }
    }
    let mut strata = vec![Stratum {
        id: "X".into(),
        depth: 0,
        slots: vec![],
        normalization_components: 1,
        monodromy: vec![],
        boundary: poset.components.clone(),
    }];
    for (key, (count, id)) in &sets {
        let boundary = sets
            .iter()
            .filter(|(k, _)| k.len() == key.len() + 1 && key.iter().all(|c| k.contains(c)))
            .map(|(_, (_, bid))| bid.clone())
            .collect();
        strata.push(Stratum {
            id: id.clone(),
            depth: key.len(),
            slots: key.clone(),
            normalization_components: *count,
            monodromy: vec![],
            boundary,
        });
    }
    strata.sort_by(|a, b| a.depth.cmp(&b.depth).then_with(|| a.slots.cmp(&b.slots)));
    let d = CombinatorialDivisor { dim_x: poset.dim_x, components: poset.components.clone(), strata };
    if let Some(v) = d.validate().first() {
        return Err(DivisorError::Invalid(v.to_string()));
    }
    Ok(d)
}

/// Two components `V1`, `V2` of a 4-manifold meeting in one point `p`.
pub fn two_components_meeting() -> CombinatorialDivisor {
    simple_crossings(&CrossingPoset {
        dim_x: 4,
        components: vec!["V1".into(), "V2".into()],
        intersections: vec![Intersection { components: vec!["V1".into(), "V2".into()], count: 1, id: Some("p".into()) }],
    })
    .expect("closed poset")
}

/// One component of a 4-manifold crossing itself in a single point `p`.
pub fn self_crossing_curve() -> CombinatorialDivisor {
    CombinatorialDivisor {
        dim_x: 4,
        components: vec!["V".into()],
        strata: vec![
            Stratum {
                id: "X".into(),
                depth: 0,
                slots: vec![],
                normalization_components: 1,
                monodromy: vec![],
                boundary: vec!["V".into()],
            },
            Stratum {
                id: "V".into(),
                depth: 1,
                slots: vec!["V".into()],
                normalization_components: 1,
                monodromy: vec![],
                boundary: vec!["p".into()],
            },
            Stratum {
                id: "p".into(),
                depth: 2,
                slots: vec!["V".into(), "V".into()],
                normalization_components: 1,
                monodromy: vec![],
                boundary: vec![],
            },
        ],
    }
}

/// Same ambient dimension and the same number of local branches: near a
/// point of either stratum the divisor is the coordinate-hyperplane model.
pub fn locally_isomorphic(a: &CombinatorialDivisor, sa: &str, b: &CombinatorialDivisor, sb: &str) -> bool {
    match (a.stratum(sa), b.stratum(sb)) {
        (Some(x), Some(y)) => a.dim_x == b.dim_x && x.depth == y.depth && x.slots.len() == y.slots.len(),
        _ => false,
    }
}
