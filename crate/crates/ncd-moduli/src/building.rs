//! Level-m buildings over a combinatorial divisor.
//!
//! A global piece is a stratum together with a level in `1..=m` for each of
//! its slots, taken up to monodromy; the depth-0 stratum gives the unrescaled
//! piece `X`. Local labels over a point also allow level 0 on a slot, which
//! means that branch is not rescaled there.

use crate::divisor::{canonical_under_monodromy, CombinatorialDivisor, Stratum};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "-")]
    Minus,
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "+")]
    Plus,
}

impl Sign {
    pub fn opposite(self) -> Sign {
        match self {
            Sign::Minus => Sign::Plus,
            Sign::Zero => Sign::Zero,
            Sign::Plus => Sign::Minus,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Minus => '-',
            Sign::Zero => '0',
            Sign::Plus => '+',
        }
    }
}

/// Level bound: one global `m`, or one bound per divisor component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<u32>", into = "Vec<u32>")]
pub enum Levels {
    Uniform(u32),
    PerComponent(Vec<u32>),
}

impl From<Vec<u32>> for Levels {
    fn from(v: Vec<u32>) -> Self {
        if v.len() == 1 {
            Levels::Uniform(v[0])
        } else {
            Levels::PerComponent(v)
        }
    }
}

impl From<Levels> for Vec<u32> {
    fn from(l: Levels) -> Self {
        match l {
            Levels::Uniform(m) => vec![m],
            Levels::PerComponent(v) => v,
        }
    }
}

impl Levels {
    /// Highest level available to a slot on the named component.
    pub fn bound(&self, d: &CombinatorialDivisor, component: &str) -> u32 {
        match self {
            Levels::Uniform(m) => *m,
            Levels::PerComponent(v) => d.component_index(component).and_then(|i| v.get(i).copied()).unwrap_or(0),
        }
    }

    pub fn max(&self) -> u32 {
        match self {
            Levels::Uniform(m) => *m,
            Levels::PerComponent(v) => v.iter().copied().max().unwrap_or(0),
        }
    }

    pub fn is_multi(&self) -> bool {
        matches!(self, Levels::PerComponent(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum BuildingError {
    #[error("stratum `{0}` links two normal directions through one component; only a single level count is allowed")]
    LinkedDirections(String),
    #[error("expected {expected} per-component levels, found {found}")]
    LevelCount { expected: usize, found: usize },
    #[error("unknown stratum `{0}`")]
    UnknownStratum(String),
    #[error("level {level} outside 1..={m}")]
    LevelOutOfRange { level: u32, m: u32 },
    #[error("collapse is only defined for a single level count")]
    MultiCollapse,
    #[error("levels must satisfy 0 ≤ {l_minus} ≤ {l_plus} ≤ {m}")]
    BadWeightLevels { l_minus: u32, l_plus: u32, m: u32 },
    #[error("divisor stratum {0} has no dual partner")]
    Unpaired(String),
}

/// A stratum with a level on each slot.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PieceLabel {
    pub stratum: String,
    pub levels: Vec<u32>,
}

impl PieceLabel {
    pub fn new(stratum: impl Into<String>, levels: Vec<u32>) -> Self {
        PieceLabel { stratum: stratum.into(), levels }
    }

    /// The largest slot level; 0 for the unrescaled piece.
    pub fn level(&self) -> u32 {
        self.levels.iter().copied().max().unwrap_or(0)
    }

    /// Slots left at level 0.
    pub fn unrescaled_slots(&self) -> Vec<usize> {
        (0..self.levels.len()).filter(|&i| self.levels[i] == 0).collect()
    }

    pub fn id(&self) -> String {
        if self.levels.is_empty() {
            return self.stratum.clone();
        }
        let ls: Vec<String> = self.levels.iter().map(u32::to_string).collect();
        format!("{}[{}]", self.stratum, ls.join(","))
    }
}

impl fmt::Display for PieceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

/// An open stratum of the total divisor: a local label plus a sign per slot.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DivisorStratum {
    pub stratum: String,
    pub levels: Vec<u32>,
    pub signs: Vec<Sign>,
}

impl DivisorStratum {
    pub fn id(&self) -> String {
        let ls: Vec<String> = self.levels.iter().map(u32::to_string).collect();
        let ss: String = self.signs.iter().map(|s| s.symbol()).collect();
        format!("{}[{}]({})", self.stratum, ls.join(","), ss)
    }

    pub fn has_infinity(&self) -> bool {
        self.signs.contains(&Sign::Minus)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelBuilding {
    pub divisor: CombinatorialDivisor,
    pub levels: Levels,
    /// Global pieces, one representative per monodromy orbit.
    pub pieces: Vec<PieceLabel>,
}

fn product(bounds: &[(u32, u32)]) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for &(lo, hi) in bounds {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (lo..=hi).map(move |l| {
                    let mut v = prefix.clone();
                    v.push(l);
                    v
                })
            })
            .collect();
    }
    out
}

pub fn build(d: &CombinatorialDivisor, m: u32) -> LevelBuilding {
    assemble(d, Levels::Uniform(m))
}

/// Building with an independent level count per divisor component.
pub fn build_multi(d: &CombinatorialDivisor, levels: &[u32]) -> Result<LevelBuilding, BuildingError> {
    if let Some(s) = d.strata.iter().find(|s| {
        let set: BTreeSet<&String> = s.slots.iter().collect();
        set.len() < s.slots.len()
    }) {
        return Err(BuildingError::LinkedDirections(s.id.clone()));
    }
    if levels.len() != d.components.len() {
        return Err(BuildingError::LevelCount { expected: d.components.len(), found: levels.len() });
    }
    Ok(assemble(d, Levels::PerComponent(levels.to_vec())))
}

fn assemble(d: &CombinatorialDivisor, levels: Levels) -> LevelBuilding {
    let mut b = LevelBuilding { divisor: d.clone(), levels, pieces: vec![] };
    let mut pieces = Vec::new();
    for s in &d.strata {
        let bounds: Vec<(u32, u32)> = s.slots.iter().map(|c| (1, b.levels.bound(d, c))).collect();
        let orbits: BTreeSet<Vec<u32>> = product(&bounds).iter().map(|l| canonical_under_monodromy(s, l)).collect();
        pieces.extend(orbits.into_iter().map(|l| PieceLabel::new(s.id.clone(), l)));
    }
    b.pieces = pieces;
    b
}

impl LevelBuilding {
    fn stratum(&self, id: &str) -> Result<&Stratum, BuildingError> {
        self.divisor.stratum(id).ok_or_else(|| BuildingError::UnknownStratum(id.into()))
    }

    fn slot_bounds(&self, s: &Stratum) -> Vec<u32> {
        s.slots.iter().map(|c| self.levels.bound(&self.divisor, c)).collect()
    }

    /// Global pieces counted with slot labels, i.e. before identifying
    /// monodromy orbits.
    pub fn labelled_piece_count(&self) -> usize {
        self.divisor
            .strata
            .iter()
            .map(|s| self.slot_bounds(s).iter().map(|&b| b as usize).product::<usize>())
            .sum()
    }

    pub fn pieces_over(&self, stratum: &str) -> impl Iterator<Item = &PieceLabel> + '_ {
        let stratum = stratum.to_string();
        self.pieces.iter().filter(move |p| p.stratum == stratum)
    }

    /// Piece classes of depth `k`: distinct level vectors over all depth-k
    /// strata, so a bundle over a disconnected normalization counts once.
    pub fn bundle_classes(&self, k: usize) -> BTreeSet<Vec<u32>> {
        self.pieces
            .iter()
            .filter(|p| self.divisor.stratum(&p.stratum).is_some_and(|s| s.depth == k))
            .map(|p| p.levels.clone())
            .collect()
    }

    pub fn main_piece_classes(&self) -> usize {
        (0..=self.divisor.max_depth()).map(|k| self.bundle_classes(k).len()).sum()
    }

    /// Local labels over a point of the given stratum: every level function
    /// on its slots, level 0 included.
    pub fn local_pieces(&self, stratum: &str) -> Result<Vec<PieceLabel>, BuildingError> {
        let s = self.stratum(stratum)?;
        let bounds: Vec<(u32, u32)> = self.slot_bounds(s).into_iter().map(|b| (0, b)).collect();
        Ok(product(&bounds).into_iter().map(|l| PieceLabel::new(s.id.clone(), l)).collect())
    }

    /// The global piece a local label belongs to: drop the level-0 slots and
    /// move to the shallower stratum spanned by the remaining branches.
    pub fn globalize(&self, label: &PieceLabel) -> Result<PieceLabel, BuildingError> {
        let d = &self.divisor;
        let s = self.stratum(&label.stratum)?;
        let kept: Vec<(String, u32)> = s
            .slots
            .iter()
            .zip(&label.levels)
            .filter(|(_, &l)| l > 0)
            .map(|(c, &l)| (c.clone(), l))
            .collect();
        let mut want: Vec<&String> = kept.iter().map(|(c, _)| c).collect();
        want.sort();
        let target = d
            .strata
            .iter()
            .find(|t| {
                let mut have: Vec<&String> = t.slots.iter().collect();
                have.sort();
                have == want && descends(d, &t.id, &s.id)
            })
            .ok_or_else(|| BuildingError::UnknownStratum(label.stratum.clone()))?;
        let mut pool = kept;
        let levels: Vec<u32> = target
            .slots
            .iter()
            .map(|c| {
                let at = pool.iter().position(|(n, _)| n == c).expect("matching multiset");
                pool.remove(at).1
            })
            .collect();
        Ok(PieceLabel::new(target.id.clone(), canonical_under_monodromy(target, &levels)))
    }

    /// Sign maps on a local label, the all-zero map (the open piece) included.
    pub fn divisor_strata(&self, label: &PieceLabel) -> Vec<DivisorStratum> {
        let choices: Vec<Vec<Sign>> = label
            .levels
            .iter()
            .map(|&l| if l == 0 { vec![Sign::Zero, Sign::Plus] } else { vec![Sign::Minus, Sign::Zero, Sign::Plus] })
            .collect();
        let mut out = vec![vec![]];
        for c in &choices {
            out = out
                .into_iter()
                .flat_map(|p: Vec<Sign>| {
                    c.iter().map(move |&s| {
                        let mut v = p.clone();
                        v.push(s);
                        v
                    })
                })
                .collect();
        }
        out.into_iter()
            .map(|signs| DivisorStratum { stratum: label.stratum.clone(), levels: label.levels.clone(), signs })
            .collect()
    }

    /// Divisor strata of a local label other than the open piece.
    pub fn proper_divisor_strata(&self, label: &PieceLabel) -> Vec<DivisorStratum> {
        self.divisor_strata(label).into_iter().filter(|d| d.signs.iter().any(|&s| s != Sign::Zero)).collect()
    }

    fn canonical(&self, s: &Stratum, levels: &[u32], signs: &[Sign]) -> DivisorStratum {
        let pairs: Vec<(u32, Sign)> = levels.iter().copied().zip(signs.iter().copied()).collect();
        let c = canonical_under_monodromy(s, &pairs);
        DivisorStratum {
            stratum: s.id.clone(),
            levels: c.iter().map(|p| p.0).collect(),
            signs: c.iter().map(|p| p.1).collect(),
        }
    }

    /// All open strata of the total divisor, up to monodromy. A slot at
    /// level 0 lies on the unrescaled branch and so always carries `+`.
    pub fn building_strata(&self) -> Vec<DivisorStratum> {
        let mut out = BTreeSet::new();
        for s in self.divisor.strata.iter().filter(|s| s.depth > 0) {
            let bounds: Vec<(u32, u32)> = self.slot_bounds(s).into_iter().map(|b| (0, b)).collect();
            for levels in product(&bounds) {
                let label = PieceLabel::new(s.id.clone(), levels.clone());
                for ds in self.proper_divisor_strata(&label) {
                    if levels.iter().zip(&ds.signs).all(|(&l, &e)| l > 0 || e == Sign::Plus) {
                        out.insert(self.canonical(s, &levels, &ds.signs));
                    }
                }
            }
        }
        out.into_iter().collect()
    }

    /// The stratum glued to `ds`: an infinity side at level `l` meets the
    /// zero side at level `l-1`. Zero sides on the top level are the
    /// relative divisor and map to themselves.
    pub fn dual_partner(&self, ds: &DivisorStratum) -> Result<DivisorStratum, BuildingError> {
        let s = self.stratum(&ds.stratum)?;
        let bounds = self.slot_bounds(s);
        let mut levels = ds.levels.clone();
        let mut signs = ds.signs.clone();
        for i in 0..levels.len() {
            match signs[i] {
                Sign::Minus if levels[i] > 0 => {
                    levels[i] -= 1;
                    signs[i] = Sign::Plus;
                }
                Sign::Plus if levels[i] < bounds[i] => {
                    levels[i] += 1;
                    signs[i] = Sign::Minus;
                }
                _ => {}
            }
        }
        Ok(self.canonical(s, &levels, &signs))
    }

    /// Attaching pairs of the total divisor; each unordered pair once.
    pub fn dual_pairs(&self) -> Result<Vec<(DivisorStratum, DivisorStratum)>, BuildingError> {
        let all = self.building_strata();
        let set: BTreeSet<&DivisorStratum> = all.iter().collect();
        let mut out = Vec::new();
        for ds in &all {
            let p = self.dual_partner(ds)?;
            if &p == ds {
                if ds.has_infinity() {
                    return Err(BuildingError::Unpaired(ds.id()));
                }
                continue;
            }
            if !set.contains(&p) {
                return Err(BuildingError::Unpaired(ds.id()));
            }
            if ds < &p {
                out.push((ds.clone(), p));
            }
        }
        Ok(out)
    }

    /// Collapse the levels in `j`: level `l` becomes `l - #{j ∈ J : j ≤ l}`.
    /// Returns the smaller building and the image of every piece.
    pub fn collapse(&self, j: &BTreeSet<u32>) -> Result<Collapse, BuildingError> {
        let m = match self.levels {
            Levels::Uniform(m) => m,
            Levels::PerComponent(_) => return Err(BuildingError::MultiCollapse),
        };
        if let Some(&bad) = j.iter().find(|&&l| l == 0 || l > m) {
            return Err(BuildingError::LevelOutOfRange { level: bad, m });
        }
        let target = build(&self.divisor, m - j.len() as u32);
        let mut relabel = Vec::new();
        for p in &self.pieces {
            let shifted: Vec<u32> = p.levels.iter().map(|&l| l - j.iter().filter(|&&x| x <= l).count() as u32).collect();
            let image = target.globalize(&PieceLabel::new(p.stratum.clone(), shifted))?;
            relabel.push((p.clone(), image));
        }
        Ok(Collapse { building: target, relabel })
    }

    pub fn dump(&self) -> Result<BuildingDump, BuildingError> {
        let strata = self.building_strata();
        let attaching = self.dual_pairs()?.into_iter().map(|(a, b)| [a.id(), b.id()]).collect();
        let mut by_depth = BTreeMap::new();
        for k in 0..=self.divisor.max_depth() {
            by_depth.insert(k, self.bundle_classes(k).len());
        }
        Ok(BuildingDump {
            levels: self.levels.clone(),
            counts: PieceCounts {
                pieces: self.pieces.len(),
                labelled_pieces: self.labelled_piece_count(),
                main_classes: self.main_piece_classes(),
                classes_by_depth: by_depth,
            },
            pieces: self.pieces.iter().map(|p| PieceRecord { id: p.id(), stratum: p.stratum.clone(), levels: p.levels.clone() }).collect(),
            divisor_strata: strata
                .into_iter()
                .map(|d| DivisorStratumRecord { id: d.id(), stratum: d.stratum, levels: d.levels, signs: d.signs })
                .collect(),
            attaching,
        })
    }
}

fn descends(d: &CombinatorialDivisor, from: &str, to: &str) -> bool {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([from.to_string()]);
    while let Some(id) = queue.pop_front() {
        if id == to {
            return true;
        }
        if let Some(s) = d.stratum(&id) {
            for b in &s.boundary {
                if seen.insert(b.clone()) {
                    queue.push_back(b.clone());
                }
            }
        }
    }
    false
}

#[derive(Clone, Debug)]
pub struct Collapse {
    pub building: LevelBuilding,
    pub relabel: Vec<(PieceLabel, PieceLabel)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceCounts {
    pub pieces: usize,
    pub labelled_pieces: usize,
    pub main_classes: usize,
    pub classes_by_depth: BTreeMap<usize, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceRecord {
    pub id: String,
    pub stratum: String,
    pub levels: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorStratumRecord {
    pub id: String,
    pub stratum: String,
    pub levels: Vec<u32>,
    pub signs: Vec<Sign>,
}

/// Machine-readable building: pieces, divisor strata and attaching pairs,
/// all referenced by stable string ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildingDump {
    pub levels: Levels,
    pub counts: PieceCounts,
    pub pieces: Vec<PieceRecord>,
    pub divisor_strata: Vec<DivisorStratumRecord>,
    pub attaching: Vec<[String; 2]>,
}

/// A point class on the `m` times rescaled disk.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DiskPoint {
    pub level: u32,
    pub sign: Sign,
}

/// Chain of a disk at level 0 and spheres at levels `1..=m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RescaledDisk {
    pub m: u32,
    pub components: Vec<u32>,
    pub point_classes: Vec<DiskPoint>,
    /// Zero divisor of every level.
    pub divisor: Vec<DiskPoint>,
    pub attaching: Vec<(DiskPoint, DiskPoint)>,
}

pub fn rescaled_disk(m: u32) -> RescaledDisk {
    let mut point_classes = Vec::new();
    for l in 0..=m {
        if l > 0 {
            point_classes.push(DiskPoint { level: l, sign: Sign::Minus });
        }
        point_classes.push(DiskPoint { level: l, sign: Sign::Zero });
        point_classes.push(DiskPoint { level: l, sign: Sign::Plus });
    }
    RescaledDisk {
        m,
        components: (0..=m).collect(),
        point_classes,
        divisor: (0..=m).map(|l| DiskPoint { level: l, sign: Sign::Plus }).collect(),
        attaching: (0..m)
            .map(|l| (DiskPoint { level: l, sign: Sign::Plus }, DiskPoint { level: l + 1, sign: Sign::Minus }))
            .collect(),
    }
}

/// Weight of the rescaling torus `(C*)^m` on the product of the two leading
/// coefficients at a node spanning levels `l_minus..=l_plus`. Entry `l-1`
/// is the exponent of the `l`-th factor. Level 0 is never rescaled.
pub fn torus_weight(l_minus: u32, l_plus: u32, m: u32) -> Result<Vec<i64>, BuildingError> {
    if l_minus > l_plus || l_plus > m {
        return Err(BuildingError::BadWeightLevels { l_minus, l_plus, m });
    }
    let mut w = vec![0i64; m as usize];
    if l_minus == l_plus {
        return Ok(w);
    }
    if l_minus >= 1 {
        w[l_minus as usize - 1] += 1;
    }
    w[l_plus as usize - 1] -= 1;
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divisor::{local_model, self_crossing_curve, two_components_meeting};

    #[test]
    fn two_component_counts() {
        let d = two_components_meeting();
        let b1 = build(&d, 1);
        assert_eq!(b1.main_piece_classes(), 3);
        assert_eq!(b1.pieces.len(), 4);
        let b2 = build(&d, 2);
        assert_eq!(b2.pieces_over("p").count(), 4);
        assert_eq!(b2.pieces.iter().filter(|p| p.level() == 2).count(), 5);
        for m in 1..=5 {
            let b = build(&d, m);
            assert_eq!(b.bundle_classes(2).len() as u32, m * m);
            assert_eq!(b.bundle_classes(1).len() as u32, m);
            assert_eq!(b.pieces_over("V1").count() as u32, m);
        }
        assert_eq!(build(&d, 0).pieces, vec![PieceLabel::new("X", vec![])]);
    }

    #[test]
    fn multi_buildings() {
        let d = two_components_meeting();
        let b = build_multi(&d, &[2, 2]).unwrap();
        let over_p: BTreeSet<Vec<u32>> = b.pieces_over("p").map(|p| p.levels.clone()).collect();
        assert_eq!(over_p, BTreeSet::from([vec![1, 1], vec![1, 2], vec![2, 1], vec![2, 2]]));
        assert_eq!(build_multi(&d, &[1, 3]).unwrap().pieces_over("p").count(), 3);
        assert!(matches!(build_multi(&self_crossing_curve(), &[1, 2]), Err(BuildingError::LinkedDirections(_))));
        assert!(matches!(build_multi(&d, &[1]), Err(BuildingError::LevelCount { .. })));
    }

    #[test]
    fn orbit_and_labelled_counts_differ_under_monodromy() {
        let mut d = self_crossing_curve();
        d.strata[2].monodromy = vec![vec![1, 0]];
        let b = build(&d, 2);
        assert_eq!(b.pieces_over("p").count(), 3);
        assert_eq!(b.labelled_piece_count(), 1 + 2 + 4);
    }

    #[test]
    fn sign_enumeration() {
        let b = build(&two_components_meeting(), 1);
        assert_eq!(b.divisor_strata(&PieceLabel::new("V1", vec![1])).len(), 3);
        assert_eq!(b.proper_divisor_strata(&PieceLabel::new("p", vec![1, 1])).len(), 8);
        let smooth = build(&local_model(1), 1);
        let only = smooth.proper_divisor_strata(&PieceLabel::new("H1", vec![0]));
        assert_eq!(only.len(), 1);
        assert_eq!(only[0].signs, vec![Sign::Plus]);
    }

    #[test]
    fn local_piece_counts() {
        for k in 1..=3 {
            for m in 0..=4u32 {
                let b = build(&local_model(k), m);
                let deepest = b.divisor.strata_of_depth(k).next().unwrap().id.clone();
                assert_eq!(b.local_pieces(&deepest).unwrap().len(), (m as usize + 1).pow(k as u32));
            }
        }
    }

    #[test]
    fn smooth_pairs_match_rescaled_disk() {
        for m in 0..=3 {
            let b = build(&local_model(1), m);
            let pairs = b.dual_pairs().unwrap();
            let disk = rescaled_disk(m);
            assert_eq!(pairs.len(), disk.attaching.len());
            for (lo, hi) in &disk.attaching {
                let want = (
                    DivisorStratum { stratum: "H1".into(), levels: vec![lo.level], signs: vec![lo.sign] },
                    DivisorStratum { stratum: "H1".into(), levels: vec![hi.level], signs: vec![hi.sign] },
                );
                assert!(pairs.contains(&want), "{want:?} in {pairs:?}");
            }
        }
        assert_eq!(rescaled_disk(2).components.len(), 3);
        assert_eq!(rescaled_disk(2).divisor.len(), 3);
        assert_eq!(rescaled_disk(0).divisor.len(), 1);
    }

    #[test]
    fn fiber_over_point_meets_edge_of_square() {
        let b = build(&two_components_meeting(), 1);
        let fiber = DivisorStratum { stratum: "p".into(), levels: vec![1, 0], signs: vec![Sign::Zero, Sign::Plus] };
        let partner = b.dual_partner(&fiber).unwrap();
        assert_eq!(partner.levels, vec![1, 1]);
        assert_eq!(partner.signs, vec![Sign::Zero, Sign::Minus]);
        assert_eq!(b.globalize(&PieceLabel::new("p", vec![1, 0])).unwrap(), PieceLabel::new("V1", vec![1]));
    }

    #[test]
    fn collapsing() {
        let d = two_components_meeting();
        let b = build(&d, 2);
        let c = b.collapse(&BTreeSet::from([2])).unwrap();
        assert_eq!(c.building, build(&d, 1));
        let c = b.collapse(&BTreeSet::from([1, 2])).unwrap();
        assert_eq!(c.building.pieces, vec![PieceLabel::new("X", vec![])]);
        assert!(c.relabel.iter().all(|(_, t)| t.stratum == "X"));
        let c = b.collapse(&BTreeSet::from([1])).unwrap();
        let img = c.relabel.iter().find(|(p, _)| p.levels == vec![1, 2]).unwrap();
        assert_eq!(img.1, PieceLabel::new("V2", vec![1]));
        assert_eq!(b.collapse(&BTreeSet::new()).unwrap().building, b);
        assert!(b.collapse(&BTreeSet::from([3])).is_err());
    }

    #[test]
    fn weights() {
        assert_eq!(torus_weight(0, 1, 1).unwrap(), vec![-1]);
        assert_eq!(torus_weight(1, 2, 2).unwrap(), vec![1, -1]);
        assert_eq!(torus_weight(0, 2, 2).unwrap(), vec![0, -1]);
        assert_eq!(torus_weight(2, 2, 3).unwrap(), vec![0, 0, 0]);
        assert!(torus_weight(2, 1, 3).is_err());
    }

    #[test]
    fn dump_round_trips() {
        let b = build(&two_components_meeting(), 2);
        let dump = b.dump().unwrap();
        let text = serde_json::to_string(&dump).unwrap();
        let back: BuildingDump = serde_json::from_str(&text).unwrap();
        assert_eq!(back, dump);
        assert!(text.contains(r#""levels":[2]"#));
        assert_eq!(dump.counts.classes_by_depth[&2], 4);
    }
}
