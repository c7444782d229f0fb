//! Named worked configurations.
//!
//! Leading coefficients are built from distinct primes: every fiber start
//! gets fresh primes, every node `y` gets its own constant `c(y) = 1/q`, and
//! the remaining coefficients along a fiber follow from the matching rule and
//! reciprocity across trivial components. The decorated fixtures are
//! therefore enhanced-matchable by construction, with coefficients that are
//! multiplicatively independent across fibers.

use crate::building::{Levels, PieceLabel, Sign};
use crate::divisor::{local_model, self_crossing_curve, two_components_meeting, CombinatorialDivisor};
use crate::exactnum::ExactNonzeroComplex;
use crate::maptype::{Component, ContactRecord, Fiber, MapType, SlotContact, SpecialPoint};
use std::collections::BTreeMap;

/// Names accepted by [`fixture`]. `rescaled-disk-m` stands for the default
/// `m = 2`; `rescaled-disk-K` is accepted for any `K ≥ 1`.
pub const NAMES: [&str; 10] =
    ["ex0-n2", "ex0-n3", "ex0-n4", "ex4dim", "ex4dim-b", "neck1a", "neck1b", "neck2", "neck3", "rescaled-disk-m"];

pub fn names() -> &'static [&'static str] {
    &NAMES
}

pub fn fixture(name: &str) -> Option<MapType> {
    let mt = match name {
        "ex0-n2" => ex0(2),
        "ex0-n3" => ex0(3),
        "ex0-n4" => ex0(4),
        "ex4dim" => neck1a_shape(two_components_meeting(), "V2"),
        "ex4dim-b" => ex4dim_b(),
        "neck1a" => neck1a_shape(self_crossing_curve(), "V"),
        "neck1b" => neck1b(),
        "neck2" => neck2(),
        "neck3" => neck3(),
        "rescaled-disk-m" => rescaled_disk(2),
        other => {
            let k: u32 = other.strip_prefix("rescaled-disk-")?.parse().ok()?;
            if k == 0 {
                return None;
            }
            rescaled_disk(k)
        }
    };
    Some(decorate(mt))
}

fn e(s: u32, sign: Sign, level: u32) -> SlotContact {
    SlotContact { s: Some(s), sign, level, coeff: None, formal: false }
}

fn plus(s: u32, level: u32) -> SlotContact {
    e(s, Sign::Plus, level)
}

fn minus(s: u32, level: u32) -> SlotContact {
    e(s, Sign::Minus, level)
}

fn formal(s: u32, level: u32) -> SlotContact {
    SlotContact { formal: true, ..plus(s, level) }
}

fn pt(id: &str, stratum: &str, slots: Vec<SlotContact>) -> SpecialPoint {
    SpecialPoint { id: id.into(), contact: ContactRecord { stratum: stratum.into(), slots } }
}

fn comp(id: &str, trivial: bool, stratum: &str, levels: Vec<u32>, points: Vec<SpecialPoint>) -> Component {
    Component { id: id.into(), genus: 0, trivial, piece: PieceLabel::new(stratum, levels), points }
}

fn node(a: &str, b: &str) -> [String; 2] {
    [a.into(), b.into()]
}

fn fiber(base: &str, start: &str, end: &str, trivial: &[&str]) -> Fiber {
    Fiber { base: base.into(), start: start.into(), end: end.into(), trivial: trivial.iter().map(|s| s.to_string()).collect() }
}

struct Shape {
    divisor: CombinatorialDivisor,
    levels: Levels,
    components: Vec<Component>,
    nodes: Vec<[String; 2]>,
    fibers: Vec<Fiber>,
    c1a: i64,
    av: i64,
    ell: u32,
}

impl From<Shape> for MapType {
    fn from(s: Shape) -> Self {
        MapType {
            divisor: s.divisor,
            levels: s.levels,
            components: s.components,
            nodes: s.nodes,
            fibers: s.fibers,
            c1a: s.c1a,
            av: s.av,
            chi: 2,
            ell: s.ell,
        }
    }
}

fn ex0(n: usize) -> MapType {
    let d = local_model(n);
    let deepest = d.strata_of_depth(n).next().expect("deepest stratum").id.clone();
    Shape {
        divisor: d,
        levels: Levels::Uniform(0),
        components: vec![comp("f", false, "X", vec![], vec![pt("x", &deepest, vec![plus(1, 0); n])])],
        nodes: vec![],
        fibers: vec![fiber("x", "x", "x", &[])],
        c1a: n as i64,
        av: n as i64,
        ell: 1,
    }
    .into()
}

fn ex4dim_b() -> MapType {
    Shape {
        divisor: self_crossing_curve(),
        levels: Levels::Uniform(1),
        components: vec![
            comp("f", false, "X", vec![], vec![pt("y-", "p", vec![plus(1, 0), plus(1, 0)])]),
            comp(
                "f1",
                false,
                "p",
                vec![1, 1],
                vec![pt("y+", "p", vec![minus(1, 1), minus(1, 1)]), pt("x1", "p", vec![plus(1, 1), plus(1, 1)])],
            ),
        ],
        nodes: vec![node("y-", "y+")],
        fibers: vec![fiber("y", "y-", "y+", &[]), fiber("x1", "x1", "x1", &[])],
        c1a: 3,
        av: 2,
        ell: 1,
    }
    .into()
}

/// Limit as `x0 → x1`: `f` on level 0, `f1` nontrivial on level 1, and the
/// `x2` branch broken into a neck component and a zero-divisor component.
/// `neck` is the branch whose normal direction is rescaled around `t1`.
fn neck1a_shape(divisor: CombinatorialDivisor, neck: &str) -> MapType {
    Shape {
        divisor,
        levels: Levels::Uniform(1),
        components: vec![
            comp(
                "f",
                false,
                "X",
                vec![],
                vec![pt("y0-", "p", vec![plus(1, 0), plus(1, 0)]), pt("x2-", "p", vec![plus(1, 0), plus(2, 0)])],
            ),
            comp(
                "f1",
                false,
                "p",
                vec![1, 1],
                vec![
                    pt("y0+", "p", vec![minus(1, 1), minus(1, 1)]),
                    pt("x0", "X", vec![]),
                    pt("x1", "p", vec![plus(1, 1), plus(1, 1)]),
                ],
            ),
            comp(
                "f21",
                true,
                neck,
                vec![1],
                vec![pt("t1a", "p", vec![formal(1, 0), minus(2, 1)]), pt("t1b", "p", vec![formal(1, 0), plus(2, 1)])],
            ),
            comp(
                "f22",
                true,
                "p",
                vec![1, 1],
                vec![pt("t2a", "p", vec![minus(1, 1), formal(2, 1)]), pt("x2", "p", vec![plus(1, 1), formal(2, 1)])],
            ),
        ],
        nodes: vec![node("y0-", "y0+"), node("x2-", "t1a"), node("t1b", "t2a")],
        fibers: vec![
            fiber("y0", "y0-", "y0+", &[]),
            fiber("x2", "x2-", "x2", &["f21", "f22"]),
            fiber("x0", "x0", "x0", &[]),
            fiber("x1", "x1", "x1", &[]),
        ],
        c1a: 3,
        av: 5,
        ell: 3,
    }
    .into()
}

/// Limit as `x0 → x2` over the self-crossing curve: a level-2 building with
/// one nontrivial component on level (1,2).
fn neck1b() -> MapType {
    Shape {
        divisor: self_crossing_curve(),
        levels: Levels::Uniform(2),
        components: vec![
            comp(
                "f",
                false,
                "X",
                vec![],
                vec![pt("y1-", "p", vec![plus(1, 0), plus(1, 0)]), pt("v-", "p", vec![plus(1, 0), plus(2, 0)])],
            ),
            comp(
                "f11",
                true,
                "p",
                vec![1, 1],
                vec![pt("s1a", "p", vec![minus(1, 1), minus(1, 1)]), pt("s1b", "p", vec![plus(1, 1), plus(1, 1)])],
            ),
            comp(
                "f12",
                true,
                "p",
                vec![2, 2],
                vec![pt("s2a", "p", vec![minus(1, 2), minus(1, 2)]), pt("x1", "p", vec![plus(1, 2), plus(1, 2)])],
            ),
            comp(
                "f21",
                true,
                "p",
                vec![0, 1],
                vec![pt("t1a", "p", vec![formal(1, 0), minus(2, 1)]), pt("t1b", "p", vec![formal(1, 0), plus(2, 1)])],
            ),
            comp(
                "f22",
                false,
                "p",
                vec![1, 2],
                vec![
                    pt("v+", "p", vec![minus(1, 1), minus(2, 2)]),
                    pt("x0", "X", vec![]),
                    pt("w-", "p", vec![plus(1, 1), plus(2, 2)]),
                ],
            ),
            comp(
                "f23",
                true,
                "p",
                vec![2, 2],
                vec![pt("t3a", "p", vec![minus(1, 2), formal(2, 2)]), pt("x2", "p", vec![plus(1, 2), formal(2, 2)])],
            ),
        ],
        nodes: vec![node("y1-", "s1a"), node("s1b", "s2a"), node("v-", "t1a"), node("t1b", "v+"), node("w-", "t3a")],
        fibers: vec![
            fiber("x1", "y1-", "x1", &["f11", "f12"]),
            fiber("v", "v-", "v+", &["f21"]),
            fiber("x0", "x0", "x0", &[]),
            fiber("x2", "w-", "x2", &["f23"]),
        ],
        c1a: 3,
        av: 5,
        ell: 3,
    }
    .into()
}

/// Limit as `x0 → x2` when the two branches are globally independent: a
/// level-(1,1) building.
fn neck2() -> MapType {
    Shape {
        divisor: two_components_meeting(),
        levels: Levels::PerComponent(vec![1, 1]),
        components: vec![
            comp(
                "f",
                false,
                "X",
                vec![],
                vec![pt("y-", "p", vec![plus(1, 0), plus(2, 0)]), pt("x1-", "p", vec![plus(1, 0), plus(1, 0)])],
            ),
            comp(
                "f1",
                false,
                "p",
                vec![1, 1],
                vec![
                    pt("y+", "p", vec![minus(1, 1), minus(2, 1)]),
                    pt("x0", "X", vec![]),
                    pt("x2", "p", vec![plus(1, 1), plus(2, 1)]),
                ],
            ),
            comp(
                "fa",
                true,
                "p",
                vec![1, 0],
                vec![pt("ta1", "p", vec![minus(1, 1), formal(1, 0)]), pt("ta2", "p", vec![plus(1, 1), formal(1, 0)])],
            ),
            comp(
                "fb",
                true,
                "p",
                vec![1, 1],
                vec![pt("tb1", "p", vec![formal(1, 1), minus(1, 1)]), pt("x1", "p", vec![formal(1, 1), plus(1, 1)])],
            ),
        ],
        nodes: vec![node("y-", "y+"), node("x1-", "ta1"), node("ta2", "tb1")],
        fibers: vec![
            fiber("y", "y-", "y+", &[]),
            fiber("x0", "x0", "x0", &[]),
            fiber("x2", "x2", "x2", &[]),
            fiber("x1", "x1-", "x1", &["fa", "fb"]),
        ],
        c1a: 3,
        av: 5,
        ell: 3,
    }
    .into()
}

/// A line through the corner of two coordinate lines, with its marked point
/// falling into the corner: three components on level 1.
fn neck3() -> MapType {
    Shape {
        divisor: two_components_meeting(),
        levels: Levels::Uniform(1),
        components: vec![
            comp(
                "f1",
                false,
                "p",
                vec![1, 1],
                vec![
                    pt("x", "X", vec![]),
                    pt("na", "p", vec![plus(1, 1), minus(1, 1)]),
                    pt("nb", "p", vec![minus(1, 1), plus(1, 1)]),
                ],
            ),
            comp(
                "fa",
                true,
                "V1",
                vec![1],
                vec![pt("ta", "p", vec![formal(1, 1), plus(1, 0)]), pt("xa", "V1", vec![formal(1, 1)])],
            ),
            comp(
                "fb",
                true,
                "V2",
                vec![1],
                vec![pt("tb", "p", vec![plus(1, 0), formal(1, 1)]), pt("xb", "V2", vec![formal(1, 1)])],
            ),
        ],
        nodes: vec![node("na", "ta"), node("nb", "tb")],
        fibers: vec![fiber("x", "x", "x", &[]), fiber("xa", "na", "xa", &["fa"]), fiber("xb", "nb", "xb", &["fb"])],
        c1a: 3,
        av: 2,
        ell: 3,
    }
    .into()
}

/// Nontrivial components `f0, …, fm` over a smooth divisor, one per level,
/// joined by nodes of contact order 3, with a marked contact on level `m`.
fn rescaled_disk(m: u32) -> MapType {
    let s = 3;
    let mut components = Vec::new();
    let mut nodes = Vec::new();
    let mut fibers = Vec::new();
    for j in 0..=m {
        let mut points = Vec::new();
        if j > 0 {
            points.push(pt(&format!("u{j}+"), "H1", vec![minus(s, j)]));
        }
        if j < m {
            let k = j + 1;
            points.push(pt(&format!("u{k}-"), "H1", vec![plus(s, j)]));
            nodes.push(node(&format!("u{k}-"), &format!("u{k}+")));
            fibers.push(fiber(&format!("u{k}"), &format!("u{k}-"), &format!("u{k}+"), &[]));
        } else {
            points.push(pt("x", "H1", vec![plus(s, m)]));
            fibers.push(fiber("x", "x", "x", &[]));
        }
        let (stratum, levels) = if j == 0 { ("X", vec![]) } else { ("H1", vec![j]) };
        components.push(comp(&format!("f{j}"), false, stratum, levels, points));
    }
    Shape {
        divisor: local_model(1),
        levels: Levels::Uniform(m),
        components,
        nodes,
        fibers,
        c1a: s as i64,
        av: s as i64,
        ell: 1,
    }
    .into()
}

struct Primes(u64);

impl Primes {
    fn next(&mut self) -> u64 {
        loop {
            self.0 += 1;
            let n = self.0;
            if n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0) {
                return n;
            }
        }
    }

    fn coeff(&mut self) -> ExactNonzeroComplex {
        ExactNonzeroComplex::prime(self.next()).expect("prime")
    }
}

/// Fill in leading coefficients along every fiber.
fn decorate(mut mt: MapType) -> MapType {
    let mut primes = Primes(1);
    let mut assigned: BTreeMap<(String, usize), ExactNonzeroComplex> = BTreeMap::new();
    for f in &mt.fibers {
        let ch = mt.chain(f).expect("fixture fibers are well formed");
        let k = ch.frame.slots.len();
        let slot_of = |p: &SpecialPoint, i: usize| -> Option<usize> {
            let e = mt.align(ch.frame, &p.contact)[i]?;
            p.contact.slots.iter().position(|x| std::ptr::eq(x, e))
        };
        let start = ch.nodes.first().map_or_else(|| mt.point(&f.start).expect("start").1, |n| n.lower);
        let mut cur: Vec<Option<ExactNonzeroComplex>> = (0..k)
            .map(|i| {
                let j = slot_of(start, i)?;
                let a = primes.coeff();
                assigned.insert((start.id.clone(), j), a.clone());
                Some(a)
            })
            .collect();
        for (pos, n) in ch.nodes.iter().enumerate() {
            let q = primes.coeff();
            let mut upper = vec![None; k];
            for i in 0..k {
                let Some(j) = slot_of(n.upper, i) else { continue };
                let s = n.upper.contact.slots[j].s.unwrap_or(1) as i64;
                let a = match &cur[i] {
                    Some(lo) => q.pow_int(s).div(lo),
                    None => primes.coeff(),
                };
                assigned.insert((n.upper.id.clone(), j), a.clone());
                upper[i] = Some(a);
            }
            if let Some(t) = ch.trivial.get(pos) {
                let other = t.points.iter().find(|p| p.id != n.upper.id).expect("two points");
                cur = (0..k)
                    .map(|i| {
                        let j = slot_of(other, i)?;
                        let a = upper[i].as_ref().map_or_else(|| primes.coeff(), ExactNonzeroComplex::inv);
                        assigned.insert((other.id.clone(), j), a.clone());
                        Some(a)
                    })
                    .collect();
            }
        }
    }
    for c in &mut mt.components {
        for p in &mut c.points {
            for (j, e) in p.contact.slots.iter_mut().enumerate() {
                if let Some(a) = assigned.remove(&(p.id.clone(), j)) {
                    e.coeff = Some(a);
                }
            }
        }
    }
    mt
}
