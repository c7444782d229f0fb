//! Brute-force oracles shared by the integration suites. They are written
//! independently of the library algorithms: plain Gaussian elimination,
//! exhaustive grids, and candidate substitution.
#![allow(dead_code)]

use ncd_moduli::exactnum::{rat, ExactNonzeroComplex, Rational};
use ncd_moduli::building::{Levels, PieceLabel, Sign};
use ncd_moduli::divisor::{local_model, two_components_meeting};
use ncd_moduli::maptype::{Component, ContactRecord, Fiber, MapType, SlotContact, SpecialPoint};
use std::collections::{BTreeMap, BTreeSet};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

/// Rank by textbook Gauss-Jordan elimination on rationals.
pub fn rank_oracle(rows: &[Vec<Rational>], cols: usize) -> usize {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(rank, p);
        let piv = m[rank][c].clone();
        for x in m[rank].iter_mut() {
            *x = &*x / &piv;
        }
        for r in 0..m.len() {
            if r != rank && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                let src = m[rank].clone();
                for (x, y) in m[r].iter_mut().zip(&src) {
                    *x -= &f * y;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a.abs() } else { gcd(b, a % b) }
}

/// Positive rationals with denominator ≤ 8 and value ≤ 8, scaled by 840.
fn grid() -> Vec<i64> {
    let mut out: Vec<i64> = Vec::new();
    for q in 1..=8i64 {
        for p in 1..=8 * q {
            if gcd(p, q) == 1 {
                out.push(p * (840 / q));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

fn on_grid(u: i64) -> bool {
    u > 0 && u <= 8 * 840 && 840 / gcd(u, 840) <= 8
}

/// Searches the grid of positive rationals (denominators ≤ 8, values ≤ 8)
/// for a point of the kernel. The last coordinate is solved from an
/// equation when possible instead of enumerated.
pub fn grid_positive_oracle(a: &[Vec<i64>], n: usize) -> Option<Vec<Rational>> {
    let g = grid();
    let solve_row = a.iter().find(|r| r[n - 1] != 0);
    let mut u = vec![0i64; n];
    fn rec(
        i: usize,
        n: usize,
        g: &[i64],
        a: &[Vec<i64>],
        solve_row: Option<&Vec<i64>>,
        u: &mut Vec<i64>,
    ) -> bool {
        if i == n - 1 {
            let cands: Vec<i64> = match solve_row {
                Some(r) => {
                    let s: i64 = (0..n - 1).map(|k| r[k] * u[k]).sum();
                    if s % r[n - 1] != 0 {
                        return false;
                    }
                    let v = -s / r[n - 1];
                    if !on_grid(v) {
                        return false;
                    }
                    vec![v]
                }
                None => g.to_vec(),
            };
            for v in cands {
                u[n - 1] = v;
                if a.iter().all(|r| r.iter().zip(u.iter()).map(|(x, y)| x * y).sum::<i64>() == 0) {
                    return true;
                }
            }
            return false;
        }
        for &v in g {
            u[i] = v;
            if rec(i + 1, n, g, a, solve_row, u) {
                return true;
            }
        }
        false
    }
    if n == 0 {
        return Some(vec![]);
    }
    if rec(0, n, &g, a, solve_row, &mut u) {
        Some(u.iter().map(|&x| rat(x, 840)).collect())
    } else {
        None
    }
}

/// All argument vectors `j/L` (`0 ≤ j < L`) satisfying `M·θ ≡ b (mod 1)`.
pub fn argument_oracle(m: &[Vec<i64>], cols: usize, b: &[Rational], l: i64) -> Vec<Vec<Rational>> {
    let mut out = Vec::new();
    let total = (l as usize).pow(cols as u32);
    for idx in 0..total {
        let mut rem = idx;
        let theta: Vec<Rational> = (0..cols)
            .map(|_| {
                let j = (rem % l as usize) as i64;
                rem /= l as usize;
                rat(j, l)
            })
            .collect();
        let ok = m.iter().zip(b).all(|(row, bk)| {
            let s: Rational = row.iter().zip(&theta).map(|(x, t)| Rational::from_integer((*x).into()) * t).sum::<Rational>() - bk;
            s.is_integer()
        });
        if ok {
            out.push(theta);
        }
    }
    out
}

pub const PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];

pub fn arb_rational(max_num: i64, max_den: i64) -> impl Strategy<Value = Rational> {
    (-max_num..=max_num, 1..=max_den).prop_map(|(n, d)| rat(n, d))
}

pub fn arb_coeff() -> impl Strategy<Value = ExactNonzeroComplex> {
    (
        proptest::collection::vec((proptest::sample::select(PRIMES.to_vec()), arb_rational(6, 4)), 0..4),
        (0i64..24, 1i64..=24),
    )
        .prop_map(|(mag, (n, d))| ExactNonzeroComplex::from_parts(mag, rat(n % d, d)).unwrap())
}

pub fn one() -> Rational {
    Rational::one()
}

/// Number of `k`-subsets of an `n`-set, by bitmask enumeration.
pub fn subsets(n: usize, k: usize) -> u64 {
    (0u32..1 << n).filter(|m| m.count_ones() as usize == k).count() as u64
}

/// Pairs (subset of size `k`, chosen element), by enumeration.
pub fn pointed_subsets(n: usize, k: usize) -> u64 {
    (0u32..1 << n).filter(|m| m.count_ones() as usize == k).map(|m| (0..n).filter(|i| m >> i & 1 == 1).count() as u64).sum()
}

/// Expected dimension in complex-dimension form: `2c₁A + (n − 3)χ + 2ℓ − 2AV`
/// with `n = dimX / 2`.
pub fn dim_oracle(c1a: i64, dim_x: i64, chi: i64, ell: i64, av: i64) -> i64 {
    let n = dim_x / 2;
    2 * c1a + (n - 3) * chi + 2 * ell - 2 * av
}

/// Plain (magnitude exponents, argument) pair.
pub type Parts = (BTreeMap<u64, Rational>, Rational);

pub fn parts(c: &ExactNonzeroComplex) -> Parts {
    (c.magnitude().clone(), c.arg().clone())
}

fn frac(q: &Rational) -> Rational {
    q - q.floor()
}

pub fn parts_mul(a: &Parts, b: &Parts) -> Parts {
    let mut mag = a.0.clone();
    for (p, e) in &b.0 {
        *mag.entry(*p).or_insert_with(Rational::zero) += e;
    }
    mag.retain(|_, e| !e.is_zero());
    (mag, frac(&(&a.1 + &b.1)))
}

pub fn parts_inv(a: &Parts) -> Parts {
    (a.0.iter().map(|(p, e)| (*p, -e)).collect(), frac(&-&a.1))
}

/// Every fraction `j/L` in `[0, 1)` with `L ≤ max_den`.
pub fn fractions(max_den: i64) -> Vec<Rational> {
    let set: BTreeSet<Rational> = (1..=max_den).flat_map(|l| (0..l).map(move |j| rat(j, l))).collect();
    set.into_iter().collect()
}

/// All `c` with `c^{s_i} = r_i` for every equation, by enumeration:
/// magnitude exponents are drawn from `{e_p(r_i)/s_i} ∪ {0}` over the prime
/// support, arguments from fractions with denominator at most `max_den`.
pub fn power_candidates(eqs: &[(u32, Parts)], max_den: i64) -> Vec<Parts> {
    let primes: BTreeSet<u64> = eqs.iter().flat_map(|(_, r)| r.0.keys().copied()).collect();
    let mut mags: Vec<BTreeMap<u64, Rational>> = vec![BTreeMap::new()];
    for p in &primes {
        let mut opts: BTreeSet<Rational> = BTreeSet::from([Rational::zero()]);
        for (s, r) in eqs {
            if let Some(e) = r.0.get(p) {
                opts.insert(e / Rational::from_integer((*s).into()));
            }
        }
        mags = mags
            .into_iter()
            .flat_map(|m| {
                opts.iter().map(move |e| {
                    let mut m = m.clone();
                    if !e.is_zero() {
                        m.insert(*p, e.clone());
                    }
                    m
                })
            })
            .collect();
    }
    let args = fractions(max_den);
    let mut out = Vec::new();
    for mag in &mags {
        for arg in &args {
            let ok = eqs.iter().all(|(s, r)| {
                let s = Rational::from_integer((*s).into());
                let mag_ok = primes.iter().all(|p| {
                    let have = mag.get(p).cloned().unwrap_or_else(Rational::zero) * &s;
                    have == r.0.get(p).cloned().unwrap_or_else(Rational::zero)
                });
                mag_ok && (arg * &s - &r.1).is_integer()
            });
            if ok {
                out.push((mag.clone(), arg.clone()));
            }
        }
    }
    out
}

/// Enhanced matching decided node by node through [`power_candidates`].
pub fn enhanced_oracle(mt: &MapType) -> bool {
    mt.nodes.iter().all(|[a, b]| {
        let (Some((_, x)), Some((_, y))) = (mt.point(a), mt.point(b)) else {
            return true;
        };
        let eqs: Vec<(u32, Parts)> = x
            .contact
            .slots
            .iter()
            .zip(&y.contact.slots)
            .filter_map(|(u, v)| {
                let s = u.s.or(v.s)?;
                let prod = parts_mul(&parts(u.coeff.as_ref()?), &parts(v.coeff.as_ref()?));
                Some((s, parts_inv(&prod)))
            })
            .collect();
        eqs.is_empty() || !power_candidates(&eqs, 24).is_empty()
    })
}

pub fn small_coeff() -> impl Strategy<Value = ExactNonzeroComplex> {
    (proptest::collection::vec((proptest::sample::select(vec![2u64, 3, 5]), -3i64..=3), 0..3), 0i64..6)
        .prop_map(|(mag, j)| ExactNonzeroComplex::from_parts(mag.into_iter().map(|(p, e)| (p, rat(e, 1))), rat(j, 6)).unwrap())
}

/// Exact decision of `∃ x > 0 with A·x = 0`: by scaling this is `A·x = 0,
/// x ≥ 1`. Pivot variables are eliminated by Gauss-Jordan reduction and the
/// remaining inequalities in the free variables go through Fourier-Motzkin.
pub fn cone_oracle(a: &[Vec<i64>], n: usize) -> bool {
    let mut m: Vec<Vec<Rational>> = a.iter().map(|r| r.iter().map(|&x| rat(x, 1)).collect()).collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(row, p);
        let lead = m[row][col].clone();
        for x in m[row].iter_mut() {
            *x = &*x / &lead;
        }
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..n {
                    let v = &m[row][c] * &f;
                    m[r][c] -= v;
                }
            }
        }
        pivots.push((row, col));
        row += 1;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.iter().any(|p| p.1 == *c)).collect();
    // Each inequality is `c·y + d ≤ 0` over the free variables `y`.
    let mut ineqs: Vec<(Vec<Rational>, Rational)> = Vec::new();
    for (k, _) in free.iter().enumerate() {
        let mut c = vec![Rational::zero(); free.len()];
        c[k] = -Rational::one();
        ineqs.push((c, Rational::one()));
    }
    for &(r, _) in &pivots {
        // x_p = −Σ m[r][f]·y_f ≥ 1.
        ineqs.push((free.iter().map(|&f| m[r][f].clone()).collect(), Rational::one()));
    }
    for v in 0..free.len() {
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for q in ineqs {
            if q.0[v].is_positive() {
                pos.push(q);
            } else if q.0[v].is_negative() {
                neg.push(q);
            } else {
                rest.push(q);
            }
        }
        for (pc, pd) in &pos {
            for (nc, nd) in &neg {
                let (wp, wn) = (-&nc[v], pc[v].clone());
                let c: Vec<Rational> = pc.iter().zip(nc).map(|(x, y)| x * &wp + y * &wn).collect();
                rest.push((c, pd * &wp + nd * &wn));
            }
        }
        rest.sort();
        rest.dedup();
        ineqs = rest;
    }
    ineqs.iter().all(|(_, d)| !d.is_positive())
}

fn entry(s: u32, sign: Sign, level: u32, coeff: ExactNonzeroComplex) -> SlotContact {
    SlotContact { s: Some(s), sign, level, coeff: Some(coeff), formal: false }
}

/// One random node between a level-0 component and a level-1 component.
#[derive(Clone, Debug)]
pub struct NodeSpec {
    pub s: Vec<u32>,
    pub lower: Vec<ExactNonzeroComplex>,
    pub upper: Vec<ExactNonzeroComplex>,
}

/// Nodes of depth 1 (smooth divisor) or 2 (two branches) joining `f` on
/// level 0 to `f1` on level 1.
pub fn enhanced_instance(depth: usize, nodes: &[NodeSpec]) -> MapType {
    let (divisor, stratum) = if depth == 1 { (local_model(1), "H1") } else { (two_components_meeting(), "p") };
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    let mut pairs = Vec::new();
    let mut fibers = Vec::new();
    for (j, n) in nodes.iter().enumerate() {
        let (a, b) = (format!("y{j}-"), format!("y{j}+"));
        let rec = |sign, level, c: &[ExactNonzeroComplex]| ContactRecord {
            stratum: stratum.into(),
            slots: n.s.iter().zip(c).map(|(&s, x)| entry(s, sign, level, x.clone())).collect(),
        };
        lo.push(SpecialPoint { id: a.clone(), contact: rec(Sign::Plus, 0, &n.lower) });
        hi.push(SpecialPoint { id: b.clone(), contact: rec(Sign::Minus, 1, &n.upper) });
        fibers.push(Fiber { base: format!("y{j}"), start: a.clone(), end: b.clone(), trivial: vec![] });
        pairs.push([a, b]);
    }
    MapType {
        divisor,
        levels: Levels::Uniform(1),
        components: vec![
            Component { id: "f".into(), genus: 0, trivial: false, piece: PieceLabel::new("X", vec![]), points: lo },
            Component { id: "f1".into(), genus: 0, trivial: false, piece: PieceLabel::new(stratum, vec![1; depth]), points: hi },
        ],
        nodes: pairs,
        fibers,
        c1a: 0,
        av: 0,
        chi: 2,
        ell: 0,
    }
}
