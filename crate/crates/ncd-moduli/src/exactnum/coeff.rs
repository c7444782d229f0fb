use super::rational::{format_rational, reduce_mod_one, Rational};
use super::{serde_rational, ExactError};
use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::Mul;

/// A nonzero complex number `∏ p^{e_p} · exp(2πi·arg)` with rational
/// prime exponents and a rational argument measured in turns.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExactNonzeroComplex {
    mag: BTreeMap<u64, Rational>,
    arg: Rational,
}

impl Default for ExactNonzeroComplex {
    fn default() -> Self {
        Self::one()
    }
}

impl ExactNonzeroComplex {
    pub fn one() -> Self {
        Self { mag: BTreeMap::new(), arg: Rational::zero() }
    }

    /// Builds a value from prime exponents and an argument; zero exponents are
    /// dropped and the argument is reduced into `[0, 1)`.
    pub fn from_parts(
        mag: impl IntoIterator<Item = (u64, Rational)>,
        arg: Rational,
    ) -> Result<Self, ExactError> {
        let mut out = BTreeMap::new();
        for (p, e) in mag {
            if !is_prime(p) {
                return Err(ExactError::NotPrime(p));
            }
            if !e.is_zero() {
                let slot: &mut Rational = out.entry(p).or_insert_with(Rational::zero);
                *slot += e;
                if slot.is_zero() {
                    out.remove(&p);
                }
            }
        }
        Ok(Self { mag: out, arg: reduce_mod_one(&arg) })
    }

    pub fn prime(p: u64) -> Result<Self, ExactError> {
        Self::from_parts([(p, Rational::one())], Rational::zero())
    }

    /// The root of unity `exp(2πi·turns)`.
    pub fn unit_root(turns: Rational) -> Self {
        Self { mag: BTreeMap::new(), arg: reduce_mod_one(&turns) }
    }

    pub fn from_integer(n: i64) -> Result<Self, ExactError> {
        Self::from_rational(&Rational::from_integer(n.into()))
    }

    pub fn from_rational(q: &Rational) -> Result<Self, ExactError> {
        if q.is_zero() {
            return Err(ExactError::Zero);
        }
        let mut mag: Vec<(u64, Rational)> = Vec::new();
        for (p, e) in factor(&q.numer().abs())? {
            mag.push((p, Rational::from_integer(e.into())));
        }
        for (p, e) in factor(q.denom())? {
            mag.push((p, Rational::from_integer((-(e as i64)).into())));
        }
        let arg = if q.is_negative() { Rational::new(1.into(), 2.into()) } else { Rational::zero() };
        Self::from_parts(mag, arg)
    }

    pub fn magnitude(&self) -> &BTreeMap<u64, Rational> {
        &self.mag
    }

    pub fn mag_exponent(&self, p: u64) -> Rational {
        self.mag.get(&p).cloned().unwrap_or_else(Rational::zero)
    }

    /// Argument in turns, in `[0, 1)`.
    pub fn arg(&self) -> &Rational {
        &self.arg
    }

    pub fn is_one(&self) -> bool {
        self.mag.is_empty() && self.arg.is_zero()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut mag = self.mag.clone();
        for (p, e) in &other.mag {
            let slot = mag.entry(*p).or_insert_with(Rational::zero);
            *slot += e;
            if slot.is_zero() {
                mag.remove(p);
            }
        }
        Self { mag, arg: reduce_mod_one(&(&self.arg + &other.arg)) }
    }

    pub fn inv(&self) -> Self {
        Self {
            mag: self.mag.iter().map(|(p, e)| (*p, -e)).collect(),
            arg: reduce_mod_one(&-&self.arg),
        }
    }

    pub fn div(&self, other: &Self) -> Self {
        self.mul(&other.inv())
    }

    /// Principal power: exponents scale by `q`, the argument scales by `q`
    /// and is reduced mod 1. Use [`roots`](Self::roots) for every branch.
    pub fn pow(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Self::one();
        }
        Self {
            mag: self.mag.iter().map(|(p, e)| (*p, e * q)).collect(),
            arg: reduce_mod_one(&(&self.arg * q)),
        }
    }

    pub fn pow_int(&self, n: i64) -> Self {
        self.pow(&Rational::from_integer(n.into()))
    }

    /// All `n` values whose `n`-th power is `self`.
    pub fn roots(&self, n: u32) -> Result<Vec<Self>, ExactError> {
        if n == 0 {
            return Err(ExactError::ZeroRootOrder);
        }
        let nq = Rational::from_integer(n.into());
        let mag: BTreeMap<u64, Rational> = self.mag.iter().map(|(p, e)| (*p, e / &nq)).collect();
        Ok((0..n)
            .map(|j| Self {
                mag: mag.clone(),
                arg: reduce_mod_one(&((&self.arg + Rational::from_integer(j.into())) / &nq)),
            })
            .collect())
    }

    /// The value as a rational number, when it is one.
    pub fn to_rational(&self) -> Option<Rational> {
        let sign = if self.arg.is_zero() {
            1
        } else if self.arg == Rational::new(1.into(), 2.into()) {
            -1
        } else {
            return None;
        };
        let mut out = Rational::from_integer(sign.into());
        for (p, e) in &self.mag {
            if !e.is_integer() {
                return None;
            }
            let k = e.to_integer().to_i32()?;
            let base = Rational::from_integer((*p).into());
            out *= if k >= 0 { num_traits::pow(base, k as usize) } else { num_traits::pow(base.recip(), (-k) as usize) };
        }
        Some(out)
    }
}

impl Mul for &ExactNonzeroComplex {
    type Output = ExactNonzeroComplex;
    fn mul(self, rhs: Self) -> ExactNonzeroComplex {
        ExactNonzeroComplex::mul(self, rhs)
    }
}

impl fmt::Display for ExactNonzeroComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mag = if self.mag.is_empty() {
            "1".to_string()
        } else {
            self.mag
                .iter()
                .map(|(p, e)| if e.is_one() { p.to_string() } else { format!("{p}^({})", format_rational(e)) })
                .collect::<Vec<_>>()
                .join("·")
        };
        write!(f, "({mag}, {} turn)", format_rational(&self.arg))
    }
}

#[derive(Deserialize)]
struct Wire {
    primes: BTreeMap<String, WireQ>,
    #[serde(with = "serde_rational")]
    arg: Rational,
}

#[derive(Serialize, Deserialize)]
struct WireQ(#[serde(with = "serde_rational")] Rational);

impl Serialize for ExactNonzeroComplex {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        // Keys sort numerically in the map but lexically as strings; keep the
        // numeric order by emitting through an order-preserving sequence.
        use serde::ser::SerializeStruct;
        struct Primes<'a>(&'a BTreeMap<u64, Rational>);
        impl Serialize for Primes<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                use serde::ser::SerializeMap;
                let mut m = s.serialize_map(Some(self.0.len()))?;
                for (p, e) in self.0 {
                    m.serialize_entry(&p.to_string(), &WireQ(e.clone()))?;
                }
                m.end()
            }
        }
        let mut st = s.serialize_struct("ExactNonzeroComplex", 2)?;
        st.serialize_field("primes", &Primes(&self.mag))?;
        st.serialize_field("arg", &WireQ(self.arg.clone()))?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for ExactNonzeroComplex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let w = Wire::deserialize(d)?;
        let mut mag = Vec::new();
        for (k, v) in w.primes {
            let p: u64 = k.parse().map_err(|_| D::Error::custom(format!("bad prime key `{k}`")))?;
            mag.push((p, v.0));
        }
        Self::from_parts(mag, w.arg).map_err(D::Error::custom)
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'outer: for a in BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn factor(n: &BigInt) -> Result<Vec<(u64, u32)>, ExactError> {
    debug_assert!(n.sign() != Sign::Minus);
    let mut out = Vec::new();
    let mut rest = n.clone();
    let mut p: u64 = 2;
    while p <= 1_000_000 && rest > BigInt::one() {
        let bp = BigInt::from(p);
        let mut e = 0;
        while (&rest % &bp).is_zero() {
            rest /= &bp;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > BigInt::one() {
        match rest.to_u64() {
            Some(r) if is_prime(r) => out.push((r, 1)),
            _ => return Err(ExactError::Unfactorable(n.to_string())),
        }
    }
    Ok(out)
}
