use super::coeff::ExactNonzeroComplex;
use super::matrix::IntegerMatrix;
use super::rational::{reduce_mod_one, Rational};
use super::smith::smith_normal_form;
use super::ExactError;
use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
#[cfg(test)]
use num_traits::One;
use std::collections::BTreeSet;

/// Branch sets larger than this are counted but not listed.
pub const MAX_ENUMERATED_BRANCHES: usize = 4096;

/// Outcome of solving `∏_j μ_j^{M[k][j]} = p_k` for all `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PowerSystemSolution {
    /// `equation` is the first index whose prefix of equations has no solution.
    Inconsistent { equation: usize },
    Solvable(PowerSolutionSet),
}

/// Solutions modulo the connected (continuous) part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerSolutionSet {
    /// Dimension of the continuous family, `cols − rank(M)`.
    pub free_dimension: usize,
    /// Number of torsion branches: the product of nonzero elementary divisors.
    pub branches: BigUint,
    /// One solution per branch, with free coordinates set to 1; empty when
    /// `branches` exceeds [`MAX_ENUMERATED_BRANCHES`].
    pub representatives: Vec<Vec<ExactNonzeroComplex>>,
}

impl PowerSystemSolution {
    pub fn is_consistent(&self) -> bool {
        matches!(self, Self::Solvable(_))
    }

    pub fn solutions(&self) -> Option<&PowerSolutionSet> {
        match self {
            Self::Solvable(s) => Some(s),
            Self::Inconsistent { .. } => None,
        }
    }
}

impl PowerSolutionSet {
    pub fn is_finite(&self) -> bool {
        self.free_dimension == 0
    }
}

pub fn solve_power_system(
    m: &IntegerMatrix,
    p: &[ExactNonzeroComplex],
) -> Result<PowerSystemSolution, ExactError> {
    if p.len() != m.rows() {
        return Err(ExactError::Dimension { expected: m.rows(), found: p.len() });
    }
    let cols = m.cols();
    let mq = m.to_rational();

    // Magnitudes: one rational linear system per prime in the support.
    let primes: BTreeSet<u64> = p.iter().flat_map(|z| z.magnitude().keys().copied()).collect();
    let mut mags: Vec<(u64, Vec<Rational>)> = Vec::new();
    let mut bad: Option<usize> = None;
    for &q in &primes {
        let rhs: Vec<Rational> = p.iter().map(|z| z.mag_exponent(q)).collect();
        match mq.solve(&rhs) {
            Ok(x) => mags.push((q, x)),
            Err(k) => bad = Some(bad.map_or(k, |b: usize| b.min(k))),
        }
    }

    // Arguments: solve over Q/Z through the Smith form U·M·V = D.
    let args: Vec<Rational> = p.iter().map(|z| z.arg().clone()).collect();
    if let Some(k) = first_argument_conflict(m, &args) {
        bad = Some(bad.map_or(k, |b| b.min(k)));
    }
    if let Some(equation) = bad {
        return Ok(PowerSystemSolution::Inconsistent { equation });
    }

    let s = smith_normal_form(m);
    let d = s.invariant_factors();
    let r = d.len();
    let bp = transform(&s.u, &args);
    let branches: BigUint = d.iter().map(|x| x.to_biguint().expect("positive")).product();

    let mut representatives = Vec::new();
    if branches <= BigUint::from(MAX_ENUMERATED_BRANCHES) {
        let radices: Vec<usize> = d.iter().map(|x| x.to_usize().expect("small")).collect();
        let total = radices.iter().product::<usize>();
        for idx in 0..total {
            let mut rem = idx;
            let mut theta_p = vec![Rational::zero(); cols];
            for i in 0..r {
                let j = rem % radices[i];
                rem /= radices[i];
                theta_p[i] = (&bp[i] + Rational::from_integer(j.into())) / Rational::from_integer(d[i].clone());
            }
            let theta: Vec<Rational> = (0..cols)
                .map(|c| reduce_mod_one(&(0..cols).map(|k| Rational::from_integer(s.v.get(c, k).clone()) * &theta_p[k]).sum()))
                .collect();
            let sol = (0..cols)
                .map(|j| {
                    ExactNonzeroComplex::from_parts(mags.iter().map(|(q, x)| (*q, x[j].clone())), theta[j].clone())
                        .expect("primes come from valid inputs")
                })
                .collect();
            representatives.push(sol);
        }
    }
    Ok(PowerSystemSolution::Solvable(PowerSolutionSet { free_dimension: cols - r, branches, representatives }))
}

fn transform(u: &IntegerMatrix, b: &[Rational]) -> Vec<Rational> {
    (0..u.rows())
        .map(|i| reduce_mod_one(&(0..u.cols()).map(|k| Rational::from_integer(u.get(i, k).clone()) * &b[k]).sum()))
        .collect()
}

fn argument_consistent(m: &IntegerMatrix, b: &[Rational]) -> bool {
    let s = smith_normal_form(m);
    let r = s.rank();
    transform(&s.u, b).iter().skip(r).all(Zero::is_zero)
}

fn first_argument_conflict(m: &IntegerMatrix, b: &[Rational]) -> Option<usize> {
    if argument_consistent(m, b) {
        return None;
    }
    (0..m.rows()).find(|&k| !argument_consistent(&m.top_rows(k + 1), &b[..=k]))
}

/// Left-hand sides `∏_j μ_j^{M[k][j]}` of a power system.
pub fn apply_powers(m: &IntegerMatrix, mu: &[ExactNonzeroComplex]) -> Vec<ExactNonzeroComplex> {
    assert_eq!(mu.len(), m.cols(), "one value per column");
    (0..m.rows()).map(|k| evaluate_row(m.row(k), mu)).collect()
}

fn evaluate_row(row: &[BigInt], mu: &[ExactNonzeroComplex]) -> ExactNonzeroComplex {
    row.iter().zip(mu).fold(ExactNonzeroComplex::one(), |acc, (e, z)| {
        if e.is_zero() {
            acc
        } else {
            acc.mul(&z.pow(&Rational::from_integer(e.clone())))
        }
    })
}
