use super::matrix::RationalMatrix;
use super::rational::{lcm_of_denominators, Rational};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// A vector `v` with `A·v = 0` and every coordinate strictly positive, or
/// `None` when the open positive orthant misses the kernel.
///
/// Decided exactly by phase-one simplex (Bland's rule) on
/// `{A·v = 0, v ≥ 1}`; the cone is scale invariant so the two problems are
/// equivalent. The witness is returned as a primitive integer vector.
pub fn strict_positive_solution(a: &RationalMatrix) -> Option<Vec<Rational>> {
    let (m, n) = (a.rows(), a.cols());
    // v = 1 + w, w ≥ 0:  A·w = -A·1
    let ones = vec![Rational::one(); n];
    let b: Vec<Rational> = a.mul_vec(&ones).into_iter().map(|x| -x).collect();

    // Tableau columns: n structural, m artificial, then the right-hand side.
    let width = n + m + 1;
    let mut t: Vec<Vec<Rational>> = (0..m)
        .map(|r| {
            let flip = b[r].is_negative();
            let mut row = vec![Rational::zero(); width];
            for c in 0..n {
                row[c] = if flip { -a.get(r, c).clone() } else { a.get(r, c).clone() };
            }
            row[n + r] = Rational::one();
            row[n + m] = b[r].abs();
            row
        })
        .collect();
    let mut basis: Vec<usize> = (n..n + m).collect();
    // Reduced costs of the phase-one objective (sum of artificials).
    let mut cost = vec![Rational::zero(); width];
    for row in &t {
        for c in 0..n {
            cost[c] -= &row[c];
        }
        cost[n + m] -= &row[n + m];
    }

    while let Some(enter) = (0..n + m).find(|&c| cost[c].is_negative()) {
        let mut leave: Option<usize> = None;
        for r in 0..m {
            if t[r][enter].is_positive() {
                let better = match leave {
                    None => true,
                    Some(l) => {
                        let lhs = &t[r][n + m] / &t[r][enter];
                        let rhs = &t[l][n + m] / &t[l][enter];
                        lhs < rhs || (lhs == rhs && basis[r] < basis[l])
                    }
                };
                if better {
                    leave = Some(r);
                }
            }
        }
        let Some(p) = leave else {
            // Unbounded descent cannot happen: the objective is bounded below by 0.
            unreachable!("phase-one objective is bounded");
        };
        let piv = t[p][enter].clone();
        for x in t[p].iter_mut() {
            *x /= &piv;
        }
        let prow = t[p].clone();
        for (r, row) in t.iter_mut().enumerate() {
            if r != p && !row[enter].is_zero() {
                let f = row[enter].clone();
                for (x, y) in row.iter_mut().zip(&prow) {
                    *x -= &f * y;
                }
            }
        }
        if !cost[enter].is_zero() {
            let f = cost[enter].clone();
            for (x, y) in cost.iter_mut().zip(&prow) {
                *x -= &f * y;
            }
        }
        basis[p] = enter;
    }

    if !cost[n + m].is_zero() {
        return None;
    }
    let mut v = ones;
    for (r, &bv) in basis.iter().enumerate() {
        if bv < n {
            v[bv] += &t[r][n + m];
        }
    }
    Some(primitive(v))
}

fn primitive(v: Vec<Rational>) -> Vec<Rational> {
    let l = lcm_of_denominators(&v);
    let ints: Vec<BigInt> = v.iter().map(|q| q.numer() * (&l / q.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return v;
    }
    ints.into_iter().map(|x| Rational::from_integer(x / &g)).collect()
}
