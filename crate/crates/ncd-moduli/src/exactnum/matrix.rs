use super::rational::{lcm_of_denominators, Rational};
use super::ExactError;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::fmt;

/// Dense rectangular matrix of rationals, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

/// Dense rectangular matrix of integers, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

macro_rules! dense_common {
    ($ty:ident, $elem:ty) => {
        impl $ty {
            pub fn zeros(rows: usize, cols: usize) -> Self {
                Self { rows, cols, data: vec![<$elem>::zero(); rows * cols] }
            }

            /// Builds from rows; `cols` disambiguates the zero-row case.
            pub fn from_rows(cols: usize, rows: Vec<Vec<$elem>>) -> Result<Self, ExactError> {
                let mut data = Vec::with_capacity(rows.len() * cols);
                let n = rows.len();
                for r in rows {
                    if r.len() != cols {
                        return Err(ExactError::Ragged);
                    }
                    data.extend(r);
                }
                Ok(Self { rows: n, cols, data })
            }

            pub fn rows(&self) -> usize {
                self.rows
            }

            pub fn cols(&self) -> usize {
                self.cols
            }

            pub fn get(&self, r: usize, c: usize) -> &$elem {
                &self.data[r * self.cols + c]
            }

            pub fn set(&mut self, r: usize, c: usize, v: $elem) {
                self.data[r * self.cols + c] = v;
            }

            pub fn row(&self, r: usize) -> &[$elem] {
                &self.data[r * self.cols..(r + 1) * self.cols]
            }

            pub fn mul_vec(&self, v: &[$elem]) -> Vec<$elem> {
                assert_eq!(v.len(), self.cols, "vector length must match column count");
                (0..self.rows)
                    .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
                    .collect()
            }

            /// Rows `0..n` as a new matrix.
            pub fn top_rows(&self, n: usize) -> Self {
                Self { rows: n, cols: self.cols, data: self.data[..n * self.cols].to_vec() }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                for r in 0..self.rows {
                    let cells: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
                    writeln!(f, "[{}]", cells.join(" "))?;
                }
                Ok(())
            }
        }
    };
}

dense_common!(RationalMatrix, Rational);
dense_common!(IntegerMatrix, BigInt);

impl IntegerMatrix {
    pub fn from_i64(cols: usize, rows: &[Vec<i64>]) -> Result<Self, ExactError> {
        Self::from_rows(cols, rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
    }

    pub fn to_rational(&self) -> RationalMatrix {
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| Rational::from_integer(x.clone())).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }
}

impl RationalMatrix {
    pub fn from_i64(cols: usize, rows: &[Vec<i64>]) -> Result<Self, ExactError> {
        Self::from_rows(
            cols,
            rows.iter().map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect()).collect(),
        )
    }

    pub fn rank(&self) -> usize {
        Echelon::of(self).pivots.len()
    }

    /// One solution of `self · x = b` with free coordinates set to zero, or
    /// the index of the first equation that makes the prefix inconsistent.
    pub fn solve(&self, b: &[Rational]) -> Result<Vec<Rational>, usize> {
        assert_eq!(b.len(), self.rows);
        let mut aug = RationalMatrix::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c).clone());
            }
            aug.set(r, self.cols, b[r].clone());
        }
        let ech = Echelon::of(&aug);
        if ech.pivots.iter().any(|&(_, c)| c == self.cols) {
            // Locate the shortest inconsistent prefix.
            for k in 0..self.rows {
                if aug.top_rows(k + 1).rank() > self.top_rows(k + 1).rank() {
                    return Err(k);
                }
            }
            unreachable!("augmented rank exceeds coefficient rank on the full system");
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (i, &(_, c)) in ech.pivots.iter().enumerate().rev() {
            let row = ech.mat.row(i);
            let mut acc = row[self.cols].clone();
            for (j, xj) in x.iter().enumerate().skip(c + 1) {
                acc -= &row[j] * xj;
            }
            x[c] = acc / &row[c];
        }
        Ok(x)
    }
}

/// Fraction-free row echelon form (Bareiss) of a denominator-cleared copy.
struct Echelon {
    mat: RationalMatrix,
    /// (row, column) of each pivot, in order.
    pivots: Vec<(usize, usize)>,
}

impl Echelon {
    fn of(a: &RationalMatrix) -> Self {
        let (rows, cols) = (a.rows, a.cols);
        let mut m: Vec<Vec<BigInt>> = (0..rows)
            .map(|r| {
                let l = lcm_of_denominators(a.row(r));
                a.row(r).iter().map(|q| q.numer() * (&l / q.denom())).collect()
            })
            .collect();
        let mut pivots = Vec::new();
        let mut prev = BigInt::one();
        let mut pr = 0;
        for c in 0..cols {
            if pr == rows {
                break;
            }
            let Some(sel) = (pr..rows).find(|&r| !m[r][c].is_zero()) else { continue };
            m.swap(pr, sel);
            for r in pr + 1..rows {
                for j in c + 1..cols {
                    let v = (&m[pr][c] * &m[r][j] - &m[r][c] * &m[pr][j]) / &prev;
                    m[r][j] = v;
                }
                m[r][c] = BigInt::zero();
            }
            // Entries left of the pivot in lower rows are already zero; Bareiss
            // keeps the exact-division invariant only for the active block.
            prev = m[pr][c].clone();
            pivots.push((pr, c));
            pr += 1;
        }
        let mat = RationalMatrix {
            rows,
            cols,
            data: m.into_iter().flatten().map(Rational::from_integer).collect(),
        };
        Echelon { mat, pivots }
    }
}

/// Basis of `{v : A·v = 0}` with one vector per free column; each vector has
/// a 1 in its free column and zeros in the other free columns.
pub fn rational_nullspace(a: &RationalMatrix) -> Vec<Vec<Rational>> {
    let ech = Echelon::of(a);
    let pivot_cols: Vec<usize> = ech.pivots.iter().map(|&(_, c)| c).collect();
    let free: Vec<usize> = (0..a.cols).filter(|c| !pivot_cols.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Rational::zero(); a.cols];
            x[f] = Rational::one();
            for (i, &c) in pivot_cols.iter().enumerate().rev() {
                let row = ech.mat.row(i);
                let mut acc = Rational::zero();
                for (j, xj) in x.iter().enumerate().skip(c + 1) {
                    acc -= &row[j] * xj;
                }
                x[c] = acc / &row[c];
            }
            x
        })
        .collect()
}
