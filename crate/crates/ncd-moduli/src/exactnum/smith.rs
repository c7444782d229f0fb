use super::matrix::IntegerMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// `U · A · V = D` with `U`, `V` unimodular and `D` diagonal, each nonzero
/// diagonal entry dividing the next.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: IntegerMatrix,
    pub d: IntegerMatrix,
    pub v: IntegerMatrix,
}

impl SmithForm {
    /// The nonzero elementary divisors, all positive.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d.get(i, i).clone())
            .take_while(|x| !x.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

fn identity(n: usize) -> IntegerMatrix {
    let mut m = IntegerMatrix::zeros(n, n);
    for i in 0..n {
        m.set(i, i, BigInt::from(1));
    }
    m
}

struct Work {
    a: Vec<Vec<BigInt>>,
    u: Vec<Vec<BigInt>>,
    v: Vec<Vec<BigInt>>,
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        self.u.swap(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for r in self.a.iter_mut().chain(self.v.iter_mut()) {
            r.swap(i, j);
        }
    }

    /// row_i += k · row_j
    fn add_row(&mut self, i: usize, j: usize, k: &BigInt) {
        for m in [&mut self.a, &mut self.u] {
            let src = m[j].clone();
            for (x, y) in m[i].iter_mut().zip(src) {
                *x += k * y;
            }
        }
    }

    /// col_i += k · col_j
    fn add_col(&mut self, i: usize, j: usize, k: &BigInt) {
        for m in [&mut self.a, &mut self.v] {
            for r in m.iter_mut() {
                let y = r[j].clone();
                r[i] += k * y;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for m in [&mut self.a, &mut self.u] {
            for x in m[i].iter_mut() {
                *x = -x.clone();
            }
        }
    }
}

pub fn smith_normal_form(a: &IntegerMatrix) -> SmithForm {
    let (rows, cols) = (a.rows(), a.cols());
    let to_vecs = |m: &IntegerMatrix| (0..m.rows()).map(|r| m.row(r).to_vec()).collect::<Vec<_>>();
    let mut w = Work { a: to_vecs(a), u: to_vecs(&identity(rows)), v: to_vecs(&identity(cols)) };

    for t in 0..rows.min(cols) {
        // Smallest nonzero entry of the remaining block becomes the pivot.
        let Some((pr, pc)) = smallest_nonzero(&w.a, t) else { break };
        w.swap_rows(t, pr);
        w.swap_cols(t, pc);
        loop {
            let mut changed = false;
            for r in t + 1..rows {
                if !w.a[r][t].is_zero() {
                    let q = w.a[r][t].div_floor(&w.a[t][t]);
                    w.add_row(r, t, &-q);
                    if !w.a[r][t].is_zero() {
                        w.swap_rows(t, r);
                        changed = true;
                    }
                }
            }
            for c in t + 1..cols {
                if !w.a[t][c].is_zero() {
                    let q = w.a[t][c].div_floor(&w.a[t][t]);
                    w.add_col(c, t, &-q);
                    if !w.a[t][c].is_zero() {
                        w.swap_cols(t, c);
                        changed = true;
                    }
                }
            }
            if changed {
                continue;
            }
            // Pivot must divide the whole remaining block.
            let bad = (t + 1..rows)
                .flat_map(|r| (t + 1..cols).map(move |c| (r, c)))
                .find(|&(r, c)| !(&w.a[r][c] % &w.a[t][t]).is_zero());
            match bad {
                Some((r, _)) => w.add_row(t, r, &BigInt::from(1)),
                None => break,
            }
        }
        if w.a[t][t].is_negative() {
            w.negate_row(t);
        }
    }
    let from = |m: Vec<Vec<BigInt>>, c: usize| IntegerMatrix::from_rows(c, m).expect("rectangular");
    SmithForm { u: from(w.u, rows), d: from(w.a, cols), v: from(w.v, cols) }
}

fn smallest_nonzero(a: &[Vec<BigInt>], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (r, row) in a.iter().enumerate().skip(t) {
        for (c, x) in row.iter().enumerate().skip(t) {
            if !x.is_zero() && best.map_or(true, |(br, bc)| x.abs() < a[br][bc].abs()) {
                best = Some((r, c));
            }
        }
    }
    best
}
