//! Dense integer matrices, Smith normal form and an exact solver for
//! linear systems over the integers.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(IntMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|row| row.iter().map(|&v| BigInt::from(v)).collect())
                .collect(),
        )
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec())
            .collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .filter(|&j| !v[j].is_zero())
                    .map(|j| &self[(i, j)] * &v[j])
                    .sum()
            })
            .collect())
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
    }

    /// Determinant by fraction-free elimination (Bareiss).
    pub fn determinant(&self) -> Result<BigInt> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(
                "determinant of a non-square matrix".into(),
            ));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)];
                    a[(i, j)] = v / &prev;
                }
            }
            prev = a[(k, k)].clone();
        }
        Ok(sign
            * if n == 0 {
                BigInt::one()
            } else {
                a[(n - 1, n - 1)].clone()
            })
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += q * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        for j in 0..self.cols {
            let v = &self.data[src * self.cols + j];
            if !v.is_zero() {
                let add = q * v;
                self.data[dst * self.cols + j] += add;
            }
        }
    }

    /// col[dst] += q * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        for i in 0..self.rows {
            let v = &self.data[i * self.cols + src];
            if !v.is_zero() {
                let add = q * v;
                self.data[i * self.cols + dst] += add;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = std::mem::take(&mut self.data[i * self.cols + j]);
            self.data[i * self.cols + j] = -v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.to_rows() {
            let cells: Vec<String> = row.iter().map(BigInt::to_string).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// `D = S * M * T` with `S`, `T` unimodular and `D` diagonal,
/// `d_1 | d_2 | ...`, all `d_i >= 0`.
#[derive(Debug, Clone)]
pub struct Smith {
    pub s: IntMatrix,
    pub d: IntMatrix,
    pub t: IntMatrix,
    pub rank: usize,
}

/// Row-side bookkeeping: either the full left transform or just its action
/// on a right-hand side.
enum RowLog<'a> {
    Matrix(&'a mut IntMatrix),
    Vector(&'a mut Vec<BigInt>),
}

impl RowLog<'_> {
    fn swap(&mut self, a: usize, b: usize) {
        match self {
            RowLog::Matrix(m) => m.swap_rows(a, b),
            RowLog::Vector(v) => v.swap(a, b),
        }
    }

    fn add(&mut self, dst: usize, src: usize, q: &BigInt) {
        match self {
            RowLog::Matrix(m) => m.add_row_multiple(dst, src, q),
            RowLog::Vector(v) => {
                let add = q * &v[src];
                v[dst] += add;
            }
        }
    }

    fn negate(&mut self, i: usize) {
        match self {
            RowLog::Matrix(m) => m.negate_row(i),
            RowLog::Vector(v) => {
                let x = std::mem::take(&mut v[i]);
                v[i] = -x;
            }
        }
    }
}

/// Smallest nonzero |entry| in the trailing submatrix, ties to lowest row
/// then lowest column.
fn find_pivot(a: &IntMatrix, k: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in k..a.rows {
        for j in k..a.cols {
            let v = &a[(i, j)];
            if v.is_zero() {
                continue;
            }
            let better = match best {
                None => true,
                Some(b) => v.magnitude() < a[b].magnitude(),
            };
            if better {
                best = Some((i, j));
                if v.magnitude().is_one() {
                    return best;
                }
            }
        }
    }
    best
}

/// Reduces `a` to Smith form in place, logging row operations into `rows`
/// and column operations into `t`. Returns the rank.
fn reduce(a: &mut IntMatrix, mut rows: RowLog<'_>, t: &mut IntMatrix) -> usize {
    let limit = a.rows.min(a.cols);
    let mut k = 0;
    while k < limit {
        let Some((pi, pj)) = find_pivot(a, k) else {
            break;
        };
        a.swap_rows(k, pi);
        rows.swap(k, pi);
        a.swap_cols(k, pj);
        t.swap_cols(k, pj);
        loop {
            let mut dirty = false;
            for i in k + 1..a.rows {
                if a[(i, k)].is_zero() {
                    continue;
                }
                let q = -a[(i, k)].div_floor(&a[(k, k)]);
                a.add_row_multiple(i, k, &q);
                rows.add(i, k, &q);
                dirty |= !a[(i, k)].is_zero();
            }
            for j in k + 1..a.cols {
                if a[(k, j)].is_zero() {
                    continue;
                }
                let q = -a[(k, j)].div_floor(&a[(k, k)]);
                a.add_col_multiple(j, k, &q);
                t.add_col_multiple(j, k, &q);
                dirty |= !a[(k, j)].is_zero();
            }
            if dirty {
                // a remainder smaller than the pivot exists in row or column k
                let mut best = (k, k);
                for i in k + 1..a.rows {
                    if !a[(i, k)].is_zero() && a[(i, k)].magnitude() < a[best].magnitude() {
                        best = (i, k);
                    }
                }
                for j in k + 1..a.cols {
                    if !a[(k, j)].is_zero() && a[(k, j)].magnitude() < a[best].magnitude() {
                        best = (k, j);
                    }
                }
                a.swap_rows(k, best.0);
                rows.swap(k, best.0);
                a.swap_cols(k, best.1);
                t.swap_cols(k, best.1);
                continue;
            }
            let pivot = a[(k, k)].clone();
            let offender = (k + 1..a.rows).find(|&i| {
                (k + 1..a.cols).any(|j| !a[(i, j)].is_zero() && !a[(i, j)].is_multiple_of(&pivot))
            });
            match offender {
                Some(i) => {
                    a.add_row_multiple(k, i, &BigInt::one());
                    rows.add(k, i, &BigInt::one());
                }
                None => break,
            }
        }
        if a[(k, k)].is_negative() {
            a.negate_row(k);
            rows.negate(k);
        }
        k += 1;
    }
    k
}

pub fn smith_normal_form(m: &IntMatrix) -> Smith {
    let mut d = m.clone();
    let mut s = IntMatrix::identity(m.rows);
    let mut t = IntMatrix::identity(m.cols);
    let rank = reduce(&mut d, RowLog::Matrix(&mut s), &mut t);
    Smith { s, d, t, rank }
}

/// An integer solution of `m * x = c`, or `None` when none exists.
///
/// Zero rows (after checking their right-hand side) and zero columns (whose
/// unknowns are set to 0) are dropped before the Smith reduction.
pub fn solve_diophantine(m: &IntMatrix, c: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
    if m.rows != c.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} equations but {} right-hand sides",
            m.rows,
            c.len()
        )));
    }
    let live_rows: Vec<usize> = (0..m.rows)
        .filter(|&i| (0..m.cols).any(|j| !m[(i, j)].is_zero()))
        .collect();
    if (0..m.rows).any(|i| !live_rows.contains(&i) && !c[i].is_zero()) {
        return Ok(None);
    }
    let live_cols: Vec<usize> = (0..m.cols)
        .filter(|&j| live_rows.iter().any(|&i| !m[(i, j)].is_zero()))
        .collect();
    let mut a = IntMatrix::zeros(live_rows.len(), live_cols.len());
    for (ii, &i) in live_rows.iter().enumerate() {
        for (jj, &j) in live_cols.iter().enumerate() {
            a[(ii, jj)] = m[(i, j)].clone();
        }
    }
    let mut rhs: Vec<BigInt> = live_rows.iter().map(|&i| c[i].clone()).collect();
    let mut t = IntMatrix::identity(a.cols);
    let rank = reduce(&mut a, RowLog::Vector(&mut rhs), &mut t);
    let mut y = vec![BigInt::zero(); a.cols];
    for i in 0..rhs.len() {
        if i < rank {
            let (q, rem) = rhs[i].div_rem(&a[(i, i)]);
            if !rem.is_zero() {
                return Ok(None);
            }
            y[i] = q;
        } else if !rhs[i].is_zero() {
            return Ok(None);
        }
    }
    let compact = t.mul_vec(&y)?;
    let mut x = vec![BigInt::zero(); m.cols];
    for (jj, &j) in live_cols.iter().enumerate() {
        x[j] = compact[jj].clone();
    }
    Ok(Some(x))
}
