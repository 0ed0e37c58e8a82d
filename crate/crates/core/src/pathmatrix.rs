//! Path-count matrices computed by dynamic programming, plus the closed
//! forms known for special parameter vectors.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lensgraph::LensParams;
use crate::numtheory::binomial;
use crate::par;

/// Square upper-triangular integer matrix with ones on the diagonal.
///
/// Indices in the public API are 1-based, `get(i, j)` is the entry `<i, j>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PathMatrix {
    n: usize,
    entries: Vec<BigInt>,
}

impl PathMatrix {
    pub fn identity(n: usize) -> Self {
        let mut entries = vec![BigInt::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = BigInt::one();
        }
        PathMatrix { n, entries }
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|row| row.len() != n) {
            return Err(Error::DimensionMismatch("rows must form a square".into()));
        }
        let entries: Vec<BigInt> = rows.into_iter().flatten().collect();
        let m = PathMatrix { n, entries };
        m.check_shape()?;
        Ok(m)
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|row| row.iter().map(|&v| BigInt::from(v)).collect())
                .collect(),
        )
    }

    /// Builds `I + c` from a strictly upper-triangular `c`.
    pub fn from_strict_upper(c: &[Vec<i64>]) -> Result<Self> {
        Self::from_i64_rows(&add_identity(c))
    }

    fn check_shape(&self) -> Result<()> {
        for i in 0..self.n {
            for j in 0..self.n {
                let v = &self.entries[i * self.n + j];
                let ok = match i.cmp(&j) {
                    std::cmp::Ordering::Equal => v.is_one(),
                    std::cmp::Ordering::Greater => v.is_zero(),
                    std::cmp::Ordering::Less => true,
                };
                if !ok {
                    return Err(Error::NotUnitriangular(format!(
                        "entry <{}, {}> = {v}",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[(i - 1) * self.n + (j - 1)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        assert!(i < j, "only strictly upper entries may be set");
        self.entries[(i - 1) * self.n + (j - 1)] = value;
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        self.entries
            .chunks(self.n.max(1))
            .map(|c| c.to_vec())
            .collect()
    }

    /// The principal block `A[from, to]` (1-based, inclusive).
    pub fn block(&self, from: usize, to: usize) -> Result<Self> {
        if from == 0 || from > to || to > self.n {
            return Err(Error::IndexOutOfRange(format!(
                "block [{from}, {to}] of a {0}x{0} matrix",
                self.n
            )));
        }
        let k = to - from + 1;
        let mut entries = Vec::with_capacity(k * k);
        for i in from..=to {
            for j in from..=to {
                entries.push(self.get(i, j).clone());
            }
        }
        Ok(PathMatrix { n: k, entries })
    }

    /// Canonical decimal serialization of the upper triangle, rows separated
    /// by `;`. Equal digests iff equal matrices (of equal dimension).
    pub fn digest(&self) -> String {
        let mut out = String::new();
        for i in 1..=self.n {
            if i > 1 {
                out.push(';');
            }
            for j in i..=self.n {
                if j > i {
                    out.push(',');
                }
                out.push_str(&self.get(i, j).to_string());
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(BigInt::to_string).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn strict_upper_positions(&self) -> impl Iterator<Item = (usize, usize)> {
        let n = self.n;
        (1..=n).flat_map(move |i| (i + 1..=n).map(move |j| (i, j)))
    }
}

fn add_identity(c: &[Vec<i64>]) -> Vec<Vec<i64>> {
    c.iter()
        .enumerate()
        .map(|(i, row)| {
            let mut row = row.clone();
            if let Some(v) = row.get_mut(i) {
                *v += 1;
            }
            row
        })
        .collect()
}

impl fmt::Display for PathMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.entries.iter().map(BigInt::to_string).collect();
        let width = cells.iter().map(String::len).max().unwrap_or(1);
        for (idx, cell) in cells.iter().enumerate() {
            let sep = if (idx + 1) % self.n == 0 { "\n" } else { " " };
            write!(f, "{cell:>width$}{sep}")?;
        }
        Ok(())
    }
}

/// JSON form of a path matrix: `{"r", "m", "n", "entries"}`, entries as
/// decimal strings, row-major, full square.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixRecord {
    pub r: u64,
    pub m: Vec<u64>,
    pub n: usize,
    pub entries: Vec<Vec<String>>,
}

impl MatrixRecord {
    pub fn new(params: &LensParams, matrix: &PathMatrix) -> Self {
        MatrixRecord {
            r: params.r(),
            m: params.m().to_vec(),
            n: matrix.n(),
            entries: matrix
                .rows()
                .iter()
                .map(|row| row.iter().map(BigInt::to_string).collect())
                .collect(),
        }
    }

    pub fn matrix(&self) -> Result<PathMatrix> {
        if self.entries.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "record declares n = {} but has {} rows",
                self.n,
                self.entries.len()
            )));
        }
        let rows = self
            .entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|s| {
                        s.parse::<BigInt>()
                            .map_err(|e| Error::Parse(format!("{s:?}: {e}")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        PathMatrix::from_rows(rows)
    }
}

/// Row `i` (1-based) of the path-count matrix.
///
/// `reach[t]` counts paths from `(i, 0)` to `(s, t)` whose vertices after the
/// start are all non-0. Each such path to subgraph `s - 1` crosses into
/// subgraph `s` and reaches `(s, 0)` in exactly one way, then drops straight
/// down the 0-column, so entry `<i, j>` is the running sum of arrivals.
fn count_row(params: &LensParams, i: usize) -> Vec<BigInt> {
    let (n, r) = (params.n(), params.r() as usize);
    let mut row = vec![BigInt::zero(); n];
    row[i - 1] = BigInt::one();
    let mut reach: Vec<BigInt> = (0..r).map(|t| BigInt::from((t != 0) as u8)).collect();
    let mut arrivals = BigInt::one();
    for s in i + 1..=n {
        let crossing: BigInt = reach.iter().sum();
        arrivals += crossing;
        row[s - 1] = arrivals.clone();
        if s == n {
            break;
        }
        let step = params.entry(s) as usize;
        let mut next = vec![BigInt::zero(); r];
        let mut running = BigInt::zero();
        let mut t = step;
        while t != 0 {
            running += &reach[t];
            next[t] = running.clone();
            t = (t + step) % r;
        }
        reach = next;
    }
    row
}

/// The legal-path count matrix of `params`.
pub fn count_matrix(params: &LensParams) -> PathMatrix {
    let n = params.n();
    let rows = par::map_range(1..n + 1, |i| count_row(params, i));
    PathMatrix {
        n,
        entries: rows.into_iter().flatten().collect(),
    }
}

/// `<i, j> = C(r - 1 + j - i, j - i)`, the count for the all-ones vector.
pub fn closed_form_all_ones(r: u64, n: usize) -> Result<PathMatrix> {
    if r <= 2 || n == 0 {
        return Err(Error::InvalidParams(format!(
            "need r > 2 and n >= 1, got r={r} n={n}"
        )));
    }
    let mut m = PathMatrix::identity(n);
    for i in 1..=n {
        for j in i + 1..=n {
            let d = (j - i) as u64;
            m.set(i, j, binomial(r - 1 + d, d));
        }
    }
    Ok(m)
}

/// Entry `<1, 6>` for the vector `(1, 1, -1, 1, 1, 1)`:
/// `(22r + 15r^2 - 5r^3 + 5r^4 + 3r^5) / 40`.
pub fn poly_1to6(r: u64) -> Result<BigInt> {
    if r <= 2 {
        return Err(Error::InvalidParams(format!("r must exceed 2, got {r}")));
    }
    let x = BigInt::from(r);
    let numerator = BigInt::from(22) * &x + BigInt::from(15) * x.pow(2)
        - BigInt::from(5) * x.pow(3)
        + BigInt::from(5) * x.pow(4)
        + BigInt::from(3) * x.pow(5);
    let (q, rem) = numerator.div_rem(&BigInt::from(40));
    if !rem.is_zero() {
        return Err(Error::NonIntegerResult(format!(
            "40 does not divide {numerator}"
        )));
    }
    Ok(q)
}

/// Representative with `m_1 = m_2 = m_n = 1` producing the same matrix:
/// scale by `m_2^{-1}`, then overwrite the endpoints.
pub fn normalize(params: &LensParams) -> LensParams {
    let n = params.n();
    if n == 1 {
        return LensParams::new(params.r(), vec![1]).expect("valid");
    }
    let scaled = params
        .scale(params.inverse_of(2))
        .expect("inverse is a unit");
    let mut m = scaled.m().to_vec();
    m[0] = 1;
    m[n - 1] = 1;
    LensParams::new(params.r(), m).expect("valid")
}
