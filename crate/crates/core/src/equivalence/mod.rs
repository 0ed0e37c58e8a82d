//! Deciding `A ~ B`, i.e. whether unipotent upper-triangular `U`, `V` exist
//! with `U (A - I) = (B - I) V`.
//!
//! Writing `U = I + X` and `V = I + Y` with `X`, `Y` strictly upper
//! triangular turns the condition into the integer linear system
//! `X C - D Y = D - C` where `C = A - I`, `D = B - I`. The system has one
//! equation per strictly upper position and is solved exactly through the
//! Smith normal form, so the decision is complete.

pub mod smith;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pathmatrix::PathMatrix;
pub use smith::{smith_normal_form, solve_diophantine, IntMatrix, Smith};

/// Pair `(U, V)` certifying equivalence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl Witness {
    pub fn identity(n: usize) -> Self {
        Witness {
            u: IntMatrix::identity(n),
            v: IntMatrix::identity(n),
        }
    }
}

/// JSON form `{"U": [[...]], "V": [[...]]}` with decimal-string entries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessRecord {
    #[serde(rename = "U")]
    pub u: Vec<Vec<String>>,
    #[serde(rename = "V")]
    pub v: Vec<Vec<String>>,
}

fn to_strings(m: &IntMatrix) -> Vec<Vec<String>> {
    m.to_rows()
        .iter()
        .map(|row| row.iter().map(BigInt::to_string).collect())
        .collect()
}

fn from_strings(rows: &[Vec<String>]) -> Result<IntMatrix> {
    let parsed = rows
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
    IntMatrix::from_rows(parsed)
}

impl From<&Witness> for WitnessRecord {
    fn from(w: &Witness) -> Self {
        WitnessRecord {
            u: to_strings(&w.u),
            v: to_strings(&w.v),
        }
    }
}

impl TryFrom<&WitnessRecord> for Witness {
    type Error = Error;
    fn try_from(rec: &WitnessRecord) -> Result<Self> {
        Ok(Witness {
            u: from_strings(&rec.u)?,
            v: from_strings(&rec.v)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Obstruction {
    /// All strictly upper entries of `A - I`, `B - I` except `(row, col)` are
    /// divisible by `k`, and the entries at `(row, col)` differ mod `k`.
    Modular { k: BigInt, row: usize, col: usize },
    /// The linear system has no integer solution.
    Infeasible,
}

impl std::fmt::Display for Obstruction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Obstruction::Modular { k, row, col } => {
                write!(f, "entry <{row}, {col}> differs modulo {k}")
            }
            Obstruction::Infeasible => write!(f, "Diophantine system infeasible"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EquivDecision {
    Equivalent(Witness),
    NotEquivalent(Obstruction),
}

impl EquivDecision {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, EquivDecision::Equivalent(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecideOptions {
    /// Try the corner-entry modular obstruction before solving.
    pub prefilter: bool,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions { prefilter: true }
    }
}

fn check_dims(a: &PathMatrix, b: &PathMatrix) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch(format!(
            "{0}x{0} vs {1}x{1}",
            a.n(),
            b.n()
        )));
    }
    Ok(())
}

pub fn decide_equiv(a: &PathMatrix, b: &PathMatrix) -> Result<EquivDecision> {
    decide_equiv_with(a, b, DecideOptions::default())
}

pub fn decide_equiv_with(
    a: &PathMatrix,
    b: &PathMatrix,
    opts: DecideOptions,
) -> Result<EquivDecision> {
    check_dims(a, b)?;
    let n = a.n();
    if a == b {
        return Ok(EquivDecision::Equivalent(Witness::identity(n)));
    }
    if opts.prefilter {
        if let Some(obstruction) = corner_obstruction(a, b) {
            return Ok(EquivDecision::NotEquivalent(obstruction));
        }
    }

    let positions: Vec<(usize, usize)> = a.strict_upper_positions().collect();
    let pairs = positions.len();
    let index_of = |i: usize, j: usize| {
        positions
            .iter()
            .position(|&p| p == (i, j))
            .expect("strict upper")
    };
    // unknowns: X entries in row-major order, then Y entries
    let mut system = IntMatrix::zeros(pairs, 2 * pairs);
    let mut rhs = Vec::with_capacity(pairs);
    for (eq, &(i, j)) in positions.iter().enumerate() {
        for k in i + 1..j {
            // (X C)_{ij} gains X_{ik} C_{kj}; (D Y)_{ij} gains D_{ik} Y_{kj}
            system[(eq, index_of(i, k))] = a.get(k, j).clone();
            system[(eq, pairs + index_of(k, j))] = -b.get(i, k).clone();
        }
        rhs.push(b.get(i, j) - a.get(i, j));
    }
    let Some(x) = solve_diophantine(&system, &rhs)? else {
        return Ok(EquivDecision::NotEquivalent(Obstruction::Infeasible));
    };
    let mut u = IntMatrix::identity(n);
    let mut v = IntMatrix::identity(n);
    for (idx, &(i, j)) in positions.iter().enumerate() {
        u[(i - 1, j - 1)] = x[idx].clone();
        v[(i - 1, j - 1)] = x[pairs + idx].clone();
    }
    let witness = Witness { u, v };
    assert!(
        verify_witness(a, b, &witness),
        "solver returned a witness that does not verify"
    );
    Ok(EquivDecision::Equivalent(witness))
}

/// Strictly upper entries of `A - I` and `B - I` except `<1, n>`.
fn non_corner_entries<'a>(
    a: &'a PathMatrix,
    b: &'a PathMatrix,
) -> impl Iterator<Item = &'a BigInt> {
    let n = a.n();
    a.strict_upper_positions()
        .filter(move |&p| p != (1, n))
        .flat_map(move |(i, j)| [a.get(i, j), b.get(i, j)])
}

/// The strongest modulus the corner lemma can use: the gcd of every
/// non-corner strictly upper entry of both matrices.
fn corner_obstruction(a: &PathMatrix, b: &PathMatrix) -> Option<Obstruction> {
    let n = a.n();
    if n < 2 {
        return None;
    }
    let g = non_corner_entries(a, b).fold(BigInt::zero(), |g, v| g.gcd(v));
    if g <= BigInt::one() {
        return None;
    }
    let diff = a.get(1, n) - b.get(1, n);
    (!diff.is_multiple_of(&g)).then_some(Obstruction::Modular {
        k: g,
        row: 1,
        col: n,
    })
}

/// Corner obstruction for a given `k >= 2`: returns `(1, n)` when every other
/// strictly upper entry is divisible by `k` and the corners differ mod `k`.
pub fn obstruction_mod_k(a: &PathMatrix, b: &PathMatrix, k: u64) -> Option<(usize, usize)> {
    let n = a.n();
    if a.n() != b.n() || n < 2 || k < 2 {
        return None;
    }
    let k = BigInt::from(k);
    if !non_corner_entries(a, b).all(|v| v.is_multiple_of(&k)) {
        return None;
    }
    let diff = a.get(1, n) - b.get(1, n);
    (!diff.is_multiple_of(&k)).then_some((1, n))
}

fn is_unipotent_upper(m: &IntMatrix, n: usize) -> bool {
    m.nrows() == n
        && m.ncols() == n
        && (0..n).all(|i| {
            (0..n).all(|j| match i.cmp(&j) {
                std::cmp::Ordering::Equal => m[(i, j)].is_one(),
                std::cmp::Ordering::Greater => m[(i, j)].is_zero(),
                std::cmp::Ordering::Less => true,
            })
        })
}

fn minus_identity(a: &PathMatrix) -> IntMatrix {
    let mut m = IntMatrix::from_rows(a.rows()).expect("square");
    for i in 0..a.n() {
        m[(i, i)] -= 1;
    }
    m
}

/// True iff `U`, `V` are unipotent upper triangular and `U (A - I) = (B - I) V`.
pub fn verify_witness(a: &PathMatrix, b: &PathMatrix, w: &Witness) -> bool {
    let n = a.n();
    if b.n() != n || !is_unipotent_upper(&w.u, n) || !is_unipotent_upper(&w.v, n) {
        return false;
    }
    let lhs = w.u.mul(&minus_identity(a));
    let rhs = minus_identity(b).mul(&w.v);
    matches!((lhs, rhs), (Ok(l), Ok(r)) if l == r)
}

/// Compares the blocks `[start, start + extent]`. `false` proves `A` and `B`
/// are not equivalent; `true` proves nothing.
pub fn submatrix_necessary(
    a: &PathMatrix,
    b: &PathMatrix,
    start: usize,
    extent: usize,
) -> Result<bool> {
    check_dims(a, b)?;
    let end = start + extent;
    let (ba, bb) = (a.block(start, end)?, b.block(start, end)?);
    Ok(decide_equiv(&ba, &bb)?.is_equivalent())
}
