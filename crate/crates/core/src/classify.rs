//! Exhaustive enumeration of the matrices for a given `(r, n)` and their
//! partition into equivalence classes.
//!
//! Only vectors with `m_1 = m_2 = m_n = 1` are enumerated; scaling and the
//! endpoint independence of the matrix make this cover every matrix.
//! Matrices are bucketed by [`Signature`] (classes never span buckets) and
//! each bucket is split with union-find, comparing every matrix against the
//! current class representatives.

use std::collections::{BTreeMap, HashMap};

use dashmap::DashMap;
use num_traits::ToPrimitive;
use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::equivalence::decide_equiv;
use crate::error::{Error, Result};
use crate::invariants::{lower_bound_classes, phitilde_formula, signature, Signature};
use crate::lensgraph::LensParams;
use crate::numtheory::units;
use crate::par;
use crate::pathmatrix::{count_matrix, PathMatrix};

pub const DEFAULT_VECTOR_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    /// Maximum number of normalized vectors one enumeration may visit.
    pub budget: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            budget: DEFAULT_VECTOR_BUDGET,
        }
    }
}

/// One distinct matrix of `S_{r,n}`.
#[derive(Debug, Clone)]
pub struct EnumeratedMatrix {
    /// Lexicographically smallest normalized vector producing the matrix.
    pub params: LensParams,
    pub matrix: PathMatrix,
    pub digest: String,
    pub signature: Signature,
    /// Number of normalized vectors producing the matrix.
    pub vector_count: u64,
}

pub fn normalized_vector_count(r: u64, n: usize) -> u128 {
    let k = units(r).len() as u128;
    k.pow(n.saturating_sub(3) as u32)
}

/// All vectors with `m_1 = m_2 = m_n = 1`, in lexicographic order.
pub fn normalized_vectors(r: u64, n: usize, cfg: SearchConfig) -> Result<Vec<LensParams>> {
    if r <= 2 || n == 0 {
        return Err(Error::InvalidParams(format!(
            "need r > 2 and n >= 1, got r={r} n={n}"
        )));
    }
    let needed = normalized_vector_count(r, n);
    if needed > cfg.budget as u128 {
        return Err(Error::BudgetExceeded {
            needed,
            budget: cfg.budget,
        });
    }
    let us = units(r);
    let free = n.saturating_sub(3);
    let mut digits = vec![0usize; free];
    let mut out = Vec::with_capacity(needed as usize);
    loop {
        let mut m = vec![1u64; n];
        for (slot, &d) in digits.iter().enumerate() {
            m[slot + 2] = us[d];
        }
        out.push(LensParams::new(r, m)?);
        // odometer, last free slot fastest
        let mut pos = free;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < us.len() {
                break;
            }
            digits[pos] = 0;
        }
    }
}

/// The distinct matrices of `S_{r,n}`, ordered by their first vector.
pub fn enumerate_matrices(r: u64, n: usize, cfg: SearchConfig) -> Result<Vec<EnumeratedMatrix>> {
    let vectors = normalized_vectors(r, n, cfg)?;
    let computed = par::map(&vectors, |p| {
        let matrix = count_matrix(p);
        let digest = matrix.digest();
        (matrix, digest, signature(p))
    });
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut out: Vec<EnumeratedMatrix> = Vec::new();
    for (params, (matrix, digest, sig)) in vectors.into_iter().zip(computed) {
        match seen.get(&digest) {
            Some(&idx) => {
                debug_assert_eq!(
                    out[idx].signature, sig,
                    "equal matrices with different signatures"
                );
                out[idx].vector_count += 1;
            }
            None => {
                seen.insert(digest.clone(), out.len());
                out.push(EnumeratedMatrix {
                    params,
                    matrix,
                    digest,
                    signature: sig,
                    vector_count: 1,
                });
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassInfo {
    pub representative_m: Vec<u64>,
    /// Normalized vectors in the class.
    pub size: u64,
    /// Distinct matrices in the class.
    pub distinct_matrices: usize,
    pub signature: Signature,
    pub matrix_digest: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassPartition {
    pub r: u64,
    pub n: usize,
    pub phi: usize,
    pub lower_bound: u64,
    pub classes: Vec<ClassInfo>,
}

/// Memoized pairwise decisions keyed by indices into the distinct-matrix
/// list (equivalently, by digest pairs). Safe for concurrent use.
#[derive(Default)]
struct DecisionMemo {
    table: DashMap<(usize, usize), bool>,
}

impl DecisionMemo {
    fn equivalent(&self, entries: &[EnumeratedMatrix], a: usize, b: usize) -> Result<bool> {
        let key = (a.min(b), a.max(b));
        if let Some(v) = self.table.get(&key) {
            return Ok(*v);
        }
        let verdict = decide_equiv(&entries[key.0].matrix, &entries[key.1].matrix)?.is_equivalent();
        self.table.insert(key, verdict);
        Ok(verdict)
    }
}

/// Splits one signature bucket into classes. Each returned group lists
/// entry ids in order; the first is the representative.
fn split_bucket(
    entries: &[EnumeratedMatrix],
    ids: &[usize],
    memo: &DecisionMemo,
) -> Result<Vec<Vec<usize>>> {
    let mut uf = UnionFind::<usize>::new(ids.len());
    let mut reps: Vec<usize> = Vec::new();
    for local in 0..ids.len() {
        let verdicts = par::map(&reps, |&rep| memo.equivalent(entries, ids[rep], ids[local]));
        let mut hit = None;
        for (pos, v) in verdicts.into_iter().enumerate() {
            if v? {
                hit = Some(pos);
                break;
            }
        }
        match hit {
            Some(pos) => {
                uf.union(reps[pos], local);
            }
            None => reps.push(local),
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (local, &id) in ids.iter().enumerate() {
        groups.entry(uf.find(local)).or_default().push(id);
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort_by_key(|g| g[0]);
    Ok(out)
}

struct Classification {
    entries: Vec<EnumeratedMatrix>,
    /// Groups of entry ids, ordered by representative.
    groups: Vec<Vec<usize>>,
    memo: DecisionMemo,
}

fn classify(r: u64, n: usize, cfg: SearchConfig) -> Result<Classification> {
    let entries = enumerate_matrices(r, n, cfg)?;
    let mut buckets: BTreeMap<&Signature, Vec<usize>> = BTreeMap::new();
    for (idx, e) in entries.iter().enumerate() {
        buckets.entry(&e.signature).or_default().push(idx);
    }
    let memo = DecisionMemo::default();
    let bucket_list: Vec<Vec<usize>> = buckets.into_values().collect();
    let split = par::map(&bucket_list, |ids| split_bucket(&entries, ids, &memo));
    let mut groups = Vec::new();
    for g in split {
        groups.extend(g?);
    }
    groups.sort_by(|a, b| entries[a[0]].params.cmp(&entries[b[0]].params));
    Ok(Classification {
        entries,
        groups,
        memo,
    })
}

impl Classification {
    fn partition(&self, r: u64, n: usize) -> Result<ClassPartition> {
        let classes: Vec<ClassInfo> = self
            .groups
            .iter()
            .map(|g| {
                let rep = &self.entries[g[0]];
                ClassInfo {
                    representative_m: rep.params.m().to_vec(),
                    size: g.iter().map(|&i| self.entries[i].vector_count).sum(),
                    distinct_matrices: g.len(),
                    signature: rep.signature.clone(),
                    matrix_digest: rep.digest.clone(),
                }
            })
            .collect();
        let bound = lower_bound_classes(r, n)?;
        let phi = classes.len();
        if bound > phi.into() {
            return Err(Error::LowerBoundViolated {
                phi,
                bound: bound.to_string(),
            });
        }
        Ok(ClassPartition {
            r,
            n,
            phi,
            lower_bound: bound.to_u64().unwrap_or(u64::MAX),
            classes,
        })
    }
}

/// The quotient `S_{r,n} / ~` with `phi = φ_r(n)`.
pub fn partition_classes(r: u64, n: usize, cfg: SearchConfig) -> Result<ClassPartition> {
    classify(r, n, cfg)?.partition(r, n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", content = "n", rename_all = "snake_case")]
pub enum PhitildeOutcome {
    Found(usize),
    NotFoundBelow(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhitildeSearch {
    pub r: u64,
    pub outcome: PhitildeOutcome,
    /// `(n, φ_r(n))` for every dimension examined.
    pub phis: Vec<(usize, usize)>,
}

/// Smallest `n <= n_max` with more than one class.
pub fn phitilde_search(r: u64, n_max: usize, cfg: SearchConfig) -> Result<PhitildeSearch> {
    let mut phis = Vec::new();
    for n in 1..=n_max {
        let phi = partition_classes(r, n, cfg)?.phi;
        phis.push((n, phi));
        if phi > 1 {
            return Ok(PhitildeSearch {
                r,
                outcome: PhitildeOutcome::Found(n),
                phis,
            });
        }
    }
    Ok(PhitildeSearch {
        r,
        outcome: PhitildeOutcome::NotFoundBelow(n_max),
        phis,
    })
}

/// Verdicts of the three class-structure conjectures for one `(r, n)`.
/// `None` marks an equality claim that is not made when `4 | r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConjectureReport {
    pub r: u64,
    pub n: usize,
    pub phi: usize,
    pub lower_bound: u64,
    /// Equal signatures iff equivalent, over all pairs of distinct matrices.
    pub signature_iff_equivalent: Option<bool>,
    /// `phi` equals the lower-bound product.
    pub phi_equals_bound: Option<bool>,
    /// `phi` is at least the lower-bound product (always claimed).
    pub phi_at_least_bound: bool,
    /// All classes contain the same number of normalized vectors.
    pub equal_class_sizes: bool,
    /// All classes contain the same number of distinct matrices.
    pub equal_matrix_counts: bool,
    pub class_sizes: Vec<u64>,
    pub class_matrix_counts: Vec<usize>,
}

impl ConjectureReport {
    pub fn passed(&self) -> bool {
        self.signature_iff_equivalent != Some(false)
            && self.phi_equals_bound != Some(false)
            && self.phi_at_least_bound
            && self.equal_class_sizes
    }
}

fn all_equal<T: PartialEq>(xs: &[T]) -> bool {
    xs.windows(2).all(|w| w[0] == w[1])
}

pub fn verify_conjectures(r: u64, n: usize, cfg: SearchConfig) -> Result<ConjectureReport> {
    let c = classify(r, n, cfg)?;
    let partition = c.partition(r, n)?;
    let equality_claimed = !r.is_multiple_of(4);

    // Within a bucket: one class means equal signature => equivalent.
    let mut per_signature: BTreeMap<&Signature, usize> = BTreeMap::new();
    for class in &partition.classes {
        *per_signature.entry(&class.signature).or_default() += 1;
    }
    let sufficiency = per_signature.values().all(|&k| k == 1);
    // Across buckets: representatives must be pairwise inequivalent. Since
    // ~ is transitive this covers every pair of distinct matrices.
    let reps: Vec<usize> = c.groups.iter().map(|g| g[0]).collect();
    let cross: Vec<(usize, usize)> = (0..reps.len())
        .flat_map(|i| (i + 1..reps.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| c.entries[reps[i]].signature != c.entries[reps[j]].signature)
        .collect();
    let cross_verdicts = par::map(&cross, |&(i, j)| {
        c.memo.equivalent(&c.entries, reps[i], reps[j])
    });
    let mut necessity = true;
    for v in cross_verdicts {
        necessity &= !v?;
    }

    let class_sizes: Vec<u64> = partition.classes.iter().map(|k| k.size).collect();
    let class_matrix_counts: Vec<usize> = partition
        .classes
        .iter()
        .map(|k| k.distinct_matrices)
        .collect();
    Ok(ConjectureReport {
        r,
        n,
        phi: partition.phi,
        lower_bound: partition.lower_bound,
        signature_iff_equivalent: equality_claimed.then_some(sufficiency && necessity),
        phi_equals_bound: equality_claimed.then_some(partition.phi as u64 == partition.lower_bound),
        phi_at_least_bound: partition.phi as u64 >= partition.lower_bound,
        equal_class_sizes: all_equal(&class_sizes),
        equal_matrix_counts: all_equal(&class_matrix_counts),
        class_sizes,
        class_matrix_counts,
    })
}

/// Convenience for callers comparing the search against the closed form.
pub fn phitilde_agrees(search: &PhitildeSearch) -> Result<Option<bool>> {
    let expected = phitilde_formula(search.r)?;
    Ok(match search.outcome {
        PhitildeOutcome::Found(n) => Some(n == expected),
        PhitildeOutcome::NotFoundBelow(max) => (expected <= max).then_some(false),
    })
}
