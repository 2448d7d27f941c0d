//! The Buchstaber invariant: exact real version, certified integral
//! version, and the bound battery.
//!
//! `s_R(K)` is the largest `s` admitting a map from the `m` vertices to
//! `Z₂^{m-s} \ {0}` whose vectors are linearly independent on every maximal
//! face. The search engine here works in the equivalent matrix form: an
//! `m × s` matrix over `GF(2)` such that for every maximal face the
//! complementary `(m-n) × s` submatrix has full column rank `s`. The two
//! forms are exchanged by the kernel/quotient duality, and the matrix form
//! has far smaller branching for the `n+3`-facet families (`s ≤ 3` there).
//! Certificates are converted back to the vector-assignment form and
//! re-verified before being returned.
//!
//! Over the integers there is no finite search in general; `s(K)` is
//! reported as an honest interval unless one of two certified conditions
//! applies: the bound interval is tight, or the upper bound is at most 3,
//! in which case a 0/1 `GF(2)` matrix certificate lifts to `Z` — a 0/1
//! matrix of at most 3 columns with full column rank mod 2 has an odd
//! minor of size ≤ 3, hence a ±1 minor, hence columns extending to a
//! basis.

use crate::complex::{labels_from_mask, FaceMask, SimplicialComplex};
use crate::linalg::{gf2_rank_words, is_part_of_basis, smith_with_transforms, IntMatrix};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

/// Coefficient ring of a torus assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ring {
    #[serde(rename = "GF2")]
    GF2,
    #[serde(rename = "Int")]
    Int,
}

/// A map `vertices → Z₂^r` or `→ Z^r` certifying `s = m - r`: on every
/// maximal face the vectors are independent (GF2) or extend to a basis
/// (Int).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusAssignment {
    pub ring: Ring,
    pub r: usize,
    pub vectors: Vec<Vec<i64>>,
}

impl TorusAssignment {
    /// The certified value `s = m - r`.
    pub fn s_value(&self) -> usize {
        self.vectors.len() - self.r
    }

    /// Check the defining property on a complex.
    pub fn verify(&self, k: &SimplicialComplex) -> Result<()> {
        if self.vectors.len() != k.m() {
            return Err(Error::Input("assignment has wrong number of vectors".into()));
        }
        for &face in k.maximal_masks() {
            let members: Vec<usize> = (0..k.m()).filter(|&i| face >> i & 1 == 1).collect();
            match self.ring {
                Ring::GF2 => {
                    let rows: Vec<u64> = members
                        .iter()
                        .map(|&i| {
                            self.vectors[i]
                                .iter()
                                .enumerate()
                                .fold(0u64, |acc, (j, &v)| acc | (((v & 1) as u64) << j))
                        })
                        .collect();
                    if gf2_rank_words(&rows) != members.len() {
                        return Err(Error::Internal(format!(
                            "face {:?} has dependent GF(2) vectors",
                            labels_from_mask(face)
                        )));
                    }
                }
                Ring::Int => {
                    let mut m = IntMatrix::zero(self.r, members.len());
                    for (col, &i) in members.iter().enumerate() {
                        for (row, &v) in self.vectors[i].iter().enumerate() {
                            m[(row, col)] = BigInt::from(v);
                        }
                    }
                    if !is_part_of_basis(&m) {
                        return Err(Error::Internal(format!(
                            "face {:?} vectors do not extend to a basis of Z^{}",
                            labels_from_mask(face),
                            self.r
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Reduce an integral assignment mod 2.
    pub fn mod2(&self) -> TorusAssignment {
        TorusAssignment {
            ring: Ring::GF2,
            r: self.r,
            vectors: self
                .vectors
                .iter()
                .map(|v| v.iter().map(|x| x.rem_euclid(2)).collect())
                .collect(),
        }
    }
}

/// Interval (or exact value) for the integral Buchstaber number, with the
/// bound provenance and a certificate when one exists.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SRange {
    pub lower: usize,
    pub upper: usize,
    pub exact: bool,
    pub certificate: Option<TorusAssignment>,
    pub provenance: Vec<(String, i64)>,
}

/// The matrix-form search: find 0/1 rows (one per vertex, nonzero) such
/// that every maximal-face complement has full column rank `s`. Canonical
/// prefixes fix the first occurrence of each new basis direction, killing
/// the GL(s, 2) column symmetry.
struct MatrixSearch {
    s: usize,
    order: Vec<usize>,
    /// complements (vertex masks), each must reach column rank s
    complements: Vec<FaceMask>,
    /// complements containing each vertex
    touching: Vec<Vec<usize>>,
    /// per-complement stack of reduced rows (0 entries are dependent
    /// insertions), with the current rank alongside
    echelon: Vec<Vec<u32>>,
    rank: Vec<usize>,
    remaining: Vec<usize>,
    rows: Vec<u32>,
}

impl MatrixSearch {
    fn new(k: &SimplicialComplex, s: usize) -> Self {
        let m = k.m();
        let full = k.full_mask();
        let mut complements: Vec<FaceMask> =
            k.maximal_masks().iter().map(|&f| full & !f).collect();
        complements.sort_by_key(|c| (c.count_ones(), *c));
        complements.dedup();
        let mut touching = vec![Vec::new(); m];
        for (ci, &c) in complements.iter().enumerate() {
            for v in 0..m {
                if c >> v & 1 == 1 {
                    touching[v].push(ci);
                }
            }
        }
        // assign vertices in order of first appearance in the sorted
        // complements; unconstrained vertices go last
        let mut order = Vec::with_capacity(m);
        let mut seen = vec![false; m];
        for &c in &complements {
            for v in 0..m {
                if c >> v & 1 == 1 && !seen[v] {
                    seen[v] = true;
                    order.push(v);
                }
            }
        }
        for v in 0..m {
            if !seen[v] {
                order.push(v);
            }
        }
        let remaining = complements.iter().map(|c| c.count_ones() as usize).collect();
        MatrixSearch {
            s,
            order,
            echelon: vec![Vec::new(); complements.len()],
            rank: vec![0; complements.len()],
            complements,
            touching,
            remaining,
            rows: vec![0; m],
        }
    }

    fn run(&mut self) -> Option<Vec<u32>> {
        if self.complements.iter().any(|c| (c.count_ones() as usize) < self.s) {
            return None;
        }
        if self.dfs(0, 0) {
            Some(self.rows.clone())
        } else {
            None
        }
    }

    fn dfs(&mut self, pos: usize, dim: usize) -> bool {
        if pos == self.order.len() {
            return true;
        }
        let v = self.order[pos];
        let fresh = if dim < self.s { 1 } else { 0 };
        // canonical candidates: the span of the used coordinate prefix,
        // plus one fresh basis vector
        for x in 1..(1u32 << dim) + fresh {
            if self.try_assign(v, x) {
                let new_dim = dim.max(32 - x.leading_zeros() as usize);
                if self.dfs(pos + 1, new_dim) {
                    return true;
                }
                self.unassign(v, x);
            }
        }
        false
    }

    fn try_assign(&mut self, v: usize, x: u32) -> bool {
        // tentatively update every complement containing v
        for idx in 0..self.touching[v].len() {
            let ci = self.touching[v][idx];
            let mut reduced = x;
            for &b in &self.echelon[ci] {
                if b == 0 {
                    continue;
                }
                let pivot = 1u32 << (31 - b.leading_zeros());
                if reduced & pivot != 0 {
                    reduced ^= b;
                }
            }
            let rank_after = self.rank[ci] + usize::from(reduced != 0);
            if rank_after + (self.remaining[ci] - 1) < self.s {
                // roll back the complements updated so far
                for t in 0..idx {
                    let cj = self.touching[v][t];
                    self.pop_update(cj);
                }
                return false;
            }
            self.echelon[ci].push(reduced);
            self.rank[ci] = rank_after;
            self.remaining[ci] -= 1;
        }
        self.rows[v] = x;
        true
    }

    fn pop_update(&mut self, ci: usize) {
        let top = self.echelon[ci].pop().expect("echelon underflow");
        if top != 0 {
            self.rank[ci] -= 1;
        }
        self.remaining[ci] += 1;
    }

    fn unassign(&mut self, v: usize, _x: u32) {
        for t in (0..self.touching[v].len()).rev() {
            let ci = self.touching[v][t];
            self.pop_update(ci);
        }
        self.rows[v] = 0;
    }
}

fn check_searchable(k: &SimplicialComplex) -> Result<(usize, usize)> {
    if !k.is_pure() {
        return Err(Error::Input("Buchstaber search requires a pure complex".into()));
    }
    let (m, n) = (k.m(), k.max_face_size());
    if m == 0 || m == n {
        return Err(Error::Input(
            "complex is a full simplex or empty; not the dual of a polytope boundary".into(),
        ));
    }
    Ok((m, n))
}

/// Is there a GF(2) matrix certificate for `s_R(K) >= s`?
pub fn s_real_feasible(k: &SimplicialComplex, s: usize) -> Result<bool> {
    let (m, n) = check_searchable(k)?;
    if s == 0 || s > m - n {
        return Ok(s == 0);
    }
    Ok(MatrixSearch::new(k, s).run().is_some())
}

fn s_real_matrix(k: &SimplicialComplex) -> Result<(usize, Vec<u32>)> {
    let (m, n) = check_searchable(k)?;
    for s in (1..=m - n).rev() {
        if let Some(rows) = MatrixSearch::new(k, s).run() {
            return Ok((s, rows));
        }
    }
    // s >= 1 always: the diagonal circle gives a rank-1 certificate
    Err(Error::Internal("no matrix certificate found even at s = 1".into()))
}

/// Exact real Buchstaber invariant with a `GF(2)` assignment certificate.
pub fn s_real(k: &SimplicialComplex) -> Result<(usize, TorusAssignment)> {
    let (s, rows) = s_real_matrix(k)?;
    let cert = gf2_matrix_to_assignment(k, s, &rows)?;
    cert.verify(k)?;
    Ok((s, cert))
}

/// Quotient `F₂^m / colspace(M)` in coordinates: the vertex `i` maps to
/// the class of `e_i`.
fn gf2_matrix_to_assignment(
    k: &SimplicialComplex,
    s: usize,
    rows: &[u32],
) -> Result<TorusAssignment> {
    let m = k.m();
    // columns of M as m-bit masks
    let mut basis: Vec<u64> = Vec::new(); // echelon, pivot = lowest set bit
    for j in 0..s {
        let mut col: u64 = 0;
        for (i, &row) in rows.iter().enumerate() {
            if row >> j & 1 == 1 {
                col |= 1 << i;
            }
        }
        for &b in &basis {
            let pivot = b & b.wrapping_neg();
            if col & pivot != 0 {
                col ^= b;
            }
        }
        if col == 0 {
            return Err(Error::Internal("certificate matrix has dependent columns".into()));
        }
        basis.push(col);
    }
    // full reduction so each pivot occurs in exactly one basis vector
    let pivots: Vec<u64> = basis.iter().map(|b| b & b.wrapping_neg()).collect();
    for i in 0..basis.len() {
        for j in 0..basis.len() {
            if i != j && basis[i] & pivots[j] != 0 {
                basis[i] ^= basis[j];
            }
        }
    }
    let pivot_mask: u64 = pivots.iter().fold(0, |a, &p| a | p);
    let free_positions: Vec<usize> = (0..m).filter(|&i| pivot_mask >> i & 1 == 0).collect();
    let r = m - s;
    debug_assert_eq!(free_positions.len(), r);
    let vectors: Vec<Vec<i64>> = (0..m)
        .map(|i| {
            let mut e: u64 = 1 << i;
            for b in &basis {
                let pivot = b & b.wrapping_neg();
                if e & pivot != 0 {
                    e ^= b;
                }
            }
            free_positions.iter().map(|&p| (e >> p & 1) as i64).collect()
        })
        .collect();
    Ok(TorusAssignment { ring: Ring::GF2, r, vectors })
}

/// Lift a 0/1 matrix certificate at `s ≤ 3` to an integral assignment.
fn lift_zero_one(k: &SimplicialComplex, s: usize, rows: &[u32]) -> Result<TorusAssignment> {
    let m = k.m();
    let mut mz = IntMatrix::zero(m, s);
    for (i, &row) in rows.iter().enumerate() {
        for j in 0..s {
            if row >> j & 1 == 1 {
                mz[(i, j)] = BigInt::one();
            }
        }
    }
    // the 0/1 lifting lemma: full column rank mod 2 with s ≤ 3 gives a
    // ±1 minor; verify exactly rather than trusting it
    let full = k.full_mask();
    for &face in k.maximal_masks() {
        let comp = full & !face;
        let members: Vec<usize> = (0..m).filter(|&i| comp >> i & 1 == 1).collect();
        let mut sub = IntMatrix::zero(members.len(), s);
        for (r_i, &i) in members.iter().enumerate() {
            for j in 0..s {
                sub[(r_i, j)] = mz[(i, j)].clone();
            }
        }
        if !is_part_of_basis(&sub) {
            return Err(Error::Internal(
                "0/1 lift failed: complement columns do not extend to a Z-basis".into(),
            ));
        }
    }
    // quotient Z^m / im(M) ≅ Z^{m-s}: with U M V = diag(1,…,1) the last
    // m - s rows of U give the quotient coordinates
    let snf = smith_with_transforms(&mz);
    if snf.diagonal.len() != s || !snf.diagonal.iter().all(|d| d.is_one()) {
        return Err(Error::Internal("certificate matrix is not primitive over Z".into()));
    }
    let r = m - s;
    let vectors: Vec<Vec<i64>> = (0..m)
        .map(|i| {
            (s..m)
                .map(|row| {
                    i64::try_from(&snf.u[(row, i)]).map_err(|_| {
                        Error::Internal("certificate entry exceeds i64".into())
                    })
                })
                .collect::<Result<Vec<i64>>>()
        })
        .collect::<Result<_>>()?;
    let cert = TorusAssignment { ring: Ring::Int, r, vectors };
    cert.verify(k)?;
    Ok(cert)
}

/// Izmestiev's bound `s(P) ≥ m - γ(P)`, clamped at 1 (the diagonal circle
/// always acts freely).
pub fn izmestiev_bound(k: &SimplicialComplex) -> usize {
    let gamma = k.one_skeleton_chromatic_number();
    (k.m() as i64 - gamma as i64).max(1) as usize
}

/// The integral certificate behind Izmestiev's bound: the vertex of color
/// `c` maps to the basis vector `e_c` of `Z^γ`; faces have pairwise
/// adjacent vertices, hence pairwise distinct colors.
pub fn izmestiev_certificate(k: &SimplicialComplex) -> Result<TorusAssignment> {
    let (gamma, colors) = k.one_skeleton_coloring();
    let vectors = colors
        .iter()
        .map(|&c| (0..gamma).map(|j| i64::from(j == c)).collect())
        .collect();
    let cert = TorusAssignment { ring: Ring::Int, r: gamma, vectors };
    cert.verify(k)?;
    Ok(cert)
}

/// Aizenberg's bound `s(P) ≤ m - ⌈log₂(γ(P)+1)⌉`.
pub fn aizenberg_bound(k: &SimplicialComplex) -> usize {
    let gamma = k.one_skeleton_chromatic_number();
    k.m() - ceil_log2(gamma + 1)
}

fn ceil_log2(x: usize) -> usize {
    (x.max(1)).next_power_of_two().trailing_zeros() as usize
}

/// Minimal-non-face cover bound: if `ω_1 ∪ … ∪ ω_l = [m]` for minimal
/// non-faces `ω_i`, then `m - s ≤ Σ (|ω_i| - 1)`; minimized by exact
/// branch-and-bound set cover. Returns 1 when the minimal non-faces do not
/// cover the vertex set.
pub fn cover_bound(k: &SimplicialComplex) -> usize {
    let sets = k.minimal_non_face_masks();
    let full = k.full_mask();
    if k.m() == 0 || sets.iter().fold(0u32, |a, &s| a | s) != full {
        return 1;
    }
    let max_cover = sets.iter().map(|s| s.count_ones() as usize).max().unwrap();
    let mut best = sets.iter().map(|s| s.count_ones() as usize - 1).sum::<usize>() + 1;

    fn rec(
        sets: &[FaceMask],
        uncovered: FaceMask,
        cost: usize,
        best: &mut usize,
        max_cover: usize,
    ) {
        if uncovered == 0 {
            *best = (*best).min(cost);
            return;
        }
        // each chosen set covers ≤ max_cover new vertices at weight ≥ 1
        let lb = (uncovered.count_ones() as usize).div_ceil(max_cover);
        if cost + lb >= *best {
            return;
        }
        let pivot = uncovered.trailing_zeros();
        for &s in sets.iter().filter(|&&s| s >> pivot & 1 == 1) {
            rec(sets, uncovered & !s, cost + (s.count_ones() as usize - 1), best, max_cover);
        }
    }
    rec(&sets, full, 0, &mut best, max_cover);
    (k.m() as i64 - best as i64).max(1) as usize
}

/// Flag-based lower bounds: for flag complexes
/// `s ≥ ⌈(m-n)/2⌉ + s(Δ^{γ-1}_{n-1})` (with the skeleton term bounded
/// below by `⌊γ/(n+1)⌋`); for `k`-flag complexes (`k ≥ 3`)
/// `s ≥ ⌈(m-n)/k⌉ - (k-2)n`. Clamped at 1.
pub fn flag_bounds(k: &SimplicialComplex) -> usize {
    if !k.is_pure() {
        return 1;
    }
    let (m, n) = (k.m(), k.max_face_size());
    if m <= n {
        return 1;
    }
    let (is_flag, least_k) = k.flag_defect();
    let value: i64 = if is_flag {
        let gamma = k.one_skeleton_chromatic_number();
        ((m - n).div_ceil(2) + gamma / (n + 1)) as i64
    } else {
        (m - n).div_ceil(least_k) as i64 - ((least_k - 2) * n) as i64
    };
    value.max(1) as usize
}

/// Skeleton predicate: `s(Δ^{m-1}_{n-1}) ≥ 2` iff `m/(n+1) ≥ 3/2`.
pub fn skeleton_s2_predicate(m: usize, n: usize) -> bool {
    2 * m >= 3 * (n + 1)
}

/// Skeleton predicate: `s(Δ^{m-1}_{n-1}) ≥ 3` iff `4m ≥ 7(n+1) + c(m mod 7)`.
pub fn skeleton_s3_predicate(m: usize, n: usize) -> bool {
    const OFFSETS: [usize; 7] = [0, 4, 8, 5, 2, 6, 3];
    4 * m >= 7 * (n + 1) + OFFSETS[m % 7]
}

/// Certified range for the integral Buchstaber invariant.
pub fn s_int(k: &SimplicialComplex) -> Result<SRange> {
    let (m, _) = check_searchable(k)?;
    let (s_r, rows) = s_real_matrix(k)?;
    let gamma = k.one_skeleton_chromatic_number();
    let aizen = m - ceil_log2(gamma + 1);
    let upper = s_r.min(aizen);
    let izm = izmestiev_bound(k);
    let cov = cover_bound(k);
    let flag = flag_bounds(k);
    let mut lower = izm.max(cov).max(flag).max(1);
    let mut provenance = vec![
        ("s_real".to_string(), s_r as i64),
        ("aizenberg_upper".to_string(), aizen as i64),
        ("izmestiev_lower".to_string(), izm as i64),
        ("cover_lower".to_string(), cov as i64),
        ("flag_lower".to_string(), flag as i64),
    ];

    let mut certificate = None;
    let mut exact = false;
    if upper <= 3 {
        // 0/1 lifting regime: a GF(2) matrix certificate at s = upper
        // exists (truncate the s_R certificate) and lifts to Z
        let rows_at_upper = if upper == s_r {
            Some(rows)
        } else {
            MatrixSearch::new(k, upper).run()
        };
        if let Some(rw) = rows_at_upper {
            let trimmed: Vec<u32> =
                rw.iter().map(|&r| r & ((1u32 << upper) - 1)).collect();
            let cert = lift_zero_one(k, upper, &trimmed)?;
            provenance.push(("zero_one_lift".to_string(), upper as i64));
            certificate = Some(cert);
            lower = upper;
            exact = true;
        }
    }
    if !exact && lower == upper {
        exact = true;
        if izm == lower {
            certificate = Some(izmestiev_certificate(k)?);
        }
    }
    if certificate.is_none() && izm == lower {
        certificate = Some(izmestiev_certificate(k)?);
    }
    let range = SRange { lower, upper, exact, certificate, provenance };
    let n = k.max_face_size();
    if !(1 <= range.lower && range.lower <= range.upper && range.upper <= m - n)
        || (range.exact && range.lower != range.upper)
    {
        return Err(Error::Internal(format!(
            "bound bookkeeping violated: [{}, {}] exact={} with m - n = {}",
            range.lower,
            range.upper,
            range.exact,
            m - n
        )));
    }
    Ok(range)
}

/// The Fukukawa–Masuda optimum `m_k(b)`: maximize `Σ a_v` over
/// nonnegative integer vectors indexed by `v ∈ Z₂^k \ 0` subject to
/// `Σ_{(u,v)=0} a_v ≤ b` for every `u ≠ 0`, by branch and bound.
pub fn fm_mk(k: usize, b: usize) -> Result<usize> {
    if !(2..=4).contains(&k) {
        return Err(Error::DeskScale(format!("fm_mk supports 2 <= k <= 4, got {k}")));
    }
    if b > 24 {
        return Err(Error::DeskScale(format!("fm_mk supports b <= 24, got {b}")));
    }
    let nvars = (1usize << k) - 1;
    // constraint u covers v iff (u, v) = 0
    let in_constraint = |u: usize, v: usize| ((u & v).count_ones() % 2) == 0;
    let constraints_of: Vec<Vec<usize>> = (1..=nvars)
        .map(|v| (1..=nvars).filter(|&u| in_constraint(u, v)).collect())
        .collect();
    let mut slack = vec![b as i64; nvars + 1];
    let mut best = 0i64;

    fn rec(
        v: usize,
        nvars: usize,
        total: i64,
        slack: &mut Vec<i64>,
        constraints_of: &[Vec<usize>],
        best: &mut i64,
    ) {
        if v > nvars {
            *best = (*best).max(total);
            return;
        }
        // optimistic bound: each remaining variable capped by its loosest
        // admissible slack
        let mut optimistic = total;
        for w in v..=nvars {
            let cap = constraints_of[w - 1].iter().map(|&u| slack[u]).min().unwrap_or(0);
            optimistic += cap.max(0);
        }
        if optimistic <= *best {
            return;
        }
        let cap = constraints_of[v - 1].iter().map(|&u| slack[u]).min().unwrap_or(0).max(0);
        for val in (0..=cap).rev() {
            for &u in &constraints_of[v - 1] {
                slack[u] -= val;
            }
            rec(v + 1, nvars, total + val, slack, constraints_of, best);
            for &u in &constraints_of[v - 1] {
                slack[u] += val;
            }
        }
    }
    rec(1, nvars, 0, &mut slack, &constraints_of, &mut best);
    Ok(best as usize)
}
