//! Constructors and transformations for the polytope families.
//!
//! The central object is the weighted odd-gon presentation of a simple
//! `n`-polytope with `n + 3` facets: a regular `(2k-1)`-gon with positive
//! multiplicities `a_1, …, a_{2k-1}` attached to its vertices. Facets of
//! the polytope correspond to the `m = Σ a_i` marked points; a set of
//! facets has empty intersection exactly when it contains all points of
//! `k - 1` consecutive polygon vertices, so the minimal non-faces of the
//! dual complex are the `2k-1` "block runs". Everything else here —
//! cyclic-polytope duals, simplex skeletons, doubling, connected sums,
//! flips, table (star) diagrams — feeds or cross-checks that presentation.
//!
//! Tables store exact rationals; comparisons against the cut line
//! `x + y = 1` must be strict/non-strict exactly, so no floating point
//! appears anywhere.

use crate::complex::{for_each_subset, labels_from_mask, FaceMask, HPolynomial, SimplicialComplex};
use crate::poly::IntPoly;
use crate::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::str::FromStr;

/// Weighted odd-gon presentation `(a_1, …, a_{2k-1})` of an `n`-polytope
/// with `n + 3` facets; `n = Σ a_i - 3`, `m = Σ a_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct PolygonPresentation {
    weights: Vec<usize>,
}

impl TryFrom<Vec<usize>> for PolygonPresentation {
    type Error = Error;
    fn try_from(w: Vec<usize>) -> Result<Self> {
        PolygonPresentation::new(w)
    }
}

impl From<PolygonPresentation> for Vec<usize> {
    fn from(p: PolygonPresentation) -> Vec<usize> {
        p.weights
    }
}

impl PolygonPresentation {
    pub fn new(weights: Vec<usize>) -> Result<Self> {
        if weights.len() < 3 || weights.len() % 2 == 0 {
            return Err(Error::Input(format!(
                "polygon presentation needs an odd number (>= 3) of weights, got {}",
                weights.len()
            )));
        }
        if weights.iter().any(|&a| a == 0) {
            return Err(Error::Input("all polygon weights must be positive".into()));
        }
        if weights.len() == 3 && weights.iter().any(|&a| a < 2) {
            return Err(Error::Input(
                "triangle presentations need every weight >= 2: with a weight 1 the Gale \
                 diagram leaves an open half-plane with fewer than two points, so no polytope \
                 exists"
                    .into(),
            ));
        }
        let m: usize = weights.iter().sum();
        if m > 32 {
            return Err(Error::DeskScale(format!("presentation has m = {m} > 32")));
        }
        if m < 4 {
            return Err(Error::Input("presentation needs n = sum - 3 >= 1".into()));
        }
        Ok(PolygonPresentation { weights })
    }

    pub fn weights(&self) -> &[usize] {
        &self.weights
    }

    /// Number of polygon vertices is `2k - 1`.
    pub fn k(&self) -> usize {
        (self.weights.len() + 1) / 2
    }

    pub fn m(&self) -> usize {
        self.weights.iter().sum()
    }

    pub fn n(&self) -> usize {
        self.m() - 3
    }

    fn len(&self) -> usize {
        self.weights.len()
    }

    /// Weight at a cyclic 1-based position.
    pub fn weight_at(&self, pos: usize) -> usize {
        self.weights[(pos - 1) % self.len()]
    }

    /// `η_j = a_1 + … + a_j` (`η_0 = 0`).
    pub fn eta(&self, j: usize) -> usize {
        self.weights[..j].iter().sum()
    }

    /// `φ_j = a_j + … + a_{j+k-2}` (k-1 cyclically consecutive weights).
    pub fn phi(&self, j: usize) -> usize {
        (0..self.k() - 1).map(|t| self.weight_at(j + t)).sum()
    }

    /// `ψ_j = a_j + … + a_{j+k-1}` (k cyclically consecutive weights).
    pub fn psi(&self, j: usize) -> usize {
        (0..self.k()).map(|t| self.weight_at(j + t)).sum()
    }

    /// Facet labels of block `j` (cyclic 1-based): `η_{j-1}+1 … η_j`.
    pub fn block_mask(&self, j: usize) -> FaceMask {
        let j = (j - 1) % self.len() + 1;
        let lo = self.eta(j - 1);
        let hi = self.eta(j);
        let mut mask = 0u32;
        for v in lo..hi {
            mask |= 1 << v;
        }
        mask
    }

    /// Block index (1-based) of a facet label.
    pub fn block_of(&self, label: usize) -> usize {
        let mut acc = 0;
        for (j, &a) in self.weights.iter().enumerate() {
            acc += a;
            if label <= acc {
                return j + 1;
            }
        }
        unreachable!("label out of range")
    }

    /// Union of blocks `j, …, j+k-2`: the `j`-th minimal non-face.
    pub fn run_union_mask(&self, j: usize) -> FaceMask {
        (0..self.k() - 1).fold(0u32, |acc, t| acc | self.block_mask(j + t))
    }

    pub fn rotated(&self, r: usize) -> PolygonPresentation {
        let len = self.len();
        let weights = (0..len).map(|i| self.weights[(i + r) % len]).collect();
        PolygonPresentation { weights }
    }

    pub fn reflected(&self) -> PolygonPresentation {
        let mut weights = self.weights.clone();
        weights.reverse();
        PolygonPresentation { weights }
    }

    /// Equality up to rotation and reflection of the polygon (these induce
    /// isomorphic complexes).
    pub fn is_equivalent(&self, other: &PolygonPresentation) -> bool {
        if self.len() != other.len() {
            return false;
        }
        (0..self.len()).any(|r| {
            let rot = other.rotated(r);
            rot == *self || rot.reflected() == *self
        })
    }
}

/// `∂Δ^n`: `m = n + 1` vertices, maximal faces all `n`-subsets.
pub fn boundary_simplex(n: usize) -> Result<SimplicialComplex> {
    if n == 0 {
        return Err(Error::Input("boundary simplex needs n >= 1".into()));
    }
    simplex_skeleton(n + 1, n)
}

/// `Δ^{m-1}_{n-1}`: all `n`-subsets of `[m]` as maximal faces.
pub fn simplex_skeleton(m: usize, n: usize) -> Result<SimplicialComplex> {
    if n == 0 {
        return Err(Error::Input("skeleton needs n >= 1".into()));
    }
    if n >= m {
        return Err(Error::Input(format!(
            "skeleton needs n < m (n = {n}, m = {m}): the full simplex is not the dual of a \
             polytope boundary"
        )));
    }
    if m > 32 {
        return Err(Error::DeskScale(format!("skeleton has m = {m} > 32")));
    }
    let mut faces = Vec::new();
    for_each_subset(m, n, &mut |mask| faces.push(mask));
    SimplicialComplex::from_masks(m, faces)
}

/// Dual of the cyclic polytope `C^n(m)` by Gale's evenness condition on
/// the segment `[1..m]`: an `n`-subset `ω` is a facet iff any two points
/// outside `ω` are separated by an even number of points of `ω`.
pub fn cyclic_dual(n: usize, m: usize) -> Result<SimplicialComplex> {
    if n == 0 || m < n + 1 {
        return Err(Error::Input(format!("cyclic dual needs 1 <= n < m (n = {n}, m = {m})")));
    }
    if m > 32 {
        return Err(Error::DeskScale(format!("cyclic dual has m = {m} > 32")));
    }
    let mut faces = Vec::new();
    for_each_subset(m, n, &mut |mask| {
        if gale_even(mask, m) {
            faces.push(mask);
        }
    });
    SimplicialComplex::from_masks(m, faces)
}

fn gale_even(mask: FaceMask, m: usize) -> bool {
    let outside: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 0).collect();
    outside.windows(2).all(|w| {
        let between = (w[0] + 1..w[1]).filter(|&i| mask >> i & 1 == 1).count();
        between % 2 == 0
    })
}

/// All minimal hitting sets of a set system, by branch-and-filter: branch
/// on the elements of the first unhit set, then keep only sets where every
/// element owns a private set.
fn minimal_hitting_sets(sets: &[FaceMask]) -> Vec<FaceMask> {
    fn rec(sets: &[FaceMask], chosen: FaceMask, out: &mut BTreeSet<FaceMask>) {
        match sets.iter().find(|&&s| s & chosen == 0) {
            Some(&unhit) => {
                let mut rest = unhit;
                while rest != 0 {
                    let bit = rest & rest.wrapping_neg();
                    rest ^= bit;
                    rec(sets, chosen | bit, out);
                }
            }
            None => {
                let mut rest = chosen;
                while rest != 0 {
                    let bit = rest & rest.wrapping_neg();
                    rest ^= bit;
                    let has_private = sets.iter().any(|&s| s & chosen == bit);
                    if !has_private {
                        return;
                    }
                }
                out.insert(chosen);
            }
        }
    }
    let mut out = BTreeSet::new();
    rec(sets, 0, &mut out);
    out.into_iter().collect()
}

/// The dual complex of the polytope presented by a weighted odd polygon.
///
/// Faces are exactly the label sets containing no full block run
/// `B_j ∪ … ∪ B_{j+k-2}`; maximal faces are materialized as complements of
/// the minimal hitting sets of those runs.
pub fn polygon_complex(p: &PolygonPresentation) -> Result<SimplicialComplex> {
    let m = p.m();
    let runs: Vec<FaceMask> = (1..=p.len()).map(|j| p.run_union_mask(j)).collect();
    let full: u32 = ((1u64 << m) - 1) as u32;
    let faces: Vec<FaceMask> =
        minimal_hitting_sets(&runs).into_iter().map(|h| full & !h).collect();
    let complex = SimplicialComplex::from_masks(m, faces)?;
    if !complex.is_pure() || complex.max_face_size() != p.n() {
        return Err(Error::Internal(format!(
            "polygon complex for {:?} is not pure of dimension n-1",
            p.weights()
        )));
    }
    Ok(complex)
}

/// Same complex through the center-of-polygon description: facets
/// `F_{i_1}, …, F_{i_n}` meet in a vertex iff the triangle formed by the
/// remaining three marked points contains the polygon's center, i.e. the
/// three points sit at pairwise distinct polygon vertices whose cyclic
/// gaps are all at most `k - 1`.
pub fn polygon_complex_via_center(p: &PolygonPresentation) -> Result<SimplicialComplex> {
    let m = p.m();
    let len = p.len();
    let k = p.k();
    let full: u32 = ((1u64 << m) - 1) as u32;
    let mut faces = Vec::new();
    for b1 in 1..=len {
        for b2 in b1 + 1..=len {
            for b3 in b2 + 1..=len {
                let gaps = [b2 - b1, b3 - b2, len + b1 - b3];
                if gaps.iter().any(|&g| g > k - 1) {
                    continue;
                }
                for x in labels_from_mask(p.block_mask(b1)) {
                    for y in labels_from_mask(p.block_mask(b2)) {
                        for z in labels_from_mask(p.block_mask(b3)) {
                            let triple = (1u32 << (x - 1)) | (1 << (y - 1)) | (1 << (z - 1));
                            faces.push(full & !triple);
                        }
                    }
                }
            }
        }
    }
    SimplicialComplex::from_masks(m, faces)
}

/// Doubling: replace vertex `i` of `K` by a block of `multiplicities[i-1]`
/// vertices; a set is a face iff the set of blocks it fully contains is a
/// face of `K`.
pub fn doubling(k: &SimplicialComplex, multiplicities: &[usize]) -> Result<SimplicialComplex> {
    if multiplicities.len() != k.m() {
        return Err(Error::Input(format!(
            "expected {} multiplicities, got {}",
            k.m(),
            multiplicities.len()
        )));
    }
    if multiplicities.iter().any(|&c| c == 0) {
        return Err(Error::Input("multiplicities must be positive".into()));
    }
    let m_new: usize = multiplicities.iter().sum();
    if m_new > 32 {
        return Err(Error::DeskScale(format!("doubled complex has m = {m_new} > 32")));
    }
    // block start offsets (0-based bit positions)
    let mut start = vec![0usize; k.m()];
    let mut acc = 0;
    for (i, &c) in multiplicities.iter().enumerate() {
        start[i] = acc;
        acc += c;
    }
    let block = |i: usize| -> u32 {
        let mut mask = 0u32;
        for t in 0..multiplicities[i] {
            mask |= 1 << (start[i] + t);
        }
        mask
    };
    // Each maximal face F of K yields ∏_{j ∉ F} k_j maximal faces: full
    // blocks over F, all-but-one vertex in every block outside F.
    let mut faces = Vec::new();
    for &f in k.maximal_masks() {
        let base =
            (0..k.m()).filter(|&i| f >> i & 1 == 1).fold(0u32, |acc, i| acc | block(i));
        let outside: Vec<usize> = (0..k.m()).filter(|&i| f >> i & 1 == 0).collect();
        let mut stack = vec![(0usize, base)];
        while let Some((idx, mask)) = stack.pop() {
            if idx == outside.len() {
                faces.push(mask);
                continue;
            }
            let j = outside[idx];
            for omit in 0..multiplicities[j] {
                let partial = block(j) & !(1 << (start[j] + omit));
                stack.push((idx + 1, mask | partial));
            }
        }
    }
    SimplicialComplex::from_masks(m_new, faces)
}

/// Connected sum of the duals along maximal faces `v1` of `k1` and `v2`
/// of `k2` under the given bijection `v1 → v2`.
pub fn connected_sum(
    k1: &SimplicialComplex,
    v1: &[usize],
    k2: &SimplicialComplex,
    v2: &[usize],
    gluing: &[(usize, usize)],
) -> Result<SimplicialComplex> {
    let n = k1.max_face_size();
    if !k1.is_pure() || !k2.is_pure() || k2.max_face_size() != n {
        return Err(Error::Input("connected sum needs pure complexes of equal dimension".into()));
    }
    if n < 2 {
        return Err(Error::Input("connected sum along vertices degenerates for n < 2".into()));
    }
    let m1 = crate::complex::mask_from_labels(k1.m(), v1)?;
    let m2 = crate::complex::mask_from_labels(k2.m(), v2)?;
    if !k1.maximal_masks().contains(&m1) || !k2.maximal_masks().contains(&m2) {
        return Err(Error::Input("gluing faces must be maximal".into()));
    }
    if gluing.len() != n {
        return Err(Error::Input("gluing must be a bijection between the two faces".into()));
    }
    let mut map2 = vec![0usize; k2.m()]; // old k2 label -> new label
    for &(a, b) in gluing {
        if m1 >> (a - 1) & 1 == 0 || m2 >> (b - 1) & 1 == 0 {
            return Err(Error::Input("gluing pairs must match the chosen faces".into()));
        }
        if map2[b - 1] != 0 {
            return Err(Error::Input("gluing maps a vertex twice".into()));
        }
        map2[b - 1] = a;
    }
    if map2.iter().filter(|&&x| x != 0).count() != n {
        return Err(Error::Input("gluing must be a bijection between the two faces".into()));
    }
    let mut next = k1.m();
    for b in 0..k2.m() {
        if map2[b] == 0 {
            next += 1;
            map2[b] = next;
        }
    }
    let total = k1.m() + k2.m() - n;
    let mut faces: Vec<FaceMask> =
        k1.maximal_masks().iter().copied().filter(|&f| f != m1).collect();
    for &f in k2.maximal_masks() {
        if f == m2 {
            continue;
        }
        let mut out = 0u32;
        for b in 0..k2.m() {
            if f >> b & 1 == 1 {
                out |= 1 << (map2[b] - 1);
            }
        }
        faces.push(out);
    }
    SimplicialComplex::from_masks(total, faces)
}

/// Record of one flip: type `i`, presentations before and after.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlipRecord {
    pub flip_type: usize,
    pub before: PolygonPresentation,
    pub after: PolygonPresentation,
}

impl FlipRecord {
    /// The h-polynomial shift `(t^{n+1-i} - t^i)/(t-1)` this flip causes.
    pub fn h_change(&self) -> IntPoly {
        flip_h_change(self.before.n(), self.flip_type)
    }
}

pub fn flip_h_change(n: usize, i: usize) -> IntPoly {
    let num = IntPoly::monomial(1, n + 1 - i).sub(&IntPoly::monomial(1, i));
    num.div_exact(&IntPoly::from_coeffs(vec![-1, 1])).expect("t-1 divides t^a - t^b")
}

/// Flip at polygon position `pos`: the `(2k-1)`-gon
/// `(a_1, …, a_pos, …, a_{pos+k}, …)` becomes the `(2k+1)`-gon
/// `(a_1, …, a_pos - 1, 1, a_{pos+1}, …, a_{pos+k-1}, 1, a_{pos+k} - 1, …)`,
/// with a unit weight merged into its neighbour whenever `a_pos` or
/// `a_{pos+k}` equals 1. The flip type is `i = a_{pos+1} + … + a_{pos+k-1}`.
///
/// The result is validated against the h-polynomial identity
/// `h(after) = h(before) + (t^{n+1-i} - t^i)/(t-1)` with both h's re-derived
/// from the complexes, which pins the bistellar exchange type.
pub fn polygon_flip(p: &PolygonPresentation, pos: usize) -> Result<FlipRecord> {
    let len = p.len();
    let k = p.k();
    let n = p.n();
    if pos == 0 || pos > len {
        return Err(Error::Input(format!("flip position {pos} out of range 1..={len}")));
    }
    let flip_type = p.phi(pos + 1); // a_{pos+1} + ... + a_{pos+k-1}
    if flip_type < 2 || flip_type + 1 > n {
        return Err(Error::Input(format!(
            "inadmissible flip: type {flip_type} outside 2..={}",
            n.saturating_sub(1)
        )));
    }
    let p2 = (pos + k - 1) % len + 1; // cyclic position pos + k

    #[derive(PartialEq, Clone, Copy)]
    enum Tag {
        Normal(usize),
        PosVal,
        InsertAfterPos,
        InsertBeforeP2,
        P2Val,
    }
    let mut items: Vec<(isize, Tag)> = Vec::with_capacity(len + 2);
    for j in 1..=len {
        if j == pos {
            items.push((p.weights[j - 1] as isize - 1, Tag::PosVal));
            items.push((1, Tag::InsertAfterPos));
        } else if j == p2 {
            items.push((1, Tag::InsertBeforeP2));
            items.push((p.weights[j - 1] as isize - 1, Tag::P2Val));
        } else {
            items.push((p.weights[j - 1] as isize, Tag::Normal(j)));
        }
    }
    let bump = |items: &mut Vec<(isize, Tag)>, target: Tag| {
        let idx = items.iter().position(|&(_, t)| t == target).expect("tag present");
        items[idx].0 += 1;
    };
    let remove = |items: &mut Vec<(isize, Tag)>, target: Tag| {
        let idx = items.iter().position(|&(_, t)| t == target).expect("tag present");
        items.remove(idx);
    };
    if p.weight_at(pos) == 1 {
        // substitute one vertex a_{pos+k-1} + 1 for the pair (a_{pos+k-1}, 1)
        remove(&mut items, Tag::PosVal);
        remove(&mut items, Tag::InsertBeforeP2);
        let prev = (pos + k - 2) % len + 1; // position pos + k - 1
        bump(&mut items, Tag::Normal(prev));
    }
    if p.weight_at(pos + k) == 1 {
        // substitute one vertex a_{pos+1} + 1 for the pair (a_{pos+1}, 1)
        remove(&mut items, Tag::P2Val);
        remove(&mut items, Tag::InsertAfterPos);
        let next = pos % len + 1; // position pos + 1
        bump(&mut items, Tag::Normal(next));
    }
    let weights: Vec<usize> = items
        .iter()
        .map(|&(v, _)| usize::try_from(v).map_err(|_| Error::Input("inadmissible flip".into())))
        .collect::<Result<_>>()?;
    let after = PolygonPresentation::new(weights)
        .map_err(|e| Error::Input(format!("inadmissible flip: {e}")))?;

    // oracle: re-derive both complexes and compare h's against the stated type
    let h_before = polygon_complex(p)?.h_polynomial()?;
    let h_after = polygon_complex(&after)?.h_polynomial()?;
    let diff = h_after.as_poly().sub(&h_before.as_poly());
    if diff != flip_h_change(n, flip_type) {
        return Err(Error::Internal(format!(
            "flip of {:?} at {pos}: h-change does not match type {flip_type}",
            p.weights()
        )));
    }
    Ok(FlipRecord { flip_type, before: p.clone(), after })
}

/// Closed-form h-polynomial of the odd-gon presentation:
/// `(t^{n+3} - Σ_i t^{ψ_i} + Σ_i t^{φ_i} - 1) / (t-1)^3`, exact division.
pub fn h_closed_form(p: &PolygonPresentation) -> Result<HPolynomial> {
    let n = p.n();
    let mut num = IntPoly::monomial(1, n + 3).sub(&IntPoly::constant(1));
    for j in 1..=p.len() {
        num = num.sub(&IntPoly::monomial(1, p.psi(j)));
        num = num.add(&IntPoly::monomial(1, p.phi(j)));
    }
    let den = IntPoly::from_coeffs(vec![-1, 1]).pow(3);
    let quot = num.div_exact(&den).ok_or_else(|| {
        Error::Internal(format!(
            "h numerator of {:?} is not divisible by (t-1)^3: invalid presentation",
            p.weights()
        ))
    })?;
    if quot.degree() != n {
        return Err(Error::Internal("closed-form h has wrong degree".into()));
    }
    Ok(HPolynomial::from_coeffs((0..=n).map(|i| quot.coeff(n - i)).collect()))
}

/// Exact rational cut-table for a polytope with `n + 3` facets: two sorted
/// line families plus the implicit cut line `x + y = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableDiagram {
    a: Vec<BigRational>,
    b: Vec<BigRational>,
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    a: Vec<String>,
    b: Vec<String>,
}

impl Serialize for TableDiagram {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TableJson {
            a: self.a.iter().map(|r| r.to_string()).collect(),
            b: self.b.iter().map(|r| r.to_string()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TableDiagram {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = TableJson::deserialize(d)?;
        let parse = |v: &[String]| -> Result<Vec<BigRational>> {
            v.iter()
                .map(|s| {
                    BigRational::from_str(s)
                        .map_err(|e| Error::Input(format!("bad rational {s:?}: {e}")))
                })
                .collect()
        };
        let a = parse(&raw.a).map_err(serde::de::Error::custom)?;
        let b = parse(&raw.b).map_err(serde::de::Error::custom)?;
        TableDiagram::new(a, b).map_err(serde::de::Error::custom)
    }
}

impl TableDiagram {
    pub fn new(a: Vec<BigRational>, b: Vec<BigRational>) -> Result<Self> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::Input("table needs at least one line per family".into()));
        }
        if a.windows(2).any(|w| w[0] >= w[1]) || b.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Input("table lines must be strictly increasing".into()));
        }
        let one = BigRational::one();
        for x in &a {
            for y in &b {
                if x + y == one {
                    return Err(Error::Input(format!(
                        "node ({x}, {y}) lies on the cut line x + y = 1"
                    )));
                }
            }
        }
        if &a[0] + &b[0] >= one {
            return Err(Error::Input(
                "the node (a_0, b_0) must lie beneath the cut line (polytope nonempty)".into(),
            ));
        }
        let t = TableDiagram { a, b };
        t.vertices()?; // irredundancy check
        Ok(t)
    }

    pub fn a(&self) -> &[BigRational] {
        &self.a
    }

    pub fn b(&self) -> &[BigRational] {
        &self.b
    }

    /// Facet count: vertical lines, horizontal lines, and the cut line.
    pub fn m(&self) -> usize {
        self.a.len() + self.b.len() + 1
    }

    pub fn n(&self) -> usize {
        self.m() - 3
    }

    fn vertices(&self) -> Result<Vec<FaceMask>> {
        if self.n() < 1 {
            return Err(Error::Input("degenerate table: n = i + j must be at least 1".into()));
        }
        let one = BigRational::one();
        let (na, nb) = (self.a.len(), self.b.len());
        let m = self.m();
        let a_idx = |p: usize| p; // 0-based bit of vertical p
        let b_idx = |q: usize| na + q;
        let cut = m - 1;
        let full: u32 = ((1u64 << m) - 1) as u32;
        let mut faces = Vec::new();
        let below = |p: usize, q: usize| &self.a[p] + &self.b[q] < one;
        for p in 0..na {
            for q in 0..nb {
                if below(p, q) {
                    let c = (1u32 << a_idx(p)) | (1 << b_idx(q)) | (1 << cut);
                    faces.push(full & !c);
                }
            }
        }
        for p in 0..na {
            for q1 in 0..nb {
                for q2 in q1 + 1..nb {
                    if below(p, q1) && !below(p, q2) {
                        let c = (1u32 << a_idx(p)) | (1 << b_idx(q1)) | (1 << b_idx(q2));
                        faces.push(full & !c);
                    }
                }
            }
        }
        for q in 0..nb {
            for p1 in 0..na {
                for p2 in p1 + 1..na {
                    if below(p1, q) && !below(p2, q) {
                        let c = (1u32 << a_idx(p1)) | (1 << a_idx(p2)) | (1 << b_idx(q));
                        faces.push(full & !c);
                    }
                }
            }
        }
        // irredundancy: every line must appear in some vertex, i.e. miss
        // some complement triple
        let mut in_some_vertex = 0u32;
        for &f in &faces {
            in_some_vertex |= f;
        }
        if in_some_vertex != full {
            let missing = labels_from_mask(full & !in_some_vertex);
            return Err(Error::Input(format!(
                "invalid table: redundant facet (line index {missing:?} supports no vertex)"
            )));
        }
        Ok(faces)
    }

    /// The dual complex of the polytope this table presents.
    pub fn complex(&self) -> Result<SimplicialComplex> {
        SimplicialComplex::from_masks(self.m(), self.vertices()?)
    }
}

/// Dual complex of a table diagram (facet order: vertical lines, then
/// horizontal lines, then the cut line).
pub fn table_vertices(t: &TableDiagram) -> Result<SimplicialComplex> {
    t.complex()
}

/// h-polynomial straight from the table:
/// `h(P) = (1/(t-1)) Σ_{a_p + b_q < 1} (t^{n+1-(p+q)} - t^{p+q})`.
pub fn h_via_table(t: &TableDiagram) -> Result<HPolynomial> {
    let one = BigRational::one();
    let mut nodes = Vec::new();
    for (p, x) in t.a.iter().enumerate() {
        for (q, y) in t.b.iter().enumerate() {
            if x + y < one {
                nodes.push((p, q));
            }
        }
    }
    h_from_below_nodes(t.n(), &nodes)
}

/// The summation underlying [`h_via_table`], usable for degenerate tables
/// such as the single-node simplex position reached by sweeping the cut
/// line.
pub fn h_from_below_nodes(n: usize, nodes: &[(usize, usize)]) -> Result<HPolynomial> {
    let mut num = IntPoly::zero();
    for &(p, q) in nodes {
        num = num.add(&IntPoly::monomial(1, n + 1 - (p + q)));
        num = num.sub(&IntPoly::monomial(1, p + q));
    }
    let quot = num
        .div_exact(&IntPoly::from_coeffs(vec![-1, 1]))
        .ok_or_else(|| Error::Internal("table h numerator not divisible by t - 1".into()))?;
    if quot.degree() != n {
        return Err(Error::Internal("table h has wrong degree".into()));
    }
    Ok(HPolynomial::from_coeffs((0..=n).map(|i| quot.coeff(n - i)).collect()))
}

/// The canonical staircase table of a polygon presentation: vertical line
/// clusters `a_1, …, a_{k-1}, a_k - 1` (left to right), horizontal
/// clusters `a_{2k-1}, …, a_{k+1}` (bottom to top), the cut line
/// crossing cluster `c` of one family between clusters `k - c` and
/// `k - c + 1` of the other.
pub fn table_from_polygon(p: &PolygonPresentation) -> Result<TableDiagram> {
    let k = p.k();
    let v_sizes: Vec<usize> =
        (1..=k).map(|c| if c < k { p.weights()[c - 1] } else { p.weights()[k - 1] - 1 }).collect();
    // bottom-up horizontal clusters: e = 1 is a_{2k-1}, e = k-1 is a_{k+1}
    let h_sizes: Vec<usize> = (1..=k - 1).map(|e| p.weights()[2 * k - e - 1]).collect();
    let max_cluster = v_sizes.iter().chain(h_sizes.iter()).copied().max().unwrap_or(1).max(1);
    let kp1 = BigInt::from(k as u64 + 1);
    let eps = BigRational::new(BigInt::one(), &kp1 * BigInt::from(2 * (max_cluster as u64 + 1)));
    let coord = |cluster: usize, t: usize| -> BigRational {
        BigRational::new(BigInt::from(cluster as u64), kp1.clone())
            + BigRational::from(BigInt::from(t as u64)) * &eps
    };
    let mut a = Vec::new();
    for (c, &size) in v_sizes.iter().enumerate() {
        for t in 1..=size {
            a.push(coord(c + 1, t));
        }
    }
    let mut b = Vec::new();
    for (e, &size) in h_sizes.iter().enumerate() {
        for t in 1..=size {
            b.push(coord(e + 1, t));
        }
    }
    TableDiagram::new(a, b)
}

/// Recover a polygon presentation from a table.
///
/// Lines are classed by the segment of the broken cut line that crosses
/// them: vertical lines by how many horizontals sit above the crossing,
/// horizontal lines symmetrically. Lines entirely above the broken line
/// (crossed outside the node grid) join the class of the cut line itself.
/// Classes are read off circularly: vertical runs left to right, the cut
/// class, then horizontal runs top to bottom.
pub fn polygon_from_table(t: &TableDiagram) -> Result<PolygonPresentation> {
    let one = BigRational::one();
    let (na, nb) = (t.a.len(), t.b.len());
    let s_v: Vec<usize> = t
        .a
        .iter()
        .map(|x| t.b.iter().filter(|y| x + *y > one).count())
        .collect();
    let s_h: Vec<usize> = t
        .b
        .iter()
        .map(|y| t.a.iter().filter(|x| *x + y > one).count())
        .collect();
    // s_v and s_h are nondecreasing; the "full" tail belongs to the cut class
    let mut v_runs: Vec<usize> = Vec::new();
    let mut full_v = 0usize;
    for (p, &s) in s_v.iter().enumerate() {
        if s == nb {
            full_v += 1;
        } else if p > 0 && s_v[p - 1] == s {
            *v_runs.last_mut().unwrap() += 1;
        } else {
            v_runs.push(1);
        }
    }
    let mut h_runs: Vec<usize> = Vec::new();
    let mut full_h = 0usize;
    for (q, &s) in s_h.iter().enumerate() {
        if s == na {
            full_h += 1;
        } else if q > 0 && s_h[q - 1] == s {
            *h_runs.last_mut().unwrap() += 1;
        } else {
            h_runs.push(1);
        }
    }
    let mut weights = v_runs;
    weights.push(full_v + full_h + 1);
    weights.extend(h_runs.iter().rev());
    if weights.len() % 2 == 0 {
        return Err(Error::Input(
            "table does not correspond to an odd polygon presentation".into(),
        ));
    }
    PolygonPresentation::new(weights)
}

/// Family input specifications as accepted on the command line and over
/// JSON: `{"polygon": [...]}`, `{"skeleton": {...}}`, …
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilySpec {
    Polygon(Vec<usize>),
    Skeleton { m: usize, n: usize },
    CyclicDual { n: usize, m: usize },
    Double { base: Box<FamilySpec>, mult: Vec<usize> },
    Table { a: Vec<String>, b: Vec<String> },
    Complex(SimplicialComplex),
}

impl FamilySpec {
    /// Build the dual complex this spec describes.
    pub fn build(&self) -> Result<SimplicialComplex> {
        match self {
            FamilySpec::Polygon(w) => polygon_complex(&PolygonPresentation::new(w.clone())?),
            FamilySpec::Skeleton { m, n } => simplex_skeleton(*m, *n),
            FamilySpec::CyclicDual { n, m } => cyclic_dual(*n, *m),
            FamilySpec::Double { base, mult } => doubling(&base.build()?, mult),
            FamilySpec::Table { .. } => self.table().map(|t| t.complex())?,
            FamilySpec::Complex(k) => Ok(k.clone()),
        }
    }

    /// The polygon presentation, when this spec is one.
    pub fn polygon(&self) -> Option<PolygonPresentation> {
        match self {
            FamilySpec::Polygon(w) => PolygonPresentation::new(w.clone()).ok(),
            _ => None,
        }
    }

    /// The table diagram, when this spec is one.
    pub fn table(&self) -> Result<TableDiagram> {
        match self {
            FamilySpec::Table { a, b } => {
                let parse = |v: &[String]| -> Result<Vec<BigRational>> {
                    v.iter()
                        .map(|s| {
                            BigRational::from_str(s)
                                .map_err(|e| Error::Input(format!("bad rational {s:?}: {e}")))
                        })
                        .collect()
                };
                TableDiagram::new(parse(a)?, parse(b)?)
            }
            _ => Err(Error::Input("not a table spec".into())),
        }
    }
}
