//! Abstract simplicial complexes on the vertex set `[m] = {1, …, m}`.
//!
//! A complex is stored by its maximal faces only; membership is containment
//! testing. The families handled here have few maximal faces but
//! exponentially many faces, so nothing below the maximal faces is ever
//! materialized except on demand. Faces are bitmasks (`bit i ↔ vertex
//! i+1`), which caps `m` at 32 — far beyond the desk scale of every search
//! in this crate.
//!
//! The empty complex `{∅}` (vertex set of size 0) is allowed as the link
//! of a maximal face; every other constructor requires `m ≥ 1` and rejects
//! ghost vertices: the invariants of the Buchstaber searches quantify over
//! all `m` vertices, and a ghost vertex would silently shift `m`.

use crate::poly::IntPoly;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

/// Vertex subset as a bitmask; bit `i` encodes vertex `i + 1`.
pub type FaceMask = u32;

pub fn mask_from_labels(m: usize, labels: &[usize]) -> Result<FaceMask> {
    let mut mask = 0u32;
    for &v in labels {
        if v == 0 || v > m {
            return Err(Error::Input(format!("vertex {v} out of range 1..={m}")));
        }
        let bit = 1u32 << (v - 1);
        if mask & bit != 0 {
            return Err(Error::Input(format!("repeated vertex {v}")));
        }
        mask |= bit;
    }
    Ok(mask)
}

pub fn labels_from_mask(mask: FaceMask) -> Vec<usize> {
    (0..32).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect()
}

/// Visit all `k`-subsets of `{0, …, n-1}` as masks, in lexicographic order.
pub fn for_each_subset(n: usize, k: usize, f: &mut impl FnMut(FaceMask)) {
    if k > n {
        return;
    }
    if k == 0 {
        f(0);
        return;
    }
    let limit: u64 = 1 << n;
    let mut mask: u64 = (1 << k) - 1;
    while mask < limit {
        f(mask as u32);
        // Gosper's hack
        let c = mask & mask.wrapping_neg();
        let r = mask + c;
        mask = (((r ^ mask) >> 2) / c) | r;
    }
}

/// An abstract simplicial complex given by its maximal faces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    m: usize,
    maximal: Vec<FaceMask>,
}

#[derive(Serialize, Deserialize)]
struct ComplexJson {
    m: usize,
    maximal_faces: Vec<Vec<usize>>,
}

impl Serialize for SimplicialComplex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ComplexJson { m: self.m, maximal_faces: self.maximal_faces() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SimplicialComplex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = ComplexJson::deserialize(d)?;
        SimplicialComplex::new(raw.m, &raw.maximal_faces).map_err(serde::de::Error::custom)
    }
}

impl SimplicialComplex {
    /// Build and validate a complex from 1-based vertex lists.
    pub fn new(m: usize, maximal_faces: &[Vec<usize>]) -> Result<Self> {
        if m > 32 {
            return Err(Error::DeskScale(format!("m = {m} exceeds the bitmask limit of 32")));
        }
        let mut masks = Vec::with_capacity(maximal_faces.len());
        for face in maximal_faces {
            masks.push(mask_from_labels(m, face)?);
        }
        Self::from_masks(m, masks)
    }

    /// Build from bitmasks (labels already validated against `m`).
    pub fn from_masks(m: usize, mut masks: Vec<FaceMask>) -> Result<Self> {
        if m == 0 {
            masks.dedup();
            if masks != vec![0] {
                return Err(Error::Input(
                    "the empty complex must be given as the single empty face".into(),
                ));
            }
            return Ok(SimplicialComplex { m: 0, maximal: vec![0] });
        }
        if masks.is_empty() {
            return Err(Error::Input("a complex needs at least one maximal face".into()));
        }
        masks.sort_unstable();
        masks.dedup();
        for (i, &a) in masks.iter().enumerate() {
            for &b in &masks[i + 1..] {
                if a & b == a || a & b == b {
                    return Err(Error::Input(format!(
                        "maximal face {:?} is contained in {:?}",
                        labels_from_mask(a.min(b)),
                        labels_from_mask(a.max(b)),
                    )));
                }
            }
        }
        let full: u32 = if m == 32 { !0 } else { (1 << m) - 1 };
        let covered = masks.iter().fold(0u32, |acc, &f| acc | f);
        if covered != full {
            let ghost = labels_from_mask(full & !covered);
            return Err(Error::Input(format!("ghost vertices {ghost:?}: not in any maximal face")));
        }
        Ok(SimplicialComplex { m, maximal: masks })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn maximal_masks(&self) -> &[FaceMask] {
        &self.maximal
    }

    pub fn maximal_faces(&self) -> Vec<Vec<usize>> {
        let mut faces: Vec<Vec<usize>> = self.maximal.iter().map(|&f| labels_from_mask(f)).collect();
        faces.sort();
        faces
    }

    pub fn full_mask(&self) -> FaceMask {
        if self.m == 32 {
            !0
        } else {
            ((1u64 << self.m) - 1) as u32
        }
    }

    /// Size of the largest maximal face (`n` for the dual of a simple
    /// `n`-polytope).
    pub fn max_face_size(&self) -> usize {
        self.maximal.iter().map(|f| f.count_ones() as usize).max().unwrap_or(0)
    }

    /// Dimension of the complex (`None` for the empty complex).
    pub fn dim(&self) -> Option<usize> {
        self.max_face_size().checked_sub(1)
    }

    pub fn is_pure(&self) -> bool {
        let n = self.max_face_size();
        self.maximal.iter().all(|f| f.count_ones() as usize == n)
    }

    pub fn is_face_mask(&self, sigma: FaceMask) -> bool {
        self.maximal.iter().any(|&f| sigma & !f == 0)
    }

    /// Is `σ` a face? Errors on out-of-range labels.
    pub fn is_face(&self, sigma: &[usize]) -> Result<bool> {
        Ok(self.is_face_mask(mask_from_labels(self.m, sigma)?))
    }

    /// All faces, including the empty face, as masks.
    pub fn all_faces(&self) -> HashSet<FaceMask> {
        let mut seen: HashSet<FaceMask> = HashSet::new();
        let mut stack: Vec<FaceMask> = self.maximal.clone();
        while let Some(f) = stack.pop() {
            if !seen.insert(f) {
                continue;
            }
            let mut rest = f;
            while rest != 0 {
                let bit = rest & rest.wrapping_neg();
                rest ^= bit;
                let sub = f ^ bit;
                if !seen.contains(&sub) {
                    stack.push(sub);
                }
            }
        }
        seen
    }

    /// Face counts by dimension: `(f_{-1} = 1, f_0, …, f_{n-1})`.
    pub fn f_vector(&self) -> FVector {
        let n = self.max_face_size();
        let mut counts = vec![0i64; n + 1];
        for face in self.all_faces() {
            counts[face.count_ones() as usize] += 1;
        }
        counts[0] = 1; // empty face
        FVector { entries: counts }
    }

    /// The `h`-polynomial via `Σ_i f_{i-1}(t-1)^{n-i} = Σ_i h_i t^{n-i}`.
    pub fn h_polynomial(&self) -> Result<HPolynomial> {
        if !self.is_pure() {
            return Err(Error::Input("h undefined for non-pure complex".into()));
        }
        let n = self.max_face_size();
        let f = self.f_vector();
        Ok(HPolynomial::from_f_vector(&f, n))
    }

    /// All minimal non-faces: `ω ∉ K` with every proper subset in `K`.
    ///
    /// Any non-face of a complex with maximal face size `n` contains a
    /// minimal non-face of at most `n + 1` vertices, so the search grows
    /// size-by-size up to that cap instead of scanning `2^m` subsets.
    pub fn minimal_non_faces(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> =
            self.minimal_non_face_masks().into_iter().map(labels_from_mask).collect();
        out.sort();
        out
    }

    pub fn minimal_non_face_masks(&self) -> Vec<FaceMask> {
        let cap = (self.max_face_size() + 1).min(self.m);
        let mut result = Vec::new();
        for size in 1..=cap {
            for_each_subset(self.m, size, &mut |mask| {
                if self.is_face_mask(mask) {
                    return;
                }
                let mut rest = mask;
                let mut minimal = true;
                while rest != 0 {
                    let bit = rest & rest.wrapping_neg();
                    rest ^= bit;
                    if !self.is_face_mask(mask ^ bit) {
                        minimal = false;
                        break;
                    }
                }
                if minimal {
                    result.push(mask);
                }
            });
        }
        result
    }

    fn one_skeleton(&self) -> Vec<u32> {
        let mut adj = vec![0u32; self.m];
        for i in 0..self.m {
            for j in i + 1..self.m {
                let pair = (1 << i) | (1 << j);
                if self.is_face_mask(pair) {
                    adj[i] |= 1 << j;
                    adj[j] |= 1 << i;
                }
            }
        }
        adj
    }

    /// Exact chromatic number of the 1-skeleton graph.
    ///
    /// Backtracking between a maximum-clique lower bound and a greedy upper
    /// bound; equals the chromatic number of the facets of the dual simple
    /// polytope.
    pub fn one_skeleton_chromatic_number(&self) -> usize {
        self.one_skeleton_coloring().0
    }

    /// Exact chromatic number together with a witness coloring (0-based
    /// color per vertex).
    pub fn one_skeleton_coloring(&self) -> (usize, Vec<usize>) {
        if self.m == 0 {
            return (0, vec![]);
        }
        let adj = self.one_skeleton();
        let clique = max_clique(&adj);
        let (greedy, greedy_colors) = greedy_coloring(&adj);
        for k in clique..greedy {
            if let Some(colors) = try_color(&adj, k) {
                return (k, colors);
            }
        }
        (greedy, greedy_colors)
    }

    /// `(is_flag, least k for which the complex is k-flag)`.
    ///
    /// Flag means every minimal non-face is an edge; `k`-flag means every
    /// minimal non-face has at most `k` vertices.
    pub fn flag_defect(&self) -> (bool, usize) {
        let max = self
            .minimal_non_face_masks()
            .iter()
            .map(|f| f.count_ones() as usize)
            .max()
            .unwrap_or(2);
        let least_k = max.max(2);
        (least_k == 2, least_k)
    }

    /// Link of a face: the complex `{τ : τ ∪ σ ∈ K}` on the vertices of
    /// `st(σ) \ σ`, relabeled to `1..m'`. Returns the label map
    /// (new label `i` ↦ old label `map[i-1]`).
    pub fn link(&self, sigma: &[usize]) -> Result<(SimplicialComplex, Vec<usize>)> {
        let mask = mask_from_labels(self.m, sigma)?;
        if !self.is_face_mask(mask) {
            return Err(Error::Input(format!("{sigma:?} is not a face")));
        }
        let star: Vec<FaceMask> =
            self.maximal.iter().filter(|&&f| mask & !f == 0).map(|&f| f & !mask).collect();
        let vertex_union = star.iter().fold(0u32, |a, &f| a | f);
        let old_labels = labels_from_mask(vertex_union);
        let new_masks: Vec<FaceMask> = star
            .iter()
            .map(|&f| {
                let mut out = 0u32;
                for (new_i, &old) in old_labels.iter().enumerate() {
                    if f >> (old - 1) & 1 == 1 {
                        out |= 1 << new_i;
                    }
                }
                out
            })
            .collect();
        let link = SimplicialComplex::from_masks(old_labels.len(), new_masks)?;
        Ok((link, old_labels))
    }

    /// Join: vertex set `[m_1 + m_2]`, maximal faces are unions.
    pub fn join(&self, other: &SimplicialComplex) -> Result<SimplicialComplex> {
        let m = self.m + other.m;
        if m > 32 {
            return Err(Error::DeskScale(format!("join has m = {m} > 32")));
        }
        let mut masks = Vec::with_capacity(self.maximal.len() * other.maximal.len());
        for &a in &self.maximal {
            for &b in &other.maximal {
                masks.push(a | (b << self.m));
            }
        }
        SimplicialComplex::from_masks(m, masks)
    }

    /// Canonical relabeling invariant: two complexes are isomorphic iff
    /// their canonical forms agree.
    ///
    /// Vertex-orbit refinement followed by individualization backtracking;
    /// adequate for the `m ≤ 12` sizes the round-trip tests use.
    pub fn canonical_form(&self) -> Vec<FaceMask> {
        if self.m == 0 {
            return vec![0];
        }
        let colors = self.refine(initial_colors(self));
        let mut best: Option<Vec<FaceMask>> = None;
        self.canon_search(&colors, &mut best);
        best.unwrap()
    }

    fn relabel_encoding(&self, order: &[usize]) -> Vec<FaceMask> {
        // order[new_index] = old_index
        let mut position = vec![0usize; self.m];
        for (new, &old) in order.iter().enumerate() {
            position[old] = new;
        }
        let mut faces: Vec<FaceMask> = self
            .maximal
            .iter()
            .map(|&f| {
                let mut out = 0u32;
                for old in 0..self.m {
                    if f >> old & 1 == 1 {
                        out |= 1 << position[old];
                    }
                }
                out
            })
            .collect();
        faces.sort_unstable();
        faces
    }

    fn refine(&self, mut colors: Vec<usize>) -> Vec<usize> {
        loop {
            let mut keys: Vec<(usize, Vec<(usize, Vec<usize>)>)> = Vec::with_capacity(self.m);
            for v in 0..self.m {
                let mut sig: Vec<(usize, Vec<usize>)> = self
                    .maximal
                    .iter()
                    .filter(|&&f| f >> v & 1 == 1)
                    .map(|&f| {
                        let mut cs: Vec<usize> = (0..self.m)
                            .filter(|&u| u != v && f >> u & 1 == 1)
                            .map(|u| colors[u])
                            .collect();
                        cs.sort_unstable();
                        (f.count_ones() as usize, cs)
                    })
                    .collect();
                sig.sort();
                keys.push((colors[v], sig));
            }
            let mut sorted: Vec<&(usize, Vec<(usize, Vec<usize>)>)> = keys.iter().collect();
            sorted.sort();
            sorted.dedup();
            let new_colors: Vec<usize> =
                keys.iter().map(|k| sorted.binary_search(&k).expect("key present")).collect();
            if new_colors == colors {
                return colors;
            }
            colors = new_colors;
        }
    }

    fn canon_search(&self, colors: &[usize], best: &mut Option<Vec<FaceMask>>) {
        let mut target: Option<usize> = None;
        for c in 0..self.m {
            let size = colors.iter().filter(|&&x| x == c).count();
            if size > 1 {
                target = Some(c);
                break;
            }
        }
        match target {
            None => {
                // discrete coloring: colors form a permutation
                let mut order: Vec<usize> = (0..self.m).collect();
                order.sort_by_key(|&v| colors[v]);
                let enc = self.relabel_encoding(&order);
                if best.as_ref().map(|b| enc < *b).unwrap_or(true) {
                    *best = Some(enc);
                }
            }
            Some(c) => {
                let members: Vec<usize> = (0..self.m).filter(|&v| colors[v] == c).collect();
                for &v in &members {
                    let mut next = colors.to_vec();
                    // individualize v below its class
                    for u in 0..self.m {
                        if next[u] >= c && u != v {
                            next[u] += 1;
                        }
                    }
                    let refined = self.refine(next);
                    self.canon_search(&refined, best);
                }
            }
        }
    }

    pub fn is_isomorphic(&self, other: &SimplicialComplex) -> bool {
        if self.m != other.m || self.maximal.len() != other.maximal.len() {
            return false;
        }
        let mut sa: Vec<u32> = self.maximal.iter().map(|f| f.count_ones()).collect();
        let mut sb: Vec<u32> = other.maximal.iter().map(|f| f.count_ones()).collect();
        sa.sort_unstable();
        sb.sort_unstable();
        if sa != sb {
            return false;
        }
        self.canonical_form() == other.canonical_form()
    }

    /// Relabel through a bijection (old vertex `i` becomes `map[i-1]`) —
    /// used by explicit isomorphisms such as the cyclic-dual ↔ odd-gon
    /// correspondence.
    pub fn relabeled(&self, map: &[usize]) -> Result<SimplicialComplex> {
        if map.len() != self.m {
            return Err(Error::Input("relabeling map has wrong length".into()));
        }
        let mut seen = vec![false; self.m];
        for &t in map {
            if t == 0 || t > self.m || seen[t - 1] {
                return Err(Error::Input("relabeling map is not a bijection".into()));
            }
            seen[t - 1] = true;
        }
        let masks = self
            .maximal
            .iter()
            .map(|&f| {
                let mut out = 0u32;
                for old in 0..self.m {
                    if f >> old & 1 == 1 {
                        out |= 1 << (map[old] - 1);
                    }
                }
                out
            })
            .collect();
        SimplicialComplex::from_masks(self.m, masks)
    }
}

fn initial_colors(k: &SimplicialComplex) -> Vec<usize> {
    let mut keys: Vec<Vec<usize>> = Vec::with_capacity(k.m);
    for v in 0..k.m {
        let mut sizes: Vec<usize> = k
            .maximal
            .iter()
            .filter(|&&f| f >> v & 1 == 1)
            .map(|f| f.count_ones() as usize)
            .collect();
        sizes.sort_unstable();
        keys.push(sizes);
    }
    let mut sorted: Vec<&Vec<usize>> = keys.iter().collect();
    sorted.sort();
    sorted.dedup();
    keys.iter().map(|key| sorted.binary_search(&key).expect("present")).collect()
}

fn max_clique(adj: &[u32]) -> usize {
    fn extend(adj: &[u32], candidates: u32, size: usize, best: &mut usize) {
        if candidates == 0 {
            *best = (*best).max(size);
            return;
        }
        let mut cand = candidates;
        while cand != 0 {
            if size + cand.count_ones() as usize <= *best {
                return;
            }
            let bit = cand & cand.wrapping_neg();
            cand ^= bit;
            let v = bit.trailing_zeros() as usize;
            extend(adj, cand & adj[v], size + 1, best);
        }
    }
    let n = adj.len();
    let mut best = 0usize;
    let all = if n == 32 { !0u32 } else { (1 << n) - 1 };
    extend(adj, all, 0, &mut best);
    best
}

fn greedy_coloring(adj: &[u32]) -> (usize, Vec<usize>) {
    let n = adj.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(adj[v].count_ones()));
    let mut color = vec![usize::MAX; n];
    let mut used = 0;
    for &v in &order {
        let mut taken = 0u64;
        for u in 0..n {
            if adj[v] >> u & 1 == 1 && color[u] != usize::MAX {
                taken |= 1 << color[u];
            }
        }
        let c = (0..).find(|&c| taken >> c & 1 == 0).unwrap();
        color[v] = c;
        used = used.max(c + 1);
    }
    (used, color)
}

fn try_color(adj: &[u32], k: usize) -> Option<Vec<usize>> {
    fn go(adj: &[u32], order: &[usize], color: &mut [usize], pos: usize, k: usize, used: usize) -> bool {
        if pos == order.len() {
            return true;
        }
        let v = order[pos];
        for c in 0..k.min(used + 1) {
            if (0..adj.len()).any(|u| adj[v] >> u & 1 == 1 && color[u] == c) {
                continue;
            }
            color[v] = c;
            if go(adj, order, color, pos + 1, k, used.max(c + 1)) {
                return true;
            }
            color[v] = usize::MAX;
        }
        false
    }
    let n = adj.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(adj[v].count_ones()));
    let mut color = vec![usize::MAX; n];
    go(adj, &order, &mut color, 0, k, 0).then_some(color)
}

/// Face counts `(f_{-1} = 1, f_0, …, f_{n-1})`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FVector {
    entries: Vec<i64>,
}

impl FVector {
    /// All entries starting with `f_{-1} = 1`.
    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    /// `f_i` for `i ≥ -1` (`None` out of range).
    pub fn f(&self, i: isize) -> Option<i64> {
        usize::try_from(i + 1).ok().and_then(|idx| self.entries.get(idx)).copied()
    }
}

impl std::fmt::Display for FVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// Coefficients `(h_0, …, h_n)` of the `h`-polynomial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HPolynomial {
    coeffs: Vec<i64>,
}

impl HPolynomial {
    pub fn from_coeffs(coeffs: Vec<i64>) -> Self {
        assert!(!coeffs.is_empty());
        HPolynomial { coeffs }
    }

    pub fn from_f_vector(f: &FVector, n: usize) -> Self {
        let t_minus_1 = IntPoly::from_coeffs(vec![-1, 1]);
        let mut sum = IntPoly::zero();
        for (i, &fi) in f.entries().iter().enumerate() {
            // entry i is f_{i-1}; contributes f_{i-1} (t-1)^{n-i}
            sum = sum.add(&IntPoly::constant(fi).mul(&t_minus_1.pow((n - i) as u32)));
        }
        let coeffs = (0..=n).map(|i| sum.coeff(n - i)).collect();
        HPolynomial { coeffs }
    }

    /// Inverse transform back to face counts.
    pub fn to_f_vector(&self) -> FVector {
        let n = self.coeffs.len() - 1;
        let t_plus_1 = IntPoly::from_coeffs(vec![1, 1]);
        // Σ_i f_{i-1} t^{n-i} = Σ_j h_j (t+1)^{n-j}
        let mut sum = IntPoly::zero();
        for (j, &hj) in self.coeffs.iter().enumerate() {
            sum = sum.add(&IntPoly::constant(hj).mul(&t_plus_1.pow((n - j) as u32)));
        }
        let entries = (0..=n).map(|i| sum.coeff(n - i)).collect();
        FVector { entries }
    }

    /// `(h_0, …, h_n)`.
    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// As a polynomial in `t`: `h_0 t^n + … + h_n`.
    pub fn as_poly(&self) -> IntPoly {
        let n = self.degree();
        IntPoly::from_coeffs((0..=n).map(|d| self.coeffs[n - d]).collect())
    }

    pub fn is_palindromic(&self) -> bool {
        let n = self.coeffs.len();
        (0..n).all(|i| self.coeffs[i] == self.coeffs[n - 1 - i])
    }
}

impl std::fmt::Display for HPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}
