//! Bigraded Betti numbers of the moment-angle complex.
//!
//! `β^{-q, 2p}` is the rank of the degree-`(-q, 2p)` piece of the
//! Koszul-complex cohomology `H[Λ[u_1, …, u_m] ⊗ Q[K], d]`, `d u_i = v_i`.
//! The differential preserves the multidegree `τ = ω ⊔ σ`, so the complex
//! splits over subsets `τ ⊆ [m]`; each piece has basis
//! `{u_ω v_σ : ω ⊔ σ = τ, σ ∈ K}` and is handled by exact integer rank
//! computations. Pieces whose `τ` contains no minimal non-face restrict
//! `K` to a full simplex and are skipped (their cohomology vanishes away
//! from `τ = ∅`).
//!
//! For the odd-gon families the module also carries the closed forms
//! (`β^{-1,2j}` counts windows with `φ = j`, `β^{-2,2j}` windows with
//! `ψ = j`, plus the two corner classes) and the explicit four-stage
//! minimal resolution whose differentials are signed block monomials.

use crate::complex::{FaceMask, SimplicialComplex};
use crate::families::PolygonPresentation;
use crate::linalg::int_rank_sparse;
use crate::poly::IntPoly;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

/// Bigraded table `(q, 2p) → rank`, with optional torsion lists attached
/// by the integral cohomology computation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BettiTable {
    entries: BTreeMap<(i32, u32), BettiEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiEntry {
    pub rank: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub torsion: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct BettiRow {
    q: i32,
    p2: u32,
    rank: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    torsion: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct BettiJson {
    entries: Vec<BettiRow>,
}

impl Serialize for BettiTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BettiJson {
            entries: self
                .entries
                .iter()
                .map(|(&(q, p2), e)| BettiRow { q, p2, rank: e.rank, torsion: e.torsion.clone() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BettiTable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = BettiJson::deserialize(d)?;
        let mut t = BettiTable::default();
        for row in raw.entries {
            t.entries
                .insert((row.q, row.p2), BettiEntry { rank: row.rank, torsion: row.torsion });
        }
        Ok(t)
    }
}

impl BettiTable {
    pub fn add_rank(&mut self, q: i32, p2: u32, rank: u64) {
        if rank == 0 {
            return;
        }
        debug_assert!(q <= 0 && p2 % 2 == 0);
        self.entries.entry((q, p2)).or_insert(BettiEntry { rank: 0, torsion: vec![] }).rank +=
            rank;
    }

    pub fn add_torsion(&mut self, q: i32, p2: u32, factor: u64) {
        self.entries
            .entry((q, p2))
            .or_insert(BettiEntry { rank: 0, torsion: vec![] })
            .torsion
            .push(factor);
    }

    pub fn rank_at(&self, q: i32, p2: u32) -> u64 {
        self.entries.get(&(q, p2)).map_or(0, |e| e.rank)
    }

    /// `Σ_j β^{q, 2j}` for a fixed homological degree.
    pub fn row_sum(&self, q: i32) -> u64 {
        self.entries.iter().filter(|(&(qq, _), _)| qq == q).map(|(_, e)| e.rank).sum()
    }

    pub fn total_rank(&self) -> u64 {
        self.entries.values().map(|e| e.rank).sum()
    }

    pub fn has_torsion(&self) -> bool {
        self.entries.values().any(|e| e.torsion.iter().any(|&f| f > 1))
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, u32, &BettiEntry)> {
        self.entries.iter().map(|(&(q, p2), e)| (q, p2, e))
    }

    /// `Σ_p (Σ_q (-1)^q β^{-q, 2p}) t^{2p}` as an integer polynomial in `t`.
    pub fn euler_series(&self) -> IntPoly {
        let mut acc = IntPoly::zero();
        for (&(q, p2), e) in &self.entries {
            let sign = if q.rem_euclid(2) == 0 { 1 } else { -1 };
            acc = acc.add(&IntPoly::monomial(sign * e.rank as i64, p2 as usize));
        }
        acc
    }

    /// Aligned text grid, rows `q`, columns `2p`.
    pub fn grid(&self) -> String {
        if self.entries.is_empty() {
            return String::from("(empty)\n");
        }
        let qs: Vec<i32> = {
            let mut v: Vec<i32> = self.entries.keys().map(|&(q, _)| q).collect();
            v.sort_unstable();
            v.dedup();
            v.reverse(); // q = 0 first
            v
        };
        let p2s: Vec<u32> = {
            let mut v: Vec<u32> = self.entries.keys().map(|&(_, p)| p).collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        let cell = |q: i32, p2: u32| -> String {
            let e = self.entries.get(&(q, p2));
            match e {
                None => String::from("."),
                Some(e) if e.torsion.iter().any(|&f| f > 1) => {
                    format!("{}+t{:?}", e.rank, e.torsion)
                }
                Some(e) if e.rank == 0 => String::from("."),
                Some(e) => e.rank.to_string(),
            }
        };
        let mut width = 3;
        for &q in &qs {
            for &p in &p2s {
                width = width.max(cell(q, p).len() + 1);
            }
        }
        let mut out = String::new();
        out.push_str(&format!("{:>6} |", "q\\2p"));
        for &p in &p2s {
            out.push_str(&format!("{p:>width$}"));
        }
        out.push('\n');
        out.push_str(&format!("{:->6}-+{}\n", "", "-".repeat(width * p2s.len())));
        for &q in &qs {
            out.push_str(&format!("{q:>6} |"));
            for &p in &p2s {
                out.push_str(&format!("{:>width$}", cell(q, p)));
            }
            out.push('\n');
        }
        out
    }
}

/// Desk-scale cap for the Koszul computation.
pub const KOSZUL_DEFAULT_CAP: usize = 16;

/// Bigraded Betti numbers over `Q` via the multigraded Koszul complex.
pub fn koszul_betti(k: &SimplicialComplex) -> Result<BettiTable> {
    koszul_betti_capped(k, KOSZUL_DEFAULT_CAP, 1)
}

/// As [`koszul_betti`], with an explicit desk-scale cap and thread count.
/// Results are independent of the thread count; multidegrees are simply
/// partitioned between workers and the per-degree ranks added up.
pub fn koszul_betti_capped(
    k: &SimplicialComplex,
    cap: usize,
    threads: usize,
) -> Result<BettiTable> {
    if k.m() > cap {
        return Err(Error::DeskScale(format!(
            "koszul betti: m = {} exceeds the cap {cap} (raise it explicitly to proceed)",
            k.m()
        )));
    }
    Ok(koszul_betti_impl(k, threads.max(1), true))
}

fn koszul_betti_impl(k: &SimplicialComplex, threads: usize, skip_acyclic: bool) -> BettiTable {
    let m = k.m();
    let total: u64 = 1u64 << m;
    let non_faces = k.minimal_non_face_masks();
    let worker = |from: u64, to: u64| -> BettiTable {
        let mut table = BettiTable::default();
        for tau in from..to {
            let tau = tau as FaceMask;
            if tau == 0 {
                table.add_rank(0, 0, 1);
                continue;
            }
            // full-simplex pieces are acyclic
            if skip_acyclic && !non_faces.iter().any(|&w| w & !tau == 0) {
                continue;
            }
            for (q, dim) in koszul_piece_cohomology(k, tau) {
                table.add_rank(-(q as i32), 2 * tau.count_ones(), dim as u64);
            }
        }
        table
    };
    let mut merged = BettiTable::default();
    if threads <= 1 {
        merged = worker(0, total);
    } else {
        let chunk = total.div_ceil(threads as u64);
        let tables = std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for t in 0..threads as u64 {
                let from = (t * chunk).min(total);
                let to = ((t + 1) * chunk).min(total);
                handles.push(scope.spawn(move || worker(from, to)));
            }
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect::<Vec<_>>()
        });
        for t in tables {
            for (q, p2, e) in t.iter() {
                merged.add_rank(q, p2, e.rank);
            }
        }
    }
    merged
}

/// Per-`q` bases of the multidegree-`τ` piece: `bases[q]` lists the
/// σ-masks of the monomials `u_{τ∖σ} v_σ` with `|ω| = q`.
pub(crate) fn piece_bases(k: &SimplicialComplex, tau: FaceMask) -> Vec<Vec<FaceMask>> {
    let p = tau.count_ones() as usize;
    let mut bases: Vec<Vec<FaceMask>> = vec![Vec::new(); p + 1];
    let mut sub = tau;
    loop {
        if k.is_face_mask(sub) {
            let q = p - sub.count_ones() as usize;
            bases[q].push(sub);
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & tau;
    }
    bases
}

/// Sparse rows of `d_q : C_q → C_{q-1}` over the given bases; row `i`
/// lists `(column in C_{q-1}, ±1)` for basis element `i` of `C_q`.
pub(crate) fn piece_differential(
    tau: FaceMask,
    domain: &[FaceMask],
    target_index: &HashMap<FaceMask, usize>,
) -> Vec<Vec<(usize, i64)>> {
    domain
        .iter()
        .map(|&sigma| {
            let omega = tau & !sigma;
            let mut row = Vec::new();
            let mut pos = 0i64;
            let mut rest = omega;
            while rest != 0 {
                let bit = rest & rest.wrapping_neg();
                rest ^= bit;
                pos += 1;
                let enlarged = sigma | bit;
                if let Some(&col) = target_index.get(&enlarged) {
                    let sign = if pos % 2 == 1 { 1 } else { -1 };
                    row.push((col, sign));
                }
            }
            row
        })
        .collect()
}

/// Dimensions of the cohomology of one multidegree piece, by exterior
/// degree `q = |ω|`.
fn koszul_piece_cohomology(k: &SimplicialComplex, tau: FaceMask) -> Vec<(usize, usize)> {
    let p = tau.count_ones() as usize;
    let bases = piece_bases(k, tau);
    let index: Vec<HashMap<FaceMask, usize>> = bases
        .iter()
        .map(|list| list.iter().enumerate().map(|(i, &f)| (f, i)).collect())
        .collect();
    // rank of d_q : C_q -> C_{q-1}
    let mut d_rank = vec![0usize; p + 2];
    for q in 1..=p {
        if bases[q].is_empty() || bases[q - 1].is_empty() {
            continue;
        }
        let rows = piece_differential(tau, &bases[q], &index[q - 1]);
        d_rank[q] = int_rank_sparse(bases[q - 1].len(), &rows);
    }
    (0..=p)
        .filter_map(|q| {
            let dim = bases[q].len();
            if dim == 0 {
                return None;
            }
            let h = dim - d_rank[q] - d_rank[q + 1];
            (h > 0).then_some((q, h))
        })
        .collect()
}

/// Closed-form Betti table of an odd-gon presentation: `β^{0,0} = 1`,
/// `β^{-1,2j}` counts windows with `φ_l = j`, `β^{-2,2j}` windows with
/// `ψ_l = j`, `β^{-3,2(n+3)} = 1`; everything else vanishes. For `k = 2`
/// the table comes instead from the product of three odd spheres: one
/// class per subset of the factors.
pub fn polygon_betti_closed_form(p: &PolygonPresentation) -> BettiTable {
    let mut t = BettiTable::default();
    if p.k() == 2 {
        let a = p.weights();
        for subset in 0u32..8 {
            let q = subset.count_ones() as i32;
            let deg: usize = (0..3).filter(|&i| subset >> i & 1 == 1).map(|i| a[i]).sum();
            t.add_rank(-q, 2 * deg as u32, 1);
        }
        return t;
    }
    t.add_rank(0, 0, 1);
    for l in 1..=p.weights().len() {
        t.add_rank(-1, 2 * p.phi(l) as u32, 1);
        t.add_rank(-2, 2 * p.psi(l) as u32, 1);
    }
    t.add_rank(-3, 2 * p.m() as u32, 1);
    t
}

/// Monomial in the block variables `x_1, …, x_{2k-1}` (cyclic products of
/// a block's vertex variables).
pub type BlockMonomial = Vec<u32>;

/// Sparse polynomial in block variables with integer coefficients.
pub type BlockPoly = BTreeMap<BlockMonomial, i64>;

fn block_poly(terms: Vec<(i64, BlockMonomial)>) -> BlockPoly {
    let mut p = BlockPoly::new();
    for (c, m) in terms {
        *p.entry(m).or_insert(0) += c;
    }
    p.retain(|_, c| *c != 0);
    p
}

fn poly_mul(a: &BlockPoly, b: &BlockPoly) -> BlockPoly {
    let mut out = BlockPoly::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let m: BlockMonomial = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
            *out.entry(m).or_insert(0) += ca * cb;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

fn poly_add_assign(a: &mut BlockPoly, b: &BlockPoly) {
    for (m, c) in b {
        *a.entry(m.clone()).or_insert(0) += c;
    }
    a.retain(|_, c| *c != 0);
}

/// One stage of the minimal resolution: generators with their doubled
/// degrees and block multidegrees, and the differential into the previous
/// stage (entries are block polynomials, in fact single signed monomials).
#[derive(Debug, Clone)]
pub struct ResolutionStage {
    pub generators: Vec<ResolutionGenerator>,
    /// `differential[i][j]` is the coefficient of the previous stage's
    /// generator `j` in `d(generator i)`.
    pub differential: Vec<Vec<BlockPoly>>,
}

#[derive(Debug, Clone)]
pub struct ResolutionGenerator {
    pub name: String,
    /// Doubled internal degree (`2p` of the bidegree).
    pub degree: usize,
    pub block_multidegree: BlockMonomial,
}

/// The explicit minimal resolution of the odd-gon face ring: stages of
/// ranks `1, 2k-1, 2k-1, 1` with
/// `d X_i = 𝒱_i`, `d Y_i = x_{i+k-1} X_i - x_i X_{i+1}`,
/// `d Z = Σ_i (x_{i+k} ⋯ x_{i+2k-2}) Y_i`.
pub fn polygon_minimal_resolution(p: &PolygonPresentation) -> Result<Vec<ResolutionStage>> {
    let k = p.k();
    if k < 3 {
        return Err(Error::Input(
            "the explicit minimal resolution needs k >= 3 (for k = 2 the face ring is a \
             complete intersection of three blocks)"
                .into(),
        ));
    }
    let len = p.weights().len();
    let x = |j: usize| -> BlockMonomial {
        let mut m = vec![0u32; len];
        m[(j - 1) % len] += 1;
        m
    };
    let x_range = |from: usize, count: usize| -> BlockMonomial {
        let mut m = vec![0u32; len];
        for t in 0..count {
            m[(from + t - 1) % len] += 1;
        }
        m
    };
    let weight_of = |m: &BlockMonomial| -> usize {
        m.iter().enumerate().map(|(j, &e)| e as usize * p.weights()[j]).sum()
    };

    let stage0 = ResolutionStage {
        generators: vec![ResolutionGenerator {
            name: "1".into(),
            degree: 0,
            block_multidegree: vec![0; len],
        }],
        differential: vec![],
    };
    // X_i -> 𝒱_i = x_i ... x_{i+k-2}
    let mut gens1 = Vec::new();
    let mut d1 = Vec::new();
    for i in 1..=len {
        let v_i = x_range(i, k - 1);
        gens1.push(ResolutionGenerator {
            name: format!("X{i}"),
            degree: 2 * weight_of(&v_i),
            block_multidegree: v_i.clone(),
        });
        d1.push(vec![block_poly(vec![(1, v_i)])]);
    }
    let stage1 = ResolutionStage { generators: gens1, differential: d1 };
    // Y_i -> x_{i+k-1} X_i - x_i X_{i+1}
    let mut gens2 = Vec::new();
    let mut d2 = Vec::new();
    for i in 1..=len {
        let l_i = x_range(i, k);
        gens2.push(ResolutionGenerator {
            name: format!("Y{i}"),
            degree: 2 * weight_of(&l_i),
            block_multidegree: l_i,
        });
        let mut row = vec![BlockPoly::new(); len];
        row[i - 1] = block_poly(vec![(1, x(i + k - 1))]);
        row[i % len] = block_poly(vec![(-1, x(i))]);
        d2.push(row);
    }
    let stage2 = ResolutionStage { generators: gens2, differential: d2 };
    // Z -> Σ_i (x_{i+k} ... x_{i+2k-2}) Y_i
    let full = x_range(1, len);
    let mut row = Vec::with_capacity(len);
    for i in 1..=len {
        row.push(block_poly(vec![(1, x_range(i + k, k - 1))]));
    }
    let stage3 = ResolutionStage {
        generators: vec![ResolutionGenerator {
            name: "Z".into(),
            degree: 2 * p.m(),
            block_multidegree: full,
        }],
        differential: vec![row],
    };

    let stages = vec![stage0, stage1, stage2, stage3];
    verify_resolution(&stages)?;
    Ok(stages)
}

/// `d ∘ d = 0`, checked symbolically stage by stage.
fn verify_resolution(stages: &[ResolutionStage]) -> Result<()> {
    for w in stages.windows(2).skip(1) {
        let (prev, next) = (&w[0], &w[1]);
        for (i, row) in next.differential.iter().enumerate() {
            let cols = if prev.differential.is_empty() {
                0
            } else {
                prev.differential[0].len()
            };
            for target in 0..cols {
                let mut acc = BlockPoly::new();
                for (j, entry) in row.iter().enumerate() {
                    if entry.is_empty() {
                        continue;
                    }
                    poly_add_assign(&mut acc, &poly_mul(entry, &prev.differential[j][target]));
                }
                if !acc.is_empty() {
                    return Err(Error::Internal(format!(
                        "d∘d != 0 at generator {} of stage with {} generators",
                        next.generators[i].name,
                        next.generators.len()
                    )));
                }
            }
        }
    }
    Ok(())
}

/// The Euler-characteristic identity
/// `Σ_p (Σ_q (-1)^q β^{-q,2p}) t^{2p} = (1-t²)^{m-n} h(t²)`, checked
/// exactly between the Koszul table and the f-derived h-polynomial.
pub fn euler_h_identity_check(k: &SimplicialComplex) -> Result<bool> {
    let betti = koszul_betti(k)?;
    let h = k.h_polynomial()?;
    Ok(euler_matches(k, &betti, &h))
}

pub fn euler_matches(
    k: &SimplicialComplex,
    betti: &BettiTable,
    h: &crate::complex::HPolynomial,
) -> bool {
    let n = k.max_face_size();
    let lhs = betti.euler_series();
    let one_minus_t2 = IntPoly::from_coeffs(vec![1, 0, -1]);
    let h_t2 = IntPoly::from_coeffs(h.coeffs().to_vec()).inflate(2);
    let rhs = one_minus_t2.pow((k.m() - n) as u32).mul(&h_t2);
    lhs == rhs
}
