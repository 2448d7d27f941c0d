//! The bigraded cohomology ring of the moment-angle complex for odd-gon
//! families, computed in
//! `R*(P) = Λ[u_1, …, u_m] ⊗ Z[K] / (v_i² = u_i v_i = 0)`.
//!
//! Cochains are integer combinations of square-free monomials
//! `u_ω v_σ` (`ω ∩ σ = ∅`, `σ ∈ K`); the differential sends `u_i ↦ v_i`.
//! Products vanish whenever an index collides across the factors, and the
//! sign is the exterior sign of interleaving the `u`-parts (`v` has even
//! degree). Multidegree pieces are finite integer cochain complexes, so
//! reduction modulo coboundaries, class equality, and additive torsion are
//! all decided by Smith normal form.
//!
//! The ring for `P_{a_1, …, a_{2k-1}}` is free abelian of rank `4k` with
//! generators `1, X_i, Y_j, Z`; products follow the delta pattern
//! `X_i · Y_{i+k-1} = ±Z` (for `k = 2` additionally `X_i X_{i+1} = ±Y_i`),
//! which [`product_table`] verifies representative by representative.

use crate::betti::{piece_bases, piece_differential, BettiTable};
use crate::complex::{labels_from_mask, mask_from_labels, FaceMask, SimplicialComplex};
use crate::families::{polygon_complex, PolygonPresentation};
use crate::linalg::{smith_normal_form, smith_with_transforms, IntMatrix};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

/// Integer cochain in `R*(K)`: a map from monomials `u_ω v_σ` to
/// coefficients. Zero coefficients are pruned; every `σ` must be a face
/// and disjoint from its `ω`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct KoszulElement {
    terms: BTreeMap<(FaceMask, FaceMask), i64>,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    omega: Vec<usize>,
    sigma: Vec<usize>,
    coeff: i64,
}

impl Serialize for KoszulElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<TermJson> = self
            .terms
            .iter()
            .map(|(&(o, g), &c)| TermJson {
                omega: labels_from_mask(o),
                sigma: labels_from_mask(g),
                coeff: c,
            })
            .collect();
        terms.serialize(s)
    }
}

impl KoszulElement {
    pub fn zero() -> Self {
        KoszulElement::default()
    }

    /// Single monomial `c · u_ω v_σ`, validated against the complex.
    pub fn monomial(
        k: &SimplicialComplex,
        omega: &[usize],
        sigma: &[usize],
        coeff: i64,
    ) -> Result<Self> {
        let o = mask_from_labels(k.m(), omega)?;
        let g = mask_from_labels(k.m(), sigma)?;
        if o & g != 0 {
            return Err(Error::Input("u- and v-supports must be disjoint".into()));
        }
        if !k.is_face_mask(g) {
            return Err(Error::Input(format!("{sigma:?} is not a face")));
        }
        let mut e = KoszulElement::zero();
        if coeff != 0 {
            e.terms.insert((o, g), coeff);
        }
        Ok(e)
    }

    pub(crate) fn from_mask_term(omega: FaceMask, sigma: FaceMask, coeff: i64) -> Self {
        let mut e = KoszulElement::zero();
        if coeff != 0 {
            e.terms.insert((omega, sigma), coeff);
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Vec<usize>, Vec<usize>, i64)> + '_ {
        self.terms.iter().map(|(&(o, g), &c)| (labels_from_mask(o), labels_from_mask(g), c))
    }

    pub fn add(&self, other: &KoszulElement) -> KoszulElement {
        let mut out = self.clone();
        for (&key, &c) in &other.terms {
            let e = out.terms.entry(key).or_insert(0);
            *e += c;
            if *e == 0 {
                out.terms.remove(&key);
            }
        }
        out
    }

    pub fn scale(&self, c: i64) -> KoszulElement {
        if c == 0 {
            return KoszulElement::zero();
        }
        KoszulElement { terms: self.terms.iter().map(|(&k, &v)| (k, v * c)).collect() }
    }

    pub fn sub(&self, other: &KoszulElement) -> KoszulElement {
        self.add(&other.scale(-1))
    }

    /// The common multidegree `(τ, q)` of all terms, when homogeneous.
    pub fn multidegree(&self) -> Option<(FaceMask, usize)> {
        let mut it = self.terms.keys();
        let &(o, g) = it.next()?;
        let tau = o | g;
        let q = o.count_ones() as usize;
        for &(o2, g2) in it {
            if o2 | g2 != tau || o2.count_ones() as usize != q {
                return None;
            }
        }
        Some((tau, q))
    }

    /// Bidegree `(-q, 2p)` of a homogeneous element.
    pub fn bidegree(&self) -> Option<(i32, u32)> {
        self.multidegree().map(|(tau, q)| (-(q as i32), 2 * tau.count_ones()))
    }

    /// Koszul differential: `u_i ↦ v_i` extended as a derivation; terms
    /// whose grown `σ` leaves the complex die in `R*`.
    pub fn d(&self, k: &SimplicialComplex) -> KoszulElement {
        let mut out = KoszulElement::zero();
        for (&(omega, sigma), &c) in &self.terms {
            let mut pos = 0i64;
            let mut rest = omega;
            while rest != 0 {
                let bit = rest & rest.wrapping_neg();
                rest ^= bit;
                pos += 1;
                let grown = sigma | bit;
                if !k.is_face_mask(grown) {
                    continue;
                }
                let sign = if pos % 2 == 1 { 1 } else { -1 };
                let key = (omega ^ bit, grown);
                let e = out.terms.entry(key).or_insert(0);
                *e += sign * c;
                if *e == 0 {
                    out.terms.remove(&key);
                }
            }
        }
        out
    }
}

/// Product in `R*`: zero on any index collision (`u_i u_i`, `v_i v_i`,
/// `u_i v_i`), zero when the merged `σ` is a non-face, otherwise the
/// merged monomial with the sign of interleaving the `u`-parts.
pub fn koszul_product(
    k: &SimplicialComplex,
    x: &KoszulElement,
    y: &KoszulElement,
) -> KoszulElement {
    let mut out = KoszulElement::zero();
    for (&(o1, g1), &c1) in &x.terms {
        let t1 = o1 | g1;
        for (&(o2, g2), &c2) in &y.terms {
            if t1 & (o2 | g2) != 0 {
                continue;
            }
            let sigma = g1 | g2;
            if !k.is_face_mask(sigma) {
                continue;
            }
            // inversions between the sorted u-supports
            let mut inversions = 0u32;
            let mut rest = o2;
            while rest != 0 {
                let bit = rest & rest.wrapping_neg();
                rest ^= bit;
                // u-indices of o1 greater than this one
                inversions += (o1 & !(bit | (bit - 1))).count_ones();
            }
            let sign = if inversions % 2 == 0 { 1 } else { -1 };
            let key = (o1 | o2, sigma);
            let e = out.terms.entry(key).or_insert(0);
            *e += sign * c1 * c2;
            if *e == 0 {
                out.terms.remove(&key);
            }
        }
    }
    out
}

/// A cohomology class expressed in the invariant-factor basis of its
/// multidegree: `coords[i]` modulo `moduli[i]` (`0` marks a free
/// coordinate; torsion coordinates are normalized into `[0, d)`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedClass {
    pub coords: Vec<BigInt>,
    pub moduli: Vec<BigInt>,
}

impl ReducedClass {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn negated(&self) -> ReducedClass {
        let coords = self
            .coords
            .iter()
            .zip(&self.moduli)
            .map(|(c, m)| {
                if m.is_zero() {
                    -c
                } else {
                    (-c).mod_floor_big(m)
                }
            })
            .collect();
        ReducedClass { coords, moduli: self.moduli.clone() }
    }

    pub fn equals_up_to_sign(&self, other: &ReducedClass) -> bool {
        self == other || *self == other.negated()
    }
}

trait ModFloorBig {
    fn mod_floor_big(&self, m: &BigInt) -> BigInt;
}

impl ModFloorBig for BigInt {
    fn mod_floor_big(&self, m: &BigInt) -> BigInt {
        let r = self % m;
        if r.is_negative() {
            r + m.abs()
        } else {
            r
        }
    }
}

/// Reduction machinery for one multidegree piece `(τ, q)`: computes the
/// integral cohomology presentation `ker d_q / im d_{q+1}` once, then maps
/// cocycles to their classes.
pub struct MultidegreeReducer {
    tau: FaceMask,
    q: usize,
    basis_index: HashMap<FaceMask, usize>,
    rank_dq: usize,
    v_inv: IntMatrix,
    u_prime: IntMatrix,
    moduli: Vec<BigInt>,
    free_rank: usize,
    torsion: Vec<BigInt>,
}

impl MultidegreeReducer {
    pub fn new(k: &SimplicialComplex, tau: FaceMask, q: usize) -> Result<Self> {
        let p = tau.count_ones() as usize;
        if q > p {
            return Err(Error::Input("exterior degree exceeds multidegree size".into()));
        }
        let bases = piece_bases(k, tau);
        let index: Vec<HashMap<FaceMask, usize>> = bases
            .iter()
            .map(|list| list.iter().enumerate().map(|(i, &f)| (f, i)).collect())
            .collect();
        let dim_q = bases[q].len();
        // d_q as a (C_{q-1} × C_q) integer matrix
        let d_q = if q == 0 {
            IntMatrix::zero(0, dim_q)
        } else {
            sparse_to_matrix(
                bases[q - 1].len(),
                &piece_differential(tau, &bases[q], &index[q - 1]),
            )
        };
        let snf_dq = smith_with_transforms(&d_q);
        let rank_dq = snf_dq.rank();
        // kernel coordinates: y = V^{-1} x, entries beyond rank_dq
        let v_inv = snf_dq.v_inv;
        // coboundaries: d_{q+1} columns expressed in kernel coordinates
        let dim_q1 = bases.get(q + 1).map_or(0, Vec::len);
        let mut w = IntMatrix::zero(dim_q - rank_dq, dim_q1);
        if dim_q1 > 0 {
            let d_q1 =
                sparse_to_matrix(dim_q, &piece_differential(tau, &bases[q + 1], &index[q]));
            let in_kernel_coords = v_inv.mul(&d_q1);
            for row in 0..dim_q - rank_dq {
                for col in 0..dim_q1 {
                    w[(row, col)] = in_kernel_coords[(rank_dq + row, col)].clone();
                }
            }
        }
        let snf_w = smith_with_transforms(&w);
        let rank_w = snf_w.rank();
        let mut moduli: Vec<BigInt> = snf_w.diagonal.clone();
        moduli.resize(dim_q - rank_dq, BigInt::zero());
        let torsion: Vec<BigInt> =
            moduli.iter().filter(|d| !d.is_zero() && !d.is_one()).cloned().collect();
        Ok(MultidegreeReducer {
            tau,
            q,
            basis_index: index[q].clone(),
            rank_dq,
            v_inv,
            u_prime: snf_w.u,
            moduli,
            free_rank: dim_q - rank_dq - rank_w,
            torsion,
        })
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    /// Class of a cocycle in the invariant-factor basis.
    pub fn reduce(&self, k: &SimplicialComplex, x: &KoszulElement) -> Result<ReducedClass> {
        if !x.d(k).is_zero() {
            return Err(Error::Input("element is not a cocycle (dx != 0)".into()));
        }
        let dim_q = self.basis_index.len();
        let mut vec = vec![BigInt::zero(); dim_q];
        if !x.is_zero() {
            let (tau, q) = x
                .multidegree()
                .ok_or_else(|| Error::Input("element is not multigraded-homogeneous".into()))?;
            if tau != self.tau || q != self.q {
                return Err(Error::Input("element lives in a different multidegree".into()));
            }
            for (&(_, sigma), &c) in &x.terms {
                let idx = *self
                    .basis_index
                    .get(&sigma)
                    .ok_or_else(|| Error::Internal("basis lookup failed".into()))?;
                vec[idx] = BigInt::from(c);
            }
        }
        let y = self.v_inv.mul_vec(&vec);
        if y[..self.rank_dq].iter().any(|c| !c.is_zero()) {
            return Err(Error::Internal("cocycle has nonzero image coordinates".into()));
        }
        let kernel_coords: Vec<BigInt> = y[self.rank_dq..].to_vec();
        let e = self.u_prime.mul_vec(&kernel_coords);
        let coords: Vec<BigInt> = e
            .iter()
            .zip(&self.moduli)
            .map(|(c, m)| if m.is_zero() { c.clone() } else { c.mod_floor_big(m) })
            .collect();
        Ok(ReducedClass { coords, moduli: self.moduli.clone() })
    }
}

fn sparse_to_matrix(target_dim: usize, rows: &[Vec<(usize, i64)>]) -> IntMatrix {
    // rows index the domain; the matrix maps domain -> target as columns
    let mut m = IntMatrix::zero(target_dim, rows.len());
    for (j, row) in rows.iter().enumerate() {
        for &(i, c) in row {
            m[(i, j)] = BigInt::from(c);
        }
    }
    m
}

/// Express the class of a cocycle in a basis of its multidegree's
/// cohomology (free coordinates plus normalized torsion coordinates).
pub fn reduce_mod_coboundaries(
    k: &SimplicialComplex,
    x: &KoszulElement,
) -> Result<ReducedClass> {
    let (tau, q) = x
        .multidegree()
        .ok_or_else(|| Error::Input("element is zero or not multigraded-homogeneous".into()))?;
    MultidegreeReducer::new(k, tau, q)?.reduce(k, x)
}

/// Integral Betti table with torsion: free ranks as over `Q`, plus the
/// invariant factors `> 1` of each differential (torsion of `ker/im` —
/// the kernel is a saturated sublattice, so the factors of `d_{q+1}` are
/// exactly the torsion coefficients of the quotient).
pub fn integral_betti(k: &SimplicialComplex, cap: usize) -> Result<BettiTable> {
    if k.m() > cap {
        return Err(Error::DeskScale(format!(
            "integral betti: m = {} exceeds the cap {cap}",
            k.m()
        )));
    }
    let non_faces = k.minimal_non_face_masks();
    let mut table = BettiTable::default();
    table.add_rank(0, 0, 1);
    for tau in 1u64..1 << k.m() {
        let tau = tau as FaceMask;
        if !non_faces.iter().any(|&w| w & !tau == 0) {
            continue;
        }
        let p = tau.count_ones() as usize;
        let bases = piece_bases(k, tau);
        let index: Vec<HashMap<FaceMask, usize>> = bases
            .iter()
            .map(|list| list.iter().enumerate().map(|(i, &f)| (f, i)).collect())
            .collect();
        let mut diag: Vec<Vec<BigInt>> = vec![Vec::new(); p + 2];
        for q in 1..=p {
            if bases[q].is_empty() || bases[q - 1].is_empty() {
                continue;
            }
            let d = sparse_to_matrix(
                bases[q - 1].len(),
                &piece_differential(tau, &bases[q], &index[q - 1]),
            );
            diag[q] = smith_normal_form(&d);
        }
        let rank_of = |d: &Vec<BigInt>| d.iter().filter(|x| !x.is_zero()).count();
        for q in 0..=p {
            let dim = bases[q].len();
            if dim == 0 {
                continue;
            }
            let free = dim - rank_of(&diag[q]) - rank_of(&diag[q + 1]);
            table.add_rank(-(q as i32), 2 * p as u32, free as u64);
            for f in diag[q + 1].iter().filter(|f| !f.is_zero() && !f.is_one()) {
                let factor = u64::try_from(f)
                    .map_err(|_| Error::Internal("torsion factor exceeds u64".into()))?;
                table.add_torsion(-(q as i32), 2 * p as u32, factor);
            }
        }
    }
    Ok(table)
}

/// A named generator with its bidegree and cocycle representative.
#[derive(Debug, Clone, Serialize)]
pub struct RingGenerator {
    pub name: String,
    pub bidegree: (i32, u32),
    pub representative: KoszulElement,
}

/// Product table entry: `left · right = Σ coeff · generator`.
#[derive(Debug, Clone, Serialize)]
pub struct ProductEntry {
    pub left: String,
    pub right: String,
    pub result: Vec<(i64, String)>,
}

/// Generators and products of the bigraded cohomology ring.
#[derive(Debug, Clone, Serialize, Default)]
pub struct RingPresentation {
    pub generators: Vec<RingGenerator>,
    pub products: Vec<ProductEntry>,
}

impl RingPresentation {
    pub fn generator(&self, name: &str) -> Option<&RingGenerator> {
        self.generators.iter().find(|g| g.name == name)
    }

    pub fn product(&self, left: &str, right: &str) -> Option<&[(i64, String)]> {
        self.products
            .iter()
            .find(|e| e.left == left && e.right == right)
            .map(|e| e.result.as_slice())
    }

    /// Multiset of generator bidegrees — the isomorphism invariant of
    /// these rings.
    pub fn bidegree_multiset(&self) -> Vec<(i32, u32)> {
        let mut v: Vec<(i32, u32)> = self.generators.iter().map(|g| g.bidegree).collect();
        v.sort_unstable();
        v
    }
}

/// Segment of `φ_i` labels starting the block run of `X_i` (cyclic mod m).
fn segment_labels(p: &PolygonPresentation, start_eta: usize, len: usize) -> Vec<usize> {
    let m = p.m();
    (1..=len).map(|t| (start_eta + t - 1) % m + 1).collect()
}

/// The cocycle representatives
/// `X_i = v_{η_{i-1}+1} ⋯ v_{η_{i-1}+φ_i-1} u_{η_{i-1}+φ_i}`,
/// `Y_i = u_{η_{i-1}+1} v ⋯ v u_{η_{i-1}+ψ_i}`, and `Z = u_ω v_σ` for the
/// lexicographically least maximal face `σ`. Each is verified to be a
/// nonzero class.
pub fn generator_representatives(p: &PolygonPresentation) -> Result<RingPresentation> {
    let k = polygon_complex(p)?;
    let len = p.weights().len();
    let mut generators = Vec::new();
    generators.push(RingGenerator {
        name: "1".into(),
        bidegree: (0, 0),
        representative: KoszulElement::from_mask_term(0, 0, 1),
    });
    for i in 1..=len {
        let seg = segment_labels(p, p.eta(i - 1), p.phi(i));
        let (u_part, v_part) = seg.split_last().expect("nonempty segment");
        let x = KoszulElement::monomial(&k, &[*u_part], v_part, 1)?;
        ensure_cocycle_nonzero(&k, &x, &format!("X{i}"))?;
        generators.push(RingGenerator {
            name: format!("X{i}"),
            bidegree: (-1, 2 * p.phi(i) as u32),
            representative: x,
        });
    }
    for i in 1..=len {
        let seg = segment_labels(p, p.eta(i - 1), p.psi(i));
        let first = seg[0];
        let last = *seg.last().unwrap();
        let interior = &seg[1..seg.len() - 1];
        let y = KoszulElement::monomial(&k, &[first, last], interior, 1)?;
        ensure_cocycle_nonzero(&k, &y, &format!("Y{i}"))?;
        generators.push(RingGenerator {
            name: format!("Y{i}"),
            bidegree: (-2, 2 * p.psi(i) as u32),
            representative: y,
        });
    }
    let sigma = k.maximal_faces().into_iter().next().expect("at least one maximal face");
    let omega: Vec<usize> = (1..=k.m()).filter(|v| !sigma.contains(v)).collect();
    let z = KoszulElement::monomial(&k, &omega, &sigma, 1)?;
    ensure_cocycle_nonzero(&k, &z, "Z")?;
    generators.push(RingGenerator {
        name: "Z".into(),
        bidegree: (-3, 2 * k.m() as u32),
        representative: z,
    });
    Ok(RingPresentation { generators, products: vec![] })
}

fn ensure_cocycle_nonzero(
    k: &SimplicialComplex,
    x: &KoszulElement,
    name: &str,
) -> Result<()> {
    if !x.d(k).is_zero() {
        return Err(Error::Internal(format!("{name} is not a cocycle")));
    }
    let class = reduce_mod_coboundaries(k, x)?;
    if class.is_zero() {
        return Err(Error::Internal(format!("{name} is a coboundary")));
    }
    Ok(())
}

/// Compute all pairwise products of the `X` and `Y` generators, reduce
/// them modulo coboundaries, and match the result against the ring's
/// delta pattern (`X_i Y_{i+k-1} = ±Z`, for `k = 2` also
/// `X_i X_{i+1} = ±Y_i` and `X_1 X_2 X_3 = ±Z`). The additive structure
/// `Z ⊕ Z^{2k-1} ⊕ Z^{2k-1} ⊕ Z` is confirmed by the integral Betti
/// table (rank and absence of torsion).
pub fn product_table(p: &PolygonPresentation) -> Result<RingPresentation> {
    let complex = polygon_complex(p)?;
    let kk = p.k();
    let len = p.weights().len();
    let mut ring = generator_representatives(p)?;
    let mut reducers: BTreeMap<(FaceMask, usize), MultidegreeReducer> = BTreeMap::new();
    let mut reduce = |x: &KoszulElement| -> Result<Option<ReducedClass>> {
        match x.multidegree() {
            None => Ok(None), // literally zero
            Some((tau, q)) => {
                if let std::collections::btree_map::Entry::Vacant(e) = reducers.entry((tau, q)) {
                    e.insert(MultidegreeReducer::new(&complex, tau, q)?);
                }
                reducers[&(tau, q)].reduce(&complex, x).map(Some)
            }
        }
    };
    let reps: BTreeMap<String, KoszulElement> = ring
        .generators
        .iter()
        .map(|g| (g.name.clone(), g.representative.clone()))
        .collect();
    let mut products: Vec<ProductEntry> = Vec::new();

    // X_i · X_j
    for i in 1..=len {
        for j in 1..=len {
            let name_i = format!("X{i}");
            let name_j = format!("X{j}");
            let prod =
                koszul_product(&complex, &reps[&name_i], &reps[&name_j]);
            let mut result: Vec<(i64, String)> = Vec::new();
            if kk == 2 && i != j {
                // X_i X_{i+1} = ±Y_i (cyclically)
                let y_index = if (i % 3) + 1 == j { i } else { j };
                let y_name = format!("Y{y_index}");
                let target = reduce(&reps[&y_name])?.expect("Y class");
                let got = reduce(&prod)?.ok_or_else(|| {
                    Error::Internal(format!("{name_i}·{name_j} vanished identically"))
                })?;
                let sign = match_up_to_sign(&got, &target).ok_or_else(|| {
                    product_mismatch(&name_i, &name_j, &prod)
                })?;
                result.push((sign, y_name));
            } else if !prod.is_zero() {
                let got = reduce(&prod)?.expect("homogeneous product");
                if !got.is_zero() {
                    return Err(product_mismatch(&name_i, &name_j, &prod));
                }
            }
            products.push(ProductEntry { left: name_i, right: name_j, result });
        }
    }
    // Y_i · Y_j = 0
    for i in 1..=len {
        for j in 1..=len {
            let name_i = format!("Y{i}");
            let name_j = format!("Y{j}");
            let prod = koszul_product(&complex, &reps[&name_i], &reps[&name_j]);
            if !prod.is_zero() {
                let got = reduce(&prod)?.expect("homogeneous product");
                if !got.is_zero() {
                    return Err(product_mismatch(&name_i, &name_j, &prod));
                }
            }
            products.push(ProductEntry { left: name_i, right: name_j, result: vec![] });
        }
    }
    // X_i · Y_j = δ_{i+k-1, j} (±Z)
    let z_class = reduce(&reps["Z"])?.expect("Z class");
    for i in 1..=len {
        for j in 1..=len {
            let name_i = format!("X{i}");
            let name_j = format!("Y{j}");
            let prod = koszul_product(&complex, &reps[&name_i], &reps[&name_j]);
            let delta = (i + kk - 2) % len + 1 == j; // j = i + k - 1 cyclically
            let mut result = Vec::new();
            if delta {
                let got = reduce(&prod)?.ok_or_else(|| {
                    Error::Internal(format!("{name_i}·{name_j} vanished identically"))
                })?;
                let sign = match_up_to_sign(&got, &z_class)
                    .ok_or_else(|| product_mismatch(&name_i, &name_j, &prod))?;
                result.push((sign, "Z".to_string()));
            } else if !prod.is_zero() {
                let got = reduce(&prod)?.expect("homogeneous product");
                if !got.is_zero() {
                    return Err(product_mismatch(&name_i, &name_j, &prod));
                }
            }
            products.push(ProductEntry { left: name_i, right: name_j, result });
        }
    }
    // k = 2: the triple product X_1 X_2 X_3 = ±Z, checked directly
    if kk == 2 {
        let x12 = koszul_product(&complex, &reps["X1"], &reps["X2"]);
        let triple = koszul_product(&complex, &x12, &reps["X3"]);
        let got = reduce(&triple)?
            .ok_or_else(|| Error::Internal("X1·X2·X3 vanished identically".into()))?;
        let sign = match_up_to_sign(&got, &z_class)
            .ok_or_else(|| product_mismatch("X1·X2", "X3", &triple))?;
        products.push(ProductEntry {
            left: "X1·X2".into(),
            right: "X3".into(),
            result: vec![(sign, "Z".into())],
        });
    }
    ring.products = products;

    // additive structure: free of rank 4k, concentrated at the generator
    // bidegrees, no torsion anywhere
    let table = integral_betti(&complex, crate::betti::KOSZUL_DEFAULT_CAP)?;
    if table.has_torsion() {
        return Err(Error::Internal("additive torsion found in a multidegree".into()));
    }
    if table.total_rank() != 4 * kk as u64 {
        return Err(Error::Internal(format!(
            "additive rank {} differs from 4k = {}",
            table.total_rank(),
            4 * kk
        )));
    }
    for gen in &ring.generators {
        if table.rank_at(gen.bidegree.0, gen.bidegree.1) == 0 {
            return Err(Error::Internal(format!(
                "no cohomology at the bidegree of {}",
                gen.name
            )));
        }
    }
    Ok(ring)
}

fn product_mismatch(left: &str, right: &str, prod: &KoszulElement) -> Error {
    let at = prod
        .bidegree()
        .map(|(q, p2)| format!(" at bidegree ({q}, {p2})"))
        .unwrap_or_default();
    Error::Internal(format!("product {left}·{right} does not match the ring table{at}"))
}

/// `got = sign · target`?
fn match_up_to_sign(got: &ReducedClass, target: &ReducedClass) -> Option<i64> {
    if got == target {
        Some(1)
    } else if *got == target.negated() {
        Some(-1)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::boundary_simplex;

    fn pres(w: &[usize]) -> PolygonPresentation {
        PolygonPresentation::new(w.to_vec()).unwrap()
    }

    fn pentagon() -> SimplicialComplex {
        polygon_complex(&pres(&[1, 1, 1, 1, 1])).unwrap()
    }

    #[test]
    fn product_relations() {
        let k = pentagon();
        let u1 = KoszulElement::monomial(&k, &[1], &[], 1).unwrap();
        let v1 = KoszulElement::monomial(&k, &[], &[1], 1).unwrap();
        assert!(koszul_product(&k, &u1, &u1).is_zero());
        assert!(koszul_product(&k, &u1, &v1).is_zero());
        // odd-degree anticommutation: (u1 v2)·u3 = -u3·(u1 v2)
        let u1v2 = KoszulElement::monomial(&k, &[1], &[2], 1).unwrap();
        let u3 = KoszulElement::monomial(&k, &[3], &[], 1).unwrap();
        let ab = koszul_product(&k, &u1v2, &u3);
        let ba = koszul_product(&k, &u3, &u1v2);
        assert_eq!(ab, ba.scale(-1));
        assert!(!ab.is_zero());
    }

    #[test]
    fn differential_is_a_derivation() {
        use rand::{Rng, SeedableRng};
        let k = pentagon();
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        let monomials: Vec<KoszulElement> = {
            let mut v = Vec::new();
            for omega in 0u32..32 {
                for sigma in 0u32..32 {
                    if omega & sigma == 0 && k.is_face_mask(sigma) {
                        v.push(KoszulElement::from_mask_term(omega, sigma, 1));
                    }
                }
            }
            v
        };
        for _ in 0..200 {
            let a = &monomials[rng.gen_range(0..monomials.len())];
            let b = &monomials[rng.gen_range(0..monomials.len())];
            // d(ab) = (da)b + (-1)^{|a|_u} a (db)
            let ab = koszul_product(&k, a, b);
            let lhs = ab.d(&k);
            let (omega_a, _) = a.terms.keys().next().copied().unwrap();
            let sign = if omega_a.count_ones() % 2 == 0 { 1 } else { -1 };
            let rhs = koszul_product(&k, &a.d(&k), b)
                .add(&koszul_product(&k, a, &b.d(&k)).scale(sign));
            assert_eq!(lhs, rhs);
            // d² = 0
            assert!(a.d(&k).d(&k).is_zero());
        }
    }

    #[test]
    fn pentagon_generators() {
        let ring = generator_representatives(&pres(&[1, 1, 1, 1, 1])).unwrap();
        let x1 = ring.generator("X1").unwrap();
        // X1 = v1 u2, bideg (-1, 4)
        assert_eq!(x1.bidegree, (-1, 4));
        let terms: Vec<_> = x1.representative.terms().collect();
        assert_eq!(terms, vec![(vec![2], vec![1], 1)]);
        let y1 = ring.generator("Y1").unwrap();
        assert_eq!(y1.bidegree, (-2, 6));
        let terms: Vec<_> = y1.representative.terms().collect();
        assert_eq!(terms, vec![(vec![1, 3], vec![2], 1)]);
        let z = ring.generator("Z").unwrap();
        assert_eq!(z.bidegree, (-3, 10));
    }

    #[test]
    fn coboundaries_reduce_to_zero() {
        let k = pentagon();
        // d(u1 u2 v3) is a coboundary in its multidegree
        let x = KoszulElement::monomial(&k, &[1, 2], &[3], 1).unwrap();
        let dx = x.d(&k);
        assert!(!dx.is_zero());
        let class = reduce_mod_coboundaries(&k, &dx).unwrap();
        assert!(class.is_zero());
        // v1 u2 is not a coboundary
        let x1 = KoszulElement::monomial(&k, &[2], &[1], 1).unwrap();
        assert!(!reduce_mod_coboundaries(&k, &x1).unwrap().is_zero());
        // non-cocycles are rejected
        let bad = KoszulElement::monomial(&k, &[1], &[3], 1).unwrap();
        assert!(reduce_mod_coboundaries(&k, &bad).is_err());
    }

    #[test]
    fn z_class_is_independent_of_the_vertex() {
        let k = pentagon();
        let faces = k.maximal_faces();
        let classes: Vec<ReducedClass> = faces
            .iter()
            .map(|sigma| {
                let omega: Vec<usize> =
                    (1..=k.m()).filter(|v| !sigma.contains(v)).collect();
                let z = KoszulElement::monomial(&k, &omega, sigma, 1).unwrap();
                reduce_mod_coboundaries(&k, &z).unwrap()
            })
            .collect();
        for c in &classes[1..] {
            assert!(classes[0].equals_up_to_sign(c));
            assert!(!c.is_zero());
        }
    }

    #[test]
    fn seven_gon_product_table() {
        let ring = product_table(&pres(&[1, 1, 1, 1, 1, 1, 1])).unwrap();
        // X_i · Y_{i+3} = ±Z, all other X·Y vanish
        for i in 1..=7usize {
            for j in 1..=7usize {
                let entry = ring.product(&format!("X{i}"), &format!("Y{j}")).unwrap();
                if (i + 2) % 7 + 1 == j {
                    assert_eq!(entry.len(), 1);
                    assert_eq!(entry[0].1, "Z");
                    assert_eq!(entry[0].0.abs(), 1);
                } else {
                    assert!(entry.is_empty(), "X{i}·Y{j} should vanish");
                }
            }
        }
        assert_eq!(ring.generators.len(), 4 * 4); // 1 + 7 + 7 + 1
    }

    #[test]
    fn octahedron_product_table() {
        let ring = product_table(&pres(&[2, 2, 2])).unwrap();
        // X_i X_{i+1} = ±Y_i and the triple product is ±Z
        for i in 1..=3usize {
            let j = i % 3 + 1;
            let entry = ring.product(&format!("X{i}"), &format!("X{j}")).unwrap();
            assert_eq!(entry.len(), 1);
            assert_eq!(entry[0].1, format!("Y{i}"));
        }
        let triple = ring.product("X1·X2", "X3").unwrap();
        assert_eq!(triple[0].1, "Z");
        // squares vanish
        assert!(ring.product("X1", "X1").unwrap().is_empty());
    }

    #[test]
    fn example2_pair_isomorphic_presentations() {
        let a = product_table(&pres(&[1, 1, 2, 2, 2])).unwrap();
        let b = product_table(&pres(&[1, 1, 3, 1, 2])).unwrap();
        assert_eq!(a.bidegree_multiset(), b.bidegree_multiset());
        assert_eq!(
            integral_betti(&polygon_complex(&pres(&[1, 1, 2, 2, 2])).unwrap(), 16).unwrap(),
            integral_betti(&polygon_complex(&pres(&[1, 1, 3, 1, 2])).unwrap(), 16).unwrap()
        );
    }

    /// The u-factors of a Y-representative can sit anywhere inside the two
    /// end blocks of its segment; all choices give the same class up to
    /// sign.
    #[test]
    fn alternate_u_positions_give_equal_classes() {
        let p = pres(&[2, 1, 2, 1, 1, 2, 1]); // k = 4, blocks of size 2 exist
        let k = polygon_complex(&p).unwrap();
        let m = p.m();
        for i in 1..=7usize {
            let len = p.psi(i);
            let seg: Vec<usize> = (1..=len).map(|t| (p.eta(i - 1) + t - 1) % m + 1).collect();
            let first_block = p.weights()[i - 1];
            let last_block = p.weight_at(i + p.k() - 1);
            let mut classes = Vec::new();
            for s in 0..first_block {
                for t in 0..last_block {
                    let u_a = seg[s];
                    let u_b = seg[len - 1 - t];
                    let sigma: Vec<usize> =
                        seg.iter().copied().filter(|&v| v != u_a && v != u_b).collect();
                    let y = KoszulElement::monomial(&k, &[u_a, u_b], &sigma, 1).unwrap();
                    assert!(y.d(&k).is_zero(), "Y{i} alternate ({s},{t}) is not a cocycle");
                    classes.push(reduce_mod_coboundaries(&k, &y).unwrap());
                }
            }
            for c in &classes {
                assert!(!c.is_zero());
                assert!(
                    classes[0].equals_up_to_sign(c),
                    "alternate Y{i} representatives differ in cohomology"
                );
            }
        }
    }

    /// X (resp. Y) classes sit in pairwise distinct multidegrees, so they
    /// are independent; check the multidegrees really are distinct.
    #[test]
    fn generator_multidegrees_are_distinct() {
        for w in [vec![1usize; 7], vec![2, 1, 2, 1, 1, 2, 1], vec![2, 2, 2]] {
            let ring = generator_representatives(&pres(&w)).unwrap();
            let mut x_degrees = Vec::new();
            let mut y_degrees = Vec::new();
            for g in &ring.generators {
                let md = g.representative.multidegree().unwrap().0;
                if g.name.starts_with('X') {
                    x_degrees.push(md);
                } else if g.name.starts_with('Y') {
                    y_degrees.push(md);
                }
            }
            let unique = |v: &[FaceMask]| {
                let mut s = v.to_vec();
                s.sort_unstable();
                s.dedup();
                s.len() == v.len()
            };
            assert!(unique(&x_degrees), "{w:?}: X multidegrees collide");
            assert!(unique(&y_degrees), "{w:?}: Y multidegrees collide");
        }
    }

    #[test]
    fn integral_betti_matches_rational_for_spheres() {
        for w in [vec![1usize, 1, 1, 1, 1], vec![2, 2, 2]] {
            let k = polygon_complex(&pres(&w)).unwrap();
            let integral = integral_betti(&k, 16).unwrap();
            let rational = crate::betti::koszul_betti(&k).unwrap();
            assert_eq!(integral, rational, "presentation {w:?}");
            assert!(!integral.has_torsion());
        }
        let b2 = boundary_simplex(2).unwrap();
        assert!(!integral_betti(&b2, 16).unwrap().has_torsion());
    }
}
