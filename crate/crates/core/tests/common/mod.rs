//! Shared fixtures and independent oracles for the integration suites.
//!
//! The brute-force searches here deliberately avoid the library's search
//! machinery (no canonical prefixes, no vertex reordering, no matrix-form
//! duality) so they can serve as independent checks of it.

use torcomb::complex::SimplicialComplex;
use torcomb::families::{
    boundary_simplex, cyclic_dual, polygon_complex, simplex_skeleton, PolygonPresentation,
};

/// Every polygon presentation with weight sum at most `max_sum`
/// (all odd lengths; triangle presentations need weights >= 2).
pub fn presentations_with_sum(max_sum: usize) -> Vec<PolygonPresentation> {
    let mut out = Vec::new();
    for len in (3..=max_sum).step_by(2) {
        let min_part = if len == 3 { 2 } else { 1 };
        let mut stack: Vec<Vec<usize>> = vec![vec![]];
        while let Some(w) = stack.pop() {
            if w.len() == len {
                if let Ok(p) = PolygonPresentation::new(w) {
                    out.push(p);
                }
                continue;
            }
            let used: usize = w.iter().sum();
            let slots_left = len - w.len();
            let budget = max_sum - used;
            if budget < min_part * slots_left {
                continue;
            }
            for a in min_part..=(budget - min_part * (slots_left - 1)) {
                let mut w2 = w.clone();
                w2.push(a);
                stack.push(w2);
            }
        }
    }
    out
}

/// Sphere-family complexes (duals of simple polytopes) with `m <= max_m`:
/// polygon presentations, simplex boundaries and cyclic duals.
pub fn sphere_families(max_m: usize) -> Vec<(String, SimplicialComplex)> {
    let mut out = Vec::new();
    for p in presentations_with_sum(max_m) {
        out.push((format!("polygon{:?}", p.weights()), polygon_complex(&p).unwrap()));
    }
    for n in 1..max_m {
        if n + 1 <= max_m {
            out.push((format!("boundary_simplex({n})"), boundary_simplex(n).unwrap()));
        }
    }
    for m in 4..=max_m {
        for n in 2..m - 1 {
            out.push((format!("cyclic_dual({n},{m})"), cyclic_dual(n, m).unwrap()));
        }
    }
    out
}

/// Everything in [`sphere_families`] plus simplex skeletons (non-spheres;
/// `n = m - 1` omitted, that is the simplex boundary again).
pub fn all_families(max_m: usize) -> Vec<(String, SimplicialComplex)> {
    let mut out = sphere_families(max_m);
    for m in 3..=max_m {
        for n in 1..m - 1 {
            out.push((format!("skeleton({m},{n})"), simplex_skeleton(m, n).unwrap()));
        }
    }
    out
}

/// Brute-force real Buchstaber invariant in the vector-assignment form:
/// plain depth-first enumeration in natural vertex order over all nonzero
/// vectors of `F_2^r`, with only face-consistency propagation — no
/// canonical-prefix symmetry pruning and no ordering heuristics.
pub fn s_real_brute(k: &SimplicialComplex) -> usize {
    let m = k.m();
    let n = k.max_face_size();
    assert!(k.is_pure() && m > n, "oracle needs a pure non-simplex complex");
    for s in (1..=m - n).rev() {
        if brute_feasible(k, m - s) {
            return s;
        }
    }
    unreachable!("s >= 1 always holds (diagonal circle)");
}

fn brute_feasible(k: &SimplicialComplex, r: usize) -> bool {
    fn faces_ok(k: &SimplicialComplex, vecs: &[u32]) -> bool {
        for &face in k.maximal_masks() {
            let mut basis: Vec<u32> = Vec::new();
            for (i, &x) in vecs.iter().enumerate() {
                if face >> i & 1 == 0 {
                    continue;
                }
                let mut v = x;
                for &b in &basis {
                    let pivot = 1u32 << (31 - b.leading_zeros());
                    if v & pivot != 0 {
                        v ^= b;
                    }
                }
                if v == 0 {
                    return false;
                }
                basis.push(v);
            }
        }
        true
    }
    fn dfs(k: &SimplicialComplex, r: usize, vecs: &mut Vec<u32>) -> bool {
        if vecs.len() == k.m() {
            return true;
        }
        for x in 1u32..1 << r {
            vecs.push(x);
            if faces_ok(k, vecs) && dfs(k, r, vecs) {
                return true;
            }
            vecs.pop();
        }
        false
    }
    dfs(k, r, &mut Vec::new())
}

/// Brute-force chromatic number of the 1-skeleton: DFS in natural vertex
/// order, colors tried in numeric order, no clique/greedy guidance.
#[allow(dead_code)] // not every test binary uses every oracle
pub fn chromatic_brute(k: &SimplicialComplex) -> usize {
    let m = k.m();
    let mut adj = vec![0u32; m];
    for i in 1..=m {
        for j in i + 1..=m {
            if k.is_face(&[i, j]).unwrap() {
                adj[i - 1] |= 1 << (j - 1);
                adj[j - 1] |= 1 << (i - 1);
            }
        }
    }
    fn colorable(adj: &[u32], colors: &mut Vec<usize>, c: usize) -> bool {
        let v = colors.len();
        if v == adj.len() {
            return true;
        }
        for col in 0..c {
            if colors.iter().enumerate().any(|(u, &cu)| adj[v] >> u & 1 == 1 && cu == col) {
                continue;
            }
            colors.push(col);
            if colorable(adj, colors, c) {
                return true;
            }
            colors.pop();
        }
        false
    }
    (1..=m).find(|&c| colorable(&adj, &mut Vec::new(), c)).unwrap_or(0)
}
