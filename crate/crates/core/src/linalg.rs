//! Exact linear algebra over `GF(2)` and the integers.
//!
//! The `GF(2)` kernel packs rows into machine words; it sits in the inner
//! loop of the Buchstaber searches.  Integer routines use
//! arbitrary-precision arithmetic throughout — Bareiss intermediates and
//! Smith-normal-form transforms overflow fixed width quickly — with an
//! `i128` fast path for the rank computation that the Betti module hammers.

use crate::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Bit matrix over `GF(2)`; each row is one `u64`, so at most 64 columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GF2Matrix {
    rows: usize,
    cols: usize,
    bits: Vec<u64>,
}

impl GF2Matrix {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if cols > 64 {
            return Err(Error::DeskScale(format!(
                "GF(2) matrices are limited to 64 columns, got {cols}"
            )));
        }
        Ok(GF2Matrix { rows, cols, bits: vec![0; rows] })
    }

    pub fn from_rows(cols: usize, rows: &[u64]) -> Result<Self> {
        let mut m = GF2Matrix::new(rows.len(), cols)?;
        let mask = if cols == 64 { !0 } else { (1u64 << cols) - 1 };
        for (i, r) in rows.iter().enumerate() {
            if r & !mask != 0 {
                return Err(Error::Input(format!("row {i} has bits beyond column {cols}")));
            }
            m.bits[i] = *r;
        }
        Ok(m)
    }

    pub fn from_bool(entries: &[Vec<bool>]) -> Result<Self> {
        let cols = entries.first().map_or(0, Vec::len);
        let mut rows = Vec::with_capacity(entries.len());
        for row in entries {
            if row.len() != cols {
                return Err(Error::Input("ragged GF(2) matrix".into()));
            }
            let mut word = 0u64;
            for (j, &b) in row.iter().enumerate() {
                if b {
                    word |= 1 << j;
                }
            }
            rows.push(word);
        }
        GF2Matrix::from_rows(cols, &rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> u64 {
        self.bits[i]
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i] >> j & 1 == 1
    }
}

/// Rank by bitset Gaussian elimination.
pub fn gf2_rank(m: &GF2Matrix) -> usize {
    gf2_rank_words(&m.bits)
}

/// Rank of rows given as packed words.
pub fn gf2_rank_words(rows: &[u64]) -> usize {
    let mut basis: Vec<u64> = Vec::new();
    for &r in rows {
        let mut v = r;
        for &b in &basis {
            let pivot = 1u64 << (63 - b.leading_zeros());
            if v & pivot != 0 {
                v ^= b;
            }
        }
        if v != 0 {
            basis.push(v);
        }
    }
    basis.len()
}

/// Dense integer matrix with arbitrary-precision entries, row major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged integer matrix");
        let data = rows.iter().flatten().map(|&v| BigInt::from(v)).collect();
        IntMatrix { rows: r, cols: c, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        let prod = a * b;
                        out[(i, j)] += prod;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| &self[(i, j)] * &v[j]).sum())
            .collect()
    }

    /// Reduction of every entry mod 2, packed per row.
    pub fn mod2(&self) -> Result<GF2Matrix> {
        let mut m = GF2Matrix::new(self.rows, self.cols)?;
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self[(i, j)].is_odd() {
                    m.bits[i] |= 1 << j;
                }
            }
        }
        Ok(m)
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

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn int_det(m: &IntMatrix) -> Result<BigInt> {
    if m.rows != m.cols {
        return Err(Error::Input(format!(
            "determinant of a non-square {}x{} matrix",
            m.rows, m.cols
        )));
    }
    let n = m.rows;
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut a: Vec<Vec<BigInt>> =
        (0..n).map(|i| (0..n).map(|j| m[(i, j)].clone()).collect()).collect();
    let mut prev = BigInt::one();
    let mut sign = 1i32;
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = num / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    Ok(if sign < 0 { -det } else { det })
}

/// Rank over the rationals, exact.
///
/// Row echelon with primitive (gcd-normalized) integer rows keeps entries
/// small on the sparse incidence matrices this is used for; the `i128`
/// path escalates to `BigInt` rows on overflow.
pub fn int_rank(m: &IntMatrix) -> usize {
    let small: Option<Vec<Vec<i128>>> = (0..m.rows)
        .map(|i| {
            (0..m.cols)
                .map(|j| i128::try_from(&m[(i, j)]).ok())
                .collect::<Option<Vec<i128>>>()
        })
        .collect();
    match small {
        Some(rows) => match rank_i128(rows.clone()) {
            Some(r) => r,
            None => rank_bigint(
                rows.into_iter()
                    .map(|row| row.into_iter().map(BigInt::from).collect())
                    .collect(),
            ),
        },
        None => rank_bigint(
            (0..m.rows)
                .map(|i| (0..m.cols).map(|j| m[(i, j)].clone()).collect())
                .collect(),
        ),
    }
}

/// Rank of a matrix given as sparse rows of `(column, ±coefficient)`.
pub fn int_rank_sparse(cols: usize, sparse_rows: &[Vec<(usize, i64)>]) -> usize {
    let rows: Vec<Vec<i128>> = sparse_rows
        .iter()
        .map(|r| {
            let mut dense = vec![0i128; cols];
            for &(j, v) in r {
                dense[j] += v as i128;
            }
            dense
        })
        .collect();
    match rank_i128(rows.clone()) {
        Some(r) => r,
        None => rank_bigint(
            rows.into_iter()
                .map(|row| row.into_iter().map(BigInt::from).collect())
                .collect(),
        ),
    }
}

fn rank_i128(mut rows: Vec<Vec<i128>>) -> Option<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        // pick the pivot with the smallest absolute value to limit growth
        let pivot = (rank..rows.len())
            .filter(|&i| rows[i][col] != 0)
            .min_by_key(|&i| rows[i][col].unsigned_abs());
        let Some(p) = pivot else { continue };
        rows.swap(rank, p);
        let (pivot_row, rest) = {
            let (a, b) = rows.split_at_mut(rank + 1);
            (&a[rank], b)
        };
        let pv = pivot_row[col];
        for row in rest.iter_mut() {
            if row[col] == 0 {
                continue;
            }
            let rv = row[col];
            let g = gcd_i128(pv, rv);
            let (mp, mr) = (rv / g, pv / g);
            for j in col..ncols {
                let a = row[j].checked_mul(mr)?;
                let b = pivot_row[j].checked_mul(mp)?;
                row[j] = a.checked_sub(b)?;
            }
            normalize_row_i128(row, col + 1);
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    Some(rank)
}

fn normalize_row_i128(row: &mut [i128], from: usize) {
    let mut g: i128 = 0;
    for &v in row[from..].iter() {
        g = gcd_i128(g, v);
        if g == 1 {
            return;
        }
    }
    if g > 1 {
        for v in row[from..].iter_mut() {
            *v /= g;
        }
    }
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a as i128
}

fn rank_bigint(mut rows: Vec<Vec<BigInt>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let pivot = (rank..rows.len())
            .filter(|&i| !rows[i][col].is_zero())
            .min_by_key(|&i| rows[i][col].magnitude().bits());
        let Some(p) = pivot else { continue };
        rows.swap(rank, p);
        let (pivot_row, rest) = {
            let (a, b) = rows.split_at_mut(rank + 1);
            (&a[rank], b)
        };
        let pv = pivot_row[col].clone();
        for row in rest.iter_mut() {
            if row[col].is_zero() {
                continue;
            }
            let g = pv.gcd(&row[col]);
            let mp = &row[col] / &g;
            let mr = &pv / &g;
            for j in col..ncols {
                row[j] = &row[j] * &mr - &pivot_row[j] * &mp;
            }
            let mut g = BigInt::zero();
            for v in row[col + 1..].iter() {
                g = g.gcd(v);
                if g.is_one() {
                    break;
                }
            }
            if g > BigInt::one() {
                for v in row[col + 1..].iter_mut() {
                    *v = &*v / &g;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Smith normal form `U · M · V = D` with unimodular transforms.
#[derive(Debug, Clone)]
pub struct SmithDecomposition {
    /// Nonnegative diagonal `d_1 | d_2 | …`, padded with zeros up to
    /// `min(rows, cols)`.
    pub diagonal: Vec<BigInt>,
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
}

impl SmithDecomposition {
    /// Number of nonzero invariant factors.
    pub fn rank(&self) -> usize {
        self.diagonal.iter().filter(|d| !d.is_zero()).count()
    }
}

/// Diagonal-only Smith normal form.
pub fn smith_normal_form(m: &IntMatrix) -> Vec<BigInt> {
    smith_with_transforms(m).diagonal
}

/// Full Smith normal form with all four transforms.
pub fn smith_with_transforms(m: &IntMatrix) -> SmithDecomposition {
    let (rows, cols) = (m.rows, m.cols);
    let mut b: Vec<Vec<BigInt>> =
        (0..rows).map(|i| (0..cols).map(|j| m[(i, j)].clone()).collect()).collect();
    let mut u = IntMatrix::identity(rows);
    let mut u_inv = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    let mut v_inv = IntMatrix::identity(cols);

    // Row op: row_i += c * row_k   (U := E U, U_inv := U_inv E^{-1})
    let row_add = |b: &mut Vec<Vec<BigInt>>,
                   u: &mut IntMatrix,
                   u_inv: &mut IntMatrix,
                   i: usize,
                   k: usize,
                   c: &BigInt| {
        if c.is_zero() {
            return;
        }
        for j in 0..cols {
            let add = c * &b[k][j];
            b[i][j] += add;
        }
        for j in 0..rows {
            let add = c * &u[(k, j)];
            u[(i, j)] += add;
            let sub = c * &u_inv[(j, i)];
            u_inv[(j, k)] -= sub;
        }
    };
    // Col op: col_j += c * col_k   (V := V E, V_inv := E^{-1} V_inv)
    let col_add = |b: &mut Vec<Vec<BigInt>>,
                   v: &mut IntMatrix,
                   v_inv: &mut IntMatrix,
                   j: usize,
                   k: usize,
                   c: &BigInt| {
        if c.is_zero() {
            return;
        }
        for row in b.iter_mut() {
            let add = c * &row[k];
            row[j] += add;
        }
        for i in 0..cols {
            let add = c * &v[(i, k)];
            v[(i, j)] += add;
            let sub = c * &v_inv[(j, i)];
            v_inv[(k, i)] -= sub;
        }
    };

    let dim = rows.min(cols);
    for t in 0..dim {
        loop {
            // smallest nonzero entry of the trailing block to (t, t)
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !b[i][j].is_zero()
                        && best
                            .map(|(bi, bj)| b[i][j].magnitude() < b[bi][bj].magnitude())
                            .unwrap_or(true)
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            if pi != t {
                b.swap(pi, t);
                for j in 0..rows {
                    let tmp = u[(pi, j)].clone();
                    u[(pi, j)] = u[(t, j)].clone();
                    u[(t, j)] = tmp;
                    let tmp = u_inv[(j, pi)].clone();
                    u_inv[(j, pi)] = u_inv[(j, t)].clone();
                    u_inv[(j, t)] = tmp;
                }
            }
            if pj != t {
                for row in b.iter_mut() {
                    row.swap(pj, t);
                }
                for i in 0..cols {
                    let tmp = v[(i, pj)].clone();
                    v[(i, pj)] = v[(i, t)].clone();
                    v[(i, t)] = tmp;
                    let tmp = v_inv[(pj, i)].clone();
                    v_inv[(pj, i)] = v_inv[(t, i)].clone();
                    v_inv[(t, i)] = tmp;
                }
            }
            let pivot = b[t][t].clone();
            let mut clean = true;
            for i in t + 1..rows {
                if !b[i][t].is_zero() {
                    let q = div_round(&b[i][t], &pivot);
                    row_add(&mut b, &mut u, &mut u_inv, i, t, &(-q));
                    if !b[i][t].is_zero() {
                        clean = false;
                    }
                }
            }
            for j in t + 1..cols {
                if !b[t][j].is_zero() {
                    let q = div_round(&b[t][j], &pivot);
                    col_add(&mut b, &mut v, &mut v_inv, j, t, &(-q));
                    if !b[t][j].is_zero() {
                        clean = false;
                    }
                }
            }
            if !clean {
                continue;
            }
            // divisibility sweep: fold a non-divisible entry into column t
            let offender = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !(&b[i][j] % &pivot).is_zero());
            match offender {
                Some((i, _)) => {
                    let one = BigInt::one();
                    row_add(&mut b, &mut u, &mut u_inv, t, i, &one);
                }
                None => break,
            }
        }
    }

    let mut diagonal: Vec<BigInt> = (0..dim).map(|t| b[t][t].clone()).collect();
    // sign normalization
    for (t, d) in diagonal.iter_mut().enumerate() {
        if d.is_negative() {
            *d = -d.clone();
            for row in b.iter_mut() {
                row[t] = -row[t].clone();
            }
            for i in 0..cols {
                v[(i, t)] = -v[(i, t)].clone();
                v_inv[(t, i)] = -v_inv[(t, i)].clone();
            }
        }
    }
    SmithDecomposition { diagonal, u, u_inv, v, v_inv }
}

fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    // quotient minimizing |a - q b|
    let (q, r) = a.div_rem(b);
    if &r.abs() * 2 > b.abs() {
        if (r.is_negative()) == (b.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// Do the columns of `M` extend to a basis of `Z^rows`?
///
/// Equivalent to all invariant factors being 1 (the gcd of the maximal
/// minors is 1). Matrices with more columns than rows never qualify.
pub fn is_part_of_basis(m: &IntMatrix) -> bool {
    if m.cols > m.rows {
        return false;
    }
    let diag = smith_normal_form(m);
    diag.len() == m.cols && diag.iter().all(|d| d.is_one())
}
