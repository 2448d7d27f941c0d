//! Dense integer polynomials in one variable.
//!
//! Small helper used for `f ↔ h` transforms, flip identities and the
//! Euler-characteristic checks.  Coefficients are `i64`; at desk scale the
//! largest values are binomial coefficients of an `m ≤ 16` complex, far
//! below overflow.

/// Polynomial with coefficients in ascending degree order. The zero
/// polynomial is represented by an empty coefficient vector.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IntPoly {
    coeffs: Vec<i64>,
}

impl IntPoly {
    pub fn zero() -> Self {
        IntPoly { coeffs: vec![] }
    }

    pub fn constant(c: i64) -> Self {
        IntPoly { coeffs: vec![c] }.trimmed()
    }

    /// The monomial `c·t^d`.
    pub fn monomial(c: i64, d: usize) -> Self {
        let mut coeffs = vec![0; d + 1];
        coeffs[d] = c;
        IntPoly { coeffs }.trimmed()
    }

    pub fn from_coeffs(coeffs: Vec<i64>) -> Self {
        IntPoly { coeffs }.trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; zero polynomial reports degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, d: usize) -> i64 {
        self.coeffs.get(d).copied().unwrap_or(0)
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn add(&self, other: &IntPoly) -> IntPoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|d| self.coeff(d) + other.coeff(d)).collect();
        IntPoly { coeffs }.trimmed()
    }

    pub fn sub(&self, other: &IntPoly) -> IntPoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|d| self.coeff(d) - other.coeff(d)).collect();
        IntPoly { coeffs }.trimmed()
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        let mut coeffs = vec![0i64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        IntPoly { coeffs }.trimmed()
    }

    /// `(t - 1)^k` and friends.
    pub fn pow(&self, mut k: u32) -> IntPoly {
        let mut acc = IntPoly::constant(1);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    /// Exact division; `None` when the remainder is nonzero or the divisor
    /// is zero.
    pub fn div_exact(&self, divisor: &IntPoly) -> Option<IntPoly> {
        if divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(IntPoly::zero());
        }
        if self.coeffs.len() < divisor.coeffs.len() {
            return None;
        }
        let mut rem = self.coeffs.clone();
        let dlen = divisor.coeffs.len();
        let lead = *divisor.coeffs.last().unwrap();
        let qlen = rem.len() - dlen + 1;
        let mut quot = vec![0i64; qlen];
        for qi in (0..qlen).rev() {
            let top = rem[qi + dlen - 1];
            if top % lead != 0 {
                return None;
            }
            let q = top / lead;
            quot[qi] = q;
            if q != 0 {
                for (di, dc) in divisor.coeffs.iter().enumerate() {
                    rem[qi + di] -= q * dc;
                }
            }
        }
        if rem.iter().any(|&c| c != 0) {
            return None;
        }
        Some(IntPoly { coeffs: quot }.trimmed())
    }

    /// Substitute `t ↦ t^k` (used to form `h(t²)` style series).
    pub fn inflate(&self, k: usize) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut coeffs = vec![0i64; (self.coeffs.len() - 1) * k + 1];
        for (d, c) in self.coeffs.iter().enumerate() {
            coeffs[d * k] = *c;
        }
        IntPoly { coeffs }.trimmed()
    }
}

impl std::fmt::Display for IntPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, c) in self.coeffs.iter().enumerate().rev() {
            if *c == 0 {
                continue;
            }
            if first {
                if *c < 0 {
                    write!(f, "-")?;
                }
                first = false;
            } else if *c < 0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let a = c.abs();
            match d {
                0 => write!(f, "{a}")?,
                1 if a == 1 => write!(f, "t")?,
                1 => write!(f, "{a}t")?,
                _ if a == 1 => write!(f, "t^{d}")?,
                _ => write!(f, "{a}t^{d}")?,
            }
        }
        Ok(())
    }
}
