//! Exact integer polynomials.
//!
//! Verdicts like "these two polynomials share a root" cannot be settled mod
//! `p^M`: a resultant that is zero at precision is only *zero at precision*.
//! This module carries the exact-integer arithmetic (resultants, gcds, the
//! omega family) used wherever a verdict must be definitive.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

/// Dense polynomial over `Z`, little-endian coefficients, no trailing zeros.
/// The zero polynomial has an empty coefficient vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        let mut p = IntPoly { coeffs };
        p.normalize();
        p
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        IntPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        IntPoly {
            coeffs: vec![BigInt::one()],
        }
    }

    pub fn constant(c: BigInt) -> Self {
        IntPoly::new(vec![c])
    }

    /// The monomial `c * x^k`.
    pub fn monomial(c: BigInt, k: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.push(c);
        IntPoly::new(coeffs)
    }

    fn normalize(&mut self) {
        while matches!(self.coeffs.last(), Some(c) if c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        matches!(self.leading(), Some(c) if c.is_one())
    }

    /// Monic with every non-leading coefficient divisible by `p`.
    pub fn is_distinguished(&self, p: u64) -> bool {
        if !self.is_monic() {
            return false;
        }
        let p = BigInt::from(p);
        self.coeffs[..self.coeffs.len() - 1]
            .iter()
            .all(|c| (c % &p).is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            coeffs.push(self.coeff(k) + other.coeff(k));
        }
        IntPoly::new(coeffs)
    }

    pub fn neg(&self) -> Self {
        IntPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        IntPoly::new(coeffs)
    }

    pub fn mul_scalar(&self, c: &BigInt) -> Self {
        IntPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = IntPoly::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Remainder of division by a monic divisor; exact over `Z`.
    pub fn rem_monic(&self, div: &Self) -> Self {
        assert!(div.is_monic(), "divisor must be monic");
        let d = div.degree().expect("monic divisor is nonzero");
        if d == 0 {
            return IntPoly::zero();
        }
        let mut rem = self.coeffs.clone();
        while rem.len() > d {
            let top = rem.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let shift = rem.len() - d;
            for (k, c) in div.coeffs[..d].iter().enumerate() {
                rem[shift + k] -= &top * c;
            }
        }
        IntPoly::new(rem)
    }

    /// Content (gcd of coefficients), nonnegative.
    fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = num_integer::gcd(g, c.clone());
        }
        g
    }

    /// Divides out the content and normalizes the leading sign to `+`.
    fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut g = self.content();
        if self.leading().unwrap().is_negative() {
            g = -g;
        }
        IntPoly::new(self.coeffs.iter().map(|c| c / &g).collect())
    }
}

/// `(1 + x)^(p^n) - 1`, the generator of the kernel of reduction to level `n`.
pub fn omega_poly(p: u64, n: u32) -> IntPoly {
    let e = BigUint::from(p).pow(n);
    let e: u64 = u64::try_from(&e).expect("p^n must fit in a machine word");
    let mut coeffs = Vec::with_capacity(e as usize + 1);
    // binomial row, computed incrementally: C(e, k+1) = C(e, k) * (e-k)/(k+1)
    let mut c = BigInt::one();
    coeffs.push(BigInt::zero()); // (1+x)^e - 1 has zero constant term
    for k in 0..e {
        c = c * BigInt::from(e - k) / BigInt::from(k + 1);
        coeffs.push(c.clone());
    }
    IntPoly::new(coeffs)
}

/// p-adic valuation of an integer; `None` for zero.
pub fn int_valuation(value: &BigInt, p: u64) -> Option<u64> {
    if value.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut v = 0u64;
    let mut r = value.abs();
    loop {
        let (q, rem) = num_integer::Integer::div_rem(&r, &p);
        if !rem.is_zero() {
            return Some(v);
        }
        r = q;
        v += 1;
    }
}

/// Resultant of `f` and `g`: the determinant of their Sylvester matrix.
///
/// When `f` is monic, `g` is first reduced mod `f`; this leaves the Sylvester
/// determinant unchanged and keeps the matrix small even when `deg g` is a
/// power of `p`.
pub fn resultant(f: &IntPoly, g: &IntPoly) -> BigInt {
    match (f.degree(), g.degree()) {
        (None, _) | (_, None) => BigInt::zero(),
        (Some(0), Some(n)) => f.leading().unwrap().pow(n as u32),
        (Some(m), Some(0)) => g.leading().unwrap().pow(m as u32),
        (Some(m), Some(n)) => {
            if f.is_monic() && n >= m {
                return resultant(f, &g.rem_monic(f));
            }
            if g.is_monic() && m >= n {
                let sign = if (m * n) % 2 == 0 { 1 } else { -1 };
                return BigInt::from(sign) * resultant(g, &f.rem_monic(g));
            }
            bareiss_det(sylvester_matrix(f, g))
        }
    }
}

/// Nonconstant gcd test partner: primitive gcd over `Z` via pseudo-remainders.
pub fn poly_gcd(f: &IntPoly, g: &IntPoly) -> IntPoly {
    let mut a = f.primitive_part();
    let mut b = g.primitive_part();
    if a.is_zero() {
        return b;
    }
    while !b.is_zero() {
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
            continue;
        }
        let r = pseudo_rem(&a, &b);
        a = b;
        b = r.primitive_part();
    }
    a
}

/// Pseudo-remainder: `lc(g)^(deg f - deg g + 1) * f mod g`.
fn pseudo_rem(f: &IntPoly, g: &IntPoly) -> IntPoly {
    let dg = g.degree().expect("nonzero divisor");
    let lc = g.leading().unwrap().clone();
    let mut rem = f.coeffs.clone();
    while rem.len() > dg {
        let top = rem.pop().unwrap();
        for c in rem.iter_mut() {
            *c *= &lc;
        }
        if !top.is_zero() {
            let shift = rem.len() - dg;
            for (k, c) in g.coeffs[..dg].iter().enumerate() {
                rem[shift + k] -= &top * c;
            }
        }
    }
    IntPoly::new(rem)
}

fn sylvester_matrix(f: &IntPoly, g: &IntPoly) -> Vec<Vec<BigInt>> {
    let m = f.degree().unwrap();
    let n = g.degree().unwrap();
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = vec![BigInt::zero(); size];
        for (k, c) in f.coeffs.iter().rev().enumerate() {
            row[i + k] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![BigInt::zero(); size];
        for (k, c) in g.coeffs.iter().rev().enumerate() {
            row[i + k] = c.clone();
        }
        rows.push(row);
    }
    rows
}

/// Fraction-free Gaussian elimination; every division is exact over `Z`.
pub fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[k][k] * &m[i][j] - &m[i][k] * &m[k][j];
                m[i][j] = num / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    BigInt::from(sign) * m[n - 1][n - 1].clone()
}
