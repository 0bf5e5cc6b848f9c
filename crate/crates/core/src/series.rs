//! Truncated power-series arithmetic in `Z_p[[T]]`.
//!
//! A [`LambdaElem`] is a series known mod `(p^M, T^N)`. Operations never
//! extend either truncation: precisions combine as `min(M1, M2)` and
//! truncations as `min(N1, N2)`. [`LambdaElem::weierstrass_prep`] factors a
//! nonzero series as `p^mu * u * P` with `u` a unit and `P` distinguished,
//! which is where the mu- and lambda-invariants of a cyclic module come from.

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::padic::{pow_modulus, PadicInt, Valuation};

/// Truncated element of `Z_p[[T]]`: exactly `N` coefficients sharing `(p, M)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LambdaElem {
    p: u64,
    precision: u32,
    coeffs: Vec<PadicInt>,
}

impl LambdaElem {
    /// Builds a series from integer coefficients, padding with zeros up to the
    /// truncation length. Extra coefficients beyond `truncation` are cut: the
    /// series only exists mod `T^N`.
    pub fn new(p: u64, precision: u32, truncation: usize, coeffs: &[i64]) -> Result<Self> {
        if truncation == 0 {
            return Err(Error::Invalid("truncation must be at least 1".into()));
        }
        let mut out = Vec::with_capacity(truncation);
        for k in 0..truncation {
            let c = coeffs.get(k).copied().unwrap_or(0);
            out.push(PadicInt::new(p, precision, c)?);
        }
        Ok(LambdaElem {
            p,
            precision,
            coeffs: out,
        })
    }

    pub fn from_coeffs(coeffs: Vec<PadicInt>) -> Result<Self> {
        let first = coeffs
            .first()
            .ok_or_else(|| Error::Invalid("truncation must be at least 1".into()))?;
        let (p, precision) = (first.p(), first.precision());
        for c in &coeffs {
            if c.p() != p {
                return Err(Error::PrimeMismatch {
                    left: p,
                    right: c.p(),
                });
            }
            if c.precision() != precision {
                return Err(Error::Invalid(
                    "coefficients must share one precision".into(),
                ));
            }
        }
        Ok(LambdaElem {
            p,
            precision,
            coeffs,
        })
    }

    pub fn zero(p: u64, precision: u32, truncation: usize) -> Self {
        LambdaElem {
            p,
            precision,
            coeffs: vec![PadicInt::zero(p, precision); truncation],
        }
    }

    pub fn one(p: u64, precision: u32, truncation: usize) -> Self {
        let mut s = LambdaElem::zero(p, precision, truncation);
        s.coeffs[0] = PadicInt::one(p, precision);
        s
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, k: usize) -> &PadicInt {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[PadicInt] {
        &self.coeffs
    }

    /// Little-endian residues with trailing zeros trimmed (report form).
    pub fn trimmed_residues(&self) -> Vec<BigUint> {
        let mut out: Vec<BigUint> = self.coeffs.iter().map(|c| c.residue().clone()).collect();
        while out.len() > 1 && out.last().map(|c| c.is_zero()) == Some(true) {
            out.pop();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    fn check_prime(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch {
                left: self.p,
                right: other.p,
            });
        }
        Ok(())
    }

    fn shrink_to(&self, precision: u32, truncation: usize) -> Self {
        let coeffs = self.coeffs[..truncation]
            .iter()
            .map(|c| c.reduce_precision(precision))
            .collect();
        LambdaElem {
            p: self.p,
            precision,
            coeffs,
        }
    }

    /// Exact sum mod `(p^min(M), T^min(N))`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_prime(other)?;
        let precision = self.precision.min(other.precision);
        let truncation = self.truncation().min(other.truncation());
        let modulus = pow_modulus(self.p, precision);
        let coeffs = (0..truncation)
            .map(|k| {
                let r = (self.coeffs[k].residue() + other.coeffs[k].residue()) % &modulus;
                PadicInt::from_reduced(self.p, precision, r)
            })
            .collect();
        Ok(LambdaElem {
            p: self.p,
            precision,
            coeffs,
        })
    }

    pub fn neg(&self) -> Self {
        LambdaElem {
            p: self.p,
            precision: self.precision,
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Exact product mod `(p^min(M), T^min(N))`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_prime(other)?;
        let precision = self.precision.min(other.precision);
        let truncation = self.truncation().min(other.truncation());
        let modulus = pow_modulus(self.p, precision);
        let mut acc = vec![BigUint::zero(); truncation];
        for (i, a) in self.coeffs.iter().enumerate().take(truncation) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(truncation - i) {
                if b.is_zero() {
                    continue;
                }
                acc[i + j] += a.residue() * b.residue();
            }
        }
        let coeffs = acc
            .into_iter()
            .map(|r| PadicInt::from_reduced(self.p, precision, r % &modulus))
            .collect();
        Ok(LambdaElem {
            p: self.p,
            precision,
            coeffs,
        })
    }

    pub fn mul_scalar(&self, c: &PadicInt) -> Result<Self> {
        if c.p() != self.p {
            return Err(Error::PrimeMismatch {
                left: self.p,
                right: c.p(),
            });
        }
        let precision = self.precision.min(c.precision());
        let modulus = pow_modulus(self.p, precision);
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| PadicInt::from_reduced(self.p, precision, a.residue() * c.residue() % &modulus))
            .collect();
        Ok(LambdaElem {
            p: self.p,
            precision,
            coeffs,
        })
    }

    /// Drops the first `k` coefficients (division by `T^k`, forgetting the
    /// low part), padding with zeros at the top.
    pub(crate) fn shift_down(&self, k: usize) -> Self {
        let n = self.truncation();
        let mut coeffs: Vec<PadicInt> = self.coeffs[k.min(n)..].to_vec();
        coeffs.resize(n, PadicInt::zero(self.p, self.precision));
        LambdaElem {
            p: self.p,
            precision: self.precision,
            coeffs,
        }
    }

    /// Smallest coefficient valuation, i.e. the mu-invariant candidate;
    /// `None` when the series is zero at this precision.
    pub fn min_valuation(&self) -> Option<u32> {
        self.coeffs
            .iter()
            .filter_map(|c| c.valuation().finite())
            .min()
    }

    /// Exact division by `p^k` (every coefficient must have valuation `>= k`);
    /// the result is known at precision `M - k`.
    pub fn div_exact_p_pow(&self, k: u32) -> Result<Self> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.div_exact_p_pow(k))
            .collect::<Result<Vec<_>>>()?;
        LambdaElem::from_coeffs(coeffs)
    }

    /// Inverse of a unit series (constant term a unit), by Newton iteration;
    /// exact mod `(p^M, T^N)`.
    pub fn invert(&self) -> Result<Self> {
        if !self.coeffs[0].is_unit() {
            return Err(Error::NotAUnit);
        }
        let n = self.truncation();
        let mut inv = LambdaElem::zero(self.p, self.precision, n);
        inv.coeffs[0] = self.coeffs[0].invert()?;
        let two = LambdaElem::new(self.p, self.precision, n, &[2])?;
        // T-adic accuracy doubles each round
        let mut accuracy = 1usize;
        while accuracy < n {
            let correction = two.sub(&self.mul(&inv)?)?;
            inv = inv.mul(&correction)?;
            accuracy *= 2;
        }
        debug_assert!(self.mul(&inv)?.sub(&LambdaElem::one(self.p, self.precision, n))?.is_zero());
        Ok(inv)
    }

    /// `omega_n = (1+T)^(p^n) - 1`, truncated. Errors when the full degree
    /// `p^n` is not representable below the truncation.
    pub fn omega(p: u64, precision: u32, truncation: usize, n: u32) -> Result<Self> {
        let pn = BigUint::from(p).pow(n);
        let pn = u64::try_from(&pn).map_err(|_| Error::SizeLimit {
            what: "p^n",
            value: u64::MAX,
            limit: u64::MAX,
        })?;
        if pn as usize >= truncation {
            return Err(Error::TruncationTooShort {
                needed: pn as usize + 1,
                truncation,
            });
        }
        let modulus = pow_modulus(p, precision);
        let mut coeffs = Vec::with_capacity(truncation);
        coeffs.push(PadicInt::zero(p, precision));
        let mut c = BigUint::from(1u32);
        for k in 0..pn {
            c = c * (pn - k) / (k + 1);
            coeffs.push(PadicInt::new(p, precision, BigInt::from(&c % &modulus))?);
        }
        coeffs.resize(truncation, PadicInt::zero(p, precision));
        LambdaElem::from_coeffs(coeffs)
    }

    /// Weierstrass preparation: `self = p^mu * u * P` mod `(p^M, T^N)` with
    /// `u` a unit series and `P` distinguished of degree `lambda`.
    ///
    /// A truncated series is a polynomial, and the true unit of its
    /// preparation is again a polynomial, of degree `deg(f/p^mu) - lambda`
    /// (Hensel factorization into the coprime pair `T^lambda`, unit part mod
    /// `p`). The lift below solves `u * dP + P * du = e` one power of `p` at
    /// a time by splitting `u^(-1) e` at `T^lambda`; the split never folds
    /// high-degree terms downward, so every computed coefficient is the
    /// canonical one.
    pub fn weierstrass_prep(&self) -> Result<WeierstrassForm> {
        let mu = self.min_valuation().ok_or(Error::InsufficientPrecision {
            precision: self.precision,
        })?;
        let g = self.div_exact_p_pow(mu)?;
        let lambda = g
            .coeffs
            .iter()
            .position(|c| c.valuation() == Valuation::Finite(0))
            .ok_or(Error::TruncationTooShort {
                needed: g.truncation() + 1,
                truncation: g.truncation(),
            })?;
        let n = g.truncation();
        let p = g.p;
        let precision = g.precision;
        // degree of the polynomial representative; the unit has degree
        // exactly deg(g) - lambda
        let deg_g = g
            .coeffs
            .iter()
            .rposition(|c| !c.is_zero())
            .expect("nonzero after removing p^mu");
        let deg_u = deg_g - lambda;
        let mut poly = DistinguishedPoly::from_lower(
            p,
            precision,
            vec![PadicInt::zero(p, precision); lambda],
        )?;
        let mut unit = g.shift_down(lambda);
        for round in 0.. {
            let err = g.sub(&unit.mul(&poly.as_series(n)?)?)?;
            let Some(v) = err.min_valuation() else { break };
            assert!(round <= precision, "preparation failed to converge");
            // solve u0 * alpha + T^lambda * beta = e / p^v over F_p
            let h = err.div_exact_p_pow(v)?.shrink_to(1, n);
            let u0 = unit.shrink_to(1, n);
            let w = u0.invert()?.mul(&h)?;
            let mut delta_poly = Vec::with_capacity(lambda);
            for k in 0..lambda {
                delta_poly.push(scale_residue(w.coeff(k), v, precision));
            }
            let beta = u0.mul(&w.shift_down(lambda))?;
            let mut delta_unit = LambdaElem::zero(p, precision, n);
            for k in 0..=deg_u {
                delta_unit.coeffs[k] = scale_residue(beta.coeff(k), v, precision);
            }
            poly = poly.add_lower_raw(&delta_poly)?;
            unit = unit.add(&delta_unit)?;
        }
        debug_assert!(unit.coeffs[deg_u + 1..].iter().all(|c| c.is_zero()));
        Ok(WeierstrassForm {
            mu,
            distinguished: poly,
            unit,
        })
    }

    /// The mu- and lambda-invariants read off the prepared form.
    pub fn mu_lambda(&self) -> Result<(u32, u32)> {
        let form = self.weierstrass_prep()?;
        Ok((form.mu, form.distinguished.degree() as u32))
    }
}

/// Monic polynomial in `T` whose non-leading coefficients all have valuation
/// at least 1. The leading 1 is implicit; only the lower part is stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistinguishedPoly {
    p: u64,
    precision: u32,
    lower: Vec<PadicInt>,
}

impl DistinguishedPoly {
    pub fn from_lower(p: u64, precision: u32, lower: Vec<PadicInt>) -> Result<Self> {
        for c in &lower {
            if c.p() != p {
                return Err(Error::PrimeMismatch {
                    left: p,
                    right: c.p(),
                });
            }
            if !c.valuation().is_at_least(1) {
                return Err(Error::Invalid(
                    "distinguished polynomial needs all lower coefficients divisible by p".into(),
                ));
            }
        }
        Ok(DistinguishedPoly {
            p,
            precision,
            lower,
        })
    }

    pub fn from_ints(p: u64, precision: u32, lower: &[i64]) -> Result<Self> {
        let lower = lower
            .iter()
            .map(|&c| PadicInt::new(p, precision, c))
            .collect::<Result<Vec<_>>>()?;
        DistinguishedPoly::from_lower(p, precision, lower)
    }

    pub fn degree(&self) -> usize {
        self.lower.len()
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn lower(&self) -> &[PadicInt] {
        &self.lower
    }

    /// All coefficients including the leading 1, little-endian.
    pub fn monic_coeffs(&self) -> Vec<PadicInt> {
        let mut out = self.lower.clone();
        out.push(PadicInt::one(self.p, self.precision));
        out
    }

    pub fn as_series(&self, truncation: usize) -> Result<LambdaElem> {
        if truncation < self.degree() + 1 {
            return Err(Error::TruncationTooShort {
                needed: self.degree() + 1,
                truncation,
            });
        }
        let mut coeffs = self.monic_coeffs();
        coeffs.resize(truncation, PadicInt::zero(self.p, self.precision));
        LambdaElem::from_coeffs(coeffs)
    }

    /// Adds a correction (valuation >= 1, one entry per lower coefficient).
    fn add_lower_raw(&self, delta: &[PadicInt]) -> Result<Self> {
        let mut lower = Vec::with_capacity(self.lower.len());
        for (c, d) in self.lower.iter().zip(delta) {
            lower.push(c.add(d)?);
        }
        DistinguishedPoly::from_lower(self.p, self.precision, lower)
    }

    /// Resultant with a polynomial over the same ring (see
    /// [`resultant_padic`]).
    pub fn resultant(&self, other: &[PadicInt]) -> Result<PadicInt> {
        resultant_padic(&self.monic_coeffs(), other)
    }
}

/// The prepared factorization `p^mu * u * P` of a series. `u` and `P` are
/// known at the reduced precision `M - mu`; scaling by `p^mu` lifts the
/// product back to a well-defined value mod `p^M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeierstrassForm {
    pub mu: u32,
    pub distinguished: DistinguishedPoly,
    pub unit: LambdaElem,
}

impl WeierstrassForm {
    /// `p^mu * u * P` at precision `mu + precision(u)`: must reproduce the
    /// prepared series exactly.
    pub fn reconstruct(&self) -> Result<LambdaElem> {
        let n = self.unit.truncation();
        let prod = self.unit.mul(&self.distinguished.as_series(n)?)?;
        let coeffs = prod.coeffs().iter().map(|c| c.scale_p_pow(self.mu)).collect();
        LambdaElem::from_coeffs(coeffs)
    }

    pub fn lambda(&self) -> u32 {
        self.distinguished.degree() as u32
    }
}

/// Lifts a residue known mod `p` to the value `residue * p^v` at the target
/// precision.
fn scale_residue(c: &PadicInt, v: u32, precision: u32) -> PadicInt {
    PadicInt::from_reduced(c.p(), precision, c.residue() * pow_modulus(c.p(), v))
}

/// Division with remainder by a distinguished polynomial:
/// `w = q * P + r` mod `(p^M, T^N)` with `deg r < deg P`.
///
/// Uses `T^lambda = P - s` with `s` of valuation >= 1: substituting raises the
/// valuation of the tail each pass, so the loop settles within `M` passes.
pub fn divide_by_distinguished(
    w: &LambdaElem,
    poly: &DistinguishedPoly,
) -> Result<(LambdaElem, LambdaElem)> {
    let n = w.truncation();
    let lambda = poly.degree();
    if lambda >= n {
        return Err(Error::TruncationTooShort {
            needed: lambda + 1,
            truncation: n,
        });
    }
    // s = T^lambda - P = -(lower part)
    let mut s = LambdaElem::zero(w.p(), w.precision().min(poly.precision()), n);
    for (k, c) in poly.lower().iter().enumerate() {
        s.coeffs[k] = c.neg().reduce_precision(s.precision);
    }
    let mut quotient = LambdaElem::zero(w.p(), s.precision, n);
    let mut rem = w.shrink_to(s.precision, n);
    for pass in 0.. {
        let high = rem.shift_down(lambda);
        if high.is_zero() {
            break;
        }
        assert!(
            pass <= s.precision,
            "division by distinguished polynomial failed to settle"
        );
        quotient = quotient.add(&high)?;
        let mut low = rem.clone();
        for c in low.coeffs[lambda..].iter_mut() {
            *c = PadicInt::zero(w.p(), s.precision);
        }
        rem = low.add(&s.mul(&high)?)?;
    }
    Ok((quotient, rem))
}

/// Determinant of a square matrix over the truncated series ring, exact mod
/// `(p^M, T^N)`.
///
/// Uses the Berkowitz characteristic-polynomial scheme: division-free, so no
/// precision is lost to non-unit pivots (the truncated ring has zero
/// divisors, which rules out Bareiss-style pivot divisions).
pub fn det_lambda(rows: &[Vec<LambdaElem>]) -> Result<LambdaElem> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        let offending = rows
            .iter()
            .position(|r| r.len() != n)
            .unwrap_or(0);
        return Err(Error::DimensionMismatch {
            rows: n,
            cols: rows.get(offending).map(|r| r.len()).unwrap_or(0),
            offending,
        });
    }
    let p = rows[0][0].p();
    let mut precision = u32::MAX;
    let mut truncation = usize::MAX;
    for row in rows {
        for e in row {
            if e.p() != p {
                return Err(Error::PrimeMismatch {
                    left: p,
                    right: e.p(),
                });
            }
            precision = precision.min(e.precision());
            truncation = truncation.min(e.truncation());
        }
    }
    let a: Vec<Vec<LambdaElem>> = rows
        .iter()
        .map(|r| r.iter().map(|e| e.shrink_to(precision, truncation)).collect())
        .collect();
    let zero = LambdaElem::zero(p, precision, truncation);
    let one = LambdaElem::one(p, precision, truncation);

    // Berkowitz: iteratively extend the characteristic polynomial (descending
    // coefficients) of the leading principal submatrices.
    let mut charpoly = vec![one.clone(), a[0][0].neg()];
    for k in 1..n {
        // S_i = row_k . M^i . col_k for the k x k leading block M
        let mut w: Vec<LambdaElem> = (0..k).map(|i| a[i][k].clone()).collect();
        let mut toeplitz = vec![one.clone(), a[k][k].neg()];
        for _ in 0..k {
            let mut s = zero.clone();
            for (j, wj) in w.iter().enumerate() {
                s = s.add(&a[k][j].mul(wj)?)?;
            }
            toeplitz.push(s.neg());
            if toeplitz.len() < k + 2 {
                let mut next = vec![zero.clone(); k];
                for (i, row) in a.iter().enumerate().take(k) {
                    for (j, wj) in w.iter().enumerate() {
                        next[i] = next[i].add(&row[j].mul(wj)?)?;
                    }
                }
                w = next;
            }
        }
        let mut next = vec![zero.clone(); k + 2];
        for (i, slot) in next.iter_mut().enumerate() {
            for (j, v) in charpoly.iter().enumerate() {
                if i >= j && i - j < toeplitz.len() {
                    *slot = slot.add(&toeplitz[i - j].mul(v)?)?;
                }
            }
        }
        charpoly = next;
    }
    // char(0) = det(-A) = (-1)^n det(A)
    let constant = charpoly[n].clone();
    Ok(if n % 2 == 0 { constant } else { constant.neg() })
}

/// Resultant mod `p^M` as the Sylvester determinant of two polynomials over
/// `Z/p^M`; `f` must have a unit leading coefficient.
///
/// A zero answer only means "zero at this precision" — definitive verdicts
/// come from the exact-integer route in [`crate::exact`].
pub fn resultant_padic(f: &[PadicInt], g: &[PadicInt]) -> Result<PadicInt> {
    let f = trim_poly(f);
    let g = trim_poly(g);
    let (p, precision) = poly_params(&f, &g)?;
    let one = PadicInt::one(p, precision);
    match (f.len(), g.len()) {
        (0, _) | (_, 0) => Ok(PadicInt::zero(p, precision)),
        (1, n) => Ok(f[0].pow(n as u64 - 1)),
        (m, 1) => Ok(g[0].pow(m as u64 - 1)),
        (m, n) => {
            let lead = f.last().unwrap();
            if !lead.is_unit() {
                return Err(Error::NotAUnit);
            }
            // normalize f monic; Res(c*f1, g) = c^(deg g) Res(f1, g)
            let inv = lead.invert()?;
            let monic: Vec<PadicInt> = f
                .iter()
                .map(|c| c.mul(&inv))
                .collect::<Result<Vec<_>>>()?;
            let scale = lead.pow(n as u64 - 1);
            let reduced = rem_monic_padic(&g, &monic)?;
            let raw = if reduced.is_empty() {
                PadicInt::zero(p, precision)
            } else if reduced.len() == 1 {
                reduced[0].pow(m as u64 - 1)
            } else {
                let syl = sylvester_padic(&monic, &reduced, &one);
                det_padic(&syl)?
            };
            raw.mul(&scale)
        }
    }
}

fn trim_poly(f: &[PadicInt]) -> Vec<PadicInt> {
    let mut out = f.to_vec();
    while out.last().map(|c| c.is_zero()) == Some(true) {
        out.pop();
    }
    out
}

fn poly_params(f: &[PadicInt], g: &[PadicInt]) -> Result<(u64, u32)> {
    let all = f.iter().chain(g.iter());
    let mut p = None;
    let mut precision = u32::MAX;
    for c in all {
        match p {
            None => p = Some(c.p()),
            Some(q) if q != c.p() => {
                return Err(Error::PrimeMismatch {
                    left: q,
                    right: c.p(),
                })
            }
            _ => {}
        }
        precision = precision.min(c.precision());
    }
    p.map(|p| (p, precision))
        .ok_or_else(|| Error::Invalid("resultant of empty polynomials".into()))
}

/// Remainder of `f` mod a monic polynomial, over `Z/p^M`.
fn rem_monic_padic(f: &[PadicInt], monic: &[PadicInt]) -> Result<Vec<PadicInt>> {
    let d = monic.len() - 1;
    if d == 0 {
        return Ok(Vec::new());
    }
    let mut rem: Vec<PadicInt> = f.to_vec();
    while rem.len() > d {
        let top = rem.pop().unwrap();
        if top.is_zero() {
            continue;
        }
        let shift = rem.len() - d;
        for (k, c) in monic[..d].iter().enumerate() {
            rem[shift + k] = rem[shift + k].sub(&top.mul(c)?)?;
        }
    }
    Ok(trim_poly(&rem))
}

fn sylvester_padic(f: &[PadicInt], g: &[PadicInt], one: &PadicInt) -> Vec<Vec<PadicInt>> {
    let m = f.len() - 1;
    let n = g.len() - 1;
    let size = m + n;
    let zero = one.sub(one).unwrap();
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = vec![zero.clone(); size];
        for (k, c) in f.iter().rev().enumerate() {
            row[i + k] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![zero.clone(); size];
        for (k, c) in g.iter().rev().enumerate() {
            row[i + k] = c.clone();
        }
        rows.push(row);
    }
    rows
}

/// Division-free determinant over `Z/p^M` (Laplace expansion with memoized
/// column subsets); only reached for small Sylvester blocks.
fn det_padic(rows: &[Vec<PadicInt>]) -> Result<PadicInt> {
    let n = rows.len();
    let p = rows[0][0].p();
    let precision = rows
        .iter()
        .flat_map(|r| r.iter())
        .map(|c| c.precision())
        .min()
        .unwrap();
    let zero = PadicInt::zero(p, precision);
    let mut dp: Vec<Option<PadicInt>> = vec![None; 1 << n];
    dp[0] = Some(PadicInt::one(p, precision));
    for mask in 0..(1usize << n) - 1 {
        let Some(val) = dp[mask].clone() else { continue };
        if val.is_zero() && mask != 0 {
            // still need to propagate zeros to keep sums complete
        }
        let row = (mask as u32).count_ones() as usize;
        let mut seen = 0u32;
        for col in 0..n {
            let bit = 1usize << col;
            if mask & bit != 0 {
                seen += 1;
                continue;
            }
            // parity of inversions added by placing this column now
            let sign_neg = (row as u32 - seen) % 2 == 1;
            let term = val.mul(&rows[row][col])?;
            let term = if sign_neg { term.neg() } else { term };
            let slot = dp[mask | bit].get_or_insert_with(|| zero.clone());
            *slot = slot.add(&term)?;
        }
    }
    Ok(dp[(1 << n) - 1].clone().unwrap_or(zero))
}
