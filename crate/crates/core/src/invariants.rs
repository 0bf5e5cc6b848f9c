//! Characteristic polynomials of torsion modules over the Iwasawa algebra,
//! the twist by a character, and the finiteness criterion for coinvariants.
//!
//! A torsion module is presented either as an elementary sum (structure-
//! theorem data) or through a square presentation matrix. Its characteristic
//! polynomial is `p^mu * F(t)` with `F` monic of degree `lambda`. Twisting by
//! `kappa^i` substitutes `t -> kappa(gamma)^(-i) (1+t) - 1` and renormalizes
//! by `kappa(gamma)^(i*lambda)`; the coinvariants at level `n` are finite
//! exactly when `F` shares no root with `omega_n`, which the resultant
//! detects.

use std::collections::BTreeSet;
use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{int_valuation, omega_poly, poly_gcd, resultant, IntPoly};
use crate::padic::{Character, PadicInt};
use crate::series::{det_lambda, resultant_padic, LambdaElem};

/// The monic part of a characteristic polynomial, in one of two coefficient
/// modes: exact integers (definitive verdicts) or residues mod `p^M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MonicPoly {
    Exact(IntPoly),
    Modular(Vec<PadicInt>),
}

/// `p^mu * (monic polynomial of degree lambda)` in the variable `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharPoly {
    p: u64,
    mu: u32,
    monic: MonicPoly,
}

impl CharPoly {
    pub fn new_exact(p: u64, mu: u32, monic: IntPoly) -> Result<Self> {
        if !monic.is_monic() {
            return Err(Error::Invalid(
                "characteristic polynomial must have monic part".into(),
            ));
        }
        Ok(CharPoly {
            p,
            mu,
            monic: MonicPoly::Exact(monic),
        })
    }

    pub fn from_ints(p: u64, mu: u32, coeffs: &[i64]) -> Result<Self> {
        CharPoly::new_exact(p, mu, IntPoly::from_i64(coeffs))
    }

    pub fn new_modular(p: u64, mu: u32, coeffs: Vec<PadicInt>) -> Result<Self> {
        match coeffs.last() {
            Some(c) if c.is_one() => {}
            _ => {
                return Err(Error::Invalid(
                    "characteristic polynomial must have monic part".into(),
                ))
            }
        }
        for c in &coeffs {
            if c.p() != p {
                return Err(Error::PrimeMismatch {
                    left: p,
                    right: c.p(),
                });
            }
        }
        Ok(CharPoly {
            p,
            mu,
            monic: MonicPoly::Modular(coeffs),
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn mu(&self) -> u32 {
        self.mu
    }

    pub fn lambda(&self) -> u32 {
        match &self.monic {
            MonicPoly::Exact(f) => f.degree().unwrap_or(0) as u32,
            MonicPoly::Modular(c) => (c.len() - 1) as u32,
        }
    }

    pub fn monic(&self) -> &MonicPoly {
        &self.monic
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.monic, MonicPoly::Exact(_))
    }

    fn exact_monic(&self) -> Result<&IntPoly> {
        match &self.monic {
            MonicPoly::Exact(f) => Ok(f),
            MonicPoly::Modular(_) => Err(Error::ExactCoefficientsRequired),
        }
    }

    /// Monic coefficients reduced mod `p^M`, little-endian including the
    /// leading 1.
    pub fn modular_coeffs(&self, precision: u32) -> Result<Vec<PadicInt>> {
        match &self.monic {
            MonicPoly::Exact(f) => {
                let mut out = Vec::with_capacity(f.coeffs().len().max(1));
                for c in f.coeffs() {
                    out.push(PadicInt::new(self.p, precision, c.clone())?);
                }
                if out.is_empty() {
                    out.push(PadicInt::one(self.p, precision));
                }
                Ok(out)
            }
            MonicPoly::Modular(c) => Ok(c
                .iter()
                .map(|x| x.reduce_precision(precision.min(x.precision())))
                .collect()),
        }
    }

    pub fn precision(&self) -> Option<u32> {
        match &self.monic {
            MonicPoly::Exact(_) => None,
            MonicPoly::Modular(c) => c.iter().map(|x| x.precision()).min(),
        }
    }
}

/// Structure-theorem presentation of a finitely generated module:
/// `Lambda^r + sum Lambda/p^(m_i) + sum Lambda/(P_j^(e_j))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementaryModule {
    p: u64,
    rank: u32,
    pi_exponents: Vec<u32>,
    factors: Vec<(IntPoly, u32)>,
}

/// The three structure invariants of an elementary module.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModuleInvariants {
    pub rank: u32,
    pub mu: u32,
    pub lambda: u32,
}

impl ElementaryModule {
    pub fn new(
        p: u64,
        rank: u32,
        pi_exponents: Vec<u32>,
        factors: Vec<(IntPoly, u32)>,
    ) -> Result<Self> {
        if pi_exponents.iter().any(|&m| m == 0) {
            return Err(Error::Invalid("pi-power exponents must be positive".into()));
        }
        for (poly, e) in &factors {
            if *e == 0 {
                return Err(Error::Invalid("factor multiplicities must be positive".into()));
            }
            if poly.degree().unwrap_or(0) == 0 || !poly.is_distinguished(p) {
                return Err(Error::Invalid(
                    "factors must be distinguished polynomials of positive degree".into(),
                ));
            }
        }
        Ok(ElementaryModule {
            p,
            rank,
            pi_exponents,
            factors,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn pi_exponents(&self) -> &[u32] {
        &self.pi_exponents
    }

    pub fn factors(&self) -> &[(IntPoly, u32)] {
        &self.factors
    }

    /// `(rank, mu, lambda) = (r, sum m_i, sum e_j * deg P_j)`.
    pub fn invariants(&self) -> ModuleInvariants {
        ModuleInvariants {
            rank: self.rank,
            mu: self.pi_exponents.iter().sum(),
            lambda: self
                .factors
                .iter()
                .map(|(poly, e)| *e * poly.degree().unwrap_or(0) as u32)
                .sum(),
        }
    }

    /// `p^mu * prod P_j(t)^(e_j)`; `T` acts on `Lambda/(P_j)` with
    /// characteristic polynomial `P_j(t)` (companion matrix), so the monic
    /// part is the product of the factors. Torsion only.
    pub fn char_poly(&self) -> Result<CharPoly> {
        if self.rank > 0 {
            return Err(Error::NotTorsion { rank: self.rank });
        }
        let inv = self.invariants();
        let mut monic = IntPoly::one();
        for (poly, e) in &self.factors {
            monic = monic.mul(&poly.pow(*e));
        }
        CharPoly::new_exact(self.p, inv.mu, monic)
    }
}

/// Invariants of the cokernel presented by a square matrix over the series
/// ring: the prepared determinant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixInvariants {
    pub mu: u32,
    pub lambda: u32,
    pub char_poly: CharPoly,
}

/// `weierstrass_prep(det(matrix))`, reinterpreted as the invariants of the
/// cokernel module; the unit factor is discarded (characteristic ideals are
/// only defined up to units).
pub fn invariants_from_matrix(rows: &[Vec<LambdaElem>]) -> Result<MatrixInvariants> {
    let det = det_lambda(rows)?;
    let form = det.weierstrass_prep()?;
    let char_poly = CharPoly::new_modular(
        det.p(),
        form.mu,
        form.distinguished.monic_coeffs(),
    )?;
    Ok(MatrixInvariants {
        mu: form.mu,
        lambda: form.lambda(),
        char_poly,
    })
}

/// The twisted characteristic polynomial
/// `kappa(gamma)^(i*lambda) * F(kappa(gamma)^(-i) (1+t) - 1)`, computed by
/// exact substitution mod `p^M`. Defined only for `mu = 0`; the result is
/// monic of the same degree.
pub fn twist_char_poly(f: &CharPoly, kappa: &Character, i: i64) -> Result<CharPoly> {
    if f.mu() > 0 {
        return Err(Error::MuNonzero { mu: f.mu() });
    }
    if f.p() != kappa.p() {
        return Err(Error::PrimeMismatch {
            left: f.p(),
            right: kappa.p(),
        });
    }
    if i == 0 {
        return Ok(f.clone());
    }
    let precision = match f.precision() {
        Some(m) => m.min(kappa.precision()),
        None => kappa.precision(),
    };
    let coeffs = f.modular_coeffs(precision)?;
    let lambda = coeffs.len() - 1;
    let a = kappa.char_power(-i);
    let scale = kappa.char_power(i.checked_mul(lambda as i64).ok_or_else(|| {
        Error::Invalid("twist exponent overflow".into())
    })?);
    // substitute s(t) = a(1+t) - 1 by Horner over polynomials in t
    let s0 = a.sub(&PadicInt::one(f.p(), precision))?;
    let mut acc: Vec<PadicInt> = vec![coeffs[lambda].clone()];
    for k in (0..lambda).rev() {
        // acc = acc * s + c_k
        let mut next = vec![PadicInt::zero(f.p(), precision); acc.len() + 1];
        for (d, c) in acc.iter().enumerate() {
            next[d] = next[d].add(&c.mul(&s0)?)?;
            next[d + 1] = next[d + 1].add(&c.mul(&a)?)?;
        }
        next[0] = next[0].add(&coeffs[k])?;
        acc = next;
    }
    let twisted: Vec<PadicInt> = acc
        .into_iter()
        .map(|c| c.mul(&scale))
        .collect::<Result<Vec<_>>>()?;
    debug_assert!(twisted.last().unwrap().is_one());
    CharPoly::new_modular(f.p(), 0, twisted)
}

/// Verdict on the finiteness of the coinvariants at a level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Finiteness {
    Finite,
    Infinite,
    Inconclusive,
}

/// Verdict mode: exact integer arithmetic (definitive) or mod `p^M`
/// (can only certify `Finite`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FinitenessMode {
    Exact,
    Precision,
}

/// Whether the level-`n` coinvariants of a module with this characteristic
/// polynomial are finite: `F` must share no root `zeta - 1` with `omega_n`,
/// i.e. `Res(F, omega_n) != 0`.
///
/// Only the monic part enters: the coinvariants are finite exactly when those
/// of the module by its `p`-power torsion are.
pub fn coinvariants_finite(f: &CharPoly, n: u32, mode: FinitenessMode) -> Result<Finiteness> {
    match mode {
        FinitenessMode::Exact => {
            let monic = f.exact_monic()?;
            let monic = if monic.is_zero() {
                IntPoly::one()
            } else {
                monic.clone()
            };
            let omega = omega_poly(f.p(), n);
            let res = resultant(&monic, &omega);
            if res.is_zero() {
                // cross-check: a vanishing resultant must come from a common factor
                debug_assert!(poly_gcd(&monic, &omega).degree().unwrap_or(0) > 0);
                Ok(Finiteness::Infinite)
            } else {
                Ok(Finiteness::Finite)
            }
        }
        FinitenessMode::Precision => {
            let precision = f.precision().ok_or(Error::ModularCoefficientsRequired)?;
            let coeffs = f.modular_coeffs(precision)?;
            let pn = checked_p_pow(f.p(), n)?;
            let omega = LambdaElem::omega(f.p(), precision, pn as usize + 2, n)?;
            let res = resultant_padic(&coeffs, omega.coeffs())?;
            if res.is_zero() {
                Ok(Finiteness::Inconclusive)
            } else {
                Ok(Finiteness::Finite)
            }
        }
    }
}

/// The set of twist exponents `i` in the range for which some level
/// `n <= n_max` has infinite coinvariants. Exact mode only; the character is
/// given by its exact integer value `kappa(gamma)` and must be non-trivial.
pub fn exceptional_twists(
    f: &CharPoly,
    kappa_gamma: &BigInt,
    range: RangeInclusive<i64>,
    n_max: u32,
) -> Result<BTreeSet<i64>> {
    if f.mu() > 0 {
        return Err(Error::MuNonzero { mu: f.mu() });
    }
    let monic = f.exact_monic()?;
    let q = if f.p() == 2 { 4u64 } else { f.p() };
    if !(kappa_gamma - BigInt::one()).mod_floor(&BigInt::from(q)).is_zero() {
        return Err(Error::NotPrincipalUnit { q });
    }
    if kappa_gamma.is_one() {
        return Err(Error::TrivialCharacter);
    }
    let mut out = BTreeSet::new();
    if monic.degree().unwrap_or(0) == 0 {
        // no roots at all: every twist has finite coinvariants at every level
        return Ok(out);
    }
    for i in range {
        for n in 0..=n_max {
            if twisted_coinvariants_infinite(monic, f.p(), kappa_gamma, i, n)? {
                out.insert(i);
                break;
            }
        }
    }
    Ok(out)
}

/// Exact test that the twist by `kappa^i` has infinite coinvariants at level
/// `n`.
///
/// The twisted polynomial `F_i` has a root `zeta - 1` iff `F` has a root `x`
/// with `(kappa(gamma)^i (1+x))^(p^n) = 1`; clearing the unit
/// `kappa(gamma)^(i p^n)` turns this into an exact integer resultant with
/// `a^(i p^n) (1+x)^(p^n) - 1` (or `(1+x)^(p^n) - a^(-i p^n)` for `i < 0`),
/// which vanishes iff the twisted resultant with `omega_n` does.
fn twisted_coinvariants_infinite(
    monic: &IntPoly,
    p: u64,
    a: &BigInt,
    i: i64,
    n: u32,
) -> Result<bool> {
    let pn = checked_p_pow(p, n)?;
    let binom = omega_poly(p, n).add(&IntPoly::one()); // (1+x)^(p^n)
    let power = a.pow(
        u32::try_from(i.unsigned_abs().checked_mul(pn).ok_or(Error::SizeLimit {
            what: "twist exponent * p^n",
            value: u64::MAX,
            limit: u64::MAX,
        })?)
        .map_err(|_| Error::SizeLimit {
            what: "twist exponent * p^n",
            value: i.unsigned_abs().saturating_mul(pn),
            limit: u32::MAX as u64,
        })?,
    );
    let criterion = if i >= 0 {
        binom.mul_scalar(&power).sub(&IntPoly::one())
    } else {
        binom.sub(&IntPoly::constant(power))
    };
    Ok(resultant(monic, &criterion).is_zero())
}

/// Length over `Z_p` of the level-`n` coinvariants of the cyclic module with
/// this characteristic polynomial: `v_p(Res(F, omega_n))` for the monic part
/// plus `mu * p^n` for the `p`-power part. Requires the coinvariants finite.
pub fn coinvariant_length(f: &CharPoly, n: u32) -> Result<u64> {
    let monic = f.exact_monic()?;
    let pn = checked_p_pow(f.p(), n)?;
    let monic_len = if monic.degree().unwrap_or(0) == 0 {
        0
    } else {
        let res = resultant(monic, &omega_poly(f.p(), n));
        match int_valuation(&res, f.p()) {
            None => return Err(Error::NotFinite),
            Some(v) => v,
        }
    };
    Ok(monic_len + f.mu() as u64 * pn)
}

pub(crate) fn checked_p_pow(p: u64, n: u32) -> Result<u64> {
    let mut acc: u64 = 1;
    for _ in 0..n {
        acc = acc.checked_mul(p).ok_or(Error::SizeLimit {
            what: "p^n",
            value: u64::MAX,
            limit: u64::MAX,
        })?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tp(p: u64, mu: u32, coeffs: &[i64]) -> CharPoly {
        CharPoly::from_ints(p, mu, coeffs).unwrap()
    }

    #[test]
    fn invariants_unfold_definition() {
        let p = 3;
        let e = ElementaryModule::new(p, 0, vec![2], vec![]).unwrap();
        let inv = e.invariants();
        assert_eq!((inv.rank, inv.mu, inv.lambda), (0, 2, 0));

        let free = ElementaryModule::new(p, 1, vec![], vec![]).unwrap();
        let inv = free.invariants();
        assert_eq!((inv.rank, inv.mu, inv.lambda), (1, 0, 0));

        let mixed = ElementaryModule::new(
            p,
            0,
            vec![1, 1],
            vec![(IntPoly::from_i64(&[3, 1]), 2)],
        )
        .unwrap();
        let inv = mixed.invariants();
        assert_eq!((inv.rank, inv.mu, inv.lambda), (0, 2, 2));
    }

    #[test]
    fn char_poly_examples() {
        let p = 3;
        let pure_mu = ElementaryModule::new(p, 0, vec![2], vec![]).unwrap();
        let f = pure_mu.char_poly().unwrap();
        assert_eq!(f.mu(), 2);
        assert_eq!(f.lambda(), 0);

        let linear = ElementaryModule::new(p, 0, vec![], vec![(IntPoly::from_i64(&[3, 1]), 1)])
            .unwrap();
        let f = linear.char_poly().unwrap();
        assert_eq!(f.mu(), 0);
        assert_eq!(f.monic(), &MonicPoly::Exact(IntPoly::from_i64(&[3, 1])));

        let free = ElementaryModule::new(p, 1, vec![], vec![]).unwrap();
        assert_eq!(free.char_poly(), Err(Error::NotTorsion { rank: 1 }));
    }

    #[test]
    fn matrix_invariants_examples() {
        let p = 3;
        let t_plus_p = LambdaElem::new(p, 6, 8, &[3, 1]).unwrap();
        let inv = invariants_from_matrix(&[vec![t_plus_p]]).unwrap();
        assert_eq!((inv.mu, inv.lambda), (0, 1));

        let t = LambdaElem::new(p, 6, 8, &[0, 1]).unwrap();
        let pc = LambdaElem::new(p, 6, 8, &[3]).unwrap();
        let z = LambdaElem::zero(p, 6, 8);
        let inv =
            invariants_from_matrix(&[vec![pc, z.clone()], vec![z, t]]).unwrap();
        assert_eq!((inv.mu, inv.lambda), (1, 1));
    }

    #[test]
    fn upper_triangular_invariants_add_along_diagonal() {
        let p = 3;
        let diag = [
            LambdaElem::new(p, 6, 10, &[3, 1]).unwrap(),
            LambdaElem::new(p, 6, 10, &[3, 6, 4, 1]).unwrap(),
            LambdaElem::new(p, 6, 10, &[9, 0, 3, 1]).unwrap(),
        ];
        let junk = LambdaElem::new(p, 6, 10, &[1, 2, 1]).unwrap();
        let z = LambdaElem::zero(p, 6, 10);
        let m = vec![
            vec![diag[0].clone(), junk.clone(), junk.clone()],
            vec![z.clone(), diag[1].clone(), junk.clone()],
            vec![z.clone(), z.clone(), diag[2].clone()],
        ];
        let inv = invariants_from_matrix(&m).unwrap();
        let mut mu = 0;
        let mut lambda = 0;
        for d in &diag {
            let (m_i, l_i) = d.mu_lambda().unwrap();
            mu += m_i;
            lambda += l_i;
        }
        assert_eq!((inv.mu, inv.lambda), (mu, lambda));
    }

    #[test]
    fn twist_examples() {
        let p = 3;
        let kappa = Character::new(p, 6, 1 + p as i64).unwrap();
        // F = t, i = 1: (1+p)((1+p)^(-1)(1+t) - 1) = t - p
        let t = tp(p, 0, &[0, 1]);
        let twisted = twist_char_poly(&t, &kappa, 1).unwrap();
        assert_eq!(
            twisted.modular_coeffs(6).unwrap(),
            vec![
                PadicInt::new(p, 6, -3).unwrap(),
                PadicInt::one(p, 6)
            ]
        );
        // i = 0 is the identity
        let same = twist_char_poly(&t, &kappa, 0).unwrap();
        assert_eq!(same, t);
        // F = t - p, i = -1 gives back t
        let t_minus_p = tp(p, 0, &[-3, 1]);
        let back = twist_char_poly(&t_minus_p, &kappa, -1).unwrap();
        assert_eq!(
            back.modular_coeffs(6).unwrap(),
            vec![PadicInt::zero(p, 6), PadicInt::one(p, 6)]
        );
    }

    #[test]
    fn twist_rejects_positive_mu() {
        let p = 3;
        let kappa = Character::new(p, 4, 4).unwrap();
        let f = tp(p, 1, &[0, 1]);
        assert_eq!(
            twist_char_poly(&f, &kappa, 1),
            Err(Error::MuNonzero { mu: 1 })
        );
    }

    #[test]
    fn finiteness_examples() {
        let p = 3;
        // F = t at n = 0: Lambda/(T) has infinite coinvariants
        let t = tp(p, 0, &[0, 1]);
        assert_eq!(
            coinvariants_finite(&t, 0, FinitenessMode::Exact).unwrap(),
            Finiteness::Infinite
        );
        // F = t - p at n = 1: Res = 63 != 0
        let f = tp(p, 0, &[-3, 1]);
        assert_eq!(
            coinvariants_finite(&f, 1, FinitenessMode::Exact).unwrap(),
            Finiteness::Finite
        );
        // zero at precision is not exact zero
        let modular = CharPoly::new_modular(
            p,
            0,
            vec![PadicInt::zero(p, 4), PadicInt::one(p, 4)],
        )
        .unwrap();
        assert_eq!(
            coinvariants_finite(&modular, 0, FinitenessMode::Precision).unwrap(),
            Finiteness::Inconclusive
        );
        assert_eq!(
            coinvariants_finite(&modular, 0, FinitenessMode::Exact),
            Err(Error::ExactCoefficientsRequired)
        );
    }

    #[test]
    fn exceptional_twist_examples() {
        let p = 3u64;
        let kappa = BigInt::from(1 + p);
        let f = tp(p, 0, &[-(p as i64), 1]);
        let set = exceptional_twists(&f, &kappa, -5..=5, 3).unwrap();
        assert_eq!(set, BTreeSet::from([-1]));

        let unit = tp(p, 0, &[1]);
        assert!(exceptional_twists(&unit, &kappa, -5..=5, 3)
            .unwrap()
            .is_empty());

        // F = t(t - p): root 0 exceptional at i = 0, root p at i = -1
        let f2 = tp(p, 0, &[0, -(p as i64), 1]);
        let set = exceptional_twists(&f2, &kappa, -5..=5, 3).unwrap();
        assert_eq!(set, BTreeSet::from([0, -1]));

        assert_eq!(
            exceptional_twists(&f, &BigInt::one(), -5..=5, 3),
            Err(Error::TrivialCharacter)
        );
    }

    #[test]
    fn coinvariant_length_examples() {
        let p = 3;
        let f = tp(p, 0, &[-3, 1]);
        assert_eq!(coinvariant_length(&f, 1).unwrap(), 2); // v_3(63)
        assert_eq!(coinvariant_length(&f, 0).unwrap(), 1); // v_3(3)
        assert_eq!(coinvariant_length(&tp(p, 0, &[1]), 2).unwrap(), 0);
        assert_eq!(
            coinvariant_length(&tp(p, 0, &[0, 1]), 0),
            Err(Error::NotFinite)
        );
        // mu contributes mu * p^n
        assert_eq!(coinvariant_length(&tp(p, 2, &[1]), 1).unwrap(), 6);
    }
}
