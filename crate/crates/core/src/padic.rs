//! Exact arithmetic in `Z/p^M` with explicit precision and valuation semantics.
//!
//! A [`PadicInt`] is an integer known modulo `p^M`; the exponent `M` is the
//! precision and travels with the value. Arithmetic between two values
//! requires the same prime and combines precisions pessimistically as
//! `min(M1, M2)`, so results are always exact at their stated precision.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Deterministic primality check for the word-sized primes this library uses.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// p-adic valuation of a residue known modulo `p^M`.
///
/// A zero residue is indistinguishable from anything of valuation `>= M`, so
/// the valuation of zero is the symbolic `AtLeast(M)`, never a number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valuation {
    Finite(u32),
    AtLeast(u32),
}

impl Valuation {
    /// The exact valuation, when resolved.
    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::AtLeast(_) => None,
        }
    }

    /// Whether the valuation is known to be `>= bound`.
    pub fn is_at_least(self, bound: u32) -> bool {
        match self {
            Valuation::Finite(v) => v >= bound,
            Valuation::AtLeast(m) => m >= bound,
        }
    }
}

/// An integer known modulo `p^M`, stored as its canonical residue in
/// `[0, p^M)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicInt {
    p: u64,
    precision: u32,
    residue: BigUint,
}

impl PadicInt {
    /// Builds a value from any integer, normalizing it into `[0, p^M)`.
    pub fn new(p: u64, precision: u32, value: impl Into<BigInt>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotAPrime(p));
        }
        if precision == 0 {
            return Err(Error::Invalid("precision must be at least 1".into()));
        }
        let modulus = BigInt::from(pow_modulus(p, precision));
        let r = value.into().mod_floor(&modulus);
        let (_, residue) = r.into_parts();
        Ok(PadicInt {
            p,
            precision,
            residue,
        })
    }

    /// Internal constructor for a residue already reduced into `[0, p^M)`.
    pub(crate) fn from_reduced(p: u64, precision: u32, residue: BigUint) -> Self {
        debug_assert!(residue < pow_modulus(p, precision));
        PadicInt {
            p,
            precision,
            residue,
        }
    }

    pub fn zero(p: u64, precision: u32) -> Self {
        PadicInt {
            p,
            precision,
            residue: BigUint::zero(),
        }
    }

    pub fn one(p: u64, precision: u32) -> Self {
        PadicInt {
            p,
            precision,
            residue: BigUint::one(),
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// The canonical representative in `[0, p^M)`.
    pub fn residue(&self) -> &BigUint {
        &self.residue
    }

    pub fn modulus(&self) -> BigUint {
        pow_modulus(self.p, self.precision)
    }

    pub fn is_zero(&self) -> bool {
        self.residue.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.residue.is_one()
    }

    pub fn is_unit(&self) -> bool {
        !self.residue.is_zero() && !(&self.residue % self.p).is_zero()
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

    /// Exact sum mod `p^min(M1, M2)`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_prime(other)?;
        let precision = self.precision.min(other.precision);
        let modulus = pow_modulus(self.p, precision);
        let residue = (&self.residue + &other.residue) % &modulus;
        Ok(PadicInt {
            p: self.p,
            precision,
            residue,
        })
    }

    /// Exact product mod `p^min(M1, M2)`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_prime(other)?;
        let precision = self.precision.min(other.precision);
        let modulus = pow_modulus(self.p, precision);
        let residue = (&self.residue * &other.residue) % &modulus;
        Ok(PadicInt {
            p: self.p,
            precision,
            residue,
        })
    }

    pub fn neg(&self) -> Self {
        if self.residue.is_zero() {
            return self.clone();
        }
        let modulus = self.modulus();
        PadicInt {
            p: self.p,
            precision: self.precision,
            residue: modulus - &self.residue,
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Largest `e < M` with `p^e | r`, or `AtLeast(M)` when the residue is
    /// zero at this precision.
    pub fn valuation(&self) -> Valuation {
        if self.residue.is_zero() {
            return Valuation::AtLeast(self.precision);
        }
        let p = BigUint::from(self.p);
        let mut v = 0u32;
        let mut r = self.residue.clone();
        loop {
            let (q, rem) = r.div_rem(&p);
            if !rem.is_zero() {
                break;
            }
            r = q;
            v += 1;
        }
        debug_assert!(v < self.precision);
        Valuation::Finite(v)
    }

    /// Multiplicative inverse mod `p^M`, defined exactly for units.
    pub fn invert(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NotAUnit);
        }
        let modulus = BigInt::from(self.modulus());
        let a = BigInt::from_biguint(Sign::Plus, self.residue.clone());
        let ext = a.extended_gcd(&modulus);
        debug_assert!(ext.gcd.is_one());
        let inv = ext.x.mod_floor(&modulus);
        let (_, residue) = inv.into_parts();
        Ok(PadicInt {
            p: self.p,
            precision: self.precision,
            residue,
        })
    }

    /// `self^e` by square-and-multiply.
    pub fn pow(&self, e: u64) -> Self {
        let modulus = self.modulus();
        let residue = self.residue.modpow(&BigUint::from(e), &modulus);
        PadicInt {
            p: self.p,
            precision: self.precision,
            residue,
        }
    }

    /// `self^e` for signed `e`, inverting first when `e < 0`.
    pub fn pow_signed(&self, e: i64) -> Result<Self> {
        if e >= 0 {
            Ok(self.pow(e as u64))
        } else {
            Ok(self.invert()?.pow(e.unsigned_abs()))
        }
    }

    /// Forgets information: reduces to a smaller (or equal) precision.
    pub fn reduce_precision(&self, precision: u32) -> Self {
        assert!(precision >= 1 && precision <= self.precision);
        if precision == self.precision {
            return self.clone();
        }
        let modulus = pow_modulus(self.p, precision);
        PadicInt {
            p: self.p,
            precision,
            residue: &self.residue % &modulus,
        }
    }

    /// Exact division by `p^k`; requires valuation `>= k` and returns a value
    /// at precision `M - k`.
    pub fn div_exact_p_pow(&self, k: u32) -> Result<Self> {
        if k == 0 {
            return Ok(self.clone());
        }
        if k >= self.precision {
            return Err(Error::InsufficientPrecision {
                precision: self.precision,
            });
        }
        if !self.valuation().is_at_least(k) {
            return Err(Error::NotAUnit);
        }
        let pk = pow_modulus(self.p, k);
        PadicInt::new(self.p, self.precision - k, BigInt::from(&self.residue / pk))
    }

    /// `p^k * self`, lifted into precision `M + k` (exact: the residue is a
    /// well-defined representative of the product there).
    pub fn scale_p_pow(&self, k: u32) -> Self {
        if k == 0 {
            return self.clone();
        }
        let precision = self.precision + k;
        let residue = &self.residue * pow_modulus(self.p, k);
        debug_assert!(residue < pow_modulus(self.p, precision));
        PadicInt {
            p: self.p,
            precision,
            residue,
        }
    }
}

pub(crate) fn pow_modulus(p: u64, precision: u32) -> BigUint {
    BigUint::from(p).pow(precision)
}

/// A continuous character `kappa` of the procyclic group, recorded through its
/// value `kappa(gamma)` at the fixed topological generator. The value must lie
/// in `1 + qZ_p` with `q = p` for odd `p` and `q = 4` for `p = 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Character {
    p: u64,
    precision: u32,
    kappa_gamma: PadicInt,
}

impl Character {
    pub fn new(p: u64, precision: u32, kappa_gamma: impl Into<BigInt>) -> Result<Self> {
        let kappa_gamma = PadicInt::new(p, precision, kappa_gamma)?;
        let q = if p == 2 { 4 } else { p };
        let min_val = if p == 2 { 2 } else { 1 };
        if p == 2 && precision < 2 {
            // cannot even see the residue mod 4
            return Err(Error::InsufficientPrecision { precision });
        }
        let offset = kappa_gamma.sub(&PadicInt::one(p, precision))?;
        let ok = match offset.valuation() {
            Valuation::Finite(v) => v >= min_val,
            Valuation::AtLeast(_) => true,
        };
        if !ok {
            return Err(Error::NotPrincipalUnit { q });
        }
        Ok(Character {
            p,
            precision,
            kappa_gamma,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn q(&self) -> u64 {
        if self.p == 2 {
            4
        } else {
            self.p
        }
    }

    pub fn kappa_gamma(&self) -> &PadicInt {
        &self.kappa_gamma
    }

    /// Trivial at this precision, i.e. `kappa(gamma) = 1 mod p^M`.
    pub fn is_trivial(&self) -> bool {
        self.kappa_gamma.is_one()
    }

    /// `kappa(gamma)^i mod p^M` for any integer `i`.
    pub fn char_power(&self, i: i64) -> PadicInt {
        self.kappa_gamma
            .pow_signed(i)
            .expect("kappa(gamma) is a unit by construction")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pi(p: u64, m: u32, v: i64) -> PadicInt {
        PadicInt::new(p, m, v).unwrap()
    }

    #[test]
    fn modular_arithmetic_examples() {
        // 4 + 7 = 2 mod 9
        assert_eq!(pi(3, 2, 4).add(&pi(3, 2, 7)).unwrap(), pi(3, 2, 2));
        // 0 * x = 0
        assert_eq!(pi(5, 3, 0).mul(&pi(5, 3, 77)).unwrap(), pi(5, 3, 0));
        // 18 * 3 = 54 mod 81
        assert_eq!(pi(3, 4, 18).mul(&pi(3, 4, 3)).unwrap(), pi(3, 4, 54));
    }

    #[test]
    fn precision_combines_as_min() {
        let x = pi(3, 4, 80);
        let y = pi(3, 2, 1);
        let s = x.add(&y).unwrap();
        assert_eq!(s.precision(), 2);
        assert_eq!(s, pi(3, 2, 81));
    }

    #[test]
    fn prime_mismatch_is_rejected() {
        assert_eq!(
            pi(3, 2, 1).add(&pi(5, 2, 1)),
            Err(Error::PrimeMismatch { left: 3, right: 5 })
        );
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(pi(3, 4, 18).valuation(), Valuation::Finite(2));
        assert_eq!(pi(3, 4, 0).valuation(), Valuation::AtLeast(4));
        assert_eq!(pi(3, 4, 7).valuation(), Valuation::Finite(0));
    }

    #[test]
    fn invert_examples() {
        assert_eq!(pi(7, 3, 1).invert().unwrap(), pi(7, 3, 1));
        // 2 * 63 = 126 = 1 mod 125
        assert_eq!(pi(5, 3, 2).invert().unwrap(), pi(5, 3, 63));
        assert_eq!(pi(5, 3, 5).invert(), Err(Error::NotAUnit));
    }

    #[test]
    fn char_power_examples() {
        let k = Character::new(3, 2, 4).unwrap();
        assert_eq!(k.char_power(0), pi(3, 2, 1));
        // 4 * 7 = 28 = 1 mod 9
        assert_eq!(k.char_power(-1), pi(3, 2, 7));
        // 4^2 = 16 = 7 mod 9
        assert_eq!(k.char_power(2), pi(3, 2, 7));
    }

    #[test]
    fn char_power_inverse_pairs() {
        for p in [2u64, 3, 5] {
            let kg = if p == 2 { 5 } else { 1 + p as i64 };
            let k = Character::new(p, 6, kg).unwrap();
            for i in -10..=10i64 {
                let prod = k.char_power(i).mul(&k.char_power(-i)).unwrap();
                assert!(prod.is_one(), "p={p} i={i}");
            }
        }
    }

    #[test]
    fn character_rejects_bad_values() {
        // p = 2 requires kappa(gamma) = 1 mod 4
        assert_eq!(
            Character::new(2, 4, 3),
            Err(Error::NotPrincipalUnit { q: 4 })
        );
        assert!(Character::new(2, 4, 5).is_ok());
        assert_eq!(
            Character::new(3, 4, 5),
            Err(Error::NotPrincipalUnit { q: 3 })
        );
        assert!(Character::new(3, 4, 4).is_ok());
    }

    #[test]
    fn negative_values_normalize() {
        assert_eq!(pi(3, 2, -1), pi(3, 2, 8));
    }

    #[test]
    fn div_and_scale_p_pow_round_trip() {
        let x = pi(3, 4, 18);
        let y = x.div_exact_p_pow(2).unwrap();
        assert_eq!(y, pi(3, 2, 2));
        assert_eq!(y.scale_p_pow(2), pi(3, 4, 18));
    }

    #[test]
    fn rejects_composite_modulus_base() {
        assert_eq!(PadicInt::new(6, 2, 1), Err(Error::NotAPrime(6)));
    }

    fn any_padic(p: u64, m: u32) -> impl Strategy<Value = PadicInt> {
        (0u64..u64::MAX).prop_map(move |v| PadicInt::new(p, m, v as i64).unwrap())
    }

    proptest! {
        #[test]
        fn ring_axioms_mod_9(
            a in any_padic(3, 2), b in any_padic(3, 2), c in any_padic(3, 2)
        ) {
            let ab_c = a.add(&b).unwrap().add(&c).unwrap();
            let a_bc = a.add(&b.add(&c).unwrap()).unwrap();
            prop_assert_eq!(ab_c, a_bc);
            let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
            let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        }

        #[test]
        fn valuation_is_additive(a in any_padic(5, 6), b in any_padic(5, 6)) {
            if let (Valuation::Finite(va), Valuation::Finite(vb)) =
                (a.valuation(), b.valuation())
            {
                if va + vb < 6 {
                    prop_assert_eq!(
                        a.mul(&b).unwrap().valuation(),
                        Valuation::Finite(va + vb)
                    );
                }
            }
        }

        #[test]
        fn inverse_is_exact(a in any_padic(7, 5)) {
            if a.is_unit() {
                let inv = a.invert().unwrap();
                prop_assert!(a.mul(&inv).unwrap().is_one());
            }
        }
    }
}
