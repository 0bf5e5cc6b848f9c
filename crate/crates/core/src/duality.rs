//! Finite-level group rings `(Z/p^m)[G_n]` for the cyclic quotients `G_n` of
//! the procyclic group, their Pontryagin duals, and the maps between levels.
//!
//! `G_n` is identified with `Z/p^n` through the fixed generator; every map is
//! index arithmetic. A dual element stores the values `chi(g)`, already
//! pushed through the identification `[p^m]: p^(-m)Z/Z -> Z/p^m`, which makes
//! the self-duality `phi` coordinate-preserving. Dual maps are nevertheless
//! computed the long way round (apply the map to each basis vector, pair with
//! `chi`, convert denominators), so the commuting-diagram checks compare two
//! genuinely different computation routes.

use num_bigint::BigUint;
use num_traits::Zero;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::invariants::checked_p_pow;
use crate::series::LambdaElem;

const MAX_ORDER: u64 = 1 << 20;
const MAX_MODULUS: u64 = 1 << 31;
const ENUMERATION_CAP: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Params {
    p: u64,
    level: u32,
    exponent: u32,
}

impl Params {
    fn new(p: u64, level: u32, exponent: u32) -> Result<Self> {
        if !crate::padic::is_prime(p) {
            return Err(Error::NotAPrime(p));
        }
        if exponent == 0 {
            return Err(Error::Invalid("exponent must be at least 1".into()));
        }
        let params = Params { p, level, exponent };
        if params.order() > MAX_ORDER {
            return Err(Error::SizeLimit {
                what: "p^n",
                value: params.order(),
                limit: MAX_ORDER,
            });
        }
        if params.modulus() > MAX_MODULUS {
            return Err(Error::SizeLimit {
                what: "p^m",
                value: params.modulus(),
                limit: MAX_MODULUS,
            });
        }
        Ok(params)
    }

    fn order(&self) -> u64 {
        self.p.pow(self.level)
    }

    fn modulus(&self) -> u64 {
        self.p.pow(self.exponent)
    }

    fn check(&self, other: &Params) -> Result<()> {
        if self != other {
            return Err(Error::LevelMismatch {
                pl: self.p,
                nl: self.level,
                ml: self.exponent,
                pr: other.p,
                nr: other.level,
                mr: other.exponent,
            });
        }
        Ok(())
    }
}

/// Element of `(Z/p^m)[G_n]`: a coefficient vector of length `p^n` indexed by
/// the powers of the fixed generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupRingElem {
    params: Params,
    coeffs: Vec<u64>,
}

impl GroupRingElem {
    pub fn new(p: u64, level: u32, exponent: u32, coeffs: Vec<i64>) -> Result<Self> {
        let params = Params::new(p, level, exponent)?;
        if coeffs.len() as u64 != params.order() {
            return Err(Error::DimensionMismatch {
                rows: params.order() as usize,
                cols: coeffs.len(),
                offending: 0,
            });
        }
        let pm = params.modulus() as i128;
        let coeffs = coeffs
            .iter()
            .map(|&c| (((c as i128 % pm) + pm) % pm) as u64)
            .collect();
        Ok(GroupRingElem { params, coeffs })
    }

    pub fn zero(p: u64, level: u32, exponent: u32) -> Result<Self> {
        let params = Params::new(p, level, exponent)?;
        Ok(GroupRingElem {
            params,
            coeffs: vec![0; params.order() as usize],
        })
    }

    /// The basis element for the `g`-th power of the generator.
    pub fn delta(p: u64, level: u32, exponent: u32, g: u64) -> Result<Self> {
        let mut out = GroupRingElem::zero(p, level, exponent)?;
        let idx = (g % out.params.order()) as usize;
        out.coeffs[idx] = 1;
        Ok(out)
    }

    pub fn one(p: u64, level: u32, exponent: u32) -> Result<Self> {
        GroupRingElem::delta(p, level, exponent, 0)
    }

    pub fn p(&self) -> u64 {
        self.params.p
    }

    pub fn level(&self) -> u32 {
        self.params.level
    }

    pub fn exponent(&self) -> u32 {
        self.params.exponent
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.params.check(&other.params)?;
        let pm = self.params.modulus();
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| (a + b) % pm)
            .collect();
        Ok(GroupRingElem {
            params: self.params,
            coeffs,
        })
    }

    pub fn neg(&self) -> Self {
        let pm = self.params.modulus();
        GroupRingElem {
            params: self.params,
            coeffs: self.coeffs.iter().map(|&a| (pm - a) % pm).collect(),
        }
    }

    /// Convolution product over the cyclic group.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.params.check(&other.params)?;
        let n = self.coeffs.len();
        let pm = self.params.modulus() as u128;
        let mut acc = vec![0u128; n];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                let k = (i + j) % n;
                acc[k] = (acc[k] + a as u128 * b as u128) % pm;
            }
        }
        Ok(GroupRingElem {
            params: self.params,
            coeffs: acc.into_iter().map(|c| c as u64).collect(),
        })
    }

    pub fn scalar_mul(&self, c: u64) -> Self {
        let pm = self.params.modulus() as u128;
        GroupRingElem {
            params: self.params,
            coeffs: self
                .coeffs
                .iter()
                .map(|&a| (a as u128 * c as u128 % pm) as u64)
                .collect(),
        }
    }

    /// `Res`: the ring map to level `n-1`; each target coefficient is the sum
    /// over the `p` preimages of its index.
    pub fn res(&self) -> Result<GroupRingElem> {
        if self.params.level == 0 {
            return Err(Error::LevelZero);
        }
        let params = Params::new(self.params.p, self.params.level - 1, self.params.exponent)?;
        let order = params.order() as usize;
        let pm = params.modulus();
        let mut coeffs = vec![0u64; order];
        for (g, &c) in self.coeffs.iter().enumerate() {
            let idx = g % order;
            coeffs[idx] = (coeffs[idx] + c) % pm;
        }
        Ok(GroupRingElem { params, coeffs })
    }

    /// `Cor`: the additive map to level `n+1` sending a basis element to the
    /// sum of its `p` preimages.
    pub fn cor(&self) -> Result<GroupRingElem> {
        let params = Params::new(self.params.p, self.params.level + 1, self.params.exponent)?;
        let small = self.coeffs.len();
        let mut coeffs = vec![0u64; params.order() as usize];
        for (g, c) in coeffs.iter_mut().enumerate() {
            *c = self.coeffs[g % small];
        }
        Ok(GroupRingElem { params, coeffs })
    }

    /// `[p]`: multiplication by `p` into the larger coefficient ring
    /// `Z/p^(m+1)`; injective.
    pub fn pi_embed(&self) -> Result<GroupRingElem> {
        let params = Params::new(self.params.p, self.params.level, self.params.exponent + 1)?;
        let pm = params.modulus();
        let coeffs = self
            .coeffs
            .iter()
            .map(|&c| c * self.params.p % pm)
            .collect();
        Ok(GroupRingElem { params, coeffs })
    }

    /// `theta`: coefficientwise reduction `Z/p^(m+1) -> Z/p^m`; surjective.
    pub fn theta(&self) -> Result<GroupRingElem> {
        if self.params.exponent == 1 {
            return Err(Error::ExponentFloor);
        }
        let params = Params::new(self.params.p, self.params.level, self.params.exponent - 1)?;
        let pm = params.modulus();
        let coeffs = self.coeffs.iter().map(|&c| c % pm).collect();
        Ok(GroupRingElem { params, coeffs })
    }

    /// The norm of the kernel of `G_(n+1) -> G_n`: the sum of the `p` basis
    /// elements that restrict to the identity.
    pub fn kernel_norm(p: u64, level: u32, exponent: u32) -> Result<GroupRingElem> {
        let mut out = GroupRingElem::zero(p, level + 1, exponent)?;
        let small = checked_p_pow(p, level)? as usize;
        for c in 0..p as usize {
            out.coeffs[c * small] = 1;
        }
        Ok(out)
    }
}

/// Element of the Pontryagin dual of `(Z/p^m)[G_n]`. The entry at `g` is
/// `[p^m](chi(g))`, i.e. the numerator of the value `chi(g) = a/p^m in Q/Z`.
/// The group acts by `(h chi)(x) = chi(h^(-1) x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualGroupRingElem {
    params: Params,
    values: Vec<u64>,
}

impl DualGroupRingElem {
    pub fn new(p: u64, level: u32, exponent: u32, values: Vec<i64>) -> Result<Self> {
        let elem = GroupRingElem::new(p, level, exponent, values)?;
        Ok(DualGroupRingElem {
            params: elem.params,
            values: elem.coeffs,
        })
    }

    /// The dual basis vector taking value `1/p^m` at `g` and `0` elsewhere.
    pub fn delta(p: u64, level: u32, exponent: u32, g: u64) -> Result<Self> {
        let elem = GroupRingElem::delta(p, level, exponent, g)?;
        Ok(DualGroupRingElem {
            params: elem.params,
            values: elem.coeffs,
        })
    }

    pub fn p(&self) -> u64 {
        self.params.p
    }

    pub fn level(&self) -> u32 {
        self.params.level
    }

    pub fn exponent(&self) -> u32 {
        self.params.exponent
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.params.check(&other.params)?;
        let pm = self.params.modulus();
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| (a + b) % pm)
            .collect();
        Ok(DualGroupRingElem {
            params: self.params,
            values,
        })
    }

    /// Evaluation `chi(y)` for `y` in the group ring, O-linearly extended;
    /// returns the numerator of the value over `p^m`.
    pub fn eval(&self, y: &GroupRingElem) -> Result<u64> {
        self.params.check(&y.params)?;
        let pm = self.params.modulus() as u128;
        let mut acc = 0u128;
        for (&v, &c) in self.values.iter().zip(&y.coeffs) {
            acc = (acc + v as u128 * c as u128) % pm;
        }
        Ok(acc as u64)
    }

    /// Action of a group-ring element: `(x chi)(y) = sum x_h chi(h^(-1) y)`.
    pub fn act(&self, x: &GroupRingElem) -> Result<DualGroupRingElem> {
        self.params.check(&x.params)?;
        let n = self.values.len();
        let pm = self.params.modulus() as u128;
        let mut out = vec![0u128; n];
        for (h, &c) in x.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (g, slot) in out.iter_mut().enumerate() {
                let idx = (g + n - h) % n;
                *slot = (*slot + c as u128 * self.values[idx] as u128) % pm;
            }
        }
        Ok(DualGroupRingElem {
            params: self.params,
            values: out.into_iter().map(|v| v as u64).collect(),
        })
    }
}

/// The self-duality: `chi` goes to `sum_g [p^m](chi(g)) g`. In the stored
/// representation this is coordinate-preserving.
pub fn phi(chi: &DualGroupRingElem) -> GroupRingElem {
    GroupRingElem {
        params: chi.params,
        coeffs: chi.values.clone(),
    }
}

/// Inverse of [`phi`].
pub fn phi_inverse(x: &GroupRingElem) -> DualGroupRingElem {
    DualGroupRingElem {
        params: x.params,
        values: x.coeffs.clone(),
    }
}

/// The pairing `<x, chi> = sum_g x_g chi_g mod p^m`.
pub fn pairing(x: &GroupRingElem, chi: &DualGroupRingElem) -> Result<u64> {
    chi.eval(x)
}

/// Maps whose Pontryagin duals the library computes by precomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualizableMap {
    Res,
    Cor,
    PiEmbed,
    Theta,
}

/// `chi . f`, computed by applying `f` to every basis vector of its source,
/// pairing with `chi`, and converting the denominator to the source exponent.
pub fn dual_map(map: DualizableMap, chi: &DualGroupRingElem) -> Result<DualGroupRingElem> {
    let Params { p, level, exponent } = chi.params;
    // parameters of the source of f, given that chi lives on the target
    let (src_level, src_exponent) = match map {
        DualizableMap::Res => (
            level.checked_add(1).unwrap(),
            exponent,
        ),
        DualizableMap::Cor => (level.checked_sub(1).ok_or(Error::LevelZero)?, exponent),
        DualizableMap::PiEmbed => (
            level,
            exponent.checked_sub(1).ok_or(Error::ExponentFloor)?,
        ),
        DualizableMap::Theta => (level, exponent + 1),
    };
    let src = Params::new(p, src_level, src_exponent)?;
    let mut values = Vec::with_capacity(src.order() as usize);
    for g in 0..src.order() {
        let basis = GroupRingElem::delta(p, src_level, src_exponent, g)?;
        let image = match map {
            DualizableMap::Res => basis.res()?,
            DualizableMap::Cor => basis.cor()?,
            DualizableMap::PiEmbed => basis.pi_embed()?,
            DualizableMap::Theta => basis.theta()?,
        };
        let num = chi.eval(&image)?;
        // chi(image) = num / p^exponent; restate over p^src_exponent
        let value = if src_exponent >= exponent {
            let lift = num as u128 * (p as u128).pow(src_exponent - exponent);
            (lift % (src.modulus() as u128)) as u64
        } else {
            let div = p.pow(exponent - src_exponent);
            assert!(num % div == 0, "dual value has no exact restatement");
            num / div
        };
        values.push(value);
    }
    Ok(DualGroupRingElem {
        params: src,
        values,
    })
}

/// The three commuting diagrams relating `phi` to the level and coefficient
/// maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Diagram {
    /// `Cor . phi_(n,m) = phi_(n+1,m) . dual(Res)`
    #[serde(rename = "A1-res-cor")]
    ResCor,
    /// `Res . phi_(n+1,m) = phi_(n,m) . dual(Cor)`
    #[serde(rename = "A1-cor-res")]
    CorRes,
    /// `theta . phi_(n,m+1) = phi_(n,m) . dual([p])`
    #[serde(rename = "A3-pi-theta")]
    PiTheta,
}

impl Diagram {
    pub const ALL: [Diagram; 3] = [Diagram::ResCor, Diagram::CorRes, Diagram::PiTheta];

    pub fn name(&self) -> &'static str {
        match self {
            Diagram::ResCor => "A1-res-cor",
            Diagram::CorRes => "A1-cor-res",
            Diagram::PiTheta => "A3-pi-theta",
        }
    }

    pub fn from_name(name: &str) -> Option<Diagram> {
        Diagram::ALL.iter().copied().find(|d| d.name() == name)
    }
}

/// An injectable defect, used to demonstrate that the diagram checker
/// actually distinguishes the two routes.
#[derive(Debug, Clone, Copy)]
pub enum PhiFault {
    NegateCoefficient(usize),
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagramFailure {
    pub input: String,
    pub lhs: Vec<u64>,
    pub rhs: Vec<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagramReport {
    pub diagram: &'static str,
    pub p: u64,
    pub level: u32,
    pub exponent: u32,
    pub checked: usize,
    pub pass: bool,
    pub failures: Vec<DiagramFailure>,
}

/// Evaluates both composites of a diagram on the full dual basis plus
/// `samples` random dual elements; exact equality, failures reported as data.
pub fn check_diagram(
    diagram: Diagram,
    p: u64,
    level: u32,
    exponent: u32,
    samples: usize,
) -> Result<DiagramReport> {
    check_diagram_with_fault(diagram, p, level, exponent, samples, None)
}

/// [`check_diagram`] with an optional fault injected into the `phi` on the
/// left-hand route (verification plumbing: a faulted run must fail).
pub fn check_diagram_with_fault(
    diagram: Diagram,
    p: u64,
    level: u32,
    exponent: u32,
    samples: usize,
    fault: Option<PhiFault>,
) -> Result<DiagramReport> {
    // chi lives on the dual of the source ring of the left vertical phi
    let (chi_level, chi_exponent) = match diagram {
        Diagram::ResCor => (level, exponent),
        Diagram::CorRes => (level + 1, exponent),
        Diagram::PiTheta => (level, exponent + 1),
    };
    let chi_params = Params::new(p, chi_level, chi_exponent)?;
    let phi_faulted = |chi: &DualGroupRingElem| -> GroupRingElem {
        let mut out = phi(chi);
        if let Some(PhiFault::NegateCoefficient(idx)) = fault {
            let k = idx % out.coeffs.len();
            out.coeffs[k] = (out.params.modulus() - out.coeffs[k]) % out.params.modulus();
        }
        out
    };
    let run = |chi: &DualGroupRingElem| -> Result<(GroupRingElem, GroupRingElem)> {
        let (lhs, rhs) = match diagram {
            Diagram::ResCor => (
                phi_faulted(chi).cor()?,
                phi(&dual_map(DualizableMap::Res, chi)?),
            ),
            Diagram::CorRes => (
                phi_faulted(chi).res()?,
                phi(&dual_map(DualizableMap::Cor, chi)?),
            ),
            Diagram::PiTheta => (
                phi_faulted(chi).theta()?,
                phi(&dual_map(DualizableMap::PiEmbed, chi)?),
            ),
        };
        Ok((lhs, rhs))
    };
    let mut failures = Vec::new();
    let mut checked = 0usize;
    for g in 0..chi_params.order() {
        let chi = DualGroupRingElem::delta(p, chi_level, chi_exponent, g)?;
        let (lhs, rhs) = run(&chi)?;
        checked += 1;
        if lhs != rhs {
            failures.push(DiagramFailure {
                input: format!("dual basis vector at {g}"),
                lhs: lhs.coeffs,
                rhs: rhs.coeffs,
            });
        }
    }
    let seed = p ^ ((level as u64) << 24) ^ ((exponent as u64) << 32) ^ ((diagram as u64) << 40);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..samples {
        let chi = random_dual(&mut rng, p, chi_level, chi_exponent)?;
        let (lhs, rhs) = run(&chi)?;
        checked += 1;
        if lhs != rhs {
            failures.push(DiagramFailure {
                input: format!("random dual element {k}"),
                lhs: lhs.coeffs,
                rhs: rhs.coeffs,
            });
        }
    }
    Ok(DiagramReport {
        diagram: diagram.name(),
        p,
        level,
        exponent,
        checked,
        pass: failures.is_empty(),
        failures,
    })
}

pub fn random_dual(
    rng: &mut impl RngCore,
    p: u64,
    level: u32,
    exponent: u32,
) -> Result<DualGroupRingElem> {
    let params = Params::new(p, level, exponent)?;
    let pm = params.modulus();
    let values = (0..params.order())
        .map(|_| rng.random_range(0..pm))
        .collect();
    Ok(DualGroupRingElem { params, values })
}

pub fn random_groupring(
    rng: &mut impl RngCore,
    p: u64,
    level: u32,
    exponent: u32,
) -> Result<GroupRingElem> {
    Ok(phi(&random_dual(rng, p, level, exponent)?))
}

/// Reduction `Lambda -> Lambda/(p^m, omega_n) = (Z/p^m)[G_n]` with
/// `1 + T` going to the generator. The input must resolve degrees up to
/// `p^n`, i.e. have truncation `N > p^n`, and carry at least `m` digits of
/// p-adic precision.
pub fn groupring_from_series(f: &LambdaElem, level: u32, exponent: u32) -> Result<GroupRingElem> {
    let params = Params::new(f.p(), level, exponent)?;
    let order = params.order();
    if f.truncation() as u64 <= order {
        return Err(Error::TruncationTooShort {
            needed: order as usize + 1,
            truncation: f.truncation(),
        });
    }
    if f.precision() < exponent {
        return Err(Error::InsufficientPrecision {
            precision: f.precision(),
        });
    }
    let n = order as usize;
    let pm = params.modulus();
    let pm_big = BigUint::from(pm);
    // Horner in T = U - 1 over the cyclic algebra generated by U
    let mut acc = vec![0u64; n];
    for k in (0..f.truncation()).rev() {
        // acc <- acc * (U - 1) + c_k
        let mut next = vec![0u64; n];
        for (j, slot) in next.iter_mut().enumerate() {
            let shifted = acc[(j + n - 1) % n];
            *slot = (shifted + pm - acc[j]) % pm;
        }
        let c = f.coeff(k).residue() % &pm_big;
        let digits = c.to_u64_digits();
        next[0] = (next[0] + digits.first().copied().unwrap_or(0)) % pm;
        acc = next;
    }
    Ok(GroupRingElem {
        params,
        coeffs: acc,
    })
}

/// A cofinitely generated module over the coefficient ring:
/// `(K/O)^corank + sum O/p^(m_i)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OModuleSpec {
    pub corank: u32,
    #[serde(default)]
    pub torsion: Vec<u32>,
}

/// Invariants of the direct limit of `M (x) O[G_n]`: corank carries over,
/// torsion exponents become the mu-invariant, and the lambda-invariant is 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TensorInvariants {
    pub corank: u32,
    pub mu: u32,
    pub lambda: u32,
}

pub fn tensor_limit_invariants(spec: &OModuleSpec) -> TensorInvariants {
    TensorInvariants {
        corank: spec.corank,
        mu: spec.torsion.iter().sum(),
        lambda: 0,
    }
}

/// One level of the growth table: exact sizes for the torsion part, ranks for
/// the cofree part.
#[derive(Debug, Clone, Serialize)]
pub struct GrowthRow {
    pub level: u32,
    pub rank: u64,
    pub log_p_size: u64,
    pub size: String,
    pub enumerated: bool,
}

/// Level-by-level sizes of `M (x) O[G_n]`: the torsion part of the tensor at
/// level `n` has exactly `p^(sum m_i * p^n)` elements and the cofree part has
/// rank `corank * p^n`. Small cells are cross-checked by enumerating the
/// explicitly constructed coefficient space.
pub fn limit_growth_table(p: u64, spec: &OModuleSpec, n_max: u32) -> Result<Vec<GrowthRow>> {
    if !crate::padic::is_prime(p) {
        return Err(Error::NotAPrime(p));
    }
    let top = checked_p_pow(p, n_max)?;
    if top > 10_000 {
        return Err(Error::SizeLimit {
            what: "p^n_max",
            value: top,
            limit: 10_000,
        });
    }
    let mu: u64 = spec.torsion.iter().map(|&m| m as u64).sum();
    let mut rows = Vec::with_capacity(n_max as usize + 1);
    for n in 0..=n_max {
        let pn = checked_p_pow(p, n)?;
        let log_p_size = mu * pn;
        let size = BigUint::from(p).pow(u32::try_from(log_p_size).map_err(|_| {
            Error::SizeLimit {
                what: "log_p size",
                value: log_p_size,
                limit: u32::MAX as u64,
            }
        })?);
        let mut enumerated = false;
        if !spec.torsion.is_empty() {
            let mut counted = BigUint::from(1u32);
            let mut all_small = true;
            for &m in &spec.torsion {
                match enumerate_group_ring(p, pn, m) {
                    Some(count) => counted *= count,
                    None => {
                        all_small = false;
                        break;
                    }
                }
            }
            if all_small {
                assert_eq!(counted, size, "enumerated size disagrees with formula");
                enumerated = true;
            }
        }
        rows.push(GrowthRow {
            level: n,
            rank: spec.corank as u64 * pn,
            log_p_size,
            size: size.to_string(),
            enumerated,
        });
    }
    Ok(rows)
}

/// Counts the elements of `(Z/p^m)[G_n]` one by one (odometer over the
/// coefficient vectors); `None` when the ring is too large to enumerate.
fn enumerate_group_ring(p: u64, order: u64, exponent: u32) -> Option<BigUint> {
    let pm = p.checked_pow(exponent)?;
    // quick size bound before enumerating
    let bound = (pm as f64).ln() * order as f64;
    if bound > (ENUMERATION_CAP as f64).ln() {
        return None;
    }
    let mut odometer = vec![0u64; order as usize];
    let mut count = BigUint::zero();
    loop {
        count += 1u32;
        let mut pos = 0usize;
        loop {
            if pos == odometer.len() {
                return Some(count);
            }
            odometer[pos] += 1;
            if odometer[pos] < pm {
                break;
            }
            odometer[pos] = 0;
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_law_on_basis() {
        let d1 = GroupRingElem::delta(3, 1, 2, 1).unwrap();
        let prod = d1.mul(&d1).unwrap();
        assert_eq!(prod, GroupRingElem::delta(3, 1, 2, 2).unwrap());
        let x = GroupRingElem::new(3, 1, 2, vec![4, 7, 1]).unwrap();
        assert_eq!(x.mul(&GroupRingElem::one(3, 1, 2).unwrap()).unwrap(), x);
    }

    #[test]
    fn hand_convolution_at_p2() {
        // (d_e + d_g)^2 = 2 d_e + 2 d_g since g^2 = e
        let x = GroupRingElem::new(2, 1, 2, vec![1, 1]).unwrap();
        assert_eq!(
            x.mul(&x).unwrap(),
            GroupRingElem::new(2, 1, 2, vec![2, 2]).unwrap()
        );
    }

    #[test]
    fn res_examples() {
        let d = GroupRingElem::delta(3, 2, 2, 7).unwrap();
        assert_eq!(d.res().unwrap(), GroupRingElem::delta(3, 1, 2, 1).unwrap());
        let one = GroupRingElem::one(3, 2, 2).unwrap();
        assert_eq!(one.res().unwrap(), GroupRingElem::one(3, 1, 2).unwrap());
        // res of the sum of all basis vectors is p times the smaller sum
        let all = GroupRingElem::new(3, 2, 2, vec![1; 9]).unwrap();
        assert_eq!(
            all.res().unwrap(),
            GroupRingElem::new(3, 1, 2, vec![3, 3, 3]).unwrap()
        );
        assert_eq!(
            GroupRingElem::one(3, 0, 2).unwrap().res(),
            Err(Error::LevelZero)
        );
    }

    #[test]
    fn cor_examples() {
        let e = GroupRingElem::delta(3, 1, 2, 0).unwrap();
        let lifted = e.cor().unwrap();
        assert_eq!(lifted, GroupRingElem::new(3, 2, 2, vec![1, 0, 0, 1, 0, 0, 1, 0, 0]).unwrap());
        // res . cor = multiplication by p
        let x = GroupRingElem::new(3, 1, 3, vec![5, 2, 8]).unwrap();
        assert_eq!(x.cor().unwrap().res().unwrap(), x.scalar_mul(3));
        // cor . res = multiplication by the kernel norm
        let y = GroupRingElem::new(3, 2, 2, vec![1, 2, 3, 4, 5, 6, 7, 8, 0]).unwrap();
        let norm = GroupRingElem::kernel_norm(3, 1, 2).unwrap();
        assert_eq!(y.res().unwrap().cor().unwrap(), y.mul(&norm).unwrap());
    }

    #[test]
    fn cor_is_not_multiplicative() {
        // counterexample at p = 2, level 0 -> 1
        let e = GroupRingElem::one(2, 0, 2).unwrap();
        let prod_then_cor = e.mul(&e).unwrap().cor().unwrap();
        let cor_then_prod = e.cor().unwrap().mul(&e.cor().unwrap()).unwrap();
        assert_ne!(prod_then_cor, cor_then_prod);
    }

    #[test]
    fn pi_embed_theta_examples() {
        let x = GroupRingElem::new(2, 1, 1, vec![1, 1]).unwrap();
        let up = x.pi_embed().unwrap();
        assert_eq!(up, GroupRingElem::new(2, 1, 2, vec![2, 2]).unwrap());
        // theta . pi_embed = multiplication by p, which kills Z/p
        assert!(up.theta().unwrap().is_zero());
        // pi_embed is injective on the basis
        for g in 0..4 {
            let d = GroupRingElem::delta(2, 2, 2, g).unwrap();
            assert!(!d.pi_embed().unwrap().is_zero());
        }
        // theta is surjective: basis elements have visible preimages
        for g in 0..4 {
            let d = GroupRingElem::delta(2, 2, 2, g).unwrap();
            assert_eq!(d.pi_embed().unwrap().theta().unwrap(), d.scalar_mul(2));
        }
    }

    #[test]
    fn phi_is_linear_and_equivariant() {
        let chi1 = DualGroupRingElem::new(3, 1, 2, vec![1, 4, 7]).unwrap();
        let chi2 = DualGroupRingElem::new(3, 1, 2, vec![2, 0, 5]).unwrap();
        let sum = chi1.add(&chi2).unwrap();
        assert_eq!(
            phi(&sum),
            phi(&chi1).add(&phi(&chi2)).unwrap()
        );
        // equivariance against the group-ring action
        let h = GroupRingElem::new(3, 1, 2, vec![0, 1, 3]).unwrap();
        assert_eq!(phi(&chi1.act(&h).unwrap()), h.mul(&phi(&chi1)).unwrap());
    }

    #[test]
    fn phi_dual_basis_example() {
        // indicator of e with value 1/p^m goes to delta_e
        let chi = DualGroupRingElem::delta(5, 1, 2, 0).unwrap();
        assert_eq!(phi(&chi), GroupRingElem::delta(5, 1, 2, 0).unwrap());
    }

    #[test]
    fn pairing_is_nondegenerate() {
        let (p, n, m) = (3, 1, 2);
        let order = 3usize;
        for g in 0..order {
            let x = GroupRingElem::delta(p, n, m, g as u64).unwrap();
            let hits = (0..order).any(|h| {
                let chi = DualGroupRingElem::delta(p, n, m, h as u64).unwrap();
                pairing(&x, &chi).unwrap() != 0
            });
            assert!(hits);
        }
    }

    #[test]
    fn dual_map_unfolds_res() {
        let chi = DualGroupRingElem::new(3, 1, 2, vec![2, 5, 1]).unwrap();
        let lifted = dual_map(DualizableMap::Res, &chi).unwrap();
        for g in 0..9u64 {
            assert_eq!(lifted.values()[g as usize], chi.values()[(g % 3) as usize]);
        }
    }

    #[test]
    fn diagrams_commute() {
        for p in [2u64, 3, 5] {
            for n in 0..=2u32 {
                for m in 1..=3u32 {
                    for d in Diagram::ALL {
                        let report = check_diagram(d, p, n, m, 25).unwrap();
                        assert!(
                            report.pass,
                            "diagram {} failed at p={p} n={n} m={m}",
                            report.diagram
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn faulted_phi_is_detected() {
        let report = check_diagram_with_fault(
            Diagram::ResCor,
            3,
            1,
            2,
            5,
            Some(PhiFault::NegateCoefficient(1)),
        )
        .unwrap();
        assert!(!report.pass);
        assert!(!report.failures.is_empty());
    }

    #[test]
    fn trivial_group_diagram_passes() {
        let report = check_diagram(Diagram::PiTheta, 3, 0, 2, 10).unwrap();
        assert!(report.pass);
    }

    #[test]
    fn series_reduction_examples() {
        let f = LambdaElem::new(3, 4, 5, &[1, 1]).unwrap();
        assert_eq!(
            groupring_from_series(&f, 1, 2).unwrap(),
            GroupRingElem::delta(3, 1, 2, 1).unwrap()
        );
        let omega = LambdaElem::omega(3, 4, 5, 1).unwrap();
        assert!(groupring_from_series(&omega, 1, 2).unwrap().is_zero());
        let short = LambdaElem::new(3, 4, 3, &[1, 1]).unwrap();
        assert!(matches!(
            groupring_from_series(&short, 1, 2),
            Err(Error::TruncationTooShort { .. })
        ));
    }

    #[test]
    fn series_reduction_is_multiplicative_on_polynomials() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let coeffs_f: Vec<i64> = (0..4).map(|_| rng.random_range(0..81)).collect();
            let coeffs_g: Vec<i64> = (0..4).map(|_| rng.random_range(0..81)).collect();
            let f = LambdaElem::new(3, 4, 10, &coeffs_f).unwrap();
            let g = LambdaElem::new(3, 4, 10, &coeffs_g).unwrap();
            let prod = f.mul(&g).unwrap();
            let lhs = groupring_from_series(&prod, 1, 3).unwrap();
            let rhs = groupring_from_series(&f, 1, 3)
                .unwrap()
                .mul(&groupring_from_series(&g, 1, 3).unwrap())
                .unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn series_reduction_commutes_with_res() {
        let f = LambdaElem::new(3, 4, 12, &[7, 2, 0, 5, 1, 3, 8, 0, 2, 4]).unwrap();
        let direct = groupring_from_series(&f, 1, 3).unwrap();
        let via_level_2 = groupring_from_series(&f, 2, 3).unwrap().res().unwrap();
        assert_eq!(direct, via_level_2);
    }

    #[test]
    fn tensor_invariants_examples() {
        let cofree = OModuleSpec {
            corank: 1,
            torsion: vec![],
        };
        let t = tensor_limit_invariants(&cofree);
        assert_eq!((t.corank, t.mu, t.lambda), (1, 0, 0));
        let torsion = OModuleSpec {
            corank: 0,
            torsion: vec![2],
        };
        let t = tensor_limit_invariants(&torsion);
        assert_eq!((t.corank, t.mu, t.lambda), (0, 2, 0));
        let zero = OModuleSpec {
            corank: 0,
            torsion: vec![],
        };
        let t = tensor_limit_invariants(&zero);
        assert_eq!((t.corank, t.mu, t.lambda), (0, 0, 0));
    }

    #[test]
    fn growth_table_examples() {
        let spec = OModuleSpec {
            corank: 0,
            torsion: vec![2],
        };
        let rows = limit_growth_table(3, &spec, 1).unwrap();
        assert_eq!(rows[1].size, "729");
        assert!(rows[1].enumerated);
        let cofree = OModuleSpec {
            corank: 1,
            torsion: vec![],
        };
        let rows = limit_growth_table(2, &cofree, 2).unwrap();
        assert_eq!(rows[2].rank, 4);
        assert_eq!(rows[0].rank, 1);
        assert!(matches!(
            limit_growth_table(5, &spec, 8),
            Err(Error::SizeLimit { .. })
        ));
    }
}
