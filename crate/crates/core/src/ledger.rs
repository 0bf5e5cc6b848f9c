//! Invariant bookkeeping for Selmer-group data.
//!
//! Nothing here computes Galois cohomology. The ledger consumes *declared*
//! local and global invariants: the decomposition behavior of each prime, the
//! corank/mu/lambda of each local module, and the global invariants of each
//! form, and checks the integer identities that relate them: the corank
//! accounting over the base field, the non-primitive lambda sums, and the
//! lambda-difference comparison between congruent forms.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Archimedean data of the base field: `degree = r1 + 2 r2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldDatum {
    pub r1: u32,
    pub r2: u32,
}

impl FieldDatum {
    pub fn new(r1: u32, r2: u32) -> Result<Self> {
        let f = FieldDatum { r1, r2 };
        if f.degree() == 0 {
            return Err(Error::Invalid("field degree must be positive".into()));
        }
        Ok(f)
    }

    pub fn degree(&self) -> u32 {
        self.r1 + 2 * self.r2
    }
}

/// Decomposition data for one declared prime of the base field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum PrimeKind {
    /// A prime above `p`; never splits completely. The local module has
    /// corank `local_degree` and mu zero; its lambda is not asserted.
    AboveP { local_degree: u32 },
    /// Finitely decomposed away from `p`: cotorsion with mu zero and the
    /// declared lambda.
    FinitelyDecomposed { lambda_v: u32 },
    /// Splits completely: corank `h0_rank`, mu the sum of the torsion
    /// exponents, lambda zero.
    Split {
        h0_rank: u32,
        #[serde(default)]
        torsion: Vec<u32>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimeDatum {
    pub id: String,
    #[serde(flatten)]
    pub kind: PrimeKind,
    #[serde(default)]
    pub divides_tame_level: bool,
}

impl PrimeDatum {
    pub fn validate(&self) -> Result<()> {
        if let PrimeKind::AboveP { local_degree } = self.kind {
            if local_degree == 0 {
                return Err(Error::Invalid(format!(
                    "prime `{}` above p must have positive local degree",
                    self.id
                )));
            }
        }
        Ok(())
    }
}

/// `(corank, mu, lambda)` of a local module; `lambda` stays `None` where the
/// theory does not pin it down (primes above `p`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LocalInvariants {
    pub corank: u32,
    pub mu: u32,
    pub lambda: Option<u32>,
}

pub fn local_invariants(prime: &PrimeDatum) -> LocalInvariants {
    match &prime.kind {
        PrimeKind::AboveP { local_degree } => LocalInvariants {
            corank: *local_degree,
            mu: 0,
            lambda: None,
        },
        PrimeKind::FinitelyDecomposed { lambda_v } => LocalInvariants {
            corank: 0,
            mu: 0,
            lambda: Some(*lambda_v),
        },
        PrimeKind::Split { h0_rank, torsion } => LocalInvariants {
            corank: *h0_rank,
            mu: torsion.iter().sum(),
            lambda: Some(0),
        },
    }
}

/// The corank of the global-to-local target, compared with the field degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorankReport {
    pub corank: u32,
    pub degree: u32,
    pub equals_degree: bool,
    /// Split primes whose local invariants obstruct the surjectivity
    /// hypothesis.
    pub violating_primes: Vec<String>,
}

/// Sums the local coranks: split primes contribute their `H^0` rank, primes
/// above `p` their local degree (which must partition the field degree);
/// equality with the degree holds exactly when every split prime has rank 0.
pub fn target_corank(field: &FieldDatum, primes: &[PrimeDatum]) -> Result<CorankReport> {
    let mut ids = BTreeMap::new();
    for prime in primes {
        prime.validate()?;
        if ids.insert(prime.id.clone(), ()).is_some() {
            return Err(Error::InconsistentLocalData {
                prime: prime.id.clone(),
            });
        }
    }
    let degree = field.degree();
    let above_p_sum: u32 = primes
        .iter()
        .filter_map(|v| match v.kind {
            PrimeKind::AboveP { local_degree } => Some(local_degree),
            _ => None,
        })
        .sum();
    if above_p_sum != degree {
        return Err(Error::DegreeMismatch {
            sum: above_p_sum,
            degree,
        });
    }
    let mut corank = 0u32;
    let mut violating = Vec::new();
    for prime in primes {
        let inv = local_invariants(prime);
        corank += inv.corank;
        if matches!(prime.kind, PrimeKind::Split { .. }) && inv.corank > 0 {
            violating.push(prime.id.clone());
        }
    }
    Ok(CorankReport {
        corank,
        degree,
        equals_degree: corank == degree,
        violating_primes: violating,
    })
}

/// Lower bound for the corank of the global cohomology: `r1 + 2 r2`, using
/// that complex conjugations act with a one-dimensional minus-eigenspace at
/// every real place.
pub fn h1_corank_floor(field: &FieldDatum) -> u32 {
    field.degree()
}

/// A form's declared local data at one auxiliary prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case", tag = "kind")]
pub enum FormLocal {
    FinitelyDecomposed { lambda_v: u32 },
    Split {
        h0_rank: u32,
        #[serde(default)]
        torsion: Vec<u32>,
    },
}

/// Declared invariants of one form: its global mu and lambda plus local data
/// at the primes dividing the (joint) tame level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormDatum {
    pub label: String,
    pub lambda: u32,
    pub mu: u32,
    #[serde(default)]
    pub locals: BTreeMap<String, FormLocal>,
}

impl FormDatum {
    fn local(&self, prime: &str) -> Result<&FormLocal> {
        self.locals.get(prime).ok_or_else(|| Error::MissingLocalData {
            form: self.label.clone(),
            prime: prime.to_string(),
        })
    }
}

/// `lambda(Sigma_0, f) = lambda(f) + sum of the local lambdas` over the
/// finitely decomposed primes of `Sigma_0`.
///
/// Hypotheses checked: the form has `mu = 0`, and every split prime in
/// `Sigma_0` carries a vanishing local module.
pub fn nonprimitive_lambda(form: &FormDatum, sigma0: &[String]) -> Result<u64> {
    if form.mu > 0 {
        return Err(Error::HypothesisViolated(format!(
            "form `{}` has mu = {} > 0",
            form.label, form.mu
        )));
    }
    let mut total = form.lambda as u64;
    for prime in sigma0 {
        match form.local(prime)? {
            FormLocal::FinitelyDecomposed { lambda_v } => total += *lambda_v as u64,
            FormLocal::Split { h0_rank, torsion } => {
                if *h0_rank > 0 || torsion.iter().any(|&m| m > 0) {
                    return Err(Error::HypothesisViolated(format!(
                        "split prime `{prime}` has nonzero local module for form `{}`",
                        form.label
                    )));
                }
            }
        }
    }
    Ok(total)
}

/// The lambda comparison between two congruent forms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DifferenceReport {
    /// `sum over finitely decomposed level primes of (lambda_{v,2} - lambda_{v,1})`.
    pub difference: i64,
    pub lambda_sigma0_f1: u64,
    pub lambda_sigma0_f2: u64,
    /// True when the two non-primitive lambdas agree and the difference
    /// equals `lambda(f1) - lambda(f2)`.
    pub consistent: bool,
    pub sigma0: Vec<String>,
}

/// Evaluates `lambda(f1) - lambda(f2) = sum (lambda_{v,2} - lambda_{v,1})`
/// over the union of the declared level primes, with all hypotheses of the
/// comparison theorem enforced.
pub fn lambda_difference(f1: &FormDatum, f2: &FormDatum) -> Result<DifferenceReport> {
    let mut sigma0: Vec<String> = f1
        .locals
        .keys()
        .chain(f2.locals.keys())
        .cloned()
        .collect();
    sigma0.sort();
    sigma0.dedup();
    // both forms must declare every prime, with matching decomposition kinds
    for prime in &sigma0 {
        let a = f1.local(prime)?;
        let b = f2.local(prime)?;
        let same_kind = matches!(
            (a, b),
            (
                FormLocal::FinitelyDecomposed { .. },
                FormLocal::FinitelyDecomposed { .. }
            ) | (FormLocal::Split { .. }, FormLocal::Split { .. })
        );
        if !same_kind {
            return Err(Error::InconsistentLocalData {
                prime: prime.clone(),
            });
        }
    }
    let lambda_sigma0_f1 = nonprimitive_lambda(f1, &sigma0)?;
    let lambda_sigma0_f2 = nonprimitive_lambda(f2, &sigma0)?;
    let mut difference = 0i64;
    for prime in &sigma0 {
        if let (
            FormLocal::FinitelyDecomposed { lambda_v: l1 },
            FormLocal::FinitelyDecomposed { lambda_v: l2 },
        ) = (f1.local(prime)?, f2.local(prime)?)
        {
            difference += *l2 as i64 - *l1 as i64;
        }
    }
    let consistent = lambda_sigma0_f1 == lambda_sigma0_f2
        && difference == f1.lambda as i64 - f2.lambda as i64;
    Ok(DifferenceReport {
        difference,
        lambda_sigma0_f1,
        lambda_sigma0_f2,
        consistent,
        sigma0,
    })
}
