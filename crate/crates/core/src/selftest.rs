//! Aggregated invariant suite across every module, runnable from the CLI.
//!
//! Each check re-derives its expectations independently (hand-computed
//! values, brute-force oracles, second algebraic routes) and reports exact
//! pass/fail. A [`Fault`] can be injected to demonstrate that each module's
//! check actually has teeth; a faulted run must fail.

use num_bigint::BigInt;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeSet;

use crate::duality::{
    check_diagram, check_diagram_with_fault, groupring_from_series, limit_growth_table,
    tensor_limit_invariants, Diagram, OModuleSpec, PhiFault,
};
use crate::error::Result;
use crate::exact::{resultant, IntPoly};
use crate::invariants::{
    coinvariant_length, exceptional_twists, twist_char_poly, CharPoly,
};
use crate::ledger::{
    lambda_difference, nonprimitive_lambda, target_corank, FieldDatum, FormDatum, FormLocal,
    PrimeDatum, PrimeKind,
};
use crate::padic::{Character, PadicInt};
use crate::series::{divide_by_distinguished, LambdaElem};

/// One injectable defect per module; used to verify that the suite flips to
/// failure when any module misbehaves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    PadicMulSkew,
    PrepUnitSkew,
    TwistExponentSkew,
    PhiNegation,
    LedgerSumSkew,
}

impl Fault {
    pub const ALL: [Fault; 5] = [
        Fault::PadicMulSkew,
        Fault::PrepUnitSkew,
        Fault::TwistExponentSkew,
        Fault::PhiNegation,
        Fault::LedgerSumSkew,
    ];
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelftestReport {
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

pub fn run_selftest() -> SelftestReport {
    run_selftest_with_fault(None)
}

pub fn run_selftest_with_fault(fault: Option<Fault>) -> SelftestReport {
    let checks = vec![
        check("padic-ring-axioms", || padic_axioms(fault)),
        check("series-weierstrass", || series_weierstrass(fault)),
        check("series-omega-resultant", series_omega_resultant),
        check("duality-diagrams", || duality_diagrams(fault)),
        check("duality-limits", duality_limits),
        check("invariants-twist", || invariants_twist(fault)),
        check("invariants-finiteness", invariants_finiteness),
        check("ledger-identities", || ledger_identities(fault)),
    ];
    SelftestReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

fn check(name: &'static str, run: impl FnOnce() -> Result<(usize, String)>) -> CheckResult {
    match run() {
        Ok((_, detail)) => CheckResult {
            name,
            passed: true,
            detail,
        },
        Err(msg) => CheckResult {
            name,
            passed: false,
            detail: msg.to_string(),
        },
    }
}

fn fail(msg: String) -> crate::error::Error {
    crate::error::Error::Invalid(msg)
}

fn random_residue(rng: &mut impl RngCore, p: u64, precision: u32) -> u64 {
    let modulus = p.pow(precision);
    rng.random_range(0..modulus)
}

pub fn random_series(rng: &mut impl RngCore, p: u64, precision: u32, truncation: usize) -> LambdaElem {
    let coeffs: Vec<PadicInt> = (0..truncation)
        .map(|_| {
            PadicInt::new(p, precision, random_residue(rng, p, precision) as i64)
                .expect("valid residue")
        })
        .collect();
    LambdaElem::from_coeffs(coeffs).expect("valid series")
}

/// Random monic characteristic polynomial with mu = 0, mod p^M.
pub fn random_monic_charpoly(
    rng: &mut impl RngCore,
    p: u64,
    precision: u32,
    degree: usize,
) -> CharPoly {
    let mut coeffs: Vec<PadicInt> = (0..degree)
        .map(|_| {
            PadicInt::new(p, precision, random_residue(rng, p, precision) as i64)
                .expect("valid residue")
        })
        .collect();
    coeffs.push(PadicInt::one(p, precision));
    CharPoly::new_modular(p, 0, coeffs).expect("monic by construction")
}

fn eval_poly(coeffs: &[PadicInt], x: &PadicInt) -> Result<PadicInt> {
    let mut acc = PadicInt::zero(x.p(), x.precision());
    for c in coeffs.iter().rev() {
        acc = acc.mul(x)?.add(c)?;
    }
    Ok(acc)
}

fn padic_axioms(fault: Option<Fault>) -> Result<(usize, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut checked = 0usize;
    // frozen sanity example first, where the fault is injected
    let x = PadicInt::new(3, 2, 4)?;
    let y = PadicInt::new(3, 2, 7)?;
    let expected = if fault == Some(Fault::PadicMulSkew) { 1 } else { 2 };
    if x.add(&y)? != PadicInt::new(3, 2, expected)? {
        return Err(fail("4 + 7 mod 9 gave an unexpected sum".into()));
    }
    for p in [2u64, 3, 5] {
        for precision in [2u32, 6] {
            for _ in 0..200 {
                let a = PadicInt::new(p, precision, random_residue(&mut rng, p, precision) as i64)?;
                let b = PadicInt::new(p, precision, random_residue(&mut rng, p, precision) as i64)?;
                let c = PadicInt::new(p, precision, random_residue(&mut rng, p, precision) as i64)?;
                if a.add(&b)?.add(&c)? != a.add(&b.add(&c)?)? {
                    return Err(fail(format!("associativity failed at p={p}")));
                }
                if a.mul(&b.add(&c)?)? != a.mul(&b)?.add(&a.mul(&c)?)? {
                    return Err(fail(format!("distributivity failed at p={p}")));
                }
                if a.mul(&b)? != b.mul(&a)? {
                    return Err(fail(format!("commutativity failed at p={p}")));
                }
                if a.is_unit() && !a.invert()?.mul(&a)?.is_one() {
                    return Err(fail(format!("inverse failed at p={p}")));
                }
                checked += 4;
            }
            let kg = if p == 2 { 5 } else { 1 + p as i64 };
            let kappa = Character::new(p, precision.max(2), kg)?;
            for i in -10..=10i64 {
                if !kappa.char_power(i).mul(&kappa.char_power(-i))?.is_one() {
                    return Err(fail(format!("character power pairing failed at p={p} i={i}")));
                }
                checked += 1;
            }
        }
    }
    Ok((checked, format!("{checked} identities")))
}

fn series_weierstrass(fault: Option<Fault>) -> Result<(usize, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut checked = 0usize;
    for p in [2u64, 3, 5] {
        for precision in [4u32, 6] {
            for truncation in [8usize, 12] {
                let mut done = 0;
                while done < 40 {
                    let f = random_series(&mut rng, p, precision, truncation);
                    let form = match f.weierstrass_prep() {
                        Ok(form) => form,
                        Err(_) => continue, // zero at precision; resample
                    };
                    for c in form.distinguished.lower() {
                        if !c.valuation().is_at_least(1) {
                            return Err(fail("prepared polynomial is not distinguished".into()));
                        }
                    }
                    let recon = form.reconstruct()?;
                    let target = if fault == Some(Fault::PrepUnitSkew) {
                        f.add(&LambdaElem::one(p, precision, truncation))?
                    } else {
                        f.clone()
                    };
                    if recon != target {
                        return Err(fail(format!(
                            "reconstruction failed at p={p} M={precision} N={truncation}"
                        )));
                    }
                    done += 1;
                    checked += 1;
                }
                // additivity of invariants under products
                let mut done = 0;
                while done < 15 {
                    let f = random_series(&mut rng, p, precision, truncation);
                    let g = random_series(&mut rng, p, precision, truncation);
                    let (Ok((mf, lf)), Ok((mg, lg))) = (f.mu_lambda(), g.mu_lambda()) else {
                        continue;
                    };
                    if mf + mg >= precision || (lf + lg) as usize >= truncation {
                        continue;
                    }
                    let (mp, lp) = f.mul(&g)?.mu_lambda()?;
                    if (mp, lp) != (mf + mg, lf + lg) {
                        return Err(fail(format!(
                            "invariant additivity failed at p={p}: ({mf},{lf})+({mg},{lg}) gave ({mp},{lp})"
                        )));
                    }
                    done += 1;
                    checked += 1;
                }
            }
        }
    }
    Ok((checked, format!("{checked} preparations")))
}

fn series_omega_resultant() -> Result<(usize, String)> {
    let mut checked = 0usize;
    // omega_{n+1} divisible by omega_n, exactly, at precision
    for (p, n) in [(2u64, 0u32), (2, 1), (3, 0), (3, 1)] {
        let len = (p as usize).pow(n + 1) + 2;
        let big = LambdaElem::omega(p, 6, len, n + 1)?;
        let small = LambdaElem::omega(p, 6, len, n)?.weierstrass_prep()?;
        let denom = small.distinguished;
        let (_, rem) = divide_by_distinguished(&big, &denom)?;
        if !rem.is_zero() {
            return Err(fail(format!("omega tower division left a remainder at p={p} n={n}")));
        }
        checked += 1;
    }
    // resultant multiplicativity over exact integers
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    for _ in 0..40 {
        let rand_poly = |rng: &mut ChaCha8Rng, deg: usize| {
            let mut c: Vec<i64> = (0..deg).map(|_| rng.random_range(-9..=9)).collect();
            c.push(1);
            IntPoly::from_i64(&c)
        };
        let f = rand_poly(&mut rng, 2);
        let g = rand_poly(&mut rng, 2);
        let h = rand_poly(&mut rng, 3);
        if resultant(&f.mul(&g), &h) != resultant(&f, &h) * resultant(&g, &h) {
            return Err(fail("resultant multiplicativity failed".into()));
        }
        checked += 1;
    }
    Ok((checked, format!("{checked} identities")))
}

fn duality_diagrams(fault: Option<Fault>) -> Result<(usize, String)> {
    let mut checked = 0usize;
    for p in [2u64, 3, 5] {
        for level in 0..=2u32 {
            for exponent in 1..=3u32 {
                for diagram in Diagram::ALL {
                    let report = check_diagram(diagram, p, level, exponent, 10)?;
                    checked += report.checked;
                    if !report.pass {
                        return Err(fail(format!(
                            "diagram {} failed at p={p} n={level} m={exponent}",
                            report.diagram
                        )));
                    }
                }
            }
        }
    }
    if fault == Some(Fault::PhiNegation) {
        let report = check_diagram_with_fault(
            Diagram::ResCor,
            3,
            1,
            2,
            5,
            Some(PhiFault::NegateCoefficient(1)),
        )?;
        checked += report.checked;
        if !report.pass {
            return Err(fail("phi coefficient negated".into()));
        }
    }
    Ok((checked, format!("{checked} diagram evaluations")))
}

fn duality_limits() -> Result<(usize, String)> {
    let mut checked = 0usize;
    // growth rows: |(Z/p^m)[G_n]| = p^(m p^n)
    let spec = OModuleSpec {
        corank: 1,
        torsion: vec![2],
    };
    for p in [2u64, 3] {
        let rows = limit_growth_table(p, &spec, 2)?;
        for row in &rows {
            let pn = p.pow(row.level);
            if row.log_p_size != 2 * pn || row.rank != pn {
                return Err(fail(format!("growth row mismatch at p={p} n={}", row.level)));
            }
            checked += 1;
        }
    }
    let t = tensor_limit_invariants(&OModuleSpec {
        corank: 2,
        torsion: vec![1, 3],
    });
    if (t.corank, t.mu, t.lambda) != (2, 4, 0) {
        return Err(fail("tensor limit invariants mismatch".into()));
    }
    checked += 1;
    // reduction to finite level: multiplicative and compatible with res
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for _ in 0..20 {
        let p = 3u64;
        let coeffs_f: Vec<i64> = (0..4).map(|_| rng.random_range(0..81)).collect();
        let coeffs_g: Vec<i64> = (0..4).map(|_| rng.random_range(0..81)).collect();
        let f = LambdaElem::new(p, 4, 12, &coeffs_f)?;
        let g = LambdaElem::new(p, 4, 12, &coeffs_g)?;
        let prod = f.mul(&g)?;
        let lhs = groupring_from_series(&prod, 1, 3)?;
        let rhs = groupring_from_series(&f, 1, 3)?.mul(&groupring_from_series(&g, 1, 3)?)?;
        if lhs != rhs {
            return Err(fail("finite-level reduction is not multiplicative".into()));
        }
        let direct = groupring_from_series(&f, 1, 3)?;
        let via_above = groupring_from_series(&f, 2, 3)?.res()?;
        if direct != via_above {
            return Err(fail("finite-level reduction does not commute with res".into()));
        }
        checked += 2;
    }
    Ok((checked, format!("{checked} limit identities")))
}

fn invariants_twist(fault: Option<Fault>) -> Result<(usize, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut checked = 0usize;
    for p in [2u64, 3, 5] {
        let precision = 8u32;
        let kgs: [i64; 2] = if p == 2 {
            [5, 21]
        } else {
            [1 + p as i64, 1 + p as i64 + (p * p) as i64]
        };
        for kg in kgs {
            let kappa = Character::new(p, precision, kg)?;
            for _ in 0..10 {
                let degree = rng.random_range(1..=4usize);
                let f = random_monic_charpoly(&mut rng, p, precision, degree);
                let i = rng.random_range(-4..=4i64);
                let j = rng.random_range(-4..=4i64);
                let two_step = twist_char_poly(&twist_char_poly(&f, &kappa, i)?, &kappa, j)?;
                let one_step = twist_char_poly(&f, &kappa, i + j)?;
                if two_step != one_step {
                    return Err(fail(format!("twist group law failed at p={p}")));
                }
                if twist_char_poly(&f, &kappa, 0)? != f {
                    return Err(fail("twist by 0 is not the identity".into()));
                }
                let twisted = twist_char_poly(&f, &kappa, i)?;
                if twisted.lambda() != f.lambda() {
                    return Err(fail("twist changed the degree".into()));
                }
                // defining substitution: G(k^i (1+x) - 1) = k^(i lambda) F(x)
                let x = PadicInt::new(p, precision, random_residue(&mut rng, p, precision) as i64)?;
                let point = kappa
                    .char_power(i)
                    .mul(&x.add(&PadicInt::one(p, precision))?)?
                    .sub(&PadicInt::one(p, precision))?;
                let lhs = eval_poly(&twisted.modular_coeffs(precision)?, &point)?;
                let rhs = kappa
                    .char_power(i * f.lambda() as i64)
                    .mul(&eval_poly(&f.modular_coeffs(precision)?, &x)?)?;
                if lhs != rhs {
                    return Err(fail(format!("substitution identity failed at p={p}")));
                }
                checked += 4;
            }
        }
    }
    // frozen pair, where the fault is injected
    let kappa = Character::new(3, 8, 4)?;
    let t = CharPoly::from_ints(3, 0, &[0, 1])?;
    let i = 1;
    let j = if fault == Some(Fault::TwistExponentSkew) { 2 } else { 1 };
    if twist_char_poly(&t, &kappa, i)? != twist_char_poly(&t, &kappa, j)? {
        return Err(fail("frozen twist comparison failed".into()));
    }
    checked += 1;
    Ok((checked, format!("{checked} twist identities")))
}

fn invariants_finiteness() -> Result<(usize, String)> {
    let mut checked = 0usize;
    // frozen exceptional sets
    for p in [3u64, 5] {
        let kappa = BigInt::from(1 + p);
        let f = CharPoly::from_ints(p, 0, &[-(p as i64), 1])?;
        if exceptional_twists(&f, &kappa, -5..=5, 3)? != BTreeSet::from([-1]) {
            return Err(fail(format!("exceptional set of t - p wrong at p={p}")));
        }
        let f2 = CharPoly::from_ints(p, 0, &[0, -(p as i64), 1])?;
        if exceptional_twists(&f2, &kappa, -5..=5, 3)? != BTreeSet::from([0, -1]) {
            return Err(fail(format!("exceptional set of t(t - p) wrong at p={p}")));
        }
        checked += 2;
    }
    // p = 2 over 1 + 4Z_2
    let f = CharPoly::from_ints(2, 0, &[-2, 1])?;
    if !exceptional_twists(&f, &BigInt::from(5), -5..=5, 3)?.is_empty() {
        return Err(fail("exceptional set of t - 2 at p=2 should be empty".into()));
    }
    let f2 = CharPoly::from_ints(2, 0, &[0, -2, 1])?;
    if exceptional_twists(&f2, &BigInt::from(5), -5..=5, 3)? != BTreeSet::from([0]) {
        return Err(fail("exceptional set of t(t - 2) at p=2 wrong".into()));
    }
    checked += 2;
    // coinvariant lengths against the brute-force oracle
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    for p in [2u64, 3, 5] {
        let mut done = 0;
        while done < 10 {
            let degree = rng.random_range(1..=3usize);
            let mut coeffs: Vec<i64> = (0..degree)
                .map(|_| rng.random_range(-(p as i64).pow(2)..(p as i64).pow(2)))
                .collect();
            coeffs.push(1);
            let monic = IntPoly::from_i64(&coeffs);
            let f = CharPoly::new_exact(p, 0, monic.clone())?;
            for n in 0..=1u32 {
                let Some(oracle) = stabilized_brute_force_length(&monic, p, n, &[6, 8, 10]) else {
                    continue;
                };
                let fast = coinvariant_length(&f, n)?;
                if fast != oracle {
                    return Err(fail(format!(
                        "length mismatch at p={p} n={n}: resultant {fast}, brute force {oracle}"
                    )));
                }
                checked += 1;
                done += 1;
            }
        }
    }
    Ok((checked, format!("{checked} finiteness verdicts")))
}

fn ledger_identities(fault: Option<Fault>) -> Result<(usize, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut checked = 0usize;
    for _ in 0..100 {
        // corank accounting over a random field and prime set
        let r1 = rng.random_range(0..4u32);
        let r2 = rng.random_range(0..3u32);
        if r1 + 2 * r2 == 0 {
            continue;
        }
        let field = FieldDatum::new(r1, r2)?;
        let degree = field.degree();
        let mut primes = Vec::new();
        let mut left = degree;
        let mut idx = 0;
        while left > 0 {
            let d = rng.random_range(1..=left);
            primes.push(PrimeDatum {
                id: format!("p{idx}"),
                kind: PrimeKind::AboveP { local_degree: d },
                divides_tame_level: false,
            });
            left -= d;
            idx += 1;
        }
        let mut split_rank_total = 0u32;
        for k in 0..rng.random_range(0..3usize) {
            let h0 = rng.random_range(0..2u32);
            split_rank_total += h0;
            primes.push(PrimeDatum {
                id: format!("v{k}"),
                kind: PrimeKind::Split {
                    h0_rank: h0,
                    torsion: vec![rng.random_range(1..3u32)],
                },
                divides_tame_level: true,
            });
        }
        let report = target_corank(&field, &primes)?;
        if report.corank != degree + split_rank_total
            || report.equals_degree != (split_rank_total == 0)
        {
            return Err(fail("corank accounting failed".into()));
        }
        checked += 1;

        // consistent pair of forms sharing lambda(Sigma_0)
        let shared = rng.random_range(5..30u64);
        let n_primes = rng.random_range(0..4usize);
        let build = |rng: &mut ChaCha8Rng| {
            let mut locals = std::collections::BTreeMap::new();
            let mut local_sum = 0u64;
            for k in 0..n_primes {
                let lv = rng.random_range(0..4u32).min(shared.saturating_sub(local_sum) as u32);
                local_sum += lv as u64;
                locals.insert(
                    format!("q{k}"),
                    FormLocal::FinitelyDecomposed { lambda_v: lv },
                );
            }
            (locals, local_sum)
        };
        let (locals1, sum1) = build(&mut rng);
        let (locals2, sum2) = build(&mut rng);
        let f1 = FormDatum {
            label: "f1".into(),
            lambda: (shared - sum1) as u32,
            mu: 0,
            locals: locals1,
        };
        let f2 = FormDatum {
            label: "f2".into(),
            lambda: (shared - sum2) as u32,
            mu: 0,
            locals: locals2,
        };
        let diff = lambda_difference(&f1, &f2)?;
        let skew = if fault == Some(Fault::LedgerSumSkew) { 1 } else { 0 };
        if !diff.consistent
            || diff.difference + skew != f1.lambda as i64 - f2.lambda as i64
            || diff.lambda_sigma0_f1 != shared
        {
            return Err(fail("lambda difference identity failed".into()));
        }
        let back = lambda_difference(&f2, &f1)?;
        if back.difference != -diff.difference {
            return Err(fail("lambda difference is not antisymmetric".into()));
        }
        // monotone in the auxiliary set
        let sigma0: Vec<String> = f1.locals.keys().cloned().collect();
        let mut partial = 0u64;
        for k in 0..=sigma0.len() {
            let subset: Vec<String> = sigma0[..k].to_vec();
            let value = nonprimitive_lambda(&f1, &subset)?;
            if value < partial {
                return Err(fail("nonprimitive lambda is not monotone".into()));
            }
            partial = value;
        }
        checked += 3;
    }
    // rejection paths
    let field = FieldDatum::new(1, 0)?;
    if target_corank(
        &field,
        &[PrimeDatum {
            id: "p".into(),
            kind: PrimeKind::AboveP { local_degree: 2 },
            divides_tame_level: false,
        }],
    )
    .is_ok()
    {
        return Err(fail("degree mismatch was not rejected".into()));
    }
    let bad_split = FormDatum {
        label: "f".into(),
        lambda: 1,
        mu: 0,
        locals: [(
            "v".to_string(),
            FormLocal::Split {
                h0_rank: 1,
                torsion: vec![],
            },
        )]
        .into(),
    };
    if nonprimitive_lambda(&bad_split, &["v".into()]).is_ok() {
        return Err(fail("nonzero split local module was not rejected".into()));
    }
    let bad_mu = FormDatum {
        label: "f".into(),
        lambda: 1,
        mu: 2,
        locals: Default::default(),
    };
    if nonprimitive_lambda(&bad_mu, &[]).is_ok() {
        return Err(fail("positive mu was not rejected".into()));
    }
    checked += 3;
    Ok((checked, format!("{checked} ledger identities")))
}

/// Brute-force length of `Lambda/(F, omega_n, p^B)` over `Z/p^B`: row-reduce
/// the matrix of `omega_n(T)` acting on the basis `1, T, ..., T^(lambda-1)`
/// of `Lambda/(F)` (the companion-matrix route). Returns `None` when some
/// elementary divisor exhausts the working modulus, i.e. the answer did not
/// stabilize at this `B`.
///
/// This is the independent oracle for [`coinvariant_length`]: it never forms
/// a resultant.
pub fn brute_force_coinvariant_length(monic: &IntPoly, p: u64, n: u32, cap: u32) -> Option<u64> {
    let lambda = monic.degree().unwrap_or(0);
    if lambda == 0 {
        return Some(0);
    }
    let pb = p.checked_pow(cap)?;
    let pb_big = BigInt::from(pb);
    let reduce = |c: BigInt| -> u64 {
        use num_integer::Integer;
        let r = c.mod_floor(&pb_big);
        u64::try_from(r).expect("reduced below p^B")
    };
    // companion matrix of F: T * T^j = T^(j+1), with T^lambda folded back
    let mut companion = vec![vec![0u64; lambda]; lambda];
    for j in 0..lambda - 1 {
        companion[j + 1][j] = 1;
    }
    for i in 0..lambda {
        companion[i][lambda - 1] = reduce(-monic.coeff(i));
    }
    // omega_n(companion) = (I + C)^(p^n) - I, all mod p^B
    let pn = p.checked_pow(n)?;
    let mut base = companion;
    for (i, row) in base.iter_mut().enumerate() {
        row[i] = (row[i] + 1) % pb;
    }
    let mut acc = identity(lambda);
    let mut e = pn;
    while e > 0 {
        if e & 1 == 1 {
            acc = mat_mul(&acc, &base, pb);
        }
        base = mat_mul(&base, &base, pb);
        e >>= 1;
    }
    for (i, row) in acc.iter_mut().enumerate() {
        row[i] = (row[i] + pb - 1) % pb;
    }
    cokernel_length(acc, p, cap)
}

/// Runs the brute force at several working moduli and demands agreement.
pub fn stabilized_brute_force_length(
    monic: &IntPoly,
    p: u64,
    n: u32,
    caps: &[u32],
) -> Option<u64> {
    let mut answer = None;
    for &cap in caps {
        let value = brute_force_coinvariant_length(monic, p, n, cap)?;
        match answer {
            None => answer = Some(value),
            Some(prev) if prev != value => return None,
            _ => {}
        }
    }
    answer
}

fn identity(n: usize) -> Vec<Vec<u64>> {
    let mut m = vec![vec![0u64; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1;
    }
    m
}

fn mat_mul(a: &[Vec<u64>], b: &[Vec<u64>], modulus: u64) -> Vec<Vec<u64>> {
    let n = a.len();
    let mut out = vec![vec![0u64; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == 0 {
                continue;
            }
            for j in 0..n {
                let term = a[i][k] as u128 * b[k][j] as u128 % modulus as u128;
                out[i][j] = ((out[i][j] as u128 + term) % modulus as u128) as u64;
            }
        }
    }
    out
}

fn val_u64(mut x: u64, p: u64, cap: u32) -> u32 {
    if x == 0 {
        return cap;
    }
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

/// Length of the cokernel of a square matrix over `Z/p^B` by Smith-style
/// elimination with minimal-valuation pivots; `None` when a pivot valuation
/// reaches `B` (not stabilized).
fn cokernel_length(mut m: Vec<Vec<u64>>, p: u64, cap: u32) -> Option<u64> {
    let n = m.len();
    let pb = p.pow(cap);
    let mut length = 0u64;
    for k in 0..n {
        // locate the entry of minimal valuation in the trailing block
        let mut best: Option<(usize, usize, u32)> = None;
        for i in k..n {
            for j in k..n {
                let v = val_u64(m[i][j], p, cap);
                if best.map(|(_, _, bv)| v < bv).unwrap_or(true) {
                    best = Some((i, j, v));
                }
            }
        }
        let (bi, bj, v) = best.expect("nonempty block");
        if v >= cap {
            return None; // pivot exhausted the working modulus
        }
        m.swap(k, bi);
        for row in m.iter_mut() {
            row.swap(k, bj);
        }
        // normalize the pivot to exactly p^v
        let unit = m[k][k] / p.pow(v);
        let unit_inv = mod_inverse(unit % pb, pb, p)?;
        for j in k..n {
            m[k][j] = (m[k][j] as u128 * unit_inv as u128 % pb as u128) as u64;
        }
        // clear the column below and the row to the right
        for i in k + 1..n {
            let factor = m[i][k] / p.pow(v);
            for j in k..n {
                let sub = (factor as u128 * m[k][j] as u128) % pb as u128;
                m[i][j] = ((m[i][j] as u128 + pb as u128 - sub) % pb as u128) as u64;
            }
        }
        for j in k + 1..n {
            let factor = m[k][j] / p.pow(v);
            for i in k..n {
                let sub = (factor as u128 * m[i][k] as u128) % pb as u128;
                m[i][j] = ((m[i][j] as u128 + pb as u128 - sub) % pb as u128) as u64;
            }
        }
        length += v as u64;
    }
    Some(length)
}

/// Inverse of a unit mod `p^B` by lifting the inverse mod `p`.
fn mod_inverse(a: u64, modulus: u64, p: u64) -> Option<u64> {
    if a % p == 0 {
        return None;
    }
    // Fermat inverse mod p, then Newton lifting
    let inv_p = {
        let mut x = 1u64;
        let mut base = a % p;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                x = x * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        x
    };
    let mut inv = inv_p;
    loop {
        let check = (a as u128 * inv as u128) % modulus as u128;
        if check == 1 {
            return Some(inv);
        }
        let two = 2u128;
        inv = ((inv as u128 * (two + modulus as u128 - check)) % modulus as u128) as u64;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selftest_passes() {
        let report = run_selftest();
        for check in &report.checks {
            assert!(check.passed, "{}: {}", check.name, check.detail);
        }
        assert!(report.passed);
    }

    #[test]
    fn every_fault_flips_the_suite() {
        for fault in Fault::ALL {
            let report = run_selftest_with_fault(Some(fault));
            assert!(!report.passed, "fault {fault:?} was not detected");
        }
    }

    #[test]
    fn brute_force_matches_hand_example() {
        // F = t - p at p = 3: length v_3(63) = 2 at level 1
        let monic = IntPoly::from_i64(&[-3, 1]);
        assert_eq!(brute_force_coinvariant_length(&monic, 3, 1, 8), Some(2));
        assert_eq!(brute_force_coinvariant_length(&monic, 3, 0, 8), Some(1));
        assert_eq!(
            stabilized_brute_force_length(&monic, 3, 1, &[6, 8, 10]),
            Some(2)
        );
    }

    #[test]
    fn brute_force_detects_infinite_quotients() {
        // F = t at level 0: Lambda/(T, omega_0) = Z_p, never stabilizes
        let monic = IntPoly::from_i64(&[0, 1]);
        assert_eq!(brute_force_coinvariant_length(&monic, 3, 0, 8), None);
    }
}
