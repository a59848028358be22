//! Bundled verification profiles: each criterion runs a self-contained
//! check and reports pass/fail with a short detail line.

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_integer::{binomial, Integer};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bernoulli::{bernoulli, bernoulli_poly, Rational, RationalPolynomial};
use crate::dirichlet::{teichmuller, DirichletCharacter};
use crate::error::{Error, Result};
use crate::genbernoulli::{
    bernoulli_coefficients, general_bernoulli_rational, theorem1_target, theorem1_truncation, theorem2_unit_sum,
};
use crate::lfunction::{consistent_sign, riemann_sum_rational, verify_interpolation, LpParams, VerifyReport};
use crate::measure::{compatibility_sweep, norm_bound_check, random_cylinder, BernoulliParams, EcVariant};
use crate::modarith;
use crate::padic::{rational_mod_pow, PadicNum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Fast,
    Full,
}

impl std::str::FromStr for Profile {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "fast" => Ok(Profile::Fast),
            "full" => Ok(Profile::Full),
            other => Err(format!("unknown profile {other:?}; expected fast or full")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub elapsed_ms: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub profile: Profile,
    pub seed: u64,
    pub results: Vec<CriterionResult>,
    pub pass: bool,
}

type Check = fn(Profile, u64) -> Result<(bool, String)>;

const CRITERIA: [(u32, &str, Check); 11] = [
    (1, "bernoulli identities", bernoulli_identities),
    (2, "teichmuller character", teichmuller_properties),
    (3, "conductor machinery", conductor_machinery),
    (4, "generalized bernoulli independence", generalized_bernoulli),
    (5, "distribution compatibility", distribution_compatibility),
    (6, "measure boundedness", measure_boundedness),
    (7, "locally constant integration", locally_constant_integration),
    (8, "first limit convergence", first_limit),
    (9, "unit sum decay", unit_sum_decay),
    (10, "interpolation", interpolation),
    (11, "kummer congruence", kummer_congruence),
];

/// Runs every criterion in order.
pub fn run(profile: Profile, seed: u64) -> SuiteReport {
    let results: Vec<CriterionResult> =
        CRITERIA.iter().map(|&(id, name, check)| run_one(id, name, check, profile, seed)).collect();
    let pass = results.iter().all(|r| r.pass);
    SuiteReport { profile, seed, results, pass }
}

fn run_one(id: u32, name: &'static str, check: Check, profile: Profile, seed: u64) -> CriterionResult {
    let start = Instant::now();
    let (pass, detail) = match check(profile, seed) {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionResult { id, name, pass, detail, elapsed_ms: start.elapsed().as_millis() }
}

fn q(a: i64, b: i64) -> Rational {
    Rational::new(BigInt::from(a), BigInt::from(b))
}

fn bernoulli_identities(_: Profile, _: u64) -> Result<(bool, String)> {
    for n in 0..=20usize {
        let lhs = RationalPolynomial::monomial(n, q(n as i64 + 1, 1));
        let rhs = (0..=n).fold(RationalPolynomial::zero(), |acc, k| {
            let c = binomial(BigInt::from(n + 1), BigInt::from(k));
            acc.add(&bernoulli_poly(k).scale(&Rational::from_integer(c)))
        });
        if lhs != rhs {
            return Ok((false, format!("polynomial identity fails at n = {n}")));
        }
    }
    for e in 0..=8usize {
        let b = bernoulli_poly(e + 1);
        let b0 = b.eval(&Rational::zero());
        let mut direct = BigInt::zero();
        for m in 0..=50i64 {
            let closed = (b.eval(&q(m, 1)) - &b0) / q(e as i64 + 1, 1);
            if closed != Rational::from_integer(direct.clone()) {
                return Ok((false, format!("power sum mismatch at q = {e}, M = {m}")));
            }
            direct += BigInt::from(m).pow(e as u32);
        }
    }
    Ok((true, "polynomial identity for n <= 20, power sums for q <= 8, M <= 50".into()))
}

fn teichmuller_properties(_: Profile, _: u64) -> Result<(bool, String)> {
    const PREC: u32 = 8;
    for p in [3u64, 5, 7, 11] {
        let omega = DirichletCharacter::teichmuller(p, PREC)?;
        let one = PadicNum::one(p, PREC);
        for a in 1..p {
            let w = omega.eval_u(&BigUint::from(a));
            if w.appr(1)? != BigUint::from(a) {
                return Ok((false, format!("omega({a}) is not congruent to {a} mod {p}")));
            }
            if !PadicNum::eq_mod(&w.pow((p - 1) as u32)?, &one, i64::from(PREC))? {
                return Ok((false, format!("omega({a})^(p-1) != 1 mod {p}^{PREC}")));
            }
        }
        if omega.asso_eval(&BigInt::from(-1)) != one.neg() {
            return Ok((false, format!("omega(-1) != -1 for p = {p}")));
        }
    }
    Ok((true, "p in {3, 5, 7, 11} at precision 8".into()))
}

/// A primitive root modulo the prime `q`.
pub fn primitive_root(q: u64) -> u64 {
    let factors: Vec<u64> = (2..q).filter(|f| (q - 1).is_multiple_of(*f) && modarith::is_prime(*f)).collect();
    (2..q)
        .find(|&g| {
            factors
                .iter()
                .all(|f| BigUint::from(g).modpow(&BigUint::from((q - 1) / f), &BigUint::from(q)) != BigUint::one())
        })
        .unwrap_or(1)
}

/// The character of order `e` modulo the prime `q` sending a fixed primitive
/// root to a fixed primitive `e`-th root of unity in `Z_p`. Requires `e` to
/// divide both `q - 1` and `p - 1`.
pub fn prime_character(p: u64, q: u64, e: u64, relprec: u32) -> Result<DirichletCharacter> {
    if e == 0 || !(q - 1).is_multiple_of(e) || !(p - 1).is_multiple_of(e) {
        return Err(Error::Precondition(format!("order {e} must divide {} and {}", q - 1, p - 1)));
    }
    let zeta = teichmuller(p, &BigInt::from(primitive_root(p)), relprec)?.pow(((p - 1) / e) as u32)?;
    let g = primitive_root(q);
    let mut table = BTreeMap::new();
    let mut x = 1u64;
    let mut value = PadicNum::one(p, relprec);
    for _ in 0..q - 1 {
        table.insert(BigUint::from(x), value.clone());
        x = x * g % q;
        value = value.mul(&zeta)?;
    }
    DirichletCharacter::from_values(p, BigUint::from(q), relprec, table)
}

/// The nontrivial character modulo 4.
pub fn character_mod_4(p: u64, relprec: u32) -> Result<DirichletCharacter> {
    let one = PadicNum::one(p, relprec);
    let table = BTreeMap::from([(BigUint::from(1u32), one.clone()), (BigUint::from(3u32), one.neg())]);
    DirichletCharacter::from_values(p, BigUint::from(4u32), relprec, table)
}

/// A spread of characters for `p = 5` with levels up to `max_level`:
/// Teichmüller powers, characters of order 2 and 4 modulo small primes,
/// products of those, and their lifts to higher levels.
pub fn sample_characters(max_level: u64, relprec: u32) -> Result<Vec<DirichletCharacter>> {
    let p = 5;
    let mut base = Vec::new();
    for k in 0..4 {
        base.push(DirichletCharacter::omega_pow(p, k, relprec)?);
    }
    base.push(character_mod_4(p, relprec)?);
    for q in (3..=max_level).filter(|&q| modarith::is_prime(q) && q != p) {
        for e in [2u64, 4] {
            if (q - 1) % e == 0 {
                base.push(prime_character(p, q, e, relprec)?);
            }
        }
    }
    let mut products = Vec::new();
    for a in &base {
        for b in &base[..5] {
            if (a.level() * b.level()) <= BigUint::from(max_level) && a.level() != b.level() {
                products.push(a.mul(b)?);
            }
        }
    }
    base.extend(products);
    let mut out = Vec::new();
    for chi in base {
        for t in 1..=3u32 {
            let level = chi.level() * t;
            if level <= BigUint::from(max_level) {
                out.push(chi.change_level(&level)?);
            }
        }
    }
    Ok(out)
}

/// Least divisor `f` of the level such that `chi(a) = chi(b)` whenever
/// `a = b (mod f)`, by comparing all pairs of units.
fn brute_conductor(chi: &DirichletCharacter) -> BigUint {
    let level = chi.level();
    let mut f = BigUint::one();
    loop {
        if (level % &f).is_zero() {
            let mut classes: BTreeMap<BigUint, &PadicNum> = BTreeMap::new();
            let ok = chi.table().iter().all(|(a, v)| *classes.entry(a % &f).or_insert(v) == v);
            if ok {
                return f;
            }
        }
        f += 1u32;
    }
}

fn conductor_machinery(_: Profile, _: u64) -> Result<(bool, String)> {
    let mut chars = sample_characters(100, 6)?;
    for p in [3u64, 7] {
        for k in 0..p as i64 - 1 {
            chars.push(DirichletCharacter::omega_pow(p, k, 6)?);
        }
    }
    for chi in &chars {
        let f = chi.conductor();
        if f != brute_conductor(chi) {
            return Ok((false, format!("conductor mismatch at level {}", chi.level())));
        }
        let lifted = chi.change_level(&(chi.level() * 2u32))?;
        if lifted.conductor() != f {
            return Ok((false, format!("change_level moved the conductor at level {}", chi.level())));
        }
        let prim = chi.asso_primitive();
        if !prim.is_primitive() || prim.change_level(chi.level())? != *chi {
            return Ok((false, format!("primitive round trip fails at level {}", chi.level())));
        }
    }
    Ok((true, format!("{} characters of level <= 100", chars.len())))
}

fn generalized_bernoulli(profile: Profile, _: u64) -> Result<(bool, String)> {
    let max_level = if profile == Profile::Full { 40 } else { 20 };
    let chars = sample_characters(max_level, 6)?;
    let mut checked = 0;
    for chi in &chars {
        let f = chi.conductor();
        for m in 0..=6 {
            let base = bernoulli_coefficients(chi, m, &f)?;
            for t in [2u32, 3] {
                if bernoulli_coefficients(chi, m, &(&f * t))? != base {
                    return Ok((false, format!("F = {t}f differs at level {}, m = {m}", chi.level())));
                }
            }
            checked += 1;
        }
    }
    let chi3 = prime_character(5, 3, 2, 8)?;
    if general_bernoulli_rational(&chi3, 1)? != Some(q(-1, 3)) {
        return Ok((false, "B_1 of the quadratic character mod 3 is not -1/3".into()));
    }
    Ok((true, format!("{checked} (character, m) pairs with F in {{f, 2f, 3f}}; B_1 = -1/3 mod 3")))
}

fn distribution_compatibility(profile: Profile, _: u64) -> Result<(bool, String)> {
    let max_level = if profile == Profile::Full { 4 } else { 3 };
    let mut checked = 0;
    let mut tuples = 0;
    for p in [3u64, 5, 7] {
        for d in [1u64, 2, 4] {
            for c in [2u64, 3, 7] {
                let Ok(params) = BernoulliParams::new(p, d, c) else { continue };
                let (n, failures) = compatibility_sweep(&params, EcVariant::IntegerInverse, max_level)?;
                if let Some(f) = failures.first() {
                    return Ok((false, format!("p={p} d={d} c={c}: {f:?}")));
                }
                checked += n;
                tuples += 1;
            }
        }
    }
    let params = BernoulliParams::new(3, 1u32, 2u32)?;
    let (_, failures) = compatibility_sweep(&params, EcVariant::RationalDivision, 2)?;
    if failures.is_empty() {
        return Ok((false, "the rational-division variant unexpectedly passed".into()));
    }
    Ok((
        true,
        format!(
            "{checked} residues over {tuples} parameter sets; rational-division variant fails on {} residues",
            failures.len()
        ),
    ))
}

fn measure_boundedness(profile: Profile, seed: u64) -> Result<(bool, String)> {
    let samples = if profile == Profile::Full { 200 } else { 50 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sets = [(3u64, 1u64, 2u64), (5, 1, 2), (5, 2, 3), (7, 1, 3), (5, 1, 11)];
    for (p, d, c) in sets {
        let params = BernoulliParams::new(p, d, c)?;
        for _ in 0..samples {
            let level = rng.gen_range(0..=2);
            let f = random_cylinder(&mut rng, p, &BigUint::from(d), level, 10)?;
            let bound = norm_bound_check(&params, &f, 10)?;
            if !bound.ok {
                return Ok((false, format!("p={p} d={d} c={c}: {} > {}", bound.lhs, bound.rhs)));
            }
        }
    }
    Ok((true, format!("{samples} random cylinder functions for each of {} parameter sets", sets.len())))
}

fn locally_constant_integration(profile: Profile, seed: u64) -> Result<(bool, String)> {
    let count = if profile == Profile::Full { 50 } else { 10 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let params = BernoulliParams::new(5, 1u32, 2u32)?;
    for i in 0..count {
        let level = rng.gen_range(0..=3u32);
        let size = 5usize.pow(level);
        let values: Vec<Rational> = (0..size).map(|_| q(rng.gen_range(-1000..=1000), rng.gen_range(1..=60))).collect();
        let base = riemann_sum_rational(&params, &values, level, level)?;
        for j in level + 1..=level + 2 {
            if riemann_sum_rational(&params, &values, level, j)? != base {
                return Ok((false, format!("sample {i} (level {level}) changes at j = {j}")));
            }
        }
    }
    Ok((true, format!("{count} random cylinders at p = 5, levels <= 3, two extra levels each")))
}

fn valuation_of(x: &PadicNum) -> i64 {
    x.valuation().lower_bound().unwrap_or(i64::MAX)
}

fn first_limit(_: Profile, _: u64) -> Result<(bool, String)> {
    let chi = DirichletCharacter::omega_pow(5, 2, 20)?;
    let mut detail = Vec::new();
    for k in [2u32, 4] {
        let target = theorem1_target(&chi, k)?;
        let vals = (2..=5)
            .map(|j| Ok(valuation_of(&theorem1_truncation(&chi, k, j)?.sub(&target)?)))
            .collect::<Result<Vec<i64>>>()?;
        if vals[0] < 1 || vals.windows(2).any(|w| w[0] > w[1]) {
            return Ok((false, format!("k={k}: valuations {vals:?}")));
        }
        detail.push(format!("k={k}: {vals:?}"));
    }
    Ok((true, detail.join("; ")))
}

fn unit_sum_decay(_: Profile, _: u64) -> Result<(bool, String)> {
    let chi = DirichletCharacter::omega_pow(5, 2, 20)?;
    let mut detail = Vec::new();
    for k in [2u32, 4] {
        let vals = (2..=5).map(|j| Ok(valuation_of(&theorem2_unit_sum(&chi, k, j)?))).collect::<Result<Vec<i64>>>()?;
        if vals.windows(2).any(|w| w[0] > w[1]) {
            return Ok((false, format!("k={k}: valuations {vals:?}")));
        }
        detail.push(format!("k={k}: {vals:?}"));
    }
    Ok((true, detail.join("; ")))
}

/// The interpolation grid: the main cases at `p = 5` and the `p = 3`
/// trivial-character cases.
pub fn interpolation_reports() -> Result<Vec<(String, VerifyReport)>> {
    let mut out = Vec::new();
    let cases: [(u64, i64, &[u64], u32); 2] = [(5, 2, &[2, 3], 7), (3, 0, &[2, 5], 10)];
    for (p, k, cs, j_max) in cases {
        for &c in cs {
            for n in [2u32, 4] {
                let measure = BernoulliParams::new(p, 1u32, c)?;
                let chi = DirichletCharacter::omega_pow(p, k, 12)?;
                let params = LpParams::new(measure, 1, chi, 12, 0, j_max, 4)?;
                let label = format!("p={p} chi=omega^{k} c={c} n={n}");
                out.push((label, verify_interpolation(&params, n)?));
            }
        }
    }
    Ok(out)
}

fn interpolation(_: Profile, _: u64) -> Result<(bool, String)> {
    let reports = interpolation_reports()?;
    for (label, r) in &reports {
        if !r.pass {
            return Ok((false, format!("{label}: {r:?}")));
        }
        if label.starts_with("p=5") && r.level_used > 7 {
            return Ok((false, format!("{label}: converged only at level {}", r.level_used)));
        }
    }
    let all: Vec<VerifyReport> = reports.into_iter().map(|(_, r)| r).collect();
    match consistent_sign(&all) {
        Some(sign) => Ok((true, format!("{} cases agree to valuation >= 4 with sign {sign}", all.len()))),
        None => Ok((false, "signs differ between cases".into())),
    }
}

fn kummer_congruence(_: Profile, _: u64) -> Result<(bool, String)> {
    let p = 5u64;
    let value = |n: usize| {
        let euler = Rational::one() - Rational::from_integer(BigInt::from(p).pow(n as u32 - 1));
        euler * bernoulli(n) / q(n as i64, 1)
    };
    let (a, b) = (value(2), value(6));
    let (ra, rb) = (rational_mod_pow(&a, p, 1)?, rational_mod_pow(&b, p, 1)?);
    let detail = format!("{a} = {ra} and {b} = {rb} mod 5");
    Ok((ra == rb && !a.denom().is_multiple_of(&BigInt::from(p)), detail))
}
