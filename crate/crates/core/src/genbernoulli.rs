//! Generalized Bernoulli numbers `B_{m,chi}` and finite truncations of the
//! two limits relating them to twisted power sums.
//!
//! For a character with conductor `f`, primitive companion `chi0` and any
//! positive multiple `F` of `f`,
//!
//! ```text
//! B_{m,chi} = F^(m-1) * sum_{a=1}^{F} chi0(a) B_m(a/F)
//! ```
//!
//! where `chi0(a)` is read through `a mod f`. Grouping the sum by the class
//! `b = a mod f` gives `B_{m,chi} = sum_b chi0(b) r_b` with exact rationals
//! `r_b`; those coefficients are what [`bernoulli_coefficients`] returns.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::bernoulli::{bernoulli_poly, Rational};
use crate::dirichlet::DirichletCharacter;
use crate::error::{Error, Result};
use crate::modarith;
use crate::padic::{pow_p, PadicNum};

/// `F^e` as an exact rational; `e` may be negative.
fn rational_pow(base: &BigUint, e: i64) -> Rational {
    let magnitude = BigInt::from(base.pow(e.unsigned_abs() as u32));
    if e >= 0 {
        Rational::from_integer(magnitude)
    } else {
        Rational::new(BigInt::one(), magnitude)
    }
}

/// Exact coefficients `r_b`, keyed by the unit `b` mod `conductor(chi)`.
pub fn bernoulli_coefficients(
    chi: &DirichletCharacter,
    m: usize,
    big_f: &BigUint,
) -> Result<BTreeMap<BigUint, Rational>> {
    let f = chi.conductor();
    if big_f.is_zero() || !(big_f % &f).is_zero() {
        return Err(Error::NotMultipleOfConductor { conductor: f, multiple: big_f.clone() });
    }
    let poly = bernoulli_poly(m);
    let denom = BigInt::from(big_f.clone());
    let mut coeffs: BTreeMap<BigUint, Rational> = BTreeMap::new();
    let mut a = BigUint::one();
    while &a <= big_f {
        let b = &a % &f;
        if f.is_one() || b.gcd(&f).is_one() {
            let x = Rational::new(BigInt::from(a.clone()), denom.clone());
            *coeffs.entry(b).or_insert_with(Rational::zero) += poly.eval(&x);
        }
        a += 1u32;
    }
    let scale = rational_pow(big_f, m as i64 - 1);
    for c in coeffs.values_mut() {
        *c *= &scale;
    }
    Ok(coeffs)
}

fn embed_coefficients(chi0: &DirichletCharacter, coeffs: &BTreeMap<BigUint, Rational>) -> Result<PadicNum> {
    let p = chi0.p();
    let mut acc = PadicNum::zero(p);
    for (b, r) in coeffs {
        let term = chi0.eval_u(b).mul(&PadicNum::from_rational(p, r, chi0.relprec()))?;
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

/// `B_{m,chi}` with `F = conductor(chi)`.
pub fn general_bernoulli(chi: &DirichletCharacter, m: usize) -> Result<PadicNum> {
    general_bernoulli_via_multiple(chi, m, &chi.conductor())
}

/// `B_{m,chi}` computed from the `F`-fold sum for a multiple `F` of the
/// conductor.
pub fn general_bernoulli_via_multiple(chi: &DirichletCharacter, m: usize, big_f: &BigUint) -> Result<PadicNum> {
    let coeffs = bernoulli_coefficients(chi, m, big_f)?;
    embed_coefficients(&chi.asso_primitive(), &coeffs)
}

/// The exact rational value of `B_{m,chi}` when `chi` only takes the values
/// `+1` and `-1`; `None` otherwise.
pub fn general_bernoulli_rational(chi: &DirichletCharacter, m: usize) -> Result<Option<Rational>> {
    let chi0 = chi.asso_primitive();
    let one = PadicNum::one(chi.p(), chi.relprec());
    let minus_one = one.neg();
    let coeffs = bernoulli_coefficients(chi, m, &chi0.level().clone())?;
    let mut total = Rational::zero();
    for (b, r) in coeffs {
        let v = chi0.eval_u(&b);
        if v == one {
            total += r;
        } else if v == minus_one {
            total -= r;
        } else {
            return Ok(None);
        }
    }
    Ok(Some(total))
}

/// Level data `d * p^m` of a character used in the twisted sums.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelSplit {
    pub d: BigUint,
    pub m: u32,
}

/// Writes the level of `chi` as `d * p^m` with `p` not dividing `d`.
pub fn split_level(chi: &DirichletCharacter) -> LevelSplit {
    let pb = BigUint::from(chi.p());
    let mut d = chi.level().clone();
    let mut m = 0;
    while (&d % &pb).is_zero() {
        d /= &pb;
        m += 1;
    }
    LevelSplit { d, m }
}

fn twisted_setup(chi: &DirichletCharacter, k: u32) -> Result<(LevelSplit, DirichletCharacter)> {
    let split = split_level(chi);
    if split.m < 1 {
        return Err(Error::Precondition(format!(
            "character level {} must be divisible by p = {}",
            chi.level(),
            chi.p()
        )));
    }
    if !chi.is_even() {
        return Err(Error::Precondition("character must be even".into()));
    }
    if k < 1 {
        return Err(Error::Precondition("k must be at least 1".into()));
    }
    let omega = DirichletCharacter::omega_pow(chi.p(), -i64::from(k), chi.relprec())?;
    Ok((split, chi.mul(&omega)?))
}

/// `sum over units a mod d p^j of psi(a) * a^e`, where `psi` is primitive.
fn twisted_unit_sum(psi: &DirichletCharacter, split: &LevelSplit, j: u32, e: u32) -> Result<PadicNum> {
    let p = psi.p();
    let relprec = psi.relprec();
    let modulus = pow_p(p, relprec);
    let (units, _) = modarith::partition_range(&split.d, p, j)?;
    let exponent = BigUint::from(e);
    let mut acc = PadicNum::zero(p);
    for a in units {
        let power = a.modpow(&exponent, &modulus);
        let term = psi.eval_u(&a).mul(&PadicNum::from_integer(p, &BigInt::from(power), relprec))?;
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

/// `(1/(d p^j)) * sum_{a unit mod d p^j} (chi omega^-k)(a) a^k`.
pub fn theorem1_truncation(chi: &DirichletCharacter, k: u32, j: u32) -> Result<PadicNum> {
    let (split, psi) = twisted_setup(chi, k)?;
    if i64::from(chi.relprec()) <= i64::from(j) {
        return Err(Error::InsufficientPrecision { needed: i64::from(j) + 1, available: i64::from(chi.relprec()) });
    }
    let sum = twisted_unit_sum(&psi, &split, j, k)?;
    let scale = Rational::new(BigInt::one(), BigInt::from(&split.d * pow_p(chi.p(), j)));
    sum.mul(&PadicNum::from_rational(chi.p(), &scale, chi.relprec()))
}

/// The limit of [`theorem1_truncation`]:
/// `(1 - (chi omega^-k)(p) p^(k-1)) * B_{k, chi omega^-k}`.
pub fn theorem1_target(chi: &DirichletCharacter, k: u32) -> Result<PadicNum> {
    let (_, psi) = twisted_setup(chi, k)?;
    let p = chi.p();
    let euler =
        psi.asso_eval(&BigInt::from(p)).mul(&PadicNum::from_integer(p, &BigInt::from(p).pow(k - 1), chi.relprec()))?;
    let factor = PadicNum::one(p, chi.relprec()).sub(&euler)?;
    factor.mul(&general_bernoulli(&psi, k as usize)?)
}

/// `sum_{i unit mod d p^j} (chi omega^-k)(i) i^(k-1)`, which tends to zero.
pub fn theorem2_unit_sum(chi: &DirichletCharacter, k: u32, j: u32) -> Result<PadicNum> {
    let (split, psi) = twisted_setup(chi, k)?;
    twisted_unit_sum(&psi, &split, j, k - 1)
}
