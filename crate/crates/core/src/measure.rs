//! The clopen basis of `Z/dZ × Z_p`, locally constant (cylinder) functions
//! on it, and the Bernoulli distribution `E_c`.
//!
//! Residues modulo `d * p^n` index the clopen sets of level `n`. A cylinder
//! function of level `j` is a value table over `Z/(d p^j)Z`. The Bernoulli
//! distribution assigns to the set of level `n` through `a`
//!
//! ```text
//! E_{c,n}(a) = {a/D} - c {c' a / D} + (c - 1)/2,   D = d p^n,  c c' = 1 mod D
//! ```
//!
//! and these values are compatible under refinement, so applying the
//! distribution to a cylinder function does not depend on the level used.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;

use crate::bernoulli::Rational;
use crate::error::{Error, Result};
use crate::modarith::{self, Residue};
use crate::padic::{pow_p, rational_norm, PadicNum};

/// `p`, `d` and the auxiliary integer `c` of the Bernoulli measure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BernoulliParams {
    p: u64,
    d: BigUint,
    c: BigUint,
}

impl BernoulliParams {
    pub fn new(p: u64, d: impl Into<BigUint>, c: impl Into<BigUint>) -> Result<Self> {
        let (d, c) = (d.into(), c.into());
        modarith::ensure_odd_prime(p)?;
        let pb = BigUint::from(p);
        if d.is_zero() {
            return Err(Error::ZeroModulus);
        }
        if !d.gcd(&pb).is_one() {
            return Err(Error::NotCoprime(d, pb));
        }
        if c < BigUint::from(2u32) {
            return Err(Error::Precondition("c must be at least 2".into()));
        }
        let dp = &d * &pb;
        if !c.gcd(&dp).is_one() {
            return Err(Error::NotCoprime(c, dp));
        }
        Ok(BernoulliParams { p, d, c })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn d(&self) -> &BigUint {
        &self.d
    }

    pub fn c(&self) -> &BigUint {
        &self.c
    }

    /// `d * p^n`
    pub fn modulus(&self, n: u32) -> BigUint {
        &self.d * pow_p(self.p, n)
    }

    /// `K = 1 + |c|_p + |(c-1)/2|_p`
    pub fn bound_constant(&self) -> Rational {
        let c = Rational::from_integer(BigInt::from(self.c.clone()));
        let half = (&c - Rational::one()) / Rational::from_integer(BigInt::from(2));
        Rational::one() + rational_norm(&c, self.p) + rational_norm(&half, self.p)
    }
}

fn table_size(modulus: &BigUint) -> Result<usize> {
    modulus
        .to_usize()
        .ok_or_else(|| Error::Precondition(format!("level modulus {modulus} is too large for a value table")))
}

/// `U_{n,a}`: the points of `Z/dZ × Z_p` that reduce to `a` mod `d p^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClopenSet {
    p: u64,
    d: BigUint,
    level: u32,
    base: Residue,
}

impl ClopenSet {
    pub fn new(p: u64, d: impl Into<BigUint>, level: u32, base: impl Into<BigInt>) -> Result<Self> {
        let d = d.into();
        let base = modarith::reduce(&(&d * pow_p(p, level)), &base.into())?;
        Ok(ClopenSet { p, d, level, base })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn base(&self) -> &Residue {
        &self.base
    }

    /// The same set seen through `Z/dZ × Z/p^n Z`.
    pub fn product_view(&self) -> Result<(Residue, Residue)> {
        modarith::crt_split(&self.d, &pow_p(self.p, self.level), &self.base)
    }
}

/// A locally constant function on `Z/dZ × Z_p` that factors through
/// `Z/(d p^level)Z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CylinderFunction {
    p: u64,
    d: BigUint,
    level: u32,
    values: Vec<PadicNum>,
}

impl CylinderFunction {
    pub fn new(p: u64, d: impl Into<BigUint>, level: u32, values: Vec<PadicNum>) -> Result<Self> {
        let d = d.into();
        let size = table_size(&(&d * pow_p(p, level)))?;
        if values.len() != size {
            return Err(Error::Precondition(format!(
                "cylinder function of level {level} needs {size} values, got {}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| v.p() != p) {
            return Err(Error::PrimeMismatch(p, v.p()));
        }
        Ok(CylinderFunction { p, d, level, values })
    }

    pub fn from_fn(p: u64, d: impl Into<BigUint>, level: u32, f: impl Fn(&BigUint) -> PadicNum) -> Result<Self> {
        let d = d.into();
        let size = table_size(&(&d * pow_p(p, level)))?;
        let values = (0..size).map(|a| f(&BigUint::from(a))).collect();
        Self::new(p, d, level, values)
    }

    pub fn constant(p: u64, d: impl Into<BigUint>, level: u32, value: &PadicNum) -> Result<Self> {
        Self::from_fn(p, d, level, |_| value.clone())
    }

    pub fn zero(p: u64, d: impl Into<BigUint>, level: u32) -> Result<Self> {
        Self::constant(p, d, level, &PadicNum::zero(p))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn d(&self) -> &BigUint {
        &self.d
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn modulus(&self) -> BigUint {
        &self.d * pow_p(self.p, self.level)
    }

    pub fn values(&self) -> &[PadicNum] {
        &self.values
    }

    /// The value on any integer, read through its residue mod `d p^level`.
    pub fn value_at(&self, x: &BigUint) -> &PadicNum {
        let idx = (x % self.modulus()).to_usize().expect("index below table size");
        &self.values[idx]
    }

    /// The same function tabulated at a finer level.
    pub fn refine_level(&self, level: u32) -> Result<Self> {
        if level < self.level {
            return Err(Error::LevelOrder { coarse: level, fine: self.level });
        }
        let coarse = self.values.len();
        let size = table_size(&(&self.d * pow_p(self.p, level)))?;
        let values = (0..size).map(|a| self.values[a % coarse].clone()).collect();
        Self::new(self.p, self.d.clone(), level, values)
    }

    fn check_domain(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch(self.p, other.p));
        }
        if self.d != other.d {
            return Err(Error::ModulusMismatch { expected: self.d.clone(), found: other.d.clone() });
        }
        Ok(())
    }

    /// Pointwise sum, at the finer of the two levels.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_domain(other)?;
        let level = self.level.max(other.level);
        let (a, b) = (self.refine_level(level)?, other.refine_level(level)?);
        let values = a.values.iter().zip(&b.values).map(|(x, y)| x.add(y)).collect::<Result<_>>()?;
        Self::new(self.p, self.d.clone(), level, values)
    }

    pub fn scale(&self, alpha: &PadicNum) -> Result<Self> {
        let values = self.values.iter().map(|v| v.mul(alpha)).collect::<Result<_>>()?;
        Self::new(self.p, self.d.clone(), self.level, values)
    }

    /// Upper bound on `sup |f(a)|_p`.
    pub fn sup_norm(&self) -> Rational {
        self.values.iter().map(PadicNum::norm_upper_bound).max().unwrap_or_else(Rational::zero)
    }
}

/// The indicator function of `U`, with value 1 at precision `relprec`.
pub fn char_fn(u: &ClopenSet, relprec: u32) -> Result<CylinderFunction> {
    let one = PadicNum::one(u.p, relprec);
    let base = u.base.value().clone();
    CylinderFunction::from_fn(u.p, u.d.clone(), u.level, |a| if *a == base { one.clone() } else { PadicNum::zero(u.p) })
}

/// `f = sum_a f(a) * char_fn(U_{level,a})`, as a list of pairs.
pub fn cylinder_decompose(f: &CylinderFunction) -> Vec<(PadicNum, ClopenSet)> {
    let modulus = f.modulus();
    f.values
        .iter()
        .enumerate()
        .map(|(a, v)| {
            let base = modarith::reduce(&modulus, &BigInt::from(a)).expect("positive modulus");
            (v.clone(), ClopenSet { p: f.p, d: f.d.clone(), level: f.level, base })
        })
        .collect()
}

/// Rebuilds a cylinder function from coefficient/clopen pairs.
pub fn recombine(p: u64, d: &BigUint, level: u32, pairs: &[(PadicNum, ClopenSet)]) -> Result<CylinderFunction> {
    let mut acc = CylinderFunction::zero(p, d.clone(), level)?;
    for (coeff, u) in pairs {
        if coeff.is_exact_zero() {
            continue;
        }
        let relprec = coeff.relprec().unwrap_or(1);
        acc = acc.add(&char_fn(u, relprec)?.scale(coeff)?)?;
    }
    Ok(acc)
}

/// The residues mod `d p^m` lying over `a` mod `d p^n`.
pub fn equi_class(p: u64, d: &BigUint, n: u32, m: u32, a: &Residue) -> Result<Vec<Residue>> {
    if m < n {
        return Err(Error::LevelOrder { coarse: n, fine: m });
    }
    let coarse = d * pow_p(p, n);
    if a.modulus() != &coarse {
        return Err(Error::ModulusMismatch { expected: coarse, found: a.modulus().clone() });
    }
    let fine = d * pow_p(p, m);
    let count = pow_p(p, m - n);
    let mut out = Vec::new();
    let mut t = BigUint::zero();
    while t < count {
        let x = a.value() + &t * &coarse;
        out.push(modarith::reduce(&fine, &BigInt::from(x))?);
        t += 1u32;
    }
    Ok(out)
}

/// Which reading of `E_c` to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EcVariant {
    /// `c {c' a / D}` with an integer inverse `c'` of `c` mod `D`.
    #[default]
    IntegerInverse,
    /// `c {a / (c D)}`: divides by `c` inside the fractional part. Kept as a
    /// diagnostic; it is not a distribution.
    RationalDivision,
}

fn fract(x: &Rational) -> Rational {
    x - x.floor()
}

/// `E_{c,n}(a)` as an exact rational.
pub fn bernoulli_distribution(params: &BernoulliParams, n: u32, a: &Residue) -> Result<Rational> {
    bernoulli_distribution_with(params, EcVariant::IntegerInverse, n, a)
}

pub fn bernoulli_distribution_with(
    params: &BernoulliParams,
    variant: EcVariant,
    n: u32,
    a: &Residue,
) -> Result<Rational> {
    let modulus = params.modulus(n);
    if a.modulus() != &modulus {
        return Err(Error::ModulusMismatch { expected: modulus, found: a.modulus().clone() });
    }
    let big_d = BigInt::from(modulus.clone());
    let big_a = BigInt::from(a.value().clone());
    let c = BigInt::from(params.c.clone());
    let second = match variant {
        EcVariant::IntegerInverse => {
            let c_inv = modarith::inverse_mod(&c, &modulus)?;
            let r = (BigInt::from(c_inv.value().clone()) * &big_a).mod_floor(&big_d);
            Rational::new(r, big_d.clone())
        }
        EcVariant::RationalDivision => fract(&Rational::new(big_a.clone(), &c * &big_d)),
    };
    let first = fract(&Rational::new(big_a, big_d));
    let half = Rational::new(&c - BigInt::one(), BigInt::from(2));
    Ok(first - Rational::from_integer(c) * second + half)
}

/// Fast path for `E_{c,n}(a)` when the inverse of `c` mod `d p^n` is known.
pub(crate) fn bernoulli_distribution_raw(c: &BigInt, c_inv: &BigInt, modulus: &BigInt, a: &BigInt) -> Rational {
    // E * 2D = 2a - 2c (c' a mod D) + (c - 1) D
    let r = (c_inv * a).mod_floor(modulus);
    let two = BigInt::from(2);
    let numer = &two * a - &two * c * r + (c - BigInt::one()) * modulus;
    Rational::new(numer, two * modulus)
}

/// `sum of E_{c,m+1}(y)` over the lifts `y` of `x`; equals `E_{c,m}(x)`.
pub fn distribution_refine_sum(params: &BernoulliParams, m: u32, x: &Residue) -> Result<Rational> {
    distribution_refine_sum_with(params, EcVariant::IntegerInverse, m, x)
}

pub fn distribution_refine_sum_with(
    params: &BernoulliParams,
    variant: EcVariant,
    m: u32,
    x: &Residue,
) -> Result<Rational> {
    let mut total = Rational::zero();
    for y in equi_class(params.p, &params.d, m, m + 1, x)? {
        total += bernoulli_distribution_with(params, variant, m + 1, &y)?;
    }
    Ok(total)
}

/// `sum_a f(a) E_{c,level}(a)` embedded at `relprec` digits.
pub fn measure_apply(params: &BernoulliParams, f: &CylinderFunction, relprec: u32) -> Result<PadicNum> {
    if f.p != params.p || f.d != params.d {
        return Err(Error::Precondition("cylinder function lives on a different space".into()));
    }
    let modulus = params.modulus(f.level);
    let big_d = BigInt::from(modulus.clone());
    let c = BigInt::from(params.c.clone());
    let c_inv = BigInt::from(modarith::inverse_mod(&c, &modulus)?.value().clone());
    let mut acc = PadicNum::zero(params.p);
    for (a, v) in f.values.iter().enumerate() {
        if v.is_exact_zero() {
            continue;
        }
        let e = bernoulli_distribution_raw(&c, &c_inv, &big_d, &BigInt::from(a));
        acc = acc.add(&v.mul(&PadicNum::from_rational(params.p, &e, relprec))?)?;
    }
    Ok(acc)
}

/// Keeps `f` on residues coprime to `d p` and sets it to zero elsewhere.
pub fn extend_by_zero(f: &CylinderFunction) -> CylinderFunction {
    let dp = &f.d * f.p;
    let values = f
        .values
        .iter()
        .enumerate()
        .map(|(a, v)| if BigUint::from(a).gcd(&dp).is_one() { v.clone() } else { PadicNum::zero(f.p) })
        .collect();
    CylinderFunction { p: f.p, d: f.d.clone(), level: f.level, values }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NormBound {
    #[serde(serialize_with = "ser_rational")]
    pub lhs: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub rhs: Rational,
    pub ok: bool,
}

pub(crate) fn ser_rational<S: serde::Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

/// `|E_c(f)|_p <= K sup_a |f(a)|_p`.
pub fn norm_bound_check(params: &BernoulliParams, f: &CylinderFunction, relprec: u32) -> Result<NormBound> {
    let value = measure_apply(params, f, relprec)?;
    let lhs = value.norm_upper_bound();
    let rhs = params.bound_constant() * f.sup_norm();
    let ok = lhs <= rhs;
    Ok(NormBound { lhs, rhs, ok })
}

/// A random p-adic number: zero, or a small rational times a power of `p`.
pub fn random_padic<R: Rng>(rng: &mut R, p: u64, relprec: u32) -> PadicNum {
    if rng.gen_ratio(1, 8) {
        return PadicNum::zero(p);
    }
    let num: i64 = rng.gen_range(-10_000..=10_000);
    let den: i64 = rng.gen_range(1..=500);
    let shift: i64 = rng.gen_range(-3..=3);
    let q = Rational::new(BigInt::from(num), BigInt::from(den)) * crate::padic::p_power_rational(p, shift);
    PadicNum::from_rational(p, &q, relprec)
}

pub fn random_cylinder<R: Rng>(rng: &mut R, p: u64, d: &BigUint, level: u32, relprec: u32) -> Result<CylinderFunction> {
    let size = table_size(&(d * pow_p(p, level)))?;
    let values = (0..size).map(|_| random_padic(rng, p, relprec)).collect();
    CylinderFunction::new(p, d.clone(), level, values)
}

/// A tuple on which refinement changes the distribution value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompatibilityFailure {
    pub level: u32,
    pub x: String,
    pub coarse: String,
    pub refined: String,
}

/// Checks `distribution_refine_sum = E_{c,m}` for every `x` and `m < max_level`.
pub fn compatibility_sweep(
    params: &BernoulliParams,
    variant: EcVariant,
    max_level: u32,
) -> Result<(usize, Vec<CompatibilityFailure>)> {
    let mut checked = 0;
    let mut failures = Vec::new();
    for m in 0..max_level {
        let modulus = params.modulus(m);
        for x in 0..table_size(&modulus)? {
            let x = modarith::reduce(&modulus, &BigInt::from(x))?;
            let coarse = bernoulli_distribution_with(params, variant, m, &x)?;
            let refined = distribution_refine_sum_with(params, variant, m, &x)?;
            checked += 1;
            if coarse != refined {
                failures.push(CompatibilityFailure {
                    level: m,
                    x: x.value().to_string(),
                    coarse: coarse.to_string(),
                    refined: refined.to_string(),
                });
            }
        }
    }
    Ok((checked, failures))
}
