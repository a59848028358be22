//! The p-adic L-function as a limit of Riemann sums against `E_c`, the
//! closed-form special values it interpolates, and the check that the two
//! agree.
//!
//! For an even character `chi` of level `d p^m` and a weight `<a>^k`,
//!
//! ```text
//! S_j = sum over units a mod d p^j of (chi omega^-1)(a) <a>^k E_{c,j}(a)
//! ```
//!
//! Every factor lies in `Z_p` (the values of `E_c` lie in `(1/2) Z`), so the
//! sums are computed exactly in `Z/p^N Z` and carry absolute precision `N`
//! at every level.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::bernoulli::Rational;
use crate::dirichlet::DirichletCharacter;
use crate::error::{Error, Result};
use crate::genbernoulli::general_bernoulli;
use crate::measure::{bernoulli_distribution_raw, BernoulliParams};
use crate::modarith::{self, UnitResidue};
use crate::padic::{pow_p, PadicNum};

/// The weight `a -> <a>^k` on `Z_p^x`, trivial on the `Z/dZ` component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Weight {
    pub k: u32,
}

impl Weight {
    pub fn new(k: u32) -> Self {
        Weight { k }
    }
}

/// Everything needed to evaluate the L-function at one weight.
#[derive(Debug, Clone)]
pub struct LpParams {
    pub measure: BernoulliParams,
    pub m: u32,
    pub chi: DirichletCharacter,
    pub relprec: u32,
    pub j_min: u32,
    pub j_max: u32,
    pub target: i64,
}

impl LpParams {
    /// Validates the standing hypotheses and lifts `chi` to level `d p^m`
    /// when it is given at a divisor of that level.
    pub fn new(
        measure: BernoulliParams,
        m: u32,
        chi: DirichletCharacter,
        relprec: u32,
        j_min: u32,
        j_max: u32,
        target: i64,
    ) -> Result<Self> {
        let p = measure.p();
        if m < 1 {
            return Err(Error::Precondition("m must be at least 1".into()));
        }
        if chi.p() != p {
            return Err(Error::CharacterPrimeMismatch(chi.p(), p));
        }
        let level = measure.modulus(m);
        if !(&level % chi.level()).is_zero() {
            return Err(Error::NotDivisible { divisor: chi.level().clone(), multiple: level });
        }
        let chi = chi.change_level(&level)?;
        if !chi.is_even() {
            return Err(Error::Precondition("character must be even".into()));
        }
        let conductor = chi.conductor();
        if !(&conductor % measure.d()).is_zero() {
            return Err(Error::NotDivisible { divisor: measure.d().clone(), multiple: conductor });
        }
        if relprec == 0 {
            return Err(Error::Precondition("precision must be positive".into()));
        }
        if j_max < m.max(j_min) {
            return Err(Error::Precondition(format!(
                "j_max = {j_max} is below the first usable level {}",
                m.max(j_min)
            )));
        }
        Ok(LpParams { measure, m, chi, relprec, j_min, j_max, target })
    }

    pub fn p(&self) -> u64 {
        self.measure.p()
    }

    /// Precision used for all p-adic quantities: the smaller of the working
    /// precision and the precision of the character values.
    pub fn precision(&self) -> u32 {
        self.relprec.min(self.chi.relprec())
    }

    fn level_of(&self, modulus: &BigUint) -> Option<u32> {
        let d = self.measure.d();
        if !(modulus % d).is_zero() {
            return None;
        }
        let mut q = modulus / d;
        let pb = BigUint::from(self.p());
        let mut j = 0;
        while (&q % &pb).is_zero() {
            q /= &pb;
            j += 1;
        }
        q.is_one().then_some(j)
    }
}

/// `<a> = omega^-1(a) a`, raised to the `k`.
pub fn weight_eval(w: Weight, p: u64, a: &UnitResidue, relprec: u32) -> Result<PadicNum> {
    if w.k == 0 {
        return Ok(PadicNum::one(p, relprec));
    }
    let a_int = BigInt::from(a.value().clone());
    let omega = crate::dirichlet::teichmuller(p, &a_int, relprec)?;
    let principal = omega.inv()?.mul(&PadicNum::from_integer(p, &a_int, relprec))?;
    principal.pow(w.k)
}

/// `(chi omega^-1)(a) <a>^k` for a unit `a` mod `d p^j` with `j >= m`.
pub fn integrand_eval(params: &LpParams, w: Weight, a: &UnitResidue) -> Result<PadicNum> {
    let j = params
        .level_of(a.modulus())
        .ok_or_else(|| Error::Precondition(format!("{} is not of the form d p^j", a.modulus())))?;
    if j < params.m {
        return Err(Error::LevelTooLow { level: j, min: params.m });
    }
    let prec = params.precision();
    let psi = params.chi.mul(&DirichletCharacter::omega_pow(params.p(), -1, prec)?)?;
    let value = psi.asso_eval(&BigInt::from(a.value().clone()));
    value.mul(&weight_eval(w, params.p(), a, prec)?)
}

/// Precomputed tables for fast sums in `Z/p^N Z`.
struct Integrator {
    p: u64,
    modulus: BigUint,
    psi_level: BigUint,
    psi: HashMap<BigUint, BigUint>,
    omega_inv: Vec<BigUint>,
    inv2: BigUint,
    c: BigInt,
}

fn appr_unit(v: &PadicNum, n: u32) -> Result<BigUint> {
    v.appr(n)
}

impl Integrator {
    fn new(params: &LpParams) -> Result<Self> {
        let p = params.p();
        let n = params.precision();
        let psi = params.chi.mul(&DirichletCharacter::omega_pow(p, -1, n)?)?;
        let psi_table = psi.table().iter().map(|(a, v)| Ok((a.clone(), appr_unit(v, n)?))).collect::<Result<_>>()?;
        let omega_inv_char = DirichletCharacter::omega_pow(p, -1, n)?;
        let mut omega_inv = vec![BigUint::zero()];
        for a in 1..p {
            omega_inv.push(appr_unit(&omega_inv_char.eval_u(&BigUint::from(a)), n)?);
        }
        let modulus = pow_p(p, n);
        let inv2 = modarith::inverse_mod(&BigInt::from(2), &modulus)?.value().clone();
        Ok(Integrator {
            p,
            modulus,
            psi_level: psi.level().clone(),
            psi: psi_table,
            omega_inv,
            inv2,
            c: BigInt::from(params.measure.c().clone()),
        })
    }

    /// `<a>^k mod p^N`.
    fn weight(&self, a: &BigUint, k: u32) -> BigUint {
        if k == 0 {
            return BigUint::one() % &self.modulus;
        }
        let idx = (a % self.p).to_usize().expect("residue mod p");
        let principal = (&self.omega_inv[idx] * a) % &self.modulus;
        principal.modpow(&BigUint::from(k), &self.modulus)
    }

    /// `E_{c,j}(a) mod p^N` from its exact value in `(1/2) Z`.
    fn distribution(&self, c_inv: &BigInt, big_d: &BigInt, a: &BigUint) -> BigUint {
        let e = bernoulli_distribution_raw(&self.c, c_inv, big_d, &BigInt::from(a.clone()));
        let twice = (e * Rational::from_integer(BigInt::from(2))).to_integer();
        let twice = twice.mod_floor(&BigInt::from(self.modulus.clone()));
        (twice.to_biguint().expect("reduced") * &self.inv2) % &self.modulus
    }

    fn sum(&self, d: &BigUint, j: u32, mut f: impl FnMut(&BigUint) -> BigUint) -> Result<BigUint> {
        let level = d * pow_p(self.p, j);
        let big_d = BigInt::from(level.clone());
        let c_inv = BigInt::from(modarith::inverse_mod(&self.c, &level)?.value().clone());
        let (units, _) = modarith::partition_range(d, self.p, j)?;
        let mut acc = BigUint::zero();
        for a in &units {
            let term = f(a) * self.distribution(&c_inv, &big_d, a);
            acc = (acc + term) % &self.modulus;
        }
        Ok(acc)
    }

    fn riemann_sum(&self, d: &BigUint, k: u32, j: u32) -> Result<BigUint> {
        self.sum(d, j, |a| {
            let chi = &self.psi[&(a % &self.psi_level)];
            (chi * self.weight(a, k)) % &self.modulus
        })
    }
}

fn residue_to_padic(p: u64, x: &BigUint, n: u32) -> PadicNum {
    let v = PadicNum::from_integer(p, &BigInt::from(x.clone()), n);
    if v.is_exact_zero() {
        PadicNum::zero_to_precision(p, i64::from(n))
    } else {
        v.truncate_abs(i64::from(n))
    }
}

fn check_level(params: &LpParams, j: u32) -> Result<()> {
    if j < params.m {
        return Err(Error::LevelTooLow { level: j, min: params.m });
    }
    Ok(())
}

/// `S_j`, known modulo `p^N`.
pub fn riemann_sum(params: &LpParams, w: Weight, j: u32) -> Result<PadicNum> {
    check_level(params, j)?;
    let integ = Integrator::new(params)?;
    let s = integ.riemann_sum(params.measure.d(), w.k, j)?;
    Ok(residue_to_padic(params.p(), &s, params.precision()))
}

/// `sum over units a mod d p^j of f(a) E_{c,j}(a)` for a function given by
/// exact rational values on residues mod `d p^level`.
pub fn riemann_sum_rational(measure: &BernoulliParams, values: &[Rational], level: u32, j: u32) -> Result<Rational> {
    if j < level {
        return Err(Error::LevelTooLow { level: j, min: level });
    }
    let coarse = measure.modulus(level);
    if coarse.to_usize() != Some(values.len()) {
        return Err(Error::Precondition(format!("expected {coarse} values for level {level}, got {}", values.len())));
    }
    let fine = measure.modulus(j);
    let big_d = BigInt::from(fine.clone());
    let c = BigInt::from(measure.c().clone());
    let c_inv = BigInt::from(modarith::inverse_mod(&c, &fine)?.value().clone());
    let (units, _) = modarith::partition_range(measure.d(), measure.p(), j)?;
    let mut acc = Rational::zero();
    for a in units {
        let v = &values[(&a % &coarse).to_usize().expect("index below table size")];
        if v.is_zero() {
            continue;
        }
        acc += v * bernoulli_distribution_raw(&c, &c_inv, &big_d, &BigInt::from(a));
    }
    Ok(acc)
}

/// One step of the level iteration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Increment {
    pub level: u32,
    pub valuation: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EvalReport {
    pub value: PadicNum,
    pub level_used: u32,
    pub converged: bool,
    pub tail_valuation: i64,
    /// Valuations of `S_j - S_{j-1}` for every level computed.
    pub increments: Vec<Increment>,
}

fn valuation_floor(x: &PadicNum, cap: i64) -> i64 {
    x.valuation().lower_bound().unwrap_or(cap).min(cap)
}

/// Iterates `S_j` from `max(j_min, m)` up to `j_max` and stops once two
/// consecutive increments have valuation at least `T`, the first of them at
/// a level of at least `m + 1`.
#[allow(non_snake_case)]
pub fn p_adic_L(params: &LpParams, w: Weight) -> Result<EvalReport> {
    let n = params.precision();
    if i64::from(n) < params.target {
        return Err(Error::InsufficientPrecision { needed: params.target, available: i64::from(n) });
    }
    let p = params.p();
    let cap = i64::from(n);
    let integ = Integrator::new(params)?;
    let start = params.m.max(params.j_min);
    let mut prev = integ.riemann_sum(params.measure.d(), w.k, start)?;
    let mut increments: Vec<Increment> = Vec::new();
    let mut value = prev.clone();
    for j in start + 1..=params.j_max {
        let s = integ.riemann_sum(params.measure.d(), w.k, j)?;
        let delta = residue_to_padic(p, &((&s + &integ.modulus - &prev) % &integ.modulus), n);
        increments.push(Increment { level: j, valuation: valuation_floor(&delta, cap) });
        prev = s.clone();
        value = s;
        if let [.., a, b] = increments.as_slice() {
            if a.level > params.m && a.valuation >= params.target && b.valuation >= params.target {
                let (level_used, tail) = (a.level, b.valuation);
                return Ok(EvalReport {
                    value: residue_to_padic(p, &value, n),
                    level_used,
                    converged: true,
                    tail_valuation: tail,
                    increments,
                });
            }
        }
    }
    let tail_valuation = increments.last().map_or(cap, |i| i.valuation);
    Ok(EvalReport {
        value: residue_to_padic(p, &value, n),
        level_used: params.j_max,
        converged: false,
        tail_valuation,
        increments,
    })
}

/// `(1/n) (1 - chi(c) <c>^n) (1 - (chi omega^-n)(p) p^(n-1)) B_{n, chi omega^-n}`.
pub fn rhs_special_value(params: &LpParams, n: u32) -> Result<PadicNum> {
    if n < 1 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    let p = params.p();
    let prec = params.precision();
    let one = PadicNum::one(p, prec);
    let c = BigInt::from(params.measure.c().clone());
    let c_unit = modarith::reduce(&pow_p(p, prec), &c)?.to_unit()?;
    let chi_c = params.chi.asso_eval(&c);
    let c_factor = one.sub(&chi_c.mul(&weight_eval(Weight::new(n), p, &c_unit, prec)?)?)?;
    let psi = params.chi.mul(&DirichletCharacter::omega_pow(p, -i64::from(n), prec)?)?;
    let euler_term =
        psi.asso_eval(&BigInt::from(p)).mul(&PadicNum::from_integer(p, &BigInt::from(p).pow(n - 1), prec))?;
    let euler = one.sub(&euler_term)?;
    let b = general_bernoulli(&psi, n as usize)?;
    let inv_n = PadicNum::from_u64(p, u64::from(n), prec).inv()?;
    inv_n.mul(&c_factor)?.mul(&euler)?.mul(&b)
}

/// How the two sides are related: `L = R` or `L = -R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub n: u32,
    pub lhs: PadicNum,
    pub rhs: PadicNum,
    pub sign: Sign,
    pub valuation_of_difference: i64,
    pub valuation_plus: i64,
    pub valuation_minus: i64,
    pub target: i64,
    pub converged: bool,
    pub level_used: u32,
    pub pass: bool,
}

/// Compares `L_p` at weight `<a>^(n-1)` with the closed form. Passes when
/// the evaluation converged and exactly one of `L - R`, `L + R` has
/// valuation at least `T`.
pub fn verify_interpolation(params: &LpParams, n: u32) -> Result<VerifyReport> {
    if n < 2 {
        return Err(Error::Precondition("n must be at least 2".into()));
    }
    let report = p_adic_L(params, Weight::new(n - 1))?;
    let rhs = rhs_special_value(params, n)?;
    let lhs = report.value.clone();
    let cap = lhs.abs_precision().unwrap_or(i64::MAX).min(rhs.abs_precision().unwrap_or(i64::MAX));
    let plus = valuation_floor(&lhs.sub(&rhs)?, cap);
    let minus = valuation_floor(&lhs.add(&rhs)?, cap);
    let t = params.target;
    let (sign, diff) = if plus >= minus { (Sign::Plus, plus) } else { (Sign::Minus, minus) };
    let exactly_one = (plus >= t) != (minus >= t);
    Ok(VerifyReport {
        n,
        lhs,
        rhs,
        sign,
        valuation_of_difference: diff,
        valuation_plus: plus,
        valuation_minus: minus,
        target: t,
        converged: report.converged,
        level_used: report.level_used,
        pass: report.converged && exactly_one,
    })
}

/// The common sign of a set of passing reports, or `None` if any report
/// failed or the signs disagree.
pub fn consistent_sign(reports: &[VerifyReport]) -> Option<Sign> {
    let first = reports.first()?.sign;
    reports.iter().all(|r| r.pass && r.sign == first).then_some(first)
}
