//! Finite-precision elements of `Q_p`.
//!
//! A nonzero value is `p^valuation * unit` where the unit is known modulo
//! `p^relprec`. Its absolute precision is `valuation + relprec`: the number
//! is determined modulo `p^(valuation + relprec)`.
//!
//! Precision propagation:
//! * `mul`: valuations add, relative precision is the smaller of the two.
//! * `add`: absolute precision is the smaller of the two; the valuation is
//!   recomputed from the surviving digits.
//! * `inv`: relative precision is kept and the valuation negated.
//!
//! A sum whose surviving digits all cancel becomes [`Kind::ZeroToPrecision`],
//! which is distinct from the exact zero. Questions about such a value beyond
//! its known precision are answered with [`Error::InsufficientPrecision`].

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::modarith::{self, Residue};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Kind {
    ExactZero,
    /// Known only to be divisible by `p^bound`.
    ZeroToPrecision(i64),
    Finite {
        valuation: i64,
        unit: BigUint,
        relprec: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PadicNum {
    p: u64,
    kind: Kind,
}

/// Result of asking for a valuation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Valuation {
    Infinite,
    Exact(i64),
    /// The value is zero to the tracked precision; the true valuation is at
    /// least this bound.
    AtLeast(i64),
}

impl Valuation {
    /// Whether the valuation is provably at least `t`.
    pub fn is_at_least(self, t: i64) -> bool {
        match self {
            Valuation::Infinite => true,
            Valuation::Exact(v) | Valuation::AtLeast(v) => v >= t,
        }
    }

    /// A lower bound usable in arithmetic; `None` stands for infinity.
    pub fn lower_bound(self) -> Option<i64> {
        match self {
            Valuation::Infinite => None,
            Valuation::Exact(v) | Valuation::AtLeast(v) => Some(v),
        }
    }

    pub fn is_exact(self) -> bool {
        !matches!(self, Valuation::AtLeast(_))
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Infinite => write!(f, "inf"),
            Valuation::Exact(v) => write!(f, "{v}"),
            Valuation::AtLeast(v) => write!(f, ">={v}"),
        }
    }
}

pub(crate) fn pow_p(p: u64, e: u32) -> BigUint {
    BigUint::from(p).pow(e)
}

fn to_i64(v: u32) -> i64 {
    i64::from(v)
}

impl PadicNum {
    pub fn zero(p: u64) -> Self {
        PadicNum { p, kind: Kind::ExactZero }
    }

    pub fn zero_to_precision(p: u64, bound: i64) -> Self {
        PadicNum { p, kind: Kind::ZeroToPrecision(bound) }
    }

    pub fn one(p: u64, relprec: u32) -> Self {
        Self::from_integer(p, &BigInt::one(), relprec)
    }

    /// Builds `p^valuation * unit` from any integer `unit`, pulling out factors
    /// of `p` and reducing modulo `p^relprec`.
    pub fn from_parts(p: u64, valuation: i64, unit: &BigInt, relprec: u32) -> Self {
        if unit.is_zero() {
            return Self::zero(p);
        }
        if relprec == 0 {
            return Self::zero_to_precision(p, valuation);
        }
        let (extra, rest) = modarith::int_valuation(unit, p);
        let modulus = pow_p(p, relprec);
        let unit = modarith::reduce(&modulus, &rest).expect("p^relprec is positive").value().clone();
        PadicNum { p, kind: Kind::Finite { valuation: valuation + i64::from(extra), unit, relprec } }
    }

    pub fn from_integer(p: u64, x: &BigInt, relprec: u32) -> Self {
        Self::from_parts(p, 0, x, relprec)
    }

    pub fn from_u64(p: u64, x: u64, relprec: u32) -> Self {
        Self::from_integer(p, &BigInt::from(x), relprec)
    }

    /// Embeds a rational with `relprec` digits of relative precision.
    pub fn from_rational(p: u64, q: &BigRational, relprec: u32) -> Self {
        if q.is_zero() {
            return Self::zero(p);
        }
        if relprec == 0 {
            return Self::zero_to_precision(p, rational_valuation(q, p));
        }
        let (vn, num) = modarith::int_valuation(q.numer(), p);
        let (vd, den) = modarith::int_valuation(q.denom(), p);
        let modulus = pow_p(p, relprec);
        let den_inv = modarith::inverse_mod(&den, &modulus).expect("p-free denominator is a unit");
        let unit =
            modarith::reduce(&modulus, &(num * BigInt::from(den_inv.value().clone()))).expect("p^relprec is positive");
        PadicNum {
            p,
            kind: Kind::Finite { valuation: i64::from(vn) - i64::from(vd), unit: unit.value().clone(), relprec },
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.kind, Kind::ExactZero)
    }

    /// Exact zero or zero to the tracked precision.
    pub fn is_zero_like(&self) -> bool {
        !matches!(self.kind, Kind::Finite { .. })
    }

    pub fn valuation(&self) -> Valuation {
        match &self.kind {
            Kind::ExactZero => Valuation::Infinite,
            Kind::ZeroToPrecision(b) => Valuation::AtLeast(*b),
            Kind::Finite { valuation, .. } => Valuation::Exact(*valuation),
        }
    }

    /// Absolute precision; `None` means exact.
    pub fn abs_precision(&self) -> Option<i64> {
        match &self.kind {
            Kind::ExactZero => None,
            Kind::ZeroToPrecision(b) => Some(*b),
            Kind::Finite { valuation, relprec, .. } => Some(valuation + to_i64(*relprec)),
        }
    }

    pub fn relprec(&self) -> Option<u32> {
        match &self.kind {
            Kind::Finite { relprec, .. } => Some(*relprec),
            _ => None,
        }
    }

    pub fn unit(&self) -> Option<&BigUint> {
        match &self.kind {
            Kind::Finite { unit, .. } => Some(unit),
            _ => None,
        }
    }

    /// `p^-v` as an exact rational; `None` for a zero known only to precision.
    pub fn norm(&self) -> Option<BigRational> {
        match &self.kind {
            Kind::ExactZero => Some(BigRational::zero()),
            Kind::ZeroToPrecision(_) => None,
            Kind::Finite { valuation, .. } => Some(p_power_rational(self.p, -*valuation)),
        }
    }

    /// Smallest rational that provably bounds the norm from above.
    pub fn norm_upper_bound(&self) -> BigRational {
        match &self.kind {
            Kind::ZeroToPrecision(b) => p_power_rational(self.p, -*b),
            _ => self.norm().expect("exact norm"),
        }
    }

    fn check_prime(&self, other: &PadicNum) -> Result<()> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch(self.p, other.p));
        }
        Ok(())
    }

    /// Forgets every digit at or beyond absolute precision `bound`.
    pub fn truncate_abs(&self, bound: i64) -> PadicNum {
        match &self.kind {
            Kind::ExactZero => Self::zero_to_precision(self.p, bound),
            Kind::ZeroToPrecision(b) => Self::zero_to_precision(self.p, (*b).min(bound)),
            Kind::Finite { valuation, unit, relprec } => {
                if *valuation >= bound {
                    return Self::zero_to_precision(self.p, bound);
                }
                let keep = (bound - valuation).min(to_i64(*relprec)) as u32;
                PadicNum {
                    p: self.p,
                    kind: Kind::Finite { valuation: *valuation, unit: unit % pow_p(self.p, keep), relprec: keep },
                }
            }
        }
    }

    /// Lowers the relative precision to at most `relprec`.
    pub fn with_relprec(&self, relprec: u32) -> PadicNum {
        match &self.kind {
            Kind::Finite { valuation, .. } => self.truncate_abs(valuation + to_i64(relprec)),
            _ => self.clone(),
        }
    }

    pub fn add(&self, other: &PadicNum) -> Result<PadicNum> {
        self.check_prime(other)?;
        let p = self.p;
        Ok(match (&self.kind, &other.kind) {
            (Kind::ExactZero, _) => other.clone(),
            (_, Kind::ExactZero) => self.clone(),
            (Kind::ZeroToPrecision(a), Kind::ZeroToPrecision(b)) => Self::zero_to_precision(p, (*a).min(*b)),
            (Kind::ZeroToPrecision(b), Kind::Finite { .. }) => other.truncate_abs(*b),
            (Kind::Finite { .. }, Kind::ZeroToPrecision(b)) => self.truncate_abs(*b),
            (
                Kind::Finite { valuation: vx, unit: ux, relprec: nx },
                Kind::Finite { valuation: vy, unit: uy, relprec: ny },
            ) => {
                let abs = (vx + to_i64(*nx)).min(vy + to_i64(*ny));
                let v0 = (*vx).min(*vy);
                let shifted = |v: i64, u: &BigUint| u * pow_p(p, (v - v0) as u32);
                let width = (abs - v0) as u32;
                let modulus = pow_p(p, width);
                let s = (shifted(*vx, ux) + shifted(*vy, uy)) % &modulus;
                if s.is_zero() {
                    Self::zero_to_precision(p, abs)
                } else {
                    let (extra, rest) = modarith::int_valuation(&BigInt::from(s), p);
                    let valuation = v0 + i64::from(extra);
                    let relprec = (abs - valuation) as u32;
                    PadicNum {
                        p,
                        kind: Kind::Finite { valuation, unit: modarith::abs_big(&rest) % pow_p(p, relprec), relprec },
                    }
                }
            }
        })
    }

    pub fn neg(&self) -> PadicNum {
        match &self.kind {
            Kind::Finite { valuation, unit, relprec } => PadicNum {
                p: self.p,
                kind: Kind::Finite { valuation: *valuation, unit: pow_p(self.p, *relprec) - unit, relprec: *relprec },
            },
            _ => self.clone(),
        }
    }

    pub fn sub(&self, other: &PadicNum) -> Result<PadicNum> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &PadicNum) -> Result<PadicNum> {
        self.check_prime(other)?;
        let p = self.p;
        Ok(match (&self.kind, &other.kind) {
            (Kind::ExactZero, _) | (_, Kind::ExactZero) => Self::zero(p),
            (Kind::ZeroToPrecision(a), Kind::ZeroToPrecision(b)) => Self::zero_to_precision(p, a + b),
            (Kind::ZeroToPrecision(b), Kind::Finite { valuation, .. })
            | (Kind::Finite { valuation, .. }, Kind::ZeroToPrecision(b)) => Self::zero_to_precision(p, b + valuation),
            (
                Kind::Finite { valuation: vx, unit: ux, relprec: nx },
                Kind::Finite { valuation: vy, unit: uy, relprec: ny },
            ) => {
                let relprec = (*nx).min(*ny);
                PadicNum { p, kind: Kind::Finite { valuation: vx + vy, unit: (ux * uy) % pow_p(p, relprec), relprec } }
            }
        })
    }

    pub fn inv(&self) -> Result<PadicNum> {
        match &self.kind {
            Kind::Finite { valuation, unit, relprec } => {
                let modulus = pow_p(self.p, *relprec);
                let inv = modarith::inverse_mod(&BigInt::from(unit.clone()), &modulus)?;
                Ok(PadicNum {
                    p: self.p,
                    kind: Kind::Finite { valuation: -valuation, unit: inv.value().clone(), relprec: *relprec },
                })
            }
            _ => Err(Error::DivisionByZero),
        }
    }

    pub fn div(&self, other: &PadicNum) -> Result<PadicNum> {
        self.mul(&other.inv()?)
    }

    pub fn pow(&self, k: u32) -> Result<PadicNum> {
        match &self.kind {
            Kind::Finite { valuation, unit, relprec } => {
                let modulus = pow_p(self.p, *relprec);
                Ok(PadicNum {
                    p: self.p,
                    kind: Kind::Finite {
                        valuation: valuation * i64::from(k),
                        unit: unit.modpow(&BigUint::from(k), &modulus),
                        relprec: *relprec,
                    },
                })
            }
            _ if k == 0 => Err(Error::Precondition("zero to the power zero".into())),
            Kind::ExactZero => Ok(self.clone()),
            Kind::ZeroToPrecision(b) => Ok(Self::zero_to_precision(self.p, b * i64::from(k))),
        }
    }

    /// Signed power, using the inverse for negative exponents.
    pub fn powi(&self, k: i64) -> Result<PadicNum> {
        let e = u32::try_from(k.unsigned_abs()).map_err(|_| Error::Precondition(format!("exponent {k} too large")))?;
        if k < 0 {
            self.inv()?.pow(e)
        } else {
            self.pow(e)
        }
    }

    fn require_precision(&self, needed: i64) -> Result<()> {
        if let Some(available) = self.abs_precision() {
            if available < needed {
                return Err(Error::InsufficientPrecision { needed, available });
            }
        }
        Ok(())
    }

    /// The least natural number congruent to `self` modulo `p^n`.
    pub fn appr(&self, n: u32) -> Result<BigUint> {
        self.require_precision(to_i64(n))?;
        match &self.kind {
            Kind::ExactZero | Kind::ZeroToPrecision(_) => Ok(BigUint::zero()),
            Kind::Finite { valuation, unit, .. } => {
                if *valuation < 0 {
                    return Err(Error::NotIntegral(*valuation));
                }
                if *valuation >= to_i64(n) {
                    return Ok(BigUint::zero());
                }
                Ok((unit * pow_p(self.p, *valuation as u32)) % pow_p(self.p, n))
            }
        }
    }

    /// The image under the projection `Z_p -> Z/p^n Z`.
    pub fn to_zmod_pow(&self, n: u32) -> Result<Residue> {
        let value = self.appr(n)?;
        modarith::reduce(&pow_p(self.p, n), &BigInt::from(value))
    }

    /// Whether `x ≡ y (mod p^t)`, i.e. the valuation of `x - y` is at least `t`.
    pub fn eq_mod(x: &PadicNum, y: &PadicNum, t: i64) -> Result<bool> {
        x.check_prime(y)?;
        x.require_precision(t)?;
        y.require_precision(t)?;
        Ok(x.sub(y)?.valuation().is_at_least(t))
    }

    /// The rational `p^v * unit` with `unit` taken as its least representative.
    pub fn to_rational_repr(&self) -> BigRational {
        match &self.kind {
            Kind::Finite { valuation, unit, .. } => {
                p_power_rational(self.p, *valuation) * BigRational::from_integer(BigInt::from(unit.clone()))
            }
            _ => BigRational::zero(),
        }
    }
}

/// `p^e` as an exact rational for any integer `e`.
pub fn p_power_rational(p: u64, e: i64) -> BigRational {
    let magnitude = BigInt::from(pow_p(p, e.unsigned_abs() as u32));
    if e >= 0 {
        BigRational::from_integer(magnitude)
    } else {
        BigRational::new(BigInt::one(), magnitude)
    }
}

/// `nu_p` of a nonzero rational.
pub fn rational_valuation(q: &BigRational, p: u64) -> i64 {
    let (vn, _) = modarith::int_valuation(q.numer(), p);
    let (vd, _) = modarith::int_valuation(q.denom(), p);
    i64::from(vn) - i64::from(vd)
}

/// p-adic norm of a rational as an exact rational.
pub fn rational_norm(q: &BigRational, p: u64) -> BigRational {
    if q.is_zero() {
        BigRational::zero()
    } else {
        p_power_rational(p, -rational_valuation(q, p))
    }
}

impl fmt::Display for PadicNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::ExactZero => write!(f, "0"),
            Kind::ZeroToPrecision(b) => write!(f, "O({}^{})", self.p, b),
            Kind::Finite { valuation, unit, relprec } => {
                write!(f, "{}*{}^{} + O({}^{})", unit, self.p, valuation, self.p, valuation + to_i64(*relprec))
            }
        }
    }
}

fn json_int<T: fmt::Display>(x: T) -> serde_json::Number {
    serde_json::Number::from_str(&x.to_string()).expect("integers are valid JSON numbers")
}

impl Serialize for PadicNum {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match &self.kind {
            Kind::ExactZero => {
                let mut m = serializer.serialize_map(Some(1))?;
                m.serialize_entry("zero", &true)?;
                m.end()
            }
            Kind::ZeroToPrecision(b) => {
                let mut m = serializer.serialize_map(Some(1))?;
                m.serialize_entry("zero_to_precision", b)?;
                m.end()
            }
            Kind::Finite { valuation, unit, relprec } => {
                let mut m = serializer.serialize_map(Some(4))?;
                m.serialize_entry("p", &self.p)?;
                m.serialize_entry("valuation", valuation)?;
                m.serialize_entry("unit", &json_int(unit))?;
                m.serialize_entry("relprec", relprec)?;
                m.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for PadicNum {
    /// The zero forms carry no prime; they deserialize with `p = 0` and are
    /// meant to be re-tagged with [`PadicNum::with_prime`].
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(deserializer)?;
        let obj = value.as_object().ok_or_else(|| D::Error::custom("expected a JSON object"))?;
        if obj.get("zero").and_then(|z| z.as_bool()) == Some(true) {
            return Ok(PadicNum::zero(0));
        }
        if let Some(b) = obj.get("zero_to_precision") {
            let b = b.as_i64().ok_or_else(|| D::Error::custom("zero_to_precision must be an integer"))?;
            return Ok(PadicNum::zero_to_precision(0, b));
        }
        let field = |name: &str| {
            obj.get(name)
                .and_then(|v| v.as_number())
                .map(|n| n.to_string())
                .ok_or_else(|| D::Error::custom(format!("missing integer field {name:?}")))
        };
        let p: u64 = field("p")?.parse().map_err(D::Error::custom)?;
        let valuation: i64 = field("valuation")?.parse().map_err(D::Error::custom)?;
        let unit = BigUint::from_str(&field("unit")?).map_err(D::Error::custom)?;
        let relprec: u32 = field("relprec")?.parse().map_err(D::Error::custom)?;
        if relprec == 0 || unit >= pow_p(p, relprec) || (&unit % p).is_zero() {
            return Err(D::Error::custom("unit must be a p-free residue modulo p^relprec"));
        }
        Ok(PadicNum { p, kind: Kind::Finite { valuation, unit, relprec } })
    }
}

impl PadicNum {
    /// Attaches a prime to a value whose serialized form omitted it.
    pub fn with_prime(mut self, p: u64) -> PadicNum {
        self.p = p;
        self
    }
}

/// The least nonnegative residue of a rational with p-free denominator
/// modulo `p^n`, used by tests and diagnostics.
pub fn rational_mod_pow(q: &BigRational, p: u64, n: u32) -> Result<BigUint> {
    let modulus = pow_p(p, n);
    let den = modarith::inverse_mod(q.denom(), &modulus)?;
    Ok(modarith::reduce(&modulus, &(q.numer() * BigInt::from(den.value().clone())))?.value().clone())
}
