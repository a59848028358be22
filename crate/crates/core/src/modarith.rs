//! Arithmetic in `Z/nZ`: canonical residues, units, inverses and the
//! Chinese remainder isomorphism.
//!
//! Every residue carries its least nonnegative representative. All
//! coercions to integers or p-adic numbers go through that representative.
//! `Z/1Z` has the single element `0`, which counts as a unit.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// An element of `Z/nZ` stored as its least nonnegative representative.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Residue {
    modulus: BigUint,
    value: BigUint,
}

/// A residue certified coprime to its modulus.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnitResidue(Residue);

impl Residue {
    pub fn new(modulus: impl Into<BigUint>, x: impl Into<BigInt>) -> Result<Self> {
        reduce(&modulus.into(), &x.into())
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn is_unit(&self) -> bool {
        self.modulus.is_one() || self.value.gcd(&self.modulus).is_one()
    }

    pub fn to_unit(&self) -> Result<UnitResidue> {
        if self.is_unit() {
            Ok(UnitResidue(self.clone()))
        } else {
            Err(Error::NotAUnit { value: self.value.clone(), modulus: self.modulus.clone() })
        }
    }

    fn check_same(&self, other: &Residue) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch { expected: self.modulus.clone(), found: other.modulus.clone() });
        }
        Ok(())
    }

    pub fn add(&self, other: &Residue) -> Result<Residue> {
        self.check_same(other)?;
        Ok(Residue { value: (&self.value + &other.value) % &self.modulus, modulus: self.modulus.clone() })
    }

    pub fn mul(&self, other: &Residue) -> Result<Residue> {
        self.check_same(other)?;
        Ok(Residue { value: (&self.value * &other.value) % &self.modulus, modulus: self.modulus.clone() })
    }

    pub fn neg(&self) -> Residue {
        let value = if self.value.is_zero() { BigUint::zero() } else { &self.modulus - &self.value };
        Residue { modulus: self.modulus.clone(), value }
    }

    /// Reduction to a divisor `m` of the modulus.
    pub fn reduce_to(&self, m: &BigUint) -> Result<Residue> {
        if m.is_zero() {
            return Err(Error::ZeroModulus);
        }
        if !(&self.modulus % m).is_zero() {
            return Err(Error::NotDivisible { divisor: m.clone(), multiple: self.modulus.clone() });
        }
        Ok(Residue { modulus: m.clone(), value: &self.value % m })
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value, self.modulus)
    }
}

impl UnitResidue {
    pub fn residue(&self) -> &Residue {
        &self.0
    }

    pub fn value(&self) -> &BigUint {
        &self.0.value
    }

    pub fn modulus(&self) -> &BigUint {
        &self.0.modulus
    }

    pub fn mul(&self, other: &UnitResidue) -> Result<UnitResidue> {
        Ok(UnitResidue(self.0.mul(&other.0)?))
    }

    pub fn inverse(&self) -> UnitResidue {
        inverse_mod(&BigInt::from(self.0.value.clone()), &self.0.modulus).expect("unit residues are invertible")
    }
}

impl From<UnitResidue> for Residue {
    fn from(u: UnitResidue) -> Self {
        u.0
    }
}

/// `x mod n` with representative in `[0, n)`.
pub fn reduce(n: &BigUint, x: &BigInt) -> Result<Residue> {
    if n.is_zero() {
        return Err(Error::ZeroModulus);
    }
    let modulus = BigInt::from(n.clone());
    let value = x.mod_floor(&modulus).to_biguint().expect("mod_floor by a positive modulus is nonnegative");
    Ok(Residue { modulus: n.clone(), value })
}

/// The inverse of `c` modulo `n`, via the extended Euclidean algorithm.
pub fn inverse_mod(c: &BigInt, n: &BigUint) -> Result<UnitResidue> {
    let r = reduce(n, c)?;
    if n.is_one() {
        return Ok(UnitResidue(r));
    }
    let modulus = BigInt::from(n.clone());
    let e = BigInt::from(r.value.clone()).extended_gcd(&modulus);
    if !e.gcd.is_one() {
        return Err(Error::NotAUnit { value: r.value, modulus: n.clone() });
    }
    Ok(UnitResidue(reduce(n, &e.x)?))
}

fn check_coprime(d: &BigUint, q: &BigUint) -> Result<()> {
    if d.is_zero() || q.is_zero() {
        return Err(Error::ZeroModulus);
    }
    if !d.gcd(q).is_one() {
        return Err(Error::NotCoprime(d.clone(), q.clone()));
    }
    Ok(())
}

/// Splits `x mod d*q` into its components mod `d` and mod `q`.
pub fn crt_split(d: &BigUint, q: &BigUint, x: &Residue) -> Result<(Residue, Residue)> {
    check_coprime(d, q)?;
    let n = d * q;
    if x.modulus != n {
        return Err(Error::ModulusMismatch { expected: n, found: x.modulus.clone() });
    }
    Ok((x.reduce_to(d)?, x.reduce_to(q)?))
}

/// The unique residue mod `d*q` congruent to `a` mod `d` and `b` mod `q`.
pub fn crt_combine(d: &BigUint, q: &BigUint, a: &Residue, b: &Residue) -> Result<Residue> {
    check_coprime(d, q)?;
    for (m, r) in [(d, a), (q, b)] {
        if &r.modulus != m {
            return Err(Error::ModulusMismatch { expected: m.clone(), found: r.modulus.clone() });
        }
    }
    // x = a + d * ((b - a) * d^{-1} mod q)
    let d_inv = inverse_mod(&BigInt::from(d.clone()), q)?;
    let diff = BigInt::from(b.value.clone()) - BigInt::from(a.value.clone());
    let t = reduce(q, &(diff * BigInt::from(d_inv.value().clone())))?;
    let x = &a.value + d * &t.value;
    reduce(&(d * q), &BigInt::from(x))
}

/// `(Z/nZ)^x` in increasing order of representative.
pub fn units_of(n: &BigUint) -> Result<Vec<UnitResidue>> {
    if n.is_zero() {
        return Err(Error::ZeroModulus);
    }
    if n.is_one() {
        return Ok(vec![UnitResidue(Residue { modulus: n.clone(), value: BigUint::zero() })]);
    }
    let mut out = Vec::new();
    let mut a = BigUint::one();
    while &a < n {
        if a.gcd(n).is_one() {
            out.push(UnitResidue(Residue { modulus: n.clone(), value: a.clone() }));
        }
        a += 1u32;
    }
    Ok(out)
}

/// Representatives `a < d*p^x` split by whether `gcd(a, d*p) = 1`.
pub fn partition_range(d: &BigUint, p: u64, x: u32) -> Result<(Vec<BigUint>, Vec<BigUint>)> {
    let pb = BigUint::from(p);
    check_coprime(d, &pb)?;
    let dp = d * &pb;
    let n = d * pb.pow(x);
    let mut units = Vec::new();
    let mut nonunits = Vec::new();
    let mut a = BigUint::zero();
    while a < n {
        if a.gcd(&dp).is_one() {
            units.push(a.clone());
        } else {
            nonunits.push(a.clone());
        }
        a += 1u32;
    }
    Ok((units, nonunits))
}

/// Positive divisors of `n` in increasing order.
pub fn divisors(n: &BigUint) -> Vec<BigUint> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut i = BigUint::one();
    while &i * &i <= *n {
        if (n % &i).is_zero() {
            let j = n / &i;
            if j != i {
                large.push(j);
            }
            small.push(i.clone());
        }
        i += 1u32;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut i = 2u64;
    while i * i <= n {
        if n.is_multiple_of(i) {
            return false;
        }
        i += 1;
    }
    true
}

pub fn ensure_odd_prime(p: u64) -> Result<()> {
    if p == 2 || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    Ok(())
}

/// p-adic valuation of a nonzero integer.
pub(crate) fn int_valuation(x: &BigInt, p: u64) -> (u32, BigInt) {
    debug_assert!(!x.is_zero());
    let pb = BigInt::from(p);
    let mut v = 0;
    let mut rest = x.clone();
    loop {
        let (q, r) = rest.div_rem(&pb);
        if !r.is_zero() {
            break;
        }
        rest = q;
        v += 1;
    }
    (v, rest)
}

pub(crate) fn abs_big(x: &BigInt) -> BigUint {
    x.abs().to_biguint().expect("absolute value is nonnegative")
}
