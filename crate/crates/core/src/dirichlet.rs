//! Dirichlet characters with values in the `(p-1)`-st roots of unity of
//! `Z_p`, stored as explicit value tables on `(Z/nZ)^x`.
//!
//! Every constructor validates the table: it must cover exactly the units,
//! send 1 to 1, be multiplicative, and take values in `mu_{p-1}` to the
//! working precision.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modarith::{self, Residue};
use crate::padic::{pow_p, PadicNum};

/// The Teichmüller lift of `a` (a unit mod `p`): the unique `(p-1)`-st root
/// of unity congruent to `a` modulo `p`, to `relprec` digits.
///
/// Uses that `a^(p^k)` is constant modulo `p^(k+1)`.
pub fn teichmuller(p: u64, a: &BigInt, relprec: u32) -> Result<PadicNum> {
    modarith::ensure_odd_prime(p)?;
    let pb = BigUint::from(p);
    let r = modarith::reduce(&pb, a)?;
    if r.value().is_zero() {
        return Err(Error::NotAUnit { value: r.value().clone(), modulus: pb });
    }
    let modulus = pow_p(p, relprec);
    let mut x = r.value().clone();
    for _ in 1..relprec {
        x = x.modpow(&pb, &modulus);
    }
    Ok(PadicNum::from_integer(p, &BigInt::from(x), relprec))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirichletCharacter {
    p: u64,
    level: BigUint,
    relprec: u32,
    /// Keyed by the least representative of each unit.
    table: BTreeMap<BigUint, PadicNum>,
}

impl DirichletCharacter {
    /// Builds and validates a character from its values on the units.
    pub fn from_values(p: u64, level: BigUint, relprec: u32, table: BTreeMap<BigUint, PadicNum>) -> Result<Self> {
        modarith::ensure_odd_prime(p)?;
        if relprec == 0 {
            return Err(Error::Precondition("character precision must be positive".into()));
        }
        let chi = DirichletCharacter { p, level, relprec, table };
        chi.validate()?;
        Ok(chi)
    }

    pub fn trivial(p: u64, level: impl Into<BigUint>, relprec: u32) -> Result<Self> {
        let level = level.into();
        let one = PadicNum::one(p, relprec);
        let table = modarith::units_of(&level)?.into_iter().map(|u| (u.value().clone(), one.clone())).collect();
        Self::from_values(p, level, relprec, table)
    }

    /// The Teichmüller character `omega` of level `p`.
    pub fn teichmuller(p: u64, relprec: u32) -> Result<Self> {
        Self::omega_pow(p, 1, relprec)
    }

    /// `omega^k` at level `p`, with `k` read modulo `p - 1`.
    pub fn omega_pow(p: u64, k: i64, relprec: u32) -> Result<Self> {
        modarith::ensure_odd_prime(p)?;
        let e = k.rem_euclid(p as i64 - 1) as u32;
        let mut table = BTreeMap::new();
        for a in 1..p {
            let w = teichmuller(p, &BigInt::from(a), relprec)?;
            table.insert(BigUint::from(a), w.pow(e)?);
        }
        Self::from_values(p, BigUint::from(p), relprec, table)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn level(&self) -> &BigUint {
        &self.level
    }

    pub fn relprec(&self) -> u32 {
        self.relprec
    }

    pub fn table(&self) -> &BTreeMap<BigUint, PadicNum> {
        &self.table
    }

    fn validate(&self) -> Result<()> {
        let units = modarith::units_of(&self.level)?;
        if units.len() != self.table.len() {
            for key in self.table.keys() {
                if key >= &self.level
                    || !modarith::Residue::new(self.level.clone(), BigInt::from(key.clone()))?.is_unit()
                {
                    return Err(Error::InvalidEntry(key.clone()));
                }
            }
        }
        for u in &units {
            if !self.table.contains_key(u.value()) {
                return Err(Error::MissingEntry(u.value().clone()));
            }
        }
        let one = PadicNum::one(self.p, self.relprec);
        let identity = if self.level.is_one() { BigUint::zero() } else { BigUint::one() };
        if self.table[&identity] != one {
            return Err(Error::NotNormalized);
        }
        for (a, v) in &self.table {
            if v.p() != self.p || v.relprec() != Some(self.relprec) || v.valuation() != crate::Valuation::Exact(0) {
                return Err(Error::UnsupportedOrder(a.clone()));
            }
            if v.pow((self.p - 1) as u32)? != one {
                return Err(Error::UnsupportedOrder(a.clone()));
            }
        }
        // Checking chi(a*g) = chi(a) chi(g) for every a and every g in a
        // generating set is enough once chi(1) = 1.
        for g in self.generators() {
            let chi_g = &self.table[&g];
            for (a, chi_a) in &self.table {
                let ag = (a * &g) % &self.level;
                if self.table[&ag] != chi_a.mul(chi_g)? {
                    return Err(Error::NotMultiplicative { a: a.clone(), b: g, modulus: self.level.clone() });
                }
            }
        }
        Ok(())
    }

    /// A generating set of `(Z/nZ)^x`, chosen greedily.
    fn generators(&self) -> Vec<BigUint> {
        let n = &self.level;
        let mut gens: Vec<BigUint> = Vec::new();
        let mut subgroup: HashSet<BigUint> = HashSet::from([BigUint::one() % n]);
        for a in self.table.keys() {
            if subgroup.contains(a) {
                continue;
            }
            gens.push(a.clone());
            let mut frontier: Vec<BigUint> = subgroup.iter().cloned().collect();
            while let Some(x) = frontier.pop() {
                for g in &gens {
                    let y = (&x * g) % n;
                    if subgroup.insert(y.clone()) {
                        frontier.push(y);
                    }
                }
            }
        }
        gens
    }

    /// `chi` on a unit representative (any integer congruent to a unit).
    fn lookup(&self, x: &BigUint) -> Option<&PadicNum> {
        if self.level.is_one() {
            return self.table.get(&BigUint::zero());
        }
        self.table.get(&(x % &self.level))
    }

    /// The associated character: `chi(x)` on units, zero elsewhere. At level
    /// 1 every residue is a unit and the value is 1.
    pub fn asso_eval(&self, x: &BigInt) -> PadicNum {
        let r = modarith::reduce(&self.level, x).expect("level is positive");
        self.eval_residue(&r)
    }

    pub fn eval_residue(&self, x: &Residue) -> PadicNum {
        match self.lookup(x.value()) {
            Some(v) => v.clone(),
            None => PadicNum::zero(self.p),
        }
    }

    /// Evaluates at a nonnegative representative without building a residue.
    pub fn eval_u(&self, x: &BigUint) -> PadicNum {
        match self.lookup(x) {
            Some(v) => v.clone(),
            None => PadicNum::zero(self.p),
        }
    }

    /// The same character viewed at level `m`, a multiple of the level.
    pub fn change_level(&self, m: &BigUint) -> Result<Self> {
        if m.is_zero() {
            return Err(Error::ZeroModulus);
        }
        if !(m % &self.level).is_zero() {
            return Err(Error::NotDivisible { divisor: self.level.clone(), multiple: m.clone() });
        }
        if m == &self.level {
            return Ok(self.clone());
        }
        let mut table = BTreeMap::new();
        for u in modarith::units_of(m)? {
            let v = self.lookup(u.value()).expect("units map to units").clone();
            table.insert(u.value().clone(), v);
        }
        Self::from_values(self.p, m.clone(), self.relprec, table)
    }

    /// Whether `chi` factors through `(Z/dZ)^x`, i.e. is trivial on units
    /// congruent to 1 modulo `d`.
    pub fn factors_through(&self, d: &BigUint) -> Result<bool> {
        if d.is_zero() || !(&self.level % d).is_zero() {
            return Err(Error::NotDivisible { divisor: d.clone(), multiple: self.level.clone() });
        }
        let one = PadicNum::one(self.p, self.relprec);
        let d_one = BigUint::one() % d;
        Ok(self.table.iter().filter(|(a, _)| (*a % d) == d_one).all(|(_, v)| v == &one))
    }

    /// The least divisor of the level that `chi` factors through, found by
    /// scanning divisors in increasing order.
    pub fn conductor(&self) -> BigUint {
        for d in modarith::divisors(&self.level) {
            if self.factors_through(&d).expect("divisors divide the level") {
                return d;
            }
        }
        unreachable!("every character factors through its own level")
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.level
    }

    /// The primitive character of level `conductor(chi)` inducing `chi`.
    pub fn asso_primitive(&self) -> Self {
        let f = self.conductor();
        if f == self.level {
            return self.clone();
        }
        let mut table = BTreeMap::new();
        for b in modarith::units_of(&f).expect("conductor is positive") {
            // Some lift of b mod f is a unit mod the level.
            let mut a = b.value().clone();
            while !a.gcd(&self.level).is_one() {
                a += &f;
            }
            table.insert(b.value().clone(), self.table[&(a % &self.level)].clone());
        }
        Self::from_values(self.p, f, self.relprec, table).expect("restriction of a valid character is valid")
    }

    /// Pointwise product at the lcm of the levels, then primitivized.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.p != other.p {
            return Err(Error::CharacterPrimeMismatch(self.p, other.p));
        }
        let relprec = self.relprec.min(other.relprec);
        let lcm = self.level.lcm(&other.level);
        let mut table = BTreeMap::new();
        for u in modarith::units_of(&lcm)? {
            let a = self.lookup(u.value()).expect("unit").with_relprec(relprec);
            let b = other.lookup(u.value()).expect("unit").with_relprec(relprec);
            table.insert(u.value().clone(), a.mul(&b)?);
        }
        Ok(Self::from_values(self.p, lcm, relprec, table)?.asso_primitive())
    }

    /// Pointwise `chi^k` at the same level; negative `k` uses the inverse.
    pub fn pow(&self, k: i64) -> Result<Self> {
        let e = k.rem_euclid(self.p as i64 - 1) as u32;
        let table = self.table.iter().map(|(a, v)| Ok((a.clone(), v.pow(e)?))).collect::<Result<_>>()?;
        Self::from_values(self.p, self.level.clone(), self.relprec, table)
    }

    /// Even when `chi(-1) = 1`, odd when `chi(-1) = -1`.
    pub fn parity(&self) -> Parity {
        if self.level <= BigUint::from(2u32) {
            return Parity::Even;
        }
        let minus_one = &self.level - 1u32;
        if self.table[&minus_one] == PadicNum::one(self.p, self.relprec) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn is_even(&self) -> bool {
        self.parity() == Parity::Even
    }

    /// Splits a character of level `m*n` (coprime) into characters of level
    /// `m` and `n` whose extensions multiply back to `chi`.
    pub fn decompose_coprime(&self, m: &BigUint, n: &BigUint) -> Result<(Self, Self)> {
        if !m.gcd(n).is_one() {
            return Err(Error::NotCoprime(m.clone(), n.clone()));
        }
        let mn = m * n;
        if mn != self.level {
            return Err(Error::ModulusMismatch { expected: self.level.clone(), found: mn });
        }
        let one_m = Residue::new(m.clone(), 1)?;
        let one_n = Residue::new(n.clone(), 1)?;
        let mut left = BTreeMap::new();
        for a in modarith::units_of(m)? {
            let x = modarith::crt_combine(m, n, a.residue(), &one_n)?;
            left.insert(a.value().clone(), self.eval_residue(&x));
        }
        let mut right = BTreeMap::new();
        for b in modarith::units_of(n)? {
            let x = modarith::crt_combine(m, n, &one_m, b.residue())?;
            right.insert(b.value().clone(), self.eval_residue(&x));
        }
        Ok((
            Self::from_values(self.p, m.clone(), self.relprec, left)?,
            Self::from_values(self.p, n.clone(), self.relprec, right)?,
        ))
    }

    /// [`decompose_coprime`](Self::decompose_coprime) followed by
    /// primitivization of both factors.
    pub fn decompose_coprime_primitive(&self, m: &BigUint, n: &BigUint) -> Result<(Self, Self)> {
        let (a, b) = self.decompose_coprime(m, n)?;
        Ok((a.asso_primitive(), b.asso_primitive()))
    }

    /// The table-file form: each unit maps to a residue mod `p` whose
    /// Teichmüller lift is the stored value.
    pub fn to_table_file(&self) -> TableFile {
        let entries = self
            .table
            .iter()
            .map(|(a, v)| {
                let t = v.appr(1).expect("values are p-adic units");
                (a.to_string(), serde_json::Number::from_str(&t.to_string()).expect("integer"))
            })
            .collect();
        TableFile {
            p: self.p,
            modulus: serde_json::Number::from_str(&self.level.to_string()).expect("integer"),
            entries,
        }
    }

    /// Loads a table file, lifting each entry through the Teichmüller map.
    pub fn from_table_file(file: &TableFile, relprec: u32) -> Result<Self> {
        let p = file.p;
        modarith::ensure_odd_prime(p)?;
        let modulus = BigUint::from_str(&file.modulus.to_string())
            .map_err(|_| Error::TableLoad("modulus must be a positive integer".into()))?;
        if modulus.is_zero() {
            return Err(Error::ZeroModulus);
        }
        let mut table = BTreeMap::new();
        for (key, t) in &file.entries {
            let a = BigInt::from_str(key.trim())
                .map_err(|_| Error::TableLoad(format!("entry key {key:?} is not an integer")))?;
            let t = BigInt::from_str(&t.to_string())
                .map_err(|_| Error::TableLoad(format!("entry for {key} is not an integer")))?;
            let a = modarith::reduce(&modulus, &a)?;
            if !a.is_unit() {
                return Err(Error::InvalidEntry(a.value().clone()));
            }
            if (&t % BigInt::from(p)).is_zero() {
                return Err(Error::InvalidEntry(a.value().clone()));
            }
            table.insert(a.value().clone(), teichmuller(p, &t, relprec)?);
        }
        Self::from_values(p, modulus, relprec, table)
    }

    pub fn load_table(path: &Path, relprec: u32) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::TableLoad(format!("{}: {e}", path.display())))?;
        let file: TableFile =
            serde_json::from_str(&text).map_err(|e| Error::TableLoad(format!("{}: {e}", path.display())))?;
        Self::from_table_file(&file, relprec)
    }
}

impl fmt::Display for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "character mod {} (p = {}) {{", self.level, self.p)?;
        for (i, (a, v)) in self.table.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, " {a} -> {}", v.unit().map(ToString::to_string).unwrap_or_default())?;
        }
        write!(f, " }}")
    }
}

/// JSON character table: `{ "p": .., "modulus": .., "entries": { "<a>": t_a } }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableFile {
    pub p: u64,
    pub modulus: serde_json::Number,
    pub entries: BTreeMap<String, serde_json::Number>,
}

/// How a character is named on the command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CharacterSpec {
    Trivial { modulus: BigUint },
    TeichPow { k: i64 },
    Table { path: PathBuf },
}

impl FromStr for CharacterSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "triv" {
            return Ok(CharacterSpec::Trivial { modulus: BigUint::one() });
        }
        if let Some(k) = s.strip_prefix("omega^") {
            let k = k.parse().map_err(|_| Error::BadCharacterSpec(s.to_string()))?;
            return Ok(CharacterSpec::TeichPow { k });
        }
        if let Some(path) = s.strip_prefix("table:") {
            if path.is_empty() {
                return Err(Error::BadCharacterSpec(s.to_string()));
            }
            return Ok(CharacterSpec::Table { path: path.into() });
        }
        Err(Error::BadCharacterSpec(s.to_string()))
    }
}

impl fmt::Display for CharacterSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CharacterSpec::Trivial { .. } => write!(f, "triv"),
            CharacterSpec::TeichPow { k } => write!(f, "omega^{k}"),
            CharacterSpec::Table { path } => write!(f, "table:{}", path.display()),
        }
    }
}

impl CharacterSpec {
    pub fn build(&self, p: u64, relprec: u32) -> Result<DirichletCharacter> {
        match self {
            CharacterSpec::Trivial { modulus } => DirichletCharacter::trivial(p, modulus.clone(), relprec),
            CharacterSpec::TeichPow { k } => DirichletCharacter::omega_pow(p, *k, relprec),
            CharacterSpec::Table { path } => {
                let chi = DirichletCharacter::load_table(path, relprec)?;
                if chi.p() != p {
                    return Err(Error::CharacterPrimeMismatch(chi.p(), p));
                }
                Ok(chi)
            }
        }
    }
}
