//! Bernoulli numbers and polynomials over exact rationals.
//!
//! `bernoulli_prime` follows the recurrence
//! `B'_n = 1 - sum_{k<n} C(n,k) B'_k / (n-k+1)`, which gives `B'_1 = +1/2`.
//! `bernoulli(n) = (-1)^n B'_n` is the convention of `t/(e^t - 1)`, so
//! `B_1 = -1/2`.

use std::fmt;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

pub const DEFAULT_MEMO_BOUND: usize = 64;

/// Write-once cache of `B'_0, B'_1, ...` up to a fixed bound. Indices past
/// the bound are recomputed on demand and not stored.
#[derive(Debug)]
pub struct BernoulliCache {
    bound: usize,
    values: RwLock<Vec<Rational>>,
}

impl BernoulliCache {
    pub fn new(bound: usize) -> Self {
        BernoulliCache { bound, values: RwLock::new(vec![Rational::one()]) }
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn bernoulli_prime(&self, n: usize) -> Rational {
        {
            let values = self.values.read().expect("cache lock poisoned");
            if let Some(v) = values.get(n) {
                return v.clone();
            }
        }
        let mut known = self.values.read().expect("cache lock poisoned").clone();
        while known.len() <= n {
            let next = next_bernoulli_prime(&known);
            known.push(next);
        }
        let result = known[n].clone();
        known.truncate(self.bound.max(1));
        let mut values = self.values.write().expect("cache lock poisoned");
        // Every writer computes the same prefix, so the longer one wins.
        if known.len() > values.len() {
            *values = known;
        }
        result
    }
}

fn next_bernoulli_prime(known: &[Rational]) -> Rational {
    let n = known.len();
    let big_n = BigInt::from(n);
    let mut acc = Rational::one();
    for (k, b) in known.iter().enumerate() {
        let c = binomial(big_n.clone(), BigInt::from(k));
        acc -= Rational::new(c, BigInt::from(n - k + 1)) * b;
    }
    acc
}

fn global_cache() -> &'static BernoulliCache {
    static CACHE: OnceLock<BernoulliCache> = OnceLock::new();
    CACHE.get_or_init(|| BernoulliCache::new(DEFAULT_MEMO_BOUND))
}

pub fn bernoulli_prime(n: usize) -> Rational {
    global_cache().bernoulli_prime(n)
}

pub fn bernoulli(n: usize) -> Rational {
    let b = bernoulli_prime(n);
    if n % 2 == 1 {
        -b
    } else {
        b
    }
}

/// A polynomial with rational coefficients; `coeffs[i]` multiplies `X^i`.
/// Trailing zeros are always trimmed, so the zero polynomial has no
/// coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RationalPolynomial {
    coeffs: Vec<Rational>,
}

impl RationalPolynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RationalPolynomial { coeffs }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// `a X^n`
    pub fn monomial(n: usize, a: Rational) -> Self {
        let mut coeffs = vec![Rational::zero(); n + 1];
        coeffs[n] = a;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let zero = Rational::zero();
        Self::new(
            (0..len).map(|i| self.coeffs.get(i).unwrap_or(&zero) + other.coeffs.get(i).unwrap_or(&zero)).collect(),
        )
    }

    pub fn scale(&self, a: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * a).collect())
    }
}

impl fmt::Display for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match i {
                0 => write!(f, "{a}")?,
                _ if a.is_one() => {}
                _ => write!(f, "{a}*")?,
            }
            match i {
                0 => {}
                1 => write!(f, "X")?,
                _ => write!(f, "X^{i}")?,
            }
        }
        Ok(())
    }
}

/// `B_n(X) = sum_i C(n,i) B_i X^(n-i)`.
pub fn bernoulli_poly(n: usize) -> RationalPolynomial {
    let mut coeffs = vec![Rational::zero(); n + 1];
    let big_n = BigInt::from(n);
    for i in 0..=n {
        let c = binomial(big_n.clone(), BigInt::from(i));
        coeffs[n - i] = bernoulli(i) * Rational::from_integer(c);
    }
    RationalPolynomial::new(coeffs)
}

pub fn bernoulli_poly_eval(n: usize, x: &Rational) -> Rational {
    bernoulli_poly(n).eval(x)
}

/// `"num/den"`, or just `"num"` for integers.
pub fn format_rational(q: &Rational) -> String {
    q.to_string()
}
