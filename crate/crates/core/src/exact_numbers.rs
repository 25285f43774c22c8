//! Exact rationals, prime valuations, S-unit factorization and the absolute
//! Weil height over the rationals.
//!
//! The scalar type is [`ExactRational`], an alias for `num_rational::BigRational`
//! (always kept in lowest terms with a positive denominator). Its `Display`
//! form is `num/den`, with the denominator omitted when it is 1, which is also
//! the serialized form used throughout the crate.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign as BigSign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub type ExactRational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumberError {
    #[error("zero input")]
    ZeroInput,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("not an S-unit: leftover cofactor {cofactor}")]
    NotSUnit { cofactor: ExactRational },
    #[error("cannot parse rational literal `{0}`")]
    BadLiteral(String),
    #[error("cofactor {0} is too large to factor")]
    Unfactorable(BigUint),
}

/// Shorthand for an integer-valued rational.
pub fn rat(n: i64) -> ExactRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> ExactRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `a`, `-a/b` or a finite decimal such as `1.25` into an exact rational.
pub fn parse_rational(text: &str) -> Result<ExactRational, NumberError> {
    let s = text.trim();
    let bad = || NumberError::BadLiteral(text.to_string());
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int_part: BigInt = match int.trim_start_matches(['-', '+']) {
            "" => BigInt::zero(),
            digits => digits.parse().map_err(|_| bad())?,
        };
        let frac_part: BigInt = frac.parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let mut value = BigRational::new(int_part * &scale + frac_part, scale);
        if negative {
            value = -value;
        }
        return Ok(value);
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

/// Serde adapters storing rationals as `"num/den"` strings.
pub mod rational_str {
    use super::*;

    pub fn serialize<S: Serializer>(value: &ExactRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&value.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<ExactRational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(values: &[ExactRational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(values.len()))?;
            for v in values {
                seq.serialize_element(&v.to_string())?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<ExactRational>, D::Error> {
            let texts = Vec::<String>::deserialize(d)?;
            texts
                .iter()
                .map(|t| parse_rational(t).map_err(serde::de::Error::custom))
                .collect()
        }
    }
}

/// Sign of a nonzero rational; the torsion part of an S-unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn of(x: &ExactRational) -> Sign {
        if x.is_negative() {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    /// 0 for `Plus`, 1 for `Minus`: the additive ℤ/2 coordinate.
    pub fn bit(self) -> u8 {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }

    pub fn from_bit(bit: u8) -> Sign {
        if bit.is_multiple_of(2) {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn to_rational(self) -> ExactRational {
        rat(self.as_i8() as i64)
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i8(self.as_i8())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Sign, D::Error> {
        match i8::deserialize(d)? {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(serde::de::Error::custom(format!("sign must be 1 or -1, got {other}"))),
        }
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in SMALL {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    'witness: for a in SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

fn factor_u64_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    factor_u64_into(d, out);
    factor_u64_into(n / d, out);
}

/// Distinct prime divisors of a nonzero integer.
///
/// Small factors are found by trial division; a cofactor that still exceeds
/// 64 bits is rejected rather than handed to a general factoring method.
pub fn prime_divisors(n: &BigInt) -> Result<Vec<u64>, NumberError> {
    if n.is_zero() {
        return Err(NumberError::ZeroInput);
    }
    let mut rest = n.magnitude().clone();
    let mut primes = Vec::new();
    let mut p = 2u64;
    while p < 1 << 16 {
        let big_p = BigUint::from(p);
        if (&rest % &big_p).is_zero() {
            primes.push(p);
            while (&rest % &big_p).is_zero() {
                rest /= &big_p;
            }
        }
        if rest.is_one() {
            break;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if !rest.is_one() {
        let small = rest.to_u64().ok_or_else(|| NumberError::Unfactorable(rest.clone()))?;
        let mut found = Vec::new();
        factor_u64_into(small, &mut found);
        primes.extend(found);
    }
    primes.sort_unstable();
    primes.dedup();
    Ok(primes)
}

/// A finite, sorted set of distinct primes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct PrimeSet {
    primes: Vec<u64>,
}

impl PrimeSet {
    pub fn new<I: IntoIterator<Item = u64>>(primes: I) -> Result<PrimeSet, NumberError> {
        let mut primes: Vec<u64> = primes.into_iter().collect();
        if let Some(&bad) = primes.iter().find(|&&p| !is_prime(p)) {
            return Err(NumberError::NotPrime(bad));
        }
        primes.sort_unstable();
        primes.dedup();
        Ok(PrimeSet { primes })
    }

    pub fn empty() -> PrimeSet {
        PrimeSet::default()
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn contains(&self, p: u64) -> bool {
        self.primes.binary_search(&p).is_ok()
    }

    pub fn index_of(&self, p: u64) -> Option<usize> {
        self.primes.binary_search(&p).ok()
    }

    pub fn union(&self, other: &PrimeSet) -> PrimeSet {
        let mut primes = self.primes.clone();
        primes.extend_from_slice(&other.primes);
        primes.sort_unstable();
        primes.dedup();
        PrimeSet { primes }
    }
}

impl TryFrom<Vec<u64>> for PrimeSet {
    type Error = NumberError;
    fn try_from(v: Vec<u64>) -> Result<Self, Self::Error> {
        PrimeSet::new(v)
    }
}

impl From<PrimeSet> for Vec<u64> {
    fn from(s: PrimeSet) -> Vec<u64> {
        s.primes
    }
}

/// Strips every factor `p` from `n`, returning the multiplicity.
fn strip_factor(n: &mut BigUint, p: u64) -> i64 {
    if n.is_zero() {
        return 0;
    }
    if p == 2 {
        let tz = n.trailing_zeros().unwrap_or(0);
        *n >>= tz;
        return tz as i64;
    }
    // divide by p^(2^k) for growing k, then walk the powers back down
    let mut powers = vec![BigUint::from(p)];
    let mut count = 0i64;
    loop {
        let last = powers.last().expect("nonempty");
        let (q, r) = n.div_rem(last);
        if !r.is_zero() {
            break;
        }
        *n = q;
        count += 1i64 << (powers.len() - 1);
        let sq = last * last;
        if sq.bits() > n.bits() {
            break;
        }
        powers.push(sq);
    }
    for (k, pk) in powers.iter().enumerate().rev() {
        let (q, r) = n.div_rem(pk);
        if r.is_zero() {
            *n = q;
            count += 1i64 << k;
        }
    }
    count
}

/// The p-adic valuation of a nonzero rational.
pub fn valuation(p: u64, x: &ExactRational) -> Result<i64, NumberError> {
    if !is_prime(p) {
        return Err(NumberError::NotPrime(p));
    }
    if x.is_zero() {
        return Err(NumberError::ZeroInput);
    }
    let mut num = x.numer().magnitude().clone();
    let mut den = x.denom().magnitude().clone();
    Ok(strip_factor(&mut num, p) - strip_factor(&mut den, p))
}

/// Sign and exponent data of an S-unit: `sign · Π p^e`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ValVector {
    pub sign: Sign,
    pub exponents: BTreeMap<u64, i64>,
}

impl ValVector {
    pub fn exponent(&self, p: u64) -> i64 {
        self.exponents.get(&p).copied().unwrap_or(0)
    }

    /// Recomputes `sign · Π p^e` exactly.
    pub fn reconstruct(&self) -> ExactRational {
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for (&p, &e) in &self.exponents {
            let factor = num_traits::pow(BigInt::from(p), e.unsigned_abs() as usize);
            if e > 0 {
                num *= factor;
            } else {
                den *= factor;
            }
        }
        let value = BigRational::new(num, den);
        match self.sign {
            Sign::Plus => value,
            Sign::Minus => -value,
        }
    }

    /// Exponents listed in the order of `primes` (zeros where absent).
    pub fn dense(&self, primes: &PrimeSet) -> Vec<i64> {
        primes.primes().iter().map(|&p| self.exponent(p)).collect()
    }
}

/// Factors `x` completely over `primes`, or reports the leftover cofactor.
pub fn sunit_factor(primes: &PrimeSet, x: &ExactRational) -> Result<ValVector, NumberError> {
    if x.is_zero() {
        return Err(NumberError::ZeroInput);
    }
    let mut num = x.numer().magnitude().clone();
    let mut den = x.denom().magnitude().clone();
    let mut exponents = BTreeMap::new();
    for &p in primes.primes() {
        let e = strip_factor(&mut num, p) - strip_factor(&mut den, p);
        if e != 0 {
            exponents.insert(p, e);
        }
    }
    if !num.is_one() || !den.is_one() {
        let cofactor = BigRational::new(BigInt::from_biguint(BigSign::Plus, num), BigInt::from_biguint(BigSign::Plus, den));
        return Err(NumberError::NotSUnit { cofactor });
    }
    Ok(ValVector { sign: Sign::of(x), exponents })
}

/// Natural logarithm of a positive big integer.
pub fn ln_biguint(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// The absolute Weil height of a nonzero rational, as `max(|num|, den)` and
/// its logarithm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Height {
    pub max: BigUint,
    pub log: f64,
}

impl Height {
    pub fn from_max(max: BigUint) -> Height {
        let log = ln_biguint(&max);
        Height { max, log }
    }
}

impl fmt::Display for Height {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "log {} = {:.6}", self.max, self.log)
    }
}

/// Exact height integer `max(|num|, den)` of a nonzero rational.
pub fn height_max(x: &ExactRational) -> Result<BigUint, NumberError> {
    if x.is_zero() {
        return Err(NumberError::ZeroInput);
    }
    let num = x.numer().magnitude();
    let den = x.denom().magnitude();
    Ok(if num > den { num.clone() } else { den.clone() })
}

pub fn weil_height(x: &ExactRational) -> Result<Height, NumberError> {
    height_max(x).map(Height::from_max)
}

/// Raises a rational to a signed big-integer power. Panics on `0^negative`.
pub fn pow_big(base: &ExactRational, exp: &BigInt) -> ExactRational {
    let e = exp.magnitude().to_u64().expect("exponent exceeds 64 bits") as usize;
    let num = num_traits::pow(base.numer().clone(), e);
    let den = num_traits::pow(base.denom().clone(), e);
    if exp.is_negative() {
        assert!(!num.is_zero(), "zero raised to a negative power");
        BigRational::new(den, num)
    } else {
        BigRational::new(num, den)
    }
}

/// Total number of decimal digits in numerator and denominator, estimated
/// from bit lengths.
pub fn digit_size(x: &ExactRational) -> u64 {
    let bits = x.numer().bits() + x.denom().bits();
    (bits as f64 * std::f64::consts::LOG10_2).ceil() as u64
}
