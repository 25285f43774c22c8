//! Dense univariate polynomials and reduced rational functions over ℚ.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::exact_numbers::{prime_divisors, ExactRational};
use crate::poly::{Monomial, MultiPoly, RatFunc};

/// Coefficients from the constant term upwards, with no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct UniPoly {
    coeffs: Vec<ExactRational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<ExactRational>) -> UniPoly {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> UniPoly {
        UniPoly::default()
    }

    pub fn one() -> UniPoly {
        UniPoly::constant(ExactRational::one())
    }

    pub fn constant(c: ExactRational) -> UniPoly {
        UniPoly::new(vec![c])
    }

    /// `x`
    pub fn x() -> UniPoly {
        UniPoly::new(vec![ExactRational::zero(), ExactRational::one()])
    }

    /// `c·x^k`
    pub fn monomial(k: usize, c: ExactRational) -> UniPoly {
        let mut v = vec![ExactRational::zero(); k + 1];
        v[k] = c;
        UniPoly::new(v)
    }

    pub fn from_ints(coeffs: &[i64]) -> UniPoly {
        UniPoly::new(coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    pub fn coeffs(&self) -> &[ExactRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> ExactRational {
        self.coeffs.get(k).cloned().unwrap_or_else(ExactRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&ExactRational> {
        self.coeffs.last()
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        UniPoly::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn neg(&self) -> UniPoly {
        UniPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn sub(&self, other: &UniPoly) -> UniPoly {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &ExactRational) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![ExactRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }

    pub fn div_rem(&self, divisor: &UniPoly) -> (UniPoly, UniPoly) {
        let d = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= d {
            return (UniPoly::zero(), self.clone());
        }
        let mut quot = vec![ExactRational::zero(); rem.len() - d];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + d] / &lead;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= &c * dc;
            }
            quot[k] = c;
        }
        rem.truncate(d);
        (UniPoly::new(quot), UniPoly::new(rem))
    }

    pub fn monic(&self) -> UniPoly {
        match self.leading() {
            Some(l) => self.scale(&l.recip()),
            None => UniPoly::zero(),
        }
    }

    /// Monic greatest common divisor (zero if both are zero).
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn eval(&self, x: &ExactRational) -> ExactRational {
        self.coeffs.iter().rev().fold(ExactRational::zero(), |acc, c| acc * x + c)
    }

    /// `p(x + k)`.
    pub fn shift(&self, k: &ExactRational) -> UniPoly {
        let lin = UniPoly::new(vec![k.clone(), ExactRational::one()]);
        self.coeffs.iter().rev().fold(UniPoly::zero(), |acc, c| acc.mul(&lin).add(&UniPoly::constant(c.clone())))
    }

    /// Integer multiple with coprime integer coefficients and positive
    /// leading coefficient.
    pub fn primitive(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return Vec::new();
        }
        let lcm = self.coeffs.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let ints: Vec<BigInt> = self.coeffs.iter().map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        let sign = if ints.last().unwrap().is_negative() { -BigInt::one() } else { BigInt::one() };
        ints.into_iter().map(|c| c / &g * &sign).collect()
    }

    /// All integer roots, ascending.
    pub fn integer_roots(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return Vec::new();
        }
        let ints = self.primitive();
        let zero_mult = ints.iter().position(|c| !c.is_zero()).unwrap();
        let mut roots = Vec::new();
        if zero_mult > 0 {
            roots.push(BigInt::zero());
        }
        let trailing = &ints[zero_mult];
        if ints.len() - zero_mult > 1 {
            let candidates: Vec<BigInt> = match trailing.magnitude().to_u64() {
                Some(t) if t <= 1 << 20 => (1..=t).filter(|d| t % d == 0).map(BigInt::from).collect(),
                _ => divisors(trailing),
            };
            let reduced = UniPoly::new(ints[zero_mult..].iter().map(|c| BigRational::from_integer(c.clone())).collect());
            for d in candidates {
                for r in [d.clone(), -d] {
                    if reduced.eval(&BigRational::from_integer(r.clone())).is_zero() {
                        roots.push(r);
                    }
                }
            }
        }
        roots.sort();
        roots.dedup();
        roots
    }

    pub fn to_multi(&self, nvars: usize, var: usize) -> MultiPoly {
        MultiPoly::from_terms(
            nvars,
            self.coeffs.iter().enumerate().map(|(k, c)| {
                let mut e = vec![0; nvars];
                e[var] = k as u32;
                (Monomial(e), c.clone())
            }),
        )
    }

    /// Converts a polynomial in one variable; `None` if it uses more.
    pub fn from_multi(p: &MultiPoly) -> Option<UniPoly> {
        if p.nvars() != 1 {
            return if p.is_zero() { Some(UniPoly::zero()) } else { None };
        }
        let mut coeffs = vec![ExactRational::zero(); p.total_degree().map_or(0, |d| d as usize + 1)];
        for (m, c) in p.terms() {
            coeffs[m.0[0] as usize] = c.clone();
        }
        Some(UniPoly::new(coeffs))
    }

    pub fn render(&self, var: &str) -> String {
        self.to_multi(1, 0).render(&[var])
    }

    /// First `n` power-series coefficients of `num / den`; requires
    /// `den(0) ≠ 0`.
    pub fn series_div(num: &UniPoly, den: &UniPoly, n: usize) -> Vec<ExactRational> {
        let d0 = den.coeff(0);
        assert!(!d0.is_zero(), "denominator vanishes at 0");
        let inv = d0.recip();
        let mut out: Vec<ExactRational> = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = num.coeff(k);
            for j in 1..=k.min(den.coeffs.len().saturating_sub(1)) {
                acc -= &den.coeffs[j] * &out[k - j];
            }
            out.push(acc * &inv);
        }
        out
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let primes = prime_divisors(n).unwrap_or_default();
    let mut divs = vec![BigInt::one()];
    let mut rest = n.magnitude().clone();
    for p in primes {
        let bp = num_bigint::BigUint::from(p);
        let mut mult = 0;
        while (&rest % &bp).is_zero() {
            rest /= &bp;
            mult += 1;
        }
        let current = divs.clone();
        let mut pk = BigInt::one();
        for _ in 0..mult {
            pk *= p;
            divs.extend(current.iter().map(|d| d * &pk));
        }
    }
    divs
}

/// Univariate rational function in lowest terms with monic denominator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UniRatFunc {
    pub num: UniPoly,
    pub den: UniPoly,
}

impl UniRatFunc {
    pub fn new(num: UniPoly, den: UniPoly) -> Option<UniRatFunc> {
        if den.is_zero() {
            return None;
        }
        if num.is_zero() {
            return Some(UniRatFunc { num, den: UniPoly::one() });
        }
        let g = num.gcd(&den);
        let (num, _) = num.div_rem(&g);
        let (den, _) = den.div_rem(&g);
        let lead = den.leading().unwrap().recip();
        Some(UniRatFunc { num: num.scale(&lead), den: den.scale(&lead) })
    }

    pub fn constant(c: ExactRational) -> UniRatFunc {
        UniRatFunc { num: UniPoly::constant(c), den: UniPoly::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.den.degree() == Some(0) && self.num.degree().unwrap_or(0) == 0
    }

    /// `None` at a pole.
    pub fn eval(&self, x: &ExactRational) -> Option<ExactRational> {
        let d = self.den.eval(x);
        (!d.is_zero()).then(|| self.num.eval(x) / d)
    }

    pub fn from_ratfunc(f: &RatFunc) -> Option<UniRatFunc> {
        UniRatFunc::new(UniPoly::from_multi(f.numerator())?, UniPoly::from_multi(f.denominator())?)
    }

    pub fn to_ratfunc(&self, nvars: usize, var: usize) -> RatFunc {
        RatFunc::new(self.num.to_multi(nvars, var), self.den.to_multi(nvars, var)).expect("nonzero denominator")
    }

    pub fn render(&self, var: &str) -> String {
        if self.den.degree() == Some(0) {
            return self.num.render(var);
        }
        format!("({})/({})", self.num.render(var), self.den.render(var))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_numbers::{rat, ratio};

    #[test]
    fn gcd_and_reduction() {
        // (n+1)^2 / ((n+1)(n+2)) = (n+1)/(n+2)
        let a = UniPoly::from_ints(&[1, 2, 1]);
        let b = UniPoly::from_ints(&[2, 3, 1]);
        assert_eq!(a.gcd(&b), UniPoly::from_ints(&[1, 1]));
        let f = UniRatFunc::new(a, b).unwrap();
        assert_eq!(f.num, UniPoly::from_ints(&[1, 1]));
        assert_eq!(f.den, UniPoly::from_ints(&[2, 1]));
        assert_eq!(f.eval(&rat(-2)), None);
    }

    #[test]
    fn integer_roots_examples() {
        // (x-3)(x+2)x(2x-1)
        let p = UniPoly::from_ints(&[-3, 1]).mul(&UniPoly::from_ints(&[2, 1])).mul(&UniPoly::x()).mul(&UniPoly::from_ints(&[-1, 2]));
        assert_eq!(p.integer_roots(), vec![BigInt::from(-2), BigInt::from(0), BigInt::from(3)]);
        assert!(UniPoly::from_ints(&[1, 0, 1]).integer_roots().is_empty());
    }

    #[test]
    fn series_division() {
        // 1/(1-2x) = 1 + 2x + 4x^2 + ...
        let s = UniPoly::series_div(&UniPoly::one(), &UniPoly::from_ints(&[1, -2]), 5);
        assert_eq!(s, vec![rat(1), rat(2), rat(4), rat(8), rat(16)]);
    }

    #[test]
    fn primitive_clears_denominators() {
        let p = UniPoly::new(vec![ratio(-1, 2), rat(1)]);
        assert_eq!(p.primitive(), vec![BigInt::from(-1), BigInt::from(2)]);
        assert_eq!(UniPoly::from_ints(&[4, -6]).primitive(), vec![BigInt::from(-2), BigInt::from(3)]);
    }

    #[test]
    fn shift_polynomial() {
        let p = UniPoly::from_ints(&[0, 0, 1]);
        assert_eq!(p.shift(&rat(1)), UniPoly::from_ints(&[1, 2, 1]));
    }
}
