//! Sparse multivariate polynomials and rational functions over ℚ.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};

use crate::exact_numbers::ExactRational;

/// Exponent tuple ordered graded-lexicographically (total degree first, then
/// larger exponent of the first variable).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Monomial {
        Monomial(vec![0; nvars])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// All monomials in `nvars` variables of total degree ≤ `max_degree`,
    /// largest first.
    pub fn up_to_degree(nvars: usize, max_degree: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        fn rec(prefix: &mut Vec<u32>, nvars: usize, remaining: u32, out: &mut Vec<Monomial>) {
            if prefix.len() == nvars {
                out.push(Monomial(prefix.clone()));
                return;
            }
            for e in 0..=remaining {
                prefix.push(e);
                rec(prefix, nvars, remaining - e, out);
                prefix.pop();
            }
        }
        rec(&mut Vec::new(), nvars, max_degree, &mut out);
        out.sort_by(|a, b| b.cmp(a));
        out
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, ExactRational>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> MultiPoly {
        MultiPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: ExactRational) -> MultiPoly {
        let mut p = MultiPoly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    pub fn one(nvars: usize) -> MultiPoly {
        MultiPoly::constant(nvars, ExactRational::one())
    }

    pub fn var(nvars: usize, index: usize) -> MultiPoly {
        let mut e = vec![0; nvars];
        e[index] = 1;
        MultiPoly::from_terms(nvars, [(Monomial(e), ExactRational::one())])
    }

    pub fn monomial(exponents: Vec<u32>, c: ExactRational) -> MultiPoly {
        let nvars = exponents.len();
        MultiPoly::from_terms(nvars, [(Monomial(exponents), c)])
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, ExactRational)>>(nvars: usize, terms: I) -> MultiPoly {
        let mut p = MultiPoly::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.0.len(), nvars, "monomial arity mismatch");
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: ExactRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(ExactRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn as_constant(&self) -> Option<ExactRational> {
        match self.terms.len() {
            0 => Some(ExactRational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                (m.degree() == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Terms from the largest monomial down.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &ExactRational)> {
        self.terms.iter().rev()
    }

    pub fn leading_coefficient(&self) -> Option<&ExactRational> {
        self.terms.values().next_back()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> MultiPoly {
        MultiPoly { nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &ExactRational) -> MultiPoly {
        if k.is_zero() {
            return MultiPoly::zero(self.nvars);
        }
        MultiPoly { nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect() }
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut acc = MultiPoly::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn eval(&self, point: &[ExactRational]) -> ExactRational {
        assert_eq!(point.len(), self.nvars, "point dimension mismatch");
        let max_deg: Vec<u32> = (0..self.nvars)
            .map(|i| self.terms.keys().map(|m| m.0[i]).max().unwrap_or(0))
            .collect();
        let powers: Vec<Vec<ExactRational>> = point
            .iter()
            .zip(&max_deg)
            .map(|(x, &d)| {
                let mut v = vec![ExactRational::one()];
                for k in 1..=d as usize {
                    let next = &v[k - 1] * x;
                    v.push(next);
                }
                v
            })
            .collect();
        let mut acc = ExactRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t *= &powers[i][e as usize];
                }
            }
            acc += t;
        }
        acc
    }

    /// Substitutes rational functions for the variables.
    pub fn substitute(&self, subs: &[RatFunc]) -> Option<RatFunc> {
        assert_eq!(subs.len(), self.nvars, "substitution arity mismatch");
        let target = subs.first().map_or(0, RatFunc::nvars);
        let mut acc = RatFunc::constant(target, ExactRational::zero());
        for (m, c) in &self.terms {
            let mut t = RatFunc::constant(target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = t.mul(&subs[i].pow(e as i32)?);
                }
            }
            acc = acc.add(&t);
        }
        Some(acc)
    }

    /// Renders the polynomial with the given variable names, largest term
    /// first, in the expression grammar accepted by the CLI parser.
    pub fn render(&self, names: &[&str]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (m, c)) in self.terms().enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            if idx == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let factors: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| if e == 1 { names[i].to_string() } else { format!("{}^{}", names[i], e) })
                .collect();
            if factors.is_empty() {
                let _ = write!(out, "{mag}");
            } else {
                if !mag.is_one() {
                    let _ = write!(out, "{mag}*");
                }
                out.push_str(&factors.join("*"));
            }
        }
        out
    }
}

/// Outcome of evaluating a rational function at a point of ℚ^n, read in ℙ¹.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Evaluation {
    Value(ExactRational),
    Infinity,
    /// Numerator and denominator both vanish.
    Indeterminate,
}

/// `numerator / denominator`, normalized so the leading coefficient of the
/// denominator is 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    numerator: MultiPoly,
    denominator: MultiPoly,
}

impl RatFunc {
    pub fn new(numerator: MultiPoly, denominator: MultiPoly) -> Option<RatFunc> {
        if denominator.is_zero() || numerator.nvars() != denominator.nvars() {
            return None;
        }
        let lc = denominator.leading_coefficient().unwrap().recip();
        let numerator = if numerator.is_zero() { numerator } else { numerator.scale(&lc) };
        let denominator = if numerator.is_zero() { MultiPoly::one(numerator.nvars()) } else { denominator.scale(&lc) };
        Some(RatFunc { numerator, denominator })
    }

    pub fn from_poly(p: MultiPoly) -> RatFunc {
        let n = p.nvars();
        RatFunc { numerator: p, denominator: MultiPoly::one(n) }
    }

    pub fn constant(nvars: usize, c: ExactRational) -> RatFunc {
        RatFunc::from_poly(MultiPoly::constant(nvars, c))
    }

    pub fn var(nvars: usize, index: usize) -> RatFunc {
        RatFunc::from_poly(MultiPoly::var(nvars, index))
    }

    pub fn numerator(&self) -> &MultiPoly {
        &self.numerator
    }

    pub fn denominator(&self) -> &MultiPoly {
        &self.denominator
    }

    pub fn nvars(&self) -> usize {
        self.numerator.nvars()
    }

    pub fn is_polynomial(&self) -> bool {
        self.denominator.is_one()
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        if self.denominator == other.denominator {
            return RatFunc::new(self.numerator.add(&other.numerator), self.denominator.clone()).unwrap();
        }
        let num = self.numerator.mul(&other.denominator).add(&other.numerator.mul(&self.denominator));
        RatFunc::new(num, self.denominator.mul(&other.denominator)).unwrap()
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc { numerator: self.numerator.neg(), denominator: self.denominator.clone() }
    }

    pub fn sub(&self, other: &RatFunc) -> RatFunc {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        RatFunc::new(self.numerator.mul(&other.numerator), self.denominator.mul(&other.denominator)).unwrap()
    }

    /// `None` when dividing by the zero function.
    pub fn div(&self, other: &RatFunc) -> Option<RatFunc> {
        RatFunc::new(self.numerator.mul(&other.denominator), self.denominator.mul(&other.numerator))
    }

    pub fn pow(&self, e: i32) -> Option<RatFunc> {
        let base = if e < 0 { RatFunc::new(self.denominator.clone(), self.numerator.clone())? } else { self.clone() };
        let k = e.unsigned_abs();
        RatFunc::new(base.numerator.pow(k), base.denominator.pow(k))
    }

    /// `self ∘ subs`; `None` if a denominator becomes identically zero.
    pub fn compose(&self, subs: &[RatFunc]) -> Option<RatFunc> {
        self.numerator.substitute(subs)?.div(&self.denominator.substitute(subs)?)
    }

    pub fn eval(&self, point: &[ExactRational]) -> Evaluation {
        let den = self.denominator.eval(point);
        let num = self.numerator.eval(point);
        match (num.is_zero(), den.is_zero()) {
            (_, false) => Evaluation::Value(num / den),
            (false, true) => Evaluation::Infinity,
            (true, true) => Evaluation::Indeterminate,
        }
    }

    pub fn render(&self, names: &[&str]) -> String {
        if self.is_polynomial() {
            return self.numerator.render(names);
        }
        format!("({})/({})", self.numerator.render(names), self.denominator.render(names))
    }
}

/// Default variable names `x1, …, xn`.
pub fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}
