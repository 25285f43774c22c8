//! P-recursive and C-finite sequences, differential equations, and the
//! orbit encoding of a recurrence.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::RationalSelfMap;
use crate::exact_numbers::{rat, rational_str, ExactRational};
use crate::linalg::{charpoly, kronecker, nullspace, solve, RatMatrix};
use crate::poly::RatFunc;
use crate::upoly::{UniPoly, UniRatFunc};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HoloError {
    #[error("every coefficient of the differential equation is zero")]
    DegenerateODE,
    #[error("coefficient {coefficient} has a pole at n = {at}, not below the shift")]
    PoleAtOrAbove { coefficient: usize, at: BigInt },
    #[error("coefficient denominator vanishes at n = {0}")]
    PoleHit(BigInt),
    #[error("expected {expected} initial terms, got {got}")]
    BadInitLength { expected: usize, got: usize },
    #[error("initial data do not determine the term of index {0}")]
    Underdetermined(usize),
    #[error("initial data violate the equation at the term of index {0}")]
    Inconsistent(usize),
    #[error("last recurrence coefficient is zero")]
    ZeroLeadingCoefficient,
    #[error("recurrence fails on the term of index {0}")]
    NotAnnihilating(usize),
    #[error("need at least {needed} terms, got {got}")]
    TooFewTerms { needed: usize, got: usize },
    #[error("no constant-coefficient recurrence of order at most {max_order}")]
    NoneFound { max_order: usize },
    #[error("residue {residue} is not in 0..{modulus}")]
    BadResidue { residue: usize, modulus: usize },
    #[error("recurrence disagrees with the series at the term of index {0}")]
    VerificationFailed(usize),
}

/// Anything that can list its terms.
pub trait Expand {
    /// The first `n + 1` terms starting from the sequence's base index.
    fn expand(&self, n: usize) -> Result<Vec<ExactRational>, HoloError>;
}

pub fn expand<T: Expand + ?Sized>(seq: &T, n: usize) -> Result<Vec<ExactRational>, HoloError> {
    seq.expand(n)
}

/// `a_{n+1} = Σ_{i=0}^{d} r_i(n)·a_{n−i}` for every `n ≥ p + d`, with initial
/// terms `a_p, …, a_{p+d}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PRecurrence {
    coeffs: Vec<UniRatFunc>,
    shift: u64,
    init: Vec<ExactRational>,
}

/// Smallest `p ≥ 0` such that no coefficient has a pole at an integer `≥ p`.
pub fn minimal_shift(coeffs: &[UniRatFunc]) -> u64 {
    coeffs
        .iter()
        .filter_map(|r| r.den.integer_roots().into_iter().filter(|x| !x.is_negative()).max())
        .map(|root| root.to_u64().expect("root fits in u64") + 1)
        .max()
        .unwrap_or(0)
}

impl PRecurrence {
    pub fn new(coeffs: Vec<UniRatFunc>, shift: u64, init: Vec<ExactRational>) -> Result<PRecurrence, HoloError> {
        if coeffs.is_empty() {
            return Err(HoloError::BadInitLength { expected: 1, got: 0 });
        }
        if init.len() != coeffs.len() {
            return Err(HoloError::BadInitLength { expected: coeffs.len(), got: init.len() });
        }
        for (i, r) in coeffs.iter().enumerate() {
            if let Some(root) = r.den.integer_roots().into_iter().filter(|x| *x >= BigInt::from(shift)).max() {
                return Err(HoloError::PoleAtOrAbove { coefficient: i, at: root });
            }
        }
        Ok(PRecurrence { coeffs, shift, init })
    }

    /// Uses the least admissible shift.
    pub fn with_minimal_shift(coeffs: Vec<UniRatFunc>, init: Vec<ExactRational>) -> Result<PRecurrence, HoloError> {
        let p = minimal_shift(&coeffs);
        PRecurrence::new(coeffs, p, init)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[UniRatFunc] {
        &self.coeffs
    }

    pub fn shift(&self) -> u64 {
        self.shift
    }

    pub fn init(&self) -> &[ExactRational] {
        &self.init
    }
}

impl Expand for PRecurrence {
    fn expand(&self, n: usize) -> Result<Vec<ExactRational>, HoloError> {
        let d = self.order();
        let mut out: Vec<ExactRational> = self.init.iter().take(n + 1).cloned().collect();
        while out.len() < n + 1 {
            // out holds a_p .. a_{idx}; compute a_{idx+1}
            let last = out.len() - 1;
            let idx = BigInt::from(self.shift) + last;
            let at = BigRational::from_integer(idx.clone());
            let mut next = ExactRational::zero();
            for (i, r) in self.coeffs.iter().enumerate() {
                let ri = r.eval(&at).ok_or_else(|| HoloError::PoleHit(idx.clone()))?;
                if !ri.is_zero() {
                    next += ri * &out[last - i];
                }
            }
            debug_assert!(last >= d);
            out.push(next);
        }
        Ok(out)
    }
}

/// `Σ_i p_i(x)·F^{(i)}(x) = 0` with initial coefficients `a_0, …, a_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DFiniteODE {
    coeffs: Vec<UniPoly>,
    init: Vec<ExactRational>,
}

/// Coefficient extraction: for every integer `m`,
/// `Σ_s P_s(m)·a_{m+s} = 0` (terms with negative index read as zero).
struct ShiftRelation {
    s_min: i64,
    /// `P_{s_min}, …, P_{s_max}`
    polys: Vec<UniPoly>,
}

impl ShiftRelation {
    fn s_max(&self) -> i64 {
        self.s_min + self.polys.len() as i64 - 1
    }

    fn poly(&self, s: i64) -> &UniPoly {
        &self.polys[(s - self.s_min) as usize]
    }
}

fn falling_factorial_shifted(s: i64, i: usize) -> UniPoly {
    // (m + s)(m + s − 1)…(m + s − i + 1)
    (0..i as i64).fold(UniPoly::one(), |acc, k| acc.mul(&UniPoly::new(vec![rat(s - k), rat(1)])))
}

impl DFiniteODE {
    pub fn new(coeffs: Vec<UniPoly>, init: Vec<ExactRational>) -> Result<DFiniteODE, HoloError> {
        if coeffs.iter().all(UniPoly::is_zero) {
            return Err(HoloError::DegenerateODE);
        }
        let mut coeffs = coeffs;
        while coeffs.last().is_some_and(UniPoly::is_zero) {
            coeffs.pop();
        }
        Ok(DFiniteODE { coeffs, init })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[UniPoly] {
        &self.coeffs
    }

    pub fn init(&self) -> &[ExactRational] {
        &self.init
    }

    fn relation(&self) -> ShiftRelation {
        let mut entries: Vec<(i64, UniPoly)> = Vec::new();
        for (i, p) in self.coeffs.iter().enumerate() {
            for (j, c) in p.coeffs().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let s = i as i64 - j as i64;
                entries.push((s, falling_factorial_shifted(s, i).scale(c)));
            }
        }
        let s_min = entries.iter().map(|e| e.0).min().unwrap();
        let s_max = entries.iter().map(|e| e.0).max().unwrap();
        let mut polys = vec![UniPoly::zero(); (s_max - s_min + 1) as usize];
        for (s, p) in entries {
            let slot = &mut polys[(s - s_min) as usize];
            *slot = slot.add(&p);
        }
        while polys.last().is_some_and(UniPoly::is_zero) {
            polys.pop();
        }
        let lead = polys.iter().position(|p| !p.is_zero()).unwrap();
        ShiftRelation { s_min: s_min + lead as i64, polys: polys.split_off(lead) }
    }
}

impl Expand for DFiniteODE {
    fn expand(&self, n: usize) -> Result<Vec<ExactRational>, HoloError> {
        let rel = self.relation();
        let s_max = rel.s_max();
        let lead = rel.poly(s_max);
        let term = |a: &[ExactRational], k: i64| -> ExactRational {
            if k < 0 {
                ExactRational::zero()
            } else {
                a[k as usize].clone()
            }
        };
        let given = self.init.len();
        for top in 0..given.min(n + 1) {
            let m = top as i64 - s_max;
            let lhs = (rel.s_min..=s_max).fold(ExactRational::zero(), |acc, s| acc + rel.poly(s).eval(&rat(m)) * term(&self.init, m + s));
            if !lhs.is_zero() {
                return Err(HoloError::Inconsistent(top));
            }
        }
        let mut out: Vec<ExactRational> = self.init.iter().take(n + 1).cloned().collect();
        while out.len() < n + 1 {
            let k = out.len();
            let m = k as i64 - s_max;
            let l = lead.eval(&rat(m));
            if l.is_zero() {
                return Err(HoloError::Underdetermined(k));
            }
            let rest = (rel.s_min..s_max).fold(ExactRational::zero(), |acc, s| acc + rel.poly(s).eval(&rat(m)) * term(&out, m + s));
            out.push(-rest / l);
        }
        Ok(out)
    }
}

/// Converts a differential equation into the recurrence satisfied by its
/// series coefficients, starting at the least safe shift.
pub fn ode_to_recurrence(ode: &DFiniteODE) -> Result<PRecurrence, HoloError> {
    let rel = ode.relation();
    let s_max = rel.s_max();
    let s_min = rel.s_min;
    let lead = rel.poly(s_max);
    let back = rat(1 - s_max);
    let coeffs: Vec<UniRatFunc> = if s_max == s_min {
        vec![UniRatFunc::constant(ExactRational::zero())]
    } else {
        let den = lead.shift(&back);
        (0..(s_max - s_min) as usize)
            .map(|i| {
                let s = s_max - 1 - i as i64;
                UniRatFunc::new(rel.poly(s).shift(&back).neg(), den.clone()).expect("nonzero leading polynomial")
            })
            .collect()
    };
    let mut shift: i64 = 0;
    for root in lead.integer_roots() {
        let r = root.to_i64().expect("root fits in i64");
        shift = shift.max(r + s_max);
    }
    let shift = shift.max(minimal_shift(&coeffs) as i64) as u64;
    let d = coeffs.len() - 1;
    let series = ode.expand(shift as usize + d + 50)?;
    let init = series[shift as usize..=shift as usize + d].to_vec();
    let rec = PRecurrence::new(coeffs, shift, init)?;
    let check = rec.expand(49)?;
    if let Some(k) = check.iter().zip(&series[shift as usize..]).position(|(a, b)| a != b) {
        return Err(HoloError::VerificationFailed(shift as usize + k));
    }
    Ok(rec)
}

/// The orbit encoding of a recurrence: `a_{p+n} = f(φ^n(start))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecurrenceSystem {
    pub map: RationalSelfMap,
    pub observable: RatFunc,
    pub start: Vec<ExactRational>,
    pub shift: u64,
}

/// State `(t, t_1, …, t_{d+1})` with `t` the current index; the map is
/// `(t + 1, t_2, …, t_{d+1}, Σ r_i(t)·t_{d+1−i})` and the observable `t_1`.
pub fn recurrence_to_dynsys(rec: &PRecurrence) -> RecurrenceSystem {
    let d = rec.order();
    let n = d + 2;
    let var = |i: usize| RatFunc::var(n, i);
    let mut coords = vec![var(0).add(&RatFunc::constant(n, ExactRational::one()))];
    coords.extend((2..n).map(var));
    let mut last = RatFunc::constant(n, ExactRational::zero());
    for (i, r) in rec.coeffs.iter().enumerate() {
        if r.is_zero() {
            continue;
        }
        last = last.add(&r.to_ratfunc(n, 0).mul(&var(d + 1 - i)));
    }
    coords.push(last);
    let mut start = vec![rat(rec.shift as i64 + d as i64)];
    start.extend(rec.init.iter().cloned());
    RecurrenceSystem {
        map: RationalSelfMap::new(coords).expect("consistent arity"),
        observable: var(1),
        start,
        shift: rec.shift,
    }
}

/// `a_n = Σ_{i=1}^{d} c_i·a_{n−i}` for `n ≥ d`, with initial terms
/// `a_0, …, a_{d−1}`. Order zero is the zero sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CFiniteRecurrence {
    #[serde(with = "rational_str::vec")]
    coeffs: Vec<ExactRational>,
    #[serde(with = "rational_str::vec")]
    init: Vec<ExactRational>,
}

impl CFiniteRecurrence {
    pub fn new(coeffs: Vec<ExactRational>, init: Vec<ExactRational>) -> Result<CFiniteRecurrence, HoloError> {
        if coeffs.last().is_some_and(Zero::is_zero) {
            return Err(HoloError::ZeroLeadingCoefficient);
        }
        if init.len() != coeffs.len() {
            return Err(HoloError::BadInitLength { expected: coeffs.len(), got: init.len() });
        }
        Ok(CFiniteRecurrence { coeffs, init })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[ExactRational] {
        &self.coeffs
    }

    pub fn init(&self) -> &[ExactRational] {
        &self.init
    }

    /// `x^d − c_1 x^{d−1} − … − c_d`.
    pub fn characteristic(&self) -> UniPoly {
        let d = self.order();
        let mut v = vec![ExactRational::zero(); d + 1];
        v[d] = ExactRational::one();
        for (i, c) in self.coeffs.iter().enumerate() {
            v[d - 1 - i] = -c;
        }
        UniPoly::new(v)
    }

    /// Characteristic polynomial scaled to coprime integer coefficients with
    /// positive leading coefficient, constant term first.
    pub fn primitive_polynomial(&self) -> Vec<BigInt> {
        self.characteristic().primitive()
    }

    pub fn companion(&self) -> RatMatrix {
        let d = self.order();
        let mut m = vec![vec![ExactRational::zero(); d]; d];
        for (j, c) in self.coeffs.iter().enumerate() {
            m[0][j] = c.clone();
        }
        for i in 1..d {
            m[i][i - 1] = ExactRational::one();
        }
        m
    }

    /// The first index where the recurrence fails on `terms`, if any.
    pub fn first_violation(&self, terms: &[ExactRational]) -> Option<usize> {
        let d = self.order();
        (d..terms.len()).find(|&n| {
            let rhs = self.coeffs.iter().enumerate().fold(ExactRational::zero(), |acc, (i, c)| acc + c * &terms[n - 1 - i]);
            rhs != terms[n]
        })
    }

    pub fn to_precurrence(&self) -> PRecurrence {
        if self.order() == 0 {
            return PRecurrence::new(vec![UniRatFunc::constant(ExactRational::zero())], 0, vec![ExactRational::zero()]).unwrap();
        }
        let coeffs = self.coeffs.iter().map(|c| UniRatFunc::constant(c.clone())).collect();
        PRecurrence::new(coeffs, 0, self.init.clone()).expect("constant coefficients have no poles")
    }
}

impl Expand for CFiniteRecurrence {
    fn expand(&self, n: usize) -> Result<Vec<ExactRational>, HoloError> {
        let d = self.order();
        if d == 0 {
            return Ok(vec![ExactRational::zero(); n + 1]);
        }
        let mut out: Vec<ExactRational> = self.init.iter().take(n + 1).cloned().collect();
        while out.len() < n + 1 {
            let k = out.len();
            let next = self.coeffs.iter().enumerate().fold(ExactRational::zero(), |acc, (i, c)| acc + c * &out[k - 1 - i]);
            out.push(next);
        }
        Ok(out)
    }
}

fn fit_order(terms: &[ExactRational], d: usize) -> Option<CFiniteRecurrence> {
    if d == 0 {
        return terms.iter().all(Zero::is_zero).then(|| CFiniteRecurrence { coeffs: vec![], init: vec![] });
    }
    let rows: RatMatrix = (d..terms.len()).map(|n| (1..=d).map(|i| terms[n - i].clone()).collect()).collect();
    let rhs: Vec<ExactRational> = terms[d..].to_vec();
    let (mut x, unique) = solve(&rows, d, &rhs)?;
    if x[d - 1].is_zero() && !unique {
        let v = nullspace(&rows, d).into_iter().find(|v| !v[d - 1].is_zero())?;
        for (xi, vi) in x.iter_mut().zip(v) {
            *xi += vi;
        }
    }
    if x[d - 1].is_zero() {
        return None;
    }
    Some(CFiniteRecurrence { coeffs: x, init: terms[..d].to_vec() })
}

/// Lowest-order constant-coefficient recurrence annihilating every given
/// term, searching orders up to `⌊len/2⌋ − 1`.
pub fn min_cfinite_annihilator(terms: &[ExactRational]) -> Result<CFiniteRecurrence, HoloError> {
    if terms.len() < 4 {
        return Err(HoloError::TooFewTerms { needed: 4, got: terms.len() });
    }
    let bound = terms.len() / 2 - 1;
    (0..=bound).find_map(|d| fit_order(terms, d)).ok_or(HoloError::NoneFound { max_order: bound })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FatouOutcome {
    /// Integer coefficients with unit leading shift coefficient.
    Monic { recurrence: CFiniteRecurrence },
    /// Only a primitive relation exists; the witness polynomial is listed
    /// constant term first.
    QuasilinearOnly {
        #[serde(with = "bigint_str_vec")]
        witness: Vec<BigInt>,
    },
}

mod bigint_str_vec {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<String>::deserialize(d)?.iter().map(|t| t.parse().map_err(serde::de::Error::custom)).collect()
    }
}

/// Decides whether the terms admit a recurrence with integer coefficients and
/// leading coefficient ±1, from the primitive form of the minimal annihilator.
pub fn fatou_normalize(rec: &CFiniteRecurrence, terms: &[ExactRational]) -> Result<FatouOutcome, HoloError> {
    if let Some(n) = rec.first_violation(terms) {
        return Err(HoloError::NotAnnihilating(n));
    }
    let minimal = (0..=rec.order()).find_map(|d| fit_order(terms, d)).unwrap_or_else(|| rec.clone());
    let prim = minimal.primitive_polynomial();
    let d = minimal.order();
    if prim[d].is_one() {
        let coeffs = (1..=d).map(|i| BigRational::from_integer(-prim[d - i].clone())).collect();
        let recurrence = CFiniteRecurrence::new(coeffs, terms[..d].to_vec())?;
        Ok(FatouOutcome::Monic { recurrence })
    } else {
        Ok(FatouOutcome::QuasilinearOnly { witness: prim })
    }
}

/// Recurrence for the termwise product, from the characteristic polynomial
/// of the Kronecker product of the companion matrices.
pub fn hadamard(a: &CFiniteRecurrence, b: &CFiniteRecurrence) -> CFiniteRecurrence {
    if a.order() == 0 || b.order() == 0 {
        return CFiniteRecurrence { coeffs: vec![], init: vec![] };
    }
    let k = kronecker(&a.companion(), &b.companion());
    let cp = charpoly(&k);
    let d = cp.len() - 1;
    let mut coeffs: Vec<ExactRational> = cp[1..].iter().map(|c| -c).collect();
    while coeffs.last().is_some_and(Zero::is_zero) {
        coeffs.pop();
    }
    let d_eff = coeffs.len();
    let ta = a.expand(d).unwrap();
    let tb = b.expand(d).unwrap();
    let init = ta.iter().zip(&tb).take(d_eff).map(|(x, y)| x * y).collect();
    CFiniteRecurrence { coeffs, init }
}

/// `(a_{L·n + j})_n`.
pub fn section(terms: &[ExactRational], modulus: usize, residue: usize) -> Result<Vec<ExactRational>, HoloError> {
    if residue >= modulus {
        return Err(HoloError::BadResidue { residue, modulus });
    }
    Ok(terms.iter().skip(residue).step_by(modulus).cloned().collect())
}

/// Inverse of taking all sections: stops at the first missing entry.
pub fn interleave(lists: &[Vec<ExactRational>]) -> Vec<ExactRational> {
    let r = lists.len();
    let mut out = Vec::new();
    if r == 0 {
        return out;
    }
    for k in 0.. {
        match lists[k % r].get(k / r) {
            Some(x) => out.push(x.clone()),
            None => break,
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{orbit_sequence, Budget, ExtRational};
    use crate::exact_numbers::ratio;

    fn ints(v: &[i64]) -> Vec<ExactRational> {
        v.iter().map(|&x| rat(x)).collect()
    }

    fn fib() -> CFiniteRecurrence {
        CFiniteRecurrence::new(ints(&[1, 1]), ints(&[0, 1])).unwrap()
    }

    fn n_plus(k: i64) -> UniPoly {
        UniPoly::from_ints(&[k, 1])
    }

    #[test]
    fn expand_examples() {
        assert_eq!(fib().expand(8).unwrap(), ints(&[0, 1, 1, 2, 3, 5, 8, 13, 21]));
        let exp = PRecurrence::new(vec![UniRatFunc::new(UniPoly::one(), n_plus(1)).unwrap()], 0, ints(&[1])).unwrap();
        assert_eq!(exp.expand(4).unwrap(), vec![rat(1), rat(1), ratio(1, 2), ratio(1, 6), ratio(1, 24)]);
        let inter = CFiniteRecurrence::new(ints(&[0, 13, 0, -36]), ints(&[3, 5, 12, 45])).unwrap();
        assert_eq!(inter.expand(5).unwrap(), ints(&[3, 5, 12, 45, 48, 405]));
    }

    #[test]
    fn pole_checks() {
        let r = UniRatFunc::new(UniPoly::one(), n_plus(-3)).unwrap();
        assert_eq!(minimal_shift(std::slice::from_ref(&r)), 4);
        assert!(matches!(PRecurrence::new(vec![r.clone()], 2, ints(&[1])), Err(HoloError::PoleAtOrAbove { .. })));
        assert!(PRecurrence::new(vec![r], 4, ints(&[1])).is_ok());
    }

    #[test]
    fn ode_examples() {
        // (1 − x)F′ − F = 0
        let ode = DFiniteODE::new(vec![UniPoly::from_ints(&[-1]), UniPoly::from_ints(&[1, -1])], ints(&[1])).unwrap();
        let rec = ode_to_recurrence(&ode).unwrap();
        assert_eq!(rec.order(), 0);
        assert_eq!(rec.coeffs()[0], UniRatFunc::constant(rat(1)));
        assert_eq!(rec.expand(10).unwrap(), vec![rat(1); 11]);

        // F′ − F = 0
        let ode = DFiniteODE::new(vec![UniPoly::from_ints(&[-1]), UniPoly::one()], ints(&[1])).unwrap();
        let rec = ode_to_recurrence(&ode).unwrap();
        assert_eq!(rec.coeffs()[0], UniRatFunc::new(UniPoly::one(), n_plus(1)).unwrap());
        let mut fact = BigInt::one();
        for (k, a) in rec.expand(20).unwrap().iter().enumerate() {
            if k > 0 {
                fact *= k;
            }
            assert_eq!(a, &BigRational::new(BigInt::one(), fact.clone()));
        }

        // F″ = 0
        let ode = DFiniteODE::new(vec![UniPoly::zero(), UniPoly::zero(), UniPoly::one()], ints(&[4, 7])).unwrap();
        assert_eq!(ode.expand(5).unwrap(), ints(&[4, 7, 0, 0, 0, 0]));
        let rec = ode_to_recurrence(&ode).unwrap();
        assert_eq!(rec.shift(), 1);
        assert_eq!(rec.expand(3).unwrap(), ints(&[7, 0, 0, 0]));
        assert_eq!(DFiniteODE::new(vec![UniPoly::zero()], vec![]), Err(HoloError::DegenerateODE));
    }

    #[test]
    fn ode_initial_data_checks() {
        // F′ − F = 0 but a_1 ≠ a_0
        let ode = DFiniteODE::new(vec![UniPoly::from_ints(&[-1]), UniPoly::one()], ints(&[1, 2])).unwrap();
        assert_eq!(ode.expand(3), Err(HoloError::Inconsistent(1)));
        // xF′ − F = 0 leaves a_1 free
        let ode = DFiniteODE::new(vec![UniPoly::from_ints(&[-1]), UniPoly::x()], ints(&[0])).unwrap();
        assert_eq!(ode.expand(3), Err(HoloError::Underdetermined(1)));
    }

    fn agree(rec: &PRecurrence, n: usize) {
        let sys = recurrence_to_dynsys(rec);
        let o = orbit_sequence(&sys.map, &sys.observable, &sys.start, n - 1, Budget::unlimited()).unwrap();
        let direct: Vec<ExtRational> = rec.expand(n - 1).unwrap().into_iter().map(ExtRational::Finite).collect();
        assert_eq!(o.values, direct);
    }

    #[test]
    fn dynsys_encoding_agrees() {
        let constant = PRecurrence::new(vec![UniRatFunc::constant(rat(1))], 0, ints(&[1])).unwrap();
        let sys = recurrence_to_dynsys(&constant);
        assert_eq!(sys.start, ints(&[0, 1]));
        agree(&constant, 20);
        agree(&fib().to_precurrence(), 30);
        let exp = PRecurrence::new(vec![UniRatFunc::new(UniPoly::one(), n_plus(1)).unwrap()], 0, ints(&[1])).unwrap();
        agree(&exp, 30);
        let catalan = PRecurrence::new(vec![UniRatFunc::new(UniPoly::from_ints(&[2, 4]), n_plus(2)).unwrap()], 0, ints(&[1])).unwrap();
        assert_eq!(catalan.expand(6).unwrap(), ints(&[1, 1, 2, 5, 14, 42, 132]));
        agree(&catalan, 40);
        let shifted = PRecurrence::new(
            vec![UniRatFunc::new(n_plus(0), n_plus(-2)).unwrap(), UniRatFunc::constant(rat(1))],
            3,
            ints(&[1, 2]),
        )
        .unwrap();
        agree(&shifted, 25);
    }

    #[test]
    fn annihilator_examples() {
        let r = min_cfinite_annihilator(&ints(&[1, 2, 4, 8, 16, 32])).unwrap();
        assert_eq!(r.coeffs(), &ints(&[2]));
        let r = min_cfinite_annihilator(&ints(&[0, 1, 1, 2, 3, 5, 8, 13])).unwrap();
        assert_eq!(r.coeffs(), &ints(&[1, 1]));
        assert_eq!(min_cfinite_annihilator(&ints(&[1, 1, 2, 6, 24])), Err(HoloError::NoneFound { max_order: 1 }));
        assert_eq!(min_cfinite_annihilator(&ints(&[0, 0, 0, 0])).unwrap().order(), 0);
    }

    #[test]
    fn fatou_examples() {
        let pow2: Vec<ExactRational> = (0..12).map(|k| rat(1 << k)).collect();
        let r = min_cfinite_annihilator(&pow2).unwrap();
        match fatou_normalize(&r, &pow2).unwrap() {
            FatouOutcome::Monic { recurrence } => assert_eq!(recurrence.coeffs(), &ints(&[2])),
            other => panic!("{other:?}"),
        }
        let half: Vec<ExactRational> = (0..=20).map(|k| ratio(1, 1 << k)).collect();
        let r = min_cfinite_annihilator(&half).unwrap();
        assert_eq!(r.order(), 1);
        assert_eq!(
            fatou_normalize(&r, &half).unwrap(),
            FatouOutcome::QuasilinearOnly { witness: vec![BigInt::from(-1), BigInt::from(2)] }
        );
        let mixed: Vec<ExactRational> = (0..14).map(|k| rat(2i64.pow(k) + 3i64.pow(k))).collect();
        let r = min_cfinite_annihilator(&mixed).unwrap();
        match fatou_normalize(&r, &mixed).unwrap() {
            FatouOutcome::Monic { recurrence } => assert_eq!(recurrence.coeffs(), &ints(&[5, -6])),
            other => panic!("{other:?}"),
        }
        let wrong = CFiniteRecurrence::new(ints(&[3]), ints(&[1])).unwrap();
        assert_eq!(fatou_normalize(&wrong, &pow2), Err(HoloError::NotAnnihilating(1)));
    }

    #[test]
    fn hadamard_examples() {
        let two = CFiniteRecurrence::new(ints(&[2]), ints(&[1])).unwrap();
        let three = CFiniteRecurrence::new(ints(&[3]), ints(&[1])).unwrap();
        let six = hadamard(&two, &three);
        assert_eq!(six.coeffs(), &ints(&[6]));

        let sq = hadamard(&fib(), &fib());
        assert!(sq.order() <= 4);
        let f = fib().expand(29).unwrap();
        let expected: Vec<ExactRational> = f.iter().map(|x| x * x).collect();
        assert_eq!(sq.expand(29).unwrap(), expected);

        let ones = CFiniteRecurrence::new(ints(&[1]), ints(&[1])).unwrap();
        assert_eq!(hadamard(&ones, &fib()), fib());
    }

    #[test]
    fn section_and_interleave() {
        let v = ints(&[0, 1, 2, 3, 4, 5, 6, 7, 8, 9]);
        assert_eq!(section(&v, 2, 1).unwrap(), ints(&[1, 3, 5, 7, 9]));
        assert_eq!(interleave(&[ints(&[0, 2]), ints(&[1, 3])]), ints(&[0, 1, 2, 3]));
        let f = fib().expand(15).unwrap();
        assert_eq!(section(&f, 3, 0).unwrap()[..4], ints(&[0, 2, 8, 34])[..]);
        assert!(matches!(section(&v, 2, 2), Err(HoloError::BadResidue { .. })));
    }
}
