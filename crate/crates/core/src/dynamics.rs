//! Rational self-maps of affine space, orbits, observables, torus maps and
//! degree-bounded vanishing ideals.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::exact_numbers::{digit_size, parse_rational, rational_str, ExactRational};
use crate::linalg::{nullspace, rref};
use crate::poly::{Evaluation, Monomial, MultiPoly, RatFunc};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("torus constant {0} is zero")]
    ZeroConstant(usize),
    #[error("exponent matrix must be square of size {0}")]
    BadExponentMatrix(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalSelfMap {
    coordinates: Vec<RatFunc>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapEval {
    Point(Vec<ExactRational>),
    /// Denominator of the given coordinate vanishes.
    Indeterminate(usize),
}

impl RationalSelfMap {
    pub fn new(coordinates: Vec<RatFunc>) -> Result<RationalSelfMap, DynError> {
        let n = coordinates.len();
        for c in &coordinates {
            if c.nvars() != n {
                return Err(DynError::DimensionMismatch { expected: n, got: c.nvars() });
            }
        }
        Ok(RationalSelfMap { coordinates })
    }

    pub fn dimension(&self) -> usize {
        self.coordinates.len()
    }

    pub fn coordinates(&self) -> &[RatFunc] {
        &self.coordinates
    }

    pub fn eval(&self, x: &[ExactRational]) -> Result<MapEval, DynError> {
        if x.len() != self.dimension() {
            return Err(DynError::DimensionMismatch { expected: self.dimension(), got: x.len() });
        }
        let mut out = Vec::with_capacity(x.len());
        for (i, c) in self.coordinates.iter().enumerate() {
            let den = c.denominator().eval(x);
            if den.is_zero() {
                return Ok(MapEval::Indeterminate(i));
            }
            out.push(c.numerator().eval(x) / den);
        }
        Ok(MapEval::Point(out))
    }

    /// `self ∘ other`; `None` if a coordinate degenerates.
    pub fn compose(&self, other: &RationalSelfMap) -> Option<RationalSelfMap> {
        let coords = self.coordinates.iter().map(|c| c.compose(&other.coordinates)).collect::<Option<Vec<_>>>()?;
        Some(RationalSelfMap { coordinates: coords })
    }
}

pub fn eval_map(phi: &RationalSelfMap, x: &[ExactRational]) -> Result<MapEval, DynError> {
    phi.eval(x)
}

/// A point of ℙ¹(ℚ).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtRational {
    Finite(ExactRational),
    Infinity,
}

impl ExtRational {
    pub fn finite(&self) -> Option<&ExactRational> {
        match self {
            ExtRational::Finite(q) => Some(q),
            ExtRational::Infinity => None,
        }
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::Finite(q) => write!(f, "{q}"),
            ExtRational::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtRational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExtRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        if text == "inf" {
            return Ok(ExtRational::Infinity);
        }
        parse_rational(&text).map(ExtRational::Finite).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "index", rename_all = "snake_case")]
pub enum Site {
    Coordinate(usize),
    Observable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Halt {
    Completed { steps: usize },
    Indeterminate { step: usize, site: Site },
    BudgetExceeded { step: usize, digits: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitRecord {
    #[serde(with = "point_list")]
    pub points: Vec<Vec<ExactRational>>,
    pub values: Vec<ExtRational>,
    pub halt: Halt,
}

mod point_list {
    use super::*;

    #[derive(Serialize, Deserialize)]
    struct P(#[serde(with = "rational_str::vec")] Vec<ExactRational>);

    pub fn serialize<S: Serializer>(points: &[Vec<ExactRational>], s: S) -> Result<S::Ok, S::Error> {
        let wrapped: Vec<P> = points.iter().map(|p| P(p.clone())).collect();
        wrapped.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<ExactRational>>, D::Error> {
        Ok(Vec::<P>::deserialize(d)?.into_iter().map(|p| p.0).collect())
    }
}

impl OrbitRecord {
    pub fn is_complete(&self) -> bool {
        matches!(self.halt, Halt::Completed { .. })
    }
}

/// Limit on the decimal size of any single coordinate along an orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Budget {
    pub max_digits: Option<u64>,
}

impl Budget {
    pub fn unlimited() -> Budget {
        Budget { max_digits: None }
    }

    pub fn digits(max_digits: u64) -> Budget {
        Budget { max_digits: Some(max_digits) }
    }

    fn check(&self, point: &[ExactRational]) -> Option<u64> {
        let limit = self.max_digits?;
        let size = point.iter().map(digit_size).max().unwrap_or(0);
        (size > limit).then_some(size)
    }
}

/// Points `φ^k(x0)` for `k ≤ n`, stopping at indeterminacy or when the
/// budget is exceeded.
pub fn orbit(phi: &RationalSelfMap, x0: &[ExactRational], n: usize, budget: Budget) -> Result<OrbitRecord, DynError> {
    orbit_inner(phi, None, x0, n, budget)
}

/// Orbit together with the observable values `f(φ^k(x0))`.
pub fn orbit_sequence(
    phi: &RationalSelfMap,
    f: &RatFunc,
    x0: &[ExactRational],
    n: usize,
    budget: Budget,
) -> Result<OrbitRecord, DynError> {
    if f.nvars() != phi.dimension() {
        return Err(DynError::DimensionMismatch { expected: phi.dimension(), got: f.nvars() });
    }
    orbit_inner(phi, Some(f), x0, n, budget)
}

fn orbit_inner(
    phi: &RationalSelfMap,
    f: Option<&RatFunc>,
    x0: &[ExactRational],
    n: usize,
    budget: Budget,
) -> Result<OrbitRecord, DynError> {
    if x0.len() != phi.dimension() {
        return Err(DynError::DimensionMismatch { expected: phi.dimension(), got: x0.len() });
    }
    let mut record = OrbitRecord { points: Vec::new(), values: Vec::new(), halt: Halt::Completed { steps: n } };
    let mut current = x0.to_vec();
    for step in 0..=n {
        if let Some(digits) = budget.check(&current) {
            record.halt = Halt::BudgetExceeded { step, digits };
            return Ok(record);
        }
        if let Some(f) = f {
            let value = match f.eval(&current) {
                Evaluation::Value(v) => ExtRational::Finite(v),
                Evaluation::Infinity => ExtRational::Infinity,
                Evaluation::Indeterminate => {
                    record.halt = Halt::Indeterminate { step, site: Site::Observable };
                    return Ok(record);
                }
            };
            record.values.push(value);
        }
        if step == n {
            record.points.push(current);
            break;
        }
        match phi.eval(&current)? {
            MapEval::Point(next) => {
                record.points.push(std::mem::replace(&mut current, next));
            }
            MapEval::Indeterminate(i) => {
                record.points.push(current);
                record.halt = Halt::Indeterminate { step: step + 1, site: Site::Coordinate(i) };
                return Ok(record);
            }
        }
    }
    Ok(record)
}

/// Monomial map `x ↦ (c_i Π_j x_j^{A[i][j]})_i`.
pub fn torus_map(constants: &[ExactRational], exponents: &[Vec<i64>]) -> Result<RationalSelfMap, DynError> {
    let d = constants.len();
    if exponents.len() != d || exponents.iter().any(|row| row.len() != d) {
        return Err(DynError::BadExponentMatrix(d));
    }
    if let Some(i) = constants.iter().position(Zero::is_zero) {
        return Err(DynError::ZeroConstant(i));
    }
    let coords = constants
        .iter()
        .zip(exponents)
        .map(|(c, row)| {
            let num: Vec<u32> = row.iter().map(|&e| e.max(0) as u32).collect();
            let den: Vec<u32> = row.iter().map(|&e| (-e).max(0) as u32).collect();
            RatFunc::new(MultiPoly::monomial(num, c.clone()), MultiPoly::monomial(den, ExactRational::one()))
                .expect("monomial denominator")
        })
        .collect();
    RationalSelfMap::new(coords)
}

/// Basis, in reduced row echelon form over the descending graded-lex
/// monomial order, of the polynomials of total degree ≤ `degree` vanishing
/// at every point.
pub fn vanishing_ideal(points: &[Vec<ExactRational>], degree: u32) -> Vec<MultiPoly> {
    let Some(first) = points.first() else {
        return Vec::new();
    };
    let n = first.len();
    let unique: BTreeSet<&Vec<ExactRational>> = points.iter().collect();
    let monomials = Monomial::up_to_degree(n, degree);
    let rows: Vec<Vec<ExactRational>> = unique
        .iter()
        .map(|p| monomials.iter().map(|m| MultiPoly::monomial(m.0.clone(), ExactRational::one()).eval(p)).collect())
        .collect();
    let mut kernel = nullspace(&rows, monomials.len());
    rref(&mut kernel, monomials.len());
    kernel
        .into_iter()
        .filter(|v| v.iter().any(|c| !c.is_zero()))
        .map(|v| MultiPoly::from_terms(n, monomials.iter().cloned().zip(v)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_numbers::{rat, ratio};

    fn shift() -> RationalSelfMap {
        RationalSelfMap::new(vec![RatFunc::var(1, 0).add(&RatFunc::constant(1, rat(1)))]).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<ExactRational> {
        v.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn eval_map_examples() {
        assert_eq!(shift().eval(&ints(&[1])).unwrap(), MapEval::Point(ints(&[2])));
        let inv = RationalSelfMap::new(vec![RatFunc::constant(1, rat(1)).div(&RatFunc::var(1, 0)).unwrap()]).unwrap();
        assert_eq!(inv.eval(&ints(&[0])).unwrap(), MapEval::Indeterminate(0));
        let t = torus_map(&ints(&[2, 3]), &[vec![1, 0], vec![1, 1]]).unwrap();
        assert_eq!(t.eval(&ints(&[1, 1])).unwrap(), MapEval::Point(ints(&[2, 3])));
        assert!(matches!(shift().eval(&ints(&[1, 2])), Err(DynError::DimensionMismatch { .. })));
    }

    #[test]
    fn orbit_examples() {
        let o = orbit(&shift(), &ints(&[1]), 4, Budget::unlimited()).unwrap();
        assert_eq!(o.points, (1..=5).map(|k| ints(&[k])).collect::<Vec<_>>());
        assert_eq!(o.halt, Halt::Completed { steps: 4 });

        let sq = RationalSelfMap::new(vec![RatFunc::var(1, 0).pow(2).unwrap()]).unwrap();
        let o = orbit(&sq, &ints(&[2]), 3, Budget::unlimited()).unwrap();
        assert_eq!(o.points, vec![ints(&[2]), ints(&[4]), ints(&[16]), ints(&[256])]);

        let t = RatFunc::var(1, 0);
        let g = RationalSelfMap::new(vec![RatFunc::constant(1, rat(1)).div(&t.sub(&RatFunc::constant(1, rat(2)))).unwrap()]).unwrap();
        let o = orbit(&g, &ints(&[1]), 3, Budget::unlimited()).unwrap();
        let expected: Vec<Vec<ExactRational>> = vec![vec![rat(1)], vec![rat(-1)], vec![ratio(-1, 3)], vec![ratio(-3, 7)]];
        assert_eq!(o.points, expected);
    }

    #[test]
    fn orbit_sequence_examples() {
        let t = RatFunc::var(1, 0);
        let o = orbit_sequence(&shift(), &t, &ints(&[1]), 6, Budget::unlimited()).unwrap();
        let vals: Vec<ExtRational> = (1..=7).map(|k| ExtRational::Finite(rat(k))).collect();
        assert_eq!(o.values, vals);

        let f = RatFunc::constant(1, rat(1)).div(&t.sub(&RatFunc::constant(1, rat(3)))).unwrap();
        let o = orbit_sequence(&shift(), &f, &ints(&[1]), 3, Budget::unlimited()).unwrap();
        assert_eq!(
            o.values,
            vec![ExtRational::Finite(ratio(-1, 2)), ExtRational::Finite(rat(-1)), ExtRational::Infinity, ExtRational::Finite(rat(1))]
        );

        let phi = torus_map(&ints(&[2, 3]), &[vec![1, 0], vec![1, 1]]).unwrap();
        let xy = RatFunc::var(2, 0).mul(&RatFunc::var(2, 1));
        let o = orbit_sequence(&phi, &xy, &ints(&[1, 1]), 2, Budget::unlimited()).unwrap();
        assert_eq!(o.values, ints(&[1, 6, 72]).into_iter().map(ExtRational::Finite).collect::<Vec<_>>());
    }

    #[test]
    fn indeterminate_observable_halts() {
        let t = RatFunc::var(1, 0).sub(&RatFunc::constant(1, rat(3)));
        let f = t.div(&t).unwrap();
        let o = orbit_sequence(&shift(), &f, &ints(&[1]), 5, Budget::unlimited()).unwrap();
        assert_eq!(o.halt, Halt::Indeterminate { step: 2, site: Site::Observable });
        assert_eq!(o.values.len(), 2);
    }

    #[test]
    fn budget_halts_squaring() {
        let sq = RationalSelfMap::new(vec![RatFunc::var(1, 0).pow(2).unwrap()]).unwrap();
        let o = orbit(&sq, &ints(&[2]), 50, Budget::digits(1000)).unwrap();
        assert!(matches!(o.halt, Halt::BudgetExceeded { step: 12, .. }));
    }

    #[test]
    fn torus_map_examples() {
        let swap = torus_map(&ints(&[1, 1]), &[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(swap.eval(&ints(&[2, 5])).unwrap(), MapEval::Point(ints(&[5, 2])));
        let inv = torus_map(&ints(&[2]), &[vec![-1]]).unwrap();
        assert_eq!(inv.eval(&ints(&[4])).unwrap(), MapEval::Point(vec![ratio(1, 2)]));
        assert_eq!(torus_map(&ints(&[0]), &[vec![1]]), Err(DynError::ZeroConstant(0)));
    }

    #[test]
    fn vanishing_ideal_examples() {
        let pts: Vec<Vec<ExactRational>> = (0..10).map(|k| ints(&[1 << k, 1 << (2 * k)])).collect();
        let basis = vanishing_ideal(&pts, 2);
        let x = MultiPoly::var(2, 0);
        let y = MultiPoly::var(2, 1);
        assert_eq!(basis, vec![x.pow(2).sub(&y)]);

        let pts: Vec<Vec<ExactRational>> = (0..=20).map(|k| ints(&[2i64.pow(k), 3i64.pow(k)])).collect();
        assert!(vanishing_ideal(&pts, 2).is_empty());

        let basis = vanishing_ideal(&[ints(&[1, 1])], 1);
        let one = MultiPoly::one(2);
        assert_eq!(basis, vec![x.sub(&one), y.sub(&one)]);
    }

    #[test]
    fn orbit_record_json_round_trip() {
        let f = RatFunc::constant(1, rat(1)).div(&RatFunc::var(1, 0).sub(&RatFunc::constant(1, rat(3)))).unwrap();
        let o = orbit_sequence(&shift(), &f, &ints(&[1]), 3, Budget::unlimited()).unwrap();
        let text = serde_json::to_string(&o).unwrap();
        assert!(text.contains("\"inf\""));
        assert_eq!(serde_json::from_str::<OrbitRecord>(&text).unwrap(), o);
    }
}
