//! Membership sets and their arithmetic-progression structure, multiplicative
//! dependence, exponent models, geometric forms, zero patterns and rationality
//! certificates.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::dynamics::ExtRational;
use crate::exact_numbers::{pow_big, rat, rational_str, sunit_factor, ExactRational, PrimeSet, Sign};
use crate::holonomic::{Expand, HoloError, PRecurrence};
use crate::lattice::{content, integer_kernel, lattice_basis, snf, solve_integer, IntMatrix};
use crate::linalg::solve;
use crate::multgroup::{MultSubgroup, NotMember};
use crate::upoly::UniPoly;

/// Exceptional and deficiency lists stop growing at this length.
pub const LIST_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructError {
    #[error("window {window} exceeds the {len} available indices")]
    WindowTooLarge { window: usize, len: usize },
    #[error("value at index {0} is not an S-unit")]
    NotSUnit(usize),
    #[error("need at least {needed} terms, got {got}")]
    InsufficientTerms { needed: usize, got: usize },
    #[error("value at index {0} is not in the group")]
    NotMember(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("value at index {0} on the tail is zero")]
    ZeroOnTail(usize),
    #[error(transparent)]
    Holonomic(#[from] HoloError),
}

/// Tunable thresholds shared by the detection operations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureParams {
    #[serde(with = "rational_str")]
    pub eps: ExactRational,
    #[serde(with = "rational_str")]
    pub tail_fraction: ExactRational,
    pub l_max: usize,
}

impl Default for StructureParams {
    fn default() -> Self {
        StructureParams { eps: BigRational::new(1.into(), 20.into()), tail_fraction: BigRational::new(1.into(), 2.into()), l_max: 24 }
    }
}

fn tail_start(n_max: usize, tail_fraction: &ExactRational) -> usize {
    (tail_fraction * rat(n_max as i64)).floor().to_integer().try_into().unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipSet {
    bits: Vec<bool>,
    zero_bits: Vec<bool>,
}

impl MembershipSet {
    pub fn from_bits(bits: Vec<bool>, zero_bits: Vec<bool>) -> MembershipSet {
        assert_eq!(bits.len(), zero_bits.len());
        assert!(bits.iter().zip(&zero_bits).all(|(a, b)| !(a & b)), "members and zeros overlap");
        MembershipSet { bits, zero_bits }
    }

    pub fn from_indices(len: usize, members: &[usize]) -> MembershipSet {
        let mut bits = vec![false; len];
        for &i in members {
            bits[i] = true;
        }
        MembershipSet { bits, zero_bits: vec![false; len] }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn n_max(&self) -> usize {
        self.bits.len().saturating_sub(1)
    }

    pub fn contains(&self, n: usize) -> bool {
        self.bits.get(n).copied().unwrap_or(false)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn zero_bits(&self) -> &[bool] {
        &self.zero_bits
    }

    pub fn members(&self) -> Vec<usize> {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect()
    }

    pub fn zeros(&self) -> Vec<usize> {
        self.zero_bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect()
    }

    /// Alternating run lengths of the membership indicator, starting with a
    /// run of non-members (possibly empty).
    pub fn run_lengths(&self) -> Vec<usize> {
        let mut runs = Vec::new();
        let mut current = false;
        let mut count = 0;
        for &b in &self.bits {
            if b == current {
                count += 1;
            } else {
                runs.push(count);
                current = b;
                count = 1;
            }
        }
        runs.push(count);
        runs
    }
}

impl Serialize for MembershipSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("MembershipSet", 4)?;
        st.serialize_field("n_max", &self.n_max())?;
        st.serialize_field("members", &self.members())?;
        st.serialize_field("zeros", &self.zeros())?;
        st.serialize_field("run_lengths", &self.run_lengths())?;
        st.end()
    }
}

/// Bit `n` is set iff the value is a finite nonzero element of `G`.
pub fn membership_set(values: &[ExtRational], group: &MultSubgroup) -> MembershipSet {
    let mut bits = Vec::with_capacity(values.len());
    let mut zero_bits = Vec::with_capacity(values.len());
    for v in values {
        match v {
            ExtRational::Finite(q) if q.is_zero() => {
                bits.push(false);
                zero_bits.push(true);
            }
            ExtRational::Finite(q) => {
                bits.push(group.contains(q).is_ok());
                zero_bits.push(false);
            }
            ExtRational::Infinity => {
                bits.push(false);
                zero_bits.push(false);
            }
        }
    }
    MembershipSet { bits, zero_bits }
}

/// Largest occupancy of any length-`window` interval inside the range.
pub fn banach_density(set: &MembershipSet, window: usize) -> Result<ExactRational, StructError> {
    if window == 0 || window > set.len() {
        return Err(StructError::WindowTooLarge { window, len: set.len() });
    }
    let bits = &set.bits;
    let mut count = bits[..window].iter().filter(|&&b| b).count();
    let mut best = count;
    for start in 1..=bits.len() - window {
        count -= bits[start - 1] as usize;
        count += bits[start + window - 1] as usize;
        best = best.max(count);
    }
    Ok(BigRational::new(best.into(), window.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassLabel {
    Full,
    Sparse,
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidueClass {
    pub residue: usize,
    pub label: ClassLabel,
    #[serde(with = "rational_str")]
    pub density: ExactRational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct APDecomposition {
    pub period: usize,
    pub tail_start: usize,
    pub n_max: usize,
    pub classes: Vec<ResidueClass>,
    /// Members outside `Full` classes.
    pub exceptional: Vec<usize>,
    /// Non-members inside `Full` classes.
    pub deficiencies: Vec<usize>,
    pub overflow: bool,
}

impl APDecomposition {
    /// Rebuilds the indicator on `[0, n_max]` from the full classes and the
    /// two correction lists.
    pub fn reconstruct(&self) -> Vec<bool> {
        let mut bits: Vec<bool> =
            (0..=self.n_max).map(|n| self.classes[n % self.period].label == ClassLabel::Full).collect();
        for &e in &self.exceptional {
            bits[e] = true;
        }
        for &d in &self.deficiencies {
            bits[d] = false;
        }
        bits
    }
}

fn label_classes(set: &MembershipSet, period: usize, start: usize, eps: &ExactRational) -> Vec<ResidueClass> {
    let n_max = set.n_max();
    (0..period)
        .map(|j| {
            let (mut total, mut hits) = (0usize, 0usize);
            let first = start + (j + period - start % period) % period;
            let mut n = first;
            while n <= n_max && !set.is_empty() {
                total += 1;
                hits += set.bits[n] as usize;
                n += period;
            }
            let density = if total == 0 { ExactRational::zero() } else { BigRational::new(hits.into(), total.into()) };
            let label = if density >= ExactRational::one() - eps {
                ClassLabel::Full
            } else if &density <= eps {
                ClassLabel::Sparse
            } else {
                ClassLabel::Mixed
            };
            ResidueClass { residue: j, label, density }
        })
        .collect()
}

/// Chooses the least period up to `params.l_max` whose residue classes are all
/// Full or Sparse on the tail window, falling back to the period with the
/// smallest Mixed mass.
pub fn ap_decompose(set: &MembershipSet, params: &StructureParams) -> APDecomposition {
    let n_max = set.n_max();
    let start = tail_start(n_max, &params.tail_fraction);
    let tail_len = (n_max + 1).saturating_sub(start).max(1);
    let mut best: Option<(ExactRational, usize, Vec<ResidueClass>)> = None;
    for period in 1..=params.l_max.max(1) {
        let classes = label_classes(set, period, start, &params.eps);
        let mixed_count: usize = (start..=n_max)
            .filter(|n| classes[n % period].label == ClassLabel::Mixed)
            .count();
        let mass = BigRational::new(mixed_count.into(), tail_len.into());
        let better = best.as_ref().is_none_or(|(m, _, _)| &mass < m);
        if better {
            let done = mass.is_zero();
            best = Some((mass, period, classes));
            if done {
                break;
            }
        }
    }
    let (_, period, classes) = best.unwrap();
    let mut exceptional = Vec::new();
    let mut deficiencies = Vec::new();
    let mut overflow = false;
    for n in 0..set.len() {
        let full = classes[n % period].label == ClassLabel::Full;
        let list = match (full, set.bits[n]) {
            (false, true) => &mut exceptional,
            (true, false) => &mut deficiencies,
            _ => continue,
        };
        if list.len() < LIST_CAP {
            list.push(n);
        } else {
            overflow = true;
        }
    }
    APDecomposition { period, tail_start: start, n_max, classes, exceptional, deficiencies, overflow }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DependenceRelation {
    #[serde(with = "bigint_strs")]
    pub exponents: Vec<BigInt>,
    #[serde(with = "rational_str")]
    pub constant: ExactRational,
    pub window: usize,
}

mod bigint_strs {
    use num_bigint::BigInt;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_string()))
    }
}

mod bigint_matrix {
    use num_bigint::BigInt;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(m: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(m.iter().map(|row| row.iter().map(|x| x.to_string()).collect::<Vec<_>>()))
    }
}

impl DependenceRelation {
    /// `Π_j u_{n+j}^{i_j}`.
    pub fn product_at(&self, values: &[ExactRational], n: usize) -> ExactRational {
        self.exponents
            .iter()
            .enumerate()
            .filter(|(_, e)| !e.is_zero())
            .fold(ExactRational::one(), |acc, (j, e)| acc * pow_big(&values[n + j], e))
    }

    pub fn holds_on(&self, values: &[ExactRational]) -> bool {
        values.len() >= self.window && (0..=values.len() - self.window).all(|n| self.product_at(values, n) == self.constant)
    }
}

/// Searches for integer exponents `i_0, …, i_{w−1}` with gcd 1 such that
/// `Π_j u_{n+j}^{i_j}` is the same for every `n`.
pub fn find_dependence(values: &[ExactRational], window: usize, primes: &PrimeSet) -> Result<Option<DependenceRelation>, StructError> {
    if window == 0 || values.len() < window + 2 {
        return Err(StructError::InsufficientTerms { needed: window + 2, got: values.len() });
    }
    let mut vals = Vec::with_capacity(values.len());
    for (i, u) in values.iter().enumerate() {
        let v = sunit_factor(primes, u).map_err(|_| StructError::NotSUnit(i))?;
        vals.push(v);
    }
    let shifts = values.len() - window;
    let nsign = shifts;
    let ncols = window + nsign;
    let mut rows: IntMatrix = Vec::new();
    for n in 0..shifts {
        for &p in primes.primes() {
            let mut row = vec![BigInt::zero(); ncols];
            for (j, slot) in row.iter_mut().take(window).enumerate() {
                *slot = BigInt::from(vals[n + j].exponent(p) - vals[n + 1 + j].exponent(p));
            }
            rows.push(row);
        }
        let mut row = vec![BigInt::zero(); ncols];
        for (j, slot) in row.iter_mut().take(window).enumerate() {
            *slot = BigInt::from(vals[n + j].sign.bit() + vals[n + 1 + j].sign.bit());
        }
        row[window + n] = BigInt::from(2);
        rows.push(row);
    }
    let kernel = integer_kernel(&rows, ncols);
    let projected: IntMatrix = kernel.iter().map(|v| v[..window].to_vec()).collect();
    let basis = lattice_basis(&projected, window);
    if basis.is_empty() {
        return Ok(None);
    }
    let candidate = match basis.iter().find(|v| content(v).is_one()) {
        Some(v) => v.clone(),
        None => {
            let s = snf(&basis, window);
            if !s.diagonal.first().is_some_and(One::is_one) {
                return Ok(None);
            }
            // first row of V⁻¹ spans a primitive vector of the lattice
            let d = s.diagonal[0].clone();
            let mut v = vec![BigInt::zero(); window];
            for (r, b) in s.u[0].iter().zip(&basis) {
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi += r * bi;
                }
            }
            debug_assert!(content(&v) == d);
            v
        }
    };
    let mut exponents = candidate;
    if exponents.iter().rev().find(|e| !e.is_zero()).is_some_and(Signed::is_negative) {
        for e in exponents.iter_mut() {
            *e = -e.clone();
        }
    }
    let mut rel = DependenceRelation { exponents, constant: ExactRational::one(), window };
    rel.constant = rel.product_at(values, 0);
    Ok(rel.holds_on(values).then_some(rel))
}

/// Canonical exponent rows `b(n)` and signs `t(n)` with
/// `a_n = t(n)·Π g_i^{b_i(n)}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trajectories {
    #[serde(with = "bigint_matrix")]
    pub rows: Vec<Vec<BigInt>>,
    pub torsion: Vec<Sign>,
}

/// Exponent vectors of each value in `±G`; a value whose negative lies in `G`
/// is recorded with torsion `−1`.
pub fn exponent_trajectories(values: &[ExactRational], group: &MultSubgroup) -> Result<Trajectories, StructError> {
    let mut rows = Vec::with_capacity(values.len());
    let mut torsion = Vec::with_capacity(values.len());
    for (i, v) in values.iter().enumerate() {
        let (w, t) = match group.contains(v) {
            Ok(w) => (w, Sign::Plus),
            Err(NotMember::Sign) => (group.contains(&-v).map_err(|_| StructError::NotMember(i))?, Sign::Minus),
            Err(_) => return Err(StructError::NotMember(i)),
        };
        rows.push(w.exponents);
        torsion.push(t);
    }
    Ok(Trajectories { rows, torsion })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AffineModel {
    #[serde(with = "bigint_matrix")]
    pub a: IntMatrix,
    #[serde(with = "bigint_strs")]
    pub p: Vec<BigInt>,
}

impl AffineModel {
    pub fn step(&self, v: &[BigInt]) -> Vec<BigInt> {
        self.a
            .iter()
            .zip(&self.p)
            .map(|(row, pi)| row.iter().zip(v).fold(pi.clone(), |acc, (a, x)| acc + a * x))
            .collect()
    }
}

/// Integer `(A, p)` with `v(n+1) = A·v(n) + p` on every supplied row, or
/// `None`. Among exact solutions the one closest to `A = I` is preferred.
pub fn fit_affine_exponent_model(rows: &[Vec<BigInt>]) -> Option<AffineModel> {
    let e = rows.first()?.len();
    if rows.len() < e + 2 || rows.iter().any(|r| r.len() != e) {
        return None;
    }
    let to_q = |x: &BigInt| BigRational::from_integer(x.clone());
    // unknowns (p_i, D_i1..D_ie) with D = A − I
    let system: Vec<Vec<ExactRational>> = rows[..rows.len() - 1]
        .iter()
        .map(|v| std::iter::once(ExactRational::one()).chain(v.iter().map(to_q)).collect())
        .collect();
    let int_system: Vec<Vec<BigInt>> =
        rows[..rows.len() - 1].iter().map(|v| std::iter::once(BigInt::one()).chain(v.iter().cloned()).collect()).collect();
    let mut a = vec![vec![BigInt::zero(); e]; e];
    let mut p = vec![BigInt::zero(); e];
    for i in 0..e {
        let rhs: Vec<ExactRational> = rows.windows(2).map(|w| to_q(&(&w[1][i] - &w[0][i]))).collect();
        let (x, unique) = solve(&system, e + 1, &rhs)?;
        let x: Vec<BigInt> = if x.iter().all(|c| c.is_integer()) {
            x.iter().map(|c| c.to_integer()).collect()
        } else if unique {
            return None;
        } else {
            // the rational particular solution is fractional; look for an integer point
            let int_rhs: Vec<BigInt> = rows.windows(2).map(|w| &w[1][i] - &w[0][i]).collect();
            solve_integer(&int_system, e + 1, &int_rhs)?
        };
        p[i] = x[0].clone();
        for j in 0..e {
            a[i][j] = &x[j + 1] + if i == j { BigInt::one() } else { BigInt::zero() };
        }
    }
    let model = AffineModel { a, p };
    rows.windows(2).all(|w| model.step(&w[0]) == w[1]).then_some(model)
}

/// `v(n+1) = A·v(n) + p`, `a_n = C·Π_i g_i^{(Q·v(n))_i}`.
#[derive(Debug, Clone)]
pub struct TorusModel {
    pub affine: AffineModel,
    pub v0: Vec<BigInt>,
    /// One row per generator.
    pub q: IntMatrix,
    pub constant: ExactRational,
    pub group: MultSubgroup,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TorusReport {
    Verified {
        horizon: usize,
    },
    Failed {
        index: usize,
        #[serde(with = "rational_str")]
        expected: ExactRational,
        #[serde(with = "rational_str")]
        actual: ExactRational,
    },
}

pub fn build_torus_model(
    affine: AffineModel,
    v0: Vec<BigInt>,
    q: IntMatrix,
    constant: ExactRational,
    group: &MultSubgroup,
) -> Result<TorusModel, StructError> {
    let e = affine.a.len();
    if affine.a.iter().any(|r| r.len() != e) || affine.p.len() != e || v0.len() != e {
        return Err(StructError::DimensionMismatch(format!("affine model of dimension {e}")));
    }
    if q.len() != group.rank() || q.iter().any(|r| r.len() != e) {
        return Err(StructError::DimensionMismatch(format!("output matrix must be {}×{e}", group.rank())));
    }
    if constant.is_zero() {
        return Err(StructError::DimensionMismatch("output constant is zero".into()));
    }
    Ok(TorusModel { affine, v0, q, constant, group: group.clone() })
}

impl TorusModel {
    pub fn value(&self, v: &[BigInt]) -> ExactRational {
        let mut acc = self.constant.clone();
        for (g, row) in self.group.generators().iter().zip(&self.q) {
            let k: BigInt = row.iter().zip(v).map(|(a, b)| a * b).sum();
            if !k.is_zero() {
                acc *= pow_big(g, &k);
            }
        }
        acc
    }
}

/// Checks `a_n` against the model for `n ≤ horizon`.
pub fn verify_torus_model(model: &TorusModel, values: &[ExactRational], horizon: usize) -> Result<TorusReport, StructError> {
    if values.len() <= horizon {
        return Err(StructError::InsufficientTerms { needed: horizon + 1, got: values.len() });
    }
    let mut v = model.v0.clone();
    for (n, actual) in values.iter().take(horizon + 1).enumerate() {
        let expected = model.value(&v);
        if &expected != actual {
            return Ok(TorusReport::Failed { index: n, expected, actual: actual.clone() });
        }
        v = model.affine.step(&v);
    }
    Ok(TorusReport::Verified { horizon })
}

/// Fits a torus model with `Q = I` directly from values in `±G` with a
/// constant sign.
pub fn torus_model_from_values(values: &[ExactRational], group: &MultSubgroup) -> Result<Option<TorusModel>, StructError> {
    let traj = exponent_trajectories(values, group)?;
    let Some(first_sign) = traj.torsion.first().copied() else {
        return Ok(None);
    };
    if traj.torsion.iter().any(|&t| t != first_sign) {
        return Ok(None);
    }
    let Some(affine) = fit_affine_exponent_model(&traj.rows) else {
        return Ok(None);
    };
    let e = group.rank();
    let q = crate::lattice::identity(e);
    build_torus_model(affine, traj.rows[0].clone(), q, first_sign.to_rational(), group).map(Some)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeometricClass {
    pub residue: usize,
    #[serde(with = "rational_str")]
    pub alpha: ExactRational,
    #[serde(with = "rational_str")]
    pub beta: ExactRational,
    /// `a_{L·n + j} = α·β^n` for every `n ≥ cutoff`.
    pub cutoff: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeometricForm {
    pub period: usize,
    pub classes: Vec<GeometricClass>,
}

/// Fit of one subsequence `b_k`, whose terms from `tail_k` on are nonzero.
fn fit_class(b: &[ExactRational], tail_k: usize) -> Option<(ExactRational, ExactRational, usize)> {
    if b.len() < tail_k + 3 {
        return None;
    }
    let beta = &b[tail_k + 1] / &b[tail_k];
    if (tail_k + 1..b.len() - 1).any(|k| b[k + 1] != &b[k] * &beta) {
        return None;
    }
    let mut cutoff = tail_k;
    while cutoff > 0 && !b[cutoff - 1].is_zero() && b[cutoff] == &b[cutoff - 1] * &beta {
        cutoff -= 1;
    }
    let alpha = &b[cutoff] / pow_big(&beta, &BigInt::from(cutoff));
    Some((alpha, beta, cutoff))
}

fn class_terms(values: &[ExactRational], period: usize, residue: usize) -> Vec<ExactRational> {
    values.iter().skip(residue).step_by(period).cloned().collect()
}

/// Least period `L ≤ l_max` for which every residue class is geometric from
/// the tail window onward.
pub fn geometric_form(values: &[ExactRational], l_max: usize, tail_fraction: &ExactRational) -> Result<Option<GeometricForm>, StructError> {
    if values.is_empty() {
        return Ok(None);
    }
    let start = tail_start(values.len() - 1, tail_fraction);
    if let Some(i) = (start..values.len()).find(|&i| values[i].is_zero()) {
        return Err(StructError::ZeroOnTail(i));
    }
    'period: for period in 1..=l_max {
        let mut classes = Vec::with_capacity(period);
        for j in 0..period {
            let b = class_terms(values, period, j);
            let tail_k = start.saturating_sub(j).div_ceil(period);
            match fit_class(&b, tail_k) {
                Some((alpha, beta, cutoff)) => classes.push(GeometricClass { residue: j, alpha, beta, cutoff }),
                None => continue 'period,
            }
        }
        return Ok(Some(GeometricForm { period, classes }));
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ZeroPattern {
    /// For `n ≥ preperiod`, `a_n = 0` iff `pattern[(n − preperiod) mod period]`.
    Periodic { preperiod: usize, period: usize, pattern: Vec<bool>, horizon: usize },
    Aperiodic { horizon: usize },
}

fn zero_pattern_bits(zero: &[bool], horizon: usize) -> ZeroPattern {
    let h = horizon.min(zero.len().saturating_sub(1));
    for s in 0..=h / 2 {
        for period in 1..=(h / 2).saturating_sub(s) {
            if (s..=h - period).all(|n| zero[n] == zero[n + period]) {
                return ZeroPattern::Periodic { preperiod: s, period, pattern: zero[s..s + period].to_vec(), horizon: h };
            }
        }
    }
    ZeroPattern::Aperiodic { horizon: h }
}

/// Least `(s, L)`, `s` first, for which the zero indicator on `[0, horizon]`
/// is periodic from `s` on with period `L`, with `s + L ≤ horizon / 2`. An
/// empirical reading of a finite prefix.
pub fn zero_pattern(values: &[ExactRational], horizon: usize) -> ZeroPattern {
    let zero: Vec<bool> = values.iter().map(Zero::is_zero).collect();
    zero_pattern_bits(&zero, horizon)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "stage", rename_all = "snake_case")]
pub enum FailStage {
    Membership { index: usize },
    Zeros { horizon: usize },
    Form { zero_period: usize },
    Verify { index: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RationalClosedForm {
    #[serde(with = "upoly_strs")]
    pub numerator: UniPoly,
    #[serde(with = "upoly_strs")]
    pub denominator: UniPoly,
    pub period: usize,
    /// Index, relative to the series start, from which every class is
    /// geometric.
    pub geometric_from: usize,
    pub classes: Vec<GeometricClass>,
    pub verified_terms: usize,
}

mod upoly_strs {
    use super::UniPoly;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(p: &UniPoly, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(p.coeffs().iter().map(|c| c.to_string()))
    }
}

impl RationalClosedForm {
    pub fn render(&self, var: &str) -> String {
        format!("({})/({})", self.numerator.render(var), self.denominator.render(var))
    }

    pub fn series(&self, n: usize) -> Vec<ExactRational> {
        UniPoly::series_div(&self.numerator, &self.denominator, n)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Certificate {
    Rational(RationalClosedForm),
    Fail(FailStage),
}

/// Decides from `n_terms` terms whether the sequence, with values in
/// `G ∪ {0}`, has a rational generating function `Σ_k a_{p+k} x^k`, and
/// returns it as one reduced fraction.
pub fn certify_rational(rec: &PRecurrence, group: &MultSubgroup, n_terms: usize, l_max: usize) -> Result<Certificate, StructError> {
    let needed = 4 * l_max + 8;
    if n_terms < needed {
        return Err(StructError::InsufficientTerms { needed, got: n_terms });
    }
    let terms = rec.expand(n_terms - 1)?;
    let base = rec.shift() as usize;
    if let Some(k) = terms.iter().position(|t| !t.is_zero() && group.contains(t).is_err()) {
        return Ok(Certificate::Fail(FailStage::Membership { index: base + k }));
    }
    let horizon = n_terms - 1;
    let (s, zero_period, pattern) = match zero_pattern(&terms, horizon) {
        ZeroPattern::Periodic { preperiod, period, pattern, .. } if period <= l_max => (preperiod, period, pattern),
        _ => return Ok(Certificate::Fail(FailStage::Zeros { horizon })),
    };
    let half = ExactRational::new(1.into(), 2.into());
    let tail = tail_start(horizon, &half).max(s);
    let mut found = None;
    'period: for period in (zero_period..=l_max).step_by(zero_period) {
        let mut classes = Vec::new();
        for j in 0..period {
            let class_zero = pattern[((j + period * s) - s) % zero_period];
            let b = class_terms(&terms, period, j);
            let tail_k = tail.saturating_sub(j).div_ceil(period);
            if class_zero {
                // zero from the first index ≥ s in this class
                continue;
            }
            match fit_class(&b, tail_k) {
                Some((alpha, beta, cutoff)) => classes.push(GeometricClass { residue: j, alpha, beta, cutoff }),
                None => continue 'period,
            }
        }
        found = Some((period, classes));
        break;
    }
    let Some((period, classes)) = found else {
        return Ok(Certificate::Fail(FailStage::Form { zero_period }));
    };
    let k_cut = classes.iter().map(|c| c.cutoff).max().unwrap_or(0).max(s.div_ceil(period));
    let split = period * k_cut;
    let mut numerator = UniPoly::new(terms[..split.min(terms.len())].to_vec());
    let mut denominator = UniPoly::one();
    let mut by_beta: BTreeMap<ExactRational, UniPoly> = BTreeMap::new();
    for c in &classes {
        let coeff = &c.alpha * pow_big(&c.beta, &BigInt::from(k_cut));
        let entry = by_beta.entry(c.beta.clone()).or_default();
        *entry = entry.add(&UniPoly::monomial(split + c.residue, coeff));
    }
    for (beta, part) in by_beta {
        let factor = UniPoly::one().sub(&UniPoly::monomial(period, beta));
        numerator = numerator.mul(&factor).add(&part.mul(&denominator));
        denominator = denominator.mul(&factor);
    }
    let g = numerator.gcd(&denominator);
    if !g.is_zero() {
        numerator = numerator.div_rem(&g).0;
        denominator = denominator.div_rem(&g).0;
    }
    let d0 = denominator.coeff(0);
    numerator = numerator.scale(&d0.recip());
    denominator = denominator.scale(&d0.recip());
    let form = RationalClosedForm { numerator, denominator, period, geometric_from: split, classes, verified_terms: n_terms };
    let series = form.series(n_terms);
    if let Some(k) = series.iter().zip(&terms).position(|(a, b)| a != b) {
        return Ok(Certificate::Fail(FailStage::Verify { index: base + k }));
    }
    Ok(Certificate::Rational(form))
}
