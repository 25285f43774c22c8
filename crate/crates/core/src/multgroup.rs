//! Finitely generated subgroups of ℚ*.
//!
//! A group `G = ⟨g_1, …, g_m⟩` is stored through its exponent matrix
//! `V[p][j] = ν_p(g_j)` over the primes of its support, together with the
//! sign bits of the generators. The sign is an additive ℤ/2 coordinate, so
//! membership of `x` amounts to solving the mixed system
//!
//! ```text
//! V·k        = ν(x)
//! σ·k + 2·t  = sign_bit(x)
//! ```
//!
//! over the integers, which is done through a Smith normal form.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact_numbers::{
    pow_big, prime_divisors, rational_str, sunit_factor, ExactRational, NumberError, PrimeSet, Sign,
};
use crate::lattice::{self, IntMatrix, Snf};
use crate::linalg;

/// Which constraint rules out membership.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Error)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum NotMember {
    #[error("zero is never a group element")]
    Zero,
    #[error("not an S-unit over the group support (cofactor {cofactor})")]
    Support {
        #[serde(with = "rational_str")]
        cofactor: ExactRational,
    },
    #[error("valuation vector is outside the exponent lattice")]
    Lattice,
    #[error("sign cannot be matched")]
    Sign,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("generator {0} is zero")]
    ZeroGenerator(usize),
    #[error(transparent)]
    Number(#[from] NumberError),
    #[error(transparent)]
    NotMember(#[from] NotMember),
    #[error("generators are multiplicatively dependent")]
    NotFree,
    #[error("all generators are ±1")]
    EmptySupport,
}

/// `torsion · Π g_j^{exponents[j]}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExponentWitness {
    pub exponents: Vec<BigInt>,
    pub torsion: Sign,
}

/// Group definition as read from JSON: `{"generators": ["2", "-3/5"]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupDef {
    #[serde(with = "rational_str::vec")]
    pub generators: Vec<ExactRational>,
}

#[derive(Debug, Clone)]
pub struct MultSubgroup {
    generators: Vec<ExactRational>,
    support: PrimeSet,
    gen_matrix: IntMatrix,
    sign_row: Vec<u8>,
    lattice_basis: IntMatrix,
    relations: IntMatrix,
    valuation_snf: Snf,
    mixed_snf: Snf,
}

impl MultSubgroup {
    pub fn new(generators: Vec<ExactRational>) -> Result<MultSubgroup, GroupError> {
        if let Some(i) = generators.iter().position(Zero::is_zero) {
            return Err(GroupError::ZeroGenerator(i));
        }
        let mut primes = Vec::new();
        for g in &generators {
            primes.extend(prime_divisors(g.numer())?);
            primes.extend(prime_divisors(g.denom())?);
        }
        let support = PrimeSet::new(primes)?;
        let s = support.len();
        let m = generators.len();

        let mut gen_matrix = vec![vec![BigInt::zero(); m]; s];
        let mut sign_row = Vec::with_capacity(m);
        for (j, g) in generators.iter().enumerate() {
            let v = sunit_factor(&support, g)?;
            for (i, &p) in support.primes().iter().enumerate() {
                gen_matrix[i][j] = BigInt::from(v.exponent(p));
            }
            sign_row.push(v.sign.bit());
        }

        let columns = lattice::transpose(&gen_matrix, m);
        let lattice_basis = lattice::lattice_basis(&columns, s);

        // [[V, 0], [σ, 2]]
        let mut mixed: IntMatrix = gen_matrix
            .iter()
            .map(|row| {
                let mut r = row.clone();
                r.push(BigInt::zero());
                r
            })
            .collect();
        let mut last: Vec<BigInt> = sign_row.iter().map(|&b| BigInt::from(b)).collect();
        last.push(BigInt::from(2));
        mixed.push(last);

        let kernel = lattice::integer_kernel(&mixed, m + 1);
        let projected: IntMatrix = kernel.iter().map(|k| k[..m].to_vec()).collect();
        let relations = lattice::lattice_basis(&projected, m);

        let valuation_snf = lattice::snf(&gen_matrix, m);
        let mixed_snf = lattice::snf(&mixed, m + 1);

        Ok(MultSubgroup {
            generators,
            support,
            gen_matrix,
            sign_row,
            lattice_basis,
            relations,
            valuation_snf,
            mixed_snf,
        })
    }

    pub fn from_def(def: &GroupDef) -> Result<MultSubgroup, GroupError> {
        MultSubgroup::new(def.generators.clone())
    }

    pub fn to_def(&self) -> GroupDef {
        GroupDef { generators: self.generators.clone() }
    }

    pub fn generators(&self) -> &[ExactRational] {
        &self.generators
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn support(&self) -> &PrimeSet {
        &self.support
    }

    /// `V[i][j] = ν_{p_i}(g_j)` with primes in support order.
    pub fn gen_matrix(&self) -> &IntMatrix {
        &self.gen_matrix
    }

    pub fn sign_row(&self) -> &[u8] {
        &self.sign_row
    }

    /// HNF basis of the lattice `V·ℤ^m ⊆ ℤ^support`.
    pub fn lattice_basis(&self) -> &IntMatrix {
        &self.lattice_basis
    }

    /// HNF basis of `{k : Π g_j^{k_j} = 1}`.
    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    pub fn is_free(&self) -> bool {
        self.relations.is_empty()
    }

    fn valuation_column(&self, x: &ExactRational) -> Result<(Sign, Vec<BigInt>), NotMember> {
        if x.is_zero() {
            return Err(NotMember::Zero);
        }
        let v = sunit_factor(&self.support, x).map_err(|e| match e {
            NumberError::NotSUnit { cofactor } => NotMember::Support { cofactor },
            _ => NotMember::Zero,
        })?;
        let column = v.dense(&self.support).into_iter().map(BigInt::from).collect();
        Ok((v.sign, column))
    }

    /// Decides membership and returns the canonical witness.
    pub fn contains(&self, x: &ExactRational) -> Result<ExponentWitness, NotMember> {
        let (sign, column) = self.valuation_column(x)?;
        if self.valuation_snf.solve(&column).is_none() {
            return Err(NotMember::Lattice);
        }
        let mut rhs = column;
        rhs.push(BigInt::from(sign.bit()));
        let y = self.mixed_snf.solve(&rhs).ok_or(NotMember::Sign)?;
        let exponents = lattice::reduce_mod_hnf(&y[..self.rank()], &self.relations);
        let witness = ExponentWitness { exponents, torsion: Sign::Plus };
        debug_assert_eq!(&self.evaluate(&witness), x);
        Ok(witness)
    }

    /// The canonical exponent vector of `x`: the representative of the
    /// solution coset reduced against the HNF of the relation lattice.
    pub fn decompose(&self, x: &ExactRational) -> Result<ExponentWitness, GroupError> {
        Ok(self.contains(x)?)
    }

    /// Least `m ≥ 1` with `x^m ∈ G`, and a witness for `x^m`.
    pub fn radical_contains(&self, x: &ExactRational) -> Result<(BigInt, ExponentWitness), NotMember> {
        let (_, column) = self.valuation_column(x)?;
        let m0 = self.valuation_snf.saturation_index(&column).ok_or(NotMember::Lattice)?;
        match self.contains(&pow_big(x, &m0)) {
            Ok(w) => Ok((m0, w)),
            Err(NotMember::Sign) => {
                let m = m0 * 2;
                let w = self.contains(&pow_big(x, &m))?;
                Ok((m, w))
            }
            Err(e) => Err(e),
        }
    }

    /// `torsion · Π g_j^{k_j}`.
    pub fn evaluate(&self, w: &ExponentWitness) -> ExactRational {
        let mut acc = w.torsion.to_rational();
        for (g, k) in self.generators.iter().zip(&w.exponents) {
            if !k.is_zero() {
                acc *= pow_big(g, k);
            }
        }
        acc
    }

    /// A certified constant `C = c·log 2` with `h(a) ≥ C·max_i |k_i|` for
    /// every `a = Π g_i^{k_i}`.
    ///
    /// With `W` an exact left inverse of `V`, `|k_i| ≤ ‖W_i‖₁·max_p |ν_p(a)|`,
    /// and `h(a) ≥ ½·Σ_p |ν_p(a)|·log p ≥ ½·max_p |ν_p(a)|·log 2`, so
    /// `c = 1 / (2·max_i ‖W_i‖₁)` works.
    pub fn height_lower_constant(&self) -> Result<HeightConstant, GroupError> {
        if !self.is_free() {
            return Err(GroupError::NotFree);
        }
        if self.support.is_empty() {
            return Err(GroupError::EmptySupport);
        }
        let m = self.rank();
        let rows: Vec<Vec<ExactRational>> = self
            .gen_matrix
            .iter()
            .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
            .collect();
        // greedily choose m independent prime rows
        let mut chosen: Vec<usize> = Vec::new();
        for i in 0..rows.len() {
            let mut trial: Vec<Vec<ExactRational>> = chosen.iter().map(|&c| rows[c].clone()).collect();
            trial.push(rows[i].clone());
            if linalg::rank(&trial, m) == trial.len() {
                chosen.push(i);
                if chosen.len() == m {
                    break;
                }
            }
        }
        let square: Vec<Vec<ExactRational>> = chosen.iter().map(|&c| rows[c].clone()).collect();
        let inv = linalg::inverse(&square).ok_or(GroupError::NotFree)?;
        let max_norm = inv
            .iter()
            .map(|row| row.iter().fold(ExactRational::zero(), |acc, x| acc + x.abs()))
            .max()
            .expect("free group with nonempty support has at least one generator");
        let factor = (max_norm * ExactRational::from_integer(BigInt::from(2))).recip();
        Ok(HeightConstant { log2_factor: factor })
    }
}

/// A height lower-bound constant of the form `c·log 2` with `c` rational.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeightConstant {
    #[serde(with = "rational_str")]
    pub log2_factor: ExactRational,
}

impl HeightConstant {
    pub fn value(&self) -> f64 {
        self.log2_factor.to_f64().unwrap_or(0.0) * std::f64::consts::LN_2
    }

    /// Exact test of `log H ≥ c·log 2·k`, i.e. `H^den(c) ≥ 2^(num(c)·k)`.
    pub fn bound_holds(&self, height_max: &BigUint, k: &BigUint) -> bool {
        let num = self.log2_factor.numer().magnitude();
        let den = self.log2_factor.denom().magnitude().to_usize().expect("small denominator");
        let lhs = num_traits::pow(height_max.clone(), den);
        let shift = (num * k).to_u64().expect("exponent fits in u64");
        lhs >= BigUint::one() << shift
    }
}
