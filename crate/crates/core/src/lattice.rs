//! Integer lattice routines: row Hermite normal form with transform, Smith
//! normal form with both transforms, integer kernels and integer solving.
//!
//! Matrices are dense `Vec<Vec<BigInt>>` in row-major order.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type IntMatrix = Vec<Vec<BigInt>>;

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

pub fn transpose(a: &[Vec<BigInt>], ncols: usize) -> IntMatrix {
    (0..ncols).map(|j| a.iter().map(|row| row[j].clone()).collect()).collect()
}

pub fn mat_vec(a: &[Vec<BigInt>], v: &[BigInt]) -> Vec<BigInt> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

pub fn to_big(rows: &[Vec<i64>]) -> IntMatrix {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

fn combine_rows(a: &mut [Vec<BigInt>], r: usize, i: usize, s: &BigInt, t: &BigInt, u: &BigInt, v: &BigInt) {
    // (row_r, row_i) <- (s*row_r + t*row_i, u*row_r + v*row_i)
    for k in 0..a[r].len() {
        let x = a[r][k].clone();
        let y = a[i][k].clone();
        a[r][k] = s * &x + t * &y;
        a[i][k] = u * &x + v * &y;
    }
}

fn sub_row_multiple(a: &mut [Vec<BigInt>], target: usize, src: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    for k in 0..a[target].len() {
        let delta = q * &a[src][k];
        a[target][k] -= delta;
    }
}

fn negate_row(a: &mut [Vec<BigInt>], r: usize) {
    for x in a[r].iter_mut() {
        *x = -std::mem::take(x);
    }
}

/// Row-style Hermite normal form `U·A = H`.
///
/// `H` is in row echelon form with positive pivots and entries above each
/// pivot reduced into `[0, pivot)`. Rows `rank..` of `H` are zero and the
/// matching rows of `U` span the left kernel of `A`.
#[derive(Debug, Clone)]
pub struct Hnf {
    pub h: IntMatrix,
    pub transform: IntMatrix,
    pub pivots: Vec<usize>,
}

impl Hnf {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// The nonzero rows of `H`, a canonical basis of the row lattice.
    pub fn basis(&self) -> IntMatrix {
        self.h[..self.rank()].to_vec()
    }

    /// Rows of the transform annihilating `A` from the left.
    pub fn left_kernel(&self) -> IntMatrix {
        self.transform[self.rank()..].to_vec()
    }
}

pub fn hnf(a: &[Vec<BigInt>], ncols: usize) -> Hnf {
    let m = a.len();
    let mut h: IntMatrix = a.to_vec();
    let mut u = identity(m);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m {
            break;
        }
        for i in r + 1..m {
            if h[i][c].is_zero() {
                continue;
            }
            if h[r][c].is_zero() {
                h.swap(r, i);
                u.swap(r, i);
                continue;
            }
            let e = h[r][c].extended_gcd(&h[i][c]);
            let a_r = &h[r][c] / &e.gcd;
            let a_i = &h[i][c] / &e.gcd;
            let (s, t, uu, vv) = (e.x.clone(), e.y.clone(), -a_i, a_r);
            combine_rows(&mut h, r, i, &s, &t, &uu, &vv);
            combine_rows(&mut u, r, i, &s, &t, &uu, &vv);
        }
        if h[r][c].is_zero() {
            continue;
        }
        if h[r][c].is_negative() {
            negate_row(&mut h, r);
            negate_row(&mut u, r);
        }
        for i in 0..r {
            let q = h[i][c].div_floor(&h[r][c]);
            sub_row_multiple(&mut h, i, r, &q);
            sub_row_multiple(&mut u, i, r, &q);
        }
        pivots.push(c);
        r += 1;
    }
    Hnf { h, transform: u, pivots }
}

/// Canonical basis (row HNF) of the lattice spanned by `rows`.
pub fn lattice_basis(rows: &[Vec<BigInt>], ncols: usize) -> IntMatrix {
    hnf(rows, ncols).basis()
}

/// Basis of `{y ∈ ℤ^ncols : A·y = 0}`, in row Hermite normal form.
pub fn integer_kernel(a: &[Vec<BigInt>], ncols: usize) -> IntMatrix {
    let at = transpose(a, ncols);
    let kernel = hnf(&at, a.len()).left_kernel();
    lattice_basis(&kernel, ncols)
}

/// Reduces `v` modulo the lattice spanned by the rows of an HNF basis, giving
/// the unique representative with every pivot coordinate in `[0, pivot)`.
pub fn reduce_mod_hnf(v: &[BigInt], basis: &[Vec<BigInt>]) -> Vec<BigInt> {
    let mut out = v.to_vec();
    for row in basis {
        let Some(c) = row.iter().position(|x| !x.is_zero()) else {
            continue;
        };
        let q = out[c].div_floor(&row[c]);
        if !q.is_zero() {
            for (o, x) in out.iter_mut().zip(row) {
                *o -= &q * x;
            }
        }
    }
    out
}

pub fn is_in_lattice(v: &[BigInt], basis: &[Vec<BigInt>]) -> bool {
    reduce_mod_hnf(v, basis).iter().all(Zero::is_zero)
}

/// Smith normal form `U·A·V = D` with `d_1 | d_2 | …` nonnegative.
#[derive(Debug, Clone)]
pub struct Snf {
    pub diagonal: Vec<BigInt>,
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub rows: usize,
    pub cols: usize,
}

impl Snf {
    pub fn rank(&self) -> usize {
        self.diagonal.iter().take_while(|d| !d.is_zero()).count()
    }

    /// An integer solution of `A·y = b`, with free coordinates set to zero.
    pub fn solve(&self, b: &[BigInt]) -> Option<Vec<BigInt>> {
        let c = mat_vec(&self.u, b);
        let rank = self.rank();
        let mut z = vec![BigInt::zero(); self.cols];
        for (i, ci) in c.iter().enumerate() {
            if i < rank {
                let (q, r) = ci.div_rem(&self.diagonal[i]);
                if !r.is_zero() {
                    return None;
                }
                z[i] = q;
            } else if !ci.is_zero() {
                return None;
            }
        }
        Some(mat_vec(&self.v, &z))
    }

    /// Least `m ≥ 1` with `m·b` in the column lattice of `A`, or `None` if `b`
    /// is outside its rational span.
    pub fn saturation_index(&self, b: &[BigInt]) -> Option<BigInt> {
        let c = mat_vec(&self.u, b);
        let rank = self.rank();
        let mut m = BigInt::one();
        for (i, ci) in c.iter().enumerate() {
            if i < rank {
                let d = &self.diagonal[i];
                let need = d / ci.gcd(d);
                m = m.lcm(&need);
            } else if !ci.is_zero() {
                return None;
            }
        }
        Some(m)
    }
}

fn swap_cols(a: &mut [Vec<BigInt>], i: usize, j: usize) {
    for row in a.iter_mut() {
        row.swap(i, j);
    }
}

fn sub_col_multiple(a: &mut [Vec<BigInt>], target: usize, src: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    for row in a.iter_mut() {
        let delta = q * &row[src];
        row[target] -= delta;
    }
}

pub fn snf(a: &[Vec<BigInt>], ncols: usize) -> Snf {
    let m = a.len();
    let n = ncols;
    let mut d: IntMatrix = a.to_vec();
    let mut u = identity(m);
    let mut v = identity(n);
    let steps = m.min(n);
    let mut t = 0;
    while t < steps {
        // smallest nonzero entry of the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if d[i][j].is_zero() {
                    continue;
                }
                match best {
                    Some((bi, bj)) if d[bi][bj].magnitude() <= d[i][j].magnitude() => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        let Some((pi, pj)) = best else {
            break;
        };
        d.swap(t, pi);
        u.swap(t, pi);
        swap_cols(&mut d, t, pj);
        swap_cols(&mut v, t, pj);

        let mut clean = true;
        for i in t + 1..m {
            let q = d[i][t].div_floor(&d[t][t]);
            sub_row_multiple(&mut d, i, t, &q);
            sub_row_multiple(&mut u, i, t, &q);
            if !d[i][t].is_zero() {
                clean = false;
            }
        }
        for j in t + 1..n {
            let q = d[t][j].div_floor(&d[t][t]);
            sub_col_multiple(&mut d, j, t, &q);
            sub_col_multiple(&mut v, j, t, &q);
            if !d[t][j].is_zero() {
                clean = false;
            }
        }
        if !clean {
            continue;
        }
        // pivot must divide the whole trailing block
        let mut offender = None;
        'scan: for i in t + 1..m {
            for j in t + 1..n {
                if !(&d[i][j] % &d[t][t]).is_zero() {
                    offender = Some(i);
                    break 'scan;
                }
            }
        }
        if let Some(i) = offender {
            let one = BigInt::from(-1);
            sub_row_multiple(&mut d, t, i, &one);
            sub_row_multiple(&mut u, t, i, &one);
            continue;
        }
        if d[t][t].is_negative() {
            negate_row(&mut d, t);
            negate_row(&mut u, t);
        }
        t += 1;
    }
    let diagonal = (0..steps).map(|i| d[i][i].clone()).collect();
    Snf { diagonal, u, v, rows: m, cols: n }
}

/// An integer solution of `A·y = b`, if one exists.
pub fn solve_integer(a: &[Vec<BigInt>], ncols: usize, b: &[BigInt]) -> Option<Vec<BigInt>> {
    snf(a, ncols).solve(b)
}

pub fn content(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>], inner: usize, cols: usize) -> IntMatrix {
        a.iter()
            .map(|row| (0..cols).map(|j| (0..inner).map(|k| &row[k] * &b[k][j]).sum()).collect())
            .collect()
    }

    #[test]
    fn hnf_of_small_matrix() {
        let a = to_big(&[vec![2, 0], vec![1, 1]]);
        let h = hnf(&a, 2);
        assert_eq!(h.basis(), to_big(&[vec![1, 1], vec![0, 2]]));
        assert_eq!(mat_mul(&h.transform, &a, 2, 2), h.h);
    }

    #[test]
    fn kernel_of_dependent_generators() {
        // exponents of 2 and 4 over the prime 2: relation (2, -1)
        let v = to_big(&[vec![1, 2]]);
        assert_eq!(integer_kernel(&v, 2), to_big(&[vec![2, -1]]));
        let empty = integer_kernel(&to_big(&[vec![1, 0], vec![0, 1]]), 2);
        assert!(empty.is_empty());
    }

    #[test]
    fn reduction_is_canonical() {
        let basis = to_big(&[vec![2, -1]]);
        let r = reduce_mod_hnf(&[BigInt::from(3), BigInt::from(0)], &basis);
        assert_eq!(r, vec![BigInt::from(1), BigInt::from(1)]);
    }

    #[test]
    fn snf_examples() {
        let a = to_big(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let s = snf(&a, 3);
        assert_eq!(s.diagonal, vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
        let uav = mat_mul(&mat_mul(&s.u, &a, 3, 3), &s.v, 3, 3);
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { s.diagonal[i].clone() } else { BigInt::zero() };
                assert_eq!(uav[i][j], expected);
            }
        }
    }

    #[test]
    fn saturation_index_examples() {
        let a = to_big(&[vec![2]]);
        let s = snf(&a, 1);
        assert_eq!(s.saturation_index(&[BigInt::from(1)]), Some(BigInt::from(2)));
        assert_eq!(s.saturation_index(&[BigInt::from(4)]), Some(BigInt::from(1)));
        let b = to_big(&[vec![1], vec![0]]);
        assert_eq!(snf(&b, 1).saturation_index(&[BigInt::from(1), BigInt::from(1)]), None);
    }

    fn small_matrix() -> impl Strategy<Value = (usize, usize, Vec<Vec<i64>>)> {
        (1usize..4, 1usize..4).prop_flat_map(|(m, n)| {
            (Just(m), Just(n), prop::collection::vec(prop::collection::vec(-6i64..=6, n), m))
        })
    }

    proptest! {
        #[test]
        fn hnf_transform_identity((m, n, rows) in small_matrix()) {
            let a = to_big(&rows);
            let h = hnf(&a, n);
            prop_assert_eq!(mat_mul(&h.transform, &a, m, n), h.h.clone());
            for k in h.left_kernel() {
                let row: Vec<BigInt> = (0..n).map(|j| (0..m).map(|i| &k[i] * &a[i][j]).sum()).collect();
                prop_assert!(row.iter().all(Zero::is_zero));
            }
        }

        #[test]
        fn snf_transform_identity((m, n, rows) in small_matrix()) {
            let a = to_big(&rows);
            let s = snf(&a, n);
            let uav = mat_mul(&mat_mul(&s.u, &a, m, n), &s.v, n, n);
            for i in 0..m {
                for j in 0..n {
                    let expected = if i == j { s.diagonal[i].clone() } else { BigInt::zero() };
                    prop_assert_eq!(&uav[i][j], &expected);
                }
            }
            for w in s.diagonal.windows(2) {
                if !w[0].is_zero() {
                    prop_assert!((&w[1] % &w[0]).is_zero());
                }
            }
        }

        #[test]
        fn solve_finds_preimages((m, n, rows) in small_matrix(), y in prop::collection::vec(-5i64..=5, 3)) {
            let a = to_big(&rows);
            let y: Vec<BigInt> = y.into_iter().take(n).map(BigInt::from).chain(std::iter::repeat(BigInt::zero())).take(n).collect();
            let b = mat_vec(&a, &y);
            let sol = solve_integer(&a, n, &b).expect("image vector must be solvable");
            prop_assert_eq!(mat_vec(&a, &sol), b);
            let _ = m;
        }
    }
}
