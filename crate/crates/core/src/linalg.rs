//! Exact linear algebra over the rationals.

use num_traits::{One, Zero};

use crate::exact_numbers::ExactRational;

pub type RatMatrix = Vec<Vec<ExactRational>>;

/// In-place reduced row echelon form; returns the pivot columns.
pub fn rref(a: &mut RatMatrix, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == a.len() {
            break;
        }
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..a.len() {
            if i == r || a[i][c].is_zero() {
                continue;
            }
            let factor = a[i][c].clone();
            let pivot_row = a[r].clone();
            for (x, p) in a[i].iter_mut().zip(&pivot_row).take(ncols) {
                *x -= &factor * p;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of the right nullspace `{x : A·x = 0}`; one vector per free column,
/// with that column set to 1.
pub fn nullspace(a: &[Vec<ExactRational>], ncols: usize) -> RatMatrix {
    let mut m = a.to_vec();
    let pivots = rref(&mut m, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![ExactRational::zero(); ncols];
            v[f] = ExactRational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[row][f].clone();
            }
            v
        })
        .collect()
}

/// A solution of `A·x = b` with free variables set to zero, or `None` when the
/// system is inconsistent. The second value reports whether it is unique.
pub fn solve(a: &[Vec<ExactRational>], ncols: usize, b: &[ExactRational]) -> Option<(Vec<ExactRational>, bool)> {
    let mut aug: RatMatrix = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug, ncols + 1);
    if pivots.contains(&ncols) {
        return None;
    }
    let mut x = vec![ExactRational::zero(); ncols];
    for (row, &pc) in pivots.iter().enumerate() {
        x[pc] = aug[row][ncols].clone();
    }
    Some((x, pivots.len() == ncols))
}

pub fn rank(a: &[Vec<ExactRational>], ncols: usize) -> usize {
    let mut m = a.to_vec();
    rref(&mut m, ncols).len()
}

pub fn inverse(a: &[Vec<ExactRational>]) -> Option<RatMatrix> {
    let n = a.len();
    let mut aug: RatMatrix = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { ExactRational::one() } else { ExactRational::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut aug, 2 * n);
    if pivots.len() < n || pivots[n - 1] >= n {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn mat_mul(a: &[Vec<ExactRational>], b: &[Vec<ExactRational>]) -> RatMatrix {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| row.iter().zip(b).map(|(x, brow)| x * &brow[j]).fold(ExactRational::zero(), |acc, t| acc + t))
                .collect()
        })
        .collect()
}

/// Characteristic polynomial `det(x·I − A)` by the Faddeev–LeVerrier
/// recursion; coefficients from `x^n` down to the constant term.
pub fn charpoly(a: &[Vec<ExactRational>]) -> Vec<ExactRational> {
    let n = a.len();
    let mut coeffs = vec![ExactRational::one()];
    let ident = |k: &ExactRational| -> RatMatrix {
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { k.clone() } else { ExactRational::zero() }).collect())
            .collect()
    };
    // M_0 = 0, c_n = 1; M_k = A·M_{k-1} + c_{n-k+1} I; c_{n-k} = -tr(A M_k)/k
    let mut m = ident(&ExactRational::zero());
    for k in 1..=n {
        let prev_c = coeffs.last().unwrap().clone();
        let mut next = mat_mul(a, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &prev_c;
        }
        m = next;
        let am = mat_mul(a, &m);
        let trace = (0..n).fold(ExactRational::zero(), |acc, i| acc + &am[i][i]);
        coeffs.push(-trace / ExactRational::from_integer((k as i64).into()));
    }
    coeffs
}

pub fn kronecker(a: &[Vec<ExactRational>], b: &[Vec<ExactRational>]) -> RatMatrix {
    let (n, m) = (a.len(), b.len());
    let mut out = vec![vec![ExactRational::zero(); n * m]; n * m];
    for i in 0..n {
        for j in 0..n {
            for k in 0..m {
                for l in 0..m {
                    out[i * m + k][j * m + l] = &a[i][j] * &b[k][l];
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_numbers::{rat, ratio};

    fn q(rows: &[&[i64]]) -> RatMatrix {
        rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect()
    }

    #[test]
    fn nullspace_of_rank_one() {
        let a = q(&[&[1, 1, 1]]);
        let ns = nullspace(&a, 3);
        assert_eq!(ns, q(&[&[-1, 1, 0], &[-1, 0, 1]]));
    }

    #[test]
    fn solve_and_uniqueness() {
        let a = q(&[&[2, 1], &[1, 3]]);
        let (x, unique) = solve(&a, 2, &[rat(3), rat(4)]).unwrap();
        assert!(unique);
        assert_eq!(x, vec![rat(1), rat(1)]);
        assert!(solve(&q(&[&[1, 1], &[1, 1]]), 2, &[rat(1), rat(2)]).is_none());
    }

    #[test]
    fn inverse_of_exponent_matrix() {
        let inv = inverse(&q(&[&[2, 1], &[0, 1]])).unwrap();
        assert_eq!(inv, vec![vec![ratio(1, 2), ratio(-1, 2)], vec![rat(0), rat(1)]]);
        assert!(inverse(&q(&[&[1, 2], &[2, 4]])).is_none());
    }

    #[test]
    fn charpoly_of_companion() {
        // Fibonacci companion: x^2 - x - 1
        assert_eq!(charpoly(&q(&[&[1, 1], &[1, 0]])), vec![rat(1), rat(-1), rat(-1)]);
        assert_eq!(charpoly(&q(&[&[2]])), vec![rat(1), rat(-2)]);
    }
}
