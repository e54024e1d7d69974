//! Internal basis preprocessing for the enumerator: LLL-style reduction of
//! the integer Gram matrix with the unimodular transform tracked, so the
//! search tree is walked in a well-conditioned basis and results are mapped
//! back to the original coordinates. Pure plumbing for pruning quality; the
//! enumeration is exact either way.

/// Result of reducing an integer Gram matrix G: `gram` = U G U' with U
/// unimodular (rows are the new basis in old coordinates).
pub(crate) struct GramReduction {
    pub gram: Vec<i64>,
    /// u[i][j]: coefficient of old basis vector j in new basis vector i.
    pub u: Vec<Vec<i64>>,
    pub nontrivial: bool,
}

const ENTRY_LIMIT: i128 = 1 << 55;

/// Reduce with delta = 0.99. On any numeric trouble (overflow risk,
/// Gram-Schmidt breakdown) the identity transform is returned; callers lose
/// speed, never correctness.
pub(crate) fn reduce_gram(n: usize, g0: &[i64]) -> GramReduction {
    let identity = || GramReduction {
        gram: g0.to_vec(),
        u: (0..n)
            .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
            .collect(),
        nontrivial: false,
    };
    if n < 2 {
        return identity();
    }
    let mut g: Vec<i128> = g0.iter().map(|&v| v as i128).collect();
    let mut u: Vec<Vec<i128>> = (0..n)
        .map(|i| (0..n).map(|j| i128::from(i == j)).collect())
        .collect();

    // Gram-Schmidt data from the current gram: b[i] = squared GS norms,
    // mu[i*n+j] for j < i.
    let gso = |g: &[i128]| -> Option<(Vec<f64>, Vec<f64>)> {
        let mut b = vec![0.0f64; n];
        let mut mu = vec![0.0f64; n * n];
        for i in 0..n {
            let mut bi = g[i * n + i] as f64;
            for j in 0..i {
                let mut m = g[i * n + j] as f64;
                for k in 0..j {
                    m -= mu[i * n + k] * mu[j * n + k] * b[k];
                }
                let mij = m / b[j];
                mu[i * n + j] = mij;
                bi -= mij * mij * b[j];
            }
            if !(bi > 0.0) || !bi.is_finite() {
                return None;
            }
            b[i] = bi;
        }
        Some((b, mu))
    };

    let row_op = |g: &mut [i128], u: &mut [Vec<i128>], k: usize, j: usize, q: i128| -> bool {
        for m in 0..n {
            g[k * n + m] -= q * g[j * n + m];
        }
        for m in 0..n {
            g[m * n + k] -= q * g[m * n + j];
        }
        for m in 0..n {
            u[k][m] -= q * u[j][m];
        }
        g.iter().all(|v| v.abs() < ENTRY_LIMIT)
            && u[k].iter().all(|v| v.abs() < ENTRY_LIMIT)
    };

    let swap_rows = |g: &mut [i128], u: &mut Vec<Vec<i128>>, k: usize| {
        for m in 0..n {
            g.swap((k - 1) * n + m, k * n + m);
        }
        for m in 0..n {
            g.swap(m * n + (k - 1), m * n + k);
        }
        u.swap(k - 1, k);
    };

    let mut k = 1usize;
    let mut iterations = 0u32;
    while k < n {
        iterations += 1;
        if iterations > 20_000 {
            return identity();
        }
        // Size-reduce row k against rows k-1 .. 0 (gso recomputed per step;
        // n <= 32 keeps that cheap).
        for j in (0..k).rev() {
            let Some((_, mu)) = gso(&g) else {
                return identity();
            };
            let q = mu[k * n + j].round();
            if q != 0.0 && q.abs() < 1e17 && !row_op(&mut g, &mut u, k, j, q as i128) {
                return identity();
            }
        }
        let Some((b, mu)) = gso(&g) else {
            return identity();
        };
        let m = mu[k * n + (k - 1)];
        if b[k] < (0.99 - m * m) * b[k - 1] {
            swap_rows(&mut g, &mut u, k);
            k = k.max(2) - 1;
        } else {
            k += 1;
        }
    }

    let fits = g.iter().all(|&v| i64::try_from(v).is_ok())
        && u.iter().flatten().all(|&v| i64::try_from(v).is_ok());
    if !fits {
        return identity();
    }
    GramReduction {
        gram: g.iter().map(|&v| v as i64).collect(),
        u: u
            .iter()
            .map(|r| r.iter().map(|&v| v as i64).collect())
            .collect(),
        nontrivial: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn det_bigint(n: usize, m: &[Vec<i64>]) -> BigInt {
        // cofactor expansion is fine for the tiny test sizes
        fn det(n: usize, m: &mut Vec<Vec<BigInt>>) -> BigInt {
            if n == 1 {
                return m[0][0].clone();
            }
            let mut total = BigInt::from(0);
            for c in 0..n {
                if m[0][c] == BigInt::from(0) {
                    continue;
                }
                let minor: Vec<Vec<BigInt>> = (1..n)
                    .map(|r| {
                        (0..n)
                            .filter(|&cc| cc != c)
                            .map(|cc| m[r][cc].clone())
                            .collect()
                    })
                    .collect();
                let sign = if c % 2 == 0 { 1 } else { -1 };
                total += BigInt::from(sign) * &m[0][c] * det(n - 1, &mut minor.clone());
            }
            total
        }
        let mut mm: Vec<Vec<BigInt>> = m
            .iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect();
        det(n, &mut mm)
    }

    #[test]
    fn transform_is_unimodular_and_congruent() {
        // A deliberately skewed basis of a 3-dim lattice.
        let g = vec![
            2i64, 3, 5, //
            3, 10, 11, //
            5, 11, 30,
        ];
        let r = reduce_gram(3, &g);
        let det_u = det_bigint(3, &r.u);
        assert!(det_u == BigInt::from(1) || det_u == BigInt::from(-1), "{det_u}");
        // gram' = U G U'
        let mut expect = vec![0i128; 9];
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0i128;
                for a in 0..3 {
                    for b in 0..3 {
                        s += r.u[i][a] as i128 * g[a * 3 + b] as i128 * r.u[j][b] as i128;
                    }
                }
                expect[i * 3 + j] = s;
            }
        }
        for (a, b) in expect.iter().zip(&r.gram) {
            assert_eq!(*a, *b as i128);
        }
        // Reduced diagonal no larger than the original worst entry.
        assert!(r.gram[8] <= 30);
    }

    #[test]
    fn identity_for_orthogonal_input() {
        let g = vec![1i64, 0, 0, 1];
        let r = reduce_gram(2, &g);
        assert_eq!(r.gram, g);
    }
}
