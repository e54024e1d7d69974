//! Integer row reduction to Hermite normal form.
//!
//! Used to turn redundant generating sets (Barnes-Wall character vectors,
//! Golay/hexacode lifts) into honest lattice bases. Rows are kept as BigInt so
//! the Euclidean row reduction never overflows.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// Reduce `rows` (each of length `n`) to the Hermite normal form basis of
/// their integer row span. Returns the nonzero rows; for a full-rank span the
/// result has exactly `n` rows, upper triangular with positive pivots and
/// entries above a pivot reduced to [0, pivot).
pub fn hnf_basis(mut rows: Vec<Vec<BigInt>>, n: usize) -> Vec<Vec<BigInt>> {
    rows.retain(|r| r.iter().any(|v| !v.is_zero()));
    let mut pivot_rows: Vec<Vec<BigInt>> = Vec::new();
    for col in 0..n {
        // Fold every row with a nonzero entry in `col` into one via gcd steps.
        let mut carrier: Option<Vec<BigInt>> = None;
        let mut rest = Vec::new();
        for row in rows.drain(..) {
            if row[col].is_zero() {
                rest.push(row);
                continue;
            }
            match carrier.take() {
                None => carrier = Some(row),
                Some(mut c) => {
                    let mut r = row;
                    // Euclid on the col entries of c and r.
                    loop {
                        if r[col].is_zero() {
                            if r.iter().any(|v| !v.is_zero()) {
                                rest.push(r);
                            }
                            break;
                        }
                        let q = floor_div(&c[col], &r[col]);
                        if !q.is_zero() {
                            for j in 0..n {
                                let t = &q * &r[j];
                                c[j] -= t;
                            }
                        }
                        std::mem::swap(&mut c, &mut r);
                        if r[col].is_zero() {
                            if r.iter().any(|v| !v.is_zero()) {
                                rest.push(r);
                            }
                            break;
                        }
                    }
                    carrier = Some(c);
                }
            }
        }
        rows = rest;
        if let Some(mut c) = carrier {
            if c[col].is_negative() {
                for v in c.iter_mut() {
                    *v = -std::mem::take(v);
                }
            }
            // Reduce earlier pivot rows above this pivot.
            for pr in pivot_rows.iter_mut() {
                if !pr[col].is_zero() {
                    let q = floor_div(&pr[col], &c[col]);
                    if !q.is_zero() {
                        for j in 0..n {
                            let t = &q * &c[j];
                            pr[j] -= t;
                        }
                    }
                }
            }
            pivot_rows.push(c);
        }
    }
    pivot_rows
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    num_integer::Integer::div_floor(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(v: i64) -> BigInt {
        v.into()
    }

    fn rows(data: &[&[i64]]) -> Vec<Vec<BigInt>> {
        data.iter()
            .map(|r| r.iter().map(|&v| bi(v)).collect())
            .collect()
    }

    #[test]
    fn hnf_of_redundant_generators() {
        // Z^2 generated redundantly.
        let basis = hnf_basis(rows(&[&[2, 0], &[0, 3], &[1, 1]]), 2);
        assert_eq!(basis.len(), 2);
        // Determinant of the span must be 1 (it is all of Z^2):
        let det = &basis[0][0] * &basis[1][1];
        assert_eq!(det, bi(1));
    }

    #[test]
    fn hnf_pivots_positive_and_reduced() {
        let basis = hnf_basis(rows(&[&[4, 2, 0], &[0, 2, 8], &[0, 0, 6], &[4, 4, 8]]), 3);
        assert_eq!(basis.len(), 3);
        for (i, row) in basis.iter().enumerate() {
            assert!(row[i].is_positive());
            for r_above in basis.iter().take(i) {
                assert!(!r_above[i].is_negative() && r_above[i] < row[i] || r_above[i].is_zero());
            }
        }
        // index = product of pivots = |det| of the span in Z^3: generators
        // span the lattice with det 4*2*... compute via pivots.
        let det: BigInt = (0..3).map(|i| basis[i][i].clone()).product();
        assert!(det.is_positive());
    }

    #[test]
    fn hnf_rank_deficient_input() {
        let basis = hnf_basis(rows(&[&[1, 2, 3], &[2, 4, 6]]), 3);
        assert_eq!(basis.len(), 1);
    }
}
