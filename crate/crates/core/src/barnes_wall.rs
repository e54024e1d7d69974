//! Barnes-Wall lattices BW_{2^k} for 2 <= k <= 5.
//!
//! Generating set: for every affine subspace U of the binary affine space
//! F_2^k (dimension d = dim U), the vector 2^floor((k-d+1)/2) * chi_U over an
//! orthonormal basis indexed by the 2^k points. The redundant generating set
//! is reduced to a basis by integer row reduction, and the resulting Gram
//! matrix is normalized to its even-primitive form (divided by 2 while it
//! stays an even integral matrix).

use crate::error::{Error, Result};
use crate::gram::GramMatrix;
use crate::hnf::hnf_basis;
use crate::lattice::{Lattice, Provenance};
use crate::ratmat::{Rat, RatMat};
use num_bigint::BigInt;
use num_traits::Zero;
use std::collections::BTreeSet;

/// All affine subspaces of F_2^k as point bitmasks, with their dimension.
fn affine_subspaces(k: u32) -> Vec<(u32, u64)> {
    let points = 1u32 << k;
    // Linear subspaces first, found by closing spans; dim 0 is {0}.
    let mut linear: BTreeSet<u64> = BTreeSet::new();
    linear.insert(1u64); // {0}: bit 0 set
    // Grow: repeatedly extend each subspace by an outside point.
    let mut frontier: Vec<u64> = linear.iter().copied().collect();
    while let Some(sub) = frontier.pop() {
        for p in 1..points {
            if sub >> p & 1 == 1 {
                continue;
            }
            // span(sub, p): union of sub and sub translated by p.
            let mut ext = sub;
            for q in 0..points {
                if sub >> q & 1 == 1 {
                    ext |= 1u64 << (q ^ p);
                }
            }
            if linear.insert(ext) {
                frontier.push(ext);
            }
        }
    }
    // Affine subspaces: distinct translates of each linear subspace.
    let mut affine = Vec::new();
    for sub in linear {
        let dim = sub.count_ones().trailing_zeros(); // |U| = 2^d
        let mut seen = BTreeSet::new();
        for t in 0..points {
            let mut coset = 0u64;
            for q in 0..points {
                if sub >> q & 1 == 1 {
                    coset |= 1u64 << (q ^ t);
                }
            }
            if seen.insert(coset) {
                affine.push((dim, coset));
            }
        }
    }
    affine
}

/// Construct BW_{2^k}. Errors for k outside 2..=5.
pub fn barnes_wall(k: u32) -> Result<Lattice> {
    if !(2..=5).contains(&k) {
        return Err(Error::UnsupportedDimension(k));
    }
    let n = 1usize << k;
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    for (d, mask) in affine_subspaces(k) {
        let scale = BigInt::from(1) << ((k - d + 1) / 2);
        let mut row = vec![BigInt::zero(); n];
        for (q, r) in row.iter_mut().enumerate() {
            if mask >> q & 1 == 1 {
                *r = scale.clone();
            }
        }
        rows.push(row);
    }
    let basis = hnf_basis(rows, n);
    if basis.len() != n {
        return Err(Error::Domain(format!(
            "Barnes-Wall generators span rank {} instead of {}",
            basis.len(),
            n
        )));
    }
    // Gram = B B' over the orthonormal point basis.
    let mut gram = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = BigInt::zero();
            for t in 0..n {
                s += &basis[i][t] * &basis[j][t];
            }
            gram[i][j] = s.clone();
            gram[j][i] = s;
        }
    }
    // Even-primitive normalization: halve while the matrix stays integral
    // and even (all entries even, diagonal divisible by 4).
    loop {
        let all_even = gram
            .iter()
            .flatten()
            .all(|v| (v % BigInt::from(2)).is_zero());
        let diag_div4 = (0..n).all(|i| (&gram[i][i] % BigInt::from(4)).is_zero());
        if all_even && diag_div4 {
            for row in gram.iter_mut() {
                for v in row.iter_mut() {
                    *v /= BigInt::from(2);
                }
            }
        } else {
            break;
        }
    }
    let rows: Vec<Vec<Rat>> = gram
        .into_iter()
        .map(|r| r.into_iter().map(Rat::from_integer).collect())
        .collect();
    let gram = GramMatrix::new(RatMat::from_rows(rows))?;
    Ok(Lattice::new(
        format!("BW{}", n),
        gram,
        Provenance::BarnesWall(k),
    ))
}

/// Count of affine subspaces, for sanity checks: sum over d of
/// 2^(k-d) * gaussian_binomial(k, d).
pub fn affine_subspace_count(k: u32) -> u64 {
    let mut total = 0u64;
    for d in 0..=k {
        let mut num = 1u128;
        let mut den = 1u128;
        for i in 0..d {
            num *= (1u128 << (k - i)) - 1;
            den *= (1u128 << (d - i)) - 1;
        }
        total += ((num / den) as u64) << (k - d);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shells::{first_k_shell_data, EnumConfig};

    #[test]
    fn affine_subspace_enumeration_counts() {
        for k in 2..=5 {
            let subs = affine_subspaces(k);
            assert_eq!(subs.len() as u64, affine_subspace_count(k), "k={k}");
        }
        // k=4 by hand: 16 points + 120 lines + 140 planes + 30 dim-3 + 1.
        assert_eq!(affine_subspace_count(4), 307);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(barnes_wall(1).is_err());
        assert!(barnes_wall(6).is_err());
    }

    #[test]
    fn bw4_is_even_with_kissing_24() {
        let l = barnes_wall(2).unwrap();
        assert_eq!(l.dim(), 4);
        assert!(l.gram.is_even());
        let data = first_k_shell_data(&l.gram, 1, EnumConfig::default()).unwrap();
        assert_eq!(data[0].count, 24);
    }

    #[test]
    fn bw16_min_norm_and_kissing() {
        let l = barnes_wall(4).unwrap();
        assert_eq!(l.dim(), 16);
        assert!(l.gram.is_even());
        let data = first_k_shell_data(&l.gram, 1, EnumConfig::default()).unwrap();
        assert_eq!(data[0].norm, Rat::from_integer(4.into()));
        assert_eq!(data[0].count, 4320);
    }
}
