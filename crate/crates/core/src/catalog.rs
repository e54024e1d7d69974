//! Catalog of named lattices.
//!
//! Root lattices use their standard root bases (the Gram matrices are the
//! Cartan matrices, with A2 in the all-positive convention [[2,1],[1,2]]).
//! K12 is built from the hexacode over F4 in Eisenstein coordinates, the
//! Leech lattice from the extended binary Golay code; both constructions are
//! reduced to bases by integer row reduction and validated by enumeration in
//! the test suites. BW16/BW32 delegate to the Barnes-Wall construction.

use crate::barnes_wall::barnes_wall;
use crate::error::{Error, Result};
use crate::golay::GolayCode;
use crate::gram::GramMatrix;
use crate::hnf::hnf_basis;
use crate::lattice::{Lattice, Provenance};
use crate::ratmat::{Rat, RatMat};
use num_bigint::BigInt;
use num_traits::Zero;

pub const CATALOG_NAMES: &[&str] = &[
    "Zn", "A2", "D4", "E6", "E7", "E8", "K12", "BW16", "Leech", "BW32",
];

/// Look up a catalog lattice. `Zn` takes the dimension parameter; all other
/// names ignore it.
pub fn catalog_lattice(name: &str, dim: Option<usize>) -> Result<Lattice> {
    let canonical = CATALOG_NAMES
        .iter()
        .find(|c| c.eq_ignore_ascii_case(name.trim()));
    let Some(&canonical) = canonical else {
        return Err(Error::UnknownLattice(
            name.to_string(),
            CATALOG_NAMES.join(", "),
        ));
    };
    match canonical {
        "Zn" => {
            let n = dim.ok_or_else(|| {
                Error::Domain("Zn requires a dimension (--dim n, n >= 1)".into())
            })?;
            if n == 0 {
                return Err(Error::Domain("Zn requires n >= 1".into()));
            }
            zn(n)
        }
        "A2" => from_rows("A2", &[vec![2, 1], vec![1, 2]], true),
        "D4" => from_rows(
            "D4",
            &[
                vec![2, -1, 0, 0],
                vec![-1, 2, -1, -1],
                vec![0, -1, 2, 0],
                vec![0, -1, 0, 2],
            ],
            true,
        ),
        "E6" => from_rows("E6", &cartan_e(6), true),
        "E7" => from_rows("E7", &cartan_e(7), true),
        "E8" => from_rows("E8", &cartan_e(8), true),
        "K12" => coxeter_todd(),
        "BW16" => barnes_wall(4),
        "BW32" => barnes_wall(5),
        "Leech" => leech(),
        _ => unreachable!(),
    }
}

pub fn zn(n: usize) -> Result<Lattice> {
    let rows: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect();
    from_rows(&format!("Z{}", n), &rows, false)
}

fn from_rows(name: &str, rows: &[Vec<i64>], even: bool) -> Result<Lattice> {
    let gram = GramMatrix::from_i64_rows(rows)?;
    if even {
        debug_assert!(gram.is_even());
    }
    Ok(Lattice::new(
        name,
        gram,
        Provenance::Catalog {
            name: name.to_string(),
            even,
        },
    ))
}

/// Cartan matrix of E6/E7/E8 in Bourbaki numbering: the chain
/// 1-3-4-5-6(-7-8) with node 2 attached to node 4.
fn cartan_e(n: usize) -> Vec<Vec<i64>> {
    assert!((6..=8).contains(&n));
    let mut m = vec![vec![0i64; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 2;
    }
    let mut edges: Vec<(usize, usize)> = vec![(1, 3), (3, 4), (4, 5), (2, 4)];
    for v in 5..n {
        edges.push((v, v + 1));
    }
    for (a, b) in edges {
        m[a - 1][b - 1] = -1;
        m[b - 1][a - 1] = -1;
    }
    m
}

/// The hexacode over F4 = {0, 1, w, w2}: codewords (a, b, c, f(1), f(w),
/// f(w2)) for f(x) = a x^2 + b x + c. Entries encoded 0..=3.
const F4_ZERO: u8 = 0;
const F4_ONE: u8 = 1;
const F4_W: u8 = 2;
const F4_W2: u8 = 3;

fn f4_mul(a: u8, b: u8) -> u8 {
    match (a, b) {
        (0, _) | (_, 0) => 0,
        (1, x) | (x, 1) => x,
        (2, 2) => 3,
        (2, 3) | (3, 2) => 1,
        (3, 3) => 2,
        _ => unreachable!(),
    }
}

fn hexacode_basis() -> [[u8; 6]; 3] {
    let eval = |a: u8, b: u8, c: u8| -> [u8; 6] {
        let f = |x: u8| {
            let x2 = f4_mul(x, x);
            f4_add(f4_add(f4_mul(a, x2), f4_mul(b, x)), c)
        };
        [a, b, c, f(F4_ONE), f(F4_W), f(F4_W2)]
    };
    [
        eval(F4_ONE, F4_ZERO, F4_ZERO),
        eval(F4_ZERO, F4_ONE, F4_ZERO),
        eval(F4_ZERO, F4_ZERO, F4_ONE),
    ]
}

fn f4_add(a: u8, b: u8) -> u8 {
    // F4 addition is xor in the {0, 1, w, w2} = {00, 01, 10, 11} encoding.
    a ^ b
}

/// Coxeter-Todd lattice K12: Eisenstein lattice {x in Z[w]^6 : x mod 2 in
/// hexacode}, realized over the real basis (1, w) per coordinate. The real
/// Gram of Z[w] in that basis is [[1, -1/2], [-1/2, 1]].
fn coxeter_todd() -> Result<Lattice> {
    // F4 symbol -> (a, b) coordinates of a lift a + b*w in Z[w].
    // w2 = -1 - w lifts to (1, 1) mod 2.
    let lift = |s: u8| -> (i64, i64) {
        match s {
            0 => (0, 0),
            1 => (1, 0),
            2 => (0, 1),
            3 => (1, 1),
            _ => unreachable!(),
        }
    };
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    let push_word = |rows: &mut Vec<Vec<BigInt>>, word: &[u8; 6]| {
        let mut row = vec![BigInt::zero(); 12];
        for (t, &s) in word.iter().enumerate() {
            let (a, b) = lift(s);
            row[2 * t] = a.into();
            row[2 * t + 1] = b.into();
        }
        rows.push(row);
    };
    for g in hexacode_basis() {
        push_word(&mut rows, &g);
        // w * g keeps the F4 span closed under the module action.
        let wg: [u8; 6] = std::array::from_fn(|i| f4_mul(F4_W, g[i]));
        push_word(&mut rows, &wg);
    }
    // The sublattice 2 Z[w]^6.
    for k in 0..12 {
        let mut row = vec![BigInt::zero(); 12];
        row[k] = 2.into();
        rows.push(row);
    }
    let basis = hnf_basis(rows, 12);
    if basis.len() != 12 {
        return Err(Error::Domain("K12 generators span deficient rank".into()));
    }
    // Real Gram of Z[w]^6: block diagonal [[1,-1/2],[-1/2,1]], then
    // G = C G0 C'. Work over rationals with denominator 2.
    let half = Rat::new(1.into(), 2.into());
    let g0 = |i: usize, j: usize| -> Rat {
        if i == j {
            Rat::from_integer(1.into())
        } else if i / 2 == j / 2 {
            -&half
        } else {
            Rat::zero()
        }
    };
    let mut gram = RatMat::zero(12);
    for i in 0..12 {
        for j in 0..=i {
            let mut s = Rat::zero();
            for p in 0..12 {
                if basis[i][p].is_zero() {
                    continue;
                }
                let bi = Rat::from_integer(basis[i][p].clone());
                for q in 0..12 {
                    if basis[j][q].is_zero() {
                        continue;
                    }
                    let g = g0(p, q);
                    if g.is_zero() {
                        continue;
                    }
                    s += &bi * &g * Rat::from_integer(basis[j][q].clone());
                }
            }
            gram[(i, j)] = s.clone();
            gram[(j, i)] = s;
        }
    }
    let gram = GramMatrix::new(gram)?;
    if !gram.is_integral() || !gram.is_even() {
        return Err(Error::Domain(
            "K12 construction produced a non-even Gram matrix".into(),
        ));
    }
    Ok(Lattice::new(
        "K12",
        gram,
        Provenance::Catalog {
            name: "K12".into(),
            even: true,
        },
    ))
}

/// Leech lattice in the sqrt(8)-scaled integer frame: x in Z^24 lies in the
/// frame iff (even coset) x == 2c mod 4 for a Golay word c with sum x = 0 mod
/// 8, or (odd coset) x == (-3, 1, ..., 1) + even coset. Norm = |x|^2 / 8.
fn leech() -> Result<Lattice> {
    let code = GolayCode::new();
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    // 2c for the twelve Golay basis words (all weights are multiples of 4,
    // so the mod-8 sum condition holds automatically).
    for w in code.basis() {
        let mut row = vec![BigInt::zero(); 24];
        for (t, r) in row.iter_mut().enumerate() {
            if w >> t & 1 == 1 {
                *r = 2.into();
            }
        }
        rows.push(row);
    }
    // The sublattice {x == 0 mod 4, sum x == 0 mod 8}: generated by 8 e_0 and
    // 4 e_0 + 4 e_i.
    let mut row = vec![BigInt::zero(); 24];
    row[0] = 8.into();
    rows.push(row);
    for i in 1..24 {
        let mut row = vec![BigInt::zero(); 24];
        row[0] = 4.into();
        row[i] = 4.into();
        rows.push(row);
    }
    // The odd-coset generator (-3, 1, ..., 1).
    let mut row = vec![BigInt::from(1); 24];
    row[0] = (-3).into();
    rows.push(row);

    let basis = hnf_basis(rows, 24);
    if basis.len() != 24 {
        return Err(Error::Domain("Leech generators span deficient rank".into()));
    }
    let eighth = Rat::new(1.into(), 8.into());
    let mut gram = RatMat::zero(24);
    for i in 0..24 {
        for j in 0..=i {
            let mut s = BigInt::zero();
            for t in 0..24 {
                s += &basis[i][t] * &basis[j][t];
            }
            let v = Rat::from_integer(s) * &eighth;
            gram[(i, j)] = v.clone();
            gram[(j, i)] = v;
        }
    }
    let gram = GramMatrix::new(gram)?;
    if !gram.is_integral() || !gram.is_even() {
        return Err(Error::Domain(
            "Leech construction produced a non-even Gram matrix".into(),
        ));
    }
    Ok(Lattice::new(
        "Leech",
        gram,
        Provenance::Catalog {
            name: "Leech".into(),
            even: true,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratmat::rat_from_i64;
    use crate::shells::{first_k_shell_data, EnumConfig};

    #[test]
    fn unknown_name_lists_catalog() {
        let err = catalog_lattice("nosuch", None).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("A2") && msg.contains("Leech"), "{msg}");
    }

    #[test]
    fn zn_requires_dim() {
        assert!(catalog_lattice("Zn", None).is_err());
        let l = catalog_lattice("Zn", Some(4)).unwrap();
        assert_eq!(l.dim(), 4);
        assert_eq!(l.det(), rat_from_i64(1));
    }

    #[test]
    fn root_lattice_invariants() {
        for (name, det, kissing) in [("A2", 3, 6), ("D4", 4, 24), ("E6", 3, 72), ("E7", 2, 126), ("E8", 1, 240)] {
            let l = catalog_lattice(name, None).unwrap();
            assert_eq!(l.det(), rat_from_i64(det), "{name} det");
            let d = first_k_shell_data(&l.gram, 1, EnumConfig::default()).unwrap();
            assert_eq!(d[0].norm, rat_from_i64(2), "{name} min norm");
            assert_eq!(d[0].count, kissing as u64, "{name} kissing");
        }
    }

    #[test]
    fn k12_det_min_kissing() {
        let l = catalog_lattice("K12", None).unwrap();
        assert_eq!(l.det(), rat_from_i64(729));
        assert!(l.gram.is_even());
        let d = first_k_shell_data(&l.gram, 1, EnumConfig::default()).unwrap();
        assert_eq!(d[0].norm, rat_from_i64(4));
        assert_eq!(d[0].count, 756);
    }

    #[test]
    fn leech_det_min_kissing() {
        let l = catalog_lattice("Leech", None).unwrap();
        assert_eq!(l.det(), rat_from_i64(1));
        assert!(l.gram.is_even());
        let d = first_k_shell_data(&l.gram, 1, EnumConfig::default()).unwrap();
        assert_eq!(d[0].norm, rat_from_i64(4));
        assert_eq!(d[0].count, 196_560);
    }
}
