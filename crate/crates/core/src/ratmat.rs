//! Exact linear algebra over the rationals.
//!
//! Everything here is small and dense (n <= 32 for the lattices this crate
//! handles), so plain fraction Gaussian elimination is fine; determinants use
//! fraction-free Bareiss on a cleared-denominator integer copy to keep
//! intermediate growth polynomial.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;

/// Dense square rational matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMat {
    pub n: usize,
    pub a: Vec<Rat>,
}

impl RatMat {
    pub fn zero(n: usize) -> Self {
        RatMat {
            n,
            a: vec![Rat::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n));
        RatMat {
            n,
            a: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Rat::from_integer(v.into())).collect())
                .collect(),
        )
    }

    pub fn is_symmetric(&self) -> bool {
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self[(i, j)] != self[(j, i)] {
                    return false;
                }
            }
        }
        true
    }

    /// x' M x evaluated exactly.
    pub fn quadratic_form(&self, x: &[BigInt]) -> Rat {
        let n = self.n;
        let mut acc = Rat::zero();
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            let xi = Rat::from_integer(x[i].clone());
            for j in 0..n {
                if x[j].is_zero() {
                    continue;
                }
                acc += &self[(i, j)] * &xi * Rat::from_integer(x[j].clone());
            }
        }
        acc
    }

    /// Clear denominators: returns (d, M_int) with M = M_int / d, d > 0.
    pub fn clear_denominators(&self) -> (BigInt, Vec<BigInt>) {
        let mut d = BigInt::one();
        for e in &self.a {
            d = d.lcm(e.denom());
        }
        let ints = self
            .a
            .iter()
            .map(|e| e.numer() * (&d / e.denom()))
            .collect();
        (d, ints)
    }

    /// Exact determinant (fraction-free Bareiss on the cleared-denominator copy).
    pub fn det(&self) -> Rat {
        let (d, ints) = self.clear_denominators();
        let det_int = bareiss_det(self.n, ints);
        Rat::new(det_int, d.pow(self.n as u32))
    }

    /// Leading principal minors det(M[..k][..k]) for k = 1..=n.
    pub fn leading_principal_minors(&self) -> Vec<Rat> {
        (1..=self.n)
            .map(|k| {
                let mut sub = RatMat::zero(k);
                for i in 0..k {
                    for j in 0..k {
                        sub[(i, j)] = self[(i, j)].clone();
                    }
                }
                sub.det()
            })
            .collect()
    }

    /// Exact inverse by Gauss-Jordan. Panics on singular input; callers are
    /// expected to hold positive definite matrices.
    pub fn inverse(&self) -> RatMat {
        let n = self.n;
        let mut m = self.a.clone();
        let mut inv = RatMat::identity(n);
        for col in 0..n {
            let pivot_row = (col..n)
                .find(|&r| !m[r * n + col].is_zero())
                .expect("matrix is singular");
            if pivot_row != col {
                for j in 0..n {
                    m.swap(col * n + j, pivot_row * n + j);
                    inv.a.swap(col * n + j, pivot_row * n + j);
                }
            }
            let p = m[col * n + col].clone();
            for j in 0..n {
                m[col * n + j] /= &p;
                inv.a[col * n + j] /= &p;
            }
            for r in 0..n {
                if r == col || m[r * n + col].is_zero() {
                    continue;
                }
                let f = m[r * n + col].clone();
                for j in 0..n {
                    let t = &m[col * n + j] * &f;
                    m[r * n + j] -= t;
                    let t = &inv.a[col * n + j] * &f;
                    inv.a[r * n + j] -= t;
                }
            }
        }
        inv
    }

    /// M -> U' M U for an integer matrix U (columns = new basis in old coords).
    pub fn congruence_i64(&self, u: &[Vec<i64>]) -> RatMat {
        let n = self.n;
        let ur: Vec<Rat> = (0..n)
            .flat_map(|i| (0..n).map(move |j| Rat::from_integer(u[i][j].into())))
            .collect();
        // tmp = M U
        let mut tmp = vec![Rat::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s = Rat::zero();
                for k in 0..n {
                    s += &self[(i, k)] * &ur[k * n + j];
                }
                tmp[i * n + j] = s;
            }
        }
        // out = U' tmp
        let mut out = RatMat::zero(n);
        for i in 0..n {
            for j in 0..n {
                let mut s = Rat::zero();
                for k in 0..n {
                    s += &ur[k * n + i] * &tmp[k * n + j];
                }
                out[(i, j)] = s;
            }
        }
        out
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.a.iter().map(rat_to_f64).collect()
    }
}

impl std::ops::Index<(usize, usize)> for RatMat {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.a[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.a[i * self.n + j]
    }
}

/// Fraction-free Bareiss determinant of an integer matrix.
fn bareiss_det(n: usize, mut m: Vec<BigInt>) -> BigInt {
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k * n + k].is_zero() {
            let Some(r) = ((k + 1)..n).find(|&r| !m[r * n + k].is_zero()) else {
                return BigInt::zero();
            };
            for j in 0..n {
                m.swap(k * n + j, r * n + j);
            }
            sign = -sign;
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let t = &m[i * n + j] * &m[k * n + k] - &m[i * n + k] * &m[k * n + j];
                m[i * n + j] = &t / &prev;
            }
            m[i * n + k] = BigInt::zero();
        }
        prev = m[k * n + k].clone();
    }
    let d = m[(n - 1) * n + (n - 1)].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// Rank of the span of a set of rational row vectors, by incremental
/// reduction against a growing echelon basis. Rows may number in the
/// thousands; the echelon basis stays at most `width` rows.
pub struct RankAccumulator {
    width: usize,
    /// (pivot column, reduced row) pairs, pivot columns strictly increasing.
    basis: Vec<(usize, Vec<Rat>)>,
}

impl RankAccumulator {
    pub fn new(width: usize) -> Self {
        RankAccumulator {
            width,
            basis: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.width
    }

    /// Reduce `row` against the basis; if a nonzero residue remains, insert
    /// it and report true.
    pub fn offer(&mut self, mut row: Vec<Rat>) -> bool {
        assert_eq!(row.len(), self.width);
        for (pc, b) in &self.basis {
            if !row[*pc].is_zero() {
                let f = row[*pc].clone();
                for j in *pc..self.width {
                    let t = &b[j] * &f;
                    row[j] -= t;
                }
            }
        }
        let Some(pc) = row.iter().position(|v| !v.is_zero()) else {
            return false;
        };
        let p = row[pc].clone();
        for v in row.iter_mut().skip(pc) {
            *v /= &p;
        }
        let pos = self.basis.partition_point(|(c, _)| *c < pc);
        self.basis.insert(pos, (pc, row));
        true
    }
}

/// Rank accumulator over the prime field Z/p. `rank_p <= rank_Q` always, so a
/// full mod-p rank certifies full rational rank exactly.
pub struct RankAccumulatorModP {
    width: usize,
    p: u64,
    basis: Vec<(usize, Vec<u64>)>,
}

impl RankAccumulatorModP {
    pub fn new(width: usize, p: u64) -> Self {
        RankAccumulatorModP {
            width,
            p,
            basis: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.width
    }

    pub fn offer(&mut self, mut row: Vec<u64>) -> bool {
        let p = self.p as u128;
        for (pc, b) in &self.basis {
            if row[*pc] != 0 {
                let f = row[*pc] as u128;
                for j in *pc..self.width {
                    let fb = f * b[j] as u128 % p;
                    row[j] = ((row[j] as u128 + p - fb) % p) as u64;
                }
            }
        }
        let Some(pc) = row.iter().position(|&v| v != 0) else {
            return false;
        };
        let inv = mod_inverse(row[pc], self.p);
        for v in row.iter_mut().skip(pc) {
            *v = ((*v as u128 * inv as u128) % p) as u64;
        }
        let pos = self.basis.partition_point(|(c, _)| *c < pc);
        self.basis.insert(pos, (pc, row));
        true
    }
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // p prime; Fermat.
    mod_pow(a, p - 2, p)
}

fn mod_pow(b: u64, mut e: u64, m: u64) -> u64 {
    let mm = m as u128;
    let mut acc: u128 = 1;
    let mut bb = b as u128 % mm;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * bb % mm;
        }
        bb = bb * bb % mm;
        e >>= 1;
    }
    acc as u64
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    // BigRational::to_f64 handles large numerators/denominators.
    num_traits::ToPrimitive::to_f64(r).expect("rational out of f64 range")
}

pub fn rat_from_i64(v: i64) -> Rat {
    Rat::from_integer(v.into())
}

/// Parse "p/q" or "p" into an exact rational.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().ok()?;
        let d: BigInt = den.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Rat::new(n, d))
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(Rat::from_integer(n))
    }
}

/// Canonical "p/q" form; integers render without the "/q".
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else if r.denom().is_negative() {
        // BigRational keeps denominators positive, but be defensive.
        format!("{}/{}", -r.numer(), -r.denom())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: i64) -> Rat {
        rat_from_i64(v)
    }

    #[test]
    fn det_and_inverse_small() {
        let m = RatMat::from_i64_rows(&[vec![2, 1], vec![1, 2]]);
        assert_eq!(m.det(), r(3));
        let inv = m.inverse();
        assert_eq!(inv[(0, 0)], Rat::new(2.into(), 3.into()));
        assert_eq!(inv[(0, 1)], Rat::new((-1).into(), 3.into()));
        // M * M^-1 = I via congruence check of quadratic forms
        let prod = {
            let mut p = RatMat::zero(2);
            for i in 0..2 {
                for j in 0..2 {
                    let mut s = Rat::zero();
                    for k in 0..2 {
                        s += &m[(i, k)] * &inv[(k, j)];
                    }
                    p[(i, j)] = s;
                }
            }
            p
        };
        assert_eq!(prod, RatMat::identity(2));
    }

    #[test]
    fn bareiss_matches_cofactor_3x3() {
        let m = RatMat::from_i64_rows(&[vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]]);
        assert_eq!(m.det(), r(4));
        let minors = m.leading_principal_minors();
        assert_eq!(minors, vec![r(2), r(3), r(4)]);
    }

    #[test]
    fn det_with_denominators() {
        let third = Rat::new(1.into(), 3.into());
        let m = RatMat::from_rows(vec![
            vec![&r(2) * &third, -&third],
            vec![-&third, &r(2) * &third],
        ]);
        assert_eq!(m.det(), third);
    }

    #[test]
    fn rank_accumulator_detects_dependencies() {
        let mut acc = RankAccumulator::new(3);
        assert!(acc.offer(vec![r(1), r(2), r(3)]));
        assert!(acc.offer(vec![r(0), r(1), r(1)]));
        assert!(!acc.offer(vec![r(1), r(3), r(4)]));
        assert_eq!(acc.rank(), 2);
        assert!(acc.offer(vec![r(0), r(0), r(7)]));
        assert!(acc.is_full());
    }

    #[test]
    fn rank_mod_p_agrees_on_generic_input() {
        let p = 2147483629u64;
        let mut acc = RankAccumulatorModP::new(3, p);
        assert!(acc.offer(vec![1, 2, 3]));
        assert!(acc.offer(vec![0, 1, 1]));
        assert!(!acc.offer(vec![1, 3, 4]));
        assert_eq!(acc.rank(), 2);
    }

    #[test]
    fn parse_format_roundtrip() {
        for s in ["3", "-4", "7/2", "-9/4", "0"] {
            let v = parse_rat(s).unwrap();
            assert_eq!(format_rat(&v), s);
        }
        assert_eq!(format_rat(&parse_rat("6/4").unwrap()), "3/2");
        assert!(parse_rat("1/0").is_none());
        assert!(parse_rat("x").is_none());
    }
}
