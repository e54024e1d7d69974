//! Exact Gram matrices of positive definite quadratic forms.

use crate::error::{Error, Result};
use crate::ratmat::{rat_to_f64, Rat, RatMat};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Symmetric positive definite matrix with exact rational entries; the form
/// `A` with `A[x] = x' A x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GramMatrix {
    mat: RatMat,
}

impl GramMatrix {
    /// Validates symmetry and positive definiteness (all leading principal
    /// minors positive, testable exactly over the rationals).
    pub fn new(mat: RatMat) -> Result<Self> {
        if mat.n == 0 {
            return Err(Error::Domain("empty Gram matrix".into()));
        }
        if !mat.is_symmetric() {
            return Err(Error::Domain("Gram matrix is not symmetric".into()));
        }
        for (k, minor) in mat.leading_principal_minors().iter().enumerate() {
            if !minor.is_positive() {
                return Err(Error::Domain(format!(
                    "Gram matrix is not positive definite (leading minor {} is {})",
                    k + 1,
                    minor
                )));
            }
        }
        Ok(GramMatrix { mat })
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(RatMat::from_i64_rows(rows))
    }

    pub fn dim(&self) -> usize {
        self.mat.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &Rat {
        &self.mat[(i, j)]
    }

    pub fn matrix(&self) -> &RatMat {
        &self.mat
    }

    pub fn det(&self) -> Rat {
        self.mat.det()
    }

    /// Exact inverse (the Gram matrix of the dual basis).
    pub fn inverse(&self) -> GramMatrix {
        GramMatrix {
            mat: self.mat.inverse(),
        }
    }

    /// A[x] for integer coordinates, exact.
    pub fn evaluate(&self, x: &[BigInt]) -> Rat {
        self.mat.quadratic_form(x)
    }

    /// Multiply by an exact positive rational.
    pub fn scale(&self, c: &Rat) -> Result<GramMatrix> {
        if !c.is_positive() {
            return Err(Error::Domain("scale factor must be positive".into()));
        }
        let mut m = self.mat.clone();
        for v in m.a.iter_mut() {
            *v *= c;
        }
        GramMatrix::new(m)
    }

    /// All entries integers.
    pub fn is_integral(&self) -> bool {
        self.mat.a.iter().all(|v| v.denom().is_one())
    }

    /// Even lattice test on the generating set: diagonal entries even
    /// integers, off-diagonal entries integral. That makes every x' A x even.
    pub fn is_even(&self) -> bool {
        if !self.is_integral() {
            return false;
        }
        (0..self.dim()).all(|i| (self.entry(i, i).numer() % BigInt::from(2)).is_zero())
    }

    /// Cleared-denominator integer form: (d, G) with A = G/d, as i64 if it fits.
    pub fn int_form_i64(&self) -> Option<IntForm> {
        let (d, ints) = self.mat.clear_denominators();
        let den = d.to_i64()?;
        let mut mat = Vec::with_capacity(ints.len());
        for v in &ints {
            mat.push(v.to_i64()?);
        }
        Some(IntForm {
            n: self.dim(),
            den,
            mat,
        })
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.mat.to_f64()
    }

    /// Congruent transform U' A U by an integer matrix with |det U| = 1.
    pub fn congruence_i64(&self, u: &[Vec<i64>]) -> Result<GramMatrix> {
        GramMatrix::new(self.mat.congruence_i64(u))
    }
}

/// Integer-cleared form A = mat/den with i64 entries, for the enumeration and
/// moment hot paths.
#[derive(Debug, Clone)]
pub struct IntForm {
    pub n: usize,
    pub den: i64,
    pub mat: Vec<i64>,
}

impl IntForm {
    /// x' G x (numerator of den * A[x]), panics on overflow in debug builds;
    /// callers bound coordinates beforehand.
    #[inline]
    pub fn eval(&self, x: &[i64]) -> i64 {
        let n = self.n;
        let mut acc = 0i64;
        for i in 0..n {
            let xi = x[i];
            if xi == 0 {
                continue;
            }
            let row = &self.mat[i * n..(i + 1) * n];
            let mut dot = 0i64;
            for j in 0..n {
                dot += row[j] * x[j];
            }
            acc += xi * dot;
        }
        acc
    }

    pub fn to_rat(&self, numerator: i64) -> Rat {
        Rat::new(numerator.into(), self.den.into())
    }
}

/// Floating-point view of a symmetric form; used for pruning and for
/// perturbed (non-rational) forms along deformation paths.
#[derive(Debug, Clone)]
pub struct FloatForm {
    pub n: usize,
    pub mat: Vec<f64>,
}

impl FloatForm {
    pub fn from_gram(g: &GramMatrix) -> Self {
        FloatForm {
            n: g.dim(),
            mat: g.to_f64(),
        }
    }

    #[inline]
    pub fn eval(&self, x: &[i64]) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            let xi = x[i] as f64;
            if xi == 0.0 {
                continue;
            }
            let row = &self.mat[i * n..(i + 1) * n];
            let mut dot = 0.0;
            for j in 0..n {
                dot += row[j] * x[j] as f64;
            }
            acc += xi * dot;
        }
        acc
    }

    pub fn scaled(&self, c: f64) -> FloatForm {
        FloatForm {
            n: self.n,
            mat: self.mat.iter().map(|v| v * c).collect(),
        }
    }
}

pub fn rat_f64(r: &Rat) -> f64 {
    rat_to_f64(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratmat::rat_from_i64;

    #[test]
    fn rejects_asymmetric() {
        let m = RatMat::from_i64_rows(&[vec![2, 1], vec![0, 2]]);
        assert!(GramMatrix::new(m).is_err());
    }

    #[test]
    fn rejects_indefinite() {
        let m = RatMat::from_i64_rows(&[vec![1, 2], vec![2, 1]]);
        assert!(GramMatrix::new(m).is_err());
    }

    #[test]
    fn evaluates_form() {
        let g = GramMatrix::from_i64_rows(&[vec![2, 1], vec![1, 2]]).unwrap();
        let x = vec![BigInt::from(1), BigInt::from(-1)];
        assert_eq!(g.evaluate(&x), rat_from_i64(2));
        assert!(g.is_even());
        assert!(g.is_integral());
    }

    #[test]
    fn inverse_det_product_is_one() {
        let g = GramMatrix::from_i64_rows(&[
            vec![2, -1, 0, 0],
            vec![-1, 2, -1, -1],
            vec![0, -1, 2, 0],
            vec![0, -1, 0, 2],
        ])
        .unwrap();
        let d = g.det();
        let dd = g.inverse().det();
        assert_eq!(&d * &dd, rat_from_i64(1));
    }

    #[test]
    fn int_form_matches_rational_eval() {
        let third = Rat::new(1.into(), 3.into());
        let m = RatMat::from_rows(vec![
            vec![&rat_from_i64(2) * &third, -&third],
            vec![-&third, &rat_from_i64(2) * &third],
        ]);
        let g = GramMatrix::new(m).unwrap();
        let f = g.int_form_i64().unwrap();
        assert_eq!(f.den, 3);
        let x = [2i64, 1];
        let bx: Vec<BigInt> = x.iter().map(|&v| v.into()).collect();
        assert_eq!(f.to_rat(f.eval(&x)), g.evaluate(&bx));
    }
}
