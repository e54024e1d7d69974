//! Lattices: a named exact Gram matrix plus scale metadata and provenance.

use crate::error::{Error, Result};
use crate::gram::{rat_f64, FloatForm, GramMatrix};
use crate::ratmat::Rat;
use num_traits::{One, Signed};

/// Scale factor lambda^2 applied to the exact Gram matrix when a rescaled
/// copy is analyzed. Kept symbolic so exact certificates are never polluted
/// by irrational numbers; it is evaluated in floating point only at
/// evaluation time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scale {
    /// Exact rational multiplier.
    Rational(Rat),
    /// det(gram)^(num/den); covolume-one rescaling uses num = -1, den = n.
    DetPower { num: i64, den: u32 },
}

impl Scale {
    pub fn one() -> Self {
        Scale::Rational(Rat::one())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Scale::Rational(r) if r.is_one())
    }

    /// lambda^2 as a float, given det(gram).
    pub fn to_f64(&self, det: &Rat) -> f64 {
        match self {
            Scale::Rational(r) => rat_f64(r),
            Scale::DetPower { num, den } => {
                rat_f64(det).powf(*num as f64 / *den as f64)
            }
        }
    }

    /// ln(lambda^2), given det(gram).
    pub fn ln(&self, det: &Rat) -> f64 {
        match self {
            Scale::Rational(r) => rat_f64(r).ln(),
            Scale::DetPower { num, den } => {
                (*num as f64 / *den as f64) * rat_f64(det).ln()
            }
        }
    }
}

/// Construction record for reproducibility.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Catalog { name: String, even: bool },
    File(String),
    BarnesWall(u32),
    DualOf(String),
    Rescaled(String),
}

#[derive(Debug, Clone)]
pub struct Lattice {
    pub name: String,
    pub gram: GramMatrix,
    pub scale: Scale,
    pub provenance: Provenance,
}

impl Lattice {
    pub fn new(name: impl Into<String>, gram: GramMatrix, provenance: Provenance) -> Self {
        Lattice {
            name: name.into(),
            gram,
            scale: Scale::one(),
            provenance,
        }
    }

    pub fn dim(&self) -> usize {
        self.gram.dim()
    }

    /// Determinant of the unscaled exact Gram matrix.
    pub fn det(&self) -> Rat {
        self.gram.det()
    }

    /// lambda^2 as f64.
    pub fn scale_f64(&self) -> f64 {
        self.scale.to_f64(&self.det())
    }

    /// The working form lambda^2 * gram as floats.
    pub fn working_form(&self) -> FloatForm {
        FloatForm::from_gram(&self.gram).scaled(self.scale_f64())
    }

    /// Dual lattice: Gram matrix inverted exactly. dual(dual(L)) has the same
    /// Gram as L. The scale inverts as well (dual of lambda L is lambda^-1 L*).
    pub fn dual(&self) -> Lattice {
        let scale = match &self.scale {
            Scale::Rational(r) => Scale::Rational(r.recip()),
            Scale::DetPower { num, den } => Scale::DetPower {
                num: -num,
                den: *den,
            },
        };
        Lattice {
            name: format!("{}*", self.name),
            gram: self.gram.inverse(),
            scale,
            provenance: Provenance::DualOf(self.name.clone()),
        }
    }

    /// Attach the symbolic scale det^(-1/n) so the working form has
    /// determinant one. Idempotent: the exact gram is unchanged and the scale
    /// is recomputed from it.
    pub fn rescale_to_covolume_one(&self) -> Lattice {
        let det = self.det();
        let scale = if det.is_one() {
            Scale::one()
        } else {
            Scale::DetPower {
                num: -1,
                den: self.dim() as u32,
            }
        };
        Lattice {
            name: self.name.clone(),
            gram: self.gram.clone(),
            scale,
            provenance: Provenance::Rescaled(self.name.clone()),
        }
    }

    /// Multiply the exact Gram matrix by a positive rational (a genuinely new
    /// exact lattice, unlike the symbolic `scale`).
    pub fn scaled_gram(&self, c: &Rat) -> Result<Lattice> {
        if !c.is_positive() {
            return Err(Error::Domain("scale must be positive".into()));
        }
        Ok(Lattice {
            name: format!("{}x{}", self.name, c),
            gram: self.gram.scale(c)?,
            scale: self.scale.clone(),
            provenance: Provenance::Rescaled(self.name.clone()),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratmat::rat_from_i64;

    fn a2() -> Lattice {
        Lattice::new(
            "A2",
            GramMatrix::from_i64_rows(&[vec![2, 1], vec![1, 2]]).unwrap(),
            Provenance::Catalog {
                name: "A2".into(),
                even: true,
            },
        )
    }

    #[test]
    fn dual_of_dual_is_identity() {
        let l = a2();
        assert_eq!(l.dual().dual().gram, l.gram);
    }

    #[test]
    fn det_times_dual_det_is_one() {
        let l = a2();
        assert_eq!(&l.det() * &l.dual().det(), rat_from_i64(1));
    }

    #[test]
    fn rescale_is_idempotent_and_det_one() {
        let l = a2().rescale_to_covolume_one();
        let l2 = l.rescale_to_covolume_one();
        assert_eq!(l.scale, l2.scale);
        assert_eq!(l.gram, l2.gram);
        // working form determinant ~ 1
        let f = l.working_form();
        let det = f.mat[0] * f.mat[3] - f.mat[1] * f.mat[2];
        assert!((det - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zn_rescale_is_noop() {
        let l = Lattice::new(
            "Z2",
            GramMatrix::from_i64_rows(&[vec![1, 0], vec![0, 1]]).unwrap(),
            Provenance::Catalog {
                name: "Zn".into(),
                even: false,
            },
        );
        let r = l.rescale_to_covolume_one();
        assert!(r.scale.is_one());
    }
}
