//! Dense symmetric float matrices: Jacobi eigendecomposition, the
//! determinant-one exponential map, and tangent-space projection.

use crate::gram::{FloatForm, GramMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct SymMat {
    pub n: usize,
    pub a: Vec<f64>,
}

impl SymMat {
    pub fn zero(n: usize) -> Self {
        SymMat {
            n,
            a: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.a[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_gram(g: &GramMatrix) -> Self {
        SymMat {
            n: g.dim(),
            a: g.to_f64(),
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        SymMat {
            n,
            a: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] = v;
    }

    pub fn to_float_form(&self) -> FloatForm {
        FloatForm {
            n: self.n,
            mat: self.a.clone(),
        }
    }

    pub fn scaled(&self, c: f64) -> SymMat {
        SymMat {
            n: self.n,
            a: self.a.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add_scaled(&self, other: &SymMat, c: f64) -> SymMat {
        SymMat {
            n: self.n,
            a: self
                .a
                .iter()
                .zip(&other.a)
                .map(|(x, y)| x + c * y)
                .collect(),
        }
    }

    pub fn matmul(&self, other: &SymMat) -> SymMat {
        let n = self.n;
        let mut out = SymMat::zero(n);
        for i in 0..n {
            for k in 0..n {
                let v = self.a[i * n + k];
                if v == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.a[i * n + j] += v * other.a[k * n + j];
                }
            }
        }
        out
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.at(i, i)).sum()
    }

    /// <A, B> = Tr(AB) for symmetric A, B.
    pub fn trace_product(&self, other: &SymMat) -> f64 {
        self.a.iter().zip(&other.a).map(|(x, y)| x * y).sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.a.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Symmetrize (numerical hygiene after products).
    pub fn symmetrized(&self) -> SymMat {
        let n = self.n;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                let v = 0.5 * (self.at(i, j) + self.at(j, i));
                out.set(i, j, v);
            }
        }
        out
    }

    pub fn det(&self) -> f64 {
        let (evals, _) = jacobi_eigen(self);
        evals.iter().product()
    }

    pub fn inverse(&self) -> SymMat {
        let (evals, q) = jacobi_eigen(self);
        reassemble(&q, &evals.iter().map(|&v| 1.0 / v).collect::<Vec<_>>())
    }
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns
/// (eigenvalues, column eigenvector matrix Q) with A = Q diag Q'.
pub fn jacobi_eigen(m: &SymMat) -> (Vec<f64>, SymMat) {
    let n = m.n;
    let mut a = m.clone();
    let mut q = SymMat::identity(n);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a.at(i, j).abs();
            }
        }
        if off < 1e-300 || off < 1e-15 * a.frobenius() {
            break;
        }
        for p in 0..n {
            for r in (p + 1)..n {
                let apr = a.at(p, r);
                if apr.abs() < 1e-300 {
                    continue;
                }
                let app = a.at(p, p);
                let arr = a.at(r, r);
                let theta = 0.5 * (arr - app) / apr;
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a.at(k, p);
                    let akr = a.at(k, r);
                    a.set(k, p, c * akp - s * akr);
                    a.set(k, r, s * akp + c * akr);
                }
                for k in 0..n {
                    let apk = a.at(p, k);
                    let ark = a.at(r, k);
                    a.set(p, k, c * apk - s * ark);
                    a.set(r, k, s * apk + c * ark);
                }
                for k in 0..n {
                    let qkp = q.at(k, p);
                    let qkr = q.at(k, r);
                    q.set(k, p, c * qkp - s * qkr);
                    q.set(k, r, s * qkp + c * qkr);
                }
            }
        }
    }
    ((0..n).map(|i| a.at(i, i)).collect(), q)
}

/// Q diag(vals) Q'.
fn reassemble(q: &SymMat, vals: &[f64]) -> SymMat {
    let n = q.n;
    let mut out = SymMat::zero(n);
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                s += q.at(i, k) * vals[k] * q.at(j, k);
            }
            out.set(i, j, s);
        }
    }
    out
}

/// Symmetric square root and inverse square root of a positive definite
/// matrix.
pub fn sqrt_and_inv_sqrt(a: &SymMat) -> (SymMat, SymMat) {
    let (evals, q) = jacobi_eigen(a);
    assert!(
        evals.iter().all(|&v| v > 0.0),
        "matrix not positive definite in sqrt"
    );
    let r = reassemble(&q, &evals.iter().map(|&v| v.sqrt()).collect::<Vec<_>>());
    let ri = reassemble(
        &q,
        &evals.iter().map(|&v| 1.0 / v.sqrt()).collect::<Vec<_>>(),
    );
    (r, ri)
}

/// Determinant-preserving exponential map e_A(tH) = A exp(t A^-1 H),
/// computed through the symmetric route A^1/2 exp(t A^-1/2 H A^-1/2) A^1/2.
/// Requires Tr(A^-1 H) ~ 0 for det preservation but evaluates regardless.
pub fn exp_map(a: &SymMat, h: &SymMat, t: f64) -> SymMat {
    let (rt, rti) = sqrt_and_inv_sqrt(a);
    let s = rti.matmul(h).matmul(&rti).symmetrized();
    let (evals, q) = jacobi_eigen(&s);
    let e = reassemble(&q, &evals.iter().map(|&v| (t * v).exp()).collect::<Vec<_>>());
    rt.matmul(&e).matmul(&rt).symmetrized()
}

/// Projection of a symmetric matrix onto the tangent space at A:
/// H = S - (<A^-1, S>/<A^-1, A^-1>) A^-1, so Tr(A^-1 H) = 0.
pub fn tangent_project(a_inv: &SymMat, s: &SymMat) -> SymMat {
    let num = a_inv.trace_product(s);
    let den = a_inv.trace_product(a_inv);
    s.add_scaled(a_inv, -num / den)
}

/// Tr((A^-1 H)^2), the quadratic-coefficient normalizer of the variation
/// formulas.
pub fn trace_ainv_h_squared(a_inv: &SymMat, h: &SymMat) -> f64 {
    let m = a_inv.matmul(h);
    let n = m.n;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += m.at(i, j) * m.at(j, i);
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d4() -> SymMat {
        SymMat::from_rows(&[
            vec![2.0, -1.0, 0.0, 0.0],
            vec![-1.0, 2.0, -1.0, -1.0],
            vec![0.0, -1.0, 2.0, 0.0],
            vec![0.0, -1.0, 0.0, 2.0],
        ])
    }

    #[test]
    fn jacobi_recovers_matrix() {
        let a = d4();
        let (evals, q) = jacobi_eigen(&a);
        let re = reassemble(&q, &evals);
        for (x, y) in a.a.iter().zip(&re.a) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!((a.det() - 4.0).abs() < 1e-10);
    }

    #[test]
    fn exp_map_at_zero_is_identity_map() {
        let a = d4();
        let h = SymMat::from_rows(&[
            vec![0.3, 0.1, 0.0, 0.0],
            vec![0.1, -0.2, 0.05, 0.0],
            vec![0.0, 0.05, 0.1, 0.0],
            vec![0.0, 0.0, 0.0, -0.2],
        ]);
        let b = exp_map(&a, &h, 0.0);
        for (x, y) in a.a.iter().zip(&b.a) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn exp_map_preserves_det_for_tangent_h() {
        let a = d4();
        let ainv = a.inverse();
        let s = SymMat::from_rows(&[
            vec![0.7, 0.2, -0.1, 0.0],
            vec![0.2, -0.4, 0.3, 0.1],
            vec![-0.1, 0.3, 0.5, -0.2],
            vec![0.0, 0.1, -0.2, -0.3],
        ]);
        let h = tangent_project(&ainv, &s);
        assert!(ainv.trace_product(&h).abs() < 1e-12 * h.frobenius());
        let b = exp_map(&a, &h, 0.1);
        assert!(((b.det() - a.det()) / a.det()).abs() < 1e-10);
        // idempotence of the projection
        let h2 = tangent_project(&ainv, &h);
        for (x, y) in h.a.iter().zip(&h2.a) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn exp_map_base_identity_is_plain_exp() {
        // (I, H traceless): e_I(tH) = exp(tH), det 1.
        let a = SymMat::identity(2);
        let h = SymMat::from_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]]);
        let b = exp_map(&a, &h, 0.5);
        assert!((b.at(0, 0) - 0.5f64.exp()).abs() < 1e-12);
        assert!((b.at(1, 1) - (-0.5f64).exp()).abs() < 1e-12);
        assert!((b.det() - 1.0).abs() < 1e-12);
    }
}
