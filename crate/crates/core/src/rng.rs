//! Deterministic seeded randomness (splitmix64) for reproducible tangent
//! directions: the seed fully determines every random direction.

use crate::linalg::{tangent_project, SymMat};

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in [-1, 1].
    pub fn next_unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 52) as f64 * 2.0 - 1.0
    }
}

/// Seeded random tangent direction at A: symmetric entries uniform in
/// [-1,1], projected onto {H : Tr(A^-1 H) = 0}, normalized to Frobenius
/// norm 1.
pub fn random_tangent_direction(seed: u64, a_inv: &SymMat) -> SymMat {
    let n = a_inv.n;
    let mut rng = SplitMix64::new(seed);
    let mut s = SymMat::zero(n);
    for i in 0..n {
        for j in i..n {
            let v = rng.next_unit();
            s.set(i, j, v);
            s.set(j, i, v);
        }
    }
    let h = tangent_project(a_inv, &s);
    let norm = h.frobenius();
    h.scaled(1.0 / norm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_determines_direction() {
        let a_inv = SymMat::identity(3);
        let h1 = random_tangent_direction(7, &a_inv);
        let h2 = random_tangent_direction(7, &a_inv);
        assert_eq!(h1.a, h2.a);
        let h3 = random_tangent_direction(8, &a_inv);
        assert!(h1.a != h3.a);
    }

    #[test]
    fn direction_is_tangent_and_unit() {
        let a_inv = SymMat::identity(4);
        let h = random_tangent_direction(42, &a_inv);
        assert!(a_inv.trace_product(&h).abs() < 1e-12);
        assert!((h.frobenius() - 1.0).abs() < 1e-12);
    }
}
