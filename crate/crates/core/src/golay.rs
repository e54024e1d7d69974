//! The extended binary Golay code [24,12,8].
//!
//! Built from the cyclic [23,12,7] code with generator polynomial
//! x^11 + x^9 + x^7 + x^6 + x^5 + x + 1, extended by an overall parity bit.
//! Codewords are 24-bit masks; bit i is coordinate i, bit 23 the parity
//! extension.

/// Generator polynomial of the [23,12,7] Golay code, low bit = x^0.
const GOLAY_POLY: u32 = 0b1010_1110_0011; // x^11+x^9+x^7+x^6+x^5+x+1

#[derive(Debug, Clone)]
pub struct GolayCode {
    basis: [u32; 12],
}

impl GolayCode {
    pub fn new() -> Self {
        let mut basis = [0u32; 12];
        for (i, b) in basis.iter_mut().enumerate() {
            let cyclic = GOLAY_POLY << i; // degree <= 22, fits in 23 bits
            debug_assert!(cyclic < (1 << 23));
            let parity = (cyclic.count_ones() & 1) << 23;
            *b = cyclic | parity;
        }
        GolayCode { basis }
    }

    pub fn basis(&self) -> &[u32; 12] {
        &self.basis
    }

    /// All 4096 codewords.
    pub fn codewords(&self) -> Vec<u32> {
        let mut words = Vec::with_capacity(1 << 12);
        for m in 0u32..(1 << 12) {
            let mut w = 0u32;
            for (i, b) in self.basis.iter().enumerate() {
                if m >> i & 1 == 1 {
                    w ^= b;
                }
            }
            words.push(w);
        }
        words
    }

    /// Weight distribution indexed by weight 0..=24.
    pub fn weight_distribution(&self) -> [u32; 25] {
        let mut dist = [0u32; 25];
        for w in self.codewords() {
            dist[w.count_ones() as usize] += 1;
        }
        dist
    }
}

impl Default for GolayCode {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_distribution_is_golay() {
        let code = GolayCode::new();
        let dist = code.weight_distribution();
        let mut expected = [0u32; 25];
        expected[0] = 1;
        expected[8] = 759;
        expected[12] = 2576;
        expected[16] = 759;
        expected[24] = 1;
        assert_eq!(dist, expected);
    }

    #[test]
    fn code_is_self_dual() {
        let code = GolayCode::new();
        for (i, a) in code.basis().iter().enumerate() {
            for b in code.basis().iter().skip(i) {
                assert_eq!((a & b).count_ones() % 2, 0);
            }
        }
    }

    #[test]
    fn weights_divisible_by_four() {
        let code = GolayCode::new();
        for w in code.codewords() {
            assert_eq!(w.count_ones() % 4, 0);
        }
    }
}
