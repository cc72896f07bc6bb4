use crate::{Error, Result};

/// Replaces an integer variable ranging over `0..domain` (`domain = 2^l`)
/// by `l` binary digit variables. Digit `t` (0-based) carries `2^t` times
/// the original coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BinaryExpansion {
    digits: u32,
}

impl BinaryExpansion {
    pub fn new(domain: u64) -> Result<Self> {
        if domain < 2 || !domain.is_power_of_two() {
            return Err(Error::instance(format!(
                "domain size {domain} must be a power of two and at least 2"
            )));
        }
        Ok(Self {
            digits: domain.trailing_zeros(),
        })
    }

    pub fn digits(&self) -> usize {
        self.digits as usize
    }

    pub fn multipliers(&self) -> Vec<f64> {
        (0..self.digits).map(|t| (1u64 << t) as f64).collect()
    }

    /// One column per digit.
    pub fn digit_columns(&self, column: &[(usize, f64)]) -> Vec<Vec<(usize, f64)>> {
        self.multipliers()
            .into_iter()
            .map(|m| column.iter().map(|&(row, c)| (row, c * m)).collect())
            .collect()
    }

    pub fn encode(&self, value: u64) -> Result<Vec<bool>> {
        if value >> self.digits != 0 {
            return Err(Error::instance(format!(
                "value {value} does not fit in {} binary digits",
                self.digits
            )));
        }
        Ok((0..self.digits).map(|t| value >> t & 1 == 1).collect())
    }

    pub fn decode(&self, bits: &[bool]) -> u64 {
        bits.iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(t, _)| 1u64 << t)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_domain_is_identity() {
        let e = BinaryExpansion::new(2).unwrap();
        assert_eq!(e.digits(), 1);
        assert_eq!(e.digit_columns(&[(0, 0.3), (2, 1.5)]), vec![vec![(0, 0.3), (2, 1.5)]]);
    }

    #[test]
    fn eight_values_use_three_digits() {
        let e = BinaryExpansion::new(8).unwrap();
        assert_eq!(e.multipliers(), vec![1.0, 2.0, 4.0]);
        let bits = e.encode(5).unwrap();
        assert_eq!(bits, vec![true, false, true]);
        let cols = e.digit_columns(&[(0, 0.25)]);
        let total: f64 = cols
            .iter()
            .zip(&bits)
            .filter(|(_, &b)| b)
            .map(|(c, _)| c[0].1)
            .sum();
        assert_eq!(total, 0.25 * 5.0);
        assert_eq!(e.decode(&bits), 5);
        assert!(e.encode(8).is_err());
    }

    #[test]
    fn rejects_non_powers_of_two() {
        assert!(BinaryExpansion::new(6).is_err());
        assert!(BinaryExpansion::new(1).is_err());
        assert!(BinaryExpansion::new(0).is_err());
    }
}
