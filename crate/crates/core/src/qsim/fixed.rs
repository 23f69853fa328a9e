//! Sign-magnitude fixed-point codec for the data registers.
//!
//! A code of width `p + 2` holds `p` fraction bits, one integer bit and a
//! sign bit on top, so every value in `[-1, 1]` is representable. Taking
//! the magnitude is just masking off the sign bit.

use crate::error::{Error, Result};

pub const DEFAULT_FRAC_BITS: u32 = 16;
pub const MAX_FRAC_BITS: u32 = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixedCodec {
    frac_bits: u32,
}

impl FixedCodec {
    pub fn new(frac_bits: u32) -> Result<Self> {
        if frac_bits == 0 || frac_bits > MAX_FRAC_BITS {
            return Err(Error::InvalidParameter(format!(
                "fraction bits must be in 1..={MAX_FRAC_BITS}, got {frac_bits}"
            )));
        }
        Ok(Self { frac_bits })
    }

    pub fn frac_bits(&self) -> u32 {
        self.frac_bits
    }

    /// Register width in bits.
    pub fn width(&self) -> u32 {
        self.frac_bits + 2
    }

    pub fn scale(&self) -> f64 {
        (1u64 << self.frac_bits) as f64
    }

    fn sign_bit(&self) -> u64 {
        1 << (self.frac_bits + 1)
    }

    fn magnitude_mask(&self) -> u64 {
        self.sign_bit() - 1
    }

    /// Rounds `|x|·2^p` to nearest; requires `|x| ≤ 1`.
    pub fn encode(&self, x: f64) -> Result<u64> {
        if !x.is_finite() || x.abs() > 1.0 {
            return Err(Error::InvalidParameter(format!("fixed-point value {x} outside [-1, 1]")));
        }
        let mag = (x.abs() * self.scale()).round() as u64;
        let sign = if x.is_sign_negative() { self.sign_bit() } else { 0 };
        Ok(sign | mag)
    }

    pub fn decode(&self, code: u64) -> f64 {
        let v = self.magnitude(code) as f64 / self.scale();
        if code & self.sign_bit() != 0 {
            -v
        } else {
            v
        }
    }

    /// `|value|` in units of `2^-p`, i.e. the code with its sign bit dropped.
    pub fn magnitude(&self, code: u64) -> u64 {
        code & self.magnitude_mask()
    }

    /// Signed value in units of `2^-p`.
    pub fn to_units(&self, code: u64) -> i64 {
        let m = self.magnitude(code) as i64;
        if code & self.sign_bit() != 0 {
            -m
        } else {
            m
        }
    }

    pub fn is_valid_code(&self, code: u64) -> bool {
        code < (1 << self.width()) && self.magnitude(code) <= (1 << self.frac_bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basic_values() {
        let c = FixedCodec::new(16).unwrap();
        assert_eq!(c.width(), 18);
        assert_eq!(c.encode(1.0).unwrap(), 1 << 16);
        assert_eq!(c.encode(-1.0).unwrap(), (1 << 17) | (1 << 16));
        assert_eq!(c.encode(0.5).unwrap(), 1 << 15);
        assert_eq!(c.decode(c.encode(-0.25).unwrap()), -0.25);
        assert_eq!(c.magnitude(c.encode(-0.25).unwrap()), 1 << 14);
        assert_eq!(c.to_units(c.encode(-0.25).unwrap()), -(1 << 14));
        assert!(c.encode(1.5).is_err());
        assert!(c.encode(f64::NAN).is_err());
        assert!(FixedCodec::new(0).is_err());
    }

    proptest! {
        #[test]
        fn codes_round_trip(p in 1u32..=24, raw in any::<u64>()) {
            let c = FixedCodec::new(p).unwrap();
            let code = raw % (1 << c.width());
            prop_assume!(c.is_valid_code(code));
            prop_assert_eq!(c.encode(c.decode(code)).unwrap(), code);
        }

        #[test]
        fn values_quantize_to_half_ulp(p in 1u32..=30, x in -1.0f64..=1.0) {
            let c = FixedCodec::new(p).unwrap();
            let back = c.decode(c.encode(x).unwrap());
            prop_assert!((back - x).abs() <= 0.5 / c.scale());
        }
    }
}
