use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fixed-point mapping of weights and inputs onto resistive cells.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuantSpec {
    pub weight_bits: u32,
    pub input_bits: u32,
    /// Bits stored per resistive cell.
    pub cell_bits: u32,
    pub adc_bits: u32,
    /// Fixed LSB size for weights and inputs; `0` picks a per-tile step
    /// from the largest magnitude.
    pub scale: f64,
    /// Skip fixed-point emulation and compute in `f64`.
    pub float_mode: bool,
}

impl Default for QuantSpec {
    fn default() -> Self {
        Self {
            weight_bits: 8,
            input_bits: 8,
            cell_bits: 2,
            adc_bits: 12,
            scale: 0.0,
            float_mode: false,
        }
    }
}

pub const MAX_OPERAND_BITS: u32 = 24;

impl QuantSpec {
    pub fn float() -> Self {
        Self { float_mode: true, ..Self::default() }
    }

    /// Crossbar columns one weight occupies after bit-slicing.
    pub fn cols_per_value(&self) -> usize {
        self.weight_bits.div_ceil(self.cell_bits) as usize
    }

    pub fn validate(&self) -> Result<()> {
        let ok_bits = |b: u32| (2..=MAX_OPERAND_BITS).contains(&b);
        if !ok_bits(self.weight_bits) || !ok_bits(self.input_bits) {
            return Err(Error::Domain(format!(
                "weight/input bits must be in 2..={MAX_OPERAND_BITS}, got {}/{}",
                self.weight_bits, self.input_bits
            )));
        }
        if self.cell_bits == 0 || self.cell_bits > self.weight_bits {
            return Err(Error::Domain(format!(
                "cell bits {} must be in 1..={}",
                self.cell_bits, self.weight_bits
            )));
        }
        if self.adc_bits == 0 || self.adc_bits > 48 {
            return Err(Error::Domain(format!("adc bits {} must be in 1..=48", self.adc_bits)));
        }
        if !(self.scale >= 0.0 && self.scale.is_finite()) {
            return Err(Error::Domain(format!("scale {} must be finite and >= 0", self.scale)));
        }
        Ok(())
    }

    /// LSB step used to quantize `values` to `bits` signed bits.
    pub fn step_for(&self, max_abs: f64, bits: u32) -> f64 {
        if self.scale > 0.0 {
            return self.scale;
        }
        let qmax = ((1i64 << (bits - 1)) - 1) as f64;
        if max_abs > 0.0 {
            max_abs / qmax
        } else {
            1.0
        }
    }
}

/// Rounds `v / step` to the nearest signed `bits`-bit integer, saturating.
pub fn quantize(v: f64, step: f64, bits: u32) -> i64 {
    let qmax = (1i64 << (bits - 1)) - 1;
    let q = (v / step).round();
    q.clamp((-qmax - 1) as f64, qmax as f64) as i64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn column_expansion() {
        let q = QuantSpec { weight_bits: 8, cell_bits: 2, ..Default::default() };
        assert_eq!(q.cols_per_value(), 4);
        let q = QuantSpec { weight_bits: 7, cell_bits: 3, ..Default::default() };
        assert_eq!(q.cols_per_value(), 3);
    }

    #[test]
    fn validation() {
        QuantSpec::default().validate().unwrap();
        assert!(QuantSpec { cell_bits: 9, ..Default::default() }.validate().is_err());
        assert!(QuantSpec { weight_bits: 1, ..Default::default() }.validate().is_err());
        assert!(QuantSpec { scale: -1.0, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn quantize_saturates() {
        assert_eq!(quantize(1.0, 0.1, 4), 7);
        assert_eq!(quantize(-1.0, 0.1, 4), -8);
        assert_eq!(quantize(0.26, 0.1, 8), 3);
    }
}
