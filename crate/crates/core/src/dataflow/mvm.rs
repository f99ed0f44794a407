//! Crossbar matrix-vector multiply.
//!
//! Weights are stored row-per-wordline: `out[j] = Σ_i input[i] · W[i][j]`.
//! In fixed-point mode each weight is quantized to `weight_bits` two's
//! complement with its sign bit inverted (offset binary) and sliced into
//! `cell_bits`-wide digits, one column per digit. Inputs are applied one
//! bit-plane per cycle; every column current passes through a clamping ADC
//! and the shift-add stage recombines digits and planes, subtracting the
//! sign offset times the plane's popcount.

use crate::arch::Crossbar;
use crate::error::{Error, Result};

use super::matrix::Matrix;
use super::quant::{quantize, QuantSpec};

#[derive(Clone, Debug, PartialEq)]
pub struct MvmOutput {
    pub values: Vec<f64>,
    /// At least one ADC conversion was clamped.
    pub saturated: bool,
}

/// Integer-domain bit-serial product of quantized weights and inputs.
///
/// `weights` is row-major `rows × cols`. Returns the per-column results and
/// whether any column current exceeded the ADC range.
pub fn bit_serial_mvm(weights: &[i64], inputs: &[i64], cols: usize, q: &QuantSpec) -> (Vec<i64>, bool) {
    let rows = inputs.len();
    debug_assert_eq!(weights.len(), rows * cols);
    let slices = q.cols_per_value();
    let offset = 1i64 << (q.weight_bits - 1);
    let digit_mask = (1i64 << q.cell_bits) - 1;
    let adc_max = (1i64 << q.adc_bits) - 1;
    let input_mask = (1i64 << q.input_bits) - 1;

    // Offset-binary cell digits, laid out [row][col][slice].
    let digits: Vec<i64> = weights
        .iter()
        .flat_map(|&w| {
            let u = w + offset;
            (0..slices).map(move |s| (u >> (s as u32 * q.cell_bits)) & digit_mask)
        })
        .collect();

    let mut acc = vec![0i64; cols];
    let mut saturated = false;
    let mut currents = vec![0i64; cols * slices];
    for plane in 0..q.input_bits {
        let plane_weight = if plane == q.input_bits - 1 {
            -(1i64 << plane)
        } else {
            1i64 << plane
        };
        currents.iter_mut().for_each(|c| *c = 0);
        let mut popcount = 0i64;
        for (i, &x) in inputs.iter().enumerate() {
            if ((x & input_mask) >> plane) & 1 == 0 {
                continue;
            }
            popcount += 1;
            let row = &digits[i * cols * slices..(i + 1) * cols * slices];
            for (c, d) in currents.iter_mut().zip(row) {
                *c += d;
            }
        }
        for (j, a) in acc.iter_mut().enumerate() {
            let mut column_sum = 0i64;
            for s in 0..slices {
                let mut sample = currents[j * slices + s];
                if sample > adc_max {
                    sample = adc_max;
                    saturated = true;
                }
                column_sum += sample << (s as u32 * q.cell_bits);
            }
            *a += plane_weight * (column_sum - offset * popcount);
        }
    }
    (acc, saturated)
}

/// One crossbar-sized MVM. The tile must fit a single array of `xbar`.
pub fn mvm(xbar: &Crossbar, tile: &Matrix, input: &[f64], q: &QuantSpec) -> Result<MvmOutput> {
    if input.len() != tile.rows {
        return Err(Error::Shape(format!(
            "input length {} does not match {} tile rows",
            input.len(),
            tile.rows
        )));
    }
    let k = q.cols_per_value();
    if tile.rows > xbar.rows || tile.cols * k > xbar.cols {
        return Err(Error::Shape(format!(
            "{}x{} tile ({} cells wide after slicing) exceeds a {}x{} crossbar",
            tile.rows,
            tile.cols,
            tile.cols * k,
            xbar.rows,
            xbar.cols
        )));
    }
    if q.float_mode {
        return Ok(MvmOutput { values: tile.left_mul(input)?, saturated: false });
    }
    q.validate()?;

    let w_step = q.step_for(tile.max_abs(), q.weight_bits);
    let x_max = input.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let x_step = q.step_for(x_max, q.input_bits);
    let wq: Vec<i64> = tile.data.iter().map(|&w| quantize(w, w_step, q.weight_bits)).collect();
    let xq: Vec<i64> = input.iter().map(|&x| quantize(x, x_step, q.input_bits)).collect();
    let (ints, saturated) = bit_serial_mvm(&wq, &xq, tile.cols, q);
    Ok(MvmOutput {
        values: ints.into_iter().map(|v| v as f64 * w_step * x_step).collect(),
        saturated,
    })
}

/// Result of a matrix spread over several crossbar tiles.
#[derive(Clone, Debug, PartialEq)]
pub struct TiledOutput {
    pub values: Vec<f64>,
    pub tiles: u64,
    pub saturated: bool,
}

/// Tile grid for a `rows × cols` matrix: row tiles, column tiles and the
/// number of matrix columns one tile holds.
pub fn tile_grid(rows: usize, cols: usize, xbar: &Crossbar, cols_per_value: usize) -> Result<(usize, usize, usize)> {
    let per_tile = xbar.cols / cols_per_value;
    if per_tile == 0 {
        return Err(Error::Shape(format!(
            "{cols_per_value} columns per value exceed a {}-column crossbar",
            xbar.cols
        )));
    }
    Ok((rows.div_ceil(xbar.rows), cols.div_ceil(per_tile), per_tile))
}

/// Splits `m` into crossbar tiles, runs [`mvm`] on each and sums the row
/// tiles' partial outputs digitally.
pub fn tiled_mvm(xbar: &Crossbar, m: &Matrix, input: &[f64], q: &QuantSpec) -> Result<TiledOutput> {
    if input.len() != m.rows {
        return Err(Error::Shape(format!(
            "input length {} does not match {} matrix rows",
            input.len(),
            m.rows
        )));
    }
    let (row_tiles, col_tiles, per_tile) = tile_grid(m.rows, m.cols, xbar, q.cols_per_value())?;
    let mut values = vec![0.0; m.cols];
    let mut saturated = false;
    for ct in 0..col_tiles {
        let c0 = ct * per_tile;
        let width = per_tile.min(m.cols - c0);
        for rt in 0..row_tiles {
            let r0 = rt * xbar.rows;
            let height = xbar.rows.min(m.rows - r0);
            let tile = m.block(r0, c0, height, width);
            let out = mvm(xbar, &tile, &input[r0..r0 + height], q)?;
            saturated |= out.saturated;
            for (v, o) in values[c0..c0 + width].iter_mut().zip(out.values) {
                *v += o;
            }
        }
    }
    Ok(TiledOutput { values, tiles: (row_tiles * col_tiles) as u64, saturated })
}

#[cfg(test)]
mod tests {
    use super::*;

    const XBAR: Crossbar = Crossbar::new(1, 128, 128);

    #[test]
    fn identity_in_float_mode() {
        let x = vec![0.5, -1.0, 2.0];
        let out = mvm(&XBAR, &Matrix::identity(3), &x, &QuantSpec::float()).unwrap();
        assert_eq!(out.values, x);
    }

    #[test]
    fn zero_input_gives_zero_output() {
        let w = Matrix::from_fn(4, 4, |r, c| (r as f64 - c as f64) * 0.3);
        for q in [QuantSpec::float(), QuantSpec::default(), QuantSpec { weight_bits: 3, input_bits: 2, cell_bits: 1, ..Default::default() }] {
            let out = mvm(&XBAR, &w, &[0.0; 4], &q).unwrap();
            assert!(out.values.iter().all(|&v| v == 0.0), "{q:?}");
        }
    }

    #[test]
    fn hand_checked_integer_product() {
        // W = [[3, -2], [-4, 1]], x = [2, -1]: x·W = [10, -5].
        let q = QuantSpec { weight_bits: 4, input_bits: 3, cell_bits: 2, adc_bits: 8, ..Default::default() };
        let (out, sat) = bit_serial_mvm(&[3, -2, -4, 1], &[2, -1], 2, &q);
        assert_eq!(out, vec![10, -5]);
        assert!(!sat);
    }

    #[test]
    fn adc_clamp_sets_flag() {
        let q = QuantSpec { weight_bits: 4, input_bits: 4, cell_bits: 4, adc_bits: 2, ..Default::default() };
        let (_, sat) = bit_serial_mvm(&[7, 7, 7], &[7, 7, 7], 1, &q);
        assert!(sat);
    }

    #[test]
    fn shape_errors() {
        let w = Matrix::zeros(3, 2);
        assert!(matches!(mvm(&XBAR, &w, &[1.0; 2], &QuantSpec::float()), Err(Error::Shape(_))));
        let wide = Matrix::zeros(2, 40);
        assert!(matches!(mvm(&XBAR, &wide, &[1.0; 2], &QuantSpec::default()), Err(Error::Shape(_))));
    }

    #[test]
    fn tiled_matches_dense_in_float_mode() {
        let m = Matrix::from_fn(300, 70, |r, c| ((r * 7 + c * 3) % 11) as f64 - 5.0);
        let x: Vec<f64> = (0..300).map(|i| (i % 5) as f64 * 0.25).collect();
        let out = tiled_mvm(&XBAR, &m, &x, &QuantSpec::float()).unwrap();
        let want = m.left_mul(&x).unwrap();
        for (a, b) in out.values.iter().zip(&want) {
            assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0));
        }
        // 3 row tiles × ceil(70 / 32) column tiles with 4 columns per value.
        assert_eq!(out.tiles, 3 * 3);
    }
}
