//! Expected dimensions, the naive-matching gap, and stratum codimension.

use crate::levelsys::{build_system, torus_dim, LevelError};
use crate::maptype::MapType;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DimensionError {
    #[error("dimX = {0} must be even and at least 2")]
    BadDimension(i64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionInput {
    #[serde(rename = "c1A")]
    pub c1a: i64,
    #[serde(rename = "dimX")]
    pub dim_x: i64,
    pub chi: i64,
    pub ell: i64,
    #[serde(rename = "AV")]
    pub av: i64,
}

impl DimensionInput {
    pub fn new(c1a: i64, dim_x: i64, chi: i64, ell: i64, av: i64) -> Result<Self, DimensionError> {
        if dim_x < 2 || dim_x % 2 != 0 {
            return Err(DimensionError::BadDimension(dim_x));
        }
        Ok(DimensionInput { c1a, dim_x, chi, ell, av })
    }
}

/// `2·c1A + (dimX − 6)·χ/2 + 2·ℓ − 2·AV`. Since `dimX` is even the middle
/// term is always an integer.
pub fn expected_dim(input: &DimensionInput) -> i64 {
    2 * input.c1a + (input.dim_x - 6) / 2 * input.chi + 2 * input.ell - 2 * input.av
}

/// `2·Σ (1 − k(x))` over the given contact depths.
pub fn naive_gap(depths: &[u32]) -> i64 {
    2 * depths.iter().map(|&k| 1 - k as i64).sum::<i64>()
}

/// The naive gap plus the `2k − 2` real conditions cut by enhanced matching
/// at each point. Always zero.
pub fn enhanced_balance(depths: &[u32]) -> i64 {
    naive_gap(depths) + depths.iter().map(|&k| 2 * k as i64 - 2).sum::<i64>()
}

/// Real codimension of the stratum of a map type: twice the number of
/// independent rescaling parameters.
pub fn stratum_codim(mt: &MapType) -> Result<usize, LevelError> {
    Ok(2 * torus_dim(&build_system(mt)?))
}

impl MapType {
    pub fn dimension_input(&self) -> Result<DimensionInput, DimensionError> {
        DimensionInput::new(self.c1a, self.divisor.dim_x as i64, self.chi, self.ell as i64, self.av)
    }
}
