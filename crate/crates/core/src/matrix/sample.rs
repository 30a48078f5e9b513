use num_bigint::BigInt;

use super::{IntMatrix, RealMatrix};
use crate::dist::DistributionSpec;
use crate::error::Result;
use crate::rng::RngStream;

/// i.i.d. integer entries, drawn row-major from `stream`.
pub fn sample_int_matrix(dist: &DistributionSpec, rows: usize, cols: usize, stream: RngStream) -> Result<IntMatrix> {
    let values = dist.integer_values()?;
    let mut rng = stream.rng();
    let entries = (0..rows * cols).map(|_| BigInt::from(values[dist.sample_index(&mut rng)])).collect();
    IntMatrix::new(rows, cols, entries)
}

/// i.i.d. real entries, drawn row-major from `stream`.
pub fn sample_real_matrix(dist: &DistributionSpec, rows: usize, cols: usize, stream: RngStream) -> Result<RealMatrix> {
    let mut rng = stream.rng();
    let data = (0..rows * cols).map(|_| dist.sample(&mut rng)).collect();
    RealMatrix::new(rows, cols, data)
}
