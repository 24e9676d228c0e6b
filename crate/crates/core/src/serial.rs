//! Serde helpers: complex scalars are `[re, im]`, matrices are row-major
//! arrays of rows.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::numkernel::{ComplexMatrix, ComplexVector, UnitVector, C64};

pub fn matrix_rows(a: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..a.nrows())
        .map(|r| {
            (0..a.ncols())
                .map(|c| [a[(r, c)].re, a[(r, c)].im])
                .collect()
        })
        .collect()
}

/// Builds a `rows × cols` matrix from nested rows, reporting the first
/// offending row by index.
pub fn matrix_from_rows(
    field: &str,
    rows: &[Vec<[f64; 2]>],
    nrows: usize,
    ncols: usize,
) -> Result<ComplexMatrix, String> {
    if rows.len() != nrows {
        return Err(format!(
            "field `{field}`: expected {nrows} rows, found {}",
            rows.len()
        ));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != ncols {
            return Err(format!(
                "field `{field}`: row {i} has {} entries, expected {ncols}",
                row.len()
            ));
        }
    }
    Ok(ComplexMatrix::from_fn(nrows, ncols, |r, c| {
        C64::new(rows[r][c][0], rows[r][c][1])
    }))
}

pub mod complex {
    use super::*;

    pub fn serialize<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(C64::new(re, im))
    }
}

pub mod complex_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|z| [z.re, z.im])
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<C64>, D::Error> {
        let raw = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(raw.into_iter().map(|[re, im]| C64::new(re, im)).collect())
    }
}

pub mod unit_vector {
    use super::*;

    pub fn serialize<S: Serializer>(v: &UnitVector, s: S) -> Result<S::Ok, S::Error> {
        v.as_vector()
            .iter()
            .map(|z| [z.re, z.im])
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<UnitVector, D::Error> {
        let raw = Vec::<[f64; 2]>::deserialize(d)?;
        let v = ComplexVector::from_iterator(
            raw.len(),
            raw.into_iter().map(|[re, im]| C64::new(re, im)),
        );
        UnitVector::new(v).map_err(D::Error::custom)
    }
}
