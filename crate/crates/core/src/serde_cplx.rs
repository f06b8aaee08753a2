// Copyright 2026 qmapsim Contributors
// SPDX-License-Identifier: Apache-2.0

// JSON layout for complex matrices: 2×2 as a flat row-major list of four
// [re, im] pairs, 4×4 as four rows of four [re, im] pairs.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::linalg::{Mat2, Mat4, C64};

pub(crate) mod mat2 {
    use super::*;

    pub fn serialize<S: Serializer>(m: &Mat2, s: S) -> Result<S::Ok, S::Error> {
        let flat: [[f64; 2]; 4] = [
            [m[(0, 0)].re, m[(0, 0)].im],
            [m[(0, 1)].re, m[(0, 1)].im],
            [m[(1, 0)].re, m[(1, 0)].im],
            [m[(1, 1)].re, m[(1, 1)].im],
        ];
        flat.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Mat2, D::Error> {
        let flat = <[[f64; 2]; 4]>::deserialize(d)?;
        Ok(Mat2::from_fn(|r, k| {
            let [re, im] = flat[2 * r + k];
            C64::new(re, im)
        }))
    }
}

pub(crate) mod mat4 {
    use super::*;

    pub fn serialize<S: Serializer>(m: &Mat4, s: S) -> Result<S::Ok, S::Error> {
        let rows: [[[f64; 2]; 4]; 4] =
            std::array::from_fn(|r| std::array::from_fn(|k| [m[(r, k)].re, m[(r, k)].im]));
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Mat4, D::Error> {
        let rows = <[[[f64; 2]; 4]; 4]>::deserialize(d)?;
        Ok(Mat4::from_fn(|r, k| C64::new(rows[r][k][0], rows[r][k][1])))
    }
}
