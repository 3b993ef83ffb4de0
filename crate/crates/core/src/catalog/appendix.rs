//! Published SFC matrices, transcribed as printed (including misprints, which the
//! catalog gate detects and repairs).

use crate::tensor::RationalMatrix;

/// Raw published matrices: `bt` is the input transform as applied (`Bᵀ`).
pub struct Published {
    pub name: &'static str,
    pub points: usize,
    pub m: usize,
    pub r: usize,
    pub bt: RationalMatrix,
    pub g: RationalMatrix,
    pub a: RationalMatrix,
}

pub fn sfc4_4x4_3x3() -> Published {
    Published {
        name: "sfc4-4x4-3x3",
        points: 4,
        m: 4,
        r: 3,
        bt: RationalMatrix::from_rows(
            &[
                &[0, 1, 1, 1, 1, 0],
                &[0, -1, 1, -1, 1, 0],
                &[0, 1, -1, -1, 1, 0],
                &[0, 0, -1, 0, 1, 0],
                &[0, 1, 0, -1, 0, 0],
                &[1, 0, 0, 0, -1, 0],
                &[0, -1, 0, 0, 0, 1],
            ],
            1,
        ),
        g: RationalMatrix::from_rows(
            &[&[1, 1, 1], &[1, -1, 1], &[1, -1, -1], &[1, 0, -1], &[0, -1, 0], &[1, 0, 0], &[0, 0, 1]],
            1,
        ),
        a: RationalMatrix::from_rows(
            &[
                &[1, 1, 1, 1],
                &[1, -1, 1, -1],
                &[0, 2, 0, -2],
                &[2, -2, -2, 2],
                &[-2, -2, 2, 2],
                &[4, 0, 0, 0],
                &[0, 0, 0, 4],
            ],
            4,
        ),
    }
}

pub fn sfc6_6x6_3x3() -> Published {
    Published {
        name: "sfc6-6x6-3x3",
        points: 6,
        m: 6,
        r: 3,
        bt: RationalMatrix::from_rows(
            &[
                &[0, 1, 1, 1, 1, 1, 1, 0],
                &[0, 1, 1, 0, -1, -1, 0, 0],
                &[0, 0, -1, -1, 0, 1, 1, 0],
                &[0, 1, 0, -1, -1, 0, 1, 0],
                &[0, 1, 0, -1, 1, 0, -1, 0],
                &[0, 0, -1, 1, 0, -1, 1, 0],
                &[0, 1, -1, 0, 1, -1, 0, 0],
                &[0, 1, -1, 1, 1, -1, 1, 0],
                &[1, 0, 0, 0, 0, 0, -1, 0],
                &[0, -1, 0, 0, 0, 0, 0, 1],
            ],
            1,
        ),
        g: RationalMatrix::from_rows(
            &[
                &[1, 1, 1],
                &[0, 1, 1],
                &[-1, -1, 0],
                &[-1, 0, 1],
                &[-1, 0, 1],
                &[1, -1, 0],
                &[0, -1, 1],
                &[1, -1, 1],
                &[1, 0, 0],
                &[0, 0, 1],
            ],
            1,
        ),
        a: RationalMatrix::from_rows(
            &[
                &[1, 1, 1, 1, 1, 1],
                &[2, 1, -1, -2, -1, 1],
                &[-1, 1, 2, 1, -1, -2],
                &[-1, -2, -1, 1, 2, 1],
                &[1, -2, 1, 1, -2, 1],
                &[1, 1, -2, 1, 1, -2],
                &[-2, 1, 1, -2, 1, 1],
                &[-1, 1, -1, 1, -1, 1],
                &[6, 0, 0, 0, 0, 0],
                &[0, 0, 0, 0, 0, 6],
            ],
            6,
        ),
    }
}

fn sfc6_7x7_bt() -> RationalMatrix {
    RationalMatrix::from_rows(
        &[
            &[0, 1, 1, 1, 1, 1, 1, 0, 0],
            &[0, 1, 1, 0, -1, -1, 0, 0, 0],
            &[0, 0, -1, -1, 0, 1, 1, 0, 0],
            &[0, 1, 0, -1, -1, 0, 1, 0, 0],
            &[0, 1, 0, -1, 1, 0, -1, 0, 0],
            &[0, 0, -1, 1, 0, -1, 1, 0, 0],
            &[0, 1, -1, 0, 1, -1, 0, 0, 0],
            &[0, 1, -1, 1, -1, 1, -1, 0, 0],
            &[1, 0, 0, 0, 0, 0, -1, 0, 0],
            &[0, -1, 0, 0, 0, 0, 0, 1, 0],
            &[0, -1, 0, 0, 0, 0, 0, 1, 0],
            &[0, 0, -1, 0, 0, 0, 0, 0, 1],
        ],
        1,
    )
}

fn sfc6_7x7_g() -> RationalMatrix {
    RationalMatrix::from_rows(
        &[
            &[1, 1, 1],
            &[0, 1, 1],
            &[-1, -1, 0],
            &[-1, 0, 1],
            &[-1, 0, 1],
            &[1, -1, 0],
            &[0, -1, 1],
            &[1, -1, 1],
            &[1, 0, 0],
            &[0, 0, 1],
            &[0, 1, 0],
            &[0, 0, 1],
        ],
        1,
    )
}

const SFC6_7X7_A: [[i64; 7]; 12] = [
    [1, 1, 1, 1, 1, 1, 1],
    [2, 1, -1, -2, -1, 1, 2],
    [-1, 1, 2, 1, -1, -2, -1],
    [-1, -2, -1, 1, 2, 1, -1],
    [1, -2, 1, 1, -2, 1, 1],
    [1, 1, -2, 1, 1, -2, 1],
    [-2, 1, 1, -2, 1, 1, -2],
    [-1, 1, -1, 1, -1, 1, -1],
    [6, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 6, 0],
    [0, 0, 0, 0, 0, 0, 6],
    [0, 0, 0, 0, 0, 0, 6],
];

/// SFC-6(7×7,3×3) as printed in the appendix.
pub fn sfc6_7x7_3x3() -> Published {
    let rows: Vec<Vec<i64>> = SFC6_7X7_A.iter().map(|r| r.to_vec()).collect();
    Published {
        name: "sfc6-7x7-3x3",
        points: 6,
        m: 7,
        r: 3,
        bt: sfc6_7x7_bt(),
        g: sfc6_7x7_g(),
        a: RationalMatrix::from_vecs(&rows, 6).expect("literal"),
    }
}

/// SFC-6(7×7,3×3) with the output transform printed in the main text, which
/// differs from the appendix in two rows.
pub fn sfc6_7x7_3x3_main_text() -> Published {
    let mut rows: Vec<Vec<i64>> = SFC6_7X7_A.iter().map(|r| r.to_vec()).collect();
    rows[2] = vec![-1, 1, 1, 1, -1, -2, -1];
    rows[6] = vec![-2, 1, 2, -2, 1, 1, -2];
    Published { a: RationalMatrix::from_vecs(&rows, 6).expect("literal"), ..sfc6_7x7_3x3() }
}

pub fn sfc6_6x6_5x5() -> Published {
    Published {
        name: "sfc6-6x6-5x5",
        points: 6,
        m: 6,
        r: 5,
        bt: RationalMatrix::from_rows(
            &[
                &[0, 0, 1, 1, 1, 1, 1, 1, 0, 0],
                &[0, 0, 1, 1, 0, -1, -1, 0, 0, 0],
                &[0, 0, 0, -1, -1, 0, 1, 1, 0, 0],
                &[0, 0, 1, 0, -1, -1, 0, 1, 0, 0],
                &[0, 0, 1, 0, -1, 1, 0, -1, 0, 0],
                &[0, 0, 0, -1, 1, 0, -1, 1, 0, 0],
                &[0, 0, 1, -1, 0, 1, -1, 0, 0, 0],
                &[0, 0, 1, -1, 1, -1, 1, -1, 0, 0],
                &[1, 0, 0, 0, 0, 0, -1, 0, 0, 0],
                &[0, 1, 0, 0, 0, 0, 0, -1, 0, 0],
                &[0, 1, 0, 0, 0, 0, 0, -1, 0, 0],
                &[0, 0, -1, 0, 0, 0, 0, 0, 1, 0],
                &[0, 0, -1, 0, 0, 0, 0, 0, 1, 0],
                &[0, 0, 0, -1, 0, 0, 0, 0, 0, 1],
            ],
            1,
        ),
        g: RationalMatrix::from_rows(
            &[
                &[1, 1, 1, 1, 1],
                &[-1, -1, 0, 1, 1],
                &[1, 0, -1, -1, 0],
                &[0, -1, -1, 0, 1],
                &[0, 1, -1, 0, 1],
                &[-1, 0, 1, -1, 0],
                &[-1, 1, 0, -1, 1],
                &[1, -1, 1, -1, 1],
                &[1, 0, 0, 0, 0],
                &[1, 0, 0, 0, 0],
                &[0, 1, 0, 0, 0],
                &[0, 0, 0, 1, 0],
                &[0, 0, 0, 0, 1],
                &[0, 0, 0, 0, 1],
            ],
            1,
        ),
        // printed with seven output columns for a six-output algorithm
        a: RationalMatrix::from_rows(
            &[
                &[1, 1, 1, 1, 1, 1, 1],
                &[1, -1, -2, -1, 1, 2, -1],
                &[1, 2, 1, -1, -2, -1, 2],
                &[-2, -1, 1, 2, 1, -1, -1],
                &[-2, 1, 1, -2, 1, 1, 1],
                &[1, -2, 1, 1, -2, 1, -2],
                &[1, 1, -2, 1, 1, -2, 1],
                &[1, -1, 1, -1, 1, -1, -1],
                &[6, 0, 0, 0, 0, 0, 0],
                &[6, 0, 0, 0, 0, 0, 0],
                &[0, 6, 0, 0, 0, 0, 0],
                &[0, 0, 0, 0, 0, 6, 0],
                &[0, 0, 0, 0, 0, 0, 6],
                &[0, 0, 0, 0, 0, 0, 6],
            ],
            6,
        ),
    }
}

pub fn all() -> Vec<Published> {
    vec![sfc4_4x4_3x3(), sfc6_6x6_3x3(), sfc6_7x7_3x3(), sfc6_6x6_5x5()]
}
