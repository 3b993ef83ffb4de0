//! Symbolic Fourier transforms: integer DFT factors for 3, 4 and 6 points.

use serde::Serialize;

use super::symbolic::SymGroup;
use super::CatalogError;
use crate::tensor::{rational_matmul, RationalMatrix, RingRule};

/// Additions used by the fast SFT-6 decomposition in [`sft6_fast`].
pub const SFT6_FAST_ADDS: usize = 14;

#[derive(Clone, Debug, Serialize)]
pub struct SymbolicDftPlan {
    pub points: usize,
    /// Integer transform with entries in {-1, 0, 1}.
    pub f: RationalMatrix,
    /// How rows of `f` pair into symbolic coefficients `c0 + c1·s`.
    pub groups: Vec<SymGroup>,
    /// DFT frequency index carried by each group (complex groups also cover its mirror).
    pub frequencies: Vec<usize>,
    pub ring: RingRule,
    /// Output-side inverse `iF`, satisfying `iFᵀ · F = C` with `C` the one-step cyclic shift.
    pub inverse: RationalMatrix,
    /// Plain inverse `F⁻¹`.
    pub exact_inverse: RationalMatrix,
    /// Additions of the published fast decomposition, when there is one.
    pub fast_adds: Option<usize>,
}

impl SymbolicDftPlan {
    /// Number of complex groups.
    pub fn complex_groups(&self) -> usize {
        self.groups.iter().filter(|g| matches!(g, SymGroup::Complex(..))).count()
    }

    /// Row-count additions of `f` (nonzeros − 1 per row).
    pub fn row_adds(&self) -> usize {
        (0..self.f.rows()).map(|r| self.f.row_nnz(r).saturating_sub(1)).sum()
    }

    /// Additions for one application of `f`, using the fast decomposition if available.
    pub fn adds(&self) -> usize {
        self.fast_adds.unwrap_or_else(|| self.row_adds())
    }
}

pub fn build_sft(points: usize) -> Result<SymbolicDftPlan, CatalogError> {
    let (rows, groups, frequencies, ring, fast_adds): (Vec<&[i64]>, _, _, _, _) = match points {
        6 => (
            vec![
                &[1, 1, 1, 1, 1, 1],
                &[1, 1, 0, -1, -1, 0],
                &[0, -1, -1, 0, 1, 1],
                &[1, 0, -1, 1, 0, -1],
                &[0, -1, 1, 0, -1, 1],
                &[1, -1, 1, -1, 1, -1],
            ],
            vec![SymGroup::Real(0), SymGroup::Complex(1, 2), SymGroup::Complex(3, 4), SymGroup::Real(5)],
            vec![0, 1, 2, 3],
            RingRule::DFT6,
            Some(SFT6_FAST_ADDS),
        ),
        4 => (
            vec![&[1, 1, 1, 1], &[1, 0, -1, 0], &[0, -1, 0, 1], &[1, -1, 1, -1]],
            vec![SymGroup::Real(0), SymGroup::Complex(1, 2), SymGroup::Real(3)],
            vec![0, 1, 2],
            RingRule::DFT4,
            None,
        ),
        3 => (
            vec![&[1, 1, 1], &[1, 0, -1], &[0, 1, -1]],
            vec![SymGroup::Real(0), SymGroup::Complex(1, 2)],
            vec![0, 2],
            RingRule::DFT3,
            None,
        ),
        p => return Err(CatalogError::UnsupportedPoints(p)),
    };
    let f = RationalMatrix::from_rows(&rows, 1);
    let exact_inverse = f.inverse()?;
    let inverse = rational_matmul(&cyclic_shift(points), &exact_inverse)?.transpose();
    Ok(SymbolicDftPlan { points, f, groups, frequencies, ring, inverse, exact_inverse, fast_adds })
}

/// `C[i][(i+1) mod n] = 1`.
pub fn cyclic_shift(n: usize) -> RationalMatrix {
    let mut nums = vec![0; n * n];
    for i in 0..n {
        nums[i * n + (i + 1) % n] = 1;
    }
    RationalMatrix::new(n, n, nums, 1).expect("shift matrix")
}

/// `Rev[(−m) mod n][m] = 1`: maps a filter to its index-reversed copy.
pub fn reversal(n: usize) -> RationalMatrix {
    let mut nums = vec![0; n * n];
    for m in 0..n {
        nums[((n - m) % n) * n + m] = 1;
    }
    RationalMatrix::new(n, n, nums, 1).expect("reversal matrix")
}

/// SFT-6 through a 2×3 decomposition. Returns the six rows of `F₆·x` and the additions used.
pub fn sft6_fast(x: &[f64; 6]) -> ([f64; 6], usize) {
    let mut adds = 0;
    let mut add = |a: f64, b: f64| {
        adds += 1;
        a + b
    };
    let a0 = add(x[0], x[3]);
    let a1 = add(x[1], x[4]);
    let a2 = add(x[2], x[5]);
    let b0 = add(x[0], -x[3]);
    let b1 = add(x[1], -x[4]);
    let b2 = add(x[2], -x[5]);
    let a02 = add(a0, a2);
    let r0 = add(a02, a1);
    let r3 = add(a0, -a2);
    let r4 = add(a2, -a1);
    let b02 = add(b0, b2);
    let r5 = add(b02, -b1);
    let r1 = add(b0, b1);
    let r2 = -add(b1, b2);
    ([r0, r1, r2, r3, r4, r5], adds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::apply_matrix;

    #[test]
    fn published_rows() {
        let p6 = build_sft(6).unwrap();
        assert_eq!(p6.f.row_nums(0), &[1, 1, 1, 1, 1, 1]);
        let p4 = build_sft(4).unwrap();
        assert_eq!(p4.f.row_nums(3), &[1, -1, 1, -1]);
        assert!(build_sft(5).is_err());
    }

    #[test]
    fn inverse_six_matches_published_form() {
        let p6 = build_sft(6).unwrap();
        let want = RationalMatrix::from_rows(
            &[
                &[1, 1, 1, 1, 1, 1],
                &[1, -1, -2, -1, 1, 2],
                &[-1, -2, -1, 1, 2, 1],
                &[-1, -1, 2, -1, -1, 2],
                &[-2, 1, 1, -2, 1, 1],
                &[-1, 1, -1, 1, -1, 1],
            ],
            6,
        );
        assert_eq!(p6.inverse, want);
        assert_eq!(p6.inverse.row_nums(0), &[1, 1, 1, 1, 1, 1]);
        assert_eq!(p6.inverse.denominator(), 6);
        assert_eq!(rational_matmul(&p6.inverse.transpose(), &p6.f).unwrap(), cyclic_shift(6));
    }

    #[test]
    fn entries_are_unit() {
        for p in [3, 4, 6] {
            let plan = build_sft(p).unwrap();
            assert!(plan.f.numerators().iter().all(|v| (-1..=1).contains(v)));
            assert_eq!(rational_matmul(&plan.f, &plan.exact_inverse).unwrap(), RationalMatrix::identity(p));
        }
    }

    #[test]
    fn ones_vector() {
        let p6 = build_sft(6).unwrap();
        assert_eq!(apply_matrix(&p6.f, &[1.0; 6], 1).unwrap(), vec![6.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    /// Symbolic rows reproduce the numeric DFT `X_k = Σ x_p e^{-2πjkp/N}` after substituting `s`.
    #[test]
    fn symbolic_matches_numeric_dft() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for p in [3usize, 4, 6] {
            let plan = build_sft(p).unwrap();
            let s = plan.ring.s_value();
            for _ in 0..50 {
                let x: Vec<f64> = (0..p).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let fx = apply_matrix(&plan.f, &x, 1).unwrap();
                for (g, &k) in plan.groups.iter().zip(&plan.frequencies) {
                    let want = (0..p).fold((0.0, 0.0), |acc, q| {
                        let th = -2.0 * std::f64::consts::PI * (k * q) as f64 / p as f64;
                        (acc.0 + x[q] * th.cos(), acc.1 + x[q] * th.sin())
                    });
                    let got = match *g {
                        SymGroup::Real(r) => (fx[r], 0.0),
                        SymGroup::Complex(a, b) => (fx[a] + fx[b] * s.0, fx[b] * s.1),
                    };
                    assert!((got.0 - want.0).abs() < 1e-12 && (got.1 - want.1).abs() < 1e-12, "p={p} k={k}");
                }
            }
        }
    }

    #[test]
    fn fast_sft6_uses_fourteen_adds() {
        let p6 = build_sft(6).unwrap();
        let x = [0.5, -1.25, 2.5, 0.75, -0.5, 1.125];
        let (y, adds) = sft6_fast(&x);
        assert_eq!(adds, 14);
        assert_eq!(y.to_vec(), apply_matrix(&p6.f, &x, 1).unwrap());
        assert_eq!(p6.adds(), 14);
        assert_eq!(p6.row_adds(), 22);
    }
}
