use crate::catalog::AlgorithmSpec;
use crate::engine::{EngineError, TilingPlan};
use crate::tensor::{DenseTensor, NumMatrix};

/// Mean of `(Bᵀ x B)²` per transform coordinate over every tile, channel and
/// batch item of `x` (valid tiling, zero-padded partial tiles). Row-major `T × T`.
pub fn frequency_energy(x: &DenseTensor, spec: &AlgorithmSpec) -> Result<Vec<f64>, EngineError> {
    x.ensure_finite()?;
    let [b, c, h, w] = x.shape();
    let plan = TilingPlan::new(spec.m, spec.r, h, w, 0)?;
    let bt = NumMatrix::from_rational(&spec.bt);
    let (t, n) = (bt.rows, plan.tile_in);
    let d2 = bt.den * bt.den;
    let mut energy = vec![0.0; t * t];
    let (mut patch, mut tmp, mut v) = (vec![0.0; n * n], vec![0.0; t * n], vec![0.0; t * t]);
    let mut count = 0usize;
    for plane in x.data().chunks(h * w).take(b * c) {
        for p in 0..plan.tiles() {
            plan.gather(plane, h, w, p, &mut patch);
            bt.sandwich(&patch, &mut tmp, &mut v);
            for (e, val) in energy.iter_mut().zip(&v) {
                *e += (val / d2) * (val / d2);
            }
            count += 1;
        }
    }
    energy.iter_mut().for_each(|e| *e /= count as f64);
    Ok(energy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog_algorithm;
    use crate::quant::synth;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_input_lives_in_dc() {
        let spec = catalog_algorithm("sfc6-6x6-3x3").unwrap();
        // 14 = 2 full tiles of 6 outputs plus the 2-pixel halo
        let x = DenseTensor::from_fn([1, 1, 14, 14], |_, _, _, _| 1.0);
        let e = frequency_energy(&x, &spec).unwrap();
        let t = spec.t();
        for r in 1..8 {
            for c in 1..8 {
                assert!(e[r * t + c].abs() < 1e-20, "({r},{c})");
            }
        }
        assert!(e[0] > 0.0);
    }

    #[test]
    fn white_noise_follows_row_norms() {
        let spec = catalog_algorithm("sfc6-6x6-3x3").unwrap();
        let x = synth::gaussian([1, 4, 62, 62], &mut ChaCha8Rng::seed_from_u64(5));
        let e = frequency_energy(&x, &spec).unwrap();
        let t = spec.t();
        let norms: Vec<f64> =
            (0..t).map(|r| spec.bt.row_nums(r).iter().map(|&v| (v * v) as f64).sum()).collect();
        for r in 0..t {
            for c in 0..t {
                let want = norms[r] * norms[c];
                assert!((e[r * t + c] - want).abs() < 0.25 * want, "({r},{c}) {} vs {want}", e[r * t + c]);
            }
        }
    }

    #[test]
    fn onef_energy_falls_away_from_dc() {
        let spec = catalog_algorithm("sfc6-6x6-3x3").unwrap();
        let x = synth::onef([1, 4, 62, 62], &mut ChaCha8Rng::seed_from_u64(6));
        let e = frequency_energy(&x, &spec).unwrap();
        let t = spec.t();
        // DFT rows: 0 (DC), group k=1 rows 1,2, group k=2 rows 3,4, row 5 (k=3)
        let band = |rows: &[usize]| -> f64 {
            rows.iter().map(|&r| e[r * t]).sum::<f64>() / rows.len() as f64
        };
        let (dc, k1, k2, k3) = (band(&[0]), band(&[1, 2]), band(&[3, 4]), band(&[5]));
        assert!(dc > k1 && k1 > k2 && k2 > k3, "{dc} {k1} {k2} {k3}");
    }
}
