use half::f16;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{kappa, AnalysisError};
use crate::catalog::{direct_spec, AlgorithmSpec};
use crate::quant::quantize_value;
use crate::tensor::{rational_matmul, NumMatrix};

/// Rounding applied to the element-wise product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Precision {
    /// Both operands and the product rounded to binary16 (round to nearest even).
    Fp16Sim,
    /// Operands quantized symmetrically to `bits` with one min-max scale per operand vector.
    Int { bits: u32 },
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrorReport {
    pub algorithm: String,
    pub precision: Precision,
    pub mse: f64,
    /// `mse` divided by direct convolution's under the same rounding.
    pub mse_normalized: f64,
    pub kappa: f64,
    pub trials: usize,
    pub seed: u64,
}

fn h(v: f64) -> f64 {
    f16::from_f64(v).to_f64()
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial as u64))
}

fn normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

fn apply(m: &NumMatrix, x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; m.rows];
    m.mul_vec(x, &mut out);
    out.iter_mut().for_each(|v| *v /= m.den);
    out
}

fn round_products(u: &[f64], v: &[f64], p: Precision) -> Vec<f64> {
    match p {
        Precision::Fp16Sim => u.iter().zip(v).map(|(a, b)| h(h(*a) * h(*b))).collect(),
        Precision::Int { bits } => {
            let scale = |w: &[f64]| (w.iter().fold(0.0f64, |m, x| m.max(x.abs())) / crate::quant::qmax(bits) as f64).max(crate::quant::SCALE_FLOOR);
            let (su, sv) = (scale(u), scale(v));
            u.iter()
                .zip(v)
                .map(|(a, b)| {
                    (quantize_value(*a, su, bits) as i64 * quantize_value(*b, sv, bits) as i64) as f64 * su * sv
                })
                .collect()
        }
    }
}

/// Sum of squared output errors of the 1D algorithm over `trials` seeded
/// standard-normal tiles, and the number of outputs.
fn raw_mse(spec: &AlgorithmSpec, precision: Precision, trials: usize, seed: u64) -> f64 {
    let bt = NumMatrix::from_rational(&spec.bt);
    let g = NumMatrix::from_rational(&spec.g);
    let at = NumMatrix::from_rational(&spec.a.transpose());
    let (n, r, m) = (spec.tile_in(), spec.r, spec.m);
    let mut sse = 0.0;
    for trial in 0..trials {
        let mut rng = trial_rng(seed, trial);
        let x = normals(&mut rng, n);
        let f = normals(&mut rng, r);
        let s = round_products(&apply(&g, &f), &apply(&bt, &x), precision);
        let y = apply(&at, &s);
        for i in 0..m {
            let exact: f64 = (0..r).map(|k| x[i + k] * f[k]).sum();
            sse += (y[i] - exact).powi(2);
        }
    }
    sse / (trials * m) as f64
}

/// Output MSE of one 1D application per trial against the exact correlation,
/// normalized by direct convolution with the same kernel size, seed and rounding.
pub fn mse_experiment(
    spec: &AlgorithmSpec,
    precision: Precision,
    trials: usize,
    seed: u64,
) -> Result<ErrorReport, AnalysisError> {
    if trials == 0 {
        return Err(AnalysisError::InvalidArgument("trials must be positive".into()));
    }
    if let Precision::Int { bits } = precision {
        if !(2..=16).contains(&bits) {
            return Err(AnalysisError::InvalidArgument(format!("bit width {bits}")));
        }
    }
    let mse = raw_mse(spec, precision, trials, seed);
    let base = if spec.m == 1 { mse } else { raw_mse(&direct_spec(spec.r)?, precision, trials, seed) };
    Ok(ErrorReport {
        algorithm: spec.name.clone(),
        precision,
        mse,
        mse_normalized: mse / base,
        kappa: kappa(spec)?,
        trials,
        seed,
    })
}

/// Forward-error bound `κ · ‖δs‖/‖s‖`.
pub fn error_bound(spec: &AlgorithmSpec, delta_s_ratio: f64) -> Result<f64, AnalysisError> {
    if !(delta_s_ratio > 0.0) {
        return Err(AnalysisError::InvalidArgument("error ratio must be positive".into()));
    }
    Ok(kappa(spec)? * delta_s_ratio)
}

/// One trial of the bound check.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BoundTrial {
    /// `‖δy‖/‖y‖`.
    pub observed: f64,
    /// `‖δs‖/‖s‖`.
    pub input_ratio: f64,
    /// `κ · input_ratio`.
    pub bound: f64,
}

impl BoundTrial {
    pub fn holds(&self) -> bool {
        self.observed <= self.bound
    }
}

/// Runs the overlapped (transposed) form `y = Oᵀ s` on fp16-rounded products.
///
/// The transposed algorithm maps `M` inputs and `R` taps to the `M + R − 1`
/// full-convolution outputs through the square overlap transform `O`. Rows of
/// `Bᵀ` that repeat (or add) rows of `O` are folded into `s`, so `δy = Oᵀ δs`
/// exactly and the bound applies with `κ(O)`.
pub fn bound_trials(spec: &AlgorithmSpec, trials: usize, seed: u64) -> Result<Vec<BoundTrial>, AnalysisError> {
    let k = kappa(spec)?;
    let fold = rational_matmul(&spec.bt, &spec.overlap.inverse()?)?.transpose();
    let fold = NumMatrix::from_rational(&fold);
    let ot = NumMatrix::from_rational(&spec.overlap.transpose());
    let g = NumMatrix::from_rational(&spec.g);
    let a = NumMatrix::from_rational(&spec.a);
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut out = Vec::with_capacity(trials);
    for trial in 0..trials {
        let mut rng = trial_rng(seed, trial);
        let u = normals(&mut rng, spec.m);
        let f = normals(&mut rng, spec.r);
        let (gu, au) = (apply(&g, &f), apply(&a, &u));
        let exact: Vec<f64> = gu.iter().zip(&au).map(|(p, q)| p * q).collect();
        let rounded = round_products(&gu, &au, Precision::Fp16Sim);
        let (s, sh) = (apply(&fold, &exact), apply(&fold, &rounded));
        let (y, yh) = (apply(&ot, &s), apply(&ot, &sh));
        let ds: Vec<f64> = s.iter().zip(&sh).map(|(p, q)| q - p).collect();
        let dy: Vec<f64> = y.iter().zip(&yh).map(|(p, q)| q - p).collect();
        let input_ratio = norm(&ds) / norm(&s);
        out.push(BoundTrial { observed: norm(&dy) / norm(&y), input_ratio, bound: k * input_ratio });
    }
    Ok(out)
}
