//! Synthetic feature maps: white Gaussian noise and 1/f spectral fields.

use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::QuantError;
use crate::tensor::DenseTensor;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Synthetic {
    Gaussian,
    /// Amplitude spectrum falling as `1/|k|`, like natural images.
    OneF,
}

impl FromStr for Synthetic {
    type Err = QuantError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gaussian" => Ok(Synthetic::Gaussian),
            "onef" => Ok(Synthetic::OneF),
            _ => Err(QuantError::InvalidGrouping(format!("unknown generator `{s}`"))),
        }
    }
}

impl Synthetic {
    pub fn generate<R: Rng>(self, shape: [usize; 4], rng: &mut R) -> DenseTensor {
        match self {
            Synthetic::Gaussian => gaussian(shape, rng),
            Synthetic::OneF => onef(shape, rng),
        }
    }
}

pub fn gaussian<R: Rng>(shape: [usize; 4], rng: &mut R) -> DenseTensor {
    let n = shape.iter().product();
    let data = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    DenseTensor::new(shape, data).expect("length matches shape")
}

fn signed_freq(k: usize, n: usize) -> f64 {
    if k <= n / 2 {
        k as f64
    } else {
        k as f64 - n as f64
    }
}

/// Each `H × W` plane is an independent zero-mean field with unit variance.
pub fn onef<R: Rng>(shape: [usize; 4], rng: &mut R) -> DenseTensor {
    let [b, c, h, w] = shape;
    let mut planner = FftPlanner::<f64>::new();
    let (row_fft, col_fft) = (planner.plan_fft_inverse(w), planner.plan_fft_inverse(h));
    let mut data = Vec::with_capacity(b * c * h * w);
    for _ in 0..b * c {
        let mut spec: Vec<Complex<f64>> = Vec::with_capacity(h * w);
        for y in 0..h {
            for x in 0..w {
                let (fy, fx) = (signed_freq(y, h) / h as f64, signed_freq(x, w) / w as f64);
                let r = (fy * fy + fx * fx).sqrt();
                let amp = if r == 0.0 { 0.0 } else { 1.0 / r };
                let (re, im): (f64, f64) = (rng.sample(StandardNormal), rng.sample(StandardNormal));
                spec.push(Complex::new(re * amp, im * amp));
            }
        }
        for row in spec.chunks_mut(w) {
            row_fft.process(row);
        }
        let mut col = vec![Complex::new(0.0, 0.0); h];
        for x in 0..w {
            for y in 0..h {
                col[y] = spec[y * w + x];
            }
            col_fft.process(&mut col);
            for y in 0..h {
                spec[y * w + x] = col[y];
            }
        }
        let plane: Vec<f64> = spec.iter().map(|z| z.re).collect();
        let mean = plane.iter().sum::<f64>() / plane.len() as f64;
        let var = plane.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / plane.len() as f64;
        let sd = if var > 0.0 { var.sqrt() } else { 1.0 };
        data.extend(plane.iter().map(|v| (v - mean) / sd));
    }
    DenseTensor::new(shape, data).expect("length matches shape")
}
