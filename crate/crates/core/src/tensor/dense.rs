use serde::{Deserialize, Serialize};

use super::{RationalMatrix, TensorError};

/// Row-major NCHW tensor of real values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseTensor {
    shape: [usize; 4],
    data: Vec<f64>,
}

impl DenseTensor {
    pub fn new(shape: [usize; 4], data: Vec<f64>) -> Result<Self, TensorError> {
        let len: usize = shape.iter().product();
        if data.len() != len {
            return Err(TensorError::InvalidShape(format!(
                "shape {shape:?} needs {len} values, got {}",
                data.len()
            )));
        }
        Ok(DenseTensor { shape, data })
    }

    pub fn zeros(shape: [usize; 4]) -> Self {
        DenseTensor { shape, data: vec![0.0; shape.iter().product()] }
    }

    pub fn from_fn(shape: [usize; 4], mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(shape.iter().product());
        for n in 0..shape[0] {
            for c in 0..shape[1] {
                for h in 0..shape[2] {
                    for w in 0..shape[3] {
                        data.push(f(n, c, h, w));
                    }
                }
            }
        }
        DenseTensor { shape, data }
    }

    pub fn shape(&self) -> [usize; 4] {
        self.shape
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn index(&self, n: usize, c: usize, h: usize, w: usize) -> usize {
        ((n * self.shape[1] + c) * self.shape[2] + h) * self.shape[3] + w
    }

    #[inline]
    pub fn at(&self, n: usize, c: usize, h: usize, w: usize) -> f64 {
        self.data[self.index(n, c, h, w)]
    }

    pub fn set(&mut self, n: usize, c: usize, h: usize, w: usize, v: f64) {
        let i = self.index(n, c, h, w);
        self.data[i] = v;
    }

    pub fn ensure_finite(&self) -> Result<(), TensorError> {
        if self.data.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(TensorError::NonFinite)
        }
    }

    /// Largest |a-b| divided by the largest |b|.
    pub fn max_rel_error(&self, reference: &DenseTensor) -> f64 {
        let scale = reference.data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let err = self
            .data
            .iter()
            .zip(&reference.data)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        if scale == 0.0 {
            err
        } else {
            err / scale
        }
    }

    pub fn mse(&self, reference: &DenseTensor) -> f64 {
        let n = self.data.len().max(1) as f64;
        self.data.iter().zip(&reference.data).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / n
    }
}

/// Shape of one convolution layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerConfig {
    pub in_channels: usize,
    pub out_channels: usize,
    pub height: usize,
    pub width: usize,
    /// Kernel edge R.
    pub kernel: usize,
    #[serde(default = "one")]
    pub stride: usize,
    #[serde(default)]
    pub padding: usize,
}

fn one() -> usize {
    1
}

impl LayerConfig {
    pub fn output_hw(&self) -> Result<(usize, usize), TensorError> {
        let h = self.height + 2 * self.padding;
        let w = self.width + 2 * self.padding;
        if self.stride == 0 || h < self.kernel || w < self.kernel {
            return Err(TensorError::InvalidShape(format!("kernel {} does not fit {h}x{w}", self.kernel)));
        }
        Ok(((h - self.kernel) / self.stride + 1, (w - self.kernel) / self.stride + 1))
    }

    pub fn validate(&self) -> Result<(), TensorError> {
        if self.in_channels == 0 || self.out_channels == 0 || self.kernel == 0 {
            return Err(TensorError::InvalidShape("zero-sized layer".into()));
        }
        self.output_hw().map(|_| ())
    }

    /// Parses a JSON array of layer objects.
    pub fn list_from_json(text: &str) -> Result<Vec<LayerConfig>, TensorError> {
        let layers: Vec<LayerConfig> = serde_json::from_str(text).map_err(|e| TensorError::Format(e.to_string()))?;
        for l in &layers {
            l.validate()?;
        }
        Ok(layers)
    }
}

/// A transform matrix in floating point, with the denominator kept separate.
#[derive(Clone, Debug, PartialEq)]
pub struct NumMatrix {
    pub rows: usize,
    pub cols: usize,
    pub num: Vec<f64>,
    pub den: f64,
}

impl NumMatrix {
    pub fn from_rational(m: &RationalMatrix) -> Self {
        NumMatrix {
            rows: m.rows(),
            cols: m.cols(),
            num: m.numerators().iter().map(|&v| v as f64).collect(),
            den: m.denominator() as f64,
        }
    }

    /// `num · x` for a vector, accumulated left to right. The denominator is not applied.
    pub fn mul_vec(&self, x: &[f64], out: &mut [f64]) {
        for r in 0..self.rows {
            let row = &self.num[r * self.cols..(r + 1) * self.cols];
            let mut acc = 0.0;
            for (a, b) in row.iter().zip(x) {
                if *a != 0.0 {
                    acc += a * b;
                }
            }
            out[r] = acc;
        }
    }

    /// `num · X · numᵀ` for a square `cols × cols` tile, without the denominator.
    pub fn sandwich(&self, x: &[f64], tmp: &mut [f64], out: &mut [f64]) {
        let (r, c) = (self.rows, self.cols);
        // tmp = num · X   (r × c)
        for i in 0..r {
            let row = &self.num[i * c..(i + 1) * c];
            for j in 0..c {
                let mut acc = 0.0;
                for k in 0..c {
                    if row[k] != 0.0 {
                        acc += row[k] * x[k * c + j];
                    }
                }
                tmp[i * c + j] = acc;
            }
        }
        // out = tmp · numᵀ   (r × r)
        for i in 0..r {
            for j in 0..r {
                let row = &self.num[j * c..(j + 1) * c];
                let mut acc = 0.0;
                for k in 0..c {
                    if row[k] != 0.0 {
                        acc += tmp[i * c + k] * row[k];
                    }
                }
                out[i * r + j] = acc;
            }
        }
    }

    /// `numᵀ · Y · num` for a square `rows × rows` tile, without the denominator.
    pub fn sandwich_t(&self, y: &[f64], tmp: &mut [f64], out: &mut [f64]) {
        let (r, c) = (self.rows, self.cols);
        // tmp = numᵀ · Y   (c × r)
        for i in 0..c {
            for j in 0..r {
                let mut acc = 0.0;
                for k in 0..r {
                    let a = self.num[k * c + i];
                    if a != 0.0 {
                        acc += a * y[k * r + j];
                    }
                }
                tmp[i * r + j] = acc;
            }
        }
        // out = tmp · num   (c × c)
        for i in 0..c {
            for j in 0..c {
                let mut acc = 0.0;
                for k in 0..r {
                    let a = self.num[k * c + j];
                    if a != 0.0 {
                        acc += tmp[i * r + k] * a;
                    }
                }
                out[i * c + j] = acc;
            }
        }
    }
}

/// Applies an exact matrix to the columns of `x` (shape `m.cols × ncols`, row-major).
///
/// Entries are converted to real at call time; each output accumulates left to
/// right over numerators and is divided by the denominator once.
pub fn apply_matrix(m: &RationalMatrix, x: &[f64], ncols: usize) -> Result<Vec<f64>, TensorError> {
    if ncols == 0 || x.len() != m.cols() * ncols {
        return Err(TensorError::DimensionMismatch(format!(
            "matrix with {} columns applied to {} values in {} columns",
            m.cols(),
            x.len(),
            ncols
        )));
    }
    let d = m.denominator() as f64;
    let mut out = vec![0.0; m.rows() * ncols];
    for r in 0..m.rows() {
        let row = m.row_nums(r);
        for j in 0..ncols {
            let mut acc = 0.0;
            for (k, &a) in row.iter().enumerate() {
                acc += a as f64 * x[k * ncols + j];
            }
            out[r * ncols + j] = acc / d;
        }
    }
    Ok(out)
}
