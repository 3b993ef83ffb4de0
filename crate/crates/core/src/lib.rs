//! Fast 2D convolution with Symbolic Fourier Convolution (SFC), Winograd and
//! direct algorithms, plus quantization simulation and error analysis.
//!
//! Convolution here is correlation, as in CNN practice: `y[i,j] = Σ x[i+k, j+l]·f[k,l]`.

pub mod catalog;
pub mod tensor;
pub mod engine;
pub mod quant;
pub mod analysis;
