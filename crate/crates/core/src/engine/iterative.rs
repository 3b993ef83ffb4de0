//! Large-kernel depthwise convolution by nesting two fast algorithms.
//!
//! With block edge `b`, outputs and kernel taps split as `i = i1 + b·i2` and
//! `k = k1 + b·k2`, so `y[i] = Σ_{k2} Σ_{k1} x[(i1 + k1) + b·(i2 + k2)] f[k]`.
//! The inner sum is an `F(b, b)` problem on the input block starting at
//! `b·(i2 + k2)`; the outer sum is a correlation over block indices whose
//! "scalars" are inner transform-domain tiles. The outer product of two such
//! tiles is the inner element-wise product, so multiplications compose.

use serde::Serialize;

use super::EngineError;
use crate::catalog::symbolic::{sandwich, sandwich_t, Reducer};
use crate::catalog::{AlgorithmSpec, RingElem};
use crate::tensor::{DenseTensor, NumMatrix};

/// An inner transform-domain tile used as one outer-algorithm element.
#[derive(Clone)]
struct Block<'a> {
    v: Vec<f64>,
    inner: &'a Reducer,
}

impl RingElem for Block<'_> {
    fn add(&self, o: &Self) -> Self {
        Block { v: self.v.iter().zip(&o.v).map(|(a, b)| a + b).collect(), inner: self.inner }
    }

    fn scale(&self, c: f64) -> Self {
        Block { v: self.v.iter().map(|a| a * c).collect(), inner: self.inner }
    }

    fn mul(&self, o: &Self, count: &mut u64) -> Self {
        Block { v: self.inner.product_2d(&self.v, &o.v, count), inner: self.inner }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IterativeOutput {
    #[serde(skip)]
    pub output: DenseTensor,
    pub mults: u64,
    /// Multiplications of direct convolution for the same output.
    pub direct_mults: u64,
    pub block: usize,
    pub outer_tiles: usize,
}

impl IterativeOutput {
    pub fn ratio(&self) -> f64 {
        self.mults as f64 / self.direct_mults as f64
    }
}

struct Level {
    k: NumMatrix,
    l: NumMatrix,
    a: NumMatrix,
    reducer: Reducer,
    scale: f64,
}

impl Level {
    fn new(spec: &AlgorithmSpec) -> Result<Self, EngineError> {
        let s = &spec.symbolic;
        let (k, l, a) = (NumMatrix::from_rational(&s.k), NumMatrix::from_rational(&s.l), NumMatrix::from_rational(&s.a));
        let d = k.den * l.den * a.den;
        Ok(Level { k, l, a, reducer: s.reducer()?, scale: d * d })
    }
}

/// Depthwise valid correlation of `x` (`[B, C, H, W]`) with `f` (`[C, 1, K, K]`).
///
/// `inner` must have `M = R = b`; the outer algorithm's taps must cover the
/// kernel (`b·R_outer ≥ K`). The output is tiled in `b·M_outer` squares.
pub fn iterative_conv2d(
    x: &DenseTensor,
    f: &DenseTensor,
    inner: &AlgorithmSpec,
    outer: &AlgorithmSpec,
) -> Result<IterativeOutput, EngineError> {
    let [batch, c, h, w] = x.shape();
    let [fc, one, kh, kw] = f.shape();
    if fc != c || one != 1 || kh != kw {
        return Err(EngineError::Shape(format!("depthwise filter {:?} for input {:?}", f.shape(), x.shape())));
    }
    let k = kh;
    if h < k || w < k {
        return Err(EngineError::Shape(format!("{k}x{k} kernel larger than {h}x{w} input")));
    }
    let b = inner.m;
    if inner.r != b {
        return Err(EngineError::Unsupported(format!(
            "inner algorithm {} must have equal output and kernel edges",
            inner.name
        )));
    }
    let (m2, r2) = (outer.m, outer.r);
    if b * r2 < k {
        return Err(EngineError::Unsupported(format!(
            "{}x{} blocks of {} taps cover {} kernel taps, need {k}",
            r2,
            r2,
            b,
            b * r2
        )));
    }
    x.ensure_finite()?;
    f.ensure_finite()?;
    let (oh, ow) = (h - k + 1, w - k + 1);
    let span = b * m2;
    let (th, tw) = (oh.div_ceil(span), ow.div_ceil(span));
    let l1 = Level::new(inner)?;
    let l2 = Level::new(outer)?;
    let t1 = l1.k.rows;
    let pin = 2 * b - 1;
    let nb = m2 + r2 - 1;
    let scale = l1.scale * l2.scale;
    let mut out = DenseTensor::zeros([batch, c, oh, ow]);
    let mut mults = 0u64;
    let mut tmp = vec![0.0; t1 * pin.max(b)];
    for ch in 0..c {
        let ker = &f.data()[ch * k * k..(ch + 1) * k * k];
        // filter side: kernel blocks through the inner then the outer transform
        let mut fblocks = Vec::with_capacity(r2 * r2);
        for k2 in 0..r2 {
            for l2i in 0..r2 {
                let mut blk = vec![0.0; b * b];
                for i in 0..b {
                    for j in 0..b {
                        let (y, xx) = (k2 * b + i, l2i * b + j);
                        if y < k && xx < k {
                            blk[i * b + j] = ker[y * k + xx];
                        }
                    }
                }
                let mut v = vec![0.0; t1 * t1];
                l1.l.sandwich(&blk, &mut tmp, &mut v);
                fblocks.push(Block { v, inner: &l1.reducer });
            }
        }
        let u = sandwich(&l2.l, &fblocks);
        for n in 0..batch {
            let plane = &x.data()[(n * c + ch) * h * w..(n * c + ch + 1) * h * w];
            for ty in 0..th {
                for tx in 0..tw {
                    let (y0, x0) = (ty * span, tx * span);
                    let mut xblocks = Vec::with_capacity(nb * nb);
                    for j1 in 0..nb {
                        for j2 in 0..nb {
                            let mut patch = vec![0.0; pin * pin];
                            for i in 0..pin {
                                for j in 0..pin {
                                    let (y, xx) = (y0 + j1 * b + i, x0 + j2 * b + j);
                                    if y < h && xx < w {
                                        patch[i * pin + j] = plane[y * w + xx];
                                    }
                                }
                            }
                            let mut v = vec![0.0; t1 * t1];
                            l1.k.sandwich(&patch, &mut tmp, &mut v);
                            xblocks.push(Block { v, inner: &l1.reducer });
                        }
                    }
                    let v = sandwich(&l2.k, &xblocks);
                    let p = l2.reducer.product_2d(&u, &v, &mut mults);
                    let ys = sandwich_t(&l2.a, &p);
                    for (bi, blk) in ys.iter().enumerate() {
                        let (i2, j2) = (bi / m2, bi % m2);
                        let mut yb = vec![0.0; b * b];
                        l1.a.sandwich_t(&blk.v, &mut tmp, &mut yb);
                        for i in 0..b {
                            for j in 0..b {
                                let (y, xx) = (y0 + i2 * b + i, x0 + j2 * b + j);
                                if y < oh && xx < ow {
                                    out.set(n, ch, y, xx, yb[i * b + j] / scale);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let direct_mults = (batch * c * oh * ow * k * k) as u64;
    Ok(IterativeOutput { output: out, mults, direct_mults, block: b, outer_tiles: batch * c * th * tw })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog_algorithm;
    use crate::engine::direct_conv2d;
    use crate::tensor::LayerConfig;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn depthwise_direct(x: &DenseTensor, f: &DenseTensor) -> DenseTensor {
        let [b, c, h, w] = x.shape();
        let k = f.shape()[2];
        let mut out = DenseTensor::zeros([b, c, h - k + 1, w - k + 1]);
        for ch in 0..c {
            let xs = DenseTensor::from_fn([b, 1, h, w], |n, _, i, j| x.at(n, ch, i, j));
            let fs = DenseTensor::from_fn([1, 1, k, k], |_, _, i, j| f.at(ch, 0, i, j));
            let cfg = LayerConfig { in_channels: 1, out_channels: 1, height: h, width: w, kernel: k, stride: 1, padding: 0 };
            let y = direct_conv2d(&xs, &fs, &cfg).unwrap();
            for n in 0..b {
                for i in 0..h - k + 1 {
                    for j in 0..w - k + 1 {
                        out.set(n, ch, i, j, y.at(n, 0, i, j));
                    }
                }
            }
        }
        out
    }

    #[test]
    fn small_nesting_matches_direct() {
        let inner = catalog_algorithm("sfc4-3x3-3x3").unwrap();
        let outer = catalog_algorithm("wino-2x2-3x3").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = crate::quant::synth::gaussian([1, 2, 16, 16], &mut rng);
        let f = crate::quant::synth::gaussian([2, 1, 8, 8], &mut rng);
        let r = iterative_conv2d(&x, &f, &inner, &outer).unwrap();
        assert!(r.output.max_rel_error(&depthwise_direct(&x, &f)) < 1e-10);
        assert_eq!(r.mults, (r.outer_tiles * inner.mults_reduced * outer.mults_reduced) as u64);
    }

    #[test]
    fn delta_kernel_is_a_crop() {
        let inner = catalog_algorithm("sfc4-3x3-3x3").unwrap();
        let outer = catalog_algorithm("wino-2x2-3x3").unwrap();
        let x = DenseTensor::from_fn([1, 1, 14, 14], |_, _, i, j| (i * 14 + j) as f64);
        let f = DenseTensor::from_fn([1, 1, 7, 7], |_, _, i, j| (i == 3 && j == 3) as u8 as f64);
        let r = iterative_conv2d(&x, &f, &inner, &outer).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                assert!((r.output.at(0, 0, i, j) - x.at(0, 0, i + 3, j + 3)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn unequal_inner_edges_rejected() {
        let inner = catalog_algorithm("sfc6-6x6-5x5").unwrap();
        let outer = catalog_algorithm("sfc6-6x6-5x5").unwrap();
        let r = iterative_conv2d(&DenseTensor::zeros([1, 1, 54, 54]), &DenseTensor::zeros([1, 1, 29, 29]), &inner, &outer);
        assert!(matches!(r, Err(EngineError::Unsupported(_))));
    }
}
