use std::thread;

use serde::Serialize;

use super::direct::check_shapes;
use super::tiling::TilingPlan;
use super::EngineError;
use crate::catalog::symbolic::Reducer;
use crate::catalog::AlgorithmSpec;
use crate::quant::{calibrate, quantize, quantized_elementwise_multiply, QTiles, QuantConfig, TileLayout};
use crate::tensor::{DenseTensor, LayerConfig, NumMatrix};

/// Which element-wise product the engine executes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProductPath {
    /// `T × T` real products per tile and channel pair.
    #[default]
    Full,
    /// Symbolic coordinates with the conjugate-symmetry reduction.
    Reduced,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FastConvOptions {
    pub threads: usize,
    pub quant: Option<QuantConfig>,
    pub path: ProductPath,
}

impl Default for FastConvOptions {
    fn default() -> Self {
        FastConvOptions { threads: 1, quant: None, path: ProductPath::Full }
    }
}

#[derive(Clone, Debug)]
pub struct FastConvOutput {
    pub output: DenseTensor,
    /// Element-wise multiplications executed.
    pub mults: u64,
    pub plan: TilingPlan,
}

/// `G f Gᵀ` for every `(out_channel, in_channel)` pair, as numerators.
#[derive(Clone, Debug)]
pub struct TransformedFilterBank {
    pub out_channels: usize,
    pub in_channels: usize,
    /// Tile edge (rows of `G`).
    pub t: usize,
    /// `[out_channels, in_channels, t, t]`; divide by `den` for real values.
    pub data: Vec<f64>,
    pub den: f64,
    /// Integer copy and scales when quantized.
    pub quantized: Option<QTiles>,
}

impl TransformedFilterBank {
    pub fn tile(&self, oc: usize, ic: usize) -> &[f64] {
        let tt = self.t * self.t;
        let i = oc * self.in_channels + ic;
        &self.data[i * tt..(i + 1) * tt]
    }
}

fn bank_with(
    f: &DenseTensor,
    r: usize,
    g: &NumMatrix,
    quant: Option<&QuantConfig>,
) -> Result<TransformedFilterBank, EngineError> {
    let [oc, ic, r1, r2] = f.shape();
    if r1 != r || r2 != r || g.cols != r {
        return Err(EngineError::Shape(format!("filter {:?} does not fit a {r}x{r} transform", f.shape())));
    }
    f.ensure_finite()?;
    let t = g.rows;
    let mut data = vec![0.0; oc * ic * t * t];
    let mut tmp = vec![0.0; t * r];
    for (i, ker) in f.data().chunks(r * r).enumerate() {
        g.sandwich(ker, &mut tmp, &mut data[i * t * t..(i + 1) * t * t]);
    }
    let quantized = match quant {
        None => None,
        Some(q) => {
            q.validate()?;
            let layout = TileLayout { channels: oc, tiles: ic, t };
            let scales = calibrate(&[&data], &layout, q.filter_bits, q.filter_grouping, q.calibration)?;
            Some(quantize(&data, &layout, q.filter_bits, q.filter_grouping, Some(&scales))?)
        }
    };
    Ok(TransformedFilterBank { out_channels: oc, in_channels: ic, t, data, den: g.den * g.den, quantized })
}

/// Filter transform of a `[out_ch, in_ch, R, R]` filter, quantized per `quant` if given.
pub fn transform_filters(
    f: &DenseTensor,
    spec: &AlgorithmSpec,
    quant: Option<&QuantConfig>,
) -> Result<TransformedFilterBank, EngineError> {
    bank_with(f, spec.r, &NumMatrix::from_rational(&spec.g), quant)
}

/// Runs `work(tile)` for every tile, split into contiguous chunks over `threads`
/// workers. Results come back in tile order, so the output does not depend on
/// the thread count.
fn for_tiles<T: Send>(
    tiles: usize,
    threads: usize,
    work: impl Fn(usize) -> Result<T, EngineError> + Sync,
) -> Result<Vec<T>, EngineError> {
    let threads = threads.clamp(1, tiles.max(1));
    if threads == 1 {
        return (0..tiles).map(&work).collect();
    }
    let chunk = tiles.div_ceil(threads);
    let work = &work;
    let parts: Vec<Result<Vec<T>, EngineError>> = thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|k| s.spawn(move || (k * chunk..((k + 1) * chunk).min(tiles)).map(work).collect()))
            .collect();
        handles.into_iter().map(|h| h.join().expect("tile worker panicked")).collect()
    });
    let mut out = Vec::with_capacity(tiles);
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

/// Fast convolution with default options (single thread, full product).
pub fn fast_conv2d(
    x: &DenseTensor,
    f: &DenseTensor,
    cfg: &LayerConfig,
    spec: &AlgorithmSpec,
    quant: Option<&QuantConfig>,
) -> Result<DenseTensor, EngineError> {
    let opts = FastConvOptions { quant: quant.copied(), ..FastConvOptions::default() };
    Ok(fast_conv2d_with(x, f, cfg, spec, &opts)?.output)
}

pub fn fast_conv2d_with(
    x: &DenseTensor,
    f: &DenseTensor,
    cfg: &LayerConfig,
    spec: &AlgorithmSpec,
    opts: &FastConvOptions,
) -> Result<FastConvOutput, EngineError> {
    check_shapes(x, f, cfg)?;
    if cfg.stride != 1 {
        return Err(EngineError::Unsupported(format!("fast algorithms need stride 1, got {}", cfg.stride)));
    }
    if spec.r != cfg.kernel {
        return Err(EngineError::Shape(format!("{} has a {}x{} kernel, layer has {}", spec.name, spec.r, spec.r, cfg.kernel)));
    }
    if opts.threads == 0 {
        return Err(EngineError::Unsupported("thread count must be at least 1".into()));
    }
    let plan = TilingPlan::new(spec.m, spec.r, cfg.height, cfg.width, cfg.padding)?;
    match (opts.quant, opts.path) {
        (Some(q), ProductPath::Full) => run_quantized(x, f, spec, &plan, &q, opts.threads),
        (Some(_), ProductPath::Reduced) => {
            Err(EngineError::Unsupported("quantization runs on the full product path".into()))
        }
        (None, ProductPath::Full) => {
            let bt = NumMatrix::from_rational(&spec.bt);
            let a = NumMatrix::from_rational(&spec.a);
            let bank = bank_with(f, spec.r, &NumMatrix::from_rational(&spec.g), None)?;
            run_float(x, &bank, &bt, &a, None, &plan, opts.threads)
        }
        (None, ProductPath::Reduced) => {
            let sym = &spec.symbolic;
            let k = NumMatrix::from_rational(&sym.k);
            let a = NumMatrix::from_rational(&sym.a);
            let bank = bank_with(f, spec.r, &NumMatrix::from_rational(&sym.l), None)?;
            let reducer = sym.reducer()?;
            run_float(x, &bank, &k, &a, Some(&reducer), &plan, opts.threads)
        }
    }
}

fn run_float(
    x: &DenseTensor,
    bank: &TransformedFilterBank,
    bt: &NumMatrix,
    a: &NumMatrix,
    reducer: Option<&Reducer>,
    plan: &TilingPlan,
    threads: usize,
) -> Result<FastConvOutput, EngineError> {
    let [b, cin, h, w] = x.shape();
    let (cout, t, n, m) = (bank.out_channels, bt.rows, plan.tile_in, plan.tile_out);
    let tt = t * t;
    let scale = bank.den * bt.den * bt.den * a.den * a.den;
    let tiles = plan.tiles();
    let xd = x.data();
    let results = for_tiles(b * tiles, threads, |job| {
        let (batch, p) = (job / tiles, job % tiles);
        let mut patch = vec![0.0; n * n];
        let mut tmp = vec![0.0; t * n.max(m)];
        let mut v = vec![0.0; cin * tt];
        for ic in 0..cin {
            let plane = &xd[(batch * cin + ic) * h * w..(batch * cin + ic + 1) * h * w];
            plan.gather(plane, h, w, p, &mut patch);
            bt.sandwich(&patch, &mut tmp, &mut v[ic * tt..(ic + 1) * tt]);
        }
        let mut count = 0u64;
        let mut out = vec![0.0; cout * m * m];
        let mut acc = vec![0.0; tt];
        for oc in 0..cout {
            acc.iter_mut().for_each(|e| *e = 0.0);
            for ic in 0..cin {
                let u = bank.tile(oc, ic);
                let vi = &v[ic * tt..(ic + 1) * tt];
                match reducer {
                    None => {
                        for c in 0..tt {
                            acc[c] += u[c] * vi[c];
                        }
                        count += tt as u64;
                    }
                    Some(r) => {
                        let prod = r.product_2d(u, vi, &mut count);
                        for c in 0..tt {
                            acc[c] += prod[c];
                        }
                    }
                }
            }
            let y = &mut out[oc * m * m..(oc + 1) * m * m];
            a.sandwich_t(&acc, &mut tmp, y);
            y.iter_mut().for_each(|e| *e /= scale);
        }
        Ok((out, count))
    })?;
    let mut output = DenseTensor::zeros([b, cout, plan.out_h, plan.out_w]);
    let plane_len = plan.out_h * plan.out_w;
    let mut mults = 0;
    for (job, (tile, count)) in results.iter().enumerate() {
        let (batch, p) = (job / tiles, job % tiles);
        mults += count;
        for oc in 0..cout {
            let off = (batch * cout + oc) * plane_len;
            plan.scatter(&tile[oc * m * m..(oc + 1) * m * m], p, &mut output.data_mut()[off..off + plane_len]);
        }
    }
    Ok(FastConvOutput { output, mults, plan: *plan })
}

/// Quantized path: activations are calibrated per batch item over all tiles and
/// channels, products accumulate in 32-bit integers over input channels, and each
/// coordinate is dequantized before the output transform.
fn run_quantized(
    x: &DenseTensor,
    f: &DenseTensor,
    spec: &AlgorithmSpec,
    plan: &TilingPlan,
    q: &QuantConfig,
    threads: usize,
) -> Result<FastConvOutput, EngineError> {
    q.validate()?;
    let bt = NumMatrix::from_rational(&spec.bt);
    let a = NumMatrix::from_rational(&spec.a);
    let bank = transform_filters(f, spec, Some(q))?;
    let qf = bank.quantized.as_ref().expect("quantized bank");
    let [b, cin, h, w] = x.shape();
    let (cout, t, n, m) = (bank.out_channels, bt.rows, plan.tile_in, plan.tile_out);
    let tt = t * t;
    let tiles = plan.tiles();
    let scale = bank.den * bt.den * bt.den * a.den * a.den;
    let xd = x.data();
    let mut output = DenseTensor::zeros([b, cout, plan.out_h, plan.out_w]);
    let plane_len = plan.out_h * plan.out_w;
    let mut mults = 0u64;
    for batch in 0..b {
        // transformed activations laid out [in_channel, tile, t, t]
        let per_tile = for_tiles(tiles, threads, |p| {
            let mut patch = vec![0.0; n * n];
            let mut tmp = vec![0.0; t * n];
            let mut v = vec![0.0; cin * tt];
            for ic in 0..cin {
                let plane = &xd[(batch * cin + ic) * h * w..(batch * cin + ic + 1) * h * w];
                plan.gather(plane, h, w, p, &mut patch);
                bt.sandwich(&patch, &mut tmp, &mut v[ic * tt..(ic + 1) * tt]);
            }
            Ok(v)
        })?;
        let mut v = vec![0.0; cin * tiles * tt];
        for (p, tile) in per_tile.iter().enumerate() {
            for ic in 0..cin {
                v[(ic * tiles + p) * tt..(ic * tiles + p + 1) * tt].copy_from_slice(&tile[ic * tt..(ic + 1) * tt]);
            }
        }
        let layout = TileLayout { channels: cin, tiles, t };
        let scales = calibrate(&[&v], &layout, q.act_bits, q.act_grouping, q.calibration)?;
        let qa = quantize(&v, &layout, q.act_bits, q.act_grouping, Some(&scales))?;
        let acc = quantized_elementwise_multiply(&qa, qf)?.dequantize();
        mults += (cout * cin * tiles * tt) as u64;
        let outs = for_tiles(tiles, threads, |p| {
            let mut tmp = vec![0.0; t * m];
            let mut out = vec![0.0; cout * m * m];
            for oc in 0..cout {
                let y = &mut out[oc * m * m..(oc + 1) * m * m];
                a.sandwich_t(&acc[(oc * tiles + p) * tt..(oc * tiles + p + 1) * tt], &mut tmp, y);
                y.iter_mut().for_each(|e| *e /= scale);
            }
            Ok(out)
        })?;
        for (p, tile) in outs.iter().enumerate() {
            for oc in 0..cout {
                let off = (batch * cout + oc) * plane_len;
                plan.scatter(&tile[oc * m * m..(oc + 1) * m * m], p, &mut output.data_mut()[off..off + plane_len]);
            }
        }
    }
    Ok(FastConvOutput { output, mults, plan: *plan })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog_algorithm;
    use crate::engine::direct_conv2d;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn layer(c: usize, o: usize, hw: usize, r: usize, p: usize) -> LayerConfig {
        LayerConfig { in_channels: c, out_channels: o, height: hw, width: hw, kernel: r, stride: 1, padding: p }
    }

    fn random(shape: [usize; 4], seed: u64) -> DenseTensor {
        crate::quant::synth::gaussian(shape, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    #[test]
    fn sfc6_matches_direct() {
        let cfg = layer(3, 2, 13, 3, 1);
        let x = random([2, 3, 13, 13], 1);
        let f = random([2, 3, 3, 3], 2);
        let spec = catalog_algorithm("sfc6-6x6-3x3").unwrap();
        let y = fast_conv2d(&x, &f, &cfg, &spec, None).unwrap();
        assert!(y.max_rel_error(&direct_conv2d(&x, &f, &cfg).unwrap()) <= 1e-10);
    }

    #[test]
    fn wino43_matches_direct() {
        let cfg = layer(2, 2, 11, 3, 0);
        let x = random([1, 2, 11, 11], 3);
        let f = random([2, 2, 3, 3], 4);
        let spec = catalog_algorithm("wino-4x4-3x3").unwrap();
        let y = fast_conv2d(&x, &f, &cfg, &spec, None).unwrap();
        assert!(y.max_rel_error(&direct_conv2d(&x, &f, &cfg).unwrap()) <= 1e-8);
    }

    #[test]
    fn reduced_path_matches_and_counts() {
        let cfg = layer(2, 3, 12, 3, 0);
        let x = random([1, 2, 12, 12], 5);
        let f = random([3, 2, 3, 3], 6);
        let spec = catalog_algorithm("sfc6-6x6-3x3").unwrap();
        let opts = FastConvOptions { path: ProductPath::Reduced, ..FastConvOptions::default() };
        let r = fast_conv2d_with(&x, &f, &cfg, &spec, &opts).unwrap();
        assert!(r.output.max_rel_error(&direct_conv2d(&x, &f, &cfg).unwrap()) <= 1e-10);
        assert_eq!(r.mults, 88 * 2 * 3 * r.plan.tiles() as u64);
        let full = fast_conv2d_with(&x, &f, &cfg, &spec, &FastConvOptions::default()).unwrap();
        assert_eq!(full.mults, 100 * 2 * 3 * full.plan.tiles() as u64);
    }

    #[test]
    fn zero_filter_gives_zero() {
        let cfg = layer(1, 1, 9, 3, 0);
        let spec = catalog_algorithm("sfc4-4x4-3x3").unwrap();
        let y = fast_conv2d(&random([1, 1, 9, 9], 7), &DenseTensor::zeros([1, 1, 3, 3]), &cfg, &spec, None).unwrap();
        assert!(y.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn stride_two_rejected() {
        let cfg = LayerConfig { stride: 2, ..layer(1, 1, 9, 3, 0) };
        let spec = catalog_algorithm("sfc4-4x4-3x3").unwrap();
        let r = fast_conv2d(&DenseTensor::zeros([1, 1, 9, 9]), &DenseTensor::zeros([1, 1, 3, 3]), &cfg, &spec, None);
        assert!(matches!(r, Err(EngineError::Unsupported(_))));
    }

    #[test]
    fn kernel_mismatch_rejected() {
        let cfg = layer(1, 1, 9, 5, 0);
        let spec = catalog_algorithm("sfc4-4x4-3x3").unwrap();
        let r = fast_conv2d(&DenseTensor::zeros([1, 1, 9, 9]), &DenseTensor::zeros([1, 1, 5, 5]), &cfg, &spec, None);
        assert!(matches!(r, Err(EngineError::Shape(_))));
    }

    #[test]
    fn ones_filter_dc_coefficient() {
        let spec = catalog_algorithm("sfc6-6x6-3x3").unwrap();
        let bank = transform_filters(&DenseTensor::from_fn([1, 1, 3, 3], |_, _, _, _| 1.0), &spec, None).unwrap();
        assert_eq!(bank.tile(0, 0)[0] / bank.den, 9.0);
        let zero = transform_filters(&DenseTensor::zeros([2, 2, 3, 3]), &spec, None).unwrap();
        assert!(zero.data.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn per_channel_filter_scales() {
        let spec = catalog_algorithm("sfc6-6x6-3x3").unwrap();
        let q = QuantConfig { filter_grouping: crate::quant::Grouping::Channel, ..QuantConfig::default() };
        let bank = transform_filters(&random([4, 3, 3, 3], 8), &spec, Some(&q)).unwrap();
        let s = &bank.quantized.unwrap().scales;
        assert_eq!(s.scales.len(), 4);
        let mut sorted = s.scales.clone();
        sorted.sort_by(f64::total_cmp);
        sorted.dedup();
        assert_eq!(sorted.len(), 4);
    }

    #[test]
    fn threads_do_not_change_bits() {
        let cfg = layer(3, 4, 20, 3, 1);
        let x = random([1, 3, 20, 20], 9);
        let f = random([4, 3, 3, 3], 10);
        let spec = catalog_algorithm("sfc6-7x7-3x3").unwrap();
        let one = fast_conv2d_with(&x, &f, &cfg, &spec, &FastConvOptions::default()).unwrap();
        let four = fast_conv2d_with(&x, &f, &cfg, &spec, &FastConvOptions { threads: 4, ..Default::default() }).unwrap();
        assert_eq!(one.output, four.output);
    }

    #[test]
    fn quantized_int8_is_close() {
        let cfg = layer(4, 2, 14, 3, 1);
        let x = random([1, 4, 14, 14], 11);
        let f = random([2, 4, 3, 3], 12);
        let spec = catalog_algorithm("sfc6-6x6-3x3").unwrap();
        let y = fast_conv2d(&x, &f, &cfg, &spec, Some(&QuantConfig::default())).unwrap();
        let r = direct_conv2d(&x, &f, &cfg).unwrap();
        let power = r.data().iter().map(|v| v * v).sum::<f64>() / r.data().len() as f64;
        assert!(y.mse(&r) < 0.01 * power);
    }
}
