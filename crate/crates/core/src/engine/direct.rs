use super::EngineError;
use crate::tensor::{DenseTensor, LayerConfig};

pub(crate) fn check_shapes(x: &DenseTensor, f: &DenseTensor, cfg: &LayerConfig) -> Result<(), EngineError> {
    cfg.validate()?;
    let [_, c, h, w] = x.shape();
    let [oc, ic, r1, r2] = f.shape();
    if c != cfg.in_channels || h != cfg.height || w != cfg.width {
        return Err(EngineError::Shape(format!("input {:?} does not match {cfg:?}", x.shape())));
    }
    if oc != cfg.out_channels || ic != cfg.in_channels || r1 != cfg.kernel || r2 != cfg.kernel {
        return Err(EngineError::Shape(format!("filter {:?} does not match {cfg:?}", f.shape())));
    }
    x.ensure_finite()?;
    f.ensure_finite()?;
    Ok(())
}

/// Reference convolution (correlation orientation), any stride, zero padding.
pub fn direct_conv2d(x: &DenseTensor, f: &DenseTensor, cfg: &LayerConfig) -> Result<DenseTensor, EngineError> {
    check_shapes(x, f, cfg)?;
    let [b, cin, h, w] = x.shape();
    let (cout, r, s, p) = (cfg.out_channels, cfg.kernel, cfg.stride, cfg.padding as isize);
    let (oh, ow) = cfg.output_hw()?;
    let mut out = DenseTensor::zeros([b, cout, oh, ow]);
    let xd = x.data();
    let fd = f.data();
    for n in 0..b {
        for oc in 0..cout {
            for i in 0..oh {
                for j in 0..ow {
                    let mut acc = 0.0;
                    for ic in 0..cin {
                        let plane = &xd[(n * cin + ic) * h * w..(n * cin + ic + 1) * h * w];
                        let ker = &fd[(oc * cin + ic) * r * r..(oc * cin + ic + 1) * r * r];
                        for k in 0..r {
                            let y = (i * s + k) as isize - p;
                            if y < 0 || y as usize >= h {
                                continue;
                            }
                            for l in 0..r {
                                let xx = (j * s + l) as isize - p;
                                if xx < 0 || xx as usize >= w {
                                    continue;
                                }
                                acc += plane[y as usize * w + xx as usize] * ker[k * r + l];
                            }
                        }
                    }
                    out.set(n, oc, i, j, acc);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(c: usize, o: usize, hw: usize, r: usize, s: usize, p: usize) -> LayerConfig {
        LayerConfig { in_channels: c, out_channels: o, height: hw, width: hw, kernel: r, stride: s, padding: p }
    }

    #[test]
    fn ones_kernel_on_ones() {
        let x = DenseTensor::from_fn([1, 1, 5, 5], |_, _, _, _| 1.0);
        let f = DenseTensor::from_fn([1, 1, 3, 3], |_, _, _, _| 1.0);
        let y = direct_conv2d(&x, &f, &cfg(1, 1, 5, 3, 1, 0)).unwrap();
        assert_eq!(y.shape(), [1, 1, 3, 3]);
        assert!(y.data().iter().all(|&v| v == 9.0));
    }

    #[test]
    fn delta_kernel_is_a_crop() {
        let x = DenseTensor::from_fn([1, 1, 6, 6], |_, _, h, w| (h * 6 + w) as f64);
        let f = DenseTensor::from_fn([1, 1, 3, 3], |_, _, h, w| (h == 1 && w == 1) as u8 as f64);
        let y = direct_conv2d(&x, &f, &cfg(1, 1, 6, 3, 1, 0)).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(y.at(0, 0, i, j), x.at(0, 0, i + 1, j + 1));
            }
        }
    }

    #[test]
    fn correlation_not_convolution() {
        // y0 = x0·w0 + x1·w1 + x2·w2 with no kernel flip
        let row = [1.0, 10.0, 100.0];
        let x3 = DenseTensor::from_fn([1, 1, 3, 3], |_, _, h, w| if h == 0 { row[w] } else { 0.0 });
        let f3 = DenseTensor::from_fn([1, 1, 3, 3], |_, _, h, w| if h == 0 { (w + 1) as f64 } else { 0.0 });
        let y = direct_conv2d(&x3, &f3, &cfg(1, 1, 3, 3, 1, 0)).unwrap();
        assert_eq!(y.data(), &[321.0]);
    }

    #[test]
    fn stride_and_padding() {
        let x = DenseTensor::from_fn([1, 1, 4, 4], |_, _, _, _| 1.0);
        let f = DenseTensor::from_fn([1, 1, 3, 3], |_, _, _, _| 1.0);
        let y = direct_conv2d(&x, &f, &cfg(1, 1, 4, 3, 2, 1)).unwrap();
        assert_eq!(y.shape(), [1, 1, 2, 2]);
        assert_eq!(y.data(), &[4.0, 6.0, 6.0, 9.0]);
    }

    #[test]
    fn shape_mismatch() {
        let x = DenseTensor::zeros([1, 2, 5, 5]);
        let f = DenseTensor::zeros([1, 1, 3, 3]);
        assert!(matches!(direct_conv2d(&x, &f, &cfg(1, 1, 5, 3, 1, 0)), Err(EngineError::Shape(_))));
    }
}
