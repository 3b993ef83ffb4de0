use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sfc_core::analysis::{bops, condition_number};
use sfc_core::catalog::{catalog, catalog_algorithm, check_identity};
use sfc_core::engine::{direct_conv2d, fast_conv2d};
use sfc_core::quant::synth::gaussian;
use sfc_core::quant::{quantize_value, QuantConfig};
use sfc_core::tensor::{rational_matmul, DenseTensor, LayerConfig, PolyElement, Rational, RationalMatrix, RingRule};

const FAST_3X3: &[&str] = &["wino-2x2-3x3", "wino-4x4-3x3", "sfc4-4x4-3x3", "sfc6-6x6-3x3", "sfc6-7x7-3x3"];

fn cmul(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn small_matrix(rows: usize, cols: usize) -> impl Strategy<Value = RationalMatrix> {
    (prop::collection::vec(-9i64..=9, rows * cols), 1i64..=6)
        .prop_map(move |(v, d)| RationalMatrix::new(rows, cols, v, d).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_product_matches_complex_product(
        a0 in -50i32..50, a1 in -50i32..50, b0 in -50i32..50, b1 in -50i32..50, which in 0usize..3,
    ) {
        let rule = [RingRule::DFT3, RingRule::DFT4, RingRule::DFT6][which];
        let (a, b) = (PolyElement::new(a0 as f64, a1 as f64), PolyElement::new(b0 as f64, b1 as f64));
        let s = rule.s_value();
        let got = rule.mul(a, b).eval(s);
        let want = cmul(a.eval(s), b.eval(s));
        prop_assert!((got.0 - want.0).abs() < 1e-9 && (got.1 - want.1).abs() < 1e-9);
        prop_assert_eq!(rule.mul(a, b), rule.mul(b, a));
    }

    #[test]
    fn rational_matmul_associates(a in small_matrix(3, 4), b in small_matrix(4, 2), c in small_matrix(2, 3)) {
        let left = rational_matmul(&rational_matmul(&a, &b).unwrap(), &c).unwrap();
        let right = rational_matmul(&a, &rational_matmul(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left.entries(), right.entries());
    }

    #[test]
    fn quantize_error_within_half_step(v in -1000.0f64..1000.0, scale in 0.01f64..100.0, bits in 4u32..=8) {
        let q = quantize_value(v, scale, bits);
        let limit = ((1i64 << (bits - 1)) - 1) as f64 * scale;
        if v.abs() <= limit {
            prop_assert!((q as f64 * scale - v).abs() <= scale / 2.0 + 1e-12);
        }
    }

    #[test]
    fn kappa_is_scale_invariant(m in small_matrix(4, 4), scale_num in prop::sample::select(vec![(1i128, 6i128), (6, 1)])) {
        let c = Rational::new(scale_num.0, scale_num.1).unwrap();
        if let Ok(k) = condition_number(&m) {
            let k2 = condition_number(&m.scale(c).unwrap()).unwrap();
            prop_assert!((k - k2).abs() <= 1e-9 * k);
        }
    }

    #[test]
    fn fast_matches_direct_on_any_size(
        which in 0usize..FAST_3X3.len(), h in 3usize..23, w in 3usize..23, pad in 0usize..2, seed in any::<u64>(),
    ) {
        let spec = catalog_algorithm(FAST_3X3[which]).unwrap();
        let cfg = LayerConfig { in_channels: 2, out_channels: 2, height: h, width: w, kernel: 3, stride: 1, padding: pad };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = gaussian([1, 2, h, w], &mut rng);
        let f = gaussian([2, 2, 3, 3], &mut rng);
        let fast = fast_conv2d(&x, &f, &cfg, &spec, None).unwrap();
        let direct = direct_conv2d(&x, &f, &cfg).unwrap();
        prop_assert!(fast.max_rel_error(&direct) < 1e-8);
    }

    #[test]
    fn fast_conv_is_linear_in_input(which in 0usize..FAST_3X3.len(), seed in any::<u64>(), alpha in -3.0f64..3.0) {
        let spec = catalog_algorithm(FAST_3X3[which]).unwrap();
        let cfg = LayerConfig { in_channels: 3, out_channels: 2, height: 13, width: 13, kernel: 3, stride: 1, padding: 1 };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x1, x2) = (gaussian([1, 3, 13, 13], &mut rng), gaussian([1, 3, 13, 13], &mut rng));
        let f = gaussian([2, 3, 3, 3], &mut rng);
        let sum = DenseTensor::new([1, 3, 13, 13], x1.data().iter().zip(x2.data()).map(|(a, b)| a + alpha * b).collect()).unwrap();
        let (y1, y2) = (fast_conv2d(&x1, &f, &cfg, &spec, None).unwrap(), fast_conv2d(&x2, &f, &cfg, &spec, None).unwrap());
        let ys = fast_conv2d(&sum, &f, &cfg, &spec, None).unwrap();
        for ((a, b), s) in y1.data().iter().zip(y2.data()).zip(ys.data()) {
            prop_assert!((a + alpha * b - s).abs() < 1e-9 * (1.0 + s.abs()));
        }
    }

    #[test]
    fn bops_linear_in_channels(cin in 1usize..64, cout in 1usize..64, hw in 8usize..40, which in 0usize..FAST_3X3.len()) {
        let spec = catalog_algorithm(FAST_3X3[which]).unwrap();
        let q = QuantConfig::default();
        let layer = |c| LayerConfig { in_channels: c, out_channels: cout, height: hw, width: hw, kernel: 3, stride: 1, padding: 1 };
        let a = bops(&layer(cin), &spec, &q).unwrap();
        let b = bops(&layer(2 * cin), &spec, &q).unwrap();
        prop_assert_eq!(b.mults, 2 * a.mults);
        prop_assert_eq!(b.mult_bops(), 2 * a.mult_bops());
        prop_assert_eq!(a.bops, a.mult_bops() + a.add_bops());
    }
}

#[test]
fn every_catalog_spec_satisfies_the_identity() {
    for s in catalog().unwrap().specs() {
        assert!(check_identity(&s.bt, &s.g, &s.a).unwrap(), "{}", s.name);
    }
}

#[test]
fn catalog_hash_is_stable() {
    let h = catalog().unwrap().hash();
    assert_eq!(h.len(), 64);
    assert_eq!(h, catalog().unwrap().hash());
}
