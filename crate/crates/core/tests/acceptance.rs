//! Acceptance checks, one line per criterion. Exits nonzero if any check fails.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sfc_core::analysis::{bops, bound_trials, kappa, mse_experiment, mult_bops, add_bops, Precision};
use sfc_core::catalog::{catalog, catalog_algorithm, validate_algorithm};
use sfc_core::engine::{direct_conv2d, fast_conv2d_with, iterative_conv2d, FastConvOptions, ProductPath};
use sfc_core::quant::ablation::{layer_mse, synthetic_layer};
use sfc_core::quant::synth::{gaussian, Synthetic};
use sfc_core::quant::{Grouping, QuantConfig};
use sfc_core::tensor::{DenseTensor, LayerConfig};

type Check = Result<String, String>;

/// Table rows with expected complexity (as printed), κ and MSE.
const TABLE: &[(&str, &str, f64, f64)] = &[
    ("direct-3x3", "100", 1.0, 1.0),
    ("wino-2x2-3x3", "44.4", 2.4, 2.2),
    ("wino-3x3-3x3", "30.4", 14.5, 6.4),
    ("wino-4x4-3x3", "25", 20.1, 10.5),
    ("sfc4-4x4-3x3", "31.94", 2.7, 2.4),
    ("sfc6-6x6-3x3", "27.16", 3.3, 2.4),
    ("sfc6-7x7-3x3", "29.93", 3.4, 2.6),
    ("wino-2x2-5x5", "36", 20.1, 10.5),
    ("sfc6-6x6-5x5", "20.44", 3.5, 3.6),
    ("wino-2x2-7x7", "32.6", 31.0, 28.1),
    ("sfc6-4x4-7x7", "21.99", 3.5, 3.6),
];

fn decimals(s: &str) -> usize {
    s.split_once('.').map_or(0, |(_, d)| d.len())
}

fn c1_exactness() -> Check {
    let cat = catalog().map_err(|e| e.to_string())?;
    let mut bad = Vec::new();
    let specs = cat.specs();
    for s in &specs {
        let r = validate_algorithm(s, 1000, 42).map_err(|e| e.to_string())?;
        if !r.passed() {
            bad.push(format!("{} ({} mismatches)", s.name, r.mismatches));
        }
    }
    if bad.is_empty() {
        Ok(format!("{} algorithms x 1000 integer tiles, zero mismatches", specs.len()))
    } else {
        Err(bad.join(", "))
    }
}

fn c2_complexity() -> Check {
    let mut bad = Vec::new();
    for &(name, want, _, _) in &TABLE[1..] {
        let s = catalog_algorithm(name).map_err(|e| e.to_string())?;
        // the printed values are either rounded or truncated to their last digit
        let d = decimals(want);
        let got = format!("{:.*}", d, s.complexity_pct());
        let step = 10f64.powi(d as i32);
        let truncated = format!("{:.*}", d, (s.complexity_pct() * step).floor() / step);
        if got != want && truncated != want {
            bad.push(format!("{name} {got} != {want}"));
        }
    }
    if bad.is_empty() {
        Ok("10 rows exact".into())
    } else {
        Err(bad.join(", "))
    }
}

fn c3_kappa() -> Check {
    let mut bad = Vec::new();
    let mut worst: f64 = 0.0;
    for &(name, _, want, _) in TABLE {
        let s = catalog_algorithm(name).map_err(|e| e.to_string())?;
        let k = kappa(&s).map_err(|e| e.to_string())?;
        worst = worst.max((k - want).abs());
        if (k - want).abs() > 0.1 {
            bad.push(format!("{name} {k:.3} vs {want}"));
        }
    }
    if bad.is_empty() {
        Ok(format!("max |dk| = {worst:.3}"))
    } else {
        Err(bad.join(", "))
    }
}

fn c4_mse() -> Check {
    let mut got = Vec::new();
    for &(name, _, _, want) in TABLE {
        let s = catalog_algorithm(name).map_err(|e| e.to_string())?;
        let r = mse_experiment(&s, Precision::Fp16Sim, 1000, 2024).map_err(|e| e.to_string())?;
        got.push((name, r.mse_normalized, want, s.r));
    }
    let mut bad = Vec::new();
    for &(name, v, want, _) in &got {
        if (v - want).abs() > 0.3 * want {
            bad.push(format!("{name} {v:.2} outside {want}±30%"));
        }
    }
    for a in &got {
        for b in &got {
            if a.3 == b.3 && a.2 < b.2 && a.1 >= b.1 {
                bad.push(format!("{} ({:.2}) should be below {} ({:.2})", a.0, a.1, b.0, b.1));
            }
        }
    }
    let summary: Vec<String> = got.iter().map(|(n, v, _, _)| format!("{n}={v:.2}")).collect();
    if bad.is_empty() {
        Ok(summary.join(" "))
    } else {
        Err(format!("{}; {}", bad.join(", "), summary.join(" ")))
    }
}

fn c5_counts() -> Check {
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, full, reduced) in
        [("sfc4-4x4-3x3", 49, 46), ("sfc6-6x6-3x3", 100, 88), ("sfc6-7x7-3x3", 144, 132), ("sfc6-6x6-5x5", 196, 184)]
    {
        let s = catalog_algorithm(name).map_err(|e| e.to_string())?;
        let n = s.tile_in();
        let cfg = LayerConfig { in_channels: 1, out_channels: 1, height: n, width: n, kernel: s.r, stride: 1, padding: 0 };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = gaussian([1, 1, n, n], &mut rng);
        let f = gaussian([1, 1, s.r, s.r], &mut rng);
        let run = |path| {
            fast_conv2d_with(&x, &f, &cfg, &s, &FastConvOptions { path, ..FastConvOptions::default() })
                .map(|o| o.mults)
                .map_err(|e| e.to_string())
        };
        let (fm, rm) = (run(ProductPath::Full)?, run(ProductPath::Reduced)?);
        ok &= fm == full && rm == reduced;
        parts.push(format!("{name} {fm}/{rm}"));
    }
    if ok {
        Ok(parts.join(", "))
    } else {
        Err(format!("expected 49/46, 100/88, 144/132, 196/184; got {}", parts.join(", ")))
    }
}

fn c6_iterative() -> Check {
    let inner = catalog_algorithm("sfc6-5x5-5x5").map_err(|e| e.to_string())?;
    let outer = catalog_algorithm("sfc6-6x6-6x6").map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (k, o) = (29, 26);
    let x = gaussian([1, 1, o + k - 1, o + k - 1], &mut rng);
    let f = gaussian([1, 1, k, k], &mut rng);
    let r = iterative_conv2d(&x, &f, &inner, &outer).map_err(|e| e.to_string())?;
    let cfg = LayerConfig { in_channels: 1, out_channels: 1, height: o + k - 1, width: o + k - 1, kernel: k, stride: 1, padding: 0 };
    let oracle = direct_conv2d(&x, &f, &cfg).map_err(|e| e.to_string())?;
    let err = r.output.max_rel_error(&oracle);
    let line = format!(
        "{} x {} nesting: {} mults, {:.2}% of direct {}, max rel err {err:.1e}",
        inner.name,
        outer.name,
        r.mults,
        100.0 * r.ratio(),
        r.direct_mults
    );
    if r.mults == 17_424 && (100.0 * r.ratio() - 3.06).abs() < 0.005 && err <= 1e-8 {
        Ok(line)
    } else {
        Err(format!("expected 17424 mults (3.06%); {line}"))
    }
}

fn c7_bound() -> Check {
    let cat = catalog().map_err(|e| e.to_string())?;
    let mut bad = Vec::new();
    let mut tightest: f64 = 0.0;
    let specs = cat.specs();
    for s in &specs {
        let trials = bound_trials(s, 1000, 7).map_err(|e| e.to_string())?;
        let violations = trials.iter().filter(|t| !t.holds()).count();
        tightest = trials.iter().map(|t| t.observed / t.bound).fold(tightest, f64::max);
        if violations > 0 {
            bad.push(format!("{} ({violations} violations)", s.name));
        }
    }
    if bad.is_empty() {
        Ok(format!("{} algorithms x 1000 trials, max observed/bound {tightest:.3}", specs.len()))
    } else {
        Err(bad.join(", "))
    }
}

fn c8_quant() -> Check {
    let sfc = catalog_algorithm("sfc6-6x6-3x3").map_err(|e| e.to_string())?;
    let wino = catalog_algorithm("wino-4x4-3x3").map_err(|e| e.to_string())?;
    let cfg = |bits, act, filt| QuantConfig {
        act_bits: bits,
        filter_bits: bits,
        act_grouping: act,
        filter_grouping: filt,
        ..QuantConfig::default()
    };
    let mut bad = Vec::new();
    let mut checks = 0;
    for i in 0..20 {
        let c = 4 + 2 * (i % 4);
        let hw = 12 + 6 * (i % 3);
        let layer = LayerConfig { in_channels: c, out_channels: c, height: hw, width: hw, kernel: 3, stride: 1, padding: 1 };
        let data = if i % 2 == 0 { Synthetic::OneF } else { Synthetic::Gaussian };
        let (x, f) = synthetic_layer(&layer, data, 800 + i as u64);
        for bits in [8, 6, 4] {
            let mse = |s, a, g| layer_mse(&x, &f, &layer, s, &cfg(bits, a, g)).map(|r| r.0).map_err(|e| e.to_string());
            let fine = mse(&sfc, Grouping::Frequency, Grouping::ChannelFrequency)?;
            let mid = mse(&sfc, Grouping::Frequency, Grouping::Channel)?;
            let coarse = mse(&sfc, Grouping::Tensor, Grouping::Channel)?;
            checks += 1;
            if !(fine <= mid && mid <= coarse) {
                bad.push(format!("layer {i} int{bits}: {fine:.2e} / {mid:.2e} / {coarse:.2e}"));
            }
            if bits == 8 {
                let w = mse(&wino, Grouping::Frequency, Grouping::ChannelFrequency)?;
                checks += 1;
                if fine >= w {
                    bad.push(format!("layer {i} int8 sfc {fine:.2e} >= wino {w:.2e}"));
                }
            }
        }
    }
    if bad.is_empty() {
        Ok(format!("{checks} orderings hold on 20 layers"))
    } else {
        Err(format!("{} of {checks} orderings broken: {}", bad.len(), bad.join("; ")))
    }
}

fn c9_bops() -> Check {
    if mult_bops(8) != 56 || add_bops(8) != 8 {
        return Err(format!("unit costs {} / {}", mult_bops(8), add_bops(8)));
    }
    let q = QuantConfig::default();
    let layer = |cin| LayerConfig { in_channels: cin, out_channels: 64, height: 56, width: 56, kernel: 3, stride: 1, padding: 1 };
    let sfc = catalog_algorithm("sfc6-7x7-3x3").map_err(|e| e.to_string())?;
    let direct = catalog_algorithm("direct-3x3").map_err(|e| e.to_string())?;
    let a = bops(&layer(32), &sfc, &q).map_err(|e| e.to_string())?;
    let b = bops(&layer(64), &sfc, &q).map_err(|e| e.to_string())?;
    let d = bops(&layer(64), &direct, &q).map_err(|e| e.to_string())?;
    if b.mult_bops() != 2 * a.mult_bops() {
        return Err(format!("mult BOPs {} -> {} when doubling C_in", a.mult_bops(), b.mult_bops()));
    }
    if b.bops >= d.bops {
        return Err(format!("sfc {} >= direct {}", b.bops, d.bops));
    }
    Ok(format!("56/8 unit costs, linear in C_in, sfc6-7x7-3x3 / direct = {:.3}", b.bops as f64 / d.bops as f64))
}

fn c10_threads() -> Check {
    let names = ["sfc6-6x6-3x3", "wino-4x4-3x3", "sfc4-4x4-3x3", "sfc6-7x7-3x3", "sfc6-6x6-5x5"];
    for i in 0..10 {
        let s = catalog_algorithm(names[i % names.len()]).map_err(|e| e.to_string())?;
        let layer = LayerConfig {
            in_channels: 3 + i,
            out_channels: 4,
            height: 20 + 3 * i,
            width: 17 + 2 * i,
            kernel: s.r,
            stride: 1,
            padding: s.r / 2,
        };
        let (x, f) = synthetic_layer(&layer, Synthetic::Gaussian, 1000 + i as u64);
        let quant = (i % 2 == 1).then(QuantConfig::default);
        let run = |threads| {
            fast_conv2d_with(&x, &f, &layer, &s, &FastConvOptions { threads, quant, ..FastConvOptions::default() })
                .map(|o| o.output)
                .map_err(|e| e.to_string())
        };
        let one: DenseTensor = run(1)?;
        let many = run(4)?;
        if one.data().iter().zip(many.data()).any(|(a, b)| a.to_bits() != b.to_bits()) {
            return Err(format!("layer {i} ({}) differs between 1 and 4 threads", s.name));
        }
    }
    Ok("10 layers bitwise identical at 1 and 4 threads".into())
}

fn main() {
    let criteria: [(&str, fn() -> Check, Duration); 10] = [
        ("exactness gate", c1_exactness, Duration::from_secs(10)),
        ("complexity column", c2_complexity, Duration::from_secs(1)),
        ("condition numbers", c3_kappa, Duration::from_secs(1)),
        ("fp16 MSE column", c4_mse, Duration::from_secs(60)),
        ("multiplication counters", c5_counts, Duration::from_secs(1)),
        ("iterative large kernel", c6_iterative, Duration::from_secs(10)),
        ("forward error bound", c7_bound, Duration::from_secs(60)),
        ("quantization granularity", c8_quant, Duration::MAX),
        ("BOPs rule", c9_bops, Duration::from_secs(1)),
        ("thread determinism", c10_threads, Duration::MAX),
    ];
    // build the catalog outside the timed sections
    catalog().expect("catalog builds");
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let (ok, detail) = match result {
            Ok(d) if elapsed <= *limit => (true, d),
            Ok(d) => (false, format!("{d}; took {elapsed:.2?}, limit {limit:.0?}")),
            Err(d) => (false, d),
        };
        failed += usize::from(!ok);
        println!("criterion {:>2} {} {name} [{elapsed:.2?}]: {detail}", i + 1, if ok { "PASS" } else { "FAIL" });
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
