//! Transform catalog: symbolic DFT plans, published SFC matrices, Winograd
//! generation, the exactness gate, matrix repair and correction-term derivation.

pub mod appendix;
mod derive;
mod sft;
pub mod symbolic;
mod validate;
mod winograd;

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::Serialize;
use sha2::{Digest, Sha256};

pub use derive::{derive_correction_spec, sfc_from_published, CorrectionLayout};
pub use sft::{build_sft, cyclic_shift, reversal, sft6_fast, SymbolicDftPlan, SFT6_FAST_ADDS};
pub use symbolic::{RingElem, SymGroup, SymbolicForm};
pub use validate::{
    check_identity, repair_matrix, validate_algorithm, Counterexample, EntryChange, RepairLog, ValidationReport,
};
pub use winograd::{direct_spec, generate_winograd, Root};

use crate::tensor::{RationalMatrix, TensorError};

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),
    #[error("unsupported transform length {0}")]
    UnsupportedPoints(usize),
    #[error("duplicate interpolation point {0}")]
    DuplicateRoot(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("catalog integrity: {0}")]
    Integrity(String),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Direct,
    Winograd,
    Sfc,
}

/// Where a spec's matrices came from.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    /// Transcribed from the published appendix and passed the gate unchanged.
    Published,
    /// Transcribed, failed the gate, and was repaired.
    Repaired(RepairLog),
    /// Built by the Toom-Cook construction.
    Generated,
    /// Built by the correction-term recipe.
    Derived,
}

/// A fast convolution algorithm `y = Aᵀ[(G f Gᵀ) ⊙ (Bᵀ x B)] A` in correlation orientation.
#[derive(Clone, Debug, Serialize)]
pub struct AlgorithmSpec {
    pub name: String,
    pub family: Family,
    /// Transform length: base DFT size for SFC, `M + R − 1` for Winograd, `R` for direct.
    pub n: usize,
    pub m: usize,
    pub r: usize,
    /// Input transform as applied, `Bᵀ` (`T × (M+R−1)`).
    pub bt: RationalMatrix,
    /// Filter transform (`T × R`).
    pub g: RationalMatrix,
    /// Output transform (`T × M`), applied as `Aᵀ(·)A`.
    pub a: RationalMatrix,
    pub mults_full: usize,
    pub mults_reduced: usize,
    /// Square transform of the overlapped (transposed) form. Product errors reach
    /// the overlapped output through its transpose, so its condition number is the
    /// algorithm's error amplification.
    pub overlap: RationalMatrix,
    pub symbolic: SymbolicForm,
    pub source: Source,
}

impl AlgorithmSpec {
    /// Checks matrix shapes and fills the multiplication counts.
    pub(crate) fn assemble(
        name: String,
        family: Family,
        n: usize,
        m: usize,
        r: usize,
        (bt, g, a): (RationalMatrix, RationalMatrix, RationalMatrix),
        overlap: RationalMatrix,
        symbolic: SymbolicForm,
        source: Source,
    ) -> Result<Self, CatalogError> {
        let t = bt.rows();
        if bt.cols() != m + r - 1 || g.rows() != t || g.cols() != r || a.rows() != t || a.cols() != m {
            return Err(CatalogError::InvalidParameters(format!(
                "{name}: Bᵀ {}x{}, G {}x{}, A {}x{} do not fit M={m}, R={r}",
                bt.rows(),
                bt.cols(),
                g.rows(),
                g.cols(),
                a.rows(),
                a.cols()
            )));
        }
        if overlap.rows() != overlap.cols() || overlap.cols() != m + r - 1 {
            return Err(CatalogError::InvalidParameters(format!("{name}: overlap transform must be square")));
        }
        let mults_reduced = symbolic.mults_2d();
        Ok(AlgorithmSpec {
            name,
            family,
            n,
            m,
            r,
            bt,
            g,
            a,
            mults_full: t * t,
            mults_reduced,
            overlap,
            symbolic,
            source,
        })
    }

    /// Rows of the transforms (`T`).
    pub fn t(&self) -> usize {
        self.bt.rows()
    }

    /// Input tile edge `M + R − 1`.
    pub fn tile_in(&self) -> usize {
        self.m + self.r - 1
    }

    /// `mults_reduced / (M²R²)` as a percentage.
    pub fn complexity_pct(&self) -> f64 {
        100.0 * self.mults_reduced as f64 / (self.m * self.m * self.r * self.r) as f64
    }

    /// A copy with one output-transform entry sign-flipped, for fault-injection tests.
    pub fn with_injected_typo(&self) -> AlgorithmSpec {
        let mut nums = self.a.numerators().to_vec();
        let i = nums.iter().position(|&v| v != 0).expect("nonzero A");
        nums[i] = -nums[i];
        let mut out = self.clone();
        out.a = RationalMatrix::new(self.a.rows(), self.a.cols(), nums, self.a.denominator()).expect("same shape");
        out
    }
}

/// Names in the built-in catalog, in Table 1 order (direct kernels first).
pub const CATALOG_NAMES: &[&str] = &[
    "direct-3x3",
    "direct-5x5",
    "direct-7x7",
    "wino-2x2-3x3",
    "wino-3x3-3x3",
    "wino-4x4-3x3",
    "sfc4-4x4-3x3",
    "sfc6-6x6-3x3",
    "sfc6-7x7-3x3",
    "wino-2x2-5x5",
    "sfc6-6x6-5x5",
    "wino-2x2-7x7",
    "sfc6-4x4-7x7",
];

/// The gated, immutable set of algorithms.
#[derive(Debug)]
pub struct Catalog {
    specs: BTreeMap<String, AlgorithmSpec>,
}

impl Catalog {
    pub fn build() -> Result<Catalog, CatalogError> {
        let mut specs = BTreeMap::new();
        let mut put = |s: AlgorithmSpec| {
            specs.insert(s.name.clone(), s);
        };
        for r in [3, 5, 7] {
            put(direct_spec(r)?);
        }
        for (m, r) in [(2, 3), (3, 3), (4, 3), (2, 5), (2, 7)] {
            put(generate_winograd(m, r, &winograd::default_roots(m, r)?)?);
        }
        for p in appendix::all() {
            put(sfc_from_published(&p)?);
        }
        put(derive_correction_spec(&build_sft(6)?, 4, 7)?);
        for s in specs.values() {
            if !check_identity(&s.bt, &s.g, &s.a)? {
                return Err(CatalogError::Integrity(format!("{} failed the identity check", s.name)));
            }
        }
        Ok(Catalog { specs })
    }

    pub fn get(&self, name: &str) -> Option<&AlgorithmSpec> {
        self.specs.get(name)
    }

    /// Specs in catalog order.
    pub fn specs(&self) -> Vec<&AlgorithmSpec> {
        CATALOG_NAMES.iter().filter_map(|n| self.specs.get(*n)).collect()
    }

    /// SHA-256 over every matrix of every spec, hex encoded.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for s in self.specs() {
            h.update(s.name.as_bytes());
            for m in [&s.bt, &s.g, &s.a] {
                h.update(m.canonical_bytes());
            }
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    /// JSON export: matrices as integer grids plus denominators.
    pub fn export_json(&self) -> serde_json::Value {
        let mat = |m: &RationalMatrix| {
            serde_json::json!({ "rows": m.to_int_rows(), "denominator": m.denominator() })
        };
        let list: Vec<_> = self
            .specs()
            .into_iter()
            .map(|s| {
                serde_json::json!({
                    "name": s.name,
                    "family": s.family,
                    "N": s.n,
                    "M": s.m,
                    "R": s.r,
                    "BT": mat(&s.bt),
                    "G": mat(&s.g),
                    "A": mat(&s.a),
                    "mults_full": s.mults_full,
                    "mults_reduced": s.mults_reduced,
                    "source": s.source,
                })
            })
            .collect();
        serde_json::json!({ "catalog_hash": self.hash(), "algorithms": list })
    }
}

static CATALOG: OnceLock<Result<Catalog, String>> = OnceLock::new();

/// The process-wide catalog, built and gated on first use.
pub fn catalog() -> Result<&'static Catalog, CatalogError> {
    CATALOG
        .get_or_init(|| Catalog::build().map_err(|e| e.to_string()))
        .as_ref()
        .map_err(|e| CatalogError::Integrity(e.clone()))
}

/// Looks up a catalog spec. `direct-RxR` works for any odd `R`; other
/// `sfcN-MxM-RxR` names with `N ∈ {3,4,6}` are derived on demand.
pub fn catalog_algorithm(name: &str) -> Result<AlgorithmSpec, CatalogError> {
    if let Some(s) = catalog()?.get(name) {
        return Ok(s.clone());
    }
    let unknown = || CatalogError::UnknownAlgorithm(name.to_string());
    let parse_edge = |s: &str| -> Option<usize> {
        let (a, b) = s.split_once('x')?;
        let a: usize = a.parse().ok()?;
        (b.parse::<usize>().ok()? == a).then_some(a)
    };
    if let Some(rest) = name.strip_prefix("direct-") {
        let r = parse_edge(rest).ok_or_else(unknown)?;
        if r % 2 == 1 {
            return direct_spec(r);
        }
        return Err(unknown());
    }
    if let Some(rest) = name.strip_prefix("sfc") {
        let mut parts = rest.split('-');
        let (Some(p), Some(m), Some(r), None) = (parts.next(), parts.next(), parts.next(), parts.next()) else {
            return Err(unknown());
        };
        let p: usize = p.parse().map_err(|_| unknown())?;
        let (m, r) = (parse_edge(m).ok_or_else(unknown)?, parse_edge(r).ok_or_else(unknown)?);
        let plan = build_sft(p).map_err(|_| unknown())?;
        return derive_correction_spec(&plan, m, r);
    }
    Err(unknown())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_shapes_and_counts() {
        let s = catalog_algorithm("sfc4-4x4-3x3").unwrap();
        assert_eq!((s.bt.rows(), s.g.rows(), s.g.cols(), s.a.rows(), s.a.cols()), (7, 7, 3, 7, 4));
        assert_eq!(s.a.denominator(), 4);
        assert_eq!((s.mults_full, s.mults_reduced), (49, 46));
        let s = catalog_algorithm("sfc6-6x6-3x3").unwrap();
        assert_eq!((s.mults_full, s.mults_reduced), (100, 88));
        let s = catalog_algorithm("sfc6-7x7-3x3").unwrap();
        assert_eq!((s.mults_full, s.mults_reduced), (144, 132));
        let s = catalog_algorithm("sfc6-6x6-5x5").unwrap();
        assert_eq!((s.mults_full, s.mults_reduced), (196, 184));
    }

    #[test]
    fn sfc_denominators_are_small() {
        for s in catalog().unwrap().specs() {
            if s.family != Family::Winograd {
                for m in [&s.bt, &s.g, &s.a] {
                    assert!([1, 4, 6].contains(&m.denominator()), "{}", s.name);
                }
            }
        }
    }

    #[test]
    fn sfc_input_transforms_are_addition_only() {
        for s in catalog().unwrap().specs() {
            if s.family == Family::Sfc {
                assert!(s.bt.numerators().iter().all(|v| (-1..=1).contains(v)));
                assert_eq!(s.bt.denominator(), 1);
            }
        }
    }

    #[test]
    fn direct_names() {
        let d = catalog_algorithm("direct-3x3").unwrap();
        assert_eq!(d.mults_full, 9);
        assert_eq!(d.m, 1);
        assert!(catalog_algorithm("direct-9x9").is_ok());
        assert!(matches!(catalog_algorithm("direct-4x4"), Err(CatalogError::UnknownAlgorithm(_))));
        assert!(matches!(catalog_algorithm("nosuch"), Err(CatalogError::UnknownAlgorithm(_))));
    }

    #[test]
    fn derived_on_demand() {
        let s = catalog_algorithm("sfc6-5x5-5x5").unwrap();
        assert_eq!(s.t(), 12);
        assert_eq!(s.mults_reduced, 132);
    }

    #[test]
    fn hash_is_stable_and_export_lists_everything() {
        let c = catalog().unwrap();
        assert_eq!(c.hash(), c.hash());
        assert_eq!(c.hash().len(), 64);
        let j = c.export_json();
        assert_eq!(j["algorithms"].as_array().unwrap().len(), CATALOG_NAMES.len());
    }

    #[test]
    fn injected_typo_breaks_identity() {
        let s = catalog_algorithm("sfc6-6x6-3x3").unwrap().with_injected_typo();
        assert!(!check_identity(&s.bt, &s.g, &s.a).unwrap());
    }
}
