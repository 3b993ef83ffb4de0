//! SFC algorithms from a symbolic DFT plan plus correction terms, and the
//! gate for published SFC matrices.
//!
//! An `N`-point cyclic algorithm embedded at column `s` of the `M + R − 1`
//! input tile computes every product `x_{i+k} f_k` whose index `i + k − s` falls
//! in `[0, N)` correctly; the others alias onto `s + ((i + k − s) mod N)`. Each
//! aliased pair gets one extra row computing `(x_{i+k} − x_{alias}) f_k` that is
//! added to output `i`.

use serde::Serialize;

use super::appendix::Published;
use super::sft::{reversal, SymbolicDftPlan};
use super::symbolic::{SymGroup, SymbolicForm};
use super::validate::{check_identity, repair_parts};
use super::{AlgorithmSpec, CatalogError, Family, Source};
use crate::tensor::{rational_matmul, solve_exact, Rational, RationalMatrix};

/// Placement of the cyclic core and the aliased `(output, tap)` pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorrectionLayout {
    /// First input column covered by the core.
    pub offset: usize,
    pub corrections: Vec<(usize, usize)>,
}

impl CorrectionLayout {
    /// Picks the offset with the fewest corrections, preferring a centred core.
    pub fn choose(points: usize, m: usize, r: usize) -> Result<Self, CatalogError> {
        let n = m + r - 1;
        if m == 0 || r == 0 || n < points {
            return Err(CatalogError::InvalidParameters(format!(
                "tile of {n} inputs is shorter than the {points}-point transform"
            )));
        }
        let mut best: Option<((usize, usize, usize), CorrectionLayout)> = None;
        for s in 0..=n - points {
            let corrections: Vec<(usize, usize)> = (0..m)
                .flat_map(|i| (0..r).map(move |k| (i, k)))
                .filter(|&(i, k)| i + k < s || i + k >= s + points)
                .collect();
            let key = (corrections.len(), (2 * s).abs_diff(n - points), s);
            if best.as_ref().map_or(true, |(b, _)| key < *b) {
                best = Some((key, CorrectionLayout { offset: s, corrections }));
            }
        }
        Ok(best.expect("at least one offset").1)
    }

    /// Input column the product `x_{i+k}` aliases onto.
    fn alias(&self, points: usize, j: usize) -> usize {
        let p = j as i64 - self.offset as i64;
        self.offset + p.rem_euclid(points as i64) as usize
    }
}

/// Core rows of the integrated form: each complex group `(r1, r2)` becomes `r1, r2, r1 + r2`.
fn integrated_core(plan: &SymbolicDftPlan) -> Vec<Vec<i64>> {
    let f = plan.f.to_int_rows();
    let mut rows = Vec::new();
    for g in &plan.groups {
        match *g {
            SymGroup::Real(t) => rows.push(f[t].clone()),
            SymGroup::Complex(a, b) => {
                rows.push(f[a].clone());
                rows.push(f[b].clone());
                rows.push(f[a].iter().zip(&f[b]).map(|(x, y)| x + y).collect());
            }
        }
    }
    rows
}

fn times_reversal(rows: &[Vec<i64>], points: usize) -> Result<Vec<Vec<i64>>, CatalogError> {
    let m = RationalMatrix::from_vecs(rows, 1)?;
    Ok(rational_matmul(&m, &reversal(points))?.to_int_rows())
}

/// Output transform of the cyclic core: `Σ_t Ac[t,j]·Gc[t,m]·Bc[t,p] = δ(p, (j+m) mod N)`.
fn core_output(bc: &[Vec<i64>], gc: &[Vec<i64>], points: usize) -> Result<Vec<Vec<Rational>>, CatalogError> {
    let t = bc.len();
    let mut system = Vec::with_capacity(points * points);
    for m in 0..points {
        for p in 0..points {
            system.push((0..t).map(|row| Rational::int(gc[row][m] * bc[row][p])).collect::<Vec<_>>());
        }
    }
    let mut ac = vec![vec![Rational::ZERO; points]; t];
    for j in 0..points {
        let rhs: Vec<Rational> = (0..points)
            .flat_map(|m| (0..points).map(move |p| Rational::int((p == (j + m) % points) as i64)))
            .collect();
        let (x, free) = solve_exact(&system, &rhs, &vec![Rational::ZERO; t])?
            .ok_or_else(|| CatalogError::Integrity("cyclic core has no output transform".into()))?;
        if !free.is_empty() {
            return Err(CatalogError::Integrity("cyclic core output transform is not unique".into()));
        }
        for (row, v) in x.into_iter().enumerate() {
            ac[row][j] = v;
        }
    }
    Ok(ac)
}

fn embed(row: &[i64], at: usize, len: usize) -> Vec<i64> {
    let mut out = vec![0; len];
    out[at..at + row.len()].copy_from_slice(row);
    out
}

fn fold(row: &[i64], points: usize, r: usize) -> Vec<i64> {
    (0..r).map(|k| row[k % points]).collect()
}

/// Symbolic form and overlap transform for a spec with the core at `offset`
/// followed by `correction_bt` / `correction_g` rows.
fn symbolic_parts(
    plan: &SymbolicDftPlan,
    m: usize,
    r: usize,
    offset: usize,
    correction_bt: &[Vec<i64>],
    correction_g: &[Vec<i64>],
) -> Result<(SymbolicForm, RationalMatrix), CatalogError> {
    let n = m + r - 1;
    let f = plan.f.to_int_rows();
    let fr = times_reversal(&f, plan.points)?;
    let mut k: Vec<Vec<i64>> = f.iter().map(|row| embed(row, offset, n)).collect();
    let mut l: Vec<Vec<i64>> = fr.iter().map(|row| fold(row, plan.points, r)).collect();
    let mut overlap = k.clone();
    let mut groups = plan.groups.clone();
    for (b, g) in correction_bt.iter().zip(correction_g) {
        groups.push(SymGroup::Real(k.len()));
        k.push(b.clone());
        l.push(g.clone());
        let neg: Vec<i64> = b.iter().map(|v| -v).collect();
        if !overlap.contains(b) && !overlap.contains(&neg) {
            overlap.push(b.clone());
        }
    }
    let form = SymbolicForm::solve(
        RationalMatrix::from_vecs(&k, 1)?,
        RationalMatrix::from_vecs(&l, 1)?,
        groups,
        Some(plan.ring),
        m,
    )?;
    let overlap = RationalMatrix::from_vecs(&overlap, 1)?;
    if overlap.rows() != n {
        return Err(CatalogError::Integrity(format!(
            "overlap transform has {} distinct rows for {n} inputs",
            overlap.rows()
        )));
    }
    overlap.inverse()?;
    Ok((form, overlap))
}

fn sfc_name(points: usize, m: usize, r: usize) -> String {
    format!("sfc{points}-{m}x{m}-{r}x{r}")
}

/// Builds `SFC-N(M×M, R×R)` from a plan by the correction-term recipe.
pub fn derive_correction_spec(plan: &SymbolicDftPlan, m: usize, r: usize) -> Result<AlgorithmSpec, CatalogError> {
    let points = plan.points;
    let layout = CorrectionLayout::choose(points, m, r)?;
    let n = m + r - 1;
    let s = layout.offset;
    let bc = integrated_core(plan);
    let gc = times_reversal(&bc, points)?;
    let ac = core_output(&bc, &gc, points)?;

    let mut bt: Vec<Vec<i64>> = bc.iter().map(|row| embed(row, s, n)).collect();
    let mut g: Vec<Vec<i64>> = gc.iter().map(|row| fold(row, points, r)).collect();
    let mut a: Vec<Vec<Rational>> = ac
        .iter()
        .map(|row| (0..m).map(|i| row[(i + points - s % points) % points]).collect())
        .collect();
    let (mut cbt, mut cg) = (Vec::new(), Vec::new());
    for &(i, k) in &layout.corrections {
        let mut b = vec![0; n];
        b[i + k] += 1;
        b[layout.alias(points, i + k)] -= 1;
        let mut gr = vec![0; r];
        gr[k] = 1;
        let mut ar = vec![Rational::ZERO; m];
        ar[i] = Rational::ONE;
        bt.push(b.clone());
        g.push(gr.clone());
        a.push(ar);
        cbt.push(b);
        cg.push(gr);
    }
    let t = bt.len();
    let bt = RationalMatrix::from_vecs(&bt, 1)?;
    let g = RationalMatrix::from_vecs(&g, 1)?;
    let a = RationalMatrix::from_rationals(t, m, &a.concat())?;
    if !check_identity(&bt, &g, &a)? {
        return Err(CatalogError::Integrity(format!("derived {} is not exact", sfc_name(points, m, r))));
    }
    let (symbolic, overlap) = symbolic_parts(plan, m, r, s, &cbt, &cg)?;
    AlgorithmSpec::assemble(
        sfc_name(points, m, r),
        Family::Sfc,
        points,
        m,
        r,
        (bt, g, a),
        overlap,
        symbolic,
        Source::Derived,
    )
}

/// Gates a published SFC spec, repairing it if it fails.
pub fn sfc_from_published(p: &Published) -> Result<AlgorithmSpec, CatalogError> {
    let plan = super::build_sft(p.points)?;
    let (bt, g, a, log) = repair_parts(p.name, p.m, &p.bt, &p.g, &p.a)?;
    let core = plan.points + plan.complex_groups();
    if bt.rows() < core || bt.denominator() != 1 || g.denominator() != 1 {
        return Err(CatalogError::Integrity(format!("{}: unexpected published layout", p.name)));
    }
    let rows = bt.to_int_rows();
    let offset = rows[0].iter().position(|&v| v != 0).unwrap_or(0);
    let (symbolic, overlap) = symbolic_parts(
        &plan,
        p.m,
        p.r,
        offset,
        &rows[core..],
        &g.to_int_rows()[core..],
    )?;
    let source = if log.is_empty() { Source::Published } else { Source::Repaired(log) };
    AlgorithmSpec::assemble(p.name.to_string(), Family::Sfc, p.points, p.m, p.r, (bt, g, a), overlap, symbolic, source)
}
