//! Exactness gate and matrix repair.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{AlgorithmSpec, CatalogError, Source};
use crate::tensor::{solve_exact, Rational, RationalMatrix, TensorError};

/// Checks `Σ_t A[t,i]·G[t,k]·Bᵀ[t,j] = δ(j, i+k)` exactly for all `i, j, k`.
///
/// This is the 1D algorithm on delta inputs and filters; the 2D algorithm is its
/// tensor square, so passing here proves exactness for every input.
pub fn check_identity(bt: &RationalMatrix, g: &RationalMatrix, a: &RationalMatrix) -> Result<bool, TensorError> {
    let (t, n, r, m) = (bt.rows(), bt.cols(), g.cols(), a.cols());
    if g.rows() != t || a.rows() != t || n != m + r - 1 {
        return Ok(false);
    }
    let den = (bt.denominator() as i128) * (g.denominator() as i128) * (a.denominator() as i128);
    for i in 0..m {
        for k in 0..r {
            for j in 0..n {
                let mut acc: i128 = 0;
                for row in 0..t {
                    let p = (a.num(row, i) as i128) * (g.num(row, k) as i128) * (bt.num(row, j) as i128);
                    acc = acc.checked_add(p).ok_or_else(|| TensorError::Overflow("identity check".into()))?;
                }
                let want = if j == i + k { den } else { 0 };
                if acc != want {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub trial: usize,
    pub input: Vec<Vec<i64>>,
    pub filter: Vec<Vec<i64>>,
    pub expected: Vec<Vec<i64>>,
    /// Fast-algorithm output as exact rationals.
    pub got: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub algorithm: String,
    pub trials: usize,
    pub seed: u64,
    pub mismatches: usize,
    pub first_counterexample: Option<Counterexample>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.mismatches == 0
    }
}

fn int_mat(m: &RationalMatrix) -> Vec<Vec<i128>> {
    (0..m.rows()).map(|r| m.row_nums(r).iter().map(|&v| v as i128).collect()).collect()
}

/// `L · X · Lᵀ` over integers. `L` is `p × q`, `X` is `q × q`.
fn sandwich(l: &[Vec<i128>], x: &[Vec<i128>]) -> Result<Vec<Vec<i128>>, TensorError> {
    let ov = || TensorError::Overflow("exact tile".into());
    let (p, q) = (l.len(), x.len());
    let mut tmp = vec![vec![0i128; q]; p];
    for i in 0..p {
        for j in 0..q {
            let mut acc = 0i128;
            for k in 0..q {
                acc = acc.checked_add(l[i][k].checked_mul(x[k][j]).ok_or_else(ov)?).ok_or_else(ov)?;
            }
            tmp[i][j] = acc;
        }
    }
    let mut out = vec![vec![0i128; p]; p];
    for i in 0..p {
        for j in 0..p {
            let mut acc = 0i128;
            for k in 0..q {
                acc = acc.checked_add(tmp[i][k].checked_mul(l[j][k]).ok_or_else(ov)?).ok_or_else(ov)?;
            }
            out[i][j] = acc;
        }
    }
    Ok(out)
}

/// Exact `Aᵀ[(G f Gᵀ) ⊙ (Bᵀ x B)]A` scaled by the squared product of denominators.
fn exact_tile(spec: &AlgorithmSpec, x: &[Vec<i128>], f: &[Vec<i128>]) -> Result<Vec<Vec<i128>>, TensorError> {
    let ov = || TensorError::Overflow("exact tile".into());
    let v = sandwich(&int_mat(&spec.bt), x)?;
    let u = sandwich(&int_mat(&spec.g), f)?;
    let t = v.len();
    let mut p = vec![vec![0i128; t]; t];
    for i in 0..t {
        for j in 0..t {
            p[i][j] = u[i][j].checked_mul(v[i][j]).ok_or_else(ov)?;
        }
    }
    // Aᵀ P A = (Aᵀ) P (Aᵀ)ᵀ
    let at = int_mat(&spec.a.transpose());
    let m = at.len();
    let mut tmp = vec![vec![0i128; t]; m];
    for i in 0..m {
        for j in 0..t {
            let mut acc = 0i128;
            for k in 0..t {
                acc = acc.checked_add(at[i][k].checked_mul(p[k][j]).ok_or_else(ov)?).ok_or_else(ov)?;
            }
            tmp[i][j] = acc;
        }
    }
    let mut out = vec![vec![0i128; m]; m];
    for i in 0..m {
        for j in 0..m {
            let mut acc = 0i128;
            for k in 0..t {
                acc = acc.checked_add(tmp[i][k].checked_mul(at[j][k]).ok_or_else(ov)?).ok_or_else(ov)?;
            }
            out[i][j] = acc;
        }
    }
    Ok(out)
}

fn direct_tile(x: &[Vec<i128>], f: &[Vec<i128>], m: usize) -> Vec<Vec<i128>> {
    let r = f.len();
    let mut out = vec![vec![0i128; m]; m];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, o) in row.iter_mut().enumerate() {
            for a in 0..r {
                for b in 0..r {
                    *o += x[i + a][j + b] * f[a][b];
                }
            }
        }
    }
    out
}

/// Evaluates one tile exactly; returns (expected, got) with `got` as exact rationals.
pub(crate) fn evaluate_tile(
    spec: &AlgorithmSpec,
    x: &[Vec<i64>],
    f: &[Vec<i64>],
) -> Result<(Vec<Vec<i64>>, Vec<Vec<Rational>>), TensorError> {
    let to128 = |v: &[Vec<i64>]| -> Vec<Vec<i128>> { v.iter().map(|r| r.iter().map(|&e| e as i128).collect()).collect() };
    let (x, f) = (to128(x), to128(f));
    let d = (spec.bt.denominator() as i128) * (spec.g.denominator() as i128) * (spec.a.denominator() as i128);
    let scale = d.checked_mul(d).ok_or_else(|| TensorError::Overflow("denominator".into()))?;
    let got = exact_tile(spec, &x, &f)?;
    let want = direct_tile(&x, &f, spec.m);
    let got = got
        .iter()
        .map(|r| r.iter().map(|&v| Rational::new(v, scale)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    let want = want.iter().map(|r| r.iter().map(|&v| v as i64).collect()).collect();
    Ok((want, got))
}

/// Runs the fast algorithm in exact arithmetic on seeded random integer tiles
/// (entries in [−8, 8]) and compares with direct 2D correlation.
pub fn validate_algorithm(spec: &AlgorithmSpec, trials: usize, seed: u64) -> Result<ValidationReport, CatalogError> {
    if trials == 0 {
        return Err(CatalogError::InvalidParameters("trials must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, r) = (spec.tile_in(), spec.r);
    let mut report = ValidationReport {
        algorithm: spec.name.clone(),
        trials,
        seed,
        mismatches: 0,
        first_counterexample: None,
    };
    for trial in 0..trials {
        let x: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-8..=8)).collect()).collect();
        let f: Vec<Vec<i64>> = (0..r).map(|_| (0..r).map(|_| rng.gen_range(-8..=8)).collect()).collect();
        let (want, got) = evaluate_tile(spec, &x, &f)?;
        let ok = want.iter().flatten().zip(got.iter().flatten()).all(|(&w, g)| Rational::int(w) == *g);
        if !ok {
            report.mismatches += 1;
            if report.first_counterexample.is_none() {
                report.first_counterexample = Some(Counterexample {
                    trial,
                    input: x,
                    filter: f,
                    expected: want,
                    got: got.iter().map(|r| r.iter().map(|v| v.to_string()).collect()).collect(),
                });
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct EntryChange {
    /// `"BT"`, `"G"` or `"A"`.
    pub matrix: String,
    pub row: usize,
    pub col: usize,
    pub old: String,
    pub new: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RepairLog {
    pub shape_changes: Vec<String>,
    pub entries: Vec<EntryChange>,
}

impl RepairLog {
    pub fn is_empty(&self) -> bool {
        self.shape_changes.is_empty() && self.entries.is_empty()
    }
}

#[derive(Clone, Copy)]
enum Unknown {
    BT,
    G,
    A,
}

/// Solves for one matrix with the other two fixed. `None` if no exact solution exists.
fn solve_one(
    which: Unknown,
    bt: &RationalMatrix,
    g: &RationalMatrix,
    a: &RationalMatrix,
) -> Result<Option<RationalMatrix>, TensorError> {
    let (t, n, r, m) = (bt.rows(), bt.cols(), g.cols(), a.cols());
    // unknown matrix columns are independent: fix the unknown's column index `c`
    // and range over the other two indices
    let (target, cols) = match which {
        Unknown::BT => (bt, n),
        Unknown::G => (g, r),
        Unknown::A => (a, m),
    };
    let mut entries = vec![Rational::ZERO; t * cols];
    for c in 0..cols {
        let mut system = Vec::new();
        let mut rhs = Vec::new();
        let mut push = |coef: Vec<Rational>, want: bool| {
            system.push(coef);
            rhs.push(Rational::int(want as i64));
        };
        match which {
            Unknown::BT => {
                for i in 0..m {
                    for k in 0..r {
                        let coef = (0..t).map(|row| a.get(row, i).mul(g.get(row, k))).collect::<Result<_, _>>()?;
                        push(coef, c == i + k);
                    }
                }
            }
            Unknown::G => {
                for i in 0..m {
                    for j in 0..n {
                        let coef = (0..t).map(|row| a.get(row, i).mul(bt.get(row, j))).collect::<Result<_, _>>()?;
                        push(coef, j == i + c);
                    }
                }
            }
            Unknown::A => {
                for k in 0..r {
                    for j in 0..n {
                        let coef = (0..t).map(|row| g.get(row, k).mul(bt.get(row, j))).collect::<Result<_, _>>()?;
                        push(coef, j == c + k);
                    }
                }
            }
        }
        let defaults: Vec<Rational> = (0..t).map(|row| target.get(row, c)).collect();
        let Some((x, _)) = solve_exact(&system, &rhs, &defaults)? else {
            return Ok(None);
        };
        for row in 0..t {
            entries[row * cols + c] = x[row];
        }
    }
    Ok(Some(RationalMatrix::from_rationals(t, cols, &entries)?))
}

fn diff(name: &str, old: &RationalMatrix, new: &RationalMatrix) -> Vec<EntryChange> {
    let mut out = Vec::new();
    for r in 0..old.rows() {
        for c in 0..old.cols() {
            let (o, n) = (old.get(r, c), new.get(r, c));
            if o != n {
                out.push(EntryChange { matrix: name.into(), row: r, col: c, old: o.to_string(), new: n.to_string() });
            }
        }
    }
    out
}

/// Repairs a spec that fails the gate.
///
/// An output transform with the wrong column count is first trimmed or
/// zero-padded to `M` columns. Then each of `A`, `G`, `Bᵀ` in turn is treated as
/// unknown with the other two fixed, and the exact linear system
/// "fast output = linear convolution" over delta inputs and filters is solved;
/// underdetermined entries keep their printed values. Among the consistent
/// candidates the one changing the fewest entries wins.
pub fn repair_matrix(spec: &AlgorithmSpec) -> Result<(AlgorithmSpec, RepairLog), CatalogError> {
    let (bt, g, a, log) = repair_parts(&spec.name, spec.m, &spec.bt, &spec.g, &spec.a)?;
    let mut out = spec.clone();
    out.bt = bt;
    out.g = g;
    out.a = a;
    if !log.is_empty() {
        out.source = Source::Repaired(log.clone());
    }
    Ok((out, log))
}

/// [`repair_matrix`] on bare matrices, which may not yet have the right shape.
pub(crate) fn repair_parts(
    name: &str,
    m: usize,
    bt: &RationalMatrix,
    g: &RationalMatrix,
    a: &RationalMatrix,
) -> Result<(RationalMatrix, RationalMatrix, RationalMatrix, RepairLog), CatalogError> {
    let mut log = RepairLog::default();
    let mut a = a.clone();
    if a.cols() != m {
        let mut nums = Vec::with_capacity(a.rows() * m);
        for r in 0..a.rows() {
            for c in 0..m {
                nums.push(if c < a.cols() { a.num(r, c) } else { 0 });
            }
        }
        log.shape_changes.push(format!("A resized from {}x{} to {}x{}", a.rows(), a.cols(), a.rows(), m));
        a = RationalMatrix::new(a.rows(), m, nums, a.denominator())?;
    }
    if check_identity(bt, g, &a)? {
        return Ok((bt.clone(), g.clone(), a, log));
    }
    let mut best: Option<(RationalMatrix, RationalMatrix, RationalMatrix, Vec<EntryChange>)> = None;
    for which in [Unknown::A, Unknown::G, Unknown::BT] {
        let Some(sol) = solve_one(which, bt, g, &a)? else {
            continue;
        };
        let cand = match which {
            Unknown::A => (bt.clone(), g.clone(), sol.clone(), diff("A", &a, &sol)),
            Unknown::G => (bt.clone(), sol.clone(), a.clone(), diff("G", g, &sol)),
            Unknown::BT => (sol.clone(), g.clone(), a.clone(), diff("BT", bt, &sol)),
        };
        if !check_identity(&cand.0, &cand.1, &cand.2)? {
            continue;
        }
        if best.as_ref().map_or(true, |b| cand.3.len() < b.3.len()) {
            best = Some(cand);
        }
    }
    let (bt, g, a, changes) = best.ok_or_else(|| {
        CatalogError::Integrity(format!("{name}: no single-matrix repair satisfies the exactness constraints"))
    })?;
    log.entries = changes;
    Ok((bt, g, a, log))
}
