//! Toom-Cook construction of Winograd minimal-filtering algorithms, and the
//! direct-convolution spec.

use std::fmt;
use std::str::FromStr;

use super::symbolic::SymbolicForm;
use super::{AlgorithmSpec, CatalogError, Family, Source};
use crate::tensor::{Rational, RationalMatrix};

/// Interpolation point; `Infinity` contributes the leading coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Root {
    Finite(Rational),
    Infinity,
}

impl Root {
    pub fn int(v: i64) -> Root {
        Root::Finite(Rational::int(v))
    }

    pub fn frac(n: i64, d: i64) -> Root {
        Root::Finite(Rational::new(n as i128, d as i128).expect("nonzero denominator"))
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Root::Finite(q) => write!(f, "{q}"),
            Root::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for Root {
    type Err = CatalogError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s == "∞" {
            return Ok(Root::Infinity);
        }
        let bad = || CatalogError::InvalidParameters(format!("bad root `{s}`"));
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim().parse::<i64>().map_err(|_| bad())?, d.trim().parse::<i64>().map_err(|_| bad())?),
            None => (s.parse::<i64>().map_err(|_| bad())?, 1),
        };
        if d == 0 {
            return Err(bad());
        }
        Ok(Root::frac(n, d))
    }
}

/// Root sets used by the catalog.
pub(crate) fn default_roots(m: usize, r: usize) -> Result<Vec<Root>, CatalogError> {
    let i = Root::int;
    let pool = [i(0), i(1), i(-1), i(2), i(-2), Root::frac(1, 2), Root::frac(-1, 2), i(3), i(-3)];
    let finite = m + r - 2;
    if finite > pool.len() {
        return Err(CatalogError::InvalidParameters(format!("no default roots for F({m},{r})")));
    }
    let mut roots = pool[..finite].to_vec();
    roots.push(Root::Infinity);
    Ok(roots)
}

fn vrow(p: Root, len: usize) -> Result<Vec<Rational>, CatalogError> {
    match p {
        Root::Infinity => Ok((0..len).map(|c| Rational::int((c + 1 == len) as i64)).collect()),
        Root::Finite(q) => {
            let mut row = Vec::with_capacity(len);
            let mut v = Rational::ONE;
            for _ in 0..len {
                row.push(v);
                v = v.mul(q)?;
            }
            Ok(row)
        }
    }
}

/// Direct convolution as a degenerate fast algorithm: `M = 1`, `Bᵀ = G = I`, `A = 1`.
pub fn direct_spec(r: usize) -> Result<AlgorithmSpec, CatalogError> {
    if r == 0 {
        return Err(CatalogError::InvalidParameters("kernel edge must be positive".into()));
    }
    let id = RationalMatrix::identity(r);
    let ones = RationalMatrix::new(r, 1, vec![1; r], 1)?;
    let symbolic = SymbolicForm::plain(&id, &id, &ones);
    AlgorithmSpec::assemble(
        format!("direct-{r}x{r}"),
        Family::Direct,
        r,
        1,
        r,
        (id.clone(), id.clone(), ones),
        id,
        symbolic,
        Source::Generated,
    )
}

/// Builds F(M, R) from `M + R − 1` distinct points, the infinity point (if any) last.
///
/// Finite-point rows of `Bᵀ` carry the Lagrange denominator `Π_{q≠p}(p − q)` and
/// the matching `G` rows are divided by it.
pub fn generate_winograd(m: usize, r: usize, roots: &[Root]) -> Result<AlgorithmSpec, CatalogError> {
    let n = m + r - 1;
    if m == 0 || r == 0 || roots.len() != n {
        return Err(CatalogError::InvalidParameters(format!(
            "F({m},{r}) needs {n} points, got {}",
            roots.len()
        )));
    }
    for (i, a) in roots.iter().enumerate() {
        if roots[..i].contains(a) {
            return Err(CatalogError::DuplicateRoot(a.to_string()));
        }
    }
    if roots[..n - 1].contains(&Root::Infinity) {
        return Err(CatalogError::InvalidParameters("the infinity point must be last".into()));
    }
    if m == 1 {
        return direct_spec(r);
    }
    let mut v = Vec::with_capacity(n * n);
    for &p in roots {
        v.extend(vrow(p, n)?);
    }
    let vinv = RationalMatrix::from_rationals(n, n, &v)?.inverse()?;
    let mut bt = Vec::with_capacity(n * n);
    let mut g = Vec::with_capacity(n * r);
    let mut a = Vec::with_capacity(n * m);
    for (t, &p) in roots.iter().enumerate() {
        let d = match p {
            Root::Infinity => Rational::ONE,
            Root::Finite(q) => roots.iter().try_fold(Rational::ONE, |acc, &o| match o {
                Root::Finite(w) if w != q => acc.mul(q.sub(w)?),
                _ => Ok(acc),
            })?,
        };
        for j in 0..n {
            bt.push(vinv.get(j, t).mul(d)?);
        }
        for e in vrow(p, r)? {
            g.push(e.div(d)?);
        }
        a.extend(vrow(p, m)?);
    }
    let bt = RationalMatrix::from_rationals(n, n, &bt)?;
    let g = RationalMatrix::from_rationals(n, r, &g)?;
    let a = RationalMatrix::from_rationals(n, m, &a)?;
    let symbolic = SymbolicForm::plain(&bt, &g, &a);
    AlgorithmSpec::assemble(
        format!("wino-{m}x{m}-{r}x{r}"),
        Family::Winograd,
        n,
        m,
        r,
        (bt.clone(), g, a),
        bt,
        symbolic,
        Source::Generated,
    )
}
