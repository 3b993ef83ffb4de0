//! Exact rational scalars and matrices.
//!
//! Matrices store 64-bit numerators over one shared positive denominator.
//! Intermediate arithmetic (elimination, products) runs on 128-bit values and
//! every operation is overflow-checked.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::TensorError;

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn overflow(what: &str) -> TensorError {
    TensorError::Overflow(what.to_string())
}

/// An exact rational number in lowest terms with a positive denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i128,
    den: i128,
}

impl Rational {
    pub const ZERO: Rational = Rational { num: 0, den: 1 };
    pub const ONE: Rational = Rational { num: 1, den: 1 };

    pub fn new(num: i128, den: i128) -> Result<Self, TensorError> {
        if den == 0 {
            return Err(TensorError::Singular("zero denominator".into()));
        }
        let g = gcd(num, den).max(1);
        let (mut n, mut d) = (num / g, den / g);
        if d < 0 {
            n = n.checked_neg().ok_or_else(|| overflow("rational sign"))?;
            d = d.checked_neg().ok_or_else(|| overflow("rational sign"))?;
        }
        Ok(Rational { num: n, den: d })
    }

    pub fn int(v: i64) -> Self {
        Rational { num: v as i128, den: 1 }
    }

    pub fn num(&self) -> i128 {
        self.num
    }

    pub fn den(&self) -> i128 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn add(self, o: Rational) -> Result<Rational, TensorError> {
        let g = gcd(self.den, o.den);
        let l = (self.den / g)
            .checked_mul(o.den)
            .ok_or_else(|| overflow("rational add"))?;
        let a = self
            .num
            .checked_mul(l / self.den)
            .ok_or_else(|| overflow("rational add"))?;
        let b = o
            .num
            .checked_mul(l / o.den)
            .ok_or_else(|| overflow("rational add"))?;
        Rational::new(a.checked_add(b).ok_or_else(|| overflow("rational add"))?, l)
    }

    pub fn neg(self) -> Rational {
        Rational { num: -self.num, den: self.den }
    }

    pub fn sub(self, o: Rational) -> Result<Rational, TensorError> {
        self.add(o.neg())
    }

    pub fn mul(self, o: Rational) -> Result<Rational, TensorError> {
        let g1 = gcd(self.num, o.den).max(1);
        let g2 = gcd(o.num, self.den).max(1);
        let n = (self.num / g1)
            .checked_mul(o.num / g2)
            .ok_or_else(|| overflow("rational mul"))?;
        let d = (self.den / g2)
            .checked_mul(o.den / g1)
            .ok_or_else(|| overflow("rational mul"))?;
        Rational::new(n, d)
    }

    pub fn div(self, o: Rational) -> Result<Rational, TensorError> {
        if o.num == 0 {
            return Err(TensorError::Singular("division by zero".into()));
        }
        self.mul(Rational { num: o.den, den: o.num }.normalized())
    }

    fn normalized(self) -> Rational {
        if self.den < 0 {
            Rational { num: -self.num, den: -self.den }
        } else {
            self
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Exact matrix: integer numerators over a shared positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    numerators: Vec<i64>,
    denominator: i64,
}

impl RationalMatrix {
    /// Builds a matrix and reduces the shared denominator by the gcd of all numerators.
    pub fn new(rows: usize, cols: usize, numerators: Vec<i64>, denominator: i64) -> Result<Self, TensorError> {
        if numerators.len() != rows * cols {
            return Err(TensorError::DimensionMismatch(format!(
                "{} numerators for a {rows}x{cols} matrix",
                numerators.len()
            )));
        }
        if denominator == 0 {
            return Err(TensorError::Singular("zero denominator".into()));
        }
        let mut m = RationalMatrix { rows, cols, numerators, denominator };
        if m.denominator < 0 {
            m.denominator = m.denominator.checked_neg().ok_or_else(|| overflow("denominator"))?;
            for v in &mut m.numerators {
                *v = v.checked_neg().ok_or_else(|| overflow("numerator"))?;
            }
        }
        m.reduce();
        Ok(m)
    }

    /// Integer rows over a denominator. Panics on ragged input; meant for literal tables.
    pub fn from_rows(rows: &[&[i64]], denominator: i64) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix literal");
        let nums = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::new(rows.len(), cols, nums, denominator).expect("valid matrix literal")
    }

    pub fn from_vecs(rows: &[Vec<i64>], denominator: i64) -> Result<Self, TensorError> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(TensorError::DimensionMismatch("ragged rows".into()));
        }
        Self::new(rows.len(), cols, rows.iter().flatten().copied().collect(), denominator)
    }

    /// Builds a matrix from exact entries, choosing the lcm of their denominators.
    pub fn from_rationals(rows: usize, cols: usize, entries: &[Rational]) -> Result<Self, TensorError> {
        if entries.len() != rows * cols {
            return Err(TensorError::DimensionMismatch("entry count".into()));
        }
        let mut l: i128 = 1;
        for e in entries {
            let g = gcd(l, e.den);
            l = (l / g).checked_mul(e.den).ok_or_else(|| overflow("lcm"))?;
        }
        let den = i64::try_from(l).map_err(|_| overflow("denominator"))?;
        let mut nums = Vec::with_capacity(entries.len());
        for e in entries {
            let v = e.num.checked_mul(l / e.den).ok_or_else(|| overflow("numerator"))?;
            nums.push(i64::try_from(v).map_err(|_| overflow("numerator"))?);
        }
        Self::new(rows, cols, nums, den)
    }

    pub fn identity(n: usize) -> Self {
        let mut nums = vec![0; n * n];
        for i in 0..n {
            nums[i * n + i] = 1;
        }
        RationalMatrix { rows: n, cols: n, numerators: nums, denominator: 1 }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix { rows, cols, numerators: vec![0; rows * cols], denominator: 1 }
    }

    fn reduce(&mut self) {
        let mut g = self.denominator as i128;
        for &v in &self.numerators {
            g = gcd(g, v as i128);
            if g == 1 {
                return;
            }
        }
        if g > 1 {
            let g = g as i64;
            self.denominator /= g;
            for v in &mut self.numerators {
                *v /= g;
            }
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn denominator(&self) -> i64 {
        self.denominator
    }

    pub fn numerators(&self) -> &[i64] {
        &self.numerators
    }

    pub fn num(&self, r: usize, c: usize) -> i64 {
        self.numerators[r * self.cols + c]
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        Rational::new(self.num(r, c) as i128, self.denominator as i128).expect("positive denominator")
    }

    pub fn row_nums(&self, r: usize) -> &[i64] {
        &self.numerators[r * self.cols..(r + 1) * self.cols]
    }

    /// Numerator rows as owned vectors.
    pub fn to_int_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|r| self.row_nums(r).to_vec()).collect()
    }

    pub fn entries(&self) -> Vec<Rational> {
        (0..self.rows * self.cols)
            .map(|i| Rational::new(self.numerators[i] as i128, self.denominator as i128).expect("positive"))
            .collect()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        let d = self.denominator as f64;
        self.numerators.iter().map(|&v| v as f64 / d).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut nums = vec![0; self.rows * self.cols];
        for r in 0..self.rows {
            for c in 0..self.cols {
                nums[c * self.rows + r] = self.num(r, c);
            }
        }
        RationalMatrix { rows: self.cols, cols: self.rows, numerators: nums, denominator: self.denominator }
    }

    /// Selected rows, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let nums = idx.iter().flat_map(|&r| self.row_nums(r).iter().copied()).collect();
        let mut m = RationalMatrix { rows: idx.len(), cols: self.cols, numerators: nums, denominator: self.denominator };
        m.reduce();
        m
    }

    pub fn scale(&self, c: Rational) -> Result<Self, TensorError> {
        let e: Result<Vec<_>, _> = self.entries().into_iter().map(|v| v.mul(c)).collect();
        Self::from_rationals(self.rows, self.cols, &e?)
    }

    /// Nonzero count in row `r`.
    pub fn row_nnz(&self, r: usize) -> usize {
        self.row_nums(r).iter().filter(|&&v| v != 0).count()
    }

    /// Stable byte encoding used for hashing.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + 8 * self.numerators.len());
        out.extend_from_slice(&(self.rows as u64).to_le_bytes());
        out.extend_from_slice(&(self.cols as u64).to_le_bytes());
        out.extend_from_slice(&self.denominator.to_le_bytes());
        for v in &self.numerators {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    /// Exact inverse by Gauss-Jordan elimination.
    pub fn inverse(&self) -> Result<Self, TensorError> {
        if self.rows != self.cols {
            return Err(TensorError::DimensionMismatch(format!("inverse of {}x{}", self.rows, self.cols)));
        }
        let n = self.rows;
        let mut a: Vec<Vec<Rational>> = (0..n).map(|r| (0..n).map(|c| self.get(r, c)).collect()).collect();
        let mut inv: Vec<Vec<Rational>> = (0..n)
            .map(|r| (0..n).map(|c| if r == c { Rational::ONE } else { Rational::ZERO }).collect())
            .collect();
        for col in 0..n {
            let p = (col..n)
                .find(|&r| !a[r][col].is_zero())
                .ok_or_else(|| TensorError::Singular("matrix is not invertible".into()))?;
            a.swap(col, p);
            inv.swap(col, p);
            let pv = a[col][col];
            for c in 0..n {
                a[col][c] = a[col][c].div(pv)?;
                inv[col][c] = inv[col][c].div(pv)?;
            }
            for r in 0..n {
                if r != col && !a[r][col].is_zero() {
                    let f = a[r][col];
                    for c in 0..n {
                        a[r][c] = a[r][c].sub(f.mul(a[col][c])?)?;
                        inv[r][c] = inv[r][c].sub(f.mul(inv[col][c])?)?;
                    }
                }
            }
        }
        let flat: Vec<Rational> = inv.into_iter().flatten().collect();
        Self::from_rationals(n, n, &flat)
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denominator != 1 {
            writeln!(f, "1/{} *", self.denominator)?;
        }
        for r in 0..self.rows {
            let row: Vec<String> = self.row_nums(r).iter().map(|v| format!("{v:>3}")).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// Exact product; the result denominator is the product of the inputs' reduced
/// by the gcd of all numerators.
pub fn rational_matmul(a: &RationalMatrix, b: &RationalMatrix) -> Result<RationalMatrix, TensorError> {
    if a.cols != b.rows {
        return Err(TensorError::DimensionMismatch(format!(
            "{}x{} times {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let mut nums = Vec::with_capacity(a.rows * b.cols);
    for r in 0..a.rows {
        for c in 0..b.cols {
            let mut acc: i128 = 0;
            for k in 0..a.cols {
                let p = (a.num(r, k) as i128)
                    .checked_mul(b.num(k, c) as i128)
                    .ok_or_else(|| overflow("matmul"))?;
                acc = acc.checked_add(p).ok_or_else(|| overflow("matmul"))?;
            }
            nums.push(i64::try_from(acc).map_err(|_| overflow("matmul"))?);
        }
    }
    let den = a.denominator.checked_mul(b.denominator).ok_or_else(|| overflow("matmul denominator"))?;
    RationalMatrix::new(a.rows, b.cols, nums, den)
}

/// Solves `system · x = rhs` exactly.
///
/// Returns `None` when inconsistent. Free variables take the values in
/// `defaults`, so an underdetermined system stays as close as possible to a
/// prior guess. The second element lists the free variable indices.
pub fn solve_exact(
    system: &[Vec<Rational>],
    rhs: &[Rational],
    defaults: &[Rational],
) -> Result<Option<(Vec<Rational>, Vec<usize>)>, TensorError> {
    let n = defaults.len();
    let mut a: Vec<Vec<Rational>> = system
        .iter()
        .zip(rhs)
        .map(|(row, &b)| {
            let mut r = row.clone();
            r.push(b);
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..a.len()).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let pv = a[row][col];
        for c in col..=n {
            a[row][c] = a[row][c].div(pv)?;
        }
        for r in 0..a.len() {
            if r != row && !a[r][col].is_zero() {
                let f = a[r][col];
                for c in col..=n {
                    a[r][c] = a[r][c].sub(f.mul(a[row][c])?)?;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == a.len() {
            break;
        }
    }
    if a[row..].iter().any(|r| !r[n].is_zero()) {
        return Ok(None);
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut x = defaults.to_vec();
    for (r, &pc) in pivots.iter().enumerate() {
        let mut v = a[r][n];
        for &fc in &free {
            v = v.sub(a[r][fc].mul(x[fc])?)?;
        }
        x[pc] = v;
    }
    Ok(Some((x, free)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f6() -> RationalMatrix {
        RationalMatrix::from_rows(
            &[
                &[1, 1, 1, 1, 1, 1],
                &[1, 1, 0, -1, -1, 0],
                &[0, -1, -1, 0, 1, 1],
                &[1, 0, -1, 1, 0, -1],
                &[0, -1, 1, 0, -1, 1],
                &[1, -1, 1, -1, 1, -1],
            ],
            1,
        )
    }

    #[test]
    fn identity_product() {
        let m = RationalMatrix::from_rows(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 10]], 3);
        assert_eq!(rational_matmul(&RationalMatrix::identity(3), &m).unwrap(), m);
    }

    #[test]
    fn row_times_column() {
        let r = RationalMatrix::from_rows(&[&[1, 1, 1]], 1);
        let p = rational_matmul(&r, &r.transpose()).unwrap();
        assert_eq!(p.to_int_rows(), vec![vec![3]]);
        assert_eq!(p.denominator(), 1);
    }

    #[test]
    fn f6_inverse_roundtrip() {
        let f = f6();
        let inv = f.inverse().unwrap();
        assert_eq!(inv.denominator(), 6);
        assert_eq!(rational_matmul(&f, &inv).unwrap(), RationalMatrix::identity(6));
        assert_eq!(rational_matmul(&inv, &f).unwrap(), RationalMatrix::identity(6));
    }

    #[test]
    fn denominators_reduce() {
        let m = RationalMatrix::from_rows(&[&[2, 4], &[6, 8]], 2);
        assert_eq!(m.denominator(), 1);
        assert_eq!(m.to_int_rows(), vec![vec![1, 2], vec![3, 4]]);
    }

    #[test]
    fn mismatch_is_error() {
        let a = RationalMatrix::identity(2);
        let b = RationalMatrix::identity(3);
        assert!(matches!(rational_matmul(&a, &b), Err(TensorError::DimensionMismatch(_))));
    }

    #[test]
    fn singular_inverse_fails() {
        let m = RationalMatrix::from_rows(&[&[1, 2], &[2, 4]], 1);
        assert!(m.inverse().is_err());
    }

    #[test]
    fn solver_free_variables_keep_defaults() {
        let q = Rational::int;
        // x0 + x1 = 3, x2 free
        let sys = vec![vec![q(1), q(1), q(0)]];
        let (x, free) = solve_exact(&sys, &[q(3)], &[q(0), q(0), q(7)]).unwrap().unwrap();
        assert_eq!(free, vec![1, 2]);
        assert_eq!(x, vec![q(3), q(0), q(7)]);
        let bad = vec![vec![q(1)], vec![q(1)]];
        assert!(solve_exact(&bad, &[q(1), q(2)], &[q(0)]).unwrap().is_none());
    }

    #[test]
    fn rational_arithmetic() {
        let a = Rational::new(1, 6).unwrap();
        let b = Rational::new(-1, 4).unwrap();
        assert_eq!(a.add(b).unwrap(), Rational::new(-1, 12).unwrap());
        assert_eq!(a.mul(b).unwrap(), Rational::new(-1, 24).unwrap());
        assert_eq!(a.div(b).unwrap(), Rational::new(-2, 3).unwrap());
        assert!(Rational::new(i128::MAX, 1).unwrap().mul(Rational::int(2)).is_err());
    }
}
