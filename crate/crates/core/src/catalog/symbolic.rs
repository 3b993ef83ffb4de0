//! Symbolic (polynomial-ring) form of an algorithm and the symmetry-reduced product.
//!
//! Each transform coordinate is either a real scalar or one coefficient of a
//! `c0 + c1·s` element. Multiplying two complex elements costs 3 real products;
//! in 2D a complex×complex block is split by the Chinese remainder theorem
//! into two ring products (6 products instead of the 9 of the integrated form).

use serde::{Deserialize, Serialize};

use super::CatalogError;
use crate::tensor::{NumMatrix, Rational, RationalMatrix, RingRule, TensorError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SymGroup {
    Real(usize),
    /// Rows holding `c0` and `c1`.
    Complex(usize, usize),
}

/// Transform-domain element with the operations the reduced product needs.
pub trait RingElem: Clone {
    fn add(&self, o: &Self) -> Self;
    fn scale(&self, c: f64) -> Self;
    /// Product; adds the scalar multiplications spent to `count`.
    fn mul(&self, o: &Self, count: &mut u64) -> Self;

    fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(-1.0))
    }
}

impl RingElem for f64 {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn scale(&self, c: f64) -> Self {
        self * c
    }
    fn mul(&self, o: &Self, count: &mut u64) -> Self {
        *count += 1;
        self * o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
}

/// `Σ c_i · e_i`, skipping zero coefficients. At least one coefficient must be nonzero.
pub fn lin_comb<E: RingElem>(coeffs: &[f64], elems: &[&E]) -> E {
    let mut acc: Option<E> = None;
    for (&c, e) in coeffs.iter().zip(elems) {
        if c == 0.0 {
            continue;
        }
        let term = if c == 1.0 { (*e).clone() } else { e.scale(c) };
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term),
        });
    }
    acc.unwrap_or_else(|| elems[0].scale(0.0))
}

/// `num · X · numᵀ` over ring elements (denominator not applied).
pub fn sandwich<E: RingElem>(m: &NumMatrix, x: &[E]) -> Vec<E> {
    let (r, c) = (m.rows, m.cols);
    let mut tmp = Vec::with_capacity(r * c);
    for i in 0..r {
        let row = &m.num[i * c..(i + 1) * c];
        for j in 0..c {
            let col: Vec<&E> = (0..c).map(|k| &x[k * c + j]).collect();
            tmp.push(lin_comb(row, &col));
        }
    }
    let mut out = Vec::with_capacity(r * r);
    for i in 0..r {
        let trow: Vec<&E> = (0..c).map(|k| &tmp[i * c + k]).collect();
        for j in 0..r {
            out.push(lin_comb(&m.num[j * c..(j + 1) * c], &trow));
        }
    }
    out
}

/// `numᵀ · Y · num` over ring elements (denominator not applied).
pub fn sandwich_t<E: RingElem>(m: &NumMatrix, y: &[E]) -> Vec<E> {
    let (r, c) = (m.rows, m.cols);
    let colk = |j: usize| -> Vec<f64> { (0..r).map(|k| m.num[k * c + j]).collect() };
    let mut tmp = Vec::with_capacity(c * r);
    for i in 0..c {
        let coeffs = colk(i);
        for j in 0..r {
            let col: Vec<&E> = (0..r).map(|k| &y[k * r + j]).collect();
            tmp.push(lin_comb(&coeffs, &col));
        }
    }
    let mut out = Vec::with_capacity(c * c);
    for i in 0..c {
        let trow: Vec<&E> = (0..r).map(|k| &tmp[i * r + k]).collect();
        for j in 0..c {
            out.push(lin_comb(&colk(j), &trow));
        }
    }
    out
}

/// Symbolic form: input transform `k`, filter transform `l`, output transform `a`,
/// all over the same symbolic coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolicForm {
    pub k: RationalMatrix,
    pub l: RationalMatrix,
    pub a: RationalMatrix,
    pub groups: Vec<SymGroup>,
    pub ring: Option<RingRule>,
}

impl SymbolicForm {
    /// A form with only real coordinates (Winograd, direct).
    pub fn plain(bt: &RationalMatrix, g: &RationalMatrix, a: &RationalMatrix) -> Self {
        SymbolicForm {
            k: bt.clone(),
            l: g.clone(),
            a: a.clone(),
            groups: (0..bt.rows()).map(SymGroup::Real).collect(),
            ring: None,
        }
    }

    /// Builds a form from its input and filter transforms, solving the output transform exactly.
    pub fn solve(
        k: RationalMatrix,
        l: RationalMatrix,
        groups: Vec<SymGroup>,
        ring: Option<RingRule>,
        m: usize,
    ) -> Result<Self, CatalogError> {
        let mut form = SymbolicForm { a: RationalMatrix::zeros(k.rows(), m), k, l, groups, ring };
        let ts = form.coords();
        let (n, r) = (form.k.cols(), form.l.cols());
        let mut system = Vec::with_capacity(n * r);
        let mut keys = Vec::with_capacity(n * r);
        for j in 0..n {
            for kk in 0..r {
                system.push(form.bilinear(j, kk)?);
                keys.push((j, kk));
            }
        }
        let mut entries = vec![Rational::ZERO; ts * m];
        for i in 0..m {
            let rhs: Vec<Rational> = keys.iter().map(|&(j, kk)| Rational::int((j == i + kk) as i64)).collect();
            let (x, _) = crate::tensor::solve_exact(&system, &rhs, &vec![Rational::ZERO; ts])?
                .ok_or_else(|| CatalogError::Integrity("symbolic output transform has no solution".into()))?;
            for t in 0..ts {
                entries[t * m + i] = x[t];
            }
        }
        form.a = RationalMatrix::from_rationals(ts, m, &entries)?;
        if !form.is_exact()? {
            return Err(CatalogError::Integrity("symbolic form fails the identity check".into()));
        }
        Ok(form)
    }

    pub fn coords(&self) -> usize {
        self.k.rows()
    }

    pub fn real_count(&self) -> usize {
        self.groups.iter().filter(|g| matches!(g, SymGroup::Real(_))).count()
    }

    pub fn complex_count(&self) -> usize {
        self.groups.len() - self.real_count()
    }

    /// Products of one 1D application.
    pub fn mults_1d(&self) -> usize {
        self.real_count() + 3 * self.complex_count()
    }

    /// Products of one 2D tile with the conjugate-symmetry reduction.
    pub fn mults_2d(&self) -> usize {
        let (r, g) = (self.real_count(), self.complex_count());
        r * r + 6 * r * g + 6 * g * g
    }

    /// Symbolic-coordinate products for input `e_j` and filter `e_kk`.
    pub fn bilinear(&self, j: usize, kk: usize) -> Result<Vec<Rational>, TensorError> {
        let mut out = vec![Rational::ZERO; self.coords()];
        for g in &self.groups {
            match *g {
                SymGroup::Real(t) => out[t] = self.k.get(t, j).mul(self.l.get(t, kk))?,
                SymGroup::Complex(t0, t1) => {
                    let ring = self.ring.expect("complex group needs a ring");
                    let (a0, a1) = (self.k.get(t0, j), self.k.get(t1, j));
                    let (b0, b1) = (self.l.get(t0, kk), self.l.get(t1, kk));
                    let sq = a1.mul(b1)?;
                    out[t0] = a0.mul(b0)?.add(sq.mul(Rational::int(ring.alpha))?)?;
                    out[t1] = a0.mul(b1)?.add(a1.mul(b0)?)?.add(sq.mul(Rational::int(ring.beta))?)?;
                }
            }
        }
        Ok(out)
    }

    /// Exact check of `Σ_t a[t,i] · P_t(e_j, e_k) = δ(j, i+k)` for all `i, j, k`.
    pub fn is_exact(&self) -> Result<bool, TensorError> {
        let (n, r, m) = (self.k.cols(), self.l.cols(), self.a.cols());
        for j in 0..n {
            for kk in 0..r {
                let p = self.bilinear(j, kk)?;
                for i in 0..m {
                    let mut acc = Rational::ZERO;
                    for (t, pt) in p.iter().enumerate() {
                        if !pt.is_zero() {
                            acc = acc.add(self.a.get(t, i).mul(*pt)?)?;
                        }
                    }
                    if acc != Rational::int((j == i + kk) as i64) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    pub fn reducer(&self) -> Result<Reducer, CatalogError> {
        Reducer::new(self.groups.clone(), self.ring)
    }
}

/// Precomputed maps for the symmetry-reduced 2D product.
#[derive(Clone, Debug)]
pub struct Reducer {
    groups: Vec<SymGroup>,
    ring: Option<RingRule>,
    crt: [[f64; 4]; 4],
    crt_inv: [[f64; 4]; 4],
    n: usize,
}

impl Reducer {
    pub fn new(groups: Vec<SymGroup>, ring: Option<RingRule>) -> Result<Self, CatalogError> {
        let n = groups.iter().map(|g| match *g {
            SymGroup::Real(t) => t + 1,
            SymGroup::Complex(a, b) => a.max(b) + 1,
        });
        let n = n.max().unwrap_or(0);
        let (mut crt, mut crt_inv) = ([[0.0; 4]; 4], [[0.0; 4]; 4]);
        if let Some(rule) = ring {
            let phi = crt_matrix(rule);
            let inv = phi.inverse()?;
            for i in 0..4 {
                for j in 0..4 {
                    crt[i][j] = phi.get(i, j).to_f64();
                    crt_inv[i][j] = inv.get(i, j).to_f64();
                }
            }
        }
        Ok(Reducer { groups, ring, crt, crt_inv, n })
    }

    fn ring_mul<E: RingElem>(&self, a: (&E, &E), b: (&E, &E), count: &mut u64) -> (E, E) {
        let rule = self.ring.expect("complex group needs a ring");
        let m0 = a.0.mul(b.0, count);
        let m1 = a.1.mul(b.1, count);
        let m2 = a.0.add(a.1).mul(&b.0.add(b.1), count);
        let p0 = lin_comb(&[1.0, rule.alpha as f64], &[&m0, &m1]);
        let p1 = lin_comb(&[1.0, -1.0, rule.beta as f64 - 1.0], &[&m2, &m0, &m1]);
        (p0, p1)
    }

    /// Element-wise product of two `n × n` symbolic tiles with the symmetry reduction.
    pub fn product_2d<E: RingElem>(&self, u: &[E], v: &[E], count: &mut u64) -> Vec<E> {
        let n = self.n;
        let mut out: Vec<Option<E>> = vec![None; n * n];
        for gi in &self.groups {
            for gj in &self.groups {
                match (*gi, *gj) {
                    (SymGroup::Real(r), SymGroup::Real(c)) => {
                        out[r * n + c] = Some(u[r * n + c].mul(&v[r * n + c], count));
                    }
                    (SymGroup::Real(r), SymGroup::Complex(c0, c1)) => {
                        let (p0, p1) = self.ring_mul(
                            (&u[r * n + c0], &u[r * n + c1]),
                            (&v[r * n + c0], &v[r * n + c1]),
                            count,
                        );
                        out[r * n + c0] = Some(p0);
                        out[r * n + c1] = Some(p1);
                    }
                    (SymGroup::Complex(r0, r1), SymGroup::Real(c)) => {
                        let (p0, p1) = self.ring_mul(
                            (&u[r0 * n + c], &u[r1 * n + c]),
                            (&v[r0 * n + c], &v[r1 * n + c]),
                            count,
                        );
                        out[r0 * n + c] = Some(p0);
                        out[r1 * n + c] = Some(p1);
                    }
                    (SymGroup::Complex(r0, r1), SymGroup::Complex(c0, c1)) => {
                        let idx = [r0 * n + c0, r0 * n + c1, r1 * n + c0, r1 * n + c1];
                        let to_crt = |x: &[E]| -> Vec<E> {
                            let e: Vec<&E> = idx.iter().map(|&i| &x[i]).collect();
                            self.crt.iter().map(|row| lin_comb(row, &e)).collect()
                        };
                        let (qu, qv) = (to_crt(u), to_crt(v));
                        let (a0, a1) = self.ring_mul((&qu[0], &qu[1]), (&qv[0], &qv[1]), count);
                        let (b0, b1) = self.ring_mul((&qu[2], &qu[3]), (&qv[2], &qv[3]), count);
                        let q = [&a0, &a1, &b0, &b1];
                        for (row, &i) in self.crt_inv.iter().zip(&idx) {
                            out[i] = Some(lin_comb(row, &q));
                        }
                    }
                }
            }
        }
        out.into_iter().map(|e| e.expect("every coordinate belongs to a group")).collect()
    }
}

/// Map `p00 + p01·t + p10·s + p11·st ↦ (p(s, s), p(s, s̄))`, coefficients ordered
/// `(p00, p01, p10, p11) → (φ1.c0, φ1.c1, φ2.c0, φ2.c1)`.
fn crt_matrix(rule: RingRule) -> RationalMatrix {
    let (al, be) = (rule.alpha, rule.beta);
    let (ga, de) = rule.conj;
    RationalMatrix::from_vecs(
        &[
            vec![1, 0, 0, al],
            vec![0, 1, 1, be],
            vec![1, ga, 0, al * de],
            vec![0, de, 1, ga + be * de],
        ],
        1,
    )
    .expect("4x4 literal")
}
