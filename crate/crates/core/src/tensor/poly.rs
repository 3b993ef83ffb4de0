//! First-order symbolic polynomials `c0 + c1·s`.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct PolyElement {
    pub c0: f64,
    pub c1: f64,
}

impl PolyElement {
    pub fn new(c0: f64, c1: f64) -> Self {
        PolyElement { c0, c1 }
    }

    /// Unreduced product coefficients `(c0, c1, c2)`.
    pub fn raw_mul(self, o: PolyElement) -> [f64; 3] {
        [self.c0 * o.c0, self.c0 * o.c1 + self.c1 * o.c0, self.c1 * o.c1]
    }

    /// Numeric value under a substitution for `s`.
    pub fn eval(self, s: (f64, f64)) -> (f64, f64) {
        (self.c0 + self.c1 * s.0, self.c1 * s.1)
    }
}

/// Reduction rule `s² = alpha + beta·s` for the ring a symbolic transform works in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingRule {
    pub alpha: i64,
    pub beta: i64,
    /// Complex conjugate of `s` written as `gamma + delta·s`.
    pub conj: (i64, i64),
}

impl RingRule {
    /// DFT-6: `s = e^{jπ/3}`, `s² = s − 1`, `s̄ = 1 − s`.
    pub const DFT6: RingRule = RingRule { alpha: -1, beta: 1, conj: (1, -1) };
    /// DFT-4: `s = j`, `s² = −1`, `s̄ = −s`.
    pub const DFT4: RingRule = RingRule { alpha: -1, beta: 0, conj: (0, -1) };
    /// DFT-3: `s = e^{2jπ/3}`, `s² = −1 − s`, `s̄ = −1 − s`.
    pub const DFT3: RingRule = RingRule { alpha: -1, beta: -1, conj: (-1, -1) };

    pub fn reduce(&self, c: [f64; 3]) -> PolyElement {
        PolyElement::new(c[0] + self.alpha as f64 * c[2], c[1] + self.beta as f64 * c[2])
    }

    pub fn mul(&self, a: PolyElement, b: PolyElement) -> PolyElement {
        self.reduce(a.raw_mul(b))
    }

    /// The value of `s` as a complex number `(re, im)`.
    pub fn s_value(&self) -> (f64, f64) {
        // roots of s² − beta·s − alpha = 0 with positive imaginary part
        let b = self.beta as f64;
        let disc = b * b + 4.0 * self.alpha as f64;
        (b / 2.0, (-disc).sqrt() / 2.0)
    }
}

/// `s² = s − 1`: `(c0, c1, c2) → (c0 − c2, c1 + c2)`.
pub fn poly_reduce_dft6(c: [f64; 3]) -> PolyElement {
    RingRule::DFT6.reduce(c)
}

/// `s² = −1`: `(c0, c1, c2) → (c0 − c2, c1)`.
pub fn poly_reduce_dft4(c: [f64; 3]) -> PolyElement {
    RingRule::DFT4.reduce(c)
}
