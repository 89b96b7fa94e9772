//! Polynomial symbols Σ c_{αβ} x^α ξ^β with exact Moyal arithmetic.
//!
//! Left multiplication by a polynomial symbol is a finite differential
//! operator:
//!     (a ⋆ b)(x, ξ) = Σ a_{αβ} C(α,i) C(β,j) (−½)^i (½)^j x^{α−i} ξ^{β−j}
//!                     · (−i∂_ξ)^i (−i∂_x)^j b,
//! and right multiplication the mirror image with the signs of ½ swapped.

use std::collections::BTreeMap;

use crate::C64;

/// One term c · x^xp ξ^xip · ∂_ξ^dxi ∂_x^dx applied to the other factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffTerm {
    pub coeff: C64,
    pub x_pow: u32,
    pub xi_pow: u32,
    pub d_x: u32,
    pub d_xi: u32,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    terms: BTreeMap<(u32, u32), C64>,
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, t| acc * (n - t) as f64 / (t + 1) as f64)
}

fn falling(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, t| acc * (n - t) as f64)
}

impl Polynomial {
    pub fn zero() -> Polynomial {
        Polynomial::default()
    }

    pub fn constant(c: C64) -> Polynomial {
        Polynomial::monomial(0, 0, c)
    }

    /// c · x^x_pow ξ^xi_pow.
    pub fn monomial(x_pow: u32, xi_pow: u32, c: C64) -> Polynomial {
        let mut p = Polynomial::zero();
        p.add_term(x_pow, xi_pow, c);
        p
    }

    pub fn x() -> Polynomial {
        Polynomial::monomial(1, 0, C64::new(1.0, 0.0))
    }

    pub fn xi() -> Polynomial {
        Polynomial::monomial(0, 1, C64::new(1.0, 0.0))
    }

    /// (x² + ξ²)/2.
    pub fn oscillator() -> Polynomial {
        let h = C64::new(0.5, 0.0);
        Polynomial::monomial(2, 0, h).add(&Polynomial::monomial(0, 2, h))
    }

    /// ξ²/2.
    pub fn free_particle() -> Polynomial {
        Polynomial::monomial(0, 2, C64::new(0.5, 0.0))
    }

    fn add_term(&mut self, x_pow: u32, xi_pow: u32, c: C64) {
        if c == C64::new(0.0, 0.0) {
            return;
        }
        let e = self.terms.entry((x_pow, xi_pow)).or_insert(C64::new(0.0, 0.0));
        *e += c;
        if *e == C64::new(0.0, 0.0) {
            self.terms.remove(&(x_pow, xi_pow));
        }
    }

    /// Nonzero coefficients keyed by (x power, ξ power).
    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, C64)> + '_ {
        self.terms.iter().map(|(&(a, b), &c)| (a, b, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|(a, b)| a + b).max().unwrap_or(0)
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(|c| c.im == 0.0)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (a, b, c) in other.terms() {
            out.add_term(a, b, c);
        }
        out
    }

    pub fn scale(&self, s: C64) -> Polynomial {
        let mut out = Polynomial::zero();
        for (a, b, c) in self.terms() {
            out.add_term(a, b, c * s);
        }
        out
    }

    /// Pointwise (commutative) product.
    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (a1, b1, c1) in self.terms() {
            for (a2, b2, c2) in other.terms() {
                out.add_term(a1 + a2, b1 + b2, c1 * c2);
            }
        }
        out
    }

    pub fn eval(&self, x: f64, xi: f64) -> C64 {
        self.terms()
            .map(|(a, b, c)| c * x.powi(a as i32) * xi.powi(b as i32))
            .sum()
    }

    /// ∂_x^dx ∂_ξ^dxi.
    pub fn derivative(&self, d_x: u32, d_xi: u32) -> Polynomial {
        let mut out = Polynomial::zero();
        for (a, b, c) in self.terms() {
            if a >= d_x && b >= d_xi {
                out.add_term(a - d_x, b - d_xi, c * falling(a, d_x) * falling(b, d_xi));
            }
        }
        out
    }

    fn expansion(&self, sign: f64) -> Vec<DiffTerm> {
        // (−i)^{i+j} from the two Fourier multipliers.
        let minus_i_pow = |k: u32| C64::new(0.0, -1.0).powu(k);
        let mut out = Vec::new();
        for (alpha, beta, c) in self.terms() {
            for i in 0..=alpha {
                for j in 0..=beta {
                    let w = binomial(alpha, i)
                        * binomial(beta, j)
                        * (-0.5 * sign).powi(i as i32)
                        * (0.5 * sign).powi(j as i32);
                    out.push(DiffTerm {
                        coeff: c * w * minus_i_pow(i + j),
                        x_pow: alpha - i,
                        xi_pow: beta - j,
                        d_x: j,
                        d_xi: i,
                    });
                }
            }
        }
        out
    }

    /// Differential operator b ↦ self ⋆ b.
    pub fn left_star_terms(&self) -> Vec<DiffTerm> {
        self.expansion(1.0)
    }

    /// Differential operator a ↦ a ⋆ self.
    pub fn right_star_terms(&self) -> Vec<DiffTerm> {
        self.expansion(-1.0)
    }

    /// Exact Moyal product self ⋆ other.
    pub fn star(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for t in self.left_star_terms() {
            let d = other.derivative(t.d_x, t.d_xi);
            let m = Polynomial::monomial(t.x_pow, t.xi_pow, t.coeff);
            out = out.add(&m.mul(&d));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(v: f64) -> C64 {
        C64::new(v, 0.0)
    }

    #[test]
    fn x_star_xi() {
        let c = Polynomial::x().star(&Polynomial::xi());
        let want = Polynomial::monomial(1, 1, re(1.0)).add(&Polynomial::constant(C64::new(0.0, 0.5)));
        assert_eq!(c, want);
        let d = Polynomial::xi().star(&Polynomial::x());
        let want = Polynomial::monomial(1, 1, re(1.0)).add(&Polynomial::constant(C64::new(0.0, -0.5)));
        assert_eq!(d, want);
    }

    #[test]
    fn unit_is_neutral() {
        let a = Polynomial::oscillator().add(&Polynomial::monomial(3, 1, C64::new(0.2, -1.0)));
        let one = Polynomial::constant(re(1.0));
        assert_eq!(one.star(&a), a);
        assert_eq!(a.star(&one), a);
    }

    #[test]
    fn oscillator_star_is_associative() {
        let h = Polynomial::oscillator();
        let a = Polynomial::monomial(2, 1, re(1.0));
        let l = h.star(&a).star(&h);
        let r = h.star(&a.star(&h));
        assert_eq!(l, r);
    }

    #[test]
    fn x_squared_star_xi_squared() {
        // x² ⋆ ξ² = x²ξ² + 2i xξ − 1/2.
        let c = Polynomial::monomial(2, 0, re(1.0)).star(&Polynomial::monomial(0, 2, re(1.0)));
        let want = Polynomial::monomial(2, 2, re(1.0))
            .add(&Polynomial::monomial(1, 1, C64::new(0.0, 2.0)))
            .add(&Polynomial::constant(re(-0.5)));
        assert_eq!(c, want);
    }
}
