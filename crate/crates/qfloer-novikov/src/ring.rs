//! The coefficient ring: integer (or mod 2) power series truncated at t^N.

use crate::NovError;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Ring parameters. `order` is the largest retained power of t, so elements
/// carry `order + 1` coefficients.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Truncation {
    pub order: usize,
    pub mod2: bool,
}

/// A ring element `c[0] + c[1] t + ... + c[order] t^order`. Coefficients are
/// arbitrary-precision: repeated unit inversions grow them quickly.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Nov {
    c: Vec<BigInt>,
}

impl Default for Truncation {
    /// Order 16 with integer coefficients; high enough for every stock
    /// computation while keeping series arithmetic cheap.
    fn default() -> Self {
        Truncation::integer(16)
    }
}

impl Truncation {
    pub fn integer(order: usize) -> Self {
        Truncation { order, mod2: false }
    }

    pub fn mod2(order: usize) -> Self {
        Truncation { order, mod2: true }
    }

    fn norm(&self, x: BigInt) -> BigInt {
        if self.mod2 {
            let r = x % 2;
            if r < BigInt::zero() {
                r + 2
            } else {
                r
            }
        } else {
            x
        }
    }

    pub fn elem(&self, coeffs: &[i64]) -> Nov {
        self.elem_big(coeffs.iter().map(|&x| BigInt::from(x)))
    }

    pub fn elem_big(&self, coeffs: impl IntoIterator<Item = BigInt>) -> Nov {
        let mut c = vec![BigInt::zero(); self.order + 1];
        for (i, x) in coeffs.into_iter().enumerate() {
            if i <= self.order {
                c[i] = self.norm(x);
            }
        }
        Nov { c }
    }

    pub fn zero(&self) -> Nov {
        Nov {
            c: vec![BigInt::zero(); self.order + 1],
        }
    }

    pub fn one(&self) -> Nov {
        self.monomial(0, 1)
    }

    /// `a t^v`, or zero if v exceeds the truncation order.
    pub fn monomial(&self, v: usize, a: i64) -> Nov {
        let mut c = vec![BigInt::zero(); self.order + 1];
        if v <= self.order {
            c[v] = self.norm(BigInt::from(a));
        }
        Nov { c }
    }

    pub fn int(&self, a: i64) -> Nov {
        self.monomial(0, a)
    }

    pub fn add(&self, a: &Nov, b: &Nov) -> Nov {
        debug_assert_eq!(a.c.len(), b.c.len());
        Nov {
            c: a.c
                .iter()
                .zip(&b.c)
                .map(|(x, y)| self.norm(x + y))
                .collect(),
        }
    }

    pub fn sub(&self, a: &Nov, b: &Nov) -> Nov {
        self.add(a, &self.neg(b))
    }

    pub fn neg(&self, a: &Nov) -> Nov {
        Nov {
            c: a.c.iter().map(|x| self.norm(-x)).collect(),
        }
    }

    pub fn mul(&self, a: &Nov, b: &Nov) -> Nov {
        let n = self.order;
        let mut c = vec![BigInt::zero(); n + 1];
        for (i, x) in a.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.c.iter().enumerate() {
                if i + j > n {
                    break;
                }
                c[i + j] += x * y;
            }
        }
        Nov {
            c: c.into_iter().map(|x| self.norm(x)).collect(),
        }
    }

    /// Units are exactly the elements with constant term +1 or -1 (just 1 mod 2).
    pub fn is_unit(&self, a: &Nov) -> bool {
        a.c[0].abs().is_one()
    }

    /// Power series inverse. Defined precisely for units; in particular t has
    /// no inverse and `inverse` reports that as an error.
    pub fn inverse(&self, a: &Nov) -> Result<Nov, NovError> {
        if a.c[0].is_zero() {
            return Err(NovError::TNotInvertible);
        }
        if !self.is_unit(a) {
            return Err(NovError::NotAUnit(format!("{}", a)));
        }
        let u = a.c[0].clone(); // +-1, self inverse
        let mut inv = self.zero();
        inv.c[0] = u.clone();
        // direct recurrence: (a * inv)_k = delta_{k,0}
        for k in 1..=self.order {
            let mut s = BigInt::zero();
            for j in 0..k {
                s += &a.c[k - j] * &inv.c[j];
            }
            inv.c[k] = self.norm(-&u * s);
        }
        debug_assert!(self.mul(a, &inv).is_one_like());
        Ok(inv)
    }

    pub fn scale(&self, a: i64, b: &Nov) -> Nov {
        let a = BigInt::from(a);
        Nov {
            c: b.c.iter().map(|x| self.norm(&a * x)).collect(),
        }
    }
}

impl Nov {
    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    fn is_one_like(&self) -> bool {
        self.c[0].abs().is_one() && self.c[1..].iter().all(|x| x.is_zero())
    }

    /// Order of vanishing at t = 0; None for the zero element.
    pub fn valuation(&self) -> Option<usize> {
        self.c.iter().position(|x| !x.is_zero())
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.c.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.c
    }
}

impl fmt::Display for Nov {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, x) in self.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let sign = if x.is_negative() {
                "-"
            } else if first {
                ""
            } else {
                "+"
            };
            let mag = x.abs();
            match (i, mag.is_one()) {
                (0, _) => write!(f, "{}{}", sign, mag)?,
                (1, true) => write!(f, "{}t", sign)?,
                (1, false) => write!(f, "{}{}t", sign, mag)?,
                (_, true) => write!(f, "{}t^{}", sign, i)?,
                (_, false) => write!(f, "{}{}t^{}", sign, mag, i)?,
            }
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for Nov {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tr() -> Truncation {
        Truncation::integer(8)
    }

    #[test]
    fn geometric_series_inverts_one_plus_t() {
        let tr = tr();
        let a = tr.elem(&[1, 1]);
        let inv = tr.inverse(&a).unwrap();
        // 1 - t + t^2 - t^3 + ...
        let expect = tr.elem(&[1, -1, 1, -1, 1, -1, 1, -1, 1]);
        assert_eq!(inv, expect);
        assert!(tr.mul(&a, &inv).is_one_like());
    }

    #[test]
    fn t_is_not_invertible() {
        let tr = tr();
        let t = tr.monomial(1, 1);
        assert!(matches!(tr.inverse(&t), Err(NovError::TNotInvertible)));
        assert!(!tr.is_unit(&t));
    }

    #[test]
    fn two_is_not_a_unit_over_the_integers() {
        let tr = tr();
        let two = tr.int(2);
        assert!(!tr.is_unit(&two));
        assert!(matches!(tr.inverse(&two), Err(NovError::NotAUnit(_))));
    }

    #[test]
    fn minus_one_plus_t_cubed_has_integer_inverse() {
        let tr = tr();
        let a = tr.elem(&[-1, 0, 0, 1]);
        let inv = tr.inverse(&a).unwrap();
        assert!(tr.mul(&a, &inv).is_one_like());
    }

    #[test]
    fn valuation_reads_the_lowest_power() {
        let tr = tr();
        assert_eq!(tr.zero().valuation(), None);
        assert_eq!(tr.monomial(3, -2).valuation(), Some(3));
        assert_eq!(tr.one().valuation(), Some(0));
    }

    #[test]
    fn mod2_ring_folds_coefficients() {
        let tr = Truncation::mod2(4);
        let a = tr.elem(&[3, 2, -1]);
        assert_eq!(a, tr.elem(&[1, 0, 1]));
        let double = tr.add(&a, &a);
        assert!(double.is_zero());
    }

    #[test]
    fn display_is_readable() {
        let tr = tr();
        let a = tr.elem(&[1, -1, 0, 2]);
        assert_eq!(format!("{}", a), "1-t+2t^3");
    }

    proptest! {
        #[test]
        fn ring_axioms_hold_on_random_elements(
            xs in proptest::collection::vec(-4i64..5, 9),
            ys in proptest::collection::vec(-4i64..5, 9),
            zs in proptest::collection::vec(-4i64..5, 9),
        ) {
            let tr = tr();
            let a = tr.elem(&xs);
            let b = tr.elem(&ys);
            let c = tr.elem(&zs);
            // commutativity and associativity
            prop_assert_eq!(tr.mul(&a, &b), tr.mul(&b, &a));
            prop_assert_eq!(tr.mul(&tr.mul(&a, &b), &c), tr.mul(&a, &tr.mul(&b, &c)));
            prop_assert_eq!(tr.add(&a, &b), tr.add(&b, &a));
            // distributivity
            prop_assert_eq!(
                tr.mul(&a, &tr.add(&b, &c)),
                tr.add(&tr.mul(&a, &b), &tr.mul(&a, &c))
            );
            // identities
            prop_assert_eq!(tr.mul(&a, &tr.one()), a.clone());
            prop_assert!(tr.add(&a, &tr.neg(&a)).is_zero());
        }

        #[test]
        fn units_invert_exactly(us in proptest::collection::vec(-3i64..4, 9)) {
            let tr = tr();
            let mut cs = us.clone();
            cs[0] = if us[0] % 2 == 0 { 1 } else { -1 };
            let a = tr.elem(&cs);
            let inv = tr.inverse(&a).unwrap();
            let prod = tr.mul(&a, &inv);
            prop_assert_eq!(prod, tr.one().clone());
        }
    }
}
