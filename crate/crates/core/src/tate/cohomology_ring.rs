use std::collections::BTreeMap;
use std::fmt;

use crate::fp_core::{FpScalar, PrimeField};

/// An element of `F_p((u))<θ>` with finitely many terms; `u` has degree 2,
/// `θ` degree 1 and `θ² = 0`. Keys are `(u exponent, θ exponent)`.
#[derive(Clone, PartialEq, Eq)]
pub struct RpElement {
    field: PrimeField,
    terms: BTreeMap<(i64, u8), u32>,
}

impl RpElement {
    pub fn zero(field: PrimeField) -> Self {
        RpElement {
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(field: PrimeField) -> Self {
        Self::monomial(field.scalar(1), 0, false)
    }

    /// `c u^k θ^e`
    pub fn monomial(c: FpScalar, u_exp: i64, theta: bool) -> Self {
        let mut out = Self::zero(c.field());
        out.add_term((u_exp, theta as u8), c.value());
        out
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, u_exp: i64, theta: bool) -> FpScalar {
        let v = self.terms.get(&(u_exp, theta as u8)).copied().unwrap_or(0);
        self.field.scalar(v as i64)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, bool, FpScalar)> + '_ {
        self.terms
            .iter()
            .map(|(&(k, e), &c)| (k, e == 1, self.field.scalar(c as i64)))
    }

    fn add_term(&mut self, key: (i64, u8), c: u32) {
        let f = self.field;
        let cur = self.terms.get(&key).copied().unwrap_or(0);
        let v = f.add(cur, c);
        if v == 0 {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, v);
        }
    }

    /// Degree if all terms share one, `None` for zero or mixed degrees.
    pub fn degree(&self) -> Option<i64> {
        let mut degs = self.terms.keys().map(|&(k, e)| 2 * k + e as i64);
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    pub fn add(&self, other: &RpElement) -> RpElement {
        let mut out = self.clone();
        for (&k, &c) in &other.terms {
            out.add_term(k, c);
        }
        out
    }

    pub fn mul(&self, other: &RpElement) -> RpElement {
        let f = self.field;
        let mut out = RpElement::zero(f);
        for (&(a, e), &x) in &self.terms {
            for (&(b, g), &y) in &other.terms {
                if e + g > 1 {
                    continue;
                }
                out.add_term((a + b, e + g), f.mul(x, y));
            }
        }
        out
    }

    pub fn pow(&self, n: u64) -> RpElement {
        (0..n).fold(RpElement::one(self.field), |acc, _| acc.mul(self))
    }
}

impl fmt::Debug for RpElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RpElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (&(k, e), &c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            if k != 0 {
                write!(f, " u^{k}")?;
            }
            if e == 1 {
                write!(f, " θ")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_squares_to_zero() {
        let f = PrimeField::new(3).unwrap();
        let theta = RpElement::monomial(f.scalar(1), 0, true);
        assert!(theta.mul(&theta).is_zero());
        let u = RpElement::monomial(f.scalar(2), 1, false);
        let x = u.mul(&theta);
        assert_eq!(x.degree(), Some(3));
        assert_eq!(x.coefficient(1, true).value(), 2);
        assert_eq!(u.pow(3).coefficient(3, false).value(), 2);
        assert_eq!(u.add(&u).add(&u), RpElement::zero(f));
    }
}
