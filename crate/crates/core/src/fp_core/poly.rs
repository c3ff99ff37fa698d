//! Polynomials in `u` over F_p and the rational-function field F_p(u).

use std::fmt;

use crate::fp_core::field::PrimeField;

/// A polynomial `c[0] + c[1] u + ...` over F_p, normalized with no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    field: PrimeField,
    coeffs: Vec<u32>,
}

impl Poly {
    pub fn zero(field: PrimeField) -> Self {
        Poly {
            field,
            coeffs: Vec::new(),
        }
    }

    pub fn constant(field: PrimeField, c: u32) -> Self {
        Self::from_coeffs(field, vec![c])
    }

    pub fn one(field: PrimeField) -> Self {
        Self::constant(field, 1)
    }

    /// `c * u^k`
    pub fn monomial(field: PrimeField, c: u32, k: usize) -> Self {
        let mut v = vec![0; k + 1];
        v[k] = c;
        Self::from_coeffs(field, v)
    }

    pub fn from_coeffs(field: PrimeField, coeffs: Vec<u32>) -> Self {
        let p = field.p();
        let mut coeffs: Vec<u32> = coeffs.into_iter().map(|c| c % p).collect();
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { field, coeffs }
    }

    pub fn from_signed(field: PrimeField, coeffs: &[i64]) -> Self {
        Self::from_coeffs(field, coeffs.iter().map(|&c| field.reduce(c)).collect())
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> u32 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let f = self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|i| {
                f.add(
                    self.coeffs.get(i).copied().unwrap_or(0),
                    other.coeffs.get(i).copied().unwrap_or(0),
                )
            })
            .collect();
        Poly::from_coeffs(f, c)
    }

    pub fn neg(&self) -> Poly {
        let f = self.field;
        Poly {
            field: f,
            coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: u32) -> Poly {
        let f = self.field;
        Poly::from_coeffs(f, self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.field);
        }
        let p = self.field.p() as u64;
        let mut acc = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                acc[i + j] = (acc[i + j] + a as u64 * b as u64) % p;
            }
        }
        Poly::from_coeffs(self.field, acc.into_iter().map(|x| x as u32).collect())
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let f = self.field;
        let dd = divisor.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return (Poly::zero(f), self.clone());
        }
        let inv_lead = f.inv(divisor.leading());
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u32; rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = f.mul(rem[k + dd], inv_lead);
            quot[k] = c;
            if c == 0 {
                continue;
            }
            let nc = f.neg(c);
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = f.mul_add(rem[k + j], nc, d);
            }
        }
        rem.truncate(dd);
        (Poly::from_coeffs(f, quot), Poly::from_coeffs(f, rem))
    }

    /// Exact quotient; `None` if the division leaves a remainder.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        let (q, r) = self.div_rem(divisor);
        r.is_zero().then_some(q)
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(self.field.inv(self.leading()))
    }

    /// Monic gcd (zero iff both inputs are zero).
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn eval(&self, x: u32) -> u32 {
        let f = self.field;
        self.coeffs
            .iter()
            .rev()
            .fold(0u32, |acc, &c| f.mul_add(c, acc, x))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 if c == 1 => write!(f, "u")?,
                1 => write!(f, "{c}u")?,
                _ if c == 1 => write!(f, "u^{k}")?,
                _ => write!(f, "{c}u^{k}")?,
            }
        }
        Ok(())
    }
}

/// A reduced fraction `num / den` in F_p(u) with monic denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFun {
    num: Poly,
    den: Poly,
}

impl RatFun {
    pub fn zero(field: PrimeField) -> Self {
        RatFun {
            num: Poly::zero(field),
            den: Poly::one(field),
        }
    }

    pub fn one(field: PrimeField) -> Self {
        Self::from_poly(Poly::one(field))
    }

    pub fn from_poly(num: Poly) -> Self {
        let den = Poly::one(num.field());
        RatFun { num, den }
    }

    pub fn constant(field: PrimeField, c: u32) -> Self {
        Self::from_poly(Poly::constant(field, c))
    }

    /// `c * u^k` for any integer `k`.
    pub fn laurent_monomial(field: PrimeField, c: u32, k: i64) -> Self {
        if k >= 0 {
            Self::from_poly(Poly::monomial(field, c, k as usize))
        } else {
            Self::new(
                Poly::constant(field, c),
                Poly::monomial(field, 1, (-k) as usize),
            )
            .expect("nonzero denominator")
        }
    }

    /// Reduces the fraction; `None` if the denominator is zero.
    pub fn new(num: Poly, den: Poly) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        let field = num.field();
        if num.is_zero() {
            return Some(RatFun::zero(field));
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = (num, den);
        if !g.is_one() {
            n = n.div_exact(&g).expect("gcd divides");
            d = d.div_exact(&g).expect("gcd divides");
        }
        let lc = d.leading();
        if lc != 1 {
            let inv = field.inv(lc);
            n = n.scale(inv);
            d = d.scale(inv);
        }
        Some(RatFun { num: n, den: d })
    }

    pub fn field(&self) -> PrimeField {
        self.num.field()
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, other: &RatFun) -> RatFun {
        if self.den == other.den {
            return RatFun::new(self.num.add(&other.num), self.den.clone()).unwrap();
        }
        RatFun::new(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
        .unwrap()
    }

    pub fn neg(&self) -> RatFun {
        RatFun {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &RatFun) -> RatFun {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatFun) -> RatFun {
        RatFun::new(self.num.mul(&other.num), self.den.mul(&other.den)).unwrap()
    }

    /// `None` when dividing by zero.
    pub fn div(&self, other: &RatFun) -> Option<RatFun> {
        if other.is_zero() {
            return None;
        }
        RatFun::new(self.num.mul(&other.den), self.den.mul(&other.num))
    }

    /// Value at `u = x`, or `None` if `x` is a pole.
    pub fn eval(&self, x: u32) -> Option<u32> {
        let f = self.field();
        let d = self.den.eval(x);
        (d != 0).then(|| f.mul(self.num.eval(x), f.inv(d)))
    }
}

impl fmt::Debug for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn poly_division() {
        let fld = f(5);
        // (u^2 + 3u + 2) = (u + 1)(u + 2)
        let a = Poly::from_signed(fld, &[2, 3, 1]);
        let b = Poly::from_signed(fld, &[1, 1]);
        let (q, r) = a.div_rem(&b);
        assert!(r.is_zero());
        assert_eq!(q, Poly::from_signed(fld, &[2, 1]));
        assert_eq!(a.gcd(&Poly::from_signed(fld, &[2, 1])), q);
    }

    #[test]
    fn ratfun_reduces() {
        let fld = f(3);
        let u = Poly::monomial(fld, 1, 1);
        let u2 = Poly::monomial(fld, 2, 2);
        let r = RatFun::new(u2, u.clone()).unwrap();
        assert_eq!(r.numerator(), &Poly::monomial(fld, 2, 1));
        assert!(r.denominator().is_one());
        let half = RatFun::new(Poly::one(fld), Poly::constant(fld, 2)).unwrap();
        // 1/2 = 2 in F_3, denominator made monic
        assert_eq!(half, RatFun::constant(fld, 2));
        assert!(RatFun::new(u, Poly::zero(fld)).is_none());
    }

    #[test]
    fn ratfun_field_ops() {
        let fld = f(7);
        let a = RatFun::new(Poly::from_signed(fld, &[1, 1]), Poly::from_signed(fld, &[0, 1])).unwrap();
        let b = RatFun::laurent_monomial(fld, 3, -2);
        let s = a.add(&b);
        assert_eq!(s.sub(&b), a);
        let q = a.div(&b).unwrap();
        assert_eq!(q.mul(&b), a);
        assert_eq!(a.eval(2), Some(fld.mul(3, fld.inv(2))));
        assert_eq!(a.eval(0), None);
    }
}
