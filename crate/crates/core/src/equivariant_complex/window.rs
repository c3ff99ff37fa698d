use std::fmt;

use serde::{Deserialize, Serialize};

use super::{CochainComplex, EquivariantComplex, Generator};
use crate::error::{Error, Result};
use crate::rational::{format_rational, serde_opt_rational, Rational};

/// An open action interval `(a, b)`; `None` stands for `-inf` on the left
/// and `+inf` on the right.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ActionWindow {
    #[serde(with = "serde_opt_rational")]
    pub a: Option<Rational>,
    #[serde(with = "serde_opt_rational")]
    pub b: Option<Rational>,
}

impl ActionWindow {
    pub fn new(a: Option<Rational>, b: Option<Rational>) -> Result<Self> {
        if let (Some(a), Some(b)) = (a, b) {
            if a >= b {
                return Err(Error::InadmissibleWindow(format!(
                    "empty interval ({}, {})",
                    format_rational(&a),
                    format_rational(&b)
                )));
            }
        }
        Ok(ActionWindow { a, b })
    }

    pub fn everything() -> Self {
        ActionWindow { a: None, b: None }
    }

    pub fn bounded(a: Rational, b: Rational) -> Result<Self> {
        Self::new(Some(a), Some(b))
    }

    pub fn below(t: Rational) -> Self {
        ActionWindow { a: None, b: Some(t) }
    }

    pub fn above(t: Rational) -> Self {
        ActionWindow { a: Some(t), b: None }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.a.is_none_or(|a| a < *x) && self.b.is_none_or(|b| *x < b)
    }

    /// The window `(c a, c b)` for `c > 0`.
    pub fn scaled(&self, c: Rational) -> Self {
        ActionWindow {
            a: self.a.map(|a| a * c),
            b: self.b.map(|b| b * c),
        }
    }

    /// Closure of the window avoids `x`.
    pub fn closure_avoids(&self, x: &Rational) -> bool {
        self.a.is_some_and(|a| a > *x) || self.b.is_some_and(|b| b < *x)
    }

    pub fn is_subset_of(&self, other: &ActionWindow) -> bool {
        let left = match (self.a, other.a) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(x), Some(y)) => x >= y,
        };
        let right = match (self.b, other.b) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(x), Some(y)) => x <= y,
        };
        left && right
    }

    /// Fails if an endpoint equals the action of some generator.
    pub fn check_admissible(&self, generators: &[Generator]) -> Result<()> {
        for g in generators {
            for e in [self.a, self.b].into_iter().flatten() {
                if e == g.action {
                    return Err(Error::InadmissibleWindow(format!(
                        "endpoint {} is the action of {}",
                        format_rational(&e),
                        g.id
                    )));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for ActionWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = self.a.map_or("-inf".to_string(), |a| format_rational(&a));
        let b = self.b.map_or("+inf".to_string(), |b| format_rational(&b));
        write!(f, "({a}, {b})")
    }
}

impl CochainComplex {
    /// The subquotient `C^{<b} / C^{<a}`, spanned by generators with action
    /// in the window.
    pub fn window_truncate(&self, w: &ActionWindow) -> Result<CochainComplex> {
        w.check_admissible(&self.generators)?;
        let keep: Vec<usize> = (0..self.dim())
            .filter(|&i| w.contains(&self.generators[i].action))
            .collect();
        Ok(CochainComplex::new(
            self.field,
            keep.iter().map(|&i| self.generators[i].clone()).collect(),
            self.d.select(&keep, &keep),
        ))
    }
}

/// Restriction of `c` to the action window `w`. Since `sigma` preserves
/// action, it restricts as well.
pub fn window_truncate(c: &EquivariantComplex, w: &ActionWindow) -> Result<EquivariantComplex> {
    w.check_admissible(c.generators())?;
    let keep: Vec<usize> = (0..c.dim())
        .filter(|&i| w.contains(&c.generators()[i].action))
        .collect();
    let complex = c.complex().window_truncate(w)?;
    Ok(EquivariantComplex::new(complex, c.sigma().select(&keep, &keep)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fp_core::{FpMatrix, PrimeField};

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn three_levels() -> CochainComplex {
        let f = PrimeField::new(3).unwrap();
        let gens = vec![
            Generator::new("a0", 1, r(0, 1)),
            Generator::new("a1", 1, r(1, 1)),
            Generator::new("a2", 0, r(2, 1)),
        ];
        let mut d = FpMatrix::zeros(f, 3, 3);
        d.set(1, 2, 1);
        CochainComplex::new(f, gens, d)
    }

    #[test]
    fn full_window_is_identity() {
        let c = three_levels();
        assert_eq!(c.window_truncate(&ActionWindow::everything()).unwrap(), c);
    }

    #[test]
    fn empty_window() {
        let c = three_levels();
        let w = ActionWindow::bounded(r(5, 1), r(6, 1)).unwrap();
        assert_eq!(c.window_truncate(&w).unwrap().dim(), 0);
    }

    #[test]
    fn middle_window_keeps_arrow() {
        let c = three_levels();
        let w = ActionWindow::bounded(r(1, 2), r(5, 2)).unwrap();
        let t = c.window_truncate(&w).unwrap();
        assert_eq!(t.dim(), 2);
        assert_eq!(t.d().entries().count(), 1);
        assert!(t.validate().is_valid());
        assert_eq!(t.total_homology_dim(), 0);
        // long exact sequence of C^{<1/2} -> C -> C/C^{<1/2}: 1 -> 1 -> 0
        let lower = c.window_truncate(&ActionWindow::below(r(1, 2))).unwrap();
        assert_eq!(lower.total_homology_dim(), 1);
        assert_eq!(c.total_homology_dim(), 1);
    }

    #[test]
    fn endpoint_on_spectrum_rejected() {
        let c = three_levels();
        let w = ActionWindow::bounded(r(1, 1), r(3, 1)).unwrap();
        assert!(matches!(c.window_truncate(&w), Err(Error::InadmissibleWindow(_))));
        assert!(ActionWindow::bounded(r(1, 1), r(1, 1)).is_err());
    }

    #[test]
    fn closure_avoidance() {
        let w = ActionWindow::bounded(r(1, 2), r(3, 2)).unwrap();
        assert!(w.closure_avoids(&r(0, 1)));
        assert!(!w.closure_avoids(&r(1, 1)));
        assert!(!ActionWindow::below(r(1, 1)).closure_avoids(&r(0, 1)));
        assert!(ActionWindow::below(r(-1, 1)).closure_avoids(&r(0, 1)));
    }
}
