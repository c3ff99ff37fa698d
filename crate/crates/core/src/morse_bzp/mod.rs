//! The perturbed Morse model of the lens-space tower `S^{2l+1} → S^∞` with
//! its free rotation action, and the unit constants of the local Euler
//! class.
//!
//! On `S^{2l_max+1} ⊂ C^{l_max+1}` the critical points of the perturbed
//! function sit on the circles `S¹_l` (all coordinates but `z_l` zero).
//! Index `2l+1` points have `z_l ∈ μ_p`, index `2l` points have
//! `z_l ∈ −μ_p`, so every index carries one free orbit of `Z/p`.

use std::fmt;

use serde::Serialize;

use crate::equivariant_complex::{CochainComplex, EquivariantComplex, Generator};
use crate::fp_core::{FpMatrix, FpScalar, PrimeField};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CriticalPoint {
    pub level: u32,
    /// `z_l = ζ^k` (odd) or `z_l = −ζ^k` (even), `ζ = e^{2πi/p}`.
    pub root_index: u32,
    pub parity: Parity,
}

impl CriticalPoint {
    pub fn index(&self) -> u32 {
        2 * self.level + matches!(self.parity, Parity::Odd) as u32
    }
}

impl fmt::Display for CriticalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.parity {
            Parity::Even => "-",
            Parity::Odd => "",
        };
        write!(f, "z{}={}zeta^{}", self.level, sign, self.root_index)
    }
}

/// All critical points on `S^{2 l_max + 1}`, ordered by index then root.
pub fn enumerate_critical_points(p: u32, l_max: u32) -> Vec<CriticalPoint> {
    let mut out = Vec::with_capacity(2 * p as usize * (l_max as usize + 1));
    for level in 0..=l_max {
        for parity in [Parity::Even, Parity::Odd] {
            for root_index in 0..p {
                out.push(CriticalPoint { level, root_index, parity });
            }
        }
    }
    out
}

/// The Morse cochain complex in degrees `0..degrees`: one copy of `F_p[G]`
/// per index, generators are critical points, `σ` rotates the root index,
/// and the differential alternates `1 − σ` (from even index) and `N` (from
/// odd index). Action is minus the index so the differential lowers it.
pub fn morse_complex(field: PrimeField, degrees: u32) -> EquivariantComplex {
    let p = field.p();
    let l_max = degrees.saturating_sub(1) / 2;
    let points: Vec<CriticalPoint> = enumerate_critical_points(p, l_max)
        .into_iter()
        .filter(|c| c.index() < degrees)
        .collect();
    let gens: Vec<Generator> = points
        .iter()
        .map(|c| Generator::new(c.to_string(), c.index() as i64, Rational::from_integer(-(c.index() as i64))))
        .collect();
    let n = points.len();
    let pu = p as usize;
    let mut d = FpMatrix::zeros(field, n, n);
    let mut sigma = FpMatrix::zeros(field, n, n);
    let minus_one = field.neg(1);
    for (j, c) in points.iter().enumerate() {
        let block = j - c.root_index as usize;
        let next = |k: u32| block + (k % p) as usize;
        sigma.set(next(c.root_index + 1), j, 1);
        if c.index() + 1 >= degrees {
            continue;
        }
        let target = block + pu;
        match c.parity {
            Parity::Even => {
                // (1 − σ) e_k = e_k − e_{k+1}
                let a = target + c.root_index as usize;
                let b = target + ((c.root_index + 1) % p) as usize;
                d.set(a, j, field.add(d.get(a, j), 1));
                d.set(b, j, field.add(d.get(b, j), minus_one));
            }
            Parity::Odd => {
                for k in 0..pu {
                    d.set(target + k, j, 1);
                }
            }
        }
    }
    EquivariantComplex::new(CochainComplex::new(field, gens, d), sigma)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResolutionHomology {
    pub p: u32,
    /// Cohomology dimension in each degree `0..length`; the last degree is
    /// affected by truncation.
    pub dims: Vec<usize>,
}

impl ResolutionHomology {
    /// `F_p` in degree 0 and nothing else below the truncation degree.
    pub fn is_acyclic_resolution(&self) -> bool {
        let n = self.dims.len();
        self.dims.first() == Some(&1) && self.dims[1..n - 1].iter().all(|&d| d == 0)
    }
}

/// Cohomology of the truncated periodic complex
/// `F_p[G] →(1−σ) F_p[G] →N F_p[G] → ⋯` with `length ≥ 2` terms.
pub fn resolution_homology(field: PrimeField, length: u32) -> ResolutionHomology {
    let length = length.max(2);
    let c = morse_complex(field, length);
    let h = c.complex().homology_dims();
    ResolutionHomology {
        p: field.p(),
        dims: (0..length as i64).map(|k| h.get(&k).copied().unwrap_or(0)).collect(),
    }
}

/// `(p − 1)! mod p`.
pub fn wilson_constant(field: PrimeField) -> FpScalar {
    let v = (1..field.p()).fold(1, |acc, a| field.mul(acc, a));
    field.scalar(v as i64)
}

/// The constant `c · u^e` of the local Euler class of a rank-`n` complex
/// bundle: each of the `n` factors contributes `Π_{a ∈ F_p^×} a · u^{p−1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EulerConstant {
    pub sign: FpScalar,
    pub u_exponent: u64,
}

pub fn local_euler_constant(n: u64, field: PrimeField) -> EulerConstant {
    EulerConstant {
        sign: wilson_constant(field).pow(n),
        u_exponent: n * (field.p() as u64 - 1),
    }
}
