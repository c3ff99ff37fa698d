//! F_p[Z/pZ]-modules as sums of Jordan blocks `F_p[t]/(t^k)`, `t = σ - 1`,
//! and the Smith-inequality bookkeeping built on the multiplicities.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fp_core::{nilpotent_partition, FpMatrix};

/// Multiplicities `m_1..m_p` of the blocks `F_p[t]/(t^k)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ModuleDecomposition {
    pub p: u32,
    /// `multiplicities[k - 1] = m_k`
    pub multiplicities: Vec<usize>,
}

impl ModuleDecomposition {
    pub fn dim(&self) -> usize {
        self.multiplicities
            .iter()
            .enumerate()
            .map(|(k, &m)| (k + 1) * m)
            .sum()
    }

    pub fn m(&self, k: usize) -> usize {
        self.multiplicities[k - 1]
    }

    /// `m_1 + .. + m_{p-1}`
    pub fn non_free(&self) -> usize {
        self.multiplicities[..self.multiplicities.len() - 1].iter().sum()
    }

    /// `m_p`, the number of free summands.
    pub fn free(&self) -> usize {
        *self.multiplicities.last().unwrap()
    }
}

pub fn decompose(sigma: &FpMatrix) -> Result<ModuleDecomposition> {
    let field = sigma.field();
    let p = field.p();
    if !sigma.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "sigma is {}x{}",
            sigma.rows(),
            sigma.cols()
        )));
    }
    if !sigma.pow(p as u64).is_identity() {
        return Err(Error::NotOrderP);
    }
    let t = sigma.sub(&FpMatrix::identity(field, sigma.rows()));
    let mut multiplicities = vec![0; p as usize];
    for k in nilpotent_partition(&t)? {
        multiplicities[k - 1] += 1;
    }
    Ok(ModuleDecomposition { p, multiplicities })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ClosedFormDims {
    pub tate_dim: usize,
    pub invariant_dim: usize,
}

/// Tate dimension `2(m_1 + .. + m_{p-1})` and invariant dimension
/// `m_1 + .. + m_p`.
pub fn tate_and_invariant_dims(d: &ModuleDecomposition) -> ClosedFormDims {
    ClosedFormDims {
        tate_dim: 2 * d.non_free(),
        invariant_dim: d.multiplicities.iter().sum(),
    }
}

/// The chain `dim HF(φ) ≤ m_1+..+m_{p-1} ≤ dim HF(φ^p)^{Z/pZ} ≤ dim HF(φ^p)`
/// evaluated from `dim HF(φ)` and the action of `σ` on `HF(φ^p)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainReport {
    pub hf_phi_dim: usize,
    pub sharpened_bound: usize,
    pub invariant_dim: usize,
    pub hf_phi_p_dim: usize,
    pub decomposition: ModuleDecomposition,
    /// `dim HF(φ) ≤ m_1 + .. + m_{p-1}`
    pub sharpened_holds: bool,
    /// `dim HF(φ) ≤ dim HF(φ^p)^{Z/pZ}`
    pub classical_holds: bool,
    /// The two right-hand inequalities, which always hold.
    pub invariant_le_total: bool,
    pub sharpened_le_invariant: bool,
    /// `m_p > 0`: the sharpened bound is strictly below the invariant bound.
    pub strictly_stronger: bool,
}

impl ChainReport {
    pub fn all_hold(&self) -> bool {
        self.sharpened_holds && self.classical_holds && self.invariant_le_total && self.sharpened_le_invariant
    }
}

pub fn smith_chain_check(hf_phi_dim: usize, sigma_on_hf_phi_p: &FpMatrix) -> Result<ChainReport> {
    let decomposition = decompose(sigma_on_hf_phi_p)?;
    let dims = tate_and_invariant_dims(&decomposition);
    let sharpened_bound = decomposition.non_free();
    let total = decomposition.dim();
    Ok(ChainReport {
        hf_phi_dim,
        sharpened_bound,
        invariant_dim: dims.invariant_dim,
        hf_phi_p_dim: total,
        sharpened_holds: hf_phi_dim <= sharpened_bound,
        classical_holds: hf_phi_dim <= dims.invariant_dim,
        invariant_le_total: dims.invariant_dim <= total,
        sharpened_le_invariant: sharpened_bound <= dims.invariant_dim,
        strictly_stronger: decomposition.free() > 0,
        decomposition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fp_core::PrimeField;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn cycle(fld: PrimeField) -> FpMatrix {
        let p = fld.p() as usize;
        FpMatrix::permutation(fld, &(0..p).map(|i| (i + 1) % p).collect::<Vec<_>>())
    }

    #[test]
    fn decompositions() {
        let d = decompose(&FpMatrix::identity(f(3), 4)).unwrap();
        assert_eq!(d.multiplicities, vec![4, 0, 0]);
        let d = decompose(&cycle(f(5))).unwrap();
        assert_eq!(d.multiplicities, vec![0, 0, 0, 0, 1]);
        let d = decompose(&FpMatrix::identity(f(3), 1).direct_sum(&cycle(f(3)))).unwrap();
        assert_eq!(d.multiplicities, vec![1, 0, 1]);
        assert_eq!(d.dim(), 4);
    }

    #[test]
    fn not_order_p() {
        let swap = FpMatrix::from_rows(f(3), &[[0, 1], [1, 0]]);
        assert!(matches!(decompose(&swap), Err(Error::NotOrderP)));
    }

    #[test]
    fn closed_forms() {
        let dims = |m: Vec<usize>| tate_and_invariant_dims(&ModuleDecomposition { p: 3, multiplicities: m });
        assert_eq!(dims(vec![1, 0, 0]), ClosedFormDims { tate_dim: 2, invariant_dim: 1 });
        assert_eq!(dims(vec![0, 0, 1]), ClosedFormDims { tate_dim: 0, invariant_dim: 1 });
        assert_eq!(dims(vec![2, 1, 0]), ClosedFormDims { tate_dim: 6, invariant_dim: 3 });
    }

    #[test]
    fn chain_examples() {
        let r = smith_chain_check(1, &FpMatrix::identity(f(3), 1)).unwrap();
        assert!(r.all_hold());
        assert!(!r.strictly_stronger);

        let r = smith_chain_check(1, &cycle(f(3))).unwrap();
        assert!(!r.sharpened_holds);
        assert!(r.classical_holds);
        assert_eq!((r.sharpened_bound, r.invariant_dim), (0, 1));

        let sigma = FpMatrix::identity(f(3), 2).direct_sum(&cycle(f(3)));
        let r = smith_chain_check(2, &sigma).unwrap();
        assert_eq!(
            (r.hf_phi_dim, r.sharpened_bound, r.invariant_dim, r.hf_phi_p_dim),
            (2, 2, 3, 5)
        );
        assert!(r.all_hold() && r.strictly_stronger);
    }
}
