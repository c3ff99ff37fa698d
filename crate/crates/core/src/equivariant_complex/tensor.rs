use super::{CochainComplex, EquivariantComplex, Generator};
use crate::error::{Error, Result};
use crate::fp_core::FpMatrix;
use crate::rational::Rational;

/// Largest `dim(V)^p` for which the tensor power is built as dense matrices.
pub const MAX_TENSOR_DIM: usize = 1024;

/// Flat indexing of `V^{⊗k}`: the multi-index `(i_0, .., i_{k-1})` sits at
/// `i_0 n^{k-1} + .. + i_{k-1}`.
#[derive(Clone, Copy, Debug)]
pub struct TensorIndexer {
    pub n: usize,
    pub k: usize,
}

impl TensorIndexer {
    pub fn new(n: usize, k: usize) -> Self {
        TensorIndexer { n, k }
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.k as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn flat(&self, multi: &[usize]) -> usize {
        multi.iter().fold(0, |acc, &i| acc * self.n + i)
    }

    pub fn multi(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.k];
        for slot in out.iter_mut().rev() {
            *slot = flat % self.n;
            flat /= self.n;
        }
        out
    }

    /// `x_{k-1} ⊗ x_0 ⊗ .. ⊗ x_{k-2}` as a multi-index.
    pub fn rotate(&self, multi: &[usize]) -> Vec<usize> {
        let mut out = Vec::with_capacity(multi.len());
        out.push(multi[multi.len() - 1]);
        out.extend_from_slice(&multi[..multi.len() - 1]);
        out
    }

    /// Koszul sign exponent of the cyclic shift, `|x_{k-1}| (|x_0| + .. + |x_{k-2}|)`.
    pub fn rotation_sign_exponent(&self, multi: &[usize], degrees: &[i64]) -> i64 {
        let last = degrees[multi[self.k - 1]];
        let rest: i64 = multi[..self.k - 1].iter().map(|&i| degrees[i]).sum();
        last * rest
    }
}

/// The `p`-fold tensor power of `c` (p being the characteristic), with the
/// Koszul-signed product differential and the signed cyclic shift as `sigma`.
/// The action of `x_0 ⊗ .. ⊗ x_{p-1}` is the sum of the factor actions.
pub fn tensor_power(c: &CochainComplex) -> Result<EquivariantComplex> {
    c.validate().into_result()?;
    let field = c.field();
    let p = field.p() as usize;
    let n = c.dim();
    let size = (n as u128).checked_pow(p as u32).unwrap_or(u128::MAX);
    if size > MAX_TENSOR_DIM as u128 {
        return Err(Error::TooLarge(format!(
            "tensor power of dimension {n}^{p} exceeds {MAX_TENSOR_DIM}"
        )));
    }
    let ix = TensorIndexer::new(n, p);
    let total = ix.len();
    let degrees = c.degrees();
    let gens = c.generators();

    let mut generators = Vec::with_capacity(total);
    for flat in 0..total {
        let m = ix.multi(flat);
        let id = m
            .iter()
            .map(|&i| gens[i].id.as_str())
            .collect::<Vec<_>>()
            .join("⊗");
        let degree = m.iter().map(|&i| degrees[i]).sum();
        let action = m
            .iter()
            .fold(Rational::from_integer(0), |acc, &i| acc + gens[i].action);
        generators.push(Generator::new(id, degree, action));
    }

    // column lists of d for quick access
    let d_cols: Vec<Vec<(usize, u32)>> = (0..n)
        .map(|j| (0..n).filter_map(|i| {
            let v = c.d().get(i, j);
            (v != 0).then_some((i, v))
        }).collect())
        .collect();

    let mut d = FpMatrix::zeros(field, total, total);
    let mut sigma = FpMatrix::zeros(field, total, total);
    for flat in 0..total {
        let m = ix.multi(flat);
        let mut prefix = 0i64;
        for pos in 0..p {
            let sign = field.sign(prefix.rem_euclid(2) as u64);
            for &(row, v) in &d_cols[m[pos]] {
                let mut target = m.clone();
                target[pos] = row;
                let t = ix.flat(&target);
                let cur = d.get(t, flat);
                d.set(t, flat, field.mul_add(cur, sign, v));
            }
            prefix += degrees[m[pos]];
        }
        let e = ix.rotation_sign_exponent(&m, &degrees);
        sigma.set(ix.flat(&ix.rotate(&m)), flat, field.sign(e.rem_euclid(2) as u64));
    }

    let out = EquivariantComplex::new(CochainComplex::new(field, generators, d), sigma);
    out.validate().into_result()?;
    Ok(out)
}
