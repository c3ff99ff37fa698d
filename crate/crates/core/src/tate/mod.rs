//! Group and Tate cohomology of Z/pZ with coefficients in an equivariant
//! complex, mapping cones, and the quasi-Frobenius map.

mod cohomology_ring;
mod frobenius;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::equivariant_complex::{CochainComplex, EquivariantComplex, Generator};
use crate::error::{Error, Result};
use crate::fp_core::{ratfun_rank, FpMatrix, RatFun, RatMatrix};
use crate::rational::Rational;

pub use cohomology_ring::RpElement;
pub use frobenius::{
    quasi_frobenius, AdditivityCertificate, ChainLevelCheck, FrobeniusClass, QuasiFrobenius,
    CHAIN_LEVEL_LIMIT,
};

/// Tate cohomology dimensions over F_p(u), one per parity of total degree.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct TateDims {
    pub even: usize,
    pub odd: usize,
}

impl TateDims {
    pub fn total(&self) -> usize {
        self.even + self.odd
    }
}

/// The Tate complex `V<1, θ>` over F_p(u). Basis vectors `0..n` are `x ⊗ 1`
/// and `n..2n` are `x ⊗ θ`, with
/// `d(x⊗1) = dx⊗1 + (1-σ)x⊗θ` and `d(x⊗θ) = -dx⊗θ + uNx⊗1`.
#[derive(Clone, Debug)]
pub struct TateComplexView {
    source: EquivariantComplex,
    matrix: RatMatrix,
    one_minus_sigma: FpMatrix,
    norm: FpMatrix,
}

impl TateComplexView {
    pub fn new(v: &EquivariantComplex) -> Result<Self> {
        v.ensure_valid()?;
        let field = v.field();
        let n = v.dim();
        let one_minus_sigma = v.one_minus_sigma();
        let norm = v.norm();
        let mut matrix = RatMatrix::zeros(field, 2 * n, 2 * n);
        let one = RatFun::one(field);
        matrix.add_block(0, 0, v.d(), &one);
        matrix.add_block(n, 0, &one_minus_sigma, &one);
        matrix.add_block(0, n, &norm, &RatFun::laurent_monomial(field, 1, 1));
        matrix.add_block(n, n, &v.d().neg(), &one);
        Ok(TateComplexView {
            source: v.clone(),
            matrix,
            one_minus_sigma,
            norm,
        })
    }

    pub fn source(&self) -> &EquivariantComplex {
        &self.source
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.matrix
    }

    pub fn one_minus_sigma(&self) -> &FpMatrix {
        &self.one_minus_sigma
    }

    pub fn norm(&self) -> &FpMatrix {
        &self.norm
    }

    pub fn squares_to_zero(&self) -> bool {
        self.matrix.mul(&self.matrix).is_zero()
    }

    /// Total degree of basis vector `i` modulo 2.
    pub fn parity(&self, i: usize) -> usize {
        let n = self.source.dim();
        let g = &self.source.generators()[i % n];
        (g.degree + (i >= n) as i64).rem_euclid(2) as usize
    }

    /// Basis indices of even and odd total degree.
    pub fn parity_classes(&self) -> (Vec<usize>, Vec<usize>) {
        (0..self.matrix.rows()).partition(|&i| self.parity(i) == 0)
    }

    pub fn dims(&self) -> TateDims {
        tate_dims_of(&self.matrix, &self.parity_classes())
    }
}

/// Homology dims of a square-zero matrix that exchanges the two given index
/// classes, computed blockwise.
pub(crate) fn tate_dims_of(m: &RatMatrix, classes: &(Vec<usize>, Vec<usize>)) -> TateDims {
    let (even, odd) = classes;
    let (r_eo, r_oe) = rayon::join(
        || ratfun_rank(&m.select(odd, even)),
        || ratfun_rank(&m.select(even, odd)),
    );
    TateDims {
        even: even.len() - r_eo - r_oe,
        odd: odd.len() - r_eo - r_oe,
    }
}

pub fn tate_cohomology_dims(v: &EquivariantComplex) -> Result<TateDims> {
    Ok(TateComplexView::new(v)?.dims())
}

/// Width `max degree - min degree` of the complex (0 when empty).
pub fn homological_width(c: &CochainComplex) -> i64 {
    c.degree_range().map_or(0, |(lo, hi)| hi - lo)
}

pub fn default_max_degree(c: &CochainComplex) -> i64 {
    2 * homological_width(c) + 4
}

/// `H^k(Z/pZ; V)` for `k` from `min(0, lowest degree of V)` to `max_degree`,
/// computed from `C^k = ⊕_{i≥0} V^{k-i}` with differential
/// `d_† + (-1)^i d_V`, where `d_†` is `1-σ` out of even `i` and `N` out of odd `i`.
pub fn group_cohomology_dims(v: &EquivariantComplex, max_degree: i64) -> Result<Vec<(i64, usize)>> {
    v.ensure_valid()?;
    if max_degree < 0 {
        return Err(Error::malformed("max_degree", "must be non-negative"));
    }
    let cochains = GroupCochains::new(v);
    let start = cochains.lo.min(0);
    let mut ranks = BTreeMap::new();
    let mut rank = |k: i64| *ranks.entry(k).or_insert_with(|| cochains.differential(k).rank());
    let mut out = Vec::new();
    for k in start..=max_degree {
        let dim = cochains.dim(k);
        let h = dim - rank(k) - rank(k - 1);
        out.push((k, h));
    }
    Ok(out)
}

/// Degreewise data of `V` needed for the group cochain complex.
struct GroupCochains {
    field: crate::fp_core::PrimeField,
    lo: i64,
    hi: i64,
    /// per degree j: (dim, d: V^j -> V^{j+1}, 1-σ on V^j, N on V^j)
    blocks: BTreeMap<i64, (usize, FpMatrix, FpMatrix, FpMatrix)>,
}

impl GroupCochains {
    fn new(v: &EquivariantComplex) -> Self {
        let c = v.complex();
        let (lo, hi) = c.degree_range().unwrap_or((0, -1));
        let t = v.one_minus_sigma();
        let nm = v.norm();
        let mut blocks = BTreeMap::new();
        for j in lo..=hi {
            let idx = c.indices_in_degree(j);
            if idx.is_empty() {
                continue;
            }
            blocks.insert(
                j,
                (idx.len(), c.d_block(j), t.select(&idx, &idx), nm.select(&idx, &idx)),
            );
        }
        GroupCochains {
            field: v.field(),
            lo,
            hi,
            blocks,
        }
    }

    /// Components `(i, j)` of `C^k` with `i + j = k`, `i ≥ 0`, `V^j ≠ 0`,
    /// paired with their offset.
    fn components(&self, k: i64) -> Vec<(i64, i64, usize)> {
        let mut out = Vec::new();
        let mut offset = 0;
        for j in (self.lo..=self.hi.min(k)).rev() {
            if let Some((n, ..)) = self.blocks.get(&j) {
                out.push((k - j, j, offset));
                offset += n;
            }
        }
        out
    }

    fn dim(&self, k: i64) -> usize {
        self.components(k)
            .iter()
            .map(|&(_, j, _)| self.blocks[&j].0)
            .sum()
    }

    fn differential(&self, k: i64) -> FpMatrix {
        let src = self.components(k);
        let dst = self.components(k + 1);
        let mut m = FpMatrix::zeros(self.field, self.dim(k + 1), self.dim(k));
        let find = |i: i64, j: i64| dst.iter().find(|&&(a, b, _)| a == i && b == j).map(|c| c.2);
        let put = |m: &mut FpMatrix, r0: usize, c0: usize, block: &FpMatrix, sign: u32| {
            for (a, b, x) in block.entries() {
                m.set(r0 + a, c0 + b, self.field.mul(sign, x));
            }
        };
        for &(i, j, c0) in &src {
            let (_, d, t, nm) = &self.blocks[&j];
            if let Some(r0) = find(i, j + 1) {
                put(&mut m, r0, c0, d, self.field.sign(i as u64));
            }
            if let Some(r0) = find(i + 1, j) {
                put(&mut m, r0, c0, if i % 2 == 0 { t } else { nm }, 1);
            }
        }
        m
    }
}

/// The mapping cone of an equivariant chain map `f: V → W` (a
/// `dim W × dim V` matrix): `Cone^k = V^{k+1} ⊕ W^k` with
/// `d(v, w) = (-d v, f v + d w)` and `σ_V ⊕ σ_W`.
///
/// Generators are renamed `v:<id>` and `w:<id>`. The actions on the `V`
/// summand are raised by the least non-negative integer making `f` strictly
/// action-decreasing.
pub fn mapping_cone(
    f: &FpMatrix,
    v: &EquivariantComplex,
    w: &EquivariantComplex,
) -> Result<EquivariantComplex> {
    v.ensure_valid()?;
    w.ensure_valid()?;
    if v.field() != w.field() || f.field() != v.field() {
        return Err(Error::ModulusMismatch(v.p(), w.p()));
    }
    if f.rows() != w.dim() || f.cols() != v.dim() {
        return Err(Error::DimensionMismatch(format!(
            "map is {}x{}, expected {}x{}",
            f.rows(),
            f.cols(),
            w.dim(),
            v.dim()
        )));
    }
    let (gv, gw) = (v.generators(), w.generators());
    for (i, j, _) in f.entries() {
        if gw[i].degree != gv[j].degree {
            return Err(Error::NotChainMap(format!(
                "f({}) has a component on {} of another degree",
                gv[j].id, gw[i].id
            )));
        }
    }
    if f.mul(v.d()) != w.d().mul(f) {
        return Err(Error::NotChainMap("f d != d f".into()));
    }
    if f.mul(v.sigma()) != w.sigma().mul(f) {
        return Err(Error::NotEquivariant);
    }
    let mut shift = Rational::from_integer(0);
    for (i, j, _) in f.entries() {
        let gap = gw[i].action - gv[j].action;
        if gap >= shift {
            shift = (gap + Rational::from_integer(1)).floor();
        }
    }
    let (n, m) = (v.dim(), w.dim());
    let mut generators: Vec<Generator> = gv
        .iter()
        .map(|g| Generator::new(format!("v:{}", g.id), g.degree - 1, g.action + shift))
        .collect();
    generators.extend(gw.iter().map(|g| Generator::new(format!("w:{}", g.id), g.degree, g.action)));
    let field = v.field();
    let mut d = v.d().neg().direct_sum(w.d());
    for (i, j, x) in f.entries() {
        d.set(n + i, j, x);
    }
    let sigma = v.sigma().direct_sum(w.sigma());
    debug_assert_eq!(d.rows(), n + m);
    let cone = EquivariantComplex::new(CochainComplex::new(field, generators, d), sigma);
    cone.ensure_valid()?;
    Ok(cone)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fp_core::PrimeField;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn trivial(p: u64, n: usize) -> EquivariantComplex {
        EquivariantComplex::module(FpMatrix::identity(f(p), n))
    }

    #[test]
    fn trivial_and_free_modules() {
        for p in [2, 3, 5, 7] {
            assert_eq!(tate_cohomology_dims(&trivial(p, 1)).unwrap(), TateDims { even: 1, odd: 1 });
            let free = EquivariantComplex::regular(f(p));
            assert_eq!(tate_cohomology_dims(&free).unwrap(), TateDims::default());
            assert!(TateComplexView::new(&free).unwrap().squares_to_zero());
        }
    }

    #[test]
    fn jordan_block_of_size_two() {
        // F_3[t]/(t^2): sigma = 1 + t
        let fld = f(3);
        let sigma = FpMatrix::from_rows(fld, &[[1, 0], [1, 1]]);
        let v = EquivariantComplex::module(sigma);
        assert_eq!(tate_cohomology_dims(&v).unwrap(), TateDims { even: 1, odd: 1 });
    }

    #[test]
    fn group_cohomology_examples() {
        let dims = group_cohomology_dims(&trivial(3, 1), 5).unwrap();
        assert_eq!(dims, (0..=5).map(|k| (k, 1)).collect::<Vec<_>>());
        let free = EquivariantComplex::regular(f(3));
        let dims: Vec<usize> = group_cohomology_dims(&free, 5).unwrap().into_iter().map(|x| x.1).collect();
        assert_eq!(dims, vec![1, 0, 0, 0, 0, 0]);
        let zero = EquivariantComplex::trivial(CochainComplex::zero(f(5)));
        assert!(group_cohomology_dims(&zero, 4).unwrap().iter().all(|x| x.1 == 0));
    }

    #[test]
    fn cone_examples() {
        let fld = f(3);
        let v = EquivariantComplex::regular(fld);
        let id = FpMatrix::identity(fld, 3);
        let cone = mapping_cone(&id, &v, &v).unwrap();
        assert_eq!(tate_cohomology_dims(&cone).unwrap(), TateDims::default());
        assert_eq!(cone.complex().total_homology_dim(), 0);

        // diagonal F_3 -> F_3[Z/3Z]
        let triv = trivial(3, 1);
        let incl = FpMatrix::from_rows(fld, &[[1], [1], [1]]);
        let cone = mapping_cone(&incl, &triv, &v).unwrap();
        assert_eq!(cone.dim(), 4);
        assert_eq!(tate_cohomology_dims(&cone).unwrap(), TateDims { even: 1, odd: 1 });

        let zero = FpMatrix::zeros(fld, 3, 1);
        let cone = mapping_cone(&zero, &triv, &v).unwrap();
        assert_eq!(tate_cohomology_dims(&cone).unwrap(), TateDims { even: 1, odd: 1 });
    }

    #[test]
    fn cone_rejects_bad_maps() {
        let fld = f(3);
        let v = EquivariantComplex::regular(fld);
        let triv = trivial(3, 1);
        let not_equiv = FpMatrix::from_rows(fld, &[[1], [0], [0]]);
        assert!(matches!(mapping_cone(&not_equiv, &triv, &v), Err(Error::NotEquivariant)));
    }
}
