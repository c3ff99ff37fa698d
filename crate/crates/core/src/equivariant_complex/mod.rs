//! Z-graded cochain complexes over F_p, filtered by a rational action value
//! on generators and optionally carrying an automorphism `sigma` of order p.
//!
//! Conventions used throughout the crate:
//! * the differential has degree +1 and strictly lowers action;
//! * matrices act on column vectors, column `j` being the image of generator `j`;
//! * `sigma` preserves both degree and action.

mod json;
mod tensor;
mod window;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fp_core::{FpMatrix, PrimeField, Subspace};
use crate::rational::{format_rational, Rational};

pub use json::{ComplexJson, EntryJson, GeneratorJson};
pub(crate) use json::triplets;
pub use tensor::{tensor_power, TensorIndexer};
pub use window::{window_truncate, ActionWindow};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Generator {
    pub id: String,
    pub degree: i64,
    pub action: Rational,
}

impl Generator {
    pub fn new(id: impl Into<String>, degree: i64, action: Rational) -> Self {
        Generator {
            id: id.into(),
            degree,
            action,
        }
    }
}

/// A finite-dimensional cochain complex with a distinguished basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CochainComplex {
    field: PrimeField,
    generators: Vec<Generator>,
    d: FpMatrix,
}

/// A cochain complex together with a chain automorphism `sigma` of order p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivariantComplex {
    complex: CochainComplex,
    sigma: FpMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    DuplicateId { id: String },
    Shape { matrix: &'static str, rows: usize, cols: usize, expected: usize },
    ModulusMismatch { matrix: &'static str },
    DifferentialDegree { from: String, to: String },
    DSquaredNonzero { from: String, to: String },
    ActionNotDecreased { from: String, to: String },
    SigmaOrder,
    SigmaNotChainMap { from: String, to: String },
    SigmaChangesDegree { from: String, to: String },
    SigmaChangesAction { from: String, to: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            DuplicateId { id } => write!(f, "duplicate generator id {id:?}"),
            Shape { matrix, rows, cols, expected } => {
                write!(f, "{matrix} is {rows}x{cols}, expected {expected}x{expected}")
            }
            ModulusMismatch { matrix } => write!(f, "{matrix} has a different modulus"),
            DifferentialDegree { from, to } => {
                write!(f, "d({from}) has a component on {to} of the wrong degree")
            }
            DSquaredNonzero { from, to } => write!(f, "d∘d({from}) has a component on {to}"),
            ActionNotDecreased { from, to } => {
                write!(f, "action not strictly decreased: d({from}) hits {to}")
            }
            SigmaOrder => write!(f, "sigma^p is not the identity"),
            SigmaNotChainMap { from, to } => {
                write!(f, "sigma∘d - d∘sigma is nonzero at ({to}, {from})")
            }
            SigmaChangesDegree { from, to } => {
                write!(f, "sigma({from}) has a component on {to} of another degree")
            }
            SigmaChangesAction { from, to } => {
                write!(f, "sigma({from}) has a component on {to} of another action")
            }
        }
    }
}

/// All invariant violations found by `validate`; empty iff the input is valid.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidComplex(self))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl CochainComplex {
    /// Assembles a complex without checking the cochain axioms; call
    /// [`CochainComplex::validate`] for that.
    pub fn new(field: PrimeField, generators: Vec<Generator>, d: FpMatrix) -> Self {
        CochainComplex {
            field,
            generators,
            d,
        }
    }

    pub fn zero(field: PrimeField) -> Self {
        CochainComplex::new(field, Vec::new(), FpMatrix::zeros(field, 0, 0))
    }

    /// Generators with zero differential.
    pub fn discrete(field: PrimeField, generators: Vec<Generator>) -> Self {
        let n = generators.len();
        CochainComplex::new(field, generators, FpMatrix::zeros(field, n, n))
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn p(&self) -> u32 {
        self.field.p()
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn d(&self) -> &FpMatrix {
        &self.d
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.generators.iter().map(|g| g.degree).collect()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.id == id)
    }

    /// Smallest and largest degree present, if any.
    pub fn degree_range(&self) -> Option<(i64, i64)> {
        let min = self.generators.iter().map(|g| g.degree).min()?;
        let max = self.generators.iter().map(|g| g.degree).max()?;
        Some((min, max))
    }

    /// Indices of degree-`k` generators, ordered by id.
    pub fn indices_in_degree(&self, k: i64) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.dim())
            .filter(|&i| self.generators[i].degree == k)
            .collect();
        idx.sort_by(|&a, &b| self.generators[a].id.cmp(&self.generators[b].id));
        idx
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        self.check_into(&mut violations);
        ValidationReport { violations }
    }

    fn check_into(&self, out: &mut Vec<Violation>) {
        let n = self.dim();
        let mut seen = std::collections::HashSet::new();
        for g in &self.generators {
            if !seen.insert(g.id.as_str()) {
                out.push(Violation::DuplicateId { id: g.id.clone() });
            }
        }
        if self.d.field() != self.field {
            out.push(Violation::ModulusMismatch { matrix: "d" });
            return;
        }
        if self.d.rows() != n || self.d.cols() != n {
            out.push(Violation::Shape {
                matrix: "d",
                rows: self.d.rows(),
                cols: self.d.cols(),
                expected: n,
            });
            return;
        }
        let name = |i: usize| self.generators[i].id.clone();
        for (i, j, _) in self.d.entries() {
            let (src, dst) = (&self.generators[j], &self.generators[i]);
            if dst.degree != src.degree + 1 {
                out.push(Violation::DifferentialDegree { from: name(j), to: name(i) });
            }
            if dst.action >= src.action {
                out.push(Violation::ActionNotDecreased { from: name(j), to: name(i) });
            }
        }
        for (i, j, _) in self.d.mul(&self.d).entries() {
            out.push(Violation::DSquaredNonzero { from: name(j), to: name(i) });
        }
    }

    /// `d` restricted to degree `k`, as a map from `C^k` to `C^{k+1}` in the
    /// id-ordered bases of [`CochainComplex::indices_in_degree`].
    pub fn d_block(&self, k: i64) -> FpMatrix {
        self.d
            .select(&self.indices_in_degree(k + 1), &self.indices_in_degree(k))
    }

    /// Homology dimension in every degree that carries generators.
    pub fn homology_dims(&self) -> BTreeMap<i64, usize> {
        let Some((lo, hi)) = self.degree_range() else {
            return BTreeMap::new();
        };
        (lo..=hi)
            .filter_map(|k| {
                let n = self.indices_in_degree(k).len();
                (n > 0).then(|| (k, n - self.d_block(k).rank() - self.d_block(k - 1).rank()))
            })
            .collect()
    }

    /// Total homology dimension, `dim - 2 rank d`.
    pub fn total_homology_dim(&self) -> usize {
        self.dim() - 2 * self.d.rank()
    }

    /// Homogeneous cocycle representatives of a homology basis, chosen
    /// degree by degree from the id-ordered generator basis.
    pub fn homology_basis(&self) -> HomologyBasis {
        let n = self.dim();
        let f = self.field;
        let mut reps = Vec::new();
        let mut degrees = Vec::new();
        let mut boundaries = Vec::new();
        if let Some((lo, hi)) = self.degree_range() {
            for k in lo..=hi {
                let here = self.indices_in_degree(k);
                if here.is_empty() {
                    continue;
                }
                let embed = |local: &[u32]| {
                    let mut v = vec![0u32; n];
                    for (&g, &x) in here.iter().zip(local) {
                        v[g] = x;
                    }
                    v
                };
                let image = self.d_block(k - 1).rref().image_basis;
                let mut span = Subspace::spanned_by(f, here.len(), &image);
                for b in &image {
                    boundaries.push(embed(b));
                }
                for z in self.d_block(k).kernel() {
                    if span.insert(&z) {
                        reps.push(embed(&z));
                        degrees.push(k);
                    }
                }
            }
        }
        HomologyBasis::new(f, n, reps, degrees, boundaries)
    }
}

/// A basis of cohomology given by cocycle representatives, with the means to
/// express any cocycle in it.
#[derive(Clone, Debug)]
pub struct HomologyBasis {
    reps: Vec<Vec<u32>>,
    degrees: Vec<i64>,
    // columns: reps followed by a basis of the coboundaries
    solver: FpMatrix,
}

impl HomologyBasis {
    fn new(
        field: PrimeField,
        ambient: usize,
        reps: Vec<Vec<u32>>,
        degrees: Vec<i64>,
        boundaries: Vec<Vec<u32>>,
    ) -> Self {
        let cols: Vec<Vec<u32>> = reps.iter().chain(&boundaries).cloned().collect();
        HomologyBasis {
            solver: FpMatrix::from_columns(field, ambient, &cols),
            reps,
            degrees,
        }
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn reps(&self) -> &[Vec<u32>] {
        &self.reps
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    /// Coordinates of the class of the cocycle `z`; `None` if `z` is not in
    /// the span of cocycles (which for a genuine cocycle cannot happen).
    pub fn coords(&self, z: &[u32]) -> Option<Vec<u32>> {
        let x = self.solver.solve(z)?;
        Some(x[..self.reps.len()].to_vec())
    }

    /// Matrix of the map induced on cohomology by a chain map `f` from the
    /// complex of `self` to the complex of `target`.
    pub fn induced_map(&self, f: &FpMatrix, target: &HomologyBasis) -> Option<FpMatrix> {
        let cols = self
            .reps
            .iter()
            .map(|z| target.coords(&f.apply(z)))
            .collect::<Option<Vec<_>>>()?;
        Some(FpMatrix::from_columns(f.field(), target.len(), &cols))
    }
}

impl EquivariantComplex {
    pub fn new(complex: CochainComplex, sigma: FpMatrix) -> Self {
        EquivariantComplex { complex, sigma }
    }

    /// The complex with the trivial action.
    pub fn trivial(complex: CochainComplex) -> Self {
        let sigma = FpMatrix::identity(complex.field(), complex.dim());
        EquivariantComplex { complex, sigma }
    }

    /// A F_p[Z/pZ]-module concentrated in degree 0 with zero differential.
    pub fn module(sigma: FpMatrix) -> Self {
        let field = sigma.field();
        let gens = (0..sigma.cols())
            .map(|i| Generator::new(format!("e{i}"), 0, Rational::from_integer(0)))
            .collect();
        EquivariantComplex::new(CochainComplex::discrete(field, gens), sigma)
    }

    /// The regular representation F_p[Z/pZ] in degree 0, generators `g0..g{p-1}`.
    pub fn regular(field: PrimeField) -> Self {
        let p = field.p() as usize;
        let perm: Vec<usize> = (0..p).map(|i| (i + 1) % p).collect();
        let gens = (0..p)
            .map(|i| Generator::new(format!("g{i}"), 0, Rational::from_integer(0)))
            .collect();
        EquivariantComplex::new(
            CochainComplex::discrete(field, gens),
            FpMatrix::permutation(field, &perm),
        )
    }

    pub fn complex(&self) -> &CochainComplex {
        &self.complex
    }

    pub fn field(&self) -> PrimeField {
        self.complex.field
    }

    pub fn p(&self) -> u32 {
        self.complex.p()
    }

    pub fn dim(&self) -> usize {
        self.complex.dim()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.complex.generators
    }

    pub fn d(&self) -> &FpMatrix {
        &self.complex.d
    }

    pub fn sigma(&self) -> &FpMatrix {
        &self.sigma
    }

    /// `1 - sigma`
    pub fn one_minus_sigma(&self) -> FpMatrix {
        FpMatrix::identity(self.field(), self.dim()).sub(&self.sigma)
    }

    /// The norm `1 + sigma + ... + sigma^{p-1}`.
    pub fn norm(&self) -> FpMatrix {
        norm_of(&self.sigma)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        self.complex.check_into(&mut violations);
        let n = self.dim();
        let s = &self.sigma;
        if s.field() != self.field() {
            violations.push(Violation::ModulusMismatch { matrix: "sigma" });
            return ValidationReport { violations };
        }
        if s.rows() != n || s.cols() != n {
            violations.push(Violation::Shape {
                matrix: "sigma",
                rows: s.rows(),
                cols: s.cols(),
                expected: n,
            });
            return ValidationReport { violations };
        }
        let gens = &self.complex.generators;
        let name = |i: usize| gens[i].id.clone();
        for (i, j, _) in s.entries() {
            if gens[i].degree != gens[j].degree {
                violations.push(Violation::SigmaChangesDegree { from: name(j), to: name(i) });
            }
            if gens[i].action != gens[j].action {
                violations.push(Violation::SigmaChangesAction { from: name(j), to: name(i) });
            }
        }
        if !s.pow(self.p() as u64).is_identity() {
            violations.push(Violation::SigmaOrder);
        }
        if self.complex.d.rows() == n && self.complex.d.cols() == n {
            let comm = s.mul(&self.complex.d).sub(&self.complex.d.mul(s));
            for (i, j, _) in comm.entries() {
                violations.push(Violation::SigmaNotChainMap { from: name(j), to: name(i) });
            }
        }
        ValidationReport { violations }
    }

    pub fn ensure_valid(&self) -> Result<()> {
        self.validate().into_result()
    }
}

pub(crate) fn norm_of(sigma: &FpMatrix) -> FpMatrix {
    let f = sigma.field();
    let n = sigma.rows();
    let mut acc = FpMatrix::zeros(f, n, n);
    let mut power = FpMatrix::identity(f, n);
    for _ in 0..f.p() {
        acc = acc.add(&power);
        power = power.mul(sigma);
    }
    acc
}

/// Per-degree dimensions of `V^G = ker(1 - sigma)` and `V_G = coker(1 - sigma)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantDims {
    pub invariants: BTreeMap<i64, usize>,
    pub coinvariants: BTreeMap<i64, usize>,
}

impl InvariantDims {
    pub fn total_invariants(&self) -> usize {
        self.invariants.values().sum()
    }

    pub fn total_coinvariants(&self) -> usize {
        self.coinvariants.values().sum()
    }
}

pub fn invariants_coinvariants(c: &EquivariantComplex) -> Result<InvariantDims> {
    c.ensure_valid()?;
    let t = c.one_minus_sigma();
    let mut invariants = BTreeMap::new();
    let mut coinvariants = BTreeMap::new();
    if let Some((lo, hi)) = c.complex.degree_range() {
        for k in lo..=hi {
            let idx = c.complex.indices_in_degree(k);
            if idx.is_empty() {
                continue;
            }
            let r = t.select(&idx, &idx).rank();
            invariants.insert(k, idx.len() - r);
            coinvariants.insert(k, idx.len() - r);
        }
    }
    Ok(InvariantDims {
        invariants,
        coinvariants,
    })
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (deg {}, action {})",
            self.id,
            self.degree,
            format_rational(&self.action)
        )
    }
}

impl CochainComplex {
    /// `self ⊕ other`; generator ids are kept, so they should be disjoint.
    pub fn direct_sum(&self, other: &CochainComplex) -> CochainComplex {
        let generators = self.generators.iter().chain(&other.generators).cloned().collect();
        CochainComplex::new(self.field, generators, self.d.direct_sum(&other.d))
    }
}

impl EquivariantComplex {
    pub fn direct_sum(&self, other: &EquivariantComplex) -> EquivariantComplex {
        EquivariantComplex::new(
            self.complex.direct_sum(&other.complex),
            self.sigma.direct_sum(&other.sigma),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn point_complex_is_valid() {
        for p in [2, 3, 5] {
            let c = EquivariantComplex::trivial(CochainComplex::discrete(
                f(p),
                vec![Generator::new("x", 0, r(0))],
            ));
            assert!(c.validate().is_valid());
        }
    }

    #[test]
    fn equal_action_differential_is_flagged() {
        let fld = f(3);
        let gens = vec![Generator::new("a", 0, r(1)), Generator::new("b", 1, r(1))];
        let mut d = FpMatrix::zeros(fld, 2, 2);
        d.set(1, 0, 1);
        let c = CochainComplex::new(fld, gens, d);
        let report = c.validate();
        assert_eq!(
            report.violations,
            vec![Violation::ActionNotDecreased { from: "a".into(), to: "b".into() }]
        );
    }

    #[test]
    fn free_orbit_is_valid() {
        let c = EquivariantComplex::regular(f(3));
        assert!(c.validate().is_valid());
    }

    #[test]
    fn sigma_order_and_commutation_checked() {
        let fld = f(3);
        let gens = vec![Generator::new("a", 0, r(0)), Generator::new("b", 0, r(0))];
        let sigma = FpMatrix::from_rows(fld, &[[0, 1], [1, 0]]);
        let c = EquivariantComplex::new(CochainComplex::discrete(fld, gens), sigma);
        // a transposition has order 2, not 3
        assert!(c.validate().violations.contains(&Violation::SigmaOrder));
    }

    #[test]
    fn invariants_of_examples() {
        let fld = f(3);
        let triv = EquivariantComplex::module(FpMatrix::identity(fld, 4));
        let dims = invariants_coinvariants(&triv).unwrap();
        assert_eq!((dims.total_invariants(), dims.total_coinvariants()), (4, 4));

        let free = EquivariantComplex::regular(fld);
        let dims = invariants_coinvariants(&free).unwrap();
        assert_eq!((dims.total_invariants(), dims.total_coinvariants()), (1, 1));

        let reg5 = EquivariantComplex::regular(f(5));
        let dims = invariants_coinvariants(&reg5).unwrap();
        assert_eq!((dims.total_invariants(), dims.total_coinvariants()), (1, 1));
    }

    #[test]
    fn homology_basis_of_acyclic_pair() {
        let fld = f(5);
        let gens = vec![Generator::new("x", 0, r(1)), Generator::new("y", 1, r(0))];
        let mut d = FpMatrix::zeros(fld, 2, 2);
        d.set(1, 0, 1);
        let c = CochainComplex::new(fld, gens, d);
        assert!(c.validate().is_valid());
        assert_eq!(c.total_homology_dim(), 0);
        assert!(c.homology_basis().is_empty());
        assert!(c.homology_dims().values().all(|&h| h == 0));
    }
}
