//! Equivariant models `V<1, θ>[[u]]` with differential
//! `Σ_i u^{⌊i/2⌋} d^i_α`, where `d^i_α` sends the `θ^α` component to the
//! `θ^{i mod 2}` component and shifts the degree in `V` by `1 - i + α`.
//! The algebraic filtration is by `u, θ`-degree; `d^0_0` and `d^1_1` preserve
//! it and every other term raises it by `i - α`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::super::tate::{tate_dims_of, TateDims};
use crate::equivariant_complex::{
    norm_of, CochainComplex, ComplexJson, EntryJson, EquivariantComplex, Generator, HomologyBasis,
};
use crate::error::{Error, Result};
use crate::fp_core::{FpMatrix, RatFun, RatMatrix};
use crate::rational::Rational;

#[derive(Clone, Debug)]
pub struct EquivariantFloerModel {
    base: CochainComplex,
    sigma: Option<FpMatrix>,
    terms: BTreeMap<(usize, u8), FpMatrix>,
    i_max: usize,
}

impl EquivariantFloerModel {
    /// `terms` holds `d^i_α` for `(i, α) ≠ (0, 0)`; `d^0_0` is the
    /// differential of `base`. `sigma`, when given, is the action the model
    /// is supposed to come from and is used only for comparison.
    pub fn new(
        base: CochainComplex,
        sigma: Option<FpMatrix>,
        terms: BTreeMap<(usize, u8), FpMatrix>,
        i_max: usize,
    ) -> Result<Self> {
        let n = base.dim();
        for (&(i, a), m) in &terms {
            let what = format!("d_terms[i={i}, alpha={a}]");
            if a > 1 || (i, a) == (0, 0) || i < a as usize {
                return Err(Error::malformed(what, "term index out of range"));
            }
            if i > i_max {
                return Err(Error::malformed(what, format!("i exceeds i_max = {i_max}")));
            }
            if m.rows() != n || m.cols() != n || m.field() != base.field() {
                return Err(Error::DimensionMismatch(format!("{what} is {}x{}", m.rows(), m.cols())));
            }
        }
        if let Some(s) = &sigma {
            if s.rows() != n || s.cols() != n {
                return Err(Error::DimensionMismatch("sigma".into()));
            }
        }
        let model = EquivariantFloerModel {
            base,
            sigma,
            terms,
            i_max,
        };
        model.validate()?;
        Ok(model)
    }

    /// The model of a genuine action: `d^1_0 = 1 - σ`, `d^1_1 = -d`,
    /// `d^2_1 = N`, all other terms zero.
    pub fn from_equivariant(c: &EquivariantComplex) -> Result<Self> {
        c.ensure_valid()?;
        let mut terms = BTreeMap::new();
        terms.insert((1, 0), c.one_minus_sigma());
        terms.insert((1, 1), c.d().neg());
        terms.insert((2, 1), c.norm());
        Self::new(c.complex().clone(), Some(c.sigma().clone()), terms, 2)
    }

    pub fn base(&self) -> &CochainComplex {
        &self.base
    }

    pub fn sigma(&self) -> Option<&FpMatrix> {
        self.sigma.as_ref()
    }

    pub fn i_max(&self) -> usize {
        self.i_max
    }

    pub fn terms(&self) -> &BTreeMap<(usize, u8), FpMatrix> {
        &self.terms
    }

    /// `d^i_α`, zero when absent.
    pub fn term(&self, i: usize, alpha: u8) -> FpMatrix {
        if (i, alpha) == (0, 0) {
            return self.base.d().clone();
        }
        self.terms
            .get(&(i, alpha))
            .cloned()
            .unwrap_or_else(|| FpMatrix::zeros(self.base.field(), self.base.dim(), self.base.dim()))
    }

    /// Degrees, action monotonicity and `d̂² = 0`.
    ///
    /// `d^0_0` must lower action strictly; the higher terms may preserve it,
    /// since `d^1_0` restricts to `1 - σ` and `σ` preserves action.
    pub fn validate(&self) -> Result<()> {
        self.base.validate().into_result()?;
        let gens = self.base.generators();
        for (&(i, a), m) in &self.terms {
            let shift = 1 - i as i64 + a as i64;
            for (r, c, _) in m.entries() {
                if gens[r].degree != gens[c].degree + shift {
                    return Err(Error::malformed(
                        format!("d_terms[i={i}, alpha={a}]"),
                        format!(
                            "entry ({}, {}) does not shift degree by {shift}",
                            gens[r].id, gens[c].id
                        ),
                    ));
                }
                if gens[r].action > gens[c].action {
                    return Err(Error::FiltrationViolation(format!(
                        "d^{i}_{a}({}) hits {} of higher action",
                        gens[c].id, gens[r].id
                    )));
                }
            }
        }
        let d = self.assembled();
        if !d.mul(&d).is_zero() {
            return Err(Error::NotSquareZero);
        }
        Ok(())
    }

    /// The total differential over F_p(u) on the basis `x⊗1` then `x⊗θ`.
    pub fn assembled(&self) -> RatMatrix {
        let field = self.base.field();
        let n = self.base.dim();
        let mut m = RatMatrix::zeros(field, 2 * n, 2 * n);
        m.add_block(0, 0, self.base.d(), &RatFun::one(field));
        for (&(i, a), t) in &self.terms {
            let coeff = RatFun::laurent_monomial(field, 1, (i / 2) as i64);
            m.add_block((i % 2) * n, a as usize * n, t, &coeff);
        }
        m
    }

    fn parity_classes(&self) -> (Vec<usize>, Vec<usize>) {
        let n = self.base.dim();
        let gens = self.base.generators();
        (0..2 * n).partition(|&i| (gens[i % n].degree + (i >= n) as i64).rem_euclid(2) == 0)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct E1Description {
    /// `dim H(V, d^0_0)` and `dim H(V, d^1_1)`.
    pub h0: usize,
    pub h1: usize,
    /// `[d^1_0]: H(V, d^0_0) → H(V, d^1_1)` in the chosen homology bases.
    pub d10: Vec<Vec<u32>>,
    /// `[d^2_1]: H(V, d^1_1) → H(V, d^0_0)`.
    pub d21: Vec<Vec<u32>>,
    /// Whether `[d^1_0] = 1 - σ_*` and `[d^2_1] = N_*`, when `σ` is known.
    pub matches_sigma: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AlgebraicSsReport {
    pub e1: E1Description,
    /// `E_2` of the Tate version, from the `E_1` complex over F_p(u).
    pub e2_tate: TateDims,
    /// `E_2` by algebraic degree `k = 0..=4`, i.e. `H^k(Z/pZ; H(V))` with the
    /// action encoded by `[d^1_0]` and `[d^2_1]`.
    pub e2_by_algebraic_degree: Vec<(usize, usize)>,
    /// Tate cohomology of the full model.
    pub e_infinity: TateDims,
    /// `Ĥ(Z/pZ; H(V))` computed from `σ_*`, when `σ` is known.
    pub sigma_tate: Option<TateDims>,
    /// `dim Ê_∞ ≤ dim Ê_2` (and `≤ dim Ĥ(Z/pZ; H(V))` when known).
    pub tate_bound_holds: bool,
    pub degenerates_at_e2: bool,
}

fn matrix_rows(m: &FpMatrix) -> Vec<Vec<u32>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

fn same_class(hb: &HomologyBasis, a: &[u32], b: &[u32]) -> bool {
    matches!((hb.coords(a), hb.coords(b)), (Some(x), Some(y)) if x == y)
}

pub fn algebraic_ss_pages(m: &EquivariantFloerModel) -> Result<AlgebraicSsReport> {
    m.validate()?;
    let field = m.base.field();
    let gens = m.base.generators().to_vec();
    let hb0 = m.base.homology_basis();
    let c1 = CochainComplex::new(field, gens.clone(), m.term(1, 1));
    let hb1 = c1.homology_basis();
    let d10 = m.term(1, 0);
    let d21 = m.term(2, 1);
    let a = hb0
        .induced_map(&d10, &hb1)
        .ok_or_else(|| Error::NotChainMap("d^1_0 does not induce a map on E_1".into()))?;
    let b = hb1
        .induced_map(&d21, &hb0)
        .ok_or_else(|| Error::NotChainMap("d^2_1 does not induce a map on E_1".into()))?;

    let matches_sigma = m.sigma.as_ref().map(|s| {
        let t = FpMatrix::identity(field, s.rows()).sub(s);
        let nm = norm_of(s);
        hb0.reps().iter().all(|z| same_class(&hb1, &d10.apply(z), &t.apply(z)))
            && hb1.reps().iter().all(|z| same_class(&hb0, &d21.apply(z), &nm.apply(z)))
    });

    // E_1 Tate complex on H0 ⊗ 1 ⊕ H1 ⊗ θ
    let (h0, h1) = (hb0.len(), hb1.len());
    let mut e1 = RatMatrix::zeros(field, h0 + h1, h0 + h1);
    e1.add_block(h0, 0, &a, &RatFun::one(field));
    e1.add_block(0, h0, &b, &RatFun::laurent_monomial(field, 1, 1));
    let parity: Vec<i64> = hb0
        .degrees()
        .iter()
        .copied()
        .chain(hb1.degrees().iter().map(|d| d + 1))
        .collect();
    let classes: (Vec<usize>, Vec<usize>) =
        (0..h0 + h1).partition(|&i| parity[i].rem_euclid(2) == 0);
    let e2_tate = tate_dims_of(&e1, &classes);

    let (ra, rb) = (a.rank(), b.rank());
    let e2_by_algebraic_degree = (0..=4usize)
        .map(|k| {
            let dim = match k {
                0 => h0 - ra,
                _ if k % 2 == 1 => (h1 - rb) - ra,
                _ => (h0 - ra) - rb,
            };
            (k, dim)
        })
        .collect();

    let e_infinity = tate_dims_of(&m.assembled(), &m.parity_classes());

    let sigma_tate = match &m.sigma {
        Some(s) => {
            let star = hb0
                .induced_map(s, &hb0)
                .ok_or_else(|| Error::NotChainMap("sigma is not a chain map".into()))?;
            let hgens: Vec<Generator> = hb0
                .degrees()
                .iter()
                .enumerate()
                .map(|(i, &d)| Generator::new(format!("h{i}"), d, Rational::from_integer(0)))
                .collect();
            let module = EquivariantComplex::new(CochainComplex::discrete(field, hgens), star);
            Some(super::super::tate::tate_cohomology_dims(&module)?)
        }
        None => None,
    };

    let tate_bound_holds = e_infinity.total() <= e2_tate.total()
        && sigma_tate.is_none_or(|t| e_infinity.total() <= t.total());
    Ok(AlgebraicSsReport {
        e1: E1Description {
            h0,
            h1,
            d10: matrix_rows(&a),
            d21: matrix_rows(&b),
            matches_sigma,
        },
        e2_tate,
        e2_by_algebraic_degree,
        e_infinity,
        sigma_tate,
        tate_bound_holds,
        degenerates_at_e2: e_infinity == e2_tate,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub i: usize,
    pub alpha: u8,
    pub matrix: Vec<EntryJson>,
}

/// The complex format plus optional `"d_terms"` and `"i_max"`. Without
/// `d_terms` the model is built from `sigma`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelJson {
    #[serde(flatten)]
    pub complex: ComplexJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_terms: Option<Vec<TermJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub i_max: Option<usize>,
}

impl ModelJson {
    pub fn to_model(&self) -> Result<EquivariantFloerModel> {
        let eq = self.complex.to_equivariant()?;
        let Some(terms_json) = &self.d_terms else {
            return EquivariantFloerModel::from_equivariant(&eq);
        };
        let mut terms: BTreeMap<(usize, u8), FpMatrix> = BTreeMap::new();
        for (k, t) in terms_json.iter().enumerate() {
            let m = self.complex.matrix(&format!("d_terms[{k}].matrix"), &t.matrix)?;
            match terms.get_mut(&(t.i, t.alpha)) {
                Some(cur) => *cur = cur.add(&m),
                None => {
                    terms.insert((t.i, t.alpha), m);
                }
            }
        }
        let i_max = self
            .i_max
            .unwrap_or_else(|| terms.keys().map(|k| k.0).max().unwrap_or(0));
        let sigma = self.complex.sigma.as_ref().map(|_| eq.sigma().clone());
        EquivariantFloerModel::new(eq.complex().clone(), sigma, terms, i_max)
    }

    pub fn from_model(m: &EquivariantFloerModel) -> Self {
        let mut complex = ComplexJson::from_complex(m.base());
        let gens = m.base().generators();
        if let Some(s) = m.sigma() {
            complex.sigma = Some(crate::equivariant_complex::triplets(s, gens));
        }
        ModelJson {
            complex,
            d_terms: Some(
                m.terms()
                    .iter()
                    .map(|(&(i, alpha), t)| TermJson {
                        i,
                        alpha,
                        matrix: crate::equivariant_complex::triplets(t, gens),
                    })
                    .collect(),
            ),
            i_max: Some(m.i_max()),
        }
    }
}
