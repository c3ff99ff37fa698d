//! Spectral sequences of filtered complexes: the action filtration of a
//! Floer-type complex and the algebraic (u, θ)-filtration of an equivariant
//! model.

mod algebraic;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::equivariant_complex::CochainComplex;
use crate::error::{Error, Result};
use crate::fp_core::{FpMatrix, Subspace};
use crate::rational::{format_rational, Rational};

pub use algebraic::{
    algebraic_ss_pages, AlgebraicSsReport, E1Description, EquivariantFloerModel, ModelJson, TermJson,
};

/// A complex with a decreasing filtration `F^0 ⊃ F^1 ⊃ ..`, given by the
/// level of each generator: `F^s` is spanned by the generators of level `≥ s`.
///
/// A strict filtration requires `d(F^s) ⊂ F^{s+1}`, a weak one only
/// `d(F^s) ⊂ F^s`.
#[derive(Clone, Debug)]
pub struct FilteredComplex {
    complex: CochainComplex,
    levels: Vec<usize>,
    level_count: usize,
    strict: bool,
}

impl FilteredComplex {
    pub fn new(complex: CochainComplex, levels: Vec<usize>, strict: bool) -> Result<Self> {
        if levels.len() != complex.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} levels for {} generators",
                levels.len(),
                complex.dim()
            )));
        }
        let gens = complex.generators();
        for (i, j, _) in complex.d().entries() {
            let ok = if strict { levels[i] > levels[j] } else { levels[i] >= levels[j] };
            if !ok {
                return Err(Error::FiltrationViolation(format!(
                    "d({}) at level {} hits {} at level {}",
                    gens[j].id, levels[j], gens[i].id, levels[i]
                )));
            }
        }
        let report = complex.validate();
        let structural: Vec<_> = report
            .violations
            .into_iter()
            .filter(|v| !matches!(v, crate::equivariant_complex::Violation::ActionNotDecreased { .. }))
            .collect();
        if !structural.is_empty() {
            return Err(Error::InvalidComplex(crate::equivariant_complex::ValidationReport {
                violations: structural,
            }));
        }
        let level_count = levels.iter().max().map_or(0, |m| m + 1);
        Ok(FilteredComplex {
            complex,
            levels,
            level_count,
            strict,
        })
    }

    /// Levels from the distinct action values sorted in decreasing order, so
    /// level 0 carries the highest action and `d` raises the level.
    pub fn from_action(complex: CochainComplex) -> Result<Self> {
        let values = action_values(&complex);
        let levels = complex
            .generators()
            .iter()
            .map(|g| values.iter().position(|v| *v == g.action).unwrap())
            .collect();
        Self::new(complex, levels, true)
    }

    pub fn complex(&self) -> &CochainComplex {
        &self.complex
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn level_count(&self) -> usize {
        self.level_count
    }

    pub fn is_strict(&self) -> bool {
        self.strict
    }

    /// Degree-`k` generator indices (id order) and their levels.
    fn slice(&self, k: i64) -> (Vec<usize>, Vec<usize>) {
        let idx = self.complex.indices_in_degree(k);
        let lv = idx.iter().map(|&i| self.levels[i]).collect();
        (idx, lv)
    }
}

/// Distinct action values in decreasing order.
pub fn action_values(c: &CochainComplex) -> Vec<Rational> {
    let mut values: Vec<Rational> = c.generators().iter().map(|g| g.action).collect();
    values.sort_unstable_by(|a, b| b.cmp(a));
    values.dedup();
    values
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PageEntry {
    pub s: usize,
    pub degree: i64,
    pub dim: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Page {
    pub r: usize,
    /// Nonzero `E_r^{s}` in each degree.
    pub entries: Vec<PageEntry>,
    pub total: usize,
    /// Rank of `d_r` on the whole page.
    pub differential_rank: usize,
}

impl Page {
    pub fn dim(&self, s: usize, degree: i64) -> usize {
        self.entries
            .iter()
            .find(|e| e.s == s && e.degree == degree)
            .map_or(0, |e| e.dim)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralSequencePages {
    pub levels: usize,
    /// Action value of each level, for action filtrations.
    pub level_values: Vec<String>,
    pub pages: Vec<Page>,
    /// `gr^s H`, computed from the images of `H(F^s)` in `H`.
    pub e_infinity: Vec<PageEntry>,
    pub e_infinity_total: usize,
    /// Homology of the total complex.
    pub homology_total: usize,
    /// Homology of each level subquotient `F^s / F^{s+1}`.
    pub local_cohomology: Vec<PageEntry>,
}

impl SpectralSequencePages {
    /// `dim E_{r+1}^s ≤ dim E_r^s` everywhere.
    pub fn dims_monotone(&self) -> bool {
        self.pages.windows(2).all(|w| {
            w[1].entries
                .iter()
                .all(|e| e.dim <= w[0].dim(e.s, e.degree))
        })
    }

    /// The last page equals `E_∞` and `E_∞` has the size of the homology.
    pub fn converges(&self) -> bool {
        let last = self.pages.last().map_or(&[][..], |p| &p.entries[..]);
        last == self.e_infinity && self.e_infinity_total == self.homology_total
    }

    /// `E_1` is the sum of the level-subquotient homologies.
    pub fn e1_is_local(&self) -> bool {
        self.pages.get(1).is_none_or(|p| p.entries == self.local_cohomology)
    }

    pub fn all_checks_hold(&self) -> bool {
        self.dims_monotone() && self.converges() && self.e1_is_local()
    }
}

/// Subspaces of one degree of the complex, in local coordinates.
struct DegreeSlice<'a> {
    fc: &'a FilteredComplex,
    k: i64,
    levels: Vec<usize>,
    next_levels: Vec<usize>,
    d_out: FpMatrix,
    d_in: FpMatrix,
    prev_levels: Vec<usize>,
}

impl<'a> DegreeSlice<'a> {
    fn new(fc: &'a FilteredComplex, k: i64) -> Self {
        let c = &fc.complex;
        DegreeSlice {
            fc,
            k,
            levels: fc.slice(k).1,
            next_levels: fc.slice(k + 1).1,
            prev_levels: fc.slice(k - 1).1,
            d_out: c.d_block(k),
            d_in: c.d_block(k - 1),
        }
    }

    /// `Z_r^s = {x ∈ F^s : dx ∈ F^{s+r}}` inside `levels`, mapped by `d`
    /// into a space with `target_levels`.
    fn z(levels: &[usize], target_levels: &[usize], d: &FpMatrix, r: i64, s: i64) -> Vec<Vec<u32>> {
        let cols: Vec<usize> = (0..levels.len()).filter(|&i| levels[i] as i64 >= s).collect();
        let bound = s + r.max(0);
        let rows: Vec<usize> = (0..target_levels.len())
            .filter(|&i| (target_levels[i] as i64) < bound)
            .collect();
        let kernel = if rows.is_empty() {
            (0..cols.len())
                .map(|i| {
                    let mut e = vec![0u32; cols.len()];
                    e[i] = 1;
                    e
                })
                .collect()
        } else {
            d.select(&rows, &cols).kernel()
        };
        kernel
            .into_iter()
            .map(|v| {
                let mut full = vec![0u32; levels.len()];
                for (&c, x) in cols.iter().zip(v) {
                    full[c] = x;
                }
                full
            })
            .collect()
    }

    fn z_here(&self, r: i64, s: i64) -> Vec<Vec<u32>> {
        Self::z(&self.levels, &self.next_levels, &self.d_out, r, s)
    }

    /// `d Z_r^s` with `Z` taken one degree lower.
    fn dz_from_below(&self, r: i64, s: i64) -> Vec<Vec<u32>> {
        Self::z(&self.prev_levels, &self.levels, &self.d_in, r, s)
            .into_iter()
            .map(|v| self.d_in.apply(&v))
            .collect()
    }

    fn e(&self, r: i64, s: i64) -> usize {
        let field = self.fc.complex.field();
        let n = self.levels.len();
        let num = Subspace::spanned_by(field, n, self.z_here(r, s));
        let mut den = Subspace::spanned_by(field, n, self.z_here(r - 1, s + 1));
        for v in self.dz_from_below(r - 1, s - r + 1) {
            den.insert(&v);
        }
        debug_assert_eq!(num.sum(&den).dim(), num.dim(), "denominator not inside numerator");
        num.dim() - den.dim()
    }

    /// `dim gr^s H^k`.
    fn e_infinity(&self, s: i64) -> usize {
        let field = self.fc.complex.field();
        let n = self.levels.len();
        let boundaries: Vec<Vec<u32>> = self.d_in.rref().image_basis;
        let image_of = |t: i64| {
            let mut sp = Subspace::spanned_by(field, n, &boundaries);
            for z in Self::z(&self.levels, &self.next_levels, &self.d_out, i64::MAX / 4, t) {
                sp.insert(&z);
            }
            sp.dim()
        };
        image_of(s) - image_of(s + 1)
    }
}

/// Pages `E_0 .. E_{L+1}` of the spectral sequence of `fc` (`L` levels),
/// from `E_r^s = Z_r^s / (Z_{r-1}^{s+1} + d Z_{r-1}^{s-r+1})`.
pub fn action_ss_pages(fc: &FilteredComplex) -> SpectralSequencePages {
    let c = &fc.complex;
    let l = fc.level_count;
    let degrees: Vec<i64> = match c.degree_range() {
        Some((lo, hi)) => (lo..=hi).collect(),
        None => Vec::new(),
    };
    let slices: Vec<DegreeSlice> = degrees.iter().map(|&k| DegreeSlice::new(fc, k)).collect();
    let grid = |f: &(dyn Fn(&DegreeSlice, i64) -> usize + Sync)| -> Vec<PageEntry> {
        let mut cells: Vec<(usize, usize)> = Vec::new();
        for s in 0..l {
            for (ki, _) in slices.iter().enumerate() {
                cells.push((s, ki));
            }
        }
        let dims: Vec<usize> = cells
            .par_iter()
            .map(|&(s, ki)| f(&slices[ki], s as i64))
            .collect();
        cells
            .into_iter()
            .zip(dims)
            .filter(|&(_, d)| d > 0)
            .map(|((s, ki), dim)| PageEntry {
                s,
                degree: slices[ki].k,
                dim,
            })
            .collect()
    };
    let mut pages: Vec<Page> = (0..=l + 1)
        .map(|r| {
            let entries = grid(&|sl: &DegreeSlice, s| sl.e(r as i64, s));
            let total = entries.iter().map(|e| e.dim).sum();
            Page {
                r,
                entries,
                total,
                differential_rank: 0,
            }
        })
        .collect();
    for i in 0..pages.len().saturating_sub(1) {
        pages[i].differential_rank = (pages[i].total - pages[i + 1].total) / 2;
    }
    let e_infinity = grid(&|sl: &DegreeSlice, s| sl.e_infinity(s));
    let e_infinity_total = e_infinity.iter().map(|e| e.dim).sum();

    let mut local = Vec::new();
    for s in 0..l {
        let keep: Vec<usize> = (0..c.dim()).filter(|&i| fc.levels[i] == s).collect();
        let sub = CochainComplex::new(
            c.field(),
            keep.iter().map(|&i| c.generators()[i].clone()).collect(),
            c.d().select(&keep, &keep),
        );
        let dims: BTreeMap<i64, usize> = sub.homology_dims();
        local.extend(
            dims.into_iter()
                .filter(|&(_, h)| h > 0)
                .map(|(degree, dim)| PageEntry { s, degree, dim }),
        );
    }
    // same ordering as the page grid: by s, then degree
    local.sort_by_key(|e| (e.s, e.degree));

    let level_values = if fc.strict {
        action_values(c).iter().map(format_rational).collect()
    } else {
        Vec::new()
    };
    SpectralSequencePages {
        levels: l,
        level_values,
        pages,
        e_infinity,
        e_infinity_total,
        homology_total: c.total_homology_dim(),
        local_cohomology: local,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivariant_complex::Generator;
    use crate::fp_core::PrimeField;

    fn gen(id: &str, degree: i64, action: i64) -> Generator {
        Generator::new(id, degree, Rational::from_integer(action))
    }

    #[test]
    fn zero_differential_degenerates() {
        let f = PrimeField::new(3).unwrap();
        let c = CochainComplex::discrete(f, vec![gen("a", 0, 0), gen("b", 1, 1), gen("c", 0, 1)]);
        let ss = action_ss_pages(&FilteredComplex::from_action(c).unwrap());
        assert_eq!(ss.levels, 2);
        assert!(ss.pages.iter().all(|p| p.total == 3));
        assert_eq!(ss.e_infinity_total, 3);
        assert!(ss.all_checks_hold());
    }

    #[test]
    fn one_cancellation() {
        let f = PrimeField::new(5).unwrap();
        let mut d = FpMatrix::zeros(f, 2, 2);
        d.set(1, 0, 3);
        let c = CochainComplex::new(f, vec![gen("x", 0, 1), gen("y", 1, 0)], d);
        let ss = action_ss_pages(&FilteredComplex::from_action(c).unwrap());
        let totals: Vec<usize> = ss.pages.iter().map(|p| p.total).collect();
        assert_eq!(totals, vec![2, 2, 0, 0]);
        assert_eq!(ss.pages[1].differential_rank, 1);
        assert!(ss.all_checks_hold());
    }

    #[test]
    fn three_levels_one_class() {
        // x (action 2) -> y (action 0), z at action 1 survives
        let f = PrimeField::new(3).unwrap();
        let mut d = FpMatrix::zeros(f, 3, 3);
        d.set(1, 0, 1);
        let c = CochainComplex::new(f, vec![gen("x", 0, 2), gen("y", 1, 0), gen("z", 1, 1)], d);
        let ss = action_ss_pages(&FilteredComplex::from_action(c).unwrap());
        assert_eq!(ss.pages[1].total, 3);
        assert_eq!(ss.pages[2].total, 3);
        assert_eq!(ss.pages[3].total, 1);
        assert_eq!(ss.pages[2].differential_rank, 1);
        assert_eq!(ss.homology_total, 1);
        assert!(ss.all_checks_hold());
    }

    #[test]
    fn weak_filtration_with_internal_differential() {
        let f = PrimeField::new(2).unwrap();
        let mut d = FpMatrix::zeros(f, 3, 3);
        d.set(1, 0, 1);
        let c = CochainComplex::new(f, vec![gen("x", 0, 0), gen("y", 1, 0), gen("z", 1, 0)], d);
        let fc = FilteredComplex::new(c, vec![0, 0, 1], false).unwrap();
        let ss = action_ss_pages(&fc);
        assert_eq!(ss.pages[0].total, 3);
        assert_eq!(ss.pages[1].total, 1);
        assert!(ss.all_checks_hold());
    }

    #[test]
    fn filtration_violation() {
        let f = PrimeField::new(2).unwrap();
        let mut d = FpMatrix::zeros(f, 2, 2);
        d.set(1, 0, 1);
        let c = CochainComplex::new(f, vec![gen("x", 0, 0), gen("y", 1, 1)], d);
        assert!(matches!(FilteredComplex::from_action(c), Err(Error::FiltrationViolation(_))));
    }
}
