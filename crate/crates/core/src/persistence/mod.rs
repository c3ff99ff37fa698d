//! Barcodes of action-filtered complexes, window dimensions, and the
//! barcode-level Smith inequalities.

mod smith;

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::equivariant_complex::{ActionWindow, CochainComplex};
use crate::error::{Error, Result};
use crate::fp_core::{is_prime, FpMatrix};
use crate::rational::{format_rational, serde_opt_rational, serde_rational, Rational};

pub(crate) use smith::random_bar_with;
pub use smith::{
    gamma_bound_holds, generate_iterated_barcode, growth_chain_check, m_count, smith_barcode_check,
    torsion_witness, GrowthReport, SmithBarcodeReport, TorsionWitness,
};

/// A half-open bar `(start, end]`, or `(start, ∞)` when `end` is `None`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bar {
    #[serde(with = "serde_rational")]
    pub start: Rational,
    #[serde(with = "serde_opt_rational")]
    pub end: Option<Rational>,
    pub mult: usize,
}

impl Bar {
    pub fn finite(start: Rational, end: Rational, mult: usize) -> Self {
        Bar { start, end: Some(end), mult }
    }

    pub fn infinite(start: Rational, mult: usize) -> Self {
        Bar { start, end: None, mult }
    }

    pub fn is_finite(&self) -> bool {
        self.end.is_some()
    }

    pub fn length(&self) -> Option<Rational> {
        self.end.map(|e| e - self.start)
    }

    /// `t ∈ (start, end]`.
    pub fn contains(&self, t: &Rational) -> bool {
        self.start < *t && self.end.is_none_or(|e| *t <= e)
    }

    fn key(&self) -> (Rational, bool, Rational) {
        (self.start, self.end.is_none(), self.end.unwrap_or(self.start))
    }

    pub fn scaled(&self, c: Rational) -> Bar {
        Bar {
            start: self.start * c,
            end: self.end.map(|e| e * c),
            mult: self.mult,
        }
    }
}

impl fmt::Display for Bar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.end {
            Some(e) => write!(f, "({}, {}]", format_rational(&self.start), format_rational(&e))?,
            None => write!(f, "({}, inf)", format_rational(&self.start))?,
        }
        if self.mult != 1 {
            write!(f, " x{}", self.mult)?;
        }
        Ok(())
    }
}

/// A finite multiset of bars in canonical form: sorted by `(start, end)`
/// with infinite ends last, equal bars merged.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Barcode {
    pub p: u32,
    pub bars: Vec<Bar>,
}

#[derive(Deserialize)]
struct BarcodeJson {
    p: u64,
    bars: Vec<Bar>,
}

impl<'de> Deserialize<'de> for Barcode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = BarcodeJson::deserialize(d)?;
        Barcode::new(raw.p, raw.bars).map_err(serde::de::Error::custom)
    }
}

impl Barcode {
    pub fn new(p: u64, bars: Vec<Bar>) -> Result<Self> {
        if !is_prime(p) || p > i32::MAX as u64 {
            return Err(Error::NotPrime(p));
        }
        for (i, b) in bars.iter().enumerate() {
            if b.mult == 0 {
                return Err(Error::InvalidBar(format!("bars[{i}] has multiplicity 0")));
            }
            if let Some(e) = b.end {
                if e <= b.start {
                    return Err(Error::InvalidBar(format!("bars[{i}] = {b} is empty")));
                }
            }
        }
        Ok(Self::canonical(p as u32, bars))
    }

    pub fn empty(p: u32) -> Self {
        Barcode { p, bars: Vec::new() }
    }

    fn canonical(p: u32, mut bars: Vec<Bar>) -> Self {
        bars.sort_by_key(|a| a.key());
        let mut merged: Vec<Bar> = Vec::with_capacity(bars.len());
        for b in bars {
            match merged.last_mut() {
                Some(last) if last.start == b.start && last.end == b.end => last.mult += b.mult,
                _ => merged.push(b),
            }
        }
        Barcode { p, bars: merged }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: BarcodeJson = serde_json::from_str(s).map_err(|e| {
            Error::malformed(format!("line {}, column {}", e.line(), e.column()), e.to_string())
        })?;
        Barcode::new(raw.p, raw.bars)
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    pub fn finite_bars(&self) -> impl Iterator<Item = &Bar> {
        self.bars.iter().filter(|b| b.is_finite())
    }

    pub fn infinite_bars(&self) -> impl Iterator<Item = &Bar> {
        self.bars.iter().filter(|b| !b.is_finite())
    }

    /// All finite endpoints, sorted and deduplicated.
    pub fn endpoints(&self) -> Vec<Rational> {
        let mut e: Vec<Rational> = self
            .bars
            .iter()
            .flat_map(|b| std::iter::once(b.start).chain(b.end))
            .collect();
        e.sort();
        e.dedup();
        e
    }

    /// Every bar scaled by `c > 0`.
    pub fn scaled(&self, c: Rational) -> Barcode {
        Barcode::canonical(self.p, self.bars.iter().map(|b| b.scaled(c)).collect())
    }

    /// Union of multisets.
    pub fn union(&self, other: &Barcode) -> Barcode {
        Barcode::canonical(self.p, self.bars.iter().chain(&other.bars).cloned().collect())
    }

    /// Removes one copy of `bars[index]`.
    pub fn without_one(&self, index: usize) -> Barcode {
        let mut bars = self.bars.clone();
        if bars[index].mult > 1 {
            bars[index].mult -= 1;
        } else {
            bars.remove(index);
        }
        Barcode { p: self.p, bars }
    }
}

/// Persistence pairing by column reduction over F_p, generators ordered by
/// `(action, id)`. A reduced column with lowest entry at `i` gives the bar
/// `(action(i), action(j)]`; unpaired zero columns give infinite bars.
pub fn barcode_from_filtered(c: &CochainComplex) -> Result<Barcode> {
    let gens = c.generators();
    for (i, j, _) in c.d().entries() {
        if gens[i].action >= gens[j].action {
            return Err(Error::FiltrationViolation(format!(
                "d({}) hits {} without lowering the action",
                gens[j].id, gens[i].id
            )));
        }
    }
    c.validate().into_result()?;
    let field = c.field();
    let n = c.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| match gens[a].action.cmp(&gens[b].action) {
        Ordering::Equal => gens[a].id.cmp(&gens[b].id),
        o => o,
    });
    let mut pos = vec![0; n];
    for (k, &g) in order.iter().enumerate() {
        pos[g] = k;
    }
    // column k: the differential of order[k] in the filtration basis
    let mut cols: Vec<Vec<u32>> = order
        .iter()
        .map(|&g| {
            let mut v = vec![0u32; n];
            for i in 0..n {
                let x = c.d().get(i, g);
                if x != 0 {
                    v[pos[i]] = x;
                }
            }
            v
        })
        .collect();
    let low = |v: &[u32]| v.iter().rposition(|&x| x != 0);
    let mut owner: Vec<Option<usize>> = vec![None; n];
    let mut paired = vec![false; n];
    for j in 0..n {
        while let Some(l) = low(&cols[j]) {
            match owner[l] {
                Some(k) => {
                    let factor = field.neg(field.mul(cols[j][l], field.inv(cols[k][l])));
                    let pivot = cols[k].clone();
                    for (x, &y) in cols[j].iter_mut().zip(&pivot) {
                        *x = field.mul_add(*x, factor, y);
                    }
                }
                None => {
                    owner[l] = Some(j);
                    paired[l] = true;
                    paired[j] = true;
                    break;
                }
            }
        }
    }
    let action = |k: usize| gens[order[k]].action;
    let mut bars = Vec::new();
    for (l, o) in owner.iter().enumerate() {
        if let Some(j) = o {
            bars.push(Bar::finite(action(l), action(*j), 1));
        }
    }
    for k in 0..n {
        if !paired[k] {
            bars.push(Bar::infinite(action(k), 1));
        }
    }
    Ok(Barcode::canonical(field.p(), bars))
}

/// `true` if the test point is `−∞` or `+∞` (`None` with the given side) or
/// lies in the bar. `+∞` lies exactly in the infinite bars.
fn endpoint_in(bar: &Bar, t: Option<&Rational>, left: bool) -> bool {
    match t {
        Some(t) => bar.contains(t),
        None => !left && !bar.is_finite(),
    }
}

/// Dimension of the window homology read off the barcode: a bar counts
/// when exactly one window endpoint lies in it. This specializes to
/// `Σ_{t ∈ I_j} m_j` for `(−∞, t)`, and for `(t, ∞)` counts finite bars
/// containing `t` and infinite bars not containing it.
pub fn window_dim(b: &Barcode, w: &ActionWindow) -> Result<usize> {
    let ends = b.endpoints();
    for e in [w.a, w.b].into_iter().flatten() {
        if ends.binary_search(&e).is_ok() {
            return Err(Error::SpectralEndpoint(format_rational(&e)));
        }
    }
    Ok(window_dim_unchecked(b, w))
}

pub(crate) fn window_dim_unchecked(b: &Barcode, w: &ActionWindow) -> usize {
    b.bars
        .iter()
        .filter(|bar| endpoint_in(bar, w.a.as_ref(), true) != endpoint_in(bar, w.b.as_ref(), false))
        .map(|bar| bar.mult)
        .sum()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BarStats {
    /// Number of finite bars.
    pub k: usize,
    /// Number of infinite bars.
    pub b: usize,
    /// `2K + B`, the number of bar endpoints.
    pub n: usize,
    #[serde(with = "serde_rational")]
    pub beta_tot: Rational,
    #[serde(with = "serde_opt_rational")]
    pub beta_max: Option<Rational>,
    #[serde(with = "serde_opt_rational")]
    pub c_plus: Option<Rational>,
    #[serde(with = "serde_opt_rational")]
    pub c_minus: Option<Rational>,
}

/// Multiplicity-weighted statistics; `c_±` are `None` without infinite bars
/// (see [`c_plus_minus`]).
pub fn bar_stats(b: &Barcode) -> BarStats {
    let k = b.finite_bars().map(|x| x.mult).sum();
    let inf = b.infinite_bars().map(|x| x.mult).sum();
    let beta_tot = b
        .finite_bars()
        .map(|x| x.length().unwrap() * Rational::from_integer(x.mult as i64))
        .fold(Rational::from_integer(0), |a, x| a + x);
    let beta_max = b.finite_bars().filter_map(Bar::length).max();
    let (c_plus, c_minus) = match c_plus_minus(b) {
        Ok((p, m)) => (Some(p), Some(m)),
        Err(_) => (None, None),
    };
    BarStats {
        k,
        b: inf,
        n: 2 * k + inf,
        beta_tot,
        beta_max,
        c_plus,
        c_minus,
    }
}

/// Largest and smallest start of an infinite bar.
pub fn c_plus_minus(b: &Barcode) -> Result<(Rational, Rational)> {
    let starts: Vec<Rational> = b.infinite_bars().map(|x| x.start).collect();
    let max = starts.iter().max().ok_or(Error::EmptyBarcode)?;
    let min = starts.iter().min().ok_or(Error::EmptyBarcode)?;
    Ok((*max, *min))
}

/// A complex realizing `b`: for each finite bar `(a, e]` a pair `x → y`
/// with `y` at action `a` and `x` at action `e`, for each infinite bar a
/// single cocycle at its start. Degrees alternate 0/1 along pairs.
pub fn complex_from_barcode(b: &Barcode) -> CochainComplex {
    use crate::equivariant_complex::Generator;
    let field = crate::fp_core::PrimeField::new(b.p as u64).expect("barcode modulus is prime");
    let mut gens = Vec::new();
    let mut arrows = Vec::new();
    let mut k = 0;
    for bar in &b.bars {
        for _ in 0..bar.mult {
            match bar.end {
                Some(e) => {
                    gens.push(Generator::new(format!("x{k}"), 0, e));
                    gens.push(Generator::new(format!("y{k}"), 1, bar.start));
                    arrows.push((gens.len() - 1, gens.len() - 2));
                }
                None => gens.push(Generator::new(format!("z{k}"), 0, bar.start)),
            }
            k += 1;
        }
    }
    let mut d = FpMatrix::zeros(field, gens.len(), gens.len());
    for (i, j) in arrows {
        d.set(i, j, 1);
    }
    CochainComplex::new(field, gens, d)
}
