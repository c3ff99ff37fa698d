use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{bar_stats, c_plus_minus, window_dim_unchecked, Bar, Barcode};
use crate::equivariant_complex::ActionWindow;
use crate::error::{Error, Result};
use crate::rational::{abs, midpoint, serde_rational, Rational};

/// Multiplicity-weighted number of finite bars containing `t`.
pub fn m_count(b: &Barcode, t: &Rational) -> usize {
    b.finite_bars().filter(|x| x.contains(t)).map(|x| x.mult).sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct SmithBarcodeReport {
    pub p: u32,
    pub test_points: usize,
    /// Points `t` with `m(t, B1) > m(p t, Bp)`.
    #[serde(serialize_with = "ser_rationals")]
    pub m_violations: Vec<Rational>,
    #[serde(with = "serde_rational")]
    pub beta_tot_1: Rational,
    #[serde(with = "serde_rational")]
    pub beta_tot_p: Rational,
    /// `∫ m(t, B1) dt` computed from the step function.
    #[serde(with = "serde_rational")]
    pub integral_1: Rational,
    /// `∫ m(p t, Bp) dt`.
    #[serde(with = "serde_rational")]
    pub integral_p: Rational,
    pub integrals_match: bool,
    pub beta_scaling_holds: bool,
    pub windows_checked: usize,
    pub window_violations: Vec<ActionWindow>,
}

fn ser_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(crate::rational::format_rational))
}

impl SmithBarcodeReport {
    pub fn holds(&self) -> bool {
        self.m_violations.is_empty()
            && self.integrals_match
            && self.beta_scaling_holds
            && self.window_violations.is_empty()
    }
}

/// Compares the barcode of `φ` with that of `φ^p`: the pointwise bound
/// `m(t, B1) ≤ m(p t, Bp)`, its integrated form `β_tot(Bp) ≥ p β_tot(B1)`,
/// and `dim^I(B1) ≤ dim^{pI}(Bp)` over all windows with endpoints in
/// generic position.
///
/// Both step functions are constant between consecutive events, so testing
/// one point per cell is exhaustive.
pub fn smith_barcode_check(b1: &Barcode, bp: &Barcode) -> Result<SmithBarcodeReport> {
    if b1.p != bp.p {
        return Err(Error::ModulusMismatch(b1.p, bp.p));
    }
    let p = Rational::from_integer(b1.p as i64);
    let mut events = b1.endpoints();
    events.extend(bp.endpoints().into_iter().map(|e| e / p));
    events.sort();
    events.dedup();

    let one = Rational::from_integer(1);
    let points: Vec<Rational> = if events.is_empty() {
        vec![Rational::from_integer(0)]
    } else {
        let mut pts = vec![events[0] - one];
        pts.extend(events.windows(2).map(|w| midpoint(&w[0], &w[1])));
        pts.push(events[events.len() - 1] + one);
        pts
    };

    let m_violations: Vec<Rational> = points
        .iter()
        .filter(|t| m_count(b1, t) > m_count(bp, &(**t * p)))
        .copied()
        .collect();

    let zero = Rational::from_integer(0);
    let mut integral_1 = zero;
    let mut integral_p = zero;
    for (w, t) in events.windows(2).zip(points.iter().skip(1)) {
        let len = w[1] - w[0];
        integral_1 += len * Rational::from_integer(m_count(b1, t) as i64);
        integral_p += len * Rational::from_integer(m_count(bp, &(*t * p)) as i64);
    }
    let beta_tot_1 = bar_stats(b1).beta_tot;
    let beta_tot_p = bar_stats(bp).beta_tot;
    let integrals_match = integral_1 == beta_tot_1 && integral_p * p == beta_tot_p;

    let mut ends: Vec<Option<Rational>> = vec![None];
    ends.extend(points.iter().copied().map(Some));
    let mut windows = Vec::new();
    for (i, a) in ends.iter().enumerate() {
        for b in ends[i + 1..].iter().chain(std::iter::once(&None)) {
            windows.push(ActionWindow { a: *a, b: *b });
        }
    }
    let window_violations: Vec<ActionWindow> = windows
        .par_iter()
        .filter(|w| window_dim_unchecked(b1, w) > window_dim_unchecked(bp, &w.scaled(p)))
        .cloned()
        .collect();

    Ok(SmithBarcodeReport {
        p: b1.p,
        test_points: points.len(),
        m_violations,
        beta_tot_1,
        beta_tot_p,
        integral_1,
        integral_p,
        integrals_match,
        beta_scaling_holds: beta_tot_p >= beta_tot_1 * p,
        windows_checked: windows.len(),
        window_violations,
    })
}

fn random_rational<R: Rng + ?Sized>(rng: &mut R, bound: i64) -> Rational {
    let den = rng.gen_range(1..=4);
    Rational::new(rng.gen_range(-bound * den..=bound * den), den)
}

pub(crate) fn random_bar_with<R: Rng + ?Sized>(rng: &mut R, bound: i64) -> Bar {
    let start = random_rational(rng, bound);
    let mult = rng.gen_range(1..=2);
    if rng.gen_bool(0.25) {
        Bar::infinite(start, mult)
    } else {
        let len = Rational::new(rng.gen_range(1..=4 * bound), rng.gen_range(1..=4));
        Bar::finite(start, start + len, mult)
    }
}

/// `p · B1` together with `extra` random bars. The result satisfies every
/// check of [`smith_barcode_check`] against `b1`, since scaling preserves
/// window dimensions and additional bars only increase them.
pub fn generate_iterated_barcode(b1: &Barcode, extra: usize, seed: u64) -> Barcode {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = b1.p as i64;
    let extra: Vec<Bar> = (0..extra).map(|_| random_bar_with(&mut rng, 5 * p)).collect();
    b1.scaled(Rational::from_integer(p))
        .union(&Barcode { p: b1.p, bars: extra })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorsionWitness {
    pub window: ActionWindow,
    #[serde(with = "serde_rational")]
    pub endpoint: Rational,
    pub dim: usize,
}

/// A window `I` whose closure avoids 0 with `dim^I > 0`.
///
/// A small window around a nonzero endpoint `e` always works: the bars
/// starting or ending at `e` contain exactly one of its endpoints. If every
/// endpoint is 0, all bars are `(0, ∞)` and any window away from 0 has both
/// endpoints on the same side of every bar, so no witness exists.
/// Endpoints `c_+` and `c_-` are tried first.
pub fn torsion_witness(b: &Barcode) -> Result<Option<TorsionWitness>> {
    let (c_plus, c_minus) = c_plus_minus(b)?;
    let zero = Rational::from_integer(0);
    let ends = b.endpoints();
    let e = [c_plus, c_minus]
        .into_iter()
        .chain(ends.iter().copied())
        .find(|e| *e != zero);
    let Some(e) = e else { return Ok(None) };
    let gap = ends
        .iter()
        .filter(|x| **x != e)
        .map(|x| abs(&(*x - e)))
        .chain(std::iter::once(abs(&e)))
        .min()
        .expect("nonempty");
    let delta = gap / Rational::from_integer(2);
    let window = ActionWindow::bounded(e - delta, e + delta)?;
    debug_assert!(window.closure_avoids(&zero));
    let dim = window_dim_unchecked(b, &window);
    Ok(Some(TorsionWitness { window, endpoint: e, dim }))
}

/// `γ ≥ β_max`; vacuous without finite bars.
pub fn gamma_bound_holds(b: &Barcode, gamma: Rational) -> bool {
    bar_stats(b).beta_max.is_none_or(|m| gamma >= m)
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    pub k0: usize,
    /// For each `k ≥ k0`: `β_tot(B_k) ≥ p^{k-k0} β_tot(B_{k0})`.
    pub beta_growth: Vec<bool>,
    /// For each `k ≥ k0` with a spectral norm: `(N_k - B_k) γ_k ≥ 2 p^{k-k0} β_tot(B_{k0})`.
    pub gamma_growth: Vec<Option<bool>>,
    /// Consecutive pairs `(B_k, B_{k+1})` pass [`smith_barcode_check`].
    pub consecutive_smith: Vec<bool>,
}

impl GrowthReport {
    pub fn holds(&self) -> bool {
        self.beta_growth.iter().all(|x| *x)
            && self.gamma_growth.iter().all(|x| x.unwrap_or(true))
            && self.consecutive_smith.iter().all(|x| *x)
    }
}

/// Growth along the iterates `φ^{p^k}`: `barcodes[k]` is the barcode of
/// `φ^{p^k}` and `gammas[k]` an optional spectral norm for it.
pub fn growth_chain_check(
    barcodes: &[Barcode],
    gammas: &[Option<Rational>],
    k0: usize,
) -> Result<GrowthReport> {
    if k0 >= barcodes.len() {
        return Err(Error::DimensionMismatch(format!(
            "k0 = {k0} but only {} barcodes",
            barcodes.len()
        )));
    }
    let p = Rational::from_integer(barcodes[0].p as i64);
    let base = bar_stats(&barcodes[k0]).beta_tot;
    let mut beta_growth = Vec::new();
    let mut gamma_growth = Vec::new();
    let mut scale = Rational::from_integer(1);
    for (k, b) in barcodes.iter().enumerate().skip(k0) {
        let s = bar_stats(b);
        beta_growth.push(s.beta_tot >= scale * base);
        let gamma = gammas.get(k).copied().flatten();
        gamma_growth.push(gamma.map(|g| {
            Rational::from_integer((s.n - s.b) as i64) * g >= Rational::from_integer(2) * scale * base
        }));
        scale *= p;
    }
    let consecutive_smith = barcodes
        .windows(2)
        .map(|w| smith_barcode_check(&w[0], &w[1]).map(|r| r.holds()))
        .collect::<Result<Vec<_>>>()?;
    Ok(GrowthReport {
        k0,
        beta_growth,
        gamma_growth,
        consecutive_smith,
    })
}
