//! Seeded random instances with planted structure, used by the property
//! tests, the fuzz registry and the acceptance suite.
//!
//! Every generator builds a simple normal form whose answer is known and
//! then conjugates it by a random unitriangular change of basis that
//! respects degrees, actions and (where relevant) the group action.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::equivariant_complex::{CochainComplex, EquivariantComplex, Generator};
use crate::fp_core::{FpMatrix, PrimeField};
use crate::persistence::{Bar, Barcode};
use crate::rational::Rational;
use crate::spectral::EquivariantFloerModel;

pub fn random_field<R: Rng + ?Sized>(rng: &mut R, primes: &[u64]) -> PrimeField {
    PrimeField::new(*primes.choose(rng).expect("nonempty prime list")).expect("prime")
}

fn nonzero<R: Rng + ?Sized>(rng: &mut R, field: PrimeField) -> u32 {
    rng.gen_range(1..field.p())
}

/// `I + X` and its inverse, where `X` is random with support on the pairs
/// `(r, c)` allowed by `allowed`. `allowed` must be contained in a strict
/// total order so that `X` is nilpotent.
pub fn random_unitriangular<R, F>(
    rng: &mut R,
    field: PrimeField,
    n: usize,
    density: f64,
    allowed: F,
) -> (FpMatrix, FpMatrix)
where
    R: Rng + ?Sized,
    F: Fn(usize, usize) -> bool,
{
    let mut x = FpMatrix::zeros(field, n, n);
    for r in 0..n {
        for c in 0..n {
            if allowed(r, c) && rng.gen_bool(density) {
                x.set(r, c, rng.gen_range(0..field.p()));
            }
        }
    }
    let id = FpMatrix::identity(field, n);
    let minus_x = x.neg();
    let mut inv = id.clone();
    let mut term = id.clone();
    for _ in 0..n {
        term = term.mul(&minus_x);
        if term.is_zero() {
            break;
        }
        inv = inv.add(&term);
    }
    (id.add(&x), inv)
}

fn conjugate(m: &FpMatrix, g: &FpMatrix, g_inv: &FpMatrix) -> FpMatrix {
    g.mul(m).mul(g_inv)
}

/// A filtered complex with known barcode.
#[derive(Clone, Debug)]
pub struct PlantedComplex {
    pub complex: CochainComplex,
    pub barcode: Barcode,
}

/// Random action-filtered complex with at most `max_gens` generators and
/// at most `max_levels` distinct actions.
///
/// Normal form: cancelling pairs `x → y` with `action(y) < action(x)` and
/// isolated cocycles, conjugated by a filtration-preserving automorphism.
pub fn random_filtered_complex<R: Rng + ?Sized>(
    rng: &mut R,
    field: PrimeField,
    max_gens: usize,
    max_levels: usize,
) -> PlantedComplex {
    let n_levels = rng.gen_range(1..=max_levels.max(1));
    let mut levels: Vec<Rational> = Vec::new();
    while levels.len() < n_levels {
        let a = Rational::new(rng.gen_range(-12..=12), rng.gen_range(1..=2));
        if !levels.contains(&a) {
            levels.push(a);
        }
    }
    levels.sort();
    let n = rng.gen_range(1..=max_gens.max(1));
    // (degree, action, partner) specs; partner is the target of d
    let mut specs: Vec<(i64, Rational, Option<usize>)> = Vec::new();
    let mut bars = Vec::new();
    while specs.len() < n {
        let deg = rng.gen_range(-1..=2);
        if n - specs.len() >= 2 && n_levels >= 2 && rng.gen_bool(0.5) {
            let hi = rng.gen_range(1..n_levels);
            let lo = rng.gen_range(0..hi);
            specs.push((deg, levels[hi], Some(specs.len() + 1)));
            specs.push((deg + 1, levels[lo], None));
            bars.push(Bar::finite(levels[lo], levels[hi], 1));
        } else {
            let a = levels[rng.gen_range(0..n_levels)];
            specs.push((deg, a, None));
            bars.push(Bar::infinite(a, 1));
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    // perm[old] = new position
    let mut gens = vec![Generator::new("", 0, levels[0]); n];
    for (old, &(deg, a, _)) in specs.iter().enumerate() {
        gens[perm[old]] = Generator::new(format!("c{}", perm[old]), deg, a);
    }
    let mut d0 = FpMatrix::zeros(field, n, n);
    for (old, &(_, _, partner)) in specs.iter().enumerate() {
        if let Some(t) = partner {
            d0.set(perm[t], perm[old], nonzero(rng, field));
        }
    }
    let key = |i: usize| (gens[i].action, i);
    let (g, g_inv) = random_unitriangular(rng, field, n, 0.4, |r, c| {
        gens[r].degree == gens[c].degree && key(r) < key(c)
    });
    let d = conjugate(&d0, &g, &g_inv);
    let complex = CochainComplex::new(field, gens, d);
    let barcode = Barcode::new(field.p() as u64, bars).expect("planted bars are valid");
    PlantedComplex { complex, barcode }
}

/// `Σ_j a_j σ^j` on one copy of `F_p[G]`.
fn circulant(field: PrimeField, coeffs: &[u32]) -> FpMatrix {
    let p = field.p() as usize;
    let mut m = FpMatrix::zeros(field, p, p);
    for (j, &a) in coeffs.iter().enumerate() {
        for k in 0..p {
            let r = (k + j) % p;
            m.set(r, k, field.add(m.get(r, k), a));
        }
    }
    m
}

fn set_block(m: &mut FpMatrix, r0: usize, c0: usize, b: &FpMatrix) {
    for (i, j, v) in b.entries() {
        m.set(r0 + i, c0 + j, v);
    }
}

/// Random bounded complex of free `F_p[G]`-modules of total dimension at
/// most `max_dim` (at least one copy of `F_p[G]`).
///
/// Normal form: segments of consecutive copies joined by a unit multiple of
/// `σ^j`, or by alternating `1 - σ` and `N` as in the periodic resolution;
/// conjugated by an equivariant unitriangular automorphism. Actions are
/// `-degree`.
pub fn random_free_complex<R: Rng + ?Sized>(rng: &mut R, field: PrimeField, max_dim: usize) -> EquivariantComplex {
    let p = field.p() as usize;
    let blocks = rng.gen_range(1..=(max_dim / p).max(1));
    let mut degs = Vec::with_capacity(blocks);
    let mut arrows: Vec<(usize, usize, FpMatrix)> = Vec::new();
    let one_minus_sigma = {
        let mut c = vec![0; p];
        c[0] = 1;
        c[1 % p] = field.sub(c[1 % p], 1);
        circulant(field, &c)
    };
    let norm = circulant(field, &vec![1; p]);
    while degs.len() < blocks {
        let start = rng.gen_range(-2..=1);
        let len = rng.gen_range(1..=(blocks - degs.len()));
        let kind = rng.gen_range(0..3);
        let mut flip = rng.gen_bool(0.5);
        for k in 0..len {
            let b = degs.len();
            degs.push(start + k as i64);
            if k == 0 {
                continue;
            }
            let map = match kind {
                0 if k == 1 => {
                    let mut c = vec![0; p];
                    c[rng.gen_range(0..p)] = nonzero(rng, field);
                    circulant(field, &c)
                }
                1 => {
                    flip = !flip;
                    if flip {
                        one_minus_sigma.clone()
                    } else {
                        norm.clone()
                    }
                }
                _ => continue,
            };
            arrows.push((b, b - 1, map));
        }
    }
    let n = blocks * p;
    let mut d0 = FpMatrix::zeros(field, n, n);
    for (t, s, m) in &arrows {
        set_block(&mut d0, t * p, s * p, m);
    }
    let mut sigma = FpMatrix::zeros(field, n, n);
    let mut x = FpMatrix::zeros(field, n, n);
    let shift = circulant(field, &{
        let mut c = vec![0; p];
        c[1 % p] = 1;
        c
    });
    for b in 0..blocks {
        set_block(&mut sigma, b * p, b * p, &shift);
        for c in b + 1..blocks {
            if degs[b] == degs[c] && rng.gen_bool(0.5) {
                let coeffs: Vec<u32> = (0..p).map(|_| rng.gen_range(0..field.p())).collect();
                set_block(&mut x, b * p, c * p, &circulant(field, &coeffs));
            }
        }
    }
    let id = FpMatrix::identity(field, n);
    let mut g_inv = id.clone();
    let mut term = id.clone();
    for _ in 0..blocks {
        term = term.mul(&x.neg());
        g_inv = g_inv.add(&term);
    }
    let g = id.add(&x);
    let gens = (0..n)
        .map(|i| {
            let deg = degs[i / p];
            Generator::new(format!("f{}_{}", i / p, i % p), deg, Rational::from_integer(-deg))
        })
        .collect();
    let complex = CochainComplex::new(field, gens, conjugate(&d0, &g, &g_inv));
    EquivariantComplex::new(complex, sigma)
}

/// A matrix of order dividing `p` together with the planted multiplicities
/// `m_1..m_p` of its Jordan blocks.
#[derive(Clone, Debug)]
pub struct PlantedSigma {
    pub sigma: FpMatrix,
    pub multiplicities: Vec<usize>,
}

/// Random partition of `dim` into parts of size at most `p`.
pub fn random_multiplicities<R: Rng + ?Sized>(rng: &mut R, p: usize, dim: usize) -> Vec<usize> {
    let mut m = vec![0; p];
    let mut left = dim;
    while left > 0 {
        let k = rng.gen_range(1..=p.min(left));
        m[k - 1] += 1;
        left -= k;
    }
    m
}

/// `⊕ J_k^{m_k}` (unipotent Jordan blocks) in a random basis.
pub fn sigma_with_multiplicities<R: Rng + ?Sized>(
    rng: &mut R,
    field: PrimeField,
    multiplicities: &[usize],
) -> PlantedSigma {
    let dim: usize = multiplicities.iter().enumerate().map(|(k, m)| (k + 1) * m).sum();
    let mut j = FpMatrix::identity(field, dim);
    let mut at = 0;
    for (k, &m) in multiplicities.iter().enumerate() {
        for _ in 0..m {
            for i in 0..k {
                j.set(at + i, at + i + 1, 1);
            }
            at += k + 1;
        }
    }
    let (l, l_inv) = random_unitriangular(rng, field, dim, 0.5, |r, c| r > c);
    let (u, u_inv) = random_unitriangular(rng, field, dim, 0.5, |r, c| r < c);
    let g = l.mul(&u);
    let g_inv = u_inv.mul(&l_inv);
    PlantedSigma {
        sigma: conjugate(&j, &g, &g_inv),
        multiplicities: multiplicities.to_vec(),
    }
}

pub fn random_sigma<R: Rng + ?Sized>(rng: &mut R, field: PrimeField, dim: usize) -> PlantedSigma {
    let m = random_multiplicities(rng, field.p() as usize, dim);
    sigma_with_multiplicities(rng, field, &m)
}

fn renamed(c: &EquivariantComplex, prefix: &str) -> EquivariantComplex {
    let gens = c
        .generators()
        .iter()
        .map(|g| Generator::new(format!("{prefix}{}", g.id), g.degree, g.action))
        .collect();
    EquivariantComplex::new(
        CochainComplex::new(c.field(), gens, c.d().clone()),
        c.sigma().clone(),
    )
}

/// A genuine equivariant complex: a filtered complex with trivial action,
/// plus free summands, plus a module with a random action in one degree.
pub fn random_equivariant_complex<R: Rng + ?Sized>(
    rng: &mut R,
    field: PrimeField,
    max_dim: usize,
) -> EquivariantComplex {
    let budget = max_dim.max(1);
    let trivial_gens = rng.gen_range(0..=(budget / 2).max(1));
    let mut out = renamed(
        &EquivariantComplex::trivial(random_filtered_complex(rng, field, trivial_gens.max(1), 3).complex),
        "t",
    );
    let mut left = budget.saturating_sub(out.dim());
    let p = field.p() as usize;
    if left >= p && rng.gen_bool(0.5) {
        let free = random_free_complex(rng, field, left.min(2 * p));
        left -= free.dim();
        out = out.direct_sum(&renamed(&free, "r"));
    }
    if left > 0 {
        let dim = rng.gen_range(1..=left.min(p + 1));
        let planted = random_sigma(rng, field, dim);
        let deg = rng.gen_range(-1..=1);
        let gens = (0..dim)
            .map(|i| Generator::new(format!("m{i}"), deg, Rational::from_integer(0)))
            .collect();
        let module = EquivariantComplex::new(CochainComplex::discrete(field, gens), planted.sigma);
        out = out.direct_sum(&module);
    }
    out
}

type Terms = BTreeMap<(usize, u8), FpMatrix>;

/// Composition of maps written in model terms: `(i, α) ∘ (j, β)` lands in
/// `(i + j - α, β)` when `α = j mod 2` and vanishes otherwise.
fn compose(a: &Terms, b: &Terms) -> Terms {
    let mut out: Terms = BTreeMap::new();
    for (&(i, alpha), x) in a {
        for (&(j, beta), y) in b {
            if alpha as usize != j % 2 {
                continue;
            }
            let k = (i + j - alpha as usize, beta);
            let m = x.mul(y);
            match out.get_mut(&k) {
                Some(acc) => *acc = acc.add(&m),
                None => {
                    out.insert(k, m);
                }
            }
        }
    }
    out.retain(|_, m| !m.is_zero());
    out
}

fn add_terms(a: &Terms, b: &Terms) -> Terms {
    let mut out = a.clone();
    for (k, m) in b {
        match out.get_mut(k) {
            Some(acc) => *acc = acc.add(m),
            None => {
                out.insert(*k, m.clone());
            }
        }
    }
    out.retain(|_, m| !m.is_zero());
    out
}

/// A random model: a genuine equivariant complex plus planted pairs killed
/// by `d^2_0`, conjugated by a random change of basis that raises the
/// algebraic filtration. The `E_1` page and the comparison action are kept.
pub fn random_model<R: Rng + ?Sized>(rng: &mut R, field: PrimeField, max_dim: usize) -> EquivariantFloerModel {
    let mut v = random_equivariant_complex(rng, field, max_dim.saturating_sub(2).max(1));
    let pairs = rng.gen_range(0..=((max_dim.saturating_sub(v.dim())) / 2).min(2));
    let mut planted = Vec::new();
    for k in 0..pairs {
        let deg = rng.gen_range(0..=2);
        let hi = Rational::from_integer(rng.gen_range(0..=3));
        let lo = hi - Rational::from_integer(rng.gen_range(0..=2));
        let gens = vec![
            Generator::new(format!("px{k}"), deg, hi),
            Generator::new(format!("py{k}"), deg - 1, lo),
        ];
        let before = v.dim();
        v = v.direct_sum(&EquivariantComplex::trivial(CochainComplex::discrete(field, gens)));
        planted.push((before, before + 1));
    }
    let n = v.dim();
    let gens = v.generators().to_vec();
    let mut d: Terms = BTreeMap::new();
    d.insert((0, 0), v.d().clone());
    d.insert((1, 0), v.one_minus_sigma());
    d.insert((1, 1), v.d().neg());
    d.insert((2, 1), v.norm());
    let mut d20 = FpMatrix::zeros(field, n, n);
    for &(x, y) in &planted {
        d20.set(y, x, nonzero(rng, field));
    }
    d.insert((2, 0), d20);
    d.retain(|_, m| !m.is_zero());

    let key = |i: usize| (gens[i].action, i);
    let mut x: Terms = BTreeMap::new();
    for (i, alpha) in [(1usize, 0u8), (2, 1), (2, 0), (3, 1)] {
        if !rng.gen_bool(0.5) {
            continue;
        }
        let shift = alpha as i64 - i as i64;
        let mut m = FpMatrix::zeros(field, n, n);
        for r in 0..n {
            for c in 0..n {
                if gens[r].degree == gens[c].degree + shift && key(r) < key(c) && rng.gen_bool(0.4) {
                    m.set(r, c, rng.gen_range(0..field.p()));
                }
            }
        }
        if !m.is_zero() {
            x.insert((i, alpha), m);
        }
    }
    // the identity of V<1, θ> is (0, 0) on the 1-component and (1, 1) on the θ-component
    let id: Terms = BTreeMap::from([
        ((0, 0), FpMatrix::identity(field, n)),
        ((1, 1), FpMatrix::identity(field, n)),
    ]);
    let g = add_terms(&id, &x);
    let minus_x: Terms = x.iter().map(|(k, m)| (*k, m.neg())).collect();
    let mut g_inv = id.clone();
    let mut power = g_inv.clone();
    for _ in 0..n {
        power = compose(&power, &minus_x);
        if power.is_empty() {
            break;
        }
        g_inv = add_terms(&g_inv, &power);
    }
    let mut terms = compose(&compose(&g_inv, &d), &g);
    terms.remove(&(0, 0));
    let i_max = terms.keys().map(|k| k.0).max().unwrap_or(2).max(2);
    EquivariantFloerModel::new(v.complex().clone(), Some(v.sigma().clone()), terms, i_max)
        .expect("conjugated model is valid")
}

/// Random barcode with at most `max_bars` distinct bars and small rational
/// endpoints.
pub fn random_barcode<R: Rng + ?Sized>(rng: &mut R, p: u32, max_bars: usize) -> Barcode {
    let n = rng.gen_range(0..=max_bars);
    let bars = (0..n).map(|_| crate::persistence::random_bar_with(rng, 6)).collect();
    Barcode::new(p as u64, bars).expect("generated bars are valid")
}

/// `b` infinite bars at 0 and nothing else.
pub fn identity_barcode(p: u32, b: usize) -> Barcode {
    Barcode::new(p as u64, vec![Bar::infinite(Rational::from_integer(0), b.max(1))]).expect("valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module_decomp::decompose;
    use crate::persistence::barcode_from_filtered;
    use crate::tate::tate_cohomology_dims;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn filtered_complexes_are_valid_and_keep_their_barcode() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let f = random_field(&mut rng, &[2, 3, 5]);
            let pc = random_filtered_complex(&mut rng, f, 12, 5);
            assert!(pc.complex.validate().is_valid(), "{}", pc.complex.validate());
            assert_eq!(barcode_from_filtered(&pc.complex).unwrap(), pc.barcode);
        }
    }

    #[test]
    fn free_complexes_are_equivariant_and_tate_acyclic() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let f = random_field(&mut rng, &[2, 3, 5, 7]);
            let v = random_free_complex(&mut rng, f, 21);
            v.ensure_valid().unwrap();
            assert!(v.dim() <= 21);
            assert_eq!(tate_cohomology_dims(&v).unwrap().total(), 0);
        }
    }

    #[test]
    fn planted_sigma_decomposes_as_planted() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let f = random_field(&mut rng, &[2, 3, 5]);
            let dim = rng.gen_range(1..=10);
            let s = random_sigma(&mut rng, f, dim);
            assert_eq!(decompose(&s.sigma).unwrap().multiplicities, s.multiplicities);
        }
    }

    #[test]
    fn models_and_equivariant_complexes_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..40 {
            let f = random_field(&mut rng, &[2, 3]);
            let v = random_equivariant_complex(&mut rng, f, 10);
            v.ensure_valid().unwrap();
            let m = random_model(&mut rng, f, 10);
            m.validate().unwrap();
        }
    }
}
