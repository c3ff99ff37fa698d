//! The quasi-Frobenius map `x ↦ x^{⊗p}` from the Tate cohomology of `V` with
//! trivial action to the Tate cohomology of `V^{⊗p}` with the signed cyclic
//! action.
//!
//! Over a field `V` is equivariantly quasi-isomorphic to `H(V)` with zero
//! differential (a choice of cocycle representatives is a chain map
//! `H(V) → V`, and its p-th tensor power commutes with the cyclic shift), so
//! the map is computed on `H(V)^{⊗p}`. There `σ` permutes basis tensors up to
//! sign and all linear algebra splits over the rotation orbits. When
//! `V^{⊗p}` is small the result is also checked on the chain level.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{tate_cohomology_dims, TateDims};
use crate::equivariant_complex::{tensor_power, CochainComplex, EquivariantComplex, TensorIndexer};
use crate::error::Result;
use crate::fp_core::{FpMatrix, PrimeField, Subspace};

/// Largest `dim V^{⊗p}` for which the dense chain-level check runs.
pub const CHAIN_LEVEL_LIMIT: usize = 256;

#[derive(Clone, Debug, Serialize)]
pub struct FrobeniusClass {
    pub degree: i64,
    /// Cocycle representative as `(generator id, coefficient)` pairs.
    pub representative: Vec<(String, u32)>,
    /// Number of basis tensors in the support of `z^{⊗p}`.
    pub image_support: usize,
}

/// Evidence that `c = (x+y)^{⊗p} - x^{⊗p} - y^{⊗p}` is zero in both Tate
/// components: `c ⊗ 1 = d(u^{-1} w ⊗ θ)` with `N w = c`, and
/// `c ⊗ θ = d(w' ⊗ 1)` with `(1-σ) w' = c`.
#[derive(Clone, Debug, Serialize)]
pub struct AdditivityCertificate {
    pub degree: i64,
    /// Coordinates of `x` and `y` in the homology basis of that degree.
    pub x: Vec<u32>,
    pub y: Vec<u32>,
    pub defect_terms: usize,
    pub vanishes_on_constant_tensors: bool,
    pub sigma_invariant: bool,
    pub norm_zero: bool,
    pub norm_preimage_found: bool,
    pub shift_preimage_found: bool,
}

impl AdditivityCertificate {
    pub fn holds(&self) -> bool {
        self.vanishes_on_constant_tensors
            && self.sigma_invariant
            && self.norm_zero
            && self.norm_preimage_found
            && self.shift_preimage_found
    }
}

/// Dense verification on `V^{⊗p}` itself.
#[derive(Clone, Debug, Serialize)]
pub struct ChainLevelCheck {
    pub tensor_dim: usize,
    pub target_dims: TateDims,
    pub images_are_cocycles: bool,
    pub images_independent: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuasiFrobenius {
    pub p: u32,
    pub homology_dim: usize,
    /// Tate dims of `V` with the trivial action.
    pub domain_dims: TateDims,
    /// Tate dims of `V^{⊗p}`.
    pub target_dims: TateDims,
    pub classes: Vec<FrobeniusClass>,
    /// Columns: `e_i ⊗ 1` then `e_i ⊗ θ` over the homology basis; rows: the
    /// chosen basis of the target.
    pub induced: Vec<Vec<u32>>,
    pub domain_parities: Vec<usize>,
    pub target_parities: Vec<usize>,
    pub is_bijective: bool,
    pub certificates: Vec<AdditivityCertificate>,
    pub chain_level: Option<ChainLevelCheck>,
}

impl QuasiFrobenius {
    pub fn dims_match_homology(&self) -> bool {
        let h = self.homology_dim;
        self.target_dims == (TateDims { even: h, odd: h })
            && self.domain_dims == (TateDims { even: h, odd: h })
    }

    pub fn all_certificates_hold(&self) -> bool {
        self.certificates.iter().all(AdditivityCertificate::holds)
    }
}

/// One rotation orbit of basis tensors `m_0, m_1 = rot(m_0), ..`, with
/// `σ e_{m_t} = signs[t] e_{m_{t+1}}`.
struct Orbit {
    members: Vec<usize>,
    degree: i64,
    one_minus_sigma: FpMatrix,
    norm: FpMatrix,
    /// For each Tate component (0: `⊗1`, 1: `⊗θ`): chosen cocycle
    /// representatives and the coboundary basis.
    reps: [Vec<Vec<u32>>; 2],
    boundaries: [Vec<Vec<u32>>; 2],
}

impl Orbit {
    fn build(field: PrimeField, members: Vec<usize>, signs: Vec<u32>, degree: i64) -> Orbit {
        let k = members.len();
        let mut sigma = FpMatrix::zeros(field, k, k);
        for (t, &s) in signs.iter().enumerate() {
            sigma.set((t + 1) % k, t, s);
        }
        let one_minus_sigma = FpMatrix::identity(field, k).sub(&sigma);
        let norm = crate::equivariant_complex::norm_of(&sigma);
        let quotient = |cycles: &FpMatrix, bounds: &FpMatrix| {
            let b = bounds.rref().image_basis;
            let mut span = Subspace::spanned_by(field, k, &b);
            let reps = cycles.kernel().into_iter().filter(|z| span.insert(z)).collect();
            (reps, b)
        };
        let (r0, b0) = quotient(&one_minus_sigma, &norm);
        let (r1, b1) = quotient(&norm, &one_minus_sigma);
        Orbit {
            members,
            degree,
            one_minus_sigma,
            norm,
            reps: [r0, r1],
            boundaries: [b0, b1],
        }
    }

    fn map(&self, component: usize) -> &FpMatrix {
        if component == 0 {
            &self.one_minus_sigma
        } else {
            &self.norm
        }
    }

    /// Coordinates of the class of `v` in component `c`, if `v` is a cocycle.
    fn coords(&self, field: PrimeField, component: usize, v: &[u32]) -> Option<Vec<u32>> {
        if !self.map(component).apply(v).iter().all(|&x| x == 0) {
            return None;
        }
        let cols: Vec<Vec<u32>> = self.reps[component]
            .iter()
            .chain(&self.boundaries[component])
            .cloned()
            .collect();
        let m = FpMatrix::from_columns(field, self.members.len(), &cols);
        let y = m.solve(v)?;
        Some(y[..self.reps[component].len()].to_vec())
    }
}

/// `H^{⊗p}` with zero differential, split into rotation orbits.
struct OrbitDecomposition {
    field: PrimeField,
    orbits: Vec<Orbit>,
    orbit_of: Vec<(usize, usize)>,
    /// Target basis: (orbit, component, representative index).
    basis: Vec<(usize, usize, usize)>,
    basis_start: HashMap<(usize, usize), usize>,
}

impl OrbitDecomposition {
    fn new(field: PrimeField, degrees: &[i64]) -> Self {
        let p = field.p() as usize;
        let ix = TensorIndexer::new(degrees.len(), p);
        let mut orbit_of = vec![(usize::MAX, 0); ix.len()];
        let mut orbits = Vec::new();
        for start in 0..ix.len() {
            if orbit_of[start].0 != usize::MAX {
                continue;
            }
            let mut members = Vec::new();
            let mut signs = Vec::new();
            let mut m = ix.multi(start);
            loop {
                let flat = ix.flat(&m);
                if flat == start && !members.is_empty() {
                    break;
                }
                orbit_of[flat] = (orbits.len(), members.len());
                members.push(flat);
                let e = ix.rotation_sign_exponent(&m, degrees);
                signs.push(field.sign(e.rem_euclid(2) as u64));
                m = ix.rotate(&m);
            }
            let degree = ix.multi(start).iter().map(|&i| degrees[i]).sum();
            orbits.push(Orbit::build(field, members, signs, degree));
        }
        let mut basis = Vec::new();
        let mut basis_start = HashMap::new();
        for (o, orbit) in orbits.iter().enumerate() {
            for c in 0..2 {
                basis_start.insert((o, c), basis.len());
                basis.extend((0..orbit.reps[c].len()).map(|r| (o, c, r)));
            }
        }
        OrbitDecomposition {
            field,
            orbits,
            orbit_of,
            basis,
            basis_start,
        }
    }

    fn parity(&self, b: usize) -> usize {
        let (o, c, _) = self.basis[b];
        (self.orbits[o].degree + c as i64).rem_euclid(2) as usize
    }

    fn dims(&self) -> TateDims {
        let even = (0..self.basis.len()).filter(|&b| self.parity(b) == 0).count();
        TateDims {
            even,
            odd: self.basis.len() - even,
        }
    }

    /// Splits a sparse vector on `H^{⊗p}` into orbit-local dense vectors.
    fn localize(&self, v: &BTreeMap<usize, u32>) -> BTreeMap<usize, Vec<u32>> {
        let mut out: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
        for (&flat, &x) in v {
            let (o, pos) = self.orbit_of[flat];
            out.entry(o)
                .or_insert_with(|| vec![0; self.orbits[o].members.len()])[pos] = x;
        }
        out
    }

    /// Target coordinates of the Tate class of `v ⊗ θ^component`.
    fn class_coords(&self, v: &BTreeMap<usize, u32>, component: usize) -> Option<Vec<u32>> {
        let mut out = vec![0u32; self.basis.len()];
        for (o, local) in self.localize(v) {
            let y = self.orbits[o].coords(self.field, component, &local)?;
            let start = self.basis_start[&(o, component)];
            out[start..start + y.len()].copy_from_slice(&y);
        }
        Some(out)
    }
}

/// `x^{⊗p}` for `x` given in coordinates over `n` basis vectors, as a
/// sparse vector over flat tensor indices.
fn frobenius_power(field: PrimeField, x: &[u32], p: usize) -> BTreeMap<usize, u32> {
    let support: Vec<(usize, u32)> = x
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| (i, c))
        .collect();
    let ix = TensorIndexer::new(x.len(), p);
    let mut out = BTreeMap::new();
    if support.is_empty() {
        return out;
    }
    let mut choice = vec![0usize; p];
    loop {
        let multi: Vec<usize> = choice.iter().map(|&c| support[c].0).collect();
        let coeff = choice.iter().fold(1u32, |acc, &c| field.mul(acc, support[c].1));
        out.insert(ix.flat(&multi), coeff);
        // odometer over support^p
        let mut pos = p;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            choice[pos] += 1;
            if choice[pos] < support.len() {
                break;
            }
            choice[pos] = 0;
        }
    }
}

fn sparse_sub(field: PrimeField, a: &mut BTreeMap<usize, u32>, b: &BTreeMap<usize, u32>) {
    for (&k, &v) in b {
        let cur = a.get(&k).copied().unwrap_or(0);
        let x = field.sub(cur, v);
        if x == 0 {
            a.remove(&k);
        } else {
            a.insert(k, x);
        }
    }
}

/// Computes the quasi-Frobenius map of `v`, its matrix in chosen bases, and
/// `certificates` additivity certificates for random pairs of classes drawn
/// with the given seed.
pub fn quasi_frobenius(v: &CochainComplex, certificates: usize, seed: u64) -> Result<QuasiFrobenius> {
    v.validate().into_result()?;
    let field = v.field();
    let p = field.p() as usize;
    let hb = v.homology_basis();
    let h = hb.len();
    let degrees = hb.degrees().to_vec();
    let decomposition = OrbitDecomposition::new(field, &degrees);
    let target_dims = decomposition.dims();
    let domain_dims = tate_cohomology_dims(&EquivariantComplex::trivial(v.clone()))?;

    // F(e_i ⊗ θ^c) = e_i^{⊗p} ⊗ θ^c
    let mut columns = Vec::with_capacity(2 * h);
    let mut domain_parities = Vec::with_capacity(2 * h);
    let mut images_are_classes = true;
    for c in 0..2 {
        for i in 0..h {
            let mut e = vec![0u32; h];
            e[i] = 1;
            let image = frobenius_power(field, &e, p);
            match decomposition.class_coords(&image, c) {
                Some(col) => columns.push(col),
                None => {
                    images_are_classes = false;
                    columns.push(vec![0; decomposition.basis.len()]);
                }
            }
            domain_parities.push((degrees[i] + c as i64).rem_euclid(2) as usize);
        }
    }
    let rows = decomposition.basis.len();
    let induced = FpMatrix::from_columns(field, rows, &columns);
    let target_parities: Vec<usize> = (0..rows).map(|b| decomposition.parity(b)).collect();

    let mut is_bijective = images_are_classes && rows == 2 * h && induced.rank() == 2 * h;
    if p % 2 == 1 && is_bijective {
        // for odd p the map preserves parity, so each parity block is invertible
        for parity in 0..2 {
            let r: Vec<usize> = (0..rows).filter(|&b| target_parities[b] == parity).collect();
            let c: Vec<usize> = (0..2 * h).filter(|&b| domain_parities[b] == parity).collect();
            let block = induced.select(&r, &c);
            is_bijective &= r.len() == c.len() && block.rank() == r.len();
            // off-parity blocks must vanish
            let off: Vec<usize> = (0..2 * h).filter(|&b| domain_parities[b] != parity).collect();
            is_bijective &= induced.select(&r, &off).is_zero();
        }
    }

    let classes = hb
        .reps()
        .iter()
        .zip(&degrees)
        .map(|(z, &degree)| FrobeniusClass {
            degree,
            representative: z
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(g, &c)| (v.generators()[g].id.clone(), c))
                .collect(),
            image_support: z.iter().filter(|&&c| c != 0).count().pow(p as u32),
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut certs = Vec::with_capacity(certificates);
    let mut by_degree: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (i, &d) in degrees.iter().enumerate() {
        by_degree.entry(d).or_default().push(i);
    }
    let degree_list: Vec<(i64, Vec<usize>)> = by_degree.into_iter().collect();
    if !degree_list.is_empty() {
        for _ in 0..certificates {
            let (deg, idx) = &degree_list[rng.gen_range(0..degree_list.len())];
            certs.push(certificate(&decomposition, h, *deg, idx, &mut rng));
        }
    }

    let chain_level = if v.dim().checked_pow(p as u32).is_some_and(|n| n <= CHAIN_LEVEL_LIMIT) {
        Some(chain_level_check(v, hb.reps(), &degrees)?)
    } else {
        None
    };
    if let Some(check) = &chain_level {
        is_bijective &= check.images_are_cocycles
            && check.images_independent
            && check.target_dims == target_dims;
    }

    Ok(QuasiFrobenius {
        p: field.p(),
        homology_dim: h,
        domain_dims,
        target_dims,
        classes,
        induced: (0..rows).map(|i| induced.row(i).to_vec()).collect(),
        domain_parities,
        target_parities,
        is_bijective,
        certificates: certs,
        chain_level,
    })
}

fn certificate(
    dec: &OrbitDecomposition,
    h: usize,
    degree: i64,
    idx: &[usize],
    rng: &mut ChaCha8Rng,
) -> AdditivityCertificate {
    let field = dec.field;
    let p = field.p() as usize;
    let random = |rng: &mut ChaCha8Rng| {
        let mut x = vec![0u32; h];
        for &i in idx {
            x[i] = rng.gen_range(0..field.p());
        }
        x
    };
    let x = random(rng);
    let y = random(rng);
    let sum: Vec<u32> = x.iter().zip(&y).map(|(&a, &b)| field.add(a, b)).collect();
    let mut c = frobenius_power(field, &sum, p);
    sparse_sub(field, &mut c, &frobenius_power(field, &x, p));
    sparse_sub(field, &mut c, &frobenius_power(field, &y, p));

    let vanishes_on_constant_tensors = c
        .keys()
        .all(|&flat| dec.orbits[dec.orbit_of[flat].0].members.len() > 1);
    let mut sigma_invariant = true;
    let mut norm_zero = true;
    let mut norm_preimage_found = true;
    let mut shift_preimage_found = true;
    for (o, local) in dec.localize(&c) {
        let orbit = &dec.orbits[o];
        let zero = |w: Vec<u32>| w.iter().all(|&a| a == 0);
        sigma_invariant &= zero(orbit.one_minus_sigma.apply(&local));
        norm_zero &= zero(orbit.norm.apply(&local));
        norm_preimage_found &= orbit
            .norm
            .solve(&local)
            .is_some_and(|w| orbit.norm.apply(&w) == local);
        shift_preimage_found &= orbit
            .one_minus_sigma
            .solve(&local)
            .is_some_and(|w| orbit.one_minus_sigma.apply(&w) == local);
    }
    let local_x = idx.iter().map(|&i| x[i]).collect();
    let local_y = idx.iter().map(|&i| y[i]).collect();
    AdditivityCertificate {
        degree,
        x: local_x,
        y: local_y,
        defect_terms: c.len(),
        vanishes_on_constant_tensors,
        sigma_invariant,
        norm_zero,
        norm_preimage_found,
        shift_preimage_found,
    }
}

/// Checks on `V^{⊗p}` that each `z^{⊗p} ⊗ θ^c` is a Tate cocycle and that
/// these classes are independent.
///
/// The Tate differential is homogeneous of degree 1, so conjugating by a
/// diagonal matrix of powers of `u` makes it constant: its rank over F_p(u)
/// is the F_p-rank of its specialization at `u = 1`.
fn chain_level_check(v: &CochainComplex, reps: &[Vec<u32>], degrees: &[i64]) -> Result<ChainLevelCheck> {
    let field = v.field();
    let p = field.p() as usize;
    let t = tensor_power(v)?;
    let n = t.dim();
    let mut big = FpMatrix::zeros(field, 2 * n, 2 * n);
    let blocks = [
        (0, 0, t.d().clone()),
        (n, 0, t.one_minus_sigma()),
        (0, n, t.norm()),
        (n, n, t.d().neg()),
    ];
    for (r0, c0, b) in &blocks {
        for (i, j, x) in b.entries() {
            big.set(r0 + i, c0 + j, x);
        }
    }
    let parity = |i: usize| (t.generators()[i % n].degree + (i >= n) as i64).rem_euclid(2) as usize;
    let classes: [Vec<usize>; 2] = {
        let (e, o): (Vec<usize>, Vec<usize>) = (0..2 * n).partition(|&i| parity(i) == 0);
        [e, o]
    };
    let into_even = big.select(&classes[0], &classes[1]);
    let into_odd = big.select(&classes[1], &classes[0]);
    let (r_eo, r_oe) = (into_odd.rank(), into_even.rank());
    let target_dims = TateDims {
        even: classes[0].len() - r_eo - r_oe,
        odd: classes[1].len() - r_eo - r_oe,
    };

    let mut images: [Vec<Vec<u32>>; 2] = [Vec::new(), Vec::new()];
    let mut cocycles = true;
    for (z, &deg) in reps.iter().zip(degrees) {
        let power = frobenius_power(field, z, p);
        for c in 0..2 {
            let mut vec2 = vec![0u32; 2 * n];
            for (&flat, &x) in &power {
                vec2[c * n + flat] = x;
            }
            cocycles &= big.apply(&vec2).iter().all(|&a| a == 0);
            let par = ((p as i64) * deg + c as i64).rem_euclid(2) as usize;
            images[par].push(classes[par].iter().map(|&i| vec2[i]).collect());
        }
    }
    let mut independent = true;
    for par in 0..2 {
        let into = if par == 0 { &into_even } else { &into_odd };
        let r_into = into.rank();
        let mut cols: Vec<Vec<u32>> = (0..into.cols()).map(|j| into.column(j)).collect();
        cols.extend(images[par].iter().cloned());
        let rank = FpMatrix::from_columns(field, classes[par].len(), &cols).rank();
        independent &= rank - r_into == images[par].len();
    }
    Ok(ChainLevelCheck {
        tensor_dim: n,
        target_dims,
        images_are_cocycles: cocycles,
        images_independent: independent,
    })
}
