//! Registry of randomized property checks with seeded generation, greedy
//! minimization of failing instances, and replayable reproducers.
//!
//! Instances are carried as JSON values in the same formats the CLI reads,
//! so a reproducer is self-contained.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::equivariant_complex::{ActionWindow, CochainComplex, ComplexJson, EquivariantComplex};
use crate::error::{Error, Result};
use crate::fp_core::{FpMatrix, PrimeField};
use crate::generate::{
    random_field, random_filtered_complex, random_free_complex, random_model, random_multiplicities,
    random_sigma, sigma_with_multiplicities,
};
use crate::module_decomp::{decompose, smith_chain_check, tate_and_invariant_dims};
use crate::morse_bzp::{local_euler_constant, resolution_homology, wilson_constant};
use crate::persistence::{
    barcode_from_filtered, c_plus_minus, generate_iterated_barcode, smith_barcode_check, torsion_witness,
    window_dim, Bar, Barcode,
};
use crate::rational::{midpoint, Rational};
use crate::spectral::{action_ss_pages, algebraic_ss_pages, action_values, FilteredComplex, ModelJson};
use crate::tate::{quasi_frobenius, tate_cohomology_dims};

/// Result of checking one instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Outcome {
    pub pass: bool,
    pub detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Size {
    pub max_dim: usize,
    pub max_levels: usize,
}

type GenFn = fn(&mut ChaCha8Rng, PrimeField, Size) -> Value;
type CheckFn = fn(&Value) -> Result<Outcome>;

pub struct Property {
    pub name: &'static str,
    pub about: &'static str,
    pub default_primes: &'static [u64],
    pub default_size: Size,
    /// Exploratory properties are expected to fail on some inputs.
    pub exploratory: bool,
    generate: GenFn,
    check: CheckFn,
}

impl Property {
    pub fn generate(&self, rng: &mut ChaCha8Rng, field: PrimeField, size: Size) -> Value {
        (self.generate)(rng, field, size)
    }

    pub fn check(&self, instance: &Value) -> Result<Outcome> {
        (self.check)(instance)
    }
}

const ALL_PRIMES: &[u64] = &[2, 3, 5, 7];

pub static REGISTRY: &[Property] = &[
    Property {
        name: "free-tate-vanishing",
        about: "Tate cohomology of a bounded complex of free modules is zero",
        default_primes: ALL_PRIMES,
        default_size: Size { max_dim: 21, max_levels: 1 },
        exploratory: false,
        generate: gen_free,
        check: check_free,
    },
    Property {
        name: "quasi-frobenius",
        about: "the Frobenius map V -> V^{(x)p} is a Tate isomorphism onto two copies of H(V)",
        default_primes: &[3, 5],
        default_size: Size { max_dim: 6, max_levels: 4 },
        exploratory: false,
        generate: gen_qf,
        check: check_qf,
    },
    Property {
        name: "module-decomp",
        about: "closed-form Tate and invariant dimensions agree with direct computation",
        default_primes: ALL_PRIMES,
        default_size: Size { max_dim: 12, max_levels: 1 },
        exploratory: false,
        generate: gen_module,
        check: check_module,
    },
    Property {
        name: "smith-chain",
        about: "the sharpened bound is strictly below the invariant bound exactly when m_p > 0",
        default_primes: ALL_PRIMES,
        default_size: Size { max_dim: 12, max_levels: 1 },
        exploratory: false,
        generate: gen_chain,
        check: check_chain,
    },
    Property {
        name: "spectral-convergence",
        about: "action spectral sequence converges to total homology with local E_1",
        default_primes: ALL_PRIMES,
        default_size: Size { max_dim: 15, max_levels: 6 },
        exploratory: false,
        generate: gen_filtered,
        check: check_spectral,
    },
    Property {
        name: "algebraic-ss",
        about: "E_1 differentials are 1 - sigma and N, and dim E_inf <= dim E_2",
        default_primes: &[2, 3, 5],
        default_size: Size { max_dim: 10, max_levels: 3 },
        exploratory: false,
        generate: gen_model,
        check: check_model,
    },
    Property {
        name: "barcode-roundtrip",
        about: "window dimensions from the barcode equal subquotient homology",
        default_primes: ALL_PRIMES,
        default_size: Size { max_dim: 12, max_levels: 6 },
        exploratory: false,
        generate: gen_roundtrip,
        check: check_roundtrip,
    },
    Property {
        name: "barcode-smith",
        about: "iterated barcodes pass the barcode Smith inequalities",
        default_primes: ALL_PRIMES,
        default_size: Size { max_dim: 8, max_levels: 4 },
        exploratory: false,
        generate: gen_barcode_pair,
        check: check_barcode_pair,
    },
    Property {
        name: "barcode-smith-adversarial",
        about: "removing one bar from p*B1 is always flagged",
        default_primes: ALL_PRIMES,
        default_size: Size { max_dim: 8, max_levels: 0 },
        exploratory: false,
        generate: gen_adversarial_pair,
        check: check_adversarial_pair,
    },
    Property {
        name: "torsion",
        about: "witness windows exist exactly for barcodes with a nonzero endpoint",
        default_primes: ALL_PRIMES,
        default_size: Size { max_dim: 8, max_levels: 0 },
        exploratory: false,
        generate: gen_torsion,
        check: check_torsion,
    },
    Property {
        name: "constants",
        about: "Wilson constant, local Euler sign and acyclicity of the periodic resolution",
        default_primes: &[2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31],
        default_size: Size { max_dim: 20, max_levels: 0 },
        exploratory: false,
        generate: gen_constants,
        check: check_constants,
    },
    Property {
        name: "sharpened-from-classical",
        about: "exploratory: does dim HF(phi) <= dim of invariants force the sharpened bound? (it does not)",
        default_primes: &[2, 3, 5],
        default_size: Size { max_dim: 10, max_levels: 1 },
        exploratory: true,
        generate: gen_classical_only,
        check: check_classical_only,
    },
];

pub fn property(name: &str) -> Result<&'static Property> {
    REGISTRY
        .iter()
        .find(|p| p.name == name)
        .ok_or_else(|| Error::malformed("op", format!("unknown property {name:?}")))
}

fn parse<T: serde::de::DeserializeOwned>(v: &Value, field: &str) -> Result<T> {
    let inner = if field.is_empty() { v } else { v.get(field).unwrap_or(&Value::Null) };
    serde_json::from_value(inner.clone()).map_err(|e| Error::malformed(field.to_string(), e.to_string()))
}

fn parse_equivariant(v: &Value, field: &str) -> Result<EquivariantComplex> {
    let c = parse::<ComplexJson>(v, field)?.to_equivariant()?;
    c.ensure_valid()?;
    Ok(c)
}

fn parse_complex(v: &Value, field: &str) -> Result<CochainComplex> {
    let c = parse::<ComplexJson>(v, field)?.to_complex()?;
    c.validate().into_result()?;
    Ok(c)
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn gen_free(rng: &mut ChaCha8Rng, f: PrimeField, s: Size) -> Value {
    to_value(&ComplexJson::from_equivariant(&random_free_complex(rng, f, s.max_dim)))
}

fn check_free(v: &Value) -> Result<Outcome> {
    let c = parse_equivariant(v, "")?;
    let free = decompose(c.sigma())?;
    if free.non_free() != 0 {
        return Err(Error::malformed("sigma", "module is not free"));
    }
    let t = tate_cohomology_dims(&c)?;
    Ok(Outcome::new(t.total() == 0, format!("tate dims ({}, {})", t.even, t.odd)))
}

fn gen_qf(rng: &mut ChaCha8Rng, f: PrimeField, s: Size) -> Value {
    let c = random_filtered_complex(rng, f, s.max_dim, s.max_levels.max(1)).complex;
    json!({ "complex": ComplexJson::from_complex(&c), "certificates": 2, "seed": rng.gen::<u32>() })
}

fn check_qf(v: &Value) -> Result<Outcome> {
    let c = parse_complex(v, "complex")?;
    let certs: usize = parse(v, "certificates")?;
    let seed: u64 = parse(v, "seed")?;
    let q = quasi_frobenius(&c, certs, seed)?;
    let chain_ok = q
        .chain_level
        .as_ref()
        .is_none_or(|cl| cl.images_are_cocycles && cl.images_independent);
    let pass = q.is_bijective && q.dims_match_homology() && q.all_certificates_hold() && chain_ok;
    Ok(Outcome::new(
        pass,
        format!(
            "dim H = {}, target ({}, {}), bijective {}, certificates {}/{}",
            q.homology_dim,
            q.target_dims.even,
            q.target_dims.odd,
            q.is_bijective,
            q.certificates.iter().filter(|c| c.holds()).count(),
            q.certificates.len()
        ),
    ))
}

fn gen_module(rng: &mut ChaCha8Rng, f: PrimeField, s: Size) -> Value {
    let dim = rng.gen_range(1..=s.max_dim.max(1));
    to_value(&ComplexJson::from_equivariant(&EquivariantComplex::module(random_sigma(rng, f, dim).sigma)))
}

fn check_module(v: &Value) -> Result<Outcome> {
    let c = parse_equivariant(v, "")?;
    let d = decompose(c.sigma())?;
    let closed = tate_and_invariant_dims(&d);
    let tate = tate_cohomology_dims(&c)?.total();
    let n = c.dim();
    let invariants = n - c.sigma().sub(&FpMatrix::identity(c.field(), n)).rank();
    Ok(Outcome::new(
        closed.tate_dim == tate && closed.invariant_dim == invariants,
        format!(
            "m = {:?}: closed form ({}, {}), direct ({tate}, {invariants})",
            d.multiplicities, closed.tate_dim, closed.invariant_dim
        ),
    ))
}

fn planted_sigma_value(rng: &mut ChaCha8Rng, f: PrimeField, max_dim: usize, force_free: Option<bool>) -> (Value, usize) {
    let p = f.p() as usize;
    let dim = rng.gen_range(1..=max_dim.max(p));
    let mut m = random_multiplicities(rng, p, dim);
    match force_free {
        Some(true) if m[p - 1] == 0 => m[p - 1] = 1,
        Some(false) => {
            let free = std::mem::take(&mut m[p - 1]);
            m[0] += free * p;
        }
        _ => {}
    }
    let s = sigma_with_multiplicities(rng, f, &m);
    let invariant: usize = m.iter().sum();
    (to_value(&ComplexJson::from_equivariant(&EquivariantComplex::module(s.sigma))), invariant)
}

fn gen_chain(rng: &mut ChaCha8Rng, f: PrimeField, s: Size) -> Value {
    let free = rng.gen_bool(0.5);
    let (sigma, invariant) = planted_sigma_value(rng, f, s.max_dim, Some(free));
    json!({ "hf_dim": rng.gen_range(0..=invariant), "sigma": sigma })
}

fn check_chain(v: &Value) -> Result<Outcome> {
    let hf: usize = parse(v, "hf_dim")?;
    let c = parse_equivariant(v, "sigma")?;
    let r = smith_chain_check(hf, c.sigma())?;
    let ordered = r.invariant_le_total && r.sharpened_le_invariant;
    let strict = r.sharpened_bound < r.invariant_dim;
    let pass = ordered && strict == (r.decomposition.free() > 0) && r.strictly_stronger == strict;
    Ok(Outcome::new(
        pass,
        format!(
            "m_p = {}, sharpened {} vs invariant {}",
            r.decomposition.free(),
            r.sharpened_bound,
            r.invariant_dim
        ),
    ))
}

fn gen_classical_only(rng: &mut ChaCha8Rng, f: PrimeField, s: Size) -> Value {
    let (sigma, invariant) = planted_sigma_value(rng, f, s.max_dim, Some(true));
    json!({ "hf_dim": rng.gen_range(0..=invariant), "sigma": sigma })
}

fn check_classical_only(v: &Value) -> Result<Outcome> {
    let hf: usize = parse(v, "hf_dim")?;
    let c = parse_equivariant(v, "sigma")?;
    let r = smith_chain_check(hf, c.sigma())?;
    if !r.classical_holds {
        return Err(Error::malformed("hf_dim", "classical bound fails, instance out of scope"));
    }
    Ok(Outcome::new(
        r.sharpened_holds,
        format!("hf_dim {hf}, sharpened bound {}, invariant bound {}", r.sharpened_bound, r.invariant_dim),
    ))
}

fn gen_filtered(rng: &mut ChaCha8Rng, f: PrimeField, s: Size) -> Value {
    to_value(&ComplexJson::from_complex(&random_filtered_complex(rng, f, s.max_dim, s.max_levels.max(1)).complex))
}

fn check_spectral(v: &Value) -> Result<Outcome> {
    let c = parse_complex(v, "")?;
    let brute = c.total_homology_dim();
    let pages = action_ss_pages(&FilteredComplex::from_action(c)?);
    let pass = pages.all_checks_hold() && pages.e_infinity_total == brute;
    Ok(Outcome::new(
        pass,
        format!(
            "{} levels, E_inf total {}, homology {brute}",
            pages.levels, pages.e_infinity_total
        ),
    ))
}

fn gen_model(rng: &mut ChaCha8Rng, f: PrimeField, s: Size) -> Value {
    to_value(&ModelJson::from_model(&random_model(rng, f, s.max_dim)))
}

fn check_model(v: &Value) -> Result<Outcome> {
    let m = parse::<ModelJson>(v, "")?.to_model()?;
    let r = algebraic_ss_pages(&m)?;
    let pass = r.tate_bound_holds && r.e1.matches_sigma != Some(false);
    Ok(Outcome::new(
        pass,
        format!(
            "E_2 ({}, {}), E_inf ({}, {}), E_1 matches sigma {:?}",
            r.e2_tate.even, r.e2_tate.odd, r.e_infinity.even, r.e_infinity.odd, r.e1.matches_sigma
        ),
    ))
}

/// Random windows whose finite endpoints avoid the action spectrum.
fn random_windows(rng: &mut ChaCha8Rng, c: &CochainComplex, count: usize) -> Vec<ActionWindow> {
    let acts = action_values(c);
    let one = Rational::from_integer(1);
    let mut cuts: Vec<Rational> = acts.windows(2).map(|w| midpoint(&w[0], &w[1])).collect();
    if let (Some(lo), Some(hi)) = (acts.iter().min(), acts.iter().max()) {
        cuts.push(*lo - one);
        cuts.push(*hi + one);
    }
    cuts.sort();
    let mut ends: Vec<Option<Rational>> = vec![None];
    ends.extend(cuts.into_iter().map(Some));
    (0..count)
        .map(|_| {
            let a = ends[rng.gen_range(0..ends.len())];
            let b = ends[rng.gen_range(0..ends.len())];
            match (a, b) {
                (Some(x), Some(y)) if x > y => ActionWindow { a: Some(y), b: Some(x) },
                (Some(x), Some(y)) if x == y => ActionWindow { a: Some(x), b: None },
                _ => ActionWindow { a, b },
            }
        })
        .collect()
}

fn gen_roundtrip(rng: &mut ChaCha8Rng, f: PrimeField, s: Size) -> Value {
    let c = random_filtered_complex(rng, f, s.max_dim, s.max_levels.max(1)).complex;
    let windows = random_windows(rng, &c, 20);
    json!({ "complex": ComplexJson::from_complex(&c), "windows": windows })
}

fn check_roundtrip(v: &Value) -> Result<Outcome> {
    let c = parse_complex(v, "complex")?;
    let windows: Vec<ActionWindow> = parse(v, "windows")?;
    let b = barcode_from_filtered(&c)?;
    let mut bad = Vec::new();
    for w in &windows {
        let from_bars = window_dim(&b, w)?;
        let direct = c.window_truncate(w)?.total_homology_dim();
        if from_bars != direct {
            bad.push(format!("{w}: barcode {from_bars}, homology {direct}"));
        }
    }
    Ok(Outcome::new(
        bad.is_empty(),
        if bad.is_empty() { format!("{} windows agree", windows.len()) } else { bad.join("; ") },
    ))
}

fn gen_b1(rng: &mut ChaCha8Rng, f: PrimeField, s: Size) -> Barcode {
    crate::generate::random_barcode(rng, f.p(), s.max_dim.max(1))
}

fn gen_barcode_pair(rng: &mut ChaCha8Rng, f: PrimeField, s: Size) -> Value {
    let b1 = gen_b1(rng, f, s);
    let extra = rng.gen_range(0..=s.max_levels);
    let bp = generate_iterated_barcode(&b1, extra, rng.gen());
    json!({ "b1": b1, "bp": bp })
}

fn check_barcode_pair(v: &Value) -> Result<Outcome> {
    let b1: Barcode = parse(v, "b1")?;
    let bp: Barcode = parse(v, "bp")?;
    let r = smith_barcode_check(&b1, &bp)?;
    Ok(Outcome::new(
        r.holds(),
        format!(
            "{} m-violations, {} window violations of {}, beta_tot {} -> {}",
            r.m_violations.len(),
            r.window_violations.len(),
            r.windows_checked,
            r.beta_tot_1,
            r.beta_tot_p
        ),
    ))
}

fn gen_adversarial_pair(rng: &mut ChaCha8Rng, f: PrimeField, s: Size) -> Value {
    let mut b1 = gen_b1(rng, f, s);
    if b1.is_empty() {
        b1 = Barcode::new(f.p() as u64, vec![Bar::finite(Rational::from_integer(0), Rational::from_integer(1), 1)])
            .expect("valid");
    }
    let scaled = b1.scaled(Rational::from_integer(f.p() as i64));
    let bp = scaled.without_one(rng.gen_range(0..scaled.bars.len()));
    json!({ "b1": b1, "bp": bp })
}

fn check_adversarial_pair(v: &Value) -> Result<Outcome> {
    let b1: Barcode = parse(v, "b1")?;
    let bp: Barcode = parse(v, "bp")?;
    let r = smith_barcode_check(&b1, &bp)?;
    let flagged = r.m_violations.len() + r.window_violations.len() + (!r.beta_scaling_holds) as usize;
    Ok(Outcome::new(!r.holds(), format!("{flagged} violations flagged")))
}

fn gen_torsion(rng: &mut ChaCha8Rng, f: PrimeField, s: Size) -> Value {
    let b = if rng.gen_bool(0.25) {
        crate::generate::identity_barcode(f.p(), rng.gen_range(1..=4))
    } else {
        let mut b = gen_b1(rng, f, s);
        if b.infinite_bars().next().is_none() {
            let start = Rational::new(rng.gen_range(-6..=6), rng.gen_range(1..=3));
            b = b.union(&Barcode::new(f.p() as u64, vec![Bar::infinite(start, 1)]).expect("valid"));
        }
        b
    };
    to_value(&b)
}

fn check_torsion(v: &Value) -> Result<Outcome> {
    let b: Barcode = parse(v, "")?;
    let (c_plus, c_minus) = c_plus_minus(&b)?;
    let zero = Rational::from_integer(0);
    let normalized = b.bars.iter().all(|x| x.start == zero && x.end.is_none());
    let w = torsion_witness(&b)?;
    let pass = match &w {
        None => normalized,
        Some(w) => !normalized && w.dim >= 1 && w.window.closure_avoids(&zero) && window_dim(&b, &w.window)? == w.dim,
    };
    let pass = pass && (c_plus <= c_minus || w.is_some());
    Ok(Outcome::new(
        pass,
        match w {
            Some(w) => format!("witness {} of dim {}", w.window, w.dim),
            None => "no witness".into(),
        },
    ))
}

fn gen_constants(rng: &mut ChaCha8Rng, f: PrimeField, s: Size) -> Value {
    json!({ "p": f.p(), "n": rng.gen_range(0..=s.max_dim as u64), "length": rng.gen_range(2..=10) })
}

fn check_constants(v: &Value) -> Result<Outcome> {
    let p: u64 = parse(v, "p")?;
    let n: u64 = parse(v, "n")?;
    let length: u32 = parse(v, "length")?;
    let f = PrimeField::new(p)?;
    let w = wilson_constant(f);
    let e = local_euler_constant(n, f);
    let sign = f.sign(n);
    let r = resolution_homology(f, length.max(2));
    let pass = w.value() as u64 == p - 1
        && e.sign.value() == sign
        && e.u_exponent == n * (p - 1)
        && r.is_acyclic_resolution();
    Ok(Outcome::new(
        pass,
        format!("wilson {}, sign {}, exponent {}, resolution {:?}", w.value(), e.sign.value(), e.u_exponent, r.dims),
    ))
}

/// A failing instance in replayable form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reproducer {
    pub op: String,
    pub p: u32,
    pub instance: Value,
}

impl Reproducer {
    pub fn replay(&self) -> Result<Outcome> {
        property(&self.op)?.check(&self.instance)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FuzzFailure {
    pub index: usize,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct FuzzReport {
    pub op: String,
    pub seed: u64,
    pub count: usize,
    pub primes: Vec<u64>,
    pub passed: usize,
    pub failed: usize,
    /// Instances rejected as invalid by the checker; should stay 0.
    pub invalid: usize,
    pub failures: Vec<FuzzFailure>,
    /// The first failure, minimized.
    pub reproducer: Option<Reproducer>,
    pub minimized_detail: Option<String>,
}

impl FuzzReport {
    pub fn all_pass(&self) -> bool {
        self.failed == 0 && self.invalid == 0
    }
}

#[derive(Clone, Debug)]
pub struct FuzzConfig {
    pub op: String,
    pub seed: u64,
    pub count: usize,
    pub primes: Option<Vec<u64>>,
    pub max_dim: Option<usize>,
    pub max_levels: Option<usize>,
}

/// Deterministic for a fixed config: instance `k` is generated from the
/// `k`-th seed drawn from the master seed, and results are aggregated in
/// index order regardless of scheduling.
pub fn run_fuzz(cfg: &FuzzConfig) -> Result<FuzzReport> {
    let prop = property(&cfg.op)?;
    let primes = cfg.primes.clone().unwrap_or_else(|| prop.default_primes.to_vec());
    for &p in &primes {
        PrimeField::new(p)?;
    }
    if primes.is_empty() {
        return Err(Error::malformed("p", "no primes given"));
    }
    let size = Size {
        max_dim: cfg.max_dim.unwrap_or(prop.default_size.max_dim),
        max_levels: cfg.max_levels.unwrap_or(prop.default_size.max_levels),
    };
    let mut master = ChaCha8Rng::seed_from_u64(cfg.seed);
    let seeds: Vec<u64> = (0..cfg.count).map(|_| master.gen()).collect();
    let results: Vec<(Value, u32, Result<Outcome>)> = seeds
        .par_iter()
        .map(|&s| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let field = random_field(&mut rng, &primes);
            let inst = prop.generate(&mut rng, field, size);
            let out = prop.check(&inst);
            (inst, field.p(), out)
        })
        .collect();
    let mut passed = 0;
    let mut invalid = 0;
    let mut failures = Vec::new();
    let mut first: Option<(Value, u32)> = None;
    for (index, (inst, p, out)) in results.into_iter().enumerate() {
        match out {
            Ok(o) if o.pass => passed += 1,
            Ok(o) => {
                failures.push(FuzzFailure { index, detail: o.detail });
                if first.is_none() {
                    first = Some((inst, p));
                }
            }
            Err(e) => {
                invalid += 1;
                failures.push(FuzzFailure { index, detail: format!("invalid instance: {e}") });
            }
        }
    }
    let (reproducer, minimized_detail) = match first {
        Some((inst, p)) => {
            let (min, detail) = minimize(prop, inst);
            (Some(Reproducer { op: prop.name.into(), p, instance: min }), Some(detail))
        }
        None => (None, None),
    };
    Ok(FuzzReport {
        op: prop.name.into(),
        seed: cfg.seed,
        count: cfg.count,
        primes,
        passed,
        failed: failures.len() - invalid,
        invalid,
        failures,
        reproducer,
        minimized_detail,
    })
}

fn fails(prop: &Property, v: &Value) -> Option<String> {
    match prop.check(v) {
        Ok(o) if !o.pass => Some(o.detail),
        _ => None,
    }
}

/// Greedy deletion of generators and bars while the instance keeps failing.
pub fn minimize(prop: &Property, mut inst: Value) -> (Value, String) {
    let mut detail = fails(prop, &inst).unwrap_or_default();
    'outer: loop {
        for cand in shrink_candidates(&inst) {
            if let Some(d) = fails(prop, &cand) {
                inst = cand;
                detail = d;
                continue 'outer;
            }
        }
        return (inst, detail);
    }
}

fn shrink_candidates(v: &Value) -> Vec<Value> {
    let mut out = Vec::new();
    if let Some(gens) = v.get("generators").and_then(Value::as_array) {
        for g in gens {
            if let Some(id) = g.get("id").and_then(Value::as_str) {
                out.push(without_generator(v, id));
            }
        }
    }
    if let Some(bars) = v.get("bars").and_then(Value::as_array) {
        for i in 0..bars.len() {
            let mut c = v.clone();
            c["bars"].as_array_mut().expect("array").remove(i);
            out.push(c);
        }
    }
    if let Some(obj) = v.as_object() {
        for (k, inner) in obj {
            if inner.is_object() {
                for sub in shrink_candidates(inner) {
                    let mut c = v.clone();
                    c[k] = sub;
                    out.push(c);
                }
            }
        }
        if let Some(ws) = obj.get("windows").and_then(Value::as_array) {
            for i in 0..ws.len() {
                let mut c = v.clone();
                c["windows"].as_array_mut().expect("array").remove(i);
                out.push(c);
            }
        }
        if let Some(h) = obj.get("hf_dim").and_then(Value::as_u64) {
            if h > 0 {
                let mut c = v.clone();
                c["hf_dim"] = json!(h - 1);
                out.push(c);
            }
        }
    }
    out
}

fn without_generator(v: &Value, id: &str) -> Value {
    let mut c = v.clone();
    let keep = |e: &Value| {
        e.as_array()
            .is_none_or(|t| t.iter().take(2).all(|x| x.as_str() != Some(id)))
    };
    if let Some(gens) = c.get_mut("generators").and_then(Value::as_array_mut) {
        gens.retain(|g| g.get("id").and_then(Value::as_str) != Some(id));
    }
    for key in ["d", "sigma"] {
        if let Some(es) = c.get_mut(key).and_then(Value::as_array_mut) {
            es.retain(|e| keep(e));
        }
    }
    if let Some(terms) = c.get_mut("d_terms").and_then(Value::as_array_mut) {
        for t in terms {
            if let Some(es) = t.get_mut("matrix").and_then(Value::as_array_mut) {
                es.retain(|e| keep(e));
            }
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(op: &str, seed: u64, count: usize) -> FuzzConfig {
        FuzzConfig {
            op: op.into(),
            seed,
            count,
            primes: None,
            max_dim: None,
            max_levels: None,
        }
    }

    #[test]
    fn every_sound_property_passes_briefly() {
        for prop in REGISTRY.iter().filter(|p| !p.exploratory) {
            let r = run_fuzz(&cfg(prop.name, 11, 12)).unwrap();
            assert!(r.all_pass(), "{}: {:?}", prop.name, r.failures);
        }
    }

    #[test]
    fn exploratory_property_fails_and_reproduces() {
        let r = run_fuzz(&cfg("sharpened-from-classical", 3, 40)).unwrap();
        assert!(r.failed > 0 && r.invalid == 0);
        let rep = r.reproducer.unwrap();
        assert!(!rep.replay().unwrap().pass);
        let text = serde_json::to_string(&rep).unwrap();
        let back: Reproducer = serde_json::from_str(&text).unwrap();
        assert!(!back.replay().unwrap().pass);
    }

    #[test]
    fn same_seed_same_report() {
        let a = serde_json::to_string(&run_fuzz(&cfg("barcode-smith", 5, 20)).unwrap()).unwrap();
        let b = serde_json::to_string(&run_fuzz(&cfg("barcode-smith", 5, 20)).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unknown_property() {
        assert!(property("nope").is_err());
    }
}
