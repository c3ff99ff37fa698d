//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::Value;

use smith_tate::equivariant_complex::{ActionWindow, CochainComplex, EquivariantComplex};
use smith_tate::fp_core::{FpMatrix, PrimeField};
use smith_tate::fuzz::{run_fuzz, FuzzConfig, Reproducer};
use smith_tate::generate::{
    identity_barcode, random_barcode, random_equivariant_complex, random_filtered_complex, random_free_complex,
    random_model, random_multiplicities, random_sigma, sigma_with_multiplicities,
};
use smith_tate::module_decomp::{decompose, smith_chain_check, tate_and_invariant_dims};
use smith_tate::morse_bzp::{local_euler_constant, resolution_homology, wilson_constant};
use smith_tate::persistence::{
    barcode_from_filtered, c_plus_minus, complex_from_barcode, generate_iterated_barcode, smith_barcode_check,
    torsion_witness, window_dim, Bar, Barcode,
};
use smith_tate::rational::Rational;
use smith_tate::spectral::{action_ss_pages, algebraic_ss_pages, EquivariantFloerModel, FilteredComplex};
use smith_tate::tate::{group_cohomology_dims, quasi_frobenius, tate_cohomology_dims};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn rng_for(criterion: u64, i: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(criterion * 1_000_003 + i as u64)
}

fn field(rng: &mut ChaCha8Rng, primes: &[u64]) -> PrimeField {
    PrimeField::new(primes[rng.gen_range(0..primes.len())]).unwrap()
}

/// Counts failures of `f` over `n` seeded instances, keeping the first message.
fn sweep<F>(criterion: u64, n: usize, f: F) -> (usize, Option<String>)
where
    F: Fn(&mut ChaCha8Rng) -> Result<(), String> + Sync,
{
    let errs: Vec<String> = (0..n)
        .into_par_iter()
        .filter_map(|i| f(&mut rng_for(criterion, i)).err().map(|e| format!("#{i}: {e}")))
        .collect();
    let first = errs.first().cloned();
    (errs.len(), first)
}

fn summarize(n: usize, (bad, first): (usize, Option<String>)) -> Verdict {
    match first {
        None => verdict(true, format!("{n}/{n}")),
        Some(e) => verdict(false, format!("{bad}/{n} failed, first {e}")),
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Tate cohomology of a bounded complex read off from group cohomology two
/// degrees above the top.
fn tate_via_group_cohomology(v: &EquivariantComplex) -> Result<(usize, usize), String> {
    let top = v.complex().degree_range().map_or(0, |(_, hi)| hi);
    let dims = group_cohomology_dims(v, top + 3).map_err(err)?;
    let at = |k: i64| dims.iter().find(|(d, _)| *d == k).map(|x| x.1).unwrap_or(0);
    let (a, b) = (at(top + 2), at(top + 3));
    Ok(if (top + 2).rem_euclid(2) == 0 { (a, b) } else { (b, a) })
}

fn c1_free_tate_vanishing() -> Verdict {
    let start = Instant::now();
    let res = sweep(1, 500, |rng| {
        let f = field(rng, &[2, 3, 5, 7]);
        let v = random_free_complex(rng, f, 21);
        if v.dim() > 21 {
            return Err(format!("dim {}", v.dim()));
        }
        let d = decompose(v.sigma()).map_err(err)?;
        if d.non_free() != 0 {
            return Err(format!("not free: {:?}", d.multiplicities));
        }
        let t = tate_cohomology_dims(&v).map_err(err)?;
        let g = tate_via_group_cohomology(&v)?;
        if (t.even, t.odd) != (0, 0) || g != (0, 0) {
            return Err(format!("tate ({}, {}), group cohomology {g:?}", t.even, t.odd));
        }
        Ok(())
    });
    timed(summarize(500, res), start, 10)
}

fn timed(mut v: Verdict, start: Instant, limit_s: u64) -> Verdict {
    let el = start.elapsed();
    if el > Duration::from_secs(limit_s) {
        v.pass = false;
    }
    v.detail = format!("{}, {:.2}s (limit {limit_s}s)", v.detail, el.as_secs_f64());
    v
}

fn c2_quasi_frobenius() -> Verdict {
    let start = Instant::now();
    let results: Vec<Result<usize, String>> = (0..200)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(2, i);
            let f = field(&mut rng, &[3, 5]);
            let c = random_filtered_complex(&mut rng, f, 6, 4).complex;
            let h = c.total_homology_dim();
            let q = quasi_frobenius(&c, 2, rng.gen()).map_err(err)?;
            let ok = q.is_bijective
                && q.homology_dim == h
                && q.domain_dims.even == h
                && q.domain_dims.odd == h
                && q.target_dims.even == h
                && q.target_dims.odd == h
                && q.chain_level.as_ref().is_none_or(|cl| cl.images_independent && cl.images_are_cocycles);
            if !ok {
                return Err(format!("#{i}: dim H {h}, bijective {}", q.is_bijective));
            }
            if !q.all_certificates_hold() {
                return Err(format!("#{i}: certificate failed"));
            }
            Ok(q.certificates.len())
        })
        .collect();
    let certs: usize = results.iter().filter_map(|r| r.as_ref().ok()).sum();
    let first = results.iter().find_map(|r| r.as_ref().err().cloned());
    let v = match first {
        Some(e) => verdict(false, e),
        None => verdict(certs >= 200, format!("200/200 bijective, {certs} certificates")),
    };
    timed(v, start, 30)
}

fn c3_module_bookkeeping() -> Verdict {
    let res = sweep(3, 500, |rng| {
        let f = field(rng, &[2, 3, 5, 7]);
        let dim = rng.gen_range(1..=16);
        let s = random_sigma(rng, f, dim);
        let d = decompose(&s.sigma).map_err(err)?;
        if d.multiplicities != s.multiplicities {
            return Err(format!("planted {:?}, found {:?}", s.multiplicities, d.multiplicities));
        }
        let closed = tate_and_invariant_dims(&d);
        let tate = tate_cohomology_dims(&EquivariantComplex::module(s.sigma.clone())).map_err(err)?.total();
        let invariants = dim - s.sigma.sub(&FpMatrix::identity(f, dim)).rank();
        if closed.tate_dim != tate || closed.invariant_dim != invariants {
            return Err(format!(
                "closed ({}, {}), direct ({tate}, {invariants})",
                closed.tate_dim, closed.invariant_dim
            ));
        }
        Ok(())
    });
    summarize(500, res)
}

fn c4_sharpened_vs_classical() -> Verdict {
    let res = sweep(4, 400, |rng| {
        let f = field(rng, &[2, 3, 5, 7]);
        let p = f.p() as usize;
        let dim = rng.gen_range(1..=14);
        let mut m = random_multiplicities(rng, p, dim);
        let want_free = rng.gen_bool(0.5);
        if want_free && m[p - 1] == 0 {
            m[p - 1] = 1;
        } else if !want_free {
            let free = std::mem::take(&mut m[p - 1]);
            m[0] += free * p;
        }
        let s = sigma_with_multiplicities(rng, f, &m);
        let r = smith_chain_check(0, &s.sigma).map_err(err)?;
        let ok = if want_free {
            r.sharpened_bound < r.invariant_dim && r.sharpened_bound + m[p - 1] == r.invariant_dim
        } else {
            r.sharpened_bound == r.invariant_dim
        };
        if !ok || r.strictly_stronger != want_free {
            return Err(format!("m = {m:?}: sharpened {}, invariant {}", r.sharpened_bound, r.invariant_dim));
        }
        Ok(())
    });
    summarize(400, res)
}

fn c5_spectral() -> Verdict {
    let start = Instant::now();
    let filtered = sweep(5, 200, |rng| {
        let f = field(rng, &[2, 3, 5, 7]);
        let c = random_filtered_complex(rng, f, 15, 6).complex;
        let brute = c.total_homology_dim();
        let pages = action_ss_pages(&FilteredComplex::from_action(c).map_err(err)?);
        if !pages.all_checks_hold() || pages.e_infinity_total != brute {
            return Err(format!("E_inf {}, homology {brute}", pages.e_infinity_total));
        }
        Ok(())
    });
    let genuine = sweep(50, 200, |rng| {
        let f = field(rng, &[2, 3, 5, 7]);
        let v = random_equivariant_complex(rng, f, 10);
        let m = EquivariantFloerModel::from_equivariant(&v).map_err(err)?;
        let r = algebraic_ss_pages(&m).map_err(err)?;
        let tate = tate_cohomology_dims(&v).map_err(err)?;
        if r.e1.matches_sigma != Some(true) {
            return Err("E_1 differentials differ from 1 - sigma, N".into());
        }
        let s = r.sigma_tate.ok_or("sigma missing from the model")?;
        if (r.e2_tate.even, r.e2_tate.odd) != (s.even, s.odd) {
            return Err("E_2 differs from Tate cohomology of H(V)".into());
        }
        if !r.tate_bound_holds || (r.e_infinity.even, r.e_infinity.odd) != (tate.even, tate.odd) {
            return Err(format!(
                "E_inf ({}, {}), Tate ({}, {})",
                r.e_infinity.even, r.e_infinity.odd, tate.even, tate.odd
            ));
        }
        Ok(())
    });
    let models = sweep(51, 200, |rng| {
        let f = field(rng, &[2, 3, 5, 7]);
        let r = algebraic_ss_pages(&random_model(rng, f, 10)).map_err(err)?;
        if !r.tate_bound_holds || r.e1.matches_sigma == Some(false) {
            return Err("Tate bound or E_1 check failed".into());
        }
        Ok(())
    });
    let (bad, first) = [filtered, genuine, models]
        .into_iter()
        .fold((0, None), |(b, f), (b2, f2)| (b + b2, f.or(f2)));
    let v = if bad == 0 {
        verdict(true, "200 filtered complexes, 200 genuine models, 200 conjugated models")
    } else {
        verdict(false, format!("{bad} failures, first {}", first.unwrap_or_default()))
    };
    timed(v, start, 60)
}

/// Windows with endpoints strictly between consecutive actions.
fn random_windows(rng: &mut ChaCha8Rng, c: &CochainComplex, count: usize) -> Vec<ActionWindow> {
    let mut acts: Vec<Rational> = c.generators().iter().map(|g| g.action).collect();
    acts.sort();
    acts.dedup();
    let two = Rational::from_integer(2);
    let mut cuts: Vec<Option<Rational>> = vec![None];
    if let (Some(lo), Some(hi)) = (acts.first(), acts.last()) {
        cuts.push(Some(*lo - 1));
        cuts.push(Some(*hi + 1));
    }
    cuts.extend(acts.windows(2).map(|w| Some((w[0] + w[1]) / two)));
    (0..count)
        .map(|_| {
            let x = cuts[rng.gen_range(0..cuts.len())];
            let y = cuts[rng.gen_range(0..cuts.len())];
            match (x, y) {
                (Some(x), Some(y)) if x < y => ActionWindow { a: Some(x), b: Some(y) },
                (Some(x), Some(y)) if x > y => ActionWindow { a: Some(y), b: Some(x) },
                (Some(x), _) | (None, Some(x)) => {
                    if rng.gen_bool(0.5) {
                        ActionWindow { a: None, b: Some(x) }
                    } else {
                        ActionWindow { a: Some(x), b: None }
                    }
                }
                (None, None) => ActionWindow::everything(),
            }
        })
        .collect()
}

fn c6_barcode_structure() -> Verdict {
    let res = sweep(6, 300, |rng| {
        let f = field(rng, &[2, 3, 5, 7]);
        let planted = random_filtered_complex(rng, f, 12, 6);
        let c = planted.complex;
        let b = barcode_from_filtered(&c).map_err(err)?;
        if b != planted.barcode {
            return Err("barcode differs from the planted one".into());
        }
        for w in random_windows(rng, &c, 20) {
            let from_bars = window_dim(&b, &w).map_err(err)?;
            let direct = c.window_truncate(&w).map_err(err)?.total_homology_dim();
            if from_bars != direct {
                return Err(format!("{w}: barcode {from_bars}, homology {direct}"));
            }
        }
        Ok(())
    });
    summarize(300, res)
}

fn c7_barcode_smith() -> Verdict {
    let pairs = sweep(7, 1000, |rng| {
        let f = field(rng, &[2, 3, 5, 7]);
        let b1 = random_barcode(rng, f.p(), 8);
        let bp = generate_iterated_barcode(&b1, rng.gen_range(0..=4), rng.gen());
        let r = smith_barcode_check(&b1, &bp).map_err(err)?;
        if !r.holds() {
            return Err(format!(
                "{} m-violations, {} window violations",
                r.m_violations.len(),
                r.window_violations.len()
            ));
        }
        Ok(())
    });
    let adversarial = sweep(70, 100, |rng| {
        let f = field(rng, &[2, 3, 5, 7]);
        let mut b1 = random_barcode(rng, f.p(), 8);
        if b1.is_empty() {
            b1 = Barcode::new(f.p() as u64, vec![Bar::finite(Rational::from_integer(0), Rational::from_integer(1), 1)])
                .unwrap();
        }
        let scaled = b1.scaled(Rational::from_integer(f.p() as i64));
        let bp = scaled.without_one(rng.gen_range(0..scaled.bars.len()));
        let r = smith_barcode_check(&b1, &bp).map_err(err)?;
        if r.holds() {
            return Err("deleted bar not flagged".into());
        }
        Ok(())
    });
    match (pairs, adversarial) {
        ((0, _), (0, _)) => verdict(true, "1000/1000 iterated pairs pass, 100/100 adversarial pairs flagged"),
        ((a, fa), (b, fb)) => verdict(
            false,
            format!("{a} iterated failures, {b} adversarial misses, first {}", fa.or(fb).unwrap_or_default()),
        ),
    }
}

fn c8_torsion() -> Verdict {
    let zero = Rational::from_integer(0);
    let res = sweep(8, 200, |rng| {
        let f = field(rng, &[2, 3, 5, 7]);
        let b = if rng.gen_bool(0.25) {
            identity_barcode(f.p(), rng.gen_range(1..=4))
        } else {
            let mut b = random_barcode(rng, f.p(), 8);
            if b.infinite_bars().next().is_none() {
                let s = Rational::new(rng.gen_range(-6..=6), rng.gen_range(1..=3));
                b = b.union(&Barcode::new(f.p() as u64, vec![Bar::infinite(s, 1)]).unwrap());
            }
            b
        };
        let identity = b.bars.iter().all(|x| x.start == zero && x.end.is_none());
        let (c_plus, c_minus) = c_plus_minus(&b).map_err(err)?;
        let w = torsion_witness(&b).map_err(err)?;
        match (&w, identity) {
            (Some(_), true) => return Err("witness for an identity barcode".into()),
            (None, false) if c_plus > c_minus => return Err("c+ > c- without a witness".into()),
            _ => {}
        }
        if let Some(w) = w {
            let direct = complex_from_barcode(&b).window_truncate(&w.window).map_err(err)?.total_homology_dim();
            if w.dim < 1 || direct != w.dim || !w.window.closure_avoids(&zero) {
                return Err(format!("witness {} of dim {} (direct {direct})", w.window, w.dim));
            }
        }
        Ok(())
    });
    summarize(200, res)
}

fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&k| (2..k).take_while(|d| d * d <= k).all(|d| k % d != 0)).collect()
}

fn c9_constants() -> Verdict {
    let start = Instant::now();
    let mut bad = Vec::new();
    for p in primes_up_to(97) {
        let f = PrimeField::new(p).unwrap();
        let factorial = (1..p).fold(1u64, |acc, k| acc * k % p);
        let w = wilson_constant(f).value() as u64;
        if w != p - 1 || w != factorial {
            bad.push(format!("wilson({p}) = {w}"));
        }
        if p <= 31 {
            for n in 0..=20u64 {
                let want = if n % 2 == 0 { 1 } else { p - 1 };
                let e = local_euler_constant(n, f);
                if e.sign.value() as u64 != want % p || e.u_exponent != n * (p - 1) {
                    bad.push(format!("euler({n}, {p})"));
                }
            }
        }
    }
    for p in [2, 3, 5, 7] {
        let r = resolution_homology(PrimeField::new(p).unwrap(), 10);
        if r.dims.len() != 10 || !r.is_acyclic_resolution() {
            bad.push(format!("resolution({p}) = {:?}", r.dims));
        }
    }
    let v = if bad.is_empty() {
        verdict(true, "primes <= 97, n <= 20, resolution length 10")
    } else {
        verdict(false, bad.join("; "))
    };
    timed(v, start, 1)
}

fn without_timing(stdout: &str) -> Value {
    let mut v: Value = serde_json::from_str(stdout).expect("JSON report");
    v.as_object_mut().unwrap().remove("timing");
    v
}

fn cli(args: &[&str]) -> (i32, String) {
    let out = smith_tate_cli::dispatch(std::iter::once("smith-tate").chain(args.iter().copied()));
    (out.code, out.stdout)
}

fn c10_cli_determinism() -> Verdict {
    let mut bad = Vec::new();
    for op in ["barcode-smith", "module-decomp", "sharpened-from-classical", "torsion"] {
        let args = ["--json", "fuzz", "--op", op, "--seed", "17", "--count", "40"];
        let (c1, a) = cli(&args);
        let (c2, b) = cli(&args);
        if c1 != c2 || without_timing(&a) != without_timing(&b) {
            bad.push(format!("{op}: reports differ"));
        }
        let (c3, c) = cli(&["--json", "fuzz", "--op", op, "--seed", "18", "--count", "40"]);
        if c3 == c1 && without_timing(&a) == without_timing(&c) && op != "torsion" {
            bad.push(format!("{op}: seed has no effect"));
        }
    }
    let dir = std::env::temp_dir().join(format!("smith-tate-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut replays = 0;
    for seed in 0..10u64 {
        let cfg = FuzzConfig {
            op: "sharpened-from-classical".into(),
            seed,
            count: 30,
            primes: None,
            max_dim: None,
            max_levels: None,
        };
        let rep = run_fuzz(&cfg).unwrap();
        let Some(r) = rep.reproducer else { continue };
        let path = dir.join(format!("r{seed}.json"));
        std::fs::write(&path, serde_json::to_string(&r).unwrap()).unwrap();
        let back: Reproducer = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        let direct = back.replay().map(|o| o.pass);
        let (code, _) = cli(&["fuzz", "--replay", path.to_str().unwrap()]);
        if !matches!(direct, Ok(false)) || code != 1 {
            bad.push(format!("seed {seed}: replay passed (exit {code})"));
        }
        replays += 1;
    }
    let _ = std::fs::remove_dir_all(&dir);
    if replays == 0 {
        bad.push("no reproducer produced".into());
    }
    if bad.is_empty() {
        verdict(true, format!("4 ops reproducible by seed, {replays}/{replays} reproducers re-fail"))
    } else {
        verdict(false, bad.join("; "))
    }
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 10] = [
        ("1 Tate vanishing on free modules", c1_free_tate_vanishing),
        ("2 quasi-Frobenius isomorphism", c2_quasi_frobenius),
        ("3 module bookkeeping", c3_module_bookkeeping),
        ("4 sharpened vs classical bound", c4_sharpened_vs_classical),
        ("5 spectral sequence convergence", c5_spectral),
        ("6 barcode structure", c6_barcode_structure),
        ("7 barcode Smith inequalities", c7_barcode_smith),
        ("8 torsion detector", c8_torsion),
        ("9 constants", c9_constants),
        ("10 CLI determinism", c10_cli_determinism),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let v = run();
        println!("{} {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        failed += usize::from(!v.pass);
    }
    println!("{}/{} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
