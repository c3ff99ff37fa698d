use std::fs;
use std::path::Path;

use serde_json::{json, Value};

use smith_tate::equivariant_complex::{ActionWindow, ComplexJson, EquivariantComplex};
use smith_tate::fp_core::{FpMatrix, PrimeField};
use smith_tate::fuzz::{property, run_fuzz, FuzzConfig, Reproducer, REGISTRY};
use smith_tate::module_decomp::{decompose, smith_chain_check, tate_and_invariant_dims};
use smith_tate::morse_bzp::{enumerate_critical_points, local_euler_constant, resolution_homology, wilson_constant};
use smith_tate::persistence::{
    bar_stats, barcode_from_filtered, c_plus_minus, gamma_bound_holds, smith_barcode_check, torsion_witness,
    window_dim, Barcode,
};
use smith_tate::rational::{format_rational, parse_rational, Rational};
use smith_tate::spectral::{action_ss_pages, algebraic_ss_pages, FilteredComplex, ModelJson};
use smith_tate::tate::{
    default_max_degree, group_cohomology_dims, quasi_frobenius, tate_cohomology_dims, TateComplexView,
};
use smith_tate::{Error, Result};

use crate::report::{digest, Report};
use crate::{Command, FuzzArgs, SpectralKind};

pub fn name(c: &Command) -> &'static str {
    match c {
        Command::Tate(_) => "tate",
        Command::GroupCohomology { .. } => "group-cohomology",
        Command::QuasiFrobenius { .. } => "quasi-frobenius",
        Command::Decompose { .. } => "decompose",
        Command::SmithCheck { .. } => "smith-check",
        Command::Spectral { kind: SpectralKind::Action(_) } => "spectral action",
        Command::Spectral { kind: SpectralKind::Algebraic(_) } => "spectral algebraic",
        Command::Barcode { .. } => "barcode",
        Command::BarcodeSmith { .. } => "barcode-smith",
        Command::Torsion { .. } => "torsion",
        Command::MorseConstants { .. } => "morse-constants",
        Command::Fuzz(_) => "fuzz",
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::malformed(path.display().to_string(), e.to_string()))
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::malformed(path.display().to_string(), e.to_string()))
}

fn load_equivariant(path: &Path, text: &str) -> Result<EquivariantComplex> {
    let c = parse_json::<ComplexJson>(path, text)?.to_equivariant()?;
    c.ensure_valid()?;
    Ok(c)
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn parse_end(s: &str) -> Result<Option<Rational>> {
    match s.trim() {
        "-inf" | "inf" | "+inf" | "" => Ok(None),
        t => parse_rational(t).map(Some),
    }
}

fn parse_window(s: &str) -> Result<ActionWindow> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| Error::malformed("window", format!("expected a:b, got {s:?}")))?;
    if a.trim() == "inf" || a.trim() == "+inf" || b.trim() == "-inf" {
        return Err(Error::InadmissibleWindow(s.to_string()));
    }
    ActionWindow::new(parse_end(a)?, parse_end(b)?)
}

pub fn execute(cmd: &Command) -> Result<Report> {
    match cmd {
        Command::Tate(input) => tate(&input.input),
        Command::GroupCohomology { input, max_degree } => group_cohomology(&input.input, *max_degree),
        Command::QuasiFrobenius { input, certificates, seed } => qf(&input.input, *certificates, *seed),
        Command::Decompose { sigma } => decompose_cmd(sigma),
        Command::SmithCheck { hf_dim, sigma } => smith_check(*hf_dim, sigma),
        Command::Spectral { kind: SpectralKind::Action(i) } => spectral_action(&i.input),
        Command::Spectral { kind: SpectralKind::Algebraic(i) } => spectral_algebraic(&i.input),
        Command::Barcode { input, windows } => barcode(&input.input, windows),
        Command::BarcodeSmith { b1, bp } => barcode_smith(b1, bp),
        Command::Torsion { input, gamma } => torsion(&input.input, gamma.as_deref()),
        Command::MorseConstants { p, n_max, length } => morse_constants(*p, *n_max, *length),
        Command::Fuzz(args) => fuzz(args),
    }
}

fn tate(path: &Path) -> Result<Report> {
    let text = read(path)?;
    let v = load_equivariant(path, &text)?;
    let mut r = Report::new("tate", digest([text.as_bytes()]));
    let view = TateComplexView::new(&v)?;
    let t = view.dims();
    let h = v.complex().homology_dims();
    r.results = json!({
        "p": v.p(),
        "dim": v.dim(),
        "tate": {"even": t.even, "odd": t.odd},
        "homology": h,
        "decomposition": decompose(v.sigma())?.multiplicities,
    });
    r.check("tate differential squares to zero", view.squares_to_zero(), "");
    r.check(
        "dim Tate <= dim H(V)",
        t.total() <= 2 * v.complex().total_homology_dim(),
        format!("{} <= 2 * {}", t.total(), v.complex().total_homology_dim()),
    );
    Ok(r)
}

fn group_cohomology(path: &Path, max_degree: Option<i64>) -> Result<Report> {
    let text = read(path)?;
    let v = load_equivariant(path, &text)?;
    let max = max_degree.unwrap_or_else(|| default_max_degree(v.complex()));
    let mut r = Report::new("group-cohomology", digest([text.as_bytes(), max.to_string().as_bytes()]));
    let dims = group_cohomology_dims(&v, max)?;
    let tate = tate_cohomology_dims(&v)?;
    let top = v.complex().degree_range().map_or(0, |(_, hi)| hi);
    let stable: Vec<&(i64, usize)> = dims.iter().filter(|(k, _)| *k >= top + 2).collect();
    let agrees = stable
        .iter()
        .all(|&&(k, d)| d == if k.rem_euclid(2) == 0 { tate.even } else { tate.odd });
    r.results = json!({
        "max_degree": max,
        "dims": dims.iter().map(|(k, d)| json!({"k": k, "dim": d})).collect::<Vec<_>>(),
        "tate": {"even": tate.even, "odd": tate.odd},
    });
    r.check(
        "periodic above the top degree and equal to Tate cohomology",
        agrees,
        format!("{} stable degrees", stable.len()),
    );
    Ok(r)
}

fn qf(path: &Path, certificates: usize, seed: u64) -> Result<Report> {
    let text = read(path)?;
    let c = parse_json::<ComplexJson>(path, &text)?.to_complex()?;
    let mut r = Report::new(
        "quasi-frobenius",
        digest([text.as_bytes(), certificates.to_string().as_bytes(), seed.to_string().as_bytes()]),
    );
    let q = quasi_frobenius(&c, certificates, seed)?;
    r.check("bijective on Tate cohomology", q.is_bijective, "");
    r.check(
        "Tate dims of V and V^(x)p both equal dim H(V) per parity",
        q.dims_match_homology(),
        format!(
            "H = {}, domain ({}, {}), target ({}, {})",
            q.homology_dim, q.domain_dims.even, q.domain_dims.odd, q.target_dims.even, q.target_dims.odd
        ),
    );
    r.check(
        "additivity certificates",
        q.all_certificates_hold(),
        format!("{}/{}", q.certificates.iter().filter(|c| c.holds()).count(), q.certificates.len()),
    );
    if let Some(cl) = &q.chain_level {
        r.check(
            "chain-level images independent in Tate cohomology of V^(x)p",
            cl.images_are_cocycles && cl.images_independent,
            format!("tensor dim {}", cl.tensor_dim),
        );
    }
    r.results = to_value(&q);
    Ok(r)
}

fn decompose_cmd(path: &Path) -> Result<Report> {
    let text = read(path)?;
    let v = load_equivariant(path, &text)?;
    let mut r = Report::new("decompose", digest([text.as_bytes()]));
    let d = decompose(v.sigma())?;
    let closed = tate_and_invariant_dims(&d);
    let tate = tate_cohomology_dims(&EquivariantComplex::module(v.sigma().clone()))?.total();
    let n = v.dim();
    let invariants = n - v.sigma().sub(&FpMatrix::identity(v.field(), n)).rank();
    r.results = json!({
        "p": d.p,
        "multiplicities": d.multiplicities,
        "closed_form": {"tate_dim": closed.tate_dim, "invariant_dim": closed.invariant_dim},
        "direct": {"tate_dim": tate, "invariant_dim": invariants},
    });
    r.check(
        "2(m_1 + .. + m_(p-1)) equals the Tate dimension",
        closed.tate_dim == tate,
        format!("{} vs {tate}", closed.tate_dim),
    );
    r.check(
        "m_1 + .. + m_p equals dim ker(sigma - 1)",
        closed.invariant_dim == invariants,
        format!("{} vs {invariants}", closed.invariant_dim),
    );
    Ok(r)
}

fn smith_check(hf_dim: usize, path: &Path) -> Result<Report> {
    let text = read(path)?;
    let v = load_equivariant(path, &text)?;
    let mut r = Report::new("smith-check", digest([text.as_bytes(), hf_dim.to_string().as_bytes()]));
    let c = smith_chain_check(hf_dim, v.sigma())?;
    r.check(
        "dim HF(phi) <= m_1 + .. + m_(p-1)",
        c.sharpened_holds,
        format!("{hf_dim} <= {}", c.sharpened_bound),
    );
    r.check(
        "dim HF(phi) <= dim HF(phi^p)^(Z/p)",
        c.classical_holds,
        format!("{hf_dim} <= {}", c.invariant_dim),
    );
    r.check("m_1 + .. + m_(p-1) <= dim of invariants", c.sharpened_le_invariant, "");
    r.check("dim of invariants <= dim HF(phi^p)", c.invariant_le_total, "");
    r.results = to_value(&c);
    Ok(r)
}

fn spectral_action(path: &Path) -> Result<Report> {
    let text = read(path)?;
    let c = parse_json::<ComplexJson>(path, &text)?.to_complex()?;
    let mut r = Report::new("spectral action", digest([text.as_bytes()]));
    let brute = c.total_homology_dim();
    let pages = action_ss_pages(&FilteredComplex::from_action(c)?);
    r.check("dim E_(r+1) <= dim E_r", pages.dims_monotone(), "");
    r.check(
        "E_infinity total equals total homology",
        pages.converges() && pages.e_infinity_total == brute,
        format!("{} vs {brute}", pages.e_infinity_total),
    );
    r.check("E_1 is the local cohomology of the levels", pages.e1_is_local(), "");
    r.results = to_value(&pages);
    Ok(r)
}

fn spectral_algebraic(path: &Path) -> Result<Report> {
    let text = read(path)?;
    let m = parse_json::<ModelJson>(path, &text)?.to_model()?;
    let mut r = Report::new("spectral algebraic", digest([text.as_bytes()]));
    let rep = algebraic_ss_pages(&m)?;
    if let Some(ok) = rep.e1.matches_sigma {
        r.check("E_1 differentials are 1 - sigma and N", ok, "");
    }
    r.check(
        "dim E_infinity <= dim E_2",
        rep.tate_bound_holds,
        format!("{} <= {}", rep.e_infinity.total(), rep.e2_tate.total()),
    );
    r.results = to_value(&rep);
    Ok(r)
}

fn barcode(path: &Path, windows: &[String]) -> Result<Report> {
    let text = read(path)?;
    let c = parse_json::<ComplexJson>(path, &text)?.to_complex()?;
    let mut parts: Vec<&[u8]> = vec![text.as_bytes()];
    parts.extend(windows.iter().map(|w| w.as_bytes()));
    let mut r = Report::new("barcode", digest(parts));
    let b = barcode_from_filtered(&c)?;
    let mut dims = Vec::new();
    for w in windows {
        let w = parse_window(w)?;
        let from_bars = window_dim(&b, &w)?;
        let direct = c.window_truncate(&w)?.total_homology_dim();
        r.check(
            format!("window {w}: barcode count equals subquotient homology"),
            from_bars == direct,
            format!("{from_bars} vs {direct}"),
        );
        dims.push(json!({"window": w.to_string(), "dim": from_bars}));
    }
    r.check(
        "infinite bars count total homology",
        b.infinite_bars().map(|x| x.mult).sum::<usize>() == c.total_homology_dim(),
        "",
    );
    r.results = json!({"barcode": b, "stats": bar_stats(&b), "windows": dims});
    Ok(r)
}

fn load_barcode(path: &Path) -> Result<(String, Barcode)> {
    let text = read(path)?;
    let raw: Value = parse_json(path, &text)?;
    let b: Barcode = serde_json::from_value(raw).map_err(|e| Error::malformed(path.display().to_string(), e.to_string()))?;
    Ok((text, b))
}

fn barcode_smith(b1: &Path, bp: &Path) -> Result<Report> {
    let (t1, b1) = load_barcode(b1)?;
    let (tp, bp) = load_barcode(bp)?;
    let mut r = Report::new("barcode-smith", digest([t1.as_bytes(), tp.as_bytes()]));
    let rep = smith_barcode_check(&b1, &bp)?;
    r.check(
        "m(t, B1) <= m(p t, Bp) at every event midpoint",
        rep.m_violations.is_empty(),
        format!("{} test points", rep.test_points),
    );
    r.check(
        "beta_tot(Bp) >= p beta_tot(B1)",
        rep.beta_scaling_holds,
        format!("{} vs {}", format_rational(&rep.beta_tot_p), format_rational(&rep.beta_tot_1)),
    );
    r.check("integrals of m recover beta_tot", rep.integrals_match, "");
    r.check(
        "dim over I of B1 <= dim over pI of Bp",
        rep.window_violations.is_empty(),
        format!("{} windows", rep.windows_checked),
    );
    r.results = to_value(&rep);
    Ok(r)
}

fn torsion(path: &Path, gamma: Option<&str>) -> Result<Report> {
    let (text, b) = load_barcode(path)?;
    let mut r = Report::new(
        "torsion",
        digest([text.as_bytes(), gamma.unwrap_or("").as_bytes()]),
    );
    let (c_plus, c_minus) = c_plus_minus(&b)?;
    let w = torsion_witness(&b)?;
    let zero = Rational::from_integer(0);
    if c_plus > c_minus {
        r.check("c+ > c- yields a witness", w.is_some(), "");
    }
    if let Some(w) = &w {
        r.check(
            "witness window has positive dimension and closure avoiding 0",
            w.dim >= 1 && w.window.closure_avoids(&zero),
            format!("{} of dim {}", w.window, w.dim),
        );
    }
    let mut results = json!({
        "stats": bar_stats(&b),
        "c_plus": format_rational(&c_plus),
        "c_minus": format_rational(&c_minus),
        "witness": w,
    });
    if let Some(g) = gamma {
        let g = parse_rational(g)?;
        let ok = gamma_bound_holds(&b, g);
        r.check("gamma >= longest finite bar", ok, "");
        results["gamma"] = json!(format_rational(&g));
    }
    r.results = results;
    Ok(r)
}

fn morse_constants(p: u64, n_max: u64, length: u32) -> Result<Report> {
    let field = PrimeField::new(p)?;
    let mut r = Report::new(
        "morse-constants",
        digest([p.to_string().as_bytes(), n_max.to_string().as_bytes(), length.to_string().as_bytes()]),
    );
    let w = wilson_constant(field);
    r.check("(p-1)! = -1 mod p", w.is_minus_one(), format!("{}", w.value()));
    let euler: Vec<Value> = (0..=n_max)
        .map(|n| {
            let e = local_euler_constant(n, field);
            json!({"n": n, "sign": e.sign.value(), "u_exponent": e.u_exponent})
        })
        .collect();
    let signs_ok = (0..=n_max).all(|n| local_euler_constant(n, field).sign.value() == field.sign(n));
    r.check("local Euler sign is (-1)^n", signs_ok, format!("n = 0..={n_max}"));
    let res = resolution_homology(field, length);
    r.check(
        "periodic resolution has cohomology F_p in degree 0 only",
        res.is_acyclic_resolution(),
        format!("{:?}", res.dims),
    );
    let l_max = length.saturating_sub(1) / 2;
    let points = enumerate_critical_points(field.p(), l_max);
    let per_index = (0..2 * (l_max + 1))
        .map(|i| points.iter().filter(|c| c.index() == i).count())
        .collect::<Vec<_>>();
    r.check(
        "p critical points of each index",
        per_index.iter().all(|&c| c == p as usize),
        format!("{} points", points.len()),
    );
    r.results = json!({
        "p": p,
        "wilson": w.value(),
        "euler": euler,
        "resolution": res.dims,
        "critical_points_per_index": per_index,
    });
    Ok(r)
}

fn fuzz(args: &FuzzArgs) -> Result<Report> {
    if args.list {
        let mut r = Report::new("fuzz", digest([b"list".as_slice()]));
        r.results = Value::Array(
            REGISTRY
                .iter()
                .map(|p| json!({"name": p.name, "about": p.about, "exploratory": p.exploratory}))
                .collect(),
        );
        return Ok(r);
    }
    if let Some(path) = &args.replay {
        let text = read(path)?;
        let rep: Reproducer = parse_json(path, &text)?;
        let mut r = Report::new("fuzz", digest([text.as_bytes()]));
        let out = rep.replay()?;
        r.check(format!("replay {}", rep.op), out.pass, out.detail.clone());
        r.results = json!({"op": rep.op, "p": rep.p, "outcome": out});
        return Ok(r);
    }
    let op = args.op.clone().expect("clap requires --op");
    property(&op)?;
    let cfg = FuzzConfig {
        op: op.clone(),
        seed: args.seed,
        count: args.count,
        primes: (!args.primes.is_empty()).then(|| args.primes.clone()),
        max_dim: args.max_dim,
        max_levels: args.max_levels,
    };
    let params = format!("{op} {} {} {:?} {:?} {:?}", cfg.seed, cfg.count, cfg.primes, cfg.max_dim, cfg.max_levels);
    let mut r = Report::new("fuzz", digest([params.as_bytes()]));
    let rep = run_fuzz(&cfg)?;
    r.check(
        format!("{op}: all instances pass"),
        rep.all_pass(),
        format!("{}/{} pass", rep.passed, rep.count),
    );
    if let (Some(out), Some(repro)) = (&args.reproducer_out, &rep.reproducer) {
        let text = serde_json::to_string_pretty(repro).expect("serializable");
        fs::write(out, text + "\n").map_err(|e| Error::malformed(out.display().to_string(), e.to_string()))?;
    }
    r.results = to_value(&rep);
    Ok(r)
}
