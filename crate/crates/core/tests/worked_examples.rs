//! Small instances whose answers are known by hand or by brute force.

use smith_tate::equivariant_complex::{ActionWindow, EquivariantComplex};
use smith_tate::fp_core::{FpMatrix, PrimeField};
use smith_tate::module_decomp::{decompose, smith_chain_check, tate_and_invariant_dims};
use smith_tate::morse_bzp::{enumerate_critical_points, local_euler_constant, resolution_homology, wilson_constant};
use smith_tate::persistence::{
    bar_stats, barcode_from_filtered, c_plus_minus, smith_barcode_check, torsion_witness, window_dim, Bar, Barcode,
};
use smith_tate::rational::Rational;
use smith_tate::spectral::{action_ss_pages, FilteredComplex};
use smith_tate::tate::{group_cohomology_dims, quasi_frobenius, tate_cohomology_dims};
use smith_tate::Error;

fn f(p: u64) -> PrimeField {
    PrimeField::new(p).unwrap()
}

fn q(n: i64) -> Rational {
    Rational::from_integer(n)
}

fn cycle(p: u64) -> FpMatrix {
    let n = p as usize;
    let mut m = FpMatrix::zeros(f(p), n, n);
    for i in 0..n {
        m.set((i + 1) % n, i, 1);
    }
    m
}

fn complex(json: &str) -> EquivariantComplex {
    EquivariantComplex::from_json_str(json).unwrap()
}

#[test]
fn kernel_of_rank_one_matrix_by_enumeration() {
    let m = FpMatrix::from_rows(f(5), &[[1, 2], [2, 4]]);
    assert_eq!(m.rank(), 1);
    let zeros: Vec<(u32, u32)> = (0..5)
        .flat_map(|x| (0..5).map(move |y| (x, y)))
        .filter(|&(x, y)| (x + 2 * y) % 5 == 0 && (2 * x + 4 * y) % 5 == 0)
        .collect();
    assert_eq!(zeros.len(), 5);
    let k = m.kernel();
    assert_eq!(k.len(), 1);
    assert!(zeros.contains(&(k[0][0], k[0][1])));
}

#[test]
fn tate_dims_of_basic_modules() {
    let trivial = EquivariantComplex::module(FpMatrix::identity(f(3), 1));
    let t = tate_cohomology_dims(&trivial).unwrap();
    assert_eq!((t.even, t.odd), (1, 1));

    let free = EquivariantComplex::module(cycle(5));
    let t = tate_cohomology_dims(&free).unwrap();
    assert_eq!((t.even, t.odd), (0, 0));

    // F_3[t]/(t^2): sigma = 1 + t, a single Jordan block of size 2.
    let jordan = EquivariantComplex::module(FpMatrix::from_rows(f(3), &[[1, 0], [1, 1]]));
    let t = tate_cohomology_dims(&jordan).unwrap();
    assert_eq!((t.even, t.odd), (1, 1));
}

#[test]
fn group_cohomology_of_trivial_and_free() {
    let trivial = EquivariantComplex::module(FpMatrix::identity(f(3), 1));
    let dims: Vec<usize> = group_cohomology_dims(&trivial, 5).unwrap().into_iter().map(|x| x.1).collect();
    assert_eq!(dims, [1; 6]);
    let free = EquivariantComplex::module(cycle(3));
    let dims: Vec<usize> = group_cohomology_dims(&free, 5).unwrap().into_iter().map(|x| x.1).collect();
    assert_eq!(dims, [1, 0, 0, 0, 0, 0]);
}

#[test]
fn jordan_types() {
    assert_eq!(decompose(&FpMatrix::identity(f(3), 4)).unwrap().multiplicities, [4, 0, 0]);
    assert_eq!(decompose(&cycle(5)).unwrap().multiplicities, [0, 0, 0, 0, 1]);
    let sum = FpMatrix::identity(f(3), 1).direct_sum(&cycle(3));
    assert_eq!(decompose(&sum).unwrap().multiplicities, [1, 0, 1]);
    assert!(matches!(decompose(&FpMatrix::from_rows(f(3), &[[2]])), Err(Error::NotOrderP)));
}

#[test]
fn closed_form_dims() {
    // Two trivial blocks and one block of size 2, in a scrambled basis.
    let s = FpMatrix::from_rows(f(3), &[[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 1, 1]]);
    let d = decompose(&s).unwrap();
    assert_eq!(d.multiplicities, [2, 1, 0]);
    let c = tate_and_invariant_dims(&d);
    assert_eq!((c.tate_dim, c.invariant_dim), (6, 3));
    assert_eq!(tate_cohomology_dims(&EquivariantComplex::module(s)).unwrap().total(), 6);
}

#[test]
fn smith_chains() {
    let r = smith_chain_check(1, &FpMatrix::identity(f(3), 1)).unwrap();
    assert!(r.all_hold());
    assert!(!r.strictly_stronger);

    let r = smith_chain_check(1, &cycle(3)).unwrap();
    assert!(!r.sharpened_holds);
    assert!(r.classical_holds);
    assert_eq!((r.sharpened_bound, r.invariant_dim), (0, 1));

    let s = FpMatrix::identity(f(3), 2).direct_sum(&cycle(3));
    let r = smith_chain_check(2, &s).unwrap();
    assert_eq!((r.sharpened_bound, r.invariant_dim, r.hf_phi_p_dim), (2, 3, 5));
    assert!(r.all_hold());
    assert!(r.strictly_stronger);
}

#[test]
fn frobenius_on_a_point_and_on_an_acyclic_pair() {
    let point = complex(r#"{"p": 3, "generators": [{"id": "v", "degree": 0, "action": "0"}]}"#);
    let qf = quasi_frobenius(point.complex(), 3, 1).unwrap();
    assert!(qf.is_bijective);
    assert_eq!((qf.target_dims.even, qf.target_dims.odd), (1, 1));

    let acyclic = complex(
        r#"{"p": 3, "generators": [{"id": "x", "degree": 0, "action": "1"}, {"id": "y", "degree": 1, "action": "0"}],
            "d": [["y", "x", 1]]}"#,
    );
    let qf = quasi_frobenius(acyclic.complex(), 0, 1).unwrap();
    assert_eq!(qf.homology_dim, 0);
    assert_eq!(qf.target_dims.total(), 0);
    assert!(qf.is_bijective);
}

#[test]
fn additivity_certificates_in_dimension_two() {
    let v = complex(
        r#"{"p": 3, "generators": [{"id": "a", "degree": 0, "action": "0"}, {"id": "b", "degree": 0, "action": "0"}]}"#,
    );
    let qf = quasi_frobenius(v.complex(), 6, 9).unwrap();
    assert!(qf.all_certificates_hold());
    assert!(qf.certificates.iter().all(|c| c.holds()));
}

#[test]
fn action_spectral_sequence_cancels_one_pair() {
    let c = complex(
        r#"{"p": 2, "generators": [{"id": "x", "degree": 0, "action": "1"}, {"id": "y", "degree": 1, "action": "0"}],
            "d": [["y", "x", 1]]}"#,
    );
    let pages = action_ss_pages(&FilteredComplex::from_action(c.complex().clone()).unwrap());
    assert_eq!(pages.pages[0].total, 2);
    assert_eq!(pages.e_infinity_total, 0);
    assert!(pages.all_checks_hold());
}

#[test]
fn barcode_of_cancelling_pair() {
    let c = complex(
        r#"{"p": 5, "generators": [{"id": "x", "degree": 0, "action": "1"}, {"id": "y", "degree": 1, "action": "0"}],
            "d": [["y", "x", 1]]}"#,
    );
    let b = barcode_from_filtered(c.complex()).unwrap();
    assert_eq!(b.bars, [Bar::finite(q(0), q(1), 1)]);
}

#[test]
fn window_counts() {
    let inf = Barcode::new(2, vec![Bar::infinite(q(0), 1)]).unwrap();
    assert_eq!(window_dim(&inf, &ActionWindow::below(q(1))).unwrap(), 1);
    let fin = Barcode::new(2, vec![Bar::finite(q(0), q(2), 1)]).unwrap();
    assert_eq!(window_dim(&fin, &ActionWindow::bounded(q(1), q(3)).unwrap()).unwrap(), 1);
    assert_eq!(window_dim(&Barcode::empty(2), &ActionWindow::everything()).unwrap(), 0);
    assert!(matches!(
        window_dim(&fin, &ActionWindow::bounded(q(0), q(3)).unwrap()),
        Err(Error::SpectralEndpoint(_))
    ));
}

#[test]
fn window_truncation_of_a_three_level_complex() {
    let c = complex(
        r#"{"p": 2, "generators": [
              {"id": "a0", "degree": 0, "action": "0"},
              {"id": "a1", "degree": 1, "action": "1"},
              {"id": "a2", "degree": 0, "action": "2"}],
            "d": [["a1", "a2", 1]]}"#,
    );
    let w = ActionWindow::bounded(Rational::new(1, 2), Rational::new(5, 2)).unwrap();
    let sub = c.complex().window_truncate(&w).unwrap();
    assert_eq!(sub.dim(), 2);
    assert_eq!(sub.total_homology_dim(), 0);
}

#[test]
fn bar_statistics() {
    let b = Barcode::new(3, vec![Bar::infinite(q(0), 3)]).unwrap();
    let s = bar_stats(&b);
    assert_eq!((s.k, s.b, s.n), (0, 3, 3));
    assert_eq!(s.beta_tot, q(0));

    let b = Barcode::new(3, vec![Bar::finite(q(0), q(1), 1), Bar::infinite(q(0), 1)]).unwrap();
    let s = bar_stats(&b);
    assert_eq!((s.k, s.b, s.n), (1, 1, 3));
    assert_eq!((s.beta_tot, s.beta_max), (q(1), Some(q(1))));

    let b = Barcode::new(3, vec![Bar::finite(q(0), q(2), 2), Bar::finite(q(1), q(3), 1)]).unwrap();
    let lengths: Rational = b.bars.iter().map(|x| x.length().unwrap() * q(x.mult as i64)).sum();
    let s = bar_stats(&b);
    assert_eq!(s.beta_tot, lengths);
    assert_eq!(s.beta_tot, q(6));
    assert_eq!(s.beta_max, Some(q(2)));
}

#[test]
fn barcode_smith_examples() {
    let b1 = Barcode::new(3, vec![Bar::finite(q(0), q(1), 1)]).unwrap();
    let bp = Barcode::new(3, vec![Bar::finite(q(0), q(3), 1)]).unwrap();
    assert!(smith_barcode_check(&b1, &bp).unwrap().holds());
    let r = smith_barcode_check(&b1, &Barcode::empty(3)).unwrap();
    assert!(r.m_violations.contains(&Rational::new(1, 2)));
    let inf = Barcode::new(5, vec![Bar::infinite(q(0), 1)]).unwrap();
    assert!(smith_barcode_check(&inf, &inf).unwrap().holds());
}

#[test]
fn torsion_examples() {
    let identity = Barcode::new(2, vec![Bar::infinite(q(0), 4)]).unwrap();
    assert!(torsion_witness(&identity).unwrap().is_none());

    let b = Barcode::new(2, vec![Bar::infinite(q(0), 1), Bar::infinite(q(1), 1)]).unwrap();
    let w = torsion_witness(&b).unwrap().unwrap();
    assert!(w.window.contains(&q(1)));
    assert!(w.window.closure_avoids(&q(0)));
    assert_eq!(w.dim, 1);

    let b = Barcode::new(2, vec![Bar::infinite(q(-1), 1), Bar::infinite(q(1), 1)]).unwrap();
    assert_eq!(c_plus_minus(&b).unwrap(), (q(1), q(-1)));
    let w = torsion_witness(&b).unwrap().unwrap();
    assert!(w.window.closure_avoids(&q(0)));

    assert!(matches!(c_plus_minus(&Barcode::empty(2)), Err(Error::EmptyBarcode)));
}

#[test]
fn morse_model_constants() {
    assert_eq!(enumerate_critical_points(3, 0).len(), 6);
    assert_eq!(enumerate_critical_points(2, 1).len(), 8);
    for p in [2, 3, 5, 7] {
        let index0 = enumerate_critical_points(p, 0).iter().filter(|c| c.index() == 0).count();
        assert_eq!(index0, p as usize);
    }
    assert_eq!(wilson_constant(f(2)).value(), 1);
    assert_eq!(wilson_constant(f(3)).value(), 2);
    assert_eq!(wilson_constant(f(5)).value(), 4);
    let e = local_euler_constant(0, f(7));
    assert_eq!((e.sign.value(), e.u_exponent), (1, 0));
    let e = local_euler_constant(1, f(3));
    assert_eq!((e.sign.value(), e.u_exponent), (2, 2));
    let e = local_euler_constant(2, f(5));
    assert_eq!((e.sign.value(), e.u_exponent), (1, 8));
    for (p, len) in [(3, 6), (2, 4), (7, 8)] {
        let r = resolution_homology(f(p), len);
        assert!(r.is_acyclic_resolution(), "{p}: {:?}", r.dims);
        assert_eq!(r.dims[0], 1);
    }
}
