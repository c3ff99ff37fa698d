use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use smith_tate::equivariant_complex::{ActionWindow, CochainComplex, ComplexJson, EquivariantComplex, Generator};
use smith_tate::fp_core::{FpMatrix, PrimeField};
use smith_tate::generate::{
    random_barcode, random_equivariant_complex, random_filtered_complex, random_free_complex, random_sigma,
};
use smith_tate::module_decomp::{decompose, tate_and_invariant_dims};
use smith_tate::persistence::{
    barcode_from_filtered, complex_from_barcode, generate_iterated_barcode, smith_barcode_check, window_dim,
};
use smith_tate::rational::{format_rational, parse_rational, Rational};
use smith_tate::tate::tate_cohomology_dims;

fn prime() -> impl Strategy<Value = PrimeField> {
    prop::sample::select(vec![2u64, 3, 5, 7, 11]).prop_map(|p| PrimeField::new(p).unwrap())
}

fn small_prime() -> impl Strategy<Value = PrimeField> {
    prop::sample::select(vec![2u64, 3, 5]).prop_map(|p| PrimeField::new(p).unwrap())
}

fn prefixed(v: &EquivariantComplex, prefix: &str) -> EquivariantComplex {
    let gens = v
        .generators()
        .iter()
        .map(|g| Generator::new(format!("{prefix}{}", g.id), g.degree, g.action))
        .collect();
    EquivariantComplex::new(CochainComplex::new(v.field(), gens, v.d().clone()), v.sigma().clone())
}

fn matrix(max: usize) -> impl Strategy<Value = FpMatrix> {
    (prime(), 1..=max, 1..=max).prop_flat_map(|(f, r, c)| {
        prop::collection::vec(0..f.p(), r * c).prop_map(move |v| {
            let mut m = FpMatrix::zeros(f, r, c);
            for (k, x) in v.into_iter().enumerate() {
                m.set(k / c, k % c, x);
            }
            m
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_inverse_and_fermat(f in prime(), a in 1u32..1000) {
        let a = a % f.p();
        prop_assume!(a != 0);
        prop_assert_eq!(f.mul(a, f.inv(a)), 1);
        prop_assert_eq!(f.pow(a, f.p() as u64), a);
    }

    #[test]
    fn rank_nullity_and_kernel(m in matrix(7)) {
        let k = m.kernel();
        prop_assert_eq!(m.rank() + k.len(), m.cols());
        for v in &k {
            prop_assert!(m.apply(v).iter().all(|&x| x == 0));
        }
        prop_assert_eq!(m.transpose().rank(), m.rank());
    }

    #[test]
    fn solve_finds_preimages(m in matrix(6), seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<u32> = (0..m.cols()).map(|_| rng.gen_range(0..m.field().p())).collect();
        let b = m.apply(&x);
        let y = m.solve(&b).expect("b is in the image");
        prop_assert_eq!(m.apply(&y), b);
    }

    #[test]
    fn rationals_round_trip(n in -1000i64..1000, d in 1i64..50) {
        let r = Rational::new(n, d);
        prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }

    #[test]
    fn planted_barcode_is_recovered(f in prime(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let planted = random_filtered_complex(&mut rng, f, 14, 6);
        let b = barcode_from_filtered(&planted.complex).unwrap();
        prop_assert_eq!(&b, &planted.barcode);
        let infinite: usize = b.infinite_bars().map(|x| x.mult).sum();
        prop_assert_eq!(infinite, planted.complex.total_homology_dim());
        prop_assert_eq!(window_dim(&b, &ActionWindow::everything()).unwrap(), infinite);
    }

    #[test]
    fn barcode_complex_round_trip(f in prime(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_barcode(&mut rng, f.p(), 8);
        let c = complex_from_barcode(&b);
        prop_assert_eq!(barcode_from_filtered(&c).unwrap(), b);
    }

    #[test]
    fn superlevel_windows_count_truncated_homology(f in prime(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_filtered_complex(&mut rng, f, 10, 5).complex;
        let b = barcode_from_filtered(&c).unwrap();
        let mut acts: Vec<Rational> = c.generators().iter().map(|g| g.action).collect();
        acts.sort();
        acts.dedup();
        for a in acts.iter().map(|a| *a + Rational::new(1, 4)) {
            prop_assume!(!acts.contains(&a));
            let w = ActionWindow::above(a);
            prop_assert_eq!(window_dim(&b, &w).unwrap(), c.window_truncate(&w).unwrap().total_homology_dim());
        }
    }

    #[test]
    fn free_complexes_are_tate_acyclic(f in small_prime(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = random_free_complex(&mut rng, f, 15);
        prop_assert_eq!(tate_cohomology_dims(&v).unwrap().total(), 0);
    }

    #[test]
    fn trivial_action_tate_equals_homology(f in prime(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_filtered_complex(&mut rng, f, 10, 4).complex;
        let h = c.total_homology_dim();
        let t = tate_cohomology_dims(&EquivariantComplex::trivial(c)).unwrap();
        prop_assert_eq!((t.even, t.odd), (h, h));
    }

    #[test]
    fn tate_is_additive(f in small_prime(), s1 in any::<u64>(), s2 in any::<u64>()) {
        let v = random_equivariant_complex(&mut ChaCha8Rng::seed_from_u64(s1), f, 8);
        let w = random_equivariant_complex(&mut ChaCha8Rng::seed_from_u64(s2), f, 8);
        let (a, b) = (tate_cohomology_dims(&v).unwrap(), tate_cohomology_dims(&w).unwrap());
        let s = tate_cohomology_dims(&v.direct_sum(&prefixed(&w, "w"))).unwrap();
        prop_assert_eq!((s.even, s.odd), (a.even + b.even, a.odd + b.odd));
    }

    #[test]
    fn decomposition_recovers_planted_blocks(f in prime(), dim in 1usize..14, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_sigma(&mut rng, f, dim);
        let d = decompose(&s.sigma).unwrap();
        prop_assert_eq!(&d.multiplicities, &s.multiplicities);
        prop_assert_eq!(d.dim(), dim);
        let closed = tate_and_invariant_dims(&d);
        let tate = tate_cohomology_dims(&EquivariantComplex::module(s.sigma)).unwrap();
        prop_assert_eq!(closed.tate_dim, tate.total());
        prop_assert_eq!(tate.even, tate.odd);
    }

    #[test]
    fn complex_json_round_trip(f in small_prime(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = random_equivariant_complex(&mut rng, f, 8);
        let text = serde_json::to_string(&ComplexJson::from_equivariant(&v)).unwrap();
        let back = EquivariantComplex::from_json_str(&text).unwrap();
        prop_assert_eq!(back.d(), v.d());
        prop_assert_eq!(back.sigma(), v.sigma());
        prop_assert_eq!(back.generators(), v.generators());
    }

    #[test]
    fn iterated_barcodes_satisfy_smith(f in prime(), seed in any::<u64>(), extra in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b1 = random_barcode(&mut rng, f.p(), 6);
        let bp = generate_iterated_barcode(&b1, extra, seed);
        let r = smith_barcode_check(&b1, &bp).unwrap();
        prop_assert!(r.holds());
        prop_assert!(r.integrals_match);
    }
}
