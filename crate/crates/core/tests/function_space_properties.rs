use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use padic_wavelet::padic::{p_pow_rational, padic_from_big_rational};
use padic_wavelet::{enumerate_cells, Cyclotomic, ExactFn, LocallyConstantFn, PAdicNumber, RationalPhase};
use proptest::prelude::*;

type C = Cyclotomic;

fn value(p: u64, num: i64, phase: u64) -> C {
    C::monomial(p, BigRational::new(num.into(), 3.into()), false, RationalPhase::new(phase as i128, (p * p) as u128))
}

/// Random exact table in frame `(m, k)`.
fn table(p: u64, m: i64, k: i64) -> impl Strategy<Value = ExactFn> {
    let n = p.pow((m + k) as u32);
    prop::collection::vec((0..n, -4i64..5, 0..p * p), 0..10).prop_map(move |entries| {
        LocallyConstantFn::from_table(p, m, k, entries.into_iter().map(|(i, a, ph)| (i, value(p, a, ph)))).unwrap()
    })
}

/// `(p, M, K)` with `M + K ≤ max_depth`.
fn frame(max_depth: i64) -> impl Strategy<Value = (u64, i64, i64)> {
    (prop::sample::select(vec![2u64, 3]), -2i64..=3, 0i64..=max_depth).prop_filter_map("depth", move |(p, m, d)| {
        let k = d - m;
        (d <= max_depth).then_some((p, m, k))
    })
}

fn two_tables(max_depth: i64) -> impl Strategy<Value = (ExactFn, ExactFn)> {
    frame(max_depth).prop_flat_map(|(p, m, k)| (table(p, m, k), table(p, m, k)))
}

/// `χ(−ω b)` from exact rationals.
fn character_of_product(p: u64, omega: &PAdicNumber, b: &BigRational) -> RationalPhase {
    let prod = -(omega.truncated_rational() * b);
    if prod.is_zero() {
        return RationalPhase::ZERO;
    }
    padic_from_big_rational(&prod, p, 40).unwrap().character_phase()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn plancherel((f, g) in two_tables(6)) {
        let lhs = f.inner_product(&g).unwrap();
        let rhs = f.fourier().unwrap().inner_product(&g.fourier().unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn fourier_round_trip((f, _) in two_tables(6)) {
        prop_assert_eq!(f.fourier().unwrap().inverse_fourier().unwrap(), f);
    }

    #[test]
    fn refinement_invariance((f, g) in two_tables(4)) {
        let (fr, gr) = (f.refine(), g.refine());
        prop_assert_eq!(fr.integrate(), f.integrate());
        prop_assert_eq!(fr.inner_product(&gr).unwrap(), f.inner_product(&g).unwrap());
        prop_assert_eq!(fr.inner_product(&g).unwrap(), f.inner_product(&g).unwrap());
        prop_assert!(fr.fourier().unwrap().pointwise_eq(&f.fourier().unwrap(), 0.0).unwrap());
    }

    #[test]
    fn integration_is_linear((f, g) in two_tables(5)) {
        prop_assert_eq!(f.try_add(&g).unwrap().integrate(), f.integrate() + g.integrate());
        let norm = f.norm_sqr();
        prop_assert!(norm.to_complex().re >= 0.0);
        prop_assert_eq!(norm.is_zero(), f.is_zero());
    }

    #[test]
    fn translation_preserves_support_measure((f, _) in two_tables(4), a in 0i64..200) {
        let p = f.prime();
        let k = f.resolution_exponent();
        let b = padic_from_big_rational(&BigRational::new(a.into(), BigInt::from(p * p)), p, 12);
        prop_assume!(b.is_ok());
        let b = b.unwrap().truncate(k.max(0) + 4);
        let t = f.translate(&b).unwrap();
        prop_assert_eq!(t.support_measure(0.0), f.support_measure(0.0));
        prop_assert_eq!(t.integrate(), f.integrate());
    }
}

#[test]
fn fourier_of_translate_is_modulation_exhaustively() {
    for p in [2u64, 3] {
        for (m, k) in [(0i64, 1i64), (1, 1), (1, 0), (0, 2)] {
            // a fixed generic table: value i+1 with phase i/p² on cell i
            let n = p.pow((m + k) as u32);
            let f = LocallyConstantFn::from_table(p, m, k, (0..n).map(|i| (i, value(p, i as i64 + 1, i % (p * p)))))
                .unwrap();
            let f_hat = f.fourier().unwrap();
            for a in 0..p.pow((2 + k) as u32) {
                let b_rat = BigRational::new(a.into(), BigInt::from(p * p));
                let b = if a == 0 {
                    PAdicNumber::zero(p)
                } else {
                    padic_from_big_rational(&b_rat, p, 30).unwrap().truncate(k + 2)
                };
                let lhs = f.translate(&b).unwrap().fourier().unwrap();
                for cell in enumerate_cells(p, lhs.support_exponent(), lhs.resolution_exponent()).unwrap() {
                    let omega = cell.representative();
                    let expected = f_hat.eval(&omega).unwrap().mul_phase(character_of_product(p, &omega, &b_rat));
                    assert_eq!(lhs.value(cell.index), expected, "p={p} (M,K)=({m},{k}) b={a}/p^2 cell={}", cell.index);
                }
            }
        }
    }
}

#[test]
fn subcell_indicators_sum_to_parent() {
    for p in [2u64, 3, 5] {
        for (m, k) in [(0i64, 0i64), (1, 0), (0, 2), (-1, 2)] {
            for parent in enumerate_cells(p, m, k).unwrap() {
                let ind = LocallyConstantFn::<C>::from_table(p, m, k, [(parent.index, C::from_integer(1))]).unwrap();
                let children: Vec<_> = enumerate_cells(p, m, k + 1)
                    .unwrap()
                    .into_iter()
                    .filter(|c| c.index % p.pow((m + k) as u32) == parent.index)
                    .collect();
                assert_eq!(children.len() as u64, p);
                let sum = LocallyConstantFn::<C>::from_table(
                    p,
                    m,
                    k + 1,
                    children.iter().map(|c| (c.index, C::from_integer(1))),
                )
                .unwrap();
                assert!(sum.pointwise_eq(&ind, 0.0).unwrap());
                assert_eq!(sum.integrate(), C::from_rational(p_pow_rational(p, -k)));
            }
        }
    }
}

#[test]
fn frame_examples() {
    assert_eq!(enumerate_cells(2, 0, 0).unwrap().len(), 1);
    assert_eq!(enumerate_cells(2, 0, 2).unwrap().len(), 4);
    assert_eq!(enumerate_cells(3, 1, 1).unwrap().len(), 9);
    let f = LocallyConstantFn::<C>::ball_indicator(3, 0).unwrap();
    assert_eq!(f.integrate(), C::from_integer(1));
    assert_eq!(f.translate(&PAdicNumber::zero(3)).unwrap(), f);
    let g = f.scale_arg(1);
    assert_eq!(g, LocallyConstantFn::<C>::ball_indicator(3, 1).unwrap());
    assert_eq!(LocallyConstantFn::<C>::zero(2, 1, 1).unwrap().fourier().unwrap().nnz(), 0);
}

#[test]
fn floating_and_exact_agree() {
    let p = 3;
    let f = LocallyConstantFn::from_table(p, 1, 1, (0..9).map(|i| (i, value(p, i as i64 - 4, i)))).unwrap();
    let exact = f.fourier().unwrap().to_float();
    let float = f.to_float().fourier().unwrap();
    assert!(exact.max_abs_diff(&float).unwrap() < 1e-12);
    let single = f.convert(|v| {
        let z = v.to_complex();
        num_complex::Complex32::new(z.re as f32, z.im as f32)
    });
    let z = single.fourier().unwrap().to_float();
    assert!(exact.max_abs_diff(&z).unwrap() < 1e-5);
}
