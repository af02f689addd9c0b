use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use padic_wavelet::padic::{ord_p, p_pow_rational};
use padic_wavelet::{AffineElement, PAdicNumber, RationalPhase};
use proptest::prelude::*;

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

/// `ord_p` of a nonzero rational.
fn rational_ord(x: &BigRational, p: u64) -> i64 {
    ord_p(x.numer(), p) as i64 - ord_p(x.denom(), p) as i64
}

/// Digits of `num/den` by repeated "subtract the residue, divide by p".
fn digits_oracle(num: i64, den: i64, p: u64, k: usize) -> (i64, Vec<u64>) {
    let mut x = q(num, den);
    let v = rational_ord(&x, p);
    x *= p_pow_rational(p, -v);
    let pb = BigInt::from(p);
    let mut out = Vec::new();
    for _ in 0..k {
        // x is a p-adic unit or integer; its residue is num · den^{-1} mod p
        let n = x.numer() % &pb;
        let d = x.denom() % &pb;
        let n = ((n + &pb) % &pb).to_u64_digits().1.first().copied().unwrap_or(0);
        let d = ((d + &pb) % &pb).to_u64_digits().1.first().copied().unwrap_or(0);
        let inv = (1..p).find(|i| i * d % p == 1).unwrap();
        let digit = n * inv % p;
        out.push(digit);
        x = (x - BigRational::from_integer(digit.into())) / BigRational::from_integer(pb.clone());
    }
    (v, out)
}

#[test]
fn frozen_expansions_match_oracle() {
    // frozen from digits_oracle
    let cases: [(i64, i64, u64, usize, i64, &[u64]); 4] = [
        (12, 1, 2, 4, 2, &[1, 1, 0, 0]),
        (1, 3, 2, 4, 0, &[1, 1, 0, 1]),
        (-1, 1, 3, 3, 0, &[2, 2, 2]),
        (7, 50, 5, 3, -2, &[1, 3, 2]),
    ];
    for (num, den, p, k, v, digits) in cases {
        assert_eq!(digits_oracle(num, den, p, k), (v, digits.to_vec()));
        let x = PAdicNumber::from_rational(num, den, p, k).unwrap();
        assert_eq!(x.valuation(), Some(v));
        assert_eq!(x.digits(), digits);
    }
}

#[test]
fn character_is_a_homomorphism_exhaustively() {
    // two fractional digits and one integer digit
    for p in [2u64, 3, 5] {
        let den = (p * p) as i64;
        let xs: Vec<PAdicNumber> =
            (0..(p * p * p) as i64).map(|a| PAdicNumber::from_rational(a, den, p, 6).unwrap()).collect();
        for x in &xs {
            for y in &xs {
                let s = x.try_add(y).unwrap();
                assert_eq!(s.character_phase(), x.character_phase() + y.character_phase());
            }
        }
    }
}

#[test]
fn monna_images_of_subcells_partition_the_parent_image() {
    for p in [2u64, 3, 5] {
        for depth in 0..=3i64 {
            for m in 0..=depth {
                let k = depth - m;
                let parent = padic_wavelet::enumerate_cells(p, m, k).unwrap();
                let children = padic_wavelet::enumerate_cells(p, m, k + 1).unwrap();
                for c in &parent {
                    let start = c.representative().monna();
                    let len = p_pow_rational(p, -k);
                    let mut pieces: Vec<BigRational> = children
                        .iter()
                        .filter(|d| d.index % p.pow(depth as u32) == c.index)
                        .map(|d| d.representative().monna())
                        .collect();
                    pieces.sort();
                    assert_eq!(pieces.len() as u64, p);
                    let child_len = p_pow_rational(p, -k - 1);
                    for (i, a) in pieces.iter().enumerate() {
                        assert_eq!(*a, &start + &child_len * BigInt::from(i as u64));
                    }
                    assert_eq!(pieces[0].clone() + child_len * BigInt::from(p), start + len);
                }
            }
        }
    }
}

#[test]
fn monna_is_injective_on_fractional_representatives() {
    for p in [2u64, 3] {
        let mut images: Vec<BigRational> = (0..p.pow(4))
            .map(|a| {
                let digits: Vec<u64> = (0..4).map(|i| a / p.pow(i) % p).collect();
                PAdicNumber::from_digits(p, -4, &digits).unwrap().monna()
            })
            .collect();
        images.sort();
        let expected: Vec<BigRational> = (0..p.pow(4)).map(|n| BigRational::from_integer(n.into())).collect();
        assert_eq!(images, expected);
    }
}

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5, 7])
}

fn padic(p: u64) -> impl Strategy<Value = PAdicNumber> {
    (-100_000i64..100_000, 1i64..5_000, 3usize..10)
        .prop_filter("nonzero", |(n, _, _)| *n != 0)
        .prop_map(move |(n, d, k)| PAdicNumber::from_rational(n, d, p, k).unwrap())
}

fn pair() -> impl Strategy<Value = (PAdicNumber, PAdicNumber)> {
    prime().prop_flat_map(|p| (padic(p), padic(p)))
}

fn triple() -> impl Strategy<Value = (PAdicNumber, PAdicNumber, PAdicNumber)> {
    prime().prop_flat_map(|p| (padic(p), padic(p), padic(p)))
}

/// `x ≡ y mod p^abs`.
fn congruent(x: &BigRational, y: &BigRational, p: u64, abs: i64) -> bool {
    let d = x - y;
    d.is_zero() || rational_ord(&d, p) >= abs
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn ultrametric((x, y) in pair()) {
        let s = x.try_add(&y).unwrap();
        let bound = x.norm().max(y.norm());
        prop_assert!(s.norm() <= bound);
        if x.norm() != y.norm() {
            prop_assert_eq!(s.norm(), bound);
        }
    }

    #[test]
    fn norm_is_multiplicative((x, y) in pair()) {
        prop_assert_eq!(x.try_mul(&y).unwrap().norm(), x.norm() * y.norm());
    }

    #[test]
    fn rational_round_trip(p in prime(), n in -1_000_000i64..1_000_000, d in 1i64..100_000, k in 1usize..16) {
        prop_assume!(n != 0);
        let x = PAdicNumber::from_rational(n, d, p, k).unwrap();
        let abs = x.abs_precision().unwrap();
        prop_assert_eq!(abs, x.valuation().unwrap() + k as i64);
        prop_assert!(congruent(&x.truncated_rational(), &q(n, d), p, abs));
        prop_assert_eq!(x.norm(), p_pow_rational(p, -rational_ord(&q(n, d), p)));
    }

    #[test]
    fn sums_and_products_agree_with_rationals((x, y) in pair()) {
        let p = x.prime();
        let s = x.try_add(&y).unwrap();
        let m = x.try_mul(&y).unwrap();
        let (a, b) = (x.truncated_rational(), y.truncated_rational());
        if let Some(abs) = s.abs_precision() {
            prop_assert!(congruent(&s.truncated_rational(), &(&a + &b), p, abs));
        }
        if let Some(abs) = m.abs_precision() {
            prop_assert!(congruent(&m.truncated_rational(), &(&a * &b), p, abs));
        }
    }

    #[test]
    fn additive_inverse((x, _) in pair()) {
        let z = x.try_add(&x.neg()).unwrap();
        prop_assert!(z.is_zero());
        prop_assert_eq!(z.norm(), BigRational::zero());
    }

    #[test]
    fn text_and_record_round_trip((x, _) in pair()) {
        let text = x.to_string();
        prop_assert_eq!(text.parse::<PAdicNumber>().unwrap(), x.clone());
        prop_assert_eq!(PAdicNumber::from_record(&x.to_record()).unwrap(), x);
    }

    #[test]
    fn character_adds((x, y) in pair()) {
        let s = x.try_add(&y).unwrap();
        // the sum is known to min(abs) ≥ 0 or more; only then is its phase determined
        prop_assume!(s.abs_precision().unwrap_or(i64::MAX) >= 0);
        prop_assert_eq!(s.character_phase(), x.character_phase() + y.character_phase());
    }

    #[test]
    fn affine_associativity((a1, a2, a3) in triple(), (b1, b2, b3) in triple()) {
        prop_assume!(a1.prime() == b1.prime());
        let g1 = AffineElement::new(a1, b1).unwrap();
        let g2 = AffineElement::new(a2, b2).unwrap();
        let g3 = AffineElement::new(a3, b3).unwrap();
        let left = g1.compose(&g2).unwrap().compose(&g3).unwrap();
        let right = g1.compose(&g2.compose(&g3).unwrap()).unwrap();
        let p = left.a().prime();
        for (u, v) in [(left.a(), right.a()), (left.b(), right.b())] {
            let abs = u.abs_precision().unwrap_or(i64::MAX).min(v.abs_precision().unwrap_or(i64::MAX));
            prop_assert!(congruent(&u.truncated_rational(), &v.truncated_rational(), p, abs));
        }
        let id = AffineElement::identity(p, 16).unwrap();
        let g = g1.compose(&id).unwrap();
        prop_assert!(congruent(&g.b().truncated_rational(), &g1.b().truncated_rational(), p,
            g.b().abs_precision().unwrap_or(i64::MAX)));
        prop_assert_eq!(g.a(), g1.a());
    }
}

#[test]
fn phase_of_p_copies_vanishes() {
    for p in [2u64, 3, 5, 7] {
        let ph = RationalPhase::new(1, p as u128);
        assert!(ph.times(p as i64).is_zero());
        assert_eq!(RationalPhase::new(p as i128, p as u128), RationalPhase::ZERO);
    }
}
