use brauer4_core::arith::{factor, hilbert_symbol, legendre, prime_divisors, sqrt_mod, square_class, Place};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use proptest::prelude::*;

const SMALL_PRIMES: [i64; 6] = [2, 3, 5, 7, 11, 13];

fn small_support() -> impl Strategy<Value = i64> {
    (prop::sample::select(&[1i64, -1][..]), prop::collection::vec(0u32..3, 6))
        .prop_map(|(s, es)| es.iter().zip(SMALL_PRIMES).fold(s, |acc, (&e, p)| acc * p.pow(e)))
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn places(ns: &[i64]) -> Vec<Place> {
    let mut ps: Vec<u64> = vec![2];
    for &n in ns {
        ps.extend(prime_divisors(&BigInt::from(n)).unwrap());
    }
    ps.sort();
    ps.dedup();
    let mut out: Vec<Place> = ps.into_iter().map(Place::Prime).collect();
    out.push(Place::Infinite);
    out
}

proptest! {
    #[test]
    fn reciprocity(a in small_support(), b in small_support()) {
        let prod: i32 = places(&[a, b])
            .into_iter()
            .map(|v| hilbert_symbol(&rat(a), &rat(b), v).unwrap() as i32)
            .product();
        prop_assert_eq!(prod, 1);
    }

    #[test]
    fn bilinearity(a in small_support(), b in small_support(), c in small_support()) {
        for v in places(&[a, b, c]) {
            let lhs = hilbert_symbol(&rat(a), &rat(b * c), v).unwrap();
            let rhs = hilbert_symbol(&rat(a), &rat(b), v).unwrap() * hilbert_symbol(&rat(a), &rat(c), v).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn symbol_ignores_squares(a in small_support(), b in small_support(), s in 1i64..40) {
        for v in places(&[a, b, s]) {
            let x = hilbert_symbol(&rat(a), &rat(b), v).unwrap();
            let y = hilbert_symbol(&rat(a * s * s), &rat(b), v).unwrap();
            prop_assert_eq!(x, y);
        }
    }

    #[test]
    fn square_class_multiplicative(a in -5000i64..5000, b in -5000i64..5000, n in 1i64..60, d in 1i64..60) {
        prop_assume!(a != 0 && b != 0);
        let ca = square_class(&rat(a)).unwrap();
        let cb = square_class(&rat(b)).unwrap();
        let cab = square_class(&rat(a * b)).unwrap();
        prop_assert_eq!(ca.mul(&cb), cab);
        let scaled = rat(a) * BigRational::new(BigInt::from(n * n), BigInt::from(d * d));
        prop_assert_eq!(square_class(&scaled).unwrap(), ca);
    }

    #[test]
    fn factor_product(n in 1u64..u64::MAX / 2) {
        let ps = factor(&BigUint::from(n)).unwrap();
        prop_assert_eq!(ps.iter().product::<u64>(), n);
        prop_assert!(ps.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(ps.iter().all(|&p| brauer4_core::arith::is_prime_u64(p)));
    }

    #[test]
    fn sqrt_round_trip(a in -10_000i64..10_000, pi in 1usize..25) {
        let p = [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97][pi];
        let r = sqrt_mod(&BigInt::from(a), p).unwrap();
        let l = legendre(&BigInt::from(a), p).unwrap();
        match r {
            Some(r) => {
                prop_assert!(r <= p / 2);
                prop_assert_eq!((r * r) as i64 % p as i64, a.rem_euclid(p as i64));
                prop_assert!(l >= 0);
            }
            None => prop_assert_eq!(l, -1),
        }
    }
}
